"""Pure-numpy kernel for the dyad coordinate-ascent search.

Maximizes f(u, v) = ||unstack(L vec(u v†))||_1 over unit vectors u, v by
cycling through a fixed schedule of angle coordinates (per-component phases
and real two-plane rotations) and running a fixed-length golden-section line
search on each.  A step is kept only if it improves f, so f is non-decreasing
along every restart.

All restarts advance in lockstep so the per-point evaluations can be batched
through one matmul and one batched SVD; each restart's trajectory is exactly
what a sequential implementation of the same recurrence would produce.  The
compiled kernel in ``_ascent.pyx`` implements the identical recurrence
restart by restart.
"""

from __future__ import annotations

import numpy as np

GOLDEN_STEPS = 20
_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def dyad_objective(lmat: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
    """Trace norm of the superoperator image of the dyad u v†."""
    d = u.shape[0]
    w = np.kron(v.conj(), u)  # column-stacked vec(u v†)
    a = (lmat @ w).reshape(d, d)  # transposed unstack; singular values agree
    return float(np.linalg.svd(a, compute_uv=False).sum())


def coordinate_schedule(d: int) -> list[tuple[int, int, int, int]]:
    """(which-vector, kind, i, j) tuples; kind 0 = phase on i, kind 1 = rotation in (i, j)."""
    coords = []
    for which in (0, 1):
        for i in range(d):
            coords.append((which, 0, i, 0))
        for i in range(d):
            for j in range(i + 1, d):
                coords.append((which, 1, i, j))
    return coords


def _batch_objective(lmat_t: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    d = u.shape[1]
    w = (v.conj()[:, :, None] * u[:, None, :]).reshape(u.shape[0], d * d)
    a = (w @ lmat_t).reshape(u.shape[0], d, d)
    return np.linalg.svd(a, compute_uv=False).sum(axis=-1)


def _apply_angle(vec: np.ndarray, kind: int, i: int, j: int, theta: np.ndarray) -> np.ndarray:
    out = vec.copy()
    if kind == 0:
        out[:, i] = out[:, i] * np.exp(1j * theta)
    else:
        c, s = np.cos(theta), np.sin(theta)
        wi, wj = out[:, i].copy(), out[:, j].copy()
        out[:, i] = c * wi - s * wj
        out[:, j] = s * wi + c * wj
    return out


def ascend_batch(
    lmat: np.ndarray,
    u0: np.ndarray,
    v0: np.ndarray,
    iters: int,
    golden_steps: int = GOLDEN_STEPS,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Run ``iters`` ascent steps on every restart row of (u0, v0).

    Returns (f, u, v): per-restart final objective values and vectors.
    """
    lmat_t = np.ascontiguousarray(lmat.T)
    u = u0.copy()
    v = v0.copy()
    nrest, d = u.shape
    coords = coordinate_schedule(d)
    f = _batch_objective(lmat_t, u, v)

    for k in range(iters):
        which, kind, i, j = coords[k % len(coords)]
        half = np.pi if kind == 0 else np.pi / 2

        def trial(theta):
            if which == 0:
                return _batch_objective(lmat_t, _apply_angle(u, kind, i, j, theta), v)
            return _batch_objective(lmat_t, u, _apply_angle(v, kind, i, j, theta))

        a = np.full(nrest, -half)
        b = np.full(nrest, half)
        x1 = b - _INVPHI * (b - a)
        x2 = a + _INVPHI * (b - a)
        f1 = trial(x1)
        f2 = trial(x2)
        for _ in range(golden_steps):
            take_right = f1 < f2
            a = np.where(take_right, x1, a)
            b = np.where(take_right, b, x2)
            new_x1 = np.where(take_right, x2, b - _INVPHI * (b - a))
            new_x2 = np.where(take_right, a + _INVPHI * (b - a), x1)
            probe = np.where(take_right, new_x2, new_x1)
            fp = trial(probe)
            f1, f2 = (
                np.where(take_right, f2, fp),
                np.where(take_right, fp, f1),
            )
            x1, x2 = new_x1, new_x2

        mid = (a + b) / 2
        fm = trial(mid)
        better = fm > f
        if np.any(better):
            # angle 0 is an exact identity, so non-improving rows are untouched;
            # renormalize only the rows that moved.
            theta = np.where(better, mid, 0.0)
            target = _apply_angle(u if which == 0 else v, kind, i, j, theta)
            target[better] /= np.linalg.norm(target[better], axis=1, keepdims=True)
            if which == 0:
                u = target
            else:
                v = target
            f = np.where(better, fm, f)

    return f, u, v
