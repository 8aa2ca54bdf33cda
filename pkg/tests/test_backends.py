"""Compiled vs pure-numpy ascent kernel: same recurrence, same answers."""

import numpy as np
import pytest

from qdbound import _backend
from qdbound.linalg import gue_hermitian, haar_unitary, stream
from qdbound.superop import commutator_generator, conjugation_channel, ot_norm_lower

needs_compiled = pytest.mark.skipif(
    _backend.BACKEND != "compiled", reason="compiled kernel not built"
)


def test_backend_is_reported():
    assert _backend.BACKEND in ("compiled", "python")


def test_python_backend_always_available():
    l = commutator_generator(gue_hermitian(2, stream(110)))
    est = ot_norm_lower(l, samples=4, refine_iters=30, seed=0, backend="python")
    assert est.value > 0


@needs_compiled
@pytest.mark.parametrize("dim", [2, 3, 4])
def test_backends_agree_on_commutator_generators(dim):
    for seed in range(5):
        l = commutator_generator(gue_hermitian(dim, stream(111, seed)))
        e_c = ot_norm_lower(l, samples=6, refine_iters=50, seed=seed, backend="compiled")
        e_p = ot_norm_lower(l, samples=6, refine_iters=50, seed=seed, backend="python")
        assert abs(e_c.value - e_p.value) < 1e-9


@needs_compiled
def test_backends_agree_on_channels(paulis):
    for seed in range(5):
        ch = conjugation_channel(haar_unitary(3, stream(112, seed)))
        e_c = ot_norm_lower(ch, samples=4, refine_iters=30, seed=seed, backend="compiled")
        e_p = ot_norm_lower(ch, samples=4, refine_iters=30, seed=seed, backend="python")
        assert abs(e_c.value - e_p.value) < 1e-9


@needs_compiled
def test_raw_kernel_trajectories_match():
    # beyond the best value: the full per-restart final vectors must agree
    rng = stream(113)
    d = 3
    l = commutator_generator(gue_hermitian(d, rng)).matrix
    u0 = rng.standard_normal((4, d)) + 1j * rng.standard_normal((4, d))
    v0 = rng.standard_normal((4, d)) + 1j * rng.standard_normal((4, d))
    u0 /= np.linalg.norm(u0, axis=1, keepdims=True)
    v0 /= np.linalg.norm(v0, axis=1, keepdims=True)
    f_c, u_c, v_c = _backend.ascend_batch(l, u0, v0, 40, backend="compiled")
    f_p, u_p, v_p = _backend.ascend_batch(l, u0, v0, 40, backend="python")
    assert np.max(np.abs(f_c - f_p)) < 1e-9
    assert np.max(np.abs(u_c - u_p)) < 1e-7
    assert np.max(np.abs(v_c - v_p)) < 1e-7
