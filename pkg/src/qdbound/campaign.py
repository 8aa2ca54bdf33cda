"""Seeded fuzz campaigns over the verification suites.

Every trial derives its own Philox substream from (seed, suite-id, trial), so
campaigns are reproducible bit for bit, individual failures replay in
isolation, and trials can run on a thread pool without sharing generator
state.  Outputs are a campaign.json with per-trial check records and a
summary.csv with one row per trial; repeated runs with the same config and
seed produce byte-identical files (the first line of each file is a versioned
header recording the package version, RNG identity, and active kernel).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .bounds import Scenario, dyson_chain_check, verify_scenario
from .cdd import CddConfig, run_cdd_experiment
from .dynamics import (
    Free,
    HamiltonianSchedule,
    constant_schedule,
    effective_hamiltonian,
    effective_norm_check,
    propagator,
    schedule_sum,
)
from .linalg import (
    GENERATOR_ID,
    SubsystemDims,
    ginibre,
    gue_hermitian,
    haar_unitary,
    partial_trace_b,
    random_density,
    random_pure_density,
    stream,
    svd_values,
    tensor,
)
from .norms import (
    FROBENIUS,
    MULTIPLICATIVE_KINDS,
    OPERATOR,
    TRACE,
    check_duality,
    check_partial_trace_bound,
    kyfan,
    norm,
)
from .reporting import CheckRecord, SlackReport
from .superop import backend_name

SUITE_IDS = {
    "norms": 0,
    "duality": 1,
    "partial-trace": 2,
    "dynamics": 3,
    "bounds": 4,
    "dyson": 5,
    "cdd": 6,
}


@dataclass(frozen=True)
class CampaignConfig:
    seed: int
    trials: int
    dims: SubsystemDims
    time_scale: float
    suites: tuple[str, ...]
    output_dir: str

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.suites:
            raise ValueError("at least one suite must be selected")
        for s in self.suites:
            if s not in SUITE_IDS:
                raise ValueError(f"unknown suite {s!r}, expected one of {sorted(SUITE_IDS)}")

    @classmethod
    def from_obj(cls, obj: dict) -> "CampaignConfig":
        if not isinstance(obj, dict):
            raise ValueError("campaign config must be a JSON object")
        try:
            dims = obj.get("dims", {"dS": 2, "dB": 2})
            return cls(
                seed=int(obj["seed"]),
                trials=int(obj["trials"]),
                dims=SubsystemDims(int(dims["dS"]), int(dims["dB"])),
                time_scale=float(obj.get("time_scale", 0.5)),
                suites=tuple(obj["suites"]),
                output_dir=str(obj.get("output_dir", ".")),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed campaign config: {exc}") from exc


@dataclass(frozen=True)
class TrialResult:
    suite: str
    trial: int
    checks: SlackReport
    info: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.checks.ok


def random_scenario(
    dims: SubsystemDims, time_scale: float, rng: np.random.Generator, label: str = ""
) -> Scenario:
    """Random ideal/actual schedule pair in the well-conditioned regime.

    Base generators are operator-norm-1 draws, the perturbation is a quarter
    of that, and segment durations sum to ``time_scale``; the resulting
    effective generators stay far from the log branch cut.
    """
    d = dims.joint
    n_seg = int(rng.integers(1, 4))
    durations = rng.uniform(0.5, 1.5, n_seg)
    durations *= time_scale / durations.sum()

    def normalized(scale):
        h = gue_hermitian(d, rng)
        return scale * h / float(svd_values(h)[0])

    ideal_segs, actual_segs = [], []
    for dur in durations:
        h0 = normalized(1.0)
        v = normalized(0.25)
        ideal_segs.append(Free(float(dur), h0))
        actual_segs.append(Free(float(dur), h0 + v))
    rho0 = tensor(random_pure_density(dims.d_s, rng), np.eye(dims.d_b, dtype=complex) / dims.d_b)
    return Scenario(
        dims,
        HamiltonianSchedule(tuple(actual_segs)),
        HamiltonianSchedule(tuple(ideal_segs)),
        rho0,
        label=label,
    )


def _suite_norms(cfg, rng, trial, _seed, _mutate):
    dim = int(rng.integers(2, 9))
    a = ginibre(dim, rng)
    b = ginibre(dim, rng)
    u = haar_unitary(dim, rng)
    v = haar_unitary(dim, rng)
    k = int(rng.integers(1, dim + 1))
    kinds = list(MULTIPLICATIVE_KINDS) + [kyfan(k)]
    checks = []
    for kind in kinds:
        checks.append(
            CheckRecord(f"unitary-invariance[{kind}]", abs(norm(u @ a @ v, kind) - norm(a, kind)), 0.0)
        )
        checks.append(
            CheckRecord(f"submultiplicative[{kind}]", norm(a @ b, kind), norm(a, kind) * norm(b, kind))
        )
        checks.append(
            CheckRecord(
                f"mixed-bound[{kind}]", norm(a @ b, kind), norm(a, OPERATOR) * norm(b, kind)
            )
        )
    checks.append(CheckRecord("ordering-op<=fro", norm(a, OPERATOR), norm(a, FROBENIUS), 1e-12))
    checks.append(CheckRecord("ordering-fro<=tr", norm(a, FROBENIUS), norm(a, TRACE), 1e-12))
    small = ginibre(int(rng.integers(2, 4)), rng)
    for kind in MULTIPLICATIVE_KINDS:
        checks.append(
            CheckRecord(
                f"tensor-multiplicative[{kind}]",
                abs(norm(tensor(a, small), kind) - norm(a, kind) * norm(small, kind)),
                0.0,
            )
        )
    return TrialResult("norms", trial, SlackReport(tuple(checks)), {"dim": dim})


def _suite_duality(cfg, rng, trial, seed, _mutate):
    dim = int(rng.integers(2, 6))
    a = ginibre(dim, rng)
    report = check_duality(a, trials=20, seed=seed)
    return TrialResult("duality", trial, report, {"dim": dim})


def _suite_partial_trace(cfg, rng, trial, _seed, _mutate):
    dims = cfg.dims
    if trial % 2 == 0:
        x = random_density(dims.joint, rng) - random_density(dims.joint, rng)
    else:
        x = ginibre(dims.joint, rng)
    checks = []
    for kind in MULTIPLICATIVE_KINDS:
        checks.extend(check_partial_trace_bound(x, dims, kind).checks)
    tr_err = abs(np.trace(partial_trace_b(x, dims)) - np.trace(x))
    checks.append(CheckRecord("trace-preserved", float(tr_err), 0.0, 1e-12))
    return TrialResult("partial-trace", trial, SlackReport(tuple(checks)), {})


def _suite_dynamics(cfg, rng, trial, _seed, _mutate):
    d = cfg.dims.joint
    t = cfg.time_scale

    def normalized(scale):
        h = gue_hermitian(d, rng)
        return scale * h / float(svd_values(h)[0])

    segs = [Free(t / 3, normalized(1.0)) for _ in range(3)]
    sched = HamiltonianSchedule(tuple(segs))
    u_full = propagator(sched)
    u_parts = propagator(constant_schedule(t / 3, segs[2].h)) @ propagator(
        HamiltonianSchedule(tuple(segs[:2]))
    )
    checks = [
        CheckRecord("propagator-composition", float(np.max(np.abs(u_full - u_parts))), 0.0, 1e-12)
    ]
    eff = effective_hamiltonian(u_full, t)
    from .linalg import expm_skew_hermitian

    recon = float(np.max(np.abs(expm_skew_hermitian(eff.omega, t) - u_full)))
    checks.append(CheckRecord("effective-reconstruction", recon, 0.0, 1e-8))
    h0 = HamiltonianSchedule(tuple(Free(s.duration, s.h) for s in segs))
    v = HamiltonianSchedule(tuple(Free(s.duration, normalized(0.3)) for s in segs))
    kind = MULTIPLICATIVE_KINDS[trial % 3]
    checks.extend(effective_norm_check(h0, v, kind).checks)
    checks.extend(effective_norm_check(h0, v, kind, picture="schroedinger").checks)
    return TrialResult("dynamics", trial, SlackReport(tuple(checks)), {})


def _suite_bounds(cfg, rng, trial, seed, mutate):
    scn = random_scenario(cfg.dims, cfg.time_scale, rng, label=f"bounds-{trial}")
    report = verify_scenario(scn, ot_samples=4, ot_refine_iters=40, seed=seed)
    checks = report.checks
    if mutate:
        # harness self-test: corrupt the main bound so violations must surface
        checks = SlackReport(
            tuple(
                CheckRecord(c.name, c.lhs, c.rhs * 1e-6, c.tol)
                if c.name == "measured<=theorem2"
                else c
                for c in checks.checks
            )
        )
    return TrialResult(
        "bounds",
        trial,
        checks,
        {"measured_D": report.measured_d, "theorem2_bound": report.theorem2_bound},
    )


def _suite_dyson(cfg, rng, trial, seed, _mutate):
    scn = random_scenario(cfg.dims, cfg.time_scale, rng, label=f"dyson-{trial}")
    report = dyson_chain_check(
        scn.h_ideal, scn.h_actual, samples=4, refine_iters=40, rho0=scn.rho0, seed=seed
    )
    return TrialResult("dyson", trial, report, {})


def _suite_cdd(cfg, rng, trial, seed, _mutate):
    d_b = cfg.dims.d_b

    def normalized(scale):
        h = gue_hermitian(d_b, rng)
        return scale * h / float(svd_values(h)[0])

    cdd_cfg = CddConfig(
        tau=0.25,
        b_ops=(normalized(0.1), normalized(0.1), normalized(0.1)),
        h_b=normalized(0.1),
    )
    rows = run_cdd_experiment([1, 2], cdd_cfg, total_time=1.0, seed=seed)
    checks = []
    for row in rows:
        exp_phi = 0.5 * float(np.expm1(2 * row.phi_cdd_bound))
        checks.append(CheckRecord(f"L{row.level}-D<=theorem2", row.measured_d, row.theorem2_bound, 1e-8))
        if row.valid and row.magnus_gate_ok:
            checks.append(CheckRecord(f"L{row.level}-D<=exp-phi", row.measured_d, exp_phi, 1e-8))
    checks.append(
        CheckRecord(
            "decay-L1>=L2",
            rows[1].measured_t_delta_omega,
            rows[0].measured_t_delta_omega,
            1e-12,
        )
    )
    return TrialResult("cdd", trial, SlackReport(tuple(checks)), {})


_SUITE_RUNNERS = {
    "norms": _suite_norms,
    "duality": _suite_duality,
    "partial-trace": _suite_partial_trace,
    "dynamics": _suite_dynamics,
    "bounds": _suite_bounds,
    "dyson": _suite_dyson,
    "cdd": _suite_cdd,
}


def run_trial(cfg: CampaignConfig, suite: str, trial: int, mutate: bool = False) -> TrialResult:
    rng = stream(cfg.seed, SUITE_IDS[suite], trial)
    derived_seed = int(rng.integers(0, 2**62))
    return _SUITE_RUNNERS[suite](cfg, rng, trial, derived_seed, mutate)


@dataclass(frozen=True)
class CampaignResult:
    config: CampaignConfig
    trials: tuple[TrialResult, ...]

    @property
    def failures(self) -> list[TrialResult]:
        return [t for t in self.trials if not t.ok]

    @property
    def ok(self) -> bool:
        return not self.failures


def run_campaign(cfg: CampaignConfig, mutate: bool = False) -> CampaignResult:
    jobs = [(suite, trial) for suite in cfg.suites for trial in range(cfg.trials)]
    threads = max(1, int(os.environ.get("QDBOUND_THREADS", "1")))
    if threads == 1:
        results = [run_trial(cfg, s, t, mutate) for s, t in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda st: run_trial(cfg, st[0], st[1], mutate), jobs))
    return CampaignResult(cfg, tuple(results))


def _header(cfg: CampaignConfig) -> dict:
    return {
        "version": __version__,
        "generator": GENERATOR_ID,
        "backend": backend_name(),
        "config": {
            "seed": cfg.seed,
            "trials": cfg.trials,
            "dims": {"dS": cfg.dims.d_s, "dB": cfg.dims.d_b},
            "time_scale": cfg.time_scale,
            "suites": list(cfg.suites),
        },
    }


def campaign_json_obj(result: CampaignResult) -> dict:
    return {
        "header": _header(result.config),
        "trials": [
            {
                "suite": t.suite,
                "trial": t.trial,
                "ok": t.ok,
                "info": t.info,
                "checks": t.checks.to_dict()["checks"],
            }
            for t in result.trials
        ],
        "summary": {
            "total": len(result.trials),
            "failures": len(result.failures),
        },
    }


def summary_csv_text(result: CampaignResult) -> str:
    lines = [
        f"# qdbound {__version__} campaign backend={backend_name()} seed={result.config.seed}",
        "suite,trial,ok,worst_slack,worst_check",
    ]
    for t in result.trials:
        worst = t.checks.worst
        lines.append(f"{t.suite},{t.trial},{str(t.ok).lower()},{worst.slack!r},{worst.name}")
    return "\n".join(lines) + "\n"


def write_outputs(result: CampaignResult, outdir: str) -> tuple[str, str]:
    from .serialize import dump_json

    os.makedirs(outdir, exist_ok=True)
    json_path = os.path.join(outdir, "campaign.json")
    csv_path = os.path.join(outdir, "summary.csv")
    dump_json(campaign_json_obj(result), json_path)
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(summary_csv_text(result))
    return json_path, csv_path


def replay_trial(cfg: CampaignConfig, suite: str, trial: int) -> TrialResult:
    """Rerun one trial and print every intermediate check record."""
    if suite not in SUITE_IDS:
        raise ValueError(f"unknown suite {suite!r}")
    result = run_trial(cfg, suite, trial)
    print(f"replay suite={suite} trial={trial} seed={cfg.seed} -> {'ok' if result.ok else 'FAIL'}")
    for c in result.checks.checks:
        mark = "ok " if c.ok else "FAIL"
        print(f"  [{mark}] {c.name}: lhs={c.lhs!r} rhs={c.rhs!r} slack={c.slack:.3e}")
    for key, val in result.info.items():
        print(f"  {key} = {val!r}")
    return result
