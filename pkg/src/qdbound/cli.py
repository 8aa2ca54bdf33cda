"""Command-line harness: norms, verify, cdd, replay.

Exit codes: 0 all checks passed, 1 at least one verified property failed,
2 usage or input parse error.  Malformed input never raises out of main().
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .campaign import CampaignConfig, replay_trial, run_campaign, write_outputs
from .cdd import CddConfig, rows_to_csv, run_cdd_experiment
from .norms import FROBENIUS, OPERATOR, TRACE, kyfan, norm
from .serialize import load_json, matrix_from_obj
from . import __version__
from .superop import backend_name


def _cmd_norms(args) -> int:
    m = matrix_from_obj(load_json(args.matrix))
    k = args.kyfan_k if args.kyfan_k is not None else min(2, min(m.shape))
    out = {
        "trace": norm(m, TRACE),
        "frobenius": norm(m, FROBENIUS),
        "operator": norm(m, OPERATOR),
        "kyfan_k": k,
        "kyfan": norm(m, kyfan(k)),
    }
    out["ordering_ok"] = (
        out["operator"] <= out["frobenius"] + 1e-12
        and out["frobenius"] <= out["trace"] + 1e-12
    )
    json.dump(out, sys.stdout)
    sys.stdout.write("\n")
    return 0


def _cmd_verify(args) -> int:
    cfg = CampaignConfig.from_obj(load_json(args.config))
    if args.output is not None:
        cfg = CampaignConfig(cfg.seed, cfg.trials, cfg.dims, cfg.time_scale, cfg.suites, args.output)
    result = run_campaign(cfg, mutate=args.mutate_bounds)
    json_path, csv_path = write_outputs(result, cfg.output_dir)
    print(f"wrote {json_path} and {csv_path}")
    if result.failures:
        for t in result.failures:
            worst = t.checks.worst
            print(
                f"FAIL suite={t.suite} trial={t.trial} seed={cfg.seed} check={worst.name} "
                f"slack={worst.slack:.3e}; replay with: "
                f"qdbound replay {args.config} {t.suite} {t.trial}",
                file=sys.stderr,
            )
        return 1
    print(f"all {len(result.trials)} trials passed")
    return 0


def _cmd_cdd(args) -> int:
    obj = load_json(args.config)
    if not isinstance(obj, dict):
        raise ValueError("cdd config must be a JSON object")
    try:
        levels = [int(x) for x in obj["levels"]]
        b_ops = tuple(matrix_from_obj(m) for m in obj["b_ops"])
        h_b = matrix_from_obj(obj["h_b"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed cdd config: {exc}") from exc
    total_time = obj.get("total_time")
    tau = obj.get("tau")
    if (tau is None) == (total_time is None):
        raise ValueError("specify exactly one of 'tau' or 'total_time'")
    cfg = CddConfig(
        tau=float(tau) if tau is not None else float(total_time) / 4 ** min(levels),
        b_ops=b_ops,  # type: ignore[arg-type]
        h_b=h_b,
        h_s=matrix_from_obj(obj["h_s"]) if obj.get("h_s") else None,
        rho_s0=matrix_from_obj(obj["rho_s0"]) if obj.get("rho_s0") else None,
        rho_b0=matrix_from_obj(obj["rho_b0"]) if obj.get("rho_b0") else None,
    )
    rows = run_cdd_experiment(
        levels,
        cfg,
        total_time=float(total_time) if total_time is not None else None,
        seed=int(obj.get("seed", 0)),
    )
    text = rows_to_csv(rows, header_comment=f"qdbound {__version__} backend={backend_name()}")
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)

    failed = False
    for row in rows:
        exp_phi = 0.5 * math.expm1(2 * row.phi_cdd_bound)
        if row.valid and row.magnus_gate_ok:
            if row.measured_d > exp_phi + 1e-8 or row.measured_d > row.theorem2_bound + 1e-8:
                print(f"FAIL level={row.level}: measured_D exceeds its bound", file=sys.stderr)
                failed = True
        if row.review_flag:
            print(
                f"note: level={row.level} measured T*dOmega {row.measured_t_delta_omega:.3e} "
                f"exceeds phi bound {row.phi_cdd_bound:.3e}; flagged for review",
                file=sys.stderr,
            )
    return 1 if failed else 0


def _cmd_replay(args) -> int:
    cfg = CampaignConfig.from_obj(load_json(args.config))
    if args.seed is not None:
        cfg = CampaignConfig(args.seed, cfg.trials, cfg.dims, cfg.time_scale, cfg.suites, cfg.output_dir)
    result = replay_trial(cfg, args.suite, args.trial)
    return 0 if result.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdbound",
        description="Numerical verification of trace-distance bounds on quantum dynamics.",
    )
    parser.add_argument("--version", action="version", version=f"qdbound {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_norms = sub.add_parser("norms", help="print the norms of a matrix JSON file")
    p_norms.add_argument("matrix")
    p_norms.add_argument("--kyfan-k", type=int, default=None)
    p_norms.set_defaults(func=_cmd_norms)

    p_verify = sub.add_parser("verify", help="run a fuzz campaign from a config file")
    p_verify.add_argument("config")
    p_verify.add_argument("--output", default=None, help="override output directory")
    p_verify.add_argument(
        "--mutate-bounds",
        action="store_true",
        help="self-test: corrupt the main bound so the campaign must fail",
    )
    p_verify.set_defaults(func=_cmd_verify)

    p_cdd = sub.add_parser("cdd", help="run a decoupling experiment from a config file")
    p_cdd.add_argument("config")
    p_cdd.add_argument("--output", default=None, help="CSV output path (default stdout)")
    p_cdd.set_defaults(func=_cmd_cdd)

    p_replay = sub.add_parser("replay", help="rerun one campaign trial verbosely")
    p_replay.add_argument("config")
    p_replay.add_argument("suite")
    p_replay.add_argument("trial", type=int)
    p_replay.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_replay.set_defaults(func=_cmd_replay)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; pass both through
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
