"""Command-line interface.

Exit status: 0 success, 1 a check failed, 2 usage error.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import assouad, reporting, sinc, verify
from .config import RunConfig, UsageError, build_config, parse_n_list, parse_pairs
from .integrate import QuadratureSpec
from .special import GaussianDensity

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2

RATE_COLUMNS = ("n", "regime", "m", "epsilon2", "bound", "target_rate", "ratio", "verified")
MISE_COLUMNS = ("n", "h", "reps", "mise_mean", "mise_stderr", "variance_bound",
                "bias_sq_bound", "ell_n", "ratio")
DENSITY_GRID = np.linspace(-12.0, 12.0, 241)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--regime", choices=("l2", "hellinger"), default=None)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--quad-L", dest="quad_L", type=float)
    p.add_argument("--quad-panels", dest="quad_panels", type=int)
    p.add_argument("--quad-nodes", dest="quad_nodes", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mixminimax",
                     description="Minimax rate experiments for normal location mixtures.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="run every identity and invariant suite")
    _common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int, help="manual family size (with --epsilon)")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--unchecked", action="store_const", const=True, default=None,
                   help="build the manual family even if epsilon exceeds its bound")
    p.add_argument("--c1", type=float)
    p.add_argument("--lemma22-pairs", dest="lemma22_pairs", type=parse_pairs,
                   help="comma separated a:b pairs, e.g. 1:2,1.5:2")
    p.add_argument("--out", help="directory for verify.json")

    p = sub.add_parser("construct", help="write the scheduled family and its densities")
    _common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("bound", help="certify the lower bound at one n")
    _common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c1", type=float)
    p.add_argument("--out")

    p = sub.add_parser("rates", help="lower-bound and MISE tables over a list of n")
    _common(p)
    p.add_argument("--n-list", dest="n_list", type=parse_n_list, required=True)
    p.add_argument("--c1", type=float)
    p.add_argument("--reps", type=int)
    p.add_argument("--target-variance", dest="target_variance", type=float)
    p.add_argument("--no-plot", dest="plot", action="store_const", const=False, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("estimate", help="Monte Carlo MISE of the sinc estimator")
    _common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reps", type=int)
    p.add_argument("--target-variance", dest="target_variance", type=float)
    p.add_argument("--out")
    return parser


def _spec(cfg: RunConfig) -> QuadratureSpec:
    try:
        return QuadratureSpec(L=cfg.quad_L, panels=cfg.quad_panels, nodes_per_panel=cfg.quad_nodes)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _emit(text: str):
    sys.stdout.write(text)
    sys.stdout.flush()


# -- commands -----------------------------------------------------------------


def cmd_verify(cfg: RunConfig) -> int:
    regimes = [cfg.regime] if cfg.regime else ["l2", "hellinger"]
    checks = verify.run_suites(regimes, cfg.n, pairs=cfg.lemma22_pairs, m=cfg.m,
                               epsilon=cfg.epsilon, unchecked=cfg.unchecked, c1=cfg.c1,
                               seed=cfg.seed, spec=_spec(cfg))
    failed = [c for c in checks if not c.passed]
    header = cfg.header_dict()
    payload = {"checks": [c.to_dict() for c in checks], "passed": not failed}
    if cfg.out:
        reporting.write_json(os.path.join(cfg.out, "verify.json"), payload, header)
    _emit(reporting.dumps_json({"meta": reporting.metadata_block(header), **payload}))
    if failed:
        first = failed[0]
        where = f" ({first.regime})" if first.regime else ""
        print(f"check failed: {first.name}{where}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def cmd_construct(cfg: RunConfig) -> int:
    family = verify.build_family(cfg.regime, cfg.n, c1=cfg.c1)
    header = cfg.header_dict()
    reporting.write_json(os.path.join(cfg.out, "family.json"), {"family": family.to_dict()}, header)
    ones = [1] * family.m
    zeros = [0] * family.m
    u = x = DENSITY_GRID
    rows = [{"x": xi, "pi_zeros": a, "pi_ones": b, "f_zeros": c, "f_ones": d}
            for xi, a, b, c, d in zip(x, family.pi(zeros, u), family.pi(ones, u),
                                      family.f(zeros, x), family.f(ones, x))]
    reporting.write_csv(os.path.join(cfg.out, "densities.csv"),
                        ("x", "pi_zeros", "pi_ones", "f_zeros", "f_ones"), rows, header)
    _emit(reporting.dumps_json({"family": family.to_dict()}))
    return EXIT_OK


def cmd_bound(cfg: RunConfig) -> int:
    family = assouad.scheduled_family(cfg.regime, cfg.n, cfg.c1)
    cert = assouad.certify(family, cfg.n, cfg.c1, _spec(cfg), seed=cfg.seed)
    summary = {k: v for k, v in cert.to_dict().items() if k != "details"}
    if cfg.out:
        reporting.write_json(os.path.join(cfg.out, "bound.json"),
                             {"certificate": cert.to_dict()}, cfg.header_dict())
    _emit(reporting.dumps_json({"certificate": summary}))
    if not cert.verified:
        failed = [name for name in ("separation", "chi2", "positivity")
                  if not getattr(cert, f"{name}_verified")]
        print("check failed: " + (failed[0] if failed else "degenerate"), file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def _gaussian_target(cfg: RunConfig) -> GaussianDensity:
    return GaussianDensity(0.0, cfg.target_variance)


def cmd_rates(cfg: RunConfig) -> int:
    header = cfg.header_dict()
    rows = assouad.rate_table(cfg.regime, cfg.n_list, cfg.c1, spec=_spec(cfg), workers=cfg.workers)
    reporting.write_csv(os.path.join(cfg.out, "lower_bounds.csv"), RATE_COLUMNS, rows, header)
    series = {
        "lower bound": ([r.n for r in rows], [r.bound for r in rows]),
        "target rate": ([r.n for r in rows], [r.target_rate for r in rows]),
    }
    if cfg.regime == "l2":
        target = _gaussian_target(cfg)
        reports = [sinc.mise_mc(target, n, cfg.reps, cfg.seed, workers=cfg.workers)
                   for n in cfg.n_list]
        mise_rows = [r.to_dict() for r in reports]
        reporting.write_csv(os.path.join(cfg.out, "mise.csv"), MISE_COLUMNS, mise_rows, header)
        series["MISE"] = ([r.n for r in reports], [r.mise_mean for r in reports])
    if cfg.plot:
        reporting.svg_loglog(os.path.join(cfg.out, "rates.svg"), series, header,
                             title=f"{cfg.regime}: rates against n")
    spread = assouad.ratio_spread(rows)
    _emit(f"{len(rows)} rows; bound/target spread {spread:.4g}\n")
    if not all(r.verified for r in rows):
        print("check failed: certificate", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def cmd_estimate(cfg: RunConfig) -> int:
    report = sinc.mise_mc(_gaussian_target(cfg), cfg.n, cfg.reps, cfg.seed, workers=cfg.workers)
    header = cfg.header_dict()
    text = reporting.csv_text(MISE_COLUMNS, [report.to_dict()], header)
    if cfg.out:
        reporting.write_csv(os.path.join(cfg.out, "mise.csv"), MISE_COLUMNS,
                            [report.to_dict()], header)
    _emit(text)
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "construct": cmd_construct,
    "bound": cmd_bound,
    "rates": cmd_rates,
    "estimate": cmd_estimate,
}


def main(argv=None, environ=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        flags = {k: v for k, v in vars(args).items() if k != "command"}
        cfg = build_config(args.command, flags, environ)
        if cfg.command in ("construct", "bound", "rates") and cfg.regime is None:
            raise UsageError("--regime is required")
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
