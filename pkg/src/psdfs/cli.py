"""Command-line front end: ``psdfs <command> [flags]``.

Commands write CSV or JSON artifacts; summary lines go to standard output,
or to standard error when the artifact itself is written to standard output.
Exit codes: 0 success, 2 invalid input, 1 IO or numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .channels import LossParams, lossy_wigner_closed, lossy_wigner_oracle
from .measures import MeasureReport, QuadConfig, measure_report
from .parallel import pmap
from .state import NullStateError, StateParams, density_matrix, psdfs_closed_form, psdfs_matrix_oracle
from .tomography import DetectorParams, detected_wigner, detected_wigner_via_channel, quadrature_distribution
from .wigner import (
    GridGeometry,
    characteristic_function,
    trapezoid_weights,
    wigner_closed,
    wigner_from_characteristic,
    wigner_grid,
    wigner_parity_oracle,
)

EXIT_OK, EXIT_RUNTIME, EXIT_INVALID = 0, 1, 2


class UsageError(ValueError):
    """Bad flag value; reported with exit code 2."""


def fmt(x: float) -> str:
    """12 significant digits; negative zero printed as 0."""
    return f"{float(x) + 0.0:.12g}"


def rnd(x):
    if x is None:
        return None
    return float(fmt(x))


# -- parsing ----------------------------------------------------------------


def parse_complex(text: str) -> complex:
    """Accept '0.5', '0.5+0.2i', '-1.5i', '1e-3-2j'."""
    s = text.strip().replace(" ", "")
    if not s:
        raise UsageError("empty complex number")
    s = s.replace("i", "j")
    if s in ("j", "+j", "-j"):
        s = s.replace("j", "1j")
    try:
        z = complex(s)
    except ValueError:
        raise UsageError(f"cannot parse {text!r} as a complex number (expected a+bi)") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise UsageError(f"complex number {text!r} is not finite")
    return z


def parse_float(text: str, name: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise UsageError(f"--{name}: cannot parse {text!r} as a number") from None
    if not math.isfinite(x):
        raise UsageError(f"--{name} must be finite")
    return x


def parse_axis(text: str, name: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--{name} expects min:max:steps, got {text!r}")
    lo, hi = parse_float(parts[0], name), parse_float(parts[1], name)
    try:
        steps = int(parts[2])
    except ValueError:
        raise UsageError(f"--{name}: steps must be an integer, got {parts[2]!r}") from None
    if steps < 2:
        raise UsageError(f"--{name}: steps must be >= 2")
    if hi <= lo:
        raise UsageError(f"--{name}: need min < max")
    return lo, hi, steps


def parse_int_list(text: str, name: str) -> list[int]:
    out = []
    for tok in text.split(","):
        try:
            v = int(tok)
        except ValueError:
            raise UsageError(f"--{name}: {tok!r} is not an integer") from None
        if v < 0:
            raise UsageError(f"--{name} must be nonnegative")
        out.append(v)
    return out


@dataclass
class RunConfig:
    """Validated flags for one command."""

    command: str
    n: list[int] = field(default_factory=lambda: [0])
    k: list[int] = field(default_factory=lambda: [0])
    alpha: list[complex] = field(default_factory=lambda: [0j])
    dim: int | None = None
    grid: GridGeometry | None = None
    kappa_t: float = 0.0
    eta: float = 1.0
    theta: float = 0.0
    out: str | None = None
    fmt: str = "csv"
    oracle: bool = False

    @property
    def params(self) -> StateParams:
        return StateParams(self.n[0], self.k[0], self.alpha[0], self.dim)


def _alpha_list(args) -> list[complex]:
    if getattr(args, "alpha_range", None):
        lo, hi, steps = parse_axis(args.alpha_range, "alpha-range")
        return [complex(x) for x in np.linspace(lo, hi, steps)]
    return [parse_complex(t) for t in args.alpha.split(",")]


def build_config(args) -> RunConfig:
    multi = args.command == "measures"
    n = parse_int_list(args.n, "n")
    k = parse_int_list(args.k, "k")
    alpha = _alpha_list(args)
    if not multi and (len(n) > 1 or len(k) > 1 or len(alpha) > 1):
        raise UsageError(f"{args.command} takes a single (n, k, alpha); lists are for 'measures'")
    cfg = RunConfig(command=args.command, n=n, k=k, alpha=alpha, out=args.out, fmt=args.format)
    cfg.dim = args.dim
    if hasattr(args, "grid"):
        lo, hi, steps = parse_axis(args.grid, "grid")
        ilo, ihi, isteps = parse_axis(args.grid_im, "grid-im") if args.grid_im else (lo, hi, steps)
        cfg.grid = GridGeometry(lo, hi, steps, ilo, ihi, isteps)
    if hasattr(args, "kt"):
        cfg.kappa_t = parse_float(args.kt, "kt")
        LossParams(cfg.kappa_t)
    if hasattr(args, "eta"):
        cfg.eta = parse_float(args.eta, "eta")
        cfg.theta = parse_float(args.theta, "theta")
        DetectorParams(cfg.eta, cfg.theta)
    cfg.oracle = bool(getattr(args, "oracle", False))
    if not multi:
        cfg.params  # validates n, k, alpha, dim
    return cfg


# -- output -----------------------------------------------------------------


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (fmt(v) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


class Output:
    """Artifact writer that keeps summaries off stdout when stdout carries data."""

    def __init__(self, out: str | None):
        self.out = out
        self.summary = sys.stderr if out in (None, "-") else sys.stdout

    def write(self, text: str, suffix: str = "") -> None:
        if self.out in (None, "-"):
            sys.stdout.write(text)
            return
        with open(self.out + suffix, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)

    def say(self, line: str) -> None:
        print(line, file=self.summary)


def _grid_artifact(cfg: RunConfig, values: np.ndarray, names=("re_gamma", "im_gamma", "w")) -> str:
    re_ax, im_ax = cfg.grid.re_axis, cfg.grid.im_axis
    if cfg.fmt == "json":
        return _json_text(
            {
                names[0]: [rnd(x) for x in re_ax],
                names[1]: [rnd(x) for x in im_ax],
                names[2]: [[rnd(v) for v in row] for row in values],
            }
        )
    rows = ((float(re_ax[i]), float(im_ax[j]), float(values[i, j])) for i in range(re_ax.size) for j in range(im_ax.size))
    return _csv_text(list(names), rows)


def _grid_integral(cfg: RunConfig, values: np.ndarray) -> float:
    w = np.outer(trapezoid_weights(cfg.grid.re_axis), trapezoid_weights(cfg.grid.im_axis))
    return float(np.sum(w * values))


# -- commands ---------------------------------------------------------------


def cmd_state(cfg: RunConfig) -> int:
    p = cfg.params
    v = psdfs_closed_form(p)
    out = Output(cfg.out)
    norm = float(np.sum(np.abs(v.amps) ** 2))
    tail = v.tail_mass(start=p.n + 1)
    if cfg.fmt == "csv":
        out.write(_csv_text(["index", "re", "im"], ((i, float(a.real), float(a.imag)) for i, a in enumerate(v.amps))))
    else:
        doc = {
            "params": {"n": p.n, "k": p.k, "alpha": [rnd(p.alpha.real), rnd(p.alpha.imag)], "dim": v.dim},
            "amplitudes": [[rnd(a.real), rnd(a.imag)] for a in v.amps],
            "norm_check": rnd(norm),
            "tail_mass": rnd(tail),
        }
        out.write(_json_text(doc))
    out.say(f"dim {v.dim}  norm {fmt(norm)}  tail_mass {fmt(tail)}")
    return EXIT_OK


def cmd_wigner(cfg: RunConfig) -> int:
    p = cfg.params
    p.check_nonnull()
    g = wigner_grid(p, cfg.grid)
    out = Output(cfg.out)
    out.write(_grid_artifact(cfg, g.values))
    out.say(f"min {fmt(g.min)}")
    out.say(f"integral {fmt(g.integral)}")
    if cfg.oracle:
        rho = density_matrix(psdfs_closed_form(p))
        dev = float(np.max(np.abs(wigner_parity_oracle(rho, cfg.grid.mesh()) - g.values)))
        out.say(f"oracle_max_dev {fmt(dev)}")
    return EXIT_OK


def _report_row(rep) -> list:
    cov = rep.covariance
    err = "; ".join(f"{key}: {msg}" for key, msg in sorted(rep.errors.items()))
    return [
        rep.n,
        rep.k,
        float(rep.alpha.real),
        float(rep.alpha.imag),
        rep.linear_entropy,
        rep.skew,
        rep.wln,
        rep.rel_entropy_ng,
        None if cov is None else cov.s_qq,
        None if cov is None else cov.s_pp,
        None if cov is None else cov.s_qp,
        err,
    ]


MEASURE_COLUMNS = [
    "n", "k", "alpha_re", "alpha_im", "linear_entropy", "skew", "wln",
    "rel_entropy_ng", "s_qq", "s_pp", "s_qp", "error",
]


def _rounded_json(obj):
    if isinstance(obj, float):
        return rnd(obj)
    if isinstance(obj, dict):
        return {key: _rounded_json(v) for key, v in obj.items()}
    if isinstance(obj, list):
        return [_rounded_json(v) for v in obj]
    return obj


def _one_report(point):
    n, k, a, dim = point
    try:
        p = StateParams(n, k, a, dim)
    except ValueError as exc:
        return MeasureReport(n, k, complex(a), errors={"params": str(exc)})
    return measure_report(p, QuadConfig())


def cmd_measures(cfg: RunConfig) -> int:
    points = [(n, k, a, cfg.dim) for n in cfg.n for k in cfg.k for a in cfg.alpha]
    reports = pmap(_one_report, points)
    out = Output(cfg.out)
    if cfg.fmt == "json":
        out.write(_json_text([_rounded_json(r.to_json()) for r in reports]))
    else:
        out.write(_csv_text(MEASURE_COLUMNS, (_report_row(r) for r in reports)))
    good = sum(r.ok for r in reports)
    out.say(f"points {len(reports)}  ok {good}")
    if good:
        return EXIT_OK
    if all(set(r.errors) == {"params"} for r in reports):
        return EXIT_INVALID
    return EXIT_RUNTIME


def cmd_evolve(cfg: RunConfig) -> int:
    p = cfg.params
    p.check_nonnull()
    lp = LossParams(cfg.kappa_t)
    mesh = cfg.grid.mesh()
    vals = lossy_wigner_closed(p, lp, mesh)
    out = Output(cfg.out)
    out.write(_grid_artifact(cfg, vals, ("re_zeta", "im_zeta", "w")))
    out.say(f"min {fmt(np.min(vals))}")
    out.say(f"integral {fmt(_grid_integral(cfg, vals))}")
    if cfg.oracle:
        dev = float(np.max(np.abs(lossy_wigner_oracle(p, lp, mesh) - vals)))
        out.say(f"oracle_max_dev {fmt(dev)}")
    return EXIT_OK


def cmd_tomo(cfg: RunConfig) -> int:
    if cfg.out in (None, "-"):
        raise UsageError("tomo writes two files; give --out PREFIX")
    p = cfg.params
    p.check_nonnull()
    dp = DetectorParams(cfg.eta, cfg.theta)
    q_ax, p_ax = cfg.grid.re_axis, cfg.grid.im_axis
    Q, P = q_ax[:, None], p_ax[None, :]
    wdet = detected_wigner(p, dp, Q, P)
    pr = quadrature_distribution(p, dp, q_ax)
    out = Output(cfg.out)
    if cfg.fmt == "json":
        out.write(_grid_artifact(cfg, wdet, ("q", "p", "w_det")), "_wdet.json")
        out.write(_json_text({"theta": rnd(dp.theta), "q_theta": [rnd(x) for x in q_ax], "pr": [rnd(x) for x in pr]}), "_pr.json")
    else:
        out.write(_grid_artifact(cfg, wdet, ("q", "p", "w_det")), "_wdet.csv")
        out.write(_csv_text(["q_theta", "pr"], zip(map(float, q_ax), map(float, pr))), "_pr.csv")
    out.say(f"min_w_det {fmt(np.min(wdet))}")
    out.say(f"integral_w_det {fmt(_grid_integral(cfg, wdet))}")
    out.say(f"integral_pr {fmt(float(np.sum(trapezoid_weights(q_ax) * pr)))}")
    if cfg.oracle:
        dev = float(np.max(np.abs(detected_wigner_via_channel(p, dp, Q, P) - wdet)))
        out.say(f"oracle_max_dev {fmt(dev)}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    """Closed forms against their oracles at one parameter point; one line per check."""
    p = cfg.params
    p.check_nonnull()
    geom = cfg.grid
    mesh = geom.mesh()
    w = wigner_closed(p, mesh)
    checks = []
    a, b = psdfs_closed_form(p), psdfs_matrix_oracle(p)
    m = min(a.dim, b.dim)
    checks.append(("state_closed_vs_matrix", float(np.max(np.abs(a.amps[:m] - b.amps[:m]))), 1e-10))
    rho = density_matrix(a)
    checks.append(("wigner_closed_vs_parity", float(np.max(np.abs(wigner_parity_oracle(rho, mesh) - w))), 1e-8))
    four = wigner_from_characteristic(p, geom.re_axis, geom.im_axis)
    checks.append(("wigner_closed_vs_fourier", float(np.max(np.abs(four - w))), 1e-8))
    checks.append(("characteristic_at_origin", abs(characteristic_function(p, 0j) - 1.0), 1e-12))
    lp = LossParams(cfg.kappa_t)
    lw = lossy_wigner_closed(p, lp, mesh)
    checks.append(("loss_closed_vs_kraus", float(np.max(np.abs(lossy_wigner_oracle(p, lp, mesh) - lw))), 1e-8))
    dp = DetectorParams(cfg.eta, cfg.theta)
    Q, P = geom.re_axis[:, None], geom.im_axis[None, :]
    dev = float(np.max(np.abs(detected_wigner(p, dp, Q, P) - detected_wigner_via_channel(p, dp, Q, P))))
    checks.append(("detector_direct_vs_channel", dev, 1e-3))
    failed = 0
    for name, val, tol in checks:
        ok = val <= tol
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'} {name} {fmt(val)} (tol {tol:g})")
    return EXIT_OK if not failed else EXIT_RUNTIME


COMMANDS = {
    "state": cmd_state,
    "wigner": cmd_wigner,
    "measures": cmd_measures,
    "evolve": cmd_evolve,
    "tomo": cmd_tomo,
    "verify": cmd_verify,
}


# -- argument parser --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="psdfs", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, fmt_default="csv", lists=False):
        note = " (comma list)" if lists else ""
        sp.add_argument("--n", default="0", help=f"Fock number n{note}")
        sp.add_argument("--k", default="0", help=f"photons subtracted k{note}")
        sp.add_argument("--alpha", default="0", help=f"displacement as a+bi{note}")
        sp.add_argument("--dim", type=int, default=None, help="Fock cutoff (default: automatic)")
        sp.add_argument("--out", default=None, help="output path or prefix; '-' or omitted for stdout")
        sp.add_argument("--format", choices=("csv", "json"), default=fmt_default)

    def grid(sp, default):
        sp.add_argument("--grid", default=default, help="min:max:steps for the real axis (and imaginary axis)")
        sp.add_argument("--grid-im", default=None, help="min:max:steps for the imaginary axis")

    sp = sub.add_parser("state", help="Fock amplitudes of the state")
    common(sp, fmt_default="json")

    sp = sub.add_parser("wigner", help="closed-form Wigner grid")
    common(sp)
    grid(sp, "-3.5:3.5:141")
    sp.add_argument("--oracle", action="store_true", help="compare every node with the displaced-parity oracle")

    sp = sub.add_parser("measures", help="nonclassicality and non-Gaussianity measures")
    common(sp, fmt_default="json", lists=True)
    sp.add_argument("--alpha-range", default=None, help="real alpha sweep min:max:steps (overrides --alpha)")

    sp = sub.add_parser("evolve", help="Wigner grid after photon loss")
    common(sp)
    grid(sp, "-3.5:3.5:141")
    sp.add_argument("--kt", default="0", help="rescaled time kappa*t")
    sp.add_argument("--oracle", action="store_true", help="compare every node with the Kraus-map oracle")

    sp = sub.add_parser("tomo", help="detected Wigner grid and quadrature distribution")
    common(sp)
    grid(sp, "-6:6:121")
    sp.add_argument("--eta", default="1", help="detector efficiency in (0, 1]")
    sp.add_argument("--theta", default="0", help="local-oscillator phase (radians)")
    sp.add_argument("--oracle", action="store_true", help="compare with the equivalent loss channel")

    sp = sub.add_parser("verify", help="closed forms against oracles at one point")
    common(sp)
    grid(sp, "-3:3:21")
    sp.add_argument("--kt", default="0.3")
    sp.add_argument("--eta", default="0.5")
    sp.add_argument("--theta", default="0")
    return ap


_VALUE_FLAGS = ("--grid", "--grid-im", "--alpha", "--alpha-range", "--theta", "--kt", "--eta")


def _glue_values(argv: list[str]) -> list[str]:
    # "--grid -3:3:21" would otherwise read the range as an option
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    ap = build_parser()
    argv = _glue_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = build_config(args)
        return COMMANDS[cfg.command](cfg)
    except (UsageError, NullStateError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, RuntimeError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
