"""Command-line front end: ``gapkit <det|trace|toeplitz|asympt|validate|sweep>``.

Exit status: 0 success, 2 configuration error, 3 a route failed to
converge, 4 a cross-method defect exceeded ``--max-defect``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .asympt import large_gap_log, total_integral_check
from .fredholm import METHODS, ConvergenceError, GapEstimate, gap_log_det
from .kernel import EnsembleParams, KernelError
from .painleve import TOL_RANGE, PainleveError, integrate_trace, log_det_via_hamiltonian
from .specfun import log_bessel_i0
from .toeplitz import N_CAP, ToeplitzError, gap_ratio, log_det_table, write_log_det_csv

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_DEFECT = 0, 2, 3, 4
HEADER = ("alpha", "beta_im", "s", "method", "log_det", "err_est", "error")
MAX_CELLS = 10_000
NODES_RANGE = (4, 512)
_NUMERIC_FAILURES = (ConvergenceError, PainleveError, ToeplitzError, FloatingPointError, ArithmeticError)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    params: EnsembleParams
    s_grid: Tuple[float, ...]
    methods: Tuple[str, ...] = ("fredholm",)
    tol: float = 1e-10
    t0: float = 0.05
    nodes: int = 32
    n: int = 400
    fmt: str = "csv"
    out: Optional[str] = None
    max_defect: Optional[float] = None
    alphas: Tuple[float, ...] = ()
    betas: Tuple[float, ...] = ()
    jobs: int = 1
    t_c: Optional[float] = None

    def __post_init__(self):
        if not self.s_grid:
            raise ConfigError("the s grid is empty")
        if any(not math.isfinite(s) or s < 0 for s in self.s_grid):
            raise ConfigError("s values must be finite and >= 0")
        if not self.methods:
            raise ConfigError("no method selected")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ConfigError(f"unknown method(s) {', '.join(bad)}; choose from {', '.join(METHODS)}")
        if not TOL_RANGE[0] <= self.tol <= TOL_RANGE[1]:
            raise ConfigError(f"--tol must lie in [{TOL_RANGE[0]:g}, {TOL_RANGE[1]:g}], got {self.tol:g}")
        if not 0 < self.t0 <= 0.2:
            raise ConfigError(f"--t0 must lie in (0, 0.2], got {self.t0:g}")
        if not NODES_RANGE[0] <= self.nodes <= NODES_RANGE[1]:
            raise ConfigError(f"--nodes must lie in [{NODES_RANGE[0]}, {NODES_RANGE[1]}], got {self.nodes}")
        if not 2 <= self.n <= N_CAP:
            raise ConfigError(f"--n must lie in [2, {N_CAP}], got {self.n}")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"--format must be csv or json, got {self.fmt!r}")
        if self.max_defect is not None and not self.max_defect > 0:
            raise ConfigError(f"--max-defect must be positive, got {self.max_defect:g}")
        if self.jobs < 1:
            raise ConfigError(f"--jobs must be >= 1, got {self.jobs}")


# --- parsing helpers ----------------------------------------------------------------


def parse_grid(text: str, name: str = "value") -> Tuple[float, ...]:
    """'x', 'x,y,z' or an inclusive range 'lo:hi:step'."""
    text = str(text).strip()
    try:
        if ":" in text:
            parts = [float(v) for v in text.split(":")]
            if len(parts) != 3:
                raise ConfigError(f"{name} range must be lo:hi:step, got {text!r}")
            lo, hi, step = parts
            if not step > 0 or hi < lo:
                raise ConfigError(f"{name} range needs step > 0 and hi >= lo, got {text!r}")
            count = int(math.floor((hi - lo) / step + 1e-9)) + 1
            return tuple(round(lo + k * step, 12) for k in range(count))
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"cannot parse {name} {text!r}") from None


def read_config_file(path: str) -> Dict[str, str]:
    """key=value lines; '#' starts a comment; keys use flag spelling."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{num}: expected key=value, got {line!r}")
        key, value = (x.strip() for x in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


_KEYS = ("alpha", "beta_im", "s", "method", "methods", "nodes", "tol", "t0", "n", "format", "out",
         "max_defect", "jobs", "t_c")


def _setting(args, cfg, key, default=None):
    value = getattr(args, key, None)
    if value is not None:
        return value
    return cfg.get(key, default)


def build_config(args, command: str) -> RunConfig:
    cfg = read_config_file(args.config) if getattr(args, "config", None) else {}
    unknown = sorted(set(cfg) - set(_KEYS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    defaults = {
        "det": "fredholm", "validate": "fredholm,painleve", "toeplitz": "toeplitz",
        "asympt": "fredholm,asymptotic", "sweep": "fredholm", "trace": "painleve",
    }
    meth = _setting(args, cfg, "methods") or _setting(args, cfg, "method") or defaults[command]
    methods = tuple(m.strip() for m in str(meth).split(",") if m.strip())
    alphas = parse_grid(_setting(args, cfg, "alpha", "0"), "alpha")
    betas = parse_grid(_setting(args, cfg, "beta_im", "0"), "beta-im")
    s_text = _setting(args, cfg, "s")
    if s_text is None:
        raise ConfigError("--s is required")
    try:
        if command != "sweep" and (len(alphas) != 1 or len(betas) != 1):
            raise ConfigError(f"'{command}' takes a single --alpha and --beta-im; use 'sweep' for grids")
        params = EnsembleParams(alphas[0], betas[0])
        for a in alphas:
            for b in betas:
                EnsembleParams(a, b)
    except KernelError as exc:
        raise ConfigError(str(exc)) from None
    max_defect = _setting(args, cfg, "max_defect")
    t_c = _setting(args, cfg, "t_c")
    try:
        return RunConfig(
            params=params,
            s_grid=parse_grid(s_text, "s"),
            methods=methods,
            tol=float(_setting(args, cfg, "tol", 1e-10)),
            t0=float(_setting(args, cfg, "t0", 0.05)),
            nodes=int(_setting(args, cfg, "nodes", 32)),
            n=int(_setting(args, cfg, "n", 400)),
            fmt=str(_setting(args, cfg, "format", "csv")),
            out=_setting(args, cfg, "out"),
            max_defect=None if max_defect is None else float(max_defect),
            alphas=alphas,
            betas=betas,
            jobs=int(_setting(args, cfg, "jobs", 1)),
            t_c=None if t_c is None else float(t_c),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid setting: {exc}") from None


# --- evaluation ---------------------------------------------------------------------


def closed_form_available(p: EnsembleParams, s: float) -> bool:
    return s == 0 or p.is_bessel()


def evaluate(p: EnsembleParams, s: float, method: str, cfg: RunConfig) -> GapEstimate:
    """One GapEstimate for (p, s) by the named route."""
    if method == "fredholm":
        return gap_log_det(p, s, n=cfg.nodes)
    if method == "painleve":
        return log_det_via_hamiltonian(p, s, tol=cfg.tol, t0=cfg.t0)
    if method == "toeplitz":
        if not 2.0 * s / cfg.n < math.pi:
            raise ConfigError(f"toeplitz route needs 2s/n < pi; s={s}, n={cfg.n}")
        return gap_ratio(p, cfg.n, s)
    if method == "closed_form":
        if s == 0:
            return GapEstimate(0.0, 0.0, "closed_form", 0.0)
        if not p.is_bessel():
            raise ConfigError("closed_form is available only for alpha=0.5, beta-im=0 or s=0")
        return GapEstimate(s, -0.5 * s * s + float(log_bessel_i0(s)), "closed_form", 0.0)
    if method == "asymptotic":
        if s <= 0:
            raise ConfigError("the asymptotic law needs s > 0")
        return GapEstimate(s, large_gap_log(p, s), "asymptotic", math.inf)
    raise ConfigError(f"unknown method {method!r}")


def _row(p, s, method, est=None, error=""):
    return {
        "alpha": p.alpha, "beta_im": p.b, "s": s, "method": method,
        "log_det": est.log_det if est else math.nan,
        "err_est": est.err_est if est else math.nan,
        "error": error,
    }


def run_cell(args) -> List[dict]:
    """All methods for one (alpha, b, s) cell; failures go to the error column."""
    alpha, b, s, cfg = args
    p = EnsembleParams(alpha, b)
    rows = []
    for m in cfg.methods:
        try:
            rows.append(_row(p, s, m, evaluate(p, s, m, cfg)))
        except _NUMERIC_FAILURES as exc:
            rows.append(_row(p, s, m, error=f"convergence: {exc}"))
        except ValueError as exc:
            rows.append(_row(p, s, m, error=f"config: {exc}"))
    if len(cfg.methods) >= 2:
        _add_defects(rows)
    return rows


def _add_defects(rows):
    """defect = |log_det - reference|, the reference being the first method."""
    ref = rows[0]["log_det"]
    others = []
    for r in rows[1:]:
        d = abs(r["log_det"] - ref)
        r["defect"] = d
        if math.isfinite(d):
            others.append(d)
    rows[0]["defect"] = max(others) if others else math.nan


def check_closed_form(cfg: RunConfig):
    """Closed form requested outside its domain is a configuration error."""
    if "closed_form" not in cfg.methods:
        return
    for a in cfg.alphas or (cfg.params.alpha,):
        for b in cfg.betas or (cfg.params.b,):
            p = EnsembleParams(a, b)
            for s in cfg.s_grid:
                if not closed_form_available(p, s):
                    raise ConfigError("closed_form is available only for alpha=0.5, beta-im=0 or s=0")


# --- output -------------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, float):
        v = float(v)  # numpy scalars repr with a type prefix
        return repr(v) if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))
    return str(v)


def _json_value(v):
    if isinstance(v, float):
        return float(v) if math.isfinite(v) else None
    return v


def render(rows: Sequence[dict], fmt: str, columns: Optional[Sequence[str]] = None) -> str:
    if columns is None:
        columns = list(HEADER)
        if any("defect" in r for r in rows):
            columns.append("defect")
    if fmt == "json":
        data = [{c: _json_value(r.get(c, math.nan)) for c in columns} for r in rows]
        return json.dumps(data, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c, "")) for c in columns])
    return buf.getvalue()


def emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _status(rows, cfg) -> int:
    if any(r["error"].startswith("config") for r in rows):
        return EXIT_CONFIG
    if any(r["error"] for r in rows):
        return EXIT_CONVERGENCE
    if cfg.max_defect is not None:
        if any(r.get("defect", 0.0) > cfg.max_defect for r in rows):
            return EXIT_DEFECT
    return EXIT_OK


# --- commands -----------------------------------------------------------------------


def cmd_det(cfg: RunConfig) -> int:
    check_closed_form(cfg)
    rows = []
    for s in cfg.s_grid:
        rows += run_cell((cfg.params.alpha, cfg.params.b, s, cfg))
    emit(render(rows, cfg.fmt), cfg.out)
    return _status(rows, cfg)


def cmd_validate(cfg: RunConfig) -> int:
    if len(cfg.methods) < 2:
        raise ConfigError("validate needs at least two methods")
    if cfg.max_defect is None:
        cfg = replace(cfg, max_defect=1e-5)
    return cmd_det(cfg)


def cmd_asympt(cfg: RunConfig) -> int:
    if cfg.t_c is not None:
        if not cfg.t_c > 0:
            raise ConfigError("--t-c must be positive")
        chk = total_integral_check(cfg.params, cfg.t_c)
        row = {"alpha": cfg.params.alpha, "beta_im": cfg.params.b, "t_c": cfg.t_c, "lhs": chk.lhs,
               "rhs": chk.rhs, "defect": chk.defect, "remainder": chk.remainder,
               "remainder_spread": chk.remainder_spread}
        emit(render([row], cfg.fmt, list(row)), cfg.out)
        if cfg.max_defect is not None and not chk.defect <= cfg.max_defect:
            return EXIT_DEFECT
        return EXIT_OK
    if any(s <= 0 for s in cfg.s_grid):
        raise ConfigError("asympt needs s > 0")
    return cmd_det(cfg)


def cmd_toeplitz(cfg: RunConfig, table: bool) -> int:
    if not table:
        return cmd_det(cfg)
    ts = sorted({0.0} | {2.0 * s / cfg.n for s in cfg.s_grid})
    if ts[-1] >= math.pi:
        raise ConfigError("need 2s/n < pi for every s")
    try:
        rows = log_det_table(cfg.params, [cfg.n], ts)
    except _NUMERIC_FAILURES as exc:
        sys.stderr.write(f"gapkit: {exc}\n")
        return EXIT_CONVERGENCE
    if cfg.fmt == "json":
        text = render([{"n": n, "t": t, "log_det": ld} for n, t, ld in rows], "json", ["n", "t", "log_det"])
    else:
        buf = io.StringIO()
        write_log_det_csv(buf, rows)
        text = buf.getvalue()
    emit(text, cfg.out)
    return EXIT_OK


def cmd_trace(cfg: RunConfig) -> int:
    t_max = 4.0 * max(cfg.s_grid)
    if not cfg.t0 < t_max <= 64:
        raise ConfigError(f"trace needs t0 < 4 s <= 64, got 4 s = {t_max:g}")
    try:
        trace = integrate_trace(cfg.params, cfg.t0, t_max, cfg.tol)
    except _NUMERIC_FAILURES as exc:
        sys.stderr.write(f"gapkit: {exc}\n")
        return EXIT_CONVERGENCE
    text = trace.to_csv()
    if cfg.fmt == "json":
        rdr = csv.reader(io.StringIO(text))
        cols = next(rdr)
        text = json.dumps([dict(zip(cols, (float(v) for v in r))) for r in rdr], indent=1) + "\n"
    emit(text, cfg.out)
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    cells = [(a, b, s, cfg) for a in sorted(cfg.alphas) for b in sorted(cfg.betas) for s in sorted(cfg.s_grid)]
    if len(cells) > MAX_CELLS:
        raise ConfigError(f"grid has {len(cells)} cells; the limit is {MAX_CELLS}")
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(run_cell, cells))
    else:
        results = [run_cell(c) for c in cells]
    rows = [r for cell in results for r in cell]
    emit(render(rows, cfg.fmt), cfg.out)
    # per-cell failures are recorded, not fatal
    if cfg.max_defect is not None and any(r.get("defect", 0.0) > cfg.max_defect for r in rows):
        return EXIT_DEFECT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gapkit", description="Gap probabilities of the confluent "
                                     "hypergeometric kernel by several independent routes.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", help="root exponent (> -1/2); sweep accepts a list or lo:hi:step")
    common.add_argument("--beta-im", dest="beta_im", help="imaginary part b of beta = i b")
    common.add_argument("--s", help="gap half-width: value, comma list or lo:hi:step")
    common.add_argument("--method", help="single method (or comma list)")
    common.add_argument("--methods", help="comma-separated methods: " + ",".join(METHODS))
    common.add_argument("--nodes", type=int, help="Nystrom nodes per half-interval (default 32)")
    common.add_argument("--tol", type=float, help="ODE tolerance (default 1e-10)")
    common.add_argument("--t0", type=float, help="Painleve start point on the ray (default 0.05)")
    common.add_argument("--n", type=int, help="Toeplitz matrix size (default 400)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--max-defect", dest="max_defect", type=float,
                        help="fail with exit 4 when a cross-method defect exceeds this")
    common.add_argument("--config", help="key=value file; flags take precedence")
    for name, text in [("det", "log det(I - K_s) by the selected routes"),
                       ("validate", "cross-validate two or more routes"),
                       ("trace", "Painleve trajectory on the ray up to t = 4 max(s)"),
                       ("toeplitz", "finite-n Toeplitz gap ratios or ln D_n tables"),
                       ("asympt", "large-gap law against Fredholm, or the total-integral identity"),
                       ("sweep", "grid over alpha, beta-im and s")]:
        sp = sub.add_parser(name, parents=[common], help=text)
        if name == "toeplitz":
            sp.add_argument("--table", action="store_true", help="emit n,t,log_det rows instead")
        if name == "asympt":
            sp.add_argument("--t-c", dest="t_c", type=float, help="run the total-integral check at t_c")
        if name == "sweep":
            sp.add_argument("--jobs", type=int, help="worker processes (default 1)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args, args.command)
        if args.command == "det":
            return cmd_det(cfg)
        if args.command == "validate":
            return cmd_validate(cfg)
        if args.command == "asympt":
            return cmd_asympt(cfg)
        if args.command == "toeplitz":
            return cmd_toeplitz(cfg, args.table)
        if args.command == "trace":
            return cmd_trace(cfg)
        return cmd_sweep(cfg)
    except ConfigError as exc:
        sys.stderr.write(f"gapkit: error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
