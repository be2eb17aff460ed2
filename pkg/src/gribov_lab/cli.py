"""Command-line front end: ``gribov-lab <command> [options]``.

Commands write CSV (default for tables) or JSON.  Values come from flags,
then from a ``key = value`` configuration file (``--config`` or the
``GRIBOV_LAB_CONFIG`` environment variable), then from built-in defaults.
Exit status is 0 on success, 2 for invalid parameters and 3 for numerical
failures; errors are also written to stderr as a JSON object.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bounds as bd
from .bargmann import DimPolicy, GribovParams, TruncationSpec, build_full_operator, eigenvalue_G
from .errors import InvalidParameter, NumericalFailure
from .linalg import eigenvalues, perturbation_determinant
from .sturm import POTENTIALS, SturmProblem, gelfand_levitan_residual
from .trace_formula import (
    contour_for,
    correction_terms,
    regularized_residual,
    second_order_boundary_pair,
)

SCHEMA_VERSION = 1
COMMANDS = ("spectrum", "trace", "corrections", "bounds", "determinant", "sturm")
CONFIG_ENV = "GRIBOV_LAB_CONFIG"

DEFAULTS = {
    "lambda2": 1.0,
    "mu": 1.0,
    "lambda": 0.1,
    "m": "5..40",
    "dim_factor": 4,
    "dim_floor": 60,
    "nodes": 1024,
    "j_max": 4,
    "format": None,
    "output": "-",
    "seed": 12345,
    "potential": "cos2x",
    "grids": "2048,4096",
    "n_max": 40,
}

COLUMN_DOCS = {
    "spectrum": {
        "k": "1-based index of the eigenvalue in (real, imaginary) order",
        "sigma_re": "real part of the eigenvalue of the truncated H",
        "sigma_im": "imaginary part of the eigenvalue",
        "offset_re": "real part of sigma_k - lambda'' lambda_k",
        "offset_im": "imaginary part of sigma_k - lambda'' lambda_k",
        "residual": "relative eigenpair residual ||H v - sigma v|| / ||H||_inf",
        "N": "truncation dimension",
    },
    "trace": {
        "m": "contour index; radius lambda''(lambda_m + lambda_{m+1})/2",
        "partial_sum_re": "real part of sum_{k<=m} (sigma_k - lambda'' lambda_k)",
        "partial_sum_im": "imaginary part of the partial sum",
        "corr_j_re": "real part of the order-j contour correction (one pair per j)",
        "corr_j_im": "imaginary part of the order-j correction",
        "residual_re": "real part of partial sum plus all corrections",
        "residual_im": "imaginary part of the residual",
        "quad_err": "largest node-doubling estimate |v(M) - v(M/2)| over the orders",
        "N": "truncation dimension",
    },
    "corrections": {
        "m": "contour index",
        "j": "correction order",
        "value_re": "real part of the contour correction",
        "value_im": "imaginary part of the contour correction",
        "quad_err": "node-doubling estimate |v(M) - v(M/2)|",
        "closed_form": "exact value for j = 1 (-mu m(m+1)/2) and j = 2 (boundary pair); NaN otherwise",
        "N": "truncation dimension",
    },
    "bounds": {
        "name": "identifier of the checked estimate",
        "max_ratio": "worst observed ratio or supremum of the swept quantity",
        "constant": "estimated constant of the estimate (NaN if not applicable)",
        "fitted_slope": "log-log slope for asymptotic fits (NaN if not applicable)",
        "passed": "1 if the check passed, else 0",
        "sample_count": "number of sampled inputs",
    },
    "determinant": {
        "m": "contour index; sigma is the contour point r_m e^{i pi/4}",
        "sigma_re": "real part of the evaluation point",
        "sigma_im": "imaginary part of the evaluation point",
        "det_re": "real part of det(I + H_{mu,lambda}(lambda'' G - sigma)^{-1}) by continuant recurrence",
        "det_im": "imaginary part of the determinant",
        "eig_ratio_re": "real part of prod (sigma_k - sigma)/(lambda'' lambda_k - sigma)",
        "eig_ratio_im": "imaginary part of the eigenvalue ratio product",
        "rel_diff": "relative difference between the two determinant values",
        "N": "truncation dimension",
    },
    "sturm": {
        "n": "upper summation index N'",
        "partial_sum": "Richardson-extrapolated sum_{n<=N'} (sigma_n - n^2)",
        "target": "(q(0) + q(pi))/4",
    },
}


@dataclass
class RunConfig:
    command: str
    params: GribovParams = field(default_factory=GribovParams)
    m_range: tuple = tuple(range(5, 41))
    dim_policy: DimPolicy = field(default_factory=DimPolicy)
    quad_nodes: int = 1024
    j_max: int = 4
    output_format: str = "csv"
    output_path: str = "-"
    seed: int = 12345
    potential: str = "cos2x"
    grids: tuple = (2048, 4096)
    n_max: int = 40

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidParameter(f"unknown command {self.command!r}")
        if self.output_format not in ("csv", "json"):
            raise InvalidParameter(f"output format must be csv or json, got {self.output_format!r}")
        if not self.m_range:
            raise InvalidParameter("empty m range")
        if not 1 <= self.j_max <= 6:
            raise InvalidParameter(f"j_max must be in 1..6, got {self.j_max}")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["params"] = self.params.as_dict()
        d["m_range"] = list(self.m_range)
        d["grids"] = list(self.grids)
        return d


# ---------------------------------------------------------------------------
# parsing


def parse_m_range(text) -> tuple:
    """``"5..40"`` (inclusive), ``"5,10,20"`` or ``"7"`` to a sorted tuple of ints."""
    text = str(text).strip()
    values = set()
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = (int(x) for x in part.split(".."))
                if hi < lo:
                    raise InvalidParameter(f"empty range {part!r}")
                values.update(range(lo, hi + 1))
            elif part:
                values.add(int(part))
    except ValueError as exc:
        raise InvalidParameter(f"cannot parse m range {text!r}") from exc
    if not values:
        raise InvalidParameter(f"empty m range {text!r}")
    return tuple(sorted(values))


def _parse_int_list(text) -> tuple:
    try:
        return tuple(int(x) for x in str(text).split(",") if x.strip())
    except ValueError as exc:
        raise InvalidParameter(f"cannot parse integer list {text!r}") from exc


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment; keys use underscores or dashes."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InvalidParameter(f"cannot read config file {path!r}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameter(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise InvalidParameter(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidParameter(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gribov-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--describe", action="store_true", help="print the column documentation and exit")
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"{name} report")
        p.add_argument("--config", help="configuration file (key = value)")
        p.add_argument("--lambda2", type=float, help="magic coupling lambda''")
        p.add_argument("--mu", type=float, help="intercept mu")
        p.add_argument("--lambda", dest="lambda", type=float, help="triple coupling lambda")
        p.add_argument("--m", help="contour indices, e.g. 5..40 or 5,10,20,40")
        p.add_argument("--dim-factor", type=int, help="N(m) = max(factor*m, m+floor): factor")
        p.add_argument("--dim-floor", type=int, help="N(m) = max(factor*m, m+floor): floor")
        p.add_argument("--nodes", type=int, help="quadrature nodes per contour (power of two)")
        p.add_argument("--j-max", type=int, help="highest correction order")
        p.add_argument("--format", choices=("csv", "json"), help="output format")
        p.add_argument("--output", help="output file, '-' for stdout")
        p.add_argument("--seed", type=int, help="seed for randomised checks")
        p.add_argument("--potential", choices=sorted(POTENTIALS), help="Sturm-Liouville potential")
        p.add_argument("--grids", help="comma-separated grid sizes for extrapolation")
        p.add_argument("--n-max", type=int, help="number of Sturm-Liouville modes summed")
        p.add_argument("--describe", action="store_true", help="print column documentation and exit")
    d = sub.add_parser("describe", help="print the column documentation of every command")
    d.add_argument("which", nargs="?", choices=COMMANDS)
    return parser


def resolve_config(ns: argparse.Namespace, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    merged = dict(DEFAULTS)
    path = getattr(ns, "config", None) or environ.get(CONFIG_ENV)
    if path:
        merged.update(read_config_file(path))
    for key in DEFAULTS:
        value = getattr(ns, key, None)
        if value is not None:
            merged[key] = value
    command = ns.command
    fmt = merged["format"] or ("json" if command in ("sturm", "bounds") else "csv")
    try:
        params = GribovParams(float(merged["lambda2"]), float(merged["mu"]), float(merged["lambda"]))
        return RunConfig(
            command=command,
            params=params,
            m_range=parse_m_range(merged["m"]),
            dim_policy=DimPolicy(int(merged["dim_factor"]), int(merged["dim_floor"])),
            quad_nodes=int(merged["nodes"]),
            j_max=int(merged["j_max"]),
            output_format=fmt,
            output_path=str(merged["output"]),
            seed=int(merged["seed"]),
            potential=str(merged["potential"]),
            grids=_parse_int_list(merged["grids"]),
            n_max=int(merged["n_max"]),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidParameter):
            raise
        raise InvalidParameter(str(exc)) from exc


# ---------------------------------------------------------------------------
# commands


def _cplx(prefix, z):
    return {f"{prefix}_re": float(np.real(z)), f"{prefix}_im": float(np.imag(z))}


def _cmd_spectrum(cfg: RunConfig):
    dim = cfg.dim_policy.dim_for(max(cfg.m_range))
    spec = TruncationSpec(dim)
    spectrum = eigenvalues(build_full_operator(cfg.params, spec))
    rows = []
    for k, (s, r) in enumerate(zip(spectrum.values, spectrum.residuals), start=1):
        row = {"k": k, **_cplx("sigma", s)}
        row.update(_cplx("offset", s - cfg.params.lambda_pp * eigenvalue_G(k)))
        row.update(residual=float(r), N=dim)
        rows.append(row)
    return rows, {"max_residual": float(spectrum.residuals.max())}


def _cmd_trace(cfg: RunConfig):
    rows = []
    for m in cfg.m_range:
        trunc = cfg.dim_policy.spec_for(m)
        spec = contour_for(cfg.params, m, cfg.quad_nodes)
        rep = regularized_residual(cfg.params, m, cfg.j_max, trunc=trunc, spec=spec)
        row = {"m": m, **_cplx("partial_sum", rep.partial_sum)}
        for c in rep.corrections:
            row.update(_cplx(f"corr_{c.order_j}", c.value))
        row.update(_cplx("residual", rep.residual))
        row.update(quad_err=rep.quad_error, N=rep.truncation_dim)
        rows.append(row)
    return rows, {}


def _cmd_corrections(cfg: RunConfig):
    rows = []
    for m in cfg.m_range:
        trunc = cfg.dim_policy.spec_for(m)
        spec = contour_for(cfg.params, m, cfg.quad_nodes)
        for c in correction_terms(cfg.params, m, cfg.j_max, spec=spec, trunc=trunc):
            if c.order_j == 1:
                exact = -cfg.params.mu * m * (m + 1) / 2.0
            elif c.order_j == 2:
                exact = second_order_boundary_pair(cfg.params, m)
            else:
                exact = math.nan
            rows.append({"m": m, "j": c.order_j, **_cplx("value", c.value),
                         "quad_err": c.quad_error_estimate, "closed_form": exact, "N": trunc.dim})
    return rows, {}


def _cmd_determinant(cfg: RunConfig):
    rows = []
    for m in cfg.m_range:
        trunc = cfg.dim_policy.spec_for(m)
        spec = contour_for(cfg.params, m, cfg.quad_nodes)
        sigma = spec.radius * complex(math.cos(math.pi / 4), math.sin(math.pi / 4))
        det = perturbation_determinant(cfg.params, sigma, trunc)
        vals = eigenvalues(build_full_operator(cfg.params, trunc)).values
        poles = cfg.params.lambda_pp * np.array([eigenvalue_G(n) for n in trunc.indices], dtype=float)
        ratio = complex(np.prod((np.sort_complex(vals) - sigma) / (np.sort(poles) - sigma)))
        rel = abs(det - ratio) / max(abs(ratio), 1e-300)
        rows.append({"m": m, **_cplx("sigma", sigma), **_cplx("det", det),
                     **_cplx("eig_ratio", ratio), "rel_diff": rel, "N": trunc.dim})
    return rows, {}


def _cmd_bounds(cfg: RunConfig):
    seed = cfg.seed
    reports = [
        bd.check_interpolation_inequality(100_000, seed=seed),
        bd.gap_bound_scan(10_000),
        bd.separation_scan(500, 0.1),
        bd.resolvent_sum_sweep(range(3, 201)),
        bd.trace_norm_sweep(range(3, 301)),
        bd.subordination_constant(cfg.params, seed=seed),
        bd.relative_bound_check(cfg.params, seed=seed),
        bd.nuclear_decay_fit(cfg.params),
        bd.carleman_diagnostic(0.4),
        bd.cubic_growth_constants(),
    ]
    rows = []
    for r in reports:
        rows.append({
            "name": r.name,
            "max_ratio": r.max_ratio,
            "constant": math.nan if r.constant is None else r.constant,
            "fitted_slope": math.nan if r.fitted_slope is None else r.fitted_slope,
            "passed": int(bool(r.passed)),
            "sample_count": r.sample_count,
        })
    return rows, {"reports": [r.as_dict() for r in reports]}


def _cmd_sturm(cfg: RunConfig):
    rep = gelfand_levitan_residual(SturmProblem(cfg.potential, min(cfg.grids), cfg.n_max), cfg.grids)
    rows = [{"n": n, "partial_sum": v, "target": rep.target} for n, v in rep.partial_sums]
    return rows, {"report": rep.as_dict()}


HANDLERS = {
    "spectrum": _cmd_spectrum,
    "trace": _cmd_trace,
    "corrections": _cmd_corrections,
    "bounds": _cmd_bounds,
    "determinant": _cmd_determinant,
    "sturm": _cmd_sturm,
}


# ---------------------------------------------------------------------------
# serialisation


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _jsonable(obj.real), "im": _jsonable(obj.imag)}
    return obj if obj is None or isinstance(obj, str) else str(obj)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.16e" % value
    return str(value)


def render(cfg: RunConfig, rows: list, diagnostics: dict) -> str:
    if cfg.output_format == "json":
        doc = {"schema_version": SCHEMA_VERSION, "config": cfg.as_dict(), "rows": rows,
               "diagnostics": diagnostics}
        return json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# schema_version={SCHEMA_VERSION}\n")
    buf.write("# config=" + json.dumps(_jsonable(cfg.as_dict()), sort_keys=True) + "\n")
    if rows:
        header = list(rows[0])
        for row in rows[1:]:
            header += [k for k in row if k not in header]
        buf.write(",".join(header) + "\n")
        for row in rows:
            buf.write(",".join(_fmt(row.get(k, "")) for k in header) + "\n")
    return buf.getvalue()


def describe(which=None) -> str:
    lines = [f"schema_version {SCHEMA_VERSION}"]
    for name in ([which] if which else COMMANDS):
        lines.append("")
        lines.append(f"[{name}]")
        for col, text in COLUMN_DOCS[name].items():
            lines.append(f"  {col}: {text}")
    return "\n".join(lines) + "\n"


def run(config: RunConfig, stdout=None) -> int:
    """Execute one command and write its report; returns the process exit code."""
    stdout = sys.stdout if stdout is None else stdout
    try:
        rows, diagnostics = HANDLERS[config.command](config)
        text = render(config, rows, diagnostics)
        if config.output_path in ("-", ""):
            stdout.write(text)
        else:
            with open(config.output_path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    except NumericalFailure as exc:
        _report_error(exc, 3)
        return 3
    except (InvalidParameter, ValueError) as exc:
        _report_error(exc, 2)
        return 2
    return 0


def _report_error(exc: Exception, code: int):
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.command == "describe":
            sys.stdout.write(describe(ns.which))
            return 0
        if ns.describe:
            sys.stdout.write(describe(ns.command))
            return 0
        if ns.command is None:
            raise InvalidParameter("a command is required: " + ", ".join(COMMANDS + ("describe",)))
        config = resolve_config(ns)
    except InvalidParameter as exc:
        _report_error(exc, 2)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
