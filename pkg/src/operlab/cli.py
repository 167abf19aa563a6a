"""The ``operlab`` command line.

Every subcommand writes JSON (or CSV/markdown where noted) to stdout and
maps library failures to the exit-code contract::

    0  certified / pass
    2  inconclusive
    3  golden-table mismatch
    4  input error
    5  numerical failure
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from contextlib import nullcontext
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .errors import InputError, OperlabError

EXIT_OK = 0
EXIT_INCONCLUSIVE = 2
EXIT_MISMATCH = 3
EXIT_INPUT = 4
EXIT_NUMERIC = 5


@dataclass
class RunConfig:
    """Validated options for one invocation."""

    command: str
    lie_type: Optional[str] = None
    alpha_files: List[str] = field(default_factory=list)
    grid: int = 16
    radius: float = 0.5
    tol: float = 1e-9
    output: str = "json"
    seed: int = 0
    options: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.grid < 1:
            raise InputError("--grid must be positive")
        if not 0 < self.radius < 1:
            raise InputError("--radius must lie in (0, 1)")
        if not self.tol > 0:
            raise InputError("--tol must be positive")
        if self.output not in ("json", "csv", "markdown"):
            raise InputError(f"unknown output format {self.output!r}")
        if self.lie_type is not None:
            from .liealg import LieType
            LieType.parse(self.lie_type)


# -- helpers -------------------------------------------------------------------


def parse_complex(text: str) -> complex:
    """Accept ``0.1+0.2i`` as well as Python's ``0.1+0.2j``."""
    s = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError as exc:
        raise InputError(f"not a complex number: {text!r}") from exc


def _plain(obj: Any) -> Any:
    """numpy scalars and Fractions into JSON-native values."""
    from fractions import Fraction

    import numpy as np

    if isinstance(obj, Fraction):
        from .exact import fraction_str
        return fraction_str(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _dump(obj: Any) -> str:
    # json writes floats with repr, the shortest round-trip decimal
    return json.dumps(obj, indent=2, default=_plain)


def load_differentials(path: str, oa, cyclic: bool) -> list:
    """Read differentials for ``oa`` from JSON.

    Accepted layouts: a single differential object (the top differential with
    ``cyclic``, or the only one for rank-one algebras), a list with one entry
    per exponent (``null`` for zero), or ``{"differentials": [...]}``.
    """
    from .hyperbolic import DiskDifferential

    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    l = len(oa.p.exponents)
    if isinstance(data, dict) and "differentials" in data:
        data = data["differentials"]
    if isinstance(data, dict):
        d = DiskDifferential.from_dict(data)
        if l == 1 or cyclic:
            return [None] * (l - 1) + [d]
        raise InputError(f"{oa.type.name} needs {l} differentials; pass a list or use --cyclic")
    if not isinstance(data, list):
        raise InputError(f"{path}: expected an object or a list")
    diffs = [None if d is None else DiskDifferential.from_dict(d) for d in data]
    if len(diffs) != l:
        raise InputError(f"{oa.type.name} needs {l} differentials, got {len(diffs)}")
    if cyclic and any(d is not None and not d.is_zero for d in diffs[:-1]):
        raise InputError("--cyclic given but a lower differential is nonzero")
    return diffs


def _cyclic_constant(oa, norm: float):
    """The constant top differential whose norm at z = 0 is ``norm``."""
    from .hyperbolic import DiskDifferential, density

    m = oa.p.exponents[-1]
    return DiskDifferential.constant(m + 1, norm * float(density(0j)) ** ((m + 1) / 2))


def _thread_limit():
    raw = os.environ.get("OPERLAB_THREADS")
    if raw is None or raw == "":
        return nullcontext()
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"OPERLAB_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InputError(f"OPERLAB_THREADS must be a positive integer, got {raw!r}")
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        return nullcontext()
    return threadpool_limits(limits=n)


# -- commands ------------------------------------------------------------------


def cmd_constants(cfg: RunConfig, out) -> int:
    from .constants import TableCheck, constants_report, markdown_table, rows_for_type
    from .exact import fraction_str
    from .liealg import LieType, all_types

    opts = cfg.options
    if opts.get("all"):
        types = all_types(8)
    elif cfg.lie_type:
        types = [LieType.parse(cfg.lie_type)]
    else:
        raise InputError("constants needs --type or --all")
    reports = [constants_report(t) for t in types]
    checks = []
    for rep in reports:
        for row in rows_for_type(rep.type):
            o = rep.orbit(row.orbit)
            n = rep.type.rank
            checks.append(TableCheck(row.name, rep.type.name, (row.norm_sq(n), row.sin_phi_sq(n)),
                                     (o.norm_sq, o.sin_phi_sq)))
    rows = [{"row": c.row, "type": c.type, "ok": c.ok,
             "reference": [fraction_str(x) for x in c.expected],
             "computed": [fraction_str(x) for x in c.computed]} for c in checks]
    code = EXIT_OK
    if opts.get("verify"):
        bad = [v for v in rows if not v["ok"]]
        for v in bad:
            print(f"mismatch: {v['row']} at {v['type']}: table {v['reference']}, computed {v['computed']}",
                  file=sys.stderr)
        if bad:
            code = EXIT_MISMATCH
    if cfg.output == "markdown":
        out.write(markdown_table(reports) + "\n")
    else:
        payload = {"reports": [r.to_dict() for r in reports], "table_rows": rows}
        out.write(_dump(payload) + "\n")
    return code


def cmd_certify(cfg: RunConfig, out) -> int:
    from .criteria import certify_grid
    from .develop import disk_grid
    from .principal import oper_algebra

    opts = cfg.options
    if not cfg.lie_type:
        raise InputError("certify needs --type")
    oa = oper_algebra(cfg.lie_type)
    l = len(oa.p.exponents)
    cyclic = bool(opts.get("cyclic"))
    if cfg.alpha_files:
        diffs = load_differentials(cfg.alpha_files[0], oa, cyclic)
    elif opts.get("norm") is not None:
        if not cyclic and l > 1:
            raise InputError("--norm describes a cyclic differential; add --cyclic")
        diffs = [None] * (l - 1) + [_cyclic_constant(oa, float(opts["norm"]))]
    else:
        diffs = [None] * l
    general = bool(opts.get("general")) or (not cyclic) or l == 1
    if general:
        crit, kw = "general", {"simplified": bool(opts.get("simplified")),
                               "wall_angle": opts.get("wall_angle", "stated")}
    else:
        crit, kw = "cyclic", {"c_value": opts.get("c_value", "stated"),
                              "wall_angle": opts.get("wall_angle", "stated")}
    grid = disk_grid(cfg.grid, cfg.radius)
    report = certify_grid(oa, diffs, grid, criterion=crit, levels=int(opts.get("levels", 16)), **kw)
    payload = {"type": oa.type.name, "criterion": crit,
               "reports": [{"z": [z.real, z.imag], **r.to_dict()}
                           for z, r in zip(report.points, report.reports)],
               "aggregate": report.summary()}
    out.write(_dump(payload) + "\n")
    return EXIT_OK if report.certified else EXIT_INCONCLUSIVE


def _develop_rows(lie_type: str, diffs: list, grid: List[complex], tol: float):
    import numpy as np

    from .develop import (ConnectionField, Representation, developed_involution, ep_point,
                          ep_surface_pgl2, frame_at, involution_defect, planarity_residual)
    from .liealg import LieType
    from .principal import oper_algebra

    t = LieType.parse(lie_type)
    if t.family != "A" or t.rank > 2:
        raise InputError("develop supports A1 and A2")
    if t.rank == 1:
        samples = ep_surface_pgl2(diffs[0], grid, tol=tol)
        rows = [s.to_row() for s in samples]
        summary = {"planarity_residual": planarity_residual(samples) if len(samples) >= 4 else None,
                   "max_involution_defect": max(r["involution_defect"] for r in rows)}
        return rows, summary
    oa = oper_algebra(t)
    rep = Representation.defining(3)
    adj = Representation.adjoint(oa)
    cf, cfa = ConnectionField(rep, tuple(diffs)), ConnectionField(adj, tuple(diffs))
    rows = []
    for z in grid:
        g = frame_at(cf, z, tol=tol, rtol=tol)
        p = ep_point(rep, g, z)
        p = p / abs(np.linalg.det(p)) ** (1 / 3)
        m = developed_involution(oa, frame_at(cfa, z, tol=tol, rtol=tol), z)
        row = {"z_re": z.real, "z_im": z.imag}
        for i in range(3):
            for j in range(i, 3):
                row[f"p{i}{j}_re"] = float(p[i, j].real)
                if i != j:
                    row[f"p{i}{j}_im"] = float(p[i, j].imag)
        row["min_eigenvalue"] = float(np.linalg.eigvalsh((p + p.conj().T) / 2).min())
        row["involution_defect"] = involution_defect(m)
        rows.append(row)
    summary = {"max_involution_defect": max(r["involution_defect"] for r in rows),
               "min_eigenvalue": min(r["min_eigenvalue"] for r in rows)}
    return rows, summary


def cmd_develop(cfg: RunConfig, out) -> int:
    from .develop import disk_grid
    from .principal import oper_algebra

    opts = cfg.options
    lie_type = cfg.lie_type or "A1"
    oa = oper_algebra(lie_type)
    l = len(oa.p.exponents)
    alpha = opts.get("alpha", "zero")
    if cfg.alpha_files:
        diffs = load_differentials(cfg.alpha_files[0], oa, cyclic=True)
    elif alpha in (None, "zero"):
        diffs = [None] * l
    else:
        diffs = [None] * (l - 1) + [_cyclic_constant(oa, abs(parse_complex(alpha)))]
        c = parse_complex(alpha)
        if c != abs(c):
            from .hyperbolic import DiskDifferential
            diffs[-1] = DiskDifferential.constant(diffs[-1].degree, diffs[-1].coeffs[0] * c / abs(c))
    grid = disk_grid(cfg.grid, cfg.radius)
    rows, summary = _develop_rows(lie_type, diffs, grid, cfg.tol)
    summary = {"type": oa.type.name, "points": len(rows), **summary}
    dest = opts.get("out")
    if dest or cfg.output == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
        if dest:
            Path(dest).write_text(buf.getvalue())
            summary["out"] = str(dest)
        else:
            out.write(buf.getvalue())
            return EXIT_OK
    out.write(_dump(summary) + "\n")
    return EXIT_OK


def cmd_transversality(cfg: RunConfig, out) -> int:
    from .develop import ConnectionField, Representation, transversality_orders
    from .hyperbolic import DiskDifferential

    opts = cfg.options
    n = int(opts.get("n", 3))
    if n < 2:
        raise InputError("--n must be at least 2")
    rep = Representation.defining(n)
    c = parse_complex(opts.get("alpha", "0"))
    cf = ConnectionField.cyclic(rep, DiskDifferential.constant(n, c)) if c != 0 else ConnectionField.zero(rep)
    z0 = parse_complex(opts.get("basepoint", "0.1+0.2i"))
    rep_ = transversality_orders(cf, z0, direction=parse_complex(opts.get("direction", "1")),
                                 levels=int(opts.get("levels", 6)))
    out.write(_dump({"n": n, "alpha": [c.real, c.imag], **rep_.to_dict()}) + "\n")
    return EXIT_OK


def cmd_epcheck(cfg: RunConfig, out) -> int:
    from .epgeom import (OperPoint, induced_metric, regularity_status, rlc_term,
                         second_form_cyclic_sq, second_form_general_bound_sq)

    opts = cfg.options
    if not cfg.lie_type:
        raise InputError("epcheck needs --type")
    z = parse_complex(opts.get("z", "0"))
    if opts.get("cyclic"):
        op = OperPoint.cyclic(cfg.lie_type, float(opts.get("norm", 0.0)),
                              float(opts.get("grad_norm", 0.0)), z)
    else:
        norms = [float(x) for x in str(opts.get("norms", "")).split(",") if x.strip()]
        grads = [float(x) for x in str(opts.get("grad_norms", "")).split(",") if x.strip()] or None
        op = OperPoint.from_norms(cfg.lie_type, norms, grads, z)
    payload: Dict[str, Any] = {"point": op.to_dict(), "metric": induced_metric(op).to_dict(),
                               "regularity": regularity_status(op).value,
                               "rlc_term": rlc_term(op),
                               "second_form_general_bound_sq": second_form_general_bound_sq(op)}
    if opts.get("cyclic"):
        cv = opts.get("c_value", "stated")
        payload["c_value"] = cv
        payload["second_form_sq"] = second_form_cyclic_sq(op, c_value=cv)
    out.write(_dump(payload) + "\n")
    return EXIT_OK


COMMANDS = {"constants": cmd_constants, "certify": cmd_certify, "develop": cmd_develop,
            "transversality": cmd_transversality, "epcheck": cmd_epcheck}


# -- argument parsing ----------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags, which would read as 'inconclusive'."""

    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="operlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"operlab {__version__}")
    p.add_argument("--config", help="JSON file whose keys supply defaults for the subcommand flags")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, grid=True):
        sp.add_argument("--type", dest="lie_type")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=1e-9)
        if grid:
            sp.add_argument("--grid", type=int, default=16, help="n for the n x n disk grid")
            sp.add_argument("--radius", type=float, default=0.5)

    sp = sub.add_parser("constants", help="Lie-theoretic constants and the reference table")
    common(sp, grid=False)
    sp.add_argument("--all", action="store_true")
    sp.add_argument("--verify", action="store_true")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--json", dest="output", action="store_const", const="json")
    g.add_argument("--markdown", dest="output", action="store_const", const="markdown")

    sp = sub.add_parser("certify", help="evaluate an Anosov criterion on a disk grid")
    common(sp)
    sp.add_argument("--cyclic", action="store_true")
    sp.add_argument("--general", action="store_true")
    sp.add_argument("--simplified", action="store_true")
    sp.add_argument("--alpha-file", dest="alpha_files", action="append")
    sp.add_argument("--norm", type=float, help="constant cyclic differential with this norm at 0")
    sp.add_argument("--levels", type=int, default=16)
    sp.add_argument("--c-value", choices=["stated", "bracket"], default="stated")
    sp.add_argument("--wall-angle", choices=["stated", "proof"], default="stated")

    sp = sub.add_parser("develop", help="develop the Epstein-Poincare surface on a grid")
    common(sp)
    sp.add_argument("--alpha", default="zero", help="'zero' or a complex constant for the top differential")
    sp.add_argument("--alpha-file", dest="alpha_files", action="append")
    sp.add_argument("--out")
    sp.add_argument("--csv", dest="output", action="store_const", const="csv")

    sp = sub.add_parser("transversality", help="vanishing orders of the Schubert minors")
    common(sp, grid=False)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--alpha", default="0")
    sp.add_argument("--basepoint", default="0.1+0.2i")
    sp.add_argument("--direction", default="1")
    sp.add_argument("--levels", type=int, default=6)

    sp = sub.add_parser("epcheck", help="pointwise surface geometry from prescribed norms")
    common(sp, grid=False)
    sp.add_argument("--cyclic", action="store_true")
    sp.add_argument("--norm", type=float, default=0.0)
    sp.add_argument("--grad-norm", type=float, default=0.0)
    sp.add_argument("--norms", default="")
    sp.add_argument("--grad-norms", default="")
    sp.add_argument("--z", default="0")
    sp.add_argument("--c-value", choices=["stated", "bracket"], default="stated")
    return p


_GENERIC = {"command", "config", "lie_type", "alpha_files", "grid", "radius", "tol", "output", "seed"}


def _parse(argv: Sequence[str]) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(list(argv))
    if args.command is None:
        raise InputError("missing subcommand; see operlab --help")
    if args.config:
        try:
            extra = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(extra, dict):
            raise InputError("config file must hold a JSON object")
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(extra) - known
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        sub.set_defaults(**extra)
        args = parser.parse_args(list(argv))
    ns = vars(args)
    return RunConfig(command=args.command, lie_type=ns.get("lie_type"),
                     alpha_files=list(ns.get("alpha_files") or []), grid=ns.get("grid", 16),
                     radius=ns.get("radius", 0.5), tol=ns.get("tol", 1e-9),
                     output=ns.get("output") or "json", seed=ns.get("seed", 0),
                     options={k: v for k, v in ns.items() if k not in _GENERIC})


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        cfg = _parse(sys.argv[1:] if argv is None else argv)
        with _thread_limit():
            return COMMANDS[cfg.command](cfg, out)
    except OperlabError as exc:
        print(f"operlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ArithmeticError, FloatingPointError, RuntimeError) as exc:
        print(f"operlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
