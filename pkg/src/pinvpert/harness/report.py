"""Analysis reports: one JSON document per instance.

Top-level keys, in order: ``meta``, ``norms``, ``predicates``, ``bounds``,
``gaps``, ``lstsq`` (only with a right-hand side), ``operators``, ``warnings``.
Key order is fixed by construction, so identical inputs give identical bytes.
"""

import json
import math

import numpy as np
import orjson

from .. import __version__
from ..errors import FormulaBreakdownError, NotInvertibleError
from ..graph_space import t_bound_certificate
from ..lstsq import backward_pair, forward_pair, make_problem, solution_bounds
from ..perturb import verify_bounds
from .matrix_io import matrix_to_dict

EXIT_OK = 0
EXIT_BOUND_FAILED = 1
EXIT_UNSTABLE = 2
EXIT_BREAKDOWN = 3
EXIT_IO = 4

FORMULA_RTOL = 1e-8


def _num(x):
    """JSON-safe float; non-finite values become the strings "inf", "-inf", "nan"."""
    x = float(x)
    if math.isfinite(x):
        return x
    if math.isnan(x):
        return "nan"
    return "inf" if x > 0 else "-inf"


def _row(row):
    return {
        "name": row.name,
        "kind": row.kind,
        "lhs": _num(row.lhs),
        "rhs": _num(row.rhs),
        "slack": _num(row.slack),
        "holds": bool(row.holds),
        "asserted": bool(row.asserted),
    }


def _predicates(preds):
    out = {p.name: {"holds": bool(p.holds), "value": _num(p.value), "margin": _num(p.margin)} for p in preds}
    out["status"] = preds.status
    out["unanimous"] = bool(preds.unanimous)
    out["in_guard_band"] = bool(preds.in_guard_band)
    return out


def _pair(pair):
    return {
        "bound": _row(pair.bound),
        "residual_x": _num(pair.residual_x),
        "residual_xbar": _num(pair.residual_xbar),
        "tol_x": _num(pair.tol_x),
        "tol_xbar": _num(pair.tol_xbar),
        "members": bool(pair.members),
    }


def build_report(
    inst,
    metric="graph",
    paranoid=False,
    certificate=None,
    samples=256,
    seed=0,
    b=None,
    db=None,
    include_matrices=True,
    penrose=False,
):
    """Analyze `inst` and return ``(report, exit_code)``.

    `certificate` is an optional ``(a, b)`` pair for the T-boundedness check.
    `penrose` adds the Penrose residuals of the closed form to the formula check.
    With a right-hand side `b` (and optional `db`), least-squares rows are added
    using a kernel coordinate ``z`` drawn from `seed`.
    """
    m, n = inst.shape
    meta = {
        "tool": "pinvpert",
        "version": __version__,
        "shape": [m, n],
        "complex": bool(np.iscomplexobj(inst.T)),
        "metric": metric,
        "paranoid": bool(paranoid),
        "rank_tol": _num(inst.rank_tol),
        "stability_margin": _num(inst.stability_margin),
        "seed": int(seed),
        "weight_source": "T",
        "rank_T": int(inst.svd_T.rank),
        "rank_Tbar": int(inst.svd_Tbar.rank),
    }
    norms = {}
    warnings = []
    report = {"meta": meta, "norms": norms, "predicates": {}, "bounds": [], "gaps": {}}

    if certificate is not None:
        cert = t_bound_certificate(inst.gs, inst.dT, certificate[0], certificate[1], samples, seed)
        norms["certificate"] = {
            "a": _num(cert.a),
            "b": _num(cert.b),
            "holds": cert.holds,
            "worst_ratio": _num(cert.worst_ratio),
            "samples": cert.samples,
            "sqrt2_max_ab": _num(np.sqrt(2.0) * max(cert.a, cert.b)),
        }

    def finish(status, code):
        meta["status"] = status
        meta["exit_code"] = code
        report.setdefault("operators", {})
        report["warnings"] = warnings
        if "lstsq" in report:
            report["lstsq"] = report.pop("lstsq")
        # restore canonical key order
        order = ["meta", "norms", "predicates", "bounds", "gaps", "lstsq", "operators", "warnings"]
        return {k: report[k] for k in order if k in report}, code

    try:
        result = verify_bounds(inst, metric=metric, paranoid=paranoid, penrose=penrose)
    except NotInvertibleError as exc:
        norms["factor_sigma_min"] = _num(exc.sigma_min)
        warnings.append(str(exc))
        return finish("not-invertible", EXIT_BREAKDOWN)
    except FormulaBreakdownError as exc:
        norms["breakdown_condition"] = _num(exc.condition)
        norms["breakdown_factor"] = exc.factor
        warnings.append(str(exc))
        return finish("formula-breakdown", EXIT_BREAKDOWN)

    report["predicates"] = _predicates(result.predicates)
    norms["T"] = _num(inst.norm_T)
    norms["T_dag"] = _num(inst.norm_T_dag)
    norms["inv_factor"] = _num(result.inv_norm)
    if not result.predicates.all_true:
        warnings.append(f"instance is {result.status}; closed forms and bounds skipped")
        return finish(result.status, EXIT_UNSTABLE)

    norms.update({k: _num(v) for k, v in result.norms.items()})
    report["bounds"] = [_row(r) for r in result.bounds]
    report["gaps"] = {k: _num(v) for k, v in result.gaps._asdict().items()}
    warnings.extend(result.warnings)
    ok = result.all_asserted_hold
    formula_tol = FORMULA_RTOL * (1.0 + result.norms["Tbar_dag"])
    formula_ok = result.formula_error <= formula_tol
    if penrose:
        residual_tol = FORMULA_RTOL * (1.0 + result.norms["Tbar"])
        formula_ok = formula_ok and max(result.formula_residuals) <= residual_tol
    if not formula_ok:
        warnings.append("closed form fails the oracle or Penrose check")
    ok = ok and formula_ok

    if b is not None:
        p = make_problem(inst, b, db)
        z = np.random.default_rng(seed).standard_normal(n)
        if np.iscomplexobj(inst.T):
            z = z.astype(np.complex128)
        fwd, bwd = forward_pair(p, z), backward_pair(p, z)
        rows = solution_bounds(p)
        report["lstsq"] = {
            "forward": _pair(fwd),
            "backward": _pair(bwd),
            "bounds": [_row(r) for r in rows],
        }
        lstsq_ok = fwd.bound.holds and bwd.bound.holds and fwd.members and bwd.members
        lstsq_ok = lstsq_ok and all(r.holds for r in rows if r.asserted)
        if not lstsq_ok:
            warnings.append("least-squares rows failed")
        if not rows[0].holds:
            warnings.append("lstsq_printed row fails (recorded, not asserted)")
        ok = ok and lstsq_ok

    ops = {
        "formula_oracle_distance": _num(result.formula_error),
        "formula_ok": bool(formula_ok),
    }
    if penrose:
        ops["formula_penrose_residuals"] = [_num(r) for r in result.formula_residuals]
    if paranoid:
        ops["variants"] = {k: _num(v) for k, v in result.variants.items()}
    if include_matrices:
        ops["G"] = matrix_to_dict(result.G)
        ops["Tbar_dag_formula"] = matrix_to_dict(result.Tbar_dag_formula)
        ops["Tbar_dag_oracle"] = matrix_to_dict(result.Tbar_dag_oracle)
    report["operators"] = ops
    if result.status != "stable":
        warnings.append(f"predicates hold but status is {result.status}")
    code = EXIT_OK if ok else EXIT_BOUND_FAILED
    return finish(result.status, code)


def dumps_report(report):
    """Serialize with 2-space indentation, keeping matrix data on one line each.

    Matrix data goes through orjson (shortest round-trip floats, formatted in
    C); the surrounding document through the standard library.
    """
    blobs = []

    def strip(obj):
        if isinstance(obj, dict):
            out = {}
            for k, v in obj.items():
                if k == "data" and isinstance(v, list):
                    out[k] = f"@@blob{len(blobs)}@@"
                    blobs.append(v)
                else:
                    out[k] = strip(v)
            return out
        if isinstance(obj, list):
            return [strip(v) for v in obj]
        return obj

    parts = json.dumps(strip(report), indent=2, allow_nan=False).split('"@@blob')
    out = [parts[0]]
    for i, part in enumerate(parts[1:]):
        idx, rest = part.split('@@"', 1)
        assert int(idx) == i
        out.append(orjson.dumps(blobs[i]).decode())
        out.append(rest)
    return "".join(out) + "\n"
