"""Bound-tightness sweeps over seeded instances and perturbation scales.

Instance ``i`` uses seed ``base_seed + i`` and the same random direction at
every scale, so rows for one seed trace a single perturbation path. Rows are
ordered by (seed, scale) whatever the number of workers.
"""

import csv
import io
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ..errors import ConstructionError, NotInvertibleError
from ..linalg_core import spectral_norm
from ..lstsq import make_problem, solution_bounds
from ..perturb import DEFAULT_RANK_TOL, DEFAULT_STABILITY_MARGIN, BoundRow, theorem_bounds
from .generators import gen_instance

DEFAULT_SCALES = (1e-4, 1e-3, 1e-2, 1e-1)
SWEEP_BOUNDS = (
    "norm_bound",
    "difference_bound",
    "range_gap_bound",
    "kernel_gap_bound",
    "lstsq_printed",
    "lstsq_safe",
    "classical_norm",
)
HEADER = [
    "seed",
    "m",
    "n",
    "rank",
    "scale",
    "stable",
    "bound_name",
    "lhs",
    "rhs",
    "tightness",
    "p1_margin",
    "p2_margin",
    "p3_margin",
    "p4_margin",
    "p5_margin",
    "asserted",
]


def classical_row(inst):
    """``||Tbar^dag|| <= ||T^dag|| / (1 - ||T^dag|| ||dT||_2)``, the bounded-operator
    estimate, as context only (``rhs = inf`` once the denominator is not positive)."""
    nTd = inst.norm_T_dag
    denom = 1.0 - nTd * spectral_norm(inst.dT)
    rhs = nTd / denom if denom > 0 else float("inf")
    return BoundRow("classical_norm", inst.norm_Tbar_dag, rhs, asserted=False)


def _rhs_vectors(seed, m, scale, complex_):
    rng = np.random.default_rng([seed, 1])
    b = rng.standard_normal(m)
    g = rng.standard_normal(m)
    if complex_:
        b = b + 1j * rng.standard_normal(m)
        g = g + 1j * rng.standard_normal(m)
    ng = np.linalg.norm(g)
    db = scale * np.linalg.norm(b) * g / ng if ng > 0 else 0.0 * g
    return b, db


def _fmt(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def instance_rows(seed, m, n, rank, scales, kind="stable", field="real", rank_tol=DEFAULT_RANK_TOL,
                  stability_margin=DEFAULT_STABILITY_MARGIN):
    """All sweep rows for one seed, in scale order.

    A negative `rank` draws it from the seed. Unstable or undecided instances
    yield one row with ``bound_name = "none"``; generation or invertibility
    failures yield one ``error:<Type>`` row.
    """
    if rank < 0:
        top = min(m, n) if kind == "stable" else min(m, n) - 1
        rank = int(np.random.default_rng([seed, 0]).integers(0, top + 1))
    rows = []
    for scale in scales:
        base = [seed, m, n, rank, float(scale)]
        try:
            inst = gen_instance(m, n, rank, scale, kind=kind, seed=seed, field=field, rank_tol=rank_tol,
                                stability_margin=stability_margin)
            preds = inst.predicates
        except (ConstructionError, NotInvertibleError) as exc:
            rows.append(base + [False, f"error:{type(exc).__name__}", "nan", "nan", "nan"] + ["nan"] * 5 + [False])
            continue
        margins = [p.margin for p in preds]
        if not preds.all_true:
            rows.append(base + [False, "none", "nan", "nan", "nan"] + margins + [False])
            continue
        bound_rows = {r.name: r for r in theorem_bounds(inst)[0]}
        b, db = _rhs_vectors(seed, m, scale, field == "complex")
        printed, safe = solution_bounds(make_problem(inst, b, db))
        bound_rows.update(lstsq_printed=printed, lstsq_safe=safe, classical_norm=classical_row(inst))
        for name in SWEEP_BOUNDS:
            r = bound_rows[name]
            rows.append(base + [True, name, r.lhs, r.rhs, r.tightness] + margins + [r.asserted])
    return [[_fmt(v) for v in row] for row in rows]


def _task(args):
    return instance_rows(*args)


def run_sweep(count, m, n, rank=-1, scales=DEFAULT_SCALES, seed=0, kind="stable", field="real",
              rank_tol=DEFAULT_RANK_TOL, stability_margin=DEFAULT_STABILITY_MARGIN, workers=1):
    """Rows (lists of strings) for `count` instances; header not included."""
    scales = sorted(float(s) for s in scales)
    tasks = [(seed + i, m, n, rank, scales, kind, field, rank_tol, stability_margin) for i in range(count)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_task, tasks))
    else:
        chunks = [_task(t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    w.writerows(rows)
    return buf.getvalue()
