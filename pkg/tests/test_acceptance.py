"""Acceptance criteria AC1-AC10, one test each.

Every test prints one PASS/FAIL line in the "acceptance criteria" section of
the pytest summary. Tolerances are pinned here as module constants.
"""

import json
import os
import re
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from pinvpert.cli import main
from pinvpert.errors import FormulaBreakdownError
from pinvpert.geninv import mp_from_geninv, mp_of_product, penrose_residuals, product_factors, random_geninv
from pinvpert.graph_space import graph_norm, make_graph_space, t_bound_certificate, t_norm_cod, t_norm_dom
from pinvpert.harness.generators import gen_instance, gen_surrogate
from pinvpert.harness.matrix_io import write_matrix
from pinvpert.harness.report import build_report
from pinvpert.linalg_core import Subspace, pinv_oracle, spectral_norm
from pinvpert.lstsq import backward_pair, forward_pair, make_problem, solution_bounds
from pinvpert.perturb import GOLDEN, gap, perturbed_mp, projector_distance, verify_bounds

from .conftest import complex_gauss, criterion, random_matrix

PAPER = Path(__file__).resolve().parents[1] / "paper.md"

RANK_TOL = 1e-10
MP_RTOL = 1e-8  # AC1, AC2, AC4
PRODUCT_MAX_COND = 1e8  # AC2 guard
PENROSE_RTOL = 1e-8  # AC4
BOUND_RTOL, BOUND_ATOL = 1e-10, 1e-12  # AC5
GAP_RTOL = 1e-10  # AC6
SANDWICH_SLACK = 1e-12  # AC7
REMARK_SLACK = 1e-9  # AC7
MEMBERSHIP_RTOL = 1e-9  # AC8
LSQ_SLACK = 1e-10  # AC8
SCALES = (1e-4, 1e-3, 1e-2, 1e-1)
ANALYZE_SECONDS = 5.0  # AC9
AC1_SECONDS = 10.0


def upper_holds(lhs, rhs):
    return lhs <= rhs * (1 + BOUND_RTOL) + BOUND_ATOL


def _draw_batch(kind, count, base_seed):
    """`count` generated instances of `kind` outside the guard band (dims <= 10x8).

    Instances inside the guard band are regenerated, as the criterion requires;
    the generator scale of each instance and the number skipped are returned.
    """
    rng = np.random.default_rng(base_seed)
    out, scales, skipped, seed = [], [], 0, base_seed
    while len(out) < count:
        seed += 1
        m, n = int(rng.integers(1, 11)), int(rng.integers(1, 9))
        top = min(m, n) if kind == "stable" else min(m, n) - 1
        if top < 0:
            continue
        rank = len(out) % (top + 1)
        scale = SCALES[len(out) % len(SCALES)]
        field = "complex" if len(out) % 3 == 0 else "real"
        inst = gen_instance(m, n, rank, scale, kind=kind, seed=seed, field=field)
        if inst.predicates.in_guard_band:
            skipped += 1
            continue
        out.append(inst)
        scales.append(scale)
    return out, scales, skipped


@pytest.fixture(scope="module")
def batches():
    stable, scales, s1 = _draw_batch("stable", 200, 10_000)
    unstable, _, s2 = _draw_batch("unstable", 200, 20_000)
    return {"stable": stable, "stable_scales": scales, "unstable": unstable, "skipped": s1 + s2}


def test_ac1_mp_from_geninv():
    with criterion("AC1 MP from a (1,2)-inverse, both metrics, 200 instances") as res:
        rng = np.random.default_rng(1)
        worst, failures, ranks = 0.0, 0, set()
        start = time.perf_counter()
        for i in range(200):
            m, n = int(rng.integers(1, 9)), int(rng.integers(1, 7))
            r = i % (min(m, n) + 1)
            ranks.add((min(m, n), r))
            T = random_matrix(rng, m, n, r, complex_=i % 2 == 1)
            bundle = random_geninv(T, seed=i, rank_tol=RANK_TOL)
            ref = pinv_oracle(T, RANK_TOL)
            tol = MP_RTOL * (1 + spectral_norm(ref))
            for metric in ("standard", "graph"):
                err = spectral_norm(mp_from_geninv(bundle, metric) - ref)
                worst = max(worst, err / tol)
                failures += err > tol
        elapsed = time.perf_counter() - start
        res["passed"] = failures == 0 and elapsed < AC1_SECONDS
        res["detail"] = f"failures={failures} worst err/tol={worst:.2e} time={elapsed:.2f}s (<{AC1_SECONDS:.0f}s)"
        assert failures == 0
        assert elapsed < AC1_SECONDS


def _product_pair(rng, i):
    k = int(rng.integers(1, 7))
    m, n = int(rng.integers(1, 7)), int(rng.integers(1, 7))
    ra, rb = int(rng.integers(0, min(m, k) + 1)), int(rng.integers(0, min(k, n) + 1))
    cx = i % 4 == 3
    return random_matrix(rng, m, k, ra, cx), random_matrix(rng, k, n, rb, cx)


def test_ac2_product_formula():
    with criterion("AC2 product formula, 200 well-conditioned pairs") as res:
        rng = np.random.default_rng(2)
        checked = guarded = failures = i = 0
        worst = 0.0
        while checked < 200:
            A, B = _product_pair(rng, i)
            i += 1
            cond = product_factors(A, B, RANK_TOL).condition
            if not cond < PRODUCT_MAX_COND:
                guarded += 1
                with pytest.raises(FormulaBreakdownError):
                    mp_of_product(A, B, RANK_TOL, PRODUCT_MAX_COND)
                continue
            X = mp_of_product(A, B, RANK_TOL, PRODUCT_MAX_COND)
            ref = pinv_oracle(A @ B, RANK_TOL)
            nref = spectral_norm(ref)
            err = spectral_norm(X - ref)
            ok = err <= MP_RTOL * nref if nref > 0 else err <= BOUND_ATOL
            worst = max(worst, err / nref if nref > 0 else err)
            failures += not ok
            checked += 1
        res["passed"] = failures == 0
        res["detail"] = f"failures={failures} worst rel err={worst:.2e} guarded (reported, not asserted)={guarded}"
        assert failures == 0


def test_ac3_predicate_equivalence(batches):
    with criterion("AC3 five predicates unanimous, 200 stable + 200 unstable") as res:
        disagree = [i for i, inst in enumerate(batches["stable"] + batches["unstable"]) if not inst.predicates.unanimous]
        wrong_stable = sum(not inst.predicates.all_true for inst in batches["stable"])
        p1_not_failing = sum(inst.predicates[0].holds for inst in batches["unstable"])
        res["passed"] = not disagree and wrong_stable == 0 and p1_not_failing == 0
        res["detail"] = (
            f"disagreements={len(disagree)} stable-not-all-true={wrong_stable} "
            f"unstable-with-p1-true={p1_not_failing} regenerated(guard band)={batches['skipped']}"
        )
        assert not disagree
        assert wrong_stable == 0 and p1_not_failing == 0


def test_ac4_perturbed_mp(batches):
    with criterion("AC4 perturbed MP formula vs oracle and Penrose residuals") as res:
        worst_err = worst_res = 0.0
        failures = 0
        for inst in batches["stable"]:
            ref = pinv_oracle(inst.Tbar, RANK_TOL)
            nref, nTb = spectral_norm(ref), spectral_norm(inst.Tbar)
            for metric in ("standard", "graph"):
                X = perturbed_mp(inst, metric)
                err = spectral_norm(X - ref) / (1 + nref)
                pres = max(penrose_residuals(inst.Tbar, X)) / (1 + nTb)
                worst_err, worst_res = max(worst_err, err), max(worst_res, pres)
                failures += err > MP_RTOL or pres > PENROSE_RTOL
        res["passed"] = failures == 0
        res["detail"] = f"failures={failures} worst rel err={worst_err:.2e} worst scaled Penrose={worst_res:.2e}"
        assert failures == 0


def test_ac5_norm_and_difference_bounds(batches):
    with criterion("AC5 norm/difference bounds on all stable instances and scales") as res:
        paper = PAPER.read_text()
        golden_in_paper = bool(re.search(r"\\frac\{1\+\\sqrt\{5\}\}\{2\}\\\|\\bar\{T\}\^\\dag", paper))
        golden_ok = GOLDEN == (1 + np.sqrt(5)) / 2 and golden_in_paper
        per_scale = {s: [0, 0] for s in SCALES}
        tight = 0.0
        cases = list(zip(batches["stable"], batches["stable_scales"]))
        for seed in range(25):  # the same direction across every scale
            cases.extend((gen_instance(8, 6, 3, s, seed=seed), s) for s in SCALES)
        for inst, scale in cases:
            rows = {r.name: r for r in verify_bounds(inst, penrose=False).bounds}
            a, b = rows["norm_bound"], rows["difference_bound"]
            ok = upper_holds(a.lhs, a.rhs) and upper_holds(b.lhs, b.rhs)
            per_scale[scale][0] += ok
            per_scale[scale][1] += 1
            tight = max(tight, b.tightness)
        total_ok = sum(v[0] for v in per_scale.values())
        total = sum(v[1] for v in per_scale.values())
        rates = " ".join(f"{s:g}:{v[0]}/{v[1]}" for s, v in per_scale.items())
        res["passed"] = total_ok == total and golden_ok
        res["detail"] = f"hold {total_ok}/{total} [{rates}] max diff tightness={tight:.3f} golden constant ok={golden_ok}"
        assert golden_ok
        assert total_ok == total


def _random_subspace(rng, ambient, dim, complex_):
    if dim == 0:
        return Subspace(ambient, np.zeros((ambient, 0)))
    Z = complex_gauss(rng, (ambient, dim)) if complex_ else rng.standard_normal((ambient, dim))
    return Subspace(ambient, np.linalg.qr(Z)[0])


def test_ac6_gap_identities(batches):
    with criterion("AC6 gap identities (projector difference, gap_hat, one-sided gap)") as res:
        proj_fail = 0
        worst = 0.0
        for inst in batches["stable"]:
            Td, Tbd = pinv_oracle(inst.T, RANK_TOL), pinv_oracle(inst.Tbar, RANK_TOL)
            lhs = spectral_norm(inst.T @ Td - inst.Tbar @ Tbd)
            d = gap(inst.range_T, inst.range_Tbar)
            worst = max(worst, abs(lhs - d) / (1 + lhs))
            proj_fail += abs(lhs - d) > GAP_RTOL * (1 + lhs)

        rng = np.random.default_rng(6)
        hat_fail = 0
        tested, counterexamples = 0, []
        pairs = []
        for i in range(500):
            ambient = int(rng.integers(1, 9))
            # Half the pairs share a dimension so that gap_hat < 1 occurs.
            d1 = int(rng.integers(0, ambient + 1))
            d2 = d1 if i % 2 == 0 else int(rng.integers(0, ambient + 1))
            cx = i % 3 == 0
            M, N = _random_subspace(rng, ambient, d1, cx), _random_subspace(rng, ambient, d2, cx)
            PM, PN = M.basis @ M.basis.conj().T, N.basis @ N.basis.conj().T
            dense = spectral_norm(PM - PN) if ambient else 0.0
            ghat = max(gap(M, N), gap(N, M))
            hat_fail += abs(ghat - dense) > GAP_RTOL
            pairs.append((M, N, dense, ghat))
        for inst in batches["stable"]:
            for M, N in ((inst.range_T, inst.range_Tbar), (inst.kernel_T, inst.kernel_Tbar)):
                dense = projector_distance(Subspace(M.ambient_dim, M.basis), Subspace(N.ambient_dim, N.basis))
                pairs.append((M, N, dense, max(gap(M, N), gap(N, M))))
        near_one = 0
        for M, N, dense, ghat in pairs:
            # gap_hat equal to 1 up to rounding (e.g. unequal dimensions) does not
            # decide the strict hypothesis gap_hat < 1; such pairs are counted only.
            if 1.0 - GAP_RTOL <= ghat < 1.0:
                near_one += 1
            if ghat < 1.0 - GAP_RTOL:
                tested += 1
                for a, b in ((M, N), (N, M)):
                    if abs(gap(a, b) - dense) > GAP_RTOL * (1 + dense):
                        counterexamples.append((a.basis.tolist(), b.basis.tolist(), gap(a, b), dense))
        for ce in counterexamples:
            print("one-sided gap counterexample:", ce)
        res["passed"] = proj_fail == 0 and hat_fail == 0 and not counterexamples
        res["detail"] = (
            f"projector-identity failures={proj_fail} (worst {worst:.1e}) gap_hat failures={hat_fail}/500 "
            f"one-sided pairs tested={tested} counterexamples={len(counterexamples)} "
            f"(gap_hat within {GAP_RTOL:g} of 1, skipped={near_one})"
        )
        assert proj_fail == 0 and hat_fail == 0
        assert not counterexamples


def test_ac7_graph_norm_laws():
    with criterion("AC7 graph-norm sandwich, T^dag sandwich, T-bounded implies sqrt2*max(a,b)") as res:
        paper = PAPER.read_text()
        consts_in_paper = r"\frac{\sqrt{2}}{2}\|x\|_G \leq \|x\|_T" in paper and r"2(\max(a,b))^2" in paper
        rng = np.random.default_rng(7)
        sandwich_fail = 0
        for i in range(1000):
            m, n = int(rng.integers(1, 9)), int(rng.integers(1, 9))
            cx = i % 2 == 1
            T = (complex_gauss(rng, (m, n)) if cx else rng.standard_normal((m, n))) * 10.0 ** rng.uniform(-2, 2)
            x = complex_gauss(rng, n) if cx else rng.standard_normal(n)
            nT, nG = graph_norm(make_graph_space(T), x)
            sandwich_fail += not (np.sqrt(2) / 2 * nG - SANDWICH_SLACK <= nT <= nG + SANDWICH_SLACK)

        tyl_fail = 0
        for i in range(200):
            m, n = int(rng.integers(1, 9)), int(rng.integers(1, 9))
            T = random_matrix(rng, m, n, int(rng.integers(0, min(m, n) + 1)), complex_=i % 2 == 1)
            S = pinv_oracle(T, RANK_TOL)
            v = t_norm_cod(make_graph_space(T), S) ** 2
            lo, hi = spectral_norm(S) ** 2, spectral_norm(S) ** 2 + spectral_norm(T @ S) ** 2
            tyl_fail += not (lo * (1 - BOUND_RTOL) - BOUND_ATOL <= v <= hi * (1 + BOUND_RTOL) + BOUND_ATOL)

        held = remark_fail = 0
        for i in range(300):
            m, n = int(rng.integers(1, 9)), int(rng.integers(1, 9))
            T = random_matrix(rng, m, n, int(rng.integers(0, min(m, n) + 1)))
            a, b = rng.uniform(0, 2, size=2)
            if i % 2 == 0:
                # T-bounded by construction: dT = A1 + A2 T with ||A1|| <= a, ||A2|| <= b.
                A1, A2 = rng.standard_normal((m, n)), rng.standard_normal((m, m))
                dT = a * A1 / max(spectral_norm(A1), 1e-300) + b * (A2 / spectral_norm(A2)) @ T
            else:
                dT = rng.standard_normal((m, n))
            gs = make_graph_space(T)
            cert = t_bound_certificate(gs, dT, a, b, samples=64, seed=i)
            if cert.holds:
                held += 1
                remark_fail += t_norm_dom(gs, dT) > np.sqrt(2) * max(a, b) + REMARK_SLACK
        surrogate = gen_surrogate(64, 1e-2)
        cert = t_bound_certificate(surrogate.gs, surrogate.dT, 0.0, 1e-2)
        surrogate_ok = cert.holds and surrogate.dT_T_norm <= np.sqrt(2) * 1e-2
        ok = sandwich_fail == 0 and tyl_fail == 0 and remark_fail == 0 and held >= 150 and surrogate_ok
        res["passed"] = ok and consts_in_paper
        res["detail"] = (
            f"sandwich failures={sandwich_fail}/1000 T^dag sandwich failures={tyl_fail}/200 "
            f"remark failures={remark_fail}/{held} certified, surrogate ok={surrogate_ok} constants in paper={consts_in_paper}"
        )
        assert consts_in_paper
        assert ok


def test_ac8_least_squares(batches):
    with criterion("AC8 least-squares membership, solution-pair bounds, safe combined bound") as res:
        rng = np.random.default_rng(8)
        member_fail = pair_fail = safe_fail = printed_hold = 0
        insts = batches["stable"]
        for inst in insts:
            m, n = inst.shape
            cx = np.iscomplexobj(inst.T)
            b = complex_gauss(rng, m) if cx else rng.standard_normal(m)
            db = 1e-2 * (complex_gauss(rng, m) if cx else rng.standard_normal(m))
            z = complex_gauss(rng, n) if cx else rng.standard_normal(n)
            p = make_problem(inst, b, db)
            tol_x = MEMBERSHIP_RTOL * (1 + spectral_norm(inst.T) * np.linalg.norm(p.b))
            tol_xb = MEMBERSHIP_RTOL * (1 + spectral_norm(inst.Tbar) * np.linalg.norm(p.bbar))
            for pair in (forward_pair(p, z), backward_pair(p, z)):
                rx = np.linalg.norm(inst.T.conj().T @ (inst.T @ pair.x - p.b))
                rxb = np.linalg.norm(inst.Tbar.conj().T @ (inst.Tbar @ pair.xbar - p.bbar))
                member_fail += rx > tol_x or rxb > tol_xb
                pair_fail += pair.bound.slack < -LSQ_SLACK * (1 + pair.bound.lhs)
            printed, safe = solution_bounds(p)
            safe_fail += not upper_holds(safe.lhs, safe.rhs)
            printed_hold += upper_holds(printed.lhs, printed.rhs)
        res["passed"] = member_fail == 0 and pair_fail == 0 and safe_fail == 0
        res["detail"] = (
            f"membership failures={member_fail} pair-bound failures={pair_fail} safe-row failures={safe_fail} "
            f"as-printed hold rate={printed_hold}/{len(insts)} (recorded, not asserted)"
        )
        assert member_fail == 0 and pair_fail == 0 and safe_fail == 0


def test_ac9_unbounded_surrogate(tmp_path):
    with criterion("AC9 difference-operator surrogate n=64/256/1024, analyze n=1024 < 5 s") as res:
        eps = 1e-2
        norms, dT_T, codes = {}, {}, {}
        for n in (64, 256):
            inst = gen_surrogate(n, eps)
            report, codes[n] = build_report(inst, include_matrices=False)
            norms[n], dT_T[n] = inst.norm_T, inst.dT_T_norm
        out = tmp_path / "r1024.json"
        start = time.perf_counter()
        codes[1024] = main(["analyze", "--surrogate", "1024", "--eps", str(eps), "--out", str(out)])
        elapsed = time.perf_counter() - start
        rep = json.loads(out.read_text())
        norms[1024], dT_T[1024] = rep["norms"]["T"], rep["norms"]["dT_T"]
        all_hold = all(c == 0 for c in codes.values()) and all(r["holds"] for r in rep["bounds"] if r["asserted"])
        small = all(v <= eps for v in dT_T.values())
        # ||n D||_2 = 2 n cos(pi / (2 n)): linear growth, slope -> 2.
        linear = all(abs(norms[n] / n - 2 * np.cos(np.pi / (2 * n))) < 1e-9 for n in norms)
        res["passed"] = all_hold and small and linear and elapsed < ANALYZE_SECONDS
        res["detail"] = (
            f"exit codes={codes} ||dT||_T={[f'{dT_T[n]:.8f}' for n in sorted(dT_T)]} "
            f"||T||/n={[round(norms[n] / n, 6) for n in sorted(norms)]} analyze(1024)={elapsed:.2f}s"
        )
        assert all_hold and small and linear
        assert elapsed < ANALYZE_SECONDS


def test_ac10_determinism(tmp_path):
    with criterion("AC10 byte-identical reports and sweep CSVs under fixed seeds") as res:
        inst = gen_instance(7, 5, 3, 1e-2, seed=42, field="complex")
        write_matrix(tmp_path / "T.json", inst.T)
        write_matrix(tmp_path / "dT.json", inst.dT)
        write_matrix(tmp_path / "b.json", np.arange(7.0)[:, None])
        args = ["analyze", "--T", str(tmp_path / "T.json"), "--dT", str(tmp_path / "dT.json"),
                "--b", str(tmp_path / "b.json"), "--certificate", "0.1", "0.1", "--paranoid", "--penrose",
                "--seed", "5"]
        outs = []
        for k in range(2):
            main([*args, "--out", str(tmp_path / f"r{k}.json")])
            outs.append((tmp_path / f"r{k}.json").read_bytes())
        env = dict(os.environ, PYTHONHASHSEED="123")
        proc = subprocess.run([sys.executable, "-m", "pinvpert", *args], capture_output=True, env=env, check=False)
        outs.append(proc.stdout)
        reports_same = len(set(outs)) == 1

        sweep = ["sweep", "--count", "6", "--m", "6", "--n", "5", "--seed", "3", "--field", "complex"]
        csvs = []
        for k, extra in enumerate(([], [], ["--workers", "2"])):
            main([*sweep, *extra, "--out", str(tmp_path / f"s{k}.csv")])
            csvs.append((tmp_path / f"s{k}.csv").read_bytes())
        csv_same = len(set(csvs)) == 1
        res["passed"] = reports_same and csv_same
        res["detail"] = f"reports identical ({len(outs)} runs)={reports_same} CSVs identical ({len(csvs)} runs)={csv_same}"
        assert reports_same and csv_same
