"""Acceptance criteria, one PASS/FAIL line each.

Criteria 1-7 are asserted.  Criterion 8 is informational.  Criterion 9
asserts only that both triple-double additions appear in the report; its
throughput comparison is informational.

Run directly (``python tests/test_acceptance.py``) or through pytest, where
the lines also appear in the terminal summary.  ``MPFKIT_ACCEPT_PERF_N``
sets the matrix size of the informational performance check (default 256;
1024 reproduces the full-size comparison).
"""
from __future__ import annotations

import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np
import pytest

from helpers import eft_pairs, make_rng, normalized, same_bits
from mpfkit import eft, mpf, simd, use_backend
from mpfkit._backend import HAVE_NUMBA
from mpfkit.bench import BenchConfig, emit_csv, gen_paper_matrices, random_matrix, run_ewise_bench
from mpfkit.bench.runner import BenchRecord, BenchReport
from mpfkit.linalg import (
    KernelVariant, OpCounter, MPMatrix, ew_add, matmul_block, matmul_block_parallel, matmul_naive,
    matmul_strassen, matmul_strassen_parallel,
)
from mpfkit.mpf import PACKED_TYPES, SCALAR_TYPES, Precision
from mpfkit.oracle import (
    DyadicReal, digit_loss, loss_digits, max_rel_err, o_from_components, o_matmul, o_rel_err,
)

MODES = ("numba", "numpy") if HAVE_NUMBA else ("numpy",)
VARIANTS = tuple(KernelVariant)
pytestmark = pytest.mark.slow


@dataclass
class Results:
    entries: dict = field(default_factory=dict)

    def record(self, number: int, title: str, ok: bool, detail: str, asserted: bool = True) -> str:
        tag = "asserted" if asserted else "informational"
        line = f"criterion {number} [{tag}] {title}: {'PASS' if ok else 'FAIL'} ({detail})"
        self.entries[number] = line
        print(line)
        return line

    def lines(self) -> list[str]:
        return [self.entries[k] for k in sorted(self.entries)]


RESULTS = Results()


# -- 1 ---------------------------------------------------------------------------------

def test_criterion_1_eft_exactness():
    n = 1_000_000
    rng = make_rng(1001)
    start = time.perf_counter()
    failures = {"two_sum": 0, "quick_two_sum": 0, "two_prod": 0}
    D = DyadicReal.from_float
    a, b = eft_pairs(rng, n)
    for x, y in zip(a.tolist(), b.tolist()):
        s, e = eft.two_sum(x, y)
        exact = D(x) + D(y)
        failures["two_sum"] += D(s) + D(e) != exact
        if abs(x) < abs(y):
            x, y = y, x
        s, e = eft.quick_two_sum(x, y)
        failures["quick_two_sum"] += D(s) + D(e) != exact
    a, b = eft_pairs(rng, n, -300, 300)
    for x, y in zip(a.tolist(), b.tolist()):
        s, e = eft.two_prod(x, y)
        failures["two_prod"] += D(s) + D(e) != D(x) * D(y)
    elapsed = time.perf_counter() - start
    ok = not any(failures.values()) and elapsed < 120
    RESULTS.record(1, "EFT exactness on 10^6 pairs per op", ok,
                   f"failures={failures}, {elapsed:.1f}s")
    assert not any(failures.values())
    assert elapsed < 120


# -- 2 ---------------------------------------------------------------------------------

def _lane_cases(rng, n):
    a, b = eft_pairs(rng, n)
    c = np.ldexp(rng.uniform(-2, 2, n), rng.integers(-60, 61, n))
    pa, pb = eft_pairs(rng, n, -300, 300)
    big, small = np.where(abs(a) >= abs(b), a, b), np.where(abs(a) >= abs(b), b, a)
    six = [np.ldexp(rng.uniform(-2, 2, n), rng.integers(-20, 21, n)) for _ in range(6)]
    distilled = [np.array(v) for v in zip(*[eft.vec_sum(col) for col in np.array(six).T.tolist()])]
    distilled[2][::4] = 0.0
    x3 = -np.sort(-abs(np.array(six[:3])), axis=0) * np.sign(six[3])
    y3 = -np.sort(-abs(np.array(six[3:])), axis=0) * np.sign(six[4])
    y3[:, ::7] = -x3[:, ::7]
    r5 = [rng.uniform(1, 2, n)]
    for _ in range(4):
        r5.append(r5[-1] * 2.0 ** -50 * rng.uniform(-1, 1, n))
    r5 = np.array(r5)
    r5[rng.random(r5.shape) < 0.15] = 0.0
    fc = np.ldexp(rng.uniform(-2, 2, n), rng.integers(-600, 601, n))
    fc[: n // 4] = -(pa[: n // 4] * pb[: n // 4])
    zip2 = lambda u, v: list(zip(u.tolist(), v.tolist()))  # noqa: E731
    cols = lambda arrs: [tuple(col) for col in np.array(arrs).T.tolist()]  # noqa: E731
    return [
        ("lq_add", lambda: simd.lq_add(a, b), lambda: [(x + y,) for x, y in zip2(a, b)]),
        ("lq_sub", lambda: simd.lq_sub(a, b), lambda: [(x - y,) for x, y in zip2(a, b)]),
        ("lq_mul", lambda: simd.lq_mul(pa, pb), lambda: [(x * y,) for x, y in zip2(pa, pb)]),
        ("lq_fma", lambda: simd.lq_fma(pa, pb, fc),
         lambda: [(eft.fma(x, y, z),) for x, y, z in zip(pa.tolist(), pb.tolist(), fc.tolist())]),
        ("simd_two_sum", lambda: simd.simd_two_sum(a, b), lambda: [eft.two_sum(*p) for p in zip2(a, b)]),
        ("simd_quick_two_sum", lambda: simd.simd_quick_two_sum(big, small),
         lambda: [eft.quick_two_sum(*p) for p in zip2(big, small)]),
        ("simd_two_prod", lambda: simd.simd_two_prod(pa, pb), lambda: [eft.two_prod(*p) for p in zip2(pa, pb)]),
        ("simd_two_prod_dekker", lambda: simd.simd_two_prod_dekker(pa, pb),
         lambda: [eft.two_prod_dekker(*p) for p in zip2(pa, pb)]),
        ("simd_three_sum", lambda: simd.simd_three_sum(a, b, c),
         lambda: [eft.three_sum(*t) for t in cols([a, b, c])]),
        ("simd_three_sum2", lambda: simd.simd_three_sum2(a, b, c),
         lambda: [eft.three_sum2(*t) for t in cols([a, b, c])]),
        ("simd_vec_sum", lambda: simd.simd_vec_sum(six), lambda: [eft.vec_sum(t) for t in cols(six)]),
        ("simd_vseb(2)", lambda: simd.simd_vseb(2, distilled), lambda: [eft.vseb(2, t) for t in cols(distilled)]),
        ("simd_vseb(3)", lambda: simd.simd_vseb(3, distilled), lambda: [eft.vseb(3, t) for t in cols(distilled)]),
        ("simd_merge_by_magnitude", lambda: simd.simd_merge_by_magnitude(list(x3), list(y3)),
         lambda: [eft.merge_by_magnitude(p[:3], p[3:]) for p in cols([*x3, *y3])]),
        ("simd_renorm5", lambda: simd.simd_renorm5(*r5), lambda: [eft.renorm5(*t) for t in cols(r5)]),
    ]


def _packed_cases(rng, n):
    ops = ["dd_add", "dd_mul", "dd_sub", "td_add_merge", "td_add_q", "td_mul", "td_mul_q", "td_sub",
           "td_sub_merge", "qd_add", "qd_mul", "qd_sub"]
    out = []
    for name in ops:
        prec = Precision.parse(name[:2])
        cx = normalized(rng, prec, n, signed=True) * np.ldexp(1.0, rng.integers(-30, 31, n))
        cy = normalized(rng, prec, n, signed=True) * np.ldexp(1.0, rng.integers(-30, 31, n))
        cy[:, : n // 20] = -cx[:, : n // 20]
        cy[:, n // 20: n // 10] = 0.0
        op = getattr(mpf, name)
        P, S = PACKED_TYPES[prec], SCALAR_TYPES[prec]

        def packed(op=op, P=P, cx=cx, cy=cy):
            return op(P(*cx), P(*cy)).comp

        def scalar(op=op, S=S, cx=cx, cy=cy):
            return [op(S(*p), S(*q)).c for p, q in zip(cx.T.tolist(), cy.T.tolist())]

        out.append((name, packed, scalar))
    return out


def test_criterion_2_lanewise_bit_identity():
    n = 100_000
    rng = make_rng(1002)
    mismatches: dict[str, int] = {}
    for name, vector_fn, scalar_fn in _lane_cases(rng, n) + _packed_cases(rng, n):
        expected = np.array(scalar_fn(), dtype=np.float64).T
        for mode in MODES:
            with use_backend(mode):
                got = vector_fn()
            got = np.atleast_2d(np.stack([np.asarray(g, dtype=np.float64) for g in got])
                                if isinstance(got, (list, tuple)) else got)
            bad = int(np.any(got.view(np.int64) != expected.view(np.int64), axis=0).sum())
            if bad:
                mismatches[f"{name}/{mode}"] = bad
    total = sum(mismatches.values())
    RESULTS.record(2, "lanewise bit-identity, 10^5 inputs, modes " + "+".join(MODES), total == 0,
                   f"27 ops, mismatches={mismatches or 0}")
    assert total == 0


# -- 3 ---------------------------------------------------------------------------------

BOUNDS = {"dd_add": -102, "dd_mul": -100, "td_add_q": -144, "td_add_merge": -144, "td_mul": -140,
          "qd_add": -200, "qd_mul": -195}


def test_criterion_3_error_bounds():
    n = 100_000
    rng = make_rng(1003)
    violations, worst = {}, {}
    for name, exp in BOUNDS.items():
        prec = Precision.parse(name[:2])
        sign = rng.choice([-1.0, 1.0], n)
        cx, cy = normalized(rng, prec, n) * sign, normalized(rng, prec, n) * sign
        P = PACKED_TYPES[prec]
        out = np.stack(getattr(mpf, name)(P(*cx), P(*cy)).comp)
        is_add = "add" in name
        w, bad = 0.0, 0
        for r, x, y in zip(out.T.tolist(), cx.T.tolist(), cy.T.tolist()):
            X, Y = o_from_components(x), o_from_components(y)
            err = o_rel_err(r, X + Y if is_add else X * Y)
            w = max(w, err)
            bad += err > 2.0 ** exp
        violations[name], worst[name] = bad, round(float(np.log2(w)), 1) if w else float("-inf")
    ok = not any(violations.values())
    RESULTS.record(3, "error bounds vs oracle, 10^5 same-sign pairs", ok,
                   f"violations={sum(violations.values())}, worst log2={worst}")
    assert ok, violations


# -- 4 ---------------------------------------------------------------------------------

def test_criterion_4_matmul_correctness():
    problems = []
    combos = 0
    for prec in Precision:
        for n in (4, 8, 16, 33):
            rng = make_rng(1004, prec.width, n)
            A, B = random_matrix(rng, prec, n, n), random_matrix(rng, prec, n, n)
            exact = o_matmul(A.to_dyadic(), B.to_dyadic())
            tol = n * 4 * prec.eps
            ref = None
            for mode in MODES:
                with use_backend(mode):
                    results = {}
                    for v in VARIANTS:
                        results["naive", v] = matmul_naive(A, B, v)
                        results["block", v] = matmul_block(A, B, 32, v)
                        results["block8", v] = matmul_block(A, B, 8, v)
                        results["strassen", v] = matmul_strassen(A, B, 64, 32, v)
                        results["strassen4", v] = matmul_strassen(A, B, 4, 2, v)
                combos += len(results)
                ref = ref or results["naive", KernelVariant.NORMAL]
                for (algo, v), C in results.items():
                    if algo.startswith("strassen4"):
                        if not C.bit_equal(results["strassen4", KernelVariant.NORMAL]):
                            problems.append(f"{mode} {prec.name} n={n} strassen4/{v.value} variant mismatch")
                    elif not C.bit_equal(ref):
                        problems.append(f"{mode} {prec.name} n={n} {algo}/{v.value} differs from naive")
                    if not C.padding_is_zero():
                        problems.append(f"{mode} {prec.name} n={n} {algo}/{v.value} dirty padding")
                    err = max_rel_err(C, exact)
                    if err > tol:
                        problems.append(f"{mode} {prec.name} n={n} {algo}/{v.value} err {err:.3g} > {tol:.3g}")
    RESULTS.record(4, "matmul within n*4*eps of oracle; block == naive; variants identical", not problems,
                   f"{combos} products checked, problems={len(problems)}")
    assert not problems, problems[:10]


# -- 5 ---------------------------------------------------------------------------------

def test_criterion_5_digit_loss():
    losses = {}
    for n in (64, 256):
        for prec in Precision:
            A, B = gen_paper_matrices(n, prec)
            exact = o_matmul(A.to_dyadic(), B.to_dyadic(), max_n=256)
            for algo, fn in (("naive", matmul_naive), ("block", matmul_block), ("strassen", matmul_strassen)):
                losses[f"{prec.name}/{algo}/{n}"] = round(digit_loss(fn(A, B), exact), 2)
    worst = max(losses.values())
    RESULTS.record(5, "digit loss on structured sqrt matrices n=64,256 <= 2.5", worst <= 2.5,
                   f"worst={worst}, " + ", ".join(f"{k}={v}" for k, v in losses.items() if v))
    assert worst <= 2.5, losses


# -- 6 ---------------------------------------------------------------------------------

def test_criterion_6_strassen_structure():
    counts = {}
    for n in (32, 128, 256):
        ctr = OpCounter()
        matmul_strassen(MPMatrix.zeros("dd", n, n), MPMatrix.zeros("dd", n, n), cutoff=32, counter=ctr)
        counts[n] = ctr
    ok = (counts[128].leaf_calls == 7 ** 2 * counts[32].leaf_calls
          and counts[256].leaf_calls == 7 ** 3 * counts[32].leaf_calls
          and counts[128].muls == 7 ** 2 * counts[32].muls
          and counts[256].muls == 7 ** 3 * counts[32].muls)
    RESULTS.record(6, "Strassen leaf count follows 7^k", ok,
                   f"leaf calls {counts[32].leaf_calls}/{counts[128].leaf_calls}/{counts[256].leaf_calls}, "
                   f"leaf muls {counts[32].muls}/{counts[128].muls}/{counts[256].muls}")
    assert ok


# -- 7 ---------------------------------------------------------------------------------

def test_criterion_7_parallel_determinism():
    mismatched = []
    runs = 0
    for prec in Precision:
        rng = make_rng(1007, prec.width)
        A, B = random_matrix(rng, prec, 256, 256), random_matrix(rng, prec, 256, 256)
        serial_block, serial_strassen = matmul_block(A, B), matmul_strassen(A, B)
        for w in (1, 2, 4, 8):
            runs += 2
            if not matmul_block_parallel(A, B, workers=w).bit_equal(serial_block):
                mismatched.append(f"{prec.name}/block/{w}")
            if not matmul_strassen_parallel(A, B, workers=w).bit_equal(serial_strassen):
                mismatched.append(f"{prec.name}/strassen/{w}")
    RESULTS.record(7, "parallel == serial at n=256, workers 1,2,4,8", not mismatched,
                   f"{runs} runs, mismatches={mismatched or 0}, cpus={os.cpu_count()}")
    assert not mismatched


# -- 8 ---------------------------------------------------------------------------------

def _median_time(fn, reps=3):
    fn()
    ts = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        ts.append(time.perf_counter() - t0)
    return float(np.median(ts))


def test_criterion_8_performance_informational(tmp_path):
    n = int(os.environ.get("MPFKIT_ACCEPT_PERF_N", "256"))
    report = BenchReport()
    ratios = {}
    for prec, target in ((Precision.QD, 2.0), (Precision.DD, 1.8)):
        rng = make_rng(1008, prec.width)
        A, B = random_matrix(rng, prec, n, n), random_matrix(rng, prec, n, n)
        times = {}
        for v in (KernelVariant.NORMAL, KernelVariant.SIMD_LOADSTORE):
            times[v] = _median_time(lambda: matmul_block(A, B, 32, v), reps=1 if n > 512 else 3)
            report.records.append(BenchRecord(f"accept8/{prec.name}/{v.value}", "matmul", "numba" if HAVE_NUMBA
                                              else "numpy", prec.name, "block", v.value, n, 1, times[v], 0.0, 0))
        ratios[f"{prec.name} block n={n}"] = (times[KernelVariant.NORMAL] / times[KernelVariant.SIMD_LOADSTORE],
                                              target)
    vec = 1 << 16
    for mode in MODES:
        rng = make_rng(1009)
        a, b = random_matrix(rng, "qd", 1, vec), random_matrix(rng, "qd", 1, vec)
        with use_backend(mode):
            t = {v: _median_time(lambda: ew_add(a, b, v)) for v in (KernelVariant.NORMAL,
                                                                   KernelVariant.SIMD_LOADSTORE)}
        ratios[f"QD ew_add {mode}"] = (t[KernelVariant.NORMAL] / t[KernelVariant.SIMD_LOADSTORE], 2.0)
    emit_csv(report, tmp_path / "criterion8.csv")
    ok = all(r >= target for r, target in ratios.values())
    RESULTS.record(8, "SIMD load/store vs normal speedup", ok,
                   ", ".join(f"{k}: {r:.2f}x (target {t}x)" for k, (r, t) in ratios.items()), asserted=False)


# -- 9 ---------------------------------------------------------------------------------

def test_criterion_9_td_addition_kinds():
    cfg = BenchConfig(precisions=("td",), variants=("loadstore",), sizes=(1024,), reps=3,
                      ew_min_ops=1 << 16)
    report = run_ewise_bench(cfg)
    kinds = {r.algorithm for r in report.records}
    present = {"td_add_q", "td_add_merge"} <= kinds
    mflops = {r.algorithm: r.mflops for r in report.records}
    faster = mflops.get("td_add_q", 0) >= mflops.get("td_add_merge", float("inf"))
    RESULTS.record(9, "report holds both TD additions", present, f"kinds={sorted(kinds)}")
    RESULTS.entries[9] += (f"; informational td_add_q >= td_add_merge MFLOPS: {'PASS' if faster else 'FAIL'} "
                           f"({mflops.get('td_add_q', 0):.1f} vs {mflops.get('td_add_merge', 0):.1f})")
    print(RESULTS.entries[9])
    assert present


if __name__ == "__main__":
    code = pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"])
    print("\n".join(RESULTS.lines()))
    sys.exit(code)
