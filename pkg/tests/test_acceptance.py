"""Acceptance suite: one criterion per test, printing one PASS/FAIL line each.

Reference values are frozen from the reference result tables.  A handful of
entries are knowingly irreproducible from the defining equations (see the
assertion messages for the numbers): the cutoff-2 fidelity distance, the
mid-table variational angles, a few convergence entries at the reference
tables' own precision floor, and the power-law preference of the naive
energy series.  The corresponding asserts are kept at their stated
tolerances rather than widened; everything derivable passes.
"""

import math
import time

import numpy as np
from scipy.linalg import eigh

from hlvqe.driver import HlvqeOptions, excited_hamiltonian, run, summarize
from hlvqe.model import (
    ModelParams,
    build_effective_hamiltonian,
    build_full_hamiltonian,
    exact_ground_state,
)
from hlvqe.pauli import (
    PauliDecomposition,
    PauliString,
    coeffs_1q,
    decompose,
    reassemble,
)
from hlvqe.qsim import (
    AnalyticBackend,
    SampledBackend,
    measure_pauli,
    parameter_shift_grad,
    prepare_ansatz,
)
from hlvqe.rotations import FullState, project_parity, wigner_d_matrix
from hlvqe.solver import solve_effective, sweep_lambda

P30 = ModelParams.create(30, 1.0, vbar=2.0)

# reference beta values per cutoff (N=30): vbar=2.0 table and vbar=1.2 table
BETA_TABLE_V20 = {
    1: 1.047, 2: 1.047, 3: 1.016, 4: 1.016, 5: 0.977, 6: 0.977,
    7: 0.906, 8: 0.906, 9: 0.791, 10: 0.791, 11: 0.664, 12: 0.664,
    13: 0.538, 14: 0.538, 15: 0.415, 16: 0.415, 17: 0.289, 18: 0.289,
    19: 0.150, 20: 0.150, 21: 0.0, 22: 0.0, 23: 0.0, 24: 0.0, 25: 0.0,
    26: 0.0, 27: 0.0, 28: 0.0, 29: 0.0, 30: 0.0, 31: 0.0,
}
BETA_TABLE_V12 = {1: 0.586, 3: 0.496, 5: 0.371, 7: 0.113, 9: 0.000}

# convergence tables: cutoff -> (naive, effective, projected)
TABLE_N32 = {
    2: (4.1650, 1.6497e-1, 1.6497e-1), 4: (3.4144, 1.5623e-2, 1.5619e-2),
    6: (2.4775, 2.0314e-3, 1.9222e-3), 8: (1.6218, 6.9980e-4, 2.3089e-4),
    10: (9.5918e-1, 5.5488e-4, 2.4225e-5), 12: (4.9318e-1, 5.3602e-4, 4.0713e-6),
    14: (2.0974e-1, 5.3282e-4, 9.5794e-7), 16: (6.9504e-2, 5.3203e-4, 2.3434e-7),
    18: (1.7265e-2, 5.3168e-4, 1.2486e-7), 20: (3.6812e-3, 5.3131e-4, 3.5171e-7),
    22: (8.9597e-4, 5.2763e-4, 1.0558e-5), 24: (7.4972e-5, 7.4972e-5, 7.4972e-5),
    26: (3.7240e-6, 3.7240e-6, 3.7240e-6), 28: (9.6145e-8, 9.6145e-8, 9.6145e-8),
    30: (9.7540e-10, 9.7541e-10, 9.7541e-10), 32: (0.0, 0.0, 0.0),
}
TABLE_N64 = {
    2: (8.1569, 1.5689e-1, 1.5689e-1), 4: (7.4157, 1.3157e-2, 1.3157e-2),
    6: (6.3471, 1.0902e-3, 1.0902e-3), 8: (5.2706, 9.0117e-5, 9.0117e-5),
    10: (4.2615, 7.7929e-6, 7.7886e-6), 12: (3.3392, 8.2237e-7, 7.8705e-7),
    14: (2.5243, 2.0110e-7, 9.6436e-8), 16: (1.8297, 1.4181e-7, 6.4595e-9),
    18: (1.2606, 1.3566e-7, 9.1655e-10), 20: (8.1584e-1, 1.3495e-7, 1.0981e-10),
    22: (4.8843e-1, 1.3486e-7, 1.6069e-11), 24: (2.6531e-1, 1.3485e-7, 2.9514e-12),
    26: (1.2783e-1, 1.3484e-7, 6.7541e-13), 28: (5.3358e-2, 1.3484e-7, 1.8833e-13),
    30: (1.8905e-2, 1.3484e-7, 6.1047e-14), 32: (5.6094e-3, 1.3484e-7, 2.5971e-14),
    34: (1.3850e-3, 1.3484e-7, 8.9075e-15), 36: (2.8397e-4, 1.3484e-7, 9.2551e-15),
    38: (4.8379e-5, 1.3484e-7, 7.0723e-15), 40: (6.9896e-6, 1.3484e-7, 4.9407e-15),
    42: (1.0368e-6, 1.3484e-7, 4.7592e-14), 44: (2.3949e-7, 1.3477e-7, 2.7661e-10),
}


def report(num, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num:2d} {name}: {status}  {detail}", flush=True)


def test_criterion_01_exact_ground_energy():
    t0 = time.perf_counter()
    energy, _ = exact_ground_state(P30)
    dt = time.perf_counter() - t0
    ok = abs(energy + 18.916414) <= 1e-5 and dt < 0.1
    report(1, "exact ground energy", ok, f"E={energy:.6f} ({dt * 1e3:.0f} ms)")
    assert abs(energy + 18.916414) <= 1e-5
    assert dt < 0.1


def test_criterion_02_lambda2_effective_optimum():
    t0 = time.perf_counter()
    sol = solve_effective(P30, 2)
    dt = time.perf_counter() - t0
    checks = {
        "E": abs(sol.energy + 18.750000) <= 1e-6,
        "beta": abs(sol.beta_opt - 1.0471975) <= 1e-6,
        "D_B": abs(sol.bures - 0.1922023) <= 1e-5,
        "time": dt < 1.0,
    }
    report(2, "cutoff-2 effective optimum", all(checks.values()),
           f"E={sol.energy:.7f} beta={sol.beta_opt:.7f} D_B={sol.bures:.7f} "
           f"failed={[k for k, v in checks.items() if not v]}")
    assert checks["E"] and checks["beta"] and checks["time"]
    # The reference fidelity 0.1922023 requires an overlap of 0.9815268 with
    # the even exact state, but no cutoff-2 state (any angle, any amplitude,
    # projected or not, against any vector of the near-degenerate exact
    # ground pair) exceeds 0.98147; the same pipeline reproduces the cutoff-4
    # reference to 1e-7.  Computed value: 0.1948706.
    assert checks["D_B"], (
        f"D_B={sol.bures:.7f} vs reference 0.1922023 (tol 1e-5); "
        "reference is inconsistent with its own defining overlap")


def test_criterion_03_lambda4_effective_optimum():
    t0 = time.perf_counter()
    sol = solve_effective(P30, 4)
    dt = time.perf_counter() - t0
    amp_ref = np.array([0.98516, 0.03901, 0.16711, 0.0])
    amp_err = np.abs(np.abs(sol.state.amplitudes) - amp_ref).max()
    checks = {
        "E": abs(sol.energy + 18.900130) <= 1e-5,
        "beta": abs(sol.beta_opt - 1.0162245) <= 1e-5,
        "amps": amp_err <= 2e-5,
        "D_B": abs(sol.bures - 0.05578) <= 1e-4,
        "time": dt < 1.0,
    }
    report(3, "cutoff-4 effective optimum", all(checks.values()),
           f"E={sol.energy:.6f} beta={sol.beta_opt:.7f} amp_err={amp_err:.1e} "
           f"D_B={sol.bures:.5f}")
    assert all(checks.values()), checks


def test_criterion_04_beta_tables():
    t0 = time.perf_counter()
    bad = []
    for lam, ref in BETA_TABLE_V20.items():
        got = solve_effective(P30, lam).beta_opt
        if abs(got - ref) > 1e-3:
            bad.append(("2.0", lam, round(got, 4), ref))
    p12 = ModelParams.create(30, 1.0, vbar=1.2)
    for lam, ref in BETA_TABLE_V12.items():
        got = solve_effective(p12, lam).beta_opt
        if abs(got - ref) > 1e-3:
            bad.append(("1.2", lam, round(got, 4), ref))
    dt = time.perf_counter() - t0
    report(4, "beta table reproduction", not bad and dt < 10,
           f"{len(bad)} rows off ({dt:.1f} s)" + (f": {bad}" if bad else ""))
    assert dt < 10
    # Mid-table reference angles are not minima of the effective ground
    # eigenvalue: each landscape has a unique minimum (fine-scan verified)
    # at the values reported here, and the energy at the reference angle is
    # strictly higher (e.g. cutoff 17: -18.91553 at 0.568 vs -18.91530 at
    # 0.289).  The same optimizer reproduces the published N=32/64 energy
    # tables (criterion 5) and the 8-digit cutoff-4 angle (criterion 3).
    assert not bad, f"rows deviating from the reference table: {bad}"


def _aic_fits(x, y):
    ly = np.log(y)
    out = {}
    for name, xv in (("exp", np.asarray(x, float)), ("pow", np.log(x))):
        A = np.vstack([np.ones(len(ly)), xv]).T
        coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
        rss = float(((ly - A @ coef) ** 2).sum())
        out[name] = 2 * 2 + len(ly) * math.log(rss / len(ly))
    return out


_SWEEP_CACHE = {}


def _sweep_rows(N):
    if N not in _SWEEP_CACHE:
        table = TABLE_N32 if N == 32 else TABLE_N64
        params = ModelParams.create(N, 1.0, vbar=2.0)
        rows = sweep_lambda(params, sorted(table))
        _SWEEP_CACHE[N] = {r.cutoff: r for r in rows}
    return _SWEEP_CACHE[N]


def test_criterion_05_convergence_tables():
    t0 = time.perf_counter()
    bad = []
    for N, table, rel, floor in ((32, TABLE_N32, 1e-3, 1e-12),
                                 (64, TABLE_N64, 1e-2, 1e-13)):
        rows = _sweep_rows(N)
        for lam, refs in table.items():
            got = rows[lam]
            for name, mine, want in (("naive", got.delta_e_naive, refs[0]),
                                     ("eff", got.delta_e_effective, refs[1]),
                                     ("proj", got.delta_e_projected, refs[2])):
                tol = max(rel * abs(want), floor)
                if abs(mine - want) > tol:
                    bad.append((N, lam, name, f"{mine:.4e}", f"{want:.4e}"))
    dt = time.perf_counter() - t0
    report(5, "convergence tables", not bad and dt < 60,
           f"{len(bad)} entries off ({dt:.1f} s)" + (f": {bad}" if bad else ""))
    assert dt < 60
    # The N=32 cutoff-30/32 rows fail at the 1e-12 floor because the
    # reference table saturates its own precision there: 50-digit arithmetic
    # gives 9.7705e-10 and 1.6493e-12 where the reference prints 9.7540e-10
    # and 0.
    assert not bad, f"entries outside tolerance: {bad}"


def test_criterion_06_exponential_vs_polynomial():
    rows = _sweep_rows(64)
    lams = np.array([2, 4, 6, 8, 10, 12], dtype=float)
    proj = np.array([rows[int(l)].delta_e_projected for l in lams])
    naive = np.array([rows[int(l)].delta_e_naive for l in lams])

    ly = np.log(proj)
    A = np.vstack([np.ones(len(ly)), lams]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - A @ coef
    r2 = 1 - (resid ** 2).sum() / ((ly - ly.mean()) ** 2).sum()

    aic = _aic_fits(lams, naive)
    power_preferred = aic["pow"] < aic["exp"]
    ok = r2 >= 0.98 and power_preferred
    report(6, "exponential vs polynomial regimes", ok,
           f"R2={r2:.5f} AIC(pow)={aic['pow']:.1f} AIC(exp)={aic['exp']:.1f}")
    assert r2 >= 0.98
    # The naive series over this range prefers an exponential under AIC in
    # both log-space least squares and raw nonlinear least squares (also true
    # of the reference values themselves); the power-law preference asserted
    # here is not attainable from the data.
    assert power_preferred, (
        f"AIC prefers exponential for the naive series: "
        f"pow={aic['pow']:.2f} exp={aic['exp']:.2f}")


def test_criterion_07_hlvqe_analytic_production():
    results = {}
    for lam, b0, t0_, tol_e in ((2, 0.2, 0.1, 1e-3), (4, 0.8, 0.0, 5e-3)):
        start = time.perf_counter()
        opts = HlvqeOptions(init_beta=b0, init_theta=t0_, update="plain")
        trace = run(P30, lam, opts)
        dt = time.perf_counter() - start
        last = trace[-1]
        target = -18.75 if lam == 2 else -18.900130
        ok_e = abs(last.energy - target) <= tol_e
        ok_extra = (abs(last.beta - 1.0471975) <= 5e-3 and last.amplitudes[1] <= 5e-3
                    if lam == 2 else last.amplitudes[3] <= 1e-3)
        results[lam] = (ok_e and ok_extra and dt < 5, last.energy, dt)
    ok = all(r[0] for r in results.values())
    report(7, "hl-vqe analytic production configs", ok,
           " ".join(f"L{lam}: E={r[1]:.6f} ({r[2]:.1f} s)"
                    for lam, r in results.items()))
    assert ok, results


def test_criterion_08_hlvqe_sampled_production():
    t0 = time.perf_counter()
    passes2 = passes4 = 0
    n_seeds = 10
    for seed in range(n_seeds):
        opts = HlvqeOptions(init_beta=0.2, init_theta=0.1, update="plain",
                            backend=SampledBackend(100_000, seed=seed))
        s = summarize(run(P30, 2, opts), (70, 80))
        if (abs(s.mean("energy") + 18.7500) <= 0.01
                and s.half_range("A1") <= 5e-3):
            passes2 += 1

        opts = HlvqeOptions(init_beta=0.8, init_theta=0.0, update="plain",
                            backend=SampledBackend(100_000, seed=100 + seed))
        s = summarize(run(P30, 4, opts), (70, 80))
        if (abs(s.mean("energy") + 18.900) <= 0.02
                and s.mean("A3") <= 1e-3):
            passes4 += 1
    dt = time.perf_counter() - t0
    ok = passes2 >= 8 and passes4 >= 8 and dt < 300
    report(8, "hl-vqe sampled production configs", ok,
           f"L2 {passes2}/10, L4 {passes4}/10 ({dt:.0f} s)")
    assert passes2 >= 8, f"cutoff-2 sampled runs: {passes2}/10"
    assert passes4 >= 8, f"cutoff-4 sampled runs: {passes4}/10"
    assert dt < 300


def test_criterion_09_excited_state_gap():
    t0 = time.perf_counter()
    h, _ = coeffs_1q(P30, math.pi / 3)
    decomp = PauliDecomposition(
        1, tuple((PauliString(k), v) for k, v in h.items()), math.pi / 3)
    ground = prepare_ansatz([0.0], 1)
    shifted = excited_hamiltonian(decomp, ground, mu0=10.0)
    w = eigh(reassemble(shifted), eigvals_only=True)
    dt = time.perf_counter() - t0
    ok = abs(w[0] + 16.00) <= 1e-6 and dt < 1.0
    report(9, "excited-state gap via chemical potential", ok,
           f"E1={w[0]:.7f} ({dt * 1e3:.0f} ms)")
    assert abs(w[0] + 16.00) <= 1e-6
    assert dt < 1.0


def test_criterion_10_property_suites():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    failures = []

    # unitary equivalence of spectra at full cutoff
    for _ in range(100):
        N = int(rng.integers(2, 21))
        beta = float(rng.uniform(0, math.pi))
        p = ModelParams.create(N, 1.0, vbar=float(rng.uniform(0.3, 3.0)))
        w_eff = eigh(build_effective_hamiltonian(p, beta, N + 1), eigvals_only=True)
        w_full = eigh(build_full_hamiltonian(p), eigvals_only=True)
        if np.abs(np.sort(w_eff) - np.sort(w_full)).max() >= 1e-9:
            failures.append(("unitary", N, beta))

    # rotation-matrix orthogonality and composition
    for _ in range(100):
        two_j = int(rng.integers(1, 97))
        j = two_j / 2
        b1, b2 = rng.uniform(0, 2 * math.pi, size=2)
        d1 = wigner_d_matrix(j, float(b1))
        if np.abs(d1 @ d1.T - np.eye(two_j + 1)).max() >= 1e-9:
            failures.append(("orthogonality", j, b1))
        if np.abs(d1 @ wigner_d_matrix(j, float(b2))
                  - wigner_d_matrix(j, float(b1 + b2))).max() >= 1e-9:
            failures.append(("composition", j, b1, b2))

    # Pauli round trip
    for k in range(100):
        nq = 1 + k % 6
        dim = 2 ** nq
        A = rng.standard_normal((dim, dim))
        H = (A + A.T) / 2
        if np.abs(reassemble(decompose(H)) - H).max() >= 1e-10:
            failures.append(("roundtrip", nq))

    # parameter-shift rule vs central finite differences
    backend = AnalyticBackend()
    step = 1e-6
    for _ in range(100):
        theta = rng.uniform(-math.pi, math.pi, size=3)
        ops = "".join(rng.choice(list("IXYZ"), size=2))
        if ops == "II":
            ops = "ZX"
        string = PauliString(ops)
        i = int(rng.integers(0, 3))
        got = parameter_shift_grad(theta, i, string, backend)
        up, dn = theta.copy(), theta.copy()
        up[i] += step
        dn[i] -= step
        fd = (measure_pauli(prepare_ansatz(up, 2), string, backend).value
              - measure_pauli(prepare_ansatz(dn, 2), string, backend).value) / (2 * step)
        if abs(got - fd) >= 1e-6:
            failures.append(("shift", ops, i))

    # parity-projection idempotence
    for _ in range(100):
        dim = int(rng.integers(3, 40))
        v = rng.standard_normal(dim)
        v /= np.linalg.norm(v)
        st = FullState(dim - 1, v)
        try:
            once = project_parity(st, "even")
        except Exception:
            continue
        twice = project_parity(once, "even")
        if np.abs(twice.amplitudes - once.amplitudes).max() >= 1e-12:
            failures.append(("projection", dim))

    dt = time.perf_counter() - t0
    ok = not failures and dt < 60
    report(10, "randomized property suites", ok,
           f"{len(failures)} failures ({dt:.1f} s)")
    assert not failures, failures[:5]
    assert dt < 60
