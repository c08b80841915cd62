"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from envcap.capacity import (OptimizerConfig, chi_H_tensor, conf_lower_bound, conf_product_capacity,
                             continuity_bound, epsilon0, equal_distance_gap, holevo_chi,
                             holevo_chi_fixed_states, uncertainty_bound, uncertainty_f)
from envcap.channels import (PAULI_X, BipartiteUnitary, QuantumChannel, apply_channel, cnot,
                             controlled_unitary, dcnot, effective_channel, shor_augment, swap_operator,
                             uc2_blocks, weyl)
from envcap.experiments import (ancilla_equality_sweep, conjugate_pair_conferencing, haar_unitary,
                                superadditivity_qutrit, superadditivity_weyl)
from envcap.linalg import partial_trace, proj
from envcap.qinfo import binary_entropy, relative_entropy, trace_norm, von_neumann_entropy
from envcap.twoqubit import (KrausCiracParams, canonical_unitary, conferencing_code_two_qubit,
                             kraus_cirac_angles)

from conftest import random_density, random_pure, record

HALF_PI = math.pi / 2


def finish(label, ok, detail, elapsed, limit):
    within = elapsed < limit
    record(label, ok and within, f"{detail}; {elapsed:.2f} s (limit {limit:g} s)")
    assert ok, detail
    assert within, f"runtime {elapsed:.1f} s over {limit} s"


def test_ac01_canonical_corners():
    t0 = time.perf_counter()
    cases = [(np.eye(4), (0, 0, 0)), (cnot(), (HALF_PI, 0, 0)), (dcnot(), (HALF_PI, HALF_PI, 0)),
             (swap_operator(2, 2), (HALF_PI, HALF_PI, HALF_PI))]
    err = max(np.max(np.abs(np.array(kraus_cirac_angles(g).as_tuple()) - e)) for g, e in cases)
    finish("AC1 canonical corners", err <= 1e-8, f"max error {err:.2e}", time.perf_counter() - t0, 1)


def test_ac02_round_trip_and_local_invariance():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    rt = inv = 0.0
    for k in range(100):
        p = KrausCiracParams(*sorted(rng.uniform(0, HALF_PI, 3), reverse=True))
        u = canonical_unitary(p).matrix
        got = np.array(kraus_cirac_angles(u).as_tuple())
        rt = max(rt, np.max(np.abs(got - p.as_tuple())))
        local = np.kron(haar_unitary(2, 5 * k + 1), haar_unitary(2, 5 * k + 2))
        local2 = np.kron(haar_unitary(2, 5 * k + 3), haar_unitary(2, 5 * k + 4))
        inv = max(inv, np.max(np.abs(np.array(kraus_cirac_angles(local @ u @ local2).as_tuple()) - got)))
    finish("AC2 round trip and local invariance", rt <= 1e-8 and inv <= 1e-8,
           f"round trip {rt:.2e}, local invariance {inv:.2e}", time.perf_counter() - t0, 30)


def test_ac03_controlled_closed_form():
    t0 = time.perf_counter()
    cfg = OptimizerConfig(restarts=64, seed=0)
    worst, parts = 0.0, []
    swap_err = None
    for u in (0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, HALF_PI):
        est = chi_H_tensor(controlled_unitary(uc2_blocks(u)), cfg)
        ref = binary_entropy((1 + math.sin(u)) / 2)
        worst = max(worst, abs(est.bits - ref))
        parts.append(f"{est.bits:.6f}")
        if u == HALF_PI:
            swap_err = abs(est.bits)
    ok = worst <= 1e-3 and swap_err <= 1e-6
    finish("AC3 two-qubit CQ closed form", ok,
           f"estimates {', '.join(parts)}; max gap {worst:.2e}; u=pi/2 value {swap_err:.1e}",
           time.perf_counter() - t0, 300)


def test_ac04_superadditivity_qutrit():
    rep = superadditivity_qutrit(restarts=256, seed=0)
    m = {x.name: x for x in rep.measurements}
    gram = m["gram deviation of (I⊗V_i)|Phi>"].value
    rate = m["rate of SWAP⊗V_c with entangled helper"].value
    margin = m["margin log2(3) - estimate"].value
    ok = rep.passed and gram <= 1e-12 and abs(rate - math.log2(3)) <= 1e-12 and margin > 0
    finish("AC4 qutrit super-additivity", ok,
           f"gram deviation {gram:.1e}, rate {rate:.12f}, standalone "
           f"{m['chi_H_tensor(V_c) estimate'].value:.6f} (margin {margin:.4f})", rep.runtime, 600)


def test_ac05_superadditivity_weyl():
    t0 = time.perf_counter()
    details, ok = [], True
    for d in (2, 3):
        rep = superadditivity_weyl(d)
        m = {x.name: x for x in rep.measurements}
        ok &= rep.passed
        ok &= m["gram deviation of (I⊗W(x,z))|Phi>"].value <= 1e-12
        ok &= abs(m["standalone achiever rate"].value - math.log2(d)) <= 1e-6
        ok &= abs(m["rate of SWAP⊗V_c with entangled helper"].value - 2 * math.log2(d)) <= 1e-12
        details.append(f"d={d}: gram {m['gram deviation of (I⊗W(x,z))|Phi>'].value:.1e}, "
                       f"alone {m['standalone achiever rate'].value:.9f}")
    finish("AC5 Weyl super-additivity", ok, "; ".join(details), time.perf_counter() - t0, 120)


def test_ac06_two_qubit_conferencing_code():
    t0 = time.perf_counter()
    worst_ratio = worst_dist = 0.0
    for seed in range(100):
        code = conferencing_code_two_qubit(haar_unitary(4, seed))
        worst_ratio = max(worst_ratio, max(code.schmidt_ratios))
        worst_dist = max(worst_dist, abs(code.trace_distance - 2))
    ok = worst_ratio <= 1e-9 and worst_dist <= 1e-9
    finish("AC6 two-qubit conferencing code", ok,
           f"max Schmidt ratio {worst_ratio:.1e}, max |distance - 2| {worst_dist:.1e}",
           time.perf_counter() - t0, 60)


def test_ac07_conjugate_pair():
    t0 = time.perf_counter()
    ok, details = True, []
    for d in (2, 3):
        rep = conjugate_pair_conferencing(d, seed=d, restarts=16)
        m = {x.name: x for x in rep.measurements}
        s = m["output entropy on Phi^{AA'} ⊗ Phi^{EE'}"].value
        fix = m["|(V⊗V*)Phi - Phi|_max"].value
        ok &= s <= 1e-9 and fix <= 1e-10
        details.append(f"d={d}: entropy {s:.1e}, fixed point {fix:.1e}")
    finish("AC7 conjugate pair", ok, "; ".join(details), time.perf_counter() - t0, 600)


def test_ac08_shor_augmentation():
    t0 = time.perf_counter()
    d = 2
    w = BipartiteUnitary(haar_unitary(4, 8), 2, 2, 2, 2)
    aug = shor_augment(w)
    eta = np.array([0.6, 0.8j])
    base = effective_channel(w, eta)
    worst = 0.0
    dim = d * d * d
    for r in range(dim):
        for c in range(dim):
            unit = np.zeros((dim, dim), dtype=complex)
            unit[r, c] = 1
            # oracle: the dilation itself, traced over F⊗L
            full = aug.matrix @ np.kron(unit, proj(eta)) @ aug.matrix.conj().T
            direct = partial_trace(full, (aug.dim_b, aug.dim_f), [0])
            lr, i = divmod(r, d)
            lc, j = divmod(c, d)
            expected = np.zeros((d, d), dtype=complex)
            if lr == lc:
                op = weyl(d, *divmod(lr, d))
                expected = op @ apply_channel(base, np.outer(np.eye(d)[i], np.eye(d)[j])) @ op.conj().T
            worst = max(worst, float(np.max(np.abs(direct - expected))))
    conf = conf_product_capacity(shor_augment(swap_operator(2, 2)), OptimizerConfig(restarts=16))
    ok = worst <= 1e-9 and abs(conf.bits - 1) <= 1e-3
    finish("AC8 Shor augmentation", ok, f"augmentation identity residual {worst:.1e}; conf(SWAP^aug) {conf.bits:.6f}",
           time.perf_counter() - t0, 600)


def test_ac09_ancilla_equality():
    rep = ancilla_equality_sweep(samples=50, seed=0, restarts=16, free_p_instances=10)
    m = {x.name: x for x in rep.measurements}
    fixed, free = m["max gap, fixed p"].value, m["max gap, optimized p"].value
    finish("AC9 ancilla equality", rep.passed and fixed <= 2e-4 and free <= 5e-4,
           f"fixed-p gap {fixed:.1e}, optimized-p gap {free:.1e}", rep.runtime, 600)


def test_ac10_bounds_suite():
    t0 = time.perf_counter()
    positive = all(uncertainty_bound(d) > 0 for d in range(2, 17))
    root = max(abs(uncertainty_f(epsilon0(d), d)) for d in range(2, 17))
    cont = continuity_bound(0, 2) == 0 and continuity_bound(0, 7) == 0
    floor = conf_lower_bound(2, 2)
    cfg = OptimizerConfig(restarts=4, seed=0)
    measured = [conf_product_capacity(BipartiteUnitary(haar_unitary(4, 500 + s), 2, 2, 2, 2), cfg).bits
                for s in range(50)]
    ok = positive and root <= 1e-9 and cont and floor <= min(measured)
    finish("AC10 bounds suite", ok,
           f"f(eps0) residual {root:.1e}; conf floor {floor:.3e} <= min measured {min(measured):.6f}",
           time.perf_counter() - t0, 300)


def test_ac11_property_suites():
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    failures = []

    pinsker = 0.0
    for k in range(1000):
        d = 2 + k % 3
        a, b = random_density(rng, d, rank=1 + k % d), random_density(rng, d)
        pinsker = max(pinsker, trace_norm(a - b) ** 2 / (2 * math.log(2)) - relative_entropy(a, b))
    if pinsker > 1e-12:
        failures.append("pinsker")

    cert = 0.0
    channels = [QuantumChannel.from_kraus([np.eye(2)]),
                QuantumChannel.from_kraus([np.diag([1.0, 0]), np.diag([0, 1.0])]),
                QuantumChannel.from_kraus([math.sqrt(0.7) * np.eye(2), math.sqrt(0.3) * PAULI_X]),
                effective_channel(BipartiteUnitary(haar_unitary(4, 1), 2, 2, 2, 2), random_pure(rng, 2))]
    for n in channels:
        est = holevo_chi(n, OptimizerConfig(restarts=8))
        states = np.array([apply_channel(n, proj(a)) for a in est.achiever["inputs"]])
        probs = np.asarray(est.achiever["probs"])
        chi, div = equal_distance_gap(states, probs)
        avg = np.tensordot(probs, states, axes=1)
        probe = max(relative_entropy(apply_channel(n, proj(random_pure(rng, 2))), avg) for _ in range(1000))
        cert = max(cert, float(np.max(np.abs(div[probs > 1e-12] - chi))), probe - chi)
    if cert > 1e-6:
        failures.append("equal-distance")

    inv = 0.0
    for k in range(50):
        rho, u = random_density(rng, 5), haar_unitary(5, k)
        inv = max(inv, abs(von_neumann_entropy(rho) - von_neumann_entropy(u @ rho @ u.conj().T)))
    if inv > 1e-9:
        failures.append("unitary invariance")

    comp = 0.0
    for _ in range(50):
        rho = random_density(rng, 12)
        step = partial_trace(partial_trace(rho, (2, 3, 2), [0, 2]), (2, 2), [0])
        comp = max(comp, float(np.max(np.abs(step - partial_trace(rho, (2, 3, 2), [0])))))
    if comp > 1e-12:
        failures.append("partial trace")

    drop = 0.0
    for _ in range(50):
        hist = []
        holevo_chi_fixed_states([proj(random_pure(rng, 3)) for _ in range(5)], history=hist)
        drop = max([drop] + [a - b for a, b in zip(hist, hist[1:])])
    if drop > 1e-12:
        failures.append("monotone ascent")

    finish("AC11 property suites", not failures,
           f"pinsker slack {pinsker:.1e}, certificate {cert:.1e}, invariance {inv:.1e}, "
           f"composition {comp:.1e}, largest ascent drop {drop:.1e}"
           + (f"; failed: {', '.join(failures)}" if failures else ""), time.perf_counter() - t0, 120)


def test_ac12_declared_not_reproducible():
    # regularized capacities, concentration constants and the asymptotic "<= 2.5" statement are
    # out of reach at this scale; the experiments only record statistics for them
    record("AC12 regularized/asymptotic claims", True,
           "declared not reproducible; covered by recorded statistics only", status="DECLARED")
    pytest.skip("declared not reproducible at desk scale")
