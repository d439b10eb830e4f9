"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines; every tolerance and runtime budget is enforced in the assertions.
"""

import json
import time

import numpy as np

from qsdc.analysis import (
    basis_detection_rates,
    detection_probability_exact,
    entropy_bound,
    entropy_bound_check,
    fidelity_deficit,
    holevo_bound,
    monte_carlo_detection,
)
from qsdc.attacks import Depolarize, GhzPauli, InterceptResend, NoAttack, apply_attack
from qsdc.cli import main
from qsdc.quantum import Basis, DensityOperator, ghz_basis, ghz_state, measure_all_density

SQ2 = 1.0 / np.sqrt(2.0)

# three-qubit basis support: index -> {amplitude position: sign}, position bit k = qubit k
THREE_QUBIT_BASIS = {
    0: {0: +1, 7: +1},
    1: {0: +1, 7: -1},
    2: {1: +1, 6: +1},
    3: {1: +1, 6: -1},
    4: {2: +1, 5: +1},
    5: {2: +1, 5: -1},
    6: {4: +1, 3: +1},
    7: {4: +1, 3: -1},
}


def _report(criterion: int, description: str, ok: bool) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {description}")
    assert ok, f"criterion {criterion} failed: {description}"


def test_criterion_1_basis_reproduction():
    start = time.perf_counter()
    basis = ghz_basis(3)
    exact = True
    for index, support in THREE_QUBIT_BASIS.items():
        amps = basis[index].amplitudes
        for position in range(8):
            expected = support.get(position, 0) * SQ2
            exact &= abs(amps[position] - expected) < 1e-15
    stacked = np.array([state.amplitudes for state in basis])
    gram_ok = np.max(np.abs(stacked.conj() @ stacked.T - np.eye(8))) <= 1e-12
    elapsed = time.perf_counter() - start
    _report(
        1,
        f"basis amplitudes exact, Gram = identity within 1e-12, {elapsed:.3f}s < 1s",
        exact and gram_ok and elapsed < 1.0,
    )


def test_criterion_2_outcome_tables():
    basis = ghz_basis(3)
    ok = True
    for index, expected_product in ((0, +1), (1, -1)):
        table = measure_all_density(basis[index].density(), Basis.BX)
        for outcomes, probability in table.items():
            want = 0.25 if int(np.prod(outcomes)) == expected_product else 0.0
            ok &= abs(probability - want) <= 1e-12
        ok &= sum(1 for p in table.values() if p > 1e-12) == 4
    _report(2, "Bx product tables: four +1 tuples and four -1 tuples, each 1/4 within 1e-12", ok)


def test_criterion_3_entropy_bound():
    start = time.perf_counter()
    ok = entropy_bound(0.0, 3) == 0.0
    for gamma in np.linspace(0.0, 1.0, 100):
        ok &= abs(entropy_bound(gamma, 3) - entropy_bound_check(gamma, 3)) <= 1e-10
    ok &= abs(entropy_bound(7 / 8, 3) - 3.0) <= 1e-12
    elapsed = time.perf_counter() - start
    _report(
        3,
        f"S(0)=0, spectral match on 100-point grid within 1e-10, S(7/8)=3 bits, {elapsed:.3f}s < 1s",
        ok and elapsed < 1.0,
    )


def test_criterion_4_detection_bound():
    start = time.perf_counter()
    basis = ghz_basis(3)
    rates = basis_detection_rates(3)
    projectors = [state.density().matrix for state in basis]
    rng = np.random.default_rng(2718)
    ok = True
    equality_seen = False
    for trial in range(1000):
        weights = rng.dirichlet(np.ones(8))
        if trial % 4 == 0:  # force the equality case w3 = w5 = w7 = 0
            weights[[3, 5, 7]] = 0.0
            weights = weights / weights.sum()
        rho = DensityOperator(3, sum(w * p for w, p in zip(weights, projectors)))
        d = detection_probability_exact(rho)
        gamma = fidelity_deficit(rho)
        ok &= abs(d - float(weights @ rates)) <= 1e-10
        ok &= d >= gamma / 2.0 - 1e-10
        if weights[3] == 0.0 and weights[5] == 0.0 and weights[7] == 0.0:
            equality_seen = True
            ok &= abs(d - gamma / 2.0) <= 1e-10
    elapsed = time.perf_counter() - start
    _report(
        4,
        "1000 random diagonal states: d = w.(0,1/2,1/2,1,1/2,1,1/2,1) and d >= gamma/2, "
        f"equality when w3=w5=w7=0, {elapsed:.2f}s < 10s",
        ok and equality_seen and elapsed < 10.0,
    )


def test_criterion_5_attack_oracles():
    ideal = ghz_state(3)
    rho = apply_attack(InterceptResend(Basis.BZ, (1,)), ideal)
    gamma = fidelity_deficit(rho)
    d_ir = detection_probability_exact(rho)
    d_g1 = detection_probability_exact(apply_attack(GhzPauli(1), ideal))
    d_g3 = detection_probability_exact(apply_attack(GhzPauli(3), ideal))
    ok = (
        abs(gamma - 0.5) <= 1e-12
        and abs(d_ir - 0.25) <= 1e-12
        and abs(d_g1 - 0.5) <= 1e-12
        and abs(d_g3 - 1.0) <= 1e-12
    )
    _report(
        5,
        "intercept-resend gamma=1/2 d=1/4 (bound equality), flip families d=1/2 and d=1, 1e-12",
        ok,
    )


def test_criterion_6_monte_carlo_consistency():
    cases = [
        (NoAttack(), 11),
        (GhzPauli(1), 12),
        (GhzPauli(3), 13),
        (InterceptResend(Basis.BZ, (1,)), 14),
        (Depolarize(0.3, (1,)), 15),
    ]
    ideal = ghz_state(3)
    start = time.perf_counter()
    ok = True
    details = []
    for model, seed in cases:
        d_exact = detection_probability_exact(apply_attack(model, ideal))
        d_hat, std_err = monte_carlo_detection(model, 100_000, seed, 3)
        ok &= abs(d_hat - d_exact) <= 4.0 * std_err + 1e-12
        details.append(f"{model.label}:{d_hat:.4f}~{d_exact:.4f}")
    elapsed = time.perf_counter() - start
    _report(
        6,
        f"1e5 control rounds within 4 sigma for 5 attacks ({'; '.join(details)}), "
        f"{elapsed:.1f}s < 30s",
        ok and elapsed < 30.0,
    )


def test_criterion_7_protocol_correctness(tmp_path):
    rng = np.random.default_rng(64)
    message = "".join(str(b) for b in rng.integers(0, 2, size=64))
    ok = True
    for n in (3, 4, 5):
        first, second = tmp_path / f"a{n}.json", tmp_path / f"b{n}.json"
        argv = lambda path: ["run", "--n", str(n), "--c", "0", "--message", message,
                             "--seed", "20", "--out", str(path)]
        ok &= main(argv(first)) == 0
        ok &= main(argv(second)) == 0
        data = json.loads(first.read_text())
        ok &= data["decoded_message"] == [[int(b) for b in message]] * (n - 1)
        ok &= first.read_bytes() == second.read_bytes()
    _report(7, "64-bit message decodes perfectly at n=3,4,5; reruns byte-identical", ok)


def test_criterion_8_abort_behavior(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    argv = lambda path: ["run", "--n", "3", "--c", "1", "--attack", "ghz_pauli:i=3",
                         "--message", "1", "--seed", "0", "--out", str(path)]
    code_a = main(argv(first))
    code_b = main(argv(second))
    data = json.loads(first.read_text())
    ok = (
        code_a == 2
        and code_b == 2
        and data["aborted"] is True
        and data["abort_round"] == 1
        and first.read_bytes() == second.read_bytes()
    )
    _report(8, "control-only session with a double deviation aborts at round 1 with exit 2", ok)


def test_criterion_9_holevo_shannon():
    basis = ghz_basis(3)
    rng = np.random.default_rng(9)
    ok = True
    for size in (2, 3, 4):
        probs = rng.dirichlet(np.ones(size))
        ensemble = [(float(p), basis[i].density()) for i, p in enumerate(probs)]
        shannon = float(-np.sum(probs * np.log2(probs)))
        ok &= abs(holevo_bound(ensemble) - shannon) <= 1e-10
    _report(9, "orthogonal pure ensembles reproduce the Shannon entropy of their weights, 1e-10", ok)
