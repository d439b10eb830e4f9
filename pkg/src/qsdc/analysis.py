"""Security quantities for the protocol: fidelity deficit, entropy bound, Holevo
quantity, and exact plus Monte Carlo detection probability.

The central objects are the fidelity deficit gamma = 1 - <ideal|rho|ideal> of
the post-attack state, the entropy of the worst-case diagonal state with that
deficit (the cap on what an eavesdropper can learn), and the per-control-round
detection probability d.  For states diagonal in the GHZ-type basis, d is an
exact linear function of the diagonal weights and satisfies d >= gamma/2, with
equality exactly when no weight sits on the states flagged by both bases;
:func:`detection_bound_audit` reports (rather than asserts) the inequality for
arbitrary states.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .attacks import AttackModel, InterceptResend, apply_attack, apply_attack_sampled, eve_inference
from .protocol import Mode, Transcript, control_flag, run_control_round
from .quantum import (
    Basis,
    DensityOperator,
    ghz_basis,
    ghz_state,
    measure_all_density,
    von_neumann_entropy,
)

BOUND_SLACK = 1e-12

SWEEP_CSV_HEADER = ("attack_label", "param", "gamma", "d_exact", "d_mc", "mc_std_err", "s_max_bits")


@dataclass(frozen=True)
class SecurityReport:
    """Security summary of one post-attack state."""

    gamma: float
    entropy_bound_bits: float
    detection_exact: float
    detection_mc: float | None
    mc_std_error: float | None
    ghz_diagonal_weights: tuple[float, ...]
    bound_satisfied: bool

    def __post_init__(self) -> None:
        weights = self.ghz_diagonal_weights
        if abs(sum(weights) - 1.0) > 1e-10:
            raise ValueError("diagonal weights must sum to 1")
        if abs(self.gamma - (1.0 - weights[0])) > 1e-12:
            raise ValueError("gamma must equal 1 minus the ideal-state weight")

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "entropy_bound_bits": self.entropy_bound_bits,
            "detection_exact": self.detection_exact,
            "detection_mc": self.detection_mc,
            "mc_std_error": self.mc_std_error,
            "ghz_diagonal_weights": list(self.ghz_diagonal_weights),
            "bound_satisfied": self.bound_satisfied,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


@dataclass(frozen=True)
class SweepRow:
    """One grid point of an attack-family sweep."""

    attack_label: str
    param: float | int | None
    gamma: float
    d_exact: float
    d_mc: float | None
    mc_std_err: float | None
    s_max_bits: float

    def to_dict(self) -> dict:
        return {
            "attack_label": self.attack_label,
            "param": self.param,
            "gamma": self.gamma,
            "d_exact": self.d_exact,
            "d_mc": self.d_mc,
            "mc_std_err": self.mc_std_err,
            "s_max_bits": self.s_max_bits,
        }


def _resolve_n(rho: DensityOperator, n: int | None) -> int:
    if n is not None and n != rho.n_qubits:
        raise ValueError(f"state has {rho.n_qubits} qubits, expected {n}")
    return rho.n_qubits


def fidelity_deficit(rho: DensityOperator, n: int | None = None) -> float:
    """gamma = 1 - <ideal|rho|ideal>, the squared-fidelity deficit to the GHZ state."""
    n = _resolve_n(rho, n)
    ideal = ghz_state(n).amplitudes
    overlap = float(np.real(np.vdot(ideal, rho.matrix @ ideal)))
    return min(max(1.0 - overlap, 0.0), 1.0)


def entropy_bound(gamma: float, n: int) -> float:
    """Entropy in bits of the maximal-entropy state with ideal-state weight 1 - gamma.

    That state is diagonal in the GHZ-type basis with entries 1 - gamma on the
    ideal state and gamma/(2**n - 1) on each of the others, giving
    -(1-g) log2(1-g) - g log2(g / (2**n - 1)) with 0 log 0 = 0.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    bits = 0.0
    if gamma < 1.0:
        bits -= (1.0 - gamma) * np.log2(1.0 - gamma)
    if gamma > 0.0:
        bits -= gamma * np.log2(gamma / (2**n - 1))
    return float(bits)


def entropy_bound_check(gamma: float, n: int) -> float:
    """Spectral cross-check of :func:`entropy_bound` via the explicit diagonal operator."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    basis = ghz_basis(n)
    weights = np.full(2**n, gamma / (2**n - 1))
    weights[0] = 1.0 - gamma
    matrix = np.zeros((2**n, 2**n), dtype=complex)
    for w, state in zip(weights, basis):
        matrix += w * np.outer(state.amplitudes, state.amplitudes.conj())
    return von_neumann_entropy(DensityOperator(n, matrix))


def holevo_bound(ensemble: Sequence[tuple[float, DensityOperator]]) -> float:
    """Holevo quantity chi = S(sum p_i rho_i) - sum p_i S(rho_i) in bits."""
    if not ensemble:
        raise ValueError("ensemble must be non-empty")
    probs = [p for p, _ in ensemble]
    if abs(sum(probs) - 1.0) > 1e-10:
        raise ValueError(f"ensemble probabilities must sum to 1, got {sum(probs)!r}")
    n = ensemble[0][1].n_qubits
    if any(rho.n_qubits != n for _, rho in ensemble):
        raise ValueError("ensemble members must share one qubit count")
    average = DensityOperator(n, sum(p * rho.matrix for p, rho in ensemble))
    return von_neumann_entropy(average) - sum(
        p * von_neumann_entropy(rho) for p, rho in ensemble
    )


def detection_probability_exact(rho: DensityOperator, n: int | None = None) -> float:
    """Per-control-round detection probability, exact from Born statistics.

    The control basis is uniform over Bz and Bx, so d is the mean of the two
    per-basis flag probabilities (Bz: outcomes not all equal; Bx: outcome
    product -1).
    """
    n = _resolve_n(rho, n)
    total = 0.0
    for basis in (Basis.BZ, Basis.BX):
        table = measure_all_density(rho, basis)
        total += sum(p for tup, p in table.items() if control_flag(basis, tup))
    return min(total / 2.0, 1.0)


def ghz_diagonal_weights(rho: DensityOperator, n: int | None = None) -> np.ndarray:
    """Diagonal of rho in the GHZ-type basis; sums to 1."""
    n = _resolve_n(rho, n)
    return np.array(
        [
            float(np.real(np.vdot(state.amplitudes, rho.matrix @ state.amplitudes)))
            for state in ghz_basis(n)
        ]
    )


def basis_detection_rates(n: int) -> np.ndarray:
    """Exact detection probability of each GHZ-type basis state.

    The ideal state is never flagged; every other basis state fails the Bz
    coincidence test with certainty unless it shares the ideal support, and
    odd-sign states fail the Bx parity test with certainty, so the rate is
    (pair != 0)/2 + (sign)/2.
    """
    rates = np.empty(2**n)
    for i in range(2**n):
        pair, sign = divmod(i, 2)
        rates[i] = (0.0 if pair == 0 else 0.5) + (0.5 if sign else 0.0)
    return rates


def detection_bound_audit(
    rho: DensityOperator, n: int | None = None
) -> tuple[float, float, bool]:
    """(gamma, d, d >= gamma/2 within slack) for an arbitrary state.

    The inequality is a theorem for GHZ-diagonal states; for general states it
    is reported, not asserted.
    """
    n = _resolve_n(rho, n)
    gamma = fidelity_deficit(rho, n)
    d = detection_probability_exact(rho, n)
    return gamma, d, d >= gamma / 2.0 - BOUND_SLACK


def monte_carlo_detection(
    attack: AttackModel, rounds: int, seed, n: int
) -> tuple[float, float]:
    """Empirical detection probability over seeded control rounds.

    Runs the protocol engine's control round on fresh sampled-attack states
    and returns (flag frequency, binomial standard error).  Deterministic for
    a fixed seed.
    """
    if rounds < 1:
        raise ValueError(f"rounds must be >= 1, got {rounds}")
    rng = np.random.default_rng(seed)
    ideal = ghz_state(n)
    flagged = 0
    for index in range(rounds):
        post = apply_attack_sampled(attack, ideal, rng)
        round_ = run_control_round(post, rng, index=index + 1, pre_attack_state=ideal)
        flagged += bool(round_.detection_flag)
    d_hat = flagged / rounds
    return d_hat, float(np.sqrt(d_hat * (1.0 - d_hat) / rounds))


def security_report(
    rho: DensityOperator,
    n: int | None = None,
    *,
    attack: AttackModel | None = None,
    mc_rounds: int | None = None,
    seed: int = 0,
) -> SecurityReport:
    """Assemble the full security summary of a post-attack state.

    Monte Carlo columns are filled only when both an attack model and a round
    count are supplied.
    """
    n = _resolve_n(rho, n)
    weights = ghz_diagonal_weights(rho, n)
    gamma = 1.0 - float(weights[0])
    d_exact = detection_probability_exact(rho, n)
    d_mc, std_err = (None, None)
    if attack is not None and mc_rounds:
        d_mc, std_err = monte_carlo_detection(attack, mc_rounds, seed, n)
    return SecurityReport(
        gamma=gamma,
        entropy_bound_bits=entropy_bound(gamma, n),
        detection_exact=d_exact,
        detection_mc=d_mc,
        mc_std_error=std_err,
        ghz_diagonal_weights=tuple(float(w) for w in weights),
        bound_satisfied=d_exact >= gamma / 2.0 - BOUND_SLACK,
    )


def sweep(
    attack_family: Callable[[object], AttackModel],
    grid: Sequence,
    n: int,
    seed: int,
    *,
    label: str = "attack",
    mc_rounds: int | None = None,
) -> list[SweepRow]:
    """Evaluate an attack family over a parameter grid; rows come back sorted by gamma.

    Monte Carlo columns use a per-row seed derived purely from (seed, row
    index), so results do not depend on evaluation order.
    """
    if not list(grid):
        raise ValueError("sweep grid is empty")
    ideal = ghz_state(n)
    rows = []
    for i, param in enumerate(grid):
        model = attack_family(param)
        rho = apply_attack(model, ideal)
        gamma = fidelity_deficit(rho, n)
        d_mc, std_err = (None, None)
        if mc_rounds:
            d_mc, std_err = monte_carlo_detection(model, mc_rounds, [seed, i], n)
        rows.append(
            SweepRow(
                attack_label=label,
                param=param,
                gamma=gamma,
                d_exact=detection_probability_exact(rho, n),
                d_mc=d_mc,
                mc_std_err=std_err,
                s_max_bits=entropy_bound(gamma, n),
            )
        )
    rows.sort(key=lambda row: row.gamma)
    return rows


def write_sweep_csv(rows: Sequence[SweepRow], path) -> None:
    """Write sweep rows with the fixed header; empty cells for absent Monte Carlo columns."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(SWEEP_CSV_HEADER)
        for row in rows:
            record = row.to_dict()
            writer.writerow(["" if record[key] is None else record[key] for key in SWEEP_CSV_HEADER])


def eve_accuracy(model: AttackModel, transcript: Transcript) -> float | None:
    """Fraction of message rounds where Eve's inferred bit equals the sent bit.

    None when the attack leaves Eve no usable record or no message rounds ran.
    """
    guesses = []
    bit_pos = 0
    for round_ in transcript.rounds:
        if round_.mode is not Mode.MESSAGE:
            continue
        sent = transcript.config.message_bits[bit_pos]
        bit_pos += 1
        guess = eve_inference(model, round_)
        if guess is not None:
            guesses.append(guess == sent)
    if not guesses:
        return None
    return sum(guesses) / len(guesses)


def intercept_resend_models(n: int) -> list[InterceptResend]:
    """Convenience catalog: single-qubit Bz intercepts on each travel qubit."""
    return [InterceptResend(Basis.BZ, (q,)) for q in range(1, n)]
