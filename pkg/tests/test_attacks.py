import numpy as np
import pytest

from qsdc.attacks import (
    Depolarize,
    GhzPauli,
    InterceptResend,
    KrausCustom,
    NoAttack,
    WSubstitution,
    apply_attack,
    apply_attack_sampled,
    attack_channel,
    attack_from_dict,
    attack_to_dict,
    eve_inference,
    parse_attack,
    parse_attack_family,
)
from qsdc.protocol import run_control_round, run_message_round
from qsdc.quantum import (
    Basis,
    DensityOperator,
    apply_channel,
    fidelity_to_target,
    ghz_basis_state,
    ghz_state,
    measure_all,
    measure_all_density,
    w_state,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)

GHZ3 = ghz_state(3)

CATALOG = [
    NoAttack(),
    GhzPauli(1),
    GhzPauli(3),
    GhzPauli(6),
    InterceptResend(Basis.BZ, (1,)),
    InterceptResend(Basis.BX, (1, 2)),
    Depolarize(0.3, (1,)),
    Depolarize(0.8, (1, 2)),
    KrausCustom((np.sqrt(0.6) * I2, np.sqrt(0.4) * X), (2,)),
    WSubstitution(),
]


def kron_on_qubit(op: np.ndarray, qubit: int, n: int) -> np.ndarray:
    full = np.array([[1.0 + 0j]])
    for q in reversed(range(n)):
        full = np.kron(full, op if q == qubit else I2)
    return full


# --- exact channel outputs -------------------------------------------------


def test_no_attack_returns_ideal_projector():
    out = apply_attack(NoAttack(), GHZ3)
    assert np.max(np.abs(out.matrix - GHZ3.density().matrix)) < 1e-14


def test_ghz_pauli_two_flips_reaches_index_two():
    out = apply_attack(GhzPauli(2), GHZ3)
    assert np.max(np.abs(out.matrix - ghz_basis_state(3, 2).density().matrix)) < 1e-12


@pytest.mark.parametrize("n", [3, 4])
def test_ghz_pauli_hits_every_basis_state(n):
    ideal = ghz_state(n)
    for index in range(1, 2**n):
        out = apply_attack(GhzPauli(index), ideal)
        assert fidelity_to_target(out, ghz_basis_state(n, index)) == pytest.approx(1.0, abs=1e-12)


def test_ghz_pauli_trajectory_matches_basis_amplitudes():
    rng = np.random.default_rng(0)
    for index in range(1, 8):
        state = apply_attack_sampled(GhzPauli(index), GHZ3, rng)
        assert np.max(np.abs(state.amplitudes - ghz_basis_state(3, index).amplitudes)) < 1e-12


def test_intercept_resend_bz_one_qubit_channel():
    out = apply_attack(InterceptResend(Basis.BZ, (1,)), GHZ3)
    expected = np.zeros((8, 8), dtype=complex)
    expected[0, 0] = expected[7, 7] = 0.5
    assert np.max(np.abs(out.matrix - expected)) < 1e-12


def test_intercept_resend_all_travel_gives_half_overlap():
    out = apply_attack(InterceptResend(Basis.BZ, (1, 2)), GHZ3)
    overlap = np.real(np.vdot(GHZ3.amplitudes, out.matrix @ GHZ3.amplitudes))
    assert overlap == pytest.approx(0.5, abs=1e-12)


def test_depolarize_full_strength_oracle():
    # p = 1 replaces the qubit by the maximally mixed state:
    # rho -> (rho + X rho X + Y rho Y + Z rho Z) / 4
    rho = GHZ3.density().matrix
    oracle = np.zeros_like(rho)
    for op in (I2, X, Y, Z):
        full = kron_on_qubit(op, 1, 3)
        oracle += full @ rho @ full.conj().T / 4.0
    out = apply_attack(Depolarize(1.0, (1,)), GHZ3)
    assert np.max(np.abs(out.matrix - oracle)) < 1e-12


def test_kraus_custom_equals_direct_channel():
    kraus = (np.sqrt(0.6) * I2, np.sqrt(0.4) * X)
    out = apply_attack(KrausCustom(kraus, (2,)), GHZ3)
    direct = apply_channel(GHZ3.density(), kraus, (2,))
    assert np.max(np.abs(out.matrix - direct.matrix)) < 1e-14


def test_w_substitution_returns_w_projector():
    out = apply_attack(WSubstitution(), GHZ3)
    assert np.max(np.abs(out.matrix - w_state(3).density().matrix)) < 1e-14


@pytest.mark.parametrize("model", CATALOG, ids=lambda m: m.label)
def test_attack_outputs_are_valid_density_operators(model):
    out = apply_attack(model, GHZ3)
    assert abs(np.trace(out.matrix).real - 1.0) < 1e-10
    assert np.max(np.abs(out.matrix - out.matrix.conj().T)) < 1e-12
    assert np.linalg.eigvalsh(out.matrix)[0] > -1e-9


# --- trajectory agreement ---------------------------------------------------


@pytest.mark.parametrize("model", CATALOG, ids=lambda m: m.label)
@pytest.mark.parametrize("basis", [Basis.BZ, Basis.BX])
def test_trajectories_match_channel_statistics(model, basis):
    # sampled route vs exact ensemble: outcome frequencies within 4 sigma
    exact = measure_all_density(apply_attack(model, GHZ3), basis)
    rng = np.random.default_rng(99)
    shots = 4000
    counts: dict[tuple[int, ...], int] = {}
    for _ in range(shots):
        state = apply_attack_sampled(model, GHZ3, rng)
        outcomes = measure_all(state, basis, rng).outcomes
        counts[outcomes] = counts.get(outcomes, 0) + 1
    for outcomes, probability in exact.items():
        observed = counts.get(outcomes, 0)
        sigma = np.sqrt(shots * probability * (1.0 - probability))
        assert abs(observed - shots * probability) <= 4.0 * sigma + 1e-9


def test_trajectories_are_normalized_pure_states():
    rng = np.random.default_rng(17)
    for model in CATALOG:
        for _ in range(5):
            state = apply_attack_sampled(model, GHZ3, rng)
            assert np.sum(np.abs(state.amplitudes) ** 2) == pytest.approx(1.0, abs=1e-12)


# --- travel-only restriction -------------------------------------------------


def test_attacks_commute_with_alice_unitaries():
    # channels restricted to travel qubits commute with anything on qubit 0;
    # WSubstitution replaces the whole state (input independent) so it is
    # exercised by the detection tests instead
    rng = np.random.default_rng(23)
    travel_local = [m for m in CATALOG if not isinstance(m, WSubstitution)]
    rho = GHZ3.density()
    for _ in range(3):
        u, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
        full = kron_on_qubit(u, 0, 3)
        rotated = DensityOperator(3, full @ rho.matrix @ full.conj().T)
        for model in travel_local:
            before = attack_channel(model, rotated)
            after_matrix = attack_channel(model, rho).matrix
            after = full @ after_matrix @ full.conj().T
            assert np.max(np.abs(before.matrix - after)) < 1e-10, model.label


def test_attacks_reject_alice_qubit():
    with pytest.raises(ValueError):
        InterceptResend(Basis.BZ, (0,))
    with pytest.raises(ValueError):
        Depolarize(0.5, (0, 1))
    with pytest.raises(ValueError):
        KrausCustom((I2,), (0,))


def test_attack_parameter_validation():
    with pytest.raises(ValueError):
        GhzPauli(0)
    with pytest.raises(ValueError):
        Depolarize(1.5, (1,))
    with pytest.raises(ValueError):
        KrausCustom((0.5 * I2,), (1,))  # not trace preserving
    with pytest.raises(ValueError):
        apply_attack(GhzPauli(8), GHZ3)  # index out of range for n=3
    with pytest.raises(ValueError):
        apply_attack(InterceptResend(Basis.BZ, (5,)), GHZ3)  # qubit out of range


# --- Eve's inference ----------------------------------------------------------


def test_eve_inference_bz_intercept_recovers_bits():
    model = InterceptResend(Basis.BZ, (1,))
    rng = np.random.default_rng(31)
    for bit in (0, 1) * 10:
        state = apply_attack_sampled(model, GHZ3, rng)
        round_ = run_message_round(state, bit, rng)
        assert eve_inference(model, round_) == bit


def test_eve_inference_none_for_recordless_attacks():
    rng = np.random.default_rng(32)
    round_ = run_message_round(GHZ3, 0, rng)
    assert eve_inference(NoAttack(), round_) is None
    assert eve_inference(WSubstitution(), round_) is None
    assert eve_inference(Depolarize(0.5, (1,)), round_) is None
    assert eve_inference(InterceptResend(Basis.BX, (1,)), round_) is None


def test_eve_inference_rejects_control_rounds():
    rng = np.random.default_rng(33)
    round_ = run_control_round(GHZ3, rng)
    with pytest.raises(ValueError):
        eve_inference(InterceptResend(Basis.BZ, (1,)), round_)


# --- wire format ---------------------------------------------------------------


@pytest.mark.parametrize("model", CATALOG, ids=lambda m: m.label)
def test_attack_dict_round_trip(model):
    again = attack_from_dict(attack_to_dict(model))
    assert type(again) is type(model)
    out_a = apply_attack(model, GHZ3)
    out_b = apply_attack(again, GHZ3)
    assert np.max(np.abs(out_a.matrix - out_b.matrix)) < 1e-14


def test_parse_attack_json_and_compact_forms():
    a = parse_attack('{"variant":"intercept_resend","basis":"Bz","qubits":[1]}')
    b = parse_attack("intercept_resend:basis=Bz,qubits=[1]")
    assert a == b == InterceptResend(Basis.BZ, (1,))
    assert parse_attack("ghz_pauli:i=3") == GhzPauli(3)
    assert parse_attack(None) == NoAttack()
    assert parse_attack("no_attack") == NoAttack()


def test_parse_attack_errors_mention_schema():
    with pytest.raises(ValueError, match="attack spec"):
        parse_attack('{"variant":"ghz_pauli"}')
    with pytest.raises(ValueError, match="variant"):
        parse_attack('{"variant":"bogus"}')
    with pytest.raises(ValueError):
        parse_attack('{"not json')


def test_parse_attack_family_depolarize():
    label, build, grid = parse_attack_family(
        '{"family":"depolarize","qubits":[1],"grid":[0.0,0.5,1.0]}', 3
    )
    assert label == "depolarize" and grid == [0.0, 0.5, 1.0]
    assert build(0.5) == Depolarize(0.5, (1,))


def test_parse_attack_family_ghz_pauli_default_grid():
    label, build, grid = parse_attack_family('{"family":"ghz_pauli"}', 3)
    assert label == "ghz_pauli" and grid == list(range(1, 8))
    assert build(4) == GhzPauli(4)


def test_parse_attack_family_single_point():
    label, build, grid = parse_attack_family('{"family":"no_attack"}', 3)
    assert label == "no_attack" and grid == [None]
    assert build(None) == NoAttack()
    label, build, grid = parse_attack_family('{"variant":"ghz_pauli","i":2}', 3)
    assert label == "ghz_pauli" and grid == [None] and build(None) == GhzPauli(2)


def test_parse_attack_family_rejects_empty_grid():
    with pytest.raises(ValueError, match="empty"):
        parse_attack_family('{"family":"depolarize","qubits":[1],"grid":[]}', 3)
    with pytest.raises(ValueError, match="family"):
        parse_attack_family('{"family":"bogus"}', 3)
