"""Eavesdropper attack models acting on the travel qubits of a distributed GHZ state.

Every attack is an immutable description; applying one is a pure function of
(model, state, generator).  Attacks touch travel qubits only (qubits 1..n-1),
never Alice's retained qubit 0.  Each model supports two application routes:

* :func:`apply_attack` gives the exact ensemble-averaged density operator of
  the post-attack joint state (the induced CPTP map applied to the ideal
  input), used by the security analysis.
* :func:`apply_attack_sampled` draws one pure-state trajectory, used by the
  round-based protocol simulation.  The two routes agree in distribution.

Wire format (JSON object, or the compact ``variant:key=value,...`` form on a
command line):

* ``{"variant": "no_attack"}``
* ``{"variant": "ghz_pauli", "i": 3}`` with basis-state index i in 1..2**n-1
* ``{"variant": "intercept_resend", "basis": "Bz", "qubits": [1]}``
* ``{"variant": "depolarize", "p": 0.3, "qubits": [1]}`` where p is the
  probability each listed qubit is replaced by the maximally mixed state
* ``{"variant": "kraus_custom", "kraus": [[[...]]], "qubits": [1, 2]}`` with
  matrix entries given as numbers or [re, im] pairs
* ``{"variant": "w_substitution"}``
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Sequence, Union

import numpy as np

from .quantum import (
    Basis,
    DensityOperator,
    PureState,
    _apply_matrix_tensor,
    _axes_for,
    _pure_unchecked,
    apply_channel,
    apply_unitary,
    ghz_pairs,
    ghz_state,
    w_state,
)

if TYPE_CHECKING:  # pragma: no cover
    from .protocol import Round

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_PROJECTORS = {
    Basis.BZ: (np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)),
    Basis.BX: (
        np.full((2, 2), 0.5, dtype=complex),
        np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex),
    ),
}


def _check_travel_qubits(qubits: Sequence[int]) -> tuple[int, ...]:
    qs = tuple(int(q) for q in qubits)
    if not qs:
        raise ValueError("attack must list at least one travel qubit")
    if len(set(qs)) != len(qs):
        raise ValueError(f"duplicate qubit indices in {qubits!r}")
    if any(q < 1 for q in qs):
        raise ValueError("attacks act on travel qubits only (indices >= 1); qubit 0 is Alice's")
    return qs


@dataclass(frozen=True)
class NoAttack:
    """Identity: the distributed state is the ideal GHZ state."""

    label = "no_attack"


@dataclass(frozen=True)
class GhzPauli:
    """Pauli operations on travel qubits mapping the GHZ state to basis state ``index``."""

    index: int

    label = "ghz_pauli"

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError(f"ghz_pauli index must be >= 1 (0 is the ideal state), got {self.index}")


@dataclass(frozen=True)
class InterceptResend:
    """Eve measures the listed travel qubits in her basis and resends the outcomes."""

    basis: Basis
    qubits: tuple[int, ...]

    label = "intercept_resend"

    def __post_init__(self) -> None:
        object.__setattr__(self, "basis", Basis(self.basis))
        object.__setattr__(self, "qubits", _check_travel_qubits(self.qubits))


@dataclass(frozen=True)
class Depolarize:
    """Each listed travel qubit is replaced by the maximally mixed state with probability p."""

    p: float
    qubits: tuple[int, ...]

    label = "depolarize"

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"depolarizing probability must be in [0, 1], got {self.p}")
        object.__setattr__(self, "qubits", _check_travel_qubits(self.qubits))


@dataclass(frozen=True, eq=False)
class KrausCustom:
    """Arbitrary CPTP map on the listed travel qubits, given by its Kraus operators."""

    kraus_set: tuple[np.ndarray, ...]
    qubits: tuple[int, ...]

    label = "kraus_custom"

    def __post_init__(self) -> None:
        qs = _check_travel_qubits(self.qubits)
        object.__setattr__(self, "qubits", qs)
        dim = 2 ** len(qs)
        kraus = tuple(np.array(k, dtype=complex) for k in self.kraus_set)
        if not kraus or any(k.shape != (dim, dim) for k in kraus):
            raise ValueError(f"each Kraus operator must be {dim}x{dim} for qubits {qs}")
        total = sum(k.conj().T @ k for k in kraus)
        if np.max(np.abs(total - np.eye(dim))) > 1e-10:
            raise ValueError("Kraus set is not trace preserving")
        for k in kraus:
            k.flags.writeable = False
        object.__setattr__(self, "kraus_set", kraus)


@dataclass(frozen=True)
class WSubstitution:
    """The source distributes the W state instead of the GHZ state (no Eve record kept)."""

    label = "w_substitution"


AttackModel = Union[NoAttack, GhzPauli, InterceptResend, Depolarize, KrausCustom, WSubstitution]


def _check_against_n(model: AttackModel, n: int) -> None:
    qubits = getattr(model, "qubits", ())
    if any(q >= n for q in qubits):
        raise ValueError(f"attack qubits {qubits} out of range for {n} parties")
    if isinstance(model, GhzPauli) and model.index >= 2**n:
        raise ValueError(f"ghz_pauli index {model.index} out of range for {n} qubits")


def _ghz_pauli_ops(index: int, n: int) -> list[tuple[np.ndarray, int]]:
    """Travel-qubit Pauli sequence turning the GHZ state into basis state ``index``.

    The X mask is the member of the target index pair whose Alice bit is 0, so
    it flips travel qubits only; the sign of odd-index states is set by a Z on
    a travel qubit where the pair representative has a 0 bit.  Both always
    exist, which is exactly the statement that every basis state is reachable
    without touching Alice's qubit.
    """
    pair, sign_bit = divmod(index, 2)
    rep = ghz_pairs(n)[pair]
    comp = ((1 << n) - 1) ^ rep
    mask = rep if rep & 1 == 0 else comp
    ops = [(_X, q) for q in range(1, n) if (mask >> q) & 1]
    if sign_bit:
        z_qubit = next(q for q in range(1, n) if not (rep >> q) & 1)
        ops.append((_Z, z_qubit))
    return ops


def _depolarize_kraus(p: float) -> list[np.ndarray]:
    return [
        np.sqrt(1.0 - 0.75 * p) * _I2,
        np.sqrt(0.25 * p) * _X,
        np.sqrt(0.25 * p) * _Y,
        np.sqrt(0.25 * p) * _Z,
    ]


def attack_channel(model: AttackModel, rho: DensityOperator) -> DensityOperator:
    """The attack's induced CPTP map applied to an arbitrary joint state.

    Note that ``WSubstitution`` is the replace-with-W map, whose output does
    not depend on the input.
    """
    n = rho.n_qubits
    _check_against_n(model, n)
    if isinstance(model, NoAttack):
        return rho
    if isinstance(model, GhzPauli):
        for matrix, qubit in _ghz_pauli_ops(model.index, n):
            rho = apply_channel(rho, [matrix], [qubit])
        return rho
    if isinstance(model, InterceptResend):
        for qubit in model.qubits:
            rho = apply_channel(rho, _PROJECTORS[model.basis], [qubit])
        return rho
    if isinstance(model, Depolarize):
        kraus = _depolarize_kraus(model.p)
        for qubit in model.qubits:
            rho = apply_channel(rho, kraus, [qubit])
        return rho
    if isinstance(model, KrausCustom):
        return apply_channel(rho, model.kraus_set, model.qubits)
    if isinstance(model, WSubstitution):
        return w_state(n).density()
    raise TypeError(f"unknown attack model {model!r}")


def apply_attack(model: AttackModel, ideal: PureState) -> DensityOperator:
    """Exact ensemble-averaged post-attack state for an ideal GHZ input."""
    return attack_channel(model, ideal.density())


_H1 = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)


@functools.lru_cache(maxsize=None)
def _qubit_bit_mask(n: int, qubit: int) -> np.ndarray:
    mask = (np.arange(2**n) >> qubit) & 1
    mask.flags.writeable = False
    return mask


def _apply_1q(amps: np.ndarray, matrix: np.ndarray, qubit: int, n: int) -> np.ndarray:
    tensor = amps.reshape([2] * n)
    return _apply_matrix_tensor(tensor, matrix, [n - 1 - qubit]).reshape(-1)


def _project_qubit(
    amps: np.ndarray, n: int, qubit: int, basis: Basis, rng: np.random.Generator
) -> np.ndarray:
    """Born-sample a single-qubit measurement of one qubit and collapse the state."""
    if basis is Basis.BX:
        amps = _apply_1q(amps, _H1, qubit, n)
    bit = _qubit_bit_mask(n, qubit)
    p1 = float(np.sum(np.abs(amps[bit == 1]) ** 2))
    outcome = 1 if rng.random() < p1 else 0
    out = np.where(bit == outcome, amps, 0.0)
    out = out / np.sqrt(p1 if outcome else 1.0 - p1)
    if basis is Basis.BX:
        out = _apply_1q(out, _H1, qubit, n)
    return out


@functools.lru_cache(maxsize=None)
def _ghz_pauli_state(index: int, n: int) -> PureState:
    # deterministic trajectory, computed once per (index, n) and shared (states are immutable)
    state = ghz_state(n)
    for matrix, qubit in _ghz_pauli_ops(index, n):
        state = apply_unitary(state, matrix, [qubit])
    return state


@functools.lru_cache(maxsize=None)
def _w_state_cached(n: int) -> PureState:
    return w_state(n)


def apply_attack_sampled(
    model: AttackModel, ideal: PureState, rng: np.random.Generator
) -> PureState:
    """One pure-state trajectory of the attack; agrees with the channel in distribution."""
    n = ideal.n_qubits
    _check_against_n(model, n)
    if isinstance(model, NoAttack):
        return ideal
    if isinstance(model, GhzPauli):
        return _ghz_pauli_state(model.index, n)
    if isinstance(model, InterceptResend):
        amps = ideal.amplitudes
        for qubit in model.qubits:
            amps = _project_qubit(amps, n, qubit, model.basis, rng)
        return _pure_unchecked(n, amps)
    if isinstance(model, Depolarize):
        amps = ideal.amplitudes
        for qubit in model.qubits:
            draw = rng.random()
            if draw < 0.75 * model.p:
                pauli = (_X, _Y, _Z)[int(draw / (0.25 * model.p))]
                amps = _apply_1q(amps, pauli, qubit, n)
        return _pure_unchecked(n, amps) if amps is not ideal.amplitudes else ideal
    if isinstance(model, KrausCustom):
        branches = []
        probs = []
        for kraus in model.kraus_set:
            mapped = _apply_operator(ideal.amplitudes, kraus, model.qubits, n)
            weight = float(np.sum(np.abs(mapped) ** 2))
            branches.append(mapped)
            probs.append(weight)
        choice = int(np.searchsorted(np.cumsum(probs), rng.random() * sum(probs), side="right"))
        choice = min(choice, len(branches) - 1)
        return PureState(n, branches[choice] / np.sqrt(probs[choice]))
    if isinstance(model, WSubstitution):
        return _w_state_cached(n)
    raise TypeError(f"unknown attack model {model!r}")


def _apply_operator(amps: np.ndarray, matrix: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    tensor = amps.reshape([2] * n)
    return _apply_matrix_tensor(tensor, matrix, _axes_for(list(qubits), n)).reshape(-1)


def eve_inference(model: AttackModel, round: "Round") -> int | None:
    """Eve's guess of the transmitted bit from her tap plus the public announcement.

    Only a Bz intercept-resend leaves Eve a useful record: her stored outcome
    for a tapped qubit equals that receiver's later Bz outcome, so she decodes
    exactly as a receiver would.  Every other cataloged attack keeps no record
    and yields None; channel-type attacks are instead characterized by the
    entropy bound in the analysis module.
    """
    from .protocol import MessageKind, Mode, decode_bit

    if round.mode is not Mode.MESSAGE:
        raise ValueError("eve_inference applies to message rounds only")
    if not isinstance(model, InterceptResend) or model.basis is not Basis.BZ:
        return None
    announcement = next(
        m.payload for m in round.announcements if m.kind is MessageKind.YES_NO
    )
    return decode_bit(announcement, round.outcomes[model.qubits[0]])


# --- wire format ----------------------------------------------------------

_SCHEMA_HINT = (
    'attack specs: {"variant":"no_attack"} | {"variant":"ghz_pauli","i":3} | '
    '{"variant":"intercept_resend","basis":"Bz","qubits":[1]} | '
    '{"variant":"depolarize","p":0.3,"qubits":[1]} | '
    '{"variant":"kraus_custom","kraus":[...],"qubits":[1]} | '
    '{"variant":"w_substitution"}; compact form variant:key=value,...'
)


def _entry_to_complex(entry) -> complex:
    if isinstance(entry, (int, float)):
        return complex(entry)
    if isinstance(entry, (list, tuple)) and len(entry) == 2:
        return complex(entry[0], entry[1])
    raise ValueError(f"matrix entries must be numbers or [re, im] pairs, got {entry!r}")


def _parse_kraus(raw) -> tuple[np.ndarray, ...]:
    return tuple(
        np.array([[_entry_to_complex(e) for e in row] for row in matrix], dtype=complex)
        for matrix in raw
    )


def _split_top_level(text: str) -> list[str]:
    parts, depth, current = [], 0, []
    for ch in text:
        if ch in "[{(":
            depth += 1
        elif ch in "]})":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    if current:
        parts.append("".join(current))
    return parts


def _compact_to_dict(text: str) -> dict:
    variant, _, rest = text.partition(":")
    spec: dict = {"variant": variant.strip()}
    if rest.strip():
        for part in _split_top_level(rest):
            key, sep, value = part.partition("=")
            if not sep:
                raise ValueError(f"expected key=value in attack spec, got {part!r}")
            try:
                spec[key.strip()] = json.loads(value)
            except json.JSONDecodeError:
                spec[key.strip()] = value.strip()
    return spec


def attack_from_dict(spec: dict) -> AttackModel:
    """Build an attack model from its wire-format dictionary."""
    try:
        variant = spec["variant"]
        if variant == "no_attack":
            return NoAttack()
        if variant == "ghz_pauli":
            return GhzPauli(int(spec["i"]))
        if variant == "intercept_resend":
            return InterceptResend(Basis(spec["basis"]), tuple(spec["qubits"]))
        if variant == "depolarize":
            return Depolarize(float(spec["p"]), tuple(spec["qubits"]))
        if variant == "kraus_custom":
            return KrausCustom(_parse_kraus(spec["kraus"]), tuple(spec["qubits"]))
        if variant == "w_substitution":
            return WSubstitution()
        raise ValueError(f"unknown attack variant {variant!r}")
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed attack spec {spec!r} ({exc}); {_SCHEMA_HINT}") from exc


def attack_to_dict(model: AttackModel) -> dict:
    """Wire-format dictionary of an attack model."""
    if isinstance(model, NoAttack):
        return {"variant": "no_attack"}
    if isinstance(model, GhzPauli):
        return {"variant": "ghz_pauli", "i": model.index}
    if isinstance(model, InterceptResend):
        return {"variant": "intercept_resend", "basis": model.basis.value, "qubits": list(model.qubits)}
    if isinstance(model, Depolarize):
        return {"variant": "depolarize", "p": model.p, "qubits": list(model.qubits)}
    if isinstance(model, KrausCustom):
        return {
            "variant": "kraus_custom",
            "kraus": [[[ [e.real, e.imag] for e in row] for row in k] for k in model.kraus_set],
            "qubits": list(model.qubits),
        }
    if isinstance(model, WSubstitution):
        return {"variant": "w_substitution"}
    raise TypeError(f"unknown attack model {model!r}")


def parse_attack(spec: str | dict | None) -> AttackModel:
    """Parse an attack from a JSON string, wire dict, or compact ``variant:k=v`` string."""
    if spec is None or spec == "":
        return NoAttack()
    if isinstance(spec, dict):
        return attack_from_dict(spec)
    text = spec.strip()
    if text.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"attack spec is not valid JSON ({exc}); {_SCHEMA_HINT}") from exc
        return attack_from_dict(data)
    return attack_from_dict(_compact_to_dict(text))


def parse_attack_family(
    spec: str | dict, n: int
) -> tuple[str, Callable[[object], AttackModel], list]:
    """Parse a parameterized attack family for sweeps.

    Family specs carry a ``family`` key plus an optional ``grid``:

    * ``{"family":"depolarize","qubits":[1],"grid":[0.0,0.1,...]}``
    * ``{"family":"ghz_pauli","grid":[1,...,7]}`` (grid defaults to all indices)
    * ``{"family":"intercept_resend","basis":"Bz","qubits":[1]}``
    * ``{"family":"no_attack"}`` / ``{"family":"w_substitution"}``

    A plain single-attack spec is accepted as a one-point family.  Returns
    (label, parameter -> model builder, parameter grid); an explicit empty
    grid is an error.
    """
    if isinstance(spec, str):
        text = spec.strip()
        spec = json.loads(text) if text.startswith("{") else _compact_to_dict(text)
    if "variant" in spec and "family" not in spec:
        model = attack_from_dict(spec)
        return model.label, lambda _: model, [None]
    family = spec.get("family")
    if family is None:
        raise ValueError(f"attack family spec needs a 'family' key, got {spec!r}")
    if "grid" in spec and not spec["grid"]:
        raise ValueError("attack family grid is empty")
    if family == "depolarize":
        qubits = tuple(spec.get("qubits", [1]))
        grid = spec.get("grid")
        if grid is None:
            raise ValueError("depolarize family needs a 'grid' of probabilities")
        return family, lambda p: Depolarize(float(p), qubits), [float(p) for p in grid]
    if family == "ghz_pauli":
        grid = spec.get("grid", list(range(1, 2**n)))
        return family, lambda i: GhzPauli(int(i)), [int(i) for i in grid]
    if family == "intercept_resend":
        model = InterceptResend(Basis(spec.get("basis", "Bz")), tuple(spec.get("qubits", [1])))
        return family, lambda _: model, [None]
    if family == "no_attack":
        return family, lambda _: NoAttack(), [None]
    if family == "w_substitution":
        return family, lambda _: WSubstitution(), [None]
    raise ValueError(f"unknown attack family {family!r}; {_SCHEMA_HINT}")
