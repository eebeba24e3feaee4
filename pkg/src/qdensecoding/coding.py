"""Dense-coding ensembles and the information measures computed from them.

Alice encodes one of four messages ``I, X, Y, Z`` (each with probability 1/4)
by applying the matching Pauli to the qubit half of the channel.  Three
protocols are modelled:

* ``perfect``: every Pauli is applied exactly.
* ``bitflip``: the ``X`` operation succeeds with probability ``q`` and
  otherwise leaves the state untouched.
* ``phaseflip``: ``Z`` is applied in place of ``X``.

All functions broadcast over leading axes, so a whole time grid is handled
in one call.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from qdensecoding import linalg
from qdensecoding.dynamics import BasisFrame, ChannelState
from qdensecoding.errors import ValidationError

MESSAGES = ("I", "X", "Y", "Z")
NORM_ATOL = 1e-12
WEIGHT_ATOL = 1e-9

FIDELITY_NOTE = "F(rho, sigma) = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 (Uhlmann, squared)"

_PAULI_2 = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


class Kind(enum.Enum):
    PERFECT = "perfect"
    BITFLIP = "bitflip"
    PHASEFLIP = "phaseflip"


@dataclass(frozen=True)
class Protocol:
    """Which coding protocol to run; ``q`` is only meaningful for ``BITFLIP``."""

    kind: Kind = Kind.PERFECT
    q: float | None = None

    def __post_init__(self):
        if not isinstance(self.kind, Kind):
            object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.BITFLIP:
            if self.q is None or not np.isfinite(self.q) or not 0.0 <= self.q <= 1.0:
                raise ValidationError(f"q must lie in [0, 1], got {self.q!r}")
            object.__setattr__(self, "q", float(self.q))
        elif self.q is not None:
            raise ValidationError(f"q only applies to the bitflip protocol, not {self.kind.value}")

    @classmethod
    def perfect(cls) -> "Protocol":
        return cls(Kind.PERFECT)

    @classmethod
    def bit_flip(cls, q: float) -> "Protocol":
        return cls(Kind.BITFLIP, q)

    @classmethod
    def phase_flip(cls) -> "Protocol":
        return cls(Kind.PHASEFLIP)

    @property
    def label(self) -> str:
        if self.kind is Kind.BITFLIP:
            return f"bitflip(q={self.q:g})"
        return self.kind.value


def atom_pauli(which: str, frame: BasisFrame | None = None) -> np.ndarray:
    """Pauli ``which`` on the qubit, identity on the field, in frame ket order.

    Conventions: ``Z|e> = |e>``, ``Z|g> = -|g>``, ``X|e> = |g>``, ``Y|e> = i|g>``.
    The matrix is the same for every frame; ``frame`` is accepted for symmetry
    with the rest of the API.
    """
    try:
        sigma = _PAULI_2[which]
    except KeyError:
        raise ValidationError(f"unknown Pauli {which!r}; expected one of {MESSAGES}") from None
    # frame order is field-major: index = 2 * (field - m) + (0 for e, 1 for g)
    return np.kron(np.eye(2), sigma)


_PAULIS = np.stack([atom_pauli(w) for w in MESSAGES])


@dataclass(frozen=True)
class MessageEnsemble:
    """Four coded messages.

    ``actual`` and ``ideal`` have shape ``(..., 4, 4, 4)``; axis ``-3`` runs
    over :data:`MESSAGES`.
    """

    probabilities: np.ndarray
    actual: np.ndarray
    ideal: np.ndarray
    messages: tuple[str, ...] = MESSAGES


@dataclass(frozen=True)
class InfoMeasures:
    """Information and disturbance figures for one protocol.

    ``i_cod_closed`` is ``None`` where no closed form exists (bitflip).
    Array-valued when the channel was given on a time grid.
    """

    i_cod_closed: np.ndarray | float | None
    i_bob_holevo: np.ndarray | float
    s_coded: np.ndarray | float
    d_message_avg: np.ndarray | float
    d_aggregate: np.ndarray | float


def _channel_vector(channel) -> np.ndarray:
    vec = channel.vector if isinstance(channel, ChannelState) else channel
    vec = np.asarray(vec, dtype=np.complex128)
    if vec.shape[-1:] != (4,):
        raise ValidationError(f"channel must have a trailing axis of length 4, got {vec.shape}")
    norm_dev = np.abs(np.sum(np.abs(vec) ** 2, axis=-1) - 1.0)
    if np.any(norm_dev > NORM_ATOL):
        raise ValidationError(f"channel is not normalised (deviation {float(norm_dev.max()):.3e})")
    return vec


def _conjugate(u: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return u @ rho @ linalg.dagger(u)


def build_ensemble(channel, protocol: Protocol) -> MessageEnsemble:
    """Coded message states for ``protocol`` applied to a pure ``channel``.

    ``channel`` is a :class:`ChannelState` or a raw ``(..., 4)`` state vector.
    """
    vec = _channel_vector(channel)
    rho = vec[..., :, None] * np.conj(vec[..., None, :])
    ideal = _conjugate(_PAULIS, rho[..., None, :, :])
    actual = ideal.copy()
    x = MESSAGES.index("X")
    if protocol.kind is Kind.BITFLIP:
        actual[..., x, :, :] = protocol.q * ideal[..., x, :, :] + (1.0 - protocol.q) * rho
    elif protocol.kind is Kind.PHASEFLIP:
        actual[..., x, :, :] = ideal[..., MESSAGES.index("Z"), :, :]
    probs = np.full(len(MESSAGES), 1.0 / len(MESSAGES))
    return MessageEnsemble(probs, actual, ideal)


def _mix(p: np.ndarray, states: np.ndarray) -> np.ndarray:
    return np.einsum("k,...kij->...ij", p, states)


def coded_state(ensemble: MessageEnsemble) -> np.ndarray:
    """Average state ``sum_i p_i rho_i`` that Bob receives."""
    return _mix(ensemble.probabilities, ensemble.actual)


def coded_information_closed(protocol: Protocol, a, c):
    """Closed-form coded information from the channel's Schmidt weights.

    Perfect coding gives ``H(a, c)``.  For the phase-flip substitute the
    three-term expression

        -(3/4) [a log2(3a/4) + c log2(3c/4) + (a+c)/3 log2((a+c)/4)]

    is evaluated as written; it equals ``H(3a/4, 3c/4, 1/4)``.  The bitflip
    protocol has no closed form and returns ``None``, except at ``q = 1``
    where it coincides with perfect coding.
    """
    a = np.asarray(a, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    if np.any(a < -WEIGHT_ATOL) or np.any(c < -WEIGHT_ATOL):
        raise ValidationError("Schmidt weights must be non-negative")
    if np.any(np.abs(a + c - 1.0) > WEIGHT_ATOL):
        raise ValidationError("Schmidt weights must sum to 1")
    if protocol.kind is Kind.BITFLIP:
        if protocol.q != 1.0:
            return None
        protocol = Protocol.perfect()
    a = np.clip(a, 0.0, None)
    c = np.clip(c, 0.0, None)

    def xlog(w, arg):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(w > 0.0, w * np.log2(np.where(arg > 0.0, arg, 1.0)), 0.0)

    if protocol.kind is Kind.PERFECT:
        out = -(xlog(a, a) + xlog(c, c))
    else:
        s = a + c
        out = -0.75 * (xlog(a, 0.75 * a) + xlog(c, 0.75 * c) + xlog(s / 3.0, s / 4.0))
    return float(out) if out.ndim == 0 else out


def holevo_quantity(ensemble: MessageEnsemble):
    """``S(sum p_i rho_i) - sum p_i S(rho_i)`` in bits, using the actual states."""
    s_mix = linalg.von_neumann_entropy(coded_state(ensemble))
    s_members = np.asarray(linalg.von_neumann_entropy(ensemble.actual))
    chi = np.maximum(s_mix - s_members @ ensemble.probabilities, 0.0)
    return float(chi) if np.ndim(chi) == 0 else chi


def disturbance(ensemble: MessageEnsemble):
    """``1 - F`` averaged per message, and ``1 - F`` of the averaged states.

    Returns:
        ``(d_message_avg, d_aggregate)`` where the first averages the fidelity
        of each actual state against its ideal, and the second compares the
        two ensemble mixtures.
    """
    p = ensemble.probabilities
    per_message = np.asarray(linalg.uhlmann_fidelity(ensemble.ideal, ensemble.actual))
    d_msg = 1.0 - per_message @ p
    d_agg = 1.0 - np.asarray(
        linalg.uhlmann_fidelity(_mix(p, ensemble.ideal), _mix(p, ensemble.actual))
    )
    d_msg = np.clip(d_msg, 0.0, 1.0)
    d_agg = np.clip(d_agg, 0.0, 1.0)
    if d_msg.ndim == 0:
        return float(d_msg), float(d_agg)
    return d_msg, d_agg


def schmidt_weights(channel) -> tuple[np.ndarray, np.ndarray]:
    """Schmidt weights ``(a, c)``, ``a >= c``, of a pure channel in frame order."""
    vec = _channel_vector(channel)
    psi = vec.reshape(vec.shape[:-1] + (2, 2))  # (field, atom)
    rho_atom = np.einsum("...fa,...fb->...ab", psi, np.conj(psi))
    diff = np.real(rho_atom[..., 0, 0] - rho_atom[..., 1, 1])
    r = np.sqrt(diff * diff + 4.0 * np.abs(rho_atom[..., 0, 1]) ** 2)
    r = np.minimum(r, 1.0)
    return 0.5 * (1.0 + r), 0.5 * (1.0 - r)


def info_measures(channel, protocol: Protocol) -> InfoMeasures:
    ens = build_ensemble(channel, protocol)
    a, c = schmidt_weights(channel)
    rho_c = coded_state(ens)
    s_coded = linalg.von_neumann_entropy(rho_c)
    s_members = np.asarray(linalg.von_neumann_entropy(ens.actual))
    chi = np.maximum(s_coded - s_members @ ens.probabilities, 0.0)
    d_msg, d_agg = disturbance(ens)
    if np.ndim(chi) == 0:
        chi = float(chi)
    return InfoMeasures(
        i_cod_closed=coded_information_closed(protocol, a, c),
        i_bob_holevo=chi,
        s_coded=s_coded,
        d_message_avg=d_msg,
        d_aggregate=d_agg,
    )
