"""Jaynes-Cummings evolution of a Cooper-pair qubit coupled to a Fock-state cavity.

The channel is always a two-term pure state inside a four-ket frame
``|e,m>, |g,m>, |e,m+1>, |g,m+1>`` (see :class:`BasisFrame`).

Amplitudes use the normalised Jaynes-Cummings closed forms.  Relative to the
coefficients as commonly printed for this model, the excited-state transfer
amplitude carries no extra factor of the scaled detuning, and the ground-state
transfer amplitude uses ``sqrt(n)`` with Rabi frequency ``gamma_n``.  Without
these corrections ``|c1|^2 + |c4|^2`` and ``|c2|^2 + |c3|^2`` are not one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from qdensecoding.errors import ValidationError

DELTA_RANGE = (0.0, 10.0)
KAPPA_RANGE = (0.0, 10.0)

COEFFICIENT_NOTE = (
    "amplitudes use normalised Jaynes-Cummings forms: c4 = -i sqrt(n+1)/gamma_(n+1) "
    "sin(gamma_(n+1) tau) (no delta factor); c2 = -i sqrt(n)/gamma_n sin(gamma_n tau), "
    "c3 = cos(gamma_n tau) + i delta/gamma_n sin(gamma_n tau); coupling lambda = kappa"
)


class Initial(enum.Enum):
    EXCITED = "excited"
    GROUND = "ground"


@dataclass(frozen=True)
class BasisFrame:
    """Ordered kets ``|e,m>, |g,m>, |e,m+1>, |g,m+1>`` for lower Fock index ``m``."""

    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 0:
            raise ValidationError(f"frame index m must be a non-negative integer, got {self.m}")

    @property
    def labels(self) -> tuple[str, str, str, str]:
        m = self.m
        return (f"|e,{m}>", f"|g,{m}>", f"|e,{m + 1}>", f"|g,{m + 1}>")


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of one channel.

    Attributes:
        n: photon number of the initial Fock state.
        delta_raw: detuning between Josephson energy and cavity frequency.
        kappa: capacitance ratio; sets the coupling strength (lambda = kappa).
        initial: qubit starting state.
    """

    n: int = 2
    delta_raw: float = 0.0
    kappa: float = 2.5
    initial: Initial = Initial.EXCITED

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 0:
            raise ValidationError(f"n must be a non-negative integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        lo, hi = DELTA_RANGE
        if not (np.isfinite(self.delta_raw) and lo <= self.delta_raw <= hi):
            raise ValidationError(f"delta must lie in [{lo:g}, {hi:g}], got {self.delta_raw!r}")
        lo, hi = KAPPA_RANGE
        if not (np.isfinite(self.kappa) and lo < self.kappa <= hi):
            raise ValidationError(f"kappa must lie in ({lo:g}, {hi:g}], got {self.kappa!r}")
        if not isinstance(self.initial, Initial):
            object.__setattr__(self, "initial", Initial(self.initial))

    @property
    def delta(self) -> float:
        return scaled_detuning(self.delta_raw, self.kappa)

    @property
    def degenerate(self) -> bool:
        """Ground state with an empty cavity never evolves."""
        return self.initial is Initial.GROUND and self.n == 0


@dataclass(frozen=True)
class ChannelAmplitudes:
    """The two complex amplitudes of the channel: ``(c1, c4)`` or ``(c2, c3)``."""

    first: np.ndarray | complex
    second: np.ndarray | complex
    frame: BasisFrame

    @property
    def weights(self) -> tuple[np.ndarray, np.ndarray]:
        return np.abs(self.first) ** 2, np.abs(self.second) ** 2


@dataclass(frozen=True)
class ChannelState:
    vector: np.ndarray  # (..., 4) complex, in frame order
    frame: BasisFrame
    amplitudes: ChannelAmplitudes
    degenerate: bool = False


def scaled_detuning(delta_raw: float, kappa: float) -> float:
    """``delta = Delta / (2 lambda)`` with the coupling taken as ``lambda = kappa``."""
    if not kappa > 0:
        raise ValidationError(f"kappa must be positive, got {kappa!r}")
    if delta_raw < 0:
        raise ValidationError(f"detuning must be non-negative, got {delta_raw!r}")
    return delta_raw / (2.0 * kappa)


def rabi_frequency(delta, k: int):
    """``gamma_k = sqrt(delta^2 + k)``; broadcasts over an array ``delta``."""
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise ValidationError(f"Rabi sector index must be a positive integer, got {k!r}")
    d = np.asarray(delta, dtype=np.float64)
    if np.any(d < 0):
        raise ValidationError(f"scaled detuning must be non-negative, got {delta!r}")
    g = np.sqrt(d * d + k)
    return float(g) if g.ndim == 0 else g


def _check_inputs(delta, n, tau) -> np.ndarray:
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise ValidationError(f"n must be a non-negative integer, got {n!r}")
    if np.any(np.asarray(delta) < 0):
        raise ValidationError(f"scaled detuning must be non-negative, got {delta!r}")
    tau = np.asarray(tau, dtype=np.float64)
    if not np.all(np.isfinite(tau)) or np.any(tau < 0):
        raise ValidationError("tau must be finite and non-negative")
    return tau


def _unwrap(x):
    arr = np.asarray(x, dtype=np.complex128)
    return complex(arr) if arr.ndim == 0 else arr


def amplitudes_excited(delta: float, n: int, tau) -> ChannelAmplitudes:
    """``(c1, c4)`` for the start state ``|e, n>``; ``delta`` and ``tau`` broadcast."""
    tau = _check_inputs(delta, n, tau)
    g = rabi_frequency(delta, n + 1)
    s = np.sin(g * tau)
    c1 = np.cos(g * tau) - 1j * (delta / g) * s
    c4 = -1j * (np.sqrt(n + 1) / g) * s
    return ChannelAmplitudes(_unwrap(c1), _unwrap(c4), BasisFrame(n))


def amplitudes_ground(delta: float, n: int, tau) -> ChannelAmplitudes:
    """``(c2, c3)`` for the start state ``|g, n>``; fixed at ``(0, 1)`` when ``n = 0``."""
    tau = _check_inputs(delta, n, tau)
    if n == 0:
        zeros = np.zeros(np.broadcast(np.asarray(delta), tau).shape, dtype=np.complex128)
        return ChannelAmplitudes(_unwrap(zeros), _unwrap(zeros + 1.0), BasisFrame(0))
    g = rabi_frequency(delta, n)
    s = np.sin(g * tau)
    c2 = -1j * (np.sqrt(n) / g) * s
    c3 = np.cos(g * tau) + 1j * (delta / g) * s
    return ChannelAmplitudes(_unwrap(c2), _unwrap(c3), BasisFrame(n - 1))


def channel_state(params: SystemParams, tau) -> ChannelState:
    """Pure channel state vector at scaled time(s) ``tau``.

    Excited: ``c1 |e,n> + c4 |g,n+1>`` in frame ``m = n``.  Ground:
    ``c2 |e,n-1> + c3 |g,n>`` in frame ``m = n - 1``, except that ``n = 0``
    yields the stationary ``|g,0>`` (slot 1 of frame ``m = 0``) flagged as
    degenerate.
    """
    delta = params.delta
    if params.initial is Initial.EXCITED:
        amps = amplitudes_excited(delta, params.n, tau)
    else:
        amps = amplitudes_ground(delta, params.n, tau)
    first = np.asarray(amps.first, dtype=np.complex128)
    second = np.asarray(amps.second, dtype=np.complex128)
    vec = np.zeros(first.shape + (4,), dtype=np.complex128)
    if params.degenerate:
        vec[..., 1] = second
    else:
        vec[..., 0] = first
        vec[..., 3] = second
    return ChannelState(vec, amps.frame, amps, degenerate=params.degenerate)
