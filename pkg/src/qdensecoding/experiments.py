"""Parameter sweeps, figure presets and qualitative trend checks."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from qdensecoding.coding import InfoMeasures, Kind, Protocol, info_measures
from qdensecoding.dynamics import Initial, SystemParams, channel_state
from qdensecoding.errors import ValidationError

DEFAULT_TAU_MAX = 10.0
DEFAULT_STEPS = 2000
MAXIMA_TOL = 1e-6
# Orderings between curve maxima are judged up to the grid-refinement bound;
# several curves share the same analytic maximum and differ only by sampling.
COMPARE_ATOL = 1e-3

VARY_NAMES = ("delta", "n", "kappa", "q")
_ALIASES = {"delta_raw": "delta"}

QUANTITIES = ("i_cod_closed", "i_bob_holevo", "s_coded", "d_message_avg", "d_aggregate")


def _canonical(name: str) -> str:
    name = _ALIASES.get(name, name)
    if name not in VARY_NAMES:
        raise ValidationError(f"cannot vary {name!r}; expected one of {VARY_NAMES}")
    return name


def _fmt(value) -> str:
    return f"{value:g}"


def apply_value(base: SystemParams, protocol: Protocol, name: str, value):
    """Return ``(params, protocol)`` with one parameter replaced."""
    name = _canonical(name)
    try:
        if name == "delta":
            return replace(base, delta_raw=float(value)), protocol
        if name == "kappa":
            return replace(base, kappa=float(value)), protocol
        if name == "n":
            return replace(base, n=value), protocol
        if protocol.kind is not Kind.BITFLIP:
            raise ValidationError(f"q can only be varied for the bitflip protocol, not {protocol.label}")
        return base, Protocol.bit_flip(float(value))
    except ValidationError as exc:
        raise ValidationError(f"invalid value {value!r} for {name}: {exc}") from None


@dataclass(frozen=True)
class SweepSpec:
    """One family of curves on a shared uniform tau grid.

    ``vary`` lists ``(name, values)`` pairs; curves are their Cartesian
    product, in order.  ``steps`` counts grid points including both ends.
    """

    protocol: Protocol = field(default_factory=Protocol.perfect)
    base: SystemParams = field(default_factory=SystemParams)
    tau_max: float = DEFAULT_TAU_MAX
    steps: int = DEFAULT_STEPS
    vary: tuple[tuple[str, tuple], ...] = ()
    panel: str = ""

    def __post_init__(self):
        if not (np.isfinite(self.tau_max) and self.tau_max > 0):
            raise ValidationError(f"tau_max must be positive, got {self.tau_max!r}")
        if isinstance(self.steps, bool) or int(self.steps) != self.steps or self.steps < 2:
            raise ValidationError(f"steps must be an integer >= 2, got {self.steps!r}")
        object.__setattr__(self, "steps", int(self.steps))
        vary = tuple((_canonical(name), tuple(values)) for name, values in self.vary)
        for name, values in vary:
            if not values:
                raise ValidationError(f"no values given for {name}")
        object.__setattr__(self, "vary", vary)
        self.curves()  # validate every combination up front

    @property
    def tau(self) -> np.ndarray:
        return np.linspace(0.0, self.tau_max, self.steps)

    def curves(self) -> list[tuple[str, SystemParams, Protocol]]:
        if not self.vary:
            label = self.panel or "base"
            return [(label, self.base, self.protocol)]
        names = [name for name, _ in self.vary]
        out = []
        for combo in itertools.product(*(values for _, values in self.vary)):
            params, proto = self.base, self.protocol
            for name, value in zip(names, combo):
                params, proto = apply_value(params, proto, name, value)
            label = ";".join(f"{name}={_fmt(value)}" for name, value in zip(names, combo))
            if self.panel:
                label = f"{self.panel}:{label}"
            out.append((label, params, proto))
        return out


@dataclass(frozen=True)
class Curve:
    label: str
    params: SystemParams
    protocol: Protocol
    tau: np.ndarray
    measures: InfoMeasures

    def series(self, quantity: str) -> np.ndarray | None:
        return getattr(self.measures, quantity)


@dataclass(frozen=True)
class InfoRecord:
    tau: float
    curve: str
    measures: InfoMeasures


def _evaluate(item, tau) -> Curve:
    label, params, proto = item
    return Curve(label, params, proto, tau, info_measures(channel_state(params, tau), proto))


def sweep_curves(spec: SweepSpec, workers: int = 1) -> list[Curve]:
    """Evaluate every curve of ``spec`` on the full tau grid.

    With ``workers > 1`` curves are computed on a thread pool; the result
    order is always the curve order of ``spec``.
    """
    tau = spec.tau
    items = spec.curves()
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda it: _evaluate(it, tau), items))
    return [_evaluate(it, tau) for it in items]


def _at(values, i):
    if values is None:
        return None
    return float(values[i])


def curve_records(curve: Curve) -> list[InfoRecord]:
    m = curve.measures
    return [
        InfoRecord(
            float(t),
            curve.label,
            InfoMeasures(
                i_cod_closed=_at(m.i_cod_closed, i),
                i_bob_holevo=_at(m.i_bob_holevo, i),
                s_coded=_at(m.s_coded, i),
                d_message_avg=_at(m.d_message_avg, i),
                d_aggregate=_at(m.d_aggregate, i),
            ),
        )
        for i, t in enumerate(curve.tau)
    ]


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[InfoRecord]:
    """One record per (curve, tau), ordered curve-major then by tau."""
    records: list[InfoRecord] = []
    for curve in sweep_curves(spec, workers=workers):
        records.extend(curve_records(curve))
    return records


# ---------------------------------------------------------------------------
# figure presets

FIGURES = tuple(f"fig{i}" for i in range(1, 10))
DELTA_SWEEP = (0.0, 0.5, 1.0)
N_SWEEP = (1, 5, 10)
KAPPA_SWEEP = (0.5, 1.0 / 3.0, 0.25)
BITFLIP_Q = 0.1

_FIG1_BASE = SystemParams(n=2, delta_raw=0.0, kappa=2.5, initial=Initial.EXCITED)
_FIG2_BASE = SystemParams(n=2, delta_raw=1.0, kappa=2.5, initial=Initial.EXCITED)


def figure_preset(
    fig: str, tau_max: float = DEFAULT_TAU_MAX, steps: int = DEFAULT_STEPS
) -> tuple[SweepSpec, ...]:
    """Sweeps behind one figure; ``fig9`` has four panels, the rest one."""
    perfect = Protocol.perfect()
    bitflip = Protocol.bit_flip(BITFLIP_Q)
    phase = Protocol.phase_flip()
    ground = replace(_FIG1_BASE, initial=Initial.GROUND)
    by_delta = (("delta", DELTA_SWEEP),)
    by_n = (("n", N_SWEEP),)
    table = {
        "fig1": [(perfect, _FIG1_BASE, by_delta, "")],
        "fig2": [(perfect, _FIG2_BASE, by_n, "")],
        "fig3": [(perfect, replace(_FIG1_BASE, delta_raw=0.5), (("kappa", KAPPA_SWEEP),), "")],
        "fig4": [(perfect, ground, by_delta, "")],
        "fig5": [(bitflip, _FIG1_BASE, by_delta, "")],
        "fig6": [(bitflip, _FIG2_BASE, by_n, "")],
        "fig7": [(phase, _FIG1_BASE, by_delta, "")],
        "fig8": [(phase, _FIG2_BASE, by_n, "")],
        "fig9": [
            (bitflip, _FIG1_BASE, by_delta, "a"),
            (bitflip, _FIG2_BASE, by_n, "b"),
            (phase, _FIG1_BASE, by_delta, "c"),
            (phase, _FIG2_BASE, by_n, "d"),
        ],
    }
    try:
        rows = table[fig]
    except KeyError:
        raise ValidationError(f"unknown figure {fig!r}; expected one of {FIGURES}") from None
    return tuple(
        SweepSpec(protocol=p, base=b, tau_max=tau_max, steps=steps, vary=v, panel=panel)
        for p, b, v, panel in rows
    )


def run_preset(fig: str, tau_max: float = DEFAULT_TAU_MAX, steps: int = DEFAULT_STEPS,
               workers: int = 1) -> list[InfoRecord]:
    records: list[InfoRecord] = []
    for spec in figure_preset(fig, tau_max, steps):
        records.extend(run_sweep(spec, workers=workers))
    return records


# ---------------------------------------------------------------------------
# trend checks

def _series_values(series) -> np.ndarray:
    arr = np.asarray(series, dtype=np.float64)
    if arr.ndim == 2:
        if arr.shape[1] != 2:
            raise ValidationError("series must be values or (tau, value) pairs")
        if np.any(np.diff(arr[:, 0]) < 0):
            raise ValidationError("series must be sorted by tau")
        arr = arr[:, 1]
    elif arr.ndim != 1:
        raise ValidationError("series must be values or (tau, value) pairs")
    return arr


def _peak_indices(v: np.ndarray, tol: float) -> np.ndarray:
    # steps within tol count as flat, so a peak straddled by two samples is
    # still one maximum; its index is the last rising sample
    d = np.diff(v)
    sign = np.where(d > tol, 1, np.where(d < -tol, -1, 0))
    moving = np.flatnonzero(sign)
    s = sign[moving]
    turns = np.flatnonzero((s[:-1] == 1) & (s[1:] == -1))
    return moving[turns] + 1


def count_local_maxima(series, tol: float = MAXIMA_TOL) -> int:
    """Rise-then-fall turning points, ignoring steps no larger than ``tol``."""
    v = _series_values(series)
    if v.size < 3:
        raise ValidationError(f"need at least 3 points to count maxima, got {v.size}")
    return int(_peak_indices(v, tol).size)


def first_peak_tau(tau: np.ndarray, values: np.ndarray, tol: float = MAXIMA_TOL) -> float | None:
    idx = _peak_indices(np.asarray(values, dtype=np.float64), tol)
    return float(tau[idx[0]]) if idx.size else None


@dataclass(frozen=True)
class CurveStats:
    label: str
    quantity: str
    maxima: int
    max_value: float
    argmax_tau: float
    min_value: float
    first_peak: float | None


@dataclass(frozen=True)
class Claim:
    name: str
    passed: bool
    detail: str


@dataclass
class TrendReport:
    figure: str
    stats: list[CurveStats] = field(default_factory=list)
    claims: list[Claim] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    def lines(self) -> list[str]:
        return [
            f"{self.figure} {c.name}: {'PASS' if c.passed else 'FAIL'} ({c.detail})"
            for c in self.claims
        ]


def curve_stats(curve: Curve, quantity: str) -> CurveStats:
    values = curve.series(quantity)
    if values is None:
        raise ValidationError(f"{quantity} is not available for {curve.protocol.label}")
    values = np.asarray(values)
    k = int(np.argmax(values))
    return CurveStats(
        curve.label,
        quantity,
        count_local_maxima(values),
        float(values[k]),
        float(curve.tau[k]),
        float(values.min()),
        first_peak_tau(curve.tau, values),
    )


def _monotone(xs, increasing: bool, atol: float = 0.0) -> bool:
    pairs = zip(xs, xs[1:])
    if increasing:
        return all(b >= a - atol for a, b in pairs)
    return all(b <= a + atol for a, b in pairs)


def _fmt_list(xs) -> str:
    return "[" + ", ".join(f"{x:.6g}" if isinstance(x, float) else str(x) for x in xs) + "]"


class _Checker:
    def __init__(self, report: TrendReport, curves: list[Curve]):
        self.report = report
        self.curves = curves

    def stats(self, quantity: str, curves: list[Curve] | None = None) -> list[CurveStats]:
        out = [curve_stats(c, quantity) for c in (curves or self.curves)]
        self.report.stats.extend(out)
        return out

    def claim(self, name: str, passed: bool, detail: str) -> None:
        self.report.claims.append(Claim(name, bool(passed), detail))

    def monotone(self, name: str, quantity: str, attr: str, increasing: bool,
                 atol: float = 0.0, curves: list[Curve] | None = None) -> None:
        xs = [getattr(s, attr) for s in self.stats(quantity, curves)]
        self.claim(name, _monotone(xs, increasing, atol), f"{attr} of {quantity} = {_fmt_list(xs)}")


def _panel_curves(fig: str, tau_max: float, steps: int) -> list[list[Curve]]:
    return [sweep_curves(spec) for spec in figure_preset(fig, tau_max, steps)]


def trend_check(fig: str, tau_max: float = DEFAULT_TAU_MAX, steps: int = DEFAULT_STEPS) -> TrendReport:
    """Evaluate the qualitative behaviour expected of one figure on its sweep."""
    panels = _panel_curves(fig, tau_max, steps)
    report = TrendReport(fig)
    ck = _Checker(report, panels[0])

    if fig in ("fig1", "fig4"):
        ck.monotone("icod_oscillations_nonincreasing_in_delta", "i_cod_closed", "maxima", False)
        ck.monotone("ibob_max_nondecreasing_in_delta", "i_bob_holevo", "max_value", True, COMPARE_ATOL)
        if fig == "fig4":
            (excited,) = _panel_curves("fig1", tau_max, steps)
            ex = [curve_stats(c, "i_cod_closed").max_value for c in excited]
            gr = [curve_stats(c, "i_cod_closed").max_value for c in panels[0]]
            ok = all(e >= g - COMPARE_ATOL for e, g in zip(ex, gr))
            ck.claim("excited_icod_max_ge_ground", ok,
                     f"excited {_fmt_list(ex)} vs ground {_fmt_list(gr)}")
    elif fig == "fig2":
        ck.monotone("icod_oscillations_nondecreasing_in_n", "i_cod_closed", "maxima", True)
        ck.monotone("ibob_max_nonincreasing_in_n", "i_bob_holevo", "max_value", False, COMPARE_ATOL)
    elif fig == "fig3":
        # curves are ordered by decreasing kappa
        ck.monotone("ibob_max_nondecreasing_as_kappa_decreases", "i_bob_holevo", "max_value",
                    True, COMPARE_ATOL)
        peaks = [s.first_peak for s in ck.stats("i_bob_holevo")]
        ok = None not in peaks and all(b > a for a, b in zip(peaks, peaks[1:]))
        ck.claim("ibob_first_peak_later_as_kappa_decreases", ok, f"first peak tau = {_fmt_list(peaks)}")
    elif fig == "fig5":
        ck.monotone("ibob_max_nondecreasing_in_delta", "i_bob_holevo", "max_value", True, COMPARE_ATOL)
        ck.monotone("ibob_min_nondecreasing_in_delta", "i_bob_holevo", "min_value", True, COMPARE_ATOL)
    elif fig == "fig6":
        ck.monotone("ibob_oscillations_nondecreasing_in_n", "i_bob_holevo", "maxima", True)
        ck.monotone("ibob_min_nondecreasing_in_n", "i_bob_holevo", "min_value", True, COMPARE_ATOL)
    elif fig == "fig7":
        (bitflip,) = _panel_curves("fig5", tau_max, steps)
        ph = ck.stats("i_bob_holevo")
        bf = [curve_stats(c, "i_bob_holevo") for c in bitflip]
        hi = all(p.max_value <= b.max_value + COMPARE_ATOL for p, b in zip(ph, bf))
        lo = all(p.min_value <= b.min_value + COMPARE_ATOL for p, b in zip(ph, bf))
        ck.claim("ibob_max_at_most_bitflip", hi,
                 f"phaseflip {_fmt_list([s.max_value for s in ph])} vs "
                 f"bitflip {_fmt_list([s.max_value for s in bf])}")
        ck.claim("ibob_min_at_most_bitflip", lo,
                 f"phaseflip {_fmt_list([s.min_value for s in ph])} vs "
                 f"bitflip {_fmt_list([s.min_value for s in bf])}")
    elif fig == "fig8":
        ck.monotone("icod_oscillations_nondecreasing_in_n", "i_cod_closed", "maxima", True)
        ck.monotone("ibob_oscillations_nondecreasing_in_n", "i_bob_holevo", "maxima", True)
    elif fig == "fig9":
        pairs = (("delta", panels[0], panels[2]), ("n", panels[1], panels[3]))
        for quantity in ("d_message_avg", "d_aggregate"):
            for sweep, type1, type2 in pairs:
                m1 = max(s.max_value for s in ck.stats(quantity, type1))
                m2 = max(s.max_value for s in ck.stats(quantity, type2))
                ck.claim(f"{quantity}_type1_max_below_type2_{sweep}_sweep", m1 < m2,
                         f"bitflip {m1:.6g} vs phaseflip {m2:.6g}")
    return report

