"""Command-line front end: sweeps, figure presets and trend checks to CSV.

Exit status: 0 on success, 1 on runtime or I/O failure, 2 on usage or
validation errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Sequence

from qdensecoding import __version__
from qdensecoding.coding import FIDELITY_NOTE, Protocol
from qdensecoding.dynamics import COEFFICIENT_NOTE, DELTA_RANGE, KAPPA_RANGE, Initial, SystemParams
from qdensecoding.errors import ValidationError
from qdensecoding.experiments import (
    DEFAULT_STEPS,
    DEFAULT_TAU_MAX,
    FIGURES,
    InfoRecord,
    SweepSpec,
    figure_preset,
    run_sweep,
    trend_check,
)

MODES = ("sweep", "preset", "trends")
PROTOCOLS = ("perfect", "bitflip", "phaseflip")
INITIALS = ("excited", "ground")
CSV_COLUMNS = ("tau", "curve", "i_cod_closed", "i_bob_holevo", "s_coded", "d_message_avg", "d_aggregate")

# flags that only make sense for --mode sweep
_SWEEP_ONLY = ("protocol", "initial", "n", "delta", "kappa", "q")


@dataclass(frozen=True)
class RunConfig:
    mode: str = "sweep"
    preset: str | None = None
    protocol: str = "perfect"
    initial: str = "excited"
    n: tuple[int, ...] = (2,)
    delta: tuple[float, ...] = (0.0,)
    kappa: tuple[float, ...] = (2.5,)
    q: tuple[float, ...] = ()
    tau_max: float = DEFAULT_TAU_MAX
    steps: int = DEFAULT_STEPS
    out: str = "-"

    def protocol_obj(self, q: float | None = None) -> Protocol:
        if self.protocol == "bitflip":
            return Protocol.bit_flip(self.q[0] if q is None else q)
        return Protocol(self.protocol)

    def sweep_specs(self) -> tuple[SweepSpec, ...]:
        if self.mode != "sweep":
            return figure_preset(self.preset, self.tau_max, self.steps)
        base = SystemParams(self.n[0], self.delta[0], self.kappa[0], Initial(self.initial))
        vary = [("delta", self.delta)]
        for name in ("n", "kappa", "q"):
            values = getattr(self, name)
            if len(values) > 1:
                vary.append((name, values))
        return (SweepSpec(self.protocol_obj(), base, self.tau_max, self.steps, tuple(vary)),)

    def to_config_text(self) -> str:
        """Render as a key=value file that :func:`parse_args` reads back unchanged."""
        lines = [f"mode={self.mode}"]
        if self.preset is not None:
            lines.append(f"preset={self.preset}")
        if self.mode == "sweep":
            lines += [f"protocol={self.protocol}", f"initial={self.initial}"]
            for name in ("n", "delta", "kappa", "q"):
                values = getattr(self, name)
                if values:
                    lines.append(f"{name}=" + ",".join(repr(v) for v in values))
        lines += [f"tau-max={self.tau_max!r}", f"steps={self.steps}", f"out={self.out}"]
        return "\n".join(lines) + "\n"


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse ``key=value`` lines; ``#`` starts a comment, blank lines are skipped."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("_", "-")] = value
    return values


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qdensecoding",
        description="Dense-coding information measures over a Cooper-pair/cavity channel.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", help="key=value file; command-line flags override it")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--preset", help=f"figure id, one of {', '.join(FIGURES)}")
    p.add_argument("--protocol", choices=PROTOCOLS)
    p.add_argument("--initial", choices=INITIALS)
    p.add_argument("--n", action="append", help="photon number (repeat to sweep)")
    p.add_argument("--delta", action="append", help="detuning (repeat to sweep)")
    p.add_argument("--kappa", action="append", help="capacitance ratio (repeat to sweep)")
    p.add_argument("--q", action="append", help="bit-flip success probability (repeat to sweep)")
    p.add_argument("--tau-max", dest="tau_max")
    p.add_argument("--steps")
    p.add_argument("--out", help="output CSV path, '-' for standard output (default)")
    return p


def _split(value) -> list[str]:
    chunks = value if isinstance(value, list) else [value]
    return [part.strip() for chunk in chunks for part in chunk.split(",") if part.strip()]


def _number(parser, flag: str, text: str, kind):
    try:
        return kind(text)
    except ValueError:
        parser.error(f"{flag}: malformed number {text!r}")


def parse_args(argv: Sequence[str] | None = None) -> RunConfig:
    """Resolve command-line flags (over an optional config file) into a RunConfig.

    Usage and validation errors exit with status 2 and name the flag.
    """
    parser = _build_parser()
    ns = parser.parse_args(argv)
    raw: dict[str, object] = {}
    if ns.config:
        try:
            file_values = read_config_file(ns.config)
        except (OSError, ValidationError) as exc:
            parser.error(f"--config: {exc}")
        known = {a.dest.replace("_", "-") for a in parser._actions} - {"help", "version", "config"}
        for key in file_values:
            if key not in known:
                parser.error(f"--config: unknown key {key!r}")
        raw.update({k.replace("-", "_"): v for k, v in file_values.items()})
    for f in fields(RunConfig):
        value = getattr(ns, f.name)
        if value is not None:
            raw[f.name] = value

    def flag(name):
        return "--" + name.replace("_", "-")

    mode = raw.get("mode", "sweep")
    if mode not in MODES:
        parser.error(f"--mode: invalid choice {mode!r}")
    kw: dict[str, object] = {"mode": mode}

    preset = raw.get("preset")
    if mode == "preset" and preset is None:
        parser.error("--preset is required with --mode preset")
    if preset is not None:
        if mode == "sweep":
            parser.error("--preset only applies to --mode preset or trends")
        if preset not in FIGURES:
            parser.error(f"--preset: unknown figure {preset!r}; expected one of {', '.join(FIGURES)}")
        kw["preset"] = preset
    if mode != "sweep":
        for name in _SWEEP_ONLY:
            if name in raw:
                parser.error(f"{flag(name)} only applies to --mode sweep")

    for name, choices in (("protocol", PROTOCOLS), ("initial", INITIALS)):
        if name in raw:
            if raw[name] not in choices:
                parser.error(f"{flag(name)}: invalid choice {raw[name]!r}")
            kw[name] = raw[name]

    for name, kind in (("n", int), ("delta", float), ("kappa", float), ("q", float)):
        if name in raw:
            items = _split(raw[name])
            if not items:
                parser.error(f"{flag(name)}: no values given")
            kw[name] = tuple(_number(parser, flag(name), t, kind) for t in items)
    for name, kind in (("tau_max", float), ("steps", int)):
        if name in raw:
            kw[name] = _number(parser, flag(name), str(raw[name]), kind)
    if "out" in raw:
        kw["out"] = str(raw["out"])

    cfg = RunConfig(**kw)
    _validate(parser, cfg, flag)
    return cfg


def _validate(parser, cfg: RunConfig, flag) -> None:
    for v in cfg.n:
        if v < 0:
            parser.error(f"--n: photon number must be >= 0, got {v}")
    lo, hi = DELTA_RANGE
    for v in cfg.delta:
        if not lo <= v <= hi:
            parser.error(f"--delta: must lie in [{lo:g}, {hi:g}], got {v!r}")
    lo, hi = KAPPA_RANGE
    for v in cfg.kappa:
        if not lo < v <= hi:
            parser.error(f"--kappa: must lie in ({lo:g}, {hi:g}], got {v!r}")
    for v in cfg.q:
        if not 0.0 <= v <= 1.0:
            parser.error(f"--q: must lie in [0, 1], got {v!r}")
    if cfg.mode == "sweep":
        if cfg.protocol == "bitflip" and not cfg.q:
            parser.error("--q is required with --protocol bitflip")
        if cfg.protocol != "bitflip" and cfg.q:
            parser.error("--q only applies to --protocol bitflip")
    if not cfg.tau_max > 0:
        parser.error(f"--tau-max: must be positive, got {cfg.tau_max!r}")
    if cfg.steps < 2:
        parser.error(f"--steps: must be at least 2, got {cfg.steps}")
    if cfg.mode == "trends" and cfg.preset is None:
        return  # every figure
    try:
        cfg.sweep_specs()
    except ValidationError as exc:
        parser.error(str(exc))


def format_number(x) -> str:
    """Twelve significant digits, ``.`` decimal point, ``NA`` for missing."""
    if x is None:
        return "NA"
    s = f"{float(x) + 0.0:.12g}"
    if not any(ch in s for ch in ".ein"):
        s += ".0"
    return s


def emit_csv(records: Sequence[InfoRecord], destination="-", metadata: dict | None = None) -> None:
    """Write records as CSV preceded by ``#`` metadata comment lines.

    ``destination`` is a path, ``"-"`` for standard output, or an open text
    stream.
    """
    if not records:
        raise ValidationError("no records to write")
    buf = io.StringIO()
    meta = {"fidelity": FIDELITY_NOTE, "coefficients": COEFFICIENT_NOTE}
    meta.update(metadata or {})
    for key, value in meta.items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        m = rec.measures
        writer.writerow([
            format_number(rec.tau),
            rec.curve,
            format_number(m.i_cod_closed),
            format_number(m.i_bob_holevo),
            format_number(m.s_coded),
            format_number(m.d_message_avg),
            format_number(m.d_aggregate),
        ])
    text = buf.getvalue()
    if hasattr(destination, "write"):
        destination.write(text)
    elif str(destination) == "-":
        sys.stdout.write(text)
    else:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _spec_metadata(specs: Sequence[SweepSpec]) -> dict[str, str]:
    meta = {}
    for i, spec in enumerate(specs):
        b = spec.base
        key = f"sweep[{spec.panel or i}]"
        vary = "; ".join(f"{name}=" + ",".join(f"{v!r}" for v in values) for name, values in spec.vary)
        meta[key] = (
            f"protocol={spec.protocol.label} initial={b.initial.value} n={b.n} "
            f"delta={b.delta_raw!r} kappa={b.kappa!r} tau_max={spec.tau_max!r} "
            f"steps={spec.steps} vary=[{vary}]"
        )
    return meta


def _write_text(text: str, destination: str) -> None:
    if destination == "-":
        sys.stdout.write(text)
    else:
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    cfg = parse_args(argv)
    try:
        if cfg.mode == "trends":
            figs = (cfg.preset,) if cfg.preset else FIGURES
            lines = []
            for fig in figs:
                lines.extend(trend_check(fig, cfg.tau_max, cfg.steps).lines())
            _write_text("\n".join(lines) + "\n", cfg.out)
            return 0
        specs = cfg.sweep_specs()
        records: list[InfoRecord] = []
        for spec in specs:
            records.extend(run_sweep(spec))
        meta = {"mode": cfg.mode}
        if cfg.preset:
            meta["preset"] = cfg.preset
        meta.update(_spec_metadata(specs))
        emit_csv(records, cfg.out, meta)
    except OSError as exc:
        print(f"qdensecoding: cannot write {cfg.out}: {exc.strerror or exc}", file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"qdensecoding: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - report and map to the runtime exit status
        print(f"qdensecoding: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
