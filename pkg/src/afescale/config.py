"""Analysis configuration: YAML documents with explicit unit suffixes.

Physical values are written as ``"<number> <unit>"`` strings, e.g.
``"-70 dBm"``, ``"35 mW"``, ``"20 MHz"``, ``"10 dB"``. Ratios may also be
plain numbers (linear). Everything is converted to linear SI units while
the document is validated, so the rest of the package never sees dB.
Unknown keys are rejected.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any, Literal

import numpy as np
import yaml
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, ValidationError, model_validator

from afescale.errors import AfeScaleError

__all__ = [
    "ConfigError",
    "parse_quantity",
    "AnalysisConfig",
    "load_config",
    "parse_config",
]


class ConfigError(AfeScaleError):
    """Invalid configuration document."""


_NUMBER = r"[-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?|[-+]?inf"
_QUANTITY = re.compile(rf"^\s*(?P<num>\d+/\d+|{_NUMBER})\s*(?P<unit>[A-Za-zµ%/0-9]*)\s*$")

_SCALE = {"f": 1e-15, "p": 1e-12, "n": 1e-9, "u": 1e-6, "µ": 1e-6, "m": 1e-3, "": 1.0,
          "k": 1e3, "M": 1e6, "G": 1e9}

# unit -> (kind, converter)
_UNITS: dict[str, tuple[str, Any]] = {}


def _register(kind: str, base: str, prefixes: tuple[str, ...]) -> None:
    for p in prefixes:
        _UNITS[p + base] = (kind, lambda x, s=_SCALE[p]: x * s)


_register("power", "W", ("f", "p", "n", "u", "µ", "m", "", "k"))
_register("frequency", "Hz", ("", "k", "M", "G"))
_register("bitrate", "bps", ("", "k", "M", "G"))
_UNITS["bit/J"] = ("efficiency", lambda x: x)
_UNITS["Mbit/J"] = ("efficiency", lambda x: x * 1e6)
_UNITS["Gbit/J"] = ("efficiency", lambda x: x * 1e9)
_UNITS["dBm"] = ("power", lambda x: 10.0 ** (x / 10.0) * 1e-3)
_UNITS["dBW"] = ("power", lambda x: 10.0 ** (x / 10.0))
_UNITS["dB"] = ("ratio", lambda x: 10.0 ** (x / 10.0))
_UNITS["x"] = ("ratio", lambda x: x)
_UNITS["K"] = ("temperature", lambda x: x)
_UNITS["ohm"] = ("resistance", lambda x: x)
_UNITS["V2"] = ("voltage_sq", lambda x: x)
_UNITS["%"] = ("percent", lambda x: x)


def parse_quantity(value: Any, kind: str) -> float:
    """Convert ``value`` to a linear SI float of the given kind.

    Bare numbers are accepted only for ratios; all other kinds need a unit.
    """
    if isinstance(value, bool):
        raise ValueError(f"expected a {kind}, got a boolean")
    if isinstance(value, (int, float)):
        if kind in ("ratio", "percent"):
            return float(value)
        raise ValueError(f"{kind} needs an explicit unit, e.g. '{_example(kind)}'")
    if not isinstance(value, str):
        raise ValueError(f"expected a {kind} as number or string, got {type(value).__name__}")
    m = _QUANTITY.match(value)
    if not m:
        raise ValueError(f"cannot parse {value!r} as a quantity")
    num_text, unit = m.group("num"), m.group("unit")
    number = float(Fraction(num_text)) if "/" in num_text else float(num_text)
    if unit == "":
        if kind in ("ratio", "percent"):
            return number
        raise ValueError(f"{kind} needs an explicit unit, e.g. '{_example(kind)}'")
    if unit not in _UNITS:
        raise ValueError(f"unknown unit {unit!r} in {value!r}")
    unit_kind, convert = _UNITS[unit]
    if unit_kind != kind:
        raise ValueError(f"unit {unit!r} is a {unit_kind}, expected a {kind}")
    return float(convert(number))


def _example(kind: str) -> str:
    return {"power": "-30 dBm", "frequency": "20 MHz", "bitrate": "26.7 Mbps",
            "temperature": "290 K", "resistance": "50 ohm", "voltage_sq": "1e-3 V2",
            "efficiency": "0.76 Gbit/J"}.get(kind, "1")


def _quantity(kind: str):
    return BeforeValidator(lambda v: parse_quantity(v, kind))


Ratio = Annotated[float, _quantity("ratio")]
Power = Annotated[float, _quantity("power")]
Frequency = Annotated[float, _quantity("frequency")]
Bitrate = Annotated[float, _quantity("bitrate")]
Temperature = Annotated[float, _quantity("temperature")]
Resistance = Annotated[float, _quantity("resistance")]
VoltageSq = Annotated[float, _quantity("voltage_sq")]
Efficiency = Annotated[float, _quantity("efficiency")]


def _grid(kind: str):
    """A list of quantities, or {start, stop, num[, log]} expanded to a list."""

    def expand(v):
        if isinstance(v, dict):
            extra = set(v) - {"start", "stop", "num", "log"}
            if extra:
                raise ValueError(f"unknown grid keys {sorted(extra)}")
            try:
                start, stop, num = v["start"], v["stop"], int(v["num"])
            except KeyError as exc:
                raise ValueError(f"grid needs start, stop and num (missing {exc})") from None
            a, b = parse_quantity(start, kind), parse_quantity(stop, kind)
            # Grids written in dB are uniform in dB.
            in_db = any(isinstance(x, str) and x.strip().endswith("dB") for x in (start, stop))
            log = bool(v.get("log", in_db))
            pts = np.geomspace(a, b, num) if log else np.linspace(a, b, num)
            return [float(x) for x in pts]
        if not isinstance(v, list):
            v = [v]
        return [parse_quantity(x, kind) for x in v]

    return BeforeValidator(expand)


RatioGrid = Annotated[list[float], _grid("ratio")]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ConstantsSection(_Model):
    temperature: Temperature = 290.0
    input_resistance: Resistance = 50.0


class MonteCarloSection(_Model):
    samples: int = Field(1_000_000, ge=1)
    seed: int = 0
    confidence: float = Field(0.99, gt=0, lt=1)
    workers: int = Field(1, ge=1)


class BlockSection(_Model):
    name: str = "block"
    p_c: Power


class TargetsSection(_Model):
    noise_factor: Ratio = Field(description="total noise factor; '10 dB' means a 10 dB noise figure")
    v_iip3_sq: VoltageSq


class ChainSection(_Model):
    blocks: list[BlockSection] = Field(min_length=1)
    targets: TargetsSection | None = None
    gain_sets: list[list[Ratio]] = Field(default_factory=list)
    starts: int = Field(16, ge=1)
    seed: int = 0


class ScenarioSection(_Model):
    sndr: Ratio
    bandwidth: Frequency
    p_s: Power
    p_i: Power
    alpha_im3: Ratio = 0.1


class ScaleSection(_Model):
    law: Literal["bandwidth", "sndr", "signal", "interference"] | None = None
    sigma: Ratio | None = None
    f1: Ratio | None = None
    pre: ScenarioSection | None = None
    post: ScenarioSection | None = None

    @model_validator(mode="after")
    def _one_form(self):
        law_form = self.law is not None or self.sigma is not None
        pair_form = self.pre is not None or self.post is not None
        if law_form == pair_form:
            raise ValueError("give either law/sigma/f1 or a pre/post scenario pair")
        if law_form and (self.law is None or self.sigma is None):
            raise ValueError("law form needs both 'law' and 'sigma'")
        if law_form and self.law != "interference" and self.f1 is None:
            raise ValueError(f"law {self.law!r} needs 'f1' (pre-scaling noise factor)")
        if pair_form and (self.pre is None or self.post is None):
            raise ValueError("pair form needs both 'pre' and 'post'")
        return self


class QamPair(_Model):
    m1: int
    pe1: float = Field(gt=0, lt=1)
    m2: int
    pe2: float = Field(gt=0, lt=1)


class QamSweep(_Model):
    m1: int
    pe1: float = Field(gt=0, lt=1)
    m2: list[int]
    pe2: Annotated[list[float], _grid("ratio")]


class QamSection(_Model):
    pairs: list[QamPair] = Field(default_factory=list)
    sweep: QamSweep | None = None
    mu: RatioGrid = Field(default_factory=lambda: [math.inf])


class CodeReference(_Model):
    afe_power: Power | None = None
    total_power: Power | None = None
    efficiency: Efficiency | None = None


class CodeSection(_Model):
    label: str
    r_c: Ratio
    g_c: Ratio
    decoder_power: Power
    bitrate: Bitrate | None = None
    reference: CodeReference | None = None


class CodingSweep(_Model):
    rates: list[Ratio]
    g_c: RatioGrid
    mu: RatioGrid = Field(default_factory=lambda: [math.inf])


class CodingSection(_Model):
    uncoded_afe_power: Power
    uncoded_bitrate: Bitrate
    mu: Ratio = math.inf
    systems: list[CodeSection] = Field(default_factory=list)
    uncoded_reference: CodeReference | None = None
    tolerance: float = Field(0.03, gt=0)
    sweep: CodingSweep | None = None


class FadingSection(_Model):
    omega: list[float]
    mu: RatioGrid
    policies: list[Literal["fixed", "two-step", "continuous"]] = Field(
        default_factory=lambda: ["continuous", "two-step"]
    )
    sndr_min: Ratio = 1.0
    alpha_im3: Ratio = 0.1
    check_mc: bool = True

    @model_validator(mode="after")
    def _omegas(self):
        for w in self.omega:
            if not 0 < w < 1:
                raise ValueError(f"outage probability {w!r} is not in (0, 1)")
        for m in self.mu:
            if not m >= 1:
                raise ValueError(f"tuning range {m!r} is below 1 (0 dB)")
        return self


class InterferenceReference(_Model):
    delta: float
    mu: Ratio
    savings_pct: float
    savings_tolerance_pp: float = 2.0
    adaptive_power: Power | None = None
    sensor_total_power: Power | None = None
    power_rel_tolerance: float = 0.05
    sensor_savings_pct: float | None = None
    sensor_savings_tolerance_pp: float = 5.0


class InterferenceSection(_Model):
    delta: RatioGrid
    mu: RatioGrid
    p_i_wc: Power = 1e-3
    baseline_power: Power | None = None
    sensor_power: Power = 0.0
    reference: InterferenceReference | None = None

    @model_validator(mode="after")
    def _ranges(self):
        for d in self.delta:
            if not 0 <= d <= 1:
                raise ValueError(f"probability {d!r} is not in [0, 1]")
        for m in self.mu:
            if not m >= 1:
                raise ValueError(f"tuning range {m!r} is below 1 (0 dB)")
        return self


class AnalysisConfig(_Model):
    constants: ConstantsSection = ConstantsSection()
    monte_carlo: MonteCarloSection = MonteCarloSection()
    chain: ChainSection | None = None
    scale: ScaleSection | None = None
    qam: QamSection | None = None
    coding: CodingSection | None = None
    fading: FadingSection | None = None
    interference: InterferenceSection | None = None


def _node_line(root: yaml.Node | None, loc: tuple) -> int | None:
    """Line (1-based) of the YAML node at a pydantic error location."""
    node, line = root, None
    for key in loc:
        if node is None:
            break
        line = node.start_mark.line + 1
        if isinstance(node, yaml.MappingNode):
            node = next((v for k, v in node.value if k.value == key), None)
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            node = node.value[key]
        else:
            node = None
    if node is not None:
        line = node.start_mark.line + 1
    return line


def parse_config(text: str, source: str = "<config>") -> AnalysisConfig:
    try:
        data = yaml.safe_load(text) or {}
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{source}: invalid YAML: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    try:
        return AnalysisConfig.model_validate(data)
    except ValidationError as exc:
        lines = []
        for err in exc.errors():
            loc = tuple(x for x in err["loc"] if not (isinstance(x, str) and x.startswith("function-")))
            where = ".".join(str(x) for x in loc) or "<root>"
            line = _node_line(root, loc)
            prefix = f"{source}:{line}" if line else source
            msg = err["msg"].removeprefix("Value error, ")
            lines.append(f"{prefix}: {where}: {msg}")
        raise ConfigError("\n".join(lines)) from None


def load_config(path: str | Path) -> AnalysisConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, str(path))
