"""Seeded synthetic series for power studies and cross-implementation checks.

The generator is specified exactly so independent implementations can
reproduce it byte for byte:

uniform stage (counter-based splitmix64)
    GAMMA = 0x9E3779B97F4A7C15.  For draw i = 1, 2, ... the state is
    seed + i*GAMMA (mod 2^64), mixed by z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
    z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31.  The uniform is
    u_i = ((z >> 11) + 1) * 2^-53, in (0, 1].

normal stage (Box-Muller)
    Consecutive uniforms pair up: r = sqrt(-2 ln u1), a = TWO_PI * u2 with
    TWO_PI = 6.283185307179586; the pair yields r cos a then r sin a.

series stage
    Every kind consumes one contiguous normal stream n_1, n_2, ...:

    white-noise   v_t = offset + s * n_t
    random-walk   v_t = offset + s * (n_1 + ... + n_t)
    ar1           e_1 = s * n_1;  e_t = phi * e_{t-1} + s * n_t;
                  v_t = offset + e_t
    var-with-planted-causality
                  draws 2L normals: the first L are cause innovations
                  c_t, the last L effect innovations d_t.
                  cause:  x_t = offset + s * c_t
                  effect: e_1 = s * d_1;
                          e_t = phi * e_{t-1} + beta * (s * c_{t-lag}) + s * d_t
                          (the cross term enters once t > lag);
                          y_t = offset + e_t
                  The cause is returned as the pair's LGD series and the
                  effect as its RD series.

``clamp_to_rate`` truncates values into [0, 1] after generation and
reports how many points were moved; only clamped output carries the rate
flag, and only rate series can be written in the exchange CSV format.
Month grids always start at 2008-01.  Single-kind output is named (and
role-tagged) 'rd', since that is the series the downturn and unit-root
machinery consumes; rename it for other uses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple, Union

import numpy as np

from dlgdkit import _kernels
from dlgdkit.errors import InvalidSpec
from dlgdkit.series import AlignedPair, MonthIndex, MonthlySeries, month_range

#: All generated grids start here.
DEFAULT_START = MonthIndex(2008, 1)

#: Generated series must be long enough for the tests they feed.
MIN_LENGTH = 20


class SynthKind(Enum):
    WHITE_NOISE = "white-noise"
    RANDOM_WALK = "random-walk"
    AR1 = "ar1"
    VAR_CAUSALITY = "var-with-planted-causality"


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of one synthetic draw; validated eagerly.

    ``ar1_coefficient`` applies to the ar1 kind only; ``own_coefficient``,
    ``cross_coefficient`` and ``cross_lag`` to the planted-causality kind
    only.  Errors name the offending field.
    """

    kind: SynthKind
    length: int
    seed: int
    noise_std: float
    level_offset: float = 0.0
    clamp_to_rate: bool = False
    ar1_coefficient: Optional[float] = None
    own_coefficient: Optional[float] = None
    cross_coefficient: Optional[float] = None
    cross_lag: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SynthKind(self.kind))
        if not isinstance(self.length, int) or self.length < MIN_LENGTH:
            raise InvalidSpec(f"length must be an integer >= {MIN_LENGTH}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise InvalidSpec("seed must be a non-negative integer")
        if not self.noise_std > 0.0:
            raise InvalidSpec("noise_std must be positive")
        if not np.isfinite(self.level_offset):
            raise InvalidSpec("level_offset must be finite")
        is_ar1 = self.kind is SynthKind.AR1
        is_var = self.kind is SynthKind.VAR_CAUSALITY
        if is_ar1:
            if self.ar1_coefficient is None:
                raise InvalidSpec("ar1_coefficient is required for kind ar1")
            if not abs(self.ar1_coefficient) < 1.0:
                raise InvalidSpec("ar1_coefficient must satisfy |phi| < 1")
        elif self.ar1_coefficient is not None:
            raise InvalidSpec(f"ar1_coefficient does not apply to kind {self.kind.value}")
        if is_var:
            if self.own_coefficient is None:
                raise InvalidSpec("own_coefficient is required for planted causality")
            if not abs(self.own_coefficient) < 1.0:
                raise InvalidSpec("own_coefficient must satisfy |phi| < 1")
            if self.cross_coefficient is None:
                raise InvalidSpec("cross_coefficient is required for planted causality")
            if not np.isfinite(self.cross_coefficient):
                raise InvalidSpec("cross_coefficient must be finite")
            if self.cross_lag is None:
                raise InvalidSpec("cross_lag is required for planted causality")
            if not isinstance(self.cross_lag, int) or not 1 <= self.cross_lag < self.length:
                raise InvalidSpec("cross_lag must be an integer in [1, length)")
        else:
            for fieldname in ("own_coefficient", "cross_coefficient", "cross_lag"):
                if getattr(self, fieldname) is not None:
                    raise InvalidSpec(
                        f"{fieldname} does not apply to kind {self.kind.value}"
                    )

    @classmethod
    def from_dict(cls, data: Dict) -> "SynthSpec":
        """Build a spec from parsed JSON, rejecting unknown fields."""
        if not isinstance(data, dict):
            raise InvalidSpec("spec must be a JSON object")
        known = {
            "kind",
            "length",
            "seed",
            "noise_std",
            "level_offset",
            "clamp_to_rate",
            "ar1_coefficient",
            "own_coefficient",
            "cross_coefficient",
            "cross_lag",
        }
        unknown = set(data) - known
        if unknown:
            raise InvalidSpec(f"unknown spec fields: {', '.join(sorted(unknown))}")
        for required in ("kind", "length", "seed", "noise_std"):
            if required not in data:
                raise InvalidSpec(f"spec field {required} is required")
        try:
            kind = SynthKind(data["kind"])
        except ValueError:
            raise InvalidSpec(
                f"kind must be one of "
                f"{', '.join(k.value for k in SynthKind)}; got {data['kind']!r}"
            ) from None
        return cls(
            kind=kind,
            length=data["length"],
            seed=data["seed"],
            noise_std=data["noise_std"],
            level_offset=data.get("level_offset", 0.0),
            clamp_to_rate=bool(data.get("clamp_to_rate", False)),
            ar1_coefficient=data.get("ar1_coefficient"),
            own_coefficient=data.get("own_coefficient"),
            cross_coefficient=data.get("cross_coefficient"),
            cross_lag=data.get("cross_lag"),
        )

    @classmethod
    def from_json(cls, text: str) -> "SynthSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidSpec(f"spec is not valid JSON: {exc}") from None
        return cls.from_dict(data)


@dataclass(frozen=True)
class SynthInfo:
    """Generation metadata: points truncated by the rate clamp, per series."""

    truncated: Dict[str, int]


def _finish(
    values: np.ndarray, name: str, kind_label: Optional[str], spec: SynthSpec
) -> Tuple[MonthlySeries, int]:
    truncated = 0
    if spec.clamp_to_rate:
        below = values < 0.0
        above = values > 1.0
        truncated = int(below.sum() + above.sum())
        values = np.clip(values, 0.0, 1.0)
    series = MonthlySeries(
        name=name,
        months=month_range(DEFAULT_START, spec.length),
        values=values,
        weights=None,
        is_rate=spec.clamp_to_rate,
        kind=kind_label,
    )
    return series, truncated


def generate_with_info(
    spec: SynthSpec,
) -> Tuple[Union[MonthlySeries, AlignedPair], SynthInfo]:
    """Generate the series (or pair) plus truncation metadata."""
    length = spec.length
    std = spec.noise_std
    offset = spec.level_offset
    if spec.kind is SynthKind.VAR_CAUSALITY:
        normals = _kernels.normal_stream(spec.seed, 2 * length)
        cause_innov = normals[:length]
        effect_innov = normals[length:]
        cause_dev = std * cause_innov
        effect = np.empty(length)
        phi = spec.own_coefficient
        beta = spec.cross_coefficient
        lag = spec.cross_lag
        prev = 0.0
        for t in range(length):
            e = phi * prev + std * effect_innov[t]
            if t >= lag:
                e += beta * cause_dev[t - lag]
            effect[t] = e
            prev = e
        lgd_series, lgd_trunc = _finish(offset + cause_dev, "lgd", "lgd", spec)
        rd_series, rd_trunc = _finish(offset + effect, "rd", "rd", spec)
        pair = AlignedPair(rd=rd_series, lgd=lgd_series)
        return pair, SynthInfo(truncated={"lgd": lgd_trunc, "rd": rd_trunc})

    normals = _kernels.normal_stream(spec.seed, length)
    if spec.kind is SynthKind.WHITE_NOISE:
        values = offset + std * normals
    elif spec.kind is SynthKind.RANDOM_WALK:
        values = offset + std * np.cumsum(normals)
    else:  # AR1
        phi = spec.ar1_coefficient
        values = np.empty(length)
        prev = 0.0
        for t in range(length):
            prev = phi * prev + std * normals[t]
            values[t] = prev
        values = offset + values
    series, truncated = _finish(values, "rd", "rd", spec)
    return series, SynthInfo(truncated={"rd": truncated})


def generate(spec: SynthSpec) -> Union[MonthlySeries, AlignedPair]:
    """Generate the series (or pair) for a spec; see generate_with_info."""
    return generate_with_info(spec)[0]
