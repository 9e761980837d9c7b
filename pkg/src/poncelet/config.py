"""Run configuration: INI-style files, presets and flag overrides."""

from __future__ import annotations

import configparser
import dataclasses
import io
from dataclasses import dataclass, fields

from .errors import ConfigError
from .ovals import Conic, ImplicitOval, Superellipse

# field -> section in the INI file
_SECTIONS = {
    "inner": "pair", "inner_p": "pair", "inner_c": "pair", "conic": "pair",
    "outer_p": "pair", "k": "pair",
    "k_start": "grid", "k_stop": "grid", "k_step": "grid", "resolution": "grid",
    "budget": "estimator", "tol": "estimator", "max_denominator": "estimator",
    "period": "periodic", "free_k": "periodic", "sweep_points": "periodic",
    "seed_theta": "iterate", "count": "iterate",
    "samples": "conjugacy",
    "seed": "run", "out": "run",
}


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs; defaults describe the quartic family at k = 2."""

    inner: str = "superellipse"
    inner_p: float = 4.0
    inner_c: float = 1.0
    conic: tuple = ()
    outer_p: float = 4.0
    k: float = 2.0
    k_start: float = 1.4
    k_stop: float = 21.0
    k_step: float = 0.05
    resolution: float = 1e-3
    budget: int = 1 << 20
    tol: float = 1e-10
    max_denominator: int = 64
    period: int = 3
    free_k: bool = True
    sweep_points: int = 400
    seed_theta: float = 0.7853981633974483
    count: int = 30
    samples: int = 64
    seed: int = 0
    out: str = "out"

    def __post_init__(self):
        for name in ("tol", "resolution", "k_step"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.inner not in ("superellipse", "conic"):
            raise ConfigError(f"inner must be 'superellipse' or 'conic', got {self.inner!r}")
        if self.inner == "conic" and len(self.conic) != 6:
            raise ConfigError("conic needs six coefficients A, B, C, D, E, F")
        for name in ("budget", "max_denominator", "count", "samples", "sweep_points"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1")
        if self.period < 2:
            raise ConfigError("period must be at least 2")

    # --- model objects ---

    def inner_oval(self) -> ImplicitOval:
        try:
            if self.inner == "conic":
                return Conic(*self.conic)
            return Superellipse(self.inner_p, self.inner_c)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def outer_family(self) -> Superellipse:
        try:
            return Superellipse(self.outer_p, 1.0)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    # --- text form ---

    def to_ini(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        for f in fields(self):
            sec = _SECTIONS[f.name]
            if not cp.has_section(sec):
                cp.add_section(sec)
            cp.set(sec, f.name, _format(getattr(self, f.name)))
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str, base: "RunConfig | None" = None) -> "RunConfig":
        cp = configparser.ConfigParser(interpolation=None)
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse config: {exc}") from exc
        known = {f.name: f for f in fields(cls)}
        values = {}
        for sec in cp.sections():
            for key, raw in cp.items(sec):
                if key not in known:
                    raise ConfigError(f"unknown key {key!r} in section [{sec}]")
                if _SECTIONS[key] != sec:
                    raise ConfigError(f"key {key!r} belongs in section [{_SECTIONS[key]}]")
                values[key] = _parse(known[key], raw)
        return (base or cls()).replace(**values)


def _format(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ", ".join(repr(float(c)) for c in v)
    return str(v)


def _parse(f: dataclasses.Field, raw: str):
    raw = raw.strip()
    kind = type(f.default)
    try:
        if kind is bool:
            low = raw.lower()
            if low not in ("true", "false", "yes", "no", "1", "0"):
                raise ValueError(raw)
            return low in ("true", "yes", "1")
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is tuple:
            return tuple(float(c) for c in raw.split(",") if c.strip())
        return raw
    except ValueError:
        raise ConfigError(f"bad value for {f.name}: {raw!r}") from None


PRESETS: dict[str, dict] = {
    # quartic family, coarse staircase over the whole range
    "table1": dict(k_start=1.4, k_stop=21.0, k_step=0.05, tol=1e-8),
    # the narrow 1/6 plateau needs a fine grid
    "table1-sixth": dict(k_start=1.55, k_stop=1.57, k_step=1e-4, tol=1e-8, resolution=1e-5),
    # 3-periodic orbits of the quartic family (k*, the asymmetric middle one, k~)
    "figure3": dict(period=3, k=20.1961, free_k=True),
    # 6-periodic orbits near k = 1.5588 and 1.5596
    "figure4": dict(period=6, k=1.5592, free_k=True),
    # ellipse inside the unit circle, thirty points of an orbit
    "figure5": dict(inner="conic", conic=Conic.from_axes(0.55, 0.3, 0.1, -0.05, 0.6).coefficients,
                    outer_p=2.0, k=1.0, count=30, seed_theta=0.0),
    # unit circle inside x^4 + y^4 = 2: the attracting square
    "prop4": dict(inner_p=2.0, inner_c=1.0, outer_p=4.0, k=2.0, count=400, seed_theta=0.3),
    # concentric circles: smooth rotation function, no plateaus
    "circles": dict(inner_p=2.0, inner_c=1.0, outer_p=2.0, k=2.0, k_start=1.5, k_stop=9.0,
                    k_step=0.25),
}


def preset(name: str) -> RunConfig:
    try:
        return RunConfig(**PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}") from None
