"""Run configuration: group, multiplicity, mode and suite knobs read from JSON."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction

from ..algebra import EXACT, FLOAT
from ..dunklops import DunklParams
from ..pairing import QuadSpec
from ..reflection import MultiplicityFunction, RootSystem, RootSystemError, preset


class ConfigError(ValueError):
    pass


def _decode(v, mode):
    # "1/2", "0.5", 2 and 0.5 all accepted; floats become their exact binary value
    q = Fraction(v) if not isinstance(v, str) else Fraction(v.strip())
    return q if mode == EXACT else float(q)


@dataclass(frozen=True)
class Config:
    group: dict
    orbit_values: tuple
    mode: str = EXACT
    n_max: int = 6
    seed: int = 0
    quad_spec: QuadSpec = QuadSpec()
    family: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)

    def root_system(self) -> RootSystem:
        g = self.group
        try:
            if "preset" in g:
                return preset(g["preset"], N=g.get("N"), m=g.get("m"), mode=self.mode)
            if "positive_roots" in g:
                roots = [[_decode(c, self.mode) for c in r] for r in g["positive_roots"]]
                if not roots:
                    raise ConfigError("positive_roots is empty")
                return RootSystem(len(roots[0]), tuple(tuple(r) for r in roots), self.mode,
                                  g.get("name", "custom"))
        except (RootSystemError, TypeError) as err:
            raise ConfigError(str(err)) from err
        except ValueError as err:
            if isinstance(err, ConfigError):
                raise
            raise ConfigError(str(err)) from err
        raise ConfigError("group needs 'preset' or 'positive_roots'")

    def params(self) -> DunklParams:
        roots = self.root_system()
        try:
            values = tuple(_decode(v, self.mode) for v in self.orbit_values)
            k = MultiplicityFunction(roots, values)
        except (ValueError, TypeError) as err:
            raise ConfigError(f"multiplicity: {err}") from err
        return DunklParams(roots, k, self.n_max)

    def with_overrides(self, **kw) -> "Config":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw) if kw else self

    def describe(self) -> dict:
        return {
            "group": self.group,
            "multiplicity": {"orbit_values": [str(v) for v in self.orbit_values]},
            "mode": self.mode,
            "n_max": self.n_max,
            "seed": self.seed,
        }


def config_from_dict(data: dict) -> Config:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    group = data.get("group")
    if not isinstance(group, dict):
        raise ConfigError("missing 'group' object")
    mult = data.get("multiplicity", {})
    values = mult.get("orbit_values") if isinstance(mult, dict) else None
    if not isinstance(values, list) or not values:
        raise ConfigError("multiplicity.orbit_values must be a nonempty list")
    mode = data.get("mode", EXACT)
    if mode not in (EXACT, FLOAT):
        raise ConfigError(f"mode must be 'exact' or 'float', got {mode!r}")
    try:
        n_max = int(data.get("n_max", 6))
        seed = int(data.get("seed", 0))
        quad = QuadSpec.from_dict(data.get("quad_spec"))
    except (TypeError, ValueError) as err:
        raise ConfigError(str(err)) from err
    if n_max < 0:
        raise ConfigError("n_max must be nonnegative")
    cfg = Config(group, tuple(str(v) for v in values), mode, n_max, seed, quad,
                 dict(data.get("family", {})), dict(data.get("grid", {})))
    cfg.params()  # validate now rather than halfway through a suite
    return cfg


def load_config(path) -> Config:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path} is not valid JSON: {err}") from err
    return config_from_dict(data)
