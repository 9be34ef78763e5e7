"""Run configuration files.

Grammar: one ``key = value`` per line; ``#`` starts a comment; values are
Python literals (numbers, strings, booleans, lists, tuples).  Recognised keys:

    alpha      rotation number of the diffeomorphism, in (0, 1)
    alpha_cf   partial quotients [a1, a2, ...] of the rotation number
    lift       [(k, a_k, phi_k), ...] or [(k, a_k), ...] (phase 0)
    n          list of levels, or n_min / n_max for a range (n_max also
               bounds the growth table)
    N, M       level and frequency cutoffs (M may be a list for sweeps)
    eta        a value or a list of values in [0, 1]
    count      number of eigenvalues compared in hill-compare
    steps      RK4 steps per period for the monodromy
    printed_coefficient   also run the eta-equation without the factor n in
                          its zeroth-order term (comparison variant)
    elements   list of generators: "z^m" (diagonal), "shift^l", "identity"
    grid_size  sampling grid of the growth sequence
    l, K, polys           circle-example shift, cutoff and random-polynomial count
    variant    "standard" or "growth_weighted"
    tolerance  default tolerance for the regression checks

``alpha`` and ``alpha_cf`` are mutually exclusive; without either the
golden-mean rotation number is used.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass, field
from pathlib import Path

from .circle import GOLDEN, CircleDiffeo, CircleLift, make_diffeo
from .errors import ConfigError
from .fredholm import ElementSpec
from .liouville import ContinuedFraction

_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.+?)\s*$")

KNOWN_KEYS = {
    "alpha", "alpha_cf", "lift", "n", "n_min", "n_max", "N", "M", "eta", "count",
    "steps", "printed_coefficient", "elements", "grid_size", "l", "K", "polys",
    "variant", "tolerance", "seed",
}


def parse_text(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = m.groups()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            out[key] = ast.literal_eval(value)
        except (ValueError, SyntaxError) as exc:
            raise ConfigError(f"line {lineno}: cannot parse value for {key!r}") from exc
    return out


def _as_list(x):
    return list(x) if isinstance(x, (list, tuple)) else [x]


def _int(values, key, lo=None):
    for v in values:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{key} must be integer, got {v!r}")
        if lo is not None and v < lo:
            raise ConfigError(f"{key} must be >= {lo}, got {v}")
    return values


def _parse_element(token: str, N: int) -> ElementSpec:
    token = token.strip().replace(" ", "")
    if token == "identity":
        return ElementSpec.identity(N)
    m = re.fullmatch(r"z\^(-?\d+)", token)
    if m:
        return ElementSpec.monomial(int(m.group(1)), N)
    m = re.fullmatch(r"shift\^(-?\d+)", token)
    if m:
        return ElementSpec.shift(int(m.group(1)), N)
    raise ConfigError(f"unknown element {token!r}; use 'z^m', 'shift^l' or 'identity'")


@dataclass
class RunConfig:
    rotation_number: float = GOLDEN
    lift: tuple = ()
    levels: list = field(default_factory=lambda: [1, 2, 3])
    N: int = 4
    Ms: list = field(default_factory=lambda: [32])
    etas: list = field(default_factory=lambda: [0.0])
    count: int = 10
    steps: int = 8192
    printed_coefficient: bool = False
    elements: list = field(default_factory=list)
    element_names: list = field(default_factory=list)
    n_max: int = 10
    grid_size: int = 4096
    l: int = 2
    K: int = 10
    polys: int = 20
    seed: int = 0
    variant: str = "standard"
    tolerance: float | None = None

    @property
    def M(self) -> int:
        return self.Ms[0]

    def diffeo(self) -> CircleDiffeo:
        return make_diffeo(CircleLift(self.lift), self.rotation_number)


def build(raw: dict) -> RunConfig:
    """Validate parsed key-values and turn them into a :class:`RunConfig`."""
    cfg = RunConfig()
    if "alpha" in raw and "alpha_cf" in raw:
        raise ConfigError("give either alpha or alpha_cf, not both")
    if "alpha" in raw:
        a = raw["alpha"]
        if isinstance(a, bool) or not isinstance(a, (int, float)) or not 0 < a < 1:
            raise ConfigError(f"alpha must be a decimal in (0, 1), got {a!r}")
        cfg.rotation_number = float(a)
    if "alpha_cf" in raw:
        q = _int(_as_list(raw["alpha_cf"]), "alpha_cf", lo=1)
        if len(q) < 2:
            raise ConfigError("alpha_cf needs at least two partial quotients")
        cfg.rotation_number = ContinuedFraction(tuple(q)).to_float()
    if "lift" in raw:
        modes = []
        for item in _as_list(raw["lift"]):
            if not isinstance(item, (list, tuple)) or len(item) not in (2, 3):
                raise ConfigError(f"lift entries are (k, a) or (k, a, phi), got {item!r}")
            k, a, *phi = item
            _int([k], "lift frequency", lo=1)
            modes.append((k, float(a), float(phi[0]) if phi else 0.0))
        cfg.lift = tuple(modes)
    if "n" in raw:
        cfg.levels = _int(_as_list(raw["n"]), "n")
    elif "n_min" in raw or "n_max" in raw:
        lo, hi = raw.get("n_min", 1), raw.get("n_max", 3)
        _int([lo, hi], "n range")
        cfg.levels = list(range(lo, hi + 1))
    if "N" in raw:
        cfg.N = _int([raw["N"]], "N", lo=1)[0]
    if "M" in raw:
        cfg.Ms = _int(_as_list(raw["M"]), "M", lo=8)
    if "eta" in raw:
        etas = [float(e) for e in _as_list(raw["eta"])]
        if any(not 0.0 <= e <= 1.0 for e in etas):
            raise ConfigError("eta values must lie in [0, 1]")
        cfg.etas = etas
    for key in ("count", "steps", "n_max", "grid_size", "l", "K", "polys", "seed"):
        if key in raw:
            setattr(cfg, key, _int([raw[key]], key)[0])
    if cfg.steps < 1024:
        raise ConfigError("steps must be >= 1024")
    if cfg.grid_size < 16 or cfg.grid_size & (cfg.grid_size - 1):
        raise ConfigError("grid_size must be a power of two >= 16")
    if "printed_coefficient" in raw:
        if not isinstance(raw["printed_coefficient"], bool):
            raise ConfigError("printed_coefficient must be True or False")
        cfg.printed_coefficient = raw["printed_coefficient"]
    if "variant" in raw:
        if raw["variant"] not in ("standard", "growth_weighted"):
            raise ConfigError(f"unknown variant {raw['variant']!r}")
        cfg.variant = raw["variant"]
    if "tolerance" in raw:
        cfg.tolerance = float(raw["tolerance"])
    names = [str(e) for e in _as_list(raw.get("elements", ["z^1", "shift^1"]))]
    cfg.elements = [_parse_element(e, cfg.N) for e in names]
    cfg.element_names = names
    # catch invalid diffeomorphisms before any command runs
    cfg.diffeo()
    return cfg


def load(path: str | Path | None) -> RunConfig:
    if path is None:
        return build({})
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return build(parse_text(text))
