"""
INI instance configs.

    [instance]
    modulus = 6
    elements = a b c d
    pairs = a~b c~d a<c          # u<v means u ⪯ v, u~v means both ways

    [map]
    kind = compose
    parts = inner twist          # applied right to left: inner∘twist

    [map:twist]
    kind = jtwist
    e = 3
    reversal = a:c b:d c:a d:b

    [map:inner]
    kind = inner
    unit = random

    [run]
    suite = all
    seed = 0

See the README for every map kind and key.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

import numpy as np

from .errors import BadLabel, ConfigError, IncidenceError, NotInvertible, PreconditionFailed
from .fialg import DEFAULT_ENUM_CAP, FIContext, parse_series
from .jordan import (
    AdditiveMap,
    compose,
    identity_map,
    idempotent_split_parts,
    inner_auto,
    j_twist,
    near_sum_compose,
    order_reversal_antiauto,
    random_unit,
)
from .suites import ORDER

MAP_KINDS = ("identity", "inner", "reversal", "jtwist", "near_sum", "matrix", "basis_swap", "compose", "split_hom", "split_antihom")


@dataclass
class InstanceConfig:
    modulus: int
    elements: list[str]
    pairs: list[tuple[str, str]]
    maps: dict[str, dict[str, str]]
    suites: list[str] | None = None
    seed: int = 0
    cap: int = DEFAULT_ENUM_CAP
    samples: int = 10_000
    lemma_samples: int = 100
    suite_all: bool = False
    _cache: dict = field(default_factory=dict, repr=False)

    def context(self) -> FIContext:
        if "ctx" not in self._cache:
            self._cache["ctx"] = FIContext.from_pairs(self.modulus, self.elements, self.pairs)
        return self._cache["ctx"]

    def describe_map(self) -> str:
        return self.maps["map"].get("kind", "?")


def _int(section, key, default=None) -> int:
    raw = section.get(key)
    if raw is None:
        if default is None:
            raise ConfigError(f"missing key {key!r}")
        return default
    try:
        return int(raw.strip())
    except ValueError:
        raise ConfigError(f"{key} = {raw!r} is not an integer") from None


def _pairs(text: str) -> list[tuple[str, str]]:
    out = []
    for tok in text.replace(",", " ").split():
        if "~" in tok:
            a, _, b = tok.partition("~")
            out += [(a, b), (b, a)]
        elif "<" in tok:
            a, _, b = tok.partition("<")
            out.append((a, b))
        else:
            raise ConfigError(f"pair {tok!r} must look like u<v or u~v")
        if not a or not b:
            raise ConfigError(f"pair {tok!r} is missing a label")
    return out


def parse_lambda(text: str) -> dict[str, str]:
    lam = {}
    for tok in text.replace(",", " ").split():
        a, sep, b = tok.partition(":")
        if not sep or not a or not b:
            raise ConfigError(f"reversal entry {tok!r} must look like u:v")
        lam[a] = b
    return lam


def parse_suites(text: str) -> tuple[list[str], bool]:
    names = text.replace(",", " ").split()
    if names == ["all"]:
        return list(ORDER), True
    for s in names:
        if s not in ORDER:
            raise ConfigError(f"unknown suite {s!r}; known: {', '.join(ORDER)}")
    # run in canonical order regardless of how they were listed
    return [s for s in ORDER if s in names], False


def load_config(path: str) -> InstanceConfig:
    cp = configparser.ConfigParser(delimiters=("=",), interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(str(exc)) from None
    return from_parser(cp)


def loads_config(text: str) -> InstanceConfig:
    cp = configparser.ConfigParser(delimiters=("=",), interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    return from_parser(cp)


def from_parser(cp: configparser.ConfigParser) -> InstanceConfig:
    if not cp.has_section("instance"):
        raise ConfigError("missing [instance] section")
    if not cp.has_section("map"):
        raise ConfigError("missing [map] section")
    inst = cp["instance"]
    elements = inst.get("elements", "").replace(",", " ").split()
    if not elements:
        raise ConfigError("[instance] elements is empty")
    maps = {}
    for name in cp.sections():
        if name == "map":
            maps["map"] = dict(cp[name])
        elif name.startswith("map:"):
            maps[name[4:]] = dict(cp[name])
    run = cp["run"] if cp.has_section("run") else {}
    suites, every = (None, False)
    if "suite" in run:
        suites, every = parse_suites(run["suite"])
    return InstanceConfig(
        modulus=_int(inst, "modulus"),
        elements=elements,
        pairs=_pairs(inst.get("pairs", "")),
        maps=maps,
        suites=suites,
        suite_all=every,
        seed=_int(run, "seed", 0),
        cap=_int(run, "cap", DEFAULT_ENUM_CAP),
        samples=_int(run, "samples", 10_000),
        lemma_samples=_int(run, "lemma_samples", 100),
    )


def build_map(cfg: InstanceConfig, name: str = "map", _seen=()) -> AdditiveMap:
    """Resolve the map section ``name`` (``map`` or ``map:<name>``)."""
    if name in _seen:
        raise ConfigError(f"map section {name!r} refers to itself")
    if name not in cfg.maps:
        raise ConfigError(f"no section [map:{name}]")
    sec = cfg.maps[name]
    ctx = cfg.context()
    kind = sec.get("kind", "").strip()
    seen = _seen + (name,)
    try:
        if kind == "identity":
            return identity_map(ctx)
        if kind == "inner":
            unit = sec.get("unit", "random").strip()
            if unit == "random":
                rng = np.random.default_rng(_int(sec, "unit_seed", cfg.seed))
                u = random_unit(ctx, rng)
            else:
                try:
                    u = parse_series(ctx, unit)
                except ValueError as exc:
                    raise ConfigError(f"unit {unit!r}: {exc}") from None
            return inner_auto(u)
        if kind == "reversal":
            return order_reversal_antiauto(ctx, parse_lambda(_required(sec, "lambda")))
        if kind == "jtwist":
            rev = sec.get("reversal")
            return j_twist(ctx, _int(sec, "e"), cls=sec.get("class", "").strip() or None, reversal=parse_lambda(rev) if rev else None)
        if kind in ("split_hom", "split_antihom"):
            h, t = idempotent_split_parts(ctx, _int(sec, "e"), parse_lambda(_required(sec, "reversal")))
            part = h if kind == "split_hom" else t
            post = sec.get("post")
            return compose(build_map(cfg, post.strip(), seen), part) if post else part
        if kind == "near_sum":
            h = build_map(cfg, _required(sec, "hom").strip(), seen)
            t = build_map(cfg, _required(sec, "antihom").strip(), seen)
            return near_sum_compose(h, t)
        if kind == "matrix":
            rows = [r.split() for r in _required(sec, "rows").split(";") if r.strip()]
            try:
                m = np.array([[int(v) for v in r] for r in rows], dtype=np.int64)
            except ValueError:
                raise ConfigError("matrix rows must be integers") from None
            if m.shape != (ctx.dim, ctx.dim):
                raise ConfigError(f"matrix must be {ctx.dim}x{ctx.dim}, got {m.shape}")
            bij = sec.get("bijective", "true").strip().lower() != "false"
            return AdditiveMap(ctx, ctx.algebra(), m, bijective=bij, name="matrix")
        if kind == "basis_swap":
            # exchange pairs of basis elements, named by element pairs u.v
            perm = np.arange(ctx.dim)
            for tok in _required(sec, "swap").split():
                a, sep, b = tok.partition(":")
                if not sep:
                    raise ConfigError(f"swap entry {tok!r} must look like u.v:w.z")
                i, j = (ctx.element_index(*lbl.split(".", 1)) for lbl in (a, b))
                perm[i], perm[j] = perm[j], perm[i]
            m = np.eye(ctx.dim, dtype=np.int64)[:, perm]
            return AdditiveMap(ctx, ctx.algebra(), m, bijective=False, name="swap")
        if kind == "compose":
            names = _required(sec, "parts").split()
            if not names:
                raise ConfigError("compose needs at least one part")
            maps = [build_map(cfg, p, seen) for p in names]
            out = maps[-1]
            for f in reversed(maps[:-1]):
                out = compose(f, out)
            return out
    except NotInvertible as exc:
        raise PreconditionFailed(f"map [{name}] is bijective", str(exc)) from None
    except BadLabel as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown map kind {kind!r}; known: {', '.join(MAP_KINDS)}")


def _required(sec: dict, key: str) -> str:
    if key not in sec or not sec[key].strip():
        raise ConfigError(f"missing key {key!r}")
    return sec[key]


__all__ = ["InstanceConfig", "load_config", "loads_config", "build_map", "parse_lambda", "IncidenceError"]
