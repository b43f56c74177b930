"""Run configuration: defaults, flat ``key = value`` files and environment overrides.

Precedence, lowest first: built-in defaults, config file, ``MIXMINIMAX_*``
environment variables, command-line flags.

File schema (one ``key = value`` per line, ``#`` starts a comment)::

    regime = l2                # l2 | hellinger
    n = 10000
    n_list = 1024,4096,16384
    seed = 0
    c1 = 0.25
    reps = 50
    workers = 1
    quad_L = 40
    quad_panels = 160
    quad_nodes = 16
    m = 3                      # manual family size (verify/construct)
    epsilon = 0.001            # manual perturbation size
    unchecked = false          # skip the epsilon bound check when building
    lemma22_pairs = 1:2,1.4142135623730951:2
    target_variance = 2
    plot = true
"""
from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass

COMMANDS = ("verify", "construct", "bound", "rates", "estimate")
ENV_PREFIX = "MIXMINIMAX_"

DEFAULT_LEMMA22_PAIRS = ((1.0, 2.0), (math.sqrt(2.0 / 3.0), 2.0), (math.sqrt(2.0), 2.0))

# Keys that locate outputs rather than describe the run; left out of file headers.
PATH_KEYS = ("out", "config")


class UsageError(ValueError):
    """Invalid command-line or configuration input (exit status 2)."""


@dataclass(frozen=True)
class RunConfig:
    command: str = "verify"
    regime: str | None = None
    n: int = 10_000
    n_list: tuple[int, ...] = ()
    seed: int = 0
    c1: float | None = None
    out: str | None = None
    config: str | None = None
    reps: int = 50
    workers: int = 1
    quad_L: float = 40.0
    quad_panels: int = 160
    quad_nodes: int = 16
    m: int | None = None
    epsilon: float | None = None
    unchecked: bool = False
    lemma22_pairs: tuple[tuple[float, float], ...] = DEFAULT_LEMMA22_PAIRS
    target_variance: float = 2.0
    plot: bool = True

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.regime is not None and self.regime not in ("l2", "hellinger"):
            raise UsageError(f"regime must be l2 or hellinger, got {self.regime!r}")
        if self.command in ("bound", "construct") and self.n < 100:
            raise UsageError("n must be >= 100")
        if self.command == "estimate" and self.n < 2:
            raise UsageError("n must be >= 2")
        if self.command == "rates":
            if not self.n_list:
                raise UsageError("n_list is empty")
            if any(n < 100 for n in self.n_list):
                raise UsageError("every n in n_list must be >= 100")
            if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
                raise UsageError("n_list must be strictly ascending")
        if self.c1 is not None and not 0 < self.c1 < 1:
            raise UsageError("c1 must lie in (0, 1)")
        if self.reps < 10:
            raise UsageError("reps must be >= 10")
        if self.workers < 1:
            raise UsageError("workers must be >= 1")
        if (self.m is None) != (self.epsilon is None):
            raise UsageError("m and epsilon must be given together")
        if self.m is not None and (self.m < 0 or not self.epsilon > 0):
            raise UsageError("need m >= 0 and epsilon > 0")
        for a, b in self.lemma22_pairs:
            if not b > a > 0:
                raise UsageError(f"lemma22 pair (a={a}, b={b}) needs b > a > 0")
        if not self.target_variance > 0:
            raise UsageError("target_variance must be positive")
        return self

    def header_dict(self) -> dict:
        """Everything needed to reproduce the run (output locations excluded)."""
        out = {}
        for f in dataclasses.fields(self):
            if f.name in PATH_KEYS:
                continue
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = [list(v) if isinstance(v, tuple) else v for v in value]
            out[f.name] = value
        return out


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {text!r}")


def _optional(conv):
    def parse(text):
        return None if text.strip().lower() in ("", "none") else conv(text)
    return parse


def _int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise UsageError(f"not an integer: {text!r}")
    return int(value)


def parse_n_list(text: str) -> tuple[int, ...]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    return tuple(_int(p) for p in parts)


def parse_pairs(text: str) -> tuple[tuple[float, float], ...]:
    pairs = []
    for item in text.replace(" ", "").split(","):
        if not item:
            continue
        a, sep, b = item.partition(":")
        if not sep:
            raise UsageError(f"lemma22 pair must look like a:b, got {item!r}")
        pairs.append((float(a), float(b)))
    return tuple(pairs)


PARSERS = {
    "command": str,
    "regime": _optional(lambda s: s.strip().lower()),
    "n": _int,
    "n_list": parse_n_list,
    "seed": _int,
    "c1": _optional(float),
    "out": _optional(str),
    "config": _optional(str),
    "reps": _int,
    "workers": _int,
    "quad_L": float,
    "quad_panels": _int,
    "quad_nodes": _int,
    "m": _optional(_int),
    "epsilon": _optional(float),
    "unchecked": _bool,
    "lemma22_pairs": parse_pairs,
    "target_variance": float,
    "plot": _bool,
}


def parse_value(key: str, text: str):
    if key not in PARSERS:
        raise UsageError(f"unknown configuration key {key!r}")
    try:
        return PARSERS[key](text)
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(f"bad value for {key}: {text!r}") from exc


def read_config_file(path: str) -> dict:
    """Parse a flat ``key = value`` file into typed values."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from exc
    values = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, text = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        values[key.strip()] = parse_value(key.strip(), text.strip())
    return values


def env_overrides(environ=None) -> dict:
    """Typed values from ``MIXMINIMAX_<KEY>`` variables (key matched case-insensitively)."""
    environ = os.environ if environ is None else environ
    lookup = {k.lower(): k for k in PARSERS}
    values = {}
    for name, text in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        key = lookup.get(name[len(ENV_PREFIX):].lower())
        if key is None:
            raise UsageError(f"unknown environment override {name}")
        values[key] = parse_value(key, text)
    return values


def build_config(command: str, flags: dict, environ=None) -> RunConfig:
    """Merge defaults, file, environment and flags (``None`` flags are ignored)."""
    merged: dict = {}
    env = env_overrides(environ)
    path = flags.get("config") or env.get("config")
    if path:
        merged.update(read_config_file(path))
    merged.update(env)
    merged.update({k: v for k, v in flags.items() if v is not None})
    merged["command"] = command
    return RunConfig(**merged).validate()
