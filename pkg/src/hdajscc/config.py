"""Flat ``key = value`` run configuration with lossless round-tripping."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .params import SystemParams
from .simulator import CODEBOOK_POLICIES, MODES


class ConfigError(ValueError):
    pass


FORMATS = ("json", "csv")


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI invocation needs; ``rho`` and ``n`` are grids.

    ``run`` uses the single (rho, n) pair, ``sweep`` the full rho-major grid,
    ``theory`` only the rho list. ``None`` marks a value that was not given.
    """

    sigma2: float | None = None
    power: float | None = None
    noise: float | None = None
    rho: tuple = ()
    n: tuple = ()
    trials: int | None = None
    mode: str = "full"
    epsilon: float | None = None
    delta: float = 0.0
    seed: int = 0
    codebook_policy: str = "fixed"
    workers: int = 1
    out: str | None = None
    format: str = "json"

    def params(self, rho: float | None = None, n: int | None = None) -> SystemParams:
        self.require("sigma2", "power", "noise")
        if rho is None:
            rho = _single(self.rho, "rho")
        if n is None:
            n = _single(self.n, "n")
        return SystemParams(
            sigma2=self.sigma2,
            P=self.power,
            N=self.noise,
            rho=rho,
            n=n,
            epsilon=self.epsilon,
            delta=self.delta,
            seed=self.seed,
        )

    def require(self, *names):
        for name in names:
            if getattr(self, name) is None:
                raise ConfigError(f"missing required field '{name}'")

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}, got '{self.mode}'")
        if self.codebook_policy not in CODEBOOK_POLICIES:
            raise ConfigError(f"codebook_policy must be one of {', '.join(CODEBOOK_POLICIES)}, got '{self.codebook_policy}'")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}, got '{self.format}'")
        if self.trials is not None and self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        return self


def _single(grid, name):
    if len(grid) != 1:
        raise ConfigError(f"field '{name}' needs exactly one value here, got {len(grid)}")
    return grid[0]


def _parse_int(text: str) -> int:
    return int(text, 0)


_PARSERS = {
    "sigma2": float,
    "power": float,
    "noise": float,
    "rho": lambda t: tuple(float(v) for v in t.split(",") if v.strip()),
    "n": lambda t: tuple(_parse_int(v.strip()) for v in t.split(",") if v.strip()),
    "trials": _parse_int,
    "mode": str,
    "epsilon": float,
    "delta": float,
    "seed": _parse_int,
    "codebook_policy": str,
    "workers": _parse_int,
    "out": str,
    "format": str,
}


def parse_value(key: str, text: str):
    try:
        parser = _PARSERS[key]
    except KeyError:
        raise ConfigError(f"unknown config key '{key}'") from None
    text = text.strip()
    if text in ("", "none", "None") and key not in ("rho", "n"):
        return None
    try:
        return parser(text)
    except ValueError as e:
        raise ConfigError(f"bad value for '{key}': {text!r} ({e})") from None


def parse(text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        values[key] = parse_value(key, val)
    return replace(base or RunConfig(), **values)


def _fmt(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, tuple):
        return ", ".join(_fmt(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit(cfg: RunConfig) -> str:
    return "".join(f"{f.name} = {_fmt(getattr(cfg, f.name))}\n" for f in fields(cfg))


def load(path) -> RunConfig:
    with open(path) as fh:
        return parse(fh.read())
