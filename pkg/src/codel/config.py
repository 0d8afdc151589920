"""Run configuration: file parsing, flag overrides, manifest echoing.

Config files are line-oriented `key = value` text; '#' starts a
comment. Every knob has a descriptive canonical name plus the short
alias used in the file format (np, f, cr, jr, cp, nfe, k, lr). Unknown
keys are rejected outright rather than ignored, so a typo cannot
silently fall back to a default.
"""

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ParameterError
from .local_search import METHODS, LocalSearchConfig
from .optimizer import CodelConfig

__all__ = ["RunConfig", "parse_config", "ALIASES"]

ALIASES = {
    "np": "population_size",
    "nfe": "nfe_max",
    "f": "scale_factor",
    "cr": "crossover_rate",
    "jr": "jumping_rate",
    "cp": "clustering_period",
    "k": "folds",
    "lr": "learning_rate",
}


def _parse_hidden(text):
    try:
        sizes = tuple(int(p) for p in str(text).split(",") if p.strip())
    except ValueError:
        raise ParameterError(f"hidden must be comma-separated integers, got {text!r}") from None
    if not sizes:
        raise ParameterError("hidden needs at least one layer size")
    return sizes


@dataclass(frozen=True)
class RunConfig:
    """Every knob a pipeline command can consume, fully resolved."""

    seed: int | None = None
    population_size: int = 50
    nfe_max: int = 25000
    scale_factor: float = 0.5
    crossover_rate: float = 0.9
    jumping_rate: float = 0.3
    clustering_period: int = 10
    lower: float = -10.0
    upper: float = 10.0
    folds: int = 10
    method: str = "cgpr"
    hidden: tuple = (10,)
    epochs: int = 500
    patience: int = 50
    learning_rate: float = 0.5
    momentum: float = 0.9
    jobs: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ParameterError(
                f"unknown method {self.method!r}, expected one of {METHODS}"
            )
        if self.folds < 2:
            raise ParameterError("folds must be >= 2")
        if self.jobs < 1:
            raise ParameterError("jobs must be >= 1")
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        # Delegate range checks of the optimizer/refiner knobs.
        self.codel_config()
        self.local_search_config()

    def codel_config(self) -> CodelConfig:
        return CodelConfig(
            population_size=self.population_size,
            nfe_max=self.nfe_max,
            scale_factor=self.scale_factor,
            crossover_rate=self.crossover_rate,
            jumping_rate=self.jumping_rate,
            clustering_period=self.clustering_period,
            lower=self.lower,
            upper=self.upper,
            seed=0 if self.seed is None else self.seed,
        )

    def local_search_config(self, method: str | None = None) -> LocalSearchConfig:
        return LocalSearchConfig(
            method=self.method if method is None else method,
            epochs=self.epochs,
            patience=self.patience,
            learning_rate=self.learning_rate,
            momentum=self.momentum,
        )

    def manifest_lines(self):
        """The resolved settings as `key=value` strings, field order.

        The worker count is omitted: it never shapes the results, and
        leaving it out keeps outputs byte-identical across any `jobs`
        setting.
        """
        out = []
        for f in fields(self):
            if f.name == "jobs":
                continue
            value = getattr(self, f.name)
            if f.name == "hidden":
                value = ",".join(str(h) for h in value)
            out.append(f"{f.name}={value}")
        return out


_PARSERS = {
    "seed": int,
    "population_size": int,
    "nfe_max": int,
    "scale_factor": float,
    "crossover_rate": float,
    "jumping_rate": float,
    "clustering_period": int,
    "lower": float,
    "upper": float,
    "folds": int,
    "method": str,
    "hidden": _parse_hidden,
    "epochs": int,
    "patience": int,
    "learning_rate": float,
    "momentum": float,
    "jobs": int,
}


def _coerce(key: str, value):
    if not isinstance(value, str):
        return value
    try:
        return _PARSERS[key](value)
    except ValueError:
        raise ParameterError(f"bad value for {key}: {value!r}") from None


def _resolve_key(key: str) -> str:
    canonical = ALIASES.get(key, key)
    if canonical not in _PARSERS:
        raise ParameterError(f"unknown config key: {key}")
    return canonical


def _read_config_file(path):
    path = Path(path)
    if not path.is_file():
        raise ParameterError(f"no such config file: {path}")
    values = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected `key = value`, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[_resolve_key(key)] = value
    return values


def parse_config(file=None, **overrides) -> RunConfig:
    """Resolve a RunConfig from an optional file plus flag overrides.

    Overrides (typically CLI flags) win over file values; both win over
    defaults. A seed must come from one of them.
    """
    values = _read_config_file(file) if file is not None else {}
    for key, value in overrides.items():
        if value is None:
            continue
        values[_resolve_key(key)] = value
    coerced = {key: _coerce(key, value) for key, value in values.items()}
    config = RunConfig(**coerced)
    if config.seed is None:
        raise ParameterError("a seed is required (pass --seed or set seed in the config)")
    return replace(config, seed=int(config.seed))
