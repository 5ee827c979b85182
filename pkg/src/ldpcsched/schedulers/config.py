from __future__ import annotations

from dataclasses import asdict, dataclass, fields

from ..exceptions import ConfigError

ALGORITHMS = ("flooding", "layered", "rbp", "rd_rbp", "list_rbp", "arcid")

# accepted spellings on the command line and in plan files
ALIASES = {"bp": "flooding", "lbp": "layered", "ar-cid": "arcid", "rd-rbp": "rd_rbp", "list-rbp": "list_rbp"}


def canonical_algorithm(name: str) -> str:
    key = str(name).strip().lower()
    key = ALIASES.get(key, key)
    if key not in ALGORITHMS:
        raise ConfigError(f"unknown decoder {name!r}; valid names: {', '.join(ALGORITHMS)}")
    return key


@dataclass(frozen=True)
class DecoderConfig:
    """Scheduler choice and its parameters.

    ``lambda_`` is the active-subset ratio (``lambda`` in plan files).
    ``early_stop=False`` keeps iterating after the syndrome is satisfied,
    which is only useful for studying message dynamics.
    """

    algorithm: str = "arcid"
    t_max: int = 20
    alpha: float = 0.65
    beta: float = 0.35
    gamma: float = 0.15
    lambda_: float = 0.2
    decay: float = 0.9
    list_size: int = 4
    early_stop: bool = True

    def __post_init__(self):
        object.__setattr__(self, "algorithm", canonical_algorithm(self.algorithm))
        if int(self.t_max) != self.t_max or self.t_max < 1:
            raise ConfigError(f"t_max must be a positive integer, got {self.t_max}")
        object.__setattr__(self, "t_max", int(self.t_max))
        if not (0.0 <= self.alpha <= 1.0 and 0.0 <= self.beta <= 1.0):
            raise ConfigError("alpha and beta must lie in [0, 1]")
        if abs(self.alpha + self.beta - 1.0) > 1e-12:
            raise ConfigError(f"alpha + beta must equal 1, got {self.alpha + self.beta}")
        if self.gamma < 0:
            raise ConfigError("gamma must be non-negative")
        if not 0.0 <= self.lambda_ <= 1.0:
            raise ConfigError("lambda must lie in [0, 1]")
        if not 0.0 < self.decay <= 1.0:
            raise ConfigError("decay must lie in (0, 1]")
        if int(self.list_size) != self.list_size or self.list_size < 1:
            raise ConfigError("list_size must be a positive integer")
        object.__setattr__(self, "list_size", int(self.list_size))

    @classmethod
    def from_mapping(cls, values: dict) -> "DecoderConfig":
        """Build from string-valued ``key = value`` pairs (plan-file keys)."""
        types = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for raw_key, raw in values.items():
            key = "lambda_" if raw_key == "lambda" else raw_key.replace("-", "_")
            if key not in types:
                raise ConfigError(f"unknown decoder key {raw_key!r}")
            kind = types[key]
            try:
                if kind == "int":
                    kwargs[key] = int(raw)
                elif kind == "float":
                    kwargs[key] = float(raw)
                elif kind == "bool":
                    kwargs[key] = str(raw).strip().lower() in ("1", "true", "yes", "on")
                else:
                    kwargs[key] = str(raw)
            except ValueError:
                raise ConfigError(f"bad value for {raw_key}: {raw!r}") from None
        return cls(**kwargs)

    def as_dict(self) -> dict:
        return asdict(self)
