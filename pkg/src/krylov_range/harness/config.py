"""Experiment configuration loaded from JSON (canonical) or TOML."""

from __future__ import annotations

import json
import re
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..convexgeom import SweepConfig
from ..ensembles import MatrixSpec
from ..errors import ConfigError, KrylovRangeError

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

__all__ = ["SCENARIOS", "ExperimentConfig", "load_config", "parse_seeds"]

SCENARIOS = ("fig1", "fig3_radial", "fig3_circle", "fig4_nonnormal", "fig5_beta",
             "bound_check", "poly_certify", "prob_verify")
# scenarios that run Arnoldi trials on a matrix
TRIAL_SCENARIOS = SCENARIOS[:6]


def parse_seeds(text) -> list[int]:
    """Parse ``"0-49"``, ``"0,1,2"`` or a list of ints into a seed list."""
    if isinstance(text, int):
        if text < 0:
            raise ConfigError("seeds must be non-negative")
        return [text]
    if isinstance(text, (list, tuple)):
        out = []
        for t in text:
            out.extend(parse_seeds(t))
        return out
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        m = re.fullmatch(r"(\d+)\s*-\s*(\d+)", part)
        if m:
            lo, hi = int(m.group(1)), int(m.group(2))
            if hi < lo:
                raise ConfigError(f"empty seed range {part!r}")
            out.extend(range(lo, hi + 1))
        elif part.isdigit():
            out.append(int(part))
        else:
            raise ConfigError(f"bad seed list {text!r}")
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment.

    ``m_range`` is an inclusive ``(lo, hi)`` pair.  For ``bound_check`` it ranges
    over the theorem's ``m`` (the Krylov dimension is ``6m + 1`` or ``2m + 1``);
    for the figure scenarios it is the Krylov dimension itself.  ``params``
    holds scenario extras: ``theorem`` and ``gamma`` for ``bound_check``,
    ``cases`` for ``poly_certify`` and ``prob_verify``.
    """

    scenario: str
    matrix: MatrixSpec | None = None
    m_range: tuple[int, int] = (1, 1)
    seeds: tuple[int, ...] = (0,)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    alpha: float = 1.0
    output_dir: str = "results"
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {', '.join(SCENARIOS)}")
        if len(self.seeds) == 0:
            raise ConfigError("seeds must be non-empty")
        if not self.alpha > 0:
            raise ConfigError("alpha must be > 0")
        if self.scenario in TRIAL_SCENARIOS:
            if self.matrix is None:
                raise ConfigError(f"scenario {self.scenario} needs a matrix")
            lo, hi = self.m_range
            if int(lo) != lo or int(hi) != hi or not 1 <= lo <= hi <= self.matrix.n:
                raise ConfigError(f"m_range {self.m_range} must lie within [1, n={self.matrix.n}]")
            if self.scenario == "bound_check" and "theorem" not in self.params:
                raise ConfigError("bound_check needs params.theorem")

    @property
    def m_values(self) -> list[int]:
        return list(range(int(self.m_range[0]), int(self.m_range[1]) + 1))

    def with_overrides(self, seeds=None, n_angles=None, output_dir=None) -> "ExperimentConfig":
        kw = {}
        if seeds is not None:
            kw["seeds"] = tuple(seeds)
        if n_angles is not None:
            kw["sweep"] = SweepConfig(int(n_angles))
        if output_dir is not None:
            kw["output_dir"] = str(output_dir)
        return replace(self, **kw) if kw else self

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "matrix": None if self.matrix is None else self.matrix.to_dict(),
            "m_range": list(self.m_range),
            "seeds": list(self.seeds),
            "sweep": {"n_angles": self.sweep.n_angles},
            "alpha": self.alpha,
            "output_dir": self.output_dir,
            "params": self.params,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        allowed = {"scenario", "matrix", "m_range", "seeds", "sweep", "alpha", "output_dir", "params"}
        extra = set(d) - allowed
        if extra:
            raise ConfigError(f"unknown config fields {sorted(extra)}")
        if "scenario" not in d:
            raise ConfigError("config needs a 'scenario'")
        try:
            matrix = MatrixSpec.from_dict(d["matrix"]) if d.get("matrix") else None
            sweep = d.get("sweep", {})
            sweep = SweepConfig(**sweep) if isinstance(sweep, dict) else SweepConfig(int(sweep))
        except KrylovRangeError as exc:
            raise ConfigError(str(exc)) from exc
        except TypeError as exc:
            raise ConfigError(f"bad matrix or sweep section: {exc}") from exc
        m_range = d.get("m_range", (1, 1))
        if isinstance(m_range, int):
            m_range = (m_range, m_range)
        if len(m_range) != 2:
            raise ConfigError("m_range must be [lo, hi]")
        return cls(
            scenario=d["scenario"],
            matrix=matrix,
            m_range=(int(m_range[0]), int(m_range[1])),
            seeds=tuple(parse_seeds(d.get("seeds", [0]))),
            sweep=sweep,
            alpha=float(d.get("alpha", 1.0)),
            output_dir=str(d.get("output_dir", "results")),
            params=dict(d.get("params", {})),
        )


def load_config(path) -> ExperimentConfig:
    """Read a ``.json`` or ``.toml`` configuration file."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".toml":
            data = tomllib.loads(raw.decode("utf-8"))
        else:
            data = json.loads(raw.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a table/object")
    return ExperimentConfig.from_dict(data)

