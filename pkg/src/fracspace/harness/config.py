"""Experiment configuration: fixtures, kernel, exponent pairs, suite selection."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..fixtures import FixtureSpec
from ..kernels import KernelSpec

__all__ = ["ExperimentConfig", "load_config"]

_PAIR_TOL = 1e-12


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    seed: int = 0
    alpha: float = 0.5
    kernel: dict = field(default_factory=lambda: {"type": "frac_integral", "diagonal": "exclude"})
    fixture: dict = field(default_factory=lambda: {"type": "dyadic_line", "kappa": 1.0, "c0": 2.0})
    ladder: list = field(default_factory=lambda: [32, 64, 128])
    light_ladder: list = field(default_factory=lambda: [128, 256, 512])
    pairs: list = field(default_factory=lambda: [{"p": 1.5, "q": 6.0}])
    weak: dict = field(default_factory=lambda: {"p": 1.0, "q": 2.0})
    orlicz: dict = field(default_factory=lambda: {"type": "power", "p": 1.5})
    commutators: dict = field(
        default_factory=lambda: {"k": 2, "policy": "profiles", "target_norm": 1.0}
    )
    endpoint: dict = field(default_factory=lambda: {"k": 1, "r": [1.0]})
    welland: dict = field(default_factory=lambda: {"epsilon": 0.25})
    families: dict = field(default_factory=lambda: {"indicators": 10, "bumps": 6})
    suites: list = field(
        default_factory=lambda: [
            "boundedness",
            "commutators",
            "endpoint",
            "welland",
            "mean_zero_domination",
        ]
    )
    output_dir: str = "reports"
    baselines: dict = field(default_factory=dict)

    def __post_init__(self):
        for pair in self.pairs:
            p, q = float(pair["p"]), float(pair["q"])
            gap = abs(1.0 / q - (1.0 / p - self.alpha))
            if gap > _PAIR_TOL:
                raise ConfigError(
                    f"exponent pair (p={p}, q={q}) is off the alpha={self.alpha} "
                    f"scaling line by {gap:.3g}"
                )
        qw = float(self.weak["q"])
        if abs(1.0 / qw - (1.0 - self.alpha)) > _PAIR_TOL and self.weak.get("strict", True):
            raise ConfigError(
                f"weak exponent q={qw} does not match 1/(1 - alpha) for alpha={self.alpha}"
            )

    # -- derived objects -----------------------------------------------------

    def kernel_spec(self) -> KernelSpec:
        doc = dict(self.kernel)
        doc.setdefault("type", "frac_integral")
        return KernelSpec(
            alpha=self.alpha,
            variant=doc.get("type", "frac_integral"),
            m=doc.get("m"),
            diagonal=doc.get("diagonal", "exclude"),
        )

    def fixture_spec(self, n: int) -> FixtureSpec:
        doc = dict(self.fixture)
        kind = doc.pop("type", "dyadic_line")
        doc.pop("ladder", None)
        return FixtureSpec(kind, n=n, seed=self.seed, **doc)

    def orlicz_fn(self):
        from ..norms import Power, TabulatedOrlicz, ZygmundLog

        doc = dict(self.orlicz)
        kind = doc.get("type", "power")
        if kind == "power":
            return Power(float(doc["p"]))
        if kind == "zygmund_log":
            return ZygmundLog(float(doc["s"]))
        if kind == "table":
            return TabulatedOrlicz(doc["ts"], doc["values"])
        raise ConfigError(f"unknown orlicz type {kind!r}")


def load_config(source) -> ExperimentConfig:
    if isinstance(source, ExperimentConfig):
        return source
    if isinstance(source, dict):
        doc = source
    elif isinstance(source, str):
        with open(source) as fh:
            doc = json.load(fh)
    else:
        doc = json.load(source)
    known = {f for f in ExperimentConfig.__dataclass_fields__}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    return ExperimentConfig(**doc)
