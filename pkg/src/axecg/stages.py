"""Stage-level configuration for the five-stage QRS detection pipeline.

Every stage is built from 32-bit ripple-carry adders and (where present)
16x16 recursive multipliers.  The per-stage approximation degree k counts
*output* LSBs of the stage's 16-bit result.  Because each stage renormalizes
its internal word by a fixed right shift, output bit j corresponds to
internal bit j + shift, so a stage with k > 0 hands its units
k_unit = k + out_shift (capped at the unit width).  k = 0 means exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .arith import CompositeAdderConfig, RecursiveMultConfig
from .errors import ConfigError
from .library import ACCURATE, ModuleLibrary

ADDER_WIDTH = 32
MULT_WIDTH = 16
PRODUCT_WIDTH = 2 * MULT_WIDTH


@dataclass(frozen=True)
class StageDef:
    stage_id: str
    adders: int       # 32-bit adder instances
    mults: int        # 16x16 multiplier instances
    max_k: int        # largest permitted approximation degree
    out_shift: int    # right shift renormalizing the stage output


STAGE_DEFS: dict[str, StageDef] = {
    "LPF": StageDef("LPF", adders=10, mults=11, max_k=16, out_shift=15),
    "HPF": StageDef("HPF", adders=31, mults=32, max_k=16, out_shift=15),
    "DIFF": StageDef("DIFF", adders=5, mults=0, max_k=4, out_shift=3),
    "SQR": StageDef("SQR", adders=0, mults=1, max_k=8, out_shift=16),
    "MWI": StageDef("MWI", adders=2, mults=0, max_k=16, out_shift=5),
}

STAGE_IDS = tuple(STAGE_DEFS)


@dataclass
class StageConfig:
    """Approximation parameters of one pipeline stage."""

    stage_id: str
    k_approx: int = 0
    adder_spec: str = ACCURATE
    mult_spec: str = ACCURATE

    def __post_init__(self):
        if self.stage_id not in STAGE_DEFS:
            raise ConfigError(f"unknown stage id {self.stage_id!r}")
        max_k = STAGE_DEFS[self.stage_id].max_k
        if not 0 <= self.k_approx <= max_k:
            raise ConfigError(f"stage {self.stage_id}: k_approx must be in [0, {max_k}], got {self.k_approx}")

    @property
    def stage_def(self) -> StageDef:
        return STAGE_DEFS[self.stage_id]

    def unit_k(self) -> int:
        """Approximation degree handed to this stage's 32-bit units."""
        if self.k_approx == 0:
            return 0
        return min(self.k_approx + self.stage_def.out_shift, ADDER_WIDTH)

    def adder_config(self, lib: ModuleLibrary) -> CompositeAdderConfig:
        return CompositeAdderConfig(ADDER_WIDTH, self.unit_k(), lib.fa(self.adder_spec))

    def mult_config(self, lib: ModuleLibrary) -> RecursiveMultConfig:
        # Internal accumulation adders reuse the stage's adder spec.
        return RecursiveMultConfig(MULT_WIDTH, self.unit_k(), lib.mult(self.mult_spec), lib.fa(self.adder_spec))

    def to_dict(self) -> dict:
        return {"k": self.k_approx, "adder": self.adder_spec, "mult": self.mult_spec}

    @classmethod
    def from_dict(cls, stage_id: str, doc: dict) -> "StageConfig":
        return cls(stage_id, int(doc.get("k", 0)), str(doc.get("adder", ACCURATE)), str(doc.get("mult", ACCURATE)))


@dataclass
class Design:
    """Full five-stage assignment of approximation parameters."""

    stages: dict[str, StageConfig] = field(default_factory=dict)

    def __post_init__(self):
        for sid in STAGE_IDS:
            self.stages.setdefault(sid, StageConfig(sid))
        extra = set(self.stages) - set(STAGE_IDS)
        if extra:
            raise ConfigError(f"unknown stage ids in design: {sorted(extra)}")

    @classmethod
    def accurate(cls) -> "Design":
        return cls({sid: StageConfig(sid) for sid in STAGE_IDS})

    def replaced(self, *configs: StageConfig) -> "Design":
        stages = dict(self.stages)
        for cfg in configs:
            stages[cfg.stage_id] = cfg
        return Design(stages)

    def __getitem__(self, stage_id: str) -> StageConfig:
        return self.stages[stage_id]

    def is_accurate(self) -> bool:
        return all(cfg.k_approx == 0 for cfg in self.stages.values())

    def key(self) -> tuple:
        return tuple((sid, c.k_approx, c.adder_spec, c.mult_spec) for sid, c in sorted(self.stages.items()))

    def to_dict(self) -> dict:
        return {sid: self.stages[sid].to_dict() for sid in STAGE_IDS}

    @classmethod
    def from_dict(cls, doc: dict) -> "Design":
        stages = {}
        for sid, entry in doc.items():
            if sid not in STAGE_DEFS:
                raise ConfigError(f"unknown stage id {sid!r} in design")
            stages[sid] = StageConfig.from_dict(sid, entry)
        return cls(stages)
