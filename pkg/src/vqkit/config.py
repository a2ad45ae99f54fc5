"""Effective configuration shared by the CLI and the pipeline.

Defaults follow the extraction model's stated constants; anything a command
produces echoes the effective configuration so runs are reproducible.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class Config:
    resize_short_side: int = 512
    mscn_c: float = 1.0
    mscn_half_window: int = 3            # 7x7 window
    mscn_window_sigma: float = 7.0 / 6.0
    spatial_frames_per_chunk: int = 2
    temporal_frames_per_chunk: int = 8
    cnn_frames_per_chunk: int = 1
    search_budget: int = 50
    seed: int = 0
    threads: int = 0                      # 0 -> logical core count

    def __post_init__(self):
        if self.resize_short_side < 64:
            raise ValueError("resize_short_side must be at least 64")
        if self.spatial_frames_per_chunk != 2 or self.temporal_frames_per_chunk != 8:
            raise ValueError("sampling rates are fixed at 2/8/1 per chunk")

    @property
    def effective_threads(self) -> int:
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **kwargs) -> "Config":
        return dataclasses.replace(self, **kwargs)


def load_config(path: str | Path | None, **overrides) -> Config:
    """Build a Config from defaults, an optional JSON file, then overrides."""
    fields = {}
    if path is not None:
        doc = json.loads(Path(path).read_text())
        known = {f.name for f in dataclasses.fields(Config)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        fields.update(doc)
    fields.update({k: v for k, v in overrides.items() if v is not None})
    return Config(**fields)
