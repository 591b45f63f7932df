"""Pillar-based ground removal, octree coding and rate evaluation for LiDAR frames."""

from ._core import (
    PgrError,
    __version__,
    apply_oracle,
    apply_pgr,
    bd_metric,
    decode,
    encode,
    measure_bpp,
    named_config,
    points_in_box,
    preservation_report,
    preset_names,
    synthetic_scene,
)

__all__ = [
    "PgrError",
    "apply_oracle",
    "apply_pgr",
    "bd_metric",
    "decode",
    "encode",
    "measure_bpp",
    "named_config",
    "points_in_box",
    "preservation_report",
    "preset_names",
    "synthetic_scene",
]
