"""Deterministic artifact output: CSV tables and the per-run JSON manifest.

Floats are printed with 17 significant digits so identical runs produce
byte-identical files; manifests carry no timestamps for the same reason.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from . import backend

__all__ = ["fmt", "write_csv", "write_manifest"]

QUAD_TOL = 1e-12
ROOT_TOL = 1e-10
MASS_RTOL = 1e-6
BOUND_SLACK = 1e-6


def fmt(value) -> str:
    """Canonical cell formatting: 17 significant digits for floats."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if value is None:
        return ""
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def write_manifest(out_dir: Path, effective_config: dict,
                   extra: dict | None = None) -> None:
    """Manifest + effective-config echo; the echo re-parses to itself."""
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "package": "pulselab",
        "version": __version__,
        "backend": backend.active_backend(),
        "tolerances": {
            "quadrature_tol": QUAD_TOL,
            "root_tol": ROOT_TOL,
            "mass_law_rtol": MASS_RTOL,
            "bound_slack": BOUND_SLACK,
        },
        "config": effective_config,
    }
    if extra:
        manifest.update(extra)
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    (out_dir / "effective_config.json").write_text(
        json.dumps(effective_config, indent=2, sort_keys=True) + "\n")
