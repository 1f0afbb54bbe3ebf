"""Spectra of the complete-graph free products over a grid of (n, m).

Writes one JSON report per case plus a summary table of point spectra
and band endpoints.
"""

from __future__ import annotations

import argparse
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from freeprod.qdecomp import builtin_vacuum_set, generating_check, spectrum


@dataclass
class SweepConfig:
    families: tuple[str, ...] = ("KnKm", "KnFm")
    sizes: tuple[int, ...] = (1, 2, 3)
    depth: int = 7
    out_dir: Path = field(default_factory=lambda: Path("results/spectra"))


def run(cfg: SweepConfig) -> list[dict]:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for family in cfg.families:
        for n in cfg.sizes:
            for m in cfg.sizes:
                t0 = time.perf_counter()
                vs = builtin_vacuum_set(family, (n, m), cfg.depth)
                report = spectrum(vs).to_dict()
                report["generating"] = all(r.passed for r in generating_check(vs))
                (cfg.out_dir / f"{family}_{n}_{m}.json").write_text(json.dumps(report, indent=2))
                rows.append(
                    {
                        "family": family,
                        "n": n,
                        "m": m,
                        "classes": len(report["classes"]),
                        "point_spectrum": report["point_spectrum"],
                        "bands": report["continuous_support"],
                        "generating": report["generating"],
                        "seconds": round(time.perf_counter() - t0, 3),
                    }
                )
    return rows


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--depth", type=int, default=SweepConfig.depth)
    p.add_argument("--sizes", default="1,2,3")
    p.add_argument("--out-dir", type=Path, default=Path("results/spectra"))
    a = p.parse_args()
    cfg = SweepConfig(depth=a.depth, sizes=tuple(int(x) for x in a.sizes.split(",")), out_dir=a.out_dir)
    rows = run(cfg)
    summary = {"config": {**asdict(cfg), "out_dir": str(cfg.out_dir)}, "rows": rows}
    (cfg.out_dir / "summary.json").write_text(json.dumps(summary, indent=2))
    for r in rows:
        pts = ", ".join(f"{x:.6f}" for x in r["point_spectrum"]) or "-"
        bands = " U ".join(f"[{lo:.6f}, {hi:.6f}]" for lo, hi in r["bands"])
        print(f"{r['family']} n={r['n']} m={r['m']}  points: {pts}  bands: {bands}")


if __name__ == "__main__":
    main()
