"""Normalized even moments of n-fold free powers against Catalan numbers."""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from freeprod.graphcore import make_standard, moments
from freeprod.independence import normalized_moment_gap
from freeprod.transforms import Distribution, free_conv


@dataclass
class ScalingConfig:
    factor: tuple = ("K", 2)
    max_power: int = 12
    max_k: int = 4


def gaps(cfg: ScalingConfig) -> list[list[float]]:
    g = make_standard(*cfg.factor)
    law = Distribution(moments(g, 2 * cfg.max_k))
    deg = g.degree(g.root)
    table, power = [], law
    for n in range(1, cfg.max_power + 1):
        if n > 1:
            power = free_conv(power, law)
        table.append([float(normalized_moment_gap(power.moments, n, deg, k)) for k in range(1, cfg.max_k + 1)])
    return table


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--factor", default="K,2", help="family and parameters, e.g. K,2 or Z2")
    p.add_argument("--max-power", type=int, default=ScalingConfig.max_power)
    a = p.parse_args()
    name, *params = a.factor.split(",")
    cfg = ScalingConfig(factor=(name, *map(int, params)), max_power=a.max_power)
    print("n  " + "  ".join(f"k={k:<9d}" for k in range(1, cfg.max_k + 1)))
    for n, row in enumerate(gaps(cfg), start=1):
        print(f"{n:<3d}" + "  ".join(f"{x:<11.6f}" for x in row))


if __name__ == "__main__":
    main()
