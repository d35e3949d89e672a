#!/usr/bin/env python3
"""
Demo script for comarr
Builds the arrangement families, checks classical invariants, runs the
stabilization property and the mod-2 comparison for M(2,4)
"""

import sys
import argparse
from math import factorial
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from comarr.exceptions import ComArrError
from comarr.models.arrangements import ArrangementSpec, Family, build
from comarr.models.geometry import stabilization_failure_witness, stabilization_run
from comarr.models.lattice import (
    IntPolynomial,
    build_lattice,
    characteristic_polynomial,
    deletion_restriction_charpoly,
    poincare_polynomial,
    region_count,
)
from comarr.models.salvetti import mod2_surjectivity_report
from comarr.utils.log_setup import setup_logging


def demo_families():
    print("📐 Arrangement families")
    for family, t, k in [("M", 2, 4), ("M", 3, 4), ("M", 2, 5), ("M", 3, 5), ("Mprime", 2, 4)]:
        h = build(ArrangementSpec(family=family, t=t, k=k))
        print(f"   {family}({t},{k}): {len(h)} hyperplanes")
    braid4 = build(ArrangementSpec(family=Family.BRAID, k=4))
    same = build(ArrangementSpec(family=Family.M, t=3, k=4)).normals == braid4.normals
    print(f"   M(3,4) = Braid(4): {same}")
    print()


def demo_classical(max_k: int):
    print("🧮 Braid arrangement invariants")
    for k in range(1, max_k + 1):
        h = build(ArrangementSpec(family=Family.BRAID, k=k))
        lattice = build_lattice(h)
        expected = IntPolynomial((1,))
        for i in range(1, k):
            expected = IntPolynomial(
                tuple(expected[j] + i * expected[j - 1] for j in range(len(expected.coefficients) + 1))
            )
        ok_pi = poincare_polynomial(lattice) == expected
        ok_regions = region_count(lattice) == factorial(k)
        ok_chi = characteristic_polynomial(lattice) == deletion_restriction_charpoly(h)
        status = "✅" if ok_pi and ok_regions and ok_chi else "❌"
        print(f"   {status} k={k}: π = {poincare_polynomial(lattice)}, regions {region_count(lattice)}")
    print()


def demo_stabilization(n: int, seed: int):
    print("🛰️ Stabilization map")
    for t, k in [(2, 4), (3, 5)]:
        run = stabilization_run(t, k, n, seed)
        print(f"   M'({t},{k}) -> M'({t},{k + 1}): {run.passed}/{run.checked} passed")
    witness = stabilization_failure_witness(3, 4)
    print(f"   Witness leaving M(3,5): {witness}")
    print()


def demo_compare():
    print("🔬 H_*(M(2,4)/Σ_4; F_2) -> H_*(Conf(C,4)/Σ_4; F_2)")
    result = mod2_surjectivity_report(2, 4, progress=True)
    for row in result.rows:
        mark = "" if row.surjective else "  (not surjective)"
        print(f"   H{row.degree}: {row.dim_source} -> {row.dim_target}, rank {row.rank}{mark}")
    print(f"   Verdict: {result.verdict}")
    print()


def main():
    parser = argparse.ArgumentParser(description="comarr demo")
    parser.add_argument("--max-k", type=int, default=5, help="Largest braid arrangement to check")
    parser.add_argument("--n", type=int, default=1000, help="Stabilization samples per (t, k)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--skip-compare", action="store_true", help="Skip the M(2,4) comparison")
    args = parser.parse_args()

    setup_logging(-1)
    try:
        demo_families()
        demo_classical(args.max_k)
        demo_stabilization(args.n, args.seed)
        if not args.skip_compare:
            demo_compare()
    except ComArrError as e:
        print(f"❌ {e}")
        return e.exit_code

    print("🎉 Demo complete!")
    return 0


if __name__ == "__main__":
    print("🚀 comarr Demo")
    print("=" * 40)
    sys.exit(main())
