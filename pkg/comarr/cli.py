"""
Command line for comarr
build, invariants, homology, compare, verify, sample and stabilize
"""

import argparse
import logging
import sys
from typing import List, Optional

from . import __version__
from .config import load_settings, reset_settings
from .exceptions import ComArrError, OracleDisagreement, PropertyTestFailure
from .inference.pipeline import (
    PROPERTIES,
    ComArrPipeline,
    arrangement_hashes,
    configuration_hashes,
    csv_projection,
)
from .inference.schemas import RunManifest
from .models.arrangement_loader import ArrangementManager
from .models.geometry import SAMPLE_FAMILIES
from .models.salvetti import TWISTS
from .utils.io_formats import ConfigurationFile, ReportWriter
from .utils.log_setup import setup_logging

logger = logging.getLogger(__name__)

FAMILIES = ("M", "Mprime", "Braid")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, help="Worker count (default from config)")
    common.add_argument("--force", action="store_true", help="Override the hyperplane guard")
    common.add_argument("--config", help="YAML settings file")
    common.add_argument("--csv", help="Also write a CSV projection of the report")
    common.add_argument("-v", "--verbose", action="count", default=0, help="More logging")
    common.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")

    parser = argparse.ArgumentParser(prog="comarr", description="Center-of-mass arrangement toolkit")
    parser.add_argument("--version", action="version", version=f"comarr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[common], help="Write a canonical arrangement file")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--t", type=int)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("invariants", parents=[common], help="Lattice and Orlik-Solomon invariants")
    p.add_argument("--arr", required=True, help="Arrangement file")
    p.add_argument("--skip-os", action="store_true", help="Leave out the Orlik-Solomon summary")
    p.add_argument("--out", required=True)

    p = sub.add_parser("homology", parents=[common], help="Salvetti complex homology")
    p.add_argument("--arr", required=True, help="Arrangement file")
    p.add_argument("--quotient", action="store_true", help="Homology of the Σ_k quotient")
    p.add_argument("--coeff", choices=("Z", "Q", "Fp"), default="Z")
    p.add_argument("--p", type=int)
    p.add_argument("--twist", choices=TWISTS, default="trivial")
    p.add_argument("--complex-out", help="Also write the Salvetti complex (cells and boundaries)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("compare", parents=[common], help="Quotient homology map into Conf(C,k)/Σ_k")
    p.add_argument("--family", choices=("M", "Mprime"), default="M")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--twist", choices=TWISTS, default="trivial")
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", parents=[common], help="Seeded property runs")
    p.add_argument("--prop", choices=PROPERTIES, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--box", type=int, default=10)
    p.add_argument("--out", required=True)

    p = sub.add_parser("sample", parents=[common], help="Rejection-sample configurations")
    p.add_argument("--family", choices=SAMPLE_FAMILIES, default="M")
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--box", type=int, default=10)
    p.add_argument("--out", required=True)

    p = sub.add_parser("stabilize", parents=[common], help="Append the far point to a configuration")
    p.add_argument("--config-file", required=True, help="Configuration file")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--out", required=True)

    return parser


def _write(report, args):
    ReportWriter.write_json(report.to_json_dict(), args.out)
    logger.info(f"✅ Report written to {args.out}")
    if args.csv:
        projection = csv_projection(report)
        if projection is None:
            logger.warning(f"⚠️ No CSV projection for {args.command} reports")
        else:
            ReportWriter.write_csv(projection[0], projection[1], args.csv)


def _summary(report) -> List[str]:
    data = report.to_json_dict()
    command = report.manifest.command
    if command == "invariants":
        return [
            f"χ(q) = {data['charpoly_factored']}  (agreement: {data['charpoly_agreement']})",
            f"π(t) coefficients {data['poincare']}, regions {data['regions']}",
        ]
    if command == "homology":
        dims = ", ".join(
            f"H{d['degree']}: {d['rank']}" + (f" + torsion {d['torsion']}" if d["torsion"] else "")
            for d in data["degrees"]
        )
        return [f"Cells {data['cells']}", dims]
    if command == "compare":
        lines = [
            f"H{r['degree']}: {r['dim_source']} -> {r['dim_target']}, rank {r['rank']}"
            + ("" if r["surjective"] else "  (not surjective)")
            for r in data["rows"]
        ]
        lines.append(f"Oracle agreement: {data['oracle_agreement']}; verdict: {data['verdict']}")
        return lines
    if command == "verify":
        return [f"{data['prop']}: {data['passed']}/{data['checked']} passed, witness {data['witness']}"]
    if command == "sample":
        return [f"Accepted {data['accepted']}/{data['requested']} in {data['trials']} trials"]
    if command == "stabilize":
        return [f"L = {data['constant']}, inside after: {data['inside_after']}"]
    return []


def run(args: argparse.Namespace) -> int:
    settings = load_settings(args.config)
    if args.threads is not None:
        settings = settings.model_copy(update={"threads": max(1, args.threads)})
    if not sys.stderr.isatty():
        settings = settings.model_copy(update={"progress": False})
    reset_settings(settings)
    pipeline = ComArrPipeline(settings, ArrangementManager(settings))
    params = vars(args)

    if args.command == "build":
        arrangement = pipeline.build(args.family, args.t, args.k, args.out)
        print(f"🎯 {arrangement.family}(t={arrangement.t}, k={arrangement.k}): {len(arrangement.h)} hyperplanes")
        return 0

    if args.command in ("invariants", "homology"):
        arrangement = pipeline.manager.load_arrangement(args.arr)
        manifest = RunManifest.from_args(args.command, params, arrangement_hashes(arrangement))
        if args.command == "invariants":
            report = pipeline.invariants(manifest, arrangement, args.force, not args.skip_os)
        else:
            report = pipeline.homology(
                manifest, arrangement, args.coeff, args.p, args.twist, args.quotient, args.force, args.complex_out
            )
    elif args.command == "compare":
        manifest = RunManifest.from_args(args.command, params)
        report = pipeline.compare(manifest, args.t, args.k, args.p, args.twist, args.family, args.force)
    elif args.command == "verify":
        manifest = RunManifest.from_args(args.command, params)
        report = pipeline.verify(manifest, args.prop, args.t, args.k, args.n, args.seed, args.box)
    elif args.command == "sample":
        manifest = RunManifest.from_args(args.command, params)
        report = pipeline.sample(manifest, args.family, args.t, args.k, args.n, args.seed, args.box)
    else:
        rows = ConfigurationFile.read(args.config_file)
        manifest = RunManifest.from_args(args.command, params, configuration_hashes(rows))
        report = pipeline.stabilize(manifest, rows, args.t)

    _write(report, args)
    for line in _summary(report):
        print(line)

    if args.command == "compare" and not report.oracle_agreement:
        raise OracleDisagreement("QQ oracle disagrees with the cellular model; verdict withheld")
    if args.command == "verify" and report.failed:
        raise PropertyTestFailure(f"{report.failed} counterexamples, see {args.out}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point

    Returns:
        Process exit code: 0, or the exit code of the raised ComArrError
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(-1 if args.quiet else args.verbose)
    try:
        return run(args)
    except ComArrError as e:
        logger.error(f"❌ {e}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
