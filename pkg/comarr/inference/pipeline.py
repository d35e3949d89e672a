"""
comarr pipeline - turns computations into reports
One method per command; writing and exit codes stay with the CLI
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

from ..config import Settings, get_settings
from ..exceptions import InvalidInputError
from ..models.arrangement_loader import ArrangementManager, LoadedArrangement, get_arrangement_manager
from ..models.arrangements import Family, essentialize, hyperplane_orbits, is_stable, spec_for
from ..models.geometry import (
    SAMPLE_FAMILIES,
    PointConfig,
    dominates,
    membership,
    pullback_run,
    sample,
    stabilization_constant,
    stabilization_run,
    stabilize,
)
from ..models.lattice import (
    characteristic_polynomial,
    deletion_restriction_charpoly,
    poincare_polynomial,
    region_count,
)
from ..models.os_algebra import OrlikSolomonAlgebra, REPRESENTATIONS, restriction_rank
from ..models.salvetti import (
    TWISTS,
    build_salvetti,
    compare_quotients,
    complex_to_json,
    group_action,
    homology,
)
from ..utils.exact import format_rational
from ..utils.io_formats import ComplexFile, ConfigurationFile, content_hash
from .schemas import (
    CompareReport,
    HomologyDegree,
    HomologyReport,
    InvariantsReport,
    MapRowModel,
    OracleRowModel,
    OrbitEntry,
    OsSummary,
    RunManifest,
    SampleReport,
    StabilizeReport,
    VerifyReport,
)

logger = logging.getLogger(__name__)

PROPERTIES = ("pullback", "stabilization")


class ComArrPipeline:
    """
    Main pipeline class for arrangement invariants, homology and property runs
    """

    def __init__(self, settings: Optional[Settings] = None, manager: Optional[ArrangementManager] = None):
        """
        Initialize pipeline

        Args:
            settings: Settings (process-wide settings when None)
            manager: Arrangement manager (process-wide manager when None)
        """
        self.settings = settings or get_settings()
        self.manager = manager or get_arrangement_manager()

    @property
    def threads(self) -> int:
        return self.settings.threads

    def _sampling(self) -> Dict[str, int]:
        return {
            "stream_size": self.settings.stream_size,
            "trial_factor": self.settings.sample_trial_factor,
            "threads": self.threads,
        }

    def build(self, family: str, t: Optional[int], k: int, output_path: str) -> LoadedArrangement:
        """
        Build an arrangement family and write its canonical file

        Args:
            family: "M", "Mprime" or "Braid"
            t: Subset size (ignored for Braid)
            k: Number of points
            output_path: Arrangement file to write

        Returns:
            LoadedArrangement
        """
        arrangement = self.manager.build_arrangement(family, t, k)
        self.manager.save_arrangement(arrangement, output_path)
        logger.info(f"✅ Wrote {len(arrangement.h)} hyperplanes to {output_path}")
        return arrangement

    def invariants(self, manifest: RunManifest, arrangement: LoadedArrangement, force: bool = False, with_os: bool = True) -> InvariantsReport:
        """
        Lattice invariants of an arrangement, with both χ computations

        Args:
            manifest: Run manifest to embed
            arrangement: Loaded arrangement
            force: Override the hyperplane guard
            with_os: Include the Orlik-Solomon summary

        Returns:
            InvariantsReport
        """
        h = arrangement.h
        lattice = self.manager.lattice(arrangement, force)
        chi = characteristic_polynomial(lattice)
        chi_dr = deletion_restriction_charpoly(h)
        if chi != chi_dr:
            logger.warning("⚠️ Möbius and deletion-restriction characteristic polynomials differ")
        _, rank, lineality = essentialize(h)

        stable = is_stable(h)
        orbits = []
        if stable:
            orbits = [OrbitEntry(size=len(b), representative=h.hyperplanes[b[0]].label()) for b in hyperplane_orbits(h)]

        os_summary = None
        if with_os:
            os_summary = self._os_summary(arrangement, lattice, stable, force)

        return InvariantsReport(
            schema="comarr.invariants/1",
            manifest=manifest,
            family=arrangement.family,
            t=arrangement.t,
            k=arrangement.k,
            hyperplanes=len(h),
            rank=rank,
            lineality_dim=lineality,
            rank_counts=lattice.rank_counts(),
            charpoly=list(chi.coefficients),
            charpoly_deletion_restriction=list(chi_dr.coefficients),
            charpoly_agreement=chi == chi_dr,
            charpoly_factored=chi.factored(),
            poincare=list(poincare_polynomial(lattice).coefficients),
            regions=region_count(lattice),
            orbits=orbits,
            orlik_solomon=os_summary,
        )

    def _os_summary(self, arrangement: LoadedArrangement, lattice, stable: bool, force: bool) -> OsSummary:
        os_algebra = OrlikSolomonAlgebra(arrangement.h, lattice)
        degrees = range(os_algebra.rank + 1)
        dims = {rep: [] for rep in REPRESENTATIONS}
        if stable:
            for rep in REPRESENTATIONS:
                dims[rep] = [os_algebra.isotypic_dim(rep, d, self.threads) for d in degrees]

        ranks = None
        braid = self.manager.build_arrangement(Family.BRAID.value, None, arrangement.k)
        if len(braid.h) and braid.h.is_subset_of(arrangement.h):
            braid_os = OrlikSolomonAlgebra(braid.h, self.manager.lattice(braid, force))
            ranks = [restriction_rank(braid_os, os_algebra, d) for d in range(braid_os.rank + 1)]

        return OsSummary(betti=os_algebra.betti(), trivial=dims["trivial"], sign=dims["sign"], braid_restriction_ranks=ranks)

    def homology(
        self,
        manifest: RunManifest,
        arrangement: LoadedArrangement,
        coeff: str = "Z",
        p: Optional[int] = None,
        twist: str = "trivial",
        quotient: bool = False,
        force: bool = False,
        complex_path: Optional[str] = None,
    ) -> HomologyReport:
        """
        Homology of the Salvetti complex of an arrangement or of its Σ_k quotient

        complex_path, when given, receives the cells and boundary triplets.

        Returns:
            HomologyReport with ranks and, over Z, torsion
        """
        if twist not in TWISTS:
            raise InvalidInputError(f"Unknown twist: {twist}")
        if twist != "trivial" and not quotient:
            raise InvalidInputError("--twist applies to --quotient only")
        if quotient and not is_stable(arrangement.h):
            raise InvalidInputError("--quotient needs a Σ_k-stable arrangement")

        lattice = self.manager.lattice(arrangement, force)
        cx = build_salvetti(
            arrangement.h, lattice, max_cells=self.settings.max_cells, progress=self.settings.progress
        )
        if complex_path:
            ComplexFile.write(complex_path, complex_to_json(cx))
            logger.info(f"✅ Complex written to {complex_path}")
        if quotient:
            cx = group_action(cx)
        degrees = homology(cx, coeff, p, quotient, twist)
        cells = [len(r) for r in cx.action.reps] if quotient else cx.sizes()

        return HomologyReport(
            schema="comarr.homology/1",
            manifest=manifest,
            family=arrangement.family,
            k=arrangement.k,
            coeff=coeff,
            p=p if coeff == "Fp" else None,
            twist=twist,
            quotient=quotient,
            cells=cells,
            degrees=[HomologyDegree(degree=d.degree, rank=d.rank, torsion=list(d.torsion)) for d in degrees],
        )

    def compare(
        self,
        manifest: RunManifest,
        t: int,
        k: int,
        p: int = 2,
        twist: str = "trivial",
        family: str = "M",
        force: bool = False,
    ) -> CompareReport:
        """
        Per-degree table of H_d(A/Σ_k; F_p) -> H_d(Conf(C,k)/Σ_k; F_p)

        The report carries the QQ oracle rows; the verdict is empty when they disagree.
        """
        spec = spec_for(family, t, k)
        result = compare_quotients(
            spec.t,
            spec.k,
            p=p,
            twist=twist,
            family=spec.family,
            max_cells=self.settings.max_cells,
            max_hyperplanes=self.settings.max_hyperplanes,
            force=force,
            threads=self.threads,
            progress=self.settings.progress,
        )
        return CompareReport(
            schema="comarr.compare/1",
            manifest=manifest,
            family=result.family,
            t=result.t,
            k=result.k,
            p=result.p,
            twist=result.twist,
            identity=result.identity,
            source_cells=result.source_cells,
            target_cells=result.target_cells,
            rows=[
                MapRowModel(
                    degree=r.degree,
                    dim_source=r.dim_source,
                    dim_target=r.dim_target,
                    rank=r.rank,
                    surjective=r.surjective,
                    injective=r.injective,
                )
                for r in result.rows
            ],
            oracle=[
                OracleRowModel(
                    degree=o.degree,
                    cellular_rank=o.cellular_rank,
                    os_rank=o.os_rank,
                    cellular_dims=list(o.cellular_dims),
                    os_dims=list(o.os_dims),
                    agrees=o.agrees,
                )
                for o in result.oracle
            ],
            oracle_agreement=result.oracle_agreement,
            non_surjective_degrees=result.non_surjective_degrees,
            verdict=result.verdict,
        )

    def verify(self, manifest: RunManifest, prop: str, t: int, k: int, n: int, seed: int, box: int = 10) -> VerifyReport:
        """
        Seeded property run for the pullback square or the stabilization map

        Returns:
            VerifyReport; counterexamples are embedded as point rows
        """
        if prop == "pullback":
            run = pullback_run(t, k, n, seed, box, **self._sampling())
        elif prop == "stabilization":
            run = stabilization_run(t, k, n, seed, box, **self._sampling())
        else:
            raise InvalidInputError(f"Unknown property: {prop}")

        if run.failures:
            logger.error(f"❌ {len(run.failures)} counterexamples to the {prop} property")
        else:
            logger.info(f"✅ {run.checked} configurations passed the {prop} property")

        return VerifyReport(
            schema="comarr.verify/1",
            manifest=manifest,
            prop=prop,
            t=t,
            k=k,
            n=n,
            checked=run.checked,
            passed=run.passed,
            failed=len(run.failures),
            failures=[c.to_rows() for c in run.failures],
            witness=run.witness.to_rows() if run.witness is not None else None,
        )

    def sample(self, manifest: RunManifest, family: str, t: int, k: int, n: int, seed: int, box: int = 10) -> SampleReport:
        if family not in SAMPLE_FAMILIES:
            raise InvalidInputError(f"Unknown sample family: {family}")
        result = sample(t, k, family, seed, n, box, **self._sampling())
        return SampleReport(
            schema="comarr.sample/1",
            manifest=manifest,
            family=family,
            t=t,
            k=k,
            box=box,
            requested=n,
            accepted=result.accepted,
            trials=result.trials,
            acceptance_rate=round(result.acceptance_rate, 12),
            configurations=[c.to_rows() for c in result.configs],
        )

    def stabilize(self, manifest: RunManifest, rows: Sequence[Sequence[int]], t: int) -> StabilizeReport:
        """
        Append the far point (L, 0) to a configuration

        Args:
            manifest: Run manifest to embed
            rows: Configuration rows from a configuration file
            t: Subset size

        Returns:
            StabilizeReport with M'(t,·) membership before and after
        """
        c = PointConfig.from_rows(rows)
        s = stabilize(c, t)
        return StabilizeReport(
            schema="comarr.stabilize/1",
            manifest=manifest,
            t=t,
            k=c.k,
            constant=format_rational(stabilization_constant(c, t)),
            input=c.to_rows(),
            output=s.to_rows(),
            inside_before=membership(c, t, Family.MPRIME).inside,
            inside_after=membership(s, t, Family.MPRIME).inside,
            dominates=dominates(s, t),
        )


def arrangement_hashes(arrangement: LoadedArrangement) -> Dict[str, str]:
    return {"arrangement": arrangement.key}


def configuration_hashes(rows: Sequence[Sequence[int]]) -> Dict[str, str]:
    return {"configuration": content_hash(ConfigurationFile.to_dict(rows))}


def csv_projection(report) -> Optional[Tuple[List[str], List[List[object]]]]:
    """
    Tabular view of a report for --csv, or None for reports without one

    Returns:
        (header, rows)
    """
    if isinstance(report, CompareReport):
        header = ["degree", "dim_source", "dim_target", "rank", "surjective", "injective"]
        return header, [[r.degree, r.dim_source, r.dim_target, r.rank, r.surjective, r.injective] for r in report.rows]
    if isinstance(report, HomologyReport):
        return ["degree", "rank", "torsion"], [[d.degree, d.rank, " ".join(map(str, d.torsion))] for d in report.degrees]
    if isinstance(report, SampleReport):
        header = ["config", "point", "num_re", "den_re", "num_im", "den_im"]
        rows = []
        for i, config in enumerate(report.configurations):
            for j, point in enumerate(config):
                rows.append([i, j] + list(point))
        return header, rows
    if isinstance(report, VerifyReport):
        header = ["prop", "t", "k", "n", "checked", "passed", "failed", "witness"]
        witness = ";".join(",".join(map(str, p)) for p in report.witness) if report.witness else ""
        return header, [[report.prop, report.t, report.k, report.n, report.checked, report.passed, report.failed, witness]]
    return None
