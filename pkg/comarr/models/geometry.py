"""
Exact point configurations in the plane
Membership in M(t,k) and M'(t,k), Θ_t and χ_t, the pullback check,
the stabilization map and seeded rejection sampling
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from sympy.polys.domains import QQ, QQ_I

from ..exceptions import InvalidInputError, ResourceLimitError
from ..utils.exact import Rational, to_rational
from .arrangements import Family

logger = logging.getLogger(__name__)

Point = QQ_I.dtype

SAMPLE_FAMILIES = ("M", "Mprime", "Conf")


def point(re, im=0) -> Point:
    return QQ_I(to_rational(re), to_rational(im))


def _key(z: Point) -> Tuple[Rational, Rational]:
    return (z.x, z.y)


def l1_norm(z: Point) -> Rational:
    """|re| + |im|, an upper bound for the Euclidean norm"""
    return abs(z.x) + abs(z.y)


@dataclass(frozen=True)
class PointConfig:
    """Ordered k-tuple of points of C with exact rational coordinates"""

    points: Tuple[Point, ...]

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence]) -> "PointConfig":
        return cls(tuple(point(re, im) for re, im in pairs))

    @classmethod
    def real(cls, values: Sequence) -> "PointConfig":
        """Configuration on the real axis"""
        return cls(tuple(point(v) for v in values))

    @property
    def k(self) -> int:
        return len(self.points)

    def translated(self, shift: Point) -> "PointConfig":
        return PointConfig(tuple(z + shift for z in self.points))

    def scaled(self, factor) -> "PointConfig":
        factor = point(factor) if not isinstance(factor, Point) else factor
        if not factor:
            raise InvalidInputError("Scaling factor must be nonzero")
        return PointConfig(tuple(z * factor for z in self.points))

    def permuted(self, images: Sequence[int]) -> "PointConfig":
        """Point i moves to position images[i]"""
        out = [None] * self.k
        for i, z in enumerate(self.points):
            out[images[i]] = z
        return PointConfig(tuple(out))

    def is_configuration(self) -> bool:
        """Pairwise distinct points"""
        return len({_key(z) for z in self.points}) == self.k

    def to_rows(self) -> List[List[int]]:
        """[[num_re, den_re, num_im, den_im], ...]"""
        rows = []
        for z in self.points:
            re, im = QQ.convert(z.x), QQ.convert(z.y)
            rows.append([int(re.numerator), int(re.denominator), int(im.numerator), int(im.denominator)])
        return rows

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "PointConfig":
        points = []
        for row in rows:
            if len(row) != 4:
                raise InvalidInputError(f"Point row {list(row)} must be [num_re, den_re, num_im, den_im]")
            if row[1] == 0 or row[3] == 0:
                raise InvalidInputError(f"Zero denominator in point row {list(row)}")
            points.append(QQ_I(QQ(int(row[0]), int(row[1])), QQ(int(row[2]), int(row[3]))))
        return cls(tuple(points))

    def __str__(self) -> str:
        parts = []
        for z in self.points:
            parts.append(f"({z.x}, {z.y})" if z.y else str(z.x))
        return "(" + ", ".join(parts) + ")"


@dataclass(frozen=True)
class Witness:
    """Two distinct t-subsets (1-based, sorted) with equal sums"""

    t: int
    I: Tuple[int, ...]
    J: Tuple[int, ...]

    def holds_for(self, c: PointConfig) -> bool:
        left = sum((c.points[i - 1] for i in self.I), QQ_I.zero)
        right = sum((c.points[j - 1] for j in self.J), QQ_I.zero)
        return self.I != self.J and left == right


@dataclass(frozen=True)
class Membership:
    inside: bool
    witness: Optional[Witness] = None


def _first_collision(c: PointConfig, s: int) -> Optional[Witness]:
    """Lexicographically least pair of s-subsets with equal sums"""
    if s >= c.k:
        s = 1
    groups = {}
    for subset in combinations(range(c.k), s):
        total = sum((c.points[i] for i in subset), QQ_I.zero)
        groups.setdefault(_key(total), []).append(subset)
    best = None
    for members in groups.values():
        if len(members) > 1 and (best is None or (members[0], members[1]) < best):
            best = (members[0], members[1])
    if best is None:
        return None
    return Witness(s, tuple(i + 1 for i in best[0]), tuple(j + 1 for j in best[1]))


def membership(c: PointConfig, t: int, family="M") -> Membership:
    """
    Decide c ∈ M(t,k) or c ∈ M'(t,k) exactly

    Args:
        c: Configuration
        t: Subset size (t >= k means pairwise distinct points)
        family: "M" or "Mprime"

    Returns:
        Membership; outside results carry the least witness in (t, I, J) order
    """
    if t < 1:
        raise InvalidInputError(f"t must be >= 1, got {t}")
    try:
        family = Family(family)
    except ValueError as e:
        raise InvalidInputError(f"Unknown family: {family}") from e
    if family == Family.M:
        witness = _first_collision(c, t)
    elif family == Family.MPRIME:
        witness = None
        for s in range(1, t + 1):
            witness = _first_collision(c, s)
            if witness is not None:
                break
    else:
        raise InvalidInputError("membership is defined for families M and Mprime")
    return Membership(witness is None, witness)


def in_conf(c: PointConfig) -> bool:
    return c.is_configuration()


def theta(c: PointConfig, t: int) -> List[Point]:
    """Θ_t: subset sums over t-subsets in left-lexicographic order"""
    if t < 1 or t > c.k:
        raise InvalidInputError(f"theta needs 1 <= t <= k, got t={t}, k={c.k}")
    return [sum((c.points[i] for i in s), QQ_I.zero) for s in combinations(range(c.k), t)]


def chi(c: PointConfig, t: int) -> List[Tuple[Point, ...]]:
    """χ_t: the t-subsets themselves, each as a point tuple sorted by (re, im)"""
    if t < 1 or t > c.k:
        raise InvalidInputError(f"chi needs 1 <= t <= k, got t={t}, k={c.k}")
    return [
        tuple(sorted((c.points[i] for i in s), key=_key)) for s in combinations(range(c.k), t)
    ]


def verify_pullback(c: PointConfig, t: int) -> bool:
    """
    c ∈ M(t,k) exactly when Θ_t(c) has pairwise distinct components

    Also checks that χ_t(c) has pairwise distinct components.

    Args:
        c: Configuration with pairwise distinct points
        t: 1 <= t <= k

    Returns:
        True when both sides agree
    """
    if not c.is_configuration():
        raise InvalidInputError("verify_pullback needs pairwise distinct points")
    inside = membership(c, t, Family.M).inside
    sums = theta(c, t)
    distinct_sums = len({_key(z) for z in sums}) == len(sums)
    subsets = chi(c, t)
    distinct_subsets = len({tuple(_key(z) for z in s) for s in subsets}) == len(subsets)
    return inside == distinct_sums and distinct_subsets


def stabilization_constant(c: PointConfig, t: int) -> Rational:
    """L = 2t(1 + max |re| + |im|), zero max for k = 0"""
    bound = max((l1_norm(z) for z in c.points), default=QQ(0))
    return QQ(2 * t) * (QQ(1) + bound)


def stabilize(c: PointConfig, t: int) -> PointConfig:
    """Append the far point (L, 0)"""
    if t < 1:
        raise InvalidInputError(f"t must be >= 1, got {t}")
    return PointConfig(c.points + (QQ_I(stabilization_constant(c, t), QQ(0)),))


def dominates(c: PointConfig, t: int) -> bool:
    """
    The last point outweighs any t-subset sum plus any (t-1)-subset sum of the others

    Uses max(|re|, |im|) as a lower bound for the last point's norm and
    |re| + |im| as upper bounds for the others.
    """
    if c.k == 0:
        return False
    z = c.points[-1]
    lower = max(abs(z.x), abs(z.y))
    norms = sorted((l1_norm(x) for x in c.points[:-1]), reverse=True)
    return lower > sum(norms[:t], QQ(0)) + sum(norms[: t - 1], QQ(0))


def _builtin_candidates(k: int) -> List[PointConfig]:
    if k < 4:
        return []
    tail = [10 ** (i + 1) for i in range(k - 4)]
    return [PointConfig.real([0, 3, 1, 2] + tail), PointConfig.real([0, 1, 2, 3] + tail)]


def stabilization_failure_witness(
    t: int, k: int, seed: int = 0, n: int = 200, box: int = 10, threads: int = 1
) -> Optional[PointConfig]:
    """
    Search for c ∈ M(t,k) with stabilize(c) outside M(t,k+1)

    Tries a built-in list, then seeded samples of M(t,k).

    Returns:
        The first witness found, or None (which proves nothing)
    """

    def fails(c: PointConfig) -> bool:
        return membership(c, t, Family.M).inside and not membership(stabilize(c, t), t, Family.M).inside

    for c in _builtin_candidates(k):
        if fails(c):
            logger.info(f"✅ Built-in stabilization witness {c}")
            return c
    if n <= 0:
        return None
    try:
        samples = sample(t, k, "M", seed, n, box, threads=threads).configs
    except ResourceLimitError:
        return None
    for c in samples:
        if fails(c):
            logger.info(f"✅ Sampled stabilization witness {c}")
            return c
    return None


@dataclass
class SampleResult:
    configs: List[PointConfig]
    trials: int
    requested: int

    @property
    def accepted(self) -> int:
        return len(self.configs)

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.trials if self.trials else 0.0


def _accepts(c: PointConfig, t: int, family: str) -> bool:
    if family == "Conf":
        return in_conf(c)
    return membership(c, t, family).inside


def _run_stream(t: int, k: int, family: str, seed: int, stream: int, target: int, box: int, budget: int):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))
    accepted: List[List[List[int]]] = []
    trials = 0
    while len(accepted) < target and trials < budget:
        coords = rng.integers(-box, box, size=(k, 2), endpoint=True).tolist()
        trials += 1
        if _accepts(PointConfig.from_pairs(coords), t, family):
            accepted.append(coords)
    return accepted, trials


def sample(
    t: int,
    k: int,
    family: str,
    seed: int,
    n: int,
    box: int,
    stream_size: int = 256,
    trial_factor: int = 1000,
    threads: int = 1,
) -> SampleResult:
    """
    Rejection-sample integer configurations uniform in [-B, B]^2

    The run is cut into streams of stream_size configurations, each seeded
    from (seed, stream number), so the output does not depend on threads.

    Args:
        t: Subset size
        k: Number of points
        family: "M", "Mprime" or "Conf"
        seed: Nonnegative integer seed
        n: Configurations wanted
        box: Coordinate bound B >= 1
        stream_size: Configurations per stream
        trial_factor: Trials allowed per wanted configuration
        threads: joblib workers

    Returns:
        SampleResult
    """
    if family not in SAMPLE_FAMILIES:
        raise InvalidInputError(f"Unknown sample family: {family}")
    if box < 1:
        raise InvalidInputError(f"box must be >= 1, got {box}")
    if seed < 0 or n < 0 or k < 0 or t < 1:
        raise InvalidInputError("seed, n and k must be >= 0 and t >= 1")

    targets = [min(stream_size, n - start) for start in range(0, n, stream_size)]
    runs = Parallel(n_jobs=threads)(
        delayed(_run_stream)(t, k, family, seed, i, target, box, target * trial_factor)
        for i, target in enumerate(targets)
    )
    configs = [PointConfig.from_pairs(c) for accepted, _ in runs for c in accepted]
    trials = sum(tr for _, tr in runs)
    result = SampleResult(configs, trials, n)

    if n and not configs:
        raise ResourceLimitError(
            f"No configuration accepted in {trials} trials for {family}(t={t}, k={k}), box {box}"
        )
    if result.accepted < n:
        logger.warning(f"⚠️ Only {result.accepted} of {n} configurations accepted in {trials} trials")
    logger.info(f"✅ Sampled {result.accepted} configurations, acceptance rate {result.acceptance_rate:.4f}")
    return result


@dataclass
class PropertyRun:
    """Outcome of a property check over sampled configurations"""

    checked: int
    failures: List[PointConfig] = field(default_factory=list)
    witness: Optional[PointConfig] = None

    @property
    def passed(self) -> int:
        return self.checked - len(self.failures)


def pullback_run(t: int, k: int, n: int, seed: int, box: int = 10, **kwargs) -> PropertyRun:
    """verify_pullback over n seeded configurations"""
    if n == 0:
        return PropertyRun(0)
    configs = sample(1, k, "Conf", seed, n, box, **kwargs).configs
    failures = [c for c in configs if not verify_pullback(c, t)]
    return PropertyRun(len(configs), failures)


def stabilization_run(t: int, k: int, n: int, seed: int, box: int = 10, **kwargs) -> PropertyRun:
    """S maps seeded members of M'(t,k) into M'(t,k+1), with the failure witness search"""
    run = PropertyRun(0)
    if n:
        configs = sample(t, k, "Mprime", seed, n, box, **kwargs).configs
        run.checked = len(configs)
        for c in configs:
            s = stabilize(c, t)
            if not (membership(s, t, Family.MPRIME).inside and dominates(s, t)):
                run.failures.append(c)
    run.witness = stabilization_failure_witness(t, k, seed=seed, box=box, threads=kwargs.get("threads", 1))
    return run
