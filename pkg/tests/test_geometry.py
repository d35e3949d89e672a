import pytest
from sympy.polys.domains import QQ

from comarr.exceptions import InvalidInputError, ResourceLimitError
from comarr.models.geometry import (
    PointConfig,
    Witness,
    chi,
    dominates,
    membership,
    point,
    pullback_run,
    sample,
    stabilization_constant,
    stabilization_failure_witness,
    stabilization_run,
    stabilize,
    theta,
    verify_pullback,
)


def test_collinear_sums_collide():
    result = membership(PointConfig.real([0, 1, 2, 3]), 2)
    assert not result.inside
    assert result.witness == Witness(2, (1, 4), (2, 3))
    assert result.witness.holds_for(PointConfig.real([0, 1, 2, 3]))


def test_generic_points_are_inside():
    assert membership(PointConfig.real([0, 1, 2, 4]), 2).inside
    assert membership(PointConfig.real([0, 1, 2, 4]), 2, "Mprime").inside


def test_equal_points_give_least_witness():
    c = PointConfig.real([0, 0, 1, 5])
    assert membership(c, 2).witness == Witness(2, (1, 3), (2, 3))
    assert membership(c, 2, "Mprime").witness == Witness(1, (1,), (2,))


def test_complex_witness():
    c = PointConfig.from_pairs([(0, 0), (1, 1), (2, 0), (1, -1)])
    assert membership(c, 2).witness == Witness(2, (1, 3), (2, 4))


def test_large_t_means_distinct_points():
    assert membership(PointConfig.real([0, 1, 2]), 3).inside
    assert membership(PointConfig.real([0, 1, 2]), 5).inside
    outside = membership(PointConfig.real([4, 4]), 2)
    assert not outside.inside
    assert outside.witness == Witness(1, (1,), (2,))


def test_membership_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        membership(PointConfig.real([0, 1]), 0)
    with pytest.raises(InvalidInputError):
        membership(PointConfig.real([0, 1]), 1, "Braid")
    with pytest.raises(InvalidInputError):
        membership(PointConfig.real([0, 1]), 1, "X")


def test_membership_is_invariant():
    configs = sample(1, 5, "Conf", seed=3, n=40, box=4).configs
    shift, factor = point(QQ(1, 3), -2), point(2, 1)
    for c in configs:
        expected = membership(c, 2).inside
        assert membership(c.translated(shift), 2).inside == expected
        assert membership(c.scaled(factor), 2).inside == expected
        assert membership(c.permuted([4, 2, 0, 1, 3]), 2).inside == expected
    with pytest.raises(InvalidInputError):
        configs[0].scaled(0)


def test_theta_and_chi():
    c = PointConfig.real([1, 2, 4])
    assert theta(c, 2) == [point(3), point(5), point(6)]
    assert chi(c, 2)[0] == (point(1), point(2))
    assert chi(PointConfig.real([5, 1]), 2) == [(point(1), point(5))]
    with pytest.raises(InvalidInputError):
        theta(c, 4)
    with pytest.raises(InvalidInputError):
        chi(c, 0)


def test_verify_pullback():
    assert verify_pullback(PointConfig.real([0, 1, 2, 3]), 2)
    assert verify_pullback(PointConfig.real([0, 1, 2, 4]), 2)
    assert verify_pullback(PointConfig.real([0, 1, 2, 4]), 4)
    with pytest.raises(InvalidInputError):
        verify_pullback(PointConfig.real([0, 0, 1]), 2)


def test_stabilize():
    c = PointConfig.from_pairs([(0, 0), (1, 0)])
    assert stabilization_constant(c, 2) == QQ(8)
    assert stabilize(c, 2).points[-1] == point(8)
    assert stabilize(PointConfig.real([0]), 3).points[-1] == point(6)
    assert stabilize(PointConfig(()), 1).points == (point(2),)
    assert stabilization_constant(PointConfig.from_pairs([(1, -2)]), 1) == QQ(8)
    with pytest.raises(InvalidInputError):
        stabilize(c, 0)


def test_stabilized_point_dominates():
    for c in sample(2, 4, "Mprime", seed=5, n=20, box=6).configs:
        s = stabilize(c, 2)
        assert dominates(s, 2)
        assert membership(s, 2, "Mprime").inside
    assert not dominates(PointConfig(()), 1)


def test_stabilization_failure_witness():
    assert stabilization_failure_witness(3, 4) == PointConfig.real([0, 3, 1, 2])
    assert stabilization_failure_witness(2, 4, n=30) is None
    assert stabilization_failure_witness(3, 3, n=0) is None


def test_sample_is_deterministic():
    one = sample(2, 4, "M", seed=7, n=20, box=5, stream_size=8, threads=1)
    two = sample(2, 4, "M", seed=7, n=20, box=5, stream_size=8, threads=2)
    assert one.configs == two.configs
    assert one.trials == two.trials
    assert one.accepted == 20
    assert all(membership(c, 2).inside for c in one.configs)
    other = sample(2, 4, "M", seed=8, n=20, box=5, stream_size=8)
    assert other.configs != one.configs


def test_sample_bounds():
    result = sample(1, 3, "Conf", seed=0, n=10, box=2)
    for c in result.configs:
        assert c.is_configuration()
        assert all(abs(z.x) <= 2 and abs(z.y) <= 2 for z in c.points)
    assert 0 < result.acceptance_rate <= 1
    assert sample(1, 3, "Conf", seed=0, n=0, box=2).accepted == 0


def test_sample_gives_up():
    with pytest.raises(ResourceLimitError):
        sample(1, 10, "Conf", seed=0, n=3, box=1, trial_factor=5)


@pytest.mark.parametrize(
    "kwargs",
    [dict(box=0), dict(family="Braid"), dict(seed=-1), dict(n=-1)],
)
def test_sample_rejects_bad_input(kwargs):
    args = dict(t=2, k=4, family="M", seed=0, n=5, box=5)
    args.update(kwargs)
    with pytest.raises(InvalidInputError):
        sample(**args)


def test_rows():
    c = PointConfig.from_pairs([(QQ(1, 2), 0), (-3, QQ(2, 5))])
    assert c.to_rows() == [[1, 2, 0, 1], [-3, 1, 2, 5]]
    assert PointConfig.from_rows(c.to_rows()) == c
    with pytest.raises(InvalidInputError):
        PointConfig.from_rows([[1, 2, 3]])
    with pytest.raises(InvalidInputError):
        PointConfig.from_rows([[1, 0, 3, 1]])


def test_small_property_runs():
    pullback = pullback_run(2, 5, n=100, seed=1)
    assert pullback.checked == 100 and not pullback.failures
    assert pullback_run(2, 5, n=0, seed=1).checked == 0

    stable = stabilization_run(2, 4, n=20, seed=0)
    assert stable.passed == 20
    assert stable.witness is None

    unstable = stabilization_run(3, 4, n=10, seed=0)
    assert not unstable.failures
    assert unstable.witness == PointConfig.real([0, 3, 1, 2])


def test_property_runs_with_t_three():
    pullback = pullback_run(3, 5, n=50, seed=2)
    assert pullback.checked == 50 and not pullback.failures

    stable = stabilization_run(3, 5, n=20, seed=0)
    assert stable.passed == 20
    assert not stable.failures


def moved_witness(witness, images):
    def move(subset):
        return tuple(sorted(images[i - 1] + 1 for i in subset))

    return Witness(witness.t, move(witness.I), move(witness.J))


@pytest.mark.parametrize(
    "c, t",
    [
        (PointConfig.real([0, 1, 2, 3]), 2),
        (PointConfig.real([0, 0, 1, 5]), 2),
        (PointConfig.from_pairs([(0, 0), (1, 1), (2, 0), (1, -1)]), 2),
        (PointConfig.real([0, 1, 2, 3, 4]), 3),
    ],
)
def test_witness_follows_a_permutation(c, t):
    witness = membership(c, t).witness
    assert witness is not None
    images = [2, 0, 3, 1] if c.k == 4 else [4, 2, 0, 1, 3]
    moved = c.permuted(images)
    assert moved_witness(witness, images).holds_for(moved)
    assert not membership(moved, t).inside


@pytest.mark.slow
@pytest.mark.parametrize("t, k", [(2, 4), (2, 5), (3, 5)])
def test_pullback_on_ten_thousand_configurations(t, k):
    run = pullback_run(t, k, n=10_000, seed=0)
    assert run.checked == 10_000
    assert not run.failures


@pytest.mark.slow
@pytest.mark.parametrize("t, k", [(2, 4), (2, 5), (3, 5)])
def test_stabilization_on_a_thousand_configurations(t, k):
    run = stabilization_run(t, k, n=1000, seed=0)
    assert run.passed == 1000
