import numpy as np
import pytest

from prefbeta import Direction, MetricSpace, check_point, check_points, dominates, incomparable


def test_direction_parsing():
    space = MetricSpace(["maximize", "MINIMIZE", Direction.MAXIMIZE])
    assert space.n_metrics == 3
    assert space.directions[1] is Direction.MINIMIZE
    with pytest.raises(ValueError):
        MetricSpace(["upwards"])
    with pytest.raises(ValueError):
        MetricSpace([])


def test_minimize_mask_and_adjusted():
    space = MetricSpace(["maximize", "minimize"])
    assert space.minimize_mask.tolist() == [False, True]
    np.testing.assert_allclose(space.adjusted(np.array([0.3, 0.4])), [0.3, -0.4])


def test_check_point_validation():
    space = MetricSpace.maximize_all(2)
    np.testing.assert_allclose(check_point([0.1, 0.9], space), [0.1, 0.9])
    with pytest.raises(ValueError):
        check_point([0.1], space)
    with pytest.raises(ValueError):
        check_point([0.1, 1.2], space)
    with pytest.raises(ValueError):
        check_point([0.1, np.nan], space)


def test_check_points_batch():
    space = MetricSpace.maximize_all(2)
    X = check_points([[0.1, 0.2], [0.3, 0.4]], space)
    assert X.shape == (2, 2)
    with pytest.raises(ValueError):
        check_points(np.full((3, 3), 0.5), space)


def test_incomparable_examples():
    space = MetricSpace.maximize_all(2)
    assert incomparable([0.9, 0.1], [0.1, 0.9], space)
    assert not incomparable([0.9, 0.9], [0.1, 0.9], space)
    f = [0.4, 0.4]
    assert not incomparable(f, f, space)


def test_incomparable_respects_directions():
    space = MetricSpace(["maximize", "minimize"])
    # (0.9, 0.1) is better on both adjusted axes than (0.1, 0.9)
    assert not incomparable([0.9, 0.1], [0.1, 0.9], space)
    assert incomparable([0.9, 0.9], [0.1, 0.1], space)


def test_dominates():
    space = MetricSpace(["maximize", "minimize"])
    assert dominates(np.array([0.9, 0.1]), np.array([0.5, 0.5]), space)
    assert not dominates(np.array([0.9, 0.9]), np.array([0.5, 0.5]), space)
    # reflexive
    assert dominates(np.array([0.5, 0.5]), np.array([0.5, 0.5]), space)
