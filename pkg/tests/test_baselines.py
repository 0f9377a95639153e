import numpy as np
import pytest

from wedgenorm.baselines import asymmetric_power, sample_asymmetric, sample_symmetric, symmetric_power
from wedgenorm.errors import InvalidArgument
from wedgenorm.rng import make_rng


def test_asymmetric_monotone_and_rank_one():
    T = sample_asymmetric(15, 0)
    best, traces = asymmetric_power(T, restarts=4, rng=1)
    for tr in traces:
        assert np.all(np.diff(tr) >= -1e-12 * tr[-1])
    assert best == max(tr[-1] for tr in traces)
    # exact on a rank-one tensor
    rng = make_rng(2)
    x, y, z = (v / np.linalg.norm(v) for v in rng.standard_normal((3, 7)))
    R = 3.0 * np.einsum("i,j,k->ijk", x, y, z)
    assert asymmetric_power(R, restarts=1, rng=3)[0] == pytest.approx(3.0, rel=1e-10)


def test_symmetric_properties():
    S = sample_symmetric(12, 4)
    assert np.allclose(S, S.transpose(1, 0, 2))
    assert np.allclose(S, S.transpose(0, 2, 1))
    best, traces = symmetric_power(S, restarts=5, rng=5)
    for tr in traces:
        assert np.all(np.diff(tr) >= -1e-12 * abs(tr[-1]))
    # for symmetric tensors the asymmetric maximum is attained on the diagonal
    assert best == pytest.approx(asymmetric_power(S, restarts=10, rng=6)[0], rel=1e-6)


def test_symmetric_rank_one():
    x = np.ones(5) / np.sqrt(5)
    S = -2.0 * np.einsum("i,j,k->ijk", x, x, x)
    assert symmetric_power(S, restarts=2, rng=0)[0] == pytest.approx(2.0, rel=1e-10)


def test_shape_checks():
    with pytest.raises(InvalidArgument):
        asymmetric_power(np.zeros((3, 3)))
    with pytest.raises(InvalidArgument):
        symmetric_power(np.zeros((3, 3)))
