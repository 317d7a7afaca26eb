import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from roadnav.flow_warp import propagate_feature, propagation_residual

tensors = hnp.arrays(np.float64, (2, 5, 6), elements=st.floats(-10, 10))
flows = hnp.arrays(np.float64, (5, 6, 2), elements=st.floats(-3, 3))


def _shifted(t, dx, dy):
    # out[y, x] = t[y + dy, x + dx], zero where that falls outside
    out = np.zeros_like(t)
    h, w = t.shape[1:]
    for y in range(h):
        for x in range(w):
            if 0 <= y + dy < h and 0 <= x + dx < w:
                out[:, y, x] = t[:, y + dy, x + dx]
    return out


def test_zero_flow_is_identity():
    t = np.random.default_rng(0).normal(size=(3, 4, 5))
    assert np.array_equal(propagate_feature(t, np.zeros((4, 5, 2))), t)


def test_unit_shift_on_ramp():
    ramp = np.tile(np.arange(5.0), (3, 1))[None]
    flow = np.zeros((3, 5, 2))
    flow[..., 0] = 1.0
    out = propagate_feature(ramp, flow)
    assert out[0].tolist() == [[1.0, 2.0, 3.0, 4.0, 0.0]] * 3


def test_scale_grid_doubles():
    ramp = np.tile(np.arange(5.0), (3, 1))[None]
    flow = np.zeros((3, 5, 2))
    flow[..., 0] = 1.0
    out = propagate_feature(ramp, flow, scale=np.full((3, 5), 2.0))
    assert np.array_equal(out, 2 * propagate_feature(ramp, flow))


@pytest.mark.parametrize("dx, dy", [(1, 0), (0, 1), (-2, 1), (3, -2), (0, -4), (7, 0)])
def test_integer_shift_matches_array_shift(dx, dy):
    t = np.random.default_rng(1).normal(size=(2, 5, 6))
    flow = np.zeros((5, 6, 2))
    flow[..., 0], flow[..., 1] = dx, dy
    assert np.array_equal(propagate_feature(t, flow), _shifted(t, dx, dy))


def test_shape_mismatch():
    with pytest.raises(ValueError):
        propagate_feature(np.zeros((1, 4, 4)), np.zeros((4, 5, 2)))
    with pytest.raises(ValueError):
        propagate_feature(np.zeros((1, 4, 4)), np.zeros((4, 4, 2)), scale=-np.ones((4, 4)))


@settings(max_examples=60, deadline=None)
@given(a=tensors, b=tensors, flow=flows, ca=st.floats(-4, 4), cb=st.floats(-4, 4))
def test_linear_in_features(a, b, flow, ca, cb):
    lhs = propagate_feature(ca * a + cb * b, flow)
    rhs = ca * propagate_feature(a, flow) + cb * propagate_feature(b, flow)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-9, atol=1e-9)


class TestResidual:
    def test_zero_when_observed_equals_prediction(self):
        t = np.random.default_rng(2).normal(size=(2, 4, 4))
        flow = np.full((4, 4, 2), 0.5)
        assert propagation_residual(propagate_feature(t, flow), t, flow) == 0.0

    def test_constant_offset(self):
        t = np.random.default_rng(3).normal(size=(2, 4, 4))
        assert propagation_residual(t + 1.0, t, np.zeros((4, 4, 2))) == pytest.approx(1.0, abs=1e-12)

    def test_half_elements_off_by_two(self):
        t = np.zeros((2, 4, 4))
        observed = t.copy()
        observed[0] = 2.0
        assert propagation_residual(observed, t, np.zeros((4, 4, 2))) == 1.0
