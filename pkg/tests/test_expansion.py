"""Continuum expansion coefficients: smooth, one-jump, and microtwin terms.

Oracles used here:
- the smooth bulk/edge split is checked against independently computed
  lattice sums (single_sum / offset_sum) for a linear deformation, where
  every coefficient has a closed expression;
- the jump correction is checked against the decomposition it must satisfy
  for piecewise-linear input;
- the interface-curvature sign threshold is checked against a frozen
  30-digit zeta-ratio constant computed with mpmath;
- generic microtwin terms are locked by a regression pair whose correctness
  was established by the atomistic limit (see test_acceptance.py).
"""

import math

import numpy as np
import pytest

from microtwin import (
    AmbiguousSideError,
    DiscreteProfile,
    DomainError,
    InsufficientDataError,
    LennardJones,
    MicrotwinConfig,
    PiecewiseDeformation,
    cross_interface_decay,
    jump_curvature,
    jump_term,
    jump_threshold_closed_form,
    jump_threshold_root,
    k_terms,
    offset_sum,
    one_jump_coefficients,
    q_m,
    single_sum,
    smooth_coefficients,
    symmetric_params,
)

# (26 (zeta(11) - zeta(13)) / (7 (zeta(5) - zeta(7))))^{1/6}, mpmath 30 digits
THRESHOLD = 0.60343109325463298527


def _linear(t: float) -> PiecewiseDeformation:
    return PiecewiseDeformation.single(-1.0, 1.0, (0.0, t))


def _two_piece(left, right) -> PiecewiseDeformation:
    return PiecewiseDeformation(breakpoints=(-1.0, 0.0, 1.0),
                                pieces=(tuple(left), tuple(right)))


def _edge_sum(pot, a1: float, slope: float) -> float:
    # sum_j (2 a1 - 1 + j) W(slope * j): the boundary-layer correction that
    # multiplies the first-order coefficient at each endpoint.
    return offset_sum(pot, 0, offset=0.0, scale=slope,
                      coeffs=(2.0 * a1 - 1.0, 1.0)).value


class TestSmoothLinear:
    """For u(x) = t x all coefficients have independent closed forms."""

    @pytest.mark.parametrize("t", [1.0, 1.1192958790728956, 1.3])
    @pytest.mark.parametrize("a1,a2", [(0.5, 0.0), (0.8, -0.1)])
    def test_against_lattice_sums(self, lj, t, a1, a2):
        params = symmetric_params(a1, a2)
        co = smooth_coefficients(_linear(t), lj, params, -1.0, 1.0, tol=1e-13)
        bulk = single_sum(lj, 0, 0, t, tol=1e-13).value
        edge = _edge_sum(lj, a1, t)
        # zeroth order: the bulk density integrated over a length-2 domain,
        # normalized by the same length.
        assert co.e0 == pytest.approx(bulk, rel=1e-11)
        # first order: window linear weight acting on the bulk term minus
        # one boundary layer per endpoint.
        c1 = a1 / 2.0 - 0.25
        expect_e1 = c1 * 2.0 * bulk - edge / 2.0
        assert co.e1 == pytest.approx(expect_e1, rel=0, abs=1e-10)

    def test_tail_fields_certified(self, lj):
        co = smooth_coefficients(_linear(1.1), lj, symmetric_params(0.5, 0.0),
                                 -1.0, 1.0, tol=1e-12)
        assert len(co.tails) == 3
        assert all(b >= 0.0 for b in co.tails)
        assert all(b < 1e-8 for b in co.tails)

    def test_predicted_is_quadratic_polynomial(self, lj):
        co = smooth_coefficients(_linear(1.1), lj, symmetric_params(0.5, 0.0),
                                 -1.0, 1.0)
        eps = 0.01
        assert co.predicted(eps) == pytest.approx(
            co.e0 + eps * co.e1 + eps**2 * co.e2, rel=0, abs=0)


class TestSmoothOneJumpConsistency:
    """A two-piece deformation with no actual jump in value, slope, or
    curvature must give identical coefficients through both code paths."""

    @pytest.mark.parametrize("a1,a2", [(0.5, 0.0), (0.3, 0.1)])
    def test_jump_free_two_piece(self, lj, a1, a2):
        params = symmetric_params(a1, a2)
        coeffs = (0.0, 1.0, 0.05)
        u_one = PiecewiseDeformation.single(-1.0, 1.0, coeffs)
        u_two = _two_piece(coeffs, coeffs)
        smooth = smooth_coefficients(u_one, lj, params, -1.0, 1.0, tol=1e-13)
        jumped = one_jump_coefficients(u_two, lj, params, tol=1e-13)
        assert jumped.e0 == pytest.approx(smooth.e0, rel=0, abs=1e-9)
        assert jumped.e1 == pytest.approx(smooth.e1, rel=0, abs=1e-9)
        assert jumped.e2 == pytest.approx(smooth.e2, rel=0, abs=1e-9)


class TestOneJumpDecomposition:
    """For piecewise-linear input the first-order coefficient must equal
    (window weight) * e0 - (edge layers)/4 + interface coupling."""

    @pytest.mark.parametrize("p,q", [(1.0, 1.3), (0.9, 1.1), (1.2, 1.2)])
    def test_first_order_split(self, lj, p, q):
        a1 = 0.5
        params = symmetric_params(a1, 0.0)
        co = one_jump_coefficients(_two_piece((0.0, p), (0.0, q)), lj, params,
                                   tol=1e-13)
        bulk = 0.5 * (single_sum(lj, 0, 0, p, tol=1e-13).value
                      + single_sum(lj, 0, 0, q, tol=1e-13).value)
        assert co.e0 == pytest.approx(bulk, rel=1e-11)
        edges = _edge_sum(lj, a1, p) + _edge_sum(lj, a1, q)
        no_interface = (a1 - 0.5) * bulk - 0.25 * edges
        coupling = jump_term(p, q, lj, tol=1e-13)
        assert co.e1 - no_interface == pytest.approx(coupling, rel=0,
                                                     abs=1e-10)

    def test_symmetric_in_slopes(self, lj):
        assert jump_term(1.0, 1.3, lj) == pytest.approx(
            jump_term(1.3, 1.0, lj), rel=0, abs=1e-13)

    @pytest.mark.parametrize("a", [0.95, 1.1224620483093730, 1.25])
    def test_equal_slopes_vanish(self, lj, a):
        assert abs(jump_term(a, a, lj)) <= 1e-12

    @pytest.mark.parametrize("a", [1.0, 1.1192958790728956, 1.2])
    def test_equal_slopes_stationary(self, lj, a):
        h = 5e-5
        fd = (jump_term(a + h, a, lj) - jump_term(a - h, a, lj)) / (2.0 * h)
        assert abs(fd) < 1e-8


class TestJumpCurvature:
    def test_hessian_structure_via_finite_differences(self, lj):
        # The coupling vanishes on the diagonal with zero gradient, so its
        # second-order behaviour near (a, a) is (A(a)/2) * (da - db)^2 with
        # a scalar A(a); check all four second partials against
        # jump_curvature.
        a = 1.1
        A = jump_curvature(a, lj, tol=1e-13)

        def second(da, db, h):
            return (jump_term(a + da * h, a + db * h, lj, tol=1e-13)
                    - 2.0 * jump_term(a, a, lj, tol=1e-13)
                    + jump_term(a - da * h, a - db * h, lj, tol=1e-13)) / h**2

        def mixed(h):
            return (jump_term(a + h, a + h, lj, tol=1e-13)
                    - jump_term(a + h, a - h, lj, tol=1e-13)
                    - jump_term(a - h, a + h, lj, tol=1e-13)
                    + jump_term(a - h, a - h, lj, tol=1e-13)) / (4.0 * h**2)

        def richardson(f):
            return (4.0 * f(5e-4) - f(1e-3)) / 3.0

        d_aa = richardson(lambda h: second(1, 0, h))
        d_bb = richardson(lambda h: second(0, 1, h))
        d_ab = richardson(mixed)
        assert d_aa == pytest.approx(A, rel=1e-5)
        assert d_bb == pytest.approx(A, rel=1e-5)
        assert d_ab == pytest.approx(-A, rel=1e-5)

    def test_sign_change_brackets_threshold(self, lj):
        assert jump_curvature(0.55, lj) < 0.0
        assert jump_curvature(2.0 ** (1.0 / 6.0), lj) > 0.0
        assert jump_curvature(1.1192958790728956, lj) > 0.0

    def test_threshold_closed_form_frozen(self):
        assert jump_threshold_closed_form(1.0) == pytest.approx(
            THRESHOLD, rel=0, abs=1e-14)
        assert jump_threshold_closed_form(2.5) == pytest.approx(
            2.5 * THRESHOLD, rel=0, abs=1e-13)

    def test_root_matches_closed_form(self, lj):
        root = jump_threshold_root(lj, tol=1e-12)
        assert root == pytest.approx(THRESHOLD, rel=0, abs=1e-9)
        pot2 = LennardJones(2.0)
        assert jump_threshold_root(pot2, tol=1e-12) == pytest.approx(
            2.0 * THRESHOLD, rel=0, abs=2e-9)


def _curved_jump() -> PiecewiseDeformation:
    return _two_piece((0.0, 1.0, 0.05), (0.0, 1.2, 0.03))


class TestMicrotwinTerms:
    @pytest.mark.parametrize("m", [2, 3, 4, 5])
    def test_first_term_vanishes_at_equispaced_equal_slopes(self, lj, m):
        a = 1.1192958790728956
        u = _two_piece((0.0, a, 0.5), (0.0, a, 0.5))
        cfg = MicrotwinConfig(u=u, profile=DiscreteProfile.equispaced(m),
                              eps=0.01)
        k1, _ = k_terms(cfg, lj, 0.5, tol=1e-13)
        assert abs(k1) <= 1e-10

    def test_generic_regression_pair(self, lj):
        # Frozen values; their correctness against the atomistic limit is
        # established by the epsilon-sweep in test_acceptance.py.
        cfg = MicrotwinConfig(u=_curved_jump(),
                              profile=DiscreteProfile(m=3, values=(0.3, 0.7)),
                              eps=0.01)
        k1, k2 = k_terms(cfg, lj, 0.5, tol=1e-13)
        assert k1 == pytest.approx(0.049844991348345066, rel=1e-9)
        assert k2 == pytest.approx(-0.1283370715057444, rel=1e-9)

    def test_first_term_nonnegative_near_equispaced(self, lj, rng):
        # Below the critical slope the equispaced chain is a strict local
        # minimum of the interface energy with value 0, so the first-order
        # term must be >= 0 for nearby profiles.
        m, a = 3, 1.1
        u = _two_piece((0.0, a, 0.0), (0.0, a, 0.0))
        base = np.asarray(q_m(m).x)
        for _ in range(100):
            x = base + rng.uniform(-0.1 / m, 0.1 / m, size=m - 1)
            x = np.sort(x)
            if not (0.0 < x[0] and x[-1] < 1.0 and np.all(np.diff(x) > 0)):
                continue
            prof = DiscreteProfile(m=m, values=tuple(x))
            k1, _ = k_terms(MicrotwinConfig(u=u, profile=prof, eps=0.01),
                            lj, 0.5, tol=1e-12)
            assert k1 >= -1e-12


class TestGuards:
    def test_smooth_rejects_multi_piece(self, lj):
        with pytest.raises(DomainError):
            smooth_coefficients(_curved_jump(), lj, symmetric_params(0.5, 0.0),
                                -1.0, 1.0)

    def test_smooth_rejects_domain_mismatch(self, lj):
        u = PiecewiseDeformation.single(-1.0, 1.0, (0.0, 1.0))
        with pytest.raises(DomainError):
            smooth_coefficients(u, lj, symmetric_params(0.5, 0.0), -1.0, 2.0)

    def test_one_jump_needs_interface_at_zero(self, lj):
        u = PiecewiseDeformation(breakpoints=(-1.0, 0.25, 1.0),
                                 pieces=((0.0, 1.0), (-0.05, 1.2)))
        with pytest.raises(DomainError):
            one_jump_coefficients(u, lj, symmetric_params(0.5, 0.0))

    def test_one_jump_rejects_asymmetric_window(self, lj):
        params = symmetric_params(0.5, 0.0)
        from dataclasses import replace
        skew = replace(params, b1=params.b1 + 0.1)
        with pytest.raises(DomainError):
            one_jump_coefficients(_curved_jump(), lj, skew)

    def test_decay_needs_enough_epsilons(self, lj):
        u3 = PiecewiseDeformation(
            breakpoints=(0.0, 1.0, 2.0, 3.0),
            pieces=((0.0, 1.0), (-0.1, 1.1), (0.1, 1.0)))
        with pytest.raises(InsufficientDataError):
            cross_interface_decay(u3, lj, [0.01, 0.005, 0.0025])

    def test_decay_needs_three_pieces(self, lj):
        with pytest.raises(DomainError):
            cross_interface_decay(_curved_jump(), lj,
                                  [0.01, 0.005, 0.0025, 0.00125])

    def test_decay_smoke_exponent(self, lj):
        u3 = PiecewiseDeformation(
            breakpoints=(0.0, 1.0, 2.0, 3.0),
            pieces=((0.0, 1.0), (-0.1, 1.1), (0.1, 1.0)))
        expo = cross_interface_decay(u3, lj, [1/50, 1/100, 1/200, 1/400])
        assert expo > 2.0
