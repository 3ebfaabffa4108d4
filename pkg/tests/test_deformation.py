"""Piecewise deformations, lattice sampling, and microtwin construction."""
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from microtwin import (
    AmbiguousSideError,
    DiscreteProfile,
    DomainError,
    MicrotwinConfig,
    PiecewiseDeformation,
    UnsupportedOrderError,
    eval_deformation,
    lattice_window,
    microtwin_lattice,
    sample_to_lattice,
)


def two_slope(p, q):
    return PiecewiseDeformation(breakpoints=(-1.0, 0.0, 1.0), pieces=((0.0, p), (0.0, q)))


# ---------------------------------------------------------------------------
# construction and evaluation
# ---------------------------------------------------------------------------

def test_identity_and_single():
    u = PiecewiseDeformation.identity(-1.0, 1.0)
    for x in (-1.0, -0.3, 0.0, 0.7, 1.0):
        assert eval_deformation(u, 0, x) == pytest.approx(x, abs=1e-15)
        assert eval_deformation(u, 1, x, side="left" if x == 1.0 else "auto") == 1.0
    v = PiecewiseDeformation.single(-1.0, 1.0, (0.0, 1.0, 0.05))
    assert eval_deformation(v, 0, 0.5) == pytest.approx(0.5 + 0.05 * 0.25, abs=1e-15)
    assert eval_deformation(v, 2, 0.5) == pytest.approx(0.1, abs=1e-15)
    assert eval_deformation(v, 3, 0.5) == 0.0


def test_one_sided_derivatives_at_breakpoint():
    u = two_slope(1.0, 2.0)
    assert eval_deformation(u, 1, 0.0, side="left") == pytest.approx(1.0)
    assert eval_deformation(u, 1, 0.0, side="right") == pytest.approx(2.0)
    # order 0 is continuous across the breakpoint
    l0 = eval_deformation(u, 0, 0.0, side="left")
    r0 = eval_deformation(u, 0, 0.0, side="right")
    assert l0 == pytest.approx(r0, abs=1e-12)
    with pytest.raises(AmbiguousSideError):
        eval_deformation(u, 1, 0.0, side="auto")


def test_eval_guards():
    u = two_slope(1.0, 2.0)
    with pytest.raises(DomainError):
        eval_deformation(u, 0, 1.5)
    with pytest.raises(UnsupportedOrderError):
        eval_deformation(u, 5, 0.3)
    with pytest.raises(DomainError):
        eval_deformation(u, 1, 0.3, side="up")


def test_construction_guards():
    with pytest.raises(DomainError):  # discontinuous at the breakpoint
        PiecewiseDeformation(breakpoints=(-1.0, 0.0, 1.0), pieces=((0.0, 1.0), (0.5, 1.0)))
    with pytest.raises(DomainError):  # decreasing piece
        PiecewiseDeformation(breakpoints=(-1.0, 1.0), pieces=((0.0, -1.0),))
    with pytest.raises(DomainError):  # non-monotone quadratic inside the piece
        PiecewiseDeformation(breakpoints=(-1.0, 1.0), pieces=((0.0, 0.1, 1.0),))
    with pytest.raises(DomainError):  # breakpoints out of order
        PiecewiseDeformation(breakpoints=(1.0, -1.0), pieces=((0.0, 1.0),))


def test_derivatives_match_finite_differences():
    u = PiecewiseDeformation(
        breakpoints=(-1.0, 0.0, 1.0),
        pieces=((0.0, 1.0, 0.05, 0.01), (0.0, 1.2, 0.03)),
    )
    for x in (-0.7, -0.2, 0.4, 0.9):
        h = 1e-6
        fd = (eval_deformation(u, 0, x + h) - eval_deformation(u, 0, x - h)) / (2 * h)
        assert fd == pytest.approx(eval_deformation(u, 1, x), rel=1e-6)
        fd2 = (eval_deformation(u, 1, x + h) - eval_deformation(u, 1, x - h)) / (2 * h)
        assert fd2 == pytest.approx(eval_deformation(u, 2, x), rel=1e-5, abs=1e-8)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def test_sample_identity():
    u = PiecewiseDeformation.identity(-1.0, 1.0)
    w = lattice_window(-1.0, 1.0, 0.0, 0.5)
    cfg = sample_to_lattice(u, w)
    assert len(cfg) == w.N == 5
    assert np.allclose(cfg.values, [-1.0, -0.5, 0.0, 0.5, 1.0], atol=1e-15)
    assert cfg.eps == 0.5


def test_sample_monotone_and_bounded(rng):
    u = PiecewiseDeformation(
        breakpoints=(-1.0, 0.0, 1.0), pieces=((0.0, 1.0, 0.1), (0.0, 1.5, -0.2))
    )
    for eps in (0.3, 0.11, 0.07):
        cfg = sample_to_lattice(u, lattice_window(-1.0, 1.0, 0.0, eps))
        assert np.all(np.diff(cfg.values) > 0)
        assert len(cfg) == lattice_window(-1.0, 1.0, 0.0, eps).N


def test_sample_window_outside_domain():
    u = PiecewiseDeformation.identity(-1.0, 1.0)
    with pytest.raises(DomainError):
        sample_to_lattice(u, lattice_window(-2.0, 1.0, 0.0, 0.5))


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

def test_profile_validation():
    p = DiscreteProfile.equispaced(4)
    assert np.allclose(p.values, [0.25, 0.5, 0.75], atol=1e-15)
    with pytest.raises(DomainError):
        DiscreteProfile(m=3, values=(0.7, 0.3))
    with pytest.raises(DomainError):
        DiscreteProfile(m=3, values=(0.0, 0.5))
    with pytest.raises(DomainError):
        DiscreteProfile(m=1, values=())
    with pytest.raises(DomainError):
        DiscreteProfile(m=4, values=(0.5,))


@given(
    scale=st.floats(0.2, 5.0),
    shift=st.floats(-3.0, 3.0),
    raw=st.lists(st.floats(0.05, 0.95), min_size=1, max_size=6, unique=True),
)
def test_profile_affine_invariance(scale, shift, raw):
    # a y + b normalizes to the same profile: only the shape matters
    ys = [0.0] + sorted(raw) + [1.0]
    base = DiscreteProfile.from_raw(ys)
    moved = DiscreteProfile.from_raw([scale * y + shift for y in ys])
    assert base.m == moved.m
    assert np.allclose(base.values, moved.values, atol=1e-9)


def test_from_raw_guards():
    with pytest.raises(DomainError):
        DiscreteProfile.from_raw([0.0, 1.0])  # needs an interior value
    with pytest.raises(DomainError):
        DiscreteProfile.from_raw([0.0, 0.8, 0.4, 1.0])


# ---------------------------------------------------------------------------
# microtwin construction
# ---------------------------------------------------------------------------

def test_microtwin_formula():
    u = PiecewiseDeformation.identity(-1.0, 1.0)
    cfg = MicrotwinConfig(u=u, profile=DiscreteProfile(m=2, values=(0.3,)), eps=0.1)
    twin = microtwin_lattice(cfg)
    w = lattice_window(-1.0, 1.0, 0.0, 0.1)
    assert len(twin) == w.N
    idx = {int(s): v for s, v in zip(twin.sites, twin.values)}
    # u_eps(eps j) = [u(m eps) - u(0)] y(j/m) + u(0) inside the twin band
    assert idx[1] == pytest.approx(0.2 * 0.3, abs=1e-14)
    # untouched outside [0, m eps]
    assert idx[0] == pytest.approx(0.0, abs=1e-15)
    assert idx[2] == pytest.approx(0.2, abs=1e-15)
    assert idx[-3] == pytest.approx(-0.3, abs=1e-15)
    assert np.all(np.diff(twin.values) > 0)


def test_microtwin_equispaced_identity_is_pure_sample():
    u = PiecewiseDeformation(breakpoints=(-1.0, 0.0, 1.0), pieces=((0.0, 1.0), (0.0, 1.0)))
    for m in (2, 3, 5):
        cfg = MicrotwinConfig(u=u, profile=DiscreteProfile.equispaced(m), eps=0.05)
        twin = microtwin_lattice(cfg)
        base = sample_to_lattice(u, lattice_window(-1.0, 1.0, 0.0, 0.05))
        assert np.allclose(twin.values, base.values, atol=1e-14)


def test_microtwin_generic_matches_outside_band():
    u = PiecewiseDeformation(
        breakpoints=(-1.0, 0.0, 1.0), pieces=((0.0, 1.0, 0.05), (0.0, 1.2, 0.03))
    )
    m, eps = 3, 0.02
    cfg = MicrotwinConfig(u=u, profile=DiscreteProfile(m=3, values=(0.3, 0.7)), eps=eps)
    twin = microtwin_lattice(cfg)
    base = sample_to_lattice(u, lattice_window(-1.0, 1.0, 0.0, eps))
    inside = (twin.sites > 0) & (twin.sites < m)
    assert np.allclose(twin.values[~inside], base.values[~inside], atol=1e-15)
    assert not np.allclose(twin.values[inside], base.values[inside], atol=1e-6)


def test_microtwin_guards():
    u = PiecewiseDeformation.identity(-1.0, 1.0)
    prof = DiscreteProfile(m=4, values=(0.2, 0.5, 0.8))
    with pytest.raises(DomainError):
        MicrotwinConfig(u=u, profile=prof, eps=0.3)  # m eps >= 1: twin exits window
    v = PiecewiseDeformation.identity(-2.0, 1.0)
    with pytest.raises(DomainError):
        MicrotwinConfig(u=v, profile=prof, eps=0.01)  # domain must be [-1, 1]
