"""Piecewise-polynomial deformations and discrete microtwin configurations.

A deformation is a continuous, strictly increasing piecewise-polynomial map;
pieces meet at breakpoints where one-sided derivatives may differ (a sharp
interface). The microtwin construction replaces the m-1 interior atoms next
to the interface at 0 with an affinely rescaled discrete profile y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .discretization import LatticeWindow, lattice_window
from .energy import DiscreteConfiguration
from .errors import AmbiguousSideError, DomainError, UnsupportedOrderError

_BP_TOL = 1e-12      # breakpoint identification / continuity tolerance
_CHEB_NODES = 33     # monotonicity sample points per piece

MAX_DERIV = 4


@dataclass(frozen=True)
class PiecewiseDeformation:
    """Continuous strictly increasing map on [breakpoints[0], breakpoints[-1]].

    pieces[i] holds ascending polynomial coefficients valid on
    [breakpoints[i], breakpoints[i+1]].
    """

    breakpoints: tuple[float, ...]
    pieces: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        bps = tuple(float(t) for t in self.breakpoints)
        pcs = tuple(tuple(float(c) for c in p) for p in self.pieces)
        if len(bps) < 2 or len(pcs) != len(bps) - 1:
            raise DomainError("need n+1 breakpoints for n pieces, n >= 1")
        if not all(t0 < t1 for t0, t1 in zip(bps, bps[1:])):
            raise DomainError("breakpoints must be strictly increasing")
        for i in range(len(pcs) - 1):
            t = bps[i + 1]
            lv = npoly.polyval(t, pcs[i])
            rv = npoly.polyval(t, pcs[i + 1])
            if abs(lv - rv) > _BP_TOL * max(1.0, abs(lv)):
                raise DomainError(
                    f"pieces {i} and {i + 1} disagree at breakpoint {t}: {lv} vs {rv}"
                )
        # monotonicity at Chebyshev-Lobatto nodes of each piece
        k = np.arange(_CHEB_NODES)
        ref = np.cos(np.pi * k / (_CHEB_NODES - 1))
        for i, piece in enumerate(pcs):
            lo, hi = bps[i], bps[i + 1]
            xs = 0.5 * (lo + hi) + 0.5 * (hi - lo) * ref
            dv = npoly.polyval(xs, npoly.polyder(np.asarray(piece)))
            if not np.all(dv > 0):
                raise DomainError(f"piece {i} is not strictly increasing on [{lo}, {hi}]")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "pieces", pcs)

    @property
    def a(self) -> float:
        return self.breakpoints[0]

    @property
    def b(self) -> float:
        return self.breakpoints[-1]

    @classmethod
    def single(cls, a: float, b: float, coeffs: Sequence[float]) -> "PiecewiseDeformation":
        """One smooth polynomial piece on [a, b]."""
        return cls(breakpoints=(a, b), pieces=(tuple(coeffs),))

    @classmethod
    def identity(cls, a: float, b: float) -> "PiecewiseDeformation":
        return cls.single(a, b, (0.0, 1.0))


def _piece_index(u: PiecewiseDeformation, x: float, side: str) -> int:
    """Index of the piece to evaluate at x, honoring one-sided requests."""
    bps = u.breakpoints
    # snap to a breakpoint if within tolerance
    for i, t in enumerate(bps):
        if abs(x - t) <= _BP_TOL * max(1.0, abs(t)):
            if i == 0:
                if side == "left":
                    raise DomainError("no piece to the left of the domain start")
                return 0
            if i == len(bps) - 1:
                if side == "right":
                    raise DomainError("no piece to the right of the domain end")
                return len(u.pieces) - 1
            if side == "left":
                return i - 1
            if side == "right":
                return i
            raise AmbiguousSideError(
                f"x = {x} is an interior breakpoint; pass side='left' or side='right'"
            )
    if not u.a <= x <= u.b:
        raise DomainError(f"x = {x} outside the domain [{u.a}, {u.b}]")
    # strictly interior to some piece; side is irrelevant
    return int(np.searchsorted(np.asarray(bps[1:-1]), x, side="right"))


def eval_deformation(u: PiecewiseDeformation, order: int, x: float,
                     side: str = "auto") -> float:
    """One-sided derivative u^(order)(x), order 0..4.

    At interior breakpoints a side is mandatory for order >= 1; order 0 is
    continuous so side 'auto' picks either piece.
    """
    if not isinstance(order, (int, np.integer)) or isinstance(order, bool):
        raise DomainError("order must be an integer")
    if not 0 <= order <= MAX_DERIV:
        raise UnsupportedOrderError(f"order must be in 0..{MAX_DERIV}, got {order}")
    if side not in ("left", "right", "auto"):
        raise DomainError("side must be 'left', 'right' or 'auto'")
    look = side
    if side == "auto" and order == 0:
        look = "right"  # continuity makes the choice immaterial, except at b
        if abs(x - u.b) <= _BP_TOL * max(1.0, abs(u.b)):
            look = "left"
    try:
        idx = _piece_index(u, x, look)
    except AmbiguousSideError:
        if order == 0:
            idx = _piece_index(u, x, "left")
        else:
            raise
    c = np.asarray(u.pieces[idx])
    if order > 0:
        c = npoly.polyder(c, order)
    return float(npoly.polyval(x, c))


def _sample_values(u: PiecewiseDeformation, xs: np.ndarray) -> np.ndarray:
    """u(xs) for an array of coordinates inside the domain (vectorized)."""
    interior = np.asarray(u.breakpoints[1:-1])
    idx = np.searchsorted(interior, xs, side="right")
    out = np.empty_like(xs)
    for i, piece in enumerate(u.pieces):
        mask = idx == i
        if np.any(mask):
            out[mask] = npoly.polyval(xs[mask], np.asarray(piece))
    return out


def sample_to_lattice(u: PiecewiseDeformation, w: LatticeWindow) -> DiscreteConfiguration:
    """Restriction of u to the window's lattice sites.

    Returns a DiscreteConfiguration; iterating it yields (site, value) pairs.
    """
    xs = w.coordinates()
    if xs.size and (xs[0] < u.a - 1e-9 or xs[-1] > u.b + 1e-9):
        raise DomainError("lattice window extends outside the deformation domain")
    values = _sample_values(u, xs)
    return DiscreteConfiguration(sites=w.sites(), values=values, eps=w.eps)


@dataclass(frozen=True)
class DiscreteProfile:
    """Interior profile values y(1/m), ..., y((m-1)/m), normalized so that
    y(0) = 0 and y(1) = 1 (any affine image generates the same microtwin)."""

    m: int
    values: tuple[float, ...]

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 2:
            raise DomainError("need integer m >= 2")
        vals = tuple(float(v) for v in self.values)
        if len(vals) != self.m - 1:
            raise DomainError(f"need m-1 = {self.m - 1} profile values, got {len(vals)}")
        full = (0.0,) + vals + (1.0,)
        if not all(v0 < v1 for v0, v1 in zip(full, full[1:])):
            raise DomainError("profile values must satisfy 0 < y_1 < ... < y_{m-1} < 1")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "values", vals)

    @classmethod
    def equispaced(cls, m: int) -> "DiscreteProfile":
        """The straight-line profile y(j/m) = j/m."""
        return cls(m=m, values=tuple(j / m for j in range(1, m)))

    @classmethod
    def from_raw(cls, raw: Sequence[float]) -> "DiscreteProfile":
        """Normalize m+1 raw values y(0), y(1/m), ..., y(1): the microtwin is
        invariant under affine maps of y, so only the normalized form is kept."""
        raw = [float(v) for v in raw]
        if len(raw) < 3:
            raise DomainError("need at least 3 raw values (m >= 2)")
        span = raw[-1] - raw[0]
        if span <= 0:
            raise DomainError("raw profile must be increasing end to end")
        vals = tuple((v - raw[0]) / span for v in raw[1:-1])
        return cls(m=len(raw) - 1, values=vals)


@dataclass(frozen=True)
class MicrotwinConfig:
    """A deformation with its interface at 0, an interior profile, and eps."""

    u: PiecewiseDeformation
    profile: DiscreteProfile
    eps: float

    def __post_init__(self):
        bps = self.u.breakpoints
        if abs(bps[0] + 1.0) > _BP_TOL or abs(bps[-1] - 1.0) > _BP_TOL:
            raise DomainError("microtwin deformations live on [-1, 1]")
        interior = bps[1:-1]
        if len(interior) > 1 or (len(interior) == 1 and abs(interior[0]) > _BP_TOL):
            raise DomainError("at most one interior breakpoint, located at 0")
        if not self.eps > 0:
            raise DomainError("eps must be > 0")
        if self.profile.m * self.eps >= 1.0:
            raise DomainError(
                f"interfaces exit the domain: m*eps = {self.profile.m * self.eps} >= 1"
            )


def microtwin_lattice(cfg: MicrotwinConfig) -> DiscreteConfiguration:
    """The discrete configuration u_eps: u restricted to the lattice, with the
    m-1 sites after the interface replaced by the rescaled profile,
    u_eps(j eps) = [u(m eps) - u(0)] y(j/m) + u(0)."""
    m = cfg.profile.m
    w = lattice_window(-1.0, 1.0, 0.0, cfg.eps)
    base = sample_to_lattice(cfg.u, w)
    values = base.values.copy()
    u0 = eval_deformation(cfg.u, 0, 0.0)
    um = eval_deformation(cfg.u, 0, m * cfg.eps)
    span = um - u0
    for j in range(1, m):
        values[j - w.k1] = span * cfg.profile.values[j - 1] + u0
    return DiscreteConfiguration(sites=base.sites, values=values, eps=cfg.eps)
