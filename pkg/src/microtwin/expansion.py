"""Continuum Taylor coefficients of the atomistic energy.

Three expansions, all against the same atomistic oracle:

* smooth deformations: E_eps = E0 + eps E1 + eps^2 E2 + o(eps^2), where E0 is
  the elastic (Cauchy-Born) density integral, E1 collects boundary-layer
  sums, and E2 adds the strain-gradient integral plus boundary W/W' sums;
* one-jump deformations on [-1,1]: the same structure with extra interface
  sums at 0, including the cross-interface double sum;
* microtwin perturbations: the energy *difference* between the profiled and
  the plain configuration, eps K1 + eps^2 K2.

The jump sign analysis lives here too: J(a,b) (interface excess at order
eps), its curvature A(a) at equal slopes, and the slope threshold where A
changes sign. cross_interface_decay verifies that interactions between
non-adjacent smooth pieces decay fast enough (~eps^(alpha-1)) to be invisible
at second order.

All series go through the certified engines in .series; quadrature is
adaptive Gauss-Kronrod (scipy.integrate.quad) with absolute tolerance tol/10
per integral, evaluated exactly at each node (no interpolation shortcuts).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .deformation import MicrotwinConfig, PiecewiseDeformation, eval_deformation, sample_to_lattice
from .discretization import ExpansionParams, lattice_window, validate_params
from .errors import DomainError, InsufficientDataError
from .potential import LennardJones, Potential
from .profile import ProfileChain, f_m
from .series import double_sum, double_sum_jump, offset_sum, single_sum, zeta

_BP_TOL = 1e-12


@dataclass(frozen=True)
class ExpansionCoefficients:
    """Second-order coefficients with per-coefficient certified error bounds
    (series tails plus quadrature error estimates)."""

    e0: float
    e1: float
    e2: float
    tails: tuple[float, float, float]

    def predicted(self, eps: float) -> float:
        return self.e0 + eps * self.e1 + eps * eps * self.e2


class _TailLedger:
    """Accumulates certified error contributions per coefficient."""

    def __init__(self):
        self.total = 0.0

    def add(self, bound: float, factor: float = 1.0):
        self.total += abs(factor) * bound


def _quad_piece(f, lo: float, hi: float, tol: float):
    val, err = quad(f, lo, hi, epsabs=max(tol, 1e-14), epsrel=1e-13, limit=200)
    return val, err


def _deriv(u: PiecewiseDeformation, order: int, x: float, side: str = "auto") -> float:
    return eval_deformation(u, order, x, side=side)


def smooth_coefficients(u: PiecewiseDeformation, p: Potential, params: ExpansionParams,
                        a: float, b: float, tol: float = 1e-12) -> ExpansionCoefficients:
    """E0, E1, E2 for a smooth (single-piece) deformation on [a, b]."""
    if len(u.pieces) != 1:
        raise DomainError("smooth expansion needs a single-piece deformation")
    if abs(u.a - a) > _BP_TOL or abs(u.b - b) > _BP_TOL:
        raise DomainError("deformation domain does not match [a, b]")
    bad = validate_params(params, a, b)
    if bad:
        raise DomainError("invalid expansion parameters: " + "; ".join(bad))

    span = b - a
    tol_s = tol / 10.0
    a1, a2, b1, b2, c1, c2 = (params.a1, params.a2, params.b1,
                              params.b2, params.c1, params.c2)
    dua, dub = _deriv(u, 1, a), _deriv(u, 1, b)
    d2ua, d2ub = _deriv(u, 2, a), _deriv(u, 2, b)

    def f0(x: float) -> float:
        return single_sum(p, 0, 0, _deriv(u, 1, x), tol=tol_s).value

    def f2(x: float) -> float:
        ddx = _deriv(u, 2, x)
        if ddx == 0.0:
            return 0.0
        return ddx * ddx * single_sum(p, 2, 4, _deriv(u, 1, x), tol=tol_s).value

    t0 = _TailLedger()
    int0, err0 = _quad_piece(f0, a, b, tol / 10.0)
    e0 = int0 / span
    t0.add(err0 + tol_s * span, 1.0 / span)

    # E1 = c1 (b-a) E0 - 1/(2(b-a)) sum_j [(j + 2a1 - 1) W(u'(a) j) + (b-side)]
    t1 = _TailLedger()
    t1.add(t0.total, c1 * span)
    sa = offset_sum(p, 0, scale=dua, coeffs=(2.0 * a1 - 1.0, 1.0), tol=tol_s)
    sb = offset_sum(p, 0, scale=dub, coeffs=(2.0 * b1 - 1.0, 1.0), tol=tol_s)
    t1.add(sa.tail_bound + sb.tail_bound, 0.5 / span)
    e1 = c1 * span * e0 - (sa.value + sb.value) / (2.0 * span)

    # E2, term by term in the order of the statement
    t2 = _TailLedger()
    int2, err2 = _quad_piece(f2, a, b, tol / 10.0)
    t2.add(err2 + tol_s * span, 1.0 / (24.0 * span))
    t2.add(t0.total, c2 * span)
    wa = offset_sum(p, 0, scale=dua,
                    coeffs=(c1 / 2.0 - a1 * c1 - a2 / span, -c1 / 2.0), tol=tol_s)
    wb = offset_sum(p, 0, scale=dub,
                    coeffs=(c1 / 2.0 - b1 * c1 - b2 / span, -c1 / 2.0), tol=tol_s)
    da = offset_sum(p, 1, scale=dua,
                    coeffs=(0.0, -1.0 / 12.0 + a1 / 2.0 - a1 * a1 / 2.0,
                            0.25 - a1 / 2.0, -1.0 / 6.0), tol=tol_s)
    db = offset_sum(p, 1, scale=dub,
                    coeffs=(0.0, 1.0 / 12.0 - b1 / 2.0 + b1 * b1 / 2.0,
                            -0.25 + b1 / 2.0, 1.0 / 6.0), tol=tol_s)
    t2.add(wa.tail_bound + wb.tail_bound)
    t2.add(da.tail_bound, abs(d2ua) / span)
    t2.add(db.tail_bound, abs(d2ub) / span)
    e2 = math.fsum([
        -int2 / (24.0 * span),
        c2 * span * e0,
        wa.value,
        wb.value,
        da.value * d2ua / span,
        db.value * d2ub / span,
    ])
    return ExpansionCoefficients(e0=e0, e1=e1, e2=e2,
                                 tails=(t0.total, t1.total, t2.total))


def _check_symmetric(params: ExpansionParams, tol: float = 1e-9):
    a1, a2 = params.a1, params.a2
    expect_c1 = a1 / 2.0 - 0.25
    expect_c2 = a1 * a1 / 2.0 - a1 / 2.0 + a2 / 2.0 + 0.125
    if (abs(params.b1 - a1) > tol or abs(params.b2 - a2) > tol
            or abs(params.c1 - expect_c1) > tol or abs(params.c2 - expect_c2) > tol):
        raise DomainError(
            "parameters are not of the symmetric [-1,1] form (b=a mirrored, "
            "c1 = a1/2 - 1/4, c2 = a1^2/2 - a1/2 + a2/2 + 1/8)"
        )


def one_jump_coefficients(u: PiecewiseDeformation, p: Potential,
                          params: ExpansionParams, tol: float = 1e-12) -> ExpansionCoefficients:
    """E0, E1, E2 on [-1,1] for a deformation whose derivative may jump at 0."""
    if abs(u.a + 1.0) > _BP_TOL or abs(u.b - 1.0) > _BP_TOL:
        raise DomainError("one-jump expansion lives on [-1, 1]")
    interior = u.breakpoints[1:-1]
    if len(interior) > 1 or (len(interior) == 1 and abs(interior[0]) > _BP_TOL):
        raise DomainError("at most one interior breakpoint, located at 0")
    bad = validate_params(params, -1.0, 1.0)
    if bad:
        raise DomainError("invalid expansion parameters: " + "; ".join(bad))
    _check_symmetric(params)

    a1, a2 = params.a1, params.a2
    tol_s = tol / 20.0
    dm, dp = _deriv(u, 1, 0.0, "left"), _deriv(u, 1, 0.0, "right")
    cm, cp = _deriv(u, 2, 0.0, "left"), _deriv(u, 2, 0.0, "right")
    dl, dr = _deriv(u, 1, -1.0), _deriv(u, 1, 1.0)
    c2l, c2r = _deriv(u, 2, -1.0), _deriv(u, 2, 1.0)

    def f0(x: float) -> float:
        return single_sum(p, 0, 0, _deriv(u, 1, x), tol=tol_s).value

    def f2(x: float) -> float:
        ddx = _deriv(u, 2, x)
        if ddx == 0.0:
            return 0.0
        return ddx * ddx * single_sum(p, 2, 4, _deriv(u, 1, x), tol=tol_s).value

    t0 = _TailLedger()
    i0l, e0l = _quad_piece(f0, -1.0, 0.0, tol / 10.0)
    i0r, e0r = _quad_piece(f0, 0.0, 1.0, tol / 10.0)
    e0 = 0.5 * (i0l + i0r)
    t0.add(e0l + e0r + 2.0 * tol_s, 0.5)

    # shared series
    edge_l = offset_sum(p, 0, scale=dl, coeffs=(2.0 * a1 - 1.0, 1.0), tol=tol_s)
    edge_r = offset_sum(p, 0, scale=dr, coeffs=(2.0 * a1 - 1.0, 1.0), tol=tol_s)
    jump_m = offset_sum(p, 0, scale=dm, j_start=2, coeffs=(-1.0, 1.0), tol=tol_s)
    jump_p = offset_sum(p, 0, scale=dp, j_start=2, coeffs=(-1.0, 1.0), tol=tol_s)
    cross = double_sum_jump(p, a=dm, b=dp, i_start=1, tol=tol_s)

    t1 = _TailLedger()
    t1.add(t0.total, abs(a1 - 0.5))
    t1.add(edge_l.tail_bound + edge_r.tail_bound, 0.25)
    t1.add(jump_m.tail_bound + jump_p.tail_bound, 0.25)
    t1.add(cross.tail_bound, 0.5)
    e1 = math.fsum([
        (a1 - 0.5) * e0,
        -0.25 * (edge_l.value + edge_r.value),
        -0.25 * (jump_m.value + jump_p.value),
        0.5 * cross.value,
    ])

    t2 = _TailLedger()
    i2l, e2l = _quad_piece(f2, -1.0, 0.0, tol / 10.0)
    i2r, e2r = _quad_piece(f2, 0.0, 1.0, tol / 10.0)
    t2.add(e2l + e2r + 2.0 * tol_s, 1.0 / 48.0)
    edge2_l = offset_sum(p, 0, scale=dl,
                         coeffs=(-0.25 + a1 - a2 - a1 * a1, 0.25 - a1 / 2.0), tol=tol_s)
    edge2_r = offset_sum(p, 0, scale=dr,
                         coeffs=(-0.25 + a1 - a2 - a1 * a1, 0.25 - a1 / 2.0), tol=tol_s)
    dcoef = (0.0, 1.0 / 6.0 - a1 + a1 * a1, a1 - 0.5, 1.0 / 3.0)
    dedge_l = offset_sum(p, 1, scale=dl, coeffs=dcoef, tol=tol_s)
    dedge_r = offset_sum(p, 1, scale=dr, coeffs=dcoef, tol=tol_s)
    djump_coef = (0.0, 1.0 / 6.0, -0.5, 1.0 / 3.0)
    djump_m = offset_sum(p, 1, scale=dm, j_start=2, coeffs=djump_coef, tol=tol_s)
    djump_p = offset_sum(p, 1, scale=dp, j_start=2, coeffs=djump_coef, tol=tol_s)
    cross1 = double_sum(p, 1, a=dm, b=dp,
                        monomials=((cp, 0, 2), (-cm, 2, 0)), tol=tol_s)
    t2.add(t0.total, abs(0.25 - a1 + a2 + a1 * a1))
    t2.add(edge2_l.tail_bound + edge2_r.tail_bound, 0.5)
    t2.add(dedge_l.tail_bound, 0.25 * abs(c2l))
    t2.add(dedge_r.tail_bound, 0.25 * abs(c2r))
    t2.add(jump_m.tail_bound + jump_p.tail_bound, abs(0.125 - a1 / 4.0))
    t2.add(djump_m.tail_bound, 0.25 * abs(cm))
    t2.add(djump_p.tail_bound, 0.25 * abs(cp))
    t2.add(cross.tail_bound, abs(a1 / 2.0 - 0.25))
    t2.add(cross1.tail_bound, 0.25)
    e2 = math.fsum([
        -(i2l + i2r) / 48.0,
        (0.25 - a1 + a2 + a1 * a1) * e0,
        0.5 * (edge2_l.value + edge2_r.value),
        0.25 * (dedge_r.value * c2r - dedge_l.value * c2l),
        (0.125 - a1 / 4.0) * (jump_m.value + jump_p.value),
        0.25 * (djump_m.value * cm - djump_p.value * cp),
        (a1 / 2.0 - 0.25) * cross.value,
        0.25 * cross1.value,
    ])
    return ExpansionCoefficients(e0=e0, e1=e1, e2=e2,
                                 tails=(t0.total, t1.total, t2.total))


# ---------------------------------------------------------------------------
# sharp-interface sign analysis
# ---------------------------------------------------------------------------

def jump_term(p_slope: float, q_slope: float, pot: Potential, tol: float = 1e-12) -> float:
    """J(a,b): the order-eps excess of a sharp interface with slopes a, b.

    J(a,b) = -1/4 sum_{j>=2} (j-1) W(a j) - 1/4 sum_{j>=2} (j-1) W(b j)
             + 1/2 sum_{i,j>=1} W(b j + a i);   J(a,a) = 0 identically.
    """
    if p_slope <= 0 or q_slope <= 0:
        raise DomainError("slopes must be > 0")
    sa = offset_sum(pot, 0, scale=p_slope, j_start=2, coeffs=(-1.0, 1.0), tol=tol / 4)
    sb = offset_sum(pot, 0, scale=q_slope, j_start=2, coeffs=(-1.0, 1.0), tol=tol / 4)
    ds = double_sum_jump(pot, a=p_slope, b=q_slope, i_start=1, tol=tol / 2)
    return math.fsum([-0.25 * sa.value, -0.25 * sb.value, 0.5 * ds.value])


def jump_curvature(a: float, pot: Potential, tol: float = 1e-12) -> float:
    """A(a) = (1/12) sum_{j>=2} (j - j^3) W''(a j): the Hessian scale of
    J at equal slopes; positive A means small sharp interfaces cost energy."""
    if a <= 0:
        raise DomainError("slope must be > 0")
    s = offset_sum(pot, 2, scale=a, j_start=2, coeffs=(0.0, 1.0, 0.0, -1.0),
                   tol=12.0 * tol)
    return s.value / 12.0


def jump_threshold_closed_form(sigma: float = 1.0) -> float:
    """The Lennard-Jones slope where A changes sign, via zeta values:
    a/sigma = (26 [zeta(11) - zeta(13)] / (7 [zeta(5) - zeta(7)]))^(1/6).

    Each zeta difference is summed directly as sum_{n>=2} (n^2 - 1) n^{-s-2}
    (all terms positive): subtracting two zeta values near 1 would lose four
    digits to cancellation."""

    def zeta_gap(s: float) -> float:
        # zeta(s) - zeta(s + 2), converging like n^{-s}; 10^16 stops when the
        # remainder (bounded by the integral of x^{-s} from n) is below ulp
        total = 0.0
        n = 2
        while True:
            term = (n * n - 1.0) * float(n) ** (-(s + 2.0))
            total += term
            if term * n / (s - 1.0) < 1e-17 * total:
                return total
            n += 1

    ratio = 26.0 * zeta_gap(11.0) / (7.0 * zeta_gap(5.0))
    return ratio ** (1.0 / 6.0) * sigma


def jump_threshold_root(pot: LennardJones, tol: float = 1e-12) -> float:
    """The same threshold found directly as the root of jump_curvature."""
    s = pot.sigma
    return float(brentq(lambda a: jump_curvature(a, pot, tol=tol),
                        0.45 * s, 0.9 * s, xtol=1e-12))


# ---------------------------------------------------------------------------
# microtwin K terms
# ---------------------------------------------------------------------------

def k_terms(cfg: MicrotwinConfig, pot: Potential, a1: float,
            tol: float = 1e-12) -> tuple[float, float]:
    """(K1, K2) of the microtwin energy difference eps K1 + eps^2 K2.

    K1 is half the profile functional F_m at the one-sided slopes; K2 mixes
    W' sums weighted by the one-sided curvatures. The second-derivative factor
    on the profiled positions is m^2 y(j/m) — linear in y, from Taylor-expanding
    u(m eps) y(j/m) rather than u at a profiled point.
    """
    m = cfg.profile.m
    y = np.asarray(cfg.profile.values, dtype=np.float64)
    u = cfg.u
    dm, dp = _deriv(u, 1, 0.0, "left"), _deriv(u, 1, 0.0, "right")
    cm, cp = _deriv(u, 2, 0.0, "left"), _deriv(u, 2, 0.0, "right")
    chain = ProfileChain(m=m, x=tuple(cfg.profile.values))
    tol_s = tol / (6 * m)

    k1 = 0.5 * f_m(dm, dp, chain, pot, tol=tol)

    parts = []  # T1: mixed curvature sums over the left bulk
    for j in range(1, m):
        yj = y[j - 1]
        off_prof = dp * m * yj
        off_ref = dp * float(j)
        s_prof0 = offset_sum(pot, 1, scale=dm, offset=off_prof, j_start=0, tol=tol_s)
        s_prof2 = offset_sum(pot, 1, scale=dm, offset=off_prof, j_start=0,
                             coeffs=(0.0, 0.0, 1.0), tol=tol_s)
        s_ref0 = offset_sum(pot, 1, scale=dm, offset=off_ref, j_start=0, tol=tol_s)
        s_ref2 = offset_sum(pot, 1, scale=dm, offset=off_ref, j_start=0,
                            coeffs=(0.0, 0.0, 1.0), tol=tol_s)
        parts.append(cp * m * m * yj * s_prof0.value - cm * s_prof2.value)
        parts.append(-(cp * j * j * s_ref0.value - cm * s_ref2.value))
    t1 = math.fsum(parts)

    t2 = 0.0  # interior pair sum
    for i in range(1, m - 1):
        for j in range(i + 1, m):
            gap = y[j - 1] - y[i - 1]
            t2 += pot.eval(1, dp * m * gap) * m * m * gap

    t3_parts = []  # right bulk
    for i in range(1, m):
        yi = y[i - 1]
        s = offset_sum(pot, 1, scale=dp, offset=-dp * m * yi, j_start=m,
                       coeffs=(-(m * m * yi), 0.0, 1.0), tol=tol_s)
        t3_parts.append(s.value)
    t3 = math.fsum(t3_parts)

    t4 = (m - 1) * offset_sum(pot, 1, scale=dp, coeffs=(0.0, float(m), 1.0),
                              tol=tol_s).value

    k2 = math.fsum([0.25 * t1, 0.25 * cp * t2, 0.25 * cp * t3, -0.25 * cp * t4,
                    (a1 - 0.5) * k1])
    return k1, k2


# ---------------------------------------------------------------------------
# cross-interface interaction decay
# ---------------------------------------------------------------------------

def cross_interface_decay(u: PiecewiseDeformation, pot: Potential, eps_seq) -> float:
    """Fitted log-log decay exponent of the interaction between non-adjacent
    pieces: (1/N) sum over site pairs whose pieces are >= 2 apart. For decay
    alpha the envelope bound gives O(eps^(alpha-1)); the fit should approach
    alpha - 1 from whichever side the attractive tail dictates."""
    eps_list = [float(e) for e in eps_seq]
    if len(eps_list) < 4:
        raise InsufficientDataError("need at least 4 eps values to fit a slope")
    if len(u.pieces) < 3:
        raise DomainError("need at least 3 pieces (2 interior breakpoints)")
    interior = np.asarray(u.breakpoints[1:-1])

    sums = []
    for eps in eps_list:
        w = lattice_window(u.a, u.b, 0.0, eps)
        cfg = sample_to_lattice(u, w)
        xs = w.coordinates()
        piece = np.searchsorted(interior, xs, side="right")
        vals = cfg.values
        inv_eps = 1.0 / eps
        total = 0.0
        for pi in range(len(u.pieces)):
            vi = vals[piece == pi]
            if vi.size == 0:
                continue
            for pj in range(pi + 2, len(u.pieces)):
                vj = vals[piece == pj]
                if vj.size == 0:
                    continue
                t = (vj[None, :] - vi[:, None]) * inv_eps
                total += float(np.sum(pot.eval(0, t)))
        sums.append(abs(total) / w.N)
    slope = np.polyfit(np.log(eps_list), np.log(sums), 1)[0]
    return float(slope)
