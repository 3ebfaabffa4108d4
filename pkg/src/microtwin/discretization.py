"""Lattice windows, epsilon sequences, and the six expansion parameters.

The window [a,b] cut out of the lattice eps*(c+Z) is described by the integer
range k1..k2 and the atom count N = k2-k1+1. Along a chosen sequence eps -> 0
the boundary offsets and 1/(N eps) admit second-order expansions

    eps (c + k1) - a    = a1 eps + a2 eps^2 + o(eps^2)
    b   - eps (c + k2)  = b1 eps + b2 eps^2 + o(eps^2)
    1/(N eps)           = 1/(b-a) + c1 eps + c2 eps^2 + o(eps^2)

whose coefficients (a1,a2,b1,b2,c1,c2) feed the first- and second-order energy
coefficients. make_epsilon_sequence constructs sequences realizing prescribed
(a1,a2); fit_expansion_params recovers all six parameters from a window
sequence by weighted least squares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InsufficientDataError, NoLimitError

_SNAP = 1e-12  # relative guard against float boundary misclassification

# When fit residuals sit at machine-noise level the decay diagnosis is
# meaningless; below this residual/eps^2 the sequence is accepted as-is.
_RESIDUAL_FLOOR = 1e-9


def _snapped(x: float) -> float:
    r = round(x)
    if abs(x - r) <= _SNAP * max(1.0, abs(x)):
        return float(r)
    return x


@dataclass(frozen=True)
class LatticeWindow:
    """The sites of eps*(c+Z) inside [a,b]: integer indices k1..k2, N atoms."""

    a: float
    b: float
    c: float
    eps: float
    k1: int
    k2: int
    N: int

    def sites(self) -> np.ndarray:
        return np.arange(self.k1, self.k2 + 1, dtype=np.int64)

    def coordinates(self) -> np.ndarray:
        return self.eps * (self.c + self.sites().astype(np.float64))


def lattice_window(a: float, b: float, c: float, eps: float) -> LatticeWindow:
    """The unique integers with a/eps - c <= k1 < a/eps - c + 1 and
    b/eps - c - 1 < k2 <= b/eps - c; N = k2 - k1 + 1.

    Exact-tie boundary sites (eps dividing b-a) are kept, matching the closed
    interval; the snap guard absorbs float noise at those ties.
    """
    if not a < b:
        raise DomainError("need a < b")
    if not eps > 0:
        raise DomainError("need eps > 0")
    k1 = int(math.ceil(_snapped(a / eps - c)))
    k2 = int(math.floor(_snapped(b / eps - c)))
    return LatticeWindow(a=a, b=b, c=c, eps=eps, k1=k1, k2=k2, N=k2 - k1 + 1)


def make_epsilon_sequence(a1: float, a2: float, n_max: int) -> list[float]:
    """eps_n realizing boundary parameters (a1, a2) on [-1,1] with c=0.

    eps_n = n/(n^2 + a1 n + a2) except for (a1,a2) = (1,0), which would tie
    the boundary exactly and snap to a1=0; that case uses n^2/(n^3 + n^2 - 1).
    Indices with nonpositive denominator are skipped.
    """
    if not 0.0 <= a1 <= 1.0:
        raise DomainError("need 0 <= a1 <= 1")
    if a1 == 1.0 and a2 > 0.0:
        raise DomainError("a1 = 1 requires a2 <= 0")
    if a1 == 0.0 and a2 < 0.0:
        raise DomainError("a1 = 0 requires a2 >= 0")
    if n_max < 1:
        raise DomainError("need n_max >= 1")
    out = []
    for n in range(1, n_max + 1):
        if a1 == 1.0 and a2 == 0.0:
            den = n**3 + n**2 - 1
            num = n**2
        else:
            den = n**2 + a1 * n + a2
            num = n
        if den > 0:
            out.append(num / den)
    return out


@dataclass(frozen=True)
class ExpansionParams:
    """The six second-order window parameters."""

    a1: float
    a2: float
    b1: float
    b2: float
    c1: float
    c2: float


@dataclass(frozen=True)
class FitDiagnostics:
    """Per-window |residual|/eps^2 of the three second-order fits."""

    eps: tuple[float, ...]
    res_a: tuple[float, ...]
    res_b: tuple[float, ...]
    res_c: tuple[float, ...]


def _fit_quadratic(eps: np.ndarray, y: np.ndarray) -> tuple[float, float, np.ndarray]:
    """Least squares y ~ p1*eps + p2*eps^2 + p3*eps^3 (fit of y/eps on
    [1, eps, eps^2]); the cubic nuisance keeps genuine o(eps^2) remainders
    from biasing (p1, p2) or the residual diagnostic. Returns
    (p1, p2, |full-model residual|/eps^2)."""
    t = y / eps
    design = np.column_stack([np.ones_like(eps), eps, eps * eps])
    coef, *_ = np.linalg.lstsq(design, t, rcond=None)
    res = np.abs(y - eps * (design @ coef)) / eps**2
    return float(coef[0]), float(coef[1]), res


def _extrapolation_residuals(eps: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Third-order divided-difference certificate, independent of the LS fit:
    each window from the third on is predicted by the line (in y/eps vs eps)
    through the two windows preceding it in refinement order; returns
    |prediction error| / eps^2 per predicted window."""
    t = y / eps
    out = np.empty(len(eps) - 2)
    for i in range(2, len(eps)):
        slope = (t[i - 1] - t[i - 2]) / (eps[i - 1] - eps[i - 2])
        pred = t[i - 2] + slope * (eps[i] - eps[i - 2])
        out[i - 2] = abs(y[i] - eps[i] * pred) / eps[i] ** 2
    return out


def _check_decay(eps: np.ndarray, y: np.ndarray, what: str):
    # eps is sorted descending, so the most-refined prediction is at the end.
    # A true p1*eps + p2*eps^2 + o(eps^2) sequence sends these to zero; floor
    # jitter from windows not matched to the expansion makes them blow up.
    # The most-refined residual is compared against the worst earlier one:
    # the error functional can change sign along the ladder, so an adjacent
    # pair may sit on an accidental near-zero dip.
    res = _extrapolation_residuals(eps, y)
    r_small, r_prev = res[-1], float(np.max(res[:-1]))
    if r_small <= _RESIDUAL_FLOOR:
        return
    if r_small > r_prev / 1.5:
        raise NoLimitError(
            f"{what}: extrapolation residual/eps^2 not decaying at the smallest "
            f"eps (worst earlier {r_prev:.3e} -> {r_small:.3e}); no "
            f"second-order limit along this sequence"
        )


def fit_expansion_params(window_seq, n_fit: int = 6, full_output: bool = False):
    """Recover (a1,a2,b1,b2,c1,c2) from a sequence of windows with eps -> 0.

    Uses the n_fit smallest eps (o(eps^2) remainders vanish fastest there).
    Raises InsufficientDataError below 4 windows and NoLimitError when the
    divided-difference extrapolation residual/eps^2 at the smallest eps fails
    to decrease 1.5x vs the previous refinement step (with a 1e-9 floor for
    exactly-realized sequences). The decay diagnosis presumes
    meaningfully separated eps values (e.g. a halving subsequence); consecutive
    eps ratios near 1 make any o(eps^2) statement untestable.
    """
    windows = sorted(window_seq, key=lambda w: w.eps, reverse=True)
    if len(windows) < 4:
        raise InsufficientDataError(f"need at least 4 windows, got {len(windows)}")
    a, b, c = windows[0].a, windows[0].b, windows[0].c
    for w in windows:
        if (w.a, w.b, w.c) != (a, b, c):
            raise DomainError("all windows must share (a, b, c)")
    windows = windows[-n_fit:] if len(windows) > n_fit else windows

    eps = np.array([w.eps for w in windows])
    r_a = np.array([w.eps * (c + w.k1) - a for w in windows])
    r_b = np.array([b - w.eps * (c + w.k2) for w in windows])
    r_c = np.array([1.0 / (w.N * w.eps) - 1.0 / (b - a) for w in windows])

    a1, a2, res_a = _fit_quadratic(eps, r_a)
    b1, b2, res_b = _fit_quadratic(eps, r_b)
    c1, c2, res_c = _fit_quadratic(eps, r_c)
    _check_decay(eps, r_a, "left boundary offset")
    _check_decay(eps, r_b, "right boundary offset")
    _check_decay(eps, r_c, "1/(N eps)")

    params = ExpansionParams(a1=a1, a2=a2, b1=b1, b2=b2, c1=c1, c2=c2)
    if full_output:
        return params, FitDiagnostics(
            eps=tuple(eps), res_a=tuple(res_a), res_b=tuple(res_b), res_c=tuple(res_c)
        )
    return params


def validate_params(params: ExpansionParams, a: float, b: float,
                    tol: float = 1e-7) -> list[str]:
    """The constraint list any admissible parameter set must satisfy.

    Returns the violated constraints (empty list = valid). Equality cases are
    detected within tol so that fitted (noisy) parameters validate correctly.
    """
    if not a < b:
        raise DomainError("need a < b")
    v: list[str] = []
    for name, p1, p2 in (("a", params.a1, params.a2), ("b", params.b1, params.b2)):
        if not -tol <= p1 <= 1.0 + tol:
            v.append(f"{name}1 = {p1} outside [0, 1]")
        if abs(p1 - 1.0) <= tol and p2 > tol:
            v.append(f"{name}1 = 1 requires {name}2 <= 0, got {p2}")
        if abs(p1) <= tol and p2 < -tol:
            v.append(f"{name}1 = 0 requires {name}2 >= 0, got {p2}")
    lim = 1.0 / (b - a) ** 2
    lim3 = 1.0 / (b - a) ** 3
    if abs(params.c1) > lim + tol:
        v.append(f"|c1| = {abs(params.c1)} exceeds 1/(b-a)^2 = {lim}")
    if abs(params.c1 - lim) <= tol and params.c2 > lim3 + tol:
        v.append(f"c1 = 1/(b-a)^2 requires c2 <= 1/(b-a)^3, got {params.c2}")
    if abs(params.c1 + lim) <= tol and params.c2 < lim3 - tol:
        v.append(f"c1 = -1/(b-a)^2 requires c2 >= 1/(b-a)^3, got {params.c2}")
    return v


def split_params(params: ExpansionParams) -> tuple[ExpansionParams, ExpansionParams]:
    """Half-window parameters for [-1,0] and [0,1] from symmetric [-1,1] ones.

    The split rests on k1- = k1, k2- = 0 (and mirrored on the right): the new
    interior boundary falls exactly on the lattice site 0, so its offset
    expansion is identically zero, while halving N reshapes (c1, c2).
    """
    c1h = 2.0 * params.c1 - 0.5
    c2h = -2.0 * params.c1 + 2.0 * params.c2 + 0.25
    left = ExpansionParams(a1=params.a1, a2=params.a2, b1=0.0, b2=0.0, c1=c1h, c2=c2h)
    right = ExpansionParams(a1=0.0, a2=0.0, b1=params.b1, b2=params.b2, c1=c1h, c2=c2h)
    return left, right


def symmetric_params(a1: float, a2: float) -> ExpansionParams:
    """The full parameter set on [-1,1] with c=0, where everything is
    determined by (a1, a2): b-side mirrors, c1 = a1/2 - 1/4,
    c2 = a1^2/2 - a1/2 + a2/2 + 1/8."""
    return ExpansionParams(
        a1=a1, a2=a2, b1=a1, b2=a2,
        c1=a1 / 2.0 - 0.25,
        c2=a1**2 / 2.0 - a1 / 2.0 + a2 / 2.0 + 0.125,
    )
