"""The optimal-profile functional between twin interfaces.

F_m(a, b; x_1..x_{m-1}) measures the energy excess (at order eps) of placing
the m-1 atoms between two interfaces at fractional positions x of the twin
band, relative to leaving them on the reference lattice. Four ingredients:
interactions of moved atoms with the left bulk (minus the reference), among
themselves, with the right bulk, and the reference right-bulk correction.

The equispaced chain q_m = (1/m, ..., (m-1)/m) is always a zero of F_m and a
critical point when the one-sided slopes agree; its Hessian is the Toeplitz
matrix with diagonal 2 a^2 m^2 sum_j W''(a j) and off-diagonal
-a^2 m^2 W''(a |k-l|), whose loss of positivity as the slope a grows defines
the critical slope a_m. The G function is the reduction of the second-order
coefficient at the equispaced profile; its maximizer over m (least negative
value) picks the optimal twin width.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .errors import BracketingError, BracketWarning, ConvergenceError, DomainError
from .potential import LennardJones, Potential
from .series import SumResult, offset_sum, single_sum

#: slope (in units of sigma) minimizing the elastic energy density sum_j W(jt):
#: t^6 = 2 zeta(12)/zeta(6) = (1382/675675) pi^6, approx 1.11926.
ELASTIC_MINIMIZER = (1382.0 / 675675.0) ** (1.0 / 6.0) * math.pi


@dataclass(frozen=True)
class ProfileChain:
    """A point of the ordered open simplex: 0 < x_1 < ... < x_{m-1} < 1."""

    m: int
    x: tuple[float, ...]

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 2:
            raise DomainError("need integer m >= 2")
        xs = tuple(float(v) for v in self.x)
        if len(xs) != self.m - 1:
            raise DomainError(f"need m-1 = {self.m - 1} coordinates, got {len(xs)}")
        full = (0.0,) + xs + (1.0,)
        if not all(u < v for u, v in zip(full, full[1:])):
            raise DomainError("coordinates must satisfy 0 < x_1 < ... < x_{m-1} < 1")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "x", xs)


@dataclass(frozen=True)
class QmPoint:
    """Marker for the equispaced chain q_m."""

    m: int

    def as_chain(self) -> ProfileChain:
        return q_m(self.m)


def q_m(m: int) -> ProfileChain:
    """The equispaced chain (1/m, ..., (m-1)/m)."""
    return ProfileChain(m=m, x=tuple(j / m for j in range(1, m)))


def _chain_arrays(chain: ProfileChain):
    return chain.m, np.asarray(chain.x, dtype=np.float64)


def f_m(a: float, b: float, chain: ProfileChain, pot: Potential,
        tol: float = 1e-12) -> float:
    """The four-term profile functional, all series tails certified.

    Term 1: sum_{i>=0} sum_{j=1..m-1} [W(b m x_j + a i) - W(b j + a i)]
    Term 2: sum_{i<j interior} W(b m (x_j - x_i))
    Term 3: sum_{i=1..m-1} sum_{j>=m} W(b [j - m x_i])
    Term 4: -(m-1) sum_{j>=1} W(b j)
    """
    if a <= 0 or b <= 0:
        raise DomainError("slopes must be > 0")
    m, x = _chain_arrays(chain)
    n_series = 2 * (m - 1) + (m - 1) + 1
    tol_each = tol / n_series
    parts = []
    for j in range(1, m):
        parts.append(offset_sum(pot, 0, scale=a, offset=b * m * x[j - 1],
                                j_start=0, tol=tol_each).value)
        parts.append(-offset_sum(pot, 0, scale=a, offset=b * float(j),
                                 j_start=0, tol=tol_each).value)
    for i in range(1, m - 1):
        for j in range(i + 1, m):
            parts.append(pot.eval(0, b * m * (x[j - 1] - x[i - 1])))
    for i in range(1, m):
        parts.append(offset_sum(pot, 0, scale=b, offset=-b * m * x[i - 1],
                                j_start=m, tol=tol_each).value)
    parts.append(-(m - 1) * single_sum(pot, 0, 0, b, tol=tol_each).value)
    return math.fsum(parts)


def f_m_gradient(a: float, b: float, chain: ProfileChain, pot: Potential,
                 tol: float = 1e-12) -> np.ndarray:
    """Analytic partial derivatives of f_m in the chain coordinates."""
    if a <= 0 or b <= 0:
        raise DomainError("slopes must be > 0")
    m, x = _chain_arrays(chain)
    tol_each = tol / (2 * (m - 1)) if m > 1 else tol
    grad = np.zeros(m - 1)
    bm = b * m
    for k in range(1, m):
        xk = x[k - 1]
        terms = [offset_sum(pot, 1, scale=a, offset=bm * xk, j_start=0,
                            tol=tol_each).value]
        for i in range(1, k):
            terms.append(pot.eval(1, bm * (xk - x[i - 1])))
        for j in range(k + 1, m):
            terms.append(-pot.eval(1, bm * (x[j - 1] - xk)))
        terms.append(-offset_sum(pot, 1, scale=b, offset=-bm * xk, j_start=m,
                                 tol=tol_each).value)
        grad[k - 1] = bm * math.fsum(terms)
    return grad


def f_m_hessian(a: float, b: float, chain: ProfileChain, pot: Potential,
                tol: float = 1e-12) -> np.ndarray:
    """Analytic Hessian of f_m at a general chain (W even, so W'' of the
    absolute separation appears on the off-diagonal with a minus sign)."""
    if a <= 0 or b <= 0:
        raise DomainError("slopes must be > 0")
    m, x = _chain_arrays(chain)
    tol_each = tol / (2 * (m - 1)) if m > 1 else tol
    bm = b * m
    h = np.zeros((m - 1, m - 1))
    for k in range(1, m):
        xk = x[k - 1]
        diag = [offset_sum(pot, 2, scale=a, offset=bm * xk, j_start=0,
                           tol=tol_each).value,
                offset_sum(pot, 2, scale=b, offset=-bm * xk, j_start=m,
                           tol=tol_each).value]
        for i in range(1, m):
            if i != k:
                diag.append(pot.eval(2, bm * abs(xk - x[i - 1])))
        h[k - 1, k - 1] = bm**2 * math.fsum(diag)
        for ell in range(k + 1, m):
            v = -(bm**2) * pot.eval(2, bm * abs(x[ell - 1] - xk))
            h[k - 1, ell - 1] = v
            h[ell - 1, k - 1] = v
    return h


def hessian_at_qm(a: float, m: int, pot: Potential, tol: float = 1e-12) -> np.ndarray:
    """Closed-form Hessian of F_m(a, a; .) at q_m: Toeplitz with diagonal
    2 a^2 m^2 sum_{j>=1} W''(a j) and off-diagonal -a^2 m^2 W''(a |k-l|)."""
    if a <= 0:
        raise DomainError("slope must be > 0")
    if m < 2:
        raise DomainError("need m >= 2")
    s = single_sum(pot, 2, 0, a, tol=tol).value
    am2 = a * a * m * m
    h = np.zeros((m - 1, m - 1))
    np.fill_diagonal(h, 2.0 * am2 * s)
    for k in range(m - 1):
        for ell in range(k + 1, m - 1):
            v = -am2 * pot.eval(2, a * (ell - k))
            h[k, ell] = v
            h[ell, k] = v
    return h


def _lambda_min(a: float, m: int, pot: Potential, tol: float) -> float:
    return float(np.linalg.eigvalsh(hessian_at_qm(a, m, pot, tol))[0])


def critical_a(m: int, pot: LennardJones, tol: float = 1e-10) -> float:
    """The slope a_m at which the q_m Hessian loses positive definiteness.

    Bisection on the smallest eigenvalue over [sigma, 1.5 sigma] (all known
    values sit near 1.24 sigma), widening the bracket a few times if needed;
    the root is cross-checked against the determinant sign change.
    """
    if m < 2:
        raise DomainError("need m >= 2")
    sigma = pot.sigma
    lo, hi = sigma, 1.5 * sigma
    for _ in range(4):
        if _lambda_min(lo, m, pot, tol) > 0 > _lambda_min(hi, m, pot, tol):
            break
        lo, hi = lo / 1.5, hi * 1.5
    else:
        raise BracketingError(
            f"smallest eigenvalue does not change sign on [{lo}, {hi}]"
        )
    while hi - lo > tol * sigma:
        mid = 0.5 * (lo + hi)
        if _lambda_min(mid, m, pot, tol) > 0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)

    # determinant cross-check: positive below the threshold, sign change across it
    probe = max(10 * tol, 1e-6) * sigma
    sign_below = np.sign(np.linalg.det(hessian_at_qm(root - probe, m, pot, tol)))
    sign_above = np.sign(np.linalg.det(hessian_at_qm(root + probe, m, pot, tol)))
    if not (sign_below > 0 >= sign_above):
        raise ConvergenceError(
            f"determinant sign pattern ({sign_below}, {sign_above}) inconsistent "
            f"with an eigenvalue crossing at {root}"
        )
    return root


def _softmax_gaps(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gap parameterization: d = softmax(g) are the m gaps, x = cumsum(d)[:-1].

    Returns (x, d). Any real g yields a valid interior chain, so quasi-Newton
    steps can never leave the ordered simplex.
    """
    e = np.exp(g - np.max(g))
    d = e / np.sum(e)
    return np.cumsum(d)[:-1], d


def minimize_f_m(a: float, b: float, m: int, pot: Potential, tol: float = 1e-8,
                 multistart_count: int = 9, seed: int = 0,
                 series_tol: float = 1e-12) -> tuple[ProfileChain, float]:
    """Local minimization of F_m(a, b; .) over the ordered simplex.

    BFGS in unconstrained gap coordinates (softmax), analytic gradients,
    multistart from q_m plus random perturbations of radius 0.1/m. Succeeds
    when the analytic chain-space gradient at the best point is below tol in
    sup norm; otherwise raises ConvergenceError with diagnostics.
    """
    if a <= 0 or b <= 0:
        raise DomainError("slopes must be > 0")
    if m < 2:
        raise DomainError("need m >= 2")
    rng = np.random.default_rng(seed)
    x0s = [np.asarray(q_m(m).x)]
    for _ in range(max(0, multistart_count - 1)):
        x0s.append(np.asarray(q_m(m).x) + rng.uniform(-0.1 / m, 0.1 / m, size=m - 1))

    def objective(g: np.ndarray):
        x, d = _softmax_gaps(g)
        chain = ProfileChain(m=m, x=tuple(x))
        # collapsing gaps drive W into its core; let the blow-up reach BFGS
        # as inf rather than as an overflow warning
        with np.errstate(over="ignore", invalid="ignore"):
            val = f_m(a, b, chain, pot, tol=series_tol)
            gx = f_m_gradient(a, b, chain, pot, tol=series_tol)
        # dx_i/dg_k = d_k (1_{k <= i} - x_i)
        i_idx = np.arange(1, m)[:, None]   # chain index i = 1..m-1
        k_idx = np.arange(m)[None, :]      # gap index   k = 0..m-1
        jac = d[None, :] * ((k_idx < i_idx).astype(float) - x[:, None])
        return val, jac.T @ gx

    best = None
    for x0 in x0s:
        gaps = np.diff(np.concatenate([[0.0], x0, [1.0]]))
        g0 = np.log(gaps)
        res = _scipy_minimize(objective, g0, jac=True, method="BFGS",
                              options={"gtol": 1e-13, "maxiter": 500})
        x, _ = _softmax_gaps(res.x)
        chain = ProfileChain(m=m, x=tuple(x))
        gnorm = float(np.max(np.abs(f_m_gradient(a, b, chain, pot, tol=series_tol))))
        val = f_m(a, b, chain, pot, tol=series_tol)
        if best is None or val < best[1]:
            best = (chain, val, gnorm)
    chain, val, gnorm = best
    if gnorm > tol:
        raise ConvergenceError(
            f"no start reached gradient norm {tol}: best value {val}, "
            f"gradient sup norm {gnorm}"
        )
    return chain, val


def g_function(a: float, sigma: float, m: int, tol: float = 1e-12) -> float:
    """G(a, sigma, m): finite polynomial-weighted W' sum up to m-2 plus a
    certified infinite tail from m-1, for the Lennard-Jones well width sigma."""
    if m < 2:
        raise DomainError("need m >= 2")
    if a <= 0 or sigma <= 0:
        raise DomainError("a and sigma must be > 0")
    pot = LennardJones(sigma)
    head = 0.0
    if m > 2:
        # coefficient -(j - 1)(j^2 - j - 1); zero at j = 1
        j = np.arange(1, m - 1, dtype=np.float64)
        head = float(np.sum((-j**3 + 2.0 * j**2 - 1.0) * pot.eval(1, a * j)))
    # (j - 1)(2j - m) = 2 j^2 - (m + 2) j + m
    tail = offset_sum(pot, 1, scale=a, offset=0.0, j_start=m - 1,
                      coeffs=(float(m), -(m + 2.0), 2.0), tol=tol).value
    return head - (m - 1) * tail


def optimal_m(sigma: float, m_max: int, tol: float = 1e-12) -> int:
    """The twin width m in {2..m_max} whose second-order coefficient proxy
    sigma*G(a_sigma, sigma, m) is least negative (all values are negative for
    Lennard-Jones at the elastic minimizer, so this is the smallest |K2|).

    Warns with BracketWarning when the best m sits on the m_max boundary,
    since the true optimum may lie beyond the searched range.
    """
    if m_max < 2:
        raise DomainError("need m_max >= 2")
    a_sigma = ELASTIC_MINIMIZER * sigma
    values = {m: sigma * g_function(a_sigma, sigma, m, tol=tol)
              for m in range(2, m_max + 1)}
    best = max(values, key=values.get)
    if best == m_max:
        warnings.warn(
            f"optimal m = {best} lies on the search boundary m_max = {m_max}; "
            "the bracket may be too small",
            BracketWarning,
        )
    return best
