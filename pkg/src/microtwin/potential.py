"""Two-body interaction potentials with certified decay envelopes.

A potential here is a function W on (0, inf) together with its derivatives up
to order 4 and a power-law *decay envelope*

    |W^(i)(t)| <= C_i * t^(-alpha - i)    for all t >= R,  i = 0..4,

which is what every truncated lattice sum in this package uses to certify its
tail. The envelope constants are computed at construction (closed form for
Lennard-Jones, numeric scan for custom potentials) so that the bound is an
actual upper bound, not an asymptotic statement.

Only strictly positive arguments are meaningful; the pair energies elsewhere
always feed in positive gaps (deformations are strictly increasing), and W is
used as an even function of the signed gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UnsupportedOrderError

MAX_ORDER = 4

# Falling-power coefficients for d^i/dt^i t^(-n) = (-1)^i * poch(n, i) * t^(-n-i)
_POCH12 = tuple(math.prod(range(12, 12 + i)) for i in range(MAX_ORDER + 1))
_POCH6 = tuple(math.prod(range(6, 6 + i)) for i in range(MAX_ORDER + 1))


@dataclass(frozen=True)
class DecayEnvelope:
    """Power-law decay certificate for a potential and its derivatives.

    ``constants[i] * t**(-alpha - i)`` bounds ``|W^(i)(t)|`` for ``t >= R``.
    ``C`` is the single constant valid for every order (the max), kept for
    callers that want one number.
    """

    C: float
    R: float
    alpha: float
    constants: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.R <= 0 or self.C <= 0:
            raise DomainError("envelope requires C, R > 0")
        if not self.alpha > 3.0:
            raise DomainError("envelope decay exponent must be > 3")
        if not self.constants:
            object.__setattr__(self, "constants", (self.C,) * (MAX_ORDER + 1))
        if len(self.constants) != MAX_ORDER + 1:
            raise DomainError(f"need {MAX_ORDER + 1} per-order envelope constants")

    def constant(self, order: int) -> float:
        if not 0 <= order <= MAX_ORDER:
            raise UnsupportedOrderError(f"envelope order {order} not in 0..{MAX_ORDER}")
        return self.constants[order]


class Potential:
    """Base class: derivatives via ``eval`` and a decay envelope.

    Subclasses implement ``_eval_impl(order, t)`` on validated positive numpy
    arrays. ``even=True`` records that W is used as an even function of the
    signed gap (all shipped potentials are).
    """

    envelope: DecayEnvelope
    even: bool = True

    def eval(self, order: int, t):
        if not isinstance(order, (int, np.integer)) or not 0 <= order <= MAX_ORDER:
            raise UnsupportedOrderError(
                f"derivative order {order!r} unsupported (have 0..{MAX_ORDER})"
            )
        arr = np.asarray(t, dtype=np.float64)
        if arr.size and np.min(arr) <= 0.0:
            raise DomainError("potential argument must be > 0")
        out = self._eval_impl(int(order), arr)
        if np.ndim(t) == 0:
            return float(out)
        return out

    def _eval_impl(self, order: int, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class LennardJones(Potential):
    """W(t) = (sigma/t)^12 - (sigma/t)^6.

    Zero at t = sigma, minimum -1/4 at t = 2^(1/6) sigma, decays like
    -(sigma/t)^6. Envelope: alpha = 6, R = sigma, with exact per-order
    constants sigma^6 * max(poch12_i - poch6_i, poch6_i) (the supremum of
    |W^(i)(t)| t^(6+i) over t >= sigma is attained at an endpoint because the
    expression is linear in (sigma/t)^6).
    """

    def __init__(self, sigma: float = 1.0):
        sigma = float(sigma)
        if sigma <= 0:
            raise DomainError("sigma must be > 0")
        self.sigma = sigma
        s6 = sigma**6
        consts = tuple(
            s6 * max(abs(_POCH12[i] - _POCH6[i]), _POCH6[i])
            for i in range(MAX_ORDER + 1)
        )
        self.envelope = DecayEnvelope(C=max(consts), R=sigma, alpha=6.0, constants=consts)

    def _eval_impl(self, order: int, t: np.ndarray) -> np.ndarray:
        inv = 1.0 / t
        a = self.sigma * inv
        a2 = a * a
        a6 = a2 * a2 * a2
        a12 = a6 * a6
        core = _POCH12[order] * a12 - _POCH6[order] * a6
        if order:
            core = core * inv**order
        if order % 2:
            core = -core
        return core

    def __repr__(self):
        return f"LennardJones(sigma={self.sigma!r})"


def eval_potential(p: Potential, order: int, t):
    """Evaluate W^(order) at t (scalar or array). Domain: t > 0, order 0..4."""
    return p.eval(order, t)


def envelope_bound(p: Potential, order: int, t):
    """Certified upper bound C_order * t^(-alpha-order) for |W^(order)(t)|.

    Only valid (and only allowed) for t >= R; smaller t raises DomainError
    because the power law says nothing there.
    """
    env = p.envelope
    arr = np.asarray(t, dtype=np.float64)
    if arr.size and np.min(arr) < env.R:
        raise DomainError(f"envelope bound only valid for t >= R = {env.R}")
    out = env.constant(order) * arr ** (-env.alpha - order)
    return float(out) if np.ndim(t) == 0 else out


def scan_envelope_constants(eval_fn, alpha: float, R: float,
                            n_grid: int = 4000, margin: float = 1.05) -> tuple[float, ...]:
    """Numeric per-order envelope constants for a custom potential.

    Maximises |W^(i)(t)| * t^(alpha+i) on a log grid over [R, 1e4*R] and adds
    a multiplicative safety margin. For potentials with closed forms prefer
    exact constants (see LennardJones).
    """
    ts = np.geomspace(R, 1e4 * R, n_grid)
    out = []
    for i in range(MAX_ORDER + 1):
        vals = np.abs(np.asarray(eval_fn(i, ts))) * ts ** (alpha + i)
        out.append(float(vals.max()) * margin)
    return tuple(out)


_KINDS = ("lennard-jones",)


def potential_from_config(cfg: dict) -> Potential:
    """Build a potential from a config mapping.

    Recognised keys: kind ("lennard-jones"), sigma, and an optional envelope
    table {C, R, alpha} overriding the constructed one (single-constant,
    conservative). Unknown keys are rejected so config typos fail loudly.
    """
    allowed = {"kind", "sigma", "envelope"}
    unknown = set(cfg) - allowed
    if unknown:
        raise DomainError(f"unknown potential config keys: {sorted(unknown)}")
    kind = cfg.get("kind", "lennard-jones")
    if kind not in _KINDS:
        raise DomainError(f"unknown potential kind {kind!r}; known: {_KINDS}")
    pot = LennardJones(sigma=float(cfg.get("sigma", 1.0)))
    if "envelope" in cfg:
        ov = dict(cfg["envelope"])
        bad = set(ov) - {"C", "R", "alpha"}
        if bad:
            raise DomainError(f"unknown envelope keys: {sorted(bad)}")
        pot.envelope = DecayEnvelope(
            C=float(ov.get("C", pot.envelope.C)),
            R=float(ov.get("R", pot.envelope.R)),
            alpha=float(ov.get("alpha", pot.envelope.alpha)),
        )
    return pot
