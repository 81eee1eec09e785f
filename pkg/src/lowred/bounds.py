"""Analytic constants and recovery-error bounds.

All quantities are returned as ``mpmath.mpf``: the sample floor ``beta``
decays like ``r**(d(d-1)/2)`` and the error bounds grow like ``C**d`` with
``C ~ d / beta**2``, so already at ``d = 7`` they leave the double range.
Products of powers of ``r`` are accumulated as logarithms.

Two readings of ``beta`` are supported: a product over ``k = 0..d-1``
(``variant="lemma"``) and over ``k = 1..d-1`` (``variant="theorem"``).  The lemma value is half the
theorem value and is the default, since a smaller floor only weakens the
claimed guarantees.
"""

import json
import math
from dataclasses import asdict, dataclass

import mpmath
import numpy as np

from .errors import InadmissibleNoiseError, ValidationError
from .polyspace import l1_coeff_norm

__all__ = [
    "VARIANTS",
    "BoundReport",
    "TruncationFloor",
    "radius",
    "beta",
    "log_beta",
    "find_n0",
    "truncation_floor",
    "admissible_noise",
    "error_bound",
    "propagation_error_bound",
    "kernel_error_bound",
    "fixed_floor_error_bound",
]

VARIANTS = ("lemma", "theorem")
_MIN_DPS = 30


def _mp():
    return mpmath.workdps(max(mpmath.mp.dps, _MIN_DPS))


def _variant(variant):
    if variant not in VARIANTS:
        raise ValidationError(f"unknown beta variant {variant!r}; expected one of {VARIANTS}")
    return variant


def _check_d(d):
    if int(d) != d or d < 2:
        raise ValidationError(f"the constants need integer d >= 2, got {d}")
    return int(d)


def radius(d):
    """Root separation ``r = sin(2 pi / ((d-1) d^2))``."""
    d = _check_d(d)
    with _mp():
        return +mpmath.sin(2 * mpmath.pi / ((d - 1) * d * d))


def log_beta(d, variant="lemma"):
    _variant(variant)
    d = _check_d(d)
    with _mp():
        r = radius(d)
        t = mpmath.mpf(d - 1) / (2 * d)
        first = 0 if variant == "lemma" else 1
        return ((d - 1) * d / 2 * mpmath.log(r) + d * mpmath.log(t)
                + mpmath.log(mpmath.mpf(2) / (d - 1))
                - mpmath.fsum(mpmath.log1p(r ** k) for k in range(first, d)))


def beta(d, variant="lemma"):
    """Normalized sample floor::

        r^{(d-1)d/2} ((d-1)/(2d))^d (2/(d-1)) / prod_k (r^k + 1)
    """
    with _mp():
        return mpmath.exp(log_beta(d, variant))


def find_n0(coeffs_abs, t):
    """Smallest ``n`` in ``0..d-1`` with ``|a_n| >= ||a||_1 t^(d-n) (1/t - 1)``.

    Such an index always exists for ``0 < t < 1`` and nonzero ``a``.
    """
    a = [abs(v) for v in coeffs_abs]
    if not 0 < t < 1:
        raise ValidationError("t must lie in (0, 1)")
    total = math.fsum(float(v) for v in a) if not any(isinstance(v, mpmath.mpf) for v in a) \
        else mpmath.fsum(a)
    if total == 0:
        raise ValidationError("find_n0 needs a nonzero vector")
    d = len(a)
    for n in range(d):
        if a[n] >= total * t ** (d - n) * (1 / t - 1):
            return n
    raise AssertionError("no index satisfies the geometric inequality")  # unreachable


@dataclass(frozen=True)
class TruncationFloor:
    """Lower bounds ``m(n0, n)`` on ``|p_n(nu^j z0)|`` for ``n = n0..d``."""

    n0: int
    values: tuple

    def at(self, n):
        return self.values[n - self.n0]


def truncation_floor(p, r=None):
    """Floors on the truncations of ``p`` at a point ``r``-separated from their roots.

    ``m(n0, n0) = r^{(n0-1)n0/2} ||p^||_1 t^{d-n0} 2/(d-1)`` with ``t = (d-1)/(2d)``
    and ``m(n0, n+1) = m(n0, n) r^n / (r^n + 1)``.
    """
    d = _check_d(p.dim)
    if p.is_zero:
        raise ValidationError("truncation floor of the zero polynomial")
    with _mp():
        r = radius(d) if r is None else mpmath.mpf(r)
        if not 0 < r <= 1:
            raise ValidationError("r must lie in (0, 1]")
        t = mpmath.mpf(d - 1) / (2 * d)
        l1 = mpmath.mpf(l1_coeff_norm(p))
        n0 = find_n0([mpmath.mpf(abs(c)) for c in p.coeffs], t)
        m = r ** ((n0 - 1) * n0 / 2) * l1 * t ** (d - n0) * 2 / (d - 1)
        values = [m]
        for n in range(n0, d):
            m = m * r ** n / (r ** n + 1)
            values.append(m)
    return TruncationFloor(n0, tuple(values))


def truncation_floor_closed_form(p, n0, n, r):
    """Direct evaluation of ``m(n0, n)`` (used to cross-check the recursion)."""
    d = p.dim
    with _mp():
        r = mpmath.mpf(r)
        t = mpmath.mpf(d - 1) / (2 * d)
        l1 = mpmath.mpf(l1_coeff_norm(p))
        num = r ** ((n - 1) * n / 2) * l1 * t ** (d - n0) * 2 / (d - 1)
        return num / mpmath.fprod(r ** k + 1 for k in range(n0, n))


def admissible_noise(d, alpha, norm_p, variant="lemma"):
    """Largest ``||eps||_inf`` covered by the bound: ``alpha beta^2 ||p||^2 / (2d-1)``."""
    if not 0 < alpha < 1:
        raise ValidationError("alpha must lie in (0, 1)")
    if not norm_p > 0:
        raise ValidationError("norm_p must be positive")
    with _mp():
        return alpha * beta(d, variant) ** 2 * mpmath.mpf(norm_p) ** 2 / (2 * d - 1)


def _geometric(c, n):
    """``sum_{j<n} c^j`` (equals (1 - c^n)/(1 - c), which is 0/0 at c = 1)."""
    return mpmath.fsum(c ** j for j in range(n))


def _nested_geometric(c, d):
    """``sum_{k=1}^{d} sum_{j<k-1} c^j`` = (d - dc - 1 + c^d)/(1 - c)^2."""
    return mpmath.fsum((d - 1 - j) * c ** j for j in range(d - 1))


@dataclass(frozen=True)
class BoundReport:
    """Constants and recovery-error bound for one ``(d, alpha, eps, ||p||)``.

    ``error_bound`` is the bound of the unnormalized main result;
    ``intro_error_bound`` is the alternative arrangement of the same
    estimate stated for unit-norm inputs (larger by a factor ``d`` for equal
    ``c_tilde``).  ``c_tilde_term`` records whether ``d`` or ``sqrt(d)``
    was used in the numerator of ``c_tilde``.
    """

    d: int
    alpha: float
    variant: str
    c_tilde_term: str
    eps_inf: object
    norm_p: object
    r: object
    beta: object
    admissible_noise: object
    c_tilde: object
    error_bound: object
    intro_error_bound: object
    admissible: bool

    @property
    def log10_error_bound(self):
        return float(mpmath.log10(self.error_bound)) if self.error_bound > 0 else float("-inf")

    def to_dict(self):
        out = {}
        for key, val in asdict(self).items():
            out[key] = _json_number(val)
        out["log10_error_bound"] = self.log10_error_bound
        return out

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def _json_number(val):
    """Doubles stay numbers; reals outside the double range become strings."""
    if isinstance(val, mpmath.mpf):
        f = float(val)
        if math.isfinite(f) and (f != 0 or val == 0):
            return f
        return mpmath.nstr(val, 17, min_fixed=1, max_fixed=0)
    if isinstance(val, (np.floating, np.integer)):
        return val.item()
    return val


def error_bound(d, alpha, eps_inf, norm_p, variant="lemma", c_tilde_term="d", strict=True):
    """Recovery-error bound ``||p~ - c0 p||_2 <= B`` for admissible noise.

    ``c_tilde = ((1+sqrt2)(2d-1) eps/||p||^2 + T) / (beta^2 (1-alpha))`` with
    ``T = d`` (default) or ``sqrt(d)``, and::

        B = ((2+sqrt2)/(beta^2(1-alpha)) S1
             + S2 / (2 beta sqrt(sqrt(d)(1-alpha)))) sqrt(d)(2d-1) eps/||p||

    where ``S2 = sum_{j<d} c^j`` and ``S1 = sum_{j<d-1} (d-1-j) c^j``.

    Raises
    ------
    InadmissibleNoiseError
        If ``eps_inf`` exceeds :func:`admissible_noise` and ``strict`` is set.
    """
    _variant(variant)
    d = _check_d(d)
    if c_tilde_term not in ("d", "sqrt_d"):
        raise ValidationError("c_tilde_term must be 'd' or 'sqrt_d'")
    if eps_inf < 0:
        raise ValidationError("eps_inf must be non-negative")
    with _mp():
        eps = mpmath.mpf(eps_inf)
        npn = mpmath.mpf(norm_p)
        limit = admissible_noise(d, alpha, npn, variant)
        admissible = eps <= limit
        if strict and not admissible:
            raise InadmissibleNoiseError(
                f"eps_inf={mpmath.nstr(eps, 5)} exceeds the admissible "
                f"{mpmath.nstr(limit, 5)}")
        b = beta(d, variant)
        a = mpmath.mpf(alpha)
        sd = mpmath.sqrt(d)
        term = d if c_tilde_term == "d" else sd
        c = ((1 + mpmath.sqrt(2)) * (2 * d - 1) * eps / npn ** 2 + term) / (b ** 2 * (1 - a))
        s1, s2 = _nested_geometric(c, d), _geometric(c, d)
        final = ((2 + mpmath.sqrt(2)) / (b ** 2 * (1 - a)) * s1
                 + s2 / (2 * b * mpmath.sqrt(sd * (1 - a)))) * sd * (2 * d - 1) * eps / npn
        intro = ((2 + mpmath.sqrt(2)) / (b ** 2 * (1 - a)) * s1 * sd
                 + s2 / (2 * b * mpmath.sqrt((1 - a) / sd))) * d * (2 * d - 1) * eps / npn
        return BoundReport(d=d, alpha=float(alpha), variant=variant, c_tilde_term=c_tilde_term,
                           eps_inf=eps, norm_p=npn, r=radius(d), beta=b,
                           admissible_noise=limit, c_tilde=c, error_bound=final,
                           intro_error_bound=intro, admissible=bool(admissible))


def fixed_floor_error_bound(d, m_tilde, eps_inf, norm_p):
    """Bound for a known floor ``min_j |p(nu^j z0)|^2 - (2d-1) eps >= m_tilde ||p||^2``.

    ``c_tilde = ((1+sqrt2) sqrt(d)(2d-1) eps + d ||p||^2) / (sqrt(d) m_tilde ||p||^2)``.
    Returns ``(bound, c_tilde)``.
    """
    if not m_tilde > 0:
        raise ValidationError("m_tilde must be positive")
    with _mp():
        eps, npn, mt = mpmath.mpf(eps_inf), mpmath.mpf(norm_p), mpmath.mpf(m_tilde)
        sd = mpmath.sqrt(d)
        c = ((1 + mpmath.sqrt(2)) * sd * (2 * d - 1) * eps + d * npn ** 2) / (sd * mt * npn ** 2)
        s1, s2 = _nested_geometric(c, d), _geometric(c, d)
        bound = ((2 + mpmath.sqrt(2)) / mt * s1 * sd
                 + s2 / (2 * mpmath.sqrt(mt / sd))) * d * (2 * d - 1) * eps / npn
        return bound, c


def propagation_error_bound(k, eps_inf, x_inf, m):
    """Per-coordinate phase-propagation error bound at 1-based index ``k``.

    Requires ``|x_j|^2 - |eps_j| >= m ||x||_inf^2`` for all ``j``; with
    ``C = ((1+sqrt2) eps + ||x||^2_inf) / (m ||x||^2_inf)``::

        |y_k - phase x_k| <= ((2+sqrt2)/m sum_{j<k-1} C^j + C^(k-1)/(2 sqrt m)) eps/||x||_inf
    """
    if not m > 0:
        raise ValidationError("m must be positive")
    with _mp():
        eps, xi, m = mpmath.mpf(eps_inf), mpmath.mpf(x_inf), mpmath.mpf(m)
        c = ((1 + mpmath.sqrt(2)) * eps + xi ** 2) / (m * xi ** 2)
        return ((2 + mpmath.sqrt(2)) / m * _geometric(c, k - 1)
                + c ** (k - 1) / (2 * mpmath.sqrt(m))) * eps / xi


def kernel_error_bound(d, propagation_l2_error, eps_inf, m, x_inf):
    """``rho(x^, x) <= 2 ||x~ - phase x||_2 + sqrt(d) eps / (2 sqrt(m) ||x||_inf)``."""
    with _mp():
        return (2 * mpmath.mpf(propagation_l2_error)
                + mpmath.sqrt(d) * mpmath.mpf(eps_inf)
                / (2 * mpmath.sqrt(m) * mpmath.mpf(x_inf)))
