"""Analytic polynomials on the unit circle as a reproducing-kernel space.

A polynomial ``p(z) = c_0 + c_1 z + ... + c_{d-1} z^{d-1}`` is stored by its
dense coefficient vector.  The inner product is the scaled L2 product on the
circle, which makes the monomials orthonormal, so ``<p, q> = sum c_j conj(b_j)``
and ``||p||_2`` is the Euclidean norm of the coefficients.
"""

import json
from dataclasses import dataclass

import numpy as np

from . import _numeric as nx
from .errors import ValidationError

__all__ = [
    "Polynomial",
    "UnitPoint",
    "evaluate",
    "kernel_poly",
    "inner",
    "norm",
    "l1_coeff_norm",
    "truncate",
    "rho",
    "omega",
    "nu",
]


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Element of the space of polynomials of degree at most ``dim - 1``.

    Parameters
    ----------
    coeffs : array_like
        Complex coefficients ``(c_0, ..., c_{d-1})``, constant term first.
        An object array of mpmath numbers selects the high-precision path.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs)
        if c.ndim != 1 or c.size < 1:
            raise ValidationError("coefficients must be a non-empty 1-d sequence")
        c = nx.to_mp(c) if c.dtype == object else c.astype(complex)
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self):
        return int(self.coeffs.size)

    @property
    def is_mp(self):
        return nx.is_mp(self.coeffs)

    @property
    def is_zero(self):
        return all(v == 0 for v in self.coeffs)

    def __call__(self, z):
        return evaluate(self, z)

    def __len__(self):
        return self.dim

    def __repr__(self):
        return f"Polynomial(dim={self.dim}, coeffs={list(self.coeffs)!r})"

    def to_mp(self):
        return self if self.is_mp else Polynomial(nx.to_mp(self.coeffs))

    def to_float(self):
        return Polynomial(nx.to_float(self.coeffs)) if self.is_mp else self

    def scaled(self, s):
        return Polynomial(self.coeffs * s)

    def to_dict(self):
        c = nx.to_float(self.coeffs)
        return {"dim": self.dim,
                "coeffs": [[float(v.real), float(v.imag)] for v in c]}

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data):
        try:
            pairs = data["coeffs"]
            coeffs = np.array([complex(float(re), float(im)) for re, im in pairs])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed polynomial JSON: {exc}") from None
        dim = data.get("dim", len(coeffs))
        if dim != len(coeffs):
            raise ValidationError(f"dim={dim} but {len(coeffs)} coefficients given")
        return cls(coeffs)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def monomial(cls, k, d):
        c = np.zeros(d, dtype=complex)
        c[k] = 1.0
        return cls(c)


@dataclass(frozen=True)
class UnitPoint:
    """Point ``e^{i angle}`` of the unit circle, kept by its angle.

    Keeping the angle (float or mpmath ``mpf``) lets points such as
    ``z0 * nu**k`` be formed by exact angle addition.
    """

    angle: object

    @property
    def value(self):
        return nx.cis(self.angle)

    @classmethod
    def from_turns(cls, k, n, mp=False):
        """The point ``exp(2*pi*i*k/n)``."""
        return cls(nx.angles_of_turns(k, n, mp=mp)[()])

    @classmethod
    def from_complex(cls, z):
        return cls(float(np.angle(complex(z))) % (2 * np.pi))

    def rotated(self, k, n):
        """This point times ``exp(2*pi*i*k/n)``."""
        return UnitPoint(self.angle + nx.angles_of_turns(k, n, nx.is_mp(self.angle))[()])

    def __complex__(self):
        return complex(self.value)


def omega(d, mp=False):
    """Primitive ``(2d-1)``-st root of unity."""
    return UnitPoint.from_turns(1, 2 * d - 1, mp=mp)


def nu(d, mp=False):
    """Primitive ``d``-th root of unity."""
    return UnitPoint.from_turns(1, d, mp=mp)


def _points(z):
    if isinstance(z, UnitPoint):
        return z.value
    if isinstance(z, (list, tuple)) and z and isinstance(z[0], UnitPoint):
        vals = [u.value for u in z]
        return np.array(vals, dtype=object if nx.any_mp(*vals) else complex)
    return z


def evaluate(p, z):
    """Horner evaluation of ``p`` at ``z`` (scalar, array or UnitPoint)."""
    z = _points(z)
    mp = p.is_mp or nx.is_mp(z)
    c = nx.to_mp(p.coeffs) if mp and not p.is_mp else p.coeffs
    if mp and not nx.is_mp(z):
        z = nx.to_mp(z) if isinstance(z, np.ndarray) else nx.to_mp([z])[0]
    acc = 0 * z
    for cj in c[::-1]:
        acc = acc * z + cj
    return acc


def kernel_poly(w, d):
    """Reproducing kernel ``K_w(z) = sum_j conj(w)^j z^j``, so ``<p, K_w> = p(w)``."""
    if isinstance(w, UnitPoint):
        return Polynomial(nx.cis(-np.arange(d) * w.angle))
    w = complex(w)
    return Polynomial(np.conj(w) ** np.arange(d))


def _pair(p, q):
    if p.dim != q.dim:
        raise ValidationError(f"dimension mismatch: {p.dim} vs {q.dim}")
    a, b = p.coeffs, q.coeffs
    if nx.any_mp(a, b):
        a, b = nx.to_mp(a), nx.to_mp(b)
    return a, b


def inner(p, q):
    """``<p, q> = sum_j c_j conj(b_j)``, linear in ``p``."""
    a, b = _pair(p, q)
    return nx.fsum(a * nx.conj(b))


def norm(p):
    return nx.sqrt(nx.fsum(nx.abs2(p.coeffs)))


def l1_coeff_norm(p):
    """``sum_j |c_j|``, the l1 norm of the coefficient vector."""
    return nx.fsum(nx.absval(p.coeffs))


def truncate(p, n):
    """The ``n``-th truncation ``c_0 + ... + c_{n-1} z^{n-1}``.

    Truncations of a nonzero polynomial can be zero; check ``is_zero``.
    """
    if not 1 <= n <= p.dim:
        raise ValidationError(f"truncation order {n} outside 1..{p.dim}")
    return Polynomial(p.coeffs[:n])


def rho(x, y):
    """Quotient distance ``min_{|w|=1} ||x - w y||``.

    The minimiser is ``w = <x, y>/|<x, y>|``; the distance is then evaluated
    as the norm of the difference, which keeps full relative accuracy when
    ``x`` and ``y`` nearly coincide.
    """
    a, b = _pair(x, y)
    s = nx.fsum(a * nx.conj(b))
    mag = abs(s)
    phase = s / mag if mag > 0 else 1
    return nx.sqrt(nx.fsum(nx.abs2(a - phase * b)))
