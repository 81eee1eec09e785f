"""Trigonometric interpolation through the normalized Dirichlet kernel.

A real trigonometric polynomial of degree at most ``d-1`` is determined by its
values at the ``2d-1`` nodes ``omega**l``, ``l = 1..2d-1``::

    g(z) = sum_l g(omega**l) * D(z * omega**-l),
    D(e^{it}) = sin((2d-1) t / 2) / ((2d-1) sin(t / 2)).

This turns the finitely many circle measurements into three magnitude
functions defined on the whole circle.
"""

from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from . import _numeric as nx
from .errors import InterpolationError, ValidationError
from .measurement import CIRCLE, node_angles
from .polyspace import UnitPoint

__all__ = [
    "TrigPolynomial",
    "dirichlet",
    "dirichlet_angle",
    "interpolate",
    "eval_trig",
    "magnitude_families",
]

IMAG_TOL = 1e-9


def dirichlet_angle(theta, d):
    """``D_{d-1}(e^{i theta})`` for real ``theta`` (array ok, float or mpf)."""
    n = 2 * d - 1
    if nx.is_mp(theta):
        def one(t):
            s = mpmath.sin(t / 2)
            return mpmath.sin(n * t / 2) / (n * s) if s != 0 else mpmath.mpf(1)
        if isinstance(theta, np.ndarray):
            return np.frompyfunc(one, 1, 1)(theta)
        return one(theta)
    theta = np.asarray(theta, dtype=float)
    # reduce to (-pi, pi] so that exact node hits give s == 0 only at t = 0
    t = np.remainder(theta + np.pi, 2 * np.pi) - np.pi
    s = np.sin(t / 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(s == 0, 1.0, np.sin(n * t / 2) / (n * s))
    return out[()] if out.ndim == 0 else out


def dirichlet(z, d):
    """Normalized Dirichlet kernel ``(1/(2d-1)) sum_{|k|<d} z**k`` on the circle."""
    if isinstance(z, UnitPoint):
        return dirichlet_angle(z.angle, d)
    return dirichlet_angle(np.angle(z), d)


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """Trigonometric polynomial of degree ``<= dim-1`` stored by node samples.

    ``samples[l-1]`` is the value at ``omega**l``.
    """

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.dtype != object:
            s = s.astype(complex) if np.iscomplexobj(s) else s.astype(float)
        if s.ndim != 1 or s.size % 2 != 1:
            raise ValidationError("a trigonometric polynomial needs an odd number (2d-1) of samples")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @property
    def dim(self):
        return (self.samples.size + 1) // 2

    @property
    def is_mp(self):
        return nx.is_mp(self.samples)

    def __call__(self, z):
        return eval_trig(self, z)

    def at_angles(self, theta):
        return eval_trig_angles(self, theta)


def interpolate(samples, d=None):
    """Interpolant through ``2d-1`` node samples."""
    s = np.asarray(samples)
    if d is not None and s.size != 2 * d - 1:
        raise ValidationError(f"expected {2 * d - 1} samples for d={d}, got {s.size}")
    return TrigPolynomial(s)


@lru_cache(maxsize=64)
def _grid_kernel(d, n_points, dps):
    """Rows ``D(2 pi k / n_points - angle(omega**l))``, ``k = 0..n_points-1``."""
    mp = dps is not None
    with nx.precision(dps):
        theta = nx.angles_of_turns(np.arange(n_points), n_points, mp)
        nodes = node_angles(d, mp)
        mat = dirichlet_angle(theta[:, None] - nodes[None, :], d)
    mat.flags.writeable = False
    return mat


def grid_values(g, n_points):
    """``g`` at ``exp(2 pi i k / n_points)``, ``k = 0..n_points-1``."""
    dps = mpmath.mp.dps if g.is_mp else None
    return _check_real(_grid_kernel(g.dim, n_points, dps) @ g.samples)


def eval_trig_angles(g, theta):
    """Value of ``g`` at ``exp(i theta)`` for real ``theta`` (scalar or array)."""
    mp = g.is_mp or nx.is_mp(theta)
    scalar = np.ndim(theta) == 0
    t = np.atleast_1d(np.asarray(theta, dtype=object if nx.is_mp(theta) else float))
    samples = g.samples
    if mp:
        t = nx.to_mp(t, real=True)
        if not g.is_mp:
            samples = nx.to_mp(samples, real=not np.iscomplexobj(samples))
    nodes = node_angles(g.dim, mp)
    vals = _check_real(dirichlet_angle(t[:, None] - nodes[None, :], g.dim) @ samples)
    return vals[0] if scalar else vals


def eval_trig(g, z):
    """Value of ``g`` at ``z`` (UnitPoint, complex scalar or array).

    Raises
    ------
    InterpolationError
        If the value has an imaginary part above ``1e-9`` (complex samples
        that do not describe a real trigonometric polynomial).
    """
    if isinstance(z, UnitPoint):
        return eval_trig_angles(g, z.angle)
    return eval_trig_angles(g, np.angle(z))


def _check_real(vals):
    if nx.is_mp(vals):
        if any(isinstance(v, mpmath.mpc) for v in vals):
            worst = max(abs(nx.imag(v)) for v in vals)
            if worst > IMAG_TOL:
                raise InterpolationError(f"interpolant has imaginary residue {worst}")
            return np.array([nx.real(v) for v in vals], dtype=object)
        return vals
    if np.iscomplexobj(vals):
        worst = np.max(np.abs(vals.imag), initial=0.0)
        if worst > IMAG_TOL:
            raise InterpolationError(f"interpolant has imaginary residue {worst:.3g}")
        return vals.real
    return vals


def magnitude_families(m):
    """Interpolate the three measurement bands.

    Returns ``(f0, f1, f2)`` approximating ``|p(z)|^2``,
    ``|p(z) - p(z nu)|^2`` and ``|p(z) - i p(z nu)|^2``.
    """
    if m.kind != CIRCLE:
        raise ValidationError(f"magnitude families need circle measurements, got {m.kind!r}")
    return tuple(TrigPolynomial(m.band(b)) for b in (1, 2, 3))
