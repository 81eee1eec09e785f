"""Magnitude measurements of polynomials.

Two measurement maps are provided:

``measure``
    The ``6d-3`` circle measurements of ``p``: squared magnitudes of point
    values, of differences ``p(z) - p(z nu)`` and of ``p(z) - i p(z nu)``,
    each at the ``2d-1`` nodes ``omega**l``.
``measure_basis``
    The ``3d-2`` measurements of a coordinate vector ``x`` against an
    orthonormal basis: ``|x_k|^2``, ``|x_k - x_{k+1}|^2`` and
    ``|x_k - i x_{k+1}|^2``.

Indices follow the 1-based bands of the construction at the API boundary
(``frame_vector(j, d)`` takes ``1 <= j <= 6d-3``); arrays are 0-based.
Noisy values may be negative and are never clamped here.
"""

import csv
import io
import json
from dataclasses import dataclass

import mpmath
import numpy as np

from . import _numeric as nx
from .errors import ValidationError
from .polyspace import Polynomial, UnitPoint, evaluate, kernel_poly

__all__ = [
    "MeasurementVector",
    "NoiseVector",
    "CIRCLE",
    "BASIS",
    "frame_vector",
    "measure",
    "measure_basis",
    "add_noise",
    "sample_noise",
    "NOISE_MODELS",
]

CIRCLE = "circle"
BASIS = "basis"
NOISE_MODELS = ("uniform", "signed-extreme")


def circle_length(d):
    return 6 * d - 3


def basis_length(d):
    return 3 * d - 2


def _dim_from_length(n, kind):
    if kind == CIRCLE and n % 6 == 3:
        return (n + 3) // 6
    if kind == BASIS and n % 3 == 1:
        return (n + 2) // 3
    raise ValidationError(f"length {n} is not a valid {kind} measurement length")


def _kind_from_length(n):
    if n % 6 == 3:
        return CIRCLE
    if n % 3 == 1:
        return BASIS
    raise ValidationError(f"length {n} matches neither 6d-3 nor 3d-2")


@dataclass(frozen=True, eq=False)
class MeasurementVector:
    """Ordered measurement values together with their layout.

    ``values[j-1]`` holds measurement ``j``.  ``kind`` is ``"circle"``
    (length ``6d-3``) or ``"basis"`` (length ``3d-2``).
    """

    values: np.ndarray
    kind: str
    dim: int

    def __post_init__(self):
        v = np.asarray(self.values)
        v = nx.to_mp(v, real=True) if v.dtype == object else v.astype(float)
        if v.ndim != 1:
            raise ValidationError("measurement values must be 1-d")
        expected = {CIRCLE: circle_length, BASIS: basis_length}.get(self.kind)
        if expected is None:
            raise ValidationError(f"unknown measurement kind {self.kind!r}")
        if self.dim < 1 or v.size != expected(self.dim):
            raise ValidationError(
                f"{self.kind} measurements of dim {self.dim} need "
                f"{expected(self.dim)} values, got {v.size}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __len__(self):
        return int(self.values.size)

    @property
    def is_mp(self):
        return nx.is_mp(self.values)

    def band(self, b):
        """Values of band ``b`` (1-based)."""
        d = self.dim
        size = 2 * d - 1 if self.kind == CIRCLE else (d if b == 1 else d - 1)
        start = (b - 1) * size if self.kind == CIRCLE else (0 if b == 1 else d + (b - 2) * (d - 1))
        return self.values[start:start + size]

    def to_dict(self):
        return {"kind": self.kind, "dim": self.dim,
                "values": [float(v) for v in self.values]}

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(np.asarray(data["values"], dtype=float), data["kind"], int(data["dim"]))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed measurement JSON: {exc}") from None

    def to_csv(self):
        """Rows ``index,value`` with 1-based indices."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "value"])
        for j, v in enumerate(self.values, start=1):
            w.writerow([j, nx.fmt(v) if self.is_mp else repr(float(v))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, kind=None, mp=False):
        """Parse ``index,value`` rows; kind and dim follow from the length.

        With ``mp=True`` values are parsed as ``mpf`` at the current precision.
        """
        rows = list(csv.reader(io.StringIO(text)))
        if rows and rows[0] and rows[0][0].strip().lower() == "index":
            rows = rows[1:]
        rows = [r for r in rows if r]
        try:
            idx = [int(r[0]) for r in rows]
            vals = [mpmath.mpf(r[1]) if mp else float(r[1]) for r in rows]
        except (IndexError, ValueError) as exc:
            raise ValidationError(f"malformed measurement CSV: {exc}") from None
        if idx != list(range(1, len(rows) + 1)):
            raise ValidationError("measurement CSV indices must run 1..N in order")
        kind = kind or _kind_from_length(len(vals))
        arr = np.array(vals, dtype=object if mp else float)
        return cls(arr, kind, _dim_from_length(len(vals), kind))


@dataclass(frozen=True, eq=False)
class NoiseVector:
    """Signed additive perturbation of a measurement vector."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        v = nx.to_mp(v, real=True) if v.dtype == object else v.astype(float)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __len__(self):
        return int(self.values.size)

    @property
    def inf_norm(self):
        if self.values.size == 0:
            return 0.0
        return max(nx.absval(self.values))


def frame_vector(j, d):
    """Measurement polynomial ``eta_j`` with ``measure(p)[j-1] == |<p, eta_j>|**2``.

    Bands: ``K_a`` for ``1 <= j <= 2d-1``; ``K_a - K_b`` for
    ``2d <= j <= 4d-2``; ``K_a + i K_b`` for ``4d-1 <= j <= 6d-3``, with
    ``a = omega**j`` and ``b = a * nu``.  The ``+i`` follows from the second
    slot of the inner product being conjugate-linear: ``<p, K_a + i K_b>``
    equals ``p(a) - i p(b)``.
    """
    if not 1 <= j <= circle_length(d):
        raise ValidationError(f"frame index {j} outside 1..{circle_length(d)}")
    a = UnitPoint.from_turns(j, 2 * d - 1)
    b = a.rotated(1, d)
    ka = kernel_poly(a, d).coeffs
    if j <= 2 * d - 1:
        return Polynomial(ka)
    kb = kernel_poly(b, d).coeffs
    if j <= 4 * d - 2:
        return Polynomial(ka - kb)
    return Polynomial(ka + 1j * kb)


def node_angles(d, mp=False):
    """Angles of ``omega**l`` for ``l = 1..2d-1``."""
    return nx.angles_of_turns(np.arange(1, 2 * d), 2 * d - 1, mp=mp)


def measure(p):
    """Noiseless circle measurements ``A(p)`` (length ``6d-3``).

    Band ``b`` entry ``l`` (global index ``l + (b-1)(2d-1)``) is taken at the
    node ``omega**l``, since ``omega`` has order ``2d-1``.
    """
    d = p.dim
    mp = p.is_mp
    theta = node_angles(d, mp)
    shift = nx.angles_of_turns(1, d, mp)[()]
    pa = evaluate(p, nx.cis(theta))
    pb = evaluate(p, nx.cis(theta + shift))
    values = np.concatenate([nx.abs2(pa), nx.abs2(pa - pb), nx.abs2(pa - 1j * pb)])
    return MeasurementVector(values, CIRCLE, d)


def measure_basis(x):
    """Measurements of coordinates ``x`` against an orthonormal basis (length ``3d-2``).

    Entry ``k`` is ``|x_k|^2``, entry ``d+k`` is ``|x_k - x_{k+1}|^2`` and
    entry ``2d-1+k`` is ``|x_k - i x_{k+1}|^2`` (1-based ``k``).
    """
    x = np.asarray(x)
    if x.dtype != object:
        x = x.astype(complex)
    if x.ndim != 1 or x.size < 1:
        raise ValidationError("coordinate vector must be non-empty and 1-d")
    d = x.size
    a, b = x[:-1], x[1:]
    values = np.concatenate([nx.abs2(x), nx.abs2(a - b), nx.abs2(a - 1j * b)])
    return MeasurementVector(values, BASIS, d)


def add_noise(m, eps):
    """Componentwise ``m + eps``; the result keeps ``m``'s kind and dim."""
    e = eps.values if isinstance(eps, NoiseVector) else np.asarray(eps)
    if e.size != len(m):
        raise ValidationError(f"noise length {e.size} != measurement length {len(m)}")
    if nx.any_mp(m.values, e):
        return MeasurementVector(nx.to_mp(m.values, True) + nx.to_mp(e, True), m.kind, m.dim)
    return MeasurementVector(m.values + e, m.kind, m.dim)


def sample_noise(length, level, model="uniform", rng=None):
    """Draw a noise vector with ``||eps||_inf <= level``.

    Parameters
    ----------
    length : int
        Number of entries.
    level : float or mpmath.mpf
        Noise magnitude; an ``mpf`` level yields ``mpf`` entries.
    model : {"uniform", "signed-extreme"}
        ``uniform`` draws i.i.d. from ``[-level, level]``; ``signed-extreme``
        puts ``+-level`` with random signs on every entry.
    rng : numpy.random.Generator or int or None
        Randomness source, owned by the caller.  An int is used as a seed.
    """
    if model not in NOISE_MODELS:
        raise ValidationError(f"unknown noise model {model!r}; expected one of {NOISE_MODELS}")
    if level < 0:
        raise ValidationError("noise level must be non-negative")
    rng = np.random.default_rng(rng)
    if model == "uniform":
        u = rng.uniform(-1.0, 1.0, size=length)
    else:
        u = np.where(rng.random(length) < 0.5, -1.0, 1.0)
    if isinstance(level, mpmath.mpf):
        return NoiseVector(np.array([level * mpmath.mpf(v) for v in u], dtype=object))
    return NoiseVector(float(level) * u)
