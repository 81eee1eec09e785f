"""Recovery of a polynomial from (noisy) circle measurements.

Pipeline used by :func:`recover`:

1. interpolate the three measurement bands to ``f0, f1, f2``;
2. pick ``z0`` on a grid maximising ``min_j f0(nu**j z0)``;
3. read off the basis measurements of ``p`` in the orthonormal basis
   ``{K_{z0 nu^k} / sqrt(d)}``;
4. recover the coordinates ``y`` by phase propagation or the kernel method
   and assemble ``p~ = sum_k y_k K_{z0 nu^k} / sqrt(d)``.
"""

from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import _numeric as nx
from .errors import (DegenerateNullSpaceError, InadmissibleNoiseError,
                     ValidationError)
from .interpolation import (TrigPolynomial, eval_trig_angles, grid_values,
                            magnitude_families)
from .measurement import BASIS, CIRCLE, MeasurementVector
from .polyspace import Polynomial, UnitPoint

__all__ = [
    "BasisMeasurements",
    "RecoveryResult",
    "default_grid_size",
    "select_z0",
    "extract_basis_measurements",
    "polarization_combine",
    "phase_propagate",
    "build_T",
    "kernel_recover",
    "recover",
    "METHODS",
]

PHASE_PROPAGATION = "phase-propagation"
KERNEL = "kernel"
METHODS = (PHASE_PROPAGATION, KERNEL)
_ALIASES = {"phaseprop": PHASE_PROPAGATION, "phase-propagation": PHASE_PROPAGATION,
            "phase_propagation": PHASE_PROPAGATION, "kernel": KERNEL}

# kernel_recover refuses when sigma_min / sigma_second exceeds this
NULLSPACE_GAP_TOL = 1e-3
# relative margin of the double-precision z0 screen
_SCREEN_TOL = 1e-11
# values this close (relative) to the maximum count as ties
_TIE_TOL = 1e-13


def canonical_method(method):
    try:
        return _ALIASES[method]
    except KeyError:
        raise ValidationError(f"unknown recovery method {method!r}") from None


@dataclass(frozen=True, eq=False)
class BasisMeasurements:
    """Measurements ``A_{e}(x)`` of ``p`` in the basis ``e_k = K_{z0 nu^k}/sqrt(d)``.

    ``values`` has the ``3d-2`` layout of :func:`~lowred.measurement.measure_basis`;
    the coordinates are ``x_k = p(z0 nu^k)/sqrt(d)``, ``k = 1..d``.
    """

    values: np.ndarray
    z0: UnitPoint
    dim: int

    def __post_init__(self):
        v = np.asarray(self.values)
        v = v if v.dtype == object else v.astype(float)
        if v.size != 3 * self.dim - 2:
            raise ValidationError(f"need {3 * self.dim - 2} basis values, got {v.size}")
        object.__setattr__(self, "values", v)

    def as_measurement(self):
        return MeasurementVector(self.values, BASIS, self.dim)

    def point_angles(self):
        """Angles of ``z0 nu^k`` for ``k = 1..d``."""
        mp = nx.is_mp(self.z0.angle)
        return self.z0.angle + nx.angles_of_turns(np.arange(1, self.dim + 1), self.dim, mp)


@dataclass(frozen=True, eq=False)
class RecoveryResult:
    p_tilde: Polynomial
    z0: UnitPoint
    method: str
    min_sample: object
    coords: np.ndarray
    basis: BasisMeasurements
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        out = self.p_tilde.to_dict()
        out.update({
            "method": self.method,
            "z0_angle": float(self.z0.angle),
            "min_sample": float(self.min_sample),
            "diagnostics": {k: (float(v) if not isinstance(v, str) else v)
                            for k, v in self.diagnostics.items()},
        })
        return out


def _split(m):
    """(values, d) from a BasisMeasurements or a basis MeasurementVector."""
    if isinstance(m, BasisMeasurements):
        return m.values, m.dim
    if isinstance(m, MeasurementVector) and m.kind == BASIS:
        return m.values, m.dim
    raise ValidationError("expected basis measurements")


def default_grid_size(d):
    """``4 (d-1) d^2``: twice as fine as the root-separation scale."""
    return max(1, 4 * (d - 1) * d * d)


def _orbit_mins_float(f0, n):
    d = f0.dim
    g = TrigPolynomial(np.array([float(v) for v in f0.samples])) if f0.is_mp else f0
    if n % d == 0:
        vals = grid_values(g, n)
        orbit = (np.arange(n)[:, None] + (n // d) * np.arange(1, d + 1)[None, :]) % n
        return vals[orbit].min(axis=1)
    theta = 2 * np.pi * (np.arange(n)[:, None] / n + np.arange(1, d + 1)[None, :] / d)
    return eval_trig_angles(g, theta.ravel()).reshape(n, d).min(axis=1)


def _orbit_min(f0, k, n):
    theta = (nx.angles_of_turns(k, n, True)
             + nx.angles_of_turns(np.arange(1, f0.dim + 1), f0.dim, True))
    return min(f0.at_angles(theta))


def select_z0(f0, grid_size=None):
    """Grid point maximising ``min_{1<=j<=d} f0(nu**j z)``.

    Ties, up to rounding, go to the smallest grid index.  No admissibility
    check is made; the achieved minimum is returned for the caller to judge.
    For mpmath input
    the grid is screened in double precision and the near-maximal
    candidates are re-ranked at full precision.

    Returns
    -------
    z0 : UnitPoint
    min_sample : float or mpf
        ``min_j f0(nu**j z0)``.
    grid_index : int
    """
    d = f0.dim
    n = grid_size or default_grid_size(d)
    if n < 1:
        raise ValidationError("grid_size must be positive")
    mins = _orbit_mins_float(f0, n)
    scale = (2 * d - 1) * max(abs(float(v)) for v in f0.samples)
    if not f0.is_mp:
        k = int(np.flatnonzero(mins >= mins.max() - _TIE_TOL * scale)[0])
        return UnitPoint.from_turns(k, n), mins[k], k
    cands = np.flatnonzero(mins >= mins.max() - _SCREEN_TOL * scale)
    if n % d == 0:
        # k and k + n/d index the same orbit
        cands = cands[cands < n // d]
    exact = [_orbit_min(f0, int(k), n) for k in cands]
    tie = max(exact) - mpmath.mpf(10) ** (10 - mpmath.mp.dps) * scale
    best = next(i for i, v in enumerate(exact) if v >= tie)
    k = int(cands[best])
    return UnitPoint.from_turns(k, n, mp=True), exact[best], k


def extract_basis_measurements(f0, f1, f2, z0):
    """Sample the magnitude functions on the orbit ``z0 nu^k``, ``k = 1..d``.

    The sampled values are divided by ``d`` because
    ``|<p, K_z / sqrt(d)>|^2 = |p(z)|^2 / d``.
    """
    d = f0.dim
    pts = BasisMeasurements(np.zeros(3 * d - 2), z0, d).point_angles()
    vals = np.concatenate([f0.at_angles(pts), f1.at_angles(pts[:-1]), f2.at_angles(pts[:-1])])
    return BasisMeasurements(vals / d, z0, d)


def polarization_combine(a_k, a_k1, a_diff, a_idiff):
    """``conj(x_k) x_{k+1}`` from ``|x_k|^2, |x_{k+1}|^2, |x_k-x_{k+1}|^2, |x_k-i x_{k+1}|^2``."""
    return ((1 - 1j) * a_k + (1 - 1j) * a_k1 - a_diff + 1j * a_idiff) / 2


def _floor_check(first_band):
    bad = [k + 1 for k, v in enumerate(first_band) if not v > 0]
    if bad:
        raise InadmissibleNoiseError(
            f"non-positive magnitude sample at basis index {bad[0]} "
            f"(value {float(first_band[bad[0] - 1]):.3g}); noise too large or z0 unusable")


def _products(values, d):
    a = values[:d]
    return a, polarization_combine(a[:-1], a[1:], values[d:2 * d - 1], values[2 * d - 1:])


def phase_propagate(m):
    """Coordinates ``y`` with ``y = conj(x_1)/|x_1| * x`` in the noiseless case.

    ``y_1 = sqrt(m_1)`` and ``y_{k+1} = P_k y_k / m_k`` with ``P_k`` the
    polarization estimate of ``conj(x_k) x_{k+1}``.

    Raises
    ------
    InadmissibleNoiseError
        If some ``|x_k|^2`` sample is not strictly positive.
    """
    values, d = _split(m)
    a, prods = _products(values, d)
    _floor_check(a)
    y = nx.zeros(d, mp=nx.is_mp(values))
    y[0] = nx.sqrt(a[0])
    for k in range(d - 1):
        y[k + 1] = prods[k] * y[k] / a[k]
    return y


def build_T(m):
    """Operator with diagonal ``-P_j`` and superdiagonal ``m_j`` (last row zero).

    Its null space is spanned by the phase-propagated vector.
    """
    values, d = _split(m)
    a, prods = _products(values, d)
    _floor_check(a)
    T = np.zeros((d, d), dtype=object if nx.is_mp(values) else complex)
    if T.dtype == object:
        T[:] = mpmath.mpc(0)
    for j in range(d - 1):
        T[j, j] = -prods[j]
        T[j, j + 1] = a[j]
    return T


def _svd(T):
    if T.dtype == object:
        _, S, V = mpmath.svd_c(mpmath.matrix(T.tolist()))
        d = T.shape[0]
        sv = np.array([S[i] for i in range(d)], dtype=object)
        null = np.array([mpmath.conj(V[d - 1, i]) for i in range(d)], dtype=object)
        return sv, null
    _, S, Vh = np.linalg.svd(T)
    return S, Vh[-1].conj()


def normalize_phase(y):
    """Rotate so the first nonzero entry is real and non-negative."""
    for v in y:
        if v != 0:
            return y * (abs(v) / v)
    return y


def kernel_recover(m, return_singular_values=False):
    """Null vector of :func:`build_T` scaled to ``||y||^2 = sum_k m_k``.

    Raises
    ------
    DegenerateNullSpaceError
        If the two smallest singular values are within a factor ``1e3``.
    """
    values, d = _split(m)
    T = build_T(m)
    if d == 1:
        sv, v = nx.zeros(1, nx.is_mp(values), real=True), nx.like(np.ones(1), values)
    else:
        sv, v = _svd(T)
        if not sv[-2] > 0 or sv[-1] / sv[-2] > NULLSPACE_GAP_TOL:
            raise DegenerateNullSpaceError(
                f"null space not one-dimensional: sigma_min={float(sv[-1]):.3g}, "
                f"sigma_second={float(sv[-2]):.3g}")
    target = nx.sqrt(nx.fsum(values[:d]))
    v = normalize_phase(v * (target / nx.sqrt(nx.fsum(nx.abs2(v)))))
    if return_singular_values:
        return v, sv
    return v


def assemble(coords, z0):
    """``sum_k y_k K_{z0 nu^k} / sqrt(d)`` as a Polynomial."""
    d = len(coords)
    mp = nx.is_mp(coords)
    theta = BasisMeasurements(np.zeros(3 * d - 2), z0, d).point_angles()
    powers = np.arange(d)
    E = nx.cis(-(powers[:, None] * theta[None, :]))
    scale = mpmath.sqrt(d) if mp else np.sqrt(d)
    return Polynomial((E @ coords) / scale)


def recover(m, method=PHASE_PROPAGATION, grid_size=None, noise_level=None):
    """Recover ``[p]`` from circle measurements.

    Parameters
    ----------
    m : MeasurementVector
        Circle measurements, possibly noisy.
    method : {"phase-propagation", "phaseprop", "kernel"}
    grid_size : int, optional
        Number of candidate points for ``z0``; default ``4 (d-1) d^2``.
    noise_level : float, optional
        Declared bound on ``||eps||_inf``.  When given, the recovery refuses
        if the selected floor ``min_j f0(nu^j z0)`` does not exceed
        ``(2d-1) * noise_level``.

    Raises
    ------
    InadmissibleNoiseError, DegenerateNullSpaceError
    """
    if not isinstance(m, MeasurementVector) or m.kind != CIRCLE:
        raise ValidationError("recover expects circle measurements of length 6d-3")
    method = canonical_method(method)
    d = m.dim
    f0, f1, f2 = magnitude_families(m)
    n = grid_size or default_grid_size(d)
    z0, min_sample, k = select_z0(f0, n)
    if noise_level is not None and not min_sample > (2 * d - 1) * noise_level:
        raise InadmissibleNoiseError(
            f"sample floor {float(min_sample):.3g} does not exceed "
            f"(2d-1)*noise = {float((2 * d - 1) * noise_level):.3g}")
    basis = extract_basis_measurements(f0, f1, f2, z0)
    diagnostics = {"grid_index": k, "grid_size": n}
    if method == KERNEL:
        coords, sv = kernel_recover(basis, return_singular_values=True)
        diagnostics.update(sigma_max=sv[0], sigma_min=sv[-1],
                           sigma_second=sv[-2] if d > 1 else sv[-1])
    else:
        coords = phase_propagate(basis)
    return RecoveryResult(assemble(coords, z0), z0, method, min_sample, coords, basis, diagnostics)
