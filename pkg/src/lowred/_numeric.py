"""Scalar/array helpers shared by the float64 and mpmath code paths.

Arrays are either plain numpy arrays (float64/complex128) or numpy object
arrays holding mpmath ``mpf``/``mpc`` values.  Every pipeline function keeps
the kind of its input, so a polynomial converted with :func:`to_mp` is
measured, interpolated and recovered entirely at the current ``mpmath.mp``
precision.
"""

from contextlib import contextmanager

import mpmath
import numpy as np

_mp_sin = np.frompyfunc(mpmath.sin, 1, 1)
_mp_sqrt = np.frompyfunc(mpmath.sqrt, 1, 1)
_mp_expj = np.frompyfunc(mpmath.expj, 1, 1)
_mp_re = np.frompyfunc(mpmath.re, 1, 1)
_mp_im = np.frompyfunc(mpmath.im, 1, 1)
_mp_conj = np.frompyfunc(mpmath.conj, 1, 1)
_mp_abs = np.frompyfunc(abs, 1, 1)
_mpc = np.frompyfunc(mpmath.mpc, 1, 1)
_mpf = np.frompyfunc(mpmath.mpf, 1, 1)


def is_mp(x):
    if isinstance(x, np.ndarray):
        return x.dtype == object
    return isinstance(x, (mpmath.mpf, mpmath.mpc))


def any_mp(*xs):
    return any(is_mp(x) for x in xs)


def to_mp(x, real=False):
    """Convert to an object array of mpmath numbers (exact binary values)."""
    a = np.asarray(x)
    if a.dtype == object:
        a = a.copy()
        conv = _mpf if real else _mpc
        return np.asarray(conv(a), dtype=object)
    if real:
        return np.asarray(_mpf(a.astype(float)), dtype=object)
    return np.asarray(_mpc(a.astype(complex)), dtype=object)


def to_float(x, real=False):
    a = np.asarray(x)
    if a.dtype == object:
        if real:
            return np.array([float(v) for v in a.ravel()]).reshape(a.shape)
        return np.array([complex(v) for v in a.ravel()]).reshape(a.shape)
    return a.astype(float if real else complex)


def like(x, ref, real=False):
    """Cast ``x`` to the numeric kind (float64 or mpmath) of ``ref``."""
    if is_mp(ref):
        return to_mp(x, real=real)
    return to_float(x, real=real)


def pi(mp=False):
    return mpmath.mp.pi if mp else np.pi


def sin(x):
    return _mp_sin(x) if is_mp(x) else np.sin(x)


def sqrt(x):
    if is_mp(x):
        if isinstance(x, np.ndarray):
            return _mp_sqrt(x)
        return mpmath.sqrt(x)
    return np.sqrt(x)


def cis(angle):
    """``exp(1j * angle)`` in the kind of ``angle``."""
    if is_mp(angle):
        if isinstance(angle, np.ndarray):
            return _mp_expj(angle)
        return mpmath.expj(angle)
    return np.exp(1j * np.asarray(angle, dtype=float))


def conj(x):
    if is_mp(x):
        return _mp_conj(x) if isinstance(x, np.ndarray) else mpmath.conj(x)
    return np.conj(x)


def real(x):
    if is_mp(x):
        return _mp_re(x) if isinstance(x, np.ndarray) else mpmath.re(x)
    return np.real(x)


def imag(x):
    if is_mp(x):
        return _mp_im(x) if isinstance(x, np.ndarray) else mpmath.im(x)
    return np.imag(x)


def absval(x):
    if is_mp(x):
        return _mp_abs(x) if isinstance(x, np.ndarray) else abs(x)
    return np.abs(x)


def abs2(x):
    return real(x * conj(x))


def zeros(n, mp=False, real=False):
    if mp:
        zero = mpmath.mpf(0) if real else mpmath.mpc(0)
        return np.array([zero] * n, dtype=object)
    return np.zeros(n, dtype=float if real else complex)


def angles_of_turns(k, n, mp=False):
    """Angles ``2*pi*k/n`` for integer ``k`` (array ok) in the requested kind."""
    k = np.asarray(k)
    if mp:
        two_pi = 2 * mpmath.mp.pi
        return np.array([two_pi * int(v) / n for v in k.ravel()],
                        dtype=object).reshape(k.shape)
    return 2 * np.pi * k.astype(float) / n


def fsum(x):
    if is_mp(x):
        return mpmath.fsum(x)
    return np.sum(x)


@contextmanager
def precision(dps):
    """Run a block with ``mpmath`` working at ``dps`` decimal digits.

    ``dps=None`` leaves the current precision untouched.
    """
    if dps is None:
        yield
        return
    with mpmath.workdps(dps):
        yield


def fmt(x):
    """Deterministic text form of a real (17 significant digits)."""
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, 17, min_fixed=1, max_fixed=0)
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    return repr(float(x))
