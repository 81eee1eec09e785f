"""Experiment engine: random instances, noise sweeps and worst-case search.

A sweep fixes one polynomial, draws ``trials_per_level`` noise vectors per
noise level, recovers, and records the worst and mean quotient error next to
the analytic bound.  Trial ``t`` of level ``i`` uses the seed
``(seed, i, t)``, so the output does not depend on how trials are spread
over worker processes.

When the noise levels are tiny relative to ``||p||^2`` (the admissible
range is ~1e-79 at d = 7) the sweep switches to mpmath arithmetic with
enough digits to resolve the noise.
"""

import csv
import io
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import mpmath
import numpy as np

from . import _numeric as nx
from .bounds import VARIANTS, admissible_noise, error_bound
from .errors import NumericalError, ValidationError
from .measurement import NOISE_MODELS, add_noise, circle_length, measure, sample_noise
from .polyspace import Polynomial, norm, rho
from .recovery import canonical_method, default_grid_size, recover

log = logging.getLogger(__name__)

__all__ = [
    "SweepConfig",
    "SweepRow",
    "random_unit_poly",
    "worst_case_fixture",
    "maxmin_objective",
    "search_worst",
    "run_sweep",
    "sweep_csv",
    "through_origin_r2",
]

# printed to 7-8 significant digits; c_0 first
FIXTURE_D7 = (
    ("0.3114912", "-0.0519351"),
    ("-0.0367368", "-0.6727228"),
    ("-0.2214904", "-0.1978638"),
    ("-0.3210523", "-0.3897147"),
    ("-0.1358901", "0.1047726"),
    ("-0.07403360", "-0.2281884"),
    ("-0.12017811", "0.04210790"),
)

SWEEP_HEADER = ("noise_level", "worst_rho", "mean_rho", "bound", "admissible")
POLY_SOURCES = ("random", "fixture-d7", "file")
THREADS_ENV = "LOWRED_THREADS"
_TRIAL_CHUNK = 25
# below this noise-to-signal ratio doubles cannot see the noise
_MP_THRESHOLD = 1e-10


def random_unit_poly(d, seed=None):
    """Polynomial with i.i.d. standard complex Gaussian coefficients, unit norm.

    ``seed`` may be an int, a ``numpy.random.Generator`` or None.
    """
    if d < 1:
        raise ValidationError("d must be at least 1")
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return Polynomial(c / np.linalg.norm(c))


def worst_case_fixture(mp=False):
    """The published d = 7 local worst case of the max-min value.

    With ``mp=True`` the printed decimals are parsed at the current mpmath
    precision instead of being rounded to doubles.
    """
    if mp:
        return Polynomial(np.array([mpmath.mpc(re, im) for re, im in FIXTURE_D7], dtype=object))
    return Polynomial(np.array([complex(float(re), float(im)) for re, im in FIXTURE_D7]))


def _orbit_minima(p, n):
    d = p.dim
    k = np.arange(n)
    theta = 2 * np.pi * k / n
    if n % d == 0:
        vals = np.abs(np.polynomial.polynomial.polyval(np.exp(1j * theta), p.coeffs))
        orbit = (k[:, None] + (n // d) * np.arange(1, d + 1)[None, :]) % n
        return vals[orbit].min(axis=1)
    pts = np.exp(1j * (theta[:, None] + 2 * np.pi * np.arange(1, d + 1)[None, :] / d))
    return np.abs(np.polynomial.polynomial.polyval(pts, p.coeffs)).min(axis=1)


def maxmin_objective(p, grid_size=None):
    """``max_z min_j |p(nu^j z)|`` over the default z0 grid (noiseless)."""
    p = p.to_float()
    return float(_orbit_minima(p, grid_size or default_grid_size(p.dim)).max())


def search_worst(d, iters, seed=None, batch=64, grid_size=None, step=0.1):
    """Random walk towards polynomials with a small max-min value.

    Starts from the worst of ``batch`` random unit polynomials and proposes
    complex Gaussian coefficient steps, renormalized to unit norm, accepted
    only if the max-min objective decreases.  The step halves after
    ``iters // 10`` consecutive rejections.
    """
    if iters < 1:
        raise ValidationError("iters must be at least 1")
    rng = np.random.default_rng(seed)
    n = grid_size or default_grid_size(d)
    cands = [random_unit_poly(d, rng) for _ in range(max(1, batch))]
    scores = [maxmin_objective(c, n) for c in cands]
    best = int(np.argmin(scores))
    cur, f_cur = cands[best].coeffs, scores[best]
    patience = max(1, iters // 10)
    stall = 0
    for _ in range(iters):
        trial = cur + step * (rng.standard_normal(d) + 1j * rng.standard_normal(d)) / np.sqrt(2)
        trial = trial / np.linalg.norm(trial)
        f = float(_orbit_minima(Polynomial(trial), n).max())
        if f < f_cur:
            cur, f_cur, stall = trial, f, 0
        else:
            stall += 1
            if stall >= patience:
                step, stall = step / 2, 0
    log.info("search_worst d=%d: start %.4g -> final %.4g", d, scores[best], f_cur)
    return Polynomial(cur)


@dataclass
class SweepConfig:
    """Parameters of a noise sweep.

    ``noise_levels`` are absolute ``||eps||_inf`` values, or multiples of the
    admissible noise when ``relative_levels`` is set.  ``dps=None`` picks
    double precision or enough mpmath digits automatically; ``dps=0`` forces
    doubles.
    """

    d: int
    noise_levels: list
    poly_source: str = "random"
    poly_path: Optional[str] = None
    noise_model: str = "signed-extreme"
    trials_per_level: int = 1
    method: str = "phaseprop"
    seed: int = 0
    grid_size: Optional[int] = None
    alpha: float = 0.5
    variant: str = "lemma"
    relative_levels: bool = False
    dps: Optional[int] = None

    def __post_init__(self):
        if self.poly_source not in POLY_SOURCES:
            raise ValidationError(f"poly_source must be one of {POLY_SOURCES}")
        if self.poly_source == "fixture-d7" and self.d != 7:
            raise ValidationError("the fixture polynomial has d = 7")
        if self.poly_source == "file" and not self.poly_path:
            raise ValidationError("poly_source 'file' needs poly_path")
        if self.noise_model not in NOISE_MODELS:
            raise ValidationError(f"noise_model must be one of {NOISE_MODELS}")
        if self.variant not in VARIANTS:
            raise ValidationError(f"variant must be one of {VARIANTS}")
        canonical_method(self.method)
        if self.d < 1 or self.trials_per_level < 1:
            raise ValidationError("d and trials_per_level must be positive")
        levels = [float(v) for v in self.noise_levels]
        if not levels or any(v < 0 for v in levels):
            raise ValidationError("noise_levels must be a non-empty list of non-negative reals")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValidationError("noise_levels must be strictly increasing")
        self.noise_levels = levels

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(**data)
        except TypeError as exc:
            raise ValidationError(f"bad sweep config: {exc}") from None

    @classmethod
    def from_json(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid JSON: {exc}") from None

    def to_dict(self):
        return asdict(self)

    def polynomial(self):
        if self.poly_source == "fixture-d7":
            return worst_case_fixture()
        if self.poly_source == "file":
            with open(self.poly_path) as fh:
                p = Polynomial.from_json(fh.read())
            if p.dim != self.d:
                raise ValidationError(f"polynomial file has dim {p.dim}, config says d={self.d}")
            return p
        return random_unit_poly(self.d, np.random.default_rng([self.seed, 2 ** 31 - 1]))


@dataclass
class SweepRow:
    noise_level: object
    worst_rho: object
    mean_rho: object
    bound: object
    admissible: bool
    failures: int = 0
    rhos: list = field(default_factory=list, repr=False)

    def csv_fields(self):
        return [nx.fmt(self.noise_level), nx.fmt(self.worst_rho), nx.fmt(self.mean_rho),
                nx.fmt(self.bound), "true" if self.admissible else "false"]


def _auto_dps(levels, norm_p):
    positive = [v for v in levels if v > 0]
    if not positive:
        return None
    ratio = min(positive) / norm_p ** 2
    if ratio >= _MP_THRESHOLD:
        return None
    return 30 + int(math.ceil(-float(mpmath.log10(ratio))))


def _worker_count(n_tasks):
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        want = int(raw)
    except ValueError:
        raise ValidationError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if want <= 0:
        want = os.cpu_count() or 1
    return max(1, min(want, n_tasks))


def _run_trials(task):
    """Worker: recover for trials ``t0..t1-1`` of one level; returns (rhos, failures)."""
    coeffs, level, li, t0, t1, cfg, dps = task
    with nx.precision(dps):
        p = Polynomial(coeffs)
        if dps is not None:
            p = p.to_mp()
            level = mpmath.mpf(level)
        m = measure(p)
        rhos, failures = [], 0
        for t in range(t0, t1):
            rng = np.random.default_rng([cfg["seed"], li, t])
            eps = sample_noise(circle_length(p.dim), level, cfg["noise_model"], rng)
            try:
                res = recover(add_noise(m, eps), cfg["method"], cfg["grid_size"])
            except NumericalError as exc:
                log.debug("trial (%d, %d) failed: %s", li, t, exc)
                failures += 1
                continue
            rhos.append(rho(res.p_tilde, p))
    return rhos, failures


def run_sweep(cfg, workers=None):
    """Run the sweep described by ``cfg``; one :class:`SweepRow` per level.

    A failed trial (e.g. a non-positive sample under large noise) is counted
    in ``failures`` and makes ``worst_rho`` infinite for its level; it never
    aborts the sweep.  ``workers`` defaults to ``$LOWRED_THREADS`` (0 = all
    cores).
    """
    p = cfg.polynomial()
    d = p.dim
    norm_p = float(norm(p))
    adm = admissible_noise(d, cfg.alpha, norm_p, cfg.variant) if d >= 2 else mpmath.inf
    with mpmath.workdps(40):
        levels = [mpmath.mpf(v) * adm if cfg.relative_levels else mpmath.mpf(v)
                  for v in cfg.noise_levels]
    dps = cfg.dps if cfg.dps is not None else _auto_dps(levels, norm_p)
    dps = dps or None
    work_levels = [lv if dps else float(lv) for lv in levels]
    shared = {"seed": cfg.seed, "noise_model": cfg.noise_model,
              "method": cfg.method, "grid_size": cfg.grid_size}
    tasks = [(p.coeffs, lv, li, t0, min(t0 + _TRIAL_CHUNK, cfg.trials_per_level), shared, dps)
             for li, lv in enumerate(work_levels)
             for t0 in range(0, cfg.trials_per_level, _TRIAL_CHUNK)]
    n_workers = workers if workers is not None else _worker_count(len(tasks))
    if n_workers <= 1:
        results = [_run_trials(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as ex:
            results = list(ex.map(_run_trials, tasks))

    per_level = [([], 0) for _ in levels]
    for task, (rhos, fails) in zip(tasks, results):
        li = task[2]
        per_level[li][0].extend(rhos)
        per_level[li] = (per_level[li][0], per_level[li][1] + fails)

    rows = []
    for lv, (rhos, fails) in zip(levels, per_level):
        if d >= 2:
            rep = error_bound(d, cfg.alpha, lv, norm_p, cfg.variant, strict=False)
            bound, admissible = rep.error_bound, rep.admissible
        else:
            bound, admissible = mpmath.inf, True
        if rhos:
            worst = max(rhos)
            mean = (mpmath.fsum(rhos) if dps else math.fsum(rhos)) / len(rhos)
        else:
            worst = mean = math.inf
        if fails:
            worst = math.inf
        lv_out = lv if dps else float(lv)
        rows.append(SweepRow(lv_out, worst, mean, bound, admissible, fails, rhos))
    return rows


def sweep_csv(rows):
    """CSV text with header ``noise_level,worst_rho,mean_rho,bound,admissible``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for row in rows:
        w.writerow(row.csv_fields())
    return buf.getvalue()


def through_origin_r2(x, y):
    """Slope and centered R^2 of the least-squares line ``y = s x``.

    Inputs are rescaled by their maxima first so that values far outside
    the double range (mpf) can be fitted.
    """
    with mpmath.workdps(30):
        x = [mpmath.mpf(v) for v in x]
        y = [mpmath.mpf(v) for v in y]
        sx, sy = max(abs(v) for v in x), max(abs(v) for v in y)
        xs = np.array([float(v / sx) for v in x])
        ys = np.array([float(v / sy) for v in y])
    slope = float(xs @ ys / (xs @ xs))
    resid = ys - slope * xs
    sst = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 - float(resid @ resid) / sst if sst > 0 else 1.0
    return slope * float(sy / sx), r2
