"""Lower bound on the coherence and the entanglement/randomness it certifies.

Every closed form here comes with an independent brute-force oracle so the
two can be checked against each other.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DomainError
from .rgb4 import coherence_r, rgb4_strategy
from .tensor_core import binary_entropy

THETA_DOMAIN = (0.0, 0.48)
R_MAX = 0.25


# ---------------------------------------------------------------- coherence floor


def r_lower_bound(theta: float) -> float:
    """``R(theta) = sin^3(theta) (3 cos theta + cos 3theta - 6 sin theta) / 2``.

    Warns (but still evaluates) outside ``(0, theta_max)``, where the value
    is non-positive and certifies nothing.
    """
    t = float(theta)
    if not 0.0 < t < r_bound_root():
        warnings.warn(f"theta = {t} outside (0, theta_max); bound is trivial", RuntimeWarning, stacklevel=2)
    s = np.sin(t)
    return float(0.5 * s**3 * (3 * np.cos(t) + np.cos(3 * t) - 6 * s))


def _r_raw(t):
    s = np.sin(t)
    return 0.5 * s**3 * (3 * np.cos(t) + np.cos(3 * t) - 6 * s)


_ROOT_CACHE: list[float] = []


def r_bound_root() -> float:
    """Positive root ``theta_max`` of the floor, where ``2 cos^3 = 3 sin``."""
    if not _ROOT_CACHE:
        _ROOT_CACHE.append(float(brentq(lambda t: 2 * np.cos(t) ** 3 - 3 * np.sin(t), 0.3, 0.6, xtol=1e-15)))
    return _ROOT_CACHE[0]


def r_floor_maximize(resolution: float = 1e-4) -> tuple[float, float]:
    """``(theta*, R(theta*))``: grid scan of ``(0, 0.48)`` refined by golden section."""
    if not resolution >= 1e-4:
        raise DomainError(f"resolution {resolution} < 1e-4")
    lo, hi = THETA_DOMAIN
    grid = np.arange(lo + resolution, hi, resolution)
    vals = _r_raw(grid)
    i = int(np.argmax(vals))
    i = min(max(i, 1), len(grid) - 2)
    res = minimize_scalar(
        lambda t: -_r_raw(t), bracket=(grid[i - 1], grid[i], grid[i + 1]), method="golden", tol=1e-12
    )
    t_star = float(res.x)
    return t_star, float(_r_raw(t_star))


# ------------------------------------------------------------ feasibility oracle


@dataclass(frozen=True)
class FeasibilityProblem:
    """Symmetrized single-token statistics at angle ``theta`` as a function of ``r``.

    Index ``w`` is the number of ``1_1`` outcomes.  ``base[w]`` is
    ``(u_i u_j u_k + v_i v_j v_k)^2`` for any triple with that count.
    """

    theta: float
    base: np.ndarray = field(init=False)

    def __post_init__(self):
        c, s = np.cos(self.theta), np.sin(self.theta)
        object.__setattr__(
            self,
            "base",
            np.array([(c**3 + s**3) ** 2, (c * c * s - s * s * c) ** 2, (c * s * s + s * c * c) ** 2, (s**3 - c**3) ** 2]),
        )

    def q_avg(self, r: float) -> np.ndarray:
        """Average of the clockwise and anticlockwise weights per class ``w``."""
        sign = np.array([1.0, -1.0, 1.0, -1.0])
        return (self.base - sign * r) / 2

    def eliminated(self, xi1, xi2):
        """``(xi0, xi3)`` fixed by the single-party marginals."""
        u2 = np.cos(self.theta) ** 2
        return u2 - 0.5 - 2 * xi1 - xi2, 0.5 - u2 - xi1 - 2 * xi2

    def slack(self, r: float, xi1, xi2):
        """Smallest margin among all sixteen constraints ``q_w -+ xi_w >= 0``."""
        q = self.q_avg(r)
        xi0, xi3 = self.eliminated(xi1, xi2)
        return np.minimum(
            np.minimum(q[0] - np.abs(xi0), q[3] - np.abs(xi3)),
            np.minimum(q[1] - np.abs(xi1), q[2] - np.abs(xi2)),
        )

    def grid_search(self, r: float, points: int = 401, levels: int = 14, zoom_points: int = 101):
        """Deepest grid point ``(xi1, xi2)`` and its slack.

        The first grid spans ``|xi1| <= q_1, |xi2| <= q_2`` (outside it some
        constraint already fails); each later level is a finer grid around
        the previous best point.  The slack is concave, so the zoom homes in
        on its maximum.
        """
        q = self.q_avg(r)
        h1, h2 = max(q[1], 0.0), max(q[2], 0.0)
        c1 = c2 = 0.0
        n = points
        best = (-np.inf, 0.0, 0.0)
        for _ in range(levels):
            x1 = np.linspace(c1 - h1, c1 + h1, n)
            x2 = np.linspace(c2 - h2, c2 + h2, n)
            a, b = np.meshgrid(x1, x2, indexing="ij")
            sl = self.slack(r, a, b)
            i, j = np.unravel_index(np.argmax(sl), sl.shape)
            if sl[i, j] > best[0]:
                best = (float(sl[i, j]), float(a[i, j]), float(b[i, j]))
            c1, c2 = best[1], best[2]
            # keep a ten-cell margin around the incumbent
            h1 = 10 * 2 * h1 / (n - 1)
            h2 = 10 * 2 * h2 / (n - 1)
            n = zoom_points
            if max(h1, h2) < 1e-15:
                break
        return best

    def feasible(self, r: float, points: int = 401) -> bool:
        """True iff the grid search finds a point meeting every constraint exactly."""
        if np.any(self.q_avg(r) < 0):
            return False
        return self.grid_search(r, points)[0] >= 0.0


def r_feasibility_oracle(theta: float, resolution: float = 1e-6, points: int = 401) -> float:
    """Smallest ``r >= 0`` for which the symmetrized positivity system has a solution.

    The constraints are jointly linear in ``r`` and the free variables, so
    the best achievable slack is concave in ``r``.  Its maximizer is a
    feasible ``r`` whenever one exists; bisection between zero and that
    point then locates the lower end to ``resolution``.  Every accepted
    ``r`` has an exactly feasible witness, so search error can only push the
    result up.
    """
    prob = FeasibilityProblem(float(theta))
    if prob.feasible(0.0, points):
        return 0.0
    cap = min(R_MAX, prob.base[0], prob.base[2])
    peak = minimize_scalar(
        lambda r: -prob.grid_search(r, points)[0], bounds=(0.0, cap), method="bounded",
        options={"xatol": cap * 1e-9},
    )
    hi = float(peak.x)
    if not prob.feasible(hi, points):
        return float("inf")
    lo = 0.0
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if prob.feasible(mid, points):
            hi = mid
        else:
            lo = mid
    return float(hi)


# ---------------------------------------------------------- entanglement bound


def _check_r(r: float) -> float:
    r = float(r)
    if not 0.0 <= r <= R_MAX:
        raise DomainError(f"r = {r} outside [0, 1/4]")
    return r


def entanglement_bound(r: float) -> float:
    """Entanglement of formation floor, in bits: ``h((1 - sqrt(1 - 16 r^2)) / 2)``."""
    r = _check_r(r)
    return binary_entropy(0.5 * (1 - np.sqrt(max(0.0, 1 - 16 * r * r))))


def _h(q):
    q = np.clip(q, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -q * np.log2(q) - (1 - q) * np.log2(1 - q)
    return np.nan_to_num(out)


def _g(q):
    return np.sqrt(np.clip(q * (1 - q), 0.0, None))


def _two_point_min(r: float, q1: np.ndarray, q2: np.ndarray):
    """Best mixture over the outer grid ``q1 x q2`` with weight fixed on the constraint."""
    g1, g2 = _g(q1)[:, None], _g(q2)[None, :]
    h1, h2 = _h(q1)[:, None], _h(q2)[None, :]
    target = 2 * r
    valid = (g1 >= target) & (g2 <= target) & (g1 > g2)
    p = np.divide(target - g2, g1 - g2, out=np.zeros(valid.shape), where=valid)
    val = np.where(valid, p * h1 + (1 - p) * h2, np.inf)
    single = np.where(_g(q1) >= target, _h(q1), np.inf)
    i, j = np.unravel_index(np.argmin(val), val.shape)
    best = val[i, j]
    k = int(np.argmin(single))
    if single[k] < best:
        return float(single[k]), float(q1[k]), float(q1[k])
    return float(best), float(q1[i]), float(q2[j])


def entanglement_bound_oracle(r: float, grid: int = 801, zoom_rounds: int = 30) -> float:
    """Grid minimum of ``sum_k p_k h(q_k)`` subject to ``sum_k p_k sqrt(q_k(1 - q_k)) >= 2r``.

    Two-component mixtures; the outer grid on ``q in [0, 1/2]`` is refined
    by repeatedly zooming around the incumbent pair.
    """
    r = _check_r(r)
    if r == 0.0:
        return 0.0
    q = np.linspace(0.0, 0.5, grid)
    best, a, b = _two_point_min(r, q, q)
    width = 0.5
    for _ in range(zoom_rounds):
        width /= 4
        qa = np.clip(np.linspace(a - width, a + width, grid), 0.0, 0.5)
        qb = np.clip(np.linspace(b - width, b + width, grid), 0.0, 0.5)
        val, na, nb = _two_point_min(r, qa, qb)
        if val <= best:
            best, a, b = val, na, nb
    return best


def three_point_spot_check(r: float, samples: int = 20000, seed: int = 0) -> float:
    """Smallest ``objective - closed form`` over random feasible three-point mixtures.

    Non-negative (up to rounding) when two-point mixtures are optimal.
    """
    r = _check_r(r)
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(3), size=samples)
    q = rng.uniform(0.0, 0.5, size=(samples, 3))
    g = (p * _g(q)).sum(axis=1)
    obj = (p * _h(q)).sum(axis=1)
    feasible = g >= 2 * r
    if not feasible.any():
        return float("inf")
    return float(obj[feasible].min() - entanglement_bound(r))


# --------------------------------------------------------------- min-entropy


def hmin_bound(r: float) -> float:
    """``-log2((1 + sqrt(1 - 4 r)) / 2)`` bits of conditional min-entropy."""
    r = _check_r(r)
    return float(-np.log2(0.5 * (1 + np.sqrt(max(0.0, 1 - 4 * r)))))


def hmin_xy_oracle(r: float, resolution: float = 1e-5) -> float:
    """Grid minimum of ``(X + Y) / 2`` over ``X, Y in [0, 1]`` with ``X Y >= 4 r``."""
    r = _check_r(r)
    n = int(round(1 / resolution)) + 1
    x = np.linspace(0.0, 1.0, n)
    target = 4 * r
    need = np.divide(target, x, out=np.full(n, np.inf), where=x > 0)
    # smallest grid Y meeting the product constraint
    idx = np.ceil(need * (n - 1) - 1e-9)
    ok = idx <= n - 1
    y = np.where(ok, idx / (n - 1), np.inf)
    y = np.where(target == 0, 0.0, y)
    return float(np.min((x + y) / 2))


# --------------------------------------------------------------- certificate


FORMULAS = {
    "r_ideal": "sign-adjusted 2 Re<Psi^c|Pi Pi Pi|Psi^a> on the ideal strategy; equals sin^3(2 theta)/4",
    "r_floor": "(1/2) sin^3(theta) (3 cos(theta) + cos(3 theta) - 6 sin(theta))",
    "eof_bound": "h_bin((1 - sqrt(1 - 16 r^2)) / 2) at r = max(r_floor, 0)",
    "hmin_bound": "-log2((1 + sqrt(1 - 4 r)) / 2) at r = max(r_floor, 0)",
}


@dataclass(frozen=True)
class CertificateBundle:
    theta: float
    r_ideal: float
    r_floor: float
    eof_bound: float
    hmin_bound: float
    oracle_residuals: dict = field(default_factory=dict)

    def row(self) -> dict:
        return {
            "theta": self.theta,
            "r_ideal": self.r_ideal,
            "r_floor": self.r_floor,
            "eof_bound": self.eof_bound,
            "hmin_bound": self.hmin_bound,
        }

    def to_dict(self) -> dict:
        out = {"theta": self.theta}
        for key in ("r_ideal", "r_floor", "eof_bound", "hmin_bound"):
            out[key] = {"value": getattr(self, key), "formula": FORMULAS[key]}
        out["oracle_residuals"] = dict(self.oracle_residuals)
        return out


def certificate(theta: float, with_oracles: bool = True) -> CertificateBundle:
    """Bundle the coherence, its floor, and the certified entropies at ``theta``.

    ``oracle_residuals`` (when requested) holds the feasibility margin
    ``r_min - R`` (must be non-negative) and the absolute deviations of the two
    entropy-side oracles from their closed forms.
    """
    t = float(theta)
    lo, hi = THETA_DOMAIN
    if not lo < t < hi:
        raise DomainError(f"theta = {t} outside ({lo}, {hi})")
    r_ideal = coherence_r(rgb4_strategy(t))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        floor = r_lower_bound(t)
    r_used = max(floor, 0.0)
    resid = {}
    if with_oracles:
        resid = {
            "feasibility_margin": r_feasibility_oracle(t) - floor,
            "eof_oracle": abs(entanglement_bound_oracle(r_used) - entanglement_bound(r_used)),
            "hmin_xy_oracle": abs(hmin_xy_oracle(r_used) - np.sqrt(4 * r_used)),
        }
    return CertificateBundle(t, r_ideal, floor, entanglement_bound(r_used), hmin_bound(r_used), resid)
