"""Possibilistic fuzzy shell clustering: fit a circle prototype to a point set.

One prototype (c = 1) is fit per edge group by alternating minimization of

    J(u, v, r) = sum_k u_k^m D_k^2  +  W * sum_k (1 - u_k)^m,

where D_k = | ||x_k - v|| - r | is the radial shell distance.  The
membership update is the exact minimizer of J in u for a fixed prototype;
the prototype update alternates the closed-form radius with a normalized
gradient fixed-point step on the center, keeping the best candidate so the
objective never increases across full iterations.

The printed membership formula this scheme descends from saturates at 1 for
distances below W and is not the stationary point of J; it is available as
``membership_rule="literal"`` for comparison, while the default "derived"
rule u = 1 / (1 + (D^2/W)^(1/(m-1))) is the actual minimizer.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFitError, UnderdeterminedFitError

MIN_SEED_RADIUS = 0.5
CENTER_SKIP_DISTANCE = 1e-9
CENTER_MOVE_TOL = 1e-6
CENTER_INNER_STEPS = 5
# fixed restart pattern: base centroid seed plus three +-1 px jitters
SEED_JITTERS = ((0.0, 0.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0))
PERFECT_FIT_J = 1e-12


@dataclass(frozen=True)
class ShellPrototype:
    """Circle prototype: center (x, y) and radius, in pixels."""

    center: tuple
    radius: float

    def __post_init__(self):
        cx, cy = self.center
        if not (np.isfinite(cx) and np.isfinite(cy) and np.isfinite(self.radius)):
            raise ValueError("prototype must be finite")
        if not self.radius > 0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True)
class FcsConfig:
    m: float = 2.0
    w: float = 9.0
    epsilon: float = 1e-4
    max_iter: int = 100
    c: int = 1
    membership_rule: str = "derived"

    def __post_init__(self):
        if not self.m > 1:
            raise ValueError("fuzziness exponent m must be > 1")
        if not self.w > 0:
            raise ValueError("shell bandwidth w must be positive")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.c != 1:
            raise ValueError("only a single prototype (c = 1) is supported")
        if self.membership_rule not in ("derived", "literal"):
            raise ValueError("membership_rule must be 'derived' or 'literal'")


@dataclass(eq=False)
class ShellFit:
    """Converged (or max_iter) state of one shell fit.

    ``memberships`` is the per-point u_k array in [0, 1]; ``points`` keeps
    the fitted (n, 2) coordinates so validity measures can recompute shell
    distances.  ``trace`` holds (iteration, J, cx, cy, r) tuples when
    requested.
    """

    prototype: ShellPrototype
    memberships: np.ndarray
    objective: float
    iterations: int
    converged: bool
    points: np.ndarray
    trace: list = None


def _as_points(group_or_points):
    points = getattr(group_or_points, "points", group_or_points)
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] == 0:
        raise ValueError("points must be a non-empty (n, 2) array")
    return pts


def _center_distances(points, prototype):
    d = points - np.asarray(prototype.center)
    return np.sqrt((d * d).sum(axis=1))


def shell_distance(point, prototype):
    """| ||x - v|| - r |; a point at the center is at distance r."""
    return float(abs(np.hypot(point[0] - prototype.center[0],
                              point[1] - prototype.center[1])
                     - prototype.radius))


def shell_distances(points, prototype):
    """Vectorized shell_distance over an (n, 2) array."""
    return np.abs(_center_distances(_as_points(points), prototype)
                  - prototype.radius)


def objective(points, prototype, memberships, config=None):
    """J = sum u^m D^2 + w * sum (1-u)^m, the c = 1 shell objective."""
    config = config or FcsConfig()
    u = np.asarray(memberships, dtype=np.float64)
    pts = _as_points(points)
    if u.shape[0] != pts.shape[0]:
        raise ValueError("memberships length must match points")
    dsq = shell_distances(pts, prototype) ** 2
    return float((u ** config.m * dsq).sum()
                 + config.w * ((1.0 - u) ** config.m).sum())


def objective_center_gradient(points, memberships, prototype, config=None):
    """Gradient of J with respect to the center at fixed u and radius.

    d||x - v||/dv = (v - x)/||x - v||, so the gradient is
    sum_k u_k^m * 2 (d_k - r) (v - x_k) / d_k; points closer to the center
    than CENTER_SKIP_DISTANCE are skipped (the norm is not differentiable
    there).
    """
    config = config or FcsConfig()
    pts = _as_points(points)
    u = np.asarray(memberships, dtype=np.float64)
    d = _center_distances(pts, prototype)
    safe = d >= CENTER_SKIP_DISTANCE
    um = u[safe] ** config.m
    d = d[safe]
    diff = np.asarray(prototype.center) - pts[safe]
    w = um * 2.0 * (d - prototype.radius) / d
    return (w[:, None] * diff).sum(axis=0)


def update_memberships(points, prototype, config=None):
    """Memberships for a fixed prototype; the default rule minimizes J in u."""
    config = config or FcsConfig()
    dsq = shell_distances(points, prototype) ** 2
    e = 1.0 / (config.m - 1.0)
    if config.membership_rule == "derived":
        return 1.0 / (1.0 + (dsq / config.w) ** e)
    # literal printed form, clamped into [0, 1]: u = (w/D)^(2/(m-1))
    with np.errstate(divide="ignore"):
        ratio = np.where(dsq > 0.0, (config.w ** 2 / dsq) ** e, np.inf)
    return np.minimum(ratio, 1.0)


def _closed_form_radius(points, um, center):
    d = np.sqrt(((points - center) ** 2).sum(axis=1))
    return d, float((um * d).sum() / um.sum())


def update_prototype(points, memberships, prototype_prev, config=None):
    """One alternating prototype step: closed-form r, fixed-point center.

    The radius r = sum u^m d / sum u^m is the exact minimizer of J in r for
    the current center.  The center then takes up to CENTER_INNER_STEPS
    fixed-point steps v <- sum u^m (x - r (x - v)/d) / sum u^m (points with
    d < CENTER_SKIP_DISTANCE are skipped), stopping early once the center
    moves < CENTER_MOVE_TOL.  Among the visited centers, the one with the
    lowest residual (with its own optimal radius) is returned, which makes
    the outer alternation monotone in J.
    """
    config = config or FcsConfig()
    pts = _as_points(points)
    if np.unique(pts, axis=0).shape[0] < 3:
        raise UnderdeterminedFitError("need at least 3 distinct points")
    u = np.asarray(memberships, dtype=np.float64)
    um = u ** config.m
    total = um.sum()
    if not total > 0.0:
        raise DegenerateFitError("all memberships are zero")

    def residual(d, r):
        return float((um * (d - r) ** 2).sum())

    v = np.asarray(prototype_prev.center, dtype=np.float64)
    d, r = _closed_form_radius(pts, um, v)
    best = (residual(d, r), v, r)
    for _ in range(CENTER_INNER_STEPS):
        safe = d >= CENTER_SKIP_DISTANCE
        if not safe.any():
            raise DegenerateFitError("all points collapsed onto the center")
        um_safe = um[safe]
        x = pts[safe]
        d_safe = d[safe][:, None]
        target = x - r * (x - v) / d_safe
        v_new = (um_safe[:, None] * target).sum(axis=0) / um_safe.sum()
        move = float(np.hypot(*(v_new - v)))
        v = v_new
        d, r = _closed_form_radius(pts, um, v)
        res = residual(d, r)
        if res < best[0]:
            best = (res, v, r)
        if move < CENTER_MOVE_TOL:
            break
    _, v, r = best
    if not (r > 0 and np.isfinite(r) and np.all(np.isfinite(v))):
        raise DegenerateFitError("prototype update collapsed")
    return ShellPrototype((float(v[0]), float(v[1])), float(r))


def seed_from_group(group_or_points):
    """Centroid center; radius = mean centroid distance, floored at 0.5 px."""
    pts = _as_points(group_or_points)
    if pts.shape[0] < 3:
        raise ValueError("need at least 3 points to seed a circle")
    center = pts.mean(axis=0)
    d = np.sqrt(((pts - center) ** 2).sum(axis=1))
    return ShellPrototype((float(center[0]), float(center[1])),
                          max(float(d.mean()), MIN_SEED_RADIUS))


def _check_not_collinear(pts):
    centered = pts - pts.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    if sv[1] <= 1e-12 * max(sv[0], 1.0):
        raise UnderdeterminedFitError(
            "points are collinear; no circle is determined")


def _run_fcs(pts, seed, config, keep_trace):
    trace = [] if keep_trace else None
    proto = seed
    u = update_memberships(pts, proto, config)
    if keep_trace:
        j0 = objective(pts, proto, u, config)
        trace.append((0, j0, proto.center[0], proto.center[1], proto.radius))
    j = None
    converged = False
    iterations = 0
    for it in range(1, config.max_iter + 1):
        iterations = it
        proto = update_prototype(pts, u, proto, config)
        u_new = update_memberships(pts, proto, config)
        j = objective(pts, proto, u_new, config)
        if keep_trace:
            trace.append((it, j, proto.center[0], proto.center[1],
                          proto.radius))
        delta = float(np.sqrt(((u_new - u) ** 2).sum()))
        u = u_new
        if delta < config.epsilon:
            converged = True
            break
    if j is None:
        j = objective(pts, proto, u, config)
    return ShellFit(proto, u, j, iterations, converged, pts.copy(), trace)


def fit_shell(group_or_points, config=None, *, keep_trace=False):
    """Alternate membership/prototype updates from jittered centroid seeds.

    The stopping rule is ||u_new - u_old||_2 < epsilon.  Up to four seeds
    (SEED_JITTERS) are tried and the lowest-objective fit wins; later seeds
    are skipped once a fit reaches a numerically perfect objective.
    Exactly collinear or < 3 distinct points raise UnderdeterminedFitError.
    """
    config = config or FcsConfig()
    pts = _as_points(group_or_points)
    if np.unique(pts, axis=0).shape[0] < 3:
        raise UnderdeterminedFitError("need at least 3 distinct points")
    _check_not_collinear(pts)
    base = seed_from_group(pts)
    best = None
    for dx, dy in SEED_JITTERS:
        seed = ShellPrototype((base.center[0] + dx, base.center[1] + dy),
                              base.radius)
        fit = _run_fcs(pts, seed, config, keep_trace)
        if best is None or fit.objective < best.objective:
            best = fit
        if best.objective < PERFECT_FIT_J:
            break
    return best


def write_trace_csv(fit, path):
    """Dump a kept fit trace as iteration,objective,center_x,center_y,radius."""
    if fit.trace is None:
        raise ValueError("fit was run without keep_trace=True")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "objective", "center_x", "center_y",
                         "radius"])
        for row in fit.trace:
            writer.writerow(list(row))
