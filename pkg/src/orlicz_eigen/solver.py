"""Constrained minimization of the gradient modular at fixed zero-order
modular, with the eigenvalue extracted as the Lagrange quotient.

The descent engine keeps every iterate exactly feasible: each trial step is
rescaled back onto the constraint through the monotone normalization map
phi(r) = modular(r u), and search directions are preconditioned with a
lagged-coefficient stiffness solve and projected onto the constraint tangent.
The same engine drives the local problem here and the fractional pair-sum
problem in :mod:`orlicz_eigen.fractional`.
"""

import math
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy import linalg as sla
from scipy import sparse
from scipy.sparse import linalg as spla

from .errors import BracketRangeError, ZeroDenominatorError
from .mesh import Mesh, ScalarField, cell_gradients, bump_field
from .roots import bisect_monotone
from .young import SATURATION

__all__ = [
    "SolveOptions", "NormalizationResult", "MinimizerResult",
    "phi_root", "energy", "descent_direction", "lagrange_quotient",
    "weak_residual", "solve_E",
]

EPS_GRAD = 1e-12  # regularization of a(g)/g at vanishing gradient


@dataclass
class SolveOptions:
    tol: float = 1e-8
    max_iter: int = 50_000
    restarts: int = 5
    seed: int = 0
    armijo: float = 1e-4
    shrink: float = 0.5


@dataclass
class NormalizationResult:
    r_alpha: float
    phi_value: float
    bisection_iterations: int


@dataclass
class MinimizerResult:
    u: ScalarField
    alpha: float
    energy: float
    lam: float
    residual: float
    iterations: int
    converged: bool
    restarts_used: int
    tail_bound: float = None

    def as_dict(self):
        out = {
            "alpha": self.alpha,
            "energy": self.energy,
            "lambda": self.lam,
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "restarts_used": self.restarts_used,
        }
        if self.tail_bound is not None:
            out["tail_bound"] = self.tail_bound
        return out


# -- local quadratures and assembly ----------------------------------------

def _regularized_coef(F, g):
    gr = np.maximum(g, EPS_GRAD)
    return F.a(gr) / gr


def energy(F, u, m):
    """Quadrature of A over the cell gradient magnitudes."""
    if m.dim == 1:
        g = np.abs(cell_gradients(u, m))
        return float(np.dot(m.cell_weights, F.A(g)))
    gx, gy = cell_gradients(u, m)
    g = np.hypot(gx, gy)
    return float(np.sum(m.cell_weights * F.A(g)))


def energy_gradient(F, u, m):
    """Nodal gradient of the discrete energy (assembled weak form)."""
    if m.dim == 1:
        s = cell_gradients(u, m)
        coef = _regularized_coef(F, np.abs(s))
        t = m.cell_weights * coef * s / m.spacing[0]
        return t[:-1] - t[1:]
    gx, gy = cell_gradients(u, m)
    g = np.hypot(gx, gy)
    coef = m.cell_weights * _regularized_coef(F, g)
    hx, hy = m.spacing
    fx = coef * gx / (2.0 * hx)
    fy = coef * gy / (2.0 * hy)
    G = np.zeros((m.counts[0] + 1, m.counts[1] + 1))
    G[1:, :-1] += fx
    G[1:, 1:] += fx
    G[:-1, :-1] -= fx
    G[:-1, 1:] -= fx
    G[:-1, 1:] += fy
    G[1:, 1:] += fy
    G[:-1, :-1] -= fy
    G[1:, :-1] -= fy
    return G.ravel()[m._interior_index]


def descent_direction(F, u, m):
    """Negative nodal gradient of the energy functional."""
    return ScalarField(-energy_gradient(F, u, m), m)


def mass_gradient(F, u, m):
    """Nodal gradient of the zero-order modular (the eigenvalue's
    right-hand side tested against nodal basis functions)."""
    values = np.asarray(getattr(u, "values", u), dtype=float)
    return m.node_weights * F.a(np.abs(values)) * np.sign(values)


def lagrange_quotient(F, u, m):
    """lambda = int a(|grad u|)|grad u| / int a(|u|)|u| by quadrature."""
    values = np.asarray(getattr(u, "values", u), dtype=float)
    num = float(np.dot(energy_gradient(F, u, m), values))
    den = float(np.dot(mass_gradient(F, u, m), values))
    if den <= 0.0 or not math.isfinite(den):
        raise ZeroDenominatorError(
            "zero-order pairing underflowed; cannot form the quotient")
    return num / den


def weak_residual(F, u, lam, m):
    """Normalized quadrature-weighted norm of the nodal weak-form defect."""
    g = energy_gradient(F, u, m)
    mg = mass_gradient(F, u, m)
    return _residual_norm(g, mg, lam, m.node_weights)


def _residual_norm(g, mg, lam, weights):
    inv_w = 1.0 / weights
    defect = g - lam * mg
    denom = math.sqrt(float(np.dot(g * g, inv_w)))
    if denom == 0.0:
        return math.inf
    return math.sqrt(float(np.dot(defect * defect, inv_w))) / denom


# -- normalization ---------------------------------------------------------

def phi_root(F, u, m, alpha, r0=1.0):
    """Radius r with modular(F, r u, m) = alpha, by bracketed bisection."""
    values = np.asarray(getattr(u, "values", u), dtype=float)
    if not np.any(values):
        raise ZeroDenominatorError("phi is identically zero for u = 0")
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    if alpha > SATURATION / 1e6:
        raise BracketRangeError(
            f"alpha = {alpha} beyond representable modular range",
            bracket=None)
    absu = np.abs(values)
    w = m.node_weights

    def phi(r):
        return float(np.dot(w, F.A(r * absu)))

    r, iters = bisect_monotone(phi, alpha, x0=r0, rtol=1e-12,
                               ftol_rel=1e-11)
    return NormalizationResult(r_alpha=r, phi_value=phi(r),
                               bisection_iterations=iters)


# -- preconditioners -------------------------------------------------------

class _Banded1D:
    """Lagged-coefficient tridiagonal stiffness solve for 1D meshes."""

    def __init__(self, m):
        self.m = m
        self.h = m.spacing[0]

    def build(self, F, values):
        u = ScalarField(values, self.m)
        s = cell_gradients(u, self.m)
        coef = _regularized_coef(F, np.abs(s))
        floor = 1e-10 * max(float(coef.max()), 1e-280)
        coef = np.maximum(coef, floor)
        c = self.m.cell_weights * coef / self.h ** 2
        n = values.size
        ab = np.zeros((2, n))
        ab[1] = c[:-1] + c[1:]
        ab[0, 1:] = -c[1:-1]
        cho = sla.cholesky_banded(ab, lower=False)

        def solve(rhs):
            return sla.cho_solve_banded((cho, False), rhs)
        return solve


class _Sparse2D:
    """Lagged-coefficient bilinear-cell stiffness solve for 2D meshes."""

    def __init__(self, m):
        self.m = m
        nx, ny = m.counts
        hx, hy = m.spacing
        n_nodes = (nx + 1) * (ny + 1)
        node = np.arange(n_nodes).reshape(nx + 1, ny + 1)
        c00 = node[:-1, :-1].ravel()
        c10 = node[1:, :-1].ravel()
        c01 = node[:-1, 1:].ravel()
        c11 = node[1:, 1:].ravel()
        ncell = c00.size
        rows = np.repeat(np.arange(ncell), 4)
        cols_x = np.stack([c10, c11, c00, c01], axis=1).ravel()
        vals_x = np.tile([1, 1, -1, -1], ncell) / (2.0 * hx)
        cols_y = np.stack([c01, c11, c00, c10], axis=1).ravel()
        vals_y = np.tile([1, 1, -1, -1], ncell) / (2.0 * hy)
        Bx = sparse.csr_matrix((vals_x, (rows, cols_x)),
                               shape=(ncell, n_nodes))
        By = sparse.csr_matrix((vals_y, (rows, cols_y)),
                               shape=(ncell, n_nodes))
        idx = m._interior_index
        self.Bx = Bx[:, idx]
        self.By = By[:, idx]

    def build(self, F, values):
        m = self.m
        u = ScalarField(values, m)
        gx, gy = cell_gradients(u, m)
        g = np.hypot(gx, gy).ravel()
        coef = m.cell_weights.ravel() * _regularized_coef(F, g)
        floor = 1e-10 * max(float(coef.max()), 1e-280)
        W = sparse.diags(np.maximum(coef, floor))
        K = (self.Bx.T @ W @ self.Bx + self.By.T @ W @ self.By).tocsc()
        K = K + sparse.eye(K.shape[0]) * (1e-12 * K.diagonal().mean())
        lu = spla.splu(K)
        return lu.solve


def _make_preconditioner(m):
    return _Banded1D(m) if m.dim == 1 else _Sparse2D(m)


# -- descent engine --------------------------------------------------------

class Problem:
    """Callable bundle consumed by the descent engine.

    Local and nonlocal problems provide the same surface: energy, its nodal
    gradient, the zero-order mass gradient, the modular (for normalization),
    and a lagged preconditioner factory.
    """

    def __init__(self, F, m, energy_fn, gradient_fn, precond_factory):
        self.F = F
        self.m = m
        self.energy = energy_fn
        self.gradient = gradient_fn
        self._precond = precond_factory

    def mass_gradient(self, values):
        return mass_gradient(self.F, ScalarField(values, self.m), self.m)

    def modular_scaled(self, values, r):
        return float(np.dot(self.m.node_weights,
                            self.F.A(r * np.abs(values))))

    def project(self, values, alpha, r0=1.0):
        def phi(r):
            return self.modular_scaled(values, r)
        r, _ = bisect_monotone(phi, alpha, x0=r0, rtol=1e-13, ftol_rel=1e-12)
        return values * r

    def preconditioner(self, values):
        return self._precond.build(self.F, values)


@dataclass
class _RunResult:
    values: np.ndarray
    energy: float
    lam: float
    residual: float
    iterations: int
    converged: bool


_POLISH_THRESHOLD = 1e-4


def _polish(problem, alpha, u, opts, budget):
    """Residual-driven tail phase: lagged inverse iteration on the
    stationarity system, immune to the energy-difference noise floor that
    limits Armijo comparisons near the minimizer."""
    def stationarity(values):
        g = problem.gradient(values)
        mg = problem.mass_gradient(values)
        den = float(np.dot(mg, values))
        lam = float(np.dot(g, values)) / den if den > 0 else math.inf
        return lam, _residual_norm(g, mg, lam, problem.m.node_weights), mg

    lam, res, mg = stationarity(u)
    it = 0
    for it in range(1, budget + 1):
        if res < opts.tol:
            return u, lam, res, it, True
        solve = problem.preconditioner(u)
        v = solve(mg)
        if not np.all(np.isfinite(v)) or not np.any(v):
            break
        w = problem.project(v, alpha) - u
        # damped update: the undamped map can diverge or contract poorly
        # for strongly nonlinear densities, so scan halved damping factors
        # and keep the one with the smallest residual
        theta = 1.0
        best = None
        while theta > 1e-3:
            trial = problem.project(u + theta * w, alpha)
            lam_t, res_t, mg_t = stationarity(trial)
            if best is None or res_t < best[1]:
                best = (lam_t, res_t, mg_t, trial)
            elif best[1] < res:
                break
            theta *= 0.5
        if best is None or best[1] >= res:
            break
        lam, res, mg, u = best
    return u, lam, res, it, res < opts.tol


def _descend(problem, alpha, start_values, opts):
    """Normalization-projected preconditioned descent from one start,
    finished by an inverse-iteration polish once the residual is small."""
    u = problem.project(start_values, alpha)
    E = problem.energy(u)
    lam = math.nan
    res = math.inf
    it = 0
    converged = False
    for it in range(1, opts.max_iter + 1):
        g = problem.gradient(u)
        mg = problem.mass_gradient(u)
        num = float(np.dot(g, u))
        den = float(np.dot(mg, u))
        lam = num / den if den > 0 else math.inf
        res = _residual_norm(g, mg, lam, problem.m.node_weights)
        if res < opts.tol:
            converged = True
            break
        if res < _POLISH_THRESHOLD:
            u, lam, res, extra, converged = _polish(
                problem, alpha, u, opts, opts.max_iter - it)
            it += extra
            E = problem.energy(u)
            break
        solve = problem.preconditioner(u)
        pg = solve(g)
        pc = solve(mg)
        denom = float(np.dot(mg, pc))
        mu = float(np.dot(mg, pg)) / denom if denom > 0 else 0.0
        d = pg - mu * pc
        gd = float(np.dot(g, d))
        if gd <= 0.0:
            d, gd = pg, float(np.dot(g, pg))
            if gd <= 0.0:
                break
        # unit trial step: with the lagged stiffness solve the projected
        # direction is Newton-like, so s = 1 recovers inverse-iteration
        # progress on the quadratic problem and backtracking handles the rest
        s = 1.0
        accepted = False
        while s > 1e-18:
            trial_raw = u - s * d
            if np.any(trial_raw):
                trial = problem.project(trial_raw, alpha)
                Et = problem.energy(trial)
                if Et <= E - opts.armijo * s * gd:
                    accepted = True
                    break
            s *= opts.shrink
        if not accepted:
            # the energy landscape is flat at this resolution; hand the
            # iterate to the residual-driven polish before giving up
            u, lam, res, extra, converged = _polish(
                problem, alpha, u, opts, opts.max_iter - it)
            it += extra
            E = problem.energy(u)
            break
        assert Et <= E * (1.0 + 1e-14) + 1e-300, "descent must be monotone"
        u, E = trial, Et
    return _RunResult(values=u, energy=E, lam=lam, residual=res,
                      iterations=it, converged=converged)


def _smooth(values, passes=10):
    v = values.copy()
    for _ in range(passes):
        padded = np.pad(v, 1)
        v = 0.5 * v + 0.25 * (padded[:-2] + padded[2:])
    return v


def default_starts(problem, opts, initial=None):
    """Multistart pool: warm start if given, else the quadratic-case first
    eigenvector, a plateau profile where the geometry admits one, and
    smoothed positive random fields."""
    m = problem.m
    starts = []
    if initial is not None:
        starts.append(np.asarray(getattr(initial, "values", initial),
                                 dtype=float))
    else:
        starts.append(np.abs(quadratic_eigenvector(problem)))
        r_plateau = m.inner_radius - 1.0 - 3.0 * max(m.spacing)
        if r_plateau > max(m.spacing):
            try:
                starts.append(bump_field(m, 0.8 * r_plateau).values)
            except Exception:
                pass
    rng = np.random.default_rng(opts.seed)
    while len(starts) < opts.restarts:
        raw = np.abs(rng.standard_normal(m.interior_count))
        if m.dim == 1:
            raw = _smooth(raw)
        starts.append(raw + 1e-3)
    return starts[:max(opts.restarts, 1)]


def quadratic_eigenvector(problem, iterations=100):
    """First eigenvector of the p=2 discretization by inverse power
    iteration with the problem's own stiffness solve."""
    m = problem.m
    from .young import YoungFunction
    F2 = YoungFunction.power(2)
    solve = problem._precond.build(F2, np.ones(m.interior_count))
    v = np.ones(m.interior_count)
    v /= math.sqrt(float(np.dot(m.node_weights, v * v)))
    lam_old = math.inf
    for _ in range(iterations):
        v = solve(m.node_weights * v)
        nrm = math.sqrt(float(np.dot(m.node_weights, v * v)))
        v /= nrm
        lam = 1.0 / nrm
        if abs(lam - lam_old) <= 1e-13 * lam:
            break
        lam_old = lam
    return v


def _pick_best(runs):
    converged = [r for r in runs if r.converged]
    pool = converged or runs
    return min(pool, key=lambda r: (r.energy, r.residual))


def solve_E(F, m, alpha, opts=None, initial=None):
    """Minimize the gradient modular at zero-order modular alpha.

    Runs opts.restarts projected-descent starts and returns the
    lowest-energy converged run (all runs, flagged unconverged, if none
    converges).  ``initial`` warm-starts the first run.
    """
    opts = opts or SolveOptions()
    problem = Problem(
        F, m,
        energy_fn=lambda v: energy(F, ScalarField(v, m), m),
        gradient_fn=lambda v: energy_gradient(F, ScalarField(v, m), m),
        precond_factory=_make_preconditioner(m))
    return minimize_with_restarts(problem, alpha, opts, initial)


def minimize_with_restarts(problem, alpha, opts, initial=None):
    starts = default_starts(problem, opts, initial)
    runs = [_descend(problem, alpha, s, opts) for s in starts]
    best = _pick_best(runs)
    u = ScalarField(best.values, problem.m)
    achieved = problem.modular_scaled(best.values, 1.0)
    return MinimizerResult(
        u=u, alpha=achieved, energy=best.energy, lam=best.lam,
        residual=best.residual, iterations=best.iterations,
        converged=best.converged, restarts_used=len(runs))
