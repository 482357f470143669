"""Parameter sweeps over the normalization level alpha, with numerical
verification of the theory: two-sided bounds under the doubling condition,
the derivative identity dE/dalpha = lambda(alpha), the power-like endpoint
limits of E(alpha)/alpha, and the decay to zero in the non-doubling case.

Each sweep solves the constrained problem once per alpha, warm-starting from
the neighboring minimizer; verification is pure post-processing on the
resulting records.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, GeometryError
from .solver import SolveOptions, solve_E
from .young import Endpoint, Regime, delta2_report, matuszewska_exponent

__all__ = [
    "SweepRecord", "LimitEstimate", "geometric_grid", "run_sweep",
    "check_bounds", "estimate_limits", "check_decay",
]


@dataclass
class SweepRecord:
    alpha: float
    energy: float
    quotient: float
    lam: float
    converged: bool
    residual: float
    dE_dalpha: float = math.nan
    bounds_ok: dict = None

    def as_dict(self):
        out = {
            "alpha": self.alpha,
            "energy": self.energy,
            "quotient": self.quotient,
            "lambda": self.lam,
            "dE_dalpha": self.dE_dalpha,
            "converged": self.converged,
            "residual": self.residual,
        }
        if self.bounds_ok is not None:
            out.update({f"ok_{k}": v for k, v in self.bounds_ok.items()})
        return out


@dataclass
class LimitEstimate:
    endpoint: str
    exponent: float
    extrapolated: float
    reference: float
    relative_gap: float

    def as_dict(self):
        return {
            "endpoint": self.endpoint,
            "exponent": self.exponent,
            "extrapolated": self.extrapolated,
            "reference": self.reference,
            "relative_gap": self.relative_gap,
        }


def geometric_grid(alpha_min, alpha_max, per_decade):
    """Geometric alpha grid with per_decade points per decade, inclusive."""
    if alpha_min <= 0 or alpha_max <= alpha_min:
        raise ConfigError("need 0 < alpha_min < alpha_max")
    if per_decade < 3:
        raise ConfigError(
            "need at least 3 points per decade for central differences")
    decades = math.log10(alpha_max / alpha_min)
    n = int(round(decades * per_decade)) + 1
    return np.geomspace(alpha_min, alpha_max, n)


def run_sweep(F, m, alpha_grid, opts=None, solve=None):
    """One constrained solve per alpha, warm-started along the grid.

    The first alpha runs the full multistart; subsequent alphas restart once
    from the previous minimizer (rescaled onto the new constraint by the
    solver's own normalization projection).  dE/dalpha is the central
    difference over neighboring samples; endpoints keep NaN.
    Unconverged alphas are flagged and the sweep continues.
    """
    solve = solve or solve_E
    opts = opts or SolveOptions()
    grid = np.sort(np.asarray(alpha_grid, dtype=float))
    records = []
    warm = None
    warm_opts = SolveOptions(
        tol=opts.tol, max_iter=opts.max_iter, restarts=1, seed=opts.seed,
        armijo=opts.armijo, shrink=opts.shrink)
    for k, alpha in enumerate(grid):
        result = solve(F, m, float(alpha),
                       opts if warm is None else warm_opts, initial=warm)
        if result.converged:
            warm = result.u
        records.append(SweepRecord(
            alpha=float(alpha), energy=result.energy,
            quotient=result.energy / float(alpha), lam=result.lam,
            converged=result.converged, residual=result.residual))
    for k in range(1, len(records) - 1):
        lo, hi = records[k - 1], records[k + 1]
        records[k].dE_dalpha = (hi.energy - lo.energy) / (hi.alpha - lo.alpha)
    return records


def _energy_at_one(records):
    """E(1) from the grid: exact sample if present, else log-log
    interpolation between the bracketing alphas."""
    alphas = np.array([r.alpha for r in records])
    energies = np.array([r.energy for r in records])
    k = int(np.argmin(np.abs(np.log(alphas))))
    if abs(math.log(alphas[k])) < 1e-12:
        return float(energies[k])
    if not alphas.min() < 1.0 < alphas.max():
        raise ConfigError(
            "bounds need alpha = 1 inside the sweep grid (or on it)")
    return float(np.exp(np.interp(0.0, np.log(alphas), np.log(energies))))


def check_bounds(records, p, slack=1e-9):
    """Per-record evaluation of the three two-sided doubling-condition
    bounds; the overall verdict requires every converged record to pass.

    The bounds, with E1 = E(1) and q = E(alpha)/alpha:
      energy:    min(a^p, a^(1/p)) E1 <= E(a) <= max(a^p, a^(1/p)) E1
      eigenvalue: (1/p) q <= lambda <= p q
      quotient:  min(a^(p-1), a^(1/p-1)) E1 <= q <= max(...) E1
    """
    if p <= 1.0 or not math.isfinite(p):
        raise ConfigError(f"doubling index p must be finite and > 1, got {p}")
    E1 = _energy_at_one(records)
    for r in records:
        a = r.alpha
        lo_E = min(a ** p, a ** (1.0 / p)) * E1
        hi_E = max(a ** p, a ** (1.0 / p)) * E1
        ok_E = lo_E * (1 - slack) <= r.energy <= hi_E * (1 + slack)
        ok_lam = (r.quotient / p * (1 - slack) <= r.lam
                  <= p * r.quotient * (1 + slack))
        lo_q = min(a ** (p - 1.0), a ** (1.0 / p - 1.0)) * E1
        hi_q = max(a ** (p - 1.0), a ** (1.0 / p - 1.0)) * E1
        ok_q = lo_q * (1 - slack) <= r.quotient <= hi_q * (1 + slack)
        r.bounds_ok = {"energy": ok_E, "eigenvalue": ok_lam, "quotient": ok_q}
    converged = [r for r in records if r.converged]
    overall = all(all(r.bounds_ok.values()) for r in converged)
    return {
        "p": p,
        "energy_at_one": E1,
        "records_checked": len(converged),
        "records_skipped": len(records) - len(converged),
        "overall_pass": overall,
        "failures": [r.alpha for r in converged
                     if not all(r.bounds_ok.values())],
    }


def _extrapolate(xs, ys):
    """Richardson-style extrapolation of y(x) as x runs to its endpoint:
    Aitken's delta-squared on the last three samples, falling back to the
    last value when the sequence has effectively converged."""
    y0, y1, y2 = ys[-3], ys[-2], ys[-1]
    denom = (y2 - y1) - (y1 - y0)
    if abs(denom) < 1e-14 * max(abs(y2), 1.0):
        return y2
    acc = y2 - (y2 - y1) ** 2 / denom
    # reject wild extrapolations from non-geometric tails
    if not math.isfinite(acc) or abs(acc - y2) > abs(y2 - y0):
        return y2
    return acc


def estimate_limits(F, m, records, endpoint, opts=None, solve=None):
    """Extrapolated endpoint limit of E(alpha)/alpha against the first
    eigenvalue of the pure power problem with the endpoint's
    Matuszewska-Orlicz exponent, solved on the same mesh."""
    solve = solve or solve_E
    endpoint = Endpoint(endpoint)
    est = matuszewska_exponent(F, endpoint)
    if est.regime is not Regime.POWER_LIKE:
        raise ConfigError(
            f"endpoint {endpoint.value} is {est.regime.value}, not "
            "power-like; use check_decay for the non-doubling case")
    ordered = sorted(records, key=lambda r: r.alpha,
                     reverse=(endpoint is Endpoint.ZERO))
    tail = [r for r in ordered if r.converged][-3:]
    if len(tail) < 3:
        raise ConfigError("need at least 3 converged records to extrapolate")
    quotients = [r.quotient for r in tail]
    extrapolated = _extrapolate([r.alpha for r in tail], quotients)
    from .young import YoungFunction
    ref = solve(YoungFunction.power(est.exponent), m, 1.0,
                opts or SolveOptions())
    reference = ref.energy  # quotient at alpha = 1; constant by homogeneity
    gap = abs(extrapolated - reference) / reference
    return LimitEstimate(
        endpoint=endpoint.value, exponent=est.exponent,
        extrapolated=extrapolated, reference=reference, relative_gap=gap)


def check_decay(F, m, records, endpoint, fraction=0.2):
    """Assert the quotient E(alpha)/alpha decays toward the non-doubling
    endpoint: strictly decreasing over the grid's last decade and finally
    below ``fraction`` of its value at alpha = 1.

    Requires inner radius > 1 (the theorem's geometric hypothesis) and a
    divergent doubling ratio at the endpoint.
    """
    endpoint = Endpoint(endpoint)
    if m.inner_radius <= 1.0:
        raise GeometryError(
            f"decay requires inner radius > 1 (got {m.inner_radius}); "
            "the hypothesis of the decay theorem is unmet")
    report = delta2_report(F, endpoint)
    if report.holds:
        raise ConfigError(
            f"doubling condition holds at {endpoint.value} "
            f"(sup ratio {report.doubling_sup:.3g}); the decay theorem "
            "does not apply")
    ordered = sorted((r for r in records if r.converged),
                     key=lambda r: r.alpha,
                     reverse=(endpoint is Endpoint.ZERO))
    if len(ordered) < 3:
        raise ConfigError("need at least 3 converged records")
    extreme = ordered[-1].alpha
    last_decade = [r for r in ordered
                   if min(extreme / r.alpha, r.alpha / extreme) >= 0.1]
    quotients = [r.quotient for r in last_decade]
    decreasing = all(b < a for a, b in zip(quotients, quotients[1:]))
    q_one = _energy_at_one(records)
    final = ordered[-1].quotient
    below = final <= fraction * q_one
    return {
        "endpoint": endpoint.value,
        "strictly_decreasing_last_decade": decreasing,
        "final_quotient": final,
        "quotient_at_one": q_one,
        "fraction_required": fraction,
        "overall_pass": decreasing and below,
    }
