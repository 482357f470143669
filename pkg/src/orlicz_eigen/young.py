"""Young functions and the scalar calculus built on them.

A Young function A is the primitive of a nondecreasing density a with
a(0) = 0 and a(t) -> infinity.  This module evaluates A, its density, the
complementary (convex conjugate) function, modular integrals and the
Luxemburg norm over discrete fields, doubling (Delta_2) diagnostics at both
endpoints, and the endpoint power functions M_0 / M_infty with their
exponents.

Exponential families saturate at ``SATURATION`` instead of overflowing, and
all endpoint ratios are formed in log space so that regime detection is not
corrupted by overflow or underflow.
"""

import enum
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .errors import BracketRangeError, ConfigError, ConformanceError
from .roots import bisect_monotone

__all__ = [
    "SATURATION", "DIVERGENCE_THRESHOLD", "VANISHING_THRESHOLD",
    "Family", "Endpoint", "Regime", "YoungFunction",
    "Delta2Report", "MatuszewskaValue", "MatuszewskaEstimate",
    "eval_A", "eval_A_checked", "complementary_eval",
    "complementary_eval_checked", "complementary_function",
    "modular", "luxemburg_norm", "delta2_report",
    "matuszewska", "matuszewska_exponent",
]

SATURATION = 1e300
LOG_SATURATION = math.log(SATURATION)

# Regime classification thresholds: power-type growth stays far below the
# divergence threshold on the default grids, exponential blowup crosses it.
DIVERGENCE_THRESHOLD = 1e6
VANISHING_THRESHOLD = 1e-6


class Family(str, enum.Enum):
    POWER = "power"
    SUM_OF_POWERS = "sum_of_powers"
    POWER_LOG = "power_log"
    EXP_MINUS_POLY = "exp_minus_poly"
    EXP_NEG_INV_POWER = "exp_neg_inv_power"
    DOUBLE_EXP = "double_exp"
    CUSTOM = "custom"


class Endpoint(str, enum.Enum):
    ZERO = "zero"
    INFINITY = "infinity"


class Regime(str, enum.Enum):
    POWER_LIKE = "power_like"
    TRIVIAL_DEGENERATE = "trivial_degenerate"
    OSCILLATING = "oscillating"


def _exp_tail(t, n):
    """e^t minus its Taylor polynomial of degree n-1, accurate for small t."""
    t = np.asarray(t, dtype=float)
    small = t < 1.0
    out = np.zeros_like(t)
    # series branch: sum_{k>=n} t^k / k!, converges fast for t < 1
    ts = np.where(small, t, 0.0)
    term = ts ** n / math.factorial(n)
    acc = term.copy()
    for k in range(n + 1, n + 40):
        term = term * ts / k
        acc += term
    out[small] = acc[small]
    tl = t[~small]
    poly = np.zeros_like(tl)
    for k in range(n):
        poly += tl ** k / math.factorial(k)
    with np.errstate(over="ignore"):
        direct = np.exp(np.minimum(tl, LOG_SATURATION)) - poly
    out[~small] = np.minimum(direct, SATURATION)
    return out


def _log_exp_tail(t, n):
    """log of _exp_tail, stable for large t where e^t dominates."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    big = t >= 30.0
    tb = t[big]
    # e^t (1 - poly * e^-t); the correction is tiny for t >= 30
    corr = np.zeros_like(tb)
    for k in range(n):
        corr += np.exp(k * np.log(np.maximum(tb, 1e-300))
                       - math.lgamma(k + 1) - tb)
    out[big] = tb + np.log1p(-np.minimum(corr, 0.999999))
    ts = t[~big]
    with np.errstate(divide="ignore"):
        out[~big] = np.log(_exp_tail(ts, n))
    return out


@dataclass
class YoungFunction:
    """A Young function with its density, evaluated in closed form per family.

    ``a`` and ``A`` accept scalars or numpy arrays; ``log_A``/``log_a`` are
    used internally whenever endpoint ratios could overflow or underflow.
    ``t_range_hint`` bounds the region where direct double-precision
    evaluation is meaningful (used for default diagnostic grids).
    """

    family: Family
    params: dict = field(default_factory=dict)
    custom_density: Optional[Callable] = None
    label: str = ""

    def __post_init__(self):
        self.family = Family(self.family)
        self._validate()
        self._cache_lock = threading.Lock()
        # anchor cache for Custom primitives: sorted t -> A(t)
        self._anchors = {0.0: 0.0}
        if not self.label:
            self.label = self._default_label()

    # -- constructors ------------------------------------------------------

    @classmethod
    def power(cls, p):
        """A(t) = t^p for p > 1."""
        return cls(Family.POWER, {"p": float(p)})

    @classmethod
    def sum_of_powers(cls, p, q):
        """A(t) = t^p/p + t^q/q, the (p,q)-Laplacian profile."""
        return cls(Family.SUM_OF_POWERS, {"p": float(p), "q": float(q)})

    @classmethod
    def power_log(cls, p, alpha, r):
        """A(t) = (t^p/p) * ln^alpha(1 + t^r)."""
        return cls(Family.POWER_LOG,
                   {"p": float(p), "alpha": float(alpha), "r": float(r)})

    @classmethod
    def exp_minus_poly(cls, n):
        """A(t) = e^t minus its Taylor polynomial of degree n-1."""
        return cls(Family.EXP_MINUS_POLY, {"n": int(n)})

    @classmethod
    def exp_neg_inv_power(cls, alpha):
        """A(t) = exp(-t^-alpha) near zero, continued quadratically beyond
        the point where the closed-form density stops being monotone."""
        return cls(Family.EXP_NEG_INV_POWER, {"alpha": float(alpha)})

    @classmethod
    def double_exp(cls):
        """A(t) = e^(e^t) - e - e t, doubly exponential at infinity."""
        return cls(Family.DOUBLE_EXP, {})

    @classmethod
    def custom(cls, density, label="custom"):
        """Build from a density callable; the primitive is integrated
        adaptively and cached."""
        return cls(Family.CUSTOM, {}, custom_density=density, label=label)

    @classmethod
    def from_config(cls, cfg):
        """Build from a ``{"family": name, "params": {...}}`` mapping."""
        if not isinstance(cfg, dict):
            raise ConfigError("young-function config must be a mapping")
        extra = set(cfg) - {"family", "params"}
        if extra:
            raise ConfigError(
                f"unknown key in young-function config: {sorted(extra)[0]!r}")
        try:
            fam = Family(cfg["family"])
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad young-function family: {exc}") from exc
        params = dict(cfg.get("params", {}))
        makers = {
            Family.POWER: lambda: cls.power(params.pop("p")),
            Family.SUM_OF_POWERS:
                lambda: cls.sum_of_powers(params.pop("p"), params.pop("q")),
            Family.POWER_LOG:
                lambda: cls.power_log(params.pop("p"), params.pop("alpha"),
                                      params.pop("r")),
            Family.EXP_MINUS_POLY: lambda: cls.exp_minus_poly(params.pop("n")),
            Family.EXP_NEG_INV_POWER:
                lambda: cls.exp_neg_inv_power(params.pop("alpha")),
            Family.DOUBLE_EXP: cls.double_exp,
        }
        if fam not in makers:
            raise ConfigError("custom families cannot be built from config")
        try:
            out = makers[fam]()
        except KeyError as exc:
            raise ConfigError(f"missing parameter {exc} for family "
                              f"{fam.value!r}") from exc
        if params:
            raise ConfigError(
                f"unknown parameter {sorted(params)[0]!r} for family "
                f"{fam.value!r}")
        return out

    def _validate(self):
        p = self.params
        if self.family is Family.POWER and p["p"] <= 1:
            raise ConfigError("power family needs p > 1")
        if self.family is Family.SUM_OF_POWERS and not 1 < p["p"] < p["q"]:
            raise ConfigError("sum_of_powers needs 1 < p < q")
        if self.family is Family.POWER_LOG and (p["p"] <= 1 or p["alpha"] < 0
                                                or p["r"] <= 0):
            raise ConfigError("power_log needs p > 1, alpha >= 0, r > 0")
        if self.family is Family.EXP_MINUS_POLY and p["n"] < 2:
            # n = 1 would give a(0) = 1, breaking the Young normalization
            raise ConfigError("exp_minus_poly needs n >= 2")
        if self.family is Family.EXP_NEG_INV_POWER and p["alpha"] <= 0:
            raise ConfigError("exp_neg_inv_power needs alpha > 0")
        if self.family is Family.CUSTOM and self.custom_density is None:
            raise ConfigError("custom family needs a density callable")

    def _default_label(self):
        p = self.params
        return {
            Family.POWER: lambda: f"t^{p.get('p')}",
            Family.SUM_OF_POWERS:
                lambda: f"t^{p.get('p')}/{p.get('p')} + t^{p.get('q')}/{p.get('q')}",
            Family.POWER_LOG:
                lambda: (f"(t^{p.get('p')}/{p.get('p')})"
                         f" ln^{p.get('alpha')}(1+t^{p.get('r')})"),
            Family.EXP_MINUS_POLY:
                lambda: f"e^t - T_{p.get('n')-1 if p.get('n') else 0}(t)",
            Family.EXP_NEG_INV_POWER:
                lambda: f"exp(-t^-{p.get('alpha')})",
            Family.DOUBLE_EXP: lambda: "e^(e^t) - e - e t",
            Family.CUSTOM: lambda: "custom",
        }[self.family]()

    # -- evaluation --------------------------------------------------------

    @property
    def t_range_hint(self):
        """(lo, hi) range where direct evaluation stays representable."""
        if self.family is Family.EXP_MINUS_POLY:
            return (1e-9, 500.0)
        if self.family is Family.EXP_NEG_INV_POWER:
            al = self.params["alpha"]
            # exp(-t^-alpha) underflows below roughly (745)^(-1/alpha)
            return (1.2 * 700.0 ** (-1.0 / al), 1e8)
        if self.family is Family.DOUBLE_EXP:
            return (1e-9, 6.0)
        if self.family is Family.CUSTOM:
            return (1e-6, 1e6)
        return (1e-9, 1e9)

    def a(self, t):
        """Density value(s) a(t)."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = self._a_impl(t)
        return float(out[0]) if scalar else out

    def A(self, t):
        """Primitive value(s) A(t), saturating at SATURATION on overflow."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = self._A_impl(t)
        return float(out[0]) if scalar else out

    def log_A(self, t):
        """log A(t), computed without forming A where it would overflow."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = self._log_A_impl(t)
        return float(out[0]) if scalar else out

    def log_a(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = self._log_a_impl(t)
        return float(out[0]) if scalar else out

    def _A_impl(self, t):
        fam, p = self.family, self.params
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            if fam is Family.POWER:
                out = t ** p["p"]
            elif fam is Family.SUM_OF_POWERS:
                out = t ** p["p"] / p["p"] + t ** p["q"] / p["q"]
            elif fam is Family.POWER_LOG:
                out = self._power_log_A(t)
            elif fam is Family.EXP_MINUS_POLY:
                out = _exp_tail(t, p["n"])
            elif fam is Family.EXP_NEG_INV_POWER:
                out = self._enip_A(t)
            elif fam is Family.DOUBLE_EXP:
                y = np.expm1(np.minimum(t, 700.0))
                out = math.e * (np.expm1(np.minimum(y, 700.0)) - t)
            else:
                out = np.array([self._custom_A_scalar(x) for x in t])
        out = np.where(np.isfinite(out), out, SATURATION)
        return np.minimum(np.maximum(out, 0.0), SATURATION)

    def _a_impl(self, t):
        fam, p = self.family, self.params
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            if fam is Family.POWER:
                out = p["p"] * t ** (p["p"] - 1.0)
            elif fam is Family.SUM_OF_POWERS:
                out = t ** (p["p"] - 1.0) + t ** (p["q"] - 1.0)
            elif fam is Family.POWER_LOG:
                out = self._power_log_a(t)
            elif fam is Family.EXP_MINUS_POLY:
                out = _exp_tail(t, p["n"] - 1)
            elif fam is Family.EXP_NEG_INV_POWER:
                out = self._enip_a(t)
            elif fam is Family.DOUBLE_EXP:
                out = math.e * np.expm1(np.minimum(t + np.expm1(t), 700.0))
            else:
                out = np.array([float(self.custom_density(x)) for x in t])
        out = np.where(np.isfinite(out), out, SATURATION)
        return np.minimum(np.maximum(out, 0.0), SATURATION)

    def _log_A_impl(self, t):
        fam, p = self.family, self.params
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            logt = np.log(t)
            if fam is Family.POWER:
                return p["p"] * logt
            if fam is Family.SUM_OF_POWERS:
                return np.logaddexp(p["p"] * logt - math.log(p["p"]),
                                    p["q"] * logt - math.log(p["q"]))
            if fam is Family.POWER_LOG:
                x = p["r"] * logt
                biglog = np.where(x > 30.0, np.log(np.maximum(x, 1e-300)),
                                  np.log(np.log1p(
                                      np.exp(np.minimum(x, 30.0)))))
                return (p["p"] * logt - math.log(p["p"])
                        + p["alpha"] * biglog)
            if fam is Family.EXP_MINUS_POLY:
                return _log_exp_tail(t, p["n"])
            if fam is Family.EXP_NEG_INV_POWER:
                al = self.params["alpha"]
                t0 = self._enip_t0()
                out = np.where(t <= t0, -np.power(np.maximum(t, 1e-300), -al),
                               0.0)
                hi = t > t0
                if np.any(hi):
                    out[hi] = np.log(self._enip_A(t[hi]))
                return out
            if fam is Family.DOUBLE_EXP:
                out = np.empty_like(t)
                big = t > 6.0
                out[big] = np.exp(np.minimum(t[big], 700.0))
                out[~big] = np.log(np.maximum(self._A_impl(t[~big]), 1e-300))
                return out
            return np.log(np.maximum(self._A_impl(t), 1e-300))

    def _log_a_impl(self, t):
        fam, p = self.family, self.params
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            logt = np.log(t)
            if fam is Family.POWER:
                return math.log(p["p"]) + (p["p"] - 1.0) * logt
            if fam is Family.SUM_OF_POWERS:
                return np.logaddexp((p["p"] - 1.0) * logt,
                                    (p["q"] - 1.0) * logt)
            if fam is Family.EXP_MINUS_POLY:
                return _log_exp_tail(t, p["n"] - 1)
            if fam is Family.EXP_NEG_INV_POWER:
                al = p["alpha"]
                t0 = self._enip_t0()
                out = np.where(
                    t <= t0,
                    math.log(al) - (al + 1.0) * logt
                    - np.power(np.maximum(t, 1e-300), -al),
                    0.0)
                hi = t > t0
                if np.any(hi):
                    out[hi] = np.log(self._enip_a(t[hi]))
                return out
            if fam is Family.DOUBLE_EXP:
                out = np.empty_like(t)
                big = t > 6.0
                out[big] = t[big] + np.exp(np.minimum(t[big], 700.0))
                out[~big] = np.log(np.maximum(self._a_impl(t[~big]), 1e-300))
                return out
            return np.log(np.maximum(self._a_impl(t), 1e-300))

    def _power_log_A(self, t):
        p, al, r = self.params["p"], self.params["alpha"], self.params["r"]
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            tr = np.where(r * np.log(np.maximum(t, 1e-300)) > 700.0, np.inf,
                          t ** r)
            big = np.where(np.isinf(tr), r * np.log(t), np.log1p(tr))
            return t ** p / p * big ** al

    def _power_log_a(self, t):
        p, al, r = self.params["p"], self.params["alpha"], self.params["r"]
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            tr = np.where(r * np.log(np.maximum(t, 1e-300)) > 700.0, np.inf,
                          t ** r)
            big = np.where(np.isinf(tr), r * np.log(t), np.log1p(tr))
            frac = np.where(np.isinf(tr), r / np.maximum(t, 1e-300),
                            r * t ** (r - 1.0) / (1.0 + tr))
            first = t ** (p - 1.0) * big ** al
            second = np.where(al > 0,
                              t ** p / p * al
                              * big ** max(al - 1.0, 0.0) * frac,
                              0.0)
            return np.where(t > 0, first + second, 0.0)

    def _enip_t0(self):
        al = self.params["alpha"]
        return (al / (al + 1.0)) ** (1.0 / al)

    def _enip_A(self, t):
        al = self.params["alpha"]
        t0 = self._enip_t0()
        a0 = al * t0 ** (-al - 1.0) * math.exp(-t0 ** (-al))
        A0 = math.exp(-t0 ** (-al))
        with np.errstate(over="ignore", divide="ignore"):
            lowv = np.exp(-np.power(np.maximum(t, 1e-300), -al))
            d = t - t0
            hiv = A0 + a0 * d + 0.5 * a0 * d * d
        return np.where(t <= t0, lowv, hiv)

    def _enip_a(self, t):
        al = self.params["alpha"]
        t0 = self._enip_t0()
        a0 = al * t0 ** (-al - 1.0) * math.exp(-t0 ** (-al))
        with np.errstate(over="ignore", divide="ignore"):
            lowv = al * np.power(np.maximum(t, 1e-300), -al - 1.0) \
                * np.exp(-np.power(np.maximum(t, 1e-300), -al))
            hiv = a0 * (1.0 + (t - t0))
        return np.where(t <= t0, lowv, hiv)

    def _custom_A_scalar(self, t):
        """Quadrature of the density from the nearest cached anchor."""
        if t <= 0.0:
            return 0.0
        with self._cache_lock:
            lower = max(x for x in self._anchors if x <= t)
            base = self._anchors[lower]
        if lower == t:
            return base
        inc, _ = integrate.quad(self.custom_density, lower, t,
                                epsabs=1e-14, epsrel=1e-10, limit=200)
        val = base + inc
        with self._cache_lock:
            if len(self._anchors) < 4096:
                self._anchors[t] = val
        return val

    # -- generalized inverse ----------------------------------------------

    def a_inv(self, s):
        """Right-continuous generalized inverse of the density.

        At a jump of ``a`` the bisection collapses onto the left endpoint of
        the jump interval.
        """
        if s <= 0.0:
            return 0.0
        x, _ = bisect_monotone(lambda x: self.a(x), s, x0=1.0, rtol=1e-13)
        return x

    def __repr__(self):
        return f"YoungFunction({self.family.value}, {self.params})"


# -- report types ----------------------------------------------------------

@dataclass
class Delta2Report:
    endpoint: Endpoint
    holds: bool
    p_index: float              # math.inf when divergent
    threshold: float            # effective T_0 or T_inf used
    doubling_sup: float         # math.inf when divergent
    C_constant: float           # math.inf when the condition fails

    def as_dict(self):
        return {
            "endpoint": self.endpoint.value,
            "holds": self.holds,
            "p_index": self.p_index,
            "threshold": self.threshold,
            "doubling_sup": self.doubling_sup,
            "C_constant": self.C_constant,
        }


@dataclass
class MatuszewskaValue:
    t: float
    value: float
    regime: Regime
    samples: np.ndarray         # running A(tau t)/A(tau) along the grid


@dataclass
class MatuszewskaEstimate:
    endpoint: Endpoint
    samples: list               # list of (t, estimated value)
    regime: Regime
    exponent: float             # nan outside the power-like regime
    tau_grid: np.ndarray

    def as_dict(self):
        return {
            "endpoint": self.endpoint.value,
            "regime": self.regime.value,
            "exponent": self.exponent,
            "samples": [(t, v) for t, v in self.samples],
        }


# -- operations ------------------------------------------------------------

def eval_A(F, t):
    """A(t); saturates (never silently produces inf) on overflow."""
    if not (t >= 0.0 and math.isfinite(t)):
        raise ValueError(f"t must be finite and nonnegative, got {t!r}")
    return F.A(t)


def eval_A_checked(F, t):
    """(A(t), overflowed) pair for callers that must see saturation."""
    v = eval_A(F, t)
    return v, v >= SATURATION


def complementary_eval(F, t):
    """Complementary (conjugate) value, integrating the generalized inverse
    of the density from 0 to t."""
    v, overflowed = complementary_eval_checked(F, t)
    if overflowed:
        raise BracketRangeError(
            f"complementary argument {t} beyond representable range of the "
            "inverse density")
    return v


def complementary_eval_checked(F, t):
    if not (t >= 0.0 and math.isfinite(t)):
        raise ValueError(f"t must be finite and nonnegative, got {t!r}")
    if t == 0.0:
        return 0.0, False
    try:
        val, _ = integrate.quad(F.a_inv, 0.0, t, epsabs=1e-14, epsrel=1e-10,
                                limit=200)
    except BracketRangeError:
        return SATURATION, True
    return val, False


def complementary_function(F, label=None):
    """The complementary function as a Young function in its own right
    (custom family with the inverse density)."""
    return YoungFunction.custom(F.a_inv,
                                label=label or f"conjugate of {F.label}")


def modular(F, u, m):
    """Quadrature approximation of the zero-order modular of |u| over m."""
    values = _conforming_values(u, m)
    return float(np.dot(m.node_weights, F.A(np.abs(values))))


def luxemburg_norm(F, u, m, rtol=1e-8):
    """Infimal k > 0 with modular(F, u/k, m) <= 1, by bracketed bisection."""
    values = _conforming_values(u, m)
    if not np.any(values):
        return 0.0

    def grow(x):
        # modular of x*u is nondecreasing in x; the norm is 1/root
        return float(np.dot(m.node_weights, F.A(np.abs(values) * x)))

    x, _ = bisect_monotone(grow, 1.0, x0=1.0, rtol=rtol)
    return 1.0 / x


def _conforming_values(u, m):
    values = getattr(u, "values", u)
    values = np.asarray(values, dtype=float)
    if values.shape != (m.interior_count,):
        raise ConformanceError(
            f"field has {values.shape} values, mesh has "
            f"{m.interior_count} interior nodes")
    return values


def _default_grid(F, endpoint, points_per_decade=8):
    if endpoint is Endpoint.ZERO:
        lo, hi = 1e-9, 1.0
    else:
        lo, hi = 1.0, 1e8
    n = max(int(round(points_per_decade * math.log10(hi / lo))) + 1, 49)
    return np.geomspace(lo, hi, n)


def delta2_report(F, endpoint, grid=None, points_per_decade=8,
                  divergence_threshold=DIVERGENCE_THRESHOLD):
    """Doubling diagnostics of A toward one endpoint.

    p_index is the sup of t a(t)/A(t) over the grid; the condition holds when
    the doubling ratio A(2t)/A(t) stays below the divergence threshold and
    shows no monotone growth across the last two decades toward the endpoint.
    """
    endpoint = Endpoint(endpoint)
    if grid is None:
        grid = _default_grid(F, endpoint, points_per_decade)
    grid = np.asarray(grid, dtype=float)
    if grid[-1] / grid[0] < 10.0 ** 6 * (1 - 1e-9):
        raise ValueError("delta2 grid must cover at least 6 decades")

    logA = F.log_A(grid)
    usable = np.isfinite(logA) & (logA > -700.0)
    eff_grid = grid[usable]
    if eff_grid.size < 8:
        raise ValueError("grid leaves too few representable points for A")
    logA = logA[usable]
    log2A = F.log_A(2.0 * eff_grid)
    log_ratio = log2A - logA
    doubling = np.exp(np.minimum(log_ratio, 700.0))
    doubling_sup = float(np.max(doubling))
    if doubling_sup > SATURATION / 10:
        doubling_sup = math.inf

    ratio = np.exp(np.minimum(np.log(eff_grid) + F.log_a(eff_grid) - logA,
                              700.0))
    p_index = float(np.max(ratio))
    if p_index > divergence_threshold:
        p_index = math.inf

    # order doubling values toward the endpoint and inspect the last 2 decades
    toward = doubling if endpoint is Endpoint.INFINITY else doubling[::-1]
    ts = eff_grid if endpoint is Endpoint.INFINITY else eff_grid[::-1]
    extreme = ts[-1]
    if endpoint is Endpoint.INFINITY:
        tail = toward[ts >= extreme / 100.0]
    else:
        tail = toward[ts <= extreme * 100.0]
    diffs = np.diff(tail)
    monotone_growth = bool(tail.size >= 3
                           and np.all(diffs > 1e-12 * tail[:-1]))

    holds = doubling_sup < divergence_threshold and not monotone_growth
    threshold = float(eff_grid[0] if endpoint is Endpoint.INFINITY
                      else eff_grid[-1])
    if endpoint is Endpoint.ZERO:
        threshold = float(eff_grid[-1])
        # effective lower cutoff after underflow skipping is eff_grid[0]
    C = max(2.0, doubling_sup) if holds else math.inf
    return Delta2Report(endpoint=endpoint, holds=holds, p_index=p_index,
                        threshold=threshold, doubling_sup=doubling_sup,
                        C_constant=C)


def _default_tau_grid(endpoint, F=None, points_per_decade=4):
    """Geometric tau grid from 1 toward the endpoint.

    Closed-form families evaluate ratios in exact log space, so the grid can
    go very deep (slowly-converging logarithmic corrections need it); custom
    and doubly-exponential families are capped where their log values stay
    representable.
    """
    decades = 100
    if F is not None:
        if F.family is Family.CUSTOM:
            decades = 8
        elif F.family is Family.DOUBLE_EXP and \
                Endpoint(endpoint) is Endpoint.INFINITY:
            # log A ~ e^tau must stay below the double range
            return np.geomspace(1.0, 250.0, 41)
        elif F.family is Family.EXP_NEG_INV_POWER and \
                Endpoint(endpoint) is Endpoint.ZERO:
            al = F.params["alpha"]
            decades = min(100, int(280.0 / al))
    n = decades * points_per_decade + 1
    if Endpoint(endpoint) is Endpoint.ZERO:
        return np.geomspace(1.0, 10.0 ** -decades, n)
    return np.geomspace(1.0, 10.0 ** decades, n)


def matuszewska(F, endpoint, t, tau_grid=None, fit_tol=1e-2):
    """Running estimate of the endpoint ratio A(tau t)/A(tau) with a regime
    tag.

    Ratios are formed in log space, so exponential blowup registers as a
    divergence (consistent with the degenerate regime) rather than overflow.
    """
    endpoint = Endpoint(endpoint)
    if t <= 0.0:
        raise ValueError("t must be positive")
    if tau_grid is None:
        tau_grid = _default_tau_grid(endpoint, F)
    tau_grid = np.asarray(tau_grid, dtype=float)
    if t == 1.0:
        return MatuszewskaValue(t, 1.0, Regime.POWER_LIKE,
                                np.ones_like(tau_grid))

    log_ratio = F.log_A(tau_grid * t) - F.log_A(tau_grid)
    vals = np.where(log_ratio > LOG_SATURATION, math.inf,
                    np.exp(np.minimum(log_ratio, LOG_SATURATION)))

    last = _last_decade(vals, tau_grid, endpoint)
    if t > 1.0 and np.max(last) > DIVERGENCE_THRESHOLD:
        return MatuszewskaValue(t, math.inf, Regime.TRIVIAL_DEGENERATE, vals)
    if t < 1.0 and np.min(last) < VANISHING_THRESHOLD:
        return MatuszewskaValue(t, 0.0, Regime.TRIVIAL_DEGENERATE, vals)
    finite = last[np.isfinite(last)]
    if finite.size == last.size and finite.size >= 3:
        mid = np.median(finite)
        spread = (np.max(finite) - np.min(finite)) / max(abs(mid), 1e-300)
        if spread <= fit_tol:
            return MatuszewskaValue(t, float(mid), Regime.POWER_LIKE, vals)
    return MatuszewskaValue(t, math.nan, Regime.OSCILLATING, vals)


def _last_decade(vals, tau_grid, endpoint):
    if Endpoint(endpoint) is Endpoint.INFINITY:
        sel = tau_grid >= tau_grid.max() / 10.0
    else:
        sel = tau_grid <= tau_grid.min() * 10.0
    return vals[sel]


def matuszewska_exponent(F, endpoint, tau_grid=None, fit_tol=1e-2):
    """Fit the endpoint power exponent from sampled ratio values.

    Returns a power-like estimate with the fitted exponent, a degenerate
    classification when the ratios blow up / vanish, or an oscillating flag
    (no exponent) when the ratios neither stabilize nor degenerate.
    """
    endpoint = Endpoint(endpoint)
    if tau_grid is None:
        tau_grid = _default_tau_grid(endpoint, F)
    ts = 2.0 ** np.array([-3.0, -2.5, -2.0, -1.5, -1.0, -0.5,
                          0.5, 1.0, 1.5, 2.0, 2.5, 3.0])
    results = [matuszewska(F, endpoint, t, tau_grid, fit_tol) for t in ts]
    regimes = {r.regime for r in results}
    samples = [(r.t, r.value) for r in results]

    if Regime.TRIVIAL_DEGENERATE in regimes:
        degenerate_ok = all(
            (r.regime is Regime.TRIVIAL_DEGENERATE
             and ((r.t > 1 and r.value == math.inf)
                  or (r.t < 1 and r.value == 0.0)))
            or r.regime is Regime.POWER_LIKE  # small-|log t| stragglers
            for r in results)
        regime = (Regime.TRIVIAL_DEGENERATE if degenerate_ok
                  else Regime.OSCILLATING)
        return MatuszewskaEstimate(endpoint, samples, regime, math.nan,
                                   np.asarray(tau_grid))
    if regimes != {Regime.POWER_LIKE}:
        return MatuszewskaEstimate(endpoint, samples, Regime.OSCILLATING,
                                   math.nan, np.asarray(tau_grid))

    logt = np.log(ts)
    logm = np.log([r.value for r in results])
    exponent = float(np.dot(logt, logm) / np.dot(logt, logt))
    fitted = ts ** exponent
    deviation = np.max(np.abs([r.value for r in results] / fitted - 1.0))
    # validity: samples track a power and respect M(t) <= t below 1
    below_one = [r for r in results if r.t < 1.0]
    valid = (deviation <= 10 * fit_tol
             and all(r.value <= r.t * (1.0 + 10 * fit_tol)
                     for r in below_one))
    if not valid or exponent < 1.0 - 10 * fit_tol:
        return MatuszewskaEstimate(endpoint, samples, Regime.OSCILLATING,
                                   math.nan, np.asarray(tau_grid))
    return MatuszewskaEstimate(endpoint, samples, Regime.POWER_LIKE,
                               max(exponent, 1.0), np.asarray(tau_grid))
