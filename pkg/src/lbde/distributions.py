"""Distribution descriptors: density evaluation, CDFs, and seeded sampling.

Only the families the estimation pipeline needs are provided.  Two
parameterization choices are deliberate and fixed:

* ``Gamma`` uses shape and *rate* (density proportional to
  ``x**(shape-1) * exp(-rate*x)``), so that ``Gamma(2, 0.5)`` length-debiases
  to ``Exponential(0.5)``.
* ``LogNormal`` uses the location ``mu`` and *precision* ``lam`` of ``log y``;
  the variance of ``log y`` is ``1/lam`` and is never stored.

Descriptors are frozen dataclasses with ``pdf``, ``cdf``, ``sample`` and
``mean`` methods.  ``parse_distribution`` reads the small textual grammar used
by the CLI (``gamma(2,0.5)``, ``0.25*gamma(2,1)+0.75*gamma(10,1)``, ...), and
``describe`` is its inverse.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import ConfigurationError, DataError

SQRT_TWO_PI = math.sqrt(2.0 * math.pi)


def _require_positive(value, name):
    if not np.isfinite(value) or value <= 0.0:
        raise ConfigurationError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class LogNormal:
    """Log-normal in precision form: ``log y ~ N(mu, 1/lam)``."""

    mu: float
    lam: float

    def __post_init__(self):
        if not np.isfinite(self.mu):
            raise ConfigurationError(f"mu must be finite, got {self.mu!r}")
        _require_positive(self.lam, "lam")

    @property
    def sigma(self) -> float:
        """Standard deviation of ``log y``."""
        return 1.0 / math.sqrt(self.lam)

    def pdf(self, y):
        return lognormal_pdf(y, self.mu, self.lam)

    def cdf(self, y):
        y = np.asarray(y, dtype=float)
        if np.any(y < 0.0):
            raise DataError("log-normal CDF requires y >= 0")
        out = np.zeros_like(y)
        pos = y > 0.0
        out[pos] = stats.norm.cdf(np.log(y[pos]), loc=self.mu, scale=self.sigma)
        return out if out.ndim else float(out)

    def sample(self, rng, size=None):
        return rng.lognormal(self.mu, self.sigma, size=size)

    def mean(self) -> float:
        return math.exp(self.mu + 0.5 / self.lam)

    def describe(self) -> str:
        return f"lognormal({self.mu!r},{self.lam!r})"


@dataclass(frozen=True)
class Gamma:
    """Gamma in shape/rate form: density proportional to ``x**(shape-1)*exp(-rate*x)``."""

    shape: float
    rate: float

    def __post_init__(self):
        _require_positive(self.shape, "shape")
        _require_positive(self.rate, "rate")

    def pdf(self, y):
        return stats.gamma.pdf(y, a=self.shape, scale=1.0 / self.rate)

    def cdf(self, y):
        return stats.gamma.cdf(y, a=self.shape, scale=1.0 / self.rate)

    def sample(self, rng, size=None):
        return rng.gamma(self.shape, 1.0 / self.rate, size=size)

    def mean(self) -> float:
        return self.shape / self.rate

    def describe(self) -> str:
        return f"gamma({self.shape!r},{self.rate!r})"


def exponential(rate: float) -> Gamma:
    """Exponential with the given rate, as the shape-1 gamma."""
    return Gamma(1.0, rate)


@dataclass(frozen=True)
class Normal:
    mean_: float
    sd: float

    def __post_init__(self):
        if not np.isfinite(self.mean_):
            raise ConfigurationError(f"mean must be finite, got {self.mean_!r}")
        _require_positive(self.sd, "sd")

    def pdf(self, y):
        return stats.norm.pdf(y, loc=self.mean_, scale=self.sd)

    def cdf(self, y):
        return stats.norm.cdf(y, loc=self.mean_, scale=self.sd)

    def sample(self, rng, size=None):
        return rng.normal(self.mean_, self.sd, size=size)

    def mean(self) -> float:
        return self.mean_

    def describe(self) -> str:
        return f"normal({self.mean_!r},{self.sd!r})"


@dataclass(frozen=True)
class Beta:
    a: float
    b: float

    def __post_init__(self):
        _require_positive(self.a, "a")
        _require_positive(self.b, "b")

    def pdf(self, y):
        return stats.beta.pdf(y, self.a, self.b)

    def cdf(self, y):
        return stats.beta.cdf(y, self.a, self.b)

    def sample(self, rng, size=None):
        return rng.beta(self.a, self.b, size=size)

    def mean(self) -> float:
        return self.a / (self.a + self.b)

    def describe(self) -> str:
        return f"beta({self.a!r},{self.b!r})"


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi) and self.lo < self.hi):
            raise ConfigurationError(f"need finite lo < hi, got ({self.lo!r}, {self.hi!r})")

    def pdf(self, y):
        return stats.uniform.pdf(y, loc=self.lo, scale=self.hi - self.lo)

    def cdf(self, y):
        return stats.uniform.cdf(y, loc=self.lo, scale=self.hi - self.lo)

    def sample(self, rng, size=None):
        return rng.uniform(self.lo, self.hi, size=size)

    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def describe(self) -> str:
        return f"uniform({self.lo!r},{self.hi!r})"


@dataclass(frozen=True)
class Mixture:
    """Finite mixture of descriptors with positive weights summing to one."""

    weights: tuple
    components: tuple

    def __post_init__(self):
        if len(self.weights) != len(self.components) or not self.components:
            raise ConfigurationError("mixture needs matching, nonempty weights and components")
        w = np.asarray(self.weights, dtype=float)
        if np.any(w <= 0.0) or not np.isfinite(w).all():
            raise ConfigurationError("mixture weights must be positive and finite")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ConfigurationError(f"mixture weights must sum to 1, got {w.sum()!r}")

    def pdf(self, y):
        return sum(w * c.pdf(y) for w, c in zip(self.weights, self.components))

    def cdf(self, y):
        return sum(w * c.cdf(y) for w, c in zip(self.weights, self.components))

    def sample(self, rng, size=None):
        if size is None:
            k = rng.choice(len(self.components), p=np.asarray(self.weights))
            return self.components[k].sample(rng)
        idx = rng.choice(len(self.components), size=size, p=np.asarray(self.weights))
        out = np.empty(size, dtype=float)
        for k, comp in enumerate(self.components):
            mask = idx == k
            m = int(mask.sum())
            if m:
                out[mask] = comp.sample(rng, size=m)
        return out

    def mean(self) -> float:
        return float(sum(w * c.mean() for w, c in zip(self.weights, self.components)))

    def describe(self) -> str:
        return "+".join(f"{w!r}*{c.describe()}" for w, c in zip(self.weights, self.components))


def lognormal_pdf(y, mu: float, lam: float):
    """Log-normal density ``(lam/2pi)**0.5 * y**-1 * exp(-(lam/2)(log y - mu)**2)``.

    Raises ``DataError`` for any ``y <= 0``.
    """
    _require_positive(lam, "lam")
    arr = np.asarray(y, dtype=float)
    if np.any(arr <= 0.0) or not np.isfinite(arr).all():
        raise DataError("log-normal density requires y > 0")
    ly = np.log(arr)
    out = math.sqrt(lam) / SQRT_TWO_PI / arr * np.exp(-0.5 * lam * (ly - mu) ** 2)
    return out if out.ndim else float(out)


def lognormal_inverse_moment(mu: float, lam: float) -> float:
    """``E[1/Y]`` for ``log Y ~ N(mu, 1/lam)``, i.e. ``exp(-mu + 1/(2 lam))``."""
    _require_positive(lam, "lam")
    return math.exp(-mu + 0.5 / lam)


def pdf_eval(dist, y):
    """Density of ``dist`` at ``y``; ``ConfigurationError`` for non-descriptors."""
    pdf = getattr(dist, "pdf", None)
    if pdf is None:
        raise ConfigurationError(f"not a distribution descriptor: {dist!r}")
    return pdf(y)


def sample(dist, rng, size=None):
    """Seeded draw(s) from ``dist``; ``ConfigurationError`` for non-descriptors."""
    fn = getattr(dist, "sample", None)
    if fn is None:
        raise ConfigurationError(f"not a distribution descriptor: {dist!r}")
    return fn(rng, size=size)


def length_debiased(dist):
    """The density proportional to ``y**-1 * dist.pdf(y)``, in closed form.

    Supported: gamma with shape > 1, log-normal, and mixtures of those.
    """
    if isinstance(dist, Gamma):
        if dist.shape <= 1.0:
            raise ConfigurationError(
                f"1/y moment of gamma(shape={dist.shape!r}) diverges; cannot debias"
            )
        return Gamma(dist.shape - 1.0, dist.rate)
    if isinstance(dist, LogNormal):
        return LogNormal(dist.mu - 1.0 / dist.lam, dist.lam)
    if isinstance(dist, Mixture):
        # new weight of component k is proportional to pi_k * E_k[1/Y]
        parts = [length_debiased(c) for c in dist.components]
        raw = []
        for w, c in zip(dist.weights, dist.components):
            if isinstance(c, Gamma):
                raw.append(w * c.rate / (c.shape - 1.0))
            else:
                raw.append(w * lognormal_inverse_moment(c.mu, c.lam))
        total = sum(raw)
        return Mixture(tuple(r / total for r in raw), tuple(parts))
    raise ConfigurationError(f"no closed-form debiasing for {dist!r}")


_TERM_RE = re.compile(r"^(?:(?P<w>[0-9.eE+-]+)\s*\*\s*)?(?P<name>[a-zA-Z_]+)\s*\((?P<args>[^()]*)\)$")

_FAMILIES = {
    "gamma": (Gamma, 2),
    "ga": (Gamma, 2),
    "lognormal": (LogNormal, 2),
    "ln": (LogNormal, 2),
    "normal": (Normal, 2),
    "norm": (Normal, 2),
    "beta": (Beta, 2),
    "uniform": (Uniform, 2),
    "unif": (Uniform, 2),
    "exponential": (exponential, 1),
    "exp": (exponential, 1),
}


def _parse_term(text):
    m = _TERM_RE.match(text.strip())
    if m is None:
        raise ConfigurationError(f"cannot parse distribution term {text!r}")
    name = m.group("name").lower()
    if name not in _FAMILIES:
        raise ConfigurationError(f"unsupported distribution family {name!r}")
    ctor, nargs = _FAMILIES[name]
    try:
        args = [float(a) for a in m.group("args").split(",") if a.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"bad numeric arguments in {text!r}") from exc
    if len(args) != nargs:
        raise ConfigurationError(f"{name} takes {nargs} arguments, got {len(args)} in {text!r}")
    weight = float(m.group("w")) if m.group("w") else None
    return weight, ctor(*args)


def parse_distribution(text: str):
    """Parse ``gamma(2,0.5)`` or weighted sums like ``0.25*gamma(2,1)+0.75*gamma(10,1)``."""
    terms = [t for t in text.split("+") if t.strip()]
    if not terms:
        raise ConfigurationError(f"empty distribution descriptor {text!r}")
    parsed = [_parse_term(t) for t in terms]
    if len(parsed) == 1:
        weight, dist = parsed[0]
        if weight is not None and abs(weight - 1.0) > 1e-9:
            raise ConfigurationError("single-component descriptor must have weight 1")
        return dist
    if any(w is None for w, _ in parsed):
        raise ConfigurationError(f"every mixture term needs an explicit weight: {text!r}")
    return Mixture(tuple(w for w, _ in parsed), tuple(d for _, d in parsed))


def describe(dist) -> str:
    """Canonical text form; inverse of ``parse_distribution``."""
    fn = getattr(dist, "describe", None)
    if fn is None:
        raise ConfigurationError(f"not a distribution descriptor: {dist!r}")
    return fn()
