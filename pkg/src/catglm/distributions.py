"""Continuous, strictly increasing cdfs used as the F component of a model.

Every function is vectorised over ``w`` / ``p`` and returns a float or an
ndarray matching the input shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, UnsupportedReflectionError

FAMILIES = (
    "logistic",
    "normal",
    "laplace",
    "cauchy",
    "student",
    "gumbel_min",
    "gumbel_max",
    "exponential",
    "pareto",
)
SYMMETRIC = frozenset({"logistic", "normal", "laplace", "cauchy", "student"})

# Single place where cdf values are clipped before they reach ratios and logs.
CDF_CLIP = 1e-12

_ALIASES = {"gumbelmin": "gumbel_min", "gumbelmax": "gumbel_max", "t": "student"}


@dataclass(frozen=True)
class CdfSpec:
    family: str
    df: int | None = None
    shape: float | None = None
    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown cdf family {self.family!r}")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if self.family == "student":
            if self.df is None or int(self.df) != self.df or self.df < 1:
                raise ValueError("student cdf needs an integer df >= 1")
        elif self.df is not None:
            raise ValueError(f"df is only meaningful for student, not {self.family}")
        if self.family == "pareto":
            if self.shape is None or self.shape < 1:
                raise ValueError("pareto cdf needs shape a >= 1")
        elif self.shape is not None:
            raise ValueError(f"shape is only meaningful for pareto, not {self.family}")

    @property
    def symmetric(self) -> bool:
        return self.family in SYMMETRIC

    @property
    def support(self) -> tuple[float, float]:
        """Open support interval of the cdf, location/scale included."""
        lower = {"exponential": 0.0, "pareto": 1.0}.get(self.family, -math.inf)
        if math.isfinite(lower):
            lower = self.loc + self.scale * lower
        return lower, math.inf

    @property
    def name(self) -> str:
        """Config string, as accepted by :func:`parse_cdf`."""
        base = {"gumbel_min": "gumbelmin", "gumbel_max": "gumbelmax"}.get(self.family, self.family)
        if self.family == "student":
            base = f"student:{self.df}"
        elif self.family == "pareto":
            base = f"pareto:{self.shape:g}"
        if self.loc != 0.0 or self.scale != 1.0:
            base += f"@{self.loc!r},{self.scale!r}"
        return base

    def __str__(self) -> str:
        return self.name


def parse_cdf(text: str | CdfSpec) -> CdfSpec:
    """Parse ``"logistic"``, ``"student:3"``, ``"pareto:2"``, ``"gumbelmin"``...

    An optional ``@loc,scale`` suffix sets location and scale.
    """
    if isinstance(text, CdfSpec):
        return text
    text = text.strip()
    loc, scale = 0.0, 1.0
    if "@" in text:
        text, ls = text.split("@", 1)
        loc_s, scale_s = ls.split(",")
        loc, scale = float(loc_s), float(scale_s)
    name, _, arg = text.partition(":")
    name = _ALIASES.get(name.lower(), name.lower())
    if name == "student":
        return CdfSpec("student", df=int(arg or 1), loc=loc, scale=scale)
    if name == "pareto":
        return CdfSpec("pareto", shape=float(arg or 1), loc=loc, scale=scale)
    if arg:
        raise ValueError(f"cdf {name!r} takes no parameter")
    return CdfSpec(name, loc=loc, scale=scale)


def _check_support(spec: CdfSpec, z: np.ndarray) -> None:
    bound = {"exponential": 0.0, "pareto": 1.0}.get(spec.family)
    if bound is None:
        return
    z = np.atleast_1d(z)
    bad = ~(z > bound)
    if bad.any():
        value = float(spec.loc + spec.scale * z[bad][0])
        raise DomainError(f"{spec.family} cdf evaluated outside its support (w={value!r})", value=value)


def _std(spec: CdfSpec, w) -> np.ndarray:
    z = (np.asarray(w, dtype=float) - spec.loc) / spec.scale
    _check_support(spec, z)
    return z


def _student_cdf(z, df):
    x = df / (df + z * z)
    tail = 0.5 * special.betainc(0.5 * df, 0.5, x)
    return np.where(z > 0, 1.0 - tail, tail)


def _student_pdf(z, df):
    logc = special.gammaln(0.5 * (df + 1)) - special.gammaln(0.5 * df) - 0.5 * math.log(df * math.pi)
    return np.exp(logc - 0.5 * (df + 1) * np.log1p(z * z / df))


def _cdf_std(family: str, z, spec: CdfSpec):
    if family == "logistic":
        return special.expit(z)
    if family == "normal":
        return special.ndtr(z)
    if family == "laplace":
        return np.where(z < 0, 0.5 * np.exp(np.minimum(z, 0)), 1.0 - 0.5 * np.exp(-np.maximum(z, 0)))
    if family == "cauchy":
        return 0.5 + np.arctan(z) / math.pi
    if family == "student":
        return _student_cdf(z, spec.df)
    if family == "gumbel_min":
        return -np.expm1(-np.exp(z))
    if family == "gumbel_max":
        return np.exp(-np.exp(-z))
    if family == "exponential":
        return -np.expm1(-z)
    if family == "pareto":
        return 1.0 - z ** (-spec.shape)
    raise AssertionError(family)


def _pdf_std(family: str, z, spec: CdfSpec):
    if family == "logistic":
        return special.expit(z) * special.expit(-z)
    if family == "normal":
        return np.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
    if family == "laplace":
        return 0.5 * np.exp(-np.abs(z))
    if family == "cauchy":
        return 1.0 / (math.pi * (1.0 + z * z))
    if family == "student":
        return _student_pdf(z, spec.df)
    if family == "gumbel_min":
        return np.exp(z - np.exp(z))
    if family == "gumbel_max":
        return np.exp(-z - np.exp(-z))
    if family == "exponential":
        return np.exp(-z)
    if family == "pareto":
        a = spec.shape
        return a * z ** (-a - 1.0)
    raise AssertionError(family)


def _quantile_std(family: str, p, spec: CdfSpec):
    if family == "logistic":
        return special.logit(p)
    if family == "normal":
        return special.ndtri(p)
    if family == "laplace":
        return np.where(p < 0.5, np.log(2 * p), -np.log(2 * (1 - p)))
    if family == "cauchy":
        return np.tan(math.pi * (p - 0.5))
    if family == "student":
        return special.stdtrit(spec.df, p)
    if family == "gumbel_min":
        return np.log(-np.log1p(-p))
    if family == "gumbel_max":
        return -np.log(-np.log(p))
    if family == "exponential":
        return -np.log1p(-p)
    if family == "pareto":
        return (1.0 - p) ** (-1.0 / spec.shape)
    raise AssertionError(family)


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def cdf_eval(spec: CdfSpec, w):
    """F(w). Raises :class:`DomainError` outside a restricted support."""
    z = _std(spec, w)
    with np.errstate(over="ignore", under="ignore"):
        return _out(_cdf_std(spec.family, z, spec))


def pdf_eval(spec: CdfSpec, w):
    """Density f(w) = F'(w)."""
    z = _std(spec, w)
    with np.errstate(over="ignore", under="ignore"):
        return _out(_pdf_std(spec.family, z, spec) / spec.scale)


def quantile(spec: CdfSpec, p):
    """F^{-1}(p) for p in (0, 1)."""
    p = np.asarray(p, dtype=float)
    bad = ~((p > 0) & (p < 1))
    if np.any(bad):
        value = float(p[bad].ravel()[0]) if p.ndim else float(p)
        raise DomainError(f"quantile needs 0 < p < 1, got {value!r}", value=value)
    return _out(spec.loc + spec.scale * _quantile_std(spec.family, p, spec))


def reflect(spec: CdfSpec) -> CdfSpec:
    """Return the cdf w -> 1 - F(-w)."""
    if spec.family in ("exponential", "pareto"):
        raise UnsupportedReflectionError(f"the reflection of the {spec.family} cdf is not representable")
    family = {"gumbel_min": "gumbel_max", "gumbel_max": "gumbel_min"}.get(spec.family, spec.family)
    loc = -spec.loc if spec.loc != 0.0 else 0.0
    return CdfSpec(family, df=spec.df, loc=loc, scale=spec.scale)


def clipped_cdf(spec: CdfSpec, w):
    """cdf values clipped to ``[CDF_CLIP, 1 - CDF_CLIP]`` for use in ratios and logs."""
    return np.clip(cdf_eval(spec, w), CDF_CLIP, 1.0 - CDF_CLIP)
