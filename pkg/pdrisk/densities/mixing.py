"""Mixing laws on the positive half-line.

A mixing law is the distribution of the variance scale ``V`` of a scale
mixture of normals. Every law exposes the same small toolkit:

* ``sample`` for Monte Carlo work,
* ``laplace`` for ``E[V^k e^{-uV}]``, which drives inverse moments of sums,
* ``kernel_moment`` for ``E[V^s e^{-d/V}]``, which drives density evaluation,
* ``rule`` / ``expect`` for deterministic quadrature of smooth functionals.

Finiteness of inverse and positive moments is decided from tail exponents,
so divergent quantities raise :class:`DivergentMomentError` instead of
returning garbage.
"""
from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Annotated, Callable, Literal, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator
from scipy import integrate, special

logger = logging.getLogger(__name__)

QUADRATURE_NODES = 256
# per-component node counts for tensor rules over sums of random components
SUM_NODES = {1: 256, 2: 128, 3: 40}
SUM_NODES_FALLBACK = 16
# Gauss-Jacobi nodes per stick-breaking fraction for sums of gammas
DIRICHLET_NODES = {2: 64, 3: 24}
DIRICHLET_NODES_FALLBACK = 10

ArrayFn = Callable[[np.ndarray], np.ndarray]


class DivergentMomentError(ArithmeticError):
    """Raised when a requested moment of a mixing law is infinite."""

    def __init__(self, message: str, *, law: "MixingLaw | None" = None, order: float | None = None,
                 tail_exponent: float | None = None) -> None:
        super().__init__(message)
        self.law = law
        self.order = order
        self.tail_exponent = tail_exponent


@lru_cache(maxsize=256)
def _laguerre(n: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Generalized Gauss-Laguerre rule for ``x^alpha e^{-x}``, weights summing to one."""

    nodes, weights = special.roots_genlaguerre(n, alpha)
    weights = np.asarray(weights, dtype=float)
    weights = weights / weights.sum()
    nodes = np.asarray(nodes, dtype=float)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=256)
def _beta_rule(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Jacobi rule for ``Beta(a, b)`` on ``[0, 1]``, weights summing to one."""

    x, weights = special.roots_jacobi(n, b - 1.0, a - 1.0)
    weights = np.asarray(weights, dtype=float)
    weights = weights / weights.sum()
    nodes = (1.0 + np.asarray(x, dtype=float)) / 2.0
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _dirichlet_rule(shapes: Sequence[float], n: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor rule for ``Dirichlet(shapes)`` built by stick breaking; rows are fractions."""

    remaining = np.ones(1)
    weights = np.ones(1)
    columns: list[np.ndarray] = []
    for idx in range(len(shapes) - 1):
        nodes, node_weights = _beta_rule(n, float(shapes[idx]), math.fsum(shapes[idx + 1:]))
        columns = [np.repeat(column, nodes.size) for column in columns]
        columns.append(np.multiply.outer(remaining, nodes).reshape(-1))
        remaining = np.multiply.outer(remaining, 1.0 - nodes).reshape(-1)
        weights = np.multiply.outer(weights, node_weights).reshape(-1)
    columns.append(remaining)
    return np.column_stack(columns), weights


def _gamma_kernel(a: float, lam: float, power: float, decay: np.ndarray) -> np.ndarray:
    """``E[V^power e^{-decay/V}]`` for ``V ~ Gamma(a, lam)`` on a flat array of decays."""

    nu = a + power
    out = np.empty_like(decay, dtype=float)
    zero = decay <= 0
    if np.any(zero):
        out[zero] = math.exp(power * math.log(lam) + special.gammaln(nu) - special.gammaln(a))
    pos = ~zero
    if np.any(pos):
        d = decay[pos]
        z = 2.0 * np.sqrt(d / lam)
        # int v^{nu-1} e^{-v/lam - d/v} dv = 2 (d lam)^{nu/2} K_nu(2 sqrt(d/lam))
        log_val = (
            math.log(2.0)
            + 0.5 * nu * np.log(d * lam)
            + np.log(special.kve(nu, z))
            - z
            - special.gammaln(a)
            - a * math.log(lam)
        )
        out[pos] = np.exp(log_val)
    return out


def _gamma_sum_kernel(terms: Sequence["GammaLaw"], power: float, decay: np.ndarray) -> np.ndarray:
    """``E[V^power e^{-decay/V}]`` for ``V`` a sum of independent gammas.

    Writing each component as ``V W_i`` with ``W ~ Dirichlet(shapes)`` leaves
    ``V`` gamma-distributed given ``W``, so the kernel is exact in ``V`` and
    only the smooth dependence on the fractions is integrated numerically.
    """

    shapes = np.array([term.shape for term in terms])
    scales = np.array([term.scale for term in terms])
    total = float(shapes.sum())
    fractions, weights = _dirichlet_rule(tuple(shapes), DIRICHLET_NODES.get(len(terms), DIRICHLET_NODES_FALLBACK))
    rates = fractions @ (1.0 / scales)
    # density of the fractions relative to Dirichlet(shapes)
    log_ratio = -(np.log(np.multiply.outer(rates, scales)) @ shapes)
    out = np.zeros_like(decay, dtype=float)
    for rate, weight, ratio in zip(rates, weights, np.exp(log_ratio)):
        out += weight * ratio * _gamma_kernel(total, 1.0 / rate, power, decay)
    return out


class _LawBase(BaseModel):
    model_config = ConfigDict(frozen=True)

    # -- descriptive -------------------------------------------------------
    @property
    def support_lower(self) -> float:
        raise NotImplementedError

    @property
    def lower_tail_exponent(self) -> float:
        """Supremum of ``s`` with ``E[V^{-s}] < inf``."""

        raise NotImplementedError

    @property
    def upper_tail_exponent(self) -> float:
        """Supremum of ``s`` with ``E[V^{s}] < inf``."""

        raise NotImplementedError

    @property
    def is_degenerate(self) -> bool:
        return False

    def mean(self) -> float:
        raise NotImplementedError

    def scaled(self, factor: float) -> "MixingLaw":
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def to_spec(self) -> dict:
        return self.model_dump(mode="json")

    # -- transforms --------------------------------------------------------
    def laplace(self, u: np.ndarray | float, k: int = 0) -> np.ndarray:
        """Return ``E[V^k e^{-uV}]`` for ``u >= 0``."""

        raise NotImplementedError

    def kernel_moment(self, power: float, decay: np.ndarray | float) -> np.ndarray:
        """Return ``E[V^power e^{-decay/V}]`` for ``decay >= 0``."""

        nodes, weights = self.rule()
        decay_arr = np.asarray(decay, dtype=float).reshape(-1)
        if power < 0 and np.any(decay_arr == 0):
            self.check_inverse_moment(-power)
        scaled_weights = weights * nodes**power
        inverse_nodes = 1.0 / nodes
        out = np.empty_like(decay_arr)
        block = max(1, 2**22 // max(nodes.shape[0], 1))
        for start in range(0, decay_arr.shape[0], block):
            stop = start + block
            out[start:stop] = np.exp(-np.multiply.outer(decay_arr[start:stop], inverse_nodes)) @ scaled_weights
        return out.reshape(np.shape(decay))

    def rule(self, n: int = QUADRATURE_NODES) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and probability weights approximating the law."""

        raise NotImplementedError

    def expect(self, fn: ArrayFn, power: float = 0.0, n: int = QUADRATURE_NODES) -> float:
        """Return ``E[V^power fn(V)]`` by the law's quadrature rule."""

        if power < 0:
            self.check_inverse_moment(-power)
        elif power > 0:
            self.check_positive_moment(power)
        nodes, weights = self.rule(n)
        values = np.asarray(fn(nodes), dtype=float) * nodes**power
        return float(values @ weights)

    # -- moments -------------------------------------------------------------
    def check_inverse_moment(self, order: float) -> None:
        exponent = self.lower_tail_exponent
        if not exponent > order:
            raise DivergentMomentError(
                f"E[V^-{order:g}] diverges for {self.describe()} (lower tail exponent {exponent:g})",
                law=self,  # type: ignore[arg-type]
                order=-order,
                tail_exponent=exponent,
            )

    def check_positive_moment(self, order: float) -> None:
        exponent = self.upper_tail_exponent
        if not exponent > order:
            raise DivergentMomentError(
                f"E[V^{order:g}] diverges for {self.describe()} (upper tail exponent {exponent:g})",
                law=self,  # type: ignore[arg-type]
                order=order,
                tail_exponent=exponent,
            )

    def negative_moment(self, order: float) -> float:
        """Return ``E[V^{-order}]`` for ``order > 0``."""

        raise NotImplementedError

    def describe(self) -> str:
        fields = ", ".join(f"{key}={value}" for key, value in self.model_dump().items() if key != "kind")
        return f"{self.kind}({fields})"  # type: ignore[attr-defined]


class PointMass(_LawBase):
    """Degenerate law at ``value``."""

    kind: Literal["point"] = "point"
    value: float = Field(gt=0)

    @property
    def support_lower(self) -> float:
        return self.value

    @property
    def lower_tail_exponent(self) -> float:
        return math.inf

    @property
    def upper_tail_exponent(self) -> float:
        return math.inf

    @property
    def is_degenerate(self) -> bool:
        return True

    def mean(self) -> float:
        return self.value

    def scaled(self, factor: float) -> "PointMass":
        return PointMass(value=self.value * factor)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.full(n, self.value)

    def laplace(self, u: np.ndarray | float, k: int = 0) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return self.value**k * np.exp(-u * self.value)

    def kernel_moment(self, power: float, decay: np.ndarray | float) -> np.ndarray:
        decay = np.asarray(decay, dtype=float)
        return self.value**power * np.exp(-decay / self.value)

    def rule(self, n: int = QUADRATURE_NODES) -> tuple[np.ndarray, np.ndarray]:
        return np.array([self.value]), np.array([1.0])

    def negative_moment(self, order: float) -> float:
        return self.value ** (-order)


class GammaLaw(_LawBase):
    """Gamma law with ``shape`` and ``scale`` (mean ``shape * scale``)."""

    kind: Literal["gamma"] = "gamma"
    shape: float = Field(gt=0)
    scale: float = Field(default=1.0, gt=0)

    @property
    def support_lower(self) -> float:
        return 0.0

    @property
    def lower_tail_exponent(self) -> float:
        return self.shape

    @property
    def upper_tail_exponent(self) -> float:
        return math.inf

    def mean(self) -> float:
        return self.shape * self.scale

    def scaled(self, factor: float) -> "GammaLaw":
        return GammaLaw(shape=self.shape, scale=self.scale * factor)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.gamma(self.shape, self.scale, size=n)

    def laplace(self, u: np.ndarray | float, k: int = 0) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        a, lam = self.shape, self.scale
        log_factor = k * math.log(lam) + special.gammaln(a + k) - special.gammaln(a)
        return np.exp(log_factor - (a + k) * np.log1p(lam * u))

    def kernel_moment(self, power: float, decay: np.ndarray | float) -> np.ndarray:
        out_shape = np.shape(decay)
        decay = np.asarray(decay, dtype=float).reshape(-1)
        if np.any(decay <= 0) and self.shape + power <= 0:
            self.check_inverse_moment(-power)
        return _gamma_kernel(self.shape, self.scale, power, decay).reshape(out_shape)

    def rule(self, n: int = QUADRATURE_NODES) -> tuple[np.ndarray, np.ndarray]:
        nodes, weights = _laguerre(n, self.shape - 1.0)
        return nodes * self.scale, weights

    def expect(self, fn: ArrayFn, power: float = 0.0, n: int = QUADRATURE_NODES) -> float:
        if power < 0:
            self.check_inverse_moment(-power)
        nodes, weights = _laguerre(n, self.shape + power - 1.0)
        factor = math.exp(
            power * math.log(self.scale) + special.gammaln(self.shape + power) - special.gammaln(self.shape)
        )
        return factor * float(np.asarray(fn(nodes * self.scale), dtype=float) @ weights)

    def negative_moment(self, order: float) -> float:
        self.check_inverse_moment(order)
        return math.exp(
            -order * math.log(self.scale) + special.gammaln(self.shape - order) - special.gammaln(self.shape)
        )


class InverseGammaLaw(_LawBase):
    """Law of ``scale / U`` with ``U ~ Gamma(shape, 1)``.

    ``InverseGammaLaw(nu / 2, nu * sigma**2 / 2)`` mixes normals into the
    multivariate Student ``T(nu, sigma)``; ``nu = 1`` gives the Cauchy law.
    """

    kind: Literal["invgamma"] = "invgamma"
    shape: float = Field(gt=0)
    scale: float = Field(default=1.0, gt=0)

    @property
    def support_lower(self) -> float:
        return 0.0

    @property
    def lower_tail_exponent(self) -> float:
        return math.inf

    @property
    def upper_tail_exponent(self) -> float:
        return self.shape

    def mean(self) -> float:
        return self.scale / (self.shape - 1.0) if self.shape > 1 else math.inf

    def scaled(self, factor: float) -> "InverseGammaLaw":
        return InverseGammaLaw(shape=self.shape, scale=self.scale * factor)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.scale / rng.gamma(self.shape, 1.0, size=n)

    def laplace(self, u: np.ndarray | float, k: int = 0) -> np.ndarray:
        out_shape = np.shape(u)
        u = np.asarray(u, dtype=float).reshape(-1)
        a, beta = self.shape, self.scale
        if k > 0:
            self.check_positive_moment(k)
        out = np.empty_like(u, dtype=float)
        zero = u <= 0
        if np.any(zero):
            out[zero] = math.exp(k * math.log(beta) + special.gammaln(a - k) - special.gammaln(a)) if k else 1.0
        pos = ~zero
        if np.any(pos):
            up = u[pos]
            nu = k - a
            z = 2.0 * np.sqrt(beta * up)
            # E[V^k e^{-uV}] = 2 beta^a (beta/u)^{(k-a)/2} K_{k-a}(2 sqrt(beta u)) / Gamma(a)
            log_val = (
                math.log(2.0)
                + a * math.log(beta)
                + 0.5 * nu * (math.log(beta) - np.log(up))
                + np.log(special.kve(nu, z))
                - z
                - special.gammaln(a)
            )
            out[pos] = np.exp(log_val)
        return out.reshape(out_shape)

    def kernel_moment(self, power: float, decay: np.ndarray | float) -> np.ndarray:
        decay = np.asarray(decay, dtype=float)
        a, beta = self.shape, self.scale
        if power > 0:
            self.check_positive_moment(power)
        log_factor = power * math.log(beta) + special.gammaln(a - power) - special.gammaln(a)
        return np.exp(log_factor - (a - power) * np.log1p(decay / beta))

    def rule(self, n: int = QUADRATURE_NODES) -> tuple[np.ndarray, np.ndarray]:
        nodes, weights = _laguerre(n, self.shape - 1.0)
        return self.scale / nodes, weights

    def expect(self, fn: ArrayFn, power: float = 0.0, n: int = QUADRATURE_NODES) -> float:
        if power > 0:
            self.check_positive_moment(power)
        nodes, weights = _laguerre(n, self.shape - power - 1.0)
        factor = math.exp(
            power * math.log(self.scale) + special.gammaln(self.shape - power) - special.gammaln(self.shape)
        )
        return factor * float(np.asarray(fn(self.scale / nodes), dtype=float) @ weights)

    def negative_moment(self, order: float) -> float:
        return math.exp(
            -order * math.log(self.scale) + special.gammaln(self.shape + order) - special.gammaln(self.shape)
        )

    def marginal_cdf(self, t: np.ndarray | float) -> np.ndarray:
        """Student cdf: the one-dimensional marginal of the induced mixture."""

        t = np.asarray(t, dtype=float)
        dof = 2.0 * self.shape
        return special.stdtr(dof, t / math.sqrt(self.scale / self.shape))


class DiscreteLaw(_LawBase):
    """Finite mixture of point masses given as ``[[value, weight], ...]``."""

    kind: Literal["discrete"] = "discrete"
    atoms: tuple[tuple[float, float], ...]

    @field_validator("atoms")
    @classmethod
    def _validate_atoms(cls, atoms: tuple[tuple[float, float], ...]) -> tuple[tuple[float, float], ...]:
        if not atoms:
            raise ValueError("discrete law needs at least one atom")
        for value, weight in atoms:
            if value <= 0:
                raise ValueError("atom values must be strictly positive")
            if weight <= 0:
                raise ValueError("atom weights must be strictly positive")
        total = math.fsum(weight for _, weight in atoms)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"atom weights must sum to 1 (got {total!r})")
        return tuple((float(v), float(w)) for v, w in atoms)

    @property
    def values(self) -> np.ndarray:
        return np.array([value for value, _ in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([weight for _, weight in self.atoms])

    @property
    def support_lower(self) -> float:
        return float(self.values.min())

    @property
    def lower_tail_exponent(self) -> float:
        return math.inf

    @property
    def upper_tail_exponent(self) -> float:
        return math.inf

    @property
    def is_degenerate(self) -> bool:
        return len(self.atoms) == 1

    def mean(self) -> float:
        return float(self.values @ self.weights)

    def scaled(self, factor: float) -> "DiscreteLaw":
        return DiscreteLaw(atoms=tuple((value * factor, weight) for value, weight in self.atoms))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.choice(self.values, size=n, p=self.weights)

    def laplace(self, u: np.ndarray | float, k: int = 0) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        values = self.values
        return np.exp(-np.multiply.outer(u, values)) @ (self.weights * values**k)

    def kernel_moment(self, power: float, decay: np.ndarray | float) -> np.ndarray:
        decay = np.asarray(decay, dtype=float)
        values = self.values
        return np.exp(-np.multiply.outer(decay, 1.0 / values)) @ (self.weights * values**power)

    def rule(self, n: int = QUADRATURE_NODES) -> tuple[np.ndarray, np.ndarray]:
        return self.values, self.weights

    def negative_moment(self, order: float) -> float:
        return float(self.values ** (-order) @ self.weights)


class SumLaw(_LawBase):
    """Law of a sum of independent mixing variables.

    Components are kept symbolically. :func:`simplify` folds point masses
    into a shift and merges components whose sum stays in a named family.
    """

    kind: Literal["sum"] = "sum"
    terms: tuple["MixingLaw", ...]

    @field_validator("terms")
    @classmethod
    def _validate_terms(cls, terms: tuple["MixingLaw", ...]) -> tuple["MixingLaw", ...]:
        if not terms:
            raise ValueError("sum law needs at least one term")
        return terms

    @property
    def support_lower(self) -> float:
        return math.fsum(term.support_lower for term in self.terms)

    @property
    def lower_tail_exponent(self) -> float:
        # P(V1 + V2 < e) behaves like the product of the component small-ball probabilities
        return math.fsum(term.lower_tail_exponent for term in self.terms) if all(
            math.isfinite(term.lower_tail_exponent) for term in self.terms
        ) else math.inf

    @property
    def upper_tail_exponent(self) -> float:
        return min(term.upper_tail_exponent for term in self.terms)

    @property
    def is_degenerate(self) -> bool:
        return all(term.is_degenerate for term in self.terms)

    def mean(self) -> float:
        return math.fsum(term.mean() for term in self.terms)

    def scaled(self, factor: float) -> "SumLaw":
        return SumLaw(terms=tuple(term.scaled(factor) for term in self.terms))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        total = np.zeros(n)
        for term in self.terms:
            total += term.sample(rng, n)
        return total

    def laplace(self, u: np.ndarray | float, k: int = 0) -> np.ndarray:
        if k != 0:
            raise ValueError("sum laws only expose the plain Laplace transform")
        u = np.asarray(u, dtype=float)
        out = np.ones_like(u, dtype=float)
        for term in self.terms:
            out = out * term.laplace(u)
        return out

    def kernel_moment(self, power: float, decay: np.ndarray | float) -> np.ndarray:
        law = simplify(self)
        if not isinstance(law, SumLaw):
            return law.kernel_moment(power, decay)
        if not all(isinstance(term, GammaLaw) for term in law.terms):
            # other components keep the sum away from the origin or vanish there faster than any power
            return super(SumLaw, law).kernel_moment(power, decay)
        out_shape = np.shape(decay)
        flat = np.asarray(decay, dtype=float).reshape(-1)
        if power < 0 and np.any(flat <= 0):
            law.check_inverse_moment(-power)
        return _gamma_sum_kernel(law.terms, power, flat).reshape(out_shape)  # type: ignore[arg-type]

    def rule(self, n: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        fixed = (PointMass, DiscreteLaw)
        random_count = sum(1 for term in self.terms if not isinstance(term, fixed))
        per_term = SUM_NODES.get(random_count, SUM_NODES_FALLBACK)
        nodes = np.array([0.0])
        weights = np.array([1.0])
        for term in self.terms:
            term_nodes, term_weights = term.rule() if isinstance(term, fixed) else term.rule(per_term)
            nodes = np.add.outer(nodes, term_nodes).reshape(-1)
            weights = np.multiply.outer(weights, term_weights).reshape(-1)
        return nodes, weights

    def expect(self, fn: ArrayFn, power: float = 0.0, n: int | None = None) -> float:
        return super().expect(fn, power, n=n)  # type: ignore[arg-type]

    def negative_moment(self, order: float) -> float:
        self.check_inverse_moment(order)
        return laplace_inverse_moment(self.laplace, order)


MixingLaw = Annotated[
    Union[PointMass, GammaLaw, InverseGammaLaw, DiscreteLaw, SumLaw],
    Field(discriminator="kind"),
]

SumLaw.model_rebuild()

_MIXING_ADAPTER = TypeAdapter(MixingLaw)


def mixing_from_spec(spec: dict | MixingLaw) -> MixingLaw:
    """Parse a JSON description such as ``{"kind": "gamma", "shape": 3, "scale": 1}``."""

    if isinstance(spec, _LawBase):
        return spec  # type: ignore[return-value]
    return _MIXING_ADAPTER.validate_python(spec)


def laplace_inverse_moment(laplace: ArrayFn, order: float) -> float:
    """``E[V^{-s}] = Gamma(s)^{-1} int_0^inf t^{s-1} E[e^{-tV}] dt``."""

    head, _ = integrate.quad(
        lambda t: float(laplace(np.asarray(t))), 0.0, 1.0, weight="alg", wvar=(order - 1.0, 0.0),
        epsabs=0.0, epsrel=1e-12, limit=200,
    )
    tail, _ = integrate.quad(
        lambda t: t ** (order - 1.0) * float(laplace(np.asarray(t))), 1.0, math.inf,
        epsabs=0.0, epsrel=1e-12, limit=400,
    )
    return (head + tail) / math.gamma(order)


def _same(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=0.0)


def _flatten(terms: Sequence[MixingLaw]) -> list[MixingLaw]:
    flat: list[MixingLaw] = []
    for term in terms:
        if isinstance(term, SumLaw):
            flat.extend(_flatten(term.terms))
        else:
            flat.append(term)
    return flat


def simplify(law: MixingLaw) -> MixingLaw:
    """Collapse a sum law as far as closed families allow.

    Point masses add, gammas with a common scale add their shapes, and
    inverse gammas of shape one half (the Levy law) add by
    ``(sqrt(b1) + sqrt(b2))**2`` in the scale, which is the Cauchy closure.
    """

    if not isinstance(law, SumLaw):
        if isinstance(law, DiscreteLaw) and law.is_degenerate:
            return PointMass(value=law.atoms[0][0])
        return law
    shift = 0.0
    gammas: list[GammaLaw] = []
    levy: list[InverseGammaLaw] = []
    others: list[MixingLaw] = []
    for term in _flatten(law.terms):
        term = simplify(term)
        if isinstance(term, PointMass):
            shift += term.value
        elif isinstance(term, GammaLaw):
            for idx, existing in enumerate(gammas):
                if _same(existing.scale, term.scale):
                    gammas[idx] = GammaLaw(shape=existing.shape + term.shape, scale=existing.scale)
                    break
            else:
                gammas.append(term)
        elif isinstance(term, InverseGammaLaw) and _same(term.shape, 0.5):
            levy.append(term)
        else:
            others.append(term)
    if levy:
        root = math.fsum(math.sqrt(term.scale) for term in levy)
        others.append(InverseGammaLaw(shape=0.5, scale=root * root))
    collected: list[MixingLaw] = [*gammas, *others]
    if shift > 0:
        collected.insert(0, PointMass(value=shift))
    if len(collected) == 1:
        return collected[0]
    return SumLaw(terms=tuple(collected))


def add_laws(*laws: MixingLaw) -> MixingLaw:
    """Law of the sum of independent variables, simplified."""

    if len(laws) == 1:
        return simplify(laws[0])
    return simplify(SumLaw(terms=tuple(laws)))


def inverse_half_moment(law: MixingLaw, k: int) -> float:
    """Return ``E[T^{-k/2}]`` for ``T`` distributed as ``law``."""

    if k < 1:
        raise ValueError("k must be a positive integer")
    law = simplify(law)
    order = k / 2.0
    law.check_inverse_moment(order)
    return law.negative_moment(order)


def weighted_inverse_moment(base: MixingLaw, extra: MixingLaw, factor: float, order: float) -> float:
    """Return ``E[W (A + factor W)^{-order}]`` with ``A ~ base`` and ``W ~ extra`` independent."""

    base = simplify(base)
    extra = simplify(extra)
    extra.check_positive_moment(1.0)
    if isinstance(base, PointMass) and isinstance(extra, PointMass):
        return extra.value * (base.value + factor * extra.value) ** (-order)
    exponent = base.lower_tail_exponent + extra.lower_tail_exponent
    if not exponent + 1.0 > order:
        raise DivergentMomentError(
            f"E[W (A + cW)^-{order:g}] diverges (lower tail exponent {exponent + 1.0:g})",
            order=-order,
            tail_exponent=exponent + 1.0,
        )

    def transform(t: np.ndarray) -> np.ndarray:
        return base.laplace(t) * extra.laplace(factor * t, k=1)

    return laplace_inverse_moment(transform, order)


def student_mixing(nu: float, sigma: float = 1.0) -> InverseGammaLaw:
    return InverseGammaLaw(shape=nu / 2.0, scale=nu * sigma * sigma / 2.0)


__all__ = [
    "DivergentMomentError",
    "DiscreteLaw",
    "GammaLaw",
    "InverseGammaLaw",
    "MixingLaw",
    "PointMass",
    "SumLaw",
    "add_laws",
    "inverse_half_moment",
    "laplace_inverse_moment",
    "mixing_from_spec",
    "simplify",
    "student_mixing",
    "weighted_inverse_moment",
]
