"""Truncated multivariate Taylor arithmetic ("jets").

A jet stores the Taylor coefficients ``f_alpha = d^alpha f / alpha!`` of a scalar field at a
point, for every multi-index ``alpha`` of total degree at most ``order``. Coefficients are
kept densely in graded lexicographic order, so truncating to a lower order is a prefix
slice. A trailing batch axis lets one jet carry the expansions at many points at once:
``coeffs`` has shape ``(n_coeffs, *batch)`` and every operation acts pointwise on the
batch.
"""

import itertools
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Literal

import numpy as np
from scipy.special import binom

from ..core.exceptions import JetDomainError

MAX_ORDER = 4
MAX_VARS = 4

ElementaryTag = Literal["sin", "cos", "exp", "log", "sqrt", "atan", "pow"]
ELEMENTARY_FUNCTIONS: tuple[str, ...] = ("sin", "cos", "exp", "log", "sqrt", "atan")

ArrayLike = float | np.ndarray


@dataclass(frozen=True)
class JetLayout:
    """Index tables shared by every jet with the same (num_vars, order)."""

    num_vars: int
    order: int
    indices: tuple[tuple[int, ...], ...]
    lookup: dict[tuple[int, ...], int]
    factorials: np.ndarray
    left: np.ndarray
    right: np.ndarray
    starts: np.ndarray
    derivatives: tuple[tuple[np.ndarray, np.ndarray, np.ndarray], ...]

    @property
    def size(self) -> int:
        return len(self.indices)


def graded_indices(num_vars: int, order: int) -> tuple[tuple[int, ...], ...]:
    """Multi-indices of total degree <= order, by degree, then descending lex."""
    result: list[tuple[int, ...]] = []
    for degree in range(order + 1):
        block = [
            alpha
            for alpha in itertools.product(range(degree + 1), repeat=num_vars)
            if sum(alpha) == degree
        ]
        result.extend(sorted(block, reverse=True))
    return tuple(result)


@lru_cache(maxsize=None)
def jet_layout(num_vars: int, order: int) -> JetLayout:
    """Build (and cache) the multiplication and derivative tables."""
    if not 1 <= num_vars <= MAX_VARS:
        raise JetDomainError(
            f"num_vars must be in 1..{MAX_VARS}", details={"num_vars": num_vars}
        )
    if not 0 <= order <= MAX_ORDER:
        raise JetDomainError(f"order must be in 0..{MAX_ORDER}", details={"order": order})

    indices = graded_indices(num_vars, order)
    lookup = {alpha: position for position, alpha in enumerate(indices)}
    factorials = np.array(
        [math.prod(math.factorial(a) for a in alpha) for alpha in indices], dtype=float
    )

    # Product table sorted by target so np.add.reduceat can sum each target's block.
    triples = []
    for i, alpha in enumerate(indices):
        for j, beta in enumerate(indices):
            total = tuple(a + b for a, b in zip(alpha, beta, strict=True))
            if sum(total) <= order:
                triples.append((lookup[total], i, j))
    triples.sort()
    targets = np.array([t[0] for t in triples], dtype=np.intp)
    left = np.array([t[1] for t in triples], dtype=np.intp)
    right = np.array([t[2] for t in triples], dtype=np.intp)
    starts = np.flatnonzero(np.r_[True, targets[1:] != targets[:-1]])

    derivatives = []
    if order > 0:
        lower = {alpha: k for k, alpha in enumerate(graded_indices(num_vars, order - 1))}
        for axis in range(num_vars):
            src, dst, factor = [], [], []
            for position, alpha in enumerate(indices):
                if alpha[axis] == 0:
                    continue
                reduced = tuple(a - (k == axis) for k, a in enumerate(alpha))
                src.append(position)
                dst.append(lower[reduced])
                factor.append(float(alpha[axis]))
            derivatives.append(
                (np.array(src, dtype=np.intp), np.array(dst, dtype=np.intp), np.array(factor))
            )

    return JetLayout(
        num_vars=num_vars,
        order=order,
        indices=indices,
        lookup=lookup,
        factorials=factorials,
        left=left,
        right=right,
        starts=starts,
        derivatives=tuple(derivatives),
    )


class Jet:
    """Truncated Taylor expansion of a scalar field, optionally batched over points."""

    __slots__ = ("num_vars", "order", "coeffs")

    # Make numpy hand mixed expressions back to Jet's reflected operators.
    __array_ufunc__ = None

    def __init__(self, coeffs: np.ndarray, num_vars: int, order: int):
        layout = jet_layout(num_vars, order)
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim == 0 or coeffs.shape[0] != layout.size:
            raise JetDomainError(
                "coefficient array does not match the jet layout",
                details={"expected": layout.size, "shape": list(np.shape(coeffs))},
            )
        self.num_vars = num_vars
        self.order = order
        self.coeffs = coeffs

    # ===== Construction =====

    @classmethod
    def constant(cls, value: ArrayLike, num_vars: int, order: int) -> "Jet":
        """Jet of a constant (or batch of constants)."""
        value = np.asarray(value, dtype=float)
        coeffs = np.zeros((jet_layout(num_vars, order).size, *value.shape))
        coeffs[0] = value
        return cls(coeffs, num_vars, order)

    @property
    def layout(self) -> JetLayout:
        return jet_layout(self.num_vars, self.order)

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return tuple(self.coeffs.shape[1:])

    @property
    def value(self) -> np.ndarray:
        """Constant term, i.e. the field value at the expansion point."""
        return self.coeffs[0]

    def coefficient(self, alpha: Sequence[int]) -> np.ndarray:
        """Taylor coefficient for multi-index alpha (zero beyond the order)."""
        alpha = tuple(alpha)
        if sum(alpha) > self.order:
            return np.zeros(self.batch_shape)
        return self.coeffs[self.layout.lookup[alpha]]

    def partial(self, alpha: Sequence[int]) -> np.ndarray:
        """Partial derivative d^alpha f at the expansion point."""
        alpha = tuple(alpha)
        if sum(alpha) > self.order:
            raise JetDomainError(
                "derivative order exceeds jet order",
                details={"alpha": list(alpha), "order": self.order},
            )
        layout = self.layout
        position = layout.lookup[alpha]
        return layout.factorials[position] * self.coeffs[position]

    def gradient(self) -> np.ndarray:
        """First partials, shape (num_vars, *batch)."""
        return np.stack(
            [self.partial(tuple(int(k == i) for k in range(self.num_vars))) for i in range(self.num_vars)]
        )

    def hessian(self) -> np.ndarray:
        """Second partials, shape (num_vars, num_vars, *batch)."""
        n = self.num_vars
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                alpha = [0] * n
                alpha[i] += 1
                alpha[j] += 1
                row.append(self.partial(alpha))
            rows.append(np.stack(row))
        return np.stack(rows)

    def derivative(self, axis: int) -> "Jet":
        """Jet of the partial derivative along ``axis`` (order drops by one)."""
        if self.order == 0:
            raise JetDomainError("cannot differentiate an order-0 jet")
        src, dst, factor = self.layout.derivatives[axis]
        lower = jet_layout(self.num_vars, self.order - 1)
        coeffs = np.zeros((lower.size, *self.batch_shape))
        coeffs[dst] = self.coeffs[src] * factor.reshape((-1,) + (1,) * len(self.batch_shape))
        return Jet(coeffs, self.num_vars, self.order - 1)

    def truncate(self, order: int) -> "Jet":
        """Drop all terms above ``order``."""
        if order >= self.order:
            return self
        size = jet_layout(self.num_vars, order).size
        return Jet(self.coeffs[:size], self.num_vars, order)

    def without_constant(self) -> "Jet":
        coeffs = self.coeffs.copy()
        coeffs[0] = 0.0
        return Jet(coeffs, self.num_vars, self.order)

    # ===== Arithmetic =====

    def _align(self, other: "Jet") -> tuple["Jet", "Jet"]:
        if other.num_vars != self.num_vars:
            raise JetDomainError(
                "jets over different variable counts cannot be combined",
                details={"left": self.num_vars, "right": other.num_vars},
            )
        order = min(self.order, other.order)
        return self.truncate(order), other.truncate(order)

    def __add__(self, other: Any) -> "Jet":
        if isinstance(other, Jet):
            a, b = self._align(other)
            return Jet(a.coeffs + b.coeffs, a.num_vars, a.order)
        value = np.asarray(other, dtype=float)
        shape = np.broadcast_shapes(self.batch_shape, value.shape)
        coeffs = np.broadcast_to(self.coeffs, (self.coeffs.shape[0], *shape)).copy()
        coeffs[0] = coeffs[0] + value
        return Jet(coeffs, self.num_vars, self.order)

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        return Jet(-self.coeffs, self.num_vars, self.order)

    def __sub__(self, other: Any) -> "Jet":
        return self + (-other)

    def __rsub__(self, other: Any) -> "Jet":
        return (-self) + other

    def __mul__(self, other: Any) -> "Jet":
        if isinstance(other, Jet):
            a, b = self._align(other)
            layout = a.layout
            products = a.coeffs[layout.left] * b.coeffs[layout.right]
            return Jet(np.add.reduceat(products, layout.starts, axis=0), a.num_vars, a.order)
        value = np.asarray(other, dtype=float)
        return Jet(self.coeffs * value, self.num_vars, self.order)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "Jet":
        if isinstance(other, Jet):
            return self * power(other, -1)
        value = np.asarray(other, dtype=float)
        if np.any(value == 0):
            raise JetDomainError("division by zero", details={"function": "div", "value": 0.0})
        return Jet(self.coeffs / value, self.num_vars, self.order)

    def __rtruediv__(self, other: Any) -> "Jet":
        return power(self, -1) * other

    def __pow__(self, exponent: Any) -> "Jet":
        if isinstance(exponent, Jet):
            return exp(exponent * log(self))
        return power(self, float(exponent))

    def __rpow__(self, base: Any) -> "Jet":
        base = np.asarray(base, dtype=float)
        if np.any(base <= 0):
            raise JetDomainError(
                "pow with a jet exponent requires a positive base",
                details={"function": "pow", "value": float(np.min(base))},
            )
        return exp(self * np.log(base))

    def __repr__(self) -> str:
        return f"Jet(num_vars={self.num_vars}, order={self.order}, batch={self.batch_shape})"


# ===== Seeding =====


def jet_variable(index: int, value: ArrayLike, num_vars: int, order: int) -> Jet:
    """Jet of the coordinate function u_index expanded at ``value``."""
    if not 0 <= index < num_vars:
        raise JetDomainError(
            "variable index out of range", details={"index": index, "num_vars": num_vars}
        )
    jet = Jet.constant(value, num_vars, order)
    if order >= 1:
        unit = tuple(int(k == index) for k in range(num_vars))
        jet.coeffs[jet.layout.lookup[unit]] = 1.0
    return jet


def jet_variables(point: np.ndarray, order: int) -> list[Jet]:
    """Seed every coordinate of ``point`` (shape (num_vars,) or (batch, num_vars))."""
    point = np.asarray(point, dtype=float)
    num_vars = point.shape[-1]
    return [jet_variable(i, point[..., i], num_vars, order) for i in range(num_vars)]


# ===== Univariate composition =====


def _compose(x: Jet, series: list[np.ndarray]) -> Jet:
    """Evaluate sum_k series[k] * (x - x0)^k by Horner's rule."""
    h = x.without_constant()
    result = Jet.constant(series[x.order], x.num_vars, x.order)
    for k in range(x.order - 1, -1, -1):
        result = result * h + series[k]
    return result


def _require_positive(name: str, x0: np.ndarray) -> None:
    if np.any(~(x0 > 0)):
        worst = float(np.min(x0))
        raise JetDomainError(
            f"{name} requires a strictly positive argument, got {worst!r}",
            details={"function": name, "value": worst},
        )


def sin(x: Jet) -> Jet:
    x0 = x.value
    cycle = [np.sin(x0), np.cos(x0), -np.sin(x0), -np.cos(x0)]
    return _compose(x, [cycle[k % 4] / math.factorial(k) for k in range(x.order + 1)])


def cos(x: Jet) -> Jet:
    x0 = x.value
    cycle = [np.cos(x0), -np.sin(x0), -np.cos(x0), np.sin(x0)]
    return _compose(x, [cycle[k % 4] / math.factorial(k) for k in range(x.order + 1)])


def exp(x: Jet) -> Jet:
    e = np.exp(x.value)
    return _compose(x, [e / math.factorial(k) for k in range(x.order + 1)])


def log(x: Jet) -> Jet:
    x0 = x.value
    _require_positive("log", x0)
    series = [np.log(x0)]
    series += [(-1.0) ** (k + 1) / (k * x0**k) for k in range(1, x.order + 1)]
    return _compose(x, series)


def power(x: Jet, c: float) -> Jet:
    """x ** c for a real exponent."""
    x0 = x.value
    if float(c).is_integer() and c >= 0:
        # Exact for any sign of x0.
        result = Jet.constant(np.ones(x.batch_shape), x.num_vars, x.order)
        base, n = x, int(c)
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result
    if float(c).is_integer():
        if np.any(x0 == 0):
            raise JetDomainError(
                f"pow({c:g}) is undefined at zero", details={"function": "pow", "value": 0.0}
            )
    else:
        _require_positive(f"pow({c:g})", x0)
    series = [binom(c, k) * x0 ** (c - k) for k in range(x.order + 1)]
    return _compose(x, series)


def sqrt(x: Jet) -> Jet:
    _require_positive("sqrt", x.value)
    return power(x, 0.5)


def atan(x: Jet) -> Jet:
    x0 = x.value
    # d/dx atan = 1 / q(h) with q = (1 + x0^2) + 2 x0 h + h^2; invert q as a series.
    q0, q1 = 1.0 + x0**2, 2.0 * x0
    recip = [1.0 / q0]
    for m in range(1, x.order):
        prev2 = recip[m - 2] if m >= 2 else 0.0
        recip.append(-(q1 * recip[m - 1] + prev2) / q0)
    series = [np.arctan(x0)] + [recip[k - 1] / k for k in range(1, x.order + 1)]
    return _compose(x, series)


_ELEMENTARY: dict[str, Callable[[Jet], Jet]] = {
    "sin": sin,
    "cos": cos,
    "exp": exp,
    "log": log,
    "sqrt": sqrt,
    "atan": atan,
}


def jet_apply(f: ElementaryTag, x: Jet, c: float | None = None) -> Jet:
    """Apply an elementary function tag to a jet; ``pow`` needs the exponent ``c``."""
    if f == "pow":
        if c is None:
            raise JetDomainError("pow needs an exponent", details={"function": "pow"})
        return power(x, c)
    try:
        return _ELEMENTARY[f](x)
    except KeyError:
        raise JetDomainError(f"unknown elementary function {f!r}", details={"function": f})


# ===== Small matrices of jets =====


def _parity(permutation: tuple[int, ...]) -> int:
    sign = 1
    seen = list(permutation)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def jet_det(matrix: Sequence[Sequence[Jet]]) -> Jet:
    """Determinant by Leibniz expansion (n <= 5)."""
    n = len(matrix)
    total: Jet | None = None
    for permutation in itertools.permutations(range(n)):
        term = matrix[0][permutation[0]]
        for row in range(1, n):
            term = term * matrix[row][permutation[row]]
        term = term if _parity(permutation) > 0 else -term
        total = term if total is None else total + term
    assert total is not None
    return total


def jet_inverse(matrix: Sequence[Sequence[Jet]]) -> tuple[list[list[Jet]], Jet]:
    """Inverse by adjugate; returns (inverse, determinant)."""
    n = len(matrix)
    det = jet_det(matrix)
    if n == 1:
        return [[1.0 / det]], det
    inv_det = 1.0 / det
    inverse: list[list[Jet]] = [[inv_det] * n for _ in range(n)]  # type: ignore[list-item]
    for i in range(n):
        for j in range(n):
            minor = [
                [matrix[r][c] for c in range(n) if c != i] for r in range(n) if r != j
            ]
            cofactor = jet_det(minor)
            inverse[i][j] = (cofactor if (i + j) % 2 == 0 else -cofactor) * inv_det
    return inverse, det
