"""
Linear plumbings C_{p,q} and the arithmetic of rationally blowing them down.
"""

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from math import gcd
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from surgery.errors import EmbeddingError, InvariantError, PlumbingError
from surgery.lattice import DivisorClass, ManifoldInvariants, pair

logger = logging.getLogger(__name__)


def hj_expansion(p: int, q: int) -> List[int]:
    """Hirzebruch-Jung expansion of p^2/(pq - 1) with every entry at least 2."""
    if not (p >= q >= 1) or gcd(p, q) != 1 or p * q <= 1:
        raise PlumbingError(f"need coprime p >= q >= 1 with pq > 1, got p={p}, q={q}")
    n, m = p * p, p * q - 1
    rs = []
    while m:
        r = -(-n // m)
        rs.append(r)
        n, m = m, r * m - n
    return rs


def continued_fraction_value(rs: Sequence[int]) -> Fraction:
    """[r1, ..., rk] = r1 - 1/(r2 - 1/(... - 1/rk))"""
    if not rs:
        raise PlumbingError("empty continued fraction")
    value = Fraction(rs[-1])
    for r in reversed(rs[:-1]):
        value = r - 1 / value
    return value


def chain_matrix(weights: Sequence[int]) -> np.ndarray:
    size = len(weights)
    matrix = np.zeros((size, size), dtype=object)
    for i, weight in enumerate(weights):
        matrix[i, i] = weight
        if i + 1 < size:
            matrix[i, i + 1] = 1
            matrix[i + 1, i] = 1
    return matrix


def exact_inverse(matrix: np.ndarray) -> np.ndarray:
    """Gauss-Jordan inverse over Fractions."""
    n = matrix.shape[0]
    if matrix.shape != (n, n):
        raise PlumbingError(f"matrix must be square, got shape {matrix.shape}")
    x = np.array([[Fraction(v) for v in row] for row in matrix], dtype=object)
    y = np.array([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], dtype=object)

    for i in range(n):
        for j in range(i, n):
            if x[j, i] != 0:
                if j != i:
                    x[[i, j]] = x[[j, i]]
                    y[[i, j]] = y[[j, i]]
                break
        else:
            raise PlumbingError("matrix is singular")
        pivot = x[i, i]
        x[i, :] = x[i, :] / pivot
        y[i, :] = y[i, :] / pivot
        for j in range(n):
            if j != i and x[j, i] != 0:
                factor = x[j, i]
                x[j, :] = x[j, :] - factor * x[i, :]
                y[j, :] = y[j, :] - factor * y[i, :]
    return y


@dataclass(frozen=True)
class PlumbingChain:
    p: int
    q: int
    r: Tuple[int, ...]

    @classmethod
    def from_pq(cls, p: int, q: int) -> "PlumbingChain":
        return cls(p, q, tuple(hj_expansion(p, q)))

    @property
    def weights(self) -> Tuple[int, ...]:
        return tuple(-x for x in self.r)

    @property
    def length(self) -> int:
        return len(self.r)

    def matrix(self) -> np.ndarray:
        return chain_matrix(self.weights)

    @property
    def determinant(self) -> int:
        return int(sympy.Matrix(self.matrix().tolist()).det())

    def inverse(self) -> np.ndarray:
        return exact_inverse(self.matrix())

    @property
    def value(self) -> Fraction:
        return continued_fraction_value(self.r)

    @property
    def boundary(self) -> Tuple[int, int]:
        """Lens space L(p^2, 1 - pq) with the second entry reduced mod p^2."""
        order = self.p * self.p
        return order, (1 - self.p * self.q) % order

    @property
    def lens_label(self) -> str:
        order, residue = self.boundary
        return f"L({order},{residue})"

    @property
    def negative_definite(self) -> bool:
        eigenvalues = np.linalg.eigvalsh(np.array(self.matrix(), dtype=float))
        return bool(np.all(eigenvalues < 0))

    def validate(self) -> "PlumbingChain":
        if any(x < 2 for x in self.r):
            raise PlumbingError(f"chain weights must all be <= -2: {self.weights}")
        expected = Fraction(self.p * self.p, self.p * self.q - 1)
        if self.value != expected:
            raise PlumbingError(f"continued fraction {self.value} != {expected}")
        if self.determinant != (-1) ** self.length * self.p * self.p:
            raise PlumbingError(f"det {self.determinant} != (-1)^{self.length} {self.p}^2")
        return self


def plumbing_chain(p: int, q: int) -> PlumbingChain:
    chain = PlumbingChain.from_pq(p, q).validate()
    logger.debug("C_{%d,%d}: weights %s", p, q, chain.weights)
    return chain


# ═══════════════════════════════════════════════════════════════════════════════
# EMBEDDINGS AND DESCENT
# ═══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class PlumbingEmbedding:
    chain: PlumbingChain
    vertices: Tuple[DivisorClass, ...]

    def gram(self) -> List[List[int]]:
        return [[pair(u, v) for v in self.vertices] for u in self.vertices]

    def validate(self) -> "PlumbingEmbedding":
        if len(self.vertices) != self.chain.length:
            raise EmbeddingError(
                f"chain has {self.chain.length} vertices, embedding declares {len(self.vertices)}")
        expected = self.chain.matrix()
        for i, row in enumerate(self.gram()):
            for j, value in enumerate(row):
                if value != expected[i, j]:
                    raise EmbeddingError(
                        f"u{i + 1}.u{j + 1} = {value}, plumbing needs {expected[i, j]}")
        return self


def dual_pairings(divisor: DivisorClass, embedding: PlumbingEmbedding) -> List[int]:
    return [pair(divisor, u) for u in embedding.vertices]


def restricted_square(divisor: DivisorClass, embedding: PlumbingEmbedding) -> Fraction:
    """Square of the restriction to the plumbing: kappa^T M^-1 kappa."""
    kappa = np.array([Fraction(x) for x in dual_pairings(divisor, embedding)], dtype=object)
    return Fraction(kappa.dot(embedding.chain.inverse()).dot(kappa))


def blowdown_invariants(invariants: ManifoldInvariants, k: int) -> ManifoldInvariants:
    """Replace a length k plumbing by a rational ball: e - k, sigma + k."""
    if k < 0:
        raise PlumbingError(f"plumbing length must be non-negative, got {k}")
    try:
        return replace(invariants, e=invariants.e - k, sigma=invariants.sigma + k)
    except InvariantError as e:
        raise InvariantError(f"blowing down {k} spheres leaves negative b2-: {e}") from e


def descent_check(divisor: DivisorClass, embedding: PlumbingEmbedding) -> Dict[str, Any]:
    """Whether a characteristic class meets each vertex in r_i - 2 and squares to -k there."""
    kappa = dual_pairings(divisor, embedding)
    targets = [r - 2 for r in embedding.chain.r]
    sign: Optional[int] = None
    if kappa == targets:
        sign = 1
    elif kappa == [-t for t in targets]:
        sign = -1
    square = restricted_square(divisor, embedding)
    square_match = square == -embedding.chain.length
    return {
        'success': sign is not None and square_match,
        'pairings': kappa,
        'pairings_match': sign is not None,
        'sign': sign,
        'restricted_square': square,
        'square_match': square_match,
    }
