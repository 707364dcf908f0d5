"""Data model for finite-dimensional Ito *-algebras.

An Ito *-algebra is held as its structure constants over a fixed basis:
a rank-3 multiplication tensor ``c`` with ``a_i . a_j = sum_k c[i,j,k] a_k``,
a star matrix ``S`` with ``a_i* = sum_k S[i,k] a_k``, a distinguished
self-adjoint annihilator (the death, representing dt) and the state
functional ``l`` with ``l(death) = 1``.  Elements are coefficient vectors.

All equality decisions go through one per-algebra tolerance, relative to
the largest magnitude entering the comparison (with an absolute floor of 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "AlgebraError",
    "AxiomCheck",
    "AxiomReport",
    "Element",
    "ItoAlgebra",
    "commutant_check",
    "gram_matrix",
    "multiply",
    "random_element",
    "rel_residual",
    "star",
    "state_of",
    "subalgebra",
    "verify_axioms",
]


class AlgebraError(ValueError):
    """Malformed algebra data or an operation on incompatible operands."""


def rel_residual(lhs, rhs) -> float:
    """Largest entrywise deviation, relative to the data magnitude.

    The denominator is ``max(1, |lhs|_max, |rhs|_max)`` so comparisons of
    near-zero quantities degrade to an absolute test.
    """
    lhs = np.asarray(lhs, dtype=complex)
    rhs = np.asarray(rhs, dtype=complex)
    num = float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0
    scale = 1.0
    if lhs.size:
        scale = max(scale, float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))))
    return num / scale


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ItoAlgebra:
    """Finite-dimensional Ito *-algebra given by structure constants.

    Parameters
    ----------
    labels : basis names, one per dimension.
    mult : complex tensor of shape (n, n, n); ``a_i . a_j = sum_k mult[i,j,k] a_k``.
    star : complex matrix of shape (n, n); ``a_i* = sum_k star[i,k] a_k``.
        The star of a general element conjugates coefficients.
    death : index of a basis element, or an explicit coefficient vector.
    state : complex vector of the values ``l(a_i)``.
    tol : tolerance used by every equality decision involving this algebra.
    """

    labels: tuple[str, ...]
    mult: np.ndarray
    star: np.ndarray
    death: np.ndarray
    state: np.ndarray
    tol: float = 1e-9
    name: str | None = None

    def __post_init__(self):
        labels = tuple(str(s) for s in self.labels)
        n = len(labels)
        if n == 0:
            raise AlgebraError("algebra needs at least one basis element")
        if len(set(labels)) != n:
            raise AlgebraError("duplicate basis labels")
        mult = np.array(self.mult, dtype=complex)
        star_m = np.array(self.star, dtype=complex)
        state = np.array(self.state, dtype=complex).reshape(-1)
        death = self.death
        if np.isscalar(death) or isinstance(death, (int, np.integer)):
            idx = int(death)
            if not 0 <= idx < n:
                raise AlgebraError(f"death index {idx} out of range")
            death = np.zeros(n, dtype=complex)
            death[idx] = 1.0
        else:
            death = np.array(death, dtype=complex).reshape(-1)
        if mult.shape != (n, n, n):
            raise AlgebraError(f"mult tensor must have shape {(n, n, n)}, got {mult.shape}")
        if star_m.shape != (n, n):
            raise AlgebraError(f"star matrix must have shape {(n, n)}, got {star_m.shape}")
        if state.shape != (n,) or death.shape != (n,):
            raise AlgebraError("state and death must be vectors of the basis size")
        if not (self.tol >= 0):
            raise AlgebraError("tol must be nonnegative")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "mult", _freeze(mult))
        object.__setattr__(self, "star", _freeze(star_m))
        object.__setattr__(self, "death", _freeze(death))
        object.__setattr__(self, "state", _freeze(state))

    @property
    def dim(self) -> int:
        return len(self.labels)

    def basis_element(self, key: int | str) -> "Element":
        idx = self.index(key) if isinstance(key, str) else int(key)
        coeffs = np.zeros(self.dim, dtype=complex)
        coeffs[idx] = 1.0
        return Element(self, coeffs)

    def element(self, coeffs) -> "Element":
        return Element(self, np.asarray(coeffs, dtype=complex))

    def element_from(self, terms: Mapping[str, complex]) -> "Element":
        coeffs = np.zeros(self.dim, dtype=complex)
        for sym, coef in terms.items():
            coeffs[self.index(sym)] += coef
        return Element(self, coeffs)

    def death_element(self) -> "Element":
        return Element(self, self.death.copy())

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise AlgebraError(f"unknown basis symbol {label!r}") from None

    def zero(self) -> "Element":
        return Element(self, np.zeros(self.dim, dtype=complex))

    def same_table(self, other: "ItoAlgebra") -> bool:
        """Structural equality of the defining data, within this algebra's tol."""
        if self.dim != other.dim:
            return False
        return (
            rel_residual(self.mult, other.mult) <= self.tol
            and rel_residual(self.star, other.star) <= self.tol
            and rel_residual(self.death, other.death) <= self.tol
            and rel_residual(self.state, other.state) <= self.tol
        )

    def __repr__(self) -> str:
        name = self.name or "ItoAlgebra"
        return f"<{name} dim={self.dim} basis={list(self.labels)}>"


@dataclass(frozen=True, eq=False)
class Element:
    """Algebra member as a coefficient vector over the algebra's basis."""

    algebra: ItoAlgebra
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=complex).reshape(-1)
        if coeffs.shape != (self.algebra.dim,):
            raise AlgebraError(
                f"coefficient vector has length {coeffs.size}, expected {self.algebra.dim}"
            )
        object.__setattr__(self, "coeffs", _freeze(coeffs))

    def __add__(self, other: "Element") -> "Element":
        self._check_same(other)
        return Element(self.algebra, self.coeffs + other.coeffs)

    def __sub__(self, other: "Element") -> "Element":
        self._check_same(other)
        return Element(self.algebra, self.coeffs - other.coeffs)

    def __neg__(self) -> "Element":
        return Element(self.algebra, -self.coeffs)

    def __rmul__(self, scalar) -> "Element":
        if isinstance(scalar, Element):
            return NotImplemented
        return Element(self.algebra, complex(scalar) * self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Element):
            return multiply(self, other)
        return Element(self.algebra, complex(other) * self.coeffs)

    def star(self) -> "Element":
        return star(self)

    def state(self) -> complex:
        return state_of(self)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def is_zero(self, tol: float | None = None) -> bool:
        tol = self.algebra.tol if tol is None else tol
        return float(np.max(np.abs(self.coeffs))) <= tol

    def allclose(self, other: "Element", tol: float | None = None) -> bool:
        self._check_same(other)
        tol = self.algebra.tol if tol is None else tol
        return rel_residual(self.coeffs, other.coeffs) <= tol

    def _check_same(self, other: "Element") -> None:
        if other.algebra is not self.algebra and other.algebra.dim != self.algebra.dim:
            raise AlgebraError("elements belong to algebras of different dimension")

    def __repr__(self) -> str:
        terms = []
        for coef, sym in zip(self.coeffs, self.algebra.labels):
            if coef != 0:
                terms.append(f"({coef:.6g})*{sym}")
        return " + ".join(terms) if terms else "0"


def multiply(a: Element, b: Element) -> Element:
    """Product of two elements through the structure-constant tensor."""
    a._check_same(b)
    coeffs = np.einsum("i,j,ijk->k", a.coeffs, b.coeffs, a.algebra.mult)
    return Element(a.algebra, coeffs)


def star(a: Element) -> Element:
    """Involution: conjugate the coefficients, then apply the basis star map."""
    return Element(a.algebra, np.conj(a.coeffs) @ a.algebra.star)


def state_of(a: Element) -> complex:
    """Value of the state functional l on the element."""
    return complex(a.coeffs @ a.algebra.state)


def gram_matrix(alg: ItoAlgebra) -> np.ndarray:
    """Gram matrix ``H[i,j] = l(a_i* . a_j)`` over the full basis."""
    return np.einsum("ip,pjk,k->ij", alg.star, alg.mult, alg.state)


def commutant_check(alg: ItoAlgebra) -> bool:
    """True iff all basis products commute within the algebra tolerance."""
    return rel_residual(alg.mult, np.swapaxes(alg.mult, 0, 1)) <= alg.tol


@dataclass(frozen=True)
class AxiomCheck:
    name: str
    passed: bool
    residual: float
    detail: str = ""


@dataclass(frozen=True)
class AxiomReport:
    checks: tuple[AxiomCheck, ...]
    tol: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    def failures(self) -> list[AxiomCheck]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "tol": self.tol,
            "checks": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "residual": c.residual,
                    "detail": c.detail,
                }
                for c in self.checks
            ],
        }

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            extra = f"  ({c.detail})" if c.detail else ""
            lines.append(f"{status}  {c.name:24s} residual={c.residual:.3e}{extra}")
        return "\n".join(lines)


def verify_axioms(alg: ItoAlgebra) -> AxiomReport:
    """Check every defining axiom, reporting a named residual per check.

    Covers associativity, the star involution and its anti-multiplicativity,
    the death properties, the *-symmetry and normalization of the state, and
    positive semidefiniteness of the Gram matrix.  Failures are report
    entries, never exceptions.
    """
    c, S, l, d, tol = alg.mult, alg.star, alg.state, alg.death, alg.tol
    n = alg.dim
    checks = []

    def add(name, residual, detail=""):
        checks.append(AxiomCheck(name, residual <= tol, float(residual), detail))

    # Blockwise over the first factor keeps memory at n^3 per step.
    assoc = 0.0
    for i in range(n):
        lhs = np.einsum("jm,mkr->jkr", c[i], c)   # (a_i a_j) a_k
        rhs = np.einsum("jkm,mr->jkr", c, c[i])   # a_i (a_j a_k)
        assoc = max(assoc, rel_residual(lhs, rhs))
    add("associativity", assoc)

    add("star_involution", rel_residual(np.conj(S) @ S, np.eye(n)))

    prod_star = np.einsum("ijk,km->ijm", np.conj(c), S)
    star_prod = np.einsum("jp,iq,pqm->ijm", S, S, c)
    add("star_antimultiplicative", rel_residual(prod_star, star_prod))

    add("death_self_adjoint", rel_residual(np.conj(d) @ S, d))

    left = np.einsum("p,pik->ik", d, c)
    right = np.einsum("p,ipk->ik", d, c)
    resid = max(rel_residual(left, np.zeros_like(left)), rel_residual(right, np.zeros_like(right)))
    add("death_annihilates", resid)

    add("state_star_symmetry", rel_residual(S @ l, np.conj(l)))
    add("state_normalized", rel_residual(d @ l, 1.0))

    H = gram_matrix(alg)
    Hh = (H + H.conj().T) / 2.0
    add("gram_hermitian", rel_residual(H, H.conj().T))
    eigs = np.linalg.eigvalsh(Hh)
    scale = max(1.0, float(np.max(np.abs(eigs))) if eigs.size else 0.0)
    min_eig = float(eigs[0]) if eigs.size else 0.0
    add(
        "state_positive",
        max(0.0, -min_eig) / scale,
        detail=f"min Gram eigenvalue {min_eig:.3e}",
    )

    return AxiomReport(tuple(checks), tol)


def random_element(alg: ItoAlgebra, rng: np.random.Generator, scale: float = 1.0) -> Element:
    """Element with i.i.d. complex Gaussian coefficients; used by samplers and tests."""
    coeffs = rng.standard_normal(alg.dim) + 1j * rng.standard_normal(alg.dim)
    return Element(alg, scale * coeffs)


def subalgebra(
    alg: ItoAlgebra,
    vectors: Sequence,
    labels: Iterable[str] | None = None,
    name: str | None = None,
) -> ItoAlgebra:
    """Restrict the algebra to the span of the given coefficient vectors.

    The span must contain the death and be closed under product and star
    (verified within tol); the induced structure constants are obtained by
    expressing products back in the given spanning vectors.
    """
    rows = []
    for v in vectors:
        vec = v.coeffs if isinstance(v, Element) else np.asarray(v, dtype=complex)
        rows.append(vec.reshape(-1))
    B = np.array(rows, dtype=complex)
    if B.ndim != 2 or B.shape[1] != alg.dim:
        raise AlgebraError("spanning vectors must match the algebra dimension")
    m = B.shape[0]
    if np.linalg.matrix_rank(B, tol=alg.tol * max(1.0, float(np.max(np.abs(B))))) != m:
        raise AlgebraError("spanning vectors are linearly dependent")

    def coords(vec: np.ndarray, what: str) -> np.ndarray:
        sol, *_ = np.linalg.lstsq(B.T, vec, rcond=None)
        if rel_residual(sol @ B, vec) > alg.tol:
            raise AlgebraError(f"span is not closed: {what} falls outside")
        return sol

    mult = np.zeros((m, m, m), dtype=complex)
    for i in range(m):
        for j in range(m):
            prod = np.einsum("p,q,pqk->k", B[i], B[j], alg.mult)
            mult[i, j] = coords(prod, f"product {i}*{j}")
    star_m = np.zeros((m, m), dtype=complex)
    for i in range(m):
        star_m[i] = coords(np.conj(B[i]) @ alg.star, f"star of {i}")
    death = coords(alg.death, "death")
    state = B @ alg.state
    if labels is None:
        labels = [f"b{i}" for i in range(m)]
    return ItoAlgebra(
        labels=tuple(labels),
        mult=mult,
        star=star_m,
        death=death,
        state=state,
        tol=alg.tol,
        name=name,
    )
