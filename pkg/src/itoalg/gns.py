"""Canonical triangular representation of a faithful Ito *-algebra.

The state factors through a Hilbert space: the Gram matrix
``H[i,j] = l(a_i* . a_j)`` is diagonalized, its numerically positive
eigenspace is the representation space, and each basis element receives the
quadruple ``(l, k, kdag, i)`` with

    l(a . b) = kdag(a) k(b)        k(a . b) = i(a) k(b)
    kdag(a) = k(a*)^dag            i(a*) = i(a)^dag

The quadruple fills the triangular matrix [[0, kdag, l], [0, i, k], [0, 0, 0]]
on the complex Minkowski space C + H + C, where the involution becomes
M -> G M^dag G for the metric G that swaps the corner coordinates.

The representation is unique only up to unitaries on the middle block; this
module pins one representative: eigenbasis ordered by descending eigenvalue,
degeneracies aligned to the lowest contributing basis index, phases chosen to
make each eigenvector's largest component real positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import AlgebraError, Element, ItoAlgebra, gram_matrix, rel_residual, verify_axioms
from .ideal import faithfulness_ideal

__all__ = [
    "BStarReport",
    "FundamentalRep",
    "NonFaithfulError",
    "RepresentationError",
    "Seminorms",
    "build_representation",
    "minkowski_adjoint",
    "minkowski_metric",
    "seminorms",
    "triangular",
    "verify_bstar",
]


class RepresentationError(AlgebraError):
    """Structure constants inconsistent with a representation (axioms violated upstream)."""


class NonFaithfulError(AlgebraError):
    """Algebra has a nontrivial faithfulness ideal; quotient it first."""


@dataclass(frozen=True, eq=False)
class FundamentalRep:
    """Canonical quadruple per basis element plus the Gram factorization data.

    kmat[:, i] is k(a_i); kdmat[i, :] is the covector kdag(a_i); imats[i] is
    the operator i(a_i) on the hdim-dimensional representation space.
    ``eigenvalues``/``vectors`` record the kept Gram eigenpairs used for the
    basis change, for reproducibility.
    """

    algebra: ItoAlgebra
    hdim: int
    kmat: np.ndarray       # (hdim, n)
    kdmat: np.ndarray      # (n, hdim)
    imats: np.ndarray      # (n, hdim, hdim)
    eigenvalues: np.ndarray
    vectors: np.ndarray    # (n, hdim) kept eigenvectors as columns

    def __post_init__(self):
        for arr in (self.kmat, self.kdmat, self.imats, self.eigenvalues, self.vectors):
            arr.setflags(write=False)

    def _coeffs(self, a: Element | np.ndarray) -> np.ndarray:
        if isinstance(a, Element):
            if a.algebra.dim != self.algebra.dim:
                raise AlgebraError("element does not belong to the represented algebra")
            return a.coeffs
        return np.asarray(a, dtype=complex)

    def l_of(self, a) -> complex:
        return complex(self._coeffs(a) @ self.algebra.state)

    def k_of(self, a) -> np.ndarray:
        return self.kmat @ self._coeffs(a)

    def kdag_of(self, a) -> np.ndarray:
        return self._coeffs(a) @ self.kdmat

    def i_of(self, a) -> np.ndarray:
        return np.einsum("p,pxy->xy", self._coeffs(a), self.imats)

    def quadruple(self, a) -> tuple[complex, np.ndarray, np.ndarray, np.ndarray]:
        return self.l_of(a), self.k_of(a), self.kdag_of(a), self.i_of(a)


class Seminorms(NamedTuple):
    """The four seminorms (operator, plus, minus, corner) of an element."""

    op: float
    plus: float
    minus: float
    corner: float


def _pin_eigenbasis(H: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Kept eigenpairs of a Hermitian PSD matrix under the pinned conventions."""
    evals, evecs = np.linalg.eigh(H)
    top = float(evals[-1]) if evals.size else 0.0
    if top <= 0:
        return np.zeros(0), np.zeros((H.shape[0], 0), dtype=complex)
    cutoff = tol * top
    keep = evals > cutoff
    evals = evals[keep][::-1]
    evecs = evecs[:, keep][:, ::-1]

    # Within a degenerate group, realign to standard basis directions in
    # index order so the output does not depend on LAPACK's arbitrary choice.
    out_vals, out_vecs = [], []
    start = 0
    while start < evals.size:
        stop = start + 1
        while stop < evals.size and abs(evals[stop] - evals[start]) <= cutoff:
            stop += 1
        block = evecs[:, start:stop]
        if stop - start > 1:
            proj = block @ block.conj().T
            chosen: list[np.ndarray] = []
            for i in range(H.shape[0]):
                v = proj[:, i].copy()
                for u in chosen:
                    v -= (np.conj(u) @ v) * u
                norm = float(np.linalg.norm(v))
                if norm > np.sqrt(cutoff / max(top, 1.0)) and len(chosen) < stop - start:
                    chosen.append(v / norm)
            if len(chosen) == stop - start:
                block = np.array(chosen).T
        for col in range(block.shape[1]):
            v = block[:, col]
            lead = int(np.argmax(np.abs(v)))
            phase = v[lead]
            if abs(phase) > 0:
                v = v * (np.conj(phase) / abs(phase))
            out_vals.append(evals[start + col])
            out_vecs.append(v)
        start = stop
    V = np.array(out_vecs).T if out_vecs else np.zeros((H.shape[0], 0), dtype=complex)
    return np.array(out_vals), V


def build_representation(alg: ItoAlgebra) -> FundamentalRep:
    """Kolmogorov/GNS construction of the canonical quadruple.

    Requires the axioms to pass and the faithfulness ideal to be trivial;
    a covariance residual above tol signals inconsistent structure constants
    and raises rather than warns.
    """
    report = verify_axioms(alg)
    if not report.passed:
        failed = ", ".join(c.name for c in report.failures())
        raise RepresentationError(f"axioms fail: {failed}")
    ideal = faithfulness_ideal(alg)
    if not ideal.is_trivial:
        raise NonFaithfulError(
            f"faithfulness ideal has dimension {ideal.dim}; factor it out with quotient() first"
        )

    n, tol = alg.dim, alg.tol
    H = gram_matrix(alg)
    Hh = (H + H.conj().T) / 2.0
    evals, V = _pin_eigenbasis(Hh, tol)
    hdim = V.shape[1]
    K = (np.sqrt(evals)[:, None] * V.conj().T) if hdim else np.zeros((0, n), dtype=complex)

    imats = np.zeros((n, hdim, hdim), dtype=complex)
    for i in range(n):
        KP = K @ alg.mult[i].T  # column j = k(a_i . a_j)
        if hdim:
            sol, *_ = np.linalg.lstsq(K.T, KP.T, rcond=None)
            imats[i] = sol.T
            if rel_residual(imats[i] @ K, KP) > tol:
                raise RepresentationError(
                    f"GNS covariance residual above tolerance for basis element {alg.labels[i]}"
                )
    kdmat = (np.conj(alg.star @ K.T) if hdim else np.zeros((n, 0), dtype=complex))

    rep = FundamentalRep(
        algebra=alg,
        hdim=hdim,
        kmat=K,
        kdmat=kdmat.reshape(n, hdim),
        imats=imats,
        eigenvalues=evals,
        vectors=V,
    )
    _validate(rep)
    return rep


def _validate(rep: FundamentalRep) -> None:
    alg = rep.algebra
    tol, n = alg.tol, alg.dim
    L2 = np.einsum("ijk,k->ij", alg.mult, alg.state)
    if rel_residual(rep.kdmat @ rep.kmat, L2) > tol:
        raise RepresentationError("Kolmogorov identity fails")
    star_i = np.einsum("ik,kxy->ixy", alg.star, rep.imats)
    if rel_residual(star_i, np.conj(np.transpose(rep.imats, (0, 2, 1)))) > tol:
        raise RepresentationError("i(a*) is not the adjoint of i(a)")
    if rel_residual(rep.k_of(alg.death), np.zeros(rep.hdim)) > tol:
        raise RepresentationError("k(death) is nonzero")
    if rel_residual(rep.i_of(alg.death), np.zeros((rep.hdim, rep.hdim))) > tol:
        raise RepresentationError("i(death) is nonzero")
    if abs(rep.l_of(alg.death) - 1.0) > tol:
        raise RepresentationError("l(death) is not 1")


def minkowski_metric(hdim: int) -> np.ndarray:
    """Metric swapping the two corner coordinates, identity in between."""
    G = np.zeros((hdim + 2, hdim + 2), dtype=complex)
    G[0, -1] = 1.0
    G[-1, 0] = 1.0
    if hdim:
        G[1:-1, 1:-1] = np.eye(hdim)
    return G


def triangular(rep: FundamentalRep, a: Element | np.ndarray) -> np.ndarray:
    """Triangular matrix [[0, kdag(a), l(a)], [0, i(a), k(a)], [0, 0, 0]].

    Rows and columns are ordered (-, middle block, +); the map is a
    homomorphism for the ordinary matrix product, and the corner entry
    recovers l(a).
    """
    l, k, kdag, imat = rep.quadruple(a)
    d = rep.hdim
    M = np.zeros((d + 2, d + 2), dtype=complex)
    M[0, 1 : d + 1] = kdag
    M[0, d + 1] = l
    M[1 : d + 1, 1 : d + 1] = imat
    M[1 : d + 1, d + 1] = k
    return M


def minkowski_adjoint(M: np.ndarray) -> np.ndarray:
    """Adjoint with respect to the Minkowski metric: G M^dag G.

    Sends triangular(a) to triangular(a*); it is an involution since G^2 = I.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 2:
        raise AlgebraError("expected a square matrix of triangular-representation shape")
    G = minkowski_metric(M.shape[0] - 2)
    return G @ M.conj().T @ G


def seminorms(rep: FundamentalRep, a: Element | np.ndarray) -> Seminorms:
    """Four seminorms (|i(a)|_op, l(a*.a)^1/2, l(a.a*)^1/2, |l(a)|)."""
    coeffs = rep._coeffs(a)
    alg = rep.algebra
    elem = Element(alg, coeffs)
    astar = elem.star()
    op = float(np.linalg.norm(rep.i_of(coeffs), 2)) if rep.hdim else 0.0
    plus = float(np.sqrt(max((astar * elem).state().real, 0.0)))
    minus = float(np.sqrt(max((elem * astar).state().real, 0.0)))
    corner = abs(elem.state())
    return Seminorms(op, plus, minus, corner)


@dataclass(frozen=True)
class BStarReport:
    """Worst residuals of the B*-algebra identities over the sampled elements."""

    residuals: dict[str, float]
    tol: float
    samples: int
    seed: int | None

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.residuals.values())

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "tol": self.tol,
            "samples": self.samples,
            "seed": self.seed,
            "residuals": dict(self.residuals),
        }


def verify_bstar(
    rep: FundamentalRep,
    samples: list[Element] | None = None,
    count: int = 100,
    seed: int = 0,
    tol: float | None = None,
) -> BStarReport:
    """Check the star symmetries, submultiplicativity and the two B*-equalities.

    Equalities are |lhs - rhs| relative to scale; inequalities contribute only
    their violation beyond tol-scale slack.
    """
    alg = rep.algebra
    tol = alg.tol if tol is None else tol
    rng = None
    if samples is None:
        rng = np.random.default_rng(seed)
        samples = [
            Element(alg, rng.standard_normal(alg.dim) + 1j * rng.standard_normal(alg.dim))
            for _ in range(count)
        ]
    worst: dict[str, float] = {
        "star_op": 0.0,
        "star_plus_minus": 0.0,
        "star_corner": 0.0,
        "sub_op_op": 0.0,
        "sub_op_plus": 0.0,
        "sub_minus_op": 0.0,
        "sub_corner": 0.0,
        "cstar_equality": 0.0,
        "corner_equality": 0.0,
    }

    def eq_resid(lhs: float, rhs: float) -> float:
        return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))

    def ineq_resid(lhs: float, rhs: float) -> float:
        return max(0.0, lhs - rhs) / max(1.0, abs(lhs), abs(rhs))

    pairs = list(zip(samples, samples[1:] + samples[:1]))
    for a, c in pairs:
        astar = a.star()
        na = seminorms(rep, a)
        ns = seminorms(rep, astar)
        nc = seminorms(rep, c)
        worst["star_op"] = max(worst["star_op"], eq_resid(ns.op, na.op))
        worst["star_plus_minus"] = max(worst["star_plus_minus"], eq_resid(ns.plus, na.minus))
        worst["star_corner"] = max(worst["star_corner"], eq_resid(ns.corner, na.corner))

        nac = seminorms(rep, a * c)
        worst["sub_op_op"] = max(worst["sub_op_op"], ineq_resid(nac.op, na.op * nc.op))
        worst["sub_op_plus"] = max(worst["sub_op_plus"], ineq_resid(nac.plus, na.op * nc.plus))
        worst["sub_minus_op"] = max(worst["sub_minus_op"], ineq_resid(nac.minus, na.minus * nc.op))
        worst["sub_corner"] = max(worst["sub_corner"], ineq_resid(nac.corner, na.minus * nc.plus))

        naa = seminorms(rep, a * astar)
        worst["cstar_equality"] = max(worst["cstar_equality"], eq_resid(naa.op, na.op * ns.op))
        worst["corner_equality"] = max(
            worst["corner_equality"], eq_resid(naa.corner, na.minus * ns.plus)
        )
    return BStarReport(worst, tol, len(samples), seed if rng is not None else None)
