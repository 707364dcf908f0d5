"""Constructors for the standard Ito *-algebras, at finite truncation.

Every constructor returns a verified algebra (the axiom suite is run on the
result and a failure raises).  The death is always basis element 0, labelled
``dt``, and all labels are plain whitespace-free tokens so each algebra
round-trips through the ``.ito`` text format.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Mapping, Sequence

import numpy as np

from .core import AlgebraError, ItoAlgebra, rel_residual, verify_axioms

__all__ = [
    "FiniteGroup",
    "cyclic_group",
    "group_levy",
    "hp",
    "newton",
    "orthogonal_sum",
    "periodic_wiener",
    "poisson",
    "symmetric_group",
    "thermal_brownian",
    "thermal_matrix",
    "wiener",
    "zero_intensity_poisson",
]


def _verified(alg: ItoAlgebra) -> ItoAlgebra:
    report = verify_axioms(alg)
    if not report.passed:
        failed = ", ".join(c.name for c in report.failures())
        raise AlgebraError(f"constructed algebra violates axioms: {failed}")
    return alg


def newton(tol: float = 1e-9) -> ItoAlgebra:
    """One-dimensional algebra of smooth motion: dt^2 = 0, l(dt) = 1."""
    return _verified(
        ItoAlgebra(
            labels=("dt",),
            mult=np.zeros((1, 1, 1)),
            star=np.eye(1),
            death=0,
            state=np.array([1.0]),
            tol=tol,
            name="newton",
        )
    )


def wiener(tol: float = 1e-9) -> ItoAlgebra:
    """Standard Brownian differentials: dw^2 = dt, dw dt = 0 = dt dw."""
    mult = np.zeros((2, 2, 2), dtype=complex)
    mult[1, 1, 0] = 1.0
    return _verified(
        ItoAlgebra(
            labels=("dt", "dw"),
            mult=mult,
            star=np.eye(2),
            death=0,
            state=np.array([1.0, 0.0]),
            tol=tol,
            name="wiener",
        )
    )


def poisson(tol: float = 1e-9) -> ItoAlgebra:
    """Compensated Poisson differentials: dm^2 = dm + dt."""
    mult = np.zeros((2, 2, 2), dtype=complex)
    mult[1, 1, 0] = 1.0
    mult[1, 1, 1] = 1.0
    return _verified(
        ItoAlgebra(
            labels=("dt", "dm"),
            mult=mult,
            star=np.eye(2),
            death=0,
            state=np.array([1.0, 0.0]),
            tol=tol,
            name="poisson",
        )
    )


def zero_intensity_poisson(tol: float = 1e-9) -> ItoAlgebra:
    """Poisson differentials at zero intensity: e^2 = e, l(e) = 0.

    The unique non-faithful case; its faithfulness ideal is the span of e.
    """
    mult = np.zeros((2, 2, 2), dtype=complex)
    mult[1, 1, 1] = 1.0
    return _verified(
        ItoAlgebra(
            labels=("dt", "e"),
            mult=mult,
            star=np.eye(2),
            death=0,
            state=np.array([1.0, 0.0]),
            tol=tol,
            name="zero_intensity_poisson",
        )
    )


def hp(d: int, tol: float = 1e-9) -> ItoAlgebra:
    """Hudson-Parthasarathy algebra of a d-mode quantum noise.

    Basis: dt, annihilators e-^i, creators e+_j and exchange units e^i_j,
    multiplying by composition of the underlying matrix units:

        e-^i . e+_j = delta^i_j dt      e-^i . e^k_j = delta^i_k e-^j
        e^i_j . e+_k = delta^k_j e+_i   e^i_j . e^k_m = delta^k_j e^i_m

    with all other products zero, (e-^i)* = e+_i and (e^i_j)* = e^j_i.
    """
    if d < 1:
        raise AlgebraError("hp requires d >= 1")
    n = 1 + 2 * d + d * d
    if d == 1:
        labels = ["dt", "e-", "e+", "e"]
    else:
        labels = ["dt"]
        labels += [f"e-^{i + 1}" for i in range(d)]
        labels += [f"e+_{j + 1}" for j in range(d)]
        labels += [f"e^{i + 1}_{j + 1}" for i in range(d) for j in range(d)]

    def ann(i):
        return 1 + i

    def cre(j):
        return 1 + d + j

    def exc(i, j):
        return 1 + 2 * d + i * d + j

    mult = np.zeros((n, n, n), dtype=complex)
    for i in range(d):
        mult[ann(i), cre(i), 0] = 1.0
        for j in range(d):
            for k in range(d):
                if i == k:
                    mult[ann(i), exc(k, j), ann(j)] = 1.0
                    mult[exc(j, k), cre(i), cre(j)] = 1.0
                for m in range(d):
                    if j == k:
                        mult[exc(i, j), exc(k, m), exc(i, m)] = 1.0
    star_m = np.zeros((n, n), dtype=complex)
    star_m[0, 0] = 1.0
    for i in range(d):
        star_m[ann(i), cre(i)] = 1.0
        star_m[cre(i), ann(i)] = 1.0
        for j in range(d):
            star_m[exc(i, j), exc(j, i)] = 1.0
    state = np.zeros(n, dtype=complex)
    state[0] = 1.0
    return _verified(
        ItoAlgebra(
            labels=tuple(labels),
            mult=mult,
            star=star_m,
            death=0,
            state=state,
            tol=tol,
            name=f"hp{d}",
        )
    )


def thermal_brownian(rho_plus: float, rho_minus: float, tol: float = 1e-9) -> ItoAlgebra:
    """Quantum Brownian pair at finite temperature.

    Table: dw . dw* = rho_plus dt, dw* . dw = rho_minus dt, squares zero.
    Commutative only when rho_plus == rho_minus; rho_plus = 1, rho_minus = 0
    is the vacuum Brownian pair (the creation/annihilation span inside hp(1)).
    """
    if not rho_plus > 0:
        raise AlgebraError("rho_plus must be positive")
    if rho_minus < 0:
        raise AlgebraError("rho_minus must be nonnegative")
    mult = np.zeros((3, 3, 3), dtype=complex)
    mult[1, 2, 0] = rho_plus
    mult[2, 1, 0] = rho_minus
    star_m = np.zeros((3, 3), dtype=complex)
    star_m[0, 0] = 1.0
    star_m[1, 2] = 1.0
    star_m[2, 1] = 1.0
    return _verified(
        ItoAlgebra(
            labels=("dt", "dw", "dw*"),
            mult=mult,
            star=star_m,
            death=0,
            state=np.array([1.0, 0.0, 0.0]),
            tol=tol,
            name="thermal_brownian",
        )
    )


def periodic_wiener(K: int, rho: Sequence[float], tol: float = 1e-9) -> ItoAlgebra:
    """Finite truncation of the quantum Wiener periodic motion.

    Modes k = +-1..+-K with d_k* = d_{-k} and the self-inverse spectral
    weights rho_{-k} = 1/rho_k; the only nonzero products are
    d_k . d_{-k} = rho_k dt, so the algebra is second-order nilpotent.
    """
    if K < 1:
        raise AlgebraError("K must be >= 1")
    rho = [float(r) for r in rho]
    if len(rho) != K or any(r <= 0 for r in rho):
        raise AlgebraError("rho must contain K positive reals")
    modes = [k + 1 for k in range(K)] + [-(k + 1) for k in range(K)]
    weight = {k + 1: rho[k] for k in range(K)}
    weight.update({-(k + 1): 1.0 / rho[k] for k in range(K)})
    pos = {k: 1 + idx for idx, k in enumerate(modes)}
    n = 1 + 2 * K
    mult = np.zeros((n, n, n), dtype=complex)
    for k in modes:
        mult[pos[k], pos[-k], 0] = weight[k]
    star_m = np.zeros((n, n), dtype=complex)
    star_m[0, 0] = 1.0
    for k in modes:
        star_m[pos[k], pos[-k]] = 1.0
    state = np.zeros(n, dtype=complex)
    state[0] = 1.0
    labels = ("dt",) + tuple(f"d{k}" for k in modes)
    return _verified(
        ItoAlgebra(
            labels=labels,
            mult=mult,
            star=star_m,
            death=0,
            state=state,
            tol=tol,
            name=f"periodic_wiener{K}",
        )
    )


@dataclass(frozen=True)
class FiniteGroup:
    """Finite group as element names plus a Cayley table of indices."""

    names: tuple[str, ...]
    table: np.ndarray  # table[i, j] = index of names[i] * names[j]
    name: str = "group"

    def __post_init__(self):
        table = np.array(self.table, dtype=int)
        n = len(self.names)
        if table.shape != (n, n):
            raise AlgebraError("Cayley table must be square over the element list")
        if table.min() < 0 or table.max() >= n:
            raise AlgebraError("Cayley table entries out of range")
        for g in range(n):
            if len(set(table[g])) != n or len(set(table[:, g])) != n:
                raise AlgebraError("Cayley table rows/columns must be permutations")
        for g in range(n):
            for h in range(n):
                for k in range(n):
                    if table[table[g, h], k] != table[g, table[h, k]]:
                        raise AlgebraError("Cayley table is not associative")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "names", tuple(self.names))
        if self.identity() is None:
            raise AlgebraError("Cayley table has no identity element")
        if self.inverse() is None:
            raise AlgebraError("Cayley table has missing inverses")

    @property
    def order(self) -> int:
        return len(self.names)

    def identity(self) -> int | None:
        for e in range(self.order):
            if all(self.table[e, g] == g == self.table[g, e] for g in range(self.order)):
                return e
        return None

    def inverse(self) -> np.ndarray | None:
        e = self.identity()
        inv = np.full(self.order, -1, dtype=int)
        for g in range(self.order):
            hits = np.where(self.table[g] == e)[0]
            if hits.size != 1 or self.table[hits[0], g] != e:
                return None
            inv[g] = hits[0]
        return inv


def cyclic_group(n: int) -> FiniteGroup:
    if n < 1:
        raise AlgebraError("cyclic group order must be >= 1")
    table = np.add.outer(np.arange(n), np.arange(n)) % n
    return FiniteGroup(tuple(f"g{i}" for i in range(n)), table, name=f"z{n}")


def symmetric_group(n: int) -> FiniteGroup:
    """Symmetric group S_n with elements named by one-line notation."""
    if not 1 <= n <= 5:
        raise AlgebraError("symmetric_group supports 1 <= n <= 5")
    perms = sorted(permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    m = len(perms)
    table = np.zeros((m, m), dtype=int)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            comp = tuple(p[q[k]] for k in range(n))
            table[i, j] = index[comp]
    names = tuple("p" + "".join(str(v) for v in p) for p in perms)
    return FiniteGroup(names, table, name=f"s{n}")


def group_levy(
    group: FiniteGroup,
    lam: Mapping[str, complex] | Sequence[complex] | None = None,
    tol: float = 1e-9,
) -> ItoAlgebra:
    """Quantum compensated Poisson motion over a finite group.

    Table: d_g . d_h = lam_{gh} dt + d_{gh} with d_g* = d_{g^-1}.  The weight
    function must satisfy lam_{g^-1} = conj(lam_g), be self-inverse under
    convolution (sum_h conj(lam_{g h^-1}) lam_h = delta_{g,identity}) and
    induce a positive semidefinite Gram form [lam_{g^-1 h}].  The default is
    the delta function at the identity.
    """
    m = group.order
    e = group.identity()
    inv = group.inverse()
    if lam is None:
        lam_vec = np.zeros(m, dtype=complex)
        lam_vec[e] = 1.0
    elif isinstance(lam, Mapping):
        lam_vec = np.zeros(m, dtype=complex)
        for key, val in lam.items():
            try:
                lam_vec[group.names.index(key)] = complex(val)
            except ValueError:
                raise AlgebraError(f"unknown group element {key!r}") from None
    else:
        lam_vec = np.asarray(list(lam), dtype=complex)
        if lam_vec.shape != (m,):
            raise AlgebraError("lam must assign one value per group element")

    if rel_residual(lam_vec[inv], np.conj(lam_vec)) > tol:
        raise AlgebraError("lam violates the star symmetry lam(g^-1) = conj(lam(g))")
    conv = np.zeros(m, dtype=complex)
    for g in range(m):
        conv[g] = sum(np.conj(lam_vec[group.table[g, inv[h]]]) * lam_vec[h] for h in range(m))
    delta = np.zeros(m, dtype=complex)
    delta[e] = 1.0
    if rel_residual(conv, delta) > tol:
        raise AlgebraError("lam is not self-inverse under convolution")
    gram = np.array([[lam_vec[group.table[inv[g], h]] for h in range(m)] for g in range(m)])
    eigs = np.linalg.eigvalsh((gram + gram.conj().T) / 2.0)
    if eigs.size and eigs[0] < -tol * max(1.0, float(np.max(np.abs(eigs)))):
        raise AlgebraError("lam is not positive definite on the group")

    n = 1 + m
    mult = np.zeros((n, n, n), dtype=complex)
    for g in range(m):
        for h in range(m):
            gh = group.table[g, h]
            mult[1 + g, 1 + h, 0] = lam_vec[gh]
            mult[1 + g, 1 + h, 1 + gh] += 1.0
    star_m = np.zeros((n, n), dtype=complex)
    star_m[0, 0] = 1.0
    for g in range(m):
        star_m[1 + g, 1 + inv[g]] = 1.0
    state = np.zeros(n, dtype=complex)
    state[0] = 1.0
    labels = ("dt",) + tuple(f"d_{name}" for name in group.names)
    return _verified(
        ItoAlgebra(
            labels=labels,
            mult=mult,
            star=star_m,
            death=0,
            state=state,
            tol=tol,
            name=f"group_levy_{group.name}",
        )
    )


def thermal_matrix(n: int, rho: Sequence[float], tol: float = 1e-9) -> ItoAlgebra:
    """Thermal Levy motion over the full matrix algebra with diagonal weights.

    Basis: dt plus the matrix units x_pq; the weighted trace
    <xi|zeta> = tr(diag(rho) xi^dag zeta) supplies the dt part of products:

        x_pq . x_rs = delta_qr (rho_p delta_ps dt + x_ps)

    with (x_pq)* = x_qp.  Every nonzero zero-mean element has l(a* . a) > 0.
    """
    if n < 1:
        raise AlgebraError("n must be >= 1")
    rho = [float(r) for r in rho]
    if len(rho) != n or any(r <= 0 for r in rho):
        raise AlgebraError("rho must contain n positive reals")
    dim = 1 + n * n

    def unit(p, q):
        return 1 + p * n + q

    mult = np.zeros((dim, dim, dim), dtype=complex)
    for p in range(n):
        for q in range(n):
            for s in range(n):
                mult[unit(p, q), unit(q, s), unit(p, s)] += 1.0
            mult[unit(p, q), unit(q, p), 0] += rho[p]
    star_m = np.zeros((dim, dim), dtype=complex)
    star_m[0, 0] = 1.0
    for p in range(n):
        for q in range(n):
            star_m[unit(p, q), unit(q, p)] = 1.0
    state = np.zeros(dim, dtype=complex)
    state[0] = 1.0
    labels = ("dt",) + tuple(f"x{p + 1}{q + 1}" for p in range(n) for q in range(n))
    return _verified(
        ItoAlgebra(
            labels=labels,
            mult=mult,
            star=star_m,
            death=0,
            state=state,
            tol=tol,
            name=f"thermal_matrix{n}",
        )
    )


def _zero_mean_basis(alg: ItoAlgebra) -> list[np.ndarray]:
    """Independent spanning set of {a_i - l(a_i) d} in basis-index order."""
    vectors: list[np.ndarray] = []
    kept: list[np.ndarray] = []
    for i in range(alg.dim):
        v = np.zeros(alg.dim, dtype=complex)
        v[i] = 1.0
        v = v - alg.state[i] * alg.death
        w = v.copy()
        for u in kept:
            w = w - (np.conj(u) @ w) * u
        norm = np.linalg.norm(w)
        if norm > alg.tol * max(1.0, float(np.linalg.norm(v))):
            kept.append(w / norm)
            vectors.append(v)
    return vectors


def orthogonal_sum(a1: ItoAlgebra, a2: ItoAlgebra, tol: float | None = None) -> ItoAlgebra:
    """Orthogonal sum sharing the death: all cross products vanish.

    The zero-mean parts of the summands are placed side by side; products,
    star and state act blockwise with the dt contribution redirected to the
    shared death.
    """
    tol = max(a1.tol, a2.tol) if tol is None else tol
    zm1 = _zero_mean_basis(a1)
    zm2 = _zero_mean_basis(a2)
    n = 1 + len(zm1) + len(zm2)

    labels = ["dt"]
    used = {"dt"}
    for alg, zm in ((a1, zm1), (a2, zm2)):
        for v in zm:
            lead = int(np.argmax(np.abs(v)))
            base = alg.labels[lead]
            lab = base
            suffix = 1
            while lab in used:
                suffix += 1
                lab = f"{base}_{suffix}"
            used.add(lab)
            labels.append(lab)

    def block(alg: ItoAlgebra, zm: list[np.ndarray], offset: int, mult, star_m):
        span = np.array(zm) if zm else np.zeros((0, alg.dim), dtype=complex)

        def coords(vec: np.ndarray, what: str) -> np.ndarray:
            mean = vec @ alg.state
            rest = vec - mean * alg.death
            if span.shape[0]:
                sol, *_ = np.linalg.lstsq(span.T, rest, rcond=None)
                recon = sol @ span
            else:
                sol = np.zeros(0, dtype=complex)
                recon = np.zeros_like(rest)
            if rel_residual(recon, rest) > tol:
                raise AlgebraError(f"zero-mean span is not closed under {what}")
            out = np.zeros(n, dtype=complex)
            out[0] = mean
            out[offset : offset + len(zm)] = sol
            return out

        for i, vi in enumerate(zm):
            for j, vj in enumerate(zm):
                prod = np.einsum("p,q,pqk->k", vi, vj, alg.mult)
                mult[offset + i, offset + j] = coords(prod, "multiplication")
            star_m[offset + i] = coords(np.conj(vi) @ alg.star, "star")

    mult = np.zeros((n, n, n), dtype=complex)
    star_m = np.zeros((n, n), dtype=complex)
    star_m[0, 0] = 1.0
    block(a1, zm1, 1, mult, star_m)
    block(a2, zm2, 1 + len(zm1), mult, star_m)
    state = np.zeros(n, dtype=complex)
    state[0] = 1.0
    name = f"{a1.name or 'a'}+{a2.name or 'b'}"
    return _verified(
        ItoAlgebra(
            labels=tuple(labels),
            mult=mult,
            star=star_m,
            death=0,
            state=state,
            tol=tol,
            name=name,
        )
    )
