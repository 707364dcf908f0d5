"""Orthogonal decomposition into Brownian and Levy components.

Every faithful algebra splits as b + c with b.c = {0}: the Brownian part
collects the zero-mean directions killed by the operator algebra (all their
products fall back into the death line), the Levy part carries the
nondegenerate operator action.  The split is governed by the maximal
orthoprojector P on the representation space annihilated by every i(a) from
both sides; the overlap of the two components is exactly the death line.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AlgebraError, Element, ItoAlgebra, rel_residual
from .gns import FundamentalRep, build_representation

__all__ = ["Decomposition", "DecompositionError", "decompose", "support_projector"]


class DecompositionError(AlgebraError):
    """Preimage residual above tolerance: the split leaves the algebra."""


def support_projector(rep: FundamentalRep) -> np.ndarray:
    """Orthoprojector onto the common null space of all i(a) and i(a)^dag.

    Its complement E = I - P is the support of the operator algebra.  The
    kernel is computed from one stacked SVD rather than iterated
    intersections.
    """
    d = rep.hdim
    if d == 0:
        return np.zeros((0, 0), dtype=complex)
    stack = np.vstack(
        [rep.imats.reshape(-1, d), np.conj(np.transpose(rep.imats, (0, 2, 1))).reshape(-1, d)]
    )
    _, svals, vh = np.linalg.svd(stack)
    top = float(svals[0]) if svals.size else 0.0
    # the floor keeps an all-noise stack (operators that are exactly zero up
    # to rounding) from promoting its own noise to signal
    rank = int(np.sum(svals > rep.algebra.tol * max(top, 1.0)))
    null = vh[rank:].conj().T  # columns spanning the common kernel
    return null @ null.conj().T


@dataclass(frozen=True)
class Decomposition:
    """Brownian/Levy split of a faithful algebra.

    ``brownian`` and ``levy`` both start with the death element; the
    remaining entries span the zero-mean parts.  ``report`` holds the named
    verification residuals.
    """

    algebra: ItoAlgebra
    rep: FundamentalRep
    projector: np.ndarray  # P, Brownian support in the representation space
    support: np.ndarray    # E = I - P
    brownian: tuple[Element, ...]
    levy: tuple[Element, ...]
    report: "DecompositionReport"

    def __post_init__(self):
        self.projector.setflags(write=False)
        self.support.setflags(write=False)

    @property
    def brownian_zero_mean(self) -> tuple[Element, ...]:
        return self.brownian[1:]

    @property
    def levy_zero_mean(self) -> tuple[Element, ...]:
        return self.levy[1:]

    def is_purely_brownian(self) -> bool:
        return len(self.levy) == 1

    def is_purely_levy(self) -> bool:
        return len(self.brownian) == 1

    def to_dict(self) -> dict:
        def vecs(elems):
            return [[[z.real, z.imag] for z in e.coeffs] for e in elems]

        return {
            "labels": list(self.algebra.labels),
            "hdim": self.rep.hdim,
            "projector": [[[z.real, z.imag] for z in row] for row in self.projector],
            "brownian": vecs(self.brownian),
            "levy": vecs(self.levy),
            "report": self.report.to_dict(),
        }


@dataclass(frozen=True)
class DecompositionReport:
    residuals: dict[str, float]
    tol: float

    @property
    def passed(self) -> bool:
        return all(v <= self.tol for v in self.residuals.values())

    def to_dict(self) -> dict:
        return {"passed": self.passed, "tol": self.tol, "residuals": dict(self.residuals)}


def _independent(vectors: list[np.ndarray], tol: float) -> list[int]:
    """Indices of a maximal independent subset, scanning in the given order."""
    kept: list[np.ndarray] = []
    out: list[int] = []
    for idx, v in enumerate(vectors):
        w = v.astype(complex).copy()
        for u in kept:
            w -= (np.conj(u) @ w) * u
        norm = float(np.linalg.norm(w))
        if norm > tol * max(1.0, float(np.linalg.norm(v))):
            kept.append(w / norm)
            out.append(idx)
    return out


def decompose(alg: ItoAlgebra) -> Decomposition:
    """Split the algebra into its Brownian and Levy components.

    For each zero-mean basis element x the representation quadruple is
    projected to (P k(x), kdag(x) P, 0) and its complement, and the parts are
    pulled back through the injective map a -> (l, k, kdag, i).  A preimage
    residual above tol means the projected quadruple leaves the algebra,
    which the decomposition theorem rules out for consistent input.
    """
    rep = build_representation(alg)
    tol = alg.tol
    n, d = alg.dim, rep.hdim
    P = support_projector(rep)
    E = np.eye(d, dtype=complex) - P

    # Injective linear map a -> (l, k, kdag, vec i) as one tall matrix.
    blocks = [alg.state[np.newaxis, :]]
    if d:
        blocks.append(rep.kmat)
        blocks.append(rep.kdmat.T)
        blocks.append(rep.imats.reshape(n, d * d).T)
    A = np.vstack(blocks)

    death = alg.death
    ys: list[np.ndarray] = []
    zs: list[np.ndarray] = []
    resid_preimage = 0.0
    for i in range(n):
        x = np.zeros(n, dtype=complex)
        x[i] = 1.0
        x = x - alg.state[i] * death
        kx = rep.kmat @ x
        kdx = x @ rep.kdmat
        target = np.concatenate(
            [[0.0], P @ kx, (kdx @ P), np.zeros(d * d, dtype=complex)]
        ) if d else np.zeros(1, dtype=complex)
        y, *_ = np.linalg.lstsq(A, target, rcond=None)
        resid_preimage = max(resid_preimage, rel_residual(A @ y, target))
        z = x - y
        ys.append(y)
        zs.append(z)
    if resid_preimage > tol:
        raise DecompositionError(
            f"projected quadruple has no preimage in the algebra (residual {resid_preimage:.3e})"
        )

    y_idx = _independent(ys, tol)
    z_idx = _independent(zs, tol)
    y_basis = [ys[i] for i in y_idx]
    z_basis = [zs[i] for i in z_idx]

    residuals: dict[str, float] = {"preimage": resid_preimage}
    residuals["projector_idempotent"] = rel_residual(P @ P, P)
    residuals["projector_hermitian"] = rel_residual(P, P.conj().T)
    kill = 0.0
    for i in range(n):
        kill = max(kill, rel_residual(rep.imats[i] @ P, np.zeros((d, d))))
        kill = max(kill, rel_residual(P @ rep.imats[i], np.zeros((d, d))))
    residuals["projector_kills_operators"] = kill

    def prod(u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.einsum("p,q,pqk->k", u, v, alg.mult)

    cross = 0.0
    ortho = 0.0
    star_m = alg.star
    for y in y_basis:
        ystar = np.conj(y) @ star_m
        for z in z_basis:
            cross = max(cross, rel_residual(prod(y, z), np.zeros(n)))
            cross = max(cross, rel_residual(prod(z, y), np.zeros(n)))
            ortho = max(ortho, abs(prod(ystar, z) @ alg.state))
            ortho = max(ortho, abs(prod(z, ystar) @ alg.state))
    residuals["cross_products"] = cross
    residuals["orthogonality"] = ortho

    recon = 0.0
    for i in range(n):
        x = np.zeros(n, dtype=complex)
        x[i] = 1.0
        recon = max(recon, rel_residual(alg.state[i] * death + ys[i] + zs[i], x))
    residuals["reconstruction"] = recon

    nilp = 0.0
    for y in y_basis:
        for y2 in y_basis:
            w = prod(y, y2)
            nilp = max(nilp, rel_residual(w, (w @ alg.state) * death))
    residuals["brownian_second_order"] = nilp

    # pi kills products; the Levy zero-mean span must absorb them.
    pi_prod = 0.0
    for i in y_idx + z_idx:
        for j in y_idx + z_idx:
            w = prod(ys[i] + zs[i], ys[j] + zs[j])
            kw = rep.kmat @ w
            pi_prod = max(pi_prod, rel_residual(P @ kw, np.zeros(d)))
    residuals["pi_kills_products"] = pi_prod

    # Levy support: on E H the operator algebra is nondegenerate, and the
    # k-image of the product span matches the Levy k-image (density in
    # finite dimension).
    if d:
        prod_k = []
        xs = [ys[i] + zs[i] for i in range(n)]
        for u in xs:
            for v in xs:
                prod_k.append(rep.kmat @ prod(u, v))
        span_prod = np.array(prod_k).T if prod_k else np.zeros((d, 0))
        span_levy = np.array([rep.kmat @ z for z in z_basis]).T if z_basis else np.zeros((d, 0))
        residuals["levy_k_image"] = _span_gap(span_prod, span_levy, tol)
        if z_basis:
            istack = np.vstack(
                [rep.imats.reshape(-1, d) @ E, np.conj(np.transpose(rep.imats, (0, 2, 1))).reshape(-1, d) @ E]
            )
            svals = np.linalg.svd(istack, compute_uv=False)
            rank_e = int(np.round(np.trace(E).real))
            nondeg = int(np.sum(svals > tol * max(float(svals[0]) if svals.size else 0.0, 1.0)))
            residuals["levy_nondegenerate"] = 0.0 if nondeg >= rank_e else 1.0
        else:
            residuals["levy_nondegenerate"] = 0.0
    else:
        residuals["levy_k_image"] = 0.0
        residuals["levy_nondegenerate"] = 0.0

    # The two spans overlap exactly in the death line.
    if y_basis or z_basis:
        stacked = np.array(y_basis + z_basis)
        rank_sum = np.linalg.matrix_rank(stacked, tol=tol * max(1.0, float(np.max(np.abs(stacked)))))
        residuals["intersection_death_only"] = 0.0 if rank_sum == len(y_basis) + len(z_basis) else 1.0
    else:
        residuals["intersection_death_only"] = 0.0

    report = DecompositionReport(residuals, tol)
    brownian = (Element(alg, death),) + tuple(Element(alg, y) for y in y_basis)
    levy = (Element(alg, death),) + tuple(Element(alg, z) for z in z_basis)
    return Decomposition(alg, rep, P, E, brownian, levy, report)


def _span_gap(span_a: np.ndarray, span_b: np.ndarray, tol: float) -> float:
    """0 when the two column spans coincide (within rank tolerance), else 1."""

    def rank(m: np.ndarray) -> int:
        if m.size == 0:
            return 0
        return int(np.linalg.matrix_rank(m, tol=tol * max(1.0, float(np.max(np.abs(m))))))

    ra, rb = rank(span_a), rank(span_b)
    rab = rank(np.hstack([span_a, span_b]) if span_a.size or span_b.size else span_a)
    return 0.0 if ra == rb == rab else 1.0
