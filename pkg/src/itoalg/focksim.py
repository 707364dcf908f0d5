"""Stochastic cross-validation of the algebraic multiplication tables.

Two independent routes back to the tables:

* a discrete Fock model: one slot space C + H per time step, with the
  increment of an element acting on its slot as
  [[l(a) dt, kdag(a) sqrt(dt)], [k(a) sqrt(dt), i(a)]].  Products of slot
  increments reproduce the table up to corrections of order dt^2 (corner),
  dt^(3/2) (creation/annihilation blocks) and dt (exchange block), and the
  vacuum mean of the summed process is l(a) t exactly, for every slot count.

* a classical Monte Carlo sampler for commutative algebras assembled from
  Wiener, Poisson and smooth parts, comparing E[dx dy]/dt against l(x.y).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .core import AlgebraError, Element, ItoAlgebra, commutant_check, rel_residual
from .decomp import decompose
from .gns import FundamentalRep

__all__ = [
    "Estimate",
    "MemoryCapError",
    "SimReport",
    "SimulationError",
    "SlotIncrement",
    "UnsupportedModelError",
    "classical_paths",
    "fit_loglog_slope",
    "ito_product_check",
    "slot_increment",
    "vacuum_moments",
]

STATE_VECTOR_CAP = 2**20  # complex amplitudes a simulation may materialize


class SimulationError(AlgebraError):
    """Discrete model disagrees with its closed form; indicates broken input."""


class MemoryCapError(AlgebraError):
    """Requested slot count would exceed the configured state-vector cap."""


class UnsupportedModelError(AlgebraError):
    """Classical sampling asked for an algebra outside the supported families."""


@dataclass(frozen=True)
class SlotIncrement:
    """Increment of one element on a single time-slot space C + H."""

    matrix: np.ndarray
    dt: float

    @property
    def vacuum_expectation(self) -> complex:
        return complex(self.matrix[0, 0])

    def adjoint(self) -> "SlotIncrement":
        return SlotIncrement(self.matrix.conj().T, self.dt)


@dataclass
class Estimate:
    name: str
    value: complex
    stderr: float | None = None
    target: complex | None = None

    def _num(self, z):
        if z is None:
            return None
        z = complex(z)
        return z.real if z.imag == 0.0 else [z.real, z.imag]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self._num(self.value),
            "stderr": self.stderr,
            "target": self._num(self.target),
        }


@dataclass
class SimReport:
    kind: str
    inputs: dict
    seed: int | None
    estimates: list[Estimate]
    slopes: dict[str, float] = field(default_factory=dict)
    runtime_ms: float = 0.0

    def estimate(self, name: str) -> Estimate:
        for e in self.estimates:
            if e.name == name:
                return e
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "inputs": self.inputs,
            "seed": self.seed,
            "estimates": [e.to_dict() for e in self.estimates],
            "slopes": {k: v for k, v in self.slopes.items()},
            "runtime_ms": self.runtime_ms,
        }


def fit_loglog_slope(xs, ys, floor: float = 1e-13) -> float | None:
    """Least-squares slope of log(y) against log(x), ignoring values below floor."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    mask = ys > floor
    if int(mask.sum()) < 2:
        return None
    lx, ly = np.log(xs[mask]), np.log(ys[mask])
    slope = np.polyfit(lx, ly, 1)[0]
    return float(slope)


def slot_increment(rep: FundamentalRep, a: Element | np.ndarray, dt: float) -> SlotIncrement:
    """Block matrix [[l dt, kdag sqrt(dt)], [k sqrt(dt), i]] of the element.

    Linear in the element; the adjoint matrix is the increment of the starred
    element (sqrt(dt) for the field blocks, dt for the scalar, 1 for the
    exchange block).
    """
    if not dt > 0:
        raise AlgebraError("dt must be positive")
    l, k, kdag, imat = rep.quadruple(a)
    d = rep.hdim
    M = np.zeros((1 + d, 1 + d), dtype=complex)
    root = np.sqrt(dt)
    M[0, 0] = l * dt
    if d:
        M[0, 1:] = kdag * root
        M[1:, 0] = k * root
        M[1:, 1:] = imat
    return SlotIncrement(M, dt)


def ito_product_check(rep, a: Element, b: Element, dts) -> SimReport:
    """Blockwise mismatch of increment(a) increment(b) against increment(a.b).

    The corner mismatch is |l(a)l(b)| dt^2, the creation/annihilation blocks
    scale as dt^(3/2) and the exchange block as dt; log-log slopes of the
    recorded norms are fitted per block.
    """
    start = time.perf_counter()
    dts = [float(x) for x in dts]
    if not dts or any(x <= 0 for x in dts):
        raise AlgebraError("dt list must contain positive values")
    if any(x2 >= x1 for x1, x2 in zip(dts, dts[1:])):
        raise AlgebraError("dt list must be strictly decreasing")

    la, ka = rep.l_of(a), rep.k_of(a)
    lb, kdb = rep.l_of(b), rep.kdag_of(b)
    ab = a * b
    lab = rep.l_of(ab)

    names = ("corner", "creation", "annihilation", "exchange")
    records = {name: [] for name in names}
    estimates: list[Estimate] = []
    for dt in dts:
        Ma = slot_increment(rep, a, dt).matrix
        Mb = slot_increment(rep, b, dt).matrix
        Mab = slot_increment(rep, ab, dt).matrix
        D = Ma @ Mb - Mab
        corner = abs(D[0, 0])
        creation = float(np.linalg.norm(D[1:, 0]))
        annihilation = float(np.linalg.norm(D[0, 1:]))
        exchange = float(np.linalg.norm(D[1:, 1:]))

        targets = {
            "corner": abs(la * lb) * dt**2,
            "creation": abs(lb) * float(np.linalg.norm(ka)) * dt**1.5,
            "annihilation": abs(la) * float(np.linalg.norm(kdb)) * dt**1.5,
            "exchange": float(np.linalg.norm(np.outer(ka, kdb))) * dt,
        }
        values = {
            "corner": corner,
            "creation": creation,
            "annihilation": annihilation,
            "exchange": exchange,
        }
        scale = max(1.0, float(np.max(np.abs(Ma))), float(np.max(np.abs(Mb))))
        for name in names:
            records[name].append(values[name])
            if abs(values[name] - targets[name]) > rep.algebra.tol * scale:
                raise SimulationError(
                    f"{name} mismatch deviates from its closed form at dt={dt}"
                )
            estimates.append(
                Estimate(f"{name}_mismatch[dt={dt:g}]", values[name], None, targets[name])
            )
        if abs(complex(D[0, 0]) - la * lb * dt**2) > rep.algebra.tol * scale:
            raise SimulationError("corner of the product is not l(a.b) dt + l(a)l(b) dt^2")

    slopes = {}
    for name in names:
        slope = fit_loglog_slope(dts, records[name])
        if slope is not None:
            slopes[name] = slope
    return SimReport(
        kind="ito_product_check",
        inputs={"dts": dts, "a": str(a), "b": str(b)},
        seed=None,
        estimates=estimates,
        slopes=slopes,
        runtime_ms=(time.perf_counter() - start) * 1e3,
    )


def vacuum_moments(
    rep: FundamentalRep,
    a: Element,
    t: float,
    n_slots: int,
    memory_cap: int = STATE_VECTOR_CAP,
) -> SimReport:
    """Moments of the summed slot process on N slots in the vacuum.

    The process applied to the vacuum only populates the zero-, one- and
    two-particle sectors, so those amplitudes are the state vector; the full
    tensor space is never materialized.  The mean is l(a) t exactly for every
    N; the second moment is l(a*.a) t + |l(a) t|^2; the fourth moment
    <(X^dag X)^2> carries the O(1/N) discretization error and is reported
    with its large-N limit.
    """
    start = time.perf_counter()
    if not t > 0:
        raise AlgebraError("t must be positive")
    if n_slots < 1:
        raise AlgebraError("n_slots must be >= 1")
    d = rep.hdim
    sector_entries = 1 + n_slots * max(d, 1) + (n_slots * max(d, 1)) ** 2
    if sector_entries > memory_cap:
        raise MemoryCapError(
            f"{n_slots} slots at hdim {d} needs {sector_entries} amplitudes, cap {memory_cap}"
        )
    dt = t / n_slots
    root = np.sqrt(dt)
    N = n_slots

    l_a, k_a, _, _ = rep.quadruple(a)
    astar = a.star()
    l_s, k_s, kd_s, i_s = rep.quadruple(astar)

    # One application to the vacuum: alpha |vac> + sum_j |V1[j] at slot j>.
    alpha1 = N * l_a * dt
    V1 = np.tile(root * k_a, (N, 1)) if d else np.zeros((N, 0), dtype=complex)
    mean = alpha1
    second = abs(alpha1) ** 2 + float(np.sum(np.abs(V1) ** 2))

    # Second application, with the starred element.
    alpha2 = alpha1 * N * l_s * dt
    if d:
        alpha2 += root * complex(np.sum(V1 @ kd_s))
    V2 = np.zeros_like(V1)
    if d:
        for j in range(N):
            V2[j] = alpha1 * root * k_s + i_s @ V1[j] + (N - 1) * dt * l_s * V1[j]
    pair_norm_sq = 0.0
    if d and N > 1:
        # All slots carry the same one-particle vector, so every unordered
        # pair contributes the same two-particle amplitude.
        pair = root * (np.outer(k_s, V1[0]) + np.outer(V1[0], k_s))
        pair_norm_sq = (N * (N - 1) / 2) * float(np.sum(np.abs(pair) ** 2))
    fourth = abs(alpha2) ** 2 + float(np.sum(np.abs(V2) ** 2)) + pair_norm_sq

    lt = l_a * t
    second_target = complex((astar * a).state()) * t
    norm_ka = float(np.linalg.norm(k_a)) if d else 0.0
    norm_ks = float(np.linalg.norm(k_s)) if d else 0.0
    if d:
        v_inf = lt * k_s + np.conj(l_a) * t * k_a + i_s @ k_a
        overlap = complex(np.vdot(k_s, k_a))
        fourth_limit = (
            (abs(lt) ** 2 + t * norm_ka**2) ** 2
            + t * float(np.linalg.norm(v_inf)) ** 2
            + t**2 * (norm_ks**2 * norm_ka**2 + abs(overlap) ** 2)
        )
    else:
        fourth_limit = abs(lt) ** 4

    estimates = [
        Estimate("mean", mean, None, lt),
        Estimate("second_moment", second, None, second_target),
        Estimate("second_moment_deviation", second - second_target, None, None),
        Estimate("fourth_moment", fourth, None, fourth_limit),
        Estimate("fourth_moment_deviation", fourth - fourth_limit, None, None),
    ]
    return SimReport(
        kind="vacuum_moments",
        inputs={"t": t, "n_slots": n_slots, "element": str(a)},
        seed=None,
        estimates=estimates,
        slopes={},
        runtime_ms=(time.perf_counter() - start) * 1e3,
    )


def _component_label(alg: ItoAlgebra, vec: np.ndarray, fallback: str) -> str:
    support = np.where(np.abs(vec) > alg.tol * max(1.0, float(np.max(np.abs(vec)))))[0]
    if support.size == 1 and abs(vec[support[0]] - 1.0) <= alg.tol:
        return alg.labels[support[0]]
    return fallback


def classical_paths(
    alg: ItoAlgebra,
    t: float,
    dt: float,
    n_paths: int,
    seed: int,
) -> SimReport:
    """Sample classical increments and compare moments against the table.

    Supported inputs are the commutative algebras assembled from Wiener,
    Poisson and smooth components (detected through the decomposition):
    Gaussian increments of variance dt drive the Brownian part, compensated
    Poisson jumps with intensity read from the state drive the Levy part.
    """
    start = time.perf_counter()
    if not commutant_check(alg):
        raise UnsupportedModelError("classical sampling needs a commutative algebra")
    if not (t > 0 and 0 < dt <= t):
        raise AlgebraError("need 0 < dt <= t")
    if n_paths < 2:
        raise AlgebraError("need at least two paths for moment estimates")
    dec = decompose(alg)
    tol = alg.tol

    def selfadjoint(e: Element) -> np.ndarray:
        if rel_residual(e.star().coeffs, e.coeffs) > tol:
            raise UnsupportedModelError(
                "component basis is not self-adjoint; no real classical driver"
            )
        return e.coeffs

    brown = [selfadjoint(e) for e in dec.brownian_zero_mean]
    levy = [selfadjoint(e) for e in dec.levy_zero_mean]

    def prod(u, v):
        return np.einsum("p,q,pqk->k", u, v, alg.mult)

    nb, nz = len(brown), len(levy)
    cov = np.zeros((nb, nb))
    for i, y in enumerate(brown):
        for j, y2 in enumerate(brown):
            val = complex(prod(y, y2) @ alg.state)
            if abs(val.imag) > tol:
                raise UnsupportedModelError("Brownian covariance is not real")
            cov[i, j] = val.real
    try:
        chol = np.linalg.cholesky(cov + np.eye(nb) * tol) if nb else np.zeros((0, 0))
    except np.linalg.LinAlgError as exc:
        raise UnsupportedModelError("Brownian covariance is not positive") from exc

    jump_size = np.zeros(nz)
    intensity = np.zeros(nz)
    for j, z in enumerate(levy):
        w = prod(z, z)
        c2 = complex(w @ alg.state)
        rest = w - c2 * alg.death
        denom = float(np.vdot(z, z).real)
        c1 = complex(np.vdot(z, rest)) / denom
        if rel_residual(c1 * z + c2 * alg.death, w) > tol:
            raise UnsupportedModelError("Levy component is not of single-jump type")
        if abs(c1.imag) > tol or c1.real <= tol or abs(c2.imag) > tol or c2.real <= tol:
            raise UnsupportedModelError("Levy component has no positive jump/intensity data")
        for j2, z2 in enumerate(levy):
            if j2 != j and rel_residual(prod(z, z2), np.zeros(alg.dim)) > tol:
                raise UnsupportedModelError("Levy components are not independent")
        jump_size[j] = c1.real
        intensity[j] = c2.real / c1.real**2

    n_steps = int(round(t / dt))
    if n_steps < 1:
        raise AlgebraError("t/dt must round to at least one step")
    dt_eff = t / n_steps
    nc = nb + nz
    labels = [
        _component_label(alg, v, f"y{i}") for i, v in enumerate(brown)
    ] + [_component_label(alg, v, f"z{j}") for j, v in enumerate(levy)]

    gens = [
        np.random.Generator(np.random.Philox(key=seed).jumped(task)) for task in range(1 + nz)
    ]
    totals = np.zeros((n_paths, nc))
    pair_sum = np.zeros((nc, nc))
    pair_sumsq = np.zeros((nc, nc))
    root = np.sqrt(dt_eff)
    for _ in range(n_steps):
        cols = []
        if nb:
            cols.append(gens[0].standard_normal((n_paths, nb)) @ chol.T * root)
        for j in range(nz):
            lam = intensity[j] * dt_eff
            jumps = gens[1 + j].poisson(lam, n_paths)
            cols.append((jump_size[j] * (jumps - lam))[:, None])
        dx = np.hstack(cols) if cols else np.zeros((n_paths, 0))
        totals += dx
        prods = dx[:, :, None] * dx[:, None, :]
        pair_sum += prods.sum(axis=0)
        pair_sumsq += (prods**2).sum(axis=0)

    estimates: list[Estimate] = []
    vectors = brown + levy
    n_samples = n_paths * n_steps
    for p in range(nc):
        x = totals[:, p]
        m = float(np.mean(x))
        var = float(np.var(x, ddof=1)) if n_paths > 1 else 0.0
        centered = x - m
        m2 = float(np.mean(centered**2))
        m4 = float(np.mean(centered**4))
        var_se = float(np.sqrt(max(m4 - m2**2, 0.0) / n_paths))
        estimates.append(
            Estimate(f"mean[{labels[p]}]", m, float(np.std(x, ddof=1) / np.sqrt(n_paths)), 0.0)
        )
        target_var = float((prod(vectors[p], vectors[p]) @ alg.state).real) * t
        estimates.append(Estimate(f"var[{labels[p]}]", var, var_se, target_var))
        for q in range(p, nc):
            mean_pq = pair_sum[p, q] / n_samples
            var_pq = pair_sumsq[p, q] / n_samples - mean_pq**2
            se = float(np.sqrt(max(var_pq, 0.0) / n_samples)) / dt_eff
            target = float((prod(vectors[p], vectors[q]) @ alg.state).real)
            estimates.append(
                Estimate(f"cov[{labels[p]},{labels[q]}]", mean_pq / dt_eff, se, target)
            )

    return SimReport(
        kind="classical_paths",
        inputs={"t": t, "dt": dt_eff, "n_paths": n_paths, "n_steps": n_steps},
        seed=seed,
        estimates=estimates,
        slopes={},
        runtime_ms=(time.perf_counter() - start) * 1e3,
    )
