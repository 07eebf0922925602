"""A finite atomic model of the rules for combining multiplicities.

A model has finitely many points, two weight vectors ``mu`` and ``mu_prime``
and multiplicity vectors ``m`` and ``m_prime``.  ``combine`` applies the
case formula (add on the common support, otherwise keep whichever is
defined).  ``verify_against_matrix_model`` recomputes the same thing without
the formula: it builds the two representations of C(points) as explicit
block matrices, hides them under a random orthogonal change of basis and
counts eigenvalue multiplicities with numpy.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .extnat import INF


@dataclass(frozen=True)
class FiniteModel:
    points: tuple
    mu: tuple
    mu_prime: tuple
    m: tuple
    m_prime: tuple

    def __post_init__(self):
        n = len(self.points)
        for name in ("mu", "mu_prime", "m", "m_prime"):
            v = tuple(getattr(self, name))
            if len(v) != n:
                raise DomainError(f"{name} has length {len(v)}, expected {n}")
            object.__setattr__(self, name, v)
        if any(w < 0 for w in self.mu + self.mu_prime):
            raise DomainError("weights must be nonnegative")
        for w, mult in zip(self.mu + self.mu_prime, self.m + self.m_prime):
            if w > 0 and not (mult == INF or (isinstance(mult, int) and mult >= 1)):
                raise DomainError(f"multiplicity {mult!r} on a point of positive weight")

    @property
    def finite(self) -> bool:
        return all(x != INF for x in self.m + self.m_prime)


def combine(model: FiniteModel) -> tuple[tuple, tuple]:
    """(nu, m_tilde) with nu = mu + mu' and m_tilde from the three-case rule.

    ``m_tilde`` is 0 off the support of nu.
    """
    nu, mt = [], []
    for w, wp, a, b in zip(model.mu, model.mu_prime, model.m, model.m_prime):
        nu.append(w + wp)
        if w > 0 and wp > 0:
            mt.append(a + b)
        elif w > 0:
            mt.append(a)
        elif wp > 0:
            mt.append(b)
        else:
            mt.append(0)
    return tuple(nu), tuple(mt)


def _block_dims(weights, mults) -> list[int]:
    return [int(k) if w > 0 else 0 for w, k in zip(weights, mults)]


def _hidden_operator(values: np.ndarray, dims: list[int], rng: np.random.Generator) -> np.ndarray:
    """pi(phi) on the direct sum of blocks C^dims[p], conjugated by a random orthogonal matrix."""
    diag = np.repeat(values, dims)
    if diag.size == 0:
        return np.zeros((0, 0))
    q, _ = np.linalg.qr(rng.standard_normal((diag.size, diag.size)))
    return q @ np.diag(diag) @ q.T


def _eigen_multiplicities(op: np.ndarray, values: np.ndarray, tol: float = 1e-6) -> list[int]:
    eig = np.linalg.eigvalsh(op) if op.size else np.zeros(0)
    return [int(np.sum(np.abs(eig - v) < tol)) for v in values]


@dataclass(frozen=True)
class Report:
    ok: bool
    trials: int
    expected: tuple
    observed: tuple = ()
    failures: tuple = field(default=())


def verify_against_matrix_model(model: FiniteModel, trials: int = 1,
                                rng: np.random.Generator | None = None) -> Report:
    """Count eigenspace dimensions of (pi ⊕ pi')(phi) for random separating phi."""
    if not model.finite:
        raise DomainError("the matrix model needs finite multiplicities")
    rng = rng if rng is not None else np.random.default_rng(0)
    _, expected = combine(model)
    dims = _block_dims(model.mu, model.m)
    dims_p = _block_dims(model.mu_prime, model.m_prime)
    failures = []
    observed = ()
    n = len(model.points)
    for t in range(trials):
        # well separated values so that eigenvalues identify points
        values = rng.permutation(n).astype(float) * 3.0 + rng.uniform(-0.5, 0.5)
        a = _hidden_operator(values, dims, rng)
        b = _hidden_operator(values, dims_p, rng)
        op = np.block([[a, np.zeros((a.shape[0], b.shape[0]))],
                       [np.zeros((b.shape[0], a.shape[0])), b]])
        observed = tuple(_eigen_multiplicities(op, values))
        if observed != tuple(expected):
            failures.append((t, observed))
    return Report(not failures, trials, tuple(expected), observed, tuple(failures))


def tensor_check(a: FiniteModel, b: FiniteModel, rng: np.random.Generator | None = None) -> bool:
    """Multiplicities of pi_a ⊗ pi_b on product points are products (first representations only)."""
    rng = rng if rng is not None else np.random.default_rng(0)
    da, db = _block_dims(a.mu, a.m), _block_dims(b.mu, b.m)
    na, nb = len(a.points), len(b.points)
    va = rng.permutation(na).astype(float)
    vb = rng.permutation(nb).astype(float)
    A = _hidden_operator(va, da, rng)
    B = _hidden_operator(vb, db, rng)
    scale = float(nb + 1)
    # phi(p, q) = scale * va[p] + vb[q] separates product points
    op = scale * np.kron(A, np.eye(B.shape[0])) + np.kron(np.eye(A.shape[0]), B)
    values = np.array([scale * x + y for x in va for y in vb])
    observed = _eigen_multiplicities(op, values)
    expected = [x * y for x in da for y in db]
    return observed == expected


def identity_tensor_check(model: FiniteModel, k: int, rng: np.random.Generator | None = None) -> bool:
    """Tensoring with the identity of M_k multiplies every multiplicity by k."""
    if k < 1:
        raise DomainError("k must be positive")
    rng = rng if rng is not None else np.random.default_rng(0)
    dims = _block_dims(model.mu, model.m)
    values = rng.permutation(len(model.points)).astype(float) * 2.0
    op = np.kron(_hidden_operator(values, dims, rng), np.eye(k))
    return _eigen_multiplicities(op, values) == [d * k for d in dims]


def random_model(rng: random.Random, max_points: int = 6, max_mult: int = 4) -> FiniteModel:
    n = rng.randint(1, max_points)

    def weights():
        return tuple(rng.choice([0.0, rng.uniform(0.1, 1.0)]) for _ in range(n))

    def mults(ws):
        return tuple(rng.randint(1, max_mult) if w > 0 else 0 for w in ws)

    mu, mu_p = weights(), weights()
    return FiniteModel(tuple(range(n)), mu, mu_p, mults(mu), mults(mu_p))


@dataclass(frozen=True)
class TrialSummary:
    trials: int
    agreements: int
    tensor_ok: int
    identity_ok: dict
    seed: int

    @property
    def ok(self) -> bool:
        return (self.agreements == self.trials and self.tensor_ok == self.trials
                and all(v == self.trials for v in self.identity_ok.values()))


def run_trials(trials: int = 1000, seed: int = 0, ks=(1, 2, 3)) -> TrialSummary:
    """Random models checked for the combination rule, tensor rule and identity scaling."""
    rng = random.Random(seed)
    nrng = np.random.default_rng(seed)
    agree = tens = 0
    ident = {k: 0 for k in ks}
    for _ in range(trials):
        model = random_model(rng)
        agree += verify_against_matrix_model(model, 1, nrng).ok
        tens += tensor_check(model, random_model(rng), nrng)
        for k in ks:
            ident[k] += identity_tensor_check(model, k, nrng)
    return TrialSummary(trials, agree, tens, ident, seed)
