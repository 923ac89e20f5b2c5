"""Exact projection onto the canonical wedge.

Distances from integer lattice points to the wedge decide which points
enter the precomputed neighbor table, so they must be exact: a fast
floating-point active-set solver proposes the optimal active constraint
set, and a rational KKT certificate then proves optimality and yields the
squared distance as an exact fraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lattice import CONSTRAINTS_G, CONSTRAINTS_H, DIM

# Strictly interior wedge point used to start the active-set iteration.
_INTERIOR = np.array([0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1])

_G = CONSTRAINTS_G.astype(np.float64)
_H = CONSTRAINTS_H.astype(np.float64)


class QPError(RuntimeError):
    """Raised when the projection solver fails to converge or certify."""


def _solve_working_set(p: np.ndarray, work: list[int]):
    """Minimizer of |v - p|^2 subject to the working constraints as equalities."""
    if not work:
        return p.copy(), np.empty(0)
    ga = _G[work]
    gram = ga @ ga.T
    lam = np.linalg.solve(gram, ga @ p - _H[work])
    v = p - ga.T @ lam
    return v, lam


def _is_independent(work: list[int], row: int) -> bool:
    ga = _G[work + [row]]
    return np.linalg.matrix_rank(ga) == len(work) + 1


def project_onto_wedge(p, max_iter: int = 200) -> tuple[np.ndarray, float, list[int]]:
    """Euclidean projection of p onto the wedge.

    Returns (projection, squared distance, active constraint indices).
    Primal active-set method; working-set rows are kept linearly
    independent so the equality subproblems stay nonsingular.
    """
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (DIM,):
        raise ValueError(f"expected shape ({DIM},), got {p.shape}")
    x = _INTERIOR.copy()
    work: list[int] = []
    for _ in range(max_iter):
        v, lam = _solve_working_set(p, work)
        if np.allclose(v, x, rtol=0.0, atol=1e-12):
            if lam.size == 0 or lam.min() >= -1e-10:
                d2 = float(((x - p) ** 2).sum())
                return x, d2, sorted(work)
            work.pop(int(lam.argmin()))
            continue
        step = v - x
        slack = _H - _G @ x
        rate = _G @ step
        alpha = 1.0
        blocker = -1
        for row in range(_G.shape[0]):
            if row in work or rate[row] <= 1e-14:
                continue
            a = slack[row] / rate[row]
            if a < alpha:
                alpha = a
                blocker = row
        x = x + alpha * step
        if blocker >= 0 and _is_independent(work, blocker):
            work.append(blocker)
    raise QPError("active-set projection did not converge")


def _solve_rational(matrix, rhs):
    """Exact Gaussian elimination; returns None if the system is singular."""
    n = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        inv = Fraction(1) / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


@dataclass(frozen=True)
class CertifiedProjection:
    """Exact projection result: rational point, squared distance, active set."""

    point: tuple[Fraction, ...]
    distance_sq: Fraction
    active: tuple[int, ...]


def _certify_active_set(p_int: np.ndarray, work: list[int]) -> CertifiedProjection | None:
    """Exact KKT check for a candidate active set; None if it fails."""
    g = [[Fraction(int(v)) for v in CONSTRAINTS_G[r]] for r in work]
    h = [Fraction(int(CONSTRAINTS_H[r])) for r in work]
    p = [Fraction(int(v)) for v in p_int]
    if work:
        gram = [[sum(gi * gj for gi, gj in zip(g[i], g[j])) for j in range(len(work))] for i in range(len(work))]
        rhs = [sum(gi * pi for gi, pi in zip(g[i], p)) - h[i] for i in range(len(work))]
        lam = _solve_rational(gram, rhs)
        if lam is None or any(v < 0 for v in lam):
            return None
        x = [p[j] - sum(lam[i] * g[i][j] for i in range(len(work))) for j in range(DIM)]
    else:
        x = p
    for r in range(CONSTRAINTS_G.shape[0]):
        lhs = sum(Fraction(int(CONSTRAINTS_G[r, j])) * x[j] for j in range(DIM))
        if lhs > Fraction(int(CONSTRAINTS_H[r])):
            return None
    d2 = sum((xi - pi) ** 2 for xi, pi in zip(x, p))
    return CertifiedProjection(point=tuple(x), distance_sq=d2, active=tuple(work))


def _certify_exhaustive(p_int: np.ndarray, hint: list[int]) -> CertifiedProjection:
    """Rational active-set iteration, seeded by the float solver's answer.

    Only reached when the float active set fails exact KKT (degenerate
    geometry); walks active sets exactly until the certificate holds.
    """
    work = list(hint)
    seen = set()
    for _ in range(200):
        key = tuple(sorted(work))
        if key in seen:
            break
        seen.add(key)
        cert = _certify_active_set(p_int, sorted(work))
        if cert is not None:
            return cert
        # Retry dropping one constraint at a time, then growing by one.
        for drop in range(len(work)):
            trial = work[:drop] + work[drop + 1 :]
            cert = _certify_active_set(p_int, sorted(trial))
            if cert is not None:
                return cert
        grown = False
        for row in range(CONSTRAINTS_G.shape[0]):
            if row not in work and len(work) < DIM:
                work = work + [row]
                grown = True
                break
        if not grown:
            break
    raise QPError(f"could not certify projection for {p_int.tolist()}")


def certified_distance_sq(p_int) -> Fraction:
    """Exact squared distance from an integer point to the wedge."""
    p_int = np.asarray(p_int, dtype=np.int64)
    _, _, work = project_onto_wedge(p_int.astype(np.float64))
    cert = _certify_active_set(p_int, work)
    if cert is None:
        cert = _certify_exhaustive(p_int, work)
    return cert.distance_sq


def wedge_vertices() -> np.ndarray:
    """All vertices of the wedge, found by exact enumeration of constraint subsets."""
    from itertools import combinations

    rows = range(CONSTRAINTS_G.shape[0])
    found: list[tuple[Fraction, ...]] = []
    for subset in combinations(rows, DIM):
        g = [[Fraction(int(v)) for v in CONSTRAINTS_G[r]] for r in subset]
        h = [Fraction(int(CONSTRAINTS_H[r])) for r in subset]
        x = _solve_rational(g, h)
        if x is None:
            continue
        feasible = all(
            sum(Fraction(int(CONSTRAINTS_G[r, j])) * x[j] for j in range(DIM))
            <= Fraction(int(CONSTRAINTS_H[r]))
            for r in rows
        )
        if feasible and tuple(x) not in found:
            found.append(tuple(x))
    return np.array([[float(v) for v in x] for x in found])
