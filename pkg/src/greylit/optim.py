"""Limited-memory quasi-Newton minimizer with optional L1 regularization.

Minimizes F(w) = f(w) + l1 * ||w||_1 where f is smooth and supplied as a
value-and-gradient callable.  With l1 == 0 this is plain L-BFGS with an
Armijo backtracking line search; with l1 > 0 the orthant-wise variant is
used: descent follows the L1 pseudo-gradient, the search direction is
constrained to its sign pattern, and trial points are projected back onto
the orthant of the current iterate, which drives coordinates to exactly
zero.

Plain numpy on float64 throughout; identical inputs give bitwise-identical
iterates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Tuple

import numpy as np

ARMIJO_C = 1e-4
MAX_BACKTRACKS = 50


class OptimizationError(RuntimeError):
    pass


@dataclass
class MinimizeResult:
    x: np.ndarray
    objective: float
    iterations: int
    converged: bool
    #: full objective (incl. L1 term) after every accepted step, starting
    #: with the initial point; non-increasing by construction
    objective_history: list = field(default_factory=list)


def _pseudo_gradient(x: np.ndarray, grad: np.ndarray, l1: float) -> np.ndarray:
    if l1 == 0.0:
        return grad
    pg = np.where(x > 0, grad + l1, np.where(x < 0, grad - l1, 0.0))
    at_zero = x == 0
    right = grad[at_zero] + l1
    left = grad[at_zero] - l1
    pg[at_zero] = np.where(left > 0, left, np.where(right < 0, right, 0.0))
    return pg


def _two_loop(pg: np.ndarray, s_list, y_list, rho_list) -> np.ndarray:
    q = pg.copy()
    alphas = []
    for s, y, rho in zip(reversed(s_list), reversed(y_list), reversed(rho_list)):
        a = rho * s.dot(q)
        alphas.append(a)
        q -= a * y
    if s_list:
        s, y = s_list[-1], y_list[-1]
        q *= s.dot(y) / y.dot(y)
    for (s, y, rho), a in zip(zip(s_list, y_list, rho_list), reversed(alphas)):
        b = rho * y.dot(q)
        q += (a - b) * s
    return q


def minimize(
    fun_grad: Callable[[np.ndarray], Tuple[float, np.ndarray]],
    x0: np.ndarray,
    l1: float = 0.0,
    max_iterations: int = 200,
    tol: float = 1e-5,
    memory: int = 10,
) -> MinimizeResult:
    """Minimize fun_grad's value plus l1 * ||x||_1, starting from x0.

    Converged means the infinity norm of the (pseudo-)gradient reached
    ``tol``.  Raises OptimizationError on a non-finite objective.
    """
    x = np.asarray(x0, dtype=np.float64).copy()
    f, g = fun_grad(x)
    obj = f + l1 * np.abs(x).sum()
    if not np.isfinite(obj):
        raise OptimizationError(f"objective is not finite at the initial point: {obj}")
    history = [obj]
    s_list, y_list, rho_list = [], [], []
    converged = False
    steps = 0

    while steps < max_iterations:
        pg = _pseudo_gradient(x, g, l1)
        pg_norm = np.abs(pg).max(initial=0.0)
        if pg_norm <= tol:
            converged = True
            break

        d = -_two_loop(pg, s_list, y_list, rho_list)
        if l1 > 0.0:
            d[d * pg >= 0.0] = 0.0  # keep only coordinates aligned with -pg
            orthant = np.where(x != 0.0, np.sign(x), np.sign(-pg))
        if d.dot(pg) >= 0.0:
            d = -pg  # stale curvature gave a non-descent direction

        alpha = 1.0 if s_list else min(1.0, 1.0 / pg_norm)
        accepted = False
        for _ in range(MAX_BACKTRACKS):
            x_new = x + alpha * d
            if l1 > 0.0:
                x_new[np.sign(x_new) != orthant] = 0.0
            f_new, g_new = fun_grad(x_new)
            obj_new = f_new + l1 * np.abs(x_new).sum()
            if not np.isfinite(obj_new):
                raise OptimizationError(f"objective became non-finite during line search: {obj_new}")
            # pg.(x_new - x) <= 0 for orthant-projected aligned steps, so an
            # accepted step never increases the objective
            if obj_new <= obj + ARMIJO_C * pg.dot(x_new - x):
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break  # stalled at float resolution; report current iterate

        s = x_new - x
        y = g_new - g
        sy = s.dot(y)
        if sy > 1e-10:
            s_list.append(s)
            y_list.append(y)
            rho_list.append(1.0 / sy)
            if len(s_list) > memory:
                s_list.pop(0)
                y_list.pop(0)
                rho_list.pop(0)

        x, f, g, obj = x_new, f_new, g_new, obj_new
        history.append(obj)
        steps += 1
    else:
        pg = _pseudo_gradient(x, g, l1)
        converged = np.abs(pg).max(initial=0.0) <= tol

    return MinimizeResult(x, obj, steps, converged, history)
