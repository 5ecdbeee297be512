"""
Steady states by damped Newton iteration.

Convergence is declared on the max-norm of the right-hand side, so a
returned EquilibriumResult always satisfies residual_norm <= 1e-10.
"""

import logging
from typing import List, Optional

import numpy as np

from .errors import ConvergenceError, ModelDomainError
from .model import make_vector_field
from .spectral import jacobian_fd
from .types import CardioParams, ControlVariant, EquilibriumResult, RESTING_STATE, VolumeState

log = logging.getLogger(__name__)

RESIDUAL_TOLERANCE = 1e-10
MAX_ITERATIONS = 100
MAX_HALVINGS = 20


def _admissible(x: List[float], params: CardioParams) -> bool:
    return min(x) > 0.0 and params.v_o - sum(x) > 0.0


def solve_equilibrium(params: CardioParams, variant: ControlVariant, mu: float,
                      guess: Optional[VolumeState] = None) -> EquilibriumResult:
    """
    Find x with rhs(x) = 0 starting from guess (default: resting state).

    Each Newton step is halved until the iterate is admissible and the
    residual decreases; 20 halvings without success is a failure.
    """
    guess = guess or RESTING_STATE
    guess.check_admissible(params)
    field = make_vector_field(params, variant, mu)

    x = [float(v) for v in guess.as_tuple()]
    fx = np.array(field(*x))
    norm = float(np.max(np.abs(fx)))
    iterations = 0

    while norm > RESIDUAL_TOLERANCE:
        if iterations >= MAX_ITERATIONS:
            raise ConvergenceError(
                f"Newton did not converge in {MAX_ITERATIONS} iterations "
                f"for {variant.label()} at mu={mu:g} (residual {norm:.3e})",
                iterations=iterations,
                residual_norm=norm,
            )

        jac = jacobian_fd(params, variant, mu, VolumeState.from_sequence(x))
        try:
            step = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(
                f"singular Jacobian at {tuple(x)} for {variant.label()} at mu={mu:g}",
                iterations=iterations,
                residual_norm=norm,
            ) from exc

        damping = 1.0
        for _ in range(MAX_HALVINGS + 1):
            candidate = [float(xi + damping * si) for xi, si in zip(x, step)]
            if _admissible(candidate, params):
                try:
                    f_candidate = np.array(field(*candidate))
                except ModelDomainError:
                    f_candidate = None
                if f_candidate is not None:
                    candidate_norm = float(np.max(np.abs(f_candidate)))
                    if candidate_norm < norm:
                        x, fx, norm = candidate, f_candidate, candidate_norm
                        break
            damping *= 0.5
        else:
            raise ConvergenceError(
                f"no acceptable damped Newton step from {tuple(x)} "
                f"for {variant.label()} at mu={mu:g}",
                iterations=iterations,
                residual_norm=norm,
            )

        iterations += 1
        log.debug("newton %d: damping=%g residual=%.3e", iterations, damping, norm)

    return EquilibriumResult(VolumeState.from_sequence(x), norm, iterations)
