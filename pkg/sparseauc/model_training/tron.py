"""
Newton truncado: direção por gradiente conjugado + busca linear de Armijo

A direção resolve aproximadamente (H + lambda I) d = -grad usando somente
produtos Hessiana-vetor; o passo é reduzido por backtracking até satisfazer
E(beta + t d) <= E(beta) + ls_armijo * t * grad'd.
"""

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from sparseauc.config import get_config
from sparseauc.model_training.objective import eval_objective, hessian_vec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TronConfig:
    grad_tol: float = 1e-3
    max_newton_iters: int = 50
    cg_rel_tol: float = 1e-2
    cg_max_iters: int = 250
    ls_backtrack: float = 0.5
    ls_armijo: float = 1e-4
    ls_max_steps: int = 30
    damping: float = 1e-12

    def __post_init__(self):
        if not (self.grad_tol > 0 and self.cg_rel_tol > 0):
            raise ValueError("tolerâncias devem ser positivas")
        if not (0 < self.ls_backtrack < 1 and 0 < self.ls_armijo < 1):
            raise ValueError("ls_backtrack e ls_armijo devem estar em (0, 1)")
        if self.damping < 0:
            raise ValueError("damping deve ser não negativo")

    @classmethod
    def from_config(cls, **overrides):
        cfg = get_config('tron')
        cfg.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**cfg)

    def to_dict(self):
        return asdict(self)


@dataclass
class CGResult:
    direction: np.ndarray
    iterations: int
    residual_norms: list
    model_values: list
    breakdown: bool = False


@dataclass
class NewtonStep:
    objective: float
    grad_norm: float
    cg_iterations: int
    step_size: float
    slope: float


@dataclass
class TronDiagnostics:
    steps: list = field(default_factory=list)
    converged: bool = False
    line_search_failed: bool = False
    final: object = None

    @property
    def newton_iterations(self):
        return len(self.steps)


def cg_solve(hess_operator, rhs, cfg):
    """
    Gradiente conjugado para H d = rhs a partir de d = 0

    Para quando ||H d - rhs|| <= cg_rel_tol ||rhs|| ou após cg_max_iters.
    Curvatura não finita ou não positiva interrompe: devolve rhs (que é a
    direção de máxima descida quando rhs = -grad) se nada foi feito ainda,
    senão o iterado corrente.
    """
    rhs = np.asarray(rhs, dtype=np.float64)
    d = np.zeros_like(rhs)
    r = rhs.copy()
    p = r.copy()
    rr = float(np.dot(r, r))
    rhs_norm = np.sqrt(rr)
    residuals = [rhs_norm]
    # valor do modelo quadrático 1/2 d'Hd - rhs'd
    models = [0.0]

    if rhs_norm == 0.0:
        return CGResult(d, 0, residuals, models)

    stop = cfg.cg_rel_tol * rhs_norm
    for it in range(1, cfg.cg_max_iters + 1):
        Hp = hess_operator(p)
        curvature = float(np.dot(p, Hp))
        if not np.isfinite(curvature) or curvature <= 0.0:
            logger.warning("CG interrompido (curvatura %s) na iteração %d", curvature, it)
            direction = rhs.copy() if it == 1 else d
            return CGResult(direction, it - 1, residuals, models, breakdown=True)

        alpha = rr / curvature
        d = d + alpha * p
        r = r - alpha * Hp
        rr_next = float(np.dot(r, r))
        residuals.append(np.sqrt(rr_next))
        models.append(models[-1] - 0.5 * alpha * rr)
        if np.sqrt(rr_next) <= stop:
            return CGResult(d, it, residuals, models)
        p = r + (rr_next / rr) * p
        rr = rr_next

    return CGResult(d, cfg.cg_max_iters, residuals, models)


def minimize(ctx, beta_init, cfg=None):
    """
    Minimiza E(beta) com J fixo

    Returns:
        (beta, TronDiagnostics) com E(beta) <= E(beta_init); diagnostics.final
        é a EvalResult em beta
    """
    cfg = cfg or TronConfig()
    beta = np.array(beta_init, dtype=np.float64)
    current = eval_objective(ctx, beta)
    diagnostics = TronDiagnostics(final=current)

    if beta.size == 0:
        diagnostics.converged = True
        return beta, diagnostics

    tol = cfg.grad_tol * max(1.0, float(np.linalg.norm(current.grad)))
    diag_scale = float(np.mean(np.diag(ctx.cache.gram_block())))
    lam = cfg.damping * max(diag_scale, 1e-300)

    for k in range(cfg.max_newton_iters):
        grad_norm = float(np.linalg.norm(current.grad))
        if grad_norm <= tol:
            diagnostics.converged = True
            break

        at = current
        cg = cg_solve(lambda v: hessian_vec(ctx, at, v) + lam * v, -current.grad, cfg)
        d = cg.direction
        slope = float(np.dot(current.grad, d))
        if not slope < 0.0:
            d = -current.grad
            slope = -grad_norm ** 2

        t = 1.0
        accepted = None
        for _ in range(cfg.ls_max_steps):
            trial = eval_objective(ctx, beta + t * d)
            if trial.value <= current.value + cfg.ls_armijo * t * slope:
                accepted = trial
                break
            t *= cfg.ls_backtrack

        if accepted is None:
            logger.warning("busca linear falhou após %d reduções (|J|=%d, E=%.6g)",
                           cfg.ls_max_steps, beta.size, current.value)
            diagnostics.line_search_failed = True
            break

        beta = beta + t * d
        diagnostics.steps.append(NewtonStep(objective=accepted.value, grad_norm=grad_norm,
                                            cg_iterations=cg.iterations, step_size=t, slope=slope))
        logger.debug("newton %d: E=%.10g ||g||=%.3g cg=%d t=%.3g", k, accepted.value, grad_norm, cg.iterations, t)
        current = accepted
    else:
        diagnostics.converged = float(np.linalg.norm(current.grad)) <= tol

    diagnostics.final = current
    return beta, diagnostics
