"""Two-player payoff matrices for opinion stances, and the opinion update step.

Four escalating solution games share the same payoff ingredients: `x_pay`
rewards holding one's original stance, `y_pay` rewards pulling the opponent
over, `i_pay` prices the effort of altering a stance, and `d` is the social
distance between the players, whose reciprocal sweetens any agreement outcome.

Solutions, in escalation order (numbered aliases ``s1``..``s4`` accepted):

- ``two_actions``: hold-or-alter tug of war, zero-sum.
- ``three_actions``: adds an explicit agreement action priced by `i_pay`.
- ``distance``: agreement additionally pays the reciprocal social distance.
- ``confidence``: stance payoffs weighted by each player's confidence
  (`u_a`, `u_b`) in their own position.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MissingDistance",
    "GameParams",
    "PayoffMatrices",
    "payoff_matrices",
    "best_responses",
    "opinion_step",
    "SOLUTIONS",
]


class MissingDistance(ValueError):
    """The solution prices agreement by social distance, but none was given."""


@dataclass(frozen=True)
class GameParams:
    """Payoff ingredients shared by all four stance games.

    `u_a` and `u_b` are the players' confidence in their own stance, in (0, 1);
    `lam` and `rho` weight the clustering terms of the social-distance measure
    and live in [0, 0.5]; `mu` and `eta` drive the opinion update step and must
    stay below one half so an exchange contracts the opinion gap from the
    persuaded side while the persuader drifts less than the gap itself.
    """

    x_pay: float = 1.0
    y_pay: float = 1.0
    i_pay: float = 0.5
    d: float | None = None
    u_a: float = 0.5
    u_b: float = 0.5
    lam: float = 0.25
    rho: float = 0.25
    mu: float = 0.3
    eta: float = 0.1

    def __post_init__(self) -> None:
        for name in ("x_pay", "y_pay", "i_pay"):
            if float(getattr(self, name)) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.d is not None and float(self.d) <= 0.0:
            raise ValueError("distance d must be positive when given")
        for name in ("u_a", "u_b"):
            v = float(getattr(self, name))
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie strictly between 0 and 1")
        for name in ("lam", "rho"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 0.5:
                raise ValueError(f"{name} must lie in [0, 0.5]")
        for name in ("mu", "eta"):
            v = float(getattr(self, name))
            if not 0.0 < v < 0.5:
                raise ValueError(f"{name} must lie strictly between 0 and 0.5")

    def require_distance(self) -> float:
        if self.d is None:
            raise MissingDistance("this solution needs the social distance d")
        return float(self.d)


@dataclass(frozen=True)
class PayoffMatrices:
    """A bimatrix stance game (row player A, column player B).

    `m_b` always equals the exact transpose of `m_a`: the games are
    role-symmetric, so B facing A sees A's payoff table with the action roles
    swapped.
    """

    solution: str
    actions: tuple[str, ...]
    m_a: np.ndarray = field(repr=False, default=None)
    m_b: np.ndarray = field(repr=False, default=None)

    def __post_init__(self) -> None:
        m = len(self.actions)
        a = np.asarray(self.m_a, dtype=np.float64).copy()
        b = np.asarray(self.m_b, dtype=np.float64).copy()
        if a.shape != (m, m) or b.shape != (m, m):
            raise ValueError("payoff matrices must be square over the action set")
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "m_a", a)
        object.__setattr__(self, "m_b", b)


def _two_actions(params: GameParams) -> PayoffMatrices:
    x, y = params.x_pay, params.y_pay
    m_a = np.array(
        [
            [0.0, x + y],
            [-x - y, 0.0],
        ]
    )
    return PayoffMatrices("two_actions", ("original", "altered"), m_a, m_a.T.copy())


def _three_actions(params: GameParams) -> PayoffMatrices:
    x, y, i = params.x_pay, params.y_pay, params.i_pay
    m_a = np.array(
        [
            [0.0, x + y, y + i],
            [-x - y, 0.0, -x + i],
            [-y - i, x - i, 0.0],
        ]
    )
    return PayoffMatrices(
        "three_actions", ("original", "altered", "agreement"), m_a, m_a.T.copy()
    )


def _distance(params: GameParams) -> PayoffMatrices:
    x, y, i = params.x_pay, params.y_pay, params.i_pay
    recip = 1.0 / params.require_distance()
    m_a = np.array(
        [
            [0.0, x + y, i + y + recip],
            [-x - y, 0.0, i - x + recip],
            [-i - y + recip, -i + x + recip, 2.0 * recip],
        ]
    )
    return PayoffMatrices(
        "distance", ("original", "altered", "agreement"), m_a, m_a.T.copy()
    )


def _confidence(params: GameParams) -> PayoffMatrices:
    x, y, i = params.x_pay, params.y_pay, params.i_pay
    u_a, u_b = params.u_a, params.u_b
    recip = 1.0 / params.require_distance()
    m_a = np.array(
        [
            [
                y * ((1.0 - u_b) - (1.0 - u_a)),
                y * (1.0 - u_b) + x * u_a,
                y * (1.0 - u_b) + i + recip,
            ],
            [
                -x * u_b - y * (1.0 - u_a),
                x * (u_a - u_b),
                -x * u_b + i + recip,
            ],
            [
                -y * (1.0 - u_a) - i + recip,
                x * u_a - i + recip,
                2.0 * recip,
            ],
        ]
    )
    return PayoffMatrices(
        "confidence", ("original", "altered", "agreement"), m_a, m_a.T.copy()
    )


SOLUTIONS = {
    "two_actions": _two_actions,
    "three_actions": _three_actions,
    "distance": _distance,
    "confidence": _confidence,
}

_ALIASES = {
    "s1": "two_actions",
    "s2": "three_actions",
    "s3": "distance",
    "s4": "confidence",
}


def payoff_matrices(solution: str, params: GameParams | None = None) -> PayoffMatrices:
    """Build the named solution's bimatrix game (aliases s1..s4 accepted)."""
    params = params or GameParams()
    key = str(solution).lower()
    key = _ALIASES.get(key, key)
    try:
        builder = SOLUTIONS[key]
    except KeyError:
        raise ValueError(
            f"unknown solution {solution!r}; choose from {sorted(SOLUTIONS)} "
            f"or aliases {sorted(_ALIASES)}"
        ) from None
    return builder(params)


def best_responses(payoff: np.ndarray, opponent_action: int, tol: float = 1e-12) -> list[int]:
    """Row indices maximizing the row player's payoff against a fixed column."""
    column = np.asarray(payoff, dtype=np.float64)[:, opponent_action]
    top = column.max()
    return [int(k) for k in np.flatnonzero(column >= top - tol)]


def opinion_step(e_a: float, e_b: float, mu: float, eta: float) -> tuple[float, float]:
    """One persuasion exchange: A is drawn toward B, B drifts along the same gap.

    The post-exchange gap is the prior gap scaled by (1 + eta - mu), so with
    eta < mu repeated exchanges contract the disagreement geometrically.
    """
    if not 0.0 < mu < 0.5:
        raise ValueError("mu must lie strictly between 0 and 0.5")
    if not 0.0 < eta < 0.5:
        raise ValueError("eta must lie strictly between 0 and 0.5")
    gap = e_b - e_a
    return e_a + mu * gap, e_b + eta * gap
