"""Optimal randomized competitive ratio for slotted ski-rental with lookahead.

The break-even interval spans b slots and the lookahead window k < b of them.
The optimal turn-off-slot distribution P_1..P_{b-k} and ratio c solve a finite
LP whose optimum sits at the vertex where every cost constraint is active:

    c        = 1 / (1 - q^{b-k-1} * (b-k-1)/b),        q = (b-k-1)/(b-k)
    P_{b-k-i} = (c/(b-k)) * q^i                 for 0 <= i < b-k-1
    P_1       = q^{b-k-1} * ((k+1)/b) * c

As b grows with k/b -> alpha, c -> e/(e-1+alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidRange

E = math.e


@dataclass(frozen=True)
class SlottedRatio:
    b: int
    k: int
    c: float
    probabilities: tuple[float, ...]  # P_1 .. P_{b-k}

    def to_jsonable(self) -> dict:
        return {"b": self.b, "k": self.k, "c": self.c, "P": list(self.probabilities)}


def _power(q: float, n: int) -> float:
    # exp(n*log q) keeps q^n stable for large n; 0^0 = 1 covers b-k = 1.
    if n == 0:
        return 1.0
    if q == 0.0:
        return 0.0
    return math.exp(n * math.log(q))


def closed_form(b: int, k: int) -> SlottedRatio:
    """Optimal ratio and turn-off distribution for b slots, k of lookahead.

    Valid for 2 <= b and 0 <= k <= b-1; k = b-1 degenerates to c = 1 with all
    mass on the first slot.
    """
    if b < 2:
        raise InvalidRange(f"need b >= 2, got b={b}")
    if not 0 <= k <= b - 1:
        raise InvalidRange(f"need 0 <= k <= b-1, got k={k} for b={b}")
    n = b - k
    q = (n - 1) / n
    qpow = _power(q, n - 1)
    c = 1.0 / (1.0 - qpow * (n - 1) / b)
    probs = np.empty(n)
    if n > 1:
        i = np.arange(n - 1)
        probs[n - 1 - i] = (c / n) * np.exp(i * math.log(q))  # P_{n-i}
    probs[0] = qpow * ((k + 1) / b) * c
    return SlottedRatio(b, k, c, tuple(float(p) for p in probs))


def limit_ratio(alpha: float) -> float:
    """Large-b limit of the optimal ratio with lookahead fraction alpha."""
    if not 0.0 <= alpha <= 1.0:
        raise InvalidRange(f"alpha must be in [0, 1], got {alpha}")
    return E / (E - 1.0 + alpha)


def verify_feasible(sr: SlottedRatio, tol: float = 1e-9) -> tuple[bool, str | None]:
    """Check the full constraint system against (c, P).

    Returns (feasible, first_violation).  Feasibility allows slack >= -tol;
    the closed-form solution additionally makes every cost constraint tight,
    which ``verify_tight`` checks.
    """
    b, k, c = sr.b, sr.k, sr.c
    n = b - k
    p = np.asarray(sr.probabilities)
    if len(p) != n:
        return False, f"expected {n} probabilities, got {len(p)}"
    if np.any(p <= 0.0):
        return False, f"P_{int(np.argmin(p)) + 1} <= 0"
    total = math.fsum(sr.probabilities)
    if abs(total - 1.0) > tol:
        return False, f"sum P = {total} != 1"
    # trivial family: for gaps within the window, D * sum(P) <= c * D
    if 1.0 > c + tol:
        return False, f"c = {c} < 1"
    for d, lhs in _cost_constraints(sr):
        rhs = c * min(d, b)
        if lhs > rhs + tol * max(1.0, rhs):
            return False, f"constraint at D={d}: {lhs} > {rhs}"
    return True, None


def verify_tight(sr: SlottedRatio, tol: float = 1e-9) -> tuple[bool, str | None]:
    """Check that every cost constraint holds with equality (vertex optimum)."""
    b, c = sr.b, sr.c
    for d, lhs in _cost_constraints(sr):
        rhs = c * min(d, b)
        if abs(lhs - rhs) > tol * max(1.0, rhs):
            return False, f"constraint at D={d} not tight: {lhs} vs {rhs}"
    return True, None


def _cost_constraints(sr: SlottedRatio):
    """Yield (D, lhs) for each cost constraint of the finite system.

    For a gap of D slots the online expected cost is
    sum_{i <= D-k} (b+i-1) P_i + D * sum_{i > D-k} P_i against offline cost
    min(D, b); one representative beyond D = b (where the right-hand side
    saturates) covers the rest, since the left-hand side is then constant.
    """
    b, k = sr.b, sr.k
    n = b - k
    p = np.asarray(sr.probabilities)
    weights = b + np.arange(n)  # b+i-1 for 1-based i
    buy_prefix = np.concatenate(([0.0], np.cumsum(weights * p)))
    tail = np.concatenate((np.cumsum(p[::-1])[::-1], [0.0]))  # sum_{i > m}
    for d in range(k + 1, b + 1):
        m = d - k
        yield d, float(buy_prefix[m] + d * tail[m])
    # D = 2b - k - 1 representative: every P_i is inside the buy prefix
    yield 2 * b - k - 1, float(buy_prefix[n])
