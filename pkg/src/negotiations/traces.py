"""Mazurkiewicz-trace algebra over a distributed alphabet.

Words are tuples of actions; two words are trace-equal when one can be
rewritten into the other by swapping adjacent letters with disjoint domains.
The canonical representative used throughout is the lexicographic normal
form under the alphabet's declared action order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotCoprime, ProcessNotInDmin
from .model import Configuration, DistributedAlphabet, Negotiation, enabled_actions, step


def minimal_event_indices(alpha: DistributedAlphabet, w) -> list:
    """Positions whose event depends on no earlier event."""
    out = []
    for i, a in enumerate(w):
        if all(not alpha.dependent(w[j], a) for j in range(i)):
            out.append(i)
    return out


def minimal_actions(alpha: DistributedAlphabet, w) -> set:
    """min(w): actions that can start some representative of the trace."""
    return {w[i] for i in minimal_event_indices(alpha, w)}


def normal_form(alpha: DistributedAlphabet, w) -> tuple:
    """Greedy lexicographic normal form: repeatedly emit the order-least
    action among the current minimal events."""
    rest = list(w)
    out = []
    while rest:
        best = None
        for i, a in enumerate(rest):
            if all(not alpha.dependent(rest[j], a) for j in range(i)):
                if best is None or alpha.action_index(a) < alpha.action_index(rest[best]):
                    best = i
        out.append(rest.pop(best))
    return tuple(out)


def trace_equal(alpha: DistributedAlphabet, u, v) -> bool:
    return normal_form(alpha, u) == normal_form(alpha, v)


def trace_quotient(alpha: DistributedAlphabet, u, w):
    """u^{-1}w: Some(v) with uv ~ w when u is a trace-prefix of w, else None.

    Matches u's letters left to right against minimal events of the
    remainder; taking any minimal occurrence of an action yields a
    trace-equal remainder, so the greedy match is exact.
    """
    rest = list(w)
    for a in u:
        hit = None
        for i, b in enumerate(rest):
            if b == a and all(not alpha.dependent(rest[j], b) for j in range(i)):
                hit = i
                break
        if hit is None:
            return None
        rest.pop(hit)
    return tuple(rest)


def is_coprime(alpha: DistributedAlphabet, t) -> bool:
    """A trace is co-prime when it has exactly one minimal event."""
    return len(minimal_event_indices(alpha, t)) == 1


def dmin(alpha: DistributedAlphabet, t) -> frozenset:
    """Domain of the unique minimal action; errors on non-co-prime input."""
    mins = minimal_event_indices(alpha, t)
    if len(mins) != 1:
        raise NotCoprime(f"trace {t!r} has {len(mins)} minimal events")
    return alpha.dom_set(t[mins[0]])


def min_action(alpha: DistributedAlphabet, t) -> str:
    mins = minimal_event_indices(alpha, t)
    if len(mins) != 1:
        raise NotCoprime(f"trace {t!r} has {len(mins)} minimal events")
    return t[mins[0]]


def is_step(alpha: DistributedAlphabet, s, b, p) -> bool:
    """True iff `s` is a (b,p)-step: co-prime, min(s) = b, and b is the only
    action of `s` involving p."""
    if not s or not is_coprime(alpha, s):
        return False
    if min_action(alpha, s) != b or p not in alpha.dom_set(b):
        return False
    involving = [a for a in s if p in alpha.dom_set(a)]
    return involving == [b]


def projection(alpha: DistributedAlphabet, w, p) -> tuple:
    """w|_p as a local word over a@p letters."""
    return tuple((a, p) for a in w if p in alpha.dom_set(a))


def upward_closure_indices(alpha: DistributedAlphabet, w, e) -> list:
    """Indices of events >= e in the dependence order (e included)."""
    n = len(w)
    if not 0 <= e < n:
        raise IndexError(f"event index {e} out of range for length {n}")
    above = [False] * n
    above[e] = True
    for j in range(e + 1, n):
        above[j] = any(above[i] and alpha.dependent(w[i], w[j]) for i in range(e, j))
    return [i for i in range(n) if above[i]]


def upward_closure_split(alpha: DistributedAlphabet, w, e):
    """(rest, closure): closure = events above `e` (co-prime with minimum e),
    rest = the others; rest . closure is trace-equal to w."""
    idx = set(upward_closure_indices(alpha, w, e))
    closure = tuple(w[i] for i in range(len(w)) if i in idx)
    rest = tuple(w[i] for i in range(len(w)) if i not in idx)
    return rest, closure


@dataclass(frozen=True)
class StepDecomposition:
    """r ~ head . body . tail with p absent from body and tail co-prime with
    p minimal (or empty)."""

    head: str
    body: tuple
    tail: tuple

    @property
    def support(self) -> tuple:
        """head . body — the stored transition support."""
        return (self.head,) + self.body


def step_decomposition(alpha: DistributedAlphabet, r, p) -> StepDecomposition:
    """Decompose a co-prime trace around process p's second event.

    tail is the upward closure of the second p-event (the unique maximal
    choice satisfying the decomposition conditions); empty when p occurs
    only in the head.
    """
    mins = minimal_event_indices(alpha, r)
    if len(mins) != 1:
        raise NotCoprime(f"trace {r!r} has {len(mins)} minimal events")
    head_idx = mins[0]
    head = r[head_idx]
    if p not in alpha.dom_set(head):
        raise ProcessNotInDmin(f"{p!r} not in dmin({r!r})")
    rest = r[:head_idx] + r[head_idx + 1 :]
    second = None
    for i, a in enumerate(rest):
        if p in alpha.dom_set(a):
            second = i
            break
    if second is None:
        return StepDecomposition(head, tuple(rest), ())
    body, tail = upward_closure_split(alpha, rest, second)
    return StepDecomposition(head, body, tail)


@dataclass
class PrefixResult:
    """Outcome of the greedy maximal-executable-prefix fixpoint.

    `history[p]` lists the transitions process p traversed, as
    (source_node, action, target_node) triples in firing order.
    """

    prefix: tuple
    remainder: tuple
    end: Configuration
    history: dict


def max_executable_prefix(n: Negotiation, w, rng=None) -> PrefixResult:
    """Fire any enabled action among the remainder's minimal events until
    none is; soundness of `n` is not required.

    With `rng` the choice among simultaneously enabled minimal events is
    randomized (confluence is a tested property, not an assumption).
    """
    alpha = n.alphabet
    alpha.check_word(w)
    rest = list(w)
    c = n.initial_configuration()
    fired = []
    history = {p: [] for p in alpha.processes}
    while True:
        candidates = []
        for i, a in enumerate(rest):
            if all(not alpha.dependent(rest[j], a) for j in range(i)):
                candidates.append(i)
        enabled_now = [i for i in candidates if rest[i] in set(enabled_actions(n, c))]
        if not enabled_now:
            break
        pick = enabled_now[0] if rng is None else rng.choice(enabled_now)
        a = rest.pop(pick)
        src = {p: c.node_of(p) for p in alpha.dom[a]}
        c = step(n, c, a)
        for p in alpha.dom[a]:
            history[p].append((src[p], a, c.node_of(p)))
        fired.append(a)
    return PrefixResult(tuple(fired), tuple(rest), c, history)
