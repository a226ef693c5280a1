"""The oracle side of the learning protocol.

A Teacher wraps a target negotiation and answers membership queries on local
paths, membership queries on executions (deduplicated up to trace
equivalence), and equivalence queries whose counterexamples are executions,
shortest first with lexicographic tie-breaking.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from . import automata, soundness, traces
from .errors import AlphabetMismatch, StateBudgetExceeded
from .model import (
    DEFAULT_STATE_BUDGET,
    Negotiation,
    enabled_actions,
    member_exec,
    member_path,
    step,
)

POSITIVE = "positive"
NEGATIVE = "negative"


@dataclass
class QueryStats:
    membership_total: int = 0
    membership_distinct: int = 0
    equivalence_total: int = 0
    max_counterexample_len: int = 0

    def to_json(self) -> dict:
        return {
            "membership_total": self.membership_total,
            "membership_distinct": self.membership_distinct,
            "equivalence_total": self.equivalence_total,
            "max_counterexample_len": self.max_counterexample_len,
        }


@dataclass
class EquivAnswer:
    equivalent: bool
    sign: str | None = None  # POSITIVE: word in L(target) only; NEGATIVE: hypothesis only
    word: tuple | None = None


_DEAD = None


class Teacher:
    """Answers queries about a fixed target negotiation.

    A Teacher instance serves one learning session at a time; answers are
    cached (executions up to trace equivalence) and counted.
    """

    def __init__(self, target: Negotiation, state_budget: int = DEFAULT_STATE_BUDGET,
                 check_answers: bool = True):
        self.target = target
        self.state_budget = state_budget
        self.check_answers = check_answers
        self.stats = QueryStats()
        self._path_cache = {}
        self._exec_cache = {}
        self._target_sound = None

    # -- membership ---------------------------------------------------------

    def member_path_query(self, pi) -> bool:
        pi = tuple(tuple(l) for l in pi)
        self.stats.membership_total += 1
        if pi not in self._path_cache:
            self.stats.membership_distinct += 1
            self._path_cache[pi] = member_path(self.target, pi)
        return self._path_cache[pi]

    def member_exec_query(self, w) -> bool:
        key = traces.normal_form(self.target.alphabet, tuple(w))
        self.stats.membership_total += 1
        if key not in self._exec_cache:
            self.stats.membership_distinct += 1
            self._exec_cache[key] = member_exec(self.target, key)
        return self._exec_cache[key]

    # -- equivalence --------------------------------------------------------

    def target_is_sound(self) -> bool:
        if self._target_sound is None:
            self._target_sound = soundness.is_sound_semantic(
                self.target, budget=self.state_budget
            ).sound
        return self._target_sound

    def equiv_query(self, hypothesis: Negotiation) -> EquivAnswer:
        """Shortest execution separating target and hypothesis, if any.

        Fast path: when both sides are sound, language equality is decided on
        minimal path DFAs; the product BFS only runs to produce the witness.
        """
        if hypothesis.alphabet != self.target.alphabet:
            raise AlphabetMismatch("hypothesis alphabet differs from the target's")
        self.stats.equivalence_total += 1
        if self.target_is_sound() and soundness.is_sound_semantic(
            hypothesis, budget=self.state_budget
        ).sound:
            if automata.neg_equiv(self.target, hypothesis):
                return EquivAnswer(True)
        answer = self._product_search(hypothesis)
        if answer.word is not None:
            self.stats.max_counterexample_len = max(
                self.stats.max_counterexample_len, len(answer.word)
            )
            if self.check_answers:
                in_target = member_exec(self.target, answer.word)
                in_hyp = member_exec(hypothesis, answer.word)
                expected = (True, False) if answer.sign == POSITIVE else (False, True)
                if (in_target, in_hyp) != expected:
                    raise AssertionError(
                        f"equivalence counterexample {answer.word} fails replay"
                    )
        return answer

    def _product_search(self, hypothesis: Negotiation) -> EquivAnswer:
        """BFS over the synchronized product; a side goes to a dead sink when
        a letter is not enabled there. Expansion follows declared action
        order, so the first difference found is the shortest, lexicographically
        least counterexample."""
        t, h = self.target, hypothesis
        t_fin = t.final_configuration()
        h_fin = h.final_configuration()
        start = (t.initial_configuration(), h.initial_configuration())
        parent = {start: None}
        order = deque([start])

        def word_of(state):
            parts = []
            while parent[state] is not None:
                state, a = parent[state]
                parts.append(a)
            return tuple(reversed(parts))

        def differs(state):
            c1, c2 = state
            return (c1 == t_fin) != (c2 == h_fin)

        if differs(start):
            sign = POSITIVE if start[0] == t_fin else NEGATIVE
            return EquivAnswer(False, sign, ())
        while order:
            state = order.popleft()
            c1, c2 = state
            acts1 = set(enabled_actions(t, c1)) if c1 is not _DEAD else set()
            acts2 = set(enabled_actions(h, c2)) if c2 is not _DEAD else set()
            for a in t.alphabet.actions:
                if a not in acts1 and a not in acts2:
                    continue
                n1 = step(t, c1, a) if a in acts1 else _DEAD
                n2 = step(h, c2, a) if a in acts2 else _DEAD
                if n1 is _DEAD and n2 is _DEAD:
                    continue
                nxt = (n1, n2)
                if nxt in parent:
                    continue
                parent[nxt] = (state, a)
                if len(parent) > self.state_budget:
                    raise StateBudgetExceeded(
                        f"equivalence product exceeds {self.state_budget} states"
                    )
                if differs(nxt):
                    sign = POSITIVE if n1 == t_fin else NEGATIVE
                    return EquivAnswer(False, sign, word_of(nxt))
                order.append(nxt)
        return EquivAnswer(True)
