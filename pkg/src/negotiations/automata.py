"""Partial DFAs over local letters a@p, minimization, and the negotiation
round-trip: Paths(N) as a DFA, dom-completeness, and rebuilding a negotiation
from a dom-complete DFA. Minimal DFAs are canonically BFS-renamed, so
isomorphism of minimal forms is plain structural equality.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import (
    AlphabetMismatch,
    FinalHasOutgoing,
    MultipleFinals,
    NoTransition,
    NotDomComplete,
)
from .model import DistributedAlphabet, Negotiation


@dataclass
class PartialDfa:
    """Deterministic, possibly incomplete automaton over A_dom letters."""

    alphabet: DistributedAlphabet
    states: tuple
    delta: dict  # (state, (action, process)) -> state
    init: str
    finals: frozenset

    def __post_init__(self):
        self.states = tuple(self.states)
        self.finals = frozenset(self.finals)
        state_set = set(self.states)
        if self.init not in state_set:
            raise ValueError("initial state not declared")
        if not self.finals <= state_set:
            raise ValueError("final states not declared")
        for (s, (a, p)), t in self.delta.items():
            if s not in state_set or t not in state_set:
                raise ValueError(f"transition ({s},{a}@{p}) -> {t} references unknown state")
            if a not in set(self.alphabet.actions) or p not in self.alphabet.dom_set(a):
                raise ValueError(f"illegal letter {a}@{p}")

    def out(self, s) -> tuple:
        """Outgoing letters of `s`, in declared letter order."""
        return tuple(l for l in self.alphabet.local_letters() if (s, l) in self.delta)

    def accepts(self, word) -> bool:
        s = self.init
        for letter in word:
            s = self.delta.get((s, tuple(letter)))
            if s is None:
                return False
        return s in self.finals

    def run(self, word) -> str:
        s = self.init
        for i, letter in enumerate(word):
            nxt = self.delta.get((s, tuple(letter)))
            if nxt is None:
                raise NoTransition(i, tuple(letter), s)
            s = nxt
        return s


def paths_dfa(n: Negotiation) -> PartialDfa:
    """The negotiation graph read as a DFA accepting Paths(N); trimmed."""
    delta = {(m, (a, p)): t for (m, a, p), t in n.delta.items()}
    dfa = PartialDfa(
        alphabet=n.alphabet,
        states=n.nodes,
        delta=delta,
        init=n.init,
        finals=frozenset({n.fin}),
    )
    return trim(dfa)


def trim(dfa: PartialDfa) -> PartialDfa:
    """Drop states not reachable from init or not co-reachable from a final.
    The initial state is always kept (possibly as the sole, non-accepting
    state of an empty-language automaton)."""
    succ = {}
    pred = {}
    for (s, l), t in dfa.delta.items():
        succ.setdefault(s, []).append(t)
        pred.setdefault(t, []).append(s)
    fwd = {dfa.init}
    queue = deque([dfa.init])
    while queue:
        s = queue.popleft()
        for t in succ.get(s, ()):
            if t not in fwd:
                fwd.add(t)
                queue.append(t)
    bwd = set(dfa.finals)
    queue = deque(dfa.finals)
    while queue:
        s = queue.popleft()
        for t in pred.get(s, ()):
            if t not in bwd:
                bwd.add(t)
                queue.append(t)
    keep = (fwd & bwd) | {dfa.init}
    return PartialDfa(
        alphabet=dfa.alphabet,
        states=tuple(s for s in dfa.states if s in keep),
        delta={
            (s, l): t for (s, l), t in dfa.delta.items() if s in keep and t in keep
        },
        init=dfa.init,
        finals=dfa.finals & keep,
    )


_SINK = "__sink__"


def minimize(dfa: PartialDfa) -> PartialDfa:
    """Complete with a sink, refine partitions Moore-style, strip the sink
    class, trim, and rename canonically by BFS order."""
    letters = dfa.alphabet.local_letters()
    dfa = trim(dfa)
    states = list(dfa.states) + [_SINK]

    def target(s, l):
        if s == _SINK:
            return _SINK
        return dfa.delta.get((s, l), _SINK)

    # Moore refinement: split blocks by (block of successor per letter).
    block = {s: (s in dfa.finals) for s in states}
    while True:
        sig = {s: (block[s], tuple(block[target(s, l)] for l in letters)) for s in states}
        classes = {}
        for s in states:
            classes.setdefault(sig[s], []).append(s)
        new_block = {}
        for i, (_, members) in enumerate(sorted(classes.items(), key=lambda kv: str(kv[0]))):
            for s in members:
                new_block[s] = i
        if len(set(new_block.values())) == len(set(block.values())):
            block = new_block
            break
        block = new_block

    sink_class = block[_SINK]
    class_of = {s: block[s] for s in dfa.states if block[s] != sink_class}
    if not class_of:
        return PartialDfa(dfa.alphabet, ("s0",), {}, "s0", frozenset())
    init_class = block[dfa.init]
    if init_class == sink_class:
        return PartialDfa(dfa.alphabet, ("s0",), {}, "s0", frozenset())
    delta = {}
    finals = set()
    for s in dfa.states:
        if block[s] == sink_class:
            continue
        if s in dfa.finals:
            finals.add(block[s])
        for l in letters:
            t = target(s, l)
            if block[t] != sink_class:
                delta[(block[s], l)] = block[t]
    merged = PartialDfa(
        alphabet=dfa.alphabet,
        states=tuple(sorted(set(class_of.values()))),
        delta=delta,
        init=init_class,
        finals=frozenset(finals),
    )
    return canonical_relabel(trim(merged))


def canonical_relabel(dfa: PartialDfa) -> PartialDfa:
    """Deterministic BFS renaming s0, s1, ... expanding letters in declared
    order; minimal DFAs of the same language become structurally equal."""
    letters = dfa.alphabet.local_letters()
    name = {dfa.init: "s0"}
    order = [dfa.init]
    queue = deque([dfa.init])
    while queue:
        s = queue.popleft()
        for l in letters:
            t = dfa.delta.get((s, l))
            if t is not None and t not in name:
                name[t] = f"s{len(name)}"
                order.append(t)
                queue.append(t)
    if len(name) != len(dfa.states):
        # unreachable states survive only in untrimmed automata
        for s in dfa.states:
            if s not in name:
                name[s] = f"s{len(name)}"
                order.append(s)
    return PartialDfa(
        alphabet=dfa.alphabet,
        states=tuple(name[s] for s in order),
        delta={(name[s], l): name[t] for (s, l), t in dfa.delta.items()},
        init=name[dfa.init],
        finals=frozenset(name[s] for s in dfa.finals),
    )


def is_dom_complete(dfa: PartialDfa):
    """(ok, violations) for the dom-completeness conditions."""
    violations = []
    alpha = dfa.alphabet
    for s in dfa.states:
        letters = dfa.out(s)
        acts = {a for (a, _) in letters}
        for a in acts:
            present = {p for (b, p) in letters if b == a}
            missing = alpha.dom_set(a) - present
            for p in sorted(missing, key=alpha.proc_index):
                violations.append(f"state {s!r}: {a}@{next(iter(present))} present but {a}@{p} missing")
        doms = {alpha.dom_set(a) for a in acts}
        if len(doms) > 1:
            violations.append(f"state {s!r}: outgoing actions {sorted(acts)} have differing domains")
    init_acts = {a for (a, _) in dfa.out(dfa.init)}
    if not any(alpha.dom_set(a) == frozenset(alpha.processes) for a in init_acts):
        violations.append("initial state has no outgoing action with full process domain")
    return (not violations, violations)


def negotiation_from_dfa(dfa: PartialDfa, dnode_hints: dict | None = None) -> Negotiation:
    """Rebuild a negotiation from a dom-complete DFA with a unique sink final.

    `dnode_hints` optionally supplies domains for non-final states without
    outgoing letters (learner hypotheses contain such states; trimmed minimal
    DFAs never do).
    """
    ok, violations = is_dom_complete(dfa)
    if not ok:
        raise NotDomComplete("; ".join(violations))
    if len(dfa.finals) != 1:
        raise MultipleFinals(f"expected exactly one final state, got {sorted(dfa.finals)}")
    fin = next(iter(dfa.finals))
    if dfa.out(fin):
        raise FinalHasOutgoing(f"final state {fin!r} has outgoing letters")
    alpha = dfa.alphabet
    full = tuple(alpha.processes)
    dnode = {}
    for s in dfa.states:
        letters = dfa.out(s)
        if s == fin:
            dnode[s] = full
        elif letters:
            dnode[s] = alpha.dom[letters[0][0]]
        elif dnode_hints and s in dnode_hints:
            dnode[s] = tuple(p for p in alpha.processes if p in set(dnode_hints[s]))
        else:
            raise NotDomComplete(f"state {s!r} has no outgoing letters and no domain hint")
    delta = {(s, a, p): t for (s, (a, p)), t in dfa.delta.items()}
    return Negotiation(
        alphabet=alpha,
        nodes=dfa.states,
        dnode=dnode,
        delta=delta,
        init=dfa.init,
        fin=fin,
    )


def minimize_negotiation(n: Negotiation) -> Negotiation:
    """The canonical minimal negotiation with the same language (for sound
    deterministic input)."""
    return negotiation_from_dfa(minimize(paths_dfa(n)))


def homomorphism(n: Negotiation, m: Negotiation):
    """Node map n -> m sending each node to the state its access path reaches
    in m; returns None when the map fails to preserve labeled transitions
    (a bug signal, given m = minimize_negotiation(n))."""
    access = {n.init: ()}
    queue = deque([n.init])
    edges = {}
    for (src, a, p), t in sorted(n.delta.items()):
        edges.setdefault(src, []).append(((a, p), t))
    while queue:
        s = queue.popleft()
        for letter, t in edges.get(s, ()):
            if t not in access:
                access[t] = access[s] + (letter,)
                queue.append(t)
    mapping = {}
    for node in n.nodes:
        if node not in access:
            return None
        cur = m.init
        for (a, p) in access[node]:
            cur = m.delta.get((cur, a, p))
            if cur is None:
                return None
        mapping[node] = cur
    for (src, a, p), t in n.delta.items():
        if m.delta.get((mapping[src], a, p)) != mapping[t]:
            return None
    if mapping[n.init] != m.init or mapping[n.fin] != m.fin:
        return None
    return mapping


def neg_equiv(n1: Negotiation, n2: Negotiation) -> bool:
    """Language equivalence of sound deterministic negotiations: compare
    canonical minimal DFAs of their local-path languages."""
    if n1.alphabet != n2.alphabet:
        raise AlphabetMismatch("negotiations use different distributed alphabets")
    d1 = minimize(paths_dfa(n1))
    d2 = minimize(paths_dfa(n2))
    return (
        d1.states == d2.states
        and d1.delta == d2.delta
        and d1.init == d2.init
        and d1.finals == d2.finals
    )
