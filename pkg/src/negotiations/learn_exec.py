"""Active learning of sound deterministic negotiations from membership
queries on executions only.

Nodes and tests are Mazurkiewicz traces; transitions carry trace supports
S(u,b,p) (a (b,p)-step standing in for the progress the other processes make
while p crosses the transition). Counterexample analysis walks replayed
hypothesis paths backwards, and soundness is restored from pattern witnesses
before every equivalence query.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import soundness, traces
from .errors import (
    DescentExhausted,
    InvariantViolation,
    LearnerBug,
    NoDefectiveProjection,
    NoRepairFound,
    NoSplit,
    Unclassifiable,
)
from .model import Negotiation, empty_negotiation, validate
from .teacher import POSITIVE, Teacher

_ROUND_CAP = 100_000
FRESH_FIN = "qf"

# which side of the descent invariant currently fails its test
NODE_REJECTS = "node-rejects"
TRACE_REJECTS = "trace-rejects"


@dataclass
class AbsentTransE:
    """out_extend instance: r co-prime, u.r in L, min(r) not yet out of u."""

    state: tuple
    word: tuple


@dataclass
class TargetInstance:
    """target_extend instance: the biconditional
    u_prev . S(u_prev, action, process) . r in L  <=>  u_next . r in L
    fails; r joins T and closure splits a node."""

    u_prev: tuple
    action: str
    process: str
    u_next: tuple
    r: tuple


@dataclass
class ExecHypothesis:
    negotiation: Negotiation
    id_of: dict
    word_of: dict
    fin_id: str


class ExecLearner:
    def __init__(self, teacher: Teacher, debug: bool = False, log: list | None = None):
        self.teacher = teacher
        self.alpha = teacher.target.alphabet
        self.debug = debug
        self.log = log if log is not None else []
        self.q = []
        self.tests = []
        self.supports = {}

    # -- plumbing ------------------------------------------------------------

    def canon(self, w) -> tuple:
        return traces.normal_form(self.alpha, tuple(w))

    def member(self, *parts) -> bool:
        word = tuple(a for part in parts for a in part)
        return self.teacher.member_exec_query(word)

    def equiv_t(self, u, v) -> bool:
        return all(self.member(u, t) == self.member(v, t) for t in self.tests)

    def find_rep(self, word):
        for v in self.q:
            if self.equiv_t(word, v):
                return v
        return None

    def add_state(self, word):
        word = self.canon(word)
        if word in set(self.q):
            raise InvariantViolation(f"state {word} added twice")
        self.q.append(word)

    def add_test(self, t):
        t = self.canon(t)
        if t and not traces.is_coprime(self.alpha, t):
            raise InvariantViolation(f"test {t} is not co-prime")
        if t not in self.tests:
            self.tests.append(t)

    def out_of(self, u) -> set:
        return {b for (v, b, _) in self.supports if v == u}

    # -- hypothesis ----------------------------------------------------------

    def build_hypothesis(self) -> ExecHypothesis:
        finals = [u for u in self.q if self.member(u)]
        if len(finals) > 1:
            raise InvariantViolation(f"two accepted nodes: {finals[:2]}")
        id_of = {u: f"q{i}" for i, u in enumerate(self.q)}
        full = tuple(self.alpha.processes)
        dnode = {}
        for u in self.q:
            if finals and u == finals[0]:
                dnode[id_of[u]] = full
                continue
            t = next((t for t in self.tests if t and self.member(u, t)), None)
            if t is None:
                raise InvariantViolation(f"Pref broken: no passing test for {u}")
            head = traces.min_action(self.alpha, t)
            dnode[id_of[u]] = self.alpha.dom[head]
        delta = {}
        for (u, b, p), s in self.supports.items():
            rep = self.find_rep(u + s)
            if rep is None:
                raise InvariantViolation(f"Closure broken at {u} + {s}")
            delta[(id_of[u], b, p)] = id_of[rep]
        nodes = tuple(id_of[u] for u in self.q)
        if finals:
            fin_id = id_of[finals[0]]
        else:
            fin_id = FRESH_FIN
            nodes = nodes + (fin_id,)
            dnode[fin_id] = full
        neg = Negotiation(
            alphabet=self.alpha,
            nodes=nodes,
            dnode=dnode,
            delta=delta,
            init=id_of[self.q[0]],
            fin=fin_id,
        )
        problems = validate(neg)
        if problems:
            raise InvariantViolation("hypothesis fails validation: " + "; ".join(problems))
        word_of = {i: u for u, i in id_of.items()}
        return ExecHypothesis(neg, id_of, word_of, fin_id)

    # -- the two extension operations ----------------------------------------

    def out_extend(self, inst: AbsentTransE):
        u, r = inst.state, self.canon(inst.word)
        if not traces.is_coprime(self.alpha, r):
            raise InvariantViolation(f"out_extend word {r} is not co-prime")
        a = traces.min_action(self.alpha, r)
        if a in self.out_of(u):
            raise InvariantViolation(f"{a} already out of {u}")
        if not self.member(u, r):
            raise InvariantViolation(f"out_extend pre fails: {u} + {r} not accepted")
        for p in self.alpha.dom[a]:
            dec = traces.step_decomposition(self.alpha, r, p)
            support = self.canon(dec.support)
            if self.debug and not traces.is_step(self.alpha, support, a, p):
                raise InvariantViolation(f"support {support} is not a ({a},{p})-step")
            self.supports[(u, a, p)] = support
            if dec.tail:
                self.add_test(dec.tail)
        self.log.append({"event": "out_extend", "state": list(u), "word": list(r)})

    def target_extend(self, inst: TargetInstance):
        r = self.canon(inst.r)
        if r in self.tests:
            raise InvariantViolation(f"target test {r} already present")
        s = self.supports[(inst.u_prev, inst.action, inst.process)]
        left = self.member(inst.u_prev, s, r)
        right = self.member(inst.u_next, r)
        if left == right:
            raise InvariantViolation("target biconditional does not fail")
        self.add_test(r)
        self.log.append({
            "event": "target_extend",
            "transition": [list(inst.u_prev), inst.action, inst.process],
            "test": list(r),
        })

    def restore_closure(self) -> int:
        added = 0
        for (u, b, p), s in list(self.supports.items()):
            if self.find_rep(u + s) is None:
                self.add_state(u + s)
                added += 1
        if added:
            self.log.append({"event": "closure", "added": added})
        return added

    # -- walks and binary search ----------------------------------------------

    def _walk(self, hyp: ExecHypothesis, letters):
        """Nodes (as Q words) of the hypothesis walk from init along letters."""
        words = [self.q[0]]
        for (a, p) in letters:
            nid = hyp.id_of[words[-1]]
            nxt = hyp.negotiation.delta.get((nid, a, p))
            if nxt is None:
                return None
            words.append(hyp.word_of[nxt])
        return words

    def support_concat(self, hyp: ExecHypothesis, letters):
        """Concatenation of the stored supports along a hypothesis local
        path from the initial node; co-prime for nonempty paths, and its
        projection onto a pure p-path's process is the path's action word."""
        words = self._walk(hyp, letters)
        if words is None:
            raise LearnerBug(f"path {letters} leaves the hypothesis")
        return self.canon(self._sigma(words, letters))

    def _support_seq(self, words, letters):
        return [self.supports[(words[i], a, p)] for i, (a, p) in enumerate(letters)]

    def path_binary_search(self, words, letters, r) -> TargetInstance:
        """Adjacent flip of i -> member(u_i . s_{i+1}..s_k . r) along a walked
        hypothesis path; r is co-prime with the last letter's process minimal,
        or empty (then Closure forbids a flip at the last edge)."""
        k = len(letters)
        if k == 0:
            raise NoSplit("empty path in binary search")
        supports = self._support_seq(words, letters)
        tails = [None] * (k + 1)
        tails[k] = tuple(r)
        for i in range(k - 1, -1, -1):
            tails[i] = supports[i] + tails[i + 1]

        def g(i):
            return self.member(words[i], tails[i])

        lo, hi = 0, k
        g_lo, g_hi = g(lo), g(hi)
        if g_lo == g_hi:
            raise NoSplit("path endpoints agree")
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if g(mid) == g_lo:
                lo = mid
            else:
                hi = mid
        a, p = letters[lo]
        return TargetInstance(words[lo], a, p, words[hi], self.canon(tails[hi]))

    def _distinguishing_test(self, u, sigma, anchor):
        """A test splitting u from sigma that path_binary_search can consume:
        the empty test, a test u passes (its dmin is then dnode(u), which
        contains the anchor), or a sigma-passing test whose dmin contains the
        anchor."""
        for t in self.tests:
            du = self.member(u, t)
            ds = self.member(sigma, t)
            if du == ds:
                continue
            if not t or du or anchor in traces.dmin(self.alpha, t):
                return t
        return None

    # -- counterexample handling ------------------------------------------------

    def handle_negative(self, hyp: ExecHypothesis, w) -> TargetInstance:
        for p in self.alpha.processes:
            letters = traces.projection(self.alpha, w, p)
            words = self._walk(hyp, letters)
            if words is None:
                raise LearnerBug("negative counterexample projection leaves the hypothesis")
            sigma = tuple(a for s in self._support_seq(words, letters) for a in s)
            if not self.member(sigma):
                return self.path_binary_search(words, letters, ())
        raise NoDefectiveProjection(
            "all projection supports accepted for a negative counterexample"
        )

    def handle_positive(self, hyp: ExecHypothesis, w):
        pre = traces.max_executable_prefix(hyp.negotiation, w)
        if not pre.remainder:
            return self._positive_complete(hyp, pre)
        return self._positive_stuck(hyp, pre)

    def _positive_complete(self, hyp: ExecHypothesis, pre):
        """Counterexample fully executable but the end is not final."""
        anchor = next(
            (p for p in self.alpha.processes if pre.end.node_of(p) != hyp.fin_id),
            None,
        )
        if anchor is None:
            raise Unclassifiable("positive counterexample accepted by the hypothesis")
        words, letters = self._history_walk(hyp, pre.history[anchor], anchor)
        sigma = tuple(a for s in self._support_seq(words, letters) for a in s)
        t = self._distinguishing_test(words[-1], sigma, anchor)
        if t is None:
            raise Unclassifiable("no usable test splits the stranded node from its supports")
        return self.path_binary_search(words, letters, t)

    def _history_walk(self, hyp: ExecHypothesis, entries, process):
        words = [self.q[0]]
        letters = []
        for (src, a, dst) in entries:
            if hyp.word_of[src] != words[-1]:
                raise LearnerBug("replay history is not contiguous")
            words.append(hyp.word_of[dst])
            letters.append((a, process))
        return words, letters

    def _positive_stuck(self, hyp: ExecHypothesis, pre):
        rem = pre.remainder
        mins = traces.minimal_actions(self.alpha, rem)
        b = min(mins, key=self.alpha.action_index)
        e = next(
            i
            for i in traces.minimal_event_indices(self.alpha, rem)
            if rem[i] == b
        )
        v2, br2 = traces.upward_closure_split(self.alpha, rem, e)
        v = pre.prefix + v2
        br2 = self.canon(br2)
        node_of = {p: pre.end.node_of(p) for p in self.alpha.dom[b]}
        for p in self.alpha.dom[b]:
            u_p = hyp.word_of[node_of[p]]
            if not self.member(u_p, br2):
                return self._descend(hyp, pre, NODE_REJECTS, v=v, u=u_p, t=br2,
                                     anchor=p, companion=None)
            if b not in self.out_of(u_p):
                return AbsentTransE(u_p, br2)
        procs = self.alpha.dom[b]
        pair = next(
            ((p1, p2) for i, p1 in enumerate(procs) for p2 in procs[i + 1 :]
             if node_of[p1] != node_of[p2]),
            None,
        )
        if pair is None:
            raise Unclassifiable("action disabled although all its processes share a node")
        p1, p2 = pair
        u1, u2 = hyp.word_of[node_of[p1]], hyp.word_of[node_of[p2]]
        t = next((t for t in self.tests if self.member(u1, t) != self.member(u2, t)), None)
        if t is None:
            raise Unclassifiable(f"Uniqueness broken: {u1} vs {u2}")
        if not t:
            raise Unclassifiable("empty test distinguishes two non-final nodes")
        mv = self.member(v, t)
        if mv != self.member(u1, t):
            anchor, u_a = p1, u1
        elif mv != self.member(u2, t):
            anchor, u_a = p2, u2
        else:
            raise Unclassifiable("trace side matches both scattered nodes")
        if mv:
            return self._descend(hyp, pre, NODE_REJECTS, v=v, u=u_a, t=t,
                                 anchor=anchor, companion=None)
        return self._descend(hyp, pre, TRACE_REJECTS, v=v, u=u_a, t=t,
                             anchor=anchor, companion=br2)

    def _descend(self, hyp: ExecHypothesis, pre, mismatch, v, u, t, anchor, companion):
        """Backwards descent over the anchor's replayed path.

        Invariants per level: the anchor sits at node `u` after replaying the
        executable part of `v`; with NODE_REJECTS the node fails the test the
        trace passes (u.t not in L, v.t in L); with TRACE_REJECTS it is the
        other way around and `companion` is a co-prime trace the trace side
        still passes.
        """
        stack = list(pre.history[anchor])
        v = tuple(v)
        for _ in range(len(v) + 2):
            e = max(
                (i for i, a in enumerate(v) if anchor in self.alpha.dom_set(a)),
                default=None,
            )
            if e is None:
                raise DescentExhausted("anchor has no event left in the trace")
            c = v[e]
            if not stack:
                raise DescentExhausted("replay history exhausted before the trace")
            src, action, dst = stack.pop()
            if action != c or hyp.word_of[dst] != u:
                raise DescentExhausted("replay history does not match the trace")
            u_prev = hyp.word_of[src]
            v_prev, s_k = traces.upward_closure_split(self.alpha, v, e)
            s = self.supports[(u_prev, c, anchor)]
            check1 = self.member(u_prev, s, t)
            if mismatch is NODE_REJECTS:
                if check1:
                    return TargetInstance(u_prev, c, anchor, u, self.canon(t))
                if self.member(v_prev, s, t):
                    v, u, t = v_prev, u_prev, self.canon(s + t)
                    continue
                t_pass = next(
                    (
                        tp
                        for tp in self.tests
                        if (not tp or anchor in traces.dmin(self.alpha, tp))
                        and self.member(u_prev, s, tp)
                    ),
                    None,
                )
                if t_pass is None:
                    raise DescentExhausted("no passing continuation for the predecessor")
                if self.member(v_prev, s, t_pass):
                    raise DescentExhausted("suffix-exchange property violated on the node-rejecting side")
                companion = self.canon(s_k + t)
                v, u, t = v_prev, u_prev, self.canon(s + t_pass)
                mismatch = TRACE_REJECTS
                continue
            # trace side rejects
            if not check1:
                return TargetInstance(u_prev, c, anchor, u, self.canon(t))
            if not self.member(v_prev, s, t):
                v, u, t = v_prev, u_prev, self.canon(s + t)
                companion = self.canon(s_k + companion)
                continue
            raise DescentExhausted("suffix-exchange property violated on the trace-rejecting side")
        raise DescentExhausted("descent failed to terminate")

    # -- soundness repairs -------------------------------------------------------

    def make_sound(self, hyp: ExecHypothesis):
        """None when the hypothesis is sound; otherwise an extension instance
        derived from a pattern witness."""
        sem = soundness.is_sound_semantic(hyp.negotiation)
        if sem.sound:
            return None
        witness = soundness.find_any_pattern(hyp.negotiation)
        if witness is None:
            raise NoRepairFound("semantically unsound but no pattern witness found")
        if witness.kind == "B":
            return self._convert_b(hyp, witness)
        if witness.kind == "C":
            return self._convert_c(hyp, witness)
        return self._convert_f(hyp, witness)

    def _sigma(self, words, letters):
        return tuple(a for s in self._support_seq(words, letters) for a in s)

    def _try_split_path(self, hyp: ExecHypothesis, letters, anchor):
        """Target instance when the endpoint of the walked path is not
        trace-equivalent to its support concatenation."""
        words = self._walk(hyp, letters)
        if words is None:
            raise LearnerBug("pattern witness path leaves the hypothesis")
        sigma = self._sigma(words, letters)
        t = self._distinguishing_test(words[-1], sigma, anchor)
        if t is None:
            return None
        return self.path_binary_search(words, letters, t)

    def _convert_f(self, hyp: ExecHypothesis, w):
        prefix = tuple(w.access_path)
        if prefix:
            inst = self._try_split_path(hyp, prefix, prefix[-1][1])
            if inst is not None:
                return inst
        for action_path in (
            ((w.action, w.p1),) + tuple(w.path1),
            ((w.action, w.p2),) + tuple(w.path2),
        ):
            for ell in range(1, len(action_path) + 1):
                letters = prefix + action_path[:ell]
                inst = self._try_split_path(hyp, letters, letters[-1][1])
                if inst is not None:
                    return inst
        raise NoRepairFound("fork witness produced no splittable prefix")

    def _convert_c(self, hyp: ExecHypothesis, w):
        entry = tuple(w.entry_path)
        cycle = tuple(w.cycle_path)
        if entry:
            inst = self._try_split_path(hyp, entry, entry[-1][1])
            if inst is not None:
                return inst
        cap = 2 * (len(self.q) + len(self.supports))
        k = 2
        while k <= max(cap, 2):
            letters = entry + cycle * k
            inst = self._try_split_path(hyp, letters, letters[-1][1])
            if inst is not None:
                return inst
            k *= 2
        raise NoRepairFound("cycle witness stayed consistent past the iteration cap")

    def _convert_b(self, hyp: ExecHypothesis, w):
        p = w.process
        prefix = tuple(w.access_path)
        if prefix:
            inst = self._try_split_path(hyp, prefix, p)
            if inst is not None:
                return inst
        words = self._walk(hyp, prefix)
        u = words[-1]
        sigma = self._sigma(words, prefix)
        t_pass = next((t for t in self.tests if t and self.member(u, t)), None)
        if t_pass is None:
            raise NoRepairFound("blocked node has no nonempty passing test")
        chunks = self._p_chunks(t_pass, p)
        suffix_words = [None] * (len(chunks) + 1)
        suffix_words[len(chunks)] = ()
        for i in range(len(chunks) - 1, -1, -1):
            suffix_words[i] = chunks[i] + suffix_words[i + 1]
        walked_words = [u]
        walked_letters = []
        boundary = None
        for i, chunk in enumerate(chunks):
            a_i = traces.min_action(self.alpha, chunk)
            nid = hyp.id_of[walked_words[-1]]
            nxt = hyp.negotiation.delta.get((nid, a_i, p))
            if nxt is None:
                if self.member(walked_words[-1], suffix_words[i]):
                    return AbsentTransE(walked_words[-1], self.canon(suffix_words[i]))
                boundary = i
                break
            walked_words.append(hyp.word_of[nxt])
            walked_letters.append((a_i, p))
        if boundary is None:
            full_letters = prefix + tuple(walked_letters)
            inst = self._try_split_path(hyp, full_letters, p)
            if inst is not None:
                return inst
            return self._b_hybrid_scan(hyp, prefix, walked_words, walked_letters,
                                       chunks, suffix_words, p)
        return self._b_pure_scan(hyp, prefix, walked_words, walked_letters,
                                 chunks, suffix_words, p, boundary)

    def _p_chunks(self, t, p):
        """Decompose a co-prime test with p minimal into chunks anchored at
        p's events: chunk i is the upward closure of the i-th p-event minus
        the closure of the next one."""
        positions = [i for i, a in enumerate(t) if p in self.alpha.dom_set(a)]
        if not positions:
            raise LearnerBug(f"test {t} has no event of {p}")
        closures = [set(traces.upward_closure_indices(self.alpha, t, e)) for e in positions]
        closures.append(set())
        chunks = []
        for i in range(len(positions)):
            keep = closures[i] - closures[i + 1]
            chunks.append(tuple(t[j] for j in range(len(t)) if j in keep))
        return chunks

    def _b_hybrid_scan(self, hyp, prefix, walked_words, walked_letters,
                       chunks, suffix_words, p):
        """Flip scan over sigma-prefixed hybrid words (full-walk case)."""
        k = len(walked_letters)
        entry_words = self._walk(hyp, prefix)
        sigma0 = self._sigma(entry_words, prefix)
        walk_supports = self._support_seq(walked_words, walked_letters)

        def h(i):
            sig = sigma0 + tuple(a for s in walk_supports[:i] for a in s)
            return self.member(sig, suffix_words[i])

        lo, hi = 0, k
        h_lo, h_hi = h(lo), h(hi)
        if not h_lo or h_hi:
            raise NoRepairFound("blocking witness hybrid endpoints out of shape")
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if h(mid) == h_lo:
                lo = mid
            else:
                hi = mid
        return self._b_flip_case(hyp, prefix, walked_words, walked_letters,
                                 chunks, suffix_words, p, lo)

    def _b_pure_scan(self, hyp, prefix, walked_words, walked_letters,
                     chunks, suffix_words, p, boundary):
        """Flip scan over the walked-node words (truncated-walk case)."""

        def f(i):
            return self.member(walked_words[i], suffix_words[i])

        lo, hi = 0, boundary
        f_lo, f_hi = f(lo), f(hi)
        if f_lo == f_hi:
            raise NoRepairFound("blocking witness produced equal endpoints")
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if f(mid) == f_lo:
                lo = mid
            else:
                hi = mid
        return self._b_flip_case(hyp, prefix, walked_words, walked_letters,
                                 chunks, suffix_words, p, lo)

    def _b_flip_case(self, hyp, prefix, walked_words, walked_letters,
                     chunks, suffix_words, p, i):
        """Resolve a flip between positions i and i+1 of the chunk walk into
        a Target instance (possibly via the suffix-exchange argument)."""
        a_next = walked_letters[i][0]
        if not self.member(walked_words[i], suffix_words[i]):
            letters = prefix + tuple(walked_letters[:i])
            if not letters:
                raise NoRepairFound("flip at the walk's origin")
            return self.path_binary_search(
                self._walk(hyp, letters), letters, self.canon(suffix_words[i])
            )
        if self.member(walked_words[i + 1], suffix_words[i + 1]):
            letters = prefix + tuple(walked_letters[: i + 1])
            return self.path_binary_search(
                self._walk(hyp, letters), letters, self.canon(suffix_words[i + 1])
            )
        r = suffix_words[i + 1]
        if not r:
            raise NoRepairFound("suffix-exchange case degenerated to an empty test")
        s = self.supports[(walked_words[i], a_next, p)]
        if not self.member(walked_words[i], s, r):
            raise NoRepairFound("exchanged suffix failed to verify")
        return TargetInstance(walked_words[i], a_next, p, walked_words[i + 1],
                              self.canon(r))

    # -- invariants ---------------------------------------------------------------

    def verify_invariants(self):
        for i, u in enumerate(self.q):
            for v in self.q[i + 1 :]:
                if self.equiv_t(u, v):
                    raise InvariantViolation(f"Uniqueness: {u} == {v} under T")
        for u in self.q:
            if not any(self.member(u, t) for t in self.tests):
                raise InvariantViolation(f"Pref: {u} has no passing test")
        for (u, b, p), s in self.supports.items():
            for qq in self.alpha.dom[b]:
                if (u, b, qq) not in self.supports:
                    raise InvariantViolation(f"Domain: S({u},{b},{qq}) missing")
            ok = False
            for t in self.tests:
                if self.member(u, s, t) and (not t or p in traces.dmin(self.alpha, t)):
                    ok = True
                    break
            if not ok:
                raise InvariantViolation(f"Pref': no suitable test after S({u},{b},{p})")
            if self.find_rep(u + s) is None:
                raise InvariantViolation(f"Closure: {u} + {s} has no representative")
            if not traces.is_step(self.alpha, s, b, p):
                raise InvariantViolation(f"support S({u},{b},{p}) = {s} is not a step")
        for t in self.tests:
            if t and not traces.is_coprime(self.alpha, t):
                raise InvariantViolation(f"test {t} is not co-prime")
        self.log.append({"event": "invariants", "ok": True})


def learn(teacher: Teacher, debug: bool = False, log: list | None = None) -> Negotiation:
    """Main loop of the execution-only learner: bootstrap, then repair the
    hypothesis to soundness before every equivalence query."""
    learner = ExecLearner(teacher, debug=debug, log=log)
    empty = empty_negotiation(teacher.target.alphabet)
    ans = teacher.equiv_query(empty)
    learner.log.append({"event": "equiv", "equivalent": ans.equivalent,
                        "sign": ans.sign, "counterexample": list(ans.word or ()),
                        "sound_hypothesis": False, "bootstrap": True})
    if ans.equivalent:
        return empty
    if ans.sign != POSITIVE:
        raise LearnerBug("empty hypothesis produced a negative counterexample")
    w = learner.canon(ans.word)
    learner.add_state(())
    learner.add_test(())
    learner.add_test(w)
    learner.out_extend(AbsentTransE((), w))
    learner.restore_closure()
    if debug:
        learner.verify_invariants()
    for _ in range(_ROUND_CAP):
        hyp = learner.build_hypothesis()
        for _ in range(_ROUND_CAP):
            repair = learner.make_sound(hyp)
            if repair is None:
                break
            _apply(learner, repair)
            learner.restore_closure()
            if debug:
                learner.verify_invariants()
            hyp = learner.build_hypothesis()
        else:
            raise LearnerBug("soundness repairs failed to converge")
        ans = teacher.equiv_query(hyp.negotiation)
        learner.log.append({"event": "equiv", "equivalent": ans.equivalent,
                            "sign": ans.sign, "counterexample": list(ans.word or ()),
                            "sound_hypothesis": True,
                            "hypothesis_nodes": len(hyp.negotiation.nodes)})
        if ans.equivalent:
            return hyp.negotiation
        if ans.sign == POSITIVE:
            inst = learner.handle_positive(hyp, ans.word)
        else:
            inst = learner.handle_negative(hyp, ans.word)
        _apply(learner, inst)
        learner.restore_closure()
        if debug:
            learner.verify_invariants()
    raise LearnerBug("round cap exceeded without convergence")


def _apply(learner: ExecLearner, inst):
    if isinstance(inst, AbsentTransE):
        learner.out_extend(inst)
    else:
        learner.target_extend(inst)
