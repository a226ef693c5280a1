"""Shared desk fixtures."""

from negotiations.model import DistributedAlphabet, Negotiation


def ping():
    """Two processes handshake twice: n0 -a-> n1 -b-> nf."""
    alpha = DistributedAlphabet(
        processes=("p", "q"),
        actions=("a", "b"),
        dom={"a": ("p", "q"), "b": ("p", "q")},
    )
    return Negotiation(
        alphabet=alpha,
        nodes=("n0", "n1", "nf"),
        dnode={"n0": ("p", "q"), "n1": ("p", "q"), "nf": ("p", "q")},
        delta={
            ("n0", "a", "p"): "n1",
            ("n0", "a", "q"): "n1",
            ("n1", "b", "p"): "nf",
            ("n1", "b", "q"): "nf",
        },
        init="n0",
        fin="nf",
    )


def fork():
    """c splits p and q, x/y run independently, d joins: L = {cxyd, cyxd}."""
    alpha = DistributedAlphabet(
        processes=("p", "q"),
        actions=("c", "x", "y", "d"),
        dom={"c": ("p", "q"), "x": ("p",), "y": ("q",), "d": ("p", "q")},
    )
    return Negotiation(
        alphabet=alpha,
        nodes=("n0", "n1", "n2", "n3", "nf"),
        dnode={
            "n0": ("p", "q"),
            "n1": ("p",),
            "n2": ("q",),
            "n3": ("p", "q"),
            "nf": ("p", "q"),
        },
        delta={
            ("n0", "c", "p"): "n1",
            ("n0", "c", "q"): "n2",
            ("n1", "x", "p"): "n3",
            ("n2", "y", "q"): "n3",
            ("n3", "d", "p"): "nf",
            ("n3", "d", "q"): "nf",
        },
        init="n0",
        fin="nf",
    )


def fork_unsound():
    """fork() without the d-transitions: (n3, n3) deadlocks."""
    n = fork()
    delta = {k: v for k, v in n.delta.items() if k[1] != "d"}
    return Negotiation(
        alphabet=n.alphabet,
        nodes=n.nodes,
        dnode=n.dnode,
        delta=delta,
        init=n.init,
        fin=n.fin,
    )


def fork_split():
    """fork() with the join node split: p reaches n3a, q reaches n3b, both
    full-domain. Classic F-pattern deadlock."""
    alpha = fork().alphabet
    return Negotiation(
        alphabet=alpha,
        nodes=("n0", "n1", "n2", "n3a", "n3b", "nf"),
        dnode={
            "n0": ("p", "q"),
            "n1": ("p",),
            "n2": ("q",),
            "n3a": ("p", "q"),
            "n3b": ("p", "q"),
            "nf": ("p", "q"),
        },
        delta={
            ("n0", "c", "p"): "n1",
            ("n0", "c", "q"): "n2",
            ("n1", "x", "p"): "n3a",
            ("n2", "y", "q"): "n3b",
            ("n3a", "d", "p"): "nf",
            ("n3a", "d", "q"): "nf",
            ("n3b", "d", "p"): "nf",
            ("n3b", "d", "q"): "nf",
        },
        init="n0",
        fin="nf",
    )


def loop2():
    """Two processes looping jointly with a dominated exit choice."""
    alpha = DistributedAlphabet(
        processes=("p", "q"),
        actions=("a", "b", "e"),
        dom={"a": ("p", "q"), "b": ("p", "q"), "e": ("p", "q")},
    )
    return Negotiation(
        alphabet=alpha,
        nodes=("n0", "n1", "nf"),
        dnode={"n0": ("p", "q"), "n1": ("p", "q"), "nf": ("p", "q")},
        delta={
            ("n0", "a", "p"): "n1",
            ("n0", "a", "q"): "n1",
            ("n1", "b", "p"): "n1",
            ("n1", "b", "q"): "n1",
            ("n1", "e", "p"): "nf",
            ("n1", "e", "q"): "nf",
        },
        init="n0",
        fin="nf",
    )


def mod15():
    """Two processes counting a shared action modulo 15, closing with `a`
    from the zero state. L = { b^(15k) a : k >= 0 }."""
    alpha = DistributedAlphabet(
        processes=("p", "q"),
        actions=("a", "b"),
        dom={"a": ("p", "q"), "b": ("p", "q")},
    )
    nodes = tuple(f"c{i}" for i in range(15)) + ("nf",)
    dnode = {m: ("p", "q") for m in nodes}
    delta = {}
    for i in range(15):
        for proc in ("p", "q"):
            delta[(f"c{i}", "b", proc)] = f"c{(i + 1) % 15}"
    for proc in ("p", "q"):
        delta[("c0", "a", proc)] = "nf"
    return Negotiation(
        alphabet=alpha, nodes=nodes, dnode=dnode, delta=delta, init="c0", fin="nf"
    )


def two_period():
    """Two lockstep branches with loops of period 2 and 3 sharing their
    suffix letters: L = {a x^2k c} + {b x^3k c}. The branch states agree on
    every tail the absent-transition repairs produce, so the learners must
    split a wrongly merged state via a negative counterexample."""
    alpha = DistributedAlphabet(
        processes=("p", "q"),
        actions=("a", "b", "c", "x"),
        dom={k: ("p", "q") for k in ("a", "b", "c", "x")},
    )
    nodes = ("n0", "A0", "A1", "B0", "B1", "B2", "nf")
    dnode = {m: ("p", "q") for m in nodes}
    delta = {}
    for pr in ("p", "q"):
        delta[("n0", "a", pr)] = "A0"
        delta[("n0", "b", pr)] = "B0"
        delta[("A0", "x", pr)] = "A1"
        delta[("A1", "x", pr)] = "A0"
        delta[("A0", "c", pr)] = "nf"
        delta[("B0", "x", pr)] = "B1"
        delta[("B1", "x", pr)] = "B2"
        delta[("B2", "x", pr)] = "B0"
        delta[("B0", "c", pr)] = "nf"
    return Negotiation(
        alphabet=alpha, nodes=nodes, dnode=dnode, delta=delta, init="n0", fin="nf"
    )


def forked_periods():
    """A fork whose two single-process blocks loop with periods 2 and 3
    before rejoining; wrong merges inside a block surface only through
    concurrent counterexamples."""
    alpha = DistributedAlphabet(
        processes=("p", "q"),
        actions=("c", "u", "v", "w", "z", "d"),
        dom={
            "c": ("p", "q"),
            "u": ("p",),
            "v": ("p",),
            "w": ("q",),
            "z": ("q",),
            "d": ("p", "q"),
        },
    )
    nodes = ("n0", "P0", "P1", "Q0", "Q1", "Q2", "J", "nf")
    dnode = {
        "n0": ("p", "q"),
        "P0": ("p",),
        "P1": ("p",),
        "Q0": ("q",),
        "Q1": ("q",),
        "Q2": ("q",),
        "J": ("p", "q"),
        "nf": ("p", "q"),
    }
    delta = {
        ("n0", "c", "p"): "P0",
        ("n0", "c", "q"): "Q0",
        ("P0", "u", "p"): "P1",
        ("P1", "u", "p"): "P0",
        ("P0", "v", "p"): "J",
        ("Q0", "w", "q"): "Q1",
        ("Q1", "w", "q"): "Q2",
        ("Q2", "w", "q"): "Q0",
        ("Q0", "z", "q"): "J",
        ("J", "d", "p"): "nf",
        ("J", "d", "q"): "nf",
    }
    return Negotiation(
        alphabet=alpha, nodes=nodes, dnode=dnode, delta=delta, init="n0", fin="nf"
    )


def ping_over_mod15():
    """A two-step handshake over mod15's alphabet (accepts {b a})."""
    alpha = mod15().alphabet
    return Negotiation(
        alphabet=alpha,
        nodes=("m0", "m1", "mf"),
        dnode={"m0": ("p", "q"), "m1": ("p", "q"), "mf": ("p", "q")},
        delta={
            ("m0", "b", "p"): "m1",
            ("m0", "b", "q"): "m1",
            ("m1", "a", "p"): "mf",
            ("m1", "a", "q"): "mf",
        },
        init="m0",
        fin="mf",
    )


def editorial():
    """Four processes, a board workflow: parallel setup, a technical-check
    loop between TS and EC, a vote, and a joint decision."""
    alpha = DistributedAlphabet(
        processes=("NA", "TS", "EC", "EM"),
        actions=("appl", "setup", "dinit", "tech", "svote", "vote", "dec"),
        dom={
            "appl": ("NA", "TS", "EC", "EM"),
            "setup": ("NA", "TS"),
            "dinit": ("EC", "EM"),
            "tech": ("TS", "EC"),
            "svote": ("TS", "EC"),
            "vote": ("EC", "EM"),
            "dec": ("NA", "TS", "EC", "EM"),
        },
    )
    return Negotiation(
        alphabet=alpha,
        nodes=("n0", "n1", "n2", "n3", "n4", "n5", "nf"),
        dnode={
            "n0": ("NA", "TS", "EC", "EM"),
            "n1": ("NA", "TS"),
            "n2": ("EC", "EM"),
            "n3": ("TS", "EC"),
            "n4": ("EC", "EM"),
            "n5": ("NA", "TS", "EC", "EM"),
            "nf": ("NA", "TS", "EC", "EM"),
        },
        delta={
            ("n0", "appl", "NA"): "n1",
            ("n0", "appl", "TS"): "n1",
            ("n0", "appl", "EC"): "n2",
            ("n0", "appl", "EM"): "n2",
            ("n1", "setup", "NA"): "n5",
            ("n1", "setup", "TS"): "n3",
            ("n2", "dinit", "EC"): "n3",
            ("n2", "dinit", "EM"): "n4",
            ("n3", "tech", "TS"): "n3",
            ("n3", "tech", "EC"): "n3",
            ("n3", "svote", "TS"): "n5",
            ("n3", "svote", "EC"): "n4",
            ("n4", "vote", "EC"): "n5",
            ("n4", "vote", "EM"): "n5",
            ("n5", "dec", "NA"): "nf",
            ("n5", "dec", "TS"): "nf",
            ("n5", "dec", "EC"): "nf",
            ("n5", "dec", "EM"): "nf",
        },
        init="n0",
        fin="nf",
    )
