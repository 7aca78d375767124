"""Evidence geometry: clamping and per-node evidence-flow classification.

Diagnostic queries fix a handful of sensory nodes and ask for posteriors over
the model nodes.  Two structural facts about the evidence make sampling much
cheaper and both are computed here.

Clamping: a node can only have been involved in the observed positive
evidence if it is an ancestor of a true evidence node or a consequence of
such an ancestor.  Everything else is pinned false for the whole run.  A
true evidence node counts as its own ancestor; false evidence emits no
signals (false observations rule causes out, they never implicate them).

Flow classification: a free node whose children carry no evidence sees only
causal flow from its parents and can be redrawn directly from its noisy-or
distribution (forward-sampled).  A node with at least one child that is an
evidence node, or has an evidence descendant, must be conditioned on those
children too (diagnostic-sampled).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .network import Network

CLAMPED = "clamped"
FORWARD_SAMPLED = "forward-sampled"
DIAGNOSTIC_SAMPLED = "diagnostic-sampled"


@dataclass(frozen=True)
class ClampResult:
    """Partition of the non-evidence nodes into pinned-false and free."""

    clamped_false: frozenset
    unclamped: frozenset
    signal_trace: tuple


@dataclass(frozen=True)
class FlowInfo:
    status: str
    evidential_children: tuple
    conditioning_set: frozenset


def clamp_pass(net: Network, ev: dict) -> ClampResult:
    """Two-phase reachability: ancestors of true evidence, then their descendants.

    Returns the partition plus an ordered (phase, node) trace of who got
    signalled when.  The result is a function of the evidence *set*; the
    order evidence nodes are listed in does not matter.
    """
    for nid in ev:
        if nid not in net.index:
            raise ValueError(f"evidence references unknown node {nid!r}")
    sources = [net.index[nid] for nid in net.ids if ev.get(nid) is True]
    trace = []
    signalled = set()
    queue = deque()
    for s in sources:
        if s not in signalled:
            signalled.add(s)
            trace.append(("backward", net.ids[s]))
            queue.append(s)
    while queue:
        j = queue.popleft()
        for i in net.parents[j]:
            if i not in signalled:
                signalled.add(i)
                trace.append(("backward", net.ids[i]))
                queue.append(i)
    queue = deque(sorted(signalled))
    reached = set(signalled)
    while queue:
        j = queue.popleft()
        for c in net.children[j]:
            if c not in reached:
                reached.add(c)
                trace.append(("forward", net.ids[c]))
                queue.append(c)
    evidence_idx = {net.index[nid] for nid in ev}
    unclamped = reached - evidence_idx
    clamped = set(range(len(net.ids))) - reached - evidence_idx
    return ClampResult(
        clamped_false=frozenset(net.ids[i] for i in clamped),
        unclamped=frozenset(net.ids[i] for i in unclamped),
        signal_trace=tuple(trace),
    )


def no_clamp(net: Network, ev: dict) -> ClampResult:
    """The trivial partition used when a strategy runs without clamping."""
    free = frozenset(nid for nid in net.ids if nid not in ev)
    return ClampResult(clamped_false=frozenset(), unclamped=free, signal_trace=())


def _carries_evidence(net: Network, ev: dict):
    # carries[j]: j is an evidence node or has an evidence descendant
    carries = [False] * len(net.ids)
    for nid in ev:
        carries[net.index[nid]] = True
    for j in reversed(net.topo):
        if not carries[j]:
            carries[j] = any(carries[c] for c in net.children[j])
    return carries


def evidential_children(net: Network, ev: dict, clamp: ClampResult, nid: str) -> tuple:
    """Children of a free node that carry diagnostic evidence back to it."""
    if nid in ev:
        raise ValueError(f"{nid!r} is an evidence node, not a free node")
    if nid in clamp.clamped_false:
        raise ValueError(f"{nid!r} is clamped, not a free node")
    carries = _carries_evidence(net, ev)
    j = net.index[nid]
    return tuple(net.ids[c] for c in net.children[j] if carries[c])


def classify_flow(net: Network, ev: dict, clamp: ClampResult) -> dict:
    """FlowInfo for every non-evidence node.

    Free nodes are diagnostic-sampled exactly when they have at least one
    evidential child; their conditioning set is parents + evidential children
    + those children's other parents.  Forward-sampled nodes condition on
    their parents alone.  Clamped nodes get an empty FlowInfo.
    """
    carries = _carries_evidence(net, ev)
    out = {}
    for j, nid in enumerate(net.ids):
        if nid in ev:
            continue
        if nid in clamp.clamped_false:
            out[nid] = FlowInfo(CLAMPED, (), frozenset())
            continue
        lam = tuple(net.ids[c] for c in net.children[j] if carries[c])
        cond = {net.ids[i] for i in net.parents[j]}
        for cid in lam:
            cond.add(cid)
            cond.update(net.ids[i] for i in net.parents[net.index[cid]])
        cond.discard(nid)
        status = DIAGNOSTIC_SAMPLED if lam else FORWARD_SAMPLED
        out[nid] = FlowInfo(status, lam, frozenset(cond))
    return out


def full_blanket_flow(net: Network, ev: dict, clamp: ClampResult) -> dict:
    """Flow map for the classic sampler: condition on the whole Markov blanket.

    Every free node is treated as diagnostic-sampled with all of its children
    listed, which makes the generic conditional reduce to the textbook Gibbs
    conditional.  This is what a strategy with flow_aware=False runs on.
    """
    out = {}
    for j, nid in enumerate(net.ids):
        if nid in ev:
            continue
        if nid in clamp.clamped_false:
            out[nid] = FlowInfo(CLAMPED, (), frozenset())
            continue
        lam = tuple(net.ids[c] for c in net.children[j])
        cond = {net.ids[i] for i in net.parents[j]}
        for c in net.children[j]:
            cond.add(net.ids[c])
            cond.update(net.ids[i] for i in net.parents[c])
        cond.discard(nid)
        out[nid] = FlowInfo(DIAGNOSTIC_SAMPLED, lam, frozenset(cond))
    return out
