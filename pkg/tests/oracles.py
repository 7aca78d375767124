"""Independent reference implementations used only by tests.

Deliberately written in the most naive style available (dict-based, full
enumeration, no caching, no log-space tricks) so that agreement with the
library is evidence of correctness rather than shared bugs.
"""

import itertools
import random


def factor(net, values, nid):
    """P(nid = values[nid] | parent values), straight from the definition."""
    j = net.index[nid]
    stay_off = 1.0 - net.leak[j]
    for i, p in zip(net.parents[j], net.parent_p[j]):
        if values[net.ids[i]]:
            stay_off *= 1.0 - p
    return 1.0 - stay_off if values[nid] else stay_off


def joint_prob(net, values):
    w = 1.0
    for nid in net.ids:
        w *= factor(net, values, nid)
    return w


def posteriors_by_enumeration(net, ev):
    """Exact posterior marginals: sum the joint over every completion."""
    free = [nid for nid in net.ids if nid not in ev]
    total = 0.0
    sums = {nid: 0.0 for nid in free}
    for bits in itertools.product((False, True), repeat=len(free)):
        values = dict(ev)
        values.update(zip(free, bits))
        w = joint_prob(net, values)
        total += w
        for nid, bit in zip(free, bits):
            if bit:
                sums[nid] += w
    out = {nid: (1.0 if v else 0.0) for nid, v in ev.items()}
    for nid in free:
        out[nid] = sums[nid] / total
    return out


def conditional_by_enumeration(net, fixed, nid):
    """P(nid=true | fixed assignment), marginalizing everything else."""
    assert nid not in fixed
    free = [n for n in net.ids if n not in fixed and n != nid]
    w = {False: 0.0, True: 0.0}
    for value in (False, True):
        for bits in itertools.product((False, True), repeat=len(free)):
            values = dict(fixed)
            values[nid] = value
            values.update(zip(free, bits))
            w[value] += joint_prob(net, values)
    return w[True] / (w[True] + w[False])


def ancestors(net, nid):
    out = set()
    stack = [net.index[nid]]
    while stack:
        j = stack.pop()
        for i in net.parents[j]:
            if net.ids[i] not in out:
                out.add(net.ids[i])
                stack.append(i)
    return out


def descendants(net, nid):
    out = set()
    stack = [net.index[nid]]
    while stack:
        j = stack.pop()
        for c in net.children[j]:
            if net.ids[c] not in out:
                out.add(net.ids[c])
                stack.append(c)
    return out


def unclamped_by_reachability(net, ev):
    """Free nodes kept by the clamp rule, computed declaratively:
    ancestors of true evidence (each true evidence node counting as its own
    ancestor), plus all descendants of those ancestors, minus evidence."""
    anc = set()
    for nid, value in ev.items():
        if value:
            anc.add(nid)
            anc |= ancestors(net, nid)
    keep = set(anc)
    for nid in anc:
        keep |= descendants(net, nid)
    return keep - set(ev)


def d_separated_by_trails(net, x, given, targets):
    """Active-trail search by explicit path enumeration.

    Walks every simple undirected path from x, tracking edge directions,
    and applies the chain/fork/collider rules directly.  Exponential, fine
    for the small graphs tests use.
    """
    given = set(given)
    targets = set(targets) - given - {x}
    if not targets:
        return True
    cond_anc = set(given)
    for z in given:
        cond_anc |= ancestors(net, z)

    def neighbors(nid):
        j = net.index[nid]
        for i in net.parents[j]:
            yield net.ids[i], "up"
        for c in net.children[j]:
            yield net.ids[c], "down"

    def walk(nid, came_in, visited):
        # came_in: None at the start; "down" if the previous edge pointed
        # into nid (nid is a head), "up" if it pointed out of nid's parent
        if nid in targets and came_in is not None:
            return True
        for nxt, step in neighbors(nid):
            if nxt in visited:
                continue
            if came_in is not None:
                if _triple_blocked(net, came_in, nid, step, given, cond_anc):
                    continue
            if walk(nxt, step, visited | {nxt}):
                return True
        return False

    return not walk(x, None, {x})


def _triple_blocked(net, came_in, mid, step_out, given, cond_anc):
    # came_in is the direction of the edge that reached mid; step_out the
    # direction of the edge leaving mid. mid is a collider iff the first
    # edge points into mid and the second also points into mid, i.e. we
    # arrived going "down" (parent->mid) and leave going "up" (mid<-child).
    if came_in == "down" and step_out == "up":
        return mid not in cond_anc  # collider: open iff mid or a descendant is conditioned
    return mid in given  # chain or fork: blocked iff conditioned


def random_dag(rng, n_nodes, edge_prob=0.3, p_range=(0.05, 0.95), leak_range=(0.01, 0.4)):
    """Arbitrary random DAG (not the package generator): nodes n0..nK with
    edges only from lower to higher index."""
    names = [f"n{i}" for i in range(n_nodes)]
    nodes = []
    for i, nid in enumerate(names):
        kind = "sensory" if rng.random() < 0.3 else "model"
        nodes.append((nid, kind, rng.uniform(*leak_range)))
    edges = []
    for i in range(n_nodes):
        for j in range(i + 1, n_nodes):
            if rng.random() < edge_prob:
                edges.append((names[i], names[j], rng.uniform(*p_range)))
    return nodes, edges


def random_evidence(rng, net, max_nodes=3, p_true=0.6):
    picks = rng.sample(list(net.ids), min(len(net.ids), rng.randint(0, max_nodes)))
    return {nid: rng.random() < p_true for nid in picks}
