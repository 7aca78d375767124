"""Markov chain samplers for diagnostic posteriors.

The chains are built from three move types over the free nodes:

  single-site   resample one node from its conditional
  block-pair    resample a pair of spouses jointly over all four joint values
  swap-pair     propose exchanging the values of a pair of spouses

Each move draws its target state from the restricted distribution over the
touched nodes and their in-scope children (Gibbs rule), or proposes a state
and accepts by probability ratio (Metropolis rule).  Swapping two competing
causes moves between explanations directly, without passing through the low
probability both-on or both-off states that single-site chains must cross.
Swap moves preserve the number of active nodes in the pair, so they are
never run alone: a swap policy falls back to single-site moves on a fixed
fraction of visits.

Marginals are estimated Rao-Blackwell style: every move credits each touched
node with its conditional probability of being on under the move's restricted
distribution, and the estimate is the running mean of those credits.

A strategy combines clamping on/off, flow-aware conditioning on/off, a move
policy, and an acceptance rule.  The ten named presets cover the grid that
the benchmark harness reports on.
"""

from __future__ import annotations

import hashlib
import random
import time
from dataclasses import dataclass

from . import flow as flowmod
from .flow import ClampResult, FlowInfo, clamp_pass, classify_flow, full_blanket_flow, no_clamp
from .network import Network, STRICT, validate

GIBBS = "gibbs"
METROPOLIS = "metropolis"

SINGLE_SITE = "single-site"
BLOCK_SPOUSES_COVER = "block-spouses-cover"
BLOCK_SPOUSES_PARENT_TRUE = "block-spouses-parent-true"
SWAP_SPOUSES_COVER = "swap-spouses-cover"
SWAP_SPOUSES_CHILD_TRUE = "swap-spouses-child-true"
OPTIMIZED_RANDOM = "optimized-random"
OPTIMIZED_FWD_BWD = "optimized-fwd-bwd"

_BLOCK_POLICIES = {BLOCK_SPOUSES_COVER, BLOCK_SPOUSES_PARENT_TRUE}
_SWAP_POLICIES = {SWAP_SPOUSES_COVER, SWAP_SPOUSES_CHILD_TRUE, OPTIMIZED_RANDOM, OPTIMIZED_FWD_BWD}
_COVER_POLICIES = {BLOCK_SPOUSES_COVER, SWAP_SPOUSES_COVER}

# shared child qualifies when it signals observed positive evidence
COVER_REACHES_EVIDENCE = "true-evidence-or-ancestor"
# narrower reading: shared child must itself be a true evidence node
COVER_EVIDENCE_CHILD = "true-evidence-child"


@dataclass(frozen=True)
class StrategySpec:
    """One sampling configuration: what to pin, what to condition on, how to move."""

    name: str
    clamp: bool
    flow_aware: bool
    move_policy: str
    rule: str
    swap_fraction: float = 0.8
    cover_mode: str = COVER_REACHES_EVIDENCE

    def __post_init__(self):
        if not 0.0 <= self.swap_fraction <= 1.0:
            raise ValueError("swap_fraction must be within [0, 1]")


PRESETS = {
    spec.name: spec
    for spec in [
        StrategySpec("gibbs", False, False, SINGLE_SITE, GIBBS),
        StrategySpec("gibbs-clamp", True, False, SINGLE_SITE, GIBBS),
        StrategySpec("gibbs-flow", False, True, SINGLE_SITE, GIBBS),
        StrategySpec("block-spouses-cover", False, False, BLOCK_SPOUSES_COVER, GIBBS),
        StrategySpec("block-spouses-parent-true", False, False, BLOCK_SPOUSES_PARENT_TRUE, GIBBS),
        StrategySpec("swap-spouses-cover", False, False, SWAP_SPOUSES_COVER, GIBBS),
        StrategySpec("swap-spouses-child-true", False, False, SWAP_SPOUSES_CHILD_TRUE, GIBBS),
        StrategySpec("metropolis", False, False, SINGLE_SITE, METROPOLIS),
        StrategySpec("optimized-random", True, True, OPTIMIZED_RANDOM, METROPOLIS),
        StrategySpec("optimized-fwd-bwd", True, True, OPTIMIZED_FWD_BWD, METROPOLIS),
    ]
}


def derive_seed(master, *tags) -> int:
    """Stable 63-bit seed for a labelled sub-stream of a master seed."""
    text = ":".join([str(master)] + [str(t) for t in tags])
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


@dataclass
class MarginalAccumulator:
    """Per-node running sums of Rao-Blackwell credits and visit counts."""

    sums: list
    counts: list

    @classmethod
    def zeros(cls, n):
        return cls([0.0] * n, [0] * n)

    def merge(self, other: "MarginalAccumulator"):
        for i in range(len(self.sums)):
            self.sums[i] += other.sums[i]
            self.counts[i] += other.counts[i]

    def reset(self):
        for i in range(len(self.sums)):
            self.sums[i] = 0.0
            self.counts[i] = 0


@dataclass(frozen=True)
class MoveProposal:
    """A candidate move: the nodes that may change and the joint values offered."""

    delta_nodes: tuple
    candidate_states: tuple
    rule: str = GIBBS


class SamplerState:
    """Mutable chain state: values, cached noisy-or survivals, scores, rng."""

    def __init__(self, net, ev, clamp, flow, rng):
        self.net = net
        self.ev = ev
        self.clamp = clamp
        self.flow = flow
        self.rng = rng
        n = len(net.ids)
        self.x = [0] * n
        self.surv = [0.0] * n
        self.free = sorted(
            net.index[nid] for nid in net.ids if nid not in ev and nid not in clamp.clamped_false
        )
        self.is_free = [False] * n
        for j in self.free:
            self.is_free[j] = True
        # children each node's conditional actually conditions on, per the flow map
        self.scope_children = [[] for _ in range(n)]
        self.scope_q = [[] for _ in range(n)]
        self.forward_sampled = [False] * n
        for nid, info in flow.items():
            j = net.index[nid]
            if info.status == flowmod.CLAMPED:
                continue
            if info.status == flowmod.FORWARD_SAMPLED:
                self.forward_sampled[j] = True
                continue
            for cid in info.evidential_children:
                c = net.index[cid]
                self.scope_children[j].append(c)
                self.scope_q[j].append(1.0 - net.edge_p[(j, c)])
        # full child lists with 1-p factors, needed to keep surv caches exact
        self.child_q = [
            [1.0 - p for p in net.child_p[j]] for j in range(n)
        ]
        self.acc = MarginalAccumulator.zeros(n)
        self.sweep_idx = 0
        self.cost = 0
        # deterministic per-node move cost, used for the benchmark cost ratios
        self.move_cost = [1 + len(self.scope_children[j]) for j in range(n)]

    def refresh_survivals(self):
        net = self.net
        x = self.x
        for j in range(len(x)):
            s = 1.0 - net.leak[j]
            for i, p in zip(net.parents[j], net.parent_p[j]):
                if x[i]:
                    s *= 1.0 - p
            self.surv[j] = s

    def flip(self, n):
        """Toggle node n and update the survival caches of all its children."""
        x = self.x
        surv = self.surv
        if x[n]:
            x[n] = 0
            for c, q in zip(self.net.children[n], self.child_q[n]):
                surv[c] /= q
        else:
            x[n] = 1
            for c, q in zip(self.net.children[n], self.child_q[n]):
                surv[c] *= q

    def cond_odds(self, n) -> float:
        """Odds of n being on given its conditioning scope, from the caches."""
        surv = self.surv
        x = self.x
        sn = surv[n]
        odds = (1.0 - sn) / sn
        xn = x[n]
        for c, q in zip(self.scope_children[n], self.scope_q[n]):
            sc = surv[c]
            if xn:
                s1 = sc
                s0 = sc / q
            else:
                s0 = sc
                s1 = sc * q
            if x[c]:
                odds *= (1.0 - s1) / (1.0 - s0)
            else:
                odds *= q
        return odds

    def restricted_weight(self, nodes) -> float:
        """Product of current factor values over a set of node indices."""
        w = 1.0
        for k in nodes:
            w *= (1.0 - self.surv[k]) if self.x[k] else self.surv[k]
        return w


def initialize_state(net, ev, clamp, rng, flow=None) -> SamplerState:
    """Start a chain: evidence fixed, clamped nodes false, free nodes forward-drawn."""
    if flow is None:
        flow = full_blanket_flow(net, ev, clamp)
    state = SamplerState(net, ev, clamp, flow, rng)
    x = state.x
    for nid, value in ev.items():
        x[net.index[nid]] = 1 if value else 0
    for j in net.topo:
        if not state.is_free[j]:
            continue
        s = 1.0 - net.leak[j]
        for i, p in zip(net.parents[j], net.parent_p[j]):
            if x[i]:
                s *= 1.0 - p
        x[j] = 1 if rng.random() < (1.0 - s) else 0
    state.refresh_survivals()
    return state


def conditional_prob(net, state, nid, info: FlowInfo) -> float:
    """P(nid = 1 | its conditioning scope) computed fresh from the state values.

    For a forward-sampled node this is exactly the noisy-or distribution given
    its parents.  For a diagnostic-sampled node the evidential children's
    factors are folded in and the two-value distribution normalized.  This is
    the reference implementation; the sweep loops use the cached equivalent.
    """
    if nid in state.ev or info.status == flowmod.CLAMPED:
        raise ValueError(f"{nid!r} is fixed by evidence or clamping, not sampled")
    x = state.x
    j = net.index[nid]
    s = 1.0 - net.leak[j]
    for i, p in zip(net.parents[j], net.parent_p[j]):
        if x[i]:
            s *= 1.0 - p
    p_on = 1.0 - s
    if info.status == flowmod.FORWARD_SAMPLED or not info.evidential_children:
        return p_on
    w1 = p_on
    w0 = s
    for cid in info.evidential_children:
        c = net.index[cid]
        sc = 1.0 - net.leak[c]
        q_self = 1.0
        for i, p in zip(net.parents[c], net.parent_p[c]):
            if i == j:
                q_self = 1.0 - p
            elif x[i]:
                sc *= 1.0 - p
        s1 = sc * q_self
        s0 = sc
        if x[c]:
            w1 *= 1.0 - s1
            w0 *= 1.0 - s0
        else:
            w1 *= s1
            w0 *= s0
    return w1 / (w1 + w0)


def metropolis_accept(weight_current, weight_proposed, rng) -> bool:
    """Accept a proposed state by probability min(1, proposed / current)."""
    if weight_current <= 0.0 or weight_proposed <= 0.0:
        raise ValueError("metropolis_accept needs strictly positive weights")
    if weight_proposed >= weight_current:
        return True
    return rng.random() < weight_proposed / weight_current


def transition_distribution(net, state, proposal: MoveProposal, scope=None) -> list:
    """Distribution over the proposal's candidate states under the Gibbs rule.

    Weights are products of the factors of the changed nodes and their
    children (their whole restricted neighbourhood); factors untouched by the
    move cancel and are skipped.  `scope` optionally narrows each changed
    node's children to the flow map's evidential children.
    """
    if proposal.rule != GIBBS:
        raise ValueError("transition_distribution applies to the Gibbs rule")
    delta = [net.index[nid] for nid in proposal.delta_nodes]
    current = tuple(bool(state.x[j]) for j in delta)
    candidates = list(proposal.candidate_states)
    if len(set(candidates)) != len(candidates):
        raise ValueError("candidate states must be distinct")
    if current not in candidates:
        raise ValueError("candidate states must include the current assignment")
    touched = []
    seen = set()
    for j in delta:
        if j not in seen:
            seen.add(j)
            touched.append(j)
        kids = net.children[j] if scope is None else scope.get(j, net.children[j])
        for c in kids:
            if c not in seen:
                seen.add(c)
                touched.append(c)
    overlay = {}
    weights = []
    for cand in candidates:
        if len(cand) != len(delta):
            raise ValueError("candidate state arity differs from delta_nodes")
        overlay = dict(zip(delta, cand))
        w = 1.0
        for k in touched:
            s = 1.0 - net.leak[k]
            for i, p in zip(net.parents[k], net.parent_p[k]):
                val = overlay.get(i, state.x[i])
                if val:
                    s *= 1.0 - p
            val = overlay.get(k, state.x[k])
            w *= (1.0 - s) if val else s
        weights.append(w)
    total = sum(weights)
    if total <= 0.0:
        raise ValueError("all candidate states have zero probability")
    return [w / total for w in weights]


# ---------------------------------------------------------------------------
# moves


def single_site_move(state: SamplerState, n, rule):
    """Resample one free node; always credit its conditional into the scores."""
    odds = state.cond_odds(n)
    p_on = odds / (1.0 + odds)
    acc = state.acc
    acc.sums[n] += p_on
    acc.counts[n] += 1
    state.cost += state.move_cost[n]
    if rule == GIBBS:
        want = 1 if state.rng.random() < p_on else 0
        if want != state.x[n]:
            state.flip(n)
    else:
        ratio = (1.0 - p_on) / p_on if state.x[n] else odds
        if ratio >= 1.0 or state.rng.random() < ratio:
            state.flip(n)


def _pair_union(state, a, b):
    touched = [a, b]
    seen = {a, b}
    for j in (a, b):
        for c in state.scope_children[j]:
            if c not in seen:
                seen.add(c)
                touched.append(c)
    return touched


def swap_pair_move(state: SamplerState, a, b, rule):
    """Exchange the values of two spouses, or keep them, by restricted weight.

    When the two values are already equal the exchange is the identity; the
    move still scores both nodes (with their current indicator, the one-state
    distribution) so that the estimator keeps its per-visit accounting.
    """
    acc = state.acc
    x = state.x
    if x[a] == x[b]:
        acc.sums[a] += float(x[a])
        acc.sums[b] += float(x[b])
        acc.counts[a] += 1
        acc.counts[b] += 1
        state.cost += 1
        return
    touched = _pair_union(state, a, b)
    w_cur = state.restricted_weight(touched)
    state.flip(a)
    state.flip(b)
    w_swap = state.restricted_weight(touched)
    state.cost += 2 * len(touched)
    total = w_cur + w_swap
    # credit using the pre-move values: a held x[a], now flipped
    on_weight_a = w_cur if x[b] else w_swap  # weight of the state where a is on
    acc.sums[a] += on_weight_a / total
    acc.sums[b] += (total - on_weight_a) / total
    acc.counts[a] += 1
    acc.counts[b] += 1
    if rule == GIBBS:
        stay = state.rng.random() >= w_swap / total
    else:
        stay = w_swap < w_cur and state.rng.random() >= w_swap / w_cur
    if stay:
        state.flip(a)
        state.flip(b)


def block_pair_move(state: SamplerState, a, b, rule):
    """Resample two spouses jointly over their four joint assignments."""
    acc = state.acc
    touched = _pair_union(state, a, b)
    # walk the four assignments by single flips: (a,b), (a,!b), (!a,!b), (!a,b)
    weights = [0.0] * 4
    weights[0] = state.restricted_weight(touched)
    state.flip(b)
    weights[1] = state.restricted_weight(touched)
    state.flip(a)
    weights[2] = state.restricted_weight(touched)
    state.flip(b)
    weights[3] = state.restricted_weight(touched)
    state.cost += 4 * len(touched)
    # current position in the walk is state 3; values of a at each walk state
    x = state.x
    a_on = [0.0, 0.0, 0.0, 0.0]
    b_on = [0.0, 0.0, 0.0, 0.0]
    av = 1 - x[a]  # a's original value (a was flipped once)
    bv = x[b]  # b is back to its original value
    a_vals = [av, av, 1 - av, 1 - av]
    b_vals = [bv, 1 - bv, 1 - bv, bv]
    total = sum(weights)
    a_mass = sum(w for w, v in zip(weights, a_vals) if v)
    b_mass = sum(w for w, v in zip(weights, b_vals) if v)
    acc.sums[a] += a_mass / total
    acc.sums[b] += b_mass / total
    acc.counts[a] += 1
    acc.counts[b] += 1
    if rule == GIBBS:
        u = state.rng.random() * total
        target = 3
        run = 0.0
        for k in range(4):
            run += weights[k]
            if u < run:
                target = k
                break
    else:
        # the chain is logically still at walk state 0; propose one of the others
        target = 1 + state.rng.randrange(3)
        if not (weights[target] >= weights[0] or state.rng.random() < weights[target] / weights[0]):
            target = 0
    if a_vals[target] != x[a]:
        state.flip(a)
    if b_vals[target] != x[b]:
        state.flip(b)


def forward_redraw(state: SamplerState, n):
    """Draw a forward-sampled node straight from its noisy-or distribution."""
    p_on = 1.0 - state.surv[n]
    acc = state.acc
    acc.sums[n] += p_on
    acc.counts[n] += 1
    state.cost += 1
    want = 1 if state.rng.random() < p_on else 0
    if want != state.x[n]:
        state.flip(n)


# ---------------------------------------------------------------------------
# pairing


def _qualifying_children(state: SamplerState, strategy: StrategySpec):
    """Per free node, the children whose shared parents may pair this sweep."""
    net = state.net
    if strategy.move_policy in _COVER_POLICIES:
        if strategy.cover_mode == COVER_EVIDENCE_CHILD:
            good = [False] * len(net.ids)
            for nid, value in state.ev.items():
                if value:
                    good[net.index[nid]] = True
        elif strategy.cover_mode == COVER_REACHES_EVIDENCE:
            # true evidence nodes and their ancestors: positive diagnostic reach
            good = [False] * len(net.ids)
            stack = [net.index[nid] for nid, value in state.ev.items() if value]
            for j in stack:
                good[j] = True
            while stack:
                j = stack.pop()
                for i in net.parents[j]:
                    if not good[i]:
                        good[i] = True
                        stack.append(i)
        else:
            raise ValueError(f"unknown cover_mode {strategy.cover_mode!r}")
        return lambda c: good[c]
    # child-true policies: the shared child is currently on, observed or sampled
    x = state.x
    return lambda c: bool(x[c])


def pair_nodes(state: SamplerState, strategy: StrategySpec):
    """Greedy random pairing of eligible spouses; everyone else moves alone.

    Returns (pairs, singles) covering every movable node exactly once.  With
    flow-aware conditioning only diagnostic-sampled nodes are candidates;
    forward-sampled nodes are redrawn from their parents and never paired.
    """
    net = state.net
    qualifies = _qualifying_children(state, strategy)
    if strategy.flow_aware:
        movable = [j for j in state.free if not state.forward_sampled[j]]
    else:
        movable = list(state.free)
    movable_set = set(movable)
    candidates = {}
    for j in movable:
        kids = [c for c in net.children[j] if qualifies(c)]
        if strategy.flow_aware:
            # pair only through children that carry evidence flow: a
            # forward-sampled child couples nothing in the collapsed
            # posterior, and gating on its sampled value biases the chain
            kids = [c for c in kids if not state.forward_sampled[c]]
        if kids:
            candidates[j] = kids
    order = list(candidates)
    state.rng.shuffle(order)
    matched = {}
    for a in order:
        if a in matched:
            continue
        partners = []
        seen = set()
        for c in candidates[a]:
            for b in net.parents[c]:
                if b != a and b in candidates and b not in matched and b not in seen:
                    seen.add(b)
                    partners.append(b)
        if partners:
            b = partners[state.rng.randrange(len(partners))]
            matched[a] = b
            matched[b] = a
    pairs = []
    done = set()
    for a in order:
        if a in matched and a not in done:
            b = matched[a]
            pairs.append((a, b))
            done.add(a)
            done.add(b)
    singles = [j for j in movable if j not in done]
    assert 2 * len(pairs) + len(singles) == len(movable_set)
    return pairs, singles


# ---------------------------------------------------------------------------
# sweeps


def _run_pair_events(state, strategy, pairs, singles):
    events = [("p",) + p for p in pairs] + [("s", j) for j in singles]
    state.rng.shuffle(events)
    swap = strategy.move_policy in _SWAP_POLICIES
    for ev in events:
        if ev[0] == "s":
            single_site_move(state, ev[1], strategy.rule)
        elif swap:
            if state.rng.random() < strategy.swap_fraction:
                swap_pair_move(state, ev[1], ev[2], strategy.rule)
            else:
                single_site_move(state, ev[1], strategy.rule)
                single_site_move(state, ev[2], strategy.rule)
        else:
            block_pair_move(state, ev[1], ev[2], strategy.rule)


def _forward_tail(state, strategy):
    for j in state.net.topo:
        if state.is_free[j] and state.forward_sampled[j]:
            forward_redraw(state, j)


def _fwd_bwd_sweep(state: SamplerState, strategy: StrategySpec):
    """One pass of the alternating schedule.

    Forward passes visit every free node in topological order, redrawing
    forward-sampled nodes from their freshly updated parents; backward passes
    revisit only the diagnostic-sampled nodes, in reverse order.  Pairings
    and swap coins are fresh per pass.
    """
    backward = state.sweep_idx % 2 == 1
    pairs, singles = pair_nodes(state, strategy)
    partner = {}
    swapping = set()
    for a, b in pairs:
        partner[a] = b
        partner[b] = a
        if state.rng.random() < strategy.swap_fraction:
            swapping.add(a)
            swapping.add(b)
    order = [j for j in state.net.topo if state.is_free[j]]
    if backward:
        order = [j for j in reversed(order) if not state.forward_sampled[j]]
    done = set()
    for j in order:
        if j in done:
            continue
        if state.forward_sampled[j]:
            forward_redraw(state, j)
            continue
        if j in swapping:
            swap_pair_move(state, j, partner[j], strategy.rule)
            done.add(partner[j])
        else:
            single_site_move(state, j, strategy.rule)


def run_sweep(state: SamplerState, strategy: StrategySpec):
    """Visit every free node once under the strategy's policy."""
    policy = strategy.move_policy
    if policy == OPTIMIZED_FWD_BWD:
        _fwd_bwd_sweep(state, strategy)
    elif policy == SINGLE_SITE:
        if strategy.flow_aware:
            order = [j for j in state.free if not state.forward_sampled[j]]
            state.rng.shuffle(order)
            for j in order:
                single_site_move(state, j, strategy.rule)
            _forward_tail(state, strategy)
        else:
            order = list(state.free)
            state.rng.shuffle(order)
            for j in order:
                single_site_move(state, j, strategy.rule)
    else:
        pairs, singles = pair_nodes(state, strategy)
        _run_pair_events(state, strategy, pairs, singles)
        if strategy.flow_aware:
            _forward_tail(state, strategy)
    state.sweep_idx += 1


def estimate_marginals(net, ev, clamp: ClampResult, acc: MarginalAccumulator) -> dict:
    """Posterior estimates for every node: evidence is its indicator, clamped
    nodes report 0, free nodes report their mean Rao-Blackwell credit."""
    out = {}
    for j, nid in enumerate(net.ids):
        if nid in ev:
            out[nid] = 1.0 if ev[nid] else 0.0
        elif nid in clamp.clamped_false:
            out[nid] = 0.0
        else:
            c = acc.counts[j]
            out[nid] = acc.sums[j] / c if c else 0.0
    return out


# ---------------------------------------------------------------------------
# whole runs


@dataclass
class ChainResult:
    estimates: dict
    checkpoint_estimates: dict
    cost: int
    seconds: float
    sweeps: int


def setup_chain(net, ev, strategy: StrategySpec, rng) -> SamplerState:
    clamp = clamp_pass(net, ev) if strategy.clamp else no_clamp(net, ev)
    flow = classify_flow(net, ev, clamp) if strategy.flow_aware else full_blanket_flow(net, ev, clamp)
    return initialize_state(net, ev, clamp, rng, flow)


def run_chain(net, ev, strategy, sweeps, seed, burn_in=0, checkpoints=()) -> ChainResult:
    """Run one chain and return final (and any checkpointed) estimates."""
    problems = validate(net, STRICT)
    if problems:
        raise ValueError("network fails strict validation: " + "; ".join(problems))
    rng = random.Random(seed)
    state = setup_chain(net, ev, strategy, rng)
    marks = {}
    wanted = set(checkpoints)
    t0 = time.perf_counter()
    for s in range(1, sweeps + 1):
        run_sweep(state, strategy)
        if s == burn_in:
            state.acc.reset()
        if s in wanted:
            marks[s] = estimate_marginals(net, ev, state.clamp, state.acc)
        if s % 20000 == 0:
            state.refresh_survivals()  # bound float drift on very long runs
    seconds = time.perf_counter() - t0
    final = estimate_marginals(net, ev, state.clamp, state.acc)
    return ChainResult(final, marks, state.cost, seconds, sweeps)


def sample_posteriors(net, ev, strategy, sweeps, seed, burn_in=0, chains=1) -> dict:
    """Merge one or more chains into a single marginal estimate per node."""
    problems = validate(net, STRICT)
    if problems:
        raise ValueError("network fails strict validation: " + "; ".join(problems))
    if chains < 1:
        raise ValueError("need at least one chain")
    merged = None
    clamp = None
    for k in range(chains):
        rng = random.Random(derive_seed(seed, "chain", k) if chains > 1 else seed)
        state = setup_chain(net, ev, strategy, rng)
        clamp = state.clamp
        for s in range(1, sweeps + 1):
            run_sweep(state, strategy)
            if s == burn_in:
                state.acc.reset()
            if s % 20000 == 0:
                state.refresh_survivals()
        if merged is None:
            merged = state.acc
        else:
            merged.merge(state.acc)
    return estimate_marginals(net, ev, clamp, merged)
