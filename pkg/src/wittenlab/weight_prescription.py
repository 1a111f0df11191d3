"""Reweighting descent graphs to prescribed per-index escape costs.

Given raw path integrals w'(gamma) of an arbitrary representative of a
cohomology class and ascending positive targets a_1 <= ... <= a_n, the
algorithm produces new weights that differ from the input by a vertex
potential plus the uniform shift -C coming from adding C times the index
function (whose integral along every edge is -1).  The output satisfies

    -max over outgoing edges of w(gamma) = a_k   for every index-k vertex,

with all weights strictly negative.  Stages run bottom-up: stage k measures
b_p = -max current outgoing weight for each index-k vertex p, raises the
potential of p by a_k - b_p, and raises every higher-index potential by the
constant a_k - min_p b_p, which keeps all later stages feasible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import (
    DomainError,
    InfeasibleTargets,
    InvariantViolation,
    StructureError,
)
from .morse import InstantonGraph

__all__ = [
    "PrescriptionProblem",
    "PrescriptionResult",
    "CertificateReport",
    "choose_constants",
    "initialize_weights",
    "prescribe",
    "prescribe_stages",
    "verify_prescription",
    "random_feasible_problem",
]

_EQ_TOL = 1e-9
_EXACT_TOL = 1e-12


class PrescriptionProblem:
    """Raw graph (weights of any sign) with ascending positive targets."""

    def __init__(self, graph: InstantonGraph, targets):
        self.graph = graph
        self.targets = tuple(float(a) for a in targets)
        if len(self.targets) != graph.n:
            raise DomainError(
                f"need {graph.n} targets for top index {graph.n}, "
                f"got {len(self.targets)}"
            )
        if any(a <= 0 for a in self.targets):
            raise DomainError("targets must be positive")
        for a, b in zip(self.targets, self.targets[1:]):
            if b < a - _EQ_TOL:
                raise DomainError("targets must be ascending: a_1 <= ... <= a_n")
        for v in graph.vertices:
            if graph.index_of[v] >= 1 and not graph.outgoing(v):
                raise StructureError(
                    f"vertex {v!r} of positive index has no outgoing edge"
                )
        self.raw_amplitude = max(
            (abs(e.weight) for e in graph.edges), default=0.0
        )


def choose_constants(problem_or_graph, a1=None) -> float:
    """Pick the uniform-shift constant C = (A + a_1)/2 with A = max |w'|.

    Both strict inequalities C > A and a_1 > C + A must hold, which needs
    a_1 > 3A; the hard feasibility boundary is a_1 > 2A, so inputs in
    between are rejected as below the safety margin.
    """
    if isinstance(problem_or_graph, PrescriptionProblem):
        amp = problem_or_graph.raw_amplitude
        a1 = problem_or_graph.targets[0] if a1 is None else float(a1)
    else:
        amp = max((abs(e.weight) for e in problem_or_graph.edges), default=0.0)
        if a1 is None:
            raise DomainError("a1 required when passing a bare graph")
        a1 = float(a1)
    if a1 <= 2.0 * amp:
        raise InfeasibleTargets(
            f"a_1 = {a1} is infeasible: needs a_1 > 2 max|w'| = {2 * amp}"
        )
    c = 0.5 * (amp + a1)
    if not (c > amp and a1 > c + amp):
        raise InfeasibleTargets(
            f"a_1 = {a1} is above the feasibility boundary 2A = {2 * amp} but "
            f"below the safety margin 3A = {3 * amp}; C = (A + a_1)/2 fails"
        )
    return c


def initialize_weights(problem: PrescriptionProblem, c=None):
    """Shift every raw weight by -C (the index function drops by 1 along
    every edge); the result is strictly inside (-a_1, 0)."""
    if c is None:
        c = choose_constants(problem)
    a1 = problem.targets[0]
    shifted = []
    for e in problem.graph.edges:
        w = e.weight - c
        if not (-a1 < w < 0.0):
            raise InvariantViolation(
                f"initialized weight {w} outside (-{a1}, 0); constants bug"
            )
        shifted.append(w)
    return problem.graph.reweighted(shifted), c


@dataclass(frozen=True)
class StageTrace:
    k: int
    b: dict  # per index-k vertex
    b_min: float


@dataclass(frozen=True)
class PrescriptionResult:
    problem: PrescriptionProblem
    c: float
    potential: dict  # vertex id -> accumulated potential
    graph: InstantonGraph  # final negative weights
    stages: tuple

    def weight_map(self):
        return {i: e.weight for i, e in enumerate(self.graph.edges)}


def prescribe_stages(graph: InstantonGraph, targets, strict=True):
    """Run the staged potential updates on an all-negative graph.

    Returns (potential, final graph, stage traces).  At stage k every
    measured b_p must satisfy b_p <= a_k (strictly below for fresh inputs;
    equality occurs exactly when the level is already at target and then the
    update is zero, which makes the procedure idempotent).
    """
    targets = tuple(float(a) for a in targets)
    phi = {v: 0.0 for v in graph.vertices}
    current = list(e.weight for e in graph.edges)
    stages = []
    for k in range(1, graph.n + 1):
        a_k = targets[k - 1]
        b = {}
        for v in graph.by_degree[k]:
            outs = [
                current[i] for i, e in enumerate(graph.edges) if e.p == v
            ]
            b[v] = -max(outs)
            if b[v] > a_k + _EQ_TOL:
                raise InvariantViolation(
                    f"stage {k}: b_p = {b[v]} exceeds target {a_k} at {v!r}",
                    stage=k,
                )
        b_min = min(b.values())
        for v in graph.by_degree[k]:
            phi[v] += a_k - b[v]
        for v in graph.vertices:
            if graph.index_of[v] > k:
                phi[v] += a_k - b_min
        for i, e in enumerate(graph.edges):
            current[i] = e.weight + phi[e.q] - phi[e.p]
        stages.append(StageTrace(k, b, b_min))
        # after stage k every settled level sits exactly at its target and
        # edges from level k+1 stay above -a_k, keeping later stages feasible
        if strict:
            for v in graph.by_degree[k]:
                outs = [current[i] for i, e in enumerate(graph.edges) if e.p == v]
                if abs(-max(outs) - a_k) > _EQ_TOL * (1.0 + a_k):
                    raise InvariantViolation(
                        f"stage {k} failed to set the level at {v!r}", stage=k
                    )
    final = graph.reweighted(current)
    return phi, final, tuple(stages)


def prescribe(problem: PrescriptionProblem) -> PrescriptionResult:
    """Full pipeline: choose C, shift by -C, then run the stages."""
    shifted, c = initialize_weights(problem)
    if problem.graph.n == 0:
        return PrescriptionResult(
            problem, c, {v: 0.0 for v in problem.graph.vertices},
            shifted, (),
        )
    phi, final, stages = prescribe_stages(shifted, problem.targets)
    return PrescriptionResult(problem, c, phi, final, stages)


def reversed_problem(problem: PrescriptionProblem) -> PrescriptionProblem:
    """Flow-reversed problem for descending targets a_1 >= ... >= a_n:
    indices complement, edges reverse (integrals along reversed paths against
    the negated form are unchanged), targets reverse into ascending order."""
    rev_graph = InstantonGraph(
        [(v, problem.graph.n - problem.graph.index_of[v])
         for v in problem.graph.vertices],
        [(e.q, e.p, e.sign, e.weight) for e in problem.graph.edges],
        require_negative=False,
    )
    return PrescriptionProblem(rev_graph, tuple(reversed(problem.targets)))


def prescribe_descending(problem: PrescriptionProblem):
    """Handle descending targets by prescribing on the reversed problem.

    Returns the reversed-problem result (its certificate applies verbatim)
    together with the final weights mapped back onto the original edges,
    which then realize the descending targets on the original orientation.
    """
    rev = reversed_problem(problem)
    res = prescribe(rev)
    mapped = problem.graph.reweighted([e.weight for e in res.graph.edges])
    return res, mapped


@dataclass(frozen=True)
class CertificateReport:
    exactness: bool
    negativity: bool
    per_index_max: dict  # k -> recomputed common cost (or None if mixed)
    costs_ok: bool
    counterexample: object

    @property
    def all_pass(self):
        return self.exactness and self.negativity and self.costs_ok

    def to_json(self, stages=None):
        payload = {
            "exactness": self.exactness,
            "negativity": self.negativity,
            "per_index_max": {str(k): v for k, v in self.per_index_max.items()},
            "costs_ok": self.costs_ok,
        }
        if self.counterexample is not None:
            payload["counterexample"] = str(self.counterexample)
        if stages is not None:
            payload["stages"] = stages
        return json.dumps(payload, indent=2, sort_keys=True)


def verify_prescription(problem: PrescriptionProblem,
                        result: PrescriptionResult) -> CertificateReport:
    """Recompute everything from scratch: per-index escape costs by brute
    force, exactness of the weight change against the claimed potential and
    uniform shift, and strict negativity."""
    graph = problem.graph
    final = result.graph
    counterexample = None

    exactness = True
    for e_raw, e_new in zip(graph.edges, final.edges):
        expected = e_raw.weight - result.c + result.potential[e_raw.q] \
            - result.potential[e_raw.p]
        if abs(e_new.weight - expected) > _EXACT_TOL * (1.0 + abs(expected)):
            exactness = False
            counterexample = (e_raw.p, e_raw.q)
            break

    negativity = all(e.weight < 0 for e in final.edges)
    if not negativity and counterexample is None:
        counterexample = next(
            (e.p, e.q) for e in final.edges if not e.weight < 0
        )

    per_index = {}
    costs_ok = True
    for k in range(1, graph.n + 1):
        vals = []
        for v in graph.by_degree[k]:
            outs = [e.weight for e in final.edges if e.p == v]
            vals.append(-max(outs))
        target = problem.targets[k - 1]
        if all(abs(v - target) <= _EQ_TOL * (1.0 + target) for v in vals):
            per_index[k] = target
        else:
            per_index[k] = None
            costs_ok = False
            if counterexample is None:
                bad = next(
                    v for v in graph.by_degree[k]
                    if abs(-max(e.weight for e in final.edges if e.p == v)
                           - target) > _EQ_TOL * (1.0 + target)
                )
                counterexample = bad
    return CertificateReport(exactness, negativity, per_index, costs_ok,
                             counterexample)


def potential_consistency(problem, result, tol=1e-12):
    """Independent exactness check: the shifted weight change must be a
    coboundary, i.e. consistent along a spanning tree and over every extra
    edge (equivalently, all cycle sums vanish)."""
    graph = problem.graph
    delta = {}
    for e_raw, e_new in zip(graph.edges, result.graph.edges):
        delta[(e_raw.p, e_raw.q)] = e_new.weight - e_raw.weight + result.c
    # BFS a potential from the deltas; every vertex pair may carry several
    # parallel edges which must then agree among themselves.
    psi = {}
    for root in graph.vertices:
        if root in psi:
            continue
        psi[root] = 0.0
        frontier = [root]
        while frontier:
            x = frontier.pop()
            for (p, q), d in delta.items():
                if p == x and q not in psi:
                    psi[q] = psi[x] + d  # d = psi(q) - psi(p)
                    frontier.append(q)
                elif q == x and p not in psi:
                    psi[p] = psi[x] - d
                    frontier.append(p)
    for (p, q), d in delta.items():
        if abs((psi[q] - psi[p]) - d) > tol * (1.0 + abs(d)):
            return False, (p, q)
    return True, None


def random_feasible_problem(rng, max_n=5, max_vertices=40):
    """Seeded generator of raw problems: layered graph with every positive
    index vertex wired downward, raw weights of both signs, and targets that
    are guaranteed feasible.

    Stage measurements never exceed M_k <= 2^{k-1} (A + C) regardless of the
    targets (the per-stage drift is bounded by the previous measurement
    range), so targets growing geometrically above that bound keep every
    stage strictly below its target.
    """
    n = int(rng.integers(1, max_n + 1))
    counts = [int(rng.integers(1, 4)) for _ in range(n + 1)]
    total = sum(counts)
    while total > max_vertices:
        counts[int(rng.integers(0, n + 1))] -= 1
        counts = [max(1, c) for c in counts]
        total = sum(counts)
    vertices = []
    for k, ck in enumerate(counts):
        for i in range(ck):
            vertices.append((f"v{k}_{i}", k))
    edges = []
    amp = float(rng.uniform(0.2, 2.0))
    for k in range(1, n + 1):
        for i in range(counts[k]):
            p = f"v{k}_{i}"
            targets_below = [f"v{k - 1}_{j}" for j in range(counts[k - 1])]
            chosen = {targets_below[int(rng.integers(0, len(targets_below)))]}
            for q in targets_below:
                if rng.random() < 0.4:
                    chosen.add(q)
            for q in chosen:
                nedges = 1 + int(rng.random() < 0.25)
                for _ in range(nedges):
                    w = float(rng.uniform(-amp, amp))
                    sign = -1 if rng.random() < 0.5 else 1
                    edges.append((p, q, sign, w))
    graph = InstantonGraph(vertices, edges, require_negative=False)
    a = max(abs(e.weight) for e in graph.edges)
    a1 = 3.0 * a + float(rng.uniform(0.5, 2.0))
    c = 0.5 * (a + a1)
    bound = a + c
    targets = [a1]
    for k in range(2, n + 1):
        floor = 1.05 * bound * 2.0 ** (k - 1)
        targets.append(max(targets[-1], floor) + float(rng.uniform(0.0, 1.5)))
    return PrescriptionProblem(graph, targets)
