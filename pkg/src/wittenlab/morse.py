"""Perturbed Morse complexes on instanton graphs.

An instanton graph records zeros of a gradient-like flow (vertices graded by
index) together with the connecting flow lines between consecutive indices,
each carrying an orientation sign and the negative line integral of the
driving one-form.  The induced differential

    d_z e_q = sum over edges (p, q)  of  sign * exp(z * weight) * e_p

deforms the integer Morse differential; this module builds it, does its
finite-dimensional Hodge theory, runs the rank recursion, detects tightness,
extracts the leading (equal-weight) part, bounds the nonzero small spectrum,
evaluates the limit invariants of the zeta function, and solves the
prescription equation for the limit value.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    InfeasibleError,
    NotAComplex,
    StateError,
    StructureError,
)
from .spectral import GradedMatrixComplex

__all__ = [
    "InstantonGraph",
    "RankProfile",
    "TightnessReport",
    "LeadingComplex",
    "build_differential",
    "rank_sequence",
    "hodge_ranks_numeric",
    "tightness_check",
    "leading_complex",
    "leading_decay_fit",
    "small_spectrum_window",
    "z_invariants",
    "ZetaLimits",
    "projection_law_check",
    "prescribe_increment",
    "prescribe_tau",
    "graph_tensor",
]

_RANK_TOL_FACTOR = 1e-9
_WEIGHT_EQ_TOL = 1e-9
_PROJ_TOL = 1e-10


@dataclass(frozen=True)
class GraphEdge:
    p: object
    q: object
    sign: int
    weight: float


class InstantonGraph:
    """Vertices (id, index) plus signed weighted edges with index gap one.

    Weights are strictly negative for a genuine descent flow; raw graphs fed
    to the reweighting algorithm may carry weights of any sign, which is
    allowed by ``require_negative=False``.
    """

    def __init__(self, vertices, edges, require_negative=True):
        self.index_of = {}
        order = []
        for vid, idx in vertices:
            idx = int(idx)
            if vid in self.index_of:
                raise StructureError(f"duplicate vertex id {vid!r}")
            if idx < 0:
                raise StructureError("vertex index must be nonnegative")
            self.index_of[vid] = idx
            order.append(vid)
        self.vertices = tuple(order)
        self.n = max(self.index_of.values(), default=0)
        self.edges = []
        for p, q, sign, weight in edges:
            if p not in self.index_of or q not in self.index_of:
                raise StructureError(f"edge ({p!r}, {q!r}) references unknown vertex")
            if self.index_of[p] != self.index_of[q] + 1:
                raise StructureError(
                    f"edge ({p!r}, {q!r}) must drop the index by exactly 1"
                )
            sign = int(sign)
            if sign not in (-1, 1):
                raise StructureError("edge sign must be +1 or -1")
            weight = float(weight)
            if require_negative and not weight < 0:
                raise StructureError(
                    f"edge ({p!r}, {q!r}) has nonnegative weight {weight}"
                )
            self.edges.append(GraphEdge(p, q, sign, weight))
        self.edges = tuple(self.edges)
        self.by_degree = tuple(
            tuple(v for v in self.vertices if self.index_of[v] == k)
            for k in range(self.n + 1)
        )

    @property
    def counts(self):
        return tuple(len(layer) for layer in self.by_degree)

    def outgoing(self, p):
        return [e for e in self.edges if e.p == p]

    def reweighted(self, new_weights, require_negative=True):
        """Same combinatorics with new per-edge weights (parallel order kept)."""
        if len(new_weights) != len(self.edges):
            raise StructureError("one weight per edge required")
        edges = [
            (e.p, e.q, e.sign, w) for e, w in zip(self.edges, new_weights)
        ]
        return InstantonGraph(
            [(v, self.index_of[v]) for v in self.vertices],
            edges,
            require_negative=require_negative,
        )

    def reversed(self):
        """Flow reversal: index k -> n - k, edges reversed, weights kept.

        Traversing an edge backwards against the negated one-form leaves the
        integral unchanged, so the reversed graph is again strictly negative.
        """
        verts = [(v, self.n - self.index_of[v]) for v in self.vertices]
        edges = [(e.q, e.p, e.sign, e.weight) for e in self.edges]
        return InstantonGraph(verts, edges)

    # -- plain-text format: "v <id> <index>" and "e <p> <q> <sign> <weight>" --

    def dumps(self) -> str:
        buf = io.StringIO()
        for v in self.vertices:
            if any(ch.isspace() for ch in str(v)):
                raise DomainError(f"vertex id {v!r} not serializable")
            buf.write(f"v {v} {self.index_of[v]}\n")
        for e in self.edges:
            buf.write(f"e {e.p} {e.q} {e.sign:+d} {e.weight!r}\n")
        return buf.getvalue()

    def dump(self, path):
        with open(path, "w") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text, require_negative=True):
        vertices, edges = [], []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if parts[0] == "v" and len(parts) == 3:
                vertices.append((parts[1], int(parts[2])))
            elif parts[0] == "e" and len(parts) == 5:
                edges.append((parts[1], parts[2], int(parts[3]), float(parts[4])))
            else:
                raise DomainError(f"bad graph line {lineno}: {raw!r}")
        return cls(vertices, edges, require_negative=require_negative)

    @classmethod
    def load(cls, path, require_negative=True):
        with open(path) as fh:
            return cls.loads(fh.read(), require_negative=require_negative)


def _edge_matrix(graph, k, entry):
    """Matrix of degree-k differential with per-edge entries from ``entry``."""
    rows = graph.by_degree[k + 1]
    cols = graph.by_degree[k]
    row_pos = {v: i for i, v in enumerate(rows)}
    col_pos = {v: i for i, v in enumerate(cols)}
    mat = np.zeros((len(rows), len(cols)), dtype=complex)
    for e in graph.edges:
        if graph.index_of[e.q] == k:
            mat[row_pos[e.p], col_pos[e.q]] += entry(e)
    return mat


def _check_squares_combinatorial(graph):
    """Exact d^2 = 0 certificate: for every two-step pair (r, q), the signed
    edge pairs must cancel within groups of equal total weight."""
    out_by_vertex = {}
    for e in graph.edges:
        out_by_vertex.setdefault(e.p, []).append(e)
    # accumulate signed counts of weight-pairs per endpoint pair
    table = {}
    for e1 in graph.edges:  # e1: p -> q at level (k+1 -> k)
        for e2 in out_by_vertex.get(e1.q, ()):  # e2: q -> r
            key = (e1.p, e2.q)
            table.setdefault(key, []).append((e1.weight + e2.weight, e1.sign * e2.sign))
    for (p, r), items in table.items():
        items.sort(key=lambda t: t[0])
        i = 0
        while i < len(items):
            j = i
            total = 0
            while (
                j < len(items)
                and abs(items[j][0] - items[i][0]) <= _WEIGHT_EQ_TOL
            ):
                total += items[j][1]
                j += 1
            if total != 0:
                raise NotAComplex(
                    f"two-step paths {p!r} -> {r!r} do not cancel at weight "
                    f"{items[i][0]:.6g} (signed count {total})"
                )
            i = j


def build_differential(graph, z) -> GradedMatrixComplex:
    """Matrices of d_z, entries sum sign * exp(z * weight) over parallel edges.

    The square-zero property is certified combinatorially (exact integer
    cancellation within equal-weight groups) before any floating assembly;
    the resulting complex also carries the tight matrix-level tolerance.
    """
    _check_squares_combinatorial(graph)
    z = complex(z)
    mats = [
        _edge_matrix(graph, k, lambda e: e.sign * np.exp(z * e.weight))
        for k in range(graph.n)
    ]
    return GradedMatrixComplex(
        mats, graph.counts, label=f"morse z={z}", exact=True
    )


@dataclass(frozen=True)
class RankProfile:
    """Counts |X_k|, cohomology ranks beta_k, and the rank recursion output:
    m_k = |X_k| - beta_k split as m_k = m1_k + m2_k with m2_k = m1_{k+1}."""

    counts: tuple
    betti: tuple
    m: tuple
    m1: tuple
    m2: tuple

    @property
    def supertrace_m(self):
        return sum((-1) ** k * mk for k, mk in enumerate(self.m))


def rank_sequence(counts, betti) -> RankProfile:
    """Run the forward recursion m1_0 = 0, m2_k = m_k - m1_k, m1_{k+1} = m2_k.

    Inputs must satisfy the Euler identity and keep every intermediate rank
    nonnegative with m2_n = 0; otherwise they are not realizable.
    """
    counts = tuple(int(c) for c in counts)
    betti = tuple(int(b) for b in betti)
    if len(counts) != len(betti):
        raise InfeasibleError("counts and betti must have equal length")
    n = len(counts) - 1
    euler_counts = sum((-1) ** k * c for k, c in enumerate(counts))
    euler_betti = sum((-1) ** k * b for k, b in enumerate(betti))
    if euler_counts != euler_betti:
        raise InfeasibleError(
            f"alternating sums disagree: {euler_counts} vs {euler_betti}"
        )
    m = tuple(c - b for c, b in zip(counts, betti))
    if any(mk < 0 for mk in m):
        raise InfeasibleError("some m_k = |X_k| - beta_k is negative")
    m1 = [0]
    m2 = []
    for k in range(n + 1):
        m2k = m[k] - m1[k]
        if m2k < 0:
            raise InfeasibleError(f"negative intermediate rank m2_{k} = {m2k}")
        m2.append(m2k)
        if k < n:
            m1.append(m2k)
    if m2[-1] != 0:
        raise InfeasibleError(f"recursion does not close: m2_{n} = {m2[-1]}")
    return RankProfile(counts, betti, m, tuple(m1), tuple(m2))


def _svd_rank(mat, return_basis=False):
    if mat.size == 0:
        if return_basis:
            return 0, np.zeros((mat.shape[0], 0), dtype=complex), np.zeros(
                (mat.shape[1], 0), dtype=complex
            )
        return 0
    u, s, vh = np.linalg.svd(mat)
    tol = _RANK_TOL_FACTOR * (1.0 + (s[0] if s.size else 0.0))
    r = int(np.count_nonzero(s > tol))
    if return_basis:
        return r, u[:, :r], vh[:r].conj().T
    return r


@dataclass(frozen=True)
class HodgeData:
    """Numeric Hodge decomposition of a graph differential at one parameter."""

    kernel_dims: tuple
    image_d_dims: tuple
    image_delta_dims: tuple
    projections: tuple  # per degree: (P_harmonic, P_im_d, P_im_delta)

    @property
    def betti(self):
        return self.kernel_dims


def hodge_ranks_numeric(graph, z) -> HodgeData:
    """Ranks and orthogonal projections of the Hodge splitting at z.

    Ranks come from singular values with per-matrix relative thresholds, so
    they stay correct even when the whole differential is exponentially
    small.  Projections are Hermitian idempotents to 1e-10.
    """
    cx = build_differential(graph, z)
    kernel, imd, imdelta, projs = [], [], [], []
    bases = {}
    for k in range(graph.n):
        bases[k] = _svd_rank(cx.differentials[k], return_basis=True)
    for k in range(graph.n + 1):
        nk = cx.degrees[k]
        rank_in = bases[k - 1][0] if k - 1 in bases else 0
        rank_out = bases[k][0] if k in bases else 0
        u_in = bases[k - 1][1] if k - 1 in bases else np.zeros((nk, 0), complex)
        v_out = bases[k][2] if k in bases else np.zeros((nk, 0), complex)
        p1 = u_in @ u_in.conj().T
        p2 = v_out @ v_out.conj().T
        p0 = np.eye(nk) - p1 - p2
        for name, p in (("harmonic", p0), ("im_d", p1), ("im_delta", p2)):
            if nk and np.linalg.norm(p @ p - p, 2) > _PROJ_TOL * max(nk, 1):
                raise StateError(f"projection {name} not idempotent in degree {k}")
            if nk and np.linalg.norm(p - p.conj().T, 2) > _PROJ_TOL * max(nk, 1):
                raise StateError(f"projection {name} not Hermitian in degree {k}")
        kernel.append(nk - rank_in - rank_out)
        imd.append(rank_in)
        imdelta.append(rank_out)
        projs.append((p0, p1, p2))
    return HodgeData(tuple(kernel), tuple(imd), tuple(imdelta), tuple(projs))


def analyze_ranks(graph, z, betti=None) -> RankProfile:
    """Rank recursion cross-validated against the numeric Hodge dimensions.

    ``betti`` may supply the stable cohomology ranks; a mismatch with the
    numeric kernels is an error, never silently reconciled.
    """
    data = hodge_ranks_numeric(graph, z)
    if betti is not None and tuple(betti) != data.kernel_dims:
        raise InfeasibleError(
            f"supplied betti {tuple(betti)} != numeric kernels {data.kernel_dims}"
        )
    profile = rank_sequence(graph.counts, data.kernel_dims)
    if profile.m1[1:] != data.image_d_dims[1:]:
        raise StateError(
            f"recursion m1 {profile.m1} disagrees with numeric {data.image_d_dims}"
        )
    return profile


@dataclass(frozen=True)
class TightnessReport:
    vertex_cost: dict  # -max outgoing weight, per positive-index vertex
    index_costs: tuple  # min over the index level, entries for k = 1..n
    tight: bool

    @property
    def a(self):
        """Common per-index costs a_k (k = 1..n); only meaningful when tight."""
        return self.index_costs


def tightness_check(graph, tol=_WEIGHT_EQ_TOL) -> TightnessReport:
    """Per-vertex escape costs and whether they only depend on the index."""
    vertex_cost = {}
    for v in graph.vertices:
        if graph.index_of[v] == 0:
            continue
        out = graph.outgoing(v)
        if not out:
            raise StructureError(f"vertex {v!r} of positive index has no edges")
        vertex_cost[v] = -max(e.weight for e in out)
    index_costs = []
    tight = True
    for k in range(1, graph.n + 1):
        costs = [vertex_cost[v] for v in graph.by_degree[k]]
        if not costs:
            raise StructureError(f"no vertices of index {k}")
        mk = min(costs)
        index_costs.append(mk)
        if max(costs) - mk > tol * (1.0 + abs(mk)):
            tight = False
    return TightnessReport(vertex_cost, tuple(index_costs), tight)


@dataclass(frozen=True)
class LeadingComplex:
    """Equal-weight leading part: per degree k-1 the matrix keeping only
    edges of weight exactly -a_k, plus its adjoint family."""

    matrices: tuple
    a: tuple

    def matrix(self, k):
        return self.matrices[k]


def leading_complex(graph, tol=_WEIGHT_EQ_TOL) -> LeadingComplex:
    """Extract the leading differential of a tight graph and verify it squares
    to zero; dropped edges are exactly those with weight below -a_k."""
    report = tightness_check(graph)
    if not report.tight:
        raise StructureError("leading complex requires a tight graph")
    a = report.index_costs
    mats = []
    for k in range(graph.n):
        ak = a[k]
        mats.append(
            _edge_matrix(
                graph,
                k,
                lambda e, ak=ak: e.sign
                if abs(e.weight + ak) <= tol * (1.0 + ak)
                else 0.0,
            )
        )
    for k in range(len(mats) - 1):
        if mats[k + 1].size and mats[k].size:
            if np.linalg.norm(mats[k + 1] @ mats[k], 2) > 1e-12:
                raise StructureError("leading differential does not square to zero")
    return LeadingComplex(tuple(mats), a)


def shifted_differential(graph, z, k, a_k):
    """exp(a_k z) d_{z,k}: the overflow-free normal form of the degree-k
    differential of a tight graph (entries exp(z (a_k + weight)))."""
    z = complex(z)
    return _edge_matrix(graph, k, lambda e: e.sign * np.exp(z * (e.weight + a_k)))


def leading_decay_fit(graph, mu_values, nu=0.0):
    """Fit log || exp(a_k z) d_z - d' || versus mu per degree.

    Returns per-degree (slope, residual norms); the slope approaches the gap
    between a_k and the largest subleading weight magnitude.
    """
    lead = leading_complex(graph)
    slopes = []
    for k in range(graph.n):
        norms = []
        for mu in mu_values:
            diff = shifted_differential(graph, complex(mu, nu), k, lead.a[k])
            norms.append(np.linalg.norm(diff - lead.matrices[k], 2))
        norms = np.asarray(norms)
        if np.all(norms < 1e-300):
            slopes.append((0.0, tuple(norms)))
            continue
        coeffs = np.polyfit(np.asarray(mu_values, float), np.log(norms), 1)
        slopes.append((float(coeffs[0]), tuple(norms)))
    return slopes


def small_spectrum_window(graph, z):
    """Rescaled nonzero spectrum exp(2 a_k mu) * spec on the degree-k
    supersymmetric pair, per k = 1..n.

    Computed from singular values of the shifted differential, so no
    underflow occurs for any mu.  Requires a tight graph.
    """
    report = tightness_check(graph)
    if not report.tight:
        raise StructureError("spectral windows require a tight graph")
    out = []
    for k in range(1, graph.n + 1):
        shifted = shifted_differential(graph, z, k - 1, report.index_costs[k - 1])
        if shifted.size == 0:
            out.append(np.zeros(0))
            continue
        s = np.linalg.svd(shifted, compute_uv=False)
        tol = _RANK_TOL_FACTOR * (1.0 + (s[0] if s.size else 0.0))
        out.append(np.sort(s[s > tol]) ** 2)
    return out


@dataclass(frozen=True)
class ZetaLimits:
    """Small-spectrum limit of the zeta invariant and its variants."""

    small_limit: float  # sum_k (-1)^k (1 - e^{a_k}) m1_k
    reversed_limit: float  # the mu -> -infinity counterpart (negated form)
    oriented_even_variant: float  # sum_k (-1)^k e^{a_k} m1_k


def z_invariants(graph_or_a, m1=None) -> ZetaLimits:
    """Evaluate the three closed forms of the small limit.

    Accepts either a tight graph (costs measured from it) or the index costs
    a_1..a_n directly; ``m1`` are the stable ranks m1_0..m1_n.
    """
    if isinstance(graph_or_a, InstantonGraph):
        report = tightness_check(graph_or_a)
        if not report.tight:
            raise StateError("graph is not tight; per-index costs undefined")
        a = report.index_costs
    else:
        a = tuple(float(x) for x in graph_or_a)
    if m1 is None:
        raise StateError("m1 ranks are required")
    m1 = tuple(int(x) for x in m1)
    n = len(a)
    if len(m1) != n + 1:
        raise StateError(f"expected m1_0..m1_{n}, got {len(m1)} entries")
    small = sum((-1) ** k * (1.0 - np.exp(a[k - 1])) * m1[k] for k in range(1, n + 1))
    rev = -sum(
        (-1) ** k * (1.0 - np.exp(a[n - k])) * m1[k] for k in range(1, n + 1)
    )
    oriented = sum((-1) ** k * np.exp(a[k - 1]) * m1[k] for k in range(1, n + 1))
    return ZetaLimits(float(small), float(rev), float(oriented))


def projection_law_check(graph, mu_values, nu=0.0):
    """Deviation || d_{z-1} d_z^{-1} P^1_k - e^{a_k} P^1_k || per degree and mu.

    P^1_k projects onto the image of the degree-(k-1) differential; the
    inverse is realized by least squares on that restricted isomorphism.
    Returns {k: [deviation per mu]} plus fitted exponential decay rates.
    """
    report = tightness_check(graph)
    if not report.tight:
        raise StructureError("projection law requires a tight graph")
    devs = {k: [] for k in range(1, graph.n + 1)}
    for mu in mu_values:
        z = complex(mu, nu)
        for k in range(1, graph.n + 1):
            ak = report.index_costs[k - 1]
            # work with the shifted matrices to avoid underflow:
            # d_{z-1} d_z^{-1} = e^{-a_k} * shifted(z-1) shifted(z)^{-1}
            sz = shifted_differential(graph, z, k - 1, ak)
            szm1 = shifted_differential(graph, z - 1.0, k - 1, ak)
            if sz.size == 0:
                devs[k].append(0.0)
                continue
            rank, u, _ = _svd_rank(sz, return_basis=True)
            if rank == 0:
                devs[k].append(0.0)
                continue
            p1 = u @ u.conj().T
            inv = np.linalg.pinv(sz, rcond=1e-13) @ p1
            # szm1 = e^{a_k(z-1)} d_{z-1} and inv = (e^{a_k z} d_z)^{-1} P1,
            # so e^{a_k} szm1 inv = d_{z-1} d_z^{-1} P1.
            op = np.exp(ak) * (szm1 @ inv)
            devs[k].append(
                float(np.linalg.norm(op - np.exp(ak) * p1, 2))
            )
    rates = {}
    mu_arr = np.asarray(mu_values, float)
    for k, vals in devs.items():
        arr = np.asarray(vals)
        if np.all(arr > 1e-300):
            rates[k] = float(-np.polyfit(mu_arr, np.log(arr), 1)[0])
        else:
            rates[k] = np.inf
    return devs, rates


def prescribe_increment(n, a, m1_1, m1_n, x0, xn, c0, cn):
    """Closed-form change of the limit invariant under boundary-level
    modifications of strengths c0 (index 0) and cn (index n)."""
    sgn = (-1.0) ** n
    return (
        np.exp(a) * (np.exp(c0) - 1.0) * m1_1
        + sgn * np.exp(a) * (1.0 - np.exp(cn)) * m1_n
        + c0 * x0
        - sgn * cn * xn
    )


def prescribe_tau(n, a, m1_1, m1_n, x0, xn, z_baseline, tau, residual_tol=1e-10):
    """Solve for (c0, cn) >= 0 with baseline + increment(c0, cn) = tau.

    For even n every target is reachable; for odd n the baseline is a floor
    and targets below it raise InfeasibleError.  Monotone bisection on the
    closed-form increment, then verified by forward evaluation.
    """
    if x0 <= 0 or xn <= 0:
        raise DomainError("need at least one vertex of index 0 and of index n")
    goal = float(tau) - float(z_baseline)
    if goal == 0.0:
        return 0.0, 0.0

    if n % 2 == 1 and goal < 0.0:
        raise InfeasibleError(
            f"target below the reachable floor {z_baseline} for odd dimension"
        )

    if goal > 0.0:
        f = lambda c: prescribe_increment(n, a, m1_1, m1_n, x0, xn, c, 0.0) - goal
        free = "c0"
    else:
        f = lambda c: prescribe_increment(n, a, m1_1, m1_n, x0, xn, 0.0, c) - goal
        free = "cn"

    hi = 1.0
    while f(hi) * f(0.0) > 0:
        hi *= 2.0
        if hi > 1e6:
            raise InfeasibleError("failed to bracket the prescription root")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(lo) * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-15 * (1.0 + hi):
            break
    c = 0.5 * (lo + hi)
    c0, cn = (c, 0.0) if free == "c0" else (0.0, c)
    check = z_baseline + prescribe_increment(n, a, m1_1, m1_n, x0, xn, c0, cn)
    if abs(check - tau) > residual_tol * (1.0 + abs(tau)):
        raise InfeasibleError(f"prescription residual {abs(check - tau):.3e}")
    return c0, cn


def graph_tensor(ga, gb) -> InstantonGraph:
    """Product graph with the graded sign rule.

    Vertices are pairs with added indices; edges act in one factor at a time,
    edges in the second factor acquire (-1)^(first factor index).  Weights
    add along the untouched factor (so they are just the factor weights).
    """
    pair = lambda va, vb: f"{va}*{vb}"
    verts = []
    for va in ga.vertices:
        for vb in gb.vertices:
            verts.append((pair(va, vb), ga.index_of[va] + gb.index_of[vb]))
    edges = []
    for e in ga.edges:
        for vb in gb.vertices:
            edges.append((pair(e.p, vb), pair(e.q, vb), e.sign, e.weight))
    for va in ga.vertices:
        koszul = (-1) ** ga.index_of[va]
        for e in gb.edges:
            edges.append((pair(va, e.p), pair(va, e.q), koszul * e.sign, e.weight))
    return InstantonGraph(verts, edges)
