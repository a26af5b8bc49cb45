"""LDPC codes: progressive-edge-growth construction, alist interchange,
syndrome computation, and sum-product syndrome decoding that understands
punctured and shortened positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import math
import numpy as np
from numba import njit

from .core import BinaryMatrix

# Sum-product numerical guards.
S_MAX = 30.0
_TANH_CLIP = 1.0 - 1e-12
DEFAULT_MAX_ITERS = 100


class LdpcCodeSpec:
    """A parity-check matrix with its dimensions and rate metadata.

    Wraps a sparse :class:`BinaryMatrix` H (M x N) and caches the flat
    edge structure the decoder kernel works on.  H must have no all-zero
    rows or columns.
    """

    def __init__(self, H: BinaryMatrix):
        for i, sup in enumerate(H.row_support):
            if sup.size == 0:
                raise ValueError(f"parity-check matrix has all-zero row {i}")
        col_seen = np.zeros(H.cols, dtype=bool)
        for sup in H.row_support:
            col_seen[sup] = True
        if not col_seen.all():
            j = int(np.flatnonzero(~col_seen)[0])
            raise ValueError(f"parity-check matrix has all-zero column {j}")
        self.H = H
        self.M = H.rows
        self.N = H.cols

    @property
    def base_rate(self) -> float:
        return 1.0 - self.M / self.N

    @cached_property
    def _edges(self):
        """Check-major CSR edge arrays plus the variable-major view.

        Returns (cm_ptr, cm_var, vm_ptr, vm_eidx): edge e connects check
        (row) ``searchsorted(cm_ptr, e)`` to variable cm_var[e]; vm_eidx
        lists, for each variable, its edge ids in cm order.
        """
        cm_ptr = np.zeros(self.M + 1, dtype=np.int64)
        for i, sup in enumerate(self.H.row_support):
            cm_ptr[i + 1] = cm_ptr[i] + sup.size
        cm_var = np.concatenate([s.astype(np.int32) for s in self.H.row_support])
        order = np.argsort(cm_var, kind="stable")
        vm_eidx = order.astype(np.int64)
        counts = np.bincount(cm_var, minlength=self.N)
        vm_ptr = np.zeros(self.N + 1, dtype=np.int64)
        np.cumsum(counts, out=vm_ptr[1:])
        return cm_ptr, cm_var, vm_ptr, vm_eidx

    def __eq__(self, other):
        if not isinstance(other, LdpcCodeSpec):
            return NotImplemented
        return self.H == other.H


def syndrome(spec: LdpcCodeSpec, x: np.ndarray) -> np.ndarray:
    """s = H x over GF(2)."""
    if x.shape != (spec.N,):
        raise ValueError(f"expected a length-{spec.N} key, got {x.shape}")
    return spec.H.multiply(x)


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


@njit(cache=True)
def _peg_core(M, col_order, col_deg, max_var_deg):
    """Progressive edge growth.  For each variable (in the given order), each
    edge goes to the check at maximal BFS depth in the current subgraph
    (unreachable counts as infinite), ties by lowest current check degree,
    then lowest check index."""
    N = col_order.size
    E = 0
    for j in range(N):
        E += col_deg[j]
    edge_var = np.empty(E, np.int32)
    edge_next = np.empty(E, np.int32)        # next edge in same check
    check_head = np.full(M, -1, np.int32)
    check_deg = np.zeros(M, np.int32)
    var_nbrs = np.full((N, max_var_deg), -1, np.int32)
    var_deg = np.zeros(N, np.int32)

    dist = np.empty(M, np.int64)
    attached = np.zeros(M, np.uint8)
    var_seen = np.zeros(N, np.uint8)
    frontier = np.empty(M, np.int32)
    nxt = np.empty(M, np.int32)
    touched_vars = np.empty(N, np.int32)

    ecount = 0
    INF = np.int64(1 << 60)
    for oi in range(N):
        v = col_order[oi]
        for k in range(col_deg[v]):
            # BFS from v over the bipartite graph built so far
            for cc in range(M):
                dist[cc] = INF
                attached[cc] = 0
            ntouch = 0
            for t in range(var_deg[v]):
                attached[var_nbrs[v, t]] = 1
            fsz = 0
            for t in range(var_deg[v]):
                cc = var_nbrs[v, t]
                if dist[cc] == INF:
                    dist[cc] = 1
                    frontier[fsz] = cc
                    fsz += 1
            var_seen[v] = 1
            touched_vars[ntouch] = v
            ntouch += 1
            depth = np.int64(1)
            while fsz > 0:
                nsz = 0
                for fi in range(fsz):
                    cc = frontier[fi]
                    e = check_head[cc]
                    while e != -1:
                        w = edge_var[e]
                        e = edge_next[e]
                        if var_seen[w] == 1:
                            continue
                        var_seen[w] = 1
                        touched_vars[ntouch] = w
                        ntouch += 1
                        for t in range(var_deg[w]):
                            c2 = var_nbrs[w, t]
                            if dist[c2] == INF:
                                dist[c2] = depth + 2
                                nxt[nsz] = c2
                                nsz += 1
                for fi in range(nsz):
                    frontier[fi] = nxt[fi]
                fsz = nsz
                depth += 2
            # pick the best check
            best = -1
            best_d = np.int64(-1)
            best_deg = np.int32(0)
            for cc in range(M):
                if attached[cc] == 1:
                    continue
                d = dist[cc]
                if d > best_d or (d == best_d and (check_deg[cc] < best_deg
                                                   or (check_deg[cc] == best_deg
                                                       and cc < best))):
                    best = cc
                    best_d = d
                    best_deg = check_deg[cc]
            # attach edge v -- best
            edge_var[ecount] = v
            edge_next[ecount] = check_head[best]
            check_head[best] = ecount
            ecount += 1
            check_deg[best] += 1
            var_nbrs[v, var_deg[v]] = best
            var_deg[v] += 1
            for t in range(ntouch):
                var_seen[touched_vars[t]] = 0
    return edge_var, check_head, edge_next


def construct_ldpc_peg(N: int, M: int, column_degrees) -> LdpcCodeSpec:
    """Deterministic progressive-edge-growth construction.

    Columns are processed in nondecreasing degree order (ties by index).
    """
    col_deg = np.asarray(column_degrees, dtype=np.int32)
    if col_deg.shape != (N,):
        raise ValueError(f"need {N} column degrees, got {col_deg.shape}")
    if N < 1 or M < 1:
        raise ValueError("N and M must be positive")
    if col_deg.min() < 2:
        raise ValueError("column degrees must be >= 2")
    if col_deg.max() > M:
        raise ValueError("a column degree exceeds the number of checks")
    if int(col_deg.sum()) < M:
        raise ValueError("degree sequence cannot cover every check")
    order = np.lexsort((np.arange(N), col_deg)).astype(np.int64)
    edge_var, check_head, edge_next = _peg_core(M, order, col_deg,
                                                int(col_deg.max()))
    rows = []
    for cnode in range(M):
        sup = []
        e = int(check_head[cnode])
        while e != -1:
            sup.append(int(edge_var[e]))
            e = int(edge_next[e])
        rows.append(sorted(sup))
    return LdpcCodeSpec(BinaryMatrix(M, N, rows))


def default_degree_sequence(N: int, profile: str) -> np.ndarray:
    """The repo's stand-in column-degree profiles (not from any published
    ensemble).

    ``r07`` mixes degrees 2/3/8 (25%/55%/20%, mean 3.75): the light
    degree-2 mass keeps the waterfall competitive while staying robust to
    10-15% random puncturing, and the degree-8 tail removes most of the
    punctured-stopping-set error floor.  ``r06`` is a plain 3/4 mix
    (mean 3.5).  Both calibrated so single-round performance is comparable
    to the polar codes they are raced against.
    """
    if profile == "r07":
        n2 = round(0.25 * N)
        n3 = round(0.55 * N)
        degs = [2] * n2 + [3] * n3 + [8] * (N - n2 - n3)
    elif profile == "r06":
        n4 = round(0.5 * N)
        degs = [3] * (N - n4) + [4] * n4
    else:
        raise ValueError(f"unknown degree profile: {profile!r}")
    return np.array(sorted(degs), dtype=np.int32)


# ---------------------------------------------------------------------------
# alist interchange
# ---------------------------------------------------------------------------


def save_alist(spec: LdpcCodeSpec) -> str:
    """Serialize H in the standard alist layout (1-based, zero-padded)."""
    cols = [[] for _ in range(spec.N)]
    for i, sup in enumerate(spec.H.row_support):
        for j in sup:
            cols[int(j)].append(i)
    col_deg = [len(cl) for cl in cols]
    row_deg = [len(r) for r in spec.H.row_support]
    dmax_c, dmax_r = max(col_deg), max(row_deg)
    lines = [f"{spec.N} {spec.M}", f"{dmax_c} {dmax_r}"]
    lines.append(" ".join(str(d) for d in col_deg))
    lines.append(" ".join(str(d) for d in row_deg))
    for cl in cols:
        padded = [str(i + 1) for i in cl] + ["0"] * (dmax_c - len(cl))
        lines.append(" ".join(padded))
    for sup in spec.H.row_support:
        padded = [str(int(j) + 1) for j in sup] + ["0"] * (dmax_r - len(sup))
        lines.append(" ".join(padded))
    return "\n".join(lines) + "\n"


def _ints(line: str, lineno: int) -> list:
    try:
        return [int(t) for t in line.split()]
    except ValueError as exc:
        raise ValueError(f"alist line {lineno}: not an integer list ({exc})")


def load_alist(text: str) -> LdpcCodeSpec:
    """Parse alist text (tolerates both padded and unpadded adjacency
    lines) and cross-check the column lists against the row lists."""
    lines = text.splitlines()
    body = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip()]
    if len(body) < 4:
        raise ValueError("alist line 1: truncated header")
    dims = _ints(body[0][1], body[0][0])
    if len(dims) != 2:
        raise ValueError(f"alist line {body[0][0]}: expected 'N M'")
    N, M = dims
    if N < 1 or M < 1:
        raise ValueError(f"alist line {body[0][0]}: bad dimensions {N} x {M}")
    col_deg = _ints(body[2][1], body[2][0])
    row_deg = _ints(body[3][1], body[3][0])
    if len(col_deg) != N:
        raise ValueError(f"alist line {body[2][0]}: expected {N} column degrees")
    if len(row_deg) != M:
        raise ValueError(f"alist line {body[3][0]}: expected {M} row degrees")
    if len(body) < 4 + N + M:
        raise ValueError(f"alist line {body[-1][0]}: adjacency lists truncated")
    col_adj = []
    for j in range(N):
        lineno, ln = body[4 + j]
        entries = [e for e in _ints(ln, lineno) if e != 0]
        if len(entries) != col_deg[j]:
            raise ValueError(f"alist line {lineno}: column {j} lists "
                             f"{len(entries)} checks, degree says {col_deg[j]}")
        if any(not 1 <= e <= M for e in entries):
            raise ValueError(f"alist line {lineno}: column {j} has a check "
                             f"index out of [1, {M}]")
        col_adj.append(sorted(e - 1 for e in entries))
    rows = []
    for i in range(M):
        lineno, ln = body[4 + N + i]
        entries = [e for e in _ints(ln, lineno) if e != 0]
        if len(entries) != row_deg[i]:
            raise ValueError(f"alist line {lineno}: row {i} lists "
                             f"{len(entries)} variables, degree says {row_deg[i]}")
        if any(not 1 <= e <= N for e in entries):
            raise ValueError(f"alist line {lineno}: row {i} has a variable "
                             f"index out of [1, {N}]")
        rows.append(sorted(e - 1 for e in entries))
    # the two adjacency views must describe the same matrix
    from_rows = [[] for _ in range(N)]
    for i, sup in enumerate(rows):
        for j in sup:
            from_rows[j].append(i)
    for j in range(N):
        if from_rows[j] != col_adj[j]:
            raise ValueError(f"alist inconsistency at column {j}: row lists "
                             f"imply checks {from_rows[j]}, column list says "
                             f"{col_adj[j]}")
    return LdpcCodeSpec(BinaryMatrix(M, N, rows))


# ---------------------------------------------------------------------------
# rate adaption
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RateAdaptionPlan:
    """Which extended-key positions are punctured (random, unknown to the
    decoder) and which are shortened (publicly known values)."""

    punctured: np.ndarray
    shortened: np.ndarray
    shortened_values: np.ndarray

    def __post_init__(self):
        if self.shortened.shape != self.shortened_values.shape:
            raise ValueError("shortened positions/values length mismatch")
        if np.intersect1d(self.punctured, self.shortened).size:
            raise ValueError("punctured and shortened positions overlap")

    @classmethod
    def empty(cls) -> "RateAdaptionPlan":
        z = np.zeros(0, dtype=np.int64)
        return cls(z, z.copy(), np.zeros(0, dtype=np.uint8))


def effective_rate(spec: LdpcCodeSpec, plan: RateAdaptionPlan) -> float:
    """R = (N - M - s) / (N - s - p) for s shortened and p punctured bits."""
    s = plan.shortened.size
    p = plan.punctured.size
    return (spec.N - spec.M - s) / (spec.N - s - p)


# ---------------------------------------------------------------------------
# decoding
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BpDecodeResult:
    success: bool
    estimate: np.ndarray | None
    iterations_used: int


@njit(cache=True, fastmath=True)
def _bp_kernel(prior, sgn, cm_ptr, cm_var, vm_ptr, vm_eidx, max_iters, max_row):
    E = cm_var.size
    N = prior.size
    M = cm_ptr.size - 1
    m_vc = np.empty(E, np.float64)
    m_cv = np.zeros(E, np.float64)
    est = np.empty(N, np.uint8)
    tvals = np.empty(max_row, np.float64)
    sufx = np.empty(max_row + 1, np.float64)

    for e in range(E):
        m_vc[e] = prior[cm_var[e]]

    # round 0: the side information may already satisfy the syndrome
    for v in range(N):
        est[v] = 1 if prior[v] < 0.0 else 0
    ok = True
    for cnode in range(M):
        par = 0
        for e in range(cm_ptr[cnode], cm_ptr[cnode + 1]):
            par ^= est[cm_var[e]]
        if (1 - 2 * par) != sgn[cnode]:
            ok = False
            break
    if ok:
        return 0, est, 0

    for it in range(1, max_iters + 1):
        delta = 0.0
        # check-node update: tanh-product rule with the syndrome sign
        for cnode in range(M):
            lo = cm_ptr[cnode]
            hi = cm_ptr[cnode + 1]
            d = hi - lo
            for kk in range(d):
                tvals[kk] = math.tanh(0.5 * m_vc[lo + kk])
            sufx[d] = 1.0
            for kk in range(d - 1, -1, -1):
                sufx[kk] = sufx[kk + 1] * tvals[kk]
            pre = 1.0
            for kk in range(d):
                prod = pre * sufx[kk + 1]
                if prod > _TANH_CLIP:
                    prod = _TANH_CLIP
                elif prod < -_TANH_CLIP:
                    prod = -_TANH_CLIP
                newm = sgn[cnode] * math.log((1.0 + prod) / (1.0 - prod))
                diff = abs(newm - m_cv[lo + kk])
                if diff > delta:
                    delta = diff
                m_cv[lo + kk] = newm
                pre *= tvals[kk]
        # variable-node update and tentative decision
        for v in range(N):
            tot = prior[v]
            for t in range(vm_ptr[v], vm_ptr[v + 1]):
                tot += m_cv[vm_eidx[t]]
            est[v] = 1 if tot < 0.0 else 0
            for t in range(vm_ptr[v], vm_ptr[v + 1]):
                e = vm_eidx[t]
                out = tot - m_cv[e]
                if out > S_MAX:
                    out = S_MAX
                elif out < -S_MAX:
                    out = -S_MAX
                m_vc[e] = out
        ok = True
        for cnode in range(M):
            par = 0
            for e in range(cm_ptr[cnode], cm_ptr[cnode + 1]):
                par ^= est[cm_var[e]]
            if (1 - 2 * par) != sgn[cnode]:
                ok = False
                break
        if ok:
            return 0, est, it
        if delta == 0.0:
            # exact message fixed point: further iterations cannot change
            return 1, est, it
    return 1, est, max_iters


def bp_syndrome_decode(spec: LdpcCodeSpec, y_ext: np.ndarray, s: np.ndarray,
                       plan: RateAdaptionPlan, assumed_qber: float,
                       max_iters: int = DEFAULT_MAX_ITERS) -> BpDecodeResult:
    """Flooding sum-product decoding toward the target syndrome ``s``.

    Priors: ordinary positions get (1 - 2 y_i) ln((1-q)/q); punctured
    positions 0; shortened positions are clamped to their announced values.
    Decoding stops as soon as the hard decision satisfies H x = s (checked
    before the first iteration too), or at an exact message fixed point,
    where extra iterations provably cannot change the outcome.
    """
    if y_ext.shape != (spec.N,):
        raise ValueError(f"expected a length-{spec.N} key, got {y_ext.shape}")
    if s.shape != (spec.M,):
        raise ValueError(f"expected a length-{spec.M} syndrome, got {s.shape}")
    if not 0.0 < assumed_qber < 0.5:
        raise ValueError(f"assumed QBER must be in (0, 0.5), got {assumed_qber}")
    llr0 = math.log((1.0 - assumed_qber) / assumed_qber)
    prior = (1.0 - 2.0 * y_ext.astype(np.float64)) * llr0
    prior[plan.punctured] = 0.0
    prior[plan.shortened] = np.where(plan.shortened_values.astype(bool),
                                     -S_MAX, S_MAX)
    sgn = (1 - 2 * s.astype(np.int64)).astype(np.float64)
    cm_ptr, cm_var, vm_ptr, vm_eidx = spec._edges
    max_row = int(max(sup.size for sup in spec.H.row_support))
    status, est, iters = _bp_kernel(prior, sgn, cm_ptr, cm_var, vm_ptr,
                                    vm_eidx, max_iters, max_row)
    if status == 0:
        return BpDecodeResult(True, est.copy(), iters)
    return BpDecodeResult(False, None, iters)
