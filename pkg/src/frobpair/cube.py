"""State-cube chain complexes over a Frobenius pair.

A cube assigns a sort word to every vertex of {0,1}^n and a merge/split move
to every bit-flip edge.  The differential in homological degree i is the
signed sum of edge maps out of weight-i vertices, with the standard sign
(-1)^(number of 1-bits before the flipped index).  Circle tracking across an
edge is positional: untouched circles keep their relative order and the move
names the output positions explicitly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .cobordism import MERGE_GEN, SPLIT_GEN
from .pair import FrobeniusPair
from .ring import INTEGERS, MOD2, RATIONALS, RingError, specialize
from .tensor import LinMap, compose, tensor, word


class CubeError(ValueError):
    """Structural violations in a state cube."""


@dataclass(frozen=True)
class EdgeMove:
    kind: str          # merge | split
    i: int             # 1-based source position (first circle for merge)
    j: int = 0         # second source position for merge
    outs: tuple = ()   # output position(s): (out,) for merge, (p1, p2) for split
    sorts: tuple = ()  # output sort(s)


@dataclass
class StateCube:
    n: int
    vertices: dict    # bitstring -> sort word (tuple)
    edges: dict       # (source bitstring, flipped index) -> EdgeMove


def _bits(n):
    return [format(v, f"0{n}b") if n else "" for v in range(2 ** n)]


def _flip(bits, k):
    return bits[:k] + ("1" if bits[k] == "0" else "0") + bits[k + 1:]


def _weight(bits):
    return bits.count("1")


def _correspondence(w_in, move):
    """Positional maps across an edge: (out word, untouched src->dst dict).

    Raises CubeError if the move is not signature-legal on w_in.
    """
    n_in = len(w_in)
    if move.kind == "merge":
        i, j, (out,) = move.i, move.j, move.outs
        if i == j or not (1 <= i <= n_in and 1 <= j <= n_in):
            raise CubeError(f"merge positions {i},{j} out of range")
        key = (w_in[min(i, j) - 1], w_in[max(i, j) - 1], move.sorts[0])
        if key not in MERGE_GEN:
            raise CubeError(f"no generator for {key[0]}{key[1]}->{key[2]}")
        rest = [p for p in range(1, n_in + 1) if p not in (i, j)]
        n_out = n_in - 1
        if not 1 <= out <= n_out:
            raise CubeError(f"merge output position {out} out of range")
        slots = [p for p in range(1, n_out + 1) if p != out]
        corr = dict(zip(rest, slots))
        w_out = [None] * n_out
        w_out[out - 1] = move.sorts[0]
        for src, dst in corr.items():
            w_out[dst - 1] = w_in[src - 1]
        return tuple(w_out), corr
    if move.kind == "split":
        i, (p1, p2) = move.i, move.outs
        if not 1 <= i <= n_in:
            raise CubeError(f"split position {i} out of range")
        key = (w_in[i - 1],) + tuple(move.sorts)
        if key not in SPLIT_GEN:
            raise CubeError(f"no generator for {key[0]}->{key[1]}{key[2]}")
        n_out = n_in + 1
        if p1 == p2 or not (1 <= p1 <= n_out and 1 <= p2 <= n_out):
            raise CubeError(f"split output positions {p1},{p2} out of range")
        rest = [p for p in range(1, n_in + 1) if p != i]
        slots = [p for p in range(1, n_out + 1) if p not in (p1, p2)]
        corr = dict(zip(rest, slots))
        w_out = [None] * n_out
        w_out[p1 - 1], w_out[p2 - 1] = move.sorts
        for src, dst in corr.items():
            w_out[dst - 1] = w_in[src - 1]
        return tuple(w_out), corr
    raise CubeError(f"unknown move kind {move.kind!r}")


def _provenance(w_in, move):
    """For each output position, the set of source positions it may contain.

    Untouched circles give singletons; a merge output is the union of its two
    sources; split pieces inherit the full parent set (positional tracking
    cannot separate the halves, so this over-approximates)."""
    w_out, corr = _correspondence(w_in, move)
    back = {dst: src for src, dst in corr.items()}
    consumed = frozenset((move.i, move.j) if move.kind == "merge" else (move.i,))
    return w_out, [frozenset((back[p],)) if p in back else consumed
                   for p in range(1, len(w_out) + 1)]


def _square_provenance(cube, b, first, second):
    w0 = cube.vertices[b]
    _w1, prov1 = _provenance(w0, cube.edges[(b, first)])
    b1 = _flip(b, first)
    _w2, prov2 = _provenance(cube.vertices[b1], cube.edges[(b1, second)])
    return [frozenset().union(*(prov1[q - 1] for q in sources)) for sources in prov2]


def validate_cube(cube: StateCube):
    """Check the cube invariants; raises CubeError on the first violation."""
    bits_all = _bits(cube.n)
    for b in bits_all:
        if b not in cube.vertices:
            raise CubeError(f"missing vertex {b!r}")
    for b in bits_all:
        for k in range(cube.n):
            key = (b, k)
            if b[k] == "0":
                if key not in cube.edges:
                    raise CubeError(f"missing edge {b}->{_flip(b, k)}")
                w_in = cube.vertices[b]
                w_out, _ = _correspondence(w_in, cube.edges[key])
                if tuple(w_out) != tuple(cube.vertices[_flip(b, k)]):
                    raise CubeError(
                        f"edge {b}/{k}: move produces word {''.join(w_out)}, "
                        f"vertex has {''.join(cube.vertices[_flip(b, k)])}")
            elif key in cube.edges:
                raise CubeError(f"edge {b}/{k} flips a 1-bit")
    # every square must act on compatible circles: both orders of the two
    # flips must allow a common source set at every far-corner position (the
    # per-path provenance over-approximates the true one, so disjointness
    # certifies incompatibility)
    for b in bits_all:
        zeros = [k for k in range(cube.n) if b[k] == "0"]
        for x in range(len(zeros)):
            for y in range(x + 1, len(zeros)):
                k, l = zeros[x], zeros[y]
                one = _square_provenance(cube, b, k, l)
                two = _square_provenance(cube, b, l, k)
                if any(not (s & t) for s, t in zip(one, two)):
                    raise CubeError(
                        f"square at {b} (bits {k},{l}) does not commute")
    return True


def edge_map(cube: StateCube, pair: FrobeniusPair, b, k) -> LinMap:
    """The move on edge (b, k) realized as generator (x) identities with the
    positional reordering convention."""
    move = cube.edges[(b, k)]
    w_in = tuple(cube.vertices[b])
    w_out, corr = _correspondence(w_in, move)
    spec = pair.spec
    table = pair.generator_table()
    if move.kind == "merge":
        i, j = min(move.i, move.j), max(move.i, move.j)
        gen = MERGE_GEN[(w_in[i - 1], w_in[j - 1], move.sorts[0])]
        front = [i - 1, j - 1]
        consumed = 2
    else:
        gen = SPLIT_GEN[(w_in[move.i - 1],) + tuple(move.sorts)]
        front = [move.i - 1]
        consumed = 1
    if gen not in table:
        raise CubeError(f"pair {pair.name!r} is missing generator {gen}")
    rest = [p for p in range(len(w_in)) if p not in front]
    to_front = LinMap.permutation(spec, word(w_in), front + rest)
    mid = tensor(table[gen], LinMap.identity(spec, word([w_in[p] for p in rest])))
    # mid output: generator codomain first, then untouched circles in order
    produced = len(move.outs)
    out_perm = [None] * len(w_out)
    for t, out_pos in enumerate(move.outs):
        out_perm[out_pos - 1] = t
    for t, src in enumerate(rest):
        out_perm[corr[src + 1] - 1] = produced + t
    place = LinMap.permutation(spec, mid.cod, out_perm)
    assert place.cod == tuple(w_out)
    return compose(place, compose(mid, to_front))


class BlockMatrix:
    """Sparse exact matrix indexed by (vertex, basis tuple) pairs."""

    def __init__(self, rows, cols, ring_decl):
        self.rows = list(rows)
        self.cols = list(cols)
        self.ring = ring_decl
        self.entries = {}

    def add(self, r, c, v):
        if v.is_zero():
            return
        s = self.entries.get((r, c))
        s = v if s is None else s + v
        if s.is_zero():
            self.entries.pop((r, c), None)
        else:
            self.entries[(r, c)] = s

    def is_zero(self):
        return not self.entries

    def first_nonzero(self):
        order = {c: i for i, c in enumerate(self.cols)}
        rorder = {r: i for i, r in enumerate(self.rows)}
        best = min(self.entries, key=lambda rc: (order[rc[1]], rorder[rc[0]]))
        return best[0], best[1], self.entries[best]

    def compose(self, other: "BlockMatrix") -> "BlockMatrix":
        """self * other (apply other first)."""
        out = BlockMatrix(self.rows, other.cols, self.ring)
        by_mid = {}
        for (r, m), v in self.entries.items():
            by_mid.setdefault(m, []).append((r, v))
        for (m, c), v in other.entries.items():
            for r, u in by_mid.get(m, ()):
                out.add(r, c, u * v)
        return out

    def dense(self):
        """Rows of constant entries; raises RingError on non-constant ones."""
        idx_r = {r: i for i, r in enumerate(self.rows)}
        idx_c = {c: i for i, c in enumerate(self.cols)}
        out = [[0] * len(self.cols) for _ in self.rows]
        for (r, c), v in self.entries.items():
            out[idx_r[r]][idx_c[c]] = v.constant_value()
        return out


def vertex_keys(cube: StateCube, pair: FrobeniusPair, degree):
    keys = []
    for b in _bits(cube.n):
        if _weight(b) != degree:
            continue
        for t in pair.spec.tuples(word(cube.vertices[b])):
            keys.append((b, t))
    return keys


def differential(cube: StateCube, pair: FrobeniusPair, i) -> BlockMatrix:
    """d_i: degree-i chain space -> degree-(i+1) chain space as a block matrix."""
    cols = vertex_keys(cube, pair, i)
    rows = vertex_keys(cube, pair, i + 1)
    d = BlockMatrix(rows, cols, pair.ring)
    if i < 0 or i >= cube.n:
        return d
    for b in _bits(cube.n):
        if _weight(b) != i:
            continue
        for k in range(cube.n):
            if b[k] != "0":
                continue
            sign = -1 if _weight(b[:k]) % 2 else 1
            m = edge_map(cube, pair, b, k)
            target = _flip(b, k)
            for (o, t), v in m.entries.items():
                d.add((target, o), (b, t), v if sign > 0 else -v)
    return d


def check_d_squared(cube: StateCube, pair: FrobeniusPair):
    """True iff d_{i+1} d_i = 0 for all i; otherwise (False, witness entry)."""
    for i in range(cube.n - 1):
        sq = differential(cube, pair, i + 1).compose(differential(cube, pair, i))
        if not sq.is_zero():
            return False, sq.first_nonzero()
    return True, None


def specialize_pair(pair: FrobeniusPair, assignment) -> FrobeniusPair:
    """Apply a ring specialization to every generator entry."""
    maps = {name: m.map_entries(lambda v: specialize(v, assignment))
            for name, m in pair.maps.items()}
    return FrobeniusPair(pair.ring, pair.spec, maps, name=pair.name,
                         unit_label=pair.unit_label, notes=dict(pair.notes))


# -- exact linear algebra -----------------------------------------------------------


def sparse_rank_fraction(rows) -> int:
    """Rank of sparse rows ({col: value} dicts) by elimination over Q."""
    pivots = {}
    rank = 0
    for row in rows:
        row = {c: Fraction(v) for c, v in row.items() if v}
        while row:
            c = min(row)
            piv = pivots.get(c)
            if piv is None:
                inv = 1 / row[c]
                pivots[c] = {cc: vv * inv for cc, vv in row.items()}
                rank += 1
                break
            f = row[c]
            for cc, vv in piv.items():
                nv = row.get(cc, 0) - f * vv
                if nv:
                    row[cc] = nv
                else:
                    row.pop(cc, None)
        # an emptied row contributes nothing
    return rank


def sparse_rank_gf2(rows) -> int:
    """Rank over GF(2); rows are {col: value} dicts or column sets."""
    pivots = {}
    rank = 0
    for row in rows:
        cur = {c for c, v in row.items() if int(v) % 2} if isinstance(row, dict) else set(row)
        while cur:
            c = min(cur)
            piv = pivots.get(c)
            if piv is None:
                pivots[c] = cur
                rank += 1
                break
            cur = cur ^ piv
    return rank


def rank_fraction(mat) -> int:
    """Gaussian elimination over Q."""
    m = [[Fraction(x) for x in row] for row in mat]
    rank, col = 0, 0
    rows, cols = len(m), len(m[0]) if m else 0
    while rank < rows and col < cols:
        piv = next((r for r in range(rank, rows) if m[r][col]), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = 1 / m[rank][col]
        m[rank] = [x * inv for x in m[rank]]
        for r in range(rows):
            if r != rank and m[r][col]:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
        col += 1
    return rank


def rank_gf2(mat) -> int:
    m = [[int(x) % 2 for x in row] for row in mat]
    rank, col = 0, 0
    rows, cols = len(m), len(m[0]) if m else 0
    while rank < rows and col < cols:
        piv = next((r for r in range(rank, rows) if m[r][col]), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(rows):
            if r != rank and m[r][col]:
                m[r] = [(a + b) % 2 for a, b in zip(m[r], m[rank])]
        rank += 1
        col += 1
    return rank


def smith_normal_form(mat):
    """(D, U, V) with U*mat*V = D diagonal, d_k | d_{k+1}, U and V unimodular."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    a = [[int(x) for x in row] for row in mat]
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def row_op(i, j, c):  # Ri += c Rj
        a[i] = [x + c * y for x, y in zip(a[i], a[j])]
        u[i] = [x + c * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, c):  # Ci += c Cj
        for r in range(rows):
            a[r][i] += c * a[r][j]
        for r in range(cols):
            v[r][i] += c * v[r][j]

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def col_swap(i, j):
        for r in range(rows):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        for r in range(cols):
            v[r][i], v[r][j] = v[r][j], v[r][i]

    def row_negate(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while True:
        pivots = [(abs(a[r][c]), r, c) for r in range(t, rows) for c in range(t, cols)
                  if a[r][c]]
        if not pivots:
            break
        _, pr, pc = min(pivots)
        row_swap(t, pr)
        col_swap(t, pc)
        while True:
            # clear column t, then row t; restart if a remainder survives
            dirty = False
            for r in range(t + 1, rows):
                if a[r][t]:
                    q = a[r][t] // a[t][t]
                    row_op(r, t, -q)
                    if a[r][t]:
                        row_swap(t, r)
                        dirty = True
            for c in range(t + 1, cols):
                if a[t][c]:
                    q = a[t][c] // a[t][t]
                    col_op(c, t, -q)
                    if a[t][c]:
                        col_swap(t, c)
                        dirty = True
            if not dirty:
                break
        # force divisibility of the remaining block by the pivot
        bad = next(((r, c) for r in range(t + 1, rows) for c in range(t + 1, cols)
                    if a[r][c] % a[t][t]), None)
        if bad is not None:
            row_op(t, bad[0], 1)
            continue
        if a[t][t] < 0:
            row_negate(t)
        t += 1
        if t == min(rows, cols):
            break
    d = [[a[r][c] if r == c else 0 for c in range(cols)] for r in range(rows)]
    for r in range(rows):
        for c in range(cols):
            if r != c and a[r][c]:
                raise AssertionError("SNF did not terminate diagonal")
    return d, u, v


COEFFS = {"q": RATIONALS, "z": INTEGERS, "z2": MOD2}
_COEFF_ALIASES = {"rationals": "q", "integers": "z", "integers-mod-2": "z2"}


def homology(cube: StateCube, pair: FrobeniusPair, coefficients):
    """Per-degree homology of the cube complex.

    Returns a list (degree 0..n) of {"betti": int, "torsion": [int, ...]};
    torsion is always empty over a field.  All generator entries must be
    constants in the pair's ring: specialize first.
    """
    coefficients = _COEFF_ALIASES.get(coefficients, coefficients)
    if coefficients not in COEFFS:
        raise CubeError(f"unknown coefficients {coefficients!r}")
    if coefficients == "q" and pair.ring.domain == MOD2:
        raise CubeError("cannot take rational coefficients of a Z/2 pair")
    dims = [len(vertex_keys(cube, pair, i)) for i in range(cube.n + 1)]
    diffs = [differential(cube, pair, i) for i in range(cube.n)]

    def sparse_rows(d):
        cols = {c: k for k, c in enumerate(d.cols)}
        rows = {}
        try:
            for (r, c), v in d.entries.items():
                rows.setdefault(r, {})[cols[c]] = v.constant_value()
        except RingError as exc:
            raise CubeError(f"specialize first: {exc}") from None
        return list(rows.values())

    def rank_of(i):
        if i < 0 or i >= cube.n or not dims[i] or not dims[i + 1]:
            return 0
        rows = sparse_rows(diffs[i])
        return sparse_rank_gf2(rows) if coefficients == "z2" else sparse_rank_fraction(rows)

    out = []
    for i in range(cube.n + 1):
        betti = dims[i] - rank_of(i) - rank_of(i - 1)
        torsion = []
        if coefficients == "z" and i > 0 and dims[i] and dims[i - 1]:
            try:
                d, _u, _v = smith_normal_form(diffs[i - 1].dense())
            except RingError as exc:
                raise CubeError(f"specialize first: {exc}") from None
            torsion = [d[k][k] for k in range(min(len(d), len(d[0]) if d else 0))
                       if abs(d[k][k]) > 1]
        out.append({"betti": betti, "torsion": torsion})
    return out


def euler_characteristic(report) -> int:
    return sum((-1) ** i * slot["betti"] for i, slot in enumerate(report))


def vertex_euler(cube: StateCube, pair: FrobeniusPair) -> int:
    return sum((-1) ** _weight(b) * pair.spec.dim(word(w))
               for b, w in cube.vertices.items())


# -- cube files -----------------------------------------------------------------------


def cube_to_json(cube: StateCube) -> str:
    edges = {}
    for (b, k), move in sorted(cube.edges.items()):
        key = b[:k] + "*" + b[k + 1:]
        if move.kind == "merge":
            edges[key] = {"kind": "merge", "i": move.i, "j": move.j,
                          "out": move.outs[0], "sort": move.sorts[0]}
        else:
            edges[key] = {"kind": "split", "i": move.i,
                          "outs": list(move.outs), "sorts": list(move.sorts)}
    obj = {
        "n": cube.n,
        "vertices": {b: list(cube.vertices[b]) for b in _bits(cube.n)},
        "edges": edges,
    }
    return json.dumps(obj, indent=2) + "\n"


def cube_from_json(text) -> StateCube:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CubeError(f"not a cube file: {exc}") from None
    n = obj.get("n")
    if not isinstance(n, int) or n < 0:
        raise CubeError("missing or bad field n")
    vertices = {}
    for b, w in obj.get("vertices", {}).items():
        vertices[b] = tuple(w)
    edges = {}
    for key, mv in obj.get("edges", {}).items():
        if key.count("*") != 1 or len(key) != n:
            raise CubeError(f"bad edge key {key!r}")
        k = key.index("*")
        b = key.replace("*", "0")
        kind = mv.get("kind")
        if kind == "merge":
            edges[(b, k)] = EdgeMove("merge", mv["i"], mv["j"],
                                     (mv["out"],), (mv["sort"],))
        elif kind == "split":
            edges[(b, k)] = EdgeMove("split", mv["i"], 0,
                                     tuple(mv["outs"]), tuple(mv["sorts"]))
        else:
            raise CubeError(f"edge {key!r}: unknown kind {kind!r}")
    cube = StateCube(n, vertices, edges)
    validate_cube(cube)
    return cube


def load_cube(path) -> StateCube:
    with open(path, encoding="utf-8") as fh:
        return cube_from_json(fh.read())
