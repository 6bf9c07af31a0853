"""Shared test utilities: a random generator of valid state cubes.

States are modelled as cycles of a permutation: the all-zero state is a
random permutation sigma of a point set, each crossing is a transposition on
two dedicated points, and the state for bits s has permutation
sigma * prod(t_i for s_i = 1).  Multiplying by a disjoint transposition
merges or splits cycles, the transpositions commute, and cycle membership
gives canonical circle tracking, so every square commutes by construction.
Sorts are assigned randomly subject to the generator signature, with the
all-inessential labelling as a guaranteed-legal fallback.
"""

from frobpair.cobordism import MERGE_GEN, SPLIT_GEN
from frobpair.cube import EdgeMove, StateCube, validate_cube


def brute_force_pole_degrees(w):
    """All reduction results over every deletion order; confluence oracle."""
    if not w:
        return {0}
    results = set()
    stack = [tuple(w)]
    seen = set()
    while stack:
        cur = stack.pop()
        if cur in seen:
            continue
        seen.add(cur)
        n = len(cur)
        reducible = False
        for i in range(n):
            j = (i + 1) % n
            if i != j and cur[i] == cur[j]:
                reducible = True
                stack.append(tuple(cur[k] for k in range(n) if k not in (i, j)))
        if not reducible:
            results.add(len(cur) // 2)
    return results


def _cycles(perm):
    seen, out = set(), []
    for x in range(len(perm)):
        if x in seen:
            continue
        cyc = [x]
        y = perm[x]
        while y != x:
            cyc.append(y)
            y = perm[y]
        seen.update(cyc)
        out.append(frozenset(cyc))
    return sorted(out, key=min)


def _apply_chords(sigma, chords, bits):
    t = {}
    for k, (a, b) in enumerate(chords):
        if bits[k] == "1":
            t[a], t[b] = b, a
    return [sigma[t.get(x, x)] for x in range(len(sigma))]


def _bits_all(n):
    return [format(v, f"0{n}b") for v in range(2 ** n)]


def _flip(bits, k):
    return bits[:k] + "1" + bits[k + 1:]


def _derive_move(src_cycles, dst_cycles, chord):
    a, b = chord
    ia = next(i for i, c in enumerate(src_cycles) if a in c)
    ib = next(i for i, c in enumerate(src_cycles) if b in c)
    if ia != ib:
        out = next(i for i, c in enumerate(dst_cycles) if a in c)
        return ("merge", min(ia, ib) + 1, max(ia, ib) + 1, (out + 1,))
    p1 = next(i for i, c in enumerate(dst_cycles) if a in c)
    p2 = next(i for i, c in enumerate(dst_cycles) if b in c)
    return ("split", ia + 1, 0, (p1 + 1, p2 + 1))


def random_cube(rng, n=None, max_circles=6, sort_tries=40):
    """A valid random StateCube with n crossings (n <= 4 by default)."""
    if n is None:
        n = rng.randint(1, 4)
    while True:
        m = 2 * n + rng.randint(1, 3)
        sigma = list(range(m))
        rng.shuffle(sigma)
        pts = rng.sample(range(m), 2 * n)
        chords = [(pts[2 * k], pts[2 * k + 1]) for k in range(n)]
        cycles = {b: _cycles(_apply_chords(sigma, chords, b)) for b in _bits_all(n)}
        if any(len(c) > max_circles for c in cycles.values()):
            continue
        moves = {}
        for b in _bits_all(n):
            for k in range(n):
                if b[k] == "0":
                    moves[(b, k)] = _derive_move(cycles[b], cycles[_flip(b, k)], chords[k])
        labelling = _assign_sorts(rng, n, cycles, moves, sort_tries)
        vertices = {b: tuple(labelling[b]) for b in _bits_all(n)}
        edges = {}
        for (b, k), (kind, i, j, outs) in moves.items():
            if kind == "merge":
                sort = vertices[_flip(b, k)][outs[0] - 1]
                edges[(b, k)] = EdgeMove("merge", i, j, outs, (sort,))
            else:
                w = vertices[_flip(b, k)]
                edges[(b, k)] = EdgeMove("split", i, 0, outs,
                                         (w[outs[0] - 1], w[outs[1] - 1]))
        cube = StateCube(n, vertices, edges)
        validate_cube(cube)
        return cube


def _untouched_map(kind, i, j, outs, n_in):
    gone = (i, j) if kind == "merge" else (i,)
    n_out = n_in - 1 if kind == "merge" else n_in + 1
    rest = [p for p in range(1, n_in + 1) if p not in gone]
    slots = [p for p in range(1, n_out + 1) if p not in outs]
    return dict(zip(rest, slots))


def _assign_sorts(rng, n, cycles, moves, tries):
    for attempt in range(tries + 1):
        random_mode = attempt < tries
        sorts = {}
        zero = "0" * n
        sorts[zero] = [rng.choice("AE") if random_mode else "A"
                       for _ in cycles[zero]]
        ok = True
        for b in sorted(_bits_all(n), key=lambda s: (s.count("1"), s)):
            if b == zero:
                continue
            k = b.index("1")
            u = b[:k] + "0" + b[k + 1:]
            kind, i, j, outs = moves[(u, k)]
            src = sorts[u]
            dst = [None] * len(cycles[b])
            for sp, dp in _untouched_map(kind, i, j, outs, len(src)).items():
                dst[dp - 1] = src[sp - 1]
            if kind == "merge":
                legal = [o for o in "AE" if (src[i - 1], src[j - 1], o) in MERGE_GEN]
                dst[outs[0] - 1] = rng.choice(legal) if random_mode else legal[0]
            else:
                legal = [(s1, s2) for (s0, s1, s2) in SPLIT_GEN if s0 == src[i - 1]]
                pick = rng.choice(legal) if random_mode else ("A", "A")
                dst[outs[0] - 1], dst[outs[1] - 1] = pick
            sorts[b] = dst
        # validate every edge against the assignment
        for (u, k), (kind, i, j, outs) in moves.items():
            src, dst = sorts[u], sorts[u[:k] + "1" + u[k + 1:]]
            for sp, dp in _untouched_map(kind, i, j, outs, len(src)).items():
                if dst[dp - 1] != src[sp - 1]:
                    ok = False
            if kind == "merge":
                if (src[i - 1], src[j - 1], dst[outs[0] - 1]) not in MERGE_GEN:
                    ok = False
            else:
                if (src[i - 1], dst[outs[0] - 1], dst[outs[1] - 1]) not in SPLIT_GEN:
                    ok = False
            if not ok:
                break
        if ok:
            return sorts
    raise AssertionError("all-A fallback labelling must always be legal")
