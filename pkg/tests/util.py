"""Shared test helpers: an independent dense Smith oracle and generators of
random complexes, chain maps, and homotopy data whose hypotheses hold by
construction."""

from fractions import Fraction

from khsing.chain import ChainComplex, ChainMap, Homotopy
from khsing.exactlinalg import Ring, SparseMatrix


# ---------------------------------------------------------------------------
# Independent dense Smith normal form (textbook version, no pivot strategy)
# ---------------------------------------------------------------------------


def dense_smith_divisors(rows):
    """Divisor chain of an integer matrix, computed the slow classical way.

    Repeatedly brings the smallest nonzero entry to the corner by full
    scans, clears its row and column with floor divisions, restarts whenever
    a remainder appears, and enforces divisibility by folding offending
    entries into the corner's row.  Deliberately unrelated to the library
    implementation.
    """
    m = [list(r) for r in rows]
    divisors = []
    while m and m[0]:
        if all(v == 0 for row in m for v in row):
            break
        # smallest nonzero entry to position (0, 0)
        bi, bj = min(((i, j) for i, row in enumerate(m)
                      for j, v in enumerate(row) if v),
                     key=lambda ij: abs(m[ij[0]][ij[1]]))
        m[0], m[bi] = m[bi], m[0]
        for row in m:
            row[0], row[bj] = row[bj], row[0]
        if m[0][0] < 0:
            m[0] = [-v for v in m[0]]
        pivot = m[0][0]
        dirty = False
        for i in range(1, len(m)):
            q = m[i][0] // pivot
            if q:
                m[i] = [a - q * b for a, b in zip(m[i], m[0])]
            if m[i][0]:
                dirty = True
        for j in range(1, len(m[0])):
            q = m[0][j] // pivot
            if q:
                for row in m:
                    row[j] -= q * row[0]
            if m[0][j]:
                dirty = True
        if dirty:
            continue
        stray = next(((i, j) for i in range(1, len(m))
                      for j in range(1, len(m[0])) if m[i][j] % pivot), None)
        if stray is not None:
            i = stray[0]
            m[0] = [a + b for a, b in zip(m[0], m[i])]
            continue
        divisors.append(pivot)
        m = [row[1:] for row in m[1:]]
    return divisors


def dense_rank_rational(rows):
    """Row-reduction rank over Q with Fractions."""
    m = [[Fraction(v) for v in row] for row in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    row_at = 0
    for c in range(cols):
        piv = next((r for r in range(row_at, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[row_at], m[piv] = m[piv], m[row_at]
        inv = 1 / m[row_at][c]
        m[row_at] = [v * inv for v in m[row_at]]
        for r in range(len(m)):
            if r != row_at and m[r][c]:
                f = m[r][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[row_at])]
        rank += 1
        row_at += 1
    return rank


def dense_homology(diff_in_rows, diff_out_rows, middle_dim):
    """(free rank, torsion) at the middle of two composable differentials,
    using only the dense oracles above."""
    r_out = dense_rank_rational(diff_out_rows) if diff_out_rows else 0
    divisors = dense_smith_divisors(diff_in_rows) if diff_in_rows else []
    free = middle_dim - r_out - len(divisors)
    torsion = tuple(sorted(d for d in divisors if d > 1))
    return free, torsion


def summary_via_dense_oracle(cx: ChainComplex):
    """Recompute an integral complex's ungraded homology with the dense
    oracle."""
    out = {}
    for i in cx.degrees():
        free, torsion = dense_homology(
            cx.diff(i - 1).to_rows(), cx.diff(i).to_rows(), cx.rank(i))
        if free or torsion:
            out[i] = (free, torsion)
    return out


# ---------------------------------------------------------------------------
# Random complexes and maps
# ---------------------------------------------------------------------------


def random_unimodular_ops(rng, n, steps):
    """A sequence of elementary row operations (i, j, c): row_i += c row_j."""
    ops = []
    for _ in range(steps):
        if n < 2:
            break
        i = rng.randrange(n)
        j = rng.randrange(n)
        while j == i:
            j = rng.randrange(n)
        ops.append((i, j, rng.choice((-1, 1))))
    return ops


def _apply_ops(mat_rows, ops):
    for i, j, c in ops:
        mat_rows[i] = [a + c * b for a, b in zip(mat_rows[i], mat_rows[j])]
    return mat_rows


def random_complex(rng, ring: Ring, span=4, max_rank=3, torsion=False,
                   scramble=True) -> ChainComplex:
    """Random bounded complex, built split and unimodularly scrambled.

    In split form C^i = H_i (+) B_i (+) P_i with the differential mapping
    P_i onto B_(i+1) by a diagonal matrix (entries 1, or small integers when
    ``torsion``); d^2 = 0 holds by construction and survives conjugation.
    """
    lo = rng.randint(-2, 0)
    hs = {}
    ps = {}
    for i in range(lo, lo + span):
        hs[i] = rng.randint(0, max_rank - 1)
        ps[i] = rng.randint(0, max_rank - 1)
    bs = {i: ps.get(i - 1, 0) for i in range(lo, lo + span + 1)}
    ranks = {}
    for i in range(lo, lo + span + 1):
        ranks[i] = hs.get(i, 0) + bs.get(i, 0) + ps.get(i, 0)
    trans = {}
    for i, n in ranks.items():
        ident = [[int(a == b) for b in range(n)] for a in range(n)]
        ops = random_unimodular_ops(rng, n, rng.randint(0, 2 * n)) if scramble else []
        trans[i] = (_apply_ops([row[:] for row in ident], ops), ops)
    diffs = {}
    for i in range(lo, lo + span):
        n_src, n_tgt = ranks.get(i, 0), ranks.get(i + 1, 0)
        if n_src == 0 or n_tgt == 0:
            continue
        rows = [[0] * n_src for _ in range(n_tgt)]
        off_src = hs.get(i, 0) + bs.get(i, 0)
        off_tgt = hs.get(i + 1, 0)
        for k in range(ps.get(i, 0)):
            rows[off_tgt + k][off_src + k] = (rng.choice((1, 2, 3, 6))
                                              if torsion else 1)
        # conjugate: d' = T_(i+1) d inv(T_i); T is a product of elementary
        # matrices, so inv(T_i) acts by the inverse column operations taken
        # in forward order
        rows = _apply_ops(rows, trans[i + 1][1])
        for a, j, c in trans[i][1]:
            for row in rows:
                row[j] -= c * row[a]
        diffs[i] = SparseMatrix.from_rows(rows, ring) if rows else None
    ranks = {i: n for i, n in ranks.items() if n}
    return ChainComplex(ring, ranks, {i: m for i, m in diffs.items()
                                      if m is not None})


def random_family(rng, X: ChainComplex, Y: ChainComplex, degree: int,
                  density=0.5, span_vals=(-2, -1, 1, 2)) -> Homotopy:
    """Random degree-``degree`` family of maps X^i -> Y^(i+degree)."""
    comps = {}
    for i in X.degrees():
        rows, cols = Y.rank(i + degree), X.rank(i)
        if rows == 0 or cols == 0:
            continue
        data = {}
        for r in range(rows):
            for c in range(cols):
                if rng.random() < density:
                    data[(r, c)] = rng.choice(span_vals)
        if data:
            comps[i] = SparseMatrix(rows, cols, X.ring, data)
    return Homotopy(X, Y, comps, degree)


def null_homotopic_map(rng, X: ChainComplex, Y: ChainComplex,
                       density=0.5) -> ChainMap:
    """The chain map d K + K d for a random degree -1 family K."""
    K = random_family(rng, X, Y, -1, density)
    comps = {}
    for i in set(X.degrees()) | set(K.components):
        m = Y.diff(i - 1) * K.component(i) + K.component(i + 1) * X.diff(i)
        comps[i] = m
    return ChainMap(X, Y, comps)


def identity_map(X: ChainComplex) -> ChainMap:
    return ChainMap(X, X, {i: SparseMatrix.identity(X.rank(i), X.ring)
                           for i in X.degrees()})


def scale_map(X: ChainComplex, c) -> ChainMap:
    return ChainMap(X, X, {i: SparseMatrix.identity(X.rank(i), X.ring).scale(c)
                           for i in X.degrees()})


def map_sum(*maps) -> ChainMap:
    out = maps[0]
    for f in maps[1:]:
        out = out + f
    return out


def direct_sum(A: ChainComplex, B: ChainComplex):
    """(A + B, include_A, include_B, project_A, project_B)."""
    ring = A.ring
    degs = sorted(set(A.degrees()) | set(B.degrees()))
    ranks = {i: A.rank(i) + B.rank(i) for i in degs}
    diffs = {}
    for i in degs:
        diffs[i] = SparseMatrix.block(
            [[A.diff(i), None], [None, B.diff(i)]],
            [A.rank(i + 1), B.rank(i + 1)], [A.rank(i), B.rank(i)], ring)
    S = ChainComplex(ring, ranks, diffs)
    inc_a = ChainMap(A, S, {
        i: SparseMatrix(S.rank(i), A.rank(i), ring,
                        {(r, r): 1 for r in range(A.rank(i))})
        for i in A.degrees()})
    inc_b = ChainMap(B, S, {
        i: SparseMatrix(S.rank(i), B.rank(i), ring,
                        {(A.rank(i) + r, r): 1 for r in range(B.rank(i))})
        for i in B.degrees()})
    pr_a = ChainMap(S, A, {
        i: SparseMatrix(A.rank(i), S.rank(i), ring,
                        {(r, r): 1 for r in range(A.rank(i))})
        for i in S.degrees()})
    pr_b = ChainMap(S, B, {
        i: SparseMatrix(B.rank(i), S.rank(i), ring,
                        {(r, A.rank(i) + r): 1 for r in range(B.rank(i))})
        for i in S.degrees()})
    return S, inc_a, inc_b, pr_a, pr_b


def homotopy_sum(*hs) -> Homotopy:
    base = hs[0]
    comps = {}
    for H in hs:
        for i in H.components:
            m = comps.get(i)
            comps[i] = H.component(i) if m is None else m + H.component(i)
    return Homotopy(base.source, base.target, comps, base.degree)


def compose_family(g: ChainMap, H: Homotopy) -> Homotopy:
    """g o H as a family of degree H.degree (g must be degree 0)."""
    comps = {i: g.component(i + H.degree) * H.component(i)
             for i in H.components}
    return Homotopy(H.source, g.target, comps, H.degree)


def family_after_map(H: Homotopy, f: ChainMap) -> Homotopy:
    """H o f as a family of degree H.degree (f must be degree 0)."""
    comps = {}
    for i in f.source.degrees():
        comps[i] = H.component(i) * f.component(i)
    return Homotopy(f.source, H.target, comps, H.degree)


def family_commutator(R: Homotopy) -> Homotopy:
    """d R - R d, one degree above R; its own commutator with d vanishes."""
    X, Y = R.source, R.target
    comps = {}
    for i in set(X.degrees()) | set(R.components):
        comps[i] = (Y.diff(i + R.degree) * R.component(i)
                    - R.component(i + 1) * X.diff(i))
    return Homotopy(X, Y, comps, R.degree + 1)


def family_anticommutator(S: Homotopy) -> Homotopy:
    """d S + S d, one degree above S; its anticommutator with d vanishes."""
    X, Y = S.source, S.target
    comps = {}
    for i in set(X.degrees()) | set(S.components):
        comps[i] = (Y.diff(i + S.degree) * S.component(i)
                    + S.component(i + 1) * X.diff(i))
    return Homotopy(X, Y, comps, S.degree + 1)


def commutator_perturbation(rng, X, Y, degree) -> Homotopy:
    """d R - R d for a random generator R of degree (degree - 1)."""
    return family_commutator(random_family(rng, X, Y, degree - 1, density=0.4))


def anticommutator_perturbation(rng, X, Y, degree) -> Homotopy:
    """d S + S d for a random generator S of degree (degree - 1)."""
    return family_anticommutator(
        random_family(rng, X, Y, degree - 1, density=0.4))
