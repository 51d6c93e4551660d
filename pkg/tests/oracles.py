"""Brute-force reference computations used by the tests.

Nothing here calls into the package's algorithms; each oracle recomputes
its answer by a different, slower route.
"""
from fractions import Fraction
from itertools import combinations
from math import gcd


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def reflect(a, v):
    k = Fraction(2 * dot(a, v), dot(a, a))
    return tuple(x - k * y for x, y in zip(v, a))


def reflection_closure(seeds):
    """Smallest set containing the seeds and stable under their reflections."""
    found = {tuple(Fraction(x) for x in s) for s in seeds}
    todo = list(found)
    while todo:
        v = todo.pop()
        for a in list(found):
            w = reflect(a, v)
            if w not in found:
                found.add(w)
                todo.append(w)
    return {tuple(int(x) for x in v) for v in found}


def orbit_size(gens, v):
    """Orbit of v under the group generated by the reflections in gens."""
    seen = {tuple(Fraction(x) for x in v)}
    todo = list(seen)
    while todo:
        u = todo.pop()
        for a in gens:
            w = reflect(a, u)
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return len(seen)


def solve_rational(cols, target):
    """Unique rational x with sum x_j cols[j] = target, or None."""
    n = len(cols)
    rows = [[Fraction(c[i]) for c in cols] + [Fraction(target[i])] for i in range(len(target))]
    piv = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        rows[r] = [x / rows[r][c] for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv.append(c)
        r += 1
    if any(all(x == 0 for x in row[:-1]) and row[-1] != 0 for row in rows):
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(piv):
        x[c] = rows[i][-1]
    return x


def det(m):
    """Integer determinant by cofactor expansion."""
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * det([row[:j] + row[j + 1:] for row in m[1:]])
               for j in range(n) if m[0][j])


def invariant_factors(m):
    """Nonzero invariant factors d_k / d_(k-1) from determinantal divisors."""
    rows, cols = len(m), len(m[0]) if m else 0
    out = []
    prev = 1
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in combinations(range(rows), k):
            for cs in combinations(range(cols), k):
                g = gcd(g, det([[m[i][j] for j in cs] for i in rs]))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def partitions(n, top=None):
    top = n if top is None else top
    if n == 0:
        yield ()
        return
    for k in range(min(n, top), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


def dominated(p, q):
    """p <= q in the dominance order."""
    a = b = 0
    for i in range(max(len(p), len(q))):
        a += p[i] if i < len(p) else 0
        b += q[i] if i < len(q) else 0
        if a > b:
            return False
    return True


def valid_partition(kind, p):
    from collections import Counter
    c = Counter(p)
    if kind == "C":
        return all(m % 2 == 0 for x, m in c.items() if x % 2)
    if kind in "BD":
        return all(m % 2 == 0 for x, m in c.items() if x % 2 == 0)
    return True


def brute_collapse(kind, p):
    n = sum(p)
    cands = [q for q in partitions(n) if valid_partition(kind, q) and dominated(q, p)]
    tops = [q for q in cands if all(dominated(r, q) for r in cands)]
    assert len(tops) == 1, (kind, p, tops)
    return tops[0]


def nilpotent_dims(kind, parts):
    """(dim g, dim of the orbit) from an explicit nilpotent matrix.

    The matrix is a sum of Jordan blocks preserving a bilinear form built
    block by block; the orbit dimension is dim g - dim of the centralizer,
    both read off exact ranks of linear systems.
    """
    from collections import Counter
    from sympy import Matrix, zeros

    eps = 1 if kind in "BD" else -1      # symmetric or alternating form
    blocks = []                          # (size, paired)
    c = Counter(parts)
    for d, m in sorted(c.items(), reverse=True):
        own = 1 if d % 2 else -1         # sign of the form natural on one block
        if own == eps:
            blocks += [(d, False)] * m
        else:
            assert m % 2 == 0
            blocks += [(d, True)] * (m // 2)
    n = sum(parts)
    N = zeros(n, n)
    J = zeros(n, n)
    pos = 0
    for d, paired in blocks:
        copies = [pos, pos + d] if paired else [pos]
        for s in copies:
            for i in range(d - 1):
                N[s + i + 1, s + i] = 1
        if paired:
            a, b = copies
            for i in range(d):
                j = d - 1 - i
                J[a + i, b + j] = (-1) ** i
                J[b + j, a + i] = eps * (-1) ** i
        else:
            for i in range(d):
                J[pos + i, pos + d - 1 - i] = (-1) ** i
        pos += len(copies) * d
    assert J.T == eps * J and J.det() != 0
    assert N.T * J + J * N == zeros(n, n)
    # X in g: X^T J + J X = 0; centralizer adds XN - NX = 0
    def system(with_n):
        eqs = []
        for r in range(n):
            for s in range(n):
                row = [0] * (n * n)
                for k in range(n):
                    row[k * n + r] += J[k, s]
                    row[k * n + s] += J[r, k]
                eqs.append(row)
        if with_n:
            for r in range(n):
                for s in range(n):
                    row = [0] * (n * n)
                    for k in range(n):
                        row[r * n + k] += N[k, s]
                        row[k * n + s] -= N[r, k]
                    eqs.append(row)
        return Matrix(eqs)
    dim_g = n * n - system(False).rank()
    dim_c = n * n - system(True).rank()
    return dim_g, dim_g - dim_c
