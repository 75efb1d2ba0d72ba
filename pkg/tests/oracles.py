"""Independent reference computations used by several test modules."""

from itertools import product
from math import comb


def g2_roots():
    """All roots of G2 from its Cartan matrix by root strings.

    ``cartan[i][j] = <alpha_j, alpha_i^vee>``; alpha_0 is the short root.
    """
    cartan = [[2, -3], [-1, 2]]
    simple = [(1, 0), (0, 1)]
    roots = set(simple)
    frontier = list(simple)
    while frontier:
        new = []
        for beta in frontier:
            for i, a in enumerate(simple):
                pairing = sum(beta[j] * cartan[i][j] for j in range(2))
                p = 0
                while tuple(b - (p + 1) * x for b, x in zip(beta, a)) in roots:
                    p += 1
                q = p - pairing
                if q > 0:
                    up = tuple(b + x for b, x in zip(beta, a))
                    if up not in roots:
                        roots.add(up)
                        new.append(up)
        frontier = new
    pos = sorted(roots)
    return pos + [tuple(-x for x in r) for r in pos]


def g2_graded_dims():
    """Grading by the coefficient of the short simple root."""
    dims = {0: 2}
    for r in g2_roots():
        dims[r[0]] = dims.get(r[0], 0) + 1
    return dict(sorted(dims.items()))


def contact_dims(p):
    """Contact vector fields on R^3: generating functions of weighted degree
    ``p + 2`` with weights (1, 1, 2)."""
    return sum(1 for a, b, c in product(range(p + 3), repeat=3) if a + b + 2 * c == p + 2)


def gl_dims(n, p):
    """Degree ``p`` vector fields with linear-coefficient part gl(n):
    n components times homogeneous polynomials of degree p + 1."""
    return n * comb(n + p, p + 1)
