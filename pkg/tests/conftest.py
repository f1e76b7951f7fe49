import random
from fractions import Fraction
from itertools import combinations

import pytest

from pdbundle.complexes import SimplicialComplex
from pdbundle.generators import MONODROMY_SIMPLICES, monodromy_values_at
from pdbundle.stratify import BaseMesh, PLFibration

# intrinsic indices of the named simplices in the monodromy complex
A, B, C, D = 7, 8, 9, 10


@pytest.fixture(scope="session")
def mono_complex():
    return SimplicialComplex(MONODROMY_SIMPLICES)


def mono_values(x, y):
    return monodromy_values_at(x, y)


def random_listing(rng: random.Random, max_vertices: int = 5,
                   p_edge: float = 0.6, p_tri: float = 0.6,
                   max_simplices: int = 1000):
    """A random complex listing: vertices, then edges, then triangles of a
    random graph (triangles only where all edges exist)."""
    n = rng.randint(1, max_vertices)
    vertices = [(v,) for v in range(n)]
    edges = [e for e in combinations(range(n), 2) if rng.random() < p_edge]
    edge_set = set(edges)
    tris = [t for t in combinations(range(n), 3)
            if rng.random() < p_tri
            and all(e in edge_set for e in combinations(t, 2))]
    listing = vertices + edges + tris
    return listing[:max(n, min(len(listing), max_simplices))]


def random_complex(rng: random.Random, **kw) -> SimplicialComplex:
    return SimplicialComplex(random_listing(rng, **kw))


def random_monotone_values(rng: random.Random, K: SimplicialComplex,
                           max_step: int = 3):
    """Random integer filtration values, monotone by construction; frequent
    ties exercise the intrinsic tie-break."""
    values = [None] * K.n
    for i in range(K.n):
        base = max((values[j] for j in K.facet_indices(i)), default=0)
        values[i] = base + rng.randint(0, max_step)
    return values


MESHES = {
    "one_triangle": ([(0, 0), (4, 0), (0, 4)], [(0, 1, 2)]),
    "square": ([(0, 0), (4, 0), (4, 4), (0, 4)], [(0, 1, 2), (0, 2, 3)]),
    "strip": ([(0, 0), (2, 0), (4, 0), (0, 2), (2, 2), (4, 2)],
              [(0, 1, 4), (0, 4, 3), (1, 2, 5), (1, 5, 4)]),
    "fan": ([(0, 0), (1, 0), (1, 1), (0, 1), (-1, 1),
             (-1, 0), (-1, -1), (0, -1), (1, -1)],
            [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5),
             (0, 5, 6), (0, 6, 7), (0, 7, 8), (0, 8, 1)]),
}


def random_fibration(rng: random.Random, mesh_name=None,
                     max_vertices: int = 4, max_step: int = 3) -> PLFibration:
    """A random piecewise-linear fibration with small integer vertex values,
    monotone at every mesh vertex."""
    if mesh_name is None:
        mesh_name = rng.choice(sorted(MESHES))
    mesh = BaseMesh(*MESHES[mesh_name])
    K = random_complex(rng, max_vertices=max_vertices)
    nmv = len(mesh.vertices)
    values = [[None] * nmv for _ in range(K.n)]
    for i in range(K.n):
        for v in range(nmv):
            base = max((values[j][v] for j in K.facet_indices(i)), default=0)
            values[i][v] = base + rng.randint(0, max_step)
    return PLFibration(K, mesh, values)


def mono_fibration():
    from pdbundle.generators import gen_monodromy
    return gen_monodromy()


@pytest.fixture(scope="session")
def mono_fib():
    return mono_fibration()


@pytest.fixture(scope="session")
def mono_strat(mono_fib):
    from pdbundle.stratify import build_stratification
    return build_stratification(mono_fib)


@pytest.fixture(scope="session")
def mono_sheaf1(mono_strat):
    from pdbundle.sheaf import build_sheaf
    return build_sheaf(mono_strat, degree=1)


def quadrant_of(p):
    x, y = p
    if x > 0 and y > 0:
        return "Q1"
    if x < 0 and y > 0:
        return "Q2"
    if x < 0 and y < 0:
        return "Q3"
    if x > 0 and y < 0:
        return "Q4"
    return None


def deg1_pairs(K: SimplicialComplex, pairset):
    return {(b, d) for b, d in pairset.pairs if K.dim(b) == 1}
