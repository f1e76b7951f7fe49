import random
from fractions import Fraction

import pytest

from pdbundle.complexes import SimplicialComplex, ValidationError
from pdbundle.geometry import on_segment, point_in_convex, point_on_convex_boundary
from pdbundle.persistence import pairs_for_filtration
from pdbundle.stratify import (
    BaseMesh,
    PLFibration,
    build_stratification,
    filtration_at,
    intersection_trace,
    merge_cells,
    order_constancy_check,
    representative_point,
    sample_in_cell,
)

from conftest import A, B, C, D, deg1_pairs, quadrant_of, random_fibration

F = Fraction


def test_mesh_validation():
    with pytest.raises(ValidationError, match="degenerate"):
        BaseMesh([(0, 0), (1, 1), (2, 2)], [(0, 1, 2)])
    with pytest.raises(ValidationError, match="coincident"):
        BaseMesh([(0, 0), (0, 0), (0, 1)], [(0, 1, 2)])
    mesh = BaseMesh([(0, 0), (1, 0), (0, 1)], [(0, 2, 1)])
    # clockwise input is flipped to counterclockwise
    from pdbundle.geometry import orient
    assert orient(*mesh.corners(0)) > 0


def test_fibration_rejects_non_monotone():
    K = SimplicialComplex([[0], [1], [0, 1]])
    mesh = BaseMesh([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])
    with pytest.raises(ValidationError, match="non-monotone"):
        PLFibration(K, mesh, [[1, 1, 1], [0, 0, 0], [0, 2, 2]])


def test_trace_whole_triangle_and_empty(mono_fib):
    # two zero simplices agree identically
    tr = intersection_trace(mono_fib, 0, 1, 0)
    assert tr.kind == "whole_triangle"
    # a is strictly below c everywhere
    tr2 = intersection_trace(mono_fib, A, C, 0)
    assert tr2.kind == "empty"
    with pytest.raises(ValidationError):
        intersection_trace(mono_fib, A, A, 0)


def test_trace_monodromy_ab_segment(mono_fib):
    # f(a) - f(b) = 2y vanishes on the x-axis; triangle 0 has corners
    # (0,0), (1,0), (1,1) so the trace is the mesh edge y = 0
    tr = intersection_trace(mono_fib, A, B, 0)
    assert tr.kind == "segment"
    assert tr.segment == ((F(0), F(0)), (F(1), F(0)))
    # on triangle (0,(1,1),(0,1)) the x-axis only touches the origin corner
    tr2 = intersection_trace(mono_fib, A, B, 1)
    assert tr2.kind == "vertex_only"
    assert tr2.vertex == (F(0), F(0))


def test_trace_interior_crossing():
    # one triangle, two simplices whose difference changes sign inside
    K = SimplicialComplex([[0], [1]])
    mesh = BaseMesh([(0, 0), (4, 0), (0, 4)], [(0, 1, 2)])
    fib = PLFibration(K, mesh, [[0, 4, 0], [2, 2, 2]])
    tr = intersection_trace(fib, 0, 1, 0)
    assert tr.kind == "segment"
    (x1, y1), (x2, y2) = tr.segment
    # f(v0) - f(v1) = (x-coordinate affine) vanishes where interpolation hits 2
    assert {(x1, y1), (x2, y2)} == {(F(2), F(0)), (F(2), F(2))}


def test_constant_distinct_fibration_cells():
    K = SimplicialComplex([[0], [1], [0, 1]])
    mesh = BaseMesh([(0, 0), (4, 0), (4, 4), (0, 4)], [(0, 1, 2), (0, 2, 3)])
    fib = PLFibration(K, mesh, [[0] * 4, [1] * 4, [2] * 4])
    strat = build_stratification(fib)
    by_dim = {}
    for c in strat.cells:
        by_dim.setdefault(c.dim, []).append(c)
    assert len(by_dim[2]) == 2          # one per triangle
    assert len(by_dim[1]) == 5          # 4 sides + diagonal
    assert len(by_dim[0]) == 4
    # identical ordering everywhere
    idxs = {strat.indexings[c.id] for c in strat.cells}
    assert len(idxs) == 1


def test_single_crossing_one_triangle():
    K = SimplicialComplex([[0], [1]])
    mesh = BaseMesh([(0, 0), (4, 0), (0, 4)], [(0, 1, 2)])
    fib = PLFibration(K, mesh, [[0, 4, 0], [2, 2, 2]])
    strat = build_stratification(fib)
    twos = [c for c in strat.cells if c.dim == 2]
    ones = [c for c in strat.cells if c.dim == 1]
    zeros = [c for c in strat.cells if c.dim == 0]
    assert len(twos) == 2
    # 3 boundary sides split at the two chord endpoints -> 5, plus the chord
    assert len(ones) == 6
    assert len(zeros) == 5
    chord = next(c for c in ones
                 if all(p[0] == 2 for piece in c.pieces for p in piece))
    # face relations: the chord is a face of both 2-cells
    for two in twos:
        assert chord.id in strat.faces_of(two.id)
    # brute-force location oracle on a small grid
    for xn in range(0, 17):
        for yn in range(0, 17):
            x, y = F(xn, 4), F(yn, 4)
            if x + y > 4:
                continue
            cell = strat.locate((x, y))
            vals = filtration_at(fib, (x, y))
            want = 0 if vals[0] < vals[1] else (1 if vals[0] > vals[1] else None)
            got_vals = strat.rep_values[cell.id]
            got = (0 if got_vals[0] < got_vals[1]
                   else (1 if got_vals[0] > got_vals[1] else None))
            assert got == want


def test_representative_points():
    K = SimplicialComplex([[0]])
    mesh = BaseMesh([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])
    fib = PLFibration(K, mesh, [[0, 0, 0]])
    strat = build_stratification(fib)
    reps = {c.dim: [] for c in strat.cells}
    for c in strat.cells:
        reps[c.dim].append(representative_point(c))
    assert (F(1, 3), F(1, 3)) in reps[2]
    assert (F(1, 2), F(0)) in reps[1]   # midpoint of the bottom side
    assert (F(0), F(0)) in reps[0]
    # every representative is inside its own cell
    for c in strat.cells:
        assert strat.locate(c.rep).id == c.id


def test_filtration_at_examples(mono_fib):
    # mesh vertex: stored values
    vals = filtration_at(mono_fib, (1, 0))
    assert vals[A] == 2 and vals[B] == 2 and vals[C] == 11 and vals[D] == 9
    # edge midpoint: average of endpoint values
    vals2 = filtration_at(mono_fib, (F(1, 2), F(1, 2)))
    assert (vals2[A], vals2[B], vals2[C], vals2[D]) == \
        (F(5, 2), F(3, 2), F(21, 2), F(19, 2))
    with pytest.raises(ValidationError, match="outside"):
        filtration_at(mono_fib, (3, 3))


def test_monodromy_stratification_cells(mono_fib, mono_strat):
    strat = mono_strat
    by_dim = {0: [], 1: [], 2: []}
    for c in strat.cells:
        by_dim[c.dim].append(c)
    assert (len(by_dim[2]), len(by_dim[1]), len(by_dim[0])) == (8, 16, 9)
    # quadrant 2-cells carry the pair sets of the figure
    K = mono_fib.complex
    expected = {"Q1": {(A, C), (B, D)}, "Q2": {(A, C), (B, D)},
                "Q4": {(A, C), (B, D)}, "Q3": {(A, D), (B, C)}}
    seen = set()
    for c in by_dim[2]:
        quad = quadrant_of(c.rep)
        pairs = deg1_pairs(K, pairs_for_filtration(K, strat.rep_values[c.id]))
        assert pairs == expected[quad]
        seen.add(quad)
    assert seen == {"Q1", "Q2", "Q3", "Q4"}
    # half-axis 1-cells and the origin 0-cell exist
    half_axes = [c for c in by_dim[1]
                 if all(p[0] == 0 or p[1] == 0 for piece in c.pieces for p in piece)]
    assert len(half_axes) == 4
    assert any(c.pieces == (((F(0), F(0)),),) for c in by_dim[0])


def test_order_constancy_on_monodromy(mono_fib, mono_strat):
    for c in mono_strat.cells:
        assert order_constancy_check(mono_fib, mono_strat, c.id, 10, seed=5) is None


def test_order_constancy_catches_merged_cells(mono_fib, mono_strat):
    # fixture: glue the two 2-cells adjacent to the positive x-axis into one
    # fake polygon spanning both sides of the a/b trace
    from pdbundle.stratify import Cell, Stratification
    fake = Cell(0, 2, (((F(1, 10), F(-1)), (F(1), F(-1)), (F(1), F(1)),
                        (F(1, 10), F(1))),),
                (F(1, 2), F(0)), (0,))
    strat2 = Stratification(mono_fib, [fake], {0: frozenset()})
    assert order_constancy_check(mono_fib, strat2, 0, 40, seed=6) is not None


def test_partition_oracle_random_points(mono_fib, mono_strat):
    rng = random.Random(31)
    K = mono_fib.complex
    for _ in range(300):
        t = rng.randrange(8)
        ws = [rng.randint(0, 10) for _ in range(3)]
        if sum(ws) == 0:
            ws[rng.randrange(3)] = 1
        corners = mono_fib.mesh.corners(t)
        tot = sum(ws)
        p = (sum(F(w) * c[0] for w, c in zip(ws, corners)) / tot,
             sum(F(w) * c[1] for w, c in zip(ws, corners)) / tot)
        cell = mono_strat.locate(p)
        assert pairs_for_filtration(K, filtration_at(mono_fib, p)) == \
            pairs_for_filtration(K, mono_strat.rep_values[cell.id])


def test_partition_is_disjoint(mono_fib, mono_strat):
    # a sample of points, each contained in exactly one cell
    rng = random.Random(32)
    from pdbundle.stratify import _point_in_piece
    for _ in range(60):
        cell = mono_strat.cells[rng.randrange(len(mono_strat.cells))]
        p = sample_in_cell(cell, rng)
        containing = [c.id for c in mono_strat.cells
                      if any(_point_in_piece(piece, p) for piece in c.pieces)]
        assert containing == [cell.id]


def test_axiom_of_frontier(mono_strat):
    # closure intersection (checked geometrically) implies a face relation
    strat = mono_strat
    for c in strat.cells:
        if c.dim != 2:
            continue
        loop = c.pieces[0]
        for other in strat.cells:
            if other.dim == 0:
                p = other.pieces[0][0]
                touches = point_on_convex_boundary(loop, p)
                assert touches == (other.id in strat.faces_of(c.id))
            elif other.dim == 1:
                a, b = other.pieces[0]
                mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
                touches = (point_on_convex_boundary(loop, mid)
                           and point_on_convex_boundary(loop, a)
                           and point_on_convex_boundary(loop, b))
                assert touches == (other.id in strat.faces_of(c.id))


def test_face_poset_transitively_closed(mono_strat):
    strat = mono_strat
    for c in strat.cells:
        for f in strat.faces_of(c.id):
            for g in strat.faces_of(f):
                assert g in strat.faces_of(c.id)


def test_exactness_all_rational(mono_strat):
    for c in mono_strat.cells:
        for piece in c.pieces:
            for p in piece:
                assert isinstance(p[0], Fraction) and isinstance(p[1], Fraction)
        assert isinstance(c.rep[0], Fraction)


def test_merge_cells_monodromy(mono_fib, mono_strat):
    merged = merge_cells(mono_strat)
    by_dim = {0: 0, 1: 0, 2: 0}
    for c in merged.cells:
        by_dim[c.dim] += 1
    # quadrants fuse to 4 cells; half axes stay; boundary arcs fuse
    assert by_dim[2] == 4
    assert by_dim[0] == 5
    assert by_dim[1] == 8
    # merged cells still have constant order
    for c in merged.cells:
        assert order_constancy_check(mono_fib, merged, c.id, 8, seed=7) is None
    # locate still resolves interior points to the fused quadrants
    cell = merged.locate((F(1, 3), F(2, 3)))
    assert cell.dim == 2 and quadrant_of(cell.rep) == "Q1"


def test_merge_cells_random_consistency():
    rng = random.Random(33)
    for _ in range(10):
        fib = random_fibration(rng)
        strat = build_stratification(fib)
        merged = merge_cells(strat)
        assert len(merged.cells) <= len(strat.cells)
        for c in merged.cells:
            assert order_constancy_check(fib, merged, c.id, 4, seed=8) is None


def test_random_stratifications_partition_oracle():
    rng = random.Random(34)
    for _ in range(6):
        fib = random_fibration(rng)
        strat = build_stratification(fib)
        K = fib.complex
        for _ in range(150):
            t = rng.randrange(len(fib.mesh.triangles))
            ws = [rng.randint(0, 8) for _ in range(3)]
            if sum(ws) == 0:
                ws[0] = 1
            corners = fib.mesh.corners(t)
            tot = sum(ws)
            p = (sum(F(w) * cr[0] for w, cr in zip(ws, corners)) / tot,
                 sum(F(w) * cr[1] for w, cr in zip(ws, corners)) / tot)
            cell = strat.locate(p)
            assert pairs_for_filtration(K, filtration_at(fib, p)) == \
                pairs_for_filtration(K, strat.rep_values[cell.id])
