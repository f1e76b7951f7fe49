"""Compatible cellular sheaf over the stratification graph: pair-set stalks,
update-rule morphisms, section propagation, global-section enumeration, loop
monodromy, and synthesis of bundle sections with an exact continuity check.

The sheaf lives on the graph with one vertex per stratification cell and one
edge per face relation. The stalk at a cell is its pair set (optionally
restricted to one homology degree); the morphism from a face cell into a
coface cell is the canonical composed update bijection between their induced
indexings, restricted accordingly.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .complexes import ValidationError, simplex_id
from .persistence import Element, PairSet
from .stratify import PLFibration, Stratification, filtration_at, sample_in_cell
from .vineyard import PairCache, _pairs_for, composed_bijection


class InvariantError(Exception):
    """An internal invariant failed; signals a construction bug, not bad input."""


def _element_sort_key(e: Element):
    return (e[0], e[1] is None, e[1] if e[1] is not None else -1)


@dataclass
class CellularSheaf:
    strat: Stratification
    degree: Optional[int]
    vertices: List[int]
    stalks: Dict[int, FrozenSet[Element]]
    morphisms: Dict[Tuple[int, int], Dict[Element, Element]]
    full_pairs: Dict[int, PairSet]

    @property
    def fib(self) -> PLFibration:
        return self.strat.fib

    def edges(self) -> List[Tuple[int, int]]:
        return sorted(self.morphisms.keys())

    def stalk(self, cid: int) -> FrozenSet[Element]:
        return self.stalks[cid]

    def morphism(self, face: int, coface: int) -> Dict[Element, Element]:
        return self.morphisms[(face, coface)]

    def restrict(self, cells) -> "CellularSheaf":
        """Sub-sheaf on a subset of vertices (edges with both ends kept)."""
        keep = set(cells)
        unknown = keep - {c.id for c in self.strat.cells}
        if unknown:
            raise ValidationError(f"unknown cells in restriction: {sorted(unknown)}")
        return CellularSheaf(
            self.strat, self.degree, sorted(keep),
            {c: self.stalks[c] for c in sorted(keep)},
            {(f, c): phi for (f, c), phi in self.morphisms.items()
             if f in keep and c in keep},
            {c: self.full_pairs[c] for c in sorted(keep)})


def build_sheaf(strat: Stratification, fib: Optional[PLFibration] = None,
                degree: Optional[int] = None) -> CellularSheaf:
    """Construct the compatible cellular sheaf for a stratification. With a
    degree, stalks keep only the pairs whose birth simplex has that dimension
    (essential births included); update bijections preserve the degree, so the
    restriction is again a sheaf of bijections."""
    if fib is None:
        fib = strat.fib
    K = fib.complex
    cache: PairCache = {}
    stalks: Dict[int, FrozenSet[Element]] = {}
    full: Dict[int, PairSet] = {}
    for cell in strat.cells:
        pairs = _pairs_for(K, strat.indexings[cell.id], cache)
        full[cell.id] = pairs
        if degree is None:
            stalks[cell.id] = pairs.elements()
        else:
            stalks[cell.id] = pairs.elements_of_degree(K, degree)
    morphisms: Dict[Tuple[int, int], Dict[Element, Element]] = {}
    for cell in strat.cells:
        for face in sorted(strat.faces_of(cell.id)):
            bij = composed_bijection(K, strat.indexings[face],
                                     strat.indexings[cell.id], cache)
            mapping = bij.restrict(stalks[face])
            if set(mapping.values()) != set(stalks[cell.id]):
                raise InvariantError(
                    f"morphism {face} -> {cell.id} is not onto the coface stalk")
            morphisms[(face, cell.id)] = mapping
    return CellularSheaf(strat, degree, [c.id for c in strat.cells],
                         stalks, morphisms, full)


@dataclass
class SheafSection:
    """A consistent choice of one stalk element per vertex on a scope (one
    connected component for sections found by propagation)."""

    assignment: Dict[int, Element]

    @property
    def scope(self) -> FrozenSet[int]:
        return frozenset(self.assignment)

    def check(self, sheaf: CellularSheaf) -> None:
        for (face, coface), phi in sheaf.morphisms.items():
            if face in self.assignment and coface in self.assignment:
                if phi[self.assignment[face]] != self.assignment[coface]:
                    raise InvariantError(
                        f"section violates edge ({face}, {coface})")


@dataclass
class Obstruction:
    """Witness that a seed admits no consistent extension: a closed walk of
    cells whose composed constraints disagree at the seed."""

    vertex: int
    element: Element
    cycle: List[int]


def _neighbors(sheaf: CellularSheaf) -> Dict[int, List[Tuple[int, bool]]]:
    """Adjacency with direction flags: (other, True) when the edge goes up
    from this cell (this cell is the face)."""
    nbrs: Dict[int, List[Tuple[int, bool]]] = {v: [] for v in sheaf.vertices}
    for face, coface in sheaf.edges():
        nbrs[face].append((coface, True))
        nbrs[coface].append((face, False))
    return nbrs


def propagate(sheaf: CellularSheaf, v0: int, x0: Element,
              order_seed: Optional[int] = None):
    """Breadth-first propagation of the section constraints from one seed.
    Returns the unique SheafSection on the connected component of v0, or an
    Obstruction with a witness cycle. The result does not depend on the
    traversal order (order_seed only shuffles it, for testing)."""
    if x0 not in sheaf.stalks[v0]:
        raise ValidationError(f"seed element {x0} not in the stalk of cell {v0}")
    inverse: Dict[Tuple[int, int], Dict[Element, Element]] = {
        k: {v: u for u, v in phi.items()} for k, phi in sheaf.morphisms.items()}
    nbrs = _neighbors(sheaf)
    rng = random.Random(order_seed) if order_seed is not None else None

    assignment: Dict[int, Element] = {v0: x0}
    parent: Dict[int, int] = {v0: -1}
    queue = deque([v0])
    while queue:
        u = queue.popleft()
        out = nbrs[u]
        if rng is not None:
            out = list(out)
            rng.shuffle(out)
        for w, up in out:
            phi = sheaf.morphisms[(u, w)] if up else inverse[(w, u)]
            forced = phi[assignment[u]]
            if w not in assignment:
                assignment[w] = forced
                parent[w] = u
                queue.append(w)
            elif assignment[w] != forced:
                # close the witness cycle through the BFS tree
                def path_to_root(x: int) -> List[int]:
                    out: List[int] = []
                    while x != -1:
                        out.append(x)
                        x = parent[x]
                    return out
                pu, pw = path_to_root(u), path_to_root(w)
                sw = set(pw)
                meet = next(x for x in pu if x in sw)
                cycle = (pu[:pu.index(meet) + 1]
                         + list(reversed(pw[:pw.index(meet)])) + [u])
                return Obstruction(v0, x0, cycle)
    return SheafSection(assignment)


def connected_components(sheaf: CellularSheaf) -> List[List[int]]:
    nbrs = _neighbors(sheaf)
    seen: Set[int] = set()
    comps: List[List[int]] = []
    for cid in sheaf.vertices:
        if cid in seen:
            continue
        comp = []
        queue = deque([cid])
        seen.add(cid)
        while queue:
            u = queue.popleft()
            comp.append(u)
            for w, _ in nbrs[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def enumerate_global_sections(sheaf: CellularSheaf) -> List[SheafSection]:
    """All sections of each connected component, found by propagating from
    every stalk element of the component's smallest-id vertex. Sections of
    different components combine independently (cartesian product); they are
    emitted per component, not multiplied out."""
    sections: List[SheafSection] = []
    for comp in connected_components(sheaf):
        root = comp[0]
        for x in sorted(sheaf.stalks[root], key=_element_sort_key):
            result = propagate(sheaf, root, x)
            if isinstance(result, SheafSection):
                sections.append(result)
    return sections


def walk_permutation(sheaf: CellularSheaf, walk: Sequence[int]
                     ) -> Dict[Element, Element]:
    """Compose edge constraints along a closed or open walk: moving from a
    face into a coface applies the morphism, the reverse applies its inverse.
    Consecutive cells must be joined by a sheaf edge."""
    mapping: Dict[Element, Element] = {
        e: e for e in sheaf.stalks[walk[0]]}
    for u, w in zip(walk, walk[1:]):
        if (u, w) in sheaf.morphisms:
            phi = sheaf.morphisms[(u, w)]
        elif (w, u) in sheaf.morphisms:
            phi = {v: k for k, v in sheaf.morphisms[(w, u)].items()}
        else:
            raise ValidationError(f"cells {u} and {w} are not adjacent in the sheaf")
        mapping = {e: phi[x] for e, x in mapping.items()}
    return mapping


def loop_monodromy(sheaf: CellularSheaf, cycle: Sequence[int]
                   ) -> Dict[Element, Element]:
    """Permutation of the starting cell's stalk obtained by composing the
    morphisms and inverse morphisms along an alternating coface/face cycle."""
    if len(cycle) < 3 or cycle[0] != cycle[-1]:
        raise ValidationError("loop_monodromy needs a closed cycle")
    if len(cycle) % 2 == 0:
        raise ValidationError("cycle must alternate coface, face, coface, ...")
    for i in range(0, len(cycle) - 1, 2):
        alpha, beta = cycle[i], cycle[i + 1]
        if (beta, alpha) not in sheaf.morphisms:
            raise ValidationError(
                f"cell {beta} is not a face of cell {alpha} in the sheaf")
        alpha2 = cycle[i + 2]
        if (beta, alpha2) not in sheaf.morphisms:
            raise ValidationError(
                f"cell {beta} is not a face of cell {alpha2} in the sheaf")
    return walk_permutation(sheaf, list(cycle))


@dataclass
class LoopClass:
    zero_cell: int
    cycle: List[int]
    permutation: Dict[Element, Element]
    nontrivial: bool


@dataclass
class MonodromyReport:
    loops: List[LoopClass]
    obstructed_seeds: List[Tuple[int, Element]]

    def nontrivial_loops(self) -> List[LoopClass]:
        return [l for l in self.loops if l.nontrivial]


def _link_cycle(sheaf: CellularSheaf, v: int) -> Optional[List[int]]:
    """The alternating 2-cell / 1-cell cycle around an interior 0-cell, or
    None when v is not interior (its link is not a single closed cycle)."""
    strat = sheaf.strat
    ones = sorted(c for c in strat.cofaces_of(v) if strat.cell(c).dim == 1)
    twos = sorted(c for c in strat.cofaces_of(v) if strat.cell(c).dim == 2)
    if len(ones) < 2 or len(ones) != len(twos):
        return None
    wings: Dict[int, List[int]] = {}
    for e in ones:
        fs = sorted(c for c in strat.cofaces_of(e) if c in twos)
        if len(fs) != 2:
            return None
        wings[e] = fs
    incident: Dict[int, List[int]] = {f: [] for f in twos}
    for e, (f1, f2) in wings.items():
        incident[f1].append(e)
        incident[f2].append(e)
    if any(len(es) != 2 for es in incident.values()):
        return None
    start = twos[0]
    first_edge = min(incident[start])
    cycle = [start, first_edge]
    cur_face, cur_edge = start, first_edge
    while True:
        nxt = next(f for f in wings[cur_edge] if f != cur_face)
        cycle.append(nxt)
        if nxt == start:
            break
        cur_face = nxt
        cur_edge = next(e for e in incident[cur_face] if e != cur_edge)
        cycle.append(cur_edge)
        if len(cycle) > 4 * len(ones) + 2:
            return None  # link is not a single cycle
    if len(cycle) != 2 * len(ones) + 1:
        return None
    return cycle


def monodromy_scan(sheaf: CellularSheaf) -> MonodromyReport:
    """Loop permutations around every interior 0-cell, plus every seed that
    admits no global extension on its component."""
    loops: List[LoopClass] = []
    members = set(sheaf.vertices)
    for cell in sheaf.strat.cells:
        if cell.dim != 0 or cell.id not in members:
            continue
        cycle = _link_cycle(sheaf, cell.id)
        if cycle is None:
            continue
        perm = loop_monodromy(sheaf, cycle)
        loops.append(LoopClass(cell.id, cycle, perm,
                               any(k != v for k, v in perm.items())))
    obstructed: List[Tuple[int, Element]] = []
    settled: Set[Tuple[int, Element]] = set()
    for cell in sheaf.strat.cells:
        if cell.id not in members:
            continue
        for x in sorted(sheaf.stalks[cell.id], key=_element_sort_key):
            if (cell.id, x) in settled:
                continue
            result = propagate(sheaf, cell.id, x)
            if isinstance(result, SheafSection):
                for u, e in result.assignment.items():
                    settled.add((u, e))
            else:
                obstructed.append((cell.id, x))
    return MonodromyReport(loops, obstructed)


# ---------------------------------------------------------------------------
# From sheaf sections to bundle sections.
# ---------------------------------------------------------------------------

@dataclass
class BundleSectionSample:
    cell: int
    point: Tuple
    birth: object
    death: Optional[object]


@dataclass
class BundleSection:
    samples: List[BundleSectionSample]
    boundary_points_checked: int


def _eval_element(fib: PLFibration, e: Element, p, hint: int):
    values = filtration_at(fib, p, triangle_hint=hint)
    b, d = e
    return (values[b], None if d is None else values[d])


def bundle_section(sheaf: CellularSheaf, section: SheafSection,
                   samples_per_cell: int = 3, boundary_samples: int = 5,
                   seed: int = 0) -> BundleSection:
    """Evaluate a sheaf section into the persistence plane at sampled base
    points, and certify continuity across every in-scope face relation by
    exact evaluation at boundary points of the face cell.

    A certificate failure means the sheaf (or the section) is inconsistent
    with the fibration and raises InvariantError naming the edge, the point
    and both value pairs."""
    fib = sheaf.fib
    strat = sheaf.strat
    rng = random.Random(seed)
    samples: List[BundleSectionSample] = []
    for cid in sorted(section.assignment):
        cell = strat.cell(cid)
        e = section.assignment[cid]
        pts = [cell.rep]
        pts += [sample_in_cell(cell, rng) for _ in range(max(0, samples_per_cell - 1))]
        for p in pts:
            b, d = _eval_element(fib, e, p, cell.triangles[0])
            samples.append(BundleSectionSample(cid, p, b, d))
    checked = 0
    for face, coface in sheaf.edges():
        if face not in section.assignment or coface not in section.assignment:
            continue
        fcell = strat.cell(face)
        pts = [fcell.rep]
        pts += [sample_in_cell(fcell, rng) for _ in range(max(0, boundary_samples - 1))]
        for p in pts:
            lhs = _eval_element(fib, section.assignment[face], p, fcell.triangles[0])
            rhs = _eval_element(fib, section.assignment[coface], p, fcell.triangles[0])
            if lhs != rhs:
                raise InvariantError(
                    f"bundle section discontinuous across edge ({face}, {coface}) "
                    f"at {p}: face pair evaluates to {lhs}, coface pair to {rhs}")
            checked += 1
    return BundleSection(samples, checked)


def edge_value_certificate(sheaf: CellularSheaf, samples_per_edge: int = 5,
                           seed: int = 0) -> int:
    """Check, for every edge morphism and every pair in the face stalk, that
    the pair and its image evaluate to the same exact values at sampled points
    of the face cell. Returns the number of equality checks performed."""
    fib = sheaf.fib
    strat = sheaf.strat
    rng = random.Random(seed)
    checked = 0
    for (face, coface), phi in sorted(sheaf.morphisms.items()):
        fcell = strat.cell(face)
        pts = [fcell.rep]
        pts += [sample_in_cell(fcell, rng) for _ in range(max(0, samples_per_edge - 1))]
        for p in pts:
            values = filtration_at(fib, p, triangle_hint=fcell.triangles[0])
            for e, img in phi.items():
                lhs = (values[e[0]], None if e[1] is None else values[e[1]])
                rhs = (values[img[0]], None if img[1] is None else values[img[1]])
                if lhs != rhs:
                    raise InvariantError(
                        f"edge ({face}, {coface}): pair {e} maps to {img} but "
                        f"values differ at {p}: {lhs} vs {rhs}")
                checked += 1
    return checked
