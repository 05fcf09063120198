import math
import random

import numpy as np
import pytest

from voxplan import OccupancyOctree, WorldPoint
from voxplan.costfield import (
    CLOSED,
    CostField,
    CostRecord,
    Dominance,
    RefinementError,
    classify_dominance,
    dominance_bounds,
    g_at,
    suboptimality_bound,
)
from voxplan.geometry import Aabb, GridVertex, SubvolumeAddress, aabb_of, vertex_center
from voxplan.occupancy import FREE, OCCUPIED

from conftest import make_map
from oracles import brute_dominance_margins, brute_obstacle_adjacent

ORIGIN = WorldPoint(0.0, 0.0, 0.0)
# origin chosen so vertex v sits at world coordinates exactly v
VERTEX_FRAME = WorldPoint(-0.5, -0.5, -0.5)


class TestGAt:
    def test_345(self):
        rec = CostRecord(GridVertex(0, 0, 0), 2.0)
        # world frame 0.1 m: predecessor at (0.05,..), s 3-4-0 cells away
        s = GridVertex(3, 4, 0)
        assert g_at(rec, s, ORIGIN, 0.1) == pytest.approx(2.5)

    def test_identity(self):
        rec = CostRecord(GridVertex(7, 1, 2), 3.25)
        assert g_at(rec, GridVertex(7, 1, 2), ORIGIN, 0.1) == pytest.approx(3.25)

    def test_start_region(self):
        rec = CostRecord(GridVertex(0, 0, 0), 0.0)
        assert g_at(rec, GridVertex(1, 1, 1), ORIGIN, 1.0) == pytest.approx(math.sqrt(3))


def classify_in_vertex_frame(a, ag, b, bg, box, eps):
    return suboptimality_bound((GridVertex(*a), ag), (GridVertex(*b), bg),
                               box, eps, 1.0, VERTEX_FRAME)


class TestSuboptimalityBound:
    def test_single_vertex_none_better(self):
        box = Aabb(GridVertex(4, 0, 0), GridVertex(4, 0, 0))
        got = classify_in_vertex_frame((0, 0, 0), 0.0, (2, 0, 0), 0.0, box, 0.0)
        assert got == Dominance.NONE_BETTER
        # relative error of a against b at the vertex is (4-2)/4 = 0.5
        margins = brute_dominance_margins((0, 0, 0), 0.0, (2, 0, 0), 0.0,
                                          [(4, 0, 0)], 0.0)
        assert margins[0] / 4.0 == pytest.approx(0.5)

    def test_identical_candidates(self):
        box = Aabb(GridVertex(0, 0, 0), GridVertex(3, 3, 3))
        a = ((1, 1, 1), 2.0)
        assert classify_in_vertex_frame(a[0], a[1], a[0], a[1], box, 1e-2) \
            == Dominance.ALL_BETTER
        assert classify_in_vertex_frame(a[0], a[1], a[0], a[1], box, 0.0) \
            == Dominance.NONE_BETTER

    def test_mixed_example(self):
        # box vertices spanning [0,1]^3 in the vertex frame, candidates on
        # opposite sides: brute force confirms the margin changes sign.
        box = Aabb(GridVertex(0, 0, 0), GridVertex(1, 1, 1))
        got = classify_in_vertex_frame((-1, 0.5, 0.5), 0.0, (2, 0.5, 0.5), 0.0, box, 0.0)
        assert got == Dominance.MIXED
        verts = [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)]
        margins = brute_dominance_margins((-1, 0.5, 0.5), 0.0, (2, 0.5, 0.5), 0.0,
                                          verts, 0.0)
        assert min(margins) < 0 < max(margins)

    def _random_case(self, rng):
        lo = [rng.randrange(0, 5) for _ in range(3)]
        box = Aabb(GridVertex(*lo),
                   GridVertex(*(lo[i] + rng.randrange(0, 4) for i in range(3))))
        a = tuple(rng.uniform(-4, 9) for _ in range(3))
        b = tuple(rng.uniform(-4, 9) for _ in range(3))
        ag = rng.uniform(0, 5)
        bg = rng.uniform(0, 5)
        eps = rng.choice([0.0, 1e-3, 1e-2, 0.1])
        return a, ag, b, bg, box, eps

    def test_bounds_bracket_brute_margins(self):
        rng = random.Random(30)
        for _ in range(200):
            a, ag, b, bg, box, eps = self._random_case(rng)
            lo, up = dominance_bounds(a, ag, b, bg,
                                      (box.min.x, box.min.y, box.min.z),
                                      (box.max.x, box.max.y, box.max.z), eps)
            margins = brute_dominance_margins(a, ag, b, bg,
                                              list(box.iter_cells()), eps)
            assert lo - 1e-9 <= min(margins) and max(margins) <= up + 1e-9

    def test_classification_one_sided_guarantees(self):
        rng = random.Random(31)
        for _ in range(200):
            a, ag, b, bg, box, eps = self._random_case(rng)
            got = classify_dominance(a, ag, b, bg,
                                     (box.min.x, box.min.y, box.min.z),
                                     (box.max.x, box.max.y, box.max.z), eps)
            margins = brute_dominance_margins(a, ag, b, bg,
                                              list(box.iter_cells()), eps)
            if got == Dominance.ALL_BETTER:
                assert max(margins) < 0
            if min(margins) >= 0:
                assert got in (Dominance.NONE_BETTER, Dominance.MIXED)

    def test_refinement_progress_terminates_at_height_zero(self):
        # Splitting any Mixed box eventually reaches single-vertex boxes,
        # where the classification is exact (never Mixed).
        a, ag = (-1.0, 2.5, 2.5), 0.0
        b, bg = (6.0, 2.5, 2.5), 0.0
        boxes = [SubvolumeAddress(2, 0, 0, 0)]
        depth = 0
        while boxes:
            depth += 1
            assert depth < 10
            nxt = []
            for addr in boxes:
                box = aabb_of(addr)
                got = classify_dominance(a, ag, b, bg,
                                         (box.min.x, box.min.y, box.min.z),
                                         (box.max.x, box.max.y, box.max.z), 0.0)
                if got == Dominance.MIXED:
                    assert addr.height > 0, "Mixed at height 0"
                    nxt.extend(addr.children())
            boxes = nxt


def field_for(dense, r_init_cells=1, seeds=(), init=True, block_height=4):
    m = make_map(dense, resolution=0.1, block_height=block_height)
    return CostField(m, r_init_cells * 0.1, seeds=seeds,
                     init_obstacle_adjacent=init), m


class TestInitialization:
    def test_single_obstacle_finest_neighbors(self):
        dense = np.zeros((16, 16, 16), dtype=np.uint8)
        dense[8, 8, 8] = 1
        field, m = field_for(dense)
        created = field.initialize_block((0, 0, 0))
        flagged = brute_obstacle_adjacent(dense)
        # interior flagged vertices are exactly the 26 neighbors
        interior = {tuple(v) for v in np.argwhere(flagged)
                    if all(0 < c < 15 for c in v)}
        assert len(interior) == 26
        for v in interior:
            leaf = field.leaf_containing(GridVertex(*v))
            assert leaf is not None and leaf.height == 0

    def test_every_flagged_vertex_covered_at_r_init(self):
        rng = np.random.default_rng(32)
        dense = (rng.random((16, 16, 16)) < 0.05).astype(np.uint8)
        for r_cells in (1, 2, 4):
            field, m = field_for(dense, r_init_cells=r_cells)
            field.initialize_block((0, 0, 0))
            flagged = brute_obstacle_adjacent(dense)
            for v in np.argwhere(flagged):
                leaf = field.leaf_containing(GridVertex(*(int(c) for c in v)))
                assert leaf is not None
                assert (1 << leaf.height) <= r_cells

    def test_r_init_four_height2_leaf_set(self):
        dense = np.zeros((16, 16, 16), dtype=np.uint8)
        dense[8, 8, 8] = 1
        field, m = field_for(dense, r_init_cells=4)
        created = field.initialize_block((0, 0, 0))
        flagged = brute_obstacle_adjacent(dense)
        # brute: fully-free height-2 aligned cubes containing a flagged vertex
        want = set()
        for v in np.argwhere(flagged):
            c = tuple(int(x) >> 2 for x in v)
            sub = dense[c[0] * 4:(c[0] + 1) * 4, c[1] * 4:(c[1] + 1) * 4,
                        c[2] * 4:(c[2] + 1) * 4]
            if (sub == 0).all():
                want.add(SubvolumeAddress(2, *c))
        got = {a for a in created if a.height == 2
               and any(flagged[v] for v in
                       ((x, y, z)
                        for x in range(a.cx * 4, a.cx * 4 + 4)
                        for y in range(a.cy * 4, a.cy * 4 + 4)
                        for z in range(a.cz * 4, a.cz * 4 + 4)))}
        assert got == want and want

    def test_fully_free_interior_block_single_leaf(self):
        dense = np.zeros((24, 24, 24), dtype=np.uint8)
        m = make_map(dense, resolution=0.1, block_height=3)
        field = CostField(m, 0.1)
        created = field.initialize_block((1, 1, 1))
        assert created == {SubvolumeAddress(3, 1, 1, 1)}
        occ_leaves = {a for a, occ in m.leaf_iter()
                      if occ == FREE and aabb_of(a).min.x >= 8 and aabb_of(a).max.x < 16
                      and aabb_of(a).min.y >= 8 and aabb_of(a).max.y < 16
                      and aabb_of(a).min.z >= 8 and aabb_of(a).max.z < 16}
        assert created == occ_leaves

    def test_seed_vertex_gets_finest_leaf(self):
        dense = np.zeros((16, 16, 16), dtype=np.uint8)
        field, m = field_for(dense, seeds=(GridVertex(5, 6, 7),))
        field.initialize_block((0, 0, 0))
        leaf = field.leaf_containing(GridVertex(5, 6, 7))
        assert leaf == SubvolumeAddress(0, 5, 6, 7)

    def test_init_disabled_matches_occupancy_leaves(self):
        rng = np.random.default_rng(33)
        dense = (rng.random((16, 16, 16)) < 0.1).astype(np.uint8)
        field, m = field_for(dense, init=False)
        created = field.initialize_region(m.bounds)
        occ_free = {a for a, occ in m.leaf_iter() if occ == FREE}
        assert created == occ_free

    def test_leaves_cover_only_free_cells(self):
        rng = np.random.default_rng(34)
        dense = (rng.random((16, 16, 16)) < 0.15).astype(np.uint8)
        field, m = field_for(dense, r_init_cells=2)
        created = field.initialize_region(m.bounds)
        covered = np.zeros(dense.shape, dtype=int)
        for a in created:
            box = aabb_of(a)
            for v in box.iter_cells():
                assert dense[v.x, v.y, v.z] == 0
                covered[v.x, v.y, v.z] += 1
        assert covered.max() <= 1
        assert (covered[dense == 0] == 1).all()

    def test_bad_r_init_rejected(self):
        dense = np.zeros((8, 8, 8), dtype=np.uint8)
        m = make_map(dense, resolution=0.1, block_height=3)
        for bad in (0.05, 0.3, 0.0):
            with pytest.raises(ValueError):
                CostField(m, bad)


class TestSplit:
    def _field(self):
        # obstacle-adjacent seeding off so the all-free block stays one leaf
        dense = np.zeros((16, 16, 16), dtype=np.uint8)
        field, m = field_for(dense, block_height=4, init=False)
        field.initialize_block((0, 0, 0))
        return field

    def test_height2_split_covers_parent(self):
        field = self._field()
        parent = SubvolumeAddress(2, 0, 0, 0)
        field.split(SubvolumeAddress(4, 0, 0, 0))  # root -> height 3
        field.split(SubvolumeAddress(3, 0, 0, 0))
        field.records[parent] = CostRecord(GridVertex(1, 1, 1), 2.5)
        children = field.split(parent)
        assert len(children) == 8
        cells = set()
        for c in children:
            assert c.height == 1
            cells |= set(aabb_of(c).iter_cells())
        assert cells == set(aabb_of(parent).iter_cells())

    def test_children_inherit_record(self):
        field = self._field()
        field.split(SubvolumeAddress(4, 0, 0, 0))
        addr = SubvolumeAddress(3, 1, 0, 1)
        field.records[addr] = CostRecord(GridVertex(3, 3, 3), 1.75)
        for child in field.split(addr):
            rec = field.records[child]
            assert rec.predecessor == GridVertex(3, 3, 3)
            assert rec.g_pred == 1.75
            assert rec.state != CLOSED

    def test_split_height0_raises(self):
        field = self._field()
        for a in (SubvolumeAddress(4, 0, 0, 0), SubvolumeAddress(3, 0, 0, 0),
                  SubvolumeAddress(2, 0, 0, 0), SubvolumeAddress(1, 0, 0, 0)):
            field.split(a)
        with pytest.raises(RefinementError):
            field.split(SubvolumeAddress(0, 0, 0, 0))

    def test_split_closed_raises(self):
        field = self._field()
        addr = SubvolumeAddress(4, 0, 0, 0)
        field.records[addr] = CostRecord(GridVertex(0, 0, 0), 0.0, state=CLOSED)
        with pytest.raises(RefinementError):
            field.split(addr)

    def test_split_non_leaf_raises(self):
        field = self._field()
        field.split(SubvolumeAddress(4, 0, 0, 0))
        with pytest.raises(RefinementError):
            field.split(SubvolumeAddress(4, 0, 0, 0))

    def test_randomized_splits_keep_partition(self):
        rng = random.Random(35)
        dense = np.zeros((16, 16, 16), dtype=np.uint8)
        dense[4:7, 5:9, 2:4] = 1
        field, m = field_for(dense, block_height=4)
        leaves = sorted(field.initialize_block((0, 0, 0)))
        for _ in range(30):
            splittable = [a for a in leaves if a.height > 0]
            if not splittable:
                break
            target = rng.choice(splittable)
            leaves.remove(target)
            leaves.extend(field.split(target))
        covered = np.zeros(dense.shape, dtype=int)
        for a in leaves:
            for v in aabb_of(a).iter_cells():
                covered[v.x, v.y, v.z] += 1
        assert covered.max() <= 1
        assert (covered[dense == 0] == 1).all()
        assert (covered[dense != 0] == 0).all()
