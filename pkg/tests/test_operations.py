from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from syncplan.decomposition import NonPlanarError
from syncplan.generators import (cut_pair_instance, propagate_instance, random_small_instance,
                                 simplify_instance, toroidal)
from syncplan.instance import Q, check_wellformed, normalize_small
from syncplan.operations import (CONVERT_SMALL, ENCAPSULATE_AND_JOIN, PROPAGATE_PQ, SIMPLIFY_I,
                                 SIMPLIFY_II, SIMPLIFY_III, NoInstance, convert_small, cycle_lengths,
                                 cycles, fixed_cyclic_order, uniform_cycles)
from syncplan.oracle import brute_solve_syncplan
from syncplan.solver import Structure, apply_operation, select_operation

seeds = st.integers(min_value=0, max_value=10**6)


def first_step(inst):
    """Normalize small vertices, then apply the operation the policy selects."""
    work = normalize_small(inst)
    struct = Structure(work)
    op = select_operation(work, struct)
    return work, apply_operation(work, struct, op)


# ---------------------------------------------------------------------------
# permutation helpers
# ---------------------------------------------------------------------------


def test_cycles_of_permutation():
    perm = {0: 1, 1: 0, 2: 3, 3: 4, 4: 2}
    assert sorted(cycle_lengths(perm)) == [2, 3]
    assert not uniform_cycles(perm)
    assert sorted(map(sorted, cycles(perm))) == [[0, 1], [2, 3, 4]]


@settings(max_examples=100)
@given(st.integers(1, 4), st.integers(1, 4), st.randoms(use_true_random=False))
def test_fixed_cyclic_order_is_invariant(k, length, rnd):
    items = list(range(k * length))
    rnd.shuffle(items)
    perm = {}
    for c in range(k):
        cyc = items[c * length:(c + 1) * length]
        for i, x in enumerate(cyc):
            perm[x] = cyc[(i + 1) % length]
    s = fixed_cyclic_order(perm)
    assert sorted(s) == sorted(items)
    image = [perm[x] for x in s]
    n = len(s)
    assert any(image == s[i:] + s[:i] for i in range(n))


def test_fixed_cyclic_order_rejects_mixed_lengths():
    with pytest.raises(ValueError):
        fixed_cyclic_order({0: 1, 1: 0, 2: 2})


# ---------------------------------------------------------------------------
# ConvertSmall
# ---------------------------------------------------------------------------


def test_convert_small_record():
    inst = simplify_instance(random.Random(0), 1)
    small = [v for v in inst.graph.vertices() if inst.kind[v] != Q and inst.graph.degree(v) < 4]
    assert small
    rec = convert_small(inst, small[0])
    assert rec.tag == CONVERT_SMALL
    assert all(inst.kind[v] == Q for v in rec.data["vertices"])
    assert check_wellformed(inst) == []


# ---------------------------------------------------------------------------
# single operations preserve the verdict
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("case,tag", [(1, SIMPLIFY_I), (3, SIMPLIFY_III)])
@pytest.mark.parametrize("seed", range(15))
def test_simplify_cases(case, tag, seed):
    inst = simplify_instance(random.Random(seed), case)
    want = brute_solve_syncplan(inst).satisfiable
    work, rec = first_step(inst)
    assert rec.tag == tag
    assert check_wellformed(work) == []
    assert brute_solve_syncplan(work).satisfiable == want


@pytest.mark.parametrize("seed", range(40))
def test_simplify_case_two_or_no_instance(seed):
    inst = simplify_instance(random.Random(seed), 2)
    want = brute_solve_syncplan(inst).satisfiable
    work, rec = first_step(inst)
    if isinstance(rec, NoInstance):
        assert not want
        return
    assert rec.tag == SIMPLIFY_II
    assert brute_solve_syncplan(work).satisfiable == want


@pytest.mark.parametrize("seed", range(15))
def test_encapsulate_and_join(seed):
    inst = cut_pair_instance(random.Random(seed))
    want = brute_solve_syncplan(inst).satisfiable
    work, rec = first_step(inst)
    assert rec.tag == ENCAPSULATE_AND_JOIN
    assert check_wellformed(work) == []
    assert brute_solve_syncplan(work).satisfiable == want


@pytest.mark.parametrize("seed", range(6))
def test_propagate_pq(seed):
    inst = propagate_instance(random.Random(seed))
    want = brute_solve_syncplan(inst).satisfiable
    work, rec = first_step(inst)
    assert rec.tag == PROPAGATE_PQ
    assert check_wellformed(work) == []
    assert brute_solve_syncplan(work).satisfiable == want


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_random_first_step(seed):
    inst = random_small_instance(random.Random(seed))
    work = normalize_small(inst)
    if not work.pipes:
        return
    want = brute_solve_syncplan(inst).satisfiable
    try:
        struct = Structure(work)
        rec = apply_operation(work, struct, select_operation(work, struct))
    except NonPlanarError:
        assert not want
        return
    if isinstance(rec, NoInstance):
        assert not want
        return
    assert brute_solve_syncplan(work).satisfiable == want


@pytest.mark.parametrize("k", [4, 5, 6])
def test_toroidal_detection(k):
    # odd seeds: cycle type (1, k-1), no embedding
    work, rec = first_step(toroidal(k, 1))
    assert isinstance(rec, NoInstance)
    work, rec = first_step(toroidal(k, 0))
    assert rec.tag == SIMPLIFY_II
    assert not work.pipes
