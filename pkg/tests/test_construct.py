"""Construction heuristics: hand traces, validity, determinism."""

import numpy as np
import pytest

from mapls import (
    Assignment,
    assignment_weight,
    generate,
    greedy,
    max_regret,
    parse_instance_name,
    rom,
    trivial,
)

from conftest import all_vectors, brute_force_optimum, explicit_instance, random_explicit

FAMILY_SAMPLE = ["3r8", "3gp8", "3c8", "3g8", "3p8", "3sr8", "4r5", "5p4", "6r3"]


def test_trivial_all_identity():
    inst = generate(parse_instance_name("5r9", 1))
    a = trivial(inst)
    assert np.array_equal(a.perms, np.tile(np.arange(9), (5, 1)))


def test_trivial_on_diagonal_planted():
    # planted optimum on the diagonal: trivial recovers optimal weight a*n
    from mapls import Family, Instance, Planted

    inst = Instance(3, 6, Family.PLANTED, 1, Planted(1, 101, Assignment.identity(3, 6)))
    assert assignment_weight(inst, trivial(inst)) == 6.0


def test_n_equals_one_unique_assignment():
    inst = explicit_instance(3, 1, [5.0])
    for heuristic in (trivial, greedy, max_regret, rom):
        a = heuristic(inst)
        assert a.n == 1 and assignment_weight(inst, a) == 5.0


def test_greedy_forced_first_pick():
    # w(0,0,0) = 0 is the unique global minimum
    vals = np.full(8, 50.0)
    vals[0] = 0.0
    inst = explicit_instance(3, 2, vals)
    a = greedy(inst)
    assert (0, 0, 0) in set(map(tuple, a.vectors()))


def test_greedy_adversarial_exceeds_optimum():
    # cheap (0,0,0) forces the expensive disjoint (1,1,1); the optimum avoids both
    vals = np.array([0.0, 1.0, 50.0, 50.0, 50.0, 50.0, 1.0, 100.0])
    inst = explicit_instance(3, 2, vals)
    wg = assignment_weight(inst, greedy(inst))
    assert wg == 100.0
    assert brute_force_optimum(inst) == 2.0
    assert wg > brute_force_optimum(inst)


def test_greedy_first_pick_is_global_min(rng):
    for _ in range(5):
        inst = random_explicit(3, 4, rng)
        a = greedy(inst)
        row_w = inst.weight_batch(a.vectors())
        assert row_w.min() == inst.weight_batch(all_vectors(3, 4)).min()


def test_max_regret_hand_trace():
    # regret table puts (dim 3, value 2) first with regret 90; its best
    # vector is (1,1,2), leaving (2,2,1); total 0 + 8
    inst = explicit_instance(3, 2, [5.0, 0.0, 7.0, 90.0, 6.0, 95.0, 8.0, 98.0])
    a = max_regret(inst)
    assert set(map(tuple, a.vectors())) == {(0, 0, 1), (1, 1, 0)}
    assert assignment_weight(inst, a) == 8.0


def test_rom_hand_trace():
    # two-level recursion: level 1 pairs rows with dim-2 values (2,1),
    # level 2 picks dim-3 values (2,1); the result is the optimum here
    inst = explicit_instance(3, 2, [50.0, 2.0, 3.0, 40.0, 5.0, 60.0, 70.0, 8.0])
    a = rom(inst)
    assert set(map(tuple, a.vectors())) == {(0, 1, 1), (1, 0, 0)}
    assert assignment_weight(inst, a) == 45.0
    assert assignment_weight(inst, a) == brute_force_optimum(inst)


@pytest.mark.parametrize("name", FAMILY_SAMPLE)
def test_all_heuristics_valid_everywhere(name):
    inst = generate(parse_instance_name(name, 1))
    for heuristic in (trivial, greedy, max_regret, rom):
        heuristic(inst).validate()


@pytest.mark.parametrize("name", ["3r8", "3c6", "3p6", "4g4"])
def test_determinism(name):
    inst = generate(parse_instance_name(name, 2))
    for heuristic in (greedy, max_regret, rom):
        assert heuristic(inst) == heuristic(inst)


def test_product_fast_path_matches_generic_scan():
    # the closed-form product round must agree with the generic grid scan
    from mapls.construct import _min_compatible_vector

    inst = generate(parse_instance_name("3p7", 4))
    factors = inst.weights.factors
    remaining = [np.arange(7, dtype=np.int64) for _ in range(3)]
    for _ in range(4):
        fast = np.array([r[int(np.argmin(factors[j][r]))] for j, r in enumerate(remaining)])
        generic, _ = _min_compatible_vector(inst, remaining, -np.inf)
        assert tuple(fast) == tuple(generic)
        remaining = [r[r != fast[j]] for j, r in enumerate(remaining)]


def test_greedy_beats_trivial_on_random():
    inst = generate(parse_instance_name("3r40", 1))
    assert assignment_weight(inst, greedy(inst)) < assignment_weight(inst, trivial(inst))
