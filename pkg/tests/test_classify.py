import numpy as np
import pytest

from kdlab.classify import (
    enumerate_kd_positive_pure,
    family_to_json,
    make_subgroup_state,
    recognize_kd_positive_pure,
)
from kdlab.errors import GroupMismatchError, PreconditionError
from kdlab.groups import Subgroup, annihilator, enumerate_subgroups, parse_group
from kdlab.harmonic import GFunction
from kdlab.kd import kd
from kdlab.weyl import WHElement, wh_conjugate


FAMILY_SIZES = {"Z2": 4, "Z4": 12, "Z2xZ2": 20, "Z6": 24}


@pytest.mark.parametrize("name,count", sorted(FAMILY_SIZES.items()))
def test_family_sizes_frozen(name, count):
    group = parse_group(name)
    assert len(enumerate_kd_positive_pure(group)) == count


def test_family_size_formula(battery_group):
    group = battery_group
    family = enumerate_kd_positive_pure(group)
    assert len(family) == group.order * len(enumerate_subgroups(group))
    assert len(set(family)) == len(family)


def test_make_subgroup_state_z4_example():
    z4 = parse_group("Z4")
    h = Subgroup(z4, (0, 2))
    member = make_subgroup_state(h, z4.zero, z4.trivial_character)
    assert member.vector.values == pytest.approx([np.sqrt(2), 0, np.sqrt(2), 0], abs=1e-12)
    table = kd(member.projector())
    expected = np.zeros((4, 4))
    expected[np.ix_([0, 2], [0, 2])] = 1.0
    assert table.values == pytest.approx(expected, abs=1e-12)


def test_make_subgroup_state_edge_subgroups(battery_group):
    group = battery_group
    d = group.order
    whole = Subgroup(group, tuple(range(d)))
    trivial = Subgroup(group, (0,))
    for ci in range(d):
        chi = group.character_by_index(ci)
        member = make_subgroup_state(whole, group.zero, chi)
        assert member.vector.values == pytest.approx(group.char_table[ci], abs=1e-12)
    for gi in range(d):
        g = group.element_by_index(gi)
        member = make_subgroup_state(trivial, g, group.trivial_character)
        expected = np.zeros(d)
        expected[gi] = np.sqrt(d)
        assert member.vector.values == pytest.approx(expected, abs=1e-12)


def test_make_subgroup_state_canonicalizes_cosets():
    z4 = parse_group("Z4")
    h = Subgroup(z4, (0, 2))
    base = make_subgroup_state(h, z4.element_by_index(1), z4.character_by_index(1))
    shifted = make_subgroup_state(h, z4.element_by_index(3), z4.character_by_index(3))
    assert base == shifted
    assert np.max(np.abs(base.vector.values - shifted.vector.values)) == 0.0


def test_make_subgroup_state_group_mismatch():
    z4 = parse_group("Z4")
    z2 = parse_group("Z2")
    h = Subgroup(z4, (0, 2))
    with pytest.raises(GroupMismatchError):
        make_subgroup_state(h, z2.zero, z4.trivial_character)


def test_family_unit_norm_and_indicator(battery_group):
    group = battery_group
    for member in enumerate_kd_positive_pure(group):
        assert abs(member.vector.norm() - 1.0) <= 1e-12
        table = kd(member.projector())
        assert np.max(np.abs(table.values - member.indicator_table().values)) <= 1e-12
        assert table.min_real() >= -1e-12
        assert table.max_abs_imag() <= 1e-12


def test_family_pairwise_distinct(battery_group):
    group = battery_group
    family = enumerate_kd_positive_pure(group)
    mats = np.stack([m.projector().kernel for m in family]) / group.order
    flat = mats.reshape(len(family), -1)
    gram = np.abs(flat.conj() @ flat.T)
    dists = np.sqrt(np.maximum(np.diag(gram)[:, None] + np.diag(gram)[None, :] - 2 * gram.real, 0))
    np.fill_diagonal(dists, np.inf)
    assert dists.min() > 1e-6


def test_subgroup_annihilator_mass_identity(battery_group):
    group = battery_group
    for h in enumerate_subgroups(group):
        dual = annihilator(group, h)
        assert (h.order / group.order) * dual.order == pytest.approx(1.0)


def test_recognize_position_state_z2():
    z2 = parse_group("Z2")
    member = recognize_kd_positive_pure(GFunction(z2, [np.sqrt(2), 0.0]))
    assert member is not None
    assert member.subgroup.elements == (0,)
    assert member.g_rep.index == 0


def test_recognize_is_phase_invariant():
    z2 = parse_group("Z2")
    psi = GFunction(z2, np.exp(1j * np.pi / 7) * z2.char_table[1])
    member = recognize_kd_positive_pure(psi)
    assert member is not None
    assert member.subgroup.order == 2
    assert member.chi_rep.index == 1


def test_recognize_rejects_negative_state():
    z2 = parse_group("Z2")
    psi = GFunction(z2, [1.2, np.sqrt(0.56)])
    assert recognize_kd_positive_pure(psi) is None


def test_recognize_rejects_small_perturbations(battery_group):
    group = battery_group
    d = group.order
    rng = np.random.default_rng(109)
    family = enumerate_kd_positive_pure(group)
    for k in range(min(10, len(family))):
        base = family[int(rng.integers(len(family)))].vector.values
        noise = rng.normal(size=d) + 1j * rng.normal(size=d)
        # remove the component along the member so the error is purely transverse
        noise -= (np.vdot(base, noise) / np.vdot(base, base)) * base
        noise *= 1e-3 / (np.linalg.norm(noise) / np.sqrt(d))
        bumped = base + noise
        bumped /= np.linalg.norm(bumped) / np.sqrt(d)
        assert recognize_kd_positive_pure(GFunction(group, bumped)) is None


def test_recognize_accepts_every_member(battery_group):
    group = battery_group
    rng = np.random.default_rng(113)
    for member in enumerate_kd_positive_pure(group):
        phase = np.exp(2j * np.pi * rng.random())
        found = recognize_kd_positive_pure(GFunction(group, phase * member.vector.values))
        assert found == member


def test_recognize_rejects_non_normalized():
    z2 = parse_group("Z2")
    with pytest.raises(PreconditionError):
        recognize_kd_positive_pure(GFunction(z2, [1.0, 0.0]))


def test_family_closed_under_displacement(battery_group):
    group = battery_group
    rng = np.random.default_rng(127)
    family = enumerate_kd_positive_pure(group)
    for _ in range(10):
        member = family[int(rng.integers(len(family)))]
        a = WHElement(
            group.element_by_index(int(rng.integers(group.order))),
            group.character_by_index(int(rng.integers(group.order))),
            1.0,
        )
        moved = wh_conjugate(member.projector(), a)
        # recover the pure vector from the rank-one kernel
        eigvals, eigvecs = np.linalg.eigh(moved.kernel / group.order)
        top = eigvecs[:, -1] * np.sqrt(group.order)
        assert recognize_kd_positive_pure(GFunction(group, top)) is not None


def test_family_json_shape():
    z4 = parse_group("Z4")
    family = enumerate_kd_positive_pure(z4)
    blob = family_to_json(family)
    assert len(blob) == len(family)
    first = blob[0]
    assert set(first) == {"H", "g", "chi", "vector"}
    assert first["H"] == list(family[0].subgroup.elements)
    assert len(first["vector"]) == 4
