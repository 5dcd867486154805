import math

import numpy as np
import pytest

from linbai.errors import InstanceParseError, InvalidInputError, InvalidInstanceError
from linbai.instance import (
    ArmSet,
    Instance,
    gen_many_arms,
    gen_orthonormal_basis,
    load_instance,
    save_instance,
    sphere_instance,
)


def test_many_arms_contains_fixed_arms():
    inst = gen_many_arms(3, seed=0)
    arms = inst.arm_set.arms
    assert np.array_equal(arms[0], [1.0, 0.0])
    assert arms[1] == pytest.approx([-0.70710678118654746, 0.70710678118654757], abs=1e-11)


def test_many_arms_deterministic():
    a = gen_many_arms(1000, seed=42)
    b = gen_many_arms(1000, seed=42)
    assert np.array_equal(a.arm_set.arms, b.arm_set.arms)
    assert np.array_equal(a.mu, b.mu)


def test_many_arms_best_arm_is_e1():
    inst = gen_many_arms(1000, seed=7)
    assert inst.best_arm_index == 0
    rewards = inst.arm_set.arms @ inst.mu
    assert np.all(rewards[1:] < 1.0)


def test_many_arms_counts_and_norms():
    inst = gen_many_arms(257, seed=3)
    assert inst.arm_set.n_arms == 257
    norms = np.linalg.norm(inst.arm_set.arms, axis=1)
    assert np.max(np.abs(norms - 1.0)) <= 1e-12


def test_many_arms_rejects_small_k():
    with pytest.raises(InvalidInputError):
        gen_many_arms(2, seed=0)


def test_orthonormal_basis():
    b2 = gen_orthonormal_basis(2)
    assert np.array_equal(b2[0], [1.0, 0.0]) and np.array_equal(b2[1], [0.0, 1.0])
    b4 = np.array(gen_orthonormal_basis(4))
    assert np.array_equal(b4 @ b4.T, np.eye(4))
    b3 = np.array(gen_orthonormal_basis(3))
    assert np.array_equal(b3 @ b3.T, np.eye(3))


def test_save_load_round_trip(tmp_path):
    inst = gen_many_arms(17, seed=9, sigma=0.5)
    path = tmp_path / "inst.csv"
    save_instance(inst, path)
    loaded = load_instance(path)
    assert loaded.arm_set.dim == inst.arm_set.dim
    assert np.array_equal(loaded.arm_set.arms, inst.arm_set.arms)
    assert np.array_equal(loaded.mu, inst.mu)
    assert loaded.sigma == inst.sigma


def test_load_rejects_single_arm(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("d,K,sigma\n2,1,1\n1,0\nmu,1,0\n")
    with pytest.raises(InvalidInstanceError):
        load_instance(path)


def test_load_rejects_rank_deficient(tmp_path):
    path = tmp_path / "line.csv"
    path.write_text("d,K,sigma\n2,3,1\n1,0\n2,0\n3,0\nmu,1,0\n")
    with pytest.raises(InvalidInstanceError):
        load_instance(path)


def test_load_reports_line_numbers(tmp_path):
    path = tmp_path / "garbled.csv"
    path.write_text("d,K,sigma\n2,2,1\n1,0\nnot,a,number\nmu,1,0\n")
    with pytest.raises(InstanceParseError) as err:
        load_instance(path)
    assert err.value.line_number == 4


def test_rejects_duplicate_best_arm():
    arms = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(InvalidInstanceError):
        Instance(ArmSet(dim=2, arms=arms), np.array([1.0, 0.0]))


def test_rejects_non_spanning():
    with pytest.raises(InvalidInstanceError):
        ArmSet(dim=2, arms=np.array([[1.0, 0.0], [2.0, 0.0]]))


def test_sphere_instance_requires_nonzero_mu():
    with pytest.raises(InvalidInstanceError):
        sphere_instance(np.zeros(3))
    inst = sphere_instance(np.array([0.0, 2.0]))
    assert np.array_equal(inst.best_direction, [0.0, 1.0])
