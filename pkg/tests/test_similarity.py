import numpy as np
import pytest

from mbclust import (
    Dataset,
    DegenerateDataError,
    build_sm,
    condensed_index,
    count_matches,
    goodall,
    influence,
    lin,
    overlap,
    pairwise_matrix,
    update_sm_after_drop,
)
from conftest import random_codes
from oracles import PAIR_MEASURES_D42, POSITIVE_PAIRS_A, SM_A_FULL


@pytest.mark.parametrize("size", range(2, 9))
def test_condensed_index_matches_enumeration(size):
    ii, jj = np.triu_indices(size, k=1)
    for pos, (i, j) in enumerate(zip(ii, jj)):
        assert condensed_index(size, int(i), int(j)) == pos
    # vectorized form agrees with the scalar one
    assert np.array_equal(condensed_index(size, ii, jj), np.arange(len(ii)))


def test_count_matches_and_overlap():
    x, y = (0, 1, 2, 3), (0, 1, 5, 3)
    assert count_matches(x, y) == 3
    assert overlap(x, y) == 0.75
    assert count_matches(x, y, features=[2]) == 0
    assert overlap(x, y, features=[0, 1]) == 1.0


def test_pair_argument_errors():
    with pytest.raises(ValueError):
        count_matches((0, 1), (0, 1, 2))
    with pytest.raises(ValueError):
        overlap((0, 1), (0, 1), features=[])
    with pytest.raises(IndexError):
        count_matches((0, 1), (0, 1), features=[2])


def test_match_count_matrix_on_example(dataset_a):
    sm = build_sm(dataset_a.codes_matrix)
    assert sm.size == 10 and sm.theta == 5
    assert np.array_equal(sm.values, SM_A_FULL)


def test_value_at_and_square(dataset_a):
    sm = build_sm(dataset_a.codes_matrix)
    assert sm.value_at(0, 1) == 5
    assert sm.value_at(1, 0) == 5
    assert sm.value_at(6, 9) == 5
    square = sm.to_square()
    assert np.array_equal(square, square.T)
    assert np.all(np.diag(square) == 0)
    assert square[4, 6] == 4
    with pytest.raises(ValueError):
        sm.value_at(3, 3)
    with pytest.raises(IndexError):
        sm.value_at(0, 10)


def test_build_sm_accepts_dataset(dataset_a):
    assert np.array_equal(build_sm(dataset_a).values, SM_A_FULL)


def test_build_sm_degenerate_shapes():
    one = build_sm(np.array([[0, 1, 2]]))
    assert one.size == 1 and one.values.size == 0
    with pytest.raises(ValueError):
        build_sm(np.zeros((3, 0), dtype=int))


def test_update_after_drop_equals_rebuild(dataset_a):
    codes = dataset_a.codes_matrix
    sm = build_sm(codes)
    updated = update_sm_after_drop(sm, codes, [4])
    rebuilt = build_sm(codes[:, :4])
    assert updated.theta == 4
    assert np.array_equal(updated.values, rebuilt.values)


def test_update_after_drop_randomized():
    rng = np.random.default_rng(20240817)
    for _ in range(50):
        codes = random_codes(rng)
        if codes.shape[1] < 2:
            continue
        sm = build_sm(codes)
        n_drop = int(rng.integers(1, codes.shape[1]))
        drop = rng.choice(codes.shape[1], size=n_drop, replace=False)
        kept = [c for c in range(codes.shape[1]) if c not in set(drop.tolist())]
        updated = update_sm_after_drop(sm, codes, drop)
        rebuilt = build_sm(codes[:, kept])
        assert np.array_equal(updated.values, rebuilt.values)
        assert updated.theta == rebuilt.theta


def test_update_after_drop_edge_cases(dataset_a):
    codes = dataset_a.codes_matrix
    sm = build_sm(codes)
    same = update_sm_after_drop(sm, codes, [])
    assert np.array_equal(same.values, sm.values)
    assert same.values is not sm.values
    with pytest.raises(ValueError):
        update_sm_after_drop(sm, codes, range(5))
    with pytest.raises(IndexError):
        update_sm_after_drop(sm, codes, [7])
    with pytest.raises(ValueError):
        update_sm_after_drop(sm, codes[:, :4], [0])
    with pytest.raises(ValueError):
        update_sm_after_drop(sm, codes[:9], [0])


def test_pair_measures_on_balanced_example(d42):
    rows = [d42.row(i) for i in range(4)]
    pos = 0
    for i in range(4):
        for j in range(i + 1, 4):
            ov, li, go = PAIR_MEASURES_D42[pos]
            assert overlap(rows[i], rows[j]) == pytest.approx(ov, abs=1e-12)
            assert lin(rows[i], rows[j], d42) == pytest.approx(li, abs=1e-12)
            assert goodall(rows[i], rows[j], d42) == pytest.approx(go, abs=1e-12)
            pos += 1


def test_lin_identity_is_exactly_one(d42, dataset_a):
    for data in (d42, dataset_a):
        for i in range(data.n):
            row = data.row(i)
            assert lin(row, row, data) == 1.0


def test_lin_degenerate():
    data = Dataset.from_codes([[0, 0], [0, 0], [0, 0]])
    with pytest.raises(DegenerateDataError):
        lin(data.row(0), data.row(1), data)


def test_goodall_needs_population():
    data = Dataset.from_codes([[0, 1]])
    with pytest.raises(ValueError):
        goodall(data.row(0), data.row(0), data)


def test_measures_symmetric_and_bounded():
    rng = np.random.default_rng(61)
    for _ in range(30):
        codes = random_codes(rng, max_n=20, max_m=6, max_k=4)
        data = Dataset.from_codes(codes)
        i, j = rng.integers(0, data.n, size=2)
        x, y = data.row(int(i)), data.row(int(j))
        assert overlap(x, y) == overlap(y, x)
        assert goodall(x, y, data) == goodall(y, x, data)
        assert 0.0 <= overlap(x, y) <= 1.0
        assert 0.0 <= goodall(x, y, data) <= 1.0
        try:
            forward = lin(x, y, data)
        except DegenerateDataError:
            continue
        assert forward == lin(y, x, data)
        assert 0.0 <= forward <= 1.0


def test_influence_counts(dataset_a):
    sm = build_sm(dataset_a.codes_matrix)
    mask = influence(sm)
    assert mask.ones == POSITIVE_PAIRS_A
    assert influence(sm, alpha=4.0).ones == 2  # only the two exact-profile pairs
    assert influence(sm, alpha=5.0).ones == 0
    assert np.array_equal(mask.bits, sm.values > 0)


def test_pairwise_matrix_consistency(d42):
    cm = pairwise_matrix(d42, "cm")
    assert np.array_equal(cm, cm.T)
    assert np.all(np.diag(cm) == d42.m)
    assert np.array_equal(pairwise_matrix(d42, "overlap"), cm / d42.m)
    go = pairwise_matrix(d42, "goodall")
    assert go[0, 2] == pytest.approx(5 / 12, abs=1e-12)
    li = pairwise_matrix(d42, "lin")
    assert np.all(np.diag(li) == 1.0)
    with pytest.raises(ValueError):
        pairwise_matrix(d42, "hamming")
