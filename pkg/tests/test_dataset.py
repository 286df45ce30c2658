import numpy as np
import pytest

from mbclust import CsvError, Dataset, load_csv
from conftest import DATA_DIR


def test_load_shape_and_names(dataset_a):
    assert (dataset_a.n, dataset_a.m) == (10, 5)
    assert dataset_a.feature_names == ("A", "B", "C", "D", "E")
    assert dataset_a.labels is None


def test_first_appearance_encoding(dataset_a):
    # a2 appears in the first row, so it takes code 0.
    assert dataset_a.categories(0) == ("a2", "a1")
    assert dataset_a.code_of(0, "a2") == 0
    assert dataset_a.code_of(0, "a1") == 1
    assert dataset_a.categories(4) == ("e2", "e1", "e4", "e3")


def test_frequencies(dataset_a):
    a = dataset_a.feature_index("A")
    assert dataset_a.frequency(a, dataset_a.code_of(a, "a1")) == 6
    assert dataset_a.frequency(a, dataset_a.code_of(a, "a2")) == 4
    assert dataset_a.frequencies_for(a).sum() == dataset_a.n


def test_row_decode_roundtrip(dataset_a):
    assert dataset_a.decode_row(0) == ("a2", "b1", "c2", "d3", "e2")
    assert dataset_a.decode_row(8) == ("a1", "b2", "c1", "d1", "e3")
    row = dataset_a.row(5)
    assert all(isinstance(c, int) for c in row)


def test_load_is_deterministic():
    first = load_csv(DATA_DIR / "dataset_a.csv")
    second = load_csv(DATA_DIR / "dataset_a.csv")
    assert np.array_equal(first.cells, second.cells)
    assert first.category_labels == second.category_labels


def test_label_column_held_out(dataset_a_labeled):
    assert dataset_a_labeled.m == 5
    assert "group" not in dataset_a_labeled.feature_names
    assert dataset_a_labeled.labels == ("G1",) * 4 + ("G2",) * 6


def test_cells_are_read_only(dataset_a):
    with pytest.raises(ValueError):
        dataset_a.cells[0, 0] = 3
    with pytest.raises(ValueError):
        dataset_a.frequencies_for(0)[0] = 99


def test_from_codes_defaults():
    data = Dataset.from_codes([[0, 1], [1, 0], [0, 0]])
    assert data.feature_names == ("f0", "f1")
    assert data.categories(0) == ("c0", "c1")
    assert data.frequency(0, 0) == 2


def test_constructor_validation():
    with pytest.raises(ValueError):
        Dataset.from_codes(np.zeros((0, 2), dtype=int))
    with pytest.raises(ValueError):
        Dataset([[0], [1]], feature_names=["a", "b"], category_labels=[("x", "y")])
    with pytest.raises(ValueError):
        # code 2 exceeds the two-category code book
        Dataset([[2]], feature_names=["a"], category_labels=[("x", "y")])
    with pytest.raises(ValueError):
        Dataset([[0]], feature_names=["a"], category_labels=[("x",)], labels=["p", "q"])


def test_lookup_errors(dataset_a):
    with pytest.raises(KeyError):
        dataset_a.feature_index("Z")
    with pytest.raises(KeyError):
        dataset_a.code_of(0, "zebra")
    with pytest.raises(IndexError):
        dataset_a.frequency(0, 17)
    with pytest.raises(IndexError):
        dataset_a.column(5)


def test_restrict_view(dataset_a):
    view = dataset_a.restrict([3, 1])
    assert view.features == (1, 3)
    assert view.feature_names == ("B", "D")
    assert view.m == 2 and view.n == 10
    assert np.array_equal(view.codes_matrix, dataset_a.cells[:, [1, 3]])
    # frequencies still come from the full object population
    assert view.frequency(0, dataset_a.code_of(1, "b1")) == 4
    assert view.row(0) == (dataset_a.row(0)[1], dataset_a.row(0)[3])


def test_restrict_of_restrict(dataset_a):
    narrow = dataset_a.restrict([0, 2, 4]).restrict([2])
    assert narrow.features == (4,)
    assert narrow.feature_names == ("E",)


def test_restrict_errors(dataset_a):
    with pytest.raises(ValueError):
        dataset_a.restrict([])
    with pytest.raises(IndexError):
        dataset_a.restrict([0, 9])
    view = dataset_a.view()
    with pytest.raises(IndexError):
        view.column(5)


def test_csv_missing_rejected_by_default(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("A,B\nx,y\nx,?\n")
    with pytest.raises(CsvError, match=r"row 3.*'B'"):
        load_csv(path)


def test_csv_missing_as_category(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("A,B\nx,y\nx,?\n ,y\n")
    data = load_csv(path, missing_policy="category")
    assert data.categories(0) == ("x", "?")
    assert data.categories(1) == ("y", "?")
    assert data.frequency(0, data.code_of(0, "?")) == 1
    # the long-form policy name is accepted too
    same = load_csv(path, missing_policy="distinct-category")
    assert np.array_equal(same.cells, data.cells)


def test_csv_unknown_policy(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("A\nx\n")
    with pytest.raises(ValueError):
        load_csv(path, missing_policy="impute")


def test_csv_whitespace_trimmed(tmp_path):
    path = tmp_path / "w.csv"
    path.write_text("A, B\n x ,y\nx, y \n")
    data = load_csv(path)
    assert data.feature_names == ("A", "B")
    assert data.categories(0) == ("x",)
    assert data.frequency(1, 0) == 2


def test_csv_structural_errors(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(CsvError, match="empty"):
        load_csv(empty)

    headers_only = tmp_path / "h.csv"
    headers_only.write_text("A,B\n")
    with pytest.raises(CsvError, match="no data rows"):
        load_csv(headers_only)

    ragged = tmp_path / "r.csv"
    ragged.write_text("A,B\nx,y\nx\n")
    with pytest.raises(CsvError, match="row 3.*expected 2 fields, got 1"):
        load_csv(ragged)

    dupes = tmp_path / "d.csv"
    dupes.write_text("A,A\nx,y\n")
    with pytest.raises(CsvError, match="duplicate"):
        load_csv(dupes)


def test_csv_unknown_label_column(tmp_path):
    path = tmp_path / "l.csv"
    path.write_text("A,B\nx,y\n")
    with pytest.raises(CsvError, match="no column named"):
        load_csv(path, label_column="class")


def test_csv_label_column_cannot_be_only_column(tmp_path):
    path = tmp_path / "only.csv"
    path.write_text("cls\np\n")
    with pytest.raises(CsvError, match="no feature columns"):
        load_csv(path, label_column="cls")
