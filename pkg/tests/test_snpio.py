import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from directeffects.errors import DataError, ParseError
from directeffects.simgen import BinaryMatrix, SerialConfig, gen_serial
from directeffects.snpio import (
    EncodedDataset,
    GenotypeMatrix,
    encode,
    prevalence_filter,
    read_dataset,
    write_dataset,
    write_provenance,
)

genotypes = hnp.arrays(np.int8, st.tuples(st.integers(1, 20), st.integers(1, 8)), elements=st.integers(0, 2))


def _g(values):
    values = np.asarray(values)
    return GenotypeMatrix(values, [f"rs{j}" for j in range(values.shape[1])])


def test_encode_definition():
    e = encode(_g([[0], [1], [2]]))
    assert e.labels == ["rs0D", "rs0R"]
    assert e.matrix.values[:, 0].tolist() == [0, 1, 1]
    assert e.matrix.values[:, 1].tolist() == [0, 0, 1]
    assert e.provenance == {"rs0D": ("rs0", "dominant"), "rs0R": ("rs0", "recessive")}


def test_all_zero_snp():
    e = encode(_g(np.zeros((5, 1), int)))
    assert not e.matrix.values.any()


@given(genotypes)
def test_two_columns_per_snp(v):
    g = _g(v)
    e = encode(g)
    assert e.matrix.p == 2 * g.s
    assert e.matrix == encode(g).matrix
    for j in range(g.s):
        assert np.array_equal(e.matrix.values[:, 2 * j], v[:, j] >= 1)
        assert np.array_equal(e.matrix.values[:, 2 * j + 1], v[:, j] == 2)


def test_invalid_symbol_location():
    with pytest.raises(ParseError) as info:
        _g([[0, 1], [3, 0]])
    assert info.value.line == 2 and info.value.column == 1


def test_modal_imputation_and_cap():
    col = np.array([2, 2, 1, 0, 2, 2, 1, 2, 2, -1] + [2] * 10)
    e = encode(_g(col[:, None]))
    assert e.imputed == {"rs0": 1}
    assert e.matrix.values[9].tolist() == [1, 1]
    with pytest.raises(DataError):
        encode(_g(np.array([-1, -1, 0, 1, 2, 0, 0, 1, 1, 2])[:, None]))


def _encoded_with_prevalence(ones_counts, n=1000):
    cols = []
    for k in ones_counts:
        c = np.zeros(n, np.uint8)
        c[:k] = 1
        cols.append(c)
    labels = [f"c{k}" for k in ones_counts]
    return EncodedDataset(BinaryMatrix(np.column_stack(cols), labels), {l: (l, "binary") for l in labels})


def test_prevalence_filter_boundary():
    d = _encoded_with_prevalence([30, 50, 500, 950, 970])
    kept = prevalence_filter(d)
    assert kept.labels == ["c50", "c500", "c950"]
    assert kept.provenance == {l: d.provenance[l] for l in kept.labels}


@given(genotypes, st.floats(0.0, 0.5))
def test_filter_keeps_values_and_is_order_independent(v, thr):
    e = encode(_g(v))
    f = prevalence_filter(e, thr)
    for j, lab in enumerate(f.labels):
        assert np.array_equal(f.matrix.values[:, j], e.matrix.values[:, e.labels.index(lab)])
    perm = np.random.default_rng(0).permutation(v.shape[1])
    g2 = GenotypeMatrix(v[:, perm], [f"rs{j}" for j in perm])
    assert sorted(prevalence_filter(encode(g2), thr).labels) == sorted(f.labels)


def test_round_trip_binary(tmp_path):
    X = gen_serial(SerialConfig(50, 12, 0.5), 1)
    y = np.random.default_rng(0).integers(0, 2, 50)
    write_dataset(tmp_path / "b.txt", X, y)
    d, y2 = read_dataset(tmp_path / "b.txt")
    assert isinstance(d, EncodedDataset) and d.matrix == X
    assert np.array_equal(y, y2)
    write_dataset(tmp_path / "c.txt", X)
    assert read_dataset(tmp_path / "c.txt")[1] is None


@given(genotypes)
def test_round_trip_genotype(tmp_path_factory, v):
    v = v.copy()
    v[0, 0] = -1
    path = tmp_path_factory.mktemp("g") / "g.txt"
    g = _g(v)
    write_dataset(path, g)
    back, y = read_dataset(path)
    assert isinstance(back, GenotypeMatrix) and back == g and y is None


def test_wrong_row_length_names_line(tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("#kind=binary n=2 p=3\na\tb\tc\n0\t1\t0\n1\t1\n")
    with pytest.raises(ParseError, match="line 4"):
        read_dataset(p)


@pytest.mark.parametrize("text,line", [
    ("", 1),
    ("kind=binary n=1 p=1\na\n0\n", 1),
    ("#kind=matrix n=1 p=1\na\n0\n", 1),
    ("#kind=binary n=1 p=2\na\n0\t1\n", 2),
    ("#kind=binary n=1 p=1\na\n2\n", 3),
    ("#kind=genotype n=1 p=1\na\n3\n", 3),
    ("#kind=binary n=2 p=1\na\n#response\n0\n5\n0\n1\n", 5),
    ("#kind=binary n=2 p=1\na\n0\n", 3),
])
def test_parse_errors(tmp_path, text, line):
    p = tmp_path / "x.txt"
    p.write_text(text)
    with pytest.raises(ParseError) as info:
        read_dataset(p)
    assert info.value.line == line


def test_genotype_header_gives_genotype_matrix(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("#kind=genotype n=2 p=2\ns1\ts2\n#response\n1\n0\n0\t2\n1\tNA\n")
    g, y = read_dataset(p)
    assert isinstance(g, GenotypeMatrix)
    assert g.values.tolist() == [[0, 2], [1, -1]] and y.tolist() == [1, 0]


def test_provenance_csv(tmp_path):
    e = encode(_g([[0, 1], [2, 1]]))
    write_provenance(tmp_path / "p.csv", e)
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0] == "label,snp,kind"
    assert lines[1:] == ["rs0D,rs0,dominant", "rs0R,rs0,recessive", "rs1D,rs1,dominant", "rs1R,rs1,recessive"]
