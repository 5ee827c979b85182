import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ldpcsched.codes import (
    CodeSpec,
    TannerGraph,
    construct_regular_code,
    encode_systematic,
    gf2_rank,
    info_positions,
    is_codeword,
    load_alist,
    parse_alist,
    save_alist,
    syndrome,
    write_alist,
)
from ldpcsched.exceptions import AlistParseError, DimensionError, InvalidSpecError, RankError


def test_codespec_derived_fields():
    spec = CodeSpec(512, 256, 3, 6)
    assert spec.k == 256
    assert spec.rate == 0.5
    assert spec.num_edges == 1536


@pytest.mark.parametrize("args", [(6, 3, 2, 3), (10, 5, 1, 2), (10, 5, 6, 12), (8, 4, 3, 5)])
def test_inconsistent_specs_rejected(args):
    with pytest.raises(InvalidSpecError):
        construct_regular_code(CodeSpec(*args), 0)


def test_six_three_two_four_satisfies_edge_count():
    # 6 * 2 == 3 * 4, so the degree check accepts it
    g = construct_regular_code(CodeSpec(6, 3, 2, 4), 0)
    assert g.num_edges == 12


@pytest.mark.parametrize("spec,seed,edges", [
    (CodeSpec(512, 256, 3, 6), 1, 1536),
    (CodeSpec(2048, 1024, 3, 6), 7, 6144),
])
def test_regular_construction(spec, seed, edges):
    g = construct_regular_code(spec, seed)
    assert g.num_edges == edges
    assert (g.var_degree == spec.dv).all()
    assert (g.check_degree == spec.dc).all()
    assert g.count_4cycles() == 0
    dense = g.to_dense()
    assert dense.max() == 1 and dense.sum() == edges


def test_construction_is_deterministic():
    spec = CodeSpec(96, 48, 3, 6)
    a = construct_regular_code(spec, 11)
    b = construct_regular_code(spec, 11)
    c = construct_regular_code(spec, 12)
    assert a == b
    assert write_alist(a) == write_alist(b)
    assert a != c


def test_adjacency_canonical(code96):
    for row in code96.check_neighbors:
        assert list(row) == sorted(row)
    for row in code96.var_neighbors:
        assert list(row) == sorted(row)
    for e in range(code96.num_edges):
        c, v = code96.edge_endpoints(e)
        assert code96.edge_id(c, v) == e


def test_syndrome_examples(toy_graph):
    assert syndrome(toy_graph, [0, 0, 0]).tolist() == [0, 0]
    assert syndrome(toy_graph, [1, 1, 0]).tolist() == [0, 1]
    assert not is_codeword(toy_graph, [1, 1, 0])
    assert is_codeword(toy_graph, [1, 1, 1])
    with pytest.raises(DimensionError):
        syndrome(toy_graph, [0, 0])


def test_syndrome_matches_dense_product(code96):
    rng = np.random.default_rng(0)
    H = code96.to_dense().astype(np.int64)
    for _ in range(50):
        x = rng.integers(0, 2, code96.n)
        assert np.array_equal(syndrome(code96, x), (H @ x) % 2)


_LINEARITY_GRAPH = construct_regular_code(CodeSpec(40, 20, 3, 6), 5)


@settings(max_examples=200, deadline=None, derandomize=True)
@given(st.integers(0, 2**32 - 1))
def test_syndrome_is_linear(seed):
    g = _LINEARITY_GRAPH
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 2, g.n, dtype=np.uint8)
    b = rng.integers(0, 2, g.n, dtype=np.uint8)
    assert np.array_equal(syndrome(g, a ^ b), syndrome(g, a) ^ syndrome(g, b))


def test_encoder_full_rank(code512):
    assert gf2_rank(code512) == 256
    rng = np.random.default_rng(1)
    assert not encode_systematic(code512, np.zeros(256, dtype=np.uint8)).any()
    words = set()
    for _ in range(100):
        u = rng.integers(0, 2, 256, dtype=np.uint8)
        c = encode_systematic(code512, u)
        assert is_codeword(code512, c)
        assert np.array_equal(c[info_positions(code512)], u)
        words.add(c.tobytes())
    assert len(words) == 100


def test_encoder_rank_deficient():
    g = construct_regular_code(CodeSpec(16, 8, 2, 4), 3)
    rank = gf2_rank(g)
    # every column of a dv=2 matrix has even weight, so the rows sum to zero
    assert rank < 8
    with pytest.raises(RankError) as err:
        encode_systematic(g, np.zeros(8, dtype=np.uint8))
    assert err.value.rank == rank
    rng = np.random.default_rng(2)
    for _ in range(20):
        c = encode_systematic(g, rng.integers(0, 2, 16 - rank))
        assert not syndrome(g, c).any()


def test_alist_round_trip(code512, tmp_path):
    text = write_alist(code512)
    assert parse_alist(text) == code512
    assert write_alist(parse_alist(text)) == text
    path = tmp_path / "c.alist"
    save_alist(code512, path)
    assert load_alist(path) == code512


TOY_ALIST = """3 2
2 2
1 2 1
2 2
1 0
1 2
2 0
1 2
2 3
"""


def test_alist_hand_written(toy_graph):
    assert parse_alist(TOY_ALIST) == toy_graph
    assert write_alist(toy_graph) == TOY_ALIST


def test_alist_out_of_range_index():
    bad = TOY_ALIST.replace("2 3\n", "2 4\n")
    with pytest.raises(AlistParseError) as err:
        parse_alist(bad)
    assert err.value.lineno == 9
    assert "line 9" in str(err.value)


@pytest.mark.parametrize("text", [
    "",
    "3\n",
    "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n",
    TOY_ALIST.replace("1 2 1\n", "1 1 1\n"),
    TOY_ALIST.replace("2 3\n", "1 3\n"),
    TOY_ALIST + "7\n",
    TOY_ALIST.replace("2 2\n1 0", "2 x\n1 0"),
])
def test_alist_malformed(text):
    with pytest.raises(AlistParseError):
        parse_alist(text)


def test_edge_csv(toy_graph):
    assert toy_graph.to_edge_csv().splitlines() == ["check_id,var_id", "0,0", "0,1", "1,1", "1,2"]


def test_graph_rejects_repeated_edge():
    with pytest.raises(InvalidSpecError):
        TannerGraph(3, [[0, 0, 1]])


def test_graph_pickles(code96):
    import pickle
    assert pickle.loads(pickle.dumps(code96)) == code96
