import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import qmc

from medianqmc import gf2, netgen
from medianqmc.netgen import RandomizationScheme
from medianqmc.rng import ReplicateStreams

SCHEMES = [RandomizationScheme.rls(), RandomizationScheme.crd(), RandomizationScheme.shift_only()]


def streams(seed=0, rep=0):
    return ReplicateStreams.derive(seed, rep)


def test_bundled_table_shape():
    table = netgen.load_direction_numbers()
    assert len(table) == 21200
    assert table[0] == netgen.DirectionNumberEntry(2, 1, 0, (1,))
    assert table[1] == netgen.DirectionNumberEntry(3, 2, 1, (1, 3))


def test_second_dimension_m_values_by_hand():
    # x + 1 gives m_k = m_{k-1} xor 2 m_{k-1}
    entry = netgen.load_direction_numbers()[0]
    assert netgen.sobol_m_values(entry, 6) == [1, 3, 5, 15, 17, 51]
    assert netgen.sobol_m_values(None, 4) == [1, 1, 1, 1]


def test_sobol_matrix_columns_are_digit_reversed_m():
    M = netgen.sobol_matrix(netgen.load_direction_numbers()[0], 3)
    # v_1 = 0.1b, v_2 = 0.11b, v_3 = 0.101b
    assert M.to_rows() == [[1, 1, 1], [0, 1, 0], [0, 0, 1]]


def test_first_eight_points_index_order():
    net = netgen.randomize(RandomizationScheme.shift_only(), 2, 3, streams(), zero_shift=True)
    pts = netgen.generate_points(net).x.tolist()
    assert pts == [
        [0.0, 0.0], [0.5, 0.5], [0.25, 0.75], [0.75, 0.25],
        [0.125, 0.625], [0.625, 0.125], [0.375, 0.375], [0.875, 0.875],
    ]


def test_gray_order_starts_with_published_sequence():
    net = netgen.randomize(RandomizationScheme.shift_only(), 2, 3, streams(), zero_shift=True)
    idx, codes = netgen.generate_points_gray(net)
    assert idx.tolist() == [0, 1, 3, 2, 6, 7, 5, 4]
    assert netgen.codes_to_float(codes[:4]).tolist() == [[0.0, 0.0], [0.5, 0.5], [0.75, 0.25], [0.25, 0.75]]


@pytest.mark.parametrize("s,m", [(2, 4), (13, 8), (60, 10)])
def test_unscrambled_points_match_scipy(s, m):
    net = netgen.randomize(RandomizationScheme.shift_only(), s, m, streams(), zero_shift=True)
    _, codes = netgen.generate_points_gray(net)
    ref = qmc.Sobol(d=s, scramble=False).random_base2(m)
    assert (netgen.codes_to_float(codes) == ref).all()


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(1, 10), st.sampled_from(SCHEMES), st.integers(0, 2**32))
def test_gray_traversal_reorders_to_index_order(s, m, scheme, seed):
    net = netgen.randomize(scheme, s, m, streams(seed))
    idx, codes = netgen.generate_points_gray(net)
    ordered = np.empty_like(codes)
    ordered[idx.astype(np.intp)] = codes
    assert (ordered == netgen.generate_points(net).codes).all()


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(1, 9), st.integers(0, 5), st.sampled_from(SCHEMES))
def test_chunks_match_full_block(s, m, chunk, scheme):
    net = netgen.randomize(scheme, s, m, streams(7))
    parts = list(netgen.point_chunks(net, chunk))
    assert [p[0] for p in parts] == [i << min(chunk, m) for i in range(len(parts))]
    assert (np.concatenate([p[1] for p in parts]) == netgen.generate_points(net).codes).all()


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 8), st.sampled_from(SCHEMES), st.integers(0, 2**32))
def test_points_equal_matvec_per_index(s, m, scheme, seed):
    net = netgen.randomize(scheme, s, m, streams(seed))
    codes = netgen.generate_points(net).codes
    rev = lambda w: int(f"{w:064b}"[::-1], 2)
    for i in range(net.n):
        for j in range(s):
            digits = gf2.matvec(net.matrix(j), i) ^ net.shift(j)
            assert int(codes[i, j]) == rev(digits)


@pytest.mark.parametrize("scheme", [RandomizationScheme.rls(), RandomizationScheme.shift_only()])
@pytest.mark.parametrize("m", [3, 6, 9])
def test_first_two_coordinates_form_a_zero_t_net(scheme, m):
    net = netgen.randomize(scheme, 2, m, streams(3))
    x = netgen.generate_points(net).x
    for a in range(m + 1):
        cell = np.floor(x[:, 0] * 2**a) * 2 ** (m - a) + np.floor(x[:, 1] * 2 ** (m - a))
        assert np.bincount(cell.astype(int), minlength=2**m).tolist() == [1] * 2**m


@pytest.mark.parametrize("m", [4, 10])
def test_rls_keeps_base_leading_block_nonsingular(m):
    net = netgen.randomize(RandomizationScheme.rls(), 20, m, streams(1))
    for j in range(20):
        assert gf2.rank(gf2.top_block(net.matrix(j), m)) == m


def test_rls_equals_scrambler_times_base():
    s, m = 5, 7
    net = netgen.randomize(RandomizationScheme.rls(), s, m, streams(2))
    base = RandomizationScheme.rls().base_columns(s, m)
    words = ReplicateStreams.derive(2, 0).matrix.random_raw(s * m).reshape(s, m)
    for j in range(s):
        M = gf2.lower_unitriangular_from_words(words[j], 64, m)
        expect = gf2.matmul(M, gf2.BitMatrix(tuple(int(c) for c in base[j]), m))
        assert net.matrix(j).cols == expect.cols


def test_crd_respects_precision():
    net = netgen.randomize(RandomizationScheme.crd(), 4, 3, streams(), E=5)
    assert not (net.C >> np.uint64(5)).any()
    assert not (net.D >> np.uint64(5)).any()


def test_dimension_prefix_property():
    small = netgen.randomize(RandomizationScheme.rls(), 3, 6, streams(9))
    big = netgen.randomize(RandomizationScheme.rls(), 8, 6, streams(9))
    assert (big.C[:3] == small.C).all() and (big.D[:3] == small.D).all()


def test_randomize_argument_checks():
    with pytest.raises(ValueError):
        netgen.randomize(RandomizationScheme.crd(), 1, 0, streams())
    with pytest.raises(ValueError):
        netgen.randomize(RandomizationScheme.crd(), 1, 5, streams(), E=4)
    with pytest.raises(ValueError):
        RandomizationScheme("Owen")
    with pytest.raises(ValueError):
        RandomizationScheme.crd().base_columns(2, 3)


def test_points_csv_round_trip():
    net = netgen.randomize(RandomizationScheme.rls(), 3, 4, streams())
    block = netgen.generate_points(net)
    buf = io.StringIO()
    netgen.export_points_csv(block, buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == "i,j,code_hex,x_float"
    back = netgen.read_points_csv(io.StringIO(text))
    assert (back.codes == block.codes).all()


@given(st.lists(st.integers(0, 2**53 - 1), min_size=1, max_size=20))
def test_float_codes_round_trip(ns):
    x = np.array(ns, dtype=float) * 2.0**-53
    assert (netgen.codes_to_float(netgen.float_to_codes(x)) == x).all()


def test_codes_stay_below_one():
    assert netgen.codes_to_float(np.array([2**64 - 1], dtype=np.uint64))[0] < 1.0


HEADER = "d s a m_i\n"


@pytest.mark.parametrize(
    "body,needle",
    [
        ("2 1 0 2\n", "odd"),
        ("2 1 0 1 1\n", "expected 1 m values"),
        ("2 2 0 1\n", "expected 2 m values"),
        ("2 1 x 1\n", "non-integer"),
        ("2 1\n", "expected"),
        ("3 1 0 1\n", "contiguous"),
        ("2 2 2 1 3\n", "too wide"),
    ],
)
def test_parser_rejects_malformed(body, needle):
    with pytest.raises(netgen.DirectionNumberError, match=needle):
        netgen.parse_direction_numbers(io.StringIO(HEADER + body))


def test_parser_rejects_empty():
    with pytest.raises(netgen.DirectionNumberError):
        netgen.parse_direction_numbers(io.StringIO(""))


def test_env_override(tmp_path, monkeypatch):
    path = tmp_path / "tiny.txt"
    path.write_text(HEADER + "2 1 0 1\n3 2 1 1 3\n")
    monkeypatch.setenv(netgen.DIRNUMS_ENV, str(path))
    netgen.load_direction_numbers.cache_clear()
    try:
        assert len(netgen.load_direction_numbers()) == 2
    finally:
        netgen.load_direction_numbers.cache_clear()


def test_too_many_dimensions_requested():
    entries = netgen.parse_direction_numbers(io.StringIO(HEADER + "2 1 0 1\n"))
    with pytest.raises(ValueError):
        netgen.GeneratingMatrixSet.from_direction_numbers(entries, 3, 4)
