import numpy as np
import pytest

from scldlc import (ConstructionError, CouplingParams, LdlcParams,
                    ParameterError, SparseLabeledGraph, build_conventional,
                    build_randomized_coupled, build_standard_coupled,
                    expand_protograph, load_edges, validate_graph)

P7 = LdlcParams(0.8, 7)
P5 = LdlcParams(0.8, 5)


def _degree_profile_ok(g):
    report = validate_graph(g)
    assert report.ok, str(report)


# ---------------------------------------------------------------- conventional

def test_conventional_square_system():
    g = build_conventional(100, P7, seed=3)
    assert g.num_nodes == 100
    assert g.num_edges == 100 * 7
    _degree_profile_ok(g)


def test_conventional_minimum_size():
    g = build_conventional(7, P7, seed=0)
    dense = g.to_dense()
    assert (np.count_nonzero(dense, axis=0) == 7).all()
    assert (np.count_nonzero(dense, axis=1) == 7).all()
    assert ((np.abs(dense) == 1.0).sum(axis=1) == 1).all()
    _degree_profile_ok(g)


def test_conventional_determinism():
    a = build_conventional(60, P5, seed=9)
    b = build_conventional(60, P5, seed=9)
    assert (a.check_ids == b.check_ids).all()
    assert (a.var_ids == b.var_ids).all()
    assert (a.labels == b.labels).all()
    c = build_conventional(60, P5, seed=10)
    assert not (a.labels == c.labels).all()


def test_conventional_rejects_small_n():
    with pytest.raises(ParameterError):
        build_conventional(5, P7, seed=0)


# ------------------------------------------------------------------- standard

def test_standard_protograph_band_structure():
    g = build_standard_coupled(1, P5, L=18, seed=2)
    dense = g.to_dense()
    rows, cols = np.nonzero(dense)
    # column (variable) l couples to rows l..l+d-1 wrapped
    assert (((rows - cols) % 18) < 5).all()
    assert g.null_checks == frozenset(range(15, 19))
    _degree_profile_ok(g)


def test_standard_degree_profile():
    g = build_standard_coupled(4, P5, L=18, seed=5)
    assert g.num_nodes == 72
    _degree_profile_ok(g)
    dense = g.to_dense()
    assert ((np.abs(dense) == 1.0).sum(axis=0) == 1).all()
    assert ((np.abs(dense) == 1.0).sum(axis=1) == 1).all()


def test_standard_unit_labels_on_diagonal_blocks():
    g = build_standard_coupled(3, P5, L=18, seed=5)
    unit = np.abs(g.labels) == 1.0
    assert (g.check_ids[unit] // 3 == g.var_ids[unit] // 3).all()


def test_standard_rejects_short_chain():
    with pytest.raises(ParameterError):
        build_standard_coupled(4, P7, L=5, seed=0)


# ----------------------------------------------------------------- randomized

def test_randomized_valid_and_deterministic():
    c = CouplingParams.randomized(15, 2)
    g = build_randomized_coupled(50, P7, c, seed=1)
    assert g.num_nodes == 750
    _degree_profile_ok(g)
    g2 = build_randomized_coupled(50, P7, c, seed=1)
    assert (g.labels == g2.labels).all()
    assert (g.check_ids == g2.check_ids).all()


def test_randomized_k1_is_block_diagonal():
    g = build_randomized_coupled(20, P5, CouplingParams.randomized(6, 1), seed=4)
    assert (g.check_ids // 20 == g.var_ids // 20).all()
    _degree_profile_ok(g)


def test_randomized_edges_stay_in_window():
    g = build_randomized_coupled(10, P7, CouplingParams.randomized(12, 3), seed=7)
    offset = (g.check_ids // 10 - g.var_ids // 10) % 12
    assert (offset < 3).all()
    _degree_profile_ok(g)


def test_randomized_null_set():
    g = build_randomized_coupled(2, P7, CouplingParams.randomized(100, 2), seed=0)
    assert g.null_checks == frozenset({100})
    mask = g.null_check_nodes()
    assert mask.sum() == 2
    assert mask[198] and mask[199]


def test_randomized_mode_required():
    with pytest.raises(ParameterError):
        build_randomized_coupled(10, P7, CouplingParams.standard(10), seed=0)


# ----------------------------------------------------------------- protograph

def test_expand_preserves_degrees():
    proto = build_randomized_coupled(1, P5, CouplingParams.randomized(10, 2), seed=3)
    lifted = expand_protograph(proto, 8, seed=11)
    assert lifted.num_nodes == 80
    _degree_profile_ok(lifted)


def test_expand_factor_one_keeps_structure():
    proto = build_conventional(9, P5, seed=2)
    lifted = expand_protograph(proto, 1, seed=5)
    assert (lifted.check_ids == proto.check_ids).all()
    assert (lifted.var_ids == proto.var_ids).all()
    assert (np.abs(lifted.labels) == np.abs(proto.labels)).all()


def test_expand_matches_conventional_profile():
    proto = build_conventional(7, P7, seed=1)
    lifted = expand_protograph(proto, 20, seed=1)
    _degree_profile_ok(lifted)
    assert lifted.num_edges == proto.num_edges * 20


# ------------------------------------------------------------------ validator

def test_validator_flags_flipped_label():
    g = build_conventional(30, P5, seed=6)
    i = int(np.argmax(np.abs(g.labels) < 1.0))
    g.labels[i] = 1.0
    report = validate_graph(g)
    assert not report.ok
    text = str(report)
    assert "check node" in text and "variable node" in text
    assert len(report.violations) >= 2


def test_validator_flags_window_violation():
    g = build_randomized_coupled(5, P5, CouplingParams.randomized(8, 2), seed=3)
    # move one edge to a check position outside the sender's window
    vpos = int(g.var_ids[0]) // 5
    g.check_ids[0] = ((vpos + 4) % 8) * 5
    report = validate_graph(g)
    assert any("window" in v for v in report.violations)


def test_validator_flags_bad_magnitude():
    g = build_conventional(10, P5, seed=8)
    g.labels[3] = 0.5
    assert not validate_graph(g).ok


# ----------------------------------------------------------------------- io

def test_edge_list_roundtrip(tmp_path):
    g = build_randomized_coupled(6, P7, CouplingParams.randomized(9, 2), seed=13)
    path = tmp_path / "g.edges"
    g.save_edges(path)
    back = load_edges(path)
    assert (back.check_ids == g.check_ids).all()
    assert (back.var_ids == g.var_ids).all()
    assert (back.labels == g.labels).all()
    assert (back.n, back.L, back.d, back.alpha, back.K, back.mode, back.seed) == \
        (g.n, g.L, g.d, g.alpha, g.K, g.mode, g.seed)


def test_load_rejects_other_files(tmp_path):
    path = tmp_path / "junk.txt"
    path.write_text("0 1 0.5\n")
    with pytest.raises(ParameterError):
        load_edges(path)


def test_positions_are_one_based():
    g = build_randomized_coupled(4, P5, CouplingParams.randomized(6, 2), seed=0)
    assert g.var_position(0) == 1
    assert g.check_position(23) == 6
