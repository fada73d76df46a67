import numpy as np
import pytest

from swldpc import (
    EXPLICIT_Z,
    FOLDED_Z,
    CorrelationModel,
    SparseParityMatrix,
    build_joint_graph,
    fold_hidden,
    gallager_construct,
    hidden_llr,
    identity_matrix,
    is_cycle_free,
)

H1 = identity_matrix(2)
H2 = SparseParityMatrix.from_rows(2, ((0, 1),))
MODEL = CorrelationModel(0.9)

GOLDEN_FOLDED = (
    "V u1 0\nV u1 1\nV u2 0\nV u2 1\n"
    "C code1 0\nC code1 1\nC code2 0\n"
    "C corr 0 parity=0 param=2.1972245773362196\n"
    "C corr 1 parity=0 param=2.1972245773362196\n"
    "E 0 0\nE 0 3\nE 1 1\nE 1 4\nE 2 2\nE 2 3\nE 3 2\nE 3 4\n"
)


class TestBuild:
    def test_folded_shape(self):
        g = build_joint_graph(H1, H2, MODEL)
        assert g.form == FOLDED_Z
        assert (g.n, g.m1, g.m2) == (2, 2, 1)
        assert g.var_count == 4
        assert g.check_count == 5
        assert g.num_edges == 2 + 2 + 2 * 2
        assert g.num_code_checks == 3

    def test_explicit_shape(self):
        g = build_joint_graph(H1, H2, MODEL, form=EXPLICIT_Z)
        assert g.var_count == 6
        assert g.check_count == 5
        assert g.num_edges == 2 + 2 + 3 * 2

    def test_explicit_correlation_adjacency(self):
        h2 = gallager_construct(12, 3, 6, seed=2)
        g = build_joint_graph(identity_matrix(12), h2, MODEL, form=EXPLICIT_Z)
        for i in range(g.n):
            check = g.m1 + g.m2 + i
            attached = sorted(g.edge_var[g.edge_check == check])
            assert attached == [i, g.n + i, 2 * g.n + i]

    def test_priors(self):
        llr = hidden_llr(MODEL)
        explicit = build_joint_graph(H1, H2, MODEL, form=EXPLICIT_Z)
        assert not explicit.priors[:4].any()
        assert np.all(explicit.priors[4:] == llr)
        folded = build_joint_graph(H1, H2, MODEL)
        assert not folded.priors.any()
        assert folded.corr_param == llr

    def test_degrees(self):
        g = build_joint_graph(H1, H2, MODEL)
        assert list(g.check_degrees()) == [1, 1, 2, 2, 2]
        assert list(g.var_degrees()) == [2, 2, 2, 2]

    def test_rejects_mismatched_lengths(self):
        with pytest.raises(ValueError):
            build_joint_graph(identity_matrix(3), H2, MODEL)

    def test_rejects_unknown_form(self):
        with pytest.raises(ValueError):
            build_joint_graph(H1, H2, MODEL, form="implicit")


class TestRoles:
    def test_round_trip(self):
        g = build_joint_graph(H1, H2, MODEL, form=EXPLICIT_Z)
        assert g.var_role(0) == ("u1", 0)
        assert g.var_role(3) == ("u2", 1)
        assert g.var_role(4) == ("z", 0)
        assert g.check_role(1) == ("code1", 1)
        assert g.check_role(2) == ("code2", 0)
        assert g.check_role(4) == ("corr", 1)

    def test_out_of_range(self):
        g = build_joint_graph(H1, H2, MODEL)
        with pytest.raises(IndexError):
            g.var_role(4)  # z block absent in folded form
        with pytest.raises(IndexError):
            g.check_role(5)


class TestFold:
    def test_fold_matches_direct_build(self):
        for h2 in (H2, gallager_construct(24, 3, 6, seed=3)):
            h1 = identity_matrix(h2.n)
            explicit = build_joint_graph(h1, h2, MODEL, form=EXPLICIT_Z)
            direct = build_joint_graph(h1, h2, MODEL, form=FOLDED_Z)
            assert fold_hidden(explicit).structure_equal(direct)

    def test_fold_requires_explicit(self):
        with pytest.raises(ValueError):
            fold_hidden(build_joint_graph(H1, H2, MODEL))

    def test_structure_equal_notices_model_change(self):
        a = build_joint_graph(H1, H2, CorrelationModel(0.9))
        b = build_joint_graph(H1, H2, CorrelationModel(0.8))
        assert not a.structure_equal(b)


class TestSerialize:
    def test_golden_folded(self):
        assert build_joint_graph(H1, H2, MODEL).serialize() == GOLDEN_FOLDED

    def test_explicit_adds_z_rows(self):
        text = build_joint_graph(H1, H2, MODEL, form=EXPLICIT_Z).serialize()
        assert "V z 0\n" in text and "V z 1\n" in text
        assert text.count("E ") == 10
        # shared structure prints identically
        for line in GOLDEN_FOLDED.splitlines():
            assert line in text

    def test_serialize_is_deterministic(self):
        h2 = gallager_construct(24, 3, 6, seed=5)
        g1 = build_joint_graph(identity_matrix(24), h2, MODEL)
        g2 = build_joint_graph(identity_matrix(24), h2, MODEL)
        assert g1.serialize() == g2.serialize()


class TestCycleFree:
    def test_chain_is_a_tree(self):
        assert is_cycle_free(build_joint_graph(H1, H2, MODEL))
        assert is_cycle_free(build_joint_graph(H1, H2, MODEL, form=EXPLICIT_Z))

    def test_repeated_row_creates_a_cycle(self):
        h2 = SparseParityMatrix.from_rows(2, ((0, 1), (0, 1)))
        assert not is_cycle_free(build_joint_graph(H1, h2, MODEL))

    def test_regular_code_graph_is_loopy(self):
        h2 = gallager_construct(24, 3, 6, seed=1)
        assert not is_cycle_free(build_joint_graph(identity_matrix(24), h2, MODEL))
