import numpy as np
import pytest

from gridquant.graph import all_edges, complete_incidence, laplacian_from_weights, num_edges
from gridquant.lcpf import (
    PowerFactorModel,
    equivalent_impedance,
    ground_truth_parameters,
    scaled_impedance,
    voltages_from_injections,
)
from gridquant.quantizer import QuantizerConfig
from gridquant.sensing import (
    SensingOperator,
    VoltageData,
    build_sensing_operator,
    generate_measurements,
)
from test_lcpf import random_feeder


def random_operator(n, s, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    return SensingOperator(data=scale * rng.standard_normal((n, s)))


def reduced_laplacian(w):
    return laplacian_from_weights(w)[1:, 1:]


class TestVoltageData:
    def test_from_voltages_builds_deviations(self):
        V = np.array([[1.01, 0.99], [0.95, 0.97]])
        vd = VoltageData.from_voltages(V)
        assert np.allclose(vd.U, V - 1.0, atol=1e-15)
        assert (vd.n, vd.s) == (2, 2)

    def test_inconsistent_deviations_rejected(self):
        with pytest.raises(ValueError):
            VoltageData(V=np.ones((2, 2)), U=np.ones((2, 2)))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            VoltageData(V=np.ones((2, 2)), U=np.zeros((2, 3)))


class TestOperatorConstruction:
    def test_single_edge_single_sample(self):
        # n=1: the reduced incidence vector of edge (0,1) is [-1]
        op = SensingOperator(data=np.array([[0.7]]))
        assert op.materialize().tolist() == [[0.7]]
        assert op.apply(np.array([2.0])).tolist() == [1.4]

    def test_zero_deviations_give_zero_operator(self):
        op = SensingOperator(data=np.zeros((4, 3)))
        assert not op.materialize().any()
        assert not op.apply(np.ones(op.d)).any()

    def test_materialized_columns_are_kron_products(self):
        op = random_operator(3, 4, 11)
        A = op.materialize()
        inc = complete_incidence(3, drop_slack=True).astype(float)
        for k in range(op.d):
            c = inc[k]
            col = np.kron(op.data.T @ c, c)
            assert np.allclose(A[:, k], col, atol=1e-14)

    def test_build_checks_row_count(self):
        vd = VoltageData.from_voltages(np.ones((3, 2)))
        with pytest.raises(ValueError):
            build_sensing_operator(vd, n=4)

    def test_raw_voltage_variant_differs(self):
        vd = VoltageData.from_voltages(1.0 + 0.01 * np.random.default_rng(0).standard_normal((4, 5)))
        op_dev = build_sensing_operator(vd, 4)
        op_raw = build_sensing_operator(vd, 4, use_raw_voltages=True)
        assert not np.allclose(op_dev.materialize(), op_raw.materialize())


class TestOperatorIdentity:
    def test_apply_equals_materialized_on_random_instances(self):
        rng = np.random.default_rng(99)
        for _ in range(25):
            n = int(rng.integers(1, 11))
            s = int(rng.integers(1, 11))
            op = random_operator(n, s, int(rng.integers(0, 2**31)))
            w = rng.standard_normal(op.d)
            assert np.max(np.abs(op.materialize() @ w - op.apply(w))) <= 1e-12

    def test_apply_is_reduced_laplacian_action(self):
        rng = np.random.default_rng(3)
        op = random_operator(4, 3, 17)
        w = rng.standard_normal(op.d)
        expected = (reduced_laplacian(w) @ op.data).T.reshape(-1)
        assert np.allclose(op.apply(w), expected, atol=1e-13)

    def test_additivity(self, rng):
        op = random_operator(5, 4, 23)
        w1, w2 = rng.standard_normal(op.d), rng.standard_normal(op.d)
        assert np.max(np.abs(op.apply(w1 + w2) - op.apply(w1) - op.apply(w2))) <= 1e-12

    def test_row_support_matches_incidence(self):
        # row (t, i) can only involve edges incident to node i
        op = random_operator(5, 2, 31)
        A = op.materialize()
        edges = all_edges(5)
        for i in range(1, 6):
            off_node = [k for k, (a, b) in enumerate(edges) if i not in (a, b)]
            rows = [t * 5 + (i - 1) for t in range(2)]
            assert np.max(np.abs(A[np.ix_(rows, off_node)])) == 0.0

    def test_exact_flow_data_recovers_injections(self):
        # voltages from the linear model make A w_star reproduce the injections
        feeder = random_feeder(6, 2)
        pf = PowerFactorModel(0.9, 1)
        z = scaled_impedance(feeder, pf)
        Z = equivalent_impedance(feeder.tree, z)
        w_star = ground_truth_parameters(feeder.tree, z)
        rng = np.random.default_rng(8)
        P = -0.02 * rng.uniform(0.5, 1.5, (6, 7))
        V = voltages_from_injections(Z, P)
        op = build_sensing_operator(VoltageData.from_voltages(V), 6)
        assert np.max(np.abs(op.apply(w_star) - P.T.reshape(-1))) < 1e-8


class TestAdjoint:
    def test_zero_residual_maps_to_zero(self):
        op = random_operator(4, 3, 5)
        assert not op.apply_adjoint(np.zeros(12)).any()

    def test_adjoint_identity_randomized(self):
        rng = np.random.default_rng(1234)
        for _ in range(100):
            n = int(rng.integers(1, 8))
            s = int(rng.integers(1, 8))
            op = random_operator(n, s, int(rng.integers(0, 2**31)))
            w = rng.standard_normal(op.d)
            r = rng.standard_normal(s * n)
            assert abs(op.apply(w) @ r - w @ op.apply_adjoint(r)) <= 1e-10 * max(
                1.0, abs(w @ op.apply_adjoint(r))
            )

    def test_matches_materialized_transpose(self, rng):
        op = random_operator(6, 8, 77)
        r = rng.standard_normal(48)
        assert np.max(np.abs(op.apply_adjoint(r) - op.materialize().T @ r)) <= 1e-12

    def test_shape_validation(self):
        op = random_operator(3, 2, 0)
        with pytest.raises(ValueError):
            op.apply_adjoint(np.zeros(7))
        with pytest.raises(ValueError):
            op.apply(np.zeros(5))


class TestGram:
    def test_matches_dense_gram(self):
        for seed in (0, 1, 2):
            op = random_operator(6, 9, seed)
            A = op.materialize()
            assert np.max(np.abs(op.gram - A.T @ A)) < 1e-10


class TestOperatorNorm:
    def test_rank_one_norm(self):
        op = SensingOperator(data=np.array([[2.0, 1.0]]))  # single column a of length 2
        a = op.materialize()[:, 0]
        assert op.operator_norm_sq() == pytest.approx(float(a @ a), rel=1e-6)

    def test_agrees_with_dense_svd(self):
        op = random_operator(5, 6, 42)
        sigma_max = np.linalg.svd(op.materialize(), compute_uv=False)[0]
        assert op.operator_norm_sq(tol=1e-8) == pytest.approx(sigma_max**2, rel=1e-6)

    def test_zero_operator(self):
        op = SensingOperator(data=np.zeros((3, 2)))
        assert op.operator_norm_sq() == 0.0

    def test_rejects_bad_tolerance(self):
        op = random_operator(3, 3, 1)
        with pytest.raises(ValueError):
            op.operator_norm_sq(tol=-1.0)


class TestGenerateMeasurements:
    def test_vanishing_bin_width_reproduces_clean_values(self):
        op = random_operator(4, 5, 10, scale=0.05)
        w = np.random.default_rng(2).standard_normal(op.d)
        meas = generate_measurements(op, w, QuantizerConfig(delta=1e-12, seed=3))
        assert np.max(np.abs(meas.p - op.apply(w))) <= 1e-12

    def test_entries_within_delta_of_clean(self):
        op = random_operator(4, 5, 10, scale=0.05)
        w = np.random.default_rng(2).standard_normal(op.d)
        meas = generate_measurements(op, w, QuantizerConfig(delta=0.01, seed=3))
        assert np.max(np.abs(meas.p - op.apply(w))) <= 0.01

    def test_fixed_seed_reproduces_bytes(self):
        op = random_operator(4, 5, 10)
        w = np.random.default_rng(2).standard_normal(op.d)
        cfg = QuantizerConfig(delta=0.02, seed=9)
        assert generate_measurements(op, w, cfg).p.tobytes() == generate_measurements(op, w, cfg).p.tobytes()
