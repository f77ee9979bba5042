import json
import re

import numpy as np
import pytest

from strobe_tomo import (
    LindbladModel,
    Superoperator,
    ValidationError,
    build_generator,
    evolve,
    laser_cooling_model,
    model_from_json,
    model_to_json,
    matrix_from_json,
    matrix_to_json,
    propagator,
    trace_functional_residual,
    validate_density_matrix,
    vec,
)

from helpers import laser_cooling_populations, lindblad_rhs, random_density, random_model


def golden_generator(g1: float, g2: float) -> np.ndarray:
    out = np.zeros((9, 9), dtype=complex)
    out[0, 4] = g1
    out[8, 4] = g2
    out[4, 4] = -(g1 + g2)
    for i in (1, 3, 5, 7):
        out[i, i] = -0.5 * (g1 + g2)
    return out


class TestLaserCoolingModel:
    def test_jump_positions(self):
        model = laser_cooling_model(1.0, 2.0)
        assert model.dim == 3
        assert np.array_equal(model.hamiltonian, np.zeros((3, 3)))
        (r1, e1), (r2, e2) = model.jumps
        assert (r1, r2) == (1.0, 2.0)
        expected1 = np.zeros((3, 3))
        expected1[0, 1] = 1.0
        expected2 = np.zeros((3, 3))
        expected2[2, 1] = 1.0
        assert np.array_equal(e1, expected1)
        assert np.array_equal(e2, expected2)

    def test_zero_dissipation(self):
        model = laser_cooling_model(0.0, 0.0)
        assert all(rate == 0.0 for rate, _ in model.jumps)

    def test_single_channel(self):
        model = laser_cooling_model(1.0, 0.0)
        assert model.jumps[1][0] == 0.0
        gen = build_generator(model)
        assert np.array_equal(gen.matrix, golden_generator(1.0, 0.0))

    @pytest.mark.parametrize("g1,g2", [(-1.0, 2.0), (1.0, -0.5)])
    def test_negative_rate_rejected(self, g1, g2):
        with pytest.raises(ValidationError, match="rate"):
            laser_cooling_model(g1, g2)


class TestModelValidation:
    def test_non_hermitian_hamiltonian_rejected(self):
        with pytest.raises(ValidationError, match="hermitian"):
            LindbladModel(dim=2, hamiltonian=np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_hamiltonian_shape_mismatch(self):
        with pytest.raises(ValidationError, match="shape"):
            LindbladModel(dim=3, hamiltonian=np.eye(2))

    def test_jump_shape_mismatch(self):
        with pytest.raises(ValidationError, match="jumps"):
            LindbladModel(dim=3, jumps=((1.0, np.eye(2)),))

    def test_time_dependent_hamiltonian_rejected(self):
        with pytest.raises(ValidationError, match="time-dependent"):
            LindbladModel(dim=2, hamiltonian=lambda t: np.eye(2))

    def test_none_hamiltonian_means_zero(self):
        model = LindbladModel(dim=2)
        assert np.array_equal(model.hamiltonian, np.zeros((2, 2)))


class TestBuildGenerator:
    @pytest.mark.parametrize("g1,g2", [(1.0, 2.0), (0.5, 0.5), (3.0, 0.0), (0.25, 1.75)])
    def test_matches_golden_matrix_exactly(self, g1, g2):
        gen = build_generator(laser_cooling_model(g1, g2))
        assert gen.dim == 3
        assert gen.convention == "row-stacking"
        assert np.array_equal(gen.matrix, golden_generator(g1, g2))

    def test_commutator_action(self):
        # oracle: -i[H, rho] evaluated directly
        model = LindbladModel(dim=2, hamiltonian=np.diag([1.0, -1.0]))
        gen = build_generator(model)
        coherence = np.zeros((2, 2), dtype=complex)
        coherence[0, 1] = 1.0
        out = gen.matrix @ vec(coherence)
        assert np.abs(out - (-2j) * vec(coherence)).max() <= 1e-14

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_matches_direct_rhs(self, n):
        # oracle: the master-equation right-hand side applied entrywise
        rng = np.random.default_rng(n * 7)
        for _ in range(5):
            model = random_model(n, rng)
            gen = build_generator(model)
            rho = random_density(n, rng)
            direct = lindblad_rhs(model, rho)
            lifted = (gen.matrix @ vec(rho)).reshape(n, n)
            assert np.abs(direct - lifted).max() <= 1e-12 * max(1.0, np.abs(direct).max())

    def test_all_zero_model(self):
        gen = build_generator(LindbladModel(dim=3))
        assert np.array_equal(gen.matrix, np.zeros((9, 9)))

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_annihilates_trace_functional(self, n):
        rng = np.random.default_rng(100 + n)
        for _ in range(20):
            gen = build_generator(random_model(n, rng))
            assert trace_functional_residual(gen) <= 1e-10


class TestSuperoperator:
    def test_shape_checked(self):
        with pytest.raises(ValidationError, match="shape"):
            Superoperator(dim=3, matrix=np.eye(4))

    def test_convention_checked(self):
        with pytest.raises(ValidationError, match="convention"):
            Superoperator(dim=2, matrix=np.eye(4), convention="column-stacking")

    def test_synthetic_injection_allowed(self):
        # trace-functional residual is only enforced for built generators
        sup = Superoperator(dim=3, matrix=np.diag(np.arange(0.0, -9.0, -1.0)))
        assert trace_functional_residual(sup) > 0


class TestEvolve:
    def test_time_zero_is_identity(self):
        gen = build_generator(laser_cooling_model(1.0, 2.0))
        rho = random_density(3, np.random.default_rng(1))
        assert np.abs(evolve(gen, rho, 0.0) - rho).max() <= 1e-13

    def test_closed_form_populations(self):
        # oracle: analytic rate-equation solution from the |2><2| start
        gen = build_generator(laser_cooling_model(1.0, 2.0))
        rho0 = np.diag([0.0, 1.0, 0.0]).astype(complex)
        for t in np.linspace(0.05, 2.0, 20):
            expected = laser_cooling_populations(1.0, 2.0, t)
            assert np.abs(evolve(gen, rho0, t) - expected).max() <= 1e-10

    def test_long_time_limit(self):
        g1, g2 = 1.0, 2.0
        s = g1 + g2
        gen = build_generator(laser_cooling_model(g1, g2))
        rho0 = np.diag([0.0, 1.0, 0.0]).astype(complex)
        out = evolve(gen, rho0, 100.0 / s)
        assert np.abs(out - np.diag([g1 / s, 0.0, g2 / s])).max() <= 1e-10

    def test_negative_time_rejected(self):
        gen = build_generator(laser_cooling_model(1.0, 2.0))
        with pytest.raises(ValidationError):
            evolve(gen, np.eye(3) / 3, -0.1)

    def test_dimension_mismatch_rejected(self):
        gen = build_generator(laser_cooling_model(1.0, 2.0))
        with pytest.raises(ValidationError):
            evolve(gen, np.eye(2) / 2, 0.5)

    def test_non_density_state_rejected(self):
        gen = build_generator(laser_cooling_model(1.0, 2.0))
        with pytest.raises(ValidationError, match="trace"):
            evolve(gen, np.eye(3), 0.5)

    def test_physicality_over_random_draws(self):
        rng = np.random.default_rng(2024)
        draws = 0
        while draws < 1000:
            n = int(rng.integers(2, 5))
            model = random_model(n, rng)
            gen = build_generator(model)
            rho0 = random_density(n, rng)
            t = float(rng.uniform(0.0, 3.0))
            out = evolve(gen, rho0, t)
            assert np.abs(out - out.conj().T).max() <= 1e-10
            assert abs(np.trace(out) - 1.0) <= 1e-10
            assert np.linalg.eigvalsh((out + out.conj().T) / 2).min() >= -1e-8
            draws += 1

    def test_semigroup_composition(self):
        rng = np.random.default_rng(77)
        for _ in range(100):
            n = int(rng.integers(2, 5))
            gen = build_generator(random_model(n, rng))
            rho0 = random_density(n, rng)
            t1, t2 = rng.uniform(0.05, 1.5, size=2)
            two_steps = evolve(gen, evolve(gen, rho0, t1), t2)
            one_step = evolve(gen, rho0, t1 + t2)
            assert np.abs(two_steps - one_step).max() <= 1e-9

    def test_unitary_case_conserves_purity(self):
        rng = np.random.default_rng(5)
        for n in (2, 3, 4):
            ham = (lambda g: (g + g.conj().T) / 2)(
                rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            )
            gen = build_generator(LindbladModel(dim=n, hamiltonian=ham))
            rho0 = random_density(n, rng)
            purity0 = np.trace(rho0 @ rho0).real
            for t in (0.3, 1.0, 2.5):
                out = evolve(gen, rho0, t)
                assert abs(np.trace(out @ out).real - purity0) <= 1e-10

    def test_propagator_rejects_negative_time(self):
        gen = build_generator(laser_cooling_model(1.0, 2.0))
        with pytest.raises(ValidationError):
            propagator(gen, -1.0)


class TestDensityValidation:
    def test_accepts_valid(self):
        rho = random_density(3, np.random.default_rng(0))
        out = validate_density_matrix(rho)
        assert np.array_equal(out, rho)

    def test_rejects_non_hermitian(self):
        bad = np.array([[0.5, 0.5], [0.0, 0.5]])
        with pytest.raises(ValidationError, match="hermitian"):
            validate_density_matrix(bad)

    def test_rejects_wrong_trace(self):
        with pytest.raises(ValidationError, match="trace"):
            validate_density_matrix(np.eye(2))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(ValidationError, match="eigenvalue"):
            validate_density_matrix(np.diag([1.5, -0.5]))


class TestModelJson:
    def test_roundtrip(self):
        rng = np.random.default_rng(9)
        model = random_model(3, rng, max_jumps=2)
        doc = json.loads(json.dumps(model_to_json(model)))
        rebuilt = model_from_json(doc)
        assert rebuilt.dim == model.dim
        assert np.array_equal(rebuilt.hamiltonian, model.hamiltonian)
        assert len(rebuilt.jumps) == len(model.jumps)
        for (r1, m1), (r2, m2) in zip(rebuilt.jumps, model.jumps):
            assert r1 == r2
            assert np.array_equal(m1, m2)

    def test_omitted_hamiltonian_means_zero(self):
        model = model_from_json({"dim": 2, "jumps": []})
        assert np.array_equal(model.hamiltonian, np.zeros((2, 2)))

    def test_plain_numbers_accepted_as_real_entries(self):
        mat = matrix_from_json([[1, 0], [0, {"re": 0.5, "im": -0.5}]])
        assert np.array_equal(mat, np.array([[1, 0], [0, 0.5 - 0.5j]]))

    @pytest.mark.parametrize("doc,field", [
        ([], "model"),
        ({}, "dim"),
        ({"dim": 0}, "dim"),
        ({"dim": 2.5}, "dim"),
        ({"dim": 2, "jumps": [{}]}, "jumps[0]"),
        ({"dim": 2, "jumps": [{"rate": "x", "matrix": [[0]]}]}, "jumps[0].rate"),
        ({"dim": 2, "jumps": [{"rate": 1.0}]}, "jumps[0]"),
        ({"dim": 2, "hamiltonian": [[1, 2], [3]]}, "hamiltonian[1]"),
        ({"dim": 2, "hamiltonian": [[{"re": 1}, 0], [0, 0]]}, "hamiltonian[0][0]"),
    ])
    def test_errors_name_offending_field(self, doc, field):
        with pytest.raises(ValidationError, match=re.escape(field)):
            model_from_json(doc)

    def test_matrix_encoding_roundtrip(self):
        rng = np.random.default_rng(21)
        mat = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        assert np.array_equal(matrix_from_json(matrix_to_json(mat)), mat)
