import numpy as np
import pytest

from magnon_hybrid import (
    BranchSet,
    HybridModel,
    InstabilityError,
    InvalidArgumentError,
    MagnonMode,
    ResourceLimitError,
    build_n4,
    build_n8,
    dynamical_matrix,
    eigen_full,
    eigen_rwa,
    fock_oracle,
    min_gap,
    sweep,
    two_mode_exact,
)

# frozen quartic roots for omega_c = omega_m = 13.65 GHz, g = 1.84 GHz
TWO_MODE_RESONANT = np.array([11.665783299890325, 15.380328344999661])
RESONANT_GAP = 3.714545045109336         # full model
RESONANT_GAP_RWA = 3.68                  # exactly 2 g
FULL_MINUS_RWA_GAP = 0.03454504510933587


def two_mode(omega_c=13.65, omega_m=13.65, g=1.84):
    return HybridModel(
        photon_freq_ghz=[omega_c], photon_coupling_ghz=[[0.0]],
        magnon_freq_ghz=omega_m, magnon_coupling_ghz=[g],
        photon_linewidth_ghz=[0.0])


def random_stable_model(rng, n_max_modes=3, g_frac=0.15):
    while True:
        n = int(rng.integers(1, n_max_modes + 1))
        freqs = rng.uniform(8.0, 15.0, n)
        omega_m = rng.uniform(8.0, 15.0)
        wmin = min(freqs.min(), omega_m)
        g = rng.uniform(0.02, 1.0, n) * g_frac * wmin
        coup = np.zeros((n, n))
        if n > 1 and rng.random() < 0.5:
            i, j = sorted(rng.choice(n, 2, replace=False))
            coup[i, j] = coup[j, i] = rng.uniform(0.0, 0.05) * wmin
        model = HybridModel(photon_freq_ghz=freqs, photon_coupling_ghz=coup,
                            magnon_freq_ghz=omega_m, magnon_coupling_ghz=g,
                            photon_linewidth_ghz=np.zeros(n))
        try:
            eigen_full(model)
        except InstabilityError:
            continue
        return model


class TestBuilders:
    def test_n4_topology(self):
        m = build_n4(13.65, 0.155, 1.84, 12.0)
        assert m.magnon_coupling_ghz[1] == 0.0
        assert m.magnon_coupling_ghz[0] == 1.84
        assert m.photon_coupling_ghz[0, 1] == 0.155
        np.testing.assert_array_equal(m.photon_freq_ghz, [13.65, 13.65])

    def test_n8_topology(self):
        m = build_n8(11.20, 12.20, 13.65, 0.59, 0.73, 0.685, 12.0)
        assert np.count_nonzero(m.photon_coupling_ghz) == 0
        np.testing.assert_array_equal(m.magnon_coupling_ghz, [0.59, 0.73, 0.685])

    @pytest.mark.parametrize("args", [(-13.65, 0.1, 1.0, 12.0), (13.65, 0.1, 1.0, 0.0)])
    def test_nonpositive_frequency_rejected(self, args):
        with pytest.raises(InvalidArgumentError):
            build_n4(*args)

    def test_model_json_round_trip(self):
        m = build_n8(11.20, 12.20, 13.65, 0.59, 0.73, 0.685, 12.0,
                     photon_linewidth_ghz=(0.036, 0.015, 0.016),
                     magnon_linewidth_ghz=0.001)
        clone = HybridModel.from_dict(m.to_dict())
        np.testing.assert_array_equal(clone.magnon_coupling_ghz, m.magnon_coupling_ghz)
        assert clone.magnon_linewidth_ghz == m.magnon_linewidth_ghz


class TestEigenFull:
    def test_two_mode_resonant_closed_form(self):
        ps = eigen_full(two_mode())
        oracle = two_mode_exact(13.65, 13.65, 1.84)
        np.testing.assert_allclose(oracle, TWO_MODE_RESONANT, rtol=1e-12)
        np.testing.assert_allclose(ps.frequencies_ghz, oracle, rtol=1e-9)
        gap = ps.frequencies_ghz[1] - ps.frequencies_ghz[0]
        assert gap == pytest.approx(RESONANT_GAP, rel=1e-9)

    def test_decoupling_limit(self):
        ps = eigen_full(two_mode(13.65, 9.0, 1e-14))
        np.testing.assert_allclose(ps.frequencies_ghz, [9.0, 13.65], rtol=1e-12)

    def test_fully_decoupled_n4(self):
        m = build_n4(13.65, 0.0, 0.0, 9.0)
        ps = eigen_full(m)
        np.testing.assert_allclose(ps.frequencies_ghz, [9.0, 13.65, 13.65], rtol=1e-12)
        # magnon branch is pure magnon
        assert ps.fractions[0, -1] == pytest.approx(1.0, abs=1e-12)

    def test_decoupled_magnon_branch_stays_bare(self):
        m = build_n4(13.65, 0.155, 0.0, 9.5)
        ps = eigen_full(m)
        assert np.min(np.abs(ps.frequencies_ghz - 9.5)) < 1e-12

    def test_instability_two_mode_criterion(self):
        with pytest.raises(InstabilityError) as err:
            eigen_full(two_mode(13.65, 0.5, 1.84))
        assert err.value.offending_pairs == (0,)
        assert err.value.min_eigenvalue < 0.0

    def test_instability_boundary_matches_two_mode_formula(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            wc, wm = rng.uniform(1.0, 20.0, 2)
            g = rng.uniform(0.0, 0.8) * np.sqrt(wc * wm)
            margin = wc * wm - 4.0 * g * g
            if abs(margin) < 1e-6 * wc * wm:
                continue
            model = two_mode(wc, wm, g)
            if margin > 0:
                eigen_full(model)
            else:
                with pytest.raises(InstabilityError):
                    eigen_full(model)

    def test_closed_form_equivalence_bulk(self):
        rng = np.random.default_rng(11)
        count = 0
        while count < 10_000:
            wc, wm = rng.uniform(2.0, 20.0, 2)
            g = rng.uniform(0.0, 0.45) * np.sqrt(wc * wm)
            if wc * wm <= 4.0 * g * g * 1.0001:
                continue
            count += 1
            ps = eigen_full(two_mode(wc, wm, g))
            np.testing.assert_allclose(
                ps.frequencies_ghz, two_mode_exact(wc, wm, g), rtol=1e-9)

    def test_fraction_rows_normalised(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            ps = eigen_full(random_stable_model(rng))
            assert np.all(ps.fractions >= 0.0)
            np.testing.assert_allclose(ps.fractions.sum(axis=1), 1.0, atol=1e-9)

    def test_symplectic_pairing(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            model = random_stable_model(rng)
            evals = np.linalg.eigvals(dynamical_matrix(model))
            evals = np.sort(evals.real)
            n = model.n_modes
            np.testing.assert_allclose(evals[:n][::-1], -evals[n:],
                                       rtol=1e-10, atol=1e-12)

    def test_degenerate_tiebreak_magnon_first(self):
        # fully decoupled, magnon exactly at the photon frequency: the
        # magnon-dominated branch must come first among the tied pair
        m = two_mode(13.65, 13.65, 0.0)
        ps = eigen_full(m)
        assert ps.fractions[0, -1] == pytest.approx(1.0, abs=1e-12)
        assert ps.fractions[1, -1] == pytest.approx(0.0, abs=1e-12)

    def test_dynamical_fallback_agrees_with_cholesky_route(self):
        # the near-singular fallback must reproduce the primary route on
        # well-conditioned problems (frequencies, fractions, ordering)
        from magnon_hybrid.hamiltonian import _dynamical_fallback, _stacks
        rng = np.random.default_rng(17)
        for _ in range(10):
            model = random_stable_model(rng)
            ps = eigen_full(model)
            mmat, _, _ = _stacks(model.photon_freq_ghz, model.coupling_matrix(),
                                 [model.magnon_freq_ghz])
            freqs, fracs = _dynamical_fallback(mmat[0])
            np.testing.assert_allclose(freqs, ps.frequencies_ghz, rtol=1e-9)
            np.testing.assert_allclose(
                np.sort(fracs, axis=None), np.sort(ps.fractions, axis=None),
                atol=1e-8)

    def test_dynamical_fallback_flags_unstable(self):
        from magnon_hybrid.hamiltonian import _dynamical_fallback, _stacks
        model = two_mode(13.65, 0.5, 1.84)
        mmat, _, _ = _stacks(model.photon_freq_ghz, model.coupling_matrix(),
                             [model.magnon_freq_ghz])
        with pytest.raises(InstabilityError):
            _dynamical_fallback(mmat[0])


class TestEigenRwa:
    def test_resonant_gap_is_two_g(self):
        ps = eigen_rwa(two_mode())
        gap = ps.frequencies_ghz[1] - ps.frequencies_ghz[0]
        assert gap == pytest.approx(RESONANT_GAP_RWA, rel=1e-12)

    def test_full_vs_rwa_resonant_difference(self):
        full = eigen_full(two_mode()).frequencies_ghz
        rwa = eigen_rwa(two_mode()).frequencies_ghz
        diff = (full[1] - full[0]) - (rwa[1] - rwa[0])
        assert diff == pytest.approx(FULL_MINUS_RWA_GAP, rel=1e-9)
        assert diff / RESONANT_GAP_RWA == pytest.approx(0.0094, abs=4e-4)

    def test_matches_full_at_zero_coupling(self):
        m = build_n4(13.65, 0.0, 0.0, 9.0)
        np.testing.assert_allclose(eigen_rwa(m).frequencies_ghz,
                                   eigen_full(m).frequencies_ghz, rtol=1e-12)

    def test_bloch_siegert_scaling_bound(self):
        rng = np.random.default_rng(9)
        for _ in range(60):
            wc, wm = rng.uniform(5.0, 20.0, 2)
            x = rng.uniform(1e-4, 0.05)
            w = min(wc, wm)
            model = two_mode(wc, wm, x * w)
            full = eigen_full(model).frequencies_ghz
            rwa = eigen_rwa(model).frequencies_ghz
            rel = np.abs(full - rwa) / w
            assert np.all(rel < 3.0 * x * x + 1e-9)


class TestFockOracle:
    def test_decoupled_transitions_exact(self):
        m = build_n4(13.65, 0.0, 0.0, 9.0)
        tr = fock_oracle(m, 5)
        np.testing.assert_allclose(np.sort(tr), [9.0, 13.65, 13.65], rtol=1e-12)

    def test_two_mode_reference_case(self):
        tr = fock_oracle(two_mode(), 14)
        np.testing.assert_allclose(tr, TWO_MODE_RESONANT, atol=1e-3)

    def test_truncation_error_shrinks(self):
        model = two_mode(13.65, 12.0, 2.4)   # strong enough to see truncation
        exact = eigen_full(model).frequencies_ghz
        errs = [np.abs(fock_oracle(model, n) - exact).max() for n in (4, 8, 16)]
        assert errs[0] >= errs[1] >= errs[2]

    def test_n_max_minimum(self):
        with pytest.raises(InvalidArgumentError):
            fock_oracle(two_mode(), 3)

    def test_resource_limit(self):
        m = build_n8(11.2, 12.2, 13.65, 0.1, 0.1, 0.1, 9.0)
        with pytest.raises(ResourceLimitError):
            fock_oracle(m, 40)      # 41**4 > 1e6

    def test_oracle_equivalence_sample(self):
        rng = np.random.default_rng(42)
        for _ in range(8):
            model = random_stable_model(rng, n_max_modes=2)
            full = eigen_full(model).frequencies_ghz
            tr = fock_oracle(model, 14)
            assert np.abs(tr - full).max() < 2e-3


class TestSweep:
    def doublet_sweep(self, n_field=101):
        model = build_n4(13.65, 0.155, 1.84, 12.0,
                         photon_linewidth_ghz=(0.014, 0.022),
                         magnon_linewidth_ghz=0.001)
        mag = MagnonMode(28.0, 0.0, 0.001)
        return sweep(model, mag, np.linspace(0.30, 0.65, n_field))

    def test_branch_count_everywhere(self):
        br = self.doublet_sweep()
        assert br.n_branches == 3
        assert all(p.n_branches == 3 for p in br.polaritons)
        assert br.stable_mask.all()

    def test_uncoupled_branch_stays_flat(self):
        br = self.doublet_sweep()
        mid = br.branch_frequencies()[:, 1]
        assert np.abs(mid - 13.65).max() < 0.155

    def test_photon_branch_asymptotes(self):
        # far detuning (>10 g) leaves the photon branch nearly pure
        model = build_n4(13.65, 0.02, 0.12, 12.0)
        mag = MagnonMode(28.0, 0.0, 0.0)
        br = sweep(model, mag, np.array([0.4, 0.4875, 0.55]))
        frac = br.magnon_fractions()
        # at 0.4 T the magnon sits 2.45 GHz (> 10 g) below the cavity
        photon_branches = np.argsort(frac[0])[:2]
        assert np.all(frac[0][photon_branches] < 0.05)

    def test_unstable_points_flagged_not_dropped(self):
        model = build_n4(13.65, 0.155, 1.84, 12.0)
        mag = MagnonMode(28.0, 0.0, 0.001)
        fields = np.linspace(0.005, 0.1, 30)
        br = sweep(model, mag, fields)
        mask = br.stable_mask
        assert (~mask).sum() > 0 and mask.sum() > 0
        assert len(br.polaritons) == fields.size
        unstable = br.branch_frequencies()[~mask]
        assert np.isnan(unstable).all()
        # stability boundary is near the two-mode estimate 4 g^2 / (omega_c gyro)
        first = fields[mask.argmax()]
        assert first == pytest.approx(4 * 1.84 ** 2 / 13.65 / 28.0, rel=0.15)

    def test_zero_magnon_frequency_point_flagged(self):
        model = build_n4(13.65, 0.155, 1.84, 12.0)
        mag = MagnonMode(28.0, 0.5, 0.0)
        br = sweep(model, mag, np.array([0.5, 0.7]))
        assert not br.polaritons[0].stable
        assert br.polaritons[1].stable

    def test_workers_do_not_change_results(self):
        model = build_n4(13.65, 0.155, 1.84, 12.0)
        mag = MagnonMode(28.0, 0.0, 0.001)
        fields = np.linspace(0.3, 0.6, 37)
        a = sweep(model, mag, fields, workers=1).branch_frequencies()
        b = sweep(model, mag, fields, workers=4).branch_frequencies()
        np.testing.assert_array_equal(a, b)

    def test_grid_validation(self):
        model = build_n4(13.65, 0.155, 1.84, 12.0)
        mag = MagnonMode(28.0, 0.0, 0.001)
        with pytest.raises(InvalidArgumentError):
            sweep(model, mag, np.array([]))
        with pytest.raises(InvalidArgumentError):
            sweep(model, mag, np.array([0.5, 0.4]))

    def test_branch_csv_round_trip(self, tmp_path):
        br = self.doublet_sweep(n_field=11)
        path = tmp_path / "branches.csv"
        br.to_csv(path)
        header = path.read_text().splitlines()[0]
        assert header == "field_t,branch_index,freq_ghz,magnon_fraction,stable"
        assert len(path.read_text().splitlines()) == 1 + 11 * 3


class TestMinGap:
    def test_two_mode_alc_gap(self):
        model = two_mode(13.65, 12.0, 1.84)
        mag = MagnonMode(28.0, 0.0, 0.001)
        br = sweep(model, mag, np.linspace(0.40, 0.58, 721))
        gap, field = min_gap(br, 0, 1)
        assert gap == pytest.approx(RESONANT_GAP, rel=1e-4)
        assert field == pytest.approx(0.4875, abs=2e-3)

    def test_gap_stable_under_refinement(self):
        model = two_mode(13.65, 12.0, 1.84)
        mag = MagnonMode(28.0, 0.0, 0.001)
        coarse = min_gap(sweep(model, mag, np.linspace(0.40, 0.58, 181)), 0, 1)[0]
        fine = min_gap(sweep(model, mag, np.linspace(0.40, 0.58, 1441)), 0, 1)[0]
        assert abs(coarse - fine) < 1e-4

    def test_decoupled_gap_is_bare_separation(self):
        model = build_n4(13.65, 0.0, 0.0, 9.0)
        mag = MagnonMode(28.0, 0.0, 0.0)
        br = sweep(model, mag, np.linspace(0.2, 0.3, 21))
        gap, _ = min_gap(br, 1, 2)
        assert gap == pytest.approx(0.0, abs=1e-12)   # degenerate doublet
        gap01, _ = min_gap(br, 0, 1)
        assert gap01 == pytest.approx(13.65 - 28.0 * 0.3, rel=1e-12)

    def test_bad_indices(self):
        model = two_mode()
        mag = MagnonMode(28.0, 0.0, 0.0)
        br = sweep(model, mag, np.linspace(0.4, 0.5, 5))
        with pytest.raises(InvalidArgumentError):
            min_gap(br, 0, 7)


class TestTypes:
    def test_branchset_needs_consistent_counts(self):
        ps2 = eigen_full(two_mode())
        ps3 = eigen_full(build_n4(13.65, 0.1, 1.0, 12.0))
        with pytest.raises(InvalidArgumentError):
            BranchSet(np.array([0.1, 0.2]), (ps2, ps3))

    def test_model_invariants(self):
        with pytest.raises(InvalidArgumentError):
            HybridModel(photon_freq_ghz=[13.0], photon_coupling_ghz=[[0.1]],
                        magnon_freq_ghz=9.0, magnon_coupling_ghz=[0.1],
                        photon_linewidth_ghz=[0.0])
        with pytest.raises(InvalidArgumentError):
            HybridModel(photon_freq_ghz=[13.0, 12.0],
                        photon_coupling_ghz=[[0.0, 0.3], [0.2, 0.0]],
                        magnon_freq_ghz=9.0, magnon_coupling_ghz=[0.1, 0.1],
                        photon_linewidth_ghz=[0.0, 0.0])
        with pytest.raises(InvalidArgumentError):
            HybridModel(photon_freq_ghz=[13.0], photon_coupling_ghz=[[0.0]],
                        magnon_freq_ghz=9.0, magnon_coupling_ghz=[0.1],
                        photon_linewidth_ghz=[-0.1])
