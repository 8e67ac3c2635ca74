import pytest
from hypothesis import given, strategies as st

from maoi_edge.energy import (
    avg_energy_rate,
    computation_energy,
    sensing_energy,
    total_energy,
    transmission_energy,
)
from maoi_edge.radio import transmission_time
from maoi_edge.system_model import DeviceProfile, SystemConfig


class TestSensingEnergy:
    def test_reference_breakdown(self, profile):
        # image 5mJ + 15pJ * 150528 px, audio (8mW + 2.56mW)*2s, radar 50mW*3s
        e_img = 5e-3 + 15e-12 * 224 * 224 * 3
        e_aud = (8e-3 + 1e-8 * 16_000 * 16 * 1) * 2.0
        e_sig = 50e-3 * 3.0
        assert e_img == pytest.approx(5.00226e-3, rel=1e-5)
        assert e_aud == pytest.approx(21.12e-3)
        assert e_sig == pytest.approx(150e-3)
        assert sensing_energy(profile) == pytest.approx(e_img + e_aud + e_sig)


class TestComputationEnergy:
    def test_reference_total(self, profile, config):
        # 1e-9 J/FLOP * (4 + 10 + 0.648) GFLOP
        assert computation_energy(profile, config) == pytest.approx(14.648)

    def test_zero_coefficient(self, profile):
        cfg = SystemConfig(energy_per_flop=1e-30)
        assert computation_energy(profile, cfg) == pytest.approx(0.0, abs=1e-15)

    def test_linearity_in_image_area(self, config):
        base = computation_energy(DeviceProfile(id=0), config)
        double = computation_energy(DeviceProfile(id=0, img_height=448), config)
        expected_delta = config.energy_per_flop * config.resnet_base_flops
        assert double - base == pytest.approx(expected_delta)


class TestBranchEnergies:
    def test_transmission_energy_is_power_times_time(self, profile, config):
        t = transmission_time(0, [profile], config, [1])
        assert transmission_energy(0, [profile], config, [1]) == \
            pytest.approx(0.1 * t)

    def test_total_energy_local_branch(self, profile, config):
        e = total_energy(0, [profile], config, [0])
        assert e == pytest.approx(sensing_energy(profile) + 14.648)
        assert e == pytest.approx(14.824, rel=1e-4)

    def test_total_energy_offload_branch(self, profile, config):
        e = total_energy(0, [profile], config, [1])
        assert e == pytest.approx(sensing_energy(profile)
                                  + transmission_energy(0, [profile], config, [1]))
        assert e == pytest.approx(0.18427, rel=1e-3)

    def test_interferer_raises_offload_energy(self, config, two_profiles):
        alone = total_energy(0, two_profiles, config, [1, 0])
        jammed = total_energy(0, two_profiles, config, [1, 1])
        assert jammed > alone

    def test_local_branch_ignores_others(self, config, two_profiles):
        assert total_energy(0, two_profiles, config, [0, 0]) == \
            total_energy(0, two_profiles, config, [0, 1])


class TestAvgEnergyRate:
    def test_division_by_interval(self, profile, config):
        e = total_energy(0, [profile], config, [0])
        assert avg_energy_rate(0, [profile], config, [0], e) == pytest.approx(1.0)

    def test_infeasible_at_minimum_interval(self, profile, config):
        rate = avg_energy_rate(0, [profile], config, [0], config.tau_min)
        assert rate == pytest.approx(7.412, rel=1e-3)
        assert rate > profile.energy_budget

    def test_interval_must_be_positive(self, profile, config):
        with pytest.raises(ValueError):
            avg_energy_rate(0, [profile], config, [0], 0.0)

    @given(tau=st.floats(0.5, 50.0))
    def test_decreasing_and_convex_in_tau(self, tau):
        profile = DeviceProfile(id=0)
        config = SystemConfig()
        h = 0.1
        lo = avg_energy_rate(0, [profile], config, [0], tau)
        mid = avg_energy_rate(0, [profile], config, [0], tau + h)
        hi = avg_energy_rate(0, [profile], config, [0], tau + 2 * h)
        assert mid < lo
        assert lo + hi > 2 * mid  # midpoint convexity
