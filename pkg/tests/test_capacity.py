from __future__ import annotations

import math

import numpy as np
import pytest

from hypcap.bie import CircularDomain, SolverConfig
from hypcap.capacity import (
    CapacityResult,
    InfeasibleError,
    capacity,
    convergence_study,
    gamma_for,
    gehring_bound,
    lr_ratio,
    single_disk_capacity,
    upper_bound_sum,
)
from hypcap.constellation import Constellation, collinear_chain, er_config
from hypcap.hypgeo import HyperbolicDisk, MobiusSelfMap


def pair() -> Constellation:
    return Constellation((HyperbolicDisk(-0.45 + 0j, 0.4), HyperbolicDisk(0.45 + 0j, 0.3)))


class TestSingleDiskCapacity:
    def test_formula(self):
        for m in (0.5, 1.0, 2.0):
            expected = 2.0 * math.pi / math.log(1.0 / math.tanh(m / 2.0))
            assert single_disk_capacity(m) == pytest.approx(expected, rel=1e-15)

    def test_monotone_in_radius(self):
        vals = [single_disk_capacity(r) for r in (0.1, 0.5, 1.0, 2.0, 5.0)]
        assert vals == sorted(vals)

    def test_invalid_radius(self):
        with pytest.raises(ValueError):
            single_disk_capacity(0.0)

    def test_bie_matches_closed_form_at_origin(self):
        got = capacity(
            Constellation((HyperbolicDisk(0j, 1.0),)), SolverConfig(n=128, alpha="auto")
        )
        assert got.cap == pytest.approx(single_disk_capacity(1.0), abs=1e-12)

    def test_bie_matches_closed_form_off_center(self):
        c = Constellation((HyperbolicDisk(0.3 + 0.4j, 1.0),))
        got = capacity(c, SolverConfig(n=256))
        assert got.cap == pytest.approx(single_disk_capacity(1.0), abs=1e-10)


class TestCapacity:
    def test_result_fields(self):
        res = capacity(pair(), SolverConfig(n=64))
        assert isinstance(res, CapacityResult)
        assert res.a.shape == (2,)
        assert res.h.shape == (3, 2)
        assert res.n == 64
        assert res.mode == "direct"
        assert res.h_std.max() < 1e-8
        d = res.to_dict()
        assert d["cap"] == res.cap
        assert d["diagnostics"]["n"] == 64

    def test_accepts_circular_domain(self):
        dom = CircularDomain(centers=(-0.3 + 0j, 0.3 + 0j), radii=(0.1, 0.1))
        res = capacity(dom, SolverConfig(n=64))
        assert res.cap > 0.0

    def test_infeasible_names_pair(self):
        c = Constellation(
            disks=(
                HyperbolicDisk(0j, 0.4),
                HyperbolicDisk(0.05 + 0j, 0.4),
                HyperbolicDisk(0.7 + 0j, 0.1),
            ),
            delta=0.0,
        )
        with pytest.raises(InfeasibleError, match=r"\(0,1\)"):
            capacity(c)

    def test_alpha_modes_agree(self):
        c = pair()
        cap0 = capacity(c, SolverConfig(n=128, alpha=0.55j)).cap
        cap1 = capacity(c, SolverConfig(n=128, alpha="auto")).cap
        cap2 = capacity(c, SolverConfig(n=128)).cap
        assert cap0 == pytest.approx(cap1, abs=1e-11)
        assert cap0 == pytest.approx(cap2, abs=1e-11)

    def test_iterative_matches_direct(self):
        c = pair()
        cap_d = capacity(c, SolverConfig(n=128, mode="direct")).cap
        res_i = capacity(c, SolverConfig(n=128, mode="iterative"))
        assert res_i.cap == pytest.approx(cap_d, abs=1e-12)
        assert res_i.iterations is not None

    def test_label_permutation_invariance(self):
        c = pair()
        rev = Constellation(disks=c.disks[::-1], delta=c.delta)
        assert capacity(c).cap == pytest.approx(capacity(rev).cap, abs=1e-12)

    def test_mobius_invariance(self):
        c = collinear_chain([0.4, 0.3, 0.2], 0.25)
        t = MobiusSelfMap(a=0.2 - 0.3j, phi=0.7)
        moved = Constellation(disks=tuple(t.map_disk(d) for d in c.disks), delta=c.delta)
        cfg = SolverConfig(n=128, alpha="auto")
        assert capacity(moved, cfg).cap == pytest.approx(capacity(c, cfg).cap, abs=1e-8)

    def test_subadditivity(self):
        c = pair()
        assert capacity(c).cap < upper_bound_sum(c.radii)

    def test_capacity_exceeds_largest_single_disk(self):
        c = pair()
        assert capacity(c).cap > single_disk_capacity(max(c.radii))


class TestBounds:
    def test_upper_bound_sum(self):
        radii = (0.3, 0.7)
        assert upper_bound_sum(radii) == pytest.approx(
            single_disk_capacity(0.3) + single_disk_capacity(0.7), rel=1e-15
        )

    def test_gehring_equal_area(self):
        m, r = 4, 0.5
        big = 2.0 * math.asinh(math.sqrt(m) * math.sinh(r / 2.0))
        assert gehring_bound(m, r) == pytest.approx(single_disk_capacity(big), rel=1e-15)
        assert gehring_bound(1, r) == pytest.approx(single_disk_capacity(r), rel=1e-15)

    def test_gehring_is_lower_bound(self):
        for m, case in ((2, None), (3, None), (4, "I"), (4, "II")):
            c = er_config(m, 0.5, case=case)
            assert capacity(c).cap > gehring_bound(m, 0.5)

    def test_lr_ratio(self):
        c = er_config(3, 0.5)
        low = gehring_bound(3, 0.5)
        assert lr_ratio(c, 0.5) == pytest.approx((capacity(c).cap - low) / low, abs=1e-12)

    def test_lr_ratio_radius_mismatch(self):
        with pytest.raises(ValueError):
            lr_ratio(er_config(3, 0.5), 0.4)


class TestGammaFor:
    def test_values_and_range(self):
        from hypcap.bie import build_grid

        dom = CircularDomain(centers=(0.2 + 0j,), radii=(0.1,))
        grid = build_grid(dom, 16)
        g = gamma_for(grid, 0)
        # on the inner circle, |eta - z_0| is the circle radius
        assert np.allclose(g[grid.component(1)], math.log(0.1), atol=1e-14)
        with pytest.raises(IndexError):
            gamma_for(grid, 1)


class TestConvergenceStudy:
    def test_errors_decrease_and_sigma_positive(self):
        c = pair()
        study = convergence_study(c, [16, 32, 64], alpha=0.55j)
        assert study.ref_n == 128
        ns = [n for n, _, _ in study.rows]
        errs = [e for _, _, e in study.rows]
        assert ns == [16, 32, 64]
        assert errs[0] > errs[-1]
        assert study.sigma > 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            convergence_study(pair(), [])
