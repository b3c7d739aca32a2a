import numpy as np
import pytest

from raycut.errors import SeedOutsideVolume, SubdivTooLarge
from raycut.phantom import make_sphere_phantom
from raycut.template import build_icosphere, sample_rays
from raycut.volume import Volume


def _uniform_volume(value=100.0, dims=(20, 20, 20)):
    return Volume(dims=dims, spacing=(1, 1, 1), origin=(0, 0, 0),
                  data=np.full(dims, float(value)))


class TestIcosphere:
    @pytest.mark.parametrize("subdiv", range(5))
    def test_closed_form_counts(self, subdiv):
        tmpl = build_icosphere(subdiv)
        assert len(tmpl.directions) == 10 * 4**subdiv + 2
        assert len(tmpl.triangles) == 20 * 4**subdiv

    def test_subdiv0_counts(self):
        tmpl = build_icosphere(0)
        edges = set()
        for a, b, c in tmpl.triangles:
            for u, v in ((a, b), (b, c), (c, a)):
                edges.add((min(u, v), max(u, v)))
        assert len(tmpl.directions) == 12
        assert len(tmpl.triangles) == 20
        assert len(edges) == 30

    def test_subdiv1_counts(self):
        tmpl = build_icosphere(1)
        assert len(tmpl.directions) == 42
        assert len(tmpl.triangles) == 80

    def test_subdiv3_euler(self):
        tmpl = build_icosphere(3)
        edges = set()
        for a, b, c in tmpl.triangles:
            for u, v in ((a, b), (b, c), (c, a)):
                edges.add((min(u, v), max(u, v)))
        v, e, f = len(tmpl.directions), len(edges), len(tmpl.triangles)
        assert (v, f) == (642, 1280)
        assert e == 1920
        assert v - e + f == 2

    @pytest.mark.parametrize("subdiv", range(4))
    def test_unit_directions(self, subdiv):
        tmpl = build_icosphere(subdiv)
        norms = np.linalg.norm(tmpl.directions, axis=1)
        assert np.abs(norms - 1.0).max() <= 1e-12

    @pytest.mark.parametrize("subdiv", range(4))
    def test_every_edge_shared_by_two_triangles(self, subdiv):
        tmpl = build_icosphere(subdiv)
        count = {}
        for a, b, c in tmpl.triangles:
            for u, v in ((a, b), (b, c), (c, a)):
                key = (min(u, v), max(u, v))
                count[key] = count.get(key, 0) + 1
        assert set(count.values()) == {2}

    def test_neighbors_symmetric_irreflexive(self):
        tmpl = build_icosphere(2)
        for r, nbrs in enumerate(tmpl.neighbors):
            assert r not in nbrs
            assert (np.diff(nbrs) > 0).all()  # sorted, unique
            for n in nbrs:
                assert r in tmpl.neighbors[n]

    def test_degrees(self):
        assert all(len(n) == 5 for n in build_icosphere(0).neighbors)
        for subdiv in (1, 2):
            degs = [len(n) for n in build_icosphere(subdiv).neighbors]
            assert sorted(set(degs)) == [5, 6]
            assert degs.count(5) == 12

    @pytest.mark.parametrize("subdiv", [-1, 7, 100])
    def test_subdiv_guard(self, subdiv):
        with pytest.raises(SubdivTooLarge):
            build_icosphere(subdiv)


class TestSampleRays:
    def test_uniform_volume(self):
        vol = _uniform_volume(100.0)
        tmpl = build_icosphere(1)
        rays = sample_rays(vol, (9.5, 9.5, 9.5), tmpl, 8, 5.0)
        assert np.allclose(rays.intensities, 100.0)

    def test_radii_arithmetic(self):
        vol = _uniform_volume()
        tmpl = build_icosphere(0)
        rays = sample_rays(vol, (10.0, 10.0, 10.0), tmpl, 2, 10.0)
        assert rays.delta_mm == pytest.approx(5.0)
        radii = np.linalg.norm(rays.positions - np.array([10.0, 10.0, 10.0]), axis=2)
        assert np.allclose(radii[:, 0], 5.0)
        assert np.allclose(radii[:, 1], 10.0)

    def test_positions_invariant(self):
        vol = _uniform_volume()
        tmpl = build_icosphere(1)
        seed = np.array([9.0, 10.0, 11.0])
        rays = sample_rays(vol, seed, tmpl, 6, 6.0)
        for z in range(6):
            expect = seed[None, :] + (z + 1) * rays.delta_mm * tmpl.directions
            assert np.allclose(rays.positions[:, z, :], expect, atol=1e-12)
        radii = np.linalg.norm(rays.positions - seed, axis=2)
        assert (np.diff(radii, axis=1) > 0).all()

    def test_step_phantom_transition(self):
        case = make_sphere_phantom(radius_mm=20.0, sigma=0.0)
        tmpl = build_icosphere(2)
        seed = np.array(case.seed_index, dtype=float)
        rays = sample_rays(case.volume, seed, tmpl, 40, 40.0)
        radii = (np.arange(40) + 1) * rays.delta_mm
        # intensity must drop from inside-level to outside-level between the
        # samples bracketing the 20 mm shell (one straddling sample may blend)
        for r in range(0, tmpl.ray_count, 17):
            vals = rays.intensities[r]
            well_inside = radii <= 20.0 - 2.0
            well_outside = radii >= 20.0 + 2.0
            assert (vals[well_inside] > 195).all()
            assert (vals[well_outside] < 55).all()

    def test_symmetric_phantom_equal_across_rays(self):
        # spherically symmetric intensity field centered exactly on the seed
        dims = (41, 41, 41)
        center = np.array([20.0, 20.0, 20.0])
        idx = np.indices(dims, dtype=np.float64)
        rad = np.sqrt(((idx - center[:, None, None, None]) ** 2).sum(axis=0))
        vol = Volume(dims=dims, spacing=(1, 1, 1), origin=(0, 0, 0), data=rad)
        tmpl = build_icosphere(1)
        rays = sample_rays(vol, center, tmpl, 10, 8.0)
        spread = rays.intensities.max(axis=0) - rays.intensities.min(axis=0)
        # radius is not exactly linear between lattice points, so allow the
        # trilinear ripple but require ray-to-ray agreement at equal z
        assert (spread < 0.35).all()
        inner = rays.intensities[:, rays.intensities.mean(axis=0) < 4]
        assert inner.std(axis=0).max() < 0.2

    def test_seed_outside(self):
        vol = _uniform_volume()
        tmpl = build_icosphere(0)
        with pytest.raises(SeedOutsideVolume):
            sample_rays(vol, (50.0, 10.0, 10.0), tmpl, 4, 5.0)
        with pytest.raises(SeedOutsideVolume):
            sample_rays(vol, (0.0, 10.0, 10.0), tmpl, 4, 5.0)  # on the hull face

    def test_parameter_guards(self):
        vol = _uniform_volume()
        tmpl = build_icosphere(0)
        with pytest.raises(ValueError):
            sample_rays(vol, (10, 10, 10), tmpl, 1, 5.0)
        with pytest.raises(ValueError):
            sample_rays(vol, (10, 10, 10), tmpl, 4, 0.0)
