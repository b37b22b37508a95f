import math
from fractions import Fraction

import pytest

from isolab.gridtv import (IN, OUT, AxisBox, ConvexPolygon, Disk, GridSet, continuum_tv,
                           orthotropic_energy, rate_fit, sample, shape_from_json,
                           stencil_energy, voxel_tv)
from isolab.wulff import Anisotropy

UNIT = AxisBox((Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)))
DISK = Disk((0.0, 0.0), 1.0)


def test_aligned_square_cells():
    A = sample(UNIT, Fraction(1, 4), IN)
    assert len(A) == 16
    assert sample(UNIT, Fraction(1, 4), OUT).cells == A.cells


def test_disk_in_out():
    a, b = sample(DISK, Fraction(1, 8), IN), sample(DISK, Fraction(1, 8), OUT)
    assert len(a) < math.pi * 64 < len(b)
    assert a.cells <= b.cells


def test_mesh_must_be_reciprocal():
    with pytest.raises(ValueError):
        sample(UNIT, Fraction(2, 3))


def test_square_energy_exact_every_mesh():
    for k in (1, 3, 8, 16):
        assert orthotropic_energy(sample(UNIT, Fraction(1, k))) == 4


def test_weighted_square():
    assert orthotropic_energy(sample(UNIT, Fraction(1, 8)), (1, 2)) == 6


def test_face_identity_against_voxels():
    for h in (Fraction(1, 8), Fraction(1, 16)):
        for mode in (IN, OUT):
            A = sample(DISK, h, mode)
            assert orthotropic_energy(A, (1, 3)) == voxel_tv(A, (1, 3))


def test_disk_energy_close():
    A = sample(DISK, Fraction(1, 64))
    assert abs(float(orthotropic_energy(A)) - 8) < 8 * (1 / 64) * 2


def test_stencil_reduces_to_axis():
    A = sample(DISK, Fraction(1, 16))
    assert stencil_energy(A, [(1, 0), (0, 1)]) == orthotropic_energy(A)


def test_stencil_square_diagonal():
    for k in (16, 64):
        e = float(stencil_energy(sample(UNIT, Fraction(1, k)), [(1, 0), (0, 1), (1, 1)]))
        assert abs(e - 8) <= 2.0 / k + 1e-12


def test_empty_grid_set():
    assert stencil_energy(GridSet(4, 2, frozenset()), [(1, 0)]) == 0


def test_continuum_values():
    assert continuum_tv(UNIT) == 4
    assert continuum_tv(DISK) == pytest.approx(8, abs=1e-8)
    phi = Anisotropy(2, [(1, 0), (0, 1), (1, 1)])
    # the diagonal term integrates |cos(t) + sin(t)| = sqrt(2) |cos(t - pi/4)| to 4 sqrt(2)
    assert continuum_tv(DISK, phi) == pytest.approx(8 + 4 * math.sqrt(2), abs=1e-8)
    tri = ConvexPolygon(((0.0, 0.0), (1.0, 0.0), (0.0, 1.0)))
    assert continuum_tv(tri) == pytest.approx(4)


def test_rate_fit_exact_square():
    fit = rate_fit(UNIT)
    assert fit.exact and fit.status.startswith("exact")


def test_rate_fit_disk_slope():
    hs = [Fraction(1, 2 ** j) for j in range(4, 9)]
    assert 0.8 <= rate_fit(DISK, h_list=hs).slope <= 1.2
    off = shape_from_json({"shape": "disk", "radius": 1.0, "center": [0.1234, 0.0567]})
    assert 0.8 <= rate_fit(off, h_list=hs).slope <= 1.2


def test_shape_json():
    assert isinstance(shape_from_json({"shape": "box", "lo": [0, 0], "hi": [1, 1]}), AxisBox)
    with pytest.raises(ValueError):
        shape_from_json({"shape": "torus"})


def test_liminf_proxy():
    errs = []
    for k in (16, 32, 64):
        h = Fraction(1, k)
        e = min(float(orthotropic_energy(sample(DISK, h, m))) for m in (IN, OUT))
        errs.append((8 - e) / float(h))
    # undershoot shrinks at least linearly in h
    assert max(errs) < 10
