import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rwpnet.errors import DomainError
from rwpnet.geometry import (Disk, Rectangle, angular_breaks, boundary_distance, chord_lengths, chord_split, contains,
                             corner_angles, disk_domain_overlap, disk_rectangle_overlap, lens_area, ray_exit)

unit = st.floats(0.0, 1.0, allow_nan=False)
angle = st.floats(0.0, 2 * math.pi, allow_nan=False)


def test_constructors_reject_bad_shapes():
    with pytest.raises(ValueError):
        Rectangle(1.0, 2.0)
    with pytest.raises(ValueError):
        Rectangle(1.0, 0.0)
    with pytest.raises(ValueError):
        Disk(-1.0)


def test_area_and_diameter():
    assert Rectangle(3, 2).area == 24
    assert Rectangle(3, 2).diameter == pytest.approx(2 * math.hypot(3, 2))
    assert Disk(2).area == pytest.approx(4 * math.pi)
    assert Disk(2).diameter == 4


def test_contains_is_closed():
    r = Rectangle(2, 1)
    assert contains(r, 2, 1) and contains(r, 0, 0)
    assert not contains(r, 2.01, 0)
    d = Disk(1)
    assert contains(d, 1, 0) and not contains(d, 0.8, 0.8)


def test_boundary_distance_axis_aligned():
    r = Rectangle(2, 1)
    assert boundary_distance(r, (0, 0), (1, 0)) == pytest.approx(2)
    assert boundary_distance(r, (0.5, 0), (0, -1)) == pytest.approx(1)
    assert boundary_distance(Disk(3), (0, 0), (0.6, 0.8)) == pytest.approx(3)


def test_boundary_distance_checks_inputs():
    with pytest.raises(ValueError):
        boundary_distance(Disk(1), (0, 0), (1, 1))
    with pytest.raises(DomainError):
        boundary_distance(Disk(1), (2, 0), (1, 0))


def test_outward_ray_from_boundary_is_zero():
    assert ray_exit(Rectangle(1, 1), 1.0, 0.3, 1.0, 0.0) == 0.0
    assert ray_exit(Disk(1), 1.0, 0.0, 1.0, 0.0) == 0.0


@settings(max_examples=200, deadline=None)
@given(unit, unit, angle)
def test_rectangle_chord_spans_boundary_to_boundary(u, v, phi):
    r = Rectangle(5, 2)
    x, y = (2 * u - 1) * r.a, (2 * v - 1) * r.b
    a1, a2 = chord_split(r, (x, y), phi)
    for t, sgn in ((a1, 1), (a2, -1)):
        ex, ey = x + sgn * t * math.cos(phi), y + sgn * t * math.sin(phi)
        assert contains(r, ex, ey)
        on_edge = min(abs(abs(ex) - r.a), abs(abs(ey) - r.b))
        assert on_edge < 1e-9


@settings(max_examples=200, deadline=None)
@given(unit, angle, angle)
def test_disk_chord_power_of_point(u, theta, phi):
    # a1 * a2 equals R^2 - r^2 for every line through the point
    R = 2.0
    r = R * u * 0.999
    x, y = r * math.cos(theta), r * math.sin(theta)
    a1, a2 = chord_split(Disk(R), (x, y), phi)
    assert a1 * a2 == pytest.approx(R * R - r * r, rel=1e-9, abs=1e-12)


def test_chord_lengths_vectorised_matches_scalar():
    r = Rectangle(3, 2)
    phi = np.linspace(0, math.pi, 7)
    a1, a2 = chord_lengths(r, 0.4, -0.3, phi)
    for p, u, v in zip(phi, a1, a2):
        assert (u, v) == pytest.approx(tuple(chord_split(r, (0.4, -0.3), p)))


def test_corner_angles_and_breaks():
    r = Rectangle(1, 1)
    ang = corner_angles(r, 0, 0)
    assert np.allclose(ang, np.array([1, 3, 5, 7]) * math.pi / 4)
    assert corner_angles(Disk(1), 0, 0).size == 0
    assert angular_breaks(Disk(1), 0.2, 0).size == 0
    tangents = angular_breaks(Disk(1), 1.0, 0.0)
    assert np.allclose(tangents, [math.pi / 2, 3 * math.pi / 2])


def test_overlap_limiting_cases():
    r = Rectangle(3, 2)
    assert disk_domain_overlap(r, 0, 0, 1) == pytest.approx(math.pi)
    assert disk_domain_overlap(r, 3, 0, 1) == pytest.approx(math.pi / 2)
    assert disk_domain_overlap(r, 3, 2, 1) == pytest.approx(math.pi / 4)
    assert disk_domain_overlap(r, 0, 0, 10) == pytest.approx(r.area)
    assert disk_rectangle_overlap(10, 10, 1, -1, 1, -1, 1) == 0


def test_overlap_against_grid_count():
    r = Rectangle(1.5, 1)
    n = 1500
    xs = np.linspace(-r.a, r.a, n, endpoint=False) + r.a / n
    ys = np.linspace(-r.b, r.b, n, endpoint=False) + r.b / n
    X, Y = np.meshgrid(xs, ys)
    inside = np.hypot(X - 1.1, Y + 0.4) < 0.9
    cell = (2 * r.a / n) * (2 * r.b / n)
    assert disk_domain_overlap(r, 1.1, -0.4, 0.9) == pytest.approx(inside.sum() * cell, rel=2e-3)


def test_lens_area_cases():
    assert lens_area(0.0, 1.0, 2.0) == pytest.approx(math.pi)
    assert lens_area(3.0, 1.0, 2.0) == 0.0
    # two unit disks a unit apart: 2 pi / 3 - sqrt(3) / 2
    assert lens_area(1.0, 1.0, 1.0) == pytest.approx(2 * math.pi / 3 - math.sqrt(3) / 2)
    assert disk_domain_overlap(Disk(2), 2.0, 0.0, 2.0) == pytest.approx(lens_area(2.0, 2.0, 2.0))
