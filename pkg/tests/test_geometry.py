"""Frames, adjacency, sphere coverings, and orthogonality-respecting colors."""

import math

import numpy as np
import pytest

from cspgames.errors import CoverageError
from cspgames.geometry import (
    SphereColoring,
    adjacency_sums,
    build_sphere_coloring,
    check_frame_adjacency,
    color_frame,
    is_frame,
    ordered_pairs,
    realify_frame,
    sample_adjacent_frames,
    sphere_covering_mesh,
)


def test_is_frame_on_hand_built_example():
    m = np.array([[1.0, 0.0], [0.0, 1.0]], dtype=complex) / math.sqrt(2)
    check = is_frame(m)
    assert check.ok
    assert check.offdiagonal_residual <= 1e-12
    assert check.trace_residual <= 1e-12


def test_is_frame_rejects_bad_trace_and_cross_terms():
    assert not is_frame(np.eye(2, dtype=complex)).ok  # trace 2
    skew = np.array([[1.0, 0.0], [1.0, 0.0]], dtype=complex) / math.sqrt(2)
    assert not is_frame(skew).ok  # rows not orthogonal


def test_ordered_pairs_layout():
    assert ordered_pairs(3) == [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]
    assert len(ordered_pairs(4)) == 12


def test_sampled_triples_pass_all_checks():
    for seed in range(40):
        n = 2 + seed % 3
        d = 1 + seed % 3
        m, mp, nmat = sample_adjacent_frames(n, d, seed=seed)
        assert is_frame(m).ok
        assert is_frame(mp).ok
        assert is_frame(nmat).ok
        assert check_frame_adjacency(m, mp, nmat)


def test_adjacent_rows_are_orthogonal():
    """Matching rows of an adjacent pair have vanishing inner product."""
    for seed in (0, 1, 2, 3):
        m, mp, _ = sample_adjacent_frames(3, 2, seed=seed)
        for i in range(m.shape[0]):
            assert abs(np.vdot(m[i], mp[i])) <= 1e-9


def test_perturbation_breaks_adjacency():
    m, mp, nmat = sample_adjacent_frames(2, 2, seed=4)
    wrong = nmat.copy()
    wrong[0, 0] += 0.05
    assert not check_frame_adjacency(m, mp, wrong)


def test_adjacency_sums_shapes():
    _, _, nmat = sample_adjacent_frames(3, 2, seed=7)
    m, mp = adjacency_sums(nmat, 3)
    assert m.shape == (3, 2)
    assert mp.shape == (3, 2)


def test_realify_preserves_geometry():
    m, mp, _ = sample_adjacent_frames(2, 3, seed=9)
    rm, rmp = realify_frame(m), realify_frame(mp)
    assert rm.shape == (2, 6)
    for i in range(2):
        assert np.linalg.norm(rm[i]) == pytest.approx(np.linalg.norm(m[i]))
        # complex orthogonality gives real orthogonality after folding
        assert abs(float(rm[i] @ rmp[i])) <= 1e-9
    with pytest.raises(ValueError):
        realify_frame(np.eye(2))


def test_mesh_low_dimensions():
    assert sorted(sphere_covering_mesh(1, 0.5).ravel()) == [-1.0, 1.0]
    circle = sphere_covering_mesh(2, 0.1)
    assert circle.shape[1] == 2
    assert np.allclose(np.linalg.norm(circle, axis=1), 1.0)
    # consecutive circle points sit within twice the covering radius
    angles = np.sort(np.arctan2(circle[:, 1], circle[:, 0]))
    gaps = np.diff(np.concatenate([angles, [angles[0] + 2 * np.pi]]))
    assert gaps.max() <= 2 * 0.1 + 1e-9


def test_mesh_covering_radius_statistically():
    rng = np.random.default_rng(3)
    for dim, radius in ((3, 0.2), (4, 0.25)):
        mesh = sphere_covering_mesh(dim, radius)
        pts = rng.standard_normal((2000, dim))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        cosines = np.clip(pts @ mesh.T, -1.0, 1.0)
        worst = np.arccos(cosines.max(axis=1)).max()
        assert worst <= radius + 1e-9


def test_certified_coloring_covers_and_separates():
    rng = np.random.default_rng(13)
    for dim in (2, 3):
        coloring = build_sphere_coloring(dim, seed=0)
        assert coloring.mode == "certified"
        pts = rng.standard_normal((5000, dim))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        colors = coloring.color_many(pts)  # raises CoverageError on a miss
        assert colors.shape == (5000,)
        assert colors.min() >= 0
        centers = np.asarray(coloring.centers)
        # every point really lies in its assigned cap
        cos_theta = math.cos(coloring.theta)
        chosen = np.einsum("ij,ij->i", pts, centers[colors])
        assert chosen.min() >= cos_theta - 1e-9


def test_orthogonal_points_get_distinct_colors():
    rng = np.random.default_rng(17)
    coloring = build_sphere_coloring(3, seed=0)
    u = rng.standard_normal((10**4, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    w = rng.standard_normal((10**4, 3))
    w -= np.sum(w * u, axis=1, keepdims=True) * u
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    assert int(np.sum(coloring.color_many(u) == coloring.color_many(w))) == 0


def test_statistical_mode_for_high_dimension():
    coloring = build_sphere_coloring(7, seed=0, mode="statistical", mesh_size=20000)
    assert coloring.mode == "statistical"
    rng = np.random.default_rng(19)
    pts = rng.standard_normal((100, 7))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    try:
        colors = coloring.color_many(pts)
        assert colors.shape == (100,)
    except CoverageError:
        pass  # no guarantee in statistical mode; a miss is a legal outcome


def test_certified_mode_rejects_unsupported_dimension():
    with pytest.raises(ValueError):
        build_sphere_coloring(7, mode="certified")


def test_coloring_json_round_trip():
    coloring = build_sphere_coloring(2, seed=0)
    again = SphereColoring.from_json_dict(coloring.to_json_dict())
    assert again.dim == coloring.dim
    assert again.theta == pytest.approx(coloring.theta)
    assert np.allclose(again.centers, coloring.centers)
    assert again.mode == coloring.mode


def test_color_frame_distinguishes_adjacent_frames():
    coloring = build_sphere_coloring(4, seed=0)
    for seed in range(25):
        m, mp, _ = sample_adjacent_frames(2, 2, seed=seed)
        row_m, color_m = color_frame(coloring, realify_frame(m))
        row_mp, color_mp = color_frame(coloring, realify_frame(mp))
        assert row_m == row_mp == 0
        assert color_m != color_mp


def test_color_frame_requires_certified_coloring():
    coloring = build_sphere_coloring(6, seed=0, mode="statistical", mesh_size=5000)
    m, _, _ = sample_adjacent_frames(2, 3, seed=0)
    with pytest.raises(ValueError):
        color_frame(coloring, realify_frame(m))
