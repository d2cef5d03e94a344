"""Frames, the adjacency construction, and colorings of the orthogonality
sphere.

A frame is a complex or real matrix whose rows are pairwise orthogonal and
whose squared norms sum to one (MM* diagonal with trace 1).  The adjacency
construction folds an (n^2 - n)-row frame indexed by ordered pairs (i, j),
i != j in lexicographic order, into two n-row frames by summing each row
block: M_i collects rows (i, *), M'_i collects rows (*, i).

Unit directions model the sphere on which distance one means orthogonality;
a coloring covers the unit sphere by caps of angular radius theta < pi/4, so
directions sharing a cap subtend less than pi/2 and are never orthogonal.
Certified mode builds a recursive banded mesh whose covering radius is
proven by the spherical triangle inequality, then covers the mesh greedily
within theta minus the mesh gap.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import CoverageError

DEFAULT_TOL = 1e-9
THETA_DEFAULT = math.pi / 4 - 0.05
CERTIFIED_DIMS = range(2, 6)
MESH_GAP_BY_DIM = {2: 0.01, 3: 0.05, 4: 0.13, 5: 0.3}


@dataclass(frozen=True)
class FrameCheck:
    ok: bool
    offdiagonal_residual: float
    trace_residual: float


def is_frame(m, tol: float = DEFAULT_TOL) -> FrameCheck:
    """Check MM* is diagonal with unit trace; residuals are max entry error."""
    m = np.asarray(m)
    if m.ndim != 2:
        raise ValueError("frame must be a 2D matrix")
    gram = m @ m.conj().T
    off = gram - np.diag(np.diag(gram))
    off_res = float(np.max(np.abs(off))) if off.size else 0.0
    trace_res = float(abs(np.trace(gram).real - 1.0) + abs(np.trace(gram).imag))
    return FrameCheck(max(off_res, trace_res) <= tol, off_res, trace_res)


def ordered_pairs(n: int) -> list[tuple[int, int]]:
    """Row order of the pair-indexed frame: (i, j), i != j, lexicographic."""
    return [(i, j) for i in range(n) for j in range(n) if i != j]


def adjacency_sums(nmat, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Fold an (n^2-n)-row frame into the two summed n-row frames."""
    nmat = np.asarray(nmat)
    if nmat.shape[0] != n * n - n:
        raise ValueError(f"expected {n * n - n} rows, got {nmat.shape[0]}")
    pairs = ordered_pairs(n)
    m = np.zeros((n, nmat.shape[1]), dtype=nmat.dtype)
    mp = np.zeros((n, nmat.shape[1]), dtype=nmat.dtype)
    for row, (i, j) in enumerate(pairs):
        m[i] += nmat[row]
        mp[j] += nmat[row]
    return m, mp


def check_frame_adjacency(m, mp, nmat, tol: float = DEFAULT_TOL) -> bool:
    """True iff nmat is a frame and m, mp are its row-block sums."""
    m, mp, nmat = np.asarray(m), np.asarray(mp), np.asarray(nmat)
    if m.shape != mp.shape or m.shape[1] != nmat.shape[1]:
        return False
    n = m.shape[0]
    if nmat.shape[0] != n * n - n:
        return False
    if not is_frame(nmat, tol).ok:
        return False
    want_m, want_mp = adjacency_sums(nmat, n)
    return bool(
        np.max(np.abs(m - want_m), initial=0.0) <= tol
        and np.max(np.abs(mp - want_mp), initial=0.0) <= tol
    )


def sample_adjacent_frames(n: int, d: int, seed: int = 0):
    """Random adjacent triple (M, M', N): Gram-Schmidt rows of a complex
    Gaussian matrix (rows beyond the rank go to zero), scaled to unit total
    power, then folded."""
    if n < 2:
        raise ValueError("need n >= 2")
    if d < 1:
        raise ValueError("need d >= 1")
    rng = np.random.default_rng(seed)
    rows = n * n - n
    for _ in range(20):
        z = rng.standard_normal((rows, d)) + 1j * rng.standard_normal((rows, d))
        for i in range(rows):
            for j in range(i):
                denom = np.vdot(z[j], z[j]).real
                if denom > 1e-12:
                    z[i] = z[i] - (np.vdot(z[j], z[i]) / denom) * z[j]
            if np.linalg.norm(z[i]) < 1e-9:
                z[i] = 0.0
        total = float(np.sum(np.abs(z) ** 2))
        if total < 1e-12:
            continue
        nmat = z / math.sqrt(total)
        m, mp = adjacency_sums(nmat, n)
        return m, mp, nmat
    raise AssertionError("failed to sample a frame")


def realify_frame(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Real n x 2d frame with the same Gram diagonal: rows (Re u, Im u)."""
    m = np.asarray(m, dtype=complex)
    if not is_frame(m, tol).ok:
        raise ValueError("input is not a frame within tolerance")
    return np.hstack([m.real, m.imag])


# ---------------------------------------------------------------------------
# sphere coverings and colorings


def sphere_covering_mesh(dim: int, radius: float) -> np.ndarray:
    """Deterministic mesh covering the unit sphere in R^dim within ``radius``.

    dim = 2 spaces points evenly on the circle.  Higher dimensions cut polar
    bands of half-width radius/2 around latitudes (2t+1) * radius/2 and cover
    each band with a scaled sub-sphere mesh: moving to a point's latitude
    costs at most the half-width, and closing the remaining angle beta along
    the band's latitude circle needs a sub-sphere mesh of radius
    arccos(1 - (1 - cos beta) / sin^2 phi) (one center suffices when
    sin^2 phi <= (1 - cos beta) / 2).  Both steps bound the total distance by
    the triangle inequality.
    """
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    if not 0 < radius < math.pi:
        raise ValueError("radius must be in (0, pi)")
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        count = max(1, math.ceil(math.pi / radius))
        angles = 2 * math.pi * np.arange(count) / count
        return np.column_stack([np.cos(angles), np.sin(angles)])
    half = radius / 2
    bands = math.ceil(math.pi / (2 * half))
    beta = radius - half
    shortfall = 1.0 - math.cos(beta)
    points = []
    for t in range(bands):
        phi = min((2 * t + 1) * half, math.pi)
        s = math.sin(phi)
        if s * s <= shortfall / 2 + 1e-15:
            sub = np.zeros((1, dim - 1))
            sub[0, 0] = 1.0
        else:
            sub_radius = math.acos(1.0 - shortfall / (s * s))
            sub = sphere_covering_mesh(dim - 1, sub_radius)
        block = np.empty((len(sub), dim))
        block[:, 0] = math.cos(phi)
        block[:, 1:] = s * sub
        points.append(block)
    return np.vstack(points)


@dataclass
class SphereColoring:
    """Greedy cap cover of the unit sphere; the color of a direction is the
    index of the nearest center (guaranteed within theta in certified mode)."""

    dim: int
    theta: float
    centers: np.ndarray
    mode: str  # "certified" or "statistical"
    mesh_gap: float
    mesh_size: int

    @property
    def color_count(self) -> int:
        return len(self.centers)

    def color_many(self, directions, tol: float = DEFAULT_TOL) -> np.ndarray:
        u = np.asarray(directions, dtype=float)
        norms = np.linalg.norm(u, axis=1)
        if np.any(norms <= tol):
            raise ValueError("zero direction cannot be colored")
        u = u / norms[:, None]
        dots = u @ self.centers.T
        best = np.argmax(dots, axis=1)
        slack = math.cos(self.theta) - 1e-9
        misses = dots[np.arange(len(u)), best] < slack
        if np.any(misses):
            raise CoverageError(
                f"{int(misses.sum())} directions fall outside every cap"
            )
        return best

    def color_of(self, direction, tol: float = DEFAULT_TOL) -> int:
        return int(self.color_many(np.asarray(direction, dtype=float)[None, :], tol)[0])

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "theta": self.theta,
            "mode": self.mode,
            "mesh_gap": self.mesh_gap,
            "mesh_size": self.mesh_size,
            "centers": [[float(v) for v in c] for c in self.centers],
        }

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)

    @classmethod
    def from_json_dict(cls, data: dict) -> "SphereColoring":
        return cls(
            int(data["dim"]),
            float(data["theta"]),
            np.array(data["centers"], dtype=float),
            data["mode"],
            float(data["mesh_gap"]),
            int(data["mesh_size"]),
        )


def build_sphere_coloring(
    dim: int,
    theta: float = THETA_DEFAULT,
    seed: int = 0,
    mode: str | None = None,
    mesh_gap: float | None = None,
    mesh_size: int = 200_000,
) -> SphereColoring:
    """Cover the unit sphere in R^dim by caps of angular radius theta.

    Certified mode (dims 2..5) lays a proven mesh of covering radius
    ``mesh_gap`` and greedily picks mesh points as centers until every mesh
    point is within theta - mesh_gap of one, so every sphere point is within
    theta.  Statistical mode samples the mesh instead and offers no
    guarantee beyond the sampled points.
    """
    if not 0 < theta < math.pi / 2:
        raise ValueError("theta must be in (0, pi/2)")
    if mode is None:
        mode = "certified" if dim in CERTIFIED_DIMS else "statistical"
    if mode == "certified":
        if dim not in CERTIFIED_DIMS:
            raise ValueError(f"certified mode supports dims {list(CERTIFIED_DIMS)}")
        gap = mesh_gap if mesh_gap is not None else MESH_GAP_BY_DIM[dim]
        if not 0 < gap < theta:
            raise ValueError("mesh gap must be in (0, theta)")
        mesh = sphere_covering_mesh(dim, gap)
    elif mode == "statistical":
        if dim < 2:
            raise ValueError("need dim >= 2")
        gap = 0.0
        rng = np.random.default_rng(seed)
        mesh = rng.standard_normal((mesh_size, dim))
        mesh /= np.linalg.norm(mesh, axis=1)[:, None]
    else:
        raise ValueError(f"unknown mode {mode!r}")

    needed = math.cos(theta - gap)
    best = np.full(len(mesh), -2.0)
    centers = []
    while True:
        worst = int(np.argmin(best))
        if best[worst] >= needed:
            break
        c = mesh[worst]
        centers.append(c)
        best = np.maximum(best, mesh @ c)
    return SphereColoring(dim, theta, np.array(centers), mode, gap, len(mesh))


def color_frame(coloring: SphereColoring, m, tol: float = DEFAULT_TOL):
    """Color of a real frame: (index of first row with norm above 1000*tol,
    cap color of that row's direction).  Requires a certified coloring."""
    if coloring.mode != "certified":
        raise ValueError("frame coloring requires a certified coloring")
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[1] != coloring.dim:
        raise ValueError(f"expected rows of dimension {coloring.dim}")
    norms = np.linalg.norm(m, axis=1)
    threshold = 1000.0 * tol
    candidates = np.nonzero(norms > threshold)[0]
    if len(candidates) == 0:
        raise ValueError("frame has no row with norm above the threshold")
    i = int(candidates[0])
    return i, coloring.color_of(m[i], tol)
