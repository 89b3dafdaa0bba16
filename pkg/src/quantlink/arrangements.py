"""Hyperplane-arrangement geometry: sign vectors and region enumeration.

A bank of one-bit slicers acting on a d-dimensional signal space is an
arrangement of affine hyperplanes; the realizable slicer outputs are the sign
vectors of the arrangement's cells.  This module enumerates those cells by
brute force inside a bounding box, using a small dense two-phase simplex to
decide feasibility of each candidate sign vector.  It is the independent
geometric ground truth against which the closed-form region counts in
:mod:`quantlink.combinatorics` are validated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Hyperplane",
    "Arrangement",
    "SignVector",
    "FeasibilityError",
    "sign_vector",
    "feasible",
    "enumerate_regions",
    "random_general_position",
    "default_box_bound",
]

# Strict-inequality margin: a sign vector is a region only if some point
# clears every hyperplane by more than this.
MARGIN_EPS = 1e-9

# 2**n candidate sign vectors; past this only closed-form counts are offered.
MAX_ENUM_HYPERPLANES = 22

_EPS_CAP = 1.0  # margins beyond this don't matter, capping keeps the LP bounded


class FeasibilityError(RuntimeError):
    """The feasibility LP failed to converge; result is indeterminate."""


@dataclass(frozen=True)
class Hyperplane:
    """Affine hyperplane {z : normal . z + offset = 0}."""

    normal: np.ndarray
    offset: float

    def __post_init__(self) -> None:
        normal = np.asarray(self.normal, dtype=float).reshape(-1)
        if normal.size == 0 or not np.any(normal != 0.0):
            raise ValueError("hyperplane normal must have a nonzero entry")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", float(self.offset))


@dataclass(frozen=True)
class Arrangement:
    """Ordered, non-empty collection of hyperplanes in a common dimension."""

    hyperplanes: tuple[Hyperplane, ...]
    dimension: int
    _normals: np.ndarray = field(init=False, repr=False, compare=False)
    _offsets: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        planes = tuple(self.hyperplanes)
        if not planes:
            raise ValueError("arrangement needs at least one hyperplane")
        for hp in planes:
            if hp.normal.size != self.dimension:
                raise ValueError(
                    f"normal of length {hp.normal.size} in a {self.dimension}-dimensional arrangement"
                )
        object.__setattr__(self, "hyperplanes", planes)
        object.__setattr__(self, "_normals", np.array([hp.normal for hp in planes]))
        object.__setattr__(self, "_offsets", np.array([hp.offset for hp in planes]))

    def __len__(self) -> int:
        return len(self.hyperplanes)

    @property
    def normals(self) -> np.ndarray:
        """(n, d) matrix of hyperplane normals (read-only view)."""
        view = self._normals.view()
        view.flags.writeable = False
        return view

    @property
    def offsets(self) -> np.ndarray:
        """(n,) vector of hyperplane offsets (read-only view)."""
        view = self._offsets.view()
        view.flags.writeable = False
        return view


@dataclass(frozen=True)
class SignVector:
    """One sign per hyperplane, +1 on/above the plane and -1 below."""

    signs: tuple[int, ...]

    def __post_init__(self) -> None:
        signs = tuple(int(s) for s in self.signs)
        if any(s not in (-1, 1) for s in signs):
            raise ValueError(f"sign entries must be -1 or +1, got {signs}")
        object.__setattr__(self, "signs", signs)

    def __len__(self) -> int:
        return len(self.signs)

    def __iter__(self):
        return iter(self.signs)

    def __getitem__(self, i: int) -> int:
        return self.signs[i]


def sign_vector(arrangement: Arrangement, point: np.ndarray) -> SignVector:
    """Sign pattern of a point: +1 where normal.point + offset >= 0, else -1.

    Exact zeros map to +1 so the digitization is a total function.
    """
    point = np.asarray(point, dtype=float).reshape(-1)
    if point.size != arrangement.dimension:
        raise ValueError(
            f"point of length {point.size} in a {arrangement.dimension}-dimensional arrangement"
        )
    values = arrangement._normals @ point + arrangement._offsets
    return SignVector(tuple(np.where(values >= 0.0, 1, -1).tolist()))


def default_box_bound(arrangement: Arrangement) -> float:
    """Bounding-box half-width: 1e3 * (max|offset| / min ||normal|| + 1).

    A convenient scale when an explicit box is wanted.  Note it can still
    clip cells of arrangements with near-parallel hyperplanes, whose
    intersection vertices escape any offset-based scale; the unbounded
    default of ``feasible``/``enumerate_regions`` has no such failure mode.
    """
    norms = np.linalg.norm(arrangement._normals, axis=1)
    max_off = float(np.max(np.abs(arrangement._offsets)))
    return 1e3 * (max_off / float(np.min(norms)) + 1.0)


# ---------------------------------------------------------------------------
# Dense two-phase tableau simplex, sized for a few dozen rows and columns.
# ---------------------------------------------------------------------------

def _simplex_min(A: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray | None:
    """Minimize c.x subject to A x <= b, x >= 0.

    Returns the optimal x, or None when the solve does not converge within
    the iteration budget.  Problems fed from this module are always feasible
    and bounded by construction, so non-convergence signals numeric trouble.
    """
    m, n = A.shape
    flip = b < 0.0
    A = np.where(flip[:, None], -A, A)
    b = np.where(flip, -b, b)
    slack = np.diag(np.where(flip, -1.0, 1.0))
    n_art = int(np.count_nonzero(flip))

    # Tableau columns: structural | slack | artificial | rhs.
    T = np.zeros((m, n + m + n_art + 1))
    T[:, :n] = A
    T[:, n : n + m] = slack
    art_cols = []
    j = n + m
    for i in np.flatnonzero(flip):
        T[i, j] = 1.0
        art_cols.append(j)
        j += 1
    T[:, -1] = b

    basis = np.where(flip, 0, np.arange(n, n + m))
    j = n + m
    for i in np.flatnonzero(flip):
        basis[i] = j
        j += 1
    basis = basis.astype(int)

    # Phase-1 cost row (sum of artificials) and phase-2 cost row, both kept
    # reduced with respect to the current basis.
    cost2 = np.zeros(T.shape[1])
    cost2[:n] = c
    cost1 = np.zeros(T.shape[1])
    cost1[n + m : n + m + n_art] = 1.0
    for i in np.flatnonzero(flip):
        cost1 -= T[i]
    for i in range(m):
        if basis[i] < n and cost2[basis[i]] != 0.0:
            cost2 -= cost2[basis[i]] * T[i]

    tol = 1e-9
    max_iter = 50 * (m + n)

    def pivot(cost: np.ndarray, avoid: set[int], iteration: int) -> int:
        nonlocal T, cost1, cost2
        reduced = cost[:-1].copy()
        if avoid:
            reduced[list(avoid)] = 0.0
        if iteration > max_iter // 2:  # Bland's rule to rule out cycling
            negs = np.flatnonzero(reduced < -tol)
            if negs.size == 0:
                return -1
            col = int(negs[0])
        else:
            col = int(np.argmin(reduced))
            if reduced[col] >= -tol:
                return -1
        ratios = np.where(T[:, col] > tol, T[:, -1] / np.where(T[:, col] > tol, T[:, col], 1.0), np.inf)
        row = int(np.argmin(ratios))
        if not np.isfinite(ratios[row]):
            return -2  # unbounded: cannot happen for well-posed inputs
        piv = T[row, col]
        T[row] /= piv
        factors = T[:, col].copy()
        factors[row] = 0.0
        T -= np.outer(factors, T[row])
        cost1_f = cost1[col]
        if cost1_f != 0.0:
            cost1 -= cost1_f * T[row]
        cost2_f = cost2[col]
        if cost2_f != 0.0:
            cost2 -= cost2_f * T[row]
        basis[row] = col
        return 1

    if n_art:
        for it in range(max_iter):
            status = pivot(cost1, set(), it)
            if status == -1:
                break
            if status == -2:
                return None
        else:
            return None
        if cost1[-1] < -1e-7:
            return None  # artificials not driven out: numerically infeasible
        avoid = set(art_cols)
    else:
        avoid = set()

    for it in range(max_iter):
        status = pivot(cost2, avoid, it)
        if status == -1:
            break
        if status == -2:
            return None
    else:
        return None

    x = np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i, -1]
    return x


def _max_margin(normals: np.ndarray, offsets: np.ndarray, signs: np.ndarray,
                bound: float | None) -> tuple[float, np.ndarray]:
    """Maximize eps s.t. signs*(normals.z + offsets) >= eps, |z|_inf <= bound.

    With ``bound=None`` the point ranges over all of R^d, which decides true
    arrangement-cell feasibility with no box artifacts; capping eps at 1
    keeps the LP bounded either way.  Variables are split into nonnegative
    pairs for the standard-form simplex.  Returns (eps, z).
    """
    n, d = normals.shape
    sv = signs[:, None] * normals
    # Rows: margin constraints, optional box |z_j| <= bound, eps cap.
    n_box = 0 if bound is None else 2 * d
    m = n + n_box + 1
    nv = 2 * d + 2
    A = np.zeros((m, nv))
    b = np.zeros(m)
    A[:n, :d] = -sv
    A[:n, d : 2 * d] = sv
    A[:n, 2 * d] = 1.0
    A[:n, 2 * d + 1] = -1.0
    b[:n] = signs * offsets
    if bound is not None:
        A[n : n + d, :d] = np.eye(d)
        A[n : n + d, d : 2 * d] = -np.eye(d)
        b[n : n + d] = bound
        A[n + d : n + 2 * d, :d] = -np.eye(d)
        A[n + d : n + 2 * d, d : 2 * d] = np.eye(d)
        b[n + d : n + 2 * d] = bound
    A[-1, 2 * d] = 1.0
    A[-1, 2 * d + 1] = -1.0
    b[-1] = _EPS_CAP
    c = np.zeros(nv)
    c[2 * d] = -1.0
    c[2 * d + 1] = 1.0

    x = _simplex_min(A, b, c)
    if x is None:
        raise FeasibilityError(
            f"margin LP did not converge for a {n}-hyperplane, {d}-dimensional instance"
        )
    z = x[:d] - x[d : 2 * d]
    eps = x[2 * d] - x[2 * d + 1]
    return float(eps), z


def feasible(arrangement: Arrangement, signs: SignVector, bound: float | None = None) -> bool:
    """Whether some point realizes this sign vector with margin > MARGIN_EPS.

    Decided by an exact margin-maximization LP.  An explicit ``bound``
    restricts the search to the box |z|_inf <= bound; the default searches
    all of R^d, which never misses a cell whose points lie far out (near-
    parallel hyperplanes push intersection vertices arbitrarily far).
    Raises FeasibilityError (never a silent False) if the solver fails to
    converge.
    """
    if len(signs) != len(arrangement):
        raise ValueError(f"sign vector of length {len(signs)} for {len(arrangement)} hyperplanes")
    if bound is not None and bound <= 0:
        raise ValueError(f"bound must be positive, got {bound}")
    eps, _ = _max_margin(
        arrangement._normals, arrangement._offsets, np.array(signs.signs, dtype=float), bound
    )
    return eps > MARGIN_EPS


# ---------------------------------------------------------------------------
# Region enumeration: insert hyperplanes one at a time, keeping a witness
# point per cell.  A cell of the first k planes can only split into children
# that refine it, so pruning by prefix is exact.  Witness geometry settles
# most children without an LP; the LP remains the sole arbiter otherwise.
# ---------------------------------------------------------------------------

_CERT_MARGIN = 2.0 * MARGIN_EPS  # direct witness checks use a little slack


def _verify_batch(points: np.ndarray, normals: np.ndarray, offsets: np.ndarray,
                  signs: np.ndarray, bound: float | None) -> np.ndarray:
    """Rows whose point realizes its sign row with margin (and fits the box)."""
    margins = signs * (points @ normals.T + offsets)
    ok = margins.min(axis=1) > _CERT_MARGIN
    if bound is not None:
        ok &= np.abs(points).max(axis=1) < bound * (1.0 - 1e-12)
    return ok


def enumerate_regions(arrangement: Arrangement, bound: float | None = None) -> set[SignVector]:
    """All realizable sign vectors of the arrangement.

    With the default ``bound=None`` the enumeration is over all of R^d, so
    the cardinality is exactly the region count.  An explicit box bound
    restricts to |z|_inf <= bound; the count then matches the true one only
    when the box exceeds every cell vertex by a comfortable factor.  Limited
    to 22 hyperplanes (the candidate space is 2**n).
    """
    n = len(arrangement)
    if n > MAX_ENUM_HYPERPLANES:
        raise ValueError(f"enumeration supports at most {MAX_ENUM_HYPERPLANES} hyperplanes, got {n}")
    if bound is not None and bound <= 0:
        raise ValueError(f"bound must be positive, got {bound}")

    normals = arrangement._normals
    offsets = arrangement._offsets
    d = arrangement.dimension

    # Central arrangements are odd-symmetric: enumerate the half-space with
    # the first sign pinned to +1 and mirror the result.
    central = bool(np.all(offsets == 0.0))

    signs = np.zeros((1, 0), dtype=np.int8)
    witnesses = np.zeros((1, d))

    for k in range(n):
        v = normals[k]
        t = offsets[k]
        vv = float(v @ v)
        g = witnesses @ v + t

        if central and k == 0:
            kid = np.ones((1, 1), dtype=np.int8)
            cand = (v / np.sqrt(vv))[None, :]
            if not _verify_batch(cand, normals[:1], offsets[:1], kid.astype(float), bound)[0]:
                cand[0] = _lp_witness(normals[:1], offsets[:1], kid[0], bound)
            signs = kid
            witnesses = cand
            continue

        side = np.where(g >= 0.0, 1, -1).astype(np.int8)
        inherits = np.abs(g) > _CERT_MARGIN

        new_signs: list[np.ndarray] = []
        new_wit: list[np.ndarray] = []

        # Children on the witness side of the new plane inherit for free.
        kept = np.flatnonzero(inherits)
        if kept.size:
            new_signs.append(np.hstack([signs[kept], side[kept, None]]))
            new_wit.append(witnesses[kept])

        # Ray candidates for the opposite-side siblings: walk from each
        # witness perpendicularly through the new plane and re-verify.
        if kept.size:
            sub_w = witnesses[kept]
            sub_g = g[kept]
            sub_s = signs[kept].astype(float)
            tau_need = 1.0 + 1e-6 / np.abs(sub_g)
            if k > 0:
                m_prev = sub_s * (sub_w @ normals[:k].T + offsets[:k])
                rate = sub_s * np.outer(-sub_g / vv, normals[:k] @ v)
                with np.errstate(divide="ignore", invalid="ignore"):
                    lim = np.where(rate < -1e-300, (m_prev - _CERT_MARGIN) / -rate, np.inf)
                tau_limit = lim.min(axis=1)
            else:
                tau_limit = np.full(kept.size, np.inf)
            u = np.outer(-sub_g / vv, v)
            step = np.where(
                np.isfinite(tau_limit),
                0.5 * (tau_need + np.minimum(tau_limit, tau_need + 2.0)),
                tau_need + 1.0,
            )
            cand = sub_w + step[:, None] * u
            sib_sign = np.hstack([signs[kept], -side[kept, None]])
            ok = _verify_batch(cand, normals[: k + 1], offsets[: k + 1], sib_sign.astype(float), bound)
            hit = np.flatnonzero(ok)
            if hit.size:
                new_signs.append(sib_sign[hit])
                new_wit.append(cand[hit])
            for i in np.flatnonzero(~ok):
                row = sib_sign[i]
                eps, z = _max_margin(normals[: k + 1], offsets[: k + 1], row.astype(float), bound)
                if eps > MARGIN_EPS:
                    new_signs.append(row[None, :])
                    new_wit.append(z[None, :])

        # Witness sat (numerically) on the new plane: LP decides both sides.
        for i in np.flatnonzero(~inherits):
            for s_new in (1, -1):
                row = np.hstack([signs[i], np.int8(s_new)])
                eps, z = _max_margin(normals[: k + 1], offsets[: k + 1], row.astype(float), bound)
                if eps > MARGIN_EPS:
                    new_signs.append(row[None, :])
                    new_wit.append(z[None, :])

        if not new_signs:
            raise FeasibilityError("every candidate region came back infeasible; box or margins are off")
        signs = np.vstack(new_signs).astype(np.int8)
        witnesses = np.vstack(new_wit)

    result = {SignVector(tuple(row.tolist())) for row in signs}
    if central:
        result |= {SignVector(tuple((-row).tolist())) for row in signs}
    return result


def _lp_witness(normals: np.ndarray, offsets: np.ndarray, signs: np.ndarray,
                bound: float) -> np.ndarray:
    eps, z = _max_margin(normals, offsets, signs.astype(float), bound)
    if eps <= MARGIN_EPS:
        raise FeasibilityError("expected-feasible half-space came back empty")
    return z


def random_general_position(n: int, d: int, zero_threshold: bool, seed: int) -> Arrangement:
    """Arrangement with i.i.d. standard-normal normals (and offsets).

    Continuous draws are in general position with probability one, so the
    region count attains the closed-form maximum almost surely.  Offsets are
    exactly zero when ``zero_threshold`` is set.  Deterministic per seed.
    """
    if n < 1 or d < 1:
        raise ValueError(f"need n, d >= 1, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    normals = rng.standard_normal((n, d))
    offsets = np.zeros(n) if zero_threshold else rng.standard_normal(n)
    planes = tuple(Hyperplane(normals[i], offsets[i]) for i in range(n))
    return Arrangement(planes, d)
