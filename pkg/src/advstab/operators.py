"""Interval, lattice and half-line one-step operators plus matrix assembly.

The interval operator folds the Dirichlet inflow and extrapolation outflow
closures into a dense (J+1) x (J+1) iteration matrix. The lattice and
half-line steppers act on exact finite-support sequences, growing their
windows with the finite propagation speed of the stencil so no artificial
second boundary ever contaminates a half-line experiment.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundaryConfig, fill_left_ghosts, fill_right_ghosts
from .stencil import Scheme

__all__ = [
    "Grid",
    "IterationMatrix",
    "MAX_DENSE_DIMENSION",
    "SupportedSequence",
    "assemble_matrix",
    "load_matrix",
    "save_matrix",
    "step_halfline_inflow",
    "step_halfline_outflow",
    "step_interval",
    "step_lattice",
]

# dense storage guard; the spectral study needs dense eigensolves anyway
MAX_DENSE_DIMENSION = 20000


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [0, L] with J+1 interior points x_j = j dx.

    dx = L/(J+1) and dt = lam*dx, so x_0 = 0 and x_{J+1} = L.
    """

    J: int
    L: float = 1.0
    lam: float = 1.0

    def __post_init__(self) -> None:
        if self.J < 1:
            raise ValueError("J must be >= 1")
        if self.L <= 0 or self.lam <= 0:
            raise ValueError("L and lam must be positive")

    @property
    def dx(self) -> float:
        return self.L / (self.J + 1)

    @property
    def dt(self) -> float:
        return self.lam * self.dx

    @property
    def xs(self) -> np.ndarray:
        """Interior nodes x_0, ..., x_J."""
        return np.arange(self.J + 1) * self.dx


@dataclass(frozen=True)
class IterationMatrix:
    """Dense one-step matrix with the closures folded in, plus metadata."""

    entries: np.ndarray
    scheme_name: str
    k: int
    J: int

    def __post_init__(self) -> None:
        e = np.asarray(self.entries, dtype=np.float64)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("entries must be a square matrix")
        if e.shape[0] != self.J + 1:
            raise ValueError("matrix dimension must equal J + 1")
        object.__setattr__(self, "entries", e)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def _check_interval_sizes(scheme: Scheme, k: int, n_points: int) -> BoundaryConfig:
    cfg = BoundaryConfig(k=k, left_ghost_count=scheme.r, right_ghost_count=scheme.p)
    cfg.require_grid(n_points)
    if n_points < scheme.r + scheme.p:
        raise ValueError(
            f"grid with {n_points} points is narrower than the stencil "
            f"(r + p = {scheme.r + scheme.p})"
        )
    return cfg


def step_interval(scheme: Scheme, k: int, u: np.ndarray) -> np.ndarray:
    """One interval step: ghosts recomputed from u, stencil applied at 0..J.

    Ghost values are never persisted; they are rebuilt from the current
    state on every call.
    """
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 1:
        raise ValueError("state must be one-dimensional")
    _check_interval_sizes(scheme, k, u.size)
    r, p = scheme.r, scheme.p
    ext = np.empty(u.size + r + p, dtype=np.float64)
    ext[:r] = fill_left_ghosts(r)
    ext[r:r + u.size] = u
    if p > 0:
        ext[r + u.size:] = fill_right_ghosts(u[-k:], p, k)
    # correlate computes out[j] = sum_m ext[j+m] c[m] = sum_l a_l u_{j+l}
    return np.correlate(ext, scheme.coeffs_float, mode="valid")


def assemble_matrix(scheme: Scheme, k: int, J: int) -> IterationMatrix:
    """Assemble the dense iteration matrix column by column from unit vectors.

    Column j is one interval step of the j-th basis vector, so the stepper
    remains the single source of truth and displayed matrices stay available
    as independent test oracles.
    """
    n = J + 1
    if n > MAX_DENSE_DIMENSION:
        raise ValueError(f"J + 1 = {n} exceeds dense guard {MAX_DENSE_DIMENSION}")
    _check_interval_sizes(scheme, k, n)
    A = np.zeros((n, n), dtype=np.float64)
    e = np.zeros(n, dtype=np.float64)
    for j in range(n):
        e[j] = 1.0
        A[:, j] = step_interval(scheme, k, e)
        e[j] = 0.0
    return IterationMatrix(entries=A, scheme_name=scheme.name, k=k, J=J)


# ---------------------------------------------------------------------------
# exact finite-support sequences


@dataclass(frozen=True)
class SupportedSequence:
    """A finitely supported sequence: values[i] sits at index offset + i."""

    values: np.ndarray
    offset: int

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError("values must be one-dimensional")
        object.__setattr__(self, "values", v)

    @property
    def support(self) -> tuple[int, int]:
        """Smallest and largest index of the stored window (inclusive)."""
        return self.offset, self.offset + self.values.size - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def value_at(self, j: int) -> float:
        i = j - self.offset
        if 0 <= i < self.values.size:
            return float(self.values[i])
        return 0.0

    def trimmed(self, tol: float = 0.0) -> "SupportedSequence":
        """Drop leading/trailing entries with |value| <= tol."""
        nz = np.where(np.abs(self.values) > tol)[0]
        if nz.size == 0:
            return SupportedSequence(values=np.zeros(1), offset=self.offset)
        return SupportedSequence(
            values=self.values[nz[0]:nz[-1] + 1], offset=self.offset + int(nz[0])
        )


def step_lattice(scheme: Scheme, u: SupportedSequence) -> SupportedSequence:
    """Whole-lattice convolution step; support widens to [m - p, M + r]."""
    r, p = scheme.r, scheme.p
    pad = np.zeros(p + r)
    ext = np.concatenate([pad, u.values, pad])
    out = np.correlate(ext, scheme.coeffs_float, mode="valid")
    return SupportedSequence(values=out, offset=u.offset - p)


def step_halfline_inflow(scheme: Scheme, u: SupportedSequence) -> SupportedSequence:
    """Half-line step on j >= 0 with zero Dirichlet ghosts at j < 0.

    The stored window is grown on the right by r each step (finite
    propagation speed), so the update is exact: no second boundary exists.
    """
    if u.offset < 0:
        raise ValueError("inflow half-line state must be supported on j >= 0")
    r, p = scheme.r, scheme.p
    # realign the window to start at j = 0 so the Dirichlet ghosts sit below it
    values = np.concatenate([np.zeros(u.offset), u.values])
    ext = np.concatenate([np.zeros(r), values, np.zeros(p + r)])
    out = np.correlate(ext, scheme.coeffs_float, mode="valid")
    return SupportedSequence(values=out, offset=0)


def step_halfline_outflow(
    scheme: Scheme, k: int, u: SupportedSequence, J: int
) -> SupportedSequence:
    """Half-line step on j <= J with order-k extrapolation ghosts above J.

    The stored window always reaches J (zeros are kept there since the
    extrapolation tail is anchored at the boundary) and grows on the left by
    p each step.
    """
    m, M = u.support
    if M > J:
        raise ValueError("outflow half-line state must be supported on j <= J")
    cfg = BoundaryConfig(k=k, left_ghost_count=scheme.r, right_ghost_count=scheme.p)
    r, p = scheme.r, scheme.p
    # extend the stored window up to the boundary index J
    values = np.concatenate([u.values, np.zeros(J - M)])
    cfg.require_grid(values.size)
    ghosts = fill_right_ghosts(values[-k:], p, k) if p > 0 else []
    ext = np.concatenate([np.zeros(r + p), values, ghosts])
    out = np.correlate(ext, scheme.coeffs_float, mode="valid")
    return SupportedSequence(values=out, offset=m - p)


# ---------------------------------------------------------------------------
# matrix export


def _atomic_write_bytes(path: str, payload: bytes) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_matrix(A: IterationMatrix, path: str, csv_limit: int = 64) -> list[str]:
    """Write column-major float64 binary plus a JSON sidecar; CSV for small n.

    Returns the list of files written. The sidecar at path + '.json' holds
    n, scheme, k and J; a CSV copy at path + '.csv' is added when
    n <= csv_limit.
    """
    written = []
    _atomic_write_bytes(path, A.entries.flatten(order="F").tobytes())
    written.append(path)
    sidecar = {"n": A.n, "scheme": A.scheme_name, "k": A.k, "J": A.J}
    _atomic_write_bytes(
        path + ".json", (json.dumps(sidecar, indent=2) + "\n").encode()
    )
    written.append(path + ".json")
    if A.n <= csv_limit:
        rows = "\n".join(
            ",".join(repr(float(x)) for x in row) for row in A.entries
        )
        _atomic_write_bytes(path + ".csv", (rows + "\n").encode())
        written.append(path + ".csv")
    return written


def load_matrix(path: str) -> IterationMatrix:
    """Read a matrix written by save_matrix (binary + sidecar)."""
    with open(path + ".json", "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    n = int(meta["n"])
    raw = np.fromfile(path, dtype=np.float64)
    if raw.size != n * n:
        raise ValueError(f"{path}: expected {n * n} float64 entries, found {raw.size}")
    entries = raw.reshape((n, n), order="F")
    return IterationMatrix(
        entries=entries, scheme_name=str(meta["scheme"]), k=int(meta["k"]),
        J=int(meta["J"]),
    )
