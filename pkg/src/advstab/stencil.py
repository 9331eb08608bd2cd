"""Scheme definitions and Fourier-symbol analysis.

A scheme advances a grid function one time step through

    u_j^{n+1} = sum_{l=-r}^{p} a_l u_{j+l}^n,

with coefficients a_l kept as exact rationals. Everything spectral
(amplification factor, von Neumann supremum, group velocities, unimodular
modes) is computed from the float-converted coefficients; the conversion
happens exactly once, at construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

RationalLike = Fraction | int | float | str

__all__ = [
    "AmplificationSample",
    "Scheme",
    "WaveMode",
    "amplification_factor",
    "builtin",
    "builtin_names",
    "consistency_residuals",
    "group_velocity",
    "load_scheme",
    "save_scheme",
    "unimodular_modes",
    "von_neumann_sup",
]


def _as_fraction(x: RationalLike) -> Fraction:
    """Convert int/float/Fraction/'num/den' string to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        # binary floats are dyadic rationals; this conversion is exact
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational number")


@dataclass(frozen=True)
class Scheme:
    """An explicit one-step scheme with stencil extent [-r, p].

    Attributes:
        name: identifier used in reports and file metadata.
        r: number of stencil points to the left of j.
        p: number of stencil points to the right of j.
        coefficients: exact rationals a_{-r}, ..., a_p, in that order.
        lam: CFL ratio dt/dx, exact rational.
        velocity: transport velocity a, exact rational.
    """

    name: str
    r: int
    p: int
    coefficients: tuple[Fraction, ...]
    lam: Fraction
    velocity: Fraction
    coeffs_float: np.ndarray = field(init=False, repr=False, compare=False)
    ells: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.r < 0 or self.p < 0:
            raise ValueError("stencil extents r, p must be nonnegative")
        if len(self.coefficients) != self.r + self.p + 1:
            raise ValueError(
                f"expected {self.r + self.p + 1} coefficients for r={self.r}, "
                f"p={self.p}, got {len(self.coefficients)}"
            )
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        # endpoint coefficients define the stencil extent; a zero endpoint is
        # tolerated only when the extent on that side is already zero
        if self.r > 0 and self.coefficients[0] == 0:
            raise ValueError("a_{-r} must be nonzero when r > 0")
        if self.p > 0 and self.coefficients[-1] == 0:
            raise ValueError("a_p must be nonzero when p > 0")
        # single documented rational-to-float conversion point
        object.__setattr__(
            self,
            "coeffs_float",
            np.array([float(c) for c in self.coefficients], dtype=np.float64),
        )
        object.__setattr__(
            self, "ells", np.arange(-self.r, self.p + 1, dtype=np.int64)
        )
        self.coeffs_float.setflags(write=False)
        self.ells.setflags(write=False)

    @property
    def lam_float(self) -> float:
        return float(self.lam)

    @property
    def velocity_float(self) -> float:
        return float(self.velocity)

    @property
    def lam_a(self) -> float:
        """The product (dt/dx) * a as a float."""
        return float(self.lam * self.velocity)

    def coefficient(self, ell: int) -> Fraction:
        """Exact coefficient a_ell; zero outside [-r, p]."""
        if -self.r <= ell <= self.p:
            return self.coefficients[ell + self.r]
        return Fraction(0)


@dataclass(frozen=True)
class AmplificationSample:
    """The symbol C(theta) = sum a_l e^(i l theta) at one frequency."""

    theta: float
    value: complex
    modulus: float


@dataclass(frozen=True)
class WaveMode:
    """A unimodular plane-wave mode supported by the scheme."""

    theta: float
    z: complex
    kappa: complex
    group_velocity: float
    modulus_excess: float


def consistency_residuals(scheme: Scheme) -> tuple[float, float]:
    """Consistency residuals r0 = sum(a_l) - 1 and r1 = sum(l a_l) + lam*a.

    Both sums run in exact rational arithmetic and are converted to float
    at the end, so schemes whose rationals cancel exactly report exact zeros.
    """
    s0 = sum(scheme.coefficients, Fraction(0)) - 1
    s1 = sum(
        (ell * c for ell, c in zip(range(-scheme.r, scheme.p + 1), scheme.coefficients)),
        Fraction(0),
    ) + scheme.lam * scheme.velocity
    return float(s0), float(s1)


def amplification_factor(scheme: Scheme, theta: float) -> AmplificationSample:
    """Evaluate the Fourier symbol C(theta) from float coefficients."""
    value = complex(np.sum(scheme.coeffs_float * np.exp(1j * scheme.ells * theta)))
    return AmplificationSample(theta=float(theta), value=value, modulus=abs(value))


def _symbol_modulus(scheme: Scheme, thetas: np.ndarray) -> np.ndarray:
    phases = np.exp(1j * np.outer(thetas, scheme.ells))
    return np.abs(phases @ scheme.coeffs_float)


def _refine_local_max(scheme: Scheme, lo: float, hi: float) -> tuple[float, float]:
    """Maximize |C| on [lo, hi] by bounded scalar minimization of -|C|."""
    res = minimize_scalar(
        lambda t: -abs(np.sum(scheme.coeffs_float * np.exp(1j * scheme.ells * t))),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-14},
    )
    return float(res.x), float(-res.fun)


def _local_maxima(scheme: Scheme, n_samples: int) -> list[tuple[float, float]]:
    """Refined local maxima of |C| over one period, sampled circularly."""
    thetas = np.linspace(-np.pi, np.pi, n_samples, endpoint=False)
    mods = _symbol_modulus(scheme, thetas)
    is_max = (mods > np.roll(mods, 1)) & (mods >= np.roll(mods, -1))
    step = thetas[1] - thetas[0]
    out = []
    for i in np.where(is_max)[0]:
        t, m = _refine_local_max(scheme, thetas[i] - step, thetas[i] + step)
        out.append((t, m))
    if not out:
        # constant modulus (e.g. pure shift); report theta = 0
        out.append((0.0, float(mods[0])))
    return out


def von_neumann_sup(
    scheme: Scheme, n_samples: int = 2**14, refine_tol: float = 1e-12
) -> tuple[float, list[float]]:
    """Global maximum of |C(theta)| over one period plus its locations.

    Dense sampling locates candidate maxima; each is refined by bounded
    golden-section search. All refined local maximizers whose modulus comes
    within refine_tol of the supremum are reported.
    """
    min_samples = 4 * (scheme.r + scheme.p)
    if n_samples < max(min_samples, 4):
        raise ValueError(f"n_samples must be at least {max(min_samples, 4)}")
    maxima = _local_maxima(scheme, n_samples)
    sup = max(m for _, m in maxima)
    argmax = sorted(t for t, m in maxima if m >= sup - refine_tol)
    return sup, argmax


def group_velocity(scheme: Scheme, theta: float) -> float:
    """Group velocity -(1/lam) * Im(C'(theta)/C(theta)).

    Raises ValueError where C(theta) = 0 since the quantity is undefined.
    """
    phase = np.exp(1j * scheme.ells * theta)
    c = np.sum(scheme.coeffs_float * phase)
    # relative cutoff: a true zero of C evaluates to coefficient-scale noise
    if abs(c) <= 1e-13 * float(np.sum(np.abs(scheme.coeffs_float))):
        raise ValueError(f"group velocity undefined: C({theta}) = 0")
    dc = np.sum(scheme.coeffs_float * 1j * scheme.ells * phase)
    return float(-np.imag(dc / c) / scheme.lam_float)


def unimodular_modes(
    scheme: Scheme, tol: float = 1e-4, n_samples: int = 2**14
) -> list[WaveMode]:
    """All frequencies where |C| touches the unit circle, with group velocities.

    Under the von Neumann condition such points are tangential local maxima
    of |C|, so they are located as refined local maxima with |C| >= 1 - tol.
    Raises ValueError when sup|C| exceeds 1 + tol: such a scheme is
    l2-unstable on the whole lattice and has no meaningful mode list.
    """
    sup, _ = von_neumann_sup(scheme, n_samples=n_samples)
    if sup > 1.0 + tol:
        raise ValueError(
            f"scheme violates the von Neumann condition: sup|C| = {sup:.6e} "
            f"exceeds 1 + tol = {1 + tol:.6e}; the scheme is unstable on the lattice"
        )
    modes: list[WaveMode] = []
    for t, m in _local_maxima(scheme, n_samples):
        if m < 1.0 - tol:
            continue
        if any(abs(t - prev.theta) < 1e-8 for prev in modes):
            continue
        z = amplification_factor(scheme, t).value
        modes.append(
            WaveMode(
                theta=t,
                z=z,
                kappa=complex(np.exp(1j * t)),
                group_velocity=group_velocity(scheme, t),
                modulus_excess=m - 1.0,
            )
        )
    modes.sort(key=lambda mode: mode.theta)
    return modes


# ---------------------------------------------------------------------------
# builtin schemes


def _three_point(lam_a: float, nu: float, name: str | None = None) -> Scheme:
    la = _as_fraction(lam_a)
    nu_f = _as_fraction(nu)
    a_m1 = (la + nu_f) / 2
    a_0 = 1 - nu_f
    a_1 = (nu_f - la) / 2
    coeffs: list[Fraction] = [a_m1, a_0, a_1]
    r, p = 1, 1
    # exact-zero endpoints shrink the declared stencil extent
    if coeffs[-1] == 0:
        coeffs.pop()
        p = 0
    if coeffs[0] == 0:
        coeffs.pop(0)
        r = 0
    return Scheme(
        name=name or f"three-point({float(la)},{float(nu_f)})",
        r=r,
        p=p,
        coefficients=tuple(coeffs),
        lam=Fraction(1),
        velocity=la,
    )


_COEFF1 = (
    Fraction(20133, 704759), Fraction(-30433, 894654), Fraction(20476, 371655),
    Fraction(12703, 838076), Fraction(75599, 770583), Fraction(31384, 945409),
    Fraction(-4015, 85641), Fraction(261251, 274289), Fraction(53837, 928392),
    Fraction(-27478, 587215), Fraction(-54064, 714213), Fraction(-27635, 674698),
    Fraction(-31244, 798847), Fraction(23091, 711760), Fraction(1864, 178339),
)

_COEFF2 = (
    Fraction(17151, 869039), Fraction(-9591, 473236), Fraction(55269, 926798),
    Fraction(-1854, 92119), Fraction(8983, 71254), Fraction(32579, 620922),
    Fraction(-47474, 813983), Fraction(739673, 796040), Fraction(2966, 34841),
    Fraction(-19830, 397889), Fraction(-71152, 650153), Fraction(-21338, 716071),
    Fraction(-10189, 548431), Fraction(19029, 761263), Fraction(8820, 964529),
)


def builtin_names() -> list[str]:
    return [
        "three-point",
        "lax-friedrichs",
        "upwind",
        "lax-wendroff",
        "identity",
        "coeff1",
        "coeff2",
    ]


def builtin(
    name: str, lam_a: float | None = None, nu: float | None = None
) -> Scheme:
    """Construct a named builtin scheme.

    three-point requires lam_a and nu; lax-friedrichs, upwind and
    lax-wendroff require lam_a only; identity, coeff1 and coeff2 take no
    parameters. coeff1 and coeff2 are wide (r = p = 7) design examples with
    lam = 1 and velocity 1 whose rational coefficients only approximately
    satisfy consistency; their measured residuals ship in the reference
    manifest rather than being asserted to zero.
    """
    key = name.strip().lower()
    if key == "three-point":
        if lam_a is None or nu is None:
            raise ValueError("three-point requires lam_a and nu")
        return _three_point(lam_a, nu)
    if key == "lax-friedrichs":
        if lam_a is None:
            raise ValueError("lax-friedrichs requires lam_a")
        return _three_point(lam_a, 1.0, name=f"lax-friedrichs({lam_a})")
    if key == "upwind":
        if lam_a is None:
            raise ValueError("upwind requires lam_a")
        return _three_point(lam_a, lam_a, name=f"upwind({lam_a})")
    if key == "lax-wendroff":
        if lam_a is None:
            raise ValueError("lax-wendroff requires lam_a")
        la = _as_fraction(lam_a)
        return _three_point(lam_a, float(la * la), name=f"lax-wendroff({lam_a})")
    if key == "identity":
        return Scheme(
            name="identity",
            r=0,
            p=0,
            coefficients=(Fraction(1),),
            lam=Fraction(1),
            velocity=Fraction(0),
        )
    if key == "coeff1":
        return Scheme(
            name="coeff1", r=7, p=7, coefficients=_COEFF1,
            lam=Fraction(1), velocity=Fraction(1),
        )
    if key == "coeff2":
        return Scheme(
            name="coeff2", r=7, p=7, coefficients=_COEFF2,
            lam=Fraction(1), velocity=Fraction(1),
        )
    raise ValueError(f"unknown builtin scheme {name!r}; known: {builtin_names()}")


# ---------------------------------------------------------------------------
# scheme files


def _fraction_to_json(x: Fraction) -> str | int:
    if x.denominator == 1:
        return int(x)
    return f"{x.numerator}/{x.denominator}"


def save_scheme(scheme: Scheme, path: str) -> None:
    """Write a scheme as JSON with exact rationals in 'num/den' form."""
    doc = {
        "name": scheme.name,
        "r": scheme.r,
        "p": scheme.p,
        "lambda": _fraction_to_json(scheme.lam),
        "a": _fraction_to_json(scheme.velocity),
        "coefficients": [_fraction_to_json(c) for c in scheme.coefficients],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_scheme(path: str) -> Scheme:
    """Load a scheme JSON file; rationals as 'num/den' strings or numbers."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        return Scheme(
            name=str(doc["name"]),
            r=int(doc["r"]),
            p=int(doc["p"]),
            coefficients=tuple(_as_fraction(c) for c in doc["coefficients"]),
            lam=_as_fraction(doc["lambda"]),
            velocity=_as_fraction(doc["a"]),
        )
    except KeyError as exc:
        raise ValueError(f"scheme file {path} is missing field {exc}") from exc
