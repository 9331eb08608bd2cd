"""Tour of the builtin schemes: coefficients, symbol checks, wave modes.

Prints, for every builtin, the exact rational coefficients, the residuals
of the two consistency conditions, the sup of the amplification modulus
over frequencies, and the table of unimodular modes with group velocities.
The two wide stencils amplify a narrow band of frequencies by about 1e-5
and are the interesting specimens; the three-point family is flat at 1.
"""

from __future__ import annotations

import math

from advstab import stencil


def describe(scheme: stencil.Scheme) -> None:
    print(f"\n{scheme.name}  (r = {scheme.r}, p = {scheme.p}, lambda*a = {scheme.lam_a})")
    coeffs = ", ".join(str(c) for c in scheme.coefficients)
    if len(coeffs) > 70:
        coeffs = coeffs[:67] + "..."
    print(f"  coefficients: {coeffs}")
    r0, r1 = stencil.consistency_residuals(scheme)
    print(f"  consistency residuals: order0 = {r0:.3e}, order1 = {r1:.3e}")
    sup, _ = stencil.von_neumann_sup(scheme)
    print(f"  sup |C(theta)| = {sup:.15f}  (excess {sup - 1.0:+.3e})")
    try:
        modes = stencil.unimodular_modes(scheme)
    except ValueError as exc:
        print(f"  modes: {exc}")
        return
    print("  unimodular modes:")
    for m in modes:
        print(
            f"    theta = {m.theta / math.pi:+.4f} pi   "
            f"|C| - 1 = {m.modulus_excess:+.2e}   v_g = {m.group_velocity:+.4f}"
        )


def main() -> None:
    for name in stencil.builtin_names():
        if name == "three-point":
            describe(stencil.builtin(name, lam_a=0.5, nu=0.7))
        elif name in ("lax-friedrichs", "upwind", "lax-wendroff"):
            describe(stencil.builtin(name, lam_a=0.7))
        else:
            describe(stencil.builtin(name))


if __name__ == "__main__":
    main()
