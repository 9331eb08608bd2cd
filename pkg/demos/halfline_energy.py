"""Each boundary alone is harmless: half-line runs and the energy balance.

Three quick experiments frame the interval instability as a genuine
two-boundary effect:

1. Inflow half-line: for stable three-point schemes the discrete L2 norm
   never increases, step by step. The summed energy balance behind that
   contraction is checked to rounding error at random parameters, including
   parameters far outside the stable box (the identity is algebraic).
2. Outflow half-line: with the wide amplifying stencils and extrapolation
   ghosts the norm stays bounded for all time; the running maximum of
   ||u^n|| / ||u^0|| stops moving once the transient has passed.
3. The interval matrix with both boundaries nevertheless has rho > 1.
"""

from __future__ import annotations

import numpy as np

from advstab import simulate, stencil
from advstab.operators import (
    SupportedSequence,
    assemble_matrix,
    step_halfline_inflow,
    step_halfline_outflow,
)
from advstab.spectral import spectral_radius


def inflow_contraction() -> None:
    print("inflow half-line, 200 steps, worst step-to-step norm ratio:")
    rng = np.random.default_rng(0)
    for lam_a, nu in ((0.5, 0.7), (0.7, 0.7), (0.9, 0.95)):
        scheme = stencil.builtin("three-point", lam_a=lam_a, nu=nu)
        u = SupportedSequence(values=rng.standard_normal(25), offset=2)
        worst = 0.0
        prev = u.norm()
        for _ in range(200):
            u = step_halfline_inflow(scheme, u)
            cur = u.norm()
            if prev > 1e-280:
                worst = max(worst, cur / prev)
            prev = cur
        print(f"  lam*a = {lam_a}, nu = {nu}: {worst:.15f}")


def energy_identity() -> None:
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(300):
        u = rng.standard_normal(rng.integers(2, 80))
        lam_a = rng.uniform(-0.5, 1.5)
        nu = rng.uniform(-0.5, 1.5)
        res = simulate.lemma1_identity_residual(u, lam_a, nu)
        worst = max(worst, res / float(np.dot(u, u)))
    print(f"\nenergy balance residual over 300 random draws: max {worst:.2e} * ||u||^2")


def outflow_power_bound() -> None:
    print("\noutflow half-line, running max of ||u^n|| / ||u^0||:")
    rng = np.random.default_rng(2)
    for name, k in (("coeff1", 1), ("coeff2", 2)):
        scheme = stencil.builtin(name)
        u = SupportedSequence(values=rng.standard_normal(31), offset=-30)
        norm0 = u.norm()
        running = 1.0
        marks = {}
        for n in range(1, 801):
            u = step_halfline_outflow(scheme, k, u, J=0)
            running = max(running, u.norm() / norm0)
            if n in (100, 200, 400, 800):
                marks[n] = running
        pretty = "  ".join(f"n<={n}: {v:.6f}" for n, v in marks.items())
        print(f"  {name} (k = {k}):  {pretty}")


def interval_amplifies_anyway() -> None:
    # coeff1 needs a resonant J for the round-trip gain to exceed 1
    print("\nthe interval couples the two boundaries and amplifies:")
    for name, k, J in (("coeff1", 1, 994), ("coeff2", 2, 250)):
        rho = spectral_radius(assemble_matrix(stencil.builtin(name), k, J)).rho
        print(f"  {name}, k = {k}, J = {J}: rho = {rho:.9f}")


def main() -> None:
    inflow_contraction()
    energy_identity()
    outflow_power_bound()
    interval_amplifies_anyway()


if __name__ == "__main__":
    main()
