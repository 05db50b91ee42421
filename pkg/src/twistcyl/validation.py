"""Built-in cross-check suite behind the ``validate`` CLI command.

Desk-scale versions of the package's oracle checks: closed forms against
finite differences, interface matching against direct ODE integration, and
the twist-invariance identities. Every check is deterministic (fixed seeds,
fixed grids) so two runs produce byte-identical reports.
"""

from __future__ import annotations

import numpy as np

from .geometry import (CylinderGeometry, PhysicsParams, TwistProfile,
                       da_costa_potential, inverse_metric,
                       metric_from_embedding_fd, metric_from_strain,
                       strain_from_linear_twist, surface_curvatures,
                       twisted_metric, undeformed_metric)
from .numeric import (FDGrid, fd_bound_spectrum, integrate_adaptive,
                      ode_transmission_oracle, solve_linear_complex)
from .scattering import (FLAG_OK, ScatteringScenario, solve_scattering,
                         transmission_sweep)
from .spectrum import (ModeNumbers, bound_wavefunction, eigenenergy,
                       no_bound_states_below)

_PHYS = PhysicsParams()
_GEOM = CylinderGeometry(radius=1.0, length=1.0)


def _check_metric_det():
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(200):
        r = rng.uniform(0.1, 10.0)
        f = rng.uniform(-10.0, 10.0)
        g = twisted_metric(CylinderGeometry(r, 1.0), f)
        scale = abs(g.g_pp * g.g_zz) + g.g_pz**2
        worst = max(worst, abs(g.det - r * r) / scale)
    return worst <= 1e-14, f"max scaled deviation {worst:.2e} (tol 1e-14)"


def _check_inverse():
    # R^2 f^2 <= 625 keeps the cancellation in g g^-1 below the 1e-12 budget
    rng = np.random.default_rng(102)
    worst = 0.0
    eye = np.eye(2)
    for _ in range(200):
        r = rng.uniform(0.1, 5.0)
        f = rng.uniform(-5.0, 5.0)
        g = twisted_metric(CylinderGeometry(r, 1.0), f)
        worst = max(worst, np.max(np.abs(g.contract(inverse_metric(g)) - eye)))
    return worst <= 1e-12, f"max |g g^-1 - 1| {worst:.2e} (tol 1e-12)"


def _check_embedding():
    worst = 0.0
    for twist, z in ((TwistProfile.constant(0.5), 0.7),
                     (TwistProfile.linear_ramp(0.3), 2.0)):
        geom = CylinderGeometry(2.0, 5.0)
        fd = metric_from_embedding_fd(geom, twist, (0.3, z), step=1e-5)
        closed = twisted_metric(geom, twist.f(z))
        worst = max(worst, np.max(np.abs(fd.as_array() - closed.as_array())))
    return worst <= 1e-6, f"max component deviation {worst:.2e} (tol 1e-6)"


def _check_curvature():
    worst = 0.0
    for r in (0.5, 1.0, 2.0):
        geom = CylinderGeometry(r, 1.0)
        for f in (0.0, 0.5, 7.0):
            curv = surface_curvatures(geom, f)
            worst = max(worst, abs(curv.gaussian),
                        abs(curv.mean - 1.0 / (2.0 * r)),
                        abs(da_costa_potential(curv, _PHYS)
                            + _PHYS.hbar2_over_2m / (4.0 * r * r)))
    return worst <= 1e-14, f"max deviation {worst:.2e} (tol 1e-14)"


def _check_strain():
    worst = 0.0
    for r in (0.5, 1.0, 2.0):
        geom = CylinderGeometry(r, 1.0)
        for alpha in (0.0, 0.5, 1.5):
            built = metric_from_strain(undeformed_metric(geom),
                                       strain_from_linear_twist(geom, alpha))
            direct = twisted_metric(geom, alpha)
            worst = max(worst, np.max(np.abs(built.as_array()
                                             - direct.as_array())))
    return worst == 0.0, f"max component deviation {worst:.2e} (tol exact)"


def _check_fd_spectrum():
    worst = 0.0
    for l in (0, 1):
        vals = fd_bound_spectrum(l, _GEOM, TwistProfile.constant(0.0), _PHYS,
                                 FDGrid(400), 2)
        for n, val in zip((1, 2), vals):
            exact = eigenenergy(ModeNumbers(l=l, n=n), _GEOM, _PHYS)
            worst = max(worst, abs(val - exact) / abs(exact))
    return worst <= 1e-6, f"max relative error {worst:.2e} (tol 1e-6)"


def _check_fd_twist():
    base = fd_bound_spectrum(1, _GEOM, TwistProfile.constant(0.0), _PHYS,
                             FDGrid(400), 2)
    worst = 0.0
    for twist in (TwistProfile.constant(0.7), TwistProfile.linear_ramp(0.3)):
        vals = fd_bound_spectrum(1, _GEOM, twist, _PHYS, FDGrid(400), 2)
        worst = max(worst, float(np.max(np.abs(vals - base) / np.abs(base))))
    return worst <= 1e-6, f"max relative spread {worst:.2e} (tol 1e-6)"


def _check_density():
    mode = ModeNumbers(l=1, n=1)
    grid = (64, 64)
    ref = bound_wavefunction(mode, _GEOM, TwistProfile.constant(0.0), _PHYS,
                             grid).density()
    worst = 0.0
    for twist in (TwistProfile.constant(0.8), TwistProfile.linear_ramp(0.3)):
        dens = bound_wavefunction(mode, _GEOM, twist, _PHYS, grid).density()
        worst = max(worst, float(np.max(np.abs(dens - ref))))
    norm = bound_wavefunction(mode, _GEOM, TwistProfile.constant(0.5), _PHYS,
                              grid).norm()
    ok = worst <= 1e-14 and abs(norm - 1.0) <= 1e-6
    return ok, f"max density deviation {worst:.2e}, norm-1 {norm - 1.0:.2e}"


def _check_subthreshold():
    ok = True
    worst = np.inf
    for l in (0, 1):
        floor = no_bound_states_below(ModeNumbers(l=l), _GEOM, _PHYS)
        vals = fd_bound_spectrum(l, _GEOM, TwistProfile.constant(0.5), _PHYS,
                                 FDGrid(400), 3)
        margin = float(np.min(vals) - floor)
        worst = min(worst, margin)
        ok = ok and margin > 0.0
    return ok, f"smallest margin above the floor {worst:.2e}"


def _check_transparency():
    worst = 0.0
    for alpha in (0.0, 1.0, 2.0):
        scenario = ScatteringScenario.embedded(_GEOM, alpha, 1)
        for energy in np.linspace(0.4, 6.0, 40):
            sol = solve_scattering(float(energy), scenario)
            worst = max(worst, abs(sol.transmission - 1.0), sol.reflection)
    return worst <= 1e-10, f"max |T-1|, R {worst:.2e} (tol 1e-10)"


def _check_unitarity():
    worst = 0.0
    for l in (0, 1):
        scenario = ScatteringScenario.free(_GEOM, 0.5, l)
        for point in transmission_sweep(scenario, np.linspace(0.05, 8.0, 80)):
            if point.flag == FLAG_OK:
                worst = max(worst, abs(point.transmission + point.reflection
                                       - 1.0))
    return worst <= 1e-10, f"max |T+R-1| {worst:.2e} (tol 1e-10)"


def _check_free_alpha():
    energies = np.linspace(0.5, 8.0, 60)
    base = np.array([p.transmission for p in transmission_sweep(
        ScatteringScenario.free(_GEOM, 0.0, 1), energies)])
    worst = 0.0
    for alpha in (0.5, 1.0):
        cur = np.array([p.transmission for p in transmission_sweep(
            ScatteringScenario.free(_GEOM, alpha, 1), energies)])
        worst = max(worst, float(np.max(np.abs(cur - base))))
    return worst <= 1e-10, f"max |T_a - T_0| {worst:.2e} (tol 1e-10)"


def _check_resonances():
    scenario = ScatteringScenario.free(_GEOM, 0.3, 1)
    t = _PHYS.hbar2_over_2m
    v_star = scenario.inside_threshold
    worst = 0.0
    for n in (1, 2, 3):
        energy = v_star + t * (n * np.pi / _GEOM.length)**2
        sol = solve_scattering(float(energy), scenario)
        worst = max(worst, abs(sol.transmission - 1.0))
    return worst <= 1e-8, f"max |T-1| at predicted resonances {worst:.2e}"


def _check_cross_oracle():
    rng = np.random.default_rng(103)
    worst = 0.0
    for i in range(8):
        geom = CylinderGeometry(rng.uniform(0.6, 2.0), rng.uniform(0.6, 2.0))
        l = int(rng.integers(0, 3))
        alpha = rng.uniform(0.0, 1.2)
        maker = (ScatteringScenario.embedded if i % 2 == 0
                 else ScatteringScenario.free)
        scenario = maker(geom, alpha, l)
        energy = scenario.outside_threshold + rng.uniform(0.3, 5.0)
        if abs(energy - scenario.inside_threshold) < 1e-6:
            energy += 1e-3
        sol = solve_scattering(energy, scenario)
        t_ode, r_ode = ode_transmission_oracle(energy, scenario)
        worst = max(worst, abs(sol.transmission - t_ode),
                    abs(sol.reflection - r_ode))
    return worst <= 1e-8, f"max closed-form vs ODE deviation {worst:.2e}"


def _check_linear_solver():
    rng = np.random.default_rng(104)
    worst = 0.0
    for _ in range(200):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        b = rng.normal(size=4) + 1j * rng.normal(size=4)
        x = solve_linear_complex(a, b)
        res = np.max(np.abs(a @ x - b)) / np.max(np.abs(b))
        worst = max(worst, float(res))
    return worst <= 1e-10, f"max scaled residual {worst:.2e} (tol 1e-10)"


def _check_quadrature():
    worst = max(abs(integrate_adaptive(lambda x: x, 0.0, 1.0) - 0.5),
                abs(integrate_adaptive(np.sin, 0.0, np.pi) - 2.0),
                abs(integrate_adaptive(lambda x: 0.6 * x, 0.0, 2.0) - 1.2))
    return worst <= 1e-10, f"max deviation from knowns {worst:.2e}"


_CHECKS = (
    ("metric-determinant", _check_metric_det),
    ("metric-inverse-identity", _check_inverse),
    ("metric-embedding-oracle", _check_embedding),
    ("curvature-twist-invariance", _check_curvature),
    ("strain-metric-consistency", _check_strain),
    ("spectrum-fd-oracle", _check_fd_spectrum),
    ("spectrum-twist-invariance", _check_fd_twist),
    ("density-twist-invariance", _check_density),
    ("no-subthreshold-states", _check_subthreshold),
    ("embedded-transparency", _check_transparency),
    ("free-unitarity", _check_unitarity),
    ("free-twist-invariance", _check_free_alpha),
    ("free-resonances", _check_resonances),
    ("scattering-ode-oracle", _check_cross_oracle),
    ("linear-solver-residual", _check_linear_solver),
    ("quadrature-knowns", _check_quadrature),
)


def run_validation() -> tuple[list[str], bool]:
    """Run every check; returns the report lines and the overall verdict."""
    lines = []
    failed = 0
    for name, check in _CHECKS:
        ok, detail = check()
        failed += 0 if ok else 1
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name:<28s} {detail}")
    verdict = "OK" if failed == 0 else "FAILED"
    lines.append(f"{verdict}: {len(_CHECKS) - failed} of {len(_CHECKS)} "
                 "checks passed")
    return lines, failed == 0
