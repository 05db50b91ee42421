"""Scattering through a finite twisted section.

Two scenarios share one interface-matching machinery:

* ``embedded_cylinder`` - the twisted section sits inside an infinite
  untwisted cylinder, so the outside channel opens at the mode threshold
  (hbar^2 / 2 m R^2)(l^2 - 1/4).
* ``free_particle`` - the section is embedded in free space and the outside
  wavevector is simply sqrt(2 m E)/hbar.

Inside the section Z(z) = A e^{r1 z} + B e^{r2 z} with

    r_{1,2} = i l a -/+ sqrt((2m/hbar^2)(V_eff - E) - l^2 a^2),

principal square root (nonnegative imaginary part), so r1 is the decaying or
backward mode and r2 the growing or forward one. The four matching equations
are assembled literally from wavefunction continuity plus the
current-continuity derivative conditions; no twist terms are cancelled by
hand, so the twist insensitivity of the transmission emerges from the solve
rather than being built in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoPropagatingChannel, SingularMatch, ThresholdDegeneracy
from .geometry import CylinderGeometry, PhysicsParams
from .numeric import solve_linear_complex
from .spectrum import ModeNumbers, effective_potential, gauge_potential_star

EMBEDDED_CYLINDER = "embedded_cylinder"
FREE_PARTICLE = "free_particle"

# energies closer to the inside threshold than this are refused: the two
# region-II modes coalesce there and the matching system turns singular
THRESHOLD_WINDOW = 1e-9

FLAG_OK = "ok"
FLAG_SUB_THRESHOLD = "sub_threshold"
FLAG_DEGENERATE = "degenerate"


@dataclass(frozen=True)
class ScatteringScenario:
    """Geometry, twist rate, mode and particle constants of one setup.

    ``mode.n`` is irrelevant here; only the conserved azimuthal number l
    enters the longitudinal problem.
    """

    kind: str
    geom: CylinderGeometry
    alpha: float
    mode: ModeNumbers
    phys: PhysicsParams

    def __post_init__(self):
        if self.kind not in (EMBEDDED_CYLINDER, FREE_PARTICLE):
            raise ValueError(f"unknown scenario kind {self.kind!r}")

    @classmethod
    def embedded(cls, geom: CylinderGeometry, alpha: float, l: int,
                 phys: PhysicsParams = PhysicsParams()) -> "ScatteringScenario":
        return cls(EMBEDDED_CYLINDER, geom, float(alpha), ModeNumbers(l=l), phys)

    @classmethod
    def free(cls, geom: CylinderGeometry, alpha: float, l: int,
             phys: PhysicsParams = PhysicsParams()) -> "ScatteringScenario":
        return cls(FREE_PARTICLE, geom, float(alpha), ModeNumbers(l=l), phys)

    @property
    def inside_threshold(self) -> float:
        """Energy where the two region-II roots coalesce."""
        return gauge_potential_star(self.mode, self.geom, self.phys)

    @property
    def outside_threshold(self) -> float:
        """Propagation threshold of the outside regions."""
        if self.kind == EMBEDDED_CYLINDER:
            return gauge_potential_star(self.mode, self.geom, self.phys)
        return 0.0


@dataclass(frozen=True)
class RegionRoots:
    """Complex wavevectors of the two region-II modes; r1 + r2 = 2 i l a."""

    r1: complex
    r2: complex


@dataclass(frozen=True)
class ScatteringSolution:
    """Amplitudes and probabilities of one solved energy.

    Currents are reported in units of the incident flux hbar k / m, so
    ``current_in`` is 1 - |r|^2 and ``current_out`` is |t|^2 up to rounding.
    """

    r: complex
    t: complex
    A: complex
    B: complex
    transmission: float
    reflection: float
    current_in: float
    current_out: float


@dataclass(frozen=True)
class SweepPoint:
    energy: float
    transmission: float
    reflection: float
    flag: str


def region_roots(energy: float, scenario: ScatteringScenario) -> RegionRoots:
    """Roots r_{1,2} of the region-II mode equation at the given energy.

    Assembled from the raw twist-carrying potential; the l^2 a^2 under the
    square root cancels against the centrifugal g_zz term, which is exactly
    why the magnitude dynamics is twist free.
    """
    phys = scenario.phys
    v_eff = effective_potential(scenario.mode, scenario.geom, scenario.alpha,
                                phys).value
    l_alpha = scenario.mode.l * scenario.alpha
    arg = (v_eff - energy) / phys.hbar2_over_2m - l_alpha**2
    root = np.sqrt(complex(arg))  # principal branch: Im(root) >= 0
    r1 = 1j * l_alpha - root
    r2 = 1j * l_alpha + root
    if abs(r1 - r2) < 1e-12 * max(1.0, abs(r1), abs(r2)):
        raise ThresholdDegeneracy(
            f"degenerate region roots at energy {energy}")
    return RegionRoots(r1=complex(r1), r2=complex(r2))


def outside_wavevector(energy: float, scenario: ScatteringScenario) -> float:
    """Wavevector of the propagating outside channel; raises below threshold."""
    thr = scenario.outside_threshold
    if energy <= thr:
        raise NoPropagatingChannel(
            f"energy {energy} at or below the propagation threshold {thr}")
    return float(np.sqrt((energy - thr) / scenario.phys.hbar2_over_2m))


def probability_current(z_val: complex, z_deriv: complex, l: int, alpha: float,
                        phys: PhysicsParams) -> float:
    """Pointwise probability flux of a longitudinal amplitude.

    j = (i hbar / 2m)(Z conj(Z)' - conj(Z) Z') - (hbar/m) l a |Z|^2; the
    second term is the twist contribution and is what forces the modified
    derivative conditions at the interfaces.
    """
    standard = (1j * phys.hbar / (2.0 * phys.mass)
                * (z_val * np.conj(z_deriv) - np.conj(z_val) * z_deriv))
    twist_term = (phys.hbar / phys.mass) * l * alpha * abs(z_val)**2
    return float(standard.real - twist_term)


def solve_scattering(energy: float, scenario: ScatteringScenario) -> ScatteringSolution:
    """Solve the four interface-matching equations for (r, A, B, t).

    Z_I = e^{ikz} + r e^{-ikz}, Z_II = A e^{r1 z} + B e^{r2 z},
    Z_III = t e^{ikz}, with continuity of Z and of the probability current at
    z = 0 and z = L. The incident amplitude is fixed to one.
    """
    k = outside_wavevector(energy, scenario)
    if abs(energy - scenario.inside_threshold) < THRESHOLD_WINDOW:
        raise ThresholdDegeneracy(
            f"energy {energy} within {THRESHOLD_WINDOW} of the threshold "
            f"{scenario.inside_threshold}")
    roots = region_roots(energy, scenario)
    r1, r2 = roots.r1, roots.r2
    l_alpha = scenario.mode.l * scenario.alpha
    length = scenario.geom.length
    ik = 1j * k
    e1 = np.exp(r1 * length)
    e2 = np.exp(r2 * length)
    ek = np.exp(ik * length)

    # unknowns x = (r, A, B, t)
    matrix = np.array([
        [-1.0, 1.0, 1.0, 0.0],
        [ik, r1 - 1j * l_alpha, r2 - 1j * l_alpha, 0.0],
        [0.0, e1, e2, -ek],
        [0.0, (r1 - 1j * l_alpha) * e1, (r2 - 1j * l_alpha) * e2, -ik * ek],
    ], dtype=complex)
    rhs = np.array([1.0, ik, 0.0, 0.0], dtype=complex)
    try:
        x = solve_linear_complex(matrix, rhs)
    except SingularMatch as exc:
        raise SingularMatch(
            f"interface matching singular at energy {energy}: {exc}") from exc
    r_amp, a_amp, b_amp, t_amp = (complex(v) for v in x)

    phys = scenario.phys
    flux_unit = phys.hbar * k / phys.mass
    j_in = probability_current(1.0 + r_amp, ik * (1.0 - r_amp), scenario.mode.l,
                               0.0, phys)
    j_out = probability_current(t_amp * ek, ik * t_amp * ek, scenario.mode.l,
                                0.0, phys)
    return ScatteringSolution(
        r=r_amp, t=t_amp, A=a_amp, B=b_amp,
        transmission=abs(t_amp)**2, reflection=abs(r_amp)**2,
        current_in=j_in / flux_unit, current_out=j_out / flux_unit)


def transmission_sweep(scenario: ScatteringScenario,
                       energies) -> list[SweepPoint]:
    """Solve every energy of a strictly increasing grid, never aborting.

    Points without a propagating outside channel are reported with the
    sub_threshold flag and the convention T = 0, R = 1; points inside the
    degenerate-roots window get the degenerate flag and NaN probabilities.
    """
    energies = np.asarray(energies, dtype=float)
    if energies.ndim != 1 or energies.size < 1:
        raise ValueError("need a one-dimensional energy grid")
    if energies.size > 1 and not np.all(np.diff(energies) > 0.0):
        raise ValueError("energy grid must be strictly increasing")
    points = []
    for energy in energies:
        energy = float(energy)
        try:
            sol = solve_scattering(energy, scenario)
        except NoPropagatingChannel:
            points.append(SweepPoint(energy, 0.0, 1.0, FLAG_SUB_THRESHOLD))
        except (ThresholdDegeneracy, SingularMatch):
            points.append(SweepPoint(energy, float("nan"), float("nan"),
                                     FLAG_DEGENERATE))
        else:
            points.append(SweepPoint(energy, sol.transmission, sol.reflection,
                                     FLAG_OK))
    return points
