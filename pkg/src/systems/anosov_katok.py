# systems/anosov_katok.py

"""
One stage of the approximation-by-conjugation construction on the annulus.

build_bump_diffeo produces g_hat with

  (i)   g_hat = id on a neighbourhood of C = {0} x S^1,
  (ii)  Leb(g_hat(B1)) > sigma_area for B1 = [r1, r2] x [0, theta),
  (iii) g_hat(B2) inside the eps-neighbourhood of C for B2 = [r1, r2] x [theta, 1),

as two fibre warps: an angular warp opening the sector [0, theta) to
[0, 1 - delta) across the band, then a radial warp that stretches the band over
almost the whole annulus in that sector and squeezes it into r < eps in the
remaining sector [1 - delta, 1).
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np

from src.core.errors import ConstructionError, InputError
from src.phase_space import PhaseSpace, elementwise_distance
from src.systems.diffeo import DiffeoSpec, FiberAxis, FiberWarp, annulus_grid, lift_diffeo
from src.systems.families import AnosovKatok, OrbitBudget, SystemSpec
from src.systems.orbits import orbit_array

logger = logging.getLogger(__name__)

IDENTITY_TOLERANCE = 1e-12
_DEFAULT_SLACK = 0.005
_MIN_SLACK = 1e-6


def build_bump_diffeo(r1: float, r2: float, theta: float, eps: float,
                      sigma_area: float) -> DiffeoSpec:
    """
    Build g_hat satisfying properties (i)-(iii).

    Args:
        r1, r2: Band radii, 0 < r1 < r2 < 1
        theta: Angular size of B1, 0 < theta < 1
        eps: Width of the target neighbourhood of C, 0 < eps < r1
        sigma_area: Required area of g_hat(B1), 0 < sigma_area < 1

    Raises:
        InputError: parameters outside their ranges
        ConstructionError: sigma_area not reachable (property (ii))
    """
    if not 0.0 < r1 < r2 < 1.0:
        raise InputError("need 0 < r1 < r2 < 1")
    if not 0.0 < theta < 1.0:
        raise InputError("need 0 < theta < 1")
    if not 0.0 < eps < r1:
        raise InputError("need 0 < eps < r1")
    if not 0.0 < sigma_area < 1.0:
        raise InputError("need 0 < sigma_area < 1")

    fixed = 0.5 * eps  # g_hat is the identity for r <= fixed
    # the image of B1 avoids r <= fixed, so its area is below 1 - fixed
    slack = min(_DEFAULT_SLACK, (1.0 - fixed - sigma_area) / 8.0)
    if slack < _MIN_SLACK:
        raise ConstructionError(
            "(ii)",
            f"Leb(g_hat(B1)) > {sigma_area} is out of reach: g_hat fixes r <= {fixed}, "
            f"so the image area stays below {1.0 - fixed}",
        )
    delta = gamma = slack

    opening = FiberWarp(
        axis=FiberAxis.ANGLE,
        knots=[0.0, theta, 1.0],
        base_values=[0.0, theta, 1.0],
        target_values=[0.0, 1.0 - delta, 1.0],
        weight_knots=[0.0, 0.5 * (fixed + r1), r1, 1.0],
        weight_values=[0.0, 0.0, 1.0, 1.0],
    )

    stretched_lo = fixed + slack * (r1 - fixed)
    stretched_hi = 1.0 - slack * (1.0 - r2)
    squeezed_lo = fixed + 0.2 * (eps - fixed)
    squeezed_hi = fixed + 0.8 * (eps - fixed)
    radial = FiberWarp(
        axis=FiberAxis.RADIUS,
        knots=[0.0, fixed, r1, r2, 1.0],
        base_values=[0.0, fixed, stretched_lo, stretched_hi, 1.0],
        target_values=[0.0, fixed, squeezed_lo, squeezed_hi, 1.0],
        weight_knots=[0.0, gamma, 1.0 - delta - gamma, 1.0 - delta, 1.0],
        weight_values=[1.0, 0.0, 0.0, 1.0, 1.0],
    )

    lower_bound = (1.0 - delta - 2.0 * gamma) * (stretched_hi - stretched_lo)
    if lower_bound <= sigma_area:
        raise ConstructionError(
            "(ii)", f"designed area bound {lower_bound:.6f} does not exceed {sigma_area}"
        )
    logger.debug(f"bump diffeo: slack={slack:.3g}, designed area bound {lower_bound:.6f}")
    return DiffeoSpec(primitives=[opening, radial])


@dataclass
class SublemmaReport:
    """Numerical check of properties (i)-(iii) for a candidate g_hat"""
    identity_ok: bool
    identity_displacement: float
    identity_margin: float
    area_ok: bool
    area_estimate: float
    area_error: float
    area_margin: float
    squeeze_ok: bool
    max_radius: float
    squeeze_margin: float
    grid_n: int

    @property
    def passed(self) -> bool:
        return self.identity_ok and self.area_ok and self.squeeze_ok

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out['passed'] = self.passed
        return out


def _band_area(g_hat: DiffeoSpec, r1: float, r2: float, theta: float, n: int) -> float:
    """Midpoint-rule integral of the Jacobian determinant over B1"""
    r = r1 + (r2 - r1) * (np.arange(n) + 0.5) / n
    t = theta * (np.arange(n) + 0.5) / n
    rr, tt = np.meshgrid(r, t, indexing='ij')
    pts = np.column_stack([rr.ravel(), tt.ravel()])
    cell = (r2 - r1) * theta / (n * n)
    return float(g_hat.jacobian_determinant(pts).sum() * cell)


def verify_sublemma(g_hat: DiffeoSpec, r1: float, r2: float, theta: float, eps: float,
                    sigma_area: float, grid_n: int = 200) -> SublemmaReport:
    """
    Check properties (i)-(iii) on grids.

    (i) uses the grid [0, eps/2] x S^1; (ii) integrates the Jacobian over B1 at
    grid_n and 2 * grid_n cells per side and takes their difference as the error
    bound; (iii) takes the largest image radius over a grid of B2.
    """
    if grid_n < 100:
        raise InputError("grid_n must be at least 100")
    space = PhaseSpace.annulus()

    near = annulus_grid(grid_n, r_range=(0.0, 0.5 * eps))
    displacement = float(elementwise_distance(space, g_hat.forward(near), near).max())

    coarse = _band_area(g_hat, r1, r2, theta, grid_n)
    fine = _band_area(g_hat, r1, r2, theta, 2 * grid_n)
    area_error = abs(fine - coarse)

    band = annulus_grid(grid_n, r_range=(r1, r2), theta_range=(theta, 1.0))
    max_radius = float(g_hat.forward(band)[:, 0].max())

    report = SublemmaReport(
        identity_ok=displacement <= IDENTITY_TOLERANCE,
        identity_displacement=displacement,
        identity_margin=IDENTITY_TOLERANCE - displacement,
        area_ok=fine - area_error > sigma_area,
        area_estimate=fine,
        area_error=area_error,
        area_margin=fine - area_error - sigma_area,
        squeeze_ok=max_radius < eps,
        max_radius=max_radius,
        squeeze_margin=eps - max_radius,
        grid_n=grid_n,
    )
    logger.info(
        f"Sublemma check: (i) {report.identity_ok}, (ii) {report.area_ok} "
        f"(area {fine:.4f} +/- {area_error:.2e}), (iii) {report.squeeze_ok}"
    )
    return report


def ak_map(h: Optional[DiffeoSpec], g: DiffeoSpec, alpha_prime: float) -> SystemSpec:
    """f' = h o g o R_alpha' o g^-1 o h^-1 as a SystemSpec on the annulus"""
    if not 0.0 < alpha_prime < 1.0:
        raise InputError("alpha_prime must lie in (0, 1)")
    family = AnosovKatok(g=g, h=h if h is not None else DiffeoSpec.identity(), alpha=alpha_prime)
    return SystemSpec(family=family, space=PhaseSpace.annulus())


def _rotate(x: np.ndarray, shift: float) -> np.ndarray:
    out = np.array(x, copy=True)
    out[:, 1] = np.mod(out[:, 1] + shift, 1.0)
    out[:, 1] = np.where(out[:, 1] >= 1.0, 0.0, out[:, 1])
    return out


def commutation_residual(g: DiffeoSpec, p: int, q: int, grid_n: int = 200) -> float:
    """Sup distance between g o R_(p/q) and R_(p/q) o g on a grid"""
    space = PhaseSpace.annulus()
    pts = annulus_grid(grid_n)
    shift = p / q
    return float(elementwise_distance(space, g.forward(_rotate(pts, shift)),
                                      _rotate(g.forward(pts), shift)).max())


def rational_residual(g: DiffeoSpec, p: int, q: int, grid_n: int = 200) -> float:
    """
    Sup distance between g o R_(p/q) o g^-1 and R_(p/q) on a grid.

    Zero up to rounding whenever g commutes with R_(p/q): the conjugated map
    at the rational stage is the rotation itself.
    """
    space = PhaseSpace.annulus()
    pts = annulus_grid(grid_n)
    shift = p / q
    conjugated = g.forward(_rotate(g.inverse(pts), shift))
    return float(elementwise_distance(space, conjugated, _rotate(pts, shift)).max())


def covering_residual(g_hat: DiffeoSpec, q: int, grid_n: int = 200) -> float:
    """Sup distance between pi o g and g_hat o pi for the lift g of g_hat"""
    space = PhaseSpace.annulus()
    g = lift_diffeo(g_hat, q)
    pts = annulus_grid(grid_n)

    def project(x: np.ndarray) -> np.ndarray:
        out = np.array(x, copy=True)
        out[:, 1] = np.mod(q * out[:, 1], 1.0)
        out[:, 1] = np.where(out[:, 1] >= 1.0, 0.0, out[:, 1])
        return out

    return float(elementwise_distance(space, project(g.forward(pts)), g_hat.forward(project(pts))).max())


def band_occupancy(spec: SystemSpec, x0: Any, n: int, theta: float, q: int = 1) -> float:
    """
    Fraction of the first n iterates whose (h o g)-preimage projects into
    the sector [0, theta) under pi(r, t) = (r, q * t).
    """
    family = spec.family
    if not isinstance(family, AnosovKatok):
        raise InputError("band_occupancy needs an anosov_katok system")
    points = orbit_array(spec, x0, OrbitBudget(iterations=n))
    base = family.conjugacy().inverse(points)
    angles = np.mod(q * base[:, 1], 1.0)
    return float(np.count_nonzero(angles < theta) / n)


def boundary_points(spec: SystemSpec, resolution: int) -> np.ndarray:
    """Image under h o g of an equispaced grid on C = {0} x S^1"""
    family = spec.family
    if not isinstance(family, AnosovKatok):
        raise InputError("boundary_points needs an anosov_katok system")
    circle = np.column_stack([np.zeros(resolution), (np.arange(resolution) + 0.5) / resolution])
    return family.conjugacy().forward(circle)
