import logging

from btl.commands import UnsupportedPairingError
from btl.models.domain_types import DomainKind
from btl.models.reports import ExactReport
from btl.services import exact

logger = logging.getLogger(__name__)


def closed_form_spec(config) -> exact.ClosedFormSpec:
    """Closed-form family for the configured domain; --dimension lifts disks and annuli to N dimensions."""
    params = config.domain.params
    if config.domain.kind == DomainKind.DISK:
        return exact.BallSpec(dimension=config.dimension, radius=params.radius, delta=config.delta)
    if config.domain.kind == DomainKind.ANNULUS:
        return exact.ShellSpec(dimension=config.dimension, inner_radius=params.inner_radius,
                               outer_radius=params.outer_radius, delta=config.delta)
    if config.domain.kind == DomainKind.RECTANGLE:
        return exact.BoxSpec(half_lengths=params.half_lengths, delta=config.delta)
    raise UnsupportedPairingError(f"No closed form for domain kind '{config.domain.kind.value}'")


def run_exact(config) -> ExactReport:
    spec = closed_form_spec(config)
    rigidity = exact.rigidity(spec)
    perimeter = exact.perimeter(spec)

    boundary_value = sigma = product = None
    if isinstance(spec, exact.BallSpec):
        boundary_value = exact.ball_torsion_function(spec, spec.radius)
        sigma = exact.ball_steklov_sigma1(spec)
        product = sigma * rigidity / perimeter

    logger.info(f"Closed form {config.domain.kind.value} (N = {spec.dimension}, delta = {config.delta}): T = {rigidity:.12g}")
    return ExactReport(
        kind=config.domain.kind.value,
        dimension=spec.dimension,
        delta=config.delta,
        rigidity=rigidity,
        perimeter=perimeter,
        volume=exact.volume(spec),
        boundary_value=boundary_value,
        l1_identity_defect=exact.l1_identity_defect(spec),
        steklov_sigma1=sigma,
        steklov_product=product,
    )
