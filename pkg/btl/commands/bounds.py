from btl.commands import UnsupportedPairingError
from btl.models.reports import BoundsReport, SweepReport
from btl.services.bounds_service import BoundsService, asymptotic_sweep
from btl.services.domain_profile import DomainProfile


def _planar_domain(config):
    spec = config.domain
    if not spec.planar:
        raise UnsupportedPairingError(f"'{config.command}' needs a planar domain")
    if config.segments is not None:
        spec = spec.with_segments(config.segments)
    return spec


def run_bounds(config) -> BoundsReport:
    spec = _planar_domain(config)
    profile = DomainProfile(spec, config.delta, level=config.level)
    summary, verdicts = BoundsService().verify(profile)
    return BoundsReport(kind=spec.kind.value, delta=config.delta, summary=summary, verdicts=verdicts)


def run_sweep(config) -> SweepReport:
    return asymptotic_sweep(_planar_domain(config), config.deltas, level=config.level)
