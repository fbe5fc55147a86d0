import json
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator

from btl.config import BTL_DEFAULT_SEGMENTS

Point = Tuple[float, float]


class DomainKind(str, Enum):
    POLYGON = "polygon"
    DISK = "disk"
    ANNULUS = "annulus"
    RECTANGLE = "rectangle"
    MAPPED_DISK = "mapped_disk"


# Kind metadata: description, convexity, closed-form availability, curved boundary, default refinement level
DOMAIN_KIND_INFO: Dict[DomainKind, Dict[str, Any]] = {
    DomainKind.POLYGON: {
        "description": "Convex polygon given by its vertices",
        "convex": True,
        "closed_form": False,
        "curved": False,
        "default_level": 5,
    },
    DomainKind.DISK: {
        "description": "Disk (N-ball with --dimension) of given radius",
        "convex": True,
        "closed_form": True,
        "curved": True,
        "default_level": 2,
    },
    DomainKind.ANNULUS: {
        "description": "Annulus (N-shell with --dimension) between two radii",
        "convex": False,
        "closed_form": True,
        "curved": True,
        "default_level": 2,
    },
    DomainKind.RECTANGLE: {
        "description": "Centered rectangle / hyperrectangle with half-lengths",
        "convex": True,
        "closed_form": True,
        "curved": False,
        "default_level": 5,
    },
    DomainKind.MAPPED_DISK: {
        "description": "Image of the unit disk under a polynomial conformal map",
        "convex": False,
        "closed_form": False,
        "curved": True,
        "default_level": 2,
    },
}


class _Params(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class PolygonParams(_Params):
    vertices: List[Point] = Field(min_length=3)


class DiskParams(_Params):
    center: Point = (0.0, 0.0)
    radius: float = Field(default=1.0, gt=0.0)
    segments: int = Field(default=BTL_DEFAULT_SEGMENTS, ge=6)


class AnnulusParams(_Params):
    center: Point = (0.0, 0.0)
    inner_radius: float = Field(gt=0.0)
    outer_radius: float = Field(gt=0.0)
    segments: int = Field(default=BTL_DEFAULT_SEGMENTS, ge=6)

    @model_validator(mode="after")
    def _check_radii(self) -> "AnnulusParams":
        if self.inner_radius >= self.outer_radius:
            raise ValueError(f"inner_radius {self.inner_radius} must be below outer_radius {self.outer_radius}")
        return self


class RectangleParams(_Params):
    half_lengths: List[float] = Field(min_length=2)

    @field_validator("half_lengths")
    @classmethod
    def _positive(cls, value: List[float]) -> List[float]:
        if any(not math.isfinite(length) or length <= 0.0 for length in value):
            raise ValueError(f"half_lengths must be positive and finite, got {value}")
        return value


class MappedDiskParams(_Params):
    coefficients: List[Point] = Field(min_length=1, description="[re, im] of a_1..a_K")
    offset: Point = (0.0, 0.0)
    segments: int = Field(default=BTL_DEFAULT_SEGMENTS, ge=6)

    @model_validator(mode="after")
    def _check_map(self) -> "MappedDiskParams":
        from btl.services.conformal import ConformalMap

        ConformalMap.from_pairs(self.coefficients, self.offset).validate()
        return self


PARAMS_BY_KIND = {
    DomainKind.POLYGON: PolygonParams,
    DomainKind.DISK: DiskParams,
    DomainKind.ANNULUS: AnnulusParams,
    DomainKind.RECTANGLE: RectangleParams,
    DomainKind.MAPPED_DISK: MappedDiskParams,
}

DomainParams = Union[PolygonParams, DiskParams, AnnulusParams, RectangleParams, MappedDiskParams]


class DomainSpec(BaseModel):
    """A domain as stored in a domain file: {"kind": ..., "params": {...}}."""
    model_config = ConfigDict(frozen=True)

    kind: DomainKind
    params: DomainParams

    @field_validator("params", mode="before")
    @classmethod
    def _parse_params(cls, value: Any, info: ValidationInfo) -> Any:
        kind = info.data.get("kind")
        if kind is None:
            raise ValueError("params cannot be parsed without a valid kind")
        model = PARAMS_BY_KIND[kind]
        if isinstance(value, model):
            return value
        if isinstance(value, BaseModel):
            value = value.model_dump()
        return model.model_validate(value)

    @model_validator(mode="after")
    def _check_pairing(self) -> "DomainSpec":
        if not isinstance(self.params, PARAMS_BY_KIND[self.kind]):
            raise ValueError(f"params do not match kind '{self.kind.value}'")
        return self

    @property
    def info(self) -> Dict[str, Any]:
        return DOMAIN_KIND_INFO[self.kind]

    @property
    def is_convex(self) -> bool:
        return self.info["convex"]

    @property
    def planar(self) -> bool:
        if self.kind == DomainKind.RECTANGLE:
            return len(self.params.half_lengths) == 2
        return True

    def with_segments(self, segments: int) -> "DomainSpec":
        if not hasattr(self.params, "segments"):
            return self
        return DomainSpec(kind=self.kind, params=self.params.model_copy(update={"segments": segments}))

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "DomainSpec":
        with open(path, "r", encoding="utf-8") as handle:
            return cls.model_validate(json.load(handle))

    # Convenience constructors used by tests and the standard corpus

    @classmethod
    def polygon(cls, vertices) -> "DomainSpec":
        return cls(kind=DomainKind.POLYGON, params={"vertices": [tuple(map(float, v)) for v in vertices]})

    @classmethod
    def disk(cls, radius: float = 1.0, segments: int = BTL_DEFAULT_SEGMENTS) -> "DomainSpec":
        return cls(kind=DomainKind.DISK, params={"radius": radius, "segments": segments})

    @classmethod
    def annulus(cls, inner_radius: float, outer_radius: float, segments: int = BTL_DEFAULT_SEGMENTS) -> "DomainSpec":
        return cls(
            kind=DomainKind.ANNULUS,
            params={"inner_radius": inner_radius, "outer_radius": outer_radius, "segments": segments},
        )

    @classmethod
    def rectangle(cls, *half_lengths: float) -> "DomainSpec":
        return cls(kind=DomainKind.RECTANGLE, params={"half_lengths": list(half_lengths)})

    @classmethod
    def mapped_disk(cls, coefficients, segments: int = BTL_DEFAULT_SEGMENTS) -> "DomainSpec":
        pairs = [(complex(a).real, complex(a).imag) for a in coefficients]
        return cls(kind=DomainKind.MAPPED_DISK, params={"coefficients": pairs, "segments": segments})
