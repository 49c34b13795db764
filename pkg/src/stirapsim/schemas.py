"""Request and response models for the HTTP service.

These mirror the JSON config format one to one; deep validation (unit
parsing, physical ranges, axis names) stays in the config layer so the CLI
and the service reject bad input with identical messages.
"""

from __future__ import annotations

from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field


class ShapeModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["constant", "gaussian", "sum"]
    amplitude: Optional[float] = None
    center: Optional[float] = None
    width_divisor: Optional[float] = None
    terms: Optional[list["ShapeModel"]] = None

    def to_dict(self) -> dict:
        return self.model_dump(exclude_none=True)


class ScheduleModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    omega_a: ShapeModel
    omega_b: ShapeModel
    g_a: ShapeModel
    g_b: ShapeModel

    def to_dict(self) -> dict:
        return {k: v.to_dict() for k, v in (
            ("omega_a", self.omega_a), ("omega_b", self.omega_b),
            ("g_a", self.g_a), ("g_b", self.g_b),
        )}


class ParamsModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    omega0: Optional[float] = None
    g: Optional[float] = None
    tau: Optional[float] = None
    t0: Optional[float] = None
    kappa: Optional[Union[float, str]] = None
    gamma: Optional[Union[float, str]] = None
    width_divisor: Optional[float] = None
    n_max: Optional[int] = None
    t_start: Optional[float] = None
    t_end: Optional[float] = None
    step: Optional[float] = None
    record_every: Optional[int] = None

    def to_dict(self) -> dict:
        return self.model_dump(exclude_none=True)


class FlagsModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    normalize_pe: bool = False
    restrict_to_s: bool = False


class SimulateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    scenario: Literal["stirap", "fstirap", "custom"] = "stirap"
    params: ParamsModel = Field(default_factory=ParamsModel)
    schedule: Optional[ScheduleModel] = None
    flags: FlagsModel = Field(default_factory=FlagsModel)

    def to_config_dict(self) -> dict:
        data: dict = {
            "scenario": self.scenario,
            "params": self.params.to_dict(),
            "flags": self.flags.model_dump(),
        }
        if self.schedule is not None:
            data["schedule"] = self.schedule.to_dict()
        return data


class DarkcheckRequest(SimulateRequest):
    n_times: int = Field(default=101, ge=2, le=100_000)
    seed: Optional[int] = None


class ScanRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    base: ParamsModel = Field(default_factory=ParamsModel)
    scenario: Literal["stirap", "fstirap"] = "stirap"
    axes: list[tuple[str, list[float]]]
    outputs: Optional[list[str]] = None
    workers: int = Field(default=1, ge=1)
    point_cap: Optional[int] = Field(default=None, ge=1)
    objective: Optional[str] = None

    def to_spec_dict(self) -> dict:
        return {
            "base": self.base.to_dict(),
            "scenario": self.scenario,
            "axes": [[name, list(values)] for name, values in self.axes],
            "outputs": self.outputs,
            "workers": self.workers,
            "point_cap": self.point_cap,
            "objective": self.objective,
        }


class SimulateResponse(BaseModel):
    csv: str
    meta: dict[str, Any]


class DarkcheckResponse(BaseModel):
    csv: str
    meta: dict[str, Any]


class ScanResponse(BaseModel):
    csv: str
    columns: list[str]
    n_points: int
    n_failed: int
    best: Optional[dict[str, Any]] = None


class HealthResponse(BaseModel):
    status: str
    version: str


class ErrorResponse(BaseModel):
    kind: str
    message: str
