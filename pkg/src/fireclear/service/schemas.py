"""Pydantic request/response models for the clearing service."""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, Field

from .. import clearing, inverse_demand, network


class SystemModel(BaseModel):
    """JSON wire format of a financial system; row i of ``liabilities`` is
    ``[external, to bank 0, ..., to bank n-1]``."""

    n: int
    m: int
    liabilities: list[list[float]]
    liquid: list[float]
    holdings: list[list[float]]

    def to_core(self) -> network.FinancialSystem:
        return network.system_from_dict(self.model_dump())

    @classmethod
    def from_core(cls, system: network.FinancialSystem) -> "SystemModel":
        return cls(**network.system_to_dict(system))


class LinearIdfModel(BaseModel):
    type: Literal["linear"] = "linear"
    mu: list[float]
    cov: list[list[float]]
    alpha0: float
    alpha: list[float]


class ExponentialIdfModel(BaseModel):
    type: Literal["exponential"] = "exponential"


class FixedIdfModel(BaseModel):
    type: Literal["fixed"] = "fixed"
    inner: Union[LinearIdfModel, ExponentialIdfModel] = Field(discriminator="type")
    m_fixed: list[float]


IdfModel = Union[LinearIdfModel, ExponentialIdfModel, FixedIdfModel]


def idf_to_core(model: IdfModel):
    return inverse_demand.idf_from_config(model.model_dump())


class SolverOptions(BaseModel):
    tolerance: float = 1e-10
    max_iterations: int = 10_000
    default_tol: float = 1e-8
    rule: Literal["proportional"] = "proportional"

    def to_core(self) -> clearing.SolverConfig:
        return clearing.SolverConfig(
            tolerance=self.tolerance,
            max_iterations=self.max_iterations,
            default_tol=self.default_tol,
        )


class ValidateRequest(BaseModel):
    system: SystemModel


class ViolationModel(BaseModel):
    code: str
    message: str


class ValidateResponse(BaseModel):
    ok: bool
    errors: list[ViolationModel]


class SolveRequest(BaseModel):
    system: SystemModel
    idf: IdfModel = Field(discriminator="type")
    direction: Literal["greatest", "least", "fda"] = "greatest"
    options: SolverOptions = SolverOptions()
    include_trace: bool = False


class SolveReportModel(BaseModel):
    p: list[float]
    q: list[float]
    M: list[float]
    iterations: int
    residual: float
    converged: bool
    defaults: list[int]
    market_makers: list[int]
    direction: str

    @classmethod
    def from_core(cls, report: clearing.SolveReport) -> "SolveReportModel":
        return cls(**report.to_dict())


class SolveResponse(BaseModel):
    report: SolveReportModel
    trace: Optional[dict] = None


class EnumerateRequest(BaseModel):
    system: SystemModel
    idf: LinearIdfModel
    options: SolverOptions = SolverOptions()
    enumeration_cap: int = 20


class EnumerateResponse(BaseModel):
    solutions: list[SolveReportModel]


class CounterexampleRequest(BaseModel):
    options: SolverOptions = SolverOptions()


class EnumerationRow(BaseModel):
    assumed_makers: Union[int, list[int]]
    self_consistent: bool
    report: SolveReportModel


class CounterexampleResponse(BaseModel):
    greatest: SolveReportModel
    least: SolveReportModel
    enumeration: list[EnumerationRow]


class TableResponse(BaseModel):
    scenario: str
    columns: list[str]
    rows: list[dict]
    meta: dict
    summary: Optional[dict] = None


class SweepRequest(BaseModel):
    seed: int = 21
    shock_grid: Optional[list[float]] = None
    n: int = 50
    holdings: float = 4.0
    external_liab: float = 3.0
    alpha0: float = 0.1
    alpha: float = 0.1
    options: SolverOptions = SolverOptions()


class MonteCarloRequest(BaseModel):
    trials: int = 1000
    seed: int = 2024
    shock: float = 3.0
    price_threshold: float = 0.8
    n: int = 50
    holdings: float = 4.0
    external_liab: float = 3.0
    alpha0: float = 0.1
    alpha: float = 0.1
    options: SolverOptions = SolverOptions()


class DiversifyRequest(BaseModel):
    lambda_grid: Optional[list[float]] = None
    rhos: list[float] = [0.0, 0.1, 0.3, 0.5]
    locate_jumps: bool = True
    jump_tol: float = 1e-3
    options: SolverOptions = SolverOptions()


class EbaRequest(BaseModel):
    csv_text: Optional[str] = None
    fraction_grid: Optional[list[float]] = None
    alpha0: float = 5e-7
    alpha: float = 5e-7
    tolerance: float = 1e-4
    max_iterations: int = 20_000
