from __future__ import annotations

from typing import Annotated, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

PositiveFloat = Annotated[float, Field(gt=0, allow_inf_nan=False)]


class FluidParams(BaseModel):
    """Dimensional constants of the problem: gravity, vorticity, mass flux."""

    model_config = ConfigDict(frozen=True)

    g: PositiveFloat
    omega: PositiveFloat
    m: PositiveFloat


class StreamWindow(BaseModel):
    model_config = ConfigDict(frozen=True)

    s0: float
    sc: float
    uc: float                   # surface speed √(sc² − 2ωm) of the critical stream
    Q0: float
    Qc: float
    d0: float


class DepthPair(BaseModel):
    model_config = ConfigDict(frozen=True)

    q: float
    s_minus: float
    s_plus: float
    u_minus: float              # surface speeds of the two flows
    u_plus: float
    d_minus: float
    d_plus: float
    degenerate: bool = False


class NondimParams(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    epsilon: float
    lambda_: float = Field(alias="lambda")
    Q_tilde: Optional[float] = None


class AmplitudeBound(BaseModel):
    model_config = ConfigDict(frozen=True)

    theorem_bound: float
    refined_bound: float
    epsilon: float
    d_tilde_1: float
    branch: Literal["large_epsilon", "small_epsilon"]


class InequalityReport(BaseModel):
    """Sampled check of the expansion of Q̃(√2−δ) − ε√2 used in the bound."""

    epsilon: float
    n_samples: int
    max_identity_residual: float
    min_remainder: float
    max_violation: float


class InequalityCheck(BaseModel):
    """One inequality lhs vs rhs; margins are None when the right-hand side does not exist."""

    name: str
    lhs: float
    rhs: Optional[float] = None
    margin: Optional[float] = None
    margin_tilde: Optional[float] = None
    passed: bool
    vacuous: bool = False


class BoundCertificate(BaseModel):
    amplitude: float
    theorem_bound: float
    refined_bound: float
    Q: float
    Qc: float
    Q0: float
    d_minus_Q: Optional[float] = None
    d_plus_Q: Optional[float] = None
    d0: float
    inf_eta: float
    sup_eta: float
    epsilon: float
    lambda_: float = Field(alias="lambda")
    is_stream: bool
    checks: dict[str, InequalityCheck]
    passed: bool

    model_config = ConfigDict(populate_by_name=True)

    def flags(self) -> str:
        """Compact ``name:P|F|V`` summary used in sweep tables."""
        marks = []
        for name, check in self.checks.items():
            mark = "V" if check.vacuous else ("P" if check.passed else "F")
            marks.append(f"{name}:{mark}")
        return ";".join(marks)


class BranchSpec(BaseModel):
    """How far and where a sweep row continues its periodic branch.

    ``target_fraction = None`` follows the branch until the stagnation stop or
    until ``max_steps`` waves have been computed.
    """

    target_fraction: Optional[float] = Field(default=None, gt=0)   # half crest-to-trough, in units of d0
    window_fraction: float = Field(default=0.75, gt=0, lt=1)        # laminar parameter s0 + f·(sc − s0)
    max_steps: int = Field(default=60, ge=1)


class SweepRow(BaseModel):
    omega: float
    g: float
    m: float
    L: float = float("nan")
    amplitude: float = float("nan")
    theorem_bound: float
    refined_bound: float
    Q: float = float("nan")
    Qc: float
    Q0: float
    d_minus: float = float("nan")
    d_plus: float = float("nan")
    d0: float
    inf_eta: float = float("nan")
    sup_eta: float = float("nan")
    flags: str = ""
    error: Optional[str] = None


SWEEP_COLUMNS = (
    "omega", "g", "m", "L", "amplitude", "theorem_bound", "refined_bound",
    "Q", "Qc", "Q0", "d_minus", "d_plus", "d0", "inf_eta", "sup_eta", "flags",
)


class DecayReport(BaseModel):
    n_rows: int
    bound_slope: float
    refined_slope: float
    amplitude_slope: Optional[float] = None
    amplitude_slope_ci: Optional[tuple[float, float]] = None


class RefinementReport(BaseModel):
    levels: list[tuple[int, int]]
    residuals: list[float]
    ratio: float
    observed_order: float


class SolverSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_x: int = Field(default=64, ge=16, le=512)
    n_p: int = Field(default=40, ge=8, le=400)
    max_newton: int = Field(default=12, ge=1)
    interior_tol: float = Field(default=1e-10, gt=0)
    surface_tol: float = Field(default=1e-8, gt=0)
    amplitude_step: float = Field(default=2e-3, gt=0)
    min_step: float = Field(default=1e-6, gt=0)
    stagnation_fraction: float = Field(default=0.02, gt=0, lt=1)
    workers: int = Field(default=1, ge=1)

    @field_validator("n_x")
    @classmethod
    def _even_n_x(cls, value: int) -> int:
        if value % 2:
            raise ValueError("n_x must be even (the crest and trough are grid nodes)")
        return value


RUN_KEYS = ("g", "omega", "m", "l", "amplitude", "omegas", "output", "format")


class RunConfig(BaseModel):
    g: Optional[float] = Field(default=None, gt=0)
    omega: Optional[float] = Field(default=None, gt=0)
    m: Optional[float] = Field(default=None, gt=0)
    L: Optional[float] = Field(default=None, gt=0)
    amplitude: float = Field(default=0.0, ge=0)
    omegas: list[float] = []
    output: Optional[str] = None
    format: Literal["json", "csv"] = "json"

    @field_validator("omegas")
    @classmethod
    def _positive_omegas(cls, value: list[float]) -> list[float]:
        if any(not (w > 0) for w in value):
            raise ValueError("every vorticity must be strictly positive")
        return sorted(value)
