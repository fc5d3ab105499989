"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

from ..coupling import Coupling


class CouplingModel(BaseModel):
    eta: float = 0.0
    tau: float = 0.0
    lam: float = Field(0.0, alias="lambda")
    omega: float = 0.0
    mass: float = 0.0

    model_config = {"populate_by_name": True}

    def to_coupling(self) -> Coupling:
        return Coupling(
            eta=self.eta, tau=self.tau, lam=self.lam, omega=self.omega, mass=self.mass
        )


class BandsRequest(BaseModel):
    coupling: CouplingModel
    kmin: float = -3.0
    kmax: float = 3.0
    samples: int = 601
    format: Literal["csv", "svg", "json"] = "csv"

    @model_validator(mode="after")
    def _ranges(self):
        if self.samples < 2:
            raise ValueError("samples must be >= 2")
        if not self.kmin < self.kmax:
            raise ValueError("kmin must be < kmax")
        return self


class SpectrumRequest(BaseModel):
    coupling: CouplingModel


class FiberRequest(BaseModel):
    coupling: CouplingModel
    k: float = 0.0


class FiberResponse(BaseModel):
    eigenvalues: List[float]
    oracle: List[float]


class ApproxRequest(BaseModel):
    coupling: CouplingModel
    k: float = 0.0
    eps: List[float] = [1e-1, 1e-2, 1e-3]
    branch: int = 0
    format: Literal["csv", "json"] = "csv"

    @model_validator(mode="after")
    def _eps_positive(self):
        if not self.eps or any(e <= 0 for e in self.eps):
            raise ValueError("eps values must be positive")
        return self


class ResolventCheckRequest(BaseModel):
    coupling: CouplingModel
    k: float = 0.0
    eps: float = 0.05

    @model_validator(mode="after")
    def _eps_positive(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        return self


class ResolventCheckResponse(BaseModel):
    estimate: float
    estimate_k0: float
    bound: float
    ok: bool


class PacketRequest(BaseModel):
    coupling: CouplingModel
    k0: float = 0.0
    sigma_k: float = 0.3
    nodes: int = 512
    t: float = 0.0
    branch: Optional[Literal["single_d4", "plus", "minus"]] = None
    x: List[float] = []
    y: List[float] = []


class PacketResponse(BaseModel):
    group_velocity: Optional[float]
    band_branch: str
    x: List[float]
    y: List[float]
    magnitude: List[List[float]]  # |psi|(x_i, y_j)


class ValidateResponse(BaseModel):
    passed: bool
    results: List[dict]
