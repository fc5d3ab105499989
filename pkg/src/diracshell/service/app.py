"""FastAPI service wrapping the solver package.

Thin orchestration only: requests are validated by pydantic, couplings
with omega != 0 are gauge-reduced where the closed forms require it, and
solver exceptions are mapped to HTTP statuses (409 for regimes the theory
excludes, 422 for bad inputs). The CLI mounts this app in-process.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse, Response

from .. import approx, fiber, render, spectrum as spectrum_mod, validate
from ..coupling import reduce_omega
from ..errors import (
    ConfiningRegime,
    DiracShellError,
    NotLinear,
    UnsupportedRegime,
)
from ..fiber import FiberContext
from .models import (
    ApproxRequest,
    BandsRequest,
    FiberRequest,
    FiberResponse,
    PacketRequest,
    PacketResponse,
    ResolventCheckRequest,
    ResolventCheckResponse,
    SpectrumRequest,
    ValidateResponse,
)

app = FastAPI(title="diracshell", version="0.1.0")


@app.exception_handler(ConfiningRegime)
@app.exception_handler(UnsupportedRegime)
async def _regime_handler(request: Request, exc: DiracShellError):
    return JSONResponse(
        status_code=409,
        content={"error": type(exc).__name__, "detail": str(exc)},
    )


@app.exception_handler(DiracShellError)
async def _domain_handler(request: Request, exc: DiracShellError):
    return JSONResponse(
        status_code=422,
        content={"error": type(exc).__name__, "detail": str(exc)},
    )


@app.post("/bands")
def bands(req: BandsRequest):
    c = reduce_omega(req.coupling.to_coupling()).reduced
    if req.format == "svg":
        return Response(
            content=render.bands_svg(c, req.kmin, req.kmax, req.samples),
            media_type="image/svg+xml",
        )
    if req.format == "json":
        ks, columns = render.band_samples(c, req.kmin, req.kmax, req.samples)
        payload = {"k": ks.tolist()}
        for label, values, mask in columns:
            payload[label] = [v if m else None for v, m in zip(values.tolist(), mask.tolist())]
        return JSONResponse(content=payload)
    return PlainTextResponse(
        content=render.bands_csv(c, req.kmin, req.kmax, req.samples),
        media_type="text/csv",
    )


@app.post("/spectrum")
def spectrum(req: SpectrumRequest):
    c = reduce_omega(req.coupling.to_coupling()).reduced
    desc = spectrum_mod.assemble_spectrum(c)
    return JSONResponse(content=desc.to_json())


@app.post("/fiber", response_model=FiberResponse)
def fiber_endpoint(req: FiberRequest):
    ctx = FiberContext(coupling=req.coupling.to_coupling(), k=req.k)
    eigen = [z for z, _ in fiber.fiber_eigenvalues(ctx)]
    oracle = fiber.matching_oracle(ctx)
    return FiberResponse(eigenvalues=eigen, oracle=oracle)


@app.post("/approx")
def approx_endpoint(req: ApproxRequest):
    c = reduce_omega(req.coupling.to_coupling()).reduced
    report = approx.convergence_sweep(
        c, req.k, req.eps, l=req.branch, check=False
    )
    if req.format == "json":
        return PlainTextResponse(
            content=render.sweep_json(report), media_type="application/json"
        )
    return PlainTextResponse(content=render.sweep_csv(report), media_type="text/csv")


@app.post("/resolvent-check", response_model=ResolventCheckResponse)
def resolvent_check(req: ResolventCheckRequest):
    c = reduce_omega(req.coupling.to_coupling()).reduced
    est = approx.resolvent_norm_bound_check(c, req.k, req.eps, check=False)
    est0 = (
        est
        if req.k == 0.0
        else approx.resolvent_norm_bound_check(c, 0.0, req.eps, check=False)
    )
    bound = (1.0 + abs(req.k)) ** 2 * est0 * 1.1
    return ResolventCheckResponse(
        estimate=est, estimate_k0=est0, bound=bound, ok=est <= bound
    )


@app.post("/packet", response_model=PacketResponse)
def packet(req: PacketRequest):
    c = reduce_omega(req.coupling.to_coupling()).reduced
    candidates = [
        b
        for b in fiber.bands(c)
        if (req.branch is None or b.branch_id == req.branch)
        and any(lo < req.k0 < hi for lo, hi in b.domain)
    ]
    if not candidates:
        raise DiracShellError(f"no band contains k0 = {req.k0}")
    band = candidates[0]
    p = spectrum_mod.WavePacket(
        band=band, k0=req.k0, sigma_k=req.sigma_k, nodes=req.nodes
    )
    xs = req.x or np.linspace(-3.0, 3.0, 33).tolist()
    ys = req.y or np.linspace(-6.0, 6.0, 33).tolist()
    psi = spectrum_mod.propagate_packet_grid(p, xs, ys, req.t)
    mag = np.sqrt((np.abs(psi) ** 2).sum(axis=-1))
    try:
        v = spectrum_mod.group_velocity(band)
    except NotLinear:
        v = None
    return PacketResponse(
        group_velocity=v,
        band_branch=band.branch_id,
        x=list(xs),
        y=list(ys),
        magnitude=mag.tolist(),
    )


@app.post("/validate", response_model=ValidateResponse)
def validate_endpoint():
    report = validate.run_suite()
    return ValidateResponse(**report)
