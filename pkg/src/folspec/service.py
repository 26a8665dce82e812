"""FastAPI service exposing the engine, builders and predictor over JSON."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import __version__
from .engine import (
    adiabatic_report,
    direct_dims,
    e_infinity_check,
    page_dims_direct,
    page_dims_iterated,
    stabilization_page,
)
from .errors import (
    BackendError,
    DimensionMismatchError,
    FolspecError,
    ModelSpecError,
    NotVaismanCompatible,
)
from .models import (
    build_from_presentation,
    build_kodaira_model,
    build_matrix_A,
    build_suspension_model,
    diophantine_probe,
    eigen_analysis,
    kodaira_model_spec,
    suspension_model_spec,
)
from .predictor import BettiVector, basic_betti_from_betti, predict_e2, vaisman_obstruction
from .schemas import (
    AdiabaticRequest,
    AdiabaticResponse,
    CheckRequest,
    CheckResponse,
    ClauseModel,
    DiophantineProbeModel,
    EInfinityModel,
    EmitRequest,
    EmitResponse,
    EulerEntryModel,
    MatrixARequest,
    MatrixAResponse,
    ModelSourceMixin,
    ModelSpecModel,
    PagesRequest,
    PagesResponse,
    PageTableModel,
    PredictRequest,
    PredictResponse,
    RelationFailureModel,
    ValidateRequest,
    ValidateResponse,
)

# request errors a client can fix; everything else FolspecError is a 500
_CLIENT_ERRORS = (
    ModelSpecError,
    NotVaismanCompatible,
    BackendError,
    DimensionMismatchError,
    ValueError,
)


def _resolve_complex(src: ModelSourceMixin, spectral: bool = False):
    """Build the requested complex; spectral routes realize builtins over floats."""
    tolerance = 1e-8 if src.tolerance is None else src.tolerance
    if src.model is not None:
        return build_from_presentation(src.model.to_core(), tolerance=tolerance)
    if src.builtin == "kodaira":
        if spectral:
            return build_from_presentation(kodaira_model_spec(scalar="float"), tolerance=tolerance)
        return build_kodaira_model()
    return build_suspension_model(src.n, src.modes, tolerance=tolerance)


def create_app() -> FastAPI:
    app = FastAPI(
        title="folspec",
        version=__version__,
        description=(
            "Spectral-sequence pages of finite bigraded complexes from Riemannian "
            "foliations, with builtin example models, adiabatic spectra and the "
            "Vaisman obstruction over Betti data."
        ),
    )

    @app.exception_handler(FolspecError)
    async def _folspec_error(request, exc):
        from fastapi.responses import JSONResponse

        status = 400 if isinstance(exc, _CLIENT_ERRORS) else 500
        return JSONResponse(
            status_code=status,
            content={"detail": f"{type(exc).__name__}: {exc}"},
        )

    @app.exception_handler(ValueError)
    async def _value_error(request, exc):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/models/validate", response_model=ValidateResponse)
    def validate_model(req: ValidateRequest):
        tolerance = 1e-8 if req.tolerance is None else req.tolerance
        complex_ = build_from_presentation(
            req.model.to_core(), tolerance=tolerance, validated=False
        )
        report = complex_.validate()
        return ValidateResponse(
            valid=report.ok,
            failures=[
                RelationFailureModel(
                    relation=f.relation, cell=f.cell, shift=f.shift, residual=f.residual
                )
                for f in report.failures
            ],
            max_residual=report.max_residual,
            total_dim=sum(complex_.cell_dims.values()),
        )

    @app.post("/models/emit", response_model=EmitResponse)
    def emit_model(req: EmitRequest):
        tolerance = 1e-8 if req.tolerance is None else req.tolerance
        if req.builtin == "kodaira":
            spec = kodaira_model_spec()
        else:
            spec = suspension_model_spec(req.n, req.modes, tolerance=tolerance)
        return EmitResponse(model=ModelSpecModel.from_core(spec))

    @app.post("/pages", response_model=PagesResponse)
    def pages(req: PagesRequest):
        complex_ = _resolve_complex(req)
        k_star = stabilization_page(complex_)
        k_max = k_star if req.max_page is None else req.max_page
        if not 0 <= k_max <= k_star:
            raise HTTPException(
                status_code=400, detail=f"max_page must lie in 0..{k_star} for this model"
            )
        tables = page_dims_iterated(complex_, k_max)
        cache: dict = {}
        agreement = all(
            t.dims == direct_dims(complex_, t.page, cache) for t in tables
        )
        return PagesResponse(
            q=complex_.q,
            p=complex_.p,
            pages=[PageTableModel.from_core(t) for t in tables],
            euler=[
                EulerEntryModel(page=t.page, chi=t.euler_characteristic()) for t in tables
            ],
            e_infinity=EInfinityModel.from_core(e_infinity_check(complex_)),
            direct_agreement=agreement,
        )

    @app.post("/predict", response_model=PredictResponse)
    def predict(req: PredictRequest):
        betti = BettiVector(req.n, tuple(req.betti))
        try:
            e = basic_betti_from_betti(betti)
        except NotVaismanCompatible as exc:
            notes = "; ".join(betti.warnings())
            detail = f"NotVaismanCompatible: {exc}"
            if notes:
                detail += f" (warnings: {notes})"
            raise HTTPException(status_code=400, detail=detail) from exc
        prediction = predict_e2(e, req.quasi_regular)
        return PredictResponse(
            n=req.n,
            e=list(e.e),
            mode=prediction.mode,
            rows={str(v): list(prediction.row(v)) for v in range(3)},
            warnings=list(betti.warnings()) + list(e.warnings()),
            table=PageTableModel.from_core(prediction.to_page_table()),
        )

    @app.post("/check", response_model=CheckResponse)
    def check(req: CheckRequest):
        if req.table is not None:
            table = req.table.to_core()
            q = table.q
        else:
            complex_ = _resolve_complex(req)
            table = page_dims_direct(complex_, 2)
            q = complex_.q
        verdict = vaisman_obstruction(table, q)
        return CheckResponse(
            verdict=verdict.verdict,
            reason="obstruction" if verdict.not_vaisman else "none",
            clauses=[
                ClauseModel(name=c.name, cell=c.cell, detail=c.detail)
                for c in verdict.clauses
            ],
            table=PageTableModel.from_core(table),
        )

    @app.post("/adiabatic", response_model=AdiabaticResponse)
    def adiabatic(req: AdiabaticRequest):
        complex_ = _resolve_complex(req, spectral=True)
        if not req.h:
            raise HTTPException(status_code=400, detail="provide at least one h value")
        report = adiabatic_report(complex_, req.h, req.degree)
        return AdiabaticResponse.from_core(report)

    @app.post("/matrix-a", response_model=MatrixAResponse)
    def matrix_a(req: MatrixARequest):
        data = eigen_analysis(build_matrix_A(req.n))
        probes = None
        if req.diophantine_height is not None:
            probes = []
            for j in range(data.size):
                probe = diophantine_probe(data.eigenvectors[:, j], req.diophantine_height)
                probes.append(
                    DiophantineProbeModel(
                        vector_index=j,
                        minima=probe.minima,
                        witnesses={d: list(w) for d, w in probe.witnesses.items()},
                    )
                )
        return MatrixAResponse(
            n=data.n,
            diagonal=list(data.diagonal),
            matrix=[list(row) for row in data.matrix],
            det=data.det,
            eigenvalues=list(data.eigenvalues),
            log_eigenvalues=list(data.log_eigenvalues),
            leafwise_product=data.leafwise_product,
            diophantine=probes,
        )

    return app


app = create_app()
