"""FastAPI service wrapping the clearing library.

All endpoints are stateless and synchronous: a request carries the full
problem (system, inverse demand config, solver options) and the response
carries the solution or scenario table.  Run with::

    uvicorn fireclear.service:app
"""

from __future__ import annotations

import tempfile
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from .. import __version__
from ..clearing import SolverConfig, enumerate_solutions, solve_greatest, solve_least
from ..errors import (
    EnumerationCapExceeded,
    EnumerationUnsupported,
    FireclearError,
    ValidationFailure,
)
from ..fda import solve_fda
from ..liquidation import get_rule
from ..network import derive_relative_liabilities, validate
from ..scenarios import (
    DiversificationSpec,
    EbaSweepSpec,
    MonteCarloSpec,
    RandomNetworkTemplate,
    ShockSweepSpec,
    run_counterexample,
    run_diversification,
    run_eba_sweep,
    run_monte_carlo,
    run_shock_sweep,
)
from . import schemas


def create_app() -> FastAPI:
    app = FastAPI(
        title="fireclear",
        version=__version__,
        description=(
            "Joint clearing equilibria for financial contagion networks: "
            "interbank payments, fire-sale prices, and endogenous market liquidity."
        ),
    )

    @app.exception_handler(FireclearError)
    async def _domain_error(request, exc: FireclearError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/validate", response_model=schemas.ValidateResponse)
    def validate_system(req: schemas.ValidateRequest) -> schemas.ValidateResponse:
        try:
            system = req.system.to_core()
        except ValidationFailure as exc:
            return schemas.ValidateResponse(
                ok=False,
                errors=[
                    schemas.ViolationModel(code=v.code, message=v.message)
                    for v in exc.violations
                ],
            )
        issues = validate(system)
        return schemas.ValidateResponse(
            ok=not issues,
            errors=[schemas.ViolationModel(code=v.code, message=v.message) for v in issues],
        )

    @app.post("/solve", response_model=schemas.SolveResponse)
    def solve(req: schemas.SolveRequest) -> schemas.SolveResponse:
        system = req.system.to_core()
        rel = derive_relative_liabilities(system)
        rule = get_rule(req.options.rule)
        idf = schemas.idf_to_core(req.idf)
        cfg = req.options.to_core()
        trace_payload = None
        if req.direction == "greatest":
            report = solve_greatest(system, rel, rule, idf, cfg)
        elif req.direction == "least":
            report = solve_least(system, rel, rule, idf, cfg)
        else:
            report, trace = solve_fda(system, rel, rule, idf, cfg)
            if req.include_trace:
                trace_payload = trace.to_dict()
        return schemas.SolveResponse(
            report=schemas.SolveReportModel.from_core(report), trace=trace_payload
        )

    @app.post("/enumerate", response_model=schemas.EnumerateResponse)
    def enumerate_(req: schemas.EnumerateRequest) -> schemas.EnumerateResponse:
        system = req.system.to_core()
        rel = derive_relative_liabilities(system)
        rule = get_rule(req.options.rule)
        idf = schemas.idf_to_core(req.idf)
        cfg = SolverConfig(
            tolerance=req.options.tolerance,
            max_iterations=req.options.max_iterations,
            default_tol=req.options.default_tol,
            enumeration_cap=req.enumeration_cap,
        )
        try:
            solutions = enumerate_solutions(system, rel, rule, idf, cfg)
        except (EnumerationCapExceeded, EnumerationUnsupported) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return schemas.EnumerateResponse(
            solutions=[schemas.SolveReportModel.from_core(s) for s in solutions]
        )

    @app.post("/counterexample", response_model=schemas.CounterexampleResponse)
    def counterexample(req: schemas.CounterexampleRequest) -> schemas.CounterexampleResponse:
        result = run_counterexample(req.options.to_core())
        return schemas.CounterexampleResponse(
            greatest=schemas.SolveReportModel(**result["greatest"]),
            least=schemas.SolveReportModel(**result["least"]),
            enumeration=[
                schemas.EnumerationRow(
                    assumed_makers=row["assumed_makers"],
                    self_consistent=row["self_consistent"],
                    report=schemas.SolveReportModel(**row["report"]),
                )
                for row in result["enumeration"]
            ],
        )

    @app.post("/scenarios/sweep", response_model=schemas.TableResponse)
    def sweep(req: schemas.SweepRequest) -> schemas.TableResponse:
        template = RandomNetworkTemplate(
            n=req.n,
            holdings=req.holdings,
            external_liab=req.external_liab,
            alpha0=req.alpha0,
            alpha=req.alpha,
        )
        kwargs = {"seed": req.seed, "template": template, "solver": req.options.to_core()}
        if req.shock_grid is not None:
            kwargs["shock_grid"] = tuple(req.shock_grid)
        table = run_shock_sweep(ShockSweepSpec(**kwargs))
        return schemas.TableResponse(**table.to_dict())

    @app.post("/scenarios/montecarlo", response_model=schemas.TableResponse)
    def montecarlo(req: schemas.MonteCarloRequest) -> schemas.TableResponse:
        template = RandomNetworkTemplate(
            n=req.n,
            holdings=req.holdings,
            external_liab=req.external_liab,
            alpha0=req.alpha0,
            alpha=req.alpha,
        )
        table = run_monte_carlo(
            MonteCarloSpec(
                trials=req.trials,
                seed=req.seed,
                shock=req.shock,
                price_threshold=req.price_threshold,
                template=template,
                solver=req.options.to_core(),
            )
        )
        return schemas.TableResponse(**table.to_dict())

    @app.post("/scenarios/diversify", response_model=schemas.TableResponse)
    def diversify(req: schemas.DiversifyRequest) -> schemas.TableResponse:
        kwargs = {
            "rhos": tuple(req.rhos),
            "locate_jumps": req.locate_jumps,
            "jump_tol": req.jump_tol,
            "solver": req.options.to_core(),
        }
        if req.lambda_grid is not None:
            kwargs["lambda_grid"] = tuple(req.lambda_grid)
        table = run_diversification(DiversificationSpec(**kwargs))
        return schemas.TableResponse(**table.to_dict())

    @app.post("/scenarios/eba", response_model=schemas.TableResponse)
    def eba(req: schemas.EbaRequest) -> schemas.TableResponse:
        solver = SolverConfig(tolerance=req.tolerance, max_iterations=req.max_iterations)
        kwargs = {"alpha0": req.alpha0, "alpha": req.alpha, "solver": solver}
        if req.fraction_grid is not None:
            kwargs["fraction_grid"] = tuple(req.fraction_grid)
        if req.csv_text is not None:
            with tempfile.NamedTemporaryFile(
                "w", suffix=".csv", delete=False, encoding="utf-8"
            ) as tmp:
                tmp.write(req.csv_text)
                tmp_path = Path(tmp.name)
            try:
                table = run_eba_sweep(EbaSweepSpec(csv_path=tmp_path, **kwargs))
            finally:
                tmp_path.unlink(missing_ok=True)
        else:
            table = run_eba_sweep(EbaSweepSpec(**kwargs))
        return schemas.TableResponse(**table.to_dict())

    return app


app = create_app()
