"""HTTP service exposing one session's feedback loop.

Single-session service: one model and one feedback table per process.
Prediction requests read immutable state; feedback mutations serialize
through the table's writer lock and are persisted before the response.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response as HTTPResponse

from .overlay import ConflictError, FeedbackError
from .rules import ParseError, Rule, parse_clause
from .session import SessionError, SessionState, coerce_instance


def _error(status: int, kind: str, message: str, **extra) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": {"kind": kind, "message": message, **extra}}
    )


def _parse_rule(state: SessionState, obj: dict, field: str) -> Rule:
    if not isinstance(obj, dict) or "clause" not in obj or "label" not in obj:
        raise SessionError("bad_request", f"{field} must be {{clause, label}}")
    clause = parse_clause(obj["clause"], state.schema)
    label = state.schema.validate_label(obj["label"])
    return Rule(clause, label)


def create_app(state: SessionState) -> FastAPI:
    app = FastAPI(title="rulepatch")

    @app.exception_handler(ParseError)
    async def _parse_error(request: Request, exc: ParseError):
        return _error(400, "parse_error", str(exc), position=exc.position)

    @app.exception_handler(ConflictError)
    async def _conflict(request: Request, exc: ConflictError):
        return JSONResponse(status_code=409, content={"conflict_with": exc.conflicting_id})

    @app.exception_handler(FeedbackError)
    async def _feedback_error(request: Request, exc: FeedbackError):
        return _error(400, "bad_feedback", str(exc))

    @app.exception_handler(SessionError)
    async def _session_error(request: Request, exc: SessionError):
        return _error(400, exc.kind, exc.message)

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return _error(400, "bad_request", str(exc))

    @app.post("/predict")
    async def predict(body: dict):
        x = coerce_instance(state.schema, body.get("instance"))
        return state.respond(x).to_json()

    @app.post("/feedback")
    async def feedback(body: dict):
        corrected = _parse_rule(state, body.get("corrected"), "corrected")
        original: Optional[Rule] = None
        if body.get("original") is not None:
            original = _parse_rule(state, body["original"], "original")
        fr = state.add_feedback(corrected, original=original)
        return {"id": fr.id}

    @app.get("/rules")
    async def rules():
        return [fr.to_json() for fr in state.table.all_rules()]

    @app.delete("/rules/{rule_id}")
    async def delete_rule(rule_id: str):
        if not state.remove_feedback(rule_id):
            return _error(404, "unknown_id", f"no feedback rule {rule_id!r}")
        return HTTPResponse(status_code=204)

    @app.get("/schema")
    async def schema():
        return state.schema.to_json()

    @app.get("/instances")
    async def instances(split: str = "test", offset: int = 0, limit: int = 20):
        ds = state.split(split)
        offset = max(0, offset)
        limit = max(0, limit)
        rows = [
            {"instance": row, "label": label}
            for row, label in zip(
                ds.rows[offset : offset + limit], ds.labels[offset : offset + limit]
            )
        ]
        return {"split": split, "total": len(ds), "offset": offset, "rows": rows}

    @app.post("/whatif")
    async def whatif(body: dict):
        x = coerce_instance(state.schema, body.get("instance"))
        override = body.get("clause_override")
        if not isinstance(override, dict):
            raise SessionError("bad_request", "clause_override must be an object")
        corrected = _parse_rule(state, override.get("corrected"), "corrected")
        original: Optional[Rule] = None
        if override.get("original") is not None:
            original = _parse_rule(state, override["original"], "original")
        return state.trial_response(x, corrected, original=original).to_json()

    return app


def serve(session_dir: str, host: str, port: int) -> None:
    import uvicorn

    state = SessionState.load(session_dir)
    uvicorn.run(create_app(state), host=host, port=port, log_level="warning")
