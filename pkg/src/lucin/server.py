"""HTTP front for the session service."""

from typing import Any, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .interpreter import InterpreterError
from .knowledge import Knowledge, KnowledgeError
from .service import Service, ServiceError


class StartSession(BaseModel):
    problem: list[str]
    method: list[str]
    model: dict[str, str] = Field(default_factory=dict)


class TermInput(BaseModel):
    formula: str


class TacticInput(BaseModel):
    tactic: str


class AutoInput(BaseModel):
    steps: Optional[int] = None


_STATUS = {
    "unknown_session": 404,
    "parse_error": 400,
    "bad_request": 400,
    "unknown_op": 400,
}


def create_app(kb: Optional[Knowledge] = None) -> FastAPI:
    service = Service(kb)
    app = FastAPI(title="lucin", version="0.1.0")
    app.state.service = service

    def guard(fn) -> Any:
        try:
            return fn()
        except ServiceError as e:
            raise HTTPException(_STATUS.get(e.kind, 400),
                                {"kind": e.kind, "message": str(e)})
        except (KnowledgeError, InterpreterError) as e:
            raise HTTPException(409, {"kind": type(e).__name__,
                                      "message": str(e)})

    @app.get("/catalog")
    def catalog():
        return service.catalog()

    @app.post("/session", status_code=201)
    def start(body: StartSession):
        s = guard(lambda: service.start_session(body.problem, body.method,
                                                body.model))
        return {"view": s.view()}

    @app.get("/session/{sid}")
    def state(sid: str):
        s = guard(lambda: service.session(sid))
        return {"view": s.view()}

    @app.post("/session/{sid}/term")
    def term(sid: str, body: TermInput):
        s = guard(lambda: service.session(sid))
        result = guard(lambda: s.input_term(body.formula))
        return {"result": result, "view": s.view()}

    @app.post("/session/{sid}/tactic")
    def tactic(sid: str, body: TacticInput):
        s = guard(lambda: service.session(sid))
        result = guard(lambda: s.input_tactic(body.tactic))
        return {"result": result, "view": s.view()}

    @app.get("/session/{sid}/hint")
    def hint(sid: str, detail: str = "full"):
        s = guard(lambda: service.session(sid))
        return {"result": guard(lambda: s.hint(detail))}

    @app.post("/session/{sid}/auto")
    def auto(sid: str, body: AutoInput = AutoInput()):
        s = guard(lambda: service.session(sid))
        result = guard(lambda: s.auto(body.steps))
        return {"result": result, "view": s.view()}

    @app.post("/session/{sid}/undo")
    def undo(sid: str):
        s = guard(lambda: service.session(sid))
        result = guard(lambda: s.undo())
        return {"result": result, "view": s.view()}

    return app
