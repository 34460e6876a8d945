"""HTTP service over the same operations as the command line."""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field, field_validator, model_validator

from . import characters as ch
from . import fusion as fu
from .catalog import MinimalModel
from .cli import _METHODS, SUITES, UsageError, kac_json, run_suite
from .errors import LabelParseError, N2CosetError
from .labels import parse_label

app = FastAPI(title="n2coset", version="0.1.0")

_STATUS = {2: 422, 3: 409, 64: 400}


class ModelParams(BaseModel):
    u: int = Field(ge=2)
    v: int = Field(default=1, ge=1)
    q_order: Optional[str] = None

    @model_validator(mode="after")
    def _coprime(self):
        if gcd(self.u, self.v) != 1:
            raise ValueError("u and v must be coprime")
        return self

    @field_validator("q_order")
    @classmethod
    def _rational(cls, value):
        if value is not None and Fraction(value) <= 0:
            raise ValueError("q_order must be positive")
        return value

    def model(self) -> MinimalModel:
        return MinimalModel(self.u, self.v)

    def order(self) -> Fraction:
        if self.q_order is not None:
            return Fraction(self.q_order)
        return Fraction(6 if self.v >= 2 else 8)


class CharacterRequest(ModelParams):
    label: str
    method: Optional[Literal["residue", "appell-lerch", "resolution", "typical", "spectral-flow"]] = None
    super: bool = False


class FuseRequest(ModelParams):
    a: str
    b: str
    grothendieck: bool = False


class VerifyRequest(ModelParams):
    suite: Literal[SUITES]  # type: ignore[valid-type]
    y_window: Optional[int] = Field(default=None, ge=1)


class GrothTerm(BaseModel):
    label: str
    mult: int


class FusionResponse(BaseModel):
    exact: Optional[list[GrothTerm]]
    grothendieck: list[GrothTerm]
    conjectural: bool


class SeriesTerm(BaseModel):
    q: str
    z: str
    c: str


class SeriesResponse(BaseModel):
    Dz: int
    Dq: int
    q_order: str
    terms: list[SeriesTerm]


def _fail(exc: N2CosetError):
    code = 400 if isinstance(exc, LabelParseError) else _STATUS.get(exc.exit_code, 500)
    raise HTTPException(status_code=code, detail=str(exc))


@app.get("/health")
def health():
    return {"status": "ok"}


@app.get("/kac/{u}")
def kac(u: int, reduced: bool = False):
    if u < 2:
        raise HTTPException(status_code=400, detail="u must be at least 2")
    return kac_json(u, reduced)


@app.post("/character", response_model=SeriesResponse)
def character(req: CharacterRequest):
    try:
        method = None if req.method is None else _METHODS[req.method]
        s = ch.char_n2(req.model(), parse_label(req.label), method, req.super, req.order())
    except N2CosetError as exc:
        _fail(exc)
    return s.to_json_obj()


@app.post("/fuse", response_model=FusionResponse)
def fuse(req: FuseRequest):
    m = req.model()
    try:
        a, b = parse_label(req.a), parse_label(req.b)
        if m.unitary:
            res = fu.fuse_unitary(m, a, b)
        elif req.grothendieck:
            res = fu.FusionResult(None, fu.groth_fuse_n2(m, a, b), False)
        else:
            res = fu.fuse_exact(m, a, b)
    except N2CosetError as exc:
        _fail(exc)
    return res.to_json_obj()


@app.post("/verify")
def verify(req: VerifyRequest):
    try:
        return run_suite(req.model(), req.suite, req.order(), req.y_window)
    except UsageError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except N2CosetError as exc:
        _fail(exc)
