"""HTTP service exposing generation, swapping, matrices, and stimulus previews.

State: pools and evidence are immutable and shared; the only mutable state is
the in-memory session table (swap exclusions), evicted after a TTL. Evidence
comes from $PALETTEKIT_EVIDENCE or falls back to the bundled synthetic demo
set.

Error bodies are machine-readable:
    {"error": {"code": "...", "message": "...", "field": "..."}}
with 400 malformed, 404 unknown ids, 409 infeasible constraints or exhausted
alternatives, 422 missing evidence.
"""

from __future__ import annotations

import importlib.resources
import os
import time
import uuid
from dataclasses import dataclass, field as dc_field

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field

from .catalog import load_default_pools
from .config import ScoringWeights, load_config
from .errors import (ConstraintError, ExhaustedAlternativesError,
                     GenerationFailureError, InvalidArgumentError,
                     MissingEvidenceError, PalettekitError)
from .evidence import CategoryBin, Marker
from .optimizer import (Constraints, Encoding, ModelEvidence, Palette,
                        ScoringContext, _score_any, generate_redundant,
                        generate_single_channel, swap_element)
from .stimgen import StimulusSpec, gen_engagement_check, gen_stimulus, render_svg

SESSION_TTL_SECONDS = 3600.0


def _error(status: int, code: str, message: str, field: str | None = None
           ) -> JSONResponse:
    body = {"error": {"code": code, "message": message}}
    if field:
        body["error"]["field"] = field
    return JSONResponse(status_code=status, content=body)


class ConstraintsBody(BaseModel):
    required_colors: list[int] = Field(default_factory=list)
    required_shapes: list[int] = Field(default_factory=list)
    required_markers: list[list[int]] = Field(default_factory=list)
    excluded_colors: list[int] = Field(default_factory=list)
    excluded_shapes: list[int] = Field(default_factory=list)


class GenerateBody(BaseModel):
    encoding: str = "auto"
    n: int
    k: int = 10
    seed: int = 0
    constraints: ConstraintsBody = Field(default_factory=ConstraintsBody)
    weights: dict[str, float] | None = None


class PaletteBody(BaseModel):
    encoding: str
    entries: list[dict]


class SwapBody(BaseModel):
    session_id: str | None = None
    palette: PaletteBody
    position: int


@dataclass
class SessionState:
    session_id: str
    constraints: Constraints
    created: float = dc_field(default_factory=time.monotonic)
    last_used: float = dc_field(default_factory=time.monotonic)


class SessionStore:
    def __init__(self, ttl: float = SESSION_TTL_SECONDS):
        self.ttl = ttl
        self._sessions: dict[str, SessionState] = {}

    def _evict(self) -> None:
        now = time.monotonic()
        dead = [k for k, s in self._sessions.items() if now - s.last_used > self.ttl]
        for k in dead:
            del self._sessions[k]

    def create(self, constraints: Constraints) -> SessionState:
        self._evict()
        state = SessionState(uuid.uuid4().hex, constraints)
        self._sessions[state.session_id] = state
        return state

    def get(self, session_id: str) -> SessionState | None:
        self._evict()
        state = self._sessions.get(session_id)
        if state:
            state.last_used = time.monotonic()
        return state


def _default_evidence_dir():
    override = os.environ.get("PALETTEKIT_EVIDENCE")
    if override:
        return override
    return importlib.resources.files("palettekit") / "data" / "demo_evidence"


def _parse_constraints(body: ConstraintsBody) -> Constraints:
    return Constraints(
        required_colors=frozenset(body.required_colors),
        required_shapes=frozenset(body.required_shapes),
        required_markers=frozenset(tuple(m) for m in body.required_markers),
        excluded_colors=frozenset(body.excluded_colors),
        excluded_shapes=frozenset(body.excluded_shapes))


def create_app(evidence_dir=None, config_path=None,
               session_ttl: float = SESSION_TTL_SECONDS) -> FastAPI:
    app = FastAPI(title="palettekit", version="1.0")
    cfg = load_config(config_path or os.environ.get("PALETTEKIT_CONFIG"))
    pool, shapes = load_default_pools()
    model = ModelEvidence.load_dir(evidence_dir or _default_evidence_dir(),
                                   cfg.min_trials)
    sessions = SessionStore(session_ttl)
    known_colors = set(pool.by_id)
    known_shapes = set(shapes.by_id)

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        errs = exc.errors()
        field = ".".join(str(p) for p in errs[0]["loc"]) if errs else None
        return _error(400, "malformed_request", "request body failed validation", field)

    @app.exception_handler(PalettekitError)
    async def domain_error(request: Request, exc: PalettekitError):
        if isinstance(exc, MissingEvidenceError):
            return _error(422, "missing_evidence", str(exc))
        if isinstance(exc, ExhaustedAlternativesError):
            return _error(409, "exhausted_alternatives", str(exc))
        if isinstance(exc, (ConstraintError, GenerationFailureError)):
            return _error(409, "infeasible_constraints", str(exc))
        if isinstance(exc, InvalidArgumentError):
            return _error(400, "invalid_argument", str(exc))
        return _error(500, "internal_error", str(exc))

    def check_ids(constraints: Constraints):
        bad_colors = sorted((constraints.all_required_colors()
                             | constraints.excluded_colors) - known_colors)
        if bad_colors:
            return _error(404, "unknown_id", f"unknown color ids {bad_colors}",
                          "constraints")
        bad_shapes = sorted((constraints.all_required_shapes()
                             | constraints.excluded_shapes) - known_shapes)
        if bad_shapes:
            return _error(404, "unknown_id", f"unknown shape ids {bad_shapes}",
                          "constraints")
        return None

    @app.get("/api/colors")
    def get_colors():
        return {"colors": [
            {"id": e.color_id, "hex": e.hex, "L": e.lab.L, "a": e.lab.a,
             "b": e.lab.b, "name": e.display_name, "manual": e.manual}
            for e in pool.entries]}

    @app.get("/api/shapes")
    def get_shapes():
        return {"shapes": [
            {"id": e.shape_id, "name": e.name, "path": e.glyph,
             "fill_class": e.fill_class, "source_tool": e.source_tool}
            for e in shapes.entries]}

    @app.get("/api/matrix")
    def get_matrix(axis: str = Query(...), bin: str = Query("all")):
        if axis not in ("color", "shape", "marker"):
            return _error(400, "invalid_argument",
                          f"axis must be color/shape/marker, not {axis!r}", "axis")
        if bin not in ("all", "small", "medium", "large"):
            return _error(400, "invalid_argument",
                          f"bin must be all/small/medium/large, not {bin!r}", "bin")
        b = None if bin == "all" else CategoryBin(bin)
        m = model.matrices.get((axis, b))
        if m is None:
            return _error(404, "unknown_id", f"no {axis}/{bin} matrix loaded", "axis")
        return m.to_dict()

    @app.post("/api/palettes/generate")
    def post_generate(body: GenerateBody):
        if not 2 <= body.n <= 10:
            return _error(400, "invalid_argument",
                          f"n={body.n} outside [2, 10]", "n")
        if body.encoding not in ("auto", "color_only", "shape_only", "redundant"):
            return _error(400, "invalid_argument",
                          f"unknown encoding {body.encoding!r}", "encoding")
        constraints = _parse_constraints(body.constraints)
        bad = check_ids(constraints)
        if bad:
            return bad
        weights = (ScoringWeights(**body.weights) if body.weights
                   else cfg.weights)
        encoding = body.encoding
        note = None
        if encoding == "auto":
            encoding, note = cfg.auto_encoding[body.n]
        if encoding == "redundant":
            ctx = ScoringContext(model, pool, shapes, weights)
            results = generate_redundant(body.n, ctx, constraints,
                                         body.k, body.seed)
        else:
            axis = "color" if encoding == "color_only" else "shape"
            results = generate_single_channel(body.n, axis, model, constraints,
                                              body.k, body.seed)
        state = sessions.create(constraints)
        payload = {
            "session_id": state.session_id,
            "encoding": encoding,
            "palettes": [r.to_dict(pool, shapes) for r in results],
        }
        if note:
            payload["note"] = note
        return payload

    def _palette_from_body(body: PaletteBody) -> Palette:
        try:
            enc = Encoding(body.encoding)
        except ValueError:
            raise InvalidArgumentError(f"unknown encoding {body.encoding!r}")
        markers = tuple(Marker(e.get("color_id"), e.get("shape_id"))
                        for e in body.entries)
        return Palette(enc, markers)

    @app.post("/api/palettes/swap")
    def post_swap(body: SwapBody):
        palette = _palette_from_body(body.palette)
        for m in palette.entries:
            if m.color_id is not None and m.color_id not in known_colors:
                return _error(404, "unknown_id",
                              f"unknown color id {m.color_id}", "palette")
            if m.shape_id is not None and m.shape_id not in known_shapes:
                return _error(404, "unknown_id",
                              f"unknown shape id {m.shape_id}", "palette")
        if body.session_id:
            state = sessions.get(body.session_id)
            if state is None:
                return _error(404, "unknown_id",
                              f"unknown session {body.session_id}", "session_id")
        else:
            state = sessions.create(Constraints())
        ctx = ScoringContext(model, pool, shapes, cfg.weights)
        scored = _score_any(palette, ctx)
        updated, new_constraints = swap_element(scored, body.position,
                                                state.constraints, ctx)
        state.constraints = new_constraints  # exclusions grow monotonically
        return {
            "session_id": state.session_id,
            "palette": updated.to_dict(pool, shapes),
            "excluded_colors": sorted(new_constraints.excluded_colors),
            "excluded_shapes": sorted(new_constraints.excluded_shapes),
        }

    @app.get("/api/stimulus/preview")
    def preview(n: int = Query(...), seed: int = Query(0),
                encoding: str = Query("color_only"),
                colors: str = Query(""), shapes_param: str = Query("", alias="shapes"),
                engagement: bool = Query(False)):
        if not 2 <= n <= 10:
            return _error(400, "invalid_argument", f"n={n} outside [2, 10]", "n")
        color_ids = [int(v) for v in colors.split(",") if v != ""]
        shape_ids = [int(v) for v in shapes_param.split(",") if v != ""]
        for c in color_ids:
            if c not in known_colors:
                return _error(404, "unknown_id", f"unknown color id {c}", "colors")
        for s in shape_ids:
            if s not in known_shapes:
                return _error(404, "unknown_id", f"unknown shape id {s}", "shapes")
        palette = None
        if color_ids or shape_ids:
            try:
                enc = Encoding(encoding)
            except ValueError:
                return _error(400, "invalid_argument",
                              f"unknown encoding {encoding!r}", "encoding")
            if enc is Encoding.REDUNDANT:
                markers = tuple(Marker(c, s) for c, s in zip(color_ids, shape_ids))
            elif enc is Encoding.COLOR_ONLY:
                markers = tuple(Marker(color_id=c) for c in color_ids)
            else:
                markers = tuple(Marker(shape_id=s) for s in shape_ids)
            if len(markers) != n:
                return _error(400, "invalid_argument",
                              f"palette has {len(markers)} entries for n={n}",
                              "colors")
            palette = Palette(enc, markers)
        spec = StimulusSpec(n=n, seed=seed)
        gen = gen_engagement_check if engagement else gen_stimulus
        svg = render_svg(gen(spec, palette), shapes, pool)
        return Response(content=svg, media_type="image/svg+xml")

    return app


app = create_app()
