"""HTTP service for the interactive highlighting studio.

Thin wrapper over the library: every response is reproducible by the
matching library call on the same inputs. Sessions live in memory (optional
JSON-file persistence); each session serializes its mutations while
highlight resolution stays read-only.
"""

import json
import os
import tempfile
import threading
import uuid
from dataclasses import dataclass, field as dc_field

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .annealer import AnnealConfig, AnnealError, generate_pair
from .colornames import default_name_model
from .colorspace import ColorSRGB, MarkSize
from .datasets import Dataset, DatasetError, dataset_from_json, dataset_to_json, load_dataset, synth_scatterplot
from .highlight import Rect, Selection, resolve_colors, selection_from_brush
from .neighborhood import build_graph, compute_separability
from .scoring import PalettePair, Weights, check_constraints

MAX_BODY_BYTES = 8 * 1024 * 1024
SYNC_BUDGET_SECONDS = 30.0


@dataclass
class _Job:
    id: str
    done: threading.Event = dc_field(default_factory=threading.Event)
    result: dict | None = None
    error: str | None = None


@dataclass
class _Session:
    id: str
    dataset: Dataset | None = None
    graph: object = None
    field: object = None
    # pair is always from_json_dict(pair_json), so highlight responses match
    # any client that reconstructs the pair from a response body
    pair: PalettePair | None = None
    pair_json: dict | None = None
    saved: list = dc_field(default_factory=list)
    lock: threading.Lock = dc_field(default_factory=threading.Lock)


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse({"error": message}, status_code=status)


def _parse_upload(body: bytes) -> Dataset:
    """Dataset from an upload body: JSON object, or CSV text otherwise.

    A JSON body of the form {"synth": {"classes", "profile", "seed"}} asks
    the server to synthesize the dataset instead.
    """
    text = body.decode("utf-8", errors="replace")
    if text.lstrip().startswith("{"):
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"invalid JSON at line {exc.lineno}") from exc
        if isinstance(payload, dict) and "synth" in payload:
            spec = payload["synth"]
            if not isinstance(spec, dict) or "classes" not in spec or "profile" not in spec:
                raise DatasetError("'synth' needs 'classes' and 'profile'")
            return synth_scatterplot(
                int(spec["classes"]), str(spec["profile"]), int(spec.get("seed", 0))
            )
        return dataset_from_json(payload)
    # reuse the file parser so CSV diagnostics keep their line numbers
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "upload.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        try:
            return load_dataset(path)
        except DatasetError as exc:
            raise DatasetError(str(exc).replace(path, "upload")) from exc


def _config_from_payload(payload: dict) -> AnnealConfig:
    allowed = {"seed", "background", "sigma", "markSize", "weights"}
    unknown = set(payload) - allowed
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    kwargs: dict = {}
    if "seed" in payload:
        if not isinstance(payload["seed"], int) or isinstance(payload["seed"], bool):
            raise ValueError("'seed' must be an integer")
        kwargs["seed"] = payload["seed"]
    if "background" in payload:
        kwargs["background"] = ColorSRGB.from_hex(payload["background"])
    if "sigma" in payload:
        kwargs["sigma"] = float(payload["sigma"])
    if "markSize" in payload:
        kwargs["mark_size"] = MarkSize(float(payload["markSize"]))
    if "weights" in payload:
        ws = payload["weights"]
        if not isinstance(ws, list) or len(ws) != 4:
            raise ValueError("'weights' must be a list of four numbers")
        kwargs["weights"] = Weights(*(float(w) for w in ws))
    return AnnealConfig(**kwargs)


def create_app(
    persist_path: str | None = None,
    sync_budget_seconds: float = SYNC_BUDGET_SECONDS,
    max_body_bytes: int = MAX_BODY_BYTES,
) -> FastAPI:
    app = FastAPI(title="contrast-duo")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    sessions: dict[str, _Session] = {}
    jobs: dict[str, _Job] = {}
    store_lock = threading.Lock()
    model = default_name_model()

    def persist():
        if not persist_path:
            return
        with store_lock:
            snapshot = {
                sid: {
                    "dataset": dataset_to_json(s.dataset) if s.dataset else None,
                    "pair": s.pair_json,
                    "saved": list(s.saved),
                }
                for sid, s in sessions.items()
            }
        tmp = persist_path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump({"sessions": snapshot}, fh, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, persist_path)

    def restore():
        if not persist_path or not os.path.exists(persist_path):
            return
        with open(persist_path, encoding="utf-8") as fh:
            snapshot = json.load(fh)
        for sid, blob in snapshot.get("sessions", {}).items():
            sess = _Session(id=sid)
            if blob.get("dataset"):
                sess.dataset = dataset_from_json(blob["dataset"])
                sess.graph = build_graph(sess.dataset)
                sess.field = compute_separability(sess.dataset, sess.graph)
            if blob.get("pair"):
                sess.pair = PalettePair.from_json_dict(blob["pair"])
                sess.pair_json = blob["pair"]
            sess.saved = list(blob.get("saved", []))
            sessions[sid] = sess

    restore()

    def install_dataset(sess: _Session, dataset: Dataset):
        # graph/field must always describe the stored dataset
        graph = build_graph(dataset)
        field = compute_separability(dataset, graph)
        with sess.lock:
            sess.dataset = dataset
            sess.graph = graph
            sess.field = field
            sess.pair = None
            sess.pair_json = None

    def dataset_summary(sess: _Session) -> dict:
        return {
            "id": sess.id,
            "n": sess.dataset.n,
            "m": sess.dataset.m,
            "dataset": dataset_to_json(sess.dataset),
        }

    async def read_body(request: Request):
        body = await request.body()
        if len(body) > max_body_bytes:
            return None
        return body

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    async def post_sessions(request: Request):
        body = await read_body(request)
        if body is None:
            return _error(413, f"upload exceeds {max_body_bytes} bytes")
        try:
            dataset = _parse_upload(body)
        except (DatasetError, ValueError) as exc:
            return _error(400, str(exc))
        sess = _Session(id=uuid.uuid4().hex)
        install_dataset(sess, dataset)
        with store_lock:
            sessions[sess.id] = sess
        persist()
        return JSONResponse(dataset_summary(sess), status_code=201)

    @app.post("/sessions/{sid}")
    async def post_session_dataset(sid: str, request: Request):
        """Re-upload: replaces the dataset and invalidates the pair."""
        sess = sessions.get(sid)
        if sess is None:
            return _error(404, "no such session")
        body = await read_body(request)
        if body is None:
            return _error(413, f"upload exceeds {max_body_bytes} bytes")
        try:
            dataset = _parse_upload(body)
        except (DatasetError, ValueError) as exc:
            return _error(400, str(exc))
        install_dataset(sess, dataset)
        persist()
        return dataset_summary(sess)

    def run_generation(sess: _Session, cfg: AnnealConfig, job: _Job):
        try:
            with sess.lock:
                raw, trace = generate_pair(sess.dataset, sess.graph, sess.field, model, cfg)
                pair_json = raw.to_json_dict()
                sess.pair = PalettePair.from_json_dict(pair_json)
                sess.pair_json = pair_json
                pair = sess.pair
            report = check_constraints(pair, foreground_margin=cfg.foreground_margin)
            last = trace.rows[-1] if trace.rows else None
            job.result = {
                "pair": pair_json,
                "constraints": report.to_json_dict(),
                "trace": {
                    "iterations": len(trace),
                    "bestEnergy": last.best_energy if last else None,
                    "finalEnergy": last.energy if last else None,
                },
            }
            persist()
        except AnnealError as exc:
            job.error = str(exc)
        finally:
            job.done.set()

    @app.post("/sessions/{sid}/palette")
    async def post_palette(sid: str, request: Request):
        sess = sessions.get(sid)
        if sess is None:
            return _error(404, "no such session")
        if sess.dataset is None:
            return _error(409, "session has no dataset")
        body = await read_body(request)
        if body is None:
            return _error(413, f"request exceeds {max_body_bytes} bytes")
        try:
            payload = json.loads(body) if body.strip() else {}
            if not isinstance(payload, dict):
                raise ValueError("config must be a JSON object")
            cfg = _config_from_payload(payload)
        except (json.JSONDecodeError, ValueError) as exc:
            return _error(400, str(exc))
        job = _Job(id=uuid.uuid4().hex)
        jobs[job.id] = job
        worker = threading.Thread(target=run_generation, args=(sess, cfg, job), daemon=True)
        worker.start()
        finished = await _wait_in_thread(job, sync_budget_seconds)
        if not finished:
            return JSONResponse(
                {"status": "running", "poll": f"/sessions/{sid}/jobs/{job.id}"},
                status_code=202,
            )
        return _job_response(job)

    @app.get("/sessions/{sid}/jobs/{job_id}")
    async def get_job(sid: str, job_id: str):
        if sid not in sessions:
            return _error(404, "no such session")
        job = jobs.get(job_id)
        if job is None:
            return _error(404, "no such job")
        if not job.done.is_set():
            return JSONResponse(
                {"status": "running", "poll": f"/sessions/{sid}/jobs/{job.id}"},
                status_code=202,
            )
        return _job_response(job)

    @app.post("/sessions/{sid}/highlight")
    async def post_highlight(sid: str, request: Request):
        sess = sessions.get(sid)
        if sess is None:
            return _error(404, "no such session")
        if sess.pair is None:
            return _error(409, "session has no palette pair")
        body = await read_body(request)
        if body is None:
            return _error(413, f"request exceeds {max_body_bytes} bytes")
        try:
            payload = json.loads(body)
            if not isinstance(payload, dict):
                raise ValueError("selection must be a JSON object")
            if "brush" in payload:
                rect = Rect.from_json_dict(payload["brush"])
                sel = selection_from_brush(sess.dataset, rect)
            else:
                sel = Selection.from_json_dict(payload)
                sel.validate_for(sess.dataset)
            resolved = resolve_colors(sess.dataset, sess.pair, sel)
        except (json.JSONDecodeError, ValueError) as exc:
            return _error(400, str(exc))
        return {"selection": sel.to_json_dict(), **resolved.to_json_dict()}

    @app.post("/sessions/{sid}/saved", status_code=201)
    async def post_saved(sid: str, request: Request):
        sess = sessions.get(sid)
        if sess is None:
            return _error(404, "no such session")
        if sess.pair is None:
            return _error(409, "session has no palette pair to save")
        body = await read_body(request)
        if body is None:
            return _error(413, f"request exceeds {max_body_bytes} bytes")
        try:
            payload = json.loads(body) if body.strip() else {}
            if not isinstance(payload, dict):
                raise ValueError("body must be a JSON object")
            name = payload.get("name")
            if name is not None and not isinstance(name, str):
                raise ValueError("'name' must be a string")
        except (json.JSONDecodeError, ValueError) as exc:
            return _error(400, str(exc))
        with sess.lock:
            entry = {
                "name": name or f"scheme-{len(sess.saved) + 1}",
                "pair": sess.pair_json,
            }
            sess.saved.append(entry)
            index = len(sess.saved) - 1
        persist()
        return JSONResponse({"index": index, "name": entry["name"]}, status_code=201)

    @app.get("/sessions/{sid}/saved")
    async def get_saved(sid: str):
        sess = sessions.get(sid)
        if sess is None:
            return _error(404, "no such session")
        return {"saved": list(sess.saved)}

    @app.post("/sessions/{sid}/saved/{index}/restore")
    async def post_restore(sid: str, index: int):
        """Make a saved scheme the session's current pair again."""
        sess = sessions.get(sid)
        if sess is None:
            return _error(404, "no such session")
        with sess.lock:
            if index < 0 or index >= len(sess.saved):
                return _error(404, f"no saved scheme at index {index}")
            entry = sess.saved[index]
            pair = PalettePair.from_json_dict(entry["pair"])
            if sess.dataset is not None and pair.m != sess.dataset.m:
                return _error(409, "saved scheme does not match the current dataset")
            sess.pair = pair
            sess.pair_json = entry["pair"]
        persist()
        return {"index": index, "name": entry["name"], "pair": entry["pair"]}

    return app


def _job_response(job: _Job):
    if job.error is not None:
        return _error(500, job.error)
    return job.result


async def _wait_in_thread(job: _Job, timeout: float) -> bool:
    """Wait for the job off the event loop so other requests stay served."""
    import anyio

    def wait() -> bool:
        return job.done.wait(timeout)

    return await anyio.to_thread.run_sync(wait)
