"""HTTP/JSON service exposing the analytics engine under /api/v1.

Corpus snapshots are immutable and shared; per-session mutations are
serialized by the session lock. Clustering runs as a cancellable background
job (one active job per session) polled via /api/v1/jobs/{id}.
"""

from __future__ import annotations

import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from typing import Any

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .clustering import ClusterRequest, ClusterResult
from .corpus import Corpus
from .errors import ConflictError, InputError, NotFoundError
from .filters import Predicate
from .session import DEFAULT_IDLE_TIMEOUT, SessionManager
from .tree import TreeDocument


class RangeBody(BaseModel):
    from_: int = Field(alias="from")
    to: int


class CreateSessionBody(BaseModel):
    range: RangeBody
    corpus_id: str | None = None


class PredicateBody(BaseModel):
    key: str
    variant: str | None = None
    lo: float | None = None
    hi: float | None = None


class SplitBody(BaseModel):
    predicate: PredicateBody
    match_label: str = "match"
    remainder_label: str = "remainder"


class LabelBody(BaseModel):
    label: str


class ClusterBody(BaseModel):
    features: list[str]
    k: int
    node: int | None = None
    seed: int = 0
    max_iter: int = 300
    tol: float = 1e-6
    scaling: str = "log-minmax"


class MaterializeBody(BaseModel):
    cluster_id: int
    label: str


class _Job:
    def __init__(self, session_id: str, node_id: int):
        self.job_id = uuid.uuid4().hex
        self.session_id = session_id
        self.node_id = node_id
        self.status = "queued"
        self.result: dict | None = None
        self.error: str | None = None
        self.cancel_event = threading.Event()

    def to_json(self) -> dict:
        out = {"job_id": self.job_id, "status": self.status, "node": self.node_id}
        if self.result is not None:
            out["result"] = self.result
        if self.error is not None:
            out["error"] = self.error
        return out


def cluster_result_json(result: ClusterResult, node_id: int) -> dict:
    return {
        "node": node_id,
        "k": result.request.k,
        "seed": result.request.seed,
        "features": list(result.request.features),
        "scaling": result.request.scaling,
        "iterations": result.iterations,
        "excluded_count": result.excluded_count,
        "included_count": int(len(result.ents)),
        "clusters": [s.to_json() for s in result.summaries],
    }


def create_app(corpus: Corpus, idle_timeout: float = DEFAULT_IDLE_TIMEOUT,
               ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="entityscope", version="0.1.0")
    sessions = SessionManager(corpus, idle_timeout)
    jobs: dict[str, _Job] = {}
    jobs_lock = threading.Lock()
    executor = ThreadPoolExecutor(max_workers=2)
    app.state.sessions = sessions

    @app.exception_handler(NotFoundError)
    async def _not_found(_req: Request, exc: NotFoundError):
        return JSONResponse({"error": str(exc)}, status_code=404)

    @app.exception_handler(InputError)
    async def _bad_input(_req: Request, exc: InputError):
        return JSONResponse({"error": str(exc)}, status_code=400)

    @app.exception_handler(ConflictError)
    async def _conflict(_req: Request, exc: ConflictError):
        return JSONResponse({"error": str(exc)}, status_code=409)

    @app.get("/api/v1/corpus")
    def corpus_info() -> dict:
        store = corpus.store
        span = None
        if store.n_transactions:
            span = {"from": int(store.timestamps[0]), "to": int(store.timestamps[-1]) + 1}
        return {
            "corpus_id": corpus.corpus_id,
            "n_transactions": store.n_transactions,
            "n_addresses": store.n_addresses,
            "n_entities": corpus.index.n_entities,
            "time_span": span,
        }

    @app.post("/api/v1/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> dict:
        session = sessions.create(body.range.from_, body.range.to, body.corpus_id)
        return session.tree_json()

    @app.get("/api/v1/sessions/{sid}/tree")
    def get_tree(sid: str) -> dict:
        return sessions.get(sid).tree_json()

    @app.delete("/api/v1/sessions/{sid}")
    def drop_session(sid: str) -> dict:
        sessions.get(sid)
        sessions.drop(sid)
        return {"dropped": sid}

    @app.put("/api/v1/sessions/{sid}/range")
    def set_range(sid: str, body: RangeBody) -> dict:
        session = sessions.get(sid)
        session.set_range(body.from_, body.to)
        return session.tree_json()

    @app.post("/api/v1/sessions/{sid}/tree/{node}/split")
    def split(sid: str, node: int, body: SplitBody) -> dict:
        session = sessions.get(sid)
        predicate = Predicate(body.predicate.key, body.predicate.variant,
                              body.predicate.lo, body.predicate.hi)
        mid, rid = session.split(node, predicate, body.match_label, body.remainder_label)
        return {"match": mid, "remainder": rid, "tree": session.tree_json()}

    @app.post("/api/v1/sessions/{sid}/tree/{node}/select")
    def select(sid: str, node: int) -> dict:
        session = sessions.get(sid)
        session.select(node)
        return session.tree_json()

    @app.put("/api/v1/sessions/{sid}/tree/{node}/label")
    def relabel(sid: str, node: int, body: LabelBody) -> dict:
        session = sessions.get(sid)
        session.relabel(node, body.label)
        return session.tree_json()

    @app.delete("/api/v1/sessions/{sid}/tree/{node}")
    def delete_split(sid: str, node: int) -> dict:
        session = sessions.get(sid)
        session.delete_split(node)
        return session.tree_json()

    @app.get("/api/v1/sessions/{sid}/histogram")
    def get_histogram(sid: str, key: str, variant: str | None = None,
                      node: int | None = None, bins: int = 50,
                      scale: str = "auto") -> dict:
        session = sessions.get(sid)
        return session.histogram(node, key, variant, bins, scale).to_json()

    @app.get("/api/v1/sessions/{sid}/volume")
    def get_volume(sid: str, bucket: str = "month", node: int | None = None) -> dict:
        session = sessions.get(sid)
        buckets = session.volume(node, bucket)
        return {"bucket": bucket,
                "buckets": [{"start": s, "count": c} for s, c in buckets]}

    @app.post("/api/v1/sessions/{sid}/cluster", status_code=202)
    def start_cluster(sid: str, body: ClusterBody) -> dict:
        session = sessions.get(sid)
        request = ClusterRequest(
            features=tuple(body.features), k=body.k, seed=body.seed,
            max_iter=body.max_iter, tol=body.tol, scaling=body.scaling)
        node_id = session.tree.selected_id if body.node is None else body.node
        session.tree.node(node_id)
        with jobs_lock:
            if session.active_job is not None:
                job = jobs.get(session.active_job)
                if job is not None and job.status in ("queued", "running"):
                    raise ConflictError("a clustering job is already running for this session")
            job = _Job(session.session_id, node_id)
            jobs[job.job_id] = job
            session.active_job = job.job_id

        def work():
            job.status = "running"
            try:
                result = session.run_cluster(node_id, request,
                                             should_stop=job.cancel_event.is_set)
                if job.cancel_event.is_set():
                    job.status = "cancelled"
                else:
                    job.result = cluster_result_json(result, node_id)
                    job.status = "done"
            except Exception as exc:
                job.error = str(exc)
                job.status = "error"
            finally:
                if session.active_job == job.job_id:
                    session.active_job = None

        executor.submit(work)
        return {"job_id": job.job_id}

    @app.get("/api/v1/jobs/{job_id}")
    def get_job(job_id: str) -> dict:
        job = jobs.get(job_id)
        if job is None:
            raise NotFoundError(f"unknown job {job_id}")
        return job.to_json()

    @app.delete("/api/v1/jobs/{job_id}")
    def cancel_job(job_id: str) -> dict:
        job = jobs.get(job_id)
        if job is None:
            raise NotFoundError(f"unknown job {job_id}")
        job.cancel_event.set()
        return job.to_json()

    @app.post("/api/v1/sessions/{sid}/tree/{node}/materialize")
    def materialize(sid: str, node: int, body: MaterializeBody) -> dict:
        session = sessions.get(sid)
        mid, rid = session.materialize_cluster(node, body.cluster_id, body.label)
        return {"match": mid, "remainder": rid, "tree": session.tree_json()}

    @app.get("/api/v1/sessions/{sid}/entities")
    def list_entities(sid: str, node: int | None = None, cluster: int | None = None,
                      sort: str = "num_txs_receiver", order: str = "desc",
                      page: int = 0, page_size: int = Query(default=400, ge=1, le=400)) -> dict:
        session = sessions.get(sid)
        return session.list_entities(node, cluster, sort, order, page, page_size)

    @app.get("/api/v1/sessions/{sid}/entity/{eid}/txs")
    def entity_txs(sid: str, eid: int, role: str = "receiver",
                   from_: int | None = Query(default=None, alias="from"),
                   to: int | None = None) -> dict:
        session = sessions.get(sid)
        txs = session.entity_txs(eid, role, from_, to)
        return {"entity_id": eid, "role": role, "transactions": txs}

    @app.get("/api/v1/sessions/{sid}/tree-document")
    def export_document(sid: str) -> dict:
        return sessions.get(sid).export_document().to_json()

    @app.post("/api/v1/sessions/{sid}/tree-document")
    def import_document(sid: str, body: dict[str, Any]) -> dict:
        session = sessions.get(sid)
        doc = TreeDocument.from_json(body)
        mismatch = session.import_document(doc)
        out = session.tree_json()
        out["corpus_mismatch"] = mismatch
        if mismatch:
            out["warning"] = ("document was exported from a different corpus; "
                              "splits were replayed but counts may differ")
        return out

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
