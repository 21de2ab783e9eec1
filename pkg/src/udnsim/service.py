"""HTTP API for interactive what-if planning.

Scenarios (config + editable BS list) live as JSON files under a data
directory; finished maps are stored next to them as JSON + PNG.  Map
computation runs asynchronously on a bounded worker pool with polled
progress; jobs snapshot the scenario at submission, so later edits never
affect a running computation.  At most one map computes at a time per
scenario.
"""

from __future__ import annotations

import argparse
import json
import os
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Body, FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from .config import ConfigError, Direction, ScenarioConfig, build_deployment, fingerprint
from .engine import CoverageMap, ScanCancelled, scan_grid
from .geometry import Deployment, GeometryError, Region
from .heatmap import diff, write_diff_png, write_png

DEFAULT_DATA_DIR = "./udnsim_data"


@dataclass
class ScenarioRecord:
    id: str
    config: ScenarioConfig
    deployment: Deployment
    created: float
    modified: float
    revision: int = 0

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "config": self.config.to_dict(),
            "bs": [[float(x), float(y)]
                   for x, y in zip(self.deployment.bs_x, self.deployment.bs_y)],
            "created": self.created,
            "modified": self.modified,
            "revision": self.revision,
            "fingerprint": fingerprint(self.config, self.deployment),
        }


@dataclass
class Job:
    id: str
    scenario_id: str
    revision: int
    direction: Direction
    config: ScenarioConfig
    deployment: Deployment
    resolution: int
    trials: int
    status: str = "queued"      # queued -> running -> done | failed | cancelled
    progress: float = 0.0
    error: str = ""
    result: CoverageMap | None = None
    cancel: threading.Event = field(default_factory=threading.Event)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "scenario_id": self.scenario_id,
            "revision": self.revision,
            "direction": self.direction.value,
            "resolution": self.resolution,
            "trials": self.trials,
            "status": self.status,
            "progress": round(self.progress, 6),
            "error": self.error,
        }


class Store:
    """Scenario/job registry persisted as plain files under the data dir."""

    def __init__(self, data_dir: Path, max_workers: int | None = None,
                 engine_workers: int | None = None):
        self.dir = Path(data_dir)
        (self.dir / "scenarios").mkdir(parents=True, exist_ok=True)
        (self.dir / "jobs").mkdir(parents=True, exist_ok=True)
        (self.dir / "results").mkdir(parents=True, exist_ok=True)
        self.scenarios: dict[str, ScenarioRecord] = {}
        self.jobs: dict[str, Job] = {}
        self.lock = threading.RLock()
        self._scenario_busy: dict[str, threading.Lock] = {}
        self.pool = ThreadPoolExecutor(max_workers=max_workers or os.cpu_count() or 2)
        self.engine_workers = engine_workers
        self._load()

    def _load(self):
        for f in sorted((self.dir / "scenarios").glob("*.json")):
            d = json.loads(f.read_text())
            cfg = ScenarioConfig.from_dict(d["config"])
            bs = d.get("bs", [])
            dep = Deployment(
                Region(cfg.side_km),
                [p[0] for p in bs], [p[1] for p in bs],
                bs_antenna_height_m=cfg.bs_height_m,
                ue_antenna_height_m=cfg.ue_height_m,
            )
            self.scenarios[d["id"]] = ScenarioRecord(
                d["id"], cfg, dep, d["created"], d["modified"], d["revision"])
        # finished jobs stay retrievable across restarts
        for f in sorted((self.dir / "jobs").glob("*.json")):
            d = json.loads(f.read_text())
            if d["status"] not in ("done", "failed", "cancelled"):
                continue
            rec = self.scenarios.get(d["scenario_id"])
            if rec is None:
                continue
            job = Job(d["id"], d["scenario_id"], d["revision"],
                      Direction(d["direction"]), rec.config, rec.deployment,
                      d["resolution"], d["trials"], status=d["status"],
                      progress=d["progress"], error=d.get("error", ""))
            result_file = self.dir / "results" / f"{job.id}.json"
            if job.status == "done" and result_file.exists():
                job.result = CoverageMap.from_dict(json.loads(result_file.read_text()))
            elif job.status == "done":
                continue
            self.jobs[job.id] = job

    def persist_scenario(self, rec: ScenarioRecord):
        path = self.dir / "scenarios" / f"{rec.id}.json"
        path.write_text(json.dumps(rec.to_dict(), indent=2, sort_keys=True))

    def persist_job(self, job: Job):
        path = self.dir / "jobs" / f"{job.id}.json"
        path.write_text(json.dumps(job.to_dict(), indent=2, sort_keys=True))
        if job.result is not None:
            base = self.dir / "results" / job.id
            base.with_suffix(".json").write_text(json.dumps(job.result.to_dict()))
            base.with_suffix(".png").write_bytes(write_png(job.result))

    def busy_lock(self, scenario_id: str) -> threading.Lock:
        with self.lock:
            return self._scenario_busy.setdefault(scenario_id, threading.Lock())

    def submit(self, job: Job):
        with self.lock:
            self.jobs[job.id] = job
        self.persist_job(job)
        self.pool.submit(self._run_job, job)

    def _run_job(self, job: Job):
        with self.busy_lock(job.scenario_id):
            if job.cancel.is_set():
                job.status = "cancelled"
                self.persist_job(job)
                return
            job.status = "running"

            def progress(done, total):
                job.progress = done / total

            try:
                job.result = scan_grid(
                    job.config, job.deployment, job.direction,
                    progress=progress, cancel=job.cancel,
                    resolution=job.resolution, trials=job.trials,
                    workers=self.engine_workers,
                )
                job.progress = 1.0
                job.status = "done"
            except ScanCancelled:
                job.status = "cancelled"
            except Exception as exc:
                job.status = "failed"
                job.error = str(exc)
            self.persist_job(job)


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse({"error": message}, status_code=status)


def create_app(data_dir: str | Path | None = None, max_workers: int | None = None,
               engine_workers: int | None = None) -> FastAPI:
    store = Store(Path(data_dir or os.environ.get("UDNSIM_DATA_DIR", DEFAULT_DATA_DIR)),
                  max_workers=max_workers, engine_workers=engine_workers)
    app = FastAPI(title="udnsim planning service")
    app.state.store = store
    # local planning tool; the browser client is served from another port
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.post("/scenarios", status_code=201)
    def create_scenario(payload: dict = Body(...)):
        try:
            cfg = ScenarioConfig.from_dict(payload)
        except ConfigError as exc:
            return _error(400, str(exc))
        sid = uuid.uuid4().hex[:12]
        now = time.time()
        rec = ScenarioRecord(sid, cfg, build_deployment(cfg), now, now)
        with store.lock:
            store.scenarios[sid] = rec
        store.persist_scenario(rec)
        return {"id": sid}

    @app.get("/scenarios/{sid}")
    def get_scenario(sid: str):
        rec = store.scenarios.get(sid)
        if rec is None:
            return _error(404, "unknown scenario")
        return rec.to_dict()

    @app.post("/scenarios/{sid}/bs")
    def add_bs(sid: str, payload: dict = Body(...)):
        rec = store.scenarios.get(sid)
        if rec is None:
            return _error(404, "unknown scenario")
        try:
            x, y = float(payload["x_km"]), float(payload["y_km"])
        except (KeyError, TypeError, ValueError):
            return _error(422, "body must carry numeric x_km and y_km")
        with store.lock:
            try:
                rec.deployment = rec.deployment.with_bs(x, y)
            except GeometryError:
                return _error(422, "point outside region")
            rec.revision += 1
            rec.modified = time.time()
            store.persist_scenario(rec)
            return {"ok": True, "bs_count": rec.deployment.n_bs,
                    "revision": rec.revision}

    @app.delete("/scenarios/{sid}/bs/{index}")
    def delete_bs(sid: str, index: int):
        rec = store.scenarios.get(sid)
        if rec is None:
            return _error(404, "unknown scenario")
        with store.lock:
            if not (0 <= index < rec.deployment.n_bs):
                return _error(404, "BS index out of range")
            if rec.deployment.n_bs == 1:
                return _error(409, "cannot delete the last BS")
            rec.deployment = rec.deployment.without_bs(index)
            rec.revision += 1
            rec.modified = time.time()
            store.persist_scenario(rec)
            return {"ok": True, "bs_count": rec.deployment.n_bs,
                    "revision": rec.revision}

    @app.post("/scenarios/{sid}/compute", status_code=202)
    def compute(sid: str, payload: dict = Body(default={})):
        rec = store.scenarios.get(sid)
        if rec is None:
            return _error(404, "unknown scenario")
        direction = Direction(payload.get("direction", "dl"))
        resolution = int(payload.get("resolution") or rec.config.resolution)
        trials = int(payload.get("trials") or rec.config.trials)
        if resolution < 1 or trials < 1:
            return _error(400, "resolution and trials must be >= 1")
        from .engine.params import check_direction
        try:
            check_direction(rec.config, direction)
        except ValueError as exc:
            return _error(400, str(exc))
        with store.lock:
            job = Job(uuid.uuid4().hex[:12], sid, rec.revision, direction,
                      rec.config, rec.deployment, resolution, trials)
        store.submit(job)
        return {"job_id": job.id}

    @app.get("/jobs/{jid}")
    def job_status(jid: str):
        job = store.jobs.get(jid)
        if job is None:
            return _error(404, "unknown job")
        return job.to_dict()

    @app.delete("/jobs/{jid}")
    def cancel_job(jid: str):
        job = store.jobs.get(jid)
        if job is None:
            return _error(404, "unknown job")
        if job.status in ("done", "failed"):
            return _error(409, f"job already {job.status}")
        job.cancel.set()
        return {"ok": True}

    def _result_of(jid: str):
        job = store.jobs.get(jid)
        if job is None:
            return None, _error(404, "unknown job")
        if job.status == "cancelled":
            return None, _error(410, "job was cancelled")
        if job.status != "done":
            return None, _error(409, f"job is {job.status}")
        return job, None

    @app.get("/jobs/{jid}/result")
    def job_result(jid: str):
        job, err = _result_of(jid)
        if err is not None:
            return err
        return job.result.to_dict()

    @app.get("/jobs/{jid}/result.png")
    def job_result_png(jid: str):
        job, err = _result_of(jid)
        if err is not None:
            return err
        return Response(write_png(job.result), media_type="image/png")

    def _diff_of(a: str, b: str):
        ja, err = _result_of(a)
        if err is not None:
            return None, err
        jb, err = _result_of(b)
        if err is not None:
            return None, err
        if ja.result.resolution != jb.result.resolution \
                or ja.result.side_km != jb.result.side_km:
            return None, _error(409, "maps have mismatched shapes")
        return diff(ja.result, jb.result), None

    @app.get("/diff")
    def diff_json(a: str, b: str):
        d, err = _diff_of(a, b)
        if err is not None:
            return err
        return d.to_dict()

    @app.get("/diff.png")
    def diff_png(a: str, b: str):
        d, err = _diff_of(a, b)
        if err is not None:
            return err
        return Response(write_diff_png(d), media_type="image/png")

    return app


def main() -> None:
    parser = argparse.ArgumentParser(prog="udnsim-serve",
                                     description="run the planning HTTP service")
    parser.add_argument("--bind", default="127.0.0.1:8765", metavar="HOST:PORT")
    parser.add_argument("--data-dir", default=None)
    parser.add_argument("--workers", type=int, default=None,
                        help="concurrent map-computation jobs")
    args = parser.parse_args()
    host, _, port = args.bind.rpartition(":")
    import uvicorn

    uvicorn.run(create_app(args.data_dir, max_workers=args.workers),
                host=host or "127.0.0.1", port=int(port or 8765))


if __name__ == "__main__":
    main()
