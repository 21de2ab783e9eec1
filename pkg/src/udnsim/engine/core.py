"""Trial orchestration: coverage estimation per probe location and
whole-map scans with deterministic parallel execution.

Per-(pixel, trial) randomness is derived statelessly from
(master seed, pixel index, trial index), so results are independent of
scheduling, chunking and worker count.  Pixel (i, j) of a map is the probe
at ((i + 0.5) * side / res, (j + 0.5) * side / res); its stream index is
i * res + j.
"""

from __future__ import annotations

import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import rng as _rng
from ..config import Direction, ScenarioConfig, fingerprint
from ..geometry import Deployment, Point2D
from ..sinr import SinrSample
from . import params as _params
from . import fallback as _fallback

try:  # compiled kernel, optional
    from . import _kernel
    _HAVE_KERNEL = True
except ImportError:
    _kernel = None
    _HAVE_KERNEL = False

_FORCED = os.environ.get("UDNSIM_BACKEND", "").strip().lower()
if _FORCED == "numpy":
    _HAVE_KERNEL = False
elif _FORCED == "cython" and not _HAVE_KERNEL:
    raise ImportError("UDNSIM_BACKEND=cython but the compiled kernel is not built")


def backend_name() -> str:
    return "cython" if _HAVE_KERNEL else _fallback.BACKEND_NAME


class ScanCancelled(RuntimeError):
    """Raised when a scan is cancelled; carries the partial map."""

    def __init__(self, partial: "CoverageMap", done_mask: np.ndarray):
        super().__init__("scan cancelled")
        self.partial = partial
        self.done_mask = done_mask


@dataclass
class CoverageMap:
    fingerprint: str
    resolution: int
    side_km: float
    direction: Direction
    values: np.ndarray          # (res, res), values[i, j]
    trials: np.ndarray          # per-pixel trial counts

    def pixel_center(self, i: int, j: int) -> Point2D:
        step = self.side_km / self.resolution
        return Point2D((i + 0.5) * step, (j + 0.5) * step)

    def to_dict(self) -> dict:
        return {
            "fingerprint": self.fingerprint,
            "resolution": self.resolution,
            "side_km": self.side_km,
            "direction": self.direction.value,
            "values": [float(v) for v in self.values.reshape(-1)],
            "trials": [int(t) for t in self.trials.reshape(-1)],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CoverageMap":
        res = int(d["resolution"])
        return cls(
            fingerprint=d.get("fingerprint", ""),
            resolution=res,
            side_km=float(d["side_km"]),
            direction=Direction(d["direction"]),
            values=np.asarray(d["values"], dtype=np.float64).reshape(res, res),
            trials=np.asarray(d.get("trials", [0] * res * res),
                              dtype=np.int64).reshape(res, res),
        )


@dataclass
class TrialSnapshot:
    """One Monte Carlo realization, reproducible from (seed, pixel, trial)."""

    pixel_index: int
    trial_index: int
    direction: Direction
    sample: SinrSample
    detail: dict = field(repr=False, default_factory=dict)


class TrialStream:
    """Addresses one trial's randomness: (master seed, pixel, trial)."""

    __slots__ = ("master_seed", "pixel_index", "trial_index")

    def __init__(self, master_seed: int, pixel_index: int = 0, trial_index: int = 0):
        self.master_seed = master_seed
        self.pixel_index = pixel_index
        self.trial_index = trial_index

    @property
    def key(self) -> int:
        return _rng.trial_key(self.master_seed, self.pixel_index, self.trial_index)


class Engine:
    """Prepared scenario bound to the active backend."""

    def __init__(self, config: ScenarioConfig, deployment: Deployment):
        config.validate()
        self.config = config
        self.deployment = deployment
        self.params = _params.build_params(config, deployment)
        self._fb_runtime = _fallback.Runtime(self.params)
        self._kernel_runtime = (_kernel.Runtime(self.params) if _HAVE_KERNEL else None)

    def run_pixel(self, pixel_index: int, px: float, py: float,
                  direction: Direction, t0: int, count: int):
        is_ul = direction is Direction.UL
        if self._kernel_runtime is not None:
            return _kernel.run_pixel(self._kernel_runtime, pixel_index,
                                     px, py, is_ul, t0, count)
        return _fallback.run_pixel(self._fb_runtime, pixel_index,
                                   px, py, is_ul, t0, count)


def run_trial(config: ScenarioConfig, deployment: Deployment, probe: Point2D,
              direction: Direction, stream: TrialStream) -> SinrSample:
    """One end-to-end trial at an arbitrary probe location."""
    _params.check_direction(config, direction)
    eng = Engine(config, deployment)
    sinr, sig, itf = eng.run_pixel(stream.pixel_index, probe.x_km, probe.y_km,
                                   direction, stream.trial_index, 1)
    noise = (eng.params.noise_bs_mw if direction is Direction.UL
             else eng.params.noise_ue_mw)
    return SinrSample(float(sig[0]), float(itf[0]), noise)


def trial_snapshot(config: ScenarioConfig, deployment: Deployment, probe: Point2D,
                   direction: Direction, stream: TrialStream) -> TrialSnapshot:
    """Full realization detail via the reference composition."""
    _params.check_direction(config, direction)
    params = _params.build_params(config, deployment)
    rt = _fallback.Runtime(params)
    ctx = _fallback.PixelContext(rt, stream.pixel_index, probe.x_km, probe.y_km)
    sig, itf, noise, detail = _fallback.simulate_trial(
        rt, ctx, stream.trial_index, direction is Direction.UL, collect=True)
    return TrialSnapshot(stream.pixel_index, stream.trial_index, direction,
                         SinrSample(sig, itf, noise), detail)


def coverage_at(config: ScenarioConfig, deployment: Deployment, probe: Point2D,
                direction: Direction = Direction.DL, stream_index: int = 0) -> float:
    """Pr[SINR > gamma] over config.trials independent trials (strict >)."""
    _params.check_direction(config, direction)
    eng = Engine(config, deployment)
    sinr, _, _ = eng.run_pixel(stream_index, probe.x_km, probe.y_km,
                               direction, 0, config.trials)
    return float(np.mean(sinr > config.gamma))


def scan_grid(
    config: ScenarioConfig,
    deployment: Deployment,
    direction: Direction = Direction.DL,
    progress=None,
    workers: int | None = None,
    cancel: threading.Event | None = None,
    resolution: int | None = None,
    trials: int | None = None,
) -> CoverageMap:
    """Coverage at every pixel center; deterministic for any worker count.

    `progress(done, total)` is invoked after each completed pixel.  If
    `cancel` is set mid-scan, ScanCancelled carries the partial map.
    """
    _params.check_direction(config, direction)
    res = int(resolution or config.resolution)
    n_trials = int(trials or config.trials)
    if res < 1 or n_trials < 1:
        raise ValueError("resolution and trials must be >= 1")
    eng = Engine(config, deployment)
    gamma = config.gamma
    side = config.side_km
    step = side / res
    values = np.zeros((res, res))
    done_mask = np.zeros((res, res), dtype=bool)
    counts = np.full((res, res), n_trials, dtype=np.int64)
    total = res * res
    n_workers = max(1, workers or os.cpu_count() or 1)
    lock = threading.Lock()
    done = 0
    # trial chunking keeps cancellation responsive on big pixels
    chunk = max(64, min(n_trials, 512))

    def one_pixel(ij):
        i, j = ij
        if cancel is not None and cancel.is_set():
            return False
        px, py = (i + 0.5) * step, (j + 0.5) * step
        pixel_index = i * res + j
        hits = 0
        for lo in range(0, n_trials, chunk):
            if cancel is not None and cancel.is_set() and lo > 0:
                return False
            cnt = min(chunk, n_trials - lo)
            sinr, _, _ = eng.run_pixel(pixel_index, px, py, direction, lo, cnt)
            hits += int(np.count_nonzero(sinr > gamma))
        values[i, j] = hits / n_trials
        done_mask[i, j] = True
        nonlocal done
        with lock:
            done += 1
            if progress is not None:
                progress(done, total)
        return True

    tasks = [(i, j) for i in range(res) for j in range(res)]
    if n_workers == 1:
        for t in tasks:
            one_pixel(t)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(one_pixel, tasks))

    fmap = CoverageMap(fingerprint(config, deployment), res, side, direction,
                       values, counts)
    if cancel is not None and cancel.is_set() and not done_mask.all():
        counts = np.where(done_mask, n_trials, 0)
        raise ScanCancelled(
            CoverageMap(fmap.fingerprint, res, side, direction, values, counts),
            done_mask)
    return fmap
