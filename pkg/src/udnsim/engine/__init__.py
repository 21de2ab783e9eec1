"""Monte Carlo engine: compiled kernel when available, NumPy fallback
otherwise (override with UDNSIM_BACKEND=numpy|cython)."""

from .core import (
    CoverageMap,
    Engine,
    ScanCancelled,
    TrialSnapshot,
    TrialStream,
    backend_name,
    coverage_at,
    run_trial,
    scan_grid,
    trial_snapshot,
)

__all__ = [
    "CoverageMap",
    "Engine",
    "ScanCancelled",
    "TrialSnapshot",
    "TrialStream",
    "backend_name",
    "coverage_at",
    "run_trial",
    "scan_grid",
    "trial_snapshot",
]
