"""Command-line front end and the file formats it reads and writes."""

from .io import read_trajectory, write_trajectory
from .main import build_parser, main
from .pipeline import BenchmarkReport, CheckResult, Pipeline, RunReport, benchmark, check_trajectory
from .traces import IcmTrace, emit_icm_trace

__all__ = [
    "main",
    "build_parser",
    "Pipeline",
    "RunReport",
    "CheckResult",
    "BenchmarkReport",
    "check_trajectory",
    "benchmark",
    "read_trajectory",
    "write_trajectory",
    "IcmTrace",
    "emit_icm_trace",
]
