"""Differential forms on loop groups and loop spaces, with a registry of
numerically verified identities between them."""
from .errors import LoopFormsError
from .suite import REGISTRY, CheckResult, RunConfig, convergence_study, run_all, run_check

__all__ = ["LoopFormsError", "REGISTRY", "CheckResult", "RunConfig", "convergence_study", "run_all", "run_check"]
__version__ = "0.1.0"
