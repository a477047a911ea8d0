from .backends import (
    NetworkxBackend,
    RDKitBackend,
    SmilesError,
    ToolchainMissing,
    load_backend,
)
from .crosscheck import AgreementReport, CheckResult, Disagreement, crosscheck

__all__ = [
    "AgreementReport",
    "CheckResult",
    "Disagreement",
    "NetworkxBackend",
    "RDKitBackend",
    "SmilesError",
    "ToolchainMissing",
    "crosscheck",
    "load_backend",
]
