"""Transducer algebra with protocol-aware (coherent) state minimisation,
symbolic guarded transducers, and an online protocol monitor."""

from . import algebra, coherence, fixtures, frontend, kernel, protocol, symbolic
from .kernel import Round, Signature, Trace, TraceSet, Transducer

__version__ = "0.1.0"

__all__ = [
    "algebra",
    "coherence",
    "fixtures",
    "frontend",
    "kernel",
    "protocol",
    "symbolic",
    "Round",
    "Signature",
    "Trace",
    "TraceSet",
    "Transducer",
]
