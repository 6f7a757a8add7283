"""Communicating finite state machines: bounded exploration and
synchronizability checks."""

from cfsm.model import (
    Configuration,
    MessageSet,
    Peer,
    SemanticsKind,
    System,
    initial_configuration,
    run,
    validate_system,
)
from cfsm.trace import Action

__version__ = "0.1.0"

__all__ = [
    "Action",
    "Configuration",
    "MessageSet",
    "Peer",
    "SemanticsKind",
    "System",
    "initial_configuration",
    "run",
    "validate_system",
]
