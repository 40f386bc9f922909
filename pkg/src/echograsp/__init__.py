"""Deterministic closed-loop simulator for audio-guided reach and grasp.

A blindfolded subject (scripted or human-driven) locates a bottle on a
table by stereo beacon cues, closes in, aligns a prosthetic wrist by beep
cadence, and grasps on spoken prompts.  The package bundles the simulation
core, a batch experiment harness with CSV/JSON/figure output, and a
WebSocket session service for interactive clients.
"""

__version__ = "0.1.0"

from .agent import AgentParams
from .guidance import Phase, Thresholds
from .harness import ExperimentConfig, SubjectConfig, TrialRecord, run_experiment, run_trial
from .session import SessionConfig, SimSession
from .world import ArenaConfig, WorldState

__all__ = [
    "AgentParams",
    "ArenaConfig",
    "ExperimentConfig",
    "Phase",
    "SessionConfig",
    "SimSession",
    "SubjectConfig",
    "Thresholds",
    "TrialRecord",
    "WorldState",
    "run_experiment",
    "run_trial",
    "__version__",
]
