"""blockmate: a personality-driven robot-arm collaborator simulation.

The package couples a three-trait personality vector to behavioral
parameters, an allostatic comfort controller, a comfort-aware forward
planner, episodic-memory action selection, a simulated manipulator, and a
turn-based two-color board game, all behind a deterministic seeded session
engine with a live HTTP/SSE service for human play.
"""

from .personality import (
    ActionClass,
    BehavioralParameters,
    PersonalityVector,
    Trait,
    TraitPole,
    archetypes,
    dominant_poles,
    generate_parameters,
    new_personality,
)

__all__ = [
    "ActionClass",
    "BehavioralParameters",
    "PersonalityVector",
    "Trait",
    "TraitPole",
    "archetypes",
    "dominant_poles",
    "generate_parameters",
    "new_personality",
]

__version__ = "0.1.0"
