"""biasim: deterministic agent-based simulators for cognitive biases in
mobility choice (habits, reactance, halo)."""

from .engine import Engine, MODEL_KINDS
from .world import World, WorldConfig

__version__ = "0.1.0"

__all__ = ["Engine", "MODEL_KINDS", "World", "WorldConfig", "__version__"]
