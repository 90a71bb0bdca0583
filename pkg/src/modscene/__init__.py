"""Modular LLM code generation engine for 2D interactive scenes.

Each scene element gets its own conversation module and code file; a
central module scripts interactions using compiled summaries of the
element classes instead of their source.
"""

from .backend import CompletionRequest, LiveBackend, MockBackend
from .context import ClassSummary, ContextRepository, FunctionInfo, VariableInfo
from .engine import Engine, EngineConfig, GenerationResult
from .errors import EngineError
from .scene import AssetRef, Element, GraphicalProxy, SceneModel, Transform
from .scenario import run_scenario
from .server import create_app

__version__ = "0.1.0"

__all__ = [
    "AssetRef",
    "ClassSummary",
    "CompletionRequest",
    "ContextRepository",
    "Element",
    "Engine",
    "EngineConfig",
    "EngineError",
    "FunctionInfo",
    "GenerationResult",
    "GraphicalProxy",
    "LiveBackend",
    "MockBackend",
    "SceneModel",
    "Transform",
    "VariableInfo",
    "create_app",
    "run_scenario",
]
