"""molcap: molecule captioning from SMILES text and molecular graphs.

A from-scratch stack: numpy-backed autodiff, SMILES parsing, a GIN graph
encoder, a compact encoder-decoder text model, cross-token attention
fusion, text-generation metrics, and a training/evaluation harness.
"""

from .config import AblationConfig, ConfigError, RunConfig
from .model import MoleculeCaptioner, VersionError
from .prompts import TASKS, build_prompt

__version__ = "0.1.0"

__all__ = ["AblationConfig", "ConfigError", "MoleculeCaptioner", "RunConfig",
           "TASKS", "VersionError", "build_prompt", "__version__"]
