"""Learning logic programs whose constants are found during the search."""

from .engine import learn, score, score_task
from .logic import Clause, Hypothesis, Literal, Var, hypothesis_size
from .taskio import EngineConfig, LearnResult, TaskSpec, parse_task, render_program

__all__ = ["Clause", "EngineConfig", "Hypothesis", "LearnResult", "Literal", "TaskSpec", "Var",
           "hypothesis_size", "learn", "parse_task", "render_program", "score", "score_task"]
__version__ = "0.1.0"
