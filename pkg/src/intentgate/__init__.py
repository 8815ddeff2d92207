"""Shortlist-then-rerank intent gate for a scripted-response chatbot.

A character n-gram tf-idf classifier proposes a short candidate list, an
optional LLM reranker picks among the candidates or declares none of them
valid, and a confidence threshold decides whether the query is answered
with its intent's predetermined response or rejected as out of scope.
"""

from .corpus import (
    Dataset,
    Intent,
    IntentRegistry,
    UtteranceExample,
    load_dataset,
    load_registry,
    save_dataset,
    save_registry,
)
from .datagen import CorpusSpec, GeneratedCorpus, generate, write_corpus
from .evaluation import EvalReport, evaluate, in_scope_accuracy, oos_fpr, sweep
from .normalize import NormalizeConfig, normalize
from .pipeline import Decision, PipelineConfig, classify, respond
from .rerank import (
    HttpRerankerClient,
    OracleRerankerClient,
    RerankerSettings,
    ScriptedRerankerClient,
    build_prompt,
    parse_verdict,
)
from .shortlist import (
    ShortlistConfig,
    ShortlistModel,
    fit,
    load_model,
    rank,
    save_model,
    top_k_recall,
)

__version__ = "0.1.0"

__all__ = [
    "CorpusSpec",
    "Dataset",
    "Decision",
    "EvalReport",
    "GeneratedCorpus",
    "HttpRerankerClient",
    "Intent",
    "IntentRegistry",
    "NormalizeConfig",
    "OracleRerankerClient",
    "PipelineConfig",
    "RerankerSettings",
    "ScriptedRerankerClient",
    "ShortlistConfig",
    "ShortlistModel",
    "UtteranceExample",
    "build_prompt",
    "classify",
    "evaluate",
    "fit",
    "generate",
    "in_scope_accuracy",
    "load_dataset",
    "load_model",
    "load_registry",
    "normalize",
    "oos_fpr",
    "parse_verdict",
    "rank",
    "respond",
    "save_dataset",
    "save_model",
    "save_registry",
    "sweep",
    "top_k_recall",
    "write_corpus",
    "__version__",
]
