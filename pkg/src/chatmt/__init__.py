"""Context-aware chat translation: corpus handling, context bundles, prompt
rendering, pluggable chat-completion backends, MT metrics, batch/ablation
pipelines, and a live session service."""

__version__ = "0.1.0"

from .backend import (  # noqa: F401
    BackendConfig,
    BackendResult,
    HttpBackend,
    LanguageGuess,
    MockBackend,
    detect_language,
    guarded_translate,
)
from .context import (  # noqa: F401
    ContextBundle,
    HistoryEntry,
    Summary,
    SummaryCache,
    build_context,
    summarize_turns,
    truncate_summary,
    update_summary_incremental,
)
from .corpus import (  # noqa: F401
    ChatRecord,
    Conversation,
    SplitStats,
    assemble_conversations,
    parse_record,
    serialize_record,
    split_stats,
)
from .metrics import (  # noqa: F401
    BleuConfig,
    ChrfConfig,
    MetricReport,
    PRF,
    TagSpan,
    bleu,
    chrf,
    corpus_report,
    f1,
    prf_against_reference,
    tag_formality_ko,
    tag_lexical_cohesion,
)
from .prompting import (  # noqa: F401
    PromptPackage,
    build_prompt,
    render_instruction,
    render_messages,
    render_system,
)
