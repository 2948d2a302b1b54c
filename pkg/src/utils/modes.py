from enum import Enum


class LossKind(Enum):
    SSE = "sse"
    PROPOSED = "proposed"


class NormMode(Enum):
    TRAIN = "train"
    INFER = "infer"


class CheckScale(Enum):
    TINY = "tiny"
    CLASSIFIER = "fig3"


class ReportFormat(Enum):
    CSV = "csv"
    MARKDOWN = "markdown"
