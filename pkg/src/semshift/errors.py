"""Exception types raised across the pipeline."""


class SemshiftError(Exception):
    """Base class for all pipeline errors."""


# corpus
class MissingFile(SemshiftError):
    pass


class MalformedLine(SemshiftError):
    def __init__(self, line_no, reason=""):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {reason}" if reason else f"line {line_no}")


class EmptyCorpus(SemshiftError):
    pass


class UnknownLabel(SemshiftError):
    def __init__(self, label):
        self.label = label
        super().__init__(f"unknown time label: {label!r}")


# keywords
class NoCandidates(SemshiftError):
    pass


# embeddings
class WordAbsent(SemshiftError):
    def __init__(self, word):
        self.word = word
        super().__init__(f"word {word!r} has no occurrences in the slice")


class DimMismatch(SemshiftError):
    pass


class MalformedRecord(SemshiftError):
    def __init__(self, line_no, reason=""):
        self.line_no = line_no
        super().__init__(f"record at line {line_no}: {reason}" if reason else f"record at line {line_no}")


class ZeroVector(SemshiftError):
    def __init__(self, row_index):
        self.row_index = row_index
        super().__init__(f"row {row_index} has zero norm")


# clustering
class TooFewRows(SemshiftError):
    pass


class SingleCluster(SemshiftError):
    pass


# change
class NotADistribution(SemshiftError):
    pass


class LengthMismatch(SemshiftError):
    pass


class EmptyMatrix(SemshiftError):
    pass


# masking
class EmptyDocument(SemshiftError):
    pass


class UnknownDocId(SemshiftError):
    def __init__(self, doc_id):
        self.doc_id = doc_id
        super().__init__(f"plan references unknown document {doc_id!r}")


# analysis
class MissingLogProb(SemshiftError):
    def __init__(self, doc_id, position):
        self.doc_id = doc_id
        self.position = position
        super().__init__(f"no log-probability for ({doc_id!r}, {position})")


class EmptyReplacementVocab(SemshiftError):
    pass


# cli
class ConfigError(SemshiftError):
    pass


class StageError(SemshiftError):
    """Wraps a module error with the pipeline stage it occurred in (1-based)."""

    def __init__(self, stage, message):
        self.stage = stage
        super().__init__(f"stage {stage}: {message}")
