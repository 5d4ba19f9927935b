"""Exception hierarchy.  Each class carries a short machine-greppable ``code``."""


class VprCompError(Exception):
    code = "VPRCOMP"
    #: CLI exit status when this error escapes a subcommand.
    exit_status = 1


class ParseError(VprCompError):
    code = "PARSE"


class EmptyInput(VprCompError):
    code = "EMPTY_INPUT"


class DuplicateQuery(VprCompError):
    code = "DUPLICATE_QUERY"


class RaggedMatrix(VprCompError):
    code = "RAGGED_MATRIX"


class DuplicateDataset(VprCompError):
    code = "DUPLICATE_DATASET"


class UnknownTechnique(VprCompError):
    code = "UNKNOWN_TECHNIQUE"
    exit_status = 2


class SamePair(VprCompError):
    code = "SAME_PAIR"
    exit_status = 2


class DuplicateTechnique(VprCompError):
    code = "DUPLICATE_TECHNIQUE"
    exit_status = 2


class NoDefinedScores(VprCompError):
    code = "NO_DEFINED_SCORES"


class EmptyScoreSet(VprCompError):
    code = "EMPTY_SCORE_SET"


class UndefinedComplementarity(VprCompError):
    code = "UNDEFINED_COMPLEMENTARITY"


class NoPartners(VprCompError):
    code = "NO_PARTNERS"


class InvalidSpec(VprCompError):
    code = "INVALID_SPEC"


class ReportIoError(VprCompError):
    code = "IO_ERROR"
