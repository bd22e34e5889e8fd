"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line layer can map it
without a lookup table: 1 for usage/config problems, 2 for data problems,
3 for numerical failures.
"""


class LagcastError(Exception):
    exit_code = 2


class ConfigError(LagcastError):
    exit_code = 1


class DataError(LagcastError):
    exit_code = 2


class NumericalError(LagcastError):
    exit_code = 3


# series-core
class EmptyIntersection(DataError):
    pass


class DegenerateSplit(DataError):
    pass


# ingest
class MalformedHeader(DataError):
    pass


class RaggedRow(DataError):
    pass


class UnparseableDate(DataError):
    pass


class UnparseableCount(DataError):
    pass


class EmptyInput(DataError):
    pass


class NetworkError(DataError):
    pass


class HttpStatusError(NetworkError):
    def __init__(self, url, status):
        super().__init__(f"HTTP {status} while fetching {url}")
        self.url = url
        self.status = status


# ardl
class TooShort(DataError):
    pass


class UnknownRole(DataError):
    pass


class RemovedUnknownTerm(ConfigError):
    pass


class RankDeficient(NumericalError):
    pass


class NotEnoughRows(NumericalError):
    pass


class NoFeasibleCandidate(NumericalError):
    pass


class MissingLag(DataError):
    pass


# regressors
class InvalidConfig(ConfigError):
    pass


class NonFiniteInput(DataError):
    pass


class MlpDiverged(NumericalError):
    pass


class LabelMismatch(DataError):
    pass


class AllCandidatesFailed(NumericalError):
    pass


# evaluation
class LengthMismatch(DataError):
    pass


class ZeroActual(DataError):
    pass


class TooFewRows(DataError):
    pass


# forecasting
class HistoryTooShort(DataError):
    pass


class FixedPointDiverged(NumericalError):
    def __init__(self, step, message="fixed point did not converge"):
        super().__init__(f"{message} at step {step}")
        self.step = step
