"""Exception hierarchy shared by every gptaudit module."""


class GptAuditError(Exception):
    """Base class for all errors raised by gptaudit."""


class InputError(GptAuditError, ValueError):
    """Malformed input: wrong dimension, invalid effect pair, signaling table, ..."""


class ZeroProbability(GptAuditError, ArithmeticError):
    """Conditioning on an outcome whose probability does not exceed eps."""


class SingularFaithfulState(GptAuditError, ArithmeticError):
    """The faithful state matrix is singular or too badly conditioned to invert."""


class Inapplicable(GptAuditError):
    """An audit cannot run on this model (e.g. no pure faithful state)."""
