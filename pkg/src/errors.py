#!/usr/bin/env python3
"""
Errors - Exception hierarchy shared by the simulator, metrics and harness
"""


class QccnnError(Exception):
    """Base class for every error raised by this package"""


class ConfigError(QccnnError, ValueError):
    """Invalid configuration: bad spec fields, capacity exceeded, bad config file"""

    def __init__(self, message, field=None, line=None):
        self.detail = message
        self.field = field
        self.line = line
        where = []
        if field:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class ContractViolation(QccnnError, ValueError):
    """A caller broke an operation's precondition"""


class DegenerateInputError(QccnnError, ValueError):
    """Input that cannot be encoded, e.g. an all-zero amplitude vector"""


class DimensionMismatchError(QccnnError, ValueError):
    """Operands with incompatible sizes"""


class UnsupportedEncodingError(QccnnError, ValueError):
    """The requested analysis is not defined for this encoding"""


class NonFiniteError(QccnnError, ArithmeticError):
    """A numerical estimate became NaN or infinite"""

    def __init__(self, message, theta=None):
        self.theta = theta
        super().__init__(message)


class TrainingDivergedError(QccnnError, RuntimeError):
    """Loss became non-finite during training"""

    def __init__(self, epoch, loss):
        self.epoch = epoch
        self.loss = loss
        super().__init__(f"Training diverged at epoch {epoch} (loss={loss})")


class SchemaMismatchError(QccnnError, ValueError):
    """CSV inputs to aggregate do not share a schema"""
