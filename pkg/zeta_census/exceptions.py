"""
Error taxonomy shared by the services and the management commands.

Every error carries the process exit status its command reports.
"""


class GramGridError(Exception):
    exit_code = 1
    kind = 'error'

    def as_record(self, command=None):
        """Structured form written next to failed reports"""
        return {
            'error': str(self),
            'kind': self.kind,
            'exit_code': self.exit_code,
            'command': command,
            'success': False,
        }


class DomainError(GramGridError, ValueError):
    """An argument lies outside the domain of the operation."""
    exit_code = 2
    kind = 'domain'


class ValidationError(GramGridError):
    """Invalid configuration, or a strict-mode admissibility check failed."""
    exit_code = 2
    kind = 'validation'


class NumericalError(GramGridError, ArithmeticError):
    """A solver failed to converge or an oracle self-check failed."""
    exit_code = 3
    kind = 'numerical'
