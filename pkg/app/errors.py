"""Error types

Every error names the condition it violates so the CLI and the HTTP layer
can report it verbatim, e.g. "(9') hyperbolicity violated: p=-1".
"""
from typing import Optional


class ContactError(Exception):
    """Base class for all library errors"""
    
    condition: str = ""
    
    def __init__(self, message: str, condition: Optional[str] = None):
        if condition is not None:
            self.condition = condition
        super().__init__(f"{self.condition} {message}".strip())
        self.message = message


class DomainError(ContactError, ValueError):
    """Argument outside the physical domain (p <= 0, |v| >= 1, ...)"""
    
    condition = "(9')"


class AdmissibilityError(ContactError):
    """A required admissibility bound fails (A0 > 0, |d1 Phi| >= 1/2, |phi| <= 1)"""
    
    condition = "(9)"


class PreconditionError(ContactError):
    """Operation precondition violated (|H_N| >= kappa, [d1 v] = 0, ...)"""
    
    condition = "(mf.1)"


class CausalityError(ContactError):
    """Front speed reaches the speed of light"""
    
    condition = "|sigma|<1"


class ConfigError(ContactError):
    """Malformed configuration or scenario file"""
    
    condition = "config"


class SolverError(ContactError):
    """Time integration aborted"""
    
    condition = "solver"
    
    def __init__(self, message: str, condition: Optional[str] = None, step: Optional[int] = None):
        self.step = step
        if step is not None:
            message = f"{message} (step {step})"
        super().__init__(message, condition)
