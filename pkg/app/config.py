import logging
import os
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

from app.utils.errors import ConfigurationError, DomainError


def _int_env(name: str, default: int) -> int:
    raw = os.environ.get(name, str(default))
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}")


@dataclass(frozen=True)
class Settings:
    """Runtime settings read from the environment (and .env when present)."""

    default_ambient: int = 2
    max_ambient: int = 12
    workers: int = 1
    check_cases: int = 200
    check_seed: int = 20240
    log_level: str = "INFO"
    workspace_path: Optional[str] = None
    secret_key: str = "dev-secret-key"

    @classmethod
    def from_env(cls) -> "Settings":
        load_dotenv()

        settings = cls(
            default_ambient=_int_env('HRR_DEFAULT_AMBIENT', 2),
            max_ambient=_int_env('HRR_MAX_AMBIENT', 12),
            workers=_int_env('HRR_WORKERS', 1),
            check_cases=_int_env('HRR_CHECK_CASES', 200),
            check_seed=_int_env('HRR_CHECK_SEED', 20240),
            log_level=os.environ.get('HRR_LOG_LEVEL', 'INFO').upper(),
            workspace_path=os.environ.get('HRR_WORKSPACE') or None,
            secret_key=os.environ.get('SECRET_KEY', 'dev-secret-key'),
        )
        settings.validate()
        return settings

    def validate(self):
        if self.max_ambient < 1:
            raise ConfigurationError("HRR_MAX_AMBIENT must be at least 1")
        if not 1 <= self.default_ambient <= self.max_ambient:
            raise ConfigurationError(
                f"HRR_DEFAULT_AMBIENT must lie in 1..{self.max_ambient}, got {self.default_ambient}"
            )
        if self.workers < 1:
            raise ConfigurationError("HRR_WORKERS must be at least 1")
        if self.check_cases < 1:
            raise ConfigurationError("HRR_CHECK_CASES must be at least 1")
        if not isinstance(logging.getLevelName(self.log_level), int):
            raise ConfigurationError(f"Unknown HRR_LOG_LEVEL {self.log_level!r}")

    def check_ambient(self, n: int) -> int:
        """Reject ambient dimensions outside the configured range."""
        if not 1 <= n <= self.max_ambient:
            raise DomainError(f"ambient dimension must lie in 1..{self.max_ambient}, got {n}")
        return n


def configure_logging(level: str = "INFO"):
    """Route all log records to stderr so stdout stays machine-readable."""
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )
