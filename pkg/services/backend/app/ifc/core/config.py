"""
Centralized configuration for the IFC toolchain.
"""
import os
from typing import List
from dotenv import load_dotenv

from .lattice import parse_lattice

load_dotenv()


class AppConfig:
    """Application-level configuration"""

    # Lattice used when a source file or request does not declare one
    DEFAULT_LATTICE: str = os.getenv("IFC_LATTICE", "2pt")

    # Failing fuzz cases are written below this directory
    REPLAY_DIR: str = os.getenv("IFC_REPLAY_DIR", "replays")

    LOG_LEVEL: str = os.getenv("IFC_LOG_LEVEL", "WARNING").upper()

    # CORS settings for the HTTP service
    CORS_ORIGINS: List[str] = [
        o.strip() for o in os.getenv(
            "CORS_ORIGINS",
            "http://localhost,http://localhost:3000"
        ).split(",") if o.strip()
    ]

    # Largest program text accepted over HTTP
    MAX_SOURCE_CHARS: int = int(os.getenv("IFC_MAX_SOURCE_CHARS", "100000"))

    @classmethod
    def validate(cls):
        """Validate application configuration"""
        assert cls.LOG_LEVEL in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"), \
            "IFC_LOG_LEVEL must be a standard logging level name"
        assert cls.MAX_SOURCE_CHARS > 0, "IFC_MAX_SOURCE_CHARS must be positive"
        # Raises LabelSyntaxError on a malformed description
        parse_lattice(cls.DEFAULT_LATTICE)

    @classmethod
    def get_config_dict(cls):
        """Get configuration as dictionary"""
        return {
            "default_lattice": cls.DEFAULT_LATTICE,
            "replay_dir": cls.REPLAY_DIR,
            "log_level": cls.LOG_LEVEL,
            "max_source_chars": cls.MAX_SOURCE_CHARS,
        }


class EvalConfig:
    """Configuration for the big-step evaluators and the forcing semantics"""

    # Step budget shared by pure evaluation and forcing
    FUEL: int = int(os.getenv("IFC_FUEL", "100000"))

    # Python recursion head-room; running past it is reported as a timeout
    MAX_DEPTH: int = int(os.getenv("IFC_MAX_DEPTH", "20000"))

    @classmethod
    def validate(cls):
        """Validate evaluator configuration"""
        assert cls.FUEL > 0, "IFC_FUEL must be positive"
        assert cls.MAX_DEPTH >= 1000, "IFC_MAX_DEPTH must be at least 1000"

    @classmethod
    def get_config_dict(cls):
        """Get configuration as dictionary"""
        return {"fuel": cls.FUEL, "max_depth": cls.MAX_DEPTH}


class HarnessConfig:
    """Configuration for generators and differential oracles"""

    SEED: int = int(os.getenv("IFC_SEED", "0"))

    # Secret pairs sampled per program by the noninterference oracles
    NI_SAMPLES: int = int(os.getenv("IFC_NI_SAMPLES", "50"))

    # Node budget and retry count for type-directed generation
    GEN_SIZE: int = int(os.getenv("IFC_GEN_SIZE", "40"))
    GEN_ATTEMPTS: int = int(os.getenv("IFC_GEN_ATTEMPTS", "50"))

    # Nesting depth of randomly chosen goal and annotation types
    TYPE_DEPTH: int = int(os.getenv("IFC_TYPE_DEPTH", "2"))

    WORKERS: int = int(os.getenv("IFC_WORKERS", "1"))

    # Closed programs that time out are regenerated this many times; a run
    # whose terminating share stays below MIN_TERMINATION fails
    TERMINATION_RETRIES: int = int(os.getenv("IFC_TERMINATION_RETRIES", "5"))
    MIN_TERMINATION: float = float(os.getenv("IFC_MIN_TERMINATION", "0.95"))

    @classmethod
    def validate(cls):
        """Validate harness configuration"""
        assert cls.NI_SAMPLES > 0, "IFC_NI_SAMPLES must be positive"
        assert cls.GEN_SIZE > 0, "IFC_GEN_SIZE must be positive"
        assert cls.GEN_ATTEMPTS > 0, "IFC_GEN_ATTEMPTS must be positive"
        assert 0 <= cls.TYPE_DEPTH <= 4, "IFC_TYPE_DEPTH must be between 0 and 4"
        assert cls.WORKERS >= 1, "IFC_WORKERS must be at least 1"
        assert cls.TERMINATION_RETRIES >= 0, "IFC_TERMINATION_RETRIES must be non-negative"
        assert 0.0 <= cls.MIN_TERMINATION <= 1.0, "IFC_MIN_TERMINATION must be between 0 and 1"

    @classmethod
    def get_config_dict(cls):
        """Get configuration as dictionary"""
        return {
            "seed": cls.SEED,
            "ni_samples": cls.NI_SAMPLES,
            "gen_size": cls.GEN_SIZE,
            "gen_attempts": cls.GEN_ATTEMPTS,
            "type_depth": cls.TYPE_DEPTH,
            "workers": cls.WORKERS,
            "termination_retries": cls.TERMINATION_RETRIES,
            "min_termination": cls.MIN_TERMINATION,
        }


# Validate configuration on import
AppConfig.validate()
EvalConfig.validate()
HarnessConfig.validate()


def default_lattice():
    """Lattice instance named by ``AppConfig.DEFAULT_LATTICE``."""
    return parse_lattice(AppConfig.DEFAULT_LATTICE)
