"""Configuration management for skewgraph.

This module provides runtime settings shared by every service. All values can be
overridden via environment variables (prefixed with ``SKEWGRAPH_``) or a .env file.

Environment Variables:
    SKEWGRAPH_THREADS: Worker threads for parallel loops (default: 1)
    SKEWGRAPH_SINGLETON_TOL: Diameter below which a backward image counts as a point (default: 1e-9)
    SKEWGRAPH_MAX_DEPTH: Depth budget for coding (default: 10000)
    SKEWGRAPH_GAP_TOL: Merge tolerance for float interval engines (default: 1e-12)
    SKEWGRAPH_OT_ATOM_BUDGET: Combined atom budget of the exact transport solver (default: 4000)
    SKEWGRAPH_DISCARD_FRACTION_LIMIT: Allowed share of non-converged codings (default: 0.1)
    SKEWGRAPH_DEFAULT_WORD_LENGTH: Half-length of sampled symbol windows (default: 64)
    SKEWGRAPH_DEFAULT_BASE_DEPTH: Symbol range compared by the base metric (default: 16)
    SKEWGRAPH_PERTURBATION_DELTA: Jitter size of the perturbation harness (default: 1e-3)
    SKEWGRAPH_LOG_LEVEL: Logging level (default: INFO)
    SKEWGRAPH_LOG_FORMAT: Logging format, json or text (default: json)
    SKEWGRAPH_ENVIRONMENT: Environment name (default: development)
    SKEWGRAPH_DEBUG: Enable debug mode (default: false)
"""

from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime settings for skewgraph.

    Operation arguments always win over these values; settings only supply defaults.
    """

    model_config = SettingsConfigDict(
        env_prefix="SKEWGRAPH_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Parallelism
    threads: int = 1

    # Coding and set iteration
    singleton_tol: float = 1e-9
    max_depth: int = 10_000
    gap_tol: float = 1e-12
    target_max_iter: int = 200

    # Measures
    ot_atom_budget: int = 4000
    discard_fraction_limit: float = 0.10
    default_word_length: int = 64
    default_base_depth: int = 16

    # Zoo
    perturbation_delta: float = 1e-3

    # Logging configuration
    log_level: str = "INFO"
    log_format: str = "json"

    # Environment configuration
    environment: str = "development"
    debug: bool = False

    def worker_count(self) -> int:
        """Number of worker threads, never below one."""
        return max(1, self.threads)


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance (singleton pattern)."""
    return Settings()
