from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict

# Resolve .env from the project root so it loads regardless of cwd
_PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent
_ENV_FILE = _PROJECT_ROOT / ".env"


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=(str(_ENV_FILE), ".env"),
        env_file_encoding="utf-8",
        env_prefix="NETCODE_",
        case_sensitive=False,
        extra="ignore",
    )

    # Env
    env: str = "development"
    log_level: str = ""

    # Harness defaults
    default_trials: int = 1000
    confidence_level: float = 0.95
    workers: int = 1

    # Desk-scale guards
    max_field_size: int = 2**16
    decode_budget: int = 2**22  # codeword comparisons per trial
    enumeration_budget: int = 2**20  # subspaces enumerated per Grassmannian
    leakage_state_budget: int = 2**24  # secret vectors enumerated by leakage_entropy
    full_rank_max_attempts: int = 10_000

    # CORS for the HTTP surface
    cors_origins: str = "http://localhost:3000"

    @property
    def cors_origins_list(self) -> list[str]:
        return [o.strip() for o in self.cors_origins.split(",") if o.strip()]

    @property
    def is_production(self) -> bool:
        return self.env == "production"


settings = Settings()
