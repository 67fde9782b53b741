from typing import Literal, Optional

from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict

OutputFormat = Literal["text", "json", "latex"]


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )

    app_name: str = "BKP Hierarchy Engine"
    debug: bool = False
    environment: str = "development"

    host: str = "0.0.0.0"
    port: int = 8000

    default_depth: int = Field(default=6, ge=0)
    max_depth: int = Field(default=12, ge=0)
    default_format: OutputFormat = "text"
    default_seed: int = 0

    verify_workers: int = Field(default=1, ge=1)
    verify_retry_attempts: int = 2
    verify_retry_depth_step: int = 2
    property_cases: int = 200

    cors_origins: list[str] = ["*"]


settings = Settings()


class CliConfig(BaseModel):
    depth: int = Field(default_factory=lambda: settings.default_depth, ge=0)
    format: OutputFormat = Field(default_factory=lambda: settings.default_format)
    out: Optional[str] = None
    seed: int = Field(default_factory=lambda: settings.default_seed)

    @classmethod
    def from_flags(cls, **flags) -> "CliConfig":
        """Settings defaults overlaid with the flags that were actually given."""
        return cls(**{key: value for key, value in flags.items() if value is not None})
