import os
from dotenv import load_dotenv

from pydantic import BaseSettings, Field, validator

BASEDIR = os.path.abspath(os.path.dirname(__file__))

load_dotenv(os.path.join(BASEDIR, ".env"))


class CodecSettings(BaseSettings):
    """
    Process-wide defaults, read from DLK_* environment variables (and conf/.env).
    """
    log_level: str = "WARNING"
    default_qi: int = Field(32, ge=0, le=63)
    lambda_scale: float = Field(0.12, gt=0)
    min_block_size: int = 4
    verify_roundtrip: bool = False

    @validator("min_block_size")
    def validate_min_block_size(cls, value):
        if value not in (4, 8, 16, 32, 64):
            raise ValueError(f"Minimum block size <{value}> is not one of 4, 8, 16, 32, 64.")
        return value

    @validator("log_level")
    def validate_log_level(cls, value):
        value = value.upper()
        if value not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"Unknown log level <{value}>.")
        return value

    class Config:
        env_prefix = "DLK_"


settings = CodecSettings()
