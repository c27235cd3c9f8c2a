from pydantic_settings import BaseSettings, SettingsConfigDict
from functools import lru_cache


class Settings(BaseSettings):
    MAX_DEGREE: int = 6
    MAX_CLASS: int = 4
    MAX_HALL_RANK: int = 512
    LOG_LEVEL: str = "WARNING"

    model_config = SettingsConfigDict(env_file=".env", env_prefix="KANTOWER_")


@lru_cache
def get_settings() -> Settings:

    return Settings()  # pydantic-settings handles loading from env
