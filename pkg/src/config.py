"""
Runtime settings, read from the environment (and a local `.env` file).

Every knob has a safe default so the library and CLI work without any
environment at all; a `.env` only tunes limits, logging and notifications.
"""

import os
from dataclasses import dataclass

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


@dataclass(frozen=True)
class Settings:
    log_level: str
    bruteforce_max_k: int
    exhaustive_max_k: int
    column_cap: int
    default_q: int
    default_seed: int
    report_dir: str
    discord_webhook_url: str


def get_settings() -> Settings:
    """Snapshot of the current environment."""
    return Settings(
        log_level=os.getenv('ALLREDUCE_LOG_LEVEL', 'INFO').upper(),
        bruteforce_max_k=int(os.getenv('ALLREDUCE_BRUTEFORCE_MAX_K', 12)),
        exhaustive_max_k=int(os.getenv('ALLREDUCE_EXHAUSTIVE_MAX_K', 5)),
        column_cap=int(os.getenv('ALLREDUCE_COLUMN_CAP', 100_000)),
        default_q=int(os.getenv('ALLREDUCE_DEFAULT_Q', 257)),
        default_seed=int(os.getenv('ALLREDUCE_DEFAULT_SEED', 2024)),
        report_dir=os.getenv('ALLREDUCE_REPORT_DIR', 'reports'),
        discord_webhook_url=os.getenv('DISCORD_WEBHOOK_URL', ''),
    )
