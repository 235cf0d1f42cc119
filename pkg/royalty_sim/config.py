import os
import sys
import logging
from pathlib import Path
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

# Load environment variables
load_dotenv()


@dataclass
class MechanismDefaults:
    d_turn: int
    w_window: int


@dataclass
class NumericsConfig:
    grid_steps: int


@dataclass
class Config:
    log_level: str
    log_file: Optional[Path]
    default_seed: Optional[int]
    workers: int
    mechanism: MechanismDefaults
    numerics: NumericsConfig


def get_config() -> Config:
    log_file = os.getenv("ROYALTY_SIM_LOG_FILE")
    seed = os.getenv("ROYALTY_SIM_SEED")

    return Config(
        log_level=os.getenv("LOG_LEVEL", "INFO"),
        log_file=Path(log_file) if log_file else None,
        default_seed=int(seed) if seed else None,
        workers=int(os.getenv("ROYALTY_SIM_WORKERS", "4")),
        mechanism=MechanismDefaults(
            d_turn=int(os.getenv("ROYALTY_SIM_D_TURN", "10")),
            w_window=int(os.getenv("ROYALTY_SIM_W_WINDOW", "100")),
        ),
        numerics=NumericsConfig(
            grid_steps=int(os.getenv("ROYALTY_SIM_GRID_STEPS", "10000")),
        ),
    )


def get_numerics_config() -> NumericsConfig:
    return get_config().numerics


def setup_logging(level: Optional[str] = None):
    config = get_config()
    # stdout is reserved for --json reports
    handlers = [logging.StreamHandler(sys.stderr)]
    if config.log_file is not None:
        config.log_file.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(config.log_file))
    logging.basicConfig(
        level=(level or config.log_level).upper(),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )
