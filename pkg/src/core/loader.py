import json
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, Any

from src.core.exceptions import ConfigurationError

PROJECT_ROOT = Path(__file__).parent.parent.parent


@dataclass(frozen=True)
class Tolerances:
    eps_num: float
    eps_vol: float
    eps_det: float
    eps_lp: float
    eps_prune: float
    particle_round: float


@lru_cache(maxsize=1)
def load_settings() -> Dict[str, Any]:
    override = os.environ.get('NSPOMDP_SETTINGS')
    settings_path = Path(override) if override else PROJECT_ROOT / 'config' / 'settings.json'

    if not settings_path.exists():
        raise ConfigurationError(f"Settings file not found: {settings_path}")

    with open(settings_path, 'r', encoding='utf-8') as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Invalid settings file {settings_path}: {e}") from e


@lru_cache(maxsize=1)
def get_tolerances() -> Tolerances:
    """Numeric tolerances shared by geometry, LP and bound code. Cached."""
    tol = load_settings()['tolerances']
    return Tolerances(
        eps_num=float(tol['eps_num']),
        eps_vol=float(tol['eps_vol']),
        eps_det=float(tol['eps_det']),
        eps_lp=float(tol['eps_lp']),
        eps_prune=float(tol['eps_prune']),
        particle_round=float(tol['particle_round']),
    )


def get_budget(name: str) -> int:
    budgets = load_settings()['budgets']
    if name not in budgets:
        raise ConfigurationError(f"Unknown budget: {name}")
    return int(budgets[name])


def get_thread_count() -> int:
    raw = os.environ.get('NSPOMDP_THREADS', '').strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigurationError(f"NSPOMDP_THREADS must be an integer, got {raw!r}")


def get_models_path() -> Path:
    settings = load_settings()
    return PROJECT_ROOT / settings['models']['directory']


def get_log_path() -> Path:
    settings = load_settings()
    return PROJECT_ROOT / settings['logging']['directory']
