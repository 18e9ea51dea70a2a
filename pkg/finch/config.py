"""
Configuration for finch

Priority order (highest wins):
  1. Environment variables (FINCH_SEED, FINCH_TOL, etc.)
  2. Config file (~/.finch/config.json, or FINCH_CONFIG)
  3. Built-in defaults

Command line flags override all three. Version is read from pyproject.toml
(single source of truth).
"""
import json
import logging
import os
import re
import sys
from pathlib import Path
from typing import Any, Callable, Optional

from .jets import DEFAULT_CAPABILITY
from .models.reports import Tolerances

logger = logging.getLogger(__name__)


def _read_version() -> str:
    """Read version from pyproject.toml. Falls back to hardcoded if not found."""
    try:
        pyproject = Path(__file__).parent.parent / "pyproject.toml"
        if pyproject.exists():
            text = pyproject.read_text()
            match = re.search(r'^version\s*=\s*"([^"]+)"', text, re.MULTILINE)
            if match:
                return match.group(1)
    except Exception:
        pass
    return "0.1.0"  # fallback for installed wheels without pyproject.toml


# ── Defaults ─────────────────────────────────────────────────────────────────

FINCH_DIR = Path.home() / ".finch"
DEFAULT_CONFIG_PATH = str(FINCH_DIR / "config.json")
DEFAULT_SEED = 42
DEFAULT_TOL = 1e-6
DEFAULT_SAMPLES = 100
DEFAULT_TRAJECTORIES = 10
DEFAULT_T_END = 3.0
DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


def _load_config_file(path: str) -> dict:
    """Load config from JSON file, returning empty dict if missing or invalid."""
    try:
        config_path = Path(path)
        if config_path.exists():
            with open(config_path, "r") as f:
                data = json.load(f)
                if isinstance(data, dict):
                    return data
                logger.warning("config file %s does not hold a JSON object, ignoring it", path)
    except (json.JSONDecodeError, IOError, OSError) as e:
        logger.warning("could not read config file %s: %s", path, e)
    return {}


def _as_bool(value: Any) -> bool:
    if isinstance(value, str):
        return value.strip().lower() in ("1", "true", "yes", "on")
    return bool(value)


class Config:
    """
    Run configuration.

    Loads from: env vars > config file > defaults.
    """

    def __init__(self, config_path: Optional[str] = None):
        self._config_path = config_path or os.getenv("FINCH_CONFIG", DEFAULT_CONFIG_PATH)
        self._file_config = _load_config_file(self._config_path)

        # ── Resolve values: env var > config file > default ──

        self.SEED = self._resolve("FINCH_SEED", "seed", DEFAULT_SEED, int)
        self.TOL = self._resolve("FINCH_TOL", "tol", DEFAULT_TOL, float)
        self.SAMPLES = self._resolve("FINCH_SAMPLES", "samples", DEFAULT_SAMPLES, int)
        self.TRAJECTORIES = self._resolve("FINCH_TRAJECTORIES", "trajectories", DEFAULT_TRAJECTORIES, int)
        self.T_END = self._resolve("FINCH_T_END", "t_end", DEFAULT_T_END, float)
        self.RTOL = self._resolve("FINCH_RTOL", "rtol", DEFAULT_RTOL, float)
        self.ATOL = self._resolve("FINCH_ATOL", "atol", DEFAULT_ATOL, float)

        orders = self._file_config.get("jet_orders", list(DEFAULT_CAPABILITY))
        try:
            self.JET_ORDERS = tuple(int(o) for o in orders)
            if len(self.JET_ORDERS) != 3:
                raise ValueError(orders)
        except (TypeError, ValueError):
            logger.warning("invalid jet_orders %r in %s, using %s", orders, self._config_path, DEFAULT_CAPABILITY)
            self.JET_ORDERS = tuple(DEFAULT_CAPABILITY)

        self.DEBUG = _as_bool(os.getenv("FINCH_DEBUG", "")) or _as_bool(self._file_config.get("debug", False))

        # Application metadata
        self.APP_NAME = "finch"
        self.APP_VERSION = _read_version()
        self.APP_DESCRIPTION = "Non-Riemannian curvature and first integrals of Finsler metrics"

    def _resolve(self, env: str, key: str, default, cast: Callable):
        for source, value in ((env, os.getenv(env)), (self._config_path, self._file_config.get(key))):
            if value is None or value == "":
                continue
            try:
                return cast(value)
            except (TypeError, ValueError):
                logger.warning("ignoring invalid %s=%r from %s", key, value, source)
        return default

    def tolerances(self, tol: Optional[float] = None) -> Tolerances:
        """Verdict tolerances with chi and drift set from ``tol`` (default the configured one)"""
        tol = self.TOL if tol is None else tol
        return Tolerances(chi=tol, drift=tol, t_end=self.T_END, rtol=self.RTOL, atol=self.ATOL)

    def to_dict(self) -> dict:
        """Return config as a dictionary."""
        return {
            "seed": self.SEED,
            "tol": self.TOL,
            "samples": self.SAMPLES,
            "trajectories": self.TRAJECTORIES,
            "t_end": self.T_END,
            "rtol": self.RTOL,
            "atol": self.ATOL,
            "jet_orders": list(self.JET_ORDERS),
            "debug": self.DEBUG,
            "config_file": self._config_path,
            "app_version": self.APP_VERSION,
        }


def setup_logging(debug: bool = False):
    """Install the stderr handler on the finch logger: WARNING, or DEBUG when asked."""
    root = logging.getLogger("finch")
    for handler in list(root.handlers):
        if getattr(handler, "_finch", False):
            root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._finch = True
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if debug else logging.WARNING)
