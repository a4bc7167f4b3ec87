"""Run-configuration files: YAML defaults for the command line."""

import logging
import os
from typing import Any, Dict, Iterable, Optional

import yaml

from utils.errors import ConfigError
from utils.file_management import write_atomic

logger = logging.getLogger(__name__)


class ConfigManager:
    """Load and save YAML run configurations."""

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize config manager.

        Parameters
        ----------
        config_path : Optional[str]
            Path to the run file; None means no file (empty configuration).
        """
        self.config_path = config_path

    def load_config(self) -> Dict[str, Any]:
        """
        Load configuration from file.

        Keys may use dashes or underscores; they are returned in snake_case.

        Returns
        -------
        Dict[str, Any]
            Loaded configuration dictionary

        Raises
        ------
        ConfigError
            If the file is missing, is not valid YAML or is not a mapping.
        """
        if self.config_path is None:
            return {}
        if not os.path.exists(self.config_path):
            raise ConfigError(f"Configuration file not found: {self.config_path}")

        try:
            with open(self.config_path, "r", encoding="utf-8") as f:
                config = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid YAML in {self.config_path}: {e}") from e

        if config is None:
            config = {}
        if not isinstance(config, dict):
            raise ConfigError(f"{self.config_path} must hold a mapping of option names")
        logger.debug("Configuration loaded from %s", self.config_path)
        return {str(key).replace("-", "_"): value for key, value in config.items()}

    def defaults_for(self, known_options: Iterable[str]) -> Dict[str, Any]:
        """
        Loaded options restricted to ``known_options``.

        Raises
        ------
        ConfigError
            On keys that are not command-line options.
        """
        config = self.load_config()
        known = set(known_options)
        unknown = sorted(set(config) - known)
        if unknown:
            raise ConfigError(f"Unknown option(s) in {self.config_path}: {', '.join(unknown)}")
        return config

    def save_config(self, config: Dict[str, Any], path: Optional[str] = None) -> str:
        """
        Save configuration to a YAML file.

        Parameters
        ----------
        config : Dict[str, Any]
            Configuration dictionary to save
        path : Optional[str]
            Destination; defaults to ``config_path``.

        Returns
        -------
        str
            Path written.
        """
        target = path or self.config_path
        if target is None:
            raise ConfigError("no path to save the configuration to")
        write_atomic(target, yaml.safe_dump(config, default_flow_style=False, sort_keys=True))
        logger.info("Configuration saved to %s", target)
        return target
