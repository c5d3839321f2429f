"""Configuration loader for solver, auto-policy and generator settings."""
import configparser
import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import yaml

from utils.custom_exceptions import ConfigurationError
from utils.logger import get_logger


def _optional_int(value: Any) -> Optional[int]:
    if value is None:
        return None
    if isinstance(value, int):
        return value
    text = str(value).strip()
    return int(text) if text else None


def _int_or_blank(minimum: int):
    def rule(value: str) -> bool:
        text = str(value).strip()
        return not text or int(text) >= minimum
    return rule


@dataclass
class SolverConfig:
    """Settings of the tree-length dynamic program and the lemma checker."""
    table_ceiling: int = 2_000_000
    budget_k: Optional[int] = None
    radius_override: Optional[int] = None
    lemma_sample_limit: int = 200_000
    lemma_sample_seed: int = 7

    def __post_init__(self):
        if self.table_ceiling < 1:
            raise ConfigurationError(f"table_ceiling must be positive: {self.table_ceiling}",
                                     config_key="SOLVER.table_ceiling")
        if self.budget_k is not None and self.budget_k < 1:
            raise ConfigurationError(f"budget_k must be at least 1: {self.budget_k}",
                                     config_key="SOLVER.budget_k")
        if self.radius_override is not None and self.radius_override < 1:
            raise ConfigurationError(f"radius_override must be at least 1: {self.radius_override}",
                                     config_key="SOLVER.radius_override")
        if self.lemma_sample_limit < 1:
            raise ConfigurationError("lemma_sample_limit must be positive",
                                     config_key="SOLVER.lemma_sample_limit")


@dataclass
class AutoPolicyConfig:
    """Thresholds used by ``solve --algo auto``."""
    mw_width_cap: int = 12
    brute_max_n: int = 20
    brute_max_k: int = 5

    def __post_init__(self):
        for key in ('mw_width_cap', 'brute_max_n', 'brute_max_k'):
            if getattr(self, key) < 0:
                raise ConfigurationError(f"{key} cannot be negative", config_key=f"AUTO_POLICY.{key}")


@dataclass
class GeneratorConfig:
    default_seed: int = 20240917
    max_degree: int = 3
    connect_attempts: int = 50

    def __post_init__(self):
        if self.max_degree < 2:
            raise ConfigurationError(f"max_degree must be at least 2: {self.max_degree}",
                                     config_key="GENERATORS.max_degree")
        if self.connect_attempts < 1:
            raise ConfigurationError("connect_attempts must be positive",
                                     config_key="GENERATORS.connect_attempts")


class ConfigLoader:
    """Cached loader for INI, JSON and YAML files in the config directory."""

    VALIDATION_RULES = {
        'table_ceiling': lambda x: int(x) > 0,
        'budget_k': _int_or_blank(1),
        'radius_override': _int_or_blank(1),
        'lemma_sample_limit': lambda x: int(x) > 0,
        'mw_width_cap': lambda x: int(x) >= 0,
        'brute_max_n': lambda x: int(x) >= 0,
        'brute_max_k': lambda x: int(x) >= 0,
        'max_degree': lambda x: int(x) >= 2,
        'connect_attempts': lambda x: int(x) > 0,
        'log_level': lambda x: x.upper() in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'),
    }

    def __init__(self, config_dir: Optional[str] = None, cache_timeout: int = 300):
        """
        Args:
            config_dir: Directory holding config.ini; MDSOLVE_CONFIG_DIR or the
                repository's config/ directory when omitted
            cache_timeout: Cache timeout in seconds
        """
        default_dir = os.getenv('MDSOLVE_CONFIG_DIR') or Path(__file__).resolve().parent.parent / 'config'
        self.config_dir = Path(config_dir or default_dir)
        self.cache_timeout = cache_timeout
        self._config_cache: Dict[str, Tuple[Any, datetime, float]] = {}
        self._cache_lock = threading.RLock()
        self.logger = get_logger("config_loader")

    def _validate_value(self, key: str, value: str, context: str = "") -> str:
        rule = self.VALIDATION_RULES.get(key.lower())
        if rule is None:
            return value
        try:
            ok = rule(value)
        except (ValueError, TypeError) as e:
            raise ConfigurationError(f"Invalid value for {context}: {key}={value} ({e})",
                                     config_key=context)
        if not ok:
            raise ConfigurationError(f"Validation failed for {context}: {key}={value}",
                                     config_key=context)
        return value

    def load_config_file(self, filename: str, force_reload: bool = False) -> Dict[str, Any]:
        """Load a .ini, .json or .yaml file, reusing the cache while the file is unchanged."""
        file_path = self.config_dir / filename
        if not file_path.exists():
            raise ConfigurationError(f"Configuration file not found: {file_path}",
                                     config_file=str(file_path))
        mtime = file_path.stat().st_mtime

        with self._cache_lock:
            cached = self._config_cache.get(filename)
            if cached and not force_reload:
                data, loaded_at, cached_mtime = cached
                if cached_mtime == mtime and datetime.now() - loaded_at < timedelta(seconds=self.cache_timeout):
                    return data

            suffix = file_path.suffix.lower()
            if suffix == '.ini':
                data = self._load_ini_config(file_path)
            elif suffix == '.json':
                with open(file_path, 'r', encoding='utf-8') as f:
                    data = json.load(f)
            elif suffix in ('.yaml', '.yml'):
                with open(file_path, 'r', encoding='utf-8') as f:
                    data = yaml.safe_load(f) or {}
            else:
                raise ConfigurationError(f"Unsupported configuration format: {suffix}",
                                         config_file=str(file_path))

            self._config_cache[filename] = (data, datetime.now(), mtime)
            self.logger.debug(f"Loaded configuration from {file_path}")
            return data

    def _load_ini_config(self, file_path: Path) -> Dict[str, Any]:
        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read(file_path, encoding='utf-8')
        except configparser.Error as e:
            raise ConfigurationError(f"Malformed configuration file: {e}", config_file=str(file_path))

        result: Dict[str, Any] = {'DEFAULT': dict(parser.defaults())}
        for section in parser.sections():
            result[section] = {}
            for key, value in parser.items(section):
                # [DEFAULT] keys are inherited by every section
                if key in parser.defaults():
                    continue
                result[section][key] = self._validate_value(key, value, f"{section}.{key}")
        return result

    def load_specific_section(self, filename: str, section_name: str) -> Dict[str, Any]:
        config = self.load_config_file(filename)
        if section_name not in config:
            raise ConfigurationError(
                f"Section '{section_name}' not found in {filename}. "
                f"Available sections: {sorted(config)}",
                config_key=section_name
            )
        return config[section_name]

    def get_custom_config(self, section: str, key: Optional[str] = None, default: Any = None) -> Any:
        """
        Get a section of config.ini, or one key of it.

        Returns the default when the section or key is absent and a default is
        given; raises ConfigurationError otherwise.
        """
        config = self.load_config_file("config.ini")
        if section not in config:
            if default is not None:
                return default
            raise ConfigurationError(
                f"Section '{section}' not found in config. Available sections: {sorted(config)}",
                config_key=section
            )
        if key is None:
            return config[section]
        if key not in config[section]:
            if default is not None:
                return default
            raise ConfigurationError(f"Key '{key}' not found in section '{section}'",
                                     config_key=f"{section}.{key}")
        return config[section][key]

    def _section_or_empty(self, section: str) -> Dict[str, Any]:
        try:
            return self.get_custom_config(section, default={})
        except ConfigurationError as e:
            self.logger.warning(f"Using built-in defaults for [{section}]: {e.message}")
            return {}

    def get_solver_config(self, **overrides) -> SolverConfig:
        raw = self._section_or_empty('SOLVER')
        values = {
            'table_ceiling': int(raw.get('table_ceiling', SolverConfig.table_ceiling)),
            'budget_k': _optional_int(raw.get('budget_k')),
            'radius_override': _optional_int(raw.get('radius_override')),
            'lemma_sample_limit': int(raw.get('lemma_sample_limit', SolverConfig.lemma_sample_limit)),
            'lemma_sample_seed': int(raw.get('lemma_sample_seed', SolverConfig.lemma_sample_seed)),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return SolverConfig(**values)

    def get_auto_policy(self, **overrides) -> AutoPolicyConfig:
        raw = self._section_or_empty('AUTO_POLICY')
        values = {
            'mw_width_cap': int(raw.get('mw_width_cap', AutoPolicyConfig.mw_width_cap)),
            'brute_max_n': int(raw.get('brute_max_n', AutoPolicyConfig.brute_max_n)),
            'brute_max_k': int(raw.get('brute_max_k', AutoPolicyConfig.brute_max_k)),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return AutoPolicyConfig(**values)

    def get_generator_config(self) -> GeneratorConfig:
        raw = self._section_or_empty('GENERATORS')
        return GeneratorConfig(
            default_seed=int(raw.get('default_seed', GeneratorConfig.default_seed)),
            max_degree=int(raw.get('max_degree', GeneratorConfig.max_degree)),
            connect_attempts=int(raw.get('connect_attempts', GeneratorConfig.connect_attempts)),
        )

    def get_corpus_profile(self, profile: Optional[str] = None) -> Dict[str, Any]:
        """Corpus sizes for the randomized suites; CORPUS_PROFILE picks quick or full."""
        name = profile or os.getenv('CORPUS_PROFILE', 'quick')
        corpus = self.load_config_file('corpus.yaml')
        if name not in corpus:
            raise ConfigurationError(f"Unknown corpus profile: {name}",
                                     config_key=name, config_file='corpus.yaml')
        return corpus[name]

    def reload_config(self) -> None:
        with self._cache_lock:
            self._config_cache.clear()
        self.logger.info("Configuration cache cleared")


config_loader = ConfigLoader()
