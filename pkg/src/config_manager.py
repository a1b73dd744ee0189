"""
Configuration Manager for latclass
Handles JSON configuration loading, validation, and preset management
"""

import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

logger = logging.getLogger(__name__)

PACKAGE_CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"
BOUND_VARIABLE = "LATCLASS_BOUND"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class ConfigManager:
    """
    Configuration management for latclass.

    Loads config/default.json, discovers presets under config/presets and
    merges them on request. Every search bound the library uses comes from
    here unless a caller passes one explicitly.
    """

    def __init__(self, config_dir: Optional[str] = None):
        self.config_dir = Path(config_dir) if config_dir else PACKAGE_CONFIG_DIR
        self.presets_dir = self.config_dir / "presets"
        self.current_config: Dict[str, Any] = {}
        self.available_presets: Dict[str, Dict[str, Any]] = {}

        self._load_default_config()
        self._load_available_presets()

    def _load_default_config(self):
        default_config_path = self.config_dir / "default.json"

        if default_config_path.exists():
            try:
                with open(default_config_path, "r") as f:
                    self.current_config = json.load(f)
                logger.debug("loaded default configuration from %s", default_config_path)
            except (OSError, json.JSONDecodeError) as e:
                logger.warning("error loading default config: %s", e)
                self.current_config = self._get_fallback_config()
        else:
            logger.warning("default config not found, using fallback configuration")
            self.current_config = self._get_fallback_config()

    def _load_available_presets(self):
        if not self.presets_dir.exists():
            logger.debug("presets directory %s not found", self.presets_dir)
            return

        for preset_file in sorted(self.presets_dir.glob("*.json")):
            try:
                with open(preset_file, "r") as f:
                    self.available_presets[preset_file.stem] = json.load(f)
                logger.debug("found preset: %s", preset_file.stem)
            except (OSError, json.JSONDecodeError) as e:
                logger.warning("error loading preset %s: %s", preset_file, e)

    def _get_fallback_config(self) -> Dict[str, Any]:
        return {
            "version": "1.0",
            "enumeration": {
                "group_order_bound": 4096,
                "subgroup_order_bound": 4096,
            },
            "search": {
                "bound": None,
                "doubling_check": True,
                "wall_index_bound": None,
                "containment_box": 12,
            },
            "precision": {
                "gauss_digits": 50,
                "gauss_tolerance": "1e-20",
            },
            "output": {
                "format": "json",
                "seed": 0,
                "preset": "default",
            },
            "logging": {
                "level": "WARNING",
            },
        }

    def load_preset(self, preset_name: str) -> bool:
        """
        Load a preset.

        Args:
            preset_name: Name of the preset to load

        Returns:
            True if preset was loaded successfully, False otherwise
        """
        if preset_name not in self.available_presets:
            logger.warning("preset %r not found", preset_name)
            return False

        preset_config = dict(self.available_presets[preset_name])
        preset_config.pop("name", None)
        preset_config.pop("description", None)

        self.current_config = self._merge_configs(self.current_config, preset_config)
        self.current_config.setdefault("output", {})["preset"] = preset_name
        logger.info("loaded preset: %s", preset_name)
        return True

    def _merge_configs(self, base_config: Dict, override_config: Dict) -> Dict:
        """Recursively merge configuration dictionaries."""
        result = base_config.copy()

        for key, value in override_config.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._merge_configs(result[key], value)
            else:
                result[key] = value

        return result

    def get_config(self, section: Optional[str] = None) -> Dict[str, Any]:
        """
        Get configuration values.

        Args:
            section: Specific section to retrieve, or None for entire config

        Returns:
            Configuration dictionary or section
        """
        if section is None:
            return self.current_config.copy()

        return self.current_config.get(section, {})

    def set_config(self, section: str, key: str, value: Any) -> bool:
        self.current_config.setdefault(section, {})[key] = value
        return True

    def get_enumeration_config(self) -> Dict[str, Any]:
        return self.get_config("enumeration")

    def get_search_config(self) -> Dict[str, Any]:
        return self.get_config("search")

    def get_precision_config(self) -> Dict[str, Any]:
        return self.get_config("precision")

    def get_output_config(self) -> Dict[str, Any]:
        return self.get_config("output")

    def get_logging_config(self) -> Dict[str, Any]:
        return self.get_config("logging")

    def list_presets(self) -> List[Dict[str, str]]:
        presets = []
        for name, config in self.available_presets.items():
            presets.append({
                "name": name,
                "display_name": config.get("name", name),
                "description": config.get("description", "No description available"),
            })
        return presets

    def get_current_preset(self) -> str:
        return self.get_output_config().get("preset", "custom")

    def apply_environment(self, environ: Mapping[str, str]) -> bool:
        """
        Override search.bound from LATCLASS_BOUND.

        Returns:
            True if the variable was present and applied
        """
        raw = environ.get(BOUND_VARIABLE)
        if raw is None:
            return False
        try:
            bound = int(raw)
        except ValueError:
            bound = 0
        if bound <= 0:
            logger.warning("ignoring %s=%r: expected a positive integer", BOUND_VARIABLE, raw)
            return False
        self.set_config("search", "bound", bound)
        logger.debug("search bound set to %d from %s", bound, BOUND_VARIABLE)
        return True

    def validate_config(self) -> List[str]:
        """
        Validate current configuration.

        Returns:
            List of validation errors (empty if valid)
        """
        errors = []

        enumeration = self.get_enumeration_config()
        for key in ("group_order_bound", "subgroup_order_bound"):
            value = enumeration.get(key, 4096)
            if not isinstance(value, int) or not (16 <= value <= 1 << 20):
                errors.append(f"Invalid {key}: {value} (must be 16-1048576)")

        search = self.get_search_config()
        bound = search.get("bound")
        if bound is not None and (not isinstance(bound, int) or bound < 1):
            errors.append(f"Invalid search bound: {bound} (must be a positive integer or null)")
        index_bound = search.get("wall_index_bound")
        if index_bound is not None and (not isinstance(index_bound, int) or index_bound < 1):
            errors.append(f"Invalid wall index bound: {index_bound} (must be a positive integer or null)")
        box = search.get("containment_box", 12)
        if not isinstance(box, int) or not (1 <= box <= 200):
            errors.append(f"Invalid containment box: {box} (must be 1-200)")

        precision = self.get_precision_config()
        digits = precision.get("gauss_digits", 50)
        if not isinstance(digits, int) or not (30 <= digits <= 500):
            errors.append(f"Invalid Gauss sum precision: {digits} (must be 30-500 digits)")
        try:
            tolerance = float(precision.get("gauss_tolerance", "1e-20"))
            if not (0 < tolerance < 1e-6):
                errors.append(f"Invalid Gauss sum tolerance: {tolerance} (must be in (0, 1e-6))")
        except (TypeError, ValueError):
            errors.append(f"Invalid Gauss sum tolerance: {precision.get('gauss_tolerance')!r}")

        output = self.get_output_config()
        if output.get("format", "json") not in ("json", "tsv"):
            errors.append(f"Invalid output format: {output.get('format')} (must be json or tsv)")

        level = self.get_logging_config().get("level", "WARNING")
        if str(level).upper() not in LOG_LEVELS:
            errors.append(f"Invalid log level: {level}")

        return errors

    def save_config(self, filename: str) -> bool:
        """
        Save current configuration to file.

        Args:
            filename: Name of file to save to, relative to the config directory

        Returns:
            True if saved successfully
        """
        config_path = self.config_dir / filename
        try:
            with open(config_path, "w") as f:
                json.dump(self.current_config, f, indent=2)
        except OSError as e:
            logger.error("error saving configuration: %s", e)
            return False
        logger.info("configuration saved to %s", config_path)
        return True

    def load_config_file(self, filename: str) -> bool:
        """
        Load configuration from file, keeping the previous one if it does not validate.

        Args:
            filename: Path of the file, absolute or relative to the config directory

        Returns:
            True if loaded successfully
        """
        config_path = Path(filename)
        if not config_path.is_absolute() and not config_path.exists():
            config_path = self.config_dir / filename
        try:
            with open(config_path, "r") as f:
                loaded_config = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logger.error("error loading configuration: %s", e)
            return False

        temp_config = self.current_config
        self.current_config = self._merge_configs(self._get_fallback_config(), loaded_config)
        errors = self.validate_config()

        if errors:
            logger.error("configuration validation failed: %s", errors)
            self.current_config = temp_config
            return False

        logger.info("configuration loaded from %s", config_path)
        return True

    def reset_to_defaults(self):
        self._load_default_config()
        logger.info("configuration reset to defaults")

    def print_current_config(self, stream=None):
        """Print current configuration in a readable format."""
        out = stream or sys.stderr
        print("\n=== Current Configuration ===", file=out)
        print(f"Current Preset: {self.get_current_preset()}", file=out)

        enumeration = self.get_enumeration_config()
        print(f"\nEnumeration: groups up to {enumeration.get('group_order_bound')}, "
              f"subgroups up to {enumeration.get('subgroup_order_bound')}", file=out)

        search = self.get_search_config()
        bound = search.get("bound")
        print(f"Search: bound {'automatic' if bound is None else bound}, "
              f"doubling check {'on' if search.get('doubling_check') else 'off'}, "
              f"containment box {search.get('containment_box')}", file=out)

        precision = self.get_precision_config()
        print(f"Gauss sums: {precision.get('gauss_digits')} digits, "
              f"tolerance {precision.get('gauss_tolerance')}", file=out)

        output = self.get_output_config()
        print(f"Output: {output.get('format')}, seed {output.get('seed')}", file=out)

        errors = self.validate_config()
        if errors:
            print(f"\nValidation Errors: {errors}", file=out)
        else:
            print("\nConfiguration is valid ✓", file=out)
