from pathlib import Path
from typing import Any, Dict

import yaml


def load_config(config_type: str = "variables") -> Dict[str, Any]:
    """Load configuration from YAML file."""
    config_path = Path(__file__).parent / "config" / f"{config_type}.yaml"
    if not config_path.exists():
        return {}
    with open(config_path) as f:
        return yaml.safe_load(f) or {}


def get_setting(section: str, key: str, fallback: Any = None) -> Any:
    """Get a single default from variables.yaml, or `fallback` when unset."""
    value = load_config("variables").get(section, {}).get(key)
    return fallback if value is None else value
