#!/usr/bin/env python3
"""Configuration loader for shadowqec run documents (YAML or JSON)."""

from pathlib import Path
from typing import Any, Optional

import yaml
from pydantic import ValidationError
from rich.console import Console

from .config import SweepConfig

console = Console(stderr=True)


class ConfigLoader:
    """Load, validate and save a SweepConfig."""

    def __init__(self, config_path: Path):
        """Initialize config loader.

        Args:
            config_path: Path to a YAML or JSON run document
        """
        self.config_path = Path(config_path)

    def _read(self) -> dict[str, Any]:
        if not self.config_path.exists():
            raise FileNotFoundError(f"Config file not found: {self.config_path}")
        with open(self.config_path, encoding="utf-8") as f:
            data = yaml.safe_load(f)
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ValueError(f"Config root must be a mapping, got {type(data).__name__}")
        return data

    def load(self, overrides: Optional[dict[str, Any]] = None) -> SweepConfig:
        """Load configuration from file.

        Args:
            overrides: Top-level fields replacing the document's (CLI flags)

        Returns:
            Validated SweepConfig

        Raises:
            FileNotFoundError: If the config file doesn't exist
            yaml.YAMLError: If the document is not parseable
            ValidationError: If a field is invalid
        """
        try:
            data = self._read()
            data.update({k: v for k, v in (overrides or {}).items() if v is not None})
            return SweepConfig.model_validate(data)

        except yaml.YAMLError as e:
            console.print(f"[red]❌ Invalid YAML in {self.config_path}:[/red]")
            console.print(f"   {e}")
            raise
        except ValidationError as e:
            console.print(f"[red]❌ Invalid config in {self.config_path}:[/red]")
            for message in format_errors(e):
                console.print(f"   {message}")
            raise

    def create_default(self) -> SweepConfig:
        """Write the default config to config_path."""
        self.config_path.parent.mkdir(parents=True, exist_ok=True)
        config = SweepConfig()
        self.save(config)
        console.print(f"✅ Created default config: {self.config_path}")
        return config

    def save(self, config: SweepConfig) -> None:
        data = config.model_dump(mode='json')
        with open(self.config_path, 'w', encoding="utf-8") as f:
            f.write("# shadowqec run configuration\n\n")
            yaml.dump(data, f, default_flow_style=False, sort_keys=False)

    def validate(self) -> tuple[bool, list[str]]:
        """Validate config file.

        Returns:
            Tuple of (is_valid, errors)
        """
        errors = []

        if not self.config_path.exists():
            errors.append(f"Config file not found: {self.config_path}")
            return False, errors

        try:
            SweepConfig.model_validate(self._read())
            return True, []
        except yaml.YAMLError as e:
            errors.append(f"Invalid YAML: {e}")
            return False, errors
        except ValueError as e:
            if isinstance(e, ValidationError):
                return False, format_errors(e)
            errors.append(str(e))
            return False, errors


def format_errors(error: ValidationError) -> list[str]:
    """Field-level messages as 'section -> field: msg'."""
    messages = []
    for item in error.errors():
        loc = " -> ".join(str(x) for x in item['loc']) or "config"
        messages.append(f"{loc}: {item['msg']}")
    return messages
