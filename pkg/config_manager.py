from dataclasses import dataclass, field
from typing import List, Optional
import sys
from pathlib import Path

# Handle TOML import based on Python version
if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXECUTORS = ("process", "thread")
FORMATS = ("text", "json")


@dataclass
class VerificationConfig:
    """Default orders and execution settings for verification runs"""
    order: int = 40
    n_max: int = 10
    format: str = "text"
    row_cap: int = 0
    heavy_order: int = 25
    workers: int = 0
    executor: str = "process"

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"order must be at least 1, got {self.order}")
        if self.n_max < 0:
            raise ValueError(f"n_max must be nonnegative, got {self.n_max}")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.executor not in EXECUTORS:
            raise ValueError(f"executor must be one of {EXECUTORS}, got {self.executor!r}")

    @classmethod
    def from_dict(cls, data: dict) -> 'VerificationConfig':
        """Create VerificationConfig from dictionary

        Args:
            data: Dictionary containing the [verification] table

        Returns:
            VerificationConfig: Initialized configuration object

        Raises:
            ValueError: If a value is out of range
        """
        return cls(
            order=data.get('order', 40),
            n_max=data.get('n_max', 10),
            format=data.get('format', 'text'),
            row_cap=data.get('row_cap', 0),
            heavy_order=data.get('heavy_order', 25),
            workers=data.get('workers', 0),
            executor=data.get('executor', 'process'),
        )


@dataclass
class NtfyConfig:
    """Configuration for ntfy notifications"""
    enabled: bool = False
    server: str = "https://ntfy.sh"
    topic: str = ""
    username: Optional[str] = None
    password: Optional[str] = None
    priority: str = "default"
    tags: List[str] = field(default_factory=list)

    @classmethod
    def from_dict(cls, data: dict) -> 'NtfyConfig':
        """Create NtfyConfig from dictionary"""
        return cls(
            enabled=data.get('enabled', False),
            server=data.get('server', 'https://ntfy.sh'),
            topic=data.get('topic', ''),
            username=data.get('username'),
            password=data.get('password'),
            priority=data.get('priority', 'default'),
            tags=data.get('tags', [])
        )


@dataclass
class DataRecordingConfig:
    """Configuration for storing verification runs"""
    enabled: bool = False
    path: str = "data/verification_runs.db"

    @classmethod
    def from_dict(cls, data: dict) -> 'DataRecordingConfig':
        """Create DataRecordingConfig from dictionary"""
        return cls(
            enabled=data.get('enabled', False),
            path=data.get('path', 'data/verification_runs.db')
        )


@dataclass
class LoggingConfig:
    """Where log files go and how loud the console is"""
    directory: str = "logs"
    console_level: str = "WARNING"

    @classmethod
    def from_dict(cls, data: dict) -> 'LoggingConfig':
        return cls(
            directory=data.get('directory', 'logs'),
            console_level=data.get('console_level', 'WARNING').upper(),
        )


class ConfigManager:
    """Manages application configuration using TOML format"""

    def __init__(self, config_path: Optional[str] = "config/config.toml"):
        """Initialize configuration manager

        Args:
            config_path: Path to TOML configuration file, or None for built-in defaults

        Raises:
            FileNotFoundError: If configuration file doesn't exist
        """
        self.config_path = Path(config_path) if config_path is not None else None
        self.verification_config: Optional[VerificationConfig] = None
        self.ntfy_config: Optional[NtfyConfig] = None
        self.data_recording_config: Optional[DataRecordingConfig] = None
        self.logging_config: Optional[LoggingConfig] = None
        self._raw_config: dict = {}
        self._load_config()

    def _load_config(self) -> None:
        """Load configuration from TOML file

        Raises:
            FileNotFoundError: If configuration file doesn't exist
            tomllib.TOMLDecodeError: If TOML file is invalid
        """
        if self.config_path is not None:
            if not self.config_path.exists():
                raise FileNotFoundError(f"Configuration file not found: {self.config_path}")

            with open(self.config_path, "rb") as f:
                self._raw_config = tomllib.load(f)

        self.verification_config = VerificationConfig.from_dict(self._raw_config.get('verification', {}))
        self.ntfy_config = NtfyConfig.from_dict(self._raw_config.get('ntfy', {}))
        self.data_recording_config = DataRecordingConfig.from_dict(self._raw_config.get('data_recording', {}))
        self.logging_config = LoggingConfig.from_dict(self._raw_config.get('logging', {}))

    def _save(self) -> None:
        if self.config_path is None:
            raise FileNotFoundError("No configuration file to save to; pass --config PATH")
        import tomli_w
        self.config_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.config_path, "wb") as f:
            tomli_w.dump(self._raw_config, f)

    def update_verification_config(self, **kwargs) -> None:
        """Update verification defaults with provided values

        Args:
            **kwargs: Key-value pairs to update in the [verification] table

        Raises:
            ValueError: If a key is unknown or a value out of range

        Example:
            update_verification_config(order=30, format="json")
        """
        for key in kwargs:
            if not hasattr(self.verification_config, key):
                raise ValueError(f"Unknown verification setting: {key}")
        merged = {**self._raw_config.get('verification', {}), **kwargs}
        self.verification_config = VerificationConfig.from_dict(merged)
        self._raw_config['verification'] = merged
        self._save()

    def update_data_recording_config(self, enabled: bool) -> None:
        """Update verification run recording

        Args:
            enabled: Whether runs should be stored in the database
        """
        self.data_recording_config.enabled = enabled

        if 'data_recording' not in self._raw_config:
            self._raw_config['data_recording'] = {}
        self._raw_config['data_recording']['enabled'] = enabled
        self._save()
