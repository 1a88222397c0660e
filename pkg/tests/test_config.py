import pytest
from pathlib import Path
import sys
from config_manager import ConfigManager, DataRecordingConfig, NtfyConfig, VerificationConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


def test_config_loading(tmp_path: Path):
    """Test loading configuration from TOML file"""
    config_content = """
    [verification]
    order = 30
    format = "json"

    [ntfy]
    enabled = true
    server = "https://test.ntfy.sh"
    topic = "test-topic"
    tags = ["test", "abacus"]
    """

    config_file = tmp_path / "test_config.toml"
    config_file.write_text(config_content)

    config_manager = ConfigManager(str(config_file))
    assert isinstance(config_manager.ntfy_config, NtfyConfig)
    assert config_manager.ntfy_config.enabled is True
    assert config_manager.ntfy_config.server == "https://test.ntfy.sh"
    assert config_manager.ntfy_config.topic == "test-topic"
    assert config_manager.ntfy_config.tags == ["test", "abacus"]

    verification = config_manager.verification_config
    assert verification.order == 30
    assert verification.format == "json"
    assert verification.n_max == 10
    assert verification.executor == "process"


def test_missing_config():
    """Test handling of missing configuration file"""
    with pytest.raises(FileNotFoundError):
        ConfigManager("nonexistent.toml")


def test_builtin_defaults():
    config_manager = ConfigManager(None)
    assert config_manager.verification_config == VerificationConfig()
    assert config_manager.data_recording_config == DataRecordingConfig()
    assert config_manager.logging_config.console_level == "WARNING"
    with pytest.raises(FileNotFoundError):
        config_manager.update_verification_config(order=10)


@pytest.mark.parametrize("table", [
    {"order": 0},
    {"n_max": -1},
    {"format": "xml"},
    {"executor": "gpu"},
])
def test_invalid_verification_values(table):
    with pytest.raises(ValueError):
        VerificationConfig.from_dict(table)


def test_update_verification_config_persists(tmp_path: Path):
    config_file = tmp_path / "config.toml"
    config_file.write_text("[verification]\norder = 40\n")

    config_manager = ConfigManager(str(config_file))
    config_manager.update_verification_config(order=25, format="json")

    assert config_manager.verification_config.order == 25
    with open(config_file, "rb") as f:
        stored = tomllib.load(f)
    assert stored["verification"] == {"order": 25, "format": "json"}

    with pytest.raises(ValueError):
        config_manager.update_verification_config(colour="blue")


def test_update_data_recording_config(tmp_path: Path):
    config_file = tmp_path / "config.toml"
    config_file.write_text("")

    config_manager = ConfigManager(str(config_file))
    config_manager.update_data_recording_config(True)

    assert ConfigManager(str(config_file)).data_recording_config.enabled is True
