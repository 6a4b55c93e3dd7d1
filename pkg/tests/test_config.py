import pytest
from pydantic import ValidationError

from conf.config import CodecSettings


def test_defaults(monkeypatch):
    for name in ("DLK_LOG_LEVEL", "DLK_DEFAULT_QI", "DLK_LAMBDA_SCALE", "DLK_MIN_BLOCK_SIZE", "DLK_VERIFY_ROUNDTRIP"):
        monkeypatch.delenv(name, raising=False)
    settings = CodecSettings()
    assert settings.default_qi == 32
    assert settings.lambda_scale == pytest.approx(0.12)
    assert settings.verify_roundtrip is False


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("DLK_DEFAULT_QI", "20")
    monkeypatch.setenv("DLK_LOG_LEVEL", "debug")
    monkeypatch.setenv("DLK_VERIFY_ROUNDTRIP", "1")
    settings = CodecSettings()
    assert settings.default_qi == 20
    assert settings.log_level == "DEBUG"
    assert settings.verify_roundtrip is True


@pytest.mark.parametrize("name,value", [("DLK_DEFAULT_QI", "99"), ("DLK_MIN_BLOCK_SIZE", "6"),
                                        ("DLK_LOG_LEVEL", "loud")])
def test_invalid_environment(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ValidationError):
        CodecSettings()
