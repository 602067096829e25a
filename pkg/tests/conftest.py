from pathlib import Path

import pytest
from hypothesis import settings

from ipstar_lab.config_manager import ConfigManager

settings.register_profile('default', deadline=None, max_examples=settings.default.max_examples)
settings.load_profile('default')


@pytest.fixture
def settings_manager(tmp_path: Path) -> ConfigManager:
    """Settings rooted in a temporary directory so logs and caches stay out of $HOME"""
    return ConfigManager(tmp_path / 'settings.json')
