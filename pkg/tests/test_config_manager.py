"""Tests for settings persistence and experiment config validation"""

import json

import pytest

from ipstar_lab.config_manager import (
    ConfigManager,
    ExperimentConfig,
    Param,
    apply_overrides,
    load_config_file,
    split_field_error,
)
from ipstar_lab.errors import InvalidConfigError
from ipstar_lab.utils.process_utils import default_worker_count

PARAMS = (
    Param('k', 'int', 3),
    Param('offsets', 'int_list', [1, 2], signed=True),
    Param('set', 'str', 'naturals', choices=('naturals', 'primes')),
    Param('scan', 'bool', True),
)


def test_defaults_without_file(tmp_path):
    manager = ConfigManager(tmp_path / 'settings.json')
    assert manager.get_guards()['max_r'] == 8
    assert manager.get_workers() == 1
    assert manager.get_log_dir() == tmp_path / 'logs'
    assert manager.get_cache_dir() == tmp_path / 'cache'
    assert not (tmp_path / 'settings.json').exists()


def test_partial_settings_are_merged(tmp_path):
    path = tmp_path / 'settings.json'
    path.write_text(json.dumps({'guards': {'max_r': 5}, 'workers': 3}), encoding='utf-8')
    manager = ConfigManager(path)
    assert manager.get_guards()['max_r'] == 5
    assert manager.get_guards()['max_window'] == 64
    assert manager.get_workers() == 3


def test_invalid_settings_fall_back_to_defaults(tmp_path):
    path = tmp_path / 'settings.json'
    path.write_text("{not json", encoding='utf-8')
    assert ConfigManager(path).settings == ConfigManager.DEFAULT_SETTINGS


def test_set_setting_persists(tmp_path):
    path = tmp_path / 'nested' / 'settings.json'
    manager = ConfigManager(path)
    assert manager.set_setting('cache_dir', str(tmp_path / 'primes'))
    assert ConfigManager(path).get_cache_dir() == tmp_path / 'primes'


def test_param_checks():
    k, offsets, name, scan = PARAMS
    assert k.check(2) is None
    assert k.check(0) == "must be positive"
    assert k.check(True) == "expected an integer"
    assert offsets.check([-1, 4]) is None
    assert offsets.check([]) is not None
    assert name.check('primes') is None
    assert name.check('odds') is not None
    assert scan.check('yes') is not None


def test_param_parse_text():
    assert Param('k', 'int', 1).parse_text('7') == 7
    assert Param('b', 'int_list', [1]).parse_text('1,2,4') == [1, 2, 4]
    assert Param('f', 'bool', True).parse_text('no') is False
    assert Param('k', 'int', 1).parse_text('seven') == 'seven'


def test_from_dict_fills_defaults():
    config = ExperimentConfig.from_dict({'experiment': 'demo', 'k': 5}, PARAMS)
    assert config.parameters == {'k': 5, 'offsets': [1, 2], 'set': 'naturals', 'scan': True}
    assert config.seed == 0
    assert config.format == 'json'
    assert config.guards == ConfigManager.DEFAULT_SETTINGS['guards']


def test_from_dict_collects_every_error():
    data = {'experiment': 'demo', 'k': -1, 'bogus': 1, 'seed': -3, 'format': 'xml', 'guards': {'max_q': 2}}
    with pytest.raises(InvalidConfigError) as info:
        ExperimentConfig.from_dict(data, PARAMS)
    errors = info.value.field_errors
    assert set(errors) == {'k', 'bogus', 'seed', 'format', 'guards.max_q'}
    assert errors['bogus'] == "unknown key"
    assert info.value.exit_code == 2


def test_config_hash_tracks_content():
    base = ExperimentConfig.from_dict({'experiment': 'demo'}, PARAMS)
    same = ExperimentConfig.from_dict({'experiment': 'demo', 'k': 3}, PARAMS)
    seeded = ExperimentConfig.from_dict({'experiment': 'demo', 'seed': 1}, PARAMS)
    assert base.config_hash() == same.config_hash()
    assert base.config_hash() != seeded.config_hash()
    assert ExperimentConfig.from_dict(base.to_dict(), PARAMS) == base


def test_guard_overrides():
    config = ExperimentConfig.from_dict({'experiment': 'demo', 'guards': {'max_r': 3}}, PARAMS)
    assert config.guards['max_r'] == 3
    with pytest.raises(InvalidConfigError):
        ExperimentConfig.from_dict({'experiment': 'demo', 'guards': {'max_r': 0}}, PARAMS)


def test_apply_overrides():
    merged = apply_overrides({'experiment': 'demo'}, ['k=4', 'guards.max_r=6', 'set=primes', 'offsets=[1,3]'])
    assert merged == {'experiment': 'demo', 'k': 4, 'guards': {'max_r': 6}, 'set': 'primes', 'offsets': [1, 3]}
    with pytest.raises(InvalidConfigError):
        apply_overrides({}, ['novalue'])


def test_load_config_file(tmp_path):
    path = tmp_path / 'run.json'
    path.write_text('[1, 2]', encoding='utf-8')
    with pytest.raises(InvalidConfigError):
        load_config_file(path)
    path.write_text('{"experiment": "demo"}', encoding='utf-8')
    assert load_config_file(path) == {'experiment': 'demo'}


def test_split_field_error():
    assert split_field_error("k: must be at least 2") == {'k': "must be at least 2"}
    assert split_field_error("broken") == {'parameters': "broken"}


def test_zero_workers_means_physical_cores(tmp_path):
    path = tmp_path / 'settings.json'
    path.write_text(json.dumps({'workers': 0}), encoding='utf-8')
    assert ConfigManager(path).get_workers() == default_worker_count()


def test_directories_and_workers_read_through_get_setting(tmp_path):
    manager = ConfigManager(tmp_path / 'settings.json')
    assert manager.get_setting('missing', 'fallback') == 'fallback'
    manager.set_setting('log_dir', str(tmp_path / 'runs'))
    manager.set_setting('workers', 2)
    assert manager.get_setting('log_dir') == str(tmp_path / 'runs')
    assert manager.get_log_dir() == tmp_path / 'runs'
    assert manager.get_workers() == 2
