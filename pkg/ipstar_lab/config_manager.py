"""Configuration management with JSON persistence"""

import copy
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple

from .errors import InvalidConfigError
from .utils.process_utils import default_worker_count

RESERVED_KEYS = ('experiment', 'seed', 'output', 'format', 'guards')
FORMATS = ('json', 'csv')
MAX_SEED = 2 ** 64 - 1


def canonical_json(obj: Any) -> str:
    """Sorted keys, compact separators; the form every hash is taken over"""
    return json.dumps(obj, sort_keys=True, separators=(',', ':'), ensure_ascii=False)


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


class ConfigManager:
    """Persistent application settings (guards, directories, workers)"""

    DEFAULT_SETTINGS = {
        'guards': {
            'max_r': 8,
            'max_window': 64,
            'max_search_cost': 50_000_000,
            'max_fs_length': 25,
            'max_sieve_limit': 100_000_000,
            'enumeration_budget': 200_000,
        },
        'workers': 1,
        'cache_dir': None,
        'log_dir': None,
    }

    def __init__(self, config_path: Optional[Path] = None):
        if config_path is None:
            config_path = Path.home() / '.ipstar_lab' / 'settings.json'

        self.config_path = Path(config_path)
        self.settings = None
        self.load()

    def load(self) -> Dict[str, Any]:
        """Load settings from file or fall back to defaults"""
        if self.config_path.exists():
            try:
                with open(self.config_path, 'r', encoding='utf-8') as f:
                    self.settings = json.load(f)
                self._validate_settings()
                return self.settings
            except (OSError, ValueError) as e:
                print(f"Error loading settings: {e}. Using defaults.")
        self.settings = copy.deepcopy(self.DEFAULT_SETTINGS)
        return self.settings

    def save(self) -> bool:
        """Save settings to file"""
        try:
            self.config_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.config_path, 'w', encoding='utf-8') as f:
                json.dump(self.settings, f, indent=2)
            return True
        except OSError as e:
            print(f"Error saving settings: {e}")
            return False

    def _validate_settings(self):
        """Ensure settings have the required structure"""
        if not isinstance(self.settings, dict):
            raise ValueError("settings file must hold a JSON object")
        guards = self.settings.get('guards')
        if not isinstance(guards, dict):
            self.settings['guards'] = copy.deepcopy(self.DEFAULT_SETTINGS['guards'])
        else:
            # Merge with defaults to ensure all keys exist
            for key, value in self.DEFAULT_SETTINGS['guards'].items():
                guards.setdefault(key, value)
        for key, value in self.DEFAULT_SETTINGS.items():
            self.settings.setdefault(key, copy.deepcopy(value))

    def get_setting(self, key: str, default=None):
        return self.settings.get(key, default)

    def set_setting(self, key: str, value: Any) -> bool:
        self.settings[key] = value
        return self.save()

    def get_guards(self) -> Dict[str, int]:
        return dict(self.settings['guards'])

    def get_workers(self) -> int:
        """Worker processes; 0 means one per physical core"""
        workers = self.get_setting('workers')
        if workers == 0:
            return default_worker_count()
        return max(1, int(workers or 1))

    def get_log_dir(self) -> Path:
        """Get the log directory path"""
        custom = self.get_setting('log_dir')
        return Path(custom) if custom else self.config_path.parent / 'logs'

    def get_cache_dir(self) -> Path:
        """Get the sieve cache directory path"""
        custom = self.get_setting('cache_dir')
        return Path(custom) if custom else self.config_path.parent / 'cache'


# ----------------------------------------------------------------------
# Experiment parameters
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class Param:
    """A declared experiment parameter.

    ``kind`` is one of ``int``, ``int_list``, ``str`` or ``bool``. Integers
    (and list entries) must be positive unless ``signed`` is set.
    """

    name: str
    kind: str
    default: Any
    help: str = ''
    signed: bool = False
    choices: Optional[Tuple[str, ...]] = None

    def check(self, value: Any) -> Optional[str]:
        """Error message for an invalid value, None when valid"""
        if self.kind == 'int':
            return self._check_int(value)
        if self.kind == 'int_list':
            if not isinstance(value, list) or not value:
                return "expected a nonempty list of integers"
            for item in value:
                problem = self._check_int(item)
                if problem:
                    return f"list entry {item!r}: {problem}"
            return None
        if self.kind == 'bool':
            return None if isinstance(value, bool) else "expected true or false"
        if not isinstance(value, str):
            return "expected a string"
        if self.choices and value not in self.choices:
            return f"expected one of {', '.join(self.choices)}"
        return None

    def _check_int(self, value: Any) -> Optional[str]:
        if isinstance(value, bool) or not isinstance(value, int):
            return "expected an integer"
        if not self.signed and value < 1:
            return "must be positive"
        return None

    def parse_text(self, text: str) -> Any:
        """Value from command-line text (``3``, ``1,2,4``, ``true``)"""
        try:
            if self.kind == 'int':
                return int(text)
            if self.kind == 'int_list':
                return [int(part) for part in text.split(',') if part.strip()]
        except ValueError:
            return text
        if self.kind == 'bool':
            lowered = text.strip().lower()
            if lowered in ('true', '1', 'yes'):
                return True
            if lowered in ('false', '0', 'no'):
                return False
        return text


@dataclass
class ExperimentConfig:
    """One run: experiment name, declared parameters, seed, output and guards"""

    experiment: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    output: Optional[str] = None
    format: str = 'json'
    guards: Dict[str, int] = field(default_factory=dict)

    @classmethod
    def from_dict(
        cls,
        data: Dict[str, Any],
        params: Sequence[Param],
        guard_defaults: Optional[Dict[str, int]] = None,
    ) -> 'ExperimentConfig':
        """Validate a flat config document, collecting every field error"""
        if not isinstance(data, dict):
            raise InvalidConfigError({'<document>': "expected a JSON object"})
        if guard_defaults is None:
            guard_defaults = ConfigManager.DEFAULT_SETTINGS['guards']
        errors: Dict[str, str] = {}
        declared = {p.name: p for p in params}

        experiment = data.get('experiment')
        if not isinstance(experiment, str) or not experiment:
            errors['experiment'] = "required experiment name"

        seed = data.get('seed', 0)
        if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed <= MAX_SEED:
            errors['seed'] = "must be an integer in [0, 2^64)"

        output = data.get('output')
        if output is not None and not isinstance(output, str):
            errors['output'] = "must be a path string"

        fmt = data.get('format', 'json')
        if fmt not in FORMATS:
            errors['format'] = f"expected one of {', '.join(FORMATS)}"

        guards = dict(guard_defaults)
        supplied_guards = data.get('guards', {})
        if not isinstance(supplied_guards, dict):
            errors['guards'] = "must be an object"
            supplied_guards = {}
        for key, value in supplied_guards.items():
            if key not in guard_defaults:
                errors[f'guards.{key}'] = "unknown guard"
            elif isinstance(value, bool) or not isinstance(value, int) or value < 1:
                errors[f'guards.{key}'] = "must be a positive integer"
            else:
                guards[key] = value

        parameters: Dict[str, Any] = {}
        for key, value in data.items():
            if key in RESERVED_KEYS:
                continue
            param = declared.get(key)
            if param is None:
                errors[key] = "unknown key"
                continue
            problem = param.check(value)
            if problem:
                errors[key] = problem
            else:
                parameters[key] = value
        for param in params:
            parameters.setdefault(param.name, copy.deepcopy(param.default))

        if errors:
            raise InvalidConfigError(errors)
        return cls(experiment, parameters, seed, output, fmt, guards)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            'experiment': self.experiment,
            'seed': self.seed,
            'format': self.format,
            'guards': dict(self.guards),
        }
        if self.output is not None:
            data['output'] = self.output
        data.update(copy.deepcopy(self.parameters))
        return data

    def config_hash(self) -> str:
        return sha256_hex(canonical_json(self.to_dict()))


def load_config_file(path: Path) -> Dict[str, Any]:
    """Raw JSON document from disk; validation happens against the experiment's parameters"""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidConfigError({'<document>': f"not valid JSON: {e}"})
    if not isinstance(data, dict):
        raise InvalidConfigError({'<document>': "expected a JSON object"})
    return data


def apply_overrides(data: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """Apply ``KEY=VALUE`` overrides; ``guards.NAME=VALUE`` reaches into the guard block.

    Values parse as JSON when they can (``5``, ``[1,2]``, ``true``) and stay
    strings otherwise.
    """
    merged = copy.deepcopy(data)
    errors: Dict[str, str] = {}
    for item in overrides:
        key, sep, text = item.partition('=')
        key = key.strip()
        if not sep or not key:
            errors[item] = "expected KEY=VALUE"
            continue
        try:
            value = json.loads(text)
        except ValueError:
            value = text
        if key.startswith('guards.'):
            guards = merged.setdefault('guards', {})
            if isinstance(guards, dict):
                guards[key[len('guards.'):]] = value
        else:
            merged[key] = value
    if errors:
        raise InvalidConfigError(errors)
    return merged


def split_field_error(message: str) -> Dict[str, str]:
    """Turn a strategy's ``"field: problem"`` message into a field map"""
    key, sep, problem = message.partition(': ')
    return {key: problem} if sep else {'parameters': message}
