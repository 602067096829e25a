"""Experiment orchestration and deterministic report emission"""

import csv
import io
import json
import os
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from . import __version__
from .config_manager import ConfigManager, ExperimentConfig, canonical_json, sha256_hex, split_field_error
from .constructions import to_jsonable
from .density import CENTRAL_CAVEAT
from .errors import InvalidConfigError, RecheckFailedError
from .experiment_definitions import ExperimentContext, ExperimentFactory
from .utils.logger import Logger

SCHEMA = "ipstar-lab/1"
PRNG_NAME = "numpy-pcg64/1"
WINDOW_CAVEAT = "certified-on-window verdicts say nothing beyond the searched window"


def render_cell(value: Any) -> str:
    """One text form per cell, shared by JSON comparison and CSV output"""
    if isinstance(value, str):
        return value
    return canonical_json(value)


@dataclass
class Report:
    experiment: str
    config: ExperimentConfig
    rows: List[Dict[str, Any]]
    certificates: List[Dict[str, Any]]
    summary: Dict[str, Any]
    caveats: List[str] = field(default_factory=list)
    wall_time_s: float = 0.0

    def region(self) -> Dict[str, Any]:
        """Everything covered by ``region_sha256`` (all but timing)"""
        return {
            'schema': SCHEMA,
            'meta': {
                'experiment': self.experiment,
                'config_hash': self.config.config_hash(),
                'version': __version__,
                'prng': PRNG_NAME,
            },
            'config': self.config.to_dict(),
            'guards': dict(self.config.guards),
            'rows': self.rows,
            'certificates': self.certificates,
            'summary': self.summary,
            'caveats': list(self.caveats),
        }

    def region_sha256(self) -> str:
        return sha256_hex(canonical_json(self.region()))

    def to_dict(self) -> Dict[str, Any]:
        document = self.region()
        document['region_sha256'] = self.region_sha256()
        document['timing'] = {'wall_time_s': round(self.wall_time_s, 6)}
        return document

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def csv_header(self) -> List[str]:
        header: List[str] = []
        for row in self.rows:
            for key in row:
                if key not in header:
                    header.append(key)
        return header

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=self.csv_header(), lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({key: render_cell(value) for key, value in row.items()})
        return buffer.getvalue()

    def render(self, fmt: str) -> str:
        return self.to_csv() if fmt == 'csv' else self.to_json()


def write_atomic(path: Path, text: str) -> None:
    """Temp file in the target directory, then rename over the destination"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def build_config(data: Dict[str, Any], settings: Optional[ConfigManager] = None) -> ExperimentConfig:
    """Validate a raw document against the named experiment's parameters"""
    name = data.get('experiment') if isinstance(data, dict) else None
    if not isinstance(name, str) or not name:
        raise InvalidConfigError({'experiment': "required experiment name"})
    strategy = ExperimentFactory.create(name)
    guard_defaults = settings.get_guards() if settings is not None else None
    config = ExperimentConfig.from_dict(data, strategy.parameters, guard_defaults)
    is_valid, error = strategy.validate_config(config.parameters)
    if not is_valid:
        raise InvalidConfigError(split_field_error(error))
    return config


class ExperimentManager:
    """Runs one experiment and assembles its report"""

    def __init__(self, settings: Optional[ConfigManager] = None, logger: Optional[Logger] = None,
                 workers: Optional[int] = None):
        self.settings = settings
        self.logger = logger or Logger()
        if workers is None:
            workers = settings.get_workers() if settings is not None else 1
        self.workers = workers

    def run(self, config: ExperimentConfig, write: bool = True) -> Report:
        strategy = ExperimentFactory.create(config.experiment)
        is_valid, error = strategy.validate_config(config.parameters)
        if not is_valid:
            raise InvalidConfigError(split_field_error(error))

        ctx = ExperimentContext(
            guards=dict(config.guards),
            rng=np.random.Generator(np.random.PCG64(config.seed)),
            logger=self.logger,
            cache_dir=self.settings.get_cache_dir() if self.settings is not None else None,
            workers=self.workers,
        )
        self.logger.info(f"Running {strategy.name} (config {config.config_hash()[:12]})")
        self.logger.debug(f"Guards: {canonical_json(config.guards)}")
        started = time.perf_counter()
        result = strategy.run(config.parameters, ctx)

        certificates = [c.to_json() for c in result.certificates]
        failed = [c for c in certificates if not c['recheck']]
        if failed:
            raise RecheckFailedError(
                f"{len(failed)} certificate(s) failed re-verification, first: {failed[0]['op']} {failed[0]['witness']}"
            )
        self.logger.info(f"{len(certificates)} certificate(s) re-verified")

        report = Report(
            experiment=strategy.name,
            config=config,
            rows=to_jsonable(result.rows),
            certificates=certificates,
            summary=to_jsonable(result.summary),
            caveats=[CENTRAL_CAVEAT, WINDOW_CAVEAT],
            wall_time_s=time.perf_counter() - started,
        )
        if write and config.output:
            write_atomic(Path(config.output), report.render(config.format))
            self.logger.info(f"Report written to {config.output}")
        return report


def run_experiment(
    config: ExperimentConfig,
    settings: Optional[ConfigManager] = None,
    logger: Optional[Logger] = None,
    workers: Optional[int] = None,
) -> Report:
    """Dispatch to the registered experiment and write the report if an output is set"""
    return ExperimentManager(settings, logger, workers).run(config)
