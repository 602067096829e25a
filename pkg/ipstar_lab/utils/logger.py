"""Logging utilities for ipstar-lab"""

import sys
from datetime import datetime
from pathlib import Path
from typing import Callable, Optional

LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class Logger:
    """Daily run log plus an optional line callback (the CLI forwards lines to stderr).

    Lines below ``callback_level`` still reach the file. Engines never log;
    only the experiment manager and the CLI hold a Logger.
    """

    def __init__(
        self,
        log_dir: Optional[Path] = None,
        callback: Optional[Callable[[str], None]] = None,
        callback_level: str = "INFO",
    ):
        if callback_level not in LEVELS:
            raise ValueError(f"unknown log level {callback_level!r}")
        self.log_dir = log_dir
        self.callback = callback
        self.callback_level = callback_level
        if self.log_dir is not None:
            self.log_dir.mkdir(parents=True, exist_ok=True)

    @property
    def log_file(self) -> Optional[Path]:
        """Today's file, or None when logging to a file is off"""
        if self.log_dir is None:
            return None
        return self.log_dir / f"ipstar_lab_{datetime.now():%Y-%m-%d}.log"

    def log(self, message: str, level: str = "INFO"):
        line = f"[{datetime.now():%H:%M:%S}] [{level}] {message}"
        if self.callback and LEVELS.index(level) >= LEVELS.index(self.callback_level):
            try:
                self.callback(line)
            except Exception as e:
                print(f"Log callback failed: {e}", file=sys.stderr)
        target = self.log_file
        if target is None:
            return
        try:
            with open(target, 'a', encoding='utf-8') as f:
                f.write(line + '\n')
        except OSError as e:
            print(f"Could not append to {target}: {e}", file=sys.stderr)

    def info(self, message: str):
        self.log(message, "INFO")

    def warning(self, message: str):
        self.log(message, "WARNING")

    def error(self, message: str):
        self.log(message, "ERROR")

    def debug(self, message: str):
        self.log(message, "DEBUG")
