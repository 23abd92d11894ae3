"""Run configuration files.

Plain INI text: ``[section]`` headers followed by ``key = value`` lines.
``#`` and ``;`` start comments, also after a value when preceded by a
space. Values are strings parsed on access. Example::

    [run]
    seed = 7

    [code]
    name = rm2

    [sweep]
    snr_start = -15
    snr_stop = 15
    snr_step = 1
    estimator = oracle-mc

``to_text`` writes sections and keys sorted, so a parsed and re-dumped file
is canonical and stable.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(ValueError):
    """Malformed configuration file or value."""


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass
class RunConfig:
    sections: dict[str, dict[str, str]] = field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        parser = configparser.ConfigParser(
            interpolation=None, comment_prefixes=("#", ";"), inline_comment_prefixes=("#", ";")
        )
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from None
        return cls({s: dict(parser[s]) for s in parser.sections()})

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_text(text)

    def to_text(self) -> str:
        lines = []
        for name in sorted(self.sections):
            lines.append(f"[{name}]")
            for key in sorted(self.sections[name]):
                lines.append(f"{key} = {self.sections[name][key]}")
            lines.append("")
        return "\n".join(lines)

    def set(self, section: str, key: str, value) -> None:
        if isinstance(value, bool):
            value = "true" if value else "false"
        self.sections.setdefault(section, {})[key] = str(value)

    def section(self, name: str) -> dict[str, str]:
        return dict(self.sections.get(name, {}))

    def get(self, section: str, key: str, default=None):
        return self.sections.get(section, {}).get(key, default)

    def _typed(self, section, key, default, conv, kind):
        raw = self.get(section, key)
        if raw is None:
            return default
        try:
            return conv(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key} = {raw!r} is not a valid {kind}") from None

    def get_int(self, section: str, key: str, default=None):
        return self._typed(section, key, default, int, "integer")

    def get_float(self, section: str, key: str, default=None):
        return self._typed(section, key, default, float, "number")

    def get_bool(self, section: str, key: str, default=None):
        def conv(v):
            v = v.strip().lower()
            if v in _TRUE:
                return True
            if v in _FALSE:
                return False
            raise ValueError(v)

        return self._typed(section, key, default, conv, "boolean")

    def __eq__(self, other) -> bool:
        if not isinstance(other, RunConfig):
            return NotImplemented
        return self.sections == other.sections
