"""Log data model, CSV parsing, pre-processing filters and chunking.

The input format is the five-column CSV export of a CPS controller log::

    39994,"2014-06-06 22:00","humidity",30,NULL
    39995,"2014-06-06 22:06:18","fan1_status",NULL,"on"

Columns are id, timestamp, command, numeric argument and string argument.
Absent arguments are the unquoted literal ``NULL``.
"""

from __future__ import annotations

import calendar
import csv
import enum
import fnmatch
import io
import math
import logging
import os
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Union

from lofscan.errors import ConfigError, LogFormatError

logger = logging.getLogger(__name__)

NULL = "NULL"

Source = Union[str, bytes, os.PathLike, IO[str], IO[bytes], Iterable[str], Iterable[bytes]]

_TS_RE = re.compile(r"^(\d{4})-(\d{2})-(\d{2}) (\d{2}):(\d{2})(?::(\d{2}))?$")


@dataclass(frozen=True)
class LogEntry:
    """One parsed log row.

    ``timestamp`` is naive local time expressed as epoch seconds. ``raw`` keeps
    the source line verbatim for reporting and is ignored by equality.
    """

    id: int
    timestamp: int
    command: str
    numeric_arg: float | None = None
    string_arg: str | None = None
    raw: str = field(default="", compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.id < 0:
            raise ValueError(f"entry id must be non-negative, got {self.id}")
        if not self.command:
            raise ValueError("command must be non-empty")
        if self.numeric_arg is not None and self.string_arg is not None:
            raise ValueError(f"entry {self.id}: both numeric and string argument present")
        if self.string_arg is not None and self.string_arg == "":
            raise ValueError(f"entry {self.id}: string argument must be non-empty")

    @property
    def time_text(self) -> str:
        return format_timestamp(self.timestamp)

    def to_csv_line(self) -> str:
        """Serialize back to the five-column export format."""
        num = NULL if self.numeric_arg is None else format_number(self.numeric_arg)
        s = NULL if self.string_arg is None else _quote(self.string_arg)
        return f'{self.id},{_quote(self.time_text)},{_quote(self.command)},{num},{s}'

    @property
    def line(self) -> str:
        """Source line if known, else the canonical serialization."""
        return self.raw or self.to_csv_line()

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "timestamp": self.time_text,
            "command": self.command,
            "numeric_arg": self.numeric_arg,
            "string_arg": self.string_arg,
            "line": self.line,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> LogEntry:
        num = d.get("numeric_arg")
        return cls(
            id=int(d["id"]),
            timestamp=parse_timestamp(d["timestamp"]),
            command=d["command"],
            numeric_arg=None if num is None else float(num),
            string_arg=d.get("string_arg"),
            raw=d.get("line", ""),
        )


class CommandClass(enum.Enum):
    ACTUATOR_DRIVE = "actuator"
    SENSOR_VALUE = "sensor"
    NETWORK_STATUS = "network"
    OTHER = "other"

    @classmethod
    def parse(cls, text: str) -> CommandClass:
        key = re.sub(r"[^a-z]", "", text.lower())
        aliases = {
            "actuator": cls.ACTUATOR_DRIVE,
            "actuatordrive": cls.ACTUATOR_DRIVE,
            "sensor": cls.SENSOR_VALUE,
            "sensorvalue": cls.SENSOR_VALUE,
            "network": cls.NETWORK_STATUS,
            "networkstatus": cls.NETWORK_STATUS,
            "other": cls.OTHER,
            "others": cls.OTHER,
            "othersexclude": cls.OTHER,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ConfigError(f"unknown command class {text!r}") from None


class CommandClassifier(Mapping):
    """Total mapping from command name to :class:`CommandClass`.

    Exact names win over glob patterns; patterns are tried in insertion order.
    Anything unmatched is ``OTHER``.
    """

    def __init__(self, rules: Mapping[str, CommandClass] | Iterable[tuple[str, CommandClass]] = ()):
        items = rules.items() if isinstance(rules, Mapping) else rules
        self._exact: dict[str, CommandClass] = {}
        self._patterns: list[tuple[str, CommandClass]] = []
        for name, cls in items:
            if any(ch in name for ch in "*?["):
                self._patterns.append((name, cls))
            else:
                self._exact[name] = cls
        self._cache: dict[str, CommandClass] = {}

    def __getitem__(self, command: str) -> CommandClass:
        hit = self._cache.get(command)
        if hit is None:
            hit = self._exact.get(command)
            if hit is None:
                hit = CommandClass.OTHER
                for pat, cls in self._patterns:
                    if fnmatch.fnmatchcase(command, pat):
                        hit = cls
                        break
            self._cache[command] = hit
        return hit

    def __iter__(self):
        return iter(self._exact)

    def __len__(self) -> int:
        return len(self._exact)


def load_classes(path: str | os.PathLike) -> CommandClassifier:
    """Read a two-column ``command,class`` CSV; a header row is optional."""
    rules: list[tuple[str, CommandClass]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not row[0].strip() or row[0].lstrip().startswith("#"):
                continue
            if len(row) != 2:
                raise ConfigError(f"{path}:{lineno}: expected 'command,class', got {row!r}")
            name, cls = row[0].strip(), row[1].strip()
            if lineno == 1 and name.lower() == "command" and cls.lower() == "class":
                continue
            rules.append((name, CommandClass.parse(cls)))
    return CommandClassifier(rules)


@dataclass(frozen=True)
class FilterConfig:
    excluded_classes: frozenset[CommandClass] = frozenset({CommandClass.OTHER})
    excluded_command_patterns: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# parsing


def parse_timestamp(text: str) -> int:
    """``YYYY-MM-DD HH:MM[:SS]`` to epoch seconds (naive, no timezone)."""
    m = _TS_RE.match(text)
    if m is None:
        raise ValueError(f"bad timestamp {text!r}")
    y, mo, d, h, mi = (int(g) for g in m.groups()[:5])
    s = int(m.group(6)) if m.group(6) is not None else 0
    datetime(y, mo, d, h, mi, s)  # range validation
    return calendar.timegm((y, mo, d, h, mi, s, 0, 0, 0))


def format_timestamp(ts: int) -> str:
    dt = datetime.fromtimestamp(ts, tz=timezone.utc)
    if dt.second == 0:
        return dt.strftime("%Y-%m-%d %H:%M")
    return dt.strftime("%Y-%m-%d %H:%M:%S")


def format_number(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _quote(s: str) -> str:
    return '"' + s.replace('"', '""') + '"'


def _split_fields(line: str) -> list[tuple[str, bool]]:
    """Split one CSV record, keeping whether each field was quoted.

    The stdlib reader drops quoting, which we need to tell ``NULL`` from
    ``"NULL"``.
    """
    fields: list[tuple[str, bool]] = []
    i, n = 0, len(line)
    while True:
        if i < n and line[i] == '"':
            i += 1
            buf = []
            while True:
                j = line.find('"', i)
                if j < 0:
                    raise ValueError("unterminated quoted field")
                buf.append(line[i:j])
                if j + 1 < n and line[j + 1] == '"':
                    buf.append('"')
                    i = j + 2
                    continue
                i = j + 1
                break
            fields.append(("".join(buf), True))
            if i < n and line[i] != ",":
                raise ValueError("garbage after quoted field")
        else:
            j = line.find(",", i)
            if j < 0:
                j = n
            fields.append((line[i:j].strip(), False))
            i = j
        if i >= n:
            return fields
        i += 1  # skip comma
        if i == n:
            fields.append(("", False))
            return fields


def parse_line(line: str, lineno: int = 0) -> LogEntry:
    """Parse a single record. Raises :class:`LogFormatError`."""
    try:
        fields = _split_fields(line)
    except ValueError as exc:
        raise LogFormatError(str(exc), lineno) from None
    if len(fields) != 5:
        raise LogFormatError(f"expected 5 columns, got {len(fields)}", lineno)
    (id_txt, _), (ts_txt, _), (cmd, _), (num_txt, num_q), (str_txt, str_q) = fields
    try:
        entry_id = int(id_txt)
    except ValueError:
        raise LogFormatError(f"bad id {id_txt!r}", lineno) from None
    try:
        ts = parse_timestamp(ts_txt)
    except ValueError:
        raise LogFormatError(f"bad timestamp {ts_txt!r}", lineno) from None
    if not cmd:
        raise LogFormatError("empty command", lineno)

    num = None
    if num_q or num_txt != NULL:
        try:
            num = float(num_txt)
        except ValueError:
            num = math.nan
        if not math.isfinite(num):
            raise LogFormatError(f"bad numeric argument {num_txt!r}", lineno)
    s = None
    if str_q or str_txt != NULL:
        s = str_txt or None
    if num is not None and s is not None:
        raise LogFormatError("contract violation: both numeric and string argument present", lineno)
    try:
        return LogEntry(entry_id, ts, cmd, num, s, raw=line)
    except ValueError as exc:
        raise LogFormatError(str(exc), lineno) from None


def _iter_lines(source: Source) -> Iterable[str]:
    if isinstance(source, os.PathLike) or (
        isinstance(source, str) and source and "\n" not in source and Path(source).is_file()
    ):
        with open(source, encoding="utf-8", newline="") as fh:
            yield from fh
        return
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        yield from io.StringIO(source, newline="")
        return
    for line in source:
        yield line.decode("utf-8") if isinstance(line, bytes) else line


def parse_log(source: Source, *, lenient: bool = False) -> list[LogEntry]:
    """Parse a whole log.

    ``source`` may be a path, raw bytes/str content, or any iterable of lines
    (text or binary file objects included). Blank lines are ignored. With
    ``lenient`` malformed rows are logged and skipped; otherwise the first one
    raises.
    """
    entries: list[LogEntry] = []
    prev: LogEntry | None = None
    for lineno, line in enumerate(_iter_lines(source), start=1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        try:
            entry = parse_line(line, lineno)
        except LogFormatError as exc:
            if not lenient:
                raise
            logger.warning("skipping %s", exc)
            continue
        if prev is not None:
            if entry.id <= prev.id:
                logger.warning("line %d: id %d not above previous id %d", lineno, entry.id, prev.id)
            if entry.timestamp < prev.timestamp:
                logger.warning("line %d: timestamp goes backwards (id %d)", lineno, entry.id)
        entries.append(entry)
        prev = entry
    return entries


def write_log(entries: Iterable[LogEntry], fh: IO[str]) -> None:
    for e in entries:
        fh.write(e.to_csv_line())
        fh.write("\n")


# ---------------------------------------------------------------------------
# pre-processing


def filter_entries(
    entries: Sequence[LogEntry],
    cfg: FilterConfig,
    classes: Mapping[str, CommandClass],
) -> list[LogEntry]:
    """Drop entries of excluded classes or matching an excluded glob.

    Commands missing from ``classes`` count as ``OTHER``.
    """
    excluded = cfg.excluded_classes
    patterns = cfg.excluded_command_patterns
    keep: dict[str, bool] = {}
    out = []
    for e in entries:
        ok = keep.get(e.command)
        if ok is None:
            cls = classes.get(e.command, CommandClass.OTHER)
            ok = cls not in excluded and not any(fnmatch.fnmatchcase(e.command, p) for p in patterns)
            keep[e.command] = ok
        if ok:
            out.append(e)
    return out


def chunk(entries: Sequence[LogEntry], chunk_size: int) -> list[list[LogEntry]]:
    if chunk_size < 1:
        raise ConfigError(f"chunk_size must be >= 1, got {chunk_size}")
    return [list(entries[i : i + chunk_size]) for i in range(0, len(entries), chunk_size)]
