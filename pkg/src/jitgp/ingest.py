"""Parse version-control changelogs and labeled change tables into a canonical change stream.

Two input shapes are understood:

* raw changelog text: records separated by exactly one blank line, each a
  ``commit_id|author_email|unix_timestamp`` header followed by zero or more
  file-path lines;
* labeled table: comma-delimited UTF-8 with header
  ``commit,author,timestamp,file,label`` and LF line endings.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError, ParseError, SchemaError

TABLE_COLUMNS = ("commit", "author", "timestamp", "file", "label")


@dataclass(frozen=True)
class ChangeRecord:
    """One (commit, author, file, timestamp) tuple, optionally labeled defect-prone."""

    commit_id: str
    author_id: str
    file_path: str
    timestamp: int
    label: int | None = None


@dataclass(frozen=True)
class ChangeSet:
    """Time-ordered change records plus the project start/end timestamps."""

    records: tuple[ChangeRecord, ...]
    start: int
    end: int

    @classmethod
    def from_records(cls, records) -> "ChangeSet":
        """Dedupe (commit, file) pairs, sort by timestamp, derive the time span."""
        seen = set()
        unique = []
        for rec in records:
            if not rec.commit_id:
                raise DataError("change record with empty commit id")
            if rec.timestamp < 0:
                raise DataError(f"negative timestamp on commit {rec.commit_id!r}")
            if rec.label is not None and rec.label not in (0, 1):
                raise DataError(f"label {rec.label!r} outside {{0,1}} on commit {rec.commit_id!r}")
            key = (rec.commit_id, rec.file_path)
            if key in seen:
                continue
            seen.add(key)
            unique.append(rec)
        unique.sort(key=lambda r: r.timestamp)  # stable: input order kept for ties
        if not unique:
            return cls(records=(), start=0, end=0)
        return cls(records=tuple(unique), start=unique[0].timestamp, end=unique[-1].timestamp)

    def labeled(self) -> bool:
        return all(r.label is not None for r in self.records)


def normalize_author(email: str, name: str = "") -> str:
    """Author identity: lowercased email, falling back to lowercased name."""
    email = email.strip().lower()
    if email:
        return email
    return name.strip().lower()


def parse_changelog(raw_log: str) -> ChangeSet:
    """Parse raw changelog text into one ChangeRecord per (commit, file) pair."""
    records: list[ChangeRecord] = []
    header: tuple[str, str, int] | None = None
    expecting_header = True
    any_content = False
    for lineno, line in enumerate(raw_log.splitlines(), start=1):
        if not line.strip():
            if expecting_header and any_content:
                raise ParseError(f"line {lineno}: blank line where a record header was expected")
            header = None
            expecting_header = True
            continue
        any_content = True
        if expecting_header:
            parts = line.split("|")
            if len(parts) != 3:
                raise ParseError(
                    f"line {lineno}: malformed header {line!r} (expected commit|author|timestamp)"
                )
            commit_id, email, ts_text = (p.strip() for p in parts)
            if not commit_id:
                raise ParseError(f"line {lineno}: empty commit id in header")
            try:
                timestamp = int(ts_text)
            except ValueError:
                raise ParseError(f"line {lineno}: non-integer timestamp {ts_text!r}") from None
            if timestamp < 0:
                raise ParseError(f"line {lineno}: negative timestamp {timestamp}")
            header = (commit_id, normalize_author(email), timestamp)
            expecting_header = False
        else:
            commit_id, author, timestamp = header
            records.append(
                ChangeRecord(
                    commit_id=commit_id,
                    author_id=author,
                    file_path=line.strip(),
                    timestamp=timestamp,
                )
            )
    return ChangeSet.from_records(records)


def changes_from_table(table: str, require_labels: bool = False) -> ChangeSet:
    """Parse the comma-delimited change table; labels may be blank unless required."""
    reader = csv.reader(io.StringIO(table))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty table: missing header row") from None
    if tuple(h.strip() for h in header) != TABLE_COLUMNS:
        missing = [c for c in TABLE_COLUMNS if c not in header]
        raise SchemaError(
            f"bad header {header!r}: expected {','.join(TABLE_COLUMNS)}"
            + (f" (missing {missing})" if missing else "")
        )
    records = []
    for rownum, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(TABLE_COLUMNS):
            raise SchemaError(f"row {rownum}: expected {len(TABLE_COLUMNS)} fields, got {len(row)}")
        commit, author, ts_text, file_path, label_text = row
        try:
            timestamp = int(ts_text)
        except ValueError:
            raise DataError(f"row {rownum}: non-integer timestamp {ts_text!r}") from None
        label_text = label_text.strip()
        if label_text == "":
            if require_labels:
                raise DataError(f"row {rownum}: missing label")
            label = None
        elif label_text in ("0", "1"):
            label = int(label_text)
        else:
            raise DataError(f"row {rownum}: label {label_text!r} outside {{0,1}}")
        records.append(
            ChangeRecord(
                commit_id=commit.strip(),
                author_id=normalize_author(author),
                file_path=file_path,
                timestamp=timestamp,
                label=label,
            )
        )
    return ChangeSet.from_records(records)


def load_labeled_changes(table: str) -> ChangeSet:
    """Strict loader for pre-labeled datasets: every record must carry a {0,1} label."""
    return changes_from_table(table, require_labels=True)


def changes_to_table(changes: ChangeSet) -> str:
    """Serialize to the labeled-table format; unlabeled records get a blank label field."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TABLE_COLUMNS)
    for rec in changes.records:
        writer.writerow(
            [
                rec.commit_id,
                rec.author_id,
                rec.timestamp,
                rec.file_path,
                "" if rec.label is None else rec.label,
            ]
        )
    return out.getvalue()


def read_changes(path, require_labels: bool = False) -> ChangeSet:
    return changes_from_table(Path(path).read_text(encoding="utf-8"), require_labels)


def write_changes(changes: ChangeSet, path) -> None:
    Path(path).write_text(changes_to_table(changes), encoding="utf-8")
