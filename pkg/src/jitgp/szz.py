"""Defect labeling: fix identification, origin tracing, and early-exposure thresholding.

Works from externally produced inputs (commit messages, blame tables); never
runs git itself. The blame table may carry an optional trailing ``trivial``
column (0/1) marking whitespace/comment-only attributions to be discarded.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass

from .errors import ConfigError, ConsistencyError, DataError, DomainError, SchemaError
from .ingest import ChangeRecord, ChangeSet

FOUR_WEEKS_SECONDS = 4 * 7 * 86400

_FIX_WORD = re.compile(r"\bfix(?:es|ed)?\b", re.IGNORECASE)

MESSAGE_COLUMNS = ("commit", "message")
BLAME_COLUMNS = (
    "fix_commit",
    "file",
    "start_line",
    "end_line",
    "origin_commit",
    "origin_author",
    "origin_timestamp",
)


@dataclass(frozen=True)
class FixCommit:
    commit_id: str
    linked_issue_ids: frozenset[str]
    fix_timestamp: int

    def __post_init__(self):
        if not self.commit_id:
            raise DataError("fix commit with empty commit id")


@dataclass(frozen=True)
class BlameRecord:
    fix_commit_id: str
    file_path: str
    line_start: int
    line_end: int
    origin_commit_id: str
    origin_author_id: str
    origin_timestamp: int
    trivial: bool = False

    def __post_init__(self):
        if self.line_start > self.line_end:
            raise DataError(
                f"blame line range {self.line_start}..{self.line_end} inverted "
                f"for {self.origin_commit_id!r}"
            )


@dataclass(frozen=True)
class DefectPair:
    introducing_commit_id: str
    fixing_commit_id: str
    exposure_duration: int

    def __post_init__(self):
        if self.exposure_duration < 0:
            raise DataError(
                f"negative exposure for {self.introducing_commit_id} -> {self.fixing_commit_id}"
            )


@dataclass(frozen=True)
class ExposureThreshold:
    seconds: float

    def __post_init__(self):
        if not 0 < self.seconds <= FOUR_WEEKS_SECONDS:
            raise DomainError(f"exposure threshold {self.seconds} outside (0, 4 weeks]")


def identify_fix_commits(
    messages: dict[str, str],
    issue_pattern: str,
    fallback: bool = False,
    timestamps: dict[str, int] | None = None,
) -> set[FixCommit]:
    """Commits whose message references an issue key, or (with fallback) uses a fix word.

    The fallback matches the stem fix/fixes/fixed case-insensitively as a word.
    """
    try:
        pattern = re.compile(issue_pattern)
    except re.error as exc:
        raise ConfigError(f"invalid issue pattern {issue_pattern!r}: {exc}") from None
    timestamps = timestamps or {}
    fixes = set()
    for commit_id, message in messages.items():
        issue_ids = frozenset(m.group(0) for m in pattern.finditer(message))
        if not issue_ids and not (fallback and _FIX_WORD.search(message)):
            continue
        fixes.add(
            FixCommit(
                commit_id=commit_id,
                linked_issue_ids=issue_ids,
                fix_timestamp=timestamps.get(commit_id, 0),
            )
        )
    return fixes


def trace_bug_introducers(
    fix: FixCommit,
    blame: list[BlameRecord],
    report_created: dict[str, int] | None = None,
    repository_start: int | None = None,
) -> set[DefectPair]:
    """One DefectPair per distinct surviving origin commit of a fix.

    Discards: records pre-marked trivial; origins committed after the linked
    bug report's creation time (when report timestamps are supplied).
    """
    for rec in blame:
        if rec.fix_commit_id != fix.commit_id:
            raise ConsistencyError(
                f"blame record for {rec.fix_commit_id!r} passed while tracing {fix.commit_id!r}"
            )
        if repository_start is not None and rec.origin_timestamp < repository_start:
            raise DataError(
                f"blame origin {rec.origin_commit_id!r} at {rec.origin_timestamp} "
                f"predates repository start {repository_start}"
            )
    report_cutoff = None
    if report_created:
        linked = [report_created[i] for i in fix.linked_issue_ids if i in report_created]
        if linked:
            report_cutoff = min(linked)
    origins: dict[str, int] = {}
    for rec in blame:
        if rec.trivial:
            continue
        ts = origins.get(rec.origin_commit_id)
        origins[rec.origin_commit_id] = rec.origin_timestamp if ts is None else min(ts, rec.origin_timestamp)
    pairs = set()
    for origin, ts in origins.items():
        if report_cutoff is not None and ts > report_cutoff:
            continue
        pairs.add(
            DefectPair(
                introducing_commit_id=origin,
                fixing_commit_id=fix.commit_id,
                exposure_duration=fix.fix_timestamp - ts,
            )
        )
    return pairs


def compute_exposure_threshold(changes: ChangeSet) -> ExposureThreshold:
    """min(4 weeks, 1% of the project time span), in seconds."""
    span = changes.end - changes.start
    if span <= 0:
        raise DomainError(f"project span must be positive, got {span}s")
    return ExposureThreshold(seconds=min(float(FOUR_WEEKS_SECONDS), 0.01 * span))


def label_early_exposed(
    changes: ChangeSet, pairs: set[DefectPair], threshold: ExposureThreshold
) -> ChangeSet:
    """Label 1 every record of a commit with at least one early-exposed defect, else 0."""
    known = {r.commit_id for r in changes.records}
    unknown = sorted({p.introducing_commit_id for p in pairs} - known)
    if unknown:
        raise ConsistencyError(f"defect pairs reference unknown commits: {unknown}")
    early = {p.introducing_commit_id for p in pairs if p.exposure_duration < threshold.seconds}
    relabeled = [
        ChangeRecord(
            commit_id=r.commit_id,
            author_id=r.author_id,
            file_path=r.file_path,
            timestamp=r.timestamp,
            label=1 if r.commit_id in early else 0,
        )
        for r in changes.records
    ]
    return ChangeSet.from_records(relabeled)


def messages_from_table(table: str) -> dict[str, str]:
    """Parse the commit,message table (message field quoted as needed)."""
    reader = csv.reader(io.StringIO(table))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty message table") from None
    if tuple(h.strip() for h in header) != MESSAGE_COLUMNS:
        raise SchemaError(f"bad message header {header!r}: expected {','.join(MESSAGE_COLUMNS)}")
    messages = {}
    for rownum, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise SchemaError(f"message row {rownum}: expected 2 fields, got {len(row)}")
        messages[row[0].strip()] = row[1]
    return messages


def blame_from_table(table: str) -> list[BlameRecord]:
    """Parse the blame table; an optional trailing ``trivial`` column is honored."""
    reader = csv.reader(io.StringIO(table))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty blame table") from None
    names = tuple(h.strip() for h in header)
    if names[: len(BLAME_COLUMNS)] != BLAME_COLUMNS or names[len(BLAME_COLUMNS) :] not in ((), ("trivial",)):
        raise SchemaError(f"bad blame header {header!r}: expected {','.join(BLAME_COLUMNS)}[,trivial]")
    records = []
    for rownum, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(names):
            raise SchemaError(f"blame row {rownum}: expected {len(names)} fields, got {len(row)}")
        try:
            records.append(
                BlameRecord(
                    fix_commit_id=row[0].strip(),
                    file_path=row[1],
                    line_start=int(row[2]),
                    line_end=int(row[3]),
                    origin_commit_id=row[4].strip(),
                    origin_author_id=row[5].strip().lower(),
                    origin_timestamp=int(row[6]),
                    trivial=bool(int(row[7])) if len(row) > 7 else False,
                )
            )
        except ValueError as exc:
            raise DataError(f"blame row {rownum}: {exc}") from None
    return records
