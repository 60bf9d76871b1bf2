"""Vulnerability labels from fix commits."""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field

from ..errors import ConfigError, DataError, EmptyPatch
from ..history.diff import Hunk, parse_hunks
from ..history.git import DEFAULT_EXCLUDES, Git, is_js_path
from ..inventory.functions import FunctionKey, SourceFile, parse_source, span_overlaps


@dataclass(frozen=True)
class FixRecord:
    repo: str
    fix_commit: str
    advisory_id: str = ""


def load_fixes(path: str) -> list[FixRecord]:
    """Read fix records from a CSV (header repo,fix_commit,advisory_id) or JSON list."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".json"):
        try:
            items = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    else:
        items = list(csv.DictReader(io.StringIO(text)))
    fixes = []
    for n, item in enumerate(items, 1):
        repo = item.get("repo") or item.get("repo_url_or_path")
        commit = item.get("fix_commit")
        if not repo or not commit:
            raise DataError(f"{path}: record {n} lacks repo or fix_commit")
        fixes.append(FixRecord(repo, commit, item.get("advisory_id", "") or ""))
    return fixes


def affected(fk: FunctionKey, hunks: list[Hunk]) -> bool:
    """Whether a pre-fix function is touched by the patch hunks of its file.

    Deleted or rewritten lines hit a function when its span overlaps them. A
    pure insertion after line ``a`` hits a function whose span holds both
    ``a`` and ``a + 1``, i.e. code was inserted inside its body.
    """
    for h in hunks:
        if h.old_count > 0:
            if span_overlaps(fk, h.deleted_lines):
                return True
        elif fk.span.contains_line(h.old_start) and fk.span.contains_line(h.old_start + 1):
            return True
    return False


@dataclass
class LabelResult:
    project: str
    fix: FixRecord
    labels: list[tuple[FunctionKey, int]] = field(default_factory=list)
    empty: bool = False
    diagnostics: list[str] = field(default_factory=list)

    @property
    def vulnerable(self) -> set[FunctionKey]:
        return {k for k, y in self.labels if y == 1}


def project_id(repo: str, commit: str) -> str:
    name = os.path.basename(os.path.normpath(repo)) or repo
    return f"{name}@{commit[:12]}"


def label_files(files: list[SourceFile], patch: dict[str, list[Hunk]]) -> list[tuple[FunctionKey, int]]:
    """Label every function of the pre-fix ``files`` given per-path hunks."""
    out = []
    for sf in files:
        hunks = patch.get(sf.path, [])
        for info in sf.functions:
            out.append((info.key, int(bool(hunks) and affected(info.key, hunks))))
    return out


def label_from_fix(fix: FixRecord, repo: str | None = None, excludes=DEFAULT_EXCLUDES) -> LabelResult:
    """Label the functions of the fix commit's parent revision."""
    repo = repo or fix.repo
    with Git(repo) as git:
        commit = git.resolve(fix.fix_commit)
        parents = git.parents(commit)
        if not parents:
            raise DataError(f"fix commit {commit[:12]} has no parent revision")
        parent = parents[0]
        result = LabelResult(project_id(repo, commit), fix)
        changes = git.changes(parent, commit)
        if not changes:
            result.empty = True
            result.diagnostics.append(f"{fix.advisory_id or commit[:12]}: {EmptyPatch.__name__}")
            return result
        patch: dict[str, list[Hunk]] = {}
        for ch in changes:
            if ch.old_path and ch.old_blob and is_js_path(ch.old_path, excludes):
                if ch.new_blob:
                    patch[ch.old_path] = parse_hunks(git.diff_blobs(ch.old_blob, ch.new_blob))
                else:  # deleted file: every line is affected
                    n = git.read_blob(ch.old_blob).count("\n") + 1
                    patch[ch.old_path] = [Hunk(1, n, 0, 0)]
        files = []
        for path, blob in sorted(git.tree_files(parent)):
            if is_js_path(path, excludes):
                sf = parse_source(git.read_blob(blob), path)
                result.diagnostics.extend(f"{path}: {e}" for e in sf.errors)
                files.append(sf)
        result.labels = label_files(files, patch)
        return result


LABEL_COLUMNS = ["project", "path", "qualified_name", "start_line", "end_line", "label"]


def labels_csv(results: list[LabelResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(LABEL_COLUMNS)
    for res in results:
        for key, y in res.labels:
            writer.writerow(
                [res.project, key.file_path, key.qualified_name, key.span.start_line, key.span.end_line, y]
            )
    return buf.getvalue()
