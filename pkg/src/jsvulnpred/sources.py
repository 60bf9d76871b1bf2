"""Load a project's JavaScript files from a directory or a git revision."""

from __future__ import annotations

import os

from .errors import JsVulnError
from .history.git import DEFAULT_EXCLUDES, Git, is_js_path
from .inventory.functions import SourceFile, parse_source


def _read(path: str) -> str:
    with open(path, encoding="utf-8", errors="strict") as fh:
        return fh.read()


def load_directory(root: str, excludes=DEFAULT_EXCLUDES) -> tuple[list[SourceFile], list[str]]:
    """Parse every ``.js`` file below ``root``; paths are relative, '/'-separated."""
    if not os.path.isdir(root):
        raise FileNotFoundError(root)
    files, diagnostics = [], []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames[:] = sorted(d for d in dirnames if d not in (".git", "node_modules"))
        for name in sorted(filenames):
            full = os.path.join(dirpath, name)
            rel = os.path.relpath(full, root).replace(os.sep, "/")
            if not is_js_path(rel, excludes):
                continue
            try:
                source = _read(full)
            except UnicodeDecodeError:
                diagnostics.append(f"{rel}: not UTF-8, skipped")
                continue
            sf = parse_source(source, rel)
            diagnostics.extend(f"{rel}: {err}" for err in sf.errors)
            files.append(sf)
    files.sort(key=lambda sf: sf.path)
    return files, diagnostics


def load_revision(repo: str, rev: str, excludes=DEFAULT_EXCLUDES) -> tuple[list[SourceFile], list[str]]:
    """Parse every ``.js`` file of ``rev`` straight from the object store."""
    files, diagnostics = [], []
    with Git(repo) as git:
        for path, blob in sorted(git.tree_files(rev)):
            if not is_js_path(path, excludes):
                continue
            try:
                source = git.read_blob(blob)
            except JsVulnError as exc:
                diagnostics.append(f"{path}: {exc}")
                continue
            sf = parse_source(source, path)
            diagnostics.extend(f"{path}: {err}" for err in sf.errors)
            files.append(sf)
    return files, diagnostics
