"""Thin wrapper over the git command line."""

from __future__ import annotations

import fnmatch
import os
import subprocess
from dataclasses import dataclass

from ..errors import CommitNotFound, RepoNotFound, RepositoryError, UnreadableBlob

EMPTY_TREE = "4b825dc642cb6eb9a060e54bf8d69288fbee4904"
NULL_SHA = "0" * 40
DEFAULT_EXCLUDES = ("node_modules/*", "*/node_modules/*", "*.min.js")


@dataclass(frozen=True)
class CommitMeta:
    commit_id: str
    author_id: str  # lowercased author email
    timestamp: int  # committer time, seconds since epoch
    parents: tuple[str, ...] = ()


@dataclass(frozen=True)
class FileChange:
    status: str  # A, M, D, R (copies are treated as additions)
    old_path: str | None
    new_path: str | None
    old_blob: str | None
    new_blob: str | None


def is_js_path(path: str | None, excludes=DEFAULT_EXCLUDES) -> bool:
    if not path or not path.endswith(".js"):
        return False
    return not any(fnmatch.fnmatch(path, pat) for pat in excludes)


class Git:
    def __init__(self, repo: str):
        if not os.path.isdir(repo):
            raise RepoNotFound(f"no such directory: {repo}")
        self.repo = repo
        try:
            top = self.run("rev-parse", "--git-dir")
        except RepositoryError as exc:
            raise RepoNotFound(f"not a git repository: {repo}") from exc
        if not top.strip():
            raise RepoNotFound(f"not a git repository: {repo}")
        self._batch: subprocess.Popen | None = None

    def run(self, *args: str, binary: bool = False) -> str | bytes:
        env = dict(os.environ, LC_ALL="C", GIT_PAGER="cat")
        proc = subprocess.run(
            ["git", "-C", self.repo, "-c", "core.quotepath=off", *args],
            capture_output=True,
            env=env,
        )
        if proc.returncode != 0:
            raise RepositoryError(proc.stderr.decode(errors="replace").strip() or f"git {args[0]} failed")
        return proc.stdout if binary else proc.stdout.decode("utf-8", errors="replace")

    def resolve(self, rev: str) -> str:
        try:
            return self.run("rev-parse", "--verify", "--quiet", f"{rev}^{{commit}}").strip()
        except RepositoryError as exc:
            raise CommitNotFound(f"unknown revision {rev!r}") from exc

    def parents(self, commit: str) -> list[str]:
        return self.run("log", "-1", "--format=%P", self.resolve(commit)).split()

    def first_parent_chain(self, until: str | None = None) -> list[CommitMeta]:
        """Commits from the root to ``until`` (default HEAD) along first parents."""
        tip = self.resolve(until or "HEAD")
        out = self.run(
            "log", "--first-parent", "--reverse", "--format=%H%x1f%ae%x1f%ct%x1f%P", tip
        )
        metas = []
        for line in out.splitlines():
            if not line:
                continue
            sha, email, ct, parents = line.split("\x1f")
            metas.append(CommitMeta(sha, email.strip().lower(), int(ct), tuple(parents.split())))
        return metas

    def changes(self, parent: str | None, commit: str) -> list[FileChange]:
        """Files changed between ``parent`` (empty tree if None) and ``commit``."""
        raw = self.run(
            "diff-tree", "-r", "-z", "-M", "--no-abbrev", parent or EMPTY_TREE, commit
        )
        fields = raw.split("\x00")
        changes = []
        i = 0
        while i < len(fields):
            head = fields[i]
            if not head.startswith(":"):
                i += 1
                continue
            _, _, old_blob, new_blob, status = head[1:].split(" ")
            kind = status[0]
            if kind in ("R", "C"):
                old_path, new_path = fields[i + 1], fields[i + 2]
                i += 3
            else:
                old_path = new_path = fields[i + 1]
                i += 2
            if kind == "C":
                kind, old_path, old_blob = "A", None, NULL_SHA
            elif kind == "A":
                old_path = None
            elif kind == "D":
                new_path = None
            elif kind == "T":
                kind = "M"
            changes.append(
                FileChange(
                    kind,
                    old_path,
                    new_path,
                    None if old_blob == NULL_SHA else old_blob,
                    None if new_blob == NULL_SHA else new_blob,
                )
            )
        return changes

    def diff_blobs(self, old_blob: str, new_blob: str) -> str:
        """Zero-context unified diff of two existing blobs."""
        return self.run("diff", "-U0", "--no-color", "--no-ext-diff", "--text", old_blob, new_blob)

    def read_blob(self, sha: str) -> str:
        if self._batch is None:
            self._batch = subprocess.Popen(
                ["git", "-C", self.repo, "cat-file", "--batch"],
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
            )
        assert self._batch.stdin is not None and self._batch.stdout is not None
        self._batch.stdin.write(sha.encode() + b"\n")
        self._batch.stdin.flush()
        header = self._batch.stdout.readline().decode().split()
        if len(header) < 3 or header[1] != "blob":
            raise UnreadableBlob(f"cannot read blob {sha}")
        size = int(header[2])
        data = self._batch.stdout.read(size)
        self._batch.stdout.read(1)  # trailing newline
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise UnreadableBlob(f"blob {sha} is not UTF-8") from exc

    def tree_files(self, rev: str) -> list[tuple[str, str]]:
        """(path, blob sha) for every file in ``rev``."""
        out = self.run("ls-tree", "-r", "-z", "--full-tree", self.resolve(rev))
        files = []
        for entry in out.split("\x00"):
            if not entry:
                continue
            meta, path = entry.split("\t", 1)
            _, kind, sha = meta.split()
            if kind == "blob":
                files.append((path, sha))
        return files

    def close(self) -> None:
        if self._batch is not None:
            if self._batch.stdin:
                self._batch.stdin.close()
            self._batch.wait()
            self._batch = None

    def __enter__(self) -> "Git":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
