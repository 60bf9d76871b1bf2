"""Shared test helpers: scripted git repositories and a batch process-metric oracle."""

from __future__ import annotations

import os
import re
import subprocess
from collections import defaultdict
from dataclasses import dataclass, field

from jsvulnpred.inventory import extract_functions

AUTHORS = {
    "ann": ("Ann", "ann@example.org"),
    "bob": ("Bob", "bob@example.org"),
    "cyd": ("Cyd", "cyd@example.org"),
}


class GitScript:
    """Drive a throwaway repository with fixed authors and timestamps."""

    def __init__(self, path: str, start: int = 1_600_000_000):
        self.path = path
        self.clock = start
        os.makedirs(path, exist_ok=True)
        self.git("init", "-q", "-b", "main")
        self.git("config", "commit.gpgsign", "false")

    def git(self, *args: str, env: dict | None = None) -> str:
        full = dict(os.environ)
        full.update({"GIT_CONFIG_NOSYSTEM": "1", "HOME": self.path, "GIT_CONFIG_GLOBAL": os.devnull})
        full.update(env or {})
        proc = subprocess.run(
            ["git", "-C", self.path, *args], capture_output=True, text=True, env=full, check=False
        )
        if proc.returncode != 0:
            raise RuntimeError(f"git {' '.join(args)}: {proc.stderr}")
        return proc.stdout

    def write(self, rel: str, text: str) -> None:
        target = os.path.join(self.path, rel)
        os.makedirs(os.path.dirname(target), exist_ok=True)
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text)
        self.git("add", "--", rel)

    def remove(self, rel: str) -> None:
        self.git("rm", "-q", "--", rel)

    def move(self, old: str, new: str) -> None:
        os.makedirs(os.path.dirname(os.path.join(self.path, new)), exist_ok=True)
        self.git("mv", old, new)

    def _env(self, author: str, gap: int) -> dict:
        self.clock += gap
        name, email = AUTHORS[author]
        stamp = f"{self.clock} +0000"
        return {
            "GIT_AUTHOR_NAME": name,
            "GIT_AUTHOR_EMAIL": email,
            "GIT_COMMITTER_NAME": name,
            "GIT_COMMITTER_EMAIL": email,
            "GIT_AUTHOR_DATE": stamp,
            "GIT_COMMITTER_DATE": stamp,
        }

    def commit(self, message: str, author: str = "ann", gap: int = 100) -> str:
        self.git("commit", "-q", "--allow-empty", "-m", message, env=self._env(author, gap))
        return self.head()

    def merge(self, branch: str, author: str = "ann", gap: int = 100) -> str:
        self.git("merge", "-q", "--no-ff", "-m", f"merge {branch}", branch, env=self._env(author, gap))
        return self.head()

    def head(self) -> str:
        return self.git("rev-parse", "HEAD").strip()


# -- batch oracle ------------------------------------------------------------

_HUNK = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")


@dataclass
class FilePatch:
    old_path: str | None
    new_path: str | None
    hunks: list[tuple[int, int, int, int]] = field(default_factory=list)


def commit_patches(script: GitScript, parent: str | None, commit: str) -> list[FilePatch]:
    """Parse a whole-commit zero-context diff, independent of the package's git layer."""
    base = parent or script.git("hash-object", "-t", "tree", "/dev/null").strip()
    text = script.git("diff", "-U0", "-M", "--no-color", "--text", base, commit)
    patches: list[FilePatch] = []
    cur = None
    for line in text.splitlines():
        if line.startswith("diff --git "):
            cur = FilePatch(None, None)
            patches.append(cur)
            m = re.match(r"diff --git a/(.*) b/(.*)$", line)
            cur.old_path, cur.new_path = m.group(1), m.group(2)
        elif line.startswith("new file mode"):
            cur.old_path = None
        elif line.startswith("deleted file mode"):
            cur.new_path = None
        elif line.startswith("@@"):
            m = _HUNK.match(line)
            cur.hunks.append(
                (
                    int(m.group(1)),
                    1 if m.group(2) is None else int(m.group(2)),
                    int(m.group(3)),
                    1 if m.group(4) is None else int(m.group(4)),
                )
            )
    return patches


def show(script: GitScript, rev: str, path: str) -> str:
    return script.git("show", f"{rev}:{path}")


def terminal(qualified: str) -> str:
    return qualified.rsplit(".", 1)[-1]


def innermost(keys, line: int):
    hits = [k for k in keys if k.span.start_line <= line <= k.span.end_line]
    if not hits:
        return None
    return min(hits, key=lambda k: (k.span.end_line - k.span.start_line))


def oracle_metrics(script: GitScript, identity) -> dict[tuple[str, str], dict[str, float]]:
    """Recompute all process metrics per surviving function from scratch.

    ``identity(commit_index, old_path, old_name) -> new_name`` supplies
    ground-truth function renames (return the name unchanged otherwise).
    Lineages are tracked by (path, qualified name) of the final revision.
    """
    log = script.git("log", "--first-parent", "--reverse", "--format=%H %ae %ct %P").splitlines()
    lineage: dict[tuple[str, str], int] = {}  # current (path, name) -> lineage id
    events: dict[int, list[tuple[int, str, int, int, int, int]]] = defaultdict(list)
    next_id = 0
    for ci, line in enumerate(log):
        sha, email, ct, *parents = line.split()
        parent = parents[0] if parents else None
        touched: dict[int, list[int]] = {}
        new_lineage: dict[tuple[str, str], int] = {}
        seen_new_paths = set()
        patches = commit_patches(script, parent, sha)
        old_paths = {p.old_path for p in patches}
        for patch in patches:
            old_keys = extract_functions(show(script, parent, patch.old_path), patch.old_path) if patch.old_path else []
            new_keys = extract_functions(show(script, sha, patch.new_path), patch.new_path) if patch.new_path else []
            if patch.new_path:
                seen_new_paths.add(patch.new_path)
            old_to_new = {}
            for k in old_keys:
                target = identity(ci, patch.old_path, k.qualified_name)
                match = [n for n in new_keys if n.qualified_name == target]
                if match:
                    old_to_new[k] = match[0]
            new_from_old = {v: k for k, v in old_to_new.items()}
            for n in new_keys:
                if n in new_from_old:
                    lid = lineage[(patch.old_path, new_from_old[n].qualified_name)]
                    new_lineage[(patch.new_path, n.qualified_name)] = lid
                else:
                    lid = next_id
                    next_id += 1
                    new_lineage[(patch.new_path, n.qualified_name)] = lid
                    touched[lid] = [n.span.end_line - n.span.start_line + 1, 0, 0, 1]
            counts: dict = defaultdict(lambda: [0, 0, 0])
            for os_, oc, ns, nc in patch.hunks:
                paired = min(oc, nc)
                for t in range(paired):
                    k = innermost(new_keys, ns + t)
                    if k is not None:
                        counts[k][2] += 1
                for t in range(paired, nc):
                    k = innermost(new_keys, ns + t)
                    if k is not None:
                        counts[k][0] += 1
                for t in range(paired, oc):
                    k = innermost(old_keys, os_ + t)
                    if k is not None and k in old_to_new:
                        counts[old_to_new[k]][1] += 1
            for n in new_keys:
                lid = new_lineage[(patch.new_path, n.qualified_name)]
                if lid in touched:
                    continue
                a, d, m = counts.get(n, [0, 0, 0])
                before, after = terminal(new_from_old[n].qualified_name), terminal(n.qualified_name)
                renamed = before != after and "<" not in before + after
                if a + d + m or renamed:
                    touched[lid] = [a, d, m, 0]
        # unchanged files keep their lineages
        for (path, name), lid in lineage.items():
            if path in seen_new_paths or path in old_paths:
                continue
            new_lineage[(path, name)] = lid
        lineage = new_lineage
        co = len(touched) - 1
        for lid, (a, d, m, _) in touched.items():
            events[lid].append((int(ct), email.lower(), a, d, m, co))

    out = {}
    for key, lid in lineage.items():
        ev = events[lid]
        adds = [e[2] for e in ev]
        dels = [e[3] for e in ev]
        mods = [e[4] for e in ev]
        emts = [e[5] for e in ev]
        times = [e[0] for e in ev]
        authors = [e[1] for e in ev]
        n = len(ev)

        def avg(vals):
            nz = [v for v in vals if v > 0]
            return sum(nz) / len(nz) if nz else 0.0

        out[key] = {
            "AVGNOAL": avg(adds),
            "AVGNODL": avg(dels),
            "AVGNOEMT": sum(emts) / n if n else 0.0,
            "AVGNOML": avg(mods),
            "AVGTBC": (times[-1] - times[0]) / (n - 1) if n >= 2 else 0.0,
            "CChurn": sum(adds) - sum(dels),
            "MNOAL": max(adds, default=0),
            "MNODL": max(dels, default=0),
            "MNOEMT": max(emts, default=0),
            "MNOML": max(mods, default=0),
            "NOADD": sum(1 for v in adds if v > 0),
            "NOCC": sum(1 for x, y in zip(authors, authors[1:]) if x != y),
            "NOCHG": n,
            "NOContr": len(set(authors)),
            "NODEL": sum(1 for v in dels if v > 0),
            "NOMOD": sum(1 for v in mods if v > 0),
            "SOADD": sum(adds),
            "SODEL": sum(dels),
            "SOMOD": sum(mods),
        }
    return out


# -- synthetic project for end-to-end runs -------------------------------------


def _function_text(name: str, risky: bool, size: int, rev: int) -> str:
    body = [f"  var out = {rev};"]
    for i in range(size):
        if risky and i % 2 == 0:
            body.append(f"  if (input.k{i} && out > {i}) {{ out += input.k{i}; }}")
        else:
            body.append(f"  out = out * {i + 2} + {rev};")
    if risky:
        body.append("  node.innerHTML = '<b>' + input.html + out + '</b>';")
    body.append("  return out;")
    return f"function {name}(input, node) {{\n" + "\n".join(body) + "\n}\n"


def synthetic_project(path: str, seed: int = 0, files: int = 6, per_file: int = 20):
    """Scripted repository whose last commit patches the ``risky`` functions.

    Returns ``(script, fix_sha)``. Risky functions are larger, branchier and
    edited more often, so features carry signal about the labels.
    """
    import random

    rng = random.Random(seed)
    g = GitScript(path)
    plan = {}
    for f in range(files):
        for k in range(per_file):
            risky = rng.random() < 0.25
            plan[(f, k)] = [risky, rng.randint(4, 9) if risky else rng.randint(1, 5), 0]

    def render(f: int, fixed: bool = False) -> str:
        parts = []
        for k in range(per_file):
            risky, size, rev = plan[(f, k)]
            text = _function_text(f"f{f}_{k}", risky, size, rev)
            if fixed and risky:
                text = text.replace("node.innerHTML", "node.textContent")
            parts.append(text)
        return "\n".join(parts)

    authors = list(AUTHORS)
    for f in range(files):
        g.write(f"src/m{f}.js", render(f))
    g.commit("initial", "ann")
    for step in range(8):
        touched = set()
        for (f, k), entry in plan.items():
            if rng.random() < (0.5 if entry[0] else 0.1):
                entry[2] += 1
                touched.add(f)
        for f in sorted(touched):
            g.write(f"src/m{f}.js", render(f))
        g.commit(f"step {step}", authors[step % 3], gap=3600 * (1 + step))
    for f in range(files):
        g.write(f"src/m{f}.js", render(f, fixed=True))
    fix = g.commit("escape html", "bob")
    return g, fix
