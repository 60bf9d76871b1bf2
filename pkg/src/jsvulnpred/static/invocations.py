"""Name-based call graph over a project inventory.

A call is resolved by the terminal name of its callee. For a plain name,
candidates are searched from the innermost enclosing function outwards
among functions declared at that level of the same file; if none is found,
or the callee is a member access, every project function with that name
is a candidate. All candidates of a call are
credited (deliberate over-approximation).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from ..inventory.functions import SourceFile
from ..inventory.parser import Node

FnId = tuple[int, int]  # (file index, function index)


@dataclass(frozen=True)
class CallSite:
    file: int
    caller: int | None  # innermost function containing the call
    name: str
    token: int
    member: bool = False


def _callee(call: Node) -> Node:
    callee = call.callee
    while callee.type == "Paren":
        callee = callee.expression
    return callee


def callee_name(call: Node, sf: SourceFile) -> str | None:
    callee = _callee(call)
    if callee.type == "Identifier":
        return callee.name
    if callee.type == "Member":
        if not callee.computed:
            return callee.property.name
        prop = callee.property
        if prop.type == "Literal" and prop.value[:1] in "'\"":
            return prop.value[1:-1]
    return None


def _own_calls(root: Node) -> list[Node]:
    calls = []
    stack = list(root.children())
    while stack:
        node = stack.pop()
        if node.type == "Function":
            continue
        if node.type == "Call":
            calls.append(node)
        stack.extend(node.children())
    return calls


def call_sites(files: list[SourceFile]) -> list[CallSite]:
    sites = []
    for fi, sf in enumerate(files):
        owners: list[tuple[int | None, Node]] = [(None, sf.program)]
        owners += [(k, info.node) for k, info in enumerate(sf.functions)]
        for caller, root in owners:
            for call in _own_calls(root):
                name = callee_name(call, sf)
                if name is not None:
                    member = _callee(call).type == "Member"
                    sites.append(CallSite(fi, caller, name, call.start, member))
    sites.sort(key=lambda s: (s.file, s.token))
    return sites


class CallResolver:
    def __init__(self, files: list[SourceFile]):
        self.files = files
        # (file, parent function or None, name) -> functions declared there
        self.local: dict[tuple[int, int | None, str], list[int]] = defaultdict(list)
        self.by_name: dict[str, list[FnId]] = defaultdict(list)
        for fi, sf in enumerate(files):
            for k, info in enumerate(sf.functions):
                if info.synthetic:
                    continue
                self.local[(fi, info.parent, info.name)].append(k)
                self.by_name[info.name].append((fi, k))

    def resolve(self, site: CallSite) -> list[FnId]:
        functions = self.files[site.file].functions
        level = site.caller
        while not site.member:
            found = self.local.get((site.file, level, site.name))
            if found:
                return [(site.file, k) for k in found]
            if level is None:
                break
            level = functions[level].parent
        return list(self.by_name.get(site.name, []))


@dataclass
class CallGraph:
    noi: dict[FnId, int]
    nii: dict[FnId, int]
    edges: list[tuple[FnId | None, FnId]]


def invocations(files: list[SourceFile]) -> CallGraph:
    """NOI and NII for every function of the project."""
    resolver = CallResolver(files)
    noi: dict[FnId, int] = defaultdict(int)
    nii: dict[FnId, int] = defaultdict(int)
    edges = []
    for site in call_sites(files):
        targets = resolver.resolve(site)
        if not targets:
            continue
        caller = (site.file, site.caller) if site.caller is not None else None
        if caller is not None:
            noi[caller] += 1
        for target in targets:
            nii[target] += 1
            edges.append((caller, target))
    return CallGraph(dict(noi), dict(nii), edges)
