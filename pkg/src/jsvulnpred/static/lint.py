"""Small built-in lint engine with a configurable severity map.

Each rule inspects the nodes owned by one function (nested functions are
checked on their own) and reports one hit per offending construct. Hits are
counted per severity bucket.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator

from ..errors import ConfigError
from ..inventory.parser import Node
from .complexity import own_nodes

SEVERITIES = ("info", "minor", "major", "critical", "blocker")
OFF = "off"

DEFAULT_SEVERITY = {
    "no-eval": "critical",
    "no-implied-eval": "critical",
    "no-new-func": "critical",
    "no-inner-html": "blocker",
    "no-document-write": "blocker",
    "eqeqeq": "minor",
    "no-empty-catch": "minor",
    "no-proto": "minor",
    "no-throw-literal": "minor",
    "no-with": "major",
    "no-cond-assign": "major",
    "no-debugger": "major",
    "no-caller": "major",
    "no-unused-params": "info",
    "no-var": "info",
    "no-console": "info",
    "max-params": "info",
}

MAX_PARAMS = 5


def _unparen(node: Node | None) -> Node | None:
    while node is not None and node.type == "Paren":
        node = node.expression
    return node


def _is_ident(node: Node | None, *names: str) -> bool:
    node = _unparen(node)
    return node is not None and node.type == "Identifier" and node.name in names


def _prop_name(member: Node) -> str | None:
    prop = member.property
    if not member.computed:
        return prop.name
    if prop.type == "Literal" and prop.value[:1] in "'\"":
        return prop.value[1:-1]
    return None


def _is_string(node: Node | None) -> bool:
    node = _unparen(node)
    if node is None:
        return False
    if node.type == "Literal":
        return node.value[:1] in "'\""
    return node.type == "Template"


def _calls(nodes, names: tuple[str, ...]) -> Iterator[Node]:
    for node in nodes:
        if node.type == "Call":
            callee = _unparen(node.callee)
            if callee.type == "Identifier" and callee.name in names:
                yield node
            elif callee.type == "Member" and _prop_name(callee) in names and _is_ident(
                callee.object, "window", "globalThis", "global", "self"
            ):
                yield node


def rule_no_eval(fn: Node, nodes: list[Node]) -> int:
    return sum(1 for _ in _calls(nodes, ("eval",)))


def rule_no_implied_eval(fn: Node, nodes: list[Node]) -> int:
    return sum(
        1
        for call in _calls(nodes, ("setTimeout", "setInterval", "execScript"))
        if call.arguments and _is_string(call.arguments[0])
    )


def rule_no_new_func(fn: Node, nodes: list[Node]) -> int:
    return sum(1 for n in nodes if n.type in ("New", "Call") and _is_ident(n.callee, "Function"))


def rule_eqeqeq(fn: Node, nodes: list[Node]) -> int:
    return sum(1 for n in nodes if n.type == "Binary" and n.op in ("==", "!="))


def rule_no_empty_catch(fn: Node, nodes: list[Node]) -> int:
    return sum(1 for n in nodes if n.type == "Catch" and not n.body.body)


def rule_no_proto(fn: Node, nodes: list[Node]) -> int:
    return sum(1 for n in nodes if n.type == "Member" and _prop_name(n) == "__proto__")


def rule_no_throw_literal(fn: Node, nodes: list[Node]) -> int:
    return sum(
        1
        for n in nodes
        if n.type == "Throw" and _unparen(n.argument).type in ("Literal", "Template")
    )


def rule_no_with(fn: Node, nodes: list[Node]) -> int:
    return sum(1 for n in nodes if n.type == "With")


def rule_no_cond_assign(fn: Node, nodes: list[Node]) -> int:
    # a parenthesized assignment is taken as intentional
    return sum(
        1
        for n in nodes
        if n.type in ("If", "While", "DoWhile", "For", "Conditional")
        and n.get("test") is not None
        and n.test.type == "Assign"
    )


def rule_no_debugger(fn: Node, nodes: list[Node]) -> int:
    return sum(1 for n in nodes if n.type == "Debugger")


def rule_no_caller(fn: Node, nodes: list[Node]) -> int:
    return sum(
        1
        for n in nodes
        if n.type == "Member"
        and _prop_name(n) in ("callee", "caller")
        and _is_ident(n.object, "arguments")
    )


def _bound_names(param: Node) -> Iterator[str]:
    param = _unparen(param)
    if param.type == "Identifier":
        yield param.name
    elif param.type == "Assign":
        yield from _bound_names(param.target)
    elif param.type in ("Rest", "Spread"):
        yield from _bound_names(param.argument)
    elif param.type == "Array":
        for item in param.elements:
            if item is not None:
                yield from _bound_names(item)
    elif param.type == "Object":
        for prop in param.properties:
            if prop.type == "Property" and prop.get("shorthand") and prop.key.type == "Key":
                yield prop.key.name
            elif prop.type == "Property":
                yield from _bound_names(prop.value)
            else:
                yield from _bound_names(prop)


def _referenced_names(node: Node) -> set[str]:
    names = set()
    stack = [node]
    while stack:
        cur = stack.pop()
        if cur.type == "Identifier":
            names.add(cur.name)
        elif cur.type == "Property" and cur.get("shorthand") and cur.key.type == "Key":
            names.add(cur.key.name)
        elif cur.type == "Member" and not cur.computed:
            stack.append(cur.object)
            continue
        stack.extend(cur.children())
    return names


def rule_no_unused_params(fn: Node, nodes: list[Node]) -> int:
    declared = [name for p in fn.params for name in _bound_names(p)]
    if not declared:
        return 0
    used = _referenced_names(fn.body)
    for p in fn.params:
        # defaults may refer to earlier parameters
        p = _unparen(p)
        if p.type == "Assign":
            used |= _referenced_names(p.value)
    return sum(1 for name in declared if name not in used)


def rule_no_var(fn: Node, nodes: list[Node]) -> int:
    return sum(1 for n in nodes if n.type == "VarDecl" and n.kind == "var")


def rule_no_console(fn: Node, nodes: list[Node]) -> int:
    return sum(
        1
        for n in nodes
        if n.type == "Call"
        and _unparen(n.callee).type == "Member"
        and _is_ident(_unparen(n.callee).object, "console")
    )


def rule_max_params(fn: Node, nodes: list[Node]) -> int:
    return 1 if len(fn.params) > MAX_PARAMS else 0


def rule_no_inner_html(fn: Node, nodes: list[Node]) -> int:
    return sum(
        1
        for n in nodes
        if n.type == "Assign"
        and _unparen(n.target).type == "Member"
        and _prop_name(_unparen(n.target)) in ("innerHTML", "outerHTML")
    )


def rule_no_document_write(fn: Node, nodes: list[Node]) -> int:
    return sum(
        1
        for n in nodes
        if n.type == "Call"
        and _unparen(n.callee).type == "Member"
        and _prop_name(_unparen(n.callee)) in ("write", "writeln")
        and _is_ident(_unparen(n.callee).object, "document")
    )


RULES: dict[str, Callable[[Node, list[Node]], int]] = {
    "no-eval": rule_no_eval,
    "no-implied-eval": rule_no_implied_eval,
    "no-new-func": rule_no_new_func,
    "no-inner-html": rule_no_inner_html,
    "no-document-write": rule_no_document_write,
    "eqeqeq": rule_eqeqeq,
    "no-empty-catch": rule_no_empty_catch,
    "no-proto": rule_no_proto,
    "no-throw-literal": rule_no_throw_literal,
    "no-with": rule_no_with,
    "no-cond-assign": rule_no_cond_assign,
    "no-debugger": rule_no_debugger,
    "no-caller": rule_no_caller,
    "no-unused-params": rule_no_unused_params,
    "no-var": rule_no_var,
    "no-console": rule_no_console,
    "max-params": rule_max_params,
}


@dataclass(frozen=True)
class Ruleset:
    severity: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_SEVERITY))

    @classmethod
    def from_mapping(cls, overrides: dict[str, str] | None) -> "Ruleset":
        """Defaults updated with ``overrides``; unknown rules or severities raise."""
        severity = dict(DEFAULT_SEVERITY)
        for rule, level in (overrides or {}).items():
            if rule not in RULES:
                raise ConfigError(f"unknown lint rule {rule!r}")
            level = str(level).lower()
            if level not in SEVERITIES and level != OFF:
                raise ConfigError(f"unknown severity {level!r} for rule {rule!r}")
            severity[rule] = level
        return cls(severity)


@dataclass(frozen=True)
class Warnings:
    WarningInfo: int = 0
    WarningMinor: int = 0
    WarningMajor: int = 0
    WarningCritical: int = 0
    WarningBlocker: int = 0


def rule_hits(fn: Node) -> dict[str, int]:
    nodes = list(own_nodes(fn))
    return {name: rule(fn, nodes) for name, rule in RULES.items()}


def lint(fn: Node, ruleset: Ruleset | None = None) -> Warnings:
    ruleset = ruleset or Ruleset()
    buckets = dict.fromkeys(SEVERITIES, 0)
    for name, hits in rule_hits(fn).items():
        level = ruleset.severity.get(name, OFF)
        if level != OFF:
            buckets[level] += hits
    return Warnings(
        WarningInfo=buckets["info"],
        WarningMinor=buckets["minor"],
        WarningMajor=buckets["major"],
        WarningCritical=buckets["critical"],
        WarningBlocker=buckets["blocker"],
    )
