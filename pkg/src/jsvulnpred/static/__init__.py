"""Static source-code metrics: 42 values per function."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field, fields
from typing import Iterable

from ..errors import ConfigError
from ..inventory.functions import FunctionKey, SourceFile
from .clones import CloneMetrics, clones
from .complexity import DEFAULT_CONSTRUCTS, ComplexityConfig, complexity
from .halstead import Halstead, halstead
from .invocations import invocations
from .lint import Ruleset, Warnings, lint
from .size import own_token_indices, size_and_comments

KEY_COLUMNS = ["path", "qualified_name", "start_line", "end_line"]


@dataclass(frozen=True)
class StaticVector:
    CC: float
    CCL: int
    CCO: int
    CI: int
    CLC: float
    LDC: int
    McCC: int
    CYCL: int
    NII: int
    NL: int
    NLE: int
    NOI: int
    CD: float
    TCD: float
    CLOC: int
    TCLOC: int
    DLOC: int
    LLOC: int
    TLLOC: int
    LOC: int
    TLOC: int
    NOS: int
    TNOS: int
    NUMPAR: int
    PARAMS: int
    HOR_D: int
    HOR_T: int
    HON_D: int
    HON_T: int
    HLEN: int
    HVOC: int
    HDIFF: float
    HVOL: float
    HEFF: float
    HBUGS: float
    HTIME: float
    CYCL_DENS: float
    WarningInfo: int
    WarningMinor: int
    WarningMajor: int
    WarningCritical: int
    WarningBlocker: int

    def violations(self) -> list[str]:
        """Names of the structural invariants this vector breaks."""
        bad = []
        if self.HLEN != self.HOR_T + self.HON_T:
            bad.append("HLEN")
        if self.HVOC != self.HOR_D + self.HON_D:
            bad.append("HVOC")
        for total, own in (("TLLOC", "LLOC"), ("TLOC", "LOC"), ("TNOS", "NOS"), ("TCLOC", "CLOC")):
            if getattr(self, total) < getattr(self, own):
                bad.append(total)
        if self.McCC < 1:
            bad.append("McCC")
        if not 0.0 <= self.CC <= 1.0:
            bad.append("CC")
        if self.NLE > self.NL:
            bad.append("NLE")
        return bad

    def values(self) -> list:
        return [getattr(self, name) for name in STATIC_COLUMNS]


STATIC_COLUMNS = [f.name for f in fields(StaticVector)]


@dataclass
class StaticConfig:
    clone_window: int = 50
    constructs: dict[str, bool] = field(default_factory=lambda: dict(DEFAULT_CONSTRUCTS))
    severities: dict[str, str] = field(default_factory=dict)
    skip_recovered: bool = False

    @classmethod
    def from_mapping(cls, data: dict | None) -> "StaticConfig":
        data = dict(data or {})
        unknown = set(data) - {"clone_window", "constructs", "severities", "skip_recovered"}
        if unknown:
            raise ConfigError(f"unknown static config keys: {sorted(unknown)}")
        constructs = dict(DEFAULT_CONSTRUCTS)
        for name, on in (data.get("constructs") or {}).items():
            if name not in DEFAULT_CONSTRUCTS:
                raise ConfigError(f"unknown complexity construct {name!r}")
            constructs[name] = bool(on)
        width = data.get("clone_window", 50)
        if not isinstance(width, int) or width < 1:
            raise ConfigError("clone_window must be a positive integer")
        severities = dict(data.get("severities") or {})
        Ruleset.from_mapping(severities)  # validate early
        return cls(width, constructs, severities, bool(data.get("skip_recovered", False)))

    @property
    def complexity(self) -> ComplexityConfig:
        return ComplexityConfig(dict(self.constructs))

    @property
    def ruleset(self) -> Ruleset:
        return Ruleset.from_mapping(self.severities)


def compute_static(
    files: list[SourceFile], config: StaticConfig | None = None
) -> list[tuple[FunctionKey, StaticVector]]:
    """Static vectors for every function of a project, in file then source order."""
    config = config or StaticConfig()
    if config.skip_recovered:
        files = [sf for sf in files if not sf.recovered]
    cc_config = config.complexity
    ruleset = config.ruleset
    graph = invocations(files)
    clone_report = clones(files, config.clone_window, cc_config)
    rows = []
    for fi, sf in enumerate(files):
        for k, info in enumerate(sf.functions):
            size = size_and_comments(sf, info)
            cx = complexity(info.node, size.LLOC, cc_config)
            hal: Halstead = halstead(sf.tokens[i] for i in own_token_indices(sf, info))
            cl: CloneMetrics = clone_report.metrics[(fi, k)]
            warn: Warnings = lint(info.node, ruleset)
            vec = StaticVector(
                **asdict(cl),
                McCC=cx.McCC,
                CYCL=cx.McCC,
                NII=graph.nii.get((fi, k), 0),
                NL=cx.NL,
                NLE=cx.NLE,
                NOI=graph.noi.get((fi, k), 0),
                CD=size.CD,
                TCD=size.TCD,
                CLOC=size.CLOC,
                TCLOC=size.TCLOC,
                DLOC=size.DLOC,
                LLOC=size.LLOC,
                TLLOC=size.TLLOC,
                LOC=size.LOC,
                TLOC=size.TLOC,
                NOS=size.NOS,
                TNOS=size.TNOS,
                NUMPAR=size.NUMPAR,
                PARAMS=size.NUMPAR,
                **asdict(hal),
                CYCL_DENS=cx.CYCL_DENS,
                **asdict(warn),
            )
            rows.append((info.key, vec))
    return rows


def format_value(value) -> str:
    if isinstance(value, float):
        return repr(round(value, 10))
    return str(value)


def static_csv(rows: Iterable[tuple[FunctionKey, StaticVector]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(KEY_COLUMNS + STATIC_COLUMNS)
    for key, vec in rows:
        writer.writerow(
            [key.file_path, key.qualified_name, key.span.start_line, key.span.end_line]
            + [format_value(v) for v in vec.values()]
        )
    return buf.getvalue()


__all__ = [
    "KEY_COLUMNS",
    "STATIC_COLUMNS",
    "StaticConfig",
    "StaticVector",
    "compute_static",
    "static_csv",
]
