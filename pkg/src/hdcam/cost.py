"""Operation-level energy and latency accounting.

Defaults reproduce a 7 nm characterization of the SOT-CAM macro next to an
all-CMOS RTL baseline (cycle time 0.5 ns). The CMOS "net" energy folds in the
memory-to-compute transfers an off-memory implementation needs; one 2048-bit
vector read costs 0.411 nJ.

Charging granularity: "addition" is one whole-accumulator update (one adder
pass, subtractions charged the same), "multiplication", "permutation" and
"search" are one whole-vector operation each. In-array energy scales with
the active bank count (dim / 2048); latency does not, because banks operate
in parallel. CMOS charges are kept at reference width.
"""

from dataclasses import dataclass, field

from .errors import ConfigError
from .hvcore import check_alignment

OP_KINDS = ("addition", "permutation", "multiplication", "search")


@dataclass(frozen=True)
class OpCost:
    hydra_latency_ns: float
    hydra_energy_pj: float
    cmos_cycles: int
    cmos_energy_pj: float
    cmos_net_energy_pj: float

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def _default_ops():
    return {
        "addition": OpCost(0.462, 41.08, 385, 61.9, 883.9),
        "permutation": OpCost(15.36, 0.752, 193, 4.66, 415.66),
        "multiplication": OpCost(1.548, 569.0, 385, 3.235, 828.47),
        "search": OpCost(0.985, 14.65, 1922, 29.65, 4139.7),
    }


@dataclass
class CostTable:
    """Per-operation constants plus the shared scaling parameters."""

    ops: dict = field(default_factory=_default_ops)
    mem_read_energy_nj: float = 0.411
    cmos_cycle_ns: float = 0.5
    reference_dim: int = 2048

    def __post_init__(self):
        missing = [op for op in OP_KINDS if op not in self.ops]
        if missing:
            raise ConfigError(f"cost table is missing ops: {missing}")
        if self.mem_read_energy_nj <= 0 or self.cmos_cycle_ns <= 0 or self.reference_dim <= 0:
            raise ValueError("table scaling constants must be positive")


def ratios_vs_cmos(table=None):
    """Per-op CMOS / in-array energy ratios (direct and net)."""
    table = table or CostTable()
    out = {}
    for op in OP_KINDS:
        c = table.ops[op]
        out[op] = {
            "energy_ratio": c.cmos_energy_pj / c.hydra_energy_pj,
            "net_energy_ratio": c.cmos_net_energy_pj / c.hydra_energy_pj,
        }
    return out


@dataclass
class CostLedger:
    """Operation counts for one vector width; costs are derived, so merging
    ledgers and scaling with width stay exact."""

    active_dim: int
    table: CostTable = field(default_factory=CostTable)
    counts: dict = field(default_factory=dict)

    def __post_init__(self):
        check_alignment(self.active_dim)
        for op in self.counts:
            if op not in self.table.ops:
                raise ConfigError(f"unknown op kind: {op!r}")

    def charge(self, op_kind, count=1):
        if op_kind not in self.table.ops:
            raise ConfigError(f"unknown op kind: {op_kind!r}")
        if count < 0:
            raise ValueError("count must be non-negative")
        if count:
            self.counts[op_kind] = self.counts.get(op_kind, 0) + count
        return self

    def count(self, op_kind):
        return self.counts.get(op_kind, 0)

    def merge(self, other):
        if self.active_dim != other.active_dim:
            raise ConfigError("cannot merge ledgers with different active dims")
        merged = dict(self.counts)
        for op, n in other.counts.items():
            merged[op] = merged.get(op, 0) + n
        return CostLedger(self.active_dim, self.table, merged)

    def _scale(self):
        return self.active_dim / self.table.reference_dim

    @property
    def hydra_energy_pj(self):
        s = self._scale()
        return sum(n * self.table.ops[op].hydra_energy_pj * s for op, n in self.counts.items())

    @property
    def hydra_latency_ns(self):
        return sum(n * self.table.ops[op].hydra_latency_ns for op, n in self.counts.items())

    @property
    def cmos_energy_pj(self):
        return sum(n * self.table.ops[op].cmos_energy_pj for op, n in self.counts.items())

    @property
    def cmos_net_energy_pj(self):
        return sum(n * self.table.ops[op].cmos_net_energy_pj for op, n in self.counts.items())

    @property
    def cmos_latency_ns(self):
        return sum(
            n * self.table.ops[op].cmos_cycles * self.table.cmos_cycle_ns
            for op, n in self.counts.items()
        )


def tally(ledger, op_kind, count, dim=None):
    """Charged copy of the ledger; dim, when given, must match the ledger's."""
    if dim is not None:
        check_alignment(dim)
        if dim != ledger.active_dim:
            raise ConfigError(
                f"ledger is bound to dim {ledger.active_dim}, cannot tally at dim {dim}"
            )
    out = CostLedger(ledger.active_dim, ledger.table, dict(ledger.counts))
    out.charge(op_kind, count)
    return out


@dataclass
class CostReport:
    """Totals, per-op breakdown, and the implied query rate of a ledger."""

    active_dim: int
    counts: dict
    hydra_energy_pj: float
    hydra_latency_ns: float
    cmos_energy_pj: float
    cmos_net_energy_pj: float
    cmos_latency_ns: float
    hydra_queries_per_s: float
    per_op: dict

    def as_dict(self):
        flat = {
            "active_dim": self.active_dim,
            "hydra_energy_pj": self.hydra_energy_pj,
            "hydra_latency_ns": self.hydra_latency_ns,
            "cmos_energy_pj": self.cmos_energy_pj,
            "cmos_net_energy_pj": self.cmos_net_energy_pj,
            "cmos_latency_ns": self.cmos_latency_ns,
            "hydra_queries_per_s": self.hydra_queries_per_s,
        }
        for op in OP_KINDS:
            flat[f"count_{op}"] = self.counts.get(op, 0)
        return flat

    def to_text(self):
        lines = [
            f"active dim: {self.active_dim}",
            f"in-array energy: {self.hydra_energy_pj:.3f} pJ, latency: {self.hydra_latency_ns:.3f} ns",
            f"all-CMOS energy: {self.cmos_energy_pj:.3f} pJ (net {self.cmos_net_energy_pj:.3f} pJ), "
            f"latency: {self.cmos_latency_ns:.3f} ns",
            f"implied queries/s: {self.hydra_queries_per_s:.0f}",
        ]
        for op in OP_KINDS:
            d = self.per_op[op]
            lines.append(
                f"  {op}: x{d['count']} -> {d['hydra_energy_pj']:.3f} pJ in-array, "
                f"{d['cmos_net_energy_pj']:.3f} pJ CMOS net"
            )
        return "\n".join(lines)


def report(ledger):
    """Structured cost summary of a ledger."""
    s = ledger.active_dim / ledger.table.reference_dim
    per_op = {}
    for op in OP_KINDS:
        n = ledger.counts.get(op, 0)
        c = ledger.table.ops[op]
        per_op[op] = {
            "count": n,
            "hydra_energy_pj": n * c.hydra_energy_pj * s,
            "hydra_latency_ns": n * c.hydra_latency_ns,
            "cmos_energy_pj": n * c.cmos_energy_pj,
            "cmos_net_energy_pj": n * c.cmos_net_energy_pj,
        }
    searches = ledger.counts.get("search", 0)
    latency_s = ledger.hydra_latency_ns * 1e-9
    qps = searches / latency_s if searches and latency_s > 0 else 0.0
    return CostReport(
        active_dim=ledger.active_dim,
        counts=dict(ledger.counts),
        hydra_energy_pj=ledger.hydra_energy_pj,
        hydra_latency_ns=ledger.hydra_latency_ns,
        cmos_energy_pj=ledger.cmos_energy_pj,
        cmos_net_energy_pj=ledger.cmos_net_energy_pj,
        cmos_latency_ns=ledger.cmos_latency_ns,
        hydra_queries_per_s=qps,
        per_op=per_op,
    )
