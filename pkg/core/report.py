from dataclasses import dataclass, field as dc_field
from typing import Any, Dict, List, Optional

from core.math import ScalarField


@dataclass
class CheckRecord:
    """Outcome of one named identity, aggregated over all its instances."""
    name: str
    residual: Any
    witness: Optional[Dict[str, Any]] = None
    instances: int = 0
    passed: bool = True
    detail: str = ""


@dataclass
class CheckReport:
    """
    Per-check records with the largest residual and the witness that produced it.

    Args:
        field: Decides what counts as passing (residual == 0 exact, <= tol float)
        title: Name printed in reports
    """
    field: ScalarField
    title: str = "check"
    records: Dict[str, CheckRecord] = dc_field(default_factory=dict)
    notes: Dict[str, Any] = dc_field(default_factory=dict)

    def observe(self, name: str, residual, witness: Optional[Dict[str, Any]] = None):
        """Fold one instance of a check into its record, keeping the worst residual."""
        record = self.records.get(name)
        if record is None:
            record = CheckRecord(name, residual, witness if not self.field.passes(residual) else None)
            self.records[name] = record
        elif residual > record.residual:
            record.residual = residual
            if not self.field.passes(residual):
                record.witness = witness
        record.instances += 1
        record.passed = self.field.passes(record.residual)
        return record

    def declare(self, name: str, residual=None):
        """Register a check that may have no instances at all."""
        if name not in self.records:
            zero = self.field.residual(self.field.zero(), self.field.zero())
            self.records[name] = CheckRecord(name, zero if residual is None else residual)

    def fail(self, name: str, detail: str, witness: Optional[Dict[str, Any]] = None):
        """Record a structural failure that has no numeric residual."""
        self.declare(name)
        record = self.records[name]
        record.passed = False
        record.detail = detail
        record.witness = witness
        record.instances += 1

    def merge(self, other: "CheckReport", prefix: str = ""):
        for name, record in other.records.items():
            key = prefix + name
            if key in self.records:
                mine = self.records[key]
                if record.residual > mine.residual:
                    mine.residual, mine.witness = record.residual, record.witness
                mine.instances += record.instances
                mine.passed = mine.passed and record.passed
            else:
                self.records[key] = CheckRecord(key, record.residual, record.witness,
                                                record.instances, record.passed, record.detail)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records.values())

    @property
    def max_residual(self):
        zero = self.field.residual(self.field.zero(), self.field.zero())
        return max((r.residual for r in self.records.values()), default=zero)

    def failures(self) -> List[CheckRecord]:
        return [r for r in self.records.values() if not r.passed]

    def __getitem__(self, name: str) -> CheckRecord:
        return self.records[name]

    def __contains__(self, name: str) -> bool:
        return name in self.records

    def _residual_json(self, residual):
        return str(residual) if self.field.exact else float(residual)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "title": self.title,
            "mode": self.field.mode,
            "tolerance": None if self.field.exact else self.field.tolerance,
            "passed": self.passed,
            "max_residual": self._residual_json(self.max_residual),
            "notes": self.notes,
            "checks": [
                {
                    "name": r.name,
                    "passed": r.passed,
                    "residual": self._residual_json(r.residual),
                    "instances": r.instances,
                    "witness": r.witness,
                    "detail": r.detail,
                }
                for r in self.records.values()
            ],
        }

    def render_text(self) -> str:
        lines = [f"{self.title}: {'PASS' if self.passed else 'FAIL'} "
                 f"(mode={self.field.mode}, max residual={self._residual_json(self.max_residual)})"]
        for r in self.records.values():
            status = "ok  " if r.passed else "FAIL"
            line = f"  {status} {r.name:<24} residual={self._residual_json(r.residual)} instances={r.instances}"
            if r.detail:
                line += f" {r.detail}"
            if r.witness and not r.passed:
                line += f" witness={r.witness}"
            lines.append(line)
        for key, value in self.notes.items():
            lines.append(f"  note {key}: {value}")
        return "\n".join(lines)


class ConstraintReport(CheckReport):
    """CheckReport for families of tensor identities (constraints, Pachner variants)."""
    pass
