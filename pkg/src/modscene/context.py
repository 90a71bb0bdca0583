"""Context repository: per-element class summaries and the compiled context block.

Each element's summary records its class name, variables (name, current
literal value, description) and functions (name, args, return, description).
The compiled block is what central-module prompts receive so the central
code can instantiate classes and call element functions it has never seen
the source of.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EngineError


@dataclass
class VariableInfo:
    name: str
    initial_value: str  # literal text as written in the code
    description: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "initial_value": self.initial_value, "description": self.description}

    @classmethod
    def from_dict(cls, d: dict) -> "VariableInfo":
        return cls(name=d["name"], initial_value=str(d["initial_value"]), description=d.get("description", ""))


@dataclass
class FunctionInfo:
    name: str
    args: list[tuple[str, str]] = field(default_factory=list)  # (name, type/semantic hint)
    return_value: str = "none"
    description: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "args": [{"name": n, "hint": h} for n, h in self.args],
            "return": self.return_value,
            "description": self.description,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FunctionInfo":
        return cls(
            name=d["name"],
            args=[(a["name"], a.get("hint", "")) for a in d.get("args", [])],
            return_value=d.get("return", "none"),
            description=d.get("description", ""),
        )


@dataclass
class ClassSummary:
    element: str  # element id; "" until bound by the caller
    class_name: str
    variables: list[VariableInfo] = field(default_factory=list)
    functions: list[FunctionInfo] = field(default_factory=list)

    def variable_names(self) -> set[str]:
        return {v.name for v in self.variables}

    def function_names(self) -> set[str]:
        return {f.name for f in self.functions}

    def get_variable(self, name: str) -> VariableInfo | None:
        for v in self.variables:
            if v.name == name:
                return v
        return None

    def get_function(self, name: str) -> FunctionInfo | None:
        for f in self.functions:
            if f.name == name:
                return f
        return None

    def to_dict(self) -> dict:
        return {
            "element": self.element,
            "class_name": self.class_name,
            "variables": [v.to_dict() for v in self.variables],
            "functions": [f.to_dict() for f in self.functions],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClassSummary":
        return cls(
            element=d.get("element", ""),
            class_name=d["class_name"],
            variables=[VariableInfo.from_dict(v) for v in d.get("variables", [])],
            functions=[FunctionInfo.from_dict(f) for f in d.get("functions", [])],
        )


@dataclass
class DiffReport:
    """Name-keyed field-wise diff between two summaries.

    Renames show up as remove+add; there is no rename detection.
    """

    element: str
    added_variables: list[str] = field(default_factory=list)
    removed_variables: list[str] = field(default_factory=list)
    changed_variables: list[str] = field(default_factory=list)
    added_functions: list[str] = field(default_factory=list)
    removed_functions: list[str] = field(default_factory=list)
    changed_functions: list[str] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not (
            self.added_variables or self.removed_variables or self.changed_variables
            or self.added_functions or self.removed_functions or self.changed_functions
        )

    def to_dict(self) -> dict:
        return {
            "element": self.element,
            "added_variables": self.added_variables,
            "removed_variables": self.removed_variables,
            "changed_variables": self.changed_variables,
            "added_functions": self.added_functions,
            "removed_functions": self.removed_functions,
            "changed_functions": self.changed_functions,
        }


def _diff(element: str, old: ClassSummary | None, new: ClassSummary) -> DiffReport:
    report = DiffReport(element=element)
    old_vars = {v.name: v for v in old.variables} if old else {}
    new_vars = {v.name: v for v in new.variables}
    for name in new_vars:
        if name not in old_vars:
            report.added_variables.append(name)
        elif old_vars[name] != new_vars[name]:
            report.changed_variables.append(name)
    report.removed_variables.extend(n for n in old_vars if n not in new_vars)

    old_fns = {f.name: f for f in old.functions} if old else {}
    new_fns = {f.name: f for f in new.functions}
    for name in new_fns:
        if name not in old_fns:
            report.added_functions.append(name)
        elif old_fns[name] != new_fns[name]:
            report.changed_functions.append(name)
    report.removed_functions.extend(n for n in old_fns if n not in new_fns)
    return report


class ContextRepository:
    """Summaries keyed by element id, kept in element creation order."""

    def __init__(self):
        self.summaries: dict[str, ClassSummary] = {}
        self.order: list[str] = []

    def get(self, element_id: str) -> ClassSummary | None:
        return self.summaries.get(element_id)

    def upsert_summary(self, element_id: str, element_name: str, summary: ClassSummary) -> DiffReport:
        if summary.class_name != element_name:
            raise EngineError(
                "name-mismatch",
                f"summary class_name {summary.class_name!r} does not match element name {element_name!r}",
            )
        summary.element = element_id
        prior = self.summaries.get(element_id)
        report = _diff(element_id, prior, summary)
        self.summaries[element_id] = summary
        if element_id not in self.order:
            self.order.append(element_id)
        return report

    def remove(self, element_id: str) -> None:
        self.summaries.pop(element_id, None)
        if element_id in self.order:
            self.order.remove(element_id)

    def apply_central_deltas(
        self,
        deltas: dict[str, tuple[list[VariableInfo], list[FunctionInfo]]],
    ) -> list[DiffReport]:
        """Extend/update element summaries with central-contributed entries.

        Duplicate names overwrite (latest wins).  Every referenced element
        must already have a summary.
        """
        reports = []
        for element_id in self.order:
            if element_id not in deltas:
                continue
            new_vars, new_fns = deltas[element_id]
            prior = self.summaries[element_id]
            merged = ClassSummary(
                element=element_id,
                class_name=prior.class_name,
                variables=list(prior.variables),
                functions=list(prior.functions),
            )
            for v in new_vars:
                existing = merged.get_variable(v.name)
                if existing:
                    merged.variables[merged.variables.index(existing)] = v
                else:
                    merged.variables.append(v)
            for f in new_fns:
                existing_f = merged.get_function(f.name)
                if existing_f:
                    merged.functions[merged.functions.index(existing_f)] = f
                else:
                    merged.functions.append(f)
            reports.append(_diff(element_id, prior, merged))
            self.summaries[element_id] = merged
        unknown = set(deltas) - set(self.order)
        if unknown:
            raise EngineError("unknown-element", f"deltas reference unknown elements: {sorted(unknown)}")
        return reports

    def compile_context(self) -> str:
        """Deterministic text block consumed by central prompts.

        Pure function of repository state: same state, identical bytes.
        """
        lines = ["Scene context:"]
        for element_id in self.order:
            s = self.summaries[element_id]
            lines.append(f"class {s.class_name}")
            lines.append("  variables:")
            for v in s.variables:
                entry = f"    {v.name} = {v.initial_value}"
                if v.description:
                    entry += f" -- {v.description}"
                lines.append(entry)
            lines.append("  functions:")
            for f in s.functions:
                rendered_args = ", ".join(f"{n}: {h}" if h else n for n, h in f.args)
                entry = f"    {f.name}({rendered_args}) -> {f.return_value}"
                if f.description:
                    entry += f" -- {f.description}"
                lines.append(entry)
        return "\n".join(lines)

    def to_list(self) -> list[dict]:
        return [self.summaries[i].to_dict() for i in self.order]

    @classmethod
    def from_list(cls, records: list[dict]) -> "ContextRepository":
        repo = cls()
        for r in records:
            summary = ClassSummary.from_dict(r)
            repo.summaries[summary.element] = summary
            repo.order.append(summary.element)
        return repo
