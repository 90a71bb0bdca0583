"""Scripted scenario replay.

A scenario is a JSON file: a project name plus an ordered list of steps
(scene edits, prompts, slider moves, snapshots, assertions). Replay runs
the steps against a fresh engine, checks code/summary coherence after
every step, and reports one line per assertion. With the mock backend a
scenario is a fully offline, exact regression test.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .engine import Engine, EngineConfig
from .errors import EngineError
from .integrator import locate_regions
from .sessions import CENTRAL


@dataclass
class ScenarioReport:
    name: str
    lines: list[str] = field(default_factory=list)
    failures: int = 0

    def record(self, ok: bool, label: str) -> None:
        self.lines.append(f"{'PASS' if ok else 'FAIL'} {label}")
        if not ok:
            self.failures += 1

    @property
    def ok(self) -> bool:
        return self.failures == 0


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class ScenarioRunner:
    def __init__(self, engine: Engine):
        self.engine = engine
        self.snapshots: dict[str, str] = {}

    def _element_id(self, ref: str) -> str:
        element = self.engine.scene.find_by_name(ref)
        if element is None:
            element = self.engine.scene.get_element(ref)  # raises unknown-element
        return element.id

    def _unit_code(self, unit: str) -> str:
        code = self.engine.code.get(unit)
        if code is None:
            raise EngineError("unknown-element", f"no code unit named {unit!r}")
        return code

    def run_step(self, step: dict, report: ScenarioReport) -> None:
        op = step.get("op")
        if op == "add-element":
            asset_bytes = None
            if step.get("asset"):
                asset_bytes = bytes.fromhex(step["asset"])  # inline test pixels, not real uploads
            self.engine.create_element(
                step["name"],
                step.get("kind", "llm-generated"),
                asset_bytes=asset_bytes,
                asset_filename=step.get("asset_filename", "asset.png"),
            )
        elif op == "delete-element":
            self.engine.delete_element(self._element_id(step["element"]))
        elif op == "add-proxy":
            self.engine.add_proxy(step["kind"], [tuple(p) for p in step["geometry"]])
        elif op == "delete-proxy":
            self.engine.delete_proxy(step["label"])
        elif op == "prompt":
            self.engine.generate(step["module"], step["text"])
        elif op == "set-slider":
            self.engine.apply_slider(self._element_id(step["element"]), step["name"], step["value"])
        elif op == "set-transform":
            self.engine.set_transform(
                self._element_id(step["element"]),
                step.get("x", 0),
                step.get("y", 0),
                step.get("rotation", 0),
                step.get("scale", 1),
            )
        elif op == "snapshot":
            self.snapshots[step["id"]] = self._unit_code(step["unit"])
        elif op == "assert":
            self._assert(step, report)
        else:
            raise EngineError("usage-error", f"unknown scenario op {op!r}")

    # -- assertions ---------------------------------------------------------

    def _assert(self, step: dict, report: ScenarioReport) -> None:
        kind = step.get("kind")
        label = step.get("label") or kind
        if kind == "file-hash":
            code = self._unit_code(step["unit"])
            if "snapshot" in step:
                want = self.snapshots.get(step["snapshot"])
                if want is None:
                    raise EngineError("usage-error", f"no snapshot {step['snapshot']!r} taken")
                ok = code == want
                detail = f"{step['unit']} sha {_sha(code)[:12]} vs snapshot {_sha(want)[:12]}"
            else:
                ok = _sha(code) == step["equals"]
                detail = f"{step['unit']} sha {_sha(code)[:12]}"
            report.record(ok, f"{label}: {detail}")
        elif kind == "file-contains":
            code = self._unit_code(step["unit"])
            present = step["text"] in code
            ok = not present if step.get("absent") else present
            report.record(ok, f"{label}: {step['text']!r} in {step['unit']}")
        elif kind == "region-contains":
            regions = locate_regions(self._unit_code(step["unit"]))
            lines = regions.function_lines() if step["region"] == "functions" else regions.variable_lines()
            ok = step["text"] in "\n".join(lines)
            report.record(ok, f"{label}: {step['text']!r} in {step['unit']} {step['region']}")
        elif kind == "session-contains":
            records = self.engine.session_records(step["module"])
            ok = any(step["text"] in str(r.get("content", "")) for r in records)
            report.record(ok, f"{label}: {step['text']!r} in {step['module']} session")
        elif kind == "manifest-value":
            rows = self.engine.slider_manifest(self._element_id(step["element"]))
            row = next((r for r in rows if r["name"] == step["name"]), None)
            if row is None:
                report.record(False, f"{label}: no slider {step['name']!r}")
                return
            got = row[step.get("field", "value")]
            ok = abs(float(got) - float(step["equals"])) <= float(step.get("tolerance", 1e-9))
            report.record(ok, f"{label}: {step['name']}.{step.get('field', 'value')} = {got}")
        elif kind == "context-has-function":
            summary = self.engine.context.get(self._element_id(step["element"]))
            ok = summary is not None and step["name"] in summary.function_names()
            report.record(ok, f"{label}: {step['element']} declares {step['name']}()")
        elif kind == "central-calls":
            code = self.engine.code[CENTRAL]
            ok = f"{step['instance']}.{step['function']}(" in code
            report.record(ok, f"{label}: central calls {step['instance']}.{step['function']}()")
        elif kind == "framework":
            ok = self.engine.framework == step["equals"]
            report.record(ok, f"{label}: framework = {self.engine.framework}")
        else:
            raise EngineError("usage-error", f"unknown assertion kind {kind!r}")


def load_scenario(path: str | Path) -> dict:
    path = Path(path)
    try:
        scenario = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise EngineError("usage-error", f"scenario file {path} does not exist") from None
    except ValueError as exc:
        raise EngineError("usage-error", f"scenario file {path} is not valid JSON: {exc}") from exc
    if not isinstance(scenario, dict) or not isinstance(scenario.get("steps"), list):
        raise EngineError("usage-error", f"scenario file {path} has no steps list")
    return scenario


def run_scenario(
    scenario_path: str | Path,
    project_dir: str | Path,
    backend,
    config: EngineConfig | None = None,
) -> ScenarioReport:
    scenario = load_scenario(scenario_path)
    name = scenario.get("name", Path(scenario_path).stem)
    report = ScenarioReport(name=name)
    engine = Engine.create(project_dir, scenario.get("project", name), backend, config)
    runner = ScenarioRunner(engine)
    for index, step in enumerate(scenario["steps"]):
        runner.run_step(step, report)
        drift = engine.coherence_report()
        if drift:
            report.record(False, f"coherence after step {index} ({step.get('op')}): " + "; ".join(drift))
    report.record(engine.coherence_report() == [], "final code/summary coherence")
    return report
