"""Scene model: elements, groups, transforms, and graphical proxies.

Holds the project's structural state independent of any generated code.
Element names double as generated class names, so they must be valid
identifiers and unique.  Proxy labels (P1, L2, C3, R4, ...) are handed out
from per-kind counters that never run backwards: a deleted label is never
reissued, so stale references in old prompts can only fail loudly, never
rebind silently.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .errors import EngineError

CANVAS_WIDTH = 800
CANVAS_HEIGHT = 600

ELEMENT_KINDS = ("uploaded-image", "drawn-sketch", "llm-generated", "group")
PROXY_KINDS = ("point", "line", "curve", "region")
PROXY_PREFIX = {"point": "P", "line": "L", "curve": "C", "region": "R"}

# Minimum geometry cardinality per kind; (exact?, n)
_GEOMETRY_RULES = {
    "point": (True, 1),
    "line": (True, 2),
    "curve": (False, 3),
    "region": (False, 3),
}

_IDENTIFIER_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")

# Kinds that carry a raster asset; groups may carry an optional seed image.
_ASSET_REQUIRED = ("uploaded-image", "drawn-sketch")


@dataclass
class Transform:
    x: float = 0.0
    y: float = 0.0
    rotation: float = 0.0  # degrees, kept in [0, 360)
    scale: float = 1.0

    def normalized(self) -> "Transform":
        """Copy with rotation folded into [0, 360)."""
        return replace(self, rotation=self.rotation % 360.0)

    def validate(self) -> None:
        if self.scale <= 0:
            raise EngineError("invalid-transform", f"scale must be > 0, got {self.scale}")

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "rotation": self.rotation, "scale": self.scale}

    @classmethod
    def from_dict(cls, d: dict) -> "Transform":
        return cls(x=d["x"], y=d["y"], rotation=d["rotation"], scale=d["scale"])


@dataclass
class AssetRef:
    path: str        # relative to the project's assets/ directory
    media_type: str

    def to_dict(self) -> dict:
        return {"path": self.path, "media_type": self.media_type}

    @classmethod
    def from_dict(cls, d: dict) -> "AssetRef":
        return cls(path=d["path"], media_type=d["media_type"])


@dataclass
class Element:
    id: str
    name: str
    kind: str
    transform: Transform = field(default_factory=Transform)
    asset: AssetRef | None = None
    members: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "kind": self.kind,
            "transform": self.transform.to_dict(),
            "asset": self.asset.to_dict() if self.asset else None,
            "members": list(self.members),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Element":
        return cls(
            id=d["id"],
            name=d["name"],
            kind=d["kind"],
            transform=Transform.from_dict(d["transform"]),
            asset=AssetRef.from_dict(d["asset"]) if d.get("asset") else None,
            members=list(d.get("members", [])),
        )


@dataclass
class GraphicalProxy:
    kind: str
    label: str
    geometry: list[tuple[float, float]]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "label": self.label,
            "geometry": [[x, y] for x, y in self.geometry],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GraphicalProxy":
        return cls(
            kind=d["kind"],
            label=d["label"],
            geometry=[(p[0], p[1]) for p in d["geometry"]],
        )


def valid_identifier(name: str) -> bool:
    return bool(_IDENTIFIER_RE.match(name))


class SceneModel:
    """Registry of elements and proxies for one project.

    Mutations are expected to arrive already serialized (the engine's
    writer lock); this class only enforces the structural invariants.
    """

    def __init__(self):
        self.elements: dict[str, Element] = {}
        self.element_order: list[str] = []
        self.proxies: dict[str, GraphicalProxy] = {}
        self.proxy_order: list[str] = []
        self.proxy_counters: dict[str, int] = {k: 0 for k in PROXY_KINDS}
        self.element_seq = 0
        self.canvas = (CANVAS_WIDTH, CANVAS_HEIGHT)

    # -- elements ---------------------------------------------------------

    def create_element(self, name: str, kind: str, asset: AssetRef | None = None) -> Element:
        if kind not in ELEMENT_KINDS:
            raise EngineError("invalid-identifier", f"unknown element kind {kind!r}")
        if not valid_identifier(name):
            raise EngineError("invalid-identifier", f"element name {name!r} is not a valid class name")
        if name.lower() == "central":
            raise EngineError("invalid-identifier", 'element name "central" is reserved for the central module')
        if any(e.name == name for e in self.elements.values()):
            raise EngineError("duplicate-name", f"an element named {name!r} already exists")
        if kind in _ASSET_REQUIRED and asset is None:
            raise EngineError("missing-asset", f"{kind} elements need an image asset")
        if kind == "llm-generated" and asset is not None:
            raise EngineError("missing-asset", "llm-generated elements take no asset")
        self.element_seq += 1
        element = Element(id=f"e{self.element_seq}", name=name, kind=kind, asset=asset)
        self.elements[element.id] = element
        self.element_order.append(element.id)
        return element

    def get_element(self, element_id: str) -> Element:
        try:
            return self.elements[element_id]
        except KeyError:
            raise EngineError("unknown-element", f"no element with id {element_id!r}") from None

    def find_by_name(self, name: str) -> Element | None:
        for e in self.elements.values():
            if e.name == name:
                return e
        return None

    def delete_element(self, element_id: str) -> Element:
        element = self.get_element(element_id)
        del self.elements[element_id]
        self.element_order.remove(element_id)
        # Drop the element from any group it belonged to.
        for other in self.elements.values():
            if element_id in other.members:
                other.members.remove(element_id)
        return element

    def set_transform(self, element_id: str, t: Transform) -> Element:
        element = self.get_element(element_id)
        t.validate()
        element.transform = t.normalized()
        return element

    def set_group_members(self, group_id: str, member_ids: list[str]) -> Element:
        group = self.get_element(group_id)
        if group.kind != "group":
            raise EngineError("invalid-identifier", f"element {group.name!r} is not a group")
        for mid in member_ids:
            self.get_element(mid)
            for other in self.elements.values():
                if other.id != group_id and mid in other.members:
                    raise EngineError(
                        "duplicate-name",
                        f"element {mid!r} is already a member of group {other.name!r}",
                    )
        group.members = list(member_ids)
        return group

    def ordered_elements(self) -> list[Element]:
        return [self.elements[i] for i in self.element_order]

    # -- proxies ----------------------------------------------------------

    def add_proxy(self, kind: str, geometry: list[tuple[float, float]]) -> GraphicalProxy:
        if kind not in PROXY_KINDS:
            raise EngineError("bad-geometry-cardinality", f"unknown proxy kind {kind!r}")
        exact, n = _GEOMETRY_RULES[kind]
        if (exact and len(geometry) != n) or (not exact and len(geometry) < n):
            bound = "exactly" if exact else "at least"
            raise EngineError(
                "bad-geometry-cardinality",
                f"a {kind} needs {bound} {n} point(s), got {len(geometry)}",
            )
        self.proxy_counters[kind] += 1
        label = f"{PROXY_PREFIX[kind]}{self.proxy_counters[kind]}"
        proxy = GraphicalProxy(kind=kind, label=label, geometry=[(float(x), float(y)) for x, y in geometry])
        self.proxies[label] = proxy
        self.proxy_order.append(label)
        return proxy

    def get_proxy(self, label: str) -> GraphicalProxy:
        try:
            return self.proxies[label]
        except KeyError:
            raise EngineError("unknown-label", f"no proxy labeled {label!r}") from None

    def delete_proxy(self, label: str) -> GraphicalProxy:
        proxy = self.get_proxy(label)
        del self.proxies[label]
        self.proxy_order.remove(label)
        # Counters stay put: labels are never reused.
        return proxy

    def ordered_proxies(self) -> list[GraphicalProxy]:
        return [self.proxies[label] for label in self.proxy_order]

    # -- persistence ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "canvas": {"width": self.canvas[0], "height": self.canvas[1]},
            "element_seq": self.element_seq,
            "element_order": list(self.element_order),
            "elements": [self.elements[i].to_dict() for i in self.element_order],
            "proxies": [self.proxies[label].to_dict() for label in self.proxy_order],
            "proxy_counters": dict(self.proxy_counters),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SceneModel":
        model = cls()
        model.canvas = (d["canvas"]["width"], d["canvas"]["height"])
        model.element_seq = d["element_seq"]
        for ed in d["elements"]:
            element = Element.from_dict(ed)
            model.elements[element.id] = element
        model.element_order = list(d["element_order"])
        for pd in d["proxies"]:
            proxy = GraphicalProxy.from_dict(pd)
            model.proxies[proxy.label] = proxy
            model.proxy_order.append(proxy.label)
        model.proxy_counters.update(d["proxy_counters"])
        return model
