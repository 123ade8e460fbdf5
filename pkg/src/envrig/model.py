"""Articulated-body model types and a parser for an SDF subset.

The accepted subset is a fixed contract: ``sdf@version`` (optional wrapper),
``model@name``, ``link@name`` with ``inertial/mass``,
``inertial/inertia/{ixx,iyy,izz}`` (off-diagonals must be 0 if present) and
``inertial/pose`` (translation only; its norm is the link's center-of-mass
offset), ``joint@name@type`` with ``parent``, ``child``, ``axis/xyz``,
``axis/limit/{lower,upper,effort,velocity}``, and ``static``.  Any other
element produces a warning diagnostic and is ignored.  Unbounded limits are
encoded by omitting the element and surface as +-inf.

Parsing is total: any byte soup in, a model or diagnostics out, never an
exception.  Diagnostics carry 1-based line/column and print in the
``line:col: severity: message`` compiler convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from xml.parsers import expat

_AXIS_NORM_TOL = 1e-9

INF = math.inf


class JointKind(Enum):
    REVOLUTE = "revolute"
    PRISMATIC = "prismatic"
    FIXED = "fixed"


@dataclass(frozen=True)
class Link:
    name: str
    mass: float
    inertia_diag: tuple[float, float, float]
    com_offset: float = 0.0


@dataclass(frozen=True)
class Joint:
    name: str
    kind: JointKind
    parent_link: str
    child_link: str
    axis: tuple[float, float, float] | None = None
    lower: float = -INF
    upper: float = INF
    effort_limit: float = INF
    velocity_limit: float = INF


@dataclass(frozen=True)
class RobotModel:
    name: str
    links: tuple[Link, ...]
    joints: tuple[Joint, ...]
    base_link: str
    fixed_base: bool = True

    @property
    def dof(self) -> int:
        return sum(1 for j in self.joints if j.kind is not JointKind.FIXED)

    def link(self, name: str) -> Link:
        for link in self.links:
            if link.name == name:
                return link
        raise KeyError(name)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.severity}: {self.message}"


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity == "error" for d in diagnostics)


# --- minimal DOM with source positions -------------------------------------


@dataclass
class _Element:
    tag: str
    attrib: dict[str, str]
    line: int
    col: int
    text: str = ""
    children: list["_Element"] = field(default_factory=list)

    def find(self, tag: str) -> "_Element | None":
        for child in self.children:
            if child.tag == tag:
                return child
        return None

    def findall(self, tag: str) -> list["_Element"]:
        return [c for c in self.children if c.tag == tag]


class _DoctypeRejected(Exception):
    pass


def _build_tree(text: str) -> tuple[_Element | None, Diagnostic | None]:
    parser = expat.ParserCreate()
    root: list[_Element] = []
    stack: list[_Element] = []

    def start(tag, attrs):
        elem = _Element(
            tag,
            dict(attrs),
            parser.CurrentLineNumber,
            parser.CurrentColumnNumber + 1,
        )
        if stack:
            stack[-1].children.append(elem)
        elif not root:
            root.append(elem)
        stack.append(elem)

    def end(tag):
        stack.pop()

    def chardata(data):
        if stack:
            stack[-1].text += data

    def doctype(*args):
        # Forbidding DTDs closes the door on entity-expansion bombs.
        raise _DoctypeRejected()

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chardata
    parser.StartDoctypeDeclHandler = doctype

    try:
        parser.Parse(text, True)
    except expat.ExpatError as exc:
        return None, Diagnostic(
            "error",
            f"XML syntax: {expat.errors.messages[exc.code]}",
            exc.lineno,
            exc.offset + 1,
        )
    except _DoctypeRejected:
        return None, Diagnostic(
            "error",
            "document type declarations are not supported",
            parser.CurrentLineNumber,
            parser.CurrentColumnNumber + 1,
        )
    except (ValueError, UnicodeError) as exc:
        return None, Diagnostic("error", f"unparseable input: {exc}", 1, 1)
    if not root:
        return None, Diagnostic("error", "empty document", 1, 1)
    return root[0], None


# --- subset extraction ------------------------------------------------------


class _Extractor:
    def __init__(self):
        self.diagnostics: list[Diagnostic] = []

    def error(self, elem: _Element, message: str):
        self.diagnostics.append(Diagnostic("error", message, elem.line, elem.col))

    def warning(self, elem: _Element, message: str):
        self.diagnostics.append(Diagnostic("warning", message, elem.line, elem.col))

    def warn_unknown(self, parent: _Element, known: set[str]):
        for child in parent.children:
            if child.tag not in known:
                self.warning(
                    child,
                    f"ignoring element <{child.tag}> not in the supported SDF subset",
                )

    def number(self, elem: _Element, what: str) -> float | None:
        try:
            return float(elem.text.strip())
        except ValueError:
            self.error(elem, f"{what}: expected a number, got {elem.text.strip()!r}")
            return None

    def numbers(self, elem: _Element, what: str, count: int) -> list[float] | None:
        parts = elem.text.split()
        if len(parts) != count:
            self.error(elem, f"{what}: expected {count} numbers, got {len(parts)}")
            return None
        try:
            return [float(p) for p in parts]
        except ValueError:
            self.error(elem, f"{what}: expected numbers, got {elem.text.strip()!r}")
            return None

    def extract_link(self, elem: _Element) -> Link | None:
        name = elem.attrib.get("name")
        if not name:
            self.error(elem, "link is missing the name attribute")
            return None
        self.warn_unknown(elem, {"inertial"})
        inertial = elem.find("inertial")
        if inertial is None:
            self.error(elem, f"link {name!r} is missing <inertial>")
            return None
        self.warn_unknown(inertial, {"mass", "inertia", "pose"})

        mass_elem = inertial.find("mass")
        if mass_elem is None:
            self.error(inertial, f"link {name!r} is missing <inertial>/<mass>")
            return None
        mass = self.number(mass_elem, f"link {name!r} mass")

        inertia_elem = inertial.find("inertia")
        if inertia_elem is None:
            self.error(inertial, f"link {name!r} is missing <inertial>/<inertia>")
            return None
        diag: list[float] = []
        for key in ("ixx", "iyy", "izz"):
            value_elem = inertia_elem.find(key)
            if value_elem is None:
                self.error(inertia_elem, f"link {name!r} inertia is missing <{key}>")
                return None
            value = self.number(value_elem, f"link {name!r} {key}")
            if value is None:
                return None
            diag.append(value)
        for key in ("ixy", "ixz", "iyz"):
            off_elem = inertia_elem.find(key)
            if off_elem is not None:
                off = self.number(off_elem, f"link {name!r} {key}")
                if off is not None and off != 0.0:
                    self.error(
                        off_elem,
                        f"link {name!r}: off-diagonal inertia {key} must be 0",
                    )
        self.warn_unknown(
            inertia_elem, {"ixx", "iyy", "izz", "ixy", "ixz", "iyz"}
        )

        com_offset = 0.0
        pose_elem = inertial.find("pose")
        if pose_elem is not None:
            pose = self.numbers(pose_elem, f"link {name!r} inertial pose", 6)
            if pose is None:
                return None
            if any(v != 0.0 for v in pose[3:]):
                self.error(
                    pose_elem,
                    f"link {name!r}: inertial pose rotation must be zero",
                )
            com_offset = math.sqrt(pose[0] ** 2 + pose[1] ** 2 + pose[2] ** 2)

        if mass is None:
            return None
        return Link(name=name, mass=mass, inertia_diag=tuple(diag), com_offset=com_offset)

    def extract_joint(self, elem: _Element) -> Joint | None:
        name = elem.attrib.get("name")
        if not name:
            self.error(elem, "joint is missing the name attribute")
            return None
        kind_text = elem.attrib.get("type", "")
        try:
            kind = JointKind(kind_text)
        except ValueError:
            self.error(elem, f"joint {name!r}: unsupported joint type {kind_text!r}")
            return None
        self.warn_unknown(elem, {"parent", "child", "axis"})

        parent_elem = elem.find("parent")
        child_elem = elem.find("child")
        if parent_elem is None or child_elem is None:
            self.error(elem, f"joint {name!r} needs <parent> and <child>")
            return None
        parent = parent_elem.text.strip()
        child = child_elem.text.strip()

        axis = None
        lower, upper = -INF, INF
        effort, velocity = INF, INF
        axis_elem = elem.find("axis")
        if kind is JointKind.FIXED:
            if axis_elem is not None:
                self.error(axis_elem, f"fixed joint {name!r} must not carry <axis>")
                return None
        else:
            if axis_elem is None:
                self.error(elem, f"joint {name!r} is missing <axis>")
                return None
            self.warn_unknown(axis_elem, {"xyz", "limit"})
            xyz_elem = axis_elem.find("xyz")
            if xyz_elem is None:
                self.error(axis_elem, f"joint {name!r} axis is missing <xyz>")
                return None
            xyz = self.numbers(xyz_elem, f"joint {name!r} axis", 3)
            if xyz is None:
                return None
            axis = tuple(xyz)
            limit_elem = axis_elem.find("limit")
            if limit_elem is not None:
                self.warn_unknown(limit_elem, {"lower", "upper", "effort", "velocity"})
                values = {}
                for key in ("lower", "upper", "effort", "velocity"):
                    v_elem = limit_elem.find(key)
                    if v_elem is not None:
                        v = self.number(v_elem, f"joint {name!r} {key} limit")
                        if v is None:
                            return None
                        values[key] = v
                lower = values.get("lower", lower)
                upper = values.get("upper", upper)
                effort = values.get("effort", effort)
                velocity = values.get("velocity", velocity)

        return Joint(
            name=name,
            kind=kind,
            parent_link=parent,
            child_link=child,
            axis=axis,
            lower=lower,
            upper=upper,
            effort_limit=effort,
            velocity_limit=velocity,
        )


def parse_sdf(text: str) -> tuple[RobotModel | None, list[Diagnostic]]:
    """Parse SDF-subset text. Returns (model, diagnostics); model is None on error."""
    root, syntax_error = _build_tree(text)
    if syntax_error is not None:
        return None, [syntax_error]
    assert root is not None

    ex = _Extractor()
    model_elem = root
    if root.tag == "sdf":
        models = root.findall("model")
        ex.warn_unknown(root, {"model"})
        if len(models) != 1:
            ex.error(root, f"expected exactly one <model> under <sdf>, got {len(models)}")
            return None, ex.diagnostics
        model_elem = models[0]
    if model_elem.tag != "model":
        ex.error(model_elem, f"expected <model> root, got <{model_elem.tag}>")
        return None, ex.diagnostics

    name = model_elem.attrib.get("name")
    if not name:
        ex.error(model_elem, "model is missing the name attribute")
        return None, ex.diagnostics
    ex.warn_unknown(model_elem, {"link", "joint", "static"})

    fixed_base = True
    static_elem = model_elem.find("static")
    if static_elem is not None:
        value = static_elem.text.strip().lower()
        if value in ("true", "1"):
            fixed_base = True
        elif value in ("false", "0"):
            fixed_base = False
        else:
            ex.error(static_elem, f"static: expected true/false, got {value!r}")

    links = [ex.extract_link(e) for e in model_elem.findall("link")]
    joints = [ex.extract_joint(e) for e in model_elem.findall("joint")]
    if has_errors(ex.diagnostics) or any(l is None for l in links) or any(
        j is None for j in joints
    ):
        return None, ex.diagnostics

    base = _find_base_link(
        [l for l in links if l is not None], [j for j in joints if j is not None]
    )
    if base is None:
        ex.error(
            model_elem,
            "model must have exactly one root link (a link that is no joint's child)",
        )
        return None, ex.diagnostics
    model = RobotModel(
        name=name,
        links=tuple(links),
        joints=tuple(joints),
        base_link=base,
        fixed_base=fixed_base,
    )
    semantic = validate(model)
    ex.diagnostics.extend(semantic)
    if has_errors(semantic):
        return None, ex.diagnostics
    return model, ex.diagnostics


def _find_base_link(links: list[Link], joints: list[Joint]) -> str | None:
    children = {j.child_link for j in joints}
    roots = [l.name for l in links if l.name not in children]
    if len(roots) == 1:
        return roots[0]
    return None


# --- validation -------------------------------------------------------------


def validate(model: RobotModel) -> list[Diagnostic]:
    """Check every RobotModel invariant; empty list means the model is valid."""
    diags: list[Diagnostic] = []

    def err(message: str):
        diags.append(Diagnostic("error", message))

    seen: set[str] = set()
    for link in model.links:
        if link.name in seen:
            err(f"duplicate link name {link.name!r}")
        seen.add(link.name)
        if not (link.mass > 0):
            err(f"link {link.name!r}: mass > 0 violated (mass={link.mass})")
        for key, value in zip(("ixx", "iyy", "izz"), link.inertia_diag):
            if not (value > 0):
                err(f"link {link.name!r}: inertia {key} > 0 violated ({key}={value})")
        if not (link.com_offset >= 0) or not math.isfinite(link.com_offset):
            err(f"link {link.name!r}: com_offset must be finite and >= 0")

    if not model.links:
        err("model has no links")

    link_names = {l.name for l in model.links}
    joint_seen: set[str] = set()
    for joint in model.joints:
        if joint.name in joint_seen:
            err(f"duplicate joint name {joint.name!r}")
        joint_seen.add(joint.name)
        for ref, role in ((joint.parent_link, "parent"), (joint.child_link, "child")):
            if ref not in link_names:
                err(f"joint {joint.name!r}: unresolved {role} link reference {ref!r}")
        if joint.parent_link == joint.child_link:
            err(f"joint {joint.name!r}: parent and child are the same link")
        if joint.kind is JointKind.FIXED:
            if joint.axis is not None:
                err(f"fixed joint {joint.name!r} must not carry an axis")
            if (joint.lower, joint.upper) != (-INF, INF) or math.isfinite(
                joint.effort_limit
            ) or math.isfinite(joint.velocity_limit):
                err(f"fixed joint {joint.name!r} must not carry limits")
        else:
            if joint.axis is None:
                err(f"joint {joint.name!r}: axis required for {joint.kind.value} joints")
            else:
                norm = math.sqrt(sum(v * v for v in joint.axis))
                if not math.isfinite(norm) or abs(norm - 1.0) > _AXIS_NORM_TOL:
                    err(f"joint {joint.name!r}: axis must have unit norm (got {norm})")
            if math.isnan(joint.lower) or math.isnan(joint.upper) or joint.lower > joint.upper:
                err(
                    f"joint {joint.name!r}: lower <= upper violated "
                    f"({joint.lower} > {joint.upper})"
                )
            if not (joint.effort_limit > 0):
                err(f"joint {joint.name!r}: effort limit must be > 0")
            if not (joint.velocity_limit > 0):
                err(f"joint {joint.name!r}: velocity limit must be > 0")

    diags.extend(_validate_topology(model, link_names))
    return diags


def _validate_topology(model: RobotModel, link_names: set[str]) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    if not model.links:
        return diags

    if model.base_link not in link_names:
        diags.append(
            Diagnostic("error", f"base link {model.base_link!r} is not a model link")
        )
        return diags

    parent_of: dict[str, str] = {}
    for joint in model.joints:
        if joint.child_link not in link_names or joint.parent_link not in link_names:
            return diags  # unresolved references already reported
        if joint.child_link in parent_of:
            diags.append(
                Diagnostic(
                    "error",
                    f"link {joint.child_link!r} has multiple parent joints "
                    "(topology is not a tree)",
                )
            )
            return diags
        parent_of[joint.child_link] = joint.parent_link

    if model.base_link in parent_of:
        diags.append(
            Diagnostic("error", f"base link {model.base_link!r} must not be a joint child")
        )

    # Walk up from every link; a tree reaches the base without revisiting.
    # Links already known to reach the base short-circuit, keeping this O(n).
    reaches_base = {model.base_link}
    for link in model.links:
        path = [link.name]
        visited = {link.name}
        current = link.name
        while current not in reaches_base:
            if current not in parent_of:
                diags.append(
                    Diagnostic(
                        "error",
                        f"link {link.name!r} is not connected to base "
                        f"{model.base_link!r}",
                    )
                )
                return diags
            current = parent_of[current]
            if current in visited:
                diags.append(
                    Diagnostic("error", f"cyclic topology through link {current!r}")
                )
                return diags
            visited.add(current)
            path.append(current)
        reaches_base.update(path)
    return diags


# --- serialization ----------------------------------------------------------


def serialize_sdf(model: RobotModel) -> str:
    """Emit the subset with full-precision reals; parse(serialize(m)) == m."""
    out = ['<?xml version="1.0"?>', '<sdf version="1.9">']
    out.append(f'  <model name="{model.name}">')
    out.append(f"    <static>{'true' if model.fixed_base else 'false'}</static>")
    for link in model.links:
        out.append(f'    <link name="{link.name}">')
        out.append("      <inertial>")
        if link.com_offset != 0.0:
            out.append(f"        <pose>0 0 {link.com_offset!r} 0 0 0</pose>")
        out.append(f"        <mass>{link.mass!r}</mass>")
        ixx, iyy, izz = link.inertia_diag
        out.append(
            "        <inertia>"
            f"<ixx>{ixx!r}</ixx><iyy>{iyy!r}</iyy><izz>{izz!r}</izz>"
            "</inertia>"
        )
        out.append("      </inertial>")
        out.append("    </link>")
    for joint in model.joints:
        out.append(f'    <joint name="{joint.name}" type="{joint.kind.value}">')
        out.append(f"      <parent>{joint.parent_link}</parent>")
        out.append(f"      <child>{joint.child_link}</child>")
        if joint.kind is not JointKind.FIXED:
            assert joint.axis is not None
            ax, ay, az = joint.axis
            out.append("      <axis>")
            out.append(f"        <xyz>{ax!r} {ay!r} {az!r}</xyz>")
            limit_parts = []
            if joint.lower != -INF:
                limit_parts.append(f"<lower>{joint.lower!r}</lower>")
            if joint.upper != INF:
                limit_parts.append(f"<upper>{joint.upper!r}</upper>")
            if joint.effort_limit != INF:
                limit_parts.append(f"<effort>{joint.effort_limit!r}</effort>")
            if joint.velocity_limit != INF:
                limit_parts.append(f"<velocity>{joint.velocity_limit!r}</velocity>")
            if limit_parts:
                out.append(f"        <limit>{''.join(limit_parts)}</limit>")
            out.append("      </axis>")
        out.append("    </joint>")
    out.append("  </model>")
    out.append("</sdf>")
    return "\n".join(out) + "\n"


def strip_fixed_joints(model: RobotModel) -> list[Joint]:
    """The actuated joints, in declaration order."""
    return [j for j in model.joints if j.kind is not JointKind.FIXED]


def with_fixed_base(model: RobotModel, fixed: bool) -> RobotModel:
    return replace(model, fixed_base=fixed)
