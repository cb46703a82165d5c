"""PNML and GraphViz DOT serialization for the restricted net class.

The PNML subset covers net/place/transition/arc with an initialMarking on
the source place. Element ids are stable functions of place content and
transition labels, so exporting the same net twice is byte-identical.
"""

from __future__ import annotations

import hashlib
import xml.etree.ElementTree as ET

from .errors import LogParseError, NetClassError
from .petri import Place, PetriNet

SOURCE_ID = "source"
SINK_ID = "sink"


def _place_id(place: Place) -> str:
    digest = hashlib.sha1(str(place).encode("utf-8")).hexdigest()[:12]
    return f"p_{digest}"


def _transition_id(activity: str) -> str:
    digest = hashlib.sha1(activity.encode("utf-8")).hexdigest()[:12]
    return f"t_{digest}"


def export_pnml(net: PetriNet) -> bytes:
    root = ET.Element("pnml")
    net_el = ET.SubElement(root, "net", {"id": "net", "type": "http://www.pnml.org/version-2009/grammar/ptnet"})
    page = ET.SubElement(net_el, "page", {"id": "page"})

    def add_place(place_id: str, label: str, marked: bool = False):
        el = ET.SubElement(page, "place", {"id": place_id})
        name = ET.SubElement(el, "name")
        ET.SubElement(name, "text").text = label
        if marked:
            marking = ET.SubElement(el, "initialMarking")
            ET.SubElement(marking, "text").text = "1"

    add_place(SOURCE_ID, f"(|{net.start})", marked=True)
    add_place(SINK_ID, f"({net.end}|)")
    for place in net.sorted_places():
        add_place(_place_id(place), str(place))
    for activity in sorted(net.activities):
        el = ET.SubElement(page, "transition", {"id": _transition_id(activity)})
        name = ET.SubElement(el, "name")
        ET.SubElement(name, "text").text = activity

    arcs = [(SOURCE_ID, _transition_id(net.start)), (_transition_id(net.end), SINK_ID)]
    for place in net.sorted_places():
        for activity in sorted(place.ingoing):
            arcs.append((_transition_id(activity), _place_id(place)))
        for activity in sorted(place.outgoing):
            arcs.append((_place_id(place), _transition_id(activity)))
    for source, target in arcs:
        ET.SubElement(page, "arc", {"id": f"a_{source}_{target}", "source": source,
                                    "target": target})
    return ET.tostring(root, encoding="utf-8", xml_declaration=True)


def parse_pnml(data: bytes | str) -> PetriNet:
    """Read a PNML net back into the restricted class, validating its shape.

    Requirements: uniquely labeled transitions, unweighted arcs, exactly one
    source place (empty preset, marked) whose postset is a single transition,
    and exactly one sink place (empty postset) with a single-preset transition.
    """
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, col = exc.position
        raise LogParseError(f"malformed PNML at line {line}, column {col}: {exc.msg}") from exc

    labels: dict[str, str] = {}
    place_ids: list[str] = []
    marked: set[str] = set()
    for el in root.iter():
        tag = el.tag.rsplit("}", 1)[-1]
        if tag == "transition":
            label = _text_of(el, "name") or el.get("id")
            if label in labels.values():
                raise NetClassError(f"duplicate transition label {label!r}")
            labels[el.get("id")] = label
        elif tag == "place":
            place_ids.append(el.get("id"))
            if _text_of(el, "initialMarking") not in (None, "0"):
                marked.add(el.get("id"))

    preset: dict[str, set[str]] = {pid: set() for pid in place_ids}
    postset: dict[str, set[str]] = {pid: set() for pid in place_ids}
    for el in root.iter():
        if el.tag.rsplit("}", 1)[-1] != "arc":
            continue
        weight = _text_of(el, "inscription")
        if weight not in (None, "1"):
            raise NetClassError(f"weighted arc {el.get('id')!r} is outside the net class")
        source, target = el.get("source"), el.get("target")
        if source in labels and target in preset:
            preset[target].add(labels[source])
        elif source in postset and target in labels:
            postset[source].add(labels[target])
        else:
            raise NetClassError(f"arc {el.get('id')!r} does not connect a place and a transition")

    sources = [pid for pid in place_ids if not preset[pid]]
    sinks = [pid for pid in place_ids if not postset[pid]]
    if len(sources) != 1 or len(sinks) != 1:
        raise NetClassError(
            f"expected exactly one source and one sink place, found {len(sources)}/{len(sinks)}")
    source_id, sink_id = sources[0], sinks[0]
    if source_id not in marked:
        raise NetClassError(f"source place {source_id!r} carries no initial marking")
    if len(postset[source_id]) != 1:
        raise NetClassError("the source place must feed exactly the start transition")
    if len(preset[sink_id]) != 1:
        raise NetClassError("the sink place must be fed by exactly the end transition")
    start = next(iter(postset[source_id]))
    end = next(iter(preset[sink_id]))

    places = set()
    for pid in place_ids:
        if pid in (source_id, sink_id):
            continue
        if not preset[pid] or not postset[pid]:
            raise NetClassError(f"place {pid!r} lacks ingoing or outgoing arcs")
        places.add(Place(preset[pid], postset[pid]))
    return PetriNet(frozenset(labels.values()), frozenset(places), start, end)


def _text_of(el, child_tag: str):
    for child in el:
        if child.tag.rsplit("}", 1)[-1] == child_tag:
            for grand in child:
                if grand.tag.rsplit("}", 1)[-1] == "text":
                    return grand.text
    return None


def export_dot(net: PetriNet) -> bytes:
    """GraphViz rendering: places as circles, transitions as boxes."""
    lines = ["digraph net {", "  rankdir=LR;"]
    lines.append(f'  {SOURCE_ID} [shape=circle, label="", xlabel="start"];')
    lines.append(f'  {SINK_ID} [shape=circle, label="", xlabel="end"];')
    for place in net.sorted_places():
        lines.append(f'  {_place_id(place)} [shape=circle, label="{_dot_escape(str(place))}"];')
    for activity in sorted(net.activities):
        lines.append(f'  {_transition_id(activity)} [shape=box, label="{_dot_escape(activity)}"];')
    lines.append(f"  {SOURCE_ID} -> {_transition_id(net.start)};")
    lines.append(f"  {_transition_id(net.end)} -> {SINK_ID};")
    for place in net.sorted_places():
        for activity in sorted(place.ingoing):
            lines.append(f"  {_transition_id(activity)} -> {_place_id(place)};")
        for activity in sorted(place.outgoing):
            lines.append(f"  {_place_id(place)} -> {_transition_id(activity)};")
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')
