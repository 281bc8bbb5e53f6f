"""JSON structure files.

Field order on output is fixed: version, kind, orbits, classes,
action_generators, fibers, h_generators, n_generators.  Permutations are
0-based image arrays; the string "inf" marks an infinite orbit.
"""

from __future__ import annotations

import json

from .caps import InvalidStructure
from .permgroup import PermGroup
from .structures import (
    INF, ClassPartition, CoveringReduct, FiberedStructure, Orbit, ReductOfUnary,
    UnaryStructure, validate,
)

VERSION = 1
KIND_FIELDS = {
    "unary": {"version", "kind", "orbits"},
    "reduct_of_unary": {"version", "kind", "orbits", "classes", "action_generators"},
    "trivial_cover": {"version", "kind", "orbits", "fibers"},
    "covering_reduct": {"version", "kind", "orbits", "fibers", "h_generators", "n_generators"},
}


def _fail(msg):
    raise InvalidStructure([msg])


def _perm(value, where):
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        _fail(f"{where}: a permutation must be a list of integers")
    return tuple(value)


def _orbits(data) -> UnaryStructure:
    raw = data.get("orbits")
    if not isinstance(raw, list):
        _fail("orbits must be a list")
    orbits = []
    for item in raw:
        if not isinstance(item, dict) or set(item) != {"name", "size"}:
            _fail("each orbit needs exactly the fields name and size")
        size = item["size"]
        if size != INF and not (isinstance(size, int) and not isinstance(size, bool)):
            _fail(f"orbit {item['name']!r}: size must be an integer or \"inf\"")
        orbits.append(Orbit(item["name"], size))
    return UnaryStructure(tuple(orbits))


def _fibers(data, base: UnaryStructure):
    raw = data.get("fibers")
    if not isinstance(raw, dict):
        _fail("fibers must map orbit names to label lists")
    extra = set(raw) - set(base.names)
    if extra:
        _fail(f"fibers name unknown orbits {sorted(extra)}")
    out = []
    for name in base.names:
        labels = raw.get(name)
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            _fail(f"fiber over {name!r} must be a list of label strings")
        out.append(tuple(labels))
    return FiberedStructure(base, tuple(out))


def structure_from_dict(data):
    if not isinstance(data, dict):
        _fail("a structure file must hold a JSON object")
    kind = data.get("kind")
    if kind not in KIND_FIELDS:
        _fail(f"kind must be one of {sorted(KIND_FIELDS)}")
    unknown = [k for k in data if k not in KIND_FIELDS[kind]]
    if unknown:
        _fail(f"unknown fields for kind {kind!r}: {unknown}")
    if data.get("version") != VERSION:
        _fail(f"version must be {VERSION}")
    base = _orbits(data)
    if kind == "unary":
        s = base
    elif kind == "reduct_of_unary":
        classes = data.get("classes")
        if not isinstance(classes, list) or not all(isinstance(c, list) for c in classes):
            _fail("classes must be a list of lists of orbit names")
        gens = data.get("action_generators", [])
        if not isinstance(gens, list):
            _fail("action_generators must be a list of permutations")
        perms = tuple(_perm(g, "action generator") for g in gens)
        if any(sorted(g) != list(range(len(classes))) for g in perms):
            _fail("action generators must permute the class indices")
        action = PermGroup(len(classes), perms)
        s = ReductOfUnary(base, ClassPartition(tuple(tuple(c) for c in classes)), action)
    else:
        cover = _fibers(data, base)
        if kind == "trivial_cover":
            s = cover
        else:
            h_raw = data.get("h_generators", [])
            n_raw = data.get("n_generators", {})
            if not isinstance(h_raw, list) or not isinstance(n_raw, dict):
                _fail("h_generators must be a list of maps and n_generators a map")
            h_gens = []
            for h in h_raw:
                if not isinstance(h, dict) or set(h) != set(base.names):
                    _fail("each H generator must map every orbit name to a permutation")
                h_gens.append(tuple(_perm(h[name], f"H generator on {name!r}") for name in base.names))
            extra = set(n_raw) - set(base.names)
            if extra:
                _fail(f"n_generators name unknown orbits {sorted(extra)}")
            n_gens = []
            for name in base.names:
                perms = n_raw.get(name, [])
                if not isinstance(perms, list):
                    _fail(f"n_generators for {name!r} must be a list")
                n_gens.append(tuple(_perm(p, f"N generator on {name!r}") for p in perms))
            s = CoveringReduct(cover, tuple(h_gens), tuple(n_gens))
    problems = validate(s)
    if problems:
        raise InvalidStructure(problems)
    return s


def structure_to_dict(s) -> dict:
    if isinstance(s, UnaryStructure):
        kind, base = "unary", s
    elif isinstance(s, ReductOfUnary):
        kind, base = "reduct_of_unary", s.base
    elif isinstance(s, FiberedStructure):
        kind, base = "trivial_cover", s.base
    elif isinstance(s, CoveringReduct):
        kind, base = "covering_reduct", s.cover.base
    else:
        raise TypeError(f"not a structure description: {type(s).__name__}")
    out = {"version": VERSION, "kind": kind,
           "orbits": [{"name": o.name, "size": o.size} for o in base.orbits]}
    if isinstance(s, ReductOfUnary):
        out["classes"] = [list(c) for c in s.nabla.classes]
        out["action_generators"] = [list(g) for g in s.action.generators]
    if isinstance(s, (FiberedStructure, CoveringReduct)):
        cover = s if isinstance(s, FiberedStructure) else s.cover
        out["fibers"] = {name: list(f) for name, f in zip(base.names, cover.fibers)}
    if isinstance(s, CoveringReduct):
        out["h_generators"] = [{name: list(p) for name, p in zip(base.names, h)} for h in s.h_generators]
        out["n_generators"] = {name: [list(p) for p in gens]
                               for name, gens in zip(base.names, s.n_generators)}
    return out


def loads(text: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidStructure([f"not valid JSON: {exc}"]) from None
    return structure_from_dict(data)


def dumps(s) -> str:
    return json.dumps(structure_to_dict(s), indent=2) + "\n"


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def group_from_dict(data) -> PermGroup:
    if not isinstance(data, dict) or "degree" not in data or "generators" not in data:
        raise InvalidStructure(["a group file needs degree and generators"])
    unknown = set(data) - {"degree", "generators", "points"}
    if unknown:
        raise InvalidStructure([f"unknown fields in group file: {sorted(unknown)}"])
    try:
        return PermGroup.from_json(data)
    except (TypeError, ValueError) as exc:
        raise InvalidStructure([f"bad group: {exc}"]) from None
