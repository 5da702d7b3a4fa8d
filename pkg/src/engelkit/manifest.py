"""Line-oriented manifest files: spaces, named objects, and task lists.

A manifest declares one frame space, any number of named forms, fields,
metrics and lattices over it, and a sequence of tasks with their expected
outcomes.  The grammar is line-oriented with `[section]` headers; see
README for the full description.  Everything is parsed eagerly so that a
bad manifest fails before any task runs.
"""

import math
import re
from fractions import Fraction

from . import expr as ex
from .frames import DiffForm, FrameError, FrameSpace, VectorField
from .metric import Metric
from .qfield import FieldError, Generators, parse_qnum

HEADER = "engelkit-manifest 1"
SECTION_RE = re.compile(r"^\[([a-z]+)(?:\s+([A-Za-z_][A-Za-z_0-9]*))?\]$")


class ManifestError(Exception):
    pass


class Task:
    def __init__(self, name, op, args, expects, overrides, lineno):
        self.name = name
        self.op = op
        self.args = args
        self.expects = expects
        self.overrides = overrides
        self.lineno = lineno


class Manifest:
    def __init__(self, path, space, forms, fields, metrics, lattices,
                 tasks):
        self.path = path
        self.space = space
        self.forms = forms
        self.fields = fields
        self.metrics = metrics
        self.lattices = lattices
        self.tasks = tasks


def _strip(line):
    return line.split("#", 1)[0].rstrip()


def _split_list(text):
    return [part.strip() for part in text.split(";")]


def _bound(text):
    # Coordinate bounds only shape the sampling window, so a bound such as
    # "2pi" or "pi/2" is stored as the exact Fraction of its float value.
    if "pi" not in text:
        return Fraction(text)
    num, _, den = text.partition("/")
    num = num.strip()
    if not num.endswith("pi"):
        raise ValueError(text)
    head = num[:-2].rstrip("*").strip()
    if head in ("", "-"):
        head += "1"
    value = Fraction(head) / (Fraction(den) if den else 1)
    return Fraction(float(value) * math.pi)


def _index_tuples(dim, degree):
    from itertools import combinations
    return list(combinations(range(dim), degree))


class _Parser:
    def __init__(self, text, path):
        self.path = path
        self.lines = text.splitlines()
        self.space_items = []
        self.raw = []          # (kind, name, items, lineno)
        self.space_seen = False

    def fail(self, lineno, msg):
        raise ManifestError(f"{self.path}:{lineno}: {msg}")

    def scan(self):
        current = None
        header_seen = False
        for lineno, rawline in enumerate(self.lines, 1):
            line = _strip(rawline).strip()
            if not line:
                continue
            if not header_seen:
                if line != HEADER:
                    self.fail(lineno, f"first line must be '{HEADER}'")
                header_seen = True
                continue
            m = SECTION_RE.match(line)
            if m:
                kind, name = m.group(1), m.group(2)
                if kind == "space":
                    if name is not None:
                        self.fail(lineno, "[space] takes no name")
                    if self.space_seen:
                        self.fail(lineno, "only one [space] section allowed")
                    self.space_seen = True
                    current = ("space", None, [], lineno)
                elif kind in ("form", "field", "metric", "lattice", "task"):
                    if name is None:
                        self.fail(lineno, f"[{kind}] needs a name")
                    current = (kind, name, [], lineno)
                else:
                    self.fail(lineno, f"unknown section kind '{kind}'")
                self.raw.append(current)
                continue
            if current is None:
                self.fail(lineno, "content before any section header")
            current[2].append((lineno, line))
        if not header_seen:
            raise ManifestError(f"{self.path}: empty manifest")

    # -- the space ----------------------------------------------------------

    def build_space(self):
        section = next((s for s in self.raw if s[0] == "space"), None)
        if section is None:
            raise ManifestError(f"{self.path}: no [space] section")
        entries = []
        brackets = {}
        params = {}
        for lineno, line in section[2]:
            tokens = line.split()
            if tokens[0] == "coord":
                if len(tokens) not in (4, 5) or \
                        (len(tokens) == 5 and tokens[4] != "periodic"):
                    self.fail(lineno,
                              "usage: coord NAME LO HI [periodic]")
                try:
                    lo, hi = _bound(tokens[2]), _bound(tokens[3])
                except ValueError:
                    self.fail(lineno, "coordinate bounds must be rational "
                                      "or a rational multiple of pi")
                entries.append(("coord", tokens[1], lo, hi,
                                len(tokens) == 5))
            elif tokens[0] == "lie":
                if len(tokens) != 2:
                    self.fail(lineno, "usage: lie NAME")
                entries.append(("lie", tokens[1]))
            elif tokens[0] == "param":
                if len(tokens) != 4 or tokens[2] != "=":
                    self.fail(lineno, "usage: param NAME = VALUE")
                try:
                    params[tokens[1]] = Fraction(tokens[3])
                except ValueError:
                    self.fail(lineno, "parameter values must be rational")
            elif tokens[0] == "bracket":
                if len(tokens) < 5 or tokens[3] != "=":
                    self.fail(lineno, "usage: bracket A B = c1; c2; ...")
                comps_text = line.split("=", 1)[1]
                comps = []
                for part in _split_list(comps_text):
                    if part in params:
                        comps.append(params[part])
                        continue
                    try:
                        comps.append(Fraction(part))
                    except ValueError:
                        self.fail(lineno, f"bracket component {part!r} is "
                                  f"neither rational nor a parameter")
                brackets[(tokens[1], tokens[2])] = comps
            else:
                self.fail(lineno, f"unknown space directive '{tokens[0]}'")
        try:
            return FrameSpace(entries, brackets=brackets, params=params)
        except (FrameError, KeyError) as err:
            self.fail(section[3], f"bad space: {err}")

    # -- named objects -------------------------------------------------------

    def keyvals(self, section, repeatable=()):
        out = {}
        for lineno, line in section[2]:
            if "=" not in line:
                self.fail(lineno, "expected 'key = value'")
            key, value = line.split("=", 1)
            key = key.strip()
            value = value.strip()
            if key in repeatable:
                out.setdefault(key, []).append((lineno, value))
            elif key in out:
                self.fail(lineno, f"duplicate key '{key}'")
            else:
                out[key] = (lineno, value)
        return out

    def parse_scalar(self, space, lineno, text):
        try:
            return space.scalar(text)
        except Exception as err:
            self.fail(lineno, f"bad expression {text!r}: {err}")

    def build_form(self, space, section):
        kv = self.keyvals(section)
        lineno, raw = kv.pop("degree", (section[3], "1"))
        try:
            degree = int(raw)
        except ValueError:
            self.fail(lineno, "degree must be an integer")
        if "comps" not in kv:
            self.fail(section[3], f"form '{section[1]}' needs comps")
        lineno, raw = kv.pop("comps")
        if kv:
            self.fail(section[3], f"unknown keys {sorted(kv)} in form")
        parts = _split_list(raw)
        keys = _index_tuples(space.dim, degree)
        if len(parts) != len(keys):
            self.fail(lineno, f"degree {degree} needs {len(keys)} "
                      f"components, got {len(parts)}")
        comps = {key: self.parse_scalar(space, lineno, part)
                 for key, part in zip(keys, parts)}
        return DiffForm(space, degree, comps)

    def build_field(self, space, section):
        kv = self.keyvals(section)
        if "comps" not in kv:
            self.fail(section[3], f"field '{section[1]}' needs comps")
        lineno, raw = kv.pop("comps")
        if kv:
            self.fail(section[3], f"unknown keys {sorted(kv)} in field")
        parts = _split_list(raw)
        if len(parts) != space.dim:
            self.fail(lineno, f"field needs {space.dim} components")
        return VectorField(space, [self.parse_scalar(space, lineno, p)
                                   for p in parts])

    def build_metric(self, space, section):
        kv = self.keyvals(section)
        if "diag" not in kv:
            self.fail(section[3], f"metric '{section[1]}' needs diag")
        lineno, raw = kv.pop("diag")
        if kv:
            self.fail(section[3], f"unknown keys {sorted(kv)} in metric")
        parts = _split_list(raw)
        if len(parts) != space.dim:
            self.fail(lineno, f"diag needs {space.dim} weights")
        weights = [self.parse_scalar(space, lineno, p) for p in parts]
        matrix = [[weights[i] if i == j else ex.ZERO
                   for j in range(space.dim)] for i in range(space.dim)]
        return Metric(space, matrix)

    def build_lattice(self, section):
        kv = self.keyvals(section, repeatable=("row",))
        if "gens" not in kv:
            self.fail(section[3], "lattice needs 'gens = p q ...'")
        lineno, raw = kv.pop("gens")
        try:
            gens = Generators(tuple(int(p) for p in raw.split()))
        except (ValueError, FieldError) as err:
            self.fail(lineno, f"bad generators: {err}")
        rows_raw = kv.pop("row", [])
        if kv:
            self.fail(section[3], f"unknown keys {sorted(kv)} in lattice")
        if len(rows_raw) != 4:
            self.fail(section[3], "lattice needs exactly four 'row' lines")
        rows = []
        for lineno, raw in rows_raw:
            parts = _split_list(raw)
            if len(parts) != 4:
                self.fail(lineno, "each row needs four entries")
            try:
                rows.append([parse_qnum(p, gens) for p in parts])
            except FieldError as err:
                self.fail(lineno, f"bad lattice entry: {err}")
        from .bundles import LatticeSpec
        return LatticeSpec(gens, rows)

    def build_task(self, section):
        args = {}
        expects = []
        overrides = {}
        op = None
        for lineno, line in section[2]:
            if "=" not in line:
                self.fail(lineno, "expected 'key = value'")
            key, value = line.split("=", 1)
            key = key.strip()
            value = value.strip()
            if key == "op":
                if op is not None:
                    self.fail(lineno, "duplicate op")
                op = value
            elif key == "expect":
                expects.append(" ".join(value.split()))
            elif key in ("samples", "tol"):
                overrides[key] = (lineno, value)
            elif key in args:
                self.fail(lineno, f"duplicate argument '{key}'")
            else:
                args[key] = value
        if op is None:
            self.fail(section[3], f"task '{section[1]}' has no op")
        parsed_over = {}
        for key, (lineno, value) in overrides.items():
            try:
                parsed_over[key] = int(value) if key == "samples" \
                    else float(value)
            except ValueError:
                self.fail(lineno, f"bad {key} override {value!r}")
        return Task(section[1], op, args, expects, parsed_over, section[3])

    def build(self):
        self.scan()
        space = self.build_space()
        forms, fields, metrics, lattices, tasks = {}, {}, {}, {}, []
        names_seen = set()
        for section in self.raw:
            kind, name = section[0], section[1]
            if kind == "space":
                continue
            if kind != "task":
                if name in names_seen:
                    self.fail(section[3], f"duplicate object name '{name}'")
                names_seen.add(name)
            if kind == "form":
                forms[name] = self.build_form(space, section)
            elif kind == "field":
                fields[name] = self.build_field(space, section)
            elif kind == "metric":
                metrics[name] = self.build_metric(space, section)
            elif kind == "lattice":
                lattices[name] = self.build_lattice(section)
            else:
                task = self.build_task(section)
                if any(t.name == task.name for t in tasks):
                    self.fail(section[3],
                              f"duplicate task name '{task.name}'")
                tasks.append(task)
        return Manifest(self.path, space, forms, fields, metrics, lattices,
                        tasks)


def parse_manifest(text, path="<string>"):
    return _Parser(text, path).build()


def load_manifest(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise ManifestError(f"cannot read manifest: {err}")
    return parse_manifest(text, path)
