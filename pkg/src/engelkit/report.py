"""Run a manifest's tasks and build deterministic reports.

Each task produces outcome tokens (matched against the manifest's expect
lines), report lines (rendered verdicts and derived objects), and an
optional output object later tasks can reference by task name.

The machine-readable report is line-oriented with a versioned header and
a stable field order; given the same manifest and seed, two runs emit
byte-identical files.  Wall-clock timing therefore appears only in the
human-readable output.
"""

import time
from fractions import Fraction
from itertools import combinations

from . import expr as ex
from .bundles import (boothby_wang, filling_check, t2_bundle_condition,
                      torus_family)
from .catalog import (CatalogError, LieAlgebra4, fmt_vec,
                      kengel_framing_search)
from .contact import contactization_report
from .engel import EngelError, analyze, dbeta2_criterion, identity_suite
from .frames import VectorField
from .kengel import (KEngelData, KEngelError, kengel_check,
                     kengel_invariants)
from .manifest import ManifestError
from .metric import (bracket_pattern_report, orthonormal_metric,
                     tangency_report)
from .qfield import FieldError
from .sampling import SamplingPolicy, ZeroVerdict, fmt_float


# ---------------------------------------------------------------------------
# rendering helpers

def fmt_point(pt):
    if not pt:
        return "-"
    return ",".join(f"{k}={fmt_float(v)}" for k, v in sorted(pt.items()))


def render_verdict(v):
    if isinstance(v, ZeroVerdict):
        return v.describe()
    if isinstance(v, tuple) and len(v) == 3:
        ok, low, pt = v
        word = "yes" if ok else "NO"
        return f"nonvanishing={word} min={fmt_float(low)} at {fmt_point(pt)}"
    if isinstance(v, bool):
        return "yes" if v else "no"
    raise TypeError(f"cannot render verdict {v!r}")


def fmt_field(V):
    return "; ".join(ex.to_str(c) for c in V.comps)


def fmt_form(w):
    idx = combinations(range(w.space.dim), w.degree)
    return "; ".join(ex.to_str(w.comp(i)) for i in idx)


class TaskResult:
    def __init__(self, name, op):
        self.name = name
        self.op = op
        self.tokens = set()
        self.lines = []          # (kind, name, text)
        self.output = None
        self.expect_results = []  # (raw, matched)
        self.seconds = 0.0

    def token(self, *parts):
        self.tokens.add(" ".join(str(p) for p in parts if p != ""))

    def fail_tokens(self, kind, names):
        self.token(kind)
        for n in names:
            self.token(kind, n)

    def verdict(self, name, v):
        self.lines.append(("verdict", name, render_verdict(v)))

    def derived(self, name, text):
        self.lines.append(("derived", name, text))


# ---------------------------------------------------------------------------
# argument resolution

def _need(task, key):
    if key not in task.args:
        raise ManifestError(f"task '{task.name}': missing argument '{key}'")
    return task.args[key]


def _form(mf, task, key):
    name = _need(task, key)
    if name not in mf.forms:
        raise ManifestError(f"task '{task.name}': unknown form '{name}'")
    return mf.forms[name]


def _field(mf, task, key, optional=False):
    name = task.args.get(key)
    if name is None:
        if optional:
            return None
        raise ManifestError(f"task '{task.name}': missing argument '{key}'")
    if name not in mf.fields:
        raise ManifestError(f"task '{task.name}': unknown field '{name}'")
    return mf.fields[name]


def _data(outputs, task, key="data", want=None):
    name = _need(task, key)
    if name not in outputs:
        raise ManifestError(f"task '{task.name}': no prior task '{name}'")
    out = outputs[name]
    if want is not None and not isinstance(out, want):
        raise ManifestError(
            f"task '{task.name}': task '{name}' did not produce "
            f"{want.__name__}")
    if out is None:
        raise ManifestError(f"task '{task.name}': task '{name}' produced "
                            f"no data")
    return out


def _metric(mf, task, data):
    name = task.args.get("metric", "orthonormal")
    if name == "orthonormal":
        return orthonormal_metric(data)
    if name not in mf.metrics:
        raise ManifestError(f"task '{task.name}': unknown metric '{name}'")
    return mf.metrics[name]


def _rational_vec(task, V):
    out = []
    for c in V.comps:
        e = ex.normalize(c)
        if e[0] != "rat":
            raise ManifestError(
                f"task '{task.name}': field component {ex.to_str(c)} is "
                f"not rational")
        out.append(e[1])
    return out


def _lie_algebra(mf, task):
    sp = mf.space
    if sp.dim != 4 or any(k != "lie" for k in sp.kinds):
        raise ManifestError(f"task '{task.name}': needs a 4-dim invariant "
                            f"frame space")
    brackets = {key: list(vec) for key, vec in sp.structure.items()}
    return LieAlgebra4(sp.names, brackets)


def _scalar_arg(mf, task, key, default=None):
    if key not in task.args:
        if default is not None:
            return default
        raise ManifestError(f"task '{task.name}': missing argument '{key}'")
    try:
        return mf.space.scalar(task.args[key])
    except Exception as err:
        raise ManifestError(f"task '{task.name}': bad expression for "
                            f"'{key}': {err}")


# ---------------------------------------------------------------------------
# operations

def op_engel(mf, task, policy, outputs, res):
    alpha = _form(mf, task, "alpha")
    beta = _form(mf, task, "beta")
    W = _field(mf, task, "W", optional=True)
    X = _field(mf, task, "X", optional=True)
    try:
        data = analyze(mf.space, alpha, beta, policy, W=W, X=X)
    except EngelError as err:
        # name the defining condition that broke, if one did
        checks = check_defining_forms(mf.space, alpha, beta, policy)
        bad = []
        for name in ("nonintegrability", "span", "flag"):
            v = checks[name]
            res.verdict(name, v)
            ok = v[0] if isinstance(v, tuple) else v.is_zero
            if not ok:
                bad.append(name)
        res.fail_tokens("engel_fail", bad or ["analysis"])
        res.derived("error", str(err))
        return
    bad = []
    for name in ("nonintegrability", "span", "flag"):
        v = data.defining[name]
        res.verdict(name, v)
        ok = v[0] if isinstance(v, tuple) else v.is_zero
        if not ok:
            bad.append(name)
    if bad:
        res.fail_tokens("engel_fail", bad)
    else:
        res.token("engel_pass")
    for name, V in (("W", data.W), ("X", data.X), ("T", data.T),
                    ("R", data.R)):
        res.derived(name, fmt_field(V))
    res.derived("u", ex.to_str(data.u))
    res.derived("v", ex.to_str(data.v))
    for key in sorted(data.table):
        e = ex.cleanup(data.table[key])
        if e != ex.ZERO:
            res.derived(f"table {key}", ex.to_str(e))
    res.output = data


def op_kengel(mf, task, policy, outputs, res):
    data = _data(outputs, task)
    if isinstance(data, KEngelData):
        data = data.data
    Z = _field(mf, task, "Z")
    g = _metric(mf, task, data)
    report = kengel_check(data, g, Z, policy)
    for group in ("engel", "orthogonal"):
        for name, v in report[group].items():
            res.verdict(name, v)
    killing_bad = [f"Killing {k}" for k, v in report["killing"].items()
                   if not v.is_zero]
    res.verdict("Killing equation",
                ZeroVerdict("exact") if not killing_bad
                else next(v for v in report["killing"].values()
                          if not v.is_zero))
    if report["ok"]:
        res.token("kengel_pass")
    else:
        bad = [k for k, v in report["engel"].items() if not v.is_zero]
        bad += killing_bad
        bad += [k for k, v in report["orthogonal"].items() if not v.is_zero]
        res.fail_tokens("kengel_fail", bad)
    rank = task.args.get("rank")
    res.output = KEngelData(data, g, Z,
                            rank=int(rank) if rank is not None else None)


def op_kinvariants(mf, task, policy, outputs, res):
    data = _data(outputs, task)
    if isinstance(data, KEngelData):
        data = data.data
    report, ok = kengel_invariants(data, policy)
    for name, v in report.items():
        res.verdict(name, v)
    if ok:
        res.token("invariants_pass")
    else:
        res.fail_tokens("invariants_fail",
                        [k for k, v in report.items() if not v.is_zero])


def op_identities(mf, task, policy, outputs, res):
    data = _data(outputs, task)
    if isinstance(data, KEngelData):
        data = data.data
    suite = identity_suite(data, policy)
    bad = []
    for name, v in suite:
        res.verdict(name, v)
        if not v.is_zero:
            bad.append(name)
    if bad:
        res.fail_tokens("identities_fail", bad)
    else:
        res.token("identities_pass")


def op_contact(mf, task, policy, outputs, res):
    data = _data(outputs, task)
    if isinstance(data, KEngelData):
        data = data.data
    report = contactization_report(data, policy)
    bad = []
    for name in ("contact volume", "pairs to one", "contracts to zero",
                 "closed form matches solve"):
        v = report[name]
        res.verdict(name, v)
        ok = v[0] if isinstance(v, tuple) else v.is_zero
        if not ok:
            bad.append(name)
    res.derived("closed form", fmt_field(report["closed form"]))
    if bad:
        res.fail_tokens("contact_fail", bad)
    else:
        res.token("contact_pass")


def op_geodesic(mf, task, policy, outputs, res):
    data = _data(outputs, task)
    if isinstance(data, KEngelData):
        data = data.data
    plane = task.args.get("plane", "D")
    if plane not in ("D", "R"):
        raise ManifestError(f"task '{task.name}': plane must be D or R")
    g = _metric(mf, task, data)
    report = tangency_report(data, g, plane, policy)
    for name, (e, v) in report["checks"].items():
        res.verdict(name, v)
    if report["totally geodesic"]:
        res.token("geodesic")
    else:
        name, expr_text = report["witness"]
        res.token("not_geodesic")
        res.token("not_geodesic", name)
        res.derived("witness", f"{name} = {expr_text}")
    res.output = report


def op_pattern(mf, task, policy, outputs, res):
    data = _data(outputs, task)
    if isinstance(data, KEngelData):
        data = data.data
    report, ok = bracket_pattern_report(data, policy)
    for name, v in report.items():
        res.verdict(name, v)
    if ok:
        res.token("pattern_pass")
    else:
        res.fail_tokens("pattern_fail",
                        [k for k, v in report.items() if not v.is_zero])


def op_dbeta2(mf, task, policy, outputs, res):
    data = _data(outputs, task)
    if isinstance(data, KEngelData):
        data = data.data
    report = dbeta2_criterion(data, policy)
    bad = []
    for name in ("a_WR + b_XR", "d(mu beta)^2"):
        res.verdict(name, report[name])
        if not report[name].is_zero:
            bad.append(name)
    res.derived("mu", ex.to_str(report["mu"]))
    if bad:
        res.fail_tokens("dbeta2_fail", bad)
    else:
        res.token("dbeta2_pass")


def op_commutant(mf, task, policy, outputs, res):
    lie = _lie_algebra(mf, task)
    names = _need(task, "set").split()
    vecs = []
    for name in names:
        if name not in mf.fields:
            raise ManifestError(f"task '{task.name}': unknown field "
                                f"'{name}'")
        vecs.append(_rational_vec(task, mf.fields[name]))
    from .catalog import commutant
    basis = commutant(lie, vecs)
    res.token("commutant_dim", len(basis))
    for i, vec in enumerate(basis):
        res.derived(f"basis {i}", fmt_vec(lie.names, vec))
    res.output = basis


def op_framing(mf, task, policy, outputs, res):
    lie = _lie_algebra(mf, task)
    W = _rational_vec(task, _field(mf, task, "W"))
    X = _rational_vec(task, _field(mf, task, "X"))
    R_hint = task.args.get("R")
    if R_hint is not None:
        if R_hint not in mf.fields:
            raise ManifestError(f"task '{task.name}': unknown field "
                                f"'{R_hint}'")
        R_hint = _rational_vec(task, mf.fields[R_hint])
    try:
        search = kengel_framing_search(lie, W, X, R_hint=R_hint)
    except CatalogError as err:
        res.token("framing_rejected")
        res.derived("error", str(err))
        return
    res.derived("commutant dim", str(search["commutant_dim"]))
    if search["found"]:
        res.token("framing_found")
        res.derived("Y", fmt_vec(lie.names, search["Y"]))
        res.derived("R", fmt_vec(lie.names, search["R"]))
        res.derived("det", str(search["det"]))
    else:
        res.token("framing_none")
        res.derived("certificate", search["certificate"])
    res.output = search


def op_lattice(mf, task, policy, outputs, res):
    name = _need(task, "lattice")
    if name not in mf.lattices:
        raise ManifestError(f"task '{task.name}': unknown lattice '{name}'")
    try:
        kdata, rank = torus_family(mf.lattices[name], policy)
    except (KEngelError, FieldError) as err:
        res.token("lattice_error")
        res.derived("error", str(err))
        return
    res.token("rank", rank)
    res.output = kdata


def op_bw(mf, task, policy, outputs, res):
    lam = _form(mf, task, "lam")
    L = _field(mf, task, "L")
    a_loc = _form(mf, task, "a")
    try:
        kdata, report = boothby_wang(mf.space, lam, L, a_loc, policy)
    except KEngelError as err:
        names = str(err).split(":", 1)[-1].strip()
        res.fail_tokens("bw_fail",
                        [n.strip() for n in names.split(",") if n.strip()])
        res.derived("error", str(err))
        return
    for name in ("contact", "legendrian", "omega closed",
                 "primitive matches", "L_R alpha", "L_R beta"):
        res.verdict(name, report[name])
    res.verdict("triple check", report["triple check"]["ok"])
    res.token("bw_pass")
    res.derived("alpha", fmt_form(kdata.data.alpha))
    res.derived("beta", fmt_form(kdata.data.beta))
    res.derived("R", fmt_field(kdata.data.R))
    res.output = kdata


def op_filling(mf, task, policy, outputs, res):
    kdata = _data(outputs, task, want=KEngelData)
    try:
        report = filling_check(kdata, policy)
    except KEngelError as err:
        names = str(err).split(":", 1)[-1].strip()
        res.fail_tokens("filling_fail",
                        [n.strip() for n in names.split(",") if n.strip()])
        res.derived("error", str(err))
        return
    for name, v in report.items():
        res.verdict(name, v)
    res.token("filling_pass")
    res.output = report


def op_t2(mf, task, policy, outputs, res):
    f = _scalar_arg(mf, task, "f")
    g = _scalar_arg(mf, task, "g")
    alpha0 = _form(mf, task, "alpha0")
    beta0 = _form(mf, task, "beta0")
    Omega = _form(mf, task, "Omega")
    prim1 = _form(mf, task, "prim1")
    prim2 = _form(mf, task, "prim2")
    n_parts = _need(task, "n").split()
    if len(n_parts) != 2:
        raise ManifestError(f"task '{task.name}': n needs two integers")
    try:
        n1, n2 = int(n_parts[0]), int(n_parts[1])
        eps = Fraction(task.args.get("eps", "1/2"))
    except ValueError as err:
        raise ManifestError(f"task '{task.name}': {err}")
    hints = {}
    # hint components live on the total space, whose fibre legs are p, q
    variables = list(mf.space.names) + ["p", "q"]
    for key in ("W", "X"):
        if key in task.args:
            parts = [p.strip() for p in task.args[key].split(";")]
            if len(parts) != 4:
                raise ManifestError(f"task '{task.name}': {key} hint needs "
                                    f"4 components")
            try:
                hints[key] = [ex.parse(p, variables, mf.space.params)
                              for p in parts]
            except Exception as err:
                raise ManifestError(f"task '{task.name}': bad {key} hint: "
                                    f"{err}")
    try:
        report, kdata = t2_bundle_condition(
            mf.space, f, g, alpha0, beta0, Omega, prim1, prim2, n1, n2,
            eps, policy, W=hints.get("W"), X=hints.get("X"))
    except KEngelError as err:
        res.fail_tokens("t2_fail", ["input"])
        res.derived("error", str(err))
        return
    bad = []
    first_ok, first_env = report["first condition"]
    res.lines.append(("verdict", "first condition",
                      "holds" if first_ok
                      else f"fails at {fmt_point(first_env)}"))
    if not first_ok:
        bad.append("first condition")
    for name in ("second condition", "third condition"):
        v = report[name]
        res.verdict(name, v)
        ok = v[0] if isinstance(v, tuple) else v.is_zero
        if not ok:
            bad.append(name)
    res.verdict("third condition (unweighted twist)",
                report["third condition (unweighted twist)"])
    if bad:
        res.fail_tokens("t2_fail", bad)
        return
    res.token("t2_pass")
    res.derived("alpha", fmt_form(kdata.data.alpha))
    res.derived("beta", fmt_form(kdata.data.beta))
    res.derived("R", fmt_field(kdata.data.R))
    res.output = kdata


OPS = {
    "engel": op_engel,
    "kengel": op_kengel,
    "kinvariants": op_kinvariants,
    "identities": op_identities,
    "contact": op_contact,
    "geodesic": op_geodesic,
    "pattern": op_pattern,
    "dbeta2": op_dbeta2,
    "commutant": op_commutant,
    "framing": op_framing,
    "lattice": op_lattice,
    "bw": op_bw,
    "filling": op_filling,
    "t2": op_t2,
}


# ---------------------------------------------------------------------------
# expectation matching

def match_expect(mf, raw, res):
    parts = raw.split()
    if parts and parts[0] == "reeb":
        if len(parts) < 4 or parts[2] != "=" or parts[1] not in "WXTR":
            raise ManifestError(f"bad expectation {raw!r}; usage: "
                                f"reeb F = c1; c2; ...")
        data = res.output
        if isinstance(data, KEngelData):
            data = data.data
        if data is None or not hasattr(data, parts[1]):
            return False
        want_text = raw.split("=", 1)[1]
        comps = [mf.space.scalar(p.strip()) for p in want_text.split(";")]
        if len(comps) != mf.space.dim:
            raise ManifestError(f"expectation {raw!r} needs "
                                f"{mf.space.dim} components")
        have = getattr(data, parts[1])
        for want, got in zip(comps, have.comps):
            if ex.cleanup(ex.add(got, ex.neg(want))) != ex.ZERO:
                return False
        return True
    return raw in res.tokens


# ---------------------------------------------------------------------------
# the run itself

class RunReport:
    def __init__(self, manifest_name, policy):
        self.manifest_name = manifest_name
        self.seed = policy.seed
        self.samples = policy.n_samples
        self.tol = policy.abs_tol
        self.results = []
        self.outputs = {}
        self.reference_error = None

    @property
    def mismatches(self):
        out = []
        for res in self.results:
            for raw, ok in res.expect_results:
                if not ok:
                    out.append((res.name, raw))
        return out

    @property
    def exit_code(self):
        if self.reference_error is not None:
            return 2
        return 1 if self.mismatches else 0

    def machine_text(self):
        lines = ["engelkit-report 1",
                 f"manifest {self.manifest_name}",
                 f"seed {self.seed}",
                 f"samples {self.samples}",
                 f"tol {fmt_float(self.tol)}",
                 f"tasks {len(self.results)}"]
        for res in self.results:
            lines.append(f"task {res.name} :: {res.op}")
            for token in sorted(res.tokens):
                lines.append(f"token {token}")
            for kind, name, text in res.lines:
                lines.append(f"{kind} {name} :: {text}")
            for raw, ok in res.expect_results:
                lines.append(f"expect {raw} :: "
                             f"{'ok' if ok else 'MISMATCH'}")
            lines.append(f"end {res.name}")
        lines.append(f"mismatches {len(self.mismatches)}")
        lines.append(f"exit {self.exit_code}")
        return "\n".join(lines) + "\n"

    def human_text(self):
        lines = [f"manifest {self.manifest_name} "
                 f"(seed {self.seed}, samples {self.samples}, "
                 f"tol {fmt_float(self.tol)})"]
        for res in self.results:
            lines.append(f"task {res.name} [{res.op}]  "
                         f"({res.seconds:.2f}s)")
            for kind, name, text in res.lines:
                lines.append(f"  {name}: {text}")
            for raw, ok in res.expect_results:
                mark = "ok" if ok else "MISMATCH"
                lines.append(f"  expect {raw} -> {mark}")
        n = len(self.mismatches)
        lines.append(f"{len(self.results)} task(s), {n} mismatch(es)")
        return "\n".join(lines) + "\n"


def run_manifest(mf, policy, manifest_name=None):
    name = manifest_name or mf.path.rsplit("/", 1)[-1]
    report = RunReport(name, policy)
    outputs = report.outputs
    for task in mf.tasks:
        res = TaskResult(task.name, task.op)
        report.results.append(res)
        if task.op not in OPS:
            report.reference_error = (f"task '{task.name}': unknown op "
                                      f"'{task.op}'")
            break
        task_policy = policy
        if task.overrides:
            task_policy = SamplingPolicy(
                seed=policy.seed,
                n_samples=task.overrides.get("samples", policy.n_samples),
                abs_tol=task.overrides.get("tol", policy.abs_tol))
        start = time.monotonic()
        try:
            OPS[task.op](mf, task, task_policy, outputs, res)
        except ManifestError as err:
            report.reference_error = str(err)
            break
        except (EngelError, KEngelError, CatalogError, FieldError) as err:
            res.token("task_error")
            res.token("task_error", type(err).__name__)
            res.derived("error", str(err))
        res.seconds = time.monotonic() - start
        outputs[task.name] = res.output
        try:
            for raw in task.expects:
                res.expect_results.append((raw, match_expect(mf, raw, res)))
        except ManifestError as err:
            report.reference_error = str(err)
            break
        if not task.expects and "task_error" in res.tokens:
            res.expect_results.append(("no unexpected error", False))
    return report
