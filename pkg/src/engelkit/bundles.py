"""Plane pairs assembled from fibre bundles over low-dimensional bases.

Three constructions and one verification live here:

* `boothby_wang`: a contact 3-space with a Legendrian direction gives a
  pair on the product with a circle, with the fibre as Reeb direction.
* `t2_bundle_condition`: three pointwise conditions on data over a surface
  chart decide whether the torus-bundle forms define a structure whose
  symmetry torus has rank 2; on success the forms are built and analyzed.
* `torus_family`: the standard 4-torus structure quotiented by a lattice
  with entries in a real quadratic field; the closure of the Reeb orbits
  is a torus whose dimension is computed exactly over the field.
* `filling_check`: a rank-1 structure bounds a contact 5-manifold collar
  via eta = beta + r^2 alpha; all restriction identities are verified.

Everything is chart-level: connection forms enter through user-supplied
local primitives, and verdicts are exact where the arithmetic allows.
"""

from fractions import Fraction

from . import expr as ex
from .contact import promote_form, restrict_to_section, thicken_space
from .engel import analyze, check_defining_forms
from .frames import FrameSpace, VectorField, d, interior, lie_form, pair, \
    wedge
from .kengel import KEngelData, KEngelError, kengel_check, kengel_invariants
from .metric import orthonormal_metric
from .qfield import FieldError, QNum, solve_linear, span_rank
from .sampling import is_zero_expr, is_zero_many, nonvanishing


def circle_product(space, name="t"):
    """The product of the base with a periodic fibre coordinate."""
    assert name not in space.names, f"name {name!r} already used"
    entries = list(space.entries) + [("coord", name, 0, 1, True)]
    brackets = {}
    for (i, j), vec in space.structure.items():
        brackets[(space.names[i], space.names[j])] = list(vec) + [0]
    return FrameSpace(entries, brackets=brackets, params=space.params)


def _form_zero(w, ranges, policy):
    return is_zero_many([ex.cleanup(c) for c in w.comps.values()]
                        or [ex.ZERO], ranges, policy)


def _field_zero(V, policy):
    return is_zero_many([ex.cleanup(c) for c in V.comps],
                        V.space.coord_ranges, policy)


def _scalar_d(space, f):
    """The differential of a chart function, as a one-form."""
    comps = []
    for i, name in enumerate(space.names):
        if space.kinds[i] == "coord":
            comps.append(ex.differentiate(f, name))
        else:
            comps.append(ex.ZERO)
    return space.one_form(comps)


# ---------------------------------------------------------------------------
# circle bundle over a contact 3-space

def boothby_wang(nspace, lam, L, a_loc, policy):
    """The invariant pair on the circle product over a contact 3-space.

    lam must be contact, L Legendrian, and a_loc a local primitive of the
    curvature omega = i_L(lam ^ dlam).  On the product with the fibre
    coordinate t, the pair is alpha = dt + a_loc, beta = lam; its Reeb
    direction is the fibre and the adapted framing is invariant along it.
    """
    assert nspace.dim == 3, "the base of the circle bundle must be 3-dim"
    dlam = d(lam)
    report = {}
    vol = wedge(lam, dlam)
    report["contact"] = nonvanishing(
        [ex.cleanup(c) for c in vol.comps.values()] or [ex.ZERO],
        nspace.coord_ranges, policy)
    report["legendrian"] = is_zero_expr(ex.cleanup(pair(lam, L)),
                                        nspace.coord_ranges, policy)
    omega = interior(L, vol)
    report["omega closed"] = _form_zero(d(omega), nspace.coord_ranges,
                                        policy)
    report["primitive matches"] = _form_zero(d(a_loc) - omega,
                                             nspace.coord_ranges, policy)
    bad = [k for k, v in report.items()
           if not (v[0] if isinstance(v, tuple) else v.is_zero)]
    if bad:
        raise KEngelError("circle-bundle preconditions fail: "
                          + ", ".join(bad))
    sp4 = circle_product(nspace, "t")
    alpha = promote_form(sp4, a_loc) + \
        sp4.one_form([ex.ZERO, ex.ZERO, ex.ZERO, ex.ONE])
    beta = promote_form(sp4, lam)
    drop = ex.cleanup(ex.neg(pair(a_loc, L)))
    W_hint = VectorField(sp4, list(L.comps) + [drop])
    kd = analyze(sp4, alpha.cleanup(), beta, policy, W=W_hint)
    fibre = sp4.basis_field(3)
    v = _field_zero(kd.R - fibre, policy)
    if not v.is_zero:
        raise KEngelError(
            f"Reeb direction is not the fibre: {v.describe()}")
    for name, form in (("L_R alpha", kd.alpha), ("L_R beta", kd.beta)):
        report[name] = _form_zero(lie_form(kd.R, form),
                                  sp4.coord_ranges, policy)
    inv, inv_ok = kengel_invariants(kd, policy)
    report["invariants"] = inv
    if not inv_ok:
        bad = [k for k, vv in inv.items() if not vv.is_zero]
        raise KEngelError("invariants fail on the circle product: "
                          + ", ".join(bad))
    g = orthonormal_metric(kd)
    check = kengel_check(kd, g, kd.R, policy)
    report["triple check"] = check
    if not check["ok"]:
        raise KEngelError("fibre direction fails the triple check")
    return KEngelData(kd, g, kd.R, rank=1), report


# ---------------------------------------------------------------------------
# torus bundle over a surface chart

def t2_bundle_condition(sigma, f, g, alpha0, beta0, Omega, prim1, prim2,
                        n1, n2, eps, policy, W=None, X=None):
    """Three conditions deciding the torus-bundle construction over sigma.

    The connection forms are theta_i = (fibre leg) + prim_i with
    d(prim_i) = n_i Omega, and the candidate pair is

        alpha = f theta_1 + (1 - eps f) theta_2 + alpha_0
        beta  = g (theta_1 - eps theta_2) + beta_0

    With N = n_1 - eps n_2 and the twisted area form
    Omega_t = (f N + n_2) Omega + d(alpha_0), the conditions are

        1. at every point, df != 0 or Omega_t != 0   (nonintegrability)
        2. N g^2 Omega + g d(beta_0) + beta_0 ^ dg != 0        (span)
        3. g Omega_t + beta_0 ^ df = 0                         (flag)

    The third is also evaluated with the f-weight dropped from the twist,
    for comparison; only the weighted form is equivalent to
    beta ^ d(alpha) = 0.  Returns (report, data) with data None when a
    condition fails.
    """
    assert sigma.dim == 2 and all(k == "coord" for k in sigma.kinds), \
        "the base must be a 2-dim chart"
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise KEngelError(f"eps = {eps} is not in (0,1)")
    for name, prim, n in (("first", prim1, n1), ("second", prim2, n2)):
        v = _form_zero(d(prim) - Omega.scale(ex.rat(n)),
                       sigma.coord_ranges, policy)
        if not v.is_zero:
            raise KEngelError(f"the {name} primitive does not integrate "
                              f"{n} times the area form: {v.describe()}")
    N = Fraction(n1) - eps * Fraction(n2)
    n_ex = ex.rat(N)
    df = _scalar_d(sigma, f)
    dg = _scalar_d(sigma, g)
    twist = ex.cleanup(ex.add(ex.mul(f, n_ex), ex.rat(n2)))
    omega_t = (Omega.scale(twist) + d(alpha0)).cleanup()

    report = {}
    df_comps = [ex.normalize(c) for c in df.comps.values()] or [ex.ZERO]
    ot_comps = [ex.normalize(c) for c in omega_t.comps.values()] or [ex.ZERO]
    first_ok, first_pt = True, None
    for env in policy.points(sigma.coord_ranges):
        va = max(abs(ex.evaluate(c, env)) for c in df_comps)
        vb = max(abs(ex.evaluate(c, env)) for c in ot_comps)
        if va <= policy.abs_tol and vb <= policy.abs_tol:
            first_ok, first_pt = False, env
            break
    report["first condition"] = (first_ok, first_pt)

    span_form = (Omega.scale(ex.mul(n_ex, ex.pow_(g, 2)))
                 + d(beta0).scale(g) + wedge(beta0, dg)).cleanup()
    report["second condition"] = nonvanishing(
        [ex.cleanup(c) for c in span_form.comps.values()] or [ex.ZERO],
        sigma.coord_ranges, policy)

    flag_form = (omega_t.scale(g) + wedge(beta0, df)).cleanup()
    report["third condition"] = _form_zero(flag_form, sigma.coord_ranges,
                                           policy)
    unweighted = (Omega.scale(ex.mul(n_ex, g)) + d(alpha0).scale(g)
                  + wedge(beta0, df)).cleanup()
    report["third condition (unweighted twist)"] = _form_zero(
        unweighted, sigma.coord_ranges, policy)

    ok = report["first condition"][0] and report["second condition"][0] \
        and report["third condition"].is_zero
    if not ok:
        return report, None

    assert "p" not in sigma.names and "q" not in sigma.names
    sp4 = FrameSpace(list(sigma.entries)
                     + [("coord", "p", 0, 1, True),
                        ("coord", "q", 0, 1, True)],
                     params=sigma.params)
    theta1 = sp4.one_form([prim1.comp((0,)), prim1.comp((1,)),
                           ex.ONE, ex.ZERO])
    theta2 = sp4.one_form([prim2.comp((0,)), prim2.comp((1,)),
                           ex.ZERO, ex.ONE])
    eps_ex = ex.rat(eps)
    profile = ex.cleanup(ex.add(ex.ONE, ex.neg(ex.mul(eps_ex, f))))
    alpha = (theta1.scale(f) + theta2.scale(profile)
             + promote_form(sp4, alpha0)).cleanup()
    beta = ((theta1 - theta2.scale(eps_ex)).scale(g)
            + promote_form(sp4, beta0)).cleanup()
    report["defining checks"] = check_defining_forms(sp4, alpha, beta,
                                                     policy)
    # hints arrive as component lists, since the 4-space only exists here
    hints = {}
    if W is not None:
        hints["W"] = VectorField(sp4, [ex.cleanup(c) for c in W])
    if X is not None:
        hints["X"] = VectorField(sp4, [ex.cleanup(c) for c in X])
    kd = analyze(sp4, alpha, beta, policy, **hints)
    r_expected = VectorField(sp4, [ex.ZERO, ex.ZERO, ex.rat(eps), ex.ONE])
    v = _field_zero(kd.R - r_expected, policy)
    if not v.is_zero:
        raise KEngelError(f"Reeb direction is not the declared torus "
                          f"direction: {v.describe()}")
    inv, inv_ok = kengel_invariants(kd, policy)
    report["invariants"] = inv
    if not inv_ok:
        bad = [k for k, vv in inv.items() if not vv.is_zero]
        raise KEngelError("invariants fail on the torus bundle: "
                          + ", ".join(bad))
    gm = orthonormal_metric(kd)
    check = kengel_check(kd, gm, kd.R, policy)
    report["triple check"] = check
    if not check["ok"]:
        raise KEngelError("torus direction fails the triple check")
    return report, KEngelData(kd, gm, kd.R, rank=2)


# ---------------------------------------------------------------------------
# the lattice quotient family

class LatticeSpec:
    """Four lattice vectors with entries in a declared real quadratic field.

    rows: four length-4 sequences of QNum over the same generators.  Exact
    rank computations need the entries in a declared finite basis; float
    entries are rejected by construction.
    """

    def __init__(self, gens, rows):
        self.gens = gens
        self.rows = []
        assert len(rows) == 4, "a lattice in the 4-torus needs 4 vectors"
        for row in rows:
            assert len(row) == 4
            for q in row:
                assert isinstance(q, QNum) and q.gens == gens
            self.rows.append(list(row))


def standard_torus(policy):
    """The turning-plane structure on the 4-torus chart.

    alpha = dz - cos(2 pi t) dx - sin(2 pi t) dy,
    beta = -sin(2 pi t) dx + cos(2 pi t) dy.
    """
    sp = FrameSpace([("coord", n, 0, 1, True) for n in "xyzt"])
    alpha = sp.one_form([sp.scalar("-cos(2*pi*t)"),
                         sp.scalar("-sin(2*pi*t)"), ex.ONE, ex.ZERO])
    beta = sp.one_form([sp.scalar("-sin(2*pi*t)"),
                        sp.scalar("cos(2*pi*t)"), ex.ZERO, ex.ZERO])
    W = sp.field([sp.scalar("cos(2*pi*t)"), sp.scalar("sin(2*pi*t)"),
                  ex.ONE, ex.ZERO])
    return analyze(sp, alpha, beta, policy, W=W, X=sp.basis_field(3))


def torus_family(lattice, policy):
    """Quotient the standard structure by a lattice; rank of the R-closure.

    The structure only descends when the last lattice vector is the fibre
    (0,0,0,1) and every t-component is an integer.  The Reeb direction is
    d/dz; its orbit closure in the quotient is a torus whose dimension is
    the rank over Q of the lattice coordinates of (0,0,1,0).
    """
    gens = lattice.gens
    one = QNum.of(gens, 1)
    zero = QNum.of(gens, 0)
    if lattice.rows[3] != [zero, zero, zero, one]:
        raise KEngelError("the fourth lattice vector must be the fibre "
                          "(0,0,0,1)")
    for i, row in enumerate(lattice.rows):
        t_comp = row[3]
        if not (t_comp.is_rational()
                and t_comp.rational_part().denominator == 1):
            raise KEngelError(f"lattice vector {i + 1} has non-integral "
                              f"t-component {t_comp}")
    matrix = [[lattice.rows[i][j] for i in range(4)] for j in range(4)]
    rhs = [zero, zero, one, zero]
    try:
        u = solve_linear(matrix, rhs)
    except FieldError:
        raise KEngelError("degenerate lattice")
    rank = span_rank([u])
    data = standard_torus(policy)
    g = orthonormal_metric(data)
    return KEngelData(data, g, data.R, rank=rank), rank


# ---------------------------------------------------------------------------
# the contact collar over a rank-1 structure

def filling_check(kdata, policy):
    """eta = beta + r^2 alpha on the collar r in [1/2, 3/2] is contact.

    With the Liouville-type direction L = (1/r) d/dr (so that r L = d/dr),
    the flow rate L_L eta equals 2 alpha on the nose -- the factor 2 comes
    from differentiating r^2 against the 1/r scaling and is reported, not
    normalized away.  The boundary r = 1 inherits the pair
    (2 alpha, beta + alpha), which annihilates the original plane field,
    and L preserves the boundary's contact volume exactly when the flag
    condition alpha ^ d(alpha) ^ beta = 0 holds.
    """
    if kdata.rank != 1:
        raise KEngelError(
            f"filling needs a rank-1 structure, got rank {kdata.rank}")
    data = kdata.data
    sp = data.space
    sp5 = thicken_space(sp, "r", Fraction(1, 2), Fraction(3, 2))
    r = ex.var("r")
    alpha5 = promote_form(sp5, data.alpha)
    beta5 = promote_form(sp5, data.beta)
    eta = (beta5 + alpha5.scale(ex.pow_(r, 2))).cleanup()
    deta = d(eta)
    vol = wedge(eta, wedge(deta, deta))
    report = {"contact volume": nonvanishing(
        [ex.cleanup(c) for c in vol.comps.values()] or [ex.ZERO],
        sp5.coord_ranges, policy)}
    L = VectorField(sp5, [ex.ZERO] * sp.dim + [ex.div(ex.ONE, r)])
    leta = lie_form(L, eta)
    report["flow rate is twice alpha"] = _form_zero(
        leta - alpha5.scale(ex.rat(2)), sp5.coord_ranges, policy)
    boundary = restrict_to_section(eta, ex.ONE, sp)
    report["boundary form is beta + alpha"] = _form_zero(
        boundary - (data.beta + data.alpha), sp.coord_ranges, policy)
    induced_alpha = restrict_to_section(leta, ex.ONE, sp)
    annihilate = []
    for form in (induced_alpha, boundary):
        for V in (data.W, data.X):
            annihilate.append(ex.cleanup(pair(form, V)))
    report["induced pair annihilates the plane"] = is_zero_many(
        annihilate, sp.coord_ranges, policy)
    even = wedge(data.alpha, d(data.alpha))
    report["alpha even contact"] = nonvanishing(
        [ex.cleanup(c) for c in even.comps.values()] or [ex.ZERO],
        sp.coord_ranges, policy)
    report["flag"] = _form_zero(wedge(even, data.beta), sp.coord_ranges,
                                policy)
    lvol = lie_form(L, vol)
    squeezed = [ex.cleanup(ex.substitute(c, {"r": ex.ONE}))
                for c in lvol.comps.values()] or [ex.ZERO]
    report["preserves boundary contact volume"] = is_zero_many(
        squeezed, sp.coord_ranges, policy)
    bad = [k for k, v in report.items()
           if not (v[0] if isinstance(v, tuple) else v.is_zero)]
    if bad:
        raise KEngelError("filling verdicts fail: " + ", ".join(bad))
    return report
