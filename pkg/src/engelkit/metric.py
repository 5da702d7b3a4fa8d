"""Frame metrics: duals of the defining pair, Killing residuals, tangency.

The metric a computation needs is almost always the one making the adapted
framing orthonormal; it is stored as a symmetric matrix of components over
the space's own basis so that non-orthonormal metrics can be fed through the
same checks.
"""

from . import expr as ex
from .frames import VectorField, _det, bracket, dual_coframe
from .sampling import is_zero_expr


class Metric:
    """A symmetric 2-tensor given by its matrix over the space's basis."""

    def __init__(self, space, matrix):
        self.space = space
        n = space.dim
        assert len(matrix) == n and all(len(row) == n for row in matrix)
        self.matrix = tuple(tuple(ex.normalize(c) for c in row)
                            for row in matrix)
        for i in range(n):
            for j in range(i):
                assert ex.cleanup(ex.add(self.matrix[i][j],
                                         ex.neg(self.matrix[j][i]))) \
                    == ex.ZERO, "metric matrix must be symmetric"

    def inner(self, U, V):
        terms = []
        for i, ui in enumerate(U.comps):
            if ui == ex.ZERO:
                continue
            for j, vj in enumerate(V.comps):
                if vj == ex.ZERO or self.matrix[i][j] == ex.ZERO:
                    continue
                terms.append(ex.mul(ui, self.matrix[i][j], vj))
        return ex.cleanup(ex.add(*terms)) if terms else ex.ZERO

    def norm_sq(self, U):
        return self.inner(U, U)

    def dual_field(self, w):
        """The vector field A with g(A, V) = w(V) for every V."""
        assert w.degree == 1
        n = self.space.dim
        rows = [list(row) for row in self.matrix]
        rhs = [w.comp((i,)) for i in range(n)]
        det = ex.cleanup(_det(rows))
        if det == ex.ZERO:
            raise ValueError("metric matrix is degenerate")
        comps = []
        for i in range(n):
            repl = [row[:i] + [rhs[k]] + row[i + 1:]
                    for k, row in enumerate(rows)]
            comps.append(ex.cleanup(ex.div(ex.cleanup(_det(repl)), det)))
        return VectorField(self.space, comps)


def framing_metric(space, framing, weights=None):
    """A metric diagonal in an arbitrary framing with the given weights."""
    theta = dual_coframe(list(framing))
    if weights is None:
        weights = [ex.ONE] * len(theta)
    n = space.dim
    matrix = []
    for i in range(n):
        row = []
        for j in range(n):
            row.append(ex.cleanup(ex.add(
                *[ex.mul(w, th.comp((i,)), th.comp((j,)))
                  for w, th in zip(weights, theta)])))
        matrix.append(row)
    return Metric(space, matrix)


def frame_metric(data, weights=None):
    """A metric diagonal in the adapted framing with the given weights.

    Any such metric keeps the plane field orthogonal to span(T, R), which
    is what the dual-pair identities need.
    """
    return framing_metric(data.space, data.framing(), weights)


def orthonormal_metric(data):
    """The metric making the adapted framing W, X, T, R orthonormal."""
    return frame_metric(data)


def killing_report(g, Z, policy):
    """Residuals of the Killing equation for Z, one per basis pair."""
    sp = g.space
    out = {}
    all_zero = True
    zbr = [bracket(Z, sp.basis_field(i)) for i in range(sp.dim)]
    for i in range(sp.dim):
        for j in range(i, sp.dim):
            ei, ej = sp.basis_field(i), sp.basis_field(j)
            resid = ex.cleanup(ex.add(
                sp.lie_scalar(Z, g.matrix[i][j]),
                ex.neg(g.inner(zbr[i], ej)),
                ex.neg(g.inner(ei, zbr[j]))))
            verdict = is_zero_expr(resid, sp.coord_ranges, policy)
            out[f"({sp.names[i]},{sp.names[j]})"] = verdict
            all_zero = all_zero and verdict.is_zero
    return out, all_zero


def tangency_expr(g, U, Up, V):
    """The obstruction to span(U, U') being geodesically closed along V.

    For U, U' spanning a plane orthogonal to V this is (minus twice) the
    V-component of the symmetrized second fundamental form:

        V(g(U, U')) + g([U, V], U') + g([U', V], U)
    """
    sp = g.space
    return ex.cleanup(ex.add(
        sp.lie_scalar(V, g.inner(U, Up)),
        g.inner(bracket(U, V), Up),
        g.inner(bracket(Up, V), U)))


def tangency_report(data, g, plane, policy):
    """Totally-geodesic test for one of the two canonical plane fields.

    plane="D" tests span(W, X) against the normals T, R; plane="R" tests
    span(T, R) against W, X.  Returns per-pair verdicts, the overall flag,
    and the first failing obstruction as a witness.
    """
    W, X, T, R = data.framing()
    if plane == "D":
        tangent = [("W", W), ("X", X)]
        normal = [("T", T), ("R", R)]
    elif plane == "R":
        tangent = [("T", T), ("R", R)]
        normal = [("W", W), ("X", X)]
    else:
        raise ValueError(f"unknown plane {plane!r}")
    checks = {}
    witness = None
    geodesic = True
    for ai in range(len(tangent)):
        for bi in range(ai, len(tangent)):
            na, U = tangent[ai]
            nb, Up = tangent[bi]
            for nv, V in normal:
                e = tangency_expr(g, U, Up, V)
                verdict = is_zero_expr(e, data.space.coord_ranges, policy)
                name = f"({na},{nb};{nv})"
                checks[name] = (e, verdict)
                if not verdict.is_zero:
                    geodesic = False
                    if witness is None:
                        witness = (name, ex.to_str(e))
    return {"checks": checks, "totally geodesic": geodesic,
            "witness": witness}


COMMUTATOR_ZEROS = ("a_WT", "c_WT", "d_WT", "a_WR", "c_WR",
                    "b_XT", "c_XT", "b_XR", "c_XR")


def bracket_pattern_report(data, policy):
    """The bracket-coefficient pattern forced by an orthonormal framing
    whose plane field is totally geodesic: nine entries vanish and two
    antisymmetric pairs cancel."""
    t = data.table
    sp = data.space
    out = {}
    all_zero = True
    for key in COMMUTATOR_ZEROS:
        verdict = is_zero_expr(ex.cleanup(t[key]), sp.coord_ranges, policy)
        out[key] = verdict
        all_zero = all_zero and verdict.is_zero
    for name, a, b in (("a_XT + b_WT", t["a_XT"], t["b_WT"]),
                       ("a_XR + b_WR", t["a_XR"], t["b_WR"])):
        verdict = is_zero_expr(ex.cleanup(ex.add(a, b)),
                               sp.coord_ranges, policy)
        out[name] = verdict
        all_zero = all_zero and verdict.is_zero
    return out, all_zero


def dual_pair_report(data, g, policy):
    """The metric duals of the defining pair lie in span(T, R) with
    coefficients read off from their inner products."""
    A = g.dual_field(data.alpha)
    B = g.dual_field(data.beta)
    T, R = data.T, data.R
    gab = g.inner(A, B)
    out = {"A": A, "B": B}
    diff = A - (T.scale(gab) + R.scale(g.norm_sq(A)))
    out["alpha dual in span"] = _field_zero(diff, data.space, policy)
    diff = B - (T.scale(g.norm_sq(B)) + R.scale(gab))
    out["beta dual in span"] = _field_zero(diff, data.space, policy)
    return out


def _field_zero(V, sp, policy):
    from .sampling import is_zero_many
    return is_zero_many([ex.cleanup(c) for c in V.comps],
                        sp.coord_ranges, policy)
