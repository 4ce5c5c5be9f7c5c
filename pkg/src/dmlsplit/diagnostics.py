"""Traces of the two competing estimates behind the finiteness argument.

* Decay: for a non-exceptional p, ``-log min(|g^n(y0) - p|_v, 1) / d^n``
  tends to 0. A finite run can only show the trend, so these rows are
  labelled "observed".
* Attraction: on return indices with ``|x_l|_v -> inf`` the curve forces
  ``phi_inf(y_l) -> 0``, and with a growth certificate the distance to a root
  of ``phi_inf`` shrinks like ``exp(-c d^n)``. Each such comparison is an
  exact rational inequality and is labelled "exact".

All distances are exact rationals; logs appear only in reported approximations.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

from . import affine, projective
from .affine import AffinePolyMap
from .errors import DomainError
from .exact_arith import ExactLog, Place, abs_v, format_rational, log_positive_rational
from .growth import GrowthCertificate, NotFound, find_certificate
from .heights import NonPreperiodic, Preperiodic, is_preperiodic
from .orbit import DEFAULT_BITSIZE_CAP
from .projective import ProjPoint, ProjRatMap, exceptional_set, polynomial_conjugacy
from .return_set import PlaneCurve, curve_eval, curve_infinity_data, normalize_at_infinity

# exact comparisons whose operands would exceed this many bits are skipped
COMPARISON_BIT_LIMIT = 1 << 24


# ---------------------------------------------------------------- decay trace


@dataclass(frozen=True)
class SilvermanRow:
    n: int
    point: ProjPoint
    capped: Fraction  # min(|g^n(y0) - p|_v, 1); 0 on an exact hit
    divisor: int  # d^n

    @property
    def is_zero(self) -> bool:
        return self.capped == 1

    @property
    def exact(self) -> ExactLog | None:
        """``s_n = log(1/capped) / d^n``; None when the orbit hits p."""
        return None if self.capped == 0 else ExactLog(1 / self.capped, self.divisor)

    def approx_text(self, precision_bits: int) -> str:
        e = self.exact
        return "inf" if e is None else e.approx(precision_bits).text()

    def as_dict(self, precision_bits: int = 53) -> dict:
        return {
            "n": self.n,
            "point": str(self.point),
            "capped_distance": format_rational(self.capped),
            "divisor": self.divisor,
            "s_n": self.approx_text(precision_bits),
            "label": "exact" if self.is_zero or self.capped == 0 else "observed",
        }


@dataclass(frozen=True)
class SilvermanTrace:
    g: ProjRatMap
    y0: ProjPoint
    p: ProjPoint
    place: Place
    rows: tuple
    precision: int
    warnings: tuple = ()

    def as_dict(self) -> dict:
        return {
            "g": str(self.g),
            "y0": str(self.y0),
            "p": str(self.p),
            "place": str(self.place),
            "precision": self.precision,
            "warnings": list(self.warnings),
            "terms": [r.as_dict(self.precision) for r in self.rows],
        }

    def to_csv(self) -> str:
        return _csv(
            ["n", "exact", "log_approx"],
            [[r.n, format_rational(r.capped), r.approx_text(self.precision)] for r in self.rows],
        )


def silverman_trace(
    g: ProjRatMap,
    y0: ProjPoint,
    p: ProjPoint,
    v: Place,
    nmax: int,
    precision: int = 53,
    bitsize_cap: int = DEFAULT_BITSIZE_CAP,
) -> SilvermanTrace:
    if p.is_infinity:
        raise DomainError("the target point must be finite in the affine chart (p = inf given)")
    warnings = []
    if g.degree >= 2 and p in exceptional_set(g).rational_points:
        warnings.append(f"{p} is exceptional for g; the decay statement does not apply")
    seg = projective.orbit(g, y0, nmax, bitsize_cap)
    target = p.affine()
    rows = []
    for n in range(nmax + 1):
        try:
            y = seg.value_at(n)
        except IndexError:
            warnings.append(f"orbit bit-size cap reached; trace stops at n = {n - 1}")
            break
        if y.is_infinity:
            capped = Fraction(1)
        else:
            capped = min(abs_v(y.affine() - target, v), Fraction(1))
        rows.append(SilvermanRow(n, y, capped, g.degree**n))
    return SilvermanTrace(g, y0, p, v, tuple(rows), precision, tuple(warnings))


# ---------------------------------------------------------------- attraction trace


@dataclass(frozen=True)
class BoundaryRow:
    n: int
    x: Fraction
    y: ProjPoint
    x_abs: Fraction
    phi_inf_abs: Fraction  # |phi_inf(y)|_v; at y = inf the value of the bihomogenized form at [1:0]
    root_distances: tuple  # (b, |y - b|_v) per rational root; empty at y = inf

    @property
    def at_infinity(self) -> bool:
        return self.y.is_infinity

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "x": format_rational(self.x),
            "y": str(self.y),
            "x_abs": format_rational(self.x_abs),
            "phi_inf_abs": format_rational(self.phi_inf_abs),
            "chart": "infinity" if self.at_infinity else "affine",
            "root_distances": {format_rational(b): format_rational(dist) for b, dist in self.root_distances},
        }


def boundary_rows(phi: PlaneCurve, points, v: Place, indices=None) -> list[BoundaryRow]:
    """Rows for explicit points ``(x_l, y_l)``; used for synthetic sequences too."""
    info = curve_infinity_data(phi)
    if not info.a_mn_nonzero:
        raise DomainError("curve meets the line x = inf at (inf, inf); normalize it first")
    row_form = phi.row_form(phi.m)
    rows = []
    for k, (x, y) in enumerate(points):
        x = Fraction(x)
        y = y if isinstance(y, ProjPoint) else ProjPoint.from_rational(y)
        n = k if indices is None else indices[k]
        if y.is_infinity:
            val = row_form(1, 0)
            dists = ()
        else:
            # phi_inf(y) = row_form(u, w) / w^n in the affine chart
            val = row_form(y.u, y.w) / Fraction(y.w) ** phi.n
            dists = tuple((b, abs_v(y.affine() - b, v)) for b, _ in info.rational_roots)
        rows.append(BoundaryRow(n, x, y, abs_v(x, v), abs_v(val, v), dists))
    return rows


@dataclass(frozen=True)
class BoundaryTrace:
    place: Place
    curve: PlaneCurve
    mobius: object  # Mobius used for normalization, or None
    roots: tuple  # (b, multiplicity)
    rows: tuple
    n_hi: int
    notes: tuple = ()

    def as_dict(self) -> dict:
        return {
            "place": str(self.place),
            "curve": self.curve.as_dict(),
            "normalization": None if self.mobius is None else self.mobius.matrix(),
            "rational_roots": [{"b": format_rational(b), "multiplicity": l} for b, l in self.roots],
            "n_hi": self.n_hi,
            "rows": [r.as_dict() for r in self.rows],
            "notes": list(self.notes),
        }

    def to_csv(self, precision: int = 53) -> str:
        header = ["n", "x_abs", "phi_inf_abs", "log_x_abs", "log_phi_inf_abs"]
        header += [f"dist_{format_rational(b)}" for b, _ in self.roots]
        lines = []
        for r in self.rows:
            line = [r.n, format_rational(r.x_abs), format_rational(r.phi_inf_abs), _log_text(r.x_abs, precision)]
            line.append(_log_text(r.phi_inf_abs, precision))
            dist = dict(r.root_distances)
            line += [format_rational(dist[b]) if b in dist else "" for b, _ in self.roots]
            lines.append(line)
        return _csv(header, lines)


def boundary_trace(
    f: AffinePolyMap,
    g: ProjRatMap,
    x0,
    y0: ProjPoint,
    phi: PlaneCurve,
    v: Place,
    nmax: int,
    bitsize_cap: int = DEFAULT_BITSIZE_CAP,
) -> BoundaryTrace:
    """Exact rows at every return index ``n <= nmax`` reachable within the bit-size cap.

    A curve through ``(inf, inf)`` is first moved by a small Möbius map in y;
    rows then refer to the transformed coordinate.
    """
    M = None
    notes = []
    if not curve_infinity_data(phi).a_mn_nonzero:
        norm = normalize_at_infinity(phi, g, y0)
        phi, g, y0, M = norm.curve, norm.g, norm.y0, norm.M
        notes.append("curve normalized at infinity; y-coordinates below are transformed")
    of = affine.orbit(f, x0, nmax, bitsize_cap)
    og = projective.orbit(g, y0, nmax, bitsize_cap)
    n_hi = nmax
    pts, idx = [], []
    for n in range(nmax + 1):
        try:
            x, y = of.value_at(n), og.value_at(n)
        except IndexError:
            n_hi = n - 1
            notes.append(f"orbit bit-size cap reached; trace stops at n = {n_hi}")
            break
        if curve_eval(phi, x, y) == 0:
            pts.append((x, y))
            idx.append(n)
    rows = boundary_rows(phi, pts, v, idx)
    return BoundaryTrace(v, phi, M, curve_infinity_data(phi).rational_roots, tuple(rows), n_hi, tuple(notes))


# ---------------------------------------------------------------- contradiction report


@dataclass(frozen=True)
class Hypothesis:
    name: str
    holds: bool | None  # None when undecided within budget
    detail: str

    def as_dict(self) -> dict:
        return {"hypothesis": self.name, "holds": self.holds, "detail": self.detail}


def compare_guarded(lhs: ExactLog, rhs: ExactLog, limit: int = COMPARISON_BIT_LIMIT) -> bool | None:
    """Exact ``lhs > rhs``, or None when the rational powers would be too large."""
    bits_l = _bits(lhs.arg) * rhs.div
    bits_r = _bits(rhs.arg) * lhs.div
    if max(bits_l, bits_r) > limit:
        return None
    return lhs > rhs


def attraction_pairs(rows, roots, cert: GrowthCertificate, precision: int = 53) -> list[dict]:
    """``(-log|y_l - b|_v, c1 d^n_l)`` per row and rational root, plus the phi_inf proxy."""
    d = cert.degree
    out = []
    for r in rows:
        rhs = cert.c1.scaled(d**r.n)
        cands = [(format_rational(b), dist) for b, dist in r.root_distances]
        if not r.at_infinity:
            cands.append(("phi_inf", r.phi_inf_abs))
        for name, dist in cands:
            entry = {"n": r.n, "target": name, "distance": format_rational(dist)}
            entry["c1_d^n"] = rhs.approx(precision).text()
            if dist == 0:
                entry.update(neg_log_distance="inf", exceeds=True, label="exact", backing="distance is exactly 0")
            elif dist >= 1:
                text = "0" if dist == 1 else "-" + ExactLog(dist).approx(precision).text()
                backing = f"distance {format_rational(dist)} >= 1 while c1 d^n > 0"
                entry.update(neg_log_distance=text, exceeds=False, label="exact", backing=backing)
            else:
                lhs = ExactLog(1 / dist)
                verdict = compare_guarded(lhs, rhs)
                entry["neg_log_distance"] = lhs.approx(precision).text()
                if verdict is None:
                    entry.update(exceeds=None, label="observed", backing="exact comparison skipped (operand size)")
                else:
                    entry.update(exceeds=verdict, label="exact", backing=_backing(lhs, rhs, verdict))
            out.append(entry)
    return out


def contradiction_report(
    f: AffinePolyMap,
    g: ProjRatMap,
    x0,
    y0: ProjPoint,
    phi: PlaneCurve,
    nmax: int,
    precision: int = 53,
    budget: int = 64,
    seed: int = 0,
    bitsize_cap: int = DEFAULT_BITSIZE_CAP,
) -> dict:
    """Hypothesis gates, growth certificate, attraction pairs and decay traces in one report."""
    hyps = []
    d = f.degree
    equal = d == g.degree
    hyps.append(Hypothesis("degree", d >= 2 and g.degree >= 2, f"deg f = {d}, deg g = {g.degree}"))
    hyps.append(Hypothesis("equal_degree", equal, "needed for the comparison of growth rates"))
    for name, m, pt in (("x0_not_preperiodic", f, x0), ("y0_not_preperiodic", g, y0)):
        if m.degree < 2:
            hyps.append(Hypothesis(name, None, "degree < 2"))
            continue
        verdict = is_preperiodic(m, pt, budget, bitsize_cap)
        holds = True if isinstance(verdict, NonPreperiodic) else False if isinstance(verdict, Preperiodic) else None
        hyps.append(Hypothesis(name, holds, str(verdict.as_dict())))
    if g.degree >= 2:
        conj = polynomial_conjugacy(g)
        detail = f"verdict {conj.kind}"
        if conj.kind != "NoIterate":
            detail += (
                f"; an iterate of g is conjugate to a polynomial (witness {conj.witness}),"
                " so the system reduces to the polynomial-polynomial case and this argument is not used"
            )
        hyps.append(Hypothesis("no_polynomial_iterate", conj.kind == "NoIterate", detail))
    fiber = phi.m == 0 or phi.n == 0
    hyps.append(Hypothesis("curve_not_fiber", not fiber, f"bidegree ({phi.m}, {phi.n})"))

    report = {
        "hypotheses": [h.as_dict() for h in hyps],
        "mode": "rigorous-hypotheses" if equal else "heuristic",
        "status": None,
        "message": None,
        "certificate": None,
        "boundary": None,
        "pairs": [],
        "silverman": [],
        "claims": [],
    }
    blocking = [h.name for h in hyps if h.holds is False and h.name != "equal_degree"]
    if blocking:
        report["status"] = "hypothesis_failed"
        report["message"] = "failing hypotheses: " + ", ".join(blocking)
        return report
    undecided = [h.name for h in hyps if h.holds is None]
    if undecided:
        report["claims"].append(
            {"claim": "hypotheses undecided within budget: " + ", ".join(undecided), "label": "observed"}
        )

    cert = find_certificate(f, x0, budget, seed=seed, bitsize_cap=bitsize_cap)
    if isinstance(cert, NotFound):
        report["status"] = "no_certificate"
        report["message"] = f"no growth certificate within {budget} iterates"
        return report
    report["certificate"] = cert.as_dict(precision)
    trace = boundary_trace(f, g, x0, y0, phi, cert.place, nmax, bitsize_cap)
    report["boundary"] = trace.as_dict()
    if not trace.rows:
        report["status"] = "vacuous"
        report["message"] = "no return indices; contradiction vacuous"
        report["claims"].append(
            {"claim": f"no return index n <= {trace.n_hi}", "label": "exact", "backing": "Phi(x_n, y_n) != 0 exactly"}
        )
        return report

    pairs = attraction_pairs(trace.rows, trace.roots, cert, precision)
    report["pairs"] = pairs
    g_used, y_used = g, y0
    if trace.mobius is not None:
        g_used, y_used = projective.conjugate(g, trace.mobius), trace.mobius(y0)
    for b, _ in trace.roots:
        st = silverman_trace(g_used, y_used, ProjPoint.from_rational(b), cert.place, nmax, precision, bitsize_cap)
        report["silverman"].append(st.as_dict())
    n_exceed = sum(1 for p in pairs if p["exceeds"] is True and p["label"] == "exact")
    report["claims"].append(
        {
            "claim": f"{n_exceed} of {len(pairs)} distance terms satisfy -log dist > c1 d^n",
            "label": "exact",
            "backing": "per-pair rational power comparisons listed under 'pairs'",
        }
    )
    report["claims"].append(
        {
            "claim": "an infinite return set would keep these terms above c1 d^n, against the decay of s_n",
            "label": "observed",
            "backing": "finite traces only; the limit itself is not computed",
        }
    )
    report["status"] = "traced"
    report["message"] = f"{len(trace.rows)} return indices traced at place {cert.place}"
    return report


# ---------------------------------------------------------------- helpers


def _bits(q: Fraction) -> int:
    return max(q.numerator.bit_length(), q.denominator.bit_length())


def _backing(lhs: ExactLog, rhs: ExactLog, verdict: bool) -> str:
    op = ">" if verdict else "<="

    def show(q: Fraction) -> str:
        return format_rational(q) if _bits(q) <= 256 else f"<{_bits(q)}-bit rational>"

    return f"({show(lhs.arg)})^{rhs.div} {op} ({show(rhs.arg)})^{lhs.div}"


def _log_text(q: Fraction, precision: int) -> str:
    if q == 0:
        return "-inf"
    return log_positive_rational(q, precision).text()


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()
