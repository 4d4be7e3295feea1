"""Rational points on ``{f = 1}`` near a target point, with certificates.

:func:`approximate` runs the construction: build the body for
``t = 2T/(3 C_f)``; if it holds a nonzero lattice point, that point is a
zero of ``F`` (Fall1); otherwise combine the successive-minima vectors with a
small zero of the induced form (Fall2).  When the construction returns a
denominator above ``T`` (possible when ``T`` is small compared to ``C_f``),
the least-height zeros of ``F`` with ``q <= T`` are searched directly
(Direct).

Certificates are plain JSON.  Every derived field is produced by
:func:`_assemble` from a handful of inputs, and :func:`verify_certificate`
reruns that function and compares field by field, so a change to any single
field is detected.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Optional, Sequence

from . import arith
from .arith import (
    DEFAULT_PRECISION,
    DEFAULT_PRECISION_CAP,
    Certainty,
    RealEnclosure,
    certified_leq,
    certified_lt,
    enclosure,
    enclosure_to_strings,
    fraction_to_decimal,
    fraction_to_str,
    parse_rational,
)
from .errors import (
    AnisotropicFormError,
    BudgetExceeded,
    ContractViolation,
    IndeterminateComparison,
    InputError,
    NoQuadricPoint,
    QuadApproxError,
)
from .forms import QuadraticForm, bareiss_det, compute_constants
from .lattice import (
    DEFAULT_MAX_POINTS,
    IndependenceTracker,
    _exact_inverse,
    first_minimum_below_one,
    integer_rank,
    lll_minima,
    successive_minima_points,
)
from .transforms import DEFAULT_SURFACE_TOL, SurfacePoint, TransformStack, check_surface
from .zeros import (
    DEFAULT_BUDGET,
    InducedForm,
    cassels_bound,
    height,
    iter_zeros,
    lift_isotropy,
    small_zero,
    zero_key,
)

SCHEMA = "quadapprox.certificate/1"

CERTIFIED = "certified"
CERTIFIED_SLACK = "certified-with-slack"
CERTIFIED_WEAK = "certified-with-weakened-constant"
FAILED = "failed"
INDETERMINATE = "indeterminate"

CASES = ("Fall1", "Fall2", "Direct", "Independent")
MODES = ("standard", "lll", "row")


class VerifyStatus(str, enum.Enum):
    VALID = "valid"
    INVALID = "invalid"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class Budgets:
    max_points: int = DEFAULT_MAX_POINTS
    zero_budget: int = DEFAULT_BUDGET
    row_budget: int = 2_000_000
    precision_cap: int = DEFAULT_PRECISION_CAP


@dataclass(frozen=True)
class QuadricRationalPoint:
    """``r = a / q`` given by the integer vector ``g = (a, q)``."""

    numerators: tuple[int, ...]
    q: int

    @classmethod
    def from_vector(cls, g: Sequence[int]) -> "QuadricRationalPoint":
        return cls(tuple(int(x) for x in g[:-1]), int(g[-1]))

    @property
    def vector(self) -> tuple[int, ...]:
        return self.numerators + (self.q,)

    @property
    def r(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, self.q) for a in self.numerators)

    def primitive(self) -> "QuadricRationalPoint":
        d = 0
        for x in self.vector:
            d = math.gcd(d, x)
        return QuadricRationalPoint.from_vector([x // d for x in self.vector])

    def on_quadric(self, form: QuadraticForm) -> bool:
        return form.lift()(list(self.vector)) == 0


@dataclass(frozen=True)
class ApproximationCertificate:
    """A certificate held as its canonical JSON dictionary."""

    data: dict

    @property
    def verdict(self) -> str:
        return self.data["verdict"]

    @property
    def case(self) -> str:
        return self.data["case"]

    @property
    def g(self) -> tuple[int, ...]:
        return tuple(self.data["g"])

    @property
    def q(self) -> int:
        return int(self.data["q"])

    @property
    def point(self) -> QuadricRationalPoint:
        return QuadricRationalPoint.from_vector(self.g)

    @property
    def T(self) -> Fraction:
        return parse_rational(self.data["T"])

    @property
    def lhs_exact(self) -> Optional[Fraction]:
        v = self.data["lhs"]["exact"]
        return None if v is None else parse_rational(v)

    @property
    def kappa_upper(self) -> Fraction:
        return Fraction(self.data["kappa"][1])

    @property
    def certified(self) -> bool:
        return self.verdict in (CERTIFIED, CERTIFIED_SLACK, CERTIFIED_WEAK)

    def to_json(self) -> dict:
        return json.loads(json.dumps(self.data))

    def dumps(self) -> str:
        return dumps(self.data)


def dumps(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


# inputs ------------------------------------------------------------------------------

def _coerce_form(form) -> QuadraticForm:
    if isinstance(form, QuadraticForm):
        return form
    return QuadraticForm(form)


def _coerce_alpha(alpha) -> SurfacePoint:
    if isinstance(alpha, SurfacePoint):
        return alpha
    if any(isinstance(x, str) for x in alpha):
        return SurfacePoint.from_exprs([str(x) for x in alpha])
    return SurfacePoint.rational(alpha)


def _coerce_T(T) -> Fraction:
    T = parse_rational(T) if isinstance(T, str) else Fraction(T)
    if T < 1:
        raise InputError(f"T must be at least 1, got {T}")
    return T


def _isotropy_reason(form: QuadraticForm, budget: int) -> str:
    res = lift_isotropy(form.gram, budget)
    if not res.isotropic:
        raise AnisotropicFormError("F anisotropic: no integer zero up to the Cassels bound "
                                   f"{res.bound}")
    return res.reason


def t_enclosure(form: QuadraticForm, T: Fraction, precision: int) -> RealEnclosure:
    """``t = 2T / (3 C_f)``."""
    return enclosure(Fraction(2, 3) * T, precision) / compute_constants(form, precision).C_f


class _TSource:
    """Picklable ``precision -> t`` callable for :class:`TransformStack`."""

    def __init__(self, form: QuadraticForm, T: Fraction):
        self.form, self.T = form, T

    def __call__(self, precision: int) -> RealEnclosure:
        return t_enclosure(self.form, self.T, precision)


@lru_cache(maxsize=64)
def _stack(form: QuadraticForm, alpha: SurfacePoint, T: Fraction, precision: int) -> TransformStack:
    return TransformStack.build(form, alpha, _TSource(form, T), precision)


def _sign_normalise(g: Sequence[int]) -> tuple[int, ...]:
    g = tuple(int(x) for x in g)
    if g[-1] == 0:
        # F(a, 0) = f(a) = 0 forces a = 0 for positive definite f
        raise ContractViolation("zero of F with q = 0 and a != 0; f is not positive definite")
    return g if g[-1] > 0 else tuple(-x for x in g)


def _gcd(v: Sequence[int]) -> int:
    d = 0
    for x in v:
        d = math.gcd(d, int(x))
    return d


def _height_bound(form: QuadraticForm, T: Fraction) -> int:
    """Height bound for zeros ``(a, q)`` of ``F`` with ``|q| <= T``: ``a_i^2 <= q^2 (G^{-1})_ii``."""
    inv = _exact_inverse(form.gram)
    qmax = math.floor(T)
    best = qmax
    for i in range(form.n):
        best = max(best, math.isqrt(math.floor(qmax * qmax * inv[i][i])))
    return best


# evaluation ---------------------------------------------------------------------------

def _error_value(form: QuadraticForm, alpha: SurfacePoint, g: Sequence[int], precision: int):
    """``f(alpha - r)`` exactly (rational alpha) or as an enclosure."""
    q = g[-1]
    if alpha.exact:
        return Fraction(form([alpha.coords[i] - Fraction(g[i], q) for i in range(form.n)]))
    vals = alpha.enclosures(precision)
    return form([vals[i] - Fraction(g[i], q) for i in range(form.n)])


def _enc_json(x, precision: int) -> list[str]:
    return enclosure_to_strings(enclosure(x, precision))


def _value_json(x, precision: int):
    if isinstance(x, RealEnclosure):
        return enclosure_to_strings(x)
    return fraction_to_str(Fraction(x))


def _row_gauge_bound(gauge: RealEnclosure) -> Fraction:
    """A decimal strictly above the gauge; keeps the row comparison decidable."""
    up = gauge.upper * (1 + Fraction(1, 2 ** 40)) + Fraction(1, 2 ** 60)
    return Fraction(fraction_to_decimal(up, 20, "up"))


def _kappa_base(mode: str, consts, n: int, stack: TransformStack, g, precision: int):
    if mode == "standard":
        return consts.kappa_f, {}
    if mode == "lll":
        factor = enclosure(2 ** (n * (n + 1) // 2), precision) * enclosure(2, precision).sqrt() ** (n + 1)
        return consts.kappa_f * factor, {}
    if mode == "row":
        c = _row_gauge_bound(stack.gauge(g))
        kappa = 6 * consts.C_f * arith.emax(consts.C_f, enclosure(c, precision))
        return kappa, {"row_gauge_bound": fraction_to_str(c)}
    raise InputError(f"unknown kappa mode {mode!r}")


def _slack(base: RealEnclosure, eps: Fraction, q: int, T: Fraction, precision: int) -> RealEnclosure:
    """``(sqrt(kappa) + eps sqrt(qT))^2`` bounds ``f(alpha - r) qT`` when ``|f(alpha) - 1| <= eps``."""
    root = base.sqrt() + enclosure(eps, precision) * enclosure(q * T, precision).sqrt()
    return root.square()


def _generator_diagnostics(form, stack, generators, zeta, precision) -> dict:
    n = form.n
    induced = InducedForm.from_generators(form.lift().gram, generators)
    minima = [stack.gauge(gv) for gv in generators]
    lam = minima[0]
    for m in minima[1:]:
        lam = arith.emax(lam, m)
    prod = enclosure(1, precision)
    for m in minima:
        prod = prod * m
    consts = compute_constants(form, precision)
    minkowski = certified_leq(prod, enclosure(2 ** n, precision) / consts.v_f)
    coeff_check = certified_leq(enclosure(induced.max_coefficient(), precision), 3 * lam.square())
    return {
        "generators": [list(gv) for gv in generators],
        "zeta": list(zeta),
        "zeta_height": height(zeta),
        "induced_form": [list(r) for r in induced.coeffs],
        "cassels_bound": str(cassels_bound(induced.coeffs)),
        "minima": [enclosure_to_strings(m) for m in minima],
        "coefficient_check": coeff_check.value,
        "minkowski_check": minkowski.value,
    }


def _assemble(form: QuadraticForm, alpha: SurfacePoint, T: Fraction, precision: int,
              g: Sequence[int], case: str, mode: str, inputs: dict) -> dict:
    """All derived fields of a certificate from its inputs.

    ``inputs`` holds the case data: ``isotropy``, ``gcd_reduced``,
    ``minima_exact`` and, by case, ``generators``/``zeta`` or ``construction``.
    """
    n = form.n
    g = tuple(int(x) for x in g)
    q = g[-1]
    point = QuadricRationalPoint.from_vector(g)
    consts = compute_constants(form, precision)
    stack = _stack(form, alpha, T, precision)
    on_quadric = form.lift()(list(g)) == 0

    err = _error_value(form, alpha, g, precision) if q != 0 else None
    lhs_exact = Fraction(err) * q * T if err is not None and not isinstance(err, RealEnclosure) else None
    lhs = enclosure(lhs_exact, precision) if lhs_exact is not None else (
        err * enclosure(q * T, precision) if err is not None else None)

    residual = alpha.residual(form, precision)
    eps = abs(residual).upper if isinstance(residual, RealEnclosure) else abs(Fraction(residual))

    base, extra_diag = _kappa_base(mode, consts, n, stack, g, precision)
    kind, kappa = mode, base
    if not (on_quadric and 1 <= q <= T) or lhs is None:
        verdict = FAILED
    else:
        cmp = certified_leq(lhs, base)
        if cmp is not Certainty.TRUE and eps > 0:
            inflated = _slack(base, eps, q, T, precision)
            cmp2 = certified_leq(lhs, inflated)
            if cmp2 is Certainty.TRUE or cmp is Certainty.FALSE:
                cmp, kind, kappa = cmp2, mode + "-slack", inflated
        if cmp is Certainty.TRUE:
            if mode == "lll":
                verdict = CERTIFIED_WEAK
            elif kind.endswith("-slack"):
                verdict = CERTIFIED_SLACK
            else:
                verdict = CERTIFIED
        elif cmp is Certainty.FALSE:
            verdict = FAILED
        else:
            verdict = INDETERMINATE

    diag: dict[str, Any] = {
        "mode": mode,
        "isotropy": inputs["isotropy"],
        "gcd_reduced": int(inputs.get("gcd_reduced", 1)),
    }
    diag.update(extra_diag)
    if q != 0:
        u, v, w = stack.pullback_chain(g)
        diag["u"] = [enclosure_to_strings(enclosure(x, precision)) for x in u]
        diag["v"] = [enclosure_to_strings(enclosure(x, precision)) for x in v]
        diag["w"] = [enclosure_to_strings(enclosure(x, precision)) for x in w]
        parts = stack.lorentz_parts(g)
        h = parts["v_n"]
        diag["v_n"] = _value_json(h, precision)
        diag["gauge"] = enclosure_to_strings(stack.gauge(g))
        two_cf = 2 * consts.C_f
        diag["minu"] = certified_lt(abs(enclosure(q - h, precision)), two_cf / stack.t).value
        diag["pilu"] = certified_lt(abs(enclosure(q + h, precision)), two_cf * stack.t).value
        # F(g - q alpha_hat) = 2q(q - v_n) and f(alpha_hat - r) = F(g - q alpha_hat)/q^2
        a_hat = stack.alpha_hat
        diff = [g[i] - q * a_hat[i] for i in range(n)]
        lhs_id = form(diff)
        rhs_id = 2 * q * (q - h)
        if isinstance(lhs_id, RealEnclosure) or isinstance(rhs_id, RealEnclosure):
            ok = enclosure(lhs_id, precision).intersects(enclosure(rhs_id, precision))
        else:
            ok = lhs_id == rhs_id
        diag["identity_check"] = bool(ok)
    if mode == "lll" and lhs is not None:
        diag["meets_kappa_f"] = certified_leq(lhs, consts.kappa_f).value
    if case == "Fall2" or (case == "Independent" and "generators" in inputs):
        diag.update(_generator_diagnostics(form, stack, inputs["generators"], inputs["zeta"], precision))
    if case == "Fall2":
        diag["minima_exact"] = bool(inputs.get("minima_exact", True))
    if case == "Independent":
        diag["source"] = inputs.get("source", "direct")
    if case == "Direct":
        c = inputs["construction"]
        cg = tuple(int(x) for x in c["g"])
        cd: dict[str, Any] = {"case": c["case"], "g": list(cg), "q": cg[-1]}
        if c["case"] == "Fall2":
            cd.update(_generator_diagnostics(form, stack, c["generators"], c["zeta"], precision))
            cd["minima_exact"] = bool(c.get("minima_exact", True))
        else:
            cd["gauge"] = enclosure_to_strings(stack.gauge(cg))
        diag["construction"] = cd

    return {
        "schema": SCHEMA,
        "form": form.to_json(),
        "alpha": alpha.to_json(),
        "T": fraction_to_str(T),
        "precision": precision,
        "t": enclosure_to_strings(stack.t),
        "case": case,
        "g": list(g),
        "g_primitive": list(point.primitive().vector) if q != 0 else list(g),
        "q": q,
        "r": [fraction_to_str(x) for x in point.r] if q != 0 else None,
        "kappa_f": enclosure_to_strings(consts.kappa_f),
        "kappa": enclosure_to_strings(kappa),
        "kappa_kind": kind,
        "lhs": {
            "exact": fraction_to_str(lhs_exact) if lhs_exact is not None else None,
            "enclosure": enclosure_to_strings(lhs) if lhs is not None else None,
        },
        "verdict": verdict,
        "surface_residual": _value_json(residual, precision),
        "diagnostics": diag,
    }


def _finalise(form, alpha, T, precision, g, case, mode, inputs, cap) -> ApproximationCertificate:
    p = precision
    while True:
        data = _assemble(form, alpha, T, p, g, case, mode, inputs)
        if data["verdict"] != INDETERMINATE:
            return ApproximationCertificate(data)
        if p >= cap:
            raise IndeterminateComparison(
                f"certificate inequality undecided at {p} bits for g = {list(g)}"
            )
        p = min(2 * p, cap)


# construction --------------------------------------------------------------------------

def _fall2(form: QuadraticForm, stack: TransformStack, lll_only: bool, budgets: Budgets):
    n = form.n
    minima = None
    if not lll_only:
        try:
            minima = successive_minima_points(stack, n + 1, budgets.max_points)
        except BudgetExceeded:
            minima = None
    if minima is None:
        minima = lll_minima(stack, n + 1)
    induced = InducedForm.from_generators(form.lift().gram, minima.vectors)
    zeta = small_zero(induced, budgets.zero_budget)
    raw = induced.combine(zeta.vector)
    g = _sign_normalise(raw)
    z = zeta.vector if g == raw else tuple(-x for x in zeta.vector)
    inputs = {
        "generators": [list(v) for v in minima.vectors],
        "zeta": list(z),
        "minima_exact": minima.exact,
    }
    return g, inputs, minima, induced


def construct(form: QuadraticForm, stack: TransformStack, lll_only: bool = False,
              budgets: Budgets = Budgets()) -> tuple[tuple[int, ...], str, dict]:
    """The raw construction: ``(g, case, inputs)`` with ``case`` Fall1 or Fall2."""
    try:
        v = first_minimum_below_one(stack, 1, budgets.max_points, budgets.precision_cap)
    except IndeterminateComparison:
        # boundary points only; no point is certified inside, Fall2 stays valid
        v = None
    if v is not None:
        return _sign_normalise(v), "Fall1", {"minima_exact": True}
    g, inputs, _, _ = _fall2(form, stack, lll_only, budgets)
    return g, "Fall2", inputs


def _score(form, alpha, g, precision) -> Fraction:
    e = _error_value(form, alpha, g, precision)
    e = e.mid if isinstance(e, RealEnclosure) else e
    return e * g[-1]


def direct_point(form: QuadraticForm, alpha: SurfacePoint, T: Fraction, budgets: Budgets = Budgets(),
                 precision: int = DEFAULT_PRECISION) -> tuple[int, ...]:
    """Among the least-height zeros of ``F`` with ``1 <= q <= T`` the one minimising ``f(alpha - r) q``."""
    gram = form.lift().gram
    for _, zs in iter_zeros(gram, _height_bound(form, T), budgets.zero_budget):
        cands = [_sign_normalise(z) for z in zs if 1 <= abs(z[-1]) <= T]
        if cands:
            return min(cands, key=lambda z: (_score(form, alpha, z, precision), zero_key(z)))
    raise NoQuadricPoint(f"F has no zero with 1 <= q <= {T}")


def approximate(form, alpha, T, precision: int = DEFAULT_PRECISION, *, lll_only: bool = False,
                reduce_gcd: bool = False, surface_tol: Fraction = DEFAULT_SURFACE_TOL,
                budgets: Budgets | None = None) -> ApproximationCertificate:
    """A rational point ``r = a/q`` on ``{f = 1}`` with ``1 <= q <= T`` and its certificate."""
    form, alpha, T = _coerce_form(form), _coerce_alpha(alpha), _coerce_T(T)
    budgets = budgets or Budgets()
    arith._check_precision(precision)
    iso = _isotropy_reason(form, budgets.zero_budget)
    check_surface(form, alpha, surface_tol, precision)
    stack = _stack(form, alpha, T, precision)
    g, case, inputs = construct(form, stack, lll_only, budgets)
    mode = "standard" if inputs.get("minima_exact", True) else "lll"
    if g[-1] > T:
        construction = {"case": case, "g": list(g), **inputs}
        g = direct_point(form, alpha, T, budgets, precision)
        case, mode, inputs = "Direct", "standard", {"construction": construction}
    d = 1
    if reduce_gcd:
        d = _gcd(g)
        g = tuple(x // d for x in g)
    inputs = {**inputs, "isotropy": iso, "gcd_reduced": d}
    return _finalise(form, alpha, T, precision, g, case, mode, inputs, budgets.precision_cap)


# independent points -----------------------------------------------------------------------

@dataclass(frozen=True)
class IndependentResult:
    certificates: tuple[ApproximationCertificate, ...]
    complete: bool
    determinant: Optional[int]

    @property
    def vectors(self) -> list[tuple[int, ...]]:
        return [c.g for c in self.certificates]

    def to_json(self) -> dict:
        return {
            "certificates": [c.to_json() for c in self.certificates],
            "complete": self.complete,
            "partial": not self.complete,
            "rank": integer_rank(self.vectors),
            "determinant": None if self.determinant is None else str(self.determinant),
        }


def approximate_independent(form, alpha, T, precision: int = DEFAULT_PRECISION, *,
                            surface_tol: Fraction = DEFAULT_SURFACE_TOL,
                            budgets: Budgets | None = None) -> IndependentResult:
    """``n + 1`` certificates with linearly independent vectors ``(a^k, q^k)``.

    The first is the single-point certificate.  Further rows come from zeros
    of the induced form (when the construction produced one) and then from
    least-height zeros of ``F``; each row is certified against its own
    constant ``6 C_f max(C_f, c_k)`` with ``c_k`` the gauge of the row vector.
    """
    form, alpha, T = _coerce_form(form), _coerce_alpha(alpha), _coerce_T(T)
    budgets = budgets or Budgets()
    first = approximate(form, alpha, T, precision, surface_tol=surface_tol, budgets=budgets)
    n = form.n
    iso = first.data["diagnostics"]["isotropy"]
    tracker = IndependenceTracker(n + 1)
    tracker.add(first.g)
    rows: list[ApproximationCertificate] = [first]

    def take(z, inputs) -> bool:
        if z[-1] == 0:
            return False
        g = _sign_normalise(z)
        if "zeta" in inputs and tuple(g) != tuple(z):
            inputs = {**inputs, "zeta": [-x for x in inputs["zeta"]]}
        if not 1 <= g[-1] <= T or not tracker.is_independent(g):
            return False
        cert = _finalise(form, alpha, T, precision, g, "Independent", "row",
                         {**inputs, "isotropy": iso}, budgets.precision_cap)
        if not cert.certified:
            return False
        tracker.add(g)
        rows.append(cert)
        return True

    source = first.data["diagnostics"]
    gens = source.get("generators") or (source.get("construction") or {}).get("generators")
    if gens:
        induced = InducedForm.from_generators(form.lift().gram, gens)
        try:
            for _, zs in iter_zeros(induced.coeffs, cassels_bound(induced.coeffs), budgets.row_budget):
                for zeta in zs:
                    if len(rows) < n + 1:
                        take(induced.combine(zeta), {"source": "induced", "generators": gens,
                                                     "zeta": list(zeta)})
                if len(rows) == n + 1:
                    break
        except BudgetExceeded:
            pass
    if len(rows) < n + 1:
        try:
            for _, zs in iter_zeros(form.lift().gram, _height_bound(form, T), budgets.row_budget):
                for z in sorted(zs, key=lambda z: (_score(form, alpha, _sign_normalise(z), precision)
                                                   if z[-1] else 0, zero_key(z))):
                    if len(rows) < n + 1:
                        take(z, {"source": "direct"})
                if len(rows) == n + 1:
                    break
        except BudgetExceeded:
            pass
    complete = len(rows) == n + 1
    det = None
    if complete:
        det = bareiss_det([c.g for c in rows])
    return IndependentResult(tuple(rows), complete, det)


# verification -------------------------------------------------------------------------------

def _fail(reasons: Optional[list], msg: str) -> VerifyStatus:
    if reasons is not None:
        reasons.append(msg)
    return VerifyStatus.INVALID


def _gauge_below_one(form, alpha, T, precision, g, cap) -> Certainty:
    p = precision
    while True:
        res = certified_lt(_stack(form, alpha, T, p).gauge(g), 1)
        if res is not Certainty.UNKNOWN or p >= cap:
            return res
        p = min(2 * p, cap)


def _check_generators(form, gens, zeta, target, reasons) -> bool:
    n = form.n
    if len(gens) != n + 1 or any(len(v) != n + 1 for v in gens) or len(zeta) != n + 1:
        reasons.append("generator data has the wrong shape")
        return False
    if integer_rank(gens) != n + 1:
        reasons.append("generators are linearly dependent")
        return False
    induced = InducedForm.from_generators(form.lift().gram, gens)
    if induced(zeta) != 0:
        reasons.append("zeta is not a zero of the induced form")
        return False
    if tuple(induced.combine(zeta)) != tuple(target):
        reasons.append("sum of zeta_i g_i does not reproduce the point")
        return False
    return True


def verify_certificate(cert, form=None, alpha=None, reasons: Optional[list] = None,
                       precision_cap: int = DEFAULT_PRECISION_CAP) -> VerifyStatus:
    """Independent re-check of a certificate (object, dict or JSON text)."""
    reasons = reasons if reasons is not None else []
    try:
        data = cert.data if isinstance(cert, ApproximationCertificate) else (
            json.loads(cert) if isinstance(cert, str) else cert)
        return _verify(data, form, alpha, reasons, precision_cap)
    except (QuadApproxError, KeyError, TypeError, ValueError, IndexError, ZeroDivisionError) as exc:
        return _fail(reasons, f"malformed certificate: {type(exc).__name__}: {exc}")


def _verify(data: dict, form, alpha, reasons: list, cap: int) -> VerifyStatus:
    if not isinstance(data, dict) or data.get("schema") != SCHEMA:
        return _fail(reasons, "unknown schema")
    f = QuadraticForm.from_json(data["form"])
    a = SurfacePoint.from_json(data["alpha"])
    if form is not None and _coerce_form(form) != f:
        return _fail(reasons, "certificate is for a different form")
    if alpha is not None and _coerce_alpha(alpha) != a:
        return _fail(reasons, "certificate is for a different target point")
    T = parse_rational(data["T"])
    if T < 1:
        return _fail(reasons, "T below 1")
    precision = data["precision"]
    if isinstance(precision, bool) or not isinstance(precision, int) or not arith.MIN_PRECISION <= precision <= cap:
        return _fail(reasons, "precision out of range")
    g = data["g"]
    if not isinstance(g, list) or len(g) != f.n + 1 or not all(isinstance(x, int) and not isinstance(x, bool) for x in g):
        return _fail(reasons, "g is not an integer vector of length n + 1")
    g = tuple(g)
    case = data["case"]
    if case not in CASES:
        return _fail(reasons, f"unknown case {case!r}")
    diag = data["diagnostics"]
    mode = diag["mode"]
    if mode not in MODES:
        return _fail(reasons, f"unknown mode {mode!r}")

    # exact integer checks
    if f.lift()(list(g)) != 0:
        return _fail(reasons, "F(g) != 0")
    q = g[-1]
    if not 1 <= q <= T:
        return _fail(reasons, "q outside [1, T]")
    if data["q"] != q:
        return _fail(reasons, "q does not match g")

    iso = lift_isotropy(f.gram).reason
    d = diag["gcd_reduced"]
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        return _fail(reasons, "bad gcd_reduced")
    if d > 1 and _gcd(g) != 1:
        return _fail(reasons, "a gcd-reduced point must be primitive")
    # the least-gauge point of a symmetric body and the shell zeros are primitive already
    if d != 1 and case in ("Fall1", "Direct", "Independent"):
        return _fail(reasons, f"{case} points are never gcd-reduced")
    raw = tuple(d * x for x in g)
    inputs: dict[str, Any] = {"isotropy": iso, "gcd_reduced": d}

    # case structure
    if case == "Fall1":
        if mode != "standard":
            return _fail(reasons, "Fall1 certificates use kappa_f")
        inside = _gauge_below_one(f, a, T, precision, raw, cap)
        if inside is Certainty.FALSE:
            return _fail(reasons, "Fall1 point is not inside the body")
        if inside is Certainty.UNKNOWN:
            reasons.append("Fall1 membership undecided")
            return VerifyStatus.INDETERMINATE
    elif case == "Fall2":
        gens, zeta = diag["generators"], diag["zeta"]
        if not _check_generators(f, gens, zeta, raw, reasons):
            return VerifyStatus.INVALID
        exact = diag["minima_exact"]
        if mode != ("standard" if exact else "lll"):
            return _fail(reasons, "mode does not match minima exactness")
        inputs.update(generators=gens, zeta=zeta, minima_exact=exact)
    elif case == "Direct":
        if mode != "standard":
            return _fail(reasons, "Direct certificates use kappa_f")
        c = diag["construction"]
        cg = tuple(c["g"])
        if len(cg) != f.n + 1 or f.lift()(list(cg)) != 0:
            return _fail(reasons, "construction point is not a zero of F")
        if not cg[-1] > T:
            return _fail(reasons, "construction point already satisfies q <= T")
        cin: dict[str, Any] = {"case": c["case"], "g": list(cg)}
        if c["case"] == "Fall2":
            if not _check_generators(f, c["generators"], c["zeta"], cg, reasons):
                return VerifyStatus.INVALID
            cin.update(generators=c["generators"], zeta=c["zeta"], minima_exact=c["minima_exact"])
        elif c["case"] == "Fall1":
            if _gauge_below_one(f, a, T, precision, cg, cap) is not Certainty.TRUE:
                return _fail(reasons, "construction Fall1 point is not certified inside the body")
        else:
            return _fail(reasons, "unknown construction case")
        inputs["construction"] = cin
    else:
        if mode != "row":
            return _fail(reasons, "independent rows use the row constant")
        src = diag["source"]
        inputs["source"] = src
        if src == "induced":
            gens, zeta = diag["generators"], diag["zeta"]
            if not _check_generators(f, gens, zeta, raw, reasons):
                return VerifyStatus.INVALID
            inputs.update(generators=gens, zeta=zeta)
        elif src != "direct":
            return _fail(reasons, "unknown row source")

    expected = _assemble(f, a, T, precision, g, case, mode, inputs)
    bad = sorted(k for k in set(expected) | set(data) if expected.get(k) != data.get(k))
    if bad:
        if "diagnostics" in bad:
            dk = sorted(k for k in set(expected["diagnostics"]) | set(diag)
                        if expected["diagnostics"].get(k) != diag.get(k))
            bad = [b for b in bad if b != "diagnostics"] + [f"diagnostics.{k}" for k in dk]
        return _fail(reasons, "recomputed fields differ: " + ", ".join(bad))
    verdict = expected["verdict"]
    if verdict == INDETERMINATE:
        reasons.append("certificate inequality undecided at the recorded precision")
        return VerifyStatus.INDETERMINATE
    if verdict == FAILED:
        return _fail(reasons, "the certificate records a failed inequality")
    return VerifyStatus.VALID
