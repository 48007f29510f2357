"""End-to-end acceptance checks; each test prints one 'criterion N: PASS/FAIL' line."""

import dataclasses
import itertools
import random
import time
from fractions import Fraction

import pytest

from symplie import linalg
from symplie.cli import run
from symplie.exterior import KForm, pfaffian, pfaffian_matrix
from symplie.formats import bundled_corpus, data_path, load_algebra, load_chart
from symplie.liealg import LieAlgebra, sl2
from symplie.monge import (RELATION_COMPONENTS, RELATION_SIGNS, Chart, EStructure, apply_chart,
                           closedness_relations, coordinate_forms, canonical_omega, dual_coframe, emit_pde,
                           left_invariant_frame, maurer_cartan_defects, orthocomplement_signature,
                           pairing_signature, verify_e_structure)
from symplie.formats import parse_polynomial
from symplie.monge import PolyForm
from symplie.structures import (exact_symplectic_polynomial, has_exact_symplectic, has_symplectic, is_contact,
                                verify_corpus_entry, verify_entry_all_samples)
from symplie.suspension import (Derivation, contactize, derivation_space, inner_derivation, random_algebra,
                                random_nilpotent, symplectize_2form, symplectize_contact)

CORPUS = {entry.ident: entry for entry in bundled_corpus()}
FAMILIES = ["T3-1a", "T3-1b", "T3-1c", "T3-1d", "T3-2i", "T3-2ii", "T3-2iii", "T3-2iv", "T3-2v",
            "T3-3i", "T3-3ii", "T3-4"]


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, elapsed=None, limit=None, note=""):
        timely = limit is None or elapsed < limit
        status = "PASS" if ok and timely else "FAIL"
        timing = f" [{elapsed:.2f}s" + (f" < {limit}s" if limit else "") + "]" if elapsed is not None else ""
        with capsys.disabled():
            print(f"\ncriterion {number}: {status}{timing}" + (f" {note}" if note else ""))
        assert ok, note
        assert timely, f"took {elapsed:.2f}s, limit {limit}s"
    return emit


def _numeric_points(ident):
    entry = CORPUS[ident]
    return [(point, entry.algebra.substitute(point)) for point in entry.sample_points()]


# 1 -----------------------------------------------------------------------------

def test_corpus_soundness(verdict):
    t0 = time.perf_counter()
    assert sorted(FAMILIES) == sorted(i for i in CORPUS if i.startswith("T3"))
    failed = [ident for ident in FAMILIES if not verify_entry_all_samples(CORPUS[ident]).passed]
    elapsed = time.perf_counter() - t0
    verdict(1, not failed, elapsed, 10, f"failing families: {', '.join(failed)}" if failed else "12 families")


# 2 -----------------------------------------------------------------------------

def test_three_dimensional_contact_verdicts(verdict):
    t0 = time.perf_counter()
    expected_non_contact = {"T2-I", "T2-V"}
    wrong = []
    for ident in sorted(i for i in CORPUS if i.startswith("T2")):
        for point, g in _numeric_points(ident):
            if is_contact(g).passed == (ident in expected_non_contact):
                wrong.append(f"{ident} {point}")
    # the second exception is exactly <x,y,z | [x,z]=x, [y,z]=y>
    v = CORPUS["T2-V"].algebra
    shape = v.nonzero_brackets() == {(0, 2): [1, 0, 0], (1, 2): [0, 1, 0]}
    elapsed = time.perf_counter() - t0
    verdict(2, not wrong and shape, elapsed, 5, "; ".join(wrong))


# 3 -----------------------------------------------------------------------------

X = ["x1", "x2", "x3", "x4"]
PQ = ["p1", "p2", "q1", "q2"]


def _form(coords, degree, entries):
    return PolyForm(coords, degree, {k: parse_polynomial(v, coords) for k, v in entries.items()})


def test_recovery_pipeline(verdict):
    t0 = time.perf_counter()
    algebra = load_algebra(str(data_path("filiform4.alg"))).to_algebra()
    data = coordinate_forms(EStructure(algebra))
    frame = [[parse_polynomial(s, X) for s in row] for row in [
        ["1", "0", "0", "0"],
        ["-1/2 x3", "1", "0", "0"],
        ["1/2 x2 + 1/12 x3 x4", "-1/2 x4", "1", "0"],
        ["-1/12 x3^2", "1/2 x3", "0", "1"]]]
    coframe = [_form(X, 1, e) for e in [
        {(0,): "1", (1,): "1/2 x3", (2,): "-1/2 x2 + 1/6 x3 x4", (3,): "-1/6 x3^2"},
        {(1,): "1", (2,): "1/2 x4", (3,): "-1/2 x3"},
        {(2,): "1"},
        {(3,): "1"}]]
    omega_x = _form(X, 2, {(0, 2): "1", (1, 3): "1", (1, 2): "1/2 x3", (2, 3): "1/2 x4 + 1/6 x3^2"})
    theta_x = _form(X, 2, {(0, 3): "1", (1, 2): "-1", (1, 3): "1/2 x3", (2, 3): "-1/2 x2 - 1/2 x3 + 1/6 x3 x4"})
    chart = Chart.from_file(load_chart(str(data_path("canonical.map"))))
    omega_pq, theta_pq = apply_chart([data.omega, data.theta], chart)
    checks = {
        "frame": data.frame == frame,
        "coframe": data.coframe == coframe,
        "omega": data.omega == omega_x,
        "theta": data.theta == theta_x,
        "omega-chart": omega_pq == _form(PQ, 2, {(0, 2): "1", (1, 3): "1"}),
        "theta-chart": theta_pq == _form(PQ, 2, {(0, 3): "1", (1, 2): "-1", (2, 3): "-p2"}),
        "pde": emit_pde(theta_pq).display() == "u11 + u22 - u2 = 0",
    }
    cli = run(["recover", str(data_path("filiform4.alg")), "--chart", str(data_path("canonical.map"))])
    checks["cli"] = cli.exit_code == 0 and "u11 + u22 - u2 = 0" in cli.to_text()
    elapsed = time.perf_counter() - t0
    bad = [k for k, ok in checks.items() if not ok]
    verdict(3, not bad, elapsed, 5, "mismatch: " + ", ".join(bad) if bad else "u11 + u22 - u2 = 0")


# 4 -----------------------------------------------------------------------------

def test_unimodular_algebras_are_not_exact_symplectic(verdict):
    t0 = time.perf_counter()
    algebras = []
    for ident, entry in CORPUS.items():
        if entry.algebra.dim % 2 == 0 and ident != "T3-1d":
            algebras += [(ident, g) for _, g in _numeric_points(ident) if g.is_unimodular().passed]
    algebras.append(("sl2+R", load_algebra(str(data_path("sl2r.alg"))).to_algebra()))
    rng = random.Random(20240401)
    for k in range(100):
        algebras.append((f"random-{k}", random_nilpotent(rng, 4 if k % 2 else 6)))
    bad = [name for name, g in algebras
           if not (g.is_unimodular().passed and exact_symplectic_polynomial(g).is_zero()
                   and not has_exact_symplectic(g).passed)]
    elapsed = time.perf_counter() - t0
    verdict(4, not bad, elapsed, 30, f"{len(algebras)} algebras" + (f"; failing {bad}" if bad else ""))


# 5 -----------------------------------------------------------------------------

def test_exact_witnesses_have_open_coadjoint_orbits(verdict):
    dims = []
    for ident in FAMILIES:
        if ident == "T3-1d" or not CORPUS[ident].exact:
            continue
        for _, g in _numeric_points(ident):
            rep = has_exact_symplectic(g)
            if rep.passed:
                f = [c.constant_value() for c in rep.witness.potential.to_vector()]
                dims.append((ident, g.coadjoint_tangent_dim(f)))
    ok = bool(dims) and all(d == 4 for _, d in dims)
    verdict(5, ok, note=f"{len(dims)} witnesses, tangent dims {sorted({d for _, d in dims})}")


# 6 -----------------------------------------------------------------------------

def test_pfaffian_metric_signature(verdict):
    rng = random.Random(7)
    forms = [canonical_omega()]
    while len(forms) < 100:
        m = {(i, j): Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for i, j in itertools.combinations(range(4), 2)}
        omega = KForm(4, 2, m)
        if not pfaffian(omega).is_zero():
            forms.append(omega)
    bad = [str(w) for w in forms
           if pairing_signature(w) != (3, 3) or orthocomplement_signature(w) != (2, 3)]
    verdict(6, not bad, note=f"{len(forms)} forms" + (f"; failing {bad[:3]}" if bad else ""))


# 7 -----------------------------------------------------------------------------

def _omega_matrix(omega):
    return [[c.constant_value() for c in row] for row in omega.matrix()]


def _symplectic_frames(rng, count):
    """Algebras whose canonical omega is closed: corpus forms moved to e13 + e24 by random symplectic maps."""
    target = _omega_matrix(canonical_omega())
    swap = [[Fraction(int(i == j)) for j in (0, 2, 1, 3)] for i in range(4)]
    sources = [(load_algebra(str(data_path("filiform4.alg"))).to_algebra(), target)]
    for ident in FAMILIES:
        entry = CORPUS[ident]
        if entry.omega is not None and ident != "T3-1d":
            sources += [(g, _omega_matrix(entry.omega)) for _, g in _numeric_points(ident)]
    out = []
    while len(out) < count:
        g, stated = sources[len(out) % len(sources)]
        p = next(q for q in (linalg.identity(4), swap)
                 if linalg.matmul(linalg.transpose(q), linalg.matmul(stated, q)) == target)
        for _ in range(3):
            # transvection x -> x + c omega(u, x) u preserves omega
            u = [Fraction(rng.randint(-2, 2)) for _ in range(4)]
            c = Fraction(rng.randint(-2, 2), rng.randint(1, 2))
            wu = linalg.matvec(linalg.transpose(target), u)
            t = [[(1 if i == j else 0) + c * u[i] * wu[j] for j in range(4)] for i in range(4)]
            p = linalg.matmul(p, t)
        assert linalg.matmul(linalg.transpose(p), linalg.matmul(stated, p)) == target
        out.append(g.change_basis(p))
    return out, len(sources)


def test_e_structure_verification(verdict):
    worked = verify_e_structure(EStructure(load_algebra(str(data_path("filiform4.alg"))).to_algebra()))
    abelian = verify_e_structure(EStructure(LieAlgebra.abelian(4)))
    abelian_ok = [c.check for c in abelian.failed_children()] == ["condition-2-nijenhuis"]
    rng = random.Random(11)
    framed, sources = _symplectic_frames(rng, 100)
    algebras = [random_algebra(rng, 4) for _ in range(100)] + framed
    disagreements = 0
    closed = 0
    for g in algebras:
        assert g.jacobi_check().passed
        domega = g.d(canonical_omega())
        values = closedness_relations(g)
        per_component = all(v == s * domega.coeff(c).constant_value()
                            for v, c, s in zip(values, RELATION_COMPONENTS, RELATION_SIGNS))
        if not per_component or (not any(values)) != domega.is_zero():
            disagreements += 1
        closed += domega.is_zero()
    ok = worked.passed and abelian_ok and disagreements == 0 and closed >= 100
    verdict(7, ok, note=f"{len(algebras)} algebras ({closed} with d omega = 0, {sources} symplectic sources), "
                        f"{disagreements} disagreements")


# 8 -----------------------------------------------------------------------------

def _random_form(rng, dim, degree):
    return KForm(dim, degree, {idx: Fraction(rng.randint(-3, 3))
                               for idx in itertools.combinations(range(dim), degree) if rng.random() < 0.6})


def _d_squared(rng):
    for entry in CORPUS.values():
        for _, g in _numeric_points(entry.ident):
            if not g.jacobi_check().passed:
                continue  # only T3-1d; its failure is criterion 1
            for degree in range(g.dim - 1):
                for _ in range(3):
                    if not g.d(g.d(_random_form(rng, g.dim, degree))).is_zero():
                        return False
    return True


def _antiderivations(rng):
    for _ in range(60):
        g = random_algebra(rng, rng.randint(3, 6))
        n = g.dim
        p, q = rng.randint(0, n - 1), rng.randint(0, n - 1)
        if p + q > n - 1:
            continue
        a, b = _random_form(rng, n, p), _random_form(rng, n, q)
        sign = -1 if p % 2 else 1
        if g.d(a.wedge(b)) != g.d(a).wedge(b) + a.wedge(g.d(b)).scale(sign):
            return False
        x = [Fraction(rng.randint(-2, 2)) for _ in range(n)]
        if p >= 1 and q >= 1:
            if a.wedge(b).interior(x) != a.interior(x).wedge(b) + a.wedge(b.interior(x)).scale(sign):
                return False
        c = _random_form(rng, n, 1)
        if p + q + 1 <= n and a.wedge(b).wedge(c) != a.wedge(b.wedge(c)):
            return False
    return True


def _pfaffian_squared(rng):
    for n in (2, 4, 6, 8):
        for _ in range(5):
            m = [[Fraction(0)] * n for _ in range(n)]
            for i, j in itertools.combinations(range(n), 2):
                v = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
                m[i][j], m[j][i] = v, -v
            omega = KForm(n, 2, {(i, j): m[i][j] for i, j in itertools.combinations(range(n), 2)})
            pf = pfaffian(omega)
            if pf != pfaffian_matrix(m) or pf.constant_value() ** 2 != linalg.det(m):
                return False
    return True


def _exact_cases():
    out = []
    for ident in ("T3-1a", "T3-1b", "T3-1c", "T3-2i"):
        for _, g in _numeric_points(ident):
            out.append((g, has_exact_symplectic(g).witness.potential))
    return out


def _combination(h, ders, coeffs):
    a = Derivation(h, linalg.zeros(h.dim, h.dim), check=False)
    for c, d in zip(coeffs, ders):
        a = a + d.scale(c)
    return a


def _gauge(rng):
    for h, alpha in _exact_cases():
        space = derivation_space(h)
        for _ in range(4):
            a = _combination(h, space.basis, [rng.randint(-2, 2) for _ in space.basis])
            base = contactize(h, alpha, a)
            x = [sum(rng.randint(-2, 2) * v[k] for v in base.details["pi"]) for k in range(h.dim)]
            moved = contactize(h, alpha, a + inner_derivation(h, x))
            if (moved.passed, moved.form) != (base.passed, base.form):
                return False
    for h, alpha in _contact_cases():
        space = derivation_space(h)
        for _ in range(3):
            a = _combination(h, space.basis, [rng.randint(-2, 2) for _ in space.basis])
            base = symplectize_contact(h, alpha, a)
            w = [rng.randint(1, 3) * c for c in base.details["w"]]
            moved = symplectize_contact(h, alpha, a + inner_derivation(h, w))
            # the new generator is v + w of the old suspension; omega is the same form in that basis
            p = _shift_generator(h.dim, w)
            if base.algebra.change_basis(p) != moved.algebra or _pull_back(base.form, p) != moved.form:
                return False
            if moved.passed != base.passed:
                return False
    return True


def _shift_generator(n, w):
    p = linalg.identity(n + 1)
    for k in range(n):
        p[k][n] = w[k]
    return p


def _pull_back(omega, p):
    m = [[c.constant_value() for c in row] for row in omega.matrix()]
    q = linalg.matmul(linalg.transpose(p), linalg.matmul(m, p))
    return KForm(len(q), 2, {(i, j): q[i][j] for i, j in itertools.combinations(range(len(q)), 2) if q[i][j]})


def _contact_cases():
    out = []
    for ident in sorted(i for i in CORPUS if i.startswith("T2")):
        for _, g in _numeric_points(ident):
            rep = is_contact(g)
            if rep.passed:
                out.append((g, rep.witness.form))
    return out


def _prop4_vs_prop3():
    for h, alpha in _contact_cases():
        via_contact = symplectize_contact(h, alpha)
        via_form = symplectize_2form(h, h.d(alpha))
        if via_contact.passed != via_form.passed:
            return False
        for res in (via_contact, via_form):
            if res.passed and not (res.algebra.d(res.form).is_zero() and not pfaffian(res.form).is_zero()):
                return False
    return True


def _bch_round_trip(rng):
    count = 0
    while count < 20:
        g = random_nilpotent(rng, rng.randint(3, 6))
        if g.nilpotency_class() > 4:
            continue
        count += 1
        if maurer_cartan_defects(g, dual_coframe(left_invariant_frame(g))):
            return False
    return True


def test_structural_properties(verdict):
    t0 = time.perf_counter()
    rng = random.Random(5)
    results = {
        "d^2 = 0": _d_squared(rng),
        "antiderivations": _antiderivations(rng),
        "Pf^2 = det": _pfaffian_squared(rng),
        "gauge invariance": _gauge(rng),
        "two-form vs contact symplectization": _prop4_vs_prop3(),
        "BCH Maurer-Cartan round trip": _bch_round_trip(rng),
    }
    elapsed = time.perf_counter() - t0
    bad = [k for k, ok in results.items() if not ok]
    verdict(8, not bad, elapsed, 60, "failing: " + ", ".join(bad) if bad else f"{len(results)} suites")


# 9 -----------------------------------------------------------------------------

MUTATIONS = [
    # (family, k, i, j, delta) added to the coefficient of e_i*^e_j* in d e_k* (0-based)
    ("T3-2ii", 0, 0, 3, 1),
    ("T3-2ii", 0, 0, 2, -1),
    ("T3-2ii", 0, 0, 1, 1),
    ("T3-1a", 0, 0, 1, -1),
    ("T3-2iv", 0, 0, 2, 1),
    ("T3-3i", 0, 0, 2, 1),
    ("T3-3i", 0, 0, 2, -1),
]


def test_negative_controls(verdict):
    sl2r = load_algebra(str(data_path("sl2r.alg"))).to_algebra()
    not_symplectic = not has_symplectic(sl2r).passed
    no_symplectization = all(not symplectize_contact(sl2(), KForm.from_covector(c)).passed
                             for c in ([1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1]))
    survived = []
    for ident, k, i, j, delta in MUTATIONS:
        af = load_algebra(str(data_path("corpus", ident.lower() + ".alg")))
        mc = dict(af.mc)
        mc[k] = mc.get(k, KForm.zero(af.dim, 2)) + KForm.basis(af.dim, i, j).scale(delta)
        entry = dataclasses.replace(af, mc=mc).to_entry()
        if verify_corpus_entry(entry, entry.sample_points()[0]).passed:
            survived.append((ident, k, i, j, delta))
    ok = not_symplectic and no_symplectization and not survived
    verdict(9, ok, note=f"{len(MUTATIONS)} mutations" + (f"; survived {survived}" if survived else ""))
