"""V-algebras and derived brackets.

A graded Lie algebra with a distinguished abelian subalgebra, a
projection onto it, and a Maurer-Cartan element produces an
L-infinity[1]-algebra through iterated brackets.  The flagship example
here is a jet-scale model of polynomial multivector fields on the
total space of the foliation cotangent bundle over a coordinate patch
with a constant-rank closed 2-form; its derived brackets live on the
foliation de Rham complex.

Polynomials are exponent-vector dictionaries over the rationals, so
every bracket is computed exactly; only the final projection onto the
finite generator basis truncates, and the truncation is tracked by a
weight filtration (base polynomial degree) so that relation checks
filtered by weight are exact.
"""

import itertools
import random
from fractions import Fraction

from .gradedlin import (GradedSpace, matrix_rank, scalar_from_str,
                        scalar_to_str, sym_words, vec_add, vec_scale)
from .linfty import CheckReport, LInftyAlgebra, LInftyMorphism


# ---------------------------------------------------------------------------
# polynomial scalars: {exponent tuple: Fraction}


def poly_zero():
    return {}


def poly_const(c, nv):
    c = Fraction(c)
    return {(0,) * nv: c} if c else {}


def poly_var(i, nv):
    e = [0] * nv
    e[i] = 1
    return {tuple(e): Fraction(1)}


def poly_add(p, q):
    out = dict(p)
    for e, c in q.items():
        c2 = out.get(e, Fraction(0)) + c
        if c2:
            out[e] = c2
        else:
            out.pop(e, None)
    return out


def poly_scale(c, p):
    c = Fraction(c)
    if not c:
        return {}
    return {e: c * v for e, v in p.items()}


def poly_mul(p, q):
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            c = out.get(e, Fraction(0)) + c1 * c2
            if c:
                out[e] = c
            else:
                out.pop(e, None)
    return out


def poly_diff(p, i):
    out = {}
    for e, c in p.items():
        if e[i] == 0:
            continue
        e2 = list(e)
        e2[i] -= 1
        out[tuple(e2)] = c * e[i]
    return out


def poly_subs_zero(p, idxs):
    """Substitute 0 for the listed variables."""
    idxs = set(idxs)
    return {e: c for e, c in p.items() if all(e[i] == 0 for i in idxs)}


def poly_deg(p, idxs=None):
    """Largest total degree of any term, restricted to idxs if given.
    The zero polynomial has degree -1."""
    best = -1
    for e in p:
        d = sum(e) if idxs is None else sum(e[i] for i in idxs)
        best = max(best, d)
    return best


def poly_trunc(p, idxs, cap):
    """Drop terms whose total degree in the listed variables exceeds
    cap."""
    idxs = list(idxs)
    return {e: c for e, c in p.items()
            if sum(e[i] for i in idxs) <= cap}


def poly_to_json(p):
    return [{"exps": list(e), "coeff": scalar_to_str(c)}
            for e, c in sorted(p.items())]


def poly_from_json(doc):
    out = {}
    for rec in doc:
        e = tuple(int(x) for x in rec["exps"])
        c = out.get(e, Fraction(0)) + scalar_from_str(rec["coeff"])
        if c:
            out[e] = c
        else:
            out.pop(e, None)
    return out


# ---------------------------------------------------------------------------
# polynomial multivector fields
#
# A multivector is a dictionary {(exps, word): Fraction} where exps is
# an exponent tuple for the (commuting) coordinates and word is a
# strictly increasing tuple of coordinate indices naming a wedge of
# coordinate vector fields.  The wedge generators are odd; a term with
# a wedge word of length l has degree l - 1 in the shifted grading.


def mv_add(X, Y):
    out = dict(X)
    for k, c in Y.items():
        c2 = out.get(k, Fraction(0)) + c
        if c2:
            out[k] = c2
        else:
            out.pop(k, None)
    return out


def mv_scale(c, X):
    c = Fraction(c)
    if not c:
        return {}
    return {k: c * v for k, v in X.items()}


def _merge_words(wa, wb):
    """Concatenate two wedge words and sort, returning (word, sign);
    (None, 0) when a generator repeats."""
    if set(wa) & set(wb):
        return None, 0
    inv = sum(1 for a in wa for b in wb if a > b)
    word = tuple(sorted(wa + wb))
    return word, (-1) ** inv


def mv_wedge(X, Y):
    out = {}
    for (ea, wa), ca in X.items():
        for (eb, wb), cb in Y.items():
            word, sgn = _merge_words(wa, wb)
            if word is None:
                continue
            e = tuple(a + b for a, b in zip(ea, eb))
            key = (e, word)
            c = out.get(key, Fraction(0)) + sgn * ca * cb
            if c:
                out[key] = c
            else:
                out.pop(key, None)
    return out


def _term_dx(e, w, c, i):
    """Coordinate derivative of a single term."""
    if e[i] == 0:
        return None
    e2 = list(e)
    e2[i] -= 1
    return tuple(e2), w, c * e[i]


def _term_dw_right(e, w, c, i):
    """Right derivative with respect to the wedge generator i: move it
    to the last slot and strike it out."""
    if i not in w:
        return None
    s = w.index(i)
    sgn = (-1) ** (len(w) - 1 - s)
    return e, w[:s] + w[s + 1:], sgn * c


def _term_dw_left(e, w, c, i):
    """Left derivative: move the generator to the front first."""
    if i not in w:
        return None
    s = w.index(i)
    return e, w[:s] + w[s + 1:], ((-1) ** s) * c


def schouten(X, Y):
    """Schouten bracket of polynomial multivector fields.

    Normalization: [d/dx_i, f] = df/dx_i, and with the shifted degree
    |X| = (wedge length) - 1 the bracket is graded antisymmetric and
    satisfies the graded Jacobi identity (property-tested).
    """
    out = {}

    def acc(key, c):
        c2 = out.get(key, Fraction(0)) + c
        if c2:
            out[key] = c2
        else:
            out.pop(key, None)

    for (ea, wa), ca in X.items():
        for (eb, wb), cb in Y.items():
            # first part: wedge-derivative of X against the coordinate
            # derivative of Y
            for i in wa:
                ta = _term_dw_right(ea, wa, ca, i)
                tb = _term_dx(eb, wb, cb, i)
                if tb is None:
                    continue
                word, sgn = _merge_words(ta[1], tb[1])
                if word is None:
                    continue
                e = tuple(a + b for a, b in zip(ta[0], tb[0]))
                acc((e, word), sgn * ta[2] * tb[2])
            # second part: coordinate derivative of X against the left
            # wedge-derivative of Y (a constant minus sign makes the
            # bracket graded antisymmetric in the shifted grading)
            for i in wb:
                ta = _term_dx(ea, wa, ca, i)
                if ta is None:
                    continue
                tb = _term_dw_left(eb, wb, cb, i)
                word, sgn = _merge_words(ta[1], tb[1])
                if word is None:
                    continue
                e = tuple(a + b for a, b in zip(ta[0], tb[0]))
                acc((e, word), -sgn * ta[2] * tb[2])
    return out


def mv_degrees(X):
    return sorted({len(w) - 1 for (_, w) in X})


def mv_to_json(X):
    return [{"exps": list(e), "word": list(w), "coeff": scalar_to_str(c)}
            for (e, w), c in sorted(X.items())]


def mv_from_json(doc):
    out = {}
    for rec in doc:
        key = (tuple(int(x) for x in rec["exps"]),
               tuple(int(x) for x in rec["word"]))
        c = out.get(key, Fraction(0)) + scalar_from_str(rec["coeff"])
        if c:
            out[key] = c
        else:
            out.pop(key, None)
    return out


# ---------------------------------------------------------------------------
# the jet-scale multivector model


class JetMultivectorModel:
    """Polynomial multivector fields near the zero section of the
    foliation cotangent bundle over a coordinate patch.

    Coordinates: y_1..y_m (transverse), q_1..q_k (foliation),
    p_1..p_k (fiber, dual to the q directions).  Coefficients are
    polynomials; the distinguished abelian subalgebra consists of
    wedges of fiber directions with fiber-independent coefficients,
    identified with foliation differential forms through
    d/dp_a <-> dq_a.

    base_cap bounds the (y, q)-degree of the retained generator basis;
    fiber_cap bounds the p-degree used in sampling checks.  Brackets
    themselves are computed exactly, without truncation.
    """

    def __init__(self, m, k, base_cap=3, fiber_cap=2):
        if m < 0 or k < 0 or base_cap < 0 or fiber_cap < 0:
            raise ValueError("negative coordinate count or cap")
        self.m = int(m)
        self.k = int(k)
        self.base_cap = int(base_cap)
        self.fiber_cap = int(fiber_cap)
        self.nv = self.m + 2 * self.k
        names = ["y%d" % (i + 1) for i in range(self.m)]
        names += ["q%d" % (i + 1) for i in range(self.k)]
        names += ["p%d" % (i + 1) for i in range(self.k)]
        self.names = names
        self.name_to_idx = {n: i for i, n in enumerate(names)}
        self.base_idxs = list(range(self.m + self.k))
        self.p_idxs = list(range(self.m + self.k, self.nv))

    # -- coordinate helpers

    def var(self, name):
        return poly_var(self.name_to_idx[name], self.nv)

    def const(self, c):
        return poly_const(c, self.nv)

    def vector(self, name):
        """The coordinate vector field d/d<name> as a multivector."""
        return {((0,) * self.nv, (self.name_to_idx[name],)): Fraction(1)}

    def bracket(self, X, Y):
        return schouten(X, Y)

    # -- the projection onto the abelian subalgebra

    def pi(self, X):
        """Keep the terms whose wedge word uses only fiber directions,
        then evaluate the fiber coordinates at zero.  Mixed words are
        sent to zero."""
        pset = set(self.p_idxs)
        out = {}
        for (e, w), c in X.items():
            if not set(w) <= pset:
                continue
            if any(e[i] for i in self.p_idxs):
                continue
            out[(e, w)] = c
        return out

    def in_a(self, X):
        return self.pi(X) == X

    def fiber_level(self, X):
        """Smallest p-degree of any coefficient term: the stage of the
        fiber-ideal filtration that contains X (a large sentinel for
        zero)."""
        if not X:
            return 10 ** 9
        return min(sum(e[i] for i in self.p_idxs) for (e, _) in X)

    # -- generator basis of the abelian subalgebra

    def mono_str(self, e):
        parts = []
        for i in self.base_idxs:
            if e[i] == 1:
                parts.append(self.names[i])
            elif e[i] > 1:
                parts.append("%s^%d" % (self.names[i], e[i]))
        return ".".join(parts) if parts else "1"

    def mono_parse(self, s):
        e = [0] * self.nv
        if s != "1":
            for part in s.split("."):
                if "^" in part:
                    name, pw = part.split("^")
                    e[self.name_to_idx[name]] += int(pw)
                else:
                    e[self.name_to_idx[part]] += 1
        return tuple(e)

    def form_str(self, w):
        if not w:
            return "1"
        return ".".join("dq%d" % (i - self.m - self.k + 1) for i in w)

    def form_parse(self, s):
        if s == "1":
            return ()
        return tuple(sorted(self.m + self.k + int(t[2:]) - 1
                            for t in s.split(".")))

    def a_label(self, e, w):
        return self.mono_str(e) + "|" + self.form_str(w)

    def label_to_mv(self, label):
        mono, form = label.split("|")
        return {(self.mono_parse(mono), self.form_parse(form)):
                Fraction(1)}

    def base_monomials(self, cap=None):
        cap = self.base_cap if cap is None else cap
        nb = len(self.base_idxs)
        out = []
        for exps in itertools.product(range(cap + 1), repeat=nb):
            if sum(exps) > cap:
                continue
            e = [0] * self.nv
            for i, x in zip(self.base_idxs, exps):
                e[i] = x
            out.append(tuple(e))
        return sorted(out)

    def a_space(self):
        """Graded space of retained generators of the abelian
        subalgebra: base monomial times fiber-direction wedge word."""
        words = [()]
        for i in self.p_idxs:
            words = words + [w + (i,) for w in words]
        labels = []
        for w in sorted(words, key=lambda w: (len(w), w)):
            for e in self.base_monomials():
                labels.append((self.a_label(e, w), len(w) - 1))
        return GradedSpace(labels)

    def elem_to_coeffs(self, X):
        """Express an element of the abelian subalgebra in the
        generator basis.  Returns (coefficients, spilled) where
        spilled flags terms beyond the base-degree cap."""
        coeffs = {}
        spilled = False
        for (e, w), c in X.items():
            if sum(e[i] for i in self.base_idxs) > self.base_cap:
                spilled = True
                continue
            coeffs[self.a_label(e, w)] = \
                coeffs.get(self.a_label(e, w), Fraction(0)) + c
        return {k: v for k, v in coeffs.items() if v}, spilled

    def label_weight(self, label):
        mono = label.split("|")[0]
        return sum(self.mono_parse(mono))

    def to_json(self):
        return {"m": self.m, "k": self.k, "base_cap": self.base_cap,
                "fiber_cap": self.fiber_cap}

    @classmethod
    def from_json(cls, doc):
        return cls(doc["m"], doc["k"], doc.get("base_cap", 3),
                   doc.get("fiber_cap", 2))


# ---------------------------------------------------------------------------
# finite graded Lie algebras by structure constants


class GradedLieAlgebra:
    """Finite-dimensional graded Lie algebra with explicit structure
    constants.

    bracket: {(a, b): {c: Fraction}} on ordered basis pairs; missing
    pairs are recovered from graded antisymmetry, absent pairs are
    zero.  The bracket preserves degree.
    """

    def __init__(self, space, bracket):
        self.space = space
        tab = {}
        for (a, b), out in bracket.items():
            val = {c: Fraction(v) for c, v in out.items() if Fraction(v)}
            if val:
                tab[(a, b)] = val
        self.table = tab

    def bracket_word(self, a, b):
        if (a, b) in self.table:
            return dict(self.table[(a, b)])
        if (b, a) in self.table:
            da = self.space.deg[a] % 2
            db = self.space.deg[b] % 2
            sgn = -((-1) ** (da * db))
            return vec_scale(sgn, self.table[(b, a)])
        return {}

    def bracket_elems(self, u, v):
        out = {}
        for a, ca in u.items():
            for b, cb in v.items():
                out = vec_add(out, vec_scale(ca * cb,
                                             self.bracket_word(a, b)))
        return out

    def to_json(self):
        return {
            "space": self.space.to_json(),
            "bracket": [
                {"pair": list(p), "out": b, "coeff": scalar_to_str(c)}
                for p in sorted(self.table)
                for b, c in sorted(self.table[p].items())
            ],
        }

    @classmethod
    def from_json(cls, doc):
        space = GradedSpace.from_json(doc["space"])
        tab = {}
        for rec in doc["bracket"]:
            p = tuple(rec["pair"])
            tab.setdefault(p, {})
            tab[p][rec["out"]] = tab[p].get(rec["out"], Fraction(0)) \
                + scalar_from_str(rec["coeff"])
        return cls(space, tab)


def check_graded_lie(L, name="graded-lie"):
    """Degree preservation, graded antisymmetry, and the graded Jacobi
    identity on all basis triples."""
    failures = []
    checked = 0
    labels = L.space.labels
    for a in labels:
        for b in labels:
            checked += 1
            out = L.bracket_word(a, b)
            want = L.space.deg[a] + L.space.deg[b]
            for c in out:
                if L.space.deg[c] != want:
                    failures.append(((a, b), {"degree": out}))
                    break
            da, db = L.space.deg[a] % 2, L.space.deg[b] % 2
            back = vec_scale(-((-1) ** (da * db)), L.bracket_word(b, a))
            if out != back:
                failures.append(((a, b), {"antisymmetry":
                                          vec_add(out,
                                                  vec_scale(-1, back))}))
    for a in labels:
        for b in labels:
            for c in labels:
                checked += 1
                da, db = L.space.deg[a] % 2, L.space.deg[b] % 2
                lhs = L.bracket_elems({a: Fraction(1)},
                                      L.bracket_word(b, c))
                r1 = L.bracket_elems(L.bracket_word(a, b),
                                     {c: Fraction(1)})
                r2 = vec_scale((-1) ** (da * db),
                               L.bracket_elems({b: Fraction(1)},
                                               L.bracket_word(a, c)))
                res = vec_add(lhs, vec_scale(-1, vec_add(r1, r2)))
                if res:
                    failures.append(((a, b, c), res))
    return CheckReport(name, failures, checked)


# ---------------------------------------------------------------------------
# V-algebras


class VAlgebra:
    """Graded Lie algebra with a distinguished abelian subalgebra
    spanned by a sub-basis, an idempotent projection onto it whose
    kernel is a subalgebra, and a degree-1 element squaring to zero
    under the bracket.

    pi is a linear map given per basis label; P is an element."""

    def __init__(self, h, a_labels, pi, P):
        self.h = h
        self.a_labels = list(a_labels)
        self.pi = {a: {b: Fraction(c) for b, c in out.items()
                       if Fraction(c)}
                   for a, out in pi.items()}
        self.P = {b: Fraction(c) for b, c in P.items() if Fraction(c)}

    def pi_elem(self, u):
        out = {}
        for a, c in u.items():
            out = vec_add(out, vec_scale(c, self.pi.get(a, {})))
        return out

    def to_json(self):
        return {
            "h": self.h.to_json(),
            "a": list(self.a_labels),
            "pi": {a: {b: scalar_to_str(c) for b, c in out.items()}
                   for a, out in sorted(self.pi.items())},
            "P": {b: scalar_to_str(c)
                  for b, c in sorted(self.P.items())},
        }

    @classmethod
    def from_json(cls, doc):
        h = GradedLieAlgebra.from_json(doc["h"])
        pi = {a: {b: scalar_from_str(c) for b, c in out.items()}
              for a, out in doc["pi"].items()}
        P = {b: scalar_from_str(c) for b, c in doc["P"].items()}
        return cls(h, doc["a"], pi, P)


class JetVAlgebra:
    """The jet multivector model seen as a V-algebra: the full model
    is the ambient graded Lie algebra, the fiber-wedge generators with
    fiber-independent coefficients form the abelian subalgebra, and
    the projection restricts to the zero section keeping only fiber
    directions."""

    def __init__(self, model, P):
        self.model = model
        self.P = dict(P)


def jet_valgebra(model, P):
    return JetVAlgebra(model, P)


def _check_finite_valgebra(V):
    failures = []
    checked = 0
    rep = check_graded_lie(V.h)
    checked += rep.checked
    for w, r in rep.failures:
        failures.append((w, {"lie-axiom": r}))
    aset = set(V.a_labels)
    # the sub-basis is abelian
    for a in V.a_labels:
        for b in V.a_labels:
            checked += 1
            out = V.h.bracket_word(a, b)
            if out:
                failures.append(((a, b), {"abelian": out}))
    # pi is a degree-preserving idempotent projection onto the
    # sub-basis span
    for a in V.h.space.labels:
        checked += 1
        img = V.pi.get(a, {})
        if any(b not in aset for b in img):
            failures.append(((a,), {"pi-image": img}))
        if any(V.h.space.deg[b] != V.h.space.deg[a] for b in img):
            failures.append(((a,), {"pi-degree": img}))
        if V.pi_elem(img) != img:
            failures.append(((a,), {"pi-idempotent": img}))
        if a in aset and img != {a: Fraction(1)}:
            failures.append(((a,), {"pi-restriction": img}))
    # the kernel of pi is closed under the bracket
    ker = [a for a in V.h.space.labels if not V.pi.get(a)]
    for a in ker:
        for b in ker:
            checked += 1
            out = V.pi_elem(V.h.bracket_word(a, b))
            if out:
                failures.append(((a, b), {"kernel-closed": out}))
    # P has degree 1 and squares to zero
    for b in V.P:
        checked += 1
        if V.h.space.deg[b] != 1:
            failures.append(((b,), {"P-degree": dict(V.P)}))
    pp = V.h.bracket_elems(V.P, V.P)
    checked += 1
    if pp:
        failures.append((("P", "P"), pp))
    return CheckReport("valgebra", failures, checked)


def _check_jet_valgebra(V, samples=40, seed=0):
    model, P = V.model, V.P
    failures = []
    checked = 0
    rng = random.Random(seed)

    def rand_term():
        e = [0] * model.nv
        for _ in range(rng.randint(0, 2)):
            e[rng.randrange(model.nv)] += 1
        for i in model.p_idxs:
            e[i] = min(e[i], model.fiber_cap)
        nw = rng.randint(0, 2)
        w = tuple(sorted(rng.sample(range(model.nv),
                                    min(nw, model.nv))))
        return {(tuple(e), w): Fraction(rng.choice([1, -1, 2]))}

    # sampled graded Jacobi identity for the exact bracket
    for _ in range(samples):
        X, Y, Z = rand_term(), rand_term(), rand_term()
        checked += 1
        xb = (len(next(iter(X))[1]) - 1) % 2
        yb = (len(next(iter(Y))[1]) - 1) % 2
        lhs = schouten(X, schouten(Y, Z))
        rhs = mv_add(schouten(schouten(X, Y), Z),
                     mv_scale((-1) ** (xb * yb),
                              schouten(Y, schouten(X, Z))))
        res = mv_add(lhs, mv_scale(-1, rhs))
        if res:
            failures.append((("jacobi",), res))
    # the fiber-wedge generators commute
    space = model.a_space()
    labels = space.labels
    pick = labels if len(labels) <= 12 else rng.sample(labels, 12)
    for a in pick:
        for b in pick:
            checked += 1
            out = schouten(model.label_to_mv(a), model.label_to_mv(b))
            if out:
                failures.append(((a, b), {"abelian": out}))
    # the kernel of the projection is closed under the bracket
    for _ in range(samples):
        X, Y = rand_term(), rand_term()
        X = mv_add(X, mv_scale(-1, model.pi(X)))
        Y = mv_add(Y, mv_scale(-1, model.pi(Y)))
        checked += 1
        out = model.pi(schouten(X, Y))
        if out:
            failures.append((("kernel-closed",), out))
    # the Maurer-Cartan condition
    checked += 1
    if mv_degrees(P) not in ([], [1]):
        failures.append((("P-degree",), P))
    pp = schouten(P, P)
    if pp:
        failures.append((("P", "P"), pp))
    return CheckReport("valgebra", failures, checked,
                       notes=["jet model: Lie axioms sampled"])


def check_valgebra(V):
    """Verify the V-algebra axioms and the Maurer-Cartan condition;
    failures name the axiom and a witness pair."""
    if isinstance(V, JetVAlgebra):
        return _check_jet_valgebra(V)
    return _check_finite_valgebra(V)


# ---------------------------------------------------------------------------
# derived brackets


def derived_brackets(V, k_max):
    """L-infinity[1]-algebra on the abelian subalgebra by iterated
    bracketing with the Maurer-Cartan element followed by the
    projection.  The result can be curved: the curvature is the
    projection of the Maurer-Cartan element itself.

    For the jet model the generator basis carries the base polynomial
    degree as a weight; operation outputs beyond the base-degree cap
    are truncated, so relation checks filtered by weight remain exact.

    The arity-k operation carries a global sign (-1)^k relative to the
    raw iterated bracket.  This is a convention reconciliation: every
    term of the quadratic relation scales uniformly under it, so the
    relations are unaffected, and it makes the unary operation of the
    jet model the foliation exterior derivative with its usual sign
    (property-tested).
    """
    if isinstance(V, JetVAlgebra):
        return _jet_derived_brackets(V, k_max)
    space = GradedSpace([(a, V.h.space.deg[a]) for a in V.a_labels])
    ops = {}
    prefix = {(): dict(V.P)}

    def bval(word):
        if word in prefix:
            return prefix[word]
        prev = bval(word[:-1])
        cur = V.h.bracket_elems(prev, {word[-1]: Fraction(1)})
        prefix[word] = cur
        return cur

    for k in range(1, k_max + 1):
        tab = {}
        for word in sym_words(space, k):
            out = V.pi_elem(bval(word))
            if out:
                tab[word] = vec_scale((-1) ** k, out)
        if tab:
            ops[k] = tab
    l0 = V.pi_elem(V.P)
    return LInftyAlgebra(space, ops, l0=l0, arity_cap=k_max)


def _jet_derived_brackets(V, k_max):
    model, P = V.model, V.P
    space = model.a_space()
    weights = {lab: model.label_weight(lab) for lab in space.labels}
    ops = {}
    spilled = False
    prefix = {(): dict(P)}

    def bval(word):
        if word in prefix:
            return prefix[word]
        prev = bval(word[:-1])
        cur = schouten(prev, model.label_to_mv(word[-1]))
        prefix[word] = cur
        return cur

    gain = 0
    for k in range(1, k_max + 1):
        tab = {}
        for word in sym_words(space, k):
            exact = model.pi(bval(word))
            coeffs, sp = model.elem_to_coeffs(exact)
            spilled = spilled or sp
            if exact:
                out_w = max(sum(e[i] for i in model.base_idxs)
                            for (e, _) in exact)
                in_w = sum(weights[x] for x in word)
                gain = max(gain, out_w - in_w)
            if coeffs:
                tab[word] = vec_scale((-1) ** k, coeffs)
        if tab:
            ops[k] = tab
    l0, sp = model.elem_to_coeffs(model.pi(P))
    spilled = spilled or sp
    alg = LInftyAlgebra(space, ops, l0=l0, arity_cap=k_max,
                        weights=weights)
    alg.jet_model = model
    alg.truncated = spilled
    alg.weight_gain = gain
    return alg


def op_weight_gain(A):
    """Largest weight increase of any operation output, including
    truncated terms when the algebra records it; use weight_cap =
    (basis weight bound) - 2 * gain for exact filtered relation checks
    on truncated algebras."""
    if A.weights is None:
        return 0
    if hasattr(A, "weight_gain"):
        return A.weight_gain
    gain = 0
    for k, tab in A.ops.items():
        for w, out in tab.items():
            iw = A.word_weight(w)
            for b in out:
                gain = max(gain, A.weights[b] - iw)
    return gain


# ---------------------------------------------------------------------------
# Poisson structures from constant-rank closed 2-form data


def poisson_from_presymplectic(model, omega, R):
    """Poisson bivector on the foliation cotangent bundle model from a
    constant coefficient block omega on the transverse directions and
    a polynomial splitting datum R.

    omega: antisymmetric m x m rational matrix whose (i, j) entry
    multiplies e_i wedge e_j; it must have full rank m (the foliation
    directions carry the kernel of the 2-form).
    R: {(j, alpha): polynomial in the base variables} for the lifted
    transverse frame
      e_j = d/dy_j + sum_a R_j^a d/dq_a
            - sum_{b,n} p_b (dR_j^b/dq_n) d/dp_n.

    The result is checked to square to zero under the bracket."""
    m, k, nv = model.m, model.k, model.nv
    if len(omega) != m or any(len(row) != m for row in omega):
        raise ValueError("omega must be %d x %d" % (m, m))
    om = [[Fraction(x) for x in row] for row in omega]
    for i in range(m):
        for j in range(m):
            if om[i][j] != -om[j][i]:
                raise ValueError("omega must be antisymmetric")
    if m:
        if matrix_rank(om) != m:
            raise ValueError(
                "rank inconsistency: the transverse block must be "
                "nondegenerate (rank %d < %d)"
                % (matrix_rank(om), m))
    Rp = {}
    for (j, a), p in (R or {}).items():
        if not (1 <= j <= m and 1 <= a <= k):
            raise ValueError("splitting index (%d, %d) out of range"
                             % (j, a))
        if poly_deg(p, model.p_idxs) > 0:
            raise ValueError("splitting data must be fiber-free")
        if p:
            Rp[(j, a)] = p

    def frame(j):
        e = model.vector("y%d" % j)
        for a in range(1, k + 1):
            p = Rp.get((j, a))
            if not p:
                continue
            e = mv_add(e, mv_wedge(
                {(ee, ()): c for ee, c in p.items()},
                model.vector("q%d" % a)))
            for n in range(1, k + 1):
                dp = poly_diff(p, model.name_to_idx["q%d" % n])
                if not dp:
                    continue
                coeff = poly_mul(model.var("p%d" % a), dp)
                e = mv_add(e, mv_scale(-1, mv_wedge(
                    {(ee, ()): c for ee, c in coeff.items()},
                    model.vector("p%d" % n))))
        return e

    P = {}
    frames = {j: frame(j) for j in range(1, m + 1)}
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            if om[i - 1][j - 1]:
                P = mv_add(P, mv_scale(
                    Fraction(om[i - 1][j - 1], 2),
                    mv_wedge(frames[i], frames[j])))
    for a in range(1, k + 1):
        P = mv_add(P, mv_wedge(model.vector("q%d" % a),
                               model.vector("p%d" % a)))
    pp = schouten(P, P)
    if pp:
        raise ValueError("the bivector does not square to zero; "
                         "witness term %r" % (sorted(pp)[0],))
    return P


# ---------------------------------------------------------------------------
# localization at a coordinate subspace


class LocalizedJetModel:
    """Localization of the jet multivector model at the inclusion of a
    coordinate subspace.  The vanishing ideal is generated by the
    complementary (normal) base coordinates; the stage-j space keeps
    coefficient terms of normal degree below j, and the bracket of two
    stage-j classes is certified at stage j - 1: bracket on
    representatives, then re-project.
    """

    def __init__(self, model, image_vars, j_max):
        base_names = [model.names[i] for i in model.base_idxs]
        for v in image_vars:
            if v not in base_names:
                raise ValueError(
                    "only coordinate-subspace embeddings are "
                    "supported; unknown base variable %r" % (v,))
        self.model = model
        self.image_vars = list(image_vars)
        self.normal_idxs = [model.name_to_idx[n] for n in base_names
                            if n not in set(image_vars)]
        if j_max < 1:
            raise ValueError("jet order must be at least 1")
        self.j_max = int(j_max)
        self.P = None

    def project(self, X, j):
        """Stage-j class of a representative: drop terms of normal
        degree >= j."""
        return {key: c for key, c in X.items()
                if sum(key[0][i] for i in self.normal_idxs) < j}

    def bracket_at(self, j, X, Y):
        """Bracket of stage-j classes, certified at stage j - 1."""
        if j < 2:
            raise ValueError("the bracket needs at least stage 2")
        return self.project(schouten(X, Y), j - 1)

    def pi(self, X):
        return self.model.pi(X)

    def check(self, elems=None, seed=0):
        """Well-definedness of the localized bracket: the projection
        squares commute and the Jacobi identity survives the
        representative-lift computation."""
        model = self.model
        rng = random.Random(seed)
        if elems is None:
            elems = []
            for _ in range(12):
                e = [0] * model.nv
                for _ in range(rng.randint(0, 3)):
                    e[rng.randrange(model.nv)] += 1
                w = tuple(sorted(rng.sample(range(model.nv),
                                            rng.randint(0, 2))))
                elems.append({(tuple(e), w):
                              Fraction(rng.choice([1, -1, 2]))})
        failures = []
        checked = 0
        for j in range(2, self.j_max):
            for X in elems:
                for Y in elems:
                    checked += 1
                    a = self.project(self.bracket_at(j + 1, X, Y), j - 1)
                    b = self.bracket_at(j, self.project(X, j),
                                        self.project(Y, j))
                    if mv_add(a, mv_scale(-1, b)):
                        failures.append((("square", j),
                                         mv_add(a, mv_scale(-1, b))))
        for X in elems[:4]:
            for Y in elems[:4]:
                for Z in elems[:4]:
                    if self.j_max < 4:
                        continue
                    checked += 1
                    j = self.j_max
                    xb = (len(next(iter(X))[1]) - 1) % 2
                    yb = (len(next(iter(Y))[1]) - 1) % 2
                    lhs = self.bracket_at(j - 1,
                                          self.bracket_at(j, Y, Z), X)
                    # recompute through representatives and compare
                    lift = schouten(schouten(Y, Z), X)
                    if self.project(lift, j - 2) != lhs:
                        failures.append((("lift", j), lift))
        return CheckReport("localized-valgebra", failures, checked)


def localize_valgebra(V, image_vars, j_max):
    """Localized V-algebra of a jet model at the inclusion of a
    coordinate subspace named by the surviving base variables."""
    if not isinstance(V, JetVAlgebra):
        raise ValueError("localization needs the jet model")
    loc = LocalizedJetModel(V.model, image_vars, j_max)
    loc.P = dict(V.P)
    return loc


# ---------------------------------------------------------------------------
# the localization morphism


def label_base_weight(label):
    """Total exponent of the monomial part of a generator label."""
    mono = label.split("|")[0]
    if mono == "1":
        return 0
    total = 0
    for part in mono.split("."):
        total += int(part.split("^")[1]) if "^" in part else 1
    return total


def label_normal_weight(label, normal_names):
    """Total exponent of the listed variables in a generator label of
    the form 'monomial|form'."""
    mono = label.split("|")[0]
    if mono == "1":
        return 0
    total = 0
    for part in mono.split("."):
        if "^" in part:
            name, pw = part.split("^")
        else:
            name, pw = part, 1
        if name in normal_names:
            total += int(pw)
    return total


def _reweighted(A, weights):
    B = LInftyAlgebra(A.space, A.ops, l0=A.l0, arity_cap=A.arity_cap,
                      weights=weights)
    for attr in ("jet_model",):
        if hasattr(A, attr):
            setattr(B, attr, getattr(A, attr))
    return B


def localized_algebra(C, image_vars, j_max):
    """Stage-j_max truncation of an algebra whose generators carry
    polynomial labels: keep the generators of normal degree below
    j_max and restrict the operations.

    The result keeps the base polynomial degree as its weight; since
    the normal degree is bounded by the base degree, relation checks
    with weight_cap = min(base cap, j_max - 1) - 2 * gain see no
    truncation of either kind and are exact."""
    base_names = {p.split("^")[0]
                  for lab in C.space.labels
                  for p in lab.split("|")[0].split(".") if p != "1"}
    normal = base_names - set(image_vars)
    keep = [lab for lab in C.space.labels
            if label_normal_weight(lab, normal) < j_max]
    kset = set(keep)
    space = GradedSpace([(lab, C.space.deg[lab]) for lab in keep])
    ops = {}
    for k, tab in C.ops.items():
        sub = {}
        for w, out in tab.items():
            if not all(x in kset for x in w):
                continue
            val = {b: c for b, c in out.items() if b in kset}
            if val:
                sub[w] = val
        if sub:
            ops[k] = sub
    l0 = {b: c for b, c in C.l0.items() if b in kset}
    weights = {lab: label_base_weight(lab) for lab in keep}
    alg = LInftyAlgebra(space, ops, l0=l0, arity_cap=C.arity_cap,
                        weights=weights)
    alg.j_order = j_max
    if hasattr(C, "weight_gain"):
        alg.weight_gain = C.weight_gain
    return alg, normal


def epsilon_morphism(C, image_vars, j_max):
    """Morphism from a polynomial-labeled algebra to its stage-j_max
    localization at a coordinate subspace: the only component sends a
    generator to its class (zero beyond the jet order).

    Both endpoints of the returned morphism carry the normal-degree
    filtration as weights; the morphism relation holds exactly on
    words of total normal degree below j_max."""
    loc, normal = localized_algebra(C, image_vars, j_max)
    src = _reweighted(C, {lab: label_normal_weight(lab, normal)
                          for lab in C.space.labels})
    comps = {1: {(lab,): {lab: Fraction(1)}
                 for lab in loc.space.labels}}
    return LInftyMorphism(src, loc, comps, arity_cap=C.arity_cap)
