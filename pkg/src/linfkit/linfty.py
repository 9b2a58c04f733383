"""L-infinity[1]-algebras and morphisms at arity truncation.

Operations l_k (k >= 0) have degree +1 and are graded symmetric; the
curvature l_0 is a single degree-1 element.  Morphism components f_k
(k >= 1) have degree 0; the curved component f_0 is deliberately not
supported.  Structure constants are stored on canonical symmetric words
only; evaluation on arbitrary words goes through the Koszul sign of
canonical reordering, which makes graded symmetry automatic.

Everything is exact (fractions) and immutable.  Arity truncation K_max
is a first-class parameter: operations above the cap are treated as
zero and every verdict is "up to arity K_max".
"""

from __future__ import annotations

from fractions import Fraction

from .gradedlin import (GradedMap, GradedSpace, canonical_word, cohomology,
                        in_span, koszul_sign, solve_canonical, split_sign,
                        sym_words, unshuffles, vec_add, vec_scale,
                        word_degree, scalar_to_str, scalar_from_str)

DEFAULT_ARITY_CAP = 4


def set_partitions(items):
    """All partitions of the list into nonempty blocks.  Each block
    keeps the input order; blocks are ordered by first element."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def _residual_json(r):
    try:
        return {b: scalar_to_str(c) for b, c in sorted(r.items())}
    except (ValueError, TypeError):
        return {str(b): str(c) for b, c in sorted(r.items(), key=str)}


class CheckReport:
    """Outcome of a relation/morphism/axiom check with witnesses."""

    def __init__(self, name, failures=None, checked=0, notes=None):
        self.name = name
        self.failures = failures or []
        self.checked = checked
        self.notes = notes or []

    @property
    def ok(self):
        return not self.failures

    def to_json(self):
        return {
            "name": self.name,
            "pass": self.ok,
            "checked": self.checked,
            "witness": [
                {"word": list(w), "residual": _residual_json(r)}
                for w, r in self.failures[:3]
            ],
            "notes": self.notes,
        }

    def __repr__(self):
        return "CheckReport(%s, %s)" % (self.name,
                                        "pass" if self.ok else "FAIL")


class LInftyAlgebra:
    """Arity-truncated L-infinity[1]-algebra.

    space: GradedSpace
    ops: {k >= 1: {canonical word: {target label: Fraction}}}
    l0: curvature element {label: Fraction} (empty means strict)
    weights: optional {label: int} weight filtration used by the
        simplex models; operations strictly add weights there, so
        checks filtered by total weight are exact.
    """

    def __init__(self, space, ops, l0=None, arity_cap=DEFAULT_ARITY_CAP,
                 weights=None):
        self.space = space
        self.arity_cap = int(arity_cap)
        self.l0 = {k: Fraction(v) for k, v in (l0 or {}).items()
                   if Fraction(v) != 0}
        self.weights = dict(weights) if weights else None
        clean = {}
        for k, table in ops.items():
            k = int(k)
            if k < 1 or k > self.arity_cap:
                raise ValueError("operation arity %d outside 1..%d"
                                 % (k, self.arity_cap))
            tab = {}
            for word, out in table.items():
                cw, sign = canonical_word(space, word)
                if cw is None:
                    if any(Fraction(c) != 0 for c in out.values()):
                        raise ValueError("value on a vanishing word %r"
                                         % (word,))
                    continue
                val = {b: sign * Fraction(c) for b, c in out.items()
                       if Fraction(c) != 0}
                if not val:
                    continue
                wd = word_degree(space, cw)
                for b in val:
                    if space.deg[b] != wd + 1:
                        raise ValueError(
                            "l_%d(%r) -> %r violates degree +1" % (k, cw, b))
                tab[cw] = vec_add(tab.get(cw, {}), val)
            clean[k] = {w: v for w, v in tab.items() if v}
        self.ops = clean
        for b in self.l0:
            if space.deg[b] != 1:
                raise ValueError("curvature must have degree 1")

    @property
    def is_strict(self):
        return not self.l0

    def op_word(self, k, word):
        """l_k on a tuple of basis labels (any order).  Returns an
        element {label: coeff}.  k outside the stored range gives 0."""
        if k == 0:
            return dict(self.l0)
        if k != len(word):
            raise ValueError("arity mismatch")
        table = self.ops.get(k)
        if not table:
            return {}
        cw, sign = canonical_word(self.space, word)
        if cw is None:
            return {}
        out = table.get(cw, {})
        return vec_scale(sign, out)

    def op_elems(self, k, elems):
        """Multilinear extension of l_k to elements."""
        if k == 0:
            return dict(self.l0)
        out = {}
        terms = [({}, Fraction(1), ())]
        # expand the product of the element arguments into basis words
        words = [((), Fraction(1))]
        for e in elems:
            words = [(w + (b,), c * cb) for w, c in words
                     for b, cb in e.items()]
        for w, c in words:
            if c == 0:
                continue
            out = vec_add(out, vec_scale(c, self.op_word(k, w)))
        return out

    def word_weight(self, word):
        if self.weights is None:
            return 0
        return sum(self.weights[l] for l in word)

    def to_json(self):
        doc = {"space": self.space.to_json(), "arity_cap": self.arity_cap,
               "ops": []}
        if self.l0:
            doc["l0"] = {b: scalar_to_str(c)
                         for b, c in sorted(self.l0.items())}
        for k in sorted(self.ops):
            entries = []
            for w in sorted(self.ops[k]):
                for b, c in sorted(self.ops[k][w].items()):
                    entries.append({"word": list(w), "out": b,
                                    "coeff": scalar_to_str(c)})
            doc["ops"].append({"arity": k, "entries": entries})
        return doc

    @classmethod
    def from_json(cls, doc):
        space = GradedSpace.from_json(doc["space"])
        ops = {}
        for blk in doc["ops"]:
            k = blk["arity"]
            tab = ops.setdefault(k, {})
            for e in blk["entries"]:
                w = tuple(e["word"])
                tab.setdefault(w, {})
                tab[w][e["out"]] = tab[w].get(e["out"], Fraction(0)) \
                    + scalar_from_str(e["coeff"])
        l0 = {b: scalar_from_str(c) for b, c in doc.get("l0", {}).items()}
        return cls(space, ops, l0=l0, arity_cap=doc.get("arity_cap",
                                                        DEFAULT_ARITY_CAP))


def zero_algebra(space=None, arity_cap=DEFAULT_ARITY_CAP):
    """Abelian algebra with all operations zero."""
    return LInftyAlgebra(space or GradedSpace([]), {}, arity_cap=arity_cap)


def chain_complex(space, d: GradedMap, arity_cap=DEFAULT_ARITY_CAP,
                  weights=None):
    """Strict algebra with l_1 = d and l_{k>=2} = 0."""
    ops = {1: {(a,): d.apply_gen(a) for a in space.labels
               if d.apply_gen(a)}}
    return LInftyAlgebra(space, ops, arity_cap=arity_cap, weights=weights)


def quad_residual(A: LInftyAlgebra, word):
    """Left side of the quadratic relation on a canonical word."""
    k = len(word)
    space = A.space
    res = {}
    for i in range(0, k + 1):
        if i == 0 and A.is_strict:
            continue
        for b1, b2 in unshuffles(i, k):
            sgn = split_sign(space, word, b1, b2)
            inner = A.op_word(i, tuple(word[p] for p in b1))
            rest = tuple(word[p] for p in b2)
            for g, c in inner.items():
                out = A.op_word(k - i + 1, (g,) + rest)
                res = vec_add(res, vec_scale(sgn * c, out))
    return res


def check_relations(A: LInftyAlgebra, up_to=None, weight_cap=None):
    """Verify the quadratic relations on all basis words of arity
    <= up_to (and total weight <= weight_cap when the algebra carries
    weights).  Operations above the arity cap count as zero."""
    up_to = min(up_to or A.arity_cap, A.arity_cap)
    failures = []
    checked = 0
    for k in range(0, up_to + 1):
        for word in sym_words(A.space, k):
            if weight_cap is not None and A.word_weight(word) > weight_cap:
                continue
            checked += 1
            res = quad_residual(A, word)
            if res:
                failures.append((word, res))
    return CheckReport("linfty-relations", failures, checked)


class LInftyMorphism:
    """Arity-truncated L-infinity[1]-morphism (strict: no f_0).

    comps: {k >= 1: {canonical word: {target label: Fraction}}},
    every component of degree 0.
    """

    def __init__(self, source, target, comps, arity_cap=None):
        self.source = source
        self.target = target
        self.arity_cap = int(arity_cap if arity_cap is not None
                             else min(source.arity_cap, target.arity_cap))
        clean = {}
        for k, table in comps.items():
            k = int(k)
            if k < 1:
                raise ValueError("curved morphism components unsupported")
            tab = {}
            for word, out in table.items():
                cw, sign = canonical_word(source.space, word)
                if cw is None:
                    continue
                val = {b: sign * Fraction(c) for b, c in out.items()
                       if Fraction(c) != 0}
                if not val:
                    continue
                wd = word_degree(source.space, cw)
                for b in val:
                    if target.space.deg[b] != wd:
                        raise ValueError(
                            "f_%d(%r) -> %r violates degree 0" % (k, cw, b))
                tab[cw] = vec_add(tab.get(cw, {}), val)
            clean[k] = {w: v for w, v in tab.items() if v}
        self.comps = clean

    @classmethod
    def from_linear(cls, source, target, f1_entries, arity_cap=None):
        comps = {1: {(a,): dict(v) for a, v in f1_entries.items() if v}}
        return cls(source, target, comps, arity_cap=arity_cap)

    @classmethod
    def identity(cls, A):
        return cls.from_linear(A, A, {a: {a: Fraction(1)}
                                      for a in A.space.labels})

    def comp_word(self, k, word):
        if k < 1 or k != len(word):
            return {}
        table = self.comps.get(k)
        if not table:
            return {}
        cw, sign = canonical_word(self.source.space, word)
        if cw is None:
            return {}
        return vec_scale(sign, table.get(cw, {}))

    def comp_elems(self, k, elems):
        out = {}
        words = [((), Fraction(1))]
        for e in elems:
            words = [(w + (b,), c * cb) for w, c in words
                     for b, cb in e.items()]
        for w, c in words:
            if c != 0:
                out = vec_add(out, vec_scale(c, self.comp_word(k, w)))
        return out

    def f1_map(self) -> GradedMap:
        entries = {}
        for (a,), out in self.comps.get(1, {}).items():
            for b, c in out.items():
                entries[(a, b)] = c
        return GradedMap(self.source.space, self.target.space, 0, entries)

    def to_json(self):
        doc = {"arity_cap": self.arity_cap, "comps": []}
        for k in sorted(self.comps):
            entries = []
            for w in sorted(self.comps[k]):
                for b, c in sorted(self.comps[k][w].items()):
                    entries.append({"word": list(w), "out": b,
                                    "coeff": scalar_to_str(c)})
            doc["comps"].append({"arity": k, "entries": entries})
        return doc


def partition_terms(space, word):
    """All set partitions of a canonical word's positions with the
    Koszul sign of regrouping.  Yields (sign, [block words])."""
    degs = [space.deg[l] for l in word]
    for part in set_partitions(range(len(word))):
        blocks = sorted([sorted(b) for b in part], key=lambda b: b[0])
        perm = [p for b in blocks for p in b]
        sgn = koszul_sign(degs, perm)
        yield sgn, [tuple(word[p] for p in b) for b in blocks]


def morphism_sides(f: LInftyMorphism, word):
    """Both sides of the morphism relation on a canonical word."""
    A, B = f.source, f.target
    k = len(word)
    lhs = {}
    for i in range(0, k + 1):
        if i == 0 and A.is_strict:
            continue
        for b1, b2 in unshuffles(i, k):
            sgn = split_sign(A.space, word, b1, b2)
            inner = A.op_word(i, tuple(word[p] for p in b1))
            rest = tuple(word[p] for p in b2)
            for g, c in inner.items():
                out = f.comp_word(k - i + 1, (g,) + rest)
                lhs = vec_add(lhs, vec_scale(sgn * c, out))
    rhs = {}
    if k == 0:
        rhs = dict(B.l0)
    else:
        for sgn, blocks in partition_terms(A.space, word):
            t = len(blocks)
            args = [f.comp_word(len(b), b) for b in blocks]
            rhs = vec_add(rhs, vec_scale(sgn, B.op_elems(t, args)))
    return lhs, rhs


def check_morphism(f: LInftyMorphism, up_to=None, weight_cap=None):
    """Verify the morphism relation on all basis words of arity
    <= up_to.  With a curved source the arity-0 relation f_1(l_0) =
    l_0' is included."""
    up_to = min(up_to or f.arity_cap, f.arity_cap)
    failures = []
    checked = 0
    for k in range(0, up_to + 1):
        if k == 0 and f.source.is_strict and f.target.is_strict:
            continue
        for word in sym_words(f.source.space, k):
            if weight_cap is not None \
                    and f.source.word_weight(word) > weight_cap:
                continue
            checked += 1
            lhs, rhs = morphism_sides(f, word)
            res = vec_add(lhs, vec_scale(-1, rhs))
            if res:
                failures.append((word, res))
    return CheckReport("linfty-morphism", failures, checked)


def compose(g: LInftyMorphism, f: LInftyMorphism) -> LInftyMorphism:
    """Composition by the partition sum with 1/(t! j_1!...j_t!)
    normalization (realized as a sum over set partitions)."""
    if f.target is not g.source and f.target.space != g.source.space:
        raise ValueError("composition endpoint mismatch")
    cap = min(f.arity_cap, g.arity_cap)
    comps = {}
    for k in range(1, cap + 1):
        tab = {}
        for word in sym_words(f.source.space, k):
            out = {}
            for sgn, blocks in partition_terms(f.source.space, word):
                t = len(blocks)
                args = [f.comp_word(len(b), b) for b in blocks]
                out = vec_add(out, vec_scale(sgn, g.comp_elems(t, args)))
            if out:
                tab[word] = out
        if tab:
            comps[k] = tab
    return LInftyMorphism(f.source, g.target, comps, arity_cap=cap)


# ---------------------------------------------------------------------------
# direct sums


def _tag(lab, side):
    return "%s@%s" % (lab, side)


def direct_sum(A: LInftyAlgebra, B: LInftyAlgebra) -> LInftyAlgebra:
    """Componentwise structure on A (+) B; mixed words map to zero."""
    gens = [(_tag(l, "0"), A.space.deg[l]) for l in A.space.labels] \
        + [(_tag(l, "1"), B.space.deg[l]) for l in B.space.labels]
    space = GradedSpace(gens)
    cap = min(A.arity_cap, B.arity_cap)
    ops = {}
    for side, alg in (("0", A), ("1", B)):
        for k, table in alg.ops.items():
            if k > cap:
                continue
            tab = ops.setdefault(k, {})
            for w, out in table.items():
                tab[tuple(_tag(l, side) for l in w)] = \
                    {_tag(b, side): c for b, c in out.items()}
    l0 = {_tag(b, "0"): c for b, c in A.l0.items()}
    l0.update({_tag(b, "1"): c for b, c in B.l0.items()})
    return LInftyAlgebra(space, ops, l0=l0, arity_cap=cap)


def direct_sum_mor(f: LInftyMorphism, g: LInftyMorphism) -> LInftyMorphism:
    src = direct_sum(f.source, g.source)
    tgt = direct_sum(f.target, g.target)
    cap = min(f.arity_cap, g.arity_cap)
    comps = {}
    for side, mor in (("0", f), ("1", g)):
        for k, table in mor.comps.items():
            if k > cap:
                continue
            tab = comps.setdefault(k, {})
            for w, out in table.items():
                tab[tuple(_tag(l, side) for l in w)] = \
                    {_tag(b, side): c for b, c in out.items()}
    return LInftyMorphism(src, tgt, comps, arity_cap=cap)


# ---------------------------------------------------------------------------
# coalgebra picture


def word_label(word):
    return "(" + ",".join(word) + ")"


def hat_space(A: LInftyAlgebra, cap, include_empty=False):
    """Truncated symmetric coalgebra S^{<=cap} C as a graded space with
    one generator per canonical word."""
    gens = []
    lo = 0 if include_empty else 1
    for k in range(lo, cap + 1):
        for w in sym_words(A.space, k):
            gens.append((word_label(w), word_degree(A.space, w)))
    return space_with_words(gens, A, cap, lo)


def space_with_words(gens, A, cap, lo):
    space = GradedSpace(gens)
    space.words = {}
    for k in range(lo, cap + 1):
        for w in sym_words(A.space, k):
            space.words[word_label(w)] = w
    return space


def codifferential_hat(A: LInftyAlgebra, cap=None,
                       include_empty=False) -> GradedMap:
    """The coderivation extension of the operations on S^{<=cap} C,
    with words of arity above the cap projected away."""
    cap = cap or A.arity_cap
    space = hat_space(A, cap, include_empty)
    entries = {}
    for wl, word in space.words.items():
        k = len(word)
        out = {}
        lo_i = 0 if not A.is_strict else 1
        for i in range(lo_i, k + 1):
            if i == 0:
                # curvature raises arity by one
                if k + 1 > cap:
                    continue
                for g, c in A.l0.items():
                    cw, sgn = canonical_word(A.space, (g,) + word)
                    if cw is not None and k + 1 >= (0 if include_empty else 1):
                        out = vec_add(out, {word_label(cw): sgn * c})
                continue
            for b1, b2 in unshuffles(i, k):
                sgn = split_sign(A.space, word, b1, b2)
                inner = A.op_word(i, tuple(word[p] for p in b1))
                rest = tuple(word[p] for p in b2)
                if k - i + 1 > cap or (k - i + 1 == 0 and not include_empty):
                    continue
                for g, c in inner.items():
                    cw, s2 = canonical_word(A.space, (g,) + rest)
                    if cw is None:
                        continue
                    out = vec_add(out, {word_label(cw): sgn * s2 * c})
        for b, c in out.items():
            entries[(wl, b)] = c
    return GradedMap(space, space, 1, entries)


def hat_morphism(f: LInftyMorphism, cap=None):
    """The coalgebra-morphism extension S^{<=cap} C -> S^{<=cap} C'."""
    cap = cap or f.arity_cap
    src = hat_space(f.source, cap)
    tgt = hat_space(f.target, cap)
    entries = {}
    for wl, word in src.words.items():
        out = {}
        for sgn, blocks in partition_terms(f.source.space, word):
            t = len(blocks)
            if t > cap:
                continue
            args = [f.comp_word(len(b), b) for b in blocks]
            prods = [((), Fraction(1))]
            for e in args:
                prods = [(w + (b,), c * cb) for w, c in prods
                         for b, cb in e.items()]
            for w2, c in prods:
                cw, s2 = canonical_word(f.target.space, w2)
                if cw is None or c == 0:
                    continue
                out = vec_add(out, {word_label(cw): sgn * s2 * c})
        for b, c in out.items():
            entries[(wl, b)] = c
    return GradedMap(src, tgt, 0, entries), src, tgt


def delta_word(space, word):
    """Comultiplication terms (w1, w2, sign) of a canonical word."""
    k = len(word)
    out = []
    for i in range(1, k):
        for b1, b2 in unshuffles(i, k):
            sgn = split_sign(space, word, b1, b2)
            w1, s1 = canonical_word(space, tuple(word[p] for p in b1))
            w2, s2 = canonical_word(space, tuple(word[p] for p in b2))
            if w1 is None or w2 is None:
                continue
            out.append((w1, w2, sgn * s1 * s2))
    return out


# ---------------------------------------------------------------------------
# cohomology and quasi-isomorphisms


class CurvedError(Exception):
    pass


def l1_map(A: LInftyAlgebra) -> GradedMap:
    if not A.is_strict:
        raise CurvedError("cohomology undefined for curved algebra")
    entries = {}
    for (a,), out in A.ops.get(1, {}).items():
        for b, c in out.items():
            entries[(a, b)] = c
    return GradedMap(A.space, A.space, 1, entries)


def l1_cohomology(A: LInftyAlgebra):
    return cohomology(l1_map(A))


def induced_map_on_cohomology(f: LInftyMorphism):
    """Per-degree matrices of H(f_1), or None when a representative
    fails to land in the target cohomology coordinates (cannot happen
    for chain maps)."""
    HA = l1_cohomology(f.source)
    HB = l1_cohomology(f.target)
    dB = l1_map(f.target)
    f1 = f.f1_map()
    out = {}
    degrees = sorted(set(HA) | set(HB))
    for d in degrees:
        sa = HA.get(d, {"dim": 0, "reps": []})
        sb = HB.get(d, {"dim": 0, "reps": []})
        tgt_basis = f.target.space.basis_in_degree(d)
        prev = f.target.space.basis_in_degree(d - 1)
        img_cols = []
        for p in prev:
            v = dB.apply_gen(p)
            img_cols.append([v.get(b, Fraction(0)) for b in tgt_basis])
        rep_cols = [[r.get(b, Fraction(0)) for b in tgt_basis]
                    for r in sb["reps"]]
        cols = rep_cols + img_cols
        mat = []
        if cols:
            matT = [list(c) for c in cols]
            mat = [[matT[c][r] for c in range(len(cols))]
                   for r in range(len(tgt_basis))]
        rows = []
        for r in sa["reps"]:
            v = f1.apply(r)
            vv = [v.get(b, Fraction(0)) for b in tgt_basis]
            if not cols:
                if any(x != 0 for x in vv):
                    return None
                rows.append([])
                continue
            x = solve_canonical(mat, vv, ncols=len(cols))
            if x is None:
                return None
            rows.append(x[:len(rep_cols)])
        out[d] = {"matrix": rows, "source_dim": sa["dim"],
                  "target_dim": sb["dim"]}
    return out


def is_quasi_iso(f: LInftyMorphism):
    """True iff f_1 induces isomorphisms on l_1-cohomology in every
    degree.  Returns (bool, certificate)."""
    ind = induced_map_on_cohomology(f)
    if ind is None:
        return False, {"reason": "induced map undefined"}
    cert = {}
    ok = True
    for d, rec in ind.items():
        m, n = rec["source_dim"], rec["target_dim"]
        good = (m == n)
        if good and m > 0:
            from .gradedlin import matrix_rank
            good = matrix_rank(rec["matrix"]) == m
        cert[d] = {"matrix": [[scalar_to_str(c) for c in row]
                              for row in rec["matrix"]],
                   "iso": good}
        ok = ok and good
    return ok, cert


# ---------------------------------------------------------------------------
# obstruction theory


def delta1(f_source: LInftyAlgebra, f_target: LInftyAlgebra, g, deg_g=0):
    """Hochschild differential on Hom(S^m C, C'):
    delta1(g) = l'_1 . g + (-1)^{deg_g + 1} g . \\hat l_1.
    g: {canonical word: element}."""
    sgn_tail = -1 if deg_g % 2 == 0 else 1
    out = {}
    space = f_source.space
    for word in g:
        val = f_target.op_elems(1, [g[word]])
        k = len(word)
        for b1, b2 in unshuffles(1, k):
            sgn = split_sign(space, word, b1, b2)
            inner = f_source.op_word(1, (word[b1[0]],))
            rest = tuple(word[p] for p in b2)
            for h, c in inner.items():
                cw, s2 = canonical_word(space, (h,) + rest)
                if cw is None:
                    continue
                val = vec_add(val, vec_scale(sgn_tail * sgn * s2 * c,
                                             g.get(cw, {})))
        if val:
            out[word] = val
    return out


def _delta1_full(A, B, g, m, deg_g=0):
    """delta1 of a map defined on every canonical word of arity m
    (missing words count as zero)."""
    table = {w: g.get(w, {}) for w in sym_words(A.space, m)}
    sgn_tail = -1 if deg_g % 2 == 0 else 1
    out = {}
    for word, val0 in table.items():
        val = B.op_elems(1, [val0]) if val0 else {}
        for b1, b2 in unshuffles(1, m):
            sgn = split_sign(A.space, word, b1, b2)
            inner = A.op_word(1, (word[b1[0]],))
            rest = tuple(word[p] for p in b2)
            for h, c in inner.items():
                cw, s2 = canonical_word(A.space, (h,) + rest)
                if cw is None:
                    continue
                val = vec_add(val, vec_scale(sgn_tail * sgn * s2 * c,
                                             table.get(cw, {})))
        if val:
            out[word] = val
    return out


class ObstructionClass:
    """The degree-1 cocycle obstructing extension of an arity-K
    morphism to arity K+1, plus its exactness data."""

    def __init__(self, f, K, cocycle, exact, witness):
        self.morphism = f
        self.K = K
        self.cocycle = cocycle          # {word(K+1): element}
        self.exact = exact              # bool
        self.witness = witness          # extension component or None

    def to_json(self):
        return {
            "K": self.K,
            "exact": self.exact,
            "cocycle": [
                {"word": list(w),
                 "out": {b: scalar_to_str(c) for b, c in sorted(e.items())}}
                for w, e in sorted(self.cocycle.items())
            ],
        }


def obstruction_cocycle(f: LInftyMorphism, K):
    """O_{K+1}(f) as {canonical word of arity K+1: element}, normalized
    so that an extension f_{K+1} exists iff delta1(f_{K+1}) = O."""
    A, B = f.source, f.target
    if not (A.is_strict and B.is_strict):
        raise CurvedError("obstruction theory requires strict algebras")
    out = {}
    for word in sym_words(A.space, K + 1):
        val = {}
        # terms of the left side of the relation that avoid f_{K+1}
        for i in range(2, K + 2):
            for b1, b2 in unshuffles(i, K + 1):
                sgn = split_sign(A.space, word, b1, b2)
                inner = A.op_word(i, tuple(word[p] for p in b1))
                rest = tuple(word[p] for p in b2)
                for g, c in inner.items():
                    val = vec_add(val, vec_scale(
                        sgn * c, f.comp_word(K + 2 - i, (g,) + rest)))
        # minus the right-side terms with at least two blocks
        for sgn, blocks in partition_terms(A.space, word):
            t = len(blocks)
            if t < 2:
                continue
            args = [f.comp_word(len(b), b) for b in blocks]
            val = vec_add(val, vec_scale(-sgn, B.op_elems(t, args)))
        if val:
            out[word] = val
    return out


def obstruction_class(f: LInftyMorphism, K) -> ObstructionClass:
    """Compute O_{K+1}(f), decide delta1-exactness by an exact linear
    solve, and produce the canonical extension component when exact."""
    A, B = f.source, f.target
    O = obstruction_cocycle(f, K)
    closed = _delta1_full(A, B, O, K + 1, deg_g=1)
    if closed:
        raise AssertionError("obstruction cocycle is not delta1-closed")
    sol = solve_delta1(A, B, O, K + 1)
    return ObstructionClass(f, K, O, sol is not None, sol)


def solve_delta1(A, B, rhs, m):
    """Solve delta1(g) = rhs for a degree-0 map g on S^m words.
    Returns {word: element} (canonical reduced-echelon solution) or
    None."""
    words = sym_words(A.space, m)
    unknowns = []
    for w in words:
        d = word_degree(A.space, w)
        for b in B.space.basis_in_degree(d):
            unknowns.append((w, b))
    uindex = {u: i for i, u in enumerate(unknowns)}
    rows, rvec = [], []
    for w in words:
        d = word_degree(A.space, w) + 1
        # delta1(g)(w) = l1'(g(w)) - sum_j +- g(l1(a_j) . rest)
        coeffs = {}
        for b in B.space.basis_in_degree(d - 1):
            img = B.op_word(1, (b,))
            for b2, c in img.items():
                coeffs.setdefault(b2, {})[(w, b)] = \
                    coeffs.get(b2, {}).get((w, b), Fraction(0)) + c
        for b1, b2 in unshuffles(1, m):
            sgn = split_sign(A.space, w, b1, b2)
            inner = A.op_word(1, (w[b1[0]],))
            rest = tuple(w[p] for p in b2)
            for h, c in inner.items():
                cw, s2 = canonical_word(A.space, (h,) + rest)
                if cw is None:
                    continue
                dd = word_degree(A.space, cw)
                for b in B.space.basis_in_degree(dd):
                    coeffs.setdefault(b, {})[(cw, b)] = \
                        coeffs.get(b, {}).get((cw, b), Fraction(0)) \
                        - sgn * s2 * c
        target_basis = B.space.basis_in_degree(d)
        for b2 in target_basis:
            row = [Fraction(0)] * len(unknowns)
            for u, c in coeffs.get(b2, {}).items():
                row[uindex[u]] += c
            rows.append(row)
            rvec.append(rhs.get(w, {}).get(b2, Fraction(0)))
    x = solve_canonical(rows, rvec, ncols=len(unknowns))
    if x is None:
        return None
    g = {}
    for (w, b), xi in zip(unknowns, x):
        if xi != 0:
            g.setdefault(w, {})[b] = xi
    return g


def extend_morphism(f: LInftyMorphism, K):
    """Extension of an arity-K morphism to arity K+1, or the certified
    obstruction.  Returns (morphism or None, ObstructionClass)."""
    obc = obstruction_class(f, K)
    if not obc.exact:
        return None, obc
    comps = {k: dict(t) for k, t in f.comps.items()}
    if obc.witness:
        comps[K + 1] = obc.witness
    cap = max(f.arity_cap, K + 1)
    ext = LInftyMorphism(f.source, f.target, comps, arity_cap=cap)
    return ext, obc
