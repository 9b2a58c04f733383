"""Koszul complexes, foliation de Rham complexes, and local algebras
at jet scale.

All rings are polynomial rings truncated at a fixed total degree
(jets at the origin).  Complexes use a staircase cap: the piece with
j wedge factors keeps coefficients of degree at most order - j.  With
that convention the augmented foliation complex is genuinely acyclic
and the Koszul complex of a regular linear sequence is exact in
negative degrees, both certified at the stated jet order by exact
rank computations.

Labels follow the convention of the derived-brackets module:
"monomial|wedge", where the wedge part is "1" for functions,
dot-separated frame tokens ("a1.a2") for Koszul generators,
dot-separated coordinate differentials ("dq1.dy2") for forms, and
"g" for the augmentation copy of a closed function in degree -2.
"""

import itertools
from fractions import Fraction

from .gradedlin import (GradedMap, GradedSpace, cohomology, complement_in,
                        solve_canonical, sym_words, vec_add, vec_scale,
                        word_degree)
from .linfty import (LInftyAlgebra, LInftyMorphism, check_morphism,
                     direct_sum, is_quasi_iso, l1_cohomology, l1_map,
                     quad_residual)
from .derived import (label_base_weight, poly_add, poly_const, poly_deg,
                      poly_diff, poly_from_json, poly_mul, poly_scale,
                      poly_to_json, poly_trunc, poly_var, poly_zero)


# ---------------------------------------------------------------------------
# truncated polynomial rings


class JetRing:
    """Polynomial functions near the origin of a coordinate patch,
    truncated at a fixed total degree (jets at the stated order)."""

    def __init__(self, var_names, order=4):
        if len(set(var_names)) != len(var_names):
            raise ValueError("duplicate variable name")
        if order < 0:
            raise ValueError("negative jet order")
        self.names = list(var_names)
        self.order = int(order)
        self.nv = len(self.names)
        self.name_to_idx = {n: i for i, n in enumerate(self.names)}

    def var(self, name):
        return poly_var(self.name_to_idx[name], self.nv)

    def const(self, c):
        return poly_const(c, self.nv)

    def mul(self, p, q):
        return poly_trunc(poly_mul(p, q), range(self.nv), self.order)

    def monomials(self, cap=None):
        cap = self.order if cap is None else cap
        out = []
        for exps in itertools.product(range(cap + 1), repeat=self.nv):
            if sum(exps) <= cap:
                out.append(tuple(exps))
        return sorted(out)

    def mono_str(self, e):
        parts = []
        for i, x in enumerate(e):
            if x == 1:
                parts.append(self.names[i])
            elif x > 1:
                parts.append("%s^%d" % (self.names[i], x))
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

    def embed_from(self, other, p):
        """Include a polynomial over a sub-ring whose variables all
        appear here."""
        out = {}
        for e, c in p.items():
            e2 = [0] * self.nv
            for i, x in enumerate(e):
                e2[self.name_to_idx[other.names[i]]] = x
            out[tuple(e2)] = c
        return out

    def to_json(self):
        return {"vars": list(self.names), "order": self.order}

    @classmethod
    def from_json(cls, doc):
        return cls(doc["vars"], doc["order"])


class Section:
    """Tuple of ring elements: a section of a trivialized rank-r
    bundle in the standard orthonormal frame."""

    def __init__(self, ring, comps):
        self.ring = ring
        self.comps = [dict(p) for p in comps]

    @property
    def rank(self):
        return len(self.comps)

    def min_vanishing_order(self, idxs=None):
        """Smallest total degree (in the listed variables) among all
        component terms; a large sentinel for the zero section."""
        best = 10 ** 9
        for p in self.comps:
            for e in p:
                d = sum(e) if idxs is None else sum(e[i] for i in idxs)
                best = min(best, d)
        return best

    def to_json(self):
        return {"ring": self.ring.to_json(),
                "comps": [poly_to_json(p) for p in self.comps]}

    @classmethod
    def from_json(cls, doc):
        ring = JetRing.from_json(doc["ring"])
        return cls(ring, [poly_from_json(c) for c in doc["comps"]])


# ---------------------------------------------------------------------------
# label helpers


def split_label(label):
    mono, wedge = label.split("|")
    return mono, () if wedge == "1" else tuple(wedge.split("."))


def make_label(mono, tokens):
    return mono + "|" + (".".join(tokens) if tokens else "1")


def _insert_token(tokens, tok):
    """Insert a wedge token into a sorted word; returns (word, sign)
    with the Koszul sign of moving it into place, or (None, 0) on a
    repeat."""
    if tok in tokens:
        return None, 0
    pos = 0
    while pos < len(tokens) and tokens[pos] < tok:
        pos += 1
    return tokens[:pos] + (tok,) + tokens[pos:], (-1) ** pos


# ---------------------------------------------------------------------------
# Koszul complexes


def koszul_complex(section, step=1):
    """Contraction complex of a section on the exterior algebra of the
    dual frame, with staircase coefficient caps.

    The differential sends a_1 ^ ... ^ a_j to
    sum_i (-1)^(i+1) s_i-th component times the word without a_i;
    it squares to zero (also after truncation, because truncation is
    by an ideal of the coefficient ring)."""
    ring = section.ring
    r = section.rank
    D = ring.order
    tokens = ["a%d" % (i + 1) for i in range(r)]
    labels = []
    caps = {}
    for j in range(r + 1):
        cap = D - j * step
        if cap < 0:
            continue
        caps[j] = cap
        for word in itertools.combinations(range(r), j):
            toks = tuple(tokens[i] for i in word)
            for e in ring.monomials(cap):
                labels.append((make_label(ring.mono_str(e), toks), -j))
    space = GradedSpace(labels)
    ops = {1: {}}
    for lab, deg in labels:
        mono, toks = split_label(lab)
        j = len(toks)
        if j == 0:
            continue
        e = ring.mono_parse(mono)
        out = {}
        for i, tok in enumerate(toks):
            comp = section.comps[int(tok[1:]) - 1]
            prod = poly_trunc(poly_mul({e: Fraction(1)}, comp),
                              range(ring.nv), caps.get(j - 1, -1))
            rest = toks[:i] + toks[i + 1:]
            for e2, c in prod.items():
                lab2 = make_label(ring.mono_str(e2), rest)
                c2 = out.get(lab2, Fraction(0)) + ((-1) ** i) * c
                if c2:
                    out[lab2] = c2
                else:
                    out.pop(lab2, None)
        if out:
            ops[1][(lab,)] = out
    weights = {lab: label_base_weight(lab) for lab, _ in labels}
    alg = LInftyAlgebra(space, ops if ops[1] else {}, arity_cap=4,
                        weights=weights)
    alg.ring = ring
    alg.section = section
    alg.step = step
    return alg


def koszul_cohomology(alg):
    return {d: h["dim"] for d, h in l1_cohomology(alg).items()}


# ---------------------------------------------------------------------------
# foliation de Rham complexes


def d_form(ring, fol_names, vec):
    """Exterior derivative in the listed foliation directions of a
    form given as a label dictionary; exact, no truncation."""
    out = {}
    for lab, c in vec.items():
        mono, toks = split_label(lab)
        e = ring.mono_parse(mono)
        for name in fol_names:
            dp = poly_diff({e: Fraction(1)}, ring.name_to_idx[name])
            if not dp:
                continue
            word, sgn = _insert_token(toks, "d" + name)
            if word is None:
                continue
            for e2, c2 in dp.items():
                lab2 = make_label(ring.mono_str(e2), word)
                c3 = out.get(lab2, Fraction(0)) + sgn * c * c2
                if c3:
                    out[lab2] = c3
                else:
                    out.pop(lab2, None)
    return out


def foliation_complex(ring, fol_names=None, augmented=False, step=1):
    """Differential forms in the foliation directions with truncated
    polynomial coefficients (staircase caps), as a strict algebra with
    only a unary operation.

    With `augmented`, the closed functions (those free of foliation
    variables) are adjoined in degree -2 with the inclusion as the
    differential; the augmented complex is acyclic in every degree."""
    fol_names = list(ring.names) if fol_names is None else list(fol_names)
    for n in fol_names:
        if n not in ring.name_to_idx:
            raise ValueError("unknown foliation variable %r" % (n,))
    fol_idxs = [ring.name_to_idx[n] for n in fol_names]
    D = ring.order
    labels = []
    caps = {}
    for j in range(len(fol_names) + 1):
        cap = D - j * step
        if cap < 0:
            continue
        caps[j] = cap
        for combo in itertools.combinations(sorted(fol_names), j):
            toks = tuple("d" + n for n in combo)
            for e in ring.monomials(cap):
                labels.append((make_label(ring.mono_str(e), toks), j - 1))
    if augmented:
        for e in ring.monomials(D):
            if all(e[i] == 0 for i in fol_idxs):
                labels.append((make_label(ring.mono_str(e), ("g",)), -2))
    space = GradedSpace(labels)
    ops = {1: {}}
    present = {lab for lab, _ in labels}
    for lab, deg in labels:
        mono, toks = split_label(lab)
        if toks == ("g",):
            ops[1][(lab,)] = {make_label(mono, ()): Fraction(1)}
            continue
        out = d_form(ring, fol_names, {lab: Fraction(1)})
        out = {l2: c for l2, c in out.items() if l2 in present}
        if out:
            ops[1][(lab,)] = out
    weights = {lab: label_base_weight(lab) for lab, _ in labels}
    alg = LInftyAlgebra(space, ops if ops[1] else {}, arity_cap=4,
                        weights=weights)
    alg.ring = ring
    alg.fol_names = fol_names
    alg.augmented = augmented
    alg.step = step
    return alg


# ---------------------------------------------------------------------------
# the Poincare primitive


def poincare_primitive(ring, fol_names, xi):
    """Preimage of a closed form of degree >= 1 under the foliation
    exterior derivative, by exact monomial integration along the
    scaling homotopy of the foliation directions.

    Raises ValueError with the residual when the input is not closed.
    Together with evaluation at foliation-coordinates zero this is a
    contracting homotopy: d(primitive(xi)) + primitive(d(xi)) equals
    xi minus its foliation-constant part (property-tested)."""
    res = d_form(ring, fol_names, xi)
    if res:
        raise ValueError("input form is not closed; residual %r"
                         % (sorted(res)[0],))
    fol_idxs = [ring.name_to_idx[n] for n in fol_names]
    out = {}
    for lab, c in xi.items():
        mono, toks = split_label(lab)
        if not toks or toks == ("g",):
            raise ValueError("positive form degree required")
        e = ring.mono_parse(mono)
        denom = sum(e[i] for i in fol_idxs) + len(toks)
        for s, tok in enumerate(toks):
            name = tok[1:]
            e2 = list(e)
            e2[ring.name_to_idx[name]] += 1
            lab2 = make_label(ring.mono_str(tuple(e2)),
                              toks[:s] + toks[s + 1:])
            c2 = out.get(lab2, Fraction(0)) \
                + ((-1) ** s) * c / denom
            if c2:
                out[lab2] = c2
            else:
                out.pop(lab2, None)
    return out


# ---------------------------------------------------------------------------
# extending operations over the augmentation


def _ring_of(Omega):
    """Coordinate data of a form-labeled algebra: either built by
    foliation_complex or produced from the jet multivector model."""
    if hasattr(Omega, "ring"):
        return Omega.ring, Omega.fol_names
    model = Omega.jet_model
    names = [model.names[i] for i in model.base_idxs]
    ring = JetRing(names, model.base_cap)
    fol = [n for n in names if n.startswith("q")]
    return ring, fol


def augment_extension(Omega, k_max):
    """Extend the operations of a foliation-form algebra over the
    degree -2 copy of its closed functions.

    The unary operation on the new generators is the inclusion.  The
    mixed higher operations are forced by the quadratic relations:
    processing words of each arity in descending total degree, the
    relation residual with the unknown entry absent is a closed form,
    and the new operation is minus its primitive (minus the matching
    degree -2 generators at function level).  A non-closed residual or
    a nonzero residual below the integrable range signals an
    inconsistency in the input operations and raises.

    Truncation guard: new operations are only assigned on words whose
    total weight keeps every residual term below the coefficient cap,
    so each assignment integrates an exact residual.  The result
    carries `check_cap`: relation checks filtered by that weight are
    exact (and tested to pass)."""
    ring, fol_names = _ring_of(Omega)
    fol_idxs = [ring.name_to_idx[n] for n in fol_names]
    labels = [(lab, Omega.space.deg[lab]) for lab in Omega.space.labels]
    present = {lab for lab, _ in labels}
    for e in ring.monomials(ring.order):
        if all(e[i] == 0 for i in fol_idxs):
            lab = make_label(ring.mono_str(e), ("g",))
            if lab not in present:
                labels.append((lab, -2))
    space = GradedSpace(labels)
    weights = {lab: label_base_weight(lab) for lab, _ in labels}
    ops = {k: {w: dict(out) for w, out in tab.items()}
           for k, tab in Omega.ops.items()}
    for lab, deg in labels:
        if deg == -2 and split_label(lab)[1] == ("g",):
            ops.setdefault(1, {})[(lab,)] = \
                {make_label(split_label(lab)[0], ()): Fraction(1)}
    cap = max(k_max, Omega.arity_cap)
    alg = LInftyAlgebra(space, ops, l0=Omega.l0, arity_cap=cap,
                        weights=weights)
    for attr in ("jet_model", "ring", "fol_names"):
        if hasattr(Omega, attr):
            setattr(alg, attr, getattr(Omega, attr))
    g0 = getattr(Omega, "weight_gain", 0)
    gain = g0
    # words above this weight could see truncated residual terms; they
    # get no assigned operation and stay outside the certified range
    guard = ring.order - 2 * (g0 + 1) - g0

    def is_aug(lab):
        return split_label(lab)[1] == ("g",)

    for m in range(2, k_max + 1):
        words = [w for w in sym_words(space, m)
                 if any(is_aug(x) for x in w)
                 and sum(weights[x] for x in w) <= guard]
        words.sort(key=lambda w: -word_degree(space, w))
        for w in words:
            res = quad_residual(alg, w)
            if not res:
                continue
            deg_r = word_degree(space, w) + 2
            if deg_r >= 0:
                eta = vec_scale(-1, poincare_primitive(ring, fol_names,
                                                       res))
            elif deg_r == -1:
                bad = [lab for lab in res
                       if any(ring.mono_parse(split_label(lab)[0])[i]
                              for i in fol_idxs)]
                if bad:
                    raise ValueError(
                        "function-level residual is not closed at %r"
                        % (bad[0],))
                eta = {make_label(split_label(lab)[0], ("g",)): -c
                       for lab, c in res.items()}
            else:
                raise ValueError(
                    "unintegrable residual in degree %d at word %r"
                    % (deg_r, w))
            kept = {lab: c for lab, c in eta.items()
                    if lab in space.deg}
            iw = sum(weights[x] for x in w)
            for lab in eta:
                gain = max(gain, label_base_weight(lab) - iw)
            if kept:
                alg.ops.setdefault(m, {})[w] = kept
    alg.weight_gain = gain
    alg.check_cap = min(guard - (g0 + 1), ring.order - 2 * gain)
    return alg


# ---------------------------------------------------------------------------
# local algebras


def _sum_with_weights(A, B):
    C = direct_sum(A, B)
    weights = {}
    for lab in C.space.labels:
        base, side = lab.rsplit("@", 1)
        src = A if side == "0" else B
        weights[lab] = src.weights[base] if src.weights else 0
    return LInftyAlgebra(C.space, C.ops, l0=C.l0, arity_cap=C.arity_cap,
                         weights=weights)


class LocalAlgebra:
    """Koszul complex of a section alongside the augmented foliation
    de Rham complex of the same patch; the two summands never
    interact."""

    def __init__(self, koszul, derham, section):
        self.koszul = koszul
        self.derham = derham
        self.section = section
        self.ring = section.ring
        self.algebra = _sum_with_weights(koszul, derham)

    def koszul_label(self, lab):
        return lab + "@0"

    def derham_label(self, lab):
        return lab + "@1"


def build_local_algebra(section, fol_names=None, step=1):
    """Local algebra of a chart whose 2-form block vanishes: the
    foliation fills the whole patch, so the de Rham summand uses every
    coordinate direction and only the augmentation constant survives
    in degree -2."""
    ring = section.ring
    kos = koszul_complex(section, step=step)
    der = foliation_complex(ring, fol_names, augmented=True, step=step)
    return LocalAlgebra(kos, der, section)


def expand_chart(L, new_vars):
    """Stabilized chart: new coordinate directions paired with new
    frame directions, the section extended by the identity on the new
    block.  Returns the expanded local algebra and the strict
    label-inclusion morphism into it, which is a quasi-isomorphism."""
    ring = L.ring
    for v in new_vars:
        if v in ring.name_to_idx:
            raise ValueError("variable %r already present" % (v,))
    if not new_vars:
        return L, LInftyMorphism.identity(L.algebra)
    ring2 = JetRing(ring.names + list(new_vars), ring.order)
    comps = [ring2.embed_from(ring, p) for p in L.section.comps]
    comps += [ring2.var(v) for v in new_vars]
    L2 = build_local_algebra(Section(ring2, comps),
                             fol_names=L.derham.fol_names
                             + list(new_vars),
                             step=L.koszul.step)
    tset = set(L2.algebra.space.labels)
    comps1 = {}
    for lab in L.algebra.space.labels:
        if lab not in tset:
            continue
        comps1[(lab,)] = {lab: Fraction(1)}
    pihat = LInftyMorphism(L.algebra, L2.algebra, {1: comps1},
                           arity_cap=L.algebra.arity_cap)
    return L2, pihat


# ---------------------------------------------------------------------------
# quotient complexes


def quotient_cohomology(f):
    """Cohomology of the target complex modulo the image of the first
    component, from exact ranks.  For an injective chain map this
    vanishing in every degree is equivalent to the map being a
    quasi-isomorphism."""
    T = f.target
    degrees = sorted(set(T.space.deg.values()))
    bases = {d: T.space.basis_in_degree(d) for d in degrees}
    f1 = f.f1_map()
    images = {d: [] for d in degrees}
    for a in f.source.space.labels:
        v = f1.apply_gen(a)
        if not v:
            continue
        d = T.space.deg[next(iter(v))]
        images[d].append([v.get(b, Fraction(0)) for b in bases[d]])
    # quotient bases and the induced differential
    quots = {}
    for d in degrees:
        amb = [[Fraction(1 if i == j else 0) for j in range(len(bases[d]))]
               for i in range(len(bases[d]))]
        quots[d] = complement_in(amb, images[d]) if bases[d] else []
    gens = []
    for d in degrees:
        for i in range(len(quots[d])):
            gens.append(("c%d_%d" % (d, i), d))
    qspace = GradedSpace(gens)
    entries = {}
    dmap = l1_map(T)
    for d in degrees:
        nxt = d + 1
        cols = quots.get(nxt, [])
        imgs = images.get(nxt, [])
        basis_next = bases.get(nxt, [])
        for i, vec in enumerate(quots[d]):
            elem = {}
            for b, c in zip(bases[d], vec):
                if c:
                    elem = vec_add(elem, vec_scale(c, dmap.apply_gen(b)))
            rhs = [elem.get(b, Fraction(0)) for b in basis_next]
            mat = [[row[j] for row in cols] + [row2[j] for row2 in imgs]
                   for j in range(len(basis_next))]
            sol = solve_canonical(mat, rhs, ncols=len(cols) + len(imgs))
            if sol is None:
                raise ValueError("image is not a subcomplex")
            for k2, c in enumerate(sol[:len(cols)]):
                if c:
                    entries[("c%d_%d" % (d, i),
                             "c%d_%d" % (nxt, k2))] = c
    qd = GradedMap(qspace, qspace, 1, entries)
    return {d: h["dim"] for d, h in cohomology(qd).items()}


# ---------------------------------------------------------------------------
# embedding acceptance


class EmbeddingReport:
    """Outcome of the chart-embedding acceptance check."""

    def __init__(self, accepted, reason, eta=None, checks=None):
        self.accepted = accepted
        self.reason = reason
        self.eta = eta
        self.checks = checks or {}

    def to_json(self):
        return {"accepted": self.accepted, "reason": self.reason,
                "checks": {k: str(v) for k, v in
                           sorted(self.checks.items())}}


def fooo_embedding_check(section, amb_section, bundle_map, verify_cap=None):
    """Acceptance check for an embedding of charts given by the
    inclusion of coordinate subspaces (by variable name) and a
    constant bundle map with orthonormal columns.

    Accepts when the ambient section restricts to the mapped section,
    its complement components vanish to order exactly one along the
    image, and their linearization identifies the normal directions
    with the complement of the bundle image.  On acceptance the
    induced morphism of local algebras (coefficient inclusion on the
    de Rham side, bundle map on the frame side) is built and certified
    a quasi-isomorphism by exact ranks, including the vanishing of the
    quotient Koszul cohomology in every degree."""
    ring, amb = section.ring, amb_section.ring
    for n in ring.names:
        if n not in amb.name_to_idx:
            raise ValueError("image variable %r missing from the "
                             "ambient chart" % (n,))
    if amb.order != ring.order:
        raise ValueError("jet orders differ")
    r, rp = section.rank, amb_section.rank
    B = [[Fraction(x) for x in row] for row in bundle_map]
    if len(B) != rp or any(len(row) != r for row in B):
        raise ValueError("bundle map must be %d x %d" % (rp, r))
    for i in range(r):
        for j in range(r):
            dot = sum(B[a][i] * B[a][j] for a in range(rp))
            if dot != (1 if i == j else 0):
                raise ValueError("bundle map columns must be "
                                 "orthonormal")
    normal = [n for n in amb.names if n not in ring.name_to_idx]
    normal_idxs = [amb.name_to_idx[n] for n in normal]
    checks = {"normal": tuple(normal)}

    def restrict(p):
        """Evaluate at normal coordinates zero, as a polynomial of the
        sub-ring."""
        out = {}
        for e, c in p.items():
            if any(e[i] for i in normal_idxs):
                continue
            e2 = tuple(e[amb.name_to_idx[n]] for n in ring.names)
            out[e2] = c
        return out

    # the ambient section restricts to the bundle image of the section
    for b in range(rp):
        want = poly_zero()
        for i in range(r):
            want = poly_add(want, poly_scale(B[b][i], section.comps[i]))
        got = restrict(amb_section.comps[b])
        if poly_add(got, poly_scale(-1, want)):
            return EmbeddingReport(
                False, "ambient section does not restrict to the "
                "mapped section in frame component %d" % (b + 1),
                checks=checks)
    # complement components of the ambient section
    cols = [[B[a][i] for a in range(rp)] for i in range(r)]
    amb_basis = [[Fraction(1 if i == j else 0) for j in range(rp)]
                 for i in range(rp)]
    comp_frame = complement_in(amb_basis, cols)
    checks["complement_rank"] = len(comp_frame)
    if len(comp_frame) != len(normal):
        return EmbeddingReport(
            False, "tangent condition fails: %d complement frame "
            "directions against %d normal coordinates"
            % (len(comp_frame), len(normal)), checks=checks)
    comp_secs = []
    for vec in comp_frame:
        p = poly_zero()
        for a in range(rp):
            p = poly_add(p, poly_scale(vec[a], amb_section.comps[a]))
        comp_secs.append(p)
    for k2, p in enumerate(comp_secs):
        orders = [sum(e[i] for i in normal_idxs) for e in p]
        if not p or min(orders) >= 2:
            return EmbeddingReport(
                False, "complement section component %d vanishes to "
                "order >= 2 along the image, violating the regular "
                "sequence hypothesis" % (k2 + 1), checks=checks)
    # linearization of the complement components in the normal
    # directions at the origin
    lin = []
    for p in comp_secs:
        row = []
        for i in normal_idxs:
            e = [0] * amb.nv
            e[i] = 1
            row.append(p.get(tuple(e), Fraction(0)))
        lin.append(row)
    from .gradedlin import matrix_rank
    rk = matrix_rank(lin) if lin else 0
    checks["linearization_rank"] = rk
    if rk != len(normal):
        covered = {i for row in lin for i, c in enumerate(row) if c}
        missing = [normal[i] for i in range(len(normal))
                   if i not in covered]
        name = missing[0] if missing else normal[0]
        return EmbeddingReport(
            False, "tangent condition fails: degenerate normal "
            "direction %s" % name, checks=checks)

    # build the induced morphism of local algebras
    L = build_local_algebra(section)
    L2 = build_local_algebra(amb_section)
    tset = set(L2.algebra.space.labels)
    comps1 = {}
    for lab in L.algebra.space.labels:
        base, side = lab.rsplit("@", 1)
        mono, toks = split_label(base)
        if side == "1":
            if lab in tset:
                comps1[(lab,)] = {lab: Fraction(1)}
            continue
        # Koszul side: push the frame word through the bundle map
        out = {}
        choices = [[(b, B[b][int(t[1:]) - 1]) for b in range(rp)
                    if B[b][int(t[1:]) - 1]] for t in toks]
        for pick in itertools.product(*choices):
            idxs = [b for b, _ in pick]
            if len(set(idxs)) != len(idxs):
                continue
            coeff = Fraction(1)
            for _, c in pick:
                coeff *= c
            inv = sum(1 for i in range(len(idxs))
                      for j in range(i + 1, len(idxs))
                      if idxs[i] > idxs[j])
            toks2 = tuple(sorted("a%d" % (b + 1) for b in idxs))
            lab2 = make_label(mono, toks2) + "@0"
            if lab2 not in tset:
                continue
            c2 = out.get(lab2, Fraction(0)) + ((-1) ** inv) * coeff
            if c2:
                out[lab2] = c2
            else:
                out.pop(lab2, None)
        if out:
            comps1[(lab,)] = out
    eta = LInftyMorphism(L.algebra, L2.algebra, {1: comps1},
                         arity_cap=L.algebra.arity_cap)
    cap = verify_cap
    if cap is None:
        gain = max(1, section.min_vanishing_order()
                   if section.comps else 1)
        cap = ring.order - gain
    rep = check_morphism(eta, up_to=1, weight_cap=cap)
    checks["chain_map"] = rep.ok
    if not rep.ok:
        return EmbeddingReport(
            False, "induced map fails the chain relation", eta=eta,
            checks=checks)
    ok, _ = is_quasi_iso(eta)
    checks["quasi_iso"] = ok
    if not ok:
        return EmbeddingReport(
            False, "induced map is not a quasi-isomorphism at this "
            "jet order", eta=eta, checks=checks)
    checks["koszul_quotient"] = dict(quotient_cohomology(
        _koszul_part(eta, L, L2)))
    return EmbeddingReport(True, "accepted", eta=eta, checks=checks)


def _koszul_part(eta, L, L2):
    comps = {}
    for (lab,), out in eta.comps.get(1, {}).items():
        if lab.endswith("@0"):
            comps[(lab[:-2],)] = {b[:-2]: c for b, c in out.items()}
    return LInftyMorphism(L.koszul, L2.koszul, {1: comps},
                          arity_cap=L.koszul.arity_cap)
