"""Polynomial differential forms on standard simplices and the tensor
models of a simplex times an algebra.

Forms on the n-simplex use coordinates t_1 .. t_n (the 0-th barycentric
coordinate is eliminated via the affine relation).  A monomial form is
a pair (exponent vector, strictly increasing dt index tuple).  The
weight of a monomial (polynomial degree plus form degree) is preserved
by d and additive under wedge, so the span of all basis monomials of
weight above a cap is an operations ideal of the tensor model; the
quotient (drop outputs above the cap) is a genuine finite-dimensional
algebra.  Face restriction can lower weight, so evaluation maps are
verified on words of total weight up to the cap only; reports state
the verified range.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .gradedlin import (GradedMap, GradedSpace, in_span, matrix_rank,
                        nullspace, scalar_from_str, scalar_to_str,
                        solve_canonical, vec_add, vec_scale)
from .linfty import (CheckReport, LInftyAlgebra, LInftyMorphism,
                     check_morphism, check_relations, compose, is_quasi_iso)

MAX_SIMPLEX_DIM = 4
MAX_WEIGHT_CAP = 8


class SimplexCapError(Exception):
    pass


# ---------------------------------------------------------------------------
# polynomial forms; a form is a dict {(exps, dts): Fraction}


def mono_weight(key):
    exps, dts = key
    return sum(exps) + len(dts)


def mono_degree(key):
    return len(key[1])


def simplex_forms(n, weight_cap):
    """All monomial-form basis keys on the n-simplex with weight up to
    the cap, in a fixed deterministic order."""
    if n > MAX_SIMPLEX_DIM or weight_cap > MAX_WEIGHT_CAP:
        raise SimplexCapError("simplex dimension or weight cap exceeded")
    keys = []
    for r in range(0, n + 1):
        for dts in itertools.combinations(range(1, n + 1), r):
            maxdeg = weight_cap - r
            for exps in itertools.product(range(maxdeg + 1), repeat=n):
                if sum(exps) <= maxdeg:
                    keys.append((tuple(exps), tuple(dts)))
    keys.sort(key=lambda k: (mono_weight(k), k[1], k[0]))
    return keys


def form_add(f, g):
    out = dict(f)
    for k, c in g.items():
        out[k] = out.get(k, Fraction(0)) + c
        if out[k] == 0:
            del out[k]
    return out


def form_scale(c, f):
    c = Fraction(c)
    return {} if c == 0 else {k: c * v for k, v in f.items()}


def d_form(n, form):
    out = {}
    for (exps, dts), c in form.items():
        for m in range(1, n + 1):
            e = exps[m - 1]
            if e == 0 or m in dts:
                continue
            new_exps = tuple(x - 1 if i == m - 1 else x
                             for i, x in enumerate(exps))
            below = sum(1 for i in dts if i < m)
            new_dts = tuple(sorted(dts + (m,)))
            sgn = (-1) ** below
            out = form_add(out, {(new_exps, new_dts): sgn * e * c})
    return out


def wedge(n, f, g):
    out = {}
    for (e1, d1), c1 in f.items():
        for (e2, d2), c2 in g.items():
            if set(d1) & set(d2):
                continue
            seq = list(d1) + list(d2)
            inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq))
                      if seq[i] > seq[j])
            key = (tuple(a + b for a, b in zip(e1, e2)), tuple(sorted(seq)))
            out = form_add(out, {key: (-1) ** inv * c1 * c2})
    return out


def face_vertices(n, i):
    return tuple(v for v in range(n + 1) if v != i)


def _face_images(n, i):
    """Images of t_1..t_n (as 0-forms on the (n-1)-simplex) under the
    affine inclusion of the face opposite vertex i."""
    m = n - 1
    J = face_vertices(n, i)
    zero_exps = tuple([0] * m)
    images = []
    for coord in range(1, n + 1):
        if coord == i:
            images.append({})
            continue
        j = J.index(coord)
        if j == 0:
            img = {(zero_exps, ()): Fraction(1)}
            for l in range(1, m + 1):
                e = tuple(1 if x == l - 1 else 0 for x in range(m))
                img[(e, ())] = Fraction(-1)
            images.append(img)
        else:
            e = tuple(1 if x == j - 1 else 0 for x in range(m))
            images.append({(e, ()): Fraction(1)})
    return images


def face_restrict(n, i, form, weight_cap=None):
    """Pull a form on the n-simplex back to the face opposite vertex i
    (an (n-1)-simplex), substituting the affine face coordinates."""
    m = n - 1
    images = _face_images(n, i)
    out = {}
    unit = {(tuple([0] * m), ()): Fraction(1)}
    for (exps, dts), c in form.items():
        val = form_scale(c, unit)
        for coord in range(1, n + 1):
            for _ in range(exps[coord - 1]):
                val = wedge(m, val, images[coord - 1])
        for coord in dts:
            val = wedge(m, val, d_form(m, images[coord - 1]))
        out = form_add(out, val)
    if weight_cap is not None:
        out = {k: v for k, v in out.items() if mono_weight(k) <= weight_cap}
    return out


def form_to_json(form):
    return {"monomials": [{"poly": [list(exps), scalar_to_str(c)],
                           "dts": list(dts)}
                          for (exps, dts), c in sorted(form.items())]}


def form_from_json(doc):
    out = {}
    for m in doc["monomials"]:
        key = (tuple(m["poly"][0]), tuple(m["dts"]))
        out[key] = out.get(key, Fraction(0)) + scalar_from_str(m["poly"][1])
    return {k: v for k, v in out.items() if v}


def mono_label(key):
    exps, dts = key
    poly = ".".join("t%d^%d" % (i + 1, e) for i, e in enumerate(exps) if e)
    dt = ".".join("dt%d" % i for i in dts)
    parts = [p for p in (poly, dt) if p]
    return ".".join(parts) if parts else "1"


def forms_cohomology(n, weight_cap):
    """Cohomology of the truncated form complex by exact rank, degree
    by degree (d preserves weight, so the truncation is d-stable)."""
    from .gradedlin import cohomology
    keys = simplex_forms(n, weight_cap)
    gens = [(mono_label(k), mono_degree(k)) for k in keys]
    space = GradedSpace(gens)
    entries = {}
    for k in keys:
        img = d_form(n, {k: Fraction(1)})
        for k2, c in img.items():
            entries[(mono_label(k), mono_label(k2))] = c
    d = GradedMap(space, space, 1, entries)
    return cohomology(d)


# ---------------------------------------------------------------------------
# the tensor model


class SimplexModel:
    """Weight-truncated tensor model of (n-simplex) x C for a strict
    base algebra C."""

    def __init__(self, base: LInftyAlgebra, n, weight_cap=6):
        if not base.is_strict:
            raise ValueError("tensor model requires a strict base algebra")
        if n > MAX_SIMPLEX_DIM or weight_cap > MAX_WEIGHT_CAP:
            raise SimplexCapError("simplex dimension or weight cap exceeded")
        self.base = base
        self.n = n
        self.weight_cap = weight_cap
        self.keys = simplex_forms(n, weight_cap)
        self.labels = {}
        gens = []
        weights = {}
        for k in self.keys:
            for x in base.space.labels:
                lab = mono_label(k) + "|" + x
                self.labels[lab] = (k, x)
                gens.append((lab, mono_degree(k) + base.space.deg[x]))
                weights[lab] = mono_weight(k)
        self.space = GradedSpace(gens)
        self.algebra = LInftyAlgebra(
            self.space, self._build_ops(), arity_cap=base.arity_cap,
            weights=weights)
        self._face_model = None

    def _tensor_element(self, form, elem):
        out = {}
        for k, c in form.items():
            if mono_weight(k) > self.weight_cap:
                continue
            for x, cx in elem.items():
                lab = mono_label(k) + "|" + x
                out[lab] = out.get(lab, Fraction(0)) + c * cx
        return {l: c for l, c in out.items() if c}

    def _build_ops(self):
        from .gradedlin import sym_words
        base = self.base
        n = self.n
        ops = {}
        # arity 1
        tab1 = {}
        for lab, (k, x) in self.labels.items():
            val = self._tensor_element(d_form(n, {k: Fraction(1)}),
                                       {x: Fraction(1)})
            sgn = (-1) ** mono_degree(k)
            val = vec_add(val, vec_scale(
                sgn, self._tensor_element({k: Fraction(1)},
                                          base.op_word(1, (x,)))))
            if val:
                tab1[(lab,)] = val
        if tab1:
            ops[1] = tab1
        # arity >= 2 on canonical words
        for arity in range(2, base.arity_cap + 1):
            if arity not in base.ops:
                continue
            tab = {}
            for word in sym_words(self.space, arity):
                pairs = [self.labels[l] for l in word]
                if sum(mono_weight(k) for k, _ in pairs) > self.weight_cap:
                    continue
                base_out = base.op_word(arity, tuple(x for _, x in pairs))
                if not base_out:
                    continue
                alpha = {pairs[0][0]: Fraction(1)}
                for k, _ in pairs[1:]:
                    alpha = wedge(n, alpha, {k: Fraction(1)})
                if not alpha:
                    continue
                adeg = [mono_degree(k) for k, _ in pairs]
                xdeg = [base.space.deg[x] for _, x in pairs]
                sgn_exp = sum(xdeg[i] * sum(adeg[i + 1:])
                              for i in range(arity - 1)) + sum(adeg)
                val = vec_scale((-1) ** sgn_exp,
                                self._tensor_element(alpha, base_out))
                if val:
                    tab[word] = val
            if tab:
                ops[arity] = tab
        return ops

    def face_model(self):
        """The model on a codimension-1 face (shared by every face)."""
        if self.n == 1:
            return None  # faces are the base algebra itself
        if self._face_model is None:
            self._face_model = SimplexModel(self.base, self.n - 1,
                                            self.weight_cap)
        return self._face_model

    def eval_face(self, i) -> LInftyMorphism:
        """Evaluation onto the face opposite vertex i: restriction
        tensor identity in the linear component, zero above."""
        tgt_model = self.face_model()
        entries = {}
        for lab, (k, x) in self.labels.items():
            restr = face_restrict(self.n, i, {k: Fraction(1)},
                                  weight_cap=self.weight_cap)
            if not restr:
                continue
            if tgt_model is None:
                # target is the base algebra; only 0-forms survive
                zero_key = ((), ())
                c = restr.get(zero_key, Fraction(0))
                if c:
                    entries[(lab,)] = {x: c}
            else:
                val = tgt_model._tensor_element(restr, {x: Fraction(1)})
                if val:
                    entries[(lab,)] = val
        target = self.base if tgt_model is None else tgt_model.algebra
        return LInftyMorphism(self.algebra, target, {1: entries},
                              arity_cap=self.base.arity_cap)

    def eval_vertex(self, j) -> LInftyMorphism:
        """For n = 1: evaluation at endpoint j (restriction to the face
        opposite the other vertex)."""
        if self.n != 1:
            raise ValueError("eval_vertex applies to interval models")
        return self.eval_face(1 - j)

    def incl_map(self) -> GradedMap:
        """The chain map x -> 1 (x) x."""
        unit = (tuple([0] * self.n), ())
        entries = {}
        for x in self.base.space.labels:
            entries[(x, mono_label(unit) + "|" + x)] = Fraction(1)
        return GradedMap(self.base.space, self.space, 0, entries)

    def incl_morphism(self) -> LInftyMorphism:
        """The inclusion packaged with zero higher components.  For the
        tensor model this is in fact a full morphism (wedging constant
        functions creates no signs)."""
        m = self.incl_map()
        comps = {1: {(x,): m.apply_gen(x) for x in self.base.space.labels}}
        return LInftyMorphism(self.base, self.algebra, comps,
                              arity_cap=self.base.arity_cap)


def build_model(C: LInftyAlgebra, n, weight_cap=6) -> SimplexModel:
    return SimplexModel(C, n, weight_cap)


# ---------------------------------------------------------------------------
# linear-algebra helpers on labeled spaces


def _basis(space, d):
    return space.basis_in_degree(d)


def _columns(images, src_labels, tgt_labels):
    """Matrix (rows = targets) of a label-to-element map."""
    idx = {l: i for i, l in enumerate(tgt_labels)}
    mat = [[Fraction(0)] * len(src_labels) for _ in tgt_labels]
    for j, s in enumerate(src_labels):
        for t, c in images.get(s, {}).items():
            if t in idx:
                mat[idx[t]][j] = c
    return mat


def _f1_images(f: LInftyMorphism):
    return {w[0]: out for w, out in f.comps.get(1, {}).items()}


# ---------------------------------------------------------------------------
# model axiom verification


def verify_model_axioms(model: SimplexModel, weight_check=None,
                        op_weight=None):
    """Check the defining axioms of a model of (n-simplex) x C at the
    implemented scale (n <= 2).  Exactness of the face complex is
    verified for elements of total weight <= weight_check; relation and
    morphism checks run on words of total weight <= op_weight."""
    if model.n > 2:
        raise SimplexCapError("full axiom verification capped at n = 2")
    cap = model.weight_cap
    if weight_check is None:
        weight_check = max(0, cap - 2)
    if op_weight is None:
        op_weight = cap
    notes = ["exactness weights <= %d, operation words <= %d "
             "(construction cap %d)" % (weight_check, op_weight, cap)]
    failures = []

    def record(name, ok, witness=None):
        if not ok:
            failures.append(((name,), witness or {}))

    rep = check_relations(model.algebra, weight_cap=op_weight)
    record("model-relations", rep.ok, rep.failures[0][1] if rep.failures
           else None)

    if model.n == 1:
        evs = [model.eval_vertex(0), model.eval_vertex(1)]
        incl = model.incl_map()
        # morphism property and quasi-isomorphism of evaluations
        for j, ev in enumerate(evs):
            record("eval%d-morphism" % j,
                   check_morphism(ev, weight_cap=op_weight).ok)
            record("eval%d-quasi-iso" % j, is_quasi_iso(ev)[0])
        # inclusion is a chain map and quasi-isomorphism
        record("incl-chain-map", _is_chain_map(incl, model.base,
                                               model.algebra))
        inc_m = LInftyMorphism(model.base, model.algebra,
                               {1: {(x,): incl.apply_gen(x)
                                    for x in model.base.space.labels}})
        record("incl-quasi-iso", is_quasi_iso(inc_m)[0])
        # (eval_j)_1 after incl is the identity
        for j, ev in enumerate(evs):
            comp = ev.f1_map().compose(incl)
            ident = GradedMap.identity(model.base.space)
            record("eval%d-incl-identity" % j,
                   comp.add(ident.scale(Fraction(-1))).is_zero())
        # surjectivity of the joint evaluation, degree by degree
        record("joint-eval-surjective", _joint_surjective(model, evs))
    else:
        face = model.face_model()
        record("face-axioms",
               verify_model_axioms(face, weight_check, op_weight).ok)
        evs = {i: model.eval_face(i) for i in range(model.n + 1)}
        for i, ev in evs.items():
            record("eval-face%d-morphism" % i,
                   check_morphism(ev, weight_cap=op_weight).ok)
            record("eval-face%d-quasi-iso" % i, is_quasi_iso(ev)[0])
        incl = model.incl_map()
        record("incl-chain-map", _is_chain_map(incl, model.base,
                                               model.algebra))
        inc_m = LInftyMorphism(model.base, model.algebra,
                               {1: {(x,): incl.apply_gen(x)
                                    for x in model.base.space.labels}})
        record("incl-quasi-iso", is_quasi_iso(inc_m)[0])
        # compatibility: evaluating to a face then to a vertex agrees
        record("face-compatibility", _face_compat(model, evs))
        # (eval_J)_1 of the inclusion equals the face inclusion
        face_incl = face.incl_map()
        for i, ev in evs.items():
            comp = ev.f1_map().compose(incl)
            record("eval-face%d-incl" % i,
                   comp.add(face_incl.scale(Fraction(-1))).is_zero())
        # axiom (v): kernel of the lower boundary equals the image of
        # the top boundary, on elements of weight <= weight_check
        ok_v, wit = _exactness(model, evs, weight_check)
        record("face-complex-exact", ok_v, wit)

    return CheckReport("model-axioms", failures,
                       checked=len(failures) + 1, notes=notes)


def _is_chain_map(m: GradedMap, src_alg, tgt_alg):
    from .linfty import l1_map
    d1 = l1_map(src_alg)
    d2 = l1_map(tgt_alg)
    return m.compose(d1).add(d2.compose(m).scale(Fraction(-1))).is_zero()


def _joint_surjective(model, evs):
    C = model.base.space
    for d in C.degrees():
        tgt = C.basis_in_degree(d)
        if not tgt:
            continue
        src = model.space.basis_in_degree(d)
        cols = []
        for s in src:
            col = []
            for ev in evs:
                img = ev.comp_word(1, (s,))
                col.extend(img.get(t, Fraction(0)) for t in tgt)
            cols.append(col)
        mat = [[cols[j][r] for j in range(len(cols))]
               for r in range(2 * len(tgt))]
        if matrix_rank(mat) < 2 * len(tgt):
            return False
    return True


def _face_compat(model, evs):
    """First components of evaluating via either adjacent face agree."""
    face = model.face_model()
    n = model.n
    for i1, i2 in itertools.combinations(range(n + 1), 2):
        J1 = face_vertices(n, i1)
        J2 = face_vertices(n, i2)
        shared = tuple(sorted(set(J1) & set(J2)))
        # the removed position inside each face
        r1 = J1.index([v for v in J1 if v not in shared][0])
        r2 = J2.index([v for v in J2 if v not in shared][0])
        e1 = face.eval_face(r1)
        e2 = face.eval_face(r2)
        m1 = e1.f1_map().compose(evs[i1].f1_map())
        m2 = e2.f1_map().compose(evs[i2].f1_map())
        if not m1.add(m2.scale(Fraction(-1))).is_zero():
            return False
    return True


def _exactness(model, evs, weight_check):
    """ker(lower boundary) = im(top boundary) for n = 2, checked on
    kernel elements supported in weight <= weight_check."""
    n = model.n
    face = model.face_model()
    edge_space = face.space
    edge_weights = face.algebra.weights
    faces = list(range(n + 1))
    # lower boundary: edge J = {a,b} maps to vertex a with +, b with -
    base = model.base.space
    for d in sorted(set(model.space.degrees())
                    | set(edge_space.degrees()) | set(base.degrees())):
        edge_basis = []
        for i in faces:
            for l in edge_space.basis_in_degree(d):
                edge_basis.append((i, l))
        if not edge_basis:
            continue
        # matrix of the signed vertex boundary
        vert_basis = [(v, l) for v in range(n + 1)
                      for l in base.basis_in_degree(d)]
        vidx = {b: r for r, b in enumerate(vert_basis)}
        rows1 = [[Fraction(0)] * len(edge_basis) for _ in vert_basis]
        for cidx, (i, l) in enumerate(edge_basis):
            a, b = face_vertices(n, i)
            for sgn, vert, face_pos in ((1, a, 0), (-1, b, 1)):
                ev = face.eval_vertex(face_pos)
                img = ev.comp_word(1, (l,))
                for t, c in img.items():
                    r = vidx.get((vert, t))
                    if r is not None:
                        rows1[r][cidx] += sgn * c
        # matrix of the top boundary
        src = model.space.basis_in_degree(d)
        eidx = {b: r for r, b in enumerate(edge_basis)}
        rows2 = [[Fraction(0)] * len(src) for _ in edge_basis]
        for cidx, s in enumerate(src):
            for i in faces:
                # unshuffle sign of (J_i, {i}) inside {0..n}
                sgn = (-1) ** (n - i)
                img = evs[i].comp_word(1, (s,))
                for t, c in img.items():
                    r = eidx.get((i, t))
                    if r is not None:
                        rows2[r][cidx] += sgn * c
        # boundary of boundary vanishes
        for col in range(len(src)):
            v = [rows2[r][col] for r in range(len(edge_basis))]
            w = [sum(rows1[r][c] * v[c] for c in range(len(v)))
                 for r in range(len(vert_basis))]
            if any(x != 0 for x in w):
                return False, {"reason": "boundary squared nonzero"}
        # kernel of the lower boundary within the weight window
        keep = [c for c, (i, l) in enumerate(edge_basis)
                if edge_weights[l] <= weight_check]
        sub = [[rows1[r][c] for c in keep] for r in range(len(vert_basis))]
        if not keep:
            continue
        img_cols = [[rows2[r][c] for r in range(len(edge_basis))]
                    for c in range(len(src))]
        for kv in nullspace(sub, ncols=len(keep)):
            full = [Fraction(0)] * len(edge_basis)
            for pos, c in zip(keep, kv):
                full[pos] = c
            if not in_span(img_cols, full):
                return False, {"degree": d}
    return True, None


# ---------------------------------------------------------------------------
# homotopies


class Homotopy:
    """A morphism into an interval model together with its endpoint
    data.  eval0/eval1 are morphisms out of the model, incl the chain
    map into it."""

    def __init__(self, h, eval0, eval1, incl, f0, f1):
        self.h = h
        self.eval0 = eval0
        self.eval1 = eval1
        self.incl = incl
        self.f0 = f0
        self.f1 = f1

    def endpoints_match(self):
        e0 = compose(self.eval0, self.h)
        e1 = compose(self.eval1, self.h)
        return e0.comps == self.f0.comps and e1.comps == self.f1.comps


def is_homotopy(h: Homotopy):
    return h.endpoints_match()


def constant_homotopy(f: LInftyMorphism, weight_cap=4) -> Homotopy:
    """The homotopy from f to f through the interval tensor model:
    compose f with the (full) inclusion morphism."""
    model = SimplexModel(f.target, 1, weight_cap)
    h = compose(model.incl_morphism(), f)
    return Homotopy(h, model.eval_vertex(0), model.eval_vertex(1),
                    model.incl_map(), f, f)


class SubspaceAlgebra:
    """An algebra structure induced on a spanned subspace of an ambient
    algebra, with operations stored through exact coordinate solves.
    Vectors must be degree-homogeneous.  Operations whose output fails
    to lie in the span raise unless the offending word exceeds the
    weight window (then the entry is dropped; checks are filtered)."""

    def __init__(self, ambient: LInftyAlgebra, vectors, prefix="s",
                 weights=None, weight_window=None):
        from .gradedlin import sym_words
        self.ambient = ambient
        self.vectors = list(vectors)
        amb = ambient.space
        gens = []
        for idx, v in enumerate(self.vectors):
            degs = {amb.deg[l] for l in v}
            if len(degs) != 1:
                raise ValueError("subspace vector not homogeneous")
            gens.append(("%s%d" % (prefix, idx), degs.pop()))
        self.space = GradedSpace(gens)
        self.weights = weights
        self.weight_window = weight_window
        ops = {}
        for k in range(1, ambient.arity_cap + 1):
            if k not in ambient.ops and k != 1:
                continue
            tab = {}
            for word in sym_words(self.space, k):
                if weight_window is not None and weights is not None:
                    if sum(weights[l] for l in word) > weight_window:
                        continue
                elems = [self.vectors[self.space.index[l]] for l in word]
                out = ambient.op_elems(k, elems)
                if not out:
                    continue
                coords = self._coords(out)
                if coords is None:
                    raise ValueError(
                        "subspace not closed under operations at %r" %
                        (word,))
                if coords:
                    tab[word] = coords
            if tab:
                ops[k] = tab
        self.algebra = LInftyAlgebra(self.space, ops,
                                     arity_cap=ambient.arity_cap,
                                     weights=weights)

    def _coords(self, elem):
        deg = {self.ambient.space.deg[l] for l in elem}
        if not deg:
            return {}
        d = deg.pop()
        cols = [i for i, v in enumerate(self.vectors)
                if self.space.deg[self.space.labels[i]] == d]
        amb_basis = self.ambient.space.basis_in_degree(d)
        mat = [[self.vectors[c].get(b, Fraction(0)) for c in cols]
               for b in amb_basis]
        rhs = [elem.get(b, Fraction(0)) for b in amb_basis]
        x = solve_canonical(mat, rhs, ncols=len(cols))
        if x is None:
            return None
        out = {}
        for c, xi in zip(cols, x):
            if xi != 0:
                out[self.space.labels[c]] = xi
        return out

    def include_morphism(self) -> LInftyMorphism:
        comps = {1: {(l,): dict(self.vectors[self.space.index[l]])
                     for l in self.space.labels}}
        return LInftyMorphism(self.algebra, self.ambient, comps)


def concat_homotopies(h1: Homotopy, h2: Homotopy, weight_cap=4) -> Homotopy:
    """Glue a homotopy f0 => f1 and a homotopy f1 => f2 through the
    fiber product of the two interval models (pairs whose seam
    evaluations agree), with componentwise operations."""
    if h1.f1.comps != h2.f0.comps:
        raise ValueError("seam morphisms disagree")
    from .linfty import direct_sum, _tag
    M1 = h1.eval0.source
    M2 = h2.eval0.source
    D = direct_sum(M1, M2)
    # seam constraint per degree: eval1 of the first leg equals eval0
    # of the second
    e1 = _f1_images(h1.eval1)
    e0 = _f1_images(h2.eval0)
    Cp = h1.eval0.target.space
    vectors = []
    for d in sorted(set(M1.space.degrees()) | set(M2.space.degrees())):
        b1 = M1.space.basis_in_degree(d)
        b2 = M2.space.basis_in_degree(d)
        tgt = Cp.basis_in_degree(d)
        cols = []
        for l in b1:
            img = e1.get(l, {})
            cols.append([img.get(t, Fraction(0)) for t in tgt])
        for l in b2:
            img = e0.get(l, {})
            cols.append([-img.get(t, Fraction(0)) for t in tgt])
        mat = [[cols[j][r] for j in range(len(cols))]
               for r in range(len(tgt))]
        for kv in nullspace(mat, ncols=len(b1) + len(b2)):
            vec = {}
            for i, l in enumerate(b1):
                if kv[i]:
                    vec[_tag(l, "0")] = kv[i]
            for i, l in enumerate(b2):
                if kv[len(b1) + i]:
                    vec[_tag(l, "1")] = kv[len(b1) + i]
            if vec:
                vectors.append(vec)
    w1 = M1.weights or {}
    w2 = M2.weights or {}
    dweights = {}
    for i, v in enumerate(vectors):
        dweights["p%d" % i] = max(
            [w1.get(l[:-2], 0) if l.endswith("@0") else w2.get(l[:-2], 0)
             for l in v], default=0)
    sub = SubspaceAlgebra(D, vectors, prefix="p", weights=dweights,
                          weight_window=weight_cap)
    # morphism into the glued model
    C0 = h1.h.source
    comps = {}
    for k in set(h1.h.comps) | set(h2.h.comps):
        tab = {}
        words = set(h1.h.comps.get(k, {})) | set(h2.h.comps.get(k, {}))
        for w in words:
            pair = {}
            for l, c in h1.h.comp_word(k, w).items():
                pair[_tag(l, "0")] = c
            for l, c in h2.h.comp_word(k, w).items():
                pair[_tag(l, "1")] = c
            coords = sub._coords(pair)
            if coords is None:
                raise ValueError("homotopy pair leaves the fiber product")
            if coords:
                tab[w] = coords
        if tab:
            comps[k] = tab
    h = LInftyMorphism(C0, sub.algebra, comps)
    # evaluations out of the glued model
    inc = sub.include_morphism()

    def _project(mor, side):
        entries = {}
        for l in sub.space.labels:
            amb = inc.comp_word(1, (l,))
            part = {}
            for al, c in amb.items():
                if al.endswith("@" + side):
                    part[al[:-2]] = c
            img = mor.comp_elems(1, [part])
            if img:
                entries[(l,)] = img
        return LInftyMorphism(sub.algebra, mor.target, {1: entries})

    ev0 = _project(h1.eval0, "0")
    ev1 = _project(h2.eval1, "1")
    # inclusion chain map x -> (incl x, incl x)
    incl_entries = {}
    for x in Cp.labels:
        pair = {}
        for l, c in h1.incl.apply_gen(x).items():
            pair[_tag(l, "0")] = c
        for l, c in h2.incl.apply_gen(x).items():
            pair[_tag(l, "1")] = c
        coords = sub._coords(pair)
        if coords is None:
            raise ValueError("inclusion leaves the fiber product")
        for t, c in coords.items():
            incl_entries[(x, t)] = c
    incl = GradedMap(Cp, sub.space, 0, incl_entries)
    return Homotopy(h, ev0, ev1, incl, h1.f0, h2.f1)
