"""Homotopy-theoretic constructions on top of the algebra engine.

Three machines live here:

- fill_n_homotopy: given n+2 quasi-isomorphisms into the same target
  (and, for n = 2, compatible edge homotopies), build a finite model of
  the (n+1)-simplex times the target as a mapping-cylinder algebra and
  a filling homotopy whose evaluations restrict to the given data.
- whitehead_inverse: invert a quasi-isomorphism up to homotopy, arity
  by arity, returning a certificate with the inverse, the homotopy and
  the interval model it lives in.
- model_morphism_over: extend a morphism of the underlying algebras to
  a morphism of interval models compatible with evaluations and the
  inclusion of constants.

Every "there exists" in the constructions is realized as a canonical
exact linear solve (free variables zero in reduced echelon form), so
outputs are reproducible and every claimed identity can be re-checked
coefficient by coefficient.  When a required solve has no solution the
functions raise FillError instead of returning partial data; for the
cylinder constructions this happens precisely when the boundary kernel
complex admits no contracting homotopy (e.g. a non-acyclic target for
the interval cylinder).
"""

from __future__ import annotations

import contextlib
import random
from fractions import Fraction

from .gradedlin import (GradedMap, GradedSpace, canonical_word, nullspace,
                        scalar_to_str, solve_canonical, solve_sparse,
                        split_sign, sym_words, unshuffles, vec_add, vec_scale,
                        word_degree)
from .linfty import (CheckReport, LInftyAlgebra, LInftyMorphism,
                     check_morphism, check_relations, compose, is_quasi_iso,
                     obstruction_cocycle, partition_terms)


class FillError(RuntimeError):
    """A linear stage of a homotopy construction is unsolvable."""


# ---------------------------------------------------------------------------
# labeled sparse linear systems


_TIE_BREAK = 0


@contextlib.contextmanager
def tie_break(seed):
    """Temporarily select an alternative echelon tie-break.

    With a nonzero seed, every linear system built inside the context
    permutes its unknown order by a seeded shuffle before solving, so
    a different canonical solution is chosen whenever the solution
    space has free variables.  All solutions are exact solutions of
    the same systems; constructions differ but remain valid, which
    audits that verification does not depend on the chosen solution."""
    global _TIE_BREAK
    prev = _TIE_BREAK
    _TIE_BREAK = seed
    try:
        yield
    finally:
        _TIE_BREAK = prev


class LinearSystem:
    """Sparse linear system with hashable unknown keys.  Unknowns must
    be registered up front (registration order fixes the canonical
    solution's free-variable tie-break; see tie_break for auditing
    alternative choices)."""

    def __init__(self):
        self.unknowns = []
        self.index = {}
        self.rows = []
        self.rhs = []
        self.tie_break = _TIE_BREAK

    def var(self, key):
        if key not in self.index:
            self.index[key] = len(self.unknowns)
            self.unknowns.append(key)
        return self.index[key]

    def equation(self, coeffs, rhs=Fraction(0)):
        row = {}
        for key, c in coeffs.items():
            if c == 0:
                continue
            j = self.index[key]
            row[j] = row.get(j, Fraction(0)) + Fraction(c)
        self.rows.append({j: c for j, c in row.items() if c != 0})
        self.rhs.append(Fraction(rhs))

    def solve(self):
        n = len(self.unknowns)
        if self.tie_break:
            pos = list(range(n))
            random.Random(self.tie_break).shuffle(pos)
            rows = [{pos[j]: c for j, c in row.items()}
                    for row in self.rows]
            y = solve_sparse(rows, self.rhs, n)
            if y is None:
                return None
            x = [y[pos[j]] for j in range(n)]
        else:
            x = solve_sparse(self.rows, self.rhs, n)
            if x is None:
                return None
        return {k: v for k, v in zip(self.unknowns, x) if v != 0}


def _acc(d, key, c):
    if c:
        d[key] = d.get(key, Fraction(0)) + c


def _register_map_unknowns(sys, src_space, tgt_space, m, prefix, shift=0):
    for w in sym_words(src_space, m):
        d = word_degree(src_space, w) + shift
        for b in tgt_space.basis_in_degree(d):
            sys.var((prefix, w, b))


def _add_delta1_equations(sys, A, B, m, prefix, rhs, shift=0, sign_tail=-1):
    """Rows encoding delta1(u) = rhs for an unknown map u on canonical
    arity-m words of A valued in B (degree `shift`).  sign_tail is -1
    for degree-0 unknowns (morphism components) and +1 for degree-1
    unknowns (operations)."""
    for w in sym_words(A.space, m):
        d = word_degree(A.space, w) + shift
        by_target = {}
        for b in B.space.basis_in_degree(d):
            for b2, c in B.op_word(1, (b,)).items():
                _acc(by_target.setdefault(b2, {}), (prefix, w, b), c)
        for b1, b2blk in unshuffles(1, m):
            sgn = split_sign(A.space, w, b1, b2blk)
            inner = A.op_word(1, (w[b1[0]],))
            rest = tuple(w[p] for p in b2blk)
            for h, c in inner.items():
                cw, s2 = canonical_word(A.space, (h,) + rest)
                if cw is None:
                    continue
                dd = word_degree(A.space, cw) + shift
                for b in B.space.basis_in_degree(dd):
                    _acc(by_target.setdefault(b, {}), (prefix, cw, b),
                         sign_tail * sgn * s2 * c)
        for b2 in B.space.basis_in_degree(d + 1):
            sys.equation(by_target.get(b2, {}),
                         rhs.get(w, {}).get(b2, Fraction(0)))


def _expand_linear(f1, word, space):
    """Expand (f1 a_1, ..., f1 a_k) into canonical target words with
    coefficients, for a degree-0 generator-to-element table f1."""
    prods = [((), Fraction(1))]
    for a in word:
        prods = [(w + (b,), c * cb) for w, c in prods
                 for b, cb in f1.get(a, {}).items()]
    out = {}
    for w, c in prods:
        if c == 0:
            continue
        cw, s2 = canonical_word(space, w)
        if cw is None:
            continue
        _acc(out, cw, c * s2)
    return out


def _comps_equal(a, b, cap):
    """Componentwise equality of two morphisms up to an arity cap,
    ignoring empty tables."""
    na = {k: t for k, t in a.comps.items() if t and k <= cap}
    nb = {k: t for k, t in b.comps.items() if t and k <= cap}
    return na == nb


def _solution_table(sol, prefix):
    """Collect {(prefix, word, target): coeff} into {word: element}."""
    table = {}
    for key, c in sol.items():
        if key[0] != prefix:
            continue
        _, w, b = key
        table.setdefault(w, {})[b] = c
    return table


# ---------------------------------------------------------------------------
# interval-model adapters


class IntervalModel:
    """Uniform view of a model of the interval times an algebra:
    the model algebra, the two vertex evaluations, and the inclusion of
    constants as a chain map."""

    def __init__(self, algebra, ev0, ev1, incl):
        self.algebra = algebra
        self.ev0 = ev0
        self.ev1 = ev1
        self.incl = incl

    @property
    def base(self):
        return self.ev0.target


def as_interval_model(obj):
    if isinstance(obj, IntervalModel):
        return obj
    if isinstance(obj, FillingModel):
        if obj.n != 1:
            raise ValueError("interval model expected, got n = %d" % obj.n)
        return IntervalModel(obj.algebra, obj.evals[(0,)], obj.evals[(1,)],
                             obj.incl)
    # duck-typed tensor models (simplexmodel.SimplexModel)
    if hasattr(obj, "eval_vertex") and hasattr(obj, "incl_map"):
        if getattr(obj, "n", None) != 1:
            raise ValueError("interval model expected")
        return IntervalModel(obj.algebra, obj.eval_vertex(0),
                             obj.eval_vertex(1), obj.incl_map())
    raise TypeError("cannot view %r as an interval model" % (obj,))


# ---------------------------------------------------------------------------
# the cylinder filling construction


def _jtag(J):
    return "e" + "".join(str(v) for v in J)


def _edge_sign(J, n):
    """Extra sign carried by the face J in the top boundary map,
    determined by the unshuffle sign of splitting off the missing
    vertex; makes the boundary of a boundary vanish."""
    missing = [v for v in range(n + 1) if v not in J]
    return (-1) ** (n - missing[0])


class FillingModel:
    """A model of the n-simplex times an algebra built as a mapping
    cylinder over the kernel of the boundary map of its faces, together
    with the filling homotopy of the given quasi-isomorphisms.

    Fields: algebra (the cylinder), n, K (arity of the constructed
    structure), C (modeled target algebra), C0 (homotopy source), fs
    (vertex morphisms), evals {face tuple: strict morphism to the face
    model}, boundary {face tuple: face model or None when the face
    model is the target algebra itself}, incl (chain inclusion of
    constants), hbar (the filling homotopy C0 -> cylinder)."""

    def __init__(self, algebra, n, K, C, C0, fs, evals, boundary, incl,
                 hbar, notes=None):
        self.algebra = algebra
        self.n = n
        self.K = K
        self.C = C
        self.C0 = C0
        self.fs = list(fs)
        self.evals = evals
        self.boundary = boundary
        self.incl = incl
        self.hbar = hbar
        self.notes = notes or []

    def face_keys(self):
        return sorted(self.evals)

    def eval_vertex(self, v):
        """Strict morphism cylinder -> C evaluating at a vertex."""
        if self.n == 1:
            return self.evals[(v,)]
        for J in self.face_keys():
            if v in J:
                edge = self.boundary[J]
                pos = J.index(v)
                return compose(edge.evals[(pos,)], self.evals[J])
        raise ValueError("no face contains vertex %d" % v)

    def incl_morphism(self):
        comps = {1: {(a,): self.incl.apply_gen(a)
                     for a in self.C.space.labels if self.incl.apply_gen(a)}}
        return LInftyMorphism(self.C, self.algebra, comps,
                              arity_cap=self.K)

    def verify(self):
        """Re-check every claimed identity: cylinder relations, all
        evaluation/inclusion/homotopy morphism relations, endpoint
        agreement, and quasi-isomorphism of the inclusion."""
        failures = []
        checked = 0

        def fold(rep, tag):
            nonlocal checked
            checked += rep.checked
            for w, r in rep.failures:
                failures.append(((tag,) + tuple(w), r))

        fold(check_relations(self.algebra, up_to=self.K), "relations")
        for J in self.face_keys():
            fold(check_morphism(self.evals[J], up_to=self.K),
                 "eval" + _jtag(J))
        fold(check_morphism(self.hbar, up_to=self.K), "hbar")
        fold(check_morphism(self.incl_morphism(), up_to=self.K), "incl")
        # evaluations compose with the inclusion to the face inclusions
        for J in self.face_keys():
            comp = self.evals[J].f1_map().compose(self.incl)
            face_incl = GradedMap.identity(self.C.space) if self.n == 1 \
                else self.boundary[J].incl
            checked += 1
            diff = comp.add(face_incl.scale(Fraction(-1)))
            if not diff.is_zero():
                failures.append((("eval-incl", _jtag(J)),
                                 {a: c for (a, _), c
                                  in sorted(diff.entries.items())[:3]}))
        # endpoints of the filling homotopy are the given morphisms
        for v in range(self.n + 1):
            ev = self.eval_vertex(v)
            got = compose(ev, self.hbar)
            want = self.fs[v]
            checked += 1
            if not _comps_equal(got, want, min(got.arity_cap, self.K)):
                failures.append((("endpoint", str(v)), {"mismatch": 1}))
        ok, _ = is_quasi_iso(self.incl_morphism())
        checked += 1
        if not ok:
            failures.append((("incl-quasi-iso",), {"fail": 1}))
        return CheckReport("filling-model", failures, checked,
                           notes=list(self.notes))

    def to_json(self):
        return {
            "n": self.n,
            "K": self.K,
            "dim": self.algebra.space.dim,
            "faces": ["".join(str(v) for v in J) for J in self.face_keys()],
            "hbar": self.hbar.to_json(),
            "notes": list(self.notes),
        }


def _family_for_fill(fs, boundary, K):
    """Face models, their vertex-evaluation chain maps and homotopy
    components for the cylinder construction."""
    n_out = len(fs) - 1
    C = fs[0].target
    C0 = fs[0].source
    if n_out == 1:
        faces = [(0,), (1,)]
        face_alg = {(0,): C, (1,): C}
        face_h = {(0,): fs[0], (1,): fs[1]}
        return faces, face_alg, face_h, {}
    faces = [(0, 1), (0, 2), (1, 2)]
    edges = {}
    for J in faces:
        if boundary and J in boundary:
            edges[J] = boundary[J]
        else:
            edges[J] = fill_n_homotopy([fs[J[0]], fs[J[1]]], K=K)
        edge = edges[J]
        if edge.n != 1:
            raise ValueError("boundary data for %r is not an interval"
                             % (J,))
        for pos in (0, 1):
            got = compose(edge.evals[(pos,)], edge.hbar)
            if not _comps_equal(got, fs[J[pos]], got.arity_cap):
                raise ValueError("edge homotopy %r does not end on the "
                                 "given vertex morphisms" % (J,))
    face_alg = {J: edges[J].algebra for J in faces}
    face_h = {J: edges[J].hbar for J in faces}
    return faces, face_alg, face_h, edges


def fill_n_homotopy(fs, boundary=None, K=2):
    """Fill a compatible boundary family of quasi-isomorphisms with an
    n-homotopy, n = len(fs) - 1 in {1, 2}.

    fs: morphisms C0 -> C (the vertex data), each a quasi-isomorphism.
    boundary: for n = 2, optional {edge tuple: interval FillingModel}
    whose homotopies end on the matching vertex morphisms; missing
    edges are filled recursively.
    K: arity up to which operations and homotopy components are built.

    Returns a FillingModel.  Raises FillError when a linear stage is
    unsolvable (in particular when the face kernel complex is not
    acyclic, so no contracting extension exists)."""
    n_out = len(fs) - 1
    if n_out not in (1, 2):
        raise ValueError("filling supports 2 or 3 vertex morphisms")
    C = fs[0].target
    C0 = fs[0].source
    for f in fs:
        if f.source is not C0 or f.target is not C:
            raise ValueError("vertex morphisms must share endpoints")
        ok, _ = is_quasi_iso(f)
        if not ok:
            raise ValueError("vertex morphisms must be quasi-isomorphisms")
    if not (C.is_strict and C0.is_strict):
        raise ValueError("filling requires strict algebras")
    if K + 1 > min(C.arity_cap, C0.arity_cap) + 1:
        raise ValueError("arity cap of the algebras is below K")

    faces, face_alg, face_h, edges = _family_for_fill(fs, boundary, K)

    # --- direct sum of the face models, with tagged labels
    sum_gens = []
    for J in faces:
        tag = _jtag(J)
        sp = face_alg[J].space
        sum_gens += [("%s:%s" % (tag, l), sp.deg[l]) for l in sp.labels]
    sum_space = GradedSpace(sum_gens)

    def tag_vec(J, vec):
        tag = _jtag(J)
        return {"%s:%s" % (tag, b): c for b, c in vec.items()}

    def untag_vec(J, vec):
        tag = _jtag(J) + ":"
        return {b[len(tag):]: c for b, c in vec.items()
                if b.startswith(tag)}

    # componentwise differential of the direct sum
    d_sum_entries = {}
    for J in faces:
        alg = face_alg[J]
        for l in alg.space.labels:
            for b, c in alg.op_word(1, (l,)).items():
                d_sum_entries[("%s:%s" % (_jtag(J), l),
                               "%s:%s" % (_jtag(J), b))] = c
    d_sum = GradedMap(sum_space, sum_space, 1, d_sum_entries)

    # --- signed boundary map to the vertex level (zero when n_out = 1)
    def boundary_rows(deg):
        """Rows of the boundary map on the degree-deg part of the sum,
        indexed by (vertex, target label)."""
        if n_out == 1:
            return [], []
        src = sum_space.basis_in_degree(deg)
        row_index = []
        rows = {}
        for J in faces:
            eps = _edge_sign(J, n_out)
            edge = edges[J]
            for pos, sgn in ((0, 1), (1, -1)):
                ev = edge.evals[(pos,)].f1_map()
                vtx = J[pos]
                for i, lab in enumerate(src):
                    part = untag_vec(J, {lab: Fraction(1)})
                    img = ev.apply(part)
                    for b, c in img.items():
                        key = (vtx, b)
                        rows.setdefault(key, {})[i] = \
                            rows.get(key, {}).get(i, Fraction(0)) \
                            + eps * sgn * c
        for key in sorted(rows):
            row_index.append(key)
        mat = []
        for key in row_index:
            mat.append([rows[key].get(i, Fraction(0))
                        for i in range(len(src))])
        return mat, src

    # --- kernel of the boundary, as labeled vectors in the sum
    kvecs = {}
    korder = []
    for deg in sum_space.degrees():
        mat, src = boundary_rows(deg)
        if n_out == 1:
            src = sum_space.basis_in_degree(deg)
            basis = []
            for j in range(len(src)):
                v = [Fraction(0)] * len(src)
                v[j] = Fraction(1)
                basis.append(v)
        else:
            basis = nullspace(mat, ncols=len(src)) if src else []
        for i, v in enumerate(basis):
            lab = "k%d_%d" % (deg, i)
            kvecs[lab] = ({b: c for b, c in zip(src, v) if c != 0}, deg)
            korder.append(lab)

    def ker_coords(vec, deg):
        """Coordinates of a sum vector in the kernel basis of its
        degree, or None when it is not in the kernel span."""
        labs = [k for k in korder if kvecs[k][1] == deg]
        amb = sum_space.basis_in_degree(deg)
        cols = [[kvecs[k][0].get(b, Fraction(0)) for b in amb]
                for k in labs]
        mat = [[cols[j][i] for j in range(len(labs))]
               for i in range(len(amb))]
        rhs = [vec.get(b, Fraction(0)) for b in amb]
        x = solve_canonical(mat, rhs, ncols=len(labs))
        if x is None:
            return None
        return {k: c for k, c in zip(labs, x) if c != 0}

    # differential restricted to the kernel, in kernel coordinates
    d_ker = {}
    for k in korder:
        vec, deg = kvecs[k]
        img = d_sum.apply(vec)
        coords = ker_coords(img, deg + 1)
        if coords is None:
            raise FillError("face differential does not preserve the "
                            "boundary kernel")
        d_ker[k] = coords

    # --- cylinder space and differential
    cyl_gens = [("x|" + k, kvecs[k][1]) for k in korder] \
        + [("y|" + k, kvecs[k][1] - 1) for k in korder] \
        + [("z|" + l, C0.space.deg[l]) for l in C0.space.labels]
    cyl_space = GradedSpace(cyl_gens)
    l1_tab = {}
    for k in korder:
        out = {"x|" + j: c for j, c in d_ker[k].items()}
        if out:
            l1_tab[("x|" + k,)] = out
        outy = {"x|" + k: Fraction(1)}
        for j, c in d_ker[k].items():
            _acc(outy, "y|" + j, -c)
        l1_tab[("y|" + k,)] = {b: c for b, c in outy.items() if c != 0}
    for l in C0.space.labels:
        img = C0.op_word(1, (l,))
        if img:
            l1_tab[("z|" + l,)] = {"z|" + b: c for b, c in img.items()}
    ops = {1: l1_tab} if l1_tab else {}
    cyl = LInftyAlgebra(cyl_space, ops, arity_cap=max(K, 1))

    # --- contracting extension: d A + A d = id on the kernel
    sysA = LinearSystem()
    for ki in korder:
        for kj in korder:
            if kvecs[kj][1] == kvecs[ki][1] - 1:
                sysA.var((ki, kj))
    for ki in korder:
        degi = kvecs[ki][1]
        for kt in korder:
            if kvecs[kt][1] != degi:
                continue
            coeffs = {}
            for kj in korder:
                if kvecs[kj][1] == degi - 1:
                    _acc(coeffs, (ki, kj), d_ker[kj].get(kt, Fraction(0)))
            for kj, c in d_ker[ki].items():
                if ((kj, kt)) in sysA.index:
                    _acc(coeffs, (kj, kt), c)
            sysA.equation(coeffs, Fraction(1) if kt == ki else Fraction(0))
    Asol = sysA.solve()
    if Asol is None:
        raise FillError("no contracting extension on the boundary kernel "
                        "(the kernel complex is not acyclic)")
    Amap = {}
    for (ki, kj), c in Asol.items():
        Amap.setdefault(ki, {})[kj] = c

    # --- evaluations, inclusion, and the linear homotopy component
    evals = {}
    for J in faces:
        tgt = face_alg[J]
        f1 = {}
        for k in korder:
            vec, deg = kvecs[k]
            f1["x|" + k] = untag_vec(J, vec)
            avec = {}
            for kj, c in Amap.get(k, {}).items():
                avec = vec_add(avec, vec_scale(c, kvecs[kj][0]))
            f1["y|" + k] = untag_vec(J, avec)
        comps = {1: {(a,): v for a, v in f1.items() if v}}
        evals[J] = LInftyMorphism(cyl, tgt, comps, arity_cap=K)

    incl_entries = {}
    for lab in C.space.labels:
        vec = {}
        for J in faces:
            if n_out == 1:
                part = {lab: Fraction(1)}
            else:
                part = edges[J].incl.apply_gen(lab)
            vec = vec_add(vec, tag_vec(J, part))
        coords = ker_coords(vec, C.space.deg[lab])
        if coords is None:
            raise FillError("inclusion of constants misses the boundary "
                            "kernel")
        for k, c in coords.items():
            incl_entries[(lab, "x|" + k)] = c
    incl = GradedMap(C.space, cyl_space, 0, incl_entries)

    def lift_to_ker(element_by_face, deg):
        vec = {}
        for J in faces:
            vec = vec_add(vec, tag_vec(J, element_by_face[J]))
        coords = ker_coords(vec, deg)
        if coords is None:
            raise FillError("boundary data is not compatible (misses the "
                            "kernel)")
        return {"x|" + k: c for k, c in coords.items()}

    hbar_comps = {1: {}}
    for lab in C0.space.labels:
        val = lift_to_ker({J: face_h[J].comp_word(1, (lab,))
                           for J in faces}, C0.space.deg[lab])
        val = vec_add(val, {"z|" + lab: Fraction(1)})
        hbar_comps[1][(lab,)] = val
    hbar = LInftyMorphism(C0, cyl, hbar_comps, arity_cap=K)

    # --- higher structure, arity by arity
    for m in range(2, K + 1):
        # homotopy component first: lift the face components to the
        # kernel (compatibility of the boundary data makes this solvable)
        new_h = {}
        for w in sym_words(C0.space, m):
            val = lift_to_ker({J: face_h[J].comp_word(m, w)
                               for J in faces}, word_degree(C0.space, w))
            if val:
                new_h[w] = val
        hcomps = {k: dict(t) for k, t in hbar.comps.items()}
        if new_h:
            hcomps[m] = new_h
        hbar = LInftyMorphism(C0, cyl, hcomps, arity_cap=K)

        cyl = _solve_cylinder_operation(cyl, m, faces, face_alg, evals,
                                        incl, hbar, C, C0, K)
        # rebind morphisms onto the updated algebra object
        evals = {J: LInftyMorphism(cyl, face_alg[J], evals[J].comps,
                                   arity_cap=K) for J in faces}
        hbar = LInftyMorphism(C0, cyl, hbar.comps, arity_cap=K)

    notes = ["cylinder over %d face(s), kernel dimension %d"
             % (len(faces), len(korder))]
    return FillingModel(cyl, n_out, K, C, C0, fs, evals,
                        edges if n_out == 2 else
                        {J: None for J in faces},
                        incl, hbar, notes=notes)


def _solve_cylinder_operation(cyl, m, faces, face_alg, evals, incl, hbar,
                              C, C0, K):
    """One inductive stage: find the arity-m operation of the cylinder
    subject to (a) the quadratic relation at arity m, (b) evaluation
    compatibility with every face, (c) the homotopy morphism relation,
    and (d) the inclusion morphism relation.  Returns the algebra with
    the new operation installed."""
    space = cyl.space
    sys = LinearSystem()
    _register_map_unknowns(sys, space, space, m, "l", shift=1)

    # (a) quadratic relation: delta1(l_m) = -(terms with 2 <= i <= m-1)
    rhs_rel = {}
    for w in sym_words(space, m):
        val = {}
        for i in range(2, m):
            for b1, b2 in unshuffles(i, m):
                sgn = split_sign(space, w, b1, b2)
                inner = cyl.op_word(i, tuple(w[p] for p in b1))
                rest = tuple(w[p] for p in b2)
                for g, c in inner.items():
                    out = cyl.op_word(m - i + 1, (g,) + rest)
                    val = vec_add(val, vec_scale(sgn * c, out))
        if val:
            rhs_rel[w] = vec_scale(-1, val)
    _add_delta1_equations(sys, cyl, cyl, m, "l", rhs_rel, shift=1,
                          sign_tail=1)

    # (b) evaluation compatibility with each face model
    for J in faces:
        ev1 = {a: v for (a,), v in evals[J].comps.get(1, {}).items()}
        tgt = face_alg[J]
        for w in sym_words(space, m):
            want = tgt.op_elems(m, [ev1.get(a, {}) for a in w])
            d = word_degree(space, w) + 1
            for u in tgt.space.basis_in_degree(d):
                coeffs = {}
                for t in space.basis_in_degree(d):
                    _acc(coeffs, ("l", w, t), ev1.get(t, {}).get(u, 0))
                sys.equation(coeffs, want.get(u, Fraction(0)))

    # (c) the homotopy morphism relation at arity m
    h1 = {a: v for (a,), v in hbar.comps.get(1, {}).items()}
    for v in sym_words(C0.space, m):
        lhs = {}
        for i in range(1, m + 1):
            for b1, b2 in unshuffles(i, m):
                sgn = split_sign(C0.space, v, b1, b2)
                inner = C0.op_word(i, tuple(v[p] for p in b1))
                rest = tuple(v[p] for p in b2)
                for g, c in inner.items():
                    out = hbar.comp_word(m - i + 1, (g,) + rest)
                    lhs = vec_add(lhs, vec_scale(sgn * c, out))
        rhs_known = {}
        for sgn, blocks in partition_terms(C0.space, v):
            t = len(blocks)
            if t == m:
                continue
            args = [hbar.comp_word(len(b), b) for b in blocks]
            rhs_known = vec_add(rhs_known,
                                vec_scale(sgn, cyl.op_elems(t, args)))
        target_rhs = vec_add(lhs, vec_scale(-1, rhs_known))
        expanded = _expand_linear(h1, v, space)
        d = word_degree(C0.space, v) + 1
        for t in space.basis_in_degree(d):
            coeffs = {}
            for cw, c in expanded.items():
                _acc(coeffs, ("l", cw, t), c)
            sys.equation(coeffs, target_rhs.get(t, Fraction(0)))

    # (d) the inclusion of constants stays a strict morphism
    incl1 = {a: incl.apply_gen(a) for a in C.space.labels}
    for w in sym_words(C.space, m):
        want = {}
        for b, c in C.op_word(m, w).items():
            want = vec_add(want, vec_scale(c, incl1.get(b, {})))
        expanded = _expand_linear(incl1, w, space)
        d = word_degree(C.space, w) + 1
        for t in space.basis_in_degree(d):
            coeffs = {}
            for cw, c in expanded.items():
                _acc(coeffs, ("l", cw, t), c)
            sys.equation(coeffs, want.get(t, Fraction(0)))

    sol = sys.solve()
    if sol is None:
        raise FillError("no arity-%d cylinder operation satisfies the "
                        "relation and compatibility constraints" % m)
    table = _solution_table(sol, "l")
    ops = {k: dict(t) for k, t in cyl.ops.items()}
    if table:
        ops[m] = table
    return LInftyAlgebra(space, ops, arity_cap=K)


# ---------------------------------------------------------------------------
# inverses up to homotopy


def chain_inverse(f):
    """A chain-level inverse of a quasi-isomorphism over the rationals:
    (g1, hprime) with g1 a chain map and g1 f1 - id = d hprime +
    hprime d.  Canonical exact solve."""
    C1, C2 = f.source, f.target
    d1 = C1.ops.get(1, {})
    d2 = C2.ops.get(1, {})

    def dmap(ops1, lab):
        return ops1.get((lab,), {})

    sys = LinearSystem()
    for a in C2.space.labels:
        for b in C1.space.basis_in_degree(C2.space.deg[a]):
            sys.var(("g", a, b))
    for x in C1.space.labels:
        for u in C1.space.basis_in_degree(C1.space.deg[x] - 1):
            sys.var(("h", x, u))
    # chain map: g d2 - d1 g = 0
    for a in C2.space.labels:
        d = C2.space.deg[a]
        for y in C1.space.basis_in_degree(d + 1):
            coeffs = {}
            for ap, c in dmap(d2, a).items():
                _acc(coeffs, ("g", ap, y), c)
            for b in C1.space.basis_in_degree(d):
                _acc(coeffs, ("g", a, b), -dmap(d1, b).get(y, Fraction(0)))
            sys.equation(coeffs)
    # homotopy: g f1 - id = d1 h + h d1
    f1 = {x: f.comp_word(1, (x,)) for x in C1.space.labels}
    for x in C1.space.labels:
        d = C1.space.deg[x]
        for y in C1.space.basis_in_degree(d):
            coeffs = {}
            for a, c in f1[x].items():
                _acc(coeffs, ("g", a, y), c)
            for u in C1.space.basis_in_degree(d - 1):
                _acc(coeffs, ("h", x, u), -dmap(d1, u).get(y, Fraction(0)))
            for xp, c in dmap(d1, x).items():
                _acc(coeffs, ("h", xp, y), -c)
            sys.equation(coeffs, Fraction(1) if y == x else Fraction(0))
    sol = sys.solve()
    if sol is None:
        raise FillError("no chain-level inverse (is the map a "
                        "quasi-isomorphism?)")
    g1 = {}
    hprime = {}
    for key, c in sol.items():
        kind, a, b = key
        if kind == "g":
            g1.setdefault(a, {})[b] = c
        else:
            hprime.setdefault(a, {})[b] = c
    return g1, hprime


class WhiteheadCertificate:
    """Inverse-up-to-homotopy data for a quasi-isomorphism f: the
    inverse g up to arity K, the homotopy h from the identity to g . f
    inside an interval model, and (when constructible) a reverse
    filling homotopy from f . g to the identity."""

    def __init__(self, f, g, homotopy, model, K, reverse=None, notes=None):
        self.f = f
        self.g = g
        self.homotopy = homotopy
        self.model = model
        self.K = K
        self.reverse = reverse
        self.notes = notes or []

    def verify(self):
        failures = []
        checked = 0

        def fold(rep, tag):
            nonlocal checked
            checked += rep.checked
            for w, r in rep.failures:
                failures.append(((tag,) + tuple(w), r))

        fold(check_morphism(self.g, up_to=self.K), "g")
        fold(check_morphism(self.homotopy, up_to=self.K), "homotopy")
        ok, _ = is_quasi_iso(self.g)
        checked += 1
        if not ok:
            failures.append((("g-quasi-iso",), {"fail": 1}))
        ident = LInftyMorphism.identity(self.f.source)
        ev0 = compose(self.model.ev0, self.homotopy)
        checked += 1
        if not _comps_equal(ev0, ident, min(ev0.arity_cap, self.K)):
            failures.append((("endpoint", "0"), {"mismatch": 1}))
        gf = compose(self.g, self.f)
        ev1 = compose(self.model.ev1, self.homotopy)
        checked += 1
        if not _comps_equal(ev1, gf, self.K):
            failures.append((("endpoint", "1"), {"mismatch": 1}))
        if self.reverse is not None:
            fold(self.reverse.verify(), "reverse")
        return CheckReport("whitehead-certificate", failures, checked,
                           notes=list(self.notes))

    def to_json(self):
        doc = {
            "K": self.K,
            "g": self.g.to_json(),
            "homotopy": self.homotopy.to_json(),
            "model_dim": self.model.algebra.space.dim,
            "notes": list(self.notes),
        }
        if self.reverse is not None:
            doc["reverse"] = self.reverse.to_json()
        return doc


def whitehead_inverse(f, K=3, model=None, with_reverse=True):
    """Invert a quasi-isomorphism up to homotopy, arity by arity.

    Returns a WhiteheadCertificate with g (inverse up to arity K) and a
    homotopy from the identity to g . f inside an interval model of the
    source.  The model defaults to the interval cylinder of the source
    (which exists when the source is acyclic); pass any interval model
    otherwise.  When with_reverse is set and the target admits the
    cylinder, a filling homotopy from f . g to the identity is attached.
    """
    C1, C2 = f.source, f.target
    if not (C1.is_strict and C2.is_strict):
        raise ValueError("inversion requires strict algebras")
    ok, _ = is_quasi_iso(f)
    if not ok:
        raise ValueError("not a quasi-isomorphism")
    notes = []
    if model is None:
        ident = LInftyMorphism.identity(C1)
        try:
            model = as_interval_model(fill_n_homotopy([ident, ident], K=K))
            notes.append("interval cylinder model, dim %d"
                         % model.algebra.space.dim)
        except FillError:
            # non-acyclic source: fall back to the truncated tensor model
            from .simplexmodel import build_model
            model = as_interval_model(build_model(C1, 1, weight_cap=4))
            notes.append("tensor interval model, dim %d"
                         % model.algebra.space.dim)
    else:
        model = as_interval_model(model)
    M = model.algebra
    ev0_1 = model.ev0.f1_map()
    ev1_1 = model.ev1.f1_map()

    g1, hprime = chain_inverse(f)
    # lift the chain homotopy into the model: ev0 hpp = 0, ev1 hpp = h'
    hpp = {}
    for x in C1.space.labels:
        d = C1.space.deg[x] - 1
        basis = M.space.basis_in_degree(d)
        rows, rhs = [], []
        for tgt_space, want in ((model.ev0, {}),
                                (model.ev1, hprime.get(x, {}))):
            evm = tgt_space.f1_map()
            for y in C1.space.basis_in_degree(d):
                rows.append([evm.apply_gen(t).get(y, Fraction(0))
                             for t in basis])
                rhs.append(want.get(y, Fraction(0)))
        sol = solve_canonical(rows, rhs, ncols=len(basis))
        if sol is None:
            raise FillError("cannot lift the chain homotopy into the "
                            "model (joint evaluation not surjective)")
        hpp[x] = {t: c for t, c in zip(basis, sol) if c != 0}
    incl1 = {a: model.incl.apply_gen(a) for a in C1.space.labels}
    h1 = {}
    for x in C1.space.labels:
        val = dict(incl1.get(x, {}))
        val = vec_add(val, M.op_elems(1, [hpp[x]]))
        for xp, c in C1.op_word(1, (x,)).items():
            val = vec_add(val, vec_scale(c, hpp.get(xp, {})))
        if val:
            h1[x] = val
    g = LInftyMorphism(C2, C1, {1: {(a,): v for a, v in g1.items() if v}},
                       arity_cap=K)
    h = LInftyMorphism(C1, M, {1: {(x,): v for x, v in h1.items() if v}},
                       arity_cap=K)

    for m in range(2, K + 1):
        sys = LinearSystem()
        _register_map_unknowns(sys, C2.space, C1.space, m, "g")
        _register_map_unknowns(sys, C1.space, M.space, m, "h")
        O_g = obstruction_cocycle(g, m - 1)
        O_h = obstruction_cocycle(h, m - 1)
        _add_delta1_equations(sys, C2, C1, m, "g", O_g)
        _add_delta1_equations(sys, C1, M, m, "h", O_h)
        # endpoint 0: ev0 h_m = 0; endpoint 1: ev1 h_m = (g f)_m
        f1 = {x: f.comp_word(1, (x,)) for x in C1.space.labels}
        for w in sym_words(C1.space, m):
            d = word_degree(C1.space, w)
            known = {}
            for sgn, blocks in partition_terms(C1.space, w):
                t = len(blocks)
                if t == m:
                    continue
                args = [f.comp_word(len(b), b) for b in blocks]
                known = vec_add(known, vec_scale(sgn, g.comp_elems(t, args)))
            gexp = _expand_linear(f1, w, C2.space)
            for y in C1.space.basis_in_degree(d):
                coeffs0 = {}
                coeffs1 = {}
                for t in M.space.basis_in_degree(d):
                    _acc(coeffs0, ("h", w, t),
                         ev0_1.apply_gen(t).get(y, Fraction(0)))
                    _acc(coeffs1, ("h", w, t),
                         ev1_1.apply_gen(t).get(y, Fraction(0)))
                sys.equation(coeffs0)
                for cw, c in gexp.items():
                    _acc(coeffs1, ("g", cw, y), -c)
                sys.equation(coeffs1, known.get(y, Fraction(0)))
        sol = sys.solve()
        if sol is None:
            raise FillError("inversion blocked at arity %d" % m)
        gtab = _solution_table(sol, "g")
        htab = _solution_table(sol, "h")
        gcomps = {k: dict(t) for k, t in g.comps.items()}
        if gtab:
            gcomps[m] = gtab
        hcomps = {k: dict(t) for k, t in h.comps.items()}
        if htab:
            hcomps[m] = htab
        g = LInftyMorphism(C2, C1, gcomps, arity_cap=K)
        h = LInftyMorphism(C1, M, hcomps, arity_cap=K)

    reverse = None
    if with_reverse:
        try:
            reverse = fill_n_homotopy(
                [compose(f, g), LInftyMorphism.identity(C2)], K=K)
        except FillError as exc:
            notes.append("reverse homotopy unavailable: %s" % exc)
    return WhiteheadCertificate(f, g, h, model, K, reverse=reverse,
                                notes=notes)


# ---------------------------------------------------------------------------
# model morphisms over a morphism of the modeled algebras


def model_morphism_over(f, model1, model2, K=2):
    """A morphism of interval models over f: C1 -> C2, i.e. a morphism
    of the model algebras commuting with both vertex evaluations and
    with the inclusions of constants.  All components are found by
    canonical solves arity by arity; raises FillError when blocked."""
    M1 = as_interval_model(model1)
    M2 = as_interval_model(model2)
    if M1.base is not f.source or M2.base is not f.target:
        raise ValueError("models do not sit over the morphism endpoints")
    A1, A2 = M1.algebra, M2.algebra
    evs1 = {0: M1.ev0.f1_map(), 1: M1.ev1.f1_map()}
    evs2 = {0: M2.ev0.f1_map(), 1: M2.ev1.f1_map()}
    incl1 = {a: M1.incl.apply_gen(a) for a in f.source.space.labels}
    incl2 = M2.incl
    F = None
    for m in range(1, K + 1):
        sys = LinearSystem()
        _register_map_unknowns(sys, A1.space, A2.space, m, "F")
        O = obstruction_cocycle(F, m - 1) if m >= 2 else {}
        _add_delta1_equations(sys, A1, A2, m, "F", O)
        # vertex evaluation compatibility: ev_j F_m = f_m ev_j^{x m}
        for j in (0, 1):
            for w in sym_words(A1.space, m):
                d = word_degree(A1.space, w)
                ev_elems = [evs1[j].apply_gen(a) for a in w]
                want = f.comp_elems(m, ev_elems)
                for y in f.target.space.basis_in_degree(d):
                    coeffs = {}
                    for t in A2.space.basis_in_degree(d):
                        _acc(coeffs, ("F", w, t),
                             evs2[j].apply_gen(t).get(y, Fraction(0)))
                    sys.equation(coeffs, want.get(y, Fraction(0)))
        # inclusion compatibility: F_m (incl1)^{x m} = incl2 f_m
        for w in sym_words(f.source.space, m):
            want = {}
            for b, c in f.comp_word(m, w).items():
                want = vec_add(want, vec_scale(c, incl2.apply_gen(b)))
            expanded = _expand_linear(incl1, w, A1.space)
            d = word_degree(f.source.space, w)
            for t in A2.space.basis_in_degree(d):
                coeffs = {}
                for cw, c in expanded.items():
                    _acc(coeffs, ("F", cw, t), c)
                sys.equation(coeffs, want.get(t, Fraction(0)))
        sol = sys.solve()
        if sol is None:
            raise FillError("no model morphism component at arity %d" % m)
        tab = _solution_table(sol, "F")
        comps = {} if F is None else {k: dict(t) for k, t in F.comps.items()}
        if tab:
            comps[m] = tab
        F = LInftyMorphism(A1, A2, comps, arity_cap=K)
    return F
