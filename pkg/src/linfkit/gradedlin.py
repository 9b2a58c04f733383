"""Exact-arithmetic graded linear algebra.

Graded vector spaces over the rationals with labeled generators, sparse
degree-homogeneous maps, Koszul signs, (i, k-i)-unshuffles, symmetric
words, and cohomology by exact rank.  Everything is immutable after
construction and all arithmetic uses fractions.Fraction; no floats.

Conventions: all degrees live in the [1]-shifted picture (operations of
degree +1, morphism components of degree 0).  The Koszul sign of a
permutation of a graded word is the product of (-1)^{|a||b|} over
transposed pairs; there is no extra permutation sign.
"""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import combinations

UNSHUFFLE_CAP = 12


class CapError(Exception):
    """A configured combinatorial guard was exceeded."""


# ---------------------------------------------------------------------------
# scalars


def scalar_to_str(c: Fraction) -> str:
    """Serialize a rational as "p" or "p/q" (q > 0, lowest terms)."""
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return "%d/%d" % (c.numerator, c.denominator)


def scalar_from_str(s: str) -> Fraction:
    """Parse "p" or "p/q"; rejects zero denominators and floats."""
    s = s.strip()
    if "/" in s:
        p, q = s.split("/")
        qi = int(q)
        if qi == 0:
            raise ValueError("zero denominator in scalar %r" % s)
        return Fraction(int(p), qi)
    return Fraction(int(s))


# ---------------------------------------------------------------------------
# rational matrix routines (dense lists of Fractions; desk scale)


def rref(rows):
    """Reduced row echelon form.  Returns (new_rows, pivot_columns).

    Input is a list of rows (lists of Fractions); the input is not
    mutated.
    """
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = Fraction(1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r] + [[Fraction(0)] * ncols for _ in range(len(m) - r)], pivots


def matrix_rank(rows):
    _, piv = rref(rows)
    return len(piv)


def nullspace(rows, ncols=None):
    """Basis of the right kernel of the matrix (rows act on column
    vectors of length ncols).  Returns a list of vectors (lists)."""
    if ncols is None:
        if not rows:
            raise ValueError("ncols required for an empty matrix")
        ncols = len(rows[0])
    if not rows:
        basis = []
        for j in range(ncols):
            v = [Fraction(0)] * ncols
            v[j] = Fraction(1)
            basis.append(v)
        return basis
    red, pivots = rref(rows)
    pivset = set(pivots)
    free = [j for j in range(ncols) if j not in pivset]
    basis = []
    for j in free:
        v = [Fraction(0)] * ncols
        v[j] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -red[r][j]
        basis.append(v)
    return basis


def solve_canonical(rows, rhs, ncols=None):
    """Solve A x = b exactly.  Returns the canonical solution (all free
    variables set to 0 in the reduced echelon form) or None if the
    system is inconsistent.  The tie-break makes constructions
    reproducible across runs."""
    if ncols is None:
        if not rows:
            ncols = 0
        else:
            ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    if not aug:
        return [Fraction(0)] * ncols
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for r, c in enumerate(pivots):
        x[c] = red[r][ncols]
    return x


def solve_sparse(rows, rhs, ncols):
    """Sparse variant of solve_canonical.  rows is a list of dicts
    {column index: Fraction}; returns the same canonical solution (free
    variables zero, pivot columns chosen left to right) or None.

    Forward elimination touches only not-yet-pivoted rows, so fill-in
    stays proportional to the actual coupling; the answer agrees with
    the dense routine because the pivot column set depends only on the
    matrix."""
    work = [dict(r) for r in rows]
    b = [Fraction(x) for x in rhs]
    col_rows = {}
    for i, r in enumerate(work):
        for c in r:
            col_rows.setdefault(c, set()).add(i)
    processed = [False] * len(work)
    pivots = []
    for c in range(ncols):
        cand = None
        for i in sorted(col_rows.get(c, ())):
            if not processed[i] and work[i].get(c):
                cand = i
                break
        if cand is None:
            continue
        row = work[cand]
        inv = Fraction(1) / row[c]
        if inv != 1:
            for k in row:
                row[k] *= inv
            b[cand] *= inv
        for i in list(col_rows.get(c, ())):
            if i == cand or processed[i]:
                continue
            r2 = work[i]
            f = r2.get(c)
            if not f:
                continue
            for k, v in row.items():
                nv = r2.get(k, Fraction(0)) - f * v
                if nv:
                    r2[k] = nv
                    col_rows.setdefault(k, set()).add(i)
                else:
                    r2.pop(k, None)
            b[i] -= f * b[cand]
        processed[cand] = True
        pivots.append((c, cand))
    for i, r in enumerate(work):
        if not processed[i]:
            if any(v != 0 for v in r.values()):
                return None
            if b[i] != 0:
                return None
    x = [Fraction(0)] * ncols
    for c, i in reversed(pivots):
        s = b[i]
        for k, v in work[i].items():
            if k != c:
                s -= v * x[k]
        x[c] = s
    return x


def in_span(vectors, v):
    """Is v in the span of the given vectors (all plain lists)?"""
    if not vectors:
        return all(x == 0 for x in v)
    cols = [list(col) for col in zip(*vectors)]
    return solve_canonical(cols, list(v), ncols=len(vectors)) is not None


def complement_in(amb_basis, sub_basis):
    """Vectors among amb_basis completing sub_basis to a basis of the
    span of both, chosen greedily in order (echelon complement)."""
    chosen = list(sub_basis)
    out = []
    for v in amb_basis:
        if not in_span(chosen, v):
            chosen.append(v)
            out.append(v)
    return out


# ---------------------------------------------------------------------------
# graded spaces


class GradedSpace:
    """Finite-dimensional graded vector space with labeled generators.

    gens: ordered list of (label, degree) pairs; labels must be unique.
    """

    def __init__(self, gens):
        labels = []
        degs = {}
        for lab, d in gens:
            if lab in degs:
                raise ValueError("duplicate generator label %r" % lab)
            labels.append(lab)
            degs[lab] = int(d)
        self.labels = tuple(labels)
        self.deg = degs
        self.index = {lab: i for i, lab in enumerate(labels)}

    @property
    def dim(self):
        return len(self.labels)

    def degrees(self):
        return sorted(set(self.deg.values()))

    def basis_in_degree(self, d):
        return [lab for lab in self.labels if self.deg[lab] == d]

    def dim_in_degree(self, d):
        return len(self.basis_in_degree(d))

    def __eq__(self, other):
        return (isinstance(other, GradedSpace)
                and self.labels == other.labels and self.deg == other.deg)

    def __repr__(self):
        return "GradedSpace(%d generators)" % self.dim

    def to_json(self):
        return {"generators": [{"label": lab, "deg": self.deg[lab]}
                               for lab in self.labels]}

    @classmethod
    def from_json(cls, doc):
        return cls([(g["label"], g["deg"]) for g in doc["generators"]])


def vec_add(u, v):
    w = dict(u)
    for k, c in v.items():
        w[k] = w.get(k, Fraction(0)) + c
        if w[k] == 0:
            del w[k]
    return w


def vec_scale(c, v):
    c = Fraction(c)
    if c == 0:
        return {}
    return {k: c * x for k, x in v.items()}


def vec_eq(u, v):
    return vec_add(u, vec_scale(-1, v)) == {}


# ---------------------------------------------------------------------------
# graded maps


class GradedMap:
    """Sparse linear map between graded spaces, homogeneous of a fixed
    degree shift.  entries: {(from_label, to_label): Fraction}."""

    def __init__(self, source, target, shift, entries):
        self.source = source
        self.target = target
        self.shift = int(shift)
        clean = {}
        for (a, b), c in entries.items():
            c = Fraction(c)
            if c == 0:
                continue
            if a not in source.deg:
                raise ValueError("unknown source generator %r" % a)
            if b not in target.deg:
                raise ValueError("unknown target generator %r" % b)
            if target.deg[b] != source.deg[a] + self.shift:
                raise ValueError(
                    "entry %r -> %r violates shift %d" % (a, b, self.shift))
            clean[(a, b)] = c
        self.entries = clean

    @classmethod
    def zero(cls, source, target, shift):
        return cls(source, target, shift, {})

    @classmethod
    def identity(cls, space):
        return cls(space, space, 0, {(l, l): Fraction(1)
                                     for l in space.labels})

    def apply(self, vec):
        """Apply to a vector {label: coeff}."""
        out = {}
        for a, c in vec.items():
            for (x, b), e in self.entries.items():
                if x == a:
                    out[b] = out.get(b, Fraction(0)) + c * e
        return {k: v for k, v in out.items() if v != 0}

    def apply_gen(self, lab):
        return {b: c for (a, b), c in self.entries.items() if a == lab}

    def compose(self, other):
        """self after other (self . other)."""
        if other.target is not self.source and other.target != self.source:
            raise ValueError("composition endpoint mismatch")
        entries = {}
        for (a, m), c in other.entries.items():
            for (m2, b), e in self.entries.items():
                if m2 == m:
                    k = (a, b)
                    entries[k] = entries.get(k, Fraction(0)) + c * e
        return GradedMap(other.source, self.target,
                         self.shift + other.shift, entries)

    def add(self, other):
        if self.shift != other.shift:
            raise ValueError("shift mismatch in sum")
        entries = dict(self.entries)
        for k, c in other.entries.items():
            entries[k] = entries.get(k, Fraction(0)) + c
        return GradedMap(self.source, self.target, self.shift, entries)

    def scale(self, c):
        c = Fraction(c)
        return GradedMap(self.source, self.target, self.shift,
                         {k: c * v for k, v in self.entries.items()})

    def is_zero(self):
        return not self.entries

    def matrix(self, src_labels, tgt_labels):
        """Dense matrix rows indexed by tgt_labels, columns by
        src_labels (column = image of a source generator)."""
        rows = []
        for b in tgt_labels:
            rows.append([self.entries.get((a, b), Fraction(0))
                         for a in src_labels])
        return rows

    def to_json(self):
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "shift": self.shift,
            "entries": [{"from": a, "to": b, "coeff": scalar_to_str(c)}
                        for (a, b), c in sorted(self.entries.items())],
        }

    @classmethod
    def from_json(cls, doc, source=None, target=None):
        src = source or GradedSpace.from_json(doc["source"])
        tgt = target or GradedSpace.from_json(doc["target"])
        entries = {(e["from"], e["to"]): scalar_from_str(e["coeff"])
                   for e in doc["entries"]}
        return cls(src, tgt, doc["shift"], entries)


# ---------------------------------------------------------------------------
# Koszul signs, unshuffles, symmetric words


def koszul_sign(degrees, perm):
    """Sign relating the word (a_{perm[0]}, ..., a_{perm[k-1]}) to
    (a_0, ..., a_{k-1}): product of (-1)^{|a||b|} over pairs that get
    transposed.  degrees[i] is the degree of a_i."""
    if len(degrees) != len(perm):
        raise ValueError("permutation length mismatch")
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                if degrees[p[i]] % 2 and degrees[p[j]] % 2:
                    sign = -sign
    return sign


def unshuffles(i, k):
    """All (i, k-i)-unshuffles as pairs of index tuples (block1, block2),
    each increasing.  Exactly binomial(k, i) of them."""
    if not (0 <= i <= k):
        raise ValueError("need 0 <= i <= k")
    if k > UNSHUFFLE_CAP:
        raise CapError("unshuffle arity %d exceeds cap %d"
                       % (k, UNSHUFFLE_CAP))
    out = []
    for block1 in combinations(range(k), i):
        block2 = tuple(j for j in range(k) if j not in block1)
        out.append((block1, block2))
    return out


def canonical_word(space, labels):
    """Canonical form of a symmetric word.

    Returns (word, sign) where word is the tuple of labels sorted by
    generator index and sign the Koszul sign of the sorting, or
    (None, 0) when the word vanishes (repeated odd generator).
    """
    word = list(labels)
    degs = [space.deg[l] for l in word]
    sign = 1
    # insertion sort, tracking the Koszul sign of each adjacent swap
    for i in range(1, len(word)):
        j = i
        while j > 0 and space.index[word[j - 1]] > space.index[word[j]]:
            if degs[j - 1] % 2 and degs[j] % 2:
                sign = -sign
            word[j - 1], word[j] = word[j], word[j - 1]
            degs[j - 1], degs[j] = degs[j], degs[j - 1]
            j -= 1
    for a, b in zip(word, word[1:]):
        if a == b and space.deg[a] % 2:
            return None, 0
    return tuple(word), sign


def word_degree(space, word):
    return sum(space.deg[l] for l in word)


def sym_words(space, k):
    """All nonzero canonical words of arity k (multisets of generators,
    odd generators without repetition), in lexicographic index order."""
    labs = space.labels
    out = []

    def rec2(start, cur):
        if len(cur) == k:
            out.append(tuple(cur))
            return
        for i in range(start, len(labs)):
            l = labs[i]
            nxt = i + 1 if space.deg[l] % 2 else i
            rec2(nxt, cur + [l])

    rec2(0, [])
    return out


def split_sign(space, word, block1, block2):
    """Koszul sign of splitting the canonical word into the two blocks
    of positions (block1, block2)."""
    degs = [space.deg[l] for l in word]
    perm = list(block1) + list(block2)
    return koszul_sign(degs, perm)


# ---------------------------------------------------------------------------
# cohomology


class CohomologyError(Exception):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


def cohomology(d: GradedMap):
    """Cohomology of a differential (shift +1, d . d = 0).

    Returns {degree: {"dim": int, "reps": [vector dicts]}} for every
    degree where either the kernel or the incoming image is nonzero.
    Representatives span an echelon complement of the image inside the
    kernel.  Raises CohomologyError naming a witness generator when
    d . d != 0.
    """
    if d.shift != 1:
        raise ValueError("differential must have shift +1")
    dd = d.compose(d)
    if not dd.is_zero():
        (a, b), _ = sorted(dd.entries.items())[0]
        raise CohomologyError("d.d != 0 (witness generator %r)" % a,
                              witness=a)
    space = d.source
    if d.target != space:
        raise ValueError("differential endpoints must agree")
    out = {}
    for deg in space.degrees():
        src = space.basis_in_degree(deg)
        tgt = space.basis_in_degree(deg + 1)
        prev = space.basis_in_degree(deg - 1)
        mat = d.matrix(src, tgt)  # rows: tgt, cols: src
        ker = nullspace(mat, ncols=len(src))
        img = []
        if prev:
            pm = d.matrix(prev, src)
            cols = [[pm[r][c] for r in range(len(src))]
                    for c in range(len(prev))]
            red, piv = rref(cols)
            img = [red[i] for i in range(len(piv))]
        reps = complement_in(ker, img)
        hdim = len(ker) - matrix_rank(img) if img else len(ker)
        out[deg] = {
            "dim": hdim,
            "reps": [{lab: c for lab, c in zip(src, v) if c != 0}
                     for v in reps],
        }
    return out


def euler_check(space: GradedSpace, coh) -> bool:
    """Rank-nullity ledger: alternating sums of dims agree."""
    chi_c = sum((-1) ** d * space.dim_in_degree(d) for d in space.degrees())
    chi_h = sum((-1) ** d * v["dim"] for d, v in coh.items())
    return chi_c == chi_h


# ---------------------------------------------------------------------------
# serialization helpers shared across modules


def dumps_canonical(doc) -> str:
    """Deterministic JSON used by every report writer."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
