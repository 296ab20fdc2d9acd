/*! Free categories and free double categories, congruences, and quotients.

The free double category on a derivation scheme keeps the two 1-categories
and generates squares: formal units [`FreeSquare::IdV`] and
[`FreeSquare::IdH`], and [`FreeSquare::Tile`]s holding allowable labeled
arrangements of generator squares. Composing two tiles glues their
arrangements along the shared edge. The seam is aligned by a staircase
search over the two boundary label sequences: an alignment step advances
one label on one side and one or more on the other, subject to equal
composites, and the finer side's segmentation and labels win. When no
staircase exists, or when a formal unit on a nonidentity morphism would
have to appear as a cell, the composite has no tile form and composition
reports [`UnrepresentableComposite`] instead of inventing a value.

Quotients never touch objects: a [`CatCongruence`] partitions parallel
morphisms, a [`DblCongruence`] partitions squares with equal boundaries,
and the quotient picks the least identifier of each class as
representative.
*/

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrange::{Arrangement, Cell, HSeg, Subdivision, VSeg};
use crate::budget::{Budget, BudgetExceeded};
use crate::core::ops::transpose_scheme;
use crate::core::{
    DoubleCategory, DoubleDerivationScheme, DoubleFunctor, DoubleGraph1Id, FinCategory,
    FinFunctor, Hom, MorId, ObId, SqId, SquareBoundary,
};

/// Union-find over ordered keys, used for congruence closures and colimit
/// identifications. The class representative is the least inserted index,
/// so merging is order-independent.
#[derive(Clone, Debug, Default)]
pub(crate) struct UnionFind<T: Ord + Clone> {
    index: BTreeMap<T, usize>,
    parent: Vec<usize>,
}

impl<T: Ord + Clone> UnionFind<T> {
    pub(crate) fn new() -> Self {
        UnionFind { index: BTreeMap::new(), parent: Vec::new() }
    }

    pub(crate) fn insert(&mut self, t: T) {
        let next = self.parent.len();
        if let std::collections::btree_map::Entry::Vacant(e) = self.index.entry(t) {
            e.insert(next);
            self.parent.push(next);
        }
    }

    fn root(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    /// Merge the classes of `a` and `b`; true when they were distinct.
    pub(crate) fn union(&mut self, a: &T, b: &T) -> bool {
        let (ia, ib) = (self.index[a], self.index[b]);
        let (ra, rb) = (self.root(ia), self.root(ib));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }

    /// All classes, each as an ordered set.
    pub(crate) fn classes(&mut self) -> Vec<BTreeSet<T>> {
        let mut out: BTreeMap<usize, BTreeSet<T>> = BTreeMap::new();
        let keys: Vec<(T, usize)> = self.index.iter().map(|(t, &i)| (t.clone(), i)).collect();
        for (t, i) in keys {
            let r = self.root(i);
            out.entry(r).or_default().insert(t);
        }
        out.into_values().collect()
    }
}

/// A graph with a chosen identity edge at every object: the underlying data
/// of a category, and the input of [`free_category`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflexiveGraph {
    pub objects: BTreeSet<ObId>,
    pub edges: BTreeMap<MorId, Hom>,
    pub id_edge: BTreeMap<ObId, MorId>,
}

/// A way a reflexive graph can be malformed.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InvalidGraph {
    #[error("edge {edge} has an endpoint outside the object set")]
    UnknownEndpoint { edge: MorId },
    #[error("object {ob} has no identity edge")]
    MissingIdentity { ob: ObId },
    #[error("identity edge of {ob} is not a loop at it")]
    IdentityNotLoop { ob: ObId },
}

impl ReflexiveGraph {
    /// The underlying reflexive graph of a category: every morphism becomes
    /// an edge, identities become the identity edges.
    pub fn of_category(cat: &FinCategory) -> ReflexiveGraph {
        ReflexiveGraph {
            objects: cat.objects().cloned().collect(),
            edges: cat.morphisms().map(|(m, h)| (m.clone(), h.clone())).collect(),
            id_edge: cat
                .objects()
                .filter_map(|o| cat.id_of(o).map(|m| (o.clone(), m.clone())))
                .collect(),
        }
    }

    /// Edges that are not anyone's identity edge.
    pub fn nonidentity_edges(&self) -> impl Iterator<Item = (&MorId, &Hom)> {
        let ids: BTreeSet<&MorId> = self.id_edge.values().collect();
        self.edges.iter().filter(move |(m, _)| !ids.contains(m))
    }

    pub fn validate(&self) -> Result<(), Vec<InvalidGraph>> {
        let mut errs = Vec::new();
        for (edge, hom) in &self.edges {
            if !self.objects.contains(&hom.src) || !self.objects.contains(&hom.tgt) {
                errs.push(InvalidGraph::UnknownEndpoint { edge: edge.clone() });
            }
        }
        for ob in &self.objects {
            match self.id_edge.get(ob).and_then(|m| self.edges.get(m)) {
                None => errs.push(InvalidGraph::MissingIdentity { ob: ob.clone() }),
                Some(hom) if hom.src != *ob || hom.tgt != *ob => {
                    errs.push(InvalidGraph::IdentityNotLoop { ob: ob.clone() })
                }
                Some(_) => {}
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }
}

/// Why a free category could not be materialized.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FreeCatError {
    #[error("free category is infinite: directed cycle through {through}")]
    Infinite { through: ObId },
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// The name of a composite path of edges.
fn path_name(path: &[MorId]) -> MorId {
    let mut s = String::new();
    for (i, m) in path.iter().enumerate() {
        if i > 0 {
            s.push('*');
        }
        s.push_str(m.as_str());
    }
    MorId(s)
}

/// The free category on a reflexive graph. Morphisms are the identity edges
/// plus nonempty paths of nonidentity edges; a path `e` then `f` is named
/// `e*f`. The result is finite exactly when the nonidentity edges form no
/// directed cycle.
pub fn free_category(g: &ReflexiveGraph, budget: &Budget) -> Result<FinCategory, FreeCatError> {
    let edges: Vec<(&MorId, &Hom)> = g.nonidentity_edges().collect();

    // Cycle check: repeatedly peel objects without an outgoing edge into
    // the rest; leftovers lie on a cycle.
    let mut remaining: BTreeSet<ObId> = g.objects.clone();
    loop {
        let sinks: Vec<ObId> = remaining
            .iter()
            .filter(|o| !edges.iter().any(|(_, h)| h.src == **o && remaining.contains(&h.tgt)))
            .cloned()
            .collect();
        if sinks.is_empty() {
            break;
        }
        for s in &sinks {
            remaining.remove(s);
        }
    }
    if let Some(o) = remaining.into_iter().next() {
        return Err(FreeCatError::Infinite { through: o });
    }

    // All paths of nonidentity edges, grown by extension on the right.
    let tgt_of = |path: &[MorId]| g.edges[path.last().expect("paths are nonempty")].tgt.clone();
    let mut paths: Vec<Vec<MorId>> = edges.iter().map(|(m, _)| vec![(*m).clone()]).collect();
    let mut layer = paths.clone();
    while !layer.is_empty() {
        let mut next = Vec::new();
        for p in &layer {
            let at = tgt_of(p);
            for (e, h) in &edges {
                if h.src == at {
                    budget.charge_path(p.len() + 1, "free category paths")?;
                    let mut q = p.clone();
                    q.push((*e).clone());
                    next.push(q);
                }
            }
        }
        budget.charge_squares(paths.len() + next.len(), "free category morphisms")?;
        paths.extend(next.iter().cloned());
        layer = next;
    }

    let mut cat = FinCategory::new();
    for o in &g.objects {
        cat.add_object(o.clone());
    }
    for (o, m) in &g.id_edge {
        cat.add_morphism(m.clone(), o.clone(), o.clone());
        cat.set_identity(o.clone(), m.clone());
    }
    for p in &paths {
        let src = g.edges[&p[0]].src.clone();
        cat.add_morphism(path_name(p), src, tgt_of(p));
    }
    for p in &paths {
        let at = tgt_of(p);
        for q in &paths {
            if g.edges[&q[0]].src == at {
                let mut pq = p.clone();
                pq.extend(q.iter().cloned());
                cat.set_then(path_name(p), path_name(q), path_name(&pq));
            }
        }
    }
    cat.close_identities();
    Ok(cat)
}

/// The free double derivation scheme on a double graph: both 1-categories
/// free, the square set unchanged.
pub fn free_dds(
    g: &DoubleGraph1Id,
    budget: &Budget,
) -> Result<DoubleDerivationScheme, FreeCatError> {
    let hor = ReflexiveGraph {
        objects: g.objects.clone(),
        edges: g.hor_edges.clone(),
        id_edge: g.hor_id.clone(),
    };
    let ver = ReflexiveGraph {
        objects: g.objects.clone(),
        edges: g.ver_edges.clone(),
        id_edge: g.ver_id.clone(),
    };
    Ok(DoubleDerivationScheme {
        hor_cat: free_category(&hor, budget)?,
        ver_cat: free_category(&ver, budget)?,
        squares: g.squares.clone(),
    })
}

/// A defect in a congruence or in its generating pairs.
#[derive(Clone, Debug, Error, PartialEq, Eq, PartialOrd, Ord)]
pub enum CongruenceError {
    #[error("congruence mentions unknown element {id}")]
    Unknown { id: String },
    #[error("congruence relates non-parallel elements {a} and {b}")]
    NotParallel { a: String, b: String },
    #[error("congruence classes are not closed under composition at {a} ~ {b}")]
    NotClosed { a: String, b: String },
    #[error("class representative of {id} is not the least member")]
    BadRepresentative { id: String },
}

/// A congruence on a category: a partition of every hom-set, closed under
/// composition on both sides. Stored as a representative map; the
/// representative of a class is its least identifier.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatCongruence {
    rep: BTreeMap<MorId, MorId>,
}

impl CatCongruence {
    /// The finest congruence: every morphism alone in its class.
    pub fn discrete(cat: &FinCategory) -> CatCongruence {
        CatCongruence { rep: cat.mor_ids().map(|m| (m.clone(), m.clone())).collect() }
    }

    fn from_union_find(uf: &mut UnionFind<MorId>) -> CatCongruence {
        let mut rep = BTreeMap::new();
        for class in uf.classes() {
            let least = class.iter().next().expect("classes are nonempty").clone();
            for m in class {
                rep.insert(m, least.clone());
            }
        }
        CatCongruence { rep }
    }

    /// The representative of the class of `m`.
    pub fn rep(&self, m: &MorId) -> MorId {
        self.rep.get(m).cloned().unwrap_or_else(|| m.clone())
    }

    pub fn related(&self, a: &MorId, b: &MorId) -> bool {
        self.rep(a) == self.rep(b)
    }

    /// Classes keyed by representative.
    pub fn classes(&self) -> BTreeMap<MorId, BTreeSet<MorId>> {
        let mut out: BTreeMap<MorId, BTreeSet<MorId>> = BTreeMap::new();
        for (m, r) in &self.rep {
            out.entry(r.clone()).or_default().insert(m.clone());
        }
        out
    }

    /// Check the congruence axioms over `cat`, which must itself be valid.
    pub fn validate(&self, cat: &FinCategory) -> Result<(), Vec<CongruenceError>> {
        let mut errs = Vec::new();
        for (m, r) in &self.rep {
            if !cat.has_morphism(m) || !cat.has_morphism(r) {
                errs.push(CongruenceError::Unknown { id: m.to_string() });
                continue;
            }
            if cat.hom_data(m) != cat.hom_data(r) {
                errs.push(CongruenceError::NotParallel { a: m.to_string(), b: r.to_string() });
            }
            if self.rep(r) != *r || *r > *m {
                errs.push(CongruenceError::BadRepresentative { id: m.to_string() });
            }
        }
        for m in cat.mor_ids() {
            if !self.rep.contains_key(m) {
                errs.push(CongruenceError::Unknown { id: m.to_string() });
            }
        }
        if !errs.is_empty() {
            errs.sort();
            errs.dedup();
            return Err(errs);
        }
        let classes = self.classes();
        for (f, g) in cat.composable_pairs() {
            let fg = cat.then(&f, &g).expect("composable pair");
            let want = self.rep(fg);
            for f2 in &classes[&self.rep(&f)] {
                for g2 in &classes[&self.rep(&g)] {
                    let fg2 = cat.then(f2, g2).expect("parallel morphisms compose alike");
                    if self.rep(fg2) != want {
                        errs.push(CongruenceError::NotClosed {
                            a: fg.to_string(),
                            b: fg2.to_string(),
                        });
                    }
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            errs.sort();
            errs.dedup();
            Err(errs)
        }
    }
}

/// The least congruence on `cat` containing the given pairs: union-find
/// seeded with the pairs, then composition propagated to a fixpoint.
pub fn congruence_closure_cat(
    cat: &FinCategory,
    pairs: &[(MorId, MorId)],
) -> Result<CatCongruence, CongruenceError> {
    let mut uf: UnionFind<MorId> = UnionFind::new();
    for m in cat.mor_ids() {
        uf.insert(m.clone());
    }
    for (a, b) in pairs {
        if !cat.has_morphism(a) {
            return Err(CongruenceError::Unknown { id: a.to_string() });
        }
        if !cat.has_morphism(b) {
            return Err(CongruenceError::Unknown { id: b.to_string() });
        }
        if cat.hom_data(a) != cat.hom_data(b) {
            return Err(CongruenceError::NotParallel { a: a.to_string(), b: b.to_string() });
        }
        uf.union(a, b);
    }
    let composable = cat.composable_pairs();
    loop {
        let mut changed = false;
        let classes = uf.classes();
        let class_of: BTreeMap<&MorId, usize> = classes
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.iter().map(move |m| (m, i)))
            .collect();
        for (f, g) in &composable {
            let fg = cat.then(f, g).expect("composable pair").clone();
            for f2 in &classes[class_of[f]] {
                for g2 in &classes[class_of[g]] {
                    let fg2 = cat.then(f2, g2).expect("parallel morphisms compose alike").clone();
                    if uf.union(&fg, &fg2) {
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(CatCongruence::from_union_find(&mut uf))
}

/// The quotient category: same objects, morphisms are the class
/// representatives, composition induced on representatives.
pub fn quotient_category(
    cat: &FinCategory,
    cong: &CatCongruence,
) -> Result<FinCategory, Vec<CongruenceError>> {
    cong.validate(cat)?;
    let mut out = FinCategory::new();
    for o in cat.objects() {
        out.add_object(o.clone());
    }
    let reps: BTreeSet<MorId> = cat.mor_ids().map(|m| cong.rep(m)).collect();
    for r in &reps {
        let h = cat.hom_data(r).expect("representative is a morphism");
        out.add_morphism(r.clone(), h.src.clone(), h.tgt.clone());
    }
    for o in cat.objects() {
        out.set_identity(o.clone(), cong.rep(cat.id_of(o).expect("category has identities")));
    }
    for f in &reps {
        for g in &reps {
            if cat.tgt(f) == cat.src(g) {
                let fg = cat.then(f, g).expect("total composition");
                out.set_then(f.clone(), g.clone(), cong.rep(fg));
            }
        }
    }
    Ok(out)
}

/// The projection functor onto the quotient.
pub fn quotient_projection(
    cat: &FinCategory,
    cong: &CatCongruence,
) -> Result<FinFunctor, Vec<CongruenceError>> {
    let q = quotient_category(cat, cong)?;
    Ok(FinFunctor::new(
        cat.clone(),
        q,
        cat.objects().map(|o| (o.clone(), o.clone())).collect(),
        cat.mor_ids().map(|m| (m.clone(), cong.rep(m))).collect(),
    ))
}

/// A congruence on the squares of a double category: a partition of the
/// squares over each boundary, closed under both compositions. The two
/// 1-categories are untouched.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DblCongruence {
    rep: BTreeMap<SqId, SqId>,
}

impl DblCongruence {
    pub fn discrete(d: &DoubleCategory) -> DblCongruence {
        DblCongruence { rep: d.sq_ids().map(|s| (s.clone(), s.clone())).collect() }
    }

    fn from_union_find(uf: &mut UnionFind<SqId>) -> DblCongruence {
        let mut rep = BTreeMap::new();
        for class in uf.classes() {
            let least = class.iter().next().expect("classes are nonempty").clone();
            for s in class {
                rep.insert(s, least.clone());
            }
        }
        DblCongruence { rep }
    }

    pub fn rep(&self, s: &SqId) -> SqId {
        self.rep.get(s).cloned().unwrap_or_else(|| s.clone())
    }

    pub fn related(&self, a: &SqId, b: &SqId) -> bool {
        self.rep(a) == self.rep(b)
    }

    pub fn classes(&self) -> BTreeMap<SqId, BTreeSet<SqId>> {
        let mut out: BTreeMap<SqId, BTreeSet<SqId>> = BTreeMap::new();
        for (s, r) in &self.rep {
            out.entry(r.clone()).or_default().insert(s.clone());
        }
        out
    }

    pub fn validate(&self, d: &DoubleCategory) -> Result<(), Vec<CongruenceError>> {
        let mut errs = Vec::new();
        for (s, r) in &self.rep {
            if !d.has_square(s) || !d.has_square(r) {
                errs.push(CongruenceError::Unknown { id: s.to_string() });
                continue;
            }
            if d.boundary(s) != d.boundary(r) {
                errs.push(CongruenceError::NotParallel { a: s.to_string(), b: r.to_string() });
            }
            if self.rep(r) != *r || *r > *s {
                errs.push(CongruenceError::BadRepresentative { id: s.to_string() });
            }
        }
        for s in d.sq_ids() {
            if !self.rep.contains_key(s) {
                errs.push(CongruenceError::Unknown { id: s.to_string() });
            }
        }
        if !errs.is_empty() {
            errs.sort();
            errs.dedup();
            return Err(errs);
        }
        let classes = self.classes();
        let squares: Vec<&SqId> = d.sq_ids().collect();
        for a in &squares {
            for b in &squares {
                for stacked in [false, true] {
                    let comp = if stacked { d.stack(a, b) } else { d.beside(a, b) };
                    let Some(c) = comp else { continue };
                    let want = self.rep(c);
                    for a2 in &classes[&self.rep(a)] {
                        for b2 in &classes[&self.rep(b)] {
                            let c2 = if stacked { d.stack(a2, b2) } else { d.beside(a2, b2) };
                            let c2 = c2.expect("same boundaries compose alike");
                            if self.rep(c2) != want {
                                errs.push(CongruenceError::NotClosed {
                                    a: c.to_string(),
                                    b: c2.to_string(),
                                });
                            }
                        }
                    }
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            errs.sort();
            errs.dedup();
            Err(errs)
        }
    }
}

/// The least square congruence containing the pairs.
pub fn congruence_closure_dbl(
    d: &DoubleCategory,
    pairs: &[(SqId, SqId)],
) -> Result<DblCongruence, CongruenceError> {
    let mut uf: UnionFind<SqId> = UnionFind::new();
    for s in d.sq_ids() {
        uf.insert(s.clone());
    }
    for (a, b) in pairs {
        if !d.has_square(a) {
            return Err(CongruenceError::Unknown { id: a.to_string() });
        }
        if !d.has_square(b) {
            return Err(CongruenceError::Unknown { id: b.to_string() });
        }
        if d.boundary(a) != d.boundary(b) {
            return Err(CongruenceError::NotParallel { a: a.to_string(), b: b.to_string() });
        }
        uf.union(a, b);
    }
    let squares: Vec<SqId> = d.sq_ids().cloned().collect();
    loop {
        let mut changed = false;
        let classes = uf.classes();
        let class_of: BTreeMap<&SqId, usize> = classes
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.iter().map(move |s| (s, i)))
            .collect();
        for a in &squares {
            for b in &squares {
                for stacked in [false, true] {
                    let comp = if stacked { d.stack(a, b) } else { d.beside(a, b) };
                    let Some(c) = comp else { continue };
                    let c = c.clone();
                    for a2 in &classes[class_of[a]] {
                        for b2 in &classes[class_of[b]] {
                            let c2 = if stacked { d.stack(a2, b2) } else { d.beside(a2, b2) };
                            let c2 = c2.expect("same boundaries compose alike").clone();
                            if uf.union(&c, &c2) {
                                changed = true;
                            }
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(DblCongruence::from_union_find(&mut uf))
}

/// The quotient double category: same 1-categories, squares are the class
/// representatives.
pub fn quotient_double(
    d: &DoubleCategory,
    cong: &DblCongruence,
) -> Result<DoubleCategory, Vec<CongruenceError>> {
    cong.validate(d)?;
    let mut out = DoubleCategory::new();
    out.set_hor_cat(d.hor_cat().clone());
    out.set_ver_cat(d.ver_cat().clone());
    let reps: BTreeSet<SqId> = d.sq_ids().map(|s| cong.rep(s)).collect();
    for r in &reps {
        out.add_square(r.clone(), d.boundary(r).expect("representative is a square").clone());
    }
    for (v, _) in d.ver_cat().morphisms() {
        out.set_hor_unit(v.clone(), cong.rep(d.hor_unit_on(v).expect("total units")));
    }
    for (f, _) in d.hor_cat().morphisms() {
        out.set_ver_unit(f.clone(), cong.rep(d.ver_unit_on(f).expect("total units")));
    }
    for a in &reps {
        for b in &reps {
            if let Some(c) = d.beside(a, b) {
                out.set_beside(a.clone(), b.clone(), cong.rep(c));
            }
            if let Some(c) = d.stack(a, b) {
                out.set_stack(a.clone(), b.clone(), cong.rep(c));
            }
        }
    }
    Ok(out)
}

/// The projection double functor onto the quotient.
pub fn quotient_projection_double(
    d: &DoubleCategory,
    cong: &DblCongruence,
) -> Result<DoubleFunctor, Vec<CongruenceError>> {
    let q = quotient_double(d, cong)?;
    Ok(DoubleFunctor::new(
        d.clone(),
        q,
        d.hor_cat().objects().map(|o| (o.clone(), o.clone())).collect(),
        d.hor_cat().mor_ids().map(|m| (m.clone(), m.clone())).collect(),
        d.ver_cat().mor_ids().map(|m| (m.clone(), m.clone())).collect(),
        d.sq_ids().map(|s| (s.clone(), cong.rep(s))).collect(),
    ))
}

/// A square of the free double category on a scheme: a formal unit or an
/// allowable labeled arrangement of generator squares.
///
/// `IdV(f)` is the stacking unit on the horizontal morphism `f`; `IdH(v)`
/// the pasting unit on the vertical morphism `v`. The two units on an
/// object's identities coincide, and the canonical corner form is `IdV` on
/// the horizontal identity; [`FreeSquare::hor_unit`] normalizes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FreeSquare {
    IdV(MorId),
    IdH(MorId),
    Tile(Arrangement),
}

impl FreeSquare {
    /// The unit square for horizontal pasting on the vertical morphism `v`.
    pub fn hor_unit(s: &DoubleDerivationScheme, v: &MorId) -> FreeSquare {
        if s.ver_cat.is_identity(v) {
            let a = s.ver_cat.src(v).expect("identity has an object");
            FreeSquare::IdV(s.hor_cat.id_of(a).expect("shared object set").clone())
        } else {
            FreeSquare::IdH(v.clone())
        }
    }

    /// The unit square for stacking on the horizontal morphism `f`.
    pub fn ver_unit(f: &MorId) -> FreeSquare {
        FreeSquare::IdV(f.clone())
    }

    /// The one-cell tile holding the generator square `sq`.
    pub fn generator(s: &DoubleDerivationScheme, sq: &SqId) -> Option<FreeSquare> {
        Arrangement::single(s, sq).map(FreeSquare::Tile)
    }

    /// Rewrite `IdH` on an identity vertical to the canonical corner form.
    pub fn normalize(&self, s: &DoubleDerivationScheme) -> FreeSquare {
        match self {
            FreeSquare::IdH(v) => FreeSquare::hor_unit(s, v),
            other => other.clone(),
        }
    }

    /// The same square in the transposed scheme.
    pub fn transpose(&self, transposed: &DoubleDerivationScheme) -> FreeSquare {
        match self {
            FreeSquare::IdV(f) => FreeSquare::hor_unit(transposed, f),
            FreeSquare::IdH(v) => FreeSquare::IdV(v.clone()),
            FreeSquare::Tile(a) => FreeSquare::Tile(a.transpose()),
        }
    }

    pub fn boundary(&self, s: &DoubleDerivationScheme) -> Option<SquareBoundary> {
        match self {
            FreeSquare::IdV(f) => Some(SquareBoundary {
                top: f.clone(),
                bottom: f.clone(),
                left: s.ver_cat.id_of(s.hor_cat.src(f)?)?.clone(),
                right: s.ver_cat.id_of(s.hor_cat.tgt(f)?)?.clone(),
            }),
            FreeSquare::IdH(v) => Some(SquareBoundary {
                top: s.hor_cat.id_of(s.ver_cat.src(v)?)?.clone(),
                bottom: s.hor_cat.id_of(s.ver_cat.tgt(v)?)?.clone(),
                left: v.clone(),
                right: v.clone(),
            }),
            FreeSquare::Tile(a) => a.boundary(s),
        }
    }

    pub fn is_identity(&self) -> bool {
        !matches!(self, FreeSquare::Tile(_))
    }

    /// A deterministic identifier encoding the canonical form.
    pub fn canonical_id(&self) -> SqId {
        match self {
            FreeSquare::IdV(f) => SqId(format!("idv[{f}]")),
            FreeSquare::IdH(v) => SqId(format!("idh[{v}]")),
            FreeSquare::Tile(a) => {
                let mut s = String::from("tile[");
                for (c, sq) in &a.cell_labels {
                    let _ = write!(s, "{},{},{},{}:{};", c.x0, c.y0, c.x1, c.y1, sq);
                }
                s.push('|');
                for (h, m) in &a.hor_labels {
                    let _ = write!(s, "h{},{},{}:{};", h.y, h.x0, h.x1, m);
                }
                for (v, m) in &a.ver_labels {
                    let _ = write!(s, "v{},{},{}:{};", v.x, v.y0, v.y1, m);
                }
                s.push(']');
                SqId(s)
            }
        }
    }
}

/// A composite of free squares that has no tile form.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum UnrepresentableComposite {
    #[error("pasting the unit on {unit} onto an identity-sided tile needs an identity cell")]
    IdentityPadding { unit: MorId },
    #[error("seam label sequences {left:?} and {right:?} admit no alignment")]
    SeamMismatch { left: Vec<MorId>, right: Vec<MorId> },
}

/// Why a free-square composition failed.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FreeComposeError {
    #[error(transparent)]
    Unrepresentable(#[from] UnrepresentableComposite),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// The free double category on a scheme, presented lazily: squares are
/// [`FreeSquare`] values, composed and compared on demand.
#[derive(Clone, Debug)]
pub struct FreePresentation {
    scheme: DoubleDerivationScheme,
    transposed: DoubleDerivationScheme,
    budget: Budget,
}

impl FreePresentation {
    pub fn new(scheme: DoubleDerivationScheme, budget: Budget) -> FreePresentation {
        let transposed = transpose_scheme(&scheme);
        FreePresentation { scheme, transposed, budget }
    }

    pub fn scheme(&self) -> &DoubleDerivationScheme {
        &self.scheme
    }

    /// All formal unit squares, corner units identified.
    pub fn unit_squares(&self) -> BTreeSet<FreeSquare> {
        let mut out = BTreeSet::new();
        for (v, _) in self.scheme.ver_cat.morphisms() {
            out.insert(FreeSquare::hor_unit(&self.scheme, v));
        }
        for (f, _) in self.scheme.hor_cat.morphisms() {
            out.insert(FreeSquare::ver_unit(f));
        }
        out
    }

    /// One-cell tiles for the generator squares.
    pub fn generators(&self) -> Vec<FreeSquare> {
        self.scheme
            .squares
            .keys()
            .map(|sq| FreeSquare::generator(&self.scheme, sq).expect("valid scheme"))
            .collect()
    }

    pub fn boundary(&self, sq: &FreeSquare) -> Option<SquareBoundary> {
        sq.normalize(&self.scheme).boundary(&self.scheme)
    }

    /// Equality of free squares: structural equality of canonical forms.
    pub fn equal(&self, a: &FreeSquare, b: &FreeSquare) -> bool {
        a.normalize(&self.scheme) == b.normalize(&self.scheme)
    }

    /// Horizontal composite `a` then `b`, `None` when not composable.
    pub fn beside(
        &self,
        a: &FreeSquare,
        b: &FreeSquare,
    ) -> Result<Option<FreeSquare>, FreeComposeError> {
        beside_impl(
            &self.scheme,
            &a.normalize(&self.scheme),
            &b.normalize(&self.scheme),
            &self.budget,
        )
    }

    /// Vertical composite `a` above `b`.
    pub fn stack(
        &self,
        a: &FreeSquare,
        b: &FreeSquare,
    ) -> Result<Option<FreeSquare>, FreeComposeError> {
        let ta = a.normalize(&self.scheme).transpose(&self.transposed);
        let tb = b.normalize(&self.scheme).transpose(&self.transposed);
        Ok(beside_impl(&self.transposed, &ta, &tb, &self.budget)?
            .map(|c| c.transpose(&self.scheme)))
    }
}

fn beside_impl(
    s: &DoubleDerivationScheme,
    a: &FreeSquare,
    b: &FreeSquare,
    budget: &Budget,
) -> Result<Option<FreeSquare>, FreeComposeError> {
    let (Some(ba), Some(bb)) = (a.boundary(s), b.boundary(s)) else {
        return Ok(None);
    };
    if ba.right != bb.left {
        return Ok(None);
    }
    match (a, b) {
        (FreeSquare::IdV(f), FreeSquare::IdV(g)) => {
            let fg = s.hor_cat.then(f, g).expect("matched boundary composes");
            Ok(Some(FreeSquare::IdV(fg.clone())))
        }
        (FreeSquare::IdH(v), FreeSquare::IdH(_)) => Ok(Some(FreeSquare::IdH(v.clone()))),
        (FreeSquare::IdH(_), FreeSquare::Tile(t)) | (FreeSquare::Tile(t), FreeSquare::IdH(_)) => {
            Ok(Some(FreeSquare::Tile(t.clone())))
        }
        (FreeSquare::IdV(f), FreeSquare::Tile(t)) | (FreeSquare::Tile(t), FreeSquare::IdV(f)) => {
            if s.hor_cat.is_identity(f) {
                Ok(Some(FreeSquare::Tile(t.clone())))
            } else {
                Err(UnrepresentableComposite::IdentityPadding { unit: f.clone() }.into())
            }
        }
        (FreeSquare::Tile(ta), FreeSquare::Tile(tb)) => {
            Ok(Some(FreeSquare::Tile(glue_beside(s, ta, tb, budget)?)))
        }
        // A corner unit is always IdV after normalization, and IdV next to
        // IdH needs an identity vertical equal to a nonidentity one, which
        // the boundary check above already rejected.
        (FreeSquare::IdV(_), FreeSquare::IdH(_)) | (FreeSquare::IdH(_), FreeSquare::IdV(_)) => {
            unreachable!("corner units are normalized to IdV")
        }
    }
}

/// The seam of an arrangement edge at `x`: segment endpoint ranks (first 0,
/// last the height) and the segment labels, top to bottom.
fn seam(a: &Arrangement, x: usize) -> Result<(Vec<usize>, Vec<MorId>), UnrepresentableComposite> {
    let segs: Vec<(&VSeg, &MorId)> = a.ver_labels.iter().filter(|(seg, _)| seg.x == x).collect();
    let mut positions = vec![0];
    let mut labels = Vec::new();
    for (seg, m) in segs {
        if seg.y0 != *positions.last().expect("nonempty") {
            return Err(UnrepresentableComposite::SeamMismatch {
                left: labels,
                right: Vec::new(),
            });
        }
        positions.push(seg.y1);
        labels.push(m.clone());
    }
    if *positions.last().expect("nonempty") != a.subdivision.height() {
        return Err(UnrepresentableComposite::SeamMismatch { left: labels, right: Vec::new() });
    }
    Ok((positions, labels))
}

/// The canonical alignment staircase from `(0, 0)` to `(m, n)` over the two
/// seam label sequences. Each step advances exactly one label on one side
/// and one or more on the other, and the two groups must have equal
/// composites. Steps are tried smallest first, the right side finer first;
/// states that admit no completion are memoized.
fn staircase(ver: &FinCategory, ua: &[MorId], wb: &[MorId]) -> Option<Vec<(usize, usize)>> {
    fn go(
        ver: &FinCategory,
        ua: &[MorId],
        wb: &[MorId],
        path: &mut Vec<(usize, usize)>,
        dead: &mut BTreeSet<(usize, usize)>,
    ) -> bool {
        let &(i, j) = path.last().expect("path starts at the origin");
        let (m, n) = (ua.len(), wb.len());
        if i == m && j == n {
            return true;
        }
        if dead.contains(&(i, j)) {
            return false;
        }
        for total in 2..=(m - i) + (n - j) {
            let candidates: &[(usize, usize)] =
                if total == 2 { &[(1, 1)] } else { &[(1, total - 1), (total - 1, 1)] };
            for &(di, dj) in candidates {
                if i + di > m || j + dj > n {
                    continue;
                }
                let left = ver.then_path(&ua[i..i + di]);
                let right = ver.then_path(&wb[j..j + dj]);
                if left.is_none() || left != right {
                    continue;
                }
                path.push((i + di, j + dj));
                if go(ver, ua, wb, path, dead) {
                    return true;
                }
                path.pop();
            }
        }
        dead.insert((i, j));
        false
    }
    let mut path = vec![(0, 0)];
    let mut dead = BTreeSet::new();
    if go(ver, ua, wb, &mut path, &mut dead) {
        Some(path)
    } else {
        None
    }
}

/// Glue two tiles along the vertical seam between them; the first sits on
/// the left. Between alignment points the merged height ranks keep every
/// rank of both operands, first operand first, which keeps gluing
/// associative.
fn glue_beside(
    s: &DoubleDerivationScheme,
    a: &Arrangement,
    b: &Arrangement,
    budget: &Budget,
) -> Result<Arrangement, FreeComposeError> {
    budget.charge_cells(
        a.subdivision.cell_count() + b.subdivision.cell_count(),
        "gluing arrangements",
    )?;
    let wa = a.subdivision.width();
    let (ya, ua) = seam(a, wa)?;
    let (yb, wb) = seam(b, 0)?;
    let steps = staircase(&s.ver_cat, &ua, &wb).ok_or_else(|| {
        UnrepresentableComposite::SeamMismatch { left: ua.clone(), right: wb.clone() }
    })?;

    let mut map_a = vec![usize::MAX; a.subdivision.height() + 1];
    let mut map_b = vec![usize::MAX; b.subdivision.height() + 1];
    let mut next = 0;
    map_a[0] = 0;
    map_b[0] = 0;
    for w in steps.windows(2) {
        let ((i, j), (i2, j2)) = (w[0], w[1]);
        for slot in &mut map_a[ya[i] + 1..ya[i2]] {
            next += 1;
            *slot = next;
        }
        for slot in &mut map_b[yb[j] + 1..yb[j2]] {
            next += 1;
            *slot = next;
        }
        next += 1;
        map_a[ya[i2]] = next;
        map_b[yb[j2]] = next;
    }

    let cells = a
        .subdivision
        .cells()
        .map(|c| Cell::new(c.x0, map_a[c.y0], c.x1, map_a[c.y1]))
        .chain(
            b.subdivision
                .cells()
                .map(|c| Cell::new(c.x0 + wa, map_b[c.y0], c.x1 + wa, map_b[c.y1])),
        );
    let subdivision = Subdivision::new(cells).expect("glued cells tile the rectangle");

    let mut vertex_labels: BTreeMap<(usize, usize), ObId> = BTreeMap::new();
    for (&(x, y), ob) in &a.vertex_labels {
        vertex_labels.insert((x, map_a[y]), ob.clone());
    }
    for (&(x, y), ob) in &b.vertex_labels {
        vertex_labels.insert((x + wa, map_b[y]), ob.clone());
    }

    let mut hor_labels: BTreeMap<HSeg, MorId> = BTreeMap::new();
    for (seg, m) in &a.hor_labels {
        hor_labels.insert(HSeg { y: map_a[seg.y], x0: seg.x0, x1: seg.x1 }, m.clone());
    }
    for (seg, m) in &b.hor_labels {
        hor_labels.insert(HSeg { y: map_b[seg.y], x0: seg.x0 + wa, x1: seg.x1 + wa }, m.clone());
    }

    let mut ver_labels: BTreeMap<VSeg, MorId> = BTreeMap::new();
    for (seg, m) in &a.ver_labels {
        if seg.x < wa {
            ver_labels.insert(VSeg { x: seg.x, y0: map_a[seg.y0], y1: map_a[seg.y1] }, m.clone());
        }
    }
    for (seg, m) in &b.ver_labels {
        if seg.x > 0 {
            ver_labels
                .insert(VSeg { x: seg.x + wa, y0: map_b[seg.y0], y1: map_b[seg.y1] }, m.clone());
        }
    }
    // The seam itself carries the finer side's segments and labels.
    for w in steps.windows(2) {
        let ((i, j), (i2, j2)) = (w[0], w[1]);
        if i2 - i > 1 {
            for t in i..i2 {
                ver_labels.insert(
                    VSeg { x: wa, y0: map_a[ya[t]], y1: map_a[ya[t + 1]] },
                    ua[t].clone(),
                );
            }
        } else {
            for t in j..j2 {
                ver_labels.insert(
                    VSeg { x: wa, y0: map_b[yb[t]], y1: map_b[yb[t + 1]] },
                    wb[t].clone(),
                );
            }
        }
    }

    let mut cell_labels: BTreeMap<Cell, SqId> = BTreeMap::new();
    for (c, sq) in &a.cell_labels {
        cell_labels.insert(Cell::new(c.x0, map_a[c.y0], c.x1, map_a[c.y1]), sq.clone());
    }
    for (c, sq) in &b.cell_labels {
        cell_labels.insert(Cell::new(c.x0 + wa, map_b[c.y0], c.x1 + wa, map_b[c.y1]), sq.clone());
    }

    Ok(Arrangement { subdivision, vertex_labels, hor_labels, ver_labels, cell_labels })
}

/// A materialized free double category with the decoded square values.
#[derive(Clone, Debug)]
pub struct FreeDoubleCategory {
    pub double: DoubleCategory,
    pub values: BTreeMap<SqId, FreeSquare>,
}

/// The result of [`free_double_category`]: fully materialized when the
/// square closure saturates within budget, otherwise the lazy presentation.
#[derive(Clone, Debug)]
pub enum FreeDouble {
    Materialized(FreeDoubleCategory),
    Lazy(FreePresentation),
}

impl FreeDouble {
    pub fn materialized(&self) -> Option<&FreeDoubleCategory> {
        match self {
            FreeDouble::Materialized(m) => Some(m),
            FreeDouble::Lazy(_) => None,
        }
    }

    pub fn is_materialized(&self) -> bool {
        matches!(self, FreeDouble::Materialized(_))
    }
}

/// The free double category on a derivation scheme. The 1-categories are
/// kept; squares are the closure of the units and generator tiles under
/// both compositions. If the closure outgrows the budget, the lazy
/// presentation is returned instead of a table.
pub fn free_double_category(
    s: &DoubleDerivationScheme,
    budget: &Budget,
) -> Result<FreeDouble, UnrepresentableComposite> {
    let pres = FreePresentation::new(s.clone(), *budget);
    let mut values: BTreeMap<SqId, FreeSquare> = BTreeMap::new();
    for u in pres.unit_squares() {
        values.insert(u.canonical_id(), u);
    }
    for g in pres.generators() {
        values.insert(g.canonical_id(), g);
    }
    if values.len() > budget.max_squares {
        return Ok(FreeDouble::Lazy(pres));
    }

    let mut beside_tab: BTreeMap<(SqId, SqId), SqId> = BTreeMap::new();
    let mut stack_tab: BTreeMap<(SqId, SqId), SqId> = BTreeMap::new();
    loop {
        let ids: Vec<SqId> = values.keys().cloned().collect();
        let mut fresh: BTreeMap<SqId, FreeSquare> = BTreeMap::new();
        for a in &ids {
            for b in &ids {
                for stacked in [false, true] {
                    let tab = if stacked { &mut stack_tab } else { &mut beside_tab };
                    if tab.contains_key(&(a.clone(), b.clone())) {
                        continue;
                    }
                    let composed = if stacked {
                        pres.stack(&values[a], &values[b])
                    } else {
                        pres.beside(&values[a], &values[b])
                    };
                    match composed {
                        Ok(None) => {}
                        Ok(Some(c)) => {
                            let cid = c.canonical_id();
                            tab.insert((a.clone(), b.clone()), cid.clone());
                            if !values.contains_key(&cid) {
                                fresh.insert(cid, c);
                            }
                        }
                        Err(FreeComposeError::Budget(_)) => return Ok(FreeDouble::Lazy(pres)),
                        Err(FreeComposeError::Unrepresentable(e)) => return Err(e),
                    }
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        values.append(&mut fresh);
        if values.len() > budget.max_squares {
            return Ok(FreeDouble::Lazy(pres));
        }
    }

    let mut double = DoubleCategory::new();
    double.set_hor_cat(s.hor_cat.clone());
    double.set_ver_cat(s.ver_cat.clone());
    for (id, value) in &values {
        double.add_square(id.clone(), value.boundary(s).expect("closure squares are bounded"));
    }
    for (v, _) in s.ver_cat.morphisms() {
        double.set_hor_unit(v.clone(), FreeSquare::hor_unit(s, v).canonical_id());
    }
    for (f, _) in s.hor_cat.morphisms() {
        double.set_ver_unit(f.clone(), FreeSquare::ver_unit(f).canonical_id());
    }
    for ((a, b), c) in beside_tab {
        double.set_beside(a, b, c);
    }
    for ((a, b), c) in stack_tab {
        double.set_stack(a, b, c);
    }
    Ok(FreeDouble::Materialized(FreeDoubleCategory { double, values }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::enumerate::{double_functors_between, functors_between};
    use crate::core::ops::{commutative_squares, external_product};

    fn graph(objects: &[&str], edges: &[(&str, &str, &str)]) -> ReflexiveGraph {
        let mut g = ReflexiveGraph::default();
        for o in objects {
            g.objects.insert((*o).into());
            let id = MorId(format!("1{o}"));
            g.edges.insert(id.clone(), Hom::new(*o, *o));
            g.id_edge.insert((*o).into(), id);
        }
        for (e, src, tgt) in edges {
            g.edges.insert((*e).into(), Hom::new(*src, *tgt));
        }
        g
    }

    #[test]
    fn free_category_on_a_single_edge() {
        let g = graph(&["a", "b"], &[("e", "a", "b")]);
        g.validate().unwrap();
        let cat = free_category(&g, &Budget::default()).unwrap();
        cat.validate().unwrap();
        assert_eq!(cat.morphism_count(), 3);
        assert_eq!(cat.then(&"1a".into(), &"e".into()), Some(&"e".into()));
    }

    #[test]
    fn free_category_on_a_two_step_path() {
        let g = graph(&["a", "b", "c"], &[("e1", "a", "b"), ("e2", "b", "c")]);
        let cat = free_category(&g, &Budget::default()).unwrap();
        cat.validate().unwrap();
        assert_eq!(cat.morphism_count(), 6);
        assert_eq!(cat.then(&"e1".into(), &"e2".into()), Some(&"e1*e2".into()));
    }

    #[test]
    fn free_category_detects_a_self_loop() {
        let g = graph(&["a"], &[("e", "a", "a")]);
        assert_eq!(
            free_category(&g, &Budget::default()),
            Err(FreeCatError::Infinite { through: "a".into() })
        );
    }

    #[test]
    fn free_category_respects_the_path_budget() {
        let g = graph(&["a", "b", "c"], &[("e1", "a", "b"), ("e2", "b", "c")]);
        let tiny = Budget { max_path: 1, ..Budget::default() };
        assert!(matches!(free_category(&g, &tiny), Err(FreeCatError::Budget(_))));
    }

    #[test]
    fn free_dds_recovers_the_product_categories() {
        let square = external_product(&FinCategory::ordinal(1), &FinCategory::ordinal(1));
        let free = free_dds(&square.underlying_graph(), &Budget::default()).unwrap();
        assert_eq!(&free.hor_cat, square.hor_cat());
        assert_eq!(&free.ver_cat, square.ver_cat());
        assert_eq!(free.squares.len(), square.square_count());
    }

    #[test]
    fn free_dds_rejects_a_vertical_loop() {
        let mut g =
            external_product(&FinCategory::ordinal(1), &FinCategory::ordinal(1)).underlying_graph();
        g.squares.clear();
        g.ver_edges.insert("loop".into(), Hom::new("(0,0)", "(0,0)"));
        assert!(matches!(free_dds(&g, &Budget::default()), Err(FreeCatError::Infinite { .. })));
    }

    #[test]
    fn closure_of_a_triangle_relation() {
        let g = graph(&["a", "b", "c"], &[("f", "a", "b"), ("g", "b", "c"), ("h", "a", "c")]);
        let cat = free_category(&g, &Budget::default()).unwrap();
        assert_eq!(cat.morphism_count(), 7);
        let cong = congruence_closure_cat(&cat, &[("f*g".into(), "h".into())]).unwrap();
        cong.validate(&cat).unwrap();
        let classes = cong.classes();
        assert_eq!(classes.len(), 6);
        assert_eq!(classes[&cong.rep(&"h".into())], BTreeSet::from(["f*g".into(), "h".into()]));
    }

    #[test]
    fn closure_rejects_non_parallel_pairs() {
        let cat = FinCategory::ordinal(2);
        assert_eq!(
            congruence_closure_cat(&cat, &[("0<=1".into(), "1<=2".into())]),
            Err(CongruenceError::NotParallel { a: "0<=1".into(), b: "1<=2".into() })
        );
    }

    #[test]
    fn empty_generators_give_the_discrete_congruence() {
        let cat = FinCategory::ordinal(2);
        let cong = congruence_closure_cat(&cat, &[]).unwrap();
        assert_eq!(cong, CatCongruence::discrete(&cat));
        cong.validate(&cat).unwrap();
    }

    /// One object, morphisms 1a, e, e2, e3 with e^i e^j = e^min(i+j,3): a
    /// finite stand-in for the free monoid on one generator.
    fn clamped_monoid() -> FinCategory {
        let mut cat = FinCategory::new();
        cat.add_object("a");
        for m in ["1a", "e", "e2", "e3"] {
            cat.add_morphism(m, "a", "a");
        }
        cat.set_identity("a", "1a");
        let power = |i: usize| ["1a", "e", "e2", "e3"][i.min(3)];
        for i in 0..4 {
            for j in 0..4 {
                cat.set_then(power(i), power(j), power(i + j));
            }
        }
        cat.validate().unwrap();
        cat
    }

    #[test]
    fn quotient_collapses_the_clamped_powers() {
        let cat = clamped_monoid();
        let cong = congruence_closure_cat(&cat, &[("e2".into(), "e".into())]).unwrap();
        let q = quotient_category(&cat, &cong).unwrap();
        q.validate().unwrap();
        assert_eq!(q.morphism_count(), 2);
        assert_eq!(q.then(&"e".into(), &"e".into()), Some(&"e".into()));
        let proj = quotient_projection(&cat, &cong).unwrap();
        proj.validate().unwrap();
    }

    #[test]
    fn identity_congruence_quotient_is_the_same_category() {
        let cat = FinCategory::ordinal(2);
        let q = quotient_category(&cat, &CatCongruence::discrete(&cat)).unwrap();
        assert_eq!(q, cat);
    }

    /// A scheme with one generator square, or two parallel ones when
    /// `parallel`: f, g horizontal, u, v vertical, sigma (and tau) between.
    fn generator_scheme(parallel: bool) -> DoubleDerivationScheme {
        let hc = free_category(
            &graph(&["A", "B", "C", "D"], &[("f", "A", "B"), ("g", "C", "D")]),
            &Budget::default(),
        )
        .unwrap();
        let vc = free_category(
            &graph(&["A", "B", "C", "D"], &[("u", "A", "C"), ("v", "B", "D")]),
            &Budget::default(),
        )
        .unwrap();
        let mut squares: BTreeMap<SqId, SquareBoundary> = BTreeMap::new();
        squares.insert("sigma".into(), SquareBoundary::new("f", "g", "u", "v"));
        if parallel {
            squares.insert("tau".into(), SquareBoundary::new("f", "g", "u", "v"));
        }
        DoubleDerivationScheme { hor_cat: hc, ver_cat: vc, squares }
    }

    #[test]
    fn free_double_category_on_one_generator() {
        let scheme = generator_scheme(false);
        let free = free_double_category(&scheme, &Budget::default()).unwrap();
        let free = free.materialized().expect("closure saturates");
        free.double.validate().unwrap();
        // IdV on the 6 horizontal morphisms, IdH on u and v, one tile.
        assert_eq!(free.double.square_count(), 9);
        assert_eq!(free.values.values().filter(|v| !v.is_identity()).count(), 1);
    }

    #[test]
    fn free_double_category_with_no_generators_is_all_units() {
        let mut scheme = generator_scheme(false);
        scheme.squares.clear();
        let free = free_double_category(&scheme, &Budget::default()).unwrap();
        let free = free.materialized().expect("closure saturates");
        free.double.validate().unwrap();
        assert!(free.values.values().all(FreeSquare::is_identity));
    }

    #[test]
    fn square_congruence_merges_parallel_generators() {
        let scheme = generator_scheme(true);
        let free = free_double_category(&scheme, &Budget::default()).unwrap();
        let free = free.materialized().expect("closure saturates");
        free.double.validate().unwrap();
        let sigma = FreeSquare::generator(&scheme, &"sigma".into()).unwrap().canonical_id();
        let tau = FreeSquare::generator(&scheme, &"tau".into()).unwrap().canonical_id();
        let cong = congruence_closure_dbl(&free.double, &[(sigma, tau)]).unwrap();
        let q = quotient_double(&free.double, &cong).unwrap();
        q.validate().unwrap();
        assert_eq!(q.square_count(), free.double.square_count() - 1);
        quotient_projection_double(&free.double, &cong).unwrap().validate().unwrap();
    }

    #[test]
    fn identity_square_congruence_is_a_no_op() {
        let d = external_product(&FinCategory::ordinal(1), &FinCategory::ordinal(1));
        let cong = congruence_closure_dbl(&d, &[]).unwrap();
        let q = quotient_double(&d, &cong).unwrap();
        assert_eq!(q, d);
    }

    /// Two horizontally composable generators: sigma from f to g between u
    /// and v, tau from f2 to g2 between v and w.
    fn composable_scheme() -> DoubleDerivationScheme {
        let hc = free_category(
            &graph(
                &["A", "B", "E", "C", "D", "F"],
                &[("f", "A", "B"), ("f2", "B", "E"), ("g", "C", "D"), ("g2", "D", "F")],
            ),
            &Budget::default(),
        )
        .unwrap();
        let vc = free_category(
            &graph(
                &["A", "B", "E", "C", "D", "F"],
                &[("u", "A", "C"), ("v", "B", "D"), ("w", "E", "F")],
            ),
            &Budget::default(),
        )
        .unwrap();
        let squares = BTreeMap::from([
            ("sigma".into(), SquareBoundary::new("f", "g", "u", "v")),
            ("tau".into(), SquareBoundary::new("f2", "g2", "v", "w")),
        ]);
        DoubleDerivationScheme { hor_cat: hc, ver_cat: vc, squares }
    }

    #[test]
    fn free_double_category_closes_a_horizontal_pair() {
        let scheme = composable_scheme();
        let free = free_double_category(&scheme, &Budget::default()).unwrap();
        let free = free.materialized().expect("closure saturates");
        free.double.validate().unwrap();
        let tiles: Vec<&FreeSquare> = free.values.values().filter(|v| !v.is_identity()).collect();
        assert_eq!(tiles.len(), 3);
        let glued = tiles
            .iter()
            .find_map(|v| match v {
                FreeSquare::Tile(a) if a.subdivision.cell_count() == 2 => Some(a),
                _ => None,
            })
            .expect("the pasted tile is materialized");
        glued.validate(&scheme).unwrap();
        assert_eq!(glued.boundary(&scheme).unwrap(), SquareBoundary::new("f*f2", "g*g2", "u", "w"));
    }

    #[test]
    fn three_chain_closure_is_associative() {
        let hc = free_category(
            &graph(
                &["A", "B", "E", "G", "C", "D", "F", "H"],
                &[
                    ("f", "A", "B"),
                    ("f2", "B", "E"),
                    ("f3", "E", "G"),
                    ("g", "C", "D"),
                    ("g2", "D", "F"),
                    ("g3", "F", "H"),
                ],
            ),
            &Budget::default(),
        )
        .unwrap();
        let vc = free_category(
            &graph(
                &["A", "B", "E", "G", "C", "D", "F", "H"],
                &[("u", "A", "C"), ("v", "B", "D"), ("w", "E", "F"), ("x", "G", "H")],
            ),
            &Budget::default(),
        )
        .unwrap();
        let squares = BTreeMap::from([
            ("s1".into(), SquareBoundary::new("f", "g", "u", "v")),
            ("s2".into(), SquareBoundary::new("f2", "g2", "v", "w")),
            ("s3".into(), SquareBoundary::new("f3", "g3", "w", "x")),
        ]);
        let scheme = DoubleDerivationScheme { hor_cat: hc, ver_cat: vc, squares };
        let free = free_double_category(&scheme, &Budget::default()).unwrap();
        let free = free.materialized().expect("closure saturates");
        // The validator checks associativity of the pasting table, which
        // covers (s1 s2) s3 = s1 (s2 s3) on the canonical forms.
        free.double.validate().unwrap();
        assert_eq!(free.values.values().filter(|v| !v.is_identity()).count(), 6);
    }

    /// One object with an idempotent in each direction and a single endo
    /// square: the square closure never saturates.
    fn endo_scheme() -> DoubleDerivationScheme {
        let mut hc = FinCategory::new();
        hc.add_object("A");
        hc.add_morphism("1A", "A", "A");
        hc.add_morphism("f", "A", "A");
        hc.set_identity("A", "1A");
        hc.set_then("f", "f", "f");
        hc.close_identities();
        hc.validate().unwrap();
        let mut vc = FinCategory::new();
        vc.add_object("A");
        vc.add_morphism("1A", "A", "A");
        vc.add_morphism("u", "A", "A");
        vc.set_identity("A", "1A");
        vc.set_then("u", "u", "u");
        vc.close_identities();
        vc.validate().unwrap();
        DoubleDerivationScheme {
            hor_cat: hc,
            ver_cat: vc,
            squares: BTreeMap::from([("sq".into(), SquareBoundary::new("f", "f", "u", "u"))]),
        }
    }

    #[test]
    fn presentation_composes_on_demand_when_lazy() {
        let budget = Budget { max_squares: 16, ..Budget::default() };
        let free = free_double_category(&endo_scheme(), &budget).unwrap();
        let FreeDouble::Lazy(pres) = free else { panic!("closure must not saturate") };
        let gen = &pres.generators()[0];
        let wide = pres.beside(gen, gen).unwrap().expect("composable");
        let FreeSquare::Tile(a) = &wide else { panic!("expected a tile") };
        assert_eq!((a.subdivision.width(), a.subdivision.height()), (2, 1));
        assert!(pres.equal(&wide, &pres.beside(gen, gen).unwrap().unwrap()));
        assert!(!pres.equal(&wide, gen));
        let tall = pres.stack(gen, gen).unwrap().expect("composable");
        let FreeSquare::Tile(t) = &tall else { panic!("expected a tile") };
        assert_eq!((t.subdivision.width(), t.subdivision.height()), (1, 2));
        t.validate(pres.scheme()).unwrap();
    }

    #[test]
    fn unit_padding_on_an_identity_sided_generator_is_unrepresentable() {
        // sigma's right edge is the identity vertical at B, and k: B -> B2
        // is a nonidentity horizontal morphism, so sigma beside the
        // stacking unit of k would need a cell labeled by that unit.
        let hc = free_category(
            &graph(&["A", "B", "B2", "C"], &[("f", "A", "B"), ("g", "C", "B"), ("k", "B", "B2")]),
            &Budget::default(),
        )
        .unwrap();
        let vc =
            free_category(&graph(&["A", "B", "B2", "C"], &[("u", "A", "C")]), &Budget::default())
                .unwrap();
        let scheme = DoubleDerivationScheme {
            hor_cat: hc,
            ver_cat: vc,
            squares: BTreeMap::from([("sigma".into(), SquareBoundary::new("f", "g", "u", "1B"))]),
        };
        let err = free_double_category(&scheme, &Budget::default()).unwrap_err();
        assert_eq!(err, UnrepresentableComposite::IdentityPadding { unit: "k".into() });
    }

    #[test]
    fn free_functors_match_scheme_morphism_counts() {
        // The universal property at desk scale: double functors out of the
        // free object correspond to scheme morphisms into the underlying
        // scheme of the target.
        let scheme = generator_scheme(false);
        let free = free_double_category(&scheme, &Budget::default()).unwrap();
        let free = free.materialized().expect("closure saturates");
        let target = external_product(&FinCategory::ordinal(1), &FinCategory::ordinal(1));
        let functors = double_functors_between(&free.double, &target, 100_000).unwrap();

        let hors = functors_between(&scheme.hor_cat, target.hor_cat(), 100_000).unwrap();
        let vers = functors_between(&scheme.ver_cat, target.ver_cat(), 100_000).unwrap();
        let mut scheme_morphisms = 0usize;
        for h in &hors {
            for v in &vers {
                if scheme.hor_cat.objects().any(|o| h.apply_ob(o) != v.apply_ob(o)) {
                    continue;
                }
                let choices: Vec<usize> = scheme
                    .squares
                    .values()
                    .map(|b| {
                        target
                            .squares()
                            .filter(|(_, tb)| {
                                Some(&tb.top) == h.apply_mor(&b.top)
                                    && Some(&tb.bottom) == h.apply_mor(&b.bottom)
                                    && Some(&tb.left) == v.apply_mor(&b.left)
                                    && Some(&tb.right) == v.apply_mor(&b.right)
                            })
                            .count()
                    })
                    .collect();
                scheme_morphisms += choices.iter().product::<usize>();
            }
        }
        assert_eq!(functors.len(), scheme_morphisms);
        assert!(scheme_morphisms > 0);
    }

    #[test]
    fn interchange_holds_for_a_two_by_two_block() {
        // Generators are the four small cells of the commuting-square
        // double category of [2]x[2], glued rows-first and columns-first.
        let grid = commutative_squares(&FinCategory::ordinal(2).product(&FinCategory::ordinal(2)));
        let scheme = grid.as_scheme();
        let pres = FreePresentation::new(scheme.clone(), Budget::default());
        let find = |top: &str, bottom: &str, left: &str, right: &str| {
            scheme
                .squares
                .iter()
                .find(|(_, b)| {
                    b.top.as_str() == top
                        && b.bottom.as_str() == bottom
                        && b.left.as_str() == left
                        && b.right.as_str() == right
                })
                .map(|(sq, _)| FreeSquare::generator(&scheme, sq).expect("valid scheme"))
                .expect("grid square")
        };
        let ta = find("(0<=1,0<=0)", "(0<=1,1<=1)", "(0<=0,0<=1)", "(1<=1,0<=1)");
        let tb = find("(1<=2,0<=0)", "(1<=2,1<=1)", "(1<=1,0<=1)", "(2<=2,0<=1)");
        let tc = find("(0<=1,1<=1)", "(0<=1,2<=2)", "(0<=0,1<=2)", "(1<=1,1<=2)");
        let td = find("(1<=2,1<=1)", "(1<=2,2<=2)", "(1<=1,1<=2)", "(2<=2,1<=2)");
        let rows_first = {
            let top = pres.beside(&ta, &tb).unwrap().unwrap();
            let bottom = pres.beside(&tc, &td).unwrap().unwrap();
            pres.stack(&top, &bottom).unwrap().unwrap()
        };
        let cols_first = {
            let left = pres.stack(&ta, &tc).unwrap().unwrap();
            let right = pres.stack(&tb, &td).unwrap().unwrap();
            pres.beside(&left, &right).unwrap().unwrap()
        };
        assert!(pres.equal(&rows_first, &cols_first));
        let FreeSquare::Tile(block) = &rows_first else { panic!("expected a tile") };
        assert_eq!(block.subdivision.cell_count(), 4);
        block.validate(&scheme).unwrap();
    }
}
