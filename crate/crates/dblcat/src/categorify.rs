/*! Fundamental categories and fundamental double categories.

Going back from simplicial data to categories: the fundamental category of
a simplicial set is the free category on its points and edges modulo one
relation per triangle, and the fundamental double category of a simplicial
object in categories is the free double category on a derivation scheme
modulo pairwise composition and unit relations. Both are left adjoint to
the corresponding nerve, and [`adjunction_bijection_check`] verifies the
bijection on a concrete pair by exhaustive enumeration.

Only 2-truncated inputs are accepted; higher levels of a nerve carry no
extra information because nerves are 2-coskeletal, and finite truncations
keep everything enumerable.
*/

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;

use thiserror::Error;

use crate::budget::{Budget, BudgetExceeded, Resource};
use crate::construct::{
    congruence_closure_dbl, free_double_category, quotient_projection_double, FreeDouble,
    FreeSquare, UnionFind,
};
use crate::core::category::{FinCategory, FinFunctor};
use crate::core::double::{DoubleCategory, DoubleDerivationScheme, SquareBoundary};
use crate::core::enumerate::{double_functors_between, functors_between};
use crate::core::functor::DoubleFunctor;
use crate::core::ids::{paired, MorId, ObId, SqId};
use crate::core::ops::transpose;
use crate::nerve::{
    check_operator, check_simplicial, discrete_map, horizontal_nerve, NerveError,
    SimplicialTruncation,
};

/// A 2-truncated simplicial set: points, edges, and triangles with their
/// face and degeneracy maps. Edge faces are `[d0, d1]` (target, source);
/// triangle faces are `[d0, d1, d2]` (second leg, long edge, first leg).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SSet2Trunc {
    pub points: BTreeSet<String>,
    pub edges: BTreeSet<String>,
    pub triangles: BTreeSet<String>,
    pub edge_faces: [BTreeMap<String, String>; 2],
    pub triangle_faces: [BTreeMap<String, String>; 3],
    pub point_degeneracy: BTreeMap<String, String>,
    pub edge_degeneracies: [BTreeMap<String, String>; 2],
}

/// A 2-truncated simplicial object in categories. Level 1 is the category
/// whose objects are the edges; its morphisms become the squares of the
/// fundamental double category.
#[derive(Clone, Debug, PartialEq)]
pub struct SCat2Trunc {
    pub level0: FinCategory,
    pub level1: FinCategory,
    pub level2: FinCategory,
    pub edge_faces: [FinFunctor; 2],
    pub triangle_faces: [FinFunctor; 3],
    pub point_degeneracy: FinFunctor,
    pub edge_degeneracies: [FinFunctor; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CategorifyError {
    #[error("invalid input: {detail}")]
    Invalid { detail: String },
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("free construction cannot represent a composite: {detail}")]
    Unrepresentable { detail: String },
    #[error("congruence construction failed: {detail}")]
    Congruence { detail: String },
    #[error("saturation certificate failed: {detail}")]
    Certificate { detail: String },
}

fn join<E: Display>(errs: &[E]) -> String {
    errs.iter().map(E::to_string).collect::<Vec<_>>().join("; ")
}

impl SSet2Trunc {
    /// The name this module gives the degenerate edge on a point.
    pub fn degenerate_edge_name(p: &str) -> String {
        format!("s0({p})")
    }

    /// Build a truncation from the nondegenerate data: named edges between
    /// points, and named triangles `(name, first, second, composite)`
    /// referring to edges by name. All degeneracies are generated.
    pub fn from_graph(
        points: Vec<String>,
        edges: Vec<(String, String, String)>,
        triangles: Vec<(String, String, String, String)>,
    ) -> SSet2Trunc {
        let mut x = SSet2Trunc::default();
        for p in points {
            let e = Self::degenerate_edge_name(&p);
            x.edges.insert(e.clone());
            x.edge_faces[0].insert(e.clone(), p.clone());
            x.edge_faces[1].insert(e.clone(), p.clone());
            x.point_degeneracy.insert(p.clone(), e);
            x.points.insert(p);
        }
        for (e, src, tgt) in edges {
            x.edge_faces[0].insert(e.clone(), tgt);
            x.edge_faces[1].insert(e.clone(), src);
            x.edges.insert(e);
        }
        // One degenerate triangle per degeneracy image; the two images of a
        // degenerate edge coincide.
        let all: Vec<String> = x.edges.iter().cloned().collect();
        for e in &all {
            let src = x.edge_faces[1][e].clone();
            let tgt = x.edge_faces[0][e].clone();
            let degenerate = x.point_degeneracy.values().any(|d| d == e);
            let s0 = format!("s0({e})");
            x.triangles.insert(s0.clone());
            x.triangle_faces[0].insert(s0.clone(), e.clone());
            x.triangle_faces[1].insert(s0.clone(), e.clone());
            x.triangle_faces[2].insert(s0.clone(), Self::degenerate_edge_name(&src));
            x.edge_degeneracies[0].insert(e.clone(), s0.clone());
            if degenerate {
                x.edge_degeneracies[1].insert(e.clone(), s0);
            } else {
                let s1 = format!("s1({e})");
                x.triangles.insert(s1.clone());
                x.triangle_faces[0].insert(s1.clone(), Self::degenerate_edge_name(&tgt));
                x.triangle_faces[1].insert(s1.clone(), e.clone());
                x.triangle_faces[2].insert(s1.clone(), e.clone());
                x.edge_degeneracies[1].insert(e.clone(), s1);
            }
        }
        for (t, first, second, composite) in triangles {
            x.triangle_faces[0].insert(t.clone(), second);
            x.triangle_faces[1].insert(t.clone(), composite);
            x.triangle_faces[2].insert(t.clone(), first);
            x.triangles.insert(t);
        }
        x
    }

    /// The truncation with no nondegenerate simplices.
    pub fn discrete<I: IntoIterator<Item = S>, S: Into<String>>(points: I) -> SSet2Trunc {
        Self::from_graph(points.into_iter().map(Into::into).collect(), Vec::new(), Vec::new())
    }

    /// The 2-truncated `n`-simplex: points `0..=n`, an edge `(i,j)` per
    /// `i < j`, a triangle `(i,j,k)` per `i < j < k`.
    pub fn simplex(n: usize) -> SSet2Trunc {
        let points = (0..=n).map(|i| i.to_string()).collect();
        let edge = |i: usize, j: usize| paired(&i.to_string(), &j.to_string());
        let mut edges = Vec::new();
        for i in 0..=n {
            for j in (i + 1)..=n {
                edges.push((edge(i, j), i.to_string(), j.to_string()));
            }
        }
        let mut triangles = Vec::new();
        for i in 0..=n {
            for j in (i + 1)..=n {
                for k in (j + 1)..=n {
                    triangles.push((
                        format!("({i},{j},{k})"),
                        edge(i, j),
                        edge(j, k),
                        edge(i, k),
                    ));
                }
            }
        }
        Self::from_graph(points, edges, triangles)
    }

    /// The 2-truncation of the nerve of a category: edges are the
    /// nonidentity morphisms, triangles the composable nonidentity pairs.
    pub fn nerve_truncation(c: &FinCategory) -> SSet2Trunc {
        let edge_ref = |m: &MorId| -> String {
            if c.is_identity(m) {
                Self::degenerate_edge_name(&c.src(m).expect("valid morphism").0)
            } else {
                m.0.clone()
            }
        };
        let points = c.objects().map(|o| o.0.clone()).collect();
        let edges = c
            .mor_ids()
            .filter(|m| !c.is_identity(m))
            .map(|m| {
                (
                    m.0.clone(),
                    c.src(m).expect("valid morphism").0.clone(),
                    c.tgt(m).expect("valid morphism").0.clone(),
                )
            })
            .collect();
        let mut triangles = Vec::new();
        for (f, g) in c.composable_pairs() {
            if c.is_identity(&f) || c.is_identity(&g) {
                continue;
            }
            let h = c.then(&f, &g).expect("composable pair");
            triangles.push((format!("{f}|{g}"), f.0.clone(), g.0.clone(), edge_ref(h)));
        }
        Self::from_graph(points, edges, triangles)
    }

    /// Check totality of the operators and the simplicial identities.
    pub fn validate(&self) -> Result<(), Vec<CategorifyError>> {
        let mut errs = Vec::new();
        let mut bad = |detail: String| {
            errs.push(CategorifyError::Invalid { detail });
        };
        let lookup = |map: &BTreeMap<String, String>,
                      key: &String,
                      name: &str,
                      errs: &mut Vec<CategorifyError>|
         -> Option<String> {
            let v = map.get(key);
            if v.is_none() {
                errs.push(CategorifyError::Invalid { detail: format!("{name} misses {key}") });
            }
            v.cloned()
        };
        for e in &self.edges {
            for (i, m) in self.edge_faces.iter().enumerate() {
                if let Some(v) = lookup(m, e, &format!("edge face d{i}"), &mut errs) {
                    if !self.points.contains(&v) {
                        bad(format!("edge face d{i} of {e} leaves the point set"));
                    }
                }
            }
        }
        for t in &self.triangles {
            let mut fs = Vec::new();
            for (i, m) in self.triangle_faces.iter().enumerate() {
                let v = lookup(m, t, &format!("triangle face d{i}"), &mut errs);
                if let Some(v) = &v {
                    if !self.edges.contains(v) {
                        bad(format!("triangle face d{i} of {t} leaves the edge set"));
                    }
                }
                fs.push(v);
            }
            if let [Some(f0), Some(f1), Some(f2)] = &fs[..] {
                let end = |i: usize, e: &String| self.edge_faces[i].get(e).cloned();
                // Faces of faces: the three vertex agreements of a triangle.
                if end(0, f1) != end(0, f0) {
                    bad(format!("vertex 2 of triangle {t} is inconsistent"));
                }
                if end(1, f1) != end(1, f2) {
                    bad(format!("vertex 0 of triangle {t} is inconsistent"));
                }
                if end(0, f2) != end(1, f0) {
                    bad(format!("vertex 1 of triangle {t} is inconsistent"));
                }
            }
        }
        for p in &self.points {
            if let Some(e) = lookup(&self.point_degeneracy, p, "point degeneracy", &mut errs) {
                if self.edge_faces[0].get(&e) != Some(p) || self.edge_faces[1].get(&e) != Some(p) {
                    bad(format!("degenerate edge on {p} has wrong endpoints"));
                }
            }
        }
        for e in &self.edges {
            let s0 = lookup(&self.edge_degeneracies[0], e, "edge degeneracy s0", &mut errs);
            let s1 = lookup(&self.edge_degeneracies[1], e, "edge degeneracy s1", &mut errs);
            let face = |t: &String, i: usize| self.triangle_faces[i].get(t).cloned();
            let degenerate = |i: usize| {
                self.edge_faces[i]
                    .get(e)
                    .and_then(|p| self.point_degeneracy.get(p))
                    .cloned()
            };
            if let Some(t) = &s0 {
                if face(t, 0) != Some(e.clone()) || face(t, 1) != Some(e.clone()) {
                    bad(format!("s0 of edge {e} has wrong outer faces"));
                }
                if face(t, 2) != degenerate(1) {
                    bad(format!("s0 of edge {e} has wrong first leg"));
                }
            }
            if let Some(t) = &s1 {
                if face(t, 1) != Some(e.clone()) || face(t, 2) != Some(e.clone()) {
                    bad(format!("s1 of edge {e} has wrong outer faces"));
                }
                if face(t, 0) != degenerate(0) {
                    bad(format!("s1 of edge {e} has wrong second leg"));
                }
            }
        }
        for p in &self.points {
            if let Some(e) = self.point_degeneracy.get(p) {
                if self.edge_degeneracies[0].get(e) != self.edge_degeneracies[1].get(e) {
                    bad(format!("the two degeneracies of the degenerate edge on {p} differ"));
                }
            }
        }
        if errs.is_empty() { Ok(()) } else { Err(errs) }
    }
}

impl SCat2Trunc {
    /// The truncation with empty levels.
    pub fn empty() -> SCat2Trunc {
        let c = FinCategory::new();
        let f = || FinFunctor::new(c.clone(), c.clone(), BTreeMap::new(), BTreeMap::new());
        SCat2Trunc {
            level0: c.clone(),
            level1: c.clone(),
            level2: c,
            edge_faces: [f(), f()],
            triangle_faces: [f(), f(), f()],
            point_degeneracy: f(),
            edge_degeneracies: [f(), f()],
        }
    }

    /// A set-valued truncation, viewed with discrete level categories.
    pub fn from_sset(x: &SSet2Trunc) -> SCat2Trunc {
        let level0 = FinCategory::discrete(x.points.iter().cloned());
        let level1 = FinCategory::discrete(x.edges.iter().cloned());
        let level2 = FinCategory::discrete(x.triangles.iter().cloned());
        let lift = |m: &BTreeMap<String, String>, src: &FinCategory, tgt: &FinCategory| {
            discrete_map(
                src,
                tgt,
                m.iter().map(|(a, b)| (ObId(a.clone()), ObId(b.clone()))).collect(),
            )
        };
        SCat2Trunc {
            edge_faces: [
                lift(&x.edge_faces[0], &level1, &level0),
                lift(&x.edge_faces[1], &level1, &level0),
            ],
            triangle_faces: [
                lift(&x.triangle_faces[0], &level2, &level1),
                lift(&x.triangle_faces[1], &level2, &level1),
                lift(&x.triangle_faces[2], &level2, &level1),
            ],
            point_degeneracy: lift(&x.point_degeneracy, &level0, &level1),
            edge_degeneracies: [
                lift(&x.edge_degeneracies[0], &level1, &level2),
                lift(&x.edge_degeneracies[1], &level1, &level2),
            ],
            level0,
            level1,
            level2,
        }
    }

    /// The constant simplicial object on a category: every level is the
    /// category, every operator the identity.
    pub fn constant(a: &FinCategory) -> SCat2Trunc {
        let f = || FinFunctor::identity(a);
        SCat2Trunc {
            level0: a.clone(),
            level1: a.clone(),
            level2: a.clone(),
            edge_faces: [f(), f()],
            triangle_faces: [f(), f(), f()],
            point_degeneracy: f(),
            edge_degeneracies: [f(), f()],
        }
    }

    /// The levelwise product of two truncations.
    pub fn product(x: &SCat2Trunc, y: &SCat2Trunc) -> SCat2Trunc {
        let level0 = x.level0.product(&y.level0);
        let level1 = x.level1.product(&y.level1);
        let level2 = x.level2.product(&y.level2);
        let prod = |f: &FinFunctor, g: &FinFunctor, src: &FinCategory, tgt: &FinCategory| {
            product_functor(f, g, src, tgt)
        };
        SCat2Trunc {
            edge_faces: [
                prod(&x.edge_faces[0], &y.edge_faces[0], &level1, &level0),
                prod(&x.edge_faces[1], &y.edge_faces[1], &level1, &level0),
            ],
            triangle_faces: [
                prod(&x.triangle_faces[0], &y.triangle_faces[0], &level2, &level1),
                prod(&x.triangle_faces[1], &y.triangle_faces[1], &level2, &level1),
                prod(&x.triangle_faces[2], &y.triangle_faces[2], &level2, &level1),
            ],
            point_degeneracy: prod(&x.point_degeneracy, &y.point_degeneracy, &level0, &level1),
            edge_degeneracies: [
                prod(&x.edge_degeneracies[0], &y.edge_degeneracies[0], &level1, &level2),
                prod(&x.edge_degeneracies[1], &y.edge_degeneracies[1], &level1, &level2),
            ],
            level0,
            level1,
            level2,
        }
    }

    /// The bottom three levels of a materialized simplicial truncation.
    pub fn from_simplicial(t: &SimplicialTruncation) -> Option<SCat2Trunc> {
        if t.max_level < 2 {
            return None;
        }
        Some(SCat2Trunc {
            level0: t.level(0)?.clone(),
            level1: t.level(1)?.clone(),
            level2: t.level(2)?.clone(),
            edge_faces: [t.face(1, 0)?.clone(), t.face(1, 1)?.clone()],
            triangle_faces: [t.face(2, 0)?.clone(), t.face(2, 1)?.clone(), t.face(2, 2)?.clone()],
            point_degeneracy: t.degeneracy(0, 0)?.clone(),
            edge_degeneracies: [t.degeneracy(1, 0)?.clone(), t.degeneracy(1, 1)?.clone()],
        })
    }

    /// The simplicial set of objects, which alone determines the
    /// horizontal 1-category of the fundamental double category.
    pub fn objects_sset(&self) -> SSet2Trunc {
        let strings = |c: &FinCategory| c.objects().map(|o| o.0.clone()).collect();
        let table = |f: &FinFunctor| {
            f.ob_map().iter().map(|(a, b)| (a.0.clone(), b.0.clone())).collect()
        };
        SSet2Trunc {
            points: strings(&self.level0),
            edges: strings(&self.level1),
            triangles: strings(&self.level2),
            edge_faces: [table(&self.edge_faces[0]), table(&self.edge_faces[1])],
            triangle_faces: [
                table(&self.triangle_faces[0]),
                table(&self.triangle_faces[1]),
                table(&self.triangle_faces[2]),
            ],
            point_degeneracy: table(&self.point_degeneracy),
            edge_degeneracies: [
                table(&self.edge_degeneracies[0]),
                table(&self.edge_degeneracies[1]),
            ],
        }
    }

    /// Check operator endpoints and the simplicial identities, as functor
    /// equalities.
    pub fn validate(&self) -> Result<(), Vec<CategorifyError>> {
        let mut nerrs: Vec<NerveError> = Vec::new();
        for (i, f) in self.edge_faces.iter().enumerate() {
            check_operator(Some(f), &self.level1, &self.level0, &format!("d_{i} at level 1"), &mut nerrs);
        }
        for (i, f) in self.triangle_faces.iter().enumerate() {
            check_operator(Some(f), &self.level2, &self.level1, &format!("d_{i} at level 2"), &mut nerrs);
        }
        check_operator(Some(&self.point_degeneracy), &self.level0, &self.level1, "s_0 at level 0", &mut nerrs);
        for (i, f) in self.edge_degeneracies.iter().enumerate() {
            check_operator(Some(f), &self.level1, &self.level2, &format!("s_{i} at level 1"), &mut nerrs);
        }
        if nerrs.is_empty() {
            check_simplicial(
                2,
                &|k, i| match k {
                    1 => self.edge_faces.get(i),
                    2 => self.triangle_faces.get(i),
                    _ => None,
                },
                &|k, i| match k {
                    0 if i == 0 => Some(&self.point_degeneracy),
                    1 => self.edge_degeneracies.get(i),
                    _ => None,
                },
                &|k| match k {
                    0 => Some(&self.level0),
                    1 => Some(&self.level1),
                    2 => Some(&self.level2),
                    _ => None,
                },
                "",
                &mut nerrs,
            );
        }
        if nerrs.is_empty() {
            Ok(())
        } else {
            Err(nerrs
                .into_iter()
                .map(|e| CategorifyError::Invalid { detail: e.to_string() })
                .collect())
        }
    }
}

fn product_functor(
    f: &FinFunctor,
    g: &FinFunctor,
    src: &FinCategory,
    tgt: &FinCategory,
) -> FinFunctor {
    let mut ob_map = BTreeMap::new();
    for a in f.source().objects() {
        for b in g.source().objects() {
            let fa = f.apply_ob(a).expect("total functor");
            let gb = g.apply_ob(b).expect("total functor");
            ob_map.insert(ObId(paired(&a.0, &b.0)), ObId(paired(&fa.0, &gb.0)));
        }
    }
    let mut mor_map = BTreeMap::new();
    for a in f.source().mor_ids() {
        for b in g.source().mor_ids() {
            let fa = f.apply_mor(a).expect("total functor");
            let gb = g.apply_mor(b).expect("total functor");
            mor_map.insert(MorId(paired(&a.0, &b.0)), MorId(paired(&fa.0, &gb.0)));
        }
    }
    FinFunctor::new(src.clone(), tgt.clone(), ob_map, mor_map)
}

// ---------------------------------------------------------------------------
// The fundamental category: word classes under the triangle congruence.

/// A composable word of nondegenerate edges, with endpoints. The empty word
/// at a point stands for its identity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Word {
    src: String,
    tgt: String,
    letters: Vec<String>,
}

fn concat(a: &Word, b: &Word) -> Word {
    let mut letters = a.letters.clone();
    letters.extend(b.letters.iter().cloned());
    Word { src: a.src.clone(), tgt: b.tgt.clone(), letters }
}

struct WordEngine {
    src_of: BTreeMap<String, String>,
    tgt_of: BTreeMap<String, String>,
    degenerate_point: BTreeMap<String, String>,
    known: BTreeSet<Word>,
    uf: UnionFind<Word>,
}

impl WordEngine {
    fn new(x: &SSet2Trunc) -> WordEngine {
        let mut e = WordEngine {
            src_of: x.edge_faces[1].clone(),
            tgt_of: x.edge_faces[0].clone(),
            degenerate_point: x.point_degeneracy.iter().map(|(p, d)| (d.clone(), p.clone())).collect(),
            known: BTreeSet::new(),
            uf: UnionFind::new(),
        };
        for p in &x.points {
            e.admit(Word { src: p.clone(), tgt: p.clone(), letters: Vec::new() });
        }
        for edge in &x.edges {
            let w = e.word_of_edge(edge);
            e.admit(w);
        }
        e
    }

    fn admit(&mut self, w: Word) -> bool {
        if self.known.insert(w.clone()) {
            self.uf.insert(w);
            true
        } else {
            false
        }
    }

    fn word_of_edge(&self, edge: &str) -> Word {
        if let Some(p) = self.degenerate_point.get(edge) {
            Word { src: p.clone(), tgt: p.clone(), letters: Vec::new() }
        } else {
            Word {
                src: self.src_of[edge].clone(),
                tgt: self.tgt_of[edge].clone(),
                letters: vec![edge.to_string()],
            }
        }
    }

    fn seed_relations(&mut self, x: &SSet2Trunc) {
        for t in &x.triangles {
            let first = self.word_of_edge(&x.triangle_faces[2][t]);
            let second = self.word_of_edge(&x.triangle_faces[0][t]);
            let long = self.word_of_edge(&x.triangle_faces[1][t]);
            let w = concat(&first, &second);
            self.admit(w.clone());
            self.uf.union(&w, &long);
        }
    }

    /// The point a word passes through after its first `k` letters.
    fn cut_point(&self, w: &Word, k: usize) -> String {
        if k == 0 {
            w.src.clone()
        } else if k == w.letters.len() {
            w.tgt.clone()
        } else {
            self.src_of[&w.letters[k]].clone()
        }
    }

    /// Merge words congruent through some decomposition into known parts;
    /// repeat until stable. Returns whether anything merged.
    fn merge_to_fixpoint(&mut self) -> bool {
        let mut any = false;
        loop {
            let classes = self.uf.classes();
            let mut class_of: BTreeMap<&Word, usize> = BTreeMap::new();
            for (i, c) in classes.iter().enumerate() {
                for w in c {
                    class_of.insert(w, i);
                }
            }
            let mut buckets: BTreeMap<(usize, usize), Vec<&Word>> = BTreeMap::new();
            for w in &self.known {
                for k in 0..=w.letters.len() {
                    let mid = self.cut_point(w, k);
                    let u = Word { src: w.src.clone(), tgt: mid.clone(), letters: w.letters[..k].to_vec() };
                    let v = Word { src: mid, tgt: w.tgt.clone(), letters: w.letters[k..].to_vec() };
                    let (Some(&cu), Some(&cv)) = (class_of.get(&u), class_of.get(&v)) else {
                        continue;
                    };
                    buckets.entry((cu, cv)).or_default().push(w);
                }
            }
            let mut merged = false;
            for group in buckets.values() {
                for pair in group.windows(2) {
                    if self.uf.union(pair[0], pair[1]) {
                        merged = true;
                    }
                }
            }
            if !merged {
                break;
            }
            any = true;
        }
        any
    }

    fn least(class: &BTreeSet<Word>) -> Word {
        class
            .iter()
            .min_by_key(|w| (w.letters.len(), w.letters.clone()))
            .expect("classes are nonempty")
            .clone()
    }

    /// Extend the universe by composites of class representatives. Returns
    /// whether anything new appeared.
    fn grow(&mut self, budget: &Budget) -> Result<bool, BudgetExceeded> {
        let reps: Vec<Word> = self.uf.classes().iter().map(Self::least).collect();
        let mut grew = false;
        for a in &reps {
            for b in &reps {
                if a.tgt != b.src {
                    continue;
                }
                let w = concat(a, b);
                budget.charge_path(w.letters.len(), "categorification word length")?;
                if self.admit(w) {
                    grew = true;
                }
            }
        }
        budget.charge_squares(self.known.len(), "categorification word closure")?;
        Ok(grew)
    }

    fn finish(
        mut self,
        x: &SSet2Trunc,
    ) -> Result<(FinCategory, BTreeMap<String, MorId>), CategorifyError> {
        let classes = self.uf.classes();
        let mut class_of: BTreeMap<Word, usize> = BTreeMap::new();
        for (i, c) in &mut classes.iter().enumerate() {
            for w in c {
                class_of.insert(w.clone(), i);
            }
        }
        let reps: Vec<Word> = classes.iter().map(Self::least).collect();
        let name = |w: &Word| -> MorId {
            match w.letters.len() {
                0 => MorId(x.point_degeneracy[&w.src].clone()),
                1 => MorId(w.letters[0].clone()),
                _ => MorId(w.letters.join("*")),
            }
        };
        let names: BTreeSet<MorId> = reps.iter().map(&name).collect();
        if names.len() != reps.len() {
            return Err(CategorifyError::Certificate {
                detail: "edge names collide under the * join".into(),
            });
        }
        let mut cat = FinCategory::new();
        for p in &x.points {
            cat.add_object(p.clone());
        }
        for r in &reps {
            cat.add_morphism(name(r), r.src.clone(), r.tgt.clone());
        }
        for p in &x.points {
            let empty = Word { src: p.clone(), tgt: p.clone(), letters: Vec::new() };
            cat.set_identity(p.clone(), name(&reps[class_of[&empty]]));
        }
        for a in &reps {
            for b in &reps {
                if a.tgt != b.src {
                    continue;
                }
                let w = concat(a, b);
                let k = class_of.get(&w).ok_or_else(|| CategorifyError::Certificate {
                    detail: format!("composite at {} escaped the saturated closure", a.tgt),
                })?;
                cat.set_then(name(a), name(b), name(&reps[*k]));
            }
        }
        cat.validate().map_err(|es| CategorifyError::Certificate { detail: join(&es) })?;
        let mut edge_classes = BTreeMap::new();
        for e in &x.edges {
            let w = self.word_of_edge(e);
            edge_classes.insert(e.clone(), name(&reps[class_of[&w]]));
        }
        Ok((cat, edge_classes))
    }
}

/// The fundamental category together with the class of every edge.
fn fundamental_category_classes(
    x: &SSet2Trunc,
    budget: &Budget,
) -> Result<(FinCategory, BTreeMap<String, MorId>), CategorifyError> {
    x.validate().map_err(|es| CategorifyError::Invalid { detail: join(&es) })?;
    let mut engine = WordEngine::new(x);
    engine.seed_relations(x);
    loop {
        let merged = engine.merge_to_fixpoint();
        let grew = engine.grow(budget)?;
        if !merged && !grew {
            break;
        }
    }
    engine.finish(x)
}

/// The fundamental category of a 2-truncated simplicial set: the free
/// category on its points and nondegenerate edges, modulo one relation
/// `first;second = long edge` per triangle. Saturation is certified by
/// validating the resulting composition table; an unbounded closure stops
/// with a budget error.
pub fn fundamental_category(
    x: &SSet2Trunc,
    budget: &Budget,
) -> Result<FinCategory, CategorifyError> {
    fundamental_category_classes(x, budget).map(|(c, _)| c)
}

// ---------------------------------------------------------------------------
// The fundamental double category.

/// The fundamental double category with the class maps of the generating
/// data: each edge's horizontal morphism and each level-1 morphism's
/// square.
#[derive(Clone, Debug)]
pub struct DoubleCategorification {
    pub double: DoubleCategory,
    pub edge_classes: BTreeMap<ObId, MorId>,
    pub square_classes: BTreeMap<MorId, SqId>,
}

/// The fundamental double category of a 2-truncated simplicial object in
/// categories, with its class maps.
///
/// The vertical 1-category is level 0 and the horizontal 1-category is the
/// fundamental category of the objects. The squares are the free double
/// category on the level-1 morphisms, modulo: stacking agrees with level-1
/// composition, pasting agrees with the triangle faces, horizontal units
/// are the degeneracies of vertical morphisms, and stacking units are the
/// level-1 identities.
pub fn horizontal_categorification(
    x: &SCat2Trunc,
    budget: &Budget,
) -> Result<DoubleCategorification, CategorifyError> {
    x.validate().map_err(|es| CategorifyError::Invalid { detail: join(&es) })?;
    let obj = x.objects_sset();
    let (hor, edge_class_names) = fundamental_category_classes(&obj, budget)?;

    let mut squares = BTreeMap::new();
    for (m, h) in x.level1.morphisms() {
        squares.insert(
            SqId(m.0.clone()),
            SquareBoundary {
                top: edge_class_names[&h.src.0].clone(),
                bottom: edge_class_names[&h.tgt.0].clone(),
                left: x.edge_faces[1].apply_mor(m).expect("validated input").clone(),
                right: x.edge_faces[0].apply_mor(m).expect("validated input").clone(),
            },
        );
    }
    let scheme =
        DoubleDerivationScheme { hor_cat: hor, ver_cat: x.level0.clone(), squares };
    scheme
        .validate()
        .map_err(|es| CategorifyError::Certificate { detail: join(&es) })?;

    let free = free_double_category(&scheme, budget)
        .map_err(|e| CategorifyError::Unrepresentable { detail: e.to_string() })?;
    let free = match free {
        FreeDouble::Materialized(m) => m,
        FreeDouble::Lazy(_) => {
            return Err(CategorifyError::Budget(BudgetExceeded {
                resource: Resource::Squares,
                limit: budget.max_squares,
                context: Some("free square closure before the quotient".into()),
            }))
        }
    };

    let gen = |m: &MorId| -> SqId {
        FreeSquare::generator(&scheme, &SqId(m.0.clone()))
            .expect("every level-1 morphism is a scheme square")
            .canonical_id()
    };
    let mut pairs: Vec<(SqId, SqId)> = Vec::new();
    for (a, b) in x.level1.composable_pairs() {
        let stacked = free.double.stack(&gen(&a), &gen(&b)).expect("materialized closure").clone();
        pairs.push((stacked, gen(x.level1.then(&a, &b).expect("composable pair"))));
    }
    for s in x.level2.mor_ids() {
        let first = gen(x.triangle_faces[2].apply_mor(s).expect("validated input"));
        let second = gen(x.triangle_faces[0].apply_mor(s).expect("validated input"));
        let pasted = free.double.beside(&first, &second).expect("materialized closure").clone();
        pairs.push((pasted, gen(x.triangle_faces[1].apply_mor(s).expect("validated input"))));
    }
    for j in x.level0.mor_ids() {
        let unit = free.double.hor_unit_on(j).expect("total units").clone();
        pairs.push((unit, gen(x.point_degeneracy.apply_mor(j).expect("validated input"))));
    }
    for f in x.level1.objects() {
        let unit = free.double.ver_unit_on(&edge_class_names[&f.0]).expect("total units").clone();
        pairs.push((unit, gen(x.level1.id_of(f).expect("valid category"))));
    }

    let cong = congruence_closure_dbl(&free.double, &pairs)
        .map_err(|e| CategorifyError::Congruence { detail: e.to_string() })?;
    let projection = quotient_projection_double(&free.double, &cong)
        .map_err(|es| CategorifyError::Congruence { detail: join(&es) })?;
    let double = projection.target().clone();
    double.validate().map_err(|es| CategorifyError::Certificate { detail: join(&es) })?;

    let square_classes = x
        .level1
        .mor_ids()
        .map(|m| {
            (m.clone(), projection.apply_sq(&gen(m)).expect("total projection").clone())
        })
        .collect();
    let edge_classes = x
        .level1
        .objects()
        .map(|f| (f.clone(), edge_class_names[&f.0].clone()))
        .collect();
    Ok(DoubleCategorification { double, edge_classes, square_classes })
}

/// The fundamental double category alone.
pub fn fundamental_double_category(
    x: &SCat2Trunc,
    budget: &Budget,
) -> Result<DoubleCategory, CategorifyError> {
    horizontal_categorification(x, budget).map(|c| c.double)
}

/// The vertical counterpart: categorify horizontally, then transpose.
pub fn vertical_categorification(
    x: &SCat2Trunc,
    budget: &Budget,
) -> Result<DoubleCategory, CategorifyError> {
    fundamental_double_category(x, budget).map(|d| transpose(&d))
}

// ---------------------------------------------------------------------------
// The adjunction, checked by enumeration.

/// All morphisms of 2-truncated simplicial objects from `x` into the
/// bottom three levels of `t`: triples of functors commuting with every
/// face and degeneracy.
pub fn truncation_morphisms(
    x: &SCat2Trunc,
    t: &SimplicialTruncation,
    limit: usize,
) -> Result<Vec<[FinFunctor; 3]>, CategorifyError> {
    let missing = || CategorifyError::Invalid { detail: "target truncation lacks levels 0..2".into() };
    let l0 = t.level(0).ok_or_else(missing)?;
    let l1 = t.level(1).ok_or_else(missing)?;
    let l2 = t.level(2).ok_or_else(missing)?;
    let c0 = functors_between(&x.level0, l0, limit)?;
    let c1 = functors_between(&x.level1, l1, limit)?;
    let c2 = functors_between(&x.level2, l2, limit)?;
    let d = [t.face(1, 0).ok_or_else(missing)?, t.face(1, 1).ok_or_else(missing)?];
    let e = [
        t.face(2, 0).ok_or_else(missing)?,
        t.face(2, 1).ok_or_else(missing)?,
        t.face(2, 2).ok_or_else(missing)?,
    ];
    let s0 = t.degeneracy(0, 0).ok_or_else(missing)?;
    let s1 = [t.degeneracy(1, 0).ok_or_else(missing)?, t.degeneracy(1, 1).ok_or_else(missing)?];
    let mut out = Vec::new();
    for g1 in &c1 {
        for g0 in &c0 {
            if (0..2).any(|i| g1.then(d[i]) != x.edge_faces[i].then(g0)) {
                continue;
            }
            if x.point_degeneracy.then(g1) != g0.then(s0) {
                continue;
            }
            for g2 in &c2 {
                if (0..3).any(|i| g2.then(e[i]) != x.triangle_faces[i].then(g1)) {
                    continue;
                }
                if (0..2).any(|i| x.edge_degeneracies[i].then(g2) != g1.then(s1[i])) {
                    continue;
                }
                out.push([g0.clone(), g1.clone(), g2.clone()]);
            }
        }
    }
    Ok(out)
}

/// The restriction of a double functor out of the categorification to a
/// truncation morphism into the horizontal nerve: level 0 is the vertical
/// part, level 1 reads off the classes of edges and squares, level 2 is
/// forced by the faces.
fn restrict_to_truncation(
    x: &SCat2Trunc,
    ch: &DoubleCategorification,
    g: &DoubleFunctor,
    t: &SimplicialTruncation,
) -> [FinFunctor; 3] {
    let g0 = g.ver_part();
    let ob1: BTreeMap<ObId, ObId> = x
        .level1
        .objects()
        .map(|f| {
            let class = &ch.edge_classes[f];
            (f.clone(), ObId(g.apply_hor(class).expect("total functor").0.clone()))
        })
        .collect();
    let mor1: BTreeMap<MorId, MorId> = x
        .level1
        .mor_ids()
        .map(|m| {
            let class = &ch.square_classes[m];
            (m.clone(), MorId(g.apply_sq(class).expect("total functor").0.clone()))
        })
        .collect();
    let g1 = FinFunctor::new(
        x.level1.clone(),
        t.level(1).expect("nerve truncated at 2").clone(),
        ob1.clone(),
        mor1.clone(),
    );
    let ob2 = x
        .level2
        .objects()
        .map(|tau| {
            let first = x.triangle_faces[2].apply_ob(tau).expect("validated input");
            let second = x.triangle_faces[0].apply_ob(tau).expect("validated input");
            (tau.clone(), ObId(format!("{}|{}", ob1[first], ob1[second])))
        })
        .collect();
    let mor2 = x
        .level2
        .mor_ids()
        .map(|s| {
            let first = x.triangle_faces[2].apply_mor(s).expect("validated input");
            let second = x.triangle_faces[0].apply_mor(s).expect("validated input");
            (s.clone(), MorId(format!("{}|{}", mor1[first], mor1[second])))
        })
        .collect();
    let g2 = FinFunctor::new(
        x.level2.clone(),
        t.level(2).expect("nerve truncated at 2").clone(),
        ob2,
        mor2,
    );
    [g0, g1, g2]
}

/// Check that restriction is a bijection between double functors out of
/// the categorification of `x` into `d` and truncation morphisms from `x`
/// into the nerve of `d`. Exhaustive on both sides; false on any failure
/// of the correspondence, an error only when enumeration is impossible.
pub fn adjunction_bijection_check(
    x: &SCat2Trunc,
    d: &DoubleCategory,
    budget: &Budget,
) -> Result<bool, CategorifyError> {
    let ch = horizontal_categorification(x, budget)?;
    let functors = double_functors_between(&ch.double, d, budget.max_squares)?;
    let nerve = horizontal_nerve(d, 2);
    let morphisms = truncation_morphisms(x, &nerve, budget.max_squares)?;
    let restricted: Vec<[FinFunctor; 3]> =
        functors.iter().map(|g| restrict_to_truncation(x, &ch, g, &nerve)).collect();
    if restricted.len() != morphisms.len() {
        return Ok(false);
    }
    for r in &restricted {
        if !morphisms.contains(r) {
            return Ok(false);
        }
    }
    for i in 0..restricted.len() {
        for j in 0..i {
            if restricted[i] == restricted[j] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::iso::{cat_iso_search, double_iso_search};
    use crate::core::ops::{embed_h, embed_v, external_product, terminal};

    fn budget() -> Budget {
        Budget::default()
    }

    #[test]
    fn simplex_truncations_categorify_to_ordinals() {
        for n in 0..=3 {
            let x = SSet2Trunc::simplex(n);
            x.validate().unwrap();
            let c = fundamental_category(&x, &budget()).unwrap();
            assert!(
                cat_iso_search(&c, &FinCategory::ordinal(n)).is_some(),
                "simplex {n} categorifies to the ordinal"
            );
        }
        let c = fundamental_category(&SSet2Trunc::simplex(2), &budget()).unwrap();
        assert_eq!(
            c.then(&"(0,1)".into(), &"(1,2)".into()),
            Some(&"(0,2)".into()),
            "the triangle relation collapses the two-step path"
        );
    }

    #[test]
    fn nerve_truncations_categorify_back() {
        for cat in [FinCategory::ordinal(2), FinCategory::walking_iso()] {
            let x = SSet2Trunc::nerve_truncation(&cat);
            x.validate().unwrap();
            let c = fundamental_category(&x, &budget()).unwrap();
            assert!(cat_iso_search(&c, &cat).is_some());
        }
    }

    #[test]
    fn degenerate_only_input_gives_a_discrete_category() {
        let x = SSet2Trunc::discrete(["a", "b"]);
        let c = fundamental_category(&x, &budget()).unwrap();
        assert_eq!(c.object_count(), 2);
        assert_eq!(c.morphism_count(), 2);
    }

    #[test]
    fn an_unrelated_loop_exceeds_the_budget() {
        let x = SSet2Trunc::from_graph(
            vec!["x".into()],
            vec![("e".into(), "x".into(), "x".into())],
            Vec::new(),
        );
        x.validate().unwrap();
        assert!(matches!(
            fundamental_category(&x, &budget()),
            Err(CategorifyError::Budget(_))
        ));
    }

    #[test]
    fn validation_catches_a_broken_face() {
        let mut x = SSet2Trunc::simplex(2);
        x.edge_faces[0].insert("(0,1)".into(), "9".into());
        assert!(x.validate().is_err());
    }

    #[test]
    fn simplicial_sets_categorify_to_embedded_categories() {
        let x = SCat2Trunc::from_sset(&SSet2Trunc::simplex(2));
        x.validate().unwrap();
        let ch = horizontal_categorification(&x, &budget()).unwrap();
        // No nontrivial squares: one square per horizontal morphism.
        assert_eq!(ch.double.square_count(), ch.double.hor_cat().morphism_count());
        assert_eq!(ch.double.ver_cat().morphism_count(), ch.double.ver_cat().object_count());
        let expected = embed_h(&FinCategory::ordinal(2));
        assert!(double_iso_search(&ch.double, &expected).is_some());
    }

    #[test]
    fn external_products_from_constant_times_simplex() {
        for a in [FinCategory::ordinal(1), FinCategory::ordinal(2)] {
            let x = SCat2Trunc::product(
                &SCat2Trunc::constant(&a),
                &SCat2Trunc::from_sset(&SSet2Trunc::simplex(1)),
            );
            x.validate().unwrap();
            let d = fundamental_double_category(&x, &budget()).unwrap();
            let expected = external_product(&a, &FinCategory::ordinal(1));
            assert!(double_iso_search(&d, &expected).is_some());
        }
    }

    #[test]
    fn counit_is_an_isomorphism_on_nerves() {
        let corpus = [
            external_product(&FinCategory::ordinal(1), &FinCategory::ordinal(1)),
            embed_h(&FinCategory::ordinal(2)),
            embed_v(&FinCategory::ordinal(1)),
            terminal(),
        ];
        for d in corpus {
            let x = SCat2Trunc::from_simplicial(&horizontal_nerve(&d, 2))
                .expect("level 2 is materialized");
            x.validate().unwrap();
            let back = fundamental_double_category(&x, &budget()).unwrap();
            assert!(double_iso_search(&back, &d).is_some());
        }
    }

    #[test]
    fn vertical_categorification_transposes() {
        let x = SCat2Trunc::from_sset(&SSet2Trunc::simplex(1));
        let d = vertical_categorification(&x, &budget()).unwrap();
        assert!(double_iso_search(&d, &embed_v(&FinCategory::ordinal(1))).is_some());
    }

    #[test]
    fn adjunction_bijection_on_the_constant_interval() {
        let x = SCat2Trunc::constant(&FinCategory::ordinal(1));
        let d = embed_v(&FinCategory::ordinal(1));
        assert_eq!(adjunction_bijection_check(&x, &d, &budget()), Ok(true));
        let ch = horizontal_categorification(&x, &budget()).unwrap();
        let functors = double_functors_between(&ch.double, &d, 10_000).unwrap();
        let morphisms = truncation_morphisms(&x, &horizontal_nerve(&d, 2), 10_000).unwrap();
        assert_eq!(functors.len(), 3);
        assert_eq!(morphisms.len(), 3);
    }

    #[test]
    fn adjunction_bijection_on_the_simplicial_interval() {
        let x = SCat2Trunc::from_sset(&SSet2Trunc::simplex(1));
        let d = embed_h(&FinCategory::ordinal(1));
        assert_eq!(adjunction_bijection_check(&x, &d, &budget()), Ok(true));
    }

    #[test]
    fn adjunction_bijection_on_the_empty_input() {
        let x = SCat2Trunc::empty();
        let d = external_product(&FinCategory::ordinal(1), &FinCategory::ordinal(1));
        assert_eq!(adjunction_bijection_check(&x, &d, &budget()), Ok(true));
        let ch = horizontal_categorification(&x, &budget()).unwrap();
        assert_eq!(double_functors_between(&ch.double, &d, 10_000).unwrap().len(), 1);
    }
}
