//! Colimits of finite categories, derivation schemes, and double categories.
//!
//! A diagram assigns a category (or scheme, or double category) to every
//! object of a finite index category and a functor to every morphism. The
//! colimit engines glue the underlying cells with a union-find, then close
//! the result under composition: for categories this means enumerating
//! bounded composition paths in the glued graph and quotienting by the
//! relations the diagram nodes impose; for double categories the square
//! tables are rebuilt the same way from free pasting composites. Both
//! closures stop at the budget and report saturation failures instead of
//! guessing, so a successful return is a validated category.
//!
//! Filtered (directed) diagrams avoid the free/quotient detour entirely:
//! their colimits are computed sortwise, with compositions inherited from a
//! common later stage.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::{Budget, BudgetExceeded, Resource};
use crate::construct::{FreeComposeError, FreePresentation, FreeSquare, UnionFind, UnrepresentableComposite};
use crate::core::ids::paired;
use crate::core::ops::external_product;
use crate::core::{
    DoubleCategory, DoubleDerivationScheme, DoubleFunctor, FinCategory, FinFunctor, InvalidFunctor,
    MorId, ObId, SqId, SquareBoundary,
};
use crate::thomason::{csd2, SimplexLikeComplex};

/// A defect in a diagram: a missing or ill-typed assignment, or an
/// assignment that is not functorial in the index.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("index category is invalid: {detail}")]
    Index { detail: String },
    #[error("index object {0} has no assigned node")]
    MissingNode(ObId),
    #[error("node at {node} is invalid: {detail}")]
    NodeInvalid { node: ObId, detail: String },
    #[error("index morphism {0} has no assigned edge")]
    MissingEdge(MorId),
    #[error("edge at {edge} does not run between its endpoint nodes")]
    EdgeEndpoints { edge: MorId },
    #[error("edge at {edge} is invalid: {detail}")]
    EdgeInvalid { edge: MorId, detail: String },
    #[error("edge at identity {id} is not the identity")]
    IdentityEdge { id: MorId },
    #[error("edges at {first} then {second} do not compose to the edge at the composite")]
    CompositeEdge { first: MorId, second: MorId },
}

fn join_errs<E: std::fmt::Display>(errs: &[E]) -> String {
    errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}

/// A finite diagram of categories over a finite index category. Edges are
/// required for non-identity index morphisms; identity edges may be omitted
/// and default to identity functors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatDiagram {
    pub index: FinCategory,
    pub nodes: BTreeMap<ObId, FinCategory>,
    pub edges: BTreeMap<MorId, FinFunctor>,
}

impl CatDiagram {
    /// The functor assigned to `m`, supplying identities where omitted.
    pub fn edge_functor(&self, m: &MorId) -> Option<FinFunctor> {
        if let Some(f) = self.edges.get(m) {
            return Some(f.clone());
        }
        if self.index.is_identity(m) {
            return Some(FinFunctor::identity(self.nodes.get(self.index.src(m)?)?));
        }
        None
    }

    pub fn validate(&self) -> Result<(), Vec<DiagramError>> {
        let mut errs = Vec::new();
        if let Err(es) = self.index.validate() {
            errs.push(DiagramError::Index { detail: join_errs(&es) });
        }
        for i in self.index.objects() {
            match self.nodes.get(i) {
                None => errs.push(DiagramError::MissingNode(i.clone())),
                Some(cat) => {
                    if let Err(es) = cat.validate() {
                        errs.push(DiagramError::NodeInvalid {
                            node: i.clone(),
                            detail: join_errs(&es),
                        });
                    }
                }
            }
        }
        for (m, hom) in self.index.morphisms() {
            let Some(f) = self.edge_functor(m) else {
                errs.push(DiagramError::MissingEdge(m.clone()));
                continue;
            };
            let (src, tgt) = (self.nodes.get(&hom.src), self.nodes.get(&hom.tgt));
            if src.is_some_and(|c| f.source() != c) || tgt.is_some_and(|c| f.target() != c) {
                errs.push(DiagramError::EdgeEndpoints { edge: m.clone() });
                continue;
            }
            if let Err(es) = f.validate() {
                errs.push(DiagramError::EdgeInvalid { edge: m.clone(), detail: join_errs(&es) });
                continue;
            }
            if self.index.is_identity(m) && src.is_some_and(|c| f != FinFunctor::identity(c)) {
                errs.push(DiagramError::IdentityEdge { id: m.clone() });
            }
        }
        if errs.is_empty() {
            for (a, b) in self.index.composable_pairs() {
                let c = self.index.then(&a, &b).expect("valid index composes");
                let (fa, fb) = (self.edge_functor(&a).unwrap(), self.edge_functor(&b).unwrap());
                if fa.then(&fb) != self.edge_functor(c).unwrap() {
                    errs.push(DiagramError::CompositeEdge { first: a, second: b });
                }
            }
        }
        if errs.is_empty() { Ok(()) } else { Err(errs) }
    }
}

/// A way a scheme morphism can fail to be one.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InvalidSchemeMorphism {
    #[error("horizontal part does not run between the scheme categories")]
    HorizontalEndpoints,
    #[error("vertical part does not run between the scheme categories")]
    VerticalEndpoints,
    #[error("horizontal part: {0}")]
    Horizontal(InvalidFunctor),
    #[error("vertical part: {0}")]
    Vertical(InvalidFunctor),
    #[error("parts disagree on object {ob}")]
    ObjectMismatch { ob: ObId },
    #[error("square {sq} has no image")]
    MissingSquareImage { sq: SqId },
    #[error("image of square {sq} is not a square of the target")]
    SquareImageUnknown { sq: SqId },
    #[error("image of square {sq} has the wrong boundary")]
    SquareBoundaryMismatch { sq: SqId },
}

/// A morphism of derivation schemes: functors on the two morphism
/// categories agreeing on objects, plus a map of generating squares.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DdsMorphism {
    pub hor: FinFunctor,
    pub ver: FinFunctor,
    pub sq_map: BTreeMap<SqId, SqId>,
}

impl DdsMorphism {
    pub fn identity(s: &DoubleDerivationScheme) -> DdsMorphism {
        DdsMorphism {
            hor: FinFunctor::identity(&s.hor_cat),
            ver: FinFunctor::identity(&s.ver_cat),
            sq_map: s.squares.keys().map(|q| (q.clone(), q.clone())).collect(),
        }
    }

    /// The scheme morphism underlying a double functor.
    pub fn of_double_functor(f: &DoubleFunctor) -> DdsMorphism {
        DdsMorphism { hor: f.hor_part(), ver: f.ver_part(), sq_map: f.sq_map().clone() }
    }

    pub fn then(&self, next: &DdsMorphism) -> DdsMorphism {
        let sq_map = self
            .sq_map
            .iter()
            .filter_map(|(s, m)| next.sq_map.get(m).map(|n| (s.clone(), n.clone())))
            .collect();
        DdsMorphism { hor: self.hor.then(&next.hor), ver: self.ver.then(&next.ver), sq_map }
    }

    pub fn validate(
        &self,
        source: &DoubleDerivationScheme,
        target: &DoubleDerivationScheme,
    ) -> Result<(), Vec<InvalidSchemeMorphism>> {
        let mut errs = Vec::new();
        if self.hor.source() != &source.hor_cat || self.hor.target() != &target.hor_cat {
            errs.push(InvalidSchemeMorphism::HorizontalEndpoints);
        }
        if self.ver.source() != &source.ver_cat || self.ver.target() != &target.ver_cat {
            errs.push(InvalidSchemeMorphism::VerticalEndpoints);
        }
        if let Err(es) = self.hor.validate() {
            errs.extend(es.into_iter().map(InvalidSchemeMorphism::Horizontal));
        }
        if let Err(es) = self.ver.validate() {
            errs.extend(es.into_iter().map(InvalidSchemeMorphism::Vertical));
        }
        for ob in source.hor_cat.objects() {
            if self.hor.apply_ob(ob) != self.ver.apply_ob(ob) {
                errs.push(InvalidSchemeMorphism::ObjectMismatch { ob: ob.clone() });
            }
        }
        for (s, b) in &source.squares {
            let Some(img) = self.sq_map.get(s) else {
                errs.push(InvalidSchemeMorphism::MissingSquareImage { sq: s.clone() });
                continue;
            };
            let Some(ib) = target.squares.get(img) else {
                errs.push(InvalidSchemeMorphism::SquareImageUnknown { sq: s.clone() });
                continue;
            };
            let expected = SquareBoundary {
                top: self.hor.apply_mor(&b.top).cloned().unwrap_or_else(|| b.top.clone()),
                bottom: self.hor.apply_mor(&b.bottom).cloned().unwrap_or_else(|| b.bottom.clone()),
                left: self.ver.apply_mor(&b.left).cloned().unwrap_or_else(|| b.left.clone()),
                right: self.ver.apply_mor(&b.right).cloned().unwrap_or_else(|| b.right.clone()),
            };
            if *ib != expected {
                errs.push(InvalidSchemeMorphism::SquareBoundaryMismatch { sq: s.clone() });
            }
        }
        if errs.is_empty() { Ok(()) } else { Err(errs) }
    }
}

/// A finite diagram of derivation schemes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DdsDiagram {
    pub index: FinCategory,
    pub nodes: BTreeMap<ObId, DoubleDerivationScheme>,
    pub edges: BTreeMap<MorId, DdsMorphism>,
}

impl DdsDiagram {
    /// Forget compositions: the scheme diagram under a double diagram.
    pub fn of_double(d: &DblDiagram) -> DdsDiagram {
        DdsDiagram {
            index: d.index.clone(),
            nodes: d.nodes.iter().map(|(i, n)| (i.clone(), n.as_scheme())).collect(),
            edges: d
                .edges
                .iter()
                .map(|(e, f)| (e.clone(), DdsMorphism::of_double_functor(f)))
                .collect(),
        }
    }

    pub fn edge_morphism(&self, m: &MorId) -> Option<DdsMorphism> {
        if let Some(f) = self.edges.get(m) {
            return Some(f.clone());
        }
        if self.index.is_identity(m) {
            return Some(DdsMorphism::identity(self.nodes.get(self.index.src(m)?)?));
        }
        None
    }

    pub fn validate(&self) -> Result<(), Vec<DiagramError>> {
        let mut errs = Vec::new();
        if let Err(es) = self.index.validate() {
            errs.push(DiagramError::Index { detail: join_errs(&es) });
        }
        for i in self.index.objects() {
            match self.nodes.get(i) {
                None => errs.push(DiagramError::MissingNode(i.clone())),
                Some(s) => {
                    if let Err(es) = s.validate() {
                        errs.push(DiagramError::NodeInvalid {
                            node: i.clone(),
                            detail: join_errs(&es),
                        });
                    }
                }
            }
        }
        for (m, hom) in self.index.morphisms() {
            let Some(f) = self.edge_morphism(m) else {
                errs.push(DiagramError::MissingEdge(m.clone()));
                continue;
            };
            let (Some(src), Some(tgt)) = (self.nodes.get(&hom.src), self.nodes.get(&hom.tgt))
            else {
                continue;
            };
            if let Err(es) = f.validate(src, tgt) {
                errs.push(DiagramError::EdgeInvalid { edge: m.clone(), detail: join_errs(&es) });
                continue;
            }
            if self.index.is_identity(m) && f != DdsMorphism::identity(src) {
                errs.push(DiagramError::IdentityEdge { id: m.clone() });
            }
        }
        if errs.is_empty() {
            for (a, b) in self.index.composable_pairs() {
                let c = self.index.then(&a, &b).expect("valid index composes");
                let (fa, fb) = (self.edge_morphism(&a).unwrap(), self.edge_morphism(&b).unwrap());
                if fa.then(&fb) != self.edge_morphism(c).unwrap() {
                    errs.push(DiagramError::CompositeEdge { first: a, second: b });
                }
            }
        }
        if errs.is_empty() { Ok(()) } else { Err(errs) }
    }
}

/// A finite diagram of double categories.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DblDiagram {
    pub index: FinCategory,
    pub nodes: BTreeMap<ObId, DoubleCategory>,
    pub edges: BTreeMap<MorId, DoubleFunctor>,
}

impl DblDiagram {
    pub fn edge_functor(&self, m: &MorId) -> Option<DoubleFunctor> {
        if let Some(f) = self.edges.get(m) {
            return Some(f.clone());
        }
        if self.index.is_identity(m) {
            return Some(DoubleFunctor::identity(self.nodes.get(self.index.src(m)?)?));
        }
        None
    }

    pub fn validate(&self) -> Result<(), Vec<DiagramError>> {
        let mut errs = Vec::new();
        if let Err(es) = self.index.validate() {
            errs.push(DiagramError::Index { detail: join_errs(&es) });
        }
        for i in self.index.objects() {
            match self.nodes.get(i) {
                None => errs.push(DiagramError::MissingNode(i.clone())),
                Some(n) => {
                    if let Err(es) = n.validate() {
                        errs.push(DiagramError::NodeInvalid {
                            node: i.clone(),
                            detail: join_errs(&es),
                        });
                    }
                }
            }
        }
        for (m, hom) in self.index.morphisms() {
            let Some(f) = self.edge_functor(m) else {
                errs.push(DiagramError::MissingEdge(m.clone()));
                continue;
            };
            let (src, tgt) = (self.nodes.get(&hom.src), self.nodes.get(&hom.tgt));
            if src.is_some_and(|n| f.source() != n) || tgt.is_some_and(|n| f.target() != n) {
                errs.push(DiagramError::EdgeEndpoints { edge: m.clone() });
                continue;
            }
            if let Err(es) = f.validate() {
                errs.push(DiagramError::EdgeInvalid { edge: m.clone(), detail: join_errs(&es) });
                continue;
            }
            if self.index.is_identity(m) && src.is_some_and(|n| f != DoubleFunctor::identity(n)) {
                errs.push(DiagramError::IdentityEdge { id: m.clone() });
            }
        }
        if errs.is_empty() {
            for (a, b) in self.index.composable_pairs() {
                let c = self.index.then(&a, &b).expect("valid index composes");
                let (fa, fb) = (self.edge_functor(&a).unwrap(), self.edge_functor(&b).unwrap());
                if fa.then(&fb) != self.edge_functor(c).unwrap() {
                    errs.push(DiagramError::CompositeEdge { first: a, second: b });
                }
            }
        }
        if errs.is_empty() { Ok(()) } else { Err(errs) }
    }
}

/// A category colimit together with its cocone legs.
#[derive(Clone, Debug)]
pub struct CatColimit {
    pub category: FinCategory,
    pub cocone: BTreeMap<ObId, FinFunctor>,
}

/// A scheme colimit together with its cocone legs.
#[derive(Clone, Debug)]
pub struct DdsColimit {
    pub scheme: DoubleDerivationScheme,
    pub cocone: BTreeMap<ObId, DdsMorphism>,
}

/// A double-category colimit together with its cocone legs.
#[derive(Clone, Debug)]
pub struct DblColimit {
    pub double: DoubleCategory,
    pub cocone: BTreeMap<ObId, DoubleFunctor>,
}

/// Why a colimit computation stopped.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ColimError {
    #[error("invalid diagram: {}", join_errs(.0))]
    Diagram(Vec<DiagramError>),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("no pasting-diagram representative for a required square composite: {0}")]
    Unrepresentable(UnrepresentableComposite),
    #[error("index category is not directed: {detail}")]
    NotDirected { detail: String },
    #[error("colimit certificate failed: {detail}")]
    Certificate { detail: String },
}

fn certify(detail: impl Into<String>) -> ColimError {
    ColimError::Certificate { detail: detail.into() }
}

fn tag_ob(node: &ObId, x: &ObId) -> ObId {
    ObId(paired(&node.0, &x.0))
}

fn tag_mor(node: &ObId, m: &MorId) -> MorId {
    MorId(paired(&node.0, &m.0))
}

fn tag_sq(node: &ObId, s: &SqId) -> SqId {
    SqId(paired(&node.0, &s.0))
}

/// A composition path in the glued graph: a start object class and a list
/// of non-identity edge classes. The empty path is the identity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct GluedPath {
    src: ObId,
    edges: Vec<MorId>,
}

/// The colimit of a diagram of categories.
///
/// Objects and generating morphisms are glued by a union-find over
/// node-tagged cells; composition paths in the glued graph are enumerated
/// up to the path budget and quotiented by the composition relations of the
/// nodes. Every composable pair of classes must own an in-budget
/// representative concatenation, otherwise the truncation is not a category
/// and a budget error is returned.
pub fn colimit_cat(d: &CatDiagram, budget: &Budget) -> Result<CatColimit, ColimError> {
    d.validate().map_err(ColimError::Diagram)?;

    // Glue objects and morphisms along the diagram edges.
    let mut ob_uf: UnionFind<ObId> = UnionFind::new();
    let mut mor_uf: UnionFind<MorId> = UnionFind::new();
    let mut tag_hom: BTreeMap<MorId, (ObId, ObId)> = BTreeMap::new();
    let mut tagged_ids: BTreeSet<MorId> = BTreeSet::new();
    for (i, cat) in &d.nodes {
        for x in cat.objects() {
            ob_uf.insert(tag_ob(i, x));
        }
        for (m, hom) in cat.morphisms() {
            let t = tag_mor(i, m);
            mor_uf.insert(t.clone());
            tag_hom.insert(t.clone(), (tag_ob(i, &hom.src), tag_ob(i, &hom.tgt)));
            if cat.is_identity(m) {
                tagged_ids.insert(t);
            }
        }
    }
    for (e, hom) in d.index.morphisms() {
        if d.index.is_identity(e) {
            continue;
        }
        let f = &d.edges[e];
        let (i, j) = (&hom.src, &hom.tgt);
        for x in d.nodes[i].objects() {
            let fx = f.apply_ob(x).expect("validated edge is total");
            ob_uf.union(&tag_ob(i, x), &tag_ob(j, fx));
        }
        for m in d.nodes[i].mor_ids() {
            let fm = f.apply_mor(m).expect("validated edge is total");
            mor_uf.union(&tag_mor(i, m), &tag_mor(j, fm));
        }
    }

    let mut ob_rep: BTreeMap<ObId, ObId> = BTreeMap::new();
    let mut objects: BTreeSet<ObId> = BTreeSet::new();
    for class in ob_uf.classes() {
        let rep = class.first().expect("classes are nonempty").clone();
        objects.insert(rep.clone());
        for member in class {
            ob_rep.insert(member, rep.clone());
        }
    }
    let mut mor_rep: BTreeMap<MorId, MorId> = BTreeMap::new();
    let mut identity_reps: BTreeSet<MorId> = BTreeSet::new();
    let mut id_name: BTreeMap<ObId, MorId> = BTreeMap::new();
    let mut edge_ends: BTreeMap<MorId, (ObId, ObId)> = BTreeMap::new();
    for class in mor_uf.classes() {
        let rep = class.first().expect("classes are nonempty").clone();
        let has_id = class.iter().any(|m| tagged_ids.contains(m));
        let (s, t) = &tag_hom[&rep];
        let (s, t) = (ob_rep[s].clone(), ob_rep[t].clone());
        for member in class {
            mor_rep.insert(member, rep.clone());
        }
        if has_id {
            identity_reps.insert(rep.clone());
            id_name.insert(s, rep);
        } else {
            edge_ends.insert(rep, (s, t));
        }
    }

    // Enumerate composition paths of non-identity edge classes up to the
    // path budget.
    let mut out_edges: BTreeMap<ObId, Vec<MorId>> = BTreeMap::new();
    let mut in_edges: BTreeMap<ObId, Vec<MorId>> = BTreeMap::new();
    for (e, (s, t)) in &edge_ends {
        out_edges.entry(s.clone()).or_default().push(e.clone());
        in_edges.entry(t.clone()).or_default().push(e.clone());
    }
    let mut targets: BTreeMap<GluedPath, ObId> = BTreeMap::new();
    let mut frontier: Vec<GluedPath> = Vec::new();
    for o in &objects {
        let p = GluedPath { src: o.clone(), edges: Vec::new() };
        targets.insert(p.clone(), o.clone());
        frontier.push(p);
    }
    for _ in 1..=budget.max_path {
        let mut next = Vec::new();
        for p in &frontier {
            let at = targets[p].clone();
            for e in out_edges.get(&at).map(Vec::as_slice).unwrap_or(&[]) {
                let mut q = p.clone();
                q.edges.push(e.clone());
                targets.insert(q.clone(), edge_ends[e].1.clone());
                next.push(q);
            }
        }
        budget.charge_squares(targets.len(), "colimit path enumeration")?;
        if next.is_empty() {
            break;
        }
        frontier = next;
    }

    // Seed the path congruence with the composition tables of the nodes,
    // then close under edge extensions.
    let mut uf: UnionFind<GluedPath> = UnionFind::new();
    for p in targets.keys() {
        uf.insert(p.clone());
    }
    let img_path = |i: &ObId, m: &MorId| -> Vec<MorId> {
        let r = &mor_rep[&tag_mor(i, m)];
        if identity_reps.contains(r) { Vec::new() } else { vec![r.clone()] }
    };
    for (i, cat) in &d.nodes {
        for (f, g) in cat.composable_pairs() {
            let h = cat.then(&f, &g).expect("validated node composes").clone();
            let src = ob_rep[&tag_ob(i, cat.src(&f).expect("morphism has a source"))].clone();
            let mut lhs = img_path(i, &f);
            lhs.extend(img_path(i, &g));
            budget.charge_path(lhs.len(), "colimit relation seed")?;
            let a = GluedPath { src: src.clone(), edges: lhs };
            let b = GluedPath { src, edges: img_path(i, &h) };
            uf.union(&a, &b);
        }
    }
    loop {
        let mut changed = false;
        for class in uf.classes() {
            if class.len() < 2 {
                continue;
            }
            let members: Vec<GluedPath> = class.into_iter().collect();
            let base = &members[0];
            let tgt = targets[base].clone();
            for m in &members[1..] {
                if base.edges.len() + 1 > budget.max_path || m.edges.len() + 1 > budget.max_path {
                    continue;
                }
                for e in in_edges.get(&base.src).map(Vec::as_slice).unwrap_or(&[]) {
                    let esrc = edge_ends[e].0.clone();
                    let mut ea = vec![e.clone()];
                    ea.extend(base.edges.iter().cloned());
                    let mut eb = vec![e.clone()];
                    eb.extend(m.edges.iter().cloned());
                    let a = GluedPath { src: esrc.clone(), edges: ea };
                    let b = GluedPath { src: esrc, edges: eb };
                    if uf.union(&a, &b) {
                        changed = true;
                    }
                }
                for e in out_edges.get(&tgt).map(Vec::as_slice).unwrap_or(&[]) {
                    let mut ea = base.edges.clone();
                    ea.push(e.clone());
                    let mut eb = m.edges.clone();
                    eb.push(e.clone());
                    let a = GluedPath { src: base.src.clone(), edges: ea };
                    let b = GluedPath { src: m.src.clone(), edges: eb };
                    if uf.union(&a, &b) {
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    // Name the classes and assemble the category.
    struct PathClass {
        name: MorId,
        src: ObId,
        tgt: ObId,
        least: GluedPath,
    }
    let mut infos: Vec<PathClass> = Vec::new();
    let mut class_name: BTreeMap<GluedPath, MorId> = BTreeMap::new();
    for class in uf.classes() {
        let mut members: Vec<GluedPath> = class.into_iter().collect();
        members.sort_by_key(|p| (p.edges.len(), p.edges.clone()));
        let least = members[0].clone();
        let name = if least.edges.is_empty() {
            id_name[&least.src].clone()
        } else {
            MorId(least.edges.iter().map(|e| e.0.as_str()).collect::<Vec<_>>().join("*"))
        };
        let tgt = targets[&least].clone();
        for p in members {
            class_name.insert(p, name.clone());
        }
        infos.push(PathClass { name, src: least.src.clone(), tgt, least });
    }

    let mut cat = FinCategory::new();
    for o in &objects {
        cat.add_object(o.clone());
    }
    for c in &infos {
        cat.add_morphism(c.name.clone(), c.src.clone(), c.tgt.clone());
    }
    for o in &objects {
        let empty = GluedPath { src: o.clone(), edges: Vec::new() };
        cat.set_identity(o.clone(), class_name[&empty].clone());
    }
    for c1 in &infos {
        for c2 in &infos {
            if c1.tgt != c2.src {
                continue;
            }
            let len = c1.least.edges.len() + c2.least.edges.len();
            if len > budget.max_path {
                return Err(ColimError::Budget(BudgetExceeded {
                    resource: Resource::Path,
                    limit: budget.max_path,
                    context: Some(format!("saturating the composite {} ; {}", c1.name, c2.name)),
                }));
            }
            let mut edges = c1.least.edges.clone();
            edges.extend(c2.least.edges.iter().cloned());
            let concat = GluedPath { src: c1.least.src.clone(), edges };
            cat.set_then(c1.name.clone(), c2.name.clone(), class_name[&concat].clone());
        }
    }
    if let Err(es) = cat.validate() {
        return Err(certify(format!("colimit category is invalid: {}", join_errs(&es))));
    }

    let mut cocone = BTreeMap::new();
    for (i, node) in &d.nodes {
        let ob_map = node
            .objects()
            .map(|x| (x.clone(), ob_rep[&tag_ob(i, x)].clone()))
            .collect();
        let mor_map = node
            .mor_ids()
            .map(|m| {
                let src = ob_rep[&tag_ob(i, node.src(m).expect("morphism has a source"))].clone();
                let p = GluedPath { src, edges: img_path(i, m) };
                (m.clone(), class_name[&p].clone())
            })
            .collect();
        let leg = FinFunctor::new(node.clone(), cat.clone(), ob_map, mor_map);
        if let Err(es) = leg.validate() {
            return Err(certify(format!("cocone leg at {i} is invalid: {}", join_errs(&es))));
        }
        cocone.insert(i.clone(), leg);
    }
    Ok(CatColimit { category: cat, cocone })
}

/// The colimit of a diagram of derivation schemes: both morphism categories
/// are category colimits, and the generating squares are glued as a plain
/// set with boundaries pushed along the cocone.
pub fn colimit_dds(d: &DdsDiagram, budget: &Budget) -> Result<DdsColimit, ColimError> {
    d.validate().map_err(ColimError::Diagram)?;
    let hor = CatDiagram {
        index: d.index.clone(),
        nodes: d.nodes.iter().map(|(i, s)| (i.clone(), s.hor_cat.clone())).collect(),
        edges: d.edges.iter().map(|(e, m)| (e.clone(), m.hor.clone())).collect(),
    };
    let ver = CatDiagram {
        index: d.index.clone(),
        nodes: d.nodes.iter().map(|(i, s)| (i.clone(), s.ver_cat.clone())).collect(),
        edges: d.edges.iter().map(|(e, m)| (e.clone(), m.ver.clone())).collect(),
    };
    let hc = colimit_cat(&hor, budget)?;
    let vc = colimit_cat(&ver, budget)?;
    if hc.category.objects().collect::<Vec<_>>() != vc.category.objects().collect::<Vec<_>>() {
        return Err(certify("the two morphism colimits disagree on objects"));
    }

    let mut sq_uf: UnionFind<SqId> = UnionFind::new();
    let mut origin: BTreeMap<SqId, (ObId, SqId)> = BTreeMap::new();
    for (i, s) in &d.nodes {
        for q in s.squares.keys() {
            let t = tag_sq(i, q);
            sq_uf.insert(t.clone());
            origin.insert(t, (i.clone(), q.clone()));
        }
    }
    for (e, hom) in d.index.morphisms() {
        if d.index.is_identity(e) {
            continue;
        }
        let m = &d.edges[e];
        let (i, j) = (&hom.src, &hom.tgt);
        for q in d.nodes[i].squares.keys() {
            let img = &m.sq_map[q];
            sq_uf.union(&tag_sq(i, q), &tag_sq(j, img));
        }
    }
    let mut squares = BTreeMap::new();
    let mut sq_rep: BTreeMap<SqId, SqId> = BTreeMap::new();
    for class in sq_uf.classes() {
        let rep = class.first().expect("classes are nonempty").clone();
        let (i, local) = &origin[&rep];
        let b = &d.nodes[i].squares[local];
        let (hleg, vleg) = (&hc.cocone[i], &vc.cocone[i]);
        squares.insert(
            rep.clone(),
            SquareBoundary {
                top: hleg.apply_mor(&b.top).expect("leg is total").clone(),
                bottom: hleg.apply_mor(&b.bottom).expect("leg is total").clone(),
                left: vleg.apply_mor(&b.left).expect("leg is total").clone(),
                right: vleg.apply_mor(&b.right).expect("leg is total").clone(),
            },
        );
        for member in class {
            sq_rep.insert(member, rep.clone());
        }
    }
    let scheme =
        DoubleDerivationScheme { hor_cat: hc.category, ver_cat: vc.category, squares };
    if let Err(es) = scheme.validate() {
        return Err(certify(format!("colimit scheme is invalid: {}", join_errs(&es))));
    }

    let mut cocone = BTreeMap::new();
    for (i, node) in &d.nodes {
        let leg = DdsMorphism {
            hor: hc.cocone[i].clone(),
            ver: vc.cocone[i].clone(),
            sq_map: node.squares.keys().map(|q| (q.clone(), sq_rep[&tag_sq(i, q)].clone())).collect(),
        };
        if let Err(es) = leg.validate(node, &scheme) {
            return Err(certify(format!("cocone leg at {i} is invalid: {}", join_errs(&es))));
        }
        cocone.insert(i.clone(), leg);
    }
    Ok(DdsColimit { scheme, cocone })
}

/// Square classes of a double-category colimit: pasting composites over the
/// colimit scheme, identified by the seeded congruence, with both
/// composition tables saturated.
struct ClosedSquares {
    double: DoubleCategory,
    resolve: BTreeMap<FreeSquare, SqId>,
}

const MEMBER_PAIR_ATTEMPTS: usize = 64;
const MEMBER_PAIR_RESULTS: usize = 8;

/// All composites of one member of `c1` with one member of `c2`, in the
/// given direction. Member pairs without a pasting-diagram representative
/// are skipped; the last such failure is reported for saturation messages.
fn member_composites(
    pres: &FreePresentation,
    c1: &[FreeSquare],
    c2: &[FreeSquare],
    vertical: bool,
) -> Result<(Vec<FreeSquare>, Option<UnrepresentableComposite>), ColimError> {
    let mut results = Vec::new();
    let mut last_unrep = None;
    let mut attempts = 0;
    'pairs: for m1 in c1 {
        for m2 in c2 {
            if attempts >= MEMBER_PAIR_ATTEMPTS || results.len() >= MEMBER_PAIR_RESULTS {
                break 'pairs;
            }
            attempts += 1;
            let r = if vertical { pres.stack(m1, m2) } else { pres.beside(m1, m2) };
            match r {
                Ok(Some(v)) => results.push(v),
                Ok(None) => {}
                Err(FreeComposeError::Unrepresentable(u)) => last_unrep = Some(u),
                Err(FreeComposeError::Budget(b)) => return Err(ColimError::Budget(b)),
            }
        }
    }
    Ok((results, last_unrep))
}

fn close_squares(
    scheme: &DoubleDerivationScheme,
    seeds: &[(FreeSquare, FreeSquare)],
    budget: &Budget,
) -> Result<ClosedSquares, ColimError> {
    let pres = FreePresentation::new(scheme.clone(), *budget);
    let mut known: BTreeSet<FreeSquare> = BTreeSet::new();
    let mut uf: UnionFind<FreeSquare> = UnionFind::new();
    let add = |v: &FreeSquare, known: &mut BTreeSet<FreeSquare>, uf: &mut UnionFind<FreeSquare>| -> Result<(), BudgetExceeded> {
        if known.insert(v.clone()) {
            uf.insert(v.clone());
            budget.charge_squares(known.len(), "square closure")?;
        }
        Ok(())
    };
    for v in pres.unit_squares() {
        add(&v, &mut known, &mut uf)?;
    }
    for v in pres.generators() {
        add(&v, &mut known, &mut uf)?;
    }
    for (a, b) in seeds {
        add(a, &mut known, &mut uf)?;
        add(b, &mut known, &mut uf)?;
        uf.union(a, b);
    }

    loop {
        let classes: Vec<Vec<FreeSquare>> =
            uf.classes().into_iter().map(|c| c.into_iter().collect()).collect();
        let mut boundaries = Vec::with_capacity(classes.len());
        for c in &classes {
            let b = pres
                .boundary(&c[0])
                .ok_or_else(|| certify("square class without a boundary"))?;
            boundaries.push(b);
        }
        let mut fresh: Vec<FreeSquare> = Vec::new();
        let mut merges: Vec<(FreeSquare, FreeSquare)> = Vec::new();
        for (i1, c1) in classes.iter().enumerate() {
            for (i2, c2) in classes.iter().enumerate() {
                for vertical in [false, true] {
                    let composable = if vertical {
                        boundaries[i1].bottom == boundaries[i2].top
                    } else {
                        boundaries[i1].right == boundaries[i2].left
                    };
                    if !composable {
                        continue;
                    }
                    let (results, _) = member_composites(&pres, c1, c2, vertical)?;
                    if results.is_empty() {
                        continue;
                    }
                    for r in &results {
                        if !known.contains(r) {
                            fresh.push(r.clone());
                        }
                    }
                    for r in &results[1..] {
                        merges.push((results[0].clone(), r.clone()));
                    }
                }
            }
        }
        let mut changed = false;
        for v in &fresh {
            if !known.contains(v) {
                add(v, &mut known, &mut uf)?;
                changed = true;
            }
        }
        for (a, b) in merges {
            if uf.union(&a, &b) {
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // Name the classes: formal units keep their canonical identifier,
    // classes holding a generator square adopt its name, the rest use the
    // least canonical form.
    let classes: Vec<Vec<FreeSquare>> =
        uf.classes().into_iter().map(|c| c.into_iter().collect()).collect();
    let single_cell = |v: &FreeSquare| -> Option<SqId> {
        match v {
            FreeSquare::Tile(a) if a.cell_labels.len() == 1 => {
                a.cell_labels.values().next().cloned()
            }
            _ => None,
        }
    };
    let mut resolve: BTreeMap<FreeSquare, SqId> = BTreeMap::new();
    let mut named: Vec<(SqId, SquareBoundary, usize)> = Vec::new();
    for (idx, c) in classes.iter().enumerate() {
        let name = if c[0].is_identity() {
            c[0].canonical_id()
        } else if let Some(sq) = c.iter().filter_map(single_cell).min() {
            sq
        } else {
            c[0].canonical_id()
        };
        let boundary = pres
            .boundary(&c[0])
            .ok_or_else(|| certify("square class without a boundary"))?;
        for m in c {
            resolve.insert(m.clone(), name.clone());
        }
        named.push((name, boundary, idx));
    }

    let mut dd = DoubleCategory::new();
    dd.set_hor_cat(scheme.hor_cat.clone());
    dd.set_ver_cat(scheme.ver_cat.clone());
    for (name, boundary, _) in &named {
        dd.add_square(name.clone(), boundary.clone());
    }
    for (v, _) in scheme.ver_cat.morphisms() {
        dd.set_hor_unit(v.clone(), resolve[&FreeSquare::hor_unit(scheme, v)].clone());
    }
    for (f, _) in scheme.hor_cat.morphisms() {
        dd.set_ver_unit(f.clone(), resolve[&FreeSquare::ver_unit(f)].clone());
    }
    for (n1, b1, i1) in &named {
        for (n2, b2, i2) in &named {
            for vertical in [false, true] {
                let composable =
                    if vertical { b1.bottom == b2.top } else { b1.right == b2.left };
                if !composable {
                    continue;
                }
                let (results, unrep) =
                    member_composites(&pres, &classes[*i1], &classes[*i2], vertical)?;
                let Some(v) = results.first() else {
                    return Err(match unrep {
                        Some(u) => ColimError::Unrepresentable(u),
                        None => certify(format!(
                            "no representative composite for {n1} and {n2}"
                        )),
                    });
                };
                let out = resolve
                    .get(v)
                    .ok_or_else(|| certify("composite escaped the closure"))?
                    .clone();
                if vertical {
                    dd.set_stack(n1.clone(), n2.clone(), out);
                } else {
                    dd.set_beside(n1.clone(), n2.clone(), out);
                }
            }
        }
    }
    if let Err(es) = dd.validate() {
        return Err(certify(format!("colimit double category is invalid: {}", join_errs(&es))));
    }
    Ok(ClosedSquares { double: dd, resolve })
}

fn leg_square(scheme: &DoubleDerivationScheme, leg: &DdsMorphism, s: &SqId) -> FreeSquare {
    FreeSquare::generator(scheme, &leg.sq_map[s]).expect("colimit scheme holds the image")
}

/// The colimit of a diagram of double categories: the scheme colimit of the
/// underlying schemes, with squares closed under both compositions and
/// identified by the unit and composition tables of the nodes.
pub fn colimit_dblcat(d: &DblDiagram, budget: &Budget) -> Result<DblColimit, ColimError> {
    d.validate().map_err(ColimError::Diagram)?;
    let dds = DdsDiagram::of_double(d);
    let sc = colimit_dds(&dds, budget)?;
    let scheme = &sc.scheme;
    let pres = FreePresentation::new(scheme.clone(), *budget);

    let mut seeds: Vec<(FreeSquare, FreeSquare)> = Vec::new();
    for (i, node) in &d.nodes {
        let leg = &sc.cocone[i];
        for (v, _) in node.ver_cat().morphisms() {
            let u = node.hor_unit_on(v).expect("validated double category");
            let img = leg.ver.apply_mor(v).expect("leg is total");
            seeds.push((leg_square(scheme, leg, u), FreeSquare::hor_unit(scheme, img)));
        }
        for (f, _) in node.hor_cat().morphisms() {
            let u = node.ver_unit_on(f).expect("validated double category");
            let img = leg.hor.apply_mor(f).expect("leg is total");
            seeds.push((leg_square(scheme, leg, u), FreeSquare::ver_unit(img)));
        }
        for (s, bs) in node.squares() {
            for (t, bt) in node.squares() {
                if bs.right == bt.left {
                    let u = node.beside(s, t).expect("validated double category").clone();
                    let v = pres
                        .beside(&leg_square(scheme, leg, s), &leg_square(scheme, leg, t))
                        .map_err(|e| match e {
                            FreeComposeError::Budget(b) => ColimError::Budget(b),
                            FreeComposeError::Unrepresentable(u) => {
                                ColimError::Unrepresentable(u)
                            }
                        })?
                        .expect("image tiles share a seam");
                    seeds.push((v, leg_square(scheme, leg, &u)));
                }
                if bs.bottom == bt.top {
                    let u = node.stack(s, t).expect("validated double category").clone();
                    let v = pres
                        .stack(&leg_square(scheme, leg, s), &leg_square(scheme, leg, t))
                        .map_err(|e| match e {
                            FreeComposeError::Budget(b) => ColimError::Budget(b),
                            FreeComposeError::Unrepresentable(u) => {
                                ColimError::Unrepresentable(u)
                            }
                        })?
                        .expect("image tiles share a seam");
                    seeds.push((v, leg_square(scheme, leg, &u)));
                }
            }
        }
    }

    let closed = close_squares(scheme, &seeds, budget)?;
    let mut cocone = BTreeMap::new();
    for (i, node) in &d.nodes {
        let leg = &sc.cocone[i];
        let sq_map = node
            .sq_ids()
            .map(|s| (s.clone(), closed.resolve[&leg_square(scheme, leg, s)].clone()))
            .collect();
        let f = DoubleFunctor::new(
            node.clone(),
            closed.double.clone(),
            leg.hor.ob_map().clone(),
            leg.hor.mor_map().clone(),
            leg.ver.mor_map().clone(),
            sq_map,
        );
        if let Err(es) = f.validate() {
            return Err(certify(format!("cocone leg at {i} is invalid: {}", join_errs(&es))));
        }
        cocone.insert(i.clone(), f);
    }
    Ok(DblColimit { double: closed.double, cocone })
}

/// Directedness of an index category: nonempty, every pair of objects has
/// an upper bound, and every parallel pair of morphisms is equalized by
/// some later morphism.
fn check_directed(index: &FinCategory) -> Result<(), ColimError> {
    if index.object_count() == 0 {
        return Err(ColimError::NotDirected { detail: "the index category is empty".into() });
    }
    for i in index.objects() {
        for j in index.objects() {
            let bounded = index
                .objects()
                .any(|k| !index.hom_set(i, k).is_empty() && !index.hom_set(j, k).is_empty());
            if !bounded {
                return Err(ColimError::NotDirected {
                    detail: format!("objects {i} and {j} have no upper bound"),
                });
            }
        }
    }
    for (f, hf) in index.morphisms() {
        for (g, hg) in index.morphisms() {
            if f >= g || hf != hg {
                continue;
            }
            let equalized = index
                .mor_ids()
                .any(|h| index.src(h) == Some(&hf.tgt) && index.then(f, h) == index.then(g, h));
            if !equalized {
                return Err(ColimError::NotDirected {
                    detail: format!("parallel morphisms {f} and {g} are never equalized"),
                });
            }
        }
    }
    Ok(())
}

/// Sortwise colimit of a directed diagram of categories: classes of tagged
/// cells, with composites inherited from a common later stage.
fn filtered_cat(
    index: &FinCategory,
    nodes: &BTreeMap<ObId, FinCategory>,
    arrows: &BTreeMap<MorId, FinFunctor>,
) -> Result<CatColimit, ColimError> {
    let mut ob_uf: UnionFind<ObId> = UnionFind::new();
    let mut mor_uf: UnionFind<MorId> = UnionFind::new();
    let mut mor_origin: BTreeMap<MorId, (ObId, MorId)> = BTreeMap::new();
    let mut tag_hom: BTreeMap<MorId, (ObId, ObId)> = BTreeMap::new();
    let mut tagged_ids: BTreeSet<MorId> = BTreeSet::new();
    for (i, cat) in nodes {
        for x in cat.objects() {
            ob_uf.insert(tag_ob(i, x));
        }
        for (m, hom) in cat.morphisms() {
            let t = tag_mor(i, m);
            mor_uf.insert(t.clone());
            mor_origin.insert(t.clone(), (i.clone(), m.clone()));
            tag_hom.insert(t.clone(), (tag_ob(i, &hom.src), tag_ob(i, &hom.tgt)));
            if cat.is_identity(m) {
                tagged_ids.insert(t);
            }
        }
    }
    for (e, hom) in index.morphisms() {
        if index.is_identity(e) {
            continue;
        }
        let f = &arrows[e];
        let (i, j) = (&hom.src, &hom.tgt);
        for x in nodes[i].objects() {
            ob_uf.union(&tag_ob(i, x), &tag_ob(j, f.apply_ob(x).expect("edge is total")));
        }
        for m in nodes[i].mor_ids() {
            mor_uf.union(&tag_mor(i, m), &tag_mor(j, f.apply_mor(m).expect("edge is total")));
        }
    }
    let mut ob_rep: BTreeMap<ObId, ObId> = BTreeMap::new();
    let mut objects: BTreeSet<ObId> = BTreeSet::new();
    for class in ob_uf.classes() {
        let rep = class.first().expect("nonempty").clone();
        objects.insert(rep.clone());
        for m in class {
            ob_rep.insert(m, rep.clone());
        }
    }
    struct MorClass {
        rep: MorId,
        src: ObId,
        tgt: ObId,
        members: Vec<MorId>,
        has_id: bool,
    }
    let mut mor_rep: BTreeMap<MorId, MorId> = BTreeMap::new();
    let mut classes: Vec<MorClass> = Vec::new();
    for class in mor_uf.classes() {
        let rep = class.first().expect("nonempty").clone();
        let has_id = class.iter().any(|m| tagged_ids.contains(m));
        let (s, t) = &tag_hom[&rep];
        let members: Vec<MorId> = class.iter().cloned().collect();
        for m in class {
            mor_rep.insert(m, rep.clone());
        }
        classes.push(MorClass {
            rep,
            src: ob_rep[s].clone(),
            tgt: ob_rep[t].clone(),
            members,
            has_id,
        });
    }

    let mut cat = FinCategory::new();
    for o in &objects {
        cat.add_object(o.clone());
    }
    for c in &classes {
        cat.add_morphism(c.rep.clone(), c.src.clone(), c.tgt.clone());
    }
    for c in &classes {
        if c.has_id {
            cat.set_identity(c.src.clone(), c.rep.clone());
        }
    }
    for c1 in &classes {
        for c2 in &classes {
            if c1.tgt != c2.src {
                continue;
            }
            let mut composite: Option<MorId> = None;
            'stage: for m1 in &c1.members {
                let (i, f) = &mor_origin[m1];
                for m2 in &c2.members {
                    let (j, g) = &mor_origin[m2];
                    for k in index.objects() {
                        for u in index.hom_set(i, k) {
                            for v in index.hom_set(j, k) {
                                let f2 = arrows[u].apply_mor(f).expect("edge is total");
                                let g2 = arrows[v].apply_mor(g).expect("edge is total");
                                if nodes[k].tgt(f2) != nodes[k].src(g2) {
                                    continue;
                                }
                                let h = nodes[k].then(f2, g2).expect("valid node composes");
                                composite = Some(mor_rep[&tag_mor(k, h)].clone());
                                break 'stage;
                            }
                        }
                    }
                }
            }
            let Some(h) = composite else {
                return Err(certify(format!(
                    "no stage composes {} with {}",
                    c1.rep, c2.rep
                )));
            };
            cat.set_then(c1.rep.clone(), c2.rep.clone(), h);
        }
    }
    if let Err(es) = cat.validate() {
        return Err(certify(format!("directed colimit is invalid: {}", join_errs(&es))));
    }
    let mut cocone = BTreeMap::new();
    for (i, node) in nodes {
        let ob_map =
            node.objects().map(|x| (x.clone(), ob_rep[&tag_ob(i, x)].clone())).collect();
        let mor_map =
            node.mor_ids().map(|m| (m.clone(), mor_rep[&tag_mor(i, m)].clone())).collect();
        let leg = FinFunctor::new(node.clone(), cat.clone(), ob_map, mor_map);
        if let Err(es) = leg.validate() {
            return Err(certify(format!("cocone leg at {i} is invalid: {}", join_errs(&es))));
        }
        cocone.insert(i.clone(), leg);
    }
    Ok(CatColimit { category: cat, cocone })
}

/// The colimit of a directed diagram of double categories, computed
/// sortwise: objects, morphisms, and squares are tagged classes, and every
/// composite is inherited from a common later stage of the diagram. No
/// budget is needed; nothing is freely generated.
pub fn filtered_colimit_dblcat(d: &DblDiagram) -> Result<DblColimit, ColimError> {
    d.validate().map_err(ColimError::Diagram)?;
    check_directed(&d.index)?;
    let arrows: BTreeMap<MorId, DoubleFunctor> = d
        .index
        .mor_ids()
        .map(|m| (m.clone(), d.edge_functor(m).expect("validated diagram")))
        .collect();
    let hor_nodes: BTreeMap<ObId, FinCategory> =
        d.nodes.iter().map(|(i, n)| (i.clone(), n.hor_cat().clone())).collect();
    let ver_nodes: BTreeMap<ObId, FinCategory> =
        d.nodes.iter().map(|(i, n)| (i.clone(), n.ver_cat().clone())).collect();
    let hor_arrows: BTreeMap<MorId, FinFunctor> =
        arrows.iter().map(|(m, f)| (m.clone(), f.hor_part())).collect();
    let ver_arrows: BTreeMap<MorId, FinFunctor> =
        arrows.iter().map(|(m, f)| (m.clone(), f.ver_part())).collect();
    let hc = filtered_cat(&d.index, &hor_nodes, &hor_arrows)?;
    let vc = filtered_cat(&d.index, &ver_nodes, &ver_arrows)?;

    let mut sq_uf: UnionFind<SqId> = UnionFind::new();
    let mut origin: BTreeMap<SqId, (ObId, SqId)> = BTreeMap::new();
    for (i, node) in &d.nodes {
        for s in node.sq_ids() {
            let t = tag_sq(i, s);
            sq_uf.insert(t.clone());
            origin.insert(t, (i.clone(), s.clone()));
        }
    }
    for (e, hom) in d.index.morphisms() {
        if d.index.is_identity(e) {
            continue;
        }
        let f = &arrows[e];
        let (i, j) = (&hom.src, &hom.tgt);
        for s in d.nodes[i].sq_ids() {
            sq_uf.union(&tag_sq(i, s), &tag_sq(j, f.apply_sq(s).expect("edge is total")));
        }
    }
    struct SqClass {
        rep: SqId,
        members: Vec<SqId>,
        boundary: SquareBoundary,
    }
    let mut sq_rep: BTreeMap<SqId, SqId> = BTreeMap::new();
    let mut sq_classes: Vec<SqClass> = Vec::new();
    for class in sq_uf.classes() {
        let rep = class.first().expect("nonempty").clone();
        let (i, local) = &origin[&rep];
        let b = d.nodes[i].boundary(local).expect("square has a boundary");
        let boundary = SquareBoundary {
            top: hc.cocone[i].apply_mor(&b.top).expect("leg is total").clone(),
            bottom: hc.cocone[i].apply_mor(&b.bottom).expect("leg is total").clone(),
            left: vc.cocone[i].apply_mor(&b.left).expect("leg is total").clone(),
            right: vc.cocone[i].apply_mor(&b.right).expect("leg is total").clone(),
        };
        let members: Vec<SqId> = class.iter().cloned().collect();
        for m in class {
            sq_rep.insert(m, rep.clone());
        }
        sq_classes.push(SqClass { rep, members, boundary });
    }

    let mut dd = DoubleCategory::new();
    dd.set_hor_cat(hc.category.clone());
    dd.set_ver_cat(vc.category.clone());
    for c in &sq_classes {
        dd.add_square(c.rep.clone(), c.boundary.clone());
    }
    for (i, node) in &d.nodes {
        for (v, _) in node.ver_cat().morphisms() {
            let u = node.hor_unit_on(v).expect("validated double category");
            let img = vc.cocone[i].apply_mor(v).expect("leg is total").clone();
            dd.set_hor_unit(img, sq_rep[&tag_sq(i, u)].clone());
        }
        for (f, _) in node.hor_cat().morphisms() {
            let u = node.ver_unit_on(f).expect("validated double category");
            let img = hc.cocone[i].apply_mor(f).expect("leg is total").clone();
            dd.set_ver_unit(img, sq_rep[&tag_sq(i, u)].clone());
        }
    }
    for c1 in &sq_classes {
        for c2 in &sq_classes {
            for vertical in [false, true] {
                let composable = if vertical {
                    c1.boundary.bottom == c2.boundary.top
                } else {
                    c1.boundary.right == c2.boundary.left
                };
                if !composable {
                    continue;
                }
                let mut composite: Option<SqId> = None;
                'stage: for m1 in &c1.members {
                    let (i, s) = &origin[m1];
                    for m2 in &c2.members {
                        let (j, t) = &origin[m2];
                        for k in d.index.objects() {
                            for u in d.index.hom_set(i, k) {
                                for v in d.index.hom_set(j, k) {
                                    let s2 = arrows[u].apply_sq(s).expect("edge is total");
                                    let t2 = arrows[v].apply_sq(t).expect("edge is total");
                                    let node = &d.nodes[k];
                                    let (bs, bt) = (
                                        node.boundary(s2).expect("square has a boundary"),
                                        node.boundary(t2).expect("square has a boundary"),
                                    );
                                    let glued = if vertical {
                                        bs.bottom == bt.top
                                    } else {
                                        bs.right == bt.left
                                    };
                                    if !glued {
                                        continue;
                                    }
                                    let h = if vertical {
                                        node.stack(s2, t2)
                                    } else {
                                        node.beside(s2, t2)
                                    }
                                    .expect("valid node composes");
                                    composite = Some(sq_rep[&tag_sq(k, h)].clone());
                                    break 'stage;
                                }
                            }
                        }
                    }
                }
                let Some(h) = composite else {
                    return Err(certify(format!(
                        "no stage composes {} with {}",
                        c1.rep, c2.rep
                    )));
                };
                if vertical {
                    dd.set_stack(c1.rep.clone(), c2.rep.clone(), h);
                } else {
                    dd.set_beside(c1.rep.clone(), c2.rep.clone(), h);
                }
            }
        }
    }
    if let Err(es) = dd.validate() {
        return Err(certify(format!("directed colimit is invalid: {}", join_errs(&es))));
    }

    let mut cocone = BTreeMap::new();
    for (i, node) in &d.nodes {
        let sq_map =
            node.sq_ids().map(|s| (s.clone(), sq_rep[&tag_sq(i, s)].clone())).collect();
        let f = DoubleFunctor::new(
            node.clone(),
            dd.clone(),
            hc.cocone[i].ob_map().clone(),
            hc.cocone[i].mor_map().clone(),
            vc.cocone[i].mor_map().clone(),
            sq_map,
        );
        if let Err(es) = f.validate() {
            return Err(certify(format!("cocone leg at {i} is invalid: {}", join_errs(&es))));
        }
        cocone.insert(i.clone(), f);
    }
    Ok(DblColimit { double: dd, cocone })
}

/// Why a pushout formula does not apply to the given inputs.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("the inclusion is not full: {missing} lies over the subcategory but has no preimage")]
    InclusionNotFull { missing: MorId },
    #[error("inputs do not have the required shape: {detail}")]
    Shape { detail: String },
    #[error("formula certificate failed: {detail}")]
    Certificate { detail: String },
}

fn formula_cert(detail: impl Into<String>) -> FormulaError {
    FormulaError::Certificate { detail: detail.into() }
}

/// A category pushout with its two cocone legs.
#[derive(Clone, Debug)]
pub struct CatPushout {
    pub category: FinCategory,
    pub from_d: FinFunctor,
    pub from_b: FinFunctor,
}

/// A double-category pushout with its two cocone legs.
#[derive(Clone, Debug)]
pub struct DblPushout {
    pub double: DoubleCategory,
    pub from_d: DoubleFunctor,
    pub from_b: DoubleFunctor,
}

/// `base`, primed until it avoids every taken name.
fn fresh(base: &str, taken: &BTreeSet<String>) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// One letter of a zig-zag word in the pushout of `D <- A -> B` along a
/// full inclusion: a morphism kept from the ambient category, or one from
/// the attached category.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum CatPart {
    B(MorId),
    D(MorId),
}

struct CatWordCtx<'a> {
    b: &'a FinCategory,
    d: &'a FinCategory,
    a_objects: &'a BTreeSet<ObId>,
    f: &'a FinFunctor,
}

impl CatWordCtx<'_> {
    fn in_a(&self, x: &ObId) -> bool {
        self.a_objects.contains(x)
    }

    /// Both endpoints in the subcategory, hence (by fullness) the morphism
    /// itself.
    fn interior(&self, p: &MorId) -> bool {
        self.in_a(self.b.src(p).expect("morphism of B"))
            && self.in_a(self.b.tgt(p).expect("morphism of B"))
    }

    fn convert(&self, p: &MorId) -> Result<MorId, FormulaError> {
        self.f
            .apply_mor(p)
            .cloned()
            .ok_or_else(|| formula_cert(format!("no attaching image for interior morphism {p}")))
    }

    fn is_identity_part(&self, part: &CatPart) -> bool {
        match part {
            CatPart::B(p) => self.b.is_identity(p),
            CatPart::D(m) => self.d.is_identity(m),
        }
    }

    /// An identity part can be removed unless it bridges two ambient
    /// letters whose junction only exists in the attached category.
    fn droppable(&self, w: &[CatPart], i: usize) -> bool {
        if matches!(w[i], CatPart::D(_)) && i > 0 && i + 1 < w.len() {
            if let (CatPart::B(p1), CatPart::B(p2)) = (&w[i - 1], &w[i + 1]) {
                return self.b.tgt(p1) == self.b.src(p2);
            }
        }
        true
    }

    /// Rewrite a composable word to its normal form: convert interior
    /// letters, merge neighbours, drop removable identities, and bridge
    /// ambient letters that only meet through the attached category.
    fn reduce(&self, word: &[CatPart]) -> Result<Vec<CatPart>, FormulaError> {
        let mut w: Vec<CatPart> = word.to_vec();
        loop {
            let mut changed = true;
            while changed {
                changed = false;
                for part in w.iter_mut() {
                    if let CatPart::B(p) = part {
                        if self.interior(p) {
                            *part = CatPart::D(self.convert(p)?);
                            changed = true;
                        }
                    }
                }
                let mut i = 0;
                while i + 1 < w.len() {
                    let merged = match (&w[i], &w[i + 1]) {
                        (CatPart::D(m1), CatPart::D(m2)) => Some(CatPart::D(
                            self.d
                                .then(m1, m2)
                                .ok_or_else(|| {
                                    formula_cert(format!("adjacent letters {m1}, {m2} do not compose"))
                                })?
                                .clone(),
                        )),
                        (CatPart::B(p1), CatPart::B(p2)) if self.b.tgt(p1) == self.b.src(p2) => {
                            Some(CatPart::B(
                                self.b
                                    .then(p1, p2)
                                    .ok_or_else(|| {
                                        formula_cert(format!(
                                            "adjacent letters {p1}, {p2} do not compose"
                                        ))
                                    })?
                                    .clone(),
                            ))
                        }
                        _ => None,
                    };
                    if let Some(m) = merged {
                        w[i] = m;
                        w.remove(i + 1);
                        changed = true;
                    } else {
                        i += 1;
                    }
                }
                let mut i = 0;
                while w.len() >= 2 && i < w.len() {
                    if self.is_identity_part(&w[i]) && self.droppable(&w, i) {
                        w.remove(i);
                        changed = true;
                    } else {
                        i += 1;
                    }
                }
            }
            let mut bridged = false;
            for i in 0..w.len().saturating_sub(1) {
                if let (CatPart::B(p1), CatPart::B(p2)) = (&w[i], &w[i + 1]) {
                    if self.b.tgt(p1) == self.b.src(p2) {
                        continue;
                    }
                    let t = self.b.tgt(p1).expect("morphism of B");
                    let s = self.b.src(p2).expect("morphism of B");
                    if !self.in_a(t) || !self.in_a(s) {
                        return Err(formula_cert(format!(
                            "letters {p1}, {p2} meet outside the subcategory"
                        )));
                    }
                    let (zt, zs) = (self.f.apply_ob(t), self.f.apply_ob(s));
                    if zt != zs {
                        return Err(formula_cert(format!(
                            "letters {p1}, {p2} are not glued to a common object"
                        )));
                    }
                    let z = zt.expect("subcategory object has an image");
                    let idz = self.d.id_of(z).expect("target identity").clone();
                    w.insert(i + 1, CatPart::D(idz));
                    bridged = true;
                    break;
                }
            }
            if !bridged {
                return Ok(w);
            }
        }
    }
}

struct FullCatPushout {
    category: FinCategory,
    from_d: FinFunctor,
    from_b: FinFunctor,
    /// Normal-form word behind each pushout morphism name.
    word_names: BTreeMap<Vec<CatPart>, MorId>,
}

/// Pushout of `D <- A -> B` where `A` is the full subcategory of `b` on
/// `a_objects` and `f : A -> D` attaches it. Morphisms are enumerated as
/// normal-form words: a morphism of `D`, a morphism of `B` not interior to
/// `A`, or such a morphism entering and/or leaving `D` through at most one
/// middle letter.
fn pushout_cat_full_internal(
    b: &FinCategory,
    a_objects: &BTreeSet<ObId>,
    f: &FinFunctor,
) -> Result<FullCatPushout, FormulaError> {
    for x in a_objects {
        if b.id_of(x).is_none() {
            return Err(FormulaError::Shape { detail: format!("{x} is not an object of the ambient category") });
        }
    }
    let a = b.full_subcategory(a_objects);
    if f.source() != &a {
        let src = f.source();
        if src.objects().collect::<BTreeSet<_>>() == a.objects().collect::<BTreeSet<_>>() {
            if let Some(missing) = a.mor_ids().find(|m| src.src(m).is_none()) {
                return Err(FormulaError::InclusionNotFull { missing: missing.clone() });
            }
        }
        return Err(FormulaError::Shape {
            detail: "the attaching functor's source is not the full subcategory on the given objects".into(),
        });
    }
    if let Err(es) = f.validate() {
        return Err(FormulaError::Shape { detail: format!("invalid attaching functor: {}", join_errs(&es)) });
    }
    let d = f.target();
    let ctx = CatWordCtx { b, d, a_objects, f };

    // Objects: those of D, plus the ambient objects outside the
    // subcategory under fresh names.
    let mut taken_obs: BTreeSet<String> = d.objects().map(|o| o.0.clone()).collect();
    let mut b_ob: BTreeMap<ObId, ObId> = BTreeMap::new();
    for x in b.objects() {
        if ctx.in_a(x) {
            b_ob.insert(x.clone(), f.apply_ob(x).expect("validated functor").clone());
        } else {
            let name = fresh(&x.0, &taken_obs);
            taken_obs.insert(name.clone());
            b_ob.insert(x.clone(), ObId(name));
        }
    }

    // Reserve names: D keeps its own, ambient letters are primed off them.
    let mut taken_mors: BTreeSet<String> = d.mor_ids().map(|m| m.0.clone()).collect();
    let mut b_name: BTreeMap<MorId, String> = BTreeMap::new();
    for p in b.mor_ids() {
        if !ctx.interior(p) {
            let name = fresh(&p.0, &taken_mors);
            taken_mors.insert(name.clone());
            b_name.insert(p.clone(), name);
        }
    }

    // Enumerate the normal forms.
    let mut forms: Vec<Vec<CatPart>> = Vec::new();
    for m in d.mor_ids() {
        forms.push(vec![CatPart::D(m.clone())]);
    }
    let outer: Vec<&MorId> = b.mor_ids().filter(|p| !ctx.interior(p)).collect();
    for p in &outer {
        forms.push(vec![CatPart::B((*p).clone())]);
    }
    let entering: Vec<&MorId> = outer
        .iter()
        .copied()
        .filter(|p| !b.is_identity(p) && ctx.in_a(b.tgt(p).expect("morphism of B")))
        .collect();
    let leaving: Vec<&MorId> = outer
        .iter()
        .copied()
        .filter(|p| !b.is_identity(p) && ctx.in_a(b.src(p).expect("morphism of B")))
        .collect();
    let glued = |x: &ObId| f.apply_ob(x).expect("subcategory object").clone();
    for p in &entering {
        let at = glued(b.tgt(p).expect("morphism of B"));
        for m in d.mor_ids() {
            if !d.is_identity(m) && d.src(m) == Some(&at) {
                forms.push(vec![CatPart::B((*p).clone()), CatPart::D(m.clone())]);
            }
        }
    }
    for p in &leaving {
        let at = glued(b.src(p).expect("morphism of B"));
        for m in d.mor_ids() {
            if !d.is_identity(m) && d.tgt(m) == Some(&at) {
                forms.push(vec![CatPart::D(m.clone()), CatPart::B((*p).clone())]);
            }
        }
    }
    for p1 in &entering {
        let at1 = glued(b.tgt(p1).expect("morphism of B"));
        for p2 in &leaving {
            let at2 = glued(b.src(p2).expect("morphism of B"));
            for m in d.mor_ids() {
                if d.src(m) != Some(&at1) || d.tgt(m) != Some(&at2) {
                    continue;
                }
                if d.is_identity(m) && b.tgt(p1) == b.src(p2) {
                    continue;
                }
                forms.push(vec![
                    CatPart::B((*p1).clone()),
                    CatPart::D(m.clone()),
                    CatPart::B((*p2).clone()),
                ]);
            }
        }
    }
    forms.sort();

    let mut word_names: BTreeMap<Vec<CatPart>, MorId> = BTreeMap::new();
    for w in &forms {
        let name = match w.as_slice() {
            [CatPart::D(m)] => m.0.clone(),
            [CatPart::B(p)] => b_name[p].clone(),
            _ => {
                let base = w
                    .iter()
                    .map(|part| match part {
                        CatPart::B(p) => b_name[p].clone(),
                        CatPart::D(m) => m.0.clone(),
                    })
                    .collect::<Vec<_>>()
                    .join("*");
                let n = fresh(&base, &taken_mors);
                taken_mors.insert(n.clone());
                n
            }
        };
        word_names.insert(w.clone(), MorId(name));
    }

    let word_src = |w: &[CatPart]| -> ObId {
        match w.first().expect("words are nonempty") {
            CatPart::B(p) => b_ob[b.src(p).expect("morphism of B")].clone(),
            CatPart::D(m) => d.src(m).expect("morphism of D").clone(),
        }
    };
    let word_tgt = |w: &[CatPart]| -> ObId {
        match w.last().expect("words are nonempty") {
            CatPart::B(p) => b_ob[b.tgt(p).expect("morphism of B")].clone(),
            CatPart::D(m) => d.tgt(m).expect("morphism of D").clone(),
        }
    };

    let mut cat = FinCategory::new();
    for o in d.objects() {
        cat.add_object(o.clone());
    }
    for x in b.objects() {
        if !ctx.in_a(x) {
            cat.add_object(b_ob[x].clone());
        }
    }
    for (w, n) in &word_names {
        cat.add_morphism(n.clone(), word_src(w), word_tgt(w));
    }
    for o in d.objects() {
        let idw = vec![CatPart::D(d.id_of(o).expect("valid target").clone())];
        cat.set_identity(o.clone(), word_names[&idw].clone());
    }
    for x in b.objects() {
        if !ctx.in_a(x) {
            let idw = vec![CatPart::B(b.id_of(x).expect("valid ambient").clone())];
            cat.set_identity(b_ob[x].clone(), word_names[&idw].clone());
        }
    }
    for (w1, n1) in &word_names {
        for (w2, n2) in &word_names {
            if word_tgt(w1) != word_src(w2) {
                continue;
            }
            let mut concat = w1.clone();
            concat.extend(w2.iter().cloned());
            let reduced = ctx.reduce(&concat)?;
            let n = word_names.get(&reduced).ok_or_else(|| {
                formula_cert(format!("composite of {n1} and {n2} reduces outside the normal forms"))
            })?;
            cat.set_then(n1.clone(), n2.clone(), n.clone());
        }
    }
    if let Err(es) = cat.validate() {
        return Err(formula_cert(format!("pushout category is invalid: {}", join_errs(&es))));
    }

    let from_d = FinFunctor::new(
        d.clone(),
        cat.clone(),
        d.objects().map(|o| (o.clone(), o.clone())).collect(),
        d.mor_ids()
            .map(|m| (m.clone(), word_names[&vec![CatPart::D(m.clone())]].clone()))
            .collect(),
    );
    let mut b_mor_map: BTreeMap<MorId, MorId> = BTreeMap::new();
    for p in b.mor_ids() {
        let img = if ctx.interior(p) {
            word_names[&vec![CatPart::D(ctx.convert(p)?)]].clone()
        } else {
            word_names[&vec![CatPart::B(p.clone())]].clone()
        };
        b_mor_map.insert(p.clone(), img);
    }
    let from_b = FinFunctor::new(b.clone(), cat.clone(), b_ob, b_mor_map);
    for (leg, which) in [(&from_d, "attached"), (&from_b, "ambient")] {
        if let Err(es) = leg.validate() {
            return Err(formula_cert(format!("{which} cocone leg is invalid: {}", join_errs(&es))));
        }
    }
    Ok(FullCatPushout { category: cat, from_d, from_b, word_names })
}

/// Pushout of `D <- A -> B` in categories, where `A` is the full
/// subcategory of `b` on `a_objects` and `f : A -> D` is the attaching
/// functor. Morphisms of the result are normal-form words over `B` and `D`.
pub fn pushout_cat_full(
    b: &FinCategory,
    a_objects: &BTreeSet<ObId>,
    f: &FinFunctor,
) -> Result<CatPushout, FormulaError> {
    let p = pushout_cat_full_internal(b, a_objects, f)?;
    Ok(CatPushout { category: p.category, from_d: p.from_d, from_b: p.from_b })
}

/// Pushout of `D <- A_disc x C -> B_disc x C` for object sets `A ⊆ B`: the
/// result is `D` next to one disjoint copy of `C` per object outside `A`.
pub fn pushout_cat_disc_times(
    b_objects: &BTreeSet<ObId>,
    a_objects: &BTreeSet<ObId>,
    c: &FinCategory,
    f: &FinFunctor,
) -> Result<CatPushout, FormulaError> {
    if !a_objects.is_subset(b_objects) {
        return Err(FormulaError::Shape { detail: "the attached objects are not a subset".into() });
    }
    let a_disc = FinCategory::discrete(a_objects.iter().cloned());
    let expected = a_disc.product(c);
    if f.source() != &expected {
        return Err(FormulaError::Shape {
            detail: "the attaching functor's source is not discrete(A) x C".into(),
        });
    }
    if let Err(es) = f.validate() {
        return Err(FormulaError::Shape { detail: format!("invalid attaching functor: {}", join_errs(&es)) });
    }
    let d = f.target();
    let mut cat = d.clone();
    let mut taken_obs: BTreeSet<String> = d.objects().map(|o| o.0.clone()).collect();
    let mut taken_mors: BTreeSet<String> = d.mor_ids().map(|m| m.0.clone()).collect();
    let mut ob_name: BTreeMap<(ObId, ObId), ObId> = BTreeMap::new();
    let mut mor_name: BTreeMap<(ObId, MorId), MorId> = BTreeMap::new();
    let new_objects: Vec<&ObId> = b_objects.iter().filter(|x| !a_objects.contains(*x)).collect();
    for x in &new_objects {
        for co in c.objects() {
            let name = fresh(&paired(&x.0, &co.0), &taken_obs);
            taken_obs.insert(name.clone());
            cat.add_object(name.clone());
            ob_name.insert(((*x).clone(), co.clone()), ObId(name));
        }
        for (g, hom) in c.morphisms() {
            let name = fresh(&paired(&x.0, &g.0), &taken_mors);
            taken_mors.insert(name.clone());
            cat.add_morphism(
                name.clone(),
                ob_name[&((*x).clone(), hom.src.clone())].clone(),
                ob_name[&((*x).clone(), hom.tgt.clone())].clone(),
            );
            mor_name.insert(((*x).clone(), g.clone()), MorId(name));
        }
        for co in c.objects() {
            cat.set_identity(
                ob_name[&((*x).clone(), co.clone())].clone(),
                mor_name[&((*x).clone(), c.id_of(co).expect("valid factor").clone())].clone(),
            );
        }
        for (g1, g2) in c.composable_pairs() {
            let g3 = c.then(&g1, &g2).expect("valid factor").clone();
            cat.set_then(
                mor_name[&((*x).clone(), g1)].clone(),
                mor_name[&((*x).clone(), g2)].clone(),
                mor_name[&((*x).clone(), g3)].clone(),
            );
        }
    }
    if let Err(es) = cat.validate() {
        return Err(formula_cert(format!("pushout category is invalid: {}", join_errs(&es))));
    }
    let from_d = FinFunctor::new(
        d.clone(),
        cat.clone(),
        d.objects().map(|o| (o.clone(), o.clone())).collect(),
        d.mor_ids().map(|m| (m.clone(), m.clone())).collect(),
    );
    let b_disc = FinCategory::discrete(b_objects.iter().cloned());
    let source = b_disc.product(c);
    let mut ob_map: BTreeMap<ObId, ObId> = BTreeMap::new();
    let mut mor_map: BTreeMap<MorId, MorId> = BTreeMap::new();
    for x in b_objects {
        for co in c.objects() {
            let key = ObId(paired(&x.0, &co.0));
            let img = if a_objects.contains(x) {
                f.apply_ob(&key).expect("validated functor").clone()
            } else {
                ob_name[&(x.clone(), co.clone())].clone()
            };
            ob_map.insert(key, img);
        }
        let idx = b_disc.id_of(x).expect("discrete identity");
        for g in c.mor_ids() {
            let key = MorId(paired(&idx.0, &g.0));
            let img = if a_objects.contains(x) {
                f.apply_mor(&key).expect("validated functor").clone()
            } else {
                mor_name[&(x.clone(), g.clone())].clone()
            };
            mor_map.insert(key, img);
        }
    }
    let from_b = FinFunctor::new(source, cat.clone(), ob_map, mor_map);
    for (leg, which) in [(&from_d, "attached"), (&from_b, "ambient")] {
        if let Err(es) = leg.validate() {
            return Err(formula_cert(format!("{which} cocone leg is invalid: {}", join_errs(&es))));
        }
    }
    Ok(CatPushout { category: cat, from_d, from_b })
}

/// Pushout of `D <- A x C_disc -> B x C_disc` for a full subcategory
/// `A ⊆ B` and a discrete factor: reduces to the full-inclusion formula on
/// the product category.
pub fn pushout_cat_times_set(
    b: &FinCategory,
    a_objects: &BTreeSet<ObId>,
    c_objects: &BTreeSet<ObId>,
    f: &FinFunctor,
) -> Result<CatPushout, FormulaError> {
    let c_disc = FinCategory::discrete(c_objects.iter().cloned());
    let bx = b.product(&c_disc);
    let ax_objects: BTreeSet<ObId> = a_objects
        .iter()
        .flat_map(|x| c_objects.iter().map(|co| ObId(paired(&x.0, &co.0))))
        .collect();
    pushout_cat_full(&bx, &ax_objects, f)
}

/// The two inclusions the double-category pushout formula supports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SupportedInclusion {
    /// Double subdivision of a horn into the subdivided simplex.
    Horn { m: usize, k: usize },
    /// The invertible end of the walking isomorphism.
    PointIntoI,
}

impl SupportedInclusion {
    /// The ambient category and the objects of the full subcategory.
    fn realize(&self) -> Result<(BTreeSet<ObId>, FinCategory), FormulaError> {
        match self {
            SupportedInclusion::Horn { m, k } => {
                let horn = SimplexLikeComplex::horn(*m, *k)
                    .map_err(|e| FormulaError::Shape { detail: e.to_string() })?;
                let delta = SimplexLikeComplex::delta(*m)
                    .map_err(|e| FormulaError::Shape { detail: e.to_string() })?;
                let sub = csd2(&horn);
                let sup = csd2(&delta);
                let obs: BTreeSet<ObId> = sub.objects().cloned().collect();
                if sup.full_subcategory(&obs) != sub {
                    return Err(formula_cert("the horn subdivision is not a full subcategory"));
                }
                Ok((obs, sup))
            }
            SupportedInclusion::PointIntoI => {
                Ok(([ObId::from("1")].into(), FinCategory::walking_iso()))
            }
        }
    }
}

/// One letter of a vertical square word in the double pushout: a square
/// `(p, g)` of the glued external product recorded by its factors, or a
/// square of the attached double category.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum SqPart {
    B(MorId, MorId),
    D(SqId),
}

struct SqWordCtx<'a> {
    b: &'a FinCategory,
    c: &'a FinCategory,
    a_objects: &'a BTreeSet<ObId>,
    f: &'a DoubleFunctor,
    dd: &'a DoubleCategory,
    hp: &'a FullCatPushout,
    vp: &'a FullCatPushout,
    /// Pushout name of a horizontal morphism outside the attached part,
    /// back to its `(object, C-morphism)` factors.
    hor_origin: &'a BTreeMap<MorId, (ObId, MorId)>,
}

impl SqWordCtx<'_> {
    fn in_a(&self, x: &ObId) -> bool {
        self.a_objects.contains(x)
    }

    fn interior(&self, p: &MorId) -> bool {
        self.in_a(self.b.src(p).expect("morphism of B"))
            && self.in_a(self.b.tgt(p).expect("morphism of B"))
    }

    fn convert(&self, p: &MorId, g: &MorId) -> Result<SqId, FormulaError> {
        self.f
            .apply_sq(&SqId(paired(&p.0, &g.0)))
            .cloned()
            .ok_or_else(|| formula_cert(format!("no attaching image for interior square ({p}, {g})")))
    }

    /// The pushout name of the product horizontal morphism `(a, g)`.
    fn hor_b(&self, a: &ObId, g: &MorId) -> MorId {
        self.hp
            .from_b
            .apply_mor(&MorId(paired(&a.0, &g.0)))
            .expect("product morphism")
            .clone()
    }

    /// The pushout name of the product vertical morphism `(p, co)`.
    fn ver_b(&self, p: &MorId, co: &ObId) -> MorId {
        self.vp
            .from_b
            .apply_mor(&MorId(paired(&p.0, &co.0)))
            .expect("product morphism")
            .clone()
    }

    fn part_top(&self, part: &SqPart) -> MorId {
        match part {
            SqPart::B(p, g) => self.hor_b(self.b.src(p).expect("morphism of B"), g),
            SqPart::D(s) => self
                .hp
                .from_d
                .apply_mor(&self.dd.boundary(s).expect("square of D").top)
                .expect("attached morphism")
                .clone(),
        }
    }

    fn part_bottom(&self, part: &SqPart) -> MorId {
        match part {
            SqPart::B(p, g) => self.hor_b(self.b.tgt(p).expect("morphism of B"), g),
            SqPart::D(s) => self
                .hp
                .from_d
                .apply_mor(&self.dd.boundary(s).expect("square of D").bottom)
                .expect("attached morphism")
                .clone(),
        }
    }

    fn part_left(&self, part: &SqPart) -> MorId {
        match part {
            SqPart::B(p, g) => self.ver_b(p, self.c.src(g).expect("morphism of C")),
            SqPart::D(s) => self
                .vp
                .from_d
                .apply_mor(&self.dd.boundary(s).expect("square of D").left)
                .expect("attached morphism")
                .clone(),
        }
    }

    fn part_right(&self, part: &SqPart) -> MorId {
        match part {
            SqPart::B(p, g) => self.ver_b(p, self.c.tgt(g).expect("morphism of C")),
            SqPart::D(s) => self
                .vp
                .from_d
                .apply_mor(&self.dd.boundary(s).expect("square of D").right)
                .expect("attached morphism")
                .clone(),
        }
    }

    fn word_boundary(&self, w: &[SqPart]) -> Result<SquareBoundary, FormulaError> {
        let top = self.part_top(w.first().expect("words are nonempty"));
        let bottom = self.part_bottom(w.last().expect("words are nonempty"));
        let lefts: Vec<MorId> = w.iter().map(|p| self.part_left(p)).collect();
        let rights: Vec<MorId> = w.iter().map(|p| self.part_right(p)).collect();
        let left = self
            .vp
            .category
            .then_path(&lefts)
            .ok_or_else(|| formula_cert("left boundary path does not compose"))?;
        let right = self
            .vp
            .category
            .then_path(&rights)
            .ok_or_else(|| formula_cert("right boundary path does not compose"))?;
        Ok(SquareBoundary { top, bottom, left, right })
    }

    fn is_identity_part(&self, part: &SqPart) -> bool {
        match part {
            SqPart::B(p, _) => self.b.is_identity(p),
            SqPart::D(s) => self.dd.is_ver_unit(s),
        }
    }

    /// Adjacent product letters glue directly exactly when they stack in
    /// the product itself.
    fn stackable(&self, p1: &MorId, g1: &MorId, p2: &MorId, g2: &MorId) -> bool {
        self.b.tgt(p1) == self.b.src(p2) && g1 == g2
    }

    fn droppable(&self, w: &[SqPart], i: usize) -> bool {
        if matches!(w[i], SqPart::D(_)) && i > 0 && i + 1 < w.len() {
            if let (SqPart::B(p1, g1), SqPart::B(p2, g2)) = (&w[i - 1], &w[i + 1]) {
                return self.stackable(p1, g1, p2, g2);
            }
        }
        true
    }

    fn reduce(&self, word: &[SqPart]) -> Result<Vec<SqPart>, FormulaError> {
        let mut w: Vec<SqPart> = word.to_vec();
        loop {
            let mut changed = true;
            while changed {
                changed = false;
                for part in w.iter_mut() {
                    if let SqPart::B(p, g) = part {
                        if self.interior(p) {
                            *part = SqPart::D(self.convert(p, g)?);
                            changed = true;
                        }
                    }
                }
                let mut i = 0;
                while i + 1 < w.len() {
                    let merged = match (&w[i], &w[i + 1]) {
                        (SqPart::D(s1), SqPart::D(s2)) => Some(SqPart::D(
                            self.dd
                                .stack(s1, s2)
                                .ok_or_else(|| {
                                    formula_cert(format!("adjacent squares {s1}, {s2} do not stack"))
                                })?
                                .clone(),
                        )),
                        (SqPart::B(p1, g1), SqPart::B(p2, g2)) if self.stackable(p1, g1, p2, g2) => {
                            Some(SqPart::B(
                                self.b.then(p1, p2).expect("stackable letters compose").clone(),
                                g1.clone(),
                            ))
                        }
                        _ => None,
                    };
                    if let Some(m) = merged {
                        w[i] = m;
                        w.remove(i + 1);
                        changed = true;
                    } else {
                        i += 1;
                    }
                }
                let mut i = 0;
                while w.len() >= 2 && i < w.len() {
                    if self.is_identity_part(&w[i]) && self.droppable(&w, i) {
                        w.remove(i);
                        changed = true;
                    } else {
                        i += 1;
                    }
                }
            }
            let mut bridged = false;
            for i in 0..w.len().saturating_sub(1) {
                if let (SqPart::B(p1, g1), SqPart::B(p2, g2)) = (&w[i], &w[i + 1]) {
                    if self.stackable(p1, g1, p2, g2) {
                        continue;
                    }
                    let t = self.b.tgt(p1).expect("morphism of B");
                    let s = self.b.src(p2).expect("morphism of B");
                    if !self.in_a(t) || !self.in_a(s) {
                        return Err(formula_cert(format!(
                            "squares ({p1}, {g1}), ({p2}, {g2}) meet outside the subcategory"
                        )));
                    }
                    let ht = self.f.hor_part().apply_mor(&MorId(paired(&t.0, &g1.0))).cloned();
                    let hs = self.f.hor_part().apply_mor(&MorId(paired(&s.0, &g2.0))).cloned();
                    if ht.is_none() || ht != hs {
                        return Err(formula_cert(format!(
                            "squares ({p1}, {g1}), ({p2}, {g2}) are not glued along a common edge"
                        )));
                    }
                    let h = ht.expect("checked above");
                    let unit = self.dd.ver_unit_on(&h).expect("valid target").clone();
                    w.insert(i + 1, SqPart::D(unit));
                    bridged = true;
                    break;
                }
            }
            if !bridged {
                return Ok(w);
            }
        }
    }

    /// The two-sided stack inverse of `p`, if any.
    fn stack_inverse(&self, p: &MorId) -> Option<MorId> {
        let id_src = self.b.id_of(self.b.src(p)?)?;
        let id_tgt = self.b.id_of(self.b.tgt(p)?)?;
        self.b
            .mor_ids()
            .filter(|x| self.b.then(p, x) == Some(id_src) && self.b.then(x, p) == Some(id_tgt))
            .min()
            .cloned()
    }

    /// Expand the zero-height unit on `cur` into the stack
    /// `(p, g) . unit . (p^-1, g)`, so that its rows align against a seam
    /// that loops through the attached part and back on the other side.
    fn unit_rows_through(&self, cur: &MorId, p: &MorId) -> Result<Vec<SqPart>, FormulaError> {
        let (a, g) = self
            .hor_origin
            .get(cur)
            .ok_or_else(|| formula_cert(format!("no loop alignment at {cur}")))?;
        if self.b.src(p) != Some(a) {
            return Err(formula_cert(format!("seam letter {p} does not start under {cur}")));
        }
        let inv = self
            .stack_inverse(p)
            .ok_or_else(|| formula_cert(format!("seam letter {p} has no stack inverse")))?;
        let t = self.b.tgt(p).expect("morphism of B");
        if !self.in_a(t) {
            return Err(formula_cert(format!(
                "seam letter {p} does not loop through the attached part"
            )));
        }
        let mid = self
            .f
            .hor_part()
            .apply_mor(&MorId(paired(&t.0, &g.0)))
            .cloned()
            .ok_or_else(|| formula_cert("no attaching image for the loop edge"))?;
        let unit = self
            .dd
            .ver_unit_on(&mid)
            .ok_or_else(|| formula_cert(format!("no stacking unit on {mid}")))?
            .clone();
        Ok(vec![SqPart::B(p.clone(), g.clone()), SqPart::D(unit), SqPart::B(inv, g.clone())])
    }

    /// The zero-height letter sitting on a pushout horizontal morphism: a
    /// stacking unit of the attached category, or of the glued product.
    fn unit_part_at(&self, h: &MorId) -> Result<SqPart, FormulaError> {
        if let Some((a, g)) = self.hor_origin.get(h) {
            return Ok(SqPart::B(
                self.b.id_of(a).expect("ambient identity").clone(),
                g.clone(),
            ));
        }
        let unit = self
            .dd
            .ver_unit_on(h)
            .ok_or_else(|| formula_cert(format!("no stacking unit on {h}")))?;
        Ok(SqPart::D(unit.clone()))
    }

    /// Horizontal composite of two vertical words, by aligning them into
    /// rows along the shared seam and composing row by row.
    fn beside_word(&self, w1: &[SqPart], w2: &[SqPart]) -> Result<Vec<SqPart>, FormulaError> {
        let mut q1: VecDeque<SqPart> = w1.to_vec().into();
        let mut q2: VecDeque<SqPart> = w2.to_vec().into();
        let mut cur1 = self.part_top(&q1[0]);
        let mut cur2 = self.part_top(&q2[0]);
        let mut rows: Vec<SqPart> = Vec::new();
        let mut fuel = 8 * (w1.len() + w2.len()) + 16;
        loop {
            if fuel == 0 {
                return Err(formula_cert("seam alignment does not terminate"));
            }
            fuel -= 1;
            // Letters interior to the subcategory convert before matching.
            if let Some(SqPart::B(p, g)) = q1.front() {
                if self.interior(p) {
                    let s = self.convert(p, g)?;
                    q1[0] = SqPart::D(s);
                }
            }
            if let Some(SqPart::B(p, g)) = q2.front() {
                if self.interior(p) {
                    let s = self.convert(p, g)?;
                    q2[0] = SqPart::D(s);
                }
            }
            match (q1.front().cloned(), q2.front().cloned()) {
                (None, None) => break,
                (Some(SqPart::D(s1)), Some(SqPart::D(s2))) => {
                    let b1 = self.dd.boundary(&s1).expect("square of D");
                    let b2 = self.dd.boundary(&s2).expect("square of D");
                    if b1.right != b2.left {
                        return Err(formula_cert(format!("squares {s1}, {s2} do not share a seam")));
                    }
                    let comp = self
                        .dd
                        .beside(&s1, &s2)
                        .ok_or_else(|| formula_cert(format!("squares {s1}, {s2} do not paste")))?
                        .clone();
                    rows.push(SqPart::D(comp));
                    cur1 = self.part_bottom(&q1[0]);
                    cur2 = self.part_bottom(&q2[0]);
                    q1.pop_front();
                    q2.pop_front();
                }
                (Some(SqPart::B(p1, g1)), Some(SqPart::B(p2, g2))) => {
                    if p1 == p2 {
                        let g = self
                            .c
                            .then(&g1, &g2)
                            .ok_or_else(|| {
                                formula_cert(format!("factors {g1}, {g2} do not compose"))
                            })?
                            .clone();
                        rows.push(SqPart::B(p1.clone(), g));
                        cur1 = self.part_bottom(&q1[0]);
                        cur2 = self.part_bottom(&q2[0]);
                        q1.pop_front();
                        q2.pop_front();
                    } else if self.b.src(&p1) != self.b.src(&p2) {
                        return Err(formula_cert(format!(
                            "seam letters {p1}, {p2} start at different objects"
                        )));
                    } else if let Some(x) = self.left_complement(&p1, &p2) {
                        // p2 = p1 then x: split the coarser letter.
                        q2[0] = SqPart::B(x, g2.clone());
                        q2.push_front(SqPart::B(p1.clone(), g2.clone()));
                    } else if let Some(y) = self.left_complement(&p2, &p1) {
                        q1[0] = SqPart::B(y, g1.clone());
                        q1.push_front(SqPart::B(p2.clone(), g1.clone()));
                    } else {
                        return Err(formula_cert(format!(
                            "seam letters {p1}, {p2} have no common refinement"
                        )));
                    }
                }
                (Some(SqPart::D(s1)), _) => {
                    let b1 = self.dd.boundary(&s1).expect("square of D");
                    if !self.dd.ver_cat().is_identity(&b1.right) {
                        return Err(formula_cert(format!(
                            "square {s1} has no zero-height partner on the seam"
                        )));
                    }
                    q2.push_front(self.unit_part_at(&cur2)?);
                }
                (_, Some(SqPart::D(s2))) => {
                    let b2 = self.dd.boundary(&s2).expect("square of D");
                    if !self.dd.ver_cat().is_identity(&b2.left) {
                        return Err(formula_cert(format!(
                            "square {s2} has no zero-height partner on the seam"
                        )));
                    }
                    q1.push_front(self.unit_part_at(&cur1)?);
                }
                (Some(SqPart::B(p1, _)), None) => {
                    if self.b.is_identity(&p1) {
                        q2.push_front(self.unit_part_at(&cur2)?);
                    } else {
                        for part in self.unit_rows_through(&cur2, &p1)?.into_iter().rev() {
                            q2.push_front(part);
                        }
                    }
                }
                (None, Some(SqPart::B(p2, _))) => {
                    if self.b.is_identity(&p2) {
                        q1.push_front(self.unit_part_at(&cur1)?);
                    } else {
                        for part in self.unit_rows_through(&cur1, &p2)?.into_iter().rev() {
                            q1.push_front(part);
                        }
                    }
                }
            }
        }
        self.reduce(&rows)
    }

    /// The morphism completing `prefix` to `whole`, least such when the
    /// ambient category does not cancel.
    fn left_complement(&self, prefix: &MorId, whole: &MorId) -> Option<MorId> {
        let mid = self.b.tgt(prefix)?;
        self.b
            .mor_ids()
            .filter(|x| self.b.src(x) == Some(mid) && self.b.then(prefix, x) == Some(whole))
            .min()
            .cloned()
    }
}

/// Pushout of `𝔻 <- A ⊠ C -> B ⊠ C` in double categories, for one of the
/// two supported full inclusions `A ⊆ B` placed in the vertical factor.
/// Both morphism categories are full-inclusion pushouts; squares are
/// enumerated as vertical words: a square of `𝔻`, a product square outside
/// the attached part, or such a square entering and/or leaving `𝔻`.
pub fn pushout_dblcat_formula(
    i: &SupportedInclusion,
    c: &FinCategory,
    f: &DoubleFunctor,
) -> Result<DblPushout, FormulaError> {
    let (a_objects, b_cat) = i.realize()?;
    let a_cat = b_cat.full_subcategory(&a_objects);
    let a_ext = external_product(&a_cat, c);
    if f.source() != &a_ext {
        return Err(FormulaError::Shape {
            detail: "the attaching functor's source is not the inclusion source times the factor".into(),
        });
    }
    if let Err(es) = f.validate() {
        return Err(FormulaError::Shape { detail: format!("invalid attaching functor: {}", join_errs(&es)) });
    }
    let dd = f.target();
    let b_ext = external_product(&b_cat, c);
    let ax_objects: BTreeSet<ObId> = a_ext.hor_cat().objects().cloned().collect();
    let hp = pushout_cat_full_internal(b_ext.hor_cat(), &ax_objects, &f.hor_part())?;
    let vp = pushout_cat_full_internal(b_ext.ver_cat(), &ax_objects, &f.ver_part())?;
    if hp.category.objects().collect::<Vec<_>>() != vp.category.objects().collect::<Vec<_>>() {
        return Err(formula_cert("the two morphism pushouts disagree on objects"));
    }

    let new_objects: Vec<&ObId> =
        b_cat.objects().filter(|x| !a_objects.contains(*x)).collect();
    let mut hor_origin: BTreeMap<MorId, (ObId, MorId)> = BTreeMap::new();
    for a in &new_objects {
        for g in c.mor_ids() {
            let name = hp
                .from_b
                .apply_mor(&MorId(paired(&a.0, &g.0)))
                .expect("product morphism")
                .clone();
            hor_origin.insert(name, ((*a).clone(), g.clone()));
        }
    }
    let mut ver_factors: BTreeMap<MorId, (MorId, ObId)> = BTreeMap::new();
    for p in b_cat.mor_ids() {
        for co in c.objects() {
            ver_factors.insert(MorId(paired(&p.0, &co.0)), (p.clone(), co.clone()));
        }
    }
    let ctx = SqWordCtx {
        b: &b_cat,
        c,
        a_objects: &a_objects,
        f,
        dd,
        hp: &hp,
        vp: &vp,
        hor_origin: &hor_origin,
    };

    // Enumerate the square normal forms.
    let outer: Vec<&MorId> = b_cat.mor_ids().filter(|p| !ctx.interior(p)).collect();
    let entering: Vec<&MorId> = outer
        .iter()
        .copied()
        .filter(|p| !b_cat.is_identity(p) && a_objects.contains(b_cat.tgt(p).expect("morphism of B")))
        .collect();
    let leaving: Vec<&MorId> = outer
        .iter()
        .copied()
        .filter(|p| !b_cat.is_identity(p) && a_objects.contains(b_cat.src(p).expect("morphism of B")))
        .collect();
    let f_hor = f.hor_part();
    let glued_h = |x: &ObId, g: &MorId| -> MorId {
        f_hor
            .apply_mor(&MorId(paired(&x.0, &g.0)))
            .expect("attached product morphism")
            .clone()
    };
    let mut forms: Vec<Vec<SqPart>> = Vec::new();
    for s in dd.sq_ids() {
        forms.push(vec![SqPart::D(s.clone())]);
    }
    for p in &outer {
        for g in c.mor_ids() {
            forms.push(vec![SqPart::B((*p).clone(), g.clone())]);
        }
    }
    for p in &entering {
        for g in c.mor_ids() {
            let at = glued_h(b_cat.tgt(p).expect("morphism of B"), g);
            for (s, sb) in dd.squares() {
                if !dd.is_ver_unit(s) && sb.top == at {
                    forms.push(vec![SqPart::B((*p).clone(), g.clone()), SqPart::D(s.clone())]);
                }
            }
        }
    }
    for p in &leaving {
        for g in c.mor_ids() {
            let at = glued_h(b_cat.src(p).expect("morphism of B"), g);
            for (s, sb) in dd.squares() {
                if !dd.is_ver_unit(s) && sb.bottom == at {
                    forms.push(vec![SqPart::D(s.clone()), SqPart::B((*p).clone(), g.clone())]);
                }
            }
        }
    }
    for p1 in &entering {
        for g1 in c.mor_ids() {
            let at1 = glued_h(b_cat.tgt(p1).expect("morphism of B"), g1);
            for p2 in &leaving {
                for g2 in c.mor_ids() {
                    let at2 = glued_h(b_cat.src(p2).expect("morphism of B"), g2);
                    for (s, sb) in dd.squares() {
                        if sb.top != at1 || sb.bottom != at2 {
                            continue;
                        }
                        if dd.is_ver_unit(s) && ctx.stackable(p1, g1, p2, g2) {
                            continue;
                        }
                        forms.push(vec![
                            SqPart::B((*p1).clone(), g1.clone()),
                            SqPart::D(s.clone()),
                            SqPart::B((*p2).clone(), g2.clone()),
                        ]);
                    }
                }
            }
        }
    }
    forms.sort();

    let mut taken_sqs: BTreeSet<String> = dd.sq_ids().map(|s| s.0.clone()).collect();
    let mut b_sq_name: BTreeMap<(MorId, MorId), String> = BTreeMap::new();
    for p in &outer {
        for g in c.mor_ids() {
            let name = fresh(&paired(&p.0, &g.0), &taken_sqs);
            taken_sqs.insert(name.clone());
            b_sq_name.insert(((*p).clone(), g.clone()), name);
        }
    }
    let mut word_names: BTreeMap<Vec<SqPart>, SqId> = BTreeMap::new();
    for w in &forms {
        let name = match w.as_slice() {
            [SqPart::D(s)] => s.0.clone(),
            [SqPart::B(p, g)] => b_sq_name[&(p.clone(), g.clone())].clone(),
            _ => {
                let base = w
                    .iter()
                    .map(|part| match part {
                        SqPart::B(p, g) => b_sq_name[&(p.clone(), g.clone())].clone(),
                        SqPart::D(s) => s.0.clone(),
                    })
                    .collect::<Vec<_>>()
                    .join("*");
                let n = fresh(&base, &taken_sqs);
                taken_sqs.insert(n.clone());
                n
            }
        };
        word_names.insert(w.clone(), SqId(name));
    }

    let mut dpo = DoubleCategory::new();
    dpo.set_hor_cat(hp.category.clone());
    dpo.set_ver_cat(vp.category.clone());
    let mut boundaries: BTreeMap<SqId, SquareBoundary> = BTreeMap::new();
    for (w, n) in &word_names {
        let bd = ctx.word_boundary(w)?;
        dpo.add_square(n.clone(), bd.clone());
        boundaries.insert(n.clone(), bd);
    }
    for h in dd.hor_cat().mor_ids() {
        let img = hp.from_d.apply_mor(h).expect("attached morphism").clone();
        let unit = dd.ver_unit_on(h).expect("valid target").clone();
        dpo.set_ver_unit(img, word_names[&vec![SqPart::D(unit)]].clone());
    }
    for a in &new_objects {
        let ida = b_cat.id_of(a).expect("ambient identity").clone();
        for g in c.mor_ids() {
            let img = ctx.hor_b(a, g);
            dpo.set_ver_unit(img, word_names[&vec![SqPart::B(ida.clone(), g.clone())]].clone());
        }
    }
    for (word_v, vname) in &vp.word_names {
        let unit_word: Vec<SqPart> = word_v
            .iter()
            .map(|part| match part {
                CatPart::D(v) => {
                    let u = dd.hor_unit_on(v).expect("valid target");
                    Ok(SqPart::D(u.clone()))
                }
                CatPart::B(vid) => {
                    let (p, co) = ver_factors
                        .get(vid)
                        .ok_or_else(|| formula_cert(format!("unknown product vertical {vid}")))?;
                    let idc = self_id(c, co)?;
                    Ok(SqPart::B(p.clone(), idc))
                }
            })
            .collect::<Result<_, FormulaError>>()?;
        let reduced = ctx.reduce(&unit_word)?;
        let unit = word_names
            .get(&reduced)
            .ok_or_else(|| formula_cert(format!("pasting unit on {vname} is not a normal form")))?;
        dpo.set_hor_unit(vname.clone(), unit.clone());
    }
    for (w1, n1) in &word_names {
        for (w2, n2) in &word_names {
            let (b1, b2) = (&boundaries[n1], &boundaries[n2]);
            if b1.bottom == b2.top {
                let mut concat = w1.clone();
                concat.extend(w2.iter().cloned());
                let reduced = ctx.reduce(&concat)?;
                let n = word_names.get(&reduced).ok_or_else(|| {
                    formula_cert(format!("stack of {n1} and {n2} reduces outside the normal forms"))
                })?;
                dpo.set_stack(n1.clone(), n2.clone(), n.clone());
            }
            if b1.right == b2.left {
                let composed = ctx.beside_word(w1, w2)?;
                let n = word_names.get(&composed).ok_or_else(|| {
                    formula_cert(format!("pasting of {n1} and {n2} reduces outside the normal forms"))
                })?;
                dpo.set_beside(n1.clone(), n2.clone(), n.clone());
            }
        }
    }
    if let Err(es) = dpo.validate() {
        return Err(formula_cert(format!("pushout double category is invalid: {}", join_errs(&es))));
    }

    let from_d = DoubleFunctor::new(
        dd.clone(),
        dpo.clone(),
        hp.from_d.ob_map().clone(),
        hp.from_d.mor_map().clone(),
        vp.from_d.mor_map().clone(),
        dd.sq_ids()
            .map(|s| (s.clone(), word_names[&vec![SqPart::D(s.clone())]].clone()))
            .collect(),
    );
    let mut sq_map: BTreeMap<SqId, SqId> = BTreeMap::new();
    for (s, _) in b_ext.squares() {
        let parts = b_ext_square_factors(&b_cat, c, s)
            .ok_or_else(|| formula_cert(format!("square {s} is not a product square")))?;
        let reduced = ctx.reduce(&[SqPart::B(parts.0, parts.1)])?;
        let img = word_names
            .get(&reduced)
            .ok_or_else(|| formula_cert(format!("image of {s} is not a normal form")))?;
        sq_map.insert(s.clone(), img.clone());
    }
    let from_b = DoubleFunctor::new(
        b_ext.clone(),
        dpo.clone(),
        hp.from_b.ob_map().clone(),
        hp.from_b.mor_map().clone(),
        vp.from_b.mor_map().clone(),
        sq_map,
    );
    for (leg, which) in [(&from_d, "attached"), (&from_b, "ambient")] {
        if let Err(es) = leg.validate() {
            return Err(formula_cert(format!("{which} cocone leg is invalid: {}", join_errs(&es))));
        }
    }
    Ok(DblPushout { double: dpo, from_d, from_b })
}

fn self_id(c: &FinCategory, co: &ObId) -> Result<MorId, FormulaError> {
    c.id_of(co)
        .cloned()
        .ok_or_else(|| formula_cert(format!("factor object {co} has no identity")))
}

/// The `(B-morphism, C-morphism)` factors of an external-product square.
fn b_ext_square_factors(b: &FinCategory, c: &FinCategory, s: &SqId) -> Option<(MorId, MorId)> {
    for p in b.mor_ids() {
        for g in c.mor_ids() {
            if paired(&p.0, &g.0) == s.0 {
                return Some((p.clone(), g.clone()));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::enumerate::{double_functors_between, functors_between};
    use crate::core::iso::{cat_iso_search, double_iso_search};
    use crate::core::ops::{external_product, external_product_functor, inclusion_functor, terminal};

    fn budget() -> Budget {
        Budget::default()
    }

    /// Index category for a span: `l <- m -> r`.
    fn span_index() -> FinCategory {
        let mut ix = FinCategory::new();
        for o in ["l", "m", "r"] {
            ix.add_object(o);
            ix.add_morphism(format!("id_{o}"), o, o);
            ix.set_identity(o, format!("id_{o}"));
        }
        ix.add_morphism("ml", "m", "l");
        ix.add_morphism("mr", "m", "r");
        ix.close_identities();
        ix
    }

    fn functor(
        source: &FinCategory,
        target: &FinCategory,
        obs: &[(&str, &str)],
        mors: &[(&str, &str)],
    ) -> FinFunctor {
        let f = FinFunctor::new(
            source.clone(),
            target.clone(),
            obs.iter().map(|(a, b)| (ObId::from(*a), ObId::from(*b))).collect(),
            mors.iter().map(|(a, b)| (MorId::from(*a), MorId::from(*b))).collect(),
        );
        f.validate().expect("test functor is valid");
        f
    }

    fn cat_span(
        m: FinCategory,
        l: FinCategory,
        r: FinCategory,
        ml: FinFunctor,
        mr: FinFunctor,
    ) -> CatDiagram {
        CatDiagram {
            index: span_index(),
            nodes: [("m".into(), m), ("l".into(), l), ("r".into(), r)]
                .into_iter()
                .collect(),
            edges: [("ml".into(), ml), ("mr".into(), mr)].into_iter().collect(),
        }
    }

    #[test]
    fn one_node_colimit_returns_the_node_up_to_renaming() {
        let d = CatDiagram {
            index: FinCategory::discrete(["only"]),
            nodes: [("only".into(), FinCategory::ordinal(1))].into_iter().collect(),
            edges: BTreeMap::new(),
        };
        let c = colimit_cat(&d, &budget()).expect("colimit exists");
        assert_eq!(c.category.object_count(), 2);
        assert_eq!(c.category.morphism_count(), 3);
        assert!(cat_iso_search(&c.category, &FinCategory::ordinal(1)).is_some());
        assert!(c.cocone[&ObId::from("only")].is_fully_faithful());
    }

    #[test]
    fn identity_gluing_span_collapses_to_the_interval() {
        let pair = FinCategory::discrete(["0", "1"]);
        let ml = FinFunctor::identity(&pair);
        let mr = functor(
            &pair,
            &FinCategory::ordinal(1),
            &[("0", "0"), ("1", "1")],
            &[("id_0", "0<=0"), ("id_1", "1<=1")],
        );
        let d = cat_span(pair.clone(), pair, FinCategory::ordinal(1), ml, mr);
        let c = colimit_cat(&d, &budget()).expect("colimit exists");
        assert_eq!(c.category.object_count(), 2);
        assert_eq!(c.category.morphism_count(), 3);
        assert!(cat_iso_search(&c.category, &FinCategory::ordinal(1)).is_some());
    }

    #[test]
    fn gluing_intervals_into_a_cycle_exceeds_the_path_budget() {
        let pair = FinCategory::discrete(["a", "b"]);
        let iv = FinCategory::ordinal(1);
        let ml = functor(
            &pair,
            &iv,
            &[("a", "0"), ("b", "1")],
            &[("id_a", "0<=0"), ("id_b", "1<=1")],
        );
        let mr = functor(
            &pair,
            &iv,
            &[("a", "1"), ("b", "0")],
            &[("id_a", "1<=1"), ("id_b", "0<=0")],
        );
        let d = cat_span(pair, iv.clone(), iv, ml, mr);
        let err = colimit_cat(&d, &budget()).expect_err("cycle is unbounded");
        assert!(matches!(
            err,
            ColimError::Budget(BudgetExceeded { resource: Resource::Path, .. })
        ));
    }

    #[test]
    fn endpoint_identification_recovers_the_walking_isomorphism() {
        // Collapsing one endpoint of the walking isomorphism onto a point
        // renames an object but keeps the isomorphism.
        let point = FinCategory::discrete(["1"]);
        let iso = FinCategory::walking_iso();
        let ml = functor(&point, &iso, &[("1", "1")], &[("id_1", "id1")]);
        let one = FinCategory::discrete(["*"]);
        let mr = functor(&point, &one, &[("1", "*")], &[("id_1", "id_*")]);
        let d = cat_span(point, iso, one, ml, mr);
        let c = colimit_cat(&d, &budget()).expect("quotient is finite");
        assert_eq!(c.category.object_count(), 2);
        assert_eq!(c.category.morphism_count(), 4);
        assert!(cat_iso_search(&c.category, &FinCategory::walking_iso()).is_some());
    }

    #[test]
    fn diagram_validation_reports_defects() {
        let missing = CatDiagram {
            index: FinCategory::discrete(["a", "b"]),
            nodes: [("a".into(), FinCategory::ordinal(0))].into_iter().collect(),
            edges: BTreeMap::new(),
        };
        let errs = missing.validate().expect_err("node is missing");
        assert!(errs.iter().any(|e| matches!(e, DiagramError::MissingNode(_))));

        // Functorility failure: the long edge is not the composite.
        let iv = FinCategory::ordinal(1);
        let collapse = functor(
            &iv,
            &iv,
            &[("0", "0"), ("1", "0")],
            &[("0<=0", "0<=0"), ("1<=1", "0<=0"), ("0<=1", "0<=0")],
        );
        let incoherent = CatDiagram {
            index: FinCategory::ordinal(2),
            nodes: ["0", "1", "2"]
                .into_iter()
                .map(|o| (ObId::from(o), iv.clone()))
                .collect(),
            edges: [
                ("0<=1".into(), FinFunctor::identity(&iv)),
                ("1<=2".into(), FinFunctor::identity(&iv)),
                ("0<=2".into(), collapse),
            ]
            .into_iter()
            .collect(),
        };
        let errs = incoherent.validate().expect_err("composite edge mismatch");
        assert!(errs.iter().any(|e| matches!(e, DiagramError::CompositeEdge { .. })));
    }

    fn square_free_scheme(hor: FinCategory) -> DoubleDerivationScheme {
        let ver = FinCategory::discrete(hor.objects().cloned());
        DoubleDerivationScheme { hor_cat: hor, ver_cat: ver, squares: BTreeMap::new() }
    }

    #[test]
    fn scheme_colimit_of_square_free_schemes_matches_the_category_colimits() {
        let pair = square_free_scheme(FinCategory::discrete(["0", "1"]));
        let iv = square_free_scheme(FinCategory::ordinal(1));
        let ml = DdsMorphism::identity(&pair);
        let mr = DdsMorphism {
            hor: functor(
                &pair.hor_cat,
                &iv.hor_cat,
                &[("0", "0"), ("1", "1")],
                &[("id_0", "0<=0"), ("id_1", "1<=1")],
            ),
            ver: FinFunctor::identity(&pair.ver_cat),
            sq_map: BTreeMap::new(),
        };
        let d = DdsDiagram {
            index: span_index(),
            nodes: [("m".into(), pair.clone()), ("l".into(), pair), ("r".into(), iv)]
                .into_iter()
                .collect(),
            edges: [("ml".into(), ml), ("mr".into(), mr)].into_iter().collect(),
        };
        let c = colimit_dds(&d, &budget()).expect("colimit exists");
        assert!(c.scheme.squares.is_empty());
        assert!(cat_iso_search(&c.scheme.hor_cat, &FinCategory::ordinal(1)).is_some());
        assert_eq!(c.scheme.ver_cat.object_count(), 2);
        assert_eq!(c.scheme.ver_cat.morphism_count(), 2);
    }

    #[test]
    fn scheme_colimit_identifies_glued_squares() {
        // Three copies of a one-square scheme glued by identities: one
        // square class remains.
        let mut sq = square_free_scheme(FinCategory::ordinal(1));
        sq.squares.insert(
            "q".into(),
            SquareBoundary {
                top: "0<=1".into(),
                bottom: "0<=1".into(),
                left: "id_0".into(),
                right: "id_1".into(),
            },
        );
        let id = DdsMorphism::identity(&sq);
        let d = DdsDiagram {
            index: span_index(),
            nodes: ["m", "l", "r"].into_iter().map(|o| (ObId::from(o), sq.clone())).collect(),
            edges: [("ml".into(), id.clone()), ("mr".into(), id)].into_iter().collect(),
        };
        let c = colimit_dds(&d, &budget()).expect("colimit exists");
        assert_eq!(c.scheme.squares.len(), 1);
        for leg in c.cocone.values() {
            assert_eq!(leg.sq_map.len(), 1);
        }
    }

    #[test]
    fn coproduct_of_terminal_double_categories_is_discrete() {
        use crate::core::ops::terminal;
        let d = DblDiagram {
            index: FinCategory::discrete(["i", "j"]),
            nodes: [("i".into(), terminal()), ("j".into(), terminal())]
                .into_iter()
                .collect(),
            edges: BTreeMap::new(),
        };
        let c = colimit_dblcat(&d, &budget()).expect("coproduct exists");
        assert_eq!(c.double.hor_cat().object_count(), 2);
        assert_eq!(c.double.square_count(), 2);
        assert!(c.double.sq_ids().all(|s| c.double.is_hor_unit(s)));
    }

    #[test]
    fn one_node_double_colimit_is_isomorphic_to_the_node() {
        let node = external_product(&FinCategory::ordinal(1), &FinCategory::ordinal(1));
        let d = DblDiagram {
            index: FinCategory::discrete(["only"]),
            nodes: [("only".into(), node.clone())].into_iter().collect(),
            edges: BTreeMap::new(),
        };
        let c = colimit_dblcat(&d, &budget()).expect("colimit exists");
        assert_eq!(c.double.square_count(), node.square_count());
        assert!(double_iso_search(&c.double, &node).is_some());
        assert!(c.cocone[&ObId::from("only")].is_isomorphism());
    }

    #[test]
    fn gluing_two_horizontal_intervals_end_to_end_composes_freely() {
        // Two horizontal intervals glued at an endpoint: the colimit is the
        // horizontal embedding of the free path with two generators.
        let o0 = FinCategory::ordinal(0);
        let point = external_product(&o0, &o0);
        let hiv = external_product(&o0, &FinCategory::ordinal(1));
        let to_end = functor(&o0, &FinCategory::ordinal(1), &[("0", "1")], &[("0<=0", "1<=1")]);
        let to_start = functor(&o0, &FinCategory::ordinal(1), &[("0", "0")], &[("0<=0", "0<=0")]);
        let ml = external_product_functor(&FinFunctor::identity(&o0), &to_end);
        let mr = external_product_functor(&FinFunctor::identity(&o0), &to_start);
        let d = DblDiagram {
            index: span_index(),
            nodes: [
                ("m".into(), point),
                ("l".into(), hiv.clone()),
                ("r".into(), hiv),
            ]
            .into_iter()
            .collect(),
            edges: [("ml".into(), ml), ("mr".into(), mr)].into_iter().collect(),
        };
        let c = colimit_dblcat(&d, &budget()).expect("colimit exists");
        assert_eq!(c.double.hor_cat().object_count(), 3);
        assert_eq!(c.double.hor_cat().morphism_count(), 6);
        assert_eq!(c.double.square_count(), 6);
        let expected = external_product(&o0, &FinCategory::ordinal(2));
        assert!(double_iso_search(&c.double, &expected).is_some());
    }

    #[test]
    fn gluing_vertical_intervals_into_a_cycle_exceeds_the_budget() {
        let o0 = FinCategory::ordinal(0);
        let pair = FinCategory::discrete(["a", "b"]);
        let viv = external_product(&FinCategory::ordinal(1), &o0);
        let vpair = external_product(&pair, &o0);
        let fwd = functor(
            &pair,
            &FinCategory::ordinal(1),
            &[("a", "0"), ("b", "1")],
            &[("id_a", "0<=0"), ("id_b", "1<=1")],
        );
        let back = functor(
            &pair,
            &FinCategory::ordinal(1),
            &[("a", "1"), ("b", "0")],
            &[("id_a", "1<=1"), ("id_b", "0<=0")],
        );
        let ml = external_product_functor(&fwd, &FinFunctor::identity(&o0));
        let mr = external_product_functor(&back, &FinFunctor::identity(&o0));
        let d = DblDiagram {
            index: span_index(),
            nodes: [
                ("m".into(), vpair),
                ("l".into(), viv.clone()),
                ("r".into(), viv),
            ]
            .into_iter()
            .collect(),
            edges: [("ml".into(), ml), ("mr".into(), mr)].into_iter().collect(),
        };
        let err = colimit_dblcat(&d, &budget()).expect_err("vertical cycle is unbounded");
        assert!(matches!(err, ColimError::Budget(_)));
    }

    fn horizontal_stage(n: usize) -> DoubleCategory {
        external_product(&FinCategory::ordinal(0), &FinCategory::ordinal(n))
    }

    fn stage_inclusion(n: usize, m: usize) -> DoubleFunctor {
        let src = FinCategory::ordinal(n);
        let tgt = FinCategory::ordinal(m);
        let obs: Vec<(ObId, ObId)> =
            src.objects().map(|o| (o.clone(), o.clone())).collect();
        let mors: Vec<(MorId, MorId)> = src.mor_ids().map(|f| (f.clone(), f.clone())).collect();
        let f = FinFunctor::new(src, tgt, obs.into_iter().collect(), mors.into_iter().collect());
        external_product_functor(&FinFunctor::identity(&FinCategory::ordinal(0)), &f)
    }

    #[test]
    fn directed_chain_colimit_returns_the_last_stage() {
        let d = DblDiagram {
            index: FinCategory::ordinal(2),
            nodes: [
                ("0".into(), horizontal_stage(0)),
                ("1".into(), horizontal_stage(1)),
                ("2".into(), horizontal_stage(2)),
            ]
            .into_iter()
            .collect(),
            edges: [
                ("0<=1".into(), stage_inclusion(0, 1)),
                ("1<=2".into(), stage_inclusion(1, 2)),
                ("0<=2".into(), stage_inclusion(0, 2)),
            ]
            .into_iter()
            .collect(),
        };
        let c = filtered_colimit_dblcat(&d).expect("directed colimit exists");
        assert_eq!(c.double.square_count(), 6);
        assert!(double_iso_search(&c.double, &horizontal_stage(2)).is_some());
        assert!(c.cocone[&ObId::from("2")].is_isomorphism());
    }

    #[test]
    fn non_directed_indices_are_rejected() {
        use crate::core::ops::terminal;
        let no_bound = DblDiagram {
            index: FinCategory::discrete(["i", "j"]),
            nodes: [("i".into(), terminal()), ("j".into(), terminal())]
                .into_iter()
                .collect(),
            edges: BTreeMap::new(),
        };
        assert!(matches!(
            filtered_colimit_dblcat(&no_bound),
            Err(ColimError::NotDirected { .. })
        ));

        let parallel = crate::thomason::parallel_pair();
        let t = terminal();
        let never_equal = DblDiagram {
            index: parallel,
            nodes: [("0".into(), t.clone()), ("1".into(), t.clone())].into_iter().collect(),
            edges: [
                ("f".into(), DoubleFunctor::identity(&t)),
                ("g".into(), DoubleFunctor::identity(&t)),
            ]
            .into_iter()
            .collect(),
        };
        assert!(matches!(
            filtered_colimit_dblcat(&never_equal),
            Err(ColimError::NotDirected { .. })
        ));
    }

    #[test]
    fn diagrams_serialize_round_trip() {
        let d = CatDiagram {
            index: FinCategory::discrete(["only"]),
            nodes: [("only".into(), FinCategory::ordinal(1))].into_iter().collect(),
            edges: BTreeMap::new(),
        };
        let json = serde_json::to_string(&d).expect("serializes");
        let back: CatDiagram = serde_json::from_str(&json).expect("deserializes");
        assert_eq!(back, d);
    }

    /// Cyclic fixtures enumerate exponentially many paths per extra step,
    /// so the engine runs them with a short composition bound.
    fn tight_budget() -> Budget {
        Budget { max_path: 8, ..Budget::default() }
    }

    fn collapse_to_point(src: &FinCategory) -> FinFunctor {
        let f = FinFunctor::new(
            src.clone(),
            FinCategory::ordinal(0),
            src.objects().map(|o| (o.clone(), "0".into())).collect(),
            src.mor_ids().map(|m| (m.clone(), "0<=0".into())).collect(),
        );
        f.validate().expect("collapse functor is valid");
        f
    }

    fn collapse_to_terminal(src: &DoubleCategory) -> DoubleFunctor {
        let f = DoubleFunctor::new(
            src.clone(),
            terminal(),
            src.hor_cat().objects().map(|o| (o.clone(), "*".into())).collect(),
            src.hor_cat().mor_ids().map(|m| (m.clone(), "id_*".into())).collect(),
            src.ver_cat().mor_ids().map(|m| (m.clone(), "id_*".into())).collect(),
            src.sq_ids().map(|s| (s.clone(), "id_*".into())).collect(),
        );
        f.validate().expect("collapse functor is valid");
        f
    }

    #[test]
    fn collapsing_the_iso_endpoint_onto_a_point_returns_the_iso() {
        let b = FinCategory::walking_iso();
        let a_objects: BTreeSet<ObId> = ["1".into()].into();
        let a = b.full_subcategory(&a_objects);
        let f = collapse_to_point(&a);
        let p = pushout_cat_full(&b, &a_objects, &f).expect("formula applies");
        assert_eq!(p.category.object_count(), 2);
        assert_eq!(p.category.morphism_count(), 4);
        assert!(cat_iso_search(&p.category, &b).is_some());
        // The glued endpoint lands on the attached point; the other end is
        // renamed off the point's name.
        assert_eq!(p.from_b.apply_ob(&"1".into()), Some(&"0".into()));
        assert_eq!(p.from_b.apply_ob(&"0".into()), Some(&"0'".into()));
    }

    #[test]
    fn collapsing_a_zigzag_creates_an_idempotent_loop() {
        // B has 0 <-c- 2, 0 -a-> 1 and the composite ca: 2 -> 1; gluing
        // 1 and 2 to a point closes the zigzag into a loop a*c that is
        // idempotent but not an identity.
        let mut b = FinCategory::new();
        for o in ["0", "1", "2"] {
            b.add_object(o);
            b.add_morphism(format!("id{o}"), o, o);
            b.set_identity(o, format!("id{o}"));
        }
        b.add_morphism("a", "0", "1");
        b.add_morphism("c", "2", "0");
        b.add_morphism("ca", "2", "1");
        b.set_then("c", "a", "ca");
        b.close_identities();
        b.validate().expect("fixture is a category");
        let a_objects: BTreeSet<ObId> = ["1".into(), "2".into()].into();
        let a = b.full_subcategory(&a_objects);
        let f = collapse_to_point(&a);

        let p = pushout_cat_full(&b, &a_objects, &f).expect("formula applies");
        assert_eq!(p.category.object_count(), 2);
        assert_eq!(p.category.morphism_count(), 5);
        // c then a passes through the attached part and becomes its identity.
        assert_eq!(p.category.then(&"c".into(), &"a".into()), Some(&"0<=0".into()));
        // a then c bridges through the attached point and stays a loop.
        let w = MorId::from("a*0<=0*c");
        assert_eq!(p.category.then(&"a".into(), &"c".into()), Some(&w));
        assert_eq!(p.category.then(&w, &w), Some(&w));
        assert!(!p.category.is_identity(&w));

        // The saturation engine builds the same category.
        let d = cat_span(a.clone(), FinCategory::ordinal(0), b.clone(), f, inclusion_functor(&a, &b));
        let eng = colimit_cat(&d, &budget()).expect("engine agrees");
        assert!(cat_iso_search(&p.category, &eng.category).is_some());
        // Exactly one functor mediates between the two cocones.
        let mediators: Vec<FinFunctor> = functors_between(&p.category, &eng.category, 10_000)
            .expect("small search")
            .into_iter()
            .filter(|h| {
                p.from_d.then(h) == eng.cocone[&ObId::from("l")]
                    && p.from_b.then(h) == eng.cocone[&ObId::from("r")]
            })
            .collect();
        assert_eq!(mediators.len(), 1);
    }

    #[test]
    fn attaching_along_everything_returns_the_attached_category() {
        let b = FinCategory::ordinal(1);
        let a_objects: BTreeSet<ObId> = b.objects().cloned().collect();
        let f = collapse_to_point(&b);
        let p = pushout_cat_full(&b, &a_objects, &f).expect("formula applies");
        assert_eq!(p.category, FinCategory::ordinal(0));
        assert_eq!(p.from_d, FinFunctor::identity(&p.category));
    }

    #[test]
    fn non_full_attaching_source_is_reported() {
        let b = FinCategory::ordinal(1);
        let a_objects: BTreeSet<ObId> = b.objects().cloned().collect();
        // Same objects and identities as [1], but the arrow is missing.
        let mut src = FinCategory::new();
        for o in ["0", "1"] {
            src.add_object(o);
            src.add_morphism(format!("{o}<={o}"), o, o);
            src.set_identity(o, format!("{o}<={o}"));
        }
        src.close_identities();
        let f = FinFunctor::new(
            src,
            FinCategory::ordinal(0),
            [("0".into(), "0".into()), ("1".into(), "0".into())].into(),
            [("0<=0".into(), "0<=0".into()), ("1<=1".into(), "0<=0".into())].into(),
        );
        let err = pushout_cat_full(&b, &a_objects, &f).expect_err("not full");
        assert_eq!(err, FormulaError::InclusionNotFull { missing: "0<=1".into() });

        // A source with different objects is a plain shape mismatch.
        let g = collapse_to_point(&FinCategory::ordinal(1));
        let err = pushout_cat_full(&b, &["1".into()].into(), &g).expect_err("wrong source");
        assert!(matches!(err, FormulaError::Shape { .. }));
    }

    #[test]
    fn gluing_a_discrete_end_attaches_a_disjoint_copy_of_the_factor() {
        let b_objects: BTreeSet<ObId> = ["0".into(), "1".into()].into();
        let a_objects: BTreeSet<ObId> = ["1".into()].into();
        let c = FinCategory::ordinal(1);
        let src = FinCategory::discrete(a_objects.iter().cloned()).product(&c);
        let f = collapse_to_point(&src);
        let p = pushout_cat_disc_times(&b_objects, &a_objects, &c, &f).expect("formula applies");
        assert_eq!(p.category.object_count(), 3);
        assert_eq!(p.category.morphism_count(), 4);
        // The left-over end carries an untouched copy of the factor.
        let copy = p.from_b.apply_mor(&MorId(paired("id_0", "0<=1"))).expect("mapped");
        assert!(!p.category.is_identity(copy));

        let bx = FinCategory::discrete(b_objects.iter().cloned()).product(&c);
        let d = cat_span(
            src.clone(),
            FinCategory::ordinal(0),
            bx.clone(),
            f.clone(),
            inclusion_functor(&src, &bx),
        );
        let eng = colimit_cat(&d, &budget()).expect("engine agrees");
        assert!(cat_iso_search(&p.category, &eng.category).is_some());

        let err = pushout_cat_disc_times(&a_objects, &b_objects, &c, &f).expect_err("not a subset");
        assert!(matches!(err, FormulaError::Shape { .. }));
    }

    #[test]
    fn multiplying_by_a_point_pair_glues_two_isos_into_an_indiscrete_category() {
        let b = FinCategory::walking_iso();
        let a_objects: BTreeSet<ObId> = ["1".into()].into();
        let c_objects: BTreeSet<ObId> = ["s".into(), "t".into()].into();
        let c_disc = FinCategory::discrete(c_objects.iter().cloned());
        let src = b.full_subcategory(&a_objects).product(&c_disc);
        let f = collapse_to_point(&src);
        let p = pushout_cat_times_set(&b, &a_objects, &c_objects, &f).expect("formula applies");
        // Two isomorphisms wedged at a common point: every hom-set is a
        // singleton.
        assert_eq!(p.category.object_count(), 3);
        assert_eq!(p.category.morphism_count(), 9);
        for x in p.category.objects() {
            for y in p.category.objects() {
                assert_eq!(p.category.hom_set(x, y).len(), 1);
            }
        }

        let bx = b.product(&c_disc);
        let d = cat_span(
            src.clone(),
            FinCategory::ordinal(0),
            bx.clone(),
            f.clone(),
            inclusion_functor(&src, &bx),
        );
        let eng = colimit_cat(&d, &tight_budget()).expect("engine agrees");
        assert!(cat_iso_search(&p.category, &eng.category).is_some());
    }

    #[test]
    fn gluing_the_invertible_end_onto_a_point_keeps_the_iso_vertically() {
        let c = FinCategory::ordinal(0);
        let b_cat = FinCategory::walking_iso();
        let a_objects: BTreeSet<ObId> = ["1".into()].into();
        let a_cat = b_cat.full_subcategory(&a_objects);
        let a_ext = external_product(&a_cat, &c);
        let f = collapse_to_terminal(&a_ext);
        let p = pushout_dblcat_formula(&SupportedInclusion::PointIntoI, &c, &f)
            .expect("formula applies");
        assert_eq!(p.double.hor_cat().object_count(), 2);
        assert_eq!(p.double.square_count(), 4);
        assert!(cat_iso_search(p.double.ver_cat(), &b_cat).is_some());
        assert!(double_iso_search(&p.double, &external_product(&b_cat, &c)).is_some());

        let b_ext = external_product(&b_cat, &c);
        let mr = external_product_functor(&inclusion_functor(&a_cat, &b_cat), &FinFunctor::identity(&c));
        let d = DblDiagram {
            index: span_index(),
            nodes: [("m".into(), a_ext), ("l".into(), terminal()), ("r".into(), b_ext)]
                .into_iter()
                .collect(),
            edges: [("ml".into(), f), ("mr".into(), mr)].into_iter().collect(),
        };
        let eng = colimit_dblcat(&d, &budget()).expect("engine agrees");
        assert!(double_iso_search(&p.double, &eng.double).is_some());
        let mediators: Vec<DoubleFunctor> = double_functors_between(&p.double, &eng.double, 10_000)
            .expect("small search")
            .into_iter()
            .filter(|h| {
                p.from_d.then(h) == eng.cocone[&ObId::from("l")]
                    && p.from_b.then(h) == eng.cocone[&ObId::from("r")]
            })
            .collect();
        assert_eq!(mediators.len(), 1);
    }

    #[test]
    fn point_into_iso_with_an_interval_factor_pastes_loops_onto_units() {
        let c = FinCategory::ordinal(1);
        let b_cat = FinCategory::walking_iso();
        let a_objects: BTreeSet<ObId> = ["1".into()].into();
        let a_cat = b_cat.full_subcategory(&a_objects);
        let a_ext = external_product(&a_cat, &c);
        let f = collapse_to_terminal(&a_ext);
        let p = pushout_dblcat_formula(&SupportedInclusion::PointIntoI, &c, &f)
            .expect("formula applies");
        assert_eq!(p.double.hor_cat().object_count(), 3);
        assert_eq!(p.double.hor_cat().morphism_count(), 4);
        assert_eq!(p.double.ver_cat().morphism_count(), 9);
        assert_eq!(p.double.square_count(), 16);

        // A square that dips into the attached point and climbs back out has
        // an identity seam on the side where its horizontal coordinates
        // agree. Pasting the identity square onto that seam spreads the
        // identity into each row of the loop and gives the loop back.
        let looped = SqId(format!("{}*id_**{}", paired("0~>1", "0<=1"), paired("1~>0", "1<=1")));
        assert!(p.double.has_square(&looped));
        let edges = p.double.boundary(&looped).expect("looped is present").clone();
        let bridged = MorId(format!("{}*id_**{}", paired("0~>1", "0"), paired("1~>0", "1")));
        assert_eq!(edges.left, bridged);
        assert!(p.double.ver_cat().is_identity(&edges.right));
        let unit = SqId(paired("id0", "1<=1"));
        assert!(p.double.has_square(&unit));
        assert_eq!(p.double.beside(&looped, &unit), Some(&looped));

        // The generic engine cannot close this square set: invertible
        // verticals keep producing new pasting candidates until the budget
        // stops the saturation. The formula is the route for this input.
        let b_ext = external_product(&b_cat, &c);
        let mr = external_product_functor(&inclusion_functor(&a_cat, &b_cat), &FinFunctor::identity(&c));
        let d = DblDiagram {
            index: span_index(),
            nodes: [("m".into(), a_ext), ("l".into(), terminal()), ("r".into(), b_ext)]
                .into_iter()
                .collect(),
            edges: [("ml".into(), f), ("mr".into(), mr)].into_iter().collect(),
        };
        let low = Budget { max_path: 8, max_squares: 2_000, ..Budget::default() };
        let err = colimit_dblcat(&d, &low).expect_err("saturation is unbounded");
        assert!(matches!(err, ColimError::Budget(_)));
    }

    #[test]
    fn horn_filling_with_an_interval_factor_matches_the_engine() {
        let c = FinCategory::ordinal(1);
        let horn = SupportedInclusion::Horn { m: 1, k: 0 };
        let (a_objects, b_cat) = horn.realize().expect("realizable");
        let a_cat = b_cat.full_subcategory(&a_objects);
        let a_ext = external_product(&a_cat, &c);
        let f = collapse_to_terminal(&a_ext);
        let p = pushout_dblcat_formula(&horn, &c, &f).expect("formula applies");
        assert_eq!(p.double.hor_cat().object_count(), 9);
        assert_eq!(p.double.square_count(), 25);

        let b_ext = external_product(&b_cat, &c);
        let mr = external_product_functor(&inclusion_functor(&a_cat, &b_cat), &FinFunctor::identity(&c));
        let d = DblDiagram {
            index: span_index(),
            nodes: [("m".into(), a_ext), ("l".into(), terminal()), ("r".into(), b_ext)]
                .into_iter()
                .collect(),
            edges: [("ml".into(), f), ("mr".into(), mr)].into_iter().collect(),
        };
        let eng = colimit_dblcat(&d, &budget()).expect("engine agrees");
        assert_eq!(eng.double.square_count(), 25);
        assert!(double_iso_search(&p.double, &eng.double).is_some());
    }

    #[test]
    fn horn_filling_squares_never_enter_the_attached_part() {
        let c = FinCategory::ordinal(0);
        let horn = SupportedInclusion::Horn { m: 1, k: 0 };
        let (a_objects, b_cat) = horn.realize().expect("realizable");
        assert_eq!(b_cat.object_count(), 5);
        assert_eq!(a_objects.len(), 1);
        // The missing-face poset has no morphisms into the horn part, so no
        // pushout square needs a letter entering the attached category.
        for m in b_cat.mor_ids() {
            if !b_cat.is_identity(m) {
                assert!(!a_objects.contains(b_cat.tgt(m).expect("morphism")));
            }
        }
        let a_cat = b_cat.full_subcategory(&a_objects);
        let a_ext = external_product(&a_cat, &c);
        let f = collapse_to_terminal(&a_ext);
        let p = pushout_dblcat_formula(&horn, &c, &f).expect("formula applies");
        assert_eq!(p.double.hor_cat().object_count(), 5);
        assert_eq!(p.double.hor_cat().morphism_count(), 5);
        assert_eq!(p.double.square_count(), 9);
        // The vertical category is the corresponding one-dimensional pushout.
        let q = pushout_cat_full(&b_cat, &a_objects, &collapse_to_point(&a_cat))
            .expect("formula applies");
        assert!(cat_iso_search(p.double.ver_cat(), &q.category).is_some());

        let b_ext = external_product(&b_cat, &c);
        let mr = external_product_functor(&inclusion_functor(&a_cat, &b_cat), &FinFunctor::identity(&c));
        let d = DblDiagram {
            index: span_index(),
            nodes: [("m".into(), a_ext), ("l".into(), terminal()), ("r".into(), b_ext)]
                .into_iter()
                .collect(),
            edges: [("ml".into(), f), ("mr".into(), mr)].into_iter().collect(),
        };
        let eng = colimit_dblcat(&d, &budget()).expect("engine agrees");
        assert!(double_iso_search(&p.double, &eng.double).is_some());
    }

    #[test]
    fn an_empty_factor_leaves_the_attached_double_category_unchanged() {
        let c = FinCategory::new();
        let dd = external_product(&FinCategory::ordinal(1), &FinCategory::ordinal(1));
        let a_objects: BTreeSet<ObId> = ["1".into()].into();
        let a_cat = FinCategory::walking_iso().full_subcategory(&a_objects);
        let a_ext = external_product(&a_cat, &c);
        let f = DoubleFunctor::new(
            a_ext,
            dd.clone(),
            BTreeMap::new(),
            BTreeMap::new(),
            BTreeMap::new(),
            BTreeMap::new(),
        );
        f.validate().expect("empty functor is valid");
        let p = pushout_dblcat_formula(&SupportedInclusion::PointIntoI, &c, &f)
            .expect("formula applies");
        assert_eq!(p.double, dd);
        assert_eq!(p.from_d, DoubleFunctor::identity(&dd));
    }

    #[test]
    fn mismatched_attaching_sources_are_rejected() {
        let c = FinCategory::ordinal(0);
        let b_cat = FinCategory::walking_iso();
        let b_ext = external_product(&b_cat, &c);
        let f = collapse_to_terminal(&b_ext);
        let err = pushout_dblcat_formula(&SupportedInclusion::PointIntoI, &c, &f)
            .expect_err("source too large");
        assert!(matches!(err, FormulaError::Shape { .. }));

        let err = SupportedInclusion::Horn { m: 1, k: 5 }.realize().expect_err("no such horn");
        assert!(matches!(err, FormulaError::Shape { .. }));
    }
}
