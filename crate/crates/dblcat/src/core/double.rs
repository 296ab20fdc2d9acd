/*! Double categories and their underlying schemes and graphs.

A square has the boundary

```text
        top
     A -----> B
   left|      |right
     v |      | v
     C -----> D
       bottom
```

with `top`, `bottom` horizontal and `left`, `right` vertical. Squares
compose side by side (`beside`, along a shared vertical) and stacked
(`stack`, along a shared horizontal); both are stored as explicit tables,
`(first, second)` meaning first-then-second left to right, respectively top
to bottom. Horizontal units sit on vertical morphisms, vertical units on
horizontal morphisms.
*/

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::category::{FinCategory, Hom, InvalidCategory};
use super::ids::{MorId, ObId, SqId};

/// The four sides of a square.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SquareBoundary {
    pub top: MorId,
    pub bottom: MorId,
    pub left: MorId,
    pub right: MorId,
}

impl SquareBoundary {
    pub fn new(
        top: impl Into<MorId>,
        bottom: impl Into<MorId>,
        left: impl Into<MorId>,
        right: impl Into<MorId>,
    ) -> Self {
        SquareBoundary {
            top: top.into(),
            bottom: bottom.into(),
            left: left.into(),
            right: right.into(),
        }
    }
}

/// A double graph with chosen identity edges in both directions, and a set
/// of squares. No compositions anywhere: the input of free constructions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleGraph1Id {
    pub objects: BTreeSet<ObId>,
    pub hor_edges: BTreeMap<MorId, Hom>,
    pub ver_edges: BTreeMap<MorId, Hom>,
    pub hor_id: BTreeMap<ObId, MorId>,
    pub ver_id: BTreeMap<ObId, MorId>,
    pub squares: BTreeMap<SqId, SquareBoundary>,
}

/// A double derivation scheme: two categories on a shared object set plus a
/// set of squares with boundaries in them. Squares do not compose yet.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleDerivationScheme {
    pub hor_cat: FinCategory,
    pub ver_cat: FinCategory,
    pub squares: BTreeMap<SqId, SquareBoundary>,
}

/// A way a double structure can fail its axioms.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InvalidDouble {
    #[error("horizontal category: {0}")]
    HorizontalCategory(InvalidCategory),
    #[error("vertical category: {0}")]
    VerticalCategory(InvalidCategory),
    #[error("horizontal and vertical parts disagree on the object set")]
    ObjectSetsDiffer,
    #[error("square {sq} refers to unknown side {mor}")]
    UnknownSide { sq: SqId, mor: MorId },
    #[error("square {sq} has mismatched corners")]
    CornerMismatch { sq: SqId },
    #[error("vertical morphism {mor} has no horizontal unit square")]
    MissingHorUnit { mor: MorId },
    #[error("horizontal morphism {mor} has no vertical unit square")]
    MissingVerUnit { mor: MorId },
    #[error("unit square of {mor} has the wrong boundary")]
    UnitBoundary { mor: MorId },
    #[error("unit squares at object {ob} disagree")]
    UnitCorner { ob: ObId },
    #[error("unit squares do not respect composition at {first} then {second}")]
    UnitFunctoriality { first: MorId, second: MorId },
    #[error("no composite for squares {first} beside {second}")]
    MissingBeside { first: SqId, second: SqId },
    #[error("no composite for squares {first} stacked on {second}")]
    MissingStack { first: SqId, second: SqId },
    #[error("composite defined for non-composable squares {first}, {second}")]
    SpuriousSquareComposite { first: SqId, second: SqId },
    #[error("square composite {composite} of {first}, {second} has wrong boundary")]
    SquareCompositeBoundary { first: SqId, second: SqId, composite: SqId },
    #[error("unit law fails at square {sq}")]
    SquareUnitLaw { sq: SqId },
    #[error("associativity fails at squares {first}, {second}, {third}")]
    SquareAssociativity { first: SqId, second: SqId, third: SqId },
    #[error("interchange fails at squares {a}, {b}, {c}, {d}")]
    Interchange { a: SqId, b: SqId, c: SqId, d: SqId },
}

/// A double category: two categories on shared objects, squares, and total
/// square composition in both directions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleCategory {
    hor_cat: FinCategory,
    ver_cat: FinCategory,
    squares: BTreeMap<SqId, SquareBoundary>,
    /// Unit for `beside`, indexed by the vertical morphism on both sides.
    hor_unit: BTreeMap<MorId, SqId>,
    /// Unit for `stack`, indexed by the horizontal morphism on top and bottom.
    ver_unit: BTreeMap<MorId, SqId>,
    #[serde(with = "crate::core::category::triple_table")]
    beside_table: BTreeMap<(SqId, SqId), SqId>,
    #[serde(with = "crate::core::category::triple_table")]
    stack_table: BTreeMap<(SqId, SqId), SqId>,
}

impl DoubleCategory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assemble from parts. No validation; call [`DoubleCategory::validate`].
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        hor_cat: FinCategory,
        ver_cat: FinCategory,
        squares: BTreeMap<SqId, SquareBoundary>,
        hor_unit: BTreeMap<MorId, SqId>,
        ver_unit: BTreeMap<MorId, SqId>,
        beside_table: BTreeMap<(SqId, SqId), SqId>,
        stack_table: BTreeMap<(SqId, SqId), SqId>,
    ) -> Self {
        DoubleCategory {
            hor_cat,
            ver_cat,
            squares,
            hor_unit,
            ver_unit,
            beside_table,
            stack_table,
        }
    }

    /// Objects together with horizontal morphisms and their composition.
    pub fn hor_cat(&self) -> &FinCategory {
        &self.hor_cat
    }

    /// Objects together with vertical morphisms and their composition.
    pub fn ver_cat(&self) -> &FinCategory {
        &self.ver_cat
    }

    pub fn squares(&self) -> impl Iterator<Item = (&SqId, &SquareBoundary)> {
        self.squares.iter()
    }

    pub fn sq_ids(&self) -> impl Iterator<Item = &SqId> {
        self.squares.keys()
    }

    pub fn has_square(&self, sq: &SqId) -> bool {
        self.squares.contains_key(sq)
    }

    pub fn boundary(&self, sq: &SqId) -> Option<&SquareBoundary> {
        self.squares.get(sq)
    }

    pub fn square_count(&self) -> usize {
        self.squares.len()
    }

    /// The square `first` beside `second` (left to right), if tabled.
    pub fn beside(&self, first: &SqId, second: &SqId) -> Option<&SqId> {
        self.beside_table.get(&(first.clone(), second.clone()))
    }

    /// The square `first` stacked above `second` (top to bottom), if tabled.
    pub fn stack(&self, first: &SqId, second: &SqId) -> Option<&SqId> {
        self.stack_table.get(&(first.clone(), second.clone()))
    }

    /// Unit square for `beside` on the vertical morphism `v`.
    pub fn hor_unit_on(&self, v: &MorId) -> Option<&SqId> {
        self.hor_unit.get(v)
    }

    /// Unit square for `stack` on the horizontal morphism `f`.
    pub fn ver_unit_on(&self, f: &MorId) -> Option<&SqId> {
        self.ver_unit.get(f)
    }

    /// Is this square a `beside` unit on some vertical morphism?
    pub fn is_hor_unit(&self, sq: &SqId) -> bool {
        self.hor_unit.values().any(|s| s == sq)
    }

    /// Is this square a `stack` unit on some horizontal morphism?
    pub fn is_ver_unit(&self, sq: &SqId) -> bool {
        self.ver_unit.values().any(|s| s == sq)
    }

    pub fn add_square(&mut self, sq: impl Into<SqId>, boundary: SquareBoundary) {
        self.squares.insert(sq.into(), boundary);
    }

    pub fn set_hor_cat(&mut self, cat: FinCategory) {
        self.hor_cat = cat;
    }

    pub fn set_ver_cat(&mut self, cat: FinCategory) {
        self.ver_cat = cat;
    }

    pub fn set_hor_unit(&mut self, v: impl Into<MorId>, sq: impl Into<SqId>) {
        self.hor_unit.insert(v.into(), sq.into());
    }

    pub fn set_ver_unit(&mut self, f: impl Into<MorId>, sq: impl Into<SqId>) {
        self.ver_unit.insert(f.into(), sq.into());
    }

    pub fn set_beside(&mut self, first: impl Into<SqId>, second: impl Into<SqId>, composite: impl Into<SqId>) {
        self.beside_table.insert((first.into(), second.into()), composite.into());
    }

    pub fn set_stack(&mut self, first: impl Into<SqId>, second: impl Into<SqId>, composite: impl Into<SqId>) {
        self.stack_table.insert((first.into(), second.into()), composite.into());
    }

    /// Forget square composition, keeping both categories and the squares.
    pub fn as_scheme(&self) -> DoubleDerivationScheme {
        DoubleDerivationScheme {
            hor_cat: self.hor_cat.clone(),
            ver_cat: self.ver_cat.clone(),
            squares: self.squares.clone(),
        }
    }

    /// Forget all composition, keeping edges, identity edges, and squares.
    pub fn underlying_graph(&self) -> DoubleGraph1Id {
        DoubleGraph1Id {
            objects: self.hor_cat.objects().cloned().collect(),
            hor_edges: self.hor_cat.morphisms().map(|(m, h)| (m.clone(), h.clone())).collect(),
            ver_edges: self.ver_cat.morphisms().map(|(m, h)| (m.clone(), h.clone())).collect(),
            hor_id: self
                .hor_cat
                .objects()
                .filter_map(|o| self.hor_cat.id_of(o).map(|m| (o.clone(), m.clone())))
                .collect(),
            ver_id: self
                .ver_cat
                .objects()
                .filter_map(|o| self.ver_cat.id_of(o).map(|m| (o.clone(), m.clone())))
                .collect(),
            squares: self.squares.clone(),
        }
    }

    /// Expected boundary of `first` beside `second`, if they are composable.
    pub fn beside_boundary(&self, first: &SquareBoundary, second: &SquareBoundary) -> Option<SquareBoundary> {
        if first.right != second.left {
            return None;
        }
        Some(SquareBoundary {
            top: self.hor_cat.then(&first.top, &second.top)?.clone(),
            bottom: self.hor_cat.then(&first.bottom, &second.bottom)?.clone(),
            left: first.left.clone(),
            right: second.right.clone(),
        })
    }

    /// Expected boundary of `first` stacked above `second`, if composable.
    pub fn stack_boundary(&self, first: &SquareBoundary, second: &SquareBoundary) -> Option<SquareBoundary> {
        if first.bottom != second.top {
            return None;
        }
        Some(SquareBoundary {
            top: first.top.clone(),
            bottom: second.bottom.clone(),
            left: self.ver_cat.then(&first.left, &second.left)?.clone(),
            right: self.ver_cat.then(&first.right, &second.right)?.clone(),
        })
    }

    /// The inverse of a square for `beside`, if any: a square `beta` with
    /// `beside(sq, beta)` and `beside(beta, sq)` the horizontal units on the
    /// left and right sides.
    pub fn beside_inverse(&self, sq: &SqId) -> Option<SqId> {
        let b = self.boundary(sq)?;
        let left_unit = self.hor_unit_on(&b.left)?;
        let right_unit = self.hor_unit_on(&b.right)?;
        self.squares
            .iter()
            .find(|(cand, cb)| {
                cb.left == b.right
                    && cb.right == b.left
                    && self.beside(sq, cand) == Some(left_unit)
                    && self.beside(cand, sq) == Some(right_unit)
            })
            .map(|(cand, _)| cand.clone())
    }

    /// Is the square invertible for `beside`?
    pub fn is_beside_invertible(&self, sq: &SqId) -> bool {
        self.beside_inverse(sq).is_some()
    }

    /// All violations of the double category axioms.
    pub fn validate(&self) -> Result<(), Vec<InvalidDouble>> {
        let mut errs = Vec::new();
        if let Err(es) = self.hor_cat.validate() {
            errs.extend(es.into_iter().map(InvalidDouble::HorizontalCategory));
        }
        if let Err(es) = self.ver_cat.validate() {
            errs.extend(es.into_iter().map(InvalidDouble::VerticalCategory));
        }
        let hor_obs: BTreeSet<&ObId> = self.hor_cat.objects().collect();
        let ver_obs: BTreeSet<&ObId> = self.ver_cat.objects().collect();
        if hor_obs != ver_obs {
            errs.push(InvalidDouble::ObjectSetsDiffer);
        }
        errs.extend(validate_square_boundaries(
            &self.hor_cat,
            &self.ver_cat,
            &self.squares,
        ));
        // Units present with the right boundaries.
        for (v, _) in self.ver_cat.morphisms() {
            match self.hor_unit.get(v) {
                None => errs.push(InvalidDouble::MissingHorUnit { mor: v.clone() }),
                Some(sq) => {
                    let ok = self.squares.get(sq).is_some_and(|b| {
                        let src_id = self.ver_cat.src(v).and_then(|o| self.hor_cat.id_of(o));
                        let tgt_id = self.ver_cat.tgt(v).and_then(|o| self.hor_cat.id_of(o));
                        Some(&b.top) == src_id
                            && Some(&b.bottom) == tgt_id
                            && &b.left == v
                            && &b.right == v
                    });
                    if !ok {
                        errs.push(InvalidDouble::UnitBoundary { mor: v.clone() });
                    }
                }
            }
        }
        for (f, _) in self.hor_cat.morphisms() {
            match self.ver_unit.get(f) {
                None => errs.push(InvalidDouble::MissingVerUnit { mor: f.clone() }),
                Some(sq) => {
                    let ok = self.squares.get(sq).is_some_and(|b| {
                        let src_id = self.hor_cat.src(f).and_then(|o| self.ver_cat.id_of(o));
                        let tgt_id = self.hor_cat.tgt(f).and_then(|o| self.ver_cat.id_of(o));
                        &b.top == f
                            && &b.bottom == f
                            && Some(&b.left) == src_id
                            && Some(&b.right) == tgt_id
                    });
                    if !ok {
                        errs.push(InvalidDouble::UnitBoundary { mor: f.clone() });
                    }
                }
            }
        }
        // The two unit squares at an object coincide.
        for ob in self.hor_cat.objects() {
            let via_ver = self.ver_cat.id_of(ob).and_then(|v| self.hor_unit.get(v));
            let via_hor = self.hor_cat.id_of(ob).and_then(|f| self.ver_unit.get(f));
            if via_ver.is_some() && via_hor.is_some() && via_ver != via_hor {
                errs.push(InvalidDouble::UnitCorner { ob: ob.clone() });
            }
        }
        // Units respect 1-composition.
        for (v, w) in self.ver_cat.composable_pairs() {
            let (Some(vw), Some(uv), Some(uw)) = (
                self.ver_cat.then(&v, &w),
                self.hor_unit.get(&v),
                self.hor_unit.get(&w),
            ) else {
                continue;
            };
            if self.hor_unit.contains_key(vw)
                && self.stack(uv, uw).is_some()
                && self.hor_unit.get(vw) != self.stack(uv, uw)
            {
                errs.push(InvalidDouble::UnitFunctoriality { first: v, second: w });
            }
        }
        for (f, g) in self.hor_cat.composable_pairs() {
            let (Some(fg), Some(uf), Some(ug)) = (
                self.hor_cat.then(&f, &g),
                self.ver_unit.get(&f),
                self.ver_unit.get(&g),
            ) else {
                continue;
            };
            if self.ver_unit.contains_key(fg)
                && self.beside(uf, ug).is_some()
                && self.ver_unit.get(fg) != self.beside(uf, ug)
            {
                errs.push(InvalidDouble::UnitFunctoriality { first: f, second: g });
            }
        }
        // Square composition: totality, no spurious entries, boundaries.
        let sq_list: Vec<(&SqId, &SquareBoundary)> = self.squares.iter().collect();
        for (a, ba) in &sq_list {
            for (b, bb) in &sq_list {
                let hcomp = ba.right == bb.left;
                match (hcomp, self.beside(a, b)) {
                    (true, None) => errs.push(InvalidDouble::MissingBeside {
                        first: (*a).clone(),
                        second: (*b).clone(),
                    }),
                    (false, Some(_)) => errs.push(InvalidDouble::SpuriousSquareComposite {
                        first: (*a).clone(),
                        second: (*b).clone(),
                    }),
                    (true, Some(c)) => {
                        let want = self.beside_boundary(ba, bb);
                        if want.is_some() && self.squares.get(c) != want.as_ref() {
                            errs.push(InvalidDouble::SquareCompositeBoundary {
                                first: (*a).clone(),
                                second: (*b).clone(),
                                composite: c.clone(),
                            });
                        }
                    }
                    (false, None) => {}
                }
                let vcomp = ba.bottom == bb.top;
                match (vcomp, self.stack(a, b)) {
                    (true, None) => errs.push(InvalidDouble::MissingStack {
                        first: (*a).clone(),
                        second: (*b).clone(),
                    }),
                    (false, Some(_)) => errs.push(InvalidDouble::SpuriousSquareComposite {
                        first: (*a).clone(),
                        second: (*b).clone(),
                    }),
                    (true, Some(c)) => {
                        let want = self.stack_boundary(ba, bb);
                        if want.is_some() && self.squares.get(c) != want.as_ref() {
                            errs.push(InvalidDouble::SquareCompositeBoundary {
                                first: (*a).clone(),
                                second: (*b).clone(),
                                composite: c.clone(),
                            });
                        }
                    }
                    (false, None) => {}
                }
            }
        }
        // Unit laws for squares.
        for (sq, b) in &sq_list {
            let lu = self.hor_unit.get(&b.left);
            let ru = self.hor_unit.get(&b.right);
            let tu = self.ver_unit.get(&b.top);
            let bu = self.ver_unit.get(&b.bottom);
            let ok = lu.is_none_or(|u| self.beside(u, sq) == Some(sq))
                && ru.is_none_or(|u| self.beside(sq, u) == Some(sq))
                && tu.is_none_or(|u| self.stack(u, sq) == Some(sq))
                && bu.is_none_or(|u| self.stack(sq, u) == Some(sq));
            if !ok {
                errs.push(InvalidDouble::SquareUnitLaw { sq: (*sq).clone() });
            }
        }
        // Associativity in both directions.
        for (a, ba) in &sq_list {
            for (b, bb) in &sq_list {
                if ba.right == bb.left {
                    for (c, bc) in &sq_list {
                        if bb.right == bc.left {
                            let l = self.beside(a, b).and_then(|ab| self.beside(ab, c));
                            let r = self.beside(b, c).and_then(|bc2| self.beside(a, bc2));
                            if l.is_some() && r.is_some() && l != r {
                                errs.push(InvalidDouble::SquareAssociativity {
                                    first: (*a).clone(),
                                    second: (*b).clone(),
                                    third: (*c).clone(),
                                });
                            }
                        }
                    }
                }
                if ba.bottom == bb.top {
                    for (c, bc) in &sq_list {
                        if bb.bottom == bc.top {
                            let l = self.stack(a, b).and_then(|ab| self.stack(ab, c));
                            let r = self.stack(b, c).and_then(|bc2| self.stack(a, bc2));
                            if l.is_some() && r.is_some() && l != r {
                                errs.push(InvalidDouble::SquareAssociativity {
                                    first: (*a).clone(),
                                    second: (*b).clone(),
                                    third: (*c).clone(),
                                });
                            }
                        }
                    }
                }
            }
        }
        // Interchange on 2x2 blocks.
        for (a, ba) in &sq_list {
            for (b, bb) in &sq_list {
                if ba.right != bb.left {
                    continue;
                }
                for (c, bc) in &sq_list {
                    if ba.bottom != bc.top {
                        continue;
                    }
                    for (d, bd) in &sq_list {
                        if bb.bottom != bd.top || bc.right != bd.left {
                            continue;
                        }
                        let rows = self
                            .beside(a, b)
                            .and_then(|ab| self.beside(c, d).and_then(|cd| self.stack(ab, cd)));
                        let cols = self
                            .stack(a, c)
                            .and_then(|ac| self.stack(b, d).and_then(|bd2| self.beside(ac, bd2)));
                        if rows.is_some() && cols.is_some() && rows != cols {
                            errs.push(InvalidDouble::Interchange {
                                a: (*a).clone(),
                                b: (*b).clone(),
                                c: (*c).clone(),
                                d: (*d).clone(),
                            });
                        }
                    }
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }
}

/// Boundary well-formedness shared by schemes and double categories.
fn validate_square_boundaries(
    hor_cat: &FinCategory,
    ver_cat: &FinCategory,
    squares: &BTreeMap<SqId, SquareBoundary>,
) -> Vec<InvalidDouble> {
    let mut errs = Vec::new();
    for (sq, b) in squares {
        let mut missing = false;
        for side in [&b.top, &b.bottom] {
            if !hor_cat.has_morphism(side) {
                errs.push(InvalidDouble::UnknownSide { sq: sq.clone(), mor: side.clone() });
                missing = true;
            }
        }
        for side in [&b.left, &b.right] {
            if !ver_cat.has_morphism(side) {
                errs.push(InvalidDouble::UnknownSide { sq: sq.clone(), mor: side.clone() });
                missing = true;
            }
        }
        if missing {
            continue;
        }
        let corners_ok = hor_cat.src(&b.top) == ver_cat.src(&b.left)
            && hor_cat.tgt(&b.top) == ver_cat.src(&b.right)
            && hor_cat.src(&b.bottom) == ver_cat.tgt(&b.left)
            && hor_cat.tgt(&b.bottom) == ver_cat.tgt(&b.right);
        if !corners_ok {
            errs.push(InvalidDouble::CornerMismatch { sq: sq.clone() });
        }
    }
    errs
}

impl DoubleDerivationScheme {
    pub fn validate(&self) -> Result<(), Vec<InvalidDouble>> {
        let mut errs = Vec::new();
        if let Err(es) = self.hor_cat.validate() {
            errs.extend(es.into_iter().map(InvalidDouble::HorizontalCategory));
        }
        if let Err(es) = self.ver_cat.validate() {
            errs.extend(es.into_iter().map(InvalidDouble::VerticalCategory));
        }
        let hor_obs: BTreeSet<&ObId> = self.hor_cat.objects().collect();
        let ver_obs: BTreeSet<&ObId> = self.ver_cat.objects().collect();
        if hor_obs != ver_obs {
            errs.push(InvalidDouble::ObjectSetsDiffer);
        }
        errs.extend(validate_square_boundaries(
            &self.hor_cat,
            &self.ver_cat,
            &self.squares,
        ));
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }
}

impl DoubleGraph1Id {
    pub fn validate(&self) -> Result<(), Vec<InvalidDouble>> {
        let mut errs = Vec::new();
        let mut check_edges = |edges: &BTreeMap<MorId, Hom>, ids: &BTreeMap<ObId, MorId>| {
            for (m, h) in edges {
                for ob in [&h.src, &h.tgt] {
                    if !self.objects.contains(ob) {
                        errs.push(InvalidDouble::UnknownSide {
                            sq: SqId(format!("edge {m}")),
                            mor: m.clone(),
                        });
                    }
                }
            }
            for (ob, m) in ids {
                let ok = edges.get(m).is_some_and(|h| &h.src == ob && &h.tgt == ob);
                if !ok {
                    errs.push(InvalidDouble::UnitBoundary { mor: m.clone() });
                }
            }
        };
        check_edges(&self.hor_edges, &self.hor_id);
        check_edges(&self.ver_edges, &self.ver_id);
        for (sq, b) in &self.squares {
            let known = self.hor_edges.contains_key(&b.top)
                && self.hor_edges.contains_key(&b.bottom)
                && self.ver_edges.contains_key(&b.left)
                && self.ver_edges.contains_key(&b.right);
            if !known {
                errs.push(InvalidDouble::UnknownSide { sq: sq.clone(), mor: b.top.clone() });
                continue;
            }
            let corners_ok = self.hor_edges[&b.top].src == self.ver_edges[&b.left].src
                && self.hor_edges[&b.top].tgt == self.ver_edges[&b.right].src
                && self.hor_edges[&b.bottom].src == self.ver_edges[&b.left].tgt
                && self.hor_edges[&b.bottom].tgt == self.ver_edges[&b.right].tgt;
            if !corners_ok {
                errs.push(InvalidDouble::CornerMismatch { sq: sq.clone() });
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::ops;
    use super::*;

    #[test]
    fn external_product_of_ordinals_validates() {
        let a = FinCategory::ordinal(1);
        let d = ops::external_product(&a, &a);
        assert_eq!(d.validate(), Ok(()));
        assert_eq!(d.hor_cat().object_count(), 4);
        // 3 vertical times 3 horizontal generators give 9 squares.
        assert_eq!(d.square_count(), 9);
    }

    #[test]
    fn scheme_of_product_validates() {
        let a = FinCategory::ordinal(1);
        let d = ops::external_product(&a, &FinCategory::ordinal(2));
        assert_eq!(d.as_scheme().validate(), Ok(()));
        assert_eq!(d.underlying_graph().validate(), Ok(()));
    }

    #[test]
    fn corner_mismatch_is_reported() {
        let a = FinCategory::ordinal(1);
        let mut d = ops::external_product(&a, &a);
        let bad = SquareBoundary::new("(0,0<=1)", "(1,0<=1)", "(0<=1,0)", "(0<=1,0)");
        d.add_square("bad", bad);
        let errs = d.validate().unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, InvalidDouble::CornerMismatch { sq } if sq.as_str() == "bad")));
    }

    #[test]
    fn beside_invertibility_in_iso_product() {
        let iso = FinCategory::walking_iso();
        let d = ops::external_product(&FinCategory::ordinal(1), &iso);
        assert_eq!(d.validate(), Ok(()));
        // The square (0<=1, 0~>1) is horizontally invertible, inverse (0<=1, 1~>0).
        let sq: SqId = "(0<=1,0~>1)".into();
        assert_eq!(d.beside_inverse(&sq), Some("(0<=1,1~>0)".into()));
        let rigid: SqId = "(0<=1,id0)".into();
        assert!(d.is_beside_invertible(&rigid));
    }
}
