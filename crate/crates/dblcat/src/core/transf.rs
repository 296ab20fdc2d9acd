/*! Horizontal and vertical natural transformations, and modifications.

A horizontal transformation between double functors `F, G : D -> E` assigns
each object a horizontal morphism `FA -> GA` and each vertical morphism `u`
a square with top and bottom the object components and left and right `Fu`
and `Gu`. Vertical transformations are the transposed notion. A modification
fills a frame of two horizontal and two vertical transformations with one
square per object.
*/

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::double::DoubleCategory;
use super::functor::DoubleFunctor;
use super::ids::{MorId, ObId, SqId};

/// A way a transformation or modification can fail its axioms.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InvalidTransf {
    #[error("the two functors are not parallel")]
    NotParallel,
    #[error("object {ob} has no component")]
    MissingComponent { ob: ObId },
    #[error("component at {ob} has the wrong boundary")]
    ComponentBoundary { ob: ObId },
    #[error("morphism {mor} has no component square")]
    MissingMorphismComponent { mor: MorId },
    #[error("component square at {mor} has the wrong boundary")]
    MorphismComponentBoundary { mor: MorId },
    #[error("identity axiom fails at object {ob}")]
    IdentityAxiom { ob: ObId },
    #[error("functoriality fails at {first} then {second}")]
    Functoriality { first: MorId, second: MorId },
    #[error("naturality fails at square {sq}")]
    Naturality { sq: SqId },
    #[error("frame of the modification does not close")]
    FrameMismatch,
    #[error("modification axiom fails at morphism {mor}")]
    ModificationAxiom { mor: MorId },
}

/// A horizontal natural transformation between parallel double functors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HNatTransf {
    pub from: DoubleFunctor,
    pub to: DoubleFunctor,
    /// Per object `A`, a horizontal morphism `FA -> GA` in the target.
    pub ob_component: BTreeMap<ObId, MorId>,
    /// Per vertical morphism `u : A -> B`, a square over it in the target.
    pub ver_component: BTreeMap<MorId, SqId>,
}

impl HNatTransf {
    /// The identity transformation on `f`.
    pub fn identity(f: &DoubleFunctor) -> Self {
        let target = f.target();
        let ob_component = f
            .ob_map()
            .iter()
            .filter_map(|(a, fa)| target.hor_cat().id_of(fa).map(|m| (a.clone(), m.clone())))
            .collect();
        let ver_component = f
            .ver_map()
            .iter()
            .filter_map(|(u, fu)| target.hor_unit_on(fu).map(|s| (u.clone(), s.clone())))
            .collect();
        HNatTransf { from: f.clone(), to: f.clone(), ob_component, ver_component }
    }

    fn env(&self) -> (&DoubleCategory, &DoubleCategory) {
        (self.from.source(), self.from.target())
    }

    pub fn validate(&self) -> Result<(), Vec<InvalidTransf>> {
        let mut errs = Vec::new();
        if self.from.source() != self.to.source() || self.from.target() != self.to.target() {
            return Err(vec![InvalidTransf::NotParallel]);
        }
        let (d, e) = self.env();
        for a in d.hor_cat().objects() {
            match self.ob_component.get(a) {
                None => errs.push(InvalidTransf::MissingComponent { ob: a.clone() }),
                Some(comp) => {
                    let ok = e.hor_cat().src(comp) == self.from.apply_ob(a)
                        && e.hor_cat().tgt(comp) == self.to.apply_ob(a);
                    if !ok {
                        errs.push(InvalidTransf::ComponentBoundary { ob: a.clone() });
                    }
                }
            }
        }
        for (u, hu) in d.ver_cat().morphisms() {
            match self.ver_component.get(u) {
                None => errs.push(InvalidTransf::MissingMorphismComponent { mor: u.clone() }),
                Some(sq) => {
                    let ok = e.boundary(sq).is_some_and(|b| {
                        Some(&b.top) == self.ob_component.get(&hu.src)
                            && Some(&b.bottom) == self.ob_component.get(&hu.tgt)
                            && Some(&b.left) == self.from.apply_ver(u)
                            && Some(&b.right) == self.to.apply_ver(u)
                    });
                    if !ok {
                        errs.push(InvalidTransf::MorphismComponentBoundary { mor: u.clone() });
                    }
                }
            }
        }
        // Identity verticals go to vertical units on the components.
        for a in d.hor_cat().objects() {
            let (Some(ida), Some(comp)) = (d.ver_cat().id_of(a), self.ob_component.get(a))
            else {
                continue;
            };
            if self.ver_component.get(ida) != e.ver_unit_on(comp) {
                errs.push(InvalidTransf::IdentityAxiom { ob: a.clone() });
            }
        }
        // Stacks of verticals go to stacks of component squares.
        for (u, w) in d.ver_cat().composable_pairs() {
            let (Some(uw), Some(su), Some(sw)) = (
                d.ver_cat().then(&u, &w),
                self.ver_component.get(&u),
                self.ver_component.get(&w),
            ) else {
                continue;
            };
            let want = e.stack(su, sw);
            if want.is_some() && self.ver_component.get(uw) != want {
                errs.push(InvalidTransf::Functoriality { first: u, second: w });
            }
        }
        // Naturality against every source square.
        for (sq, b) in d.squares() {
            let lhs = match (self.from.apply_sq(sq), self.ver_component.get(&b.right)) {
                (Some(fa), Some(tr)) => e.beside(fa, tr),
                _ => None,
            };
            let rhs = match (self.ver_component.get(&b.left), self.to.apply_sq(sq)) {
                (Some(tl), Some(ga)) => e.beside(tl, ga),
                _ => None,
            };
            if lhs.is_some() && rhs.is_some() && lhs != rhs {
                errs.push(InvalidTransf::Naturality { sq: sq.clone() });
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    /// All components are horizontally invertible.
    pub fn is_invertible(&self) -> bool {
        let (_, e) = self.env();
        self.ob_component.values().all(|m| e.hor_cat().is_iso(m))
            && self.ver_component.values().all(|s| e.is_beside_invertible(s))
    }

    /// Horizontal composite: first `self`, then `next`.
    pub fn then(&self, next: &HNatTransf) -> Option<HNatTransf> {
        let (_, e) = self.env();
        let mut ob_component = BTreeMap::new();
        for (a, m) in &self.ob_component {
            let n = next.ob_component.get(a)?;
            ob_component.insert(a.clone(), e.hor_cat().then(m, n)?.clone());
        }
        let mut ver_component = BTreeMap::new();
        for (u, s) in &self.ver_component {
            let t = next.ver_component.get(u)?;
            ver_component.insert(u.clone(), e.beside(s, t)?.clone());
        }
        Some(HNatTransf {
            from: self.from.clone(),
            to: next.to.clone(),
            ob_component,
            ver_component,
        })
    }

    /// The componentwise inverse, when all components are invertible.
    pub fn invert(&self) -> Option<HNatTransf> {
        let (_, e) = self.env();
        let mut ob_component = BTreeMap::new();
        for (a, m) in &self.ob_component {
            ob_component.insert(a.clone(), e.hor_cat().inverse(m)?);
        }
        let mut ver_component = BTreeMap::new();
        for (u, s) in &self.ver_component {
            ver_component.insert(u.clone(), e.beside_inverse(s)?);
        }
        Some(HNatTransf {
            from: self.to.clone(),
            to: self.from.clone(),
            ob_component,
            ver_component,
        })
    }
}

/// A vertical natural transformation between parallel double functors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VNatTransf {
    pub from: DoubleFunctor,
    pub to: DoubleFunctor,
    /// Per object `A`, a vertical morphism `FA -> GA` in the target.
    pub ob_component: BTreeMap<ObId, MorId>,
    /// Per horizontal morphism `f : A -> B`, a square beside it.
    pub hor_component: BTreeMap<MorId, SqId>,
}

impl VNatTransf {
    pub fn identity(f: &DoubleFunctor) -> Self {
        let target = f.target();
        let ob_component = f
            .ob_map()
            .iter()
            .filter_map(|(a, fa)| target.ver_cat().id_of(fa).map(|m| (a.clone(), m.clone())))
            .collect();
        let hor_component = f
            .hor_map()
            .iter()
            .filter_map(|(h, fh)| target.ver_unit_on(fh).map(|s| (h.clone(), s.clone())))
            .collect();
        VNatTransf { from: f.clone(), to: f.clone(), ob_component, hor_component }
    }

    pub fn validate(&self) -> Result<(), Vec<InvalidTransf>> {
        let mut errs = Vec::new();
        if self.from.source() != self.to.source() || self.from.target() != self.to.target() {
            return Err(vec![InvalidTransf::NotParallel]);
        }
        let d = self.from.source();
        let e = self.from.target();
        for a in d.hor_cat().objects() {
            match self.ob_component.get(a) {
                None => errs.push(InvalidTransf::MissingComponent { ob: a.clone() }),
                Some(comp) => {
                    let ok = e.ver_cat().src(comp) == self.from.apply_ob(a)
                        && e.ver_cat().tgt(comp) == self.to.apply_ob(a);
                    if !ok {
                        errs.push(InvalidTransf::ComponentBoundary { ob: a.clone() });
                    }
                }
            }
        }
        for (f, hf) in d.hor_cat().morphisms() {
            match self.hor_component.get(f) {
                None => errs.push(InvalidTransf::MissingMorphismComponent { mor: f.clone() }),
                Some(sq) => {
                    let ok = e.boundary(sq).is_some_and(|b| {
                        Some(&b.left) == self.ob_component.get(&hf.src)
                            && Some(&b.right) == self.ob_component.get(&hf.tgt)
                            && Some(&b.top) == self.from.apply_hor(f)
                            && Some(&b.bottom) == self.to.apply_hor(f)
                    });
                    if !ok {
                        errs.push(InvalidTransf::MorphismComponentBoundary { mor: f.clone() });
                    }
                }
            }
        }
        for a in d.hor_cat().objects() {
            let (Some(ida), Some(comp)) = (d.hor_cat().id_of(a), self.ob_component.get(a))
            else {
                continue;
            };
            if self.hor_component.get(ida) != e.hor_unit_on(comp) {
                errs.push(InvalidTransf::IdentityAxiom { ob: a.clone() });
            }
        }
        for (f, g) in d.hor_cat().composable_pairs() {
            let (Some(fg), Some(sf), Some(sg)) = (
                d.hor_cat().then(&f, &g),
                self.hor_component.get(&f),
                self.hor_component.get(&g),
            ) else {
                continue;
            };
            let want = e.beside(sf, sg);
            if want.is_some() && self.hor_component.get(fg) != want {
                errs.push(InvalidTransf::Functoriality { first: f, second: g });
            }
        }
        for (sq, b) in d.squares() {
            let lhs = match (self.from.apply_sq(sq), self.hor_component.get(&b.bottom)) {
                (Some(fa), Some(tb)) => e.stack(fa, tb),
                _ => None,
            };
            let rhs = match (self.hor_component.get(&b.top), self.to.apply_sq(sq)) {
                (Some(tt), Some(ga)) => e.stack(tt, ga),
                _ => None,
            };
            if lhs.is_some() && rhs.is_some() && lhs != rhs {
                errs.push(InvalidTransf::Naturality { sq: sq.clone() });
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    /// Vertical composite: first `self`, then `next`.
    pub fn then(&self, next: &VNatTransf) -> Option<VNatTransf> {
        let e = self.from.target();
        let mut ob_component = BTreeMap::new();
        for (a, m) in &self.ob_component {
            let n = next.ob_component.get(a)?;
            ob_component.insert(a.clone(), e.ver_cat().then(m, n)?.clone());
        }
        let mut hor_component = BTreeMap::new();
        for (f, s) in &self.hor_component {
            let t = next.hor_component.get(f)?;
            hor_component.insert(f.clone(), e.stack(s, t)?.clone());
        }
        Some(VNatTransf {
            from: self.from.clone(),
            to: next.to.clone(),
            ob_component,
            hor_component,
        })
    }
}

/// A modification filling a frame of transformations: horizontally between
/// two horizontal transformations, vertically between two vertical ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Modification {
    pub top: HNatTransf,
    pub bottom: HNatTransf,
    pub left: VNatTransf,
    pub right: VNatTransf,
    /// Per object `A`, a square with boundary `top_A / bottom_A / left_A / right_A`.
    pub component: BTreeMap<ObId, SqId>,
}

impl Modification {
    pub fn validate(&self) -> Result<(), Vec<InvalidTransf>> {
        let mut errs = Vec::new();
        let frame_ok = self.top.from == self.left.from
            && self.top.to == self.right.from
            && self.bottom.from == self.left.to
            && self.bottom.to == self.right.to;
        if !frame_ok {
            return Err(vec![InvalidTransf::FrameMismatch]);
        }
        let d = self.top.from.source();
        let e = self.top.from.target();
        for a in d.hor_cat().objects() {
            match self.component.get(a) {
                None => errs.push(InvalidTransf::MissingComponent { ob: a.clone() }),
                Some(sq) => {
                    let ok = e.boundary(sq).is_some_and(|b| {
                        Some(&b.top) == self.top.ob_component.get(a)
                            && Some(&b.bottom) == self.bottom.ob_component.get(a)
                            && Some(&b.left) == self.left.ob_component.get(a)
                            && Some(&b.right) == self.right.ob_component.get(a)
                    });
                    if !ok {
                        errs.push(InvalidTransf::ComponentBoundary { ob: a.clone() });
                    }
                }
            }
        }
        // Pasting with the vertical transformations' squares, one per
        // horizontal morphism of the source.
        for (f, hf) in d.hor_cat().morphisms() {
            let lhs = match (self.left.hor_component.get(f), self.component.get(&hf.tgt)) {
                (Some(sf), Some(mb)) => e.beside(sf, mb),
                _ => None,
            };
            let rhs = match (self.component.get(&hf.src), self.right.hor_component.get(f)) {
                (Some(ma), Some(sf)) => e.beside(ma, sf),
                _ => None,
            };
            if lhs.is_some() && rhs.is_some() && lhs != rhs {
                errs.push(InvalidTransf::ModificationAxiom { mor: f.clone() });
            }
        }
        // Pasting with the horizontal transformations' squares, one per
        // vertical morphism of the source.
        for (u, hu) in d.ver_cat().morphisms() {
            let lhs = match (self.top.ver_component.get(u), self.component.get(&hu.tgt)) {
                (Some(tu), Some(mb)) => e.stack(tu, mb),
                _ => None,
            };
            let rhs = match (self.component.get(&hu.src), self.bottom.ver_component.get(u)) {
                (Some(ma), Some(tu)) => e.stack(ma, tu),
                _ => None,
            };
            if lhs.is_some() && rhs.is_some() && lhs != rhs {
                errs.push(InvalidTransf::ModificationAxiom { mor: u.clone() });
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
    use super::super::category::FinCategory;
    use super::super::ops;
    use super::*;

    #[test]
    fn identity_transformations_validate() {
        let d = ops::external_product(&FinCategory::ordinal(1), &FinCategory::walking_iso());
        let f = DoubleFunctor::identity(&d);
        let h = HNatTransf::identity(&f);
        assert_eq!(h.validate(), Ok(()));
        assert!(h.is_invertible());
        let v = VNatTransf::identity(&f);
        assert_eq!(v.validate(), Ok(()));
    }

    #[test]
    fn identity_modification_validates() {
        let d = ops::embed_h(&FinCategory::ordinal(1));
        let f = DoubleFunctor::identity(&d);
        let h = HNatTransf::identity(&f);
        let v = VNatTransf::identity(&f);
        let component = d
            .hor_cat()
            .objects()
            .map(|a| {
                let ida = d.hor_cat().id_of(a).expect("identity should exist");
                let sq = d.ver_unit_on(ida).expect("unit square should exist");
                (a.clone(), sq.clone())
            })
            .collect();
        let m = Modification {
            top: h.clone(),
            bottom: h,
            left: v.clone(),
            right: v,
            component,
        };
        assert_eq!(m.validate(), Ok(()));
    }

    #[test]
    fn nonidentity_horizontal_transformation() {
        // In the walking iso embedded horizontally, conjugating the identity
        // functor by 0~>1 gives a horizontal transformation from the constant
        // picture at 0 to the constant picture at 1 over the point.
        let c = FinCategory::walking_iso();
        let e = ops::embed_h(&c);
        let point = ops::terminal();
        let to_0 = constant_functor(&point, &e, "0");
        let to_1 = constant_functor(&point, &e, "1");
        let ob_component: BTreeMap<ObId, MorId> = [("*".into(), "0~>1".into())].into();
        let ver_component: BTreeMap<MorId, SqId> =
            [("id_*".into(), SqId("0~>1".to_string()))].into();
        let h = HNatTransf { from: to_0, to: to_1, ob_component, ver_component };
        assert_eq!(h.validate(), Ok(()));
        assert!(h.is_invertible());
        let inv = h.invert().expect("components should invert");
        assert_eq!(inv.validate(), Ok(()));
        let round = h.then(&inv).expect("composable");
        assert_eq!(round.validate(), Ok(()));
        assert_eq!(round.ob_component.get(&"*".into()), Some(&"id0".into()));
    }

    fn constant_functor(
        point: &DoubleCategory,
        e: &DoubleCategory,
        at: &str,
    ) -> DoubleFunctor {
        let ob: ObId = at.into();
        let hid = e.hor_cat().id_of(&ob).expect("identity should exist").clone();
        let vid = e.ver_cat().id_of(&ob).expect("identity should exist").clone();
        let usq = e.ver_unit_on(&hid).expect("unit square should exist").clone();
        DoubleFunctor::new(
            point.clone(),
            e.clone(),
            point.hor_cat().objects().map(|o| (o.clone(), ob.clone())).collect(),
            point.hor_cat().mor_ids().map(|m| (m.clone(), hid.clone())).collect(),
            point.ver_cat().mor_ids().map(|m| (m.clone(), vid.clone())).collect(),
            point.sq_ids().map(|s| (s.clone(), usq.clone())).collect(),
        )
    }
}
