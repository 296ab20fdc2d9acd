/*! Double functors: maps of double categories preserving all structure.

A double functor is stored with self-contained copies of its endpoints. The
horizontal part (objects and horizontal morphisms) and the vertical part are
ordinary functors; on top of that, squares map to squares respecting
boundaries, units, and both square compositions.
*/

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::category::{FinFunctor, InvalidFunctor};
use super::double::DoubleCategory;
use super::ids::{MorId, ObId, SqId};

/// A way a [`DoubleFunctor`] can fail to be one.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InvalidDoubleFunctor {
    #[error("horizontal part: {0}")]
    Horizontal(InvalidFunctor),
    #[error("vertical part: {0}")]
    Vertical(InvalidFunctor),
    #[error("square {sq} has no image")]
    MissingSquareImage { sq: SqId },
    #[error("image of square {sq} is not a square of the target")]
    SquareImageUnknown { sq: SqId },
    #[error("image of square {sq} has the wrong boundary")]
    SquareBoundaryMismatch { sq: SqId },
    #[error("unit square on {mor} is not sent to a unit square")]
    UnitSquareNotPreserved { mor: MorId },
    #[error("composite of squares {first}, {second} is not preserved")]
    SquareCompositionNotPreserved { first: SqId, second: SqId },
}

/// A structure-preserving map of double categories.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleFunctor {
    source: DoubleCategory,
    target: DoubleCategory,
    ob_map: BTreeMap<ObId, ObId>,
    hor_map: BTreeMap<MorId, MorId>,
    ver_map: BTreeMap<MorId, MorId>,
    sq_map: BTreeMap<SqId, SqId>,
}

impl DoubleFunctor {
    pub fn new(
        source: DoubleCategory,
        target: DoubleCategory,
        ob_map: BTreeMap<ObId, ObId>,
        hor_map: BTreeMap<MorId, MorId>,
        ver_map: BTreeMap<MorId, MorId>,
        sq_map: BTreeMap<SqId, SqId>,
    ) -> Self {
        DoubleFunctor { source, target, ob_map, hor_map, ver_map, sq_map }
    }

    pub fn identity(d: &DoubleCategory) -> Self {
        DoubleFunctor {
            source: d.clone(),
            target: d.clone(),
            ob_map: d.hor_cat().objects().map(|o| (o.clone(), o.clone())).collect(),
            hor_map: d.hor_cat().mor_ids().map(|m| (m.clone(), m.clone())).collect(),
            ver_map: d.ver_cat().mor_ids().map(|m| (m.clone(), m.clone())).collect(),
            sq_map: d.sq_ids().map(|s| (s.clone(), s.clone())).collect(),
        }
    }

    pub fn source(&self) -> &DoubleCategory {
        &self.source
    }

    pub fn target(&self) -> &DoubleCategory {
        &self.target
    }

    pub fn ob_map(&self) -> &BTreeMap<ObId, ObId> {
        &self.ob_map
    }

    pub fn hor_map(&self) -> &BTreeMap<MorId, MorId> {
        &self.hor_map
    }

    pub fn ver_map(&self) -> &BTreeMap<MorId, MorId> {
        &self.ver_map
    }

    pub fn sq_map(&self) -> &BTreeMap<SqId, SqId> {
        &self.sq_map
    }

    pub fn apply_ob(&self, ob: &ObId) -> Option<&ObId> {
        self.ob_map.get(ob)
    }

    pub fn apply_hor(&self, mor: &MorId) -> Option<&MorId> {
        self.hor_map.get(mor)
    }

    pub fn apply_ver(&self, mor: &MorId) -> Option<&MorId> {
        self.ver_map.get(mor)
    }

    pub fn apply_sq(&self, sq: &SqId) -> Option<&SqId> {
        self.sq_map.get(sq)
    }

    /// The action on objects and horizontal morphisms as an ordinary functor.
    pub fn hor_part(&self) -> FinFunctor {
        FinFunctor::new(
            self.source.hor_cat().clone(),
            self.target.hor_cat().clone(),
            self.ob_map.clone(),
            self.hor_map.clone(),
        )
    }

    /// The action on objects and vertical morphisms as an ordinary functor.
    pub fn ver_part(&self) -> FinFunctor {
        FinFunctor::new(
            self.source.ver_cat().clone(),
            self.target.ver_cat().clone(),
            self.ob_map.clone(),
            self.ver_map.clone(),
        )
    }

    /// Compose with `next`: first `self`, then `next`.
    pub fn then(&self, next: &DoubleFunctor) -> DoubleFunctor {
        let compose = |first: &BTreeMap<String, String>, second: &BTreeMap<String, String>| {
            first
                .iter()
                .filter_map(|(a, b)| second.get(b).map(|c| (a.clone(), c.clone())))
                .collect::<BTreeMap<String, String>>()
        };
        // Work over raw strings to share the plumbing across id sorts.
        let raw = |m: &BTreeMap<ObId, ObId>| {
            m.iter().map(|(a, b)| (a.0.clone(), b.0.clone())).collect::<BTreeMap<_, _>>()
        };
        let rawm = |m: &BTreeMap<MorId, MorId>| {
            m.iter().map(|(a, b)| (a.0.clone(), b.0.clone())).collect::<BTreeMap<_, _>>()
        };
        let raws = |m: &BTreeMap<SqId, SqId>| {
            m.iter().map(|(a, b)| (a.0.clone(), b.0.clone())).collect::<BTreeMap<_, _>>()
        };
        DoubleFunctor {
            source: self.source.clone(),
            target: next.target.clone(),
            ob_map: compose(&raw(&self.ob_map), &raw(&next.ob_map))
                .into_iter()
                .map(|(a, b)| (ObId(a), ObId(b)))
                .collect(),
            hor_map: compose(&rawm(&self.hor_map), &rawm(&next.hor_map))
                .into_iter()
                .map(|(a, b)| (MorId(a), MorId(b)))
                .collect(),
            ver_map: compose(&rawm(&self.ver_map), &rawm(&next.ver_map))
                .into_iter()
                .map(|(a, b)| (MorId(a), MorId(b)))
                .collect(),
            sq_map: compose(&raws(&self.sq_map), &raws(&next.sq_map))
                .into_iter()
                .map(|(a, b)| (SqId(a), SqId(b)))
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<(), Vec<InvalidDoubleFunctor>> {
        let mut errs = Vec::new();
        if let Err(es) = self.hor_part().validate() {
            errs.extend(es.into_iter().map(InvalidDoubleFunctor::Horizontal));
        }
        if let Err(es) = self.ver_part().validate() {
            errs.extend(es.into_iter().map(InvalidDoubleFunctor::Vertical));
        }
        for (sq, b) in self.source.squares() {
            match self.sq_map.get(sq) {
                None => errs.push(InvalidDoubleFunctor::MissingSquareImage { sq: sq.clone() }),
                Some(img) => match self.target.boundary(img) {
                    None => errs.push(InvalidDoubleFunctor::SquareImageUnknown { sq: sq.clone() }),
                    Some(bi) => {
                        let ok = self.hor_map.get(&b.top) == Some(&bi.top)
                            && self.hor_map.get(&b.bottom) == Some(&bi.bottom)
                            && self.ver_map.get(&b.left) == Some(&bi.left)
                            && self.ver_map.get(&b.right) == Some(&bi.right);
                        if !ok {
                            errs.push(InvalidDoubleFunctor::SquareBoundaryMismatch {
                                sq: sq.clone(),
                            });
                        }
                    }
                },
            }
        }
        for (v, _) in self.source.ver_cat().morphisms() {
            let (Some(unit), Some(v_img)) = (self.source.hor_unit_on(v), self.ver_map.get(v))
            else {
                continue;
            };
            let want = self.target.hor_unit_on(v_img);
            if want.is_some() && self.sq_map.get(unit) != want {
                errs.push(InvalidDoubleFunctor::UnitSquareNotPreserved { mor: v.clone() });
            }
        }
        for (f, _) in self.source.hor_cat().morphisms() {
            let (Some(unit), Some(f_img)) = (self.source.ver_unit_on(f), self.hor_map.get(f))
            else {
                continue;
            };
            let want = self.target.ver_unit_on(f_img);
            if want.is_some() && self.sq_map.get(unit) != want {
                errs.push(InvalidDoubleFunctor::UnitSquareNotPreserved { mor: f.clone() });
            }
        }
        let pairs: Vec<(&SqId, &SqId)> = {
            let mut out = Vec::new();
            for (a, ba) in self.source.squares() {
                for (b, bb) in self.source.squares() {
                    if ba.right == bb.left || ba.bottom == bb.top {
                        out.push((a, b));
                    }
                }
            }
            out
        };
        for (a, b) in pairs {
            if let Some(c) = self.source.beside(a, b) {
                let want = match (self.sq_map.get(a), self.sq_map.get(b)) {
                    (Some(fa), Some(fb)) => self.target.beside(fa, fb),
                    _ => None,
                };
                if want.is_some() && self.sq_map.get(c) != want {
                    errs.push(InvalidDoubleFunctor::SquareCompositionNotPreserved {
                        first: a.clone(),
                        second: b.clone(),
                    });
                }
            }
            if let Some(c) = self.source.stack(a, b) {
                let want = match (self.sq_map.get(a), self.sq_map.get(b)) {
                    (Some(fa), Some(fb)) => self.target.stack(fa, fb),
                    _ => None,
                };
                if want.is_some() && self.sq_map.get(c) != want {
                    errs.push(InvalidDoubleFunctor::SquareCompositionNotPreserved {
                        first: a.clone(),
                        second: b.clone(),
                    });
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    /// Bijective on all four sorts (and valid), i.e. an isomorphism.
    pub fn is_isomorphism(&self) -> bool {
        use std::collections::BTreeSet;
        if self.validate().is_err() {
            return false;
        }
        let ob_img: BTreeSet<&ObId> = self.ob_map.values().collect();
        let hor_img: BTreeSet<&MorId> = self.hor_map.values().collect();
        let ver_img: BTreeSet<&MorId> = self.ver_map.values().collect();
        let sq_img: BTreeSet<&SqId> = self.sq_map.values().collect();
        ob_img.len() == self.ob_map.len()
            && hor_img.len() == self.hor_map.len()
            && ver_img.len() == self.ver_map.len()
            && sq_img.len() == self.sq_map.len()
            && self.target.hor_cat().objects().all(|o| ob_img.contains(o))
            && self.target.hor_cat().mor_ids().all(|m| hor_img.contains(m))
            && self.target.ver_cat().mor_ids().all(|m| ver_img.contains(m))
            && self.target.sq_ids().all(|s| sq_img.contains(s))
    }
}

#[cfg(test)]
mod tests {
    use super::super::category::FinCategory;
    use super::super::ops;
    use super::*;

    #[test]
    fn identity_double_functor_validates() {
        let d = ops::external_product(&FinCategory::ordinal(1), &FinCategory::ordinal(1));
        let id = DoubleFunctor::identity(&d);
        assert_eq!(id.validate(), Ok(()));
        assert!(id.is_isomorphism());
    }

    #[test]
    fn transpose_is_not_checked_here_but_projection_is() {
        // Project [1] box [1] onto its horizontal embedding by collapsing the
        // vertical direction.
        let one = FinCategory::ordinal(1);
        let d = ops::external_product(&one, &one);
        let e = ops::embed_h(&one);
        let ob_map: BTreeMap<ObId, ObId> = d
            .hor_cat()
            .objects()
            .map(|o| {
                // (a,b) -> b
                let inner = o.as_str().trim_start_matches('(').trim_end_matches(')');
                let b = inner.split(',').nth(1).expect("pair id should have two parts");
                (o.clone(), ObId(b.to_string()))
            })
            .collect();
        let hor_map: BTreeMap<MorId, MorId> = d
            .hor_cat()
            .mor_ids()
            .map(|m| {
                let inner = m.as_str().trim_start_matches('(').trim_end_matches(')');
                let g = inner.split(',').nth(1).expect("pair id should have two parts");
                (m.clone(), MorId(g.to_string()))
            })
            .collect();
        let ver_map: BTreeMap<MorId, MorId> = d
            .ver_cat()
            .morphisms()
            .map(|(m, h)| {
                let tgt_ob = ob_map.get(&h.src).expect("object should be mapped");
                (m.clone(), MorId(format!("id_{tgt_ob}")))
            })
            .collect();
        let sq_map: BTreeMap<SqId, SqId> = d
            .squares()
            .map(|(s, b)| {
                let g = hor_map.get(&b.top).expect("top should be mapped");
                (s.clone(), SqId(g.to_string()))
            })
            .collect();
        let f = DoubleFunctor::new(d, e, ob_map, hor_map, ver_map, sq_map);
        assert_eq!(f.validate(), Ok(()));
        assert!(!f.is_isomorphism());
    }
}
