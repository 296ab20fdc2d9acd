/*! Canonical constructions of double categories from categories.

The external product takes the first factor vertically and the second
horizontally: in `external_product(a, b)`, vertical morphisms are pairs
`(f, B)` with `f` from `a`, horizontal morphisms are pairs `(A, g)` with `g`
from `b`, and there is exactly one square `(f, g)` per such pair.
*/

use std::collections::BTreeMap;

use super::category::{FinCategory, FinFunctor};
use super::double::{DoubleCategory, DoubleDerivationScheme, SquareBoundary};
use super::functor::DoubleFunctor;
use super::ids::{paired, MorId, ObId, SqId};

/// The external product: first factor vertical, second horizontal.
pub fn external_product(vertical: &FinCategory, horizontal: &FinCategory) -> DoubleCategory {
    let mut hor_cat = FinCategory::new();
    let mut ver_cat = FinCategory::new();
    for a in vertical.objects() {
        for b in horizontal.objects() {
            let ob = paired(a.as_str(), b.as_str());
            hor_cat.add_object(ob.clone());
            ver_cat.add_object(ob);
        }
    }
    // Horizontal morphisms (A, g), composed in the second coordinate.
    for a in vertical.objects() {
        for (g, hg) in horizontal.morphisms() {
            hor_cat.add_morphism(
                paired(a.as_str(), g.as_str()),
                paired(a.as_str(), hg.src.as_str()),
                paired(a.as_str(), hg.tgt.as_str()),
            );
        }
        for b in horizontal.objects() {
            if let Some(idb) = horizontal.id_of(b) {
                hor_cat.set_identity(
                    paired(a.as_str(), b.as_str()),
                    paired(a.as_str(), idb.as_str()),
                );
            }
        }
        for (g1, g2) in horizontal.composable_pairs() {
            if let Some(g12) = horizontal.then(&g1, &g2) {
                hor_cat.set_then(
                    paired(a.as_str(), g1.as_str()),
                    paired(a.as_str(), g2.as_str()),
                    paired(a.as_str(), g12.as_str()),
                );
            }
        }
    }
    // Vertical morphisms (f, B), composed in the first coordinate.
    for b in horizontal.objects() {
        for (f, hf) in vertical.morphisms() {
            ver_cat.add_morphism(
                paired(f.as_str(), b.as_str()),
                paired(hf.src.as_str(), b.as_str()),
                paired(hf.tgt.as_str(), b.as_str()),
            );
        }
        for a in vertical.objects() {
            if let Some(ida) = vertical.id_of(a) {
                ver_cat.set_identity(
                    paired(a.as_str(), b.as_str()),
                    paired(ida.as_str(), b.as_str()),
                );
            }
        }
        for (f1, f2) in vertical.composable_pairs() {
            if let Some(f12) = vertical.then(&f1, &f2) {
                ver_cat.set_then(
                    paired(f1.as_str(), b.as_str()),
                    paired(f2.as_str(), b.as_str()),
                    paired(f12.as_str(), b.as_str()),
                );
            }
        }
    }
    let mut d = DoubleCategory::new();
    d.set_hor_cat(hor_cat);
    d.set_ver_cat(ver_cat);
    // One square (f, g) per pair of morphisms.
    for (f, hf) in vertical.morphisms() {
        for (g, hg) in horizontal.morphisms() {
            let sq = SqId(paired(f.as_str(), g.as_str()));
            d.add_square(
                sq,
                SquareBoundary::new(
                    paired(hf.src.as_str(), g.as_str()),
                    paired(hf.tgt.as_str(), g.as_str()),
                    paired(f.as_str(), hg.src.as_str()),
                    paired(f.as_str(), hg.tgt.as_str()),
                ),
            );
        }
    }
    for (f, _) in vertical.morphisms() {
        for b in horizontal.objects() {
            if let Some(idb) = horizontal.id_of(b) {
                d.set_hor_unit(
                    paired(f.as_str(), b.as_str()),
                    paired(f.as_str(), idb.as_str()),
                );
            }
        }
    }
    for a in vertical.objects() {
        for (g, _) in horizontal.morphisms() {
            if let Some(ida) = vertical.id_of(a) {
                d.set_ver_unit(
                    paired(a.as_str(), g.as_str()),
                    paired(ida.as_str(), g.as_str()),
                );
            }
        }
    }
    for (f, _) in vertical.morphisms() {
        for (g1, g2) in horizontal.composable_pairs() {
            if let Some(g12) = horizontal.then(&g1, &g2) {
                d.set_beside(
                    paired(f.as_str(), g1.as_str()),
                    paired(f.as_str(), g2.as_str()),
                    paired(f.as_str(), g12.as_str()),
                );
            }
        }
    }
    for (g, _) in horizontal.morphisms() {
        for (f1, f2) in vertical.composable_pairs() {
            if let Some(f12) = vertical.then(&f1, &f2) {
                d.set_stack(
                    paired(f1.as_str(), g.as_str()),
                    paired(f2.as_str(), g.as_str()),
                    paired(f12.as_str(), g.as_str()),
                );
            }
        }
    }
    d
}

/// Swap the two directions: squares keep their names, boundaries flip.
pub fn transpose(d: &DoubleCategory) -> DoubleCategory {
    let mut out = DoubleCategory::new();
    out.set_hor_cat(d.ver_cat().clone());
    out.set_ver_cat(d.hor_cat().clone());
    for (sq, b) in d.squares() {
        out.add_square(
            sq.clone(),
            SquareBoundary {
                top: b.left.clone(),
                bottom: b.right.clone(),
                left: b.top.clone(),
                right: b.bottom.clone(),
            },
        );
    }
    for (f, _) in d.hor_cat().morphisms() {
        if let Some(sq) = d.ver_unit_on(f) {
            out.set_hor_unit(f.clone(), sq.clone());
        }
    }
    for (v, _) in d.ver_cat().morphisms() {
        if let Some(sq) = d.hor_unit_on(v) {
            out.set_ver_unit(v.clone(), sq.clone());
        }
    }
    for (a, ba) in d.squares() {
        for (b, bb) in d.squares() {
            if ba.bottom == bb.top {
                if let Some(c) = d.stack(a, b) {
                    out.set_beside(a.clone(), b.clone(), c.clone());
                }
            }
            if ba.right == bb.left {
                if let Some(c) = d.beside(a, b) {
                    out.set_stack(a.clone(), b.clone(), c.clone());
                }
            }
        }
    }
    out
}

/// Transpose a derivation scheme: same squares, directions swapped.
pub fn transpose_scheme(s: &DoubleDerivationScheme) -> DoubleDerivationScheme {
    DoubleDerivationScheme {
        hor_cat: s.ver_cat.clone(),
        ver_cat: s.hor_cat.clone(),
        squares: s
            .squares
            .iter()
            .map(|(sq, b)| {
                (
                    sq.clone(),
                    SquareBoundary {
                        top: b.left.clone(),
                        bottom: b.right.clone(),
                        left: b.top.clone(),
                        right: b.bottom.clone(),
                    },
                )
            })
            .collect(),
    }
}

/// Embed a category horizontally: its morphisms become horizontal, vertical
/// morphisms are identities, and all squares are vertical units.
pub fn embed_h(cat: &FinCategory) -> DoubleCategory {
    let mut out = DoubleCategory::new();
    out.set_hor_cat(cat.clone());
    out.set_ver_cat(FinCategory::discrete(cat.objects().cloned()));
    // One square per horizontal morphism, named after it.
    for (f, h) in cat.morphisms() {
        out.add_square(
            SqId(f.to_string()),
            SquareBoundary {
                top: f.clone(),
                bottom: f.clone(),
                left: MorId(format!("id_{}", h.src)),
                right: MorId(format!("id_{}", h.tgt)),
            },
        );
        out.set_ver_unit(f.clone(), SqId(f.to_string()));
    }
    for ob in cat.objects() {
        if let Some(idf) = cat.id_of(ob) {
            out.set_hor_unit(MorId(format!("id_{ob}")), SqId(idf.to_string()));
        }
    }
    for (f, g) in cat.composable_pairs() {
        if let Some(fg) = cat.then(&f, &g) {
            out.set_beside(SqId(f.to_string()), SqId(g.to_string()), SqId(fg.to_string()));
        }
    }
    for (f, _) in cat.morphisms() {
        out.set_stack(SqId(f.to_string()), SqId(f.to_string()), SqId(f.to_string()));
    }
    out
}

/// Embed a category vertically: the transpose of [`embed_h`].
pub fn embed_v(cat: &FinCategory) -> DoubleCategory {
    transpose(&embed_h(cat))
}

/// The double category of commuting squares in `cat`: both directions are
/// `cat`, and there is one square per boundary with
/// left-then-bottom = top-then-right.
pub fn commutative_squares(cat: &FinCategory) -> DoubleCategory {
    let sq_id = |b: &SquareBoundary| {
        SqId(format!("[{}|{}|{}|{}]", b.top, b.bottom, b.left, b.right))
    };
    let mut out = DoubleCategory::new();
    out.set_hor_cat(cat.clone());
    out.set_ver_cat(cat.clone());
    let mut boundaries: Vec<SquareBoundary> = Vec::new();
    for (t, ht) in cat.morphisms() {
        for (b, hb) in cat.morphisms() {
            for (l, hl) in cat.morphisms() {
                if hl.src != ht.src || hl.tgt != hb.src {
                    continue;
                }
                for (r, hr) in cat.morphisms() {
                    if hr.src != ht.tgt || hr.tgt != hb.tgt {
                        continue;
                    }
                    if cat.then(l, b) == cat.then(t, r) && cat.then(l, b).is_some() {
                        boundaries.push(SquareBoundary {
                            top: t.clone(),
                            bottom: b.clone(),
                            left: l.clone(),
                            right: r.clone(),
                        });
                    }
                }
            }
        }
    }
    for b in &boundaries {
        out.add_square(sq_id(b), b.clone());
    }
    for (v, hv) in cat.morphisms() {
        let b = SquareBoundary {
            top: cat.id_of(&hv.src).expect("identity should exist").clone(),
            bottom: cat.id_of(&hv.tgt).expect("identity should exist").clone(),
            left: v.clone(),
            right: v.clone(),
        };
        out.set_hor_unit(v.clone(), sq_id(&b));
    }
    for (f, hf) in cat.morphisms() {
        let b = SquareBoundary {
            top: f.clone(),
            bottom: f.clone(),
            left: cat.id_of(&hf.src).expect("identity should exist").clone(),
            right: cat.id_of(&hf.tgt).expect("identity should exist").clone(),
        };
        out.set_ver_unit(f.clone(), sq_id(&b));
    }
    for a in &boundaries {
        for b in &boundaries {
            if a.right == b.left {
                if let (Some(t), Some(bo)) = (cat.then(&a.top, &b.top), cat.then(&a.bottom, &b.bottom)) {
                    let c = SquareBoundary {
                        top: t.clone(),
                        bottom: bo.clone(),
                        left: a.left.clone(),
                        right: b.right.clone(),
                    };
                    out.set_beside(sq_id(a), sq_id(b), sq_id(&c));
                }
            }
            if a.bottom == b.top {
                if let (Some(l), Some(r)) = (cat.then(&a.left, &b.left), cat.then(&a.right, &b.right)) {
                    let c = SquareBoundary {
                        top: a.top.clone(),
                        bottom: b.bottom.clone(),
                        left: l.clone(),
                        right: r.clone(),
                    };
                    out.set_stack(sq_id(a), sq_id(b), sq_id(&c));
                }
            }
        }
    }
    out
}

/// The object-and-horizontal-morphism category of `d`.
pub fn underlying_horizontal(d: &DoubleCategory) -> FinCategory {
    d.hor_cat().clone()
}

/// The object-and-vertical-morphism category of `d`.
pub fn underlying_vertical(d: &DoubleCategory) -> FinCategory {
    d.ver_cat().clone()
}

/// The terminal double category: one object, all four sorts trivial.
pub fn terminal() -> DoubleCategory {
    embed_h(&FinCategory::discrete(["*"]))
}

/// Vertical-identity squares of `d`, indexed by horizontal morphisms, as a
/// plain map (useful when comparing against unit tables).
pub fn ver_unit_map(d: &DoubleCategory) -> BTreeMap<MorId, SqId> {
    d.hor_cat()
        .mor_ids()
        .filter_map(|f| d.ver_unit_on(f).map(|s| (f.clone(), s.clone())))
        .collect()
}

/// Objects of `d`, convenient for building searches over them.
pub fn objects(d: &DoubleCategory) -> Vec<ObId> {
    d.hor_cat().objects().cloned().collect()
}

/// The external product of two functors, acting as `f` on the vertical
/// factor and `g` on the horizontal one. Entries the input functors do not
/// define are left out of the maps; `validate` on the result reports them.
pub fn external_product_functor(f: &FinFunctor, g: &FinFunctor) -> DoubleFunctor {
    let source = external_product(f.source(), g.source());
    let target = external_product(f.target(), g.target());
    let mut ob_map = BTreeMap::new();
    let mut hor_map = BTreeMap::new();
    let mut ver_map = BTreeMap::new();
    let mut sq_map = BTreeMap::new();
    for a in f.source().objects() {
        let Some(fa) = f.apply_ob(a) else { continue };
        for b in g.source().objects() {
            let Some(gb) = g.apply_ob(b) else { continue };
            ob_map.insert(
                ObId(paired(a.as_str(), b.as_str())),
                ObId(paired(fa.as_str(), gb.as_str())),
            );
        }
        for q in g.source().mor_ids() {
            let Some(gq) = g.apply_mor(q) else { continue };
            hor_map.insert(
                MorId(paired(a.as_str(), q.as_str())),
                MorId(paired(fa.as_str(), gq.as_str())),
            );
        }
    }
    for p in f.source().mor_ids() {
        let Some(fp) = f.apply_mor(p) else { continue };
        for b in g.source().objects() {
            let Some(gb) = g.apply_ob(b) else { continue };
            ver_map.insert(
                MorId(paired(p.as_str(), b.as_str())),
                MorId(paired(fp.as_str(), gb.as_str())),
            );
        }
        for q in g.source().mor_ids() {
            let Some(gq) = g.apply_mor(q) else { continue };
            sq_map.insert(
                SqId(paired(p.as_str(), q.as_str())),
                SqId(paired(fp.as_str(), gq.as_str())),
            );
        }
    }
    DoubleFunctor::new(source, target, ob_map, hor_map, ver_map, sq_map)
}

/// The functor sending each object and morphism of `sub` to its namesake in
/// `sup`. The caller is responsible for `sub` actually sitting inside `sup`;
/// `validate` on the result reports any name that does not.
pub fn inclusion_functor(sub: &FinCategory, sup: &FinCategory) -> FinFunctor {
    let ob_map = sub.objects().map(|ob| (ob.clone(), ob.clone())).collect();
    let mor_map = sub.mor_ids().map(|m| (m.clone(), m.clone())).collect();
    FinFunctor::new(sub.clone(), sup.clone(), ob_map, mor_map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transpose_is_involutive() {
        let d = external_product(&FinCategory::ordinal(1), &FinCategory::ordinal(2));
        let tt = transpose(&transpose(&d));
        assert_eq!(tt, d);
        assert_eq!(transpose(&d).validate(), Ok(()));
    }

    #[test]
    fn embed_h_matches_point_product() {
        // {pt} x C horizontally is the horizontal embedding of C, up to names.
        let c = FinCategory::ordinal(2);
        let e = embed_h(&c);
        assert_eq!(e.validate(), Ok(()));
        let p = external_product(&FinCategory::discrete(["pt"]), &c);
        assert_eq!(p.validate(), Ok(()));
        assert_eq!(e.square_count(), p.square_count());
        assert_eq!(e.hor_cat().morphism_count(), p.hor_cat().morphism_count());
        // All vertical morphisms of an embedding are identities.
        assert!(e.ver_cat().mor_ids().all(|m| e.ver_cat().is_identity(m)));
    }

    #[test]
    fn embed_v_is_transpose_of_embed_h() {
        let c = FinCategory::walking_iso();
        let v = embed_v(&c);
        assert_eq!(v.validate(), Ok(()));
        assert!(v.hor_cat().mor_ids().all(|m| v.hor_cat().is_identity(m)));
        assert_eq!(v.ver_cat(), &c);
    }

    #[test]
    fn commutative_squares_of_a_poset_product() {
        let p = FinCategory::ordinal(1).product(&FinCategory::ordinal(1));
        let d = commutative_squares(&p);
        assert_eq!(d.validate(), Ok(()));
        // Each square is a pair of comparable pairs: 9 morphisms in each
        // direction, one square per compatible boundary.
        assert_eq!(d.hor_cat().morphism_count(), 9);
        assert!(d.square_count() > 9);
    }

    #[test]
    fn terminal_validates() {
        let t = terminal();
        assert_eq!(t.validate(), Ok(()));
        assert_eq!(t.square_count(), 1);
    }
}
