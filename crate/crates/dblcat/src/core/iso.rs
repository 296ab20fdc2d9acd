/*! Isomorphism search for categories and double categories.

Backtracking over object bijections with degree-profile pruning, then
sort-wise morphism and square bijections checked against the composition
tables. Candidates are tried in identifier order, so a found isomorphism is
deterministic.
*/

use std::collections::{BTreeMap, BTreeSet};

use super::category::{FinCategory, FinFunctor};
use super::double::DoubleCategory;
use super::functor::DoubleFunctor;
use super::ids::{MorId, ObId, SqId};

/// Degree profile of an object inside a category: nonidentity in/out/endo.
fn cat_profile(cat: &FinCategory, ob: &ObId) -> (usize, usize, usize) {
    let mut inc = 0;
    let mut out = 0;
    let mut endo = 0;
    for (m, h) in cat.morphisms() {
        if cat.is_identity(m) {
            continue;
        }
        if &h.src == ob && &h.tgt == ob {
            endo += 1;
        } else if &h.src == ob {
            out += 1;
        } else if &h.tgt == ob {
            inc += 1;
        }
    }
    (inc, out, endo)
}

/// An isomorphism `a -> b` of categories, if one exists.
pub fn cat_iso_search(a: &FinCategory, b: &FinCategory) -> Option<FinFunctor> {
    if a.object_count() != b.object_count() || a.morphism_count() != b.morphism_count() {
        return None;
    }
    let a_obs: Vec<ObId> = a.objects().cloned().collect();
    let profiles_b: BTreeMap<ObId, (usize, usize, usize)> =
        b.objects().map(|o| (o.clone(), cat_profile(b, o))).collect();
    let mut profile_counts_a: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    for o in &a_obs {
        *profile_counts_a.entry(cat_profile(a, o)).or_default() += 1;
    }
    let mut profile_counts_b: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    for p in profiles_b.values() {
        *profile_counts_b.entry(*p).or_default() += 1;
    }
    if profile_counts_a != profile_counts_b {
        return None;
    }
    let mut ob_map = BTreeMap::new();
    let mut used = BTreeSet::new();
    search_objects(a, b, &a_obs, 0, &profiles_b, &mut ob_map, &mut used)
}

fn search_objects(
    a: &FinCategory,
    b: &FinCategory,
    obs: &[ObId],
    at: usize,
    profiles_b: &BTreeMap<ObId, (usize, usize, usize)>,
    ob_map: &mut BTreeMap<ObId, ObId>,
    used: &mut BTreeSet<ObId>,
) -> Option<FinFunctor> {
    if at == obs.len() {
        return search_morphisms(a, b, ob_map);
    }
    let ob = &obs[at];
    let profile = cat_profile(a, ob);
    let candidates: Vec<ObId> = profiles_b
        .iter()
        .filter(|(cand, p)| !used.contains(*cand) && **p == profile)
        .map(|(cand, _)| cand.clone())
        .collect();
    for cand in candidates {
        // Hom-set sizes against every already-placed object must agree.
        let consistent = ob_map.iter().all(|(x, fx)| {
            a.hom_set(x, ob).len() == b.hom_set(fx, &cand).len()
                && a.hom_set(ob, x).len() == b.hom_set(&cand, fx).len()
        }) && a.hom_set(ob, ob).len() == b.hom_set(&cand, &cand).len();
        if !consistent {
            continue;
        }
        ob_map.insert(ob.clone(), cand.clone());
        used.insert(cand.clone());
        if let Some(found) = search_objects(a, b, obs, at + 1, profiles_b, ob_map, used) {
            return Some(found);
        }
        used.remove(&cand);
        ob_map.remove(ob);
    }
    None
}

fn search_morphisms(
    a: &FinCategory,
    b: &FinCategory,
    ob_map: &BTreeMap<ObId, ObId>,
) -> Option<FinFunctor> {
    let mors: Vec<MorId> = a.mor_ids().cloned().collect();
    let mut mor_map = BTreeMap::new();
    let mut used = BTreeSet::new();
    search_mor_at(a, b, &mors, 0, ob_map, &mut mor_map, &mut used)
}

#[allow(clippy::too_many_arguments)]
fn search_mor_at(
    a: &FinCategory,
    b: &FinCategory,
    mors: &[MorId],
    at: usize,
    ob_map: &BTreeMap<ObId, ObId>,
    mor_map: &mut BTreeMap<MorId, MorId>,
    used: &mut BTreeSet<MorId>,
) -> Option<FinFunctor> {
    if at == mors.len() {
        let f = FinFunctor::new(a.clone(), b.clone(), ob_map.clone(), mor_map.clone());
        return if f.validate().is_ok() { Some(f) } else { None };
    }
    let m = &mors[at];
    let hom = a.hom_data(m)?;
    let fs = ob_map.get(&hom.src)?;
    let ft = ob_map.get(&hom.tgt)?;
    let candidates: Vec<MorId> = if a.is_identity(m) {
        b.id_of(fs).into_iter().cloned().collect()
    } else {
        b.hom_set(fs, ft)
            .into_iter()
            .filter(|c| !used.contains(*c) && !b.is_identity(c))
            .cloned()
            .collect()
    };
    'cand: for cand in candidates {
        if used.contains(&cand) {
            continue;
        }
        mor_map.insert(m.clone(), cand.clone());
        used.insert(cand.clone());
        for f in mor_map.keys().cloned().collect::<Vec<_>>() {
            for g in mor_map.keys().cloned().collect::<Vec<_>>() {
                let Some(h) = a.then(&f, &g) else { continue };
                let Some(h_img) = mor_map.get(h) else { continue };
                if b.then(&mor_map[&f], &mor_map[&g]) != Some(h_img) {
                    used.remove(&cand);
                    mor_map.remove(m);
                    continue 'cand;
                }
            }
        }
        if let Some(found) = search_mor_at(a, b, mors, at + 1, ob_map, mor_map, used) {
            return Some(found);
        }
        used.remove(&cand);
        mor_map.remove(m);
    }
    None
}

/// Degree profile of an object inside a double category.
fn double_profile(d: &DoubleCategory, ob: &ObId) -> [usize; 6] {
    let (hi, ho, he) = cat_profile(d.hor_cat(), ob);
    let (vi, vo, _) = cat_profile(d.ver_cat(), ob);
    // Squares whose top-left corner is this object.
    let corner = d
        .squares()
        .filter(|(_, b)| d.hor_cat().src(&b.top) == Some(ob))
        .count();
    [hi, ho, he, vi, vo, corner]
}

/// An isomorphism `a -> b` of double categories, if one exists.
pub fn double_iso_search(a: &DoubleCategory, b: &DoubleCategory) -> Option<DoubleFunctor> {
    if a.hor_cat().object_count() != b.hor_cat().object_count()
        || a.hor_cat().morphism_count() != b.hor_cat().morphism_count()
        || a.ver_cat().morphism_count() != b.ver_cat().morphism_count()
        || a.square_count() != b.square_count()
    {
        return None;
    }
    let mut counts_a: BTreeMap<[usize; 6], usize> = BTreeMap::new();
    for o in a.hor_cat().objects() {
        *counts_a.entry(double_profile(a, o)).or_default() += 1;
    }
    let mut counts_b: BTreeMap<[usize; 6], usize> = BTreeMap::new();
    for o in b.hor_cat().objects() {
        *counts_b.entry(double_profile(b, o)).or_default() += 1;
    }
    if counts_a != counts_b {
        return None;
    }
    let obs: Vec<ObId> = a.hor_cat().objects().cloned().collect();
    let mut ob_map = BTreeMap::new();
    let mut used = BTreeSet::new();
    double_search_objects(a, b, &obs, 0, &mut ob_map, &mut used)
}

fn double_search_objects(
    a: &DoubleCategory,
    b: &DoubleCategory,
    obs: &[ObId],
    at: usize,
    ob_map: &mut BTreeMap<ObId, ObId>,
    used: &mut BTreeSet<ObId>,
) -> Option<DoubleFunctor> {
    if at == obs.len() {
        return double_search_sorts(a, b, ob_map);
    }
    let ob = &obs[at];
    let profile = double_profile(a, ob);
    let candidates: Vec<ObId> = b
        .hor_cat()
        .objects()
        .filter(|cand| !used.contains(*cand) && double_profile(b, cand) == profile)
        .cloned()
        .collect();
    for cand in candidates {
        let consistent = ob_map.iter().all(|(x, fx)| {
            a.hor_cat().hom_set(x, ob).len() == b.hor_cat().hom_set(fx, &cand).len()
                && a.hor_cat().hom_set(ob, x).len() == b.hor_cat().hom_set(&cand, fx).len()
                && a.ver_cat().hom_set(x, ob).len() == b.ver_cat().hom_set(fx, &cand).len()
                && a.ver_cat().hom_set(ob, x).len() == b.ver_cat().hom_set(&cand, fx).len()
        });
        if !consistent {
            continue;
        }
        ob_map.insert(ob.clone(), cand.clone());
        used.insert(cand.clone());
        if let Some(found) = double_search_objects(a, b, obs, at + 1, ob_map, used) {
            return Some(found);
        }
        used.remove(&cand);
        ob_map.remove(ob);
    }
    None
}

fn double_search_sorts(
    a: &DoubleCategory,
    b: &DoubleCategory,
    ob_map: &BTreeMap<ObId, ObId>,
) -> Option<DoubleFunctor> {
    // Horizontal morphisms, then vertical, then squares (forced by boundary
    // up to hom-square ambiguity).
    let hor_maps = bijections_over(a.hor_cat(), b.hor_cat(), ob_map)?;
    for hor_map in hor_maps {
        let Some(ver_maps) = bijections_over(a.ver_cat(), b.ver_cat(), ob_map) else {
            continue;
        };
        for ver_map in ver_maps {
            if let Some(f) = double_search_squares(a, b, ob_map, &hor_map, &ver_map) {
                return Some(f);
            }
        }
    }
    None
}

/// All bijective morphism assignments over a fixed object bijection that
/// respect the composition tables. Returned lazily would be nicer; the
/// fixtures are small enough for a vector.
fn bijections_over(
    a: &FinCategory,
    b: &FinCategory,
    ob_map: &BTreeMap<ObId, ObId>,
) -> Option<Vec<BTreeMap<MorId, MorId>>> {
    let mors: Vec<MorId> = a.mor_ids().cloned().collect();
    let mut out = Vec::new();
    let mut mor_map = BTreeMap::new();
    let mut used = BTreeSet::new();
    collect_bijections(a, b, &mors, 0, ob_map, &mut mor_map, &mut used, &mut out);
    if out.is_empty() {
        None
    } else {
        Some(out)
    }
}

#[allow(clippy::too_many_arguments)]
fn collect_bijections(
    a: &FinCategory,
    b: &FinCategory,
    mors: &[MorId],
    at: usize,
    ob_map: &BTreeMap<ObId, ObId>,
    mor_map: &mut BTreeMap<MorId, MorId>,
    used: &mut BTreeSet<MorId>,
    out: &mut Vec<BTreeMap<MorId, MorId>>,
) {
    if at == mors.len() {
        out.push(mor_map.clone());
        return;
    }
    let m = &mors[at];
    let Some(hom) = a.hom_data(m) else { return };
    let (Some(fs), Some(ft)) = (ob_map.get(&hom.src), ob_map.get(&hom.tgt)) else {
        return;
    };
    let candidates: Vec<MorId> = if a.is_identity(m) {
        b.id_of(fs).into_iter().cloned().collect()
    } else {
        b.hom_set(fs, ft)
            .into_iter()
            .filter(|c| !used.contains(*c) && !b.is_identity(c))
            .cloned()
            .collect()
    };
    'cand: for cand in candidates {
        if used.contains(&cand) {
            continue;
        }
        mor_map.insert(m.clone(), cand.clone());
        used.insert(cand.clone());
        for f in mor_map.keys().cloned().collect::<Vec<_>>() {
            for g in mor_map.keys().cloned().collect::<Vec<_>>() {
                let Some(h) = a.then(&f, &g) else { continue };
                let Some(h_img) = mor_map.get(h) else { continue };
                if b.then(&mor_map[&f], &mor_map[&g]) != Some(h_img) {
                    used.remove(&cand);
                    mor_map.remove(m);
                    continue 'cand;
                }
            }
        }
        collect_bijections(a, b, mors, at + 1, ob_map, mor_map, used, out);
        used.remove(&cand);
        mor_map.remove(m);
    }
}

fn double_search_squares(
    a: &DoubleCategory,
    b: &DoubleCategory,
    ob_map: &BTreeMap<ObId, ObId>,
    hor_map: &BTreeMap<MorId, MorId>,
    ver_map: &BTreeMap<MorId, MorId>,
) -> Option<DoubleFunctor> {
    let mut by_boundary: BTreeMap<(MorId, MorId, MorId, MorId), Vec<SqId>> = BTreeMap::new();
    for (sq, bd) in b.squares() {
        by_boundary
            .entry((bd.top.clone(), bd.bottom.clone(), bd.left.clone(), bd.right.clone()))
            .or_default()
            .push(sq.clone());
    }
    let sqs: Vec<SqId> = a.sq_ids().cloned().collect();
    let mut sq_map = BTreeMap::new();
    let mut used = BTreeSet::new();
    search_squares_at(
        a, b, &sqs, 0, ob_map, hor_map, ver_map, &by_boundary, &mut sq_map, &mut used,
    )
}

#[allow(clippy::too_many_arguments)]
fn search_squares_at(
    a: &DoubleCategory,
    b: &DoubleCategory,
    sqs: &[SqId],
    at: usize,
    ob_map: &BTreeMap<ObId, ObId>,
    hor_map: &BTreeMap<MorId, MorId>,
    ver_map: &BTreeMap<MorId, MorId>,
    by_boundary: &BTreeMap<(MorId, MorId, MorId, MorId), Vec<SqId>>,
    sq_map: &mut BTreeMap<SqId, SqId>,
    used: &mut BTreeSet<SqId>,
) -> Option<DoubleFunctor> {
    if at == sqs.len() {
        let f = DoubleFunctor::new(
            a.clone(),
            b.clone(),
            ob_map.clone(),
            hor_map.clone(),
            ver_map.clone(),
            sq_map.clone(),
        );
        return if f.is_isomorphism() { Some(f) } else { None };
    }
    let sq = &sqs[at];
    let bd = a.boundary(sq)?;
    let key = (
        hor_map.get(&bd.top)?.clone(),
        hor_map.get(&bd.bottom)?.clone(),
        ver_map.get(&bd.left)?.clone(),
        ver_map.get(&bd.right)?.clone(),
    );
    let empty = Vec::new();
    let candidates = by_boundary.get(&key).unwrap_or(&empty);
    for cand in candidates {
        if used.contains(cand) {
            continue;
        }
        sq_map.insert(sq.clone(), cand.clone());
        used.insert(cand.clone());
        if let Some(found) = search_squares_at(
            a, b, sqs, at + 1, ob_map, hor_map, ver_map, by_boundary, sq_map, used,
        ) {
            return Some(found);
        }
        used.remove(cand);
        sq_map.remove(sq);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::ops;

    #[test]
    fn ordinal_is_isomorphic_to_relabeled_self() {
        let a = FinCategory::ordinal(2);
        let b = a.prefixed("x_");
        let iso = cat_iso_search(&a, &b).expect("relabeling should be an isomorphism");
        assert_eq!(iso.validate(), Ok(()));
        assert!(iso.is_fully_faithful() && iso.is_surjective_on_objects());
    }

    #[test]
    fn ordinal_not_isomorphic_to_discrete() {
        let a = FinCategory::ordinal(1);
        let b = FinCategory::discrete(["p", "q"]);
        assert!(cat_iso_search(&a, &b).is_none());
    }

    #[test]
    fn product_symmetry_is_an_iso() {
        let a = FinCategory::ordinal(1).product(&FinCategory::ordinal(2));
        let b = FinCategory::ordinal(2).product(&FinCategory::ordinal(1));
        assert!(cat_iso_search(&a, &b).is_some());
    }

    #[test]
    fn double_iso_finds_transpose_symmetry() {
        let one = FinCategory::ordinal(1);
        let d = ops::external_product(&one, &one);
        let t = ops::transpose(&d);
        let iso = double_iso_search(&d, &t).expect("box product of equal factors is self-transpose");
        assert!(iso.is_isomorphism());
    }

    #[test]
    fn double_iso_rejects_mismatched_shapes() {
        let one = FinCategory::ordinal(1);
        let d = ops::external_product(&one, &one);
        let e = ops::embed_h(&one.product(&one));
        assert!(double_iso_search(&d, &e).is_none());
    }
}
