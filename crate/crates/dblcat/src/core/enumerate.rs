/*! Exhaustive enumeration of functors and double functors.

Backtracking over sorted identifier order, so results come out in a stable
order. Enumeration is budgeted: exceeding the cap is an error, not a
truncation, because downstream bijection arguments need completeness.
*/

use std::collections::BTreeMap;

use crate::budget::{BudgetExceeded, Resource};

use super::category::{FinCategory, FinFunctor};
use super::double::DoubleCategory;
use super::functor::DoubleFunctor;
use super::ids::{MorId, ObId, SqId};

fn over_limit(found: usize, limit: usize, context: &str) -> Result<(), BudgetExceeded> {
    if found > limit {
        Err(BudgetExceeded {
            resource: Resource::Squares,
            limit,
            context: Some(context.to_string()),
        })
    } else {
        Ok(())
    }
}

/// All functors from `source` to `target`, in a stable order.
pub fn functors_between(
    source: &FinCategory,
    target: &FinCategory,
    limit: usize,
) -> Result<Vec<FinFunctor>, BudgetExceeded> {
    let objects: Vec<ObId> = source.objects().cloned().collect();
    let morphisms: Vec<MorId> = source.mor_ids().cloned().collect();
    if target.object_count() == 0 {
        return Ok(if source.object_count() == 0 {
            vec![FinFunctor::new(
                source.clone(),
                target.clone(),
                BTreeMap::new(),
                BTreeMap::new(),
            )]
        } else {
            Vec::new()
        });
    }
    let mut found = Vec::new();
    let mut ob_map: BTreeMap<ObId, ObId> = BTreeMap::new();
    let mut mor_map: BTreeMap<MorId, MorId> = BTreeMap::new();
    assign_objects(
        source, target, &objects, 0, &morphisms, &mut ob_map, &mut mor_map, &mut found, limit,
    )?;
    Ok(found)
}

#[allow(clippy::too_many_arguments)]
fn assign_objects(
    source: &FinCategory,
    target: &FinCategory,
    objects: &[ObId],
    at: usize,
    morphisms: &[MorId],
    ob_map: &mut BTreeMap<ObId, ObId>,
    mor_map: &mut BTreeMap<MorId, MorId>,
    found: &mut Vec<FinFunctor>,
    limit: usize,
) -> Result<(), BudgetExceeded> {
    if at == objects.len() {
        return assign_morphisms(
            source, target, morphisms, 0, ob_map, mor_map, found, limit,
        );
    }
    let candidates: Vec<ObId> = target.objects().cloned().collect();
    for cand in candidates {
        ob_map.insert(objects[at].clone(), cand);
        assign_objects(
            source, target, objects, at + 1, morphisms, ob_map, mor_map, found, limit,
        )?;
        ob_map.remove(&objects[at]);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn assign_morphisms(
    source: &FinCategory,
    target: &FinCategory,
    morphisms: &[MorId],
    at: usize,
    ob_map: &mut BTreeMap<ObId, ObId>,
    mor_map: &mut BTreeMap<MorId, MorId>,
    found: &mut Vec<FinFunctor>,
    limit: usize,
) -> Result<(), BudgetExceeded> {
    if at == morphisms.len() {
        found.push(FinFunctor::new(
            source.clone(),
            target.clone(),
            ob_map.clone(),
            mor_map.clone(),
        ));
        return over_limit(found.len(), limit, "functor enumeration");
    }
    let m = &morphisms[at];
    let hom = source.hom_data(m).expect("source morphism should have endpoints");
    let (Some(fs), Some(ft)) = (ob_map.get(&hom.src), ob_map.get(&hom.tgt)) else {
        return Ok(());
    };
    let candidates: Vec<MorId> = if source.is_identity(m) {
        target.id_of(fs).into_iter().cloned().collect()
    } else {
        target.hom_set(fs, ft).into_iter().cloned().collect()
    };
    'cand: for cand in candidates {
        mor_map.insert(m.clone(), cand);
        // Composition constraints among everything assigned so far.
        for f in mor_map.keys().cloned().collect::<Vec<_>>() {
            for g in mor_map.keys().cloned().collect::<Vec<_>>() {
                let Some(h) = source.then(&f, &g) else { continue };
                let Some(h_img) = mor_map.get(h) else { continue };
                let want = target.then(&mor_map[&f], &mor_map[&g]);
                if want != Some(h_img) {
                    mor_map.remove(m);
                    continue 'cand;
                }
            }
        }
        assign_morphisms(source, target, morphisms, at + 1, ob_map, mor_map, found, limit)?;
        mor_map.remove(m);
    }
    Ok(())
}

/// All double functors from `d` to `e`, in a stable order.
pub fn double_functors_between(
    d: &DoubleCategory,
    e: &DoubleCategory,
    limit: usize,
) -> Result<Vec<DoubleFunctor>, BudgetExceeded> {
    // Index of target squares by boundary for quick candidate lookup.
    let mut by_boundary: BTreeMap<(MorId, MorId, MorId, MorId), Vec<SqId>> = BTreeMap::new();
    for (sq, b) in e.squares() {
        by_boundary
            .entry((b.top.clone(), b.bottom.clone(), b.left.clone(), b.right.clone()))
            .or_default()
            .push(sq.clone());
    }
    let hor_parts = functors_between(d.hor_cat(), e.hor_cat(), limit)?;
    let mut found = Vec::new();
    for hor in hor_parts {
        // Vertical morphism assignment constrained to the same object map.
        let ob_map = hor.ob_map().clone();
        let ver_morphisms: Vec<MorId> = d.ver_cat().mor_ids().cloned().collect();
        let mut ver_map: BTreeMap<MorId, MorId> = BTreeMap::new();
        let mut ver_choices: Vec<BTreeMap<MorId, MorId>> = Vec::new();
        assign_vers(
            d, e, &ver_morphisms, 0, &ob_map, &mut ver_map, &mut ver_choices, limit,
        )?;
        for ver_map in ver_choices {
            let sq_ids: Vec<SqId> = d.sq_ids().cloned().collect();
            let mut sq_map: BTreeMap<SqId, SqId> = BTreeMap::new();
            assign_squares(
                d,
                e,
                &sq_ids,
                0,
                hor.mor_map(),
                &ver_map,
                &by_boundary,
                &mut sq_map,
                &mut |sq_map| {
                    let cand = DoubleFunctor::new(
                        d.clone(),
                        e.clone(),
                        ob_map.clone(),
                        hor.mor_map().clone(),
                        ver_map.clone(),
                        sq_map.clone(),
                    );
                    if cand.validate().is_ok() {
                        found.push(cand);
                    }
                },
            );
            over_limit(found.len(), limit, "double functor enumeration")?;
        }
    }
    Ok(found)
}

#[allow(clippy::too_many_arguments)]
fn assign_vers(
    d: &DoubleCategory,
    e: &DoubleCategory,
    morphisms: &[MorId],
    at: usize,
    ob_map: &BTreeMap<ObId, ObId>,
    ver_map: &mut BTreeMap<MorId, MorId>,
    out: &mut Vec<BTreeMap<MorId, MorId>>,
    limit: usize,
) -> Result<(), BudgetExceeded> {
    if at == morphisms.len() {
        out.push(ver_map.clone());
        return over_limit(out.len(), limit, "vertical part enumeration");
    }
    let m = &morphisms[at];
    let hom = d.ver_cat().hom_data(m).expect("vertical morphism should have endpoints");
    let (Some(fs), Some(ft)) = (ob_map.get(&hom.src), ob_map.get(&hom.tgt)) else {
        return Ok(());
    };
    let candidates: Vec<MorId> = if d.ver_cat().is_identity(m) {
        e.ver_cat().id_of(fs).into_iter().cloned().collect()
    } else {
        e.ver_cat().hom_set(fs, ft).into_iter().cloned().collect()
    };
    'cand: for cand in candidates {
        ver_map.insert(m.clone(), cand);
        for f in ver_map.keys().cloned().collect::<Vec<_>>() {
            for g in ver_map.keys().cloned().collect::<Vec<_>>() {
                let Some(h) = d.ver_cat().then(&f, &g) else { continue };
                let Some(h_img) = ver_map.get(h) else { continue };
                if e.ver_cat().then(&ver_map[&f], &ver_map[&g]) != Some(h_img) {
                    ver_map.remove(m);
                    continue 'cand;
                }
            }
        }
        assign_vers(d, e, morphisms, at + 1, ob_map, ver_map, out, limit)?;
        ver_map.remove(m);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn assign_squares(
    d: &DoubleCategory,
    e: &DoubleCategory,
    sq_ids: &[SqId],
    at: usize,
    hor_map: &BTreeMap<MorId, MorId>,
    ver_map: &BTreeMap<MorId, MorId>,
    by_boundary: &BTreeMap<(MorId, MorId, MorId, MorId), Vec<SqId>>,
    sq_map: &mut BTreeMap<SqId, SqId>,
    emit: &mut dyn FnMut(&BTreeMap<SqId, SqId>),
) {
    if at == sq_ids.len() {
        emit(sq_map);
        return;
    }
    let sq = &sq_ids[at];
    let b = d.boundary(sq).expect("square should have a boundary");
    let key = (
        hor_map.get(&b.top).cloned(),
        hor_map.get(&b.bottom).cloned(),
        ver_map.get(&b.left).cloned(),
        ver_map.get(&b.right).cloned(),
    );
    let (Some(t), Some(bo), Some(l), Some(r)) = key else { return };
    let empty = Vec::new();
    let candidates = by_boundary.get(&(t, bo, l, r)).unwrap_or(&empty);
    'cand: for cand in candidates {
        sq_map.insert(sq.clone(), cand.clone());
        // Composition constraints among assigned squares.
        for a in sq_map.keys().cloned().collect::<Vec<_>>() {
            for bsq in sq_map.keys().cloned().collect::<Vec<_>>() {
                for (comp, table) in [
                    (d.beside(&a, &bsq), true),
                    (d.stack(&a, &bsq), false),
                ] {
                    let Some(c) = comp else { continue };
                    let Some(c_img) = sq_map.get(c) else { continue };
                    let got = if table {
                        e.beside(&sq_map[&a], &sq_map[&bsq])
                    } else {
                        e.stack(&sq_map[&a], &sq_map[&bsq])
                    };
                    if got != Some(c_img) {
                        sq_map.remove(sq);
                        continue 'cand;
                    }
                }
            }
        }
        assign_squares(d, e, sq_ids, at + 1, hor_map, ver_map, by_boundary, sq_map, emit);
        sq_map.remove(sq);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::ops;

    #[test]
    fn functors_from_ordinal_one() {
        // [1] -> [1]: three monotone-like functors (two constants, identity).
        let one = FinCategory::ordinal(1);
        let fs = functors_between(&one, &one, 100).unwrap();
        assert_eq!(fs.len(), 3);
        for f in &fs {
            assert_eq!(f.validate(), Ok(()));
        }
    }

    #[test]
    fn functors_into_walking_iso() {
        // [1] -> I: any pair of objects with any connecting morphism: 4.
        let one = FinCategory::ordinal(1);
        let iso = FinCategory::walking_iso();
        let fs = functors_between(&one, &iso, 100).unwrap();
        assert_eq!(fs.len(), 4);
    }

    #[test]
    fn budget_error_when_too_many() {
        let two = FinCategory::discrete(["a", "b"]);
        let err = functors_between(&two, &two, 3).unwrap_err();
        assert_eq!(err.limit, 3);
    }

    #[test]
    fn double_functors_from_point() {
        // Double functors from the terminal double category pick an object.
        let t = ops::terminal();
        let d = ops::external_product(&FinCategory::ordinal(1), &FinCategory::ordinal(1));
        let fs = double_functors_between(&t, &d, 100).unwrap();
        assert_eq!(fs.len(), 4);
        for f in &fs {
            assert_eq!(f.validate(), Ok(()));
        }
    }

    #[test]
    fn double_functors_respect_squares() {
        // From [1] box [1] to the commuting squares of [1]x[1]: determined by
        // the horizontal and vertical images, squares forced by thinness.
        let one = FinCategory::ordinal(1);
        let d = ops::external_product(&one, &one);
        let e = ops::commutative_squares(&one.product(&one));
        let fs = double_functors_between(&d, &e, 10_000).unwrap();
        assert!(!fs.is_empty());
        for f in &fs {
            assert_eq!(f.validate(), Ok(()));
        }
    }
}
