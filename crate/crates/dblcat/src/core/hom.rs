/*! The hom double category `[D, E]` of two double categories.

Objects are double functors `D -> E`, horizontal morphisms are horizontal
transformations, vertical morphisms are vertical transformations, and
squares are modifications. All four sorts are enumerated exhaustively, so
this is only feasible when both arguments are small; the budget bounds the
number of candidates examined.
*/

use std::collections::BTreeMap;

use thiserror::Error;

use crate::budget::{Budget, BudgetExceeded, Resource};

use super::category::FinCategory;
use super::double::{DoubleCategory, InvalidDouble, SquareBoundary};
use super::enumerate;
use super::functor::DoubleFunctor;
use super::ids::{MorId, ObId, SqId};
use super::transf::{HNatTransf, Modification, VNatTransf};

/// A failure while building a hom double category.
#[derive(Debug, Error)]
pub enum HomError {
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    /// A composite of enumerated cells was not found among the enumerated
    /// cells; indicates a bug rather than a property of the input.
    #[error("composite of enumerated {sort} cells missing from the enumeration")]
    MissingComposite { sort: &'static str },
    #[error("assembled hom double category fails validation")]
    Assembly(Vec<InvalidDouble>),
}

/// A hom double category with dictionaries from its cells back to the
/// functors, transformations, and modifications they name.
#[derive(Clone, Debug)]
pub struct HomDouble {
    pub double: DoubleCategory,
    pub functors: BTreeMap<ObId, DoubleFunctor>,
    pub hors: BTreeMap<MorId, HNatTransf>,
    pub vers: BTreeMap<MorId, VNatTransf>,
    pub mods: BTreeMap<SqId, Modification>,
}

/// Charges one unit against the square budget per examined candidate.
struct Meter<'a> {
    budget: &'a Budget,
    spent: usize,
}

impl Meter<'_> {
    fn tick(&mut self, context: &str) -> Result<(), BudgetExceeded> {
        self.spent += 1;
        self.budget.charge_squares(self.spent, context)
    }
}

/// Index from a square boundary in the target to the squares carrying it.
type BoundaryIndex = BTreeMap<(MorId, MorId, MorId, MorId), Vec<SqId>>;

fn boundary_index(e: &DoubleCategory) -> BoundaryIndex {
    let mut index: BoundaryIndex = BTreeMap::new();
    for (sq, b) in e.squares() {
        index
            .entry((b.top.clone(), b.bottom.clone(), b.left.clone(), b.right.clone()))
            .or_default()
            .push(sq.clone());
    }
    index
}

/// Compute `[d, e]` by exhaustive enumeration.
pub fn hom_double_category(
    d: &DoubleCategory,
    e: &DoubleCategory,
    budget: &Budget,
) -> Result<HomDouble, HomError> {
    let mut meter = Meter { budget, spent: 0 };
    let functor_list =
        enumerate::double_functors_between(d, e, budget.max_squares).map_err(|_| {
            BudgetExceeded {
                resource: Resource::Squares,
                limit: budget.max_squares,
                context: Some("enumerating double functors for a hom".to_string()),
            }
        })?;
    let functors: BTreeMap<ObId, DoubleFunctor> = functor_list
        .into_iter()
        .enumerate()
        .map(|(i, f)| (ObId(format!("F{i}")), f))
        .collect();
    let by_boundary = boundary_index(e);

    // Horizontal transformations, in functor-pair order.
    let mut hors: BTreeMap<MorId, HNatTransf> = BTreeMap::new();
    let mut h_index: BTreeMap<HKey, MorId> = BTreeMap::new();
    for (fi, f) in &functors {
        for (gi, g) in &functors {
            for t in h_transfs_between(d, e, f, g, &by_boundary, &mut meter)? {
                let id = MorId(format!("h{}", hors.len()));
                h_index.insert(h_key(fi, gi, &t), id.clone());
                hors.insert(id, t);
            }
        }
    }

    // Vertical transformations.
    let mut vers: BTreeMap<MorId, VNatTransf> = BTreeMap::new();
    let mut v_index: BTreeMap<VKey, MorId> = BTreeMap::new();
    for (fi, f) in &functors {
        for (gi, g) in &functors {
            for t in v_transfs_between(d, e, f, g, &by_boundary, &mut meter)? {
                let id = MorId(format!("v{}", vers.len()));
                v_index.insert(v_key(fi, gi, &t), id.clone());
                vers.insert(id, t);
            }
        }
    }

    let functor_id = |f: &DoubleFunctor| -> Option<ObId> {
        functors.iter().find(|(_, g)| *g == f).map(|(i, _)| i.clone())
    };

    // Modifications, one batch per closing frame.
    let mut mods: BTreeMap<SqId, Modification> = BTreeMap::new();
    let mut m_index: BTreeMap<MKey, SqId> = BTreeMap::new();
    let mut mod_boundaries: BTreeMap<SqId, SquareBoundary> = BTreeMap::new();
    for (ti, top) in &hors {
        for (li, left) in &vers {
            if left.from != top.from {
                continue;
            }
            for (ri, right) in &vers {
                if right.from != top.to {
                    continue;
                }
                for (bi, bottom) in &hors {
                    if bottom.from != left.to || bottom.to != right.to {
                        continue;
                    }
                    for m in modifications_in_frame(d, e, top, bottom, left, right, &by_boundary, &mut meter)? {
                        let id = SqId(format!("m{}", mods.len()));
                        m_index.insert(m_key(ti, bi, li, ri, &m), id.clone());
                        mod_boundaries.insert(
                            id.clone(),
                            SquareBoundary {
                                top: ti.clone(),
                                bottom: bi.clone(),
                                left: li.clone(),
                                right: ri.clone(),
                            },
                        );
                        mods.insert(id, m);
                    }
                }
            }
        }
    }

    // Horizontal category: functors and horizontal transformations.
    let mut hor_cat = FinCategory::new();
    let mut ver_cat = FinCategory::new();
    for fi in functors.keys() {
        hor_cat.add_object(fi.clone());
        ver_cat.add_object(fi.clone());
    }
    for (hi, t) in &hors {
        let src = functor_id(&t.from).ok_or(HomError::MissingComposite { sort: "functor" })?;
        let tgt = functor_id(&t.to).ok_or(HomError::MissingComposite { sort: "functor" })?;
        hor_cat.add_morphism(hi.clone(), src, tgt);
    }
    for (vi, t) in &vers {
        let src = functor_id(&t.from).ok_or(HomError::MissingComposite { sort: "functor" })?;
        let tgt = functor_id(&t.to).ok_or(HomError::MissingComposite { sort: "functor" })?;
        ver_cat.add_morphism(vi.clone(), src, tgt);
    }
    for (fi, f) in &functors {
        let idh = h_index
            .get(&h_key(fi, fi, &HNatTransf::identity(f)))
            .ok_or(HomError::MissingComposite { sort: "horizontal" })?;
        hor_cat.set_identity(fi.clone(), idh.clone());
        let idv = v_index
            .get(&v_key(fi, fi, &VNatTransf::identity(f)))
            .ok_or(HomError::MissingComposite { sort: "vertical" })?;
        ver_cat.set_identity(fi.clone(), idv.clone());
    }
    for (ai, a) in &hors {
        for (bi, b) in &hors {
            if a.to != b.from {
                continue;
            }
            let comp = a.then(b).ok_or(HomError::MissingComposite { sort: "horizontal" })?;
            let src = functor_id(&comp.from).ok_or(HomError::MissingComposite { sort: "functor" })?;
            let tgt = functor_id(&comp.to).ok_or(HomError::MissingComposite { sort: "functor" })?;
            let ci = h_index
                .get(&h_key(&src, &tgt, &comp))
                .ok_or(HomError::MissingComposite { sort: "horizontal" })?;
            hor_cat.set_then(ai.clone(), bi.clone(), ci.clone());
        }
    }
    for (ai, a) in &vers {
        for (bi, b) in &vers {
            if a.to != b.from {
                continue;
            }
            let comp = a.then(b).ok_or(HomError::MissingComposite { sort: "vertical" })?;
            let src = functor_id(&comp.from).ok_or(HomError::MissingComposite { sort: "functor" })?;
            let tgt = functor_id(&comp.to).ok_or(HomError::MissingComposite { sort: "functor" })?;
            let ci = v_index
                .get(&v_key(&src, &tgt, &comp))
                .ok_or(HomError::MissingComposite { sort: "vertical" })?;
            ver_cat.set_then(ai.clone(), bi.clone(), ci.clone());
        }
    }

    let mut double = DoubleCategory::new();
    double.set_hor_cat(hor_cat);
    double.set_ver_cat(ver_cat);
    for (mi, b) in &mod_boundaries {
        double.add_square(mi.clone(), b.clone());
    }

    // Units: componentwise units in the target, then lookup.
    for (vi, t) in &vers {
        let unit = hor_unit_modification(d, e, t)
            .ok_or(HomError::MissingComposite { sort: "modification" })?;
        let key = {
            let src = functor_id(&t.from).ok_or(HomError::MissingComposite { sort: "functor" })?;
            let tgt = functor_id(&t.to).ok_or(HomError::MissingComposite { sort: "functor" })?;
            let top = h_index
                .get(&h_key(&src, &src, &HNatTransf::identity(&t.from)))
                .ok_or(HomError::MissingComposite { sort: "horizontal" })?;
            let bottom = h_index
                .get(&h_key(&tgt, &tgt, &HNatTransf::identity(&t.to)))
                .ok_or(HomError::MissingComposite { sort: "horizontal" })?;
            m_key(top, bottom, vi, vi, &unit)
        };
        let mi = m_index
            .get(&key)
            .ok_or(HomError::MissingComposite { sort: "modification" })?;
        double.set_hor_unit(vi.clone(), mi.clone());
    }
    for (hi, t) in &hors {
        let unit = ver_unit_modification(d, e, t)
            .ok_or(HomError::MissingComposite { sort: "modification" })?;
        let key = {
            let src = functor_id(&t.from).ok_or(HomError::MissingComposite { sort: "functor" })?;
            let tgt = functor_id(&t.to).ok_or(HomError::MissingComposite { sort: "functor" })?;
            let left = v_index
                .get(&v_key(&src, &src, &VNatTransf::identity(&t.from)))
                .ok_or(HomError::MissingComposite { sort: "vertical" })?;
            let right = v_index
                .get(&v_key(&tgt, &tgt, &VNatTransf::identity(&t.to)))
                .ok_or(HomError::MissingComposite { sort: "vertical" })?;
            m_key(hi, hi, left, right, &unit)
        };
        let mi = m_index
            .get(&key)
            .ok_or(HomError::MissingComposite { sort: "modification" })?;
        double.set_ver_unit(hi.clone(), mi.clone());
    }

    // Square compositions: componentwise in the target, then lookup.
    let framed: Vec<(&SqId, &SquareBoundary)> = mod_boundaries.iter().collect();
    for (ai, ab) in &framed {
        for (bi, bb) in &framed {
            if ab.right == bb.left {
                let composite = beside_modifications(e, &mods[*ai], &mods[*bi])
                    .ok_or(HomError::MissingComposite { sort: "modification" })?;
                let top = h_index
                    .get(&h_key_from(&functor_id, &composite.top)?)
                    .ok_or(HomError::MissingComposite { sort: "horizontal" })?;
                let bottom = h_index
                    .get(&h_key_from(&functor_id, &composite.bottom)?)
                    .ok_or(HomError::MissingComposite { sort: "horizontal" })?;
                let mi = m_index
                    .get(&m_key(top, bottom, &ab.left, &bb.right, &composite))
                    .ok_or(HomError::MissingComposite { sort: "modification" })?;
                double.set_beside((*ai).clone(), (*bi).clone(), mi.clone());
            }
            if ab.bottom == bb.top {
                let composite = stack_modifications(e, &mods[*ai], &mods[*bi])
                    .ok_or(HomError::MissingComposite { sort: "modification" })?;
                let left = v_index
                    .get(&v_key_from(&functor_id, &composite.left)?)
                    .ok_or(HomError::MissingComposite { sort: "vertical" })?;
                let right = v_index
                    .get(&v_key_from(&functor_id, &composite.right)?)
                    .ok_or(HomError::MissingComposite { sort: "vertical" })?;
                let mi = m_index
                    .get(&m_key(&ab.top, &bb.bottom, left, right, &composite))
                    .ok_or(HomError::MissingComposite { sort: "modification" })?;
                double.set_stack((*ai).clone(), (*bi).clone(), mi.clone());
            }
        }
    }

    double.validate().map_err(HomError::Assembly)?;
    Ok(HomDouble { double, functors, hors, vers, mods })
}

/// Lookup key for a horizontal transformation: endpoints plus components.
type HKey = (ObId, ObId, BTreeMap<ObId, MorId>, BTreeMap<MorId, SqId>);
type VKey = (ObId, ObId, BTreeMap<ObId, MorId>, BTreeMap<MorId, SqId>);
type MKey = (MorId, MorId, MorId, MorId, BTreeMap<ObId, SqId>);

fn h_key(from: &ObId, to: &ObId, t: &HNatTransf) -> HKey {
    (from.clone(), to.clone(), t.ob_component.clone(), t.ver_component.clone())
}

fn v_key(from: &ObId, to: &ObId, t: &VNatTransf) -> VKey {
    (from.clone(), to.clone(), t.ob_component.clone(), t.hor_component.clone())
}

fn m_key(top: &MorId, bottom: &MorId, left: &MorId, right: &MorId, m: &Modification) -> MKey {
    (top.clone(), bottom.clone(), left.clone(), right.clone(), m.component.clone())
}

fn h_key_from(
    functor_id: &impl Fn(&DoubleFunctor) -> Option<ObId>,
    t: &HNatTransf,
) -> Result<HKey, HomError> {
    let src = functor_id(&t.from).ok_or(HomError::MissingComposite { sort: "functor" })?;
    let tgt = functor_id(&t.to).ok_or(HomError::MissingComposite { sort: "functor" })?;
    Ok(h_key(&src, &tgt, t))
}

fn v_key_from(
    functor_id: &impl Fn(&DoubleFunctor) -> Option<ObId>,
    t: &VNatTransf,
) -> Result<VKey, HomError> {
    let src = functor_id(&t.from).ok_or(HomError::MissingComposite { sort: "functor" })?;
    let tgt = functor_id(&t.to).ok_or(HomError::MissingComposite { sort: "functor" })?;
    Ok(v_key(&src, &tgt, t))
}

/// All horizontal transformations `f => g`, by backtracking over object
/// components and then the squares over nonidentity verticals.
fn h_transfs_between(
    d: &DoubleCategory,
    e: &DoubleCategory,
    f: &DoubleFunctor,
    g: &DoubleFunctor,
    by_boundary: &BoundaryIndex,
    meter: &mut Meter<'_>,
) -> Result<Vec<HNatTransf>, BudgetExceeded> {
    let obs: Vec<ObId> = d.hor_cat().objects().cloned().collect();
    let vers: Vec<MorId> = d
        .ver_cat()
        .mor_ids()
        .filter(|u| !d.ver_cat().is_identity(u))
        .cloned()
        .collect();
    let mut out = Vec::new();
    let mut ob_component: BTreeMap<ObId, MorId> = BTreeMap::new();
    assign_h_obs(
        d, e, f, g, &obs, 0, &vers, by_boundary, &mut ob_component, &mut out, meter,
    )?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn assign_h_obs(
    d: &DoubleCategory,
    e: &DoubleCategory,
    f: &DoubleFunctor,
    g: &DoubleFunctor,
    obs: &[ObId],
    at: usize,
    vers: &[MorId],
    by_boundary: &BoundaryIndex,
    ob_component: &mut BTreeMap<ObId, MorId>,
    out: &mut Vec<HNatTransf>,
    meter: &mut Meter<'_>,
) -> Result<(), BudgetExceeded> {
    if at == obs.len() {
        let mut ver_component: BTreeMap<MorId, SqId> = BTreeMap::new();
        for a in obs {
            let (Some(ida), Some(comp)) = (d.ver_cat().id_of(a), ob_component.get(a)) else {
                return Ok(());
            };
            let Some(unit) = e.ver_unit_on(comp) else { return Ok(()) };
            ver_component.insert(ida.clone(), unit.clone());
        }
        return assign_h_vers(
            d, e, f, g, vers, 0, by_boundary, ob_component, &mut ver_component, out, meter,
        );
    }
    let a = &obs[at];
    let (Some(fa), Some(ga)) = (f.apply_ob(a), g.apply_ob(a)) else {
        return Ok(());
    };
    for cand in e.hor_cat().hom_set(fa, ga) {
        ob_component.insert(a.clone(), cand.clone());
        assign_h_obs(
            d, e, f, g, obs, at + 1, vers, by_boundary, ob_component, out, meter,
        )?;
        ob_component.remove(a);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments, clippy::only_used_in_recursion)]
fn assign_h_vers(
    d: &DoubleCategory,
    e: &DoubleCategory,
    f: &DoubleFunctor,
    g: &DoubleFunctor,
    vers: &[MorId],
    at: usize,
    by_boundary: &BoundaryIndex,
    ob_component: &BTreeMap<ObId, MorId>,
    ver_component: &mut BTreeMap<MorId, SqId>,
    out: &mut Vec<HNatTransf>,
    meter: &mut Meter<'_>,
) -> Result<(), BudgetExceeded> {
    if at == vers.len() {
        meter.tick("enumerating horizontal transformations")?;
        let t = HNatTransf {
            from: f.clone(),
            to: g.clone(),
            ob_component: ob_component.clone(),
            ver_component: ver_component.clone(),
        };
        if t.validate().is_ok() {
            out.push(t);
        }
        return Ok(());
    }
    let u = &vers[at];
    let (Some(src), Some(tgt)) = (d.ver_cat().src(u), d.ver_cat().tgt(u)) else {
        return Ok(());
    };
    let (Some(top), Some(bottom)) = (ob_component.get(src), ob_component.get(tgt)) else {
        return Ok(());
    };
    let (Some(fu), Some(gu)) = (f.apply_ver(u), g.apply_ver(u)) else {
        return Ok(());
    };
    let key = (top.clone(), bottom.clone(), fu.clone(), gu.clone());
    let empty = Vec::new();
    for cand in by_boundary.get(&key).unwrap_or(&empty) {
        ver_component.insert(u.clone(), cand.clone());
        assign_h_vers(
            d, e, f, g, vers, at + 1, by_boundary, ob_component, ver_component, out, meter,
        )?;
        ver_component.remove(u);
    }
    Ok(())
}

/// All vertical transformations `f => g`: the transposed enumeration.
fn v_transfs_between(
    d: &DoubleCategory,
    e: &DoubleCategory,
    f: &DoubleFunctor,
    g: &DoubleFunctor,
    by_boundary: &BoundaryIndex,
    meter: &mut Meter<'_>,
) -> Result<Vec<VNatTransf>, BudgetExceeded> {
    let obs: Vec<ObId> = d.hor_cat().objects().cloned().collect();
    let hors: Vec<MorId> = d
        .hor_cat()
        .mor_ids()
        .filter(|m| !d.hor_cat().is_identity(m))
        .cloned()
        .collect();
    let mut out = Vec::new();
    let mut ob_component: BTreeMap<ObId, MorId> = BTreeMap::new();
    assign_v_obs(
        d, e, f, g, &obs, 0, &hors, by_boundary, &mut ob_component, &mut out, meter,
    )?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn assign_v_obs(
    d: &DoubleCategory,
    e: &DoubleCategory,
    f: &DoubleFunctor,
    g: &DoubleFunctor,
    obs: &[ObId],
    at: usize,
    hors: &[MorId],
    by_boundary: &BoundaryIndex,
    ob_component: &mut BTreeMap<ObId, MorId>,
    out: &mut Vec<VNatTransf>,
    meter: &mut Meter<'_>,
) -> Result<(), BudgetExceeded> {
    if at == obs.len() {
        let mut hor_component: BTreeMap<MorId, SqId> = BTreeMap::new();
        for a in obs {
            let (Some(ida), Some(comp)) = (d.hor_cat().id_of(a), ob_component.get(a)) else {
                return Ok(());
            };
            let Some(unit) = e.hor_unit_on(comp) else { return Ok(()) };
            hor_component.insert(ida.clone(), unit.clone());
        }
        return assign_v_hors(
            d, e, f, g, hors, 0, by_boundary, ob_component, &mut hor_component, out, meter,
        );
    }
    let a = &obs[at];
    let (Some(fa), Some(ga)) = (f.apply_ob(a), g.apply_ob(a)) else {
        return Ok(());
    };
    for cand in e.ver_cat().hom_set(fa, ga) {
        ob_component.insert(a.clone(), cand.clone());
        assign_v_obs(
            d, e, f, g, obs, at + 1, hors, by_boundary, ob_component, out, meter,
        )?;
        ob_component.remove(a);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments, clippy::only_used_in_recursion)]
fn assign_v_hors(
    d: &DoubleCategory,
    e: &DoubleCategory,
    f: &DoubleFunctor,
    g: &DoubleFunctor,
    hors: &[MorId],
    at: usize,
    by_boundary: &BoundaryIndex,
    ob_component: &BTreeMap<ObId, MorId>,
    hor_component: &mut BTreeMap<MorId, SqId>,
    out: &mut Vec<VNatTransf>,
    meter: &mut Meter<'_>,
) -> Result<(), BudgetExceeded> {
    if at == hors.len() {
        meter.tick("enumerating vertical transformations")?;
        let t = VNatTransf {
            from: f.clone(),
            to: g.clone(),
            ob_component: ob_component.clone(),
            hor_component: hor_component.clone(),
        };
        if t.validate().is_ok() {
            out.push(t);
        }
        return Ok(());
    }
    let m = &hors[at];
    let (Some(src), Some(tgt)) = (d.hor_cat().src(m), d.hor_cat().tgt(m)) else {
        return Ok(());
    };
    let (Some(left), Some(right)) = (ob_component.get(src), ob_component.get(tgt)) else {
        return Ok(());
    };
    let (Some(fm), Some(gm)) = (f.apply_hor(m), g.apply_hor(m)) else {
        return Ok(());
    };
    let key = (fm.clone(), gm.clone(), left.clone(), right.clone());
    let empty = Vec::new();
    for cand in by_boundary.get(&key).unwrap_or(&empty) {
        hor_component.insert(m.clone(), cand.clone());
        assign_v_hors(
            d, e, f, g, hors, at + 1, by_boundary, ob_component, hor_component, out, meter,
        )?;
        hor_component.remove(m);
    }
    Ok(())
}

/// All modifications filling a fixed frame of four transformations.
#[allow(clippy::too_many_arguments)]
fn modifications_in_frame(
    d: &DoubleCategory,
    e: &DoubleCategory,
    top: &HNatTransf,
    bottom: &HNatTransf,
    left: &VNatTransf,
    right: &VNatTransf,
    by_boundary: &BoundaryIndex,
    meter: &mut Meter<'_>,
) -> Result<Vec<Modification>, BudgetExceeded> {
    let obs: Vec<ObId> = d.hor_cat().objects().cloned().collect();
    let mut out = Vec::new();
    let mut component: BTreeMap<ObId, SqId> = BTreeMap::new();
    assign_mod_obs(
        d, e, top, bottom, left, right, &obs, 0, by_boundary, &mut component, &mut out, meter,
    )?;
    Ok(out)
}

#[allow(clippy::too_many_arguments, clippy::only_used_in_recursion)]
fn assign_mod_obs(
    d: &DoubleCategory,
    e: &DoubleCategory,
    top: &HNatTransf,
    bottom: &HNatTransf,
    left: &VNatTransf,
    right: &VNatTransf,
    obs: &[ObId],
    at: usize,
    by_boundary: &BoundaryIndex,
    component: &mut BTreeMap<ObId, SqId>,
    out: &mut Vec<Modification>,
    meter: &mut Meter<'_>,
) -> Result<(), BudgetExceeded> {
    if at == obs.len() {
        meter.tick("enumerating modifications")?;
        let m = Modification {
            top: top.clone(),
            bottom: bottom.clone(),
            left: left.clone(),
            right: right.clone(),
            component: component.clone(),
        };
        if m.validate().is_ok() {
            out.push(m);
        }
        return Ok(());
    }
    let a = &obs[at];
    let key = (
        match top.ob_component.get(a) {
            Some(m) => m.clone(),
            None => return Ok(()),
        },
        match bottom.ob_component.get(a) {
            Some(m) => m.clone(),
            None => return Ok(()),
        },
        match left.ob_component.get(a) {
            Some(m) => m.clone(),
            None => return Ok(()),
        },
        match right.ob_component.get(a) {
            Some(m) => m.clone(),
            None => return Ok(()),
        },
    );
    let empty = Vec::new();
    for cand in by_boundary.get(&key).unwrap_or(&empty) {
        component.insert(a.clone(), cand.clone());
        assign_mod_obs(
            d, e, top, bottom, left, right, obs, at + 1, by_boundary, component, out, meter,
        )?;
        component.remove(a);
    }
    Ok(())
}

/// The modification that is the `beside` unit on a vertical transformation:
/// componentwise `beside` units in the target.
fn hor_unit_modification(
    d: &DoubleCategory,
    e: &DoubleCategory,
    t: &VNatTransf,
) -> Option<Modification> {
    let mut component = BTreeMap::new();
    for a in d.hor_cat().objects() {
        let comp = t.ob_component.get(a)?;
        component.insert(a.clone(), e.hor_unit_on(comp)?.clone());
    }
    Some(Modification {
        top: HNatTransf::identity(&t.from),
        bottom: HNatTransf::identity(&t.to),
        left: t.clone(),
        right: t.clone(),
        component,
    })
}

/// The modification that is the `stack` unit on a horizontal transformation.
fn ver_unit_modification(
    d: &DoubleCategory,
    e: &DoubleCategory,
    t: &HNatTransf,
) -> Option<Modification> {
    let mut component = BTreeMap::new();
    for a in d.hor_cat().objects() {
        let comp = t.ob_component.get(a)?;
        component.insert(a.clone(), e.ver_unit_on(comp)?.clone());
    }
    Some(Modification {
        top: t.clone(),
        bottom: t.clone(),
        left: VNatTransf::identity(&t.from),
        right: VNatTransf::identity(&t.to),
        component,
    })
}

fn beside_modifications(
    e: &DoubleCategory,
    a: &Modification,
    b: &Modification,
) -> Option<Modification> {
    let mut component = BTreeMap::new();
    for (ob, sa) in &a.component {
        let sb = b.component.get(ob)?;
        component.insert(ob.clone(), e.beside(sa, sb)?.clone());
    }
    Some(Modification {
        top: a.top.then(&b.top)?,
        bottom: a.bottom.then(&b.bottom)?,
        left: a.left.clone(),
        right: b.right.clone(),
        component,
    })
}

fn stack_modifications(
    e: &DoubleCategory,
    a: &Modification,
    b: &Modification,
) -> Option<Modification> {
    let mut component = BTreeMap::new();
    for (ob, sa) in &a.component {
        let sb = b.component.get(ob)?;
        component.insert(ob.clone(), e.stack(sa, sb)?.clone());
    }
    Some(Modification {
        top: a.top.clone(),
        bottom: b.bottom.clone(),
        left: a.left.then(&b.left)?,
        right: a.right.then(&b.right)?,
        component,
    })
}

#[cfg(test)]
mod tests {
    use super::super::category::FinCategory;
    use super::super::iso;
    use super::super::ops;
    use super::*;

    #[test]
    fn hom_from_the_point_recovers_the_target() {
        let point = ops::terminal();
        let e = ops::external_product(&FinCategory::ordinal(1), &FinCategory::ordinal(1));
        let hom = hom_double_category(&point, &e, &Budget::default()).expect("hom should fit");
        assert_eq!(hom.double.validate(), Ok(()));
        assert_eq!(hom.double.hor_cat().object_count(), 4);
        assert_eq!(hom.double.hor_cat().morphism_count(), 6);
        assert_eq!(hom.double.ver_cat().morphism_count(), 6);
        assert_eq!(hom.double.square_count(), 9);
        assert!(iso::double_iso_search(&hom.double, &e).is_some());
    }

    #[test]
    fn hom_into_the_point_is_the_point() {
        let point = ops::terminal();
        let d = ops::embed_h(&FinCategory::ordinal(1));
        let hom = hom_double_category(&d, &point, &Budget::default()).expect("hom should fit");
        assert_eq!(hom.double.hor_cat().object_count(), 1);
        assert_eq!(hom.double.square_count(), 1);
    }

    #[test]
    fn hom_budget_is_enforced() {
        let e = ops::external_product(&FinCategory::ordinal(1), &FinCategory::ordinal(1));
        let tight = Budget { max_squares: 3, ..Budget::default() };
        assert!(matches!(
            hom_double_category(&ops::terminal(), &e, &tight),
            Err(HomError::Budget(_))
        ));
    }
}
