/*! Finite categories with explicit composition tables, and functors.

The composition table is stored as `(f, g) -> h` meaning `h` is "`f` then
`g`": first `f`, then `g`, diagrammatic order. Serialized documents use the
same convention as triples `[f, g, h]`.
*/

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ids::{paired, MorId, ObId};

/// Source and target of a morphism.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Hom {
    pub src: ObId,
    pub tgt: ObId,
}

impl Hom {
    pub fn new(src: impl Into<ObId>, tgt: impl Into<ObId>) -> Self {
        Hom { src: src.into(), tgt: tgt.into() }
    }
}

/// A way a [`FinCategory`] can fail to be a category.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InvalidCategory {
    /// A morphism's source or target is not an object of the category.
    #[error("morphism {mor} has unknown endpoint {ob}")]
    MissingEndpointObject { mor: MorId, ob: ObId },
    /// An object has no identity morphism assigned.
    #[error("object {ob} has no identity")]
    MissingIdentity { ob: ObId },
    /// An identity entry names a morphism that does not exist.
    #[error("identity of {ob} is the unknown morphism {mor}")]
    UnknownIdentity { ob: ObId, mor: MorId },
    /// An object's identity is not an endomorphism of that object.
    #[error("identity {mor} of {ob} is not an endomorphism of {ob}")]
    IdentityNotEndo { ob: ObId, mor: MorId },
    /// A composition entry mentions a morphism that does not exist.
    #[error("composition table mentions unknown morphism {mor}")]
    UnknownMorphism { mor: MorId },
    /// A composable pair has no composite in the table.
    #[error("no composite for {first} then {second}")]
    MissingComposite { first: MorId, second: MorId },
    /// The table defines a composite for a pair that is not composable.
    #[error("composite defined for non-composable pair {first}, {second}")]
    SpuriousComposite { first: MorId, second: MorId },
    /// A composite has the wrong source or target.
    #[error("composite {composite} of {first} then {second} has wrong endpoints")]
    CompositeBoundary { first: MorId, second: MorId, composite: MorId },
    /// Composing with an identity changed the morphism.
    #[error("unit law fails at {mor}")]
    UnitLaw { mor: MorId },
    /// Two ways of composing a triple disagree.
    #[error("associativity fails at {first}, {second}, {third}")]
    Associativity { first: MorId, second: MorId, third: MorId },
}

/// Composition tables are keyed by pairs, which JSON cannot use as object
/// keys; on the wire they become lists of `[first, second, composite]`
/// triples instead.
pub(crate) mod triple_table {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S, K, V>(map: &BTreeMap<(K, K), V>, ser: S) -> Result<S::Ok, S::Error>
    where
        S: Serializer,
        K: Serialize,
        V: Serialize,
    {
        let rows: Vec<(&K, &K, &V)> = map.iter().map(|((a, b), c)| (a, b, c)).collect();
        rows.serialize(ser)
    }

    pub fn deserialize<'de, D, K, V>(de: D) -> Result<BTreeMap<(K, K), V>, D::Error>
    where
        D: Deserializer<'de>,
        K: Deserialize<'de> + Ord,
        V: Deserialize<'de>,
    {
        let rows: Vec<(K, K, V)> = Vec::deserialize(de)?;
        Ok(rows.into_iter().map(|(a, b, c)| ((a, b), c)).collect())
    }
}

/// A finite category: objects, morphisms, identities, composition table.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinCategory {
    objects: BTreeSet<ObId>,
    morphisms: BTreeMap<MorId, Hom>,
    identity: BTreeMap<ObId, MorId>,
    #[serde(with = "triple_table")]
    then_table: BTreeMap<(MorId, MorId), MorId>,
}

impl FinCategory {
    pub fn new() -> Self {
        Self::default()
    }

    /// The discrete category on the given objects: identities only.
    pub fn discrete<I, T>(objects: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<ObId>,
    {
        let mut cat = FinCategory::new();
        for ob in objects {
            let ob = ob.into();
            let id = MorId(format!("id_{ob}"));
            cat.add_object(ob.clone());
            cat.add_morphism(id.clone(), ob.clone(), ob.clone());
            cat.set_identity(ob, id);
        }
        cat.close_identities();
        cat
    }

    /// The ordinal `[n]`: objects `0..=n`, one morphism `i<=j` for each pair.
    pub fn ordinal(n: usize) -> Self {
        let mut cat = FinCategory::new();
        for i in 0..=n {
            cat.add_object(i.to_string());
        }
        for i in 0..=n {
            for j in i..=n {
                cat.add_morphism(format!("{i}<={j}"), i.to_string(), j.to_string());
            }
        }
        for i in 0..=n {
            cat.set_identity(i.to_string(), format!("{i}<={i}"));
        }
        for i in 0..=n {
            for j in i..=n {
                for k in j..=n {
                    cat.set_then(
                        format!("{i}<={j}"),
                        format!("{j}<={k}"),
                        format!("{i}<={k}"),
                    );
                }
            }
        }
        cat
    }

    /// The free-standing isomorphism: objects `0`, `1` and inverse morphisms
    /// `0~>1`, `1~>0`.
    pub fn walking_iso() -> Self {
        let mut cat = FinCategory::new();
        for ob in ["0", "1"] {
            cat.add_object(ob);
            cat.add_morphism(format!("id{ob}"), ob, ob);
            cat.set_identity(ob, format!("id{ob}"));
        }
        cat.add_morphism("0~>1", "0", "1");
        cat.add_morphism("1~>0", "1", "0");
        cat.set_then("0~>1", "1~>0", "id0");
        cat.set_then("1~>0", "0~>1", "id1");
        cat.close_identities();
        cat
    }

    pub fn add_object(&mut self, ob: impl Into<ObId>) {
        self.objects.insert(ob.into());
    }

    pub fn add_morphism(&mut self, mor: impl Into<MorId>, src: impl Into<ObId>, tgt: impl Into<ObId>) {
        self.morphisms.insert(mor.into(), Hom::new(src, tgt));
    }

    pub fn set_identity(&mut self, ob: impl Into<ObId>, mor: impl Into<MorId>) {
        self.identity.insert(ob.into(), mor.into());
    }

    pub fn set_then(&mut self, first: impl Into<MorId>, second: impl Into<MorId>, composite: impl Into<MorId>) {
        self.then_table.insert((first.into(), second.into()), composite.into());
    }

    /// Fill in every composite involving an identity. Builders call this
    /// after adding the interesting composites.
    pub fn close_identities(&mut self) {
        let pairs: Vec<(MorId, MorId, MorId)> = self
            .morphisms
            .iter()
            .flat_map(|(f, hom)| {
                let lid = self.identity.get(&hom.src).cloned();
                let rid = self.identity.get(&hom.tgt).cloned();
                let mut out = Vec::new();
                if let Some(l) = lid {
                    out.push((l, f.clone(), f.clone()));
                }
                if let Some(r) = rid {
                    out.push((f.clone(), r, f.clone()));
                }
                out
            })
            .collect();
        for (f, g, h) in pairs {
            self.then_table.entry((f, g)).or_insert(h);
        }
    }

    pub fn objects(&self) -> impl Iterator<Item = &ObId> {
        self.objects.iter()
    }

    pub fn has_object(&self, ob: &ObId) -> bool {
        self.objects.contains(ob)
    }

    pub fn morphisms(&self) -> impl Iterator<Item = (&MorId, &Hom)> {
        self.morphisms.iter()
    }

    pub fn mor_ids(&self) -> impl Iterator<Item = &MorId> {
        self.morphisms.keys()
    }

    pub fn has_morphism(&self, mor: &MorId) -> bool {
        self.morphisms.contains_key(mor)
    }

    pub fn hom_data(&self, mor: &MorId) -> Option<&Hom> {
        self.morphisms.get(mor)
    }

    pub fn src(&self, mor: &MorId) -> Option<&ObId> {
        self.morphisms.get(mor).map(|h| &h.src)
    }

    pub fn tgt(&self, mor: &MorId) -> Option<&ObId> {
        self.morphisms.get(mor).map(|h| &h.tgt)
    }

    pub fn id_of(&self, ob: &ObId) -> Option<&MorId> {
        self.identity.get(ob)
    }

    pub fn is_identity(&self, mor: &MorId) -> bool {
        self.morphisms
            .get(mor)
            .is_some_and(|h| self.identity.get(&h.src) == Some(mor))
    }

    /// The composite "`first` then `second`", if tabled.
    pub fn then(&self, first: &MorId, second: &MorId) -> Option<&MorId> {
        self.then_table.get(&(first.clone(), second.clone()))
    }

    /// Compose a path left to right; `None` for an empty path.
    pub fn then_path(&self, path: &[MorId]) -> Option<MorId> {
        let mut it = path.iter();
        let mut acc = it.next()?.clone();
        for next in it {
            acc = self.then(&acc, next)?.clone();
        }
        Some(acc)
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    /// Morphisms from `a` to `b`, in identifier order.
    pub fn hom_set(&self, a: &ObId, b: &ObId) -> Vec<&MorId> {
        self.morphisms
            .iter()
            .filter(|(_, h)| &h.src == a && &h.tgt == b)
            .map(|(m, _)| m)
            .collect()
    }

    /// All `(f, g)` with `tgt f = src g`, in identifier order.
    pub fn composable_pairs(&self) -> Vec<(MorId, MorId)> {
        let mut out = Vec::new();
        for (f, hf) in &self.morphisms {
            for (g, hg) in &self.morphisms {
                if hf.tgt == hg.src {
                    out.push((f.clone(), g.clone()));
                }
            }
        }
        out
    }

    /// The inverse of `mor`, if it has one.
    pub fn inverse(&self, mor: &MorId) -> Option<MorId> {
        let hom = self.morphisms.get(mor)?;
        let src_id = self.identity.get(&hom.src)?;
        let tgt_id = self.identity.get(&hom.tgt)?;
        self.hom_set(&hom.tgt, &hom.src)
            .into_iter()
            .find(|g| {
                self.then(mor, g) == Some(src_id) && self.then(g, mor) == Some(tgt_id)
            })
            .cloned()
    }

    pub fn is_iso(&self, mor: &MorId) -> bool {
        self.inverse(mor).is_some()
    }

    /// Is there an isomorphism from `a` to `b`?
    pub fn isomorphic_objects(&self, a: &ObId, b: &ObId) -> bool {
        a == b || self.hom_set(a, b).into_iter().any(|f| self.is_iso(f))
    }

    /// The full subcategory on the given objects.
    pub fn full_subcategory(&self, objects: &BTreeSet<ObId>) -> FinCategory {
        let mut cat = FinCategory::new();
        for ob in objects {
            if self.objects.contains(ob) {
                cat.add_object(ob.clone());
            }
        }
        for (m, h) in &self.morphisms {
            if objects.contains(&h.src) && objects.contains(&h.tgt) {
                cat.morphisms.insert(m.clone(), h.clone());
            }
        }
        for (ob, id) in &self.identity {
            if objects.contains(ob) {
                cat.identity.insert(ob.clone(), id.clone());
            }
        }
        for ((f, g), h) in &self.then_table {
            if cat.morphisms.contains_key(f) && cat.morphisms.contains_key(g) {
                cat.then_table.insert((f.clone(), g.clone()), h.clone());
            }
        }
        cat
    }

    /// The product category, with `(a,b)`-style identifiers.
    pub fn product(&self, other: &FinCategory) -> FinCategory {
        let mut cat = FinCategory::new();
        for a in &self.objects {
            for b in &other.objects {
                cat.add_object(paired(a.as_str(), b.as_str()));
            }
        }
        for (f, hf) in &self.morphisms {
            for (g, hg) in &other.morphisms {
                cat.add_morphism(
                    paired(f.as_str(), g.as_str()),
                    paired(hf.src.as_str(), hg.src.as_str()),
                    paired(hf.tgt.as_str(), hg.tgt.as_str()),
                );
            }
        }
        for (a, ida) in &self.identity {
            for (b, idb) in &other.identity {
                cat.set_identity(
                    paired(a.as_str(), b.as_str()),
                    paired(ida.as_str(), idb.as_str()),
                );
            }
        }
        for ((f1, g1), h1) in &self.then_table {
            for ((f2, g2), h2) in &other.then_table {
                cat.set_then(
                    paired(f1.as_str(), f2.as_str()),
                    paired(g1.as_str(), g2.as_str()),
                    paired(h1.as_str(), h2.as_str()),
                );
            }
        }
        cat
    }

    /// Rename every identifier by prefixing it with `prefix`.
    pub fn prefixed(&self, prefix: &str) -> FinCategory {
        let ob = |o: &ObId| ObId(format!("{prefix}{o}"));
        let mor = |m: &MorId| MorId(format!("{prefix}{m}"));
        let mut cat = FinCategory::new();
        for o in &self.objects {
            cat.objects.insert(ob(o));
        }
        for (m, h) in &self.morphisms {
            cat.morphisms.insert(mor(m), Hom { src: ob(&h.src), tgt: ob(&h.tgt) });
        }
        for (o, m) in &self.identity {
            cat.identity.insert(ob(o), mor(m));
        }
        for ((f, g), h) in &self.then_table {
            cat.then_table.insert((mor(f), mor(g)), mor(h));
        }
        cat
    }

    /// All violations of the category axioms, in a deterministic order.
    pub fn validate(&self) -> Result<(), Vec<InvalidCategory>> {
        let mut errs = Vec::new();
        for (m, h) in &self.morphisms {
            for ob in [&h.src, &h.tgt] {
                if !self.objects.contains(ob) {
                    errs.push(InvalidCategory::MissingEndpointObject {
                        mor: m.clone(),
                        ob: ob.clone(),
                    });
                }
            }
        }
        for ob in &self.objects {
            match self.identity.get(ob) {
                None => errs.push(InvalidCategory::MissingIdentity { ob: ob.clone() }),
                Some(id) => match self.morphisms.get(id) {
                    None => errs.push(InvalidCategory::UnknownIdentity {
                        ob: ob.clone(),
                        mor: id.clone(),
                    }),
                    Some(h) => {
                        if &h.src != ob || &h.tgt != ob {
                            errs.push(InvalidCategory::IdentityNotEndo {
                                ob: ob.clone(),
                                mor: id.clone(),
                            });
                        }
                    }
                },
            }
        }
        for ((f, g), h) in &self.then_table {
            for m in [f, g, h] {
                if !self.morphisms.contains_key(m) {
                    errs.push(InvalidCategory::UnknownMorphism { mor: m.clone() });
                }
            }
        }
        // From here on, consult only well-formed entries.
        let defined = |f: &MorId, g: &MorId| self.then(f, g);
        for (f, hf) in &self.morphisms {
            for (g, hg) in &self.morphisms {
                let composable = hf.tgt == hg.src;
                match (composable, defined(f, g)) {
                    (true, None) => errs.push(InvalidCategory::MissingComposite {
                        first: f.clone(),
                        second: g.clone(),
                    }),
                    (false, Some(_)) => errs.push(InvalidCategory::SpuriousComposite {
                        first: f.clone(),
                        second: g.clone(),
                    }),
                    (true, Some(h)) => {
                        let ok = self.morphisms.get(h).is_some_and(|hh| {
                            hh.src == hf.src && hh.tgt == hg.tgt
                        });
                        if !ok {
                            errs.push(InvalidCategory::CompositeBoundary {
                                first: f.clone(),
                                second: g.clone(),
                                composite: h.clone(),
                            });
                        }
                    }
                    (false, None) => {}
                }
            }
        }
        for (f, hf) in &self.morphisms {
            let lid = self.identity.get(&hf.src);
            let rid = self.identity.get(&hf.tgt);
            let left_ok = lid.is_none_or(|l| defined(l, f) == Some(f));
            let right_ok = rid.is_none_or(|r| defined(f, r) == Some(f));
            if !(left_ok && right_ok) {
                errs.push(InvalidCategory::UnitLaw { mor: f.clone() });
            }
        }
        for (f, hf) in &self.morphisms {
            for (g, hg) in &self.morphisms {
                if hf.tgt != hg.src {
                    continue;
                }
                for (k, hk) in &self.morphisms {
                    if hg.tgt != hk.src {
                        continue;
                    }
                    let left = defined(f, g).and_then(|fg| defined(fg, k));
                    let right = defined(g, k).and_then(|gk| defined(f, gk));
                    if left.is_some() && right.is_some() && left != right {
                        errs.push(InvalidCategory::Associativity {
                            first: f.clone(),
                            second: g.clone(),
                            third: k.clone(),
                        });
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

/// A way a [`FinFunctor`] can fail to be a functor.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InvalidFunctor {
    #[error("object {ob} has no image")]
    MissingObjectImage { ob: ObId },
    #[error("morphism {mor} has no image")]
    MissingMorphismImage { mor: MorId },
    #[error("image of object {ob} is not an object of the target")]
    ObjectImageUnknown { ob: ObId },
    #[error("image of morphism {mor} is not a morphism of the target")]
    MorphismImageUnknown { mor: MorId },
    #[error("image of {mor} has wrong endpoints")]
    EndpointMismatch { mor: MorId },
    #[error("identity of {ob} is not sent to an identity")]
    IdentityNotPreserved { ob: ObId },
    #[error("composite of {first} then {second} is not preserved")]
    CompositionNotPreserved { first: MorId, second: MorId },
}

/// A functor between finite categories, stored with its endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinFunctor {
    source: FinCategory,
    target: FinCategory,
    ob_map: BTreeMap<ObId, ObId>,
    mor_map: BTreeMap<MorId, MorId>,
}

impl FinFunctor {
    pub fn new(
        source: FinCategory,
        target: FinCategory,
        ob_map: BTreeMap<ObId, ObId>,
        mor_map: BTreeMap<MorId, MorId>,
    ) -> Self {
        FinFunctor { source, target, ob_map, mor_map }
    }

    pub fn identity(cat: &FinCategory) -> Self {
        let ob_map = cat.objects().map(|o| (o.clone(), o.clone())).collect();
        let mor_map = cat.mor_ids().map(|m| (m.clone(), m.clone())).collect();
        FinFunctor::new(cat.clone(), cat.clone(), ob_map, mor_map)
    }

    pub fn source(&self) -> &FinCategory {
        &self.source
    }

    pub fn target(&self) -> &FinCategory {
        &self.target
    }

    pub fn ob_map(&self) -> &BTreeMap<ObId, ObId> {
        &self.ob_map
    }

    pub fn mor_map(&self) -> &BTreeMap<MorId, MorId> {
        &self.mor_map
    }

    pub fn apply_ob(&self, ob: &ObId) -> Option<&ObId> {
        self.ob_map.get(ob)
    }

    pub fn apply_mor(&self, mor: &MorId) -> Option<&MorId> {
        self.mor_map.get(mor)
    }

    /// Compose with `next`: first `self`, then `next`.
    pub fn then(&self, next: &FinFunctor) -> FinFunctor {
        let ob_map = self
            .ob_map
            .iter()
            .filter_map(|(a, b)| next.ob_map.get(b).map(|c| (a.clone(), c.clone())))
            .collect();
        let mor_map = self
            .mor_map
            .iter()
            .filter_map(|(f, g)| next.mor_map.get(g).map(|h| (f.clone(), h.clone())))
            .collect();
        FinFunctor::new(self.source.clone(), next.target.clone(), ob_map, mor_map)
    }

    pub fn validate(&self) -> Result<(), Vec<InvalidFunctor>> {
        let mut errs = Vec::new();
        for ob in self.source.objects() {
            match self.ob_map.get(ob) {
                None => errs.push(InvalidFunctor::MissingObjectImage { ob: ob.clone() }),
                Some(img) => {
                    if !self.target.has_object(img) {
                        errs.push(InvalidFunctor::ObjectImageUnknown { ob: ob.clone() });
                    }
                }
            }
        }
        for (m, h) in self.source.morphisms() {
            match self.mor_map.get(m) {
                None => errs.push(InvalidFunctor::MissingMorphismImage { mor: m.clone() }),
                Some(img) => match self.target.hom_data(img) {
                    None => errs.push(InvalidFunctor::MorphismImageUnknown { mor: m.clone() }),
                    Some(hi) => {
                        let src_ok = self.ob_map.get(&h.src) == Some(&hi.src);
                        let tgt_ok = self.ob_map.get(&h.tgt) == Some(&hi.tgt);
                        if !(src_ok && tgt_ok) {
                            errs.push(InvalidFunctor::EndpointMismatch { mor: m.clone() });
                        }
                    }
                },
            }
        }
        for ob in self.source.objects() {
            let ok = match (self.source.id_of(ob), self.ob_map.get(ob)) {
                (Some(id), Some(img)) => {
                    self.mor_map.get(id) == self.target.id_of(img)
                }
                _ => true,
            };
            if !ok {
                errs.push(InvalidFunctor::IdentityNotPreserved { ob: ob.clone() });
            }
        }
        for (f, g) in self.source.composable_pairs() {
            let Some(fg) = self.source.then(&f, &g) else { continue };
            let lhs = self.mor_map.get(fg);
            let rhs = match (self.mor_map.get(&f), self.mor_map.get(&g)) {
                (Some(ff), Some(gg)) => self.target.then(ff, gg),
                _ => continue,
            };
            if lhs.is_some() && rhs.is_some() && lhs != rhs {
                errs.push(InvalidFunctor::CompositionNotPreserved { first: f, second: g });
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    pub fn is_surjective_on_objects(&self) -> bool {
        let image: BTreeSet<&ObId> = self.ob_map.values().collect();
        self.target.objects().all(|ob| image.contains(ob))
    }

    pub fn is_surjective_on_morphisms(&self) -> bool {
        let image: BTreeSet<&MorId> = self.mor_map.values().collect();
        self.target.mor_ids().all(|m| image.contains(m))
    }

    pub fn is_faithful(&self) -> bool {
        for a in self.source.objects() {
            for b in self.source.objects() {
                let hom = self.source.hom_set(a, b);
                let images: BTreeSet<&MorId> =
                    hom.iter().filter_map(|m| self.mor_map.get(m)).collect();
                if images.len() != hom.len() {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_full(&self) -> bool {
        for a in self.source.objects() {
            for b in self.source.objects() {
                let (Some(fa), Some(fb)) = (self.ob_map.get(a), self.ob_map.get(b)) else {
                    return false;
                };
                let image: BTreeSet<&MorId> = self
                    .source
                    .hom_set(a, b)
                    .into_iter()
                    .filter_map(|m| self.mor_map.get(m))
                    .collect();
                if self.target.hom_set(fa, fb).iter().any(|m| !image.contains(*m)) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_fully_faithful(&self) -> bool {
        self.is_full() && self.is_faithful()
    }

    pub fn is_essentially_surjective(&self) -> bool {
        self.target.objects().all(|t| {
            self.ob_map
                .values()
                .any(|img| self.target.isomorphic_objects(img, t))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordinal_is_a_category() {
        for n in 0..4 {
            let cat = FinCategory::ordinal(n);
            assert_eq!(cat.validate(), Ok(()));
            assert_eq!(cat.object_count(), n + 1);
            assert_eq!(cat.morphism_count(), (n + 1) * (n + 2) / 2);
        }
    }

    #[test]
    fn walking_iso_is_a_category_with_inverses() {
        let cat = FinCategory::walking_iso();
        assert_eq!(cat.validate(), Ok(()));
        assert!(cat.is_iso(&"0~>1".into()));
        assert_eq!(cat.inverse(&"0~>1".into()), Some("1~>0".into()));
        assert!(cat.isomorphic_objects(&"0".into(), &"1".into()));
    }

    #[test]
    fn ordinal_has_no_nonidentity_isos() {
        let cat = FinCategory::ordinal(2);
        assert!(!cat.is_iso(&"0<=1".into()));
        assert!(cat.is_iso(&"1<=1".into()));
        assert!(!cat.isomorphic_objects(&"0".into(), &"2".into()));
    }

    #[test]
    fn product_of_ordinals_validates() {
        let a = FinCategory::ordinal(1);
        let p = a.product(&a);
        assert_eq!(p.validate(), Ok(()));
        assert_eq!(p.object_count(), 4);
        assert_eq!(p.morphism_count(), 9);
        let diag = p.then(&"(0<=0,0<=1)".into(), &"(0<=1,1<=1)".into());
        assert_eq!(diag, Some(&"(0<=1,0<=1)".into()));
    }

    #[test]
    fn validate_reports_missing_composite() {
        let mut cat = FinCategory::ordinal(2);
        cat.set_identity("0", "0<=0");
        let key = ("0<=1".into(), "1<=2".into());
        let removed = cat.then_table.remove(&key);
        assert!(removed.is_some());
        let errs = cat.validate().unwrap_err();
        assert!(errs.contains(&InvalidCategory::MissingComposite {
            first: "0<=1".into(),
            second: "1<=2".into(),
        }));
    }

    #[test]
    fn validate_reports_bad_identity() {
        let mut cat = FinCategory::discrete(["a", "b"]);
        cat.set_identity("a", "id_b");
        let errs = cat.validate().unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, InvalidCategory::IdentityNotEndo { .. })));
    }

    #[test]
    fn full_subcategory_of_ordinal() {
        let cat = FinCategory::ordinal(2);
        let objs: BTreeSet<ObId> = ["0".into(), "2".into()].into();
        let sub = cat.full_subcategory(&objs);
        assert_eq!(sub.validate(), Ok(()));
        assert_eq!(sub.object_count(), 2);
        assert_eq!(sub.morphism_count(), 3);
    }

    #[test]
    fn functor_validation_and_properties() {
        let one = FinCategory::ordinal(1);
        let two = FinCategory::ordinal(2);
        let ob_map: BTreeMap<ObId, ObId> =
            [("0".into(), "0".into()), ("1".into(), "2".into())].into();
        let mor_map: BTreeMap<MorId, MorId> = [
            ("0<=0".into(), "0<=0".into()),
            ("1<=1".into(), "2<=2".into()),
            ("0<=1".into(), "0<=2".into()),
        ]
        .into();
        let f = FinFunctor::new(one.clone(), two.clone(), ob_map, mor_map);
        assert_eq!(f.validate(), Ok(()));
        assert!(f.is_fully_faithful());
        assert!(!f.is_surjective_on_objects());
        assert!(!f.is_essentially_surjective());
        let idt = FinFunctor::identity(&two);
        let g = f.then(&idt);
        assert_eq!(g.validate(), Ok(()));
        assert_eq!(g.apply_ob(&"1".into()), Some(&"2".into()));
    }

    #[test]
    fn then_path_composes_left_to_right() {
        let cat = FinCategory::ordinal(3);
        let path: Vec<MorId> = vec!["0<=1".into(), "1<=2".into(), "2<=3".into()];
        assert_eq!(cat.then_path(&path), Some("0<=3".into()));
    }
}
