/*! Simplices, horns, boundaries, and their double-subdivision posets.

A [`SimplexLikeComplex`] is a downward-closed family of nonempty subsets of
`{0..m}`: the full simplex, a horn (drop the top face and one facet), or a
boundary (drop the top face). [`csd2`] sends a complex to the category of
its double barycentric subdivision: objects are the strictly increasing
chains of faces, with a unique morphism from each chain to each chain
extending it. One subdivision turns faces into chains; taking the poset of
nondegenerate simplices absorbs the other.

[`generating_map`] packages the cofibration generators of the transferred
model structures as double functors `i ⊠ [n]`, with `i` ranging over the
subdivision inclusions, the walking-isomorphism endpoint inclusion, and the
three classical category-level generators.
*/

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::core::ops::{external_product_functor, inclusion_functor};
use crate::core::{FinCategory, FinFunctor, DoubleFunctor, MorId, ObId};

/// Which complex a [`SimplexLikeComplex`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ComplexTag {
    /// The full simplex on `{0..m}`.
    Delta { m: usize },
    /// The simplex minus its top face and the facet opposite vertex `k`.
    Horn { m: usize, k: usize },
    /// The simplex minus its top face.
    Boundary { m: usize },
}

/// A problem with simplex indices or generator selection.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ThomasonError {
    #[error("horn index {k} exceeds simplex dimension {m}")]
    HornIndex { m: usize, k: usize },
    #[error("dimension {m} not supported; vertices are written as single digits")]
    Dimension { m: usize },
    #[error("no generating cofibration with index {idx}; the family has three members")]
    CofIndex { idx: usize },
}

/// A downward-closed set of faces over vertices `{0..m}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexLikeComplex {
    tag: ComplexTag,
    faces: BTreeSet<BTreeSet<usize>>,
}

fn nonempty_subsets(m: usize) -> impl Iterator<Item = BTreeSet<usize>> {
    (1u32..(1u32 << (m + 1))).map(move |mask| {
        (0..=m).filter(|i| mask & (1 << i) != 0).collect()
    })
}

impl SimplexLikeComplex {
    /// The full simplex on `m + 1` vertices.
    pub fn delta(m: usize) -> Result<Self, ThomasonError> {
        if m > 9 {
            return Err(ThomasonError::Dimension { m });
        }
        Ok(SimplexLikeComplex {
            tag: ComplexTag::Delta { m },
            faces: nonempty_subsets(m).collect(),
        })
    }

    /// The horn: every face except the top one and the facet opposite `k`.
    pub fn horn(m: usize, k: usize) -> Result<Self, ThomasonError> {
        if m > 9 {
            return Err(ThomasonError::Dimension { m });
        }
        if k > m {
            return Err(ThomasonError::HornIndex { m, k });
        }
        let top: BTreeSet<usize> = (0..=m).collect();
        let facet: BTreeSet<usize> = (0..=m).filter(|&i| i != k).collect();
        Ok(SimplexLikeComplex {
            tag: ComplexTag::Horn { m, k },
            faces: nonempty_subsets(m).filter(|s| *s != top && *s != facet).collect(),
        })
    }

    /// The boundary: every face except the top one.
    pub fn boundary(m: usize) -> Result<Self, ThomasonError> {
        if m > 9 {
            return Err(ThomasonError::Dimension { m });
        }
        let top: BTreeSet<usize> = (0..=m).collect();
        Ok(SimplexLikeComplex {
            tag: ComplexTag::Boundary { m },
            faces: nonempty_subsets(m).filter(|s| *s != top).collect(),
        })
    }

    pub fn tag(&self) -> ComplexTag {
        self.tag
    }

    pub fn faces(&self) -> &BTreeSet<BTreeSet<usize>> {
        &self.faces
    }

    /// Every nonempty subset of a face is again a face.
    pub fn is_downward_closed(&self) -> bool {
        self.faces.iter().all(|face| {
            face.iter().all(|&v| {
                let mut smaller = face.clone();
                smaller.remove(&v);
                smaller.is_empty() || self.faces.contains(&smaller)
            })
        })
    }
}

fn face_name(face: &BTreeSet<usize>) -> String {
    face.iter().map(|v| v.to_string()).collect()
}

fn chain_name(chain: &[BTreeSet<usize>]) -> String {
    chain.iter().map(face_name).collect::<Vec<_>>().join("<")
}

/// The strictly increasing chains of faces of a complex, ordered by
/// subchain. Chains are kept sorted by (length, lexicographic faces) so
/// identifiers come out the same on every run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainPoset {
    chains: Vec<Vec<BTreeSet<usize>>>,
}

impl ChainPoset {
    pub fn of_complex(x: &SimplexLikeComplex) -> Self {
        let faces: Vec<&BTreeSet<usize>> = x.faces().iter().collect();
        let mut chains = Vec::new();
        let mut current: Vec<BTreeSet<usize>> = Vec::new();
        for face in &faces {
            current.push((*face).clone());
            grow(&faces, &mut current, &mut chains);
            current.pop();
        }
        chains.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        ChainPoset { chains }
    }

    pub fn chains(&self) -> &[Vec<BTreeSet<usize>>] {
        &self.chains
    }

    /// Subchain order: every face of `a` occurs in `b`.
    pub fn le(a: &[BTreeSet<usize>], b: &[BTreeSet<usize>]) -> bool {
        a.iter().all(|f| b.contains(f))
    }

    /// The poset as a category: one morphism `a<=b` per subchain pair.
    pub fn as_category(&self) -> FinCategory {
        let names: Vec<String> = self.chains.iter().map(|c| chain_name(c)).collect();
        let n = self.chains.len();
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = Self::le(&self.chains[i], &self.chains[j]);
            }
        }
        let mut cat = FinCategory::new();
        for name in &names {
            cat.add_object(name.clone());
        }
        let mor = |i: usize, j: usize| format!("{}<={}", names[i], names[j]);
        for (i, row) in le.iter().enumerate() {
            for (j, reach) in row.iter().enumerate() {
                if *reach {
                    cat.add_morphism(mor(i, j), names[i].clone(), names[j].clone());
                }
            }
        }
        for (i, name) in names.iter().enumerate() {
            cat.set_identity(name.clone(), mor(i, i));
        }
        for (i, row) in le.iter().enumerate() {
            for (j, reach) in row.iter().enumerate() {
                if !reach {
                    continue;
                }
                for (k, further) in le[j].iter().enumerate() {
                    if *further {
                        cat.set_then(mor(i, j), mor(j, k), mor(i, k));
                    }
                }
            }
        }
        cat
    }
}

fn grow(
    faces: &[&BTreeSet<usize>],
    current: &mut Vec<BTreeSet<usize>>,
    out: &mut Vec<Vec<BTreeSet<usize>>>,
) {
    out.push(current.clone());
    let last = current.last().expect("chains are grown from a first face").clone();
    for face in faces {
        if last.len() < face.len() && last.is_subset(face) {
            current.push((*face).clone());
            grow(faces, current, out);
            current.pop();
        }
    }
}

/// The double-subdivision poset of a complex, as a category.
pub fn csd2(x: &SimplexLikeComplex) -> FinCategory {
    ChainPoset::of_complex(x).as_category()
}

/// Two objects, identities, and two parallel arrows `f, g: 0 -> 1`.
pub fn parallel_pair() -> FinCategory {
    let mut cat = FinCategory::new();
    for ob in ["0", "1"] {
        cat.add_object(ob);
        cat.add_morphism(format!("id{ob}"), ob, ob);
        cat.set_identity(ob, format!("id{ob}"));
    }
    cat.add_morphism("f", "0", "1");
    cat.add_morphism("g", "0", "1");
    cat.close_identities();
    cat
}

/// A family of generating (acyclic) cofibrations, before the `⊠ [n]` step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GeneratingFamily {
    /// Boundary subdivision into simplex subdivision.
    ThomasonCof { m: usize },
    /// Horn subdivision into simplex subdivision.
    ThomasonAcof { m: usize, k: usize },
    /// The classical category-level cofibration generators: empty into
    /// point, two points into the arrow, parallel pair onto the arrow.
    CatCof { idx: usize },
    /// The endpoint `{1}` into the walking isomorphism.
    CatAcof,
}

/// The generator `i ⊠ [n]`, with the family map placed vertically.
pub fn generating_map(family: &GeneratingFamily, n: usize) -> Result<DoubleFunctor, ThomasonError> {
    let incl: FinFunctor = match family {
        GeneratingFamily::ThomasonCof { m } => {
            let sub = csd2(&SimplexLikeComplex::boundary(*m)?);
            let sup = csd2(&SimplexLikeComplex::delta(*m)?);
            inclusion_functor(&sub, &sup)
        }
        GeneratingFamily::ThomasonAcof { m, k } => {
            let sub = csd2(&SimplexLikeComplex::horn(*m, *k)?);
            let sup = csd2(&SimplexLikeComplex::delta(*m)?);
            inclusion_functor(&sub, &sup)
        }
        GeneratingFamily::CatCof { idx } => match idx {
            0 => FinFunctor::new(
                FinCategory::new(),
                FinCategory::discrete(["0"]),
                BTreeMap::new(),
                BTreeMap::new(),
            ),
            1 => {
                let src = FinCategory::discrete(["0", "1"]);
                let ob_map: BTreeMap<ObId, ObId> =
                    [("0", "0"), ("1", "1")].map(|(a, b)| (a.into(), b.into())).into();
                let mor_map: BTreeMap<MorId, MorId> =
                    [("id_0", "0<=0"), ("id_1", "1<=1")].map(|(a, b)| (a.into(), b.into())).into();
                FinFunctor::new(src, FinCategory::ordinal(1), ob_map, mor_map)
            }
            2 => {
                let src = parallel_pair();
                let ob_map: BTreeMap<ObId, ObId> =
                    [("0", "0"), ("1", "1")].map(|(a, b)| (a.into(), b.into())).into();
                let mor_map: BTreeMap<MorId, MorId> = [
                    ("id0", "0<=0"),
                    ("id1", "1<=1"),
                    ("f", "0<=1"),
                    ("g", "0<=1"),
                ]
                .map(|(a, b)| (a.into(), b.into()))
                .into();
                FinFunctor::new(src, FinCategory::ordinal(1), ob_map, mor_map)
            }
            _ => return Err(ThomasonError::CofIndex { idx: *idx }),
        },
        GeneratingFamily::CatAcof => {
            let src = FinCategory::discrete(["1"]);
            let ob_map: BTreeMap<ObId, ObId> = [(ObId::from("1"), ObId::from("1"))].into();
            let mor_map: BTreeMap<MorId, MorId> =
                [(MorId::from("id_1"), MorId::from("id1"))].into();
            FinFunctor::new(src, FinCategory::walking_iso(), ob_map, mor_map)
        }
    };
    let interval = FinCategory::ordinal(n);
    Ok(external_product_functor(&incl, &FinFunctor::identity(&interval)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(cat: &FinCategory) -> (usize, usize, usize, usize) {
        let nonidentity = cat.mor_ids().filter(|m| !cat.is_identity(m)).count();
        (
            cat.object_count(),
            cat.morphism_count(),
            nonidentity,
            cat.composable_pairs().len(),
        )
    }

    #[test]
    fn delta_subdivision_counts() {
        let expected = [(1, 1, 0, 1), (5, 9, 4, 13), (25, 85, 60, 181), (149, 945, 796, 2965)];
        for (m, want) in expected.into_iter().enumerate() {
            let cat = csd2(&SimplexLikeComplex::delta(m).unwrap());
            assert_eq!(cat.validate(), Ok(()), "delta({m})");
            assert_eq!(counts(&cat), want, "delta({m})");
        }
    }

    #[test]
    fn boundary_subdivision_counts() {
        let expected = [(1, (2, 2, 0, 2)), (2, (12, 24, 12, 36)), (3, (74, 290, 216, 650))];
        for (m, want) in expected {
            let cat = csd2(&SimplexLikeComplex::boundary(m).unwrap());
            assert_eq!(cat.validate(), Ok(()), "boundary({m})");
            assert_eq!(counts(&cat), want, "boundary({m})");
        }
    }

    #[test]
    fn horn_subdivision_counts() {
        for k in 0..=1 {
            let cat = csd2(&SimplexLikeComplex::horn(1, k).unwrap());
            assert_eq!(counts(&cat), (1, 1, 0, 1), "horn(1,{k})");
        }
        for k in 0..=2 {
            let cat = csd2(&SimplexLikeComplex::horn(2, k).unwrap());
            assert_eq!(cat.validate(), Ok(()), "horn(2,{k})");
            assert_eq!(counts(&cat), (9, 17, 8, 25), "horn(2,{k})");
        }
        let cat = csd2(&SimplexLikeComplex::horn(3, 1).unwrap());
        assert_eq!(counts(&cat), (61, 229, 168, 505));
    }

    #[test]
    fn delta1_subdivision_shape() {
        let cat = csd2(&SimplexLikeComplex::delta(1).unwrap());
        let objects: Vec<&str> = cat.objects().map(|o| o.as_str()).collect();
        assert_eq!(objects, ["0", "01", "0<01", "1", "1<01"]);
        // The four strict inclusions are all covering relations.
        let strict: Vec<&MorId> = cat.mor_ids().filter(|m| !cat.is_identity(m)).collect();
        assert_eq!(strict.len(), 4);
        for m in &strict {
            let (s, t) = (cat.src(m).unwrap(), cat.tgt(m).unwrap());
            let between = cat.objects().any(|x| {
                x != s
                    && x != t
                    && !cat.hom_set(s, x).is_empty()
                    && !cat.hom_set(x, t).is_empty()
            });
            assert!(!between, "{m} should be a cover");
        }
    }

    #[test]
    fn subdivisions_are_posets() {
        let samples = [
            csd2(&SimplexLikeComplex::delta(2).unwrap()),
            csd2(&SimplexLikeComplex::horn(2, 1).unwrap()),
            csd2(&SimplexLikeComplex::boundary(2).unwrap()),
        ];
        for cat in &samples {
            for a in cat.objects() {
                for b in cat.objects() {
                    assert!(cat.hom_set(a, b).len() <= 1);
                }
            }
        }
    }

    #[test]
    fn chains_locked_out_of_the_horn_stay_out() {
        for m in 1..=2 {
            for k in 0..=m {
                let horn = SimplexLikeComplex::horn(m, k).unwrap();
                let poset = ChainPoset::of_complex(&SimplexLikeComplex::delta(m).unwrap());
                let in_horn = |c: &[BTreeSet<usize>]| c.iter().all(|f| horn.faces().contains(f));
                for a in poset.chains() {
                    for b in poset.chains() {
                        if ChainPoset::le(a, b) && !in_horn(a) {
                            assert!(!in_horn(b), "horn({m},{k})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn complexes_are_downward_closed() {
        assert!(SimplexLikeComplex::delta(3).unwrap().is_downward_closed());
        assert!(SimplexLikeComplex::horn(3, 1).unwrap().is_downward_closed());
        assert!(SimplexLikeComplex::boundary(3).unwrap().is_downward_closed());
    }

    #[test]
    fn degenerate_subdivisions_are_terminal() {
        let point = csd2(&SimplexLikeComplex::horn(1, 0).unwrap());
        assert_eq!((point.object_count(), point.morphism_count()), (1, 1));
        let vertex = csd2(&SimplexLikeComplex::delta(0).unwrap());
        assert_eq!((vertex.object_count(), vertex.morphism_count()), (1, 1));
    }

    #[test]
    fn bad_indices_are_rejected() {
        assert_eq!(
            SimplexLikeComplex::horn(1, 2).unwrap_err(),
            ThomasonError::HornIndex { m: 1, k: 2 }
        );
        assert_eq!(
            SimplexLikeComplex::delta(10).unwrap_err(),
            ThomasonError::Dimension { m: 10 }
        );
        assert_eq!(
            generating_map(&GeneratingFamily::CatCof { idx: 3 }, 0).unwrap_err(),
            ThomasonError::CofIndex { idx: 3 }
        );
    }

    #[test]
    fn endpoint_generator_embeds_point_into_iso() {
        let g = generating_map(&GeneratingFamily::CatAcof, 0).unwrap();
        assert_eq!(g.validate(), Ok(()));
        assert_eq!(g.source().hor_cat().object_count(), 1);
        assert_eq!(g.target().hor_cat().object_count(), 2);
        let doubled = generating_map(&GeneratingFamily::CatAcof, 1).unwrap();
        assert_eq!(doubled.validate(), Ok(()));
        assert_eq!(doubled.source().hor_cat().object_count(), 2);
        assert_eq!(doubled.target().hor_cat().object_count(), 4);
    }

    #[test]
    fn horn_generator_point_into_subdivided_interval() {
        let g = generating_map(&GeneratingFamily::ThomasonAcof { m: 1, k: 0 }, 0).unwrap();
        assert_eq!(g.validate(), Ok(()));
        assert_eq!(g.source().hor_cat().object_count(), 1);
        assert_eq!(g.target().hor_cat().object_count(), 5);
        let wider = generating_map(&GeneratingFamily::ThomasonAcof { m: 1, k: 0 }, 1).unwrap();
        assert_eq!(wider.validate(), Ok(()));
        assert_eq!(wider.source().hor_cat().object_count(), 2);
        assert_eq!(wider.target().hor_cat().object_count(), 10);
    }

    #[test]
    fn boundary_generator_validates() {
        let g = generating_map(&GeneratingFamily::ThomasonCof { m: 1 }, 0).unwrap();
        assert_eq!(g.validate(), Ok(()));
        assert_eq!(g.source().hor_cat().object_count(), 2);
        assert_eq!(g.target().hor_cat().object_count(), 5);
    }

    #[test]
    fn category_level_generators_validate() {
        for idx in 0..=2 {
            for n in 0..=1 {
                let g = generating_map(&GeneratingFamily::CatCof { idx }, n).unwrap();
                assert_eq!(g.validate(), Ok(()), "cat_cof({idx}) x [{n}]");
            }
        }
    }

    #[test]
    fn inclusion_shaped_generators_are_full() {
        let pairs = [
            (
                csd2(&SimplexLikeComplex::horn(2, 0).unwrap()),
                csd2(&SimplexLikeComplex::delta(2).unwrap()),
            ),
            (
                csd2(&SimplexLikeComplex::boundary(2).unwrap()),
                csd2(&SimplexLikeComplex::delta(2).unwrap()),
            ),
            (FinCategory::discrete(["1"]), FinCategory::walking_iso()),
        ];
        for (sub, sup) in &pairs[..2] {
            assert!(inclusion_functor(sub, sup).is_fully_faithful());
        }
        let (sub, sup) = &pairs[2];
        let ob_map = [(ObId::from("1"), ObId::from("1"))].into();
        let mor_map = [(MorId::from("id_1"), MorId::from("id1"))].into();
        let f = FinFunctor::new(sub.clone(), sup.clone(), ob_map, mor_map);
        assert_eq!(f.validate(), Ok(()));
        assert!(f.is_fully_faithful());
    }
}
