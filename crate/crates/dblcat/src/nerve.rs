/*! Nerves of categories and double categories.

The classical nerve of a category lists composable strings of morphisms.
The horizontal nerve of a double category does the same with horizontal
morphisms, except each level is a *category*: its objects are strings of
horizontal morphisms and its morphisms are rows of squares over them,
composed by stacking. The double nerve records composable rectangular
arrays of squares, graded by rows and columns, and the diagonal nerve reads
off its diagonal.

Only truncations are materialized. Levels are ordinary [`FinCategory`]
values (set-valued levels are discrete categories) and every face and
degeneracy between represented levels is stored as a [`FinFunctor`], so the
simplicial identities are checkable by composing tables.
*/

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;

use thiserror::Error;

use crate::core::category::{FinCategory, FinFunctor};
use crate::core::double::DoubleCategory;
use crate::core::functor::DoubleFunctor;
use crate::core::ids::{MorId, ObId, SqId};
use crate::core::ops::transpose;

/// A simplicial object in categories, materialized up to a level bound.
///
/// `faces[(k, i)]` is the `i`-th face from level `k` to level `k - 1`,
/// `degeneracies[(k, i)]` the `i`-th degeneracy from level `k` to `k + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialTruncation {
    pub max_level: usize,
    pub levels: Vec<FinCategory>,
    pub faces: BTreeMap<(usize, usize), FinFunctor>,
    pub degeneracies: BTreeMap<(usize, usize), FinFunctor>,
}

/// A bisimplicial set, materialized up to a bidegree bound. Levels are
/// discrete categories; `(p, q)` holds the composable `p`-row, `q`-column
/// arrays. Row operators act on the vertical grading, column operators on
/// the horizontal one.
#[derive(Clone, Debug, PartialEq)]
pub struct BisimplicialTruncation {
    pub max_rows: usize,
    pub max_cols: usize,
    pub levels: BTreeMap<(usize, usize), FinCategory>,
    pub row_faces: BTreeMap<(usize, usize, usize), FinFunctor>,
    pub col_faces: BTreeMap<(usize, usize, usize), FinFunctor>,
    pub row_degeneracies: BTreeMap<(usize, usize, usize), FinFunctor>,
    pub col_degeneracies: BTreeMap<(usize, usize, usize), FinFunctor>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NerveError {
    #[error("missing truncation data: {detail}")]
    Missing { detail: String },
    #[error("level {level} is not a valid category: {detail}")]
    Level { level: String, detail: String },
    #[error("operator {name} is not a functor between its levels: {detail}")]
    Operator { name: String, detail: String },
    #[error("simplicial identity fails: {detail}")]
    Identity { detail: String },
    #[error("reconstruction failed: {detail}")]
    Reconstruction { detail: String },
}

fn join<E: Display>(errs: &[E]) -> String {
    errs.iter().map(E::to_string).collect::<Vec<_>>().join("; ")
}

impl SimplicialTruncation {
    pub fn level(&self, k: usize) -> Option<&FinCategory> {
        self.levels.get(k)
    }

    pub fn face(&self, k: usize, i: usize) -> Option<&FinFunctor> {
        self.faces.get(&(k, i))
    }

    pub fn degeneracy(&self, k: usize, i: usize) -> Option<&FinFunctor> {
        self.degeneracies.get(&(k, i))
    }

    /// Check levels, operator endpoints, and every simplicial identity
    /// whose composites stay within the represented levels.
    pub fn validate(&self) -> Result<(), Vec<NerveError>> {
        let mut errs = Vec::new();
        if self.levels.len() != self.max_level + 1 {
            errs.push(NerveError::Missing {
                detail: format!(
                    "{} levels stored for max level {}",
                    self.levels.len(),
                    self.max_level
                ),
            });
            return Err(errs);
        }
        for (k, cat) in self.levels.iter().enumerate() {
            if let Err(es) = cat.validate() {
                errs.push(NerveError::Level { level: k.to_string(), detail: join(&es) });
            }
        }
        for k in 1..=self.max_level {
            for i in 0..=k {
                check_operator(
                    self.face(k, i),
                    &self.levels[k],
                    &self.levels[k - 1],
                    &format!("d_{i} at level {k}"),
                    &mut errs,
                );
            }
        }
        for k in 0..self.max_level {
            for i in 0..=k {
                check_operator(
                    self.degeneracy(k, i),
                    &self.levels[k],
                    &self.levels[k + 1],
                    &format!("s_{i} at level {k}"),
                    &mut errs,
                );
            }
        }
        if !errs.is_empty() {
            return Err(errs);
        }
        check_simplicial(
            self.max_level,
            &|k, i| self.face(k, i),
            &|k, i| self.degeneracy(k, i),
            &|k| self.levels.get(k),
            "",
            &mut errs,
        );
        if errs.is_empty() { Ok(()) } else { Err(errs) }
    }
}

pub(crate) fn check_operator(
    f: Option<&FinFunctor>,
    src: &FinCategory,
    tgt: &FinCategory,
    name: &str,
    errs: &mut Vec<NerveError>,
) {
    let Some(f) = f else {
        errs.push(NerveError::Missing { detail: format!("operator {name}") });
        return;
    };
    if f.source() != src || f.target() != tgt {
        errs.push(NerveError::Operator {
            name: name.to_string(),
            detail: "endpoints do not match the stored levels".into(),
        });
        return;
    }
    if let Err(es) = f.validate() {
        errs.push(NerveError::Operator { name: name.to_string(), detail: join(&es) });
    }
}

/// The simplicial identities, in diagrammatic order, over one grading.
pub(crate) fn check_simplicial<'a>(
    max: usize,
    face: &dyn Fn(usize, usize) -> Option<&'a FinFunctor>,
    degen: &dyn Fn(usize, usize) -> Option<&'a FinFunctor>,
    level: &dyn Fn(usize) -> Option<&'a FinCategory>,
    tag: &str,
    errs: &mut Vec<NerveError>,
) {
    let fail = |detail: String, errs: &mut Vec<NerveError>| {
        errs.push(NerveError::Identity { detail: format!("{tag}{detail}") });
    };
    for k in 2..=max {
        for j in 1..=k {
            for i in 0..j {
                let (Some(a), Some(b), Some(c), Some(e)) =
                    (face(k, j), face(k - 1, i), face(k, i), face(k - 1, j - 1))
                else {
                    continue;
                };
                if a.then(b) != c.then(e) {
                    fail(format!("d_{j};d_{i} != d_{i};d_{} at level {k}", j - 1), errs);
                }
            }
        }
    }
    for k in 0..max.saturating_sub(1) {
        for j in 0..=k {
            for i in 0..=j {
                let (Some(a), Some(b), Some(c), Some(e)) =
                    (degen(k, j), degen(k + 1, i), degen(k, i), degen(k + 1, j + 1))
                else {
                    continue;
                };
                if a.then(b) != c.then(e) {
                    fail(format!("s_{j};s_{i} != s_{i};s_{} at level {k}", j + 1), errs);
                }
            }
        }
    }
    for k in 0..max {
        for j in 0..=k {
            let Some(s) = degen(k, j) else { continue };
            for i in 0..=(k + 1) {
                let Some(d) = face(k + 1, i) else { continue };
                let composite = s.then(d);
                if i == j || i == j + 1 {
                    let Some(cat) = level(k) else { continue };
                    if composite != FinFunctor::identity(cat) {
                        fail(format!("s_{j};d_{i} != id at level {k}"), errs);
                    }
                } else if i < j {
                    let (Some(d2), Some(s2)) = (face(k, i), degen(k - 1, j - 1)) else {
                        continue;
                    };
                    if composite != d2.then(s2) {
                        fail(format!("s_{j};d_{i} != d_{i};s_{} at level {k}", j - 1), errs);
                    }
                } else {
                    let (Some(d2), Some(s2)) = (face(k, i - 1), degen(k - 1, j)) else {
                        continue;
                    };
                    if composite != d2.then(s2) {
                        fail(format!("s_{j};d_{i} != d_{};s_{j} at level {k}", i - 1), errs);
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// String and row enumeration.

/// All composable `k`-strings of morphisms, in lexicographic order.
fn mor_strings(c: &FinCategory, k: usize) -> Vec<Vec<MorId>> {
    let mut cur: Vec<Vec<MorId>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &cur {
            for m in c.mor_ids() {
                if let Some(last) = s.last() {
                    if c.tgt(last) != c.src(m) {
                        continue;
                    }
                }
                let mut t = s.clone();
                t.push(m.clone());
                next.push(t);
            }
        }
        cur = next;
    }
    cur
}

/// All `k`-rows of squares: consecutive squares share a vertical edge.
fn square_rows(d: &DoubleCategory, k: usize) -> Vec<Vec<SqId>> {
    let mut cur: Vec<Vec<SqId>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for r in &cur {
            for (sq, b) in d.squares() {
                if let Some(last) = r.last() {
                    if d.boundary(last).expect("present square").right != b.left {
                        continue;
                    }
                }
                let mut t = r.clone();
                t.push(sq.clone());
                next.push(t);
            }
        }
        cur = next;
    }
    cur
}

fn string_name(parts: &[MorId]) -> String {
    parts.iter().map(|m| m.0.as_str()).collect::<Vec<_>>().join("|")
}

fn row_name(parts: &[SqId]) -> String {
    parts.iter().map(|s| s.0.as_str()).collect::<Vec<_>>().join("|")
}

fn ver_path_name(parts: &[MorId]) -> String {
    parts.iter().map(|m| m.0.as_str()).collect::<Vec<_>>().join(";")
}

fn grid_name(rows: &[Vec<SqId>]) -> String {
    rows.iter().map(|r| row_name(r)).collect::<Vec<_>>().join(";")
}

fn row_tops(d: &DoubleCategory, r: &[SqId]) -> Vec<MorId> {
    r.iter().map(|s| d.boundary(s).expect("present square").top.clone()).collect()
}

fn row_bottoms(d: &DoubleCategory, r: &[SqId]) -> Vec<MorId> {
    r.iter().map(|s| d.boundary(s).expect("present square").bottom.clone()).collect()
}

/// Drop an end or compose two adjacent entries of a composable string.
fn string_face(c: &FinCategory, s: &[MorId], i: usize) -> Vec<MorId> {
    let k = s.len();
    if i == 0 {
        s[1..].to_vec()
    } else if i == k {
        s[..k - 1].to_vec()
    } else {
        let mut out = s[..i - 1].to_vec();
        out.push(c.then(&s[i - 1], &s[i]).expect("composable string").clone());
        out.extend_from_slice(&s[i + 1..]);
        out
    }
}

fn row_face(d: &DoubleCategory, r: &[SqId], i: usize) -> Vec<SqId> {
    let k = r.len();
    if i == 0 {
        r[1..].to_vec()
    } else if i == k {
        r[..k - 1].to_vec()
    } else {
        let mut out = r[..i - 1].to_vec();
        out.push(d.beside(&r[i - 1], &r[i]).expect("adjacent squares paste").clone());
        out.extend_from_slice(&r[i + 1..]);
        out
    }
}

fn string_degeneracy(c: &FinCategory, s: &[MorId], i: usize) -> Vec<MorId> {
    let vertex = if i == 0 {
        c.src(&s[0]).expect("valid morphism").clone()
    } else {
        c.tgt(&s[i - 1]).expect("valid morphism").clone()
    };
    let mut out = s[..i].to_vec();
    out.push(c.id_of(&vertex).expect("valid category").clone());
    out.extend_from_slice(&s[i..]);
    out
}

fn row_degeneracy(d: &DoubleCategory, r: &[SqId], i: usize) -> Vec<SqId> {
    let edge = if i == 0 {
        d.boundary(&r[0]).expect("present square").left.clone()
    } else {
        d.boundary(&r[i - 1]).expect("present square").right.clone()
    };
    let mut out = r[..i].to_vec();
    out.push(d.hor_unit_on(&edge).expect("valid double category").clone());
    out.extend_from_slice(&r[i..]);
    out
}

// ---------------------------------------------------------------------------
// Classical nerve.

pub(crate) fn discrete_map(
    src: &FinCategory,
    tgt: &FinCategory,
    ob_map: BTreeMap<ObId, ObId>,
) -> FinFunctor {
    let mor_map = ob_map
        .iter()
        .map(|(a, b)| {
            (
                src.id_of(a).expect("discrete level").clone(),
                tgt.id_of(b).expect("discrete level").clone(),
            )
        })
        .collect();
    FinFunctor::new(src.clone(), tgt.clone(), ob_map, mor_map)
}

/// The classical nerve of a category, truncated at level `n`. Level `k` is
/// the discrete category of composable `k`-strings.
pub fn nerve_cat(c: &FinCategory, n: usize) -> SimplicialTruncation {
    let mut strings: Vec<Vec<Vec<MorId>>> = vec![Vec::new()];
    let mut levels = vec![FinCategory::discrete(c.objects().cloned())];
    for k in 1..=n {
        let s = mor_strings(c, k);
        levels.push(FinCategory::discrete(s.iter().map(|t| string_name(t))));
        strings.push(s);
    }
    let mut faces = BTreeMap::new();
    for k in 1..=n {
        for i in 0..=k {
            let ob_map: BTreeMap<ObId, ObId> = strings[k]
                .iter()
                .map(|s| {
                    let image = if k == 1 {
                        let end = if i == 0 { c.tgt(&s[0]) } else { c.src(&s[0]) };
                        end.expect("valid morphism").0.clone()
                    } else {
                        string_name(&string_face(c, s, i))
                    };
                    (ObId(string_name(s)), ObId(image))
                })
                .collect();
            faces.insert((k, i), discrete_map(&levels[k], &levels[k - 1], ob_map));
        }
    }
    let mut degeneracies = BTreeMap::new();
    for k in 0..n {
        for i in 0..=k {
            let ob_map: BTreeMap<ObId, ObId> = if k == 0 {
                c.objects()
                    .map(|x| {
                        (x.clone(), ObId(c.id_of(x).expect("valid category").0.clone()))
                    })
                    .collect()
            } else {
                strings[k]
                    .iter()
                    .map(|s| {
                        (ObId(string_name(s)), ObId(string_name(&string_degeneracy(c, s, i))))
                    })
                    .collect()
            };
            degeneracies.insert((k, i), discrete_map(&levels[k], &levels[k + 1], ob_map));
        }
    }
    SimplicialTruncation { max_level: n, levels, faces, degeneracies }
}

// ---------------------------------------------------------------------------
// Horizontal and vertical nerves.

/// Level `k >= 1` of the horizontal nerve: objects are `k`-strings of
/// horizontal morphisms, morphisms are `k`-rows of squares, composition is
/// cellwise stacking.
fn pullback_level(d: &DoubleCategory, strings: &[Vec<MorId>], rows: &[Vec<SqId>]) -> FinCategory {
    let mut cat = FinCategory::new();
    for s in strings {
        cat.add_object(string_name(s));
    }
    for r in rows {
        cat.add_morphism(
            row_name(r),
            string_name(&row_tops(d, r)),
            string_name(&row_bottoms(d, r)),
        );
    }
    for s in strings {
        let units: Vec<SqId> = s
            .iter()
            .map(|f| d.ver_unit_on(f).expect("valid double category").clone())
            .collect();
        cat.set_identity(string_name(s), row_name(&units));
    }
    for r1 in rows {
        let bottom = string_name(&row_bottoms(d, r1));
        for r2 in rows {
            if string_name(&row_tops(d, r2)) != bottom {
                continue;
            }
            let composite: Vec<SqId> = r1
                .iter()
                .zip(r2)
                .map(|(a, b)| d.stack(a, b).expect("rows stack cellwise").clone())
                .collect();
            cat.set_then(row_name(r1), row_name(r2), row_name(&composite));
        }
    }
    cat
}

/// The horizontal nerve, truncated at level `n`. Level 0 is the object
/// category (objects and vertical morphisms); level 1 is the morphism
/// category (horizontal morphisms and squares); level `k` is the `k`-fold
/// pullback of level 1 over level 0.
pub fn horizontal_nerve(d: &DoubleCategory, n: usize) -> SimplicialTruncation {
    let mut levels = vec![d.ver_cat().clone()];
    let mut strings: Vec<Vec<Vec<MorId>>> = vec![Vec::new()];
    let mut rows: Vec<Vec<Vec<SqId>>> = vec![Vec::new()];
    for k in 1..=n {
        let s = mor_strings(d.hor_cat(), k);
        let r = square_rows(d, k);
        levels.push(pullback_level(d, &s, &r));
        strings.push(s);
        rows.push(r);
    }
    let mut faces = BTreeMap::new();
    for k in 1..=n {
        for i in 0..=k {
            let mut ob_map = BTreeMap::new();
            let mut mor_map = BTreeMap::new();
            for s in &strings[k] {
                let image = if k == 1 {
                    let end = if i == 0 { d.hor_cat().tgt(&s[0]) } else { d.hor_cat().src(&s[0]) };
                    end.expect("valid morphism").0.clone()
                } else {
                    string_name(&string_face(d.hor_cat(), s, i))
                };
                ob_map.insert(ObId(string_name(s)), ObId(image));
            }
            for r in &rows[k] {
                let image = if k == 1 {
                    let b = d.boundary(&r[0]).expect("present square");
                    if i == 0 { b.right.0.clone() } else { b.left.0.clone() }
                } else {
                    row_name(&row_face(d, r, i))
                };
                mor_map.insert(MorId(row_name(r)), MorId(image));
            }
            faces.insert(
                (k, i),
                FinFunctor::new(levels[k].clone(), levels[k - 1].clone(), ob_map, mor_map),
            );
        }
    }
    let mut degeneracies = BTreeMap::new();
    for k in 0..n {
        for i in 0..=k {
            let mut ob_map = BTreeMap::new();
            let mut mor_map = BTreeMap::new();
            if k == 0 {
                for x in d.ver_cat().objects() {
                    let f = d.hor_cat().id_of(x).expect("valid double category");
                    ob_map.insert(x.clone(), ObId(f.0.clone()));
                }
                for v in d.ver_cat().mor_ids() {
                    let u = d.hor_unit_on(v).expect("valid double category");
                    mor_map.insert(v.clone(), MorId(u.0.clone()));
                }
            } else {
                for s in &strings[k] {
                    ob_map.insert(
                        ObId(string_name(s)),
                        ObId(string_name(&string_degeneracy(d.hor_cat(), s, i))),
                    );
                }
                for r in &rows[k] {
                    mor_map.insert(MorId(row_name(r)), MorId(row_name(&row_degeneracy(d, r, i))));
                }
            }
            degeneracies.insert(
                (k, i),
                FinFunctor::new(levels[k].clone(), levels[k + 1].clone(), ob_map, mor_map),
            );
        }
    }
    SimplicialTruncation { max_level: n, levels, faces, degeneracies }
}

/// The vertical nerve: the horizontal nerve of the transpose.
pub fn vertical_nerve(d: &DoubleCategory, n: usize) -> SimplicialTruncation {
    horizontal_nerve(&transpose(d), n)
}

/// The levelwise action of the horizontal nerve on a double functor:
/// one functor per level, `0..=n`.
pub fn nerve_maps(f: &DoubleFunctor, n: usize) -> Vec<FinFunctor> {
    let s = horizontal_nerve(f.source(), n);
    let t = horizontal_nerve(f.target(), n);
    let mut out = vec![f.ver_part()];
    for k in 1..=n {
        let mut ob_map = BTreeMap::new();
        let mut mor_map = BTreeMap::new();
        for string in mor_strings(f.source().hor_cat(), k) {
            let image: Vec<MorId> = string
                .iter()
                .map(|m| f.apply_hor(m).expect("total functor").clone())
                .collect();
            ob_map.insert(ObId(string_name(&string)), ObId(string_name(&image)));
        }
        for row in square_rows(f.source(), k) {
            let image: Vec<SqId> =
                row.iter().map(|x| f.apply_sq(x).expect("total functor").clone()).collect();
            mor_map.insert(MorId(row_name(&row)), MorId(row_name(&image)));
        }
        out.push(FinFunctor::new(s.levels[k].clone(), t.levels[k].clone(), ob_map, mor_map));
    }
    out
}

/// Rebuild a double functor from the bottom two levels of a truncation
/// morphism between horizontal nerves. The level-0 functor supplies the
/// object and vertical data, the level-1 functor the horizontal and square
/// data; validation decides whether the pair actually extends.
pub fn double_functor_from_nerve_maps(
    src: &DoubleCategory,
    tgt: &DoubleCategory,
    level0: &FinFunctor,
    level1: &FinFunctor,
) -> Result<DoubleFunctor, NerveError> {
    let ob_map = level0.ob_map().clone();
    let ver_map = level0.mor_map().clone();
    let hor_map = level1
        .ob_map()
        .iter()
        .map(|(a, b)| (MorId(a.0.clone()), MorId(b.0.clone())))
        .collect();
    let sq_map = level1
        .mor_map()
        .iter()
        .map(|(a, b)| (SqId(a.0.clone()), SqId(b.0.clone())))
        .collect();
    let f = DoubleFunctor::new(src.clone(), tgt.clone(), ob_map, hor_map, ver_map, sq_map);
    f.validate()
        .map_err(|es| NerveError::Reconstruction { detail: join(&es) })?;
    Ok(f)
}

// ---------------------------------------------------------------------------
// Double and diagonal nerves.

type Grid = Vec<Vec<SqId>>;

/// The bisimplicial nerve: `(p, q)` lists composable `p`-row, `q`-column
/// arrays of squares, with `(0, q)` horizontal paths, `(p, 0)` vertical
/// paths, and `(0, 0)` objects.
pub fn double_nerve(d: &DoubleCategory, m: usize, n: usize) -> BisimplicialTruncation {
    let hc = d.hor_cat();
    let vc = d.ver_cat();
    let mut hor_paths: Vec<Vec<Vec<MorId>>> = vec![Vec::new()];
    for q in 1..=n {
        hor_paths.push(mor_strings(hc, q));
    }
    let mut ver_paths: Vec<Vec<Vec<MorId>>> = vec![Vec::new()];
    for p in 1..=m {
        ver_paths.push(mor_strings(vc, p));
    }
    let mut grids: BTreeMap<(usize, usize), Vec<Grid>> = BTreeMap::new();
    for q in 1..=n {
        let rows = square_rows(d, q);
        let mut by_top: BTreeMap<String, Vec<Vec<SqId>>> = BTreeMap::new();
        for r in &rows {
            by_top.entry(string_name(&row_tops(d, r))).or_default().push(r.clone());
        }
        let mut cur: Vec<Grid> = rows.iter().map(|r| vec![r.clone()]).collect();
        for p in 1..=m {
            if p > 1 {
                let mut next = Vec::new();
                for g in &cur {
                    let key = string_name(&row_bottoms(d, g.last().expect("nonempty grid")));
                    for r in by_top.get(&key).map_or(&[][..], |v| v) {
                        let mut t = g.clone();
                        t.push(r.clone());
                        next.push(t);
                    }
                }
                cur = next;
            }
            grids.insert((p, q), cur.clone());
        }
    }

    let mut levels = BTreeMap::new();
    for p in 0..=m {
        for q in 0..=n {
            let names: Vec<String> = match (p, q) {
                (0, 0) => hc.objects().map(|x| x.0.clone()).collect(),
                (0, _) => hor_paths[q].iter().map(|s| string_name(s)).collect(),
                (_, 0) => ver_paths[p].iter().map(|s| ver_path_name(s)).collect(),
                _ => grids[&(p, q)].iter().map(|g| grid_name(g)).collect(),
            };
            levels.insert((p, q), FinCategory::discrete(names));
        }
    }

    let mut col_faces = BTreeMap::new();
    let mut row_faces = BTreeMap::new();
    let mut col_degeneracies = BTreeMap::new();
    let mut row_degeneracies = BTreeMap::new();
    for p in 0..=m {
        for q in 0..=n {
            for j in 0..=q {
                if q >= 1 {
                    let ob_map = dn_col_face(d, p, q, j, &hor_paths, &grids);
                    col_faces.insert(
                        (p, q, j),
                        discrete_map(&levels[&(p, q)], &levels[&(p, q - 1)], ob_map),
                    );
                }
                if q < n {
                    let ob_map = dn_col_degeneracy(d, p, q, j, &hor_paths, &ver_paths, &grids);
                    col_degeneracies.insert(
                        (p, q, j),
                        discrete_map(&levels[&(p, q)], &levels[&(p, q + 1)], ob_map),
                    );
                }
            }
            for i in 0..=p {
                if p >= 1 {
                    let ob_map = dn_row_face(d, p, q, i, &ver_paths, &grids);
                    row_faces.insert(
                        (p, q, i),
                        discrete_map(&levels[&(p, q)], &levels[&(p - 1, q)], ob_map),
                    );
                }
                if p < m {
                    let ob_map = dn_row_degeneracy(d, p, q, i, &hor_paths, &ver_paths, &grids);
                    row_degeneracies.insert(
                        (p, q, i),
                        discrete_map(&levels[&(p, q)], &levels[&(p + 1, q)], ob_map),
                    );
                }
            }
        }
    }
    BisimplicialTruncation {
        max_rows: m,
        max_cols: n,
        levels,
        row_faces,
        col_faces,
        row_degeneracies,
        col_degeneracies,
    }
}

fn dn_col_face(
    d: &DoubleCategory,
    p: usize,
    q: usize,
    j: usize,
    hor_paths: &[Vec<Vec<MorId>>],
    grids: &BTreeMap<(usize, usize), Vec<Grid>>,
) -> BTreeMap<ObId, ObId> {
    let hc = d.hor_cat();
    let mut out = BTreeMap::new();
    if p == 0 {
        for s in &hor_paths[q] {
            let image = if q == 1 {
                let end = if j == 0 { hc.tgt(&s[0]) } else { hc.src(&s[0]) };
                end.expect("valid morphism").0.clone()
            } else {
                string_name(&string_face(hc, s, j))
            };
            out.insert(ObId(string_name(s)), ObId(image));
        }
    } else {
        for g in &grids[&(p, q)] {
            let image = if q == 1 {
                let edges: Vec<MorId> = g
                    .iter()
                    .map(|r| {
                        let b = d.boundary(&r[0]).expect("present square");
                        if j == 0 { b.right.clone() } else { b.left.clone() }
                    })
                    .collect();
                ver_path_name(&edges)
            } else {
                let rows: Vec<Vec<SqId>> = g.iter().map(|r| row_face(d, r, j)).collect();
                grid_name(&rows)
            };
            out.insert(ObId(grid_name(g)), ObId(image));
        }
    }
    out
}

fn dn_row_face(
    d: &DoubleCategory,
    p: usize,
    q: usize,
    i: usize,
    ver_paths: &[Vec<Vec<MorId>>],
    grids: &BTreeMap<(usize, usize), Vec<Grid>>,
) -> BTreeMap<ObId, ObId> {
    let vc = d.ver_cat();
    let mut out = BTreeMap::new();
    if q == 0 {
        for s in &ver_paths[p] {
            let image = if p == 1 {
                let end = if i == 0 { vc.tgt(&s[0]) } else { vc.src(&s[0]) };
                end.expect("valid morphism").0.clone()
            } else {
                ver_path_name(&string_face(vc, s, i))
            };
            out.insert(ObId(ver_path_name(s)), ObId(image));
        }
    } else {
        for g in &grids[&(p, q)] {
            let image = if p == 1 {
                let string =
                    if i == 0 { row_bottoms(d, &g[0]) } else { row_tops(d, &g[0]) };
                string_name(&string)
            } else if i == 0 {
                grid_name(&g[1..])
            } else if i == p {
                grid_name(&g[..p - 1])
            } else {
                let merged: Vec<SqId> = g[i - 1]
                    .iter()
                    .zip(&g[i])
                    .map(|(a, b)| d.stack(a, b).expect("adjacent rows stack").clone())
                    .collect();
                let mut rows = g[..i - 1].to_vec();
                rows.push(merged);
                rows.extend_from_slice(&g[i + 1..]);
                grid_name(&rows)
            };
            out.insert(ObId(grid_name(g)), ObId(image));
        }
    }
    out
}

fn dn_col_degeneracy(
    d: &DoubleCategory,
    p: usize,
    q: usize,
    j: usize,
    hor_paths: &[Vec<Vec<MorId>>],
    ver_paths: &[Vec<Vec<MorId>>],
    grids: &BTreeMap<(usize, usize), Vec<Grid>>,
) -> BTreeMap<ObId, ObId> {
    let hc = d.hor_cat();
    let mut out = BTreeMap::new();
    match (p, q) {
        (0, 0) => {
            for x in hc.objects() {
                let f = hc.id_of(x).expect("valid category");
                out.insert(x.clone(), ObId(f.0.clone()));
            }
        }
        (0, _) => {
            for s in &hor_paths[q] {
                out.insert(
                    ObId(string_name(s)),
                    ObId(string_name(&string_degeneracy(hc, s, j))),
                );
            }
        }
        (_, 0) => {
            for s in &ver_paths[p] {
                let rows: Vec<Vec<SqId>> = s
                    .iter()
                    .map(|u| vec![d.hor_unit_on(u).expect("valid double category").clone()])
                    .collect();
                out.insert(ObId(ver_path_name(s)), ObId(grid_name(&rows)));
            }
        }
        _ => {
            for g in &grids[&(p, q)] {
                let rows: Vec<Vec<SqId>> = g
                    .iter()
                    .map(|r| {
                        let edge = if j == 0 {
                            d.boundary(&r[0]).expect("present square").left.clone()
                        } else {
                            d.boundary(&r[j - 1]).expect("present square").right.clone()
                        };
                        let unit = d.hor_unit_on(&edge).expect("valid double category").clone();
                        let mut row = r[..j].to_vec();
                        row.push(unit);
                        row.extend_from_slice(&r[j..]);
                        row
                    })
                    .collect();
                out.insert(ObId(grid_name(g)), ObId(grid_name(&rows)));
            }
        }
    }
    out
}

fn dn_row_degeneracy(
    d: &DoubleCategory,
    p: usize,
    q: usize,
    i: usize,
    hor_paths: &[Vec<Vec<MorId>>],
    ver_paths: &[Vec<Vec<MorId>>],
    grids: &BTreeMap<(usize, usize), Vec<Grid>>,
) -> BTreeMap<ObId, ObId> {
    let vc = d.ver_cat();
    let mut out = BTreeMap::new();
    match (p, q) {
        (0, 0) => {
            for x in vc.objects() {
                let u = vc.id_of(x).expect("valid category");
                out.insert(x.clone(), ObId(u.0.clone()));
            }
        }
        (_, 0) => {
            for s in &ver_paths[p] {
                out.insert(
                    ObId(ver_path_name(s)),
                    ObId(ver_path_name(&string_degeneracy(vc, s, i))),
                );
            }
        }
        (0, _) => {
            for s in &hor_paths[q] {
                let row: Vec<SqId> = s
                    .iter()
                    .map(|f| d.ver_unit_on(f).expect("valid double category").clone())
                    .collect();
                out.insert(ObId(string_name(s)), ObId(grid_name(&[row])));
            }
        }
        _ => {
            for g in &grids[&(p, q)] {
                let unit_row: Vec<SqId> = (0..g[0].len())
                    .map(|col| {
                        let edge = if i == 0 {
                            d.boundary(&g[0][col]).expect("present square").top.clone()
                        } else {
                            d.boundary(&g[i - 1][col]).expect("present square").bottom.clone()
                        };
                        d.ver_unit_on(&edge).expect("valid double category").clone()
                    })
                    .collect();
                let mut rows = g[..i].to_vec();
                rows.push(unit_row);
                rows.extend_from_slice(&g[i..]);
                out.insert(ObId(grid_name(g)), ObId(grid_name(&rows)));
            }
        }
    }
    out
}

impl BisimplicialTruncation {
    pub fn level(&self, p: usize, q: usize) -> Option<&FinCategory> {
        self.levels.get(&(p, q))
    }

    /// Check simplicial identities in each grading and commutation of row
    /// operators with column operators, on all represented composites.
    pub fn validate(&self) -> Result<(), Vec<NerveError>> {
        let mut errs = Vec::new();
        for p in 0..=self.max_rows {
            check_simplicial(
                self.max_cols,
                &|q, j| self.col_faces.get(&(p, q, j)),
                &|q, j| self.col_degeneracies.get(&(p, q, j)),
                &|q| self.levels.get(&(p, q)),
                &format!("row {p}: "),
                &mut errs,
            );
        }
        for q in 0..=self.max_cols {
            check_simplicial(
                self.max_rows,
                &|p, i| self.row_faces.get(&(p, q, i)),
                &|p, i| self.row_degeneracies.get(&(p, q, i)),
                &|p| self.levels.get(&(p, q)),
                &format!("column {q}: "),
                &mut errs,
            );
        }
        let fail = |detail: String, errs: &mut Vec<NerveError>| {
            errs.push(NerveError::Identity { detail });
        };
        for (&(p, q, j), cf) in &self.col_faces {
            for i in 0..=p {
                if let (Some(rf2), Some(rf), Some(cf2)) = (
                    self.row_faces.get(&(p, q - 1, i)),
                    self.row_faces.get(&(p, q, i)),
                    self.col_faces.get(&(p.wrapping_sub(1), q, j)),
                ) {
                    if p >= 1 && cf.then(rf2) != rf.then(cf2) {
                        fail(format!("row face {i} and column face {j} differ at ({p},{q})"), &mut errs);
                    }
                }
                if let (Some(rd2), Some(rd), Some(cf2)) = (
                    self.row_degeneracies.get(&(p, q - 1, i)),
                    self.row_degeneracies.get(&(p, q, i)),
                    self.col_faces.get(&(p + 1, q, j)),
                ) {
                    if cf.then(rd2) != rd.then(cf2) {
                        fail(
                            format!("row degeneracy {i} and column face {j} differ at ({p},{q})"),
                            &mut errs,
                        );
                    }
                }
            }
        }
        for (&(p, q, j), cd) in &self.col_degeneracies {
            for i in 0..=p {
                if let (Some(rf2), Some(rf), Some(cd2)) = (
                    self.row_faces.get(&(p, q + 1, i)),
                    self.row_faces.get(&(p, q, i)),
                    self.col_degeneracies.get(&(p.wrapping_sub(1), q, j)),
                ) {
                    if p >= 1 && cd.then(rf2) != rf.then(cd2) {
                        fail(format!("row face {i} and column degeneracy {j} differ at ({p},{q})"), &mut errs);
                    }
                }
                if let (Some(rd2), Some(rd), Some(cd2)) = (
                    self.row_degeneracies.get(&(p, q + 1, i)),
                    self.row_degeneracies.get(&(p, q, i)),
                    self.col_degeneracies.get(&(p + 1, q, j)),
                ) {
                    if cd.then(rd2) != rd.then(cd2) {
                        fail(
                            format!("row degeneracy {i} and column degeneracy {j} differ at ({p},{q})"),
                            &mut errs,
                        );
                    }
                }
            }
        }
        if errs.is_empty() { Ok(()) } else { Err(errs) }
    }
}

/// The diagonal of the double nerve: level `k` is the `(k, k)` arrays, the
/// `i`-th operator is the `i`-th row operator followed by the `i`-th column
/// operator.
pub fn diag_nerve(d: &DoubleCategory, k: usize) -> SimplicialTruncation {
    let b = double_nerve(d, k, k);
    let levels: Vec<FinCategory> = (0..=k).map(|j| b.levels[&(j, j)].clone()).collect();
    let mut faces = BTreeMap::new();
    for j in 1..=k {
        for i in 0..=j {
            let rf = &b.row_faces[&(j, j, i)];
            let cf = &b.col_faces[&(j - 1, j, i)];
            faces.insert((j, i), rf.then(cf));
        }
    }
    let mut degeneracies = BTreeMap::new();
    for j in 0..k {
        for i in 0..=j {
            let rd = &b.row_degeneracies[&(j, j, i)];
            let cd = &b.col_degeneracies[&(j + 1, j, i)];
            degeneracies.insert((j, i), rd.then(cd));
        }
    }
    SimplicialTruncation { max_level: k, levels, faces, degeneracies }
}

// ---------------------------------------------------------------------------
// Coskeletality.

/// The operator induced by a monotone injection `[a] -> [n]` with the given
/// image, as a composite of faces; `None` when a needed face is missing.
fn injection_operator(
    t: &SimplicialTruncation,
    n: usize,
    image: &[usize],
) -> Option<FinFunctor> {
    let mut missing: Vec<usize> = (0..=n).filter(|x| !image.contains(x)).collect();
    missing.reverse();
    let mut cur: Option<FinFunctor> = None;
    let mut level = n;
    for s in missing {
        let f = t.face(level, s)?;
        cur = Some(match cur {
            None => f.clone(),
            Some(c) => c.then(f),
        });
        level -= 1;
    }
    match cur {
        None => Some(FinFunctor::identity(t.level(n)?)),
        Some(c) => Some(c),
    }
}

/// A compatible family over the injections `[a] -> [n]`, `a <= 2`:
/// one vertex entry per point, one edge entry per pair, one filler entry
/// per triple, with matching faces. Both the object grading and the
/// morphism grading of a level use the same shape.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct MatchingFamily {
    verts: Vec<String>,
    edges: Vec<String>,
    tris: Vec<String>,
}

fn pair_index(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..=n {
        for j in (i + 1)..=n {
            out.push((i, j));
        }
    }
    out
}

fn triple_index(n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..=n {
        for j in (i + 1)..=n {
            for k in (j + 1)..=n {
                out.push((i, j, k));
            }
        }
    }
    out
}

/// One grading (objects or morphisms) of levels 0..2 with its face tables.
struct MatchingData {
    elems: [Vec<String>; 3],
    // d_i from level 1 and level 2, keyed by element.
    f1: [BTreeMap<String, String>; 2],
    f2: [BTreeMap<String, String>; 3],
}

impl MatchingData {
    /// All matching families, visited in DFS order. Stops and returns
    /// `false` from the closure to abort.
    fn visit(&self, n: usize, mut found: impl FnMut(MatchingFamily) -> bool) -> bool {
        let pairs = pair_index(n);
        let triples = triple_index(n);
        let mut edges_by_ends: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
        for e in &self.elems[1] {
            let key = (self.f1[1][e].clone(), self.f1[0][e].clone());
            edges_by_ends.entry(key).or_default().push(e.clone());
        }
        let mut tris_by_faces: BTreeMap<(String, String, String), Vec<String>> = BTreeMap::new();
        for t in &self.elems[2] {
            let key = (self.f2[2][t].clone(), self.f2[0][t].clone(), self.f2[1][t].clone());
            tris_by_faces.entry(key).or_default().push(t.clone());
        }
        let empty: Vec<String> = Vec::new();
        // DFS over vertex choices, then edges, then fillers.
        let mut verts: Vec<String> = Vec::new();
        let mut stack: Vec<usize> = vec![0];
        loop {
            if verts.len() == n + 1 {
                if !self.visit_edges(
                    &pairs,
                    &triples,
                    &verts,
                    &edges_by_ends,
                    &tris_by_faces,
                    &empty,
                    &mut found,
                ) {
                    return false;
                }
                verts.pop();
                stack.pop();
                if stack.is_empty() {
                    return true;
                }
            }
            let at = stack.last_mut().expect("nonempty stack");
            if *at < self.elems[0].len() {
                verts.push(self.elems[0][*at].clone());
                *at += 1;
                stack.push(0);
            } else {
                stack.pop();
                if verts.pop().is_none() {
                    return true;
                }
                if stack.is_empty() {
                    return true;
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn visit_edges(
        &self,
        pairs: &[(usize, usize)],
        triples: &[(usize, usize, usize)],
        verts: &[String],
        edges_by_ends: &BTreeMap<(String, String), Vec<String>>,
        tris_by_faces: &BTreeMap<(String, String, String), Vec<String>>,
        empty: &Vec<String>,
        found: &mut impl FnMut(MatchingFamily) -> bool,
    ) -> bool {
        let mut chosen: Vec<String> = Vec::new();
        self.edges_rec(pairs, triples, verts, edges_by_ends, tris_by_faces, empty, &mut chosen, found)
    }

    #[allow(clippy::too_many_arguments)]
    fn edges_rec(
        &self,
        pairs: &[(usize, usize)],
        triples: &[(usize, usize, usize)],
        verts: &[String],
        edges_by_ends: &BTreeMap<(String, String), Vec<String>>,
        tris_by_faces: &BTreeMap<(String, String, String), Vec<String>>,
        empty: &Vec<String>,
        chosen: &mut Vec<String>,
        found: &mut impl FnMut(MatchingFamily) -> bool,
    ) -> bool {
        if chosen.len() == pairs.len() {
            let edge_at = |i: usize, j: usize| {
                let idx = pairs.iter().position(|&p| p == (i, j)).expect("indexed pair");
                chosen[idx].clone()
            };
            let mut tris: Vec<String> = Vec::new();
            return self.tris_rec(
                triples,
                &edge_at,
                tris_by_faces,
                empty,
                &mut tris,
                &mut |tris_done: &Vec<String>| {
                    found(MatchingFamily {
                        verts: verts.to_vec(),
                        edges: chosen.clone(),
                        tris: tris_done.clone(),
                    })
                },
            );
        }
        let (i, j) = pairs[chosen.len()];
        let key = (verts[i].clone(), verts[j].clone());
        for e in edges_by_ends.get(&key).unwrap_or(empty) {
            chosen.push(e.clone());
            if !self.edges_rec(
                pairs, triples, verts, edges_by_ends, tris_by_faces, empty, chosen, found,
            ) {
                return false;
            }
            chosen.pop();
        }
        true
    }

    fn tris_rec(
        &self,
        triples: &[(usize, usize, usize)],
        edge_at: &impl Fn(usize, usize) -> String,
        tris_by_faces: &BTreeMap<(String, String, String), Vec<String>>,
        empty: &Vec<String>,
        tris: &mut Vec<String>,
        found: &mut impl FnMut(&Vec<String>) -> bool,
    ) -> bool {
        if tris.len() == triples.len() {
            return found(tris);
        }
        let (i, j, k) = triples[tris.len()];
        let key = (edge_at(i, j), edge_at(j, k), edge_at(i, k));
        for t in tris_by_faces.get(&key).unwrap_or(empty) {
            tris.push(t.clone());
            if !self.tris_rec(triples, edge_at, tris_by_faces, empty, tris, found) {
                return false;
            }
            tris.pop();
        }
        true
    }
}

fn face_table(f: &FinFunctor, objects: bool) -> BTreeMap<String, String> {
    if objects {
        f.ob_map().iter().map(|(a, b)| (a.0.clone(), b.0.clone())).collect()
    } else {
        f.mor_map().iter().map(|(a, b)| (a.0.clone(), b.0.clone())).collect()
    }
}

fn matching_data(t: &SimplicialTruncation, objects: bool) -> Option<MatchingData> {
    let elem = |k: usize| -> Option<Vec<String>> {
        let c = t.level(k)?;
        Some(if objects {
            c.objects().map(|x| x.0.clone()).collect()
        } else {
            c.mor_ids().map(|m| m.0.clone()).collect()
        })
    };
    Some(MatchingData {
        elems: [elem(0)?, elem(1)?, elem(2)?],
        f1: [face_table(t.face(1, 0)?, objects), face_table(t.face(1, 1)?, objects)],
        f2: [
            face_table(t.face(2, 0)?, objects),
            face_table(t.face(2, 1)?, objects),
            face_table(t.face(2, 2)?, objects),
        ],
    })
}

fn canonical_families(
    t: &SimplicialTruncation,
    n: usize,
    objects: bool,
) -> Option<Vec<MatchingFamily>> {
    let c = t.level(n)?;
    let elems: Vec<String> = if objects {
        c.objects().map(|x| x.0.clone()).collect()
    } else {
        c.mor_ids().map(|m| m.0.clone()).collect()
    };
    let pairs = pair_index(n);
    let triples = triple_index(n);
    let mut vert_ops = Vec::new();
    for i in 0..=n {
        vert_ops.push(face_table(&injection_operator(t, n, &[i])?, objects));
    }
    let mut edge_ops = Vec::new();
    for &(i, j) in &pairs {
        edge_ops.push(face_table(&injection_operator(t, n, &[i, j])?, objects));
    }
    let mut tri_ops = Vec::new();
    for &(i, j, k) in &triples {
        tri_ops.push(face_table(&injection_operator(t, n, &[i, j, k])?, objects));
    }
    let mut out = Vec::new();
    for x in &elems {
        out.push(MatchingFamily {
            verts: vert_ops.iter().map(|m| m.get(x).cloned()).collect::<Option<_>>()?,
            edges: edge_ops.iter().map(|m| m.get(x).cloned()).collect::<Option<_>>()?,
            tris: tri_ops.iter().map(|m| m.get(x).cloned()).collect::<Option<_>>()?,
        });
    }
    Some(out)
}

/// Does level `n` of this truncation agree with the limit of compatible
/// families computed from levels 0..2? Checked separately for the object
/// grading and the morphism grading; the canonical assignment must be a
/// bijection onto the matching families in both.
pub fn truncation_is_2coskeletal(t: &SimplicialTruncation, n: usize) -> bool {
    if n < 3 || t.level(n).is_none() {
        return false;
    }
    for objects in [true, false] {
        let Some(data) = matching_data(t, objects) else {
            return false;
        };
        let Some(canon) = canonical_families(t, n, objects) else {
            return false;
        };
        let image: BTreeSet<MatchingFamily> = canon.iter().cloned().collect();
        if image.len() != canon.len() {
            return false;
        }
        let mut count = 0usize;
        let all_hit = data.visit(n, |family| {
            count += 1;
            image.contains(&family)
        });
        if !all_hit || count != canon.len() {
            return false;
        }
    }
    true
}

/// The horizontal nerve is determined by its three lowest levels: level `n`
/// of `N_h(d)` is canonically isomorphic to its matching-family limit.
pub fn check_2coskeletal(d: &DoubleCategory, n: usize) -> bool {
    n >= 3 && truncation_is_2coskeletal(&horizontal_nerve(d, n), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::colim::{colimit_cat, filtered_colimit_dblcat, CatDiagram, DblDiagram};
    use crate::core::enumerate::{double_functors_between, functors_between};
    use crate::core::iso::cat_iso_search;
    use crate::core::ops::{embed_h, external_product, inclusion_functor, terminal};

    fn level_counts(t: &SimplicialTruncation) -> Vec<(usize, usize)> {
        t.levels.iter().map(|c| (c.object_count(), c.morphism_count())).collect()
    }

    #[test]
    fn nerve_of_the_interval_counts_strings() {
        let t = nerve_cat(&FinCategory::ordinal(1), 3);
        assert_eq!(
            level_counts(&t),
            vec![(2, 2), (3, 3), (4, 4), (5, 5)],
            "levels are discrete string sets"
        );
        assert!(t.validate().is_ok());
    }

    #[test]
    fn nerve_of_the_point_is_all_singletons() {
        let t = nerve_cat(&FinCategory::ordinal(0), 3);
        assert_eq!(level_counts(&t), vec![(1, 1); 4]);
        assert!(t.validate().is_ok());
    }

    #[test]
    fn nerve_of_the_triangle_satisfies_the_simplicial_identities() {
        let t = nerve_cat(&FinCategory::ordinal(2), 3);
        assert_eq!(level_counts(&t), vec![(3, 3), (6, 6), (10, 10), (15, 15)]);
        assert!(t.validate().is_ok());
    }

    #[test]
    fn horizontal_nerve_levels_are_iterated_pullbacks() {
        let d = external_product(&FinCategory::ordinal(1), &FinCategory::ordinal(1));
        let t = horizontal_nerve(&d, 3);
        assert_eq!(t.levels[0], *d.ver_cat());
        assert_eq!(level_counts(&t), vec![(4, 6), (6, 9), (8, 12), (10, 15)]);
        assert!(t.validate().is_ok());
    }

    #[test]
    fn horizontal_nerve_of_an_embedded_category_is_the_classical_nerve() {
        let c = FinCategory::ordinal(2);
        let t = horizontal_nerve(&embed_h(&c), 3);
        let n = nerve_cat(&c, 3);
        for k in 0..=3 {
            assert_eq!(t.levels[k].object_count(), n.levels[k].object_count());
            // Discrete: every morphism is an identity.
            assert_eq!(t.levels[k].morphism_count(), t.levels[k].object_count());
        }
        assert!(t.validate().is_ok());
    }

    #[test]
    fn horizontal_nerve_of_an_external_product_is_a_levelwise_product() {
        let a = FinCategory::walking_iso();
        let b = FinCategory::ordinal(1);
        let t = horizontal_nerve(&external_product(&a, &b), 3);
        let nb = nerve_cat(&b, 3);
        for k in 0..=3 {
            let expected = a.product(&nb.levels[k]);
            assert!(
                cat_iso_search(&t.levels[k], &expected).is_some(),
                "level {k} is the product with the discrete string set"
            );
        }
    }

    #[test]
    fn horizontal_nerve_of_the_terminal_is_levelwise_terminal() {
        let t = horizontal_nerve(&terminal(), 3);
        assert_eq!(level_counts(&t), vec![(1, 1); 4]);
        assert!(t.validate().is_ok());
    }

    #[test]
    fn vertical_nerve_swaps_the_roles() {
        let d = external_product(&FinCategory::ordinal(1), &FinCategory::ordinal(1));
        let t = vertical_nerve(&d, 2);
        assert_eq!(t.levels[0], *d.hor_cat());
        assert_eq!(t.levels[1].object_count(), 6);
        assert_eq!(t.levels[1].morphism_count(), 9);
        assert!(t.validate().is_ok());
    }

    #[test]
    fn double_nerve_counts_composable_arrays() {
        let d = external_product(&FinCategory::ordinal(1), &FinCategory::ordinal(1));
        let b = double_nerve(&d, 2, 2);
        let count = |p: usize, q: usize| b.levels[&(p, q)].object_count();
        assert_eq!(count(0, 0), 4);
        assert_eq!(count(0, 1), 6);
        assert_eq!(count(1, 0), 6);
        assert_eq!(count(1, 1), 9, "every square is a 1x1 array");
        assert_eq!(count(0, 2), 8);
        assert_eq!(count(2, 0), 8);
        assert_eq!(count(2, 2), 16);
        assert!(b.validate().is_ok());

        let h = double_nerve(&embed_h(&FinCategory::ordinal(2)), 2, 2);
        for p in 0..=2 {
            // Only identity vertical paths: the vertical grading is constant.
            assert_eq!(h.levels[&(p, 0)].object_count(), 3);
        }
        assert_eq!(h.levels[&(1, 1)].object_count(), 6);
        assert_eq!(h.levels[&(2, 2)].object_count(), 10);
        assert!(h.validate().is_ok());
    }

    #[test]
    fn diagonal_nerve_matches_the_diagonal_of_the_double_nerve() {
        let d = external_product(&FinCategory::ordinal(1), &FinCategory::ordinal(1));
        let t = diag_nerve(&d, 2);
        let b = double_nerve(&d, 2, 2);
        for k in 0..=2 {
            assert_eq!(t.levels[k].object_count(), b.levels[&(k, k)].object_count());
        }
        assert_eq!(level_counts(&t), vec![(4, 4), (9, 9), (16, 16)]);
        assert!(t.validate().is_ok());
    }

    #[test]
    fn horizontal_nerves_are_2_coskeletal() {
        let d = external_product(&FinCategory::ordinal(1), &FinCategory::ordinal(1));
        assert!(check_2coskeletal(&d, 3));
        assert!(check_2coskeletal(&embed_h(&FinCategory::ordinal(2)), 4));
    }

    #[test]
    fn a_corrupted_level_fails_the_coskeletal_check() {
        let d = external_product(&FinCategory::ordinal(1), &FinCategory::ordinal(1));
        let mut t = horizontal_nerve(&d, 3);
        let old = t.faces[&(3, 1)].clone();
        let mut ob = old.ob_map().clone();
        let keys: Vec<ObId> = ob.keys().cloned().collect();
        let (a, b) = keys
            .iter()
            .flat_map(|x| keys.iter().map(move |y| (x.clone(), y.clone())))
            .find(|(x, y)| ob[x] != ob[y])
            .expect("a face with two distinct values");
        let (va, vb) = (ob[&a].clone(), ob[&b].clone());
        ob.insert(a, vb);
        ob.insert(b, va);
        t.faces.insert(
            (3, 1),
            FinFunctor::new(old.source().clone(), old.target().clone(), ob, old.mor_map().clone()),
        );
        assert!(!truncation_is_2coskeletal(&t, 3));
    }

    #[test]
    fn nerve_maps_determine_the_double_functor() {
        for d in [
            embed_h(&FinCategory::ordinal(1)),
            external_product(&FinCategory::walking_iso(), &FinCategory::ordinal(0)),
        ] {
            let fs = double_functors_between(&d, &d, 10_000).expect("small search");
            let s = horizontal_nerve(&d, 2);
            // Distinct functors give distinct truncation morphisms.
            let maps: Vec<Vec<FinFunctor>> = fs.iter().map(|f| nerve_maps(f, 2)).collect();
            for i in 0..maps.len() {
                for j in 0..i {
                    assert_ne!(maps[i], maps[j]);
                }
            }
            // Every commuting pair of level maps extends to exactly one
            // double functor.
            let c0 = functors_between(&s.levels[0], &s.levels[0], 10_000).expect("small search");
            let c1 = functors_between(&s.levels[1], &s.levels[1], 10_000).expect("small search");
            let d0 = &s.faces[&(1, 0)];
            let d1 = &s.faces[&(1, 1)];
            let s0 = &s.degeneracies[&(0, 0)];
            let mut extended = Vec::new();
            for phi1 in &c1 {
                for phi0 in &c0 {
                    if phi1.then(d0) != d0.then(phi0) || phi1.then(d1) != d1.then(phi0) {
                        continue;
                    }
                    if s0.then(phi1) != phi0.then(s0) {
                        continue;
                    }
                    if let Ok(f) = double_functor_from_nerve_maps(&d, &d, phi0, phi1) {
                        extended.push(f);
                    }
                }
            }
            assert_eq!(extended.len(), fs.len());
            for f in &fs {
                let m = nerve_maps(f, 2);
                let back = double_functor_from_nerve_maps(&d, &d, &m[0], &m[1])
                    .expect("nerve maps of a functor extend");
                assert_eq!(&back, f);
            }
        }
    }

    fn embed_h_inclusion(a: &FinCategory, b: &FinCategory) -> DoubleFunctor {
        let f = inclusion_functor(a, b);
        let ver_map = a
            .objects()
            .map(|x| {
                let y = f.apply_ob(x).expect("inclusion is total");
                (MorId(format!("id_{x}")), MorId(format!("id_{y}")))
            })
            .collect();
        let sq_map = a
            .mor_ids()
            .map(|m| {
                let i = f.apply_mor(m).expect("inclusion is total");
                (SqId(m.0.clone()), SqId(i.0.clone()))
            })
            .collect();
        let g = DoubleFunctor::new(
            embed_h(a),
            embed_h(b),
            f.ob_map().clone(),
            f.mor_map().clone(),
            ver_map,
            sq_map,
        );
        assert!(g.validate().is_ok());
        g
    }

    #[test]
    fn the_nerve_commutes_with_directed_colimits() {
        let c: Vec<FinCategory> = (1..=3).map(FinCategory::ordinal).collect();
        let f01 = embed_h_inclusion(&c[0], &c[1]);
        let f12 = embed_h_inclusion(&c[1], &c[2]);
        let f02 = f01.then(&f12);
        let d = DblDiagram {
            index: FinCategory::ordinal(2),
            nodes: [
                ("0".into(), embed_h(&c[0])),
                ("1".into(), embed_h(&c[1])),
                ("2".into(), embed_h(&c[2])),
            ]
            .into_iter()
            .collect(),
            edges: [
                ("0<=1".into(), f01.clone()),
                ("1<=2".into(), f12.clone()),
                ("0<=2".into(), f02.clone()),
            ]
            .into_iter()
            .collect(),
        };
        let colim = filtered_colimit_dblcat(&d).expect("directed chain");
        let nerve_of_colim = horizontal_nerve(&colim.double, 2);
        for k in 0..=2 {
            let cd = CatDiagram {
                index: FinCategory::ordinal(2),
                nodes: (0..3)
                    .map(|i| {
                        (
                            ObId(i.to_string()),
                            horizontal_nerve(&embed_h(&c[i]), 2).levels[k].clone(),
                        )
                    })
                    .collect(),
                edges: [
                    ("0<=1".into(), nerve_maps(&f01, 2)[k].clone()),
                    ("1<=2".into(), nerve_maps(&f12, 2)[k].clone()),
                    ("0<=2".into(), nerve_maps(&f02, 2)[k].clone()),
                ]
                .into_iter()
                .collect(),
            };
            let level_colim = colimit_cat(&cd, &Budget::default()).expect("chain of levels");
            assert!(
                cat_iso_search(&nerve_of_colim.levels[k], &level_colim.category).is_some(),
                "level {k} of the nerve is the colimit of the level diagram"
            );
        }
    }
}
