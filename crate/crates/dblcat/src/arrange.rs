/*! Rectangle subdivisions, allowability, cut trees, and labeled arrangements.

A subdivision cuts a rectangle into smaller rectangles. Coordinates are
ranks: after normalization the cell boundaries use the consecutive integers
`0..=width` and `0..=height`, so two subdivisions are equal exactly when
their combinatorics agree. The y axis grows downward, matching the
top-to-bottom reading of squares.

A subdivision is allowable when it is a single cell or some full-length
horizontal or vertical cut splits it into two allowable parts. Allowable
subdivisions fold to a canonical [`CutTree`]; labeled ones
([`Arrangement`]) compose to a single square of a double category.
*/

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::core::{DoubleCategory, DoubleDerivationScheme, MorId, ObId, SqId};

/// One cell of a subdivision: the half-open box `[x0, x1) x [y0, y1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl Cell {
    pub fn new(x0: usize, y0: usize, x1: usize, y1: usize) -> Self {
        Cell { x0, y0, x1, y1 }
    }
}

/// A way a cell list can fail to be a subdivision.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InvalidSubdivision {
    #[error("a subdivision needs at least one cell")]
    Empty,
    #[error("cell {0:?} has an empty extent")]
    DegenerateCell(Cell),
    #[error("cells overlap at unit ({x}, {y})")]
    Overlap { x: usize, y: usize },
    #[error("no cell covers unit ({x}, {y})")]
    Gap { x: usize, y: usize },
}

/// A rank-normalized subdivision of a rectangle.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subdivision {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
}

/// The direction of a full-length cut: a horizontal cut is a horizontal
/// line splitting top from bottom, a vertical cut splits left from right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutDirection {
    Horizontal,
    Vertical,
}

/// The canonical guillotine decomposition of an allowable subdivision.
///
/// Each node slices along all full-length cuts of one direction at once,
/// horizontal preferred, so the children of a node never admit a cut in
/// their parent's direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CutTree {
    /// A single cell, in the coordinates of the original subdivision.
    Leaf(Cell),
    Node {
        direction: CutDirection,
        /// In ascending coordinate order; extents concatenate to the parent's.
        children: Vec<CutTree>,
    },
}

type Rect = (usize, usize, usize, usize); // x0, y0, x1, y1

impl Subdivision {
    /// Normalize and validate a cell list into a subdivision.
    pub fn new(cells: impl IntoIterator<Item = Cell>) -> Result<Self, InvalidSubdivision> {
        let mut cells: Vec<Cell> = cells.into_iter().collect();
        if cells.is_empty() {
            return Err(InvalidSubdivision::Empty);
        }
        for c in &cells {
            if c.x0 >= c.x1 || c.y0 >= c.y1 {
                return Err(InvalidSubdivision::DegenerateCell(*c));
            }
        }
        // Rank normalization: compress each axis to consecutive integers.
        let xs: BTreeSet<usize> = cells.iter().flat_map(|c| [c.x0, c.x1]).collect();
        let ys: BTreeSet<usize> = cells.iter().flat_map(|c| [c.y0, c.y1]).collect();
        let xr: BTreeMap<usize, usize> = xs.iter().enumerate().map(|(i, x)| (*x, i)).collect();
        let yr: BTreeMap<usize, usize> = ys.iter().enumerate().map(|(i, y)| (*y, i)).collect();
        for c in &mut cells {
            *c = Cell::new(xr[&c.x0], yr[&c.y0], xr[&c.x1], yr[&c.y1]);
        }
        let width = xs.len() - 1;
        let height = ys.len() - 1;
        // Exact tiling: every unit of the rectangle covered exactly once.
        let mut covered = vec![false; width * height];
        for c in &cells {
            for y in c.y0..c.y1 {
                for x in c.x0..c.x1 {
                    if x >= width || y >= height {
                        return Err(InvalidSubdivision::Gap { x, y });
                    }
                    if covered[y * width + x] {
                        return Err(InvalidSubdivision::Overlap { x, y });
                    }
                    covered[y * width + x] = true;
                }
            }
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(InvalidSubdivision::Gap { x: i % width, y: i / width });
        }
        cells.sort();
        Ok(Subdivision { width, height, cells })
    }

    /// The one-cell subdivision.
    pub fn trivial() -> Self {
        Subdivision { width: 1, height: 1, cells: vec![Cell::new(0, 0, 1, 1)] }
    }

    /// A regular grid of `cols` columns and `rows` rows of unit cells.
    pub fn grid(cols: usize, rows: usize) -> Self {
        let cells = (0..rows)
            .flat_map(|y| (0..cols).map(move |x| Cell::new(x, y, x + 1, y + 1)))
            .collect();
        Subdivision { width: cols, height: rows, cells }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter()
    }

    fn full_rect(&self) -> Rect {
        (0, 0, self.width, self.height)
    }

    fn cells_in(&self, r: Rect) -> impl Iterator<Item = &Cell> {
        let (x0, y0, x1, y1) = r;
        self.cells
            .iter()
            .filter(move |c| c.x0 >= x0 && c.x1 <= x1 && c.y0 >= y0 && c.y1 <= y1)
    }

    fn hor_cuts_in(&self, r: Rect) -> Vec<usize> {
        let (_, y0, _, y1) = r;
        (y0 + 1..y1)
            .filter(|y| self.cells_in(r).all(|c| !(c.y0 < *y && *y < c.y1)))
            .collect()
    }

    fn ver_cuts_in(&self, r: Rect) -> Vec<usize> {
        let (x0, _, x1, _) = r;
        (x0 + 1..x1)
            .filter(|x| self.cells_in(r).all(|c| !(c.x0 < *x && *x < c.x1)))
            .collect()
    }

    /// Full-length cuts of the whole rectangle: `(horizontal ys, vertical xs)`.
    pub fn full_cuts(&self) -> (Vec<usize>, Vec<usize>) {
        let r = self.full_rect();
        (self.hor_cuts_in(r), self.ver_cuts_in(r))
    }

    /// Split along the horizontal line `y` into top and bottom, each
    /// renormalized. `None` when the line crosses a cell.
    pub fn split_horizontal(&self, y: usize) -> Option<(Subdivision, Subdivision)> {
        if y == 0 || y >= self.height || self.cells.iter().any(|c| c.y0 < y && y < c.y1) {
            return None;
        }
        let top = self.cells.iter().filter(|c| c.y1 <= y).copied();
        let bottom = self.cells.iter().filter(|c| c.y0 >= y).copied();
        Some((Subdivision::new(top).ok()?, Subdivision::new(bottom).ok()?))
    }

    /// Mirror along the diagonal: columns become rows.
    pub fn transpose(&self) -> Subdivision {
        let cells = self.cells.iter().map(|c| Cell::new(c.y0, c.x0, c.y1, c.x1));
        Subdivision::new(cells).expect("transpose of a subdivision tiles")
    }

    /// Split along the vertical line `x` into left and right.
    pub fn split_vertical(&self, x: usize) -> Option<(Subdivision, Subdivision)> {
        if x == 0 || x >= self.width || self.cells.iter().any(|c| c.x0 < x && x < c.x1) {
            return None;
        }
        let left = self.cells.iter().filter(|c| c.x1 <= x).copied();
        let right = self.cells.iter().filter(|c| c.x0 >= x).copied();
        Some((Subdivision::new(left).ok()?, Subdivision::new(right).ok()?))
    }

    /// Is this subdivision a single cell or splittable along some full cut
    /// into two allowable parts?
    pub fn is_allowable(&self) -> bool {
        let mut memo = BTreeMap::new();
        self.allowable_rect(self.full_rect(), &mut memo)
    }

    fn allowable_rect(&self, r: Rect, memo: &mut BTreeMap<Rect, bool>) -> bool {
        if let Some(&known) = memo.get(&r) {
            return known;
        }
        let single = self.cells_in(r).count() == 1;
        let ok = single
            || self
                .hor_cuts_in(r)
                .iter()
                .any(|&y| {
                    self.allowable_rect((r.0, r.1, r.2, y), memo)
                        && self.allowable_rect((r.0, y, r.2, r.3), memo)
                })
            || self
                .ver_cuts_in(r)
                .iter()
                .any(|&x| {
                    self.allowable_rect((r.0, r.1, x, r.3), memo)
                        && self.allowable_rect((x, r.1, r.2, r.3), memo)
                });
        memo.insert(r, ok);
        ok
    }

    /// The canonical cut tree, or an error when not allowable.
    pub fn cut_tree(&self) -> Result<CutTree, NotAllowable> {
        self.cut_tree_rect(self.full_rect())
    }

    fn cut_tree_rect(&self, r: Rect) -> Result<CutTree, NotAllowable> {
        let mut inside = self.cells_in(r);
        if let (Some(cell), None) = (inside.next(), inside.next()) {
            return Ok(CutTree::Leaf(*cell));
        }
        let (x0, y0, x1, y1) = r;
        let hor = self.hor_cuts_in(r);
        if !hor.is_empty() {
            let mut bounds = vec![y0];
            bounds.extend(hor);
            bounds.push(y1);
            let children = bounds
                .windows(2)
                .map(|w| self.cut_tree_rect((x0, w[0], x1, w[1])))
                .collect::<Result<_, _>>()?;
            return Ok(CutTree::Node { direction: CutDirection::Horizontal, children });
        }
        let ver = self.ver_cuts_in(r);
        if !ver.is_empty() {
            let mut bounds = vec![x0];
            bounds.extend(ver);
            bounds.push(x1);
            let children = bounds
                .windows(2)
                .map(|w| self.cut_tree_rect((w[0], y0, w[1], y1)))
                .collect::<Result<_, _>>()?;
            return Ok(CutTree::Node { direction: CutDirection::Vertical, children });
        }
        Err(NotAllowable)
    }

    /// All cell corners.
    pub fn vertices(&self) -> BTreeSet<(usize, usize)> {
        self.cells
            .iter()
            .flat_map(|c| [(c.x0, c.y0), (c.x1, c.y0), (c.x0, c.y1), (c.x1, c.y1)])
            .collect()
    }

    /// The four sides of a cell, each split at the vertices lying on it.
    pub fn side_segments(&self, cell: &Cell) -> CellSides {
        let vs = self.vertices();
        let hsegs = |y: usize| -> Vec<HSeg> {
            let mut stops: Vec<usize> = (cell.x0..=cell.x1)
                .filter(|&x| x == cell.x0 || x == cell.x1 || vs.contains(&(x, y)))
                .collect();
            stops.dedup();
            stops
                .windows(2)
                .map(|w| HSeg { y, x0: w[0], x1: w[1] })
                .collect()
        };
        let vsegs = |x: usize| -> Vec<VSeg> {
            let mut stops: Vec<usize> = (cell.y0..=cell.y1)
                .filter(|&y| y == cell.y0 || y == cell.y1 || vs.contains(&(x, y)))
                .collect();
            stops.dedup();
            stops
                .windows(2)
                .map(|w| VSeg { x, y0: w[0], y1: w[1] })
                .collect()
        };
        CellSides {
            top: hsegs(cell.y0),
            bottom: hsegs(cell.y1),
            left: vsegs(cell.x0),
            right: vsegs(cell.x1),
        }
    }

    /// Every horizontal segment of the subdivision.
    pub fn hor_segments(&self) -> BTreeSet<HSeg> {
        self.cells
            .iter()
            .flat_map(|c| {
                let s = self.side_segments(c);
                s.top.into_iter().chain(s.bottom)
            })
            .collect()
    }

    /// Every vertical segment of the subdivision.
    pub fn ver_segments(&self) -> BTreeSet<VSeg> {
        self.cells
            .iter()
            .flat_map(|c| {
                let s = self.side_segments(c);
                s.left.into_iter().chain(s.right)
            })
            .collect()
    }
}

/// The subdivision is not allowable: no guillotine decomposition exists.
#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
#[error("subdivision is not allowable")]
pub struct NotAllowable;

/// A horizontal segment at height `y` from `x0` to `x1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HSeg {
    pub y: usize,
    pub x0: usize,
    pub x1: usize,
}

/// A vertical segment at `x` from `y0` down to `y1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VSeg {
    pub x: usize,
    pub y0: usize,
    pub y1: usize,
}

/// The sides of one cell, split into segments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellSides {
    pub top: Vec<HSeg>,
    pub bottom: Vec<HSeg>,
    pub left: Vec<VSeg>,
    pub right: Vec<VSeg>,
}

/// A compatibility failure of a labeled arrangement.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InvalidArrangement {
    #[error("vertex ({x}, {y}) is unlabeled")]
    MissingVertexLabel { x: usize, y: usize },
    #[error("segment label domain does not match the segments of the subdivision")]
    LabelDomainMismatch,
    #[error("label {id} is not in the ambient structure")]
    UnknownLabel { id: String },
    #[error("segment label endpoints disagree with the vertex labels")]
    SegmentEndpoints,
    #[error("cell {cell:?} has no square label")]
    MissingCellLabel { cell: Cell },
    #[error("cell {cell:?}: side composite differs from the square boundary")]
    CellBoundary { cell: Cell },
}

/// A subdivision labeled in a double derivation scheme or double category:
/// objects on vertices, morphisms on segments, squares on cells.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arrangement {
    pub subdivision: Subdivision,
    pub vertex_labels: BTreeMap<(usize, usize), ObId>,
    pub hor_labels: BTreeMap<HSeg, MorId>,
    pub ver_labels: BTreeMap<VSeg, MorId>,
    pub cell_labels: BTreeMap<Cell, SqId>,
}

/// A composition failure.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ComposeError {
    #[error(transparent)]
    NotAllowable(#[from] NotAllowable),
    #[error("arrangement is not compatible: {0:?}")]
    NotCompatible(Vec<InvalidArrangement>),
    #[error("no table entry composing {first} and {second}")]
    MissingComposite { first: SqId, second: SqId },
}

impl Arrangement {
    /// The one-cell arrangement for a square of the given scheme.
    pub fn single(scheme: &DoubleDerivationScheme, sq: &SqId) -> Option<Arrangement> {
        let b = scheme.squares.get(sq)?;
        let tl = scheme.hor_cat.src(&b.top)?.clone();
        let tr = scheme.hor_cat.tgt(&b.top)?.clone();
        let bl = scheme.hor_cat.src(&b.bottom)?.clone();
        let br = scheme.hor_cat.tgt(&b.bottom)?.clone();
        let cell = Cell::new(0, 0, 1, 1);
        Some(Arrangement {
            subdivision: Subdivision::trivial(),
            vertex_labels: [((0, 0), tl), ((1, 0), tr), ((0, 1), bl), ((1, 1), br)].into(),
            hor_labels: [
                (HSeg { y: 0, x0: 0, x1: 1 }, b.top.clone()),
                (HSeg { y: 1, x0: 0, x1: 1 }, b.bottom.clone()),
            ]
            .into(),
            ver_labels: [
                (VSeg { x: 0, y0: 0, y1: 1 }, b.left.clone()),
                (VSeg { x: 1, y0: 0, y1: 1 }, b.right.clone()),
            ]
            .into(),
            cell_labels: [(cell, sq.clone())].into(),
        })
    }

    /// Check the compatibility clauses against a scheme: labels exist, the
    /// label domains match the subdivision, segment labels run between their
    /// endpoint objects, and each cell's side composites equal its square's
    /// boundary.
    pub fn validate(&self, scheme: &DoubleDerivationScheme) -> Result<(), Vec<InvalidArrangement>> {
        let mut errs = Vec::new();
        let sub = &self.subdivision;
        let vertices = sub.vertices();
        for &(x, y) in &vertices {
            match self.vertex_labels.get(&(x, y)) {
                None => errs.push(InvalidArrangement::MissingVertexLabel { x, y }),
                Some(ob) => {
                    if !scheme.hor_cat.has_object(ob) {
                        errs.push(InvalidArrangement::UnknownLabel { id: ob.to_string() });
                    }
                }
            }
        }
        if self.vertex_labels.len() != vertices.len()
            || self.hor_labels.keys().ne(sub.hor_segments().iter())
            || self.ver_labels.keys().ne(sub.ver_segments().iter())
        {
            errs.push(InvalidArrangement::LabelDomainMismatch);
        }
        for (seg, m) in &self.hor_labels {
            if !scheme.hor_cat.has_morphism(m) {
                errs.push(InvalidArrangement::UnknownLabel { id: m.to_string() });
                continue;
            }
            let ok = scheme.hor_cat.src(m) == self.vertex_labels.get(&(seg.x0, seg.y))
                && scheme.hor_cat.tgt(m) == self.vertex_labels.get(&(seg.x1, seg.y));
            if !ok {
                errs.push(InvalidArrangement::SegmentEndpoints);
            }
        }
        for (seg, m) in &self.ver_labels {
            if !scheme.ver_cat.has_morphism(m) {
                errs.push(InvalidArrangement::UnknownLabel { id: m.to_string() });
                continue;
            }
            let ok = scheme.ver_cat.src(m) == self.vertex_labels.get(&(seg.x, seg.y0))
                && scheme.ver_cat.tgt(m) == self.vertex_labels.get(&(seg.x, seg.y1));
            if !ok {
                errs.push(InvalidArrangement::SegmentEndpoints);
            }
        }
        for cell in sub.cells() {
            let Some(sq) = self.cell_labels.get(cell) else {
                errs.push(InvalidArrangement::MissingCellLabel { cell: *cell });
                continue;
            };
            let Some(b) = scheme.squares.get(sq) else {
                errs.push(InvalidArrangement::UnknownLabel { id: sq.to_string() });
                continue;
            };
            let sides = sub.side_segments(cell);
            let top = self.hor_path(&sides.top);
            let bottom = self.hor_path(&sides.bottom);
            let left = self.ver_path(&sides.left);
            let right = self.ver_path(&sides.right);
            let ok = top.as_deref().and_then(|p| scheme.hor_cat.then_path(p)) == Some(b.top.clone())
                && bottom.as_deref().and_then(|p| scheme.hor_cat.then_path(p))
                    == Some(b.bottom.clone())
                && left.as_deref().and_then(|p| scheme.ver_cat.then_path(p))
                    == Some(b.left.clone())
                && right.as_deref().and_then(|p| scheme.ver_cat.then_path(p))
                    == Some(b.right.clone());
            if !ok {
                errs.push(InvalidArrangement::CellBoundary { cell: *cell });
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    fn hor_path(&self, segs: &[HSeg]) -> Option<Vec<MorId>> {
        segs.iter().map(|s| self.hor_labels.get(s).cloned()).collect()
    }

    fn ver_path(&self, segs: &[VSeg]) -> Option<Vec<MorId>> {
        segs.iter().map(|s| self.ver_labels.get(s).cloned()).collect()
    }

    /// The outer boundary of the whole arrangement, as composites.
    pub fn boundary(&self, scheme: &DoubleDerivationScheme) -> Option<crate::core::SquareBoundary> {
        let sub = &self.subdivision;
        let vs = sub.vertices();
        let line_hsegs = |y: usize| -> Vec<HSeg> {
            let stops: Vec<usize> = (0..=sub.width())
                .filter(|&x| x == 0 || x == sub.width() || vs.contains(&(x, y)))
                .collect();
            stops.windows(2).map(|w| HSeg { y, x0: w[0], x1: w[1] }).collect()
        };
        let line_vsegs = |x: usize| -> Vec<VSeg> {
            let stops: Vec<usize> = (0..=sub.height())
                .filter(|&y| y == 0 || y == sub.height() || vs.contains(&(x, y)))
                .collect();
            stops.windows(2).map(|w| VSeg { x, y0: w[0], y1: w[1] }).collect()
        };
        Some(crate::core::SquareBoundary {
            top: scheme.hor_cat.then_path(&self.hor_path(&line_hsegs(0))?)?,
            bottom: scheme.hor_cat.then_path(&self.hor_path(&line_hsegs(sub.height()))?)?,
            left: scheme.ver_cat.then_path(&self.ver_path(&line_vsegs(0))?)?,
            right: scheme.ver_cat.then_path(&self.ver_path(&line_vsegs(sub.width()))?)?,
        })
    }

    /// Mirror along the diagonal. The result is labeled in the transposed
    /// scheme: horizontal labels become vertical and vice versa.
    pub fn transpose(&self) -> Arrangement {
        Arrangement {
            subdivision: self.subdivision.transpose(),
            vertex_labels: self
                .vertex_labels
                .iter()
                .map(|(&(x, y), ob)| ((y, x), ob.clone()))
                .collect(),
            hor_labels: self
                .ver_labels
                .iter()
                .map(|(s, m)| (HSeg { y: s.x, x0: s.y0, x1: s.y1 }, m.clone()))
                .collect(),
            ver_labels: self
                .hor_labels
                .iter()
                .map(|(s, m)| (VSeg { x: s.y, y0: s.x0, y1: s.x1 }, m.clone()))
                .collect(),
            cell_labels: self
                .cell_labels
                .iter()
                .map(|(c, sq)| (Cell::new(c.y0, c.x0, c.y1, c.x1), sq.clone()))
                .collect(),
        }
    }

    /// Compose the arrangement in a double category by folding the canonical
    /// cut tree. Any two composites agree, so the choice of tree is
    /// immaterial; see [`Arrangement::compose_all_ways`] for the check.
    pub fn compose(&self, d: &DoubleCategory) -> Result<SqId, ComposeError> {
        self.validate(&d.as_scheme()).map_err(ComposeError::NotCompatible)?;
        let tree = self.subdivision.cut_tree()?;
        self.fold(d, &tree)
    }

    fn fold(&self, d: &DoubleCategory, tree: &CutTree) -> Result<SqId, ComposeError> {
        match tree {
            CutTree::Leaf(cell) => self
                .cell_labels
                .get(cell)
                .cloned()
                .ok_or(ComposeError::NotCompatible(vec![
                    InvalidArrangement::MissingCellLabel { cell: *cell },
                ])),
            CutTree::Node { direction, children } => {
                let mut folded = children.iter().map(|c| self.fold(d, c));
                let mut acc = folded.next().expect("nodes have at least two children")?;
                for next in folded {
                    let next = next?;
                    let entry = match direction {
                        CutDirection::Horizontal => d.stack(&acc, &next),
                        CutDirection::Vertical => d.beside(&acc, &next),
                    };
                    acc = entry
                        .cloned()
                        .ok_or(ComposeError::MissingComposite { first: acc, second: next })?;
                }
                Ok(acc)
            }
        }
    }

    /// Fold along every guillotine decomposition, not only the canonical
    /// one, and return the set of results. A singleton certifies that the
    /// composite does not depend on the cut tree.
    pub fn compose_all_ways(&self, d: &DoubleCategory) -> Result<BTreeSet<SqId>, ComposeError> {
        self.validate(&d.as_scheme()).map_err(ComposeError::NotCompatible)?;
        let mut memo = BTreeMap::new();
        self.all_ways_rect(d, self.subdivision.full_rect(), &mut memo)
    }

    fn all_ways_rect(
        &self,
        d: &DoubleCategory,
        r: Rect,
        memo: &mut BTreeMap<Rect, BTreeSet<SqId>>,
    ) -> Result<BTreeSet<SqId>, ComposeError> {
        if let Some(known) = memo.get(&r) {
            return Ok(known.clone());
        }
        let sub = &self.subdivision;
        let mut results = BTreeSet::new();
        let mut inside = sub.cells_in(r);
        if let (Some(cell), None) = (inside.next(), inside.next()) {
            let sq = self.cell_labels.get(cell).cloned().ok_or(
                ComposeError::NotCompatible(vec![InvalidArrangement::MissingCellLabel {
                    cell: *cell,
                }]),
            )?;
            results.insert(sq);
            memo.insert(r, results.clone());
            return Ok(results);
        }
        for y in sub.hor_cuts_in(r) {
            let tops = self.all_ways_rect(d, (r.0, r.1, r.2, y), memo)?;
            let bottoms = self.all_ways_rect(d, (r.0, y, r.2, r.3), memo)?;
            for a in &tops {
                for b in &bottoms {
                    let c = d.stack(a, b).cloned().ok_or(ComposeError::MissingComposite {
                        first: a.clone(),
                        second: b.clone(),
                    })?;
                    results.insert(c);
                }
            }
        }
        for x in sub.ver_cuts_in(r) {
            let lefts = self.all_ways_rect(d, (r.0, r.1, x, r.3), memo)?;
            let rights = self.all_ways_rect(d, (x, r.1, r.2, r.3), memo)?;
            for a in &lefts {
                for b in &rights {
                    let c = d.beside(a, b).cloned().ok_or(ComposeError::MissingComposite {
                        first: a.clone(),
                        second: b.clone(),
                    })?;
                    results.insert(c);
                }
            }
        }
        if results.is_empty() {
            return Err(NotAllowable.into());
        }
        memo.insert(r, results.clone());
        Ok(results)
    }
}

/// The five-cell pinwheel: four cells around a center, no full-length cut.
pub fn pinwheel() -> Subdivision {
    Subdivision::new([
        Cell::new(0, 0, 2, 1),
        Cell::new(2, 0, 3, 2),
        Cell::new(0, 1, 1, 3),
        Cell::new(1, 2, 3, 3),
        Cell::new(1, 1, 2, 2),
    ])
    .expect("pinwheel cells tile the square")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{ops, FinCategory};

    #[test]
    fn normalization_collapses_unused_ranks() {
        let scaled = Subdivision::new([Cell::new(0, 0, 2, 4), Cell::new(2, 0, 6, 4)]).unwrap();
        assert_eq!(scaled, Subdivision::grid(2, 1));
        assert_eq!(scaled.width(), 2);
        assert_eq!(scaled.height(), 1);
    }

    #[test]
    fn tiling_defects_are_rejected() {
        let overlap = Subdivision::new([Cell::new(0, 0, 2, 1), Cell::new(1, 0, 3, 1)]);
        assert!(matches!(overlap, Err(InvalidSubdivision::Overlap { .. })));
        let gap = Subdivision::new([Cell::new(0, 0, 1, 2), Cell::new(1, 0, 2, 1)]);
        assert!(matches!(gap, Err(InvalidSubdivision::Gap { .. })));
    }

    #[test]
    fn grids_are_allowable_pinwheel_is_not() {
        assert!(Subdivision::trivial().is_allowable());
        assert!(Subdivision::grid(2, 2).is_allowable());
        assert!(Subdivision::grid(3, 3).is_allowable());
        assert!(!pinwheel().is_allowable());
        assert_eq!(pinwheel().cut_tree(), Err(NotAllowable));
    }

    #[test]
    fn canonical_tree_prefers_horizontal_and_slices_all_cuts() {
        let tree = Subdivision::grid(2, 3).cut_tree().unwrap();
        let CutTree::Node { direction, children } = tree else {
            panic!("grid should not be a leaf");
        };
        assert_eq!(direction, CutDirection::Horizontal);
        assert_eq!(children.len(), 3);
        for child in children {
            let CutTree::Node { direction, children } = child else {
                panic!("bands should split vertically");
            };
            assert_eq!(direction, CutDirection::Vertical);
            assert_eq!(children.len(), 2);
            assert!(children.iter().all(|c| matches!(c, CutTree::Leaf(_))));
        }
    }

    #[test]
    fn any_cut_of_allowable_yields_allowable_halves() {
        let sub = Subdivision::new([
            Cell::new(0, 0, 1, 1),
            Cell::new(1, 0, 2, 1),
            Cell::new(0, 1, 2, 2),
            Cell::new(2, 0, 3, 2),
        ])
        .unwrap();
        assert!(sub.is_allowable());
        let (hor, ver) = sub.full_cuts();
        assert!(!hor.is_empty() || !ver.is_empty());
        for y in hor {
            let (a, b) = sub.split_horizontal(y).unwrap();
            assert!(a.is_allowable() && b.is_allowable());
        }
        for x in ver {
            let (a, b) = sub.split_vertical(x).unwrap();
            assert!(a.is_allowable() && b.is_allowable());
        }
    }

    #[test]
    fn segments_split_at_foreign_vertices() {
        // A 2-cell top row over one wide bottom cell: the bottom cell's top
        // side splits at the vertex between the two top cells.
        let sub = Subdivision::new([
            Cell::new(0, 0, 1, 1),
            Cell::new(1, 0, 2, 1),
            Cell::new(0, 1, 2, 2),
        ])
        .unwrap();
        let bottom = Cell::new(0, 1, 2, 2);
        let sides = sub.side_segments(&bottom);
        assert_eq!(
            sides.top,
            vec![HSeg { y: 1, x0: 0, x1: 1 }, HSeg { y: 1, x0: 1, x1: 2 }]
        );
        assert_eq!(sides.bottom, vec![HSeg { y: 2, x0: 0, x1: 2 }]);
    }

    /// Label a grid arrangement in the commutative-squares double category
    /// of a product poset, with vertex `(x, y)` at object `(x, y)`.
    fn poset_grid_arrangement(cols: usize, rows: usize) -> (DoubleCategory, Arrangement) {
        let p = FinCategory::ordinal(cols).product(&FinCategory::ordinal(rows));
        let d = ops::commutative_squares(&p);
        let sub = Subdivision::grid(cols, rows);
        let ob = |x: usize, y: usize| ObId(format!("({x},{y})"));
        let hor = |x0: usize, x1: usize, y: usize| MorId(format!("({x0}<={x1},{y}<={y})"));
        let ver = |x: usize, y0: usize, y1: usize| MorId(format!("({x}<={x},{y0}<={y1})"));
        let vertex_labels = sub.vertices().into_iter().map(|(x, y)| ((x, y), ob(x, y))).collect();
        let hor_labels = sub
            .hor_segments()
            .into_iter()
            .map(|s| (s, hor(s.x0, s.x1, s.y)))
            .collect();
        let ver_labels = sub
            .ver_segments()
            .into_iter()
            .map(|s| (s, ver(s.x, s.y0, s.y1)))
            .collect();
        let cell_labels = sub
            .cells()
            .map(|c| {
                let b = crate::core::SquareBoundary {
                    top: hor(c.x0, c.x1, c.y0),
                    bottom: hor(c.x0, c.x1, c.y1),
                    left: ver(c.x0, c.y0, c.y1),
                    right: ver(c.x1, c.y0, c.y1),
                };
                let sq = d
                    .squares()
                    .find(|(_, bd)| **bd == b)
                    .map(|(s, _)| s.clone())
                    .expect("commuting square exists");
                (*c, sq)
            })
            .collect();
        let arr = Arrangement {
            subdivision: sub,
            vertex_labels,
            hor_labels,
            ver_labels,
            cell_labels,
        };
        (d, arr)
    }

    #[test]
    fn composing_a_grid_of_commutative_squares() {
        let (d, arr) = poset_grid_arrangement(2, 2);
        assert_eq!(arr.validate(&d.as_scheme()), Ok(()));
        let sq = arr.compose(&d).unwrap();
        let b = d.boundary(&sq).unwrap();
        // The composite's boundary is the outer rectangle of the poset grid.
        assert_eq!(*b, arr.boundary(&d.as_scheme()).unwrap());
        let all = arr.compose_all_ways(&d).unwrap();
        assert_eq!(all.len(), 1);
        assert!(all.contains(&sq));
    }

    #[test]
    fn identity_morphism_ids_compose_along_segments() {
        let (d, arr) = poset_grid_arrangement(1, 2);
        let sq = arr.compose(&d).unwrap();
        let b = d.boundary(&sq).unwrap();
        assert_eq!(b.left, MorId("(0<=0,0<=2)".into()));
        assert_eq!(b.top, MorId("(0<=1,0<=0)".into()));
    }

    #[test]
    fn incompatible_labels_are_reported() {
        let (d, mut arr) = poset_grid_arrangement(2, 1);
        let cell = Cell::new(0, 0, 1, 1);
        let wrong = d.sq_ids().find(|s| arr.cell_labels.get(&cell) != Some(s)).unwrap().clone();
        arr.cell_labels.insert(cell, wrong);
        let errs = arr.validate(&d.as_scheme()).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, InvalidArrangement::CellBoundary { .. })));
        assert!(matches!(arr.compose(&d), Err(ComposeError::NotCompatible(_))));
    }
}
