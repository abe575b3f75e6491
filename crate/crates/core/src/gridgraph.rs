//! Grid patterns as bipartite graphs.
//!
//! A cell `(i, j)` of the `m x n` grid is the edge between left vertex `i` and
//! right vertex `j`. Cells are 0-based in memory and 1-based in every
//! serialized or displayed form.

use std::collections::VecDeque;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Default cap on the number of spanning trees an enumeration may produce.
pub const DEFAULT_TREE_CAP: u128 = 10_000_000;

/// Largest grid (in cells) the bitmask-based enumerators accept.
pub const MAX_ENUM_CELLS: usize = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("cell {cell} is outside the {m}x{n} grid")]
    OutOfRange { cell: Cell, m: usize, n: usize },
    #[error("grid dimensions must be positive, got {m}x{n}")]
    EmptyGrid { m: usize, n: usize },
    #[error("{count} spanning trees exceed the cap of {cap}")]
    TooManyTrees { count: String, cap: u128 },
    #[error("grids with more than {MAX_ENUM_CELLS} cells cannot be enumerated")]
    GridTooLarge,
    #[error("pattern is not acyclic")]
    NotAcyclic,
    #[error("pattern is not a spanning tree")]
    NotSpanningTree,
    #[error("cell {0} already belongs to the tree")]
    EdgeInTree(Cell),
    #[error("endpoints of {0} are not connected in the tree")]
    NotConnected(Cell),
    #[error("invalid cycle: {0}")]
    BadCycle(String),
    #[error("extra edges must be distinct")]
    DuplicateExtra,
    #[error("the tight family needs n >= m + h (m={m}, n={n}, h={h})")]
    TightFamily { m: usize, n: usize, h: usize },
}

/// A grid cell, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Cell {
        Cell { row, col }
    }

    /// Builds a cell from 1-based coordinates.
    pub fn one_based(i: usize, j: usize) -> Cell {
        assert!(i >= 1 && j >= 1, "1-based coordinates start at 1");
        Cell::new(i - 1, j - 1)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row + 1, self.col + 1)
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.row + 1, self.col + 1].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [i, j] = <[usize; 2]>::deserialize(d)?;
        if i == 0 || j == 0 {
            return Err(serde::de::Error::custom("cell coordinates are 1-based"));
        }
        Ok(Cell::new(i - 1, j - 1))
    }
}

/// A set of cells of the `m x n` grid.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    m: usize,
    n: usize,
    cells: Vec<Cell>,
}

impl Pattern {
    pub fn new(m: usize, n: usize, cells: impl IntoIterator<Item = Cell>) -> Result<Pattern, GraphError> {
        if m == 0 || n == 0 {
            return Err(GraphError::EmptyGrid { m, n });
        }
        let mut cells: Vec<Cell> = cells.into_iter().collect();
        if let Some(&cell) = cells.iter().find(|c| c.row >= m || c.col >= n) {
            return Err(GraphError::OutOfRange { cell, m, n });
        }
        cells.sort_unstable();
        cells.dedup();
        Ok(Pattern { m, n, cells })
    }

    pub fn empty(m: usize, n: usize) -> Pattern {
        Pattern { m, n, cells: Vec::new() }
    }

    pub fn full(m: usize, n: usize) -> Pattern {
        Pattern {
            m,
            n,
            cells: all_cells(m, n).collect(),
        }
    }

    /// Pattern whose cell `k` (row-major) is present when bit `k` is set.
    pub fn from_mask(m: usize, n: usize, mask: u128) -> Pattern {
        debug_assert!(m * n <= MAX_ENUM_CELLS);
        let cells = (0..m * n)
            .filter(|&k| mask >> k & 1 == 1)
            .map(|k| Cell::new(k / n, k % n))
            .collect();
        Pattern { m, n, cells }
    }

    /// Row-major bitmask; `None` when the grid has more than 128 cells.
    pub fn mask(&self) -> Option<u128> {
        (self.m * self.n <= MAX_ENUM_CELLS)
            .then(|| self.cells.iter().fold(0u128, |acc, c| acc | 1 << (c.row * self.n + c.col)))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.cells.binary_search(&cell).is_ok()
    }

    pub fn with_cells(&self, extra: impl IntoIterator<Item = Cell>) -> Result<Pattern, GraphError> {
        Pattern::new(self.m, self.n, self.cells.iter().copied().chain(extra))
    }

    pub fn union(&self, other: &Pattern) -> Result<Pattern, GraphError> {
        self.with_cells(other.cells.iter().copied())
    }

    /// Number of vertices touched by at least one cell.
    pub fn vertex_count(&self) -> usize {
        let mut seen = vec![false; self.m + self.n];
        for c in &self.cells {
            seen[c.row] = true;
            seen[self.m + c.col] = true;
        }
        seen.iter().filter(|&&s| s).count()
    }

    /// Connected components among touched vertices.
    pub fn component_count(&self) -> usize {
        let mut dsu = Dsu::new(self.m + self.n);
        let mut touched = vec![false; self.m + self.n];
        for c in &self.cells {
            dsu.union(c.row, self.m + c.col);
            touched[c.row] = true;
            touched[self.m + c.col] = true;
        }
        (0..self.m + self.n)
            .filter(|&v| touched[v] && dsu.find(v) == v)
            .count()
    }

    /// `|E| - |V(E)| + c(E)`: the number of edges that must be removed to make
    /// the pattern acyclic.
    pub fn circuit_rank(&self) -> usize {
        self.len() + self.component_count() - self.vertex_count()
    }

    pub fn is_acyclic(&self) -> bool {
        self.circuit_rank() == 0
    }

    /// True when the pattern becomes acyclic after deleting at most `h` cells.
    pub fn is_regular(&self, h: usize) -> bool {
        self.circuit_rank() <= h
    }

    /// Acyclic, touching all `m + n` vertices.
    pub fn is_spanning_tree(&self) -> bool {
        self.len() + 1 == self.m + self.n && self.is_acyclic() && self.vertex_count() == self.m + self.n
    }

    /// A maximal acyclic subset, greedily in cell order.
    pub fn spanning_forest(&self) -> Pattern {
        let mut dsu = Dsu::new(self.m + self.n);
        let cells = self
            .cells
            .iter()
            .copied()
            .filter(|c| dsu.union(c.row, self.m + c.col))
            .collect();
        Pattern { m: self.m, n: self.n, cells }
    }

    /// Path of cells between a left and a right vertex inside this pattern,
    /// starting at `row` and ending at `col`.
    fn path(&self, row: usize, col: usize) -> Option<Vec<Cell>> {
        let nv = self.m + self.n;
        let mut adj: Vec<Vec<(usize, Cell)>> = vec![Vec::new(); nv];
        for &c in &self.cells {
            adj[c.row].push((self.m + c.col, c));
            adj[self.m + c.col].push((c.row, c));
        }
        let target = self.m + col;
        let mut prev: Vec<Option<(usize, Cell)>> = vec![None; nv];
        let mut seen = vec![false; nv];
        let mut queue = VecDeque::from([row]);
        seen[row] = true;
        while let Some(v) = queue.pop_front() {
            if v == target {
                break;
            }
            for &(w, c) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    prev[w] = Some((v, c));
                    queue.push_back(w);
                }
            }
        }
        if !seen[target] {
            return None;
        }
        let mut path = Vec::new();
        let mut v = target;
        while let Some((u, c)) = prev[v] {
            path.push(c);
            v = u;
        }
        path.reverse();
        Some(path)
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.cells.serialize(s)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, c) in self.cells.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

pub fn all_cells(m: usize, n: usize) -> impl Iterator<Item = Cell> {
    (0..m).flat_map(move |i| (0..n).map(move |j| Cell::new(i, j)))
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Returns false when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// An oriented simple cycle
/// `(i_1,j_1), (i_2,j_1), (i_2,j_2), ..., (i_k,j_k), (i_1,j_k)`.
///
/// Cells at even offsets (0-based) carry a `+` sign, the others `-`. The
/// stored orientation is canonical: the first cell is the smallest cell of the
/// cycle and the second one shares its column.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleRep {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl CycleRep {
    /// Builds the cycle with row sequence `rows` and column sequence `cols`,
    /// then canonicalizes its orientation.
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<CycleRep, GraphError> {
        let k = rows.len();
        if k < 2 || cols.len() != k {
            return Err(GraphError::BadCycle(format!(
                "needs k >= 2 rows and as many columns, got {} and {}",
                rows.len(),
                cols.len()
            )));
        }
        if has_duplicates(&rows) || has_duplicates(&cols) {
            return Err(GraphError::BadCycle("rows and columns must be pairwise distinct".into()));
        }
        let raw = CycleRep { rows, cols };
        CycleRep::from_cyclic_cells(&raw.cells())
    }

    /// Canonicalizes a closed walk given as consecutive cells, where
    /// neighbours alternately share a column and a row.
    pub fn from_cyclic_cells(cells: &[Cell]) -> Result<CycleRep, GraphError> {
        let len = cells.len();
        if len < 4 || len % 2 == 1 {
            return Err(GraphError::BadCycle(format!("length {len} is not an even number >= 4")));
        }
        let start = (0..len).min_by_key(|&i| cells[i]).unwrap();
        let at = |t: isize| cells[(start as isize + t).rem_euclid(len as isize) as usize];
        let step: isize = if at(1).col == at(0).col {
            1
        } else if at(-1).col == at(0).col {
            -1
        } else {
            return Err(GraphError::BadCycle("consecutive cells do not alternate".into()));
        };
        let k = len / 2;
        let rows: Vec<usize> = (0..k).map(|l| at(step * 2 * l as isize).row).collect();
        let cols: Vec<usize> = (0..k).map(|l| at(step * 2 * l as isize).col).collect();
        if has_duplicates(&rows) || has_duplicates(&cols) {
            return Err(GraphError::BadCycle("cycle is not simple".into()));
        }
        let rep = CycleRep { rows, cols };
        let expected = rep.cells();
        if (0..len).any(|t| expected[t] != at(step * t as isize)) {
            return Err(GraphError::BadCycle("consecutive cells do not alternate".into()));
        }
        Ok(rep)
    }

    /// Half the cycle length.
    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn len(&self) -> usize {
        2 * self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    /// Cells in traversal order.
    pub fn cells(&self) -> Vec<Cell> {
        let k = self.k();
        (0..k)
            .flat_map(|l| {
                [
                    Cell::new(self.rows[l], self.cols[l]),
                    Cell::new(self.rows[(l + 1) % k], self.cols[l]),
                ]
            })
            .collect()
    }

    /// Cells with their signs (`true` for `+`).
    pub fn signed_cells(&self) -> impl Iterator<Item = (Cell, bool)> + '_ {
        self.cells().into_iter().enumerate().map(|(t, c)| (c, t % 2 == 0))
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.cells().contains(&cell)
    }

    pub fn to_pattern(&self, m: usize, n: usize) -> Result<Pattern, GraphError> {
        Pattern::new(m, n, self.cells())
    }

    /// The cycle traversed in the opposite direction, still starting with two
    /// cells that share a column. Every cell's sign is flipped.
    pub fn reversed_cells(&self) -> Vec<Cell> {
        let mut cells = self.cells();
        cells.reverse();
        let len = cells.len();
        cells.rotate_left(len - 2);
        cells
    }
}

impl fmt::Display for CycleRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, c) in self.cells().iter().enumerate() {
            if t > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{c}", if t % 2 == 0 { '+' } else { '-' })?;
        }
        Ok(())
    }
}

impl Serialize for CycleRep {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.cells().serialize(s)
    }
}

fn has_duplicates(v: &[usize]) -> bool {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.windows(2).any(|w| w[0] == w[1])
}

/// The unique cycle in `tree + e`.
pub fn fundamental_cycle(tree: &Pattern, e: Cell) -> Result<CycleRep, GraphError> {
    if e.row >= tree.m || e.col >= tree.n {
        return Err(GraphError::OutOfRange { cell: e, m: tree.m, n: tree.n });
    }
    if tree.contains(e) {
        return Err(GraphError::EdgeInTree(e));
    }
    if !tree.is_acyclic() {
        return Err(GraphError::NotAcyclic);
    }
    let path = tree.path(e.row, e.col).ok_or(GraphError::NotConnected(e))?;
    // path runs row -> col; close the walk through e
    let mut cells = path;
    cells.push(e);
    CycleRep::from_cyclic_cells(&cells)
}

/// Size of the union of the fundamental cycles of `extras` with respect to the
/// spanning tree `tree`.
pub fn cycle_union_size(tree: &Pattern, extras: &[Cell]) -> Result<usize, GraphError> {
    if !tree.is_spanning_tree() {
        return Err(GraphError::NotSpanningTree);
    }
    let mut sorted = extras.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(GraphError::DuplicateExtra);
    }
    let mut union = Vec::new();
    for &e in extras {
        union.extend(fundamental_cycle(tree, e)?.cells());
    }
    union.sort_unstable();
    union.dedup();
    Ok(union.len())
}

/// The staircase tree with a fan on the last row, plus `h` extra cells in the
/// first row, for which the cycle-union bound `2(m + h - 1)` holds with
/// equality. Requires `n >= m + h`.
pub fn tight_union_family(m: usize, n: usize, h: usize) -> Result<(Pattern, Vec<Cell>), GraphError> {
    if m == 0 || n < m + h {
        return Err(GraphError::TightFamily { m, n, h });
    }
    let cells = (0..m)
        .map(|i| Cell::new(i, i))
        .chain((0..m - 1).map(|i| Cell::new(i, i + 1)))
        .chain((m..n).map(|j| Cell::new(m - 1, j)));
    let tree = Pattern::new(m, n, cells)?;
    let extras = (1..=h).map(|l| Cell::new(0, m + l - 1)).collect();
    Ok((tree, extras))
}

/// `m^(n-1) * n^(m-1)`, or `None` on overflow.
pub fn spanning_tree_count(m: usize, n: usize) -> Option<u128> {
    if m == 0 || n == 0 {
        return Some(0);
    }
    let a = (m as u128).checked_pow(u32::try_from(n - 1).ok()?)?;
    let b = (n as u128).checked_pow(u32::try_from(m - 1).ok()?)?;
    a.checked_mul(b)
}

/// Streams every spanning tree of `K_{m,n}` exactly once, in a fixed order.
///
/// Cells are decided in row-major order: a cell is included when it joins two
/// components of the partial tree and excluded when the remaining cells still
/// connect the graph, so every branch ends in a spanning tree.
pub fn enumerate_spanning_trees(m: usize, n: usize, cap: u128) -> Result<SpanningTrees, GraphError> {
    if m == 0 || n == 0 {
        return Err(GraphError::EmptyGrid { m, n });
    }
    if m * n > MAX_ENUM_CELLS {
        return Err(GraphError::GridTooLarge);
    }
    match spanning_tree_count(m, n) {
        Some(c) if c <= cap => {}
        other => {
            return Err(GraphError::TooManyTrees {
                count: other.map_or_else(|| "overflowing".to_string(), |c| c.to_string()),
                cap,
            })
        }
    }
    let all = if m * n == 128 { u128::MAX } else { (1u128 << (m * n)) - 1 };
    Ok(SpanningTrees {
        m,
        n,
        stack: vec![Frame {
            next: 0,
            included: 0,
            excluded: 0,
        }],
        all,
    })
}

#[derive(Clone, Copy)]
struct Frame {
    next: usize,
    included: u128,
    excluded: u128,
}

pub struct SpanningTrees {
    m: usize,
    n: usize,
    stack: Vec<Frame>,
    all: u128,
}

impl SpanningTrees {
    fn connected(&self, mask: u128) -> bool {
        let mut dsu = Dsu::new(self.m + self.n);
        let mut comps = self.m + self.n;
        let mut bits = mask;
        while bits != 0 {
            let k = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if dsu.union(k / self.n, self.m + k % self.n) {
                comps -= 1;
            }
        }
        comps == 1
    }

    fn joins_components(&self, mask: u128, k: usize) -> bool {
        let mut dsu = Dsu::new(self.m + self.n);
        let mut bits = mask;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            dsu.union(b / self.n, self.m + b % self.n);
        }
        dsu.find(k / self.n) != dsu.find(self.m + k % self.n)
    }
}

impl Iterator for SpanningTrees {
    type Item = Pattern;

    fn next(&mut self) -> Option<Pattern> {
        let target = (self.m + self.n - 1) as u32;
        while let Some(f) = self.stack.pop() {
            if f.included.count_ones() == target {
                return Some(Pattern::from_mask(self.m, self.n, f.included));
            }
            let k = f.next;
            let bit = 1u128 << k;
            let available = self.all & !f.excluded & !bit;
            if self.connected(available) {
                self.stack.push(Frame {
                    next: k + 1,
                    included: f.included,
                    excluded: f.excluded | bit,
                });
            }
            if self.joins_components(f.included, k) {
                self.stack.push(Frame {
                    next: k + 1,
                    included: f.included | bit,
                    excluded: f.excluded,
                });
            }
        }
        None
    }
}

/// A uniformly random spanning tree of `K_{m,n}` (Aldous-Broder walk).
pub fn random_spanning_tree<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Pattern {
    assert!(m > 0 && n > 0);
    let nv = m + n;
    let mut visited = vec![false; nv];
    let mut v = rng.random_range(0..nv);
    visited[v] = true;
    let mut remaining = nv - 1;
    let mut cells = Vec::with_capacity(nv - 1);
    while remaining > 0 {
        let (w, cell) = if v < m {
            let j = rng.random_range(0..n);
            (m + j, Cell::new(v, j))
        } else {
            let i = rng.random_range(0..m);
            (i, Cell::new(i, v - m))
        };
        if !visited[w] {
            visited[w] = true;
            remaining -= 1;
            cells.push(cell);
        }
        v = w;
    }
    Pattern::new(m, n, cells).expect("cells are in range")
}
