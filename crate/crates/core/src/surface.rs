//! Square-tiled surfaces: `n` unit squares glued right-to-left along `C₁` and
//! bottom-to-top along `C₂`, with corner points removed.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::abd::{AbdError, AbdStructure};
use crate::perm::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error(transparent)]
    Abd(#[from] AbdError),
    #[error("gluing permutations have sizes {0} and {1}")]
    SizeMismatch(usize, usize),
    #[error("puncture at the corner of square {0} is ramified (e = {1}) and cannot be filled")]
    Ramified(usize, usize),
}

/// Corner positions within a square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Corner {
    TopLeft = 0,
    TopRight = 1,
    BottomLeft = 2,
    BottomRight = 3,
}

fn corner_id(square: usize, c: Corner) -> usize {
    4 * square + c as usize
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// One puncture: an orbit of square corners under the edge gluings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Puncture {
    /// corner ids `4·square + corner`, sorted
    pub corners: Vec<usize>,
    /// squares whose bottom-right corner lies here, sorted
    pub squares: Vec<usize>,
    /// number of sheets of the covering meeting here
    pub ramification: usize,
    /// corners met walking once around the point
    pub polygon_corners: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareTiledSurface {
    c1: Permutation,
    c2: Permutation,
    punctures: Vec<Puncture>,
    filled: Vec<usize>,
    connected: bool,
}

impl SquareTiledSurface {
    /// The surface of a valid ABD structure, with the punctures of `A` filled.
    pub fn build(abd: &AbdStructure) -> Result<Self, SurfaceError> {
        let abd = abd.clone().validated()?;
        let s = Self::from_gluings(abd.c1().clone(), abd.c2().clone())?;
        s.fill(abd.a())
    }

    /// The surface of an arbitrary pair of gluing permutations, nothing filled.
    pub fn from_gluings(c1: Permutation, c2: Permutation) -> Result<Self, SurfaceError> {
        let n = c1.len();
        if c2.len() != n {
            return Err(SurfaceError::SizeMismatch(n, c2.len()));
        }
        let mut uf = UnionFind::new(4 * n);
        for i in 0..n {
            let (r, d) = (c1.apply(i), c2.apply(i));
            uf.union(
                corner_id(i, Corner::TopRight),
                corner_id(r, Corner::TopLeft),
            );
            uf.union(
                corner_id(i, Corner::BottomRight),
                corner_id(r, Corner::BottomLeft),
            );
            uf.union(
                corner_id(i, Corner::BottomLeft),
                corner_id(d, Corner::TopLeft),
            );
            uf.union(
                corner_id(i, Corner::BottomRight),
                corner_id(d, Corner::TopRight),
            );
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for c in 0..4 * n {
            groups.entry(uf.find(c)).or_default().push(c);
        }
        let (c1_inv, c2_inv) = (c1.inverse(), c2.inverse());
        let punctures = groups
            .into_values()
            .map(|corners| {
                let squares: Vec<usize> = corners
                    .iter()
                    .filter(|&&c| c % 4 == Corner::BottomRight as usize)
                    .map(|&c| c / 4)
                    .collect();
                let polygon_corners = walk_around(&c1, &c2, (&c1_inv, &c2_inv), squares[0]);
                Puncture {
                    ramification: squares.len(),
                    corners,
                    squares,
                    polygon_corners,
                }
            })
            .collect();
        let mut comp = UnionFind::new(n);
        for i in 0..n {
            comp.union(i, c1.apply(i));
            comp.union(i, c2.apply(i));
        }
        let connected = (0..n).all(|i| comp.find(i) == 0);
        Ok(SquareTiledSurface {
            c1,
            c2,
            punctures,
            filled: Vec::new(),
            connected,
        })
    }

    /// Fills the puncture at the bottom-right corner of each square in `a`.
    pub fn fill(mut self, a: &[usize]) -> Result<Self, SurfaceError> {
        let mut filled = Vec::new();
        for &x in a {
            let p = self.puncture_of_square(x);
            let e = self.punctures[p].ramification;
            if e != 1 {
                return Err(SurfaceError::Ramified(x, e));
            }
            filled.push(p);
        }
        filled.sort_unstable();
        filled.dedup();
        self.filled = filled;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.c1.len()
    }

    pub fn punctures(&self) -> &[Puncture] {
        &self.punctures
    }

    /// Index of the puncture at the bottom-right corner of `square`.
    pub fn puncture_of_square(&self, square: usize) -> usize {
        self.punctures
            .iter()
            .position(|p| p.squares.contains(&square))
            .expect("every corner lies in an orbit")
    }

    /// Number of punctures before filling.
    pub fn b(&self) -> usize {
        self.punctures.len()
    }

    /// `k ↦ b_k`, the number of punctures of ramification `k`.
    pub fn b_k(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for p in &self.punctures {
            *m.entry(p.ramification).or_insert(0) += 1;
        }
        m
    }

    /// Squares labelling unramified punctures, i.e. the fixed points of `[C₁, C₂]`.
    pub fn fillable(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .punctures
            .iter()
            .filter(|p| p.ramification == 1)
            .map(|p| p.squares[0])
            .collect();
        v.sort_unstable();
        v
    }

    /// Squares labelling the filled punctures.
    pub fn filled(&self) -> Vec<usize> {
        self.filled
            .iter()
            .map(|&p| self.punctures[p].squares[0])
            .collect()
    }

    /// Whether `corner` of `square` is a filled point.
    pub fn is_filled(&self, square: usize, corner: Corner) -> bool {
        let id = corner_id(square, corner);
        self.filled
            .iter()
            .any(|&p| self.punctures[p].corners.binary_search(&id).is_ok())
    }

    /// Euler characteristic of the punctured surface: `n` faces, `2n` edges, no vertices.
    pub fn euler_characteristic(&self) -> i64 {
        -(self.n() as i64)
    }

    /// Genus of the compactification, from `2 − 2g − b = −n`.
    pub fn genus(&self) -> i64 {
        let twice = 2 + self.n() as i64 - self.b() as i64;
        debug_assert!(twice % 2 == 0, "orientable closed surface");
        twice / 2
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// Punctures left after filling.
    pub fn punctures_after_filling(&self) -> usize {
        self.b() - self.filled.len()
    }

    /// Whether the corner orbits are exactly the cycles of `[C₁, C₂]`.
    pub fn agrees_with_commutator(&self) -> bool {
        let comm = self.c1.commutator(&self.c2).expect("same size");
        let mut cycles: Vec<Vec<usize>> = comm
            .cycles()
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        cycles.sort();
        let mut orbits: Vec<Vec<usize>> =
            self.punctures.iter().map(|p| p.squares.clone()).collect();
        orbits.sort();
        cycles == orbits
    }

    pub fn summary(&self) -> SurfaceSummary {
        SurfaceSummary {
            b: self.b(),
            b_k: self
                .b_k()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            chi: self.euler_characteristic(),
            genus: self.genus(),
            fillable: self.fillable(),
            connected: self.is_connected(),
            filled: self.filled(),
            punctures_after_filling: self.punctures_after_filling(),
        }
    }
}

/// Walks around the vertex at the bottom-right corner of `start`, counting corners.
fn walk_around(
    c1: &Permutation,
    c2: &Permutation,
    inverses: (&Permutation, &Permutation),
    start: usize,
) -> usize {
    let (c1_inv, c2_inv) = inverses;
    let mut b = start;
    let mut count = 0;
    loop {
        let bl = c1.apply(b);
        let tl = c2.apply(bl);
        let tr = c1_inv.apply(tl);
        let next = c2_inv.apply(tr);
        count += 4;
        b = next;
        if b == start {
            return count;
        }
    }
}

/// JSON view of a surface, 0-based square labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfaceSummary {
    pub b: usize,
    pub b_k: BTreeMap<String, usize>,
    pub chi: i64,
    pub genus: i64,
    pub fillable: Vec<usize>,
    pub connected: bool,
    pub filled: Vec<usize>,
    pub punctures_after_filling: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example(a: &[usize]) -> AbdStructure {
        let c1 = Permutation::parse_cycles("(1 4 2 3)", 4).unwrap();
        let c2 = Permutation::parse_cycles("(1 2 3 4)", 4).unwrap();
        AbdStructure::new(c1, c2, a.iter().copied()).unwrap()
    }

    #[test]
    fn once_punctured_torus() {
        let s = SquareTiledSurface::build(&AbdStructure::trivial()).unwrap();
        assert_eq!(s.b(), 1);
        assert_eq!(s.punctures()[0].corners, vec![0, 1, 2, 3]);
        assert_eq!((s.euler_characteristic(), s.genus()), (-1, 1));
    }

    #[test]
    fn example_surface() {
        let s = SquareTiledSurface::build(&example(&[2])).unwrap();
        assert_eq!(s.b(), 2);
        assert_eq!(s.b_k(), BTreeMap::from([(1, 1), (3, 1)]));
        assert_eq!(s.euler_characteristic(), -4);
        assert_eq!(s.genus(), 2);
        assert_eq!(s.fillable(), vec![2]);
        assert_eq!(s.filled(), vec![2]);
        assert_eq!(s.punctures_after_filling(), 1);
        assert!(s.is_connected());
        assert!(s.agrees_with_commutator());
        let json =
            serde_json::to_string(&SquareTiledSurface::build(&example(&[])).unwrap().summary())
                .unwrap();
        assert!(json.starts_with(
            r#"{"b":2,"b_k":{"1":1,"3":1},"chi":-4,"genus":2,"fillable":[2],"connected":true"#
        ));
    }

    #[test]
    fn polygon_has_four_corners_per_sheet() {
        let s = SquareTiledSurface::build(&example(&[])).unwrap();
        for p in s.punctures() {
            assert_eq!(p.polygon_corners, 4 * p.ramification);
        }
    }

    #[test]
    fn commuting_gluings() {
        let c = Permutation::standard_cycle(5);
        let s = SquareTiledSurface::from_gluings(c.clone(), c.pow(2)).unwrap();
        assert_eq!(s.b(), 5);
        assert_eq!(s.b_k(), BTreeMap::from([(1, 5)]));
        assert_eq!(s.genus(), 1);
        let filled = s.fill(&[0, 1, 2, 3]).unwrap();
        assert_eq!(filled.punctures_after_filling(), 1);
        assert_eq!(filled.genus(), 1);
    }

    #[test]
    fn ramified_fill_is_rejected() {
        let s = SquareTiledSurface::build(&example(&[])).unwrap();
        assert_eq!(s.fill(&[0]), Err(SurfaceError::Ramified(0, 3)));
    }

    #[test]
    fn disconnected_gluings() {
        let id = Permutation::identity(2);
        let s = SquareTiledSurface::from_gluings(id.clone(), id).unwrap();
        assert!(!s.is_connected());
    }
}
