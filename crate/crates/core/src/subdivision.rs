//! Regular subdivisions of the simplex `Gamma_delta` induced by a lifting.
//!
//! A cell is a sorted list of indices into the lattice points of the simplex
//! (lexicographic order). Cells of every dimension live in one table with
//! face/coface incidences, sorted by dimension and then lexicographically.

use std::collections::{BTreeSet, HashMap};
use std::ops::Range;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    cross, det3, dot, lattice_points, s4_act, tet_volume6, LatticePoint, Perm, Simplex3,
};
use crate::lifting::Lifting;

pub type CellId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    /// Sorted indices into [`Triangulation::points`].
    pub verts: Vec<usize>,
    pub dim: usize,
    /// Faces of dimension `dim - 1`.
    pub facets: Vec<CellId>,
    /// Cells of dimension `dim + 1` having this cell as a face.
    pub cofacets: Vec<CellId>,
}

/// A lattice subdivision of `Gamma_delta` with its full face lattice. Despite
/// the name the maximal cells need not be simplices; see
/// [`Triangulation::is_triangulation`].
#[derive(Clone, Debug)]
pub struct Triangulation {
    delta: i64,
    points: Vec<LatticePoint>,
    cells: Vec<Cell>,
    by_dim: [Range<usize>; 4],
    lookup: HashMap<Vec<usize>, CellId>,
}

impl PartialEq for Triangulation {
    fn eq(&self, other: &Self) -> bool {
        self.delta == other.delta && self.maximal_vertex_sets() == other.maximal_vertex_sets()
    }
}

impl Eq for Triangulation {}

#[derive(Clone, Debug)]
pub struct SubdivisionResult {
    pub triangulation: Triangulation,
    pub is_triangulation: bool,
    pub is_elementary: bool,
}

impl Triangulation {
    /// Builds the face lattice from the maximal cells, given as sets of
    /// lattice points of the simplex.
    pub fn from_maximal_cells(delta: i64, maximal: &[Vec<LatticePoint>]) -> Result<Self> {
        let points = lattice_points(delta)?;
        let mut cells = Vec::with_capacity(maximal.len());
        for cell in maximal {
            let mut idx = Vec::with_capacity(cell.len());
            for p in cell {
                idx.push(
                    points
                        .binary_search(p)
                        .map_err(|_| Error::OutsideSimplex(*p, delta))?,
                );
            }
            idx.sort_unstable();
            idx.dedup();
            cells.push(idx);
        }
        Ok(Self::from_index_cells(delta, points, cells))
    }

    fn from_index_cells(delta: i64, points: Vec<LatticePoint>, maximal: Vec<Vec<usize>>) -> Self {
        let mut all: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
        for m in &maximal {
            for face in polytope_faces(&points, m) {
                let d = affine_dim(&points, &face);
                all.insert((d, face));
            }
        }
        let mut cells: Vec<Cell> = all
            .into_iter()
            .map(|(dim, verts)| Cell {
                verts,
                dim,
                facets: Vec::new(),
                cofacets: Vec::new(),
            })
            .collect();
        let mut by_dim: [Range<usize>; 4] = [0..0, 0..0, 0..0, 0..0];
        for (d, r) in by_dim.iter_mut().enumerate() {
            let start = cells.iter().position(|c| c.dim >= d).unwrap_or(cells.len());
            let end = cells.iter().position(|c| c.dim > d).unwrap_or(cells.len());
            *r = start..end;
        }
        let lookup: HashMap<Vec<usize>, CellId> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| (c.verts.clone(), i))
            .collect();
        for d in 1..4 {
            for hi in by_dim[d].clone() {
                for lo in by_dim[d - 1].clone() {
                    if is_subset(&cells[lo].verts, &cells[hi].verts) {
                        cells[hi].facets.push(lo);
                        cells[lo].cofacets.push(hi);
                    }
                }
            }
        }
        Triangulation {
            delta,
            points,
            cells,
            by_dim,
            lookup,
        }
    }

    pub fn delta(&self) -> i64 {
        self.delta
    }

    /// All lattice points of the simplex, lexicographically sorted.
    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn point(&self, i: usize) -> LatticePoint {
        self.points[i]
    }

    pub fn point_index(&self, p: &LatticePoint) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, id: CellId) -> &Cell {
        &self.cells[id]
    }

    pub fn cell_ids(&self, dim: usize) -> Range<usize> {
        self.by_dim[dim].clone()
    }

    pub fn count(&self, dim: usize) -> usize {
        self.by_dim[dim].len()
    }

    /// Maximal cells (always full-dimensional), canonically sorted.
    pub fn maximal(&self) -> Range<usize> {
        self.cell_ids(3)
    }

    pub fn maximal_vertex_sets(&self) -> Vec<Vec<usize>> {
        self.maximal()
            .map(|i| self.cells[i].verts.clone())
            .collect()
    }

    pub fn tetrahedra_points(&self) -> Vec<Vec<LatticePoint>> {
        self.maximal().map(|i| self.cell_points(i)).collect()
    }

    pub fn find(&self, verts: &[usize]) -> Option<CellId> {
        let mut v = verts.to_vec();
        v.sort_unstable();
        self.lookup.get(&v).copied()
    }

    pub fn find_points(&self, pts: &[LatticePoint]) -> Option<CellId> {
        let idx: Option<Vec<usize>> = pts.iter().map(|p| self.point_index(p)).collect();
        self.find(&idx?)
    }

    pub fn cell_points(&self, id: CellId) -> Vec<LatticePoint> {
        self.cells[id]
            .verts
            .iter()
            .map(|&i| self.points[i])
            .collect()
    }

    /// Indices of the lattice points used as vertices by some cell.
    pub fn used_points(&self) -> Vec<usize> {
        self.cell_ids(0).map(|i| self.cells[i].verts[0]).collect()
    }

    pub fn is_triangulation(&self) -> bool {
        self.maximal().all(|i| self.cells[i].verts.len() == 4)
    }

    pub fn is_elementary(&self) -> bool {
        self.maximal().all(|i| {
            let c = &self.cells[i];
            c.verts.len() == 4 && tet_volume6(&self.simplex(i)) == 1
        })
    }

    /// The maximal cell as a tetrahedron. Panics when it is not a simplex.
    pub fn simplex(&self, id: CellId) -> Simplex3 {
        let v = &self.cells[id].verts;
        assert_eq!(v.len(), 4, "cell {id} is not a tetrahedron");
        Simplex3::new([
            self.points[v[0]],
            self.points[v[1]],
            self.points[v[2]],
            self.points[v[3]],
        ])
    }

    /// Six times the total volume, for triangulations.
    pub fn total_volume6(&self) -> i64 {
        self.maximal().map(|i| tet_volume6(&self.simplex(i))).sum()
    }

    /// All cells of dimension `dim` containing `id` as a face (including
    /// `id` itself when the dimensions agree).
    pub fn cofaces_of_dim(&self, id: CellId, dim: usize) -> Vec<CellId> {
        let v = &self.cells[id].verts;
        self.cell_ids(dim)
            .filter(|&c| is_subset(v, &self.cells[c].verts))
            .collect()
    }

    /// All faces (of every dimension) of the cell, including itself.
    pub fn faces(&self, id: CellId) -> Vec<CellId> {
        let v = &self.cells[id].verts;
        (0..=id)
            .filter(|&c| is_subset(&self.cells[c].verts, v))
            .collect()
    }

    /// Lattice points `b` outside the cell such that cell ∪ {b} spans a cell.
    pub fn link(&self, id: CellId) -> Vec<usize> {
        let v = &self.cells[id].verts;
        let mut out: BTreeSet<usize> = BTreeSet::new();
        for m in self.maximal() {
            if is_subset(v, &self.cells[m].verts) {
                out.extend(self.cells[m].verts.iter().filter(|i| !v.contains(i)));
            }
        }
        out.into_iter().collect()
    }

    /// Whether every vertex of the cell lies on a common facet of the simplex.
    pub fn on_boundary(&self, id: CellId) -> bool {
        (0..4).any(|k| {
            self.cells[id]
                .verts
                .iter()
                .all(|&i| self.points[i].homogenize(self.delta)[k] == 0)
        })
    }

    pub fn s4_act(&self, sigma: &Perm) -> Triangulation {
        let maximal: Vec<Vec<usize>> = self
            .maximal()
            .map(|m| {
                let mut v: Vec<usize> = self.cells[m]
                    .verts
                    .iter()
                    .map(|&i| {
                        let q = s4_act(sigma, &self.points[i], self.delta)
                            .expect("point of the simplex");
                        self.point_index(&q).unwrap()
                    })
                    .collect();
                v.sort_unstable();
                v
            })
            .collect();
        Self::from_index_cells(self.delta, self.points.clone(), maximal)
    }

    /// Lexicographically least sorted list of maximal cells over the S4 orbit.
    pub fn canonical_form(&self) -> Vec<Vec<usize>> {
        Perm::all()
            .iter()
            .map(|s| {
                let mut cells: Vec<Vec<usize>> = self
                    .maximal()
                    .map(|m| {
                        let mut v: Vec<usize> = self.cells[m]
                            .verts
                            .iter()
                            .map(|&i| {
                                let q = s4_act(s, &self.points[i], self.delta).unwrap();
                                self.point_index(&q).unwrap()
                            })
                            .collect();
                        v.sort_unstable();
                        v
                    })
                    .collect();
                cells.sort();
                cells
            })
            .min()
            .unwrap()
    }

    /// FNV-1a digest of [`Self::canonical_form`], stable across platforms.
    pub fn canonical_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        feed(self.delta as u64);
        for cell in self.canonical_form() {
            feed(cell.len() as u64);
            for i in cell {
                feed(i as u64);
            }
        }
        h
    }

    pub fn to_json(&self) -> TriangulationFile {
        TriangulationFile {
            delta: self.delta,
            points: self.points.iter().map(|p| p.0).collect(),
            tetrahedra: self.maximal_vertex_sets(),
        }
    }

    pub fn from_json(file: &TriangulationFile) -> Result<Triangulation> {
        let mut maximal = Vec::with_capacity(file.tetrahedra.len());
        for cell in &file.tetrahedra {
            let pts = cell
                .iter()
                .map(|&i| {
                    file.points
                        .get(i)
                        .map(|p| LatticePoint(*p))
                        .ok_or_else(|| Error::Parse(format!("point index {i} out of range")))
                })
                .collect::<Result<Vec<_>>>()?;
            maximal.push(pts);
        }
        Triangulation::from_maximal_cells(file.delta, &maximal)
    }

    pub fn read(path: &Path) -> Result<Triangulation> {
        let text = std::fs::read_to_string(path)?;
        let file: TriangulationFile = serde_json::from_str(&text).map_err(|e| {
            Error::Parse(format!(
                "{}: line {} column {}: {e}",
                path.display(),
                e.line(),
                e.column()
            ))
        })?;
        Triangulation::from_json(&file)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(&self.to_json())? + "\n")?;
        Ok(())
    }
}

/// On-disk triangulation: `tetrahedra` lists maximal cells as indices into
/// `points` (cells with more than four points occur for non-triangulations).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TriangulationFile {
    pub delta: i64,
    pub points: Vec<[i64; 3]>,
    pub tetrahedra: Vec<Vec<usize>>,
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

fn affine_dim(points: &[LatticePoint], idx: &[usize]) -> usize {
    let base = points[idx[0]];
    let vecs: Vec<[i64; 3]> = idx[1..].iter().map(|&i| points[i].sub(&base)).collect();
    let nonzero = |v: [i64; 3]| v != [0, 0, 0];
    if vecs.iter().all(|v| !nonzero(*v)) {
        return 0;
    }
    let a = *vecs.iter().find(|v| nonzero(**v)).unwrap();
    let Some(b) = vecs.iter().find(|v| nonzero(cross(a, **v))) else {
        return 1;
    };
    if vecs.iter().any(|c| det3(a, *b, *c) != 0) {
        3
    } else {
        2
    }
}

/// All non-empty faces of the convex hull of the given points (as subsets of
/// the point set), including the polytope itself.
fn polytope_faces(points: &[LatticePoint], cell: &[usize]) -> Vec<Vec<usize>> {
    let n = cell.len();
    if affine_dim(points, cell) + 1 == n {
        // a simplex: every vertex subset is a face
        return (1u32..(1 << n))
            .map(|mask| {
                (0..n)
                    .filter(|b| mask & (1 << b) != 0)
                    .map(|b| cell[b])
                    .collect()
            })
            .collect();
    }
    // Facets from supporting planes through point triples, then closure
    // under intersection: every face of a polytope is an intersection of facets.
    let mut facets: BTreeSet<Vec<usize>> = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (points[cell[i]], points[cell[j]], points[cell[k]]);
                let nrm = cross(b.sub(&a), c.sub(&a));
                if nrm == [0, 0, 0] {
                    continue;
                }
                let side: Vec<i64> = cell
                    .iter()
                    .map(|&q| dot(nrm, points[q].sub(&a)).signum())
                    .collect();
                if side.iter().all(|&s| s >= 0) || side.iter().all(|&s| s <= 0) {
                    let on: Vec<usize> = cell
                        .iter()
                        .zip(&side)
                        .filter(|(_, &s)| s == 0)
                        .map(|(&q, _)| q)
                        .collect();
                    facets.insert(on);
                }
            }
        }
    }
    let mut faces: BTreeSet<Vec<usize>> = facets.clone();
    loop {
        let current: Vec<Vec<usize>> = faces.iter().cloned().collect();
        let mut grew = false;
        for f in &current {
            for g in &facets {
                let inter: Vec<usize> = f
                    .iter()
                    .filter(|x| g.binary_search(x).is_ok())
                    .copied()
                    .collect();
                if !inter.is_empty() && faces.insert(inter) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    faces.insert(cell.to_vec());
    faces.into_iter().collect()
}

/// Lifting values scaled to a common denominator.
fn integer_lifting(l: &Lifting) -> Vec<BigInt> {
    let lcm = l
        .values()
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    l.values()
        .iter()
        .map(|v| v.numer() * (&lcm / v.denom()))
        .collect()
}

/// Maximal cells of the upper hull of the lifted points, found by checking
/// every affinely independent 4-subset as a candidate facet.
fn upper_cells<T>(points: &[LatticePoint], lift: &[T]) -> Vec<Vec<usize>>
where
    T: Clone + Signed + From<i64> + Send + Sync,
{
    let n = points.len();
    let found: BTreeSet<Vec<usize>> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut local: Vec<Vec<usize>> = Vec::new();
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in k + 1..n {
                        if let Some(cell) = facet_through(points, lift, [i, j, k, l]) {
                            local.push(cell);
                        }
                    }
                }
            }
            local
        })
        .collect();
    found.into_iter().collect()
}

fn facet_through<T>(points: &[LatticePoint], lift: &[T], q: [usize; 4]) -> Option<Vec<usize>>
where
    T: Clone + Signed + From<i64>,
{
    let a0 = points[q[0]];
    let cols = [
        points[q[1]].sub(&a0),
        points[q[2]].sub(&a0),
        points[q[3]].sub(&a0),
    ];
    let d = det3(cols[0], cols[1], cols[2]);
    if d == 0 {
        return None;
    }
    // adj(M) rows: M^{-1} = adj / d with M = [c0 c1 c2] as columns.
    let adj = [
        cross(cols[1], cols[2]),
        cross(cols[2], cols[0]),
        cross(cols[0], cols[1]),
    ];
    let sign = T::from(d.signum());
    let dt = T::from(d);
    let mut on = Vec::new();
    for (b, pb) in points.iter().enumerate() {
        let rel = pb.sub(&a0);
        let mu = [dot(adj[0], rel), dot(adj[1], rel), dot(adj[2], rel)];
        let mu0 = d - mu[0] - mu[1] - mu[2];
        // d * (h(b) - lambda_b)
        let s = T::from(mu0) * lift[q[0]].clone()
            + T::from(mu[0]) * lift[q[1]].clone()
            + T::from(mu[1]) * lift[q[2]].clone()
            + T::from(mu[2]) * lift[q[3]].clone()
            - dt.clone() * lift[b].clone();
        let s = s * sign.clone();
        if s.is_negative() {
            return None;
        }
        if s.is_zero() {
            on.push(b);
        }
    }
    // Report each cell once, from its lexicographically first independent quadruple.
    Some(on)
}

/// The regular subdivision induced by `l`: projections of the upper faces of
/// the lifted point configuration.
pub fn subdivide(l: &Lifting) -> SubdivisionResult {
    let points = l.points().to_vec();
    let lift = integer_lifting(l);
    let bound = BigInt::from(1i64 << 60);
    let cells = if lift.iter().all(|v| v.abs() < bound) {
        let small: Vec<i128> = lift.iter().map(|v| i128::try_from(v).unwrap()).collect();
        upper_cells(&points, &small)
    } else {
        upper_cells(&points, &lift)
    };
    let t = Triangulation::from_index_cells(l.delta(), points, cells);
    let is_triangulation = t.is_triangulation();
    let is_elementary = t.is_elementary();
    SubdivisionResult {
        triangulation: t,
        is_triangulation,
        is_elementary,
    }
}

pub fn is_re_triangulation(s: &SubdivisionResult) -> bool {
    s.triangulation.is_elementary()
}

/// The tetrahedron `T^i_P`, `i` in `1..=6`.
pub fn tetra_family(i: u8, p: LatticePoint) -> [LatticePoint; 4] {
    let [x, y, z] = p.0;
    let q = |a: i64, b: i64, c: i64| LatticePoint::new(x + a, y + b, z + c);
    match i {
        1 => [q(0, 0, 0), q(1, 0, 0), q(0, 1, 0), q(0, 0, 1)],
        2 => [q(1, 1, 0), q(1, 0, 0), q(0, 1, 0), q(0, 0, 1)],
        3 => [q(1, 0, 0), q(1, 1, 0), q(0, 0, 1), q(1, 0, 1)],
        4 => [q(0, 1, 0), q(1, 1, 0), q(0, 0, 1), q(0, 1, 1)],
        5 => [q(1, 1, 0), q(1, 0, 1), q(0, 1, 1), q(0, 0, 1)],
        6 => [q(1, 1, 0), q(1, 0, 1), q(0, 1, 1), q(1, 1, 1)],
        _ => panic!("tetrahedron family index must be 1..=6, got {i}"),
    }
}

/// The subdivision induced by the alpha lifting, assembled directly from the
/// six tetrahedron families without any hull computation.
pub fn alpha_subdivision_oracle(delta: i64) -> Result<Triangulation> {
    if delta < 1 {
        return Err(Error::InvalidDegree(delta));
    }
    let mut maximal = Vec::new();
    for x in -1..=delta {
        for y in -1..=delta {
            for z in -1..=delta {
                for i in 1..=6 {
                    let t = tetra_family(i, LatticePoint::new(x, y, z));
                    if t.iter().all(|v| v.in_simplex(delta)) {
                        maximal.push(t.to_vec());
                    }
                }
            }
        }
    }
    Triangulation::from_maximal_cells(delta, &maximal)
}

/// Whether `l` induces exactly the subdivision `t`.
///
/// For triangulations this is checked locally: every lattice point not used
/// by `t` must lie strictly below the piecewise-linear interpolation, and the
/// interpolation must fold strictly downwards across every interior triangle.
/// Other subdivisions are compared against a full hull computation.
pub fn secondary_cone_contains(t: &Triangulation, l: &Lifting) -> Result<bool> {
    if t.delta() != l.delta() {
        return Err(Error::DegreeMismatch(t.delta(), l.delta()));
    }
    if !t.is_triangulation() {
        return Ok(subdivide(l).triangulation == *t);
    }
    let lift = integer_lifting(l);
    let points = t.points();
    let above = |tet: &[usize], b: usize| -> BigInt {
        // sign-normalized d * (h_tet(b) - lambda_b)
        let q = [tet[0], tet[1], tet[2], tet[3]];
        let a0 = points[q[0]];
        let cols = [
            points[q[1]].sub(&a0),
            points[q[2]].sub(&a0),
            points[q[3]].sub(&a0),
        ];
        let d = det3(cols[0], cols[1], cols[2]);
        let adj = [
            cross(cols[1], cols[2]),
            cross(cols[2], cols[0]),
            cross(cols[0], cols[1]),
        ];
        let rel = points[b].sub(&a0);
        let mu = [dot(adj[0], rel), dot(adj[1], rel), dot(adj[2], rel)];
        let mu0 = d - mu[0] - mu[1] - mu[2];
        let s = BigInt::from(mu0) * &lift[q[0]]
            + BigInt::from(mu[0]) * &lift[q[1]]
            + BigInt::from(mu[1]) * &lift[q[2]]
            + BigInt::from(mu[2]) * &lift[q[3]]
            - BigInt::from(d) * &lift[b];
        s * d.signum()
    };
    for tri in t.cell_ids(2) {
        let co = &t.cell(tri).cofacets;
        if co.len() == 2 {
            let t1 = &t.cell(co[0]).verts;
            let t2 = &t.cell(co[1]).verts;
            let q = *t2.iter().find(|v| !t1.contains(v)).unwrap();
            if !above(t1, q).is_positive() {
                return Ok(false);
            }
        }
    }
    let used: BTreeSet<usize> = t.used_points().into_iter().collect();
    for b in 0..points.len() {
        if used.contains(&b) {
            continue;
        }
        let containing = t.maximal().find(|&m| {
            let v = &t.cell(m).verts;
            barycentric_nonneg(points, v, b)
        });
        match containing {
            Some(m) if above(&t.cell(m).verts, b).is_positive() => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

fn barycentric_nonneg(points: &[LatticePoint], tet: &[usize], b: usize) -> bool {
    let a0 = points[tet[0]];
    let cols = [
        points[tet[1]].sub(&a0),
        points[tet[2]].sub(&a0),
        points[tet[3]].sub(&a0),
    ];
    let d = det3(cols[0], cols[1], cols[2]);
    let adj = [
        cross(cols[1], cols[2]),
        cross(cols[2], cols[0]),
        cross(cols[0], cols[1]),
    ];
    let rel = points[b].sub(&a0);
    let mu = [dot(adj[0], rel), dot(adj[1], rel), dot(adj[2], rel)];
    let mu0 = d - mu[0] - mu[1] - mu[2];
    [mu0, mu[0], mu[1], mu[2]]
        .iter()
        .all(|&m| m * d.signum() >= 0)
}

pub fn s4_act_triangulation(sigma: &Perm, t: &Triangulation) -> Triangulation {
    t.s4_act(sigma)
}
