//! The tropical surface dual to a regular elementary triangulation.
//!
//! Every cell of the surface is addressed by the id of its dual cell in the
//! triangulation: a tetrahedron is an X-vertex, a triangle an X-edge, an edge
//! an X-facet (2-cell). Vertices of the triangulation have no dual cell on
//! the surface (they are the regions where one monomial dominates).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{cross, dot, Dir, LatticePoint};
use crate::lifting::Lifting;
use crate::linsys::{AffineForm, LinSystem};
use crate::rat::{dot_int, Point3, Rat};
use crate::subdivision::{subdivide, CellId, Triangulation};

/// A surface cell, identified by its dual triangulation cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct XCell(pub CellId);

/// Bit set over the four ray directions, bit `i` for `w_{i+1}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirSet(pub u8);

impl DirSet {
    pub fn contains(self, d: Dir) -> bool {
        self.0 & (1 << d.slot()) != 0
    }

    pub fn insert(&mut self, d: Dir) {
        self.0 |= 1 << d.slot();
    }

    pub fn iter(self) -> impl Iterator<Item = Dir> {
        Dir::ALL.into_iter().filter(move |d| self.contains(*d))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn indices(self) -> Vec<u8> {
        self.iter().map(Dir::index).collect()
    }
}

/// One step of the boundary of a 2-cell of the surface, in cyclic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundaryItem {
    /// The X-vertex dual to this tetrahedron.
    Vertex(CellId),
    /// An unbounded edge of the 2-cell (dual to a boundary triangle) with its
    /// direction.
    Ray(CellId, Dir),
}

#[derive(Clone, Debug)]
pub struct TropicalSurface {
    lifting: Lifting,
    tri: Triangulation,
    /// Indexed by `tet - tri.maximal().start`.
    vertices: Vec<Point3>,
    exits: Vec<DirSet>,
    recession: Vec<DirSet>,
}

/// A point of the surface together with its minimal cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfacePoint {
    pub p: Point3,
    /// The triangulation cell dual to the minimal surface cell containing `p`.
    pub cell: CellId,
}

/// Whether some edge of the lattice polytope with these vertices lies in the
/// facet `F_i` of the simplex, for each `i`.
pub fn exits(points: &[LatticePoint], delta: i64) -> DirSet {
    let mut out = DirSet::default();
    for d in Dir::ALL {
        let on: Vec<&LatticePoint> = points.iter().filter(|p| d.on_facet(p, delta)).collect();
        // an edge in F_i needs two distinct points of the cell on F_i; for
        // the cells considered here (faces of a subdivision) any two such
        // points span a face of the cell inside F_i containing an edge
        if on.len() >= 2 {
            out.insert(d);
        }
    }
    out
}

impl TropicalSurface {
    pub fn new(lifting: Lifting, tri: Triangulation) -> Result<Self> {
        if tri.delta() != lifting.delta() {
            return Err(Error::DegreeMismatch(tri.delta(), lifting.delta()));
        }
        if let Some(bad) = tri.maximal().find(|&m| {
            tri.cell(m).verts.len() != 4 || crate::lattice::tet_volume6(&tri.simplex(m)) != 1
        }) {
            return Err(Error::NotSmooth(format!(
                "maximal cell {:?} is not an elementary tetrahedron",
                tri.cell_points(bad)
            )));
        }
        let delta = tri.delta();
        let vertices = tri
            .maximal()
            .map(|m| dual_vertex(&lifting, &tri.cell_points(m)))
            .collect();
        let mut exits_v = Vec::with_capacity(tri.cells().len());
        let mut recession = Vec::with_capacity(tri.cells().len());
        for id in 0..tri.cells().len() {
            let pts = tri.cell_points(id);
            exits_v.push(if tri.cell(id).dim >= 1 {
                exits(&pts, delta)
            } else {
                DirSet::default()
            });
            let mut rec = DirSet::default();
            for d in Dir::ALL {
                if pts.iter().all(|p| d.on_facet(p, delta)) {
                    rec.insert(d);
                }
            }
            recession.push(rec);
        }
        Ok(TropicalSurface {
            lifting,
            tri,
            vertices,
            exits: exits_v,
            recession,
        })
    }

    pub fn lifting(&self) -> &Lifting {
        &self.lifting
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.tri
    }

    pub fn delta(&self) -> i64 {
        self.tri.delta()
    }

    /// The X-vertex dual to a tetrahedron.
    pub fn vertex(&self, tet: CellId) -> &Point3 {
        &self.vertices[tet - self.tri.maximal().start]
    }

    pub fn vertices(&self) -> impl Iterator<Item = (CellId, &Point3)> {
        self.tri.maximal().zip(self.vertices.iter())
    }

    /// Dimension of the surface cell dual to `cell`.
    pub fn xdim(&self, cell: CellId) -> usize {
        3 - self.tri.cell(cell).dim
    }

    pub fn exits(&self, cell: CellId) -> DirSet {
        self.exits[cell]
    }

    /// Recession directions of the dual cell: the `w_i` with the cell inside `F_i`.
    pub fn recession(&self, cell: CellId) -> DirSet {
        self.recession[cell]
    }

    pub fn is_bounded(&self, cell: CellId) -> bool {
        self.recession[cell].is_empty()
    }

    pub fn dual_of(&self, x: XCell) -> CellId {
        x.0
    }

    pub fn dual_cell(&self, cell: CellId) -> XCell {
        XCell(cell)
    }

    /// X-vertices generating the dual cell: the tetrahedra containing `cell`.
    pub fn generators(&self, cell: CellId) -> Vec<CellId> {
        self.tri.cofaces_of_dim(cell, 3)
    }

    /// `lambda_a + <a, x>` for the lattice point with index `a`.
    pub fn monomial(&self, a: usize, x: &Point3) -> Rat {
        let p = self.tri.point(a);
        self.lifting.values()[a].clone() + dot_int(p.0, x)
    }

    pub fn monomial_form(&self, a: usize) -> AffineForm {
        let p = self.tri.point(a);
        AffineForm {
            coeffs: p.0.iter().map(|&c| Rat::from_int(c)).collect(),
            constant: self.lifting.values()[a].clone(),
        }
    }

    /// Indices of the lattice points attaining the maximum at `x`.
    pub fn argmax(&self, x: &Point3) -> Vec<usize> {
        let vals: Vec<Rat> = (0..self.tri.points().len())
            .map(|a| self.monomial(a, x))
            .collect();
        let max = vals.iter().max().unwrap();
        (0..vals.len()).filter(|&a| vals[a] == *max).collect()
    }

    /// The minimal cell of the surface containing `x`, or `None` off the surface.
    pub fn locate(&self, x: &Point3) -> Option<SurfacePoint> {
        let s = self.argmax(x);
        if s.len() < 2 {
            return None;
        }
        let cell = self
            .tri
            .find(&s)
            .expect("maximizing set of an elementary triangulation is a cell");
        Some(SurfacePoint { p: x.clone(), cell })
    }

    /// Closed H-description of the dual cell inside `sys` over the variables
    /// `offset..offset+3`: equalities among the cell's monomials and
    /// inequalities against the monomials of its link. With `strict`, the
    /// inequalities are strict and the system describes the relative interior.
    pub fn cell_constraints(&self, cell: CellId, sys: &mut LinSystem, offset: usize, strict: bool) {
        let n = sys.nvars();
        let at: [AffineForm; 3] = std::array::from_fn(|k| AffineForm::var(n, offset + k));
        self.cell_constraints_at(cell, sys, &at, strict);
    }

    /// As [`Self::cell_constraints`], for the point whose coordinates are the
    /// given affine forms in the variables of `sys`.
    pub fn cell_constraints_at(
        &self,
        cell: CellId,
        sys: &mut LinSystem,
        at: &[AffineForm; 3],
        strict: bool,
    ) {
        let n = sys.nvars();
        let mono = |a: usize| {
            let p = self.tri.point(a);
            let mut f = AffineForm::constant(n, self.lifting.values()[a].clone());
            for k in 0..3 {
                f = f.add(&at[k].scale(&Rat::from_int(p.0[k])));
            }
            f
        };
        let verts = &self.tri.cell(cell).verts;
        let a0 = mono(verts[0]);
        for &a in &verts[1..] {
            sys.eq(mono(a).sub(&a0));
        }
        for b in self.tri.link(cell) {
            let f = a0.sub(&mono(b));
            if strict {
                sys.gt(f);
            } else {
                sys.ge(f);
            }
        }
    }

    /// Whether `x` lies in the closure of the dual cell.
    pub fn cell_contains(&self, cell: CellId, x: &Point3) -> bool {
        let verts = &self.tri.cell(cell).verts;
        let v0 = self.monomial(verts[0], x);
        verts[1..].iter().all(|&a| self.monomial(a, x) == v0)
            && self
                .tri
                .link(cell)
                .into_iter()
                .all(|b| self.monomial(b, x) <= v0)
    }

    /// Spanning vectors of the affine hull of the dual cell.
    pub fn dual_span(&self, cell: CellId) -> Vec<Point3> {
        let gens = self.generators(cell);
        let base = self.vertex(gens[0]).clone();
        let mut out: Vec<Point3> = gens[1..]
            .iter()
            .map(|&g| crate::rat::sub3(self.vertex(g), &base))
            .collect();
        for d in self.recession(cell).iter() {
            out.push(crate::rat::int_point(d.vector()));
        }
        out
    }

    /// Cyclically ordered boundary of the 2-cell dual to the edge `edge`.
    /// For an unbounded cell the cycle starts and ends with a ray.
    pub fn boundary_cycle(&self, edge: CellId) -> Vec<BoundaryItem> {
        assert_eq!(
            self.tri.cell(edge).dim,
            1,
            "boundary cycles are defined for 2-cells"
        );
        let tris = self.tri.cofaces_of_dim(edge, 2);
        let tets = self.tri.cofaces_of_dim(edge, 3);
        let boundary_tris: Vec<CellId> = tris
            .iter()
            .copied()
            .filter(|&t| self.tri.cell(t).cofacets.len() == 1)
            .collect();
        let ray_of = |t: CellId| {
            let d = self
                .recession(t)
                .iter()
                .next()
                .expect("boundary triangle lies in a facet");
            BoundaryItem::Ray(t, d)
        };
        let mut out = Vec::new();
        let (start_tet, mut prev_tri) = match boundary_tris.first() {
            Some(&bt) => {
                out.push(ray_of(bt));
                (self.tri.cell(bt).cofacets[0], bt)
            }
            None => {
                let t0 = tets[0];
                let tri0 = *tris
                    .iter()
                    .find(|&&t| self.tri.cell(t).cofacets.contains(&t0))
                    .unwrap();
                (t0, tri0)
            }
        };
        let mut tet = start_tet;
        loop {
            out.push(BoundaryItem::Vertex(tet));
            let next_tri = tris
                .iter()
                .copied()
                .find(|&t| t != prev_tri && self.tri.cell(t).cofacets.contains(&tet))
                .expect("each tetrahedron around an edge has two triangles through it");
            let co = &self.tri.cell(next_tri).cofacets;
            if co.len() == 1 {
                out.push(ray_of(next_tri));
                break;
            }
            let next_tet = if co[0] == tet { co[1] } else { co[0] };
            if next_tet == start_tet {
                break;
            }
            prev_tri = next_tri;
            tet = next_tet;
        }
        out
    }

    pub fn report(&self) -> SurfaceReport {
        let start = self.tri.maximal().start;
        let vertices = self
            .vertices()
            .map(|(t, v)| VertexReport {
                tetrahedron: self.tri.cell_points(t),
                coords: v.iter().map(|c| c.to_string()).collect(),
            })
            .collect();
        let cells = (0..self.tri.cells().len())
            .filter(|&c| self.tri.cell(c).dim >= 1)
            .map(|c| CellReport {
                dim: self.xdim(c),
                dual: self.tri.cell_points(c),
                bounded: self.is_bounded(c),
                vertices: self.generators(c).into_iter().map(|t| t - start).collect(),
                recession: self.recession(c).indices(),
                exits: self.exits(c).indices(),
            })
            .collect();
        SurfaceReport {
            delta: self.delta(),
            vertices,
            cells,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SurfaceReport {
    pub delta: i64,
    pub vertices: Vec<VertexReport>,
    pub cells: Vec<CellReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexReport {
    pub tetrahedron: Vec<LatticePoint>,
    pub coords: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellReport {
    pub dim: usize,
    pub dual: Vec<LatticePoint>,
    pub bounded: bool,
    /// Indices into `vertices`.
    pub vertices: Vec<usize>,
    pub recession: Vec<u8>,
    pub exits: Vec<u8>,
}

/// Solves `lambda_a + <a, x>` equal over the four vertices of an elementary
/// tetrahedron. The system matrix has determinant +-1.
fn dual_vertex(l: &Lifting, tet: &[LatticePoint]) -> Point3 {
    let a0 = tet[0];
    let rows = [tet[1].sub(&a0), tet[2].sub(&a0), tet[3].sub(&a0)];
    let rhs: Vec<Rat> = tet[1..].iter().map(|a| l.value(&a0) - l.value(a)).collect();
    let det = dot(rows[0], cross(rows[1], rows[2]));
    // x = M^{-1} rhs with M^{-1} = adj(M) / det; columns of adj are the cross products.
    let cols = [
        cross(rows[1], rows[2]),
        cross(rows[2], rows[0]),
        cross(rows[0], rows[1]),
    ];
    let inv_det = Rat::new(1, det);
    let mut x = [Rat::zero(), Rat::zero(), Rat::zero()];
    for (i, xi) in x.iter_mut().enumerate() {
        let mut acc = Rat::zero();
        for (k, r) in rhs.iter().enumerate() {
            acc += Rat::from_int(cols[k][i]) * r;
        }
        *xi = acc * &inv_det;
    }
    x
}

/// Subdivides and builds the surface, rejecting non-smooth liftings.
pub fn build_surface(lifting: &Lifting) -> Result<TropicalSurface> {
    let s = subdivide(lifting);
    TropicalSurface::new(lifting.clone(), s.triangulation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::alpha_lifting;
    use crate::rat::{add3, dot3, int_point, point, scale3};

    fn p(x: i64, y: i64, z: i64) -> LatticePoint {
        LatticePoint::new(x, y, z)
    }

    #[test]
    fn plane_vertex() {
        let x = build_surface(&alpha_lifting(1).unwrap()).unwrap();
        let (_, v) = x.vertices().next().unwrap();
        assert_eq!(*v, point(2, 2, 2));
        let loc = x.locate(v).unwrap();
        assert_eq!(x.xdim(loc.cell), 0);
    }

    #[test]
    fn vertex_formula_for_known_tetrahedron() {
        let l = alpha_lifting(3).unwrap().perturbed(&Rat::new(1, 1000), 5);
        let x = build_surface(&l).unwrap();
        let t = x
            .triangulation()
            .find_points(&[p(1, 0, 1), p(1, 1, 1), p(2, 0, 1), p(2, 1, 0)])
            .unwrap();
        let lam = |a, b, c| l.value_at(a, b, c).clone();
        let q = [
            lam(1, 0, 1) - lam(2, 0, 1),
            lam(1, 0, 1) - lam(1, 1, 1),
            lam(1, 0, 1) - lam(2, 0, 1) + lam(2, 1, 0) - lam(1, 1, 1),
        ];
        assert_eq!(*x.vertex(t), q);
    }

    #[test]
    fn non_smooth_rejected() {
        let l = Lifting::constant(2, Rat::zero()).unwrap();
        assert!(matches!(build_surface(&l), Err(Error::NotSmooth(_))));
    }

    #[test]
    fn exits_examples() {
        let e = exits(&[p(2, 1, 0), p(1, 2, 0), p(1, 1, 0)], 3);
        assert_eq!(e.indices(), vec![3, 4]);
        let all = exits(&[p(0, 0, 0), p(3, 0, 0), p(0, 3, 0), p(0, 0, 3)], 3);
        assert_eq!(all.len(), 4);
        let d = 5;
        let t3i = exits(&[p(0, 0, 0), p(0, 0, 1), p(1, 0, d - 1), p(d - 1, 1, 0)], d);
        assert_eq!(t3i.len(), 4);
    }

    #[test]
    fn locate_midpoint_of_adjacent_vertices() {
        let x = build_surface(&alpha_lifting(2).unwrap().perturbed(&Rat::new(1, 100), 1)).unwrap();
        let t = x.triangulation();
        for tri in t.cell_ids(2) {
            let co = &t.cell(tri).cofacets;
            if co.len() == 2 {
                let mid = scale3(&add3(x.vertex(co[0]), x.vertex(co[1])), &Rat::new(1, 2));
                assert_eq!(x.locate(&mid).unwrap().cell, tri);
            }
        }
        assert!(x.locate(&point(100, -37, 5)).is_none());
    }

    #[test]
    fn orthogonality_and_boundedness() {
        for delta in 1..=3 {
            let x = build_surface(&alpha_lifting(delta).unwrap()).unwrap();
            let t = x.triangulation();
            for c in 0..t.cells().len() {
                let cell = t.cell(c);
                if cell.dim == 0 || cell.dim == 3 {
                    continue;
                }
                let pts = t.cell_points(c);
                for a in &pts[1..] {
                    let e = int_point(a.sub(&pts[0]));
                    for s in x.dual_span(c) {
                        assert!(dot3(&e, &s).is_zero());
                    }
                }
                assert_eq!(t.on_boundary(c), !x.is_bounded(c));
            }
        }
    }

    #[test]
    fn boundary_cycles() {
        let x = build_surface(&alpha_lifting(3).unwrap()).unwrap();
        let t = x.triangulation();
        for e in t.cell_ids(1) {
            let cyc = x.boundary_cycle(e);
            let nverts = cyc
                .iter()
                .filter(|b| matches!(b, BoundaryItem::Vertex(_)))
                .count();
            assert_eq!(nverts, x.generators(e).len());
            let nrays = cyc.len() - nverts;
            assert_eq!(nrays, if t.on_boundary(e) { 2 } else { 0 });
            for w in cyc.windows(2) {
                if let [BoundaryItem::Vertex(a), BoundaryItem::Vertex(b)] = w {
                    let shared: Vec<_> = t
                        .cell(*a)
                        .verts
                        .iter()
                        .filter(|v| t.cell(*b).verts.contains(v))
                        .collect();
                    assert_eq!(shared.len(), 3);
                }
            }
        }
    }
}
