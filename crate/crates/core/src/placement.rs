//! Combinatorial placements of tropical lines on a subdivision, and their
//! exact realization on a surface.
//!
//! A placement fixes the cell of each line vertex, and for every edge or ray
//! the chain of surface vertices it passes through. Which cell an edge enters
//! when leaving a point is forced by the cell of that point: in direction `d`
//! it is spanned by the lattice points of the cell maximizing `<a, d>`. An
//! edge can pass through the surface vertex dual to a tetrahedron `T` only if
//! it arrives in the cell minimizing `<a, d>` over `T`; it then leaves in the
//! cell maximizing it. A ray is free of further vertices when its cell lies in
//! the facet of the simplex with outer normal equal to the ray direction.
//!
//! Given a surface, the lines with a given placement form a relatively open
//! polyhedron in the unknowns (v1, edge length, one position per dot),
//! described by a small linear system.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::lattice::{dot, Dir, LatticePoint};
use crate::line::{
    edge_direction, CombinatorialPosition, LineSubcomplex, TropicalLine, VertexDeco,
};
use crate::linsys::{AffineForm, LinSystem, SolutionSet};
use crate::rat::{int_point, Point3, Rat};
use crate::subdivision::{CellId, Triangulation};
use crate::surface::TropicalSurface;

/// The walk of one edge or ray: the tetrahedra whose dual vertices it passes
/// (in order) and the cells of the open pieces between them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chain {
    pub dots: Vec<CellId>,
    pub pieces: Vec<CellId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Placement {
    /// Rays at `v1`; contains `w1` for non-degenerate placements.
    pub pair: [Dir; 2],
    pub v1_cell: CellId,
    pub v2_cell: CellId,
    /// `None` for degenerate placements.
    pub middle: Option<Chain>,
    /// Chains of the rays at `v1`, in the order of `pair` (all four
    /// directions for degenerate placements).
    pub rays1: Vec<(Dir, Chain)>,
    pub rays2: Vec<(Dir, Chain)>,
}

/// Cell spanned by the points of `cell` maximizing `<a, d>`, if it has at
/// least two points.
fn germ(tri: &Triangulation, cell: CellId, d: [i64; 3], maximize: bool) -> Option<CellId> {
    let verts = &tri.cell(cell).verts;
    let val = |i: usize| {
        let v = dot(tri.point(i).0, d);
        if maximize {
            v
        } else {
            -v
        }
    };
    let best = verts.iter().map(|&i| val(i)).max()?;
    let sel: Vec<usize> = verts.iter().copied().filter(|&i| val(i) == best).collect();
    if sel.len() < 2 {
        return None;
    }
    tri.find(&sel)
}

fn inside_facet(tri: &Triangulation, cell: CellId, w: Dir) -> bool {
    tri.cell(cell)
        .verts
        .iter()
        .all(|&i| w.on_facet(&tri.point(i), tri.delta()))
}

/// Passing through the vertex dual to a tetrahedron containing `piece`.
fn crossings(tri: &Triangulation, piece: CellId, d: [i64; 3]) -> Vec<(CellId, CellId)> {
    tri.cofaces_of_dim(piece, 3)
        .into_iter()
        .filter(|&t| germ(tri, t, d, false) == Some(piece))
        .filter_map(|t| germ(tri, t, d, true).map(|out| (t, out)))
        .collect()
}

/// All chains of a ray in direction `w` leaving a point of the cell `start`.
pub fn ray_chains(tri: &Triangulation, start: CellId, w: Dir, max_dots: usize) -> Vec<Chain> {
    let d = w.vector();
    let Some(first) = germ(tri, start, d, true) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut stack = vec![Chain {
        dots: Vec::new(),
        pieces: vec![first],
    }];
    while let Some(ch) = stack.pop() {
        let last = *ch.pieces.last().unwrap();
        if inside_facet(tri, last, w) {
            out.push(ch.clone());
        }
        if ch.dots.len() < max_dots {
            for (t, next) in crossings(tri, last, d) {
                let mut c = ch.clone();
                c.dots.push(t);
                c.pieces.push(next);
                stack.push(c);
            }
        }
    }
    out.sort();
    out
}

/// All chains of the bounded edge leaving a point of `start` in direction
/// `u`, paired with a compatible cell for the far vertex.
pub fn middle_chains(
    tri: &Triangulation,
    start: CellId,
    u: [i64; 3],
    max_dots: usize,
) -> Vec<(Chain, CellId)> {
    let Some(first) = germ(tri, start, u, true) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut stack = vec![Chain {
        dots: Vec::new(),
        pieces: vec![first],
    }];
    while let Some(ch) = stack.pop() {
        let last = *ch.pieces.last().unwrap();
        for dim in tri.cell(last).dim..=3 {
            for end in tri.cofaces_of_dim(last, dim) {
                if germ(tri, end, u, false) == Some(last) {
                    out.push((ch.clone(), end));
                }
            }
        }
        if ch.dots.len() < max_dots {
            for (t, next) in crossings(tri, last, u) {
                let mut c = ch.clone();
                c.dots.push(t);
                c.pieces.push(next);
                stack.push(c);
            }
        }
    }
    out.sort();
    out
}

fn product<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut acc: Vec<Vec<T>> = vec![Vec::new()];
    for l in lists {
        let mut next = Vec::with_capacity(acc.len() * l.len());
        for prefix in &acc {
            for x in l {
                let mut p = prefix.clone();
                p.push(x.clone());
                next.push(p);
            }
        }
        acc = next;
    }
    acc
}

/// The three ray pairs containing `w1`.
pub fn canonical_pairs() -> [[Dir; 2]; 3] {
    let d = |i| Dir::from_index(i).unwrap();
    [[d(1), d(2)], [d(1), d(3)], [d(1), d(4)]]
}

fn complement(pair: [Dir; 2]) -> [Dir; 2] {
    let rest: Vec<Dir> = Dir::ALL.into_iter().filter(|d| !pair.contains(d)).collect();
    [rest[0], rest[1]]
}

/// Every non-degenerate placement with `v1` in the cell `v1_cell`.
pub fn placements_from(tri: &Triangulation, v1_cell: CellId, max_dots: usize) -> Vec<Placement> {
    let mut out = Vec::new();
    for pair in canonical_pairs() {
        let r1: Vec<Vec<Chain>> = pair
            .iter()
            .map(|&w| ray_chains(tri, v1_cell, w, max_dots))
            .collect();
        if r1.iter().any(Vec::is_empty) {
            continue;
        }
        let other = complement(pair);
        for (mid, v2_cell) in middle_chains(tri, v1_cell, edge_direction(pair), max_dots) {
            let r2: Vec<Vec<Chain>> = other
                .iter()
                .map(|&w| ray_chains(tri, v2_cell, w, max_dots))
                .collect();
            if r2.iter().any(Vec::is_empty) {
                continue;
            }
            for a in product(&r1) {
                for b in product(&r2) {
                    out.push(Placement {
                        pair,
                        v1_cell,
                        v2_cell,
                        middle: Some(mid.clone()),
                        rays1: pair.iter().copied().zip(a.iter().cloned()).collect(),
                        rays2: other.iter().copied().zip(b.iter().cloned()).collect(),
                    });
                }
            }
        }
    }
    out
}

/// Degenerate placements with the vertex in `cell`.
pub fn degenerate_placements_from(
    tri: &Triangulation,
    cell: CellId,
    max_dots: usize,
) -> Vec<Placement> {
    let r: Vec<Vec<Chain>> = Dir::ALL
        .iter()
        .map(|&w| ray_chains(tri, cell, w, max_dots))
        .collect();
    if r.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    product(&r)
        .into_iter()
        .map(|chains| Placement {
            pair: canonical_pairs()[0],
            v1_cell: cell,
            v2_cell: cell,
            middle: None,
            rays1: Dir::ALL.iter().copied().zip(chains).collect(),
            rays2: Vec::new(),
        })
        .collect()
}

/// Every placement on the subdivision (cells of dimension at least one host
/// the vertices).
pub fn all_placements(tri: &Triangulation, max_dots: usize, degenerate: bool) -> Vec<Placement> {
    let mut out = Vec::new();
    for c in 0..tri.cells().len() {
        if tri.cell(c).dim == 0 {
            continue;
        }
        out.extend(placements_from(tri, c, max_dots));
        if degenerate {
            out.extend(degenerate_placements_from(tri, c, max_dots));
        }
    }
    out
}

impl Placement {
    pub fn is_degenerate(&self) -> bool {
        self.middle.is_none()
    }

    fn all_chains(&self) -> impl Iterator<Item = &Chain> {
        self.middle
            .iter()
            .chain(self.rays1.iter().map(|(_, c)| c))
            .chain(self.rays2.iter().map(|(_, c)| c))
    }

    pub fn position(&self, tri: &Triangulation) -> CombinatorialPosition {
        let xd = |c: CellId| (3 - tri.cell(c).dim) as u8;
        match &self.middle {
            None => {
                let mut dots = [0u8; 4];
                for (i, (_, c)) in self.rays1.iter().enumerate() {
                    dots[i] = c.dots.len() as u8;
                }
                dots.sort();
                CombinatorialPosition::Degenerate {
                    xdim: xd(self.v1_cell),
                    ray_dots: dots,
                }
            }
            Some(m) => {
                let a = VertexDeco::new(
                    xd(self.v1_cell),
                    [
                        self.rays1[0].1.dots.len() as u8,
                        self.rays1[1].1.dots.len() as u8,
                    ],
                );
                let b = VertexDeco::new(
                    xd(self.v2_cell),
                    [
                        self.rays2[0].1.dots.len() as u8,
                        self.rays2[1].1.dots.len() as u8,
                    ],
                );
                let mx = m.dots.is_empty().then(|| xd(m.pieces[0]));
                CombinatorialPosition::line(a, b, m.dots.len() as u8, mx)
            }
        }
    }

    /// Every cell met by a line with this placement.
    pub fn cells(&self) -> Vec<CellId> {
        let mut ids = vec![self.v1_cell, self.v2_cell];
        for c in self.all_chains() {
            ids.extend(c.dots.iter().copied());
            ids.extend(c.pieces.iter().copied());
        }
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn subcomplex(&self, tri: &Triangulation) -> LineSubcomplex {
        LineSubcomplex::from_simplices(self.cells().into_iter().map(|c| tri.cell_points(c)))
    }

    /// Number of dots on all edges and rays.
    pub fn dot_count(&self) -> usize {
        self.all_chains().map(|c| c.dots.len()).sum()
    }

    /// Unknowns: `v1` (0..3), then the edge length `t` (non-degenerate
    /// only), then one parameter per dot in the order middle, rays1, rays2.
    pub fn nvars(&self) -> usize {
        3 + usize::from(!self.is_degenerate()) + self.dot_count()
    }

    /// Linear system whose solutions are the lines with this placement on
    /// `x`. With `strict`, every line vertex, dot and piece lies in the
    /// relative interior of its cell, so solutions have exactly this
    /// placement; otherwise closed cells are used.
    pub fn system(&self, x: &TropicalSurface, strict: bool) -> LinSystem {
        let n = self.nvars();
        let mut sys = LinSystem::new(n);
        let push_pos = |sys: &mut LinSystem, f: AffineForm| {
            if strict {
                sys.gt(f)
            } else {
                sys.ge(f)
            }
        };
        let v1: [AffineForm; 3] = [
            AffineForm::var(n, 0),
            AffineForm::var(n, 1),
            AffineForm::var(n, 2),
        ];
        x.cell_constraints_at(self.v1_cell, &mut sys, &v1, strict);
        let mut next = 3;
        let (v2, t_var) = match &self.middle {
            None => (v1.clone(), None),
            Some(_) => {
                let t = next;
                next += 1;
                push_pos(&mut sys, AffineForm::var(n, t));
                let u = edge_direction(self.pair);
                let v2: [AffineForm; 3] = std::array::from_fn(|k| {
                    let mut f = v1[k].clone();
                    f.coeffs[t] = Rat::from_int(u[k]);
                    f
                });
                x.cell_constraints_at(self.v2_cell, &mut sys, &v2, strict);
                (v2, Some(t))
            }
        };
        let mut chain_dots = |sys: &mut LinSystem,
                              base: &[AffineForm; 3],
                              d: [i64; 3],
                              chain: &Chain,
                              limit: Option<usize>| {
            let mut prev: Option<usize> = None;
            for &tet in &chain.dots {
                let s = next;
                next += 1;
                let w = x.vertex(tet);
                for k in 0..3 {
                    let mut f = base[k].clone();
                    f.coeffs[s] = f.coeffs[s].clone() + Rat::from_int(d[k]);
                    f.constant = f.constant.clone() - &w[k];
                    sys.eq(f);
                }
                match prev {
                    None => push_pos(sys, AffineForm::var(n, s)),
                    Some(p) => push_pos(sys, AffineForm::var(n, s).sub(&AffineForm::var(n, p))),
                }
                prev = Some(s);
            }
            if let (Some(p), Some(t)) = (prev, limit) {
                push_pos(sys, AffineForm::var(n, t).sub(&AffineForm::var(n, p)));
            }
        };
        if let Some(m) = &self.middle {
            chain_dots(&mut sys, &v1, edge_direction(self.pair), m, t_var);
        }
        for (w, c) in &self.rays1 {
            chain_dots(&mut sys, &v1, w.vector(), c, None);
        }
        for (w, c) in &self.rays2 {
            chain_dots(&mut sys, &v2, w.vector(), c, None);
        }
        sys
    }

    /// The line for a solution of [`Self::system`].
    pub fn line_at(&self, sol: &[Rat]) -> TropicalLine {
        let v1: Point3 = [sol[0].clone(), sol[1].clone(), sol[2].clone()];
        match &self.middle {
            None => TropicalLine::degenerate(v1),
            Some(_) => TropicalLine::new(v1, self.pair, &sol[3]).expect("non-negative length"),
        }
    }

    /// Surface vertices passed by the line, in a fixed order.
    pub fn dot_points(&self, x: &TropicalSurface) -> Vec<Point3> {
        self.all_chains()
            .flat_map(|c| c.dots.iter().map(|&t| x.vertex(t).clone()))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub enum Realization {
    None,
    Unique(TropicalLine),
    Family(Family),
}

/// A positive-dimensional set of lines sharing a placement.
#[derive(Clone, Debug)]
pub struct Family {
    pub dim: usize,
    pub representative: TropicalLine,
    /// Two points common to every member, when they exist.
    pub witness: Option<(Point3, Point3)>,
    /// A few distinct members.
    pub samples: Vec<TropicalLine>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq, PartialOrd, Ord)]
pub struct WitnessReport {
    pub witness: [Vec<String>; 2],
}

/// Points shared by all solutions: the dots, and `v1` or `v2` (with a point on
/// one of their rays) when the solution set keeps them fixed.
fn family_witness(
    p: &Placement,
    x: &TropicalSurface,
    set: &SolutionSet,
) -> Option<(Point3, Point3)> {
    let mut pts: Vec<Point3> = Vec::new();
    for d in p.dot_points(x) {
        if !pts.contains(&d) {
            pts.push(d);
        }
    }
    let fixed = |coeff: &dyn Fn(&[Rat]) -> [Rat; 3]| {
        set.directions
            .iter()
            .all(|d| coeff(d).iter().all(Rat::is_zero))
    };
    let v1_fixed = fixed(&|d: &[Rat]| [d[0].clone(), d[1].clone(), d[2].clone()]);
    let sol = &set.relint_point;
    if v1_fixed {
        let v1: Point3 = [sol[0].clone(), sol[1].clone(), sol[2].clone()];
        let on_ray = crate::rat::add3(&v1, &int_point(p.pair[0].vector()));
        for q in [v1, on_ray] {
            if !pts.contains(&q) {
                pts.push(q);
            }
        }
    }
    if p.middle.is_some() {
        let u = edge_direction(p.pair);
        let v2_fixed =
            fixed(&|d: &[Rat]| std::array::from_fn(|k| &d[k] + &(&d[3] * &Rat::from_int(u[k]))));
        if v2_fixed {
            let v2 = crate::rat::add3(
                &[sol[0].clone(), sol[1].clone(), sol[2].clone()],
                &crate::rat::scale3(&int_point(u), &sol[3]),
            );
            let w = complement(p.pair)[0];
            let on_ray = crate::rat::add3(&v2, &int_point(w.vector()));
            for q in [v2, on_ray] {
                if !pts.contains(&q) {
                    pts.push(q);
                }
            }
        }
    }
    (pts.len() >= 2).then(|| (pts[0].clone(), pts[1].clone()))
}

/// Solves the placement system on `x`.
pub fn realize_placement(p: &Placement, x: &TropicalSurface, strict: bool) -> Realization {
    let sys = p.system(x, strict);
    let Some(set) = sys.solution_set() else {
        return Realization::None;
    };
    if set.dim == 0 {
        return Realization::Unique(p.line_at(&set.relint_point));
    }
    let samples: Vec<TropicalLine> = set.sample(3).iter().map(|s| p.line_at(s)).collect();
    Realization::Family(Family {
        dim: set.dim,
        representative: p.line_at(&set.relint_point),
        witness: family_witness(p, x, &set),
        samples,
    })
}

/// Point sets of the cells of a placement, for reporting.
pub fn placement_points(p: &Placement, tri: &Triangulation) -> BTreeSet<Vec<LatticePoint>> {
    p.cells().into_iter().map(|c| tri.cell_points(c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::alpha_lifting;
    use crate::line::{line_on_surface, position_from_trace, subcomplex_from_trace, trace_line};
    use crate::surface::build_surface;

    #[test]
    fn plane_lines_form_families() {
        // On a tropical plane every line through the vertex lies on it; lines
        // with v1 at the vertex come in one-parameter families (the length).
        let x = build_surface(&alpha_lifting(1).unwrap()).unwrap();
        let tri = x.triangulation();
        let tet = tri.maximal().start;
        let ps = placements_from(tri, tet, 1);
        assert!(!ps.is_empty());
        let mut found = 0;
        for p in &ps {
            if let Realization::Family(f) = realize_placement(p, &x, true) {
                found += 1;
                assert_eq!(f.dim, 1);
                for l in &f.samples {
                    assert!(line_on_surface(l, &x));
                }
                let (a, b) = f.witness.expect("v1 is fixed");
                for l in &f.samples {
                    assert!(l.contains(&a) && l.contains(&b));
                }
            }
        }
        assert_eq!(found, 3);
    }

    #[test]
    fn strict_solutions_reproduce_their_placement() {
        let l = alpha_lifting(3).unwrap().perturbed(&Rat::new(1, 1000), 1);
        let x = build_surface(&l).unwrap();
        let tri = x.triangulation();
        let mut lines = 0;
        for p in all_placements(tri, 1, false) {
            if let Realization::Unique(line) = realize_placement(&p, &x, true) {
                lines += 1;
                let t = trace_line(&line, &x).expect("realized line lies on the surface");
                assert_eq!(position_from_trace(&t, &x), p.position(tri));
                assert_eq!(subcomplex_from_trace(&t, &x), p.subcomplex(tri));
            }
        }
        assert!(lines > 0);
    }
}
