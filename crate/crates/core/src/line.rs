//! Tropical lines in R^3 and their position on a tropical surface.
//!
//! A line has two vertices `v1`, `v2`; two rays leave each vertex and the
//! bounded edge runs from `v1` to `v2` in direction `-(w_i + w_j)`, where
//! `w_i, w_j` are the rays at `v1`. Lines are kept in a canonical form in
//! which `w1` is attached to `v1`, so equal lines compare equal.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Dir, LatticePoint};
use crate::rat::{add3, int_point, scale3, sub3, Point3, Rat};
use crate::subdivision::CellId;
use crate::surface::TropicalSurface;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LineType {
    /// `((12)(34))`
    T12,
    /// `((13)(24))`
    T13,
    /// `((14)(23))`
    T14,
    Degenerate,
}

impl fmt::Display for LineType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LineType::T12 => "((12)(34))",
            LineType::T13 => "((13)(24))",
            LineType::T14 => "((14)(23))",
            LineType::Degenerate => "degenerate",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TropicalLine {
    v1: Point3,
    v2: Point3,
    rays1: [Dir; 2],
    rays2: [Dir; 2],
}

fn dir(i: u8) -> Dir {
    Dir::from_index(i).unwrap()
}

fn complement(pair: [Dir; 2]) -> [Dir; 2] {
    let rest: Vec<Dir> = Dir::ALL.into_iter().filter(|d| !pair.contains(d)).collect();
    [rest[0], rest[1]]
}

/// `-(w_i + w_j)` for the rays at a vertex; the direction of the bounded
/// edge leaving that vertex.
pub fn edge_direction(pair: [Dir; 2]) -> [i64; 3] {
    let a = pair[0].vector();
    let b = pair[1].vector();
    [-(a[0] + b[0]), -(a[1] + b[1]), -(a[2] + b[2])]
}

impl TropicalLine {
    /// The line with vertex `v1` carrying the rays `pair` and bounded edge of
    /// length `t` (in units of `-(w_i + w_j)`). `t = 0` gives a degenerate line.
    pub fn new(v1: Point3, pair: [Dir; 2], t: &Rat) -> Result<TropicalLine> {
        if pair[0] == pair[1] {
            return Err(Error::Parse("the two rays at a vertex must differ".into()));
        }
        if t.is_negative() {
            return Err(Error::Parse("negative edge length".into()));
        }
        if t.is_zero() {
            return Ok(Self::degenerate(v1));
        }
        let v2 = add3(&v1, &scale3(&int_point(edge_direction(pair)), t));
        let mut p1 = pair;
        p1.sort();
        let mut p2 = complement(p1);
        p2.sort();
        if p1[0] == dir(1) {
            Ok(TropicalLine {
                v1,
                v2,
                rays1: p1,
                rays2: p2,
            })
        } else {
            Ok(TropicalLine {
                v1: v2,
                v2: v1,
                rays1: p2,
                rays2: p1,
            })
        }
    }

    pub fn degenerate(v: Point3) -> TropicalLine {
        TropicalLine {
            v1: v.clone(),
            v2: v,
            rays1: [dir(1), dir(2)],
            rays2: [dir(3), dir(4)],
        }
    }

    pub fn v1(&self) -> &Point3 {
        &self.v1
    }

    pub fn v2(&self) -> &Point3 {
        &self.v2
    }

    pub fn rays1(&self) -> [Dir; 2] {
        self.rays1
    }

    pub fn rays2(&self) -> [Dir; 2] {
        self.rays2
    }

    pub fn is_degenerate(&self) -> bool {
        self.v1 == self.v2
    }

    pub fn line_type(&self) -> LineType {
        if self.is_degenerate() {
            return LineType::Degenerate;
        }
        match self.rays1[1].index() {
            2 => LineType::T12,
            3 => LineType::T13,
            _ => LineType::T14,
        }
    }

    /// Direction of the bounded edge from `v1` to `v2`.
    pub fn direction(&self) -> [i64; 3] {
        edge_direction(self.rays1)
    }

    /// Length of the bounded edge in units of [`Self::direction`].
    pub fn length(&self) -> Rat {
        let u = self.direction();
        let d = sub3(&self.v2, &self.v1);
        (0..3)
            .find(|&k| u[k] != 0)
            .map(|k| &d[k] / &Rat::from_int(u[k]))
            .unwrap()
    }

    /// Sum of the primitive directions leaving each vertex; both are zero.
    pub fn balancing(&self) -> [[i64; 3]; 2] {
        if self.is_degenerate() {
            let s = Dir::ALL.iter().fold([0; 3], |acc, d| {
                let v = d.vector();
                [acc[0] + v[0], acc[1] + v[1], acc[2] + v[2]]
            });
            return [s, s];
        }
        let sum = |pair: [Dir; 2], edge: [i64; 3]| {
            let a = pair[0].vector();
            let b = pair[1].vector();
            [
                a[0] + b[0] + edge[0],
                a[1] + b[1] + edge[1],
                a[2] + b[2] + edge[2],
            ]
        };
        let u = self.direction();
        [sum(self.rays1, u), sum(self.rays2, [-u[0], -u[1], -u[2]])]
    }

    /// All rays as (start, direction).
    pub fn rays(&self) -> Vec<(Point3, Dir)> {
        if self.is_degenerate() {
            return Dir::ALL.iter().map(|&d| (self.v1.clone(), d)).collect();
        }
        let mut out: Vec<(Point3, Dir)> =
            self.rays1.iter().map(|&d| (self.v1.clone(), d)).collect();
        out.extend(self.rays2.iter().map(|&d| (self.v2.clone(), d)));
        out
    }

    pub fn contains(&self, p: &Point3) -> bool {
        let on_ray =
            |v: &Point3, d: Dir| ray_param(v, d.vector(), p).is_some_and(|s| !s.is_negative());
        if self.rays().iter().any(|(v, d)| on_ray(v, *d)) {
            return true;
        }
        if self.is_degenerate() {
            return false;
        }
        match ray_param(&self.v1, self.direction(), p) {
            Some(s) => !s.is_negative() && s <= self.length(),
            None => false,
        }
    }
}

impl fmt::Debug for TropicalLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} v1={} v2={}",
            self.line_type(),
            crate::rat::fmt_point(&self.v1),
            crate::rat::fmt_point(&self.v2)
        )
    }
}

/// `s` with `p = v + s * d`, if any.
fn ray_param(v: &Point3, d: [i64; 3], p: &Point3) -> Option<Rat> {
    let diff = sub3(p, v);
    let k = (0..3).find(|&k| d[k] != 0)?;
    let s = &diff[k] / &Rat::from_int(d[k]);
    let ok = (0..3).all(|i| diff[i] == &s * &Rat::from_int(d[i]));
    ok.then_some(s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LineThrough {
    UniqueLine(TropicalLine),
    InfinitelyMany,
    SamePoint,
}

/// The tropical line through two points, when it is unique.
///
/// Writing `Q - P` in homogeneous coordinates `(d1, d2, d3, 0)`, the line is
/// unique exactly when these four numbers are distinct. Sorted decreasingly
/// as `d_a > d_b > d_d > d_c`, `P` lies on the `w_a` ray and `Q` on the
/// `w_c` ray, with `v1 = P - (d_a - d_b) w_a` and edge length `d_b - d_d`.
pub fn unique_line_through(p: &Point3, q: &Point3) -> LineThrough {
    if p == q {
        return LineThrough::SamePoint;
    }
    let d = sub3(q, p);
    let h = [d[0].clone(), d[1].clone(), d[2].clone(), Rat::zero()];
    for i in 0..4 {
        for j in i + 1..4 {
            if h[i] == h[j] {
                return LineThrough::InfinitelyMany;
            }
        }
    }
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| h[j].cmp(&h[i]));
    let [a, b, dd, _c] = order;
    let s = &h[a] - &h[b];
    let t = &h[b] - &h[dd];
    let wa = Dir::ALL[a];
    let wb = Dir::ALL[b];
    let v1 = sub3(p, &scale3(&int_point(wa.vector()), &s));
    let line = TropicalLine::new(v1, [wa, wb], &t).expect("distinct rays, positive length");
    debug_assert!(line.contains(p) && line.contains(q));
    LineThrough::UniqueLine(line)
}

/// The walk of one edge or ray of a line through the surface.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeTrace {
    /// Cells (as triangulation cells) of the open pieces, in order.
    pub pieces: Vec<CellId>,
    /// Interior points where the minimal cell changes, with that cell.
    pub events: Vec<(Point3, CellId)>,
}

impl EdgeTrace {
    /// Number of surface vertices in the relative interior of the edge.
    pub fn dots(&self, x: &TropicalSurface) -> u8 {
        self.events.iter().filter(|(_, c)| x.xdim(*c) == 0).count() as u8
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineTrace {
    pub v1_cell: CellId,
    pub v2_cell: CellId,
    /// `None` for degenerate lines.
    pub middle: Option<EdgeTrace>,
    /// Rays at `v1` (all four for degenerate lines).
    pub rays1: Vec<EdgeTrace>,
    pub rays2: Vec<EdgeTrace>,
}

impl LineTrace {
    fn all_edges(&self) -> impl Iterator<Item = &EdgeTrace> {
        self.middle
            .iter()
            .chain(self.rays1.iter())
            .chain(self.rays2.iter())
    }
}

/// Follows `x + s d` for `s` in `(0, length)` (or `(0, inf)`) through the
/// surface, starting from a point whose maximizing set is `start`.
/// Returns `None` as soon as the path leaves the surface.
fn walk(
    x: &TropicalSurface,
    from: &Point3,
    start: &[usize],
    d: [i64; 3],
    length: Option<&Rat>,
) -> Option<EdgeTrace> {
    let tri = x.triangulation();
    let npts = tri.points().len();
    let mut trace = EdgeTrace::default();
    let mut cur = from.clone();
    let mut cur_set: Vec<usize> = start.to_vec();
    let mut travelled = Rat::zero();
    let slope = |a: usize| crate::lattice::dot(tri.point(a).0, d);
    loop {
        let best = cur_set.iter().map(|&a| slope(a)).max().unwrap();
        let germ: Vec<usize> = cur_set
            .iter()
            .copied()
            .filter(|&a| slope(a) == best)
            .collect();
        if germ.len() < 2 {
            return None;
        }
        trace.pieces.push(tri.find(&germ)?);
        let a0 = germ[0];
        let top = x.monomial(a0, &cur);
        let mut next: Option<Rat> = None;
        for b in 0..npts {
            let rate = slope(b) - best;
            if rate <= 0 {
                continue;
            }
            let s = (&top - &x.monomial(b, &cur)) / Rat::from_int(rate);
            if next.as_ref().is_none_or(|n| s < *n) {
                next = Some(s);
            }
        }
        let Some(step) = next else {
            return Some(trace);
        };
        if let Some(len) = length {
            if &travelled + &step >= *len {
                return Some(trace);
            }
        }
        travelled += &step;
        cur = add3(&cur, &scale3(&int_point(d), &step));
        cur_set = x.argmax(&cur);
        trace.events.push((cur.clone(), tri.find(&cur_set)?));
    }
}

/// Walks every edge and ray of `l` through `x`; `None` when `l` is not
/// contained in the surface.
pub fn trace_line(l: &TropicalLine, x: &TropicalSurface) -> Option<LineTrace> {
    let s1 = x.argmax(l.v1());
    if s1.len() < 2 {
        return None;
    }
    let v1_cell = x.triangulation().find(&s1)?;
    if l.is_degenerate() {
        let rays1 = Dir::ALL
            .iter()
            .map(|d| walk(x, l.v1(), &s1, d.vector(), None))
            .collect::<Option<Vec<_>>>()?;
        return Some(LineTrace {
            v1_cell,
            v2_cell: v1_cell,
            middle: None,
            rays1,
            rays2: Vec::new(),
        });
    }
    let s2 = x.argmax(l.v2());
    if s2.len() < 2 {
        return None;
    }
    let v2_cell = x.triangulation().find(&s2)?;
    let middle = walk(x, l.v1(), &s1, l.direction(), Some(&l.length()))?;
    let rays1 = l
        .rays1()
        .iter()
        .map(|d| walk(x, l.v1(), &s1, d.vector(), None))
        .collect::<Option<Vec<_>>>()?;
    let rays2 = l
        .rays2()
        .iter()
        .map(|d| walk(x, l.v2(), &s2, d.vector(), None))
        .collect::<Option<Vec<_>>>()?;
    Some(LineTrace {
        v1_cell,
        v2_cell,
        middle: Some(middle),
        rays1,
        rays2,
    })
}

pub fn line_on_surface(l: &TropicalLine, x: &TropicalSurface) -> bool {
    trace_line(l, x).is_some()
}

/// Decoration of one vertex of the line graph: the dimension of the minimal
/// surface cell at the vertex and the dot counts on its two rays (sorted).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct VertexDeco {
    pub xdim: u8,
    pub ray_dots: [u8; 2],
}

impl VertexDeco {
    pub fn new(xdim: u8, mut ray_dots: [u8; 2]) -> Self {
        ray_dots.sort();
        VertexDeco { xdim, ray_dots }
    }

    /// Number of rays at this vertex carrying at least one dot.
    pub fn trespassing_rays(&self) -> u8 {
        self.ray_dots.iter().filter(|&&d| d > 0).count() as u8
    }
}

/// The decorated graph of a line on a surface, canonical up to graph
/// automorphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CombinatorialPosition {
    Line {
        a: VertexDeco,
        b: VertexDeco,
        middle_dots: u8,
        /// Dimension of the surface cell containing the open bounded edge,
        /// when that edge carries no dot.
        middle_xdim: Option<u8>,
    },
    Degenerate {
        xdim: u8,
        ray_dots: [u8; 4],
    },
}

impl CombinatorialPosition {
    pub fn line(a: VertexDeco, b: VertexDeco, middle_dots: u8, middle_xdim: Option<u8>) -> Self {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        CombinatorialPosition::Line {
            a,
            b,
            middle_dots,
            middle_xdim,
        }
    }

    /// Largest number of dots on a single edge.
    pub fn max_dots(&self) -> u8 {
        match self {
            CombinatorialPosition::Line {
                a, b, middle_dots, ..
            } => *[a.ray_dots[1], b.ray_dots[1], *middle_dots]
                .iter()
                .max()
                .unwrap(),
            CombinatorialPosition::Degenerate { ray_dots, .. } => *ray_dots.iter().max().unwrap(),
        }
    }

    /// Trespassing edges adjacent to each vertex never exceed the dimension
    /// of the vertex cell.
    pub fn respects_trespass_bound(&self) -> bool {
        match self {
            CombinatorialPosition::Line {
                a, b, middle_dots, ..
            } => {
                let m = (*middle_dots > 0) as u8;
                a.trespassing_rays() + m <= a.xdim && b.trespassing_rays() + m <= b.xdim
            }
            CombinatorialPosition::Degenerate { xdim, ray_dots } => {
                ray_dots.iter().filter(|&&d| d > 0).count() as u8 <= *xdim
            }
        }
    }
}

impl fmt::Display for CombinatorialPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CombinatorialPosition::Line {
                a, b, middle_dots, ..
            } => write!(
                f,
                "[d{} {:?}]-{}-[d{} {:?}]",
                a.xdim, a.ray_dots, middle_dots, b.xdim, b.ray_dots
            ),
            CombinatorialPosition::Degenerate { xdim, ray_dots } => {
                write!(f, "[d{xdim} {ray_dots:?}]")
            }
        }
    }
}

pub fn position_from_trace(t: &LineTrace, x: &TropicalSurface) -> CombinatorialPosition {
    let d1 = x.xdim(t.v1_cell) as u8;
    match &t.middle {
        None => {
            let mut dots = [0u8; 4];
            for (i, r) in t.rays1.iter().enumerate() {
                dots[i] = r.dots(x);
            }
            dots.sort();
            CombinatorialPosition::Degenerate {
                xdim: d1,
                ray_dots: dots,
            }
        }
        Some(m) => {
            let a = VertexDeco::new(d1, [t.rays1[0].dots(x), t.rays1[1].dots(x)]);
            let b = VertexDeco::new(
                x.xdim(t.v2_cell) as u8,
                [t.rays2[0].dots(x), t.rays2[1].dots(x)],
            );
            let md = m.dots(x);
            let mx = (md == 0 && m.pieces.len() == 1).then(|| x.xdim(m.pieces[0]) as u8);
            CombinatorialPosition::line(a, b, md, mx)
        }
    }
}

pub fn combinatorial_position(
    l: &TropicalLine,
    x: &TropicalSurface,
) -> Result<CombinatorialPosition> {
    let t = trace_line(l, x).ok_or(Error::LineNotOnSurface)?;
    Ok(position_from_trace(&t, x))
}

/// A subcomplex of a subdivision given by point sets of its cells of
/// dimension 1 to 3 (closed under taking faces).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LineSubcomplex {
    pub cells: BTreeSet<Vec<LatticePoint>>,
}

impl LineSubcomplex {
    /// Closure under faces of the given simplices (as point lists).
    pub fn from_simplices<I: IntoIterator<Item = Vec<LatticePoint>>>(simplices: I) -> Self {
        let mut cells = BTreeSet::new();
        for mut s in simplices {
            s.sort();
            let n = s.len();
            for mask in 1u32..(1 << n) {
                if mask.count_ones() >= 2 {
                    cells.insert(
                        (0..n)
                            .filter(|b| mask & (1 << b) != 0)
                            .map(|b| s[b])
                            .collect(),
                    );
                }
            }
        }
        LineSubcomplex { cells }
    }

    pub fn of_dim(&self, dim: usize) -> Vec<&Vec<LatticePoint>> {
        self.cells.iter().filter(|c| c.len() == dim + 1).collect()
    }

    /// Maximal cells with respect to inclusion.
    pub fn maximal(&self) -> Vec<&Vec<LatticePoint>> {
        self.cells
            .iter()
            .filter(|c| {
                !self
                    .cells
                    .iter()
                    .any(|d| d.len() > c.len() && c.iter().all(|p| d.contains(p)))
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let cells: Vec<&Vec<LatticePoint>> = self.cells.iter().collect();
        if cells.is_empty() {
            return true;
        }
        let mut seen = vec![false; cells.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..cells.len() {
                if !seen[j] && cells[i].iter().any(|p| cells[j].contains(p)) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn report(&self) -> SubcomplexReport {
        SubcomplexReport {
            tetrahedra: self.of_dim(3).into_iter().cloned().collect(),
            triangles: self.of_dim(2).into_iter().cloned().collect(),
            edges: self.of_dim(1).into_iter().cloned().collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubcomplexReport {
    pub tetrahedra: Vec<Vec<LatticePoint>>,
    pub triangles: Vec<Vec<LatticePoint>>,
    pub edges: Vec<Vec<LatticePoint>>,
}

pub fn subcomplex_from_trace(t: &LineTrace, x: &TropicalSurface) -> LineSubcomplex {
    let tri = x.triangulation();
    let mut ids: Vec<CellId> = vec![t.v1_cell, t.v2_cell];
    for e in t.all_edges() {
        ids.extend(e.pieces.iter().copied());
        ids.extend(e.events.iter().map(|(_, c)| *c));
    }
    LineSubcomplex::from_simplices(ids.into_iter().map(|c| tri.cell_points(c)))
}

/// `c_X^dual(L)`: the union of the cells dual to the minimal cells met by `l`.
pub fn line_subcomplex(l: &TropicalLine, x: &TropicalSurface) -> Result<LineSubcomplex> {
    let t = trace_line(l, x).ok_or(Error::LineNotOnSurface)?;
    Ok(subcomplex_from_trace(&t, x))
}
