//! Linear forms in the lifting values whose vanishing makes a surface
//! non-general for line counting.
//!
//! Every edge `PQ` of a cell gives the linear condition
//! `<Q - P, x> = lambda_P - lambda_Q` on points of the dual cell. A
//! configuration of such conditions that is overdetermined (four conditions
//! on a point of R^3, or three dependent ones) is consistent only on a
//! hyperplane of lifting values; these hyperplanes are collected here.
//!
//! * Two tetrahedra meeting in exactly one edge `CD`, with opposite edges
//!   `AB` and `EF` such that `AB x CD` and `CD x EF` are parallel: a segment
//!   could pass through both dual vertices.
//! * Stars: an edge in three tetrahedra, a triangle with two tetrahedra
//!   through its edges, or a tetrahedron with a second tetrahedron through
//!   one of its edges. Each gives a 4 x 4 determinant.
//! * For the alpha triangulation in degree 3, two named forms and their
//!   images under the symmetries of the triangulation.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::Serialize;

use crate::lattice::{cross, det3, s4_act, LatticePoint, Perm};
use crate::lifting::Lifting;
use crate::rat::Rat;
use crate::subdivision::{alpha_subdivision_oracle, CellId, Triangulation};

/// An integer linear form in the lifting values, in normalized form
/// (coprime coefficients, first nonzero coefficient positive).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm {
    pub coeffs: BTreeMap<LatticePoint, i64>,
}

impl LinearForm {
    pub fn from_terms(terms: impl IntoIterator<Item = (LatticePoint, i64)>) -> LinearForm {
        let mut coeffs: BTreeMap<LatticePoint, i64> = BTreeMap::new();
        for (p, c) in terms {
            *coeffs.entry(p).or_default() += c;
        }
        coeffs.retain(|_, c| *c != 0);
        LinearForm { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn normalized(&self) -> LinearForm {
        let g = self.coeffs.values().fold(0i64, |g, c| g.gcd(c));
        if g == 0 {
            return self.clone();
        }
        let sign = self.coeffs.values().next().map_or(1, |c| c.signum());
        LinearForm {
            coeffs: self
                .coeffs
                .iter()
                .map(|(p, c)| (*p, c / g * sign))
                .collect(),
        }
    }

    pub fn eval(&self, l: &Lifting) -> Rat {
        self.coeffs
            .iter()
            .map(|(p, c)| l.value(p) * &Rat::from_int(*c))
            .sum()
    }

    /// The form `h'` with `h'(l o sigma^-1) = h(l)`.
    pub fn permuted(&self, sigma: &Perm, delta: i64) -> LinearForm {
        LinearForm::from_terms(
            self.coeffs
                .iter()
                .map(|(p, c)| (s4_act(sigma, p, delta).expect("point of the simplex"), *c)),
        )
    }
}

impl std::fmt::Display for LinearForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (p, c)) in self.coeffs.iter().enumerate() {
            let [x, y, z] = p.0;
            let sign = if *c < 0 {
                "-"
            } else if i > 0 {
                "+"
            } else {
                ""
            };
            let mag = c.abs();
            if mag == 1 {
                write!(f, "{sign}l{x}{y}{z}")?;
            } else {
                write!(f, "{sign}{mag}*l{x}{y}{z}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for LinearForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Edge `PQ` as a row: the vector `Q - P` and the form `lambda_P - lambda_Q`.
#[derive(Clone, Copy, Debug)]
struct Row {
    v: [i64; 3],
    p: LatticePoint,
    q: LatticePoint,
}

impl Row {
    fn new(p: LatticePoint, q: LatticePoint) -> Row {
        Row { v: q.sub(&p), p, q }
    }

    fn rhs(&self, c: i64) -> [(LatticePoint, i64); 2] {
        [(self.p, c), (self.q, -c)]
    }
}

/// Determinant of the 4 x 4 matrix with rows `(v | lambda_P - lambda_Q)`,
/// expanded along the last column.
fn det4(rows: [Row; 4]) -> LinearForm {
    let mut terms = Vec::with_capacity(8);
    for r in 0..4 {
        let others: Vec<[i64; 3]> = (0..4).filter(|&s| s != r).map(|s| rows[s].v).collect();
        let minor = det3(others[0], others[1], others[2]);
        let sign = if (r + 3) % 2 == 0 { 1 } else { -1 };
        terms.extend(rows[r].rhs(sign * minor));
    }
    LinearForm::from_terms(terms)
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericityForm {
    pub form: LinearForm,
    /// Configurations producing this form.
    pub sources: Vec<String>,
    pub value: Rat,
    pub vanishes: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericityReport {
    pub forms: Vec<GenericityForm>,
    pub vanishing: usize,
    pub general: bool,
}

impl GenericityReport {
    pub fn vanishing_forms(&self) -> impl Iterator<Item = &GenericityForm> {
        self.forms.iter().filter(|f| f.vanishes)
    }
}

fn label(tri: &Triangulation, cells: &[CellId]) -> String {
    cells
        .iter()
        .map(|&c| {
            tri.cell_points(c)
                .iter()
                .map(|p| format!("{}{}{}", p.0[0], p.0[1], p.0[2]))
                .collect::<Vec<_>>()
                .join(".")
        })
        .collect::<Vec<_>>()
        .join("|")
}

/// The vertices of `tet` outside `face`, as a row.
fn opposite(tri: &Triangulation, tet: CellId, face: &[usize]) -> Option<Row> {
    let rest: Vec<usize> = tri
        .cell(tet)
        .verts
        .iter()
        .copied()
        .filter(|v| !face.contains(v))
        .collect();
    (rest.len() == 2).then(|| Row::new(tri.point(rest[0]), tri.point(rest[1])))
}

fn doubly_trespassing(tri: &Triangulation, out: &mut Vec<(LinearForm, String)>) {
    for e in tri.cell_ids(1) {
        let ev = &tri.cell(e).verts;
        let cd = Row::new(tri.point(ev[0]), tri.point(ev[1]));
        let tets = tri.cofaces_of_dim(e, 3);
        for (i, &t1) in tets.iter().enumerate() {
            for &t2 in &tets[i + 1..] {
                let shared = tri
                    .cell(t1)
                    .verts
                    .iter()
                    .filter(|v| tri.cell(t2).verts.contains(v))
                    .count();
                if shared != 2 {
                    continue;
                }
                let (ab, ef) = (
                    opposite(tri, t1, ev).unwrap(),
                    opposite(tri, t2, ev).unwrap(),
                );
                let (n1, n2) = (cross(ab.v, cd.v), cross(cd.v, ef.v));
                if n1 == [0; 3] || n2 == [0; 3] || cross(n1, n2) != [0; 3] {
                    continue;
                }
                // rows AB, CD, EF are dependent; y is a left null vector
                let rows = [ab, cd, ef];
                let cols: Vec<[i64; 3]> = (0..3)
                    .map(|k| [rows[0].v[k], rows[1].v[k], rows[2].v[k]])
                    .collect();
                let y = [
                    cross(cols[0], cols[1]),
                    cross(cols[0], cols[2]),
                    cross(cols[1], cols[2]),
                ]
                .into_iter()
                .find(|y| *y != [0; 3])
                .expect("rank two");
                let form = LinearForm::from_terms((0..3).flat_map(|r| rows[r].rhs(y[r])));
                out.push((
                    form,
                    format!("doubly-trespassing {}", label(tri, &[t1, t2])),
                ));
            }
        }
    }
}

fn stars(tri: &Triangulation, out: &mut Vec<(LinearForm, String)>) {
    // an edge in three tetrahedra
    for e in tri.cell_ids(1) {
        let ev = &tri.cell(e).verts;
        let ab = Row::new(tri.point(ev[0]), tri.point(ev[1]));
        let tets = tri.cofaces_of_dim(e, 3);
        for i in 0..tets.len() {
            for j in i + 1..tets.len() {
                for k in j + 1..tets.len() {
                    let r = |t| opposite(tri, t, ev).unwrap();
                    let form = det4([ab, r(tets[i]), r(tets[j]), r(tets[k])]);
                    out.push((
                        form,
                        format!("edge-star {}", label(tri, &[e, tets[i], tets[j], tets[k]])),
                    ));
                }
            }
        }
    }
    // a triangle with two tetrahedra through its edges
    for t in tri.cell_ids(2) {
        let tv = tri.cell(t).verts.clone();
        let (a, b, c) = (tri.point(tv[0]), tri.point(tv[1]), tri.point(tv[2]));
        let mut arms: Vec<(CellId, Row)> = Vec::new();
        for e in tri.faces(t).into_iter().filter(|&f| tri.cell(f).dim == 1) {
            let ev = tri.cell(e).verts.clone();
            for tet in tri.cofaces_of_dim(e, 3) {
                if tv.iter().all(|v| tri.cell(tet).verts.contains(v)) {
                    continue;
                }
                arms.push((tet, opposite(tri, tet, &ev).unwrap()));
            }
        }
        for i in 0..arms.len() {
            for j in i + 1..arms.len() {
                let form = det4([Row::new(a, b), Row::new(a, c), arms[i].1, arms[j].1]);
                out.push((
                    form,
                    format!("triangle-star {}", label(tri, &[t, arms[i].0, arms[j].0])),
                ));
            }
        }
    }
    // a tetrahedron with a second tetrahedron through one of its edges
    for t in tri.maximal() {
        let tv = tri.cell(t).verts.clone();
        let pts: Vec<LatticePoint> = tv.iter().map(|&v| tri.point(v)).collect();
        let base = [
            Row::new(pts[0], pts[1]),
            Row::new(pts[0], pts[2]),
            Row::new(pts[0], pts[3]),
        ];
        for e in tri.faces(t).into_iter().filter(|&f| tri.cell(f).dim == 1) {
            let ev = tri.cell(e).verts.clone();
            for other in tri.cofaces_of_dim(e, 3) {
                if other == t {
                    continue;
                }
                let form = det4([
                    base[0],
                    base[1],
                    base[2],
                    opposite(tri, other, &ev).unwrap(),
                ]);
                out.push((form, format!("tetra-star {}", label(tri, &[t, other]))));
            }
        }
    }
}

/// `l210 + l002 - l201 - l011`.
pub fn h1() -> LinearForm {
    let p = LatticePoint::new;
    LinearForm::from_terms([
        (p(2, 1, 0), 1),
        (p(0, 0, 2), 1),
        (p(2, 0, 1), -1),
        (p(0, 1, 1), -1),
    ])
}

/// `2 l210 - 2 l120 + l020 - l200`.
pub fn h2() -> LinearForm {
    let p = LatticePoint::new;
    LinearForm::from_terms([
        (p(2, 1, 0), 2),
        (p(1, 2, 0), -2),
        (p(0, 2, 0), 1),
        (p(2, 0, 0), -1),
    ])
}

/// Images of `h` under the permutations carrying the alpha triangulation of
/// degree 3 onto `tri` (empty unless `tri` is such an image).
pub fn alpha_cubic_orbit(tri: &Triangulation, h: &LinearForm) -> Vec<(Perm, LinearForm)> {
    if tri.delta() != 3 {
        return Vec::new();
    }
    let s = alpha_subdivision_oracle(3).expect("degree 3");
    let mut out: Vec<(Perm, LinearForm)> = Vec::new();
    for sigma in Perm::all() {
        if s.s4_act(&sigma) == *tri {
            let f = h.permuted(&sigma, 3);
            if !out.iter().any(|(_, g)| g.normalized() == f.normalized()) {
                out.push((sigma, f));
            }
        }
    }
    out
}

/// All genericity forms of `tri`, deduplicated, without values.
pub fn genericity_forms(tri: &Triangulation) -> Vec<(LinearForm, Vec<String>)> {
    let mut raw: Vec<(LinearForm, String)> = Vec::new();
    doubly_trespassing(tri, &mut raw);
    stars(tri, &mut raw);
    for (name, h) in [("h1", h1()), ("h2", h2())] {
        for (sigma, f) in alpha_cubic_orbit(tri, &h) {
            raw.push((f, format!("{name} {sigma}")));
        }
    }
    let mut merged: BTreeMap<LinearForm, Vec<String>> = BTreeMap::new();
    for (f, src) in raw {
        if f.is_zero() {
            continue;
        }
        merged.entry(f.normalized()).or_default().push(src);
    }
    merged.into_iter().collect()
}

pub fn genericity_report(l: &Lifting, tri: &Triangulation) -> GenericityReport {
    let forms: Vec<GenericityForm> = genericity_forms(tri)
        .into_iter()
        .map(|(form, sources)| {
            let value = form.eval(l);
            GenericityForm {
                vanishes: value.is_zero(),
                form,
                sources,
                value,
            }
        })
        .collect();
    let vanishing = forms.iter().filter(|f| f.vanishes).count();
    GenericityReport {
        forms,
        vanishing,
        general: vanishing == 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::alpha_lifting;
    use crate::subdivision::subdivide;

    #[test]
    fn named_forms_at_alpha() {
        let l = alpha_lifting(3).unwrap();
        // alpha(2,1,0) = -12, alpha(0,0,2) = -8, alpha(2,0,1) = -14, alpha(0,1,1) = -6
        assert_eq!(h1().eval(&l), Rat::zero());
        assert_eq!(h2().eval(&l), Rat::zero());
        let p = l.perturbed(&Rat::new(1, 100), 1);
        assert!(!h1().eval(&p).is_zero());
    }

    #[test]
    fn alpha_cubic_is_not_general() {
        let l = alpha_lifting(3).unwrap();
        let tri = subdivide(&l).triangulation;
        let orbit = alpha_cubic_orbit(&tri, &h2());
        assert_eq!(orbit.len(), 4);
        let r = genericity_report(&l, &tri);
        assert!(!r.general);
        assert!(r.vanishing_forms().any(|f| f.form == h2().normalized()));
        let p = l.perturbed(&Rat::new(1, 100), 3);
        assert!(genericity_report(&p, &subdivide(&p).triangulation).general);
    }

    #[test]
    fn forms_are_invariant_under_symmetry() {
        let l = alpha_lifting(2).unwrap().perturbed(&Rat::new(1, 100), 9);
        let tri = subdivide(&l).triangulation;
        let sigma: Perm = "(132)".parse().unwrap();
        let moved = tri.s4_act(&sigma);
        let a: Vec<LinearForm> = genericity_forms(&tri)
            .into_iter()
            .map(|(f, _)| f.permuted(&sigma, 2).normalized())
            .collect();
        let mut a = a;
        a.sort();
        let b: Vec<LinearForm> = genericity_forms(&moved)
            .into_iter()
            .map(|(f, _)| f)
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn tetra_star_vanishes_only_off_the_cone() {
        // a tetrahedron with a neighbour across a facet: the star condition
        // says the dual vertex is equidistant to a fifth monomial, which a
        // regular triangulation forbids
        let l = alpha_lifting(3).unwrap().perturbed(&Rat::new(1, 50), 4);
        let tri = subdivide(&l).triangulation;
        let r = genericity_report(&l, &tri);
        assert!(r
            .forms
            .iter()
            .filter(|f| f.sources.iter().any(|s| s.starts_with("tetra-star")))
            .all(|f| !f.vanishes));
    }
}
