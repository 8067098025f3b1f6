//! OFF export of the 2-cells of a surface clipped to an axis-aligned box.
//!
//! Each 2-cell is turned into a convex polygon: its boundary vertices in
//! cyclic order, with every unbounded ray truncated far outside the box. The
//! polygon is then clipped against the six faces of the box in exact
//! arithmetic. Coordinates are rendered as decimals rounded from the exact
//! rationals.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::rat::{add3, int_point, scale3, sub3, Point3, Rat};
use crate::surface::{BoundaryItem, TropicalSurface};

/// `[x0, x1, y0, y1, z0, z1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClipBox {
    pub lo: Point3,
    pub hi: Point3,
}

impl ClipBox {
    pub fn new(bounds: [Rat; 6]) -> Result<ClipBox> {
        let [x0, x1, y0, y1, z0, z1] = bounds;
        if x0 > x1 || y0 > y1 || z0 > z1 {
            return Err(Error::Parse(
                "box bounds must satisfy lo <= hi on every axis".into(),
            ));
        }
        Ok(ClipBox {
            lo: [x0, y0, z0],
            hi: [x1, y1, z1],
        })
    }

    pub fn cube(r: i64) -> ClipBox {
        ClipBox {
            lo: [Rat::from_int(-r), Rat::from_int(-r), Rat::from_int(-r)],
            hi: [Rat::from_int(r), Rat::from_int(r), Rat::from_int(r)],
        }
    }

    fn extent(&self) -> Rat {
        self.lo.iter().chain(&self.hi).map(Rat::abs).max().unwrap()
    }
}

/// A clipped 2-cell: its dual triangulation edge and polygon vertices.
#[derive(Clone, Debug)]
pub struct Facet {
    pub edge: usize,
    pub polygon: Vec<Point3>,
}

/// Keeps the part of a convex polygon with `sign * (p[axis] - bound) <= 0`.
fn clip(poly: &[Point3], axis: usize, bound: &Rat, sign: i64) -> Vec<Point3> {
    let side = |p: &Point3| (&p[axis] - bound) * Rat::from_int(sign);
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (a, b) = (&poly[i], &poly[(i + 1) % poly.len()]);
        let (sa, sb) = (side(a), side(b));
        if !sa.is_positive() {
            out.push(a.clone());
        }
        if (sa.is_positive() && sb.is_negative()) || (sa.is_negative() && sb.is_positive()) {
            let t = &sa / &(&sa - &sb);
            out.push(add3(a, &scale3(&sub3(b, a), &t)));
        }
    }
    out.dedup();
    if out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

fn is_degenerate(poly: &[Point3]) -> bool {
    if poly.len() < 3 {
        return true;
    }
    let e1 = sub3(&poly[1], &poly[0]);
    poly[2..].iter().all(|p| {
        let e2 = sub3(p, &poly[0]);
        let c = [
            &e1[1] * &e2[2] - &e1[2] * &e2[1],
            &e1[2] * &e2[0] - &e1[0] * &e2[2],
            &e1[0] * &e2[1] - &e1[1] * &e2[0],
        ];
        c.iter().all(Rat::is_zero)
    })
}

/// The 2-cells of `x` meeting the box with positive area, clipped to it.
pub fn clipped_facets(x: &TropicalSurface, bx: &ClipBox) -> Vec<Facet> {
    let tri = x.triangulation();
    let far = {
        let vmax = x
            .vertices()
            .flat_map(|(_, v)| v.iter().map(Rat::abs))
            .max()
            .unwrap_or_else(Rat::zero);
        (bx.extent().max(vmax) + Rat::one()) * Rat::from_int(1000)
    };
    let mut out = Vec::new();
    for edge in tri.cell_ids(1) {
        let cycle = x.boundary_cycle(edge);
        let mut poly: Vec<Point3> = Vec::new();
        for (k, item) in cycle.iter().enumerate() {
            match item {
                BoundaryItem::Vertex(t) => poly.push(x.vertex(*t).clone()),
                BoundaryItem::Ray(_, d) => {
                    // the ray leaves from the neighbouring vertex of the cycle
                    let base = if k == 0 { &cycle[1] } else { &cycle[k - 1] };
                    let BoundaryItem::Vertex(t) = base else {
                        unreachable!("rays are adjacent to vertices")
                    };
                    poly.push(add3(x.vertex(*t), &scale3(&int_point(d.vector()), &far)));
                }
            }
        }
        for axis in 0..3 {
            poly = clip(&poly, axis, &bx.hi[axis], 1);
            poly = clip(&poly, axis, &bx.lo[axis], -1);
        }
        if !is_degenerate(&poly) {
            out.push(Facet {
                edge,
                polygon: poly,
            });
        }
    }
    out
}

/// Writes the clipped 2-cells as an OFF mesh; fails when nothing is left.
pub fn write_off<W: Write>(x: &TropicalSurface, bx: &ClipBox, mut w: W) -> Result<usize> {
    let facets = clipped_facets(x, bx);
    if facets.is_empty() {
        return Err(Error::EmptyClip);
    }
    let mut index: BTreeMap<Point3, usize> = BTreeMap::new();
    let mut verts: Vec<&Point3> = Vec::new();
    let faces: Vec<Vec<usize>> = facets
        .iter()
        .map(|f| {
            f.polygon
                .iter()
                .map(|p| {
                    *index.entry(p.clone()).or_insert_with(|| {
                        verts.push(p);
                        verts.len() - 1
                    })
                })
                .collect()
        })
        .collect();
    writeln!(w, "OFF")?;
    writeln!(
        w,
        "# tropical surface of degree {}: 2-cells clipped to the box",
        x.delta()
    )?;
    writeln!(
        w,
        "# [{}, {}] x [{}, {}] x [{}, {}]; unbounded cells are cut at the box faces",
        bx.lo[0], bx.hi[0], bx.lo[1], bx.hi[1], bx.lo[2], bx.hi[2]
    )?;
    writeln!(
        w,
        "# coordinates are exact rationals rounded to double precision"
    )?;
    writeln!(w, "{} {} 0", verts.len(), faces.len())?;
    for p in &verts {
        writeln!(w, "{} {} {}", p[0].to_f64(), p[1].to_f64(), p[2].to_f64())?;
    }
    for f in &faces {
        let idx: Vec<String> = f.iter().map(usize::to_string).collect();
        writeln!(w, "{} {}", f.len(), idx.join(" "))?;
    }
    Ok(faces.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::alpha_lifting;
    use crate::surface::build_surface;

    #[test]
    fn plane_has_six_clipped_facets() {
        let x = build_surface(&alpha_lifting(1).unwrap()).unwrap();
        let f = clipped_facets(&x, &ClipBox::cube(10));
        assert_eq!(f.len(), 6);
        let v = crate::rat::point(2, 2, 2);
        assert!(f.iter().all(|f| f.polygon.contains(&v)));
    }

    #[test]
    fn large_box_keeps_every_cell() {
        let x = build_surface(&alpha_lifting(3).unwrap()).unwrap();
        let f = clipped_facets(&x, &ClipBox::cube(100));
        assert_eq!(f.len(), x.triangulation().count(1));
        let mut buf = Vec::new();
        let n = write_off(&x, &ClipBox::cube(100), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("OFF\n"));
        assert_eq!(n, f.len());
    }

    #[test]
    fn box_away_from_surface_is_empty() {
        let x = build_surface(&alpha_lifting(1).unwrap()).unwrap();
        let r = |v| Rat::from_int(v);
        let bx = ClipBox::new([r(-101), r(-100), r(-101), r(-100), r(-101), r(-100)]).unwrap();
        assert!(clipped_facets(&x, &bx).is_empty());
        assert!(matches!(
            write_off(&x, &bx, Vec::new()),
            Err(Error::EmptyClip)
        ));
    }

    #[test]
    fn small_box_cuts_cells() {
        let x = build_surface(&alpha_lifting(3).unwrap()).unwrap();
        let all = x.triangulation().count(1);
        let some = clipped_facets(&x, &ClipBox::cube(5)).len();
        assert!(some > 0 && some < all, "{some} of {all}");
    }
}
