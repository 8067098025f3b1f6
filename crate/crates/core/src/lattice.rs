//! Lattice geometry over Z^3: the dilated simplex, its lattice points, the
//! four tropical ray directions and the S4 symmetry of the simplex.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A point of Z^3.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(pub [i64; 3]);

impl LatticePoint {
    pub const fn new(x: i64, y: i64, z: i64) -> Self {
        LatticePoint([x, y, z])
    }

    pub fn coords(&self) -> [i64; 3] {
        self.0
    }

    /// Homogeneous coordinates `(a1, a2, a3, delta - a1 - a2 - a3)`.
    pub fn homogenize(&self, delta: i64) -> [i64; 4] {
        let [a, b, c] = self.0;
        [a, b, c, delta - a - b - c]
    }

    pub fn in_simplex(&self, delta: i64) -> bool {
        self.homogenize(delta).iter().all(|&x| x >= 0)
    }

    pub fn sub(&self, other: &LatticePoint) -> [i64; 3] {
        [
            self.0[0] - other.0[0],
            self.0[1] - other.0[1],
            self.0[2] - other.0[2],
        ]
    }
}

impl fmt::Debug for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// All lattice points of the simplex of degree `delta`, in lexicographic order.
pub fn lattice_points(delta: i64) -> Result<Vec<LatticePoint>, Error> {
    if delta < 1 {
        return Err(Error::InvalidDegree(delta));
    }
    let mut out = Vec::with_capacity(binomial(delta as u64 + 3, 3) as usize);
    for a in 0..=delta {
        for b in 0..=delta - a {
            for c in 0..=delta - a - b {
                out.push(LatticePoint::new(a, b, c));
            }
        }
    }
    Ok(out)
}

/// One of the four tropical ray directions, `w1 = -e1`, `w2 = -e2`,
/// `w3 = -e3`, `w4 = e1 + e2 + e3`. Stored zero-based.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dir(u8);

impl Dir {
    pub const ALL: [Dir; 4] = [Dir(0), Dir(1), Dir(2), Dir(3)];

    /// `index` is one-based, as in `w1..w4`.
    pub fn from_index(index: u8) -> Option<Dir> {
        (1..=4).contains(&index).then_some(Dir(index - 1))
    }

    pub fn index(self) -> u8 {
        self.0 + 1
    }

    pub fn slot(self) -> usize {
        self.0 as usize
    }

    pub fn vector(self) -> [i64; 3] {
        match self.0 {
            0 => [-1, 0, 0],
            1 => [0, -1, 0],
            2 => [0, 0, -1],
            _ => [1, 1, 1],
        }
    }

    /// Whether the lattice point lies on the facet `F_i` of the simplex
    /// (the facet with outer normal `w_i`).
    pub fn on_facet(self, p: &LatticePoint, delta: i64) -> bool {
        p.homogenize(delta)[self.slot()] == 0
    }
}

impl fmt::Debug for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.index())
    }
}

pub fn dot(a: [i64; 3], b: [i64; 3]) -> i64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn det3(a: [i64; 3], b: [i64; 3], c: [i64; 3]) -> i64 {
    dot(a, cross(b, c))
}

/// A tetrahedron with lattice vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Simplex3 {
    pub vertices: [LatticePoint; 4],
}

impl Simplex3 {
    pub fn new(vertices: [LatticePoint; 4]) -> Self {
        Simplex3 { vertices }
    }
}

/// Six times the volume of the tetrahedron. Equals 1 exactly for elementary
/// tetrahedra and 0 for degenerate ones.
pub fn tet_volume6(t: &Simplex3) -> i64 {
    let [v0, v1, v2, v3] = t.vertices;
    det3(v1.sub(&v0), v2.sub(&v0), v3.sub(&v0)).abs()
}

/// A permutation of `{1,2,3,4}`, stored zero-based as the image list.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm([u8; 4]);

impl Perm {
    pub const IDENTITY: Perm = Perm([0, 1, 2, 3]);

    pub fn from_images(images: [u8; 4]) -> Option<Perm> {
        let mut seen = [false; 4];
        for &i in &images {
            if i > 3 || seen[i as usize] {
                return None;
            }
            seen[i as usize] = true;
        }
        Some(Perm(images))
    }

    pub fn image(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    /// `(self * other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        let mut out = [0u8; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[other.0[i] as usize];
        }
        Perm(out)
    }

    pub fn inverse(&self) -> Perm {
        let mut out = [0u8; 4];
        for i in 0..4 {
            out[self.0[i] as usize] = i as u8;
        }
        Perm(out)
    }

    /// Moves coordinate `i` of a homogeneous vector to slot `sigma(i)`.
    pub fn permute<T: Copy>(&self, x: [T; 4]) -> [T; 4] {
        let mut out = x;
        for i in 0..4 {
            out[self.0[i] as usize] = x[i];
        }
        out
    }

    pub fn all() -> Vec<Perm> {
        let mut out = Vec::with_capacity(24);
        for a in 0..4u8 {
            for b in 0..4u8 {
                for c in 0..4u8 {
                    for d in 0..4u8 {
                        if let Some(p) = Perm::from_images([a, b, c, d]) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }

    /// The action on ray directions: `w_i` goes to `w_sigma(i)`.
    pub fn act_dir(&self, d: Dir) -> Dir {
        Dir(self.0[d.slot()])
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = [false; 4];
        let mut s = String::new();
        for start in 0..4 {
            if seen[start] || self.0[start] as usize == start {
                seen[start] = true;
                continue;
            }
            s.push('(');
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                s.push_str(&(i + 1).to_string());
                i = self.0[i] as usize;
            }
            s.push(')');
        }
        if s.is_empty() {
            s.push_str("id");
        }
        f.write_str(&s)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Perm {
    type Err = Error;

    /// Cycle notation such as `(12)(34)`, `(13)(24)`, `(234)` or `id`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("bad permutation {s:?}"));
        if t.is_empty() || t == "id" || t == "()" {
            return Ok(Perm::IDENTITY);
        }
        let mut p = Perm::IDENTITY;
        let mut rest = t.as_str();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(bad)?;
            let end = body.find(')').ok_or_else(bad)?;
            let cyc: Vec<u8> = body[..end]
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .filter(|d| (1..=4).contains(d))
                        .map(|d| d as u8 - 1)
                })
                .collect::<Option<_>>()
                .ok_or_else(bad)?;
            let mut images = [0u8, 1, 2, 3];
            for k in 0..cyc.len() {
                images[cyc[k] as usize] = cyc[(k + 1) % cyc.len()];
            }
            let c = Perm::from_images(images).ok_or_else(bad)?;
            p = p.compose(&c);
            rest = &body[end + 1..];
        }
        Ok(p)
    }
}

/// The S4 action on lattice points of the simplex of degree `delta`:
/// homogenize, permute the four coordinates, drop the last one.
pub fn s4_act(sigma: &Perm, a: &LatticePoint, delta: i64) -> Result<LatticePoint, Error> {
    if !a.in_simplex(delta) {
        return Err(Error::OutsideSimplex(*a, delta));
    }
    let h = sigma.permute(a.homogenize(delta));
    Ok(LatticePoint::new(h[0], h[1], h[2]))
}
