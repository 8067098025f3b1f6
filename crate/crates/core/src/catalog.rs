//! The catalog of general line positions, candidate search on a
//! triangulation, and classification of lines and standalone complexes.
//!
//! The catalog is data: a JSON file shipped with the crate (overridable
//! through the `TROPLINE_CATALOG` environment variable). Each entry fixes a
//! decorated line graph, the degrees where it can occur, and the plane
//! constants of its half-line pieces.
//!
//! Candidates are found by enumerating placements (see [`crate::placement`])
//! whose decorated graph matches an entry, then grouping them by the
//! subcomplex they span.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticePoint;
use crate::line::{
    combinatorial_position, trace_line, CombinatorialPosition, EdgeTrace, LineSubcomplex,
    TropicalLine, VertexDeco,
};
use crate::placement::{all_placements, Placement};
use crate::subdivision::Triangulation;
use crate::surface::TropicalSurface;

pub const CATALOG_ENV: &str = "TROPLINE_CATALOG";

const BUILTIN: &str = include_str!("../data/catalog.json");

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DegreeRange {
    pub min: i64,
    pub max: Option<i64>,
}

impl DegreeRange {
    pub fn contains(&self, delta: i64) -> bool {
        delta >= self.min && self.max.is_none_or(|m| delta <= m)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct VertexTemplate {
    pub xdim: u8,
    pub ray_dots: [u8; 2],
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq, PartialOrd, Ord)]
pub struct Structure {
    pub tetrahedra: usize,
    pub triangles: usize,
    pub edges: usize,
}

impl Structure {
    pub fn of(s: &LineSubcomplex) -> Structure {
        Structure {
            tetrahedra: s.of_dim(3).len(),
            triangles: s.of_dim(2).len(),
            edges: s.of_dim(1).len(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CatalogEntry {
    pub code: String,
    pub degree: DegreeRange,
    pub vertices: [VertexTemplate; 2],
    pub middle_dots: u8,
    /// Dimension of the surface cell containing the bounded edge, when the
    /// entry pins it.
    pub middle_xdim: Option<u8>,
    /// Plane constant per vertex, aligned with `vertices`.
    pub plane_k: [Option<i64>; 2],
    /// Whether a realized line is determined by its line subcomplex.
    pub injective: bool,
    #[serde(default)]
    pub notes: String,
}

impl CatalogEntry {
    pub fn position(&self) -> CombinatorialPosition {
        let d = |v: &VertexTemplate| VertexDeco::new(v.xdim, v.ray_dots);
        CombinatorialPosition::line(
            d(&self.vertices[0]),
            d(&self.vertices[1]),
            self.middle_dots,
            self.middle_xdim,
        )
    }

    pub fn matches(&self, pos: &CombinatorialPosition) -> bool {
        let CombinatorialPosition::Line {
            a,
            b,
            middle_dots,
            middle_xdim,
        } = pos
        else {
            return false;
        };
        let CombinatorialPosition::Line { a: ea, b: eb, .. } = self.position() else {
            unreachable!()
        };
        *a == ea
            && *b == eb
            && *middle_dots == self.middle_dots
            && self.middle_xdim.is_none_or(|m| *middle_xdim == Some(m))
    }

    /// Plane constant for the vertex with this decoration, if the entry
    /// records one.
    pub fn plane_k_for(&self, deco: &VertexDeco) -> Option<i64> {
        self.vertices
            .iter()
            .zip(&self.plane_k)
            .find(|(v, _)| VertexDeco::new(v.xdim, v.ray_dots) == *deco)
            .and_then(|(_, k)| *k)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Catalog {
    pub version: u32,
    #[serde(default)]
    pub description: String,
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn builtin() -> Catalog {
        Catalog::parse(BUILTIN).expect("built-in catalog is valid")
    }

    pub fn parse(text: &str) -> Result<Catalog> {
        let cat: Catalog = serde_json::from_str(text)
            .map_err(|e| Error::Catalog(format!("line {} column {}: {e}", e.line(), e.column())))?;
        cat.validate()?;
        Ok(cat)
    }

    pub fn load(path: &Path) -> Result<Catalog> {
        let text = std::fs::read_to_string(path)?;
        Catalog::parse(&text).map_err(|e| Error::Catalog(format!("{}: {e}", path.display())))
    }

    /// The catalog named by `TROPLINE_CATALOG`, or the built-in one.
    pub fn from_env() -> Result<Catalog> {
        match std::env::var_os(CATALOG_ENV) {
            Some(p) if !p.is_empty() => Catalog::load(Path::new(&p)),
            _ => Ok(Catalog::builtin()),
        }
    }

    fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for e in &self.entries {
            if !seen.insert(&e.code) {
                return Err(Error::Catalog(format!("duplicate code {}", e.code)));
            }
            if e.vertices.iter().any(|v| v.xdim > 2) {
                return Err(Error::Catalog(format!(
                    "{}: vertex cell dimension above 2",
                    e.code
                )));
            }
        }
        let positions: Vec<_> = self
            .entries
            .iter()
            .map(|e| (e.position(), &e.degree))
            .collect();
        for (i, (p, d)) in positions.iter().enumerate() {
            for (q, d2) in &positions[i + 1..] {
                let overlap = (d.min.max(d2.min)
                    ..=d.max.unwrap_or(i64::MAX).min(d2.max.unwrap_or(i64::MAX)))
                    .next();
                if p == q && overlap.is_some() {
                    return Err(Error::Catalog(format!(
                        "two entries share the position {p}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, code: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.code == code)
    }

    pub fn codes(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.code.as_str())
    }

    pub fn applicable(&self, delta: i64) -> impl Iterator<Item = &CatalogEntry> {
        self.entries
            .iter()
            .filter(move |e| e.degree.contains(delta))
    }

    /// The applicable entry with this position at degree `delta`.
    pub fn lookup(&self, pos: &CombinatorialPosition, delta: i64) -> Option<&CatalogEntry> {
        self.applicable(delta).find(|e| e.matches(pos))
    }

    /// Largest number of dots on one edge over all entries.
    pub fn max_dots(&self) -> usize {
        self.entries
            .iter()
            .flat_map(|e| {
                e.vertices
                    .iter()
                    .flat_map(|v| v.ray_dots)
                    .chain([e.middle_dots])
            })
            .max()
            .unwrap_or(0) as usize
    }
}

/// A subcomplex of a triangulation matching a catalog entry, with the
/// placements realizing the match.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSubcomplex {
    pub code: String,
    pub subcomplex: LineSubcomplex,
    pub placements: Vec<Placement>,
}

#[derive(Clone, Debug, Default)]
pub struct SubcomplexSearch {
    pub candidates: Vec<CandidateSubcomplex>,
    /// Set when the code does not apply to the degree of the triangulation.
    pub diagnostic: Option<String>,
}

/// All candidates of every applicable code, keyed by code.
pub fn search_all(
    cat: &Catalog,
    tri: &Triangulation,
) -> BTreeMap<String, Vec<CandidateSubcomplex>> {
    let delta = tri.delta();
    let mut groups: BTreeMap<String, BTreeMap<LineSubcomplex, Vec<Placement>>> = BTreeMap::new();
    for e in cat.applicable(delta) {
        groups.entry(e.code.clone()).or_default();
    }
    for p in all_placements(tri, cat.max_dots(), false) {
        let pos = p.position(tri);
        if let Some(e) = cat.lookup(&pos, delta) {
            groups
                .get_mut(&e.code)
                .unwrap()
                .entry(p.subcomplex(tri))
                .or_default()
                .push(p);
        }
    }
    groups
        .into_iter()
        .map(|(code, subs)| {
            let cands = subs
                .into_iter()
                .map(|(subcomplex, mut placements)| {
                    placements.sort();
                    CandidateSubcomplex {
                        code: code.clone(),
                        subcomplex,
                        placements,
                    }
                })
                .collect();
            (code, cands)
        })
        .collect()
}

/// Candidates of one code, sorted by subcomplex.
pub fn find_subcomplexes(
    cat: &Catalog,
    tri: &Triangulation,
    code: &str,
) -> Result<SubcomplexSearch> {
    let entry = cat
        .get(code)
        .ok_or_else(|| Error::Catalog(format!("unknown code {code}")))?;
    if !entry.degree.contains(tri.delta()) {
        return Ok(SubcomplexSearch {
            candidates: Vec::new(),
            diagnostic: Some(format!(
                "type {code} does not occur on surfaces of degree {}",
                tri.delta()
            )),
        });
    }
    let mut all = search_all(cat, tri);
    Ok(SubcomplexSearch {
        candidates: all.remove(code).unwrap_or_default(),
        diagnostic: None,
    })
}

/// Codes whose placements span exactly the complex with these maximal cells,
/// viewed inside the simplex of degree `delta`.
pub fn classify_complex(
    cat: &Catalog,
    delta: i64,
    maximal: &[Vec<LatticePoint>],
) -> Result<Vec<String>> {
    let tri = Triangulation::from_maximal_cells(delta, maximal)?;
    let target = LineSubcomplex::from_simplices(maximal.iter().cloned());
    let mut codes: Vec<String> = all_placements(&tri, cat.max_dots(), false)
        .into_iter()
        .filter(|p| p.subcomplex(&tri) == target)
        .filter_map(|p| cat.lookup(&p.position(&tri), delta))
        .map(|e| e.code.clone())
        .collect();
    codes.sort();
    codes.dedup();
    Ok(codes)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Classification {
    Code(String),
    NonGeneral,
    Degenerate,
}

impl Classification {
    pub fn code(&self) -> Option<&str> {
        match self {
            Classification::Code(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Code(c) => f.write_str(c),
            Classification::NonGeneral => f.write_str("NONGENERAL"),
            Classification::Degenerate => f.write_str("DEGENERATE"),
        }
    }
}

impl Serialize for Classification {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A vertex decoration and its plane constant, if any.
pub type HalfLineConstant = (VertexDeco, Option<i64>);

/// Per vertex of a non-degenerate line: its decoration and the constant
/// `a_i + a_j` (homogeneous coordinates, rays `w_i`, `w_j` at the vertex)
/// over the points of the cell dual to the bounded piece next to the vertex,
/// or `None` when that sum is not constant.
pub fn half_line_constants(
    l: &TropicalLine,
    x: &TropicalSurface,
) -> Result<Option<[HalfLineConstant; 2]>> {
    let t = trace_line(l, x).ok_or(Error::LineNotOnSurface)?;
    let Some(middle) = &t.middle else {
        return Ok(None);
    };
    let tri = x.triangulation();
    let constant = |cell, rays: [crate::lattice::Dir; 2]| {
        let sums: Vec<i64> = tri
            .cell_points(cell)
            .iter()
            .map(|a| {
                let h = a.homogenize(tri.delta());
                h[rays[0].slot()] + h[rays[1].slot()]
            })
            .collect();
        sums.iter().all(|s| *s == sums[0]).then_some(sums[0])
    };
    let deco = |cell, rays: &[EdgeTrace]| {
        VertexDeco::new(x.xdim(cell) as u8, [rays[0].dots(x), rays[1].dots(x)])
    };
    Ok(Some([
        (
            deco(t.v1_cell, &t.rays1),
            constant(middle.pieces[0], l.rays1()),
        ),
        (
            deco(t.v2_cell, &t.rays2),
            constant(*middle.pieces.last().unwrap(), l.rays2()),
        ),
    ]))
}

/// Whether the plane constants of the catalog entry hold for `l`.
pub fn plane_law_holds(
    entry: &CatalogEntry,
    l: &TropicalLine,
    x: &TropicalSurface,
) -> Result<bool> {
    let Some(consts) = half_line_constants(l, x)? else {
        return Ok(true);
    };
    Ok(consts
        .iter()
        .all(|(deco, k)| entry.plane_k_for(deco).is_none_or(|want| *k == Some(want))))
}

/// The catalog code of the position of `l` on `x`.
pub fn classify_line(
    cat: &Catalog,
    l: &TropicalLine,
    x: &TropicalSurface,
) -> Result<Classification> {
    let pos = combinatorial_position(l, x)?;
    if l.is_degenerate() {
        return Ok(Classification::Degenerate);
    }
    Ok(match cat.lookup(&pos, x.delta()) {
        Some(e) => Classification::Code(e.code.clone()),
        None => Classification::NonGeneral,
    })
}
