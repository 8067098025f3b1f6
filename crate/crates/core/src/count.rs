//! Counting tropical lines on a surface.
//!
//! Every catalog candidate of the surface's triangulation is realized by
//! solving the closed placement systems of its placements. Solutions on cell
//! boundaries are kept and classified by their true position, so coincidences
//! on special surfaces appear as non-general lines or as families instead of
//! disappearing. Families are merged by their witness pairs, and isolated
//! solutions lying on a family are reported with that family.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{search_all, CandidateSubcomplex, Catalog, Classification};
use crate::error::{Error, Result};
use crate::genericity::{genericity_report, GenericityReport};
use crate::line::{line_subcomplex, SubcomplexReport, TropicalLine};
use crate::placement::{all_placements, realize_placement, Family, Realization};
use crate::rat::Point3;
use crate::surface::TropicalSurface;

#[derive(Clone, Debug, Default)]
pub struct CountOptions {
    /// Report degenerate lines as isolated lines.
    pub include_degenerate: bool,
    /// Compare the catalog route with the direct enumeration.
    pub cross_check: bool,
    /// Surface vertices per edge allowed in the direct enumeration; the
    /// degree when unset.
    pub direct_dots: Option<usize>,
}

/// Every solution of the closed placement systems of one candidate.
#[derive(Clone, Debug, Default)]
pub struct CandidateRealization {
    /// Distinct isolated lines, the ones spanning exactly the candidate first.
    pub lines: Vec<TropicalLine>,
    pub family: Option<Family>,
}

pub fn realize_all(x: &TropicalSurface, cand: &CandidateSubcomplex) -> CandidateRealization {
    let mut out = CandidateRealization::default();
    for p in &cand.placements {
        match realize_placement(p, x, false) {
            Realization::Family(f) => {
                out.family.get_or_insert(f);
            }
            Realization::Unique(l) => {
                if !out.lines.contains(&l) {
                    out.lines.push(l);
                }
            }
            Realization::None => {}
        }
    }
    out.lines
        .sort_by_key(|l| !line_subcomplex(l, x).is_ok_and(|s| s == cand.subcomplex));
    out
}

/// Realizes one candidate on `x` through the closed systems of its
/// placements. A family wins over isolated solutions; among isolated
/// solutions one spanning exactly the candidate is preferred.
pub fn realize(x: &TropicalSurface, cand: &CandidateSubcomplex) -> Realization {
    let r = realize_all(x, cand);
    match (r.family, r.lines.into_iter().next()) {
        (Some(f), _) => Realization::Family(f),
        (None, Some(l)) => Realization::Unique(l),
        (None, None) => Realization::None,
    }
}

#[derive(Clone, Debug)]
pub struct FoundLine {
    pub line: TropicalLine,
    pub classification: Classification,
    /// Codes of the candidates realizing this line.
    pub sources: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct FoundFamily {
    pub family: Family,
    pub sources: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct CodeCount {
    pub candidates: usize,
    pub realized: usize,
}

#[derive(Clone, Debug)]
pub struct LineCount {
    pub delta: i64,
    pub lines: Vec<FoundLine>,
    pub families: Vec<FoundFamily>,
    pub per_code: BTreeMap<String, CodeCount>,
    pub genericity: GenericityReport,
    pub cross_check: Option<CrossCheck>,
}

impl LineCount {
    pub fn infinite(&self) -> bool {
        !self.families.is_empty()
    }

    pub fn total(&self) -> usize {
        self.lines.len()
    }

    /// Isolated lines per classification.
    pub fn by_position(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for l in &self.lines {
            *out.entry(l.classification.to_string()).or_default() += 1;
        }
        out
    }

    pub fn candidate_total(&self) -> usize {
        self.per_code.values().map(|c| c.candidates).sum()
    }
}

/// The direct enumeration compared with the catalog route alone.
#[derive(Clone, Debug, Serialize)]
pub struct CrossCheck {
    pub isolated: usize,
    pub families: usize,
    /// Isolated lines found directly but not through the catalog candidates.
    pub missed: Vec<LineReport>,
    pub agrees: bool,
}

fn witness_on(f: &Family, l: &TropicalLine) -> bool {
    f.witness
        .as_ref()
        .is_some_and(|(p, q)| l.contains(p) && l.contains(q))
}

fn same_family(a: &Family, b: &Family) -> bool {
    let members = |f: &Family| {
        std::iter::once(f.representative.clone())
            .chain(f.samples.iter().cloned())
            .collect::<Vec<_>>()
    };
    members(b).iter().all(|l| witness_on(a, l)) || members(a).iter().all(|l| witness_on(b, l))
}

fn merge_families(found: Vec<(Family, String)>) -> Vec<FoundFamily> {
    let mut out: Vec<FoundFamily> = Vec::new();
    for (f, src) in found {
        match out.iter_mut().find(|g| same_family(&g.family, &f)) {
            Some(g) => {
                if !g.sources.contains(&src) {
                    g.sources.push(src);
                }
            }
            None => out.push(FoundFamily {
                family: f,
                sources: vec![src],
            }),
        }
    }
    out
}

/// Lines and families found by solving the strict system of every placement
/// with up to `dots` surface vertices per edge.
struct Direct {
    isolated: Vec<TropicalLine>,
    families: Vec<FoundFamily>,
}

fn direct(x: &TropicalSurface, dots: usize, include_degenerate: bool) -> Direct {
    let results: Vec<Realization> = all_placements(x.triangulation(), dots, include_degenerate)
        .par_iter()
        .map(|p| realize_placement(p, x, true))
        .collect();
    let mut isolated: Vec<TropicalLine> = Vec::new();
    let mut fams: Vec<(Family, String)> = Vec::new();
    for r in results {
        match r {
            Realization::Unique(l) if !isolated.contains(&l) => isolated.push(l),
            Realization::Family(f) => fams.push((f, DIRECT.to_string())),
            _ => {}
        }
    }
    let families = merge_families(fams);
    isolated.retain(|l| !families.iter().any(|f| witness_on(&f.family, l)));
    isolated.sort();
    Direct { isolated, families }
}

/// Source tag of lines and families found by the direct enumeration.
pub const DIRECT: &str = "direct";

/// Counts the lines on `x`.
///
/// The catalog candidates are always realized. When the surface is not
/// general, or a candidate realizes as a family, the direct enumeration over
/// all placements is merged in as well: non-general lines and further
/// families can sit in positions the catalog does not list.
pub fn count_lines(cat: &Catalog, x: &TropicalSurface, opts: &CountOptions) -> Result<LineCount> {
    let delta = x.delta();
    if delta < 3 {
        return Err(Error::UnsupportedDegree(delta));
    }
    let tri = x.triangulation();
    let genericity = genericity_report(x.lifting(), tri);
    let search = search_all(cat, tri);
    let work: Vec<(&String, &CandidateSubcomplex)> = search
        .iter()
        .flat_map(|(code, cands)| cands.iter().map(move |c| (code, c)))
        .collect();
    let results: Vec<(String, CandidateRealization)> = work
        .par_iter()
        .map(|(code, c)| ((*code).clone(), realize_all(x, c)))
        .collect();

    let mut per_code: BTreeMap<String, CodeCount> = search
        .iter()
        .map(|(code, cands)| {
            (
                code.clone(),
                CodeCount {
                    candidates: cands.len(),
                    realized: 0,
                },
            )
        })
        .collect();
    let mut isolated: BTreeMap<TropicalLine, Vec<String>> = BTreeMap::new();
    let mut fams: Vec<(Family, String)> = Vec::new();
    for (code, r) in results {
        let mut realized = false;
        for l in r.lines {
            if l.is_degenerate() && !opts.include_degenerate {
                continue;
            }
            realized = true;
            let srcs = isolated.entry(l).or_default();
            if !srcs.contains(&code) {
                srcs.push(code.clone());
            }
        }
        if let Some(f) = r.family {
            realized = true;
            fams.push((f, code.clone()));
        }
        if realized {
            per_code.get_mut(&code).unwrap().realized += 1;
        }
    }
    let mut families = merge_families(fams);

    let dots = opts.direct_dots.unwrap_or(delta as usize);
    let complete = !genericity.general || !families.is_empty();
    let found_directly =
        (opts.cross_check || complete).then(|| direct(x, dots, opts.include_degenerate));
    let catalog_isolated: Vec<TropicalLine> = isolated
        .keys()
        .filter(|l| !families.iter().any(|f| witness_on(&f.family, l)))
        .cloned()
        .collect();
    let catalog_families = families.len();
    if let (Some(d), true) = (&found_directly, complete) {
        for l in &d.isolated {
            isolated
                .entry(l.clone())
                .or_default()
                .push(DIRECT.to_string());
        }
        for f in &d.families {
            match families
                .iter_mut()
                .find(|g| same_family(&g.family, &f.family))
            {
                Some(g) => g.sources.push(DIRECT.to_string()),
                None => families.push(f.clone()),
            }
        }
    }
    let lines: Vec<FoundLine> = isolated
        .into_iter()
        .filter(|(l, _)| !families.iter().any(|f| witness_on(&f.family, l)))
        .map(|(line, sources)| {
            let classification = crate::catalog::classify_line(cat, &line, x)
                .expect("realized lines lie on the surface");
            FoundLine {
                line,
                classification,
                sources,
            }
        })
        .collect();
    let cross_check = opts.cross_check.then(|| {
        let d = found_directly.as_ref().unwrap();
        let missed: Vec<LineReport> = d
            .isolated
            .iter()
            .filter(|l| !catalog_isolated.contains(l))
            .map(|l| LineReport::new(cat, l, x, None))
            .collect();
        let agrees = missed.is_empty()
            && d.isolated.len() == catalog_isolated.len()
            && d.families.len() == catalog_families;
        CrossCheck {
            isolated: d.isolated.len(),
            families: d.families.len(),
            missed,
            agrees,
        }
    });
    Ok(LineCount {
        delta,
        lines,
        families,
        per_code,
        genericity,
        cross_check,
    })
}

/// Exact rational coordinates as strings.
pub fn point_strings(p: &Point3) -> [String; 3] {
    [p[0].to_string(), p[1].to_string(), p[2].to_string()]
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub witness: Option<[[String; 3]; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LineReport {
    #[serde(rename = "type")]
    pub line_type: String,
    pub v1: [String; 3],
    pub v2: [String; 3],
    pub position: String,
    pub subcomplex: Option<SubcomplexReport>,
    pub family: Option<FamilyReport>,
}

impl LineReport {
    pub fn new(
        cat: &Catalog,
        l: &TropicalLine,
        x: &TropicalSurface,
        family: Option<&Family>,
    ) -> LineReport {
        LineReport {
            line_type: l.line_type().to_string(),
            v1: point_strings(l.v1()),
            v2: point_strings(l.v2()),
            position: crate::catalog::classify_line(cat, l, x)
                .map_or_else(|e| e.to_string(), |c| c.to_string()),
            subcomplex: line_subcomplex(l, x).ok().map(|s| s.report()),
            family: family.map(|f| FamilyReport {
                witness: f
                    .witness
                    .as_ref()
                    .map(|(p, q)| [point_strings(p), point_strings(q)]),
            }),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    pub delta: i64,
    pub infinite: bool,
    /// Number of isolated lines.
    pub total: usize,
    pub isolated: usize,
    pub families: usize,
    pub per_code: BTreeMap<String, CodeCount>,
    pub by_position: BTreeMap<String, usize>,
    pub candidate_total: usize,
    pub lines: Vec<LineReport>,
    pub family_witnesses: Vec<LineReport>,
    pub genericity: GenericityReport,
    pub cross_check: Option<CrossCheck>,
}

impl CountReport {
    pub fn new(cat: &Catalog, x: &TropicalSurface, c: &LineCount) -> CountReport {
        CountReport {
            delta: c.delta,
            infinite: c.infinite(),
            total: c.total(),
            isolated: c.lines.len(),
            families: c.families.len(),
            per_code: c.per_code.clone(),
            by_position: c.by_position(),
            candidate_total: c.candidate_total(),
            lines: c
                .lines
                .iter()
                .map(|l| LineReport::new(cat, &l.line, x, None))
                .collect(),
            family_witnesses: c
                .families
                .iter()
                .map(|f| LineReport::new(cat, &f.family.representative, x, Some(&f.family)))
                .collect(),
            genericity: c.genericity.clone(),
            cross_check: c.cross_check.clone(),
        }
    }
}
