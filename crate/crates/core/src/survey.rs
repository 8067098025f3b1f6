//! Randomized survey of candidate counts over regular elementary
//! triangulations.
//!
//! Liftings are random concave quadratics with uniform integer noise (see
//! [`random_concave_lifting`]); each accepted triangulation is reported
//! once, identified by its S4-canonical hash.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{search_all, Catalog};
use crate::error::{Error, Result};
use crate::lifting::{alpha_lifting, random_concave_lifting, Lifting};
use crate::subdivision::{subdivide, Triangulation};

#[derive(Clone, Debug)]
pub struct SurveyConfig {
    pub delta: i64,
    pub seed: u64,
    /// Number of distinct accepted triangulations to report.
    pub samples: usize,
    /// Inclusive range of the integer noise added to the random concave
    /// lifting.
    pub range: (i64, i64),
    /// Report the alpha triangulation as sample 0.
    pub include_alpha: bool,
    /// Give up after this many drawn liftings.
    pub max_draws: usize,
}

impl SurveyConfig {
    pub fn new(delta: i64, seed: u64, samples: usize) -> SurveyConfig {
        SurveyConfig {
            delta,
            seed,
            samples,
            range: (-30, 30),
            include_alpha: false,
            max_draws: samples.saturating_mul(100).max(1000),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SurveyRow {
    pub sample: usize,
    /// Lifting seed of the draw; `None` for the alpha lifting.
    pub seed: Option<u64>,
    pub hash: u64,
    pub counts: BTreeMap<String, usize>,
    pub total: usize,
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct Survey {
    pub codes: Vec<String>,
    pub rows: Vec<SurveyRow>,
    pub draws: usize,
    /// Draws whose subdivision is not a regular elementary triangulation.
    pub rejected: usize,
    /// Accepted draws whose triangulation was already reported.
    pub duplicates: usize,
}

/// Candidate counts per applicable code.
pub fn candidate_counts(cat: &Catalog, tri: &Triangulation) -> BTreeMap<String, usize> {
    search_all(cat, tri)
        .into_iter()
        .map(|(c, v)| (c, v.len()))
        .collect()
}

/// Seed of the `k`-th drawn lifting.
fn draw_seed(seed: u64, k: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng.gen()
}

enum Draw {
    Rejected,
    Accepted(u64, Triangulation),
}

fn draw(cfg: &SurveyConfig, seed: u64) -> Result<Draw> {
    let l = random_concave_lifting(cfg.delta, seed, cfg.range.0, cfg.range.1)?;
    Ok(accept(&l))
}

fn accept(l: &Lifting) -> Draw {
    let s = subdivide(l);
    if s.is_elementary {
        Draw::Accepted(s.triangulation.canonical_hash(), s.triangulation)
    } else {
        Draw::Rejected
    }
}

/// Runs the survey. Output depends only on the configuration, not on the
/// number of worker threads.
pub fn survey(cat: &Catalog, cfg: &SurveyConfig) -> Result<Survey> {
    if cfg.delta < 1 {
        return Err(Error::InvalidDegree(cfg.delta));
    }
    let codes: Vec<String> = cat.applicable(cfg.delta).map(|e| e.code.clone()).collect();
    let mut out = Survey {
        codes,
        ..Default::default()
    };
    let mut seen = BTreeSet::new();
    let mut accepted: Vec<(Option<u64>, Triangulation)> = Vec::new();
    if cfg.include_alpha && cfg.samples > 0 {
        if let Draw::Accepted(h, t) = accept(&alpha_lifting(cfg.delta)?) {
            seen.insert(h);
            accepted.push((None, t));
        }
    }
    let batch = rayon::current_num_threads().max(1) * 4;
    while accepted.len() < cfg.samples && out.draws < cfg.max_draws {
        let n = batch.min(cfg.max_draws - out.draws);
        let seeds: Vec<u64> = (out.draws..out.draws + n)
            .map(|k| draw_seed(cfg.seed, k))
            .collect();
        let draws: Vec<Result<Draw>> = seeds.par_iter().map(|&s| draw(cfg, s)).collect();
        for (s, d) in seeds.into_iter().zip(draws) {
            if accepted.len() == cfg.samples {
                break;
            }
            out.draws += 1;
            match d? {
                Draw::Rejected => out.rejected += 1,
                Draw::Accepted(h, t) => {
                    if seen.insert(h) {
                        accepted.push((Some(s), t));
                    } else {
                        out.duplicates += 1;
                    }
                }
            }
        }
    }
    out.rows = accepted
        .par_iter()
        .enumerate()
        .map(|(sample, (seed, t))| {
            let counts = candidate_counts(cat, t);
            let total = counts.values().sum();
            SurveyRow {
                sample,
                seed: *seed,
                hash: t.canonical_hash(),
                counts,
                total,
            }
        })
        .collect();
    Ok(out)
}

impl Survey {
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "sample,seed,hash")?;
        for c in &self.codes {
            write!(w, ",{c}")?;
        }
        writeln!(w, ",total")?;
        for r in &self.rows {
            let seed = r
                .seed
                .map_or_else(|| "alpha".to_string(), |s| s.to_string());
            write!(w, "{},{},{:016x}", r.sample, seed, r.hash)?;
            for c in &self.codes {
                write!(w, ",{}", r.counts.get(c).copied().unwrap_or(0))?;
            }
            writeln!(w, ",{}", r.total)?;
        }
        Ok(())
    }

    pub fn min_total(&self) -> Option<usize> {
        self.rows.iter().map(|r| r.total).min()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_row_has_48_candidates() {
        let cat = Catalog::builtin();
        let mut cfg = SurveyConfig::new(3, 7, 1);
        cfg.include_alpha = true;
        let s = survey(&cat, &cfg).unwrap();
        assert_eq!(s.rows.len(), 1);
        assert_eq!(s.rows[0].seed, None);
        assert_eq!(s.rows[0].total, 48);
    }

    #[test]
    fn survey_is_deterministic() {
        let cat = Catalog::builtin();
        let cfg = SurveyConfig::new(3, 11, 4);
        let run = || {
            let mut buf = Vec::new();
            survey(&cat, &cfg).unwrap().write_csv(&mut buf).unwrap();
            buf
        };
        let a = run();
        assert_eq!(a, run());
        let text = String::from_utf8(a).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("sample,seed,hash,3A,"));
    }

    #[test]
    fn draws_are_tallied() {
        let cat = Catalog::builtin();
        let s = survey(&cat, &SurveyConfig::new(3, 3, 5)).unwrap();
        assert_eq!(s.rows.len(), 5);
        assert_eq!(s.draws, s.rows.len() + s.rejected + s.duplicates);
        let hashes: BTreeSet<u64> = s.rows.iter().map(|r| r.hash).collect();
        assert_eq!(hashes.len(), 5);
    }
}
