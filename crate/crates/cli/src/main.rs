use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use tropline::catalog::{find_subcomplexes, Catalog};
use tropline::count::{count_lines, CountOptions, CountReport};
use tropline::export::{write_off, ClipBox};
use tropline::lifting::{alpha_lifting, Lifting};
use tropline::subdivision::{secondary_cone_contains, subdivide};
use tropline::surface::{build_surface, TropicalSurface};
use tropline::survey::{survey, SurveyConfig};
use tropline::{Error, Rat};

#[derive(Parser)]
#[command(
    name = "tropline",
    version,
    about = "Smooth tropical surfaces and the tropical lines on them"
)]
struct Cli {
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the regular subdivision induced by a lifting.
    Subdivide {
        #[command(flatten)]
        input: LiftingArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Describe the surface dual to the subdivision.
    Surface {
        #[command(flatten)]
        input: LiftingArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Candidate subcomplexes of one catalog type.
    Candidates {
        #[command(flatten)]
        input: LiftingArgs,
        #[arg(long)]
        code: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count the tropical lines on the surface.
    CountLines {
        #[command(flatten)]
        input: LiftingArgs,
        /// Also compare the catalog route with a direct enumeration.
        #[arg(long)]
        cross_check: bool,
        /// Report degenerate lines as well.
        #[arg(long)]
        include_degenerate: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Candidate counts over random regular elementary triangulations (CSV).
    Survey {
        #[arg(long, default_value_t = 3)]
        delta: i64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        samples: usize,
        /// Noise range added to the random concave liftings.
        #[arg(long, value_parser = parse_range, default_value = "-30,30")]
        range: (i64, i64),
        /// Report the alpha triangulation as sample 0.
        #[arg(long)]
        include_alpha: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the 2-cells clipped to a box as an OFF mesh.
    Export {
        #[command(flatten)]
        input: LiftingArgs,
        /// x0,x1,y0,y1,z0,z1
        #[arg(long = "box", value_parser = parse_box, allow_hyphen_values = true)]
        bounds: ClipBox,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct LiftingArgs {
    /// A lifting JSON file, or `alpha`.
    #[arg(long)]
    lifting: String,
    /// Degree; required for `alpha`, checked against a file.
    #[arg(long)]
    delta: Option<i64>,
    /// Add uniform noise of at most this rational magnitude to every value.
    #[arg(long, value_parser = parse_rat)]
    perturb: Option<Rat>,
    /// Seed of the perturbation.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    Rat::from_str(s).map_err(|e| e.to_string())
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo: i64 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let hi: i64 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo},{hi}"));
    }
    Ok((lo, hi))
}

fn parse_box(s: &str) -> Result<ClipBox, String> {
    let vals: Vec<Rat> = s
        .split(',')
        .map(|v| parse_rat(v.trim()))
        .collect::<Result<_, _>>()?;
    let bounds: [Rat; 6] = vals
        .try_into()
        .map_err(|_| "expected six values x0,x1,y0,y1,z0,z1".to_string())?;
    ClipBox::new(bounds).map_err(|e| e.to_string())
}

/// Exit codes are part of the interface.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_)
        | Error::Lifting(_)
        | Error::Json(_)
        | Error::InvalidDegree(_)
        | Error::DegreeMismatch(..)
        | Error::OutsideSimplex(..)
        | Error::Catalog(_) => 2,
        Error::NotSmooth(_) => 3,
        Error::UnsupportedDegree(_) => 4,
        Error::EmptyClip => 5,
        _ => 1,
    }
}

fn check_output(out: &Option<PathBuf>) -> tropline::Result<()> {
    if let Some(p) = out {
        let parent = p
            .parent()
            .filter(|d| !d.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        if !parent.is_dir() {
            return Err(Error::Io(io::Error::new(
                io::ErrorKind::NotFound,
                format!("no directory {}", parent.display()),
            )));
        }
    }
    Ok(())
}

fn sink(out: &Option<PathBuf>) -> tropline::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> tropline::Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

impl LiftingArgs {
    fn load(&self) -> tropline::Result<Lifting> {
        let base = if self.lifting == "alpha" {
            let delta = self
                .delta
                .ok_or_else(|| Error::Parse("--delta is required with --lifting alpha".into()))?;
            alpha_lifting(delta)?
        } else {
            let path = Path::new(&self.lifting);
            if !path.is_file() {
                return Err(Error::Parse(format!("no lifting file {}", path.display())));
            }
            let l = Lifting::read(path)?;
            if let Some(d) = self.delta.filter(|&d| d != l.delta()) {
                return Err(Error::DegreeMismatch(d, l.delta()));
            }
            l
        };
        let Some(magnitude) = &self.perturb else {
            return Ok(base);
        };
        let perturbed = base.perturbed(magnitude, self.seed);
        // the perturbation must keep the subdivision of the input lifting
        let t = subdivide(&base).triangulation;
        if !secondary_cone_contains(&t, &perturbed)? {
            return Err(Error::LeftSecondaryCone);
        }
        Ok(perturbed)
    }

    fn surface(&self) -> tropline::Result<TropicalSurface> {
        build_surface(&self.load()?)
    }
}

#[derive(Serialize)]
struct CandidateReport {
    code: String,
    count: usize,
    diagnostic: Option<String>,
    subcomplexes: Vec<tropline::line::SubcomplexReport>,
}

fn run(cli: Cli) -> tropline::Result<()> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Error::Parse(format!("--jobs: {e}")))?;
    }
    match cli.command {
        Command::Subdivide { input, out } => {
            check_output(&out)?;
            let s = subdivide(&input.load()?);
            let t = &s.triangulation;
            eprintln!(
                "delta {}: {} tetrahedra, {} triangles, {} edges, {} vertices; triangulation={} elementary={}",
                t.delta(),
                t.count(3),
                t.count(2),
                t.count(1),
                t.count(0),
                s.is_triangulation,
                s.is_elementary
            );
            write_json(&out, &t.to_json())
        }
        Command::Surface { input, out } => {
            check_output(&out)?;
            let x = input.surface()?;
            write_json(&out, &x.report())
        }
        Command::Candidates { input, code, out } => {
            check_output(&out)?;
            let cat = Catalog::from_env()?;
            let x = input.surface()?;
            let s = find_subcomplexes(&cat, x.triangulation(), &code)?;
            if let Some(d) = &s.diagnostic {
                eprintln!("{d}");
            }
            let report = CandidateReport {
                code,
                count: s.candidates.len(),
                diagnostic: s.diagnostic,
                subcomplexes: s.candidates.iter().map(|c| c.subcomplex.report()).collect(),
            };
            write_json(&out, &report)
        }
        Command::CountLines {
            input,
            cross_check,
            include_degenerate,
            out,
        } => {
            check_output(&out)?;
            let cat = Catalog::from_env()?;
            let x = input.surface()?;
            let opts = CountOptions {
                cross_check,
                include_degenerate,
                ..Default::default()
            };
            let c = count_lines(&cat, &x, &opts)?;
            let report = CountReport::new(&cat, &x, &c);
            eprintln!(
                "delta {}: {} isolated lines, {} families{}",
                report.delta,
                report.isolated,
                report.families,
                if report.infinite { " (infinite)" } else { "" }
            );
            write_json(&out, &report)
        }
        Command::Survey {
            delta,
            seed,
            samples,
            range,
            include_alpha,
            out,
        } => {
            check_output(&out)?;
            let cat = Catalog::from_env()?;
            let mut cfg = SurveyConfig::new(delta, seed, samples);
            cfg.range = range;
            cfg.include_alpha = include_alpha;
            let s = survey(&cat, &cfg)?;
            eprintln!(
                "{} triangulations from {} draws ({} not elementary, {} repeated); minimum total {}",
                s.rows.len(),
                s.draws,
                s.rejected,
                s.duplicates,
                s.min_total().map_or_else(|| "-".to_string(), |m| m.to_string())
            );
            let mut w = sink(&out)?;
            s.write_csv(&mut w)?;
            w.flush()?;
            Ok(())
        }
        Command::Export { input, bounds, out } => {
            check_output(&out)?;
            let x = input.surface()?;
            let mut buf = Vec::new();
            let n = write_off(&x, &bounds, &mut buf)?;
            let mut w = sink(&out)?;
            w.write_all(&buf)?;
            w.flush()?;
            eprintln!("{n} facets");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
