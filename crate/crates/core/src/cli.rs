//! Command-line front end. Every subcommand writes newline-delimited JSON or
//! CSV to `--out` (or stdout) and exits 0 on success, 1 when a checked
//! invariant fails and 2 on bad input.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::certifier::{certify_with_tolerance, sweep_points, sweep_with_tolerance, REL_TOLERANCE};
use crate::error::{Error, Result};
use crate::family::{build_family, family_stats, FamilyConfig, FamilyRecord};
use crate::fourier::{indicator_fourier, parseval_check, GridSpec};
use crate::hypergraph::canonical::DEFAULT_ENUMERATION_CAP;
use crate::hypergraph::{edge_cardinality, edge_elements, Coloring, SumEdge};
use crate::numtheory::Rational;
use crate::solver::{
    exact_discrepancy, local_search_upper, random_coloring_upper, two_norm, Method,
};

pub const DEFAULT_SEED: u64 = 1;
/// Relative `--out` paths are resolved against this directory when it is set.
pub const OUT_DIR_ENV: &str = "SUMDISC_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "sumdisc", version, about = "Discrepancy of sums of two arithmetic progressions")]
pub struct RunConfig {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the special family and list its edges.
    Family {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Also write the family as JSON lines to this path.
        #[arg(long)]
        family_out: Option<PathBuf>,
    },
    /// Certificate for one alpha (given as p/q).
    Certify {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        alpha: Rational,
        #[arg(long, default_value_t = REL_TOLERANCE)]
        rel_tol: f64,
    },
    /// Certify a grid, random rationals and case-boundary points.
    Sweep {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        grid: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Number of random rationals.
        #[arg(long, default_value_t = 1000)]
        random: usize,
        #[arg(long, default_value_t = REL_TOLERANCE)]
        rel_tol: f64,
    },
    /// `|1_E^(t/m)|` on a grid, maximised over the family (or for one edge).
    Spectrum {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        grid: u64,
        /// A single edge `d1,l1,d2,l2` instead of the whole family.
        #[arg(long)]
        edge: Option<String>,
    },
    /// Exact value or upper bounds for the discrepancy.
    Disc {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 10)]
        restarts: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Largest n whose canonical edges are stored in memory.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
    },
    /// Two-norm totals over the family for a list of colorings.
    Twonorm {
        #[arg(long)]
        n: u64,
        /// Comma list of `random:K`, `ones`, `alt`, `block:B`.
        #[arg(long, default_value = "random:100,ones,alt")]
        colorings: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Run the family, Fourier, cardinality, certificate and two-norm checks.
    VerifyLemmas {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 10_000)]
        grid: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

/// Printed to stderr when a run fails.
#[derive(Serialize)]
struct FailureRecord<'a> {
    status: &'static str,
    module: &'a str,
    invariant: &'a str,
    detail: String,
}

enum Outcome {
    Ok,
    Failed { module: &'static str, invariant: String, detail: String },
}

fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn open_out(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            let p = resolve(p);
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("i/o: {e}"))
}

fn json_line<T: Serialize>(w: &mut dyn Write, v: &T) -> Result<()> {
    serde_json::to_writer(&mut *w, v).map_err(io_err)?;
    writeln!(w).map_err(io_err)
}

fn parse_edge(s: &str) -> Result<SumEdge> {
    let parts: Vec<u64> = s
        .split(',')
        .map(|t| t.trim().parse::<u64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse { input: s.into(), reason: e.to_string() })?;
    match parts[..] {
        [d1, l1, d2, l2] => SumEdge::new(d1, l1, d2, l2),
        _ => Err(Error::Parse { input: s.into(), reason: "expected d1,l1,d2,l2".into() }),
    }
}

/// `random:K`, `ones`, `alt`, `block:B` into labelled colorings.
pub fn parse_colorings(spec: &str, n: usize, seed: u64) -> Result<Vec<(String, Coloring)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let bad = |t: &str| Error::Parse { input: t.into(), reason: "unknown coloring".into() };
    for tok in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match tok.split_once(':') {
            None if tok == "ones" => out.push(("ones".into(), Coloring::ones(n))),
            None if tok == "alt" => out.push(("alt".into(), Coloring::alternating(n))),
            Some(("random", k)) => {
                let k: usize = k.parse().map_err(|_| bad(tok))?;
                for i in 0..k {
                    out.push((format!("random-{i}"), Coloring::random(n, &mut rng)));
                }
            }
            Some(("block", b)) => {
                let b: usize = b.parse().map_err(|_| bad(tok))?;
                out.push((format!("block-{b}"), Coloring::blocks(n, b)));
            }
            _ => return Err(bad(tok)),
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct CheckLine {
    check: &'static str,
    ok: bool,
    detail: serde_json::Value,
}

fn verify_lemmas(n: u64, grid: u64, seed: u64, w: &mut dyn Write) -> Result<Outcome> {
    if n < crate::certifier::N_MIN {
        return Err(Error::BelowMinN { n, min: crate::certifier::N_MIN });
    }
    let mut failed: Option<(&'static str, String, String)> = None;
    let mut record = |w: &mut dyn Write, check: &'static str, module: &'static str, ok: bool, detail: serde_json::Value| -> Result<()> {
        if !ok && failed.is_none() {
            failed = Some((module, check.to_string(), detail.to_string()));
        }
        json_line(w, &CheckLine { check, ok, detail })
    };

    let fam = build_family(FamilyConfig { n })?;
    let stats = family_stats(&fam);
    let ok = stats.bounds.all() && stats.clipped == 0;
    record(w, "family_counts", "family", ok, serde_json::to_value(&stats).map_err(io_err)?)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0f64;
    for size in [8usize, 16, 32, 64] {
        for _ in 0..25 {
            let chi = Coloring::random(size, &mut rng);
            let cap = size as u64 / 2;
            let e = SumEdge::new(
                rng.gen_range(1..=cap),
                rng.gen_range(1..=cap),
                rng.gen_range(1..=cap),
                rng.gen_range(1..=cap),
            )?;
            let m = 2 * (size as u64 + e.span()) + 1;
            worst = worst.max(parseval_check(&chi, &e, GridSpec { m })?.rel_err);
        }
    }
    record(w, "parseval", "fourier", worst <= 1e-8, serde_json::json!({ "max_rel_err": worst }))?;

    let mut mismatches = 0u64;
    for _ in 0..1000 {
        let e = SumEdge::new(
            rng.gen_range(1..=100),
            rng.gen_range(1..=100),
            rng.gen_range(1..=100),
            rng.gen_range(1..=100),
        )?;
        let c = edge_cardinality(&e);
        let g = crate::numtheory::gcd(e.d1, e.d2);
        let hyp = e.l1 <= e.d2 / g;
        if c.value != edge_elements(&e).len() as u64 || (hyp && c.value != e.l1 * e.l2) {
            mismatches += 1;
        }
    }
    record(w, "cardinality", "hypergraph", mismatches == 0, serde_json::json!({ "edges": 1000, "mismatches": mismatches }))?;

    let points = sweep_points(n, grid, 100, seed);
    let rows = sweep_with_tolerance(n, &points, REL_TOLERANCE)?;
    let bad = rows.iter().filter(|r| !r.ok).count();
    let min_ratio = rows.iter().map(|r| r.measured / n as f64).fold(f64::INFINITY, f64::min);
    record(w, "main_lemma_sweep", "certifier", bad == 0, serde_json::json!({ "points": rows.len(), "failures": bad, "min_measured_over_n": min_ratio }))?;

    let mut tn_fail = 0;
    let colorings = parse_colorings("ones,alt,random:3", n as usize, seed)?;
    for (_, chi) in &colorings {
        if !two_norm(chi, &fam)?.ok() {
            tn_fail += 1;
        }
    }
    record(w, "two_norm", "solver", tn_fail == 0, serde_json::json!({ "colorings": colorings.len(), "failures": tn_fail }))?;

    Ok(match failed {
        None => Outcome::Ok,
        Some((module, invariant, detail)) => Outcome::Failed { module, invariant, detail },
    })
}

fn execute(cfg: &RunConfig) -> Result<Outcome> {
    let mut w = open_out(&cfg.out).map_err(io_err)?;
    let outcome = match &cfg.command {
        Command::Family { n, format, family_out } => {
            let fam = build_family(FamilyConfig { n: *n })?;
            log::info!("{:?}", family_stats(&fam));
            let records: Vec<FamilyRecord> = fam.edges.iter().map(FamilyRecord::from).collect();
            match format {
                Format::Json => {
                    for r in &records {
                        json_line(&mut *w, r)?;
                    }
                }
                Format::Csv => {
                    let mut c = csv::Writer::from_writer(&mut *w);
                    for r in &records {
                        c.serialize(r).map_err(io_err)?;
                    }
                    c.flush().map_err(io_err)?;
                }
            }
            if let Some(path) = family_out {
                let mut f = open_out(&Some(path.clone())).map_err(io_err)?;
                for r in &records {
                    json_line(&mut *f, r)?;
                }
                f.flush().map_err(io_err)?;
            }
            Outcome::Ok
        }
        Command::Certify { n, alpha, rel_tol } => {
            let cert = certify_with_tolerance(alpha, *n, *rel_tol)?;
            json_line(&mut *w, &cert)?;
            Outcome::Ok
        }
        Command::Sweep { n, grid, seed, random, rel_tol } => {
            if *grid == 0 {
                return Err(Error::InvalidArgument("grid must be positive".into()));
            }
            let rows = sweep_with_tolerance(*n, &sweep_points(*n, *grid, *random, *seed), *rel_tol)?;
            let mut c = csv::Writer::from_writer(&mut *w);
            for r in &rows {
                c.serialize(r).map_err(io_err)?;
            }
            c.flush().map_err(io_err)?;
            Outcome::Ok
        }
        Command::Spectrum { n, grid, edge } => {
            if *grid == 0 {
                return Err(Error::InvalidArgument("grid must be positive".into()));
            }
            let edges: Vec<SumEdge> = match edge {
                Some(s) => vec![parse_edge(s)?],
                None => build_family(FamilyConfig { n: *n })?.base_edges().copied().collect(),
            };
            let g = GridSpec { m: *grid };
            let mut c = csv::Writer::from_writer(&mut *w);
            c.write_record(["alpha_num", "alpha_den", "magnitude"]).map_err(io_err)?;
            for t in 0..*grid {
                let a = g.point(t);
                let mag = edges.iter().map(|e| indicator_fourier(e, &a).norm()).fold(0.0, f64::max);
                c.write_record([a.numer().to_string(), a.denom().to_string(), format!("{mag}")])
                    .map_err(io_err)?;
            }
            c.flush().map_err(io_err)?;
            Outcome::Ok
        }
        Command::Disc { n, method, trials, restarts, seed, cap } => {
            let report = match method {
                Method::Exact => exact_discrepancy(*n)?,
                Method::Local => local_search_upper(*n, *restarts, *seed, *cap)?,
                Method::Random => random_coloring_upper(*n, *trials, *seed, *cap)?,
            };
            json_line(&mut *w, &report)?;
            Outcome::Ok
        }
        Command::Twonorm { n, colorings, seed } => {
            let fam = build_family(FamilyConfig { n: *n })?;
            let list = parse_colorings(colorings, *n as usize, *seed)?;
            let mut c = csv::Writer::from_writer(&mut *w);
            c.write_record(["coloring_id", "S", "bound", "max_abs", "ok"]).map_err(io_err)?;
            let mut first_bad = None;
            for (id, chi) in &list {
                let r = two_norm(chi, &fam)?;
                if !r.ok() && first_bad.is_none() {
                    first_bad = Some(id.clone());
                }
                c.write_record([
                    id.clone(),
                    r.total.to_string(),
                    format!("{}", r.bound),
                    r.max_abs.value.unsigned_abs().to_string(),
                    r.ok().to_string(),
                ])
                .map_err(io_err)?;
            }
            c.flush().map_err(io_err)?;
            match first_bad {
                None => Outcome::Ok,
                Some(id) => Outcome::Failed {
                    module: "solver",
                    invariant: "S >= n^3/90000 and max |chi(E_a)| > sqrt(n)/1200".into(),
                    detail: format!("coloring {id}"),
                },
            }
        }
        Command::VerifyLemmas { n, grid, seed } => verify_lemmas(*n, *grid, *seed, &mut *w)?,
    };
    w.flush().map_err(io_err)?;
    Ok(outcome)
}

fn module_of(e: &Error) -> &'static str {
    match e {
        Error::InternalInvariantViolation { module, .. } => module,
        Error::ContainmentViolation { .. } | Error::FamilyMismatch(_) => "family",
        _ => "cli",
    }
}

/// Runs one command and returns the process exit code.
pub fn run(cfg: RunConfig) -> i32 {
    if let Some(t) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            log::warn!("thread pool already configured: {e}");
        }
    }
    let report = |status, module: &str, invariant: &str, detail: String| {
        let rec = FailureRecord { status, module, invariant, detail };
        eprintln!("{}", serde_json::to_string(&rec).expect("serialisable"));
    };
    match execute(&cfg) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::Failed { module, invariant, detail }) => {
            report("failed", module, &invariant, detail);
            1
        }
        Err(e) if e.is_invariant_failure() => {
            let invariant = match &e {
                Error::InternalInvariantViolation { invariant, .. } => invariant.to_string(),
                _ => e.to_string(),
            };
            report("failed", module_of(&e), &invariant, e.to_string());
            1
        }
        Err(e) => {
            report("error", module_of(&e), "valid input", e.to_string());
            2
        }
    }
}
