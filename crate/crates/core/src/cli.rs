//! Command-line interface: corpus generation, verification runs and
//! invariant inspection.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exactnum::{factor, fmt_rat, parse_rat, rint, Place, Rat};
use crate::invariants::SpaceInvariants;
use crate::linalg::Mat;
use crate::qspace::QuadSpace;
use crate::verify::{gen_corpus, run_corpus, CorpusEntry, CorpusOptions, Report, ReportMeta, CHECK_NAMES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "quadlat", version, about = "Exact verification of lattice identities for quaternary quadratic spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct CorpusArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub count: usize,
    #[arg(long, default_value_t = 6)]
    pub max_entry: i64,
    #[arg(long, default_value_t = 97)]
    pub max_prime: u64,
}

impl CorpusArgs {
    fn options(&self) -> CorpusOptions {
        CorpusOptions { max_entry: self.max_entry, max_prime: self.max_prime }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run all checks on a generated corpus or an instance file.
    Verify {
        /// Generate the corpus from --seed/--count instead of reading --instances.
        #[arg(long, conflicts_with = "instances")]
        gen: bool,
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        instances: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Random conjugating elements per instance for the equivariance check.
        #[arg(long, default_value_t = 3)]
        alphas: usize,
        #[arg(long)]
        quiet: bool,
    },
    /// Print the invariants of a quadratic space.
    Invariants {
        /// Gram matrix as JSON, entries as numbers or "p/q" strings.
        #[arg(long)]
        gram: String,
        /// Comma-separated primes for core dimensions.
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Write a corpus instance file.
    Gen {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub gram: Vec<Vec<String>>,
    pub h: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub instances: Vec<InstanceRecord>,
}

fn rat_strings(v: &[Rat]) -> Vec<String> {
    v.iter().map(fmt_rat).collect()
}

fn parse_row(row: &[String]) -> Result<Vec<Rat>> {
    row.iter().map(|s| parse_rat(s)).collect()
}

fn parse_matrix(m: &[Vec<String>]) -> Result<Mat> {
    m.iter().map(|r| parse_row(r)).collect()
}

impl InstanceFile {
    pub fn from_entries(entries: &[CorpusEntry]) -> InstanceFile {
        InstanceFile {
            instances: entries
                .iter()
                .map(|e| InstanceRecord {
                    gram: e.gram.iter().map(|r| rat_strings(r)).collect(),
                    h: rat_strings(&e.h),
                    lattice: e.lattice.as_ref().map(|b| b.iter().map(|r| rat_strings(r)).collect()),
                })
                .collect(),
        }
    }

    pub fn to_entries(&self) -> Result<Vec<CorpusEntry>> {
        self.instances
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let gram = parse_matrix(&s.gram).map_err(|e| Error::Parse(format!("instance {i}: {e}")))?;
                let h = parse_row(&s.h).map_err(|e| Error::Parse(format!("instance {i}: {e}")))?;
                let lattice = s.lattice.as_deref().map(parse_matrix).transpose()?;
                if gram.len() != 4 || gram.iter().any(|r| r.len() != 4) || h.len() != 4 {
                    return Err(Error::Parse(format!("instance {i}: expected a 4x4 gram matrix and a 4-vector h")));
                }
                if let Some(b) = &lattice {
                    if b.iter().any(|r| r.len() != 4) {
                        return Err(Error::Parse(format!("instance {i}: lattice rows must have length 4")));
                    }
                }
                Ok(CorpusEntry { gram, h, lattice })
            })
            .collect()
    }
}

pub fn read_instances(path: &PathBuf) -> Result<Vec<CorpusEntry>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let file: InstanceFile = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    file.to_entries()
}

fn json_rat(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) => parse_rat(s),
        Value::Number(n) => n.as_i64().map(rint).ok_or_else(|| Error::Parse(format!("non-integer number {n}; use a \"p/q\" string"))),
        other => Err(Error::Parse(format!("unexpected matrix entry {other}"))),
    }
}

pub fn parse_gram(s: &str) -> Result<Mat> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    let rows = v.as_array().ok_or_else(|| Error::Parse("gram must be a JSON array of rows".into()))?;
    rows.iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Parse("gram rows must be arrays".into()))?
                .iter()
                .map(json_rat)
                .collect()
        })
        .collect()
}

fn place_json(v: &Place) -> Value {
    match v {
        Place::Prime(p) => json!(p),
        Place::Infinity => json!("inf"),
    }
}

/// Invariants of the space as a JSON object.
pub fn invariants_json(gram: Mat, primes: &[u64]) -> Result<Value> {
    let s = QuadSpace::new(gram)?;
    let inv = SpaceInvariants::of(&s)?;
    let mut out = Map::new();
    out.insert("n".into(), json!(inv.n));
    out.insert("delta".into(), serde_json::from_str(&inv.delta.to_string()).unwrap_or(json!(inv.delta.to_string())));
    out.insert("disc_field".into(), json!(inv.disc_field_disc.to_string()));
    out.insert("ram".into(), Value::Array(inv.q_class.ram.iter().map(place_json).collect()));
    out.insert("s_inf".into(), json!(inv.s_inf));
    let primes: Vec<u64> = if primes.is_empty() {
        let two_det = s.det() * rint(2);
        let mut ps: Vec<u64> = factor(&two_det)?.into_keys().collect();
        ps.extend(inv.q_class.finite_ram());
        ps.sort_unstable();
        ps.dedup();
        ps
    } else {
        primes.to_vec()
    };
    for p in primes {
        out.insert(format!("t_{p}"), json!(inv.core_dimension(p)?));
    }
    Ok(Value::Object(out))
}

fn print_table(v: &Value) {
    if let Value::Object(m) = v {
        for (k, x) in m {
            let s = match x {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            println!("{k:<12} {s}");
        }
    }
}

fn usage_error(e: impl std::fmt::Display) -> i32 {
    eprintln!("error: {e}");
    EXIT_USAGE
}

/// Rejects entries whose form is degenerate or whose `h` is isotropic.
pub fn validate(entries: &[CorpusEntry]) -> Result<()> {
    for (i, e) in entries.iter().enumerate() {
        let s = QuadSpace::new(e.gram.clone()).map_err(|err| Error::Parse(format!("instance {i}: {err}")))?;
        if s.value(&e.h).is_zero() {
            return Err(Error::Parse(format!("instance {i}: {}", Error::IsotropicVector)));
        }
    }
    Ok(())
}

fn cmd_verify(
    gen: bool,
    corpus: &CorpusArgs,
    instances: Option<&PathBuf>,
    report: Option<&PathBuf>,
    alphas: usize,
    quiet: bool,
) -> i32 {
    let entries = match (gen, instances) {
        (true, _) => gen_corpus(corpus.seed, corpus.count, &corpus.options()),
        (false, Some(path)) => match read_instances(path).and_then(|e| validate(&e).map(|_| e)) {
            Ok(e) => e,
            Err(e) => return usage_error(e),
        },
        (false, None) => return usage_error("verify needs --gen or --instances FILE"),
    };
    let start = Instant::now();
    let results = run_corpus(&entries, corpus.seed, alphas);
    let rep = Report {
        meta: ReportMeta { seed: Some(corpus.seed), count: entries.len(), version: env!("CARGO_PKG_VERSION").to_string() },
        results,
    };
    if let Some(path) = report {
        let text = serde_json::to_string_pretty(&rep).expect("report serializes");
        if let Err(e) = fs::write(path, text + "\n") {
            return usage_error(format!("{}: {e}", path.display()));
        }
    }
    if !quiet {
        for name in CHECK_NAMES {
            let total = rep.results.iter().filter(|r| r.error.is_none()).count();
            let passed = rep.results.iter().filter(|r| r.checks.iter().any(|c| c.name == name && c.pass)).count();
            println!("{name:<20} {passed}/{total}");
        }
        for r in rep.results.iter().filter(|r| !r.pass()) {
            match &r.error {
                Some(e) => println!("instance {}: error: {e}", r.id),
                None => {
                    for c in r.checks.iter().filter(|c| !c.pass) {
                        println!("instance {}: {} failed: {} vs {}", r.id, c.name, c.lhs, c.rhs);
                    }
                }
            }
        }
        println!("{} instances in {:.2}s", rep.results.len(), start.elapsed().as_secs_f64());
    }
    if rep.all_pass() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn cmd_invariants(gram: &str, primes: &[u64], format: Format) -> i32 {
    let value = match parse_gram(gram).and_then(|g| invariants_json(g, primes)) {
        Ok(v) => v,
        Err(e) => return usage_error(e),
    };
    match format {
        Format::Json => println!("{value}"),
        Format::Table => print_table(&value),
    }
    EXIT_OK
}

fn cmd_gen(corpus: &CorpusArgs, output: Option<&PathBuf>) -> i32 {
    let entries = gen_corpus(corpus.seed, corpus.count, &corpus.options());
    let text = serde_json::to_string_pretty(&InstanceFile::from_entries(&entries)).expect("instances serialize") + "\n";
    match output {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                return usage_error(format!("{}: {e}", path.display()));
            }
        }
        None => print!("{text}"),
    }
    EXIT_OK
}

pub fn run(cli: &Cli) -> i32 {
    match &cli.command {
        Command::Verify { gen, corpus, instances, report, alphas, quiet } => {
            cmd_verify(*gen, corpus, instances.as_ref(), report.as_ref(), *alphas, *quiet)
        }
        Command::Invariants { gram, primes, format } => cmd_invariants(gram, primes, *format),
        Command::Gen { corpus, output } => cmd_gen(corpus, output.as_ref()),
    }
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_of_i4_and_i3() {
        let v = invariants_json(parse_gram("[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]").unwrap(), &[2, 3]).unwrap();
        assert_eq!(v["delta"], json!(1));
        assert_eq!(v["ram"], json!([2, "inf"]));
        assert_eq!(v["s_inf"], json!(4));
        assert_eq!(v["t_2"], json!(4));
        assert_eq!(v["t_3"], json!(0));
        let v = invariants_json(parse_gram(r#"[["1","0","0"],["0","1","0"],["0","0","1"]]"#).unwrap(), &[]).unwrap();
        assert_eq!(v["delta"], json!(-1));
        assert_eq!(v["ram"], json!([2, "inf"]));
        assert_eq!(v["s_inf"], json!(3));
        assert_eq!(v["t_2"], json!(3));
    }

    #[test]
    fn singular_gram_is_rejected() {
        let e = invariants_json(parse_gram("[[1,1],[1,1]]").unwrap(), &[]).unwrap_err();
        assert_eq!(e.to_string(), "degenerate form");
        assert!(parse_gram("[[1, 0.5]]").is_err());
        assert!(parse_gram("{").is_err());
    }

    #[test]
    fn instance_file_round_trip() {
        let entries = gen_corpus(9, 4, &CorpusOptions::default());
        let file = InstanceFile::from_entries(&entries);
        let text = serde_json::to_string(&file).unwrap();
        let back: InstanceFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_entries().unwrap(), entries);
    }
}
