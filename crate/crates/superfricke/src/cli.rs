//! Command-line front end. Exit codes: 0 success, 1 failed verification,
//! 2 bad input or a computation that rejected its input.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::charvar::{evaluate_word, parse_word, RepresentationPair};
use crate::error::{Error, Result};
use crate::invariants::census::{generator_census, CensusConfig};
use crate::invariants::trace_word;
use crate::normalform::sl2::Mat2;
use crate::normalform::{osp_triangulate, sl2_triangulate, NormalFormRecord};
use crate::scalar::Mode;
use crate::verify::{self, Suite, Table, VerifyConfig, DEFAULT_SAMPLES};

#[derive(Parser, Debug)]
#[command(name = "superfricke", version, about = "Grassmann and OSp(1|2) algebra, triangulation normal forms and invariant census")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run property suites and print a pass/fail table.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value = "0xF2C3", value_parser = parse_seed)]
        seed: u64,
        /// Random cases per check.
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        /// Emit the results as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Triangulate a pair; odd-free scalar pairs use the SL(2) algorithm.
    NormalForm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Supertraces of comma-separated words.
    Invariants {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        words: String,
    },
    /// Gram relation census and the generator count.
    Census {
        #[arg(long, default_value_t = 4)]
        degree: u32,
        #[arg(long, default_value_t = 1024)]
        samples: usize,
        #[arg(long, default_value = "0xF2C3", value_parser = parse_seed)]
        seed: u64,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u8).range(1..=16))]
        n: u8,
    },
    /// Image of a word as a matrix.
    Eval {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "")]
        word: String,
    },
}

/// Decimal or 0x-prefixed hexadecimal.
pub fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let t = s.trim();
    let r = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    r.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn read_input(path: &Path) -> Result<Value> {
    let mut text = String::new();
    if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text).map_err(|e| Error::Json(e.to_string()))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Error::Json(format!("{}: {e}", path.display())))?;
    }
    serde_json::from_str(&text).map_err(|e| Error::Json(e.to_string()))
}

/// Accepts a bare pair or a fixture document holding one under "pair".
fn read_pair(path: &Path) -> Result<RepresentationPair> {
    let v = read_input(path)?;
    RepresentationPair::from_json(v.get("pair").unwrap_or(&v))
}

fn pure_body(rho: &RepresentationPair) -> bool {
    [rho.a(), rho.b()].iter().all(|g| g.is_bosonic() && g.matrix().entries().all(|e| e.soul().is_zero()))
}

fn body_mat2(g: &crate::osp::OspElement) -> Mat2 {
    let b = g.reduce_body();
    std::array::from_fn(|i| std::array::from_fn(|j| b[i][j].to_complex()))
}

/// SL(2) triangulation when both images are scalar and odd-free, OSp otherwise.
pub fn normal_form(rho: &RepresentationPair) -> Result<NormalFormRecord> {
    if pure_body(rho) {
        Ok(sl2_triangulate(&body_mat2(rho.a()), &body_mat2(rho.b()))?.to_record(rho.n()))
    } else {
        osp_triangulate(rho.a(), rho.b())
    }
}

/// Word → supertrace, in the order given. Entries are trimmed; an empty
/// entry is the empty word.
pub fn word_invariants(rho: &RepresentationPair, words: &str) -> Result<serde_json::Map<String, Value>> {
    let mut out = serde_json::Map::new();
    for raw in words.split(',') {
        let w = parse_word(raw.trim())?;
        let v = trace_word(&w, rho)?;
        out.insert(w.to_string(), serde_json::to_value(v).map_err(|e| Error::Json(e.to_string()))?);
    }
    Ok(out)
}

fn emit<T: Serialize>(out: &mut dyn Write, v: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Error::Json(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Error::Json(e.to_string()))
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Verify { suite, seed, samples, mode, json } => {
            let results = verify::run(suite, &VerifyConfig { seed, samples, mode: mode.into() });
            if json {
                emit(out, &results)?;
            } else {
                writeln!(out, "{}", Table(&results)).map_err(|e| Error::Json(e.to_string()))?;
            }
            Ok(if results.iter().all(|r| r.passed) { 0 } else { 1 })
        }
        Command::NormalForm { input, mode } => {
            let rho = read_pair(&input)?;
            let rho = match mode {
                Some(ModeArg::Float) => rho.to_float(),
                Some(ModeArg::Exact) if rho.mode() == Mode::Float => {
                    return Err(Error::ModeMismatch);
                }
                _ => rho,
            };
            emit(out, &normal_form(&rho)?)?;
            Ok(0)
        }
        Command::Invariants { input, words } => {
            let rho = read_pair(&input)?;
            emit(out, &word_invariants(&rho, &words)?)?;
            Ok(0)
        }
        Command::Census { degree, samples, seed, n } => {
            let cfg = CensusConfig { degree, samples, seed, n, ..CensusConfig::default() };
            emit(out, &generator_census(&cfg)?)?;
            Ok(0)
        }
        Command::Eval { input, word } => {
            let rho = read_pair(&input)?;
            emit(out, &evaluate_word(&parse_word(&word)?, &rho)?)?;
            Ok(0)
        }
    }
}

/// Runs the CLI on `argv` (program name first) with explicit streams.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

pub fn cli_main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("superfricke").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn seeds_in_both_bases() {
        assert_eq!(parse_seed("0xF2C3"), Ok(0xF2C3));
        assert_eq!(parse_seed("62147"), Ok(62147));
        assert!(parse_seed("0xZZ").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["verify", "--suite", "nope"]).0, 2);
        assert_eq!(call(&["eval", "--input", "/nonexistent.json"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn fast_verify_suite() {
        let (code, out, _) = call(&["verify", "--suite", "grassmann", "--samples", "3"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("PASS"));
    }

    #[test]
    fn invariants_keep_word_order() {
        let fx = &crate::fixtures::pairs()[0];
        let rho = fx.pair().unwrap();
        let m = word_invariants(&rho, "B, A,AB,").unwrap();
        assert_eq!(m.keys().cloned().collect::<Vec<_>>(), vec!["B", "A", "AB", ""]);
        assert!(matches!(word_invariants(&rho, "AxB"), Err(Error::Syntax { position: 1, .. })));
    }
}
