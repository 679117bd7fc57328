//! Command implementations for the `hqmm` binary.
//!
//! Exit codes: 0 success, 1 the model failed validation, 2 usage, I/O or
//! parse problems.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use hqmm::document::{curve_to_csv, parse_model_document, Model, ModelDocument, OptimizationDocument};
use hqmm::format::format_sig15;
use hqmm::optimize::{
    maximize_word_probability, sweep_curve, DecodedModel, HqmmParameterization, OptimizerConfig,
    SearchSpace,
};
use hqmm::rng::mix;
use hqmm::{classical, embed_hmm, quantum, Word, WordTemplate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hqmm", version, about = "One-bit HMMs and one-qubit hidden quantum Markov models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Hmm,
    Hqmm,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a model document against its invariants.
    Validate { model: PathBuf },
    /// Print the probability of a word.
    Prob {
        model: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Draw sample words, one per line.
    Sample {
        model: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        length: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the quantum model that simulates a classical one.
    Embed {
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Maximize the probability of one word over a model family.
    Optimize {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, conflicts_with_all = ["template", "k"], required_unless_present = "template")]
        word: Option<String>,
        #[arg(long, requires = "k")]
        template: Option<String>,
        #[arg(long, requires = "template")]
        k: Option<usize>,
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
        restarts: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..=4))]
        kraus_per_symbol: u64,
        /// Evaluation budget per restart (default 5000 for hmm, 20000 for hqmm).
        #[arg(long)]
        max_evals: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare both families on a word template over a range of k.
    Curve {
        #[arg(long, default_value = "1,0^k,1")]
        template: String,
        /// Inclusive range `lo:hi`.
        #[arg(long)]
        k: String,
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
        restarts: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..=4))]
        kraus_per_symbol: u64,
        /// Per-restart budget of the classical searches.
        #[arg(long, default_value_t = 5_000)]
        classical_evals: usize,
        /// Per-restart budget of the quantum searches.
        #[arg(long, default_value_t = 20_000)]
        quantum_evals: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Usage(String),
}

impl From<hqmm::Error> for Failure {
    fn from(e: hqmm::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(err, "{msg}");
            EXIT_INVALID
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Validate { model } => cmd_validate(&model, out),
        Command::Prob { model, word } => cmd_prob(&model, &word, out),
        Command::Sample {
            model,
            length,
            count,
            seed,
        } => cmd_sample(&model, length as usize, count, seed, out),
        Command::Embed { model, out: path } => cmd_embed(&model, &path, out),
        Command::Optimize {
            family,
            word,
            template,
            k,
            restarts,
            seed,
            kraus_per_symbol,
            max_evals,
            out: path,
        } => {
            let word = match (word, template, k) {
                (Some(w), None, None) => parse_word(&w)?,
                (None, Some(t), Some(k)) => parse_template(&t)?.instantiate(k),
                _ => return Err(Failure::Usage("give either --word or --template with --k".into())),
            };
            cmd_optimize(
                family,
                &word,
                restarts as usize,
                seed,
                kraus_per_symbol as usize,
                max_evals,
                path.as_deref(),
                out,
            )
        }
        Command::Curve {
            template,
            k,
            restarts,
            seed,
            kraus_per_symbol,
            classical_evals,
            quantum_evals,
            out: path,
        } => {
            let template = parse_template(&template)?;
            let (lo, hi) = parse_range(&k)?;
            let classical = OptimizerConfig::classical_default()
                .with_restarts(restarts as usize)
                .with_max_evals(classical_evals)
                .with_seed(seed);
            let quantum = OptimizerConfig::quantum_default()
                .with_restarts(restarts as usize)
                .with_max_evals(quantum_evals)
                .with_seed(seed);
            let p = HqmmParameterization::qubit(kraus_per_symbol as usize)?;
            let rows = sweep_curve(&template, lo..=hi, p, &classical, &quantum)?;
            write_atomic(&path, curve_to_csv(&rows).as_bytes())?;
            for r in &rows {
                emit(
                    out,
                    format!(
                        "k={} word={} classical_max={} quantum_max={} gap={}",
                        r.k,
                        r.word,
                        format_sig15(r.classical_max),
                        format_sig15(r.quantum_max),
                        format_sig15(r.gap)
                    ),
                )?;
            }
            Ok(())
        }
    }
}

fn emit(out: &mut dyn Write, line: String) -> Outcome {
    writeln!(out, "{line}").map_err(|e| Failure::Usage(format!("writing output: {e}")))
}

fn parse_word(s: &str) -> Result<Word, Failure> {
    s.parse::<Word>().map_err(Failure::from)
}

fn parse_template(s: &str) -> Result<WordTemplate, Failure> {
    s.parse::<WordTemplate>().map_err(Failure::from)
}

/// `lo:hi`, inclusive, `lo <= hi`.
fn parse_range(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Usage(format!("malformed k range {s:?}, expected lo:hi"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn load_model(path: &Path) -> Result<Model, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("reading {}: {e}", path.display())))?;
    let doc = parse_model_document(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    doc.to_model()
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Loads and validates at the default tolerance.
fn load_valid_model(path: &Path) -> Result<Model, Failure> {
    let model = load_model(path)?;
    let report = match &model {
        Model::Hmm(m) => m.validate(classical::DEFAULT_TOL),
        Model::Hqmm(m) => m.validate(quantum::DEFAULT_TOL),
    };
    if report.is_valid() {
        Ok(model)
    } else {
        let lines: Vec<String> = report.violations.iter().map(|v| format!("  {v}")).collect();
        Err(Failure::Invalid(format!(
            "{}: invalid model\n{}",
            path.display(),
            lines.join("\n")
        )))
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Outcome {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let fail = |e: std::io::Error| Failure::Usage(format!("writing {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

fn cmd_validate(path: &Path, out: &mut dyn Write) -> Outcome {
    match load_valid_model(path)? {
        Model::Hmm(m) => emit(out, format!("valid hmm with {} states", m.n_states())),
        Model::Hqmm(m) => emit(
            out,
            format!(
                "valid hqmm of dimension {} with {:?} Kraus operators per symbol",
                m.dim(),
                m.kraus().counts()
            ),
        ),
    }
}

fn cmd_prob(path: &Path, word: &str, out: &mut dyn Write) -> Outcome {
    let word = parse_word(word)?;
    let p = match load_valid_model(path)? {
        Model::Hmm(m) => m.word_probability(&word)?,
        Model::Hqmm(m) => m.word_probability(&word),
    };
    emit(out, format_sig15(p))
}

fn cmd_sample(path: &Path, length: usize, count: u64, seed: u64, out: &mut dyn Write) -> Outcome {
    let model = load_valid_model(path)?;
    let mut buf = String::new();
    for j in 0..count {
        let s = mix(seed, j);
        let w = match &model {
            Model::Hmm(m) => m.sample(length, s),
            Model::Hqmm(m) => m.sample(length, s),
        }
        .map_err(|e| Failure::Invalid(e.to_string()))?;
        buf.push_str(&w.to_string());
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())
        .map_err(|e| Failure::Usage(format!("writing output: {e}")))
}

fn cmd_embed(path: &Path, dest: &Path, out: &mut dyn Write) -> Outcome {
    let hmm = match load_model(path)? {
        Model::Hmm(m) => m,
        Model::Hqmm(_) => {
            return Err(Failure::Usage(
                "embed expects an hmm document; hqmm models cannot be embedded back".into(),
            ))
        }
    };
    let report = hmm.validate(classical::DEFAULT_TOL);
    if !report.is_valid() {
        return Err(Failure::Invalid(format!("{}: invalid model\n  {report}", path.display())));
    }
    let q = embed_hmm(&hmm)?;
    write_atomic(dest, ModelDocument::from_hqmm(&q).to_json().as_bytes())?;
    emit(
        out,
        format!(
            "wrote hqmm of dimension {} with {:?} Kraus operators per symbol to {}",
            q.dim(),
            q.kraus().counts(),
            dest.display()
        ),
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_optimize(
    family: FamilyArg,
    word: &Word,
    restarts: usize,
    seed: u64,
    kraus_per_symbol: usize,
    max_evals: Option<usize>,
    dest: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    let classical = OptimizerConfig::classical_default()
        .with_restarts(restarts)
        .with_seed(seed);
    let result = match family {
        FamilyArg::Hmm => {
            let cfg = max_evals.map_or(classical, |n| classical.with_max_evals(n));
            maximize_word_probability(SearchSpace::Classical { n_states: 2 }, word, &cfg)?
        }
        FamilyArg::Hqmm => {
            let p = HqmmParameterization::qubit(kraus_per_symbol)?;
            // The classical optimum seeds quantum restart 0 when it fits.
            let warm = if p.kraus_per_symbol.iter().all(|&m| m >= 4) {
                let c = maximize_word_probability(SearchSpace::Classical { n_states: 2 }, word, &classical)?;
                match c.model {
                    DecodedModel::Hmm(m) => Some(m),
                    DecodedModel::Hqmm(_) => None,
                }
            } else {
                None
            };
            let quantum = OptimizerConfig::quantum_default()
                .with_restarts(restarts)
                .with_seed(seed);
            let cfg = max_evals.map_or(quantum, |n| quantum.with_max_evals(n));
            maximize_word_probability(
                SearchSpace::Quantum {
                    parameterization: p,
                    warm_start: warm.as_ref(),
                },
                word,
                &cfg,
            )?
        }
    };
    if let Some(dest) = dest {
        write_atomic(dest, OptimizationDocument::new(&result).to_json().as_bytes())?;
    }
    emit(out, format_sig15(result.best_value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1:6").unwrap(), (1, 6));
        assert_eq!(parse_range("0:0").unwrap(), (0, 0));
        for bad in ["1-6", "6:1", ":3", "a:b", "1:2:3"] {
            assert!(parse_range(bad).is_err(), "{bad}");
        }
    }
}
