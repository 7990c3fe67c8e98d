//! `rarefied`: exact sums, automaton inference, verification of the claims,
//! query scripts and exports.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand, ValueEnum};

use rarefied::automata::{export_dot, save_text};
use rarefied::inference::InferConfig;
use rarefied::logic::QueryScript;
use rarefied::numbers::{rarefied_f, rarefied_g};
use rarefied::theorems::{Target, TheoremConfig, Workbench, THEOREMS};

#[derive(Parser)]
#[command(
    name = "rarefied",
    version,
    about = "Synchronized automata for rarefied Thue-Morse sums"
)]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Cmd,
}

/// Settings shared by every command.
#[derive(Args, Clone)]
struct Config {
    /// Directory for automata, reports and tables.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Oracle sweep for functions of base-4 `n`.
    #[arg(long, global = true, default_value_t = 4u64.pow(7), value_parser = clap::value_parser!(u64).range(1..))]
    sweep4: u64,
    /// Oracle sweep for functions of base-16 `n`.
    #[arg(long, global = true, default_value_t = 16u64.pow(4), value_parser = clap::value_parser!(u64).range(1..))]
    sweep16: u64,
    /// Largest sample budget tried by inference.
    #[arg(long, global = true, default_value_t = 1 << 20, value_parser = clap::value_parser!(u64).range(1..))]
    ceiling: u64,
    /// Seed for negative samples and test suffixes.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
}

impl Config {
    fn theorem_config(&self, brute: bool) -> TheoremConfig {
        let d = TheoremConfig::default();
        TheoremConfig {
            sweep4: self.sweep4,
            sweep16: self.sweep16,
            infer: InferConfig {
                ceiling: self.ceiling,
                seed: self.seed,
                ..d.infer
            },
            brute: if brute { d.brute } else { None },
            ..d
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    /// Parity of the ones in base 2.
    F,
    /// Parity of the zeros in base 2.
    G,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Txt,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print f_{b,j}(n) or g_{b,j}(n).
    Sum { kind: Kind, b: u64, j: u64, n: u64 },
    /// Infer and verify the automaton of a function, then save it.
    Infer {
        #[arg(value_parser = target_parser())]
        target: String,
    },
    /// Check a claim, or all of them; exits 0 iff every check passes.
    Verify {
        #[arg(value_parser = theorem_parser())]
        id: String,
        /// Skip the brute-force re-evaluation of the scripts.
        #[arg(long)]
        no_brute: bool,
    },
    /// Run a query script and print each outcome.
    Query { script: PathBuf },
    /// Save a function automaton or a built-in automaton as DOT or text.
    Export {
        name: String,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
    },
    /// Write a CSV of h(n), its pseudopower, the bounds and h(n)/n^e.
    Table {
        #[arg(value_parser = target_parser())]
        target: String,
        #[arg(long, default_value_t = 1000)]
        n_max: u64,
    },
}

fn target_parser() -> PossibleValuesParser {
    PossibleValuesParser::new(Target::ALL.map(|t| t.name()))
}

fn theorem_parser() -> PossibleValuesParser {
    PossibleValuesParser::new(THEOREMS.iter().map(|t| t.0).chain(["all"]))
}

fn target(name: &str) -> Target {
    Target::parse(name).expect("checked by the argument parser")
}

type CmdResult = Result<ExitCode, String>;

/// Writes through a temporary file in the same directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> Result<(), String> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let mut tmp =
        tempfile::NamedTempFile::new_in(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| format!("{}: {e}", path.display()))?;
    tmp.persist(path)
        .map_err(|e| format!("{}: {}", path.display(), e.error))?;
    Ok(())
}

fn cmd_sum(kind: Kind, b: u64, j: u64, n: u64) -> CmdResult {
    if b == 0 {
        return Err("b must be at least 1".into());
    }
    let v = match kind {
        Kind::F => rarefied_f(b, j, n),
        Kind::G => rarefied_g(b, j, n),
    };
    println!("{v}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_infer(config: &Config, t: Target) -> CmdResult {
    let wb = Workbench::new(config.theorem_config(false));
    let h = wb.hypothesis(t).map_err(|e| e.to_string())?;
    let path = config.out.join(format!("{}.txt", t.name()));
    write_atomic(&path, &save_text(&h.dfa))?;
    println!(
        "{}: {} states ({} with the rejecting sink) from {} samples, saved to {}",
        t.name(),
        h.dfa.trimmed_state_count(),
        h.dfa.num_states(),
        h.samples,
        path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(config: &Config, id: &str, brute: bool) -> CmdResult {
    let wb = Workbench::new(config.theorem_config(brute));
    let results = if id == "all" {
        wb.run_all()
    } else {
        vec![wb.run(id)]
    };
    let mut all = true;
    for (r, (id, _)) in results
        .into_iter()
        .zip(THEOREMS.iter().filter(|t| id == "all" || t.0 == id))
    {
        let text = match r {
            Ok(report) => {
                all &= report.passed();
                report.to_string()
            }
            Err(e) => {
                all = false;
                format!("[FAIL] {id}: {e}\n")
            }
        };
        print!("{text}");
        write_atomic(&config.out.join("reports").join(format!("{id}.txt")), &text)?;
    }
    Ok(if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

/// Function automata named as `$f30` and so on in `source`.
fn referenced_targets(source: &str) -> Vec<Target> {
    let names: Vec<&str> = source
        .split('$')
        .skip(1)
        .map(|s| {
            s.split(|c: char| !c.is_ascii_alphanumeric() && c != '_')
                .next()
                .unwrap_or("")
        })
        .collect();
    Target::ALL
        .into_iter()
        .filter(|t| names.contains(&t.name()))
        .collect()
}

fn cmd_query(config: &Config, path: &Path) -> CmdResult {
    let source = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let script = QueryScript::parse(&source).map_err(|e| format!("{}: {e}", path.display()))?;
    if script.commands.is_empty() {
        return Ok(ExitCode::SUCCESS);
    }
    let wb = Workbench::new(config.theorem_config(false));
    let mut env = wb
        .environment(&referenced_targets(&source))
        .map_err(|e| e.to_string())?;
    let report = env.run_script(&script);
    print!("{report}");
    Ok(if report.all_true() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_export(config: &Config, name: &str, format: Format) -> CmdResult {
    let text = if let Some(t) = Target::parse(name) {
        let dfa = Workbench::new(config.theorem_config(false))
            .automaton(t)
            .map_err(|e| e.to_string())?;
        match format {
            Format::Dot => export_dot(&dfa),
            Format::Txt => save_text(&dfa),
        }
    } else {
        let env = Workbench::base_environment().map_err(|e| e.to_string())?;
        match (env.automaton(name), env.sequence(name), format) {
            (Ok(d), _, Format::Dot) => export_dot(d),
            (Ok(d), _, Format::Txt) => save_text(d),
            (_, Ok(s), Format::Dot) => export_dot(s),
            (_, Ok(_), Format::Txt) => {
                return Err(format!(
                    "`{name}` is a sequence; only dot export is available"
                ))
            }
            (Err(_), Err(_), _) => {
                let known: Vec<&str> = Target::ALL
                    .iter()
                    .map(|t| t.name())
                    .chain(env.automaton_names())
                    .chain(env.sequence_names())
                    .collect();
                return Err(format!(
                    "no automaton named `{name}` (known: {})",
                    known.join(", ")
                ));
            }
        }
    };
    let ext = match format {
        Format::Dot => "dot",
        Format::Txt => "txt",
    };
    let path = config.out.join(format!("{name}.{ext}"));
    write_atomic(&path, &text)?;
    println!("{}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// CSV text with a header row and LF line endings.
fn table_csv(t: Target, n_max: u64) -> String {
    let e = t.exponent();
    let mut out = String::from("n,h,pseudopower,lower,upper,ratio\n");
    for (n, &h) in t.table(n_max).iter().enumerate() {
        let n = n as u64;
        let (lo, hi) = t.bounds(n, h);
        let ratio = (n > 0).then(|| h as f64 / (n as f64).powf(e));
        writeln!(
            out,
            "{n},{h},{},{},{},{}",
            t.pseudopower_of(h),
            cell(lo),
            cell(hi),
            cell(ratio)
        )
        .unwrap();
    }
    out
}

fn cmd_table(config: &Config, t: Target, n_max: u64) -> CmdResult {
    let path = config.out.join(format!("{}_table.csv", t.name()));
    write_atomic(&path, &table_csv(t, n_max))?;
    println!("{}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = &cli.config;
    let result = match &cli.command {
        Cmd::Sum { kind, b, j, n } => cmd_sum(*kind, *b, *j, *n),
        Cmd::Infer { target: t } => cmd_infer(c, target(t)),
        Cmd::Verify { id, no_brute } => cmd_verify(c, id, !no_brute),
        Cmd::Query { script } => cmd_query(c, script),
        Cmd::Export { name, format } => cmd_export(c, name, *format),
        Cmd::Table { target: t, n_max } => cmd_table(c, target(t), *n_max),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn targets_in_scripts() {
        let src = "eval a \"An $f30(n,n) | $mf31(n,n)\":\neval b \"$f300(1,1)\":";
        assert_eq!(referenced_targets(src), vec![Target::F30, Target::Mf31]);
        assert!(referenced_targets("eval x \"1=1\":").is_empty());
    }

    #[test]
    fn table_rows() {
        let csv = table_csv(Target::F30, 87);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,h,pseudopower,lower,upper,ratio"));
        assert_eq!(lines.next(), Some("0,0,0,,,"));
        assert_eq!(lines.next(), Some("1,1,1,1.000000,1.000000,1.000000"));
        let last = csv.lines().last().unwrap();
        assert!(
            last.starts_with("87,55,129,87.000000,130.000000,"),
            "{last}"
        );
    }
}
