//! Batch front end: argument handling, file loading and report text.
//!
//! [`dispatch`] never touches the process streams; `main` prints what it
//! returns. Exit codes: 0 when the checked property holds, 1 when it fails
//! (the witness is on stdout), 2 for usage, file and budget errors.

pub mod format;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use defeq_core::definability::{
    beth_search, substructure_closure_check, unique_expansion_check, BethOutcome, Closure,
    NotFound, UniqueExpansion,
};
use defeq_core::folang::{closed_formulas_by_depth, parse_formula};
use defeq_core::groups::{automorphism_group, group_key};
use defeq_core::irregular::{
    emit_ts_axioms, find_pattern, irregularity_report, pattern_occurs_at, Pattern, Variant,
};
use defeq_core::models::{enumerate_models_with, for_each_model};
use defeq_core::spectra::{
    aut_spec_with, build_concrete_iso_with, report_lines, spectrum_differences,
    verify_concrete_iso, VerifyOptions,
};
use defeq_core::ultra::{los_outcome, ultraproduct, Ultrafilter};
use defeq_core::{Budget, FiniteModel, Theory};
use thiserror::Error;

use format::{parse_model, parse_theory, write_model, write_theory, FormatError, TheoryFile};

/// What a run produced; `main` forwards it to the process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("{0}: {1}")]
    Format(PathBuf, FormatError),
    #[error(transparent)]
    Core(#[from] defeq_core::Error),
    #[error("{0}")]
    Usage(String),
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "defeq", version, about = "Finite-model checks around definitional equivalence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct BudgetArgs {
    /// Search-tree nodes allowed per model enumeration.
    #[arg(long, default_value_t = Budget::default().max_nodes)]
    max_nodes: u64,
    /// Function/constant skeletons allowed per model enumeration.
    #[arg(long, default_value_t = Budget::default().max_function_tables)]
    max_functions: u64,
}

impl BudgetArgs {
    fn budget(self) -> Budget {
        Budget {
            max_nodes: self.max_nodes,
            max_function_tables: self.max_functions,
        }
    }
}

#[derive(Args, Debug)]
struct TheorySize {
    #[arg(long)]
    theory: PathBuf,
    #[arg(long)]
    size: usize,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args, Debug)]
struct TwoTheories {
    #[arg(long)]
    t1: PathBuf,
    #[arg(long)]
    t2: PathBuf,
    #[arg(long)]
    size: usize,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a theory file (or a single formula) and print it normalized.
    Parse {
        #[arg(long)]
        theory: Option<PathBuf>,
        #[arg(long)]
        formula: Option<String>,
    },
    /// List the models of a theory of one size.
    Models {
        #[command(flatten)]
        args: TheorySize,
        #[arg(long)]
        count_only: bool,
    },
    /// Automorphism group of a model file.
    Aut {
        #[arg(long)]
        model: PathBuf,
    },
    /// Spectrum of concrete automorphism groups up to a size.
    Spec(TheorySize),
    /// Compare two spectra; exit 1 with the differing entries.
    SpecCompare(TwoTheories),
    /// Build the bijection between model classes and optionally verify it.
    BuildIso {
        #[command(flatten)]
        args: TwoTheories,
        #[arg(long)]
        verify: bool,
        /// Largest index set for the ultraproduct verdict.
        #[arg(long, default_value_t = VerifyOptions::default().index_bound)]
        index_bound: usize,
        /// Factor tuples tried per index size and point.
        #[arg(long, default_value_t = VerifyOptions::default().max_tuples)]
        max_tuples: usize,
    },
    /// Ultraproduct of model files by a principal ultrafilter.
    Ultra {
        #[arg(long, value_delimiter = ',', required = true)]
        models: Vec<PathBuf>,
        #[arg(long, default_value_t = 0)]
        principal: usize,
        /// Check Łoś's theorem for every sentence up to this depth.
        #[arg(long)]
        los_depth: Option<usize>,
    },
    /// Search for an explicit definition of a relation symbol.
    Beth {
        #[command(flatten)]
        args: TheorySize,
        #[arg(long)]
        target: String,
        /// Largest formula size tried.
        #[arg(long, default_value_t = 10)]
        bound: usize,
    },
    /// Check that hidden relations are implicitly defined (unique expansion).
    Idc {
        #[command(flatten)]
        args: TheorySize,
        #[arg(long, value_delimiter = ',', required = true)]
        hidden: Vec<String>,
    },
    /// Check that the model class is closed under substructures.
    Subclosure(TheorySize),
    /// Print part of a built-in sequence.
    Seq {
        #[arg(long)]
        variant: Variant,
        /// Half-open range `a..b`.
        #[arg(long)]
        range: String,
    },
    /// Find a pattern `m1,m2,..:n` in a binary sequence.
    Pattern {
        #[arg(long)]
        variant: Variant,
        #[arg(long)]
        pattern: Pattern,
        #[arg(long, default_value_t = 100_000)]
        bound: u64,
        /// Test a single position instead of searching.
        #[arg(long)]
        at: Option<u64>,
    },
    /// Occurrence statistics for all patterns up to a length.
    IrregularReport {
        #[arg(long)]
        variant: Variant,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long, default_value_t = 100_000)]
        bound: u64,
    },
    /// Emit a finite prefix of the theory of a binary sequence.
    TsAxioms {
        #[arg(long)]
        variant: Variant,
        #[arg(long)]
        depth: usize,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn load_theory_file(path: &Path) -> Result<TheoryFile> {
    parse_theory(&read(path)?).map_err(|e| CliError::Format(path.to_path_buf(), e))
}

fn load_theory(path: &Path) -> Result<Theory> {
    Ok(load_theory_file(path)?.theory()?)
}

fn load_model(path: &Path) -> Result<FiniteModel> {
    parse_model(&read(path)?).map_err(|e| CliError::Format(path.to_path_buf(), e))
}

/// Run with `args` (program name first) and collect the output.
pub fn dispatch<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let first = text.lines().next().unwrap_or("error: bad arguments");
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: format!("{first}\n"),
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let mut out = String::new();
    match run(cli.command, &mut out) {
        Ok(holds) => Outcome {
            code: if holds { 0 } else { 1 },
            stdout: out,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// Writes the report to `out`; `Ok(false)` means the property failed.
fn run(cmd: Command, out: &mut String) -> Result<bool> {
    match cmd {
        Command::Parse { theory, formula } => parse_cmd(theory, formula, out),
        Command::Models { args, count_only } => {
            let t = load_theory(&args.theory)?;
            let budget = args.budget.budget();
            if count_only {
                let mut count = 0u64;
                for_each_model(&t, args.size, &budget, |_| {
                    count += 1;
                    std::ops::ControlFlow::Continue(())
                })?;
                let _ = writeln!(out, "{count}");
            } else {
                let models = enumerate_models_with(&t, args.size, &budget)?;
                let blocks: Vec<String> = models.iter().map(write_model).collect();
                out.push_str(&blocks.join("\n"));
            }
            Ok(true)
        }
        Command::Aut { model } => {
            let m = load_model(&model)?;
            let g = automorphism_group(&m);
            let _ = writeln!(out, "group={g} order={}", g.order());
            let _ = writeln!(out, "canonical={}", group_key(&g).group());
            Ok(true)
        }
        Command::Spec(args) => {
            let t = load_theory(&args.theory)?;
            let s = aut_spec_with(&t, args.size, &args.budget.budget())?;
            let _ = write!(out, "{s}");
            Ok(true)
        }
        Command::SpecCompare(args) => {
            let budget = args.budget.budget();
            let s1 = aut_spec_with(&load_theory(&args.t1)?, args.size, &budget)?;
            let s2 = aut_spec_with(&load_theory(&args.t2)?, args.size, &budget)?;
            let diffs = spectrum_differences(&s1, &s2)?;
            if diffs.is_empty() {
                let _ = writeln!(out, "EQUAL up to size {}", args.size);
                return Ok(true);
            }
            for d in &diffs {
                let _ = writeln!(out, "{d}");
            }
            Ok(false)
        }
        Command::BuildIso {
            args,
            verify,
            index_bound,
            max_tuples,
        } => {
            let budget = args.budget.budget();
            let t1 = load_theory(&args.t1)?;
            let t2 = load_theory(&args.t2)?;
            let b = build_concrete_iso_with(&t1, &t2, args.size, &budget)?;
            let _ = writeln!(
                out,
                "pairs={} classes={}",
                b.len(),
                b.representatives().len()
            );
            for (r1, r2) in b.representatives() {
                let _ = writeln!(out, "{r1} => {r2}");
            }
            if !verify {
                return Ok(true);
            }
            let options = VerifyOptions {
                index_bound,
                max_tuples,
                distinct_only: false,
            };
            let report = verify_concrete_iso(&b, &t1, &t2, args.size, &options, &budget)?;
            for line in report_lines(&report) {
                let _ = writeln!(out, "{line}");
            }
            Ok(report.passed())
        }
        Command::Ultra {
            models,
            principal,
            los_depth,
        } => ultra_cmd(&models, principal, los_depth, out),
        Command::Beth {
            args,
            target,
            bound,
        } => {
            let t = load_theory(&args.theory)?;
            let outcome = beth_search(&t, &target, args.size, bound, &args.budget.budget())?;
            match outcome {
                BethOutcome::Found {
                    definition,
                    candidates,
                } => {
                    let _ = writeln!(out, "def {definition}");
                    let _ = writeln!(
                        out,
                        "candidates={candidates} valid on all models up to size {}",
                        args.size
                    );
                    Ok(true)
                }
                BethOutcome::NotFound(NotFound::NotImplicitlyDefinable { first, second }) => {
                    let _ = writeln!(out, "NOT-IMPLICITLY-DEFINABLE: two models differ only on {target}");
                    let _ = writeln!(out, "{}\n{}", write_model(&first), write_model(&second));
                    Ok(false)
                }
                BethOutcome::NotFound(NotFound::Exhausted { candidates }) => {
                    let _ = writeln!(
                        out,
                        "NOT-FOUND candidates={candidates} bound={bound} size={}",
                        args.size
                    );
                    Ok(false)
                }
            }
        }
        Command::Idc { args, hidden } => {
            let t = load_theory(&args.theory)?;
            let hidden: Vec<&str> = hidden.iter().map(String::as_str).collect();
            match unique_expansion_check(&t, &hidden, args.size, &args.budget.budget())? {
                UniqueExpansion::Unique => {
                    let _ = writeln!(out, "UNIQUE-EXPANSION-UP-TO({})", args.size);
                    Ok(true)
                }
                UniqueExpansion::Witness {
                    reduct,
                    first,
                    second,
                } => {
                    let _ = writeln!(out, "TWO-EXPANSIONS");
                    let _ = writeln!(out, "# reduct\n{}", write_model(&reduct));
                    let _ = writeln!(out, "# first\n{}", write_model(&first));
                    let _ = write!(out, "# second\n{}", write_model(&second));
                    Ok(false)
                }
            }
        }
        Command::Subclosure(args) => {
            let t = load_theory(&args.theory)?;
            match substructure_closure_check(&t, args.size, &args.budget.budget())? {
                Closure::Closed => {
                    let _ = writeln!(out, "CLOSED-UP-TO({})", args.size);
                    Ok(true)
                }
                Closure::Witness {
                    model,
                    subset,
                    substructure,
                } => {
                    let _ = writeln!(out, "NOT-CLOSED subset={subset:?}");
                    let _ = writeln!(out, "# model\n{}", write_model(&model));
                    let _ = write!(out, "# substructure\n{}", write_model(&substructure));
                    Ok(false)
                }
            }
        }
        Command::Seq { variant, range } => {
            let (a, b) = parse_range(&range)?;
            let symbols: Vec<String> = (a..b).map(|k| variant.symbol(k).to_string()).collect();
            let _ = writeln!(out, "{}", symbols.join(" "));
            Ok(true)
        }
        Command::Pattern {
            variant,
            pattern,
            bound,
            at,
        } => {
            let s = variant.binary()?;
            match at {
                Some(pos) => {
                    let hit = pattern_occurs_at(&s, &pattern, pos);
                    let _ = writeln!(out, "pattern={pattern} at={pos} occurs={hit}");
                    Ok(hit)
                }
                None => match find_pattern(&s, &pattern, bound) {
                    Some(pos) => {
                        let _ = writeln!(out, "pattern={pattern} first={pos}");
                        Ok(true)
                    }
                    None => {
                        let _ = writeln!(out, "pattern={pattern} first=none bound={bound}");
                        Ok(false)
                    }
                },
            }
        }
        Command::IrregularReport {
            variant,
            n_max,
            bound,
        } => {
            let report = irregularity_report(&variant.binary()?, n_max, bound)?;
            let _ = write!(out, "{report}");
            Ok(report.irregular())
        }
        Command::TsAxioms { variant, depth } => {
            let ts = emit_ts_axioms(variant, depth)?;
            let _ = writeln!(
                out,
                "# {variant}, depth {}: prefix only, the successor theory is not finitely axiomatized",
                ts.depth
            );
            out.push_str(&write_theory(&ts.theory, &Default::default()));
            Ok(true)
        }
    }
}

fn parse_cmd(theory: Option<PathBuf>, formula: Option<String>, out: &mut String) -> Result<bool> {
    let file = match &theory {
        Some(path) => Some(load_theory_file(path)?),
        None => None,
    };
    match (file, formula) {
        (file, Some(src)) => {
            let sig = file.map(|f| f.theory()).transpose()?.map(|t| t.sig().clone());
            let f = parse_formula(&src, &sig.unwrap_or_default())?;
            let _ = writeln!(out, "{f}");
            let free: Vec<String> = f.free_vars().into_iter().collect();
            let _ = writeln!(out, "free={{{}}}", free.join(","));
            Ok(true)
        }
        (Some(file), None) => {
            out.push_str(&write_theory(&file.base, &file.defs));
            Ok(true)
        }
        (None, None) => Err(CliError::Usage(
            "parse needs --theory, --formula or both".into(),
        )),
    }
}

fn ultra_cmd(
    paths: &[PathBuf],
    principal: usize,
    los_depth: Option<usize>,
    out: &mut String,
) -> Result<bool> {
    let models = paths
        .iter()
        .map(|p| load_model(p))
        .collect::<Result<Vec<_>>>()?;
    let u = Ultrafilter::principal(principal, models.len())?;
    let up = ultraproduct(&models, &u)?;
    let _ = writeln!(
        out,
        "# principal ultrafilter at {principal} over {} factors, {} choice functions",
        models.len(),
        up.choice_function_count()
    );
    out.push_str(&write_model(&up.quotient));
    let Some(depth) = los_depth else {
        return Ok(true);
    };
    let sentences = closed_formulas_by_depth(models[0].sig(), depth);
    for f in &sentences {
        let o = los_outcome(&models, &u, &up.quotient, f);
        if !o.ok {
            let _ = writeln!(out, "los FAIL sentence={f} product={} factors={}", o.lhs, o.rhs);
            return Ok(false);
        }
    }
    let _ = writeln!(out, "los depth={depth} sentences={} failures=0", sentences.len());
    Ok(true)
}

fn parse_range(s: &str) -> Result<(u64, u64)> {
    let bad = || CliError::Usage(format!("expected a range `a..b`, found `{s}`"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}
