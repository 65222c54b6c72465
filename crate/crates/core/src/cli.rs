//! Command-line front end for the `abret` binary.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{self, Theorem};
use crate::error::{Error, Result};
use crate::lexarray::{self, LexArray};
use crate::report::{Format, Payload, Report, ReturnsEntry, RunConfig, Tool};
use crate::returns::{self, ClassId, Side, StabilizationPolicy};
use crate::source::WordSource;
use crate::word::Word;

/// Largest prefix the CLI will materialize.
pub const BUDGET: usize = 1 << 28;

/// Exit status for usage errors, bad descriptors and failed computations.
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "abret",
    version,
    about = "Return words and abelian return words of infinite words"
)]
pub struct Cli {
    /// Source descriptor, e.g. `cf:1,1,...` or `morphic:0>01,1>10:seed=0`.
    #[arg(long, global = true)]
    pub source: Option<String>,

    /// Largest factor length examined.
    #[arg(long, global = true, default_value_t = 10)]
    pub max: usize,

    /// Stabilization policy as `initial,growth,cap`.
    #[arg(long, global = true, value_parser = parse_policy)]
    pub policy: Option<StabilizationPolicy>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a prefix of the source.
    Generate {
        #[arg(long)]
        length: usize,
    },
    /// Abelian returns of one factor, or of every class up to --max.
    Returns(ReturnsArgs),
    /// Lexicographic array of an orbit.
    Lexarray(LexArrayArgs),
    /// Check the characterization and its lemmas on a prefix.
    Verify {
        #[arg(long, value_enum, default_value_t = TheoremArg::All)]
        theorem: TheoremArg,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ReturnsArgs {
    /// Factor whose abelian class is queried.
    #[arg(long)]
    pub target: Option<String>,
    /// Every abelian class of factors of length 1..=--max.
    #[arg(long)]
    pub all_lengths: bool,
}

#[derive(Debug, Args)]
pub struct LexArrayArgs {
    #[arg(long, conflicts_with_all = ["p", "q"], required_unless_present_all = ["p", "q"])]
    pub word: Option<String>,
    #[arg(long, requires = "q")]
    pub p: Option<usize>,
    #[arg(long, requires = "p")]
    pub q: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoremArg {
    Main,
    Singular,
    Structure,
    Periodicity,
    CorollaryW,
    All,
}

impl TheoremArg {
    fn theorems(self) -> Vec<Theorem> {
        match self {
            TheoremArg::Main => vec![Theorem::Main],
            TheoremArg::Singular => vec![Theorem::Singular],
            TheoremArg::Structure => vec![Theorem::Structure],
            TheoremArg::Periodicity => vec![Theorem::Periodicity],
            TheoremArg::CorollaryW => vec![Theorem::CorollaryW],
            TheoremArg::All => Theorem::ALL.to_vec(),
        }
    }

    fn name(self) -> String {
        self.to_possible_value()
            .expect("no skipped variants")
            .get_name()
            .to_string()
    }
}

fn parse_policy(text: &str) -> std::result::Result<StabilizationPolicy, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [initial, growth, cap] = parts[..] else {
        return Err("expected initial,growth,cap".into());
    };
    let num = |s: &str| s.parse::<usize>().map_err(|e| format!("`{s}`: {e}"));
    StabilizationPolicy::new(num(initial)?, num(growth)?, num(cap)?).map_err(|e| e.to_string())
}

fn check_budget(len: usize, what: &str) -> Result<()> {
    if len > BUDGET {
        return Err(Error::Policy(format!(
            "{what} {len} exceeds the budget of {BUDGET} letters"
        )));
    }
    Ok(())
}

fn require_source(cli: &Cli) -> Result<WordSource> {
    let text = cli
        .source
        .as_deref()
        .ok_or_else(|| Error::Policy("--source is required for this command".into()))?;
    let source: WordSource = text.parse()?;
    source.validate()?;
    Ok(source)
}

fn base_config(cli: &Cli, command: &str, policy: StabilizationPolicy) -> RunConfig {
    RunConfig {
        command: command.to_string(),
        source: None,
        max_factor_length: cli.max,
        policy,
        format: cli.format,
        out: cli.out.as_ref().map(|p| p.display().to_string()),
        length: None,
        target: None,
        all_lengths: false,
        word: None,
        p: None,
        q: None,
        theorem: None,
    }
}

/// Builds the report for parsed arguments.
pub fn execute(cli: &Cli) -> Result<Report> {
    let started = Instant::now();
    let policy = cli.policy.unwrap_or_default();
    policy.validate()?;
    check_budget(policy.max, "policy cap")?;
    if cli.max == 0 {
        return Err(Error::LengthOutOfRange {
            n: 0,
            len: policy.max,
        });
    }

    let (config, payload) = match &cli.command {
        Command::Generate { length } => {
            check_budget(*length, "length")?;
            let source = require_source(cli)?;
            let word = source.prefix(*length)?;
            let mut config = base_config(cli, "generate", policy);
            config.source = Some(source.to_string());
            config.length = Some(*length);
            (
                config,
                Payload::Generate {
                    length: *length,
                    word,
                },
            )
        }
        Command::Returns(args) => {
            let source = require_source(cli)?;
            let word = source.prefix(policy.max)?;
            let mut config = base_config(cli, "returns", policy);
            config.source = Some(source.to_string());
            let entries = match &args.target {
                Some(target) => {
                    let v = Word::parse_over(target, source.alphabet())?;
                    config.target = Some(v.to_string());
                    let result = returns::stabilize(&word, &v, &policy, Side::Left)
                        .map_err(|e| e.to_string());
                    vec![ReturnsEntry::from_result(ClassId::of(&v), vec![v], result)]
                }
                None => {
                    config.all_lengths = true;
                    analysis::survey(&word, cli.max, &policy)?
                        .iter()
                        .flat_map(|s| s.classes.iter().map(ReturnsEntry::from_survey))
                        .collect()
                }
            };
            (config, Payload::Returns { entries })
        }
        Command::Lexarray(args) => {
            let mut config = base_config(cli, "lexarray", policy);
            let array: LexArray = match (&args.word, args.p, args.q) {
                (Some(text), _, _) => {
                    let w = Word::parse_over(text, 2)?;
                    config.word = Some(w.to_string());
                    lexarray::lex_array(&w)?
                }
                (None, Some(p), Some(q)) => {
                    check_budget(q.saturating_mul(q), "array size")?;
                    config.p = Some(p);
                    config.q = Some(q);
                    lexarray::balanced_orbit_array(p, q)?
                }
                _ => return Err(Error::Policy("give --word or both --p and --q".into())),
            };
            let balanced = lexarray::is_balanced_jz(&array.rows()[0]);
            let column_shift = lexarray::column_shift_check(&array);
            (
                config,
                Payload::LexArray {
                    array,
                    balanced,
                    column_shift,
                },
            )
        }
        Command::Verify { theorem } => {
            let source = require_source(cli)?;
            let mut config = base_config(cli, "verify", policy);
            config.source = Some(source.to_string());
            config.theorem = Some(theorem.name());
            let verdicts = analysis::verify_all(&source, &theorem.theorems(), cli.max, &policy)?;
            (config, Payload::Verify { verdicts })
        }
    };

    Ok(Report {
        tool: Tool::default(),
        config,
        payload,
        duration: started.elapsed(),
    })
}

/// Runs the CLI on `args` (program name first) and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };

    let report = match execute(&cli) {
        Ok(report) => report,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };

    let rendered = report.render(cli.format);
    let written = match &cli.out {
        Some(path) => std::fs::write(path, rendered.as_bytes()),
        None => stdout.write_all(rendered.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write report: {e}");
        return EXIT_USAGE;
    }
    let _ = writeln!(stderr, "completed in {:.3}s", report.duration.as_secs_f64());
    report.outcome().code()
}
