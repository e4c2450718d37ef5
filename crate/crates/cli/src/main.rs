use std::io::{self, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use bvm_cli::session::{Format, Options, Session};
use bvm_cli::{emit_error, run_script, RunError, Summary};
use bvm_core::suites;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bvm", version, about = "Finite Boolean-valued models of set theory")]
struct Cli {
    /// Atoms of the starting algebra.
    #[arg(long, global = true, default_value_t = 2)]
    atoms: usize,
    /// Fragments hold sets of rank at most this.
    #[arg(long, global = true, default_value_t = 3)]
    rank_max: usize,
    /// Enumeration cap for fragments and forcing posets.
    #[arg(long, global = true, default_value_t = 200_000)]
    cap: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Los,
    Transfer,
}

#[derive(Subcommand)]
enum Command {
    /// Run a script file (`-` reads standard input).
    Run { file: PathBuf },
    /// Read statements interactively.
    Repl,
    /// Run a named property suite, or `all`.
    Suite { name: String },
    /// Truth value of a formula; assignments look like `x={{}}`.
    Eval { formula: String, assign: Vec<String> },
    /// Fiber soundness or restricted transfer for one formula.
    Check { kind: CheckKind, formula: String, assign: Vec<String> },
    /// Witness attaining the supremum of a formula over a fragment.
    Maximize {
        formula: String,
        var: String,
        #[arg(long)]
        rank: Option<usize>,
        assign: Vec<String>,
    },
    /// Members of a set's descent within a fragment.
    Descend {
        set: String,
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Ascent of the given sets.
    Ascend {
        #[arg(required = true)]
        sets: Vec<String>,
    },
    /// Cancellation rules on random instances from a fragment.
    EscherCheck {
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
    },
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\\\""))
}

fn one_shot(command: &Command) -> Option<String> {
    let with = |head: String, rest: &[String]| std::iter::once(head).chain(rest.iter().cloned()).collect::<Vec<_>>().join(" ");
    let flag = |name: &str, v: &Option<usize>| v.map(|n| format!(" --{name} {n}")).unwrap_or_default();
    Some(match command {
        Command::Eval { formula, assign } => with(format!("eval {}", quote(formula)), assign),
        Command::Check { kind, formula, assign } => {
            let verb = match kind {
                CheckKind::Los => "los",
                CheckKind::Transfer => "transfer",
            };
            with(format!("check {verb} {}", quote(formula)), assign)
        }
        Command::Maximize { formula, var, rank, assign } => format!("{}{}", with(format!("maximize {} {var}", quote(formula)), assign), flag("rank", rank)),
        Command::Descend { set, rank } => format!("descend {set}{}", flag("rank", rank)),
        Command::Ascend { sets } => format!("ascend {}", sets.join(", ")),
        Command::EscherCheck { rank, samples } => format!("escher-check{}{}", flag("rank", rank), flag("samples", samples)),
        Command::Suite { name } if name == "all" => suites::names().map(|n| format!("suite {n}")).collect::<Vec<_>>().join("\n"),
        Command::Suite { name } => format!("suite {name}"),
        Command::Run { .. } | Command::Repl => return None,
    })
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        // a closed pipe downstream is a normal end of output
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    let opts = Options { atoms: cli.atoms, rank_max: cli.rank_max, cap: cli.cap, seed: cli.seed, format: cli.format };
    let mut session = Session::new(opts).map_err(anyhow::Error::msg)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result: Result<Summary, RunError> = match &cli.command {
        Command::Repl => {
            let stdin = io::stdin();
            let prompt = stdin.is_terminal();
            Ok(bvm_cli::repl(&mut session, &mut stdin.lock(), &mut out, prompt)?)
        }
        Command::Run { file } => {
            let text = if file.as_os_str() == "-" {
                io::read_to_string(io::stdin()).context("reading standard input")?
            } else {
                std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?
            };
            run_script(&mut session, &text, &mut out)
        }
        other => run_script(&mut session, &one_shot(other).expect("one-shot command"), &mut out),
    };
    match result {
        Ok(s) => Ok(if s.failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }),
        Err(RunError::Script(e)) => {
            emit_error(&mut out, cli.format, &e)?;
            out.flush()?;
            if cli.format == Format::Json {
                eprintln!("error: {e}");
            }
            Ok(ExitCode::from(2))
        }
        Err(RunError::Io(e)) => Err(e.into()),
    }
}
