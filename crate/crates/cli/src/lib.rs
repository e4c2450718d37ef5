//! Script runner and REPL over a single session.

pub mod script;
pub mod session;

use std::io::{self, BufRead, Write};

use serde_json::json;
use thiserror::Error;

use script::Statement;
use session::{Format, Record, Session};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Script(#[from] ScriptError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Check counts over a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Summary {
    pub checks: usize,
    pub failed: usize,
}

impl Summary {
    fn add(&mut self, r: &Record) {
        if let Some(pass) = r.pass {
            self.checks += 1;
            self.failed += !pass as usize;
        }
    }
}

/// Parses and executes one line; blank and comment lines yield `None`.
pub fn execute_line(session: &mut Session, line_no: usize, line: &str) -> Result<Option<Record>, ScriptError> {
    let fail = |message| ScriptError { line: line_no, message };
    let Some(st) = Statement::parse(line).map_err(fail)? else { return Ok(None) };
    session.execute(&st).map(Some).map_err(fail)
}

pub fn emit(out: &mut dyn Write, format: Format, line: usize, r: &Record) -> io::Result<()> {
    match format {
        Format::Text => writeln!(out, "{}", r.text),
        Format::Json => {
            let mut v = json!({"line": line, "kind": r.kind, "data": r.data});
            if let Some(pass) = r.pass {
                v["pass"] = json!(pass);
            }
            writeln!(out, "{v}")
        }
    }
}

pub fn emit_summary(out: &mut dyn Write, format: Format, s: Summary) -> io::Result<()> {
    match format {
        Format::Text => writeln!(out, "{} checks, {} failed", s.checks, s.failed),
        Format::Json => writeln!(out, "{}", json!({"kind": "summary", "checks": s.checks, "failed": s.failed})),
    }
}

pub fn emit_error(out: &mut dyn Write, format: Format, e: &ScriptError) -> io::Result<()> {
    match format {
        Format::Text => writeln!(out, "error: {e}"),
        Format::Json => writeln!(out, "{}", json!({"kind": "error", "line": e.line, "message": e.message})),
    }
}

/// Executes a script in order, stopping at the first error.
pub fn run_script(session: &mut Session, text: &str, out: &mut dyn Write) -> Result<Summary, RunError> {
    let format = session.options().format;
    let mut summary = Summary::default();
    for (i, line) in text.lines().enumerate() {
        if let Some(r) = execute_line(session, i + 1, line)? {
            summary.add(&r);
            emit(out, format, i + 1, &r)?;
        }
    }
    emit_summary(out, format, summary)?;
    Ok(summary)
}

/// Reads statements until end of input or `quit`; errors are reported and skipped.
pub fn repl(session: &mut Session, input: &mut dyn BufRead, out: &mut dyn Write, prompt: bool) -> io::Result<Summary> {
    let format = session.options().format;
    let mut summary = Summary::default();
    let mut line_no = 0;
    loop {
        if prompt {
            write!(out, "bvm> ")?;
            out.flush()?;
        }
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            break;
        }
        line_no += 1;
        if matches!(line.trim(), "quit" | "exit") {
            break;
        }
        match execute_line(session, line_no, &line) {
            Ok(Some(r)) => {
                summary.add(&r);
                emit(out, format, line_no, &r)?;
            }
            Ok(None) => {}
            Err(e) => emit_error(out, format, &e)?,
        }
    }
    emit_summary(out, format, summary)?;
    Ok(summary)
}
