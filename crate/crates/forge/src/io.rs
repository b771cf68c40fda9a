use std::fmt::Display;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use forge_core::jsonl::{RecordError, Records};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CliError, CliResult};

const KEPT_FAILURES: usize = 100;

pub fn open_input(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::io(format!("cannot open {}: {e}", path.display())))
}

/// A file, or stdout when no path is given.
pub fn create_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::io(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> CliResult {
    let mut out = create_output(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_reader(open_input(path)?).map_err(|e| {
        let err = CliError::from(e);
        err.context(path.display())
    })
}

/// Malformed-line policy: strict stops at the first bad line, lenient skips
/// bad lines and fails at the end only when they exceed `max_ratio`.
#[derive(Debug, Serialize)]
pub struct Intake {
    #[serde(skip)]
    pub strict: bool,
    #[serde(skip)]
    pub max_ratio: f64,
    pub total: usize,
    pub failed: usize,
    pub failures: Vec<String>,
}

impl Intake {
    pub fn new(strict: bool, max_ratio: f64) -> Self {
        Self { strict, max_ratio, total: 0, failed: 0, failures: Vec::new() }
    }

    pub fn accept(&mut self) {
        self.total += 1;
    }

    pub fn reject(&mut self, problem: impl Display) -> CliResult {
        self.total += 1;
        self.failed += 1;
        if self.strict {
            return Err(CliError::validation(problem));
        }
        tracing::warn!(problem = %problem, "skipped record");
        if self.failures.len() < KEPT_FAILURES {
            self.failures.push(problem.to_string());
        }
        Ok(())
    }

    pub fn failure_ratio(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.failed as f64 / self.total as f64
        }
    }

    /// Fails when the skipped share is above the limit.
    pub fn finish(&self, what: &str) -> CliResult {
        if self.failure_ratio() > self.max_ratio {
            return Err(CliError::validation(format!(
                "{what}: {} of {} records malformed ({:.2}% > {:.2}%)",
                self.failed,
                self.total,
                100.0 * self.failure_ratio(),
                100.0 * self.max_ratio
            )));
        }
        Ok(())
    }
}

/// Streams typed records, routing malformed lines through `intake`.
pub fn for_each_record<T, F>(path: &Path, intake: &mut Intake, mut f: F) -> CliResult
where
    T: DeserializeOwned,
    F: FnMut(&mut Intake, usize, T) -> CliResult,
{
    for item in Records::<_, T>::new(open_input(path)?) {
        match item {
            Ok((line, record)) => f(intake, line, record)?,
            Err(RecordError::Io(e)) => return Err(CliError::io(format!("reading {}: {e}", path.display()))),
            Err(e) => intake.reject(e)?,
        }
    }
    Ok(())
}

/// Compact single-line JSON, for bulky data rather than summaries.
pub fn write_json_line<T: Serialize>(path: Option<&Path>, value: &T) -> CliResult {
    let mut out = create_output(path)?;
    forge_core::jsonl::write_line(&mut out, value)?;
    out.flush()?;
    Ok(())
}
