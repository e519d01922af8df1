use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use qmetric::io::{render_report, Format, MetricReport};
use qmetric::Error;

use crate::OutputFormat;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Compute(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Compute(m) => f.write_str(m),
        }
    }
}

/// Parse failures map to the input code, everything else to compute.
impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } => CliError::Input(e.to_string()),
            other => CliError::Compute(other.to_string()),
        }
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Tags a parse error with the file it came from.
pub fn in_file(path: &Path) -> impl Fn(Error) -> CliError + '_ {
    move |e| match e {
        Error::Parse { .. } => CliError::Input(format!("{}: {e}", path.display())),
        other => CliError::from(other),
    }
}

fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let fail = |e: std::io::Error| CliError::Compute(format!("writing {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(fail)?;
    tmp.write_all(text.as_bytes()).map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

pub fn emit(
    report: &MetricReport,
    format: OutputFormat,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let json = || render_report(report, Format::Json);
    let md = || render_report(report, Format::Markdown);
    match (format, output) {
        (OutputFormat::Json, Some(p)) => write_atomic(p, &json()),
        (OutputFormat::Markdown, Some(p)) => write_atomic(p, &md()),
        (OutputFormat::Both, Some(p)) => {
            write_atomic(p, &json())?;
            write_atomic(&p.with_extension("md"), &md())
        }
        (OutputFormat::Json, None) => {
            print!("{}", json());
            Ok(())
        }
        (OutputFormat::Markdown, None) => {
            print!("{}", md());
            Ok(())
        }
        (OutputFormat::Both, None) => {
            print!("{}\n{}", json(), md());
            Ok(())
        }
    }
}
