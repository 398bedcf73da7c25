//! File formats, bundled fixtures, the synthetic model generator and the
//! command implementations behind the `feedscope` binary.

pub mod commands;
pub mod edges;
pub mod fixtures;
pub mod formats;
pub mod synth;

use std::path::{Path, PathBuf};

use feedscope_core::dsl::{parse_model, validate, Diagnostic, Model};

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}", render_diagnostics(.path, .diagnostics))]
    Diagnostics {
        path: PathBuf,
        diagnostics: Vec<Diagnostic>,
    },
    /// Input files that are well formed but inconsistent with each other.
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Diagnostics { .. } | CliError::Invalid(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    pub(crate) fn located(path: &Path, line: usize, col: usize, message: impl Into<String>) -> Self {
        CliError::Diagnostics {
            path: path.to_path_buf(),
            diagnostics: vec![Diagnostic::error(
                feedscope_core::dsl::Span::new(line as u32, col as u32),
                message,
            )],
        }
    }
}

fn render_diagnostics(path: &Path, diagnostics: &[Diagnostic]) -> String {
    diagnostics
        .iter()
        .map(|d| format!("{}:{d}", path.display()))
        .collect::<Vec<_>>()
        .join("\n")
}

pub(crate) fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::Runtime(format!("{}: file not found", path.display())),
        _ => CliError::Runtime(format!("{}: {e}", path.display())),
    })
}

/// A parsed and validated model plus any warnings for stderr.
pub struct LoadedModel {
    pub model: Model,
    pub warnings: Vec<String>,
}

/// Parses and validates model text. `path` is only used in messages.
pub fn load_model_text(path: &Path, text: &str) -> Result<LoadedModel, CliError> {
    let diagnostics = |diagnostics| CliError::Diagnostics {
        path: path.to_path_buf(),
        diagnostics,
    };
    let parsed = parse_model(text).map_err(diagnostics)?;
    let mut problems = validate(&parsed.model);
    if problems.iter().any(Diagnostic::is_error) {
        problems.retain(Diagnostic::is_error);
        return Err(diagnostics(problems));
    }
    let warnings = parsed
        .warnings
        .iter()
        .chain(&problems)
        .map(|d| format!("{}:{d}", path.display()))
        .collect();
    Ok(LoadedModel {
        model: parsed.model,
        warnings,
    })
}

pub fn load_model_file(path: &Path) -> Result<LoadedModel, CliError> {
    load_model_text(path, &read_file(path)?)
}
