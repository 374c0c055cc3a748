//! The `pdfresidue` command line. [`run`] takes the arguments and the two
//! output streams so the whole front end can be driven from tests.

mod commands;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::Error;
use crate::recover::RecoveryMethod;
use crate::stego::HiddenLocator;

pub use report::{Report, SCHEMA_VERSION};

pub const DEFAULT_MAX_FILE_SIZE: u64 = 1 << 30;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_UNSUPPORTED: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "pdfresidue",
    version,
    about = "Recover earlier revisions, residual objects and hidden data from incrementally saved PDF files",
    after_help = "Reports are JSON on stdout; progress goes to stderr.\n\
                  Exit codes: 0 success, 1 parse or usage error, 2 unsupported input, 3 I/O error."
)]
pub struct Cli {
    /// Do not print progress messages on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    /// Overwrite output files that already exist.
    #[arg(long, global = true)]
    pub force: bool,
    /// Refuse inputs larger than this many bytes.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_FILE_SIZE)]
    pub max_file_size: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Revision count, per-revision sizes, /Info metadata and anomalies.
    Info { file: PathBuf },
    /// Write the file as it was at an earlier revision.
    ///
    /// `truncate` cuts the file after the revision's %%EOF. `rewrite` keeps
    /// the file length and repoints the final cross-reference table at the
    /// old objects; it needs a classic table in the last revision, so use
    /// `truncate` for files that end in a cross-reference stream.
    Recover {
        file: PathBuf,
        #[arg(long)]
        rev: usize,
        #[arg(long, default_value = "truncate", value_parser = parse_method)]
        method: RecoveryMethod,
        /// Output file or directory. Defaults to `<stem>.rev<NNN>.<method>.pdf`
        /// next to the input.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Extracted text per page.
    Text {
        file: PathBuf,
        /// Revision to read; defaults to the last one.
        #[arg(long, conflicts_with = "all")]
        rev: Option<usize>,
        /// Every revision, oldest first.
        #[arg(long)]
        all: bool,
    },
    /// Write the images a revision's pages use into a directory.
    Images {
        file: PathBuf,
        #[arg(long)]
        rev: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Compare two revisions page by page and object by object.
    Diff {
        file: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
    },
    /// List superseded object versions still present in the file.
    Shadows { file: PathBuf },
    /// Look for unaccounted bytes, unreferenced streams and orphan objects.
    Scan { file: PathBuf },
    /// Plant a payload: technique 1 is a superseded compressed stream,
    /// technique 2 is slack inside an older revision block.
    Hide {
        file: PathBuf,
        #[arg(long)]
        payload: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        technique: u8,
        /// Insertion offset for technique 2.
        #[arg(long)]
        at: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Read back a payload given its locator (`technique:offset:length[:N.G]`).
    ExtractHidden {
        file: PathBuf,
        #[arg(long, value_parser = parse_locator)]
        at: HiddenLocator,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Build a test file from a JSON description; the manifest is written
    /// next to it as `<stem>.manifest.json`.
    Fixture {
        spec: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn parse_method(s: &str) -> Result<RecoveryMethod, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_locator(s: &str) -> Result<HiddenLocator, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} exists; pass --force to overwrite")]
    OutputExists(PathBuf),
    #[error("{path} is {size} bytes, above --max-file-size {limit}")]
    TooLarge { path: PathBuf, size: u64, limit: u64 },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) => match e {
                Error::EncryptedDocument | Error::EntryNotRewritable(_) => EXIT_UNSUPPORTED,
                Error::Io(_) => EXIT_IO,
                _ => EXIT_PARSE,
            },
            CliError::Io { .. } | CliError::OutputExists(_) => EXIT_IO,
            CliError::TooLarge { .. } | CliError::Usage(_) => EXIT_PARSE,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Lib(e) => e.kind(),
            CliError::Io { .. } => "Io",
            CliError::OutputExists(_) => "OutputExists",
            CliError::TooLarge { .. } => "TooLarge",
            CliError::Usage(_) => "Usage",
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_PARSE
                }
            };
        }
    };
    let mut ctx = commands::Context { cli: &cli, stderr };
    match ctx.dispatch() {
        Ok(json) => {
            let _ = writeln!(stdout, "{json}");
            EXIT_OK
        }
        Err(e) => {
            let code = e.exit_code();
            let body = report::ErrorReport {
                schema_version: SCHEMA_VERSION,
                error: report::ErrorBody { kind: e.kind().to_string(), message: e.to_string(), exit_code: code },
            };
            let json = serde_json::to_string_pretty(&body).unwrap_or_else(|_| e.to_string());
            let _ = writeln!(ctx.stderr, "{json}");
            code
        }
    }
}

#[cfg(test)]
mod tests;
