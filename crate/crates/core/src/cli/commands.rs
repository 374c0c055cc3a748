use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::report::{span_pair, FileSummary};
use super::{Cli, CliError, Command};
use crate::error::Error;
use crate::extract::{extract_images, extract_text, ImageFormat};
use crate::fixture::{build_fixture, FixtureSpec};
use crate::recover::{recover, RecoveryMethod};
use crate::residual::{coverage_map, coverage_map_of_bytes, diff_revisions, shadow_objects, CoverageMap};
use crate::revisions::{build_revision_chain, Document};
use crate::stego::{detect_hidden, detect_hidden_in_bytes, extract_payload, hide_in_slack, hide_superseded};

type CliResult<T> = Result<T, CliError>;

pub(super) struct Context<'a> {
    pub cli: &'a Cli,
    pub stderr: &'a mut dyn Write,
}

#[derive(Serialize)]
struct InfoResult {
    append_only: bool,
    append_only_violation: Option<String>,
    encrypted: bool,
}

#[derive(Serialize)]
struct RecoverResult {
    revision: usize,
    method: &'static str,
    output_path: String,
    output_size: usize,
    rewritten_entries: usize,
    anomalies: Vec<String>,
}

#[derive(Serialize)]
struct PageResult {
    page_index: usize,
    text: String,
    warnings: Vec<String>,
    error: Option<String>,
}

#[derive(Serialize)]
struct RevisionText {
    revision: usize,
    pages: Vec<PageResult>,
}

#[derive(Serialize)]
struct ImageFile {
    path: String,
    page_index: usize,
    object: String,
    format: ImageFormat,
    width: u32,
    height: u32,
    bits_per_component: u32,
    color_space: String,
    size: usize,
}

#[derive(Serialize)]
struct ImagesResult {
    revision: usize,
    files: Vec<ImageFile>,
    errors: Vec<String>,
}

#[derive(Serialize)]
struct ScanResult {
    unaccounted_bytes: usize,
    unaccounted_spans: Vec<[usize; 2]>,
    hidden: crate::stego::HiddenRegionReport,
}

#[derive(Serialize)]
struct HideResultJson {
    technique: u8,
    locator: String,
    payload_size: usize,
    output_path: String,
    output_size: usize,
}

#[derive(Serialize)]
struct ExtractResult {
    locator: String,
    payload_size: usize,
    output_path: String,
}

#[derive(Serialize)]
struct FixtureResult {
    output_path: String,
    manifest_path: String,
    saves: usize,
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(format!("cannot serialize report: {e}")))
}

impl Context<'_> {
    fn progress(&mut self, msg: impl AsRef<str>) {
        if !self.cli.quiet {
            let _ = writeln!(self.stderr, "{}", msg.as_ref());
        }
    }

    fn read_input(&mut self, path: &Path) -> CliResult<Vec<u8>> {
        let meta = fs::metadata(path).map_err(|e| CliError::io(path, e))?;
        if meta.len() > self.cli.max_file_size {
            return Err(CliError::TooLarge { path: path.to_path_buf(), size: meta.len(), limit: self.cli.max_file_size });
        }
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.progress(format!("read {} ({} bytes)", path.display(), bytes.len()));
        Ok(bytes)
    }

    fn load(&mut self, path: &Path) -> CliResult<(FileSummary, Document)> {
        let doc = build_revision_chain(self.read_input(path)?)?;
        self.progress(format!("{} revision(s)", doc.revision_count()));
        Ok((FileSummary::of_document(&path.display().to_string(), &doc), doc))
    }

    /// Writes a new file, refusing to replace an existing one without
    /// `--force` and never replacing `input`.
    fn write_output(&mut self, path: &Path, bytes: &[u8], input: &Path) -> CliResult<()> {
        if let (Ok(a), Ok(b)) = (fs::canonicalize(path), fs::canonicalize(input)) {
            if a == b {
                return Err(CliError::Usage(format!("refusing to overwrite the input file {}", input.display())));
            }
        }
        let result = if self.cli.force {
            fs::write(path, bytes)
        } else {
            match fs::OpenOptions::new().write(true).create_new(true).open(path) {
                Ok(mut f) => f.write_all(bytes),
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                    return Err(CliError::OutputExists(path.to_path_buf()))
                }
                Err(e) => Err(e),
            }
        };
        result.map_err(|e| CliError::io(path, e))?;
        self.progress(format!("wrote {} ({} bytes)", path.display(), bytes.len()));
        Ok(())
    }

    pub(super) fn dispatch(&mut self) -> CliResult<String> {
        let cli = self.cli;
        match &cli.command {
            Command::Info { file } => self.info(file),
            Command::Recover { file, rev, method, output } => self.recover(file, *rev, *method, output.as_deref()),
            Command::Text { file, rev, all } => self.text(file, *rev, *all),
            Command::Images { file, rev, output } => self.images(file, *rev, output),
            Command::Diff { file, from, to } => {
                let (summary, doc) = self.load(file)?;
                let diff = diff_revisions(&doc, *from, *to)?;
                to_json(&summary.report("diff", diff))
            }
            Command::Shadows { file } => {
                let (summary, doc) = self.load(file)?;
                to_json(&summary.report("shadows", shadow_objects(&doc)))
            }
            Command::Scan { file } => self.scan(file),
            Command::Hide { file, payload, technique, at, output } => self.hide(file, payload, *technique, *at, output),
            Command::ExtractHidden { file, at, output } => {
                let bytes = self.read_input(file)?;
                let payload = extract_payload(&bytes, at)?;
                self.write_output(output, &payload, file)?;
                let summary = summarize(file, bytes);
                let result = ExtractResult {
                    locator: at.to_string(),
                    payload_size: payload.len(),
                    output_path: output.display().to_string(),
                };
                to_json(&summary.report("extract-hidden", result))
            }
            Command::Fixture { spec, output } => self.fixture(spec, output),
        }
    }

    fn info(&mut self, file: &Path) -> CliResult<String> {
        let (summary, doc) = self.load(file)?;
        let violation = doc.append_only_violation();
        let result =
            InfoResult { append_only: violation.is_none(), append_only_violation: violation, encrypted: doc.is_encrypted() };
        to_json(&summary.report("info", result))
    }

    fn recover(&mut self, file: &Path, rev: usize, method: RecoveryMethod, output: Option<&Path>) -> CliResult<String> {
        let (summary, doc) = self.load(file)?;
        let recovery = recover(&doc, rev, method)?;
        let name = format!(
            "{}.rev{rev:03}.{}.pdf",
            file.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default(),
            method.label()
        );
        let path = match output {
            Some(p) if p.is_dir() => p.join(name),
            Some(p) => p.to_path_buf(),
            None => file.with_file_name(name),
        };
        self.write_output(&path, &recovery.bytes, file)?;
        let result = RecoverResult {
            revision: rev,
            method: method.label(),
            output_path: path.display().to_string(),
            output_size: recovery.bytes.len(),
            rewritten_entries: recovery.rewritten.len(),
            anomalies: recovery.anomalies,
        };
        to_json(&summary.report("recover", result))
    }

    fn text(&mut self, file: &Path, rev: Option<usize>, all: bool) -> CliResult<String> {
        let (summary, doc) = self.load(file)?;
        let revs: Vec<usize> = if all { (0..doc.revision_count()).collect() } else { vec![rev.unwrap_or(doc.last_revision())] };
        let mut out = Vec::new();
        for r in revs {
            let pages = extract_text(&doc, r)?
                .into_iter()
                .map(|p| PageResult { page_index: p.page_index, text: p.joined, warnings: p.warnings, error: p.error })
                .collect();
            out.push(RevisionText { revision: r, pages });
        }
        to_json(&summary.report("text", out))
    }

    fn images(&mut self, file: &Path, rev: Option<usize>, dir: &Path) -> CliResult<String> {
        let (summary, doc) = self.load(file)?;
        let rev = rev.unwrap_or(doc.last_revision());
        let extraction = extract_images(&doc, rev)?;
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let mut files = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for img in &extraction.images {
            if !seen.insert((img.page_index, img.object_id)) {
                continue;
            }
            let stem = format!(
                "rev{rev:03}_page{:03}_obj{}_{}",
                img.page_index, img.object_id.number, img.object_id.generation
            );
            let path = dir.join(format!("{stem}.{}", img.format.extension()));
            self.write_output(&path, &img.payload, file)?;
            let entry = ImageFile {
                path: path.display().to_string(),
                page_index: img.page_index,
                object: img.object_id.to_string(),
                format: img.format,
                width: img.width,
                height: img.height,
                bits_per_component: img.bits_per_component,
                color_space: img.color_space.to_string_lossy(),
                size: img.payload.len(),
            };
            if img.format == ImageFormat::RawPixmap {
                let geometry = to_json(&entry)?;
                self.write_output(&dir.join(format!("{stem}.json")), geometry.as_bytes(), file)?;
            }
            files.push(entry);
        }
        let errors = extraction
            .errors
            .iter()
            .map(|e| format!("page {} object {}: {}", e.page_index, e.object_id, e.message))
            .collect();
        to_json(&summary.report("images", ImagesResult { revision: rev, files, errors }))
    }

    fn scan(&mut self, file: &Path) -> CliResult<String> {
        let bytes = self.read_input(file)?;
        let path = file.display().to_string();
        let (summary, map, hidden): (FileSummary, CoverageMap, _) = match build_revision_chain(bytes.clone()) {
            Ok(doc) => (FileSummary::of_document(&path, &doc), coverage_map(&doc), detect_hidden(&doc)),
            Err(Error::EncryptedDocument) => return Err(Error::EncryptedDocument.into()),
            Err(e) => {
                self.progress(format!("no revision chain ({e}); carving objects instead"));
                let len = bytes.len();
                (
                    FileSummary::of_unparsed(&path, len, e.to_string()),
                    coverage_map_of_bytes(&bytes),
                    detect_hidden_in_bytes(&bytes),
                )
            }
        };
        let result = ScanResult {
            unaccounted_bytes: map.unaccounted_bytes,
            unaccounted_spans: map.unaccounted().map(|s| span_pair(s.span)).collect(),
            hidden,
        };
        to_json(&summary.report("scan", result))
    }

    fn hide(&mut self, file: &Path, payload: &Path, technique: u8, at: Option<usize>, output: &Path) -> CliResult<String> {
        let (summary, doc) = self.load(file)?;
        let data = fs::read(payload).map_err(|e| CliError::io(payload, e))?;
        let hidden = match technique {
            1 if at.is_some() => return Err(CliError::Usage("--at only applies to technique 2".into())),
            1 => hide_superseded(doc.bytes(), &data)?,
            _ => hide_in_slack(doc.bytes(), &data, at)?,
        };
        self.write_output(output, &hidden.bytes, file)?;
        self.progress(format!("locator {}", hidden.locator));
        let result = HideResultJson {
            technique,
            locator: hidden.locator.to_string(),
            payload_size: data.len(),
            output_path: output.display().to_string(),
            output_size: hidden.bytes.len(),
        };
        to_json(&summary.report("hide", result))
    }

    fn fixture(&mut self, spec_path: &Path, output: &Path) -> CliResult<String> {
        let text = self.read_input(spec_path)?;
        let spec: FixtureSpec = serde_json::from_slice(&text)
            .map_err(|e| CliError::Usage(format!("{}: invalid fixture spec: {e}", spec_path.display())))?;
        let build = build_fixture(&spec)?;
        let manifest_path = manifest_path_for(output);
        let manifests = to_json(&build.manifests)?;
        self.write_output(output, build.final_bytes(), spec_path)?;
        self.write_output(&manifest_path, manifests.as_bytes(), spec_path)?;
        let doc = build_revision_chain(build.final_bytes().to_vec())?;
        let summary = FileSummary::of_document(&output.display().to_string(), &doc);
        let result = FixtureResult {
            output_path: output.display().to_string(),
            manifest_path: manifest_path.display().to_string(),
            saves: spec.saves.len(),
        };
        to_json(&summary.report("fixture", result))
    }
}

fn summarize(file: &Path, bytes: Vec<u8>) -> FileSummary {
    let path = file.display().to_string();
    let len = bytes.len();
    match build_revision_chain(bytes) {
        Ok(doc) => FileSummary::of_document(&path, &doc),
        Err(e) => FileSummary::of_unparsed(&path, len, e.to_string()),
    }
}

fn manifest_path_for(output: &Path) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "fixture".into());
    output.with_file_name(format!("{stem}.manifest.json"))
}
