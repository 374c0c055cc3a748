use std::path::Path;

use serde_json::Value;

use super::*;
use crate::fixture::{incremental_save, write_pdf, EditScript, PageSpec, WriteOptions};

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Outcome {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }

    fn error_kind(&self) -> String {
        let v: Value = serde_json::from_str(&self.stderr).unwrap_or_else(|e| panic!("{e}: {}", self.stderr));
        v["error"]["kind"].as_str().unwrap().to_string()
    }
}

fn cli(args: &[&str]) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("pdfresidue").chain(args.iter().copied()), &mut out, &mut err);
    Outcome { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn three_page_edit(dir: &Path) -> (String, Vec<u8>, Vec<u8>) {
    let pages: Vec<PageSpec> = ["one", "two", "three"].iter().map(|t| PageSpec::text(&[t])).collect();
    let (v0, _) = write_pdf(&pages, &WriteOptions::default()).unwrap();
    let mut script = EditScript::default();
    script.page_edits.insert(0, PageSpec::text(&["ONE"]));
    script.page_edits.insert(1, PageSpec::text(&["TWO"]));
    let (v1, _) = incremental_save(&v0, &script).unwrap();
    let path = dir.join("modified.pdf");
    std::fs::write(&path, &v1).unwrap();
    (path.to_str().unwrap().to_string(), v0, v1)
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn info_reports_revisions() {
    let dir = tempfile::tempdir().unwrap();
    let (file, _, v1) = three_page_edit(dir.path());
    let out = cli(&["--quiet", "info", &file]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stderr.is_empty());
    let v = out.json();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["revision_count"], 2);
    assert_eq!(v["file_size"], v1.len());
    assert_eq!(v["revisions"][1]["byte_range"][1], v1.len());
    assert_eq!(v["result"]["append_only"], true);
    // Same input, same report.
    assert_eq!(cli(&["--quiet", "info", &file]).stdout, out.stdout);
}

#[test]
fn encrypted_input_is_unsupported() {
    let dir = tempfile::tempdir().unwrap();
    let (v0, _) = write_pdf(&[PageSpec::text(&["x"])], &WriteOptions::default()).unwrap();
    let at = memchr::memmem::rfind(&v0, b"trailer\n<<").unwrap() + b"trailer\n<<".len();
    let mut enc = v0.clone();
    enc.splice(at..at, b"/Encrypt << /Filter /Standard >> ".iter().copied());
    let path = p(dir.path(), "enc.pdf");
    std::fs::write(&path, enc).unwrap();
    for cmd in ["info", "shadows", "scan"] {
        let out = cli(&["-q", cmd, &path]);
        assert_eq!(out.code, EXIT_UNSUPPORTED, "{cmd}");
        assert!(out.stdout.is_empty());
        assert_eq!(out.error_kind(), "EncryptedDocument");
    }
}

#[test]
fn recover_methods_and_clobber_protection() {
    let dir = tempfile::tempdir().unwrap();
    let (file, v0, v1) = three_page_edit(dir.path());

    let out = cli(&["-q", "recover", &file, "--rev", "0", "--method", "truncate"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let written = p(dir.path(), "modified.rev000.truncate.pdf");
    assert_eq!(std::fs::read(&written).unwrap(), v0);
    assert_eq!(out.json()["result"]["output_path"], written.as_str());

    let again = cli(&["-q", "recover", &file, "--rev", "0", "--method", "truncate"]);
    assert_eq!(again.code, EXIT_IO);
    assert_eq!(again.error_kind(), "OutputExists");
    assert_eq!(cli(&["-q", "--force", "recover", &file, "--rev", "0"]).code, 0);

    let rewritten = p(dir.path(), "r.pdf");
    let out = cli(&["-q", "recover", &file, "--rev", "0", "--method", "rewrite", "-o", &rewritten]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(std::fs::read(&rewritten).unwrap().len(), v1.len());

    let out = cli(&["-q", "recover", &file, "--rev", "1", "-o", dir.path().to_str().unwrap()]);
    assert_eq!(out.code, 0);
    assert_eq!(std::fs::read(p(dir.path(), "modified.rev001.truncate.pdf")).unwrap(), v1);

    assert_eq!(cli(&["-q", "recover", &file, "--rev", "7"]).code, EXIT_PARSE);
    assert_eq!(cli(&["-q", "--force", "recover", &file, "--rev", "0", "-o", &file]).code, EXIT_PARSE);
    assert_eq!(std::fs::read(&file).unwrap(), v1);
}

#[test]
fn rewrite_of_stream_file_is_unsupported() {
    let dir = tempfile::tempdir().unwrap();
    let opts = WriteOptions { xref_stream: true, ..WriteOptions::default() };
    let (v0, _) = write_pdf(&[PageSpec::text(&["a"])], &opts).unwrap();
    let mut script = EditScript::default();
    script.page_edits.insert(0, PageSpec::text(&["b"]));
    let (v1, _) = incremental_save(&v0, &script).unwrap();
    let file = p(dir.path(), "xs.pdf");
    std::fs::write(&file, v1).unwrap();
    let out = cli(&["-q", "recover", &file, "--rev", "0", "--method", "rewrite"]);
    assert_eq!(out.code, EXIT_UNSUPPORTED);
    assert_eq!(out.error_kind(), "EntryNotRewritable");
}

#[test]
fn text_all_and_diff() {
    let dir = tempfile::tempdir().unwrap();
    let (file, _, _) = three_page_edit(dir.path());
    let v = cli(&["-q", "text", &file, "--all"]).json();
    let texts = |rev: usize| -> Vec<String> {
        v["result"][rev]["pages"].as_array().unwrap().iter().map(|p| p["text"].as_str().unwrap().to_string()).collect()
    };
    assert_eq!(texts(0), ["one", "two", "three"]);
    assert_eq!(texts(1), ["ONE", "TWO", "three"]);
    let last = cli(&["-q", "text", &file]).json();
    assert_eq!(last["result"].as_array().unwrap().len(), 1);
    assert_eq!(last["result"][0]["revision"], 1);

    let d = cli(&["-q", "diff", &file, "--from", "0", "--to", "1"]);
    assert_eq!(d.json()["result"]["pages_changed"], serde_json::json!([0, 1]));
    let same = cli(&["-q", "diff", &file, "--from", "0", "--to", "0"]);
    assert_eq!(same.code, EXIT_PARSE);
    assert_eq!(same.error_kind(), "Precondition");
}

#[test]
fn hide_scan_extract_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (file, _, _) = three_page_edit(dir.path());
    let payload: Vec<u8> = (0..2000u32).map(|i| (i * 7919 % 251) as u8).collect();
    let payload_path = p(dir.path(), "payload.bin");
    std::fs::write(&payload_path, &payload).unwrap();
    for technique in ["1", "2"] {
        let out_pdf = p(dir.path(), &format!("hidden{technique}.pdf"));
        let out = cli(&["-q", "hide", &file, "--payload", &payload_path, "--technique", technique, "-o", &out_pdf]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let locator = out.json()["result"]["locator"].as_str().unwrap().to_string();

        let scan = cli(&["-q", "scan", &out_pdf]).json();
        let found: Vec<&str> =
            scan["result"]["hidden"]["candidates"].as_array().unwrap().iter().map(|c| c["locator"].as_str().unwrap()).collect();
        assert!(found.contains(&locator.as_str()), "{locator} not in {found:?}");

        let back = p(dir.path(), &format!("back{technique}.bin"));
        let out = cli(&["-q", "extract-hidden", &out_pdf, "--at", &locator, "-o", &back]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        assert_eq!(std::fs::read(&back).unwrap(), payload);
    }
    let bad = cli(&["-q", "extract-hidden", &file, "--at", "slack:1", "-o", &p(dir.path(), "x.bin")]);
    assert_eq!(bad.code, EXIT_PARSE);
    assert_eq!(cli(&["-q", "hide", &file, "--payload", &payload_path, "--technique", "3", "-o", "x"]).code, EXIT_PARSE);
}

#[test]
fn fixture_command_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{"pages":[{"texts":[{"text":"hello","font":"latin"}]}],"saves":[{"page_edits":{"0":{"texts":[{"text":"bye","font":"latin"}]}}}]}"#;
    let spec_path = p(dir.path(), "spec.json");
    std::fs::write(&spec_path, spec).unwrap();
    let out_pdf = p(dir.path(), "fx.pdf");
    let out = cli(&["-q", "fixture", &spec_path, "-o", &out_pdf]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.json()["revision_count"], 2);
    let manifests: Value = serde_json::from_slice(&std::fs::read(p(dir.path(), "fx.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifests.as_array().unwrap().len(), 2);
    let texts = cli(&["-q", "text", &out_pdf, "--all"]).json();
    assert_eq!(texts["result"][0]["pages"][0]["text"], "hello");
    assert_eq!(texts["result"][1]["pages"][0]["text"], "bye");
}

#[test]
fn images_are_written_with_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let mut page = PageSpec::text(&["pic"]);
    page.images.push(crate::fixture::ImageSpec {
        format: crate::fixture::ImageKind::Rgb8,
        payload: vec![255, 0, 0, 0, 255, 0],
        width: 2,
        height: 1,
    });
    let (v0, _) = write_pdf(&[page], &WriteOptions::default()).unwrap();
    let file = p(dir.path(), "img.pdf");
    std::fs::write(&file, v0).unwrap();
    let outdir = p(dir.path(), "imgs");
    let v = cli(&["-q", "images", &file, "-o", &outdir]).json();
    let files = v["result"]["files"].as_array().unwrap();
    assert_eq!(files.len(), 1);
    let raw = std::fs::read(files[0]["path"].as_str().unwrap()).unwrap();
    assert_eq!(raw, [255, 0, 0, 0, 255, 0]);
    let stem = files[0]["path"].as_str().unwrap().trim_end_matches(".raw").to_string();
    let geometry: Value = serde_json::from_slice(&std::fs::read(format!("{stem}.json")).unwrap()).unwrap();
    assert_eq!(geometry["width"], 2);
}

#[test]
fn exit_codes_for_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let junk = p(dir.path(), "junk.pdf");
    std::fs::write(&junk, b"this is not a pdf at all").unwrap();
    assert_eq!(cli(&["-q", "info", &junk]).code, EXIT_PARSE);
    // Scan still reports on files without a usable structure.
    let scan = cli(&["-q", "scan", &junk]);
    assert_eq!(scan.code, 0);
    assert_eq!(scan.json()["revision_count"], 0);
    assert_eq!(cli(&["-q", "info", &p(dir.path(), "missing.pdf")]).code, EXIT_IO);
    assert_eq!(cli(&["-q", "--max-file-size", "4", "info", &junk]).code, EXIT_PARSE);
    assert_eq!(cli(&["info"]).code, EXIT_PARSE);
    assert_eq!(cli(&["frobnicate"]).code, EXIT_PARSE);
    let help = cli(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("extract-hidden"));
}

#[test]
fn progress_goes_to_stderr_unless_quiet() {
    let dir = tempfile::tempdir().unwrap();
    let (file, _, _) = three_page_edit(dir.path());
    let loud = cli(&["info", &file]);
    assert!(loud.stderr.contains("revision(s)"));
    assert_eq!(loud.stdout, cli(&["--quiet", "info", &file]).stdout);
}
