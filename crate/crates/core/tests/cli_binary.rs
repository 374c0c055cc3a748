//! Drives the installed binary as a separate process.

use std::path::Path;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use pdfresidue::fixture::{incremental_save, write_pdf, EditScript, PageSpec, WriteOptions};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdfresidue")).args(args).output().expect("spawn pdfresidue")
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(bytes)))
}

fn two_revisions(dir: &Path) -> (String, Vec<u8>) {
    let (v0, _) = write_pdf(&[PageSpec::text(&["draft terms"])], &WriteOptions::default()).unwrap();
    let mut script = EditScript::default();
    script.page_edits.insert(0, PageSpec::text(&["final terms"]));
    let (v1, _) = incremental_save(&v0, &script).unwrap();
    let path = dir.join("contract.pdf");
    std::fs::write(&path, &v1).unwrap();
    (path.to_string_lossy().into_owned(), v1)
}

#[test]
fn reports_and_recovers_without_touching_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let (input, original) = two_revisions(dir.path());

    let out = bin(&["info", &input]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out.stdout)["revision_count"], 2);

    let text = bin(&["-q", "text", &input, "--rev", "0"]);
    assert_eq!(text.status.code(), Some(0));
    assert!(text.stderr.is_empty());
    assert_eq!(json(&text.stdout)["result"][0]["pages"][0]["text"], "draft terms");

    let recovered = dir.path().join("old.pdf");
    let out = bin(&["-q", "recover", &input, "--rev", "0", "-o", recovered.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    // A second run refuses to clobber, then succeeds with --force.
    let again = bin(&["-q", "recover", &input, "--rev", "0", "-o", recovered.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(3));
    assert_eq!(json(&again.stderr)["error"]["kind"], "OutputExists");
    let forced = bin(&["-q", "--force", "recover", &input, "--rev", "0", "-o", recovered.to_str().unwrap()]);
    assert_eq!(forced.status.code(), Some(0));
    // Writing over the input is refused even with --force.
    let onto_input = bin(&["-q", "--force", "recover", &input, "--rev", "0", "-o", &input]);
    assert_ne!(onto_input.status.code(), Some(0));

    for args in [vec!["shadows", &input], vec!["scan", &input], vec!["diff", &input, "--from", "0", "--to", "1"]] {
        let out = bin(&[&["-q"], &args[..]].concat());
        assert_eq!(out.status.code(), Some(0), "{args:?}");
    }
    assert_eq!(std::fs::read(&input).unwrap(), original);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (input, _) = two_revisions(dir.path());
    let missing = dir.path().join("missing.pdf");
    let junk = dir.path().join("junk.pdf");
    std::fs::write(&junk, b"not a pdf at all").unwrap();

    assert_eq!(bin(&["--help"]).status.code(), Some(0));
    assert_eq!(bin(&["--version"]).status.code(), Some(0));
    assert_eq!(bin(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(bin(&["-q", "info", missing.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(bin(&["-q", "info", junk.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(bin(&["-q", "text", &input, "--rev", "7"]).status.code(), Some(1));
    assert_eq!(bin(&["-q", "--max-file-size", "10", "info", &input]).status.code(), Some(1));

    // Error JSON is still printed under --quiet.
    let out = bin(&["-q", "info", missing.to_str().unwrap()]);
    let err = json(&out.stderr);
    assert_eq!(err["error"]["exit_code"], 3);
    assert_eq!(err["schema_version"], 1);
}

#[test]
fn hide_and_extract_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let (input, _) = two_revisions(dir.path());
    let payload = dir.path().join("payload.bin");
    let secret: Vec<u8> = (0..=255u8).cycle().take(5000).collect();
    std::fs::write(&payload, &secret).unwrap();

    for technique in ["1", "2"] {
        let hidden = dir.path().join(format!("hidden{technique}.pdf"));
        let out = bin(&[
            "-q",
            "hide",
            &input,
            "--payload",
            payload.to_str().unwrap(),
            "--technique",
            technique,
            "-o",
            hidden.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let locator = json(&out.stdout)["result"]["locator"].as_str().unwrap().to_string();

        let scan = json(&bin(&["-q", "scan", hidden.to_str().unwrap()]).stdout);
        let flagged: Vec<&str> =
            scan["result"]["hidden"]["candidates"].as_array().unwrap().iter().filter_map(|c| c["locator"].as_str()).collect();
        assert!(flagged.contains(&locator.as_str()), "{locator} not in {flagged:?}");

        let back = dir.path().join(format!("back{technique}.bin"));
        let out = bin(&["-q", "extract-hidden", hidden.to_str().unwrap(), "--at", &locator, "-o", back.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(std::fs::read(&back).unwrap(), secret);
    }
}

#[test]
fn arbitrary_bytes_never_crash_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let (_, seed) = two_revisions(dir.path());
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..40 {
        let mut bytes = if i % 2 == 0 { seed.clone() } else { (0..rng.random_range(0..600)).map(|_| rng.random()).collect() };
        if !bytes.is_empty() {
            for _ in 0..rng.random_range(1..8) {
                let at = rng.random_range(0..bytes.len());
                bytes[at] = rng.random();
            }
        }
        let path = dir.path().join(format!("fuzz{i}.pdf"));
        std::fs::write(&path, &bytes).unwrap();
        for command in ["info", "scan", "shadows", "text"] {
            let code = bin(&["-q", command, path.to_str().unwrap()]).status.code();
            assert!(matches!(code, Some(0..=3)), "{command} on input {i} exited with {code:?}");
        }
    }
}
