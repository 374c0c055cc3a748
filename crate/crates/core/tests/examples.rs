//! Runs every example on its built-in sample so they stay working.

macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        #[path = $file]
        mod $name;
    };
}

example!(coverage_map, "../examples/coverage_map.rs");
example!(hide_in_slack, "../examples/hide_in_slack.rs");
example!(hide_superseded, "../examples/hide_superseded.rs");
example!(list_revisions, "../examples/list_revisions.rs");
example!(recover_revision, "../examples/recover_revision.rs");
example!(revision_images, "../examples/revision_images.rs");
example!(revision_text, "../examples/revision_text.rs");
example!(scan_hidden, "../examples/scan_hidden.rs");
example!(shadow_objects, "../examples/shadow_objects.rs");
example!(write_fixture, "../examples/write_fixture.rs");

#[test]
fn examples_run_on_their_samples() {
    let out = tempfile::tempdir().unwrap();
    coverage_map::run(None).unwrap();
    hide_in_slack::run(None, None).unwrap();
    hide_superseded::run(None, None).unwrap();
    list_revisions::run(None).unwrap();
    recover_revision::run(None, 0).unwrap();
    revision_images::run(None, Some(out.path())).unwrap();
    revision_text::run(None).unwrap();
    scan_hidden::run(None).unwrap();
    shadow_objects::run(None).unwrap();
    write_fixture::run(Some(out.path())).unwrap();
    assert!(out.path().join("modified.pdf").exists());
    let jpegs = std::fs::read_dir(out.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "jpg"))
        .count();
    assert_eq!(jpegs, 2, "one picture per revision");
}
