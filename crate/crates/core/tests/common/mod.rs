//! Seeded generators and independent oracles shared by the integration
//! tests. Nothing here calls into the library's parsing code.

#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::Rng;

use pdfresidue::fixture::{EditScript, ImageKind, ImageSpec, PageSpec, TextSpec};

const WORDS: &[&str] = &[
    "invoice", "total", "draft", "approved", "meeting", "budget", "quarter", "revenue", "contract", "signed",
    "pending", "review", "final", "memo", "north", "south", "delivery", "amount", "due", "March",
];

pub fn latin_line<R: Rng>(rng: &mut R) -> String {
    let n = rng.random_range(1..=5);
    let mut words: Vec<String> = (0..n).map(|_| WORDS.choose(rng).unwrap().to_string()).collect();
    if rng.random_bool(0.3) {
        words.push(rng.random_range(0..100_000u32).to_string());
    }
    words.join(" ")
}

/// Hangul syllables, which no single-byte encoding covers.
pub fn hangul_line<R: Rng>(rng: &mut R) -> String {
    let n = rng.random_range(1..=8);
    (0..n).map(|_| char::from_u32(rng.random_range(0xAC00..=0xD7A3)).unwrap()).collect()
}

/// SOI, an APP0 header, random scan bytes without markers, EOI.
pub fn jpeg<R: Rng>(rng: &mut R) -> Vec<u8> {
    let mut out = vec![0xFF, 0xD8, 0xFF, 0xE0, 0x00, 0x10, b'J', b'F', b'I', b'F', 0x00, 0x01, 0x01, 0x00];
    let n = rng.random_range(16..512);
    out.extend((0..n).map(|_| rng.random_range(0..0xFFu8)));
    out.extend_from_slice(&[0xFF, 0xD9]);
    out
}

pub fn random_page<R: Rng>(rng: &mut R) -> PageSpec {
    let mut page = PageSpec::default();
    for _ in 0..rng.random_range(0..=3) {
        if rng.random_bool(0.2) {
            page.texts.push(TextSpec::unicode(hangul_line(rng)));
        } else {
            page.texts.push(TextSpec::latin(latin_line(rng)));
        }
    }
    if rng.random_bool(0.25) {
        let image = if rng.random_bool(0.5) {
            ImageSpec { format: ImageKind::Jpeg, payload: jpeg(rng), width: 4, height: 4 }
        } else {
            let (w, h) = (rng.random_range(1..6u32), rng.random_range(1..6u32));
            let payload = (0..w * h * 3).map(|_| rng.random()).collect();
            ImageSpec { format: ImageKind::Rgb8, payload, width: w, height: h }
        };
        page.images.push(image);
    }
    page
}

pub fn random_pages<R: Rng>(rng: &mut R, min: usize, max: usize) -> Vec<PageSpec> {
    let n = rng.random_range(min..=max);
    (0..n).map(|_| random_page(rng)).collect()
}

/// An edit script valid for a document with `page_count` pages. May be
/// empty.
pub fn random_script<R: Rng>(rng: &mut R, page_count: usize) -> EditScript {
    let mut script = EditScript::default();
    for i in 0..page_count {
        if rng.random_bool(0.4) {
            script.page_edits.insert(i, random_page(rng));
        }
    }
    if rng.random_bool(0.2) {
        script.pages_appended.push(random_page(rng));
    }
    if rng.random_bool(0.3) {
        script.info_updates.insert("Title".into(), latin_line(rng));
    }
    script
}

/// Every occurrence of `N G obj` that starts on a token boundary.
pub fn object_header_offsets(bytes: &[u8], number: u32, generation: u16) -> Vec<usize> {
    let needle = format!("{number} {generation} obj");
    let n = needle.as_bytes();
    (0..bytes.len().saturating_sub(n.len() - 1))
        .filter(|&i| &bytes[i..i + n.len()] == n)
        .filter(|&i| i == 0 || !bytes[i - 1].is_ascii_digit())
        .filter(|&i| bytes.get(i + n.len()).is_none_or(|b| !b.is_ascii_alphanumeric()))
        .collect()
}

/// Runs of printable ASCII at least `min` long, like the `strings` tool.
pub fn printable_runs(bytes: &[u8], min: usize) -> Vec<&[u8]> {
    bytes
        .split(|b| !(0x20..=0x7E).contains(b))
        .filter(|run| run.len() >= min)
        .collect()
}
