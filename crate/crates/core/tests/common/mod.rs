#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use tracer_core::extract::extract;
use tracer_core::ir::IrDocument;
use tracer_core::kb::KnowledgeBase;
use tracer_core::pipeline::source_to_ir;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "cs"))
        .collect();
    files.sort();
    files
}

pub fn ir_of(path: &PathBuf) -> IrDocument {
    let src = std::fs::read_to_string(path).unwrap();
    let name = path.file_name().unwrap().to_string_lossy().into_owned();
    source_to_ir(&name, &src).unwrap_or_else(|e| panic!("{e}"))
}

pub fn kb_of_file(path: &PathBuf) -> KnowledgeBase {
    extract(&[ir_of(path)])
}

pub fn kb_of_source(src: &str) -> KnowledgeBase {
    extract(&[source_to_ir("t.cs", src).unwrap_or_else(|e| panic!("{e}"))])
}

/// `(type, parent, child, seq)` rows from a checked-in link table.
pub type Row = (String, String, String, Option<u32>);

pub fn read_table(path: &PathBuf) -> Vec<Row> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            assert!(f.len() == 3 || f.len() == 4, "bad row {l:?}");
            (f[0].to_string(), f[1].to_string(), f[2].to_string(), f.get(3).map(|s| s.parse().unwrap()))
        })
        .collect()
}

pub fn rows(kb: &KnowledgeBase) -> Vec<Row> {
    let mut v: Vec<Row> = kb
        .links()
        .map(|l| (l.link_type.clone(), l.parent.clone(), l.child.clone(), l.seq))
        .collect();
    v.sort();
    v
}

pub const BODY_LINKS: [&str; 4] = ["Calls", "Reads", "Writes", "Instantiates"];

pub fn body_rows(kb: &KnowledgeBase) -> Vec<Row> {
    rows(kb)
        .into_iter()
        .filter(|r| BODY_LINKS.contains(&r.0.as_str()) && r.3.is_some())
        .collect()
}

/// Body-link seqs per owner, sorted. Duplicates survive the sort, so a
/// strictly increasing result means every seq is distinct.
pub fn seqs_by_owner(kb: &KnowledgeBase) -> BTreeMap<String, Vec<u32>> {
    let mut m: BTreeMap<String, Vec<u32>> = BTreeMap::new();
    for r in body_rows(kb) {
        m.entry(r.1).or_default().push(r.3.unwrap());
    }
    m.values_mut().for_each(|v| v.sort_unstable());
    m
}

pub mod gen;
