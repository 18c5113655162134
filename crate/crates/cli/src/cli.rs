//! `tracer` subcommands. [`run_cli`] returns the exit code and captured
//! output so the binary and the tests share one code path.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use tracer_core::extract::extract;
use tracer_core::ir::{emit_ir, IrDocument};
use tracer_core::kb::KnowledgeBase;
use tracer_core::pipeline::source_to_ir;
use tracer_core::query::{self, NodeKind, Selection, TraceTreeNode};

use crate::service::{split_id_list, visible_json};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "tracer", about = "Extract and query code traceability knowledge bases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse C# sources and write a knowledge base.
    Extract {
        /// Source files or directories (searched for *.cs).
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Also write one IR file per source into this directory.
        #[arg(long)]
        ir_dir: Option<PathBuf>,
    },
    /// Write the IR of one source file.
    Ir {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the objects visible from a selection, grouped by type.
    Query {
        #[arg(long)]
        kb: PathBuf,
        /// Comma separated object ids.
        #[arg(long)]
        check: String,
        #[arg(long)]
        link_types: Option<String>,
        #[arg(long)]
        max_depth: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print a trace tree rooted at an object.
    Tree {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        root: String,
        #[arg(long, default_value_t = 3)]
        depth: u32,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long, default_value_t = 7130)]
        port: u16,
        /// Directory of static files served outside /api.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// An input failure: exit code 2 with these diagnostics.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Result<T> = std::result::Result<T, InputError>;

pub fn run_cli<I, S>(args: I) -> CliOutput
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                CliOutput { code, stdout: text, stderr: String::new() }
            } else {
                CliOutput { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let mut out = String::new();
    let result = match cli.command {
        Command::Extract { paths, out: dest, ir_dir } => cmd_extract(&paths, &dest, ir_dir.as_deref()),
        Command::Ir { file, out: dest } => cmd_ir(&file, &dest),
        Command::Query { kb, check, link_types, max_depth, format } => {
            cmd_query(&kb, &check, link_types.as_deref(), max_depth, format).map(|s| out = s)
        }
        Command::Tree { kb, root, depth } => cmd_tree(&kb, &root, depth).map(|s| out = s),
        Command::Serve { kb, port, static_dir } => crate::server::run(&kb, port, static_dir).map_err(InputError),
    };
    match result {
        Ok(()) => CliOutput { code: EXIT_OK, stdout: out, stderr: String::new() },
        Err(InputError(msg)) => CliOutput {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("{msg}\n"),
        },
    }
}

/// Source files under `paths`, in sorted order.
fn source_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            for entry in walkdir::WalkDir::new(p) {
                let entry = entry?;
                if entry.file_type().is_file() && entry.path().extension().is_some_and(|e| e == "cs") {
                    files.push(entry.into_path());
                }
            }
        } else if p.exists() {
            files.push(p.clone());
        } else {
            return Err(InputError(format!("{}: no such file", p.display())));
        }
    }
    files.sort();
    files.dedup();
    Ok(files)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn path_label(p: &Path) -> String {
    p.to_string_lossy().replace('\\', "/")
}

fn load_source(path: &Path) -> Result<IrDocument> {
    Ok(source_to_ir(&path_label(path), &read(path)?)?)
}

fn cmd_extract(paths: &[PathBuf], dest: &Path, ir_dir: Option<&Path>) -> Result<()> {
    let files = source_files(paths)?;
    let mut docs = Vec::new();
    let mut errors = Vec::new();
    for f in &files {
        match load_source(f) {
            Ok(d) => docs.push(d),
            Err(InputError(e)) => errors.push(e),
        }
    }
    if !errors.is_empty() {
        return Err(InputError(errors.join("\n")));
    }
    if let Some(dir) = ir_dir {
        std::fs::create_dir_all(dir).map_err(|e| InputError(format!("{}: {e}", dir.display())))?;
        for d in &docs {
            let name = d.file_path.trim_start_matches("./").replace(['/', ':'], "_");
            write(&dir.join(format!("{name}.xml")), &emit_ir(&d.tree, &d.file_path))?;
        }
    }
    write(dest, &extract(&docs).to_xml())
}

fn cmd_ir(file: &Path, dest: &Path) -> Result<()> {
    let doc = load_source(file)?;
    write(dest, &doc.to_xml())
}

fn load_kb(path: &Path) -> Result<KnowledgeBase> {
    KnowledgeBase::from_xml(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

/// The selection `tracer query` builds from its arguments.
pub fn selection_from_args(check: &str, link_types: Option<&str>, max_depth: Option<u32>) -> Selection {
    Selection {
        checked_ids: split_id_list(check).into_iter().collect(),
        enabled_link_types: link_types.map(|l| split_id_list(l).into_iter().collect::<BTreeSet<_>>()),
        max_depth,
    }
}

fn cmd_query(kb_path: &Path, check: &str, link_types: Option<&str>, max_depth: Option<u32>, format: Format) -> Result<String> {
    let kb = load_kb(kb_path)?;
    let visible = query::visible_set(&kb, &selection_from_args(check, link_types, max_depth))?;
    Ok(match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&visible_json(&visible))?),
        Format::Text => {
            let mut s = String::new();
            for t in kb.types() {
                let ids = &visible[&t.id];
                if ids.is_empty() {
                    continue;
                }
                let _ = writeln!(s, "{}:", t.id);
                for id in ids {
                    let _ = writeln!(s, "  {id}");
                }
            }
            s
        }
    })
}

fn node_line(n: &TraceTreeNode) -> String {
    let mut line = n.label.clone();
    let body_entry = matches!(n.node_kind, NodeKind::CallEntry | NodeKind::UseEntry | NodeKind::NewEntry);
    if let Some(seq) = n.seq.filter(|_| body_entry) {
        line = format!("{seq}. {line}");
    }
    if n.cyclic {
        line.push_str(" (cyclic)");
    }
    line
}

fn cmd_tree(kb_path: &Path, root: &str, depth: u32) -> Result<String> {
    let kb = load_kb(kb_path)?;
    let obj = kb
        .object(root)
        .ok_or_else(|| InputError(format!("unknown object {root:?}")))?;
    let mut out = format!("{} {}\n", obj.type_id, obj.name);
    let mut path = vec![root.to_string()];
    if depth > 0 && !obj.external {
        tree_lines(&kb, &mut path, depth, &mut out)?;
    }
    Ok(out)
}

fn tree_lines(kb: &KnowledgeBase, path: &mut Vec<String>, depth: u32, out: &mut String) -> Result<()> {
    let nodes = query::expand(kb, path)?;
    let indent = "  ".repeat(path.len());
    for n in nodes {
        let _ = writeln!(out, "{indent}{}", node_line(&n));
        if n.expandable && (path.len() as u32) < depth {
            path.push(n.object_id.clone().expect("expandable nodes have ids"));
            tree_lines(kb, path, depth, out)?;
            path.pop();
        }
    }
    Ok(())
}
