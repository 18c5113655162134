//! Random inputs and independent oracles shared by property tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tracer_core::kb::{links, types, Accessibility, KnowledgeBase};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const OBJECT_TYPES: [&str; 8] = [
    types::NAMESPACE,
    types::CLASS,
    types::CONSTRUCTOR,
    types::METHOD,
    types::PROPERTY,
    types::VARIABLE,
    types::DELEGATE,
    types::EVENT,
];

const LINK_TYPES: [&str; 7] = [
    links::CALLS,
    links::READS,
    links::WRITES,
    links::INSTANTIATES,
    links::HAS_PARAMETER,
    links::TYPE_OF,
    links::RELATED,
];

/// A KB with up to `max_objects` objects and `max_links` links of random
/// types. Containment is left out so every generated link is accepted.
pub fn random_kb(seed: u64, max_objects: usize, max_links: usize) -> KnowledgeBase {
    let mut r = rng(seed);
    let mut kb = KnowledgeBase::new();
    let n = r.random_range(1..=max_objects);
    for i in 0..n {
        let t = OBJECT_TYPES.choose(&mut r).unwrap();
        kb.add_object(t, &format!("o{i}"), &format!("n{i}"), Accessibility::Public, r.random_bool(0.1))
            .unwrap();
    }
    let m = r.random_range(0..=max_links);
    for _ in 0..m {
        let t = LINK_TYPES.choose(&mut r).unwrap();
        let p = format!("o{}", r.random_range(0..n));
        let c = format!("o{}", r.random_range(0..n));
        let seq = if r.random_bool(0.5) { Some(r.random_range(1..50)) } else { None };
        let _ = kb.add_link(t, &p, &c, seq);
    }
    kb
}

pub fn random_link_filter(r: &mut ChaCha8Rng) -> Option<BTreeSet<String>> {
    if r.random_bool(0.3) {
        return None;
    }
    let mut all: Vec<String> = LINK_TYPES.iter().map(|s| s.to_string()).collect();
    all.push(links::CONTAINS.to_string());
    Some(all.into_iter().filter(|_| r.random_bool(0.5)).collect())
}

/// Visible objects by repeated neighbourhood growth over an adjacency
/// matrix built from the raw link list.
pub fn closure_oracle(
    kb: &KnowledgeBase,
    checked: &BTreeSet<String>,
    enabled: Option<&BTreeSet<String>>,
    max_depth: Option<u32>,
) -> BTreeMap<String, BTreeSet<String>> {
    let ids: Vec<String> = kb.objects().map(|o| o.id.clone()).collect();
    let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let n = ids.len();
    let mut adj = vec![vec![false; n]; n];
    for l in kb.links() {
        if enabled.is_some_and(|e| !e.contains(&l.link_type)) {
            continue;
        }
        let (a, b) = (index[l.parent.as_str()], index[l.child.as_str()]);
        adj[a][b] = true;
        adj[b][a] = true;
    }
    let mut on: Vec<bool> = ids.iter().map(|id| checked.is_empty() || checked.contains(id)).collect();
    let rounds = if checked.is_empty() { 0 } else { max_depth.map_or(n, |d| d as usize) };
    for _ in 0..rounds {
        let prev = on.clone();
        for i in 0..n {
            if !prev[i] {
                on[i] = (0..n).any(|j| prev[j] && adj[j][i]);
            }
        }
        if on == prev {
            break;
        }
    }
    let mut out: BTreeMap<String, BTreeSet<String>> = kb.types().iter().map(|t| (t.id.clone(), BTreeSet::new())).collect();
    for (i, id) in ids.iter().enumerate() {
        if on[i] {
            let t = &kb.object(id).unwrap().type_id;
            out.get_mut(t).unwrap().insert(id.clone());
        }
    }
    out
}

/// Source for a class whose methods form an acyclic call graph with
/// same-name overloads of different arity.
pub fn overload_file(seed: u64) -> String {
    let mut r = rng(seed);
    let names = ["Run", "Step", "Draw", "Load"];
    let fields = ["a", "b", "c"];
    // (name, arity) in declaration order; calls only go to later entries.
    let mut methods: Vec<(String, usize)> = Vec::new();
    for name in names.iter().take(r.random_range(2..=names.len())) {
        let mut arities: Vec<usize> = (0..4).collect();
        arities.retain(|_| r.random_bool(0.6));
        if arities.is_empty() {
            arities.push(1);
        }
        for a in arities {
            methods.push((name.to_string(), a));
        }
    }
    let mut src = format!("namespace Gen{seed}\n{{\n    public class K\n    {{\n");
    for f in fields {
        src.push_str(&format!("        private int {f};\n"));
    }
    for (i, (name, arity)) in methods.iter().enumerate() {
        let params: Vec<String> = (0..*arity).map(|k| format!("int p{k}")).collect();
        src.push_str(&format!("        public void {name}({})\n        {{\n", params.join(", ")));
        for _ in 0..r.random_range(1..5) {
            let later = &methods[i + 1..];
            if !later.is_empty() && r.random_bool(0.6) {
                let (callee, ca) = later.choose(&mut r).unwrap();
                let args: Vec<String> = (0..*ca).map(|_| fields.choose(&mut r).unwrap().to_string()).collect();
                src.push_str(&format!("            {callee}({});\n", args.join(", ")));
            } else {
                let f = fields.choose(&mut r).unwrap();
                let g = fields.choose(&mut r).unwrap();
                src.push_str(&format!("            {f} = {g} + 1;\n"));
            }
        }
        src.push_str("        }\n");
    }
    src.push_str("    }\n}\n");
    src
}

/// A list of random statements over a small name pool.
pub fn random_statements(seed: u64) -> Vec<String> {
    let mut r = rng(seed);
    let vars = ["x", "y", "total", "m_drag_curve", "rd"];
    let mut out = Vec::new();
    for i in 0..r.random_range(1..8) {
        let v = *vars.choose(&mut r).unwrap();
        let w = *vars.choose(&mut r).unwrap();
        let s = match r.random_range(0..8) {
            0 => format!("{v} = {w};"),
            1 => format!("{v} += {w} * 2;"),
            2 => format!("{v}++;"),
            3 => format!("Go({v}, {w});"),
            4 => format!("{v}.Render({w});"),
            5 => format!("int local{i} = {v} + {w};"),
            6 => format!("{v} = new Curve({w});"),
            _ => format!("while ({v} > 0) {{ {v}--; }}"),
        };
        out.push(s);
    }
    out
}
