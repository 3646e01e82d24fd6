//! Graphviz output. Ranks are drawn as clusters from rank ℓ on the left to
//! rank 0 on the right; parallel edges are merged into one labeled edge.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::record::AutomatonRecord;
use crate::bitmap::Alphabet;

#[derive(Clone, Copy, Debug, Default)]
pub struct DotOptions {
    /// Draw the dead state and the edges into it.
    pub show_dead: bool,
}

pub fn to_dot(record: &AutomatonRecord, options: DotOptions) -> String {
    let alphabet = Alphabet::new(record.k.max(1)).expect("k >= 1");
    let skip = |id: usize| !options.show_dead && record.dead == Some(id);
    let mut out = String::new();
    out.push_str("digraph A {\n  rankdir=LR;\n  node [shape=circle];\n");
    let _ = writeln!(out, "  start [shape=point];\n  start -> q{};", record.initial);

    let mut by_rank: BTreeMap<std::cmp::Reverse<usize>, Vec<usize>> = BTreeMap::new();
    let mut unranked = Vec::new();
    for s in &record.states {
        if skip(s.id) {
            continue;
        }
        match s.rank {
            Some(r) => by_rank.entry(std::cmp::Reverse(r)).or_default().push(s.id),
            None => unranked.push(s.id),
        }
    }
    let shape = |id: usize| {
        if record.states.iter().any(|s| s.id == id && s.is_final) {
            "doublecircle"
        } else {
            "circle"
        }
    };
    for (std::cmp::Reverse(r), ids) in &by_rank {
        let _ = writeln!(out, "  subgraph cluster_rank{r} {{\n    label=\"rank {r}\";\n    rank=same;");
        for &id in ids {
            let _ = writeln!(out, "    q{id} [label=\"{id}\", shape={}];", shape(id));
        }
        out.push_str("  }\n");
    }
    for id in unranked {
        let label = if record.dead == Some(id) {
            "Ω".to_string()
        } else {
            id.to_string()
        };
        let _ = writeln!(out, "  q{id} [label=\"{label}\", shape={}];", shape(id));
    }

    let mut edges: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for &[from, sym, to] in &record.transitions {
        if skip(from) || skip(to) {
            continue;
        }
        edges.entry((from, to)).or_default().push(sym);
    }
    for ((from, to), mut syms) in edges {
        syms.sort_unstable();
        let label: Vec<String> = syms.iter().map(|&s| alphabet.glyph(s)).collect();
        let _ = writeln!(out, "  q{from} -> q{to} [label=\"{}\"];", label.join(","));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::record::StateRecord;

    fn sample() -> AutomatonRecord {
        // {aa, ab} with a dead state
        AutomatonRecord {
            k: 2,
            ell: Some(2),
            states: vec![
                StateRecord { id: 0, rank: Some(2), is_final: false },
                StateRecord { id: 1, rank: Some(1), is_final: false },
                StateRecord { id: 2, rank: Some(0), is_final: true },
                StateRecord { id: 3, rank: None, is_final: false },
            ],
            initial: 0,
            dead: Some(3),
            transitions: vec![[0, 0, 1], [0, 1, 3], [1, 0, 2], [1, 1, 2], [3, 0, 3], [3, 1, 3]],
        }
    }

    #[test]
    fn dead_state_hidden_by_default() {
        let dot = to_dot(&sample(), DotOptions::default());
        assert!(!dot.contains("q3"));
        assert!(dot.contains("q1 -> q2 [label=\"a,b\"]"));
        let r2 = dot.find("cluster_rank2").unwrap();
        let r0 = dot.find("cluster_rank0").unwrap();
        assert!(r2 < r0);
    }

    #[test]
    fn dead_state_shown_on_request() {
        let dot = to_dot(&sample(), DotOptions { show_dead: true });
        assert!(dot.contains("q3 [label=\"Ω\""));
        assert!(dot.contains("q0 -> q3 [label=\"b\"]"));
    }
}
