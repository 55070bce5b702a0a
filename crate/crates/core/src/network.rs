//! Definition digraph and the core/subsense hierarchy.

use std::collections::{BTreeMap, HashSet};
use std::io::{self, BufRead, Write};

use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::Direction;
use serde::Serialize;
use thiserror::Error;

use crate::inventory::{core_of, Inventory, SenseKey};
use crate::preps::PrepositionList;
use crate::text::words;
use crate::tsv::{self, escape, unescape, TsvError};

pub const DEFINITIONS_HEADER: &str = "Preposition\tSense\tGloss";
pub const EDGES_HEADER: &str = "FromPrep\tFromSense\tToPrep\tEvidence";

/// A paraphrased gloss for one sense.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DefinitionRef {
    pub preposition: String,
    pub sense: SenseKey,
    pub gloss: String,
}

pub fn read_definitions<R: BufRead>(source: R) -> Result<Vec<DefinitionRef>, TsvError> {
    let lines = tsv::read_lines(source)?;
    let (_, rows) = tsv::split_table(lines, DEFINITIONS_HEADER)?;
    let mut seen = HashSet::new();
    rows.iter()
        .map(|line| {
            let n = line.number;
            let c = line.cells(3)?;
            let preposition = c[0].trim().to_string();
            if preposition.is_empty() {
                return Err(TsvError::row(n, "empty preposition"));
            }
            let sense: SenseKey = c[1].parse().map_err(|_| TsvError::row(n, format!("bad sense key {:?}", c[1])))?;
            let gloss = unescape(c[2], n)?;
            if gloss.trim().is_empty() {
                return Err(TsvError::row(n, "empty gloss"));
            }
            if !seen.insert((preposition.clone(), sense)) {
                return Err(TsvError::row(n, format!("{preposition} {sense} defined twice")));
            }
            Ok(DefinitionRef {
                preposition,
                sense,
                gloss,
            })
        })
        .collect()
}

/// Drops trailing punctuation and trailing parentheticals such as
/// "(someone)".
fn strip_tail(gloss: &str) -> &str {
    let mut s = gloss;
    loop {
        s = s.trim_end_matches(|c: char| !c.is_alphanumeric() && c != ')');
        if !s.ends_with(')') {
            return s;
        }
        let mut depth = 0usize;
        let mut open = None;
        for (i, c) in s.char_indices().rev() {
            match c {
                ')' => depth += 1,
                '(' => {
                    depth -= 1;
                    if depth == 0 {
                        open = Some(i);
                        break;
                    }
                }
                _ => {}
            }
        }
        s = match open {
            Some(i) => &s[..i],
            None => &s[..s.len() - 1],
        };
    }
}

/// The longest known preposition the gloss ends with, ignoring trailing
/// punctuation and a trailing parenthetical.
pub fn terminal_preposition(gloss: &str, preps: &PrepositionList) -> Option<String> {
    let ws = words(strip_tail(gloss));
    preps.longest_suffix(&ws).map(|(p, _)| p.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SenseNode {
    pub preposition: String,
    pub sense: SenseKey,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DigraphEdge {
    pub from: SenseNode,
    pub to_preposition: String,
    /// The terminal word(s) of the gloss that produced the edge.
    pub evidence: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SenseDigraph {
    pub nodes: Vec<SenseNode>,
    pub edges: Vec<DigraphEdge>,
}

/// A vertex of [`SenseDigraph::graph`]: a defined sense or a target preposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphNode<'a> {
    Sense(&'a SenseNode),
    Preposition(&'a str),
}

impl SenseDigraph {
    /// The digraph as a petgraph graph with edges weighted by evidence.
    pub fn graph(&self) -> (DiGraph<GraphNode<'_>, &str>, BTreeMap<&str, NodeIndex>) {
        let mut g = DiGraph::new();
        let mut senses = BTreeMap::new();
        for n in &self.nodes {
            senses.insert(n, g.add_node(GraphNode::Sense(n)));
        }
        let mut targets: BTreeMap<&str, NodeIndex> = BTreeMap::new();
        for e in &self.edges {
            let to = *targets
                .entry(e.to_preposition.as_str())
                .or_insert_with(|| g.add_node(GraphNode::Preposition(&e.to_preposition)));
            let from = *senses
                .entry(&e.from)
                .or_insert_with(|| g.add_node(GraphNode::Sense(&e.from)));
            g.add_edge(from, to, e.evidence.as_str());
        }
        (g, targets)
    }

    /// Number of edges into each preposition.
    pub fn in_degrees(&self) -> BTreeMap<&str, usize> {
        let (g, targets) = self.graph();
        targets
            .into_iter()
            .map(|(p, ix)| (p, g.edges_directed(ix, Direction::Incoming).count()))
            .collect()
    }
}

/// One node per definition and one edge per definition that ends in a
/// known preposition; both lists sorted.
pub fn build_digraph(defs: &[DefinitionRef], preps: &PrepositionList) -> SenseDigraph {
    let mut nodes = Vec::with_capacity(defs.len());
    let mut edges = Vec::new();
    for d in defs {
        let node = SenseNode {
            preposition: d.preposition.clone(),
            sense: d.sense,
        };
        if let Some(target) = terminal_preposition(&d.gloss, preps) {
            edges.push(DigraphEdge {
                from: node.clone(),
                evidence: target.clone(),
                to_preposition: target,
            });
        }
        nodes.push(node);
    }
    nodes.sort();
    edges.sort();
    SenseDigraph { nodes, edges }
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn write_dot<W: Write>(graph: &SenseDigraph, mut sink: W) -> io::Result<()> {
    let mut out = String::from("digraph prepositions {\n");
    for n in &graph.nodes {
        out.push_str(&format!(
            "  {} [label={}];\n",
            dot_quote(&format!("{} {}", n.preposition, n.sense)),
            dot_quote(&format!("{}\\n{}", n.preposition, n.sense))
        ));
    }
    let targets: std::collections::BTreeSet<&str> = graph.edges.iter().map(|e| e.to_preposition.as_str()).collect();
    for t in targets {
        out.push_str(&format!("  {} [shape=box];\n", dot_quote(t)));
    }
    for e in &graph.edges {
        out.push_str(&format!(
            "  {} -> {} [label={}];\n",
            dot_quote(&format!("{} {}", e.from.preposition, e.from.sense)),
            dot_quote(&e.to_preposition),
            dot_quote(&e.evidence)
        ));
    }
    out.push_str("}\n");
    sink.write_all(out.as_bytes())
}

pub fn write_edges<W: Write>(graph: &SenseDigraph, mut sink: W) -> io::Result<()> {
    let mut out = String::from(EDGES_HEADER);
    out.push('\n');
    for e in &graph.edges {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            escape(&e.from.preposition),
            e.from.sense,
            escape(&e.to_preposition),
            escape(&e.evidence)
        ));
    }
    sink.write_all(out.as_bytes())
}

/// A core sense with its subsenses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SenseTree {
    pub core: SenseKey,
    pub children: Vec<SenseKey>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("subsense {0} has no core sense in the inventory")]
    MissingCore(SenseKey),
}

/// Groups subsenses under their core senses, cores in inventory order.
pub fn hierarchy(inv: &Inventory) -> Result<Vec<SenseTree>, NetworkError> {
    let mut trees: Vec<SenseTree> = inv
        .senses()
        .iter()
        .filter(|s| s.key.ode.is_core())
        .map(|s| SenseTree {
            core: s.key,
            children: Vec::new(),
        })
        .collect();
    for s in inv.senses().iter().filter(|s| !s.key.ode.is_core()) {
        let core = core_of(&s.key);
        let tree = trees
            .iter_mut()
            .find(|t| t.core.ode == core)
            .ok_or(NetworkError::MissingCore(s.key))?;
        tree.children.push(s.key);
    }
    Ok(trees)
}

/// `Core\tSubsenses`, subsenses joined with ", ".
pub fn write_hierarchy<W: Write>(trees: &[SenseTree], mut sink: W) -> io::Result<()> {
    let mut out = String::from("Core\tSubsenses\n");
    for t in trees {
        let kids: Vec<String> = t.children.iter().map(SenseKey::to_string).collect();
        out.push_str(&format!("{}\t{}\n", t.core, kids.join(", ")));
    }
    sink.write_all(out.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inventory::load_inventory;

    fn preps() -> PrepositionList {
        PrepositionList::new(["by", "of", "out of", "on top of", "through", "out", "near"])
    }

    #[test]
    fn terminal_words() {
        let p = preps();
        assert_eq!(terminal_preposition("carried out or achieved by", &p).as_deref(), Some("by"));
        assert_eq!(terminal_preposition("a happy event", &p), None);
        assert_eq!(terminal_preposition("moving out of", &p).as_deref(), Some("out of"));
        assert_eq!(terminal_preposition("resting on top of (something).", &p).as_deref(), Some("on top of"));
        assert_eq!(terminal_preposition("made by (someone (else));  ", &p).as_deref(), Some("by"));
        assert_eq!(terminal_preposition("", &p), None);
        assert_eq!(terminal_preposition("(by)", &p), None);
    }

    #[test]
    fn digraph_counts() {
        let defs: Vec<DefinitionRef> = ["supported by", "as measured by.", "a place", "in spite of", "a time", "led by (someone)"]
            .iter()
            .enumerate()
            .map(|(i, g)| DefinitionRef {
                preposition: "x".into(),
                sense: SenseKey::new(i as u32 + 1, crate::inventory::OdeKey::core(i as u32 + 1)),
                gloss: g.to_string(),
            })
            .collect();
        let g = build_digraph(&defs, &preps());
        assert_eq!(g.nodes.len(), 6);
        assert_eq!(g.in_degrees()["by"], 3);
        assert_eq!(g.edges.len(), 4);
        let mut dot = Vec::new();
        write_dot(&g, &mut dot).unwrap();
        assert_eq!(String::from_utf8(dot).unwrap().matches("->").count(), 4);
        assert!(build_digraph(&[], &preps()).edges.is_empty());
    }

    #[test]
    fn core_hierarchy() {
        let src = "Sense\tRelationName\tQuirkSyntax\tQuirkParagraphs\tComplementProperties\tAttachmentProperties\tSimilarPreps\tComplementCats\tAttachmentCats\tOrigin
1 (1)\tA\t1\tNone\t\t\t\t\t\timported
2 (1a)\tB\t1\tNone\t\t\t\t\t\timported
3 (2)\tC\t1\tNone\t\t\t\t\t\timported
4 (1b)\tD\t1\tNone\t\t\t\t\t\timported
";
        let inv = load_inventory(src.as_bytes(), "p").unwrap();
        let h = hierarchy(&inv).unwrap();
        assert_eq!(h.len(), 2);
        let kids: Vec<String> = h[0].children.iter().map(|k| k.to_string()).collect();
        assert_eq!(kids, ["2 (1a)", "4 (1b)"]);
        let orphan = src.replace("1 (1)\tA", "1 (7)\tA");
        let inv = load_inventory(orphan.as_bytes(), "p").unwrap();
        assert!(matches!(hierarchy(&inv), Err(NetworkError::MissingCore(_))));
    }
}
