//! Seeded generators and brute-force oracles shared by the test suites.
//!
//! Nothing here calls the validation rules or the text format to decide
//! what the right answer is; the checks are written against the raw model.

use std::collections::BTreeMap;
use std::hash::{DefaultHasher, Hash, Hasher};

use qualibd_core::export::to_json;
use qualibd_core::geometry::Rect;
use qualibd_core::{
    AttributeValueKind, EdgeEnd, EdgeKind, EditCommand, Editor, ElementRef, Model, NodeId, NodeKind,
};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub mod dot;

pub type TestRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Legal (link, source, target) triples, restated from the language
/// definition rather than read from the library.
pub const LEGAL: [(EdgeKind, NodeKind, NodeKind); 12] = {
    use EdgeKind::*;
    use NodeKind::*;
    [
        (AssociationLink, Goal, BigDataCharacteristic),
        (AssociationLink, Goal, NfrSoftgoal),
        (PermutationLink, BigDataCharacteristic, Permutation),
        (PermutationLink, NfrSoftgoal, Permutation),
        (DecompositionLink, Goal, Goal),
        (DecompositionLink, NfrSoftgoal, NfrSoftgoal),
        (
            DecompositionLink,
            OperationalizingSoftgoal,
            OperationalizingSoftgoal,
        ),
        (DecompositionLink, Permutation, Permutation),
        (ContributionLink, OperationalizingSoftgoal, Permutation),
        (ContributionLink, OperationalizingSoftgoal, NfrSoftgoal),
        (ContributionLink, OperationalizingSoftgoal, Goal),
        (ArgumentationLink, ClaimSoftgoal, OperationalizingSoftgoal),
    ]
};

pub const TOP_LEVEL_KINDS: [NodeKind; 6] = [
    NodeKind::Goal,
    NodeKind::NfrSoftgoal,
    NodeKind::BigDataCharacteristic,
    NodeKind::Permutation,
    NodeKind::OperationalizingSoftgoal,
    NodeKind::ClaimSoftgoal,
];

const WORDS: [&str; 12] = [
    "Velocity",
    "Latency",
    "ingest",
    "store",
    "Volume",
    "privacy",
    "scale out",
    "cache",
    "throughput",
    "Veracity",
    "batch",
    "stream",
];
const ODD: [&str; 8] = ["\"", "\\", "\n", "\t", "é", "→", "{", "#"];

/// A short printable name, sometimes carrying characters that need escaping.
pub fn random_name(rng: &mut TestRng) -> String {
    let mut name = WORDS.choose(rng).unwrap().to_string();
    if rng.random_bool(0.3) {
        name.push(' ');
        name.push_str(WORDS.choose(rng).unwrap());
    }
    if rng.random_bool(0.2) {
        let at = rng.random_range(0..=name.len());
        if name.is_char_boundary(at) {
            name.insert_str(at, ODD.choose(rng).unwrap());
        }
    }
    name
}

fn maybe_name(rng: &mut TestRng) -> Option<String> {
    match rng.random_range(0..10) {
        0 => None,
        1 => Some(String::new()),
        _ => Some(random_name(rng)),
    }
}

fn nodes_of(model: &Model, kind: NodeKind) -> Vec<NodeId> {
    model
        .nodes()
        .filter(|n| n.kind == kind)
        .map(|n| n.id)
        .collect()
}

fn any_node(rng: &mut TestRng, model: &Model) -> NodeId {
    let ids: Vec<NodeId> = model.nodes().map(|n| n.id).collect();
    if ids.is_empty() || rng.random_bool(0.03) {
        NodeId(rng.random_range(1..10_000))
    } else {
        *ids.choose(rng).unwrap()
    }
}

fn random_rect(rng: &mut TestRng) -> Rect {
    Rect::new(
        rng.random_range(0..60) as f64 * 20.0,
        rng.random_range(0..40) as f64 * 20.0,
        rng.random_range(4..12) as f64 * 20.0,
        rng.random_range(2..6) as f64 * 20.0,
    )
}

/// An edge command, legal by kind most of the time.
pub fn random_edge_command(rng: &mut TestRng, model: &Model) -> EditCommand {
    let candidates: Vec<(EdgeKind, NodeId, NodeId)> = LEGAL
        .iter()
        .flat_map(|&(kind, from_kind, to_kind)| {
            let froms = nodes_of(model, from_kind);
            let tos = nodes_of(model, to_kind);
            froms
                .into_iter()
                .flat_map(move |f| tos.clone().into_iter().map(move |t| (kind, f, t)))
        })
        .collect();
    let (kind, from, to) = match candidates.choose(rng) {
        Some(&c) if rng.random_bool(0.8) => c,
        _ => (
            *EdgeKind::ALL.choose(rng).unwrap(),
            any_node(rng, model),
            any_node(rng, model),
        ),
    };
    let label = (kind == EdgeKind::ContributionLink && rng.random_bool(0.5)).then(|| {
        ["help", "hurt", "make", "break", "some+"]
            .choose(rng)
            .unwrap()
            .to_string()
    });
    EditCommand::CreateEdge {
        kind,
        from,
        to,
        label,
    }
}

/// One command against the current state of `model`. Mostly valid, with a
/// share of commands that must be refused.
pub fn random_command(rng: &mut TestRng, model: &Model) -> EditCommand {
    let edges: Vec<_> = model.edges().map(|e| e.id).collect();
    match rng.random_range(0..100) {
        0..25 => {
            let kind = *TOP_LEVEL_KINDS.choose(rng).unwrap();
            EditCommand::CreateNode {
                kind,
                name: maybe_name(rng),
                owner: None,
                attr_kind: None,
                attr_value: None,
            }
        }
        25..55 => random_edge_command(rng, model),
        55..62 => {
            let target = if !edges.is_empty() && rng.random_bool(0.2) {
                ElementRef::Edge(*edges.choose(rng).unwrap())
            } else {
                ElementRef::Node(any_node(rng, model))
            };
            EditCommand::SetLabel {
                target,
                name: maybe_name(rng).unwrap_or_default(),
            }
        }
        62..68 => match edges.choose(rng) {
            Some(&edge) => EditCommand::ReconnectEdge {
                edge,
                end: if rng.random_bool(0.5) {
                    EdgeEnd::Source
                } else {
                    EdgeEnd::Target
                },
                node: any_node(rng, model),
            },
            None => EditCommand::Undo,
        },
        68..76 => {
            let target = match edges.choose(rng) {
                Some(&e) if rng.random_bool(0.4) => ElementRef::Edge(e),
                _ => ElementRef::Node(any_node(rng, model)),
            };
            EditCommand::Delete { target }
        }
        76..84 => {
            let permutation = match nodes_of(model, NodeKind::Permutation).choose(rng) {
                Some(&p) if rng.random_bool(0.9) => p,
                _ => any_node(rng, model),
            };
            let value_kind = if rng.random_bool(0.5) {
                AttributeValueKind::Quantitative
            } else {
                AttributeValueKind::Qualitative
            };
            EditCommand::AddPermutationAttribute {
                permutation,
                name: maybe_name(rng),
                value_kind,
                value: rng
                    .random_bool(0.5)
                    .then(|| rng.random_range(1..500).to_string()),
            }
        }
        84..90 => EditCommand::MoveNode {
            node: any_node(rng, model),
            rect: random_rect(rng),
        },
        90..97 => EditCommand::Undo,
        _ => EditCommand::Redo,
    }
}

/// A model built by replaying `steps` random commands, so it satisfies
/// every invariant the editor maintains.
pub fn random_model(rng: &mut TestRng, steps: usize) -> Model {
    let mut editor = Editor::new(Model::new("generated", random_name(rng)));
    for _ in 0..steps {
        let command = random_command(rng, editor.model());
        editor.apply(command);
    }
    editor.into_model()
}

/// A model with known numbers of label and connection defects.
pub struct Seeded {
    pub model: Model,
    pub unnamed: Vec<NodeId>,
    pub isolated: Vec<NodeId>,
}

fn must_node(editor: &mut Editor, kind: NodeKind, name: Option<String>) -> NodeId {
    editor
        .create_node(kind, name, None)
        .created_node()
        .expect("node creation cannot fail")
}

fn must_edge(editor: &mut Editor, kind: EdgeKind, from: NodeId, to: NodeId) {
    let outcome = editor.create_edge(kind, from, to);
    assert!(outcome.is_applied(), "{kind} {from}->{to}: {outcome:?}");
}

/// Builds a named, fully connected model of `clusters` goal trees, then
/// adds `k` nodes without a usable label (each still connected) and `m`
/// named nodes with no link at all.
pub fn model_with_defects(rng: &mut TestRng, clusters: usize, k: usize, m: usize) -> Seeded {
    use EdgeKind::*;
    use NodeKind::*;
    let mut ed = Editor::new(Model::new("seeded", "seeded"));
    let mut goals = Vec::new();
    let mut characteristics = Vec::new();
    let mut softgoals = Vec::new();
    let mut permutations = Vec::new();
    let mut ops = Vec::new();
    for _ in 0..clusters.max(1) {
        let g = must_node(&mut ed, Goal, Some(random_name(rng)));
        let c = must_node(&mut ed, BigDataCharacteristic, Some(random_name(rng)));
        let s = must_node(&mut ed, NfrSoftgoal, Some(random_name(rng)));
        let p = must_node(&mut ed, Permutation, Some(random_name(rng)));
        let o = must_node(&mut ed, OperationalizingSoftgoal, Some(random_name(rng)));
        let claim = must_node(&mut ed, ClaimSoftgoal, Some(random_name(rng)));
        must_edge(&mut ed, AssociationLink, g, c);
        must_edge(&mut ed, AssociationLink, g, s);
        must_edge(&mut ed, PermutationLink, c, p);
        must_edge(&mut ed, PermutationLink, s, p);
        must_edge(&mut ed, ContributionLink, o, p);
        must_edge(&mut ed, ArgumentationLink, claim, o);
        for _ in 0..rng.random_range(0..3) {
            ed.add_permutation_attribute(
                p,
                Some(random_name(rng)),
                AttributeValueKind::Quantitative,
                Some(rng.random_range(1..100).to_string()),
            );
        }
        goals.push(g);
        characteristics.push(c);
        softgoals.push(s);
        permutations.push(p);
        ops.push(o);
    }
    // Extra cross-cluster links; refusals are fine.
    for _ in 0..clusters {
        let command = random_edge_command(rng, ed.model());
        ed.apply(command);
    }

    let blank = |rng: &mut TestRng| -> Option<String> {
        [None, Some(String::new()), Some("  \t ".to_owned())]
            .choose(rng)
            .unwrap()
            .clone()
    };
    let mut unnamed = Vec::new();
    for _ in 0..k {
        let name = blank(rng);
        let id = match rng.random_range(0..7) {
            0 => {
                let id = must_node(&mut ed, Goal, name);
                must_edge(&mut ed, DecompositionLink, *goals.choose(rng).unwrap(), id);
                id
            }
            1 => {
                let id = must_node(&mut ed, BigDataCharacteristic, name);
                must_edge(&mut ed, AssociationLink, *goals.choose(rng).unwrap(), id);
                id
            }
            2 => {
                let id = must_node(&mut ed, NfrSoftgoal, name);
                must_edge(&mut ed, AssociationLink, *goals.choose(rng).unwrap(), id);
                id
            }
            3 => {
                let id = must_node(&mut ed, Permutation, name);
                must_edge(
                    &mut ed,
                    PermutationLink,
                    *characteristics.choose(rng).unwrap(),
                    id,
                );
                id
            }
            4 => {
                let id = must_node(&mut ed, OperationalizingSoftgoal, name);
                must_edge(
                    &mut ed,
                    ContributionLink,
                    id,
                    *softgoals.choose(rng).unwrap(),
                );
                id
            }
            5 => {
                let id = must_node(&mut ed, ClaimSoftgoal, name);
                must_edge(&mut ed, ArgumentationLink, id, *ops.choose(rng).unwrap());
                id
            }
            _ => ed
                .add_permutation_attribute(
                    *permutations.choose(rng).unwrap(),
                    name,
                    AttributeValueKind::Qualitative,
                    None,
                )
                .created_node()
                .expect("owner is a permutation"),
        };
        unnamed.push(id);
    }
    let mut isolated = Vec::new();
    for _ in 0..m {
        let kind = *TOP_LEVEL_KINDS.choose(rng).unwrap();
        isolated.push(must_node(&mut ed, kind, Some(random_name(rng))));
    }
    Seeded {
        model: ed.into_model(),
        unnamed,
        isolated,
    }
}

/// Stable fingerprint of the whole document, revision included.
pub fn model_hash(model: &Model) -> u64 {
    let mut hasher = DefaultHasher::new();
    to_json(model).hash(&mut hasher);
    hasher.finish()
}

/// Every ordered node pair joined by more than one edge, by exhaustive
/// pairwise comparison.
pub fn duplicate_pairs(model: &Model) -> Vec<(NodeId, NodeId)> {
    let edges: Vec<_> = model.edges().collect();
    let mut out = Vec::new();
    for (i, a) in edges.iter().enumerate() {
        for b in &edges[i + 1..] {
            if a.from == b.from && a.to == b.to && !out.contains(&(a.from, a.to)) {
                out.push((a.from, a.to));
            }
        }
    }
    out
}

/// Nodes with no name or a name made only of whitespace.
pub fn count_blank_labels(model: &Model) -> usize {
    model
        .nodes()
        .filter(|n| match &n.name {
            None => true,
            Some(name) => name.chars().all(char::is_whitespace),
        })
        .count()
}

/// Non-attribute nodes that appear at neither end of any edge.
pub fn count_isolated(model: &Model) -> usize {
    let edges: Vec<_> = model.edges().collect();
    model
        .nodes()
        .filter(|n| n.kind != NodeKind::PermutationAttribute)
        .filter(|n| !edges.iter().any(|e| e.from == n.id || e.to == n.id))
        .count()
}

/// Parses `text` as XML and checks the root is an SVG element.
pub fn check_svg(text: &str) -> Result<(), String> {
    let doc = roxmltree::Document::parse(text).map_err(|e| e.to_string())?;
    let root = doc.root_element();
    if root.tag_name().name() != "svg" {
        return Err(format!("root element is <{}>", root.tag_name().name()));
    }
    Ok(())
}

pub type CanonicalAttribute = (AttributeValueKind, Option<String>, Option<String>);

/// A model reduced to what survives the text format: names, kinds,
/// attributes and links, with nodes renumbered by declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonical {
    pub name: String,
    pub nodes: Vec<(NodeKind, Option<String>, Vec<CanonicalAttribute>)>,
    pub edges: Vec<(EdgeKind, usize, usize, Option<String>)>,
}

fn rank(kind: NodeKind) -> u8 {
    match kind {
        NodeKind::Goal => 0,
        NodeKind::BigDataCharacteristic => 1,
        NodeKind::NfrSoftgoal => 2,
        NodeKind::Permutation => 3,
        NodeKind::OperationalizingSoftgoal => 4,
        NodeKind::ClaimSoftgoal => 5,
        NodeKind::PermutationAttribute => 6,
    }
}

pub fn canonical(model: &Model) -> Canonical {
    let mut top: Vec<_> = model
        .nodes()
        .filter(|n| n.kind != NodeKind::PermutationAttribute)
        .collect();
    top.sort_by_key(|n| (rank(n.kind), n.id));
    let index: BTreeMap<NodeId, usize> = top.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
    let nodes = top
        .iter()
        .map(|n| {
            let attrs = model
                .nodes()
                .filter(|a| a.owner == Some(n.id))
                .map(|a| {
                    (
                        a.attr_value_kind.unwrap(),
                        a.name.clone(),
                        a.attr_value.clone(),
                    )
                })
                .collect();
            (n.kind, n.name.clone(), attrs)
        })
        .collect();
    let mut edges: Vec<_> = model
        .edges()
        .map(|e| (e.kind, index[&e.from], index[&e.to], e.label.clone()))
        .collect();
    edges.sort();
    Canonical {
        name: model.name().to_owned(),
        nodes,
        edges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let a = random_model(&mut seeded(7), 60);
        let b = random_model(&mut seeded(7), 60);
        assert_eq!(a, b);
        assert!(a.node_count() > 0);
    }

    #[test]
    fn seeded_defects_are_counted_by_construction() {
        let mut rng = seeded(3);
        let s = model_with_defects(&mut rng, 3, 4, 2);
        assert_eq!(count_blank_labels(&s.model), 4);
        assert_eq!(count_isolated(&s.model), 2);
        assert_eq!(s.unnamed.len(), 4);
    }

    #[test]
    fn svg_check_rejects_broken_xml() {
        assert!(check_svg("<svg><g></svg>").is_err());
        assert!(check_svg("<html/>").is_err());
        assert!(check_svg("<svg xmlns=\"http://www.w3.org/2000/svg\"/>").is_ok());
    }
}
