//! Deterministic tiered layout.
//!
//! Goals sit on tier 0, characteristics and soft-goals on tier 1,
//! permutations on tier 2, operationalizations on tier 3 and claims on tier
//! 4. Stored geometry wins over the computed slot; computed boxes are pushed
//! right past any stored box they would overlap.

use std::collections::BTreeMap;

use crate::geometry::{attribute_slots, permutation_height, Rect, NODE_HEIGHT, NODE_WIDTH};
use crate::metamodel::NodeKind;
use crate::model::{Model, Node, NodeId};

pub const ORIGIN: f64 = 40.0;
pub const TIER_SPACING: f64 = 140.0;
pub const SIBLING_SPACING: f64 = 40.0;
const TIER_COUNT: u32 = 5;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LayoutResult {
    pub boxes: BTreeMap<NodeId, Rect>,
    pub tiers: BTreeMap<NodeId, u32>,
}

impl LayoutResult {
    pub fn get(&self, id: NodeId) -> Option<Rect> {
        self.boxes.get(&id).copied()
    }

    /// Right and bottom extent of all boxes.
    pub fn extent(&self) -> (f64, f64) {
        self.boxes.values().fold((0.0, 0.0), |(w, h), r| {
            (w.max(r.right()), h.max(r.bottom()))
        })
    }
}

/// An attribute is laid out inside its owner only when the owner is a
/// permutation present in the model; otherwise it is treated as top-level.
pub(crate) fn container(model: &Model, node: &Node) -> Option<NodeId> {
    let owner = node.owner?;
    (model.node(owner)?.kind == NodeKind::Permutation).then_some(owner)
}

pub fn layout(model: &Model) -> LayoutResult {
    let mut result = LayoutResult::default();
    let top_level: Vec<&Node> = model
        .nodes()
        .filter(|n| container(model, n).is_none())
        .collect();

    let mut placed: Vec<Rect> = Vec::new();
    for node in &top_level {
        result.tiers.insert(node.id, node.kind.tier());
        if let Some(stored) = model.bounds(node.id) {
            result.boxes.insert(node.id, stored);
            placed.push(stored);
        }
    }

    let mut y = ORIGIN;
    for tier in 0..TIER_COUNT {
        let mut x = ORIGIN;
        let mut tallest: f64 = 0.0;
        let pending: Vec<&Node> = top_level
            .iter()
            .copied()
            .filter(|n| n.kind.tier() == tier && !result.boxes.contains_key(&n.id))
            .collect();
        for node in pending {
            let height = if node.kind == NodeKind::Permutation {
                permutation_height(model.attributes_of(node.id).count())
            } else {
                NODE_HEIGHT
            };
            let mut slot = Rect::new(x, y, NODE_WIDTH, height);
            while let Some(blocker) = placed
                .iter()
                .filter(|p| p.overlaps(&slot))
                .map(|p| p.right())
                .reduce(f64::max)
            {
                slot.x = blocker + SIBLING_SPACING;
            }
            result.boxes.insert(node.id, slot);
            placed.push(slot);
            tallest = tallest.max(height);
            x = slot.right() + SIBLING_SPACING;
        }
        y += TIER_SPACING.max(tallest + SIBLING_SPACING);
    }

    for permutation in top_level.iter().filter(|n| n.kind == NodeKind::Permutation) {
        let owner_box = result.boxes[&permutation.id];
        let attributes: Vec<NodeId> = model.attributes_of(permutation.id).map(|n| n.id).collect();
        let stored: Option<Vec<Rect>> = attributes.iter().map(|a| model.bounds(*a)).collect();
        let boxes = match stored {
            Some(boxes) if nested_cleanly(&owner_box, &boxes) => boxes,
            _ => attribute_slots(&owner_box, attributes.len()),
        };
        for (attr, rect) in attributes.into_iter().zip(boxes) {
            result.boxes.insert(attr, rect);
            result.tiers.insert(attr, permutation.kind.tier());
        }
    }
    result
}

fn nested_cleanly(owner: &Rect, boxes: &[Rect]) -> bool {
    boxes.iter().enumerate().all(|(i, b)| {
        owner.strictly_contains(b) && boxes[i + 1..].iter().all(|other| !other.overlaps(b))
    })
}
