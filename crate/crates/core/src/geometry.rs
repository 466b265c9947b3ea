//! Diagram boxes and the placement rules shared by the edit engine and the
//! auto-layout.

use serde::{Deserialize, Serialize};

pub const NODE_WIDTH: f64 = 150.0;
pub const NODE_HEIGHT: f64 = 60.0;

const GRID_ORIGIN: f64 = 40.0;
const GRID_COLUMNS: u64 = 5;
const GRID_DX: f64 = 180.0;
const GRID_DY: f64 = 120.0;

// Attribute boxes sit below the permutation's title band.
const TITLE_BAND: f64 = 28.0;
const ATTRIBUTE_ROW: f64 = 28.0;
const BOTTOM_PAD: f64 = 6.0;
const SIDE_PAD: f64 = 10.0;

/// Axis-aligned box in pixels; serialized as `[x, y, w, h]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub const fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Rect { x, y, w, h }
    }

    pub fn is_valid(&self) -> bool {
        [self.x, self.y, self.w, self.h]
            .iter()
            .all(|v| v.is_finite())
            && self.w > 0.0
            && self.h > 0.0
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    /// Open-interior intersection; boxes that merely touch do not overlap.
    pub fn overlaps(&self, other: &Rect) -> bool {
        self.x < other.right()
            && other.x < self.right()
            && self.y < other.bottom()
            && other.y < self.bottom()
    }

    pub fn strictly_contains(&self, inner: &Rect) -> bool {
        inner.x > self.x
            && inner.y > self.y
            && inner.right() < self.right()
            && inner.bottom() < self.bottom()
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Rect {
        Rect::new(self.x + dx, self.y + dy, self.w, self.h)
    }
}

impl From<[f64; 4]> for Rect {
    fn from([x, y, w, h]: [f64; 4]) -> Self {
        Rect { x, y, w, h }
    }
}

impl From<Rect> for [f64; 4] {
    fn from(r: Rect) -> Self {
        [r.x, r.y, r.w, r.h]
    }
}

/// Slot `n` of the default placement grid for newly created nodes.
pub fn grid_slot(n: u64) -> Rect {
    Rect::new(
        GRID_ORIGIN + GRID_DX * (n % GRID_COLUMNS) as f64,
        GRID_ORIGIN + GRID_DY * (n / GRID_COLUMNS) as f64,
        NODE_WIDTH,
        NODE_HEIGHT,
    )
}

/// Height a permutation box needs to hold `attributes` nested boxes.
pub fn permutation_height(attributes: usize) -> f64 {
    if attributes == 0 {
        NODE_HEIGHT
    } else {
        NODE_HEIGHT.max(TITLE_BAND + ATTRIBUTE_ROW * attributes as f64 + BOTTOM_PAD)
    }
}

/// Boxes for `count` attributes stacked inside `owner`, each strictly inside it.
/// The owner's interior below the title band is split evenly, so the slots
/// stay nested even for a stored owner box that is smaller than
/// [`permutation_height`] would ask for.
pub fn attribute_slots(owner: &Rect, count: usize) -> Vec<Rect> {
    if count == 0 {
        return Vec::new();
    }
    let band = TITLE_BAND.min(owner.h / 3.0);
    let top = owner.y + band;
    let usable = (owner.bottom() - BOTTOM_PAD.min(owner.h / 6.0)) - top;
    let row = usable / count as f64;
    let pad_x = SIDE_PAD.min(owner.w / 4.0);
    let gap = (row / 8.0).min(2.0);
    (0..count)
        .map(|i| {
            Rect::new(
                owner.x + pad_x,
                top + row * i as f64 + gap,
                owner.w - 2.0 * pad_x,
                row - 2.0 * gap,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_follows_five_columns() {
        assert_eq!(grid_slot(0), Rect::new(40.0, 40.0, 150.0, 60.0));
        assert_eq!(grid_slot(4), Rect::new(760.0, 40.0, 150.0, 60.0));
        assert_eq!(grid_slot(5), Rect::new(40.0, 160.0, 150.0, 60.0));
        assert_eq!(grid_slot(12), Rect::new(400.0, 280.0, 150.0, 60.0));
    }

    #[test]
    fn grid_slots_never_overlap() {
        for a in 0..30 {
            for b in (a + 1)..30 {
                assert!(!grid_slot(a).overlaps(&grid_slot(b)));
            }
        }
    }

    #[test]
    fn touching_boxes_do_not_overlap() {
        let a = Rect::new(0.0, 0.0, 10.0, 10.0);
        assert!(!a.overlaps(&Rect::new(10.0, 0.0, 10.0, 10.0)));
        assert!(a.overlaps(&Rect::new(9.0, 9.0, 10.0, 10.0)));
    }

    #[test]
    fn attribute_slots_nest_and_do_not_overlap() {
        for count in 1..8 {
            for owner in [
                Rect::new(40.0, 40.0, 150.0, permutation_height(count)),
                Rect::new(10.0, 10.0, 150.0, 60.0),
                Rect::new(0.0, 0.0, 20.0, 12.0),
            ] {
                let slots = attribute_slots(&owner, count);
                assert_eq!(slots.len(), count);
                for (i, s) in slots.iter().enumerate() {
                    assert!(owner.strictly_contains(s), "{owner:?} {s:?}");
                    for t in &slots[i + 1..] {
                        assert!(!s.overlaps(t));
                    }
                }
            }
        }
    }
}
