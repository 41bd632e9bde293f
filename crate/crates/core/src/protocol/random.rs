use super::sets::{intersect, minus};
use super::{Node, ProtocolTree, Speaker};
use crate::rng::SplitMix64;

/// Shapes for [`random_tree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeShape {
    /// Every internal node has a leaf as `child0`.
    Caterpillar,
    /// Leaf counts split uniformly at each node.
    Uniform,
}

/// A seeded random protocol tree with exactly `leaves` leaves. Predicates
/// are random subsets of the reaching inputs (possibly empty or full).
pub fn random_tree(rows: usize, cols: usize, leaves: usize, shape: TreeShape, seed: u64) -> ProtocolTree {
    assert!(leaves >= 1, "a tree has at least one leaf");
    let mut rng = SplitMix64::new(seed);
    let rx: Vec<usize> = (0..rows).collect();
    let ry: Vec<usize> = (0..cols).collect();
    let root = grow(&rx, &ry, leaves, shape, &mut rng);
    ProtocolTree::new(rows, cols, root).expect("predicates are drawn from the reaching inputs")
}

fn grow(rx: &[usize], ry: &[usize], leaves: usize, shape: TreeShape, rng: &mut SplitMix64) -> Node {
    if leaves == 1 {
        return Node::leaf(rng.next_bit());
    }
    let speaker = if rng.next_bit() == 0 { Speaker::Alice } else { Speaker::Bob };
    let reach = match speaker {
        Speaker::Alice => rx,
        Speaker::Bob => ry,
    };
    let subset: Vec<usize> = reach.iter().copied().filter(|_| rng.next_bit() == 1).collect();
    let rest = minus(reach, &subset);
    let left = match shape {
        TreeShape::Caterpillar => 1,
        TreeShape::Uniform => 1 + rng.below(leaves as u64 - 1) as usize,
    };
    let (r0, r1) = (rest, intersect(reach, &subset));
    let (c0, c1) = match speaker {
        Speaker::Alice => (
            grow(&r0, ry, left, shape, rng),
            grow(&r1, ry, leaves - left, shape, rng),
        ),
        Speaker::Bob => (
            grow(rx, &r0, left, shape, rng),
            grow(rx, &r1, leaves - left, shape, rng),
        ),
    };
    Node::split(speaker, subset, c0, c1)
}
