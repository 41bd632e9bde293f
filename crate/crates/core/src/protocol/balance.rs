//! Rebalancing a protocol with `ℓ` leaves to depth at most `⌈2 log_{3/2} ℓ⌉`.
//!
//! Pick a node `v` whose subtree holds between `⌈ℓ/3⌉` and `⌊2ℓ/3⌋` leaves.
//! Alice says whether her input can reach `v`, then Bob does. If both can,
//! continue with `v`'s subtree; otherwise no input reaching here passes
//! through `v`, so the tree with `v` cut out (its parent replaced by `v`'s
//! sibling) computes the same value. Both pieces have at most `2ℓ/3` leaves.

use super::sets::{intersect, minus};
use super::{Node, ProtocolTree, Speaker};

/// `⌈2 log_{3/2} ℓ⌉`, or 0 for a single leaf.
pub fn depth_bound(leaves: usize) -> usize {
    if leaves <= 1 {
        return 0;
    }
    // Least d with (3/2)^d ≥ ℓ^2, i.e. 3^d ≥ ℓ^2 · 2^d, checked exactly.
    let target = num_bigint::BigUint::from(leaves).pow(2);
    let mut d = 0u32;
    loop {
        let lhs = num_bigint::BigUint::from(3u32).pow(d);
        let rhs = &target * num_bigint::BigUint::from(2u32).pow(d);
        if lhs >= rhs {
            return d as usize;
        }
        d += 1;
    }
}

pub fn balance(t: &ProtocolTree) -> ProtocolTree {
    let rx: Vec<usize> = (0..t.rows()).collect();
    let ry: Vec<usize> = (0..t.cols()).collect();
    let root = balance_node(t.root(), &rx, &ry);
    ProtocolTree::new(t.rows(), t.cols(), root).expect("balancing keeps predicates within reach")
}

struct Candidate {
    path: Vec<bool>,
    depth: usize,
    leaves: usize,
}

/// Preorder walk recording every node's path, depth and leaf count.
fn collect(node: &Node, path: &mut Vec<bool>, out: &mut Vec<Candidate>) -> usize {
    let at = out.len();
    out.push(Candidate {
        path: path.clone(),
        depth: path.len(),
        leaves: 0,
    });
    let leaves = match node {
        Node::Leaf { .. } => 1,
        Node::Internal { child0, child1, .. } => {
            path.push(false);
            let a = collect(child0, path, out);
            path.pop();
            path.push(true);
            let b = collect(child1, path, out);
            path.pop();
            a + b
        }
    };
    out[at].leaves = leaves;
    leaves
}

fn subtree<'a>(node: &'a Node, path: &[bool]) -> &'a Node {
    path.iter().fold(node, |n, &bit| match n {
        Node::Internal { child0, child1, .. } => {
            if bit {
                child1
            } else {
                child0
            }
        }
        Node::Leaf { .. } => unreachable!("path leads through leaves"),
    })
}

/// Inputs of `rx × ry` that reach the end of `path`.
fn reach(node: &Node, path: &[bool], rx: &[usize], ry: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let (mut rx, mut ry) = (rx.to_vec(), ry.to_vec());
    let mut cur = node;
    for &bit in path {
        let Node::Internal {
            speaker,
            subset,
            child0,
            child1,
        } = cur
        else {
            unreachable!("path leads through leaves")
        };
        let side = match speaker {
            Speaker::Alice => &mut rx,
            Speaker::Bob => &mut ry,
        };
        *side = if bit { intersect(side, subset) } else { minus(side, subset) };
        cur = if bit { child1 } else { child0 };
    }
    (rx, ry)
}

/// `node` with the subtree at `path` removed: its parent is replaced by
/// the sibling.
fn cut(node: &Node, path: &[bool]) -> Node {
    match (node, path) {
        (Node::Internal { child0, child1, .. }, [bit]) => {
            if *bit {
                (**child0).clone()
            } else {
                (**child1).clone()
            }
        }
        (
            Node::Internal {
                speaker,
                subset,
                child0,
                child1,
            },
            [bit, rest @ ..],
        ) => {
            let (c0, c1) = if *bit {
                ((**child0).clone(), cut(child1, rest))
            } else {
                (cut(child0, rest), (**child1).clone())
            };
            Node::split(*speaker, subset.clone(), c0, c1)
        }
        _ => unreachable!("cut needs a non-root node"),
    }
}

/// Intersects predicates with the inputs reaching each node and drops
/// nodes whose bit has become constant.
pub(crate) fn restrict_to(node: &Node, rx: &[usize], ry: &[usize]) -> Node {
    match node {
        Node::Leaf { .. } => node.clone(),
        Node::Internal {
            speaker,
            subset,
            child0,
            child1,
        } => {
            let reach = match speaker {
                Speaker::Alice => rx,
                Speaker::Bob => ry,
            };
            let s = intersect(subset, reach);
            if s.is_empty() {
                return restrict_to(child0, rx, ry);
            }
            if s.len() == reach.len() {
                return restrict_to(child1, rx, ry);
            }
            let rest = minus(reach, &s);
            let (c0, c1) = match speaker {
                Speaker::Alice => (restrict_to(child0, &rest, ry), restrict_to(child1, &s, ry)),
                Speaker::Bob => (restrict_to(child0, rx, &rest), restrict_to(child1, rx, &s)),
            };
            Node::split(*speaker, s, c0, c1)
        }
    }
}

/// Balanced equivalent of `node` for inputs in `rx × ry`; all predicates of
/// the result lie within the reach of their nodes.
fn balance_node(node: &Node, rx: &[usize], ry: &[usize]) -> Node {
    let leaves = node.leaf_count();
    if leaves == 1 {
        return node.clone();
    }
    if rx.is_empty() || ry.is_empty() {
        return Node::leaf(node.first_output());
    }
    let mut all = Vec::new();
    collect(node, &mut Vec::new(), &mut all);
    let (lo, hi) = (leaves.div_ceil(3), 2 * leaves / 3);
    // Deepest node in the window, earliest in preorder among equals.
    let v = all
        .iter()
        .filter(|c| c.leaves >= lo && c.leaves <= hi && c.depth > 0)
        .fold(None::<&Candidate>, |best, c| match best {
            Some(b) if b.depth >= c.depth => Some(b),
            _ => Some(c),
        })
        .expect("a window node exists for two or more leaves");

    let (vx, vy) = reach(node, &v.path, rx, ry);
    let residual = cut(node, &v.path);
    if vx.is_empty() || vy.is_empty() {
        return balance_node(&residual, rx, ry);
    }
    let inside = balance_node(subtree(node, &v.path), &vx, &vy);
    let outside = balance_node(&residual, rx, ry);

    let bob = if vy.len() == ry.len() {
        inside
    } else {
        let not_y = minus(ry, &vy);
        Node::split(Speaker::Bob, vy, restrict_to(&outside, &vx, &not_y), inside)
    };
    if vx.len() == rx.len() {
        bob
    } else {
        let not_x = minus(rx, &vx);
        Node::split(Speaker::Alice, vx, restrict_to(&outside, &not_x, ry), bob)
    }
}
