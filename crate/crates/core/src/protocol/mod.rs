//! Deterministic protocol trees: one bit per internal node.
//!
//! Each internal node names a speaker and an explicit subset of that
//! speaker's inputs in the root index space; inputs in the subset take
//! `child1`. A tree is validated on construction, so every predicate is a
//! subset of the inputs that can actually reach its node.

mod balance;
mod random;
mod search;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::BoolFun;

pub use balance::{balance, depth_bound};
pub use random::{random_tree, TreeShape};
pub use search::{exact_cc, trivial_protocol, CcResult};
pub(crate) use search::{class_protocol, classes_on};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Speaker {
    Alice,
    Bob,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Node {
    Internal {
        speaker: Speaker,
        subset: Vec<usize>,
        child0: Box<Node>,
        child1: Box<Node>,
    },
    Leaf {
        output: u8,
    },
}

impl Node {
    pub fn leaf(output: u8) -> Node {
        Node::Leaf { output }
    }

    pub fn split(speaker: Speaker, subset: Vec<usize>, child0: Node, child1: Node) -> Node {
        Node::Internal {
            speaker,
            subset,
            child0: Box::new(child0),
            child1: Box::new(child1),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            Node::Internal { child0, child1, .. } => child0.leaf_count() + child1.leaf_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Internal { child0, child1, .. } => 1 + child0.depth().max(child1.depth()),
        }
    }

    fn first_output(&self) -> u8 {
        match self {
            Node::Leaf { output } => *output,
            Node::Internal { child0, .. } => child0.first_output(),
        }
    }
}

/// A validated protocol tree over `rows × cols` inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTree", into = "RawTree")]
pub struct ProtocolTree {
    rows: usize,
    cols: usize,
    root: Node,
}

#[derive(Serialize, Deserialize)]
struct RawTree {
    rows: usize,
    cols: usize,
    root: Node,
}

impl TryFrom<RawTree> for ProtocolTree {
    type Error = Error;

    fn try_from(raw: RawTree) -> Result<ProtocolTree> {
        ProtocolTree::new(raw.rows, raw.cols, raw.root)
    }
}

impl From<ProtocolTree> for RawTree {
    fn from(t: ProtocolTree) -> RawTree {
        RawTree {
            rows: t.rows,
            cols: t.cols,
            root: t.root,
        }
    }
}

/// Sorted-set helpers over index vectors.
pub(crate) mod sets {
    pub fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
        a.iter().copied().filter(|x| b.binary_search(x).is_ok()).collect()
    }

    pub fn minus(a: &[usize], b: &[usize]) -> Vec<usize> {
        a.iter().copied().filter(|x| b.binary_search(x).is_err()).collect()
    }

    pub fn is_subset(a: &[usize], b: &[usize]) -> bool {
        a.iter().all(|x| b.binary_search(x).is_ok())
    }
}

fn check_node(node: &Node, rx: &[usize], ry: &[usize]) -> Result<()> {
    match node {
        Node::Leaf { output } if *output <= 1 => Ok(()),
        Node::Leaf { output } => Err(Error::Structural(format!("leaf output {output} is not a bit"))),
        Node::Internal {
            speaker,
            subset,
            child0,
            child1,
        } => {
            if subset.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Structural("predicate subset is not strictly increasing".into()));
            }
            let reach = match speaker {
                Speaker::Alice => rx,
                Speaker::Bob => ry,
            };
            if !sets::is_subset(subset, reach) {
                return Err(Error::Structural(format!(
                    "{speaker:?} predicate {subset:?} is not within the inputs reaching the node"
                )));
            }
            let rest = sets::minus(reach, subset);
            match speaker {
                Speaker::Alice => {
                    check_node(child0, &rest, ry)?;
                    check_node(child1, subset, ry)
                }
                Speaker::Bob => {
                    check_node(child0, rx, &rest)?;
                    check_node(child1, rx, subset)
                }
            }
        }
    }
}

impl ProtocolTree {
    pub fn new(rows: usize, cols: usize, root: Node) -> Result<ProtocolTree> {
        if rows == 0 || cols == 0 {
            return Err(Error::Structural("protocol input spaces must be non-empty".into()));
        }
        let rx: Vec<usize> = (0..rows).collect();
        let ry: Vec<usize> = (0..cols).collect();
        check_node(&root, &rx, &ry)?;
        Ok(ProtocolTree { rows, cols, root })
    }

    pub fn single_leaf(rows: usize, cols: usize, output: u8) -> Result<ProtocolTree> {
        ProtocolTree::new(rows, cols, Node::leaf(output))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn leaf_count(&self) -> usize {
        self.root.leaf_count()
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// Output bit and the transcript of bits sent.
    pub fn evaluate(&self, x: usize, y: usize) -> Result<(u8, Vec<u8>)> {
        if x >= self.rows || y >= self.cols {
            return Err(Error::invalid(format!(
                "input ({x},{y}) outside the {}x{} protocol domain",
                self.rows, self.cols
            )));
        }
        let mut node = &self.root;
        let mut transcript = Vec::new();
        loop {
            match node {
                Node::Leaf { output } => return Ok((*output, transcript)),
                Node::Internal {
                    speaker,
                    subset,
                    child0,
                    child1,
                } => {
                    let input = match speaker {
                        Speaker::Alice => x,
                        Speaker::Bob => y,
                    };
                    if subset.binary_search(&input).is_ok() {
                        transcript.push(1);
                        node = child1;
                    } else {
                        transcript.push(0);
                        node = child0;
                    }
                }
            }
        }
    }

    /// Output bit only.
    pub fn output(&self, x: usize, y: usize) -> Result<u8> {
        self.evaluate(x, y).map(|(b, _)| b)
    }

    /// First input (row-major) where the tree disagrees with `f`.
    pub fn first_disagreement(&self, f: &BoolFun) -> Option<(usize, usize)> {
        if f.rows() != self.rows || f.cols() != self.cols {
            return Some((0, 0));
        }
        (0..f.rows())
            .flat_map(|x| (0..f.cols()).map(move |y| (x, y)))
            .find(|&(x, y)| self.output(x, y).ok() != Some(f.bit(x, y)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("protocol trees always serialize")
    }

    pub fn from_json(text: &str) -> Result<ProtocolTree> {
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))
    }
}

/// True iff `t` computes `f` on every input.
pub fn verify(t: &ProtocolTree, f: &BoolFun) -> bool {
    t.first_disagreement(f).is_none()
}
