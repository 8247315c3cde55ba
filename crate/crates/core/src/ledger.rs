//! Qubit-memory occupancy accounting, split by node class.
//!
//! Every operation in the protocol blocks quantum memories for some number of
//! unit times. The ledger accumulates those qubit·unit-time charges
//! separately for end nodes and for intermediate nodes, because the two
//! classes are exactly what the purification-placement comparison is about.

use std::error::Error;
use std::fmt;
use std::ops::Add;

/// Whether a node terminates the path or forwards through it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeClass {
    /// Node 0 or node `n − 1`.
    EndNode,
    /// Every node in between.
    IntermediateNode,
}

/// A node index outside `0..n_nodes`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeIndexOutOfRange {
    pub node_index: usize,
    pub n_nodes: usize,
}

impl fmt::Display for NodeIndexOutOfRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "node index {} is out of range for a {}-node path",
            self.node_index, self.n_nodes
        )
    }
}

impl Error for NodeIndexOutOfRange {}

/// Classify a node on an `n_nodes`-long path.
pub fn classify(node_index: usize, n_nodes: usize) -> Result<NodeClass, NodeIndexOutOfRange> {
    if node_index >= n_nodes {
        return Err(NodeIndexOutOfRange {
            node_index,
            n_nodes,
        });
    }
    if node_index == 0 || node_index == n_nodes - 1 {
        Ok(NodeClass::EndNode)
    } else {
        Ok(NodeClass::IntermediateNode)
    }
}

/// Accumulated qubit·unit-time occupancy, attributed per node class.
///
/// Addition and scaling are componentwise; both components stay
/// non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResourceLedger {
    end_qubit_time: f64,
    intermediate_qubit_time: f64,
}

impl ResourceLedger {
    /// The empty ledger.
    pub const ZERO: ResourceLedger = ResourceLedger {
        end_qubit_time: 0.0,
        intermediate_qubit_time: 0.0,
    };

    /// Occupancy charged to end-node memories.
    pub fn end_qubit_time(&self) -> f64 {
        self.end_qubit_time
    }

    /// Occupancy charged to intermediate-node memories.
    pub fn intermediate_qubit_time(&self) -> f64 {
        self.intermediate_qubit_time
    }

    /// Total occupancy across both classes.
    pub fn total(&self) -> f64 {
        self.end_qubit_time + self.intermediate_qubit_time
    }

    /// Charge `qubits` memories for `duration` unit times to one class.
    pub fn charge(mut self, class: NodeClass, qubits: u32, duration: f64) -> Self {
        debug_assert!(duration >= 0.0, "negative duration");
        let amount = f64::from(qubits) * duration;
        match class {
            NodeClass::EndNode => self.end_qubit_time += amount,
            NodeClass::IntermediateNode => self.intermediate_qubit_time += amount,
        }
        self
    }

    /// Multiply both components by `multiplier`, the expected number of
    /// attempts behind one success. Must be at least one.
    pub fn scale(self, multiplier: f64) -> Self {
        debug_assert!(multiplier >= 1.0, "resource multiplier below one");
        ResourceLedger {
            end_qubit_time: self.end_qubit_time * multiplier,
            intermediate_qubit_time: self.intermediate_qubit_time * multiplier,
        }
    }
}

impl Add for ResourceLedger {
    type Output = ResourceLedger;

    fn add(self, rhs: ResourceLedger) -> ResourceLedger {
        ResourceLedger {
            end_qubit_time: self.end_qubit_time + rhs.end_qubit_time,
            intermediate_qubit_time: self.intermediate_qubit_time + rhs.intermediate_qubit_time,
        }
    }
}

impl fmt::Display for ResourceLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "end: {:.3} qubit·unit-times, intermediate: {:.3} qubit·unit-times",
            self.end_qubit_time, self.intermediate_qubit_time
        )
    }
}
