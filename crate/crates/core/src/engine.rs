//! The connection engine: swap scheduling, noisy operations and
//! threshold-driven recursive purification over a linear node path.
//!
//! A run proceeds bottom-up over a binary swap schedule. Every link first
//! generates a raw Werner pair and pumps it above the link-level (`l2`)
//! threshold. Swaps then splice adjacent spans; whenever an intermediate
//! span falls below the internetworking (`l3`) threshold — if one is
//! configured — the span is pumped back above it. The full span is finally
//! pumped to the delivery (`l4`) threshold. A pump that stops improving
//! before reaching its threshold marks the whole setting as broken.
//!
//! Purification here is symmetric pumping: each round combines two
//! identically prepared pairs of the current level. The partner pair is a
//! rebuild of the same span through the same deterministic recursion, so it
//! carries the same state and the same accumulated cost; a round therefore
//! doubles the input cost before dividing by the round's success
//! probability. After the parity comparison the kept pair is twirled back
//! onto the Werner family, the standard randomization between recurrence
//! rounds; without it the fixed composition table lets the in-group error
//! component grow until pumping stalls for every threshold of interest.
//!
//! Noise placement follows the simulation model: a swap charges the center
//! node's operation error once and each outer node's memory error once; a
//! purification charges both holders' operation errors once each, plus the
//! classical-wait decay — one channel application per unit time of the
//! `d`-hop parity exchange, at the mean of the two holders' memory rates.
//! Swap feedback and partner-pair generation cost no wait time.

use std::error::Error;
use std::fmt;

use crate::bell::{
    apply_error_channel, purify_states, purify_success_probability_paper, swap_states,
    twirl_to_werner, BellDiagonalState, ErrorProbability,
};
use crate::ledger::{classify, NodeClass, ResourceLedger};

/// Minimum fidelity gain per pump round before the pump is declared stuck.
pub const PUMP_IMPROVEMENT_EPSILON: f64 = 1e-9;

/// Default cap on pump rounds per span.
pub const DEFAULT_MAX_PUMP_ROUNDS: u32 = 64;

/// Error rates of one node: memory decay per qubit per unit time, and
/// operation error per executed gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeProfile {
    pub memory_error: ErrorProbability,
    pub operation_error: ErrorProbability,
}

impl NodeProfile {
    /// A noiseless node.
    pub const PERFECT: NodeProfile = NodeProfile {
        memory_error: ErrorProbability::ZERO,
        operation_error: ErrorProbability::ZERO,
    };

    pub fn new(memory_error: ErrorProbability, operation_error: ErrorProbability) -> Self {
        Self {
            memory_error,
            operation_error,
        }
    }

    /// Same probability for memory and operation errors.
    pub fn uniform(p: ErrorProbability) -> Self {
        Self::new(p, p)
    }
}

/// Static description of the path and its hardware.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    /// Number of nodes on the path, ends included. At least 2.
    pub n_nodes: usize,
    /// Wall-clock length of one unit time, in seconds. One hop of classical
    /// latency is one unit time (about 20 km of fiber).
    pub unit_time_s: f64,
    /// Fidelity of a raw link pair, completed to a Werner state.
    pub raw_fidelity: f64,
    /// Success probability of one raw-pair generation attempt. Carried for
    /// reference; it rescales every setting identically and is not charged.
    pub raw_generation_success: f64,
    pub end_profile: NodeProfile,
    pub intermediate_profile: NodeProfile,
}

impl NetworkConfig {
    /// A path with default link parameters (unit time 0.1 ms, raw fidelity
    /// 0.8, generation success 0.01).
    pub fn new(n_nodes: usize, end_profile: NodeProfile, intermediate_profile: NodeProfile) -> Self {
        Self {
            n_nodes,
            unit_time_s: 1e-4,
            raw_fidelity: 0.8,
            raw_generation_success: 0.01,
            end_profile,
            intermediate_profile,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_nodes < 2 {
            return Err(ConfigError::new(format!(
                "n_nodes = {} but a path needs at least 2 nodes",
                self.n_nodes
            )));
        }
        if !(self.raw_fidelity > 0.25 && self.raw_fidelity <= 1.0) {
            return Err(ConfigError::new(format!(
                "raw fidelity {} is outside (0.25, 1]",
                self.raw_fidelity
            )));
        }
        if !(self.raw_generation_success > 0.0 && self.raw_generation_success <= 1.0) {
            return Err(ConfigError::new(format!(
                "raw generation success {} is outside (0, 1]",
                self.raw_generation_success
            )));
        }
        if !(self.unit_time_s > 0.0 && self.unit_time_s.is_finite()) {
            return Err(ConfigError::new(format!(
                "unit time {} must be positive",
                self.unit_time_s
            )));
        }
        Ok(())
    }

    /// Class of a node on this path.
    pub fn class_of(&self, node: usize) -> NodeClass {
        classify(node, self.n_nodes).expect("node index within the path")
    }

    /// Hardware profile of a node on this path.
    pub fn profile_of(&self, node: usize) -> NodeProfile {
        match self.class_of(node) {
            NodeClass::EndNode => self.end_profile,
            NodeClass::IntermediateNode => self.intermediate_profile,
        }
    }
}

/// Which success probability divides the resource count of a purification
/// round. The two rules agree on Werner inputs, which is all the engine
/// produces; they differ on hand-built asymmetric states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SuccessRule {
    /// Survival mass of the purification table (also the normalizer of the
    /// output state).
    #[default]
    Table,
    /// The statistical formula `(A₀+D₀)(A₁+D₁) + (B₀+C₀)(B₁+C₁)`.
    PaperFormula,
}

/// Fidelity thresholds of the three purification levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyConfig {
    /// Link-level threshold: every raw pair is pumped above this.
    pub l2_threshold: f64,
    /// Internetworking threshold; `None` forbids purification on spans
    /// other than single links and the full end-to-end span.
    pub l3_threshold: Option<f64>,
    /// End-to-end threshold, also the delivered fidelity target.
    pub l4_threshold: f64,
    pub success_rule: SuccessRule,
    pub max_pump_rounds: u32,
}

impl PolicyConfig {
    /// A policy with the default delivery target 0.99, table success rule
    /// and the default round cap.
    pub fn new(l2_threshold: f64, l3_threshold: Option<f64>) -> Self {
        Self {
            l2_threshold,
            l3_threshold,
            l4_threshold: 0.99,
            success_rule: SuccessRule::default(),
            max_pump_rounds: DEFAULT_MAX_PUMP_ROUNDS,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut thresholds = vec![("l2", self.l2_threshold), ("l4", self.l4_threshold)];
        if let Some(l3) = self.l3_threshold {
            thresholds.push(("l3", l3));
        }
        for (name, value) in thresholds {
            if !(value > 0.25 && value < 1.0) {
                return Err(ConfigError::new(format!(
                    "{name} threshold {value} is outside (0.25, 1)"
                )));
            }
        }
        if self.max_pump_rounds == 0 {
            return Err(ConfigError::new("max_pump_rounds must be positive".into()));
        }
        Ok(())
    }
}

/// Invalid [`NetworkConfig`] or [`PolicyConfig`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(String);

impl ConfigError {
    fn new(message: String) -> Self {
        Self(message)
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Error for ConfigError {}

/// A shared Bell pair in flight: its state, the nodes holding its halves,
/// and the occupancy spent to produce it.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRecord {
    pub state: BellDiagonalState,
    /// Index of the left holder. Always less than `right`.
    pub left: usize,
    /// Index of the right holder.
    pub right: usize,
    pub ledger: ResourceLedger,
}

impl PairRecord {
    pub fn fidelity(&self) -> f64 {
        self.state.fidelity()
    }

    /// Number of hops the pair spans.
    pub fn span_hops(&self) -> usize {
        self.right - self.left
    }
}

/// Engine-level failures on malformed inputs.
#[derive(Debug, Clone, PartialEq)]
pub enum EngineError {
    /// The two pairs do not line up for the requested operation.
    SpanMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    /// Purification discarded all weight; no output state exists.
    ZeroSurvival,
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::SpanMismatch { left, right } => write!(
                f,
                "pair spans {}..{} and {}..{} do not line up",
                left.0, left.1, right.0, right.1
            ),
            EngineError::ZeroSurvival => write!(f, "purification has zero survival probability"),
        }
    }
}

impl Error for EngineError {}

/// Why a pump gave up before reaching its threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StallReason {
    /// Fidelity stopped improving: the noisy pumping map reached its fixed
    /// point below the threshold.
    NoImprovement { gain: f64 },
    /// The round cap was hit first.
    RoundLimit,
    /// A round had zero survival probability.
    ZeroSurvival,
}

/// A pump that cannot reach its threshold. Carries the best pair achieved
/// so that broken runs still report a state and a cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Unreachable {
    pub threshold: f64,
    pub rounds: u32,
    pub reason: StallReason,
    pub last: PairRecord,
}

impl fmt::Display for Unreachable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let detail = match self.reason {
            StallReason::NoImprovement { gain } => format!("gain {gain:.3e} per round"),
            StallReason::RoundLimit => "round cap reached".to_string(),
            StallReason::ZeroSurvival => "zero survival".to_string(),
        };
        write!(
            f,
            "pump over span {}..{} stalled at fidelity {:.6} after {} rounds, target {} ({})",
            self.last.left,
            self.last.right,
            self.last.fidelity(),
            self.rounds,
            self.threshold,
            detail
        )
    }
}

impl Error for Unreachable {}

/// Number of purification rounds executed per level across one connection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PurificationCounts {
    pub l2: u64,
    pub l3: u64,
    pub l4: u64,
}

/// Outcome of one end-to-end connection build.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionResult {
    /// Delivered state, or the best state achieved before the breaking pump
    /// stalled.
    pub final_state: BellDiagonalState,
    /// Occupancy behind the delivered pair (partial if broken).
    pub ledger: ResourceLedger,
    /// True when some pump could not reach its threshold.
    pub broken: bool,
    pub break_reason: Option<String>,
    pub purification_counts: PurificationCounts,
}

impl ConnectionResult {
    pub fn delivered_fidelity(&self) -> f64 {
        self.final_state.fidelity()
    }
}

/// Binary schedule of entanglement swaps over the hops of a path.
#[derive(Debug, Clone, PartialEq)]
pub enum SwapTree {
    /// A single hop `left..left+1`.
    Leaf { left: usize, right: usize },
    /// A swap at `center` joining two adjacent spans, tagged with the
    /// doubling round in which it runs.
    Merge {
        round: u32,
        center: usize,
        left: Box<SwapTree>,
        right: Box<SwapTree>,
    },
}

impl SwapTree {
    /// Node span covered by this subtree.
    pub fn span(&self) -> (usize, usize) {
        match self {
            SwapTree::Leaf { left, right } => (*left, *right),
            SwapTree::Merge { left, right, .. } => (left.span().0, right.span().1),
        }
    }

    /// Number of swap events in this subtree.
    pub fn swap_count(&self) -> usize {
        match self {
            SwapTree::Leaf { .. } => 0,
            SwapTree::Merge { left, right, .. } => 1 + left.swap_count() + right.swap_count(),
        }
    }

    /// Leaf hops in left-to-right order.
    pub fn leaves(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<(usize, usize)>) {
        match self {
            SwapTree::Leaf { left, right } => out.push((*left, *right)),
            SwapTree::Merge { left, right, .. } => {
                left.collect_leaves(out);
                right.collect_leaves(out);
            }
        }
    }
}

/// Build the swap schedule for a path of `n_hops` hops.
///
/// Round-based doubling: each round pairwise-merges adjacent same-level
/// segments left to right; an odd segment out waits as a remainder and is
/// merged in a later round. Total swaps come out to `n_hops − 1`.
///
/// # Panics
///
/// Panics if `n_hops` is zero.
pub fn build_swap_tree(n_hops: usize) -> SwapTree {
    assert!(n_hops >= 1, "a path needs at least one hop");
    let mut segments: Vec<SwapTree> = (0..n_hops)
        .map(|i| SwapTree::Leaf {
            left: i,
            right: i + 1,
        })
        .collect();
    let mut round = 1;
    while segments.len() > 1 {
        let mut merged = Vec::with_capacity(segments.len() / 2 + 1);
        let mut iter = segments.into_iter();
        while let Some(left) = iter.next() {
            match iter.next() {
                Some(right) => {
                    let center = left.span().1;
                    merged.push(SwapTree::Merge {
                        round,
                        center,
                        left: Box::new(left),
                        right: Box::new(right),
                    });
                }
                // Odd segment out: carried into the next round unchanged.
                None => merged.push(left),
            }
        }
        segments = merged;
        round += 1;
    }
    segments.pop().expect("non-empty schedule")
}

/// Generate one raw link pair between adjacent nodes: a Werner state at the
/// configured raw fidelity, charged two qubit·unit-times of base occupancy,
/// one per holder.
///
/// # Panics
///
/// Panics unless `right == left + 1`.
pub fn generate_link_pair(left: usize, right: usize, config: &NetworkConfig) -> PairRecord {
    assert_eq!(right, left + 1, "raw pairs span exactly one hop");
    let state = BellDiagonalState::werner(config.raw_fidelity)
        .expect("raw fidelity validated by the config");
    let ledger = ResourceLedger::ZERO
        .charge(config.class_of(left), 1, 1.0)
        .charge(config.class_of(right), 1, 1.0);
    PairRecord {
        state,
        left,
        right,
        ledger,
    }
}

/// Entanglement swapping of two adjacent pairs sharing a center node.
///
/// The output state is the table composition of the inputs, degraded once by
/// the center node's operation error and once by each outer node's memory
/// error (the channels commute, so the order is immaterial). The swap
/// occupies four memories for one unit time: two at the center, one at each
/// outer node. Swap feedback adds no latency.
pub fn noisy_swap(
    left: PairRecord,
    right: PairRecord,
    config: &NetworkConfig,
) -> Result<PairRecord, EngineError> {
    if left.right != right.left || left.left >= right.right {
        return Err(EngineError::SpanMismatch {
            left: (left.left, left.right),
            right: (right.left, right.right),
        });
    }
    let center = left.right;
    let outer_left = left.left;
    let outer_right = right.right;

    let mut state = swap_states(left.state, right.state);
    state = apply_error_channel(state, config.profile_of(center).operation_error);
    state = apply_error_channel(state, config.profile_of(outer_left).memory_error);
    state = apply_error_channel(state, config.profile_of(outer_right).memory_error);

    let ledger = (left.ledger + right.ledger)
        .charge(config.class_of(center), 2, 1.0)
        .charge(config.class_of(outer_left), 1, 1.0)
        .charge(config.class_of(outer_right), 1, 1.0);

    Ok(PairRecord {
        state,
        left: outer_left,
        right: outer_right,
        ledger,
    })
}

/// One round of entanglement purification between two pairs over the same
/// span.
///
/// The states combine through the purification table (normalized by its
/// survival mass) and the kept pair is twirled back onto the Werner family.
/// Each holder's operation error applies once. The parity exchange takes
/// `d = span_hops` unit times, during which the pair decays one channel
/// application per unit time at the mean of the holders' memory rates.
///
/// The round occupies four memories for one unit time (two per holder) plus
/// two memories for the `d`-unit-time wait (one per holder); the whole
/// accumulated cost is divided by the round's success probability, chosen by
/// `policy.success_rule`.
pub fn noisy_purify(
    keep: PairRecord,
    sacrifice: PairRecord,
    config: &NetworkConfig,
    policy: &PolicyConfig,
) -> Result<PairRecord, EngineError> {
    if keep.left != sacrifice.left || keep.right != sacrifice.right {
        return Err(EngineError::SpanMismatch {
            left: (keep.left, keep.right),
            right: (sacrifice.left, sacrifice.right),
        });
    }
    let (left, right) = (keep.left, keep.right);
    let hops = keep.span_hops();

    let (combined, table_mass) =
        purify_states(keep.state, sacrifice.state).map_err(|_| EngineError::ZeroSurvival)?;
    let success = match policy.success_rule {
        SuccessRule::Table => table_mass,
        SuccessRule::PaperFormula => purify_success_probability_paper(keep.state, sacrifice.state),
    };
    if success <= 0.0 {
        return Err(EngineError::ZeroSurvival);
    }

    let mut state = twirl_to_werner(combined);
    state = apply_error_channel(state, config.profile_of(left).operation_error);
    state = apply_error_channel(state, config.profile_of(right).operation_error);

    let mean_memory = ErrorProbability::new(
        (config.profile_of(left).memory_error.value()
            + config.profile_of(right).memory_error.value())
            / 2.0,
    )
    .expect("mean of valid probabilities");
    for _ in 0..hops {
        state = apply_error_channel(state, mean_memory);
    }

    let wait = hops as f64;
    let ledger = (keep.ledger + sacrifice.ledger)
        .charge(config.class_of(left), 2, 1.0)
        .charge(config.class_of(right), 2, 1.0)
        .charge(config.class_of(left), 1, wait)
        .charge(config.class_of(right), 1, wait)
        .scale(1.0 / success);

    Ok(PairRecord {
        state,
        left,
        right,
        ledger,
    })
}

/// Pump a span above `threshold` by symmetric recursion: round `k` combines
/// two identical level-`k` pairs, each a rebuild of `seed`'s span.
///
/// Returns the first pair whose fidelity reaches the threshold together with
/// the number of rounds executed. Gives up with [`Unreachable`] when a round
/// improves fidelity by at most [`PUMP_IMPROVEMENT_EPSILON`] or when
/// `policy.max_pump_rounds` is exceeded — the signature of a broken setting.
pub fn pump_to_threshold(
    seed: PairRecord,
    threshold: f64,
    config: &NetworkConfig,
    policy: &PolicyConfig,
) -> Result<(PairRecord, u32), Unreachable> {
    if seed.fidelity() >= threshold {
        return Ok((seed, 0));
    }
    let mut current = seed;
    for round in 1..=policy.max_pump_rounds {
        let next = match noisy_purify(current.clone(), current.clone(), config, policy) {
            Ok(pair) => pair,
            Err(_) => {
                return Err(Unreachable {
                    threshold,
                    rounds: round - 1,
                    reason: StallReason::ZeroSurvival,
                    last: current,
                });
            }
        };
        if next.fidelity() >= threshold {
            return Ok((next, round));
        }
        let gain = next.fidelity() - current.fidelity();
        if gain <= PUMP_IMPROVEMENT_EPSILON {
            return Err(Unreachable {
                threshold,
                rounds: round,
                reason: StallReason::NoImprovement { gain },
                last: next,
            });
        }
        current = next;
    }
    Err(Unreachable {
        threshold,
        rounds: policy.max_pump_rounds,
        reason: StallReason::RoundLimit,
        last: current,
    })
}

/// Purification level at which a pump runs, for break reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Level {
    Link,
    Internetworking,
    EndToEnd,
}

impl Level {
    fn label(self) -> &'static str {
        match self {
            Level::Link => "l2",
            Level::Internetworking => "l3",
            Level::EndToEnd => "l4",
        }
    }
}

struct Run<'a> {
    config: &'a NetworkConfig,
    policy: &'a PolicyConfig,
    counts: PurificationCounts,
    /// Pumped-leaf cache keyed by the holder classes; leaves with the same
    /// class pair are identical in state and cost.
    leaf_cache: Vec<((NodeClass, NodeClass), (PairRecord, u32))>,
}

impl<'a> Run<'a> {
    fn pumped_leaf(&mut self, left: usize, right: usize) -> Result<PairRecord, Unreachable> {
        let key = (self.config.class_of(left), self.config.class_of(right));
        let cached = self.leaf_cache.iter().find(|(k, _)| *k == key);
        let (template, rounds) = match cached {
            Some((_, value)) => value.clone(),
            None => {
                let raw = generate_link_pair(left, right, self.config);
                let value =
                    pump_to_threshold(raw, self.policy.l2_threshold, self.config, self.policy)?;
                self.leaf_cache.push((key, value.clone()));
                value
            }
        };
        self.counts.l2 += u64::from(rounds);
        Ok(PairRecord {
            state: template.state,
            left,
            right,
            ledger: template.ledger,
        })
    }

    fn eval(&mut self, tree: &SwapTree) -> Result<PairRecord, (Level, Unreachable)> {
        match tree {
            SwapTree::Leaf { left, right } => self
                .pumped_leaf(*left, *right)
                .map_err(|u| (Level::Link, u)),
            SwapTree::Merge { left, right, .. } => {
                let left_pair = self.eval(left)?;
                let right_pair = self.eval(right)?;
                let merged = noisy_swap(left_pair, right_pair, self.config)
                    .expect("schedule spans are adjacent by construction");
                if let Some(l3) = self.policy.l3_threshold {
                    let full_span =
                        merged.left == 0 && merged.right == self.config.n_nodes - 1;
                    if !full_span && merged.fidelity() < l3 {
                        let (pumped, rounds) =
                            pump_to_threshold(merged, l3, self.config, self.policy)
                                .map_err(|u| (Level::Internetworking, u))?;
                        self.counts.l3 += u64::from(rounds);
                        return Ok(pumped);
                    }
                }
                Ok(merged)
            }
        }
    }
}

/// Build one end-to-end pair under the given policy and account for it.
///
/// Pump failures at any level do not error: they produce a result with
/// `broken = true` carrying the stalled pair's state and cost.
pub fn run_connection(
    config: &NetworkConfig,
    policy: &PolicyConfig,
) -> Result<ConnectionResult, ConfigError> {
    config.validate()?;
    policy.validate()?;

    let tree = build_swap_tree(config.n_nodes - 1);
    let mut run = Run {
        config,
        policy,
        counts: PurificationCounts::default(),
        leaf_cache: Vec::new(),
    };

    let outcome = run.eval(&tree).and_then(|pair| {
        pump_to_threshold(pair, policy.l4_threshold, config, policy)
            .map(|(delivered, rounds)| {
                run.counts.l4 += u64::from(rounds);
                delivered
            })
            .map_err(|u| (Level::EndToEnd, u))
    });

    Ok(match outcome {
        Ok(delivered) => ConnectionResult {
            final_state: delivered.state,
            ledger: delivered.ledger,
            broken: false,
            break_reason: None,
            purification_counts: run.counts,
        },
        Err((level, unreachable)) => {
            match level {
                Level::Link => run.counts.l2 += u64::from(unreachable.rounds),
                Level::Internetworking => run.counts.l3 += u64::from(unreachable.rounds),
                Level::EndToEnd => run.counts.l4 += u64::from(unreachable.rounds),
            }
            ConnectionResult {
                final_state: unreachable.last.state,
                ledger: unreachable.last.ledger,
                broken: true,
                break_reason: Some(format!("{} {}", level.label(), unreachable)),
                purification_counts: run.counts,
            }
        }
    })
}
