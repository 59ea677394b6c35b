//! Depth-first sphere decoders on the binary MSDD tree.
//!
//! Depth `i` of the tree fixes `a_i`; the path metric of a node is the sum of
//! the branch metrics `delta_1..delta_i` and equals `Lambda(a)` at a leaf.
//! Children are enumerated in Schnorr–Euchner order (smaller branch metric
//! first, `+1` on ties), so once a child fails the radius test its sibling is
//! skipped as well.

use super::{DetectorConfig, SoftDecision, UNBOUNDED_LLR};
use crate::metric::{row_metric, row_metric_pair, AcrMatrix, Hypothesis};

/// Packing-radius stopping threshold `R_stop = L * min |Z_{l,i}|`.
pub fn stopping_radius(z: &AcrMatrix) -> f64 {
    z.block_size() as f64 * z.min_abs()
}

/// Tree-walk state shared by both decoders: the current symbols, the per-depth
/// branch counters `n_i`, the branch metric of the node just entered and the
/// number of visited nodes.
pub struct SearchTree<'a> {
    z: &'a AcrMatrix,
    symbols: Vec<i8>,
    // index 1..=L
    counters: Vec<u8>,
    delta: f64,
    nodes: u64,
}

impl<'a> SearchTree<'a> {
    pub fn new(z: &'a AcrMatrix) -> Self {
        let len = z.block_size();
        Self {
            z,
            symbols: vec![1; len],
            counters: vec![0; len + 1],
            delta: 0.0,
            nodes: 0,
        }
    }

    /// Enters the better child at depth `i` given `a_1..a_{i-1}`; returns
    /// the chosen symbol and its branch metric and sets `n_i = 1`.
    pub fn find_best(&mut self, i: usize) -> (i8, f64) {
        let (plus, minus) = row_metric_pair(self.z.row(i), &self.symbols[..i - 1]);
        let (symbol, delta) = if plus <= minus {
            (1, plus)
        } else {
            (-1, minus)
        };
        self.symbols[i - 1] = symbol;
        self.counters[i] = 1;
        self.delta = delta;
        self.nodes += 1;
        (symbol, delta)
    }

    /// Moves to the next unexplored sibling at depth `i`, ascending while both
    /// branches of a node have been used. Returns the new depth (`0` when the
    /// tree is exhausted).
    pub fn find_next(&mut self, mut i: usize) -> usize {
        while i > 0 && self.counters[i] == 2 {
            i -= 1;
        }
        if i == 0 {
            return 0;
        }
        self.symbols[i - 1] = -self.symbols[i - 1];
        self.delta = row_metric(self.z.row(i), &self.symbols[..i]);
        self.counters[i] += 1;
        self.nodes += 1;
        i
    }

    /// Symbols `a_1..a_L` of the current path (entries below the current depth are stale).
    pub fn symbols(&self) -> &[i8] {
        &self.symbols
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn nodes_visited(&self) -> u64 {
        self.nodes
    }
}

/// Soft-output MSDD by single tree search.
pub fn sosd(z: &AcrMatrix, cfg: &DetectorConfig) -> SoftDecision {
    sosd_observed(z, cfg, |_, _| {})
}

/// [`sosd`] calling `visit(depth, a_1..a_depth)` for every node whose branch
/// metric is evaluated.
pub fn sosd_observed(
    z: &AcrMatrix,
    cfg: &DetectorConfig,
    mut visit: impl FnMut(usize, &[i8]),
) -> SoftDecision {
    let len = z.block_size();
    assert_eq!(
        cfg.block_size, len,
        "detector configured for a different block size"
    );
    let scale = z.sigma_n2() * (len as f64 + 1.0);
    let lambda_max = if cfg.llr_max.is_infinite() {
        f64::INFINITY
    } else {
        scale * cfg.llr_max
    };
    let r_stop = if cfg.use_stopping_criterion {
        stopping_radius(z)
    } else {
        f64::NEG_INFINITY
    };

    let mut tree = SearchTree::new(z);
    let mut path = vec![0.0; len + 1];
    let mut counter = vec![f64::INFINITY; len + 1];
    // 0 marks "no best sequence yet"; every symbol differs from it.
    let mut best_seq = vec![0i8; len];
    let mut lambda_best = f64::INFINITY;
    let mut radius = f64::INFINITY;
    let mut early = false;

    let mut i = 1;
    tree.find_best(i);
    visit(i, &tree.symbols[..i]);
    while i != 0 {
        path[i] = tree.delta + path[i - 1];
        if path[i] < radius {
            if i != len {
                i += 1;
                tree.find_best(i);
                visit(i, &tree.symbols[..i]);
            } else {
                let leaf = path[len];
                if leaf < lambda_best {
                    for k in 1..=len {
                        if tree.symbols[k - 1] != best_seq[k - 1] {
                            counter[k] = lambda_best;
                        }
                    }
                    best_seq.copy_from_slice(&tree.symbols);
                    lambda_best = leaf;
                    if lambda_best <= r_stop {
                        early = true;
                        break;
                    }
                } else {
                    for k in 1..=len {
                        if tree.symbols[k - 1] != best_seq[k - 1] && leaf < counter[k] {
                            counter[k] = leaf;
                        }
                    }
                }
                let cap = lambda_best + lambda_max;
                for c in &mut counter[1..] {
                    if *c > cap {
                        *c = cap;
                    }
                }
                // the sibling leaf is a counterhypothesis candidate for a_L
                i = tree.find_next(len);
                if i != 0 {
                    visit(i, &tree.symbols[..i]);
                }
            }
        } else {
            i = tree.find_next(i - 1);
            if i != 0 {
                visit(i, &tree.symbols[..i]);
            }
        }
        if i != 0 {
            radius = search_radius(&counter, &tree.symbols, &best_seq, i);
        }
    }

    let mut llr = Vec::with_capacity(len);
    let mut unbounded = vec![false; len];
    let cap = lambda_best + lambda_max;
    for k in 1..=len {
        let a = f64::from(best_seq[k - 1]);
        let c = counter[k].min(cap);
        counter[k] = c;
        let value = if c.is_infinite() {
            unbounded[k - 1] = true;
            a * UNBOUNDED_LLR
        } else {
            a * (c - lambda_best) / scale
        };
        llr.push(value.clamp(-cfg.llr_max, cfg.llr_max));
    }

    SoftDecision {
        llr,
        hard: Hypothesis::new(best_seq).expect("a leaf is always reached"),
        lambda_best,
        lambda_counter: counter[1..].to_vec(),
        nodes_visited: tree.nodes,
        terminated_early: early,
        unbounded,
    }
}

/// Radius at depth `i`: only subtrees that can still improve the best metric
/// or one of the counterhypotheses are entered.
#[inline]
fn search_radius(counter: &[f64], symbols: &[i8], best: &[i8], i: usize) -> f64 {
    let mut r = counter[i..]
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    for l in 1..i {
        if symbols[l - 1] != best[l - 1] && counter[l] > r {
            r = counter[l];
        }
    }
    r
}

/// Output of the hard-output sphere decoder.
#[derive(Clone, Debug, PartialEq)]
pub struct HardDecision {
    pub hard: Hypothesis,
    pub lambda_best: f64,
    pub nodes_visited: u64,
    pub terminated_early: bool,
}

/// Hard-output MSDD: the classic sphere decoder whose radius shrinks to the
/// best leaf metric. `cfg.llr_max` is ignored.
pub fn hosd(z: &AcrMatrix, cfg: &DetectorConfig) -> HardDecision {
    hosd_observed(z, cfg, |_, _| {})
}

pub fn hosd_observed(
    z: &AcrMatrix,
    cfg: &DetectorConfig,
    mut visit: impl FnMut(usize, &[i8]),
) -> HardDecision {
    let len = z.block_size();
    assert_eq!(
        cfg.block_size, len,
        "detector configured for a different block size"
    );
    let r_stop = if cfg.use_stopping_criterion {
        stopping_radius(z)
    } else {
        f64::NEG_INFINITY
    };

    let mut tree = SearchTree::new(z);
    let mut path = vec![0.0; len + 1];
    let mut best_seq = vec![1i8; len];
    let mut radius = f64::INFINITY;
    let mut early = false;

    let mut i = 1;
    tree.find_best(i);
    visit(i, &tree.symbols[..i]);
    while i != 0 {
        path[i] = tree.delta + path[i - 1];
        if path[i] < radius {
            if i != len {
                i += 1;
                tree.find_best(i);
            } else {
                best_seq.copy_from_slice(&tree.symbols);
                radius = path[len];
                if radius <= r_stop {
                    early = true;
                    break;
                }
                i = tree.find_next(len);
            }
        } else {
            i = tree.find_next(i - 1);
        }
        if i != 0 {
            visit(i, &tree.symbols[..i]);
        }
    }

    HardDecision {
        hard: Hypothesis::new(best_seq).expect("antipodal"),
        lambda_best: radius,
        nodes_visited: tree.nodes,
        terminated_early: early,
    }
}
