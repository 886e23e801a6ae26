//! Spatial branch and bound over McCormick relaxations.
//!
//! Feasibility programs are searched depth first, exploring first the
//! child that contains the polished candidate of its parent; optimisation
//! programs are searched best first on the LP bound. Every node's LP point
//! is handed to the local solver and accepted only once the game itself
//! certifies the resulting profile.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::config::SolverConfig;
use crate::error::{validation, Result};
use crate::formulations::{evaluate_point, extract_profile, game_hash, lift_profile, MultilinearProgram, Sense, VarKind};
use crate::game::{Game, MixedProfile, PureProfile};
use crate::local::{polish_by_descent, quick_polish, LocalConfig, PolishOutcome};
use crate::lp::{solve_lp_with, LpOptions, LpStatus};
use crate::relax::{is_indicator, propagate_simplex, BoxNode, RelaxationTemplate};
use crate::report::{SolveReport, SolveStatus};

/// Fractionality threshold for indicator branching.
pub const INDICATOR_DELTA: f64 = 1e-6;
/// Product violation below which a relaxation is treated as exact.
pub const TERM_TOLERANCE: f64 = 1e-9;
/// Random starts drawn inside each node's box.
const BOX_SAMPLES: u64 = 2;
/// Boxes narrower than this are not split further.
const MIN_WIDTH: f64 = 1e-9;

/// A branching decision: `var <= split` / `var >= split`, or the two fixed
/// values of an indicator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub var: usize,
    pub split: f64,
    pub indicator: bool,
}

/// Branch selection at an LP point of `template`'s relaxation; `None` when
/// every product is exact within [`TERM_TOLERANCE`] and no indicator is
/// fractional.
pub fn branch_select(
    program: &MultilinearProgram,
    template: &RelaxationTemplate,
    node: &BoxNode,
    lp_point: &[f64],
) -> Option<Branch> {
    let mut best: Option<(usize, f64)> = None;
    for k in 0..program.variables.len() {
        if !is_indicator(program, k) || node.width(k) <= 0.0 {
            continue;
        }
        let v = lp_point[k];
        if v > INDICATOR_DELTA && v < 1.0 - INDICATOR_DELTA {
            let frac = v.min(1.0 - v);
            if best.is_none_or(|(_, f)| frac > f) {
                best = Some((k, frac));
            }
        }
    }
    if let Some((var, _)) = best {
        return Some(Branch {
            var,
            split: 0.5,
            indicator: true,
        });
    }
    let violations = template.product_violations(lp_point);
    let mut worst: Option<(usize, f64)> = None;
    for (p, &viol) in violations.iter().enumerate() {
        if viol <= TERM_TOLERANCE {
            continue;
        }
        let splittable = template.products[p].support.iter().any(|&v| node.width(v) > MIN_WIDTH);
        if splittable && worst.is_none_or(|(_, w)| viol > w) {
            worst = Some((p, viol));
        }
    }
    let (p, _) = worst?;
    let product = &template.products[p];
    let mut var = product.support[0];
    for &v in &product.support {
        if node.width(v) > node.width(var) {
            var = v;
        }
    }
    Some(spatial_split(node, var, lp_point[var]))
}

fn spatial_split(node: &BoxNode, var: usize, at: f64) -> Branch {
    let (lo, hi) = (node.lower[var], node.upper[var]);
    let w = hi - lo;
    Branch {
        var,
        split: at.clamp(lo + 0.1 * w, hi - 0.1 * w),
        indicator: false,
    }
}

fn widest(node: &BoxNode, candidates: &[usize]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for &v in candidates {
        if node.width(v) > MIN_WIDTH && best.is_none_or(|b| node.width(v) > node.width(b)) {
            best = Some(v);
        }
    }
    best
}

/// Pure profile playing each player's most likely strategy.
fn argmax_vertex(game: &Game, profile: &MixedProfile) -> MixedProfile {
    let choice = profile
        .distributions()
        .iter()
        .map(|d| (0..d.len()).fold(0, |b, k| if d[k] > d[b] { k } else { b }))
        .collect();
    MixedProfile::pure(game, &PureProfile(choice))
}

enum NodeOutcome {
    Pruned,
    Found {
        profile: MixedProfile,
        assignment: Vec<f64>,
        objective: f64,
        regret: f64,
    },
    Branched {
        children: Vec<BoxNode>,
    },
    Stopped,
}

struct Processed {
    outcome: NodeOutcome,
    lp_iterations: usize,
    candidate: Option<PolishOutcome>,
}

struct Search<'a> {
    program: &'a MultilinearProgram,
    game: &'a Game,
    template: RelaxationTemplate,
    config: &'a SolverConfig,
    local: LocalConfig,
    deadline: Option<Instant>,
    x_vars: Vec<usize>,
}

impl Search<'_> {
    fn process(&self, mut node: BoxNode, next_id: &dyn Fn() -> usize) -> Processed {
        let done = |outcome| Processed {
            outcome,
            lp_iterations: 0,
            candidate: None,
        };
        if !propagate_simplex(self.program, &mut node) {
            return done(NodeOutcome::Pruned);
        }
        let relaxation = self.template.instantiate(&node);
        let lp = solve_lp_with(
            &relaxation.lp,
            &LpOptions {
                deadline: self.deadline,
                ..LpOptions::default()
            },
        );
        let lp_iterations = lp.iterations;
        let with_iters = |outcome, candidate| Processed {
            outcome,
            lp_iterations,
            candidate,
        };
        match lp.status {
            LpStatus::Infeasible => return with_iters(NodeOutcome::Pruned, None),
            LpStatus::Optimal => {}
            LpStatus::Unresolved | LpStatus::Unbounded => {
                if self.deadline.is_some_and(|d| Instant::now() >= d) {
                    return with_iters(NodeOutcome::Stopped, None);
                }
                // Never prune on numerical trouble: split and retry.
                let Some(var) = widest(&node, &self.x_vars) else {
                    return with_iters(NodeOutcome::Pruned, None);
                };
                let mid = 0.5 * (node.lower[var] + node.upper[var]);
                let branch = Branch {
                    var,
                    split: mid,
                    indicator: false,
                };
                let bound = node.parent_bound;
                let children = self.children(&node, branch, bound, None, next_id);
                return with_iters(NodeOutcome::Branched { children }, None);
            }
        }
        let bound = lp.value + relaxation.objective_constant;
        let original = &lp.x[..self.program.variables.len()];
        let mut candidate: Option<PolishOutcome> = None;
        let mut preferred = None;
        let extracted = extract_profile(self.program, original).ok().map(|e| e.profile);
        let mut starts: Vec<MixedProfile> = Vec::new();
        let mut add = |p: Option<MixedProfile>| {
            if let Some(p) = p {
                if !starts.iter().any(|q| q.linf_distance(&p) <= 1e-9) {
                    starts.push(p);
                }
            }
        };
        add(extracted.as_ref().map(|p| argmax_vertex(self.game, p)));
        add(extracted);
        add(self.box_center(&node));
        for draw in 0..BOX_SAMPLES {
            let sample = self.box_sample(&node, draw);
            add(sample.as_ref().map(|p| argmax_vertex(self.game, p)));
            add(sample);
        }
        for start in &starts {
            if let Some(profile) = quick_polish(self.game, start, self.local.eps_regret) {
                let out = PolishOutcome {
                    max_regret: self.game.regret_report_unchecked(profile.distributions()).max_regret,
                    profile,
                    certified: true,
                };
                if let Some(found) = self.certify(&out) {
                    return with_iters(found, Some(out));
                }
            }
        }
        for start in &starts {
            if let Ok(out) = polish_by_descent(self.game, start, &self.local, self.deadline) {
                if let Some(found) = self.certify(&out) {
                    return with_iters(found, Some(out));
                }
                if preferred.is_none() {
                    preferred = lift_profile(self.program, self.game, &out.profile).ok();
                }
                if candidate.as_ref().is_none_or(|c| out.max_regret < c.max_regret) {
                    candidate = Some(out);
                }
            }
        }
        let branch = match branch_select(self.program, &self.template, &node, &lp.x) {
            Some(b) => b,
            None => match widest(&node, &self.x_vars) {
                Some(var) => Branch {
                    var,
                    split: 0.5 * (node.lower[var] + node.upper[var]),
                    indicator: false,
                },
                None => return with_iters(NodeOutcome::Pruned, candidate),
            },
        };
        let children = self.children(&node, branch, bound, preferred.as_deref(), next_id);
        with_iters(NodeOutcome::Branched { children }, candidate)
    }

    /// Centre of the node's `x` box, renormalised per player.
    fn box_center(&self, node: &BoxNode) -> Option<MixedProfile> {
        let dists = self
            .program
            .x_indices()
            .iter()
            .map(|xi| {
                let mid: Vec<f64> = xi.iter().map(|&k| 0.5 * (node.lower[k] + node.upper[k])).collect();
                let sum: f64 = mid.iter().sum();
                mid.into_iter().map(|v| v / sum).collect()
            })
            .collect();
        MixedProfile::new(dists).ok()
    }

    /// Dirichlet draw clamped to the node's `x` box, seeded by the node id.
    fn box_sample(&self, node: &BoxNode, draw: u64) -> Option<MixedProfile> {
        let stream = (node.id as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed ^ stream);
        rng.set_stream(draw);
        let dists = self
            .program
            .x_indices()
            .iter()
            .map(|xi| {
                let draw: Vec<f64> = xi.iter().map(|_| Exp1.sample(&mut rng)).collect();
                let total: f64 = draw.iter().sum();
                let clamped: Vec<f64> = xi
                    .iter()
                    .zip(draw)
                    .map(|(&k, e)| (e / total).clamp(node.lower[k], node.upper[k]))
                    .collect();
                let sum: f64 = clamped.iter().sum();
                clamped.into_iter().map(|v| v / sum).collect()
            })
            .collect();
        MixedProfile::new(dists).ok()
    }

    /// Accepts a polished candidate once its regret and its lifted point
    /// pass the tolerances.
    fn certify(&self, out: &PolishOutcome) -> Option<NodeOutcome> {
        if !out.certified {
            return None;
        }
        let regret = self.game.max_regret(&out.profile).ok()?;
        if regret > self.config.eps_regret {
            return None;
        }
        let assignment = lift_profile(self.program, self.game, &out.profile).ok()?;
        let eval = evaluate_point(self.program, &assignment).ok()?;
        if eval.max_violation > self.config.eps_feas {
            return None;
        }
        Some(NodeOutcome::Found {
            profile: out.profile.clone(),
            assignment,
            objective: eval.objective,
            regret,
        })
    }

    /// Children of `node`, preferred child (containing `preferred`) first.
    fn children(
        &self,
        node: &BoxNode,
        branch: Branch,
        bound: f64,
        preferred: Option<&[f64]>,
        next_id: &dyn Fn() -> usize,
    ) -> Vec<BoxNode> {
        let mut low = node.clone();
        let mut high = node.clone();
        if branch.indicator {
            low.upper[branch.var] = 0.0;
            high.lower[branch.var] = 1.0;
        } else {
            low.upper[branch.var] = branch.split;
            high.lower[branch.var] = branch.split;
        }
        let high_first = preferred.is_some_and(|p| {
            let v = p[branch.var];
            if branch.indicator {
                v > 0.5
            } else {
                v > branch.split
            }
        });
        let mut out = if high_first { vec![high, low] } else { vec![low, high] };
        for child in &mut out {
            child.depth = node.depth + 1;
            child.parent_bound = bound;
            child.pending_branch = Some(branch.var);
            child.id = next_id();
        }
        out
    }
}

/// Queue entry for best-first search.
struct Ranked {
    key: f64,
    node: BoxNode,
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    /// Smallest key first, then lowest id.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.node.id.cmp(&self.node.id))
    }
}

enum Frontier {
    Stack(Vec<BoxNode>),
    Heap(BinaryHeap<Ranked>, f64),
}

impl Frontier {
    fn pop(&mut self) -> Option<BoxNode> {
        match self {
            Frontier::Stack(s) => s.pop(),
            Frontier::Heap(h, _) => h.pop().map(|r| r.node),
        }
    }

    /// Children arrive preferred first.
    fn push_children(&mut self, children: Vec<BoxNode>) {
        match self {
            Frontier::Stack(s) => s.extend(children.into_iter().rev()),
            Frontier::Heap(h, sign) => {
                for node in children {
                    h.push(Ranked {
                        key: *sign * node.parent_bound,
                        node,
                    });
                }
            }
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            Frontier::Stack(s) => s.is_empty(),
            Frontier::Heap(h, _) => h.is_empty(),
        }
    }
}

/// Solves `program` for `game` and certifies the result against the game.
pub fn solve(program: &MultilinearProgram, game: &Game, config: &SolverConfig) -> Result<SolveReport> {
    config.validate()?;
    if program.metadata.game_hash != game_hash(game) {
        return Err(validation("program was built from a different game"));
    }
    program.validate()?;
    let clock = Instant::now();
    let deadline = config.time_limit_duration().map(|d| clock + d);
    let sense = program.objective.sense;
    let mut local = LocalConfig::from(config);
    local.max_iters = local.max_iters.min(500);
    let x_vars: Vec<usize> = program
        .variables
        .iter()
        .enumerate()
        .filter(|(_, v)| matches!(v.kind, VarKind::X { .. }))
        .map(|(k, _)| k)
        .collect();
    let search = Search {
        program,
        game,
        template: RelaxationTemplate::new(program),
        config,
        local,
        deadline,
        x_vars,
    };
    let root = BoxNode::root(program);
    let mut frontier = match sense {
        Sense::Feasibility => Frontier::Stack(vec![root]),
        Sense::Min => Frontier::Heap(BinaryHeap::from([Ranked { key: f64::NEG_INFINITY, node: root }]), 1.0),
        Sense::Max => Frontier::Heap(BinaryHeap::from([Ranked { key: f64::NEG_INFINITY, node: root }]), -1.0),
    };
    let counter = std::sync::atomic::AtomicUsize::new(1);
    let next_id = || counter.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
    let workers = config.effective_workers();

    let mut nodes = 0usize;
    let mut lp_iterations = 0usize;
    let mut best: Option<PolishOutcome> = None;
    let mut status = None;
    let mut found: Option<(MixedProfile, Vec<f64>, f64, f64)> = None;

    'search: while !frontier.is_empty() {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            status = Some(SolveStatus::TimeLimit);
            break;
        }
        let mut batch = Vec::with_capacity(workers);
        while batch.len() < workers {
            if config.node_limit.is_some_and(|limit| nodes + batch.len() >= limit) {
                break;
            }
            match frontier.pop() {
                Some(n) => batch.push(n),
                None => break,
            }
        }
        if batch.is_empty() {
            status = Some(SolveStatus::NodeLimit);
            break;
        }
        nodes += batch.len();
        let results: Vec<Processed> = if batch.len() == 1 {
            vec![search.process(batch.pop().expect("one node"), &next_id)]
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = batch
                    .into_iter()
                    .map(|node| {
                        let search = &search;
                        let next_id = &next_id;
                        scope.spawn(move || search.process(node, next_id))
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("node worker panicked")).collect()
            })
        };
        for r in results {
            lp_iterations += r.lp_iterations;
            if let Some(c) = r.candidate {
                if best.as_ref().is_none_or(|b| c.max_regret < b.max_regret) {
                    best = Some(c);
                }
            }
            match r.outcome {
                NodeOutcome::Pruned => {}
                NodeOutcome::Stopped => {
                    status = Some(SolveStatus::TimeLimit);
                    break 'search;
                }
                NodeOutcome::Found {
                    profile,
                    assignment,
                    objective,
                    regret,
                } => {
                    // Lifted equilibria attain the known optimal value, so a
                    // certified incumbent ends optimisation programs too.
                    found = Some((profile, assignment, objective, regret));
                    break 'search;
                }
                NodeOutcome::Branched { children } => frontier.push_children(children),
            }
        }
    }
    let wall_time = clock.elapsed().as_secs_f64();
    if let Some((profile, assignment, objective, _)) = found {
        let max_regret = game.max_regret(&profile)?;
        if max_regret <= config.eps_regret {
            return Ok(SolveReport {
                status: SolveStatus::EquilibriumFound,
                profile: Some(profile),
                assignment,
                max_regret,
                objective,
                nodes_explored: nodes,
                lp_iterations,
                wall_time,
            });
        }
    }
    let status = status.unwrap_or(SolveStatus::Infeasible);
    let (profile, assignment, max_regret, objective) = match best {
        Some(b) => {
            let assignment = lift_profile(program, game, &b.profile)?;
            let objective = evaluate_point(program, &assignment)?.objective;
            let r = game.max_regret(&b.profile)?;
            (Some(b.profile), assignment, r, objective)
        }
        None => (None, Vec::new(), f64::INFINITY, f64::NAN),
    };
    Ok(SolveReport {
        status,
        profile,
        assignment,
        max_regret,
        objective,
        nodes_explored: nodes,
        lp_iterations,
        wall_time,
    })
}
