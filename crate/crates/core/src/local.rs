//! Multistart local search on the exploitability merit
//! `Φ(x) = Σ_i (ū^i - E_i)²`, plus a support-restricted Newton step that
//! turns a nearby approximate equilibrium into an exact one.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::config::{SolverConfig, StepRule};
use crate::error::{validation, Result};
use crate::formulations::big_m;
use crate::game::{dot, for_each_profile, Game, MixedProfile};
use crate::report::{SolveReport, SolveStatus};

const ARMIJO: f64 = 1e-4;
const NEWTON_ITERS: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct LocalConfig {
    pub max_starts: usize,
    pub max_iters: usize,
    pub step_rule: StepRule,
    /// Step length of the fixed rule.
    pub step_size: f64,
    pub eps_regret: f64,
    pub seed: u64,
}

impl Default for LocalConfig {
    fn default() -> Self {
        LocalConfig::from(&SolverConfig::default())
    }
}

impl From<&SolverConfig> for LocalConfig {
    fn from(c: &SolverConfig) -> Self {
        LocalConfig {
            max_starts: c.max_starts,
            max_iters: c.max_iters,
            step_rule: c.step_rule,
            step_size: c.step_size,
            eps_regret: c.eps_regret,
            seed: c.seed,
        }
    }
}

impl LocalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_starts == 0 || self.max_iters == 0 {
            return Err(validation("max_starts and max_iters must be positive"));
        }
        if !(self.eps_regret > 0.0) || !(self.step_size > 0.0) {
            return Err(validation("eps_regret and step_size must be positive"));
        }
        Ok(())
    }
}

/// `∂u_s^i / ∂x_t^j` for every ordered pair of distinct players, stored as
/// row-major `n_i × n_j` blocks; diagonal blocks are empty.
pub struct UtilityPartials {
    counts: Vec<usize>,
    blocks: Vec<Vec<Vec<f64>>>,
}

impl UtilityPartials {
    pub fn new(game: &Game, x: &[Vec<f64>]) -> Self {
        let counts = game.strategy_counts().to_vec();
        let n = counts.len();
        let mut blocks: Vec<Vec<Vec<f64>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Vec::new() } else { vec![0.0; counts[i] * counts[j]] })
                    .collect()
            })
            .collect();
        let payoffs = game.all_payoffs();
        for_each_profile(&counts, |flat, s| {
            for i in 0..n {
                let a = payoffs[i][flat];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let mut w = a;
                    for (k, &sk) in s.iter().enumerate() {
                        if k != i && k != j {
                            w *= x[k][sk];
                        }
                    }
                    blocks[i][j][s[i] * counts[j] + s[j]] += w;
                }
            }
        });
        UtilityPartials { counts, blocks }
    }

    pub fn get(&self, i: usize, j: usize, s: usize, t: usize) -> f64 {
        self.blocks[i][j][s * self.counts[j] + t]
    }

    /// `u^i` recovered through any opponent `j`.
    pub fn utilities(&self, x: &[Vec<f64>], i: usize) -> Vec<f64> {
        let j = (i + 1) % self.counts.len();
        (0..self.counts[i])
            .map(|s| (0..self.counts[j]).map(|t| self.get(i, j, s, t) * x[j][t]).sum())
            .collect()
    }
}

/// Per-player exploitabilities `ū^i - E_i` at `x`.
fn exploitabilities(game: &Game, x: &[Vec<f64>]) -> Vec<f64> {
    (0..game.num_players())
        .map(|i| {
            let u = game.utilities_unchecked(x, i);
            let best = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (best - dot(&x[i], &u)).max(0.0)
        })
        .collect()
}

fn merit_of(e: &[f64]) -> f64 {
    e.iter().map(|v| v * v).sum()
}

/// `Φ(x) = Σ_i (ū^i - E_i)²`; zero exactly at Nash equilibria.
pub fn merit(game: &Game, profile: &MixedProfile) -> Result<f64> {
    game.check_profile(profile)?;
    Ok(merit_of(&exploitabilities(game, profile.distributions())))
}

/// Analytic gradient of `Φ`, taking the first maximiser for `ū^i`.
pub fn merit_gradient(game: &Game, profile: &MixedProfile) -> Result<Vec<Vec<f64>>> {
    game.check_profile(profile)?;
    Ok(gradient_unchecked(game, profile.distributions()))
}

/// Gradient of `Φ` at any point of the product of boxes, not only at
/// valid profiles; `x` need not sum to one.
pub fn gradient_unchecked(game: &Game, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = game.num_players();
    let partials = UtilityPartials::new(game, x);
    let mut grad: Vec<Vec<f64>> = x.iter().map(|xi| vec![0.0; xi.len()]).collect();
    for i in 0..n {
        let u = partials.utilities(x, i);
        let (star, best) = u
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (s, v)| if v > acc.1 { (s, v) } else { acc });
        let e = best - dot(&x[i], &u);
        if e == 0.0 {
            continue;
        }
        for (t, g) in grad[i].iter_mut().enumerate() {
            *g -= 2.0 * e * u[t];
        }
        for j in (0..n).filter(|&j| j != i) {
            for t in 0..x[j].len() {
                let dbest = partials.get(i, j, star, t);
                let dpay: f64 = (0..x[i].len()).map(|s| x[i][s] * partials.get(i, j, s, t)).sum();
                grad[j][t] += 2.0 * e * (dbest - dpay);
            }
        }
    }
    grad
}

/// Euclidean projection onto the probability simplex (sort and threshold).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &value) in sorted.iter().enumerate() {
        cum += value;
        let t = (cum - 1.0) / (k + 1) as f64;
        if value - t > 0.0 {
            theta = t;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|&a| (a - theta).max(0.0)).collect();
    let sum: f64 = out.iter().sum();
    if (sum - 1.0).abs() > 1e-15 && sum > 0.0 {
        out.iter_mut().for_each(|a| *a /= sum);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentTrace {
    pub profile: MixedProfile,
    /// `Φ` at the start and after every accepted step.
    pub merits: Vec<f64>,
    pub max_regret: f64,
}

/// Projected gradient descent on `Φ`; always returns a valid profile.
pub fn descend(game: &Game, start: &MixedProfile, config: &LocalConfig) -> Result<MixedProfile> {
    Ok(descend_traced(game, start, config, None)?.profile)
}

pub fn descend_traced(
    game: &Game,
    start: &MixedProfile,
    config: &LocalConfig,
    deadline: Option<Instant>,
) -> Result<DescentTrace> {
    game.check_profile(start)?;
    config.validate()?;
    let spread = (0..game.num_players()).map(|i| big_m(game, i)).fold(1.0, f64::max);
    let mut x = start.distributions().to_vec();
    let mut e = exploitabilities(game, &x);
    let mut phi = merit_of(&e);
    let mut merits = vec![phi];
    let mut alpha = 1.0 / (spread * spread);
    for it in 0..config.max_iters {
        if e.iter().copied().fold(0.0, f64::max) <= config.eps_regret {
            break;
        }
        if it % 32 == 0 && deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        let g = gradient_unchecked(game, &x);
        let step = |a: f64| -> Vec<Vec<f64>> {
            x.iter()
                .zip(&g)
                .map(|(xi, gi)| {
                    let moved: Vec<f64> = xi.iter().zip(gi).map(|(v, d)| v - a * d).collect();
                    project_simplex(&moved)
                })
                .collect()
        };
        let (next, next_e) = match config.step_rule {
            StepRule::Fixed => {
                let next = step(config.step_size);
                let ne = exploitabilities(game, &next);
                (next, ne)
            }
            StepRule::Backtracking => {
                alpha *= 2.0;
                let mut accepted = None;
                while alpha > 1e-20 {
                    let cand = step(alpha);
                    let decrease: f64 = cand
                        .iter()
                        .flatten()
                        .zip(x.iter().flatten())
                        .zip(g.iter().flatten())
                        .map(|((c, v), d)| d * (c - v))
                        .sum();
                    let ce = exploitabilities(game, &cand);
                    if merit_of(&ce) <= phi + ARMIJO * decrease && decrease < 0.0 {
                        accepted = Some((cand, ce));
                        break;
                    }
                    alpha *= 0.5;
                }
                match accepted {
                    Some(a) => a,
                    None => break,
                }
            }
        };
        x = next;
        e = next_e;
        phi = merit_of(&e);
        merits.push(phi);
    }
    let max_regret = e.iter().copied().fold(0.0, f64::max);
    Ok(DescentTrace {
        profile: MixedProfile::new(x)?,
        merits,
        max_regret,
    })
}

/// Solves the indifference system `u_s^i = v_i` on a fixed support by
/// Newton's method. Returns the solution if it is a valid profile; the
/// caller certifies it.
pub fn solve_on_support(game: &Game, support: &[Vec<usize>], start: &[Vec<f64>]) -> Option<MixedProfile> {
    let mut x = newton_on_support(game, support, start)?;
    if x.iter().flatten().any(|&p| p < -1e-9) {
        return None;
    }
    for xi in &mut x {
        xi.iter_mut().for_each(|p| *p = p.max(0.0));
        let sum: f64 = xi.iter().sum();
        xi.iter_mut().for_each(|p| *p /= sum);
    }
    MixedProfile::new(x).ok()
}

/// Raw Newton iterate on a support; entries may be negative.
fn newton_on_support(game: &Game, support: &[Vec<usize>], start: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = game.num_players();
    if support.iter().any(Vec::is_empty) {
        return None;
    }
    let counts = game.strategy_counts();
    let mut offsets = Vec::with_capacity(n);
    let mut dim = 0;
    for s in support {
        offsets.push(dim);
        dim += s.len();
    }
    let size = dim + n;
    let mut x: Vec<Vec<f64>> = counts.iter().map(|&c| vec![0.0; c]).collect();
    for (i, s) in support.iter().enumerate() {
        let total: f64 = s.iter().map(|&k| start[i][k].max(0.0)).sum();
        for &k in s {
            x[i][k] = if total > 0.0 {
                start[i][k].max(0.0) / total
            } else {
                1.0 / s.len() as f64
            };
        }
    }
    let mut v: Vec<f64> = (0..n)
        .map(|i| {
            let u = game.utilities_unchecked(&x, i);
            support[i].iter().map(|&k| u[k]).sum::<f64>() / support[i].len() as f64
        })
        .collect();
    let scale = (0..n).map(|i| big_m(game, i)).fold(1.0, f64::max);
    for _ in 0..NEWTON_ITERS {
        let partials = UtilityPartials::new(game, &x);
        let mut f = DVector::zeros(size);
        let mut jac = DMatrix::zeros(size, size);
        for i in 0..n {
            let u = partials.utilities(&x, i);
            for (a, &s) in support[i].iter().enumerate() {
                let row = offsets[i] + a;
                f[row] = u[s] - v[i];
                jac[(row, dim + i)] = -1.0;
                for j in (0..n).filter(|&j| j != i) {
                    for (b, &t) in support[j].iter().enumerate() {
                        jac[(row, offsets[j] + b)] = partials.get(i, j, s, t);
                    }
                }
            }
            let row = dim + i;
            f[row] = support[i].iter().map(|&s| x[i][s]).sum::<f64>() - 1.0;
            for b in 0..support[i].len() {
                jac[(row, offsets[i] + b)] = 1.0;
            }
        }
        let resid = f.amax();
        if resid <= 1e-13 * scale {
            break;
        }
        let delta = jac.lu().solve(&(-f))?;
        if delta.iter().any(|d| !d.is_finite()) {
            return None;
        }
        for i in 0..n {
            for (a, &s) in support[i].iter().enumerate() {
                x[i][s] += delta[offsets[i] + a];
            }
            v[i] += delta[dim + i];
        }
        if x.iter().flatten().any(|&p| !(-0.5..=1.5).contains(&p)) {
            return None;
        }
    }
    Some(x)
}

/// Candidate supports read off an approximate equilibrium: threshold
/// supports first, then the top-ranked strategies (by regret, then by
/// probability) for support sizes next to the apparent ones.
fn candidate_supports(game: &Game, x: &[Vec<f64>]) -> Vec<Vec<Vec<usize>>> {
    let report = game.regret_report_unchecked(x);
    let n = x.len();
    let mut out: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut push = |mut cand: Vec<Vec<usize>>| {
        cand.iter_mut().for_each(|s| s.sort_unstable());
        if cand.iter().all(|s| !s.is_empty()) && !out.contains(&cand) {
            out.push(cand);
        }
    };
    for tau in [1e-2, 1e-4] {
        push(
            x.iter()
                .map(|xi| (0..xi.len()).filter(|&s| xi[s] > tau).collect())
                .collect(),
        );
    }
    for delta in [1e-3, 1e-2] {
        push(
            (0..n)
                .map(|i| {
                    let tol = delta * big_m(game, i);
                    (0..x[i].len()).filter(|&s| report.regrets[i][s] <= tol).collect()
                })
                .collect(),
        );
    }
    let by_regret: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut order: Vec<usize> = (0..x[i].len()).collect();
            order.sort_by(|&a, &b| {
                report.regrets[i][a]
                    .total_cmp(&report.regrets[i][b])
                    .then(x[i][b].total_cmp(&x[i][a]))
            });
            order
        })
        .collect();
    let by_prob: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut order: Vec<usize> = (0..x[i].len()).collect();
            order.sort_by(|&a, &b| x[i][b].total_cmp(&x[i][a]));
            order
        })
        .collect();
    let apparent: Vec<usize> = x
        .iter()
        .map(|xi| xi.iter().filter(|&&p| p > 1e-2).count().max(1))
        .collect();
    for sizes in size_neighbourhood(&apparent, game.strategy_counts()) {
        for ranking in [&by_regret, &by_prob] {
            push((0..n).map(|i| ranking[i][..sizes[i]].to_vec()).collect());
        }
    }
    out
}

/// Support-size vectors within one of `apparent` per player, closest
/// first. Two-player vectors are balanced, as generic bimatrix equilibria
/// have equal support sizes.
fn size_neighbourhood(apparent: &[usize], counts: &[usize]) -> Vec<Vec<usize>> {
    let ranges: Vec<(usize, usize)> = if apparent.len() == 2 {
        let lo = apparent.iter().min().copied().unwrap_or(1).saturating_sub(1).max(1);
        let hi = (apparent.iter().max().copied().unwrap_or(1) + 1).min(counts[0].min(counts[1]));
        let mut out: Vec<Vec<usize>> = (lo..=hi.max(lo)).filter(|&k| k <= counts[0].min(counts[1])).map(|k| vec![k, k]).collect();
        out.sort_by_key(|v| v[0].abs_diff(apparent[0]) + v[1].abs_diff(apparent[1]));
        return out;
    } else {
        apparent
            .iter()
            .zip(counts)
            .map(|(&a, &c)| (a.saturating_sub(1).max(1), (a + 1).min(c)))
            .collect()
    };
    let mut out = vec![Vec::new()];
    for &(lo, hi) in &ranges {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                (lo..=hi).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out.sort_by_key(|v| v.iter().zip(apparent).map(|(&k, &a)| k.abs_diff(a)).sum::<usize>());
    out
}

/// Tries Newton on the supports suggested by `x`; returns the first
/// solution certified at `eps`.
pub fn refine_support(game: &Game, x: &[Vec<f64>], eps: f64) -> Option<MixedProfile> {
    for support in candidate_supports(game, x) {
        if let Some(p) = solve_on_support(game, &support, x) {
            if game.regret_report_unchecked(p.distributions()).max_regret <= eps {
                return Some(p);
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolishOutcome {
    pub profile: MixedProfile,
    pub max_regret: f64,
    pub certified: bool,
}

/// Short local improvement of a candidate point: Newton on the apparent
/// support, then descent followed by another Newton attempt.
pub fn polish(game: &Game, start: &MixedProfile, config: &LocalConfig, deadline: Option<Instant>) -> Result<PolishOutcome> {
    game.check_profile(start)?;
    if let Some(p) = quick_polish(game, start, config.eps_regret) {
        let r = game.max_regret(&p)?;
        return Ok(PolishOutcome {
            profile: p,
            max_regret: r,
            certified: true,
        });
    }
    polish_by_descent(game, start, config, deadline)
}

/// The cheap half of [`polish`]: the start itself, Newton on its apparent
/// supports, or a pure best-response walk from it.
pub fn quick_polish(game: &Game, start: &MixedProfile, eps: f64) -> Option<MixedProfile> {
    let x = start.distributions();
    if game.regret_report_unchecked(x).max_regret <= eps {
        return Some(start.clone());
    }
    refine_support(game, x, eps).or_else(|| best_response_walk(game, x))
}

/// The expensive half of [`polish`]: descent, then Newton on the supports
/// of the descended point.
pub fn polish_by_descent(
    game: &Game,
    start: &MixedProfile,
    config: &LocalConfig,
    deadline: Option<Instant>,
) -> Result<PolishOutcome> {
    let eps = config.eps_regret;
    let start_regret = game.max_regret(start)?;
    let trace = descend_traced(game, start, config, deadline)?;
    let mut best = if trace.max_regret < start_regret {
        PolishOutcome {
            profile: trace.profile.clone(),
            max_regret: trace.max_regret,
            certified: trace.max_regret <= eps,
        }
    } else {
        PolishOutcome {
            profile: start.clone(),
            max_regret: start_regret,
            certified: start_regret <= eps,
        }
    };
    if !best.certified {
        if let Some(p) = refine_support(game, trace.profile.distributions(), eps) {
            let r = game.max_regret(&p)?;
            best = PolishOutcome {
                profile: p,
                max_regret: r,
                certified: true,
            };
        }
    }
    Ok(best)
}

/// Sequential pure best-response dynamics started from the best responses
/// to `x`; returns the pure equilibrium it reaches, if any.
pub fn best_response_walk(game: &Game, x: &[Vec<f64>]) -> Option<MixedProfile> {
    let n = game.num_players();
    let strides = game.strides();
    let argmax = |v: &mut dyn Iterator<Item = f64>| {
        let mut best = (0, f64::NEG_INFINITY);
        for (k, val) in v.enumerate() {
            if val > best.1 {
                best = (k, val);
            }
        }
        best.0
    };
    let mut s: Vec<usize> = (0..n)
        .map(|i| argmax(&mut game.utilities_unchecked(x, i).into_iter()))
        .collect();
    for _ in 0..2 * game.total_strategies() {
        let mut moved = false;
        for i in 0..n {
            let base: usize = s.iter().zip(&strides).enumerate().filter(|&(j, _)| j != i).map(|(_, (a, b))| a * b).sum();
            let tensor = game.payoffs(i);
            let current = tensor[base + s[i] * strides[i]];
            let best = argmax(&mut (0..game.num_strategies(i)).map(|t| tensor[base + t * strides[i]]));
            if tensor[base + best * strides[i]] > current {
                s[i] = best;
                moved = true;
            }
        }
        if !moved {
            let pure = crate::game::PureProfile(s);
            return Some(MixedProfile::pure(game, &pure));
        }
    }
    None
}

/// Every pure profile as a mixed profile, in lexicographic order.
pub fn vertex_starts(game: &Game) -> Vec<MixedProfile> {
    let mut out = Vec::new();
    for_each_profile(game.strategy_counts(), |_, s| {
        let dists = s
            .iter()
            .zip(game.strategy_counts())
            .map(|(&k, &c)| (0..c).map(|t| if t == k { 1.0 } else { 0.0 }).collect())
            .collect();
        out.push(MixedProfile::new(dists).expect("vertex is a valid profile"));
    });
    out
}

fn dirichlet_profile(game: &Game, rng: &mut ChaCha8Rng) -> MixedProfile {
    let dists = game
        .strategy_counts()
        .iter()
        .map(|&c| {
            let draws: Vec<f64> = (0..c).map(|_| Exp1.sample(rng)).collect();
            let sum: f64 = draws.iter().sum();
            draws.into_iter().map(|d: f64| d / sum).collect()
        })
        .collect();
    MixedProfile::new(dists).expect("normalised draw is a valid profile")
}

/// The fixed start schedule: the uniform profile, then Dirichlet(1) samples
/// for half of the remaining slots, then pure profiles in lexicographic
/// order, then further samples if the vertices run out.
pub fn start_schedule(game: &Game, config: &LocalConfig) -> Vec<MixedProfile> {
    let total = config.max_starts;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut starts = vec![MixedProfile::uniform(game)];
    let random = (total.saturating_sub(1) + 1) / 2;
    while starts.len() < total.min(1 + random) {
        starts.push(dirichlet_profile(game, &mut rng));
    }
    if starts.len() < total && game.num_profiles() <= 1 << 16 {
        for v in vertex_starts(game) {
            if starts.len() >= total {
                break;
            }
            starts.push(v);
        }
    }
    while starts.len() < total {
        starts.push(dirichlet_profile(game, &mut rng));
    }
    starts
}

/// Runs [`polish`] from each start until one is certified.
pub fn multistart(game: &Game, config: &SolverConfig) -> Result<SolveReport> {
    let local = LocalConfig::from(config);
    let starts = start_schedule(game, &local);
    multistart_from(game, &starts, config)
}

/// Multistart over explicit starts. `nodes_explored` reports the number of
/// starts used; `objective` is `Φ` at the returned profile.
pub fn multistart_from(game: &Game, starts: &[MixedProfile], config: &SolverConfig) -> Result<SolveReport> {
    config.validate()?;
    let local = LocalConfig::from(config);
    local.validate()?;
    let clock = Instant::now();
    let deadline = config.time_limit_duration().map(|d| clock + d);
    let mut best: Option<PolishOutcome> = None;
    let mut used = 0;
    let mut timed_out = false;
    for start in starts {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            timed_out = true;
            break;
        }
        used += 1;
        let out = polish(game, start, &local, deadline)?;
        let done = out.certified;
        if best.as_ref().is_none_or(|b| out.max_regret < b.max_regret) {
            best = Some(out);
        }
        if done {
            break;
        }
    }
    let wall_time = clock.elapsed().as_secs_f64();
    let Some(best) = best else {
        return Ok(SolveReport {
            status: SolveStatus::TimeLimit,
            profile: None,
            assignment: Vec::new(),
            max_regret: f64::INFINITY,
            objective: f64::NAN,
            nodes_explored: 0,
            lp_iterations: 0,
            wall_time,
        });
    };
    // Certify from scratch rather than trusting the search bookkeeping.
    let max_regret = game.max_regret(&best.profile)?;
    let status = if max_regret <= config.eps_regret {
        SolveStatus::EquilibriumFound
    } else if timed_out || deadline.is_some_and(|d| Instant::now() >= d) {
        SolveStatus::TimeLimit
    } else {
        SolveStatus::NodeLimit
    };
    Ok(SolveReport {
        status,
        objective: merit(game, &best.profile)?,
        profile: Some(best.profile),
        assignment: Vec::new(),
        max_regret,
        nodes_explored: used,
        lp_iterations: 0,
        wall_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{named_game, InstanceSpec};

    #[test]
    fn merit_examples() {
        let g = named_game("matching_pennies").unwrap();
        assert_eq!(merit(&g, &MixedProfile::uniform(&g)).unwrap(), 0.0);
        let p = MixedProfile::new(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        assert_eq!(merit(&g, &p).unwrap(), 1.0);
    }

    #[test]
    fn projection_basics() {
        let p = project_simplex(&[0.2, 0.3, 0.5]);
        assert!(p.iter().zip([0.2, 0.3, 0.5]).all(|(a, b)| (a - b).abs() < 1e-15));
        assert_eq!(project_simplex(&[3.0, 0.0]), vec![1.0, 0.0]);
        let q = project_simplex(&[0.5, 0.5, -2.0]);
        assert_eq!(q, vec![0.5, 0.5, 0.0]);
    }

    #[test]
    fn equilibrium_start_is_fixed_point() {
        let g = named_game("matching_pennies").unwrap();
        let u = MixedProfile::uniform(&g);
        assert_eq!(descend(&g, &u, &LocalConfig::default()).unwrap(), u);
    }

    #[test]
    fn matching_pennies_descent_converges() {
        let g = named_game("matching_pennies").unwrap();
        let start = MixedProfile::new(vec![vec![0.9, 0.1], vec![0.9, 0.1]]).unwrap();
        let cfg = LocalConfig {
            max_iters: 10_000,
            eps_regret: 1e-9,
            ..LocalConfig::default()
        };
        let trace = descend_traced(&g, &start, &cfg, None).unwrap();
        assert!(trace.profile.linf_distance(&MixedProfile::uniform(&g)) < 1e-4);
        assert!(trace.merits.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn newton_recovers_mixed_equilibrium() {
        let g = named_game("coordination_2x2").unwrap();
        let support = vec![vec![0, 1], vec![0, 1]];
        let p = solve_on_support(&g, &support, &[vec![0.3, 0.7], vec![0.6, 0.4]]).unwrap();
        assert!(g.max_regret(&p).unwrap() < 1e-12);
    }

    #[test]
    fn multistart_examples() {
        let cfg = SolverConfig {
            max_starts: 5,
            ..SolverConfig::default()
        };
        let g = named_game("matching_pennies").unwrap();
        assert!(multistart(&g, &cfg).unwrap().is_solved());

        let rps = named_game("rock_paper_scissors").unwrap();
        let r = multistart(&rps, &cfg).unwrap();
        assert!(r.profile.unwrap().linf_distance(&MixedProfile::uniform(&rps)) < 1e-4);

        let coord = named_game("coordination_2x2").unwrap();
        let r = multistart_from(&coord, &vertex_starts(&coord), &cfg).unwrap();
        assert!(r.is_solved() && r.nodes_explored <= 2);
    }

    #[test]
    fn schedule_is_seeded() {
        let g = InstanceSpec::random(3, 3, 1).generate().unwrap();
        let cfg = LocalConfig {
            max_starts: 12,
            ..LocalConfig::default()
        };
        let a = start_schedule(&g, &cfg);
        assert_eq!(a, start_schedule(&g, &cfg));
        assert_eq!(a.len(), 12);
        assert_eq!(a[0], MixedProfile::uniform(&g));
        assert_eq!(a[7], vertex_starts(&g)[0]);
    }
}
