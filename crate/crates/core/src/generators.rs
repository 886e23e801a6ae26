//! Seedable instance families: random games RG(n,k), covariance games
//! CG(n,k,ρ) and a handful of named textbook games.
//!
//! Every payoff entry is drawn from its own ChaCha8 stream position keyed by
//! `(seed, player, flat profile index)`, so an instance is a pure function of
//! its [`InstanceSpec`] and entries can be regenerated independently.
//!
//! The covariance construction mirrors GAMUT's covariant game: one
//! equicorrelated standard-normal vector per profile, scaled so that ±3σ
//! spans the payoff range, rounded and clamped.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{validation, Error, Result};
use crate::game::Game;

pub const DEFAULT_PAYOFF_LOW: i64 = -100;
pub const DEFAULT_PAYOFF_HIGH: i64 = 100;

/// Identifiers accepted by [`named_game`].
pub const NAMED_GAMES: [&str; 4] = [
    "matching_pennies",
    "rock_paper_scissors",
    "coordination_2x2",
    "three_player_majority",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Random,
    Covariance,
    Named,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub family: Family,
    pub strategy_counts: Vec<usize>,
    /// Pairwise payoff correlation, covariance games only.
    pub rho: f64,
    pub payoff_low: i64,
    pub payoff_high: i64,
    pub seed: u64,
    pub named_id: Option<String>,
}

impl InstanceSpec {
    /// RG(n,k) with the default payoff range.
    pub fn random(num_players: usize, strategies: usize, seed: u64) -> Self {
        InstanceSpec {
            family: Family::Random,
            strategy_counts: vec![strategies; num_players],
            rho: 0.0,
            payoff_low: DEFAULT_PAYOFF_LOW,
            payoff_high: DEFAULT_PAYOFF_HIGH,
            seed,
            named_id: None,
        }
    }

    /// CG(n,k,ρ) with the default payoff range.
    pub fn covariance(num_players: usize, strategies: usize, rho: f64, seed: u64) -> Self {
        InstanceSpec {
            family: Family::Covariance,
            rho,
            ..InstanceSpec::random(num_players, strategies, seed)
        }
    }

    pub fn named(id: &str) -> Self {
        InstanceSpec {
            family: Family::Named,
            strategy_counts: Vec::new(),
            rho: 0.0,
            payoff_low: DEFAULT_PAYOFF_LOW,
            payoff_high: DEFAULT_PAYOFF_HIGH,
            seed: 0,
            named_id: Some(id.to_string()),
        }
    }

    pub fn with_range(mut self, low: i64, high: i64) -> Self {
        self.payoff_low = low;
        self.payoff_high = high;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn num_players(&self) -> usize {
        self.strategy_counts.len()
    }

    /// The family label without seed and range, e.g. `CG(5,5,-0.2)`.
    pub fn family_label(&self) -> String {
        let counts = counts_text(&self.strategy_counts);
        match self.family {
            Family::Random => format!("RG({},{counts})", self.num_players()),
            Family::Covariance => format!("CG({},{counts},{})", self.num_players(), self.rho),
            Family::Named => self.named_id.clone().unwrap_or_default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.family == Family::Named {
            return match &self.named_id {
                Some(id) if NAMED_GAMES.contains(&id.as_str()) => Ok(()),
                Some(id) => Err(Error::Lookup(format!("unknown named game '{id}'"))),
                None => Err(validation("named instance without an id")),
            };
        }
        let n = self.num_players();
        if n < 2 {
            return Err(validation(format!("need at least 2 players, got {n}")));
        }
        if self.strategy_counts.contains(&0) {
            return Err(validation("every player needs at least one strategy"));
        }
        if self.payoff_low >= self.payoff_high {
            return Err(validation(format!(
                "payoff range {}..{} is empty",
                self.payoff_low, self.payoff_high
            )));
        }
        if self.family == Family::Covariance {
            let bound = -1.0 / (n as f64 - 1.0);
            if !(self.rho >= bound && self.rho <= 1.0) {
                return Err(validation(format!(
                    "rho = {} outside [{bound}, 1]: the {n}-player equicorrelation matrix is \
                     positive semidefinite only for rho >= -1/(n-1)",
                    self.rho
                )));
            }
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<Game> {
        match self.family {
            Family::Random => generate_random_game(self),
            Family::Covariance => generate_covariance_game(self),
            Family::Named => named_game(self.named_id.as_deref().unwrap_or("")),
        }
    }
}

fn counts_text(counts: &[usize]) -> String {
    match counts.first() {
        Some(&k) if counts.iter().all(|&c| c == k) => k.to_string(),
        _ => {
            let parts: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
            format!("[{}]", parts.join(","))
        }
    }
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Named => write!(f, "{}", self.family_label()),
            _ => write!(
                f,
                "{}#seed={};range={}..{}",
                self.family_label(),
                self.seed,
                self.payoff_low,
                self.payoff_high
            ),
        }
    }
}

impl FromStr for InstanceSpec {
    type Err = Error;

    /// Parses the canonical one-line encoding, e.g.
    /// `CG(5,5,-0.2)#seed=7;range=-100..100`, `RG(3,[2,3,4])` or
    /// `matching_pennies`.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let err = |msg: String| Error::Parse {
            line: 1,
            column: 1,
            message: msg,
        };
        let (head, options) = match text.split_once('#') {
            Some((h, o)) => (h.trim(), Some(o)),
            None => (text, None),
        };
        let mut spec = if let Some(open) = head.find('(') {
            if !head.ends_with(')') {
                return Err(err(format!("missing ')' in '{head}'")));
            }
            let family = &head[..open];
            let args = split_args(&head[open + 1..head.len() - 1]);
            let n: usize = args
                .first()
                .and_then(|a| a.parse().ok())
                .ok_or_else(|| err(format!("bad player count in '{head}'")))?;
            let counts = match args.get(1) {
                Some(a) if a.starts_with('[') && a.ends_with(']') => a[1..a.len() - 1]
                    .split(',')
                    .map(|c| c.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| err(format!("bad strategy counts in '{head}'")))?,
                Some(a) => vec![a.parse().map_err(|_| err(format!("bad strategy count in '{head}'")))?; n],
                None => return Err(err(format!("missing strategy count in '{head}'"))),
            };
            if counts.len() != n {
                return Err(err(format!("{} strategy counts for {n} players", counts.len())));
            }
            match (family, args.len()) {
                ("RG", 2) => InstanceSpec {
                    strategy_counts: counts,
                    ..InstanceSpec::random(n, 1, 0)
                },
                ("CG", 3) => {
                    let rho = args[2]
                        .parse::<f64>()
                        .map_err(|_| err(format!("bad rho in '{head}'")))?;
                    InstanceSpec {
                        strategy_counts: counts,
                        ..InstanceSpec::covariance(n, 1, rho, 0)
                    }
                }
                _ => return Err(err(format!("unknown family '{head}'"))),
            }
        } else {
            InstanceSpec::named(head)
        };
        for option in options.unwrap_or("").split(';').filter(|o| !o.trim().is_empty()) {
            let (key, value) = option
                .split_once('=')
                .ok_or_else(|| err(format!("option '{option}' is not key=value")))?;
            match key.trim() {
                "seed" => {
                    spec.seed = value
                        .trim()
                        .parse()
                        .map_err(|_| err(format!("bad seed '{value}'")))?
                }
                "range" => {
                    let (lo, hi) = value
                        .trim()
                        .split_once("..")
                        .ok_or_else(|| err(format!("range '{value}' is not low..high")))?;
                    spec.payoff_low = lo.parse().map_err(|_| err(format!("bad range '{value}'")))?;
                    spec.payoff_high = hi.parse().map_err(|_| err(format!("bad range '{value}'")))?;
                }
                other => return Err(err(format!("unknown option '{other}'"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Splits on commas that are not inside brackets.
fn split_args(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn base_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// RNG positioned at the window reserved for `(stream, index)`.
fn entry_rng(base: &ChaCha8Rng, stream: u64, index: usize) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(stream);
    rng.set_word_pos((index as u128) << 32);
    rng
}

/// RG: every payoff uniform on `{low, ..., high}`, independently.
pub fn generate_random_game(spec: &InstanceSpec) -> Result<Game> {
    if spec.family != Family::Random {
        return Err(validation("generate_random_game needs a Random spec"));
    }
    spec.validate()?;
    let size: usize = spec.strategy_counts.iter().product();
    let base = base_rng(spec.seed);
    let payoffs = (0..spec.num_players())
        .map(|player| {
            (0..size)
                .map(|idx| {
                    entry_rng(&base, player as u64 + 1, idx)
                        .random_range(spec.payoff_low..=spec.payoff_high) as f64
                })
                .collect()
        })
        .collect();
    Ok(Game::new(spec.strategy_counts.clone(), payoffs)?.with_name(spec.to_string()))
}

/// Pre-rounding draw for profile `index` of a covariance game: an
/// n-vector with zero mean, unit variances and pairwise correlation ρ.
///
/// Uses the symmetric square root of `(1-ρ)I + ρ11ᵀ`:
/// `y = √(1-ρ) z + c (Σz) 1` with `c = (√(1+(n-1)ρ) - √(1-ρ)) / n`.
pub fn covariance_draw(spec: &InstanceSpec, index: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    Ok(covariance_draw_with(&base_rng(spec.seed), spec.num_players(), spec.rho, index))
}

fn covariance_draw_with(base: &ChaCha8Rng, n: usize, rho: f64, index: usize) -> Vec<f64> {
    let mut rng = entry_rng(base, 0, index);
    let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let nf = n as f64;
    let diag = (1.0 - rho).max(0.0).sqrt();
    let c = ((1.0 + (nf - 1.0) * rho).max(0.0).sqrt() - diag) / nf;
    let sum: f64 = z.iter().sum();
    z.iter().map(|&zi| diag * zi + c * sum).collect()
}

/// CG: equicorrelated normal payoff vectors per profile, scaled so ±3σ covers
/// the payoff range, rounded to integers and clamped.
pub fn generate_covariance_game(spec: &InstanceSpec) -> Result<Game> {
    if spec.family != Family::Covariance {
        return Err(validation("generate_covariance_game needs a Covariance spec"));
    }
    spec.validate()?;
    let n = spec.num_players();
    let size: usize = spec.strategy_counts.iter().product();
    let base = base_rng(spec.seed);
    let (low, high) = (spec.payoff_low as f64, spec.payoff_high as f64);
    let scale = (high - low) / 6.0;
    let mid = 0.5 * (low + high);
    let mut payoffs = vec![Vec::with_capacity(size); n];
    for idx in 0..size {
        let y = covariance_draw_with(&base, n, spec.rho, idx);
        for (tensor, v) in payoffs.iter_mut().zip(y) {
            tensor.push((mid + scale * v).round().clamp(low, high));
        }
    }
    Ok(Game::new(spec.strategy_counts.clone(), payoffs)?.with_name(spec.to_string()))
}

/// Canonical textbook games used as fixtures.
///
/// * `matching_pennies`: `A_1 = [[1,-1],[-1,1]]`, `A_2 = -A_1`.
/// * `rock_paper_scissors`: zero-sum, win 1, loss -1, tie 0.
/// * `coordination_2x2`: both players get 1 when they match, else 0.
/// * `three_player_majority`: 3 players, 2 actions, 1 to members of the majority.
pub fn named_game(id: &str) -> Result<Game> {
    let game = match id {
        "matching_pennies" => Game::new(
            vec![2, 2],
            vec![vec![1.0, -1.0, -1.0, 1.0], vec![-1.0, 1.0, 1.0, -1.0]],
        )?,
        "rock_paper_scissors" => {
            // rows: rock, paper, scissors
            let a: Vec<f64> = vec![0.0, -1.0, 1.0, 1.0, 0.0, -1.0, -1.0, 1.0, 0.0];
            let b = a.iter().map(|v| -v).collect();
            Game::new(vec![3, 3], vec![a, b])?
        }
        "coordination_2x2" => Game::new(
            vec![2, 2],
            vec![vec![1.0, 0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0, 1.0]],
        )?,
        "three_player_majority" => {
            let mut payoffs = vec![Vec::with_capacity(8); 3];
            for s in 0..8usize {
                let actions = [(s >> 2) & 1, (s >> 1) & 1, s & 1];
                let ones = actions.iter().sum::<usize>();
                let majority = usize::from(ones >= 2);
                for (i, tensor) in payoffs.iter_mut().enumerate() {
                    tensor.push(if actions[i] == majority { 1.0 } else { 0.0 });
                }
            }
            Game::new(vec![2, 2, 2], payoffs)?
        }
        other => return Err(Error::Lookup(format!("unknown named game '{other}'"))),
    };
    Ok(game.with_name(id))
}
