//! Normal-form games, mixed profiles and the regret arithmetic used to
//! certify every solver output.
//!
//! Payoff tensors are stored row-major with player 1's strategy index varying
//! slowest: the flat index of a pure profile `s` is `Σ_i s_i * stride_i` where
//! `stride_{n-1} = 1` and `stride_i = stride_{i+1} * n_{i+1}`.

use serde::{Deserialize, Serialize};

use crate::error::{argument, validation, Error, Result};

/// Absolute tolerance for simplex membership of a mixed profile.
pub const PROB_TOLERANCE: f64 = 1e-8;

/// Largest number of pure profiles the brute-force enumerators will visit.
pub const ENUMERATION_LIMIT: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GameRepr")]
pub struct Game {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    strategy_counts: Vec<usize>,
    payoffs: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct GameRepr {
    #[serde(default)]
    name: Option<String>,
    strategy_counts: Vec<usize>,
    payoffs: Vec<Vec<f64>>,
}

impl TryFrom<GameRepr> for Game {
    type Error = Error;

    fn try_from(r: GameRepr) -> Result<Self> {
        let mut game = Game::new(r.strategy_counts, r.payoffs)?;
        game.name = r.name;
        Ok(game)
    }
}

impl Game {
    /// Builds a game from per-player strategy counts and one flat payoff
    /// tensor per player (row-major, player 1 slowest).
    pub fn new(strategy_counts: Vec<usize>, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        let game = Game {
            name: None,
            strategy_counts,
            payoffs,
        };
        game.validate()?;
        Ok(game)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Re-checks the structural invariants; used after deserialization.
    pub fn validate(&self) -> Result<()> {
        let n = self.strategy_counts.len();
        if n < 2 {
            return Err(validation(format!("a game needs at least 2 players, got {n}")));
        }
        if let Some(i) = self.strategy_counts.iter().position(|&c| c == 0) {
            return Err(validation(format!("player {} has no strategies", i + 1)));
        }
        if self.payoffs.len() != n {
            return Err(validation(format!(
                "expected {n} payoff tensors, got {}",
                self.payoffs.len()
            )));
        }
        let size = checked_profile_count(&self.strategy_counts)
            .ok_or_else(|| validation("number of pure profiles overflows"))?;
        for (i, tensor) in self.payoffs.iter().enumerate() {
            if tensor.len() != size {
                return Err(validation(format!(
                    "payoff tensor of player {} has {} entries, expected {size}",
                    i + 1,
                    tensor.len()
                )));
            }
            if tensor.iter().any(|v| !v.is_finite()) {
                return Err(validation(format!(
                    "payoff tensor of player {} has a non-finite entry",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    pub fn num_players(&self) -> usize {
        self.strategy_counts.len()
    }

    pub fn strategy_counts(&self) -> &[usize] {
        &self.strategy_counts
    }

    pub fn num_strategies(&self, player: usize) -> usize {
        self.strategy_counts[player]
    }

    /// `Σ_i n_i`.
    pub fn total_strategies(&self) -> usize {
        self.strategy_counts.iter().sum()
    }

    /// `Π_i n_i`.
    pub fn num_profiles(&self) -> usize {
        self.strategy_counts.iter().product()
    }

    pub fn payoffs(&self, player: usize) -> &[f64] {
        &self.payoffs[player]
    }

    pub fn all_payoffs(&self) -> &[Vec<f64>] {
        &self.payoffs
    }

    pub fn strides(&self) -> Vec<usize> {
        strides(&self.strategy_counts)
    }

    pub fn flat_index(&self, profile: &[usize]) -> usize {
        profile
            .iter()
            .zip(self.strides())
            .map(|(&s, stride)| s * stride)
            .sum()
    }

    /// `A_i[s]` for a pure profile.
    pub fn payoff(&self, player: usize, profile: &PureProfile) -> f64 {
        self.payoffs[player][self.flat_index(&profile.0)]
    }

    fn check_player(&self, player: usize) -> Result<()> {
        if player >= self.num_players() {
            return Err(argument(format!(
                "player {player} out of range for a {}-player game",
                self.num_players()
            )));
        }
        Ok(())
    }

    /// Checks that `profile` has one distribution per player of the right length.
    pub fn check_profile(&self, profile: &MixedProfile) -> Result<()> {
        if profile.distributions.len() != self.num_players() {
            return Err(validation(format!(
                "profile has {} distributions for a {}-player game",
                profile.distributions.len(),
                self.num_players()
            )));
        }
        for (i, (d, &c)) in profile
            .distributions
            .iter()
            .zip(&self.strategy_counts)
            .enumerate()
        {
            if d.len() != c {
                return Err(validation(format!(
                    "distribution of player {} has length {}, expected {c}",
                    i + 1,
                    d.len()
                )));
            }
        }
        Ok(())
    }

    /// Expected payoff of `player` for every one of their pure strategies,
    /// given the opponents' mixed strategies.
    ///
    /// For each pure strategy the opponent tuples are visited in lexicographic
    /// order, so the floating-point sum is reproducible.
    pub fn strategy_utilities(&self, profile: &MixedProfile, player: usize) -> Result<Vec<f64>> {
        self.check_player(player)?;
        self.check_profile(profile)?;
        Ok(self.utilities_unchecked(&profile.distributions, player))
    }

    pub(crate) fn utilities_unchecked(&self, x: &[Vec<f64>], player: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.strategy_counts[player]];
        let tensor = &self.payoffs[player];
        for_each_profile(&self.strategy_counts, |flat, s| {
            let mut w = 1.0;
            for (j, &sj) in s.iter().enumerate() {
                if j != player {
                    w *= x[j][sj];
                }
            }
            out[s[player]] += tensor[flat] * w;
        });
        out
    }

    /// `u_s^i`: expected payoff of `player` playing pure strategy `pure`
    /// against the opponents' mixed strategies.
    pub fn expected_utility(&self, profile: &MixedProfile, player: usize, pure: usize) -> Result<f64> {
        self.check_player(player)?;
        if pure >= self.strategy_counts[player] {
            return Err(argument(format!(
                "strategy {pure} out of range for player {} with {} strategies",
                player + 1,
                self.strategy_counts[player]
            )));
        }
        Ok(self.strategy_utilities(profile, player)?[pure])
    }

    /// `E[A_i[x]] = Σ_s x^i_s u^i_s`.
    pub fn expected_payoff(&self, profile: &MixedProfile, player: usize) -> Result<f64> {
        let u = self.strategy_utilities(profile, player)?;
        Ok(dot(&profile.distributions[player], &u))
    }

    pub fn regret_report(&self, profile: &MixedProfile) -> Result<RegretReport> {
        self.check_profile(profile)?;
        Ok(self.regret_report_unchecked(&profile.distributions))
    }

    pub(crate) fn regret_report_unchecked(&self, x: &[Vec<f64>]) -> RegretReport {
        let n = self.num_players();
        let mut utilities = Vec::with_capacity(n);
        let mut best_values = Vec::with_capacity(n);
        let mut regrets = Vec::with_capacity(n);
        let mut expected_payoffs = Vec::with_capacity(n);
        let mut max_regret: f64 = 0.0;
        for i in 0..n {
            let u = self.utilities_unchecked(x, i);
            let best = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let payoff = dot(&x[i], &u);
            max_regret = max_regret.max((best - payoff).max(0.0));
            regrets.push(u.iter().map(|&v| best - v).collect());
            best_values.push(best);
            expected_payoffs.push(payoff);
            utilities.push(u);
        }
        RegretReport {
            utilities,
            best_values,
            regrets,
            expected_payoffs,
            max_regret,
        }
    }

    pub fn max_regret(&self, profile: &MixedProfile) -> Result<f64> {
        Ok(self.regret_report(profile)?.max_regret)
    }

    /// True iff no player can gain more than `eps` by a unilateral deviation.
    pub fn is_epsilon_nash(&self, profile: &MixedProfile, eps: f64) -> Result<bool> {
        if !(eps >= 0.0) {
            return Err(argument(format!("eps must be non-negative, got {eps}")));
        }
        Ok(self.max_regret(profile)? <= eps)
    }

    /// `U^i`: the largest difference between any two payoffs of `player`.
    pub fn payoff_spread(&self, player: usize) -> Result<f64> {
        self.check_player(player)?;
        let t = &self.payoffs[player];
        let max = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = t.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(max - min)
    }

    /// Smallest and largest payoff of `player`.
    pub fn payoff_range(&self, player: usize) -> (f64, f64) {
        let t = &self.payoffs[player];
        let max = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = t.iter().copied().fold(f64::INFINITY, f64::min);
        (min, max)
    }

    /// All pure Nash equilibria, in lexicographic profile order.
    pub fn enumerate_pure_equilibria(&self) -> Result<Vec<PureProfile>> {
        let size = self.num_profiles();
        if size > ENUMERATION_LIMIT {
            return Err(Error::Capacity(format!(
                "{size} pure profiles exceed the enumeration limit of {ENUMERATION_LIMIT}"
            )));
        }
        let strides = self.strides();
        let mut out = Vec::new();
        for_each_profile(&self.strategy_counts, |flat, s| {
            let stable = (0..self.num_players()).all(|i| {
                let own = self.payoffs[i][flat];
                let base = flat - s[i] * strides[i];
                (0..self.strategy_counts[i]).all(|t| self.payoffs[i][base + t * strides[i]] <= own)
            });
            if stable {
                out.push(PureProfile(s.to_vec()));
            }
        });
        Ok(out)
    }
}

/// One pure strategy index per player.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PureProfile(pub Vec<usize>);

impl PureProfile {
    pub fn new(game: &Game, indices: Vec<usize>) -> Result<Self> {
        if indices.len() != game.num_players() {
            return Err(validation(format!(
                "pure profile has {} entries for a {}-player game",
                indices.len(),
                game.num_players()
            )));
        }
        for (i, (&s, &c)) in indices.iter().zip(game.strategy_counts()).enumerate() {
            if s >= c {
                return Err(argument(format!(
                    "strategy {s} out of range for player {} with {c} strategies",
                    i + 1
                )));
            }
        }
        Ok(PureProfile(indices))
    }
}

/// One probability vector per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct MixedProfile {
    distributions: Vec<Vec<f64>>,
}

impl MixedProfile {
    /// Validates each vector against the probability simplex within
    /// [`PROB_TOLERANCE`].
    pub fn new(distributions: Vec<Vec<f64>>) -> Result<Self> {
        for (i, d) in distributions.iter().enumerate() {
            if d.is_empty() {
                return Err(validation(format!("distribution of player {} is empty", i + 1)));
            }
            if let Some(v) = d
                .iter()
                .find(|&&v| !(v >= -PROB_TOLERANCE && v <= 1.0 + PROB_TOLERANCE))
            {
                return Err(validation(format!(
                    "distribution of player {} has entry {v} outside [0, 1]",
                    i + 1
                )));
            }
            let sum: f64 = d.iter().sum();
            if (sum - 1.0).abs() > PROB_TOLERANCE {
                return Err(validation(format!(
                    "distribution of player {} sums to {sum}",
                    i + 1
                )));
            }
        }
        Ok(MixedProfile { distributions })
    }

    pub fn uniform(game: &Game) -> Self {
        MixedProfile {
            distributions: game
                .strategy_counts()
                .iter()
                .map(|&c| vec![1.0 / c as f64; c])
                .collect(),
        }
    }

    pub fn pure(game: &Game, profile: &PureProfile) -> Self {
        MixedProfile {
            distributions: game
                .strategy_counts()
                .iter()
                .zip(&profile.0)
                .map(|(&c, &s)| {
                    let mut d = vec![0.0; c];
                    d[s] = 1.0;
                    d
                })
                .collect(),
        }
    }

    pub fn distributions(&self) -> &[Vec<f64>] {
        &self.distributions
    }

    pub fn distribution(&self, player: usize) -> &[f64] {
        &self.distributions[player]
    }

    pub fn into_inner(self) -> Vec<Vec<f64>> {
        self.distributions
    }

    /// L∞ distance between two profiles of the same shape.
    pub fn linf_distance(&self, other: &MixedProfile) -> f64 {
        self.distributions
            .iter()
            .zip(&other.distributions)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<Vec<f64>>> for MixedProfile {
    type Error = Error;

    fn try_from(value: Vec<Vec<f64>>) -> Result<Self> {
        MixedProfile::new(value)
    }
}

impl From<MixedProfile> for Vec<Vec<f64>> {
    fn from(p: MixedProfile) -> Self {
        p.distributions
    }
}

/// Per-strategy utilities, best values and regrets at a profile.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretReport {
    /// `u_s^i`
    pub utilities: Vec<Vec<f64>>,
    /// `ū^i = max_s u_s^i`
    pub best_values: Vec<f64>,
    /// `r_s^i = ū^i - u_s^i`
    pub regrets: Vec<Vec<f64>>,
    /// `E[A_i[x]]`
    pub expected_payoffs: Vec<f64>,
    /// Largest per-player exploitability `ū^i - E[A_i[x]]`.
    pub max_regret: f64,
}

impl RegretReport {
    pub fn exploitability(&self, player: usize) -> f64 {
        (self.best_values[player] - self.expected_payoffs[player]).max(0.0)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn strides(counts: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; counts.len()];
    for j in (0..counts.len().saturating_sub(1)).rev() {
        strides[j] = strides[j + 1] * counts[j + 1];
    }
    strides
}

pub(crate) fn checked_profile_count(counts: &[usize]) -> Option<usize> {
    counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c))
}

/// Visits every pure profile in row-major order (last player fastest),
/// passing the flat index and the strategy tuple.
pub(crate) fn for_each_profile(counts: &[usize], mut f: impl FnMut(usize, &[usize])) {
    let n = counts.len();
    let total: usize = counts.iter().product();
    let mut s = vec![0usize; n];
    for flat in 0..total {
        f(flat, &s);
        for j in (0..n).rev() {
            s[j] += 1;
            if s[j] < counts[j] {
                break;
            }
            s[j] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matching_pennies() -> Game {
        Game::new(
            vec![2, 2],
            vec![vec![1.0, -1.0, -1.0, 1.0], vec![-1.0, 1.0, 1.0, -1.0]],
        )
        .unwrap()
    }

    fn heads_vs_uniform() -> MixedProfile {
        MixedProfile::new(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap()
    }

    #[test]
    fn three_player_indicator_utility() {
        let mut a1 = vec![0.0; 8];
        a1[0] = 1.0;
        let game = Game::new(vec![2, 2, 2], vec![a1, vec![0.0; 8], vec![0.0; 8]]).unwrap();
        let x = MixedProfile::uniform(&game);
        assert_eq!(game.expected_utility(&x, 0, 0).unwrap(), 0.25);
        assert_eq!(game.expected_utility(&x, 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn matching_pennies_values() {
        let g = matching_pennies();
        let u = MixedProfile::uniform(&g);
        assert_eq!(g.expected_utility(&u, 0, 0).unwrap(), 0.0);
        assert_eq!(g.expected_payoff(&u, 0).unwrap(), 0.0);
        assert_eq!(g.expected_payoff(&u, 1).unwrap(), 0.0);
        assert_eq!(g.max_regret(&u).unwrap(), 0.0);
        assert!(g.is_epsilon_nash(&u, 1e-9).unwrap());

        let r = g.regret_report(&heads_vs_uniform()).unwrap();
        assert_eq!(r.best_values[1], 1.0);
        assert_eq!(r.expected_payoffs[1], 0.0);
        assert_eq!(r.max_regret, 1.0);
        assert!(!g.is_epsilon_nash(&heads_vs_uniform(), 0.5).unwrap());
        assert_eq!(g.payoff_spread(0).unwrap(), 2.0);
        assert_eq!(g.payoff_spread(1).unwrap(), 2.0);
        assert!(g.enumerate_pure_equilibria().unwrap().is_empty());
    }

    #[test]
    fn pure_profile_expectation_is_entry() {
        let g = Game::new(vec![2, 3], vec![(0..6).map(f64::from).collect(), vec![7.0; 6]]).unwrap();
        let s = PureProfile::new(&g, vec![1, 2]).unwrap();
        let x = MixedProfile::pure(&g, &s);
        assert_eq!(g.expected_payoff(&x, 0).unwrap(), 5.0);
        assert_eq!(g.payoff(0, &s), 5.0);
    }

    #[test]
    fn coordination_pure_equilibria() {
        let g = Game::new(
            vec![2, 2],
            vec![vec![1.0, 0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0, 1.0]],
        )
        .unwrap();
        let eq = g.enumerate_pure_equilibria().unwrap();
        assert_eq!(eq, vec![PureProfile(vec![0, 0]), PureProfile(vec![1, 1])]);
    }

    #[test]
    fn constant_game_has_zero_spread() {
        let g = Game::new(vec![2, 2], vec![vec![3.0; 4], vec![3.0; 4]]).unwrap();
        assert_eq!(g.payoff_spread(0).unwrap(), 0.0);
    }

    #[test]
    fn argument_and_validation_errors() {
        let g = matching_pennies();
        let u = MixedProfile::uniform(&g);
        assert!(matches!(g.expected_utility(&u, 2, 0), Err(Error::Argument(_))));
        assert!(matches!(g.expected_utility(&u, 0, 2), Err(Error::Argument(_))));
        assert!(matches!(g.is_epsilon_nash(&u, -1.0), Err(Error::Argument(_))));
        assert!(matches!(g.payoff_spread(5), Err(Error::Argument(_))));
        let short = MixedProfile::new(vec![vec![1.0]]).unwrap();
        assert!(matches!(g.regret_report(&short), Err(Error::Validation(_))));
        assert!(MixedProfile::new(vec![vec![0.6, 0.6]]).is_err());
        assert!(MixedProfile::new(vec![vec![1.1, -0.1]]).is_err());
        assert!(MixedProfile::new(vec![vec![0.5 + 5e-9, 0.5]]).is_ok());
    }

    #[test]
    fn game_validation() {
        assert!(Game::new(vec![2], vec![vec![0.0; 2]]).is_err());
        assert!(Game::new(vec![2, 2], vec![vec![0.0; 4], vec![0.0; 3]]).is_err());
        assert!(Game::new(vec![2, 2], vec![vec![0.0; 4], vec![f64::NAN; 4]]).is_err());
        assert!(Game::new(vec![2, 0], vec![vec![], vec![]]).is_err());
    }

    #[test]
    fn row_major_layout() {
        let g = Game::new(vec![2, 3, 4], vec![vec![0.0; 24]; 3]).unwrap();
        assert_eq!(g.strides(), vec![12, 4, 1]);
        assert_eq!(g.flat_index(&[1, 2, 3]), 23);
        let mut seen = Vec::new();
        for_each_profile(&[2, 2], |flat, s| seen.push((flat, s.to_vec())));
        assert_eq!(
            seen,
            vec![(0, vec![0, 0]), (1, vec![0, 1]), (2, vec![1, 0]), (3, vec![1, 1])]
        );
    }
}
