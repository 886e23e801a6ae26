//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's arithmetic: utilities are nested loops over the raw
//! tensors and bimatrix equilibria come from exact rational elimination.

#![allow(dead_code)]

use multinash::generators::InstanceSpec;
use multinash::{Game, MixedProfile};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

/// Flat index of a pure profile, player 1 slowest.
pub fn flat(counts: &[usize], profile: &[usize]) -> usize {
    profile.iter().zip(counts).fold(0, |acc, (&s, &c)| acc * c + s)
}

/// `u_s^i` by explicit recursion over opponents in lexicographic order.
/// Works for `x` off the simplex too.
pub fn utility(game: &Game, x: &[Vec<f64>], i: usize, s: usize) -> f64 {
    let counts = game.strategy_counts();
    let mut profile = vec![0; counts.len()];
    profile[i] = s;
    fn rec(game: &Game, x: &[Vec<f64>], i: usize, j: usize, profile: &mut Vec<usize>, weight: f64) -> f64 {
        let counts = game.strategy_counts();
        if j == counts.len() {
            return weight * game.payoffs(i)[flat(counts, profile)];
        }
        if j == i {
            return rec(game, x, i, j + 1, profile, weight);
        }
        let mut total = 0.0;
        for t in 0..counts[j] {
            profile[j] = t;
            total += rec(game, x, i, j + 1, profile, weight * x[j][t]);
        }
        total
    }
    rec(game, x, i, 0, &mut profile, 1.0)
}

pub fn utilities(game: &Game, x: &[Vec<f64>], i: usize) -> Vec<f64> {
    (0..game.num_strategies(i)).map(|s| utility(game, x, i, s)).collect()
}

/// Per-player `max_s u_s − Σ_s x_s u_s`.
pub fn exploitabilities(game: &Game, x: &[Vec<f64>]) -> Vec<f64> {
    (0..game.num_players())
        .map(|i| {
            let u = utilities(game, x, i);
            let best = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let expected: f64 = u.iter().zip(&x[i]).map(|(a, b)| a * b).sum();
            best - expected
        })
        .collect()
}

pub fn max_regret(game: &Game, x: &[Vec<f64>]) -> f64 {
    exploitabilities(game, x).into_iter().fold(0.0, f64::max)
}

pub fn merit(game: &Game, x: &[Vec<f64>]) -> f64 {
    exploitabilities(game, x).iter().map(|e| e * e).sum()
}

fn q(v: f64) -> Q {
    BigRational::from_float(v).expect("finite payoff")
}

/// Solves `m · z = rhs` exactly; `None` when singular.
fn solve_exact(mut m: Vec<Vec<Q>>, mut rhs: Vec<Q>) -> Option<Vec<Q>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for c in col..n {
                    let d = &f * &m[col][c];
                    m[r][c] -= d;
                }
                let d = &f * &rhs[col];
                rhs[r] -= d;
            }
        }
    }
    Some((0..n).map(|k| &rhs[k] / &m[k][k]).collect())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Mixed strategy of the player whose indifference makes the opponent's
/// support `rows` equally good: `Σ_c pay(r, c) z_c = v` for `r ∈ rows`,
/// `Σ z = 1`, with `z` supported on `cols`.
fn indifference(pay: &dyn Fn(usize, usize) -> Q, rows: &[usize], cols: &[usize]) -> Option<(Vec<Q>, Q)> {
    let k = rows.len();
    let mut m = Vec::with_capacity(k + 1);
    let mut rhs = Vec::with_capacity(k + 1);
    for &r in rows {
        let mut row: Vec<Q> = cols.iter().map(|&c| pay(r, c)).collect();
        row.push(-Q::one());
        m.push(row);
        rhs.push(Q::zero());
    }
    let mut last = vec![Q::one(); k];
    last.push(Q::zero());
    m.push(last);
    rhs.push(Q::one());
    let z = solve_exact(m, rhs)?;
    let v = z[k].clone();
    Some((z[..k].to_vec(), v))
}

/// Every Nash equilibrium of a nondegenerate bimatrix game by exact support
/// enumeration. `None` if the game is degenerate (a singular support
/// system, a zero weight inside a support, or a tied best response).
pub fn bimatrix_equilibria(game: &Game) -> Option<Vec<Vec<Vec<Q>>>> {
    assert_eq!(game.num_players(), 2);
    let (m, n) = (game.num_strategies(0), game.num_strategies(1));
    let a = |r: usize, c: usize| q(game.payoffs(0)[r * n + c]);
    let b = |r: usize, c: usize| q(game.payoffs(1)[r * n + c]);
    // Tied pure best responses are degenerate.
    for c in 0..n {
        let col: Vec<Q> = (0..m).map(|r| a(r, c)).collect();
        let best = col.iter().max().expect("nonempty");
        if col.iter().filter(|v| *v == best).count() > 1 {
            return None;
        }
    }
    for r in 0..m {
        let row: Vec<Q> = (0..n).map(|c| b(r, c)).collect();
        let best = row.iter().max().expect("nonempty");
        if row.iter().filter(|v| *v == best).count() > 1 {
            return None;
        }
    }
    let mut out = Vec::new();
    for k in 1..=m.min(n) {
        for rows in subsets(m, k) {
            for cols in subsets(n, k) {
                let (y, v) = indifference(&|r, c| a(r, c), &rows, &cols)?;
                let bt = |c: usize, r: usize| b(r, c);
                let (x, w) = indifference(&bt, &cols, &rows)?;
                if y.iter().chain(&x).any(|p| p.is_negative()) {
                    continue;
                }
                if y.iter().chain(&x).any(|p| p.is_zero()) {
                    return None;
                }
                let mut full_x = vec![Q::zero(); m];
                for (&r, p) in rows.iter().zip(&x) {
                    full_x[r] = p.clone();
                }
                let mut full_y = vec![Q::zero(); n];
                for (&c, p) in cols.iter().zip(&y) {
                    full_y[c] = p.clone();
                }
                let mut stable = true;
                for r in (0..m).filter(|r| !rows.contains(r)) {
                    let u: Q = (0..n).map(|c| a(r, c) * &full_y[c]).sum();
                    if u == v {
                        return None;
                    }
                    stable &= u < v;
                }
                for c in (0..n).filter(|c| !cols.contains(c)) {
                    let u: Q = (0..m).map(|r| b(r, c) * &full_x[r]).sum();
                    if u == w {
                        return None;
                    }
                    stable &= u < w;
                }
                if stable {
                    out.push(vec![full_x, full_y]);
                }
            }
        }
    }
    Some(out)
}

pub fn to_profile(eq: &[Vec<Q>]) -> MixedProfile {
    let dists = eq
        .iter()
        .map(|d| d.iter().map(|p| p.to_f64().expect("finite")).collect())
        .collect();
    MixedProfile::new(dists).expect("oracle equilibrium is a profile")
}

/// The first `count` nondegenerate bimatrix games produced by `make(seed)`
/// for seeds 0, 1, ..., with their full equilibrium sets.
pub fn nondegenerate_games(count: usize, make: impl Fn(u64) -> InstanceSpec) -> Vec<(Game, Vec<MixedProfile>)> {
    let mut out = Vec::new();
    let mut seed = 0;
    while out.len() < count {
        let game = make(seed).generate().expect("valid spec");
        if let Some(eqs) = bimatrix_equilibria(&game) {
            out.push((game, eqs.iter().map(|e| to_profile(e)).collect()));
        }
        seed += 1;
        assert!(seed < 100 * count as u64 + 100, "too many degenerate games");
    }
    out
}

/// Mixed sizes up to 3 strategies per player.
pub fn small_bimatrix_spec(seed: u64) -> InstanceSpec {
    let sizes = [[2, 2], [2, 3], [3, 2], [3, 3]][(seed % 4) as usize];
    format!("RG(2,[{},{}])#seed={seed};range=-100..100", sizes[0], sizes[1])
        .parse()
        .expect("spec")
}

pub fn rational(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
