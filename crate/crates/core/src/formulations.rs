//! Multilinear-program IR and the builders that compile a [`Game`] into each
//! of the 17 formulations: BLP, MLP1, MLP2, MIMLP1-4 and their continuous
//! (C), feasibility (F) and combined (C,F) variants.
//!
//! Notation used throughout: `x_s^i` probability of strategy `s` of player
//! `i`, `p^i` best attainable payoff, `u_s^i` pure-strategy utility,
//! `ū^i = max_s u_s^i`, `r_s^i = ū^i - u_s^i` regret, `b_s^i` indicator,
//! `f_s^i`/`g_s^i` penalty variables and `U^i` the payoff spread of player `i`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{validation, Error, Result};
use crate::game::{for_each_profile, Game, MixedProfile};

/// Probability at or below which a strategy counts as unplayed when
/// deriving indicator values from a profile.
pub const SUPPORT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    X { player: usize, strategy: usize },
    P { player: usize },
    Ubar { player: usize },
    U { player: usize, strategy: usize },
    R { player: usize, strategy: usize },
    B { player: usize, strategy: usize },
    F { player: usize, strategy: usize },
    G { player: usize, strategy: usize },
    Aux(usize),
}

impl fmt::Display for VarKind {
    /// Players are 1-based in names, strategies 0-based: `x1_0`, `p2`, `ubar1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VarKind::X { player, strategy } => write!(f, "x{}_{strategy}", player + 1),
            VarKind::P { player } => write!(f, "p{}", player + 1),
            VarKind::Ubar { player } => write!(f, "ubar{}", player + 1),
            VarKind::U { player, strategy } => write!(f, "u{}_{strategy}", player + 1),
            VarKind::R { player, strategy } => write!(f, "r{}_{strategy}", player + 1),
            VarKind::B { player, strategy } => write!(f, "b{}_{strategy}", player + 1),
            VarKind::F { player, strategy } => write!(f, "f{}_{strategy}", player + 1),
            VarKind::G { player, strategy } => write!(f, "g{}_{strategy}", player + 1),
            VarKind::Aux(k) => write!(f, "aux{k}"),
        }
    }
}

impl FromStr for VarKind {
    type Err = Error;

    fn from_str(name: &str) -> Result<Self> {
        let bad = || validation(format!("bad variable name '{name}'"));
        let split = name
            .find(|c: char| c.is_ascii_digit())
            .ok_or_else(bad)?;
        let (prefix, rest) = name.split_at(split);
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
        let pair = || -> Result<(usize, usize)> {
            let (p, s) = rest.split_once('_').ok_or_else(bad)?;
            let p = num(p)?.checked_sub(1).ok_or_else(bad)?;
            Ok((p, num(s)?))
        };
        let single = || -> Result<usize> { num(rest)?.checked_sub(1).ok_or_else(bad) };
        Ok(match prefix {
            "x" => pair().map(|(player, strategy)| VarKind::X { player, strategy })?,
            "u" => pair().map(|(player, strategy)| VarKind::U { player, strategy })?,
            "r" => pair().map(|(player, strategy)| VarKind::R { player, strategy })?,
            "b" => pair().map(|(player, strategy)| VarKind::B { player, strategy })?,
            "f" => pair().map(|(player, strategy)| VarKind::F { player, strategy })?,
            "g" => pair().map(|(player, strategy)| VarKind::G { player, strategy })?,
            "p" => VarKind::P { player: single()? },
            "ubar" => VarKind::Ubar { player: single()? },
            "aux" => VarKind::Aux(num(rest)?),
            _ => return Err(bad()),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    pub binary: bool,
}

/// `coeff * Π vars`; `vars` holds sorted variable indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub vars: Vec<usize>,
}

impl Monomial {
    pub fn new(coeff: f64, mut vars: Vec<usize>) -> Self {
        vars.sort_unstable();
        Monomial { coeff, vars }
    }

    pub fn linear(coeff: f64, var: usize) -> Self {
        Monomial { coeff, vars: vec![var] }
    }

    pub fn degree(&self) -> usize {
        self.vars.len()
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        self.vars.iter().fold(self.coeff, |acc, &v| acc * point[v])
    }
}

/// A linear combination of monomials. Terms are kept as built (not merged),
/// so per-player contributions stay visible.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Expr {
    pub terms: Vec<Monomial>,
}

impl Expr {
    pub fn eval(&self, point: &[f64]) -> f64 {
        self.terms.iter().map(|m| m.eval(point)).sum()
    }

    pub fn push(&mut self, coeff: f64, vars: Vec<usize>) {
        self.terms.push(Monomial::new(coeff, vars));
    }

    /// Like terms merged and zero coefficients dropped, in variable order.
    pub fn combined(&self) -> Vec<Monomial> {
        let mut merged: BTreeMap<&[usize], f64> = BTreeMap::new();
        for m in &self.terms {
            *merged.entry(&m.vars).or_insert(0.0) += m.coeff;
        }
        merged
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .map(|(v, c)| Monomial { coeff: c, vars: v.to_vec() })
            .collect()
    }

    pub fn max_degree(&self) -> usize {
        self.terms.iter().map(Monomial::degree).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

/// Which constraint family a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintFamily {
    /// `Σ_ŝ A_i[s,ŝ] Π x ≤ p^i`
    BestResponse,
    /// `Σ_s x_s^i = 1`
    Simplex,
    /// MLP1 objective `≥ 0`
    Surplus,
    /// `u_s^i = Σ_ŝ A_i[s,ŝ] Π x`
    Utility,
    /// `ū^i ≥ u_s^i`
    BestValue,
    /// `r_s^i = ū^i - u_s^i`
    Regret,
    /// `x_s^i ≤ 1 - b_s^i`
    Support,
    /// `r_s^i ≤ U^i b_s^i`
    RegretIndicator,
    /// `f_s^i ≥ r_s^i` (or `r_s^i / U^i`)
    RegretPenalty,
    /// `f_s^i ≥ U^i b_s^i` (or `b_s^i`)
    IndicatorPenalty,
    /// `g_s^i ≥ x_s^i`
    ProbabilityPenalty,
    /// `g_s^i ≥ 1 - b_s^i`
    SupportPenalty,
    /// `b = b²`
    BinaryQuadratic,
    /// parent objective pinned to its optimal value
    ObjectivePin,
}

impl ConstraintFamily {
    pub const ALL: [ConstraintFamily; 14] = [
        ConstraintFamily::BestResponse,
        ConstraintFamily::Simplex,
        ConstraintFamily::Surplus,
        ConstraintFamily::Utility,
        ConstraintFamily::BestValue,
        ConstraintFamily::Regret,
        ConstraintFamily::Support,
        ConstraintFamily::RegretIndicator,
        ConstraintFamily::RegretPenalty,
        ConstraintFamily::IndicatorPenalty,
        ConstraintFamily::ProbabilityPenalty,
        ConstraintFamily::SupportPenalty,
        ConstraintFamily::BinaryQuadratic,
        ConstraintFamily::ObjectivePin,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ConstraintFamily::BestResponse => "best_response",
            ConstraintFamily::Simplex => "simplex",
            ConstraintFamily::Surplus => "surplus",
            ConstraintFamily::Utility => "utility",
            ConstraintFamily::BestValue => "best_value",
            ConstraintFamily::Regret => "regret",
            ConstraintFamily::Support => "support",
            ConstraintFamily::RegretIndicator => "regret_indicator",
            ConstraintFamily::RegretPenalty => "regret_penalty",
            ConstraintFamily::IndicatorPenalty => "indicator_penalty",
            ConstraintFamily::ProbabilityPenalty => "probability_penalty",
            ConstraintFamily::SupportPenalty => "support_penalty",
            ConstraintFamily::BinaryQuadratic => "binary_quadratic",
            ConstraintFamily::ObjectivePin => "objective_pin",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.tag() == tag)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub family: ConstraintFamily,
    pub expr: Expr,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    /// Signed infeasibility at `point`; zero when satisfied.
    pub fn violation(&self, point: &[f64]) -> f64 {
        let lhs = self.expr.eval(point);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
    Feasibility,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    pub sense: Sense,
    pub expr: Expr,
    pub constant: f64,
}

impl Objective {
    pub fn eval(&self, point: &[f64]) -> f64 {
        self.expr.eval(point) + self.constant
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    Blp,
    Mlp1,
    Mlp2,
    Mimlp1,
    Mimlp2,
    Mimlp3,
    Mimlp4,
}

impl Base {
    fn code(self) -> &'static str {
        match self {
            Base::Blp => "BLP",
            Base::Mlp1 => "MLP1",
            Base::Mlp2 => "MLP2",
            Base::Mimlp1 => "MIMLP1",
            Base::Mimlp2 => "MIMLP2",
            Base::Mimlp3 => "MIMLP3",
            Base::Mimlp4 => "MIMLP4",
        }
    }

    pub fn is_mixed_integer(self) -> bool {
        matches!(self, Base::Mimlp1 | Base::Mimlp2 | Base::Mimlp3 | Base::Mimlp4)
    }
}

/// A formulation and its variant flags. Text codes drop the parentheses of
/// the usual naming: `MIMLP3(C,F)` is `MIMLP3CF`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormulationId {
    pub base: Base,
    pub continuous: bool,
    pub feasibility: bool,
}

impl FormulationId {
    pub const fn new(base: Base, continuous: bool, feasibility: bool) -> Self {
        FormulationId {
            base,
            continuous,
            feasibility,
        }
    }

    pub const fn plain(base: Base) -> Self {
        FormulationId::new(base, false, false)
    }

    pub fn is_legal(&self) -> bool {
        match self.base {
            Base::Blp | Base::Mlp1 | Base::Mlp2 => !self.continuous && !self.feasibility,
            Base::Mimlp1 => !self.feasibility,
            Base::Mimlp2 | Base::Mimlp3 | Base::Mimlp4 => true,
        }
    }

    /// All 17 legal formulations in a fixed order.
    pub fn all() -> Vec<FormulationId> {
        let mut out = vec![
            FormulationId::plain(Base::Blp),
            FormulationId::plain(Base::Mlp1),
            FormulationId::plain(Base::Mlp2),
        ];
        out.extend(Self::mixed_integer());
        out
    }

    /// The 14 MIMLP variants in the order of the overview table.
    pub fn mixed_integer() -> Vec<FormulationId> {
        use Base::*;
        let mut out: Vec<_> = [Mimlp1, Mimlp2, Mimlp3, Mimlp4]
            .into_iter()
            .map(FormulationId::plain)
            .collect();
        out.extend([Mimlp1, Mimlp2, Mimlp3, Mimlp4].map(|b| FormulationId::new(b, true, false)));
        out.extend([Mimlp2, Mimlp3, Mimlp4].map(|b| FormulationId::new(b, false, true)));
        out.extend([Mimlp2, Mimlp3, Mimlp4].map(|b| FormulationId::new(b, true, true)));
        out
    }

    /// Whether the program has a zero objective (feasibility program).
    pub fn is_feasibility_program(&self) -> bool {
        self.feasibility || matches!(self.base, Base::Mlp2 | Base::Mimlp1)
    }
}

impl fmt::Display for FormulationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.base.code())?;
        if self.continuous {
            f.write_str("C")?;
        }
        if self.feasibility {
            f.write_str("F")?;
        }
        Ok(())
    }
}

impl FromStr for FormulationId {
    type Err = Error;

    fn from_str(code: &str) -> Result<Self> {
        let upper = code.trim().to_ascii_uppercase().replace(['(', ')', ','], "");
        let bases = [
            Base::Mimlp1,
            Base::Mimlp2,
            Base::Mimlp3,
            Base::Mimlp4,
            Base::Mlp1,
            Base::Mlp2,
            Base::Blp,
        ];
        for base in bases {
            if let Some(rest) = upper.strip_prefix(base.code()) {
                let id = match rest {
                    "" => FormulationId::new(base, false, false),
                    "C" => FormulationId::new(base, true, false),
                    "F" => FormulationId::new(base, false, true),
                    "CF" => FormulationId::new(base, true, true),
                    _ => continue,
                };
                if !id.is_legal() {
                    return Err(validation(format!("formulation {id} is not a legal combination")));
                }
                return Ok(id);
            }
        }
        Err(Error::Lookup(format!("unknown formulation code '{code}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub formulation: FormulationId,
    pub strategy_counts: Vec<usize>,
    pub game_hash: String,
    /// Known optimal objective value for optimality programs.
    pub target_value: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultilinearProgram {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Objective,
    pub metadata: Metadata,
}

impl MultilinearProgram {
    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn position(&self, kind: VarKind) -> Option<usize> {
        self.variables.iter().position(|v| v.kind == kind)
    }

    /// Variable index of `x_s^i` for every player and strategy.
    pub fn x_indices(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self
            .metadata
            .strategy_counts
            .iter()
            .map(|&c| vec![usize::MAX; c])
            .collect();
        for (k, v) in self.variables.iter().enumerate() {
            if let VarKind::X { player, strategy } = v.kind {
                out[player][strategy] = k;
            }
        }
        out
    }

    pub fn count_family(&self, family: ConstraintFamily) -> usize {
        self.constraints.iter().filter(|c| c.family == family).count()
    }

    pub fn num_binaries(&self) -> usize {
        self.variables.iter().filter(|v| v.binary).count()
    }

    /// Checks that every monomial references declared variables and that
    /// only `b²` repeats a variable.
    pub fn validate(&self) -> Result<()> {
        let n = self.variables.len();
        let exprs = self
            .constraints
            .iter()
            .map(|c| &c.expr)
            .chain(std::iter::once(&self.objective.expr));
        for expr in exprs {
            for m in &expr.terms {
                if m.vars.is_empty() {
                    return Err(validation("monomial of degree 0"));
                }
                if let Some(&v) = m.vars.iter().find(|&&v| v >= n) {
                    return Err(validation(format!("monomial references undeclared variable {v}")));
                }
                for w in m.vars.windows(2) {
                    if w[0] == w[1] && !matches!(self.variables[w[0]].kind, VarKind::B { .. }) {
                        return Err(validation(format!(
                            "monomial repeats non-indicator variable {}",
                            self.variables[w[0]].kind
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Stable short hash of a game's dimensions and payoffs.
pub fn game_hash(game: &Game) -> String {
    let mut hasher = Sha256::new();
    for &c in game.strategy_counts() {
        hasher.update((c as u64).to_le_bytes());
    }
    for tensor in game.all_payoffs() {
        for v in tensor {
            hasher.update(v.to_bits().to_le_bytes());
        }
    }
    hasher.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Compiles `game` into formulation `id`.
pub fn build(id: FormulationId, game: &Game) -> Result<MultilinearProgram> {
    if !id.is_legal() {
        return Err(validation(format!("formulation {id} is not a legal combination")));
    }
    let mut program = match id.base {
        Base::Blp => build_blp(game)?,
        Base::Mlp1 => build_mlp1(game),
        Base::Mlp2 => build_mlp2(game),
        Base::Mimlp1 => build_mimlp(1, game)?,
        Base::Mimlp2 => build_mimlp(2, game)?,
        Base::Mimlp3 => build_mimlp(3, game)?,
        Base::Mimlp4 => build_mimlp(4, game)?,
    };
    if id.continuous {
        program = apply_continuous(program);
    }
    if id.feasibility {
        program = apply_feasibility(program)?;
    }
    Ok(program)
}

/// Incrementally assembles a program.
struct Builder {
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            variables: Vec::new(),
            constraints: Vec::new(),
        }
    }

    fn var(&mut self, kind: VarKind, lower: f64, upper: f64, binary: bool) -> usize {
        self.variables.push(Variable {
            kind,
            lower,
            upper,
            binary,
        });
        self.variables.len() - 1
    }

    fn add(&mut self, family: ConstraintFamily, expr: Expr, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            family,
            expr,
            relation,
            rhs,
        });
    }

    fn finish(self, game: &Game, formulation: FormulationId, objective: Objective, target: Option<f64>) -> MultilinearProgram {
        MultilinearProgram {
            variables: self.variables,
            constraints: self.constraints,
            objective,
            metadata: Metadata {
                formulation,
                strategy_counts: game.strategy_counts().to_vec(),
                game_hash: game_hash(game),
                target_value: target,
                warnings: Vec::new(),
            },
        }
    }
}

fn add_x_vars(b: &mut Builder, game: &Game) -> Vec<Vec<usize>> {
    (0..game.num_players())
        .map(|i| {
            (0..game.num_strategies(i))
                .map(|s| b.var(VarKind::X { player: i, strategy: s }, 0.0, 1.0, false))
                .collect()
        })
        .collect()
}

/// `(coefficient, opponent variable list)` for `u_s^i`, for every `s`, with
/// opponent tuples in lexicographic order.
fn utility_terms(game: &Game, x: &[Vec<usize>], player: usize) -> Vec<Vec<(f64, Vec<usize>)>> {
    let mut out = vec![Vec::new(); game.num_strategies(player)];
    let tensor = game.payoffs(player);
    for_each_profile(game.strategy_counts(), |flat, s| {
        let vars = s
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != player)
            .map(|(j, &sj)| x[j][sj])
            .collect();
        out[s[player]].push((tensor[flat], vars));
    });
    out
}

fn add_simplex_rows(b: &mut Builder, x: &[Vec<usize>]) {
    for xi in x {
        let mut e = Expr::default();
        for &v in xi {
            e.push(1.0, vec![v]);
        }
        b.add(ConstraintFamily::Simplex, e, Relation::Eq, 1.0);
    }
}

/// `Σ_i Σ_(s,ŝ) A_i[s,ŝ] x_s^i Π x - Σ_i p^i`, terms unmerged.
fn surplus_expr(game: &Game, x: &[Vec<usize>], p: &[usize]) -> Expr {
    let mut e = Expr::default();
    for i in 0..game.num_players() {
        for (s, terms) in utility_terms(game, x, i).into_iter().enumerate() {
            for (coeff, mut vars) in terms {
                vars.push(x[i][s]);
                e.push(coeff, vars);
            }
        }
    }
    for &pi in p {
        e.push(-1.0, vec![pi]);
    }
    e
}

/// Variables `x`, `p` and the rows `Σ_ŝ A Π x - p ≤ 0`, `Σ x = 1`.
fn mlp_core(game: &Game) -> (Builder, Vec<Vec<usize>>, Vec<usize>) {
    let mut b = Builder::new();
    let x = add_x_vars(&mut b, game);
    let p: Vec<usize> = (0..game.num_players())
        .map(|i| {
            let (lo, hi) = game.payoff_range(i);
            b.var(VarKind::P { player: i }, lo, hi, false)
        })
        .collect();
    for i in 0..game.num_players() {
        for terms in utility_terms(game, &x, i) {
            let mut e = Expr::default();
            for (coeff, vars) in terms {
                e.push(coeff, vars);
            }
            e.push(-1.0, vec![p[i]]);
            b.add(ConstraintFamily::BestResponse, e, Relation::Le, 0.0);
        }
    }
    add_simplex_rows(&mut b, &x);
    (b, x, p)
}

/// MLP1: maximise the total surplus subject to best-response bounds.
pub fn build_mlp1(game: &Game) -> MultilinearProgram {
    let (b, x, p) = mlp_core(game);
    let objective = Objective {
        sense: Sense::Max,
        expr: surplus_expr(game, &x, &p),
        constant: 0.0,
    };
    b.finish(game, FormulationId::plain(Base::Mlp1), objective, Some(0.0))
}

/// MLP2: the MLP1 objective moved into a `≥ 0` constraint, no objective.
pub fn build_mlp2(game: &Game) -> MultilinearProgram {
    let (mut b, x, p) = mlp_core(game);
    b.add(ConstraintFamily::Surplus, surplus_expr(game, &x, &p), Relation::Ge, 0.0);
    let objective = Objective {
        sense: Sense::Feasibility,
        expr: Expr::default(),
        constant: 0.0,
    };
    b.finish(game, FormulationId::plain(Base::Mlp2), objective, None)
}

/// The bilinear program for bimatrix games, assembled from the matrix view
/// `max xᵀAy + xᵀBy - p - q` s.t. `Ay ≤ p1`, `Bᵀx ≤ q1`, simplex rows.
pub fn build_blp(game: &Game) -> Result<MultilinearProgram> {
    if game.num_players() != 2 {
        return Err(validation(format!(
            "BLP needs a 2-player game, got {} players",
            game.num_players()
        )));
    }
    let (m, n) = (game.num_strategies(0), game.num_strategies(1));
    let a = |r: usize, c: usize| game.payoffs(0)[r * n + c];
    let bm = |r: usize, c: usize| game.payoffs(1)[r * n + c];
    let mut b = Builder::new();
    let x: Vec<usize> = (0..m)
        .map(|r| b.var(VarKind::X { player: 0, strategy: r }, 0.0, 1.0, false))
        .collect();
    let y: Vec<usize> = (0..n)
        .map(|c| b.var(VarKind::X { player: 1, strategy: c }, 0.0, 1.0, false))
        .collect();
    let (alo, ahi) = game.payoff_range(0);
    let (blo, bhi) = game.payoff_range(1);
    let p = b.var(VarKind::P { player: 0 }, alo, ahi, false);
    let q = b.var(VarKind::P { player: 1 }, blo, bhi, false);
    for r in 0..m {
        let mut e = Expr::default();
        for c in 0..n {
            e.push(a(r, c), vec![y[c]]);
        }
        e.push(-1.0, vec![p]);
        b.add(ConstraintFamily::BestResponse, e, Relation::Le, 0.0);
    }
    for c in 0..n {
        let mut e = Expr::default();
        for r in 0..m {
            e.push(bm(r, c), vec![x[r]]);
        }
        e.push(-1.0, vec![q]);
        b.add(ConstraintFamily::BestResponse, e, Relation::Le, 0.0);
    }
    add_simplex_rows(&mut b, &[x.clone(), y.clone()]);
    let mut obj = Expr::default();
    for r in 0..m {
        for c in 0..n {
            obj.push(a(r, c), vec![x[r], y[c]]);
        }
    }
    for r in 0..m {
        for c in 0..n {
            obj.push(bm(r, c), vec![x[r], y[c]]);
        }
    }
    obj.push(-1.0, vec![p]);
    obj.push(-1.0, vec![q]);
    let objective = Objective {
        sense: Sense::Max,
        expr: obj,
        constant: 0.0,
    };
    Ok(b.finish(game, FormulationId::plain(Base::Blp), objective, Some(0.0)))
}

/// `U^i`, with a constant payoff tensor mapped to 1 so the big-M rows and
/// the normalised regret stay well defined.
pub fn big_m(game: &Game, player: usize) -> f64 {
    let (lo, hi) = game.payoff_range(player);
    if hi > lo {
        hi - lo
    } else {
        1.0
    }
}

/// Variable indices of an MIMLP, per player and strategy.
struct MimlpVars {
    x: Vec<Vec<usize>>,
    ubar: Vec<usize>,
    u: Vec<Vec<usize>>,
    r: Vec<Vec<usize>>,
    b: Vec<Vec<usize>>,
    f: Vec<Vec<usize>>,
    g: Vec<Vec<usize>>,
}

/// MIMLP1-4 with their base constraint sets:
///
/// * 1: simplex, utility, best value, regret, support, regret indicator.
/// * 2: as 1 without the regret indicator, plus `f ≥ r`, `f ≥ U b`;
///   minimise `Σ f - U b`.
/// * 3: as 1 without the support row, plus `g ≥ x`, `g ≥ 1 - b`;
///   minimise `Σ g - (1 - b)`.
/// * 4: neither support nor regret indicator, plus `f ≥ r/U`, `f ≥ b`,
///   `g ≥ x`, `g ≥ 1 - b`; minimise `Σ f + g`.
pub fn build_mimlp(k: u8, game: &Game) -> Result<MultilinearProgram> {
    let base = match k {
        1 => Base::Mimlp1,
        2 => Base::Mimlp2,
        3 => Base::Mimlp3,
        4 => Base::Mimlp4,
        _ => return Err(validation(format!("MIMLP{k} does not exist"))),
    };
    let n = game.num_players();
    let counts = game.strategy_counts().to_vec();
    let spread: Vec<f64> = (0..n).map(|i| big_m(game, i)).collect();
    let ranges: Vec<(f64, f64)> = (0..n).map(|i| game.payoff_range(i)).collect();
    let mut bld = Builder::new();

    let per_strategy = |bld: &mut Builder, make: &dyn Fn(usize, usize) -> VarKind, bounds: &dyn Fn(usize) -> (f64, f64), binary: bool| -> Vec<Vec<usize>> {
        (0..n)
            .map(|i| {
                (0..counts[i])
                    .map(|s| {
                        let (lo, hi) = bounds(i);
                        bld.var(make(i, s), lo, hi, binary)
                    })
                    .collect()
            })
            .collect()
    };

    let x = add_x_vars(&mut bld, game);
    let ubar: Vec<usize> = (0..n)
        .map(|i| bld.var(VarKind::Ubar { player: i }, ranges[i].0, ranges[i].1, false))
        .collect();
    let u = per_strategy(&mut bld, &|player, strategy| VarKind::U { player, strategy }, &|i| ranges[i], false);
    let r = per_strategy(&mut bld, &|player, strategy| VarKind::R { player, strategy }, &|i| (0.0, spread[i]), false);
    let b = per_strategy(&mut bld, &|player, strategy| VarKind::B { player, strategy }, &|_| (0.0, 1.0), true);
    let f = match base {
        Base::Mimlp2 => per_strategy(&mut bld, &|player, strategy| VarKind::F { player, strategy }, &|i| (0.0, spread[i]), false),
        Base::Mimlp4 => per_strategy(&mut bld, &|player, strategy| VarKind::F { player, strategy }, &|_| (0.0, 1.0), false),
        _ => Vec::new(),
    };
    let g = match base {
        Base::Mimlp3 | Base::Mimlp4 => per_strategy(&mut bld, &|player, strategy| VarKind::G { player, strategy }, &|_| (0.0, 1.0), false),
        _ => Vec::new(),
    };
    let v = MimlpVars { x, ubar, u, r, b, f, g };

    add_simplex_rows(&mut bld, &v.x);
    for i in 0..n {
        for (s, terms) in utility_terms(game, &v.x, i).into_iter().enumerate() {
            let mut e = Expr::default();
            e.push(1.0, vec![v.u[i][s]]);
            for (coeff, vars) in terms {
                e.push(-coeff, vars);
            }
            bld.add(ConstraintFamily::Utility, e, Relation::Eq, 0.0);
        }
    }
    let linear = |terms: &[(f64, usize)]| {
        let mut e = Expr::default();
        for &(c, var) in terms {
            e.push(c, vec![var]);
        }
        e
    };
    for i in 0..n {
        for s in 0..counts[i] {
            bld.add(ConstraintFamily::BestValue, linear(&[(1.0, v.ubar[i]), (-1.0, v.u[i][s])]), Relation::Ge, 0.0);
        }
    }
    for i in 0..n {
        for s in 0..counts[i] {
            bld.add(
                ConstraintFamily::Regret,
                linear(&[(1.0, v.r[i][s]), (-1.0, v.ubar[i]), (1.0, v.u[i][s])]),
                Relation::Eq,
                0.0,
            );
        }
    }
    if matches!(base, Base::Mimlp1 | Base::Mimlp2) {
        for i in 0..n {
            for s in 0..counts[i] {
                bld.add(ConstraintFamily::Support, linear(&[(1.0, v.x[i][s]), (1.0, v.b[i][s])]), Relation::Le, 1.0);
            }
        }
    }
    if matches!(base, Base::Mimlp1 | Base::Mimlp3) {
        for i in 0..n {
            for s in 0..counts[i] {
                bld.add(
                    ConstraintFamily::RegretIndicator,
                    linear(&[(1.0, v.r[i][s]), (-spread[i], v.b[i][s])]),
                    Relation::Le,
                    0.0,
                );
            }
        }
    }

    let mut obj = Expr::default();
    let mut constant = 0.0;
    let mut target = None;
    match base {
        Base::Mimlp1 => {}
        Base::Mimlp2 => {
            for i in 0..n {
                for s in 0..counts[i] {
                    bld.add(ConstraintFamily::RegretPenalty, linear(&[(1.0, v.f[i][s]), (-1.0, v.r[i][s])]), Relation::Ge, 0.0);
                }
            }
            for i in 0..n {
                for s in 0..counts[i] {
                    bld.add(
                        ConstraintFamily::IndicatorPenalty,
                        linear(&[(1.0, v.f[i][s]), (-spread[i], v.b[i][s])]),
                        Relation::Ge,
                        0.0,
                    );
                }
            }
            for i in 0..n {
                for s in 0..counts[i] {
                    obj.push(1.0, vec![v.f[i][s]]);
                    obj.push(-spread[i], vec![v.b[i][s]]);
                }
            }
            target = Some(0.0);
        }
        Base::Mimlp3 => {
            add_g_rows(&mut bld, &v, &counts, &linear);
            for i in 0..n {
                for s in 0..counts[i] {
                    obj.push(1.0, vec![v.g[i][s]]);
                    obj.push(1.0, vec![v.b[i][s]]);
                }
            }
            constant = -(game.total_strategies() as f64);
            target = Some(0.0);
        }
        Base::Mimlp4 => {
            for i in 0..n {
                for s in 0..counts[i] {
                    bld.add(
                        ConstraintFamily::RegretPenalty,
                        linear(&[(1.0, v.f[i][s]), (-1.0 / spread[i], v.r[i][s])]),
                        Relation::Ge,
                        0.0,
                    );
                }
            }
            for i in 0..n {
                for s in 0..counts[i] {
                    bld.add(ConstraintFamily::IndicatorPenalty, linear(&[(1.0, v.f[i][s]), (-1.0, v.b[i][s])]), Relation::Ge, 0.0);
                }
            }
            add_g_rows(&mut bld, &v, &counts, &linear);
            for i in 0..n {
                for s in 0..counts[i] {
                    obj.push(1.0, vec![v.f[i][s]]);
                    obj.push(1.0, vec![v.g[i][s]]);
                }
            }
            target = Some(game.total_strategies() as f64);
        }
        _ => unreachable!(),
    }
    let sense = if base == Base::Mimlp1 {
        Sense::Feasibility
    } else {
        Sense::Min
    };
    let objective = Objective {
        sense,
        expr: obj,
        constant,
    };
    Ok(bld.finish(game, FormulationId::plain(base), objective, target))
}

fn add_g_rows(bld: &mut Builder, v: &MimlpVars, counts: &[usize], linear: &dyn Fn(&[(f64, usize)]) -> Expr) {
    for (i, &c) in counts.iter().enumerate() {
        for s in 0..c {
            bld.add(ConstraintFamily::ProbabilityPenalty, linear(&[(1.0, v.g[i][s]), (-1.0, v.x[i][s])]), Relation::Ge, 0.0);
        }
    }
    for (i, &c) in counts.iter().enumerate() {
        for s in 0..c {
            bld.add(ConstraintFamily::SupportPenalty, linear(&[(1.0, v.g[i][s]), (1.0, v.b[i][s])]), Relation::Ge, 1.0);
        }
    }
}

/// Replaces every binary flag by the constraint `b - b² = 0`.
///
/// A program without binaries is returned unchanged, with a warning recorded
/// in its metadata.
pub fn apply_continuous(mut program: MultilinearProgram) -> MultilinearProgram {
    let binaries: Vec<usize> = (0..program.variables.len())
        .filter(|&k| program.variables[k].binary)
        .collect();
    if binaries.is_empty() {
        program
            .metadata
            .warnings
            .push("apply_continuous: program has no binary variables".to_string());
        return program;
    }
    for k in binaries {
        let var = &mut program.variables[k];
        var.binary = false;
        var.lower = 0.0;
        var.upper = 1.0;
        let mut e = Expr::default();
        e.push(1.0, vec![k]);
        e.push(-1.0, vec![k, k]);
        program.constraints.push(Constraint {
            family: ConstraintFamily::BinaryQuadratic,
            expr: e,
            relation: Relation::Eq,
            rhs: 0.0,
        });
    }
    program.metadata.formulation.continuous = true;
    program
}

/// Pins the objective to the program's known optimal value and drops it.
pub fn apply_feasibility(mut program: MultilinearProgram) -> Result<MultilinearProgram> {
    if program.objective.sense != Sense::Min {
        return Err(validation(format!(
            "{} is not a minimisation program",
            program.metadata.formulation
        )));
    }
    let target = program.metadata.target_value.ok_or_else(|| {
        validation(format!("{} has no known optimal value", program.metadata.formulation))
    })?;
    let objective = std::mem::replace(
        &mut program.objective,
        Objective {
            sense: Sense::Feasibility,
            expr: Expr::default(),
            constant: 0.0,
        },
    );
    program.constraints.push(Constraint {
        family: ConstraintFamily::ObjectivePin,
        expr: objective.expr,
        relation: Relation::Eq,
        rhs: target - objective.constant,
    });
    program.metadata.formulation.feasibility = true;
    let id = program.metadata.formulation;
    if !id.is_legal() {
        return Err(validation(format!("formulation {id} is not a legal combination")));
    }
    Ok(program)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEvaluation {
    pub objective: f64,
    /// Largest constraint, bound or integrality violation; zero when feasible.
    pub max_violation: f64,
}

pub fn evaluate_point(program: &MultilinearProgram, assignment: &[f64]) -> Result<PointEvaluation> {
    if assignment.len() < program.variables.len() {
        return Err(validation(format!(
            "assignment misses variable {}",
            program.variables[assignment.len()].kind
        )));
    }
    if assignment.len() > program.variables.len() {
        return Err(validation(format!(
            "assignment has {} values for {} variables",
            assignment.len(),
            program.variables.len()
        )));
    }
    let mut worst: f64 = 0.0;
    for (var, &v) in program.variables.iter().zip(assignment) {
        worst = worst.max(var.lower - v).max(v - var.upper);
        if var.binary {
            worst = worst.max(v.abs().min((1.0 - v).abs()));
        }
    }
    for c in &program.constraints {
        worst = worst.max(c.violation(assignment));
    }
    let objective = match program.objective.sense {
        Sense::Feasibility => 0.0,
        _ => program.objective.eval(assignment),
    };
    Ok(PointEvaluation {
        objective,
        max_violation: worst,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedProfile {
    pub profile: MixedProfile,
    /// Largest `|Σ_s x_s^i - 1|` after clipping, before renormalisation.
    pub renormalization: f64,
}

/// Reads the `x` block of an assignment, clips it to `[0, 1]` and
/// renormalises each distribution.
pub fn extract_profile(program: &MultilinearProgram, assignment: &[f64]) -> Result<ExtractedProfile> {
    let x = program.x_indices();
    let mut renormalization: f64 = 0.0;
    let mut dists = Vec::with_capacity(x.len());
    for (i, xi) in x.iter().enumerate() {
        let mut d = Vec::with_capacity(xi.len());
        for &k in xi {
            let v = *assignment.get(k).ok_or_else(|| {
                validation(format!("assignment misses variable {}", program.variables[k].kind))
            })?;
            d.push(v.clamp(0.0, 1.0));
        }
        let sum: f64 = d.iter().sum();
        if !(sum >= 0.5) {
            return Err(Error::Corruption(format!(
                "distribution of player {} sums to {sum} before renormalisation",
                i + 1
            )));
        }
        renormalization = renormalization.max((sum - 1.0).abs());
        d.iter_mut().for_each(|v| *v /= sum);
        dists.push(d);
    }
    Ok(ExtractedProfile {
        profile: MixedProfile::new(dists)?,
        renormalization,
    })
}

/// Full assignment for `program` derived from a profile: `p = ū`, exact
/// utilities and regrets, indicators chosen per formulation and penalty
/// variables at their smallest feasible values.
///
/// At a Nash equilibrium the result satisfies every formulation and attains
/// its known optimal objective.
pub fn lift_profile(program: &MultilinearProgram, game: &Game, profile: &MixedProfile) -> Result<Vec<f64>> {
    game.check_profile(profile)?;
    if game.strategy_counts() != program.metadata.strategy_counts.as_slice() {
        return Err(validation("profile and program have different dimensions"));
    }
    let report = game.regret_report(profile)?;
    let base = program.metadata.formulation.base;
    let mut out = vec![0.0; program.variables.len()];
    for (k, var) in program.variables.iter().enumerate() {
        out[k] = match var.kind {
            VarKind::X { player, strategy } => profile.distribution(player)[strategy],
            VarKind::P { player } | VarKind::Ubar { player } => report.best_values[player],
            VarKind::U { player, strategy } => report.utilities[player][strategy],
            VarKind::R { player, strategy } => report.regrets[player][strategy],
            VarKind::B { player, strategy } => {
                indicator(base, game, &report, profile, player, strategy)
            }
            VarKind::F { player, strategy } => {
                let b = indicator(base, game, &report, profile, player, strategy);
                let r = report.regrets[player][strategy];
                let spread = big_m(game, player);
                if base == Base::Mimlp4 {
                    (r / spread).max(b)
                } else {
                    r.max(spread * b)
                }
            }
            VarKind::G { player, strategy } => {
                let b = indicator(base, game, &report, profile, player, strategy);
                profile.distribution(player)[strategy].max(1.0 - b)
            }
            VarKind::Aux(_) => 0.0,
        };
    }
    Ok(out)
}

fn indicator(
    base: Base,
    game: &Game,
    report: &crate::game::RegretReport,
    profile: &MixedProfile,
    player: usize,
    strategy: usize,
) -> f64 {
    let x = profile.distribution(player)[strategy];
    let r = report.regrets[player][strategy];
    let unplayed = x <= SUPPORT_TOLERANCE;
    let one = match base {
        Base::Mimlp3 => unplayed || r > SUPPORT_TOLERANCE,
        Base::Mimlp4 => unplayed || x < r / big_m(game, player),
        _ => unplayed,
    };
    if one {
        1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{named_game, InstanceSpec};

    #[test]
    fn codes_round_trip_and_legality() {
        let all = FormulationId::all();
        assert_eq!(all.len(), 17);
        for id in &all {
            assert!(id.is_legal());
            assert_eq!(id.to_string().parse::<FormulationId>().unwrap(), *id);
        }
        assert_eq!("MIMLP3(C,F)".parse::<FormulationId>().unwrap().to_string(), "MIMLP3CF");
        assert!(matches!("MIMLP1F".parse::<FormulationId>(), Err(Error::Validation(_))));
        assert!(matches!("MLP2C".parse::<FormulationId>(), Err(Error::Validation(_))));
        assert!(matches!("LP".parse::<FormulationId>(), Err(Error::Lookup(_))));
        let illegal = FormulationId::new(Base::Blp, true, false);
        let g = named_game("matching_pennies").unwrap();
        assert!(build(illegal, &g).is_err());
    }

    #[test]
    fn mlp1_counts() {
        let g = InstanceSpec::random(3, 2, 0).generate().unwrap();
        let p = build(FormulationId::plain(Base::Mlp1), &g).unwrap();
        assert_eq!(p.num_variables(), 9);
        assert_eq!(p.count_family(ConstraintFamily::BestResponse), 6);
        assert_eq!(p.count_family(ConstraintFamily::Simplex), 3);
        assert_eq!(p.constraints.len(), 9);
        let cubic = p.objective.expr.terms.iter().filter(|m| m.degree() == 3).count();
        assert_eq!(cubic, 24);
        assert!(p
            .constraints
            .iter()
            .filter(|c| c.family == ConstraintFamily::BestResponse)
            .all(|c| c.expr.max_degree() == 2));
        p.validate().unwrap();
    }

    #[test]
    fn mlp2_adds_surplus_row() {
        let g = InstanceSpec::random(3, 2, 4).generate().unwrap();
        let m1 = build_mlp1(&g);
        let m2 = build_mlp2(&g);
        assert_eq!(m2.num_variables(), m1.num_variables());
        assert_eq!(m2.constraints.len(), m1.constraints.len() + 1);
        assert_eq!(m2.objective.sense, Sense::Feasibility);
        let surplus = m2.constraints.last().unwrap();
        assert_eq!(surplus.family, ConstraintFamily::Surplus);
        assert_eq!(surplus.expr, m1.objective.expr);
    }

    #[test]
    fn matching_pennies_objective_cancels() {
        let g = named_game("matching_pennies").unwrap();
        let p = build_mlp1(&g);
        let combined = p.objective.expr.combined();
        assert_eq!(combined.len(), 2);
        assert!(combined.iter().all(|m| m.degree() == 1 && m.coeff == -1.0));
        let eq = MixedProfile::uniform(&g);
        let point = lift_profile(&p, &g, &eq).unwrap();
        let ev = evaluate_point(&p, &point).unwrap();
        assert_eq!(ev.objective, 0.0);
        assert_eq!(ev.max_violation, 0.0);
        let m2 = build_mlp2(&g);
        assert_eq!(evaluate_point(&m2, &lift_profile(&m2, &g, &eq).unwrap()).unwrap().max_violation, 0.0);
    }

    #[test]
    fn mimlp_counts() {
        let mut spec = InstanceSpec::random(3, 2, 1);
        spec.strategy_counts = vec![2, 3, 4];
        let g = spec.generate().unwrap();
        let total = g.total_strategies();
        let m1 = build_mimlp(1, &g).unwrap();
        assert_eq!(m1.num_variables(), 4 * total + 3);
        assert_eq!(m1.num_binaries(), total);
        assert_eq!(m1.objective.sense, Sense::Feasibility);
        assert_eq!(build_mimlp(2, &g).unwrap().num_variables(), 5 * total + 3);
        assert_eq!(build_mimlp(3, &g).unwrap().num_variables(), 5 * total + 3);
        assert_eq!(build_mimlp(4, &g).unwrap().num_variables(), 6 * total + 3);
        assert!(build_mimlp(5, &g).is_err());

        let has = |k: u8, fam| build_mimlp(k, &g).unwrap().count_family(fam) > 0;
        assert!(has(1, ConstraintFamily::Support) && has(1, ConstraintFamily::RegretIndicator));
        assert!(has(2, ConstraintFamily::Support) && !has(2, ConstraintFamily::RegretIndicator));
        assert!(!has(3, ConstraintFamily::Support) && has(3, ConstraintFamily::RegretIndicator));
        assert!(!has(4, ConstraintFamily::Support) && !has(4, ConstraintFamily::RegretIndicator));
        assert_eq!(build_mimlp(4, &g).unwrap().metadata.target_value, Some(total as f64));
    }

    #[test]
    fn continuous_variant() {
        let g = InstanceSpec::random(2, 3, 2).generate().unwrap();
        let c = apply_continuous(build_mimlp(1, &g).unwrap());
        assert_eq!(c.num_binaries(), 0);
        assert_eq!(c.count_family(ConstraintFamily::BinaryQuadratic), g.total_strategies());
        assert_eq!(c.metadata.formulation.to_string(), "MIMLP1C");
        c.validate().unwrap();
        let row = c.constraints.last().unwrap();
        let bvar = row.expr.terms[0].vars[0];
        let mut point = vec![0.0; c.num_variables()];
        point[bvar] = 0.5;
        assert_eq!(row.violation(&point), 0.25);

        let again = apply_continuous(build_mlp2(&g));
        assert_eq!(again.metadata.warnings.len(), 1);
        assert_eq!(again.metadata.formulation.to_string(), "MLP2");
    }

    #[test]
    fn feasibility_variant() {
        let g = InstanceSpec::random(2, 3, 2).generate().unwrap();
        let m3 = build_mimlp(3, &g).unwrap();
        let f3 = apply_feasibility(m3.clone()).unwrap();
        assert_eq!(f3.objective.sense, Sense::Feasibility);
        let pin = f3.constraints.last().unwrap();
        assert_eq!(pin.family, ConstraintFamily::ObjectivePin);
        assert_eq!(pin.expr, m3.objective.expr);
        assert_eq!(pin.rhs, g.total_strategies() as f64);
        let f4 = apply_feasibility(build_mimlp(4, &g).unwrap()).unwrap();
        assert_eq!(f4.constraints.last().unwrap().rhs, g.total_strategies() as f64);
        assert!(apply_feasibility(build_mlp2(&g)).is_err());
        assert!(apply_feasibility(build_mimlp(1, &g).unwrap()).is_err());
    }

    #[test]
    fn blp_requires_two_players() {
        let g = InstanceSpec::random(3, 2, 0).generate().unwrap();
        assert!(matches!(build(FormulationId::plain(Base::Blp), &g), Err(Error::Validation(_))));
    }

    #[test]
    fn evaluation_errors_and_extraction() {
        let g = named_game("matching_pennies").unwrap();
        let p = build_mlp2(&g);
        assert!(evaluate_point(&p, &[0.5; 3]).is_err());
        let mut point = vec![0.5, 0.5 + 1e-9, 0.5, 0.5, 0.0, 0.0];
        let ex = extract_profile(&p, &point).unwrap();
        assert!((ex.renormalization - 1e-9).abs() < 1e-12);
        assert!((ex.profile.distribution(0).iter().sum::<f64>() - 1.0).abs() < 1e-15);
        point[0] = 0.1;
        point[1] = 0.1;
        assert!(matches!(extract_profile(&p, &point), Err(Error::Corruption(_))));
    }

    #[test]
    fn var_names_round_trip() {
        for kind in [
            VarKind::X { player: 0, strategy: 3 },
            VarKind::P { player: 1 },
            VarKind::Ubar { player: 2 },
            VarKind::F { player: 0, strategy: 0 },
            VarKind::Aux(7),
        ] {
            assert_eq!(kind.to_string().parse::<VarKind>().unwrap(), kind);
        }
        assert!("x0_1".parse::<VarKind>().is_err());
        assert!("zz1".parse::<VarKind>().is_err());
    }

    #[test]
    fn constant_payoffs_use_unit_big_m() {
        let g = Game::new(vec![2, 2], vec![vec![5.0; 4], vec![5.0; 4]]).unwrap();
        assert_eq!(big_m(&g, 0), 1.0);
        let p = build(FormulationId::plain(Base::Mimlp4), &g).unwrap();
        let point = lift_profile(&p, &g, &MixedProfile::uniform(&g)).unwrap();
        let ev = evaluate_point(&p, &point).unwrap();
        assert_eq!(ev.max_violation, 0.0);
        assert_eq!(ev.objective, 4.0);
    }
}
