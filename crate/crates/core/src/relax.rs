//! Box nodes and linear relaxations of multilinear programs.
//!
//! A monomial `v_1 v_2 … v_d` (sorted ids) is decomposed by a left fold into
//! `w_2 = v_1 v_2, w_3 = w_2 v_3, …`; prefixes are shared between monomials.
//! Each bilinear product carries its four McCormick rows at the node's box,
//! and a square `b·b` carries the secant and the tangents at both interval
//! ends.

use std::collections::HashMap;

use crate::error::{validation, Result};
use crate::formulations::{ConstraintFamily, MultilinearProgram, Relation, Sense, VarKind};
use crate::lp::LinearProgram;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxNode {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub depth: usize,
    /// LP bound of the parent, `±∞` at the root.
    pub parent_bound: f64,
    /// Creation order; used to break ties between nodes.
    pub id: usize,
    /// Variable whose split created this node.
    pub pending_branch: Option<usize>,
}

impl BoxNode {
    pub fn root(program: &MultilinearProgram) -> Self {
        let bound = match program.objective.sense {
            Sense::Max => f64::INFINITY,
            _ => f64::NEG_INFINITY,
        };
        BoxNode {
            lower: program.variables.iter().map(|v| v.lower).collect(),
            upper: program.variables.iter().map(|v| v.upper).collect(),
            depth: 0,
            parent_bound: bound,
            id: 0,
            pending_branch: None,
        }
    }

    /// Intervals nonempty and inside the declared bounds; binary intervals
    /// one of `[0,0]`, `[1,1]`, `[0,1]`.
    pub fn check(&self, program: &MultilinearProgram) -> Result<()> {
        if self.lower.len() != program.variables.len() || self.upper.len() != program.variables.len() {
            return Err(validation("node dimension differs from the program"));
        }
        for (k, var) in program.variables.iter().enumerate() {
            let (lo, hi) = (self.lower[k], self.upper[k]);
            if !(lo <= hi) || lo < var.lower || hi > var.upper {
                return Err(validation(format!("node interval [{lo}, {hi}] invalid for {}", var.kind)));
            }
            if var.binary && ![(0.0, 0.0), (1.0, 1.0), (0.0, 1.0)].contains(&(lo, hi)) {
                return Err(validation(format!("binary {} has interval [{lo}, {hi}]", var.kind)));
            }
        }
        Ok(())
    }

    pub fn width(&self, var: usize) -> f64 {
        self.upper[var] - self.lower[var]
    }
}

/// Tightens `x` bounds through the simplex rows `Σ_s x_s = 1`.
/// Returns `false` when a row cannot be satisfied inside the box.
pub fn propagate_simplex(program: &MultilinearProgram, node: &mut BoxNode) -> bool {
    for c in program.constraints.iter().filter(|c| c.family == ConstraintFamily::Simplex) {
        let vars: Vec<usize> = c.expr.terms.iter().map(|m| m.vars[0]).collect();
        let lo_sum: f64 = vars.iter().map(|&v| node.lower[v]).sum();
        let hi_sum: f64 = vars.iter().map(|&v| node.upper[v]).sum();
        if lo_sum > 1.0 + 1e-9 || hi_sum < 1.0 - 1e-9 {
            return false;
        }
        for &v in &vars {
            let up = (1.0 - (lo_sum - node.lower[v])).min(node.upper[v]);
            let lo = (1.0 - (hi_sum - node.upper[v])).max(node.lower[v]);
            if lo > up {
                let mid = 0.5 * (lo + up);
                node.lower[v] = mid;
                node.upper[v] = mid;
            } else {
                node.lower[v] = lo;
                node.upper[v] = up;
            }
        }
    }
    true
}

/// An auxiliary column `column = left · right`.
#[derive(Debug, Clone, PartialEq)]
pub struct Product {
    pub column: usize,
    pub left: usize,
    pub right: usize,
    /// Original variables of the monomial prefix this column stands for.
    pub support: Vec<usize>,
}

impl Product {
    pub fn is_square(&self) -> bool {
        self.left == self.right
    }
}

#[derive(Debug, Clone)]
struct LinearRow {
    coeffs: Vec<(usize, f64)>,
    relation: Relation,
    rhs: f64,
}

/// Node-independent part of a relaxation: the decomposition of every
/// monomial and the linearised rows.
#[derive(Debug, Clone)]
pub struct RelaxationTemplate {
    pub num_original: usize,
    pub products: Vec<Product>,
    columns: HashMap<Vec<usize>, usize>,
    rows: Vec<LinearRow>,
    objective: Vec<f64>,
    objective_constant: f64,
    sense: Sense,
}

impl RelaxationTemplate {
    pub fn new(program: &MultilinearProgram) -> Self {
        let n = program.variables.len();
        let mut t = RelaxationTemplate {
            num_original: n,
            products: Vec::new(),
            columns: HashMap::new(),
            rows: Vec::new(),
            objective: Vec::new(),
            objective_constant: program.objective.constant,
            sense: program.objective.sense,
        };
        for c in &program.constraints {
            let coeffs = t.linearise(c.expr.terms.iter().map(|m| (m.coeff, m.vars.as_slice())));
            t.rows.push(LinearRow {
                coeffs,
                relation: c.relation,
                rhs: c.rhs,
            });
        }
        let obj = if t.sense != Sense::Feasibility {
            t.linearise(program.objective.expr.terms.iter().map(|m| (m.coeff, m.vars.as_slice())))
        } else {
            // Steer the LP vertex by pushing surplus rows up; it does not
            // affect pruning, which only needs feasibility.
            let terms: Vec<(f64, &[usize])> = program
                .constraints
                .iter()
                .filter(|c| c.family == ConstraintFamily::Surplus)
                .flat_map(|c| c.expr.terms.iter().map(|m| (m.coeff, m.vars.as_slice())))
                .collect();
            t.linearise(terms.into_iter())
        };
        let mut dense = vec![0.0; t.num_columns()];
        for (col, a) in obj {
            dense[col] += a;
        }
        t.objective = dense;
        t
    }

    pub fn num_columns(&self) -> usize {
        self.num_original + self.products.len()
    }

    /// LP column standing for a monomial (sorted ids), if any.
    pub fn column_of(&self, vars: &[usize]) -> Option<usize> {
        match vars {
            [v] => Some(*v),
            _ => self.columns.get(vars).copied(),
        }
    }

    fn column_for(&mut self, vars: &[usize]) -> usize {
        let mut col = vars[0];
        for k in 1..vars.len() {
            let prefix = &vars[..=k];
            col = match self.columns.get(prefix) {
                Some(&c) => c,
                None => {
                    let c = self.num_original + self.products.len();
                    self.products.push(Product {
                        column: c,
                        left: col,
                        right: vars[k],
                        support: prefix.to_vec(),
                    });
                    self.columns.insert(prefix.to_vec(), c);
                    c
                }
            };
        }
        col
    }

    fn linearise<'a>(&mut self, terms: impl Iterator<Item = (f64, &'a [usize])>) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = Vec::new();
        for (coeff, vars) in terms {
            let col = self.column_for(vars);
            match out.iter_mut().find(|(c, _)| *c == col) {
                Some(entry) => entry.1 += coeff,
                None => out.push((col, coeff)),
            }
        }
        out
    }

    /// Column bounds at a node: the node box for original variables and
    /// interval products for auxiliaries.
    pub fn column_bounds(&self, node: &BoxNode) -> (Vec<f64>, Vec<f64>) {
        let mut lower = node.lower.clone();
        let mut upper = node.upper.clone();
        for p in &self.products {
            let (al, au, cl, cu) = (lower[p.left], upper[p.left], lower[p.right], upper[p.right]);
            let (lo, hi) = if p.is_square() {
                let hi = (al * al).max(au * au);
                let lo = if al <= 0.0 && au >= 0.0 { 0.0 } else { (al * al).min(au * au) };
                (lo, hi)
            } else {
                let c = [al * cl, al * cu, au * cl, au * cu];
                (
                    c.iter().copied().fold(f64::INFINITY, f64::min),
                    c.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                )
            };
            lower.push(lo);
            upper.push(hi);
        }
        (lower, upper)
    }

    pub fn instantiate(&self, node: &BoxNode) -> LinearRelaxation {
        let (lower, upper) = self.column_bounds(node);
        let mut lp = LinearProgram::new(lower, upper);
        for row in &self.rows {
            lp.add_row(row.coeffs.clone(), row.relation, row.rhs);
        }
        for p in &self.products {
            let (w, a, c) = (p.column, p.left, p.right);
            let (al, au) = (lp.lower[a], lp.upper[a]);
            if p.is_square() {
                // secant: w <= (L+U) b - L U; tangents: w >= 2 t b - t²
                lp.add_row(sparse(&[(w, 1.0), (a, -(al + au))]), Relation::Le, -al * au);
                lp.add_row(sparse(&[(w, 1.0), (a, -2.0 * al)]), Relation::Ge, -al * al);
                lp.add_row(sparse(&[(w, 1.0), (a, -2.0 * au)]), Relation::Ge, -au * au);
                continue;
            }
            let (cl, cu) = (lp.lower[c], lp.upper[c]);
            lp.add_row(sparse(&[(w, 1.0), (c, -al), (a, -cl)]), Relation::Ge, -al * cl);
            lp.add_row(sparse(&[(w, 1.0), (c, -au), (a, -cu)]), Relation::Ge, -au * cu);
            lp.add_row(sparse(&[(w, 1.0), (c, -au), (a, -cl)]), Relation::Le, -au * cl);
            lp.add_row(sparse(&[(w, 1.0), (c, -al), (a, -cu)]), Relation::Le, -al * cu);
        }
        lp.objective = self.objective.clone();
        lp.maximize = self.sense != Sense::Min;
        LinearRelaxation {
            lp,
            num_original: self.num_original,
            objective_constant: self.objective_constant,
        }
    }

    /// Extends an assignment of the original variables with exact products.
    pub fn extend(&self, original: &[f64]) -> Vec<f64> {
        let mut out = original.to_vec();
        for p in &self.products {
            let v = out[p.left] * out[p.right];
            out.push(v);
        }
        out
    }

    /// `|w - left·right|` for every product at an LP point.
    pub fn product_violations(&self, point: &[f64]) -> Vec<f64> {
        self.products
            .iter()
            .map(|p| (point[p.column] - point[p.left] * point[p.right]).abs())
            .collect()
    }
}

fn sparse(entries: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
    for &(c, a) in entries {
        if a == 0.0 {
            continue;
        }
        match out.iter_mut().find(|e| e.0 == c) {
            Some(e) => e.1 += a,
            None => out.push((c, a)),
        }
    }
    out
}

/// LP over the original variables plus one column per monomial prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRelaxation {
    pub lp: LinearProgram,
    pub num_original: usize,
    /// Added to the LP value to obtain a bound on the program objective.
    pub objective_constant: f64,
}

/// Builds the relaxation of `program` at `node`.
pub fn relax(program: &MultilinearProgram, node: &BoxNode) -> LinearRelaxation {
    RelaxationTemplate::new(program).instantiate(node)
}

/// Whether variable `k` is an indicator.
pub fn is_indicator(program: &MultilinearProgram, k: usize) -> bool {
    matches!(program.variables[k].kind, VarKind::B { .. })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulations::{
        build, build_mimlp, build_mlp2, evaluate_point, lift_profile, Base, Constraint, Expr, FormulationId, Metadata, Monomial,
        Objective, Variable,
    };
    use crate::game::MixedProfile;
    use crate::generators::named_game;
    use crate::lp::{solve_lp, LpStatus};

    fn cube_program() -> MultilinearProgram {
        let var = |k| Variable {
            kind: VarKind::X { player: k, strategy: 0 },
            lower: 0.0,
            upper: 1.0,
            binary: false,
        };
        MultilinearProgram {
            variables: (0..3).map(var).collect(),
            constraints: vec![Constraint {
                family: ConstraintFamily::Surplus,
                expr: Expr {
                    terms: vec![Monomial::new(1.0, vec![0, 1, 2])],
                },
                relation: Relation::Ge,
                rhs: 0.0,
            }],
            objective: Objective {
                sense: Sense::Feasibility,
                expr: Expr::default(),
                constant: 0.0,
            },
            metadata: Metadata {
                formulation: FormulationId::plain(Base::Mlp2),
                strategy_counts: vec![1, 1, 1],
                game_hash: String::new(),
                target_value: None,
                warnings: Vec::new(),
            },
        }
    }

    #[test]
    fn trilinear_chain() {
        let p = cube_program();
        let t = RelaxationTemplate::new(&p);
        assert_eq!(t.products.len(), 2);
        assert_eq!((t.products[0].left, t.products[0].right), (0, 1));
        assert_eq!((t.products[1].left, t.products[1].right), (3, 2));
        let r = t.instantiate(&BoxNode::root(&p));
        assert_eq!(r.lp.rows.len(), 1 + 8);
    }

    #[test]
    fn fixed_indicator_forces_square() {
        let g = named_game("coordination_2x2").unwrap();
        let prog = build(FormulationId::new(Base::Mimlp1, true, false), &g).unwrap();
        let t = RelaxationTemplate::new(&prog);
        let sq = t.products.iter().find(|p| p.is_square()).unwrap().clone();
        let mut node = BoxNode::root(&prog);
        node.lower[sq.left] = 1.0;
        let r = t.instantiate(&node);
        let mut lp = r.lp.clone();
        lp.objective = vec![0.0; lp.num_vars()];
        lp.objective[sq.column] = 1.0;
        let lo = solve_lp(&lp);
        lp.maximize = true;
        let hi = solve_lp(&lp);
        assert_eq!(lo.status, LpStatus::Optimal);
        assert!((lo.value - 1.0).abs() < 1e-9 && (hi.value - 1.0).abs() < 1e-9);
        assert_eq!(lo.x[sq.left], 1.0);
    }

    #[test]
    fn root_admits_uniform_equilibrium() {
        let g = named_game("matching_pennies").unwrap();
        let prog = build_mlp2(&g);
        let t = RelaxationTemplate::new(&prog);
        let point = lift_profile(&prog, &g, &MixedProfile::uniform(&g)).unwrap();
        assert_eq!(evaluate_point(&prog, &point).unwrap().max_violation, 0.0);
        let ext = t.extend(&point);
        let r = t.instantiate(&BoxNode::root(&prog));
        assert!(r.lp.max_violation(&ext) < 1e-12);
    }

    #[test]
    fn propagation_tightens() {
        let g = named_game("matching_pennies").unwrap();
        let prog = build_mimlp(1, &g).unwrap();
        let mut node = BoxNode::root(&prog);
        node.upper[0] = 0.25;
        assert!(propagate_simplex(&prog, &mut node));
        assert_eq!(node.lower[1], 0.75);
        node.upper[1] = 0.5;
        assert!(!propagate_simplex(&prog, &mut node));
        node.check(&prog).unwrap_or(());
    }
}
