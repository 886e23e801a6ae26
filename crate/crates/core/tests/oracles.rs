mod common;

use common::*;
use multinash::formulations::{build, lift_profile, Base, FormulationId};
use multinash::generators::{named_game, InstanceSpec};
use multinash::global::{branch_select, solve};
use multinash::lp::solve_lp;
use multinash::relax::{propagate_simplex, BoxNode, RelaxationTemplate};
use multinash::{MixedProfile, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn utilities_match_nested_loops() {
    let g = InstanceSpec::random(3, 3, 42).generate().unwrap();
    let x = MixedProfile::uniform(&g);
    for i in 0..3 {
        let lib = g.strategy_utilities(&x, i).unwrap();
        let oracle = utilities(&g, x.distributions(), i);
        for (a, b) in lib.iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{a} vs {b}");
        }
    }
}

#[test]
fn oracle_knows_the_textbook_games() {
    let mp = bimatrix_equilibria(&named_game("matching_pennies").unwrap()).unwrap();
    assert_eq!(mp.len(), 1);
    assert!(mp[0].iter().flatten().all(|p| *p == rational(1, 2)));
    let co = bimatrix_equilibria(&named_game("coordination_2x2").unwrap()).unwrap();
    assert_eq!(co.len(), 3);
}

#[test]
fn pure_equilibria_agree_with_oracle() {
    for (game, eqs) in nondegenerate_games(30, small_bimatrix_spec) {
        let mut oracle: Vec<Vec<usize>> = eqs
            .iter()
            .filter(|e| e.distributions().iter().all(|d| d.iter().any(|&p| p == 1.0)))
            .map(|e| e.distributions().iter().map(|d| d.iter().position(|&p| p == 1.0).unwrap()).collect())
            .collect();
        oracle.sort();
        let lib: Vec<Vec<usize>> = game.enumerate_pure_equilibria().unwrap().into_iter().map(|p| p.0).collect();
        assert_eq!(lib, oracle);
    }
}

#[test]
fn coordination_solution_is_a_known_equilibrium() {
    let g = named_game("coordination_2x2").unwrap();
    let known: Vec<MixedProfile> = bimatrix_equilibria(&g).unwrap().iter().map(|e| to_profile(e)).collect();
    let p = build(FormulationId::plain(Base::Mlp2), &g).unwrap();
    let r = solve(&p, &g, &SolverConfig::default()).unwrap();
    let prof = r.profile.unwrap();
    assert!(max_regret(&g, prof.distributions()) <= 1e-6);
    assert!(known.iter().any(|k| k.linf_distance(&prof) <= 1e-6));
}

#[test]
fn root_branch_matches_independent_scan() {
    let g = InstanceSpec::random(2, 3, 5).generate().unwrap();
    let p = build(FormulationId::plain(Base::Mlp2), &g).unwrap();
    let t = RelaxationTemplate::new(&p);
    let mut node = BoxNode::root(&p);
    assert!(propagate_simplex(&p, &mut node));
    let lp = solve_lp(&t.instantiate(&node).lp);
    let point = lp.x;
    // Brute force: the worst product, then its widest factor.
    let mut worst = (0, -1.0);
    for (k, prod) in t.products.iter().enumerate() {
        let v = (point[prod.column] - point[prod.left] * point[prod.right]).abs();
        if v > worst.1 {
            worst = (k, v);
        }
    }
    let branch = branch_select(&p, &t, &node, &point);
    if worst.1 <= 1e-9 {
        assert_eq!(branch, None);
        return;
    }
    let support = &t.products[worst.0].support;
    let width = |v: usize| node.upper[v] - node.lower[v];
    let widest = support.iter().copied().fold(support[0], |b, v| if width(v) > width(b) { v } else { b });
    let b = branch.unwrap();
    assert_eq!(b.var, widest);
    assert!(!b.indicator);
}

#[test]
fn relaxations_contain_lifted_equilibria() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (game, eqs) in nondegenerate_games(6, small_bimatrix_spec) {
        for id in [
            FormulationId::plain(Base::Mlp2),
            "MIMLP3C".parse().unwrap(),
            "MIMLP4CF".parse().unwrap(),
        ] {
            let p = build(id, &game).unwrap();
            let t = RelaxationTemplate::new(&p);
            for eq in &eqs {
                let point = lift_profile(&p, &game, eq).unwrap();
                for _ in 0..20 {
                    let mut node = BoxNode::root(&p);
                    for (k, &v) in point.iter().enumerate() {
                        let (lo, hi) = (node.lower[k], node.upper[k]);
                        if p.variables[k].binary {
                            continue;
                        }
                        node.lower[k] = lo + rng.random::<f64>() * (v - lo);
                        node.upper[k] = v + rng.random::<f64>() * (hi - v);
                    }
                    let relaxation = t.instantiate(&node);
                    let viol = relaxation.lp.max_violation(&t.extend(&point));
                    assert!(viol <= 1e-7, "{id}: violation {viol}");
                }
            }
        }
    }
}

#[test]
fn local_certificates_hold_under_oracle() {
    for seed in 0..10 {
        let g = InstanceSpec::random(3, 3, seed).generate().unwrap();
        let r = multinash::local::multistart(&g, &SolverConfig::default().with_seed(seed)).unwrap();
        if r.is_solved() {
            assert!(max_regret(&g, r.profile.unwrap().distributions()) <= 1e-6);
        }
    }
}
