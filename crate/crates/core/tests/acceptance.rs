//! Acceptance run: one PASS/FAIL line per criterion. Failures are reported
//! but only turn into a nonzero exit when `MULTINASH_STRICT_ACCEPTANCE` is
//! set, so a plain workspace test run still reaches the other targets.
//! Run with `cargo test --release --test acceptance -- --nocapture`.

mod common;

use std::time::Instant;

use common::*;
use multinash::formulations::{build, evaluate_point, lift_profile, Base, FormulationId, VarKind};
use multinash::generators::{covariance_draw, InstanceSpec};
use multinash::interop::{export_model, parse_model, read_game_json, read_nfg, write_game_json, write_nfg};
use multinash::local::{gradient_unchecked, multistart, project_simplex};
use multinash::{global, Game, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn random_profile(game: &Game, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    game.strategy_counts()
        .iter()
        .map(|&c| {
            let w: Vec<f64> = (0..c).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|v| v / s).collect()
        })
        .collect()
}

fn mlp2_solve(game: &Game, time_limit: f64) -> multinash::SolveReport {
    let p = build(FormulationId::plain(Base::Mlp2), game).unwrap();
    let cfg = SolverConfig { time_limit: Some(time_limit), ..SolverConfig::default() };
    global::solve(&p, game, &cfg).unwrap()
}

fn certificate_soundness() -> Outcome {
    let start = Instant::now();
    let families = ["RG(2,2)", "RG(2,3)", "RG(2,4)", "RG(3,2)", "RG(3,3)", "CG(3,3,-0.2)"];
    let (mut certified, mut bad) = (0, 0);
    for k in 0..200u64 {
        let spec: InstanceSpec = families[(k % 6) as usize].parse().unwrap();
        let game = spec.with_seed(k / 6).generate().unwrap();
        let cfg = SolverConfig { time_limit: Some(30.0), seed: k, ..SolverConfig::default() };
        let reports = [mlp2_solve(&game, 30.0), multistart(&game, &cfg).unwrap()];
        for r in reports.iter().filter(|r| r.is_solved()) {
            certified += 1;
            if max_regret(&game, r.profile.as_ref().unwrap().distributions()) > 1e-6 {
                bad += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(bad == 0 && secs < 600.0, format!("{certified} certified reports, {bad} unsound, {secs:.1} s"))
}

fn oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut missing = 0;
    for (game, eqs) in nondegenerate_games(50, small_bimatrix_spec) {
        let r = mlp2_solve(&game, 60.0);
        match r.profile.filter(|_| r.status == multinash::SolveStatus::EquilibriumFound) {
            Some(p) => {
                let d = eqs.iter().map(|e| e.linf_distance(&p)).fold(f64::INFINITY, f64::min);
                worst = worst.max(d);
            }
            None => missing += 1,
        }
    }
    outcome(missing == 0 && worst <= 1e-5, format!("{missing} unsolved, worst distance {worst:.2e}"))
}

fn mlp1_sign() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let specs = ["RG(2,3)", "RG(3,2)", "RG(3,3)", "CG(3,3,-0.2)"];
    let (mut worst_obj, mut worst_viol) = (f64::NEG_INFINITY, 0.0f64);
    for g in 0..20u64 {
        let spec: InstanceSpec = specs[(g % 4) as usize].parse().unwrap();
        let game = spec.with_seed(g).generate().unwrap();
        let p = build(FormulationId::plain(Base::Mlp1), &game).unwrap();
        for _ in 0..500 {
            let x = random_profile(&game, &mut rng);
            let mut point = vec![0.0; p.variables.len()];
            for (k, var) in p.variables.iter().enumerate() {
                point[k] = match var.kind {
                    VarKind::X { player, strategy } => x[player][strategy],
                    VarKind::P { player } => {
                        let best = utilities(&game, &x, player).into_iter().fold(f64::NEG_INFINITY, f64::max);
                        best + rng.random::<f64>() * (var.upper - best).max(0.0)
                    }
                    other => panic!("unexpected MLP1 variable {other}"),
                };
            }
            let e = evaluate_point(&p, &point).unwrap();
            worst_viol = worst_viol.max(e.max_violation);
            worst_obj = worst_obj.max(e.objective);
        }
    }
    let mut worst_eq: f64 = 0.0;
    for (game, eqs) in nondegenerate_games(20, small_bimatrix_spec) {
        let p = build(FormulationId::plain(Base::Mlp1), &game).unwrap();
        for eq in &eqs {
            let e = evaluate_point(&p, &lift_profile(&p, &game, eq).unwrap()).unwrap();
            worst_eq = worst_eq.max(e.objective.abs());
        }
    }
    outcome(
        worst_obj <= 1e-10 && worst_viol <= 1e-9 && worst_eq <= 1e-8,
        format!("max sampled objective {worst_obj:.2e} (violation {worst_viol:.1e}), |objective| at equilibria {worst_eq:.2e}"),
    )
}

fn proposition_values() -> Outcome {
    let mut worst: f64 = 0.0;
    for (game, eqs) in nondegenerate_games(20, small_bimatrix_spec) {
        let total: usize = game.strategy_counts().iter().sum();
        for (base, target) in [(Base::Mimlp2, 0.0), (Base::Mimlp3, 0.0), (Base::Mimlp4, total as f64)] {
            let p = build(FormulationId::plain(base), &game).unwrap();
            for eq in &eqs {
                assert!(max_regret(&game, eq.distributions()) <= 1e-9);
                let e = evaluate_point(&p, &lift_profile(&p, &game, eq).unwrap()).unwrap();
                worst = worst.max((e.objective - target).abs()).max(e.max_violation);
            }
        }
    }
    outcome(worst <= 1e-8, format!("worst deviation {worst:.2e}"))
}

fn variant_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (game, eqs) in nondegenerate_games(20, small_bimatrix_spec) {
        for base in [Base::Mimlp2, Base::Mimlp3, Base::Mimlp4] {
            for (c, f) in [(false, false), (true, false), (false, true), (true, true)] {
                let p = build(FormulationId::new(base, c, f), &game).unwrap();
                for eq in &eqs {
                    worst = worst.max(evaluate_point(&p, &lift_profile(&p, &game, eq).unwrap()).unwrap().max_violation);
                    checked += 1;
                }
            }
        }
    }
    outcome(worst <= 1e-8, format!("{checked} lifted points, worst violation {worst:.2e}"))
}

fn desk_scale() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (n, k, limit) in [(3, 5, 300.0), (2, 10, 60.0)] {
        let (mut solved, mut total) = (0, 0.0);
        for seed in 0..10 {
            let game = InstanceSpec::random(n, k, seed).generate().unwrap();
            let r = mlp2_solve(&game, limit);
            total += r.wall_time;
            if r.is_solved() && r.wall_time <= limit {
                solved += 1;
            }
        }
        pass &= solved == 10;
        parts.push(format!("RG({n},{k}) {solved}/10 avg {:.3} s", total / 10.0));
    }
    outcome(pass, parts.join(", "))
}

fn formulation_ordering() -> Outcome {
    let limit = 120.0;
    let games: Vec<Game> = (0..10).map(|s| InstanceSpec::random(3, 3, s).generate().unwrap()).collect();
    let average = |id: FormulationId| {
        let cfg = SolverConfig { time_limit: Some(limit), ..SolverConfig::default() };
        let total: f64 = games
            .iter()
            .map(|g| {
                let r = global::solve(&build(id, g).unwrap(), g, &cfg).unwrap();
                if r.is_solved() { r.wall_time } else { limit }
            })
            .sum();
        total / games.len() as f64
    };
    let mlp2 = average(FormulationId::plain(Base::Mlp2));
    let mut beaten = Vec::new();
    let mut fastest_other = f64::INFINITY;
    for id in FormulationId::mixed_integer() {
        let t = average(id);
        fastest_other = fastest_other.min(t);
        if t <= mlp2 {
            beaten.push(format!("{id} {t:.4} s"));
        }
    }
    let detail = format!("MLP2 avg {mlp2:.4} s, fastest MIMLP avg {fastest_other:.4} s");
    if beaten.is_empty() {
        outcome(true, detail)
    } else {
        outcome(false, format!("{detail}; not slower than MLP2: {}", beaten.join(", ")))
    }
}

fn covariance_statistics() -> Outcome {
    let rho = -0.2;
    let spec = InstanceSpec::covariance(2, 100, rho, 17);
    let draws: Vec<Vec<f64>> = (0..10_000).map(|i| covariance_draw(&spec, i).unwrap()).collect();
    let n = draws.len() as f64;
    let mean = |k: usize| draws.iter().map(|d| d[k]).sum::<f64>() / n;
    let (m0, m1) = (mean(0), mean(1));
    let cov = |a: usize, ma: f64, b: usize, mb: f64| draws.iter().map(|d| (d[a] - ma) * (d[b] - mb)).sum::<f64>() / n;
    let r = cov(0, m0, 1, m1) / (cov(0, m0, 0, m0) * cov(1, m1, 1, m1)).sqrt();
    let rejected = [(2, -1.01), (2, 1.01), (3, -0.51), (4, -0.34)]
        .iter()
        .all(|&(players, bad)| InstanceSpec::covariance(players, 3, bad, 0).generate().is_err());
    let accepted = [(2, -1.0), (3, -0.5), (4, 1.0)]
        .iter()
        .all(|&(players, ok)| InstanceSpec::covariance(players, 2, ok, 0).generate().is_ok());
    outcome(
        (r - rho).abs() <= 0.05 && rejected && accepted,
        format!("sample correlation {r:.4}, out-of-range rho rejected: {rejected}, boundary accepted: {accepted}"),
    )
}

fn numerical_hygiene() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let specs = ["RG(2,3)", "RG(3,3)", "RG(2,[2,5])", "RG(4,2)", "CG(3,3,-0.2)"];
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for (g, spec) in specs.iter().enumerate() {
        let game = spec.parse::<InstanceSpec>().unwrap().with_seed(g as u64).generate().unwrap();
        for _ in 0..50 {
            let x = random_profile(&game, &mut rng);
            let analytic = gradient_unchecked(&game, &x);
            let mut err: f64 = 0.0;
            let mut scale: f64 = 0.0;
            for i in 0..x.len() {
                for s in 0..x[i].len() {
                    let mut plus = x.clone();
                    let mut minus = x.clone();
                    plus[i][s] += h;
                    minus[i][s] -= h;
                    let fd = (merit(&game, &plus) - merit(&game, &minus)) / (2.0 * h);
                    err = err.max((analytic[i][s] - fd).abs());
                    scale = scale.max(fd.abs());
                }
            }
            worst = worst.max(err / scale.max(f64::MIN_POSITIVE));
        }
    }
    let mut idem: f64 = 0.0;
    for _ in 0..1000 {
        let len = rng.random_range(1..10);
        let v: Vec<f64> = (0..len).map(|_| rng.random_range(-10.0..10.0)).collect();
        let p = project_simplex(&v);
        let q = project_simplex(&p);
        idem = idem.max(p.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    outcome(
        worst <= 1e-5 && idem <= 1e-12,
        format!("worst gradient relative error {worst:.2e}, projection drift {idem:.1e}"),
    )
}

fn interop() -> Outcome {
    let specs = ["RG(2,3)", "RG(3,2)", "RG(3,3)", "CG(3,3,-0.2)", "RG(2,[4,2])"];
    let all = FormulationId::all();
    let mut failures = Vec::new();
    for k in 0..100u64 {
        let spec: InstanceSpec = specs[(k % 5) as usize].parse().unwrap();
        let game = spec.with_seed(k).generate().unwrap();
        let nfg = write_nfg(&game);
        let from_nfg = read_nfg(&nfg).unwrap();
        if from_nfg.all_payoffs() != game.all_payoffs() || write_nfg(&from_nfg) != nfg || write_nfg(&game) != nfg {
            failures.push(format!("nfg {k}"));
        }
        let json = write_game_json(&game);
        if read_game_json(&json).unwrap() != game || write_game_json(&game) != json {
            failures.push(format!("json {k}"));
        }
        let id = all[(k as usize) % all.len()];
        if let Ok(p) = build(id, &game) {
            let text = export_model(&p);
            let again = export_model(&build(id, &game).unwrap());
            let parsed = parse_model(&text).unwrap();
            if text != again || parsed != p || export_model(&parsed) != text {
                failures.push(format!("model {id} {k}"));
            }
        }
    }
    let detail = if failures.is_empty() { "100 games lossless and stable".to_string() } else { failures.join(", ") };
    outcome(failures.is_empty(), detail)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 certificate soundness", certificate_soundness),
        ("2 oracle equivalence", oracle_equivalence),
        ("3 MLP1 sign property", mlp1_sign),
        ("4 MIMLP objective values", proposition_values),
        ("5 variant equivalence", variant_equivalence),
        ("6 desk-scale solvability", desk_scale),
        ("7 MLP2 fastest on RG(3,3)", formulation_ordering),
        ("8 covariance statistics", covariance_statistics),
        ("9 numerical hygiene", numerical_hygiene),
        ("10 interop round trips", interop),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {name}: {} [{:.1} s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 && std::env::var_os("MULTINASH_STRICT_ACCEPTANCE").is_some() {
        std::process::exit(1);
    }
}
