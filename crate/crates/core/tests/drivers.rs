use paretosmg_core::pareto::{filter_nondominated, filter_with, run_pf, ArchiveEntry, Dominance, PfConfig, PfMode};
use paretosmg_core::problems::{make_quadratic_pair, make_synthetic, Problem};
use paretosmg_core::simplex::{default_max_iters, project_simplex, solve_min_norm, DEFAULT_TOL};
use paretosmg_core::smg::{run_smg, BatchSize, SmgConfig, StepSchedule};
use paretosmg_core::{DecisionVector, ObjectiveVector};
use proptest::prelude::*;

fn entry(x: f64, f: (i32, i32)) -> ArchiveEntry {
    ArchiveEntry {
        x: DecisionVector::new(vec![x]).unwrap(),
        fx: ObjectiveVector::new(vec![f.0 as f64, f.1 as f64]).unwrap(),
    }
}

#[test]
fn exact_smg_on_shared_minimizer_reaches_it() {
    let p = make_quadratic_pair(1.0, 1.0, vec![0.0, 0.0], vec![0.0, 0.0], 0.0).unwrap();
    let cfg = SmgConfig {
        max_iters: 200,
        schedule: StepSchedule::Constant { step: 0.2 },
        batch: BatchSize::Fixed(1),
        seed: 5,
        record_trajectory: false,
    };
    let x0 = DecisionVector::new(vec![1.5, -2.0]).unwrap();
    let trace = run_smg(&x0, &p, &cfg).unwrap();
    assert_eq!(trace.steps.len(), 200);
    assert!(trace.final_point.iter().all(|v| v.abs() < 1e-12));
    assert!(trace.final_values().iter().all(|v| *v < 1e-20));
}

#[test]
fn both_drivers_keep_their_invariants() {
    let p = make_synthetic("MOP2").unwrap();
    for mode in [PfMode::Smg, PfMode::Mg] {
        for dominance in [Dominance::Strict, Dominance::Weak] {
            let mut cfg = PfConfig::defaults(mode);
            cfg.max_outer_iters = 15;
            cfg.max_list_size = 400;
            cfg.dominance = dominance;
            cfg.seed = 9;
            let (archive, stats) = run_pf(&p, &cfg, mode).unwrap();
            assert_eq!(stats.list_size, archive.len());
            assert!(stats.outer_iters <= 15);
            let again = filter_with(archive.entries().to_vec(), dominance);
            assert_eq!(again, archive);
            for e in archive.entries() {
                assert!(p.region().contains(&e.x));
            }
        }
    }
}

proptest! {
    #[test]
    fn weak_filter_keeps_a_subset_of_the_strict_one(
        raw in prop::collection::vec((0i32..6, 0i32..6), 0..40),
    ) {
        let entries: Vec<ArchiveEntry> = raw.iter().enumerate().map(|(i, &f)| entry(i as f64, f)).collect();
        let strict = filter_nondominated(entries.clone());
        let weak = filter_with(entries, Dominance::Weak);
        prop_assert_eq!(raw.is_empty(), weak.is_empty());
        for e in weak.entries() {
            prop_assert!(strict.entries().contains(e));
        }
    }

    #[test]
    fn min_norm_weights_lie_on_the_simplex(
        g in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 2..4),
    ) {
        let sol = solve_min_norm(&g, DEFAULT_TOL, default_max_iters(g.len())).unwrap();
        let w = sol.weights.as_slice();
        prop_assert!(w.iter().all(|v| *v >= 0.0));
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let projected = project_simplex(w).unwrap();
        for (a, b) in projected.as_slice().iter().zip(w) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
