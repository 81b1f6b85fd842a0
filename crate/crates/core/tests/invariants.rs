use fermitheta::algebra::{enumerate_set, OperatorKind, OperatorSet};
use fermitheta::graph::ternary_tree_paulis;
use fermitheta::index::{estimate_index, index_upper, offdiag_index_check, IndexMethod, SeesawOptions};
use fermitheta::lab::{
    exp_moment_check, free_energy_experiment, tail_experiment, ExperimentReport, ModelSpec, TailConfig, TailQuantity,
};
use fermitheta::scheme::binomial;
use fermitheta::theta::theta_johnson_lp;
use num_rational::BigRational;

fn sets() -> Vec<(&'static str, OperatorSet)> {
    vec![
        ("S6_2", enumerate_set(OperatorKind::Majorana, 6, 2).unwrap()),
        ("S8_2", enumerate_set(OperatorKind::Majorana, 8, 2).unwrap()),
        ("S8_4", enumerate_set(OperatorKind::Majorana, 8, 4).unwrap()),
        ("S10_4", enumerate_set(OperatorKind::Majorana, 10, 4).unwrap()),
        ("P3_1", enumerate_set(OperatorKind::Pauli, 3, 1).unwrap()),
        ("P3_2", enumerate_set(OperatorKind::Pauli, 3, 2).unwrap()),
        ("ternary2", ternary_tree_paulis(2).unwrap()),
    ]
}

#[test]
fn sandwich_holds_on_every_set() {
    for (name, set) in sets() {
        let est = estimate_index(&set, IndexMethod::All, &SeesawOptions::default()).unwrap();
        let (lo, h, up) = (est.lower.unwrap(), est.heuristic.unwrap(), est.upper.unwrap());
        assert!(lo <= h + 1e-9 && h <= up + 1e-9, "{name}: {lo} ≤ {h} ≤ {up} fails");
        if let Some(x) = est.exact {
            assert!(up - lo <= 1e-9, "{name}: exact set with a gap");
            assert!((x - lo).abs() <= 1e-12);
        }
    }
}

#[test]
fn pauli_upper_equals_three_to_minus_k() {
    for (n, k) in [(1usize, 1i32), (2, 1), (3, 1), (4, 1), (4, 2)] {
        let set = enumerate_set(OperatorKind::Pauli, n, k as usize).unwrap();
        let up = index_upper(&set).unwrap().value;
        assert!((up - 3f64.powi(-k)).abs() <= 1e-3, "P^{n}_{k}: {up}");
    }
}

#[test]
fn equality_rows_close_the_sandwich_exactly() {
    for n in (12..=40).step_by(2) {
        let theta = theta_johnson_lp(n, 4).unwrap().exact.unwrap();
        let m = BigRational::from_integer(binomial(n as i64, 4));
        let lower = BigRational::new(binomial((n / 2) as i64, 2), binomial(n as i64, 4));
        assert_eq!(theta / m, lower, "n = {n}");
    }
}

#[test]
fn complementary_localities_agree() {
    for n in (4..=24).step_by(2) {
        for q in (2..n).step_by(2) {
            assert_eq!(theta_johnson_lp(n, q).unwrap().exact, theta_johnson_lp(n, n - q).unwrap().exact, "({n},{q})");
        }
    }
}

#[test]
fn offdiagonal_index_within_sixteen_delta() {
    let set = enumerate_set(OperatorKind::Majorana, 6, 2).unwrap();
    let rep = offdiag_index_check(&set, 32, 5).unwrap();
    assert!(rep.holds && rep.estimate <= 16.0 * rep.index_upper + 1e-9);
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let run = || free_energy_experiment(ModelSpec::syk(8, 4), &[0.5, 2.0], 40, 21).unwrap();
    let a: ExperimentReport = in_pool(1, run);
    let b: ExperimentReport = in_pool(4, run);
    assert_eq!(a.records, b.records);
    assert_eq!(a.summary, b.summary);
    let tail = |threads| {
        in_pool(threads, || {
            tail_experiment(&TailConfig::new(TailQuantity::ThermalEnergy, ModelSpec::spin_glass(3, 2), 64, 3)).unwrap()
        })
    };
    assert_eq!(tail(1).records, tail(3).records);
}

#[test]
fn spin_glass_experiments_hold() {
    for q in TailQuantity::ALL {
        let r = tail_experiment(&TailConfig::new(q, ModelSpec::spin_glass(4, 2), 300, 40)).unwrap();
        assert!(r.passed(), "{}: {:?}", q.name(), r.verdicts);
    }
    let r = exp_moment_check(ModelSpec::spin_glass(4, 2), &[0.05, 0.1, 0.2], 200, 2).unwrap();
    assert!(r.passed(), "{:?}", r.verdicts);
    let r = free_energy_experiment(ModelSpec::classical(10, 3), &[0.5, 1.0], 100, 6).unwrap();
    assert!(r.passed(), "{:?}", r.verdicts);
}

#[test]
fn reports_round_trip_through_json() {
    let r = free_energy_experiment(ModelSpec::syk(6, 2), &[1.0], 16, 1).unwrap();
    let back = ExperimentReport::from_json(&r.to_json().unwrap()).unwrap();
    assert_eq!(back, r);
}
