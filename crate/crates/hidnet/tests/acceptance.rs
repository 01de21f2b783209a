//! Acceptance suite. One test per criterion; each prints a PASS line with the
//! measured value against its pinned threshold (run with `--nocapture` to see
//! them). The two Cora-gated tests are `#[ignore]` by default because the
//! dataset cannot be redistributed; convert it with scripts/convert_cora.py
//! and run `cargo test -p hidnet --test acceptance -- --include-ignored`.

use std::path::PathBuf;
use std::time::Instant;

use hidnet::dataset::{generate_synthetic, load_dataset, DatasetBundle, SyntheticSpec};
use hidnet::diffusion::DiffusionConfig;
use hidnet::experiment::{
    bench_feature_scaling, bench_propagation, run_classification, run_oversmoothing_sweep,
    run_robustness_curve,
};
use hidnet::graph::normalize;
use hidnet::homophily::{combined_similarity, khop_similarity};
use hidnet::perturb::AttackKind;
use hidnet::stats::one_pass_mean_std;
use hidnet::train::TrainConfig;
use hidnet::verify;

const SEEDS: [u64; 5] = [0, 1, 2, 3, 4];

fn homophily_fixture(seed: u64) -> DatasetBundle {
    generate_synthetic(&SyntheticSpec {
        n: 400,
        classes: 3,
        p_in: 0.10,
        p_out: 0.01,
        feature_dim: 16,
        signal: 1.25,
        seed,
    })
    .unwrap()
}

fn heterophily_fixture(seed: u64) -> DatasetBundle {
    generate_synthetic(&SyntheticSpec {
        n: 400,
        classes: 3,
        p_in: 0.01,
        p_out: 0.10,
        feature_dim: 16,
        signal: 1.25,
        seed,
    })
    .unwrap()
}

fn experiment_train_config() -> TrainConfig {
    TrainConfig {
        learning_rate: 0.01,
        weight_decay: 0.0,
        epochs: 300,
        patience: 50,
        hidden_dim: 32,
        dropout: 0.3,
        ..TrainConfig::default()
    }
}

fn hid_cfg(gamma: f64, steps: usize) -> DiffusionConfig {
    DiffusionConfig::hid(0.1, 0.9, gamma, 1.0, steps)
}

fn mean_accuracy(bundle_seed_fn: &dyn Fn(u64) -> DatasetBundle, cfg: &DiffusionConfig) -> f64 {
    let tcfg = experiment_train_config();
    let accs: Vec<f64> = SEEDS
        .iter()
        .map(|&s| {
            let bundle = bundle_seed_fn(s);
            run_classification(&bundle, cfg, &tcfg, &[s]).unwrap()[0].accuracy
        })
        .collect();
    one_pass_mean_std(&accs).0
}

#[test]
fn criterion_1a_kernel_equivalence() {
    let outcome = verify::kernel_equivalence_check(20, 50, 20).unwrap();
    println!("criterion 1a: {}", outcome.line());
    assert!(outcome.pass, "{}", outcome.line());
}

#[test]
fn criterion_1b_convergence() {
    let outcome = verify::convergence_check(10).unwrap();
    println!("criterion 1b: {}", outcome.line());
    assert!(outcome.pass, "{}", outcome.line());
}

#[test]
fn criterion_1c_non_collapse() {
    let (hid, sgc) = verify::non_collapse_check().unwrap();
    println!("criterion 1c: {}", hid.line());
    println!("criterion 1c: {}", sgc.line());
    assert!(hid.pass, "{}", hid.line());
    assert!(sgc.pass, "{}", sgc.line());
}

#[test]
fn criterion_1d_reductions() {
    for outcome in verify::reduction_checks(20).unwrap() {
        println!("criterion 1d: {}", outcome.line());
        assert!(outcome.pass, "{}", outcome.line());
    }
}

#[test]
fn criterion_1e_walk_monte_carlo() {
    let (outcome, _) = verify::walk_monte_carlo_check(12, 5, 1_000_000, 5).unwrap();
    println!("criterion 1e: {}", outcome.line());
    assert!(outcome.pass, "{}", outcome.line());
}

#[test]
fn criterion_1_proposition_suite_runtime() {
    let start = Instant::now();
    assert!(verify::kernel_equivalence_check(20, 50, 20).unwrap().pass);
    assert!(verify::convergence_check(10).unwrap().pass);
    let (hid, sgc) = verify::non_collapse_check().unwrap();
    assert!(hid.pass && sgc.pass);
    assert!(verify::reduction_checks(20).unwrap().iter().all(|o| o.pass));
    assert!(verify::walk_monte_carlo_check(12, 5, 1_000_000, 5).unwrap().0.pass);
    let elapsed = start.elapsed().as_secs_f64();
    println!("criterion 1: full proposition suite in {elapsed:.2} s (require < 60)");
    assert!(elapsed < 60.0, "proposition suite took {elapsed:.1} s");
}

#[test]
fn criterion_2_monophily_on_near_bipartite_sbm() {
    let mut diffs = Vec::new();
    for seed in 0..20u64 {
        let bundle = generate_synthetic(&SyntheticSpec {
            n: 200,
            classes: 2,
            p_in: 0.01,
            p_out: 0.10,
            feature_dim: 4,
            signal: 1.0,
            seed,
        })
        .unwrap();
        let h1 = khop_similarity(&bundle.graph, &bundle.split.labels, 1).unwrap();
        let h2 = khop_similarity(&bundle.graph, &bundle.split.labels, 2).unwrap();
        diffs.push(h2 - h1);
    }
    let (mean, _) = one_pass_mean_std(&diffs);
    assert!(mean > 0.3, "mean h2 - h1 = {mean} <= 0.3");
    println!("criterion 2 (synthetic): PASS — mean h2 - h1 = {mean:.4} > 0.3 over 20 seeds");
}

fn cora_dir() -> PathBuf {
    if let Ok(dir) = std::env::var("HIDNET_CORA_DIR") {
        return PathBuf::from(dir);
    }
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/cora")
}

fn load_cora() -> DatasetBundle {
    let dir = cora_dir();
    load_dataset(&dir).unwrap_or_else(|e| {
        panic!(
            "Cora dataset not available at {} ({e}). Convert the public files with \
             scripts/convert_cora.py or point HIDNET_CORA_DIR at a converted copy.",
            dir.display()
        )
    })
}

#[test]
#[ignore = "needs data/cora converted with scripts/convert_cora.py (no dataset redistribution)"]
fn criterion_2_monophily_on_cora() {
    let bundle = load_cora();
    assert_eq!(bundle.graph.n(), 2708);
    assert_eq!(bundle.split.labels.num_classes(), 7);
    let h1 = khop_similarity(&bundle.graph, &bundle.split.labels, 1).unwrap();
    let h2 = khop_similarity(&bundle.graph, &bundle.split.labels, 2).unwrap();
    let h12 = combined_similarity(&bundle.graph, &bundle.split.labels).unwrap();
    println!("criterion 2 (cora): h1 = {h1:.4} (expect 0.8634 +- 0.02)");
    println!("criterion 2 (cora): h2 = {h2:.4} (expect 0.8696 +- 0.02)");
    println!("criterion 2 (cora): h12 = {h12:.4} (reference 0.8737)");
    assert!((h1 - 0.8634).abs() <= 0.02, "h1 = {h1}");
    assert!((h2 - 0.8696).abs() <= 0.02, "h2 = {h2}");
    println!("criterion 2 (cora): PASS");
}

#[test]
#[ignore = "needs data/cora converted with scripts/convert_cora.py (no dataset redistribution)"]
fn criterion_3_cora_classification() {
    let bundle = load_cora();
    let n_train = hidnet::dataset::LabeledSplit::count(&bundle.split.train);
    let n_val = hidnet::dataset::LabeledSplit::count(&bundle.split.val);
    let n_test = hidnet::dataset::LabeledSplit::count(&bundle.split.test);
    assert_eq!((n_train, n_val, n_test), (140, 500, 1000));

    let diffusion = DiffusionConfig::hid(0.1, 0.9, 0.3, 0.8, 10);
    let tcfg = TrainConfig {
        learning_rate: 0.01,
        weight_decay: 0.0,
        epochs: 1000,
        patience: 100,
        hidden_dim: 128,
        dropout: 0.55,
        ..TrainConfig::default()
    };
    let mut f1s = Vec::new();
    for &seed in &SEEDS {
        let start = Instant::now();
        let metrics = run_classification(&bundle, &diffusion, &tcfg, &[seed]).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        println!(
            "criterion 3: seed {seed} f1_micro {:.4} in {elapsed:.1} s",
            metrics[0].f1_micro
        );
        assert!(elapsed < 300.0, "seed {seed} took {elapsed:.1} s >= 5 min");
        f1s.push(metrics[0].f1_micro);
    }
    let (mean, std) = one_pass_mean_std(&f1s);
    println!("criterion 3: mean test F1-micro = {mean:.4} +- {std:.4} (require >= 0.80)");
    assert!(mean >= 0.80, "mean F1-micro {mean} < 0.80");
    println!("criterion 3: PASS");
}

#[test]
fn criterion_4_heterophily_gap() {
    let high_order = mean_accuracy(&heterophily_fixture, &hid_cfg(0.3, 10));
    let first_order = mean_accuracy(&heterophily_fixture, &hid_cfg(0.0, 10));
    let gap = (high_order - first_order) * 100.0;
    println!(
        "criterion 4: gamma 0.3 accuracy {:.4}, gamma 0 accuracy {:.4}, gap {gap:.2} points (require >= 2)",
        high_order, first_order
    );
    assert!(gap >= 2.0, "gap {gap:.2} points < 2");
    println!("criterion 4: PASS");
}

#[test]
fn criterion_5_robustness_gap() {
    let tcfg = experiment_train_config();
    let rates = [0.0, 0.4];
    let mut drops = Vec::new();
    for cfg in [hid_cfg(0.3, 10), DiffusionConfig::sgc(10)] {
        let mut clean = Vec::new();
        let mut attacked = Vec::new();
        for &seed in &SEEDS {
            let bundle = homophily_fixture(seed);
            let rows =
                run_robustness_curve(&bundle, &cfg, &tcfg, AttackKind::EdgeAdd, &rates, &[seed])
                    .unwrap();
            clean.push(rows[0].mean_accuracy);
            attacked.push(rows[1].mean_accuracy);
        }
        let drop = one_pass_mean_std(&clean).0 - one_pass_mean_std(&attacked).0;
        println!(
            "criterion 5: {} clean {:.4} attacked {:.4} drop {:.4}",
            cfg.mode.name(),
            one_pass_mean_std(&clean).0,
            one_pass_mean_std(&attacked).0,
            drop
        );
        drops.push(drop);
    }
    let advantage = (drops[1] - drops[0]) * 100.0;
    println!("criterion 5: hid drop is {advantage:.2} points smaller than sgc drop (require >= 2)");
    assert!(advantage >= 2.0, "advantage {advantage:.2} points < 2");
    println!("criterion 5: PASS");
}

#[test]
fn criterion_6_oversmoothing() {
    let tcfg = experiment_train_config();
    let k_list = [2usize, 20];
    let mut table = Vec::new();
    for cfg in [hid_cfg(0.3, 0), DiffusionConfig::sgc(0)] {
        let mut at_k = Vec::new();
        for &k in &k_list {
            let mut accs = Vec::new();
            for &seed in &SEEDS {
                let bundle = homophily_fixture(seed);
                let rows =
                    run_oversmoothing_sweep(&bundle, &cfg, &tcfg, &[k], &[seed]).unwrap();
                accs.push(rows[0].mean_accuracy);
            }
            at_k.push(one_pass_mean_std(&accs).0);
        }
        println!(
            "criterion 6: {} accuracy k=2 {:.4}, k=20 {:.4}",
            cfg.mode.name(),
            at_k[0],
            at_k[1]
        );
        table.push(at_k);
    }
    let hid_delta = (table[0][0] - table[0][1]) * 100.0;
    let sgc_drop = (table[1][0] - table[1][1]) * 100.0;
    println!(
        "criterion 6: hid delta {hid_delta:.2} points (require <= 5), sgc drop {sgc_drop:.2} points (require > 5)"
    );
    assert!(hid_delta <= 5.0, "hid delta {hid_delta:.2} points > 5");
    assert!(sgc_drop > 5.0, "sgc drop {sgc_drop:.2} points <= 5");
    println!("criterion 6: PASS");
}

#[test]
fn criterion_7_gradient_check() {
    use hidnet::classifier::{backward, finite_difference_worst_rel_error, MlpParams};
    use hidnet::dataset::{LabelVector, LabeledSplit};

    for seed in [101u64, 202, 303] {
        let bundle = generate_synthetic(&SyntheticSpec {
            n: 12,
            classes: 3,
            p_in: 0.4,
            p_out: 0.1,
            feature_dim: 4,
            signal: 1.0,
            seed,
        })
        .unwrap();
        let op = normalize(&bundle.graph);
        let labels = LabelVector::new(
            bundle.split.labels.as_slice().to_vec(),
            bundle.split.labels.num_classes(),
        )
        .unwrap();
        let train: Vec<bool> = (0..12).map(|i| i % 2 == 0).collect();
        let split = LabeledSplit::new(labels, train, vec![false; 12], vec![false; 12]).unwrap();
        let mut params = MlpParams::init(4, 6, 3, 0.0, seed).unwrap();
        let cfg = DiffusionConfig::hid(0.1, 0.9, 0.3, 0.8, 5);
        let (_, grads) = backward(&bundle.features, &params, &op, &cfg, &split, false, 0).unwrap();
        let worst = finite_difference_worst_rel_error(
            &bundle.features,
            &mut params,
            &op,
            &cfg,
            &split,
            &grads,
            1e-4,
        );
        println!("criterion 7: fixture {seed} worst relative error {worst:.3e} (require < 1e-4)");
        assert!(worst < 1e-4, "fixture {seed}: worst {worst:.3e}");
    }
    println!("criterion 7: PASS");
}

#[test]
fn criterion_8_complexity() {
    // |E| = O(n): per-step time must scale with exponent below 1.5
    let report = bench_propagation(&[1000, 2000, 4000, 8000], 4.0, 8, 10).unwrap();
    for row in &report.rows {
        println!(
            "criterion 8: n = {} -> {:.3e} s/step",
            row.n, row.seconds_per_step
        );
    }
    println!(
        "criterion 8: fitted exponent {:.3} (require < 1.5)",
        report.exponent
    );
    assert!(
        report.exponent < 1.5,
        "exponent {:.3} >= 1.5",
        report.exponent
    );

    // feature-dimension doubling on a dense graph stays within [1.5x, 3x]
    let rows = bench_feature_scaling(256, 64.0, &[16, 32, 64], 20).unwrap();
    for pair in rows.windows(2) {
        let ratio = pair[1].1 / pair[0].1;
        println!(
            "criterion 8: feature dim {} -> {}: time ratio {ratio:.2} (require in [1.5, 3])",
            pair[0].0, pair[1].0
        );
        assert!(
            (1.5..=3.0).contains(&ratio),
            "doubling ratio {ratio:.2} outside [1.5, 3]"
        );
    }
    println!("criterion 8: PASS");
}
