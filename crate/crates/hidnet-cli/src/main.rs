//! `hidnet` command line: proposition verification, similarity scores,
//! propagation, training, attacks, sweeps, and timing benchmarks.
//! Configuration comes from plain `key = value` files; every CSV output
//! carries the resolved config as a comment header.

mod config;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use hidnet::classifier::forward;
use hidnet::dataset::{generate_synthetic, load_dataset, save_dataset, DatasetBundle};
use hidnet::diffusion::propagate;
use hidnet::experiment::{
    bench_feature_scaling, bench_propagation, run_oversmoothing_sweep, run_robustness_curve,
};
use hidnet::graph::normalize;
use hidnet::homophily::similarity_report;
use hidnet::perturb::{attack_edges, attack_features, AttackKind, AttackSpec};
use hidnet::stats::one_pass_mean_std;
use hidnet::train::train;
use hidnet::verify;

use config::Config;

#[derive(Parser)]
#[command(name = "hidnet", version, about = "High-order graph diffusion engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Plain-text `key = value` config; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run proposition checks (kernel, convergence, noncollapse, reductions, walk, all).
    Verify {
        #[arg(default_value = "all")]
        check: String,
    },
    /// Print 1-hop, 2-hop, and combined label-similarity scores as CSV.
    Similarity,
    /// Propagate the dataset features and write them in the matrix text format.
    Propagate,
    /// Train the classifier over `repeats` seeds and write a metrics CSV.
    Train,
    /// Apply an edge or feature attack and write the perturbed data plus manifest.
    Attack,
    /// Accuracy versus propagation depth for each k in k_list.
    Oversmooth,
    /// Accuracy versus attack rate for each rate in rates.
    Robustness,
    /// Per-step propagation timing across n_list plus feature-dimension scaling.
    Bench,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    match cli.command {
        Command::Verify { check } => cmd_verify(&cfg, &check),
        Command::Similarity => cmd_similarity(&cfg),
        Command::Propagate => cmd_propagate(&cfg),
        Command::Train => cmd_train(&cfg),
        Command::Attack => cmd_attack(&cfg),
        Command::Oversmooth => cmd_oversmooth(&cfg),
        Command::Robustness => cmd_robustness(&cfg),
        Command::Bench => cmd_bench(&cfg),
    }
}

fn load_bundle(cfg: &Config) -> Result<DatasetBundle> {
    if cfg.dataset == "synthetic" {
        Ok(generate_synthetic(&cfg.synthetic_spec())?)
    } else {
        Ok(load_dataset(Path::new(&cfg.dataset))?)
    }
}

fn write_csv(cfg: &Config, path: &Path, column_header: &str, rows: &[String]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    let mut body = cfg.to_header();
    body.push_str(column_header);
    body.push('\n');
    for row in rows {
        body.push_str(row);
        body.push('\n');
    }
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn cmd_verify(cfg: &Config, which: &str) -> Result<()> {
    let mut outcomes = Vec::new();
    let run_all = which == "all";
    if run_all || which == "kernel" {
        outcomes.push(verify::kernel_equivalence_check(20, 50, 20)?);
    }
    if run_all || which == "convergence" {
        outcomes.push(verify::convergence_check(10)?);
    }
    if run_all || which == "noncollapse" {
        let (hid, sgc) = verify::non_collapse_check()?;
        outcomes.push(hid);
        outcomes.push(sgc);
    }
    if run_all || which == "reductions" {
        outcomes.extend(verify::reduction_checks(20)?);
    }
    if run_all || which == "walk" {
        let (outcome, rows) =
            verify::walk_monte_carlo_check(12, cfg.walk_steps, cfg.trials, cfg.seed)?;
        let csv_rows: Vec<String> = rows
            .iter()
            .map(|&(node, emp, prob)| format!("{node},{emp},{prob},{}", (emp - prob).abs()))
            .collect();
        let path = PathBuf::from(&cfg.output);
        write_csv(cfg, &path, "node,empirical_freq,kernel_prob,abs_err", &csv_rows)?;
        println!("walk CSV written to {}", path.display());
        outcomes.push(outcome);
    }
    if outcomes.is_empty() {
        bail!("unknown check `{which}` (expected kernel, convergence, noncollapse, reductions, walk, all)");
    }
    let mut failed = false;
    for o in &outcomes {
        println!("{}", o.line());
        failed |= !o.pass;
    }
    if failed {
        bail!("verification failed");
    }
    Ok(())
}

fn cmd_similarity(cfg: &Config) -> Result<()> {
    let bundle = load_bundle(cfg)?;
    let report = similarity_report(&bundle.graph, &bundle.split.labels)?;
    println!("h1,h2,h12");
    println!("{},{},{}", report.h1, report.h2, report.h12);
    let rows = vec![format!("{},{},{}", report.h1, report.h2, report.h12)];
    write_csv(cfg, Path::new(&cfg.output), "h1,h2,h12", &rows)?;
    Ok(())
}

fn cmd_propagate(cfg: &Config) -> Result<()> {
    let bundle = load_bundle(cfg)?;
    let op = normalize(&bundle.graph);
    let out = propagate(&bundle.features, &op, &cfg.diffusion()?)?;
    out.write_text(Path::new(&cfg.output))?;
    println!(
        "propagated {} nodes x {} features for {} steps -> {}",
        out.rows(),
        out.cols(),
        cfg.steps,
        cfg.output
    );
    Ok(())
}

fn cmd_train(cfg: &Config) -> Result<()> {
    let bundle = load_bundle(cfg)?;
    let diffusion = cfg.diffusion()?;
    let tcfg = cfg.training();
    let op = normalize(&bundle.graph);
    let seeds = cfg.repeat_seeds();
    let mut rows = Vec::new();
    let mut accs = Vec::new();
    let mut f1s = Vec::new();
    for &seed in &seeds {
        let run_cfg = hidnet::train::TrainConfig {
            seed,
            ..tcfg.clone()
        };
        let outcome = train(&bundle, &op, &diffusion, &run_cfg)?;
        let logits = forward(&bundle.features, &outcome.params, &op, &diffusion, false, 0)?;
        let m = hidnet::metrics::evaluate(&logits, &bundle.split)?;
        println!(
            "seed {seed}: accuracy {:.4} f1_macro {:.4} f1_micro {:.4} auc {:.4} (best epoch {})",
            m.accuracy, m.f1_macro, m.f1_micro, m.auc, outcome.best_epoch
        );
        rows.push(format!(
            "{seed},{},{},{},{}",
            m.accuracy, m.f1_macro, m.f1_micro, m.auc
        ));
        accs.push(m.accuracy);
        f1s.push(m.f1_micro);

        let history_path = sibling_path(&cfg.output, &format!("history-{seed}.csv"));
        let history_rows: Vec<String> = outcome
            .history
            .iter()
            .map(|h| format!("{},{},{}", h.epoch, h.train_loss, h.val_accuracy))
            .collect();
        write_csv(cfg, &history_path, "epoch,train_loss,val_acc", &history_rows)?;

        let model_path = sibling_path(&cfg.output, &format!("model-{seed}.txt"));
        outcome.params.save(&model_path, &cfg.to_header())?;
    }
    let (acc_mean, acc_std) = one_pass_mean_std(&accs);
    let (f1_mean, f1_std) = one_pass_mean_std(&f1s);
    println!("accuracy {acc_mean:.4} +- {acc_std:.4}, f1_micro {f1_mean:.4} +- {f1_std:.4}");
    write_csv(
        cfg,
        Path::new(&cfg.output),
        "seed,accuracy,f1_macro,f1_micro,auc",
        &rows,
    )?;
    Ok(())
}

fn sibling_path(output: &str, suffix: &str) -> PathBuf {
    let p = Path::new(output);
    let stem = p
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    p.with_file_name(format!("{stem}.{suffix}"))
}

#[derive(Serialize)]
struct AttackManifest<'a> {
    kind: &'a str,
    rate: f64,
    seed: u64,
    requested: usize,
    achieved: usize,
}

fn cmd_attack(cfg: &Config) -> Result<()> {
    let bundle = load_bundle(cfg)?;
    let kind = cfg.attack_kind()?;
    let out_dir = PathBuf::from(&cfg.output);
    std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let (attacked, requested, achieved) = match kind {
        AttackKind::EdgeAdd | AttackKind::EdgeDelete => {
            let spec = AttackSpec {
                kind,
                rate: cfg.rate,
                seed: cfg.seed,
            };
            let outcome = attack_edges(&bundle.graph, &spec)?;
            let requested = outcome.requested;
            let achieved = outcome.achieved;
            (
                DatasetBundle {
                    graph: outcome.graph,
                    ..bundle
                },
                requested,
                achieved,
            )
        }
        AttackKind::FeatureNoise => {
            let noisy = attack_features(&bundle.features, cfg.rate, cfg.seed)?;
            let count = noisy.data().len();
            (
                DatasetBundle {
                    features: noisy,
                    ..bundle
                },
                count,
                count,
            )
        }
    };
    save_dataset(&attacked, &out_dir)?;
    let manifest = AttackManifest {
        kind: kind.name(),
        rate: cfg.rate,
        seed: cfg.seed,
        requested,
        achieved,
    };
    let line = serde_json::to_string(&manifest)?;
    std::fs::write(out_dir.join("manifest.jsonl"), format!("{line}\n"))?;
    println!("attacked dataset written to {}", out_dir.display());
    Ok(())
}

fn cmd_oversmooth(cfg: &Config) -> Result<()> {
    let bundle = load_bundle(cfg)?;
    let rows = run_oversmoothing_sweep(
        &bundle,
        &cfg.diffusion()?,
        &cfg.training(),
        &cfg.k_list,
        &cfg.repeat_seeds(),
    )?;
    let csv: Vec<String> = rows
        .iter()
        .map(|r| format!("{},{},{}", r.k, r.mean_accuracy, r.std_accuracy))
        .collect();
    for line in &csv {
        println!("{line}");
    }
    write_csv(cfg, Path::new(&cfg.output), "k,mean_acc,std", &csv)?;
    Ok(())
}

fn cmd_robustness(cfg: &Config) -> Result<()> {
    let bundle = load_bundle(cfg)?;
    let rows = run_robustness_curve(
        &bundle,
        &cfg.diffusion()?,
        &cfg.training(),
        cfg.attack_kind()?,
        &cfg.rates,
        &cfg.repeat_seeds(),
    )?;
    let csv: Vec<String> = rows
        .iter()
        .map(|r| format!("{},{},{}", r.rate, r.mean_accuracy, r.std_accuracy))
        .collect();
    for line in &csv {
        println!("{line}");
    }
    write_csv(cfg, Path::new(&cfg.output), "rate,mean_acc,std", &csv)?;
    Ok(())
}

fn cmd_bench(cfg: &Config) -> Result<()> {
    let report = bench_propagation(&cfg.n_list, cfg.degree, cfg.bench_dim, cfg.bench_steps)?;
    let dims: Vec<usize> = (0..3).map(|i| cfg.bench_dim << i).collect();
    let dim_n = *cfg.n_list.first().unwrap_or(&1000);
    let dim_rows = bench_feature_scaling(dim_n, cfg.degree.max(16.0), &dims, cfg.bench_steps)?;
    let mut csv: Vec<String> = report
        .rows
        .iter()
        .map(|r| format!("n,{},{}", r.n, r.seconds_per_step))
        .collect();
    csv.extend(
        dim_rows
            .iter()
            .map(|&(dim, secs)| format!("feature_dim,{dim},{secs}")),
    );
    csv.push(format!("fitted_exponent,{},", report.exponent));
    for line in &csv {
        println!("{line}");
    }
    write_csv(
        cfg,
        Path::new(&cfg.output),
        "sweep,value,seconds_per_step",
        &csv,
    )?;
    Ok(())
}
