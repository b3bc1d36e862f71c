//! Acceptance checks, one test per shipped guarantee. Every test prints an
//! `ACCEPTANCE <n> <name>: PASS — <detail>` line on success (run with
//! `cargo test --test acceptance -- --nocapture` to see them), and the
//! desk-scale experiment behind criteria 5 and 10 executes once and is
//! shared between them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use selftrain::classifier::{MlpClassifier, TrainConfig};
use selftrain::dedup::{
    apply_removal_policy, fingerprint_bytes, CorpusEntry, RemovalReason, SetId,
};
use selftrain::metrics::{
    accuracy, macro_f1, macro_sensitivity, macro_specificity, roc_auc, top_k_accuracy,
    ConfusionMatrix,
};
use selftrain::selftrain::{rank_classes, SamplingSchedule, Variant};
use selftrain::shap::{exact_shapley, explain_with, Budget, ExplainerConfig};
use selftrain::Matrix64;

// ---------------------------------------------------------------------------
// Shared helpers

/// Sum of coefficient × product-of-member-dimensions terms: cheap to
/// evaluate, nonlinear across features, and closed under the slice/matrix
/// calling conventions of both attribution paths.
#[derive(Clone)]
struct Multilinear {
    terms: Vec<(Vec<usize>, f64)>,
}

impl Multilinear {
    /// Random constant, all singletons, and a few pairs/triples.
    fn random(features: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut terms = vec![(vec![], rng.gen_range(-1.0..1.0))];
        for j in 0..features {
            terms.push((vec![j], rng.gen_range(-2.0..2.0)));
        }
        for _ in 0..features.min(4) {
            let a = rng.gen_range(0..features);
            let b = rng.gen_range(0..features);
            if a != b {
                terms.push((vec![a, b], rng.gen_range(-1.0..1.0)));
            }
        }
        if features >= 3 {
            let mut idx: Vec<usize> = (0..features).collect();
            for k in 0..3 {
                let swap = rng.gen_range(k..features);
                idx.swap(k, swap);
            }
            terms.push((idx[..3].to_vec(), rng.gen_range(-0.5..0.5)));
        }
        Multilinear { terms }
    }

    /// Like `random`, but never references the dimensions in `excluded`.
    fn random_excluding(features: usize, excluded: &[usize], rng: &mut ChaCha8Rng) -> Self {
        let allowed: Vec<usize> = (0..features).filter(|j| !excluded.contains(j)).collect();
        let inner = Multilinear::random(allowed.len(), rng);
        let terms = inner
            .terms
            .into_iter()
            .map(|(members, c)| (members.into_iter().map(|j| allowed[j]).collect(), c))
            .collect();
        Multilinear { terms }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(members, c)| c * members.iter().map(|&j| x[j]).product::<f64>())
            .sum()
    }

    /// Matrix-in, single-column-matrix-out adapter for the kernel explainer.
    fn predict(&self, rows: &Matrix64) -> selftrain::Result<Matrix64> {
        let mut out = Matrix64::zeros(rows.rows(), 1);
        for i in 0..rows.rows() {
            out.set(i, 0, self.eval(rows.row(i)));
        }
        Ok(out)
    }
}

fn random_point(features: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..features).map(|_| rng.gen_range(-2.0..2.0)).collect()
}

/// Kernel attributions of a single-output model under full enumeration.
fn kernel_phi(
    model: &Multilinear,
    x: &[f64],
    background: &[f64],
) -> (f64, Vec<f64>) {
    let cfg = ExplainerConfig {
        background: Matrix64::from_rows(&[background.to_vec()]).unwrap(),
        grouping: None,
        budget: Budget::Full,
        seed: 0,
    };
    let explanations = explain_with(|rows| model.predict(rows), x, &cfg, 1).unwrap();
    let e = &explanations[0];
    (e.base_value, e.phi.clone())
}

// ---------------------------------------------------------------------------
// 1. Kernel attribution agrees with the exact subset-enumeration oracle.

#[test]
fn c01_kernel_shap_matches_exact_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0001);
    let mut max_component = 0.0f64;
    let mut max_efficiency = 0.0f64;
    for _ in 0..100 {
        let features = rng.gen_range(1..=10);
        let model = Multilinear::random(features, &mut rng);
        let x = random_point(features, &mut rng);
        let background = random_point(features, &mut rng);

        let (base, phi) = kernel_phi(&model, &x, &background);
        let oracle = exact_shapley(|row| model.eval(row), &x, &background).unwrap();

        for (a, b) in phi.iter().zip(&oracle) {
            max_component = max_component.max((a - b).abs());
        }
        let reconstructed = base + phi.iter().sum::<f64>();
        max_efficiency = max_efficiency.max((reconstructed - model.eval(&x)).abs());
    }
    let elapsed = started.elapsed();
    assert!(
        max_component <= 1e-6,
        "worst kernel-vs-oracle component gap {max_component:e}"
    );
    assert!(
        max_efficiency <= 1e-8,
        "worst efficiency residual {max_efficiency:e}"
    );
    assert!(
        elapsed < Duration::from_secs(30),
        "100 oracle comparisons took {elapsed:.2?}"
    );
    println!(
        "ACCEPTANCE 1 kernel-vs-exact-oracle: PASS — 100 triples, F ≤ 10, \
         worst component gap {max_component:.2e} (≤ 1e-6), worst efficiency \
         residual {max_efficiency:.2e} (≤ 1e-8), {elapsed:.2?} (< 30 s)"
    );
}

// ---------------------------------------------------------------------------
// 2. Attribution axioms: dummy, symmetry, linearity.

#[test]
fn c02_shap_axioms_dummy_symmetry_linearity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0002);

    let mut worst_dummy = 0.0f64;
    for _ in 0..50 {
        let features = rng.gen_range(2..=8);
        let dummy = rng.gen_range(0..features);
        let model = Multilinear::random_excluding(features, &[dummy], &mut rng);
        let x = random_point(features, &mut rng);
        let background = random_point(features, &mut rng);
        let (_, phi) = kernel_phi(&model, &x, &background);
        worst_dummy = worst_dummy.max(phi[dummy].abs());
    }
    assert!(worst_dummy <= 1e-8, "dummy feature earned {worst_dummy:e}");

    let mut worst_symmetry = 0.0f64;
    for _ in 0..50 {
        let features = rng.gen_range(2..=8);
        let i = rng.gen_range(0..features - 1);
        let j = i + 1;
        // Terms that treat i and j identically, plus terms over the rest.
        let mut model = Multilinear::random_excluding(features, &[i, j], &mut rng);
        let single = rng.gen_range(-2.0..2.0);
        model.terms.push((vec![i], single));
        model.terms.push((vec![j], single));
        model.terms.push((vec![i, j], rng.gen_range(-1.0..1.0)));
        if features > 2 {
            let k = (0..features).find(|&k| k != i && k != j).unwrap();
            let paired = rng.gen_range(-1.0..1.0);
            model.terms.push((vec![i, k], paired));
            model.terms.push((vec![j, k], paired));
        }
        let mut x = random_point(features, &mut rng);
        let mut background = random_point(features, &mut rng);
        x[j] = x[i];
        background[j] = background[i];
        let (_, phi) = kernel_phi(&model, &x, &background);
        worst_symmetry = worst_symmetry.max((phi[i] - phi[j]).abs());
    }
    assert!(
        worst_symmetry <= 1e-8,
        "symmetric features diverged by {worst_symmetry:e}"
    );

    let mut worst_linearity = 0.0f64;
    for _ in 0..50 {
        let features = rng.gen_range(2..=8);
        let f1 = Multilinear::random(features, &mut rng);
        let f2 = Multilinear::random(features, &mut rng);
        let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let mut combined = Multilinear {
            terms: f1.terms.iter().map(|(m, c)| (m.clone(), a * c)).collect(),
        };
        combined
            .terms
            .extend(f2.terms.iter().map(|(m, c)| (m.clone(), b * c)));
        let x = random_point(features, &mut rng);
        let background = random_point(features, &mut rng);
        let (_, phi1) = kernel_phi(&f1, &x, &background);
        let (_, phi2) = kernel_phi(&f2, &x, &background);
        let (_, phi) = kernel_phi(&combined, &x, &background);
        for k in 0..features {
            worst_linearity = worst_linearity.max((phi[k] - (a * phi1[k] + b * phi2[k])).abs());
        }
    }
    assert!(
        worst_linearity <= 1e-7,
        "linearity violated by {worst_linearity:e}"
    );

    println!(
        "ACCEPTANCE 2 attribution-axioms: PASS — 50 cases each: dummy \
         {worst_dummy:.2e} (≤ 1e-8), symmetry {worst_symmetry:.2e} (≤ 1e-8), \
         linearity {worst_linearity:.2e} (≤ 1e-7)"
    );
}

// ---------------------------------------------------------------------------
// 3. Metric values against hand computation and a brute-force AUC.

#[test]
fn c03_metrics_hand_case_and_auc_concordance() {
    // Six predictions over three classes, worked out by hand.
    let truth = [0, 0, 1, 1, 2, 2];
    let pred = [0, 1, 1, 1, 2, 0];
    let cm = ConfusionMatrix::from_predictions(&truth, &pred, 3).unwrap();
    let cases: [(&str, f64, f64, &str); 4] = [
        ("accuracy", accuracy(&cm).unwrap(), 4.0 / 6.0, "0.66667"),
        (
            "macro sensitivity",
            macro_sensitivity(&cm).unwrap(),
            2.0 / 3.0,
            "0.66667",
        ),
        (
            "macro specificity",
            macro_specificity(&cm).unwrap(),
            5.0 / 6.0,
            "0.83333",
        ),
        ("macro F1", macro_f1(&cm).unwrap(), 59.0 / 90.0, "0.65556"),
    ];
    for (name, got, want, rounded) in cases {
        assert!(
            (got - want).abs() <= 1e-9,
            "{name}: got {got}, want {want}"
        );
        assert_eq!(format!("{got:.5}"), rounded, "{name} rounds differently");
    }

    // AUC against the O(P·N) pairwise concordance count, ties at half credit.
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0003);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(2..=200);
        let mut positives: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.4)).collect();
        positives[0] = true;
        positives[1] = false;
        let tie_prone = rng.gen_bool(0.5);
        let scores: Vec<f64> = (0..n)
            .map(|_| {
                if tie_prone {
                    rng.gen_range(0..10) as f64 / 10.0
                } else {
                    rng.gen::<f64>()
                }
            })
            .collect();

        let mut concordant = 0.0f64;
        let mut pairs = 0.0f64;
        for p in 0..n {
            if !positives[p] {
                continue;
            }
            for q in 0..n {
                if positives[q] {
                    continue;
                }
                pairs += 1.0;
                concordant += match scores[p].partial_cmp(&scores[q]).unwrap() {
                    std::cmp::Ordering::Greater => 1.0,
                    std::cmp::Ordering::Equal => 0.5,
                    std::cmp::Ordering::Less => 0.0,
                };
            }
        }
        let brute = concordant / pairs;
        let fast: f64 = roc_auc(&scores, &positives).unwrap();
        worst = worst.max((fast - brute).abs());
    }
    assert!(worst <= 1e-12, "AUC deviates from concordance by {worst:e}");

    // Both truths sit in the two highest-probability slots of their rows.
    let probs = Matrix64::from_rows(&[vec![0.5, 0.3, 0.2], vec![0.2, 0.5, 0.3]]).unwrap();
    let top2: f64 = top_k_accuracy(&probs, &[1, 2], 2).unwrap();
    assert_eq!(top2, 1.0, "top-2 hand case must be exactly 1");

    println!(
        "ACCEPTANCE 3 metrics-oracle: PASS — hand case within 1e-9 of \
         4/6, 2/3, 5/6, 59/90; AUC within {worst:.2e} of brute force over \
         100 inputs (≤ 1e-12); top-2 hand case exactly 1.0"
    );
}

// ---------------------------------------------------------------------------
// 4. Selection-proportion schedule properties.

#[test]
fn c04_sampling_schedule_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0004);
    let mut checked = 0usize;
    for _ in 0..1000 {
        let classes = rng.gen_range(2..=8);
        let counts: Vec<usize> = (0..classes).map(|_| rng.gen_range(1..=10_000)).collect();
        let ranking = rank_classes(&counts).unwrap();

        for alpha in [0.5, 1.0, 3.0] {
            let isdl = SamplingSchedule::new(Variant::Isdl, alpha, &ranking).unwrap();
            let plus = SamplingSchedule::new(Variant::IsdlPlus, alpha, &ranking).unwrap();
            for schedule in [&isdl, &plus] {
                let z = schedule.z();
                for (l, &v) in z.iter().enumerate() {
                    assert!(
                        v > 0.0 && v <= 1.0,
                        "z out of (0,1] at rank {}: {v} (counts {counts:?}, α {alpha})",
                        l + 1
                    );
                }
                for w in z.windows(2) {
                    assert!(
                        w[0] <= w[1],
                        "z not nondecreasing toward the minority: {z:?} \
                         (counts {counts:?}, α {alpha})"
                    );
                }
            }
            assert!(
                plus.z()[0] < isdl.z()[0],
                "majority proportion not reduced: plus {} vs {} \
                 (counts {counts:?}, α {alpha})",
                plus.z()[0],
                isdl.z()[0]
            );
        }

        for variant in [Variant::Isdl, Variant::IsdlPlus] {
            let flat = SamplingSchedule::new(variant, 0.0, &ranking).unwrap();
            assert!(
                flat.z().iter().all(|&v| v == 1.0),
                "α=0 must select everything: {:?}",
                flat.z()
            );
        }
        checked += 1;
    }

    let ranking = rank_classes(&[100, 50, 10]).unwrap();
    let isdl = SamplingSchedule::new(Variant::Isdl, 1.0, &ranking).unwrap();
    let plus = SamplingSchedule::new(Variant::IsdlPlus, 1.0, &ranking).unwrap();
    assert_eq!(isdl.z(), &[0.1, 0.5, 1.0]);
    assert_eq!(plus.z(), &[0.05, 0.5, 0.95]);

    println!(
        "ACCEPTANCE 4 sampling-schedule: PASS — {checked} random count \
         vectors × α ∈ {{0.5, 1, 3}}: z ∈ (0,1], nondecreasing toward the \
         minority, majority proportion strictly reduced by ISDLplus; α=0 \
         all-ones; [100,50,10] α=1 exact"
    );
}

// ---------------------------------------------------------------------------
// 5 & 10. The desk-scale experiment, executed once and shared.

/// Five Gaussian classes at 100:1 imbalance (2133 labeled, 4000 unlabeled):
/// one crushed flank class the plus rule can feed (bravo), one saturated
/// anchor (delta), and a 18-sample minority (echo) both rebalancing rules
/// bootstrap. Training is convex, so the ten seeds probe selection noise.
const DESK_CONFIG: &str = r#"{
  "dataset": {
    "synthetic": {
      "class_names": ["alpha", "bravo", "charlie", "delta", "echo"],
      "means": [[0.0, 3.0], [2.853, 0.927], [1.763, -2.427], [-1.763, -2.427], [-2.853, 0.927]],
      "scales": [1.0, 1.35, 1.1, 1.0, 1.3],
      "counts": [1800, 35, 60, 220, 18],
      "unlabeled": 4000,
      "seed": 20230817
    }
  },
  "split": {"train": 0.5, "val": 0.1, "test": 0.4, "seed": 41},
  "train": {"epochs": 150, "base_lr": 0.05, "hidden_units": 0},
  "self_train": {"generations": 5, "confidence_floor": 0.65},
  "variants": ["naive", "ISDL", "ISDLplus"],
  "alphas": [3.0],
  "seeds": [101, 102, 103, 104, 105, 106, 107, 108, 109, 110],
  "explain": {"instances": [0], "top_n": 2}
}"#;

struct DeskRun {
    /// Kept alive so the output trees survive for every borrowing test.
    _dir: tempfile::TempDir,
    config_path: PathBuf,
    out_a: PathBuf,
    elapsed: Duration,
    report: serde_json::Value,
}

fn run_binary(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_selftrain"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn desk_run() -> &'static DeskRun {
    static RUN: OnceLock<DeskRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let config_path = dir.path().join("desk.json");
        std::fs::write(&config_path, DESK_CONFIG).unwrap();
        let out_a = dir.path().join("out_a");

        let started = Instant::now();
        let output = run_binary(&[
            "run",
            "--config",
            config_path.to_str().unwrap(),
            "--out",
            out_a.to_str().unwrap(),
        ]);
        let elapsed = started.elapsed();
        assert!(
            output.status.success(),
            "desk run failed: {}",
            String::from_utf8_lossy(&output.stderr)
        );

        let report =
            serde_json::from_slice(&std::fs::read(out_a.join("report.json")).unwrap()).unwrap();
        DeskRun {
            _dir: dir,
            config_path,
            out_a,
            elapsed,
            report,
        }
    })
}

#[test]
fn c05_desk_scale_rebalancing_beats_naive() {
    let desk = desk_run();

    // macro-F1 per (variant, seed index) from the run report.
    let mut f1: BTreeMap<(String, u64), f64> = BTreeMap::new();
    for run in desk.report["runs"].as_array().unwrap() {
        assert_eq!(run["status"], "ok", "arm failed: {run}");
        f1.insert(
            (
                run["variant"].as_str().unwrap().to_string(),
                run["seed_index"].as_u64().unwrap(),
            ),
            run["test"]["macro_f1"].as_f64().unwrap(),
        );
    }
    let series = |variant: &str| -> Vec<f64> {
        (0..10)
            .map(|i| f1[&(variant.to_string(), i)])
            .collect()
    };
    let median = |mut xs: Vec<f64>| -> f64 {
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        (xs[4] + xs[5]) / 2.0
    };

    let naive = series("naive");
    let isdl = series("ISDL");
    let plus = series("ISDLplus");
    let wins = naive.iter().zip(&isdl).filter(|(n, i)| i > n).count();
    let isdl_median = median(isdl);
    let plus_median = median(plus);

    assert!(wins >= 8, "ISDL beat naive on only {wins}/10 seeds");
    assert!(
        plus_median >= isdl_median,
        "ISDLplus median {plus_median} fell below ISDL median {isdl_median}"
    );
    assert!(
        desk.elapsed < Duration::from_secs(300),
        "desk experiment took {:.2?}",
        desk.elapsed
    );

    println!(
        "ACCEPTANCE 5 desk-scale-rebalancing: PASS — ISDL > naive macro-F1 \
         on {wins}/10 seeds (≥ 8), medians naive {:.4} / ISDL {isdl_median:.4} \
         / ISDLplus {plus_median:.4} (plus ≥ ISDL), {:.2?} (< 5 min)",
        median(naive),
        desk.elapsed
    );
}

// ---------------------------------------------------------------------------
// 6. First-generation selection totals shrink as α grows.

#[test]
fn c06_alpha_sweep_monotonicity() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("sweep.json");
    std::fs::write(
        &config_path,
        r#"{
  "dataset": {
    "synthetic": {
      "means": [[0.0, 0.0], [4.0, 0.0], [2.0, 3.5]],
      "scales": [0.9, 0.9, 0.9],
      "counts": [240, 80, 30],
      "unlabeled": 350,
      "seed": 9
    }
  },
  "split": {"train": 0.6, "val": 0.2, "test": 0.2, "seed": 3},
  "train": {"epochs": 60, "base_lr": 0.05, "hidden_units": 0},
  "self_train": {"generations": 1, "confidence_floor": 0.0},
  "variants": ["ISDL", "ISDLplus"],
  "alphas": [0.0, 0.5, 1.0, 3.0],
  "seeds": [5, 6]
}"#,
    )
    .unwrap();

    let output = run_binary(&["sweep", "--config", config_path.to_str().unwrap()]);
    assert!(
        output.status.success(),
        "sweep failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let stdout = String::from_utf8(output.stdout).unwrap();

    // variant,alpha,seed_index,total,... → totals[variant, seed] by alpha.
    let mut totals: BTreeMap<(String, String), Vec<(f64, u64)>> = BTreeMap::new();
    for line in stdout.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        totals
            .entry((fields[0].to_string(), fields[2].to_string()))
            .or_default()
            .push((fields[1].parse().unwrap(), fields[3].parse().unwrap()));
    }
    assert_eq!(totals.len(), 4, "expected 2 variants × 2 seeds");
    for ((variant, seed), mut by_alpha) in totals {
        by_alpha.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let alphas: Vec<f64> = by_alpha.iter().map(|p| p.0).collect();
        assert_eq!(alphas, [0.0, 0.5, 1.0, 3.0]);
        assert_eq!(
            by_alpha[0].1, 350,
            "{variant} seed {seed}: α=0 must select the whole above-floor pool"
        );
        for pair in by_alpha.windows(2) {
            assert!(
                pair[1].1 <= pair[0].1,
                "{variant} seed {seed}: totals rose from α={} ({}) to α={} ({})",
                pair[0].0,
                pair[0].1,
                pair[1].0,
                pair[1].1
            );
        }
    }

    println!(
        "ACCEPTANCE 6 alpha-sweep-monotonicity: PASS — generation-1 totals \
         nonincreasing over α ∈ {{0, 0.5, 1, 3}} for both variants × 2 seeds; \
         α=0 selects all 350 above-floor pool samples exactly"
    );
}

// ---------------------------------------------------------------------------
// 7. Analytic gradients against central finite differences.

#[test]
fn c07_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0007);
    let mut worst = 0.0f64;
    for draw in 0..20 {
        let dim = rng.gen_range(2..=5);
        let hidden = if draw % 2 == 0 { 0 } else { rng.gen_range(2..=6) };
        let classes = rng.gen_range(2..=4);
        let rows = rng.gen_range(3..=10);

        let model =
            MlpClassifier::<f64>::seeded_init(dim, hidden, classes, rng.gen::<u64>()).unwrap();
        let features = Matrix64::from_rows(
            &(0..rows).map(|_| random_point(dim, &mut rng)).collect::<Vec<_>>(),
        )
        .unwrap();
        let labels: Vec<usize> = (0..rows).map(|_| rng.gen_range(0..classes)).collect();

        let (_, grad) = model.loss_and_gradient(&features, &labels).unwrap();
        let params = model.params().to_vec();
        let h = 1e-5;
        for (k, &analytic) in grad.iter().enumerate() {
            let mut plus = params.clone();
            plus[k] += h;
            let mut minus = params.clone();
            minus[k] -= h;
            let loss_plus = MlpClassifier::<f64>::from_params(dim, hidden, classes, plus)
                .unwrap()
                .loss_and_gradient(&features, &labels)
                .unwrap()
                .0;
            let loss_minus = MlpClassifier::<f64>::from_params(dim, hidden, classes, minus)
                .unwrap()
                .loss_and_gradient(&features, &labels)
                .unwrap()
                .0;
            let numeric = (loss_plus - loss_minus) / (2.0 * h);
            let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8);
            worst = worst.max(rel);
        }
    }
    assert!(worst <= 1e-4, "worst gradient relative error {worst:e}");
    println!(
        "ACCEPTANCE 7 gradient-check: PASS — 20 random draws (dense and \
         linear heads), worst relative error {worst:.2e} (≤ 1e-4)"
    );
}

// ---------------------------------------------------------------------------
// 8. Learning-rate schedule at the documented epochs.

#[test]
fn c08_learning_rate_schedule_values() {
    let config = TrainConfig::<f64>::default();
    let cases = [
        (1usize, 1e-4),
        (50, 1e-4),
        (51, 9.6e-5),
        (52, 9.216e-5),
    ];
    for (epoch, want) in cases {
        let got = config.lr_at_epoch(epoch);
        assert!(
            (got - want).abs() <= 1e-15 * want,
            "epoch {epoch}: got {got:e}, want {want:e}"
        );
    }
    println!(
        "ACCEPTANCE 8 lr-schedule: PASS — epochs 1, 50, 51, 52 → 1e-4, 1e-4, \
         9.6e-5, 9.216e-5 within 1e-15 relative"
    );
}

// ---------------------------------------------------------------------------
// 9. Duplicate-removal policy on a corpus with known plants.

#[test]
fn c09_dedup_planted_corpus_cleanup() {
    let entry = |set: &str, file: &str, bytes: &[u8]| CorpusEntry {
        set_id: SetId::new(set),
        file_id: file.to_string(),
        digest: fingerprint_bytes(bytes),
        byte_length: bytes.len() as u64,
    };

    let mut corpus = Vec::new();
    // Seven byte-identical pairs across the two training sets; the policy
    // keeps the earliest-year copy, so the train2019 side must go.
    for g in 0..7 {
        let bytes = format!("duplicate-group-{g}").into_bytes();
        corpus.push(entry("train2018", &format!("dup{g}_a"), &bytes));
        corpus.push(entry("train2019", &format!("dup{g}_b"), &bytes));
    }
    // Four training files whose bytes also sit in the test set.
    for l in 0..4 {
        let bytes = format!("leaked-content-{l}").into_bytes();
        corpus.push(entry("train2019", &format!("leak{l}"), &bytes));
        corpus.push(entry("test2020", &format!("test{l}"), &bytes));
    }
    // Unique fillers everywhere, including an untouched user-defined set.
    for u in 0..5 {
        corpus.push(entry("train2018", &format!("clean18_{u}"), format!("u18-{u}").as_bytes()));
        corpus.push(entry("train2019", &format!("clean19_{u}"), format!("u19-{u}").as_bytes()));
        corpus.push(entry("test2020", &format!("cleanT_{u}"), format!("uT-{u}").as_bytes()));
    }
    corpus.push(entry("meta", "notes", b"not a train or test set"));

    let (cleaned, report) = apply_removal_policy(&corpus);

    let mut removals: Vec<(String, String, String)> = report
        .removed
        .iter()
        .map(|r| {
            (
                r.set_id.name().to_string(),
                r.file_id.clone(),
                r.reason.to_string(),
            )
        })
        .collect();
    removals.sort();
    let mut expected: Vec<(String, String, String)> = (0..7)
        .map(|g| {
            (
                "train2019".to_string(),
                format!("dup{g}_b"),
                RemovalReason::CrossTrainDuplicate.to_string(),
            )
        })
        .chain((0..4).map(|l| {
            (
                "train2019".to_string(),
                format!("leak{l}"),
                RemovalReason::TrainTestLeak.to_string(),
            )
        }))
        .collect();
    expected.sort();
    assert_eq!(removals, expected, "removals must match the plant exactly");
    assert_eq!(cleaned.len(), corpus.len() - 11);

    let tallies: Vec<(&str, usize)> = report
        .summary
        .iter()
        .map(|(k, &v)| (k.as_str(), v))
        .collect();
    assert_eq!(
        tallies,
        [("meta", 0), ("test2020", 0), ("train2018", 0), ("train2019", 11)]
    );

    let (again, second) = apply_removal_policy(&cleaned);
    assert!(second.removed.is_empty(), "cleanup must be idempotent");
    assert_eq!(again, cleaned);

    println!(
        "ACCEPTANCE 9 dedup-planted-corpus: PASS — 7 cross-train duplicates \
         and 4 train-test leaks removed exactly (11 removals, all from \
         train2019), summary tallies match, second pass removes nothing"
    );
}

// ---------------------------------------------------------------------------
// 10. Reruns of the same experiment are byte-identical.

fn collect_files(root: &Path, base: &Path, into: &mut Vec<PathBuf>) {
    for entry in std::fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            collect_files(&path, base, into);
        } else {
            into.push(path.strip_prefix(base).unwrap().to_path_buf());
        }
    }
}

#[test]
fn c10_repeated_runs_are_byte_identical() {
    let desk = desk_run();
    let out_b = desk.out_a.parent().unwrap().join("out_b");
    let output = run_binary(&[
        "run",
        "--config",
        desk.config_path.to_str().unwrap(),
        "--out",
        out_b.to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "second desk run failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );

    let mut files_a = Vec::new();
    let mut files_b = Vec::new();
    collect_files(&desk.out_a, &desk.out_a, &mut files_a);
    collect_files(&out_b, &out_b, &mut files_b);
    files_a.sort();
    files_b.sort();
    assert_eq!(files_a, files_b, "the two runs produced different file sets");
    for rel in &files_a {
        let a = std::fs::read(desk.out_a.join(rel)).unwrap();
        let b = std::fs::read(out_b.join(rel)).unwrap();
        assert_eq!(a, b, "{} differs between runs", rel.display());
    }

    println!(
        "ACCEPTANCE 10 determinism: PASS — two executions of the experiment \
         config produced byte-identical trees ({} files compared)",
        files_a.len()
    );
}
