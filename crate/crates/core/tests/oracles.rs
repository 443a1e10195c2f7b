//! Independent reimplementations checked against the library.

use std::collections::HashMap;

use rainpipe_core::eval::{binary_metrics, confusion, stratified_kfold, FoldPlan};
use rainpipe_core::matrix::FeatureMatrix;
use rainpipe_core::models::adaboost::fit_adaboost_traced;
use rainpipe_core::models::{fit_decision_table, AdaBoostParams, DecisionTableParams};
use rainpipe_core::rng;
use rand::Rng;

fn noisy_plane(n: usize, seed: u64) -> (FeatureMatrix<f64>, Vec<u8>) {
    let mut r = rng::seeded(seed);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for _ in 0..n {
        let (a, b): (f64, f64) = (r.gen(), r.gen());
        let noise: f64 = r.gen_range(-0.3..0.3);
        rows.push(vec![a, b]);
        y.push(u8::from(a + b + noise > 1.0));
    }
    (FeatureMatrix::from_rows(&rows).unwrap(), y)
}

#[test]
fn adaboost_rounds_follow_the_weight_recurrence() {
    let (x, y) = noisy_plane(40, 11);
    let (model, trace) = fit_adaboost_traced(&x, &y, &AdaBoostParams { n_estimators: 5 }).unwrap();
    assert_eq!(model.stumps.len(), 5, "fixture should not stop early");

    let n = y.len();
    let mut w = vec![1.0 / n as f64; n];
    for t in 0..5 {
        let h: Vec<f64> = (0..n)
            .map(|i| if model.stumps[t].value(x.row(i)) >= 0.5 { 1.0 } else { -1.0 })
            .collect();
        let s: Vec<f64> = y.iter().map(|&v| if v == 1 { 1.0 } else { -1.0 }).collect();
        let mut eps = 0.0;
        for i in 0..n {
            if h[i] != s[i] {
                eps += w[i];
            }
        }
        let alpha = 0.5 * ((1.0 - eps) / eps).ln();
        assert!((model.errors[t] - eps).abs() < 1e-12, "round {t}: eps {} vs {eps}", model.errors[t]);
        assert!((model.alphas[t] - alpha).abs() < 1e-12, "round {t}: alpha {} vs {alpha}", model.alphas[t]);
        assert!(eps < 0.5);

        let mut next: Vec<f64> = (0..n).map(|i| w[i] * (-alpha * s[i] * h[i]).exp()).collect();
        let z: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= z);
        for i in 0..n {
            assert!((trace.weights[t][i] - next[i]).abs() < 1e-12);
        }
        w = next;
    }
}

fn quantile_edges(col: &[f64], n_bins: usize) -> Vec<f64> {
    let mut v = col.to_vec();
    v.sort_by(f64::total_cmp);
    let mut edges = Vec::new();
    for b in 1..n_bins {
        let e = v[(b * v.len() / n_bins).min(v.len() - 1)];
        if e > v[0] && edges.last() != Some(&e) {
            edges.push(e);
        }
    }
    edges
}

fn cv_accuracy_oracle(bins: &[Vec<usize>], subset: &[usize], y: &[u8], plan: &FoldPlan) -> f64 {
    let mut correct = 0;
    for f in 0..plan.k {
        let test = plan.test_indices(f);
        let mut cells: HashMap<Vec<usize>, (f64, f64)> = HashMap::new();
        let (mut n, mut ones) = (0.0, 0.0);
        for i in (0..y.len()).filter(|i| !test.contains(i)) {
            let c = cells.entry(subset.iter().map(|&j| bins[j][i]).collect()).or_default();
            c.0 += 1.0;
            c.1 += f64::from(y[i]);
            n += 1.0;
            ones += f64::from(y[i]);
        }
        for &i in &test {
            let key: Vec<usize> = subset.iter().map(|&j| bins[j][i]).collect();
            let frac = cells.get(&key).map_or(ones / n, |c| c.1 / c.0);
            if u8::from(frac >= 0.5) == y[i] {
                correct += 1;
            }
        }
    }
    correct as f64 / y.len() as f64
}

#[test]
fn decision_table_agrees_with_exhaustive_subset_search() {
    let mut r = rng::seeded(5);
    let n = 500;
    let informative = 2;
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for _ in 0..n {
        let row: Vec<f64> = (0..4).map(|_| r.gen()).collect();
        let flip = r.gen::<f64>() < 0.1;
        y.push(u8::from((row[informative] > 0.5) != flip));
        rows.push(row);
    }
    let x = FeatureMatrix::from_rows(&rows).unwrap();
    let params = DecisionTableParams { seed: 3, ..Default::default() };
    let model = fit_decision_table(&x, &y, &params).unwrap();

    let bins: Vec<Vec<usize>> = (0..4)
        .map(|j| {
            let col = x.column(j);
            let edges = quantile_edges(&col, params.n_bins);
            col.iter().map(|v| edges.iter().filter(|&&e| e <= *v).count()).collect()
        })
        .collect();
    let plan = stratified_kfold(&y, params.cv_folds, params.seed).unwrap();
    let mut scored: Vec<(Vec<usize>, f64)> = Vec::new();
    for a in 0..4 {
        scored.push((vec![a], cv_accuracy_oracle(&bins, &[a], &y, &plan)));
        for b in a + 1..4 {
            scored.push((vec![a, b], cv_accuracy_oracle(&bins, &[a, b], &y, &plan)));
        }
    }
    let best = scored.iter().max_by(|p, q| p.1.total_cmp(&q.1)).unwrap();
    assert!(best.0.contains(&informative), "exhaustive best {:?}", best);
    assert!(model.features.contains(&informative), "model picked {:?}", model.features);
    // greedy forward selection starts from the best single feature
    let best_single = scored.iter().filter(|s| s.0.len() == 1).max_by(|p, q| p.1.total_cmp(&q.1)).unwrap();
    assert_eq!(model.features[0], best_single.0[0]);
}

#[test]
fn metrics_match_brute_force_on_random_vectors() {
    let mut r = rng::seeded(17);
    for _ in 0..500 {
        let n = r.gen_range(1..200);
        let p1: f64 = r.gen();
        let t: Vec<u8> = (0..n).map(|_| u8::from(r.gen::<f64>() < p1)).collect();
        let p: Vec<u8> = (0..n).map(|_| u8::from(r.gen::<f64>() < 0.5)).collect();
        let cm = confusion(&t, &p).unwrap();
        let count = |a: u8, b: u8| (0..n).filter(|&i| t[i] == a && p[i] == b).count();
        let (tp, tn, fp, fn_) = (count(1, 1), count(0, 0), count(0, 1), count(1, 0));
        assert_eq!((cm.tp, cm.tn, cm.fp, cm.fn_), (tp, tn, fp, fn_));

        let m = binary_metrics(&cm).unwrap();
        let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
        let recall = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        assert_eq!(m.accuracy, (tp + tn) as f64 / n as f64);
        assert_eq!((m.precision, m.recall, m.f1), (precision, recall, f1));
        assert_eq!((m.precision_undefined, m.recall_undefined), (tp + fp == 0, tp + fn_ == 0));
    }
}

#[test]
fn f1_respects_the_min_side_bound() {
    let mut r = rng::seeded(23);
    for _ in 0..100 {
        let cm = rainpipe_core::eval::ConfusionMatrix {
            tp: r.gen_range(1..50),
            tn: r.gen_range(0..50),
            fp: r.gen_range(0..50),
            fn_: r.gen_range(0..50),
        };
        let m = binary_metrics(&cm).unwrap();
        let (lo, hi) = (m.precision.min(m.recall), m.precision.max(m.recall));
        let bound = 2.0 * lo / (1.0 + lo / hi);
        assert!(m.f1 <= bound + 1e-12);
        assert!(m.f1 >= lo - 1e-12 && m.f1 <= hi + 1e-12);
    }
}
