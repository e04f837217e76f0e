mod common;

use proptest::prelude::*;
use rand::Rng;
use sshad_core::data::{
    fit_normalizer, inject_bad_data, inject_bad_data_indexed, normalize_all, sample_labeled,
    stratified_split, Instance,
};

fn matrix(rows: usize, cols: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = common::rng(seed);
    (0..rows)
        .map(|_| (0..cols).map(|j| 10.0 * j as f64 + (j + 1) as f64 * common::gaussian(&mut r)).collect())
        .collect()
}

#[test]
fn normalizer_matches_two_pass_oracle() {
    let x = matrix(100, 4, 1);
    let stats = fit_normalizer(&x).unwrap();
    for j in 0..4 {
        let mean = x.iter().map(|r| r[j]).sum::<f64>() / 100.0;
        let var = x.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / 100.0;
        assert!((stats.mean[j] - mean).abs() < 1e-12);
        assert!((stats.stddev[j] - var.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn normalized_data_is_standardized() {
    let mut rows = matrix(300, 5, 2);
    rows.iter_mut().for_each(|r| r[3] = 7.0);
    let data: Vec<Instance> = rows.into_iter().map(|f| Instance::labeled(f, 1)).collect();
    let stats = fit_normalizer(&data).unwrap();
    let z = normalize_all(&data, &stats).unwrap();
    for j in 0..5 {
        let mean = z.iter().map(|r| r.features[j]).sum::<f64>() / 300.0;
        let sd = (z.iter().map(|r| (r.features[j] - mean).powi(2)).sum::<f64>() / 300.0).sqrt();
        if j == 3 {
            assert!(z.iter().all(|r| r.features[j] == 0.0));
        } else {
            assert!(mean.abs() < 1e-9 && (sd - 1.0).abs() < 1e-9);
        }
    }
    assert!(z.iter().all(|r| r.label == Some(1)));
}

#[test]
fn bad_data_fails_four_sigma_at_model_rate() {
    let n = 8;
    let clean: Vec<Instance> =
        matrix(5000, n, 3).into_iter().map(|f| Instance::labeled(f, 0)).collect();
    let stats = fit_normalizer(&clean).unwrap();
    let z = normalize_all(&clean, &stats).unwrap();
    let (dirty, idx) = inject_bad_data_indexed(&z, 0.1, 9).unwrap();
    assert_eq!(idx.len(), 500);
    let outside = |inst: &Instance| inst.features.iter().filter(|v| v.abs() > 4.0).count();
    let corrupted: usize = idx.iter().map(|&i| outside(&dirty[i])).sum();
    // P(|N(0, 3^2)| > 4) = erfc(4 / (3 sqrt 2))
    let p = libm::erfc(4.0 / (3.0 * std::f64::consts::SQRT_2));
    let cells = (idx.len() * n) as f64;
    let sd = (cells * p * (1.0 - p)).sqrt();
    assert!((corrupted as f64 - cells * p).abs() < 4.0 * sd, "{corrupted} vs {}", cells * p);
    let untouched: usize = (0..dirty.len()).filter(|i| idx.binary_search(i).is_err()).map(|i| outside(&dirty[i])).sum();
    assert!(untouched <= 5);
    for (i, (a, b)) in z.iter().zip(&dirty).enumerate() {
        assert_eq!(a.label, b.label);
        assert_eq!(idx.binary_search(&i).is_ok(), a != b);
    }
}

#[test]
fn bad_data_counts_and_noop() {
    let data: Vec<Instance> = matrix(1000, 3, 4).into_iter().map(Instance::unlabeled).collect();
    assert_eq!(inject_bad_data(&data, 0.0, 1).unwrap(), data);
    let (_, idx) = inject_bad_data_indexed(&data, 0.1, 1).unwrap();
    assert_eq!(idx.len(), 100);
    assert_eq!(inject_bad_data(&data, 0.1, 1).unwrap(), inject_bad_data(&data, 0.1, 1).unwrap());
    assert!(inject_bad_data(&data, 1.0, 1).is_err());
}

#[test]
fn stratified_split_keeps_class_shares() {
    let mut r = common::rng(5);
    let data: Vec<Instance> = (0..1000)
        .map(|i| Instance::labeled(vec![i as f64], if r.random::<f64>() < 0.2 { 1 } else { 0 }))
        .collect();
    let (labeled, unlabeled) = stratified_split(&data, 0.3, 7).unwrap();
    assert_eq!(labeled.len() + unlabeled.len(), 1000);
    assert!(unlabeled.iter().all(|u| u.label.is_none()));
    for c in 0..2 {
        let total = data.iter().filter(|d| d.label == Some(c)).count() as f64;
        let kept = labeled.iter().filter(|d| d.label == Some(c)).count() as f64;
        assert!((kept - 0.3 * total).abs() <= 0.5);
    }
    assert!(labeled.windows(2).all(|w| w[0].features[0] < w[1].features[0]));
}

proptest! {
    #[test]
    fn sampling_is_reproducible_and_sized(q in 1usize..300, ratio in 0.01..=1.0f64, seed in any::<u64>()) {
        let data: Vec<Instance> = (0..q).map(|i| Instance::labeled(vec![i as f64], i % 2)).collect();
        let want = (ratio * q as f64).floor() as usize;
        match sample_labeled(&data, ratio, seed) {
            Ok(s) => {
                prop_assert_eq!(s.len(), want);
                prop_assert_eq!(&s, &sample_labeled(&data, ratio, seed).unwrap());
                let mut ids: Vec<usize> = s.iter().map(|i| i.features[0] as usize).collect();
                ids.sort_unstable();
                ids.dedup();
                prop_assert_eq!(ids.len(), want);
            }
            Err(_) => prop_assert_eq!(want, 0),
        }
    }

    #[test]
    fn full_ratio_is_a_permutation(q in 1usize..200, seed in any::<u64>()) {
        let data: Vec<Instance> = (0..q).map(|i| Instance::labeled(vec![i as f64], 0)).collect();
        let mut s: Vec<usize> = sample_labeled(&data, 1.0, seed).unwrap().iter().map(|i| i.features[0] as usize).collect();
        s.sort_unstable();
        prop_assert_eq!(s, (0..q).collect::<Vec<_>>());
    }

    #[test]
    fn normalization_round_trips(rows in prop::collection::vec(prop::collection::vec(-1e6..1e6f64, 3), 2..40)) {
        let stats = fit_normalizer(&rows).unwrap();
        for r in &rows {
            let back = stats.invert(&stats.apply(r).unwrap()).unwrap();
            for (j, (a, b)) in r.iter().zip(&back).enumerate() {
                if stats.stddev[j] > 0.0 {
                    prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
                }
            }
        }
    }
}
