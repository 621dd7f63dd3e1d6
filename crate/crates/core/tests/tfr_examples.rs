mod common;

use std::f64::consts::PI;

use imfogram_core::signals::{gen_piecewise_multisine, Tone};
use imfogram_core::tfr::{
    instantaneous_amplitude, instantaneous_track, local_average, local_tracks, hadamard_square,
};
use imfogram_core::{imfogram, periodogram, spectrogram, AveragingWindows, ImfSet, Signal};
use proptest::prelude::*;

fn sine(f: f64, amp: f64, n: usize, rate: f64) -> Vec<f64> {
    (0..n).map(|j| amp * (2.0 * PI * f * j as f64 / rate).sin()).collect()
}

#[test]
fn pure_sine_amplitude_at_forty_samples_per_period() {
    let s = Signal::new(sine(25.0, 1.7, 2000, 1000.0), 1000.0).unwrap();
    let a = instantaneous_amplitude(&s);
    for v in &a {
        assert!((v - 1.7).abs() <= 0.01 * 1.7, "{v}");
    }
}

#[test]
fn growing_sine_envelope() {
    let n = 4000;
    let rate = 4000.0;
    let x: Vec<f64> = (0..n)
        .map(|j| {
            let t = j as f64 / rate;
            t * (2.0 * PI * 50.0 * t).sin()
        })
        .collect();
    let a = instantaneous_amplitude(&Signal::new(x, rate).unwrap());
    for j in 400..=3600 {
        let t = j as f64 / rate;
        assert!((a[j] - t).abs() <= 0.02 * t, "t={t}: {}", a[j]);
    }
}

#[test]
fn single_tone_imfogram_has_one_row() {
    let (n, rate) = (4096, 1024.0);
    let s = Signal::new(sine(64.0, 0.8, n, rate), rate).unwrap();
    let set = ImfSet::from_components(vec![s.clone()], s.same_grid(vec![0.0; n]).unwrap()).unwrap();
    let m = imfogram(&set, &AveragingWindows::non_overlapping(512).unwrap(), 513).unwrap();
    assert_eq!(m.cols(), 8);
    let busy: Vec<usize> = (0..m.rows()).filter(|&r| m.row(r).iter().any(|v| *v > 0.0)).collect();
    assert_eq!(busy, vec![64]);
    for v in m.row(64) {
        assert!((v - 0.8).abs() <= 0.02 * 0.8, "{v}");
    }
}

#[test]
fn two_tones_in_two_modes() {
    let (n, rate) = (4096, 2048.0);
    let a = Signal::new(sine(100.0, 1.0, n, rate), rate).unwrap();
    let b = Signal::new(sine(20.0, 0.4, n, rate), rate).unwrap();
    let set = ImfSet::from_components(vec![a.clone(), b], a.same_grid(vec![0.0; n]).unwrap()).unwrap();
    let m = imfogram(&set, &AveragingWindows::new(512, 256).unwrap(), 1025).unwrap();
    let busy: Vec<usize> = (0..m.rows()).filter(|&r| m.row(r).iter().any(|v| *v > 0.0)).collect();
    assert_eq!(busy, vec![20, 100]);
    assert!(m.row(100).iter().all(|v| (v - 1.0).abs() < 0.02));
    assert!(m.row(20).iter().all(|v| (v - 0.4).abs() < 0.02 * 0.4));
}

#[test]
fn silent_window_contributes_nothing() {
    let (n, rate) = (2048, 512.0);
    let mut x = sine(32.0, 1.0, n, rate);
    for v in &mut x[512..1024] {
        *v = 0.0;
    }
    let s = Signal::new(x, rate).unwrap();
    let set = ImfSet::from_components(vec![s.clone()], s.same_grid(vec![0.0; n]).unwrap()).unwrap();
    let m = imfogram(&set, &AveragingWindows::non_overlapping(512).unwrap(), 257).unwrap();
    assert!((0..m.rows()).all(|r| m.get(r, 1) == 0.0));
    assert!((0..m.rows()).map(|r| m.get(r, 0)).sum::<f64>() > 0.9);
}

#[test]
fn column_totals_account_for_local_amplitudes() {
    let (n, rate) = (3000, 1000.0);
    let a = Signal::new(sine(120.0, 1.0, n, rate), rate).unwrap();
    let b = Signal::new((0..n).map(|j| 0.3 * (2.0 * PI * 7.0 * j as f64 / rate).cos() * (1.0 + j as f64 / n as f64)).collect(), rate)
        .unwrap();
    let set = ImfSet::from_components(vec![a.clone(), b], a.same_grid(vec![0.0; n]).unwrap()).unwrap();
    let w = AveragingWindows::new(400, 250).unwrap();
    let m = imfogram(&set, &w, 301).unwrap();
    let tracks = local_tracks(&set, &w).unwrap();
    for c in 0..m.cols() {
        let col: f64 = (0..m.rows()).map(|r| m.get(r, c)).sum();
        let want: f64 = tracks.iter().map(|t| t.amplitude[c]).sum();
        assert!((col - want).abs() < 1e-12);
    }
    assert_eq!(m.cols(), w.ranges(n).len());
}

#[test]
fn spectrogram_matches_per_window_oracle() {
    let windows = vec![
        vec![Tone::new(1.0, 24.0, 0.3), Tone::new(0.5, 10.0, 1.0)],
        vec![Tone::new(0.7, 40.0, 0.0)],
        vec![Tone::new(0.2, 4.0, 2.0), Tone::new(0.9, 60.0, 0.5), Tone::new(0.4, 30.0, 1.5)],
    ];
    let (j, rate) = (128, 256.0);
    let s = gen_piecewise_multisine(&windows, j, rate).unwrap();
    for hop in [128usize, 32] {
        let m = spectrogram(&s, j, hop).unwrap();
        assert_eq!(m.rows(), j / 2 + 1);
        assert_eq!(m.cols(), (s.len() - j) / hop + 1);
        for c in 0..m.cols() {
            let seg = &s.samples()[c * hop..c * hop + j];
            let x = common::naive_dft(seg);
            for k in 0..m.rows() {
                let scale = if k == 0 || k == j / 2 { 1.0 } else { 2.0 };
                let want = scale * x[k].norm() / j as f64;
                assert!((m.get(k, c) - want).abs() <= 1e-10 * (1.0 + want));
            }
        }
    }
    // in-bin tone reads its amplitude
    let m = spectrogram(&s, j, j).unwrap();
    assert!((m.get(12, 0) - 1.0).abs() < 1e-10);
    assert!((m.get(30, 2) - 0.9).abs() < 1e-10);
}

#[test]
fn periodogram_is_the_full_window_spectrogram() {
    let s = Signal::new(sine(5.0, 2.0, 200, 100.0), 100.0).unwrap();
    let p = periodogram(&s).unwrap();
    assert_eq!(p, spectrogram(&s, 200, 200).unwrap());
    assert_eq!(p.cols(), 1);
    assert!((p.get(10, 0) - 2.0).abs() < 1e-12);
    let sq = hadamard_square(&p);
    assert_eq!(sq.freq_axis(), p.freq_axis());
    assert!((sq.get(10, 0) - 4.0).abs() < 1e-11);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn track_invariants(x in prop::collection::vec(-2.0..2.0f64, 16..300), rate in 1.0..1000.0f64) {
        let s = Signal::new(x.clone(), rate).unwrap();
        let t = instantaneous_track(&s);
        for j in 0..x.len() {
            prop_assert!(t.amplitude[j] >= x[j].abs() - 1e-12);
            prop_assert!(t.frequency[j] >= 0.0 && t.frequency[j].is_finite());
        }
        let neg = s.same_grid(x.iter().map(|v| -v).collect()).unwrap();
        let tn = instantaneous_track(&neg);
        prop_assert_eq!(&t.amplitude, &tn.amplitude);
        prop_assert_eq!(&t.frequency, &tn.frequency);
    }

    #[test]
    fn averaging_does_not_increase_norm(track in prop::collection::vec(0.0..5.0f64, 8..400), len in 1usize..64, hop_frac in 0.1..1.0f64) {
        let len = len.min(track.len());
        let hop = ((len as f64 * hop_frac).ceil() as usize).clamp(1, len);
        let w = AveragingWindows::new(len, len).unwrap();
        let la = local_average(&track, &w).unwrap();
        // block averaging, expanded back to samples, is a contraction
        let mut expanded = Vec::new();
        for ((_, l), v) in w.ranges(track.len()).iter().zip(&la) {
            expanded.extend(std::iter::repeat_n(*v, *l));
        }
        let n2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!(n2(&expanded) <= n2(&track) * (1.0 + 1e-12));
        let sliding = local_average(&track, &AveragingWindows::new(len, hop).unwrap()).unwrap();
        prop_assert!(sliding.iter().all(|v| *v >= 0.0 && *v <= 5.0));
    }
}
