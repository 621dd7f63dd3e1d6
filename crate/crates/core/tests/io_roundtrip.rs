use imfogram_core::io::{read_imf_set_csv, read_signal_csv, write_imf_set_csv, write_signal_csv, write_tfr_csv, write_tfr_pgm};
use imfogram_core::signals::gen_chirp_pair;
use imfogram_core::{decompose, imfogram, AveragingWindows, FifConfig, Signal};

#[test]
fn imf_set_survives_a_csv_round_trip() {
    let s = gen_chirp_pair(500, 500.0).unwrap();
    let set = decompose(&s, &FifConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("imfs.csv");
    write_imf_set_csv(std::fs::File::create(&path).unwrap(), &set).unwrap();
    let back = read_imf_set_csv(&path).unwrap();
    assert_eq!(back.len(), set.len());
    for (a, b) in back.imfs().iter().zip(set.imfs()) {
        assert_eq!(a.samples(), b.samples());
    }
    assert_eq!(back.trend().samples(), set.trend().samples());
    assert!((back.trend().sample_rate() - 500.0).abs() < 1e-9);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# delta="));
    assert!(!text.contains('\r'));
}

#[test]
fn signal_csv_round_trip() {
    let s = Signal::with_start(vec![0.1, -1.0 / 3.0, 2.0e-300, 7.5], 3.0, 1.25).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    write_signal_csv(std::fs::File::create(&path).unwrap(), &s).unwrap();
    let back = read_signal_csv(&path, None).unwrap();
    assert_eq!(back.samples(), s.samples());
    assert!((back.sample_rate() - 3.0).abs() < 1e-9);
    assert!((back.t0() - 1.25).abs() < 1e-12);
}

#[test]
fn tfr_exports_are_reproducible() {
    let s = gen_chirp_pair(1000, 1000.0).unwrap();
    let render = || {
        let set = decompose(&s, &FifConfig::default()).unwrap();
        let m = imfogram(&set, &AveragingWindows::new(100, 50).unwrap(), 101).unwrap();
        let mut csv = Vec::new();
        let mut pgm = Vec::new();
        write_tfr_csv(&mut csv, &m).unwrap();
        write_tfr_pgm(&mut pgm, &m, 16).unwrap();
        (csv, pgm)
    };
    assert_eq!(render(), render());
}
