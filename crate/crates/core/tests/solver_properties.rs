use ylab::data::{make_data, DataSpec, SineMode};
use ylab::field::{lp_norm, GridField};
use ylab::solver::{run, Interpolation, RunRecord, SolverConfig};

fn mixed_modes() -> DataSpec {
    DataSpec::custom(vec![
        SineMode { amplitude: 1.0, k1: 1, k2: 1 },
        SineMode { amplitude: 0.5, k1: 2, k2: 1 },
        SineMode { amplitude: -0.3, k1: 1, k2: 2 },
    ])
}

fn evolve(spec: &DataSpec, n: usize, dt: f64, t_end: f64) -> (GridField, RunRecord) {
    let w0 = make_data(spec, n).unwrap();
    let rec = run(&w0, &SolverConfig::new(n, dt, t_end)).unwrap();
    (w0, rec)
}

fn drift(w0: &GridField, w: &GridField, p: f64) -> f64 {
    let a = lp_norm(w0, p).unwrap();
    (lp_norm(w, p).unwrap() - a).abs() / a
}

#[test]
fn every_snapshot_keeps_odd_odd_symmetry() {
    let w0 = make_data(&DataSpec::theorem(0.25), 64).unwrap();
    let cfg = SolverConfig::new(64, 0.02, 0.2).with_snapshots(vec![0.0, 0.05, 0.1, 0.15, 0.2]);
    let rec = run(&w0, &cfg).unwrap();
    assert_eq!(rec.snapshots.len(), 5);
    for (_, w) in &rec.snapshots {
        assert!(w.odd_odd_defect() <= 1e-12);
    }
    // one row per step, with the snapshot times as extra breakpoints
    let ts: Vec<f64> = rec.diagnostics.iter().map(|d| d.t).collect();
    assert!(ts.windows(2).all(|w| w[1] > w[0]));
    for k in 0..=10 {
        assert!(ts.iter().any(|t| (t - 0.02 * k as f64).abs() < 1e-12));
    }
    assert_eq!(ts.len(), 13);
}

#[test]
fn lp_conservation_error_halves_with_resolution() {
    let spec = mixed_modes();
    let t_end = 0.5;
    let errs: Vec<[f64; 3]> = [32, 64, 128]
        .iter()
        .map(|&n| {
            // Courant number fixed across the ladder
            let (w0, rec) = evolve(&spec, n, 1.6 / n as f64, t_end);
            let w = &rec.final_snapshot().unwrap().1;
            [drift(&w0, w, 1.0), drift(&w0, w, 2.0), drift(&w0, w, 4.0)]
        })
        .collect();
    for k in 0..3 {
        for m in 0..2 {
            assert!(errs[m + 1][k] <= 0.5 * errs[m][k], "p index {k}: {errs:?}");
        }
    }
}

#[test]
fn energy_drift_is_small() {
    let (_, rec) = evolve(&DataSpec::theorem(0.25), 128, 0.02, 0.3);
    let e0 = rec.diagnostics[0].energy;
    for d in &rec.diagnostics {
        assert!((d.energy - e0).abs() <= 0.01 * e0);
    }
}

fn reverse(spec: &DataSpec, n: usize) -> (f64, f64, f64) {
    // omega(t) solves Euler iff -omega(T - t) does, so evolving -omega(T)
    // for T replays the flow backwards and ends at -omega(0)
    let mut cfg = SolverConfig::new(n, 1.6 / n as f64, 0.5);
    cfg.interpolation = Interpolation::Bicubic;
    let w0 = make_data(spec, n).unwrap();
    let w_t = run(&w0, &cfg).unwrap().final_snapshot().unwrap().1.clone();
    let flipped = w_t.map(w_t.kind(), |v| -v).unwrap();
    let back = run(&flipped, &cfg).unwrap();
    let w_back = back.final_snapshot().unwrap().1.map(w0.kind(), |v| -v).unwrap();
    let diff = GridField::new(
        n,
        w_back.values().iter().zip(w0.values()).map(|(a, b)| a - b).collect(),
        w0.kind(),
    )
    .unwrap();
    let field_err = lp_norm(&diff, 2.0).unwrap() / lp_norm(&w0, 2.0).unwrap();
    // the worse of the two legs
    let one_way = drift(&w0, &w_t, 2.0).max(drift(&w_t, &back.final_snapshot().unwrap().1, 2.0));
    (field_err, drift(&w0, &w_back, 2.0), one_way)
}

#[test]
fn reversing_the_flow_returns_the_data() {
    let spec = mixed_modes();
    let runs: Vec<_> = [64, 128].iter().map(|&n| reverse(&spec, n)).collect();
    for &(_, round_trip, one_way) in &runs {
        assert!(round_trip <= 2.0 * one_way, "{runs:?}");
    }
    // the field itself comes back, at better than second order
    assert!(runs[0].0 < 2e-4 && runs[1].0 <= 0.25 * runs[0].0, "{runs:?}");
}
