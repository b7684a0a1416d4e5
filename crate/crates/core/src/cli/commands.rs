//! Experiment recipes. Each command writes CSV files with a header row and
//! numbers in `{:.16e}` format, so identical inputs give identical bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{ProbeSpec, ShearConfig, TheoremConfig, ToyConfig};
use crate::data::{make_data, DataSpec};
use crate::diagnostics::{
    critical_index_ladder, fit_theorem_c0, key_integral, key_residual, level_set_gap,
    regularity_monitor, CriticalIndex, CurveSource, RegularityIndexCurve, ResolutionPolicy,
    INDEX_SCHEME,
};
use crate::error::{Error, Result};
use crate::exact::{
    gamma_curve, gamma_exponent, model_q, shear_w1p_study, toy_advected_sin2theta, toy_trajectory,
    ShearProfiles,
};
use crate::field::{
    biot_savart, gradient_magnitude, read_ylf, w1p_norm, FieldKind, GradientLadder, GridField,
    SobolevEstimate,
};
use crate::solver::{log_lipschitz_constant, run, RunRecord, SolverConfig};

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Trajectories, cusp curves, the model index and samples of the
/// transported `sin(2 theta)`.
pub fn cmd_toy(cfg: &ToyConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let mut traj = Vec::new();
    for (id, x0) in cfg.x0_list.iter().enumerate() {
        for &t in &cfg.t_list {
            let x = toy_trajectory(*x0, t)?;
            traj.push(vec![id.to_string(), num(t), num(x[0]), num(x[1])]);
        }
    }
    let index: Vec<Vec<String>> = cfg
        .t_list
        .iter()
        .map(|&t| vec![num(t), num(gamma_exponent(t)), num(model_q(t))])
        .collect();
    let m = cfg.samples.max(1);
    let mut curves = Vec::new();
    let mut field = Vec::new();
    for &t in &cfg.t_list {
        for k in 1..=m {
            let g = gamma_curve(t, k as f64 / (m + 1) as f64);
            curves.push(vec![num(t), num(g[0]), num(g[1])]);
        }
        for i in 0..m {
            for j in 0..m {
                let x = [(i as f64 + 0.5) / m as f64, (j as f64 + 0.5) / m as f64];
                let f = toy_advected_sin2theta(t, x)?;
                field.push(vec![num(t), num(x[0]), num(x[1]), num(f)]);
            }
        }
    }
    let files = [
        ("toy_trajectories.csv", vec!["id", "t", "x1", "x2"], traj),
        ("toy_index.csv", vec!["t", "gamma", "q"], index),
        ("toy_gamma_curves.csv", vec!["t", "x1", "x2"], curves),
        ("toy_field.csv", vec!["t", "x1", "x2", "f"], field),
    ];
    let mut paths = Vec::new();
    for (name, header, rows) in files {
        let p = out.join(name);
        write_csv(&p, &header, &rows)?;
        paths.push(p);
    }
    Ok(paths)
}

/// `W^{1,exponent}` classification of each shear case.
pub fn cmd_shear(cfg: &ShearConfig, out: &Path) -> Result<Vec<SobolevEstimate>> {
    let mut study = Vec::new();
    let mut norms = Vec::new();
    let mut estimates = Vec::new();
    for c in &cfg.cases {
        let profiles = ShearProfiles::singular(c.p, c.eps)?;
        let est = shear_w1p_study(&profiles, c.t, c.exponent, &cfg.resolutions)?;
        let key = [num(c.p), num(c.eps), num(c.t), num(c.exponent)];
        for (n, v) in est.resolutions.iter().zip(&est.norms) {
            let mut row = key.to_vec();
            row.extend([n.to_string(), num(*v)]);
            norms.push(row);
        }
        let mut row = key.to_vec();
        row.extend([num(est.slope), est.verdict.as_str().to_string()]);
        study.push(row);
        estimates.push(est);
    }
    write_csv(
        &out.join("shear_study.csv"),
        &["p", "eps", "t", "exponent", "slope", "verdict"],
        &study,
    )?;
    write_csv(
        &out.join("shear_norms.csv"),
        &["p", "eps", "t", "exponent", "n", "norm"],
        &norms,
    )?;
    Ok(estimates)
}

/// Evolves the configured data and stores the run directory at `out`.
pub fn cmd_euler_run(data: &DataSpec, solver: &SolverConfig, out: &Path) -> Result<RunRecord> {
    let omega = make_data(data, solver.n)?;
    for w in omega.warnings() {
        eprintln!("warning: {w}");
    }
    let record = run(&omega, solver)?;
    record.save(out)?;
    Ok(record)
}

fn probe_name(p: &ProbeSpec) -> &'static str {
    match p {
        ProbeSpec::KeyIntegral { .. } => "key_integral",
        ProbeSpec::KeyResidual { .. } => "key_residual",
        ProbeSpec::LevelGap { .. } => "level_gap",
        ProbeSpec::Sobolev { .. } => "sobolev",
        ProbeSpec::LogLipschitz { .. } => "log_lipschitz",
    }
}

fn probe_header(name: &str) -> &'static [&'static str] {
    match name {
        "key_integral" => &["file", "x1", "x2", "value", "empty_domain"],
        "key_residual" => &["file", "x1", "x2", "integral", "b1", "b2", "bound_ratio_1", "bound_ratio_2"],
        "level_gap" => &["file", "r", "theta_star", "theta_star_hi", "gap", "omitted"],
        "sobolev" => &["file", "n", "p", "w1p"],
        _ => &["file", "n", "num_pairs", "c_hat"],
    }
}

fn as_vorticity(f: &GridField) -> Result<GridField> {
    f.clone().with_kind(FieldKind::Vorticity)
}

/// Runs every probe on every snapshot; one CSV per probe kind.
pub fn cmd_diagnose(snapshots: &[PathBuf], probes: &[ProbeSpec], seed: u64, out: &Path) -> Result<Vec<PathBuf>> {
    if probes.is_empty() {
        return Ok(Vec::new());
    }
    let mut rows: BTreeMap<&'static str, Vec<Vec<String>>> = BTreeMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for path in snapshots {
        let field = read_ylf(path, FieldKind::Scalar)?;
        let file = path.display().to_string();
        for probe in probes {
            let sink = rows.entry(probe_name(probe)).or_default();
            match probe {
                ProbeSpec::KeyIntegral { points, random } => {
                    let mut pts = points.clone();
                    for _ in 0..*random {
                        pts.push([rng.gen_range(1e-3..=0.5), rng.gen_range(1e-3..=0.5)]);
                    }
                    for x in pts {
                        let k = key_integral(&field, x)?;
                        sink.push(vec![
                            file.clone(),
                            num(x[0]),
                            num(x[1]),
                            num(k.value),
                            k.empty_domain.to_string(),
                        ]);
                    }
                }
                ProbeSpec::KeyResidual { points } => {
                    let w = as_vorticity(&field)?;
                    let u = biot_savart(&w)?;
                    for &x in points {
                        let r = key_residual(&w, &u, x)?;
                        sink.push(vec![
                            file.clone(),
                            num(x[0]),
                            num(x[1]),
                            num(r.integral),
                            num(r.b1),
                            num(r.b2),
                            num(r.bound_ratio_1),
                            num(r.bound_ratio_2),
                        ]);
                    }
                }
                ProbeSpec::LevelGap { radii, level, tol } => {
                    let prof = level_set_gap(&field, radii, *level, *tol)?;
                    for ((r, lo), (hi, g)) in prof
                        .radii
                        .iter()
                        .zip(&prof.theta_star)
                        .zip(prof.theta_star_hi.iter().zip(prof.gaps()))
                    {
                        sink.push(vec![file.clone(), num(*r), num(*lo), num(*hi), num(g), "false".into()]);
                    }
                    for r in &prof.omitted {
                        sink.push(vec![file.clone(), num(*r), String::new(), String::new(), String::new(), "true".into()]);
                    }
                }
                ProbeSpec::Sobolev { exponents } => {
                    for &p in exponents {
                        let v = w1p_norm(&field, p, INDEX_SCHEME)?;
                        sink.push(vec![file.clone(), field.n().to_string(), num(p), num(v)]);
                    }
                }
                ProbeSpec::LogLipschitz { num_pairs } => {
                    let w = as_vorticity(&field)?;
                    let u = biot_savart(&w)?;
                    let c = log_lipschitz_constant(&u, w.max_abs(), *num_pairs, seed)?;
                    sink.push(vec![file.clone(), field.n().to_string(), num_pairs.to_string(), num(c)]);
                }
            }
        }
    }
    let mut paths = Vec::new();
    for (name, table) in rows {
        let p = out.join(format!("{name}.csv"));
        write_csv(&p, probe_header(name), &table)?;
        paths.push(p);
    }
    Ok(paths)
}

#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub p0: f64,
    pub measured: RegularityIndexCurve,
    pub indices: Vec<CriticalIndex>,
    /// Largest sampled log-Lipschitz ratio over the finest run's snapshots.
    pub c_hat: f64,
    pub omega_sup: f64,
    /// Least-squares constant of the theorem curve, when measurable.
    pub c0: Option<f64>,
    pub theorem_curve: Option<RegularityIndexCurve>,
    pub yudovich_curve: RegularityIndexCurve,
    /// Exponent used for the Riccati reference curve.
    pub yudovich_p: f64,
    /// Run at the finest resolution.
    pub record: RunRecord,
}

/// Margin below `p0` of the exponent used for the Riccati reference.
pub const YUDOVICH_MARGIN: f64 = 0.01;

/// Theorem data evolved at every resolution, with the measured critical
/// index at each snapshot and both reference curves.
pub fn cmd_theorem(cfg: &TheoremConfig, seed: u64, out: &Path) -> Result<TheoremReport> {
    let spec = DataSpec::theorem(cfg.beta);
    spec.validate()?;
    let p0 = crate::data::classify_p0(&spec)?;
    let n_fine = *cfg
        .n_list
        .iter()
        .max()
        .ok_or_else(|| Error::Config("empty resolution list".into()))?;
    let times = cfg.times();
    let solver = SolverConfig::new(n_fine, cfg.dt, cfg.t_end).with_snapshots(times.clone());
    let record = run(&make_data(&spec, n_fine)?, &solver)?;
    let mut resolutions = cfg.n_list.clone();
    resolutions.sort_unstable();

    let (measured, indices) = if record.snapshots.len() >= 2 {
        let policy = ResolutionPolicy {
            resolutions: resolutions.clone(),
            data: spec.clone(),
        };
        regularity_monitor(&record, &cfg.p_grid, &policy)?
    } else {
        let mags = resolutions
            .iter()
            .map(|&n| gradient_magnitude(&make_data(&spec, n)?, INDEX_SCHEME))
            .collect::<Result<Vec<_>>>()?;
        let ci = critical_index_ladder(&GradientLadder::new(mags)?, &cfg.p_grid)?;
        let curve = RegularityIndexCurve {
            times: vec![0.0],
            q_values: vec![ci.p_hat],
            q_lo: vec![ci.lo],
            q_hi: vec![ci.hi],
            source: CurveSource::Measured,
        };
        (curve, vec![ci])
    };

    let omega_sup = record.snapshots[0].1.max_abs();
    let mut c_hat = 0.0f64;
    for (_, w) in &record.snapshots {
        let u = biot_savart(w)?;
        c_hat = c_hat.max(log_lipschitz_constant(&u, w.max_abs(), cfg.num_pairs, seed)?);
    }
    let c0 = fit_theorem_c0(p0, &measured.times, &measured.q_values).filter(|c| *c > 0.0);
    let theorem_curve = match c0 {
        Some(c) => Some(RegularityIndexCurve::theorem(p0, c, &measured.times)?),
        None => None,
    };
    let yudovich_p = p0 - YUDOVICH_MARGIN;
    let yudovich_curve = RegularityIndexCurve::yudovich(yudovich_p, c_hat * omega_sup, &measured.times)?;

    let mut rows = Vec::new();
    for curve in std::iter::once(&measured)
        .chain(theorem_curve.as_ref())
        .chain(std::iter::once(&yudovich_curve))
    {
        for k in 0..curve.times.len() {
            rows.push(vec![
                num(curve.times[k]),
                num(curve.q_values[k]),
                num(curve.q_lo[k]),
                num(curve.q_hi[k]),
                curve.source.as_str().to_string(),
            ]);
        }
    }
    write_csv(&out.join("theorem.csv"), &["t", "q", "q_lo", "q_hi", "source"], &rows)?;
    let index_rows: Vec<Vec<String>> = measured
        .times
        .iter()
        .zip(&indices)
        .map(|(t, c)| {
            vec![
                num(*t),
                num(c.p_hat),
                num(c.lo),
                num(c.hi),
                num(c.spread_lo),
                num(c.spread_hi),
                c.monotone.to_string(),
            ]
        })
        .collect();
    write_csv(
        &out.join("theorem_indices.csv"),
        &["t", "p_hat", "lo", "hi", "spread_lo", "spread_hi", "monotone"],
        &index_rows,
    )?;
    write_csv(
        &out.join("theorem_fit.csv"),
        &["beta", "p0", "c_hat", "omega_sup", "c0", "yudovich_p"],
        &[vec![
            num(cfg.beta),
            num(p0),
            num(c_hat),
            num(omega_sup),
            c0.map(num).unwrap_or_default(),
            num(yudovich_p),
        ]],
    )?;
    Ok(TheoremReport {
        p0,
        measured,
        indices,
        c_hat,
        omega_sup,
        c0,
        theorem_curve,
        yudovich_curve,
        yudovich_p,
        record,
    })
}
