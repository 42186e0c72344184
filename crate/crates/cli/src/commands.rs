//! Subcommand implementations. Each returns data; `main` decides where it goes.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use choigram::charfunc::CharFunctionTable;
use choigram::dynamics::{
    backflow_intervals, coherence_factor, cp_divisibility_scan, dephasing_map, gamma, intermediate_map,
    integrate_master_equation, orthogonal_pair, ad_map, survival, trace_distance_trajectory, DivisibilityReport,
    DynamicsOptions, ModelKind, ScanOptions,
};
use choigram::{
    bochner_choi_check, choi_from_superop, gram_matrix, normalize_choi, pauli_basis, random_cp_channel, weyl_basis,
    Channel, ChannelFile, ComplexMatrix64, KrausChannel, Superoperator64, UnitaryBasis64,
};
use serde::Serialize;

use crate::config::{BasisName, Format, RunConfig};

/// Float with 17 significant digits, `.` decimal separator.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn csv_row(fields: &[String]) -> String {
    let mut line = fields.join(",");
    line.push('\n');
    line
}

/// Unitary basis on the doubled space of a channel on dimension `d`.
pub fn basis_for(name: BasisName, d: usize) -> Result<UnitaryBasis64> {
    let space = d * d;
    Ok(match name {
        BasisName::Pauli => {
            if !d.is_power_of_two() {
                bail!("pauli basis needs a power-of-two channel dimension, got {d}; use --basis weyl");
            }
            pauli_basis(space.trailing_zeros() as usize)?
        }
        BasisName::Weyl => weyl_basis(space)?,
    })
}

pub fn basis_label(name: BasisName) -> &'static str {
    match name {
        BasisName::Pauli => "pauli",
        BasisName::Weyl => "weyl",
    }
}

pub fn read_channel(path: &Path) -> Result<Channel<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading channel file {}", path.display()))?;
    let file: ChannelFile =
        serde_json::from_str(&text).with_context(|| format!("parsing channel file {}", path.display()))?;
    Ok(file.to_channel()?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub dim: usize,
    pub basis: String,
    pub tol: f64,
    pub choi_min: f64,
    pub gram_min: f64,
    pub cp_verdict: bool,
    pub choi_gram_agree: bool,
    /// `Tr J(Φ)`.
    pub trace_choi: f64,
    /// `Tr Ω_Φ = Tr J(Φ) / d`.
    pub trace_normalized_choi: f64,
    pub spectral_deviation: Option<f64>,
}

pub fn cmd_channel_check(input: &Path, basis: BasisName, tol: f64) -> Result<CheckReport> {
    let channel = read_channel(input)?;
    let phi = channel.superoperator();
    let b = basis_for(basis, phi.dim())?;
    let r = bochner_choi_check(&phi, &b, tol)?;
    Ok(CheckReport {
        dim: phi.dim(),
        basis: basis_label(basis).into(),
        tol,
        choi_min: r.choi_min,
        gram_min: r.gram_min,
        cp_verdict: r.gram_cp,
        choi_gram_agree: r.agree,
        trace_choi: r.trace_choi,
        trace_normalized_choi: r.trace_normalized_choi,
        spectral_deviation: r.spectral_deviation,
    })
}

pub fn write_check_report(report: &CheckReport, format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, report)?;
            writeln!(out)?;
        }
        Format::Csv => {
            out.write_all(b"dim,basis,tol,choi_min,gram_min,cp_verdict,choi_gram_agree,trace_choi,trace_normalized_choi,spectral_deviation\n")?;
            out.write_all(
                csv_row(&[
                    report.dim.to_string(),
                    report.basis.clone(),
                    fmt_float(report.tol),
                    fmt_float(report.choi_min),
                    fmt_float(report.gram_min),
                    report.cp_verdict.to_string(),
                    report.choi_gram_agree.to_string(),
                    fmt_float(report.trace_choi),
                    fmt_float(report.trace_normalized_choi),
                    report.spectral_deviation.map_or_else(String::new, fmt_float),
                ])
                .as_bytes(),
            )?;
        }
    }
    Ok(())
}

/// What the `r` column holds for each model.
pub fn ratio_definition(model: ModelKind) -> &'static str {
    match model {
        ModelKind::AmplitudeDamping => "eta(t)/eta(s)",
        ModelKind::PureDephasing => "q(t)/q(s)",
    }
}

pub fn cmd_scan(config: &RunConfig, threads: usize) -> Result<DivisibilityReport<f64>> {
    config.validate()?;
    let basis = basis_for(config.basis, 2)?;
    let opts = ScanOptions { tol: config.tol, threads, dynamics: DynamicsOptions::default() };
    Ok(cp_divisibility_scan(config.model, &config.profile()?, &config.grid()?, &basis, &opts)?)
}

pub fn write_scan_csv(report: &DivisibilityReport<f64>, out: &mut dyn Write) -> Result<()> {
    out.write_all(b"t,s,r,choi_min,gram_min,flag\n")?;
    for r in &report.records {
        out.write_all(
            csv_row(&[
                fmt_float(r.t),
                fmt_float(r.s),
                fmt_float(r.r),
                fmt_float(r.choi_min),
                fmt_float(r.gram_min),
                r.flag.name().into(),
            ])
            .as_bytes(),
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ScanRecordJson {
    t: f64,
    s: f64,
    r: Option<f64>,
    choi_min: Option<f64>,
    gram_min: Option<f64>,
    flag: &'static str,
}

#[derive(Serialize)]
struct ScanJson<'a> {
    model: &'a str,
    r_definition: &'a str,
    tol: f64,
    violating_pairs: usize,
    singular_pairs: usize,
    records: Vec<ScanRecordJson>,
}

pub fn write_scan_json(report: &DivisibilityReport<f64>, out: &mut dyn Write) -> Result<()> {
    let finite = |x: f64| x.is_finite().then_some(x);
    let doc = ScanJson {
        model: report.model.name(),
        r_definition: ratio_definition(report.model),
        tol: report.tol,
        violating_pairs: report.violating_pairs.len(),
        singular_pairs: report.singular_count(),
        records: report
            .records
            .iter()
            .map(|r| ScanRecordJson {
                t: r.t,
                s: r.s,
                r: finite(r.r),
                choi_min: finite(r.choi_min),
                gram_min: finite(r.gram_min),
                flag: r.flag.name(),
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)?;
    Ok(())
}

pub fn scan_summary(report: &DivisibilityReport<f64>) -> String {
    format!(
        "scan {}: {} pairs, {} violating, {} singular (r = {})",
        report.model.name(),
        report.records.len(),
        report.violating_pairs.len(),
        report.singular_count(),
        ratio_definition(report.model)
    )
}

/// Files written by [`cmd_figures`] and a one-line description of the run.
#[derive(Clone, Debug)]
pub struct FiguresSummary {
    pub files: Vec<PathBuf>,
    pub backflow_intervals: Vec<(f64, f64)>,
    pub backflow_measure: f64,
}

pub const RATIO_LAGS: [usize; 4] = [1, 2, 5, 10];

/// Writes the figure data series into `out_dir`:
///
/// * `gamma.csv`: `t,gamma`
/// * `ratio_slices.csv`: `lag,t,s,r_amplitude_damping,r_pure_dephasing` with `s = t - lag·Δt`
/// * `min_eigenvalues.csv`: `t,s,choi_min,gram_min` on the lag-1 slice for the configured model
/// * `trace_distance.csv`: `t,trace_distance,decay_factor` for the model's orthogonal pair
/// * `coherence.csv`: `t,gamma,coherence_factor`
/// * `trajectory.csv`: `t,rho00_re,rho00_im,rho01_re,rho01_im,rho10_re,rho10_im,rho11_re,rho11_im,trace_distance`
/// * `backflow.csv`: `start,end,gain`
pub fn cmd_figures(config: &RunConfig, out_dir: &Path) -> Result<FiguresSummary> {
    config.validate()?;
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let profile = config.profile()?;
    let grid = config.grid()?;
    let times = grid.times();
    let opts = DynamicsOptions::default();
    let basis = basis_for(config.basis, 2)?;
    let mut files = Vec::new();
    let mut emit = |name: &str, header: &str, rows: Vec<Vec<String>>| -> Result<()> {
        let path = out_dir.join(name);
        let mut text = String::from(header);
        text.push('\n');
        for row in rows {
            text.push_str(&csv_row(&row));
        }
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        files.push(path);
        Ok(())
    };

    let gammas = times.iter().map(|&t| gamma(t, &profile)).collect::<Result<Vec<_>, _>>()?;
    emit("gamma.csv", "t,gamma", times.iter().zip(&gammas).map(|(t, g)| vec![fmt_float(*t), fmt_float(*g)]).collect())?;

    let etas = times.iter().map(|&t| survival(t, &profile, opts.quad_tol)).collect::<Result<Vec<_>, _>>()?;
    let mut ratio_rows = Vec::new();
    for lag in RATIO_LAGS {
        for k in lag..times.len() {
            let r_ad = etas[k] / etas[k - lag];
            let r_dp = r_ad * r_ad;
            ratio_rows.push(vec![
                lag.to_string(),
                fmt_float(times[k]),
                fmt_float(times[k - lag]),
                fmt_float(r_ad),
                fmt_float(r_dp),
            ]);
        }
    }
    emit("ratio_slices.csv", "lag,t,s,r_amplitude_damping,r_pure_dephasing", ratio_rows)?;

    let mut eig_rows = Vec::new();
    for k in 1..times.len() {
        let (t, s) = (times[k], times[k - 1]);
        let row = match intermediate_map(t, s, config.model, &profile, &opts) {
            Ok(m) => {
                let j = choi_from_superop(&m.general);
                let gram = gram_matrix(&j, &basis)?;
                vec![fmt_float(t), fmt_float(s), fmt_float(j.min_eigenvalue()?), fmt_float(gram.min_eigenvalue())]
            }
            Err(choigram::Error::SingularMap { .. }) => {
                vec![fmt_float(t), fmt_float(s), fmt_float(f64::NAN), fmt_float(f64::NAN)]
            }
            Err(e) => return Err(e.into()),
        };
        eig_rows.push(row);
    }
    emit("min_eigenvalues.csv", "t,s,choi_min,gram_min", eig_rows)?;

    let (rho1, rho2) = orthogonal_pair::<f64>(config.model);
    let d = trace_distance_trajectory(config.model, &profile, &rho1, &rho2, &times, config.step)?;
    emit(
        "trace_distance.csv",
        "t,trace_distance,decay_factor",
        times
            .iter()
            .zip(&d)
            .zip(&etas)
            .map(|((t, dt), eta)| vec![fmt_float(*t), fmt_float(*dt), fmt_float(config.model.decay_factor(*eta))])
            .collect(),
    )?;

    let mut coherence_rows = Vec::new();
    for (t, g) in times.iter().zip(&gammas) {
        coherence_rows.push(vec![fmt_float(*t), fmt_float(*g), fmt_float(coherence_factor(*t, &profile, opts.quad_tol)?)]);
    }
    emit("coherence.csv", "t,gamma,coherence_factor", coherence_rows)?;

    let traj = integrate_master_equation(config.model, &profile, &rho1, &times, config.step)?;
    let traj_rows = traj
        .times
        .iter()
        .zip(&traj.states)
        .zip(&d)
        .map(|((t, rho), dt)| {
            let mut row = vec![fmt_float(*t)];
            for z in rho.entries() {
                row.push(fmt_float(z.re));
                row.push(fmt_float(z.im));
            }
            row.push(fmt_float(*dt));
            row
        })
        .collect();
    emit(
        "trajectory.csv",
        "t,rho00_re,rho00_im,rho01_re,rho01_im,rho10_re,rho10_im,rho11_re,rho11_im,trace_distance",
        traj_rows,
    )?;

    let backflow = backflow_intervals(&d, &times, 1e-9)?;
    emit(
        "backflow.csv",
        "start,end,gain",
        backflow.intervals.iter().map(|i| vec![fmt_float(i.start), fmt_float(i.end), fmt_float(i.gain)]).collect(),
    )?;

    Ok(FiguresSummary {
        files,
        backflow_intervals: backflow.intervals.iter().map(|i| (i.start, i.end)).collect(),
        backflow_measure: backflow.measure,
    })
}

#[derive(Serialize)]
pub struct CharFunctionExport {
    pub basis: String,
    pub order: Vec<usize>,
    pub labels: Vec<String>,
    /// `χ_Φ(U_μ)` as `[re, im]`.
    pub values: Vec<[f64; 2]>,
    pub gram: GramExport,
}

#[derive(Serialize)]
pub struct GramExport {
    pub basis: String,
    pub order: Vec<usize>,
    /// Row-major `G_μν` as `[re, im]` pairs.
    pub entries: Vec<Vec<[f64; 2]>>,
    pub gram_min: f64,
}

/// Characteristic-function table and Gram matrix of a channel file.
pub fn cmd_charfunc(input: &Path, basis: BasisName) -> Result<CharFunctionExport> {
    let phi = read_channel(input)?.superoperator();
    let b = basis_for(basis, phi.dim())?;
    let omega = normalize_choi(&choi_from_superop(&phi));
    let table = CharFunctionTable::new(&omega, &b)?;
    let gram = gram_matrix(&omega, &b)?;
    let order: Vec<usize> = (0..b.len()).collect();
    let g = gram.entries().matrix();
    Ok(CharFunctionExport {
        basis: basis_label(basis).into(),
        order: order.clone(),
        labels: b.labels().to_vec(),
        values: table.values.iter().map(|z| [z.re, z.im]).collect(),
        gram: GramExport {
            basis: basis_label(basis).into(),
            order,
            entries: (0..g.rows()).map(|i| (0..g.cols()).map(|j| [g[(i, j)].re, g[(i, j)].im]).collect()).collect(),
            gram_min: gram.min_eigenvalue(),
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ChannelKind {
    Identity,
    Transpose,
    Depolarizing,
    AmplitudeDamping,
    Dephasing,
    Random,
}

/// Builds one of the reference channels as a file document.
pub fn cmd_export_channel(kind: ChannelKind, dim: usize, param: f64, rank: usize, seed: u64) -> Result<ChannelFile> {
    if dim < 2 {
        bail!("channel dimension must be at least 2");
    }
    let qubit_only = |name: &str| -> Result<()> {
        if dim != 2 {
            bail!("{name} is a qubit channel; --dim must be 2");
        }
        Ok(())
    };
    Ok(match kind {
        ChannelKind::Identity => ChannelFile::from_kraus(&KrausChannel::new(vec![ComplexMatrix64::identity(dim)])?),
        ChannelKind::Transpose => ChannelFile::from_superop(&Superoperator64::transpose_map(dim)),
        ChannelKind::Depolarizing => ChannelFile::from_choi(&choi_from_superop(&Superoperator64::completely_depolarizing(dim))),
        ChannelKind::AmplitudeDamping => {
            qubit_only("amplitude damping")?;
            match ad_map(param)? {
                choigram::dynamics::DampingMap::Physical(k) => ChannelFile::from_kraus(&k),
                choigram::dynamics::DampingMap::NonPhysical(s) => ChannelFile::from_superop(&s),
            }
        }
        ChannelKind::Dephasing => {
            qubit_only("dephasing")?;
            ChannelFile::from_superop(&dephasing_map(param))
        }
        ChannelKind::Random => ChannelFile::from_kraus(&random_cp_channel::<f64>(dim, rank, seed)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_has_17_significant_digits() {
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_float(-2.0), "-2.0000000000000000e0");
        assert_eq!(fmt_float(f64::NAN), "NaN");
        let x = std::f64::consts::PI / 7.0;
        assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn pauli_requires_power_of_two() {
        assert!(basis_for(BasisName::Pauli, 3).is_err());
        assert_eq!(basis_for(BasisName::Weyl, 3).unwrap().len(), 81);
        assert_eq!(basis_for(BasisName::Pauli, 2).unwrap().space_dim(), 4);
    }

    #[test]
    fn two_point_scan_has_three_pairs() {
        let config = RunConfig { n_points: 2, ..RunConfig::default() };
        assert_eq!(cmd_scan(&config, 0).unwrap().records.len(), 3);
    }

    #[test]
    fn markovian_scan_has_no_violations() {
        let config = RunConfig { a: 0.0, n_points: 31, ..RunConfig::default() };
        let report = cmd_scan(&config, 0).unwrap();
        assert!(report.violating_pairs.is_empty());
        assert!(scan_summary(&report).contains("0 violating"));
    }
}
