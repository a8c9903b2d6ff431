//! Single-point evaluation, parameter grids and CSV output.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{column_label, to_display, Axis, ConfigFile, Mode, ParamSet};
use crate::dynamics::{build_diffusion, build_drift, is_stable, solve_lyapunov};
use crate::error::{Error, Result};
use crate::gaussian::{EntanglementReport, Measures};
use crate::model::{derive_effective, ghz, mhz, BareConfig, EffectiveConfig, Validate};
use crate::steady_state::{branch_scan, default_branch, MeanFieldState, DEFAULT_SEEDS};

/// Bumped whenever the CSV columns change.
pub const CSV_SCHEMA_VERSION: u32 = 1;

/// Columns after the axis columns, in order.
pub const MEASURE_COLUMNS: &[&str] = &[
    "stable", "E_ab", "E_bc", "E_ac", "E_a_bc", "E_b_ac", "E_c_ab", "R_a_bc", "R_b_ac", "R_c_ab",
    "R_min", "N_a", "N_b", "N_c", "nu_min", "margin_MHz", "nb2", "nc2", "mf_residual", "error",
];

#[derive(Clone, Debug, PartialEq)]
pub struct PointOptions {
    pub mode: Mode,
    /// Global seed for the multistart in microscopic mode.
    pub seed: u64,
    /// Index into the branch list instead of the default branch.
    pub branch: Option<usize>,
    pub n_seeds: usize,
}

impl Default for PointOptions {
    fn default() -> Self {
        PointOptions {
            mode: Mode::Effective,
            seed: 0,
            branch: None,
            n_seeds: DEFAULT_SEEDS,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointOutcome {
    pub report: EntanglementReport,
    /// Mean-field state in microscopic mode.
    pub mean_field: Option<MeanFieldState>,
    pub effective: EffectiveConfig,
}

fn config_error(e: Error) -> Error {
    match e {
        Error::InvalidArgument(m) => Error::Config(m),
        e => e,
    }
}

/// Effective coefficients of a parameter set in effective mode, validated.
pub fn effective_config(params: &ParamSet) -> Result<EffectiveConfig> {
    let eff = params.effective()?;
    eff.check().map_err(config_error)?;
    Ok(eff)
}

pub fn bare_config(params: &ParamSet) -> Result<BareConfig> {
    let bare = params.bare()?;
    bare.check().map_err(config_error)?;
    Ok(bare)
}

/// Drift, stability, Lyapunov and measures for fixed coefficients.
pub fn evaluate_effective(eff: &EffectiveConfig) -> Result<EntanglementReport> {
    let a = build_drift(eff);
    let stability = is_stable(&a)?;
    if !stability.stable {
        return Ok(EntanglementReport {
            stable: false,
            margin: stability.margin,
            measures: None,
        });
    }
    let v = solve_lyapunov(&a, &build_diffusion(eff))?;
    Ok(EntanglementReport {
        stable: true,
        margin: stability.margin,
        measures: Some(Measures::from_covariance(&v)?),
    })
}

/// Per-point generator: the global seed selects the key, the flat grid
/// index the stream, so results do not depend on evaluation order.
pub fn point_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn run_point_indexed(params: &ParamSet, opts: &PointOptions, index: u64) -> Result<PointOutcome> {
    match opts.mode {
        Mode::Effective => {
            let eff = effective_config(params)?;
            Ok(PointOutcome {
                report: evaluate_effective(&eff)?,
                mean_field: None,
                effective: eff,
            })
        }
        Mode::Microscopic => {
            let bare = bare_config(params)?;
            let mut rng = point_rng(opts.seed, index);
            let state = match opts.branch {
                None => default_branch(&bare, opts.n_seeds, &mut rng)?,
                Some(k) => {
                    let all = branch_scan(&bare, opts.n_seeds, &mut rng)?;
                    let n = all.len();
                    all.into_iter().nth(k).ok_or_else(|| {
                        Error::InvalidArgument(format!("branch {k} requested but only {n} found"))
                    })?
                }
            };
            let eff = derive_effective(&bare, state.nb2(), state.nc2())?;
            Ok(PointOutcome {
                report: evaluate_effective(&eff)?,
                mean_field: Some(state),
                effective: eff,
            })
        }
    }
}

/// Full pipeline at one parameter point. Unstable points are reported with
/// `stable = false` and no measures.
pub fn run_point(params: &ParamSet, opts: &PointOptions) -> Result<EntanglementReport> {
    run_point_indexed(params, opts, 0).map(|o| o.report)
}

/// One or two axes over a baseline parameter set.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub base: ParamSet,
    pub axes: Vec<Axis>,
    pub mode: Mode,
}

impl SweepGrid {
    pub fn new(base: ParamSet, axes: Vec<Axis>, mode: Mode) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::Config(format!("a sweep needs 1 or 2 axes, got {}", axes.len())));
        }
        let mut seen = Vec::new();
        for s in axes.iter().flat_map(|a| &a.symbols) {
            if seen.contains(s) {
                return Err(Error::Config(format!("{s} appears on more than one axis")));
            }
            seen.push(*s);
        }
        Ok(SweepGrid { base, axes, mode })
    }

    pub fn from_config(cfg: ConfigFile, mode: Mode) -> Result<Self> {
        Self::new(cfg.params, cfg.axes, mode)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.axes[0].points, self.axes.get(1).map_or(1, |a| a.points))
    }

    pub fn len(&self) -> usize {
        let (n, m) = self.shape();
        n * m
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn index(&self, flat: usize) -> (usize, usize) {
        let m = self.shape().1;
        (flat / m, flat % m)
    }

    pub fn axis_values(&self, (i, j): (usize, usize)) -> Vec<(&'static str, f64)> {
        let mut v = self.axes[0].values(i);
        if let Some(a) = self.axes.get(1) {
            v.extend(a.values(j));
        }
        v
    }

    pub fn params_at(&self, index: (usize, usize)) -> ParamSet {
        let mut p = self.base.clone();
        for (s, x) in self.axis_values(index) {
            p.set(s, x).expect("axis symbols are known");
        }
        p
    }

    pub fn axis_columns(&self) -> Vec<String> {
        self.axes
            .iter()
            .flat_map(|a| a.symbols.iter().map(|s| column_label(s)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub index: (usize, usize),
    /// Internal units.
    pub axis_values: Vec<(&'static str, f64)>,
    pub report: Option<EntanglementReport>,
    pub mean_field: Option<MeanFieldState>,
    pub error: Option<String>,
}

impl SweepRecord {
    pub fn value(&self, symbol: &str) -> Option<f64> {
        self.axis_values.iter().find(|(s, _)| *s == symbol).map(|(_, v)| *v)
    }

    pub fn measures(&self) -> Option<&Measures> {
        self.report.as_ref().and_then(|r| r.measures.as_ref())
    }

    pub fn stable(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.stable)
    }
}

/// Evaluates every grid point on `jobs` worker threads. Records come back
/// in grid order (first axis outermost); point failures are recorded, not
/// propagated.
pub fn run_sweep(grid: &SweepGrid, jobs: usize, seed: u64) -> Result<Vec<SweepRecord>> {
    if jobs == 0 {
        return Err(Error::InvalidArgument("jobs must be at least 1".into()));
    }
    let opts = PointOptions {
        mode: grid.mode,
        seed,
        ..PointOptions::default()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let records = pool.install(|| {
        (0..grid.len())
            .into_par_iter()
            .map(|flat| {
                let index = grid.index(flat);
                let params = grid.params_at(index);
                let (report, mean_field, error) =
                    match run_point_indexed(&params, &opts, flat as u64) {
                        Ok(o) => (Some(o.report), o.mean_field, None),
                        Err(e) => {
                            let e = Error::AtPoint {
                                index,
                                source: Box::new(e),
                            };
                            (None, None, Some(e.to_string()))
                        }
                    };
                SweepRecord {
                    index,
                    axis_values: grid.axis_values(index),
                    report,
                    mean_field,
                    error,
                }
            })
            .collect()
    });
    Ok(records)
}

fn num(x: f64) -> String {
    format!("{x}")
}

/// Writes records as CSV: axis columns in display units, then
/// [`MEASURE_COLUMNS`]. Unstable or failed points leave measures empty.
pub fn write_csv<W: Write>(grid: &SweepGrid, records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = grid.axis_columns();
    header.extend(MEASURE_COLUMNS.iter().map(|s| s.to_string()));
    w.write_record(&header)?;
    for r in records {
        let mut row: Vec<String> = r.axis_values.iter().map(|(s, v)| num(to_display(s, *v))).collect();
        let mut cells = vec![String::new(); MEASURE_COLUMNS.len()];
        if let Some(rep) = &r.report {
            cells[0] = rep.stable.to_string();
            cells[15] = num(crate::model::to_mhz(rep.margin));
            if let Some(m) = &rep.measures {
                let vals = [
                    m.e_ab, m.e_bc, m.e_ac, m.e_a_bc, m.e_b_ac, m.e_c_ab, m.contangle.a_bc,
                    m.contangle.b_ac, m.contangle.c_ab, m.contangle.min, m.n_a, m.n_b, m.n_c,
                    m.nu_min,
                ];
                for (k, v) in vals.iter().enumerate() {
                    cells[1 + k] = num(*v);
                }
            }
        }
        if let Some(mf) = &r.mean_field {
            cells[16] = num(mf.nb2());
            cells[17] = num(mf.nc2());
            cells[18] = num(mf.residual_norm);
        }
        if let Some(e) = &r.error {
            cells[19] = e.clone();
        }
        row.extend(cells);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub const PRESETS: &[&str] = &["fig2", "fig3", "fig4"];

fn lab_frequencies(p: ParamSet) -> ParamSet {
    p.with("omega_a", ghz(10.07))
        .with("omega_b", ghz(9.86))
        .with("omega_c", ghz(9.7845))
        .with("omega_d", ghz(9.97))
}

/// Baseline shared by the Kerr scan and the temperature scan.
pub fn max_kerr_params() -> ParamSet {
    lab_frequencies(ParamSet::new())
        .with("Delta_a", mhz(100.0))
        .with("Delta_b_tilde", mhz(-70.0))
        .with("Delta_c_tilde", mhz(-100.0))
        .with("K_b_tilde", mhz(15.0))
        .with("K_c_tilde", mhz(24.0))
        .with("G_tilde", mhz(19.4))
        .with("g_ab", mhz(30.0))
        .with("gamma_a", mhz(18.6))
        .with("gamma_b", mhz(6.7))
        .with("gamma_c", mhz(6.7))
        .with("T_e", 0.0)
}

/// Built-in grids.
///
/// * `fig2`: `Δ̃_b ∈ [−200, 0]` × `Δ_a ∈ [−200, 200]` MHz, 101 × 101, no self-Kerr.
/// * `fig3`: self-Kerr `(K̃_b, K̃_c)` from (0, 0) to (15, 24) MHz in 3 steps × `Δ_a` scan.
/// * `fig4`: `T_e ∈ [0, 0.3]` K in 61 steps at `Δ_a = 100` MHz and maximal self-Kerr.
pub fn preset(name: &str) -> Result<SweepGrid> {
    match name {
        "fig2" => {
            let base = lab_frequencies(ParamSet::new())
                .with("Delta_c_tilde", mhz(-100.0))
                .with("K_b_tilde", 0.0)
                .with("K_c_tilde", 0.0)
                .with("G_tilde", mhz(19.4))
                .with("g_ab", mhz(35.0))
                .with("gamma_a", mhz(5.5))
                .with("gamma_b", mhz(12.0))
                .with("gamma_c", mhz(12.0))
                .with("T_e", 0.0);
            SweepGrid::new(
                base,
                vec![
                    Axis::new("Delta_b_tilde", mhz(-200.0), 0.0, 101)?,
                    Axis::new("Delta_a", mhz(-200.0), mhz(200.0), 101)?,
                ],
                Mode::Effective,
            )
        }
        "fig3" => SweepGrid::new(
            max_kerr_params(),
            vec![
                Axis::linked(
                    &["K_b_tilde", "K_c_tilde"],
                    &[0.0, 0.0],
                    &[mhz(15.0), mhz(24.0)],
                    3,
                )?,
                Axis::new("Delta_a", mhz(-200.0), mhz(200.0), 101)?,
            ],
            Mode::Effective,
        ),
        "fig4" => SweepGrid::new(
            max_kerr_params(),
            vec![Axis::new("T_e", 0.0, 0.3, 61)?],
            Mode::Effective,
        ),
        _ => Err(Error::InvalidArgument(format!(
            "unknown preset '{name}' (expected one of {})",
            PRESETS.join(", ")
        ))),
    }
}
