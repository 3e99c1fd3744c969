//! Subcommand implementations.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use giantgyro_core::analysis::{
    comparison_cooperativities, figure_data, linspace, reciprocal_points, FigureData, FigureId,
    ReciprocalPoints, RootMethod,
};
use giantgyro_core::dynamics::{integrate, steady_state};
use giantgyro_core::linear_response::nonreciprocal_strength;
use giantgyro_core::sensing::{
    report, sensitivity_closed, sensitivity_numeric, snr_closed, ClosedCase,
};
use giantgyro_core::{Error, Structure, SystemParams, Topology};

use crate::config::RunConfig;
use crate::output::{num, CsvSink};
use crate::CliError;

/// Resolved configuration plus the output destination.
pub struct Context {
    pub config: RunConfig,
    pub out: Option<PathBuf>,
}

impl Context {
    fn sink(&self, header: &[&str]) -> Result<CsvSink, CliError> {
        Ok(CsvSink::create(
            self.out.as_deref(),
            &self.config.snapshot(),
            header,
        )?)
    }

    fn phases(&self) -> Result<Vec<f64>, CliError> {
        match self.config.sweep.phi_steps {
            0 => Err(CliError::Usage(
                "invalid parameter `phi_steps`: must be at least 1".into(),
            )),
            n => Ok(linspace(0.0, 2.0 * PI, n)),
        }
    }

    fn setup(&self) -> Result<(SystemParams, Structure), CliError> {
        let params = self.config.valid_params().map_err(CliError::Usage)?;
        let structure = self.config.structure().map_err(CliError::Usage)?;
        Ok((params, structure))
    }
}

fn waveguide(structure: &Structure, command: &str) -> Result<Topology, CliError> {
    structure.topology().copied().ok_or_else(|| {
        CliError::Usage(format!(
            "{command} needs a waveguide topology, not `{structure}`"
        ))
    })
}

fn with_phase(params: &SystemParams, phi: f64) -> SystemParams {
    SystemParams {
        drive_phase_per_tau: phi,
        ..*params
    }
}

/// `sigma(phi)` over the phase grid.
pub fn sigma(ctx: &Context) -> Result<(), CliError> {
    let (params, structure) = ctx.setup()?;
    let omega = ctx.config.sweep.omega;
    let mut sink = ctx.sink(&["phi", "phi_over_pi", "sigma"])?;
    for phi in ctx.phases()? {
        let s = match nonreciprocal_strength(&with_phase(&params, phi), &structure, omega) {
            Ok(s) => s,
            Err(Error::UndefinedSigma) => f64::NAN,
            Err(e) => return Err(e.into()),
        };
        sink.numbers(&[phi, phi / PI, s])?;
    }
    Ok(sink.finish()?)
}

fn closed_case(params: &SystemParams, ctx: &Context, structure: &Structure) -> Option<ClosedCase> {
    let case = ClosedCase::for_structure(structure).ok()?;
    let drive = ctx.config.drive().ok()?;
    snr_closed(params, &drive, case, params.drive_phase_per_tau).ok()?;
    Some(case)
}

/// Flat sensing reports over the phase grid, or figure panels with `--figure`.
pub fn snr(ctx: &Context, figure: Option<FigureId>) -> Result<(), CliError> {
    if let Some(id) = figure {
        return write_figures(ctx, &[id]);
    }
    let (params, structure) = ctx.setup()?;
    let drive = ctx.config.drive().map_err(CliError::Usage)?;
    let omega = ctx.config.sweep.omega;
    let case = if omega == 0.0 {
        closed_case(&params, ctx, &structure)
    } else {
        None
    };
    let mut header = vec![
        "topology",
        "phi",
        "co",
        "omega",
        "n_in",
        "alpha_mean_re",
        "alpha_mean_im",
        "alpha_signal",
        "alpha_noise",
        "alpha_snr",
        "alpha_sensitivity",
        "beta_mean_re",
        "beta_mean_im",
        "beta_signal",
        "beta_noise",
        "beta_snr",
        "beta_sensitivity",
    ];
    if case.is_some() {
        header.extend(["alpha_snr_closed", "beta_snr_closed"]);
    }
    let mut sink = ctx.sink(&header)?;
    let n_in = drive.alpha.norm_sqr() + drive.beta().norm_sqr();
    for phi in ctx.phases()? {
        let p = with_phase(&params, phi);
        let r = report(&p, &structure, &drive, omega)?;
        let mut row = vec![structure.to_string()];
        row.extend([r.phase, r.cooperativity, r.omega, n_in].map(num));
        for port in [r.alpha, r.beta] {
            row.extend(
                [
                    port.mean.re,
                    port.mean.im,
                    port.signal,
                    port.noise,
                    port.snr,
                    port.sensitivity,
                ]
                .map(num),
            );
        }
        if let Some(case) = case {
            row.extend(snr_closed(&p, &drive, case, phi)?.map(num));
        }
        sink.row(row)?;
    }
    Ok(sink.finish()?)
}

/// Weak-rotation sensitivities over the phase grid.
pub fn sensitivity(ctx: &Context, numeric: bool, closed: bool) -> Result<(), CliError> {
    let (params, structure) = ctx.setup()?;
    let drive = ctx.config.drive().map_err(CliError::Usage)?;
    let numeric = numeric || !closed;
    let case = if closed {
        let case = ClosedCase::for_structure(&structure)?;
        if ctx.config.sweep.omega != 0.0 {
            return Err(CliError::Usage(
                "closed sensitivities are only defined at omega = 0".into(),
            ));
        }
        Some(case)
    } else {
        None
    };
    let mut header = vec!["phi", "phi_over_pi"];
    if numeric {
        header.extend(["alpha_numeric", "beta_numeric"]);
    }
    if closed {
        header.extend(["alpha_closed", "beta_closed"]);
    }
    if numeric && closed {
        header.extend(["alpha_rel_err", "beta_rel_err"]);
    }
    let mut sink = ctx.sink(&header)?;
    for phi in ctx.phases()? {
        let p = with_phase(&params, phi);
        let mut row = vec![phi, phi / PI];
        let n = if numeric {
            let v = sensitivity_numeric(&p, &structure, &drive, ctx.config.sweep.omega)?;
            row.extend(v);
            Some(v)
        } else {
            None
        };
        let c = match case {
            Some(case) => {
                let v = sensitivity_closed(&p, &drive, case, phi)?;
                row.extend(v);
                Some(v)
            }
            None => None,
        };
        if let (Some(n), Some(c)) = (n, c) {
            row.extend([0, 1].map(|k| relative_error(n[k], c[k])));
        }
        sink.numbers(&row)?;
    }
    Ok(sink.finish()?)
}

fn relative_error(value: f64, reference: f64) -> f64 {
    if value == reference {
        0.0
    } else {
        ((value - reference) / reference).abs()
    }
}

/// Reference structure of a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Baseline {
    /// Both modes at one shared waveguide point.
    TraditionalI,
    /// Direct exchange coupling.
    TraditionalIi,
}

impl Baseline {
    fn structure(self) -> Structure {
        match self {
            Baseline::TraditionalI => Topology::coincident().into(),
            Baseline::TraditionalIi => Structure::DirectCoupling,
        }
    }
}

/// Sensitivity ratios of the configured structure to a baseline over the
/// comparison cooperativity grid at the configured phase.
pub fn compare(ctx: &Context, baseline: Baseline, numeric: bool) -> Result<(), CliError> {
    let (params, structure) = ctx.setup()?;
    let drive = ctx.config.drive().map_err(CliError::Usage)?;
    let reference = baseline.structure();
    let phi = params.drive_phase_per_tau;
    let sens = |p: &SystemParams, s: &Structure| -> Result<[f64; 2], CliError> {
        if numeric {
            Ok(sensitivity_numeric(p, s, &drive, 0.0)?)
        } else {
            Ok(sensitivity_closed(
                p,
                &drive,
                ClosedCase::for_structure(s)?,
                phi,
            )?)
        }
    };
    let mut sink = ctx.sink(&[
        "co",
        "alpha_sensitivity",
        "beta_sensitivity",
        "alpha_baseline",
        "beta_baseline",
        "alpha_ratio",
        "beta_ratio",
    ])?;
    let mut summary = None;
    for co in comparison_cooperativities() {
        let p = params.with_cooperativity(co);
        let s = sens(&p, &structure)?;
        let b = sens(&p, &reference)?;
        let ratio = [s[0] / b[0], s[1] / b[1]];
        if (co - 0.1).abs() < 1e-12 {
            summary = Some(ratio);
        }
        sink.numbers(&[co, s[0], s[1], b[0], b[1], ratio[0], ratio[1]])?;
    }
    sink.finish()?;
    if let Some([a, b]) = summary {
        eprintln!("{structure} vs {reference} at co=0.1: alpha ratio {a:.5}, beta ratio {b:.5}");
    }
    Ok(())
}

/// Delay-differential trajectory under the configured constant drive.
pub fn dynamics(ctx: &Context) -> Result<(), CliError> {
    let (params, structure) = ctx.setup()?;
    let drive = ctx.config.drive().map_err(CliError::Usage)?;
    let dde = ctx.config.dde(&params).map_err(CliError::Usage)?;
    let traj = integrate(&params, &structure, &drive, &dde)?;
    let mut sink = ctx.sink(&[
        "t",
        "a_re",
        "a_im",
        "bx_re",
        "bx_im",
        "by_re",
        "by_im",
        "alpha_out_re",
        "alpha_out_im",
        "beta_out_re",
        "beta_out_im",
    ])?;
    for ((t, m), o) in traj.times.iter().zip(&traj.modes).zip(&traj.outputs) {
        sink.numbers(&[
            *t, m[0].re, m[0].im, m[1].re, m[1].im, m[2].re, m[2].im, o[0].re, o[0].im, o[1].re,
            o[1].im,
        ])?;
    }
    sink.finish()?;
    if let Some((t, modes, outputs)) = traj.last() {
        let ss = steady_state(&params, &structure, &drive)?;
        let scale = ss
            .modes
            .iter()
            .chain(&ss.outputs)
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let dev = modes
            .iter()
            .zip(&ss.modes)
            .chain(outputs.iter().zip(&ss.outputs))
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        eprintln!(
            "steady state at t={t}: max deviation {dev:.3e} (relative {:.3e})",
            dev / scale.max(f64::MIN_POSITIVE)
        );
    }
    Ok(())
}

/// Which reciprocal-point methods to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodChoice {
    Closed,
    Numeric,
    Both,
}

/// Phases in `(0, 2 pi)` where the configured topology is reciprocal.
pub fn reciprocal(ctx: &Context, choice: MethodChoice) -> Result<(), CliError> {
    let structure = ctx.config.structure().map_err(CliError::Usage)?;
    let topology = waveguide(&structure, "reciprocal-points")?;
    let methods: &[(RootMethod, &str)] = match choice {
        MethodChoice::Closed => &[(RootMethod::Closed, "closed")],
        MethodChoice::Numeric => &[(RootMethod::Numeric, "numeric")],
        MethodChoice::Both => &[
            (RootMethod::Closed, "closed"),
            (RootMethod::Numeric, "numeric"),
        ],
    };
    let mut sink = ctx.sink(&["method", "kind", "phi", "phi_over_pi"])?;
    for &(method, name) in methods {
        match reciprocal_points(&topology, method) {
            ReciprocalPoints::Everywhere => sink.row([name, "everywhere", "", ""])?,
            ReciprocalPoints::Nowhere => sink.row([name, "nowhere", "", ""])?,
            ReciprocalPoints::Isolated(roots) => {
                for r in roots {
                    sink.row([
                        name.to_string(),
                        "isolated".to_string(),
                        num(r),
                        num(r / PI),
                    ])?;
                }
            }
        }
    }
    Ok(sink.finish()?)
}

fn panel_file(dir: &Path, fig: &FigureData, label: &str) -> PathBuf {
    let clean: String = label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect();
    dir.join(format!("{}_{clean}.csv", fig.id.name()))
}

/// Writes each panel of each figure to `<out>/<figure>_<panel>.csv`.
pub fn write_figures(ctx: &Context, ids: &[FigureId]) -> Result<(), CliError> {
    let dir = ctx.out.clone().unwrap_or_else(|| PathBuf::from("figures"));
    std::fs::create_dir_all(&dir)?;
    for &id in ids {
        let fig = figure_data(id)?;
        for panel in &fig.panels {
            let path = panel_file(&dir, &fig, &panel.label);
            let comment = format!(
                "{} {}: {}\nkappa=10 gamma_x=1 gamma_y=1 omega_rot=0.5 tau=0.01 unless the panel label overrides",
                fig.id.name(),
                panel.label,
                fig.title
            );
            let mut sink = CsvSink::create(Some(&path), &comment, &panel.columns)?;
            for row in &panel.rows {
                sink.numbers(row)?;
            }
            sink.finish()?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}
