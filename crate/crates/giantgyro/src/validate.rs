//! Invariant battery behind the `validate` subcommand.

use std::f64::consts::PI;

use giantgyro_core::analysis::linspace;
use giantgyro_core::dynamics::{integrate, steady_state, DdeConfig, MemoryModel};
use giantgyro_core::linear_response::{
    nonreciprocal_strength, nonreciprocal_strength_from_transfer, response,
    transfer_elements_explicit,
};
use giantgyro_core::sensing::{report, snr_closed, ClosedCase, DriveConfig};
use giantgyro_core::topology::{coupling_matrix_bruteforce, coupling_matrix_closed, enumerate};
use giantgyro_core::{Error, Structure, SystemParams};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::config::RunConfig;
use crate::output::CsvSink;
use crate::CliError;

/// Individual checks selectable with `--check`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CheckName {
    All,
    ClosedForm,
    Passivity,
    Unitarity,
    ShotNoise,
    Sigma,
    Transfer,
    ClosedSnr,
    Dynamics,
}

impl CheckName {
    const BATTERY: [CheckName; 8] = [
        CheckName::ClosedForm,
        CheckName::Passivity,
        CheckName::Unitarity,
        CheckName::ShotNoise,
        CheckName::Sigma,
        CheckName::Transfer,
        CheckName::ClosedSnr,
        CheckName::Dynamics,
    ];

    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            CheckName::All => "all",
            CheckName::ClosedForm => "closed-form",
            CheckName::Passivity => "passivity",
            CheckName::Unitarity => "unitarity",
            CheckName::ShotNoise => "shot-noise",
            CheckName::Sigma => "sigma",
            CheckName::Transfer => "transfer",
            CheckName::ClosedSnr => "closed-snr",
            CheckName::Dynamics => "dynamics",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateOptions {
    pub check: CheckName,
    /// Frequency grid covers `[-span, span]` in units of `kappa_a`.
    pub omega_span: f64,
    pub omega_points: usize,
    /// Randomized parameter sets for the passivity and unitarity checks.
    pub samples: usize,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            check: CheckName::All,
            omega_span: 5.0,
            omega_points: 201,
            samples: 50,
        }
    }
}

/// One residual sample; `x` is a frequency, phase or sample index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub x: f64,
    pub residual: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Checked { samples: Vec<Sample>, note: String },
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub check: CheckName,
    pub outcome: Outcome,
}

impl CheckResult {
    #[must_use]
    pub fn passed(&self) -> bool {
        match &self.outcome {
            Outcome::Checked { samples, .. } => samples.iter().all(|s| s.residual <= s.bound),
            Outcome::Skipped(_) => true,
        }
    }

    /// Largest residual relative to its bound.
    #[must_use]
    pub fn worst(&self) -> Option<Sample> {
        match &self.outcome {
            Outcome::Checked { samples, .. } => samples
                .iter()
                .copied()
                .max_by(|a, b| (a.residual / a.bound).total_cmp(&(b.residual / b.bound))),
            Outcome::Skipped(_) => None,
        }
    }

    #[must_use]
    pub fn line(&self) -> String {
        let name = self.check.name();
        match &self.outcome {
            Outcome::Skipped(why) => format!("SKIP {name:<12} {why}"),
            Outcome::Checked { samples, note } => {
                let status = if self.passed() { "PASS" } else { "FAIL" };
                match self.worst() {
                    Some(w) => format!(
                        "{status} {name:<12} worst residual {:.3e} (bound {:.3e}) over {} samples; {note}",
                        w.residual,
                        w.bound,
                        samples.len()
                    ),
                    None => format!("{status} {name:<12} no samples; {note}"),
                }
            }
        }
    }
}

struct Battery<'a> {
    params: SystemParams,
    structure: Structure,
    drive: DriveConfig,
    config: &'a RunConfig,
    options: &'a ValidateOptions,
}

impl Battery<'_> {
    fn omegas(&self) -> Vec<f64> {
        let span = self.options.omega_span * self.params.kappa_a.abs();
        linspace(-span, span, self.options.omega_points)
    }

    fn run(&self, check: CheckName) -> Result<CheckResult, CliError> {
        let outcome = match check {
            CheckName::All => unreachable!("expanded by the caller"),
            CheckName::ClosedForm => self.closed_form(),
            CheckName::Passivity => self.passivity()?,
            CheckName::Unitarity => self.unitarity()?,
            CheckName::ShotNoise => self.shot_noise()?,
            CheckName::Sigma => self.sigma()?,
            CheckName::Transfer => self.transfer()?,
            CheckName::ClosedSnr => self.closed_snr()?,
            CheckName::Dynamics => self.dynamics()?,
        };
        Ok(CheckResult { check, outcome })
    }

    fn closed_form(&self) -> Outcome {
        let gamma = if self.params.gamma > 0.0 {
            self.params.gamma
        } else {
            1.0
        };
        let topologies = enumerate(8);
        let phases = linspace(0.0, 2.0 * PI, 64);
        let mut samples = Vec::new();
        for (k, t) in topologies.iter().enumerate() {
            let scale = f64::from(t.n() + t.m()).powi(2);
            let mut worst = 0.0f64;
            for &phi in &phases {
                let c = coupling_matrix_closed(t, phi, gamma);
                let b = coupling_matrix_bruteforce(t, phi, gamma);
                for r in 0..2 {
                    for s in 0..2 {
                        worst = worst.max((c[r][s] - b[r][s]).norm());
                    }
                }
            }
            samples.push(Sample {
                x: k as f64,
                residual: worst,
                bound: 1e-12 * gamma * scale,
            });
        }
        Outcome::Checked {
            samples,
            note: format!("{} topologies x 64 phases", topologies.len()),
        }
    }

    fn random_sets(&self) -> Vec<(SystemParams, Structure, f64)> {
        let mut rng = StdRng::seed_from_u64(self.config.seed);
        let mut pool: Vec<Structure> = enumerate(4).into_iter().map(Structure::from).collect();
        pool.push(Structure::DirectCoupling);
        (0..self.options.samples)
            .map(|_| {
                let structure = pool[rng.gen_range(0..pool.len())];
                let params = SystemParams {
                    kappa_a: rng.gen_range(0.5..20.0),
                    kappa_b: rng.gen_range(0.5..20.0),
                    gamma_x: rng.gen_range(0.1..5.0),
                    gamma_y: rng.gen_range(0.1..5.0),
                    omega_rot: rng.gen_range(0.0..2.0),
                    delta_a: rng.gen_range(-2.0..2.0),
                    delta_b: rng.gen_range(-2.0..2.0),
                    gamma: 0.0,
                    tau: rng.gen_range(0.001..0.1),
                    drive_phase_per_tau: rng.gen_range(0.0..2.0 * PI),
                }
                .with_cooperativity(rng.gen_range(0.0..1.0));
                (params, structure, rng.gen_range(-10.0..10.0))
            })
            .collect()
    }

    /// Applies `residual` on the configured frequency grid, then on the
    /// randomized sets (whose indices follow the grid as negative `x`).
    fn over_grid<F>(&self, residual: F, note: &str) -> Result<Outcome, CliError>
    where
        F: Fn(&SystemParams, &Structure, f64) -> Result<Option<(f64, f64)>, Error>,
    {
        let mut samples = Vec::new();
        for omega in self.omegas() {
            if let Some((r, bound)) = residual(&self.params, &self.structure, omega)? {
                samples.push(Sample {
                    x: omega,
                    residual: r,
                    bound,
                });
            }
        }
        let grid = samples.len();
        for (k, (p, s, omega)) in self.random_sets().iter().enumerate() {
            if let Some((r, bound)) = residual(p, s, *omega)? {
                samples.push(Sample {
                    x: -(k as f64) - 1.0,
                    residual: r,
                    bound,
                });
            }
        }
        Ok(Outcome::Checked {
            note: format!(
                "{note}; {grid} frequencies, {} random sets",
                samples.len() - grid
            ),
            samples,
        })
    }

    fn passivity(&self) -> Result<Outcome, CliError> {
        self.over_grid(
            |p, s, w| {
                let set = response(p, s, w)?;
                let norm = set.a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
                Ok(Some((set.passivity_residual, 1e-12 * norm.max(1.0))))
            },
            "|A + A^dag + B B^dag|",
        )
    }

    fn unitarity(&self) -> Result<Outcome, CliError> {
        self.over_grid(
            |p, s, w| Ok(Some((response(p, s, w)?.unitarity_residual, 1e-10))),
            "|G G^dag - I|",
        )
    }

    fn shot_noise(&self) -> Result<Outcome, CliError> {
        self.over_grid(
            |p, s, w| {
                let set = response(p, s, w)?;
                let worst = set
                    .g
                    .iter()
                    .map(|row| (row.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs())
                    .fold(0.0, f64::max);
                Ok(Some((worst, 1e-10)))
            },
            "port noise minus vacuum level",
        )
    }

    fn transfer(&self) -> Result<Outcome, CliError> {
        self.over_grid(
            |p, s, w| {
                let set = response(p, s, w)?;
                let explicit = transfer_elements_explicit(p, s, w)?;
                let mut worst = 0.0f64;
                let mut scale = 1.0f64;
                for (g, e) in set.g.iter().flatten().zip(explicit.iter().flatten()) {
                    worst = worst.max((g - e).norm());
                    scale = scale.max(g.norm());
                }
                Ok(Some((worst, 1e-10 * scale)))
            },
            "G versus explicit elements",
        )
    }

    fn sigma(&self) -> Result<Outcome, CliError> {
        let mut samples = Vec::new();
        for phi in linspace(0.0, 2.0 * PI, 257) {
            let p = SystemParams {
                drive_phase_per_tau: phi,
                ..self.params
            };
            let from_a = nonreciprocal_strength(&p, &self.structure, 0.0);
            let from_g = response(&p, &self.structure, 0.0)
                .and_then(|set| nonreciprocal_strength_from_transfer(&set));
            match (from_a, from_g) {
                (Ok(a), Ok(g)) => samples.push(Sample {
                    x: phi,
                    residual: (a - g).abs().max((a.abs() - 1.0).max(0.0)),
                    bound: 1e-10,
                }),
                (Err(Error::UndefinedSigma), Err(Error::UndefinedSigma)) => {}
                (Err(e), _) | (_, Err(e)) => return Err(e.into()),
            }
        }
        Ok(Outcome::Checked {
            samples,
            note: "coupling block versus transfer elements, 257 phases".into(),
        })
    }

    fn closed_snr(&self) -> Result<Outcome, CliError> {
        let Ok(case) = ClosedCase::for_structure(&self.structure) else {
            return Ok(Outcome::Skipped(format!(
                "no closed form for {}",
                self.structure
            )));
        };
        let mut samples = Vec::new();
        for phi in linspace(0.0, 2.0 * PI, 65) {
            let p = SystemParams {
                drive_phase_per_tau: phi,
                ..self.params
            };
            let closed = match snr_closed(&p, &self.drive, case, phi) {
                Ok(v) => v,
                Err(Error::UnsupportedClosedForm(why)) => return Ok(Outcome::Skipped(why)),
                Err(e) => return Err(e.into()),
            };
            let r = report(&p, &self.structure, &self.drive, 0.0)?;
            for (c, n) in closed.iter().zip([r.alpha.snr, r.beta.snr]) {
                samples.push(Sample {
                    x: phi,
                    residual: (c - n).abs(),
                    bound: 1e-9 * c.abs().max(1.0),
                });
            }
        }
        Ok(Outcome::Checked {
            samples,
            note: "closed SNR versus transfer-matrix SNR, 65 phases".into(),
        })
    }

    fn dynamics(&self) -> Result<Outcome, CliError> {
        if let Err(e) = self.params.validate() {
            return Ok(Outcome::Skipped(format!("not integrable: {e}")));
        }
        let rate = self
            .params
            .kappa_a
            .min(self.params.gamma_x)
            .min(self.params.gamma_y);
        let config = DdeConfig {
            steps_per_tau: 16,
            total_time: 60.0 / rate,
            record_every: u32::MAX,
            memory: MemoryModel::Delayed,
        };
        let traj = integrate(&self.params, &self.structure, &self.drive, &config)?;
        let ss = steady_state(&self.params, &self.structure, &self.drive)?;
        let Some((t, modes, outputs)) = traj.last() else {
            return Ok(Outcome::Skipped("empty trajectory".into()));
        };
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
        Ok(Outcome::Checked {
            samples: vec![Sample {
                x: t,
                residual: dev,
                bound: 1e-6 * scale.max(1e-300),
            }],
            note: format!("long-time trajectory versus steady state at t = {t}"),
        })
    }
}

/// Runs the selected checks; the caller decides the exit status.
pub fn run(config: &RunConfig, options: &ValidateOptions) -> Result<Vec<CheckResult>, CliError> {
    let params = config.params().map_err(CliError::Usage)?;
    let structure = config.structure().map_err(CliError::Usage)?;
    let drive = config.drive().map_err(CliError::Usage)?;
    if !(options.omega_span >= 0.0) || !options.omega_span.is_finite() || options.omega_points == 0
    {
        return Err(CliError::Usage(
            "invalid parameter `omega_span`: must be finite and non-negative with at least one point".into(),
        ));
    }
    let battery = Battery {
        params,
        structure,
        drive,
        config,
        options,
    };
    let checks: Vec<CheckName> = match options.check {
        CheckName::All => CheckName::BATTERY.to_vec(),
        one => vec![one],
    };
    checks.into_iter().map(|c| battery.run(c)).collect()
}

/// Writes every residual sample as `check,x,residual,bound`.
pub fn write_table(sink: &mut CsvSink, results: &[CheckResult]) -> std::io::Result<()> {
    for r in results {
        if let Outcome::Checked { samples, .. } = &r.outcome {
            for s in samples {
                sink.row([
                    r.check.name().to_string(),
                    crate::output::num(s.x),
                    crate::output::num(s.residual),
                    crate::output::num(s.bound),
                ])?;
            }
        }
    }
    Ok(())
}
