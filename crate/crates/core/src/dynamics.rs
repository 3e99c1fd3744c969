//! Time-domain integration of the delayed Langevin means.
//!
//! Every delay is an integer multiple of the neighbour delay `tau`, so a
//! fixed RK4 step `tau / K` lands each delayed argument exactly on a stored
//! stage of an earlier step. Keeping all four stage states in the history
//! makes the scheme classical RK4 applied to the method-of-steps system,
//! which is fourth order. History is zero before `t = 0`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::linear_response::{response, Structure, SystemParams};
use crate::matrix;
use crate::sensing::DriveConfig;
use crate::C64;

/// Treatment of the waveguide-mediated couplings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MemoryModel {
    /// Causal couplings with their true propagation delays.
    #[default]
    Delayed,
    /// Every pair coupled instantaneously in both directions with its
    /// carrier phase; coincident pairs keep weight one half. Only for
    /// comparison: it erases directional coupling.
    Markovian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdeConfig {
    /// Steps per neighbour delay.
    pub steps_per_tau: u32,
    pub total_time: f64,
    /// Store every `record_every`-th step.
    pub record_every: u32,
    pub memory: MemoryModel,
}

impl Default for DdeConfig {
    fn default() -> Self {
        Self {
            steps_per_tau: 32,
            total_time: 10.0,
            record_every: 1,
            memory: MemoryModel::Delayed,
        }
    }
}

/// Sampled means `(a, b_x, b_y)` and port outputs `(alpha_out, beta_out)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub modes: Vec<[C64; 3]>,
    pub outputs: Vec<[C64; 2]>,
}

impl Trajectory {
    #[must_use]
    pub fn len(&self) -> usize {
        self.times.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Last recorded sample.
    #[must_use]
    pub fn last(&self) -> Option<(f64, [C64; 3], [C64; 2])> {
        let i = self.times.len().checked_sub(1)?;
        Some((self.times[i], self.modes[i], self.outputs[i]))
    }
}

/// Long-time means for a constant drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub modes: [C64; 3],
    pub outputs: [C64; 2],
}

/// `x = A(0)^{-1} B(0) (alpha, beta, 0, 0, 0)` with `b_y` recovered from `b_x`.
pub fn steady_state(
    params: &SystemParams,
    structure: &Structure,
    drive: &DriveConfig,
) -> Result<SteadyState> {
    drive.validate()?;
    let set = response(params, structure, 0.0)?;
    let inv = matrix::inv2(&set.a).ok_or(Error::SingularResponse { omega: 0.0 })?;
    let u = [drive.alpha, drive.beta()];
    let bu = [set.b[0][0] * u[0], set.b[1][1] * u[1]];
    let a = inv[0][0] * bu[0] + inv[0][1] * bu[1];
    let bx = inv[1][0] * bu[0] + inv[1][1] * bu[1];
    let by = params.omega_rot * bx / (C64::i() * params.delta_b - 0.5 * params.gamma_y);
    Ok(SteadyState {
        modes: [a, bx, by],
        outputs: [
            u[0] + params.kappa_a.abs().sqrt() * a,
            u[1] + params.kappa_b.abs().sqrt() * bx,
        ],
    })
}

struct DelayedTerm {
    target: usize,
    source: usize,
    steps: usize,
    coeff: C64,
}

struct Model {
    local: [[C64; 3]; 3],
    delayed: Vec<DelayedTerm>,
    port: [f64; 2],
}

fn build_model(params: &SystemParams, structure: &Structure, config: &DdeConfig) -> Model {
    let i = C64::i();
    let z = C64::new(0.0, 0.0);
    let mut local = [[z; 3]; 3];
    local[0][0] = i * params.delta_a - 0.5 * params.kappa_a;
    local[1][1] = i * params.delta_b - 0.5 * (params.kappa_b + params.gamma_x);
    local[1][2] = C64::new(params.omega_rot, 0.0);
    local[2][1] = C64::new(-params.omega_rot, 0.0);
    local[2][2] = i * params.delta_b - 0.5 * params.gamma_y;

    let mut grouped: BTreeMap<(usize, usize, usize), C64> = BTreeMap::new();
    let k = config.steps_per_tau as usize;
    match structure {
        Structure::DirectCoupling => {
            local[0][1] += params.gamma;
            local[1][0] -= params.gamma;
        }
        Structure::Waveguide(t) => {
            let layout = t.layout();
            let sets = [&layout.a, &layout.b];
            let phi = params.drive_phase_per_tau;
            for (target, hs) in sets.iter().enumerate() {
                for (source, ss) in sets.iter().enumerate() {
                    for &h in hs.iter() {
                        for &s in ss.iter() {
                            let d = i64::from(h) - i64::from(s);
                            let phase = C64::from_polar(1.0, phi * d as f64);
                            match (d, config.memory) {
                                (0, _) => local[target][source] -= 0.5 * params.gamma,
                                (d, MemoryModel::Delayed) if d > 0 => {
                                    *grouped
                                        .entry((target, source, d as usize * k))
                                        .or_insert(z) -= phase * params.gamma;
                                }
                                (_, MemoryModel::Delayed) => {}
                                (d, MemoryModel::Markovian) => {
                                    local[target][source] -= C64::from_polar(
                                        params.gamma,
                                        phi * d.unsigned_abs() as f64,
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let delayed = grouped
        .into_iter()
        .map(|((target, source, steps), coeff)| DelayedTerm {
            target,
            source,
            steps,
            coeff,
        })
        .collect();
    Model {
        local,
        delayed,
        port: [params.kappa_a.abs().sqrt(), params.kappa_b.abs().sqrt()],
    }
}

/// Integrates with a constant drive switched on at `t = 0`.
pub fn integrate(
    params: &SystemParams,
    structure: &Structure,
    drive: &DriveConfig,
    config: &DdeConfig,
) -> Result<Trajectory> {
    drive.validate()?;
    let u = [drive.alpha, drive.beta()];
    integrate_with_input(params, structure, config, |_| u)
}

/// Integrates with an arbitrary port drive `input(t) = (alpha_in, beta_in)`
/// for `t >= 0`.
pub fn integrate_with_input<F>(
    params: &SystemParams,
    structure: &Structure,
    config: &DdeConfig,
    input: F,
) -> Result<Trajectory>
where
    F: Fn(f64) -> [C64; 2],
{
    params.check_finite()?;
    if !(params.tau > 0.0) {
        return Err(crate::error::invalid("tau", "must be positive"));
    }
    if config.steps_per_tau == 0 {
        return Err(Error::GridMisaligned(
            "steps_per_tau must be at least 1".into(),
        ));
    }
    if config.record_every == 0 {
        return Err(Error::GridMisaligned(
            "record_every must be at least 1".into(),
        ));
    }
    if !(config.total_time >= 0.0) || !config.total_time.is_finite() {
        return Err(Error::GridMisaligned(format!(
            "total_time must be finite and non-negative, got {}",
            config.total_time
        )));
    }
    let model = build_model(params, structure, config);
    let h = params.tau / f64::from(config.steps_per_tau);
    let steps = (config.total_time / h - 1e-9).ceil().max(0.0) as usize;
    let depth = model.delayed.iter().map(|d| d.steps).max().unwrap_or(0);
    let zero = C64::new(0.0, 0.0);
    // history[n % depth][stage] holds (a, b_x) of each stage of step n.
    let mut history = vec![[[zero; 2]; 4]; depth.max(1)];

    let deriv = |y: &[C64; 3], n: usize, stage: usize, t: f64, history: &[[[C64; 2]; 4]]| {
        let mut dy = [zero; 3];
        for (r, row) in model.local.iter().enumerate() {
            dy[r] = row[0] * y[0] + row[1] * y[1] + row[2] * y[2];
        }
        for term in &model.delayed {
            if n >= term.steps {
                let past = history[(n - term.steps) % depth][stage][term.source];
                dy[term.target] += term.coeff * past;
            }
        }
        let u = input(t);
        dy[0] -= model.port[0] * u[0];
        dy[1] -= model.port[1] * u[1];
        dy
    };
    let add =
        |y: &[C64; 3], k: &[C64; 3], s: f64| [y[0] + k[0] * s, y[1] + k[1] * s, y[2] + k[2] * s];

    let mut traj = Trajectory::default();
    let record = |traj: &mut Trajectory, t: f64, y: &[C64; 3]| {
        let u = input(t);
        traj.times.push(t);
        traj.modes.push(*y);
        traj.outputs
            .push([u[0] + model.port[0] * y[0], u[1] + model.port[1] * y[1]]);
    };
    let mut y = [zero; 3];
    record(&mut traj, 0.0, &y);
    for n in 0..steps {
        let t = n as f64 * h;
        let y1 = y;
        let k1 = deriv(&y1, n, 0, t, &history);
        let y2 = add(&y, &k1, 0.5 * h);
        let k2 = deriv(&y2, n, 1, t + 0.5 * h, &history);
        let y3 = add(&y, &k2, 0.5 * h);
        let k3 = deriv(&y3, n, 2, t + 0.5 * h, &history);
        let y4 = add(&y, &k3, h);
        let k4 = deriv(&y4, n, 3, t + h, &history);
        if depth > 0 {
            let slot = &mut history[n % depth];
            for (stage, ys) in [y1, y2, y3, y4].iter().enumerate() {
                slot[stage] = [ys[0], ys[1]];
            }
        }
        for r in 0..3 {
            y[r] += (k1[r] + (k2[r] + k3[r]) * 2.0 + k4[r]) * (h / 6.0);
        }
        if (n + 1) % config.record_every as usize == 0 || n + 1 == steps {
            record(&mut traj, (n + 1) as f64 * h, &y);
        }
    }
    Ok(traj)
}
