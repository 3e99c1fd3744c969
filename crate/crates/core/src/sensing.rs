//! Signal, shot noise, SNR and rotation sensitivity at the two output ports.

use alloc::format;
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::error::{invalid, Error, Result};
use crate::linear_response::{response, ResponseSet, Structure, SystemParams};
use crate::topology::{Orientation, TopologyKind};
use crate::C64;

/// Coherent drive: `alpha_in = alpha`, `beta_in = alpha * ratio * e^{i theta}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveConfig {
    pub alpha: C64,
    pub ratio: f64,
    pub theta: f64,
}

impl Default for DriveConfig {
    fn default() -> Self {
        Self {
            alpha: C64::new(1.0, 0.0),
            ratio: 1.0,
            theta: 0.0,
        }
    }
}

impl DriveConfig {
    #[must_use]
    pub fn beta(&self) -> C64 {
        self.alpha * C64::from_polar(self.ratio, self.theta)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.norm() > 0.0) || !self.alpha.is_finite() {
            return Err(invalid("alpha", "must be finite and non-zero"));
        }
        if !(self.ratio >= 0.0) || !self.ratio.is_finite() {
            return Err(invalid("ratio", "must be finite and non-negative"));
        }
        if !self.theta.is_finite() {
            return Err(invalid("theta", "must be finite"));
        }
        Ok(())
    }

    fn is_balanced(&self) -> bool {
        self.ratio == 1.0 && self.theta == 0.0
    }
}

/// Figures of merit of one output port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortReport {
    /// Mean output field amplitude.
    pub mean: C64,
    /// `|mean|^2`.
    pub signal: f64,
    /// Symmetrised quadrature noise, `1/2 sum_j |G_j|^2`.
    pub noise: f64,
    /// `signal / (noise |alpha|^2)`.
    pub snr: f64,
    /// Smallest resolvable `Omega^2`; infinite when the port carries no
    /// information about the rotation.
    pub sensitivity: f64,
}

/// Sensing figures of merit at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingReport {
    pub structure: Structure,
    pub phase: f64,
    pub cooperativity: f64,
    pub omega: f64,
    pub alpha: PortReport,
    pub beta: PortReport,
}

fn output_means(set: &ResponseSet, drive: &DriveConfig) -> [C64; 2] {
    let beta = drive.beta();
    [
        set.g[0][0] * drive.alpha + set.g[0][1] * beta,
        set.g[1][0] * drive.alpha + set.g[1][1] * beta,
    ]
}

fn port_noise(set: &ResponseSet, port: usize) -> f64 {
    0.5 * set.g[port].iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Signal, noise, SNR and numeric sensitivity of both ports.
pub fn report(
    params: &SystemParams,
    structure: &Structure,
    drive: &DriveConfig,
    omega: f64,
) -> Result<SensingReport> {
    drive.validate()?;
    let set = response(params, structure, omega)?;
    let means = output_means(&set, drive);
    let sens = sensitivity_numeric(params, structure, drive, omega)?;
    let scale = drive.alpha.norm_sqr();
    let port = |k: usize| {
        let signal = means[k].norm_sqr();
        let noise = port_noise(&set, k);
        PortReport {
            mean: means[k],
            signal,
            noise,
            snr: signal / (noise * scale),
            sensitivity: sens[k],
        }
    };
    Ok(SensingReport {
        structure: *structure,
        phase: set.phase,
        cooperativity: params.cooperativity(),
        omega,
        alpha: port(0),
        beta: port(1),
    })
}

/// Derivatives below this many ulps of the sampled means per unit step
/// are indistinguishable from rounding and count as zero.
const FLAT_ULPS: f64 = 64.0;

/// `|N / d<out>/d(Omega^2)|` at `Omega^2 -> 0` for both ports.
///
/// The derivative is a central difference at `u0 = (1e-3 gamma_y)^2` with
/// half-width `u0 / 2`, improved by one Richardson step. A derivative at
/// rounding level yields an infinite sensitivity.
pub fn sensitivity_numeric(
    params: &SystemParams,
    structure: &Structure,
    drive: &DriveConfig,
    omega: f64,
) -> Result<[f64; 2]> {
    drive.validate()?;
    let scale = if params.gamma_y > 0.0 {
        params.gamma_y
    } else {
        params.kappa_b
    };
    let u0 = (1e-3 * scale).powi(2);
    let eval = |u: f64| -> Result<([C64; 2], ResponseSet)> {
        let mut p = *params;
        p.omega_rot = u.sqrt();
        let set = response(&p, structure, omega)?;
        Ok((output_means(&set, drive), set))
    };
    let (_, centre) = eval(u0)?;
    let h = 0.5 * u0;
    let (fp, _) = eval(u0 + h)?;
    let (fm, _) = eval(u0 - h)?;
    let (fp2, _) = eval(u0 + 0.5 * h)?;
    let (fm2, _) = eval(u0 - 0.5 * h)?;
    let mut out = [0.0; 2];
    for k in 0..2 {
        let d1 = (fp[k] - fm[k]) / (2.0 * h);
        let d2 = (fp2[k] - fm2[k]) / h;
        let deriv = (d2 * 4.0 - d1) / 3.0;
        let noise = port_noise(&centre, k);
        let magnitude = [fp[k], fm[k], fp2[k], fm2[k]]
            .iter()
            .fold(f64::MIN_POSITIVE, |acc, z| acc.max(z.norm()));
        out[k] = if deriv.norm() < FLAT_ULPS * f64::EPSILON * magnitude / h {
            f64::INFINITY
        } else {
            noise / deriv.norm()
        };
    }
    Ok(out)
}

/// Configurations with known closed-form SNR and sensitivity at resonance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedCase {
    /// Braided with two points per mode.
    StrictBraided(Orientation),
    /// Braided with two and three points.
    GeneralBraided(Orientation),
    /// Both modes at a single shared waveguide point.
    TraditionalCoincident,
    /// Direct exchange coupling without a waveguide.
    TraditionalDirect,
}

impl ClosedCase {
    pub fn for_structure(structure: &Structure) -> Result<Self> {
        let t = match structure {
            Structure::DirectCoupling => return Ok(Self::TraditionalDirect),
            Structure::Waveguide(t) => t,
        };
        match (t.kind(), t.orientation(), t.n(), t.m()) {
            (TopologyKind::Coincident, _, _, _) => Ok(Self::TraditionalCoincident),
            (TopologyKind::Braided, o, 2, 2) => Ok(Self::StrictBraided(o)),
            (TopologyKind::Braided, Orientation::I, 2, 3) => {
                Ok(Self::GeneralBraided(Orientation::I))
            }
            (TopologyKind::Braided, Orientation::II, 3, 2) => {
                Ok(Self::GeneralBraided(Orientation::II))
            }
            _ => Err(Error::UnsupportedClosedForm(format!("{t}"))),
        }
    }
}

/// Resonant coefficient set: numerator factors of both ports and the two
/// denominator factors multiplying `kappa / 2` and the `b_y` loss term.
struct Coefficients {
    f_alpha: C64,
    f_beta: C64,
    big_f1: C64,
    big_f2: C64,
}

fn coefficients(case: ClosedCase, co: f64, phi: f64) -> Coefficients {
    let c = co.sqrt();
    let e = |k: f64| C64::from_polar(1.0, k * phi);
    let one = C64::new(1.0, 0.0);
    let strict_small = one + (one - e(1.0) + e(2.0)) * c;
    let strict_large = one + (one - e(1.0) * 2.0 + e(2.0) - e(3.0)) * c;
    let strict_f1 = one + co + (one + e(2.0)) * (2.0 * c);
    let strict_f2 = one + (one + e(2.0)) * c;
    match case {
        ClosedCase::StrictBraided(o) => {
            let (f_alpha, f_beta) = match o {
                Orientation::I => (strict_small, strict_large),
                Orientation::II => (strict_large, strict_small),
            };
            Coefficients {
                f_alpha,
                f_beta,
                big_f1: strict_f1,
                big_f2: strict_f2,
            }
        }
        ClosedCase::GeneralBraided(o) => {
            let g_small = one + (e(2.0) + e(3.0) + 1.5) * c;
            let g_large = one + (one - e(1.0) * 2.0 - e(3.0) - e(4.0)) * c;
            let big_f1 = one
                + (e(1.0) + e(2.0) * 0.5 + e(3.0) + 1.5) * co
                + (e(1.0) + e(2.0) * 2.0 + e(3.0) + 2.5) * c;
            match o {
                Orientation::I => Coefficients {
                    f_alpha: g_small,
                    f_beta: g_large,
                    big_f1,
                    big_f2: strict_f2,
                },
                Orientation::II => Coefficients {
                    f_alpha: g_large,
                    f_beta: g_small,
                    big_f1,
                    big_f2: one + (e(1.0) + e(2.0) + e(3.0) + 1.5) * c,
                },
            }
        }
        ClosedCase::TraditionalCoincident => Coefficients {
            f_alpha: one,
            f_beta: one,
            big_f1: one + c,
            big_f2: one + 0.5 * c,
        },
        ClosedCase::TraditionalDirect => Coefficients {
            f_alpha: one + c,
            f_beta: one - c,
            big_f1: one + co,
            big_f2: one,
        },
    }
}

fn check_resonant(params: &SystemParams, drive: &DriveConfig) -> Result<f64> {
    params.check_finite()?;
    drive.validate()?;
    let kappa = params.kappa_a;
    if (params.kappa_b - kappa).abs() > 1e-12 * kappa {
        return Err(Error::UnsupportedClosedForm(
            "closed forms need kappa_a = kappa_b".into(),
        ));
    }
    if params.delta_a != 0.0 || params.delta_b != 0.0 {
        return Err(Error::UnsupportedClosedForm(
            "closed forms need zero detuning".into(),
        ));
    }
    if !drive.is_balanced() {
        return Err(Error::UnsupportedClosedForm(
            "closed forms need ratio = 1 and theta = 0".into(),
        ));
    }
    Ok(kappa)
}

/// Closed-form `(R_alpha, R_beta)` at `omega = 0` for neighbour phase `phi`.
pub fn snr_closed(
    params: &SystemParams,
    drive: &DriveConfig,
    case: ClosedCase,
    phi: f64,
) -> Result<[f64; 2]> {
    let kappa = check_resonant(params, drive)?;
    let loss = if params.gamma_y > 0.0 {
        0.5 * params.gamma_x + 2.0 * params.omega_rot.powi(2) / params.gamma_y
    } else if params.omega_rot == 0.0 {
        0.5 * params.gamma_x
    } else {
        return Err(Error::DegenerateElimination { omega: 0.0 });
    };
    let k = coefficients(case, params.cooperativity(), phi);
    let den = k.big_f1 * (0.5 * kappa) + k.big_f2 * loss;
    let one = C64::new(1.0, 0.0);
    let r_alpha = 2.0 * (one - (k.f_alpha * kappa + 2.0 * loss) / den).norm_sqr();
    let r_beta = 2.0 * (one - k.f_beta * kappa / den).norm_sqr();
    Ok([r_alpha, r_beta])
}

/// Closed-form weak-rotation sensitivities `(alpha, beta)` at `omega = 0`,
/// valid when `gamma_x << kappa`.
pub fn sensitivity_closed(
    params: &SystemParams,
    drive: &DriveConfig,
    case: ClosedCase,
    phi: f64,
) -> Result<[f64; 2]> {
    let kappa = check_resonant(params, drive)?;
    let co = params.cooperativity();
    let c = co.sqrt();
    let pre = params.gamma_y * kappa / (16.0 * drive.alpha.norm());
    let k = coefficients(case, co, phi);
    let f1sq = k.big_f1 * k.big_f1;
    let (alpha, beta) = match case {
        ClosedCase::TraditionalCoincident => {
            let s = (1.0 + c).powi(2);
            (2.0 * s / c, s / (1.0 + 0.5 * c))
        }
        ClosedCase::TraditionalDirect => {
            let s = (1.0 + co).powi(2);
            (s / (co - c).abs(), s / (1.0 - c).abs())
        }
        _ => (
            (f1sq / (k.big_f1 - k.big_f2 * k.f_alpha)).norm(),
            (f1sq / (k.f_beta * k.big_f2)).norm(),
        ),
    };
    Ok([pre * alpha, pre * beta])
}
