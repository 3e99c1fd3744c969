//! Frequency-domain linear response of the two-mode sensor.
//!
//! With the `y` mode eliminated, the Fourier-space Langevin equations read
//! `-i w x = A x - B u` for `x = (a, b_x)` and inputs
//! `u = (alpha_in, beta_in, c_in, f_x, f_y)`. Outputs follow as `G u` with
//! `G = [I | 0] + diag(sqrt(kappa_a), sqrt(kappa_b)) A^{-1} B`.

use core::fmt;
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::error::{invalid, Error, Result};
use crate::matrix::{self, Mat2, Mat2x5};
use crate::topology::{self, coupling_matrix_bruteforce, coupling_matrix_closed, Topology};
use crate::C64;

/// Physical rates and couplings, all in the same frequency unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// External decay of mode `a` into its own port.
    pub kappa_a: f64,
    /// External decay of mode `b_x` into its own port.
    pub kappa_b: f64,
    /// Intrinsic loss of `b_x`.
    pub gamma_x: f64,
    /// Intrinsic loss of `b_y`.
    pub gamma_y: f64,
    /// Rotation-induced coupling between `b_x` and `b_y`.
    pub omega_rot: f64,
    /// Detuning of `a`.
    pub delta_a: f64,
    /// Common detuning of `b_x` and `b_y`.
    pub delta_b: f64,
    /// Decay rate into the waveguide at each coupling point.
    pub gamma: f64,
    /// Travel time between neighbouring coupling points.
    pub tau: f64,
    /// Phase accumulated between neighbouring points at `w = 0`.
    pub drive_phase_per_tau: f64,
}

impl SystemParams {
    /// Reference operating point: `kappa = 10 gamma_x`, `gamma_y = gamma_x`,
    /// `Omega = gamma_x / 2`, with the waveguide rate set by cooperativity `co`.
    #[must_use]
    pub fn reference(co: f64) -> Self {
        let kappa = 10.0;
        Self {
            kappa_a: kappa,
            kappa_b: kappa,
            gamma_x: 1.0,
            gamma_y: 1.0,
            omega_rot: 0.5,
            delta_a: 0.0,
            delta_b: 0.0,
            gamma: 0.5 * kappa * co.sqrt(),
            tau: 0.01,
            drive_phase_per_tau: core::f64::consts::PI,
        }
    }

    /// Sets the waveguide rate so that `4 gamma^2 / (kappa_a kappa_b) = co`.
    #[must_use]
    pub fn with_cooperativity(mut self, co: f64) -> Self {
        self.gamma = 0.5 * (self.kappa_a * self.kappa_b).sqrt() * co.sqrt();
        self
    }

    /// `4 gamma^2 / (kappa_a kappa_b)`.
    #[must_use]
    pub fn cooperativity(&self) -> f64 {
        4.0 * self.gamma * self.gamma / (self.kappa_a * self.kappa_b)
    }

    /// Phase between neighbouring points at angular frequency `omega`.
    #[must_use]
    pub fn phase_at(&self, omega: f64) -> f64 {
        self.drive_phase_per_tau - omega * self.tau
    }

    /// Physical-range check: positive port rates and delay, non-negative
    /// losses, finite values throughout.
    pub fn validate(&self) -> Result<()> {
        self.check_finite()?;
        if !(self.kappa_a > 0.0) {
            return Err(invalid("kappa_a", "must be positive"));
        }
        if !(self.kappa_b > 0.0) {
            return Err(invalid("kappa_b", "must be positive"));
        }
        if self.gamma_x < 0.0 {
            return Err(invalid("gamma_x", "must be non-negative"));
        }
        if self.gamma_y < 0.0 {
            return Err(invalid("gamma_y", "must be non-negative"));
        }
        if self.gamma < 0.0 {
            return Err(invalid("gamma", "must be non-negative"));
        }
        if !(self.tau > 0.0) {
            return Err(invalid("tau", "must be positive"));
        }
        Ok(())
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        let fields = [
            ("kappa_a", self.kappa_a),
            ("kappa_b", self.kappa_b),
            ("gamma_x", self.gamma_x),
            ("gamma_y", self.gamma_y),
            ("omega_rot", self.omega_rot),
            ("delta_a", self.delta_a),
            ("delta_b", self.delta_b),
            ("gamma", self.gamma),
            ("tau", self.tau),
            ("drive_phase_per_tau", self.drive_phase_per_tau),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        Ok(())
    }
}

/// How the two modes talk to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Structure {
    /// Through a shared waveguide at the points of a topology.
    Waveguide(Topology),
    /// Through a direct exchange `i g (a^dag b_x - b_x^dag a)` with `g` equal
    /// to the waveguide rate field, and no waveguide port.
    DirectCoupling,
}

impl Structure {
    #[must_use]
    pub fn label(&self) -> &'static str {
        match self {
            Structure::Waveguide(t) => t.label(),
            Structure::DirectCoupling => "direct",
        }
    }

    #[must_use]
    pub fn topology(&self) -> Option<&Topology> {
        match self {
            Structure::Waveguide(t) => Some(t),
            Structure::DirectCoupling => None,
        }
    }

    /// Coupling block and waveguide input weights at neighbour phase `phase`.
    #[must_use]
    pub fn coupling(&self, phase: f64, gamma: f64) -> (Mat2, [C64; 2]) {
        match self {
            Structure::Waveguide(t) => (
                coupling_matrix_closed(t, phase, gamma),
                topology::waveguide_weights(t, phase, gamma),
            ),
            Structure::DirectCoupling => (direct_block(gamma), [C64::new(0.0, 0.0); 2]),
        }
    }
}

impl From<Topology> for Structure {
    fn from(t: Topology) -> Self {
        Structure::Waveguide(t)
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Structure::Waveguide(t) => t.fmt(f),
            Structure::DirectCoupling => f.write_str("direct"),
        }
    }
}

fn direct_block(g: f64) -> Mat2 {
    let z = C64::new(0.0, 0.0);
    [[z, C64::new(g, 0.0)], [C64::new(-g, 0.0), z]]
}

/// Bare susceptibilities at `omega`, with the `y` mode folded into `chi_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Susceptibilities {
    pub chi_a: C64,
    pub chi_b: C64,
    /// `i(delta_b - omega) - gamma_y / 2`.
    pub y_denominator: C64,
}

/// Noise inputs enter with the modulus of their rate so that an injected
/// gain shows up as a passivity violation rather than a NaN.
fn port(rate: f64) -> f64 {
    rate.abs().sqrt()
}

pub fn susceptibilities(params: &SystemParams, omega: f64) -> Result<Susceptibilities> {
    let i = C64::i();
    let y_den = i * (params.delta_b - omega) - 0.5 * params.gamma_y;
    let scale = 1.0f64.max(params.delta_b.abs()).max(omega.abs());
    if y_den.norm() <= f64::EPSILON * scale {
        return Err(Error::DegenerateElimination { omega });
    }
    let chi_a = i * (params.delta_a - omega) - 0.5 * params.kappa_a;
    let chi_b = i * (params.delta_b - omega) - 0.5 * (params.kappa_b + params.gamma_x)
        + params.omega_rot * params.omega_rot / y_den;
    Ok(Susceptibilities {
        chi_a,
        chi_b,
        y_denominator: y_den,
    })
}

/// Complete linear response at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseSet {
    pub omega: f64,
    /// Neighbour phase `drive_phase_per_tau - omega tau`.
    pub phase: f64,
    /// Drift matrix `A`.
    pub a: Mat2,
    /// Input matrix `B`, columns `(alpha_in, beta_in, c_in, f_x, f_y)`.
    pub b: Mat2x5,
    /// Transfer matrix `G`.
    pub g: Mat2x5,
    /// `max |A + A^dag + B B^dag|`.
    pub passivity_residual: f64,
    /// `max |G G^dag - I|`.
    pub unitarity_residual: f64,
}

fn input_matrix(params: &SystemParams, chi: &Susceptibilities, wave: [C64; 2]) -> Mat2x5 {
    let z = C64::new(0.0, 0.0);
    let r = |x: f64| C64::new(x, 0.0);
    let fy = -params.omega_rot * port(params.gamma_y) / chi.y_denominator;
    [
        [r(port(params.kappa_a)), z, wave[0], z, z],
        [
            z,
            r(port(params.kappa_b)),
            wave[1],
            r(port(params.gamma_x)),
            fy,
        ],
    ]
}

/// Builds `A`, `B` and `G` at `omega` and records both residuals.
pub fn response(params: &SystemParams, structure: &Structure, omega: f64) -> Result<ResponseSet> {
    params.check_finite()?;
    let chi = susceptibilities(params, omega)?;
    let phase = params.phase_at(omega);
    let (mut a, wave) = structure.coupling(phase, params.gamma);
    a[0][0] += chi.chi_a;
    a[1][1] += chi.chi_b;
    let b = input_matrix(params, &chi, wave);
    let inv = matrix::inv2(&a).ok_or(Error::SingularResponse { omega })?;
    let mut g = matrix::mul2x5(&inv, &b);
    let ports = [port(params.kappa_a), port(params.kappa_b)];
    for (i, row) in g.iter_mut().enumerate() {
        for entry in row.iter_mut() {
            *entry *= ports[i];
        }
        row[i] += 1.0;
    }

    let bb = matrix::gram(&b);
    let mut passivity: f64 = 0.0;
    let gg = matrix::gram(&g);
    let mut unitarity: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            passivity = passivity.max((a[i][j] + a[j][i].conj() + bb[i][j]).norm());
            let id = if i == j { 1.0 } else { 0.0 };
            unitarity = unitarity.max((gg[i][j] - id).norm());
        }
    }
    Ok(ResponseSet {
        omega,
        phase,
        a,
        b,
        g,
        passivity_residual: passivity,
        unitarity_residual: unitarity,
    })
}

/// Transfer matrix from hand-expanded element formulas.
///
/// Uses directly summed couplings and the explicit 2x2 determinant, so it
/// shares no code path with [`response`] beyond the susceptibilities.
pub fn transfer_elements_explicit(
    params: &SystemParams,
    structure: &Structure,
    omega: f64,
) -> Result<Mat2x5> {
    params.check_finite()?;
    let chi = susceptibilities(params, omega)?;
    let phase = params.phase_at(omega);
    let (cpl, sum_a, sum_b) = match structure {
        Structure::Waveguide(t) => {
            let layout = t.layout();
            let ph = |pts: &[u32]| -> C64 {
                pts.iter()
                    .map(|&x| C64::from_polar(1.0, phase * f64::from(x)))
                    .sum()
            };
            (
                coupling_matrix_bruteforce(t, phase, params.gamma),
                ph(&layout.a),
                ph(&layout.b),
            )
        }
        Structure::DirectCoupling => (
            direct_block(params.gamma),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ),
    };
    let d11 = chi.chi_a + cpl[0][0];
    let d22 = chi.chi_b + cpl[1][1];
    let (g_ab, g_ba) = (cpl[0][1], cpl[1][0]);
    let det = d11 * d22 - g_ab * g_ba;
    let scale = d11.norm().max(d22.norm()).max(g_ab.norm()).max(g_ba.norm());
    if !(det.norm() >= 1e-14 * scale * scale) || det.norm() == 0.0 {
        return Err(Error::SingularResponse { omega });
    }
    let (ka, kb) = (port(params.kappa_a), port(params.kappa_b));
    let wg = port(params.gamma);
    let (gx, gy) = (port(params.gamma_x), port(params.gamma_y));
    let y = params.omega_rot / chi.y_denominator;
    let one = C64::new(1.0, 0.0);

    let row_a = [
        one + ka * ka * d22 / det,
        -ka * kb * g_ab / det,
        ka * wg * (d22 * sum_a - g_ab * sum_b) / det,
        -ka * gx * g_ab / det,
        ka * gy * g_ab * y / det,
    ];
    let row_b = [
        -ka * kb * g_ba / det,
        one + kb * kb * d11 / det,
        kb * wg * (d11 * sum_b - g_ba * sum_a) / det,
        kb * gx * d11 / det,
        -kb * gy * d11 * y / det,
    ];
    Ok([row_a, row_b])
}

/// `(|A_ba|^2 - |A_ab|^2) / (|A_ba|^2 + |A_ab|^2)` from the coupling block.
pub fn nonreciprocal_strength(
    params: &SystemParams,
    structure: &Structure,
    omega: f64,
) -> Result<f64> {
    params.check_finite()?;
    let (cpl, _) = structure.coupling(params.phase_at(omega), params.gamma);
    sigma_from(cpl[1][0], cpl[0][1])
}

/// The same ratio read off the port-to-port transfer elements.
pub fn nonreciprocal_strength_from_transfer(set: &ResponseSet) -> Result<f64> {
    sigma_from(set.g[1][0], set.g[0][1])
}

fn sigma_from(forward: C64, backward: C64) -> Result<f64> {
    let f = forward.norm_sqr();
    let b = backward.norm_sqr();
    let total = f + b;
    if total == 0.0 || !total.is_finite() {
        return Err(Error::UndefinedSigma);
    }
    Ok((f - b) / total)
}

/// Labels the parameter set for reports.
impl fmt::Display for SystemParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "kappa_a={} kappa_b={} gamma_x={} gamma_y={} omega_rot={} delta_a={} delta_b={} gamma={} tau={} phi={}",
            self.kappa_a,
            self.kappa_b,
            self.gamma_x,
            self.gamma_y,
            self.omega_rot,
            self.delta_a,
            self.delta_b,
            self.gamma,
            self.tau,
            self.drive_phase_per_tau
        )
    }
}
