//! Parameter sweeps, reciprocal-point search and figure tables.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::linear_response::{nonreciprocal_strength, response, Structure, SystemParams};
use crate::poly::{cancel_common, IntPoly};
use crate::roots::{bisect, golden_min};
use crate::sensing::{report, sensitivity_closed, ClosedCase, DriveConfig};
use crate::topology::{coupling_matrix_bruteforce, Orientation, Topology, TopologyKind};
use crate::C64;

/// Quantity varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Neighbour phase at zero frequency.
    Phase,
    /// Probe frequency `omega`.
    Frequency,
    /// Cooperativity, with the port rates held fixed.
    Cooperativity,
}

impl SweepVariable {
    #[must_use]
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::Phase => "phi",
            SweepVariable::Frequency => "omega",
            SweepVariable::Cooperativity => "co",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub params: SystemParams,
    pub structure: Structure,
    pub drive: DriveConfig,
    /// Probe frequency for phase and cooperativity sweeps.
    pub omega: f64,
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    /// `None` where both off-diagonal couplings vanish.
    pub sigma: Option<f64>,
    pub snr: [f64; 2],
    pub sensitivity: [f64; 2],
    pub passivity_residual: f64,
    pub unitarity_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveData {
    pub variable: SweepVariable,
    pub structure: Structure,
    pub points: Vec<CurvePoint>,
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
#[must_use]
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn tag(err: Error, variable: SweepVariable, x: f64) -> Error {
    match err {
        Error::SingularResponse { .. } | Error::DegenerateElimination { .. } => {
            Error::InvalidSweep(format!("{err} at {} = {x}", variable.name()))
        }
        other => other,
    }
}

/// Evaluates response and sensing figures at every grid value.
pub fn sweep(plan: &SweepSpec) -> Result<CurveData> {
    if plan.values.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidSweep("grid values must be finite".into()));
    }
    let mut points = Vec::with_capacity(plan.values.len());
    for &x in &plan.values {
        let mut params = plan.params;
        let mut omega = plan.omega;
        match plan.variable {
            SweepVariable::Phase => params.drive_phase_per_tau = x,
            SweepVariable::Frequency => omega = x,
            SweepVariable::Cooperativity => {
                if x < 0.0 {
                    return Err(Error::InvalidSweep(format!("negative cooperativity {x}")));
                }
                params = params.with_cooperativity(x);
            }
        }
        let eval = || -> Result<CurvePoint> {
            let set = response(&params, &plan.structure, omega)?;
            let rep = report(&params, &plan.structure, &plan.drive, omega)?;
            let sigma = match nonreciprocal_strength(&params, &plan.structure, omega) {
                Ok(s) => Some(s),
                Err(Error::UndefinedSigma) => None,
                Err(e) => return Err(e),
            };
            Ok(CurvePoint {
                x,
                sigma,
                snr: [rep.alpha.snr, rep.beta.snr],
                sensitivity: [rep.alpha.sensitivity, rep.beta.sensitivity],
                passivity_residual: set.passivity_residual,
                unitarity_residual: set.unitarity_residual,
            })
        };
        points.push(eval().map_err(|e| tag(e, plan.variable, x))?);
    }
    Ok(CurveData {
        variable: plan.variable,
        structure: plan.structure,
        points,
    })
}

/// How to locate the phases where `sigma(0)` vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootMethod {
    /// Roots of the analytic reciprocity conditions.
    Closed,
    /// Scan of the directly summed `sigma(phi)`.
    Numeric,
}

/// Phases in `(0, 2 pi)` where the coupling is reciprocal.
#[derive(Debug, Clone, PartialEq)]
pub enum ReciprocalPoints {
    Isolated(Vec<f64>),
    /// `sigma` vanishes identically.
    Everywhere,
    /// `sigma` never vanishes.
    Nowhere,
}

impl ReciprocalPoints {
    fn from_roots(roots: Vec<f64>) -> Self {
        if roots.is_empty() {
            ReciprocalPoints::Nowhere
        } else {
            ReciprocalPoints::Isolated(roots)
        }
    }

    #[must_use]
    pub fn roots(&self) -> &[f64] {
        match self {
            ReciprocalPoints::Isolated(r) => r,
            _ => &[],
        }
    }
}

const SCAN_SAMPLES: usize = 10_000;
const ROOT_TOL: f64 = 1e-10;
const TANGENT_ZERO: f64 = 1e-8;
const SAME_ROOT: f64 = 1e-6;

/// Roots of `f` on `(0, 2 pi)`: sign changes bisected to `ROOT_TOL`, plus
/// local minima of `|f|` that refine below `zero_level`. A minimum within one
/// grid step of a known root belongs to it. Samples where `f` is undefined
/// are skipped.
fn scan_roots<F: Fn(f64) -> Option<f64>>(f: F, zero_level: f64) -> Vec<f64> {
    let step = TAU / SCAN_SAMPLES as f64;
    let grid: Vec<(f64, Option<f64>)> = (0..SCAN_SAMPLES)
        .map(|k| {
            let x = (k as f64 + 0.5) * step;
            (x, f(x).filter(|v| v.is_finite()))
        })
        .collect();
    let value = |x: f64| f(x).unwrap_or(f64::NAN);
    let mut roots: Vec<f64> = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &(x, v) in &grid {
        let Some(v) = v else { continue };
        if let Some((px, pv)) = prev {
            if v == 0.0 {
                roots.push(x);
            } else if pv != 0.0 && (pv > 0.0) != (v > 0.0) {
                roots.push(bisect(
                    |t| {
                        let y = value(t);
                        if y.is_nan() {
                            pv
                        } else {
                            y
                        }
                    },
                    px,
                    x,
                    ROOT_TOL,
                ));
            }
        }
        prev = Some((x, v));
    }
    for k in 1..SCAN_SAMPLES - 1 {
        let (Some(l), Some(c), Some(r)) = (grid[k - 1].1, grid[k].1, grid[k + 1].1) else {
            continue;
        };
        if c.abs() <= l.abs() && c.abs() <= r.abs() {
            let x = golden_min(
                |t| {
                    let y = value(t).abs();
                    if y.is_nan() {
                        f64::INFINITY
                    } else {
                        y
                    }
                },
                grid[k - 1].0,
                grid[k + 1].0,
                1e-12,
            );
            if value(x).abs() < zero_level && roots.iter().all(|r| (r - x).abs() > step) {
                roots.push(x);
            }
        }
    }
    roots.sort_by(|a, b| a.total_cmp(b));
    roots.dedup_by(|a, b| (*a - *b).abs() < SAME_ROOT);
    roots
}

/// `sigma(phi)` at zero frequency from directly summed couplings.
#[must_use]
pub fn sigma_bruteforce(topology: &Topology, phi: f64) -> Option<f64> {
    let a = coupling_matrix_bruteforce(topology, phi, 1.0);
    let f = a[1][0].norm_sqr();
    let b = a[0][1].norm_sqr();
    (f + b > 0.0).then(|| (f - b) / (f + b))
}

/// Doubled pair-count polynomial `sum 2 step(h - s) w^(h - s)` of one
/// off-diagonal coupling.
fn pair_polynomial(h: &[u32], s: &[u32]) -> IntPoly {
    let mut coeffs = Vec::new();
    for &x in h {
        for &y in s {
            if x >= y {
                let d = (x - y) as usize;
                if coeffs.len() <= d {
                    coeffs.resize(d + 1, 0i128);
                }
                coeffs[d] += if d == 0 { 1 } else { 2 };
            }
        }
    }
    IntPoly(coeffs)
}

/// `sigma(phi)` from the directly summed off-diagonal couplings with their
/// exact common polynomial factor divided out, so that points where both
/// couplings vanish take the continuous limit.
struct ReducedSigma {
    forward: IntPoly,
    backward: IntPoly,
}

impl ReducedSigma {
    fn new(topology: &Topology) -> Self {
        let layout = topology.layout();
        let (forward, backward) = cancel_common(
            pair_polynomial(&layout.b, &layout.a),
            pair_polynomial(&layout.a, &layout.b),
        );
        Self { forward, backward }
    }

    fn at(&self, phi: f64) -> Option<f64> {
        let w = C64::from_polar(1.0, phi);
        let f = self.forward.eval(w).norm_sqr();
        let b = self.backward.eval(w).norm_sqr();
        (f + b > 0.0).then(|| (f - b) / (f + b))
    }
}

fn numeric_points(topology: &Topology) -> ReciprocalPoints {
    let sigma = ReducedSigma::new(topology);
    let probe: Vec<f64> = (0..SCAN_SAMPLES)
        .step_by(7)
        .filter_map(|k| sigma.at((k as f64 + 0.5) * TAU / SCAN_SAMPLES as f64))
        .collect();
    if !probe.is_empty() && probe.iter().all(|s| s.abs() < TANGENT_ZERO) {
        return ReciprocalPoints::Everywhere;
    }
    ReciprocalPoints::from_roots(scan_roots(|x| sigma.at(x), TANGENT_ZERO))
}

fn is_multiple(phi: f64, k: u32) -> bool {
    let turns = phi * f64::from(k) / TAU;
    (turns - turns.round()).abs() < 1e-9
}

/// `lead sin(phi) [cos((lead-1)phi) + cos(lead phi) - cos(follow phi) - cos((follow+1)phi)]
///  + sin(lead phi) [1 + cos(phi) - cos((follow-lead)phi) - cos((follow-lead+1)phi)]`
fn braided_condition(lead: u32, follow: u32, phi: f64) -> f64 {
    let (n, m) = (f64::from(lead), f64::from(follow));
    n * phi.sin()
        * (((n - 1.0) * phi).cos() + (n * phi).cos() - (m * phi).cos() - ((m + 1.0) * phi).cos())
        + (n * phi).sin() * (1.0 + phi.cos() - ((m - n) * phi).cos() - ((m - n + 1.0) * phi).cos())
}

fn closed_points(topology: &Topology) -> ReciprocalPoints {
    let (lead, follow) = match topology.orientation() {
        Orientation::I => (topology.n(), topology.m()),
        Orientation::II => (topology.m(), topology.n()),
    };
    match topology.kind() {
        TopologyKind::Separated => ReciprocalPoints::Nowhere,
        TopologyKind::Coincident => ReciprocalPoints::Everywhere,
        TopologyKind::Nested => {
            let k = topology.nest_index().unwrap_or(1);
            let gap = lead.abs_diff(2 * k);
            if gap == 0 {
                return ReciprocalPoints::Everywhere;
            }
            // sin(lead phi / 2) sin((lead - 2k) phi / 2) = 0, except where both
            // inner sums vanish together and sigma stays finite.
            let mut roots: Vec<f64> = (1..lead)
                .map(|j| TAU * f64::from(j) / f64::from(lead))
                .chain((1..gap).map(|j| TAU * f64::from(j) / f64::from(gap)))
                .filter(|&x| !(is_multiple(x, k) && is_multiple(x, lead - k)))
                .collect();
            roots.sort_by(|a, b| a.total_cmp(b));
            roots.dedup_by(|a, b| (*a - *b).abs() < SAME_ROOT);
            ReciprocalPoints::from_roots(roots)
        }
        TopologyKind::Braided if lead == follow => {
            // sin^2(phi) sin^2(lead phi) = 0 without phi = pi, where both
            // couplings keep their maximal imbalance.
            let roots = (1..2 * lead)
                .filter(|&j| j != lead)
                .map(|j| PI * f64::from(j) / f64::from(lead))
                .collect();
            ReciprocalPoints::from_roots(roots)
        }
        TopologyKind::Braided => {
            let scale = f64::from(lead + follow);
            ReciprocalPoints::from_roots(scan_roots(
                |x| Some(braided_condition(lead, follow, x) / scale),
                TANGENT_ZERO,
            ))
        }
    }
}

/// Phases in `(0, 2 pi)` with `sigma(0) = 0`.
#[must_use]
pub fn reciprocal_points(topology: &Topology, method: RootMethod) -> ReciprocalPoints {
    match method {
        RootMethod::Closed => closed_points(topology),
        RootMethod::Numeric => numeric_points(topology),
    }
}

/// Figures reproducible from the reference operating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FigureId {
    F3,
    F4,
    F5,
    F6,
    F7,
    F8,
    F9,
    F10,
    F11,
    F12,
}

impl FigureId {
    pub const ALL: [FigureId; 10] = [
        FigureId::F3,
        FigureId::F4,
        FigureId::F5,
        FigureId::F6,
        FigureId::F7,
        FigureId::F8,
        FigureId::F9,
        FigureId::F10,
        FigureId::F11,
        FigureId::F12,
    ];

    #[must_use]
    pub fn name(&self) -> &'static str {
        match self {
            FigureId::F3 => "f3",
            FigureId::F4 => "f4",
            FigureId::F5 => "f5",
            FigureId::F6 => "f6",
            FigureId::F7 => "f7",
            FigureId::F8 => "f8",
            FigureId::F9 => "f9",
            FigureId::F10 => "f10",
            FigureId::F11 => "f11",
            FigureId::F12 => "f12",
        }
    }

    #[must_use]
    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(name))
    }
}

/// One panel of a figure: named columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub label: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub id: FigureId,
    pub title: &'static str,
    pub panels: Vec<Table>,
}

/// Cooperativities of the per-panel phase sweeps.
pub const PANEL_COOPERATIVITIES: [f64; 3] = [0.01, 0.05, 0.1];
/// Points of every phase sweep over `[0, 2 pi]`.
pub const PHASE_POINTS: usize = 401;

/// Cooperativity grid `0.01, 0.02, ..., 0.5` of the comparison figures.
#[must_use]
pub fn comparison_cooperativities() -> Vec<f64> {
    (1..=50).map(|k| f64::from(k) / 100.0).collect()
}

fn braided(o: Orientation, n: u32, m: u32) -> Topology {
    Topology::braided(o, n, m).expect("fixed braided layouts are valid")
}

fn at_phase(co: f64, phi: f64) -> SystemParams {
    let mut p = SystemParams::reference(co);
    p.drive_phase_per_tau = phi;
    p
}

fn sigma_table(label: String, pair: [Topology; 2]) -> Result<Table> {
    let mut rows = Vec::with_capacity(PHASE_POINTS);
    for phi in linspace(0.0, TAU, PHASE_POINTS) {
        let p = at_phase(0.1, phi);
        let mut row = vec![phi];
        for t in &pair {
            row.push(nonreciprocal_strength(&p, &Structure::from(*t), 0.0)?);
        }
        rows.push(row);
    }
    Ok(Table {
        label,
        columns: vec!["phi", "sigma_i", "sigma_ii"],
        rows,
    })
}

fn snr_panels(pair: [Topology; 2]) -> Result<Vec<Table>> {
    let drive = DriveConfig::default();
    let mut panels = Vec::new();
    for co in PANEL_COOPERATIVITIES {
        let mut rows = Vec::with_capacity(PHASE_POINTS);
        for phi in linspace(0.0, TAU, PHASE_POINTS) {
            let p = at_phase(co, phi);
            let mut row = vec![phi];
            for t in &pair {
                let r = report(&p, &Structure::from(*t), &drive, 0.0)?;
                row.push(r.alpha.snr);
                row.push(r.beta.snr);
            }
            rows.push(row);
        }
        panels.push(Table {
            label: format!("co={co}"),
            columns: vec!["phi", "r_alpha_i", "r_beta_i", "r_alpha_ii", "r_beta_ii"],
            rows,
        });
    }
    Ok(panels)
}

fn sensitivity_ratio_panels(cases: [ClosedCase; 2]) -> Result<Vec<Table>> {
    let drive = DriveConfig::default();
    let mut panels = Vec::new();
    for co in PANEL_COOPERATIVITIES {
        let mut rows = Vec::with_capacity(PHASE_POINTS);
        for phi in linspace(0.0, TAU, PHASE_POINTS) {
            let p = at_phase(co, phi);
            let mut row = vec![phi];
            for case in cases {
                let s = sensitivity_closed(&p, &drive, case, phi)?;
                row.push(s[1] / s[0]);
            }
            rows.push(row);
        }
        panels.push(Table {
            label: format!("co={co}"),
            columns: vec!["phi", "ratio_beta_over_alpha_i", "ratio_beta_over_alpha_ii"],
            rows,
        });
    }
    Ok(panels)
}

fn comparison_panels(baseline: ClosedCase) -> Result<Vec<Table>> {
    let drive = DriveConfig::default();
    let mut panels = Vec::new();
    for (label, o) in [("a", Orientation::I), ("b", Orientation::II)] {
        let mut rows = Vec::new();
        for co in comparison_cooperativities() {
            let p = at_phase(co, PI);
            let giant = sensitivity_closed(&p, &drive, ClosedCase::StrictBraided(o), PI)?;
            let base = sensitivity_closed(&p, &drive, baseline, PI)?;
            rows.push(vec![co, giant[0] / base[0], giant[1] / base[1]]);
        }
        panels.push(Table {
            label: String::from(label),
            columns: vec!["co", "ratio_alpha", "ratio_beta"],
            rows,
        });
    }
    Ok(panels)
}

fn baseline_snr_panels(
    structure: Structure,
    rotations: &[f64],
    grid: Vec<f64>,
) -> Result<Vec<Table>> {
    let drive = DriveConfig::default();
    let mut panels = Vec::new();
    for &omega_rot in rotations {
        let mut rows = Vec::new();
        for &co in &grid {
            let mut p = at_phase(co, PI);
            p.omega_rot = omega_rot;
            let r = report(&p, &structure, &drive, 0.0)?;
            rows.push(vec![co, r.alpha.snr, r.beta.snr]);
        }
        panels.push(Table {
            label: format!("omega_rot={omega_rot}"),
            columns: vec!["co", "r_alpha", "r_beta"],
            rows,
        });
    }
    Ok(panels)
}

/// Data behind each figure at the reference operating point
/// (`kappa = 10 gamma_x`, `gamma_y = gamma_x`, `Omega = gamma_x / 2`, balanced drive).
pub fn figure_data(id: FigureId) -> Result<FigureData> {
    use Orientation::{I, II};
    let strict = [braided(I, 2, 2), braided(II, 2, 2)];
    let general = [braided(I, 2, 3), braided(II, 3, 2)];
    let (title, panels) = match id {
        FigureId::F3 => (
            "nonreciprocal strength, strict braided",
            vec![sigma_table(String::from("strict"), strict)?],
        ),
        FigureId::F4 => ("port SNRs, strict braided", snr_panels(strict)?),
        FigureId::F5 => (
            "sensitivity ratio beta/alpha, strict braided",
            sensitivity_ratio_panels([
                ClosedCase::StrictBraided(I),
                ClosedCase::StrictBraided(II),
            ])?,
        ),
        FigureId::F6 => (
            "port SNRs, coincident single-point baseline",
            baseline_snr_panels(
                Topology::coincident().into(),
                &[0.5, 1.0],
                (5..=50).map(|k| f64::from(k) / 100.0).collect(),
            )?,
        ),
        FigureId::F7 => (
            "sensitivity ratio to the coincident baseline at phi = pi",
            comparison_panels(ClosedCase::TraditionalCoincident)?,
        ),
        FigureId::F8 => (
            "port SNRs, direct-coupling baseline",
            baseline_snr_panels(
                Structure::DirectCoupling,
                &[0.5],
                comparison_cooperativities(),
            )?,
        ),
        FigureId::F9 => (
            "sensitivity ratio to the direct-coupling baseline at phi = pi",
            comparison_panels(ClosedCase::TraditionalDirect)?,
        ),
        FigureId::F10 => (
            "nonreciprocal strength, general braided",
            vec![sigma_table(String::from("general"), general)?],
        ),
        FigureId::F11 => ("port SNRs, general braided", snr_panels(general)?),
        FigureId::F12 => (
            "sensitivity ratio beta/alpha, general braided",
            sensitivity_ratio_panels([
                ClosedCase::GeneralBraided(I),
                ClosedCase::GeneralBraided(II),
            ])?,
        ),
    };
    Ok(FigureData { id, title, panels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::enumerate;

    fn close_sets(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(0.0, 1.0, 5);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn strict_braided_roots() {
        let t = braided(Orientation::I, 2, 2);
        for method in [RootMethod::Closed, RootMethod::Numeric] {
            let r = reciprocal_points(&t, method);
            assert!(
                close_sets(r.roots(), &[0.5 * PI, 1.5 * PI], 1e-6),
                "{method:?}: {r:?}"
            );
        }
    }

    #[test]
    fn general_braided_closed_roots_are_distinct() {
        let t = braided(Orientation::I, 2, 3);
        let r = reciprocal_points(&t, RootMethod::Closed);
        let outer = 0.419_569_376_742_839_7 * PI;
        assert!(
            close_sets(r.roots(), &[outer, PI, TAU - outer], 1e-6),
            "{r:?}"
        );
    }

    #[test]
    fn closed_and_numeric_roots_agree_for_nested_and_strict_braided() {
        for t in enumerate(6) {
            if !(t.kind() == TopologyKind::Nested || t.is_strict_braided()) {
                continue;
            }
            let c = reciprocal_points(&t, RootMethod::Closed);
            let n = reciprocal_points(&t, RootMethod::Numeric);
            match (&c, &n) {
                (ReciprocalPoints::Isolated(a), ReciprocalPoints::Isolated(b)) => {
                    assert!(close_sets(a, b, 1e-6), "{t}: closed {a:?} numeric {b:?}");
                }
                _ => assert_eq!(c, n, "{t}"),
            }
        }
    }

    #[test]
    fn separated_has_no_roots_and_half_nesting_is_reciprocal() {
        let s = Topology::separated(Orientation::II, 3, 2).unwrap();
        assert_eq!(
            reciprocal_points(&s, RootMethod::Numeric),
            ReciprocalPoints::Nowhere
        );
        assert_eq!(
            reciprocal_points(&s, RootMethod::Closed),
            ReciprocalPoints::Nowhere
        );
        let n = Topology::nested(Orientation::I, 2, 3, 1).unwrap();
        assert_eq!(
            reciprocal_points(&n, RootMethod::Numeric),
            ReciprocalPoints::Everywhere
        );
        assert_eq!(
            reciprocal_points(&n, RootMethod::Closed),
            ReciprocalPoints::Everywhere
        );
    }

    #[test]
    fn phase_sweep_tracks_sigma() {
        let plan = SweepSpec {
            variable: SweepVariable::Phase,
            values: linspace(0.0, TAU, 9),
            params: SystemParams::reference(0.1),
            structure: braided(Orientation::I, 2, 2).into(),
            drive: DriveConfig::default(),
            omega: 0.0,
        };
        let curve = sweep(&plan).unwrap();
        assert_eq!(curve.points.len(), 9);
        assert!((curve.points[0].sigma.unwrap() - 0.8).abs() < 1e-12);
        assert!(curve.points[2].sigma.unwrap().abs() < 1e-12);
        assert!(curve.points.iter().all(|p| p.unitarity_residual < 1e-12));
    }

    #[test]
    fn cooperativity_sweep_rejects_negative_values() {
        let plan = SweepSpec {
            variable: SweepVariable::Cooperativity,
            values: vec![0.1, -0.2],
            params: SystemParams::reference(0.1),
            structure: Structure::DirectCoupling,
            drive: DriveConfig::default(),
            omega: 0.0,
        };
        assert!(matches!(sweep(&plan), Err(Error::InvalidSweep(_))));
    }

    #[test]
    fn figure_ids_round_trip() {
        for f in FigureId::ALL {
            assert_eq!(FigureId::parse(f.name()), Some(f));
        }
        assert_eq!(FigureId::parse("F4"), Some(FigureId::F4));
        assert_eq!(FigureId::parse("f2"), None);
    }

    #[test]
    fn mirrored_sigma_curves() {
        let fig = figure_data(FigureId::F3).unwrap();
        for row in &fig.panels[0].rows {
            assert!((row[1] + row[2]).abs() < 1e-12);
        }
    }

    #[test]
    fn coincident_baseline_snrs_stay_below_one() {
        let fig = figure_data(FigureId::F6).unwrap();
        assert_eq!(fig.panels.len(), 2);
        for panel in &fig.panels {
            for row in &panel.rows {
                assert!(row[1] < 1.0 && row[2] < 1.0, "{row:?}");
            }
        }
    }

    #[test]
    fn direct_baseline_has_only_alpha_readable() {
        let fig = figure_data(FigureId::F8).unwrap();
        for row in &fig.panels[0].rows {
            assert!(row[2] < 1.0);
        }
        assert!(fig.panels[0].rows.iter().any(|r| r[1] > 1.0));
    }

    #[test]
    fn strict_ratio_minimal_at_maximal_nonreciprocity() {
        let fig = figure_data(FigureId::F5).unwrap();
        for panel in &fig.panels {
            let col: Vec<f64> = panel.rows.iter().map(|r| r[1]).collect();
            assert!(col.iter().all(|&r| r < 1.0));
            let min = col.iter().copied().fold(f64::INFINITY, f64::min);
            for idx in [0, PHASE_POINTS / 2, PHASE_POINTS - 1] {
                assert!((col[idx] - min).abs() < 1e-12);
            }
        }
    }
}
