//! Run configuration: a TOML record merged with command-line overrides.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use giantgyro_core::dynamics::{DdeConfig, MemoryModel};
use giantgyro_core::sensing::DriveConfig;
use giantgyro_core::{Orientation, Structure, SystemParams, Topology, TopologyKind, C64};
use serde::{de, Deserialize, Deserializer, Serialize};

/// Parses an angle in radians, with an optional `pi` multiplier suffix
/// (`pi`, `0.5pi`, `-1.5pi`, `2π`).
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let stripped = t
        .strip_suffix("pi")
        .or_else(|| t.strip_suffix("PI"))
        .or_else(|| t.strip_suffix('π'));
    let value = match stripped {
        Some(coeff) => {
            let coeff = coeff.trim().trim_end_matches('*');
            let c = match coeff {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c
                    .parse::<f64>()
                    .map_err(|_| format!("invalid angle `{text}`"))?,
            };
            c * PI
        }
        None => t
            .parse::<f64>()
            .map_err(|_| format!("invalid angle `{text}`"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("angle `{text}` is not finite"))
    }
}

fn angle<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Int(i64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(x) => Ok(x),
        Raw::Int(x) => Ok(x as f64),
        Raw::Text(s) => parse_angle(&s).map_err(de::Error::custom),
    }
}

/// Named structure choices accepted by `--topology` and the config record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StructureName {
    SeparatedI,
    SeparatedIi,
    NestedI,
    NestedIi,
    BraidedI,
    BraidedIi,
    Coincident,
    Direct,
}

impl StructureName {
    fn layout(self) -> Option<(TopologyKind, Orientation)> {
        use Orientation::{I, II};
        use TopologyKind::*;
        Some(match self {
            StructureName::SeparatedI => (Separated, I),
            StructureName::SeparatedIi => (Separated, II),
            StructureName::NestedI => (Nested, I),
            StructureName::NestedIi => (Nested, II),
            StructureName::BraidedI => (Braided, I),
            StructureName::BraidedIi => (Braided, II),
            StructureName::Coincident => (Coincident, I),
            StructureName::Direct => return None,
        })
    }
}

impl fmt::Display for StructureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StructureName::SeparatedI => "separated-i",
            StructureName::SeparatedIi => "separated-ii",
            StructureName::NestedI => "nested-i",
            StructureName::NestedIi => "nested-ii",
            StructureName::BraidedI => "braided-i",
            StructureName::BraidedIi => "braided-ii",
            StructureName::Coincident => "coincident",
            StructureName::Direct => "direct",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemSection {
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub gamma_x: f64,
    pub gamma_y: f64,
    pub omega_rot: f64,
    pub delta_a: f64,
    pub delta_b: f64,
    /// Cooperativity `4 gamma^2 / (kappa_a kappa_b)`.
    pub co: f64,
    pub tau: f64,
    /// Neighbour phase at zero frequency.
    #[serde(deserialize_with = "angle")]
    pub phi: f64,
}

impl Default for SystemSection {
    fn default() -> Self {
        let p = SystemParams::reference(0.1);
        Self {
            kappa_a: p.kappa_a,
            kappa_b: p.kappa_b,
            gamma_x: p.gamma_x,
            gamma_y: p.gamma_y,
            omega_rot: p.omega_rot,
            delta_a: p.delta_a,
            delta_b: p.delta_b,
            co: 0.1,
            tau: p.tau,
            phi: p.drive_phase_per_tau,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSection {
    pub topology: StructureName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nest_index: Option<u32>,
}

impl Default for StructureSection {
    fn default() -> Self {
        Self {
            topology: StructureName::BraidedI,
            n: Some(2),
            m: Some(2),
            nest_index: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveSection {
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub ratio: f64,
    #[serde(deserialize_with = "angle")]
    pub theta: f64,
}

impl Default for DriveSection {
    fn default() -> Self {
        Self {
            alpha_re: 1.0,
            alpha_im: 0.0,
            ratio: 1.0,
            theta: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub phi_steps: usize,
    /// Probe frequency of phase and cooperativity sweeps.
    pub omega: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            phi_steps: 401,
            omega: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DynamicsSection {
    pub steps_per_tau: u32,
    /// Zero selects `60 / min(kappa_a, gamma_x)`.
    pub total_time: f64,
    pub record_every: u32,
    pub markovian: bool,
}

impl Default for DynamicsSection {
    fn default() -> Self {
        Self {
            steps_per_tau: 32,
            total_time: 0.0,
            record_every: 32,
            markovian: false,
        }
    }
}

/// Complete run configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub system: SystemSection,
    pub structure: StructureSection,
    pub drive: DriveSection,
    pub sweep: SweepSection,
    pub dynamics: DynamicsSection,
}

/// Command-line values that override the configuration record.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub topology: Option<StructureName>,
    pub n: Option<u32>,
    pub m: Option<u32>,
    pub nest_index: Option<u32>,
    pub kappa: Option<f64>,
    pub gamma_x: Option<f64>,
    pub gamma_y: Option<f64>,
    pub co: Option<f64>,
    pub omega_rot: Option<f64>,
    pub phi: Option<f64>,
    pub phi_steps: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("config: {e}"))
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::from_toml(&text)
    }

    #[must_use]
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    /// Applies command-line overrides. A topology chosen on the command
    /// line drops the default point counts unless a config file set them.
    pub fn merge(&mut self, o: &Overrides, counts_from_file: bool) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(t) = o.topology {
            if !counts_from_file {
                self.structure.n = None;
                self.structure.m = None;
                self.structure.nest_index = None;
            }
            self.structure.topology = t;
        }
        if o.n.is_some() {
            self.structure.n = o.n;
        }
        if o.m.is_some() {
            self.structure.m = o.m;
        }
        if o.nest_index.is_some() {
            self.structure.nest_index = o.nest_index;
        }
        let sys = &mut self.system;
        if let Some(k) = o.kappa {
            sys.kappa_a = k;
            sys.kappa_b = k;
        }
        if let Some(x) = o.gamma_x {
            sys.gamma_x = x;
        }
        if let Some(x) = o.gamma_y {
            sys.gamma_y = x;
        }
        if let Some(x) = o.co {
            sys.co = x;
        }
        if let Some(x) = o.omega_rot {
            sys.omega_rot = x;
        }
        if let Some(x) = o.phi {
            sys.phi = x;
        }
        if let Some(x) = o.phi_steps {
            self.sweep.phi_steps = x;
        }
    }

    /// Physical parameters; the waveguide rate follows from the cooperativity.
    pub fn params(&self) -> Result<SystemParams, String> {
        let s = &self.system;
        if !(s.co >= 0.0) || !s.co.is_finite() {
            return Err(format!(
                "invalid parameter `co`: must be finite and non-negative, got {}",
                s.co
            ));
        }
        let p = SystemParams {
            kappa_a: s.kappa_a,
            kappa_b: s.kappa_b,
            gamma_x: s.gamma_x,
            gamma_y: s.gamma_y,
            omega_rot: s.omega_rot,
            delta_a: s.delta_a,
            delta_b: s.delta_b,
            gamma: 0.0,
            tau: s.tau,
            drive_phase_per_tau: s.phi,
        };
        Ok(p.with_cooperativity(s.co))
    }

    /// Parameters checked against the physical ranges.
    pub fn valid_params(&self) -> Result<SystemParams, String> {
        let p = self.params()?;
        p.validate().map_err(|e| e.to_string())?;
        Ok(p)
    }

    pub fn structure(&self) -> Result<Structure, String> {
        let s = &self.structure;
        let Some((kind, orientation)) = s.topology.layout() else {
            return Ok(Structure::DirectCoupling);
        };
        if kind == TopologyKind::Coincident {
            return Ok(Topology::coincident().into());
        }
        let need = |v: Option<u32>, flag: &str| {
            v.ok_or_else(|| format!("{} requires --{flag}", s.topology))
        };
        let n = need(s.n, "n")?;
        let m = need(s.m, "m")?;
        let nest = if kind == TopologyKind::Nested {
            Some(need(s.nest_index, "nest-index")?)
        } else {
            None
        };
        Topology::new(kind, orientation, n, m, nest)
            .map(Structure::from)
            .map_err(|e| e.to_string())
    }

    pub fn drive(&self) -> Result<DriveConfig, String> {
        let d = &self.drive;
        let drive = DriveConfig {
            alpha: C64::new(d.alpha_re, d.alpha_im),
            ratio: d.ratio,
            theta: d.theta,
        };
        drive.validate().map_err(|e| e.to_string())?;
        Ok(drive)
    }

    pub fn dde(&self, params: &SystemParams) -> Result<DdeConfig, String> {
        let d = &self.dynamics;
        let total_time = if d.total_time > 0.0 {
            d.total_time
        } else {
            60.0 / params.kappa_a.min(params.gamma_x.max(f64::MIN_POSITIVE))
        };
        if d.steps_per_tau == 0 || d.record_every == 0 {
            return Err("steps_per_tau and record_every must be at least 1".into());
        }
        Ok(DdeConfig {
            steps_per_tau: d.steps_per_tau,
            total_time,
            record_every: d.record_every,
            memory: if d.markovian {
                MemoryModel::Markovian
            } else {
                MemoryModel::Delayed
            },
        })
    }

    /// One-line snapshot for CSV comment headers.
    #[must_use]
    pub fn snapshot(&self) -> String {
        let s = &self.system;
        let t = &self.structure;
        let opt = |v: Option<u32>| v.map_or_else(|| "-".to_string(), |x| x.to_string());
        format!(
            "topology={} n={} m={} nest_index={} kappa_a={} kappa_b={} gamma_x={} gamma_y={} omega_rot={} delta_a={} delta_b={} co={} tau={} phi={} alpha={}{:+}i ratio={} theta={} seed={}",
            t.topology,
            opt(t.n),
            opt(t.m),
            opt(t.nest_index),
            s.kappa_a,
            s.kappa_b,
            s.gamma_x,
            s.gamma_y,
            s.omega_rot,
            s.delta_a,
            s.delta_b,
            s.co,
            s.tau,
            s.phi,
            self.drive.alpha_re,
            self.drive.alpha_im,
            self.drive.ratio,
            self.drive.theta,
            self.seed
        )
    }
}
