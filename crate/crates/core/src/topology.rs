//! Coupling-point layouts and the waveguide-mediated coupling matrix.
//!
//! Coupling points sit on an integer grid in units of the neighbour delay.
//! Mode `a` has `n` points and mode `b` has `m` points. The orientation
//! decides which mode is laid down first (or, for nested layouts, which
//! mode encloses the other).

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::matrix::Mat2;
use crate::C64;

/// Geometric arrangement of the two sets of coupling points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TopologyKind {
    Separated,
    Nested,
    Braided,
    Coincident,
}

/// Which mode plays the leading role in a layout.
///
/// `I`: mode `a` comes first (separated, braided) or encloses `b` (nested).
/// `II`: the roles of `a` and `b` are swapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    I,
    II,
}

/// A validated coupling-point topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Topology {
    kind: TopologyKind,
    orientation: Orientation,
    n: u32,
    m: u32,
    nest_index: Option<u32>,
}

/// Integer coupling positions of both modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointLayout {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
}

fn bad(msg: impl Into<alloc::string::String>) -> Error {
    Error::InvalidTopology(msg.into())
}

impl Topology {
    /// Validates and builds a topology.
    ///
    /// `nest_index` counts the outer mode's points that precede the inner
    /// mode and is required for (and only accepted by) nested layouts.
    pub fn new(
        kind: TopologyKind,
        orientation: Orientation,
        n: u32,
        m: u32,
        nest_index: Option<u32>,
    ) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(bad("each mode needs at least one coupling point"));
        }
        if kind != TopologyKind::Nested && nest_index.is_some() {
            return Err(bad("nest_index only applies to nested layouts"));
        }
        match kind {
            TopologyKind::Separated => {}
            TopologyKind::Coincident => {
                if n != 1 || m != 1 {
                    return Err(bad("coincident layout requires n = m = 1"));
                }
            }
            TopologyKind::Nested => {
                let outer = match orientation {
                    Orientation::I => n,
                    Orientation::II => m,
                };
                let idx = nest_index.ok_or_else(|| bad("nested layout requires nest_index"))?;
                if idx == 0 || idx >= outer {
                    return Err(bad(format!(
                        "nest_index must lie in 1..={} for {} outer points, got {idx}",
                        outer.saturating_sub(1),
                        outer
                    )));
                }
            }
            TopologyKind::Braided => {
                let (lead, follow) = match orientation {
                    Orientation::I => (n, m),
                    Orientation::II => (m, n),
                };
                if follow < lead {
                    return Err(bad(format!(
                        "braided orientation {orientation} needs the {} mode to carry at least as many points",
                        if orientation == Orientation::I { "b" } else { "a" }
                    )));
                }
                if follow > lead && lead < 2 {
                    return Err(bad(
                        "unequal braided layouts need at least two interleaved points",
                    ));
                }
            }
        }
        let orientation = if kind == TopologyKind::Coincident {
            Orientation::I
        } else {
            orientation
        };
        Ok(Self {
            kind,
            orientation,
            n,
            m,
            nest_index,
        })
    }

    pub fn separated(orientation: Orientation, n: u32, m: u32) -> Result<Self> {
        Self::new(TopologyKind::Separated, orientation, n, m, None)
    }

    pub fn nested(orientation: Orientation, n: u32, m: u32, nest_index: u32) -> Result<Self> {
        Self::new(TopologyKind::Nested, orientation, n, m, Some(nest_index))
    }

    pub fn braided(orientation: Orientation, n: u32, m: u32) -> Result<Self> {
        Self::new(TopologyKind::Braided, orientation, n, m, None)
    }

    #[must_use]
    pub fn coincident() -> Self {
        Self {
            kind: TopologyKind::Coincident,
            orientation: Orientation::I,
            n: 1,
            m: 1,
            nest_index: None,
        }
    }

    #[must_use]
    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    #[must_use]
    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Number of coupling points of mode `a`.
    #[must_use]
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of coupling points of mode `b`.
    #[must_use]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[must_use]
    pub fn nest_index(&self) -> Option<u32> {
        self.nest_index
    }

    /// Braided with equal point counts.
    #[must_use]
    pub fn is_strict_braided(&self) -> bool {
        self.kind == TopologyKind::Braided && self.n == self.m
    }

    /// Short label such as `braided-i` or `coincident`.
    #[must_use]
    pub fn label(&self) -> &'static str {
        use Orientation::*;
        use TopologyKind::*;
        match (self.kind, self.orientation) {
            (Separated, I) => "separated-i",
            (Separated, II) => "separated-ii",
            (Nested, I) => "nested-i",
            (Nested, II) => "nested-ii",
            (Braided, I) => "braided-i",
            (Braided, II) => "braided-ii",
            (Coincident, _) => "coincident",
        }
    }

    /// Canonical integer positions of every coupling point.
    #[must_use]
    pub fn layout(&self) -> PointLayout {
        let (lead, follow) = match self.orientation {
            Orientation::I => (self.n, self.m),
            Orientation::II => (self.m, self.n),
        };
        let (first, second): (Vec<u32>, Vec<u32>) = match self.kind {
            TopologyKind::Coincident => (alloc::vec![0], alloc::vec![0]),
            TopologyKind::Separated => ((0..lead).collect(), (lead..lead + follow).collect()),
            TopologyKind::Nested => {
                let k = self.nest_index.unwrap_or(1);
                let outer = (0..k).chain(k + follow..lead + follow).collect();
                (outer, (k..k + follow).collect())
            }
            TopologyKind::Braided => {
                let first = (0..lead).map(|i| 2 * i).collect();
                let second = (0..lead)
                    .map(|i| 2 * i + 1)
                    .chain(2 * lead..lead + follow)
                    .collect();
                (first, second)
            }
        };
        match self.orientation {
            Orientation::I => PointLayout {
                a: first,
                b: second,
            },
            Orientation::II => PointLayout {
                a: second,
                b: first,
            },
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::I => "I",
            Orientation::II => "II",
        })
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={}, m={}", self.label(), self.n, self.m)?;
        if let Some(k) = self.nest_index {
            write!(f, ", nest={k}")?;
        }
        f.write_str(")")
    }
}

/// Step weight for a pair separated by `d` grid units: 0 before, 1/2 at, 1 after.
#[must_use]
pub fn heaviside(d: i64) -> f64 {
    match d {
        0 => 0.5,
        d if d > 0 => 1.0,
        _ => 0.0,
    }
}

/// `-gamma * sum_{h,s} step(h - s) e^{i phi (h - s)}` over two point sets.
#[must_use]
pub fn gamma_sum(h: &[u32], s: &[u32], phi: f64, gamma: f64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for &x in h {
        for &y in s {
            let d = i64::from(x) - i64::from(y);
            let weight = heaviside(d);
            if weight > 0.0 {
                acc += C64::from_polar(weight, phi * d as f64);
            }
        }
    }
    -gamma * acc
}

/// Coupling matrix `[[G(a,a), G(a,b)], [G(b,a), G(b,b)]]` by direct summation.
#[must_use]
pub fn coupling_matrix_bruteforce(topology: &Topology, phi: f64, gamma: f64) -> Mat2 {
    let PointLayout { a, b } = topology.layout();
    [
        [gamma_sum(&a, &a, phi, gamma), gamma_sum(&a, &b, phi, gamma)],
        [gamma_sum(&b, &a, phi, gamma), gamma_sum(&b, &b, phi, gamma)],
    ]
}

/// Waveguide input weights `sqrt(gamma) * sum_j e^{i phi x_j}` for modes `a` and `b`.
#[must_use]
pub fn waveguide_weights(topology: &Topology, phi: f64, gamma: f64) -> [C64; 2] {
    let PointLayout { a, b } = topology.layout();
    let sum = |pts: &[u32]| -> C64 {
        pts.iter()
            .map(|&x| C64::from_polar(1.0, phi * f64::from(x)))
            .sum()
    };
    let g = gamma.sqrt();
    [sum(&a) * g, sum(&b) * g]
}

/// Below this distance from 1 the geometric-series quotients lose accuracy
/// and the finite sums are evaluated instead.
const SERIES_RADIUS: f64 = 0.25;

fn near_one(x: C64) -> bool {
    (C64::new(1.0, 0.0) - x).norm() < SERIES_RADIUS
}

/// `sum_{s=0}^{k-1} x^s`
fn geo(x: C64, k: u32) -> C64 {
    let one = C64::new(1.0, 0.0);
    if near_one(x) {
        let mut acc = C64::new(0.0, 0.0);
        let mut p = one;
        for _ in 0..k {
            acc += p;
            p *= x;
        }
        acc
    } else {
        (one - x.powu(k)) / (one - x)
    }
}

/// `sum_{s=1}^{k-1} (k - s) x^s`
fn tri(x: C64, k: u32) -> C64 {
    let one = C64::new(1.0, 0.0);
    if near_one(x) {
        let mut acc = C64::new(0.0, 0.0);
        let mut p = x;
        for s in 1..k {
            acc += p * f64::from(k - s);
            p *= x;
        }
        acc
    } else {
        let kf = f64::from(k);
        x * ((one - x) * kf - (one - x.powu(k))) / ((one - x) * (one - x))
    }
}

/// Self-coupling of `k` consecutive points with spacing `x`, without the `-gamma`.
fn chain(x: C64, k: u32) -> C64 {
    tri(x, k) + 0.5 * f64::from(k)
}

/// Orientation-I matrix (without the `-gamma` factor) for `lead` points of
/// the leading mode and `follow` points of the other.
fn closed_lead_first(
    kind: TopologyKind,
    lead: u32,
    follow: u32,
    nest: Option<u32>,
    phi: f64,
) -> Mat2 {
    let zero = C64::new(0.0, 0.0);
    let w = C64::from_polar(1.0, phi);
    match kind {
        TopologyKind::Coincident => {
            let h = C64::new(0.5, 0.0);
            [[h, h], [h, h]]
        }
        TopologyKind::Separated => [
            [chain(w, lead), zero],
            [w * geo(w, lead) * geo(w, follow), chain(w, follow)],
        ],
        TopologyKind::Nested => {
            let k = nest.unwrap_or(1);
            let tail = lead - k;
            let outer =
                chain(w, k) + chain(w, tail) + w.powu(follow + 1) * geo(w, k) * geo(w, tail);
            [
                [outer, w * geo(w, follow) * geo(w, tail)],
                [w * geo(w, k) * geo(w, follow), chain(w, follow)],
            ]
        }
        TopologyKind::Braided => {
            let z = w * w;
            let self_lead = chain(z, lead);
            let a12 = tri(z, lead) / w;
            let mut a21 = w * (tri(z, lead) + f64::from(lead));
            let mut a22 = self_lead;
            let extra = follow - lead;
            if extra > 0 {
                let run = geo(z, lead) * geo(w, extra);
                a21 += z * run;
                a22 += chain(w, extra) + w * run;
            }
            [[self_lead, a12], [a21, a22]]
        }
    }
}

/// Coupling matrix from the summed geometric-series closed forms.
///
/// Agrees with [`coupling_matrix_bruteforce`] to rounding error, including
/// at the removable singularities `e^{i phi} = 1` and `e^{2 i phi} = 1`.
#[must_use]
pub fn coupling_matrix_closed(topology: &Topology, phi: f64, gamma: f64) -> Mat2 {
    let (lead, follow) = match topology.orientation {
        Orientation::I => (topology.n, topology.m),
        Orientation::II => (topology.m, topology.n),
    };
    let x = closed_lead_first(topology.kind, lead, follow, topology.nest_index, phi);
    let g = -gamma;
    match topology.orientation {
        Orientation::I => [[x[0][0] * g, x[0][1] * g], [x[1][0] * g, x[1][1] * g]],
        Orientation::II => [[x[1][1] * g, x[1][0] * g], [x[0][1] * g, x[0][0] * g]],
    }
}

/// Every valid topology with point counts up to `max_points`, covering all
/// orientations and nest indices.
#[must_use]
pub fn enumerate(max_points: u32) -> Vec<Topology> {
    let mut out = Vec::new();
    out.push(Topology::coincident());
    for n in 1..=max_points {
        for m in 1..=max_points {
            for o in [Orientation::I, Orientation::II] {
                out.extend(Topology::separated(o, n, m));
                out.extend(Topology::braided(o, n, m));
                let outer = if o == Orientation::I { n } else { m };
                for k in 1..outer {
                    out.extend(Topology::nested(o, n, m, k));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use proptest::prelude::*;
    use std::vec;

    fn max_diff(x: &Mat2, y: &Mat2) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((x[i][j] - y[i][j]).norm());
            }
        }
        d
    }

    #[test]
    fn canonical_layouts() {
        let t = Topology::separated(Orientation::I, 2, 3).unwrap();
        assert_eq!(
            t.layout(),
            PointLayout {
                a: vec![0, 1],
                b: vec![2, 3, 4]
            }
        );
        let t = Topology::separated(Orientation::II, 2, 3).unwrap();
        assert_eq!(
            t.layout(),
            PointLayout {
                a: vec![3, 4],
                b: vec![0, 1, 2]
            }
        );
        let t = Topology::nested(Orientation::I, 3, 2, 1).unwrap();
        assert_eq!(
            t.layout(),
            PointLayout {
                a: vec![0, 3, 4],
                b: vec![1, 2]
            }
        );
        let t = Topology::nested(Orientation::II, 2, 3, 2).unwrap();
        assert_eq!(
            t.layout(),
            PointLayout {
                a: vec![2, 3],
                b: vec![0, 1, 4]
            }
        );
        let t = Topology::braided(Orientation::I, 2, 2).unwrap();
        assert_eq!(
            t.layout(),
            PointLayout {
                a: vec![0, 2],
                b: vec![1, 3]
            }
        );
        let t = Topology::braided(Orientation::II, 2, 2).unwrap();
        assert_eq!(
            t.layout(),
            PointLayout {
                a: vec![1, 3],
                b: vec![0, 2]
            }
        );
        let t = Topology::braided(Orientation::I, 2, 3).unwrap();
        assert_eq!(
            t.layout(),
            PointLayout {
                a: vec![0, 2],
                b: vec![1, 3, 4]
            }
        );
        let t = Topology::braided(Orientation::II, 3, 2).unwrap();
        assert_eq!(
            t.layout(),
            PointLayout {
                a: vec![1, 3, 4],
                b: vec![0, 2]
            }
        );
        assert_eq!(
            Topology::coincident().layout(),
            PointLayout {
                a: vec![0],
                b: vec![0]
            }
        );
    }

    #[test]
    fn invalid_topologies_are_rejected() {
        assert!(Topology::nested(Orientation::I, 2, 3, 0).is_err());
        assert!(Topology::nested(Orientation::I, 2, 3, 2).is_err());
        assert!(Topology::nested(Orientation::II, 5, 1, 1).is_err());
        assert!(Topology::braided(Orientation::I, 3, 2).is_err());
        assert!(Topology::braided(Orientation::II, 2, 3).is_err());
        assert!(Topology::braided(Orientation::I, 1, 3).is_err());
        assert!(Topology::new(TopologyKind::Coincident, Orientation::I, 1, 2, None).is_err());
        assert!(Topology::new(TopologyKind::Separated, Orientation::I, 1, 2, Some(1)).is_err());
        assert!(Topology::separated(Orientation::I, 0, 2).is_err());
    }

    #[test]
    fn step_weight_at_zero_is_half() {
        assert_eq!(heaviside(0), 0.5);
        assert_eq!(heaviside(3), 1.0);
        assert_eq!(heaviside(-1), 0.0);
    }

    #[test]
    fn separated_cross_coupling_is_one_way() {
        let t = Topology::separated(Orientation::I, 3, 2).unwrap();
        let a = coupling_matrix_bruteforce(&t, 0.7, 1.3);
        assert_eq!(a[0][1], C64::new(0.0, 0.0));
        assert!(a[1][0].norm() > 0.0);
        let t = Topology::separated(Orientation::II, 3, 2).unwrap();
        let a = coupling_matrix_bruteforce(&t, 0.7, 1.3);
        assert_eq!(a[1][0], C64::new(0.0, 0.0));
    }

    #[test]
    fn strict_braided_pair_by_hand() {
        // a at {0, 2}, b at {1, 3}; unit gamma.
        let phi = 0.37;
        let e = |k: f64| C64::from_polar(1.0, k * phi);
        let t = Topology::braided(Orientation::I, 2, 2).unwrap();
        let a = coupling_matrix_bruteforce(&t, phi, 1.0);
        assert!((a[0][0] + (C64::new(1.0, 0.0) + e(2.0))).norm() < 1e-15);
        assert!((a[0][1] + e(1.0)).norm() < 1e-15);
        assert!((a[1][0] + (e(1.0) * 2.0 + e(3.0))).norm() < 1e-15);
    }

    #[test]
    fn closed_matches_bruteforce_on_every_small_topology() {
        for t in enumerate(8) {
            let scale = f64::from((t.n() + t.m()).pow(2));
            for k in 0..64 {
                let phi = 2.0 * PI * f64::from(k) / 64.0;
                let gamma = 0.8;
                let d = max_diff(
                    &coupling_matrix_closed(&t, phi, gamma),
                    &coupling_matrix_bruteforce(&t, phi, gamma),
                );
                assert!(d <= 1e-12 * gamma * scale, "{t} phi={phi}: {d}");
            }
        }
    }

    #[test]
    fn closed_forms_hold_next_to_singular_phases() {
        for t in enumerate(6) {
            for base in [0.0, PI, 2.0 * PI] {
                for off in [1e-9, -1e-7, 1e-4, -0.01, 0.2499, 0.2501] {
                    let phi = base + off;
                    let d = max_diff(
                        &coupling_matrix_closed(&t, phi, 1.0),
                        &coupling_matrix_bruteforce(&t, phi, 1.0),
                    );
                    assert!(d < 1e-11, "{t} phi={phi}: {d}");
                }
            }
        }
    }

    fn arb_topology() -> impl Strategy<Value = Topology> {
        let all = enumerate(7);
        (0..all.len()).prop_map(move |i| all[i])
    }

    proptest! {
        #[test]
        fn closed_equals_bruteforce(t in arb_topology(), phi in -10.0f64..10.0, gamma in 0.01f64..5.0) {
            let d = max_diff(&coupling_matrix_closed(&t, phi, gamma), &coupling_matrix_bruteforce(&t, phi, gamma));
            prop_assert!(d <= 1e-12 * gamma * f64::from((t.n() + t.m()).pow(2)));
        }

        #[test]
        fn waveguide_part_is_lossless(t in arb_topology(), phi in -10.0f64..10.0, gamma in 0.01f64..5.0) {
            // A + A^dagger + v v^dagger vanishes for the waveguide block alone.
            let a = coupling_matrix_bruteforce(&t, phi, gamma);
            let v = waveguide_weights(&t, phi, gamma);
            for i in 0..2 {
                for j in 0..2 {
                    let r = a[i][j] + a[j][i].conj() + v[i] * v[j].conj();
                    prop_assert!(r.norm() < 1e-11 * gamma * f64::from((t.n() + t.m()).pow(2)));
                }
            }
        }

        #[test]
        fn layout_is_canonical(t in arb_topology()) {
            let l = t.layout();
            prop_assert_eq!(l.a.len() as u32, t.n());
            prop_assert_eq!(l.b.len() as u32, t.m());
            let mut all: std::vec::Vec<u32> = l.a.iter().chain(&l.b).copied().collect();
            all.sort_unstable();
            if t.kind() != TopologyKind::Coincident {
                let expect: std::vec::Vec<u32> = (0..t.n() + t.m()).collect();
                prop_assert_eq!(all, expect);
            }
        }

        #[test]
        fn orientation_two_mirrors_orientation_one(n in 1u32..7, m in 1u32..7, phi in -7.0f64..7.0) {
            let one = Topology::separated(Orientation::I, n, m).unwrap();
            let two = Topology::separated(Orientation::II, m, n).unwrap();
            let x = coupling_matrix_bruteforce(&one, phi, 1.0);
            let y = coupling_matrix_bruteforce(&two, phi, 1.0);
            prop_assert!((x[0][0] - y[1][1]).norm() < 1e-12);
            prop_assert!((x[1][0] - y[0][1]).norm() < 1e-12);
        }
    }
}
