//! Fixed-size complex matrices for the two-mode response.

use crate::C64;

pub type Mat2 = [[C64; 2]; 2];
pub type Mat2x5 = [[C64; 5]; 2];

const SINGULAR_RTOL: f64 = 1e-14;

pub(crate) fn zero2() -> Mat2 {
    [[C64::new(0.0, 0.0); 2]; 2]
}

pub(crate) fn det2(a: &Mat2) -> C64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Largest entry modulus.
pub(crate) fn max_abs<const N: usize>(m: &[[C64; N]; 2]) -> f64 {
    m.iter()
        .flat_map(|row| row.iter())
        .fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Adjugate inverse, `None` when `|det| < 1e-14 * max|a|^2`.
pub(crate) fn inv2(a: &Mat2) -> Option<Mat2> {
    let det = det2(a);
    let scale = max_abs(a);
    if !(det.norm() >= SINGULAR_RTOL * scale * scale) || det.norm() == 0.0 {
        return None;
    }
    Some([
        [a[1][1] / det, -a[0][1] / det],
        [-a[1][0] / det, a[0][0] / det],
    ])
}

pub(crate) fn mul2x5(a: &Mat2, b: &Mat2x5) -> Mat2x5 {
    let mut out = [[C64::new(0.0, 0.0); 5]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// `m m^†` for a 2x5 matrix.
pub(crate) fn gram(m: &Mat2x5) -> Mat2 {
    let mut out = zero2();
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = (0..5).map(|k| m[i][k] * m[j][k].conj()).sum();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn inverse_times_matrix_is_identity() {
        let a = [[c(1.0, 2.0), c(-0.5, 0.3)], [c(0.7, -1.1), c(-2.0, 0.4)]];
        let inv = inv2(&a).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let p: C64 = (0..2).map(|k| a[i][k] * inv[k][j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((p - c(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn rank_one_matrix_is_singular() {
        let a = [[c(1.0, 1.0), c(2.0, 2.0)], [c(0.5, 0.5), c(1.0, 1.0)]];
        assert!(inv2(&a).is_none());
        assert!(inv2(&zero2()).is_none());
    }

    #[test]
    fn gram_is_hermitian() {
        let mut m = [[c(0.0, 0.0); 5]; 2];
        for (k, z) in m[0].iter_mut().enumerate() {
            *z = c(k as f64, 1.0 - k as f64);
        }
        for (k, z) in m[1].iter_mut().enumerate() {
            *z = c(0.5 * k as f64, 2.0);
        }
        let g = gram(&m);
        assert!((g[0][1] - g[1][0].conj()).norm() < 1e-14);
        assert!(g[0][0].im.abs() < 1e-14);
    }
}
