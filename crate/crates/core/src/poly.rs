//! Integer polynomials in `w = e^{i phi}` for removing common factors of
//! the off-diagonal pair sums.

use alloc::vec::Vec;

use crate::C64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct IntPoly(pub(crate) Vec<i128>);

fn gcd_i(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl IntPoly {
    fn trimmed(mut self) -> Self {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> i128 {
        *self.0.last().unwrap_or(&0)
    }

    fn primitive(self) -> Self {
        let c = self.0.iter().fold(0, |acc, &x| gcd_i(acc, x));
        if c == 0 {
            return self;
        }
        let c = if self.lead() < 0 { -c } else { c };
        IntPoly(self.0.iter().map(|&x| x / c).collect())
    }

    /// Primitive part of the pseudo-remainder of `self` by `b`.
    fn pseudo_rem(&self, b: &IntPoly) -> Option<IntPoly> {
        let mut r = self.0.clone();
        let db = b.degree();
        let lb = b.lead();
        while r.len() > db && !r.is_empty() {
            let lr = *r.last()?;
            let shift = r.len() - 1 - db;
            for x in r.iter_mut() {
                *x = x.checked_mul(lb)?;
            }
            for (k, &bk) in b.0.iter().enumerate() {
                r[k + shift] = r[k + shift].checked_sub(lr.checked_mul(bk)?)?;
            }
            r.pop();
            while r.last() == Some(&0) {
                r.pop();
            }
            r = IntPoly(r).primitive().0;
        }
        Some(IntPoly(r).trimmed())
    }

    /// Quotient of an exact division over the integers.
    fn div_exact(&self, b: &IntPoly) -> Option<IntPoly> {
        let mut r = self.0.clone();
        let db = b.degree();
        let lb = b.lead();
        if r.len() <= db {
            return None;
        }
        let mut q = alloc::vec![0i128; r.len() - db];
        while r.len() > db {
            let lr = *r.last()?;
            if lr % lb != 0 {
                return None;
            }
            let c = lr / lb;
            let shift = r.len() - 1 - db;
            q[shift] = c;
            for (k, &bk) in b.0.iter().enumerate() {
                r[k + shift] = r[k + shift].checked_sub(c.checked_mul(bk)?)?;
            }
            r.pop();
        }
        r.iter().all(|&x| x == 0).then_some(IntPoly(q))
    }

    pub(crate) fn eval(&self, w: C64) -> C64 {
        self.0
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * w + c as f64)
    }
}

/// Primitive greatest common divisor, `None` on coefficient overflow.
fn gcd(a: &IntPoly, b: &IntPoly) -> Option<IntPoly> {
    let mut x = a.clone().trimmed().primitive();
    let mut y = b.clone().trimmed().primitive();
    if x.degree() < y.degree() {
        core::mem::swap(&mut x, &mut y);
    }
    while !y.is_zero() {
        let r = x.pseudo_rem(&y)?;
        x = y;
        y = r;
    }
    Some(x.primitive())
}

/// Divides both polynomials by their common factor. Falls back to the
/// inputs if either is zero or the arithmetic would overflow.
pub(crate) fn cancel_common(a: IntPoly, b: IntPoly) -> (IntPoly, IntPoly) {
    let (a, b) = (a.trimmed(), b.trimmed());
    if a.is_zero() || b.is_zero() {
        return (a, b);
    }
    let reduced = gcd(&a, &b).and_then(|g| {
        if g.degree() == 0 {
            return None;
        }
        Some((a.div_exact(&g)?, b.div_exact(&g)?))
    });
    reduced.unwrap_or((a, b))
}
