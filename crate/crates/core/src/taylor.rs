//! Truncated mixed Taylor expansions in (u, conj(u)).
//!
//! The coefficient stored at (alpha, beta) is the Taylor coefficient, i.e.
//! D^{alpha,beta} f / (alpha! beta!). All operations truncate at the
//! polynomial's total order. This is the closed-form chain-rule engine behind
//! the analytic jets: log-of-quadratic potentials and composed (gauge
//! normalized) potentials reduce to products, powers, logarithms, and
//! holomorphic substitutions of these polynomials.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;

#[derive(Clone, Debug)]
pub(crate) struct TaylorPoly {
    n: usize,
    order: usize,
    coeffs: HashMap<(MultiIndex, MultiIndex), Complex64>,
}

impl TaylorPoly {
    pub fn zero(n: usize, order: usize) -> Self {
        TaylorPoly {
            n,
            order,
            coeffs: HashMap::new(),
        }
    }

    pub fn constant(n: usize, order: usize, c: Complex64) -> Self {
        let mut p = Self::zero(n, order);
        p.set(MultiIndex::zero(n), MultiIndex::zero(n), c);
        p
    }



    pub fn get(&self, a: MultiIndex, b: MultiIndex) -> Complex64 {
        self.coeffs
            .get(&(a, b))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn set(&mut self, a: MultiIndex, b: MultiIndex, c: Complex64) {
        if a.degree() + b.degree() <= self.order {
            if c.norm_sqr() == 0.0 {
                self.coeffs.remove(&(a, b));
            } else {
                self.coeffs.insert((a, b), c);
            }
        }
    }

    pub fn add_to(&mut self, a: MultiIndex, b: MultiIndex, c: Complex64) {
        if a.degree() + b.degree() <= self.order {
            *self
                .coeffs
                .entry((a, b))
                .or_insert(Complex64::new(0.0, 0.0)) += c;
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(MultiIndex, MultiIndex), &Complex64)> {
        self.coeffs.iter()
    }

    pub fn add(&self, other: &TaylorPoly) -> TaylorPoly {
        debug_assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (&(a, b), &c) in other.coeffs.iter() {
            out.add_to(a, b, c);
        }
        out
    }

    pub fn sub(&self, other: &TaylorPoly) -> TaylorPoly {
        let mut out = self.clone();
        for (&(a, b), &c) in other.coeffs.iter() {
            out.add_to(a, b, -c);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> TaylorPoly {
        let mut out = Self::zero(self.n, self.order);
        for (&(a, b), &c) in self.coeffs.iter() {
            out.set(a, b, c * s);
        }
        out
    }

    pub fn mul(&self, other: &TaylorPoly) -> TaylorPoly {
        debug_assert_eq!(self.n, other.n);
        let order = self.order.min(other.order);
        let mut out = Self::zero(self.n, order);
        for (&(a1, b1), &c1) in self.coeffs.iter() {
            let d1 = a1.degree() + b1.degree();
            if d1 > order {
                continue;
            }
            for (&(a2, b2), &c2) in other.coeffs.iter() {
                if d1 + a2.degree() + b2.degree() > order {
                    continue;
                }
                out.add_to(a1.add(&a2), b1.add(&b2), c1 * c2);
            }
        }
        out
    }

    /// Mirror (alpha, beta) -> (beta, alpha) with conjugated coefficients.
    /// This is the expansion of conj(f) when `self` expands f.
    pub fn conj_mirror(&self) -> TaylorPoly {
        let mut out = Self::zero(self.n, self.order);
        for (&(a, b), &c) in self.coeffs.iter() {
            out.set(b, a, c.conj());
        }
        out
    }

    /// True if only (alpha, 0) coefficients are present.
    pub fn is_holomorphic(&self) -> bool {
        self.coeffs.keys().all(|(_, b)| b.degree() == 0)
    }

    /// log of a polynomial with positive constant term, truncated.
    pub fn log(&self) -> Result<TaylorPoly> {
        let zero = MultiIndex::zero(self.n);
        let q0 = self.get(zero, zero);
        if !(q0.re > 0.0) || q0.im.abs() > 1e-12 * (1.0 + q0.re.abs()) {
            return Err(Error::Domain(format!(
                "log argument {q0} is not positive"
            )));
        }
        let mut delta = self.clone();
        delta.set(zero, zero, Complex64::new(0.0, 0.0));
        let mut out = Self::constant(self.n, self.order, Complex64::new(q0.re.ln(), 0.0));
        // log(q0 + d) = log q0 + sum_k (-1)^{k+1} d^k / (k q0^k)
        let mut power = Self::constant(self.n, self.order, Complex64::new(1.0, 0.0));
        let mut q0k = Complex64::new(1.0, 0.0);
        for k in 1..=self.order {
            power = power.mul(&delta);
            q0k *= q0;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            out = out.add(&power.scale(Complex64::new(sign, 0.0) / (k as f64 * q0k)));
        }
        Ok(out)
    }

    /// Substitute u_i := subs[i](x), conj(u_i) := conj(subs[i])(x), where each
    /// subs[i] is a purely holomorphic polynomial with zero constant term.
    /// The result is expanded in the substitution variables.
    pub fn substitute_holomorphic(&self, subs: &[TaylorPoly]) -> TaylorPoly {
        assert_eq!(subs.len(), self.n);
        let m = subs.first().map(|p| p.n).unwrap_or(self.n);
        let order = self.order;
        for s in subs {
            debug_assert!(s.is_holomorphic(), "substitution must be holomorphic");
            debug_assert_eq!(
                s.get(MultiIndex::zero(m), MultiIndex::zero(m)).norm_sqr(),
                0.0,
                "substitution must have zero constant term"
            );
        }
        // Cache powers of each substitution polynomial and their conjugates.
        let one = TaylorPoly::constant(m, order, Complex64::new(1.0, 0.0));
        let mut pow_h: Vec<Vec<TaylorPoly>> = Vec::with_capacity(self.n);
        for s in subs {
            let mut powers = vec![one.clone()];
            for e in 1..=order {
                powers.push(powers[e - 1].mul(s));
            }
            pow_h.push(powers);
        }
        let pow_a: Vec<Vec<TaylorPoly>> = pow_h
            .iter()
            .map(|ps| ps.iter().map(|p| p.conj_mirror()).collect())
            .collect();

        let mut out = TaylorPoly::zero(m, order);
        for (&(a, b), &c) in self.coeffs.iter() {
            if a.degree() + b.degree() > order {
                continue;
            }
            let mut term = TaylorPoly::constant(m, order, c);
            for i in 0..self.n {
                let e = a.entry(i);
                if e > 0 {
                    term = term.mul(&pow_h[i][e]);
                }
                let e = b.entry(i);
                if e > 0 {
                    term = term.mul(&pow_a[i][e]);
                }
            }
            out = out.add(&term);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn log_of_one_plus_u_ubar() {
        // log(1 + u ubar) = u ubar - (u ubar)^2 / 2 + ... in dimension 1
        let n = 1;
        let mut q = TaylorPoly::constant(n, 4, c(1.0, 0.0));
        q.set(MultiIndex::unit(n, 0), MultiIndex::unit(n, 0), c(1.0, 0.0));
        let l = q.log().unwrap();
        let e1 = MultiIndex::unit(n, 0);
        let e2 = MultiIndex::from_exps(&[2]);
        assert!((l.get(e1, e1) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((l.get(e2, e2) - c(-0.5, 0.0)).norm() < 1e-15);
        assert!(l.get(e1, MultiIndex::zero(n)).norm() < 1e-15);
    }

    #[test]
    fn log_rejects_nonpositive() {
        let q = TaylorPoly::constant(1, 2, c(-0.5, 0.0));
        assert!(q.log().is_err());
    }

    #[test]
    fn substitution_chain_rule() {
        // f(u) = u ubar, substitute u := 2x + x^2: coefficient of x xbar is 4.
        let n = 1;
        let mut f = TaylorPoly::zero(n, 3);
        f.set(MultiIndex::unit(n, 0), MultiIndex::unit(n, 0), c(1.0, 0.0));
        let mut p = TaylorPoly::zero(n, 3);
        p.set(MultiIndex::unit(n, 0), MultiIndex::zero(n), c(2.0, 0.0));
        p.set(MultiIndex::from_exps(&[2]), MultiIndex::zero(n), c(1.0, 0.0));
        let g = f.substitute_holomorphic(&[p]);
        let e1 = MultiIndex::unit(n, 0);
        assert!((g.get(e1, e1) - c(4.0, 0.0)).norm() < 1e-15);
        // coefficient of x^2 xbar = 2 * conj-part: (x^2)(conj 2x) -> 2
        assert!((g.get(MultiIndex::from_exps(&[2]), e1) - c(2.0, 0.0)).norm() < 1e-15);
    }
}
