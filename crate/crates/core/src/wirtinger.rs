//! Mixed Wirtinger derivative jets of real-valued potentials.
//!
//! `WirtingerJet` stores D^{alpha,beta} phi(z) = d^alpha dbar^beta phi(z) for
//! all pairs with |alpha| + |beta| <= order. Since phi is real, the
//! coefficients satisfy D^{beta,alpha} = conj(D^{alpha,beta}); construction
//! canonicalizes the stored values so that this holds exactly.
//!
//! `fd_jet` is the adapter for black-box potentials: central differences in
//! each real coordinate combined into Wirtinger derivatives via
//! d = (d_x - i d_y)/2 and dbar = (d_x + i d_y)/2, with one Richardson halving.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::multi_index::{graded_pairs, MultiIndex};
use crate::taylor::TaylorPoly;

#[derive(Clone, Debug)]
pub struct WirtingerJet {
    n: usize,
    order: usize,
    point: Vec<Complex64>,
    coeffs: HashMap<(MultiIndex, MultiIndex), Complex64>,
}

impl WirtingerJet {
    /// Build from raw coefficients, enforcing conjugate symmetry by averaging
    /// each coefficient with the conjugate of its mirror.
    pub fn from_raw(
        point: Vec<Complex64>,
        order: usize,
        raw: HashMap<(MultiIndex, MultiIndex), Complex64>,
    ) -> Self {
        let n = point.len();
        let mut coeffs = HashMap::with_capacity(raw.len());
        for (&(a, b), &v) in raw.iter() {
            if coeffs.contains_key(&(a, b)) {
                continue;
            }
            let merged = match raw.get(&(b, a)) {
                Some(&w) if (b, a) != (a, b) => (v + w.conj()) * 0.5,
                Some(_) => Complex64::new(v.re, 0.0), // diagonal: force real
                None => v,
            };
            if merged.norm_sqr() != 0.0 {
                coeffs.insert((a, b), merged);
                if (b, a) != (a, b) {
                    coeffs.insert((b, a), merged.conj());
                }
            }
        }
        WirtingerJet {
            n,
            order,
            point,
            coeffs,
        }
    }

    /// Convert a Taylor expansion into derivative coefficients
    /// (D^{alpha,beta} = coefficient * alpha! * beta!).
    pub(crate) fn from_taylor(point: Vec<Complex64>, order: usize, poly: &TaylorPoly) -> Self {
        let mut raw = HashMap::new();
        for (&(a, b), &c) in poly.entries() {
            raw.insert((a, b), c * (a.factorial() * b.factorial()));
        }
        Self::from_raw(point, order, raw)
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn point(&self) -> &[Complex64] {
        &self.point
    }

    /// phi(z); real by construction.
    pub fn value(&self) -> f64 {
        self.coeff(MultiIndex::zero(self.n), MultiIndex::zero(self.n))
            .re
    }

    pub fn coeff(&self, alpha: MultiIndex, beta: MultiIndex) -> Complex64 {
        self.coeffs
            .get(&(alpha, beta))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Derivative by direction lists: `deriv(&[i, k], &[j])` is
    /// d_i d_k dbar_j phi(z).
    pub fn deriv(&self, holo: &[usize], anti: &[usize]) -> Complex64 {
        self.coeff(
            MultiIndex::from_dirs(self.n, holo),
            MultiIndex::from_dirs(self.n, anti),
        )
    }

    /// All coefficients in graded lexicographic order.
    pub fn entries(&self) -> Vec<((MultiIndex, MultiIndex), Complex64)> {
        graded_pairs(self.n, self.order)
            .into_iter()
            .map(|(a, b)| ((a, b), self.coeff(a, b)))
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Maximum order supported by the finite-difference path.
pub const FD_MAX_ORDER: usize = 4;

/// Default base step for `fd_jet`: 1e-3 scaled by the point magnitude.
pub fn default_fd_step(z: &[Complex64]) -> f64 {
    let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    1e-3 * norm.max(1.0)
}

/// Finite-difference Wirtinger jet of a black-box real function.
///
/// `h` is the base step, used as-is for first and second derivatives; third
/// and fourth derivatives widen it (4h, 10h) to keep the roundoff
/// amplification of high-order stencils below the truncation error.
pub fn fd_jet<F>(phi: F, z: &[Complex64], order: usize, h: f64) -> Result<WirtingerJet>
where
    F: Fn(&[Complex64]) -> f64,
{
    if order > FD_MAX_ORDER {
        return Err(Error::UnsupportedOrder {
            got: order,
            max: FD_MAX_ORDER,
        });
    }
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("fd step must be positive".into()));
    }
    let n = z.len();
    let mut raw = HashMap::new();
    for (a, b) in graded_pairs(n, order) {
        let k = a.degree() + b.degree();
        let step = match k {
            0..=2 => h,
            3 => 4.0 * h,
            _ => 10.0 * h,
        };
        let holo = a.dirs();
        let anti = b.dirs();
        let coarse = wirtinger_fd(&phi, z, &holo, &anti, step)?;
        let fine = wirtinger_fd(&phi, z, &holo, &anti, step / 2.0)?;
        // one Richardson halving: leading O(step^2) error cancels
        raw.insert((a, b), (fine * 4.0 - coarse) / 3.0);
    }
    Ok(WirtingerJet::from_raw(z.to_vec(), order, raw))
}

/// Iterated central differences: peel one Wirtinger derivative at a time.
fn wirtinger_fd<F>(
    phi: &F,
    z: &[Complex64],
    holo: &[usize],
    anti: &[usize],
    h: f64,
) -> Result<Complex64>
where
    F: Fn(&[Complex64]) -> f64,
{
    if let Some((&i, rest)) = holo.split_first() {
        let (dx, dy) = central_pair(phi, z, i, rest, anti, h)?;
        return Ok((dx - Complex64::i() * dy) * 0.5);
    }
    if let Some((&j, rest)) = anti.split_first() {
        let (dx, dy) = central_pair(phi, z, j, holo, rest, h)?;
        return Ok((dx + Complex64::i() * dy) * 0.5);
    }
    let v = phi(z);
    if !v.is_finite() {
        return Err(Error::Evaluation(format!("{z:?}")));
    }
    Ok(Complex64::new(v, 0.0))
}

fn central_pair<F>(
    phi: &F,
    z: &[Complex64],
    coord: usize,
    holo: &[usize],
    anti: &[usize],
    h: f64,
) -> Result<(Complex64, Complex64)>
where
    F: Fn(&[Complex64]) -> f64,
{
    let mut zp = z.to_vec();
    let eval = |zp: &mut Vec<Complex64>, delta: Complex64| -> Result<Complex64> {
        zp[coord] = z[coord] + delta;
        let v = wirtinger_fd(phi, zp, holo, anti, h);
        zp[coord] = z[coord];
        v
    };
    let xp = eval(&mut zp, Complex64::new(h, 0.0))?;
    let xm = eval(&mut zp, Complex64::new(-h, 0.0))?;
    let yp = eval(&mut zp, Complex64::new(0.0, h))?;
    let ym = eval(&mut zp, Complex64::new(0.0, -h))?;
    Ok(((xp - xm) / (2.0 * h), (yp - ym) / (2.0 * h)))
}
