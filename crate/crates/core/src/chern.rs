//! Chern connection and curvature of a Hermitian matrix field in a
//! holomorphic frame, by nested central differences.
//!
//! For a field z -> M(z) the connection is theta_k = (d_k M) M^{-1} and the
//! curvature blocks are Omega_{k lbar} = dbar_l theta_k. Field evaluations
//! are exact (analytic order-2 jets), so two nested first-order stencils with
//! one Richardson halving reach ~1e-9 on flat fields.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::max_abs;

/// Verdict threshold: a field counts as flat below this.
pub const FLAT_TOL: f64 = 1e-4;
/// A field counts as definitely non-flat above this; the gap is inconclusive.
pub const NONFLAT_TOL: f64 = 1e-2;

/// Default step for field differentiation, scaled by the point magnitude.
pub fn default_field_step(z: &[Complex64]) -> f64 {
    let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    1e-3 * norm.max(1.0)
}

/// dz^k-components of the connection form at a point.
#[derive(Clone, Debug)]
pub struct ConnectionForm {
    pub point: Vec<Complex64>,
    /// `theta[k] = (d_k M) M^{-1}`; type (1,0) by construction.
    pub theta: Vec<DMatrix<Complex64>>,
}

/// dz^k wedge dzbar^l components of the curvature form at a point.
#[derive(Clone, Debug)]
pub struct CurvatureForm {
    pub point: Vec<Complex64>,
    /// `omega[k][l] = dbar_l theta_k`.
    pub omega: Vec<Vec<DMatrix<Complex64>>>,
}

impl CurvatureForm {
    pub fn max_abs(&self) -> f64 {
        self.omega
            .iter()
            .flatten()
            .map(max_abs)
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlatnessVerdict {
    Flat,
    NonFlat,
    Inconclusive,
}

pub fn flatness_verdict(norm: f64, flat_tol: f64, nonflat_tol: f64) -> FlatnessVerdict {
    if norm < flat_tol {
        FlatnessVerdict::Flat
    } else if norm > nonflat_tol {
        FlatnessVerdict::NonFlat
    } else {
        FlatnessVerdict::Inconclusive
    }
}

/// Wirtinger derivative of a matrix field in coordinate `k`, entrywise
/// central differences with one Richardson halving. `conjugate` selects
/// dbar_k instead of d_k.
pub fn wirtinger_d_matrix<F>(
    field: &F,
    z: &[Complex64],
    k: usize,
    step: f64,
    conjugate: bool,
) -> Result<DMatrix<Complex64>>
where
    F: Fn(&[Complex64]) -> Result<DMatrix<Complex64>>,
{
    let coarse = wirtinger_d_once(field, z, k, step, conjugate)?;
    let fine = wirtinger_d_once(field, z, k, step / 2.0, conjugate)?;
    Ok((fine * Complex64::new(4.0, 0.0) - coarse) / Complex64::new(3.0, 0.0))
}

fn wirtinger_d_once<F>(
    field: &F,
    z: &[Complex64],
    k: usize,
    h: f64,
    conjugate: bool,
) -> Result<DMatrix<Complex64>>
where
    F: Fn(&[Complex64]) -> Result<DMatrix<Complex64>>,
{
    let mut zp = z.to_vec();
    let mut at = |delta: Complex64| -> Result<DMatrix<Complex64>> {
        zp[k] = z[k] + delta;
        let m = field(&zp);
        zp[k] = z[k];
        m
    };
    let xp = at(Complex64::new(h, 0.0))?;
    let xm = at(Complex64::new(-h, 0.0))?;
    let yp = at(Complex64::new(0.0, h))?;
    let ym = at(Complex64::new(0.0, -h))?;
    let dx = (xp - xm) / Complex64::new(2.0 * h, 0.0);
    let dy = (yp - ym) / Complex64::new(2.0 * h, 0.0);
    let i = Complex64::i();
    Ok(if conjugate {
        (dx + dy * i) * Complex64::new(0.5, 0.0)
    } else {
        (dx - dy * i) * Complex64::new(0.5, 0.0)
    })
}

/// Mixed second derivative d_k dbar_l of a matrix field (entrywise), nested
/// stencils with Richardson at both levels.
pub fn mixed_second_matrix<F>(
    field: &F,
    z: &[Complex64],
    k: usize,
    l: usize,
    step: f64,
) -> Result<DMatrix<Complex64>>
where
    F: Fn(&[Complex64]) -> Result<DMatrix<Complex64>>,
{
    let inner = |w: &[Complex64]| wirtinger_d_matrix(field, w, k, step, false);
    wirtinger_d_matrix(&inner, z, l, step, true)
}

pub fn connection_at<F>(field: &F, z: &[Complex64], step: f64) -> Result<ConnectionForm>
where
    F: Fn(&[Complex64]) -> Result<DMatrix<Complex64>>,
{
    let m = field(z)?;
    let m_inv = m
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularMatrix(format!("field at {z:?}")))?;
    let n = z.len();
    let mut theta = Vec::with_capacity(n);
    for k in 0..n {
        let dm = wirtinger_d_matrix(field, z, k, step, false)?;
        theta.push(&dm * &m_inv);
    }
    Ok(ConnectionForm {
        point: z.to_vec(),
        theta,
    })
}

pub fn curvature_at<F>(field: &F, z: &[Complex64], step: f64) -> Result<CurvatureForm>
where
    F: Fn(&[Complex64]) -> Result<DMatrix<Complex64>>,
{
    let n = z.len();
    let mut omega = Vec::with_capacity(n);
    for k in 0..n {
        let theta_k = |w: &[Complex64]| -> Result<DMatrix<Complex64>> {
            let m = field(w)?;
            let m_inv = m
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::SingularMatrix(format!("field at {w:?}")))?;
            let dm = wirtinger_d_matrix(field, w, k, step, false)?;
            Ok(&dm * &m_inv)
        };
        let mut row = Vec::with_capacity(n);
        for l in 0..n {
            row.push(wirtinger_d_matrix(&theta_k, z, l, step, true)?);
        }
        omega.push(row);
    }
    Ok(CurvatureForm {
        point: z.to_vec(),
        omega,
    })
}

/// Max entry modulus over all curvature blocks, normalized by
/// max(1, ||field(z)||_inf).
pub fn flatness_norm<F>(field: &F, z: &[Complex64], step: f64) -> Result<f64>
where
    F: Fn(&[Complex64]) -> Result<DMatrix<Complex64>>,
{
    let curv = curvature_at(field, z, step)?;
    let scale = max_abs(&field(z)?).max(1.0);
    Ok(curv.max_abs() / scale)
}
