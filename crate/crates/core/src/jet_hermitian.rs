//! Hermitian forms on 1-jets in the global frame {j(1), j(z^1), ..., j(z^n)}.
//!
//! With h = exp(-phi) the positive form is
//!
//!   H(j(u), j(v)) = h (u vbar) + h <grad u, grad v>_g,   grad u = du - u dphi,
//!
//! and the signature-(1,n) form on jets of the dual trivialization is
//!
//!   K(j(u), j(v)) = h^{-1} (u vbar) - h^{-1} <grad* u, grad* v>_g,
//!   grad* u = du + u dphi,
//!
//! where <a, b>_g = g^{p qbar} a_p conj(b_q). Both are evaluated for
//! u, v in {1, z^1, ..., z^n}, which stay linearly independent on the whole
//! coordinate ball, so the matrices are global fields.
//!
//! The dual form of a matrix M is (M^{-1})^t; the dual-basis ordering behind
//! this transpose is pinned downstream by the chart-convention anchor tests.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kahler::metric_at;
use crate::potential::KahlerPotential;
use crate::wirtinger::WirtingerJet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    /// Positive-definite form on jets of the potential's trivialization.
    H,
    /// Signature-(1,n) form on jets of the dual trivialization.
    K,
}

impl FormKind {
    pub fn name(&self) -> &'static str {
        match self {
            FormKind::H => "h",
            FormKind::K => "k",
        }
    }
}

#[derive(Clone, Debug)]
pub struct JetHermitianMatrix {
    pub point: Vec<Complex64>,
    pub form_kind: FormKind,
    /// (n+1) x (n+1), entry (a, b) is the form on (frame_a, frame_b);
    /// Hermitian exactly as constructed.
    pub matrix: DMatrix<Complex64>,
}

/// Dual-frame components of a covector sample; the canonical section that
/// evaluates jets at their base point has components (1, z^1, ..., z^n).
#[derive(Clone, Debug)]
pub struct DualVectorSample {
    pub point: Vec<Complex64>,
    pub components: Vec<Complex64>,
}

impl DualVectorSample {
    pub fn canonical(z: &[Complex64]) -> Self {
        let mut components = vec![Complex64::new(1.0, 0.0)];
        components.extend_from_slice(z);
        DualVectorSample {
            point: z.to_vec(),
            components,
        }
    }
}

/// Covector coefficients of the frame elements u in {1, z^1, ..., z^n}:
/// value u(z) and the 1-form components of du + s * u * dphi.
fn frame_data(
    jet: &WirtingerJet,
    sign: f64,
) -> (Vec<Complex64>, Vec<Vec<Complex64>>) {
    let n = jet.dimension();
    let z = jet.point();
    let dphi: Vec<Complex64> = (0..n).map(|p| jet.deriv(&[p], &[])).collect();
    let mut values = Vec::with_capacity(n + 1);
    let mut grads = Vec::with_capacity(n + 1);
    // u = 1
    values.push(Complex64::new(1.0, 0.0));
    grads.push(dphi.iter().map(|d| d * sign).collect());
    // u = z^i
    for i in 0..n {
        values.push(z[i]);
        let mut g: Vec<Complex64> = dphi.iter().map(|d| d * sign * z[i]).collect();
        g[i] += 1.0;
        grads.push(g);
    }
    (values, grads)
}

fn assemble(
    jet: &WirtingerJet,
    weight: f64,
    grad_sign: f64,
    pairing_sign: f64,
    kind: FormKind,
) -> Result<JetHermitianMatrix> {
    if jet.order() < 2 {
        return Err(Error::InvalidArgument(
            "jet of order >= 2 required to build a jet form".into(),
        ));
    }
    let n = jet.dimension();
    let metric = metric_at(jet)?;
    let (values, grads) = frame_data(jet, grad_sign);
    // weight = +1 builds with h, weight = -1 with h^{-1}
    let h = (weight * -jet.value()).exp();
    let mut m = DMatrix::from_element(n + 1, n + 1, Complex64::new(0.0, 0.0));
    for a in 0..=n {
        for b in 0..=a {
            let mut inner = Complex64::new(0.0, 0.0);
            for p in 0..n {
                for q in 0..n {
                    inner += metric.g_upper[(p, q)] * grads[a][p] * grads[b][q].conj();
                }
            }
            let val = (values[a] * values[b].conj() + pairing_sign * inner) * h;
            m[(a, b)] = val;
            m[(b, a)] = val.conj();
        }
    }
    // diagonal entries are real by construction of the loop above
    for a in 0..=n {
        m[(a, a)] = Complex64::new(m[(a, a)].re, 0.0);
    }
    Ok(JetHermitianMatrix {
        point: jet.point().to_vec(),
        form_kind: kind,
        matrix: m,
    })
}

/// The positive-definite jet form at the jet's base point.
pub fn h_matrix_at(jet: &WirtingerJet) -> Result<JetHermitianMatrix> {
    let out = assemble(jet, 1.0, -1.0, 1.0, FormKind::H)?;
    if crate::linalg::hermitian_cholesky(&out.matrix).is_none() {
        return Err(Error::NotKahler(format!(
            "jet form not positive definite at {:?}",
            out.point
        )));
    }
    Ok(out)
}

/// The signature-(1,n) jet form at the jet's base point. The signature is not
/// enforced here; use `signature_of` to classify (diagnostic value).
pub fn k_matrix_at(jet: &WirtingerJet) -> Result<JetHermitianMatrix> {
    assemble(jet, -1.0, 1.0, -1.0, FormKind::K)
}

/// Evaluate the induced dual form on a covector: with M the form matrix, the
/// dual matrix is (M^{-1})^t and the value is
/// sum_{a,b} dual_{a b} v_a conj(v_b). Real for Hermitian M.
pub fn dual_quadratic(m: &JetHermitianMatrix, v: &DualVectorSample) -> Result<f64> {
    let dual = m
        .matrix
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularMatrix("dual_quadratic".into()))?
        .transpose();
    let k = v.components.len();
    if k != m.matrix.nrows() {
        return Err(Error::InvalidArgument(
            "covector dimension mismatch".into(),
        ));
    }
    let mut out = Complex64::new(0.0, 0.0);
    for a in 0..k {
        for b in 0..k {
            out += dual[(a, b)] * v.components[a] * v.components[b].conj();
        }
    }
    Ok(out.re)
}

/// Residuals of the exact quotient identities: restricting the dual of the
/// positive form to the canonical covector gives exp(phi), and restricting
/// the dual of the (1,n) form gives exp(-phi). Both vanish identically for
/// every Kähler potential, with no curvature assumption.
pub fn quotient_identity_residual(jet: &WirtingerJet) -> Result<(f64, f64)> {
    let v = DualVectorSample::canonical(jet.point());
    let h = h_matrix_at(jet)?;
    let k = k_matrix_at(jet)?;
    let phi = jet.value();
    let rh = (dual_quadratic(&h, &v)? - phi.exp()).abs();
    let rk = (dual_quadratic(&k, &v)? - (-phi).exp()).abs();
    Ok((rh, rk))
}

/// (positive, negative) eigenvalue counts of a Hermitian matrix. Eigenvalues
/// below 1e-10 * ||M||_inf in magnitude are reported as degeneracy errors.
pub fn signature_of(m: &JetHermitianMatrix) -> Result<(usize, usize)> {
    let norm = m.matrix.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let threshold = 1e-10 * norm.max(1e-300);
    let eig = SymmetricEigen::new(m.matrix.clone());
    let mut pos = 0;
    let mut neg = 0;
    for &lambda in eig.eigenvalues.iter() {
        if lambda.abs() < threshold {
            return Err(Error::DegenerateForm {
                eigenvalue: lambda,
                threshold,
            });
        }
        if lambda > 0.0 {
            pos += 1;
        } else {
            neg += 1;
        }
    }
    Ok((pos, neg))
}

/// Matrix field z -> H(z) built from analytic order-2 jets.
pub fn h_field<P: KahlerPotential>(
    pot: &P,
) -> impl Fn(&[Complex64]) -> Result<DMatrix<Complex64>> + '_ {
    move |z| Ok(h_matrix_at(&pot.eval_jet(z, 2)?)?.matrix)
}

/// Matrix field z -> K(z) built from analytic order-2 jets.
pub fn k_field<P: KahlerPotential>(
    pot: &P,
) -> impl Fn(&[Complex64]) -> Result<DMatrix<Complex64>> + '_ {
    move |z| Ok(k_matrix_at(&pot.eval_jet(z, 2)?)?.matrix)
}

pub fn field_of<P: KahlerPotential>(
    pot: &P,
    kind: FormKind,
) -> impl Fn(&[Complex64]) -> Result<DMatrix<Complex64>> + '_ {
    move |z| {
        let jet = pot.eval_jet(z, 2)?;
        match kind {
            FormKind::H => Ok(h_matrix_at(&jet)?.matrix),
            FormKind::K => Ok(k_matrix_at(&jet)?.matrix),
        }
    }
}
