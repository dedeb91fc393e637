//! Parallel frames of a flat jet-form field and the induced developing map.
//!
//! A parallel section with coefficients c in the jet frame satisfies
//! dc/dt = -theta(gamma')^t c along a path. Transport uses classical RK4 with
//! a fixed step count per unit length; accuracy is monitored through the
//! invariant it must preserve, the Gram matrix A^t M conj(A) of the frame
//! (with M_{ab} the form on (frame_a, frame_b), linear in the first slot).
//!
//! The developing map re-expresses the canonical covector (1, z^1, ..., z^n)
//! in the dual of a parallel orthonormal frame: w = A^t (1, z). A constant
//! normalizing transformation (unitary for the positive form, form-preserving
//! for the (1,n) form, then a positive scalar) fixes w(0) = (1, 0, ..., 0).
//! For the model potentials w is proportional to (1, z) itself, which pins the
//! dual-basis conventions; any transpose or conjugation slip breaks those
//! anchor tests loudly.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::chern::{connection_at, flatness_norm, FLAT_TOL};
use crate::error::{Error, Result};
use crate::jet_hermitian::{field_of, FormKind};
use crate::kahler::metric_at;
use crate::linalg::{hermitian_cholesky, invert_lower_triangular, max_abs};
use crate::potential::KahlerPotential;

/// Piecewise-linear path in coordinate space.
#[derive(Clone, Debug)]
pub struct PathSpec {
    vertices: Vec<Vec<Complex64>>,
}

impl PathSpec {
    pub fn polyline(vertices: Vec<Vec<Complex64>>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidArgument(
                "path needs at least two vertices".into(),
            ));
        }
        Ok(PathSpec { vertices })
    }

    /// Straight segment from the origin to `z`.
    pub fn radial(z: &[Complex64]) -> Self {
        let origin = vec![Complex64::new(0.0, 0.0); z.len()];
        PathSpec {
            vertices: vec![origin, z.to_vec()],
        }
    }

    /// Axis-ordered path from the origin to `z`: advance one complex
    /// coordinate at a time.
    pub fn staircase(z: &[Complex64]) -> Self {
        let n = z.len();
        let mut vertices = vec![vec![Complex64::new(0.0, 0.0); n]];
        let mut cur = vertices[0].clone();
        for i in 0..n {
            if z[i].norm_sqr() > 0.0 {
                cur[i] = z[i];
                vertices.push(cur.clone());
            }
        }
        if vertices.len() < 2 {
            vertices.push(cur);
        }
        PathSpec { vertices }
    }

    pub fn start(&self) -> &[Complex64] {
        &self.vertices[0]
    }

    pub fn end(&self) -> &[Complex64] {
        self.vertices.last().unwrap()
    }

    fn segments(&self) -> impl Iterator<Item = (&Vec<Complex64>, &Vec<Complex64>)> {
        self.vertices.iter().zip(self.vertices.iter().skip(1))
    }
}

#[derive(Clone, Debug)]
pub struct TransportParams {
    /// Step for differentiating the field inside the connection.
    pub fd_step: f64,
    /// RK4 steps per unit of path length.
    pub steps_per_unit: usize,
    /// Tolerance on the Gram drift along transported frames.
    pub rtol: f64,
}

impl Default for TransportParams {
    fn default() -> Self {
        TransportParams {
            fd_step: 1e-3,
            steps_per_unit: 200,
            rtol: 1e-6,
        }
    }
}

/// Change-of-basis field from the jet frame to a parallel frame, transported
/// from the base point. Columns of `matrix` are the parallel frame vectors.
#[derive(Clone, Debug)]
pub struct ParallelFrame {
    pub base_point: Vec<Complex64>,
    pub point: Vec<Complex64>,
    pub form_kind: FormKind,
    pub matrix: DMatrix<Complex64>,
}

/// Homogeneous-coordinate sample of the developing map.
#[derive(Clone, Debug)]
pub struct DevelopingMapSample {
    pub point: Vec<Complex64>,
    pub homogeneous: Vec<Complex64>,
}

/// Transport the columns of `a0` along `path` as parallel sections:
/// dA/dt = -theta(gamma'(t))^t A, classical RK4 with fixed steps.
pub fn transport<F>(
    field: &F,
    path: &PathSpec,
    a0: &DMatrix<Complex64>,
    params: &TransportParams,
) -> Result<DMatrix<Complex64>>
where
    F: Fn(&[Complex64]) -> Result<DMatrix<Complex64>>,
{
    let gram0 = gram(field, path.start(), a0)?;
    let mut a = a0.clone();
    for (from, to) in path.segments() {
        let length: f64 = from
            .iter()
            .zip(to.iter())
            .map(|(x, y)| (y - x).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if length == 0.0 {
            continue;
        }
        let steps = ((params.steps_per_unit as f64 * length).ceil() as usize).max(4);
        let dt = 1.0 / steps as f64;
        let velocity: Vec<Complex64> = from.iter().zip(to.iter()).map(|(x, y)| y - x).collect();
        let point_at = |t: f64| -> Vec<Complex64> {
            from.iter()
                .zip(velocity.iter())
                .map(|(x, v)| x + v * t)
                .collect()
        };
        let rhs = |t: f64, a: &DMatrix<Complex64>| -> Result<DMatrix<Complex64>> {
            let z = point_at(t);
            let conn = connection_at(field, &z, params.fd_step)?;
            let mut theta_dir =
                DMatrix::from_element(a.nrows(), a.nrows(), Complex64::new(0.0, 0.0));
            for (k, th) in conn.theta.iter().enumerate() {
                theta_dir += th * velocity[k];
            }
            Ok(-(theta_dir.transpose() * a))
        };
        // Gram drift is monitored at interior checkpoints as well as the end
        let check_every = (steps / 4).max(1);
        for s in 0..steps {
            let t = s as f64 * dt;
            let k1 = rhs(t, &a)?;
            let k2 = rhs(t + dt / 2.0, &(&a + &k1 * Complex64::new(dt / 2.0, 0.0)))?;
            let k3 = rhs(t + dt / 2.0, &(&a + &k2 * Complex64::new(dt / 2.0, 0.0)))?;
            let k4 = rhs(t + dt, &(&a + &k3 * Complex64::new(dt, 0.0)))?;
            a += (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4)
                * Complex64::new(dt / 6.0, 0.0);
            if (s + 1) % check_every == 0 || s + 1 == steps {
                let drift = max_abs(&(gram(field, &point_at((s + 1) as f64 * dt), &a)? - &gram0));
                if drift > params.rtol {
                    return Err(Error::TransportAccuracy {
                        drift,
                        rtol: params.rtol,
                        suggested_steps: params.steps_per_unit * 4,
                    });
                }
            }
        }
    }
    Ok(a)
}

/// Gram matrix of the frame columns: entry (c, d) is the form on
/// (column c, column d). With M_{ab} the form on (frame_a, frame_b), linear
/// in the first slot, this is A^t M conj(A).
fn gram<F>(field: &F, z: &[Complex64], a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>>
where
    F: Fn(&[Complex64]) -> Result<DMatrix<Complex64>>,
{
    let m = field(z)?;
    Ok(a.transpose() * m * a.conjugate())
}

/// Diagonal of the target Gram matrix: identity for the positive form,
/// diag(1, -1, ..., -1) for the (1,n) form.
fn target_gram(kind: FormKind, size: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(size, size, |r, c| {
        if r != c {
            Complex64::new(0.0, 0.0)
        } else if kind == FormKind::H || r == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(-1.0, 0.0)
        }
    })
}

/// Initial frame at the base point: columns orthonormal for the form.
/// Positive case via Cholesky; (1,n) case via Gram-Schmidt against the
/// indefinite form, positive vector first.
fn orthonormal_seed(m0: &DMatrix<Complex64>, kind: FormKind) -> Result<DMatrix<Complex64>> {
    let size = m0.nrows();
    match kind {
        FormKind::H => {
            let l = hermitian_cholesky(m0).ok_or_else(|| {
                Error::NotKahler("jet form not positive definite at base point".into())
            })?;
            // A0 = (L^t)^{-1}: then A0^t M conj(A0) = L^{-1} (L L^H) L^{-H} = I
            Ok(invert_lower_triangular(&l).transpose())
        }
        FormKind::K => {
            let pair = |x: &DVector<Complex64>, y: &DVector<Complex64>| -> Complex64 {
                (x.transpose() * m0 * y.conjugate())[(0, 0)]
            };
            let mut cols: Vec<DVector<Complex64>> = Vec::with_capacity(size);
            for j in 0..size {
                let mut v = DVector::from_fn(size, |r, _| {
                    Complex64::new(if r == j { 1.0 } else { 0.0 }, 0.0)
                });
                for (i, u) in cols.iter().enumerate() {
                    let sign = if i == 0 { 1.0 } else { -1.0 };
                    let proj = pair(&v, u) * sign;
                    v -= u * proj;
                }
                let norm2 = pair(&v, &v).re;
                if j == 0 {
                    if norm2 <= 0.0 {
                        return Err(Error::DegenerateForm {
                            eigenvalue: norm2,
                            threshold: 0.0,
                        });
                    }
                    v /= Complex64::new(norm2.sqrt(), 0.0);
                } else {
                    if norm2 >= 0.0 {
                        return Err(Error::DegenerateForm {
                            eigenvalue: norm2,
                            threshold: 0.0,
                        });
                    }
                    v /= Complex64::new((-norm2).sqrt(), 0.0);
                }
                cols.push(v);
            }
            Ok(DMatrix::from_columns(&cols))
        }
    }
}

/// Flatness precondition along the radial segment to `z`, then transport of
/// an orthonormal seed frame from the origin.
pub fn orthonormal_parallel_frame<P: KahlerPotential>(
    pot: &P,
    kind: FormKind,
    z: &[Complex64],
    params: &TransportParams,
) -> Result<ParallelFrame> {
    let n = pot.dimension();
    if z.len() != n {
        return Err(Error::InvalidArgument("target dimension mismatch".into()));
    }
    let field = field_of(pot, kind);
    for sample in 0..5 {
        let t = sample as f64 / 4.0;
        let zt: Vec<Complex64> = z.iter().map(|x| x * t).collect();
        let norm = flatness_norm(&field, &zt, params.fd_step)?;
        if norm >= FLAT_TOL {
            return Err(Error::NotFlat { norm });
        }
    }
    let origin = vec![Complex64::new(0.0, 0.0); n];
    let a0 = orthonormal_seed(&field(&origin)?, kind)?;
    let a = transport(&field, &PathSpec::radial(z), &a0, params)?;
    Ok(ParallelFrame {
        base_point: origin,
        point: z.to_vec(),
        form_kind: kind,
        matrix: a,
    })
}

/// The constant transformation (applied on the left of w) that maps the
/// developing map's value at the base point to (1, 0, ..., 0): unitary for
/// the positive case, form-preserving for the (1,n) case, then a positive
/// rescaling. Projectively this is an isometry of the model.
fn base_normalizer(w0: &[Complex64], kind: FormKind) -> Result<DMatrix<Complex64>> {
    let size = w0.len();
    let w = DVector::from_column_slice(w0);
    match kind {
        FormKind::H => {
            let norm = w.norm();
            if norm == 0.0 {
                return Err(Error::InvalidArgument("zero developing vector".into()));
            }
            // Unitary with first column w/|w| (Gram-Schmidt on the standard
            // basis), inverted, then scaled so the image is exactly e0.
            let mut cols: Vec<DVector<Complex64>> = vec![w.clone() / Complex64::new(norm, 0.0)];
            for j in 0..size {
                if cols.len() == size {
                    break;
                }
                let mut v = DVector::from_fn(size, |r, _| {
                    Complex64::new(if r == j { 1.0 } else { 0.0 }, 0.0)
                });
                for u in &cols {
                    let proj = u.dotc(&v);
                    v -= u * proj;
                }
                let vn = v.norm();
                if vn > 1e-8 {
                    cols.push(v / Complex64::new(vn, 0.0));
                }
            }
            if cols.len() != size {
                return Err(Error::SingularMatrix("base normalizer".into()));
            }
            let t = DMatrix::from_columns(&cols);
            // T e0 = w/|w|, so (1/|w|) T^H maps w to e0 exactly (up to rounding)
            Ok(t.adjoint() / Complex64::new(norm, 0.0))
        }
        FormKind::K => {
            let j = target_gram(FormKind::K, size);
            let norm2 = (w.adjoint() * &j * &w)[(0, 0)].re;
            if norm2 <= 0.0 {
                return Err(Error::ImageLeftCone(norm2));
            }
            let r = norm2.sqrt();
            // form-preserving T with T e0 = w/r via Gram-Schmidt against J
            let pair = |x: &DVector<Complex64>, y: &DVector<Complex64>| -> Complex64 {
                (y.adjoint() * &j * x)[(0, 0)]
            };
            let mut cols: Vec<DVector<Complex64>> = vec![w.clone() / Complex64::new(r, 0.0)];
            for jdx in 0..size {
                if cols.len() == size {
                    break;
                }
                let mut v = DVector::from_fn(size, |row, _| {
                    Complex64::new(if row == jdx { 1.0 } else { 0.0 }, 0.0)
                });
                for (i, u) in cols.iter().enumerate() {
                    let sign = if i == 0 { 1.0 } else { -1.0 };
                    let proj = pair(&v, u) * sign;
                    v -= u * proj;
                }
                let vn2 = pair(&v, &v).re;
                if vn2 < -1e-10 {
                    v /= Complex64::new((-vn2).sqrt(), 0.0);
                    cols.push(v);
                }
            }
            if cols.len() != size {
                return Err(Error::SingularMatrix("base normalizer".into()));
            }
            let t = DMatrix::from_columns(&cols);
            // T^{-1} = J T^H J for form-preserving T
            let t_inv = &j * t.adjoint() * &j;
            Ok(t_inv / Complex64::new(r, 0.0))
        }
    }
}

fn canonical_covector(z: &[Complex64]) -> DVector<Complex64> {
    let mut v = vec![Complex64::new(1.0, 0.0)];
    v.extend_from_slice(z);
    DVector::from_vec(v)
}

/// Developing map sample at `z`: transport a parallel orthonormal frame to z,
/// express the canonical covector in its dual basis, and normalize by the
/// constant base transformation.
pub fn developing_map<P: KahlerPotential>(
    pot: &P,
    kind: FormKind,
    z: &[Complex64],
    params: &TransportParams,
) -> Result<DevelopingMapSample> {
    let frame = orthonormal_parallel_frame(pot, kind, z, params)?;
    let normalizer = developing_normalizer(pot, kind)?;
    sample_from_frame(&frame.matrix, z, kind, &normalizer)
}

/// The constant normalizing transformation shared by all samples of one
/// developing map (computed at the base point; no transport involved).
pub fn developing_normalizer<P: KahlerPotential>(
    pot: &P,
    kind: FormKind,
) -> Result<DMatrix<Complex64>> {
    let n = pot.dimension();
    let origin = vec![Complex64::new(0.0, 0.0); n];
    let field = field_of(pot, kind);
    let a0 = orthonormal_seed(&field(&origin)?, kind)?;
    let w0 = a0.transpose() * canonical_covector(&origin);
    base_normalizer(w0.as_slice(), kind)
}

fn sample_from_frame(
    a: &DMatrix<Complex64>,
    z: &[Complex64],
    kind: FormKind,
    normalizer: &DMatrix<Complex64>,
) -> Result<DevelopingMapSample> {
    let w = normalizer * (a.transpose() * canonical_covector(z));
    if kind == FormKind::K {
        let j = target_gram(FormKind::K, w.len());
        let norm2 = (w.adjoint() * &j * &w)[(0, 0)].re;
        if norm2 <= 0.0 {
            return Err(Error::ImageLeftCone(norm2));
        }
    }
    Ok(DevelopingMapSample {
        point: z.to_vec(),
        homogeneous: w.as_slice().to_vec(),
    })
}

/// Squared model norm of a homogeneous vector: Euclidean for the positive
/// case, the (1,n) form for the indefinite case.
fn model_norm_sqr(w: &[Complex64], kind: FormKind) -> f64 {
    match kind {
        FormKind::H => w.iter().map(|c| c.norm_sqr()).sum(),
        FormKind::K => {
            w[0].norm_sqr() - w[1..].iter().map(|c| c.norm_sqr()).sum::<f64>()
        }
    }
}

/// Max deviation of s * d_k dbar_l log ||w||^2 from g_{k lbar}(z), where s is
/// +1 for the positive form and -1 for the (1,n) form. Stencil samples are
/// short transports from the frame at z (justified by flatness, which is a
/// precondition of the construction).
pub fn pullback_residual<P: KahlerPotential>(
    pot: &P,
    kind: FormKind,
    z: &[Complex64],
    params: &TransportParams,
) -> Result<f64> {
    let n = pot.dimension();
    let frame = orthonormal_parallel_frame(pot, kind, z, params)?;
    let normalizer = developing_normalizer(pot, kind)?;
    let field = field_of(pot, kind);

    let log_norm = |zeta: &[Complex64]| -> Result<Complex64> {
        let hop = PathSpec::polyline(vec![z.to_vec(), zeta.to_vec()])?;
        let a = transport(&field, &hop, &frame.matrix, params)?;
        let sample = sample_from_frame(&a, zeta, kind, &normalizer)?;
        let nw = model_norm_sqr(&sample.homogeneous, kind);
        if nw <= 0.0 {
            return Err(Error::ImageLeftCone(nw));
        }
        Ok(Complex64::new(nw.ln(), 0.0))
    };

    // wrap the scalar into a 1x1 matrix to reuse the mixed-second stencil
    let scalar_field =
        |zeta: &[Complex64]| -> Result<DMatrix<Complex64>> {
            Ok(DMatrix::from_element(1, 1, log_norm(zeta)?))
        };

    let metric = metric_at(&pot.eval_jet(z, 2)?)?;
    let sign = match kind {
        FormKind::H => 1.0,
        FormKind::K => -1.0,
    };
    let step = 5e-3;
    let mut worst = 0.0f64;
    for k in 0..n {
        for l in 0..n {
            let dd = crate::chern::mixed_second_matrix(&scalar_field, z, k, l, step)?;
            let dev = (dd[(0, 0)] * sign - metric.g_lower[(k, l)]).norm();
            worst = worst.max(dev);
        }
    }
    Ok(worst)
}

/// Finite-difference residual of dbar w at `z`; near zero when the developing
/// map is holomorphic.
pub fn holomorphy_residual<P: KahlerPotential>(
    pot: &P,
    kind: FormKind,
    z: &[Complex64],
    params: &TransportParams,
) -> Result<f64> {
    let frame = orthonormal_parallel_frame(pot, kind, z, params)?;
    let normalizer = developing_normalizer(pot, kind)?;
    let field = field_of(pot, kind);
    let n = pot.dimension();
    let w_field = |zeta: &[Complex64]| -> Result<DMatrix<Complex64>> {
        let hop = PathSpec::polyline(vec![z.to_vec(), zeta.to_vec()])?;
        let a = transport(&field, &hop, &frame.matrix, params)?;
        let s = sample_from_frame(&a, zeta, kind, &normalizer)?;
        Ok(DMatrix::from_fn(s.homogeneous.len(), 1, |r, _| {
            s.homogeneous[r]
        }))
    };
    let mut worst = 0.0f64;
    for l in 0..n {
        let dbar = crate::chern::wirtinger_d_matrix(&w_field, z, l, 1e-3, true)?;
        worst = worst.max(max_abs(&dbar));
    }
    Ok(worst)
}

/// Sup-norm difference of transports along two paths with the same endpoints.
pub fn path_independence<P: KahlerPotential>(
    pot: &P,
    kind: FormKind,
    path_a: &PathSpec,
    path_b: &PathSpec,
    params: &TransportParams,
) -> Result<f64> {
    let n = pot.dimension();
    let origin = vec![Complex64::new(0.0, 0.0); n];
    let field = field_of(pot, kind);
    let a0 = orthonormal_seed(&field(&origin)?, kind)?;
    let a1 = transport(&field, path_a, &a0, params)?;
    let a2 = transport(&field, path_b, &a0, params)?;
    Ok(max_abs(&(a1 - a2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{random_gl_matrix, random_u1n_matrix, PotentialSpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params() -> TransportParams {
        TransportParams::default()
    }

    #[test]
    fn transport_on_constant_fields_is_identity() {
        let fs = PotentialSpec::fubini_study(1).unwrap();
        let field = field_of(&fs, FormKind::H);
        let a0 = DMatrix::<Complex64>::identity(2, 2);
        let path = PathSpec::radial(&[c(0.4, 0.3)]);
        let a = transport(&field, &path, &a0, &params()).unwrap();
        assert!(max_abs(&(a - DMatrix::identity(2, 2))) < 1e-9);

        let hy = PotentialSpec::hyperbolic(1).unwrap();
        let field = field_of(&hy, FormKind::K);
        let a0 = DMatrix::<Complex64>::identity(2, 2);
        let a = transport(&field, &PathSpec::radial(&[c(0.3, -0.2)]), &a0, &params()).unwrap();
        assert!(max_abs(&(a - DMatrix::identity(2, 2))) < 1e-9);
    }

    #[test]
    fn transport_preserves_gram_on_pullback_family() {
        let n = 1;
        let gl = PotentialSpec::gl_pullback_fs(n, random_gl_matrix(n, 42)).unwrap();
        let field = field_of(&gl, FormKind::H);
        let origin = [c(0.0, 0.0)];
        let end = [c(0.4, 0.0)];
        let path = PathSpec::radial(&end);

        // orthonormal seed: Gram stays the identity
        let a0 = orthonormal_seed(&field(&origin).unwrap(), FormKind::H).unwrap();
        let a = transport(&field, &path, &a0, &params()).unwrap();
        let m_end = field(&end).unwrap();
        let gram = a.transpose() * &m_end * a.conjugate();
        assert!(
            max_abs(&(gram - DMatrix::identity(2, 2))) < 1e-6,
            "Gram drift"
        );

        // identity seed: the Gram at the endpoint reproduces the one at the
        // start (transport preserves the form on any initial frame)
        let a = transport(&field, &path, &DMatrix::identity(2, 2), &params()).unwrap();
        let gram = a.transpose() * &m_end * a.conjugate();
        let gram0 = field(&origin).unwrap();
        assert!(max_abs(&(gram - gram0)) < 1e-6, "Gram drift from identity seed");
    }

    #[test]
    fn orthonormal_frame_on_models_is_identity() {
        let fs = PotentialSpec::fubini_study(1).unwrap();
        let f = orthonormal_parallel_frame(&fs, FormKind::H, &[c(0.5, 0.0)], &params()).unwrap();
        assert!(max_abs(&(f.matrix.clone() - DMatrix::identity(2, 2))) < 1e-9);

        let hy = PotentialSpec::hyperbolic(2).unwrap();
        let f = orthonormal_parallel_frame(&hy, FormKind::K, &[c(0.2, 0.0), c(0.1, 0.0)], &params())
            .unwrap();
        assert!(max_abs(&(f.matrix.clone() - DMatrix::identity(3, 3))) < 1e-9);
    }

    #[test]
    fn developing_map_anchor_fs() {
        // chart convention anchor: w proportional to (1, z)
        let fs = PotentialSpec::fubini_study(1).unwrap();
        let z = c(0.3, 0.4);
        let s = developing_map(&fs, FormKind::H, &[z], &params()).unwrap();
        let w = &s.homogeneous;
        let ratio = w[1] / w[0];
        assert!((ratio - z).norm() < 1e-9, "w = {w:?}");
        assert!((w[0] - c(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn developing_map_anchor_hyperbolic() {
        let hy = PotentialSpec::hyperbolic(1).unwrap();
        let z = c(0.5, 0.0);
        let s = developing_map(&hy, FormKind::K, &[z], &params()).unwrap();
        let w = &s.homogeneous;
        assert!((w[1] / w[0] - z).norm() < 1e-9, "w = {w:?}");
        let norm2 = model_norm_sqr(w, FormKind::K);
        assert!((norm2 - (1.0 - z.norm_sqr())).abs() < 1e-9);
    }

    #[test]
    fn transport_accuracy_failure_is_reported() {
        // an unreachable Gram tolerance trips the drift check with a step
        // suggestion attached
        let gl = PotentialSpec::gl_pullback_fs(1, random_gl_matrix(1, 5)).unwrap();
        let field = field_of(&gl, FormKind::H);
        let a0 = orthonormal_seed(&field(&[c(0.0, 0.0)]).unwrap(), FormKind::H).unwrap();
        let strict = TransportParams {
            rtol: 1e-16,
            ..TransportParams::default()
        };
        let err = transport(&field, &PathSpec::radial(&[c(0.5, 0.2)]), &a0, &strict);
        assert!(matches!(err, Err(Error::TransportAccuracy { .. })), "{err:?}");
    }

    #[test]
    fn developing_map_undefined_for_non_flat() {
        let pert = PotentialSpec::perturbed_fs(1, 0.1).unwrap();
        let err = developing_map(&pert, FormKind::H, &[c(0.3, 0.0)], &params());
        assert!(matches!(err, Err(Error::NotFlat { .. })));
    }

    #[test]
    fn pullback_residual_models() {
        let fs = PotentialSpec::fubini_study(1).unwrap();
        let r = pullback_residual(&fs, FormKind::H, &[c(0.2, 0.1)], &params()).unwrap();
        assert!(r < 1e-6, "fs residual {r:e}");
    }

    #[test]
    fn pullback_residual_gl_family() {
        let n = 2;
        let gl = PotentialSpec::gl_pullback_fs(n, random_gl_matrix(n, 42)).unwrap();
        let r = pullback_residual(&gl, FormKind::H, &[c(0.25, -0.1), c(0.1, 0.2)], &params())
            .unwrap();
        assert!(r < 1e-4, "gl residual {r:e}");
    }

    #[test]
    fn pullback_residual_ch_family() {
        let n = 1;
        let ch = PotentialSpec::u1n_pullback_ch(n, random_u1n_matrix(n, 42)).unwrap();
        let r = pullback_residual(&ch, FormKind::K, &[c(0.4, 0.0)], &params()).unwrap();
        assert!(r < 1e-4, "ch residual {r:e}");
    }

    #[test]
    fn path_independence_flat_and_holonomy_nonflat() {
        let fs = PotentialSpec::fubini_study(1).unwrap();
        let z = [c(0.3, 0.3)];
        let d = path_independence(
            &fs,
            FormKind::H,
            &PathSpec::radial(&z),
            &PathSpec::polyline(vec![
                vec![c(0.0, 0.0)],
                vec![c(0.3, 0.0)],
                vec![c(0.3, 0.3)],
            ])
            .unwrap(),
            &params(),
        )
        .unwrap();
        assert!(d < 1e-10, "fs path dependence {d:e}");

        let gl = PotentialSpec::gl_pullback_fs(1, random_gl_matrix(1, 7)).unwrap();
        let d = path_independence(
            &gl,
            FormKind::H,
            &PathSpec::radial(&z),
            &PathSpec::staircase(&z),
            &params(),
        )
        .unwrap();
        assert!(d < 1e-4, "gl path dependence {d:e}");

        // curvature shows up as holonomy around an enclosed area
        let pert = PotentialSpec::perturbed_fs(1, 0.1).unwrap();
        let below = PathSpec::polyline(vec![
            vec![c(0.0, 0.0)],
            vec![c(0.3, 0.0)],
            vec![c(0.3, 0.3)],
        ])
        .unwrap();
        let above = PathSpec::polyline(vec![
            vec![c(0.0, 0.0)],
            vec![c(0.0, 0.3)],
            vec![c(0.3, 0.3)],
        ])
        .unwrap();
        let d = path_independence(&pert, FormKind::H, &below, &above, &params()).unwrap();
        assert!(d > 1e-3, "holonomy too small: {d:e}");
    }

    #[test]
    fn holomorphy_of_developing_map() {
        let gl = PotentialSpec::gl_pullback_fs(1, random_gl_matrix(1, 3)).unwrap();
        let r = holomorphy_residual(&gl, FormKind::H, &[c(0.2, 0.15)], &params()).unwrap();
        assert!(r < 1e-4, "dbar w = {r:e}");
    }

    #[test]
    fn theorem_round_trip_gl() {
        // recover coordinates via the developing map, pull back the model
        // potential through the affine chart, compare metrics
        let n = 1;
        let gl = PotentialSpec::gl_pullback_fs(n, random_gl_matrix(n, 42)).unwrap();
        let z = [c(0.2, -0.15)];
        let frame = orthonormal_parallel_frame(&gl, FormKind::H, &z, &params()).unwrap();
        let normalizer = developing_normalizer(&gl, FormKind::H).unwrap();
        let field = field_of(&gl, FormKind::H);
        let model_potential = |zeta: &[Complex64]| -> Result<DMatrix<Complex64>> {
            let hop = PathSpec::polyline(vec![z.to_vec(), zeta.to_vec()]).unwrap();
            let a = transport(&field, &hop, &frame.matrix, &params()).unwrap();
            let s = sample_from_frame(&a, zeta, FormKind::H, &normalizer).unwrap();
            // affine chart + model potential log(1 + |w/w0|^2)
            let w0 = s.homogeneous[0];
            let chart: Vec<Complex64> =
                s.homogeneous[1..].iter().map(|w| w / w0).collect();
            let v = (1.0 + chart.iter().map(|c| c.norm_sqr()).sum::<f64>()).ln();
            Ok(DMatrix::from_element(1, 1, Complex64::new(v, 0.0)))
        };
        let metric = metric_at(&gl.eval_jet(&z, 2).unwrap()).unwrap();
        let dd = crate::chern::mixed_second_matrix(&model_potential, &z, 0, 0, 5e-3).unwrap();
        let dev = (dd[(0, 0)] - metric.g_lower[(0, 0)]).norm();
        assert!(dev < 1e-4, "round-trip metric deviation {dev:e}");
    }
}
