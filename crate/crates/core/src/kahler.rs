//! Metric, Riemann curvature, and holomorphic sectional curvature from
//! potential jets.
//!
//! Conventions: g_{i jbar} = d_i dbar_j phi, the raised metric (g^{i jbar})
//! is the inverse transpose of (g_{i jbar}), and
//!
//!   R_{i jbar k lbar} = -d_k dbar_l g_{i jbar}
//!                       + g^{p qbar} (dbar_l g_{p jbar}) (d_k g_{i qbar}).
//!
//! Constant holomorphic sectional curvature kappa means
//! R_{i jbar k lbar} = (kappa/2) (g_{i jbar} g_{k lbar} + g_{i lbar} g_{k jbar}).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_cholesky, invert_lower_triangular};
use crate::multi_index::MultiIndex;
use crate::wirtinger::WirtingerJet;

#[derive(Clone, Debug)]
pub struct MetricData {
    pub point: Vec<Complex64>,
    /// g_{i jbar}, Hermitian positive definite.
    pub g_lower: DMatrix<Complex64>,
    /// g^{i jbar} = inverse transpose of g_lower.
    pub g_upper: DMatrix<Complex64>,
}

/// R_{i jbar k lbar}, dense over all index quadruples.
#[derive(Clone, Debug)]
pub struct CurvatureTensor {
    pub point: Vec<Complex64>,
    n: usize,
    comp: Vec<Complex64>,
}

impl CurvatureTensor {
    pub fn dimension(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn r(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.comp[((i * self.n + j) * self.n + k) * self.n + l]
    }

    pub fn max_abs(&self) -> f64 {
        self.comp.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

const SYMMETRY_TOL: f64 = 1e-10;

/// Metric coefficients from a jet of order >= 2.
pub fn metric_at(jet: &WirtingerJet) -> Result<MetricData> {
    if jet.order() < 2 {
        return Err(Error::InvalidArgument(
            "metric_at needs a jet of order >= 2".into(),
        ));
    }
    let n = jet.dimension();
    let g_lower = DMatrix::from_fn(n, n, |i, j| jet.deriv(&[i], &[j]));
    // positive definiteness check doubles as the inversion route
    let l = hermitian_cholesky(&g_lower)
        .ok_or_else(|| Error::NotKahler(format!("{:?}", jet.point())))?;
    let l_inv = invert_lower_triangular(&l);
    // G^{-1} = L^{-H} L^{-1}; the raised metric is its transpose
    let g_upper = (l_inv.adjoint() * &l_inv).transpose();
    Ok(MetricData {
        point: jet.point().to_vec(),
        g_lower,
        g_upper,
    })
}

/// Riemann curvature tensor from a jet of order >= 4.
pub fn riemann_at(jet: &WirtingerJet) -> Result<CurvatureTensor> {
    if jet.order() < 4 {
        return Err(Error::InvalidArgument(
            "riemann_at needs a jet of order >= 4".into(),
        ));
    }
    let n = jet.dimension();
    let metric = metric_at(jet)?;
    let e = |i: usize| MultiIndex::unit(n, i);
    let mut comp = vec![Complex64::new(0.0, 0.0); n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    // -d_k dbar_l g_{i jbar}
                    let mut val = -jet.coeff(e(i).add(&e(k)), e(j).add(&e(l)));
                    // + g^{p qbar} (dbar_l g_{p jbar}) (d_k g_{i qbar})
                    for p in 0..n {
                        for q in 0..n {
                            val += metric.g_upper[(p, q)]
                                * jet.coeff(e(p), e(j).add(&e(l)))
                                * jet.coeff(e(i).add(&e(k)), e(q));
                        }
                    }
                    comp[((i * n + j) * n + k) * n + l] = val;
                }
            }
        }
    }
    let tensor = CurvatureTensor {
        point: jet.point().to_vec(),
        n,
        comp,
    };
    check_symmetries(&tensor)?;
    Ok(tensor)
}

/// Kähler pair symmetries and reality, asserted after assembly.
fn check_symmetries(t: &CurvatureTensor) -> Result<()> {
    let n = t.n;
    let scale = t.max_abs().max(1.0);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let r = t.r(i, j, k, l);
                    let checks = [
                        (t.r(k, j, i, l), "first-pair"),
                        (t.r(i, l, k, j), "second-pair"),
                        (t.r(j, i, l, k).conj(), "reality"),
                    ];
                    for (other, name) in checks {
                        if (r - other).norm() > SYMMETRY_TOL * scale {
                            return Err(Error::Consistency(format!(
                                "{name} symmetry violated at ({i},{j},{k},{l}): {r} vs {other}"
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Max-norm deviation from the constant-curvature identity at curvature kappa,
/// normalized by max(1, ||g||_inf^2).
pub fn chsc_residual(jet: &WirtingerJet, kappa: f64) -> Result<f64> {
    let n = jet.dimension();
    let metric = metric_at(jet)?;
    let riemann = riemann_at(jet)?;
    let g = &metric.g_lower;
    let gnorm = g.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let scale = (gnorm * gnorm).max(1.0);
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let model = (g[(i, j)] * g[(k, l)] + g[(i, l)] * g[(k, j)])
                        * (kappa / 2.0);
                    let dev = (riemann.r(i, j, k, l) - model).norm();
                    worst = worst.max(dev);
                }
            }
        }
    }
    Ok(worst / scale)
}

/// Holomorphic sectional curvature of the complex line spanned by `v`:
/// R(v, vbar, v, vbar) / g(v, vbar)^2. Invariant under v -> lambda v.
pub fn hsc_of_direction(jet: &WirtingerJet, v: &[Complex64]) -> Result<f64> {
    let n = jet.dimension();
    if v.len() != n {
        return Err(Error::InvalidArgument(
            "direction dimension mismatch".into(),
        ));
    }
    if v.iter().map(|c| c.norm_sqr()).sum::<f64>() == 0.0 {
        return Err(Error::InvalidArgument(
            "direction vector must be nonzero".into(),
        ));
    }
    let metric = metric_at(jet)?;
    let riemann = riemann_at(jet)?;
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            den += metric.g_lower[(i, j)] * v[i] * v[j].conj();
            for k in 0..n {
                for l in 0..n {
                    num += riemann.r(i, j, k, l) * v[i] * v[j].conj() * v[k] * v[l].conj();
                }
            }
        }
    }
    Ok(num.re / (den.re * den.re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multi_index::MultiIndex;
    use crate::potential::{KahlerPotential, PolyTerm, PotentialSpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fs_metric_at_origin_and_unit_circle() {
        let spec = PotentialSpec::fubini_study(1).unwrap().with_radius(2.0).unwrap();
        let jet0 = spec.eval_jet(&[c(0.0, 0.0)], 2).unwrap();
        let m0 = metric_at(&jet0).unwrap();
        assert!((m0.g_lower[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((m0.g_upper[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        // |z|^2 = 1: g = (1 + |z|^2)^{-2} = 1/4
        let z = [c(0.6, 0.8)];
        let m1 = metric_at(&spec.eval_jet(&z, 2).unwrap()).unwrap();
        assert!((m1.g_lower[(0, 0)] - c(0.25, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn euclidean_metric_is_identity_and_flat() {
        let spec = PotentialSpec::euclidean(2).unwrap();
        let z = [c(0.3, -0.2), c(0.1, 0.4)];
        let jet = spec.eval_jet(&z, 4).unwrap();
        let m = metric_at(&jet).unwrap();
        assert!((&m.g_lower - DMatrix::identity(2, 2))
            .iter()
            .all(|x| x.norm() < 1e-15));
        let r = riemann_at(&jet).unwrap();
        assert!(r.max_abs() < 1e-15);
    }

    #[test]
    fn raised_metric_is_inverse_transpose() {
        let spec = PotentialSpec::hyperbolic(3).unwrap();
        let z = [c(0.2, -0.1), c(0.15, 0.3), c(-0.05, 0.1)];
        let m = metric_at(&spec.eval_jet(&z, 2).unwrap()).unwrap();
        let reference = m.g_lower.clone().try_inverse().unwrap().transpose();
        let dev = (&m.g_upper - &reference)
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-12, "deviation {dev:e}");
    }

    #[test]
    fn fs_curvature_at_origin() {
        let spec = PotentialSpec::fubini_study(1).unwrap();
        let jet = spec.eval_jet(&[c(0.0, 0.0)], 4).unwrap();
        let r = riemann_at(&jet).unwrap();
        assert!((r.r(0, 0, 0, 0) - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn hyperbolic_satisfies_chsc_minus_two() {
        let spec = PotentialSpec::hyperbolic(2).unwrap();
        let z = [c(0.2, 0.0), c(0.0, 0.1)];
        let jet = spec.eval_jet(&z, 4).unwrap();
        assert!(chsc_residual(&jet, -2.0).unwrap() < 1e-8);
        // pointwise check of the identity against metric products
        let m = metric_at(&jet).unwrap();
        let r = riemann_at(&jet).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let model = (m.g_lower[(i, j)] * m.g_lower[(k, l)]
                            + m.g_lower[(i, l)] * m.g_lower[(k, j)])
                            * (-1.0);
                        assert!((r.r(i, j, k, l) - model).norm() < 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn euclidean_chsc_residual_is_two() {
        let spec = PotentialSpec::euclidean(1).unwrap();
        let jet = spec.eval_jet(&[c(0.0, 0.0)], 4).unwrap();
        let res = chsc_residual(&jet, 2.0).unwrap();
        assert!((res - 2.0).abs() < 1e-14);
    }

    #[test]
    fn fs_hsc_is_two_in_any_direction() {
        let spec = PotentialSpec::fubini_study(2).unwrap();
        let z = [c(0.2, 0.1), c(-0.3, 0.05)];
        let jet = spec.eval_jet(&z, 4).unwrap();
        for v in [
            [c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.3, -0.4), c(0.5, 0.2)],
            [c(0.0, 0.0), c(0.0, 1.0)],
        ] {
            let h = hsc_of_direction(&jet, &v).unwrap();
            assert!((h - 2.0).abs() < 1e-8, "hsc = {h}");
        }
    }

    #[test]
    fn euclidean_hsc_is_zero() {
        let spec = PotentialSpec::euclidean(2).unwrap();
        let jet = spec
            .eval_jet(&[c(0.1, 0.2), c(0.0, -0.3)], 4)
            .unwrap();
        let h = hsc_of_direction(&jet, &[c(1.0, 0.0), c(0.5, 0.5)]).unwrap();
        assert_eq!(h, 0.0);
    }

    #[test]
    fn perturbed_fs_hsc_is_direction_dependent() {
        let spec = PotentialSpec::perturbed_fs(2, 0.1).unwrap();
        let z = [c(0.3, 0.0), c(0.0, 0.0)];
        let jet = spec.eval_jet(&z, 4).unwrap();
        let h1 = hsc_of_direction(&jet, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let h2 = hsc_of_direction(&jet, &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(
            (h1 - h2).abs() > 1e-3,
            "expected direction dependence, got {h1} vs {h2}"
        );
    }

    #[test]
    fn zero_direction_rejected() {
        let spec = PotentialSpec::fubini_study(1).unwrap();
        let jet = spec.eval_jet(&[c(0.0, 0.0)], 4).unwrap();
        assert!(hsc_of_direction(&jet, &[c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn non_kahler_rejected() {
        // phi = -|z|^2 has negative definite mixed Hessian
        let terms = vec![PolyTerm {
            alpha: MultiIndex::unit(1, 0),
            beta: MultiIndex::unit(1, 0),
            coeff: c(-1.0, 0.0),
        }];
        let spec = PotentialSpec::polynomial(1, terms).unwrap();
        let jet = spec.eval_jet(&[c(0.1, 0.0)], 2).unwrap();
        assert!(matches!(metric_at(&jet), Err(Error::NotKahler(_))));
    }

    #[test]
    fn scaling_law_on_quartic_polynomial() {
        // phi = |z|^2 + 0.05 z^2 conj(z)^2, doubled: g scales by 2,
        // R scales by 2, hsc scales by 1/2.
        let term = |scale: f64| {
            vec![
                PolyTerm {
                    alpha: MultiIndex::unit(1, 0),
                    beta: MultiIndex::unit(1, 0),
                    coeff: c(scale, 0.0),
                },
                PolyTerm {
                    alpha: MultiIndex::from_exps(&[2]),
                    beta: MultiIndex::from_exps(&[2]),
                    coeff: c(0.05 * scale, 0.0),
                },
            ]
        };
        let base = PotentialSpec::polynomial(1, term(1.0)).unwrap();
        let doubled = PotentialSpec::polynomial(1, term(2.0)).unwrap();
        let z = [c(0.3, 0.1)];
        let j1 = base.eval_jet(&z, 4).unwrap();
        let j2 = doubled.eval_jet(&z, 4).unwrap();
        let (m1, m2) = (metric_at(&j1).unwrap(), metric_at(&j2).unwrap());
        assert!((m2.g_lower[(0, 0)] - m1.g_lower[(0, 0)] * 2.0).norm() < 1e-12);
        let (r1, r2) = (riemann_at(&j1).unwrap(), riemann_at(&j2).unwrap());
        assert!((r2.r(0, 0, 0, 0) - r1.r(0, 0, 0, 0) * 2.0).norm() < 1e-10);
        let v = [c(1.0, 0.0)];
        let (h1, h2) = (
            hsc_of_direction(&j1, &v).unwrap(),
            hsc_of_direction(&j2, &v).unwrap(),
        );
        assert!((h2 - h1 / 2.0).abs() < 1e-10);
    }

    #[test]
    fn hsc_scale_invariance_in_direction() {
        let spec = PotentialSpec::perturbed_fs(2, 0.1).unwrap();
        let jet = spec
            .eval_jet(&[c(0.25, -0.1), c(0.05, 0.15)], 4)
            .unwrap();
        let v = [c(0.4, 0.3), c(-0.2, 0.7)];
        let lambda = c(1.7, -2.3);
        let scaled: Vec<Complex64> = v.iter().map(|x| x * lambda).collect();
        let h1 = hsc_of_direction(&jet, &v).unwrap();
        let h2 = hsc_of_direction(&jet, &scaled).unwrap();
        assert!((h1 - h2).abs() < 1e-10);
    }
}
