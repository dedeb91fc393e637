//! Property-based invariants across the potential registry, plus independent
//! oracles: a finite-difference path to the curvature tensor, and an
//! exact-rational evaluation of the quotient identity.

use jetcurv_core::jet_hermitian::{
    h_matrix_at, k_matrix_at, quotient_identity_residual, signature_of,
};
use jetcurv_core::kahler::{hsc_of_direction, metric_at, riemann_at};
use jetcurv_core::potential::{registry, KahlerPotential, PotentialSpec};
use jetcurv_core::wirtinger::fd_jet;
use jetcurv_core::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Strategy: a point in the polydisc of radius `rho` in dimension `n`.
fn point_in(n: usize, rho: f64) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-rho..rho, -rho..rho), n)
        .prop_map(|v| v.into_iter().map(|(re, im)| c(re, im)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Finite differences of the scalar evaluation reproduce the analytic
    /// jet on every registry potential (cross-validation of the engine).
    #[test]
    fn fd_cross_validates_analytic_jets(
        z in point_in(2, 0.25),
        which in 0usize..6,
    ) {
        let spec = registry(2, 9)[which].clone();
        let analytic = spec.eval_jet(&z, 4).unwrap();
        let phi = |w: &[Complex64]| spec.eval(w).unwrap();
        let fd = fd_jet(phi, &z, 4, 1e-3).unwrap();
        let scale = analytic.max_abs().max(1.0);
        for ((key, va), (_, vf)) in analytic.entries().iter().zip(fd.entries().iter()) {
            prop_assert!(
                (va - vf).norm() <= 1e-5 * scale.max(va.norm()),
                "{}: mismatch at {key:?}: {va} vs {vf}",
                spec.kind().name()
            );
        }
    }

    /// Conjugate symmetry of analytic jets is exact.
    #[test]
    fn conjugate_symmetry_exact(
        z in point_in(3, 0.2),
        which in 0usize..6,
    ) {
        let spec = registry(3, 10)[which].clone();
        let jet = spec.eval_jet(&z, 4).unwrap();
        for ((a, b), v) in jet.entries() {
            prop_assert_eq!(jet.coeff(b, a), v.conj());
        }
    }

    /// Holomorphic sectional curvature is invariant under complex rescaling
    /// of the direction.
    #[test]
    fn hsc_projective_invariance(
        z in point_in(2, 0.3),
        v in point_in(2, 1.0),
        lam in point_in(1, 2.0),
    ) {
        prop_assume!(v.iter().map(|x| x.norm_sqr()).sum::<f64>() > 1e-3);
        prop_assume!(lam[0].norm() > 1e-2);
        let spec = PotentialSpec::perturbed_fs(2, 0.1).unwrap();
        let jet = spec.eval_jet(&z, 4).unwrap();
        let scaled: Vec<Complex64> = v.iter().map(|x| x * lam[0]).collect();
        let h1 = hsc_of_direction(&jet, &v).unwrap();
        let h2 = hsc_of_direction(&jet, &scaled).unwrap();
        prop_assert!((h1 - h2).abs() < 1e-10 * h1.abs().max(1.0));
    }

    /// The quotient identities hold for every registry potential at every
    /// point, with no curvature assumption.
    #[test]
    fn quotient_identity_universal(
        z in point_in(2, 0.3),
        which in 0usize..6,
        seed in 0u64..32,
    ) {
        let spec = registry(2, seed)[which].clone();
        let jet = spec.eval_jet(&z, 2).unwrap();
        let (rh, rk) = quotient_identity_residual(&jet).unwrap();
        prop_assert!(rh < 1e-9, "{}: rh = {rh:e}", spec.kind().name());
        prop_assert!(rk < 1e-9, "{}: rk = {rk:e}", spec.kind().name());
    }

    /// The positive jet form is positive definite wherever defined.
    #[test]
    fn h_form_positive_definite(
        z in point_in(2, 0.3),
        which in 0usize..6,
    ) {
        let spec = registry(2, 11)[which].clone();
        let jet = spec.eval_jet(&z, 2).unwrap();
        let h = h_matrix_at(&jet).unwrap();
        let (pos, neg) = signature_of(&h).unwrap();
        prop_assert_eq!((pos, neg), (3, 0));
    }

    /// The indefinite jet form of hyperbolic-type potentials has signature
    /// (1, n) at every sampled point.
    #[test]
    fn k_form_signature(
        z in point_in(2, 0.3),
        seed in 0u64..32,
    ) {
        for spec in [
            PotentialSpec::hyperbolic(2).unwrap(),
            PotentialSpec::u1n_pullback_ch(
                2,
                jetcurv_core::potential::random_u1n_matrix(2, seed),
            )
            .unwrap(),
        ] {
            let jet = spec.eval_jet(&z, 2).unwrap();
            let k = k_matrix_at(&jet).unwrap();
            prop_assert_eq!(signature_of(&k).unwrap(), (1, 2));
        }
    }

    /// Analytic curvature agrees with a finite-difference oracle that
    /// differentiates the metric field directly.
    #[test]
    fn riemann_matches_fd_of_metric_oracle(
        z in point_in(2, 0.25),
        which in 0usize..6,
    ) {
        let spec = registry(2, 12)[which].clone();
        let jet = spec.eval_jet(&z, 4).unwrap();
        let analytic = riemann_at(&jet).unwrap();
        let scale = analytic.max_abs().max(1.0);
        let oracle = riemann_fd_oracle(&spec, &z);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let dev = (analytic.r(i, j, k, l) - oracle[i][j][k][l]).norm();
                        prop_assert!(
                            dev <= 1e-5 * scale,
                            "{}: ({i},{j},{k},{l}) dev {dev:e}",
                            spec.kind().name()
                        );
                    }
                }
            }
        }
    }
}

/// Independent curvature oracle: all metric derivatives entering the
/// curvature formula are taken by central differences of the order-2 metric
/// field (never reading jet coefficients above order 2).
fn riemann_fd_oracle(
    spec: &PotentialSpec,
    z: &[Complex64],
) -> Vec<Vec<Vec<Vec<Complex64>>>> {
    let n = spec.dimension();
    let h = 1e-3;
    let g_at = |w: &[Complex64]| -> nalgebra::DMatrix<Complex64> {
        metric_at(&spec.eval_jet(w, 2).unwrap()).unwrap().g_lower
    };
    // Wirtinger derivative of the metric field entrywise, one Richardson halving
    let d_g = |w: &[Complex64], k: usize, conj: bool, h: f64| -> nalgebra::DMatrix<Complex64> {
        let once = |h: f64| {
            let mut wp = w.to_vec();
            let mut at = |delta: Complex64| {
                wp[k] = w[k] + delta;
                let m = g_at(&wp);
                wp[k] = w[k];
                m
            };
            let dx = (at(c(h, 0.0)) - at(c(-h, 0.0))) / c(2.0 * h, 0.0);
            let dy = (at(c(0.0, h)) - at(c(0.0, -h))) / c(2.0 * h, 0.0);
            if conj {
                (dx + dy * Complex64::i()) * c(0.5, 0.0)
            } else {
                (dx - dy * Complex64::i()) * c(0.5, 0.0)
            }
        };
        (once(h / 2.0) * c(4.0, 0.0) - once(h)) / c(3.0, 0.0)
    };
    let metric = metric_at(&spec.eval_jet(z, 2).unwrap()).unwrap();
    let mut out = vec![vec![vec![vec![c(0.0, 0.0); n]; n]; n]; n];
    for k in 0..n {
        for l in 0..n {
            // second mixed derivative of g via nested stencils
            let inner = |w: &[Complex64]| d_g(w, k, false, h);
            let once = |hh: f64| {
                let mut wp = z.to_vec();
                let mut at = |delta: Complex64| {
                    wp[l] = z[l] + delta;
                    let m = inner(&wp);
                    wp[l] = z[l];
                    m
                };
                let dx = (at(c(hh, 0.0)) - at(c(-hh, 0.0))) / c(2.0 * hh, 0.0);
                let dy = (at(c(0.0, hh)) - at(c(0.0, -hh))) / c(2.0 * hh, 0.0);
                (dx + dy * Complex64::i()) * c(0.5, 0.0)
            };
            let dd_g = (once(h / 2.0) * c(4.0, 0.0) - once(h)) / c(3.0, 0.0);
            let dbar_l_g = d_g(z, l, true, h);
            let d_k_g = d_g(z, k, false, h);
            for i in 0..n {
                for j in 0..n {
                    let mut val = -dd_g[(i, j)];
                    for p in 0..n {
                        for q in 0..n {
                            val += metric.g_upper[(p, q)] * dbar_l_g[(p, j)] * d_k_g[(i, q)];
                        }
                    }
                    out[i][j][k][l] = val;
                }
            }
        }
    }
    out
}

/// Exact-precision oracle for the quotient identity: at a rational point of
/// the perturbed potential, the form matrix factors as h * Mtilde with
/// Mtilde rational; the identity reduces to quad((Mtilde^{-1})^t, (1, z)) = 1
/// exactly in arbitrary-precision rationals.
mod exact_rational {
    use num_rational::BigRational;

    fn q(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    #[test]
    fn quotient_identity_exact_at_rational_point() {
        // perturbed potential phi = log(1 + z zbar) + eps (Re z)^4 with
        // eps = 1/10 at the real rational point z = 1/5.
        let z = q(1, 5);
        let eps = q(1, 10);

        // dphi = z/(1+z^2) + 2 eps z^3, g = (1+z^2)^{-2} + 3 eps z^2
        let one = q(1, 1);
        let opz2 = &one + &z * &z;
        let p = &z / &opz2 + q(2, 1) * &eps * &z * &z * &z;
        let g = &one / (&opz2 * &opz2) + q(3, 1) * &eps * &z * &z;
        let ginv = &one / &g;

        // Mtilde = H / h for the frame {1, z}:
        //   M00 = 1 + g^{-1} p^2
        //   M10 = z - g^{-1} p + z g^{-1} p^2   (= M01 at a real point)
        //   M11 = z^2 + g^{-1} (1 - z p)^2
        let m00 = &one + &ginv * &p * &p;
        let m10 = &z - &ginv * &p + &z * &ginv * &p * &p;
        let m01 = m10.clone();
        let m11 = &z * &z + &ginv * (&one - &z * &p) * (&one - &z * &p);

        // dual = (M^{-1})^t; quadratic form at v = (1, z)
        let det = &m00 * &m11 - &m10 * &m01;
        assert!(det != q(0, 1));
        // (M^{-1})^t entries: [[m11, -m01], [-m10, m00]] / det transposed
        let d00 = &m11 / &det;
        let d01 = -&m10 / &det;
        let d10 = -&m01 / &det;
        let d11 = &m00 / &det;
        let value = &d00 + (&d01 + &d10) * &z + &d11 * &z * &z;
        assert_eq!(value, one, "quotient identity fails in exact arithmetic");
    }

    #[test]
    fn exact_oracle_matches_float_path() {
        // the same point through the floating-point implementation
        use super::*;
        let spec = PotentialSpec::perturbed_fs(1, 0.1).unwrap();
        let jet = spec.eval_jet(&[c(0.2, 0.0)], 2).unwrap();
        let (rh, _) = quotient_identity_residual(&jet).unwrap();
        assert!(rh < 1e-12, "float residual {rh:e}");
    }
}
