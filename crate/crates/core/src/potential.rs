//! Kähler potential specifications and their exact analytic jets.
//!
//! Built-in families:
//!   - `fubini_study`:    phi = log(1 + |z|^2)
//!   - `hyperbolic`:      phi = -log(1 - |z|^2), on a ball of radius < 1
//!   - `euclidean`:       phi = |z|^2
//!   - `gl_pullback_fs`:  phi = log ||A (1, z)||^2 for invertible A
//!   - `u1n_pullback_ch`: phi = -log <A (1, z), A (1, z)>_{1,n} for A preserving
//!                        the (1,n) form diag(1, -1, ..., -1)
//!   - `perturbed_fs`:    fubini_study + eps * sum_i (Re z^i)^4
//!   - `polynomial`:      sum c_{alpha beta} z^alpha conj(z)^beta with the
//!                        reality constraint c_{beta alpha} = conj(c_{alpha beta})
//!
//! All jets are computed in closed form through truncated Taylor arithmetic;
//! finite differences never enter the analytic path.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::multi_index::{MultiIndex, MAX_DIM, MAX_ORDER};
use crate::taylor::TaylorPoly;
use crate::wirtinger::WirtingerJet;

/// Interface shared by built-in specs and derived (gauge-composed) potentials.
pub trait KahlerPotential {
    fn dimension(&self) -> usize;

    /// Radius of the coordinate ball the potential is declared on.
    fn domain_radius(&self) -> f64;

    fn contains(&self, z: &[Complex64]) -> bool;

    /// All mixed Wirtinger derivatives at `z` up to total order `order`.
    fn eval_jet(&self, z: &[Complex64], order: usize) -> Result<WirtingerJet>;

    /// Scalar value phi(z).
    fn eval(&self, z: &[Complex64]) -> Result<f64>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialKind {
    FubiniStudy,
    Hyperbolic,
    Euclidean,
    GlPullbackFs,
    U1nPullbackCh,
    PerturbedFs,
    Polynomial,
}

impl PotentialKind {
    pub fn name(&self) -> &'static str {
        match self {
            PotentialKind::FubiniStudy => "fubini_study",
            PotentialKind::Hyperbolic => "hyperbolic",
            PotentialKind::Euclidean => "euclidean",
            PotentialKind::GlPullbackFs => "gl_pullback_fs",
            PotentialKind::U1nPullbackCh => "u1n_pullback_ch",
            PotentialKind::PerturbedFs => "perturbed_fs",
            PotentialKind::Polynomial => "polynomial",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        Ok(match s {
            "fubini_study" => PotentialKind::FubiniStudy,
            "hyperbolic" => PotentialKind::Hyperbolic,
            "euclidean" => PotentialKind::Euclidean,
            "gl_pullback_fs" => PotentialKind::GlPullbackFs,
            "u1n_pullback_ch" => PotentialKind::U1nPullbackCh,
            "perturbed_fs" => PotentialKind::PerturbedFs,
            "polynomial" => PotentialKind::Polynomial,
            other => return Err(Error::InvalidSpec(format!("unknown kind `{other}`"))),
        })
    }
}

/// One monomial c * z^alpha * conj(z)^beta of a polynomial potential.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyTerm {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub coeff: Complex64,
}

#[derive(Clone, Debug)]
pub struct PotentialSpec {
    kind: PotentialKind,
    n: usize,
    radius: f64,
    /// Projective-linear map for the pullback kinds, (n+1) x (n+1).
    matrix: Option<DMatrix<Complex64>>,
    /// Perturbation strength for `perturbed_fs`.
    epsilon: f64,
    terms: Vec<PolyTerm>,
}

const FORM_PRESERVATION_TOL: f64 = 1e-12;

impl PotentialSpec {
    pub fn fubini_study(n: usize) -> Result<Self> {
        Self::new(PotentialKind::FubiniStudy, n, 1.0, None, 0.0, Vec::new())
    }

    pub fn hyperbolic(n: usize) -> Result<Self> {
        Self::new(PotentialKind::Hyperbolic, n, 0.95, None, 0.0, Vec::new())
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        Self::new(PotentialKind::Euclidean, n, 1.0, None, 0.0, Vec::new())
    }

    pub fn gl_pullback_fs(n: usize, a: DMatrix<Complex64>) -> Result<Self> {
        Self::new(PotentialKind::GlPullbackFs, n, 1.0, Some(a), 0.0, Vec::new())
    }

    pub fn u1n_pullback_ch(n: usize, a: DMatrix<Complex64>) -> Result<Self> {
        Self::new(PotentialKind::U1nPullbackCh, n, 0.95, Some(a), 0.0, Vec::new())
    }

    pub fn perturbed_fs(n: usize, epsilon: f64) -> Result<Self> {
        Self::new(PotentialKind::PerturbedFs, n, 1.0, None, epsilon, Vec::new())
    }

    pub fn polynomial(n: usize, terms: Vec<PolyTerm>) -> Result<Self> {
        Self::new(PotentialKind::Polynomial, n, 1.0, None, 0.0, terms)
    }

    pub fn new(
        kind: PotentialKind,
        n: usize,
        radius: f64,
        matrix: Option<DMatrix<Complex64>>,
        epsilon: f64,
        terms: Vec<PolyTerm>,
    ) -> Result<Self> {
        let spec = PotentialSpec {
            kind,
            n,
            radius,
            matrix,
            epsilon,
            terms,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        self.radius = radius;
        self.validate()?;
        Ok(self)
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn matrix(&self) -> Option<&DMatrix<Complex64>> {
        self.matrix.as_ref()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn terms(&self) -> &[PolyTerm] {
        &self.terms
    }

    fn validate(&self) -> Result<()> {
        if self.n < 1 || self.n > MAX_DIM {
            return Err(Error::InvalidSpec(format!(
                "dimension {} out of range 1..={MAX_DIM}",
                self.n
            )));
        }
        if !(self.radius > 0.0) {
            return Err(Error::InvalidSpec("radius must be positive".into()));
        }
        match self.kind {
            PotentialKind::Hyperbolic | PotentialKind::U1nPullbackCh => {
                if self.radius >= 1.0 {
                    return Err(Error::InvalidSpec(
                        "hyperbolic-type potentials require radius < 1".into(),
                    ));
                }
            }
            _ => {}
        }
        match self.kind {
            PotentialKind::GlPullbackFs | PotentialKind::U1nPullbackCh => {
                let a = self.matrix.as_ref().ok_or_else(|| {
                    Error::InvalidSpec("pullback kinds require a matrix A".into())
                })?;
                if a.nrows() != self.n + 1 || a.ncols() != self.n + 1 {
                    return Err(Error::InvalidSpec(format!(
                        "matrix A must be {0}x{0}",
                        self.n + 1
                    )));
                }
                if self.kind == PotentialKind::GlPullbackFs {
                    if a.clone().try_inverse().is_none() {
                        return Err(Error::InvalidSpec("matrix A is not invertible".into()));
                    }
                } else {
                    // A must preserve the (1,n) form diag(1, -1, ..., -1).
                    let j = minkowski_form(self.n);
                    let g = a.adjoint() * &j * a;
                    let dev = (&g - &j).iter().map(|c| c.norm()).fold(0.0, f64::max);
                    if dev > FORM_PRESERVATION_TOL {
                        return Err(Error::InvalidSpec(format!(
                            "matrix A does not preserve the (1,n) form (deviation {dev:e})"
                        )));
                    }
                }
            }
            PotentialKind::Polynomial => {
                validate_reality(self.n, &self.terms)?;
            }
            _ => {
                if self.matrix.is_some() {
                    return Err(Error::InvalidSpec(
                        "matrix A only applies to pullback kinds".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// The Hermitian coefficient matrix N and overall sign for log-quadratic
    /// kinds: phi = sign * log( sum N_ab v_a conj(v_b) ), v = (1, z).
    fn log_quadratic_data(&self) -> Option<(DMatrix<Complex64>, f64)> {
        let m = self.n + 1;
        match self.kind {
            PotentialKind::FubiniStudy | PotentialKind::PerturbedFs => {
                Some((DMatrix::identity(m, m), 1.0))
            }
            PotentialKind::Hyperbolic => Some((minkowski_form(self.n), -1.0)),
            PotentialKind::GlPullbackFs => {
                let a = self.matrix.as_ref().unwrap();
                Some((hermitian_pullback(a, &DMatrix::identity(m, m)), 1.0))
            }
            PotentialKind::U1nPullbackCh => {
                let a = self.matrix.as_ref().unwrap();
                Some((hermitian_pullback(a, &minkowski_form(self.n)), -1.0))
            }
            _ => None,
        }
    }

    /// Polynomial part: explicit terms for `polynomial`, the quartic
    /// perturbation for `perturbed_fs`, |z|^2 for `euclidean`.
    fn polynomial_terms(&self) -> Vec<PolyTerm> {
        match self.kind {
            PotentialKind::Polynomial => self.terms.clone(),
            PotentialKind::Euclidean => (0..self.n)
                .map(|i| PolyTerm {
                    alpha: MultiIndex::unit(self.n, i),
                    beta: MultiIndex::unit(self.n, i),
                    coeff: Complex64::new(1.0, 0.0),
                })
                .collect(),
            PotentialKind::PerturbedFs => real_quartic_terms(self.n, self.epsilon),
            _ => Vec::new(),
        }
    }
}

/// diag(1, -1, ..., -1) of size (n+1).
pub fn minkowski_form(n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n + 1, n + 1, |r, c| {
        if r == c {
            Complex64::new(if r == 0 { 1.0 } else { -1.0 }, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// N with N_ab = sum_c conj(A_cb) Lambda_cc A_ca, so that
/// <A v, A v>_Lambda = sum N_ab v_a conj(v_b).
fn hermitian_pullback(a: &DMatrix<Complex64>, lambda: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let m = a.nrows();
    DMatrix::from_fn(m, m, |p, q| {
        (0..m)
            .map(|c| a[(c, q)].conj() * lambda[(c, c)] * a[(c, p)])
            .sum()
    })
}

/// eps * sum_i (Re z^i)^4 expanded into monomials (z^i + conj z^i)^4 / 16.
fn real_quartic_terms(n: usize, eps: f64) -> Vec<PolyTerm> {
    let mut terms = Vec::new();
    let binom = [1.0, 4.0, 6.0, 4.0, 1.0];
    for i in 0..n {
        for k in 0..=4usize {
            let mut alpha = MultiIndex::zero(n);
            let mut beta = MultiIndex::zero(n);
            for _ in 0..k {
                alpha = alpha.add(&MultiIndex::unit(n, i));
            }
            for _ in 0..(4 - k) {
                beta = beta.add(&MultiIndex::unit(n, i));
            }
            terms.push(PolyTerm {
                alpha,
                beta,
                coeff: Complex64::new(eps * binom[k] / 16.0, 0.0),
            });
        }
    }
    terms
}

fn validate_reality(n: usize, terms: &[PolyTerm]) -> Result<()> {
    use std::collections::HashMap;
    let mut acc: HashMap<(MultiIndex, MultiIndex), Complex64> = HashMap::new();
    for t in terms {
        if t.alpha.len() != n || t.beta.len() != n {
            return Err(Error::InvalidSpec(
                "polynomial term dimension mismatch".into(),
            ));
        }
        if t.alpha.degree() + t.beta.degree() > 2 * MAX_ORDER {
            return Err(Error::InvalidSpec(
                "polynomial term degree too large".into(),
            ));
        }
        *acc.entry((t.alpha, t.beta))
            .or_insert(Complex64::new(0.0, 0.0)) += t.coeff;
    }
    for (&(a, b), &c) in acc.iter() {
        let mirror = acc
            .get(&(b, a))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0));
        if (mirror.conj() - c).norm() > 1e-12 * (1.0 + c.norm()) {
            return Err(Error::InvalidSpec(format!(
                "reality constraint violated at ({a:?}, {b:?}): c = {c}, conj mirror = {}",
                mirror.conj()
            )));
        }
    }
    Ok(())
}

fn point_norm(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn check_point(spec: &PotentialSpec, z: &[Complex64]) -> Result<()> {
    if z.len() != spec.n {
        return Err(Error::InvalidArgument(format!(
            "point dimension {} does not match potential dimension {}",
            z.len(),
            spec.n
        )));
    }
    if point_norm(z) >= spec.radius {
        return Err(Error::Domain(format!(
            "|z| = {} exceeds ball radius {}",
            point_norm(z),
            spec.radius
        )));
    }
    Ok(())
}

impl KahlerPotential for PotentialSpec {
    fn dimension(&self) -> usize {
        self.n
    }

    fn domain_radius(&self) -> f64 {
        self.radius
    }

    fn contains(&self, z: &[Complex64]) -> bool {
        z.len() == self.n && point_norm(z) < self.radius
    }

    fn eval_jet(&self, z: &[Complex64], order: usize) -> Result<WirtingerJet> {
        if order > MAX_ORDER {
            return Err(Error::UnsupportedOrder {
                got: order,
                max: MAX_ORDER,
            });
        }
        check_point(self, z)?;
        let n = self.n;
        let mut poly = TaylorPoly::zero(n, order);
        if let Some((nmat, sign)) = self.log_quadratic_data() {
            let q = quadratic_form_expansion(&nmat, z, order);
            let zero = MultiIndex::zero(n);
            if q.get(zero, zero).re <= 0.0 {
                // hyperbolic-type norm <= 0 at z
                return Err(Error::Domain(format!(
                    "quadratic form is not positive at |z| = {}",
                    point_norm(z)
                )));
            }
            poly = poly.add(&q.log()?.scale(Complex64::new(sign, 0.0)));
        }
        let terms = self.polynomial_terms();
        if !terms.is_empty() {
            poly = poly.add(&monomial_expansion(n, order, &terms, z));
        }
        Ok(WirtingerJet::from_taylor(z.to_vec(), order, &poly))
    }

    fn eval(&self, z: &[Complex64]) -> Result<f64> {
        check_point(self, z)?;
        let mut value = 0.0;
        if let Some((nmat, sign)) = self.log_quadratic_data() {
            let q = quadratic_form_value(&nmat, z);
            if q <= 0.0 {
                return Err(Error::Domain(format!(
                    "quadratic form is not positive at |z| = {}",
                    point_norm(z)
                )));
            }
            value += sign * q.ln();
        }
        for t in self.polynomial_terms() {
            let mut m = t.coeff;
            for i in 0..self.n {
                m *= z[i].powu(t.alpha.entry(i) as u32);
                m *= z[i].conj().powu(t.beta.entry(i) as u32);
            }
            value += m.re;
        }
        Ok(value)
    }
}

/// Q(z + u) as a Taylor polynomial in (u, conj u) for Q(z) = sum N_ab v_a conj(v_b),
/// v = (1, z). Exact: Q has bidegree (1,1).
fn quadratic_form_expansion(
    nmat: &DMatrix<Complex64>,
    z: &[Complex64],
    order: usize,
) -> TaylorPoly {
    let n = z.len();
    let mut v0 = vec![Complex64::new(1.0, 0.0)];
    v0.extend_from_slice(z);
    let mut q = TaylorPoly::zero(n, order);
    let zero = MultiIndex::zero(n);
    let mut q0 = Complex64::new(0.0, 0.0);
    for a in 0..=n {
        for b in 0..=n {
            q0 += nmat[(a, b)] * v0[a] * v0[b].conj();
        }
    }
    q.set(zero, zero, Complex64::new(q0.re, 0.0));
    for i in 0..n {
        let mut ci = Complex64::new(0.0, 0.0);
        for b in 0..=n {
            ci += nmat[(i + 1, b)] * v0[b].conj();
        }
        q.set(MultiIndex::unit(n, i), zero, ci);
        q.set(zero, MultiIndex::unit(n, i), ci.conj());
    }
    for i in 0..n {
        for j in 0..n {
            q.set(
                MultiIndex::unit(n, i),
                MultiIndex::unit(n, j),
                nmat[(i + 1, j + 1)],
            );
        }
    }
    q
}

fn quadratic_form_value(nmat: &DMatrix<Complex64>, z: &[Complex64]) -> f64 {
    let n = z.len();
    let mut v0 = vec![Complex64::new(1.0, 0.0)];
    v0.extend_from_slice(z);
    let mut q0 = Complex64::new(0.0, 0.0);
    for a in 0..=n {
        for b in 0..=n {
            q0 += nmat[(a, b)] * v0[a] * v0[b].conj();
        }
    }
    q0.re
}

/// Taylor expansion at `z` of a sum of monomials, truncated at `order`.
/// Coefficient at (alpha, beta): sum over terms of
/// c * C(gamma, alpha) z^{gamma - alpha} * C(delta, beta) conj(z)^{delta - beta}.
fn monomial_expansion(
    n: usize,
    order: usize,
    terms: &[PolyTerm],
    z: &[Complex64],
) -> TaylorPoly {
    let mut poly = TaylorPoly::zero(n, order);
    for t in terms {
        for d_a in 0..=order {
            if t.alpha.degree() < d_a {
                continue;
            }
            for alpha in MultiIndex::of_degree(n, d_a) {
                let Some(rem_a) = t.alpha.checked_sub(&alpha) else {
                    continue;
                };
                for d_b in 0..=(order - d_a) {
                    if t.beta.degree() < d_b {
                        continue;
                    }
                    for beta in MultiIndex::of_degree(n, d_b) {
                        let Some(rem_b) = t.beta.checked_sub(&beta) else {
                            continue;
                        };
                        let mut coeff = t.coeff;
                        for i in 0..n {
                            coeff *= binomial(t.alpha.entry(i), alpha.entry(i))
                                * binomial(t.beta.entry(i), beta.entry(i));
                            coeff *= z[i].powu(rem_a.entry(i) as u32);
                            coeff *= z[i].conj().powu(rem_b.entry(i) as u32);
                        }
                        poly.add_to(alpha, beta, coeff);
                    }
                }
            }
        }
    }
    poly
}

fn binomial(nn: usize, k: usize) -> f64 {
    if k > nn {
        return 0.0;
    }
    let mut r = 1.0;
    for i in 0..k {
        r = r * (nn - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Seeded invertible matrix I + 0.25 R with entries of R in the unit square,
/// regenerated until comfortably conditioned.
pub fn random_gl_matrix(n: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = n + 1;
    loop {
        let a = DMatrix::from_fn(m, m, |r, c| {
            let base = if r == c { 1.0 } else { 0.0 };
            Complex64::new(
                base + 0.25 * (rng.random_range(-1.0..1.0)),
                0.25 * (rng.random_range(-1.0..1.0)),
            )
        });
        let svd = a.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if smin > 1e-3 && smax / smin < 20.0 {
            return a;
        }
    }
}

/// Seeded element of U(1,n): a hyperbolic boost mixing the positive direction
/// with a random negative one, conjugated by block-diagonal unitaries.
pub fn random_u1n_matrix(n: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = n + 1;
    let t: f64 = rng.random_range(0.2..0.8);
    let mut boost = DMatrix::identity(m, m);
    boost[(0, 0)] = Complex64::new(t.cosh(), 0.0);
    boost[(0, 1)] = Complex64::new(t.sinh(), 0.0);
    boost[(1, 0)] = Complex64::new(t.sinh(), 0.0);
    boost[(1, 1)] = Complex64::new(t.cosh(), 0.0);
    let u1 = random_block_unitary(n, &mut rng);
    let u2 = random_block_unitary(n, &mut rng);
    u1 * boost * u2
}

/// 1 (+) U(n) block matrix with U(n) drawn via QR of a complex Gaussian-ish sample.
fn random_block_unitary(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let qr = g.qr();
    let q = qr.q();
    let mut out = DMatrix::identity(n + 1, n + 1);
    for r in 0..n {
        for c in 0..n {
            out[(r + 1, c + 1)] = q[(r, c)];
        }
    }
    out
}

/// The six standard control potentials in dimension `n`, with pullback
/// matrices derived from `seed`.
pub fn registry(n: usize, seed: u64) -> Vec<PotentialSpec> {
    vec![
        PotentialSpec::fubini_study(n).unwrap(),
        PotentialSpec::hyperbolic(n).unwrap(),
        PotentialSpec::euclidean(n).unwrap(),
        PotentialSpec::gl_pullback_fs(n, random_gl_matrix(n, seed)).unwrap(),
        PotentialSpec::u1n_pullback_ch(n, random_u1n_matrix(n, seed)).unwrap(),
        PotentialSpec::perturbed_fs(n, 0.1).unwrap(),
    ]
}

// ---------------------------------------------------------------------------
// Spec file format: key = value lines, complex numbers as [re, im] pairs,
// polynomial terms as { alpha: [..], beta: [..], c: [re, im] }.
// ---------------------------------------------------------------------------

impl PotentialSpec {
    pub fn parse_spec_text(text: &str) -> Result<Self> {
        let mut kind: Option<PotentialKind> = None;
        let mut n: Option<usize> = None;
        let mut radius: Option<f64> = None;
        let mut epsilon = 0.0;
        let mut matrix_src: Option<String> = None;
        let mut poly_src: Vec<String> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidSpec(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "kind" => kind = Some(PotentialKind::from_name(value)?),
                "n" => {
                    n = Some(value.parse().map_err(|_| {
                        Error::InvalidSpec(format!("line {}: bad dimension", lineno + 1))
                    })?)
                }
                "radius" => {
                    radius = Some(value.parse().map_err(|_| {
                        Error::InvalidSpec(format!("line {}: bad radius", lineno + 1))
                    })?)
                }
                "epsilon" => {
                    epsilon = value.parse().map_err(|_| {
                        Error::InvalidSpec(format!("line {}: bad epsilon", lineno + 1))
                    })?
                }
                "A" => matrix_src = Some(value.to_string()),
                "poly" => poly_src.push(value.to_string()),
                other => {
                    return Err(Error::InvalidSpec(format!(
                        "line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }

        let kind = kind.ok_or_else(|| Error::InvalidSpec("missing `kind`".into()))?;
        let n = n.ok_or_else(|| Error::InvalidSpec("missing `n`".into()))?;
        let radius = radius.unwrap_or(match kind {
            PotentialKind::Hyperbolic | PotentialKind::U1nPullbackCh => 0.95,
            _ => 1.0,
        });
        let matrix = matrix_src.map(|s| parse_matrix(&s, n + 1)).transpose()?;
        let terms = poly_src
            .iter()
            .map(|s| parse_poly_term(s, n))
            .collect::<Result<Vec<_>>>()?;
        PotentialSpec::new(kind, n, radius, matrix, epsilon, terms)
    }

    pub fn to_spec_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("kind = {}\n", self.kind.name()));
        out.push_str(&format!("n = {}\n", self.n));
        out.push_str(&format!("radius = {}\n", self.radius));
        if self.epsilon != 0.0 {
            out.push_str(&format!("epsilon = {}\n", self.epsilon));
        }
        if let Some(a) = &self.matrix {
            let rows: Vec<String> = (0..a.nrows())
                .map(|r| {
                    (0..a.ncols())
                        .map(|c| format!("[{}, {}]", a[(r, c)].re, a[(r, c)].im))
                        .collect::<Vec<_>>()
                        .join(", ")
                })
                .collect();
            out.push_str(&format!("A = [{}]\n", rows.join(" ; ")));
        }
        for t in &self.terms {
            let alpha: Vec<String> = (0..self.n).map(|i| t.alpha.entry(i).to_string()).collect();
            let beta: Vec<String> = (0..self.n).map(|i| t.beta.entry(i).to_string()).collect();
            out.push_str(&format!(
                "poly = {{ alpha: [{}], beta: [{}], c: [{}, {}] }}\n",
                alpha.join(", "),
                beta.join(", "),
                t.coeff.re,
                t.coeff.im
            ));
        }
        out
    }
}

/// `[[re, im], [re, im] ; [re, im], [re, im]]` -- rows separated by `;`.
fn parse_matrix(src: &str, size: usize) -> Result<DMatrix<Complex64>> {
    let inner = src
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::InvalidSpec("matrix must be enclosed in [ ]".into()))?;
    let rows: Vec<&str> = inner.split(';').collect();
    if rows.len() != size {
        return Err(Error::InvalidSpec(format!(
            "matrix must have {size} rows, found {}",
            rows.len()
        )));
    }
    let mut out = DMatrix::from_element(size, size, Complex64::new(0.0, 0.0));
    for (r, row) in rows.iter().enumerate() {
        let entries = parse_pair_list(row)?;
        if entries.len() != size {
            return Err(Error::InvalidSpec(format!(
                "matrix row {} must have {size} entries, found {}",
                r + 1,
                entries.len()
            )));
        }
        for (c, v) in entries.into_iter().enumerate() {
            out[(r, c)] = v;
        }
    }
    Ok(out)
}

/// A comma-separated list of `[re, im]` pairs.
fn parse_pair_list(src: &str) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    let mut rest = src.trim();
    while !rest.is_empty() {
        let start = rest
            .find('[')
            .ok_or_else(|| Error::InvalidSpec(format!("expected `[re, im]` in `{rest}`")))?;
        let end = rest[start..]
            .find(']')
            .ok_or_else(|| Error::InvalidSpec("unterminated [re, im] pair".into()))?
            + start;
        let body = &rest[start + 1..end];
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(Error::InvalidSpec(format!(
                "complex number must be [re, im], got `[{body}]`"
            )));
        }
        let re: f64 = parts[0]
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("bad real part `{}`", parts[0])))?;
        let im: f64 = parts[1]
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("bad imaginary part `{}`", parts[1])))?;
        out.push(Complex64::new(re, im));
        rest = rest[end + 1..].trim_start_matches([',', ' ']).trim();
    }
    Ok(out)
}

/// `{ alpha: [..], beta: [..], c: [re, im] }`
fn parse_poly_term(src: &str, n: usize) -> Result<PolyTerm> {
    let inner = src
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| Error::InvalidSpec("poly term must be enclosed in { }".into()))?;
    let mut alpha: Option<Vec<u8>> = None;
    let mut beta: Option<Vec<u8>> = None;
    let mut coeff: Option<Complex64> = None;
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let colon = rest
            .find(':')
            .ok_or_else(|| Error::InvalidSpec(format!("expected `field:` in `{rest}`")))?;
        let field = rest[..colon].trim().trim_start_matches(',').trim();
        let after = &rest[colon + 1..];
        let start = after
            .find('[')
            .ok_or_else(|| Error::InvalidSpec("expected `[` after field name".into()))?;
        let end = after[start..]
            .find(']')
            .ok_or_else(|| Error::InvalidSpec("unterminated list".into()))?
            + start;
        let body = &after[start + 1..end];
        match field {
            "alpha" | "beta" => {
                let exps: Vec<u8> = body
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<u8>()
                            .map_err(|_| Error::InvalidSpec(format!("bad exponent `{s}`")))
                    })
                    .collect::<Result<_>>()?;
                if exps.len() != n {
                    return Err(Error::InvalidSpec(format!(
                        "{field} must have {n} entries"
                    )));
                }
                if field == "alpha" {
                    alpha = Some(exps);
                } else {
                    beta = Some(exps);
                }
            }
            "c" => {
                let parts: Vec<&str> = body.split(',').map(str::trim).collect();
                if parts.len() != 2 {
                    return Err(Error::InvalidSpec("c must be [re, im]".into()));
                }
                coeff = Some(Complex64::new(
                    parts[0]
                        .parse()
                        .map_err(|_| Error::InvalidSpec("bad coefficient".into()))?,
                    parts[1]
                        .parse()
                        .map_err(|_| Error::InvalidSpec("bad coefficient".into()))?,
                ));
            }
            other => {
                return Err(Error::InvalidSpec(format!(
                    "unknown poly field `{other}`"
                )))
            }
        }
        rest = after[end + 1..].trim_start_matches([',', ' ']).trim();
    }
    Ok(PolyTerm {
        alpha: MultiIndex::from_exps(&alpha.ok_or_else(|| {
            Error::InvalidSpec("poly term missing alpha".into())
        })?),
        beta: MultiIndex::from_exps(&beta.ok_or_else(|| {
            Error::InvalidSpec("poly term missing beta".into())
        })?),
        coeff: coeff.ok_or_else(|| Error::InvalidSpec("poly term missing c".into()))?,
    })
}
