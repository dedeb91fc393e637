//! The five verification commands.

use std::time::Instant;

use anyhow::{anyhow, Result};
use jetcurv_core::chern::{flatness_norm, flatness_verdict, FlatnessVerdict, NONFLAT_TOL};
use jetcurv_core::develop::{
    developing_map, path_independence, pullback_residual, PathSpec, TransportParams,
};
use jetcurv_core::gauge::verify_claims;
use jetcurv_core::jet_hermitian::{
    field_of, k_matrix_at, quotient_identity_residual, signature_of, FormKind,
};
use jetcurv_core::kahler::{chsc_residual, hsc_of_direction};
use jetcurv_core::potential::{registry, KahlerPotential, PotentialKind, PotentialSpec};
use jetcurv_core::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::report::{PointRecord, Report, Verdict};

fn form_kind(config: &RunConfig) -> Result<FormKind> {
    match config.form.as_str() {
        "h" => Ok(FormKind::H),
        "k" => Ok(FormKind::K),
        other => Err(anyhow!("form must be h or k, got `{other}`")),
    }
}

fn verdict_of(v: FlatnessVerdict) -> Verdict {
    match v {
        FlatnessVerdict::Flat => Verdict::Pass,
        FlatnessVerdict::NonFlat => Verdict::Fail,
        FlatnessVerdict::Inconclusive => Verdict::Inconclusive,
    }
}

/// Constant-curvature residual sweep plus sectional-curvature samples.
pub fn cmd_curvature(config: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let pot = config.load_potential().map_err(config_err)?;
    let points = config.sample_points(&pot).map_err(config_err)?;
    let n = pot.dimension();
    let mut report = Report::new("curvature", config);

    let records: Result<Vec<PointRecord>> = points
        .par_iter()
        .map(|z| {
            let jet = pot.eval_jet(z, 4).map_err(|e| anyhow!("{e}"))?;
            let residual = chsc_residual(&jet, config.kappa).map_err(|e| anyhow!("{e}"))?;
            let mut rec = PointRecord::at(z);
            rec.set("chsc_residual", residual);
            // sectional curvature along the axes and two seeded directions
            let mut dirs: Vec<Vec<Complex64>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                        .collect()
                })
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5ec71044);
            for _ in 0..2 {
                dirs.push(
                    (0..n)
                        .map(|_| {
                            Complex64::new(
                                rng.random_range(-1.0..1.0),
                                rng.random_range(-1.0..1.0),
                            )
                        })
                        .collect(),
                );
            }
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for v in &dirs {
                let h = hsc_of_direction(&jet, v).map_err(|e| anyhow!("{e}"))?;
                lo = lo.min(h);
                hi = hi.max(h);
            }
            rec.set("hsc_min", lo);
            rec.set("hsc_max", hi);
            rec.verdict = if residual < config.tol_chsc {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            Ok(rec)
        })
        .collect();
    report.records = records?;
    report.finalize("residual", start.elapsed().as_secs_f64());
    Ok(report)
}

/// Flatness-norm sweep of the chosen jet-form field.
pub fn cmd_flatness(config: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let pot = config.load_potential().map_err(config_err)?;
    let points = config.sample_points(&pot).map_err(config_err)?;
    let kind = form_kind(config).map_err(config_err)?;
    let mut report = Report::new("flatness", config);

    let records: Result<Vec<PointRecord>> = points
        .par_iter()
        .map(|z| {
            let field = field_of(&pot, kind);
            // base step scaled by the local coordinate magnitude
            let mag = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let step = config.fd_step * mag.max(1.0);
            let norm = flatness_norm(&field, z, step).map_err(|e| anyhow!("{e}"))?;
            let mut rec = PointRecord::at(z);
            rec.set("flatness_norm", norm);
            rec.verdict = verdict_of(flatness_verdict(norm, config.tol_flat, NONFLAT_TOL));
            Ok(rec)
        })
        .collect();
    report.records = records?;
    report.finalize("flatness", start.elapsed().as_secs_f64());
    Ok(report)
}

/// Gauge-identity checks at the configured base points.
pub fn cmd_claims(config: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let pot = config.load_potential().map_err(config_err)?;
    let points = if config.grid.is_empty() {
        claim_base_points(&pot, config.seed)
    } else {
        config.sample_points(&pot).map_err(config_err)?
    };
    let mut report = Report::new("claims", config);
    for p in &points {
        let rep = verify_claims(&pot, p).map_err(|e| anyhow!("{e}"))?;
        let mut rec = PointRecord::at(p);
        for chk in &rep.checks {
            rec.set(&chk.name, chk.residual);
        }
        rec.verdict = if rep.all_passed() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        report.records.push(rec);
    }
    report.finalize("form_", start.elapsed().as_secs_f64());
    Ok(report)
}

fn claim_base_points(pot: &PotentialSpec, seed: u64) -> Vec<Vec<Complex64>> {
    let n = pot.dimension();
    let rho = (0.25f64).min(0.3 * pot.domain_radius());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc1a1);
    let mut pts = vec![vec![Complex64::new(0.0, 0.0); n]];
    for _ in 0..2 {
        pts.push(
            (0..n)
                .map(|_| Complex64::new(rng.random_range(-rho..rho), rng.random_range(-rho..rho)))
                .collect(),
        );
    }
    pts
}

/// Developing-map sweep with pullback residuals and path-independence spot
/// checks.
pub fn cmd_develop(config: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let pot = config.load_potential().map_err(config_err)?;
    let points = config.sample_points(&pot).map_err(config_err)?;
    let kind = form_kind(config).map_err(config_err)?;
    let params = TransportParams {
        fd_step: config.fd_step,
        steps_per_unit: 200,
        rtol: config.transport_rtol,
    };
    let mut report = Report::new("develop", config);

    let records: Result<Vec<PointRecord>> = points
        .par_iter()
        .map(|z| {
            let sample = developing_map(&pot, kind, z, &params).map_err(|e| anyhow!("{e}"))?;
            let residual =
                pullback_residual(&pot, kind, z, &params).map_err(|e| anyhow!("{e}"))?;
            let mut rec = PointRecord::at(z);
            for (a, w) in sample.homogeneous.iter().enumerate() {
                rec.set(&format!("w{a}_re", ), w.re);
                rec.set(&format!("w{a}_im"), w.im);
            }
            rec.set("pullback_residual", residual);
            rec.verdict = if residual < config.tol_flat {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            Ok(rec)
        })
        .collect();
    report.records = records?;

    // path-independence spot checks at up to two off-origin points
    let mut checked = 0;
    for z in points.iter() {
        if checked >= 2 {
            break;
        }
        if z.iter().map(|c| c.norm_sqr()).sum::<f64>() < 1e-6 {
            continue;
        }
        let diff = path_independence(
            &pot,
            kind,
            &PathSpec::radial(z),
            &PathSpec::staircase(z),
            &params,
        )
        .map_err(|e| anyhow!("{e}"))?;
        let mut rec = PointRecord::labeled(&format!("path-independence #{}", checked + 1));
        rec.point = z.iter().map(|c| [c.re, c.im]).collect();
        rec.set("path_difference", diff);
        rec.verdict = if diff < config.tol_flat {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        report.records.push(rec);
        checked += 1;
    }
    report.finalize("residual", start.elapsed().as_secs_f64());
    Ok(report)
}

/// Grid CSV for the developing map, in fixed column order:
/// coordinates, homogeneous components, pullback residual.
pub fn develop_csv(report: &Report) -> String {
    let ncoords = report
        .records
        .iter()
        .map(|r| r.point.len())
        .max()
        .unwrap_or(0);
    let nw = report
        .records
        .iter()
        .flat_map(|r| r.values.keys())
        .filter_map(|k| {
            k.strip_prefix('w')
                .and_then(|rest| rest.strip_suffix("_re"))
                .and_then(|idx| idx.parse::<usize>().ok())
        })
        .max()
        .map(|top| top + 1)
        .unwrap_or(1);
    let mut header = Vec::new();
    for i in 0..ncoords {
        header.push(format!("re_z{}", i + 1));
        header.push(format!("im_z{}", i + 1));
    }
    for a in 0..nw {
        header.push(format!("re_w{a}"));
        header.push(format!("im_w{a}"));
    }
    header.push("pullback_residual".into());
    let mut out = header.join(",") + "\n";
    for r in report.records.iter().filter(|r| !r.values.is_empty()) {
        if !r.values.contains_key("pullback_residual") {
            continue;
        }
        let mut row = Vec::new();
        for i in 0..ncoords {
            row.push(format!("{}", r.point[i][0]));
            row.push(format!("{}", r.point[i][1]));
        }
        for a in 0..nw {
            row.push(
                r.values
                    .get(&format!("w{a}_re"))
                    .map(|v| format!("{v}"))
                    .unwrap_or_default(),
            );
            row.push(
                r.values
                    .get(&format!("w{a}_im"))
                    .map(|v| format!("{v}"))
                    .unwrap_or_default(),
            );
        }
        row.push(format!("{}", r.values["pullback_residual"]));
        out.push_str(&(row.join(",") + "\n"));
    }
    out
}

/// Full equivalence matrix over the registry: curvature residuals at
/// kappa = +-2, flatness of both forms, signature, quotient identity, and
/// gauge claims, with the expected pattern asserted.
pub fn cmd_verify_all(config: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let mut report = Report::new("verify-all", config);
    let specs = registry(config.dim, config.seed);

    let results: Result<Vec<Vec<PointRecord>>> = specs
        .par_iter()
        .enumerate()
        .map(|(idx, spec)| verify_one(config, idx, spec))
        .collect();
    for recs in results? {
        report.records.extend(recs);
    }
    report.finalize("residual", start.elapsed().as_secs_f64());
    Ok(report)
}

fn verify_one(config: &RunConfig, idx: usize, spec: &PotentialSpec) -> Result<Vec<PointRecord>> {
    let name = spec.kind().name();
    let points = sweep_points(spec, config.seed.wrapping_add(idx as u64));
    let mut rec = PointRecord::labeled(name);

    let mut max_chsc2 = 0.0f64;
    let mut max_chscm2 = 0.0f64;
    let mut max_quotient = 0.0f64;
    for z in &points {
        let jet = spec.eval_jet(z, 4).map_err(|e| anyhow!("{e}"))?;
        max_chsc2 = max_chsc2.max(chsc_residual(&jet, 2.0).map_err(|e| anyhow!("{e}"))?);
        max_chscm2 = max_chscm2.max(chsc_residual(&jet, -2.0).map_err(|e| anyhow!("{e}"))?);
        let (rh, rk) = quotient_identity_residual(&jet).map_err(|e| anyhow!("{e}"))?;
        max_quotient = max_quotient.max(rh).max(rk);
    }
    let mut max_flat_h = 0.0f64;
    let mut max_flat_k = 0.0f64;
    for z in &points {
        let fh = field_of(spec, FormKind::H);
        max_flat_h = max_flat_h.max(flatness_norm(&fh, z, config.fd_step).map_err(|e| anyhow!("{e}"))?);
        let fk = field_of(spec, FormKind::K);
        max_flat_k = max_flat_k.max(flatness_norm(&fk, z, config.fd_step).map_err(|e| anyhow!("{e}"))?);
    }
    rec.set("chsc_residual_kappa2", max_chsc2);
    rec.set("chsc_residual_kappa_minus2", max_chscm2);
    rec.set("flatness_h", max_flat_h);
    rec.set("flatness_k", max_flat_k);
    rec.set("quotient_residual", max_quotient);

    // signature of the indefinite form where the theory asserts it
    let expect_lorentz = matches!(
        spec.kind(),
        PotentialKind::Hyperbolic | PotentialKind::U1nPullbackCh
    );
    let mut signature_ok = true;
    if expect_lorentz {
        for z in &points {
            let k = k_matrix_at(&spec.eval_jet(z, 2).map_err(|e| anyhow!("{e}"))?)
                .map_err(|e| anyhow!("{e}"))?;
            let sig = signature_of(&k).map_err(|e| anyhow!("{e}"))?;
            if sig != (1, spec.dimension()) {
                signature_ok = false;
            }
        }
    }
    rec.set("signature_ok", if signature_ok { 1.0 } else { 0.0 });

    // gauge claims at the origin and two seeded base points
    let mut claims_ok = true;
    for p in claim_base_points(spec, config.seed.wrapping_add(97 * idx as u64)) {
        let cr = verify_claims(spec, &p).map_err(|e| anyhow!("{e}"))?;
        if !cr.all_passed() {
            claims_ok = false;
        }
    }
    rec.set("claims_ok", if claims_ok { 1.0 } else { 0.0 });

    // biconditional pattern: flat exactly when the matching curvature
    // residual vanishes
    let vh = flatness_verdict(max_flat_h, config.tol_flat, NONFLAT_TOL);
    let vk = flatness_verdict(max_flat_k, config.tol_flat, NONFLAT_TOL);
    let chsc2 = max_chsc2 < config.tol_chsc;
    let chscm2 = max_chscm2 < config.tol_chsc;
    let mut verdict = Verdict::Pass;
    if vh == FlatnessVerdict::Inconclusive || vk == FlatnessVerdict::Inconclusive {
        verdict = Verdict::Inconclusive;
    } else {
        let h_flat = vh == FlatnessVerdict::Flat;
        let k_flat = vk == FlatnessVerdict::Flat;
        let biconditional = (chsc2 == h_flat) && (chscm2 == k_flat);
        let expected = match spec.kind() {
            PotentialKind::FubiniStudy | PotentialKind::GlPullbackFs => h_flat && chsc2 && !k_flat,
            PotentialKind::Hyperbolic | PotentialKind::U1nPullbackCh => {
                k_flat && chscm2 && !h_flat
            }
            PotentialKind::Euclidean | PotentialKind::PerturbedFs => !h_flat && !k_flat,
            PotentialKind::Polynomial => true,
        };
        if !(biconditional && expected && max_quotient < 1e-9 && signature_ok && claims_ok) {
            verdict = Verdict::Fail;
        }
    }
    rec.verdict = verdict;
    Ok(vec![rec])
}

fn sweep_points(pot: &PotentialSpec, seed: u64) -> Vec<Vec<Complex64>> {
    let n = pot.dimension();
    let rho = (0.3f64).min(0.4 * pot.domain_radius()) / (n as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = vec![vec![Complex64::new(0.0, 0.0); n]];
    for _ in 0..9 {
        pts.push(
            (0..n)
                .map(|_| Complex64::new(rng.random_range(-rho..rho), rng.random_range(-rho..rho)))
                .collect(),
        );
    }
    pts
}

/// Tag for errors that should exit with the configuration code.
pub fn config_err(e: anyhow::Error) -> anyhow::Error {
    e.context("configuration error")
}
