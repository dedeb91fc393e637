//! Run configuration: potential source, grid, tolerances, output.

use anyhow::{anyhow, bail, Context, Result};
use jetcurv_core::potential::{
    random_gl_matrix, random_u1n_matrix, KahlerPotential, PotentialKind, PotentialSpec,
};
use jetcurv_core::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub potential: String,
    pub dim: usize,
    pub radius: Option<f64>,
    pub epsilon: f64,
    pub matrix_seed: u64,
    pub kappa: f64,
    pub form: String,
    /// Per-axis ranges over the 2n real coordinates; empty means the
    /// command's default sampling.
    pub grid: Vec<GridAxis>,
    pub tol_flat: f64,
    pub tol_chsc: f64,
    pub transport_rtol: f64,
    pub fd_step: f64,
    pub seed: u64,
    pub out: Option<String>,
    pub format: String,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_flat > 0.0 && self.tol_chsc > 0.0 && self.transport_rtol > 0.0) {
            bail!("tolerances must be positive");
        }
        if !(self.fd_step > 0.0) {
            bail!("fd step must be positive");
        }
        for axis in &self.grid {
            if axis.count < 1 {
                bail!("grid axis counts must be >= 1");
            }
            if axis.min > axis.max {
                bail!("grid axis has min > max");
            }
        }
        if self.format != "json" && self.format != "csv" {
            bail!("format must be json or csv");
        }
        Ok(())
    }

    /// Resolve the potential: either `builtin:<kind>` or a spec file path.
    pub fn load_potential(&self) -> Result<PotentialSpec> {
        let spec = if let Some(name) = self.potential.strip_prefix("builtin:") {
            let kind = PotentialKind::from_name(name)
                .map_err(|e| anyhow!("unknown builtin potential: {e}"))?;
            let n = self.dim;
            match kind {
                PotentialKind::FubiniStudy => PotentialSpec::fubini_study(n),
                PotentialKind::Hyperbolic => PotentialSpec::hyperbolic(n),
                PotentialKind::Euclidean => PotentialSpec::euclidean(n),
                PotentialKind::GlPullbackFs => {
                    PotentialSpec::gl_pullback_fs(n, random_gl_matrix(n, self.matrix_seed))
                }
                PotentialKind::U1nPullbackCh => {
                    PotentialSpec::u1n_pullback_ch(n, random_u1n_matrix(n, self.matrix_seed))
                }
                PotentialKind::PerturbedFs => PotentialSpec::perturbed_fs(n, self.epsilon),
                PotentialKind::Polynomial => {
                    bail!("polynomial potentials must be given as a spec file")
                }
            }
            .map_err(|e| anyhow!("{e}"))?
        } else {
            let text = std::fs::read_to_string(&self.potential)
                .with_context(|| format!("reading potential spec {}", self.potential))?;
            PotentialSpec::parse_spec_text(&text).map_err(|e| anyhow!("{e}"))?
        };
        if let Some(r) = self.radius {
            return spec.with_radius(r).map_err(|e| anyhow!("{e}"));
        }
        Ok(spec)
    }

    /// Points swept by the command: the explicit grid when given, otherwise a
    /// deterministic default (a 5x5 grid in dimension 1, the origin plus nine
    /// seeded points otherwise). All points are validated against the domain.
    pub fn sample_points(&self, pot: &PotentialSpec) -> Result<Vec<Vec<Complex64>>> {
        let n = pot.dimension();
        let points = if self.grid.is_empty() {
            default_points(pot, self.seed)
        } else {
            grid_points(&self.grid, n)?
        };
        if points.is_empty() {
            bail!("empty grid");
        }
        for p in &points {
            if !pot.contains(p) {
                bail!(
                    "grid point {:?} lies outside the potential's domain (radius {})",
                    p,
                    pot.domain_radius()
                );
            }
        }
        Ok(points)
    }
}

/// Expand per-axis ranges into the product grid over the 2n real coordinates.
/// One axis spec broadcasts to all coordinates; otherwise exactly 2n axes.
fn grid_points(axes: &[GridAxis], n: usize) -> Result<Vec<Vec<Complex64>>> {
    let axes: Vec<GridAxis> = if axes.len() == 1 {
        vec![axes[0].clone(); 2 * n]
    } else if axes.len() == 2 * n {
        axes.to_vec()
    } else {
        bail!(
            "grid must have 1 or {} axis ranges (re/im per coordinate), found {}",
            2 * n,
            axes.len()
        );
    };
    let values: Vec<Vec<f64>> = axes.iter().map(|a| linspace(a)).collect();
    let mut points = vec![Vec::new()];
    for vals in &values {
        let mut next = Vec::with_capacity(points.len() * vals.len());
        for p in &points {
            for v in vals {
                let mut q = p.clone();
                q.push(*v);
                next.push(q);
            }
        }
        points = next;
    }
    Ok(points
        .into_iter()
        .map(|reals| {
            (0..n)
                .map(|i| Complex64::new(reals[2 * i], reals[2 * i + 1]))
                .collect()
        })
        .collect())
}

fn linspace(a: &GridAxis) -> Vec<f64> {
    if a.count == 1 {
        return vec![(a.min + a.max) / 2.0];
    }
    (0..a.count)
        .map(|i| a.min + (a.max - a.min) * i as f64 / (a.count - 1) as f64)
        .collect()
}

fn default_points(pot: &PotentialSpec, seed: u64) -> Vec<Vec<Complex64>> {
    let n = pot.dimension();
    let rho = (0.4f64).min(0.45 * pot.domain_radius());
    if n == 1 {
        let axis = GridAxis {
            min: -rho,
            max: rho,
            count: 5,
        };
        return grid_points(&[axis], 1).expect("default grid");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = vec![vec![Complex64::new(0.0, 0.0); n]];
    let per_coord = rho / (n as f64).sqrt();
    for _ in 0..9 {
        pts.push(
            (0..n)
                .map(|_| {
                    Complex64::new(
                        rng.random_range(-per_coord..per_coord),
                        rng.random_range(-per_coord..per_coord),
                    )
                })
                .collect(),
        );
    }
    pts
}

/// Parse `min:max:count[,min:max:count...]`.
pub fn parse_grid(s: &str) -> Result<Vec<GridAxis>> {
    s.split(',')
        .map(|part| {
            let fields: Vec<&str> = part.split(':').collect();
            if fields.len() != 3 {
                bail!("grid axis must be min:max:count, got `{part}`");
            }
            Ok(GridAxis {
                min: fields[0].trim().parse().context("grid min")?,
                max: fields[1].trim().parse().context("grid max")?,
                count: fields[2].trim().parse().context("grid count")?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing_and_expansion() {
        let axes = parse_grid("-0.4:0.4:3").unwrap();
        let pts = grid_points(&axes, 1).unwrap();
        assert_eq!(pts.len(), 9);
        let axes = parse_grid("0:0.2:2,0:0:1,0:0:1,0:0:1").unwrap();
        let pts = grid_points(&axes, 2).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[1][0], Complex64::new(0.2, 0.0));
    }

    #[test]
    fn count_one_uses_midpoint() {
        let axes = parse_grid("-0.2:0.4:1").unwrap();
        let v = linspace(&axes[0]);
        assert_eq!(v.len(), 1);
        assert!((v[0] - 0.1).abs() < 1e-15);
    }
}
