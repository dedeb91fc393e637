//! jetcurv: curvature verification for Kähler potentials through Hermitian
//! forms on 1-jets.
//!
//! Commands sweep a potential over a point grid and report constant-curvature
//! residuals, Chern-connection flatness of the jet forms, gauge identities,
//! and developing-map residuals. Exit codes: 0 pass, 1 fail, 2 inconclusive,
//! 64 configuration error.

use clap::{Args, Parser, Subcommand};

use jetcurv_cli::commands::{
    cmd_claims, cmd_curvature, cmd_develop, cmd_flatness, cmd_verify_all, develop_csv,
};
use jetcurv_cli::config::{parse_grid, RunConfig};
use jetcurv_cli::report::Report;

const EXIT_CONFIG: i32 = 64;

#[derive(Parser)]
#[command(name = "jetcurv", version, about = "Kähler curvature and jet-form flatness verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Potential: a spec file path or `builtin:<name>` where name is one of
    /// fubini_study, hyperbolic, euclidean, gl_pullback_fs, u1n_pullback_ch,
    /// perturbed_fs.
    #[arg(long, default_value = "builtin:fubini_study")]
    potential: String,

    /// Complex dimension for builtin potentials.
    #[arg(long, default_value_t = 1)]
    dim: usize,

    /// Override the domain ball radius.
    #[arg(long)]
    radius: Option<f64>,

    /// Perturbation strength for builtin:perturbed_fs.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,

    /// Seed for the projective matrix of the pullback builtins.
    #[arg(long, default_value_t = 42)]
    matrix_seed: u64,

    /// Grid as min:max:count[,min:max:count...]; one range broadcasts over
    /// all 2n real coordinates, otherwise give exactly 2n ranges.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,

    /// Flat-verdict threshold for flatness norms (and develop residuals).
    #[arg(long = "tol-flat", default_value_t = 1e-4)]
    tol_flat: f64,

    /// Pass threshold for constant-curvature residuals.
    #[arg(long = "tol-chsc", default_value_t = 1e-6)]
    tol_chsc: f64,

    /// Gram-drift tolerance for parallel transport.
    #[arg(long = "transport-rtol", default_value_t = 1e-6)]
    transport_rtol: f64,

    /// Base finite-difference step.
    #[arg(long = "fd-step", default_value_t = 1e-3)]
    fd_step: f64,

    /// Seed for sampled points and directions (recorded in the report).
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Output file for the report.
    #[arg(long)]
    out: Option<String>,

    /// Output format.
    #[arg(long, default_value = "json", value_parser = ["json", "csv"])]
    format: String,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Constant-curvature residual sweep (kappa from --kappa).
    Curvature {
        #[command(flatten)]
        common: CommonArgs,
        /// Target holomorphic sectional curvature.
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        kappa: f64,
    },
    /// Chern-connection flatness of a jet-form field.
    Flatness {
        #[command(flatten)]
        common: CommonArgs,
        /// Which form: h (positive) or k (signature (1,n)).
        #[arg(long, default_value = "h", value_parser = ["h", "k"])]
        form: String,
    },
    /// Gauge-identity checks at base points.
    Claims {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Developing map onto the model space with pullback residuals.
    Develop {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value = "h", value_parser = ["h", "k"])]
        form: String,
    },
    /// Full equivalence matrix over the builtin registry.
    VerifyAll {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn build_config(common: &CommonArgs, kappa: f64, form: &str) -> Result<RunConfig, anyhow::Error> {
    let grid = match &common.grid {
        Some(s) => parse_grid(s)?,
        None => Vec::new(),
    };
    let config = RunConfig {
        potential: common.potential.clone(),
        dim: common.dim,
        radius: common.radius,
        epsilon: common.epsilon,
        matrix_seed: common.matrix_seed,
        kappa,
        form: form.to_string(),
        grid,
        tol_flat: common.tol_flat,
        tol_chsc: common.tol_chsc,
        transport_rtol: common.transport_rtol,
        fd_step: common.fd_step,
        seed: common.seed,
        out: common.out.clone(),
        format: common.format.clone(),
    };
    config.validate()?;
    Ok(config)
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            std::process::exit(EXIT_CONFIG);
        }
        Err(e) => {
            // --help / --version
            print!("{e}");
            std::process::exit(0);
        }
    };

    if let Ok(threads) = std::env::var("JETCURV_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build_global();
        }
    }

    let (config, runner): (RunConfig, fn(&RunConfig) -> anyhow::Result<Report>) =
        match &cli.command {
            Command::Curvature { common, kappa } => {
                (unwrap_config(build_config(common, *kappa, "h")), cmd_curvature)
            }
            Command::Flatness { common, form } => {
                (unwrap_config(build_config(common, 2.0, form)), cmd_flatness)
            }
            Command::Claims { common } => {
                (unwrap_config(build_config(common, 2.0, "h")), cmd_claims)
            }
            Command::Develop { common, form } => {
                (unwrap_config(build_config(common, 2.0, form)), cmd_develop)
            }
            Command::VerifyAll { common } => {
                (unwrap_config(build_config(common, 2.0, "h")), cmd_verify_all)
            }
        };

    let report = match runner(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("jetcurv: {e:#}");
            let code = if format!("{e:#}").contains("configuration error") {
                EXIT_CONFIG
            } else {
                1
            };
            std::process::exit(code);
        }
    };

    let is_develop = report.command == "develop";
    let rendered = if config.format == "csv" {
        if is_develop {
            develop_csv(&report)
        } else {
            report.to_csv()
        }
    } else {
        match report.to_json() {
            Ok(t) => t,
            Err(e) => {
                eprintln!("jetcurv: serializing report: {e}");
                std::process::exit(1);
            }
        }
    };

    if let Some(path) = &config.out {
        if let Err(e) = std::fs::write(path, &rendered) {
            eprintln!("jetcurv: writing {path}: {e}");
            std::process::exit(1);
        }
    } else {
        println!("{rendered}");
    }

    eprintln!(
        "jetcurv {}: {} points, max residual {:.3e}, verdict {:?} ({:.2}s)",
        report.command,
        report.summary.points,
        report.summary.max_residual,
        report.summary.verdict,
        report.summary.runtime_s
    );
    std::process::exit(report.summary.verdict.exit_code());
}

fn unwrap_config(r: Result<RunConfig, anyhow::Error>) -> RunConfig {
    match r {
        Ok(c) => c,
        Err(e) => {
            eprintln!("jetcurv: configuration error: {e:#}");
            std::process::exit(EXIT_CONFIG);
        }
    }
}
