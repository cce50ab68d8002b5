use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use lnnd::experiments::{
    read_records, simulate, strong_law_track, summarize, write_outputs, ExperimentConfig,
    PlotData, SUMMARY_FILE,
};
use lnnd::model::{critical_radius, limit_constant};
use lnnd::quadrature::{ball_measure, ball_measure_bounds, expected_isolated, W2Reading};
use lnnd::sampler::sample_cloud;
use lnnd::{ModelParams, SamplingMode, ScalingConstants};

/// Largest nearest-neighbor link of exponential-power point clouds:
/// sampling, quadrature oracles, and Monte Carlo experiments.
#[derive(Debug, Parser)]
#[command(name = "lnnd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// Dimension (at least 2).
    #[arg(long)]
    d: usize,
    /// Tail exponent.
    #[arg(long)]
    alpha: f64,
    /// Tail rate.
    #[arg(long)]
    lambda: f64,
}

impl ParamArgs {
    fn params(&self) -> lnnd::Result<ModelParams> {
        ModelParams::new(self.d, self.lambda, self.alpha)
    }
}

fn parse_mode(s: &str) -> Result<SamplingMode, String> {
    s.parse()
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print A_d, C_d and the unit-ball volumes as JSON.
    Constants {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Sample a point cloud and write it as CSV.
    Sample {
        #[command(flatten)]
        params: ParamArgs,
        /// Number of points (Poisson mean in poisson mode).
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "binomial", value_parser = parse_mode)]
        mode: SamplingMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ball measure I(rho, r) by quadrature, with its sandwich bounds when
    /// rho > 2r.
    VerifyIntegral {
        #[command(flatten)]
        params: ParamArgs,
        /// Distance of the ball center from the origin.
        #[arg(long)]
        rho: f64,
        /// Ball radius.
        #[arg(long)]
        r: f64,
    },
    /// Expected number of isolated points by quadrature.
    ExpectedIsolated {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        n: f64,
        /// Connection radius.
        #[arg(long, conflicts_with = "beta", required_unless_present = "beta")]
        r: Option<f64>,
        /// Use the critical radius r_n(beta) instead of --r.
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        #[arg(long, default_value = "poisson", value_parser = parse_mode)]
        mode: SamplingMode,
    },
    /// Run the Monte Carlo experiment described by a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory, overriding the config's out_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Strong-law ratio along one nested trajectory, as CSV.
    StrongLaw {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 1 << 20)]
        n_max: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute the summary of a records.csv file.
    Analyze {
        #[arg(long)]
        records: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Sampling mode the records were produced in.
        #[arg(long, default_value = "binomial", value_parser = parse_mode)]
        mode: SamplingMode,
        /// Also write plot-data files.
        #[arg(long)]
        plot: bool,
        /// Directory for summary.json and plot files; the summary goes to
        /// stdout and plots next to the records when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn print_json(value: &serde_json::Value) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn write_or_stdout(path: Option<&Path>, body: &[u8]) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().lock().write_all(body)?),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Constants { params } => {
            let p = params.params()?;
            let c = ScalingConstants::new(&p);
            print_json(&json!({
                "d": p.d(),
                "alpha": p.alpha(),
                "lambda": p.lambda(),
                "A_d": c.a_d,
                "C_d": c.c_d,
                "theta_d_minus_1": c.theta_d_minus_1,
                "theta_d": c.theta_d,
                "ball_mass_limit_constant": lnnd::model::ball_mass_limit_constant(&p),
            }))
        }
        Command::Sample {
            params,
            n,
            mode,
            seed,
            out,
        } => {
            let p = params.params()?;
            if n < 1 {
                return Err(lnnd::Error::Config("--n must be at least 1".into()).into());
            }
            let cloud = sample_cloud(&p, n, mode, seed);
            let mut buf = Vec::new();
            cloud.write_csv(&mut buf)?;
            write_or_stdout(out.as_deref(), &buf)
        }
        Command::VerifyIntegral { params, rho, r } => {
            let p = params.params()?;
            let m = ball_measure(&p, rho, r)?;
            let bounds = if rho > 2.0 * r {
                let b = ball_measure_bounds(&p, rho, r, W2Reading::Corrected)?;
                json!({
                    "lower": b.lower,
                    "upper": b.upper,
                    "H": b.h,
                    "w1": b.w1,
                    "w2": b.w2,
                    "E_bound": b.e_bound,
                    "gamma_factor": b.gamma_factor,
                    "contains_value": b.lower <= m.value && m.value <= b.upper,
                })
            } else {
                serde_json::Value::Null
            };
            print_json(&json!({
                "rho": rho,
                "r": r,
                "ball_measure": m.value,
                "ln_ball_measure": m.ln_value,
                "abs_err": m.abs_err,
                "bounds": bounds,
            }))
        }
        Command::ExpectedIsolated {
            params,
            n,
            r,
            beta,
            mode,
        } => {
            let p = params.params()?;
            let radius = match (r, beta) {
                (Some(r), _) => r,
                (None, Some(b)) => critical_radius(&p, n, b)?,
                (None, None) => unreachable!("clap requires one of --r/--beta"),
            };
            let e = expected_isolated(&p, n, radius, mode)?;
            print_json(&json!({
                "n": n,
                "r": radius,
                "beta": beta,
                "mode": mode,
                "expected_isolated": e.value,
                "abs_err": e.error,
                "limit": beta.map(|b| (-b).exp() / limit_constant(&p)),
            }))
        }
        Command::Simulate { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let dir = out.unwrap_or_else(|| cfg.out_dir.clone());
            let (set, summary) = simulate(&cfg)?;
            let (records, json_path) = write_outputs(&dir, &set, &summary)?;
            print_json(&json!({
                "records": records,
                "summary": json_path,
                "gates_pass": summary.gates.all_pass,
            }))
        }
        Command::StrongLaw {
            params,
            n_max,
            seed,
            out,
        } => {
            let p = params.params()?;
            let track = strong_law_track(&p, n_max, seed)?;
            let mut body = String::from("n,strong_ratio\n");
            for (n, ratio) in track {
                body.push_str(&format!("{n},{ratio:?}\n"));
            }
            write_or_stdout(out.as_deref(), body.as_bytes())
        }
        Command::Analyze {
            records,
            params,
            mode,
            plot,
            out,
        } => {
            let p = params.params()?;
            let file = std::fs::File::open(&records)
                .map_err(|e| lnnd::Error::Config(format!("{}: {e}", records.display())))?;
            let set = read_records(std::io::BufReader::new(file))?;
            let summary = summarize(&p, mode, &set)?;
            match &out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    std::fs::write(dir.join(SUMMARY_FILE), summary.to_json())?;
                }
                None => std::io::stdout().lock().write_all(summary.to_json().as_bytes())?,
            }
            if plot {
                let dir = out
                    .clone()
                    .or_else(|| records.parent().map(Path::to_path_buf))
                    .unwrap_or_else(|| PathBuf::from("."));
                PlotData::new(&p, &set).write(&dir)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e
                .downcast_ref::<lnnd::Error>()
                .is_some_and(lnnd::Error::is_usage);
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
