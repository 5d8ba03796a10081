//! Command-line front end: symmetrization, energy evaluation, level-set
//! derivatives, height-interpolation curves, stationary-profile checks,
//! fixture generation, and the acceptance suite.
//!
//! Exit codes: 0 success, 2 configuration error, 3 failed check.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rearrange::energy::{
    gagliardo, interaction_energy, local_seminorm, potential_energy, regularized_energy,
    thin_film_energy, KernelSpec,
};
use rearrange::fixtures::{make_fixture, Fixture};
use rearrange::good::{
    asymmetry_decomposition, local_derivative, nonlocal_derivative, GoodProfile, LevelQuadrature,
};
use rearrange::grid::GridFunction;
use rearrange::height::{
    convexity_curve, height_function, t_grid, CurveFunctional, CurveParams,
};
use rearrange::radial::RadialProfile;
use rearrange::report::{num, record};
use rearrange::suite::run_acceptance;
use rearrange::symmetrize::{
    steiner_continuous, steiner_truncated, SteinerParams, SymAxis, TruncationSpec,
};
use rearrange::thinfilm::{explicit_solution, stationary_residual};
use rearrange::util::install_thread_cap;

#[derive(Parser)]
#[command(name = "rearrange", version, about = "continuous Steiner symmetrization laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct KernelArgs {
    /// Fractional order s in (0,1).
    #[arg(long, default_value_t = 0.3)]
    s: f64,
    /// Integrability exponent p in (1,∞).
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Kernel regularization ε ≥ 0.
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Continuous (or truncated) Steiner symmetrization of a grid function.
    Symmetrize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        tau: f64,
        /// Truncation height; when set, the truncated motion is used.
        #[arg(long)]
        h0: Option<f64>,
        /// Symmetrization axis: last or first.
        #[arg(long, default_value = "last")]
        axis: String,
        /// Number of midpoint heights.
        #[arg(long, default_value_t = 512)]
        heights: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate an energy functional on a grid function.
    Energy {
        #[arg(long)]
        input: PathBuf,
        /// gagliardo | regularized | local | thinfilm | interaction-r2 | potential-r2
        #[arg(long)]
        functional: String,
        #[command(flatten)]
        kernel: KernelArgs,
        /// Confinement strength for the thin-film energy.
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Level-set derivative of a good profile.
    Derivative {
        #[arg(long)]
        input: PathBuf,
        /// nonlocal | local | asymmetry
        #[arg(long, default_value = "nonlocal")]
        kind: String,
        #[command(flatten)]
        kernel: KernelArgs,
        /// Box half-width of the regularized speed (local derivative).
        #[arg(long, default_value_t = 1.0)]
        eps_speed: f64,
        /// Number of midpoint heights of the level quadrature.
        #[arg(long, default_value_t = 256)]
        heights: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Functional along the height interpolation between two radial profiles.
    Interpolate {
        #[arg(long)]
        f0: PathBuf,
        #[arg(long)]
        f1: PathBuf,
        /// hs | lp | w1p | potential
        #[arg(long)]
        functional: String,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, default_value_t = 21)]
        t_steps: usize,
        /// Height-function samples.
        #[arg(long, default_value_t = 1024)]
        heights: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Quadratic-fit residual of the fractional Laplacian of the explicit
    /// stationary profile.
    VerifyStationary {
        #[arg(long, default_value_t = 0.25)]
        s: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Radial samples of the profile.
        #[arg(long, default_value_t = 8192)]
        grid_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a named fixture file.
    MakeFixture {
        name: String,
        #[arg(long, default_value_t = 1024)]
        grid_n: usize,
        #[arg(long, default_value_t = 0.25)]
        s: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a named check suite (currently: acceptance).
    Suite {
        name: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Output directory for the manifest.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    install_thread_cap();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Errors that indicate a bad configuration or missing input (exit 2);
/// failed numeric checks return exit 3 through the Ok branch.
type ConfigResult = Result<ExitCode, Box<dyn std::error::Error>>;

fn read_grid(path: &Path) -> Result<GridFunction, Box<dyn std::error::Error>> {
    if !path.exists() {
        return Err(format!("input {} does not exist", path.display()).into());
    }
    Ok(GridFunction::read_from(path)?)
}

fn run(cli: Cli) -> ConfigResult {
    match cli.command {
        Command::Symmetrize {
            input,
            tau,
            h0,
            axis,
            heights,
            out,
        } => {
            let f = read_grid(&input)?;
            let axis = match axis.as_str() {
                "last" => SymAxis::Last,
                "first" => SymAxis::First,
                other => return Err(format!("unknown axis {other:?}").into()),
            };
            let params = SteinerParams::new(heights);
            let g = match h0 {
                None => steiner_continuous(&f, tau, axis, &params)?,
                Some(h0) => {
                    let r = steiner_truncated(&f, tau, &TruncationSpec::new(h0), axis, &params)?;
                    if r.clipped_spans > 0 {
                        eprintln!("note: {} spans clipped to restore nesting", r.clipped_spans);
                    }
                    r.grid
                }
            };
            g.write_to(&out)?;
            println!(
                "{}",
                record(
                    "symmetrize",
                    &[
                        ("tau", num(tau)),
                        ("mass_in", num(f.integral())),
                        ("mass_out", num(g.integral())),
                        ("out", out.display().to_string()),
                    ],
                )
                .trim_end()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Energy {
            input,
            functional,
            kernel,
            beta,
            out,
        } => {
            let f = read_grid(&input)?;
            let spec = KernelSpec::new(kernel.s, kernel.p, kernel.eps, f.dim());
            let mut fields: Vec<(&str, String)> = vec![
                ("functional", functional.clone()),
                ("s", num(kernel.s)),
                ("p", num(kernel.p)),
                ("eps", num(kernel.eps)),
            ];
            match functional.as_str() {
                "gagliardo" => {
                    let r = gagliardo(&f, &spec)?;
                    fields.push(("value", num(r.value)));
                    fields.push(("error_estimate", num(r.error_estimate)));
                }
                "regularized" => {
                    let r = regularized_energy(&f, &spec)?;
                    fields.push(("value", num(r.value)));
                    fields.push(("c_eps", num(r.c_eps.unwrap_or(f64::NAN))));
                    fields.push(("i_eps", num(r.i_eps.unwrap_or(f64::NAN))));
                }
                "local" => {
                    fields.push(("value", num(local_seminorm(&f, kernel.p))));
                }
                "thinfilm" => {
                    fields.push(("beta", num(beta)));
                    fields.push(("value", num(thin_film_energy(&f, &spec, beta)?)));
                }
                "interaction-r2" => {
                    fields.push(("value", num(interaction_energy(&f, |r| r * r))));
                }
                "potential-r2" => {
                    fields.push(("value", num(potential_energy(&f, |r| r * r))));
                }
                other => return Err(format!("unknown functional {other:?}").into()),
            }
            let line = record("energy", &fields);
            print!("{line}");
            if let Some(out) = out {
                std::fs::write(out, line)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Derivative {
            input,
            kind,
            kernel,
            eps_speed,
            heights,
            out,
        } => {
            if !input.exists() {
                return Err(format!("input {} does not exist", input.display()).into());
            }
            let g = GoodProfile::read_from(&input)?;
            let spec = KernelSpec::new(kernel.s, kernel.p, kernel.eps, g.dim);
            let quad = LevelQuadrature::new(heights);
            let mut fields: Vec<(&str, String)> = vec![
                ("kind", kind.clone()),
                ("s", num(kernel.s)),
                ("p", num(kernel.p)),
                ("eps", num(kernel.eps)),
            ];
            match kind.as_str() {
                "nonlocal" => {
                    let d = nonlocal_derivative(&g, &spec, &quad)?;
                    fields.push(("value", num(d.value)));
                    fields.push(("error_estimate", num(d.error_estimate)));
                }
                "local" => {
                    let d = local_derivative(&g, kernel.p, eps_speed, &quad)?;
                    fields.push(("eps_speed", num(eps_speed)));
                    fields.push(("value", num(d.value)));
                    if let Some(f2) = d.factored {
                        fields.push(("factored", num(f2)));
                    }
                    fields.push(("skipped_cells", d.skipped_cells.to_string()));
                }
                "asymmetry" => {
                    let a = asymmetry_decomposition(&g, &spec, &quad)?;
                    fields.push(("plus_measure", num(a.plus_measure)));
                    fields.push(("zero_measure", num(a.zero_measure)));
                    fields.push(("minus_measure", num(a.minus_measure)));
                    fields.push(("value", num(a.derivative)));
                }
                other => return Err(format!("unknown derivative kind {other:?}").into()),
            }
            let line = record("derivative", &fields);
            print!("{line}");
            if let Some(out) = out {
                std::fs::write(out, line)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Interpolate {
            f0,
            f1,
            functional,
            kernel,
            t_steps,
            heights,
            out,
        } => {
            let p0 = RadialProfile::read_from(&f0)?;
            let p1 = RadialProfile::read_from(&f1)?;
            let h0 = height_function(&p0, heights)?;
            let h1 = height_function(&p1, heights)?;
            let func = match functional.as_str() {
                "hs" => CurveFunctional::Hs { s: kernel.s },
                "lp" => CurveFunctional::Lp { p: kernel.p },
                "w1p" => CurveFunctional::W1p { p: kernel.p },
                "potential" => CurveFunctional::PotentialQuadratic,
                other => return Err(format!("unknown functional {other:?}").into()),
            };
            let ts = t_grid(t_steps.max(3));
            let curve = convexity_curve(&h0, &h1, func, &ts, &CurveParams::default())?;
            let mut csv = String::from("t,value,second_difference\n");
            for (k, (&t, &v)) in curve.ts.iter().zip(&curve.values).enumerate() {
                let sd = if k == 0 || k + 1 == curve.ts.len() {
                    String::new()
                } else {
                    num(curve.second_diffs[k - 1])
                };
                csv.push_str(&format!("{},{},{}\n", num(t), num(v), sd));
            }
            std::fs::write(&out, csv)?;
            println!(
                "{}",
                record(
                    "interpolate",
                    &[
                        ("functional", functional),
                        ("min_second_difference", num(curve.min_second_diff)),
                        ("out", out.display().to_string()),
                    ],
                )
                .trim_end()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyStationary {
            s,
            lambda,
            grid_n,
            out,
        } => {
            let sp = explicit_solution(lambda, s, 1, grid_n + 1);
            let fit = stationary_residual(&sp)?;
            let pass = fit.relative_residual <= 1e-2;
            let line = record(
                "verify-stationary",
                &[
                    ("s", num(s)),
                    ("lambda", num(lambda)),
                    ("residual", num(fit.relative_residual)),
                    ("multiplier", num(fit.multiplier)),
                    ("curvature", num(fit.curvature)),
                    ("status", if pass { "PASS".into() } else { "FAIL".into() }),
                ],
            );
            print!("{line}");
            if let Some(out) = out {
                std::fs::write(out, line)?;
            }
            Ok(if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
        Command::MakeFixture {
            name,
            grid_n,
            s,
            lambda,
            out,
        } => {
            match make_fixture(&name, grid_n, s, lambda) {
                Some(Fixture::Grid(g)) => g.write_to(&out)?,
                Some(Fixture::Radial(r)) => r.write_to(&out)?,
                Some(Fixture::Good(g)) => g.write_to(&out)?,
                None => return Err(format!("unknown fixture {name:?}").into()),
            }
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Suite { name, seed, out } => {
            if name != "acceptance" {
                return Err(format!("unknown suite {name:?}").into());
            }
            let report = run_acceptance(seed);
            for r in &report.results {
                println!("{}", r.line());
            }
            let manifest = report.manifest();
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("acceptance_manifest.txt"), &manifest)?;
            }
            Ok(if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
    }
}
