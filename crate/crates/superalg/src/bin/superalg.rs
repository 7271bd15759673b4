//! Command-line surface for the superintegrable-algebra workbench.

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use superalg::algebra::{analyze_system, AlgebraOptions};
use superalg::catalog::{builtin_systems, builtin_table, instantiate, load_system, SystemDef};
use superalg::dynamics::{constants_of, integrate, trajectory_csv, Method, PhasePoint};
use superalg::expr::{parse_rational, IdentityOptions, Rat};
use superalg::trajectory::{
    builtin_trajectory_equation, curves_csv, curves_svg, eliminate_momenta, trace_curves, Window,
};

#[derive(Parser)]
#[command(
    name = "superalg",
    about = "Polynomial Poisson algebras of 2D superintegrable systems: derivation, \
             verification, and algebraic trajectories",
    version
)]
struct Cli {
    /// Seed for all randomized identity testing and fitting.
    #[arg(long, global = true, env = "SUPERALG_SEED", default_value_t = 42)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in systems with their tabulated algebra types.
    List,
    /// Derive the polynomial algebra report for a built-in system or a
    /// system-definition JSON file.
    Analyze {
        /// Built-in system name or path to a JSON document.
        system: String,
        /// Also write the JSON report to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Re-derive every built-in system and compare against the expected
    /// algebra; exits nonzero on any mismatch.
    Validate {
        /// Check the full catalog (default when no names are given).
        #[arg(long)]
        all: bool,
        /// Specific systems to check.
        systems: Vec<String>,
    },
    /// Trace the implicit trajectory curve for given integral values.
    Trace {
        system: String,
        /// Integral values E,l,a (rationals, e.g. 10,2,3 or -1/10,0,1/10).
        #[arg(long, value_parser = parse_constants, allow_hyphen_values = true)]
        constants: Constants,
        /// Window x_min,x_max,y_min,y_max.
        #[arg(long, value_parser = parse_window, default_value = "-5,5,-5,5", allow_hyphen_values = true)]
        window: Window,
        /// Nodes per grid side.
        #[arg(long, default_value_t = 256)]
        grid: usize,
        /// Write vertices as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write an SVG rendering.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Eliminate the momenta from {H = E, L = l, A = a} by resultants.
    Eliminate {
        system: String,
        #[arg(long, value_parser = parse_constants, allow_hyphen_values = true)]
        constants: Constants,
        /// Write the implicit equation to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate Hamilton's equations and report conserved-quantity drift.
    Integrate {
        system: String,
        /// Initial condition x,y,px,py (rationals).
        #[arg(long, value_parser = parse_ic, allow_hyphen_values = true)]
        ic: InitialCondition,
        #[arg(long = "t-end")]
        t_end: f64,
        #[arg(long)]
        dt: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Rk4)]
        method: MethodArg,
        /// Write the trajectory as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Rk4,
    Leapfrog,
}

#[derive(Clone)]
struct Constants(Rat, Rat, Rat);

#[derive(Clone)]
struct InitialCondition([Rat; 4]);

fn parse_rat_list(s: &str, n: usize) -> Result<Vec<Rat>, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != n {
        return Err(format!("expected {n} comma-separated rationals"));
    }
    parts
        .iter()
        .map(|p| parse_rational(p).ok_or_else(|| format!("`{p}` is not a rational")))
        .collect()
}

fn parse_constants(s: &str) -> Result<Constants, String> {
    let v = parse_rat_list(s, 3)?;
    Ok(Constants(v[0].clone(), v[1].clone(), v[2].clone()))
}

fn parse_ic(s: &str) -> Result<InitialCondition, String> {
    let v = parse_rat_list(s, 4)?;
    Ok(InitialCondition([
        v[0].clone(),
        v[1].clone(),
        v[2].clone(),
        v[3].clone(),
    ]))
}

fn parse_window(s: &str) -> Result<Window, String> {
    let v = parse_rat_list(s, 4)?;
    let f: Vec<f64> = v
        .iter()
        .map(|r| num_traits_to_f64(r).ok_or_else(|| "window bound overflow".to_string()))
        .collect::<Result<_, _>>()?;
    Ok(Window {
        x_min: f[0],
        x_max: f[1],
        y_min: f[2],
        y_max: f[3],
    })
}

fn num_traits_to_f64(r: &Rat) -> Option<f64> {
    use num_traits::ToPrimitive;
    r.to_f64()
}

/// Resolve a built-in name or a JSON document path.
fn resolve_system(spec: &str, seed: u64) -> Result<SystemDef, String> {
    if builtin_systems().contains(&spec) {
        return instantiate(spec, &BTreeMap::new()).map_err(|e| e.to_string());
    }
    let path = PathBuf::from(spec);
    if path.exists() {
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let opts = IdentityOptions {
            seed,
            ..Default::default()
        };
        return load_system(&text, &opts).map_err(|e| e.to_string());
    }
    Err(format!(
        "`{spec}` is neither a built-in system nor an existing file; \
         run `superalg list` for the catalog"
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let seed = cli.seed;
    match cli.command {
        Command::List => {
            for (name, label) in builtin_table() {
                println!("{name:<24} {label}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze { system, json } => {
            let sys = resolve_system(&system, seed)?;
            let report = analyze_system(&sys, &AlgebraOptions::with_seed(seed))
                .map_err(|e| e.to_string())?;
            let doc = serde_json::to_string_pretty(&report.to_json()).unwrap();
            if let Some(path) = &json {
                std::fs::write(path, format!("{doc}\n")).map_err(|e| e.to_string())?;
            }
            println!("{doc}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { all, systems } => {
            let names: Vec<String> = if systems.is_empty() || all {
                builtin_systems().iter().map(|s| s.to_string()).collect()
            } else {
                systems
            };
            for n in &names {
                if !builtin_systems().contains(&n.as_str()) {
                    return Err(format!("unknown system `{n}`"));
                }
            }
            let results: Vec<(String, Result<Vec<String>, String>)> = names
                .par_iter()
                .map(|name| {
                    let outcome = (|| {
                        let sys = instantiate(name, &BTreeMap::new())
                            .map_err(|e| e.to_string())?;
                        let report = analyze_system(&sys, &AlgebraOptions::with_seed(seed))
                            .map_err(|e| e.to_string())?;
                        let expected = sys
                            .expected
                            .as_ref()
                            .ok_or_else(|| "no expected data".to_string())?;
                        Ok::<Vec<String>, String>(report.diff_expected(expected))
                    })();
                    (name.clone(), outcome)
                })
                .collect();
            let mut failed = false;
            for (name, outcome) in results {
                match outcome {
                    Ok(diffs) if diffs.is_empty() => println!("[ok]       {name}"),
                    Ok(diffs) => {
                        failed = true;
                        println!("[mismatch] {name}");
                        for d in diffs {
                            println!("           {d}");
                        }
                    }
                    Err(e) => {
                        failed = true;
                        println!("[error]    {name}: {e}");
                    }
                }
            }
            Ok(if failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Trace {
            system,
            constants,
            window,
            grid,
            csv,
            svg,
        } => {
            let sys = resolve_system(&system, seed)?;
            let eq = builtin_trajectory_equation(
                &system,
                &(constants.0.clone(), constants.1.clone(), constants.2.clone()),
            )
            .map_err(|e| e.to_string())?;
            let cs = trace_curves(&eq, &window, grid, &sys.domain.exclusions)
                .map_err(|e| e.to_string())?;
            if cs.curves.is_empty() {
                println!("no sign change on the window: empty curve set");
            } else {
                println!(
                    "{} curve(s), {} vertices, max residual {:.3e}",
                    cs.curves.len(),
                    cs.curves.iter().map(Vec::len).sum::<usize>(),
                    cs.residual_stats.max
                );
            }
            if let Some(path) = &csv {
                std::fs::write(path, curves_csv(&cs)).map_err(|e| e.to_string())?;
            }
            if let Some(path) = &svg {
                std::fs::write(path, curves_svg(&cs)).map_err(|e| e.to_string())?;
            }
            if csv.is_none() && svg.is_none() {
                print!("{}", curves_csv(&cs));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Eliminate {
            system,
            constants,
            out,
        } => {
            let sys = resolve_system(&system, seed)?;
            let eq = eliminate_momenta(&sys, &(constants.0, constants.1, constants.2))
                .map_err(|e| e.to_string())?;
            let text = format!("{eq}\n");
            match out {
                Some(path) => std::fs::write(path, text).map_err(|e| e.to_string())?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Integrate {
            system,
            ic,
            t_end,
            dt,
            method,
            csv,
        } => {
            let sys = resolve_system(&system, seed)?;
            let [x, y, px, py] = ic.0;
            let p = PhasePoint::from_rationals(x, y, px, py);
            let c = constants_of(&sys, &p).map_err(|e| e.to_string())?;
            let m = match method {
                MethodArg::Rk4 => Method::Rk4,
                MethodArg::Leapfrog => Method::Leapfrog,
            };
            let traj = integrate(&sys, &p, t_end, dt, m).map_err(|e| e.to_string())?;
            println!(
                "integrals at start: H = {:.12e}, L = {:.12e}, A = {:.12e}",
                c[0].to_f64(),
                c[1].to_f64(),
                c[2].to_f64()
            );
            println!(
                "drift over [0, {t_end}]: H {:.3e}, L {:.3e}, A {:.3e} ({} stored samples)",
                traj.drift[0],
                traj.drift[1],
                traj.drift[2],
                traj.samples.len()
            );
            if let Some(path) = &csv {
                std::fs::write(path, trajectory_csv(&sys, &p, &traj))
                    .map_err(|e| e.to_string())?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
