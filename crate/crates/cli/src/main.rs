use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use rearr_core::hardy::{hardy_inequality_probe, HardyCondition, HardyWeights};
use rearr_core::potentials::{rh_constant_estimate, BallFamily, Potential};
use rearr_core::radial::solve_radial;
use rearr_core::rearrange::decreasing_rearrangement;
use rearr_core::ri_spaces::{lorentz_quasinorm, lorentz_zygmund_quasinorm};
use rearr_core::verify::run_batch;
use rearr_core::{GridFunction, LorentzExponents, LorentzZygmundExponents, RadialProblem, RearrangementProfile};

/// Rearrangements, Lorentz-scale norms and radial Schrödinger verification.
#[derive(Parser)]
#[command(name = "rearr", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decreasing rearrangement of a `measure,value` CSV, printed as `s,value`.
    Rearrange { csv: PathBuf },
    /// Quasi-norm of a grid function (`measure,value`) or profile (`s,value`).
    ///
    /// SPACE is `lebesgue:p`, `lorentz:q,s` or `zygmund:q,k,beta`; `inf` is
    /// accepted for any exponent.
    Norm {
        #[arg(long)]
        space: String,
        csv: PathBuf,
    },
    /// Solves a radial problem from a TOML file and prints `r,u,du`.
    Solve { config: PathBuf },
    /// Runs a verification batch and writes reports into `--out`.
    Verify {
        config: PathBuf,
        #[arg(long, default_value = "reports")]
        out: PathBuf,
    },
    /// Evaluates a weighted Hardy condition and probes its inequality.
    Hardy {
        #[arg(long, value_parser = parse_condition)]
        cond: HardyCondition,
        config: PathBuf,
    },
    /// Scans reverse Hölder quotients of a potential over a ball family.
    ///
    /// The potential is JSON, inline TOML, or a shorthand: `constant:c`,
    /// `abs_power:coef,gamma`, `x1:alpha`.
    Rh {
        #[arg(long)]
        potential: String,
        #[arg(long, value_parser = parse_exponent)]
        q: f64,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Use the refined ball family.
        #[arg(long)]
        doubled: bool,
    },
}

fn parse_condition(s: &str) -> std::result::Result<HardyCondition, String> {
    s.parse().map_err(|e: rearr_core::Error| e.to_string())
}

fn parse_exponent(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t == "∞" {
        return Ok(f64::INFINITY);
    }
    t.parse().map_err(|_| format!("not a number: `{s}`"))
}

fn parse_list(s: &str, want: usize, what: &str) -> Result<Vec<f64>> {
    let v = s.split(',').map(parse_exponent).collect::<std::result::Result<Vec<_>, _>>().map_err(|e| anyhow!(e))?;
    if v.len() != want {
        bail!("{what} takes {want} parameter(s), got `{s}`");
    }
    Ok(v)
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("cannot open {}", path.display()))?))
}

fn read_grid(path: &Path) -> Result<GridFunction> {
    Ok(GridFunction::read_csv(open(path)?, path.display().to_string())?)
}

/// Reads either CSV form, dispatching on the header.
fn read_profile(path: &Path) -> Result<RearrangementProfile> {
    let mut r = open(path)?;
    let mut header = String::new();
    r.read_line(&mut header)?;
    let mut text = header.clone();
    r.read_to_string(&mut text)?;
    if header.trim().starts_with("s,") || header.trim() == "s" {
        Ok(RearrangementProfile::read_csv(text.as_bytes())?)
    } else {
        Ok(decreasing_rearrangement(&GridFunction::read_csv(text.as_bytes(), path.display().to_string())?))
    }
}

fn norm(space: &str, profile: &RearrangementProfile) -> Result<serde_json::Value> {
    let (kind, params) = space.split_once(':').ok_or_else(|| anyhow!("space must look like `kind:params`, got `{space}`"))?;
    let value = match kind.trim() {
        "lebesgue" => {
            let p = parse_list(params, 1, "lebesgue")?[0];
            lorentz_quasinorm(profile, LorentzExponents::new(p, p)?)
        }
        "lorentz" => {
            let e = parse_list(params, 2, "lorentz")?;
            lorentz_quasinorm(profile, LorentzExponents::new(e[0], e[1])?)
        }
        "zygmund" => {
            let e = parse_list(params, 3, "zygmund")?;
            lorentz_zygmund_quasinorm(profile, LorentzZygmundExponents::new(e[0], e[1], e[2])?)
        }
        other => bail!("unknown space `{other}`; expected lebesgue, lorentz or zygmund"),
    };
    Ok(serde_json::json!({ "space": space, "norm": value }))
}

fn hardy(cond: HardyCondition, config: &Path) -> Result<serde_json::Value> {
    let text = fs::read_to_string(config).with_context(|| format!("cannot read {}", config.display()))?;
    let table: toml::Table = toml::from_str(&text).with_context(|| format!("cannot parse {}", config.display()))?;
    let raw: HardyWeights = toml::Value::Table(table.clone()).try_into().context("weights section")?;
    let hw = HardyWeights::new(raw.w, raw.v, raw.exponents, raw.omega)?;
    let int = |key: &str, default: i64| table.get(key).and_then(toml::Value::as_integer).unwrap_or(default);
    let float = |key: &str, default: f64| table.get(key).and_then(toml::Value::as_float).unwrap_or(default);
    let n = u32::try_from(int("n", 3)).context("n")?;
    let trials = usize::try_from(int("trials", 200)).context("trials")?;
    let seed = u64::try_from(int("seed", 0)).context("seed")?;
    let report = hardy_inequality_probe(cond, &hw, n, trials, seed, float("depth_decades", 3.0))?;
    let mut json = serde_json::to_value(&report)?;
    json["bounded"] = report.bounded().into();
    Ok(json)
}

fn parse_potential(spec: &str) -> Result<Potential> {
    if let Ok(p) = serde_json::from_str::<Potential>(spec) {
        return Ok(p);
    }
    if let Ok(p) = toml::from_str::<Potential>(spec) {
        return Ok(p);
    }
    let (kind, params) = spec.split_once(':').unwrap_or((spec, ""));
    Ok(match kind.trim() {
        "constant" => Potential::Constant { value: parse_list(params, 1, "constant")?[0] },
        "abs_power" => {
            let v = parse_list(params, 2, "abs_power")?;
            Potential::AbsPower { coef: v[0], gamma: v[1] }
        }
        "x1" => Potential::first_coordinate_power(parse_list(params, 1, "x1")?[0]),
        _ => bail!("cannot read potential `{spec}`"),
    })
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let stdout = io::stdout();
    match cli.cmd {
        Cmd::Rearrange { csv } => {
            decreasing_rearrangement(&read_grid(&csv)?).write_csv(stdout.lock())?;
        }
        Cmd::Norm { space, csv } => print_json(&norm(&space, &read_profile(&csv)?)?)?,
        Cmd::Solve { config } => {
            let text = fs::read_to_string(&config).with_context(|| format!("cannot read {}", config.display()))?;
            let sol = solve_radial(&RadialProblem::from_toml(&text)?)?;
            sol.write_csv(stdout.lock())?;
            eprintln!("residual_norm = {:e}", sol.residual_norm);
        }
        Cmd::Verify { config, out } => {
            let outcome = run_batch(&config, &out)?;
            let mut lock = stdout.lock();
            writeln!(lock, "gate: {}", if outcome.gate.passed { "pass" } else { "fail" })?;
            for r in &outcome.reports {
                match r {
                    Ok(r) => writeln!(lock, "{}: {} (C = {}, drift = {})", r.id, r.verdict, r.empirical_c, r.refinement_drift)?,
                    Err(e) => writeln!(lock, "error: {e}")?,
                }
            }
            writeln!(lock, "reports written to {}", out.display())?;
            return Ok(ExitCode::from(outcome.exit_code as u8));
        }
        Cmd::Hardy { cond, config } => print_json(&hardy(cond, &config)?)?,
        Cmd::Rh { potential, q, dim, doubled } => {
            let v = parse_potential(&potential)?;
            let family = if doubled { BallFamily::doubled(dim) } else { BallFamily::default_family(dim) };
            print_json(&serde_json::to_value(rh_constant_estimate(&v, q, &family)?)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            // bad input of any kind, including batch configs, exits with 2
            ExitCode::from(2)
        }
    }
}
