use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use siegel_core::bigcomplex::BigComplex;
use siegel_core::cmdata::CmContext;
use siegel_core::rayclass::{cm_point, compute_invariants, enumerate_ray_classes, r_vector};
use siegel_core::report::{fraction_strings, point_json, to_csv, to_text, ComplexJson, TableJson, SHORT_DIGITS};
use siegel_core::verify::{self, Suite, VerifyConfig};
use siegel_core::{big_theta, theta_eval, Error, SiegelPoint, ThetaChar};

#[derive(Parser)]
#[command(name = "siegel", version, about = "Theta constants and Siegel invariants of cyclotomic ray classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Odd prime ℓ of the field Q(ζ_ℓ).
    #[arg(long, default_value_t = 5)]
    ell: u32,
    /// Level / conductor N.
    #[arg(long = "N", default_value_t = 5)]
    level: i64,
    /// Target precision in bits (at least 64).
    #[arg(long)]
    prec: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PointArgs {
    /// Characteristic, `1/5,2/5,0,3/5` or `[1/5, 2/5; 0, 3/5]`.
    #[arg(long = "char")]
    characteristic: String,
    /// Period matrix, entries `re:im`, columns split by `,` and rows by `;`.
    /// Defaults to the CM point of Q(ζ_ℓ).
    #[arg(long)]
    point: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate θ([r;s], Z).
    Theta {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Evaluate the level-N function Θ(v, Z).
    BigTheta {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Print the CM point of Q(ζ_ℓ).
    CmPoint {
        #[command(flatten)]
        common: Common,
    },
    /// Enumerate the ray class group modulo N O_K.
    RayClasses {
        #[command(flatten)]
        common: Common,
    },
    /// Compute the Siegel invariant of every ray class.
    Invariants {
        #[command(flatten)]
        common: Common,
    },
    /// Run the property suites.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "all")]
        suite: String,
        /// Random cases per property.
        #[arg(long, default_value_t = 20)]
        cases: usize,
    },
}

fn default_prec(level: i64) -> u32 {
    if level >= 6 {
        768
    } else {
        512
    }
}

fn checked_prec(common: &Common, default: u32) -> Result<u32, Error> {
    let prec = common.prec.unwrap_or(default);
    if prec < 64 {
        return Err(Error::Parse(format!("--prec must be at least 64, got {prec}")));
    }
    Ok(prec)
}

fn resolve_point(common: &Common, args: &PointArgs, prec: u32) -> Result<(ThetaChar, SiegelPoint), Error> {
    let v: ThetaChar = args.characteristic.parse()?;
    let z = match &args.point {
        Some(text) => SiegelPoint::parse(text, prec)?,
        None => cm_point(&CmContext::new(common.ell)?, prec)?,
    };
    if z.g() != v.g() {
        return Err(Error::Dimension(format!("characteristic has genus {}, point has genus {}", v.g(), z.g())));
    }
    Ok((v, z))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn value_output(format: Format, v: &ThetaChar, prec: u32, level: Option<i64>, value: &BigComplex) -> String {
    match format {
        Format::Table => format!("{v}  {}\n", value.to_sci(SHORT_DIGITS)),
        Format::Csv => format!(
            "char,re,im\n\"{v}\",{},{}\n",
            value.re().to_sci(SHORT_DIGITS),
            value.im().to_sci(SHORT_DIGITS)
        ),
        Format::Json => {
            let mut obj = json!({ "char": v.to_string() });
            if let Some(n) = level {
                obj["N"] = json!(n);
            }
            obj["prec_bits"] = json!(prec);
            obj["value"] = serde_json::to_value(ComplexJson::from_value(value)).expect("plain strings");
            pretty(&obj)
        }
    }
}

fn run(command: &Command) -> Result<(String, bool), Error> {
    match command {
        Command::Theta { common, point } => {
            let prec = checked_prec(common, 256)?;
            let (v, z) = resolve_point(common, point, prec + 32)?;
            let value = theta_eval(&v, &z, prec)?;
            Ok((value_output(common.format, &v, prec, None, &value), true))
        }
        Command::BigTheta { common, point } => {
            let prec = checked_prec(common, 256)?;
            let wp = siegel_core::theta::big_theta_working_prec(v_genus(&point.characteristic)?, common.level, prec);
            let (v, z) = resolve_point(common, point, wp)?;
            let value = big_theta(&v, common.level, &z, prec)?;
            Ok((value_output(common.format, &v, prec, Some(common.level), &value), true))
        }
        Command::CmPoint { common } => {
            let prec = checked_prec(common, 256)?;
            let z = cm_point(&CmContext::new(common.ell)?, prec)?;
            let out = match common.format {
                Format::Json => pretty(&json!({ "ell": common.ell, "prec_bits": prec, "cm_point": point_json(&z) })),
                Format::Csv => {
                    let mut s = String::from("i,j,re,im\n");
                    for i in 0..z.g() {
                        for j in 0..z.g() {
                            let e = z.entry(i, j);
                            s.push_str(&format!("{},{},{},{}\n", i + 1, j + 1, e.re().to_decimal_string(), e.im().to_decimal_string()));
                        }
                    }
                    s
                }
                Format::Table => {
                    let mut s = String::new();
                    for i in 0..z.g() {
                        let row: Vec<String> = (0..z.g()).map(|j| z.entry(i, j).to_sci(12)).collect();
                        s.push_str(&row.join("    "));
                        s.push('\n');
                    }
                    s
                }
            };
            Ok((out, true))
        }
        Command::RayClasses { common } => {
            let ctx = CmContext::new(common.ell)?;
            let table = enumerate_ray_classes(common.ell, common.level)?;
            let mut rows = Vec::new();
            for cls in table.classes() {
                let r = fraction_strings(&r_vector(&ctx, &table, cls.label)?, common.level);
                rows.push((cls.name(), cls.representative.to_string(), r, cls.exponents.clone()));
            }
            let out = match common.format {
                Format::Json => {
                    let classes: Vec<Value> = rows
                        .iter()
                        .map(|(l, rep, r, e)| json!({ "label": l, "representative": rep, "r_vector": r, "exponents": e }))
                        .collect();
                    pretty(&json!({
                        "ell": common.ell,
                        "N": common.level,
                        "cyclic_orders": table.cyclic_orders(),
                        "classes": classes,
                    }))
                }
                Format::Csv => {
                    let mut s = String::from("label,representative,r_vector,exponents\n");
                    for (l, rep, r, e) in &rows {
                        let e: Vec<String> = e.iter().map(ToString::to_string).collect();
                        s.push_str(&format!("{l},\"{rep}\",{},{}\n", r.join(";"), e.join(";")));
                    }
                    s
                }
                Format::Table => {
                    let mut s = format!(
                        "Cl({} O_K) for ell = {}: order {}, cyclic factors {:?}\n",
                        common.level,
                        common.ell,
                        table.order(),
                        table.cyclic_orders()
                    );
                    for (l, rep, r, e) in &rows {
                        s.push_str(&format!("{l:<5} {e:?}  [{}]  {rep}\n", r.join(", ")));
                    }
                    s
                }
            };
            Ok((out, true))
        }
        Command::Invariants { common } => {
            let prec = checked_prec(common, default_prec(common.level))?;
            let ctx = CmContext::new(common.ell)?;
            let table = enumerate_ray_classes(common.ell, common.level)?;
            let inv = compute_invariants(&ctx, &table, prec)?;
            let out = match common.format {
                Format::Json => TableJson::from_table(&inv).to_json_string(),
                Format::Csv => to_csv(&inv)?,
                Format::Table => to_text(&inv),
            };
            Ok((out, true))
        }
        Command::Verify { common, suite, cases } => {
            let suite: Suite = suite.parse()?;
            let prec = checked_prec(common, 256)?;
            let cfg = VerifyConfig {
                seed: common.seed,
                ell: common.ell,
                level: common.level,
                prec,
                table_prec: default_prec(common.level).max(prec),
                cases: *cases,
                ..VerifyConfig::default()
            };
            let reports = verify::run(suite, &cfg)?;
            let ok = reports.iter().all(|r| r.passed());
            let out = match common.format {
                Format::Table => reports.iter().map(ToString::to_string).collect(),
                Format::Json | Format::Csv => {
                    let checks: Vec<Value> = reports
                        .iter()
                        .flat_map(|r| {
                            r.checks.iter().map(move |c| {
                                json!({
                                    "suite": r.suite,
                                    "check": c.name,
                                    "passed": c.passed(),
                                    "cases": c.cases,
                                    "max_log2_residual": if c.max_log2.is_finite() { json!(c.max_log2) } else { Value::Null },
                                })
                            })
                        })
                        .collect();
                    if common.format == Format::Json {
                        pretty(&json!({ "seed": common.seed, "passed": ok, "checks": checks }))
                    } else {
                        let mut s = String::from("suite,check,passed,cases,max_log2_residual\n");
                        for c in &checks {
                            s.push_str(&format!(
                                "{},{},{},{},{}\n",
                                c["suite"].as_str().unwrap_or_default(),
                                c["check"].as_str().unwrap_or_default(),
                                c["passed"],
                                c["cases"],
                                c["max_log2_residual"]
                            ));
                        }
                        s
                    }
                }
            };
            Ok((out, ok))
        }
    }
}

fn v_genus(text: &str) -> Result<usize, Error> {
    Ok(text.parse::<ThetaChar>()?.g())
}

fn common_of(command: &Command) -> &Common {
    match command {
        Command::Theta { common, .. }
        | Command::BigTheta { common, .. }
        | Command::CmPoint { common }
        | Command::RayClasses { common }
        | Command::Invariants { common }
        | Command::Verify { common, .. } => common,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (out, ok) = match run(&cli.command) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    match &common_of(&cli.command).out {
        Some(path) => {
            if let Err(e) = fs::write(path, &out) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::FAILURE;
            }
        }
        None => print!("{out}"),
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
