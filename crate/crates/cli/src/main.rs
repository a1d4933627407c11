//! Command line front end: loads `.lie` files or catalog entries, runs the
//! library, and reports verdicts as text or a stable JSON envelope.
//!
//! Exit codes: 0 on success, 1 on input errors, 2 when the verdict is a
//! refutation or a witness (freeness refuted, properness witness found),
//! 3 when a bounded search comes back empty (unknown, none found).

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use biquotient::action::{freeness_check, induced_action, Freeness, FreenessCertificate, FreenessOptions};
use biquotient::catalog::{
    action_fixture, derivation_fixture, entry, format_combination, pair_action, CatalogEntry,
};
use biquotient::decomp::SliceDescription;
use biquotient::derivation::{depth_bounds, forced_nonzero_level, Derivation};
use biquotient::error::Error;
use biquotient::liefile::{parse_lie, LieFile};
use biquotient::reduction::{dim1_pipeline, full_reduction, Dim1Outcome, ReductionStep};
use biquotient::scalar::fmt_q;
use biquotient::slice::{slice_family_search, SEARCH_CEILING};
use biquotient::subspace::Subspace;
use biquotient::witness::{properness_witness_search, PropernessReport};

#[derive(Parser)]
#[command(name = "biquotient", version, about = "Exact tools for biquotient actions on unipotent groups")]
struct Cli {
    /// Emit the report as one JSON object instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every sampling step
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a file and confirm it is a nilpotent Lie algebra table
    Validate { source: String },
    /// Print the dimensions of the descending central series
    Series { source: String },
    /// Decide freeness of the two sided action of the named subspaces
    Freeness {
        source: String,
        #[arg(long, default_value = "v")]
        v: String,
        #[arg(long, default_value = "h")]
        h: String,
        /// Largest multiplier degree tried for a unit ideal certificate
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Search for polynomial slice functions of the induced action
    Slice {
        source: String,
        #[arg(long, default_value = "v")]
        v: String,
        #[arg(long, default_value = "h")]
        h: String,
        /// Largest total degree tried
        #[arg(long)]
        degree: Option<u64>,
    },
    /// Print the derivations induced on the quotient chart by v
    Induced {
        source: String,
        #[arg(long, default_value = "v")]
        v: String,
        #[arg(long, default_value = "h")]
        h: String,
    },
    /// Depth lower bounds of a triangular derivation
    Depth {
        /// A derivation fixture name, or a file whose pair induces one
        source: String,
        /// Depth of the moving generator
        #[arg(long = "d-x0")]
        d_x0: usize,
    },
    /// Search for an unbounded parameter ray with bounded images
    Witness {
        /// An action fixture name, or a file with subspaces v and h
        source: String,
        /// Largest ray degree in the ansatz
        #[arg(long, default_value_t = 4)]
        ansatz: u32,
    },
    /// Apply the normal form reductions to a pair
    Reduce {
        source: String,
        #[arg(long, default_value = "v")]
        v: String,
        #[arg(long, default_value = "h")]
        h: String,
    },
    /// Run the full battery on a catalog entry
    Demo { name: String },
}

struct Report {
    command: &'static str,
    inputs: Value,
    verdict: String,
    data: Value,
    provenance: Value,
}

// tolerate a closed pipe (e.g. piping into head) instead of panicking
fn put(line: String) {
    let _ = writeln!(std::io::stdout(), "{line}");
}

fn exit_for(verdict: &str) -> u8 {
    if verdict.starts_with("refuted") || verdict.starts_with("witness found") {
        2
    } else if verdict.starts_with("unknown") || verdict.starts_with("none found") {
        3
    } else {
        0
    }
}

fn print_value(prefix: &str, v: &Value) {
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                print_value(&key, v);
            }
        }
        Value::Array(a) => {
            let parts: Vec<String> = a
                .iter()
                .map(|x| match x {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            put(format!("{prefix}: [{}]", parts.join(", ")));
        }
        Value::String(s) => put(format!("{prefix}: {s}")),
        other => put(format!("{prefix}: {other}")),
    }
}

fn emit(cli: &Cli, report: Report) -> ExitCode {
    if cli.json {
        let mut top = Map::new();
        top.insert("command".into(), json!(report.command));
        top.insert("inputs".into(), report.inputs.clone());
        top.insert("verdict".into(), json!(report.verdict));
        top.insert("data".into(), report.data.clone());
        top.insert("provenance".into(), report.provenance.clone());
        top.insert("seed".into(), json!(cli.seed));
        top.insert(
            "versions".into(),
            json!({ "biquotient": biquotient::VERSION, "cli": env!("CARGO_PKG_VERSION") }),
        );
        put(serde_json::to_string_pretty(&Value::Object(top)).unwrap());
    } else {
        put(format!("command: {}", report.command));
        print_value("input", &report.inputs);
        put(format!("verdict: {}", report.verdict));
        print_value("", &report.data);
        if !report.provenance.is_string() {
            print_value("provenance", &report.provenance);
        }
        put(format!("seed: {}", cli.seed));
    }
    ExitCode::from(exit_for(&report.verdict))
}

/// Treat the argument as a file path when it exists, as a catalog name
/// otherwise.
fn load(source: &str) -> Result<LieFile, Error> {
    if Path::new(source).exists() {
        let text = std::fs::read_to_string(source)
            .map_err(|e| Error::Precondition(format!("cannot read {source}: {e}")))?;
        return parse_lie(&text);
    }
    Ok(LieFile::from_entry(&entry(source)?))
}

fn pair<'a>(
    file: &'a LieFile,
    v: &str,
    h: &str,
) -> Result<(&'a Subspace, &'a Subspace), Error> {
    Ok((file.subspace(v)?, file.subspace(h)?))
}

fn pair_generators(file: &LieFile, v: &str, h: &str) -> Result<Vec<Derivation>, Error> {
    let (v, h) = pair(file, v, h)?;
    v.basis_vectors()
        .iter()
        .map(|x0| Ok(induced_action(&file.algebra, h, x0)?.derivation()))
        .collect()
}

fn slice_text(file: &LieFile, desc: &SliceDescription) -> String {
    match desc {
        SliceDescription::Linear(s) => {
            let combos: Vec<String> = s
                .basis_vectors()
                .iter()
                .map(|w| format_combination(&file.algebra, &w.coords))
                .collect();
            if combos.is_empty() {
                "exp(0)".to_string()
            } else {
                format!("exp(<{}>)", combos.join(", "))
            }
        }
        SliceDescription::LevelSet { vars, functions } => {
            let eqs: Vec<String> =
                functions.iter().map(|f| format!("{} = 0", f.to_string_with(vars))).collect();
            format!("{{{}}}", eqs.join(", "))
        }
    }
}

fn run(cli: &Cli) -> Result<Report, Error> {
    match &cli.command {
        Command::Validate { source } => {
            let file = load(source)?;
            let alg = &file.algebra;
            let brackets = {
                let mut count = 0;
                for i in 0..alg.dim() {
                    for j in (i + 1)..alg.dim() {
                        if !alg.bracket(&alg.basis_vector(i), &alg.basis_vector(j))?.is_zero() {
                            count += 1;
                        }
                    }
                }
                count
            };
            Ok(Report {
                command: "validate",
                inputs: json!({ "source": source }),
                verdict: "valid".into(),
                data: json!({
                    "algebra": alg.name,
                    "dim": alg.dim(),
                    "brackets": brackets,
                    "nilpotency_step": alg.nilpotency_step(),
                    "subspaces": file.subspaces.keys().cloned().collect::<Vec<_>>(),
                }),
                provenance: json!("derived"),
            })
        }
        Command::Series { source } => {
            let file = load(source)?;
            let dims: Vec<usize> =
                file.algebra.central_series().iter().map(|s| s.dim()).collect();
            Ok(Report {
                command: "series",
                inputs: json!({ "source": source }),
                verdict: "ok".into(),
                data: json!({ "series": dims, "steps": file.algebra.nilpotency_step() }),
                provenance: json!("derived"),
            })
        }
        Command::Freeness { source, v, h, budget } => {
            let file = load(source)?;
            let (vs, hs) = pair(&file, v, h)?;
            let opts = FreenessOptions {
                seed: cli.seed,
                multiplier_degree: *budget,
                ..FreenessOptions::default()
            };
            let result = freeness_check(&file.algebra, vs, hs, &opts)?;
            let (verdict, data) = match result {
                Freeness::Certified(FreenessCertificate::ConstantMinor { rows, value }) => (
                    "certified".to_string(),
                    json!({
                        "certificate": "constant minor",
                        "rows": rows,
                        "value": fmt_q(&value),
                    }),
                ),
                Freeness::Certified(FreenessCertificate::UnitIdeal { multipliers }) => (
                    "certified".to_string(),
                    json!({ "certificate": "unit ideal", "multipliers": multipliers.len() }),
                ),
                Freeness::Refuted(w) => (
                    "refuted".to_string(),
                    json!({
                        "point": format_combination(&file.algebra, &w.point),
                        "combination": w.combination.iter().map(fmt_q).collect::<Vec<_>>(),
                    }),
                ),
                Freeness::Unknown { reason } => ("unknown".to_string(), json!({ "reason": reason })),
            };
            Ok(Report {
                command: "freeness",
                inputs: json!({ "source": source, "v": v, "h": h, "budget": budget }),
                verdict,
                data,
                provenance: json!("derived"),
            })
        }
        Command::Slice { source, v, h, degree } => {
            let file = load(source)?;
            let gens = pair_generators(&file, v, h)?;
            let top = degree.unwrap_or(SEARCH_CEILING);
            let mut found = None;
            for bound in 1..=top {
                if let Some(fs) = slice_family_search(&gens, bound)? {
                    found = Some((bound, fs));
                    break;
                }
            }
            let (verdict, data) = match found {
                Some((bound, fs)) => (
                    "found".to_string(),
                    json!({
                        "degree": bound,
                        "functions": fs.iter().map(|f| f.to_display()).collect::<Vec<_>>(),
                    }),
                ),
                None => ("none found".to_string(), json!({ "max_degree": top })),
            };
            Ok(Report {
                command: "slice",
                inputs: json!({ "source": source, "v": v, "h": h, "degree": top }),
                verdict,
                data,
                provenance: json!("derived"),
            })
        }
        Command::Induced { source, v, h } => {
            let file = load(source)?;
            let (vs, _) = pair(&file, v, h)?;
            let gens = pair_generators(&file, v, h)?;
            let mut out = Map::new();
            for (x0, d) in vs.basis_vectors().iter().zip(&gens) {
                out.insert(
                    format_combination(&file.algebra, &x0.coords),
                    json!(d.to_display()),
                );
            }
            Ok(Report {
                command: "induced",
                inputs: json!({ "source": source, "v": v, "h": h }),
                verdict: "ok".into(),
                data: Value::Object(out),
                provenance: json!("derived"),
            })
        }
        Command::Depth { source, d_x0 } => {
            let derivation = match derivation_fixture(source) {
                Ok(d) => d,
                Err(Error::UnknownEntry(_)) => {
                    let file = load(source)?;
                    let gens = pair_generators(&file, "v", "h")?;
                    gens.into_iter()
                        .next()
                        .ok_or_else(|| Error::Precondition("the subspace v is zero".into()))?
                }
                Err(e) => return Err(e),
            };
            let bounds = depth_bounds(&derivation, *d_x0)?;
            let level = forced_nonzero_level(&bounds);
            let rendered: Vec<String> =
                bounds.iter().map(|(var, d)| format!("{var}: {d}")).collect();
            Ok(Report {
                command: "depth",
                inputs: json!({ "source": source, "d_x0": d_x0 }),
                verdict: "ok".into(),
                data: json!({
                    "bounds": rendered.join(", "),
                    "note": format!("g^({level}) != 0"),
                }),
                provenance: json!("derived"),
            })
        }
        Command::Witness { source, ansatz } => {
            let action = match action_fixture(source) {
                Ok(a) => a,
                Err(Error::UnknownEntry(_)) => {
                    let file = load(source)?;
                    let (vs, hs) = pair(&file, "v", "h")?;
                    let probe = CatalogEntry {
                        name: source.clone(),
                        algebra: file.algebra.clone(),
                        v: Some(vs.clone()),
                        h: Some(hs.clone()),
                        normal: None,
                        goldens: Vec::new(),
                    };
                    pair_action(&probe)?
                }
                Err(e) => return Err(e),
            };
            let report = properness_witness_search(&action, *ansatz)?;
            let (verdict, data) = match report {
                PropernessReport::WitnessFound(ray) => (
                    "witness found".to_string(),
                    json!({
                        "ray": ray.to_display(&action),
                        "unbounded_param": action.params[ray.unbounded_param],
                    }),
                ),
                PropernessReport::NoneFound { ansatz_degree } => {
                    ("none found".to_string(), json!({ "ansatz_degree": ansatz_degree }))
                }
            };
            Ok(Report {
                command: "witness",
                inputs: json!({ "source": source, "ansatz": ansatz }),
                verdict,
                data,
                provenance: json!("derived"),
            })
        }
        Command::Reduce { source, v, h } => {
            let file = load(source)?;
            let (vs, hs) = pair(&file, v, h)?;
            let rp = full_reduction(&file.algebra, vs, hs)?;
            let steps: Vec<String> = rp
                .steps
                .iter()
                .map(|s| match s {
                    ReductionStep::CenterQuotient { ideal, .. } => {
                        format!("quotient by a {} dimensional central ideal", ideal.dim())
                    }
                    ReductionStep::CommonShadow { g1, complement, .. } => format!(
                        "restrict to a {} dimensional subalgebra ({} directions split off)",
                        g1.dim(),
                        complement.len()
                    ),
                    ReductionStep::FamilyDirection { .. } => {
                        "split off a product line".to_string()
                    }
                })
                .collect();
            let reduced_file = LieFile::new(rp.algebra.clone());
            let dim1 = if rp.v.dim() == 1 {
                match dim1_pipeline(&rp.algebra, &rp.v, &rp.h) {
                    Ok(Dim1Outcome::Slice(d)) => json!(slice_text(&reduced_file, &d)),
                    Ok(Dim1Outcome::Unsupported { reason }) => {
                        json!(format!("unsupported: {reason}"))
                    }
                    Err(e) => json!(format!("not applicable: {e}")),
                }
            } else {
                json!(format!("not attempted (v has dimension {})", rp.v.dim()))
            };
            Ok(Report {
                command: "reduce",
                inputs: json!({ "source": source, "v": v, "h": h }),
                verdict: "ok".into(),
                data: json!({
                    "steps": steps,
                    "algebra": { "dim": rp.algebra.dim(), "steps": rp.algebra.nilpotency_step() },
                    "v_dim": rp.v.dim(),
                    "h_dim": rp.h.dim(),
                    "dim1_slice": dim1,
                }),
                provenance: json!("derived"),
            })
        }
        Command::Demo { name } => {
            let e = entry(name)?;
            let file = LieFile::from_entry(&e);
            let mut data = Map::new();
            let dims: Vec<usize> = e.algebra.central_series().iter().map(|s| s.dim()).collect();
            data.insert("series".into(), json!(dims));

            if let (Some(vs), Some(hs)) = (&e.v, &e.h) {
                let opts = FreenessOptions { seed: cli.seed, ..FreenessOptions::default() };
                let verdict = match freeness_check(&e.algebra, vs, hs, &opts)? {
                    Freeness::Certified(_) => "certified",
                    Freeness::Refuted(_) => "refuted",
                    Freeness::Unknown { .. } => "unknown",
                };
                data.insert("freeness".into(), json!(verdict));

                let mut induced = Map::new();
                let gens = pair_generators(&file, "v", "h")?;
                for (x0, d) in vs.basis_vectors().iter().zip(&gens) {
                    induced.insert(
                        format_combination(&e.algebra, &x0.coords),
                        json!(d.to_display()),
                    );
                }
                data.insert("induced".into(), Value::Object(induced));

                let mut found = None;
                for bound in 1..=SEARCH_CEILING {
                    if let Some(fs) = slice_family_search(&gens, bound)? {
                        found = Some(fs);
                        break;
                    }
                }
                data.insert(
                    "slice_search".into(),
                    match found {
                        Some(fs) => {
                            json!(fs.iter().map(|f| f.to_display()).collect::<Vec<_>>())
                        }
                        None => json!(format!("none found (degree <= {SEARCH_CEILING})")),
                    },
                );

                let action = pair_action(&e)?;
                data.insert(
                    "witness(ansatz 4)".into(),
                    match properness_witness_search(&action, 4)? {
                        PropernessReport::WitnessFound(ray) => json!(ray.to_display(&action)),
                        PropernessReport::NoneFound { .. } => json!("none found"),
                    },
                );
            }

            let mut goldens = Map::new();
            let mut tags = Map::new();
            for g in &e.goldens {
                goldens.insert(g.key.to_string(), json!(g.value));
                tags.insert(g.key.to_string(), json!(g.provenance.to_string()));
            }
            data.insert("goldens".into(), Value::Object(goldens));

            Ok(Report {
                command: "demo",
                inputs: json!({ "name": name }),
                verdict: "ok".into(),
                data: Value::Object(data),
                provenance: Value::Object(tags),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => emit(&cli, report),
        Err(e) => {
            eprintln!("input error: {e}");
            ExitCode::from(1)
        }
    }
}
