//! Command-line surface of the charvar toolkit.
//!
//! Every subcommand prints a single JSON report to stdout:
//! `{subcommand, inputs_digest, results, warnings, version}`. Exit codes:
//! 0 success (warnings allowed), 2 input error, 3 internal invariant
//! violation.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use charvar::cxla::{angle_turns, classify_group};
use charvar::reps::{
    check_relation, decompose, is_irreducible, power_scalar, Representation, Tolerances,
};
use charvar::retract::{full_flow, ClassCoords};
use charvar::strata::{canonical_form, count_by_sigma, eigenvalue_map, sigma_of};
use charvar::symprod::{monodromy_shift, pillowcase_map};
use charvar::{homology, sample, Error};

#[derive(Parser)]
#[command(
    name = "charvar",
    version,
    about = "Character varieties of twisted Hopf link groups: classify representations, enumerate eigenvalue strata, run retraction flows, compute homology"
)]
struct Cli {
    /// Pretty-print the JSON report.
    #[arg(long, global = true)]
    pretty: bool,
    /// Seed for randomized subcommands (fallback: env CHARVAR_SEED, then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TolArgs {
    /// Tolerance for the relation residual ||A^n B - B A^n||.
    #[arg(long, default_value_t = 1e-9)]
    tol_relation: f64,
    /// Eigenvalue clustering threshold.
    #[arg(long, default_value_t = 1e-7)]
    tol_cluster: f64,
    /// Rank-decision threshold (smallest singular value).
    #[arg(long, default_value_t = 1e-7)]
    tol_rank: f64,
}

impl TolArgs {
    fn tolerances(&self) -> Tolerances {
        Tolerances {
            relation: self.tol_relation,
            rank: self.tol_rank,
            cluster: self.tol_cluster,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify a representation: relation residual, group tags, semisimple
    /// partition, sigma-type, Schur scalar, canonical form.
    Classify {
        /// Path to a representation JSON file.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        tols: TolArgs,
    },
    /// Enumerate admissible SU(r) eigenvalue configurations and compare the
    /// counts with the multinomial formula.
    Enumerate {
        /// Rank r (2 or 3).
        #[arg(long)]
        rank: u32,
        /// Twist count n (1..=64).
        #[arg(long)]
        twist: u32,
    },
    /// Sample representations from a stratum and write them as JSON files.
    Sample {
        /// Group tag: SU(2), SU(3), U(2) or SL(2,C).
        #[arg(long)]
        group: String,
        /// Stratum: irreducible or totally-reducible.
        #[arg(long)]
        stratum: String,
        /// Twist count n.
        #[arg(long)]
        twist: u32,
        /// Number of samples.
        #[arg(long)]
        count: usize,
        /// Output directory for the representation files.
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        tols: TolArgs,
    },
    /// Run the SL(2,C) -> SU(2) retraction flow on a representation.
    Retract {
        /// Path to a representation JSON file (group SL(2,C)).
        #[arg(long)]
        input: PathBuf,
        /// Samples per stage.
        #[arg(long, default_value_t = 16)]
        steps: u32,
        /// Optional JSONL trace output path.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        tols: TolArgs,
    },
    /// Betti numbers of the SU(2) character-variety model for a twist.
    Homology {
        /// Twist count n (1..=64).
        #[arg(long)]
        twist: u32,
    },
    /// Canonical pillowcase representative of a torus point (angles in
    /// turns).
    Pillowcase { s: f64, t: f64 },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = cli
        .seed
        .or_else(|| {
            std::env::var("CHARVAR_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0);
    match run(&cli.command, seed) {
        Ok((name, digest, results, warnings)) => {
            let report = serde_json::json!({
                "subcommand": name,
                "inputs_digest": digest,
                "results": results,
                "warnings": warnings,
                "version": env!("CARGO_PKG_VERSION"),
            });
            let rendered = if cli.pretty {
                serde_json::to_string_pretty(&report)
            } else {
                serde_json::to_string(&report)
            }
            .expect("report serializes");
            println!("{rendered}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// 2 for input problems, 3 for internal invariant violations.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Overflow | Error::InvalidComplex(_) => 3,
        _ => 2,
    }
}

type Run = (String, String, serde_json::Value, Vec<String>);

fn run(cmd: &Command, seed: u64) -> Result<Run, Error> {
    match cmd {
        Command::Classify { input, tols } => run_classify(input, &tols.tolerances()),
        Command::Enumerate { rank, twist } => run_enumerate(*rank, *twist),
        Command::Sample {
            group,
            stratum,
            twist,
            count,
            out_dir,
            tols,
        } => run_sample(group, stratum, *twist, *count, out_dir, seed, &tols.tolerances()),
        Command::Retract {
            input,
            steps,
            trace,
            tols,
        } => run_retract(input, *steps, trace.as_deref(), &tols.tolerances()),
        Command::Homology { twist } => run_homology(*twist),
        Command::Pillowcase { s, t } => run_pillowcase(*s, *t),
    }
}

fn sha_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

fn read_rep(path: &std::path::Path) -> Result<(Representation, String), Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::OutOfRange(format!("cannot read {}: {e}", path.display())))?;
    let rep = Representation::from_json(&text)?;
    Ok((rep, sha_hex(text.as_bytes())))
}

fn cx_json(z: charvar::cxla::Cx) -> serde_json::Value {
    serde_json::json!([z.re, z.im])
}

fn run_classify(input: &std::path::Path, tols: &Tolerances) -> Result<Run, Error> {
    let (rep, digest) = read_rep(input)?;
    let mut warnings = Vec::new();
    let relation = check_relation(&rep, tols.relation);
    if !relation.ok {
        warnings.push(format!(
            "relation residual {:.3e} exceeds tolerance {:.3e}",
            relation.residual, tols.relation
        ));
    }
    let mut results = serde_json::json!({
        "n": rep.n,
        "group": rep.group.tag(),
        "relation_ok": relation.ok,
        "relation_residual": relation.residual,
        "group_tags": {
            "A": classify_group(&rep.a, tols.relation.max(1e-9) * 100.0),
            "B": classify_group(&rep.b, tols.relation.max(1e-9) * 100.0),
        },
        "partition": serde_json::Value::Null,
        "sigma": serde_json::Value::Null,
        "sigma_ambiguous": serde_json::Value::Null,
        "irreducible": serde_json::Value::Null,
        "xi": serde_json::Value::Null,
        "canonical_form": serde_json::Value::Null,
    });
    let obj = results.as_object_mut().expect("object");
    if relation.ok {
        let irr = is_irreducible(&rep, tols.rank)?;
        obj["irreducible"] = serde_json::json!(irr);
        if let Some(xi) = power_scalar(&rep, 100.0 * tols.relation) {
            obj["xi"] = cx_json(xi);
        }
        if rep.group.is_unitary_family() {
            let dec = decompose(&rep, tols.rank)?;
            obj["partition"] = serde_json::to_value(&dec.partition)?;
            let config = eigenvalue_map(&rep)?;
            let analysis = sigma_of(&config, tols.cluster)?;
            obj["sigma"] = serde_json::to_value(&analysis.sigma)?;
            obj["sigma_ambiguous"] = serde_json::json!(analysis.ambiguous);
            if analysis.ambiguous {
                warnings
                    .push("two eigenvalue clusters closer than twice the clustering threshold".into());
            }
            let cf = canonical_form(&rep, tols.relation)?;
            obj["canonical_form"] = serde_json::json!({
                "eigenvalues": cf.eigenvalues.iter().map(|&z| cx_json(z)).collect::<Vec<_>>(),
                "eigenvalue_angles_turns": cf.eigenvalues.iter().map(|&z| angle_turns(z)).collect::<Vec<_>>(),
                "bred": serde_json::to_value(&cf.bred)?,
                "sigma": serde_json::to_value(&cf.sigma)?,
                "unique": cf.unique,
                "mu": cf.mu.map(cx_json).unwrap_or(serde_json::Value::Null),
            });
        }
    }
    Ok(("classify".into(), digest, results, warnings))
}

fn run_enumerate(rank: u32, twist: u32) -> Result<Run, Error> {
    let rows = count_by_sigma(rank, twist)?;
    let counts: Vec<serde_json::Value> = rows
        .iter()
        .map(|row| {
            let formula = if row.formula.is_integer() {
                serde_json::json!(row.formula.to_integer() as i64)
            } else {
                serde_json::Value::Null
            };
            serde_json::json!({
                "sigma": row.sigma.parts_ascending(),
                "enumerated": row.enumerated,
                "formula": formula,
                "status": row.status.as_str(),
            })
        })
        .collect();
    let digest = sha_hex(format!("enumerate r={rank} n={twist}").as_bytes());
    let results = serde_json::json!({
        "r": rank,
        "n": twist,
        "counts": counts,
    });
    Ok(("enumerate".into(), digest, results, Vec::new()))
}

fn run_sample(
    group: &str,
    stratum: &str,
    twist: u32,
    count: usize,
    out_dir: &std::path::Path,
    seed: u64,
    tols: &Tolerances,
) -> Result<Run, Error> {
    let digest =
        sha_hex(format!("sample {group} {stratum} n={twist} count={count} seed={seed}").as_bytes());
    let sampled = match (group, stratum) {
        ("SU(2)", "irreducible") => sample::su_irreducible(2, twist, count, seed, tols),
        ("SU(3)", "irreducible") => sample::su_irreducible(3, twist, count, seed, tols),
        ("U(2)", "irreducible") => sample::u2_irreducible(twist, count, seed, tols),
        ("SL(2,C)", "irreducible") => sample::sl2c_irreducible(twist, count, seed, true),
        ("SU(2)", "totally-reducible") => sample::su_totally_reducible(2, twist, count, seed),
        ("SU(3)", "totally-reducible") => sample::su_totally_reducible(3, twist, count, seed),
        ("U(2)", "totally-reducible") => sample::u2_totally_reducible(twist, count, seed),
        ("SL(2,C)", "totally-reducible") => sample::sl2c_reducible(twist, count, seed, true),
        _ => Err(Error::UnsupportedGroup(format!(
            "sampling {stratum} in {group} is not supported"
        ))),
    };
    match sampled {
        Err(Error::EmptyStratum(msg)) => {
            // An empty stratum is a report, not a failure.
            let results = serde_json::json!({
                "group": group,
                "stratum": stratum,
                "n": twist,
                "requested": count,
                "files": [],
            });
            Ok((
                "sample".into(),
                digest,
                results,
                vec![format!("empty stratum: {msg}")],
            ))
        }
        Err(e) => Err(e),
        Ok(reps) => {
            std::fs::create_dir_all(out_dir).map_err(|e| {
                Error::OutOfRange(format!("cannot create {}: {e}", out_dir.display()))
            })?;
            let mut files = Vec::with_capacity(reps.len());
            for (i, rep) in reps.iter().enumerate() {
                let path = out_dir.join(format!("rep_{i:04}.json"));
                let text = serde_json::to_string_pretty(rep)?;
                std::fs::write(&path, text).map_err(|e| {
                    Error::OutOfRange(format!("cannot write {}: {e}", path.display()))
                })?;
                files.push(path.display().to_string());
            }
            let results = serde_json::json!({
                "group": group,
                "stratum": stratum,
                "n": twist,
                "requested": count,
                "files": files,
            });
            Ok(("sample".into(), digest, results, Vec::new()))
        }
    }
}

fn run_retract(
    input: &std::path::Path,
    steps: u32,
    trace_path: Option<&std::path::Path>,
    tols: &Tolerances,
) -> Result<Run, Error> {
    let (rep, digest) = read_rep(input)?;
    // SU(2)-tagged inputs are SL(2,C) representations sitting on the fixed
    // locus; reinterpret rather than reject.
    let rep = if rep.group == charvar::reps::Group::SU(2) {
        Representation::new(rep.n, charvar::reps::Group::Sl2c, rep.a, rep.b)?
    } else {
        rep
    };
    let outcome = full_flow(&rep, steps, tols.relation.max(1e-8))?;
    if let Some(path) = trace_path {
        let mut file = std::fs::File::create(path)
            .map_err(|e| Error::OutOfRange(format!("cannot create {}: {e}", path.display())))?;
        for s in &outcome.trace.samples {
            let line = serde_json::json!({
                "stage": s.stage,
                "t": s.t,
                "lambda": [s.lambda.re, s.lambda.im],
                "a": [s.a.re, s.a.im],
                "d": [s.d.re, s.d.im],
                "p": [s.p.re, s.p.im],
                "residual_constraint": s.residual_constraint,
                "residual_relation": s.residual_relation,
            });
            writeln!(file, "{line}")
                .map_err(|e| Error::OutOfRange(format!("cannot write trace: {e}")))?;
        }
    }
    let max_constraint = outcome
        .trace
        .samples
        .iter()
        .map(|s| s.residual_constraint)
        .fold(0.0f64, f64::max);
    let endpoint = match &outcome.end {
        ClassCoords::Irreducible(c) => serde_json::json!({
            "class": "irreducible",
            "lambda": cx_json(c.lambda),
            "a": cx_json(c.a),
            "d": cx_json(c.d),
            "p": cx_json(c.p),
        }),
        ClassCoords::Reducible(c) => serde_json::json!({
            "class": "reducible",
            "lambda": cx_json(c.lambda),
            "mu": cx_json(c.mu),
        }),
    };
    let final_relation = check_relation(&outcome.final_rep, 1e-8);
    let results = serde_json::json!({
        "steps": steps,
        "samples": outcome.trace.samples.len(),
        "endpoint": endpoint,
        "final_group": outcome.final_rep.group.tag(),
        "final_relation_residual": final_relation.residual,
        "max_constraint_residual": max_constraint,
        "min_abs_d": outcome.trace.min_abs_d,
        "final_representation": serde_json::to_value(&outcome.final_rep)?,
    });
    Ok(("retract".into(), digest, results, Vec::new()))
}

fn run_homology(twist: u32) -> Result<Run, Error> {
    let cw = homology::build_su2_model(twist)?;
    let profile = homology::homology(&cw)?;
    let digest = sha_hex(format!("homology n={twist}").as_bytes());
    let results = serde_json::json!({
        "n": twist,
        "betti": profile.betti,
        "torsion": profile.torsion,
        "euler": profile.euler,
        "cells": cw.cell_counts(),
        "orbifold_vertices": homology::fixed_vertex_count(twist)?,
    });
    Ok(("homology".into(), digest, results, Vec::new()))
}

fn run_pillowcase(s: f64, t: f64) -> Result<Run, Error> {
    if !s.is_finite() || !t.is_finite() {
        return Err(Error::NonFinite);
    }
    let p = pillowcase_map(s, t);
    let shifted = monodromy_shift(p);
    let digest = sha_hex(format!("pillowcase {s} {t}").as_bytes());
    let results = serde_json::json!({
        "s": p.s,
        "t": p.t,
        "orbifold": p.orbifold,
        "monodromy_image": { "s": shifted.s, "t": shifted.t, "orbifold": shifted.orbifold },
    });
    Ok(("pillowcase".into(), digest, results, Vec::new()))
}
