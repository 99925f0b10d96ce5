use std::fs;
use std::sync::Arc;

use lane_emden::ansatz::{field_slice, AnsatzField};
use lane_emden::halfspace::sample_grid;
use lane_emden::io::{csv, profile_csv, ProfileSidecar};
use lane_emden::{
    compute_constants, find_ground_state_with, BMode, EnergyConstants, Error, ExpansionReport,
    FieldKind, HalfSpaceCorrection, Harness, ProblemParams, RadialProfile, ReducedEnergy,
    SolverOptions, Verdict, Which,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::checks::{self, Context};
use crate::config::{BModeArg, RunConfig};
use crate::output::{envelope, out_path, write_atomic, write_json};

/// Why a command stopped; maps onto the exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
    ChecksFailed,
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::ChecksFailed => 1,
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_)
            | Error::BorderCase
            | Error::OutsideConditionP { .. }
            | Error::Io(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("cannot write output: {e}"))
    }
}

type Outcome<T> = Result<T, Failure>;

pub fn params(cfg: &RunConfig) -> Outcome<ProblemParams> {
    let pr = ProblemParams::new(cfg.n, cfg.p)?.with_perturbation(cfg.alpha, cfg.beta)?;
    pr.require_supported()?;
    Ok(pr)
}

pub fn solve(cfg: &RunConfig) -> Outcome<Arc<RadialProfile>> {
    let pr = params(cfg)?;
    let opts = SolverOptions {
        ode_tol: cfg.ode_tol,
        r_max: cfg.r_max,
        ..SolverOptions::default()
    };
    let profile = find_ground_state_with(&pr, &opts)?;
    if profile.tail.fit_residual > cfg.fit_tol {
        return Err(Failure::Numerical(format!(
            "tail fit residual {:.3e} exceeds fit_tol {:.3e}",
            profile.tail.fit_residual, cfg.fit_tol
        )));
    }
    Ok(Arc::new(profile))
}

fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
        .collect()
}

pub fn ground_state(cfg: &RunConfig) -> Outcome<Arc<RadialProfile>> {
    let profile = solve(cfg)?;
    let side = ProfileSidecar::new(&profile);
    write_atomic(
        &out_path(cfg, "profile.csv"),
        profile_csv(&profile).as_bytes(),
    )?;
    write_json(
        &out_path(cfg, "profile.json"),
        &envelope("ground-state", cfg, &side),
    )?;

    let (s, t) = (grid(0.0, 4.0, 21), grid(0.0, 4.0, 21));
    for (name, which) in [("phi1.csv", Which::Phi1), ("phi2.csv", Which::Phi2)] {
        let corr = HalfSpaceCorrection::new(profile.clone(), which);
        write_atomic(
            &out_path(cfg, name),
            csv(&["s", "t", "phi"], &sample_grid(&corr, &s, &t)).as_bytes(),
        )?;
    }
    let delta = cfg.deltas[0].min(lane_emden::ansatz::DELTA_MAX);
    let (s, t) = (grid(0.0, 1.0, 21), grid(-1.0, 1.0, 41));
    for (name, kind) in [
        ("pw1_slice.csv", FieldKind::Pw1Approx),
        ("pw2_slice.csv", FieldKind::Pw2Approx),
    ] {
        let field = AnsatzField::new(profile.clone(), kind, delta)?;
        write_atomic(
            &out_path(cfg, name),
            csv(&["s", "t", "value"], &field_slice(&field, &s, &t)).as_bytes(),
        )?;
    }

    let tail = &profile.tail;
    println!("case={:?} condition={:?}", side.case_tag, side.condition);
    println!("v0={:.12}", profile.v0);
    println!("a={:.10e} b={:.10e}", tail.a, tail.b);
    println!(
        "exp_U={:.8} (expected {:.8})",
        tail.exp_u, side.expected_exp_u
    );
    println!(
        "exp_V={:.8} (expected {:.8})",
        tail.exp_v, side.expected_exp_v
    );
    Ok(profile)
}

pub fn constants_with(
    cfg: &RunConfig,
    profile: &RadialProfile,
    mode: BMode,
) -> Outcome<EnergyConstants> {
    let k = compute_constants(profile, mode)?;
    let worst = k.max_relative_error();
    if worst > cfg.quad_tol {
        return Err(Failure::Numerical(format!(
            "constant error estimate {worst:.3e} exceeds quad_tol {:.3e}",
            cfg.quad_tol
        )));
    }
    Ok(k)
}

#[derive(Serialize)]
struct ConstantsRecord<'a> {
    constants: &'a EnergyConstants,
    a_identity_defect: f64,
    a_identity_holds: bool,
    max_relative_error: f64,
}

pub fn constants(cfg: &RunConfig, profile: &RadialProfile) -> Outcome<EnergyConstants> {
    let mode = match cfg.b_mode {
        BModeArg::Limit => BMode::Limit,
        BModeArg::Delta => BMode::Delta(cfg.b_delta),
    };
    let k = constants_with(cfg, profile, mode)?;
    let defect = k.a_identity_defect();
    let rec = ConstantsRecord {
        constants: &k,
        a_identity_defect: defect,
        a_identity_holds: defect <= 1e-3,
        max_relative_error: k.max_relative_error(),
    };
    write_json(
        &out_path(cfg, "constants.json"),
        &envelope("constants", cfg, &rec),
    )?;
    for (name, v) in ["A1", "A2", "B1", "B2", "C1", "C2", "D1", "D2"]
        .iter()
        .zip(k.values())
    {
        println!("{name}={v:.10e}");
    }
    println!(
        "identity |A1-A2|/A1={defect:.3e} {}",
        if rec.a_identity_holds { "PASS" } else { "FAIL" }
    );
    Ok(k)
}

#[derive(Serialize)]
struct ReducedRecord {
    alpha: f64,
    beta: f64,
    summary: lane_emden::ReducedSummary,
    sample_range: [f64; 2],
}

pub fn reduced_energy(cfg: &RunConfig, k: EnergyConstants) -> Outcome<()> {
    let re = ReducedEnergy::new(k, cfg.alpha, cfg.beta)?;
    let summary = re.summary()?;
    let range = [summary.d_star / 20.0, summary.d_star * 20.0];
    let samples = re.sample(range[0], range[1], cfg.g_samples)?;
    let rows: Vec<[f64; 2]> = samples.iter().map(|&(d, g)| [d, g]).collect();
    write_atomic(
        &out_path(cfg, "g_samples.csv"),
        csv(&["d", "G"], &rows).as_bytes(),
    )?;
    let rec = ReducedRecord {
        alpha: cfg.alpha,
        beta: cfg.beta,
        summary,
        sample_range: range,
    };
    write_json(
        &out_path(cfg, "reduced_energy.json"),
        &envelope("reduced-energy", cfg, &rec),
    )?;
    let text =
        serde_json::to_string_pretty(&summary).map_err(|e| Failure::Numerical(e.to_string()))?;
    println!("{text}");
    Ok(())
}

#[derive(Serialize)]
struct CheckLine {
    name: String,
    verdict: Verdict,
    failures: Vec<String>,
}

#[derive(Serialize)]
struct VerifySummary {
    overall: Verdict,
    checks: Vec<CheckLine>,
}

/// Runs the selected checks; `Ok(true)` iff all pass.
pub fn verify(cfg: &RunConfig, profile: Arc<RadialProfile>) -> Outcome<bool> {
    // The ball checks compare against the δ → 0 constants.
    let k = constants_with(cfg, &profile, BMode::Limit)?;
    let harness = Harness::new(profile.clone(), k, cfg.level);
    let cx = Context {
        cfg,
        profile: profile.clone(),
        harness: &harness,
    };
    let reports: Vec<lane_emden::Result<ExpansionReport>> = cfg
        .checks
        .par_iter()
        .map(|c| checks::run(*c, &cx))
        .collect();
    let mut lines = Vec::new();
    for (check, rep) in cfg.checks.iter().zip(reports) {
        let rep = rep?;
        let name = check.name();
        write_json(
            &out_path(cfg, &format!("verify_{name}.json")),
            &envelope("verify", cfg, &rep),
        )?;
        write_atomic(
            &out_path(cfg, &format!("verify_{name}.csv")),
            rep.series_csv().as_bytes(),
        )?;
        let failures: Vec<String> = rep.failures().into_iter().map(String::from).collect();
        println!(
            "{} {name}{}",
            if rep.passed() { "PASS" } else { "FAIL" },
            if failures.is_empty() {
                String::new()
            } else {
                format!(" ({})", failures.join(", "))
            }
        );
        lines.push(CheckLine {
            name: name.into(),
            verdict: rep.verdict,
            failures,
        });
    }
    let all = lines.iter().all(|l| l.verdict == Verdict::Pass);
    let summary = VerifySummary {
        overall: if all { Verdict::Pass } else { Verdict::Fail },
        checks: lines,
    };
    write_json(
        &out_path(cfg, "verify_summary.json"),
        &envelope("verify", cfg, &summary),
    )?;
    println!("overall {}", if all { "PASS" } else { "FAIL" });
    Ok(all)
}

#[derive(Serialize)]
struct Report {
    overall: Option<Verdict>,
    records: serde_json::Map<String, Value>,
}

/// Runs the whole pipeline (unless `from_existing`) and gathers every JSON
/// record of the output directory into `report.json`.
pub fn report(cfg: &RunConfig, from_existing: bool) -> Outcome<bool> {
    if !from_existing {
        let profile = ground_state(cfg)?;
        let k = constants(cfg, &profile)?;
        reduced_energy(cfg, k)?;
        verify(cfg, profile)?;
    }
    let mut names: Vec<String> = fs::read_dir(&cfg.out)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".json") && !n.starts_with('.') && n != "report.json")
        .collect();
    names.sort();
    if names.is_empty() {
        return Err(Failure::Usage(format!(
            "no records found in {}",
            cfg.out.display()
        )));
    }
    let mut records = serde_json::Map::new();
    for name in names {
        let text = fs::read_to_string(cfg.out.join(&name))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| Failure::Usage(format!("{name} is not a valid record: {e}")))?;
        records.insert(name.trim_end_matches(".json").to_string(), value);
    }
    let overall = records
        .get("verify_summary")
        .and_then(|v| v.pointer("/result/overall"))
        .and_then(|v| v.as_str())
        .map(|s| {
            if s == "PASS" {
                Verdict::Pass
            } else {
                Verdict::Fail
            }
        });
    let report = Report { overall, records };
    write_json(
        &out_path(cfg, "report.json"),
        &envelope("report", cfg, &report),
    )?;
    println!(
        "report {} ({} records)",
        out_path(cfg, "report.json").display(),
        report.records.len()
    );
    Ok(overall != Some(Verdict::Fail))
}
