//! Suite runner behind the `nosig` binary.
//!
//! Every suite is a deterministic function of its [`SuiteConfig`]: trials are
//! seeded per index and reduced with order-independent maxima, so reports are
//! byte-identical across runs and thread counts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use nosig_core::boxworld::{
    box_nosig_report, boxworld_suite, pr_box, signaling_box, CorrelationBox,
};
use nosig_core::dsum::{dsum_suite, DSumModel};
use nosig_core::numkit::{basis_projector, max_abs_diff, CMatrix, MatrixJson, Side};
use nosig_core::opcore::classical::{ClassicalBipartite, ClassicalModel};
use nosig_core::opcore::harness::{commutation_nosig_suite, framework_suite};
use nosig_core::qmodel::fixtures::{singlet, x_instrument, z_instrument};
use nosig_core::qmodel::{
    apply_quantum_op, instrument_nosig_suite, local_embed, local_state, partial_positivity_suite,
    quantum_nosig_check, reduced_state_defect, steering_witness, trace_reduced_suite, DensityOp,
    Instrument, QuantumBipartite, QuantumModel, QuantumOp,
};
use nosig_core::tomo::{audit_row, dimension_identity_check, local_observability_audit, AuditRow};
use nosig_core::VerificationReport;

/// Smallest eigenvalue the partial-positivity check accepts.
pub const PARTIAL_POSITIVITY_FLOOR: f64 = 1e-10;
/// Tolerance of the singlet fixture: the remote state must be exactly `I/2`.
pub const FIXTURE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] nosig_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Opcore,
    QuantumNosig,
    Lemma,
    Dsum,
    TomoAudit,
    Boxworld,
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub seed: u64,
    pub trials: usize,
    pub d1: usize,
    pub d2: usize,
    pub outcomes: usize,
    pub tol: f64,
    pub json_path: Option<PathBuf>,
    pub fixture: Option<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suite: Suite::All,
            seed: 0,
            trials: 100,
            d1: 2,
            d2: 2,
            outcomes: 2,
            tol: 1e-8,
            json_path: None,
            fixture: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials < 1 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        for (name, d) in [("--d1", self.d1), ("--d2", self.d2)] {
            if !(2..=6).contains(&d) {
                return Err(CliError::Usage(format!("{name} must be in 2..=6, got {d}")));
            }
        }
        if !(1..=16).contains(&self.outcomes) {
            return Err(CliError::Usage(format!(
                "--outcomes must be in 1..=16, got {}",
                self.outcomes
            )));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Usage(format!(
                "--tol must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// A local instrument on side 1 of a joint state. The outcome list need not be
/// a valid instrument: broken fixtures are what the verifiers must catch.
#[derive(Debug, Clone)]
pub struct InstrumentFixture {
    pub state: DensityOp,
    pub outcomes: Vec<QuantumOp>,
    pub d1: usize,
    pub d2: usize,
}

#[derive(Debug, Clone)]
pub enum Fixture {
    Instrument(InstrumentFixture),
    Box(CorrelationBox),
}

/// On-disk fixture format.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FixtureJson {
    Instrument {
        d1: usize,
        d2: usize,
        state: MatrixJson,
        /// Kraus operators of each outcome.
        outcomes: Vec<Vec<MatrixJson>>,
    },
    Box {
        table: CorrelationBox,
    },
}

impl FixtureJson {
    pub fn into_fixture(self) -> Result<Fixture, CliError> {
        match self {
            FixtureJson::Box { table } => Ok(Fixture::Box(table)),
            FixtureJson::Instrument {
                d1,
                d2,
                state,
                outcomes,
            } => {
                let state = DensityOp::from_matrix(CMatrix::try_from(&state)?)?;
                if state.dim() != d1 * d2 {
                    return Err(CliError::Usage(format!(
                        "state has dim {}, expected {}",
                        state.dim(),
                        d1 * d2
                    )));
                }
                let outcomes = outcomes
                    .iter()
                    .map(|ks| {
                        let ks = ks
                            .iter()
                            .map(CMatrix::try_from)
                            .collect::<Result<Vec<_>, _>>()?;
                        QuantumOp::new(ks)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Fixture::Instrument(InstrumentFixture {
                    state,
                    outcomes,
                    d1,
                    d2,
                }))
            }
        }
    }
}

impl From<&Fixture> for FixtureJson {
    fn from(f: &Fixture) -> Self {
        match f {
            Fixture::Box(b) => FixtureJson::Box { table: *b },
            Fixture::Instrument(i) => FixtureJson::Instrument {
                d1: i.d1,
                d2: i.d2,
                state: MatrixJson::from(i.state.matrix()),
                outcomes: i
                    .outcomes
                    .iter()
                    .map(|m| m.kraus().iter().map(MatrixJson::from).collect())
                    .collect(),
            },
        }
    }
}

pub const FIXTURE_NAMES: [&str; 5] = [
    "singlet-z",
    "singlet-x",
    "scaled-instrument",
    "signaling-box",
    "pr-box",
];

fn singlet_fixture(inst: Instrument) -> Fixture {
    Fixture::Instrument(InstrumentFixture {
        state: singlet(),
        outcomes: inst.outcomes().to_vec(),
        d1: 2,
        d2: 2,
    })
}

/// Built-in fixture by name.
pub fn named_fixture(name: &str) -> Option<Fixture> {
    Some(match name {
        "singlet-z" => singlet_fixture(z_instrument()),
        "singlet-x" => singlet_fixture(x_instrument()),
        "scaled-instrument" => {
            // sum_j K_j = 0.9 I: not trace preserving, so not an instrument
            let s = 0.9f64.sqrt();
            let outcomes = (0..2)
                .map(|k| QuantumOp::new(vec![basis_projector(2, k).scale(s)]).expect("contraction"))
                .collect();
            Fixture::Instrument(InstrumentFixture {
                state: singlet(),
                outcomes,
                d1: 2,
                d2: 2,
            })
        }
        "signaling-box" => Fixture::Box(signaling_box()),
        "pr-box" => Fixture::Box(pr_box()),
        _ => return None,
    })
}

/// A built-in name, or else a path to a JSON fixture file.
pub fn load_fixture(source: &str) -> Result<Fixture, CliError> {
    if let Some(f) = named_fixture(source) {
        return Ok(f);
    }
    let path = Path::new(source);
    if !path.exists() {
        return Err(CliError::Usage(format!(
            "unknown fixture '{source}' (built-in: {})",
            FIXTURE_NAMES.join(", ")
        )));
    }
    let text = std::fs::read_to_string(path)?;
    let parsed: FixtureJson = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("bad fixture {source}: {e}")))?;
    parsed.into_fixture()
}

/// Remote-state invariance of an instrument fixture. Invalid instruments are
/// measured through the raw outcome list, so a broken fixture fails instead of
/// being rejected at construction.
pub fn instrument_fixture_report(
    f: &InstrumentFixture,
    tol: f64,
) -> Result<VerificationReport, CliError> {
    let report = match Instrument::new(f.outcomes.clone()) {
        Ok(inst) => quantum_nosig_check(&f.state, &inst, f.d1, f.d2, tol)?,
        Err(e) => {
            let defect = reduced_state_defect(&f.state, &f.outcomes, f.d1, f.d2)?;
            VerificationReport::from_defect("quantum-nosig", 0, 1, defect, tol)
                .with_witness(json!({ "invalid_instrument": e.to_string() }))
        }
    };
    Ok(VerificationReport {
        suite: "fixture".into(),
        ..report
    })
}

/// The singlet's remote state after the full z and x instruments, against `I/2`.
fn singlet_fixture_report() -> Result<VerificationReport, CliError> {
    let rho = singlet();
    let half = CMatrix::identity(2, 2).scale(0.5);
    let mut defects = Vec::new();
    for inst in [z_instrument(), x_instrument()] {
        let total = local_embed(&inst.total(), 2, Side::One);
        let bob = local_state(&apply_quantum_op(&total, &rho)?, 2, 2, Side::Two)?;
        defects.push(max_abs_diff(bob.matrix(), &half));
    }
    let worst = defects.iter().copied().fold(0.0, f64::max);
    Ok(
        VerificationReport::from_defect("singlet-fixtures", 0, 2, worst, FIXTURE_TOL)
            .with_witness(json!({ "z_defect": defects[0], "x_defect": defects[1] })),
    )
}

/// Selective `P_0` outcome on the singlet against the full z instrument.
fn steering_report(tol: f64) -> Result<VerificationReport, CliError> {
    let p0 = z_instrument().outcomes()[0].clone();
    Ok(steering_witness(&singlet(), &p0, 2, 2, tol)?)
}

/// Result of one suite: the report and its human-readable table.
#[derive(Debug, Clone)]
pub struct SuiteRun {
    pub report: VerificationReport,
    pub table: String,
}

fn opcore_reports(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>, CliError> {
    let (s, n, k, tol) = (cfg.seed, cfg.trials, cfg.outcomes, cfg.tol);
    Ok(vec![
        framework_suite(&ClassicalModel::new(cfg.d1)?, s, n, k, tol)?,
        framework_suite(&QuantumModel::new(cfg.d1)?, s, n, k, tol)?,
        framework_suite(&DSumModel::new(cfg.d1, cfg.d2)?, s, n, k, tol)?,
        commutation_nosig_suite(&ClassicalBipartite::new(cfg.d1, cfg.d2)?, s, n, k, tol)?,
        commutation_nosig_suite(&QuantumBipartite::new(cfg.d1, cfg.d2)?, s, n, k, tol)?,
        commutation_nosig_suite(&DSumModel::new(cfg.d1, cfg.d2)?, s, n, k, tol)?,
    ])
}

fn quantum_reports(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>, CliError> {
    Ok(vec![
        instrument_nosig_suite(cfg.seed, cfg.trials, cfg.d1, cfg.d2, cfg.tol)?,
        trace_reduced_suite(cfg.seed, cfg.trials, cfg.d1, cfg.d2)?,
        singlet_fixture_report()?,
        steering_report(cfg.tol)?,
    ])
}

fn partial_positivity_report(cfg: &SuiteConfig) -> Result<VerificationReport, CliError> {
    let min = partial_positivity_suite(cfg.seed, cfg.trials, cfg.d1, cfg.d2)?;
    let defect = if min.is_nan() {
        f64::NAN
    } else {
        (-min).max(0.0)
    };
    Ok(VerificationReport::from_defect(
        "partial-positivity",
        cfg.seed,
        cfg.trials,
        defect,
        PARTIAL_POSITIVITY_FLOOR,
    )
    .with_witness(json!({ "min_eigenvalue": min })))
}

fn dsum_reports(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>, CliError> {
    let m = DSumModel::new(cfg.d1, cfg.d2)?;
    Ok(vec![
        dsum_suite(cfg.seed, cfg.trials, cfg.d1, cfg.d2, cfg.outcomes, cfg.tol)?,
        commutation_nosig_suite(&m, cfg.seed, cfg.trials, cfg.outcomes, cfg.tol)?,
    ])
}

/// Rows of the audit table: quantum and classical composites must be
/// locally observable, the direct sum must not be.
pub fn audit_rows(cfg: &SuiteConfig) -> Result<Vec<AuditRow>, CliError> {
    Ok(vec![
        audit_row(&QuantumBipartite::new(cfg.d1, cfg.d2)?, true)?,
        audit_row(&ClassicalBipartite::new(cfg.d1, cfg.d2)?, true)?,
        audit_row(&DSumModel::new(cfg.d1, cfg.d2)?, false)?,
    ])
}

fn audit_reports(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>, CliError> {
    fn pair<B>(bip: &B, expect: bool) -> Result<Vec<VerificationReport>, CliError>
    where
        B: nosig_core::tomo::LocalTomography,
        B::Joint: nosig_core::opcore::ModelSampler,
    {
        let lop = local_observability_audit(bip)?;
        let lop = if expect { lop } else { lop.expecting_failure() };
        Ok(vec![lop, dimension_identity_check(bip)?])
    }
    let mut out = pair(&QuantumBipartite::new(cfg.d1, cfg.d2)?, true)?;
    out.extend(pair(&ClassicalBipartite::new(cfg.d1, cfg.d2)?, true)?);
    out.extend(pair(&DSumModel::new(cfg.d1, cfg.d2)?, false)?);
    Ok(out)
}

fn fixture_report(cfg: &SuiteConfig, source: &str) -> Result<VerificationReport, CliError> {
    let fixture = load_fixture(source)?;
    match (cfg.suite, fixture) {
        (Suite::QuantumNosig, Fixture::Instrument(f)) => instrument_fixture_report(&f, cfg.tol),
        (Suite::Boxworld, Fixture::Box(b)) => Ok(box_nosig_report(source, &b, cfg.tol)),
        (suite, _) => Err(CliError::Usage(format!(
            "fixture '{source}' does not apply to suite {suite:?}"
        ))),
    }
}

/// Runs the configured suite.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteRun, CliError> {
    cfg.validate()?;
    if let Some(source) = &cfg.fixture {
        let report = fixture_report(cfg, source)?;
        let table = render_reports(std::slice::from_ref(&report));
        return Ok(SuiteRun { report, table });
    }
    let mut audit = None;
    let parts = match cfg.suite {
        Suite::Opcore => opcore_reports(cfg)?,
        Suite::QuantumNosig => quantum_reports(cfg)?,
        Suite::Lemma => vec![partial_positivity_report(cfg)?],
        Suite::Dsum => dsum_reports(cfg)?,
        Suite::TomoAudit => {
            audit = Some(audit_rows(cfg)?);
            audit_reports(cfg)?
        }
        Suite::Boxworld => vec![boxworld_suite(cfg.tol)],
        Suite::All => {
            audit = Some(audit_rows(cfg)?);
            let mut all = opcore_reports(cfg)?;
            all.extend(quantum_reports(cfg)?);
            all.push(partial_positivity_report(cfg)?);
            all.extend(dsum_reports(cfg)?);
            all.extend(audit_reports(cfg)?);
            all.push(boxworld_suite(cfg.tol));
            all
        }
    };
    let mut table = render_reports(&parts);
    if let Some(rows) = &audit {
        table.push('\n');
        table.push_str(&render_audit(rows));
    }
    let name = serde_json::to_value(cfg.suite)?
        .as_str()
        .unwrap_or("suite")
        .to_string();
    let mut report = VerificationReport::aggregate(name, cfg.seed, cfg.tol, parts);
    if let Some(rows) = audit {
        report.pass = report.pass && rows.iter().all(AuditRow::as_expected);
        let mut w = report.witness.take().unwrap_or_default();
        w = json!({ "parts": w, "audit": rows });
        report.witness = Some(w);
    }
    Ok(SuiteRun { report, table })
}

/// 0 when every part matches expectation, 1 otherwise.
pub fn exit_code(report: &VerificationReport) -> i32 {
    if report.as_expected() {
        0
    } else {
        1
    }
}

fn status(r: &VerificationReport) -> &'static str {
    match (r.pass, r.expected_failure) {
        (true, false) => "pass",
        (false, true) => "fail (expected)",
        (true, true) => "pass (UNEXPECTED)",
        (false, false) => "FAIL",
    }
}

pub fn render_reports(reports: &[VerificationReport]) -> String {
    let width = reports
        .iter()
        .map(|r| r.suite.len())
        .max()
        .unwrap_or(5)
        .max(5);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>6}  {:>12}  {:>9}  status",
        "suite", "trials", "max_defect", "tol"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<width$}  {:>6}  {:>12.3e}  {:>9.1e}  {}",
            r.suite,
            r.trials,
            r.max_defect,
            r.tol,
            status(r)
        );
    }
    out
}

pub fn render_audit(rows: &[AuditRow]) -> String {
    let width = rows.iter().map(|r| r.model.len()).max().unwrap_or(5).max(5);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>7}  {:>8}  {:>11}  {:<4}  identity",
        "model", "adm(S)", "adm(P1)", "rank", "LOP"
    );
    for r in rows {
        let flag = |ok: bool| if ok { "pass" } else { "fail" };
        let _ = writeln!(
            out,
            "{:<width$}  {:>7}  {:>8}  {:>11}  {:<4}  {}{}",
            r.model,
            r.adm_states,
            r.adm_effects,
            format!("{}/{}", r.lop_rank, r.lop_needed),
            flag(r.lop),
            flag(r.identity),
            if r.expected_lop { "" } else { "  (expected)" }
        );
    }
    out
}

/// Writes the report as pretty JSON.
pub fn write_json(report: &VerificationReport, path: &Path) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
