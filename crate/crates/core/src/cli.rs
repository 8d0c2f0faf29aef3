//! Run configuration, suite dispatch and report serialization for the
//! `jointbound` binary.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bounds::{
    angle_visibilities, AnglePair, BoundReport, CIRELSON_BOUND, COHERENCE_BOUND, DEFAULT_REFINE_ITERS,
    SIMPLIFIED_BOUND, TIGHT_BOUND,
};
use crate::error::{Error, Result};
use crate::joint::{bloch_bound_lhs, VisibilityPair};
use crate::pair::{
    correlations_of_state, equatorial_components, local_means_of_state, pair_distribution_formula,
    pair_distribution_trace, pair_moment, reduced_outcome_distribution_a, BellFamilyState, DensityOperator4,
    MomentSpec, PairOutcomeLabel,
};
use crate::sampling::{
    estimate_moment, experimental_chsh, ginibre_random_mixed_state, haar_random_pure_state, max_experimental_chsh,
    sample_outcomes, selected_outcome_probability, zero_probability_curve_max, SeededSampler, ShotRecord, ALGORITHM_ID,
};
use crate::suite::{self, Check, CriterionResult, DEFAULT_TOLERANCE};

/// Overrides the directory reports go to when no output path is given.
pub const OUTPUT_DIR_ENV: &str = "JOINTBOUND_OUTPUT_DIR";
pub const ARTIFACT_VERSION: &str = concat!("jointbound ", env!("CARGO_PKG_VERSION"));
pub const DEFAULT_GRID_STEPS: usize = 64;
pub const DEFAULT_SHOTS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Subcommand {
    Single,
    Pair,
    Bound,
    Scan,
    Sample,
    Verify,
}

impl Subcommand {
    fn name(self) -> &'static str {
        match self {
            Subcommand::Single => "single",
            Subcommand::Pair => "pair",
            Subcommand::Bound => "bound",
            Subcommand::Scan => "scan",
            Subcommand::Sample => "sample",
            Subcommand::Verify => "verify",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    /// `(|00⟩ + e^{iφ}|11⟩)/√2`
    Bell,
    /// Ginibre-random mixed state drawn from the seed.
    Mixed,
    /// Haar-random pure state drawn from the seed.
    Haar,
    /// 4×4 matrix read from `--state-file`.
    File,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ScanTarget {
    /// Observed CHSH surface over (α, β) at fixed φ.
    Eq20,
    /// Observed CHSH along the zero-probability constraint, over φ.
    Eq21,
}

/// Everything a run depends on. Angles are in radians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub seed: u64,
    pub tolerance: f64,
    pub grid_steps: usize,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub phi: f64,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub state: StateKind,
    pub state_file: Option<PathBuf>,
    pub what: Option<ScanTarget>,
    pub shots: usize,
    pub shots_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(subcommand: Subcommand) -> Self {
        Self {
            subcommand,
            seed: 0,
            tolerance: DEFAULT_TOLERANCE,
            grid_steps: DEFAULT_GRID_STEPS,
            output_path: None,
            format: Format::Json,
            phi: FRAC_PI_4,
            alpha: None,
            beta: None,
            state: StateKind::Bell,
            state_file: None,
            what: None,
            shots: DEFAULT_SHOTS,
            shots_path: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return bad("--tolerance must be a positive finite number");
        }
        if self.grid_steps < 8 {
            return bad("--grid-steps must be at least 8");
        }
        for (name, v) in [("--phi", Some(self.phi)), ("--alpha", self.alpha), ("--beta", self.beta)] {
            if v.is_some_and(|v| !v.is_finite()) {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        match (self.state, &self.state_file) {
            (StateKind::File, None) => return bad("--state file requires --state-file"),
            (k, Some(_)) if k != StateKind::File => return bad("--state-file requires --state file"),
            _ => {}
        }
        match (self.subcommand, self.what) {
            (Subcommand::Scan, None) => return bad("scan requires --what eq20|eq21"),
            (s, Some(_)) if s != Subcommand::Scan => return bad("--what only applies to scan"),
            _ => {}
        }
        if self.shots_path.is_some() && self.subcommand != Subcommand::Sample {
            return bad("--shots-path only applies to sample");
        }
        if self.subcommand == Subcommand::Sample && self.shots < 2 {
            return bad("--shots must be at least 2");
        }
        Ok(())
    }
}

/// Command-line flags; converts into a [`RunConfig`].
#[derive(Debug, Parser)]
#[command(name = "jointbound", version, about = "Joint-measurement bounds on two-qubit correlations")]
pub struct Cli {
    #[arg(value_enum)]
    pub subcommand: Subcommand,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    #[arg(long, default_value_t = DEFAULT_GRID_STEPS)]
    pub grid_steps: usize,
    /// Report destination; defaults to $JOINTBOUND_OUTPUT_DIR or stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, default_value_t = FRAC_PI_4, allow_negative_numbers = true)]
    pub phi: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, value_enum, default_value_t = StateKind::Bell)]
    pub state: StateKind,
    #[arg(long)]
    pub state_file: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub what: Option<ScanTarget>,
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    pub shots: usize,
    /// Where `sample` writes its shot CSV.
    #[arg(long)]
    pub shots_path: Option<PathBuf>,
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        Self {
            subcommand: c.subcommand,
            seed: c.seed,
            tolerance: c.tolerance,
            grid_steps: c.grid_steps,
            output_path: c.output,
            format: c.format,
            phi: c.phi,
            alpha: c.alpha,
            beta: c.beta,
            state: c.state,
            state_file: c.state_file,
            what: c.what,
            shots: c.shots,
            shots_path: c.shots_path,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub row_labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Payload {
    Scalar(f64),
    Text(String),
    Table(Table),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config_echo: RunConfig,
    pub results: BTreeMap<String, Payload>,
    pub checks: Vec<Check>,
    pub pass_flags: BTreeMap<String, bool>,
    pub artifact_version: String,
    pub timestamp: String,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        !self.pass_flags.is_empty() && self.pass_flags.values().all(|&p| p)
    }

    pub fn scalar(&self, key: &str) -> Option<f64> {
        match self.results.get(key) {
            Some(Payload::Scalar(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Default)]
struct Builder {
    results: BTreeMap<String, Payload>,
    checks: Vec<Check>,
}

impl Builder {
    fn scalar(&mut self, key: &str, v: f64) {
        self.results.insert(key.to_string(), Payload::Scalar(v));
    }

    fn text(&mut self, key: &str, v: impl Into<String>) {
        self.results.insert(key.to_string(), Payload::Text(v.into()));
    }

    fn table(&mut self, key: &str, t: Table) {
        self.results.insert(key.to_string(), Payload::Table(t));
    }

    fn criterion(&mut self, c: CriterionResult) {
        self.text(&format!("criterion_{:02}", c.id), c.summary_line());
        for mut check in c.checks {
            check.name = format!("c{:02}.{}", c.id, check.name);
            self.checks.push(check);
        }
    }
}

pub fn load_state_file(path: &Path) -> Result<DensityOperator4> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(&text)?;
    DensityOperator4::from_nested_rows(&rows)
}

fn select_state(config: &RunConfig) -> Result<DensityOperator4> {
    let s = SeededSampler::new(config.seed);
    Ok(match config.state {
        StateKind::Bell => BellFamilyState::new(config.phi).to_density(),
        StateKind::Mixed => ginibre_random_mixed_state(&s),
        StateKind::Haar => haar_random_pure_state(&s),
        StateKind::File => load_state_file(config.state_file.as_deref().expect("validated"))?,
    })
}

fn angles(config: &RunConfig, default: f64) -> AnglePair {
    AnglePair::new(config.alpha.unwrap_or(default), config.beta.unwrap_or(default))
}

fn state_info(b: &mut Builder, rho: &DensityOperator4) {
    b.text("state_digest", crate::sampling::state_digest(rho));
    b.scalar("state_purity", rho.purity());
}

fn run_single(config: &RunConfig, b: &mut Builder) -> Result<()> {
    b.criterion(suite::povm_uncertainty_equivalence()?);
    b.criterion(suite::product_average_vanishes(config.seed)?);
    b.criterion(suite::bloch_bound_derivation()?);

    let rho = select_state(config)?;
    state_info(b, &rho);
    let s = equatorial_components(&rho.reduced_a())?;
    let v = VisibilityPair::saturated(config.alpha.unwrap_or(FRAC_PI_4))?;
    let d = reduced_outcome_distribution_a(&rho, &v)?;
    b.scalar("reduced_a.ex", s.ex());
    b.scalar("reduced_a.ey", s.ey());
    b.scalar("reduced_a.bloch_lhs", bloch_bound_lhs(&s));
    b.scalar("visibility.v_x", v.v_x());
    b.scalar("visibility.v_y", v.v_y());
    b.table(
        "reduced_a.distribution",
        Table {
            columns: vec!["x".into(), "y".into(), "p".into()],
            row_labels: vec![],
            rows: d.iter().map(|(o, p)| vec![o.x.value(), o.y.value(), p]).collect(),
        },
    );
    b.checks.push(Check::at_most("reduced_a.negated_min_probability", -d.min(), 0.0, 1e-12));
    b.checks.push(Check::equals("reduced_a.total_probability", d.total(), 1.0, 1e-12));
    Ok(())
}

fn run_pair(config: &RunConfig, b: &mut Builder) -> Result<()> {
    b.criterion(suite::pair_moment_rules(config.seed)?);

    let rho = select_state(config)?;
    state_info(b, &rho);
    let a = angles(config, FRAC_PI_4);
    let (va, vb) = angle_visibilities(a);
    let c = correlations_of_state(&rho);
    let means = local_means_of_state(&rho);
    let d = pair_distribution_trace(&rho, &va, &vb);
    let f = pair_distribution_formula(&c, &va, &vb);
    for (k, v) in ["c_xx", "c_xy", "c_yx", "c_yy"].iter().zip(c.to_array()) {
        b.scalar(&format!("correlations.{k}"), v);
    }
    for (k, v) in [("ax", means.ax), ("ay", means.ay), ("bx", means.bx), ("by", means.by)] {
        b.scalar(&format!("local_means.{k}"), v);
    }
    b.scalar("alpha", a.alpha);
    b.scalar("beta", a.beta);
    b.table(
        "distribution",
        Table {
            columns: ["x_a", "y_a", "x_b", "y_b", "p_trace", "p_formula"].map(String::from).to_vec(),
            row_labels: vec![],
            rows: PairOutcomeLabel::all()
                .map(|o| {
                    let mut row: Vec<f64> = o.values().iter().map(|&v| v as f64).collect();
                    row.extend([d.get(o), f.get(o)]);
                    row
                })
                .collect(),
        },
    );
    b.checks.push(Check::equals("total_probability", d.total(), 1.0, 1e-12));
    b.checks.push(Check::at_most("negated_min_probability", -d.min(), 0.0, 1e-12));
    if means.max_abs() <= 1e-12 {
        let xy = MomentSpec::mixed_xy().iter().map(|&s| pair_moment(&d, s).abs()).fold(0.0, f64::max);
        b.checks.push(Check::at_most("max_abs_xy_moment", xy, 0.0, 1e-12));
        b.checks.push(Check::at_most("formula_vs_trace", f.max_abs_diff(&d), 0.0, 1e-11));
    } else {
        b.text("formula_vs_trace", "skipped: state has nonzero local means");
    }
    Ok(())
}

fn run_bound(config: &RunConfig, b: &mut Builder) -> Result<()> {
    let rho = select_state(config)?;
    state_info(b, &rho);
    let r = BoundReport::for_state(&rho, config.grid_steps, DEFAULT_REFINE_ITERS);
    let tol = config.tolerance;
    for (k, v) in ["c_xx", "c_xy", "c_yx", "c_yy"].iter().zip(r.correlations.to_array()) {
        b.scalar(&format!("correlations.{k}"), v);
    }
    b.scalar("tight_lhs", r.tight_lhs);
    b.scalar("simplified_lhs", r.simplified_lhs);
    b.scalar("chsh", r.chsh);
    b.scalar("coherence_lhs", r.coherence_lhs);
    b.scalar("sup_angles", r.sup_angles);
    let sat = r.saturating;
    for (k, v) in [
        ("tight", sat.tight),
        ("simplified", sat.simplified),
        ("chsh", sat.chsh),
        ("coherence", sat.coherence),
        ("sup_angles", sat.sup_angles),
    ] {
        b.text(&format!("saturating.{k}"), v.to_string());
    }
    b.checks.push(Check::at_most("tight_bound", r.tight_lhs, TIGHT_BOUND, tol));
    b.checks.push(Check::at_most("simplified_bound", r.simplified_lhs, SIMPLIFIED_BOUND, tol));
    b.checks.push(Check::at_most("chsh_bound", r.chsh, CIRELSON_BOUND, tol));
    b.checks.push(Check::at_most("coherence_bound", r.coherence_lhs, COHERENCE_BOUND, tol));
    b.checks.push(Check::equals("coherence_identity", 4.0 * r.coherence_lhs, r.tight_lhs, 1e-10));
    b.checks.push(Check::equals("sup_vs_closed_form", r.sup_angles, r.tight_lhs, tol));
    Ok(())
}

fn run_scan(config: &RunConfig, b: &mut Builder) -> Result<()> {
    let n = config.grid_steps;
    let tol = config.tolerance;
    match config.what.expect("validated") {
        ScanTarget::Eq20 => {
            let phi = config.phi;
            let step = FRAC_PI_2 / (n - 1) as f64;
            let rows: Vec<Vec<f64>> = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i as f64 * step, j as f64 * step)))
                .map(|(alpha, beta)| vec![alpha, beta, experimental_chsh(phi, AnglePair::new(alpha, beta))])
                .collect();
            let grid_max = rows.iter().map(|r| r[2]).fold(f64::NEG_INFINITY, f64::max);
            let m = max_experimental_chsh(phi);
            b.scalar("phi", phi);
            b.scalar("max_value", m.value);
            b.scalar("argmax_alpha", m.alpha);
            b.scalar("argmax_beta", m.beta);
            b.scalar("grid_max_value", grid_max);
            b.table(
                "surface",
                Table { columns: ["alpha", "beta", "value"].map(String::from).to_vec(), row_labels: vec![], rows },
            );
            b.checks.push(Check::at_most("grid_max_below_refined_max", grid_max, m.value, tol));
            if (0.0..=FRAC_PI_2).contains(&phi) {
                b.checks.push(Check::equals("max_value_closed_form", m.value, phi.cos() + phi.sin(), 1e-6));
            }
            if (phi - FRAC_PI_4).abs() <= 1e-9 {
                b.checks.push(Check::equals("max_value_sqrt2", m.value, SQRT_2, 1e-6));
                b.checks.push(Check::equals("argmax_alpha_pi_over_4", m.alpha, FRAC_PI_4, 1e-6));
                b.checks.push(Check::equals("argmax_beta_pi_over_4", m.beta, FRAC_PI_4, 1e-6));
            }
        }
        ScanTarget::Eq21 => {
            let step = PI / (n - 1) as f64;
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|k| {
                    let phi = k as f64 * step;
                    let a = AnglePair::new(0.5 * phi, 0.5 * phi);
                    let quantum = crate::bounds::chsh_value(&crate::pair::bell_family_correlations(phi));
                    vec![phi, phi.cos(), experimental_chsh(phi, a), quantum, selected_outcome_probability(phi, a)]
                })
                .collect();
            let max_p = rows.iter().map(|r| r[4].abs()).fold(0.0, f64::max);
            let z = zero_probability_curve_max(step)?;
            b.scalar("max_value", z.value);
            b.scalar("argmax_phi", z.phi);
            b.scalar("argmax_cos_phi", z.cos_phi);
            b.scalar("quantum_chsh_at_argmax", z.quantum_chsh);
            b.table(
                "curve",
                Table {
                    columns: ["phi", "cos_phi", "value", "quantum_chsh", "outcome_probability"]
                        .map(String::from)
                        .to_vec(),
                    row_labels: vec![],
                    rows,
                },
            );
            b.checks.push(Check::equals("max_value", z.value, 1.25, 1e-6));
            b.checks.push(Check::equals("argmax_cos_phi", z.cos_phi, 0.5, 1e-6));
            b.checks.push(Check::equals("quantum_chsh_at_argmax", z.quantum_chsh, 1.0 + 3f64.sqrt(), tol));
            b.checks.push(Check::at_most("max_constrained_outcome_probability", max_p, 0.0, 1e-12));
        }
    }
    Ok(())
}

fn run_sample(config: &RunConfig, b: &mut Builder) -> Result<Option<ShotRecord>> {
    let rho = select_state(config)?;
    state_info(b, &rho);
    let default_angle = if config.state == StateKind::Bell { 0.5 * config.phi } else { FRAC_PI_4 };
    let a = angles(config, default_angle);
    let (va, vb) = angle_visibilities(a);
    let d = pair_distribution_trace(&rho, &va, &vb);
    let s = SeededSampler::new(config.seed);
    let r = sample_outcomes(&d, config.shots, &s, format!("{:?} alpha={:?} beta={:?}", config.state, a.alpha, a.beta))?;

    let mut labels = vec![];
    let mut rows = vec![];
    let mut max_z: f64 = 0.0;
    for spec in MomentSpec::all_nontrivial() {
        let e = estimate_moment(&r, spec)?;
        let pop = pair_moment(&d, spec);
        let z = e.z_score(pop);
        max_z = max_z.max(z);
        labels.push(spec.label());
        rows.push(vec![e.value, e.std_error, pop, z]);
    }
    let counts = r.counts();
    let unexpected: usize = d.iter().filter(|&(_, p)| p <= 1e-15).map(|(o, _)| counts[o.index()]).sum();
    b.scalar("alpha", a.alpha);
    b.scalar("beta", a.beta);
    b.scalar("shots", config.shots as f64);
    b.text("algorithm_id", ALGORITHM_ID);
    b.table(
        "moments",
        Table {
            columns: ["estimate", "std_error", "population", "z_score"].map(String::from).to_vec(),
            row_labels: labels,
            rows,
        },
    );
    b.table(
        "counts",
        Table {
            columns: ["x_a", "y_a", "x_b", "y_b", "count", "probability"].map(String::from).to_vec(),
            row_labels: vec![],
            rows: PairOutcomeLabel::all()
                .map(|o| {
                    let mut row: Vec<f64> = o.values().iter().map(|&v| v as f64).collect();
                    row.extend([counts[o.index()] as f64, d.get(o)]);
                    row
                })
                .collect(),
        },
    );
    b.checks.push(Check::at_most("max_moment_z_score", max_z, 5.0, 0.0));
    b.checks.push(Check::no_failures("zero_probability_outcome_count", unexpected));
    Ok(Some(r))
}

/// Runs the configured suite. Shot records from `sample` are returned
/// alongside the report.
pub fn run_with_shots(config: &RunConfig) -> Result<(Report, Option<ShotRecord>)> {
    config.validate()?;
    let mut b = Builder::default();
    let mut shots = None;
    match config.subcommand {
        Subcommand::Single => run_single(config, &mut b)?,
        Subcommand::Pair => run_pair(config, &mut b)?,
        Subcommand::Bound => run_bound(config, &mut b)?,
        Subcommand::Scan => run_scan(config, &mut b)?,
        Subcommand::Sample => shots = run_sample(config, &mut b)?,
        Subcommand::Verify => {
            for c in suite::run_all(config.seed, config.tolerance)? {
                b.criterion(c);
            }
        }
    }
    let pass_flags = b.checks.iter().map(|c| (c.name.clone(), c.pass)).collect();
    let report = Report {
        config_echo: config.clone(),
        results: b.results,
        checks: b.checks,
        pass_flags,
        artifact_version: ARTIFACT_VERSION.to_string(),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
    };
    Ok((report, shots))
}

pub fn run(config: &RunConfig) -> Result<Report> {
    run_with_shots(config).map(|(r, _)| r)
}

/// `f64` at 17 significant digits.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Compact JSON with every double at 17 significant digits.
struct SeventeenDigits;

impl serde_json::ser::Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            writer.write_all(fmt_f64(value).as_bytes())
        } else {
            writer.write_all(b"null")
        }
    }
}

pub fn render_report(r: &Report, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = Vec::new();
            let mut ser = serde_json::Serializer::with_formatter(&mut out, SeventeenDigits);
            r.serialize(&mut ser)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["name", "value", "bound", "tolerance", "pass"])?;
            for c in &r.checks {
                w.write_record([
                    c.name.clone(),
                    fmt_f64(c.value),
                    fmt_f64(c.bound),
                    fmt_f64(c.tolerance),
                    c.pass.to_string(),
                ])?;
            }
            w.into_inner().map_err(|e| Error::Io { path: PathBuf::from("<memory>"), source: e.into_error() })
        }
    }
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn write_report(r: &Report, path: &Path, format: Format) -> Result<()> {
    write_bytes(path, &render_report(r, format)?)
}

pub fn parse_json_report(bytes: &[u8]) -> Result<Report> {
    Ok(serde_json::from_slice(bytes)?)
}

/// Shot record as CSV with columns `index, x_a, y_a, x_b, y_b`.
pub fn shots_csv_bytes(r: &ShotRecord) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::with_capacity(r.outcomes.len() * 16));
    w.write_record(["index", "x_a", "y_a", "x_b", "y_b"])?;
    for (i, o) in r.outcomes.iter().enumerate() {
        let [xa, ya, xb, yb] = o.values();
        w.serialize((i, xa, ya, xb, yb))?;
    }
    w.into_inner().map_err(|e| Error::Io { path: PathBuf::from("<memory>"), source: e.into_error() })
}

pub fn write_shots_csv(r: &ShotRecord, path: &Path) -> Result<()> {
    write_bytes(path, &shots_csv_bytes(r)?)
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Json => "json",
        Format::Csv => "csv",
    }
}

/// Explicit output path, else a file in `$JOINTBOUND_OUTPUT_DIR`, else
/// `None` for stdout.
pub fn resolve_output_path(config: &RunConfig) -> Option<PathBuf> {
    config.output_path.clone().or_else(|| {
        std::env::var_os(OUTPUT_DIR_ENV).map(|dir| {
            PathBuf::from(dir).join(format!("{}-report.{}", config.subcommand.name(), extension(config.format)))
        })
    })
}

pub fn resolve_shots_path(config: &RunConfig) -> Option<PathBuf> {
    config
        .shots_path
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(|dir| PathBuf::from(dir).join("sample-shots.csv")))
}

/// Runs, writes all outputs, and returns the report.
pub fn execute(config: &RunConfig) -> Result<Report> {
    let (report, shots) = run_with_shots(config)?;
    if let (Some(shots), Some(path)) = (&shots, resolve_shots_path(config)) {
        write_shots_csv(shots, &path)?;
    }
    match resolve_output_path(config) {
        Some(path) => write_report(&report, &path, config.format)?,
        None => {
            let bytes = render_report(&report, config.format)?;
            io::stdout().write_all(&bytes).map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source })?;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_rejects_bad_flags() {
        let mut c = RunConfig::new(Subcommand::Bound);
        assert!(c.validate().is_ok());
        c.tolerance = 0.0;
        assert!(c.validate().is_err());
        c.tolerance = 1e-9;
        c.grid_steps = 7;
        assert!(c.validate().is_err());
        c.grid_steps = 8;
        c.state = StateKind::File;
        assert!(c.validate().is_err());
        c.state = StateKind::Bell;
        c.what = Some(ScanTarget::Eq20);
        assert!(c.validate().is_err());
        assert!(RunConfig::new(Subcommand::Scan).validate().is_err());
    }

    #[test]
    fn seventeen_digit_json_round_trips() {
        let mut c = RunConfig::new(Subcommand::Bound);
        c.phi = 0.1 + 0.2;
        let r = run(&c).unwrap();
        let bytes = render_report(&r, Format::Json).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.contains("3.0000000000000004e-1"));
        assert_eq!(parse_json_report(&bytes).unwrap(), r);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn bound_report_for_bell_pi_over_4() {
        let mut c = RunConfig::new(Subcommand::Bound);
        c.phi = 0.7853981634;
        let r = run(&c).unwrap();
        assert!((r.scalar("chsh").unwrap() - CIRELSON_BOUND).abs() < 1e-9);
        assert!(r.all_pass());
    }

    #[test]
    fn csv_report_has_one_row_per_check() {
        let r = run(&RunConfig::new(Subcommand::Bound)).unwrap();
        let text = String::from_utf8(render_report(&r, Format::Csv).unwrap()).unwrap();
        assert_eq!(text.lines().count(), r.checks.len() + 1);
        assert!(text.starts_with("name,value,bound,tolerance,pass\n"));
    }

    #[test]
    fn moment_labels() {
        use crate::pair::Factor::*;
        assert_eq!(MomentSpec::new(XY, X).label(), "x_a*y_a*x_b");
        assert_eq!(MomentSpec::new(One, Y).label(), "y_b");
    }
}
