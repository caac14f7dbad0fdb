//! Experiment configs, run records, and their CSV / JSON / SVG renderings.
//!
//! A config fully determines its output: the same config (and seed, when
//! sampling shots) always renders to the same bytes. Wall-clock timing is
//! the one exception and is only recorded on request.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{Error, Result};
use crate::metrics::{self, Distribution};
use crate::qutrit::{self, ChainLayout, NoiseModel, ShotCounts};
use crate::topology::{self, SweepInitial, SweepMode, SweepPlan, SweepRow};
use crate::walk::{self, CoinConvention, CoinProfile, InitialState, WalkKind, WalkState};

pub const TOOL_VERSION: &str = concat!("dtqw ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    IdealUni,
    IdealBi,
    Qutrit,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    SvgHeatmap,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "svg-heatmap" | "svg" => Ok(OutputFormat::SvgHeatmap),
            _ => Err(Error::config("output.format", format!("unknown format `{s}` (csv, json, svg-heatmap)"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileShape {
    Homogeneous,
    TwoDomain,
    PerStep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub step: usize,
    pub x: i64,
    pub theta: Angle,
}

/// Coin profile as written in a config. Per-step tables are read in the
/// engine's own coordinates; the other shapes are always bidirectional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub kind: ProfileShape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Angle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_minus: Option<Angle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_plus: Option<Angle>,
    #[serde(default)]
    pub boundary: i64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub table: Vec<TableEntry>,
    #[serde(default)]
    pub axis: Angle,
    #[serde(default)]
    pub convention: CoinConvention,
}

fn finite(field: &str, a: Angle) -> Result<f64> {
    if a.rad().is_finite() {
        Ok(a.rad())
    } else {
        Err(Error::config(field, "angle must be finite"))
    }
}

fn required(field: &str, a: Option<Angle>) -> Result<f64> {
    finite(field, a.ok_or_else(|| Error::config(field, "missing"))?)
}

impl ProfileConfig {
    pub fn to_profile(&self, field: &str) -> Result<CoinProfile> {
        let f = |name: &str| format!("{field}.{name}");
        let base = match self.kind {
            ProfileShape::Homogeneous => CoinProfile::homogeneous(required(&f("theta"), self.theta)?),
            ProfileShape::TwoDomain => CoinProfile::two_domain(
                required(&f("theta_minus"), self.theta_minus)?,
                required(&f("theta_plus"), self.theta_plus)?,
            )
            .with_boundary(self.boundary),
            ProfileShape::PerStep => {
                if self.table.is_empty() {
                    return Err(Error::config(f("table"), "per-step profile needs a table"));
                }
                let mut table = std::collections::BTreeMap::new();
                for (k, e) in self.table.iter().enumerate() {
                    if e.step == 0 {
                        return Err(Error::config(format!("{field}.table[{k}].step"), "steps are 1-based"));
                    }
                    let theta = finite(&format!("{field}.table[{k}].theta"), e.theta)?;
                    if table.insert((e.step, e.x), theta).is_some() {
                        return Err(Error::config(format!("{field}.table[{k}]"), "duplicate (step, x) entry"));
                    }
                }
                CoinProfile::per_step(table)
            }
        };
        Ok(base.with_axis(finite(&f("axis"), self.axis)?).with_convention(self.convention))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub engine: Engine,
    pub steps: usize,
    pub profile: ProfileConfig,
    pub initial: InitialState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<ChainLayout>,
    #[serde(default)]
    pub output: OutputConfig,
    /// Seed for shot sampling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Number of single-shot readouts to sample from the final step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    /// Keep unidirectional coordinates for ideal-uni and qutrit output.
    #[serde(default)]
    pub raw_coordinates: bool,
}

/// Parses JSON, reporting the path of the offending field on failure.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." { "<root>".to_string() } else { path };
        Error::config(field, e.into_inner().to_string())
    })
}

fn only_qutrit(engine: Engine, field: &str, present: bool) -> Result<()> {
    if present && engine != Engine::Qutrit {
        return Err(Error::config(field, "only used by the qutrit engine"));
    }
    Ok(())
}

fn check_chain_initial(init: &WalkState) -> Result<()> {
    if init.offset != 0 || init.amps.len() != 1 {
        return Err(Error::config("initial", "the qutrit engine prepares a single walker at x = 0"));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn validate(&self) -> Result<()> {
        self.profile.to_profile("profile")?;
        let init = walk::initial_state(&self.initial).map_err(|e| Error::config("initial", e.to_string()))?;
        only_qutrit(self.engine, "noise", self.noise.is_some())?;
        only_qutrit(self.engine, "layout", self.layout.is_some())?;
        only_qutrit(self.engine, "shots", self.shots.is_some())?;
        if self.raw_coordinates && self.engine == Engine::IdealBi {
            return Err(Error::config("raw_coordinates", "ideal-bi output is already bidirectional"));
        }
        if self.engine == Engine::Qutrit {
            check_chain_initial(&init)?;
            self.layout().validate().map_err(|e| Error::config("layout", e.to_string()))?;
            self.noise().validate()?;
        }
        Ok(())
    }

    pub fn layout(&self) -> ChainLayout {
        self.layout.unwrap_or_default()
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise.unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coordinates {
    Bidirectional,
    Unidirectional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub distribution: Distribution,
    /// `None` when the distribution is sub-normalized.
    pub diffusion_distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stranded: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similarity_to_ideal: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub coordinates: Coordinates,
    pub steps: Vec<StepRecord>,
    /// Counts per qutrit, unidirectional coordinates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<ShotCounts>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_s: Option<f64>,
}

impl RunRecord {
    pub fn distributions(&self) -> Vec<Distribution> {
        self.steps.iter().map(|s| s.distribution.clone()).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        parse_json(text)
    }
}

/// Profile for a unidirectional engine: shapes given in bidirectional
/// coordinates are mapped, tables are used as written.
fn uni_profile(profile: &CoinProfile, t: usize) -> Result<CoinProfile> {
    match profile.kind {
        walk::ProfileKind::PerStep { .. } => Ok(profile.clone()),
        _ => walk::map_profile_bi_to_uni(profile, t),
    }
}

pub fn cmd_walk(config: &ExperimentConfig) -> Result<RunRecord> {
    config.validate()?;
    let t = config.steps;
    let profile = config.profile.to_profile("profile")?;
    let init = walk::initial_state(&config.initial)?;

    let mut steps: Vec<StepRecord>;
    let mut shots = None;
    match config.engine {
        Engine::IdealBi | Engine::IdealUni => {
            let dists = if config.engine == Engine::IdealBi {
                walk::evolve(&init, &profile, WalkKind::Bidirectional, t)?
            } else {
                walk::evolve(&init, &uni_profile(&profile, t)?, WalkKind::Unidirectional, t)?
            };
            steps = dists
                .into_iter()
                .map(|distribution| StepRecord {
                    distribution,
                    diffusion_distance: None,
                    loss: None,
                    stranded: None,
                    similarity_to_ideal: None,
                })
                .collect();
        }
        Engine::Qutrit => {
            let layout = config.layout();
            let noise = config.noise();
            let circuit = qutrit::compile_walk(t, &profile, &init.amps[0], &layout)?;
            let states = qutrit::simulate_trajectory(&circuit, &noise, &layout)?;
            let ideal = walk::evolve(&init, &uni_profile(&profile, t)?, WalkKind::Unidirectional, t)?;
            let measurements: Vec<_> = states
                .iter()
                .enumerate()
                .map(|(s, st)| qutrit::measure_positions(st, &layout, s).with_readout_error(noise.readout_error))
                .collect();
            if let (Some(n), Some(last)) = (config.shots, measurements.last()) {
                shots = Some(qutrit::sample_shots(last, n, config.seed.unwrap_or(0)));
            }
            steps = measurements
                .into_iter()
                .zip(&ideal)
                .map(|(m, reference)| {
                    let mut d = m.distribution;
                    // trim the untouched tail of the chain
                    d.probs.truncate(d.step + 1);
                    StepRecord {
                        similarity_to_ideal: Some(metrics::similarity(&d, reference)),
                        distribution: d,
                        diffusion_distance: None,
                        loss: Some(m.loss),
                        stranded: Some(m.stranded),
                    }
                })
                .collect();
        }
    }

    let coordinates = if config.engine == Engine::IdealBi || !config.raw_coordinates {
        Coordinates::Bidirectional
    } else {
        Coordinates::Unidirectional
    };
    if config.engine != Engine::IdealBi && coordinates == Coordinates::Bidirectional {
        for s in &mut steps {
            s.distribution = walk::convert_uni_to_bi(&s.distribution, s.distribution.step)?;
        }
    }
    for s in &mut steps {
        s.diffusion_distance = metrics::diffusion_distance(&s.distribution).ok();
    }
    Ok(RunRecord {
        tool_version: TOOL_VERSION.to_string(),
        config: config.clone(),
        coordinates,
        steps,
        shots,
        wall_clock_s: None,
    })
}

/// Per-step similarity of two records taken in the same coordinates.
pub fn cmd_compare(a: &RunRecord, b: &RunRecord) -> Result<Vec<(usize, f64)>> {
    if a.coordinates != b.coordinates {
        return Err(Error::InvalidArgument("records use different coordinates".into()));
    }
    metrics::similarity_series(&a.distributions(), &b.distributions())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepModeName {
    FixPlusVaryMinus,
    Antisymmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridConfig {
    Points(Vec<Angle>),
    /// `count` evenly spaced values; with `endpoints: false` the open
    /// interval `(start, stop)` is split into `count + 1` equal parts.
    Linspace {
        start: Angle,
        stop: Angle,
        count: usize,
        #[serde(default = "yes")]
        endpoints: bool,
    },
}

fn yes() -> bool {
    true
}

impl GridConfig {
    pub fn values(&self) -> Vec<f64> {
        match self {
            GridConfig::Points(p) => p.iter().map(|a| a.rad()).collect(),
            &GridConfig::Linspace { start, stop, count, endpoints } => {
                let (a, b) = (start.rad(), stop.rad());
                if endpoints {
                    if count == 1 {
                        return vec![a];
                    }
                    (0..count).map(|k| a + (b - a) * k as f64 / (count - 1) as f64).collect()
                } else {
                    (1..=count).map(|k| a + (b - a) * k as f64 / (count + 1) as f64).collect()
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub engine: Engine,
    pub mode: SweepModeName,
    /// Fixed θ₊ for `fix-plus-vary-minus`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_plus: Option<Angle>,
    pub grid: GridConfig,
    pub steps: Vec<usize>,
    #[serde(default)]
    pub initial: SweepInitial,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<ChainLayout>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn plan(&self) -> Result<SweepPlan> {
        let mode = match self.mode {
            SweepModeName::FixPlusVaryMinus => {
                SweepMode::FixPlusVaryMinus { theta_plus: required("theta_plus", self.theta_plus)? }
            }
            SweepModeName::Antisymmetric => {
                if self.theta_plus.is_some() {
                    return Err(Error::config("theta_plus", "antisymmetric sweeps vary θ₊ themselves"));
                }
                SweepMode::Antisymmetric
            }
        };
        let grid = self.grid.values();
        if grid.is_empty() {
            return Err(Error::config("grid", "grid is empty"));
        }
        if self.steps.is_empty() {
            return Err(Error::config("steps", "no step counts given"));
        }
        let plan = SweepPlan { mode, grid, steps: self.steps.clone(), initial: self.initial };
        plan.validate().map_err(|e| Error::config("grid", e.to_string()))?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<SweepPlan> {
        let plan = self.plan()?;
        only_qutrit(self.engine, "noise", self.noise.is_some())?;
        only_qutrit(self.engine, "layout", self.layout.is_some())?;
        if self.engine == Engine::Qutrit {
            self.layout.unwrap_or_default().validate().map_err(|e| Error::config("layout", e.to_string()))?;
            self.noise.unwrap_or_default().validate()?;
        }
        if self.output.format == OutputFormat::SvgHeatmap {
            return Err(Error::config("output.format", "sweeps render as csv or json"));
        }
        Ok(plan)
    }
}

/// Runs a sweep on the chosen engine. Output is in bidirectional
/// coordinates, ordered by `(θ, steps)`.
pub fn cmd_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let plan = config.validate()?;
    match config.engine {
        Engine::IdealBi => topology::run_sweep(&plan),
        Engine::IdealUni => topology::run_sweep_with(&plan, |profile, init, steps| {
            let t_max = steps.iter().copied().max().unwrap_or(0);
            let all = walk::evolve(init, &uni_profile(profile, t_max)?, WalkKind::Unidirectional, t_max)?;
            steps.iter().map(|&s| walk::convert_uni_to_bi(&all[s], s)).collect()
        }),
        Engine::Qutrit => {
            let layout = config.layout.unwrap_or_default();
            let noise = config.noise.unwrap_or_default();
            topology::run_sweep_with(&plan, |profile, init, steps| {
                check_chain_initial(init)?;
                let t_max = steps.iter().copied().max().unwrap_or(0);
                let circuit = qutrit::compile_walk(t_max, profile, &init.amps[0], &layout)?;
                let states = qutrit::simulate_trajectory(&circuit, &noise, &layout)?;
                steps
                    .iter()
                    .map(|&s| {
                        let m = qutrit::measure_positions(&states[s], &layout, s).with_readout_error(noise.readout_error);
                        let mut d = m.distribution;
                        d.probs.truncate(s + 1);
                        walk::convert_uni_to_bi(&d, s)
                    })
                    .collect()
            })
        }
    }
}

/// Twelve significant digits; exact zero prints as `0`.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v:.11e}")
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn position_range(record: &RunRecord) -> Option<(i64, i64)> {
    let lo = record.steps.iter().filter(|s| !s.distribution.is_empty()).map(|s| s.distribution.offset).min()?;
    let hi = record.steps.iter().map(|s| s.distribution.end()).max()?;
    Some((lo, hi))
}

/// One row per step: `step, p(lo) … p(hi), diffusion_distance`, followed by
/// `loss, stranded, similarity_to_ideal` for qutrit runs.
pub fn walk_csv(record: &RunRecord) -> Result<String> {
    let (lo, hi) = position_range(record).unwrap_or((0, 0));
    let chain = record.config.engine == Engine::Qutrit;
    let mut header = vec!["step".to_string()];
    header.extend((lo..hi).map(|x| format!("p({x})")));
    header.push("diffusion_distance".into());
    if chain {
        header.extend(["loss", "stranded", "similarity_to_ideal"].map(String::from));
    }
    let mut w = csv_writer();
    w.write_record(&header)?;
    let opt = |v: Option<f64>| v.map(format_number).unwrap_or_default();
    for s in &record.steps {
        let mut row = vec![s.distribution.step.to_string()];
        row.extend((lo..hi).map(|x| format_number(s.distribution.prob(x))));
        row.push(opt(s.diffusion_distance));
        if chain {
            row.extend([opt(s.loss), opt(s.stranded), opt(s.similarity_to_ideal)]);
        }
        w.write_record(&row)?;
    }
    finish(w)
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(["theta_swept_rad", "steps", "p_edge"])?;
    for r in rows {
        w.write_record([r.theta_swept_rad.to_string(), r.steps.to_string(), format_number(r.p_edge)])?;
    }
    finish(w)
}

pub fn compare_csv(series: &[(usize, f64)]) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(["step", "similarity"])?;
    for (s, v) in series {
        w.write_record([s.to_string(), format_number(*v)])?;
    }
    finish(w)
}

const CELL: usize = 20;
const LEFT: usize = 44;
const TOP: usize = 40;

/// Step-vs-position heatmap, position along x and step down the page.
/// Shades are scaled to the largest probability in the record.
pub fn render_heatmap(record: &RunRecord) -> Result<String> {
    let Some((lo, hi)) = position_range(record).filter(|_| !record.steps.is_empty()) else {
        return Err(Error::InvalidArgument("record has no steps to draw".into()));
    };
    let cols = (hi - lo) as usize;
    let rows = record.steps.len();
    let pmax = record.steps.iter().flat_map(|s| s.distribution.probs.iter().copied()).fold(0.0, f64::max);
    let scale = if pmax > 0.0 { pmax } else { 1.0 };
    let (width, height) = (LEFT + cols * CELL + 8, TOP + rows * CELL + 8);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="monospace" font-size="10">"#
    );
    let label = match record.coordinates {
        Coordinates::Bidirectional => "position x",
        Coordinates::Unidirectional => "position x (unidirectional)",
    };
    let _ = writeln!(svg, r#"<text x="{LEFT}" y="12">{label}, step t downward, max p = {}</text>"#, format_number(pmax));
    let every = cols.div_ceil(24).max(1);
    for c in (0..cols).step_by(every) {
        let x = LEFT + c * CELL + CELL / 2;
        let _ = writeln!(svg, r#"<text x="{x}" y="{}" text-anchor="middle">{}</text>"#, TOP - 6, lo + c as i64);
    }
    for (r, s) in record.steps.iter().enumerate() {
        let y = TOP + r * CELL;
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, LEFT - 6, y + 14, s.distribution.step);
        for c in 0..cols {
            let v = (s.distribution.prob(lo + c as i64) / scale).clamp(0.0, 1.0);
            let shade = |full: f64| (255.0 - v * (255.0 - full)).round() as u8;
            let _ = writeln!(
                svg,
                r##"<rect x="{}" y="{y}" width="{CELL}" height="{CELL}" fill="#{:02x}{:02x}{:02x}"/>"##,
                LEFT + c * CELL,
                shade(8.0),
                shade(48.0),
                shade(107.0)
            );
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_heatmap(record: &RunRecord, path: &Path) -> Result<()> {
    std::fs::write(path, render_heatmap(record)?)?;
    Ok(())
}

/// Renders a walk record in the requested format.
pub fn render_record(record: &RunRecord, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => walk_csv(record),
        OutputFormat::Json => record.to_json(),
        OutputFormat::SvgHeatmap => render_heatmap(record),
    }
}

pub fn render_sweep(rows: &[SweepRow], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => sweep_csv(rows),
        OutputFormat::Json => Ok(serde_json::to_string_pretty(rows)? + "\n"),
        OutputFormat::SvgHeatmap => Err(Error::config("output.format", "sweeps render as csv or json")),
    }
}
