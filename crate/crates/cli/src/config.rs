//! Experiment configuration files.
//!
//! A config is a flat key=value file with `[section]` headers and
//! comma-separated arrays. Floats are rendered with `{:?}`, which
//! round-trips exactly through `str::parse`.

use std::collections::BTreeMap;
use std::str::FromStr;

use ini::Ini;
use serde::Serialize;
use singlab::discretize::PotentialKind;
use singlab::evolution::{DataSpec, GridPolicy};
use singlab::model::ProblemParams;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub scenario: String,
    /// Seed for randomized checks; the shipped scenarios are deterministic.
    pub seed: u64,
    pub model: ModelConfig,
    pub grid: GridConfig,
    pub eps: Option<EpsSpec>,
    pub times: Option<TimeSpec>,
    pub data: Option<DataSpec>,
    pub sweep: Option<SweepConfig>,
    pub spectrum: Option<SpectrumConfig>,
    pub flows: Option<FlowConfig>,
    pub roots: Option<RootsConfig>,
    pub outputs: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelConfig {
    pub dim: usize,
    pub order: usize,
    pub coupling: f64,
    pub harmonic: usize,
    pub eps: f64,
    pub potential: PotentialKind,
}

impl ModelConfig {
    pub fn params(&self) -> Result<ProblemParams, CliError> {
        Ok(ProblemParams::new(self.dim, self.order, self.coupling, self.harmonic, self.eps)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridConfig {
    pub radius: f64,
    pub nodes: Option<usize>,
    /// Step in units of eps for eps-dependent grids.
    pub scaled_step: Option<f64>,
}

impl GridConfig {
    pub fn require_nodes(&self) -> Result<usize, CliError> {
        self.nodes.ok_or_else(|| CliError::Config("grid.nodes is required for this scenario".into()))
    }

    pub fn require_scaled_step(&self) -> Result<f64, CliError> {
        self.scaled_step.ok_or_else(|| CliError::Config("grid.scaled_step is required for this scenario".into()))
    }

    pub fn policy(&self) -> Result<GridPolicy, CliError> {
        match (self.nodes, self.scaled_step) {
            (Some(nodes), None) => Ok(GridPolicy::Fixed { nodes }),
            (None, Some(scaled_step)) => Ok(GridPolicy::ScaledStep { scaled_step }),
            _ => Err(CliError::Config("set exactly one of grid.nodes and grid.scaled_step".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsSpec {
    List(Vec<f64>),
    /// `count` values from `start` to `stop`, equally spaced in ln eps.
    Geometric { start: f64, stop: f64, count: usize },
}

impl EpsSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            EpsSpec::List(v) => v.clone(),
            EpsSpec::Geometric { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                _ => {
                    let ratio = stop / start;
                    (0..*count)
                        .map(|i| start * ratio.powf(i as f64 / (*count - 1) as f64))
                        .collect()
                }
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeSpec {
    Fixed(f64),
    List(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    Divergence,
    Oscillatory,
    Stationary,
    Scaling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepConfig {
    pub mode: SweepMode,
    pub limit_radius: Option<f64>,
    pub limit_nodes: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SpectrumConfig {
    /// Number of leading eigenfunctions written as node samples.
    pub eigenfunctions: usize,
    /// Also report the top eigenvalue under n -> n/2, n -> 2n and R -> 2R.
    pub stability: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowConfig {
    /// Schrodinger norms are sampled on [0, horizon].
    pub horizon: f64,
    pub samples: usize,
    /// Window for the single-mode wave growth fit.
    pub wave_start: f64,
    pub wave_end: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootsConfig {
    pub c_start: f64,
    pub c_stop: f64,
    pub c_count: usize,
}

impl RootsConfig {
    pub fn couplings(&self) -> Vec<f64> {
        match self.c_count {
            0 => Vec::new(),
            1 => vec![self.c_start],
            n => (0..n)
                .map(|i| self.c_start + (self.c_stop - self.c_start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct OutputConfig {
    pub csv_path: Option<String>,
    pub json_path: Option<String>,
    pub svg_path: Option<String>,
}

type Sections = BTreeMap<String, BTreeMap<String, String>>;

const GENERAL: &str = "";

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

struct Section {
    name: String,
    entries: BTreeMap<String, String>,
}

impl Section {
    fn take_raw(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    fn label(&self, key: &str) -> String {
        if self.name.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.name)
        }
    }

    fn opt<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, CliError> {
        let label = self.label(key);
        self.take_raw(key)
            .map(|raw| raw.trim().parse::<T>().map_err(|_| config_err(format!("{label}: cannot parse '{raw}'"))))
            .transpose()
    }

    fn req<T: FromStr>(&mut self, key: &str) -> Result<T, CliError> {
        let label = self.label(key);
        self.opt(key)?.ok_or_else(|| config_err(format!("missing key {label}")))
    }

    fn list(&mut self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        let label = self.label(key);
        self.take_raw(key)
            .map(|raw| {
                raw.split(',')
                    .map(|item| {
                        item.trim()
                            .parse::<f64>()
                            .map_err(|_| config_err(format!("{label}: cannot parse '{}'", item.trim())))
                    })
                    .collect()
            })
            .transpose()
    }

    fn finish(self) -> Result<(), CliError> {
        match self.entries.keys().next() {
            Some(key) => Err(config_err(format!("unknown key {}", self.label(key)))),
            None => Ok(()),
        }
    }
}

fn take_section(sections: &mut Sections, name: &str) -> Option<Section> {
    sections.remove(name).map(|entries| Section { name: name.to_string(), entries })
}

fn parse_potential(raw: &str) -> Result<PotentialKind, CliError> {
    match raw {
        "singular" => Ok(PotentialKind::Singular),
        "regularized" => Ok(PotentialKind::Regularized),
        "limit" => Ok(PotentialKind::Limit),
        other => Err(config_err(format!("model.potential: unknown kind '{other}'"))),
    }
}

fn potential_name(kind: PotentialKind) -> &'static str {
    match kind {
        PotentialKind::Singular => "singular",
        PotentialKind::Regularized => "regularized",
        PotentialKind::Limit => "limit",
    }
}

fn parse_mode(raw: &str) -> Result<SweepMode, CliError> {
    match raw {
        "divergence" => Ok(SweepMode::Divergence),
        "oscillatory" => Ok(SweepMode::Oscillatory),
        "stationary" => Ok(SweepMode::Stationary),
        "scaling" => Ok(SweepMode::Scaling),
        other => Err(config_err(format!("sweep.mode: unknown mode '{other}'"))),
    }
}

fn mode_name(mode: SweepMode) -> &'static str {
    match mode {
        SweepMode::Divergence => "divergence",
        SweepMode::Oscillatory => "oscillatory",
        SweepMode::Stationary => "stationary",
        SweepMode::Scaling => "scaling",
    }
}

fn parse_data(section: &mut Section) -> Result<DataSpec, CliError> {
    let kind: String = section.req("kind")?;
    match kind.as_str() {
        "constant" => Ok(DataSpec::Constant { delta0: section.req("delta0")? }),
        "oscillatory" => Ok(DataSpec::Oscillatory { frequency: section.req("frequency")? }),
        "stationary_derivative" => Ok(DataSpec::StationaryDerivative { coupling: section.req("coupling")? }),
        "mode" => Ok(DataSpec::Mode { index: section.req("index")? }),
        other => Err(config_err(format!("data.kind: unknown kind '{other}'"))),
    }
}

fn read_sections(text: &str) -> Result<Sections, CliError> {
    let ini = Ini::load_from_str(text).map_err(|e| config_err(e.to_string()))?;
    let mut sections = Sections::new();
    for (name, props) in ini.iter() {
        let name = name.unwrap_or(GENERAL).to_string();
        let entries = sections.entry(name.clone()).or_default();
        for (key, value) in props.iter() {
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(config_err(format!("duplicate key {key} in section [{name}]")));
            }
        }
    }
    Ok(sections)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut sections = read_sections(text)?;

        let mut general = take_section(&mut sections, GENERAL)
            .unwrap_or_else(|| Section { name: String::new(), entries: BTreeMap::new() });
        let scenario: String = general.req("scenario")?;
        let seed = general.opt("seed")?.unwrap_or(0);
        general.finish()?;

        let mut m = take_section(&mut sections, "model").ok_or_else(|| config_err("missing section [model]"))?;
        let model = ModelConfig {
            dim: m.req("dim")?,
            order: m.req("order")?,
            coupling: m.req("coupling")?,
            harmonic: m.opt("harmonic")?.unwrap_or(0),
            eps: m.opt("eps")?.unwrap_or(0.0),
            potential: m.take_raw("potential").map(|p| parse_potential(p.trim())).transpose()?.unwrap_or(PotentialKind::Limit),
        };
        m.finish()?;

        let mut g = take_section(&mut sections, "grid").ok_or_else(|| config_err("missing section [grid]"))?;
        let grid = GridConfig { radius: g.req("radius")?, nodes: g.opt("nodes")?, scaled_step: g.opt("scaled_step")? };
        g.finish()?;

        let eps = match take_section(&mut sections, "eps") {
            None => None,
            Some(mut s) => {
                let spec = match s.list("list")? {
                    Some(list) => EpsSpec::List(list),
                    None => EpsSpec::Geometric { start: s.req("start")?, stop: s.req("stop")?, count: s.req("count")? },
                };
                s.finish()?;
                Some(spec)
            }
        };

        let times = match take_section(&mut sections, "times") {
            None => None,
            Some(mut s) => {
                let spec = match (s.opt::<f64>("t_fixed")?, s.list("list")?) {
                    (Some(t), None) => TimeSpec::Fixed(t),
                    (None, Some(list)) => TimeSpec::List(list),
                    _ => return Err(config_err("[times] needs exactly one of t_fixed and list")),
                };
                s.finish()?;
                Some(spec)
            }
        };

        let data = match take_section(&mut sections, "data") {
            None => None,
            Some(mut s) => {
                let spec = parse_data(&mut s)?;
                s.finish()?;
                Some(spec)
            }
        };

        let sweep = match take_section(&mut sections, "sweep") {
            None => None,
            Some(mut s) => {
                let mode: String = s.req("mode")?;
                let cfg = SweepConfig {
                    mode: parse_mode(&mode)?,
                    limit_radius: s.opt("limit_radius")?,
                    limit_nodes: s.opt("limit_nodes")?,
                };
                s.finish()?;
                Some(cfg)
            }
        };

        let spectrum = match take_section(&mut sections, "spectrum") {
            None => None,
            Some(mut s) => {
                let cfg = SpectrumConfig {
                    eigenfunctions: s.opt("eigenfunctions")?.unwrap_or(0),
                    stability: s.opt("stability")?.unwrap_or(false),
                };
                s.finish()?;
                Some(cfg)
            }
        };

        let flows = match take_section(&mut sections, "flows") {
            None => None,
            Some(mut s) => {
                let cfg = FlowConfig {
                    horizon: s.req("horizon")?,
                    samples: s.req("samples")?,
                    wave_start: s.req("wave_start")?,
                    wave_end: s.req("wave_end")?,
                };
                s.finish()?;
                Some(cfg)
            }
        };

        let roots = match take_section(&mut sections, "roots") {
            None => None,
            Some(mut s) => {
                let cfg = RootsConfig { c_start: s.req("c_start")?, c_stop: s.req("c_stop")?, c_count: s.req("c_count")? };
                s.finish()?;
                Some(cfg)
            }
        };

        let outputs = match take_section(&mut sections, "outputs") {
            None => OutputConfig::default(),
            Some(mut s) => {
                let cfg = OutputConfig {
                    csv_path: s.take_raw("csv_path"),
                    json_path: s.take_raw("json_path"),
                    svg_path: s.take_raw("svg_path"),
                };
                s.finish()?;
                cfg
            }
        };

        if let Some(name) = sections.keys().next() {
            return Err(config_err(format!("unknown section [{name}]")));
        }

        Ok(Self { scenario, seed, model, grid, eps, times, data, sweep, spectrum, flows, roots, outputs })
    }

    /// Canonical text form; `parse(render(c)) == c`.
    pub fn render(&self) -> String {
        let mut out = format!("scenario = {}\nseed = {}\n", self.scenario, self.seed);

        let mut sections: Vec<(&str, Vec<(&str, String)>)> = Vec::new();
        let m = &self.model;
        sections.push((
            "model",
            vec![
                ("dim", m.dim.to_string()),
                ("order", m.order.to_string()),
                ("coupling", float(m.coupling)),
                ("harmonic", m.harmonic.to_string()),
                ("eps", float(m.eps)),
                ("potential", potential_name(m.potential).to_string()),
            ],
        ));
        let mut grid = vec![("radius", float(self.grid.radius))];
        if let Some(n) = self.grid.nodes {
            grid.push(("nodes", n.to_string()));
        }
        if let Some(s) = self.grid.scaled_step {
            grid.push(("scaled_step", float(s)));
        }
        sections.push(("grid", grid));
        match &self.eps {
            Some(EpsSpec::List(list)) => sections.push(("eps", vec![("list", floats(list))])),
            Some(EpsSpec::Geometric { start, stop, count }) => sections.push((
                "eps",
                vec![("start", float(*start)), ("stop", float(*stop)), ("count", count.to_string())],
            )),
            None => {}
        }
        match &self.times {
            Some(TimeSpec::Fixed(t)) => sections.push(("times", vec![("t_fixed", float(*t))])),
            Some(TimeSpec::List(list)) => sections.push(("times", vec![("list", floats(list))])),
            None => {}
        }
        if let Some(data) = &self.data {
            let entries = match *data {
                DataSpec::Constant { delta0 } => vec![("kind", "constant".into()), ("delta0", float(delta0))],
                DataSpec::Oscillatory { frequency } => {
                    vec![("kind", "oscillatory".into()), ("frequency", float(frequency))]
                }
                DataSpec::StationaryDerivative { coupling } => {
                    vec![("kind", "stationary_derivative".into()), ("coupling", float(coupling))]
                }
                DataSpec::Mode { index } => vec![("kind", "mode".into()), ("index", index.to_string())],
            };
            sections.push(("data", entries));
        }
        if let Some(s) = &self.sweep {
            let mut entries = vec![("mode", mode_name(s.mode).to_string())];
            if let Some(r) = s.limit_radius {
                entries.push(("limit_radius", float(r)));
            }
            if let Some(n) = s.limit_nodes {
                entries.push(("limit_nodes", n.to_string()));
            }
            sections.push(("sweep", entries));
        }
        if let Some(s) = &self.spectrum {
            sections.push((
                "spectrum",
                vec![("eigenfunctions", s.eigenfunctions.to_string()), ("stability", s.stability.to_string())],
            ));
        }
        if let Some(f) = &self.flows {
            sections.push((
                "flows",
                vec![
                    ("horizon", float(f.horizon)),
                    ("samples", f.samples.to_string()),
                    ("wave_start", float(f.wave_start)),
                    ("wave_end", float(f.wave_end)),
                ],
            ));
        }
        if let Some(r) = &self.roots {
            sections.push((
                "roots",
                vec![("c_start", float(r.c_start)), ("c_stop", float(r.c_stop)), ("c_count", r.c_count.to_string())],
            ));
        }
        let o = &self.outputs;
        let outputs: Vec<(&str, String)> = [("csv_path", &o.csv_path), ("json_path", &o.json_path), ("svg_path", &o.svg_path)]
            .into_iter()
            .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
            .collect();
        if !outputs.is_empty() {
            sections.push(("outputs", outputs));
        }

        for (name, entries) in sections {
            out.push_str(&format!("\n[{name}]\n"));
            for (key, value) in entries {
                out.push_str(&format!("{key} = {value}\n"));
            }
        }
        out
    }

    pub fn eps_values(&self) -> Result<Vec<f64>, CliError> {
        self.eps
            .as_ref()
            .map(EpsSpec::values)
            .ok_or_else(|| config_err("section [eps] is required for this scenario"))
    }

    pub fn fixed_time(&self) -> Result<f64, CliError> {
        match &self.times {
            Some(TimeSpec::Fixed(t)) => Ok(*t),
            _ => Err(config_err("times.t_fixed is required for this scenario")),
        }
    }
}

fn float(x: f64) -> String {
    format!("{x:?}")
}

fn floats(xs: &[f64]) -> String {
    xs.iter().map(|x| float(*x)).collect::<Vec<_>>().join(", ")
}
