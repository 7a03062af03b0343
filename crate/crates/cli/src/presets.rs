//! Scenario presets shipped with the binary.

use crate::config::ExperimentConfig;
use crate::CliError;

pub const PRESETS: &[(&str, &str)] = &[
    ("bg-limit-m1", include_str!("../presets/bg-limit-m1.ini")),
    ("bg-limit-subcritical", include_str!("../presets/bg-limit-subcritical.ini")),
    ("mode-shift-k0", include_str!("../presets/mode-shift-k0.ini")),
    ("mode-shift-k1", include_str!("../presets/mode-shift-k1.ini")),
    ("laplacian-baseline", include_str!("../presets/laplacian-baseline.ini")),
    ("scaling-m1", include_str!("../presets/scaling-m1.ini")),
    ("bg-divergence", include_str!("../presets/bg-divergence.ini")),
    ("bg-subcritical", include_str!("../presets/bg-subcritical.ini")),
    ("oscillatory-m1", include_str!("../presets/oscillatory-m1.ini")),
    ("stationary-m2", include_str!("../presets/stationary-m2.ini")),
    ("flows", include_str!("../presets/flows.ini")),
    ("oracle-64", include_str!("../presets/oracle-64.ini")),
    ("roots-m1", include_str!("../presets/roots-m1.ini")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(name, _)| *name)
}

pub fn text(name: &str) -> Result<&'static str, CliError> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| CliError::UnknownPreset(name.to_string()))
}

pub fn load(name: &str) -> Result<ExperimentConfig, CliError> {
    ExperimentConfig::parse(text(name)?)
}
