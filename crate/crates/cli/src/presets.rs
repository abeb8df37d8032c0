//! Built-in configurations for the reference scenarios.

use crate::config::ConfigFile;

pub const NAMES: [&str; 4] = [
    "paper-fig2-eps1",
    "paper-fig2-eps2",
    "paper-fig2-eps3",
    "paper-fig5-7",
];

fn scenario(eps: f64) -> ConfigFile {
    ConfigFile {
        eps_re: eps,
        eps_im: 0.0,
        tau_scan_lo: Some(0.0),
        tau_scan_hi: Some(12.0),
        tau_scan_step: Some(0.05),
        ..ConfigFile::default()
    }
}

/// Configuration of a named preset.
pub fn preset(name: &str) -> Option<ConfigFile> {
    match name {
        "paper-fig2-eps1" => Some(scenario(1.0)),
        "paper-fig2-eps2" => Some(scenario(2.0)),
        "paper-fig2-eps3" => Some(scenario(3.0)),
        // photon distribution and Q function after the full run; flip the
        // sign of eps_re for the mirrored field
        "paper-fig5-7" => Some(ConfigFile {
            snapshots: vec![100],
            ..scenario(1.0)
        }),
        _ => None,
    }
}

/// Commented, complete config file text for a preset.
pub fn render(name: &str) -> Option<String> {
    preset(name).map(|cfg| format!("# preset: {name}\n{}", cfg.to_text()))
}
