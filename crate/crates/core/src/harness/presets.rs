//! Built-in scenario documents, one per figure-style family of curves.

use crate::error::{Error, Result};
use crate::harness::config_file::{apply_overrides, parse_config, parse_document, SweepSpec};

const PRESETS: &[(&str, &str)] = &[
    ("fig2", include_str!("../../presets/fig2.toml")),
    ("fig3", include_str!("../../presets/fig3.toml")),
    ("fig4a", include_str!("../../presets/fig4a.toml")),
    ("fig4b", include_str!("../../presets/fig4b.toml")),
    ("fig5", include_str!("../../presets/fig5.toml")),
    ("fig6a", include_str!("../../presets/fig6a.toml")),
    ("fig6b", include_str!("../../presets/fig6b.toml")),
    ("fig6c", include_str!("../../presets/fig6c.toml")),
    ("fig7a", include_str!("../../presets/fig7a.toml")),
    ("fig7b", include_str!("../../presets/fig7b.toml")),
    ("fig8a", include_str!("../../presets/fig8a.toml")),
    ("fig8b", include_str!("../../presets/fig8b.toml")),
    ("swap-loss", include_str!("../../presets/swap-loss.toml")),
];

/// A named, embedded scenario document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Preset {
    pub name: &'static str,
    pub text: &'static str,
}

impl Preset {
    pub fn description(&self) -> String {
        parse_document(self.text)
            .ok()
            .and_then(|doc| doc.description)
            .unwrap_or_default()
    }
}

/// Every preset, in a fixed order.
pub fn list_presets() -> Vec<Preset> {
    PRESETS
        .iter()
        .map(|&(name, text)| Preset { name, text })
        .collect()
}

pub fn find_preset(name: &str) -> Result<Preset> {
    list_presets()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownPreset {
            name: name.to_string(),
            available: PRESETS
                .iter()
                .map(|(n, _)| *n)
                .collect::<Vec<_>>()
                .join(", "),
        })
}

/// Loads a preset with `section.key=value` overrides applied.
pub fn load_preset(name: &str, overrides: &[String]) -> Result<SweepSpec> {
    let preset = find_preset(name)?;
    if overrides.is_empty() {
        parse_config(preset.text)
    } else {
        parse_config(&apply_overrides(preset.text, overrides)?)
    }
}
