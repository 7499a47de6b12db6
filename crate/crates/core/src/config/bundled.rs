use std::path::Path;

use super::{parse_config, ConfigError, WeightConfig};

const BUNDLED: &[(&str, &str)] = &[
    ("g2_a2", include_str!("../../configs/g2_a2.cfg")),
    ("f4_a1x4", include_str!("../../configs/f4_a1x4.cfg")),
    ("f4_a2a2", include_str!("../../configs/f4_a2a2.cfg")),
    ("e6_a5a1", include_str!("../../configs/e6_a5a1.cfg")),
    ("e6_a2a2a2", include_str!("../../configs/e6_a2a2a2.cfg")),
    ("e7_a7", include_str!("../../configs/e7_a7.cfg")),
    ("g2_a2_adjoint", include_str!("../../configs/g2_a2_adjoint.cfg")),
    ("f4_a1x4_adjoint", include_str!("../../configs/f4_a1x4_adjoint.cfg")),
    ("f4_a2a2_adjoint", include_str!("../../configs/f4_a2a2_adjoint.cfg")),
];

pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

pub fn bundled_text(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Loads a bundled configuration by name, or else reads `name` as a file path.
pub fn load_config(name: &str) -> Result<WeightConfig, ConfigError> {
    if let Some(text) = bundled_text(name) {
        return parse_config(text);
    }
    let path = Path::new(name);
    let text = std::fs::read_to_string(path).map_err(|_| ConfigError::NotFound(name.to_string()))?;
    parse_config(&text)
}
