//! Problem files shipped with the crate, addressable as `catalog:<name>`.

use std::path::Path;

use super::file::ProblemFile;
use crate::{Error, Result};

pub const CATALOG: &[(&str, &str)] = &[
    ("alsina_ger", include_str!("../../catalog/alsina_ger.json")),
    (
        "jung_brzdek",
        include_str!("../../catalog/jung_brzdek.json"),
    ),
    (
        "decay_delay",
        include_str!("../../catalog/decay_delay.json"),
    ),
    ("pantograph", include_str!("../../catalog/pantograph.json")),
    (
        "harmonic_order2",
        include_str!("../../catalog/harmonic_order2.json"),
    ),
    (
        "twobody_fixed_delay",
        include_str!("../../catalog/twobody_fixed_delay.json"),
    ),
];

pub const CATALOG_PREFIX: &str = "catalog:";

pub fn catalog_names() -> impl Iterator<Item = &'static str> {
    CATALOG.iter().map(|(name, _)| *name)
}

pub fn catalog_source(name: &str) -> Option<&'static str> {
    CATALOG
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| *src)
}

pub fn catalog_problem(name: &str) -> Result<ProblemFile> {
    let src = catalog_source(name).ok_or_else(|| {
        Error::Usage(format!(
            "unknown catalog entry `{name}`; available: {}",
            catalog_names().collect::<Vec<_>>().join(", ")
        ))
    })?;
    ProblemFile::from_json(src)
}

/// Reads `catalog:<name>` from the built-in catalog and anything else from the filesystem.
pub fn read_problem(spec: &str) -> Result<ProblemFile> {
    match spec.strip_prefix(CATALOG_PREFIX) {
        Some(name) => catalog_problem(name),
        None => {
            let src = std::fs::read_to_string(Path::new(spec))
                .map_err(|e| Error::Usage(format!("cannot read problem file `{spec}`: {e}")))?;
            ProblemFile::from_json(&src)
        }
    }
}
