//! Structural and size statistics per work profile.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::CatalogSet;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileStats {
    pub profile: String,
    /// Distinct source catalogs.
    pub catalogs: usize,
    pub tables: usize,
    /// Distinct property names over the profile's table columns.
    pub property_names: usize,
    /// Distinct property names measured in millimetres.
    pub mm_properties: usize,
    /// Millimetre properties named only by a designation, without a
    /// word of Cyrillic text.
    pub unnamed_mm_properties: usize,
    pub rows_total: usize,
    pub rows_min: usize,
    pub rows_max: usize,
}

fn is_unnamed(name: &str) -> bool {
    !name.chars().any(|c| matches!(c, 'А'..='я' | 'Ё' | 'ё'))
}

/// One entry per profile, in registry order. `profiles` may name profiles
/// with no tables; they come out as zeros.
pub fn catalog_stats(set: &CatalogSet, extra_profiles: &[&str]) -> Vec<ProfileStats> {
    let mut profiles = set.profiles();
    for p in extra_profiles {
        if !profiles.contains(p) {
            profiles.push(p);
        }
    }
    profiles
        .into_iter()
        .map(|p| {
            let entries: Vec<_> = set.registry().iter().filter(|e| e.profile == p).collect();
            let sources: BTreeSet<&str> = entries.iter().map(|e| e.source.as_str()).collect();
            let mut names = BTreeSet::new();
            let mut mm = BTreeSet::new();
            let mut sizes = Vec::new();
            for e in &entries {
                for c in &set.structures[&e.structure].columns {
                    names.insert(c.name.as_str());
                    if c.units == "мм" {
                        mm.insert(c.name.as_str());
                    }
                }
                sizes.push(set.tables[&e.table].rows.len());
            }
            ProfileStats {
                profile: p.to_string(),
                catalogs: sources.len(),
                tables: entries.len(),
                property_names: names.len(),
                mm_properties: mm.len(),
                unnamed_mm_properties: mm.iter().filter(|n| is_unnamed(n)).count(),
                rows_total: sizes.iter().sum(),
                rows_min: sizes.iter().copied().min().unwrap_or(0),
                rows_max: sizes.iter().copied().max().unwrap_or(0),
            }
        })
        .collect()
}
