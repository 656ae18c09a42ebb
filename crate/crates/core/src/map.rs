//! Maps of truncated presheaves: level-indexed functions commuting with
//! every generating structure map. Marking preservation is commutation with
//! the two marked-row generators, so it needs no separate clause.

use crate::error::{Error, Result};
use crate::presheaf::{same_shape_and_dim, PresheafRef};
use crate::shape::Level;
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct PresheafMap {
    pub source: PresheafRef,
    pub target: PresheafRef,
    pub components: BTreeMap<Level, Vec<usize>>,
}

impl PartialEq for PresheafMap {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components
            && (Arc::ptr_eq(&self.source, &other.source) || *self.source == *other.source)
            && (Arc::ptr_eq(&self.target, &other.target) || *self.target == *other.target)
    }
}

impl Eq for PresheafMap {}

impl PresheafMap {
    pub fn new(
        source: PresheafRef,
        target: PresheafRef,
        components: BTreeMap<Level, Vec<usize>>,
    ) -> Result<Self> {
        let m = PresheafMap { source, target, components };
        m.validate()?;
        Ok(m)
    }

    /// Build from per-level cell-name tables.
    pub fn from_names(
        source: PresheafRef,
        target: PresheafRef,
        tables: &BTreeMap<Level, BTreeMap<String, String>>,
    ) -> Result<Self> {
        let mut components = BTreeMap::new();
        for lvl in source.levels() {
            let mut comp = Vec::with_capacity(source.cell_count(lvl));
            for name in source.cells(lvl) {
                let to = tables
                    .get(&lvl)
                    .and_then(|t| t.get(name))
                    .ok_or_else(|| {
                        Error::InvalidMap(format!("no image for cell {name:?} at level {lvl}"))
                    })?;
                let idx = target.cell_index(lvl, to).ok_or_else(|| {
                    Error::InvalidMap(format!("image {to:?} not a cell of the target at {lvl}"))
                })?;
                comp.push(idx);
            }
            components.insert(lvl, comp);
        }
        PresheafMap::new(source, target, components)
    }

    pub fn identity(p: &PresheafRef) -> Self {
        let components = p
            .levels()
            .iter()
            .map(|&l| (l, (0..p.cell_count(l)).collect()))
            .collect();
        PresheafMap { source: p.clone(), target: p.clone(), components }
    }

    pub fn apply(&self, lvl: Level, cell: usize) -> usize {
        self.components[&lvl][cell]
    }

    pub fn validate(&self) -> Result<()> {
        same_shape_and_dim(&self.source, &self.target)?;
        for lvl in self.source.levels() {
            let comp = self
                .components
                .get(&lvl)
                .ok_or_else(|| Error::InvalidMap(format!("missing component at level {lvl}")))?;
            if comp.len() != self.source.cell_count(lvl) {
                return Err(Error::InvalidMap(format!("component at {lvl} has wrong length")));
            }
            let bound = self.target.cell_count(lvl);
            if comp.iter().any(|&v| v >= bound) {
                return Err(Error::InvalidMap(format!("component at {lvl} out of range")));
            }
        }
        for lvl in self.source.levels() {
            for (g, tgt_lvl) in self.source.generators(lvl) {
                for c in 0..self.source.cell_count(lvl) {
                    let via_source = self.components[&tgt_lvl][self.source.apply(lvl, g, c)];
                    let via_target = self.target.apply(lvl, g, self.components[&lvl][c]);
                    if via_source != via_target {
                        return Err(Error::InvalidMap(format!(
                            "does not commute with {:?} at level {} on {:?}",
                            g,
                            lvl,
                            self.source.cell_name(lvl, c)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `other` after `self` (for self: X -> Y, other: Y -> Z).
    pub fn then(&self, other: &PresheafMap) -> Result<PresheafMap> {
        if *self.target != *other.source {
            return Err(Error::InvalidMap("composition targets do not line up".into()));
        }
        let components = self
            .components
            .iter()
            .map(|(&l, comp)| (l, comp.iter().map(|&c| other.components[&l][c]).collect()))
            .collect();
        Ok(PresheafMap {
            source: self.source.clone(),
            target: other.target.clone(),
            components,
        })
    }

    pub fn is_injective_levelwise(&self) -> bool {
        self.components.iter().all(|(l, comp)| {
            let mut seen = vec![false; self.target.cell_count(*l)];
            comp.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
        })
    }

    pub fn is_bijective_levelwise(&self) -> bool {
        self.is_injective_levelwise()
            && self
                .components
                .iter()
                .all(|(l, comp)| comp.len() == self.target.cell_count(*l))
    }

    /// Inverse of a levelwise bijection; the inverse automatically commutes.
    pub fn inverse(&self) -> Result<PresheafMap> {
        if !self.is_bijective_levelwise() {
            return Err(Error::InvalidMap("not a levelwise bijection".into()));
        }
        let mut components = BTreeMap::new();
        for (&l, comp) in &self.components {
            let mut inv = vec![0usize; comp.len()];
            for (i, &v) in comp.iter().enumerate() {
                inv[v] = i;
            }
            components.insert(l, inv);
        }
        Ok(PresheafMap {
            source: self.target.clone(),
            target: self.source.clone(),
            components,
        })
    }

    /// Canonical serialization of the component tables, used for duplicate
    /// elimination and deterministic ordering of hom-set elements.
    pub fn canonical_key(&self) -> Vec<(Level, Vec<usize>)> {
        self.components.iter().map(|(&l, c)| (l, c.clone())).collect()
    }

    /// Cell-name rendition, for reports and JSON.
    pub fn name_tables(&self) -> BTreeMap<String, BTreeMap<String, String>> {
        let mut out = BTreeMap::new();
        for (&l, comp) in &self.components {
            let mut table = BTreeMap::new();
            for (i, &v) in comp.iter().enumerate() {
                table.insert(
                    self.source.cell_name(l, i).to_string(),
                    self.target.cell_name(l, v).to_string(),
                );
            }
            out.insert(l.json_key(), table);
        }
        out
    }
}

/// Search for a levelwise-bijective map between two presheaves; the sanctioned
/// equality test across construction routes.
pub fn find_isomorphism(a: &PresheafRef, b: &PresheafRef) -> Result<Option<PresheafMap>> {
    same_shape_and_dim(a, b)?;
    for lvl in a.levels() {
        if a.cell_count(lvl) != b.cell_count(lvl) {
            return Ok(None);
        }
    }
    let homs = crate::hom::HomSearch::new(a.clone(), b.clone())
        .bijective_only()
        .first_only()
        .run()?;
    Ok(homs.elements.into_iter().next())
}

pub fn isomorphic(a: &PresheafRef, b: &PresheafRef) -> Result<bool> {
    Ok(find_isomorphism(a, b)?.is_some())
}
