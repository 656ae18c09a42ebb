//! Flat/sharp/forget between plain and marked shapes, explicit markings, and
//! marked hom sets. Markings live on a single extra row, so these functors
//! are row surgery plus the degenerate-marking bookkeeping.

use crate::error::{Error, Result};
use crate::hom::{enumerate_hom, HomSet};
use crate::presheaf::{PresheafBuilder, PresheafRef};
use crate::shape::{generators_from, levels, Generator, IndexShape, Level, MainLevel};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MarkingPolicy {
    /// Exactly the degenerate edges.
    Flat,
    /// Every edge.
    Sharp,
    /// Cartesian edges of a fibration; computed elsewhere.
    Natural,
    /// A caller-supplied edge set; must contain all degenerate edges.
    Explicit(Vec<String>),
}

fn marked_shape_of(shape: IndexShape) -> Result<IndexShape> {
    match shape {
        IndexShape::Simplex => Ok(IndexShape::MarkedSimplex),
        IndexShape::BiSimplex => Ok(IndexShape::MarkedBiSimplex),
        s => Err(Error::ShapeMismatch(s.json_name().into(), "unmarked shape".into())),
    }
}

fn unmarked_shape_of(shape: IndexShape) -> Result<IndexShape> {
    match shape {
        IndexShape::MarkedSimplex => Ok(IndexShape::Simplex),
        IndexShape::MarkedBiSimplex => Ok(IndexShape::BiSimplex),
        s => Err(Error::ShapeMismatch(s.json_name().into(), "marked shape".into())),
    }
}

/// Attach markings to an unmarked presheaf. `policy` decides the edge set;
/// explicit lists are per-edge names (shared across all second coordinates
/// for bisimplicial inputs, which suits the constant-base uses; use
/// `with_markings_at` for row control).
pub fn mark(s: &PresheafRef, policy: &MarkingPolicy) -> Result<PresheafRef> {
    let chosen: Vec<Vec<String>> = match policy {
        MarkingPolicy::Flat => second_range(s)
            .into_iter()
            .map(|sec| {
                let lvl = Level { main: MainLevel::Ord(1), second: sec };
                s.cells(lvl)
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| is_main_degenerate(s, lvl, *i))
                    .map(|(_, n)| n.clone())
                    .collect()
            })
            .collect(),
        MarkingPolicy::Sharp => second_range(s)
            .into_iter()
            .map(|sec| {
                let lvl = Level { main: MainLevel::Ord(1), second: sec };
                s.cells(lvl).to_vec()
            })
            .collect(),
        MarkingPolicy::Explicit(names) => second_range(s)
            .into_iter()
            .map(|_| names.clone())
            .collect(),
        MarkingPolicy::Natural => {
            return Err(Error::Precondition(
                "natural markings come from a Cartesian fibration checker".into(),
            ))
        }
    };
    with_markings_at(s, &chosen)
}

/// Degenerate in the main direction (for bisimplicial level-(1,l) cells the
/// flat marking wants main-degenerates, not second-direction ones).
fn is_main_degenerate(s: &PresheafRef, lvl: Level, cell: usize) -> bool {
    let v_lvl = Level { main: MainLevel::Ord(0), second: lvl.second };
    (0..s.cell_count(v_lvl)).any(|v| s.apply(v_lvl, Generator::DegenMain(0), v) == cell)
}

fn second_range(s: &PresheafRef) -> Vec<Option<u8>> {
    match s.dim().second {
        None => vec![None],
        Some(b) => (0..=b).map(Some).collect(),
    }
}

/// Attach a marking on a simplicial object, one shared list of edge names.
pub fn with_markings(s: &PresheafRef, names: &[String]) -> Result<PresheafRef> {
    with_markings_at(s, &[names.to_vec()])
}

/// Attach markings with one list per second coordinate.
pub fn with_markings_at(s: &PresheafRef, names: &[Vec<String>]) -> Result<PresheafRef> {
    let shape = marked_shape_of(s.shape())?;
    if s.dim().main < 1 {
        return Err(Error::Precondition("markings need bound >= 1".into()));
    }
    let seconds = second_range(s);
    if names.len() != seconds.len() {
        return Err(Error::Precondition("one marking list per second coordinate".into()));
    }
    let mut b = PresheafBuilder::new(shape, s.dim());
    // copy the underlying object
    for lvl in s.levels() {
        for name in s.cells(lvl) {
            b.cell(lvl, name.clone());
        }
        for (g, tgt) in s.generators(lvl) {
            for (ci, name) in s.cells(lvl).iter().enumerate() {
                b.map(lvl, g, name.clone(), s.cell_name(tgt, s.apply(lvl, g, ci)).to_string());
            }
        }
    }
    for (list, sec) in names.iter().zip(&seconds) {
        let edge_lvl = Level { main: MainLevel::Ord(1), second: *sec };
        let vertex_lvl = Level { main: MainLevel::Ord(0), second: *sec };
        let marked_lvl = Level { main: MainLevel::Marked, second: *sec };
        let mut sorted: Vec<String> = list.clone();
        sorted.sort();
        sorted.dedup();
        // degenerate edges must be marked
        for v in 0..s.cell_count(vertex_lvl) {
            let e = s.apply(vertex_lvl, Generator::DegenMain(0), v);
            let en = s.cell_name(edge_lvl, e);
            if sorted.binary_search_by(|x| x.as_str().cmp(en)).is_err() {
                return Err(Error::Precondition(format!(
                    "marking misses the degenerate edge {en}"
                )));
            }
        }
        for name in &sorted {
            if s.cell_index(edge_lvl, name).is_none() {
                return Err(Error::Precondition(format!("marking {name} is not an edge")));
            }
            b.cell(marked_lvl, name.clone());
            b.map(marked_lvl, Generator::MarkToEdge, name.clone(), name.clone());
        }
        for v in 0..s.cell_count(vertex_lvl) {
            let e = s.apply(vertex_lvl, Generator::DegenMain(0), v);
            b.map(
                vertex_lvl,
                Generator::VertexToMark,
                s.cell_name(vertex_lvl, v).to_string(),
                s.cell_name(edge_lvl, e).to_string(),
            );
        }
        // second-direction structure on the marked row: inherited from edges,
        // well-defined because markings are stored by edge name
        if let Some(l) = sec {
            for name in &sorted {
                let e = s.cell_index(edge_lvl, name).unwrap();
                for i in 0..=*l {
                    if *l >= 1 {
                        let img = s.apply(edge_lvl, Generator::FaceSecond(i), e);
                        b.map(
                            marked_lvl,
                            Generator::FaceSecond(i),
                            name.clone(),
                            s.cell_name(Level { main: MainLevel::Ord(1), second: Some(l - 1) }, img)
                                .to_string(),
                        );
                    }
                    if l + 1 <= s.dim().second.unwrap() {
                        let img = s.apply(edge_lvl, Generator::DegenSecond(i), e);
                        b.map(
                            marked_lvl,
                            Generator::DegenSecond(i),
                            name.clone(),
                            s.cell_name(Level { main: MainLevel::Ord(1), second: Some(l + 1) }, img)
                                .to_string(),
                        );
                    }
                }
            }
        }
    }
    if let Some(c) = s.cosk_certificate() {
        b.certificate(c.max(1));
    }
    Ok(Arc::new(b.build()?))
}

/// Minimal marking: only degenerate edges.
pub fn flat(s: &PresheafRef) -> Result<PresheafRef> {
    mark(s, &MarkingPolicy::Flat)
}

/// Maximal marking: every edge.
pub fn sharp(s: &PresheafRef) -> Result<PresheafRef> {
    mark(s, &MarkingPolicy::Sharp)
}

/// Drop the marked rows.
pub fn forget(m: &PresheafRef) -> Result<PresheafRef> {
    let shape = unmarked_shape_of(m.shape())?;
    let mut b = PresheafBuilder::new(shape, m.dim());
    for lvl in levels(shape, m.dim()) {
        for name in m.cells(lvl) {
            b.cell(lvl, name.clone());
        }
        for (g, tgt) in generators_from(shape, m.dim(), lvl) {
            for (ci, name) in m.cells(lvl).iter().enumerate() {
                b.map(lvl, g, name.clone(), m.cell_name(tgt, m.apply(lvl, g, ci)).to_string());
            }
        }
    }
    if let Some(c) = m.cosk_certificate() {
        b.certificate(c);
    }
    Ok(Arc::new(b.build()?))
}

/// Marked edge names of a separated marked object (at the given second
/// coordinate for bisimplicial shapes).
pub fn marking_names(m: &PresheafRef, second: Option<u8>) -> Vec<String> {
    let edge_lvl = Level { main: MainLevel::Ord(1), second };
    m.marking_edge_set(second)
        .into_iter()
        .map(|e| m.cell_name(edge_lvl, e).to_string())
        .collect()
}

/// Maps of marked presheaves; marking preservation is part of validity, so
/// this is a thin wrapper over the generic enumeration.
pub fn marked_hom(m1: &PresheafRef, m2: &PresheafRef) -> Result<HomSet> {
    if !m1.shape().is_marked() || !m2.shape().is_marked() {
        return Err(Error::ShapeMismatch(
            m1.shape().json_name().into(),
            m2.shape().json_name().into(),
        ));
    }
    enumerate_hom(m1, m2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::Dim;
    use crate::standard::{build_ref, StandardObjectSpec as Spec};

    #[test]
    fn forget_after_flat_and_sharp_is_identity() {
        let d2 = build_ref(&Spec::Simplex(2), Dim::simplicial(2)).unwrap();
        assert_eq!(*forget(&flat(&d2).unwrap()).unwrap(), *d2);
        assert_eq!(*forget(&sharp(&d2).unwrap()).unwrap(), *d2);
    }

    #[test]
    fn sharp_marks_every_edge() {
        let d1 = build_ref(&Spec::Simplex(1), Dim::simplicial(1)).unwrap();
        let s = sharp(&d1).unwrap();
        assert_eq!(s.cell_count(Level::marked()), 3);
        let f = flat(&d1).unwrap();
        assert_eq!(f.cell_count(Level::marked()), 2);
    }

    #[test]
    fn explicit_markings_must_contain_degenerates() {
        let d1 = build_ref(&Spec::Simplex(1), Dim::simplicial(1)).unwrap();
        let err = mark(&d1, &MarkingPolicy::Explicit(vec!["01".into()]));
        assert!(err.is_err());
    }
}
