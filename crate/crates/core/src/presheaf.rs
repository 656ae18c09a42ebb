//! Finite truncated presheaves over the four index shapes.
//!
//! A presheaf stores, per index level within the truncation bound, a sorted
//! list of named cells and the action of every generating structure map out
//! of that level. All operations treat values as immutable; constructors
//! validate the generator relations so that downstream code can rely on
//! functoriality without re-checking.

use crate::delta::OrdMap;
use crate::error::{Error, Result};
use crate::report::{CheckReport, Exactness, Verdict, Witness};
use crate::shape::{generator_target, generators_from, levels, Dim, Generator, IndexShape, Level, MainLevel};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

impl PartialOrd for Level {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Level {
    fn cmp(&self, other: &Self) -> Ordering {
        self.height().cmp(&other.height())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelData {
    names: Vec<String>,
    maps: BTreeMap<Generator, Vec<usize>>,
    /// Degeneracy witness: `Some((lower level, generator, lower cell))` when
    /// this cell is the image of a degeneracy-like generator.
    parent: Vec<Option<(Level, Generator, usize)>>,
}

impl LevelData {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedPresheaf {
    shape: IndexShape,
    dim: Dim,
    levels: BTreeMap<Level, LevelData>,
    cosk: Option<u8>,
}

/// Mutable construction buffer; `build` validates and canonicalizes.
pub struct PresheafBuilder {
    shape: IndexShape,
    dim: Dim,
    cells: BTreeMap<Level, Vec<String>>,
    maps: BTreeMap<(Level, Generator), BTreeMap<String, String>>,
    cosk: Option<u8>,
}

impl PresheafBuilder {
    pub fn new(shape: IndexShape, dim: Dim) -> Self {
        if shape.is_bi() {
            assert!(dim.second.is_some(), "bisimplicial shapes need a second bound");
        } else {
            assert!(dim.second.is_none(), "simplicial shapes have one bound");
        }
        let mut cells = BTreeMap::new();
        for lvl in levels(shape, dim) {
            cells.insert(lvl, Vec::new());
        }
        PresheafBuilder { shape, dim, cells, maps: BTreeMap::new(), cosk: None }
    }

    pub fn cell(&mut self, level: Level, name: impl Into<String>) -> &mut Self {
        self.cells.entry(level).or_default().push(name.into());
        self
    }

    pub fn map(
        &mut self,
        level: Level,
        g: Generator,
        from: impl Into<String>,
        to: impl Into<String>,
    ) -> &mut Self {
        self.maps
            .entry((level, g))
            .or_default()
            .insert(from.into(), to.into());
        self
    }

    pub fn certificate(&mut self, c: u8) -> &mut Self {
        self.cosk = Some(c);
        self
    }

    pub fn build(self) -> Result<TruncatedPresheaf> {
        let all_levels = levels(self.shape, self.dim);
        let mut data: BTreeMap<Level, LevelData> = BTreeMap::new();
        for lvl in &all_levels {
            let mut names = self.cells.get(lvl).cloned().unwrap_or_default();
            names.sort();
            for w in names.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::InvalidPresheaf(format!(
                        "duplicate cell name {:?} at level {}",
                        w[0], lvl
                    )));
                }
            }
            data.insert(
                *lvl,
                LevelData { names, maps: BTreeMap::new(), parent: Vec::new() },
            );
        }
        // resolve generator actions by name
        for lvl in &all_levels {
            let n_cells = data[lvl].len();
            for (g, target) in generators_from(self.shape, self.dim, *lvl) {
                let table = self.maps.get(&(*lvl, g));
                let mut action = Vec::with_capacity(n_cells);
                for idx in 0..n_cells {
                    let name = data[lvl].names[idx].clone();
                    let to_name = table.and_then(|t| t.get(&name)).ok_or_else(|| {
                        Error::InvalidPresheaf(format!(
                            "missing action of {:?} on cell {:?} at level {}",
                            g, name, lvl
                        ))
                    })?;
                    let to_idx = data[&target].index_of(to_name).ok_or_else(|| {
                        Error::InvalidPresheaf(format!(
                            "action of {:?} at level {} sends {:?} to unknown cell {:?}",
                            g, lvl, name, to_name
                        ))
                    })?;
                    action.push(to_idx);
                }
                data.get_mut(lvl).unwrap().maps.insert(g, action);
            }
        }
        let mut p = TruncatedPresheaf { shape: self.shape, dim: self.dim, levels: data, cosk: None };
        p.validate()?;
        p.compute_parents();
        if let Some(c) = self.cosk {
            p = p.with_certificate(c)?;
        }
        Ok(p)
    }
}

impl TruncatedPresheaf {
    pub fn shape(&self) -> IndexShape {
        self.shape
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn cosk_certificate(&self) -> Option<u8> {
        self.cosk
    }

    pub fn levels(&self) -> Vec<Level> {
        self.levels.keys().copied().collect()
    }

    pub fn level(&self, lvl: Level) -> &LevelData {
        &self.levels[&lvl]
    }

    pub fn has_level(&self, lvl: Level) -> bool {
        self.levels.contains_key(&lvl)
    }

    pub fn cells(&self, lvl: Level) -> &[String] {
        &self.levels[&lvl].names
    }

    pub fn cell_count(&self, lvl: Level) -> usize {
        self.levels[&lvl].len()
    }

    pub fn cell_name(&self, lvl: Level, idx: usize) -> &str {
        &self.levels[&lvl].names[idx]
    }

    pub fn cell_index(&self, lvl: Level, name: &str) -> Option<usize> {
        self.levels[&lvl].index_of(name)
    }

    /// Action of a generator on a cell.
    pub fn apply(&self, lvl: Level, g: Generator, cell: usize) -> usize {
        self.levels[&lvl].maps[&g][cell]
    }

    pub fn generator_action(&self, lvl: Level, g: Generator) -> Option<&[usize]> {
        self.levels[&lvl].maps.get(&g).map(|v| v.as_slice())
    }

    pub fn generators(&self, lvl: Level) -> Vec<(Generator, Level)> {
        generators_from(self.shape, self.dim, lvl)
    }

    /// Total number of cells across all levels.
    pub fn total_cells(&self) -> usize {
        self.levels.values().map(|d| d.len()).sum()
    }

    pub fn is_nondegenerate(&self, lvl: Level, cell: usize) -> bool {
        self.levels[&lvl].parent[cell].is_none()
    }

    pub fn degeneracy_parent(&self, lvl: Level, cell: usize) -> Option<(Level, Generator, usize)> {
        self.levels[&lvl].parent[cell]
    }

    pub fn nondegenerate_count(&self, lvl: Level) -> usize {
        self.levels[&lvl].parent.iter().filter(|p| p.is_none()).count()
    }

    /// Highest total dimension carrying a nondegenerate cell.
    pub fn skeletal_height(&self) -> u16 {
        self.levels
            .iter()
            .filter(|(_, d)| d.parent.iter().any(|p| p.is_none()) )
            .map(|(l, _)| l.height().0)
            .max()
            .unwrap_or(0)
    }

    fn compute_parents(&mut self) {
        let lvls: Vec<Level> = self.levels.keys().copied().collect();
        for lvl in &lvls {
            let n = self.levels[lvl].len();
            self.levels.get_mut(lvl).unwrap().parent = vec![None; n];
        }
        for lvl in &lvls {
            for (g, target) in generators_from(self.shape, self.dim, *lvl) {
                if !g.is_degeneracy_like() {
                    continue;
                }
                let action = self.levels[lvl].maps[&g].clone();
                let tgt = self.levels.get_mut(&target).unwrap();
                for (src, &dst) in action.iter().enumerate() {
                    if tgt.parent[dst].is_none() {
                        tgt.parent[dst] = Some((*lvl, g, src));
                    }
                }
            }
        }
    }

    /// Check the generator relations everywhere they are defined within the
    /// truncation. This is the structural gate every constructor passes
    /// through; a presheaf with a broken relation is rejected here.
    pub fn validate(&self) -> Result<()> {
        for (&lvl, data) in &self.levels {
            let gens = generators_from(self.shape, self.dim, lvl);
            // totality
            for (g, _) in &gens {
                let action = data.maps.get(g).ok_or_else(|| {
                    Error::InvalidPresheaf(format!("no action for {:?} at level {}", g, lvl))
                })?;
                if action.len() != data.len() {
                    return Err(Error::InvalidPresheaf(format!(
                        "action of {:?} at level {} has wrong length",
                        g, lvl
                    )));
                }
                let (_, target) = gens.iter().find(|(h, _)| h == g).unwrap();
                let bound = self.levels[target].len();
                if action.iter().any(|&v| v >= bound) {
                    return Err(Error::InvalidPresheaf(format!(
                        "action of {:?} at level {} is out of range",
                        g, lvl
                    )));
                }
            }
            // pairwise relations
            for (g1, t1) in &gens {
                for (g2, t2) in generators_from(self.shape, self.dim, *t1) {
                    if let Some((h1, h2)) = relation_counterpart(*g1, g2) {
                        // path 1: g1 then g2 ; path 2: h1 then h2, when defined
                        let u1 = match generator_target(self.shape, self.dim, lvl, h1) {
                            Some(u) => u,
                            None => continue,
                        };
                        if generator_target(self.shape, self.dim, u1, h2) != Some(t2) {
                            continue;
                        }
                        for c in 0..data.len() {
                            let via_g = self.levels[t1].maps[&g2][data.maps[g1][c]];
                            let via_h = self.levels[&u1].maps[&h2][self.levels[&lvl].maps[&h1][c]];
                            if via_g != via_h {
                                return Err(Error::InvalidPresheaf(format!(
                                    "relation {:?};{:?} = {:?};{:?} broken at level {} cell {:?}",
                                    g1, g2, h1, h2, lvl,
                                    data.names[c]
                                )));
                            }
                        }
                    } else if let Some(()) = relation_identity(*g1, g2) {
                        for c in 0..data.len() {
                            let via = self.levels[t1].maps[&g2][data.maps[g1][c]];
                            if via != c {
                                return Err(Error::InvalidPresheaf(format!(
                                    "identity relation {:?};{:?} broken at level {} cell {:?}",
                                    g1, g2, lvl, data.names[c]
                                )));
                            }
                        }
                    }
                }
            }
        }
        check_marked_triangle(self)?;
        Ok(())
    }

    /// Attach a coskeletality certificate, validating the boundary-tuple
    /// bijections at every checkable line level above `c`.
    pub fn with_certificate(mut self, c: u8) -> Result<Self> {
        match self.coskeletal_witness(c) {
            None => {
                self.cosk = Some(c);
                Ok(self)
            }
            Some(w) => Err(Error::BadCertificate(format!("{w:?}"))),
        }
    }

    pub fn without_certificate(mut self) -> Self {
        self.cosk = None;
        self
    }

    /// First violation of `c`-coskeletality in any simplicial direction, if
    /// one exists within the truncation.
    pub fn coskeletal_witness(&self, c: u8) -> Option<Witness> {
        for &lvl in self.levels.keys() {
            if let MainLevel::Ord(n) = lvl.main {
                if n > c {
                    if let Some(w) = self.boundary_bijection_witness(lvl, true) {
                        return Some(w);
                    }
                }
            }
            if let Some(l) = lvl.second {
                if l > c {
                    if let Some(w) = self.boundary_bijection_witness(lvl, false) {
                        return Some(w);
                    }
                }
            }
        }
        None
    }

    /// Matching tuples in one direction at `lvl`: all `(x_0..x_n)` in the
    /// previous level with `d_i x_j = d_{j-1} x_i` for `i < j`.
    pub fn matching_tuples(&self, lvl: Level, main_dir: bool) -> Vec<Vec<usize>> {
        let n = match (main_dir, lvl.main, lvl.second) {
            (true, MainLevel::Ord(n), _) => n,
            (false, _, Some(l)) => l,
            _ => return Vec::new(),
        };
        if n == 0 {
            return vec![Vec::new()];
        }
        let face = |i: u8| if main_dir { Generator::FaceMain(i) } else { Generator::FaceSecond(i) };
        let prev = generator_target(self.shape, self.dim, lvl, face(0)).unwrap();
        let prev_count = self.levels[&prev].len();
        let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
        for j in 0..=n {
            let mut next = Vec::new();
            for t in &tuples {
                'cand: for x in 0..prev_count {
                    // d_i x_j = d_{j-1} x_i for all i < j
                    for i in 0..j {
                        if n >= 2 {
                            let lhs = self.levels[&prev].maps[&face(i)][x];
                            let rhs = self.levels[&prev].maps[&face(j - 1)][t[i as usize]];
                            if lhs != rhs {
                                continue 'cand;
                            }
                        }
                    }
                    let mut t2 = t.clone();
                    t2.push(x);
                    next.push(t2);
                }
            }
            tuples = next;
        }
        tuples
    }

    fn boundary_bijection_witness(&self, lvl: Level, main_dir: bool) -> Option<Witness> {
        let tuples = self.matching_tuples(lvl, main_dir);
        let n = match (main_dir, lvl.main, lvl.second) {
            (true, MainLevel::Ord(n), _) => n,
            (false, _, Some(l)) => l,
            _ => unreachable!(),
        };
        let face = |i: u8| if main_dir { Generator::FaceMain(i) } else { Generator::FaceSecond(i) };
        let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for c in 0..self.levels[&lvl].len() {
            let tuple: Vec<usize> = (0..=n).map(|i| self.levels[&lvl].maps[&face(i)][c]).collect();
            if let Some(&other) = seen.get(&tuple) {
                return Some(Witness::CellPair {
                    level: lvl.json_key(),
                    left: self.cell_name(lvl, other).to_string(),
                    right: self.cell_name(lvl, c).to_string(),
                });
            }
            seen.insert(tuple, c);
        }
        if seen.len() != tuples.len() {
            let missing = tuples.iter().find(|t| !seen.contains_key(*t)).unwrap();
            return Some(Witness::Text(format!(
                "boundary tuple {:?} at level {} has no filler",
                missing,
                lvl.json_key()
            )));
        }
        None
    }

    /// Separatedness of a (possibly raw) presheaf over a marked shape: the
    /// underlying-edge map out of each marked row must be injective.
    pub fn separatedness(&self) -> CheckReport {
        if !self.shape.is_marked() {
            return CheckReport::holds("marked-separatedness", Exactness::Exact)
                .with_note("shape carries no markings".into());
        }
        for (&lvl, data) in &self.levels {
            if lvl.main != MainLevel::Marked {
                continue;
            }
            let action = &data.maps[&Generator::MarkToEdge];
            let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
            for (c, &e) in action.iter().enumerate() {
                if let Some(&other) = seen.get(&e) {
                    return CheckReport {
                        rule: "marked-separatedness".into(),
                        verdict: Verdict::Fails,
                        witness: Some(Witness::CellPair {
                            level: lvl.json_key(),
                            left: data.names[other].clone(),
                            right: data.names[c].clone(),
                        }),
                        exactness: Exactness::Exact,
                        notes: Vec::new(),
                        elapsed: std::time::Duration::ZERO,
                    };
                }
                seen.insert(e, c);
            }
        }
        CheckReport::holds("marked-separatedness", Exactness::Exact)
    }

    /// Marked cells of a separated presheaf, as indices into the edge level
    /// at the given second coordinate.
    pub fn marking_edge_set(&self, second: Option<u8>) -> Vec<usize> {
        let lvl = Level { main: MainLevel::Marked, second };
        let mut out: Vec<usize> = self.levels[&lvl].maps[&Generator::MarkToEdge].clone();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Apply a composite index morphism given by a monotone main component.
    /// `f` maps `[a]` into the main ordinal of `lvl`; the result lives at
    /// main level `[a]` with the same second coordinate.
    pub fn act_main_monotone(&self, lvl: Level, cell: usize, f: &[u8]) -> (Level, usize) {
        let n = match lvl.main {
            MainLevel::Ord(n) => n,
            MainLevel::Marked => panic!("act_main_monotone on marked level"),
        };
        act_monotone_generic(self, lvl, cell, f, n, true)
    }

    /// Same in the second direction.
    pub fn act_second_monotone(&self, lvl: Level, cell: usize, f: &[u8]) -> (Level, usize) {
        let l = lvl.second.expect("act_second_monotone needs a second coordinate");
        act_monotone_generic(self, lvl, cell, f, l, false)
    }

    /// Sub-presheaf generated by the given cells: closure under every
    /// generator action, with the inclusion data (per level, the indices of
    /// the chosen cells in this presheaf).
    pub fn generated_closure(&self, seeds: &[(Level, usize)]) -> BTreeMap<Level, Vec<usize>> {
        let mut chosen: BTreeMap<Level, Vec<bool>> = self
            .levels
            .iter()
            .map(|(l, d)| (*l, vec![false; d.len()]))
            .collect();
        let mut stack: Vec<(Level, usize)> = seeds.to_vec();
        while let Some((lvl, c)) = stack.pop() {
            let slot = &mut chosen.get_mut(&lvl).unwrap()[c];
            if *slot {
                continue;
            }
            *slot = true;
            for (g, target) in self.generators(lvl) {
                stack.push((target, self.apply(lvl, g, c)));
            }
        }
        chosen
            .into_iter()
            .map(|(l, flags)| {
                (
                    l,
                    flags
                        .iter()
                        .enumerate()
                        .filter(|(_, &f)| f)
                        .map(|(i, _)| i)
                        .collect(),
                )
            })
            .collect()
    }
}

fn act_monotone_generic(
    p: &TruncatedPresheaf,
    lvl: Level,
    cell: usize,
    f: &[u8],
    codomain: u8,
    main_dir: bool,
) -> (Level, usize) {
    // X(f) for monotone f: [a] -> [codomain]; peel cofaces from the outside,
    // then codegeneracies from the inside.
    let mk_level = |ord: u8| -> Level {
        if main_dir {
            Level { main: MainLevel::Ord(ord), second: lvl.second }
        } else {
            Level { main: lvl.main, second: Some(ord) }
        }
    };
    let face = |i: u8| if main_dir { Generator::FaceMain(i) } else { Generator::FaceSecond(i) };
    let degen = |i: u8| if main_dir { Generator::DegenMain(i) } else { Generator::DegenSecond(i) };

    // largest element of the codomain missing from the image
    let missing = (0..=codomain).rev().find(|v| !f.contains(v));
    if let Some(j) = missing {
        let x = p.apply(lvl, face(j), cell);
        let f2: OrdMap = f.iter().map(|&v| if v > j { v - 1 } else { v }).collect();
        return act_monotone_generic(p, mk_level(codomain - 1), x, &f2, codomain - 1, main_dir);
    }
    // surjective: peel a repeated index
    if let Some(i) = (0..f.len() - 1).find(|&i| f[i] == f[i + 1]) {
        let mut f2 = f.to_vec();
        f2.remove(i + 1);
        let (mid_lvl, y) = act_monotone_generic(p, lvl, cell, &f2, codomain, main_dir);
        let target = generator_target(p.shape(), p.dim(), mid_lvl, degen(i as u8))
            .expect("degeneracy within bound");
        return (target, p.apply(mid_lvl, degen(i as u8), y));
    }
    (lvl, cell)
}

/// Second path of a generator relation: `g1;g2 = h1;h2` (actions applied
/// left to right). Returns `None` when the pair carries no relation, and the
/// identity-relation pairs are handled separately.
fn relation_counterpart(g1: Generator, g2: Generator) -> Option<(Generator, Generator)> {
    use Generator::*;
    let cross = |a: Generator, b: Generator| Some((b, a));
    match (g1, g2) {
        // simplicial identities within one direction (actions on cells):
        // d_j then d_i with i < j  =  d_i then d_{j-1}
        (FaceMain(j), FaceMain(i)) if i < j => Some((FaceMain(i), FaceMain(j - 1))),
        (FaceSecond(j), FaceSecond(i)) if i < j => Some((FaceSecond(i), FaceSecond(j - 1))),
        // s_j then s_i with i <= j  =  s_i then s_{j+1}
        (DegenMain(j), DegenMain(i)) if i <= j => Some((DegenMain(i), DegenMain(j + 1))),
        (DegenSecond(j), DegenSecond(i)) if i <= j => Some((DegenSecond(i), DegenSecond(j + 1))),
        // s_j then d_i
        (DegenMain(j), FaceMain(i)) if i < j => Some((FaceMain(i), DegenMain(j - 1))),
        (DegenMain(j), FaceMain(i)) if i > j + 1 => Some((FaceMain(i - 1), DegenMain(j))),
        (DegenSecond(j), FaceSecond(i)) if i < j => Some((FaceSecond(i), DegenSecond(j - 1))),
        (DegenSecond(j), FaceSecond(i)) if i > j + 1 => Some((FaceSecond(i - 1), DegenSecond(j))),
        // cross-direction commutation
        (FaceMain(_) | DegenMain(_) | MarkToEdge | VertexToMark, FaceSecond(_) | DegenSecond(_)) => {
            cross(g1, g2)
        }
        (FaceSecond(_) | DegenSecond(_), FaceMain(_) | DegenMain(_) | MarkToEdge | VertexToMark) => {
            cross(g1, g2)
        }
        _ => None,
    }
}

/// Pairs whose composite is the identity: `s_j` then `d_j` or `d_{j+1}`.
fn relation_identity(g1: Generator, g2: Generator) -> Option<()> {
    use Generator::*;
    match (g1, g2) {
        (DegenMain(j), FaceMain(i)) if i == j || i == j + 1 => Some(()),
        (DegenSecond(j), FaceSecond(i)) if i == j || i == j + 1 => Some(()),
        _ => None,
    }
}

/// Shared-ownership handle used across operations.
pub type PresheafRef = Arc<TruncatedPresheaf>;

pub fn same_shape_and_dim(a: &TruncatedPresheaf, b: &TruncatedPresheaf) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(
            a.shape().json_name().into(),
            b.shape().json_name().into(),
        ));
    }
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(a.dim(), b.dim()));
    }
    Ok(())
}

/// The vertex-to-mark composite with the edge map must equal `s_0`; this is
/// a two-step-equals-one-step relation, so it sits outside the pairwise
/// relation table and is checked directly.
pub(crate) fn check_marked_triangle(p: &TruncatedPresheaf) -> Result<()> {
    if !p.shape().is_marked() || p.dim().main == 0 {
        return Ok(());
    }
    let seconds: Vec<Option<u8>> = match p.dim().second {
        None => vec![None],
        Some(b) => (0..=b).map(Some).collect(),
    };
    for sec in seconds {
        let v = Level { main: MainLevel::Ord(0), second: sec };
        let m = Level { main: MainLevel::Marked, second: sec };
        for c in 0..p.cell_count(v) {
            let via_mark = p.apply(m, Generator::MarkToEdge, p.apply(v, Generator::VertexToMark, c));
            let via_degen = p.apply(v, Generator::DegenMain(0), c);
            if via_mark != via_degen {
                return Err(Error::InvalidPresheaf(format!(
                    "degenerate marking of {:?} does not lie over its edge degeneracy",
                    p.cell_name(v, c)
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard::{build, StandardObjectSpec};

    #[test]
    fn simplex_validates_and_counts() {
        let d2 = build(&StandardObjectSpec::Simplex(2), Dim::simplicial(3)).unwrap();
        assert_eq!(d2.cell_count(Level::ord(0)), 3);
        assert_eq!(d2.cell_count(Level::ord(1)), 6);
        assert_eq!(d2.cell_count(Level::ord(2)), 10);
        assert_eq!(d2.nondegenerate_count(Level::ord(2)), 1);
        assert_eq!(d2.nondegenerate_count(Level::ord(3)), 0);
    }

    #[test]
    fn broken_relation_is_rejected() {
        // two vertices, one edge with both faces the same, then corrupt s_0
        let mut b = PresheafBuilder::new(IndexShape::Simplex, Dim::simplicial(1));
        b.cell(Level::ord(0), "x");
        b.cell(Level::ord(1), "e");
        b.map(Level::ord(1), Generator::FaceMain(0), "e", "x");
        b.map(Level::ord(1), Generator::FaceMain(1), "e", "x");
        b.map(Level::ord(0), Generator::DegenMain(0), "x", "e");
        assert!(b.build().is_ok());

        // a degeneracy whose face does not retract it: s_0(x) = e but d_0(e) = y
        let mut b = PresheafBuilder::new(IndexShape::Simplex, Dim::simplicial(1));
        b.cell(Level::ord(0), "x");
        b.cell(Level::ord(0), "y");
        b.cell(Level::ord(1), "e");
        b.map(Level::ord(1), Generator::FaceMain(0), "e", "y");
        b.map(Level::ord(1), Generator::FaceMain(1), "e", "x");
        b.map(Level::ord(0), Generator::DegenMain(0), "x", "e");
        b.map(Level::ord(0), Generator::DegenMain(0), "y", "e");
        let err = b.build();
        assert!(err.is_err());
    }

    #[test]
    fn monotone_action_agrees_with_faces() {
        let d2 = build(&StandardObjectSpec::Simplex(2), Dim::simplicial(2)).unwrap();
        let top = d2.cell_index(Level::ord(2), "012").unwrap();
        // vertex 1 of the top cell via the composite [0] -> [2]
        let (lvl, v) = d2.act_main_monotone(Level::ord(2), top, &[1]);
        assert_eq!(lvl, Level::ord(0));
        assert_eq!(d2.cell_name(lvl, v), "1");
        // degenerate edge over vertex 2
        let (lvl, e) = d2.act_main_monotone(Level::ord(2), top, &[2, 2]);
        assert_eq!(lvl, Level::ord(1));
        assert_eq!(d2.cell_name(lvl, e), "22");
    }
}
