//! Constructors for the named combinatorial objects: simplices, boundaries,
//! horns, spines, chaotic-groupoid nerves, their bisimplicial counterparts,
//! and the flat/sharp marked simplices. Each carries the coskeletality
//! certificate its construction licenses.

use crate::delta::{self, OrdMap};
use crate::error::{Error, Result};
use crate::map::PresheafMap;
use crate::presheaf::{PresheafBuilder, PresheafRef, TruncatedPresheaf};
use crate::shape::{levels, Dim, Generator, IndexShape, Level, MainLevel};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauIndex {
    Ord(u8),
    Marked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardObjectSpec {
    /// Δ[n]
    Simplex(u8),
    /// ∂Δ[n]
    Boundary(u8),
    /// Λ[n]_i
    Horn(u8, u8),
    /// Sp[n]
    Spine(u8),
    /// J[l], the nerve of the chaotic groupoid on l+1 objects
    GroupoidNerve(u8),
    /// F(n): the bisimplicial representable, constant in the second index
    FGen(u8),
    /// E(n): the chaotic-nerve analogue of F(n)
    EGen(u8),
    /// G(n): the gap-one sub-object of F(n)
    GGen(u8),
    /// ∂F(n)
    FBoundary(u8),
    /// L(n)_l: all faces of F(n) except the l-th
    FHorn(u8, u8),
    /// The second-direction simplex Δ[l], constant in the first index
    ConstCol(u8),
    /// τ(o): flat simplices on ordinary levels, the sharp edge at the marked one
    TauObj(TauIndex),
    /// The marked-shape representable at `o`; coincides with τ(o)
    MarkedGen(TauIndex),
    /// Δ[n] with only degenerate edges marked
    FlatSimplex(u8),
    /// Δ[n] with every edge marked
    SharpSimplex(u8),
}

use StandardObjectSpec as Spec;

pub fn build(spec: &Spec, dim: Dim) -> Result<TruncatedPresheaf> {
    match *spec {
        Spec::Simplex(n) => simplicial_family(n, dim, Some(n), |_, _| true),
        Spec::Boundary(n) => {
            simplicial_family(n, dim, Some(n), |f, n| !delta::is_surjective(f, n))
        }
        Spec::Horn(n, i) => {
            if n < 1 || i > n {
                return Err(Error::IllegalParameters(format!("horn ({n},{i})")));
            }
            simplicial_family(n, dim, Some(n), move |f, n| {
                (0..=n).any(|j| j != i && !f.contains(&j))
            })
        }
        Spec::Spine(n) => simplicial_family(n, dim, Some(n), |f, _| {
            f[f.len() - 1] - f[0] <= 1
        }),
        Spec::GroupoidNerve(l) => groupoid_nerve(l, dim),
        Spec::FGen(n) => bisimplicial_family(n, dim, Some(n), Kind::Monotone, |_, _| true),
        Spec::GGen(n) => bisimplicial_family(n, dim, Some(n), Kind::Monotone, |f, _| {
            f[f.len() - 1] - f[0] <= 1
        }),
        Spec::FBoundary(n) => bisimplicial_family(n, dim, Some(n), Kind::Monotone, |f, n| {
            !delta::is_surjective(f, n)
        }),
        Spec::FHorn(n, l) => {
            if n < 1 || l > n {
                return Err(Error::IllegalParameters(format!("F-horn ({n},{l})")));
            }
            bisimplicial_family(n, dim, Some(n), Kind::Monotone, move |f, n| {
                (0..=n).any(|j| j != l && !f.contains(&j))
            })
        }
        Spec::EGen(n) => bisimplicial_family(n, dim, Some(2), Kind::AllMaps, |_, _| true),
        Spec::ConstCol(l) => const_col(l, dim),
        Spec::TauObj(o) | Spec::MarkedGen(o) => match o {
            TauIndex::Ord(n) => marked_simplex(n, dim, false),
            TauIndex::Marked => marked_simplex(1, dim, true),
        },
        Spec::FlatSimplex(n) => marked_simplex(n, dim, false),
        Spec::SharpSimplex(n) => marked_simplex(n, dim, true),
    }
}

pub fn build_ref(spec: &Spec, dim: Dim) -> Result<PresheafRef> {
    build(spec, dim).map(Arc::new)
}

fn attempt_certificate(p: TruncatedPresheaf, c: Option<u8>) -> TruncatedPresheaf {
    match c {
        Some(c) => match p.clone().with_certificate(c) {
            Ok(q) => q,
            Err(_) => p,
        },
        None => p,
    }
}

fn simplicial_family(
    n: u8,
    dim: Dim,
    cert: Option<u8>,
    keep: impl Fn(&[u8], u8) -> bool,
) -> Result<TruncatedPresheaf> {
    if dim.second.is_some() {
        return Err(Error::IllegalParameters("simplicial object, bisimplicial bound".into()));
    }
    let mut b = PresheafBuilder::new(IndexShape::Simplex, dim);
    let mut cells: BTreeMap<u8, Vec<OrdMap>> = BTreeMap::new();
    for k in 0..=dim.main {
        cells.insert(
            k,
            delta::monotone_maps(k, n)
                .into_iter()
                .filter(|f| keep(f, n))
                .collect(),
        );
    }
    for (&k, fs) in &cells {
        for f in fs {
            b.cell(Level::ord(k), delta::digits(f));
        }
        for f in fs {
            for i in 0..=k {
                if k >= 1 {
                    let img = delta::compose(f, &delta::coface(k, i));
                    b.map(Level::ord(k), Generator::FaceMain(i), delta::digits(f), delta::digits(&img));
                }
                if k + 1 <= dim.main {
                    let img = delta::compose(f, &delta::codegeneracy(k, i));
                    b.map(Level::ord(k), Generator::DegenMain(i), delta::digits(f), delta::digits(&img));
                }
            }
        }
    }
    Ok(attempt_certificate(b.build()?, cert))
}

fn groupoid_nerve(l: u8, dim: Dim) -> Result<TruncatedPresheaf> {
    if dim.second.is_some() {
        return Err(Error::IllegalParameters("simplicial object, bisimplicial bound".into()));
    }
    let mut b = PresheafBuilder::new(IndexShape::Simplex, dim);
    for k in 0..=dim.main {
        for f in delta::all_maps(k, l) {
            b.cell(Level::ord(k), delta::digits(&f));
        }
        for f in delta::all_maps(k, l) {
            for i in 0..=k {
                if k >= 1 {
                    let img = delta::compose(&f, &delta::coface(k, i));
                    b.map(Level::ord(k), Generator::FaceMain(i), delta::digits(&f), delta::digits(&img));
                }
                if k + 1 <= dim.main {
                    let img = delta::compose(&f, &delta::codegeneracy(k, i));
                    b.map(Level::ord(k), Generator::DegenMain(i), delta::digits(&f), delta::digits(&img));
                }
            }
        }
    }
    Ok(attempt_certificate(b.build()?, Some(2)))
}

enum Kind {
    Monotone,
    AllMaps,
}

/// Bisimplicial objects whose `(k, l)` cells are maps `[k] -> [n]` filtered
/// by a predicate, constant in the second index.
fn bisimplicial_family(
    n: u8,
    dim: Dim,
    cert: Option<u8>,
    kind: Kind,
    keep: impl Fn(&[u8], u8) -> bool,
) -> Result<TruncatedPresheaf> {
    let d2 = dim
        .second
        .ok_or_else(|| Error::IllegalParameters("bisimplicial object, simplicial bound".into()))?;
    let mut b = PresheafBuilder::new(IndexShape::BiSimplex, dim);
    let cells_at = |k: u8| -> Vec<OrdMap> {
        let all = match kind {
            Kind::Monotone => delta::monotone_maps(k, n),
            Kind::AllMaps => delta::all_maps(k, n),
        };
        all.into_iter().filter(|f| keep(f, n)).collect()
    };
    for k in 0..=dim.main {
        for l in 0..=d2 {
            let lvl = Level::bi(k, l);
            for f in cells_at(k) {
                b.cell(lvl, delta::digits(&f));
            }
            for f in cells_at(k) {
                let name = delta::digits(&f);
                for i in 0..=k {
                    if k >= 1 {
                        let img = delta::compose(&f, &delta::coface(k, i));
                        b.map(lvl, Generator::FaceMain(i), name.clone(), delta::digits(&img));
                    }
                    if k + 1 <= dim.main {
                        let img = delta::compose(&f, &delta::codegeneracy(k, i));
                        b.map(lvl, Generator::DegenMain(i), name.clone(), delta::digits(&img));
                    }
                }
                for i in 0..=l {
                    if l >= 1 {
                        b.map(lvl, Generator::FaceSecond(i), name.clone(), name.clone());
                    }
                    if l + 1 <= d2 {
                        b.map(lvl, Generator::DegenSecond(i), name.clone(), name.clone());
                    }
                }
            }
        }
    }
    Ok(attempt_certificate(b.build()?, cert))
}

/// Δ[l] in the second direction: `(k, l') -> Hom([l'], [l])`.
fn const_col(l: u8, dim: Dim) -> Result<TruncatedPresheaf> {
    let d2 = dim
        .second
        .ok_or_else(|| Error::IllegalParameters("bisimplicial object, simplicial bound".into()))?;
    let mut b = PresheafBuilder::new(IndexShape::BiSimplex, dim);
    for k in 0..=dim.main {
        for lp in 0..=d2 {
            let lvl = Level::bi(k, lp);
            for f in delta::monotone_maps(lp, l) {
                let name = delta::digits(&f);
                b.cell(lvl, name.clone());
                for i in 0..=k {
                    if k >= 1 {
                        b.map(lvl, Generator::FaceMain(i), name.clone(), name.clone());
                    }
                    if k + 1 <= dim.main {
                        b.map(lvl, Generator::DegenMain(i), name.clone(), name.clone());
                    }
                }
                for i in 0..=lp {
                    if lp >= 1 {
                        let img = delta::compose(&f, &delta::coface(lp, i));
                        b.map(lvl, Generator::FaceSecond(i), name.clone(), delta::digits(&img));
                    }
                    if lp + 1 <= d2 {
                        let img = delta::compose(&f, &delta::codegeneracy(lp, i));
                        b.map(lvl, Generator::DegenSecond(i), name.clone(), delta::digits(&img));
                    }
                }
            }
        }
    }
    Ok(attempt_certificate(b.build()?, Some(l)))
}

/// Δ[n] with markings: all edges when `sharp`, degenerate edges otherwise.
fn marked_simplex(n: u8, dim: Dim, sharp: bool) -> Result<TruncatedPresheaf> {
    if dim.second.is_some() {
        return Err(Error::IllegalParameters("marked simplicial object, bisimplicial bound".into()));
    }
    if dim.main < 1 {
        return Err(Error::IllegalParameters("marked objects need bound >= 1".into()));
    }
    let mut b = PresheafBuilder::new(IndexShape::MarkedSimplex, dim);
    for k in 0..=dim.main {
        for f in delta::monotone_maps(k, n) {
            let name = delta::digits(&f);
            b.cell(Level::ord(k), name.clone());
            for i in 0..=k {
                if k >= 1 {
                    let img = delta::compose(&f, &delta::coface(k, i));
                    b.map(Level::ord(k), Generator::FaceMain(i), name.clone(), delta::digits(&img));
                }
                if k + 1 <= dim.main {
                    let img = delta::compose(&f, &delta::codegeneracy(k, i));
                    b.map(Level::ord(k), Generator::DegenMain(i), name.clone(), delta::digits(&img));
                }
            }
        }
    }
    // marked row: a subset of edges containing the degenerate ones
    let marked: Vec<OrdMap> = delta::monotone_maps(1, n)
        .into_iter()
        .filter(|f| sharp || f[0] == f[1])
        .collect();
    for f in &marked {
        let name = delta::digits(f);
        b.cell(Level::marked(), name.clone());
        b.map(Level::marked(), Generator::MarkToEdge, name.clone(), name);
    }
    for v in 0..=n {
        b.map(
            Level::ord(0),
            Generator::VertexToMark,
            delta::digits(&[v]),
            delta::digits(&[v, v]),
        );
    }
    Ok(attempt_certificate(b.build()?, Some(n.max(1))))
}

/// The recognized generating inclusions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InclusionSpec {
    /// Λ[n]_i ↪ Δ[n]
    HornToSimplex(u8, u8),
    /// ∂Δ[n] ↪ Δ[n]
    BoundaryToSimplex(u8),
    /// Sp[n] ↪ Δ[n]
    SpineToSimplex(u8),
    /// G(n) ↪ F(n)
    GToF(u8),
    /// F(0) -> E(1): the completeness generator, at vertex 0
    CompGenerator,
    /// Δ[l] ↪ J[l]
    SimplexToGroupoidNerve(u8),
    /// ⟨n⟩: F(0) -> F(n), the point onto the last vertex
    VertexToF(u8),
    /// Δ[n]♭ ↪ Δ[n]♯
    FlatToSharp(u8),
}

pub fn canonical_inclusion(spec: InclusionSpec, dim: Dim) -> Result<PresheafMap> {
    use InclusionSpec::*;
    let (sub, ambient): (PresheafRef, PresheafRef) = match spec {
        HornToSimplex(n, i) => (
            build_ref(&Spec::Horn(n, i), dim)?,
            build_ref(&Spec::Simplex(n), dim)?,
        ),
        BoundaryToSimplex(n) => (
            build_ref(&Spec::Boundary(n), dim)?,
            build_ref(&Spec::Simplex(n), dim)?,
        ),
        SpineToSimplex(n) => (
            build_ref(&Spec::Spine(n), dim)?,
            build_ref(&Spec::Simplex(n), dim)?,
        ),
        GToF(n) => (build_ref(&Spec::GGen(n), dim)?, build_ref(&Spec::FGen(n), dim)?),
        CompGenerator => (build_ref(&Spec::FGen(0), dim)?, build_ref(&Spec::EGen(1), dim)?),
        SimplexToGroupoidNerve(l) => (
            build_ref(&Spec::Simplex(l), dim)?,
            build_ref(&Spec::GroupoidNerve(l), dim)?,
        ),
        VertexToF(n) => {
            let point = build_ref(&Spec::FGen(0), dim)?;
            let f = build_ref(&Spec::FGen(n), dim)?;
            let mut components = BTreeMap::new();
            for lvl in point.levels() {
                let mut comp = Vec::with_capacity(point.cell_count(lvl));
                for name in point.cells(lvl) {
                    let image = name.replace('0', &n.to_string());
                    let idx = f.cell_index(lvl, &image).ok_or_else(|| {
                        Error::UnknownInclusion(format!("vertex image {image} missing"))
                    })?;
                    comp.push(idx);
                }
                components.insert(lvl, comp);
            }
            return PresheafMap::new(point, f, components);
        }
        FlatToSharp(n) => (
            build_ref(&Spec::FlatSimplex(n), dim)?,
            build_ref(&Spec::SharpSimplex(n), dim)?,
        ),
    };
    crate::ops::inclusion_by_names(&sub, &ambient)
}

/// Map of standard simplices `Δ[a] -> Δ[n]` induced by a monotone
/// `f: [a] -> [n]`.
pub fn simplex_induced_map_into(f: &[u8], n: u8, dim: Dim) -> Result<PresheafMap> {
    let a = (f.len() - 1) as u8;
    let src = build_ref(&Spec::Simplex(a), dim)?;
    let tgt = build_ref(&Spec::Simplex(n), dim)?;
    let mut components = BTreeMap::new();
    for lvl in src.levels() {
        let mut comp = Vec::with_capacity(src.cell_count(lvl));
        for name in src.cells(lvl) {
            let g = delta::from_digits(name).unwrap();
            let idx = tgt
                .cell_index(lvl, &delta::digits(&delta::compose(f, &g)))
                .ok_or_else(|| Error::IllegalParameters("image outside the codomain simplex".into()))?;
            comp.push(idx);
        }
        components.insert(lvl, comp);
    }
    PresheafMap::new(src, tgt, components)
}

/// Yoneda map Δ[n] -> t picking the cell `c` at simplicial level n.
pub fn yoneda_map(t: &PresheafRef, n: u8, cell: usize) -> Result<PresheafMap> {
    if t.shape() != IndexShape::Simplex && t.shape() != IndexShape::MarkedSimplex {
        return Err(Error::Unsupported("yoneda_map needs a simplicial target".into()));
    }
    let src: PresheafRef = if t.shape() == IndexShape::MarkedSimplex {
        build_ref(&Spec::FlatSimplex(n), t.dim())?
    } else {
        build_ref(&Spec::Simplex(n), t.dim())?
    };
    let mut components = BTreeMap::new();
    for lvl in src.levels() {
        let mut comp = Vec::with_capacity(src.cell_count(lvl));
        match lvl.main {
            MainLevel::Ord(_) => {
                for name in src.cells(lvl) {
                    let f = delta::from_digits(name).unwrap();
                    let (tl, tc) = t.act_main_monotone(Level { main: MainLevel::Ord(n), second: None }, cell, &f);
                    debug_assert_eq!(tl, lvl);
                    comp.push(tc);
                }
            }
            MainLevel::Marked => {
                // flat markings are degenerate edges vv: image is the
                // degenerate marking of the image vertex
                for name in src.cells(lvl) {
                    let f = delta::from_digits(name).unwrap();
                    let (vl, vc) =
                        t.act_main_monotone(Level { main: MainLevel::Ord(n), second: None }, cell, &[f[0]]);
                    debug_assert_eq!(vl, Level::ord(0));
                    comp.push(t.apply(Level::ord(0), Generator::VertexToMark, vc));
                }
            }
        }
        components.insert(lvl, comp);
    }
    PresheafMap::new(src, t.clone(), components)
}

/// The vertex map Δ[0] -> t at vertex index `v` of a simplex-like target
/// whose vertices are named by digits.
pub fn simplex_vertex(t: &PresheafRef, v: u8) -> Result<PresheafMap> {
    let cell = t
        .cell_index(Level::ord(0), &delta::digits(&[v]))
        .ok_or_else(|| Error::IllegalParameters(format!("no vertex {v}")))?;
    yoneda_map(t, 0, cell)
}

/// All levels of a presheaf have the expected representable counts; used by
/// tests and the standard-count acceptance check.
pub fn nondegenerate_profile(p: &TruncatedPresheaf) -> Vec<(String, usize)> {
    levels(p.shape(), p.dim())
        .into_iter()
        .map(|l| (l.json_key(), p.nondegenerate_count(l)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: u8) -> Dim {
        Dim::simplicial(n)
    }

    #[test]
    fn simplex_nondegenerate_counts_are_binomial() {
        // C(n+1, k+1) nondegenerate k-cells
        let d3 = build(&Spec::Simplex(3), d(3)).unwrap();
        assert_eq!(d3.nondegenerate_count(Level::ord(0)), 4);
        assert_eq!(d3.nondegenerate_count(Level::ord(1)), 6);
        assert_eq!(d3.nondegenerate_count(Level::ord(2)), 4);
        assert_eq!(d3.nondegenerate_count(Level::ord(3)), 1);
    }

    #[test]
    fn groupoid_nerve_has_two_cells_per_dimension() {
        let j1 = build(&Spec::GroupoidNerve(1), d(3)).unwrap();
        for k in 0..=3u8 {
            assert_eq!(j1.nondegenerate_count(Level::ord(k)), 2, "dimension {k}");
        }
        assert_eq!(j1.cosk_certificate(), Some(2));
    }

    #[test]
    fn spine_two_is_two_glued_edges() {
        let sp = build(&Spec::Spine(2), d(2)).unwrap();
        assert_eq!(sp.cell_count(Level::ord(0)), 3);
        assert_eq!(sp.nondegenerate_count(Level::ord(1)), 2);
        assert_eq!(sp.nondegenerate_count(Level::ord(2)), 0);
    }

    #[test]
    fn gap_filter_on_g3_edges() {
        // edges of F(3) with final-minus-initial value at most one:
        // 4 degenerate plus 3 adjacent
        let g3 = build(&Spec::GGen(3), Dim::bisimplicial(2, 2)).unwrap();
        assert_eq!(g3.cell_count(Level::bi(1, 0)), 7);
        let f3 = build(&Spec::FGen(3), Dim::bisimplicial(2, 2)).unwrap();
        assert_eq!(f3.cell_count(Level::bi(1, 0)), 10);
    }

    #[test]
    fn horn_misses_exactly_one_face() {
        let h = build(&Spec::Horn(2, 1), d(2)).unwrap();
        assert_eq!(h.nondegenerate_count(Level::ord(1)), 2);
        assert!(h.cell_index(Level::ord(1), "02").is_none());
        assert!(h.cell_index(Level::ord(1), "01").is_some());
        assert!(h.cell_index(Level::ord(1), "12").is_some());
    }

    #[test]
    fn flat_and_sharp_markings() {
        let flat = build(&Spec::FlatSimplex(1), d(2)).unwrap();
        assert_eq!(flat.cell_count(Level::marked()), 2);
        let sharp = build(&Spec::SharpSimplex(1), d(2)).unwrap();
        assert_eq!(sharp.cell_count(Level::marked()), 3);
        assert!(flat.separatedness().verdict.holds());
        assert!(sharp.separatedness().verdict.holds());
    }

    #[test]
    fn canonical_inclusions_validate() {
        let dim = d(3);
        for spec in [
            InclusionSpec::HornToSimplex(2, 1),
            InclusionSpec::BoundaryToSimplex(2),
            InclusionSpec::SpineToSimplex(3),
            InclusionSpec::SimplexToGroupoidNerve(1),
            InclusionSpec::FlatToSharp(2),
        ] {
            let m = canonical_inclusion(spec, dim).unwrap();
            assert!(m.is_injective_levelwise(), "{spec:?}");
        }
        let bdim = Dim::bisimplicial(2, 2);
        for spec in [
            InclusionSpec::GToF(2),
            InclusionSpec::CompGenerator,
            InclusionSpec::VertexToF(2),
        ] {
            let m = canonical_inclusion(spec, bdim).unwrap();
            assert!(m.is_injective_levelwise(), "{spec:?}");
        }
    }

    #[test]
    fn vertex_to_f_hits_the_last_vertex() {
        let m = canonical_inclusion(InclusionSpec::VertexToF(2), Dim::bisimplicial(1, 1)).unwrap();
        let img = m.apply(Level::bi(0, 0), 0);
        assert_eq!(m.target.cell_name(Level::bi(0, 0), img), "2");
    }
}
