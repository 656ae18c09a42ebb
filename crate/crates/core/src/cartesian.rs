//! Joins, slices, p-Cartesian edge detection and Cartesian fibrations of
//! simplicial sets. An edge is p-Cartesian when the comparison map from the
//! slice under the edge to the fiber product of the base slices is a trivial
//! Kan fibration, checked by the boundary lifting class.

use crate::error::{Error, Result};
use crate::hom::HomSearch;
use crate::lifting::{has_rlp, FibrationClass};
use crate::map::PresheafMap;
use crate::presheaf::{PresheafBuilder, PresheafRef};
use crate::report::{CheckReport, Exactness, Verdict, Witness};
use crate::shape::{Dim, Generator, IndexShape, Level};
use crate::standard::{build_ref, yoneda_map, StandardObjectSpec as Spec};
use std::collections::BTreeMap;
use std::sync::Arc;

fn left_name(n: &str) -> String {
    format!("l:{n}")
}

fn right_name(n: &str) -> String {
    format!("r:{n}")
}

fn join_name(a: &str, b: &str) -> String {
    format!("j:{a}:{b}")
}

/// Join of two simplicial sets at their common bound: level n holds the
/// cells of both sides plus the pairs of total dimension n - 1.
pub fn join(a: &PresheafRef, b: &PresheafRef) -> Result<PresheafRef> {
    crate::presheaf::same_shape_and_dim(a, b)?;
    if a.shape() != IndexShape::Simplex {
        return Err(Error::Unsupported("join is implemented for simplicial sets".into()));
    }
    let dim = a.dim();
    let mut bld = PresheafBuilder::new(IndexShape::Simplex, dim);
    for n in 0..=dim.main {
        let lvl = Level::ord(n);
        for x in a.cells(lvl) {
            bld.cell(lvl, left_name(x));
        }
        for y in b.cells(lvl) {
            bld.cell(lvl, right_name(y));
        }
        for p in 0..n {
            let q = n - 1 - p;
            for x in a.cells(Level::ord(p)) {
                for y in b.cells(Level::ord(q)) {
                    bld.cell(lvl, join_name(x, y));
                }
            }
        }
    }
    for n in 0..=dim.main {
        let lvl = Level::ord(n);
        for (xi, x) in a.cells(lvl).iter().enumerate() {
            for i in 0..=n {
                if n >= 1 {
                    let img = a.cell_name(Level::ord(n - 1), a.apply(lvl, Generator::FaceMain(i), xi));
                    bld.map(lvl, Generator::FaceMain(i), left_name(x), left_name(img));
                }
                if n + 1 <= dim.main {
                    let img = a.cell_name(Level::ord(n + 1), a.apply(lvl, Generator::DegenMain(i), xi));
                    bld.map(lvl, Generator::DegenMain(i), left_name(x), left_name(img));
                }
            }
        }
        for (yi, y) in b.cells(lvl).iter().enumerate() {
            for i in 0..=n {
                if n >= 1 {
                    let img = b.cell_name(Level::ord(n - 1), b.apply(lvl, Generator::FaceMain(i), yi));
                    bld.map(lvl, Generator::FaceMain(i), right_name(y), right_name(img));
                }
                if n + 1 <= dim.main {
                    let img = b.cell_name(Level::ord(n + 1), b.apply(lvl, Generator::DegenMain(i), yi));
                    bld.map(lvl, Generator::DegenMain(i), right_name(y), right_name(img));
                }
            }
        }
        for p in 0..n {
            let q = n - 1 - p;
            let (lp, lq) = (Level::ord(p), Level::ord(q));
            for (xi, x) in a.cells(lp).iter().enumerate() {
                for (yi, y) in b.cells(lq).iter().enumerate() {
                    let name = join_name(x, y);
                    for i in 0..=n {
                        // faces
                        let img = if i <= p {
                            if p == 0 {
                                right_name(y)
                            } else {
                                join_name(
                                    a.cell_name(Level::ord(p - 1), a.apply(lp, Generator::FaceMain(i), xi)),
                                    y,
                                )
                            }
                        } else {
                            let ii = i - p - 1;
                            if q == 0 {
                                left_name(x)
                            } else {
                                join_name(
                                    x,
                                    b.cell_name(Level::ord(q - 1), b.apply(lq, Generator::FaceMain(ii), yi)),
                                )
                            }
                        };
                        bld.map(lvl, Generator::FaceMain(i), name.clone(), img);
                    }
                    if n + 1 <= dim.main {
                        for i in 0..=n {
                            let img = if i <= p {
                                join_name(
                                    a.cell_name(Level::ord(p + 1), a.apply(lp, Generator::DegenMain(i), xi)),
                                    y,
                                )
                            } else {
                                let ii = i - p - 1;
                                join_name(
                                    x,
                                    b.cell_name(Level::ord(q + 1), b.apply(lq, Generator::DegenMain(ii), yi)),
                                )
                            };
                            bld.map(lvl, Generator::DegenMain(i), name.clone(), img);
                        }
                    }
                }
            }
        }
    }
    Ok(Arc::new(bld.build()?))
}

/// The right inclusion `b -> a ⋆ b`.
pub fn join_right_inclusion(j: &PresheafRef, b: &PresheafRef) -> Result<PresheafMap> {
    let mut components = BTreeMap::new();
    for lvl in b.levels() {
        let comp = b
            .cells(lvl)
            .iter()
            .map(|n| j.cell_index(lvl, &right_name(n)).unwrap())
            .collect();
        components.insert(lvl, comp);
    }
    PresheafMap::new(b.clone(), j.clone(), components)
}

/// Functoriality of the join in both arguments.
pub fn join_map(
    src: &PresheafRef,
    tgt: &PresheafRef,
    f: &PresheafMap,
    g: &PresheafMap,
) -> Result<PresheafMap> {
    let mut components = BTreeMap::new();
    for lvl in src.levels() {
        let mut comp = Vec::with_capacity(src.cell_count(lvl));
        for name in src.cells(lvl) {
            let image = if let Some(x) = name.strip_prefix("l:") {
                let lvl_a = lvl;
                let xi = f.source.cell_index(lvl_a, x).unwrap();
                left_name(f.target.cell_name(lvl_a, f.apply(lvl_a, xi)))
            } else if let Some(y) = name.strip_prefix("r:") {
                let yi = g.source.cell_index(lvl, y).unwrap();
                right_name(g.target.cell_name(lvl, g.apply(lvl, yi)))
            } else {
                let rest = name.strip_prefix("j:").unwrap();
                let (x, y) = rest.split_once(':').unwrap();
                // recover the bidegree from the factors
                let (px, xi) = locate(&f.source, x);
                let (qy, yi) = locate(&g.source, y);
                join_name(
                    f.target.cell_name(px, f.apply(px, xi)),
                    g.target.cell_name(qy, g.apply(qy, yi)),
                )
            };
            let idx = tgt
                .cell_index(lvl, &image)
                .ok_or_else(|| Error::InvalidMap(format!("join image {image} missing")))?;
            comp.push(idx);
        }
        components.insert(lvl, comp);
    }
    PresheafMap::new(src.clone(), tgt.clone(), components)
}

fn locate(p: &PresheafRef, name: &str) -> (Level, usize) {
    for lvl in p.levels() {
        if let Some(i) = p.cell_index(lvl, name) {
            return (lvl, i);
        }
    }
    panic!("cell {name} not found");
}

/// A slice object: level n cells are the maps `Δ[n] ⋆ K -> t` restricting to
/// the base map on K.
pub struct SliceObject {
    pub object: PresheafRef,
    pub elements: BTreeMap<u8, Vec<PresheafMap>>,
}

/// Slice of `t` under `q: K -> t` for `K` a point or an edge, computed
/// through `t.dim - dim K - 1`.
pub fn slice(t: &PresheafRef, q: &PresheafMap) -> Result<SliceObject> {
    let k_dim = kind_of_base(&q.source)?;
    let bound = t
        .dim()
        .main
        .checked_sub(k_dim + 1)
        .ok_or_else(|| Error::BoundExceeded("slice needs more room in the bound".into()))?;
    slice_at(t, q, bound)
}

/// Dimension of the slicing object: 0 for a point, 1 for an edge.
fn kind_of_base(k: &PresheafRef) -> Result<u8> {
    let d0 = build_ref(&Spec::Simplex(0), k.dim())?;
    if **k == *d0 {
        return Ok(0);
    }
    let d1 = build_ref(&Spec::Simplex(1), k.dim())?;
    if **k == *d1 {
        return Ok(1);
    }
    Err(Error::Unsupported("slices are taken under a point or an edge".into()))
}

pub fn slice_at(t: &PresheafRef, q: &PresheafMap, bound: u8) -> Result<SliceObject> {
    let k_dim = kind_of_base(&q.source)?;
    let dim = t.dim();
    let mut elements: BTreeMap<u8, Vec<PresheafMap>> = BTreeMap::new();
    let mut joins: BTreeMap<u8, PresheafRef> = BTreeMap::new();
    let mut simplices: BTreeMap<u8, PresheafRef> = BTreeMap::new();
    for n in 0..=bound {
        let dn = build_ref(&Spec::Simplex(n), dim)?;
        let jn = join(&dn, &q.source)?;
        let right = join_right_inclusion(&jn, &q.source)?;
        let homs = HomSearch::new(jn.clone(), t.clone())
            .pin_restriction(&right, q)?
            .run()?;
        elements.insert(n, homs.elements);
        joins.insert(n, jn);
        simplices.insert(n, dn);
    }
    let out_dim = Dim::simplicial(bound);
    let mut bld = PresheafBuilder::new(IndexShape::Simplex, out_dim);
    let width = |n: u8| elements[&n].len().to_string().len().max(1);
    let name_of = |n: u8, i: usize| format!("c{:0w$}", i, w = width(n));
    for n in 0..=bound {
        for i in 0..elements[&n].len() {
            bld.cell(Level::ord(n), name_of(n, i));
        }
    }
    for n in 0..=bound {
        for (g, tgt_lvl) in crate::shape::generators_from(IndexShape::Simplex, out_dim, Level::ord(n)) {
            let tn = match tgt_lvl.main {
                crate::shape::MainLevel::Ord(v) => v,
                _ => unreachable!(),
            };
            let f: Vec<u8> = match g {
                Generator::FaceMain(i) => crate::delta::coface(n, i),
                Generator::DegenMain(i) => crate::delta::codegeneracy(n, i),
                _ => unreachable!(),
            };
            let simplex_map = crate::standard::simplex_induced_map_into(&f, n, dim)?;
            let id_k = PresheafMap::identity(&q.source);
            let jmap = join_map(&joins[&tn], &joins[&n], &simplex_map, &id_k)?;
            for (i, h) in elements[&n].iter().enumerate() {
                let composed = jmap.then(h)?;
                let key = composed.canonical_key();
                let j = elements[&tn]
                    .iter()
                    .position(|m| m.canonical_key() == key)
                    .ok_or_else(|| Error::InvalidMap("slice action left the cell set".into()))?;
                bld.map(Level::ord(n), g, name_of(n, i), name_of(tn, j));
            }
        }
    }
    let mut object = bld.build()?;
    if let Some(c) = t.cosk_certificate() {
        if let Ok(p) = object.clone().with_certificate(c) {
            object = p;
        }
    }
    Ok(SliceObject { object: Arc::new(object), elements })
}

/// Map of slices induced by restricting along a join map of the bases, or by
/// post-composing with a map of targets.
fn slice_map(
    from: &SliceObject,
    to: &SliceObject,
    transform: impl Fn(&PresheafMap) -> Result<PresheafMap>,
) -> Result<PresheafMap> {
    let mut components = BTreeMap::new();
    for (&n, els) in &from.elements {
        let mut comp = Vec::with_capacity(els.len());
        for h in els {
            let image = transform(h)?;
            let key = image.canonical_key();
            let j = to.elements[&n]
                .iter()
                .position(|m| m.canonical_key() == key)
                .ok_or_else(|| Error::InvalidMap("slice map image missing".into()))?;
            comp.push(j);
        }
        components.insert(Level::ord(n), comp);
    }
    PresheafMap::new(from.object.clone(), to.object.clone(), components)
}

pub struct CartesianEdgeCheck {
    pub report: CheckReport,
}

/// Comparison-map construction and trivial-fibration test for one edge.
/// `p` must pass the inner-fibration check at the cap first.
pub fn is_p_cartesian(p: &PresheafMap, edge: usize, cap: u8) -> Result<CheckReport> {
    is_p_cartesian_inner(p, edge, cap, true)
}

fn is_p_cartesian_inner(
    p: &PresheafMap,
    edge: usize,
    cap: u8,
    check_inner: bool,
) -> Result<CheckReport> {
    if check_inner {
        let inner = has_rlp(p, FibrationClass::Inner, cap.max(2))?;
        if inner.verdict == Verdict::Fails {
            return Err(Error::Precondition("not an inner fibration".into()));
        }
    }
    let t = &p.source;
    let s = &p.target;
    if t.dim().main < 2 {
        return Err(Error::BoundExceeded("edge slices need bound at least 2".into()));
    }
    let bound = t.dim().main - 2;
    let e_lvl = Level::ord(1);
    let y = t.apply(e_lvl, Generator::FaceMain(0), edge);
    let pf_edge = p.apply(e_lvl, edge);
    let py = s.apply(e_lvl, Generator::FaceMain(0), pf_edge);

    let q_f = yoneda_map(t, 1, edge)?;
    let q_y = yoneda_map(t, 0, y)?;
    let q_pf = yoneda_map(s, 1, pf_edge)?;
    let q_py = yoneda_map(s, 0, py)?;

    let t_f = slice_at(t, &q_f, bound)?;
    let t_y = slice_at(t, &q_y, bound)?;
    let s_pf = slice_at(s, &q_pf, bound)?;
    let s_py = slice_at(s, &q_py, bound)?;

    // restriction along Δ[n] ⋆ {1} ⊆ Δ[n] ⋆ Δ[1]
    let edge_obj = q_f.source.clone();
    let point_obj = q_y.source.clone();
    let vertex1 = crate::standard::simplex_vertex(&edge_obj, 1)?;
    let restrict = |h: &PresheafMap, n: u8, joins_from: &PresheafRef, joins_to: &PresheafRef| -> Result<PresheafMap> {
        let dn = build_ref(&Spec::Simplex(n), t.dim())?;
        let idn = PresheafMap::identity(&dn);
        let jm = join_map(joins_from, joins_to, &idn, &vertex1)?;
        jm.then(h)
    };
    let _ = (&point_obj, &restrict);

    // build the four comparison legs by re-enumerating joins per level
    let mut joins_pt: BTreeMap<u8, PresheafRef> = BTreeMap::new();
    let mut joins_edge: BTreeMap<u8, PresheafRef> = BTreeMap::new();
    for n in 0..=bound {
        let dn = build_ref(&Spec::Simplex(n), t.dim())?;
        joins_pt.insert(n, join(&dn, &point_obj)?);
        joins_edge.insert(n, join(&dn, &edge_obj)?);
    }
    let restrict_tf_ty = slice_map(&t_f, &t_y, |h| {
        let n = level_of(h, &joins_edge);
        let dn = build_ref(&Spec::Simplex(n), t.dim())?;
        let idn = PresheafMap::identity(&dn);
        let jm = join_map(&joins_pt[&n], &joins_edge[&n], &idn, &vertex1)?;
        jm.then(h)
    })?;
    let restrict_spf_spy = slice_map(&s_pf, &s_py, |h| {
        let n = level_of(h, &joins_edge);
        let dn = build_ref(&Spec::Simplex(n), t.dim())?;
        let idn = PresheafMap::identity(&dn);
        let jm = join_map(&joins_pt[&n], &joins_edge[&n], &idn, &vertex1)?;
        jm.then(h)
    })?;
    let push_tf_spf = slice_map(&t_f, &s_pf, |h| h.then(p))?;
    let push_ty_spy = slice_map(&t_y, &s_py, |h| h.then(p))?;

    let pb = crate::ops::pullback(&restrict_spf_spy, &push_ty_spy)?;
    let comparison = crate::ops::pair_into_pullback(&pb, &push_tf_spf, &restrict_tf_ty)?;
    let mut report = has_rlp(&comparison, FibrationClass::TrivialKan, cap)?;
    report.rule = "slice-comparison-trivial-fibration".into();
    Ok(report)
}

fn level_of(h: &PresheafMap, joins: &BTreeMap<u8, PresheafRef>) -> u8 {
    for (&n, j) in joins {
        if *h.source == **j {
            return n;
        }
    }
    panic!("slice element source is not one of the joins");
}

/// Cartesian fibration of simplicial sets: an inner fibration with a
/// p-Cartesian lift over every base edge ending at every fiber vertex.
pub fn is_cartesian_fibration(p: &PresheafMap, cap: u8) -> Result<CheckReport> {
    let rule = "cartesian-fibration-lifts";
    let inner = has_rlp(p, FibrationClass::Inner, cap.max(2))?;
    if inner.verdict == Verdict::Fails {
        return Ok(CheckReport {
            rule: rule.into(),
            verdict: Verdict::Fails,
            witness: inner.witness,
            exactness: inner.exactness,
            notes: vec!["not an inner fibration".into()],
            elapsed: std::time::Duration::ZERO,
        });
    }
    let t = &p.source;
    let s = &p.target;
    let e_lvl = Level::ord(1);
    let mut cart_cache: BTreeMap<usize, bool> = BTreeMap::new();
    let mut cartesian = |e: usize, cache: &mut BTreeMap<usize, bool>| -> Result<bool> {
        if let Some(&v) = cache.get(&e) {
            return Ok(v);
        }
        let rep = is_p_cartesian_inner(p, e, cap, false)?;
        let v = rep.verdict == Verdict::Holds;
        cache.insert(e, v);
        Ok(v)
    };
    for base_edge in 0..s.cell_count(e_lvl) {
        let target_vertex = s.apply(e_lvl, Generator::FaceMain(0), base_edge);
        for y in 0..t.cell_count(Level::ord(0)) {
            if p.apply(Level::ord(0), y) != target_vertex {
                continue;
            }
            let mut found = false;
            for e in 0..t.cell_count(e_lvl) {
                if p.apply(e_lvl, e) != base_edge
                    || t.apply(e_lvl, Generator::FaceMain(0), e) != y
                {
                    continue;
                }
                if cartesian(e, &mut cart_cache)? {
                    found = true;
                    break;
                }
            }
            if !found {
                return Ok(CheckReport::fails(
                    rule,
                    inner.exactness,
                    Witness::CellPair {
                        level: "1".into(),
                        left: s.cell_name(e_lvl, base_edge).to_string(),
                        right: t.cell_name(Level::ord(0), y).to_string(),
                    },
                ));
            }
        }
    }
    Ok(CheckReport::holds(rule, inner.exactness))
}

pub struct NaturalMarking {
    pub total: PresheafRef,
    pub base: PresheafRef,
    pub projection: PresheafMap,
    /// Indices of the Cartesian edges in the unmarked total object.
    pub cartesian_edges: std::collections::BTreeSet<usize>,
}

/// Mark the total object of a Cartesian fibration by its Cartesian edges,
/// over the sharp base.
pub fn natural_marking(p: &PresheafMap, cap: u8) -> Result<NaturalMarking> {
    let fib = is_cartesian_fibration(p, cap)?;
    if fib.verdict != Verdict::Holds {
        return Err(Error::Precondition("not a Cartesian fibration".into()));
    }
    let t = &p.source;
    let e_lvl = Level::ord(1);
    let mut cart = std::collections::BTreeSet::new();
    for e in 0..t.cell_count(e_lvl) {
        let rep = is_p_cartesian_inner(p, e, cap, false)?;
        if rep.verdict == Verdict::Holds {
            cart.insert(e);
        }
    }
    let names: Vec<String> = cart
        .iter()
        .map(|&e| t.cell_name(e_lvl, e).to_string())
        .collect();
    let total = crate::marked::with_markings(t, &names)?;
    let base = crate::marked::sharp(&p.target)?;
    let mut components: BTreeMap<Level, Vec<usize>> = BTreeMap::new();
    for lvl in total.levels() {
        let comp = match lvl.main {
            crate::shape::MainLevel::Marked => total
                .cells(lvl)
                .iter()
                .map(|n| {
                    let e = t.cell_index(e_lvl, n).unwrap();
                    let img = p.target.cell_name(e_lvl, p.apply(e_lvl, e));
                    base.cell_index(lvl, img).unwrap()
                })
                .collect(),
            _ => total
                .cells(lvl)
                .iter()
                .map(|n| {
                    let c = t.cell_index(lvl, n).unwrap();
                    let img = p.target.cell_name(lvl, p.apply(lvl, c));
                    base.cell_index(lvl, img).unwrap()
                })
                .collect(),
        };
        components.insert(lvl, comp);
    }
    let projection = PresheafMap::new(total.clone(), base.clone(), components)?;
    Ok(NaturalMarking { total, base, projection, cartesian_edges: cart })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cat::FiniteCategory;

    #[test]
    fn joins_of_simplices_are_simplices() {
        let dim = Dim::simplicial(2);
        let d0 = build_ref(&Spec::Simplex(0), dim).unwrap();
        let d1 = build_ref(&Spec::Simplex(1), dim).unwrap();
        let j = join(&d0, &d0).unwrap();
        assert!(crate::map::isomorphic(&j, &d1).unwrap());
        let d2 = build_ref(&Spec::Simplex(2), dim).unwrap();
        let j2 = join(&d1, &d0).unwrap();
        assert!(crate::map::isomorphic(&j2, &d2).unwrap());
    }

    #[test]
    fn boundary_join_point_is_outer_horn() {
        let dim = Dim::simplicial(2);
        let b1 = build_ref(&Spec::Boundary(1), dim).unwrap();
        let d0 = build_ref(&Spec::Simplex(0), dim).unwrap();
        let j = join(&b1, &d0).unwrap();
        let horn = build_ref(&Spec::Horn(2, 2), dim).unwrap();
        assert!(crate::map::isomorphic(&j, &horn).unwrap());
    }

    #[test]
    fn slice_of_edge_at_target_vertex() {
        // the slice of Δ[1] at vertex 1 is Δ[1]
        let dim = Dim::simplicial(3);
        let d1 = build_ref(&Spec::Simplex(1), dim).unwrap();
        let v1 = crate::standard::simplex_vertex(&d1, 1).unwrap();
        let sl = slice(&d1, &v1).unwrap();
        let expected = build_ref(&Spec::Simplex(1), Dim::simplicial(2)).unwrap();
        assert!(crate::map::isomorphic(&sl.object, &expected).unwrap());
    }

    #[test]
    fn slice_of_poset_nerve_is_over_category_nerve() {
        // slicing N([2]) at the top object gives Δ[2]
        let dim = Dim::simplicial(3);
        let n = crate::cat::nerve(&FiniteCategory::poset(2), dim).unwrap();
        let v = n.cell_index(Level::ord(0), "2").unwrap();
        let q = yoneda_map(&n, 0, v).unwrap();
        let sl = slice(&n, &q).unwrap();
        let expected = build_ref(&Spec::Simplex(2), Dim::simplicial(2)).unwrap();
        assert!(crate::map::isomorphic(&sl.object, &expected).unwrap());
    }

    #[test]
    fn identity_fibration_has_all_edges_cartesian() {
        let dim = Dim::simplicial(4);
        let n = crate::cat::nerve(&FiniteCategory::poset(1), dim).unwrap();
        let id = PresheafMap::identity(&n);
        for e in 0..n.cell_count(Level::ord(1)) {
            let rep = is_p_cartesian(&id, e, 2).unwrap();
            assert_eq!(rep.verdict, Verdict::Holds, "edge {e}");
        }
        assert_eq!(is_cartesian_fibration(&id, 2).unwrap().verdict, Verdict::Holds);
    }

    #[test]
    fn missing_lift_is_detected() {
        // the vertex-1 inclusion into the edge is not a Cartesian fibration:
        // nothing lies over the nondegenerate base edge
        let dim = Dim::simplicial(4);
        let d1 = crate::cat::nerve(&FiniteCategory::poset(1), dim).unwrap();
        let v1 = crate::standard::simplex_vertex(&d1, 1).unwrap();
        let rep = is_cartesian_fibration(&v1, 2).unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);
    }
}
