//! Elementary constructions on truncated presheaves: products, finite
//! colimits (levelwise union-find quotients), level-zero limits, constant
//! embeddings between the simplicial and bisimplicial shapes, and slices of
//! a bisimplicial object along one coordinate.

use crate::error::{Error, Result};
use crate::map::PresheafMap;
use crate::presheaf::{same_shape_and_dim, PresheafBuilder, PresheafRef};
use crate::shape::{Dim, Generator, IndexShape, Level, MainLevel};
use crate::unionfind::UnionFind;
use std::collections::BTreeMap;
use std::sync::Arc;

fn pair_name(a: &str, b: &str) -> String {
    format!("({a}|{b})")
}

/// Levelwise Cartesian product with componentwise structure maps. Markings
/// of a product are pairs of markings.
pub fn product(a: &PresheafRef, b: &PresheafRef) -> Result<PresheafRef> {
    Ok(product_with_projections(a, b)?.0)
}

pub fn product_with_projections(
    a: &PresheafRef,
    b: &PresheafRef,
) -> Result<(PresheafRef, PresheafMap, PresheafMap)> {
    same_shape_and_dim(a, b)?;
    let mut builder = PresheafBuilder::new(a.shape(), a.dim());
    for lvl in a.levels() {
        for x in a.cells(lvl) {
            for y in b.cells(lvl) {
                builder.cell(lvl, pair_name(x, y));
            }
        }
        for (g, tgt) in a.generators(lvl) {
            for (xi, x) in a.cells(lvl).iter().enumerate() {
                for (yi, y) in b.cells(lvl).iter().enumerate() {
                    let gx = a.cell_name(tgt, a.apply(lvl, g, xi));
                    let gy = b.cell_name(tgt, b.apply(lvl, g, yi));
                    builder.map(lvl, g, pair_name(x, y), pair_name(gx, gy));
                }
            }
        }
    }
    let mut p = builder.build()?;
    if let (Some(ca), Some(cb)) = (a.cosk_certificate(), b.cosk_certificate()) {
        p = p.with_certificate(ca.max(cb))?;
    }
    let p = Arc::new(p);
    let mut proj_a: BTreeMap<Level, Vec<usize>> = BTreeMap::new();
    let mut proj_b: BTreeMap<Level, Vec<usize>> = BTreeMap::new();
    for lvl in p.levels() {
        let mut ca = Vec::with_capacity(p.cell_count(lvl));
        let mut cb = Vec::with_capacity(p.cell_count(lvl));
        for name in p.cells(lvl) {
            let inner = &name[1..name.len() - 1];
            let (xn, yn) = split_pair(inner);
            ca.push(a.cell_index(lvl, xn).unwrap());
            cb.push(b.cell_index(lvl, yn).unwrap());
        }
        proj_a.insert(lvl, ca);
        proj_b.insert(lvl, cb);
    }
    let pa = PresheafMap::new(p.clone(), a.clone(), proj_a)?;
    let pb = PresheafMap::new(p.clone(), b.clone(), proj_b)?;
    Ok((p, pa, pb))
}

/// Split a product cell name at the pairing bar, respecting nesting.
fn split_pair(inner: &str) -> (&str, &str) {
    let mut depth = 0usize;
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '|' if depth == 0 => return (&inner[..i], &inner[i + 1..]),
            _ => {}
        }
    }
    panic!("malformed product cell name: {inner}");
}

/// Pairing ⟨f, g⟩ into a product built by `product_with_projections`.
pub fn pair_into_product(
    prod: &PresheafRef,
    f: &PresheafMap,
    g: &PresheafMap,
) -> Result<PresheafMap> {
    let mut components = BTreeMap::new();
    for lvl in f.source.levels() {
        let mut comp = Vec::with_capacity(f.source.cell_count(lvl));
        for c in 0..f.source.cell_count(lvl) {
            let name = pair_name(
                f.target.cell_name(lvl, f.apply(lvl, c)),
                g.target.cell_name(lvl, g.apply(lvl, c)),
            );
            let idx = prod
                .cell_index(lvl, &name)
                .ok_or_else(|| Error::InvalidMap(format!("pairing misses cell {name}")))?;
            comp.push(idx);
        }
        components.insert(lvl, comp);
    }
    PresheafMap::new(f.source.clone(), prod.clone(), components)
}

/// A finite diagram of presheaves: edges carry maps between the listed
/// objects.
pub struct Diagram {
    pub objects: Vec<PresheafRef>,
    pub maps: Vec<(usize, usize, PresheafMap)>,
}

pub struct ColimitResult {
    pub object: PresheafRef,
    /// Structure maps of the colimit cocone, one per diagram object.
    pub injections: Vec<PresheafMap>,
}

/// Levelwise set-quotient of the disjoint union by the equivalence generated
/// by the diagram maps. Output cells are named `o<i>:<name>` after the least
/// `(object index, cell index)` representative of their class; for marked
/// shapes the marked rows are additionally collapsed along their underlying
/// edges so the result is separated.
pub fn colimit(diagram: &Diagram) -> Result<ColimitResult> {
    if diagram.objects.is_empty() {
        return Err(Error::Precondition("colimit of an empty diagram".into()));
    }
    let first = &diagram.objects[0];
    for obj in &diagram.objects[1..] {
        same_shape_and_dim(first, obj)?;
    }
    for (i, j, m) in &diagram.maps {
        if *m.source != *diagram.objects[*i] || *m.target != *diagram.objects[*j] {
            return Err(Error::InvalidMap(
                "diagram map endpoints do not match listed objects".into(),
            ));
        }
    }
    let shape = first.shape();
    let dim = first.dim();
    let levels = first.levels();

    // offsets into the disjoint union, per level
    let mut offsets: BTreeMap<Level, Vec<usize>> = BTreeMap::new();
    for &lvl in &levels {
        let mut offs = Vec::with_capacity(diagram.objects.len());
        let mut acc = 0;
        for obj in &diagram.objects {
            offs.push(acc);
            acc += obj.cell_count(lvl);
        }
        offs.push(acc);
        offsets.insert(lvl, offs);
    }

    let mut uf: BTreeMap<Level, UnionFind> = levels
        .iter()
        .map(|&l| (l, UnionFind::new(*offsets[&l].last().unwrap())))
        .collect();
    for (i, j, m) in &diagram.maps {
        for &lvl in &levels {
            let offs = &offsets[&lvl];
            for c in 0..diagram.objects[*i].cell_count(lvl) {
                uf.get_mut(&lvl)
                    .unwrap()
                    .union(offs[*i] + c, offs[*j] + m.apply(lvl, c));
            }
        }
    }
    // separate marked rows: merge marked cells whose underlying edges merged
    if shape.is_marked() {
        loop {
            let mut changed = false;
            for &lvl in &levels {
                if lvl.main != MainLevel::Marked {
                    continue;
                }
                let edge_lvl = Level { main: MainLevel::Ord(1), second: lvl.second };
                let mut by_edge: BTreeMap<usize, usize> = BTreeMap::new();
                for (oi, obj) in diagram.objects.iter().enumerate() {
                    for c in 0..obj.cell_count(lvl) {
                        let total = offsets[&lvl][oi] + c;
                        let e_total =
                            offsets[&edge_lvl][oi] + obj.apply(lvl, Generator::MarkToEdge, c);
                        let e_class = uf.get_mut(&edge_lvl).unwrap().find(e_total);
                        let m_class = uf.get_mut(&lvl).unwrap().find(total);
                        if let Some(&prev) = by_edge.get(&e_class) {
                            if prev != m_class {
                                uf.get_mut(&lvl).unwrap().union(prev, m_class);
                                changed = true;
                            }
                        } else {
                            by_edge.insert(e_class, m_class);
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    // canonical representatives and names
    let mut class_rep: BTreeMap<Level, BTreeMap<usize, (usize, usize)>> = BTreeMap::new();
    for &lvl in &levels {
        let mut reps = BTreeMap::new();
        for (oi, obj) in diagram.objects.iter().enumerate() {
            for c in 0..obj.cell_count(lvl) {
                let total = offsets[&lvl][oi] + c;
                let class = uf.get_mut(&lvl).unwrap().find(total);
                reps.entry(class).or_insert((oi, c));
            }
        }
        class_rep.insert(lvl, reps);
    }
    let class_name = |lvl: Level, class: usize| -> String {
        let (oi, c) = class_rep[&lvl][&class];
        format!("o{oi}:{}", diagram.objects[oi].cell_name(lvl, c))
    };

    let mut builder = PresheafBuilder::new(shape, dim);
    for &lvl in &levels {
        for &class in class_rep[&lvl].keys() {
            builder.cell(lvl, class_name(lvl, class));
        }
    }
    for &lvl in &levels {
        let classes: Vec<usize> = class_rep[&lvl].keys().copied().collect();
        for class in classes {
            let (oi, c) = class_rep[&lvl][&class];
            let obj = &diagram.objects[oi];
            for (g, tgt) in obj.generators(lvl) {
                let img = obj.apply(lvl, g, c);
                let img_class = uf.get_mut(&tgt).unwrap().find(offsets[&tgt][oi] + img);
                builder.map(lvl, g, class_name(lvl, class), class_name(tgt, img_class));
            }
        }
    }
    let object = Arc::new(builder.build()?);
    let mut injections = Vec::with_capacity(diagram.objects.len());
    for (oi, obj) in diagram.objects.iter().enumerate() {
        let mut components = BTreeMap::new();
        for &lvl in &levels {
            let mut comp = Vec::with_capacity(obj.cell_count(lvl));
            for c in 0..obj.cell_count(lvl) {
                let class = uf.get_mut(&lvl).unwrap().find(offsets[&lvl][oi] + c);
                comp.push(object.cell_index(lvl, &class_name(lvl, class)).unwrap());
            }
            components.insert(lvl, comp);
        }
        injections.push(PresheafMap::new(obj.clone(), object.clone(), components)?);
    }
    Ok(ColimitResult { object, injections })
}

pub struct PullbackResult {
    pub object: PresheafRef,
    pub to_left: PresheafMap,
    pub to_right: PresheafMap,
}

/// Levelwise fiber product of a cospan `left -> base <- right`.
pub fn pullback(f: &PresheafMap, g: &PresheafMap) -> Result<PullbackResult> {
    if *f.target != *g.target {
        return Err(Error::Precondition("cospan legs have different bases".into()));
    }
    let left = &f.source;
    let right = &g.source;
    same_shape_and_dim(left, right)?;
    let mut builder = PresheafBuilder::new(left.shape(), left.dim());
    let mut chosen: BTreeMap<Level, Vec<(usize, usize)>> = BTreeMap::new();
    for lvl in left.levels() {
        let mut cells = Vec::new();
        for x in 0..left.cell_count(lvl) {
            for y in 0..right.cell_count(lvl) {
                if f.apply(lvl, x) == g.apply(lvl, y) {
                    builder.cell(
                        lvl,
                        pair_name(left.cell_name(lvl, x), right.cell_name(lvl, y)),
                    );
                    cells.push((x, y));
                }
            }
        }
        chosen.insert(lvl, cells);
    }
    for lvl in left.levels() {
        for &(x, y) in &chosen[&lvl] {
            for (gen, tgt) in left.generators(lvl) {
                builder.map(
                    lvl,
                    gen,
                    pair_name(left.cell_name(lvl, x), right.cell_name(lvl, y)),
                    pair_name(
                        left.cell_name(tgt, left.apply(lvl, gen, x)),
                        right.cell_name(tgt, right.apply(lvl, gen, y)),
                    ),
                );
            }
        }
    }
    let mut obj = builder.build()?;
    if let (Some(ca), Some(cb), Some(cc)) = (
        left.cosk_certificate(),
        right.cosk_certificate(),
        f.target.cosk_certificate(),
    ) {
        obj = obj.with_certificate(ca.max(cb).max(cc))?;
    }
    let object = Arc::new(obj);
    let mut comp_l: BTreeMap<Level, Vec<usize>> = BTreeMap::new();
    let mut comp_r: BTreeMap<Level, Vec<usize>> = BTreeMap::new();
    for lvl in object.levels() {
        let mut cl = Vec::new();
        let mut cr = Vec::new();
        for name in object.cells(lvl) {
            let (xn, yn) = split_pair(&name[1..name.len() - 1]);
            cl.push(left.cell_index(lvl, xn).unwrap());
            cr.push(right.cell_index(lvl, yn).unwrap());
        }
        comp_l.insert(lvl, cl);
        comp_r.insert(lvl, cr);
    }
    Ok(PullbackResult {
        to_left: PresheafMap::new(object.clone(), left.clone(), comp_l)?,
        to_right: PresheafMap::new(object.clone(), right.clone(), comp_r)?,
        object,
    })
}

/// Pairing into a pullback.
pub fn pair_into_pullback(
    pb: &PullbackResult,
    f: &PresheafMap,
    g: &PresheafMap,
) -> Result<PresheafMap> {
    let mut components = BTreeMap::new();
    for lvl in f.source.levels() {
        let mut comp = Vec::with_capacity(f.source.cell_count(lvl));
        for c in 0..f.source.cell_count(lvl) {
            let name = pair_name(
                pb.to_left.target.cell_name(lvl, f.apply(lvl, c)),
                pb.to_right.target.cell_name(lvl, g.apply(lvl, c)),
            );
            let idx = pb
                .object
                .cell_index(lvl, &name)
                .ok_or_else(|| Error::InvalidMap(format!("pairing misses pullback cell {name}")))?;
            comp.push(idx);
        }
        components.insert(lvl, comp);
    }
    PresheafMap::new(f.source.clone(), pb.object.clone(), components)
}

/// Constant prolongation in the second direction: `(k, l) -> S_k`. This is
/// the left member of the projection/column adjunction on bisimplicial sets.
pub fn const_second(s: &PresheafRef, second_bound: u8) -> Result<PresheafRef> {
    prolong(s, second_bound, true)
}

/// Constant embedding in the first direction: `(k, l) -> S_l`, the standing
/// convention for bases of bisimplicial fibration checkers.
pub fn const_rows(s: &PresheafRef, main_bound: u8) -> Result<PresheafRef> {
    prolong(s, main_bound, false)
}

fn prolong(s: &PresheafRef, new_bound: u8, second_constant: bool) -> Result<PresheafRef> {
    let (shape, dim) = match (s.shape(), second_constant) {
        (IndexShape::Simplex, true) => (
            IndexShape::BiSimplex,
            Dim::bisimplicial(s.dim().main, new_bound),
        ),
        (IndexShape::Simplex, false) => (
            IndexShape::BiSimplex,
            Dim::bisimplicial(new_bound, s.dim().main),
        ),
        (IndexShape::MarkedSimplex, true) => (
            IndexShape::MarkedBiSimplex,
            Dim::bisimplicial(s.dim().main, new_bound),
        ),
        _ => {
            return Err(Error::Unsupported(
                "constant prolongation takes a (marked) simplicial input".into(),
            ))
        }
    };
    let mut builder = PresheafBuilder::new(shape, dim);
    let src_level = |lvl: Level| -> Level {
        if second_constant {
            Level { main: lvl.main, second: None }
        } else {
            Level { main: MainLevel::Ord(lvl.second.unwrap()), second: None }
        }
    };
    for lvl in crate::shape::levels(shape, dim) {
        let src = src_level(lvl);
        for name in s.cells(src) {
            builder.cell(lvl, name.clone());
        }
        for (g, tgt) in crate::shape::generators_from(shape, dim, lvl) {
            let constant_dir = if second_constant {
                matches!(g, Generator::FaceSecond(_) | Generator::DegenSecond(_))
            } else {
                matches!(
                    g,
                    Generator::FaceMain(_)
                        | Generator::DegenMain(_)
                        | Generator::MarkToEdge
                        | Generator::VertexToMark
                )
            };
            if constant_dir {
                for name in s.cells(src) {
                    builder.map(lvl, g, name.clone(), name.clone());
                }
            } else {
                let g1 = if second_constant {
                    g
                } else {
                    match g {
                        Generator::FaceSecond(i) => Generator::FaceMain(i),
                        Generator::DegenSecond(i) => Generator::DegenMain(i),
                        _ => unreachable!(),
                    }
                };
                let src_tgt = src_level(tgt);
                for (ci, name) in s.cells(src).iter().enumerate() {
                    builder.map(
                        lvl,
                        g,
                        name.clone(),
                        s.cell_name(src_tgt, s.apply(src, g1, ci)).to_string(),
                    );
                }
            }
        }
    }
    let mut p = builder.build()?;
    if let Some(c) = s.cosk_certificate() {
        // constant lines are coskeletal from degree 1 on, so the certificate
        // usually carries over; validation decides
        if let Ok(q) = p.clone().with_certificate(c) {
            p = q;
        }
    }
    Ok(Arc::new(p))
}

/// The simplicial slice at a fixed main level: `l -> X_{n, l}`. For marked
/// shapes `n` must be an ordinary level.
pub fn fix_main(x: &PresheafRef, n: u8) -> Result<PresheafRef> {
    slice_one_direction(x, MainLevel::Ord(n), true)
}

/// The slice at a fixed second coordinate: `k -> X_{k, l}`; keeps the marked
/// row, so a marked bisimplicial input yields a marked simplicial output.
pub fn fix_second(x: &PresheafRef, l: u8) -> Result<PresheafRef> {
    slice_one_direction(x, MainLevel::Ord(l), false)
}

fn slice_one_direction(x: &PresheafRef, at: MainLevel, fix_is_main: bool) -> Result<PresheafRef> {
    if !x.shape().is_bi() {
        return Err(Error::Unsupported("slice needs a bisimplicial input".into()));
    }
    let fixed = match at {
        MainLevel::Ord(v) => v,
        MainLevel::Marked => return Err(Error::Unsupported("fix at the marked row".into())),
    };
    let (shape, dim) = if fix_is_main {
        (IndexShape::Simplex, Dim::simplicial(x.dim().second.unwrap()))
    } else {
        let s = if x.shape().is_marked() {
            IndexShape::MarkedSimplex
        } else {
            IndexShape::Simplex
        };
        (s, Dim::simplicial(x.dim().main))
    };
    if fix_is_main && fixed > x.dim().main {
        return Err(Error::BoundExceeded("fixed main level above bound".into()));
    }
    if !fix_is_main && fixed > x.dim().second.unwrap() {
        return Err(Error::BoundExceeded("fixed second level above bound".into()));
    }
    let src_level = |lvl: Level| -> Level {
        if fix_is_main {
            Level {
                main: MainLevel::Ord(fixed),
                second: Some(match lvl.main {
                    MainLevel::Ord(n) => n,
                    MainLevel::Marked => unreachable!(),
                }),
            }
        } else {
            Level { main: lvl.main, second: Some(fixed) }
        }
    };
    let mut builder = PresheafBuilder::new(shape, dim);
    for lvl in crate::shape::levels(shape, dim) {
        let src = src_level(lvl);
        for name in x.cells(src) {
            builder.cell(lvl, name.clone());
        }
        for (g, tgt) in crate::shape::generators_from(shape, dim, lvl) {
            let g_src = if fix_is_main {
                match g {
                    Generator::FaceMain(i) => Generator::FaceSecond(i),
                    Generator::DegenMain(i) => Generator::DegenSecond(i),
                    _ => unreachable!("marked generators cannot appear in a main-fixed slice"),
                }
            } else {
                g
            };
            let src_tgt = src_level(tgt);
            for (ci, name) in x.cells(src).iter().enumerate() {
                builder.map(
                    lvl,
                    g,
                    name.clone(),
                    x.cell_name(src_tgt, x.apply(src, g_src, ci)).to_string(),
                );
            }
        }
    }
    let mut p = builder.build()?;
    if let Some(c) = x.cosk_certificate() {
        if let Ok(q) = p.clone().with_certificate(c) {
            p = q;
        }
    }
    Ok(Arc::new(p))
}

/// Product functoriality: the map between two products induced by maps of
/// the factors, matched through the pair naming scheme.
pub fn product_map(
    src: &PresheafRef,
    tgt: &PresheafRef,
    f: &PresheafMap,
    g: &PresheafMap,
) -> Result<PresheafMap> {
    let mut components = BTreeMap::new();
    for lvl in src.levels() {
        let mut comp = Vec::with_capacity(src.cell_count(lvl));
        for name in src.cells(lvl) {
            let (xn, yn) = split_pair(&name[1..name.len() - 1]);
            let xi = f.source.cell_index(lvl, xn).unwrap();
            let yi = g.source.cell_index(lvl, yn).unwrap();
            let image = pair_name(
                f.target.cell_name(lvl, f.apply(lvl, xi)),
                g.target.cell_name(lvl, g.apply(lvl, yi)),
            );
            let idx = tgt
                .cell_index(lvl, &image)
                .ok_or_else(|| Error::InvalidMap(format!("product image {image} missing")))?;
            comp.push(idx);
        }
        components.insert(lvl, comp);
    }
    PresheafMap::new(src.clone(), tgt.clone(), components)
}

/// Constant-first prolongation of a simplicial map, matched by names.
pub fn const_rows_map(f: &PresheafMap, main_bound: u8) -> Result<PresheafMap> {
    let src = const_rows(&f.source, main_bound)?;
    let tgt = const_rows(&f.target, main_bound)?;
    let mut components = BTreeMap::new();
    for lvl in src.levels() {
        let s_lvl = Level::ord(lvl.second.unwrap());
        let mut comp = Vec::with_capacity(src.cell_count(lvl));
        for name in src.cells(lvl) {
            let si = f.source.cell_index(s_lvl, name).unwrap();
            let img = f.target.cell_name(s_lvl, f.apply(s_lvl, si));
            comp.push(tgt.cell_index(lvl, img).unwrap());
        }
        components.insert(lvl, comp);
    }
    PresheafMap::new(src, tgt, components)
}

/// Sub-presheaf generated by the given cells, with its inclusion.
pub fn generated_subobject(
    x: &PresheafRef,
    seeds: &[(Level, usize)],
) -> Result<(PresheafRef, PresheafMap)> {
    let chosen = x.generated_closure(seeds);
    let mut builder = PresheafBuilder::new(x.shape(), x.dim());
    for (&lvl, cells) in &chosen {
        for &c in cells {
            builder.cell(lvl, x.cell_name(lvl, c).to_string());
        }
        for &c in cells {
            for (g, tgt) in x.generators(lvl) {
                builder.map(
                    lvl,
                    g,
                    x.cell_name(lvl, c).to_string(),
                    x.cell_name(tgt, x.apply(lvl, g, c)).to_string(),
                );
            }
        }
    }
    let sub = Arc::new(builder.build()?);
    let mut components = BTreeMap::new();
    for lvl in sub.levels() {
        let comp = sub
            .cells(lvl)
            .iter()
            .map(|n| x.cell_index(lvl, n).unwrap())
            .collect();
        components.insert(lvl, comp);
    }
    let incl = PresheafMap::new(sub.clone(), x.clone(), components)?;
    Ok((sub, incl))
}

/// Inclusion of a levelwise-subset presheaf whose cell names are shared with
/// the ambient object.
pub fn inclusion_by_names(sub: &PresheafRef, ambient: &PresheafRef) -> Result<PresheafMap> {
    let mut components = BTreeMap::new();
    for lvl in sub.levels() {
        let mut comp = Vec::with_capacity(sub.cell_count(lvl));
        for name in sub.cells(lvl) {
            let idx = ambient.cell_index(lvl, name).ok_or_else(|| {
                Error::InvalidMap(format!("cell {name:?} at {lvl} not in the ambient object"))
            })?;
            comp.push(idx);
        }
        components.insert(lvl, comp);
    }
    PresheafMap::new(sub.clone(), ambient.clone(), components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard::{build_ref, StandardObjectSpec as Spec};

    #[test]
    fn product_counts_multiply() {
        let d1 = build_ref(&Spec::Simplex(1), Dim::simplicial(2)).unwrap();
        let d2 = build_ref(&Spec::Simplex(2), Dim::simplicial(2)).unwrap();
        let p = product(&d1, &d2).unwrap();
        for lvl in p.levels() {
            assert_eq!(p.cell_count(lvl), d1.cell_count(lvl) * d2.cell_count(lvl));
        }
    }

    #[test]
    fn square_has_two_nondegenerate_triangles() {
        let d1 = build_ref(&Spec::Simplex(1), Dim::simplicial(2)).unwrap();
        let p = product(&d1, &d1).unwrap();
        assert_eq!(p.nondegenerate_count(Level::ord(2)), 2);
    }

    #[test]
    fn unit_of_product() {
        let d0 = build_ref(&Spec::Simplex(0), Dim::simplicial(2)).unwrap();
        let d2 = build_ref(&Spec::Simplex(2), Dim::simplicial(2)).unwrap();
        let p = product(&d0, &d2).unwrap();
        assert!(crate::map::isomorphic(&p, &d2).unwrap());
    }

    #[test]
    fn coproduct_of_two_points() {
        let d0 = build_ref(&Spec::Simplex(0), Dim::simplicial(1)).unwrap();
        let out = colimit(&Diagram { objects: vec![d0.clone(), d0], maps: vec![] }).unwrap();
        assert_eq!(out.object.cell_count(Level::ord(0)), 2);
    }

    #[test]
    fn coequalizing_both_endpoints_gives_a_circle() {
        let d0 = build_ref(&Spec::Simplex(0), Dim::simplicial(2)).unwrap();
        let d1 = build_ref(&Spec::Simplex(1), Dim::simplicial(2)).unwrap();
        let v0 = crate::standard::simplex_vertex(&d1, 0).unwrap();
        let v1 = crate::standard::simplex_vertex(&d1, 1).unwrap();
        let out = colimit(&Diagram {
            objects: vec![d0.clone(), d1],
            maps: vec![(0, 1, v0), (0, 1, v1)],
        })
        .unwrap();
        assert_eq!(out.object.cell_count(Level::ord(0)), 1);
        assert_eq!(out.object.nondegenerate_count(Level::ord(1)), 1);
    }

    #[test]
    fn colimit_of_one_object_is_isomorphic() {
        let d2 = build_ref(&Spec::Simplex(2), Dim::simplicial(2)).unwrap();
        let out = colimit(&Diagram { objects: vec![d2.clone()], maps: vec![] }).unwrap();
        assert!(crate::map::isomorphic(&out.object, &d2).unwrap());
    }

    #[test]
    fn pullback_of_identity_is_identity() {
        let d2 = build_ref(&Spec::Simplex(2), Dim::simplicial(2)).unwrap();
        let id = PresheafMap::identity(&d2);
        let pb = pullback(&id, &id).unwrap();
        assert!(crate::map::isomorphic(&pb.object, &d2).unwrap());
    }
}
