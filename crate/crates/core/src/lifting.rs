//! Lifting problems, right-lifting-property checkers for the horn and
//! boundary classes, quasi-category detection, and equivalence edges via the
//! homotopy category.

use crate::error::{Error, Result};
use crate::hom::{enumerate_hom, HomSearch};
use crate::map::PresheafMap;
use crate::presheaf::{PresheafBuilder, PresheafRef};
use crate::report::{CheckReport, Exactness, Verdict, Witness};
use crate::shape::{generators_from, levels, Dim, Generator, IndexShape, Level, MainLevel};
use crate::standard::{build_ref, StandardObjectSpec as Spec};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// A commuting square `left: A -> B`, `right: X -> Y`, `top: A -> X`,
/// `bottom: B -> Y`.
pub struct LiftingProblem {
    pub left: PresheafMap,
    pub right: PresheafMap,
    pub top: PresheafMap,
    pub bottom: PresheafMap,
}

impl LiftingProblem {
    pub fn new(
        left: PresheafMap,
        right: PresheafMap,
        top: PresheafMap,
        bottom: PresheafMap,
    ) -> Result<Self> {
        if *left.source != *top.source
            || *left.target != *bottom.source
            || *right.source != *top.target
            || *right.target != *bottom.target
        {
            return Err(Error::Precondition("square endpoints do not line up".into()));
        }
        let via_top = top.then(&right)?;
        let via_bottom = left.then(&bottom)?;
        if via_top.components != via_bottom.components {
            return Err(Error::Precondition("square does not commute".into()));
        }
        Ok(LiftingProblem { left, right, top, bottom })
    }
}

pub struct LiftOutcome {
    pub report: CheckReport,
    pub diagonal: Option<PresheafMap>,
}

/// Search for a diagonal `B -> X` with both triangles commuting. A found
/// diagonal is re-validated by construction (the hom engine only returns
/// validated maps).
pub fn solve_lift(p: &LiftingProblem) -> Result<LiftOutcome> {
    let search = HomSearch::new(p.left.target.clone(), p.right.source.clone())
        .pin_restriction(&p.left, &p.top)?
        .over(p.right.clone(), p.bottom.clone())
        .first_only();
    let homs = search.run()?;
    let exactness = homs.exactness;
    match homs.elements.into_iter().next() {
        Some(diag) => Ok(LiftOutcome {
            report: CheckReport::holds("lifting-square-diagonal", exactness),
            diagonal: Some(diag),
        }),
        None => Ok(LiftOutcome {
            report: CheckReport::fails(
                "lifting-square-diagonal",
                exactness,
                square_witness("exhausted", &p.top, &p.bottom),
            ),
            diagonal: None,
        }),
    }
}

fn square_witness(generator: &str, top: &PresheafMap, bottom: &PresheafMap) -> Witness {
    Witness::Square {
        generator: generator.to_string(),
        top: serde_json::to_value(top.name_tables()).unwrap_or_default(),
        bottom: serde_json::to_value(bottom.name_tables()).unwrap_or_default(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FibrationClass {
    Kan,
    Inner,
    Left,
    Right,
    TrivialKan,
}

impl FibrationClass {
    pub fn rule(self) -> &'static str {
        match self {
            FibrationClass::Kan => "kan-horn-rlp",
            FibrationClass::Inner => "inner-horn-rlp",
            FibrationClass::Left => "left-horn-rlp",
            FibrationClass::Right => "right-horn-rlp",
            FibrationClass::TrivialKan => "boundary-rlp",
        }
    }

    /// Generating inclusions at dimension `n`.
    fn generators_at(self, n: u8) -> Vec<(String, Spec, Spec)> {
        let horn = |i: u8| {
            (
                format!("horn[{n},{i}]"),
                Spec::Horn(n, i),
                Spec::Simplex(n),
            )
        };
        match self {
            FibrationClass::Kan => (0..=n).map(horn).collect(),
            FibrationClass::Inner => (1..n).map(horn).collect(),
            FibrationClass::Left => (0..n).map(horn).collect(),
            FibrationClass::Right => (1..=n).map(horn).collect(),
            FibrationClass::TrivialKan => vec![(
                format!("boundary[{n}]"),
                Spec::Boundary(n),
                Spec::Simplex(n),
            )],
        }
    }

    fn min_dim(self) -> u8 {
        match self {
            FibrationClass::TrivialKan => 0,
            _ => 1,
        }
    }
}

/// Right lifting property of `f` against the generating inclusions of the
/// class, through dimension `dim_cap`. Exact when both ends carry
/// coskeletality certificates low enough for higher generators to lift
/// automatically.
pub fn has_rlp(f: &PresheafMap, class: FibrationClass, dim_cap: u8) -> Result<CheckReport> {
    if f.source.shape() != IndexShape::Simplex {
        return Err(Error::Unsupported("lifting classes act on simplicial sets".into()));
    }
    let dim = f.source.dim();
    let usable_cap = dim_cap.min(dim.main);
    let mut capped = dim_cap > usable_cap;
    let exact = match (f.source.cosk_certificate(), f.target.cosk_certificate()) {
        (Some(a), Some(b)) => {
            let c = a.max(b);
            let enough = match class {
                FibrationClass::TrivialKan => usable_cap >= c,
                _ => usable_cap >= c + 1,
            };
            if enough {
                capped = false;
                Exactness::ExactByCoskeletality(c)
            } else {
                Exactness::BoundedAt(usable_cap)
            }
        }
        _ => Exactness::BoundedAt(usable_cap),
    };
    for n in class.min_dim()..=usable_cap {
        for (label, sub_spec, amb_spec) in class.generators_at(n) {
            let sub = build_ref(&sub_spec, dim)?;
            let amb = build_ref(&amb_spec, dim)?;
            let incl = crate::ops::inclusion_by_names(&sub, &amb)?;
            let tops = enumerate_hom(&sub, &f.source)?;
            for top in &tops.elements {
                let pushed = top.then(f)?;
                let bottoms = HomSearch::new(amb.clone(), f.target.clone())
                    .pin_restriction(&incl, &pushed)?
                    .run()?;
                for bottom in &bottoms.elements {
                    let problem = LiftingProblem::new(
                        incl.clone(),
                        f.clone(),
                        top.clone(),
                        bottom.clone(),
                    )?;
                    let outcome = solve_lift(&problem)?;
                    if outcome.report.verdict == Verdict::Fails {
                        return Ok(CheckReport::fails(
                            class.rule(),
                            exact,
                            square_witness(&label, top, bottom),
                        ));
                    }
                }
            }
        }
    }
    if capped {
        return Ok(CheckReport::inconclusive(
            class.rule(),
            &format!("generators above dimension {usable_cap} exceed the truncation"),
        ));
    }
    Ok(CheckReport::holds(class.rule(), exact))
}

/// Terminal object of a shape at the given bound.
pub fn terminal(shape: IndexShape, dim: Dim) -> Result<PresheafRef> {
    let mut b = PresheafBuilder::new(shape, dim);
    for lvl in levels(shape, dim) {
        b.cell(lvl, "pt");
        for (g, _) in generators_from(shape, dim, lvl) {
            b.map(lvl, g, "pt", "pt");
        }
    }
    let p = b.build()?;
    Ok(Arc::new(p.with_certificate(0).unwrap_or_else(|_| {
        panic!("terminal object is coskeletal")
    })))
}

pub fn to_terminal(s: &PresheafRef) -> Result<PresheafMap> {
    let t = terminal(s.shape(), s.dim())?;
    let components = s
        .levels()
        .iter()
        .map(|&l| (l, vec![0usize; s.cell_count(l)]))
        .collect();
    PresheafMap::new(s.clone(), t, components)
}

/// Inner-horn filling against the point.
pub fn is_quasicategory(s: &PresheafRef, dim_cap: u8) -> Result<CheckReport> {
    let mut report = has_rlp(&to_terminal(s)?, FibrationClass::Inner, dim_cap)?;
    report.rule = "quasicategory-inner-fillers".into();
    Ok(report)
}

/// The homotopy category of a quasi-category: 1-cells modulo the triangle
/// homotopy relation, composed through least inner-horn fillers.
pub struct HomotopyCategory {
    /// Homotopy class of each edge.
    pub edge_class: Vec<usize>,
    /// Representative edge per class.
    pub class_rep: Vec<usize>,
    /// Composition on classes: `comp[(a, b)] = b after a`.
    pub comp: BTreeMap<(usize, usize), usize>,
    /// Classes containing two-sided inverses.
    pub invertible: BTreeSet<usize>,
    pub exactness: Exactness,
}

pub fn homotopy_category(s: &PresheafRef) -> Result<HomotopyCategory> {
    if s.dim().main < 3 {
        return Err(Error::Precondition(
            "homotopy category needs dimension bound at least 3".into(),
        ));
    }
    let qc = is_quasicategory(s, 3.min(s.dim().main))?;
    if qc.verdict != Verdict::Holds {
        return Err(Error::Precondition("not a quasi-category".into()));
    }
    let e_lvl = Level::ord(1);
    let t_lvl = Level::ord(2);
    let n_edges = s.cell_count(e_lvl);
    let src = |e: usize| s.apply(e_lvl, Generator::FaceMain(1), e);
    let tgt = |e: usize| s.apply(e_lvl, Generator::FaceMain(0), e);
    let degen = |v: usize| s.apply(Level::ord(0), Generator::DegenMain(0), v);

    let mut uf = crate::unionfind::UnionFind::new(n_edges);
    for t in 0..s.cell_count(t_lvl) {
        let f = s.apply(t_lvl, Generator::FaceMain(2), t);
        let g = s.apply(t_lvl, Generator::FaceMain(1), t);
        let h = s.apply(t_lvl, Generator::FaceMain(0), t);
        // last edge degenerate: the first two are homotopic
        if h == degen(tgt(f)) {
            uf.union(f, g);
        }
        // first edge degenerate: the last two are homotopic
        if f == degen(src(h)) {
            uf.union(h, g);
        }
    }
    let mut class_of_edge = vec![0usize; n_edges];
    let mut reps: Vec<usize> = Vec::new();
    let mut class_index: BTreeMap<usize, usize> = BTreeMap::new();
    for e in 0..n_edges {
        let r = uf.find(e);
        let idx = *class_index.entry(r).or_insert_with(|| {
            reps.push(r);
            reps.len() - 1
        });
        class_of_edge[e] = idx;
    }
    // filler index: (d2, d0) -> least 2-cell
    let mut filler: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for t in 0..s.cell_count(t_lvl) {
        let f = s.apply(t_lvl, Generator::FaceMain(2), t);
        let h = s.apply(t_lvl, Generator::FaceMain(0), t);
        filler.entry((f, h)).or_insert(t);
    }
    let mut comp: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (a, &fa) in reps.iter().enumerate() {
        for (b, &gb) in reps.iter().enumerate() {
            if tgt(fa) != src(gb) {
                continue;
            }
            // least filler over all member pairs, with a well-definedness sweep
            let mut result: Option<usize> = None;
            for t in 0..s.cell_count(t_lvl) {
                let f = s.apply(t_lvl, Generator::FaceMain(2), t);
                let h = s.apply(t_lvl, Generator::FaceMain(0), t);
                if class_of_edge[f] == a && class_of_edge[h] == b {
                    let c = class_of_edge[s.apply(t_lvl, Generator::FaceMain(1), t)];
                    match result {
                        None => result = Some(c),
                        Some(prev) if prev != c => {
                            return Err(Error::Precondition(
                                "horn fillers disagree on homotopy classes".into(),
                            ))
                        }
                        _ => {}
                    }
                }
            }
            let c = result.ok_or_else(|| {
                Error::Precondition("missing inner-horn filler for a composable pair".into())
            })?;
            comp.insert((a, b), c);
        }
    }
    let id_class = |v: usize| class_of_edge[degen(v)];
    let mut invertible = BTreeSet::new();
    for (a, &fa) in reps.iter().enumerate() {
        let (x, y) = (src(fa), tgt(fa));
        let has_inverse = reps.iter().enumerate().any(|(b, &gb)| {
            src(gb) == y
                && tgt(gb) == x
                && comp.get(&(a, b)) == Some(&id_class(x))
                && comp.get(&(b, a)) == Some(&id_class(y))
        });
        if has_inverse {
            invertible.insert(a);
        }
    }
    let exactness = match s.cosk_certificate() {
        Some(c) if c <= 2 => Exactness::ExactByCoskeletality(c),
        _ => Exactness::BoundedAt(s.dim().main),
    };
    let _ = filler;
    Ok(HomotopyCategory {
        edge_class: class_of_edge,
        class_rep: reps,
        comp,
        invertible,
        exactness,
    })
}

pub struct EquivalenceEdges {
    /// Indices into the 1-cell level.
    pub edges: BTreeSet<usize>,
    pub exactness: Exactness,
}

/// Edges whose homotopy class is invertible; always contains the degenerate
/// edges.
pub fn hoequiv_edges(s: &PresheafRef) -> Result<EquivalenceEdges> {
    let ho = homotopy_category(s)?;
    let edges = (0..s.cell_count(Level::ord(1)))
        .filter(|&e| ho.invertible.contains(&ho.edge_class[e]))
        .collect();
    Ok(EquivalenceEdges { edges, exactness: ho.exactness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cat::FiniteCategory;

    fn dim3() -> Dim {
        Dim::simplicial(3)
    }

    #[test]
    fn identity_square_always_lifts() {
        let d2 = build_ref(&Spec::Simplex(2), dim3()).unwrap();
        let id = PresheafMap::identity(&d2);
        let p = LiftingProblem::new(id.clone(), id.clone(), id.clone(), id).unwrap();
        let out = solve_lift(&p).unwrap();
        assert_eq!(out.report.verdict, Verdict::Holds);
    }

    #[test]
    fn endpoint_horn_square_with_no_lift() {
        // the vertex-1 horn into the edge, over the vertex-1 inclusion:
        // the only diagonal candidate is constant and misses the bottom
        let horn = build_ref(&Spec::Horn(1, 1), Dim::simplicial(1)).unwrap();
        let edge = build_ref(&Spec::Simplex(1), Dim::simplicial(1)).unwrap();
        let point = build_ref(&Spec::Simplex(0), Dim::simplicial(1)).unwrap();
        let incl = crate::ops::inclusion_by_names(&horn, &edge).unwrap();
        let right = crate::standard::simplex_vertex(&edge, 1).unwrap();
        // right: Δ[0] -> Δ[1] at vertex 1; top: horn -> Δ[0]
        let top = {
            let comps = horn
                .levels()
                .iter()
                .map(|&l| (l, vec![0usize; horn.cell_count(l)]))
                .collect();
            PresheafMap::new(horn.clone(), point.clone(), comps).unwrap()
        };
        let bottom = PresheafMap::identity(&edge);
        let p = LiftingProblem::new(incl, right, top, bottom).unwrap();
        let out = solve_lift(&p).unwrap();
        assert_eq!(out.report.verdict, Verdict::Fails);
    }

    #[test]
    fn inner_horn_into_nerve_lifts_uniquely() {
        let c = FiniteCategory::poset(2);
        let n = crate::cat::nerve(&c, dim3()).unwrap();
        let horn = build_ref(&Spec::Horn(2, 1), dim3()).unwrap();
        let simplex = build_ref(&Spec::Simplex(2), dim3()).unwrap();
        let incl = crate::ops::inclusion_by_names(&horn, &simplex).unwrap();
        let tops = enumerate_hom(&horn, &n).unwrap();
        assert!(!tops.elements.is_empty());
        let term_n = to_terminal(&n).unwrap();
        let term_s = to_terminal(&simplex).unwrap();
        for top in &tops.elements {
            let p = LiftingProblem::new(incl.clone(), term_n.clone(), top.clone(), term_s.clone())
                .unwrap();
            let out = solve_lift(&p).unwrap();
            assert_eq!(out.report.verdict, Verdict::Holds);
        }
    }

    #[test]
    fn nerve_is_quasicategory_and_horn_itself_is_not() {
        let n = crate::cat::nerve(&FiniteCategory::poset(2), dim3()).unwrap();
        assert_eq!(is_quasicategory(&n, 3).unwrap().verdict, Verdict::Holds);
        let horn = build_ref(&Spec::Horn(2, 1), dim3()).unwrap();
        assert_eq!(is_quasicategory(&horn, 3).unwrap().verdict, Verdict::Fails);
        let d3 = build_ref(&Spec::Simplex(3), dim3()).unwrap();
        assert_eq!(is_quasicategory(&d3, 3).unwrap().verdict, Verdict::Holds);
    }

    #[test]
    fn right_rlp_separates_groupoids_from_posets() {
        let groupoid = crate::cat::nerve(&FiniteCategory::chaotic_groupoid(1), dim3()).unwrap();
        let poset = crate::cat::nerve(&FiniteCategory::poset(1), dim3()).unwrap();
        let r1 = has_rlp(&to_terminal(&groupoid).unwrap(), FibrationClass::Right, 3).unwrap();
        assert_eq!(r1.verdict, Verdict::Holds);
        let r2 = has_rlp(&to_terminal(&poset).unwrap(), FibrationClass::Right, 3).unwrap();
        assert_eq!(r2.verdict, Verdict::Fails);
    }

    #[test]
    fn endpoint_inclusions_and_right_rlp() {
        let edge = build_ref(&Spec::Simplex(1), dim3()).unwrap();
        let v0 = crate::standard::simplex_vertex(&edge, 0).unwrap();
        let v1 = crate::standard::simplex_vertex(&edge, 1).unwrap();
        assert_eq!(has_rlp(&v0, FibrationClass::Right, 3).unwrap().verdict, Verdict::Holds);
        assert_eq!(has_rlp(&v1, FibrationClass::Right, 3).unwrap().verdict, Verdict::Fails);
    }

    #[test]
    fn hoequiv_of_groupoid_nerve_is_everything() {
        let j1 = crate::cat::nerve(&FiniteCategory::chaotic_groupoid(1), dim3()).unwrap();
        let eq = hoequiv_edges(&j1).unwrap();
        assert_eq!(eq.edges.len(), j1.cell_count(Level::ord(1)));
    }

    #[test]
    fn hoequiv_of_edge_is_degenerate_only() {
        let d1 = crate::cat::nerve(&FiniteCategory::poset(1), dim3()).unwrap();
        let eq = hoequiv_edges(&d1).unwrap();
        let degens: BTreeSet<usize> = (0..d1.cell_count(Level::ord(0)))
            .map(|v| d1.apply(Level::ord(0), Generator::DegenMain(0), v))
            .collect();
        assert_eq!(eq.edges, degens);
    }
}
