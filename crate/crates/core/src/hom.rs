//! Exact enumeration of presheaf maps, mapping spaces, exponentials and
//! matching objects.
//!
//! The search assigns images to nondegenerate cells only, propagates forced
//! values downward along faces (and retracts through degeneracy witnesses),
//! and picks the most constrained unassigned cell next. Homs into a target
//! with a coskeletality certificate are computed on the levels at or below
//! the certificate and extended by unique boundary fillers, which realizes
//! homs out of objects that are infinite above the truncation.

use crate::error::{Error, Result};
use crate::map::PresheafMap;
use crate::presheaf::{same_shape_and_dim, PresheafRef, TruncatedPresheaf};
use crate::report::{CheckReport, Exactness, Verdict};
use crate::shape::{Dim, Generator, IndexShape, Level, MainLevel};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct HomSet {
    pub source: PresheafRef,
    pub target: PresheafRef,
    pub elements: Vec<PresheafMap>,
    pub exactness: Exactness,
}

impl HomSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Configurable backtracking search for presheaf maps.
pub struct HomSearch {
    source: PresheafRef,
    target: PresheafRef,
    pinned: BTreeMap<(Level, usize), usize>,
    fiber: Option<(PresheafMap, PresheafMap)>,
    bijective: bool,
    first_only: bool,
}

impl HomSearch {
    pub fn new(source: PresheafRef, target: PresheafRef) -> Self {
        HomSearch {
            source,
            target,
            pinned: BTreeMap::new(),
            fiber: None,
            bijective: false,
            first_only: false,
        }
    }

    /// Force the image of one source cell.
    pub fn pin(mut self, lvl: Level, src_cell: usize, tgt_cell: usize) -> Self {
        self.pinned.insert((lvl, src_cell), tgt_cell);
        self
    }

    /// Pin the whole image of an inclusion: solutions must restrict along
    /// `incl` to `along`.
    pub fn pin_restriction(mut self, incl: &PresheafMap, along: &PresheafMap) -> Result<Self> {
        if *incl.source != *along.source {
            return Err(Error::Precondition("restriction sources differ".into()));
        }
        for lvl in incl.source.levels() {
            for c in 0..incl.source.cell_count(lvl) {
                let key = (lvl, incl.apply(lvl, c));
                let val = along.apply(lvl, c);
                if let Some(&prev) = self.pinned.get(&key) {
                    if prev != val {
                        return Err(Error::Precondition(
                            "inconsistent pinned restriction".into(),
                        ));
                    }
                }
                self.pinned.insert(key, val);
            }
        }
        Ok(self)
    }

    /// Restrict to maps over a base: `through ∘ f = required`, where
    /// `through: target -> Z` and `required: source -> Z`.
    pub fn over(mut self, through: PresheafMap, required: PresheafMap) -> Self {
        self.fiber = Some((through, required));
        self
    }

    pub fn bijective_only(mut self) -> Self {
        self.bijective = true;
        self
    }

    pub fn first_only(mut self) -> Self {
        self.first_only = true;
        self
    }

    pub fn run(self) -> Result<HomSet> {
        same_shape_and_dim(&self.source, &self.target)?;
        if let Some((through, required)) = &self.fiber {
            if *through.source != *self.target || *required.source != *self.source {
                return Err(Error::Precondition("fiber constraint endpoints wrong".into()));
            }
            if *through.target != *required.target {
                return Err(Error::Precondition("fiber constraint bases differ".into()));
            }
        }
        let engine = Engine::prepare(&self)?;
        engine.search(self)
    }
}

/// Convenience wrapper: all maps from `x` to `y`.
pub fn enumerate_hom(x: &PresheafRef, y: &PresheafRef) -> Result<HomSet> {
    HomSearch::new(x.clone(), y.clone()).run()
}

struct Engine {
    /// Core levels (within the certificate), height order.
    core: Vec<Level>,
    core_set: BTreeMap<Level, usize>,
    /// Per core level: face-like generators with target level position.
    faces: Vec<Vec<(Generator, usize)>>,
    /// Per core level: nondegenerate cell indices.
    nondeg: Vec<Vec<usize>>,
    exactness: Exactness,
}

impl Engine {
    fn prepare(search: &HomSearch) -> Result<Engine> {
        let src = &search.source;
        let tgt = &search.target;
        let cert = tgt.cosk_certificate();
        let within = |lvl: &Level, c: u8| -> bool {
            let main_ok = match lvl.main {
                MainLevel::Ord(n) => n <= c,
                MainLevel::Marked => c >= 1,
            };
            main_ok && lvl.second.map_or(true, |l| l <= c)
        };
        let (core, exactness): (Vec<Level>, Exactness) = match cert {
            Some(c) => {
                let fits = src.dim().main >= c
                    && src.dim().second.map_or(true, |s| s >= c)
                    && (!src.shape().is_marked() || c >= 1);
                if fits {
                    let lv: Vec<Level> =
                        src.levels().into_iter().filter(|l| within(l, c)).collect();
                    (lv, Exactness::ExactByCoskeletality(c))
                } else {
                    let min_bound = src
                        .dim()
                        .second
                        .map_or(src.dim().main, |s| s.min(src.dim().main));
                    (src.levels(), Exactness::BoundedAt(min_bound))
                }
            }
            None => (src.levels(), Exactness::Exact),
        };
        let core_set: BTreeMap<Level, usize> =
            core.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let mut faces = Vec::with_capacity(core.len());
        let mut nondeg = Vec::with_capacity(core.len());
        for &lvl in &core {
            let fs = src
                .generators(lvl)
                .into_iter()
                .filter(|(g, _)| !g.is_degeneracy_like())
                .filter_map(|(g, t)| core_set.get(&t).map(|&p| (g, p)))
                .collect();
            faces.push(fs);
            nondeg.push(
                (0..src.cell_count(lvl))
                    .filter(|&c| src.is_nondegenerate(lvl, c))
                    .collect(),
            );
        }
        Ok(Engine { core, core_set, faces, nondeg, exactness })
    }

    fn search(&self, cfg: HomSearch) -> Result<HomSet> {
        let src = cfg.source.clone();
        let tgt = cfg.target.clone();
        let mut state = State {
            value: self
                .core
                .iter()
                .map(|&l| vec![None; src.cell_count(l)])
                .collect(),
            used: self
                .core
                .iter()
                .map(|&l| vec![0usize; tgt.cell_count(l)])
                .collect(),
            trail: Vec::new(),
        };
        // seed pinned values
        let mut ok = true;
        for (&(lvl, c), &v) in &cfg.pinned {
            if let Some(&pos) = self.core_set.get(&lvl) {
                if !self.force(&cfg, &mut state, pos, c, v) {
                    ok = false;
                    break;
                }
            }
        }
        let mut found: Vec<PresheafMap> = Vec::new();
        if ok {
            self.explore(&cfg, &mut state, &mut found)?;
        }
        let mut seen: HashMap<Vec<(Level, Vec<usize>)>, ()> = HashMap::new();
        let mut elements: Vec<PresheafMap> = Vec::new();
        for m in found {
            if seen.insert(m.canonical_key(), ()).is_none() {
                elements.push(m);
            }
        }
        elements.sort_by(|a, b| a.canonical_key().cmp(&b.canonical_key()));
        Ok(HomSet { source: src, target: tgt, elements, exactness: self.exactness })
    }

    /// Force `cell` at core level position `pos` to value `v`; propagate
    /// down faces and degeneracy-witness retractions. Returns false on
    /// conflict. All changes are recorded on the trail.
    fn force(&self, cfg: &HomSearch, st: &mut State, pos: usize, cell: usize, v: usize) -> bool {
        if let Some(cur) = st.value[pos][cell] {
            return cur == v;
        }
        let lvl = self.core[pos];
        if let Some((through, required)) = &cfg.fiber {
            if through.apply(lvl, v) != required.apply(lvl, cell) {
                return false;
            }
        }
        if cfg.bijective {
            if st.used[pos][v] > 0 {
                return false;
            }
            st.used[pos][v] += 1;
        }
        st.value[pos][cell] = Some(v);
        st.trail.push((pos, cell));
        // downward face propagation
        for &(g, tpos) in &self.faces[pos] {
            let sc = cfg.source.apply(lvl, g, cell);
            let tv = cfg.target.apply(lvl, g, v);
            if !self.force(cfg, st, tpos, sc, tv) {
                return false;
            }
        }
        // degeneracy witness: the parent value is determined by a retraction
        if let Some((plvl, pg, pcell)) = cfg.source.degeneracy_parent(lvl, cell) {
            if let Some(&ppos) = self.core_set.get(&plvl) {
                let retracted = match pg {
                    Generator::DegenMain(i) => cfg.target.apply(lvl, Generator::FaceMain(i), v),
                    Generator::DegenSecond(i) => cfg.target.apply(lvl, Generator::FaceSecond(i), v),
                    Generator::VertexToMark => {
                        let e = cfg.target.apply(lvl, Generator::MarkToEdge, v);
                        let edge_lvl = Level { main: MainLevel::Ord(1), second: lvl.second };
                        cfg.target.apply(edge_lvl, Generator::FaceMain(1), e)
                    }
                    _ => unreachable!("parent witness is degeneracy-like"),
                };
                if !self.force(cfg, st, ppos, pcell, retracted) {
                    return false;
                }
                // consistency: the parent's degeneracy must land back on v
                let back = cfg
                    .target
                    .apply(plvl, pg, st.value[ppos][pcell].expect("just forced"));
                if back != v {
                    return false;
                }
            }
        }
        true
    }

    fn unwind(&self, cfg: &HomSearch, st: &mut State, mark: usize) {
        while st.trail.len() > mark {
            let (pos, cell) = st.trail.pop().unwrap();
            if cfg.bijective {
                let v = st.value[pos][cell].unwrap();
                st.used[pos][v] -= 1;
            }
            st.value[pos][cell] = None;
        }
    }

    fn candidates(&self, cfg: &HomSearch, st: &State, pos: usize, cell: usize) -> Vec<usize> {
        let lvl = self.core[pos];
        let mut out = Vec::new();
        'cand: for v in 0..cfg.target.cell_count(lvl) {
            if cfg.bijective && st.used[pos][v] > 0 {
                continue;
            }
            if let Some((through, required)) = &cfg.fiber {
                if through.apply(lvl, v) != required.apply(lvl, cell) {
                    continue;
                }
            }
            for &(g, tpos) in &self.faces[pos] {
                if let Some(fv) = st.value[tpos][cfg.source.apply(lvl, g, cell)] {
                    if cfg.target.apply(lvl, g, v) != fv {
                        continue 'cand;
                    }
                }
            }
            out.push(v);
        }
        out
    }

    /// Pick the unassigned nondegenerate cell with the fewest candidates,
    /// preferring constrained cells; ties break by height then cell id.
    fn pick(&self, cfg: &HomSearch, st: &State) -> Option<(usize, usize, Vec<usize>)> {
        let mut best: Option<(usize, usize, usize, Vec<usize>)> = None;
        for pos in 0..self.core.len() {
            for &cell in &self.nondeg[pos] {
                if st.value[pos][cell].is_some() {
                    continue;
                }
                let lvl = self.core[pos];
                let constrained = self.faces[pos].iter().any(|&(g, tpos)| {
                    st.value[tpos][cfg.source.apply(lvl, g, cell)].is_some()
                }) || cfg.fiber.is_some()
                    || cfg.bijective;
                if !constrained {
                    if best.is_none() {
                        let cands = self.candidates(cfg, st, pos, cell);
                        let n = cands.len();
                        best = Some((n, pos, cell, cands));
                    }
                    continue;
                }
                let cands = self.candidates(cfg, st, pos, cell);
                let n = cands.len();
                match &best {
                    Some((bn, _, _, _)) if *bn <= n => {}
                    _ => best = Some((n, pos, cell, cands)),
                }
                if n == 0 {
                    break;
                }
            }
        }
        best.map(|(_, pos, cell, cands)| (pos, cell, cands))
    }

    fn explore(
        &self,
        cfg: &HomSearch,
        st: &mut State,
        found: &mut Vec<PresheafMap>,
    ) -> Result<()> {
        if cfg.first_only && !found.is_empty() {
            return Ok(());
        }
        match self.pick(cfg, st) {
            None => {
                if let Some(m) = self.extract(cfg, st)? {
                    found.push(m);
                }
                Ok(())
            }
            Some((pos, cell, cands)) => {
                for v in cands {
                    let mark = st.trail.len();
                    if self.force(cfg, st, pos, cell, v) {
                        self.explore(cfg, st, found)?;
                    }
                    self.unwind(cfg, st, mark);
                    if cfg.first_only && !found.is_empty() {
                        return Ok(());
                    }
                }
                Ok(())
            }
        }
    }

    /// Complete a full component table from the assigned nondegenerate core
    /// cells: degenerate cells through their witnesses, levels above the
    /// certificate through unique boundary fillers. The result is validated.
    fn extract(&self, cfg: &HomSearch, st: &State) -> Result<Option<PresheafMap>> {
        let src = &cfg.source;
        let tgt = &cfg.target;
        let mut components: BTreeMap<Level, Vec<usize>> = BTreeMap::new();
        for lvl in src.levels() {
            components.insert(lvl, vec![usize::MAX; src.cell_count(lvl)]);
        }
        // core levels first (height order), then extension levels
        for lvl in src.levels() {
            let n = src.cell_count(lvl);
            if let Some(&pos) = self.core_set.get(&lvl) {
                for c in 0..n {
                    let v = match st.value[pos][c] {
                        Some(v) => v,
                        None => {
                            let (plvl, pg, pc) = src
                                .degeneracy_parent(lvl, c)
                                .expect("unassigned cell must be degenerate");
                            let pv = components[&plvl][pc];
                            debug_assert_ne!(pv, usize::MAX);
                            tgt.apply(plvl, pg, pv)
                        }
                    };
                    components.get_mut(&lvl).unwrap()[c] = v;
                }
            } else {
                // above the certificate: fill degenerates through parents and
                // nondegenerates through the boundary-filler index
                let faces = self.filler_index(tgt, lvl);
                for c in 0..n {
                    let v = if let Some((plvl, pg, pc)) = src.degeneracy_parent(lvl, c) {
                        let pv = components[&plvl][pc];
                        debug_assert_ne!(pv, usize::MAX);
                        tgt.apply(plvl, pg, pv)
                    } else {
                        let key: Vec<usize> = faces
                            .iter()
                            .map(|&(g, flvl)| components[&flvl][src.apply(lvl, g, c)])
                            .collect();
                        match self.filler_lookup(tgt, lvl, &faces, &key) {
                            Some(v) => v,
                            None => return Ok(None),
                        }
                    };
                    components.get_mut(&lvl).unwrap()[c] = v;
                }
            }
        }
        let m = PresheafMap::new(src.clone(), tgt.clone(), components)?;
        if cfg.bijective && !m.is_bijective_levelwise() {
            return Ok(None);
        }
        // constraints at levels outside the search core are checked here
        for (&(lvl, c), &v) in &cfg.pinned {
            if m.apply(lvl, c) != v {
                return Ok(None);
            }
        }
        if let Some((through, required)) = &cfg.fiber {
            for lvl in src.levels() {
                for c in 0..src.cell_count(lvl) {
                    if through.apply(lvl, m.apply(lvl, c)) != required.apply(lvl, c) {
                        return Ok(None);
                    }
                }
            }
        }
        Ok(Some(m))
    }

    /// Face generators used to key unique fillers at an extension level: the
    /// main direction when it exceeds the certificate, else the second.
    fn filler_index(&self, tgt: &TruncatedPresheaf, lvl: Level) -> Vec<(Generator, Level)> {
        let c = tgt.cosk_certificate().expect("extension needs certificate");
        let use_main = match lvl.main {
            MainLevel::Ord(n) => n > c,
            MainLevel::Marked => false,
        };
        tgt.generators(lvl)
            .into_iter()
            .filter(|(g, _)| match g {
                Generator::FaceMain(_) => use_main,
                Generator::FaceSecond(_) => !use_main,
                _ => false,
            })
            .collect()
    }

    fn filler_lookup(
        &self,
        tgt: &TruncatedPresheaf,
        lvl: Level,
        faces: &[(Generator, Level)],
        key: &[usize],
    ) -> Option<usize> {
        for v in 0..tgt.cell_count(lvl) {
            if faces
                .iter()
                .zip(key)
                .all(|(&(g, _), &k)| tgt.apply(lvl, g, v) == k)
            {
                return Some(v);
            }
        }
        None
    }
}

fn face_target(p: &TruncatedPresheaf, lvl: Level, g: Generator) -> Level {
    crate::shape::generator_target(p.shape(), p.dim(), lvl, g).expect("face stays in truncation")
}

struct State {
    value: Vec<Vec<Option<usize>>>,
    used: Vec<Vec<usize>>,
    trail: Vec<(usize, usize)>,
}

/// Cylinder object for mapping spaces, per shape.
fn cylinder(shape: IndexShape, dim: Dim, n: u8) -> Result<PresheafRef> {
    use crate::standard::{build_ref, StandardObjectSpec as Spec};
    match shape {
        IndexShape::Simplex => build_ref(&Spec::Simplex(n), dim),
        IndexShape::BiSimplex => build_ref(&Spec::ConstCol(n), dim),
        IndexShape::MarkedSimplex => build_ref(&Spec::SharpSimplex(n), dim),
        IndexShape::MarkedBiSimplex => Err(Error::Unsupported(
            "mapping spaces of marked bisimplicial objects are out of scope".into(),
        )),
    }
}

/// Map between two products `x × cyl(a) -> x × cyl(b)` induced by post-
/// composing cylinder cells (which are named by their digit strings) with a
/// monotone map `f: [a] -> [b]`.
fn product_cylinder_action(
    prod_src: &PresheafRef,
    prod_tgt: &PresheafRef,
    f: &[u8],
) -> Result<PresheafMap> {
    let mut components = BTreeMap::new();
    for lvl in prod_src.levels() {
        let mut comp = Vec::with_capacity(prod_src.cell_count(lvl));
        for name in prod_src.cells(lvl) {
            let image = rename_last_factor(name, f)?;
            let idx = prod_tgt
                .cell_index(lvl, &image)
                .ok_or_else(|| Error::InvalidMap(format!("cylinder image {image} missing")))?;
            comp.push(idx);
        }
        components.insert(lvl, comp);
    }
    PresheafMap::new(prod_src.clone(), prod_tgt.clone(), components)
}

/// Rewrite the final `|digits)` factor of a nested product cell name by
/// composing with `f`.
fn rename_last_factor(name: &str, f: &[u8]) -> Result<String> {
    let bar = name
        .rfind('|')
        .ok_or_else(|| Error::InvalidMap(format!("not a product cell: {name}")))?;
    let digits = &name[bar + 1..name.len() - 1];
    let g = crate::delta::from_digits(digits)
        .ok_or_else(|| Error::InvalidMap(format!("not a cylinder cell: {digits}")))?;
    let composed = crate::delta::digits(&crate::delta::compose(f, &g));
    Ok(format!("{}|{})", &name[..bar], composed))
}

pub struct MappingSpace {
    /// Simplicial object whose level-n cells name the maps `x × cyl(n) -> y`.
    pub space: PresheafRef,
    /// The actual maps, per level, in cell order.
    pub elements: BTreeMap<u8, Vec<PresheafMap>>,
    pub exactness: Exactness,
}

/// Enriched mapping object: level n is the hom set out of the n-cylinder.
pub fn mapping_space(x: &PresheafRef, y: &PresheafRef, n_max: u8) -> Result<MappingSpace> {
    same_shape_and_dim(x, y)?;
    let shape = x.shape();
    let dim = x.dim();
    let mut level_elements: BTreeMap<u8, Vec<PresheafMap>> = BTreeMap::new();
    let mut level_keys: BTreeMap<u8, HashMap<Vec<(Level, Vec<usize>)>, usize>> = BTreeMap::new();
    let mut products: BTreeMap<u8, PresheafRef> = BTreeMap::new();
    let mut worst = Exactness::Exact;
    for n in 0..=n_max {
        let cyl = cylinder(shape, dim, n)?;
        let prod = crate::ops::product(x, &cyl)?;
        let hom = enumerate_hom(&prod, y)?;
        worst = worse(worst, hom.exactness);
        let mut keys = HashMap::new();
        for (i, m) in hom.elements.iter().enumerate() {
            keys.insert(m.canonical_key(), i);
        }
        level_keys.insert(n, keys);
        level_elements.insert(n, hom.elements);
        products.insert(n, prod);
    }
    // build the simplicial set of maps with pre-composition actions
    let out_dim = Dim::simplicial(n_max);
    let mut builder = crate::presheaf::PresheafBuilder::new(IndexShape::Simplex, out_dim);
    let width = |n: u8| level_elements[&n].len().to_string().len().max(1);
    let name_of = |n: u8, i: usize| format!("f{:0w$}", i, w = width(n));
    for n in 0..=n_max {
        for i in 0..level_elements[&n].len() {
            builder.cell(Level::ord(n), name_of(n, i));
        }
    }
    for n in 0..=n_max {
        for (g, tgt_lvl) in crate::shape::generators_from(IndexShape::Simplex, out_dim, Level::ord(n))
        {
            let tn = match tgt_lvl.main {
                MainLevel::Ord(t) => t,
                MainLevel::Marked => unreachable!(),
            };
            // index map [tn] -> [n] inducing this action
            let f: Vec<u8> = match g {
                Generator::FaceMain(i) => crate::delta::coface(n, i),
                Generator::DegenMain(i) => crate::delta::codegeneracy(n, i),
                _ => unreachable!(),
            };
            // x × cyl(tn) -> x × cyl(n)
            let induced = product_cylinder_action(&products[&tn], &products[&n], &f)?;
            for (i, m) in level_elements[&n].iter().enumerate() {
                let composed = induced.then(m)?;
                let j = *level_keys[&tn]
                    .get(&composed.canonical_key())
                    .ok_or_else(|| Error::InvalidMap("mapping-space action left the hom set".into()))?;
                builder.map(Level::ord(n), g, name_of(n, i), name_of(tn, j));
            }
        }
    }
    let space = Arc::new(builder.build()?);
    Ok(MappingSpace { space, elements: level_elements, exactness: worst })
}

fn worse(a: Exactness, b: Exactness) -> Exactness {
    use Exactness::*;
    match (a, b) {
        (BoundedAt(x), BoundedAt(y)) => BoundedAt(x.min(y)),
        (BoundedAt(x), _) | (_, BoundedAt(x)) => BoundedAt(x),
        (ExactByCoskeletality(x), ExactByCoskeletality(y)) => ExactByCoskeletality(x.max(y)),
        (ExactByCoskeletality(x), _) | (_, ExactByCoskeletality(x)) => ExactByCoskeletality(x),
        _ => Exact,
    }
}

pub struct Exponential {
    pub object: PresheafRef,
    pub elements: BTreeMap<Level, Vec<PresheafMap>>,
    /// Evaluation `object × x -> y`.
    pub evaluation: PresheafMap,
}

/// Internal hom of bisimplicial sets: level `(k, n)` is the set of maps
/// `x × F(k) × Δ[n] -> y` with both cylinder directions representable.
pub fn exponential(x: &PresheafRef, y: &PresheafRef) -> Result<Exponential> {
    use crate::standard::{build_ref, StandardObjectSpec as Spec};
    same_shape_and_dim(x, y)?;
    if x.shape() != IndexShape::BiSimplex {
        return Err(Error::Unsupported("exponential is defined for bisimplicial sets".into()));
    }
    let dim = x.dim();
    let mut elements: BTreeMap<Level, Vec<PresheafMap>> = BTreeMap::new();
    let mut keys: BTreeMap<Level, HashMap<Vec<(Level, Vec<usize>)>, usize>> = BTreeMap::new();
    let mut triples: BTreeMap<Level, PresheafRef> = BTreeMap::new();
    for lvl in crate::shape::levels(IndexShape::BiSimplex, dim) {
        let (k, n) = (ord_of(lvl.main), lvl.second.unwrap());
        let fk = build_ref(&Spec::FGen(k), dim)?;
        let dn = build_ref(&Spec::ConstCol(n), dim)?;
        let xf = crate::ops::product(x, &fk)?;
        let prod = crate::ops::product(&xf, &dn)?;
        let hom = enumerate_hom(&prod, y)?;
        let mut k_map = HashMap::new();
        for (i, m) in hom.elements.iter().enumerate() {
            k_map.insert(m.canonical_key(), i);
        }
        keys.insert(lvl, k_map);
        elements.insert(lvl, hom.elements);
        triples.insert(lvl, prod);
    }
    let width = |lvl: Level| elements[&lvl].len().to_string().len().max(1);
    let name_of = |lvl: Level, i: usize| format!("h{:0w$}", i, w = width(lvl));
    let mut builder = crate::presheaf::PresheafBuilder::new(IndexShape::BiSimplex, dim);
    for (&lvl, els) in &elements {
        for i in 0..els.len() {
            builder.cell(lvl, name_of(lvl, i));
        }
    }
    for (&lvl, els) in &elements {
        let (k, n) = (ord_of(lvl.main), lvl.second.unwrap());
        for (g, tgt_lvl) in crate::shape::generators_from(IndexShape::BiSimplex, dim, lvl) {
            // induced map x × F(tk) × Δ[tn] -> x × F(k) × Δ[n]
            let f_main: Vec<u8> = match g {
                Generator::FaceMain(i) => crate::delta::coface(k, i),
                Generator::DegenMain(i) => crate::delta::codegeneracy(k, i),
                _ => crate::delta::identity(k),
            };
            let f_second: Vec<u8> = match g {
                Generator::FaceSecond(i) => crate::delta::coface(n, i),
                Generator::DegenSecond(i) => crate::delta::codegeneracy(n, i),
                _ => crate::delta::identity(n),
            };
            let induced = triple_action(&triples[&tgt_lvl], &triples[&lvl], &f_main, &f_second)?;
            for (i, m) in els.iter().enumerate() {
                let composed = induced.then(m)?;
                let j = *keys[&tgt_lvl]
                    .get(&composed.canonical_key())
                    .ok_or_else(|| Error::InvalidMap("exponential action left the hom set".into()))?;
                builder.map(lvl, g, name_of(lvl, i), name_of(tgt_lvl, j));
            }
        }
    }
    let object = Arc::new(builder.build()?);
    // evaluation: (y^x) × x -> y at level (k,n): (h, ξ) -> h(ξ, id_k, id_n)
    let (ev_src, p_e, p_x2) = crate::ops::product_with_projections(&object, x)?;
    let mut ev_components: BTreeMap<Level, Vec<usize>> = BTreeMap::new();
    for lvl in ev_src.levels() {
        let (k, n) = (ord_of(lvl.main), lvl.second.unwrap());
        let id_k = crate::delta::digits(&crate::delta::identity(k));
        let id_n = crate::delta::digits(&crate::delta::identity(n));
        let mut comp = Vec::with_capacity(ev_src.cell_count(lvl));
        for c in 0..ev_src.cell_count(lvl) {
            let h_idx = p_e.apply(lvl, c);
            let xi = p_x2.apply(lvl, c);
            let h = &elements[&lvl][h_idx];
            let triple = format!(
                "(({}|{})|{})",
                x.cell_name(lvl, xi),
                id_k,
                id_n
            );
            let cell = h
                .source
                .cell_index(lvl, &triple)
                .ok_or_else(|| Error::InvalidMap("evaluation cell missing".into()))?;
            comp.push(h.apply(lvl, cell));
        }
        ev_components.insert(lvl, comp);
    }
    let evaluation = PresheafMap::new(ev_src, y.clone(), ev_components)?;
    Ok(Exponential { object, elements, evaluation })
}

fn ord_of(m: MainLevel) -> u8 {
    match m {
        MainLevel::Ord(n) => n,
        MainLevel::Marked => panic!("ordinary level expected"),
    }
}

/// Map between nested products `(x × F) × Δ` induced by composing the two
/// representable factors with monotone maps.
fn triple_action(
    prod_src: &PresheafRef,
    prod_tgt: &PresheafRef,
    f_main: &[u8],
    f_second: &[u8],
) -> Result<PresheafMap> {
    let mut components = BTreeMap::new();
    for lvl in prod_src.levels() {
        let mut comp = Vec::with_capacity(prod_src.cell_count(lvl));
        for name in prod_src.cells(lvl) {
            // name = ((x|f)|d)
            let outer = &name[1..name.len() - 1];
            let bar = {
                let mut depth = 0usize;
                let mut at = None;
                for (i, ch) in outer.char_indices() {
                    match ch {
                        '(' => depth += 1,
                        ')' => depth -= 1,
                        '|' if depth == 0 => {
                            at = Some(i);
                            break;
                        }
                        _ => {}
                    }
                }
                at.ok_or_else(|| Error::InvalidMap(format!("not a product cell: {name}")))?
            };
            let left = &outer[..bar];
            let d = &outer[bar + 1..];
            let left_renamed = rename_last_factor(left, f_main)?;
            let d_map = crate::delta::from_digits(d)
                .ok_or_else(|| Error::InvalidMap(format!("not a cylinder cell: {d}")))?;
            let d_renamed = crate::delta::digits(&crate::delta::compose(f_second, &d_map));
            let image = format!("({left_renamed}|{d_renamed})");
            let idx = prod_tgt
                .cell_index(lvl, &image)
                .ok_or_else(|| Error::InvalidMap(format!("triple image {image} missing")))?;
            comp.push(idx);
        }
        components.insert(lvl, comp);
    }
    PresheafMap::new(prod_src.clone(), prod_tgt.clone(), components)
}

pub struct MatchingObject {
    /// The space of maps out of the main-direction boundary.
    pub matching: MappingSpace,
    /// Canonical comparison from the n-th column into the matching space.
    pub canonical: PresheafMap,
}

/// Matching object of a bisimplicial set at main level `n`, with the
/// canonical map from the n-th column.
pub fn matching_object(x: &PresheafRef, n: u8) -> Result<MatchingObject> {
    use crate::standard::{build_ref, StandardObjectSpec as Spec};
    if x.shape() != IndexShape::BiSimplex {
        return Err(Error::Unsupported("matching objects live in bisimplicial sets".into()));
    }
    if n > x.dim().main {
        return Err(Error::BoundExceeded(format!("matching level {n} above bound")));
    }
    let boundary = build_ref(&Spec::FBoundary(n), x.dim())?;
    let d2 = x.dim().second.unwrap();
    let matching = mapping_space(&boundary, x, d2)?;
    let column = crate::ops::fix_main(x, n)?;
    let mut components: BTreeMap<Level, Vec<usize>> = BTreeMap::new();
    for l in 0..=d2 {
        let lvl_col = Level::ord(l);
        let mut comp = Vec::with_capacity(column.cell_count(lvl_col));
        for c in 0..column.cell_count(lvl_col) {
            // ξ in X_{n,l}: induced map boundary × Δ[l] -> x
            let xi = x
                .cell_index(Level::bi(n, l), column.cell_name(lvl_col, c))
                .expect("column cell");
            let (prod, pb, pc) = crate::ops::product_with_projections(
                &boundary,
                &build_ref(&Spec::ConstCol(l), x.dim())?,
            )?;
            let mut m_components: BTreeMap<Level, Vec<usize>> = BTreeMap::new();
            for plvl in prod.levels() {
                let mut pcomp = Vec::with_capacity(prod.cell_count(plvl));
                for pc_idx in 0..prod.cell_count(plvl) {
                    let b_cell = pb.apply(plvl, pc_idx);
                    let t_cell = pc.apply(plvl, pc_idx);
                    let f_main = crate::delta::from_digits(boundary.cell_name(plvl, b_cell)).unwrap();
                    let f_second =
                        crate::delta::from_digits(pc.target.cell_name(plvl, t_cell)).unwrap();
                    let (mid_lvl, mid) = x.act_main_monotone(Level::bi(n, plvl.second.unwrap()), xi, &f_main);
                    let (fin_lvl, fin) = x.act_second_monotone(mid_lvl, mid, &f_second);
                    debug_assert_eq!(fin_lvl, plvl);
                    pcomp.push(fin);
                }
                m_components.insert(plvl, pcomp);
            }
            let induced = PresheafMap::new(prod, x.clone(), m_components)?;
            let idx = matching
                .elements[&l]
                .iter()
                .position(|m| m.canonical_key() == induced.canonical_key())
                .ok_or_else(|| Error::InvalidMap("canonical matching image missing".into()))?;
            comp.push(idx);
        }
        components.insert(lvl_col, comp);
    }
    let canonical = PresheafMap::new(column, matching.space.clone(), components)?;
    Ok(MatchingObject { matching, canonical })
}

/// Relative matching comparison for a map of bisimplicial sets `p: Y -> X`:
/// the induced map from the n-th column of Y into the fiber product of the
/// matching spaces.
pub struct RelativeMatching {
    pub fiber_product: crate::ops::PullbackResult,
    pub comparison: PresheafMap,
}

pub fn relative_matching(p: &PresheafMap, n: u8) -> Result<RelativeMatching> {
    let my = matching_object(&p.source, n)?;
    let mx = matching_object(&p.target, n)?;
    // M_n(p): post-composition with p
    let mut components: BTreeMap<Level, Vec<usize>> = BTreeMap::new();
    for (&l, els) in &my.matching.elements {
        let mut comp = Vec::with_capacity(els.len());
        for m in els {
            let composed = m.then(p)?;
            let idx = mx.matching.elements[&l]
                .iter()
                .position(|m2| m2.canonical_key() == composed.canonical_key())
                .ok_or_else(|| Error::InvalidMap("matching post-composition missing".into()))?;
            comp.push(idx);
        }
        components.insert(Level::ord(l), comp);
    }
    let m_of_p = PresheafMap::new(my.matching.space.clone(), mx.matching.space.clone(), components)?;
    // column map Y_n -> X_n
    let col_y = crate::ops::fix_main(&p.source, n)?;
    let col_x = crate::ops::fix_main(&p.target, n)?;
    let mut col_components: BTreeMap<Level, Vec<usize>> = BTreeMap::new();
    for lvl in col_y.levels() {
        let l = ord_of(lvl.main);
        let mut comp = Vec::with_capacity(col_y.cell_count(lvl));
        for c in 0..col_y.cell_count(lvl) {
            let in_y = p.source.cell_index(Level::bi(n, l), col_y.cell_name(lvl, c)).unwrap();
            let img = p.apply(Level::bi(n, l), in_y);
            comp.push(col_x.cell_index(lvl, p.target.cell_name(Level::bi(n, l), img)).unwrap());
        }
        col_components.insert(lvl, comp);
    }
    let col_p = PresheafMap::new(col_y.clone(), col_x, col_components)?;
    let fiber_product = crate::ops::pullback(&m_of_p, &mx.canonical)?;
    let comparison = crate::ops::pair_into_pullback(&fiber_product, &my.canonical, &col_p)?;
    Ok(RelativeMatching { fiber_product, comparison })
}

/// Coskeletality validator: the boundary-tuple map must be a bijection at
/// every line level above `c`.
pub fn is_coskeletal(x: &PresheafRef, c: u8) -> CheckReport {
    match x.coskeletal_witness(c) {
        None => CheckReport::holds("coskeletal-boundary-bijection", Exactness::Exact),
        Some(w) => CheckReport {
            rule: "coskeletal-boundary-bijection".into(),
            verdict: Verdict::Fails,
            witness: Some(w),
            exactness: Exactness::Exact,
            notes: Vec::new(),
            elapsed: std::time::Duration::ZERO,
        },
    }
}
