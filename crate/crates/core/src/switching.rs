//! Subgeometry switching of a polar space collinearity graph.
//!
//! Fix an isotropic (d−1)-space `L` and the `q^e + 1` generators `P_i`
//! through it. Every isotropic point is in `L`, in exactly one affine part
//! `P̃_i = P_i ∖ L`, or in `Z` (the points outside `L^⊥`). For `z ∈ Z`,
//! `z^⊥ ∩ P_i` is a hyperplane of `P_i` other than `L`, i.e. an affine
//! hyperplane of `P̃_i`. The switched graph joins `z` to the points of
//! `σ_i(z^⊥ ∩ P_i)` instead, where each `σ_i` permutes the hyperplanes of
//! `P̃_i` inside their parallel classes; every other pair keeps its
//! collinearity adjacency.
//!
//! A permutation is stored per parallel class as a map on the class's `q`
//! slots, so parallel classes are preserved by construction.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::linalg::{dot, LinalgError, ProjectivePoint, Subspace, Vector};
use crate::polar::{PolarError, PolarKind, PolarSpace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SwitchError {
    #[error(transparent)]
    Polar(#[from] PolarError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid L: {0}")]
    BadL(String),
    #[error("generator index {index} out of range ({count} generators)")]
    GeneratorOutOfRange { index: usize, count: usize },
    #[error("subspace is not an affine hyperplane of generator {generator}")]
    UnknownHyperplane { generator: usize },
    #[error("hyperplanes lie in different parallel classes")]
    NotParallel,
    #[error("a swap needs two distinct hyperplanes")]
    SameHyperplane,
    #[error("complement switching needs q = 2, got q = {0}")]
    ComplementNeedsQ2(u64),
    #[error("invalid permutation for generator {generator}, class {class}: {perm:?}")]
    InvalidPermutation {
        generator: usize,
        class: usize,
        perm: Vec<usize>,
    },
    #[error("switch spec does not match this setting: {0}")]
    SpecMismatch(String),
    #[error("vertex {vertex} sees {count} of the {size} vertices of the switching set")]
    NotSwitchingSet {
        vertex: usize,
        count: usize,
        size: usize,
    },
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

/// Where a point sits relative to `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexClass {
    InL,
    /// In `P̃_i` for the given generator index.
    InPtilde(usize),
    InZ,
}

#[derive(Clone, Debug)]
pub struct VertexPartition {
    pub classes: Vec<VertexClass>,
    pub l_points: Vec<usize>,
    pub ptilde: Vec<Vec<usize>>,
    pub z: Vec<usize>,
}

/// The `q` affine hyperplanes sharing one hyperplane of `L` at infinity.
#[derive(Clone, Debug)]
pub struct ParallelClass {
    /// `H ∩ L`, a (d−2)-space.
    pub key: Subspace,
    pub hyperplanes: Vec<Subspace>,
    /// Vertices of `P̃_i` on each hyperplane, aligned with `hyperplanes`.
    pub members: Vec<Vec<usize>>,
}

/// The affine hyperplanes of one `P̃_i`, grouped into parallel classes.
#[derive(Clone, Debug)]
pub struct AffineTable {
    pub generator: Subspace,
    /// Vertices of `P̃_i`.
    pub points: Vec<usize>,
    pub classes: Vec<ParallelClass>,
    /// `incidence[a][c]`: slot of the hyperplane in class `c` through `points[a]`.
    pub incidence: Vec<Vec<usize>>,
    lookup: HashMap<Subspace, (usize, usize)>,
}

impl AffineTable {
    /// `(class, slot)` of an affine hyperplane of this generator.
    pub fn locate(&self, h: &Subspace) -> Option<(usize, usize)> {
        self.lookup.get(h).copied()
    }
}

/// How a set of permutations was chosen; recorded in every output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SigmaSource {
    Identity,
    /// Uniform per-class permutations from ChaCha8 seeded with `seed`.
    Random { seed: u64 },
    /// A single transposition inside one class of one generator.
    Swap {
        generator: usize,
        class: usize,
        slots: (usize, usize),
    },
    /// `σ(H) = P̃_i ∖ H`, available for q = 2.
    Complement,
    Custom,
}

impl fmt::Display for SigmaSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaSource::Identity => write!(f, "identity"),
            SigmaSource::Random { seed } => write!(f, "random {seed}"),
            SigmaSource::Swap {
                generator,
                class,
                slots,
            } => write!(f, "swap {generator} {class} {} {}", slots.0, slots.1),
            SigmaSource::Complement => write!(f, "complement"),
            SigmaSource::Custom => write!(f, "custom"),
        }
    }
}

/// The data `(L, σ_1, …, σ_{q^e+1})` of one switched graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwitchSpec {
    pub kind: PolarKind,
    pub q: u64,
    pub d: usize,
    pub l: Subspace,
    /// `sigmas[i][c][s]`: the slot that slot `s` of class `c` in `P̃_i` maps to.
    pub sigmas: Vec<Vec<Vec<usize>>>,
    pub source: SigmaSource,
}

impl SwitchSpec {
    pub fn is_identity(&self) -> bool {
        self.sigmas
            .iter()
            .flatten()
            .all(|perm| perm.iter().enumerate().all(|(a, &b)| a == b))
    }
}

/// Everything derived from a polar space and a choice of `L`: the vertex
/// order, the collinearity graph, the partition, and the affine tables.
#[derive(Clone, Debug)]
pub struct SwitchContext {
    space: PolarSpace,
    points: Vec<ProjectivePoint>,
    index: HashMap<Vector, usize>,
    l: Subspace,
    generators: Vec<Subspace>,
    partition: VertexPartition,
    tables: Vec<AffineTable>,
    /// `z_slots[a][i]`: `(class, slot)` of `z^⊥ ∩ P_i` for `z = partition.z[a]`.
    z_slots: Vec<Vec<(usize, usize)>>,
    collinearity: Graph,
}

/// The collinearity graph on the isotropic points in enumeration order.
pub fn collinearity_graph(space: &PolarSpace) -> Result<Graph, PolarError> {
    let points = space.isotropic_points()?;
    Ok(collinearity_on(space, &points))
}

fn collinearity_on(space: &PolarSpace, points: &[ProjectivePoint]) -> Graph {
    let field = space.field();
    let eqs: Vec<Vector> = points.iter().map(|p| space.perp_equation(p.rep())).collect();
    Graph::from_fn(points.len(), |i, j| dot(field, &eqs[i], points[j].rep()).is_zero())
        .with_labels(points.to_vec())
}

fn uniform_below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    let limit = (u64::MAX / bound) * bound;
    loop {
        let x = rng.next_u64();
        if x < limit {
            return x % bound;
        }
    }
}

impl SwitchContext {
    /// Uses the default `L`: greedy extension from the first isotropic point.
    pub fn canonical(space: PolarSpace) -> Result<Self, SwitchError> {
        let d = space.rank();
        if d < 2 {
            return Err(SwitchError::BadL(format!("rank {d} has no (d-1)-space to switch on")));
        }
        let l = space.canonical_isotropic(d - 1)?;
        Self::new(space, l)
    }

    pub fn new(space: PolarSpace, l: Subspace) -> Result<Self, SwitchError> {
        let d = space.rank();
        if l.ambient_dim() != space.ambient_dim() {
            return Err(SwitchError::BadL(format!(
                "ambient dimension {} instead of {}",
                l.ambient_dim(),
                space.ambient_dim()
            )));
        }
        if l.dim() + 1 != d {
            return Err(SwitchError::BadL(format!(
                "dimension {} instead of {}",
                l.dim(),
                d - 1
            )));
        }
        if !space.is_isotropic(&l)? {
            return Err(SwitchError::BadL("not totally isotropic".into()));
        }
        let field = space.field().clone();
        let points = space.isotropic_points()?;
        let index: HashMap<Vector, usize> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.rep().to_vec(), i))
            .collect();
        let generators = space.generators_through(&l)?;
        let expected = space.generators_per_hyperplane();
        if generators.len() as u128 != expected {
            return Err(SwitchError::Inconsistent(format!(
                "found {} generators through L, expected {expected}",
                generators.len()
            )));
        }

        let partition = partition_vertices(&space, &points, &l, &generators)?;

        let mut tables = Vec::with_capacity(generators.len());
        for (i, g) in generators.iter().enumerate() {
            tables.push(build_affine_table(&space, &l, g, &partition.ptilde[i], &points)?);
        }

        let z_slots = partition
            .z
            .par_iter()
            .map(|&z| {
                generators
                    .iter()
                    .zip(&tables)
                    .enumerate()
                    .map(|(i, (g, table))| {
                        let h = space.perp_of_vector(points[z].rep())?.meet(&field, g)?;
                        if h == l {
                            return Err(SwitchError::Inconsistent(format!(
                                "vertex {z} of Z is perpendicular to L"
                            )));
                        }
                        table.locate(&h).ok_or_else(|| {
                            SwitchError::Inconsistent(format!(
                                "z^perp ∩ P_{i} for vertex {z} is not in the affine table"
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;

        let collinearity = collinearity_on(&space, &points);
        Ok(SwitchContext {
            space,
            points,
            index,
            l,
            generators,
            partition,
            tables,
            z_slots,
            collinearity,
        })
    }

    pub fn space(&self) -> &PolarSpace {
        &self.space
    }

    pub fn points(&self) -> &[ProjectivePoint] {
        &self.points
    }

    pub fn point_index(&self, v: &[crate::gf::FieldElement]) -> Option<usize> {
        let p = ProjectivePoint::new(self.space.field(), v)?;
        self.index.get(p.rep()).copied()
    }

    pub fn l(&self) -> &Subspace {
        &self.l
    }

    pub fn generators(&self) -> &[Subspace] {
        &self.generators
    }

    pub fn partition(&self) -> &VertexPartition {
        &self.partition
    }

    pub fn tables(&self) -> &[AffineTable] {
        &self.tables
    }

    /// The collinearity graph `Γ0`.
    pub fn collinearity(&self) -> &Graph {
        &self.collinearity
    }

    /// `L^⊥ ∖ L`, the union of the affine parts.
    pub fn switching_set(&self) -> Vec<usize> {
        let mut y: Vec<usize> = self.partition.ptilde.iter().flatten().copied().collect();
        y.sort_unstable();
        y
    }

    /// `(class, slot)` of `z^⊥ ∩ P_i` for a vertex `z ∈ Z`.
    pub fn hyperplane_of(&self, z: usize, generator: usize) -> Option<(usize, usize)> {
        let a = self.partition.z.binary_search(&z).ok()?;
        self.z_slots[a].get(generator).copied()
    }

    fn blank_spec(&self, source: SigmaSource) -> SwitchSpec {
        let q = self.space.q() as usize;
        SwitchSpec {
            kind: self.space.kind(),
            q: self.space.q(),
            d: self.space.rank(),
            l: self.l.clone(),
            sigmas: self
                .tables
                .iter()
                .map(|t| vec![(0..q).collect(); t.classes.len()])
                .collect(),
            source,
        }
    }

    /// All `σ_i` trivial; builds `Γ0`.
    pub fn sigma_identity(&self) -> SwitchSpec {
        self.blank_spec(SigmaSource::Identity)
    }

    /// Independent uniform permutations per class, drawn by Fisher–Yates
    /// from ChaCha8 seeded with `seed` (generators, then classes, in order).
    pub fn sigma_random(&self, seed: u64) -> SwitchSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut spec = self.blank_spec(SigmaSource::Random { seed });
        for perm in spec.sigmas.iter_mut().flatten() {
            for i in (1..perm.len()).rev() {
                let j = uniform_below(&mut rng, i as u64 + 1) as usize;
                perm.swap(i, j);
            }
        }
        spec
    }

    /// Swaps the parallel hyperplanes `h` and `h2` of `P̃_generator`.
    pub fn sigma_single_swap(
        &self,
        generator: usize,
        h: &Subspace,
        h2: &Subspace,
    ) -> Result<SwitchSpec, SwitchError> {
        let table = self.tables.get(generator).ok_or(SwitchError::GeneratorOutOfRange {
            index: generator,
            count: self.tables.len(),
        })?;
        let (c1, s1) = table
            .locate(h)
            .ok_or(SwitchError::UnknownHyperplane { generator })?;
        let (c2, s2) = table
            .locate(h2)
            .ok_or(SwitchError::UnknownHyperplane { generator })?;
        if c1 != c2 {
            return Err(SwitchError::NotParallel);
        }
        if s1 == s2 {
            return Err(SwitchError::SameHyperplane);
        }
        let mut spec = self.blank_spec(SigmaSource::Swap {
            generator,
            class: c1,
            slots: (s1.min(s2), s1.max(s2)),
        });
        spec.sigmas[generator][c1].swap(s1, s2);
        Ok(spec)
    }

    /// Each hyperplane maps to its complement in `P̃_i`; q = 2 only.
    pub fn sigma_complement(&self) -> Result<SwitchSpec, SwitchError> {
        if self.space.q() != 2 {
            return Err(SwitchError::ComplementNeedsQ2(self.space.q()));
        }
        let mut spec = self.blank_spec(SigmaSource::Complement);
        for perm in spec.sigmas.iter_mut().flatten() {
            perm.swap(0, 1);
        }
        Ok(spec)
    }

    /// Rebuilds the permutations named by `source`; `Custom` has none.
    pub fn sigma_from_source(&self, source: &SigmaSource) -> Result<SwitchSpec, SwitchError> {
        match source {
            SigmaSource::Identity => Ok(self.sigma_identity()),
            SigmaSource::Random { seed } => Ok(self.sigma_random(*seed)),
            SigmaSource::Complement => self.sigma_complement(),
            SigmaSource::Swap {
                generator,
                class,
                slots,
            } => {
                let table = self.tables.get(*generator).ok_or(SwitchError::GeneratorOutOfRange {
                    index: *generator,
                    count: self.tables.len(),
                })?;
                let unknown = SwitchError::UnknownHyperplane {
                    generator: *generator,
                };
                let hs = &table.classes.get(*class).ok_or(unknown.clone())?.hyperplanes;
                match (hs.get(slots.0), hs.get(slots.1)) {
                    (Some(a), Some(b)) => self.sigma_single_swap(*generator, a, b),
                    _ => Err(unknown),
                }
            }
            SigmaSource::Custom => Err(SwitchError::SpecMismatch(
                "custom source needs explicit permutations".into(),
            )),
        }
    }

    /// Checks that `spec` belongs to this setting and holds permutations.
    pub fn validate(&self, spec: &SwitchSpec) -> Result<(), SwitchError> {
        let space = &self.space;
        if (spec.kind, spec.q, spec.d) != (space.kind(), space.q(), space.rank()) {
            return Err(SwitchError::SpecMismatch(format!(
                "spec is for {}, context is {}",
                spec.kind.label(spec.d, spec.q),
                space.label()
            )));
        }
        if spec.l != self.l {
            return Err(SwitchError::SpecMismatch("different L".into()));
        }
        if spec.sigmas.len() != self.tables.len() {
            return Err(SwitchError::SpecMismatch(format!(
                "{} generator permutations, expected {}",
                spec.sigmas.len(),
                self.tables.len()
            )));
        }
        let q = space.q() as usize;
        for (i, (perms, table)) in spec.sigmas.iter().zip(&self.tables).enumerate() {
            if perms.len() != table.classes.len() {
                return Err(SwitchError::SpecMismatch(format!(
                    "generator {i} has {} classes, expected {}",
                    perms.len(),
                    table.classes.len()
                )));
            }
            for (c, perm) in perms.iter().enumerate() {
                let mut seen = vec![false; q];
                let ok = perm.len() == q
                    && perm.iter().all(|&s| s < q && !std::mem::replace(&mut seen[s], true));
                if !ok {
                    return Err(SwitchError::InvalidPermutation {
                        generator: i,
                        class: c,
                        perm: perm.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// The switched graph `Γ(L, σ_1, …)` on the isotropic points.
    pub fn build_switched_graph(&self, spec: &SwitchSpec) -> Result<Graph, SwitchError> {
        self.validate(spec)?;
        let mut g = self.collinearity.clone();
        for (a, &z) in self.partition.z.iter().enumerate() {
            for (i, table) in self.tables.iter().enumerate() {
                let (class, slot) = self.z_slots[a][i];
                let target = &table.classes[class].members[spec.sigmas[i][class][slot]];
                for &x in &table.points {
                    g.set_edge(z, x, false)?;
                }
                for &x in target {
                    g.set_edge(z, x, true)?;
                }
            }
        }
        Ok(g)
    }
}

/// Classifies every point as in `L`, in some `P̃_i`, or in `Z`.
pub fn partition_vertices(
    space: &PolarSpace,
    points: &[ProjectivePoint],
    l: &Subspace,
    generators: &[Subspace],
) -> Result<VertexPartition, SwitchError> {
    let field = space.field();
    let l_perp = space.perp(l)?;
    let mut classes = Vec::with_capacity(points.len());
    let mut l_points = Vec::new();
    let mut ptilde = vec![Vec::new(); generators.len()];
    let mut z = Vec::new();
    for (idx, p) in points.iter().enumerate() {
        let class = if l.contains(field, p.rep())? {
            l_points.push(idx);
            VertexClass::InL
        } else if let Some(i) = generators
            .iter()
            .position(|g| g.contains(field, p.rep()).unwrap_or(false))
        {
            ptilde[i].push(idx);
            VertexClass::InPtilde(i)
        } else {
            if l_perp.contains(field, p.rep())? {
                return Err(SwitchError::Inconsistent(format!(
                    "point {idx} lies in L^perp but on no generator through L"
                )));
            }
            z.push(idx);
            VertexClass::InZ
        };
        classes.push(class);
    }
    let q = space.q() as u128;
    let d = space.rank() as i64;
    let affine = q.pow(d as u32 - 1);
    if l_points.len() as u128 != crate::linalg::gaussm(d - 1, space.q())
        || ptilde.iter().any(|p| p.len() as u128 != affine)
    {
        return Err(SwitchError::Inconsistent(format!(
            "partition sizes |L| = {}, |P~_i| = {:?}",
            l_points.len(),
            ptilde.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    Ok(VertexPartition {
        classes,
        l_points,
        ptilde,
        z,
    })
}

/// Hyperplanes of the generator `g` other than `l`, grouped by `H ∩ l`.
pub fn build_affine_table(
    space: &PolarSpace,
    l: &Subspace,
    g: &Subspace,
    affine_points: &[usize],
    points: &[ProjectivePoint],
) -> Result<AffineTable, SwitchError> {
    let field = space.field();
    let mut grouped: BTreeMap<Subspace, Vec<Subspace>> = BTreeMap::new();
    for h in g.hyperplanes(field)? {
        if h == *l {
            continue;
        }
        grouped.entry(h.meet(field, l)?).or_default().push(h);
    }
    let q = space.q() as usize;
    let mut classes = Vec::with_capacity(grouped.len());
    let mut lookup = HashMap::new();
    for (c, (key, hyperplanes)) in grouped.into_iter().enumerate() {
        if hyperplanes.len() != q {
            return Err(SwitchError::Inconsistent(format!(
                "parallel class of size {} instead of {q}",
                hyperplanes.len()
            )));
        }
        let mut members = Vec::with_capacity(q);
        for (s, h) in hyperplanes.iter().enumerate() {
            let mut on = Vec::new();
            for &x in affine_points {
                if h.contains(field, points[x].rep())? {
                    on.push(x);
                }
            }
            members.push(on);
            lookup.insert(h.clone(), (c, s));
        }
        classes.push(ParallelClass {
            key,
            hyperplanes,
            members,
        });
    }
    let mut incidence = Vec::with_capacity(affine_points.len());
    for &x in affine_points {
        let mut row = Vec::with_capacity(classes.len());
        for class in &classes {
            let slots: Vec<usize> = (0..q).filter(|&s| class.members[s].contains(&x)).collect();
            if slots.len() != 1 {
                return Err(SwitchError::Inconsistent(format!(
                    "affine point {x} lies on {} hyperplanes of one parallel class",
                    slots.len()
                )));
            }
            row.push(slots[0]);
        }
        incidence.push(row);
    }
    Ok(AffineTable {
        generator: g.clone(),
        points: affine_points.to_vec(),
        classes,
        incidence,
        lookup,
    })
}

/// Godsil–McKay switching with respect to the vertex set `y`.
///
/// `y` must induce a regular subgraph and every other vertex must see none,
/// half, or all of `y`; vertices seeing exactly half get their adjacency to
/// `y` complemented.
pub fn gm_switch(graph: &Graph, y: &[usize]) -> Result<Graph, SwitchError> {
    let n = graph.order();
    let mut in_y = vec![false; n];
    for &v in y {
        if v >= n {
            return Err(GraphError::VertexOutOfRange { vertex: v, n }.into());
        }
        in_y[v] = true;
    }
    let size = in_y.iter().filter(|&&b| b).count();
    let inside_degree = |v: usize| y.iter().filter(|&&u| graph.has_edge(u, v)).count();
    if let Some(&first) = y.first() {
        let k = inside_degree(first);
        if let Some(&v) = y.iter().find(|&&v| inside_degree(v) != k) {
            return Err(SwitchError::NotSwitchingSet {
                vertex: v,
                count: inside_degree(v),
                size,
            });
        }
    }
    let mut out = graph.clone();
    for v in (0..n).filter(|&v| !in_y[v]) {
        let count = inside_degree(v);
        if count == 0 || count == size {
            continue;
        }
        if 2 * count != size {
            return Err(SwitchError::NotSwitchingSet {
                vertex: v,
                count,
                size,
            });
        }
        for &u in y {
            out.set_edge(u, v, !graph.has_edge(u, v))?;
        }
    }
    Ok(out)
}
