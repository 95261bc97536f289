//! The single-swap switched graph `Γ1` and the triangle-spectrum certificate
//! that separates it from the collinearity graph `Γ0`.
//!
//! In `Γ0` a triangle's common neighbourhood has one of two sizes, given by
//! [`gamma0_triangle_values`]. `Γ1` swaps one pair of parallel hyperplanes `Hz`,
//! `Hz′` of `P̃_1` and so contains a triangle `x, y, z` on a line `ℓ` of `Z`
//! with `λ0 − 1 − q^{d−3}` common neighbours, a value `Γ0` never attains.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Graph, GraphError, TriangleSpectrum};
use crate::linalg::{ProjectivePoint, Subspace};
use crate::polar::{PolarError, PolarSpace};
use crate::switching::{SwitchContext, SwitchError, SwitchSpec, VertexClass};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NonIsoError {
    #[error(transparent)]
    Polar(#[from] PolarError),
    #[error(transparent)]
    Switch(#[from] SwitchError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("no {0} found for the recipe")]
    NotFound(&'static str),
    #[error("recipe invariant violated: {0}")]
    Invariant(String),
    #[error("graphs have different orders {0} and {1}")]
    OrderMismatch(usize, usize),
    #[error("the triangle spectra are equal, which says nothing about isomorphism")]
    SpectraEqual,
    #[error("expected witness {expected} does not separate the spectra (distinguishing values: {distinguishing:?})")]
    WrongWitness { expected: u64, distinguishing: Vec<u64> },
}

impl From<crate::linalg::LinalgError> for NonIsoError {
    fn from(e: crate::linalg::LinalgError) -> Self {
        NonIsoError::Polar(e.into())
    }
}

/// The two triangle co-degrees of `Γ0`: `λ0 − 1` for triangles on a line
/// and `q² + q − 2 + q³(q^{d−4+e} + 1)[d−3]` for the others.
pub fn gamma0_triangle_values(space: &PolarSpace) -> Result<(u64, u64), PolarError> {
    let d = space.rank();
    if d < 3 {
        return Err(PolarError::RankTooSmall { d, min: 3 });
    }
    let q = space.q() as u128;
    let lambda = space.srg_params()?.lambda as u128;
    let di = d as i64;
    let second = q * q + q - 2 + q.pow(3) * space.capped(2 * (di - 4) + space.twice_e() as i64, di - 3);
    Ok(((lambda - 1) as u64, second as u64))
}

/// `λ0 − 1 − q^{d−3}`, the co-degree of the recipe triangle in `Γ1`.
pub fn gamma1_value(space: &PolarSpace) -> Result<u64, PolarError> {
    let d = space.rank();
    if d < 3 {
        return Err(PolarError::RankTooSmall { d, min: 3 });
    }
    let lambda = space.srg_params()?.lambda;
    Ok(lambda - 1 - space.q().pow(d as u32 - 3))
}

/// Whether the `Γ1` value differs from both `Γ0` values.
pub fn values_separate(space: &PolarSpace) -> Result<bool, PolarError> {
    let (a, b) = gamma0_triangle_values(space)?;
    let c = gamma1_value(space)?;
    Ok(c != a && c != b)
}

/// The configuration that defines `Γ1`, always on the first generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gamma1Recipe {
    pub generator: usize,
    pub pi: Subspace,
    pub ell: Subspace,
    pub points: [ProjectivePoint; 3],
    /// Vertex indices of `x, y, z`.
    pub triple: [usize; 3],
    pub hx: Subspace,
    pub hy: Subspace,
    pub hz: Subspace,
    pub hz_prime: Subspace,
}

fn invariant(ok: bool, what: &str) -> Result<(), NonIsoError> {
    if ok {
        Ok(())
    } else {
        Err(NonIsoError::Invariant(what.to_string()))
    }
}

/// Deterministic search for `π, ℓ, x, y, z, Hz′` on `P_1` and checks of the
/// facts the certificate relies on.
///
/// `π` is the first (d−2)-subspace of `P_1` not in `L`; `ℓ` the first
/// totally isotropic 2-space of `π^⊥` meeting `P_1` trivially; `x, y, z`
/// the first three points of `ℓ`; `Hz′` the first hyperplane parallel to
/// `Hz` other than `Hz`. "First" is the order of RREF bases.
pub fn find_gamma1_recipe(ctx: &SwitchContext) -> Result<Gamma1Recipe, NonIsoError> {
    let space = ctx.space();
    let d = space.rank();
    if d < 3 {
        return Err(PolarError::RankTooSmall { d, min: 3 }.into());
    }
    let field = space.field();
    let generator = 0;
    let p1 = &ctx.generators()[generator];
    let l = ctx.l();

    let mut pi = None;
    for s in p1.subspaces(field, d - 2)? {
        if !l.contains_subspace(field, &s)? {
            pi = Some(s);
            break;
        }
    }
    let pi = pi.ok_or(NonIsoError::NotFound("(d-2)-space of P_1 outside L"))?;

    let pi_perp = space.perp(&pi)?;
    let mut ell = None;
    for s in pi_perp.subspaces(field, 2)? {
        if s.meet(field, p1)?.dim() == 0 && space.is_isotropic(&s)? {
            ell = Some(s);
            break;
        }
    }
    let ell = ell.ok_or(NonIsoError::NotFound("isotropic line in pi^perp missing P_1"))?;

    let ell_points = ell.points(field)?;
    let points: [ProjectivePoint; 3] = [
        ell_points[0].clone(),
        ell_points[1].clone(),
        ell_points[2].clone(),
    ];
    let mut triple = [0; 3];
    for (slot, p) in triple.iter_mut().zip(&points) {
        *slot = ctx
            .point_index(p.rep())
            .ok_or_else(|| NonIsoError::Invariant("point of ell is not isotropic".into()))?;
    }
    for p in &ell_points {
        let v = ctx
            .point_index(p.rep())
            .ok_or_else(|| NonIsoError::Invariant("point of ell is not isotropic".into()))?;
        invariant(ctx.partition().classes[v] == VertexClass::InZ, "ell lies in Z")?;
    }

    let h = |p: &ProjectivePoint| -> Result<Subspace, NonIsoError> {
        Ok(space.perp_of_vector(p.rep())?.meet(field, p1)?)
    };
    let (hx, hy, hz) = (h(&points[0])?, h(&points[1])?, h(&points[2])?);
    invariant(
        hx != hy && hy != hz && hx != hz,
        "Hx, Hy, Hz pairwise distinct",
    )?;
    invariant(
        hx.meet(field, &hy)?.meet(field, &hz)? == pi,
        "Hx ∩ Hy ∩ Hz = pi",
    )?;

    let table = &ctx.tables()[generator];
    let (class, slot) = table
        .locate(&hz)
        .ok_or_else(|| NonIsoError::Invariant("Hz is an affine hyperplane of P_1".into()))?;
    let hz_prime = table.classes[class]
        .hyperplanes
        .iter()
        .enumerate()
        .find(|&(s, _)| s != slot)
        .map(|(_, h)| h.clone())
        .ok_or(NonIsoError::NotFound("hyperplane parallel to Hz"))?;
    invariant(hz_prime != *l, "Hz' differs from L")?;
    let triple_meet = hx.meet(field, &hy)?.meet(field, &hz_prime)?;
    invariant(
        l.contains_subspace(field, &triple_meet)?,
        "Hx ∩ Hy ∩ Hz' has no affine point",
    )?;

    Ok(Gamma1Recipe {
        generator,
        pi,
        ell,
        points,
        triple,
        hx,
        hy,
        hz,
        hz_prime,
    })
}

impl Gamma1Recipe {
    /// The swap of `Hz` and `Hz′`, identity elsewhere.
    pub fn spec(&self, ctx: &SwitchContext) -> Result<SwitchSpec, NonIsoError> {
        Ok(ctx.sigma_single_swap(self.generator, &self.hz, &self.hz_prime)?)
    }

    pub fn report(&self) -> String {
        let mut out = String::new();
        let rows = |s: &Subspace| {
            s.basis()
                .iter()
                .map(|r| format_vector(r))
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(out, "recipe on generator {}", self.generator).unwrap();
        writeln!(out, "  pi      {}", rows(&self.pi)).unwrap();
        writeln!(out, "  ell     {}", rows(&self.ell)).unwrap();
        for (name, (p, v)) in ["x", "y", "z"].iter().zip(self.points.iter().zip(self.triple)) {
            writeln!(out, "  {name}       vertex {v} {}", format_vector(p.rep())).unwrap();
        }
        writeln!(out, "  Hz      {}", rows(&self.hz)).unwrap();
        writeln!(out, "  Hz'     {}", rows(&self.hz_prime)).unwrap();
        out
    }
}

/// `Γ1` together with the recipe that defines it.
pub fn build_gamma1(ctx: &SwitchContext) -> Result<(Graph, Gamma1Recipe), NonIsoError> {
    let recipe = find_gamma1_recipe(ctx)?;
    let graph = ctx.build_switched_graph(&recipe.spec(ctx)?)?;
    Ok((graph, recipe))
}

/// A triangle co-degree occurring in exactly one of two graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonIsoCertificate {
    pub spectrum0: TriangleSpectrum,
    pub spectrum1: TriangleSpectrum,
    pub witness_value: u64,
    /// 0 or 1: the graph whose spectrum contains the witness value.
    pub witness_graph: usize,
    pub witness_triple: [usize; 3],
}

/// Co-degrees in exactly one of the two spectra, ascending.
pub fn distinguishing_values(s0: &TriangleSpectrum, s1: &TriangleSpectrum) -> Vec<u64> {
    let mut out: Vec<u64> = s0
        .support()
        .into_iter()
        .filter(|v| !s1.contains(*v))
        .chain(s1.support().into_iter().filter(|v| !s0.contains(*v)))
        .collect();
    out.sort_unstable();
    out
}

/// Separates `g0` and `g1` by their triangle spectra.
///
/// With `expected`, that value must be a distinguishing one. A `hint` triple
/// is used as the witness when it is a triangle with the right co-degree in
/// the graph that has it; otherwise the first such triangle is searched.
/// Equal spectra give [`NonIsoError::SpectraEqual`], which says nothing
/// about isomorphism.
pub fn certify_noniso(
    g0: &Graph,
    g1: &Graph,
    expected: Option<u64>,
    hint: Option<[usize; 3]>,
) -> Result<NonIsoCertificate, NonIsoError> {
    if g0.order() != g1.order() {
        return Err(NonIsoError::OrderMismatch(g0.order(), g1.order()));
    }
    let spectrum0 = g0.triangle_spectrum()?;
    let spectrum1 = g1.triangle_spectrum()?;
    let distinguishing = distinguishing_values(&spectrum0, &spectrum1);
    if distinguishing.is_empty() {
        return Err(NonIsoError::SpectraEqual);
    }
    let witness_value = match expected {
        Some(v) if distinguishing.contains(&v) => v,
        Some(v) => {
            return Err(NonIsoError::WrongWitness {
                expected: v,
                distinguishing,
            })
        }
        None => distinguishing[0],
    };
    let witness_graph = if spectrum1.contains(witness_value) { 1 } else { 0 };
    let g = if witness_graph == 1 { g1 } else { g0 };
    let hinted = hint.filter(|&[a, b, c]| {
        a.max(b).max(c) < g.order()
            && g.has_edge(a, b)
            && g.has_edge(b, c)
            && g.has_edge(a, c)
            && g.common_neighbors(&[a, b, c]).ok() == Some(witness_value as usize)
    });
    let witness_triple = match hinted {
        Some(t) => t,
        None => g
            .find_triangle_with(witness_value as usize)
            .ok_or_else(|| NonIsoError::Invariant("spectrum value without a triangle".into()))?,
    };
    Ok(NonIsoCertificate {
        spectrum0,
        spectrum1,
        witness_value,
        witness_graph,
        witness_triple,
    })
}

impl NonIsoCertificate {
    /// Text report; `labels` adds coordinates for the witness vertices.
    pub fn report(&self, labels: Option<&[ProjectivePoint]>) -> String {
        let mut out = String::new();
        writeln!(out, "result: non-isomorphic").unwrap();
        writeln!(out, "spectrum G0: {}", self.spectrum0).unwrap();
        writeln!(out, "spectrum G1: {}", self.spectrum1).unwrap();
        writeln!(
            out,
            "witness value: {} (only in G{})",
            self.witness_value, self.witness_graph
        )
        .unwrap();
        let [a, b, c] = self.witness_triple;
        writeln!(out, "witness triple: {a} {b} {c}").unwrap();
        if let Some(labels) = labels {
            for v in self.witness_triple {
                if let Some(p) = labels.get(v) {
                    writeln!(out, "  {v} = {}", format_vector(p.rep())).unwrap();
                }
            }
        }
        out
    }
}

fn format_vector(v: &[crate::gf::FieldElement]) -> String {
    let parts: Vec<String> = v.iter().map(|e| e.index().to_string()).collect();
    format!("({})", parts.join(","))
}
