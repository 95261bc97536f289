//! Checks shared by the lemma tests and the acceptance target.
//!
//! Each check returns the number of instances examined, or a description of
//! the first violation.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rayon::prelude::*;

use polar_srg::noniso::find_gamma1_recipe;
use polar_srg::{PolarKind, PolarSpace, ProjectivePoint, Subspace, SwitchContext};

pub type Check = Result<usize, String>;

pub fn fail<T>(what: impl Into<String>) -> Result<T, String> {
    Err(what.into())
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// The smallest rank-3 space of each kind.
pub fn small_rank3() -> Vec<PolarSpace> {
    [
        (PolarKind::OPlus, 2),
        (PolarKind::OOdd, 2),
        (PolarKind::OMinus, 2),
        (PolarKind::Sp, 2),
        (PolarKind::UEven, 4),
        (PolarKind::UOdd, 4),
    ]
    .into_iter()
    .map(|(k, q)| PolarSpace::new(k, q, 3).unwrap())
    .collect()
}

/// All isotropic lines, sorted.
pub fn isotropic_lines(space: &PolarSpace, points: &[ProjectivePoint]) -> Result<Vec<Subspace>, String> {
    let field = space.field();
    let mut lines = BTreeSet::new();
    for p in points {
        for r in space.isotropic_points_in(&space.perp_of_vector(p.rep()).map_err(e)?).map_err(e)? {
            if r != *p {
                lines.insert(p.to_subspace().join_vector(field, r.rep()).map_err(e)?);
            }
        }
    }
    Ok(lines.into_iter().collect())
}

/// Greedy extension from a point always stops at dimension d.
pub fn lemma_max_dim(space: &PolarSpace, p: &ProjectivePoint) -> Check {
    let g = space
        .extend_greedily(&p.to_subspace(), space.ambient_dim())
        .map_err(e)?;
    if g.dim() != space.rank() {
        return fail(format!("maximal isotropic space of dimension {} from {:?}", g.dim(), p));
    }
    if !space.is_isotropic(&g).map_err(e)? {
        return fail("greedy extension is not isotropic");
    }
    Ok(1)
}

/// A (d−1)-space lies on q^e + 1 generators, and `L^⊥ ∖ L` has
/// (q^e + 1)·q^{d−1} isotropic points.
pub fn lemma_generators(space: &PolarSpace, l: &Subspace) -> Check {
    let gens = space.generators_through(l).map_err(e)?;
    let expected = space.generators_per_hyperplane();
    if gens.len() as u128 != expected {
        return fail(format!("{} generators through a (d-1)-space, expected {expected}", gens.len()));
    }
    let field = space.field();
    let mut outside = 0u128;
    for p in space.isotropic_points_in(&space.perp(l).map_err(e)?).map_err(e)? {
        if !l.contains(field, p.rep()).map_err(e)? {
            outside += 1;
        }
    }
    let affine = (space.q() as u128).pow(space.rank() as u32 - 1);
    if outside != expected * affine {
        return fail(format!("{outside} points in L^perp \\ L, expected {}", expected * affine));
    }
    Ok(1)
}

/// `S ⊆ p^⊥` or `S ∩ p^⊥` is a hyperplane of `S`.
pub fn lemma_dichotomy(space: &PolarSpace, p: &ProjectivePoint, s: &Subspace) -> Check {
    let field = space.field();
    let m = space.perp_of_vector(p.rep()).map_err(e)?.meet(field, s).map_err(e)?;
    if m != *s && m.dim() + 1 != s.dim() {
        return fail(format!("p^perp meets a {}-space in dimension {}", s.dim(), m.dim()));
    }
    Ok(1)
}

/// For a line `ℓ` missing the generator `P`: `ℓ^⊥ ∩ P` has dimension d−2,
/// and the hyperplanes `x^⊥ ∩ P` for `x ∈ ℓ` contain it and are distinct.
pub fn lemma_line_hyperplanes(space: &PolarSpace, ell: &Subspace, p: &Subspace) -> Check {
    let field = space.field();
    if ell.meet(field, p).map_err(e)?.dim() != 0 {
        return Ok(0);
    }
    let core = space.perp(ell).map_err(e)?.meet(field, p).map_err(e)?;
    if core.dim() + 2 != space.rank() {
        return fail(format!("ell^perp ∩ P has dimension {}", core.dim()));
    }
    let mut seen = BTreeSet::new();
    for x in ell.points(field).map_err(e)? {
        let h = space.perp_of_vector(x.rep()).map_err(e)?.meet(field, p).map_err(e)?;
        if h.dim() + 1 != space.rank() || !h.contains_subspace(field, &core).map_err(e)? {
            return fail("x^perp ∩ P is not a hyperplane through ell^perp ∩ P");
        }
        if !seen.insert(h) {
            return fail("two points of ell give the same hyperplane");
        }
    }
    Ok(1)
}

/// Distinct hyperplanes `H, H′` of a generator `P` have `H^⊥ ∩ H′^⊥ = P`
/// as point sets of the polar space. As vector spaces the meet is `P^⊥`,
/// which is larger than `P` when n > 2d.
pub fn lemma_two_hyperplanes(space: &PolarSpace, p: &Subspace) -> Check {
    let field = space.field();
    let hs = p.hyperplanes(field).map_err(e)?;
    let mut count = 0;
    for i in 0..hs.len() {
        for j in i + 1..hs.len() {
            two_hyperplanes_pair(space, p, &hs[i], &hs[j])?;
            count += 1;
        }
    }
    Ok(count)
}

pub fn two_hyperplanes_pair(space: &PolarSpace, p: &Subspace, h: &Subspace, h2: &Subspace) -> Check {
    let field = space.field();
    let m = space.perp(h).map_err(e)?.meet(field, &space.perp(h2).map_err(e)?).map_err(e)?;
    if space.isotropic_points_in(&m).map_err(e)? != p.points(field).map_err(e)? {
        return fail("H^perp ∩ H'^perp has a point outside P");
    }
    Ok(1)
}

/// The recipe exists and `Hx ∩ Hy ∩ Hz′` has no point of `P̃_1` for every
/// hyperplane `Hz′ ≠ Hz` in the class of `Hz`.
pub fn lemma_recipe(ctx: &SwitchContext) -> Check {
    let r = find_gamma1_recipe(ctx).map_err(e)?;
    let field = ctx.space().field();
    let table = &ctx.tables()[r.generator];
    let (class, _) = table.locate(&r.hz).ok_or("Hz not in the table")?;
    let base = r.hx.meet(field, &r.hy).map_err(e)?;
    let mut count = 0;
    for h in &table.classes[class].hyperplanes {
        if *h == r.hz {
            continue;
        }
        let m = base.meet(field, h).map_err(e)?;
        for &v in &table.points {
            if m.contains(field, ctx.points()[v].rep()).map_err(e)? {
                return fail(format!("affine vertex {v} lies on Hx ∩ Hy ∩ Hz'"));
            }
        }
        count += 1;
    }
    Ok(count)
}

fn sum_par<T: Sync>(items: &[T], check: impl Fn(&T) -> Check + Sync + Send) -> Check {
    items.par_iter().map(check).try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Runs every geometric check exhaustively on `space`; returns the number
/// of instances per lemma.
pub fn exhaustive_suite(space: &PolarSpace) -> Result<[usize; 6], String> {
    let ctx = SwitchContext::canonical(space.clone()).map_err(e)?;
    let points = ctx.points().to_vec();
    let lines = isotropic_lines(space, &points)?;
    let mut counts = [0; 6];
    counts[0] = sum_par(&points, |p| lemma_max_dim(space, p))?;
    // at rank 3 the (d−1)-spaces are the lines
    counts[1] = sum_par(&lines, |l| lemma_generators(space, l))?;
    let mut family: Vec<Subspace> = ctx.generators().to_vec();
    family.push(ctx.l().clone());
    for p in &points {
        for s in &family {
            counts[2] += lemma_dichotomy(space, p, s)?;
        }
    }
    counts[3] = sum_par(&lines, |ell| {
        let mut n = 0;
        for g in ctx.generators() {
            n += lemma_line_hyperplanes(space, ell, g)?;
        }
        Ok(n)
    })?;
    for g in ctx.generators() {
        counts[4] += lemma_two_hyperplanes(space, g)?;
    }
    counts[5] += lemma_recipe(&ctx)?;
    let expected_lines = points.len() as u128 * (space.srg_params().unwrap().k as u128)
        / (space.q() as u128 * (space.q() as u128 + 1));
    if lines.len() as u128 != expected_lines {
        return fail(format!("{} lines, expected {expected_lines}", lines.len()));
    }
    Ok(counts)
}

/// The line through point `a` and the `b`-th other isotropic point of `a^⊥`.
pub fn line_at(ctx: &SwitchContext, a: usize, b: usize) -> Subspace {
    let space = ctx.space();
    let p = &ctx.points()[a];
    let others: Vec<ProjectivePoint> = space
        .isotropic_points_in(&space.perp_of_vector(p.rep()).unwrap())
        .unwrap()
        .into_iter()
        .filter(|r| r != p)
        .collect();
    let r = &others[b % others.len()];
    p.to_subspace().join_vector(space.field(), r.rep()).unwrap()
}

pub fn sampled_instance(ctx: &SwitchContext, a: u64, b: u64, c: u64) -> Result<(), String> {
    let space = ctx.space();
    let field = space.field();
    let n = ctx.points().len();
    let p = &ctx.points()[(a % n as u64) as usize];
    lemma_max_dim(space, p)?;

    let ell = line_at(ctx, (a % n as u64) as usize, b as usize);
    lemma_generators(space, &ell)?;

    let gens = space.generators_through(&ell).unwrap();
    let g = &gens[(c % gens.len() as u64) as usize];
    let p2 = &ctx.points()[(b % n as u64) as usize];
    lemma_dichotomy(space, p2, g)?;
    lemma_dichotomy(space, p2, &ell)?;

    let g1 = &ctx.generators()[(c % ctx.generators().len() as u64) as usize];
    let ell2 = line_at(ctx, (b % n as u64) as usize, c as usize);
    lemma_line_hyperplanes(space, &ell2, g1)?;

    let hs = g1.hyperplanes(field).unwrap();
    let i = (a % hs.len() as u64) as usize;
    let j = (i + 1 + (b % (hs.len() as u64 - 1)) as usize) % hs.len();
    two_hyperplanes_pair(space, g1, &hs[i], &hs[j])?;
    Ok(())
}
