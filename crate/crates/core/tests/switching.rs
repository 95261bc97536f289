//! Structure of switched graphs: adjacency between the affine parts, lines
//! through them, and the resulting regularity.

mod common;

use std::sync::OnceLock;

use common::isotropic_lines;
use polar_srg::switching::gm_switch;
use polar_srg::{Graph, PolarKind, PolarSpace, Subspace, SwitchContext, VertexClass};
use proptest::prelude::*;

fn contexts() -> &'static [(SwitchContext, Vec<Subspace>)] {
    static CTX: OnceLock<Vec<(SwitchContext, Vec<Subspace>)>> = OnceLock::new();
    CTX.get_or_init(|| {
        [
            (PolarKind::Sp, 2),
            (PolarKind::OPlus, 2),
            (PolarKind::OOdd, 2),
            (PolarKind::OMinus, 2),
            (PolarKind::OPlus, 3),
        ]
        .into_iter()
        .map(|(k, q)| {
            let ctx = SwitchContext::canonical(PolarSpace::new(k, q, 3).unwrap()).unwrap();
            let lines = isotropic_lines(ctx.space(), ctx.points()).unwrap();
            (ctx, lines)
        })
        .collect()
    })
}

fn line_vertices(ctx: &SwitchContext, ell: &Subspace) -> Vec<usize> {
    ell.points(ctx.space().field())
        .unwrap()
        .iter()
        .map(|p| ctx.point_index(p.rep()).unwrap())
        .collect()
}

/// Checks the switched graph `g` against the facts about `P̃_i`.
fn check_structure(ctx: &SwitchContext, lines: &[Subspace], g: &Graph) -> Result<(), String> {
    let part = ctx.partition();
    let k0 = ctx.space().srg_params().unwrap().k as usize;
    // no edges between different affine parts
    for (i, a) in part.ptilde.iter().enumerate() {
        for b in &part.ptilde[i + 1..] {
            for &x in a {
                if let Some(&y) = b.iter().find(|&&y| g.has_edge(x, y)) {
                    return Err(format!("edge {x}-{y} between affine parts"));
                }
            }
        }
    }
    // each affine part stays a clique joined to L
    for a in &part.ptilde {
        for &x in a {
            if a.iter().any(|&y| y != x && !g.has_edge(x, y)) || part.l_points.iter().any(|&l| !g.has_edge(x, l)) {
                return Err(format!("affine vertex {x} lost an edge inside L^perp"));
            }
            if g.degree(x) != k0 {
                return Err(format!("affine vertex {x} has degree {}", g.degree(x)));
            }
        }
    }
    for ell in lines {
        let vs = line_vertices(ctx, ell);
        for (j, a) in part.ptilde.iter().enumerate() {
            let meet: Vec<usize> = vs.iter().copied().filter(|v| a.contains(v)).collect();
            if meet.len() != 1 {
                continue;
            }
            // x in another part sees exactly one point of ell
            for (i, b) in part.ptilde.iter().enumerate() {
                if i == j {
                    continue;
                }
                for &x in b {
                    let seen = vs.iter().filter(|&&v| g.has_edge(x, v)).count();
                    if seen != 1 {
                        return Err(format!("vertex {x} sees {seen} points of a line through P~_{j}"));
                    }
                }
            }
        }
        // ell meets P_i in a point: a vertex of P~_i seeing one point off P_i sees all
        for (i, a) in part.ptilde.iter().enumerate() {
            let on_pi: Vec<usize> = vs
                .iter()
                .copied()
                .filter(|&v| part.classes[v] == VertexClass::InL || a.contains(&v))
                .collect();
            if on_pi.len() != 1 {
                continue;
            }
            for &x in a {
                if vs.contains(&x) {
                    continue;
                }
                let off = vs.iter().filter(|v| !on_pi.contains(v));
                let sees_off = off.clone().any(|&v| g.has_edge(x, v));
                if sees_off && !vs.iter().all(|&v| g.has_edge(x, v)) {
                    return Err(format!("vertex {x} sees part of a line through P_{i}"));
                }
            }
        }
    }
    Ok(())
}

#[test]
fn collinearity_graph_has_the_structure() {
    for (ctx, lines) in contexts() {
        check_structure(ctx, lines, ctx.collinearity()).unwrap();
    }
}

#[test]
fn swaps_are_srg() {
    for (ctx, lines) in contexts() {
        let params = ctx.space().srg_params().unwrap();
        for (i, t) in ctx.tables().iter().enumerate() {
            for class in &t.classes {
                let spec = ctx
                    .sigma_single_swap(i, &class.hyperplanes[0], &class.hyperplanes[1])
                    .unwrap();
                let g = ctx.build_switched_graph(&spec).unwrap();
                assert_eq!(g.srg_check().unwrap(), params);
                check_structure(ctx, lines, &g).unwrap();
            }
        }
    }
}

#[test]
fn complement_at_q2_is_godsil_mckay() {
    for (ctx, _) in contexts().iter().filter(|(c, _)| c.space().q() == 2) {
        let g = ctx.build_switched_graph(&ctx.sigma_complement().unwrap()).unwrap();
        let y = ctx.switching_set();
        assert_eq!(g, gm_switch(ctx.collinearity(), &y).unwrap());
    }
}

#[test]
fn explicit_l_gives_a_different_partition() {
    let space = PolarSpace::new(PolarKind::Sp, 2, 3).unwrap();
    let f = space.field().clone();
    let v = |xs: [u32; 6]| xs.iter().map(|&x| f.from_index(x).unwrap()).collect::<Vec<_>>();
    // e3, e5 span a totally isotropic line for the pairing (e1,e2),(e3,e4),(e5,e6)
    let l = Subspace::span(&f, 6, vec![v([0, 0, 1, 0, 0, 0]), v([0, 0, 0, 0, 1, 0])]).unwrap();
    let ctx = SwitchContext::new(space, l.clone()).unwrap();
    assert_eq!(ctx.l(), &l);
    let g = ctx.build_switched_graph(&ctx.sigma_random(5)).unwrap();
    assert_eq!(g.srg_check().unwrap().k, 30);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn random_switches_keep_the_structure(which in 0usize..5, seed in any::<u64>()) {
        let (ctx, lines) = &contexts()[which];
        let g = ctx.build_switched_graph(&ctx.sigma_random(seed)).unwrap();
        prop_assert_eq!(check_structure(ctx, lines, &g), Ok(()));
        prop_assert_eq!(g.srg_check().unwrap(), ctx.space().srg_params().unwrap());
    }
}
