//! Strongly regular graphs from the finite classical polar spaces.
//!
//! The crate builds collinearity graphs of the six classical polar space
//! families, rewires them with subgeometry switching (parallel-class
//! preserving permutations of affine hyperplanes in the generators through a
//! fixed (d−1)-space), checks strong regularity exhaustively, and separates
//! the result from the original graph with triangle common-neighbour counts.
//!
//! ```
//! use polar_srg::noniso::{build_gamma1, certify_noniso};
//! use polar_srg::{PolarKind, PolarSpace, SwitchContext};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let space = PolarSpace::new(PolarKind::Sp, 2, 3)?;
//! let ctx = SwitchContext::canonical(space)?;
//! let g = ctx.build_switched_graph(&ctx.sigma_random(1))?;
//! assert_eq!(g.srg_check()?, ctx.space().srg_params()?);
//!
//! let (g1, recipe) = build_gamma1(&ctx)?;
//! let cert = certify_noniso(ctx.collinearity(), &g1, Some(11), Some(recipe.triple))?;
//! assert_eq!(cert.witness_value, 11);
//! # Ok(())
//! # }
//! ```

pub mod gf;
pub mod graph;
pub mod linalg;
pub mod noniso;
pub mod polar;
pub mod specfile;
pub mod switching;

pub use gf::{Field, FieldElement, FieldError};
pub use graph::{Graph, GraphError, TriangleSpectrum};
pub use linalg::{gaussian_binomial, LinalgError, ProjectivePoint, Subspace};
pub use polar::{PolarError, PolarKind, PolarSpace, SrgParams};
pub use specfile::{parse_basis, parse_spec, write_spec, SpecFileError, SpecSyntax};
pub use switching::{gm_switch, SigmaSource, SwitchContext, SwitchError, SwitchSpec, VertexClass};
pub use noniso::{certify_noniso, find_gamma1_recipe, Gamma1Recipe, NonIsoCertificate, NonIsoError};
