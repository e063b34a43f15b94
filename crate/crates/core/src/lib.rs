//! Conformal geometry toolkit for Willmore-type surfaces in R³.
//!
//! The building blocks, from the bottom up:
//!
//! - [`geom`]: fundamental forms and curvature of a conformal chart from its jets
//! - [`lorentz`]: the Minkowski space R^{4,1} and the light-cone model of S³
//! - [`moebius`]: Möbius maps of R³, their jets and their Lorentz matrices
//! - [`zoo`]: analytic test surfaces, including Weierstrass data and Möbius images
//! - [`gauss_map`]: the conformal Gauss map and its harmonicity residuals
//! - [`energetics`]: Willmore and tracefree energies, ε-regularity scans
//! - [`normalizer`]: conformal normalization of a patch by a Möbius inversion
//! - [`residuals`]: Willmore and Gauss–Codazzi residual fields with convergence studies
//! - [`cli`]: the `willmore-lab` command line

pub mod cli;
pub mod energetics;
pub mod expr;
pub mod gauss_map;
pub mod geom;
pub mod lorentz;
pub mod moebius;
pub mod normalizer;
pub mod quadrature;
pub mod residuals;
pub mod sampled;
pub(crate) mod taylor;
pub mod zoo;

pub use geom::{fundamental_forms, tracefree_density, FundamentalForms, GeomError, Jet2, Jet3};
pub use lorentz::Vector5;
pub use moebius::{LorentzMatrix, MoebiusError, MoebiusMap, Primitive};
pub use quadrature::{disk_quadrature, DiskQuadrature};
pub use zoo::{SurfaceError, SurfaceSpec};
