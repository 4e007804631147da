//! Discrete exterior calculus on 2D triangle meshes.
//!
//! The crate builds oriented simplicial complexes, cell duals based on an
//! arbitrary choice of triangle centers (circumcenter, barycenter, incenter or
//! custom interior points), and discrete Hodge operators that stay exact on
//! piecewise constant forms for every such choice. On top of those operators
//! it provides direct solvers for the Poisson equation, incompressible
//! Navier-Stokes in stream-function form and the Boussinesq anisothermal
//! system, plus mesh generators and a convergence-study harness.

pub mod cochain;
pub mod complex;
pub mod config;
pub mod dual;
pub mod exact;
pub mod geometry;
pub mod gmsh;
pub mod harness;
pub mod hodge;
pub mod linsolve;
pub mod meshgen;
pub mod norms;
pub mod ns;
pub mod poisson;
pub mod quadrature;
pub mod sparse;

pub use cochain::{discretize_form, Cochain, FormSampler};
pub use complex::{build_complex, Carrier, MeshStats, SimplicialComplex2};
pub use dual::{build_dual, validate_dual, CenterStrategy, DualMesh};
pub use exact::{ExactSolution, FluidParams, Rect};
pub use geometry::Vec2;
pub use hodge::{HodgeOperators, InverseMode};
pub use meshgen::{gen_acute_mesh, gen_right_mesh, non_delaunay_ratio, MeshKind, MeshRecipe};
pub use norms::{convergence_rate, relative_error};
pub use ns::{solve_boussinesq, solve_navier_stokes, ConvectionScheme, SolverConfig};
pub use poisson::{solve_poisson, PoissonProblem};
pub use sparse::SparseMatrix;
