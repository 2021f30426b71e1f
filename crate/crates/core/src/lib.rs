//! Finite-dimensional Hilbert W*-modules made computable.
//!
//! The base algebra is a finite direct sum of full matrix algebras
//! `M_{n_1}(C) ⊕ … ⊕ M_{n_k}(C)`. Modules are finitely generated projective
//! left modules presented by a projection `q` over `M_n(A)`; every submodule is
//! stored as a projection, so "is a direct summand" is a representation
//! invariant. On top of that the crate provides:
//!
//! * [`algebra`]: block algebras, `K_0(A)` rank vectors and `HC_0(A)` trace vectors;
//! * [`module`]: inner products, (bi-)orthogonal complements, intersections, sums,
//!   cyclic decompositions;
//! * [`operator`]: adjoints, kernels, the Taylor-series operator square root,
//!   polar isometries and Fredholm indices;
//! * [`spectral`]: spectral measures of module unitaries, the `K_0`-valued spectral
//!   function and the cyclic trace;
//! * [`complex`]: finite complexes, harmonic spaces and the Lefschetz numbers `L_1`, `L_0`;
//! * [`oracle`]: an independent dense complex-linear re-computation of all of the above;
//! * [`cli`]: instance files, deterministic instance generation and the property suite.

pub mod algebra;
pub mod cli;
pub mod complex;
pub mod error;
mod linalg;
pub mod module;
pub mod operator;
pub mod oracle;
pub mod spectral;
pub mod tol;

pub use algebra::{AlgElem, AlgMatrix, BlockAlgebra, HC0Class, K0Class};
pub use complex::{ComplexEndomorphism, FiniteComplex, HarmonicSpaces};
pub use error::{Error, Result};
pub use module::{HilbertModule, ModuleElement, Submodule};
pub use operator::{ModuleMap, SqrtMethod};
pub use spectral::{SpectralFunction, SpectralMeasure};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix used for algebra blocks.
pub type CMat = nalgebra::DMatrix<C64>;
