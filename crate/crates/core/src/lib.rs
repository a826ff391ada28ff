//! Theta constants on the Siegel upper half-space, the level-N Siegel modular
//! function built from them, and Siegel invariants of ray classes of
//! cyclotomic CM-fields.

pub mod bigcomplex;
pub mod cmat;
pub mod cmdata;
pub mod cyclofield;
pub mod error;
pub mod qmat;
pub mod rayclass;
pub mod reference;
pub mod report;
pub mod symplectic;
pub mod theta;
pub mod verify;

pub use bigcomplex::{agree_to_digits, cplx_exp, e_of, BigComplex, BigReal};
pub use cyclofield::{solve_in_basis, CycloElem, CycloIdeal};
pub use error::{Error, Result};
pub use symplectic::{act_on_h, is_symplectic, symplectic_reduce, IntMatrix, PivotOrder, SiegelPoint};
pub use theta::{big_theta, build_char_sets, siegel_function, theta_eval, ThetaChar};
