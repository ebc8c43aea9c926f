//! Symbolic differential forms on chart models: admissibility, integration
//! over smooth strata, Stokes checks, fiber integration and the duality pairing.

mod expr;
mod fiber;
mod form;
mod integrate;
mod pairing;
mod parse;
pub mod quad;
mod smooth;

pub use expr::{Atom, Domain, FiberIntegral, Monomial, Part, Point, Poly, Profile, Var};
pub use form::{FormExpr, Wedge};
pub use parse::{parse_form, parse_function};
pub use integrate::{
    base_corner, check_admissible, check_coordinates, integrate, integrate_half, stokes_check, volume_wedge,
    Admissibility, Integral, QuadratureOptions, StokesReport, StratumCheck,
};
pub use fiber::{adjunction_check, AdjunctionReport, CoordinateProjection};
pub use pairing::{cohomology_form, compact_form, pairing_matrix, PairingMatrix};
