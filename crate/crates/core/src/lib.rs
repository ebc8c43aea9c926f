//! Cohomology engine for exploded manifolds presented by finite good covers.
//!
//! * [`lattice`]: exact polytopes, fans, Smith normal form.
//! * [`chart`]: exterior-algebra models of chart cohomology and restriction maps.
//! * [`cech`]: cover manifests, total complexes, global Betti numbers.
//! * [`forms`]: symbolic chart forms, admissibility, integration, Stokes and fiber integration.
//! * [`orientation`]: relative orientations and fiber-product sign laws.
//! * [`format`]: the manifest and fan text formats.

pub mod cech;
pub mod chart;
pub mod error;
pub mod format;
pub mod forms;
pub mod lattice;
pub mod orientation;

pub use error::{Error, ManifestIssue, Result};
