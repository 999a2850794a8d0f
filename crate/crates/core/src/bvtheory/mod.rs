//! Free BV theories on lattice cylinders and their classical structures.

pub mod green;
pub mod model;
pub mod pairing;
pub mod stencil;
pub mod theorems;

pub use green::{Direction, GreenSolver, ProcSection, SupportBound};
pub use model::{FiberMetric, FreeBVModel};
pub use pairing::{PairingKind, Prop, Theory};
pub use stencil::{Section, Site, Stencil};
