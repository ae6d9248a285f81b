//! Hyperspherical harmonics for the equal-mass quantum three-body problem
//! under the chain O(6) ⊃ SU(3) ⊃ O(3), together with the classical
//! mechanics of the rotating and deforming triangle in the same coordinates.
//!
//! Modules are layered bottom-up:
//! [`special_functions`] and [`coupling`] supply scalar building blocks,
//! [`kinematics`] maps particle configurations to the sphere coordinates,
//! [`polyops`] is an exact polynomial engine carrying the operator algebra,
//! [`basis`] builds tree functions, [`transform`] handles rotations between
//! tree bases and the Ω diagonalization, and [`dynamics`] integrates the
//! classical equations of motion.

pub mod basis;
pub mod coupling;
pub mod dynamics;
pub mod kinematics;
pub mod polyops;
pub mod special_functions;
pub mod transform;
