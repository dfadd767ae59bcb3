//! Exact cardinality expressions, δ comparison and definitions of counts.

pub mod boolean;
pub mod define;
pub mod delta;
pub mod poly;

pub use boolean::{boolean_card, fiber_count};
pub use delta::{delta_compare, delta_from_counts, Basis, DeltaMode, DeltaOutcome, DeltaVerdict, Family, FamilyCard};
pub use poly::{CardError, Monomial, Poly};
pub use define::{give_and_define, give_and_define_tuple, lift_tuple_cardinalities, CardCase, CardDefinition};
