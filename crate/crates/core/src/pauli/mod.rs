//! Pauli strings in symplectic form, real-weighted sums, conjugation by gates
//! and measurement grouping.

mod conjugate;
mod grouping;
pub mod io;
mod string;
mod sum;

pub use conjugate::{
    conjugate_clifford, conjugate_gate, conjugate_general, conjugate_general_capped,
    is_supported_clifford, project_fixed_qubits, DEFAULT_TERM_CAP,
};
pub use grouping::{group_for_measurement, Axis, MeasurementGroup};
pub use string::{Pauli, PauliString, Phase, MAX_QUBITS};
pub use sum::{
    expand_ladder_product, ladder_plus_hc, ComplexPauliSum, Ladder, PauliSum, PauliTerm,
    DROP_TOLERANCE,
};
