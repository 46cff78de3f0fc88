//! Qubit-register reservoirs in the Pauli-vector representation.
//!
//! A density operator on `N` qubits is stored as the real vector
//! `r^i = Tr[P_i ρ] / 2^N` over the Pauli-product basis, so encoding and
//! unitary evolution become real `4^N × 4^N` matrices.

mod channel;
mod pauli;
mod reservoir;
mod state;

pub use channel::{apply_encoding, channel_matrix, encoding_matrix, Hamiltonian, HamiltonianSpec};
pub use pauli::{
    check_qubits, index_from_digits, pauli_digits, pauli_index, single_z_index, Pauli, PauliString,
    MAX_QUBITS,
};
pub use reservoir::{
    check_unit_interval, concat_nodes, multiplex_product, multiplex_sum, multiplexed_nodes,
    qrc_step, run_qrc, MultiplexReadout, MultiplexedRun, MultiplexedSystem, QrcDoc, QrcRun,
    QrcSystem, STATE_TRACE_TOL,
};
pub use state::{
    density_to_vector, expected_trace_component, hermiticity_residual, validate_state,
    vector_to_density, ReservoirVector, StateDiagnostics,
};
