pub mod device;
pub mod dynamics;
pub mod entanglement;
pub mod geometry;
pub mod hamiltonian;
pub mod linalg;
pub mod sweep;
