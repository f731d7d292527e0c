//! Complexified Hamiltonian mechanics for one degree of freedom: canonical
//! flows, phase-space curve geometry, symplectic algebra and commutator
//! bookkeeping for quadratic dual fields.

pub mod canon;
pub mod cli;
pub mod curvegeo;
pub mod hamexpr;
pub mod odeint;
pub mod quantop;
pub mod scenarios;
pub mod symplec;
pub mod verify;
