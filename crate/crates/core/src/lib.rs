//! Quantum turbo code simulation and EXIT-chart design.
//!
//! Errors are tracked in the effective (symplectic) representation: a Pauli
//! error on `N` qubits is a binary vector `[z_1..z_N | x_1..x_N]`.

pub mod channel;
pub mod error;
pub mod exec;
pub mod exit;
pub mod interleaver;
pub mod message;
pub mod pauli;
pub mod qcc;
pub mod registry;
pub mod turbo;

pub use channel::DepolarizingChannel;
pub use error::{Error, Result};
pub use exit::{ExitConfig, ExitCurve, ExitPoint, Trajectory, TunnelReport};
pub use interleaver::QuantumInterleaver;
pub use message::{MessageRole, MessageSequence, MessageSubject, SymbolDistribution};
pub use pauli::{AncillaKind, BinarySymplecticMatrix, BitMatrix, EffectiveVector, PauliSymbol, SeedTransform};
pub use qcc::{CodeRole, CodeSpec, SisoOutput, SyndromeSequence};
pub use registry::CodeRegistry;
pub use turbo::{FrameResult, QberRecord, TurboSystem};
