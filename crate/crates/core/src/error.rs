use thiserror::Error;

/// Failures raised by the numerical modules.
///
/// Every variant maps to a stable name and originating module so that front
/// ends can report them without string matching.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("symplecticity lost: drift {drift:.3e} exceeds tolerance {tol:.3e} (step size too coarse?)")]
    SymplecticityLost { drift: f64, tol: f64 },
    #[error("phase jump {jump:.3} rad between consecutive loop samples exceeds pi/2 (undersampled loop)")]
    PhaseJumpTooLarge { jump: f64 },

    #[error("irregular crossing at t = {time}: crossing form has an eigenvalue {eigenvalue:.3e} below tolerance")]
    IrregularCrossing { time: f64, eigenvalue: f64 },
    #[error("undersampled path near t = {time}: {reason}")]
    Undersampled { time: f64, reason: String },
    #[error("symmetry violated: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    SymmetryViolated { residual: f64, tol: f64 },

    #[error("truncation unstable: near-zero spectrum moved by {shift:.3e} between K and 2K")]
    TruncationUnstable { shift: f64 },
    #[error("spectral crossing near s = {s} could not be isolated")]
    CrossingUnresolved { s: f64 },
    #[error("family endpoint at s = {s} is degenerate (kernel dimension {kernel})")]
    EndpointDegenerate { s: f64, kernel: usize },

    #[error("omega/2pi = {ratio} is an integer; the cap operator is not Fredholm")]
    OmegaResonant { ratio: f64 },
    #[error("boundary mismatch on '{label}': {reason}")]
    BoundaryMismatch { label: String, reason: String },

    #[error("orbit '{label}' is degenerate: {reason}")]
    DegenerateOrbit { label: String, reason: String },
    #[error("iterate {m} is degenerate (nullity {nullity})")]
    DegenerateIterate { m: usize, nullity: usize },

    #[error("energy drift {drift:.3e} exceeds tolerance {tol:.3e}")]
    EnergyDrift { drift: f64, tol: f64 },
    #[error("shooting did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("left the energy surface: {0}")]
    LeftEnergySurface(String),
    #[error("Liouville pairing {pairing:.3e} vanishes; Reeb field is not proportional to the Hamiltonian field here")]
    RadialDegeneracy { pairing: f64 },
}

impl Error {
    /// Stable variant name.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::SymplecticityLost { .. } => "SymplecticityLost",
            Error::PhaseJumpTooLarge { .. } => "PhaseJumpTooLarge",
            Error::IrregularCrossing { .. } => "IrregularCrossing",
            Error::Undersampled { .. } => "Undersampled",
            Error::SymmetryViolated { .. } => "SymmetryViolated",
            Error::TruncationUnstable { .. } => "TruncationUnstable",
            Error::CrossingUnresolved { .. } => "CrossingUnresolved",
            Error::EndpointDegenerate { .. } => "EndpointDegenerate",
            Error::OmegaResonant { .. } => "OmegaResonant",
            Error::BoundaryMismatch { .. } => "BoundaryMismatch",
            Error::DegenerateOrbit { .. } => "DegenerateOrbit",
            Error::DegenerateIterate { .. } => "DegenerateIterate",
            Error::EnergyDrift { .. } => "EnergyDrift",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::LeftEnergySurface(_) => "LeftEnergySurface",
            Error::RadialDegeneracy { .. } => "RadialDegeneracy",
        }
    }

    /// Module the error originates from.
    pub fn module(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "input",
            Error::SymplecticityLost { .. } | Error::PhaseJumpTooLarge { .. } => "symplectic-core",
            Error::IrregularCrossing { .. }
            | Error::Undersampled { .. }
            | Error::SymmetryViolated { .. } => "index-engine",
            Error::TruncationUnstable { .. }
            | Error::CrossingUnresolved { .. }
            | Error::EndpointDegenerate { .. } => "asymptotic-operator",
            Error::OmegaResonant { .. } | Error::BoundaryMismatch { .. } => "model-operator-oracle",
            Error::DegenerateOrbit { .. } | Error::DegenerateIterate { .. } => "moduli-dimension",
            Error::EnergyDrift { .. }
            | Error::NoConvergence { .. }
            | Error::LeftEnergySurface(_)
            | Error::RadialDegeneracy { .. } => "hamiltonian-lab",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
