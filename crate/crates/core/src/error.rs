use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid wavevector ({degree}, {order}): order must satisfy |order| <= degree")]
    InvalidWaveVector { degree: i64, order: i64 },

    #[error("invalid 3j arguments: |m| must not exceed j in every column")]
    InvalidThreeJ,

    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },

    #[error("grid too coarse for truncation {truncation}: need n_theta >= {need_theta}, n_phi >= {need_phi}")]
    GridTooCoarse {
        truncation: usize,
        need_theta: usize,
        need_phi: usize,
    },

    #[error("inverse Laplacian undefined on constant mode")]
    ConstantModeInverse,

    #[error("inverse Laplacian requires zero-mean field")]
    NonZeroMean,

    #[error("∂_φ⁻¹ undefined on zonal modes")]
    ZonalInverseDphi,

    #[error("lemma applies only to l̂ = 0, non-zonal j,k")]
    LemmaDomain,

    #[error("b_omega pairing requires a non-zonal first field and a zonal second field")]
    PairingDomain,

    #[error("triad-oracle path requires a triad table in the operator context")]
    MissingTriadTable,

    #[error("blow-up detected at t={t}")]
    BlowUp { t: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("viscosity must be positive, got {0}")]
    NonPositiveViscosity(f64),

    #[error("degenerate epsilon scan: {0}")]
    DegenerateScan(String),

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
