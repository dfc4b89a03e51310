use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate angle: the fractional part is zero")]
    DegenerateAngle,
    #[error("precision exhausted: {detail} (needs about {required_bits} bits)")]
    PrecisionExhausted { required_bits: u64, detail: String },
    #[error("resonance at index {0}: the small divisor vanishes exactly")]
    Resonance(usize),
    #[error("too few coefficients: have {have}, need at least {need}")]
    TooFewCoefficients { have: usize, need: usize },
    #[error("rescaling by zero")]
    ZeroScale,
    #[error("critical orbit escaped at step {step} (|z| = {modulus})")]
    OrbitEscaped { step: usize, modulus: f64 },
    #[error("bounded type required: partial quotient {found} exceeds cap {cap}")]
    BoundedTypeRequired { found: String, cap: u64 },
    #[error("inversion center lies on the sample (distance {distance:e})")]
    CenterOnBoundary { distance: f64 },
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{flagged} of {total} evaluations flagged, above the allowed fraction")]
    TooManyFlagged { flagged: usize, total: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
