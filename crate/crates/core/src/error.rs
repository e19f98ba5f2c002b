use num_bigint::BigInt;
use thiserror::Error;

use crate::sft::Word;

/// Errors raised by the library. Verification failures that indicate a
/// construction bug (`Violation`, `BoundViolated`, `InconsistentVerdicts`)
/// carry enough context to reproduce the failing check.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("transition matrix is empty")]
    EmptyAlphabet,
    #[error("alphabet size {0} exceeds the supported maximum of 36 symbols")]
    AlphabetTooLarge(usize),
    #[error("transition matrix row {row} has {len} entries, expected {expected}")]
    RaggedMatrix { row: usize, len: usize, expected: usize },
    #[error("row or column {0} of the transition matrix has no allowed transition")]
    EmptyRowOrColumn(usize),
    #[error("transition matrix is not mixing: some power up to {bound} still has a zero entry")]
    NotMixing { bound: usize },
    #[error("malformed SFT text: {0}")]
    ParseSft(String),
    #[error("gap {gap} is smaller than the mixing time {mixing_time}")]
    GapTooSmall { gap: usize, mixing_time: usize },
    #[error("symbol {0} is outside the alphabet")]
    BadSymbol(u8),
    #[error("word {0} is not admissible")]
    Inadmissible(Word),
    #[error("word {0} is not cyclically admissible")]
    NotCyclicallyAdmissible(Word),
    #[error("empty word where a nonempty one is required")]
    EmptyWord,
    #[error("cannot parse word {0:?}")]
    ParseWord(String),
    #[error("horizon must be at least 1")]
    EmptyHorizon,
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("distribution depth {have} is smaller than the requested depth {want}")]
    DepthMismatch { have: usize, want: usize },
    #[error("distribution is not normalised (total mass {0})")]
    NotNormalised(String),
    #[error("distribution is not shift-invariant: {0}")]
    NotInvariant(String),
    #[error("negative weight on word {0}")]
    NegativeWeight(Word),
    #[error("no periodic orbit with denominator at most {cap} reaches distance {epsilon}")]
    InfeasibleEpsilon { epsilon: String, cap: u64 },
    #[error("sample {sample} lies at distance {distance} from the net, above {epsilon}")]
    CoverageFailure { sample: usize, distance: String, epsilon: String },
    #[error("malformed distribution CSV at line {line}: {msg}")]
    ParseDistribution { line: usize, msg: String },
    #[error("target sequence is empty")]
    NoTargets,
    #[error("stage {0} does not exist")]
    NoSuchStage(usize),
    #[error("schedule infeasible at stage {stage}: {msg}")]
    ScheduleInfeasible { stage: usize, msg: String },
    #[error("shadowing estimate violated at stage {stage}, witness j = {witness}")]
    Violation { stage: usize, witness: BigInt },
    #[error("stage {stage}: |lhs| = {lhs} exceeds bound {bound}")]
    BoundViolated { stage: usize, lhs: String, bound: String },
    #[error("observable sup-norm {0} exceeds 1")]
    ObservableTooLarge(String),
    #[error("index set is empty")]
    EmptyIndexSet,
    #[error("shrink factor must lie strictly between 0 and 1")]
    BadShrink,
    #[error("net is empty")]
    EmptyNet,
    #[error("orbit {0} is not among the gluing targets")]
    PairNotInTargets(Word),
    #[error("cocycle is not uniformly hyperbolic on the subshift; no constants exist")]
    NotHyperbolic,
    #[error("positive cycle detected after reduction by eta (internal error)")]
    PositiveCycleDetected,
    #[error("cocycle has {have} weights, alphabet has {want} symbols")]
    CocycleSize { have: usize, want: usize },
    #[error("verdicts disagree beyond tolerance: {0}")]
    InconsistentVerdicts(String),
    #[error("malformed manifest: {0}")]
    Manifest(String),
}

pub type Result<T> = std::result::Result<T, Error>;
