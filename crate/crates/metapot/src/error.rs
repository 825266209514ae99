use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rate graph is not irreducible: state {0} cannot reach every state or be reached from it")]
    NotIrreducible(String),
    #[error("negative rate {rate} on ({from}, {to})")]
    NegativeRate { from: String, to: String, rate: f64 },
    #[error("non-zero diagonal rate at state {0}")]
    DiagonalRate(String),
    #[error("unknown state {0}")]
    UnknownState(String),
    #[error("linear solve failed: {0}")]
    SolveFailure(String),
    #[error("sets overlap at state {0}")]
    OverlappingSets(String),
    #[error("empty state set")]
    EmptySet,
    #[error("capacity is zero")]
    ZeroCapacity,
    #[error("process is not reversible")]
    NotReversible,
    #[error("function violates its boundary class: {0}")]
    InfeasibleFunction(String),
    #[error("flow violates its divergence class: {0}")]
    InfeasibleFlow(String),
    #[error("flow has zero norm")]
    ZeroNormFlow,
    #[error("collapse set is empty")]
    EmptyCollapseSet,
    #[error("collapse set covers every state")]
    FullCollapseSet,
    #[error("function is not constant on the collapse set (state {0})")]
    NonConstantOnCollapseSet(String),
    #[error("state space of size {size} exceeds the limit {limit}")]
    StateSpaceTooLarge { size: u128, limit: u128 },
    #[error("no path below energy cap {0}")]
    CapExceeded(i64),
    #[error("lattice must satisfy K <= L (got K={k}, L={l})")]
    DimensionOrder { k: usize, l: usize },
    #[error("enumeration exceeded the budget of {0} configurations")]
    FrontierExplosion(usize),
    #[error("alpha must exceed 1 (got {0})")]
    AlphaOutOfRange(f64),
    #[error("valleys overlap: width {width} with {particles} particles")]
    ValleysOverlap { width: usize, particles: usize },
    #[error("simulation exceeded its event budget of {0}")]
    BudgetExceeded(u64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
