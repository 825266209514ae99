//! Zero-range process on the cycle `T_κ` with sticky rates `g(n) = a(n)/a(n−1)`,
//! `a(n) = n^α`, and its reduction to the valley chain `Y`.

pub mod constants;
pub mod identities;
pub mod limit;
pub mod limits;
pub mod model;
pub mod order;
pub mod rates;

pub use constants::{gamma_alpha, i_alpha, limit_constants, partition_function, LimitConstants};
pub use identities::{capacity_identities, measure_identities, sector_check_zrp, sector_constant};
pub use limit::{limit_chain, LimitChain};
pub use limits::{martingale_conditions, zrp_capacity_scan, CapacityScan, ConditionsReport};
pub use order::{order_chain_statistics, OrderChainStatistics};
pub use model::{build_zrp, StateSpace, Valleys, ZrpModel, ZrpProcess};
pub use rates::{mean_jump_rates, MeanJumpRates};
