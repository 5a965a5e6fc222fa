//! Fair power allocation for a two-user NOMA downlink.
//!
//! A base station superposes two users' signals and splits transmit SNR
//! between them; the stronger receiver cancels the weaker signal before
//! decoding its own. This crate computes the exact interval of power splits
//! under which *both* users do at least as well as they would under
//! orthogonal (half-resource) scheduling, together with everything needed to
//! study that interval over i.i.d. Rayleigh fading:
//!
//! * [`noma`] — instantaneous capacities, the allocation-bound function and
//!   the fair region for one channel realization;
//! * [`channel`] — system parameters, ordered gain pairs, reproducible
//!   sampling and the ordered-pair density;
//! * [`special`] — the exponential integral `E1` backing the closed forms;
//! * [`ergodic`] — closed-form and quadrature ergodic capacities;
//! * [`mc`] — a seeded, worker-count-invariant Monte Carlo engine that
//!   cross-validates every analytic result and covers the allocations no
//!   closed form reaches.
//!
//! ```
//! use fairnoma_core::channel::{ChannelPair, SystemParams};
//! use fairnoma_core::noma::{capacity_report, fair_region};
//!
//! let params = SystemParams::from_snr_db(10.0, 1.0).unwrap();
//! let pair = ChannelPair::new(1.0, 4.0).unwrap();
//! let region = fair_region(&params, &pair).unwrap();
//! let report = capacity_report(&params, &pair, region.midpoint()).unwrap();
//! assert!(report.c1_noma >= report.c1_oma);
//! assert!(report.c2_noma >= report.c2_oma);
//! assert!(report.sum_noma > report.sum_oma);
//! ```

pub mod channel;
pub mod ergodic;
pub mod error;
pub mod mc;
pub mod noma;
mod quad;
pub mod special;

pub use channel::{ChannelPair, RandomStream, SystemParams};
pub use ergodic::{ErgodicEstimate, EstimateMethod, QuadratureConfig};
pub use error::{Error, Result};
pub use mc::{AllocationPolicy, McResult, Quantity};
pub use noma::{CapacityReport, FairRegion, PowerAllocation};
