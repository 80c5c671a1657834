//! Statistical analysis of trajectories and mobility networks.

pub mod binning;
pub mod mobility;
pub mod network;
pub mod powerlaw;
pub mod report;

pub use binning::{fit_loglog_ols, Bin, BinMean, BinnedCurve};
pub use mobility::*;
pub use network::*;
pub use powerlaw::{fit_powerlaw_fixed_xmin, fit_powerlaw_loghist, fit_powerlaw_mle};
pub use report::{analyze, AnalyzeOptions, CurvePoint, Report, Skipped};
