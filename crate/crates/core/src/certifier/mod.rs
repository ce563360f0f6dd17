//! Discrete counterparts of the inequalities behind the existence and
//! regularity arguments: truncation functions, Sobolev constants, the Moser
//! ladder, the Hardy inequality on cones and Morrey-type potential bounds.

mod hardy;
mod moser;
mod morrey;
pub mod probes;
mod sobolev;
mod truncation;

pub use hardy::{hardy_check, hardy_check_on, HardyReport, HARDY_SLACK_FACTOR};
pub use moser::{moser_supbound, MoserLadder, DEFAULT_LEVELS};
pub use morrey::{log_radii, morrey_check, MorreyCenter, MorreyReport, MorreySample, MorreyVerdict, TREND_TOLERANCE};
pub use sobolev::{sobolev_audit, sobolev_constants, ProbeConfig, SobolevEstimate};
pub use truncation::{
    random_truncation_audit, truncation_eval, verify_truncation_inequalities, TruncationAudit, TruncationCheck,
    TruncationParams, TruncationValues,
    TruncationViolation, TRUNCATION_TOL,
};
