//! Disseminator and audience statistics: incivility density, exposure,
//! quantile regression of exposure on density, quantile groups and their
//! overlaps, identity-distribution tests, and survey representativeness.

mod exposure;
mod hypothesis;
pub mod qreg;
mod sets;
mod survey;

pub use exposure::{AudienceIndex, DensityRecord, ExposureMode, ExposureRecord};
pub use hypothesis::{
    chi_square_sf, chi_square_test, crosstab, g_test, mann_whitney_u, ContingencyTable,
    MannWhitney, TableTest,
};
pub use qreg::{fit_quantile_line, quantile_regression, QuantileFit, QuantileLine, DEFAULT_TAUS};
pub use sets::{jaccard, quantile_groups};
pub use survey::{representativeness, Representativeness, VariableTest};
