//! The estimator: system rows, sensitivity, MLEM, peak extraction and
//! localization metrics.

mod dump;
mod maxima;
mod metrics;
mod mlem;
mod sensitivity;
mod system;

pub use dump::{field_to_text, parse_field, write_field, FieldDump};
pub use maxima::{is_strict_local_max, local_maxima, LocalMaxima, Peak, SensitivityGate};
pub use metrics::{localization_metrics, LocalizationMetrics, DEFAULT_TOLERANCE};
pub use mlem::{log_likelihood, mlem, mlem_step, LambdaField, MlemDiagnostics};
pub use sensitivity::SensitivityField;
pub use system::{projection, system_row, ProjectionParams, SystemRow};
