//! Transition errors, summary tables, headland sizing and reports.

pub mod errors;
pub mod headland;
pub mod plot;
pub mod report;
pub mod table;

pub use errors::{errors_from_samples, transition_errors, ErrorKind, Transition, TransitionError, TrialErrors, F_N_OFFSET};
pub use headland::{headland_requirement, with_coefficient, HeadlandRequirement, REPORTED_COEFFICIENT, STATED_COEFFICIENT};
pub use report::{
    collect_errors, read_trajectory_csv, summarize, write_outcomes_csv, write_report, write_trajectory_csv, BatchSummary,
};
pub use table::{alpha_from_medians, alpha_table, error_table_from_csv, read_errors_csv, write_errors_csv, ErrorTable, TableRow};
