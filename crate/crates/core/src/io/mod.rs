//! Case files and CSV output.

mod case;
mod tables;

pub use case::{CaseFile, GridSection, OutputSection, ParamsSection, StudySection};
pub use tables::{
    format_value, snapshot_file_name, write_convergence, write_dispersion_metrics, write_grid_deviations,
    write_ledger, write_probes, write_run, write_snapshot, write_study_compare,
};
