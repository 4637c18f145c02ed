//! Executable checks of Ext computations against closed forms, with serializable reports.

pub mod checks;
pub mod hilbert;
pub mod report;

pub use checks::*;
pub use hilbert::{Group, HilbertTable};
pub use report::{Comparison, Source, TheoremReport, Verdict};
