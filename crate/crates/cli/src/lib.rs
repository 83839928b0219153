//! File formats, reports and commands behind the `dgbar` binary.

pub mod commands;
pub mod deligne;
pub mod format;
pub mod report;
