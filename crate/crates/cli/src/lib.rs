//! Command-line driver for channel checks, CP-divisibility scans and
//! figure-data export.

pub mod commands;
pub mod config;

pub use commands::{
    cmd_channel_check, cmd_charfunc, cmd_export_channel, cmd_figures, cmd_scan, fmt_float, write_check_report,
    write_scan_csv, write_scan_json, ChannelKind, CheckReport,
};
pub use config::{threads_from_env, BasisName, Format, RunConfig};
