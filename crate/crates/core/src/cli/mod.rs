//! `fermisea` command-line front end.
//!
//! ```text
//! fermisea pattern     --shape S --lambda L --eta2 E --nf N [--theta-samples K] [--limit | --nz J | --nz-from J] [--literal]
//! fermisea shells      --shape S --lambda L --eta2 E [--theta DEG [--phi DEG]] [--n-max N] [--weight uniform|dipole-z] [--nodes Q]
//! fermisea degeneracy  --shape S --lambda L [--n-max N]
//! fermisea count       --shape S --lambda L --nf N
//! fermisea tight-sweep --eta2 E --nf N --lambda-min A --lambda-max B [--samples K] [--shape S]
//! fermisea fermi-shell --shape S --lambda L --atoms N
//! fermisea figure ID   [--theta-samples K]
//! ```
//!
//! Every command also takes `--format csv|json|svg` and `--out PATH`.
//! Angles are given in degrees. Exit codes: 0 success, 2 usage error,
//! 3 I/O error, 4 numerical guard.

mod args;
mod figures;
mod output;
mod run;
mod svg;

use std::ffi::OsString;
use std::io::Write;

pub use args::{parse_args, Command, OutputFormat, RunConfig, UsageError};
pub use figures::{FigureId, FigurePreset};
pub use output::{format_significant, Column, ColumnValues, Dataset, PlotKind, PlotSpec};
pub use run::{render, run, tight_sweep, RunError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Parses, runs, reports errors on stderr and returns the exit status.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match parse_args(argv) {
        Ok(config) => config,
        Err(UsageError::Help(text)) => {
            print!("{text}");
            return EXIT_OK;
        }
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("run `fermisea --help` for usage");
            return EXIT_USAGE;
        }
    };
    match run(&config) {
        Ok(()) => {
            let _ = std::io::stdout().flush();
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
