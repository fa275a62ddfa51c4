//! The theorem verification suite.

mod checks;
pub mod random;
mod report;

pub use checks::{
    check_an_tensor, check_appendix, check_convexity, check_counterexample, check_ext, check_mh,
    check_minima, check_product_formula, check_slopes, check_sym, check_tensor, check_zhang,
    check_zhang_chain, run_group, Ctx, GROUPS,
};
pub use report::{evaluate, Entry, Evaluation, Quantity, Relation, Report, ReportHeader, Verdict};

use rayon::prelude::*;

use crate::config::Config;
use crate::error::{Error, Result};

/// Runs every selected statement group and collects the entries.
pub fn run_all(config: &Config) -> Result<Report> {
    config.validate()?;
    for g in &config.only {
        if !GROUPS.contains(&g.as_str()) {
            return Err(Error::InvalidInput(format!("unknown statement group {g:?}")));
        }
    }
    let ctx = Ctx::new(config);
    let groups: Vec<&str> = GROUPS.iter().copied().filter(|g| config.selects(g)).collect();
    let entries: Vec<Entry> = groups
        .par_iter()
        .flat_map_iter(|g| run_group(&ctx, g))
        .collect();
    Ok(Report::new(config, entries))
}
