//! Communication-proxy summary of a finished solve.

use std::fmt;

use crate::counters::CostCounters;

/// Global reductions vs neighbour exchanges, plus what an s-step grouping
/// with block length `restart_m` would need.
#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    pub degree: usize,
    pub restart_m: usize,
    /// Dot products in block convention.
    pub global_syncs: u64,
    /// SpMVs with `A`.
    pub neighbor_exchanges: u64,
    /// `neighbor_exchanges / global_syncs`, 0 when there were no syncs.
    pub spmvs_per_sync: f64,
    /// With polynomial preconditioning inside an s-step method (s = restart_m),
    /// orthogonalization is needed once every `max(deg, 1) * s` SpMVs.
    pub ca_sync_interval_spmvs: u64,
    /// `ceil(neighbor_exchanges / ca_sync_interval_spmvs)`.
    pub projected_ca_syncs: u64,
}

pub fn cost_report(counters: &CostCounters, deg: usize, restart_m: usize) -> CostReport {
    let interval = (deg.max(1) * restart_m.max(1)) as u64;
    let spmvs = counters.spmvs;
    CostReport {
        degree: deg,
        restart_m,
        global_syncs: counters.dots,
        neighbor_exchanges: spmvs,
        spmvs_per_sync: if counters.dots == 0 { 0.0 } else { spmvs as f64 / counters.dots as f64 },
        ca_sync_interval_spmvs: interval,
        projected_ca_syncs: spmvs.div_ceil(interval),
    }
}

impl fmt::Display for CostReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "global syncs (dots):          {}", self.global_syncs)?;
        writeln!(f, "neighbor exchanges (spmvs):   {}", self.neighbor_exchanges)?;
        writeln!(f, "spmvs per global sync:        {:.3}", self.spmvs_per_sync)?;
        write!(
            f,
            "s-step grouping (s = {}, deg = {}): one orthogonalization per {} spmvs, ~{} syncs",
            self.restart_m, self.degree, self.ca_sync_interval_spmvs, self.projected_ca_syncs
        )
    }
}
