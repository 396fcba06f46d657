//! The discrete osmosis generator `A` of `u' = A u`.
//!
//! Diffusion uses the per-pixel lattice stencils of [`crate::anisotropy`];
//! each stencil edge also carries a drift sample so that, in the compatible
//! case, the guidance image spans the kernel of `A`.

mod assemble;
mod energy;
mod scc;
mod sparse;

pub use assemble::{assemble, edge_drift, GRID_STEP};
pub use energy::osmosis_energy;
pub use scc::{tarjan_scc, SccResult};
pub use sparse::{SparseOperator, TripletBuilder};

/// Empirical check of the generator hypotheses: zero column sums,
/// nonnegative off-diagonals and irreducibility.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorReport {
    pub size: usize,
    pub max_abs_column_sum: f64,
    pub max_abs_entry: f64,
    pub min_off_diagonal: f64,
    pub scc_count: usize,
}

impl GeneratorReport {
    /// Column sums below `1e-12 max|A|`, off-diagonals `>= -1e-14`, one component.
    pub fn satisfies_hypotheses(&self) -> bool {
        self.max_abs_column_sum <= 1e-12 * self.max_abs_entry.max(f64::MIN_POSITIVE)
            && self.min_off_diagonal >= -1e-14
            && self.scc_count == 1
    }
}

impl std::fmt::Display for GeneratorReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "size {}  max|column sum| {:.3e}  max|a_ij| {:.3e}  min off-diagonal {:.3e}  strongly connected components {}",
            self.size, self.max_abs_column_sum, self.max_abs_entry, self.min_off_diagonal, self.scc_count
        )
    }
}

pub fn validate_generator(a: &SparseOperator) -> GeneratorReport {
    let sums = a.column_sums();
    let max_abs_column_sum = sums.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let mut min_off = f64::INFINITY;
    let mut max_abs = 0.0f64;
    for (r, c, v) in a.iter() {
        max_abs = max_abs.max(v.abs());
        if r != c {
            min_off = min_off.min(v);
        }
    }
    if !min_off.is_finite() {
        min_off = 0.0;
    }
    let scc = tarjan_scc(&a.digraph());
    GeneratorReport {
        size: a.dim(),
        max_abs_column_sum,
        max_abs_entry: max_abs,
        min_off_diagonal: min_off,
        scc_count: scc.count,
    }
}
