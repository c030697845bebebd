use serde::{Deserialize, Serialize};

/// Explicit caps for the exponential and enumerative searches. Exceeding any
/// of them is a hard error, never a silent truncation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Budgets {
    /// Maximum number of free bits (components plus support points) in a
    /// firing-subset search.
    pub max_firing_bits: usize,
    /// Highest graded degree any search may visit.
    pub max_degree: u32,
    /// Maximum number of ⊙-products examined by one decomposition.
    pub max_products: u64,
    /// Maximum number of lattice points returned by one enumeration.
    pub max_elements: usize,
    /// Maximum number of vertices of a refined model.
    pub max_refined_vertices: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_firing_bits: 24,
            max_degree: 64,
            max_products: 50_000_000,
            max_elements: 2_000_000,
            max_refined_vertices: 20_000,
        }
    }
}

impl Budgets {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_firing_bits == 0
            || self.max_degree == 0
            || self.max_products == 0
            || self.max_elements == 0
            || self.max_refined_vertices == 0
        {
            return Err("budgets must be positive".into());
        }
        if self.max_firing_bits > 63 {
            return Err("max_firing_bits must be at most 63".into());
        }
        Ok(())
    }
}
