//! Preprocessed lookup tables and their on-disk format.

pub mod digit;
pub mod format;
pub mod leaf;

pub use digit::{reduce_chain, tabular_mulmod, DigitProductTables};
pub use leaf::{
    crt_combine, crt_decompose, leaf_dft_lookup, LeafDftTables, LeafScratch, LeafTables,
    ResidueTuple,
};

use crate::error::Result;
use crate::planner::TransformPlan;

/// All tables for one plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableSet {
    pub digit: DigitProductTables,
    pub leaf: LeafTables,
}

impl TableSet {
    pub fn build(plan: &TransformPlan) -> Result<Self> {
        Ok(TableSet {
            digit: build_digit_product_tables(plan.field_prime, plan.digit_base)?,
            leaf: build_leaf_tables(plan)?,
        })
    }

    /// Exact size of every table, measured from the built contents.
    pub fn table_bits(&self) -> u128 {
        self.digit.table_bits() + self.leaf.table_bits()
    }
}

pub fn build_digit_product_tables(p: u64, radix: u64) -> Result<DigitProductTables> {
    DigitProductTables::build(p, radix)
}

pub fn build_leaf_tables(plan: &TransformPlan) -> Result<LeafTables> {
    LeafTables::build(plan)
}
