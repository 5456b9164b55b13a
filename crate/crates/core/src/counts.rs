use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::Serialize;

/// Exact operation counters.
///
/// `mulmod` counts logical modular multiplications. The table reads, additions
/// and comparisons a multiplication performs internally are counted in the
/// other fields, so [`OpCounts::total`] covers every primitive the engine
/// executes plus one unit per logical multiply.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct OpCounts {
    pub mulmod: u64,
    pub addmod: u64,
    pub table_reads: u64,
    pub compares: u64,
}

impl OpCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn total(&self) -> u64 {
        self.mulmod + self.addmod + self.table_reads + self.compares
    }

    pub fn merge(&mut self, other: &OpCounts) {
        *self += *other;
    }
}

impl Add for OpCounts {
    type Output = OpCounts;

    fn add(self, rhs: OpCounts) -> OpCounts {
        OpCounts {
            mulmod: self.mulmod + rhs.mulmod,
            addmod: self.addmod + rhs.addmod,
            table_reads: self.table_reads + rhs.table_reads,
            compares: self.compares + rhs.compares,
        }
    }
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, rhs: OpCounts) {
        *self = *self + rhs;
    }
}

impl Sum for OpCounts {
    fn sum<I: Iterator<Item = OpCounts>>(iter: I) -> Self {
        iter.fold(OpCounts::default(), Add::add)
    }
}
