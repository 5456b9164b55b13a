//! Number theoretic transforms over `Z/P` whose base cases and modular
//! multiplications are answered from precomputed tables.
//!
//! The pipeline is: [`planner::make_plan`] picks the field prime, root of
//! unity, base size and split tree; [`tables::TableSet::build`] fills the
//! lookup tables; [`ntt::NttEngine`] runs the recursive transform; and
//! [`bigmult::Multiplier`] uses it for exact integer products.

pub mod bigmult;
pub mod counts;
pub mod error;
pub mod ntt;
pub mod numtheory;
pub mod oracle;
pub mod planner;
pub mod report;
pub mod tables;
pub mod verify;

pub use bigmult::{carry_normalize, digitize, multiply, DigitVector, Multiplier};
pub use counts::OpCounts;
pub use error::{Error, FormatError, Result};
pub use ntt::{
    base_case_direct, ntt_forward, ntt_inverse, pointwise_multiply, FieldVector, LeafMode, NttEngine,
};
pub use numtheory::RootStrategy;
pub use planner::{
    budget_check, choose_base_size, choose_tree, make_plan, make_plan_with, PlanOptions, SplitTree,
    TransformPlan,
};
pub use report::{run_bench, write_csv, BenchOptions, BenchRecord, CSV_HEADER};
pub use tables::{
    crt_combine, crt_decompose, leaf_dft_lookup, reduce_chain, tabular_mulmod, DigitProductTables,
    LeafTables, ResidueTuple, TableSet,
};
pub use verify::{run_suite, VerifyLevel, VerifyReport};
