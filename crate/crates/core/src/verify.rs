//! Invariant runner for a plan and its tables, in memory or loaded from disk.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::counts::OpCounts;
use crate::error::Result;
use crate::ntt::{LeafMode, NttEngine};
use crate::numtheory::{is_prime, mul_mod, pow_mod};
use crate::oracle::naive_dft;
use crate::planner::TransformPlan;
use crate::tables::leaf::leaf_matrix;
use crate::tables::{crt_combine, crt_decompose, tabular_mulmod, TableSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyLevel {
    Quick,
    Full,
}

impl std::str::FromStr for VerifyLevel {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(VerifyLevel::Quick),
            "full" => Ok(VerifyLevel::Full),
            other => Err(crate::error::Error::invalid(format!("unknown level {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: u64,
    pub total: u64,
}

impl CheckResult {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::ok)
    }

    fn record(&mut self, name: &'static str, results: impl IntoIterator<Item = bool>) {
        let (mut passed, mut total) = (0, 0);
        for ok in results {
            total += 1;
            passed += ok as u64;
        }
        self.checks.push(CheckResult { name, passed, total });
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.ok() { "ok" } else { "FAILED" };
            writeln!(f, "{:<18} {}/{} {}", c.name, c.passed, c.total, tag)?;
        }
        Ok(())
    }
}

/// Run every invariant on `plan` and `tables`. `Quick` samples; `Full`
/// enumerates where the domain is small and samples more elsewhere.
pub fn run_suite(plan: &TransformPlan, tables: &TableSet, level: VerifyLevel, seed: u64) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerifyReport::default();
    let full = level == VerifyLevel::Full;
    let p = plan.field_prime;
    let n = plan.length_n as u64;
    let samples = if full { 2000 } else { 100 };

    report.record(
        "plan",
        [
            plan.validate().is_ok(),
            is_prime(p),
            p % n == 1,
            pow_mod(plan.root, n, p) == 1,
            tables.table_bits() == plan.layout().total_bits()?,
        ],
    );

    let digit = &tables.digit;
    let radix = digit.radix();
    let shift = pow_mod(2, digit.digit_bits() as u64, p);
    let entry_ok = |level: usize, a: u64, b: u64| {
        let scale = pow_mod(shift, level as u64, p);
        digit.entry(level, a, b) == mul_mod(mul_mod(a, b, p), scale, p)
    };
    let entries: Vec<bool> = if full && digit.entries().len() <= 1 << 20 {
        (0..digit.levels())
            .flat_map(|l| (0..radix).flat_map(move |a| (0..radix).map(move |b| (l, a, b))))
            .map(|(l, a, b)| entry_ok(l, a, b))
            .collect()
    } else {
        (0..samples)
            .map(|_| entry_ok(rng.gen_range(0..digit.levels()), rng.gen_range(0..radix), rng.gen_range(0..radix)))
            .collect()
    };
    report.record("digit-product", entries);

    let mut counts = OpCounts::new();
    let muls: Vec<bool> = (0..samples)
        .map(|_| {
            let (a, b) = (rng.gen_range(0..p), rng.gen_range(0..p));
            tabular_mulmod(a, b, digit, &mut counts) == mul_mod(a, b, p)
        })
        .collect();
    report.record("tabular-mulmod", muls);

    let leaf = &tables.leaf;
    let crt: Vec<bool> = if full && p <= 1 << 16 {
        (0..p)
            .map(|c| crt_combine(&crt_decompose(c, leaf, &mut counts), leaf, &mut counts).ok() == Some(c as u128))
            .collect()
    } else {
        (0..samples)
            .map(|_| {
                let c = rng.gen_range(0..p);
                crt_combine(&crt_decompose(c, leaf, &mut counts), leaf, &mut counts).ok() == Some(c as u128)
            })
            .collect()
    };
    report.record("crt-roundtrip", crt);

    let mut dft_checks = Vec::new();
    for t in leaf.dft_tables() {
        let s = t.size;
        let matrix = leaf_matrix(plan, s);
        for (j, &q) in leaf.leaf_primes().iter().enumerate() {
            let tuples = if full { 200 } else { 10 };
            for _ in 0..tuples {
                let tuple: Vec<u64> = (0..s).map(|_| rng.gen_range(0..q)).collect();
                let expected: Vec<u64> = (0..s)
                    .map(|k| (0..s).map(|i| tuple[i] * (matrix[i * s + k] % q)).sum::<u64>() % q)
                    .collect();
                let got = leaf.dft_entry(j, &tuple).map(|row| row.iter().map(|&v| v as u64).collect::<Vec<_>>());
                dft_checks.push(got.as_deref() == Some(expected.as_slice()));
            }
        }
    }
    report.record("leaf-dft", dft_checks);

    let engine = NttEngine::new(plan.clone(), tables.clone())?;
    let vectors = match (level, plan.length_n) {
        (VerifyLevel::Quick, _) => 2,
        (VerifyLevel::Full, n) if n <= 4096 => 10,
        (VerifyLevel::Full, _) => 1,
    };
    let mut transforms = Vec::new();
    for _ in 0..vectors {
        let x: Vec<u64> = (0..plan.length_n).map(|_| rng.gen_range(0..p)).collect();
        let reference = if plan.length_n <= 1 << 14 {
            Some(naive_dft(&x, plan.root, p))
        } else {
            None
        };
        for mode in [LeafMode::Lookup, LeafMode::Direct] {
            let y = engine.forward(&x, mode, &mut counts)?;
            let back = engine.inverse(&y, mode, &mut counts)?;
            transforms.push(reference.as_ref().is_none_or(|r| *r == y) && back == x);
        }
    }
    report.record("transform", transforms);
    Ok(report)
}
