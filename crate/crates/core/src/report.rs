//! Operation-count benchmarks and their CSV rows.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::counts::OpCounts;
use crate::error::{Error, Result};
use crate::ntt::{LeafMode, NttEngine};
use crate::oracle::naive_dft;
use crate::planner::{make_plan_with, PlanOptions};

pub const CSV_HEADER: &str = "n,mode,mulmod,addmod,table_reads,compares,wall_time_ns,ratio";

/// Largest size checked against the quadratic oracle during a bench run.
pub const ORACLE_LIMIT: usize = 4096;

/// One forward transform of one size in one mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub n: usize,
    pub mode: String,
    pub mulmod: u64,
    pub addmod: u64,
    pub table_reads: u64,
    pub compares: u64,
    pub wall_time_ns: u64,
    /// Total counted operations over `n log2 n`.
    pub ratio: f64,
}

impl BenchRecord {
    pub fn counts(&self) -> OpCounts {
        OpCounts {
            mulmod: self.mulmod,
            addmod: self.addmod,
            table_reads: self.table_reads,
            compares: self.compares,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub plan: PlanOptions,
    /// Compare each output with the other mode and, for small sizes, with the
    /// oracle.
    pub verify: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            plan: PlanOptions::default(),
            verify: true,
        }
    }
}

pub fn nlogn(n: usize) -> f64 {
    let n = n as f64;
    n * n.log2()
}

/// Plan each target size, then time and count one forward transform per mode.
pub fn run_bench(sizes: &[u64], modes: &[LeafMode], opts: &BenchOptions) -> Result<Vec<BenchRecord>> {
    let mut records = Vec::with_capacity(sizes.len() * modes.len());
    for &target in sizes {
        let engine = NttEngine::build(make_plan_with(target, &opts.plan)?)?;
        let n = engine.len();
        let p = engine.modulus();
        let mut rng = ChaCha8Rng::seed_from_u64(opts.plan.seed ^ target);
        let x: Vec<u64> = (0..n).map(|_| rng.gen_range(0..p)).collect();
        let reference = (opts.verify && n <= ORACLE_LIMIT).then(|| naive_dft(&x, engine.plan().root, p));
        let mut previous: Option<Vec<u64>> = None;
        for &mode in modes {
            let mut counts = OpCounts::new();
            let start = Instant::now();
            let y = engine.forward(&x, mode, &mut counts)?;
            let wall = start.elapsed().as_nanos() as u64;
            if opts.verify {
                if reference.as_ref().is_some_and(|r| *r != y) {
                    return Err(Error::Mismatch(format!("n = {n}, {} mode differs from the oracle", mode.name())));
                }
                if previous.as_ref().is_some_and(|prev| *prev != y) {
                    return Err(Error::Mismatch(format!("n = {n}, leaf modes disagree")));
                }
                previous = Some(y);
            }
            records.push(BenchRecord {
                n,
                mode: mode.name().to_string(),
                mulmod: counts.mulmod,
                addmod: counts.addmod,
                table_reads: counts.table_reads,
                compares: counts.compares,
                wall_time_ns: wall,
                ratio: counts.total() as f64 / nlogn(n),
            });
        }
    }
    Ok(records)
}

pub fn write_csv<W: Write>(out: W, records: &[BenchRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(CSV_HEADER.split(','))
            .map_err(|e| Error::invalid(e.to_string()))?;
    }
    for r in records {
        w.serialize(r).map_err(|e| Error::invalid(e.to_string()))?;
    }
    w.flush().map_err(crate::error::FormatError::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_rows() {
        let records = run_bench(&[16, 81], &[LeafMode::Direct, LeafMode::Lookup], &BenchOptions::default()).unwrap();
        assert_eq!(records.len(), 4);
        let mut buf = Vec::new();
        write_csv(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.count(), 4);

        let mut empty = Vec::new();
        write_csv(&mut empty, &[]).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap().trim_end(), CSV_HEADER);
    }

    #[test]
    fn direct_rows_read_only_twiddles_and_powers() {
        let opts = BenchOptions {
            plan: PlanOptions {
                base_size: Some(2),
                ..PlanOptions::default()
            },
            verify: true,
        };
        let records = run_bench(&[16], &[LeafMode::Direct, LeafMode::Lookup], &opts).unwrap();
        let (direct, lookup) = (&records[0], &records[1]);
        assert_eq!(direct.n, 16);
        assert_eq!(direct.mulmod, 176);
        assert!(lookup.table_reads > 0);
        assert!(lookup.mulmod < direct.mulmod);
    }
}
