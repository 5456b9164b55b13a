//! Exact integer number theory for preprocessing: sieving, primality,
//! factorization, primes in arithmetic progressions, multiplicative orders and
//! roots of unity.
//!
//! Everything here works on `u64` with `u128` intermediates and is a pure
//! function of its inputs.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// All primes up to `limit`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeList {
    pub limit: u64,
    pub primes: Vec<u64>,
}

impl PrimeList {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

const SEGMENT: u64 = 1 << 16;

/// Segmented sieve of Eratosthenes.
pub fn sieve_primes(limit: u64) -> PrimeList {
    let mut primes = Vec::new();
    if limit < 2 {
        return PrimeList { limit, primes };
    }

    let root = isqrt(limit);
    let mut small = vec![true; root as usize + 1];
    let mut base = Vec::new();
    for i in 2..=root as usize {
        if small[i] {
            base.push(i as u64);
            let mut j = i * i;
            while j <= root as usize {
                small[j] = false;
                j += i;
            }
        }
    }

    let mut seg = vec![true; SEGMENT as usize];
    let mut low = 2u64;
    while low <= limit {
        let high = limit.min(low + SEGMENT - 1);
        let width = (high - low + 1) as usize;
        seg[..width].fill(true);
        for &p in &base {
            if p * p > high {
                break;
            }
            let start = (p * p).max(low.div_ceil(p) * p);
            let mut j = start;
            while j <= high {
                seg[(j - low) as usize] = false;
                j += p;
            }
        }
        primes.extend(
            seg[..width]
                .iter()
                .enumerate()
                .filter(|(_, &keep)| keep)
                .map(|(i, _)| low + i as u64),
        );
        if high == limit {
            break;
        }
        low = high + 1;
    }
    PrimeList { limit, primes }
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    let mut limit = 64u64;
    loop {
        let list = sieve_primes(limit);
        if list.len() >= count {
            return list.primes[..count].to_vec();
        }
        limit *= 2;
    }
}

pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization: `value = Π prime^exponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub value: u64,
    pub factors: BTreeMap<u64, u32>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.keys().copied()
    }

    pub fn largest_prime(&self) -> Option<u64> {
        self.factors.keys().next_back().copied()
    }

    /// Euler's totient of `value`.
    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|(&p, &e)| (p - 1) * p.pow(e - 1))
            .product()
    }
}

pub fn factorize(n: u64) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut factors = BTreeMap::new();
    let mut rest = n;
    for p in [2u64, 3, 5] {
        while rest.is_multiple_of(p) {
            *factors.entry(p).or_insert(0) += 1;
            rest /= p;
        }
    }
    // wheel mod 30 trial division for the small part
    const STEPS: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut p = 7u64;
    let mut i = 0;
    while p <= 1 << 12 && p * p <= rest {
        while rest.is_multiple_of(p) {
            *factors.entry(p).or_insert(0) += 1;
            rest /= p;
        }
        p += STEPS[i];
        i = (i + 1) % STEPS.len();
    }
    if rest > 1 {
        split_large(rest, &mut factors);
    }
    Factorization { value: n, factors }
}

fn split_large(n: u64, factors: &mut BTreeMap<u64, u32>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        *factors.entry(n).or_insert(0) += 1;
        return;
    }
    let mut c = 1;
    let d = loop {
        if let Some(d) = pollard_brent(n, c) {
            break d;
        }
        c += 1;
    };
    split_large(d, factors);
    split_large(n / d, factors);
}

/// Brent's variant of Pollard rho. Returns a nontrivial factor or `None` when
/// the walk for this increment degenerates.
fn pollard_brent(n: u64, c: u64) -> Option<u64> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    let f = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
    let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
    let mut g = 1u64;
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..128.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = gcd(q, n);
            k += 128;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

/// Smallest prime in the progression `n*d + 1`, `d >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProgressionPrime {
    pub prime: u64,
    pub multiplier: u64,
    /// Whether `prime <= n^L` for the requested Linnik exponent.
    pub within_linnik_bound: bool,
}

pub fn find_field_prime(n: u64, linnik_l: u32) -> Result<ProgressionPrime> {
    find_field_prime_above(n, linnik_l, 0)
}

/// Smallest prime `P = n*d + 1` with `d >= 1` and `P > floor`.
///
/// The scan gives up past `max(n^(L+1), 2*floor)`; reaching that cap means the
/// input is pathological.
pub fn find_field_prime_above(n: u64, linnik_l: u32, floor: u64) -> Result<ProgressionPrime> {
    if n < 2 {
        return Err(Error::invalid(format!("progression step must be >= 2, got {n}")));
    }
    if linnik_l < 1 {
        return Err(Error::invalid("Linnik exponent must be >= 1"));
    }
    let bound = saturating_pow(n, linnik_l);
    let cap = saturating_pow(n, linnik_l + 1).max(floor.saturating_mul(2));
    let mut d = (floor / n).max(1);
    loop {
        let candidate = match n.checked_mul(d).and_then(|v| v.checked_add(1)) {
            Some(c) if c <= cap => c,
            _ => return Err(Error::SearchExhausted { n, cap }),
        };
        if candidate > floor && is_prime(candidate) {
            return Ok(ProgressionPrime {
                prime: candidate,
                multiplier: d,
                within_linnik_bound: candidate <= bound,
            });
        }
        d += 1;
    }
}

fn saturating_pow(base: u64, exp: u32) -> u64 {
    base.checked_pow(exp).unwrap_or(u64::MAX)
}

/// Smallest `t >= 1` with `a^t = 1 (mod modulus)`, found by stripping prime
/// factors from `phi(modulus)`.
pub fn multiplicative_order(a: u64, modulus: u64) -> Result<u64> {
    if modulus < 2 {
        return Err(Error::invalid("modulus must be >= 2"));
    }
    if gcd(a % modulus, modulus) != 1 {
        return Err(Error::invalid(format!("gcd({a}, {modulus}) != 1")));
    }
    let phi = factorize(modulus).phi();
    Ok(order_dividing(a, phi, &factorize(phi), modulus))
}

/// Order of `a` given a multiple `exponent` of it and that multiple's factorization.
fn order_dividing(a: u64, exponent: u64, factors: &Factorization, modulus: u64) -> u64 {
    let mut t = exponent;
    for (&p, &e) in &factors.factors {
        for _ in 0..e {
            if t.is_multiple_of(p) && pow_mod(a, t / p, modulus) == 1 {
                t /= p;
            } else {
                break;
            }
        }
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootStrategy {
    /// Sweep candidates upward, skipping members of subgroups already shown
    /// not to contain an element of order `n`.
    DeterministicSweep,
    /// Seeded random candidates.
    Randomized { seed: u64 },
}

const SWEEP_MASK_LIMIT: u64 = 1 << 22;
const SWEEP_WALK_LIMIT: u64 = 1 << 16;

/// An element of multiplicative order exactly `n` modulo the prime `p`.
pub fn find_root_of_unity(p: u64, n: u64, strategy: RootStrategy) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if n == 0 || !(p - 1).is_multiple_of(n) {
        return Err(Error::invalid(format!("{n} does not divide {p} - 1")));
    }
    if n == 1 {
        return Ok(1);
    }
    let group_order = p - 1;
    let factors = factorize(group_order);
    let lift = |g: u64| -> Option<u64> {
        let ord = order_dividing(g, group_order, &factors, p);
        ord.is_multiple_of(n).then(|| pow_mod(g, ord / n, p))
    };

    match strategy {
        RootStrategy::DeterministicSweep => {
            let mut eliminated = vec![false; p.min(SWEEP_MASK_LIMIT) as usize];
            for g in 2..p {
                if eliminated.get(g as usize).copied().unwrap_or(false) {
                    continue;
                }
                let ord = order_dividing(g, group_order, &factors, p);
                if ord.is_multiple_of(n) {
                    return Ok(pow_mod(g, ord / n, p));
                }
                // every power of g has order dividing ord, so none can work
                if ord <= SWEEP_WALK_LIMIT {
                    let mut x = g;
                    for _ in 0..ord {
                        if let Some(slot) = eliminated.get_mut(x as usize) {
                            *slot = true;
                        }
                        x = mul_mod(x, g, p);
                    }
                }
            }
            unreachable!("a generator of the cyclic group always qualifies")
        }
        RootStrategy::Randomized { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            loop {
                let g = rng.gen_range(2..p);
                if let Some(w) = lift(g) {
                    return Ok(w);
                }
            }
        }
    }
}

/// True when `w` has order exactly `n` modulo `p`.
pub fn has_exact_order(w: u64, n: u64, p: u64) -> bool {
    if pow_mod(w, n, p) != 1 {
        return false;
    }
    factorize(n).primes().all(|t| pow_mod(w, n / t, p) != 1)
}
