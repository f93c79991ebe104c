//! Deterministic test data.
//!
//! The generator is a 64-bit linear congruential generator with multiplier
//! 6364136223846793005 and increment 1442695040888963407. Each value takes
//! the upper 32 bits of the state, reduces them modulo 2^21 − 1 and shifts
//! the result to the symmetric range −(2^20 − 1) ..= 2^20 − 1.

pub const LCG_MUL: u64 = 6364136223846793005;
pub const LCG_INC: u64 = 1442695040888963407;
pub const VALUE_BOUND: i32 = (1 << 20) - 1;

#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        // One warm-up step so that small seeds do not start near zero.
        let mut g = Lcg { state: seed };
        g.next_u64();
        g
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(LCG_MUL).wrapping_add(LCG_INC);
        self.state
    }

    /// A value in `-VALUE_BOUND ..= VALUE_BOUND`.
    pub fn next_value(&mut self) -> i32 {
        let hi = self.next_u64() >> 32;
        (hi % (2 * VALUE_BOUND as u64 + 1)) as i32 - VALUE_BOUND
    }

    /// A value in `-bound ..= bound`.
    pub fn next_bounded(&mut self, bound: i32) -> i32 {
        let hi = self.next_u64() >> 32;
        (hi % (2 * bound as u64 + 1)) as i32 - bound
    }
}

/// Row-major matrix of 32-bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixSpec {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i32>,
}

impl MatrixSpec {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatrixSpec { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i32) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        MatrixSpec { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| (r == c) as i32)
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> i32 {
        self.data[r * self.cols + c]
    }

    pub fn words(&self) -> Vec<u32> {
        self.data.iter().map(|v| *v as u32).collect()
    }
}

pub fn random_matrix(seed: u64, rows: usize, cols: usize) -> MatrixSpec {
    let mut g = Lcg::new(seed);
    MatrixSpec::from_fn(rows, cols, |_, _| g.next_value())
}

/// Matrix with entries in `-bound ..= bound`.
pub fn random_matrix_bounded(seed: u64, rows: usize, cols: usize, bound: i32) -> MatrixSpec {
    let mut g = Lcg::new(seed);
    let data = (0..rows * cols).map(|_| g.next_bounded(bound)).collect();
    MatrixSpec { rows, cols, data }
}

/// `n` complex samples as (re, im) pairs.
pub fn random_samples(seed: u64, n: usize) -> Vec<(i32, i32)> {
    let mut g = Lcg::new(seed);
    (0..n).map(|_| (g.next_value(), g.next_value())).collect()
}

/// Seed for one hart's data, derived from the run seed.
pub fn hart_seed(seed: u64, hart: usize, stream: u64) -> u64 {
    let mut g = Lcg::new(seed ^ ((hart as u64 + 1) << 40) ^ (stream << 20));
    g.next_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        assert_eq!(random_matrix(7, 4, 4), random_matrix(7, 4, 4));
        assert_ne!(random_matrix(0, 1, 1).data[0], random_matrix(1, 1, 1).data[0]);
    }

    #[test]
    fn bounded() {
        let mut g = Lcg::new(3);
        let mut lo = 0;
        let mut hi = 0;
        for _ in 0..1_000_000 {
            let v = g.next_value();
            assert!(v.abs() < 1 << 20);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        assert!(lo < -(1 << 19) && hi > 1 << 19);
    }
}
