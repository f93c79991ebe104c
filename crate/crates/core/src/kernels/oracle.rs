//! Bit-exact scalar reference implementations and operation counts.

use super::data::MatrixSpec;
use super::KernelError;

/// Fractional bits of the FFT twiddle factors.
pub const TWIDDLE_FRAC_BITS: u32 = 30;
pub const FFT_POINTS: usize = 256;

pub fn check_filter(k: usize) -> Result<(), KernelError> {
    if k % 2 == 1 && (3..=11).contains(&k) {
        Ok(())
    } else {
        Err(KernelError::BadFilter(k))
    }
}

/// Same-size 2D convolution with zero padding, 64-bit accumulation and an
/// arithmetic right shift by `pscale` before truncation.
pub fn oracle_conv2d(input: &MatrixSpec, filter: &MatrixSpec, pscale: u32) -> Result<MatrixSpec, KernelError> {
    let k = filter.rows;
    if filter.cols != k {
        return Err(KernelError::BadFilter(k));
    }
    check_filter(k)?;
    let p = (k / 2) as isize;
    let (rows, cols) = (input.rows as isize, input.cols as isize);
    Ok(MatrixSpec::from_fn(input.rows, input.cols, |r, c| {
        let mut acc = 0i64;
        for i in 0..k as isize {
            for j in 0..k as isize {
                let (y, x) = (r as isize + i - p, c as isize + j - p);
                if (0..rows).contains(&y) && (0..cols).contains(&x) {
                    acc += input.at(y as usize, x as usize) as i64 * filter.at(i as usize, j as usize) as i64;
                }
            }
        }
        (acc >> pscale) as i32
    }))
}

/// `c[i][j]` = low 32 bits of the 64-bit sum over `k` of `a[i][k]·b[k][j]`.
pub fn oracle_matmul(a: &MatrixSpec, b: &MatrixSpec) -> MatrixSpec {
    assert_eq!(a.cols, b.rows);
    MatrixSpec::from_fn(a.rows, b.cols, |i, j| {
        (0..a.cols).map(|k| a.at(i, k) as i64 * b.at(k, j) as i64).sum::<i64>() as i32
    })
}

pub fn bit_reverse(k: usize, bits: u32) -> usize {
    k.reverse_bits() >> (usize::BITS - bits)
}

/// `W^j = (round(cos θ·2^30), round(−sin θ·2^30))` for θ = 2πj/256, j < 128.
pub fn twiddles() -> Vec<(i32, i32)> {
    let scale = (1u64 << TWIDDLE_FRAC_BITS) as f64;
    (0..FFT_POINTS / 2)
        .map(|j| {
            let th = 2.0 * std::f64::consts::PI * j as f64 / FFT_POINTS as f64;
            ((th.cos() * scale).round() as i32, (-th.sin() * scale).round() as i32)
        })
        .collect()
}

/// Complex product `w·b` with each component a 64-bit sum of products
/// shifted right by the twiddle precision.
#[inline]
pub fn twiddle_mul(w: (i32, i32), b: (i32, i32)) -> (i32, i32) {
    let (wr, wi) = (w.0 as i64, w.1 as i64);
    let (br, bi) = (b.0 as i64, b.1 as i64);
    (((br * wr - bi * wi) >> TWIDDLE_FRAC_BITS) as i32, ((br * wi + bi * wr) >> TWIDDLE_FRAC_BITS) as i32)
}

/// Radix-2 decimation-in-time FFT on 256 points with bit-reversed input
/// ordering and a right shift by one after every stage.
pub fn oracle_fft256(x: &[(i32, i32)]) -> Vec<(i32, i32)> {
    assert_eq!(x.len(), FFT_POINTS);
    let tw = twiddles();
    let mut v: Vec<(i32, i32)> = (0..FFT_POINTS).map(|k| x[bit_reverse(k, 8)]).collect();
    let mut h = 1;
    while h < FFT_POINTS {
        let step = FFT_POINTS / (2 * h);
        for g in (0..FFT_POINTS).step_by(2 * h) {
            for j in 0..h {
                let a = v[g + j];
                let t = twiddle_mul(tw[j * step], v[g + h + j]);
                v[g + j] = (a.0.wrapping_add(t.0) >> 1, a.1.wrapping_add(t.1) >> 1);
                v[g + h + j] = (a.0.wrapping_sub(t.0) >> 1, a.1.wrapping_sub(t.1) >> 1);
            }
        }
        h *= 2;
    }
    v
}

/// Double-precision DFT scaled by 1/n.
pub fn reference_dft(x: &[(i32, i32)]) -> Vec<(f64, f64)> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, &(xr, xi)) in x.iter().enumerate() {
                let th = -2.0 * std::f64::consts::PI * ((k * t) % n) as f64 / n as f64;
                let (c, s) = (th.cos(), th.sin());
                re += xr as f64 * c - xi as f64 * s;
                im += xr as f64 * s + xi as f64 * c;
            }
            (re / n as f64, im / n as f64)
        })
        .collect()
}

/// Multiplies and additions performed by one kernel instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OpCensus {
    pub muls: u64,
    pub adds: u64,
}

impl OpCensus {
    pub fn total(&self) -> u64 {
        self.muls + self.adds
    }
}

pub fn conv_ops(rows: usize, cols: usize, k: usize) -> OpCensus {
    let px = (rows * cols) as u64;
    let taps = (k * k) as u64;
    OpCensus { muls: px * taps, adds: px * (taps - 1) }
}

pub fn matmul_ops(n: usize) -> OpCensus {
    let n = n as u64;
    OpCensus { muls: n * n * n, adds: n * n * (n - 1) }
}

/// Each butterfly is one complex multiply (4 mul, 2 add) and two complex
/// additions (4 add).
pub fn fft_ops(points: usize) -> OpCensus {
    let butterflies = (points / 2 * points.trailing_zeros() as usize) as u64;
    OpCensus { muls: 4 * butterflies, adds: 6 * butterflies }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::data::{random_matrix, random_samples};

    #[test]
    fn conv_delta_is_identity() {
        let x = random_matrix(1, 8, 8);
        let f = MatrixSpec::from_fn(3, 3, |r, c| if r == 1 && c == 1 { 1 << 4 } else { 0 });
        assert_eq!(oracle_conv2d(&x, &f, 4).unwrap(), x);
    }

    #[test]
    fn conv_ones_counts_neighbours() {
        let x = MatrixSpec::from_fn(4, 4, |_, _| 1);
        let f = MatrixSpec::from_fn(3, 3, |_, _| 1);
        let y = oracle_conv2d(&x, &f, 0).unwrap();
        assert_eq!(y.data, vec![4, 6, 6, 4, 6, 9, 9, 6, 6, 9, 9, 6, 4, 6, 6, 4]);
    }

    #[test]
    fn conv_rejects_even_filter() {
        let x = MatrixSpec::zeros(4, 4);
        assert!(oracle_conv2d(&x, &MatrixSpec::zeros(4, 4), 0).is_err());
        assert!(oracle_conv2d(&x, &MatrixSpec::zeros(13, 13), 0).is_err());
    }

    #[test]
    fn conv_matches_padded_double_loop() {
        let x = random_matrix(5, 8, 8);
        let f = random_matrix(6, 5, 5);
        // Explicitly padded copy, then a plain valid-region correlation.
        let n = 12;
        let mut pad = vec![0i64; n * n];
        for r in 0..8 {
            for c in 0..8 {
                pad[(r + 2) * n + c + 2] = x.at(r, c) as i64;
            }
        }
        let y = oracle_conv2d(&x, &f, 0).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                let mut s = 0i64;
                for j in (0..5).rev() {
                    for i in (0..5).rev() {
                        s += pad[(r + i) * n + c + j] * f.at(i, j) as i64;
                    }
                }
                assert_eq!(y.at(r, c), s as i32);
            }
        }
    }

    #[test]
    fn matmul_identities() {
        let a = random_matrix(2, 16, 16);
        assert_eq!(oracle_matmul(&a, &MatrixSpec::identity(16)), a);
        assert_eq!(oracle_matmul(&MatrixSpec::zeros(16, 16), &a), MatrixSpec::zeros(16, 16));
    }

    #[test]
    fn matmul_loop_order_independent() {
        let a = random_matrix(3, 64, 64);
        let b = random_matrix(4, 64, 64);
        let c = oracle_matmul(&a, &b);
        let mut acc = vec![0i64; 64 * 64];
        for i in 0..64 {
            for k in 0..64 {
                for j in 0..64 {
                    acc[i * 64 + j] += a.at(i, k) as i64 * b.at(k, j) as i64;
                }
            }
        }
        assert!(acc.iter().zip(&c.data).all(|(x, y)| *x as i32 == *y));
    }

    #[test]
    fn fft_impulse_is_flat() {
        let mut x = vec![(0, 0); 256];
        x[0] = (1 << 20, 0);
        let y = oracle_fft256(&x);
        assert!(y.iter().all(|v| *v == (1 << 12, 0)));
        // Same integer rules through a direct DFT: the impulse meets only W^0.
        let d = reference_dft(&x);
        assert!(d.iter().all(|v| (v.0 - 4096.0).abs() < 1e-6 && v.1.abs() < 1e-6));
    }

    #[test]
    fn fft_zero() {
        assert!(oracle_fft256(&[(0, 0); 256]).iter().all(|v| *v == (0, 0)));
    }

    #[test]
    fn fft_close_to_double_dft() {
        for seed in 0..4 {
            let x = random_samples(seed, 256);
            let y = oracle_fft256(&x);
            let d = reference_dft(&x);
            let worst = y
                .iter()
                .zip(&d)
                .map(|(a, b)| (a.0 as f64 - b.0).abs().max((a.1 as f64 - b.1).abs()))
                .fold(0.0, f64::max);
            assert!(worst <= 512.0, "seed {seed}: {worst}");
        }
    }

    #[test]
    fn census() {
        assert_eq!(conv_ops(32, 32, 3), OpCensus { muls: 9216, adds: 8192 });
        assert_eq!(matmul_ops(64).muls, 262144);
        assert_eq!(fft_ops(256), OpCensus { muls: 4096, adds: 6144 });
    }
}
