//! Radix-2 FFT used for circle quadrature of polynomials.

use num_complex::Complex64;

/// In-place radix-2 Cooley–Tukey transform. `inverse` flips the twiddle sign
/// but applies no 1/n scaling. Length must be a power of two.
pub fn fft(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "fft length must be a power of two");
    if n <= 1 {
        return;
    }

    // bit reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }

    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * std::f64::consts::PI / len as f64;
        let wlen = Complex64::from_polar(1.0, ang);
        for chunk in buf.chunks_mut(len) {
            let mut w = Complex64::new(1.0, 0.0);
            for i in 0..len / 2 {
                let u = chunk[i];
                let v = chunk[i + len / 2] * w;
                chunk[i] = u + v;
                chunk[i + len / 2] = u - v;
                w *= wlen;
            }
        }
        len <<= 1;
    }
}

/// Smallest power of two >= n.
pub fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// Values of Σ c_k z^k at the n-th roots of unity scaled by radius r:
/// out[m] = f(r e^{2πi m/n}). n must be a power of two >= coeffs.len().
pub fn circle_values(coeffs: &[Complex64], r: f64, n: usize) -> Vec<Complex64> {
    assert!(n >= coeffs.len());
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let mut rk = 1.0;
    for (k, c) in coeffs.iter().enumerate() {
        buf[k] = c * rk;
        rk *= r;
    }
    fft(&mut buf, true);
    buf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_evaluation() {
        let coeffs: Vec<Complex64> = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(-0.5, 0.25),
        ];
        let n = 8;
        let vals = circle_values(&coeffs, 0.7, n);
        for m in 0..n {
            let theta = 2.0 * std::f64::consts::PI * m as f64 / n as f64;
            let z = Complex64::from_polar(0.7, theta);
            let direct = coeffs[0] + coeffs[1] * z + coeffs[2] * z * z;
            assert!((vals[m] - direct).norm() < 1e-12);
        }
    }
}
