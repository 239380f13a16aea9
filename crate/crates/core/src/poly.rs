//! Finite Maclaurin coefficient series (polynomials and truncations).

use num_complex::Complex64;

use crate::fft;

/// A finite coefficient sequence n ↦ f̂(n). Trailing zeros are trimmed, so
/// `degree` is the largest index with a nonzero entry.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSeries {
    coeffs: Vec<Complex64>,
}

impl CoefficientSeries {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().map_or(false, |c| c.norm() == 0.0) {
            coeffs.pop();
        }
        CoefficientSeries { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        CoefficientSeries { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_real(&[1.0])
    }

    /// z^n
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        c[n] = Complex64::new(1.0, 0.0);
        CoefficientSeries { coeffs: c }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero series.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs
            .get(n)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.coeff(i) + other.coeff(i);
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// f'
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, c)| c * n as f64)
                .collect(),
        )
    }

    /// Antiderivative with value 0 at the origin.
    pub fn primitive(&self) -> Self {
        if self.coeffs.is_empty() {
            return Self::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + 1];
        for (n, c) in self.coeffs.iter().enumerate() {
            out[n + 1] = c / (n as f64 + 1.0);
        }
        Self::new(out)
    }

    /// Coefficientwise product.
    pub fn hadamard(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) * other.coeff(i)).collect())
    }

    /// Cauchy product f·g.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Dilate: coefficients of f_r(z) = f(rz).
    pub fn dilate(&self, r: f64) -> Self {
        let mut rk = 1.0;
        Self::new(
            self.coeffs
                .iter()
                .map(|c| {
                    let v = c * rk;
                    rk *= r;
                    v
                })
                .collect(),
        )
    }

    /// Coefficient slice over [lo, hi).
    pub fn slice(&self, lo: usize, hi: usize) -> Self {
        let mut out = vec![Complex64::new(0.0, 0.0); hi.min(self.coeffs.len())];
        for (i, o) in out
            .iter_mut()
            .enumerate()
            .take(hi.min(self.coeffs.len()))
            .skip(lo)
        {
            *o = self.coeffs[i];
        }
        Self::new(out)
    }

    /// True when every coefficient is real and >= 0.
    pub fn is_nonneg_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0 && c.re >= 0.0)
    }

    /// Autocorrelation A_d = Σ_k f̂(k+d) conj(f̂(k)), d = 0..degree.
    pub fn autocorrelation(&self) -> Vec<Complex64> {
        let n = self.coeffs.len();
        (0..n)
            .map(|d| {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n - d {
                    acc += self.coeffs[k + d] * self.coeffs[k].conj();
                }
                acc
            })
            .collect()
    }

    /// Values on the circle of radius r at n-th roots of unity (n a power of
    /// two chosen at least `oversample * (degree + 1)`).
    pub fn circle_values(&self, r: f64, oversample: usize) -> Vec<Complex64> {
        let deg1 = self.coeffs.len().max(1);
        let n = fft::next_pow2((oversample * deg1).max(8));
        fft::circle_values(&self.coeffs, r, n)
    }

    /// Parse a polynomial from CSV lines `index,re[,im]` (header optional).
    pub fn from_csv(text: &str) -> crate::error::Result<Self> {
        let mut entries: Vec<(usize, Complex64)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(|c| c.trim()).collect();
            let parsed = (|| -> Option<(usize, Complex64)> {
                let idx = cols.first()?.parse::<usize>().ok()?;
                let re = cols.get(1)?.parse::<f64>().ok()?;
                let im = match cols.get(2) {
                    Some(s) if !s.is_empty() => s.parse::<f64>().ok()?,
                    _ => 0.0,
                };
                Some((idx, Complex64::new(re, im)))
            })();
            match parsed {
                Some(e) => entries.push(e),
                None if lineno == 0 => continue,
                None => {
                    return Err(crate::error::Error::Parse {
                        pos: 0,
                        msg: format!("polynomial line {} is not `index,re[,im]`", lineno + 1),
                    })
                }
            }
        }
        let deg = entries.iter().map(|e| e.0).max().unwrap_or(0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); deg + 1];
        for (i, c) in entries {
            coeffs[i] += c;
        }
        Ok(Self::new(coeffs))
    }

    /// Comma-separated coefficient list `c0,c1,...` (real) as used by
    /// `--symbol poly:...`.
    pub fn from_list(text: &str) -> crate::error::Result<Self> {
        let mut coeffs = Vec::new();
        for part in text.split(',') {
            coeffs.push(
                part.trim()
                    .parse::<f64>()
                    .map_err(|_| crate::error::Error::Parse {
                        pos: 0,
                        msg: format!("bad coefficient `{part}`"),
                    })?,
            );
        }
        Ok(Self::from_real(&coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calculus_roundtrip() {
        let f = CoefficientSeries::from_real(&[1.0, 2.0, 3.0]);
        let df = f.derivative();
        assert_eq!(df, CoefficientSeries::from_real(&[2.0, 6.0]));
        let back = df.primitive();
        // primitive drops the constant term
        assert_eq!(back, CoefficientSeries::from_real(&[0.0, 2.0, 3.0]));
    }

    #[test]
    fn hadamard_and_mul() {
        let f = CoefficientSeries::from_real(&[1.0, 2.0]);
        let g = CoefficientSeries::from_real(&[3.0, 4.0]);
        assert_eq!(f.hadamard(&g), CoefficientSeries::from_real(&[3.0, 8.0]));
        assert_eq!(f.mul(&g), CoefficientSeries::from_real(&[3.0, 10.0, 8.0]));
    }

    #[test]
    fn eval_and_dilate() {
        let f = CoefficientSeries::from_real(&[1.0, 1.0]);
        let z = Complex64::new(0.5, 0.0);
        assert!((f.eval(z) - Complex64::new(1.5, 0.0)).norm() < 1e-15);
        let fr = f.dilate(0.5);
        assert_eq!(fr, CoefficientSeries::from_real(&[1.0, 0.5]));
    }

    #[test]
    fn autocorrelation_simple() {
        let f = CoefficientSeries::from_real(&[1.0, 2.0]);
        let a = f.autocorrelation();
        assert!((a[0].re - 5.0).abs() < 1e-15);
        assert!((a[1].re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn csv_parse() {
        let f = CoefficientSeries::from_csv("index,re,im\n0,1,0\n2,0.5,-1\n").unwrap();
        assert_eq!(f.degree(), Some(2));
        assert_eq!(f.coeff(2), Complex64::new(0.5, -1.0));
    }
}
