use std::fmt::Write as _;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use super::SpectralError;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, SpectralError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(SpectralError::Ragged);
        }
        let data: Vec<_> = rows.iter().flatten().copied().collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SpectralError::NonFinite);
        }
        Ok(ComplexMatrix { rows: rows.len(), cols, data })
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// `(ω^{jk})` with `ω = e^{2πi/n}`.
    pub fn dft(n: usize) -> Self {
        Self::from_fn(n, n, |j, k| root_of_unity(j * k, n))
    }

    /// Matrix of `y ↦ a ⊛ y` (cyclic convolution with fixed `a`) acting on
    /// column vectors: entry `(k, j)` is `a[(k - j) mod n]`.
    pub fn circulant(a: &[Complex64]) -> Self {
        let n = a.len();
        Self::from_fn(n, n, |k, j| a[(k + n - j) % n])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| c * z).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SpectralError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SpectralError> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self, SpectralError> {
        if self.shape() != other.shape() {
            return Err(SpectralError::ShapeMismatch { left: self.shape(), right: other.shape() });
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(ComplexMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, SpectralError> {
        if self.cols != other.rows {
            return Err(SpectralError::ShapeMismatch { left: self.shape(), right: other.shape() });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let src = other.row(k);
                for (dst, &b) in out.row_mut(i).iter_mut().zip(src) {
                    *dst += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols, "vector length must match column count");
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Submatrix with the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(rows.len(), self.cols, |i, j| self[(rows[i], j)])
    }

    /// Determinant by LU with partial pivoting.
    pub fn determinant(&self) -> Result<Complex64, SpectralError> {
        if self.rows != self.cols {
            return Err(SpectralError::NotSquare(self.shape()));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = ONE;
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&p, &q| a[p * n + k].norm().total_cmp(&a[q * n + k].norm()))
                .unwrap();
            if a[pivot * n + k] == ZERO {
                return Ok(ZERO);
            }
            if pivot != k {
                for j in 0..n {
                    a.swap(k * n + j, pivot * n + j);
                }
                det = -det;
            }
            let p = a[k * n + k];
            det *= p;
            for i in k + 1..n {
                let factor = a[i * n + k] / p;
                if factor == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let v = a[k * n + j];
                    a[i * n + j] -= factor * v;
                }
            }
        }
        Ok(det)
    }

    /// Matrix file format: `m n`, then `m` lines of `n` tokens `(re,im)`.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|z| format!("({},{})", z.re, z.im)).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    /// Parses the matrix file format. Plain real tokens are accepted too.
    pub fn parse(text: &str) -> Result<Self, SpectralError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let bad = |line: usize, message: String| SpectralError::Parse { line, message };
        let (ln, header) = lines.next().ok_or_else(|| bad(0, "empty matrix file".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(ln, format!("bad dimension `{t}`"))))
            .collect::<Result<_, _>>()?;
        let [m, n] = dims[..] else {
            return Err(bad(ln, "expected `m n`".into()));
        };
        let mut data = Vec::with_capacity(m * n);
        for _ in 0..m {
            let (ln, line) = lines.next().ok_or_else(|| bad(0, format!("expected {m} rows")))?;
            let row = parse_complex_tokens(line).map_err(|message| bad(ln, message))?;
            if row.len() != n {
                return Err(bad(ln, format!("expected {n} entries, found {}", row.len())));
            }
            data.extend(row);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(bad(ln, "trailing content".into()));
        }
        Ok(ComplexMatrix { rows: m, cols: n, data })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// `e^{2πi k/n}`, exact on multiples of a quarter turn.
pub fn root_of_unity(k: usize, n: usize) -> Complex64 {
    let k = k % n;
    if (4 * k).is_multiple_of(n) {
        return match 4 * k / n {
            0 => ONE,
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
    Complex64::new(angle.cos(), angle.sin())
}

/// Whitespace-separated complex tokens: `(re,im)` or a bare real.
pub fn parse_complex_tokens(line: &str) -> Result<Vec<Complex64>, String> {
    line.split_whitespace()
        .map(|tok| {
            let value = if let Some(inner) = tok.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
                let (re, im) = inner.split_once(',').ok_or_else(|| format!("bad entry `{tok}`"))?;
                let re: f64 = re.trim().parse().map_err(|_| format!("bad entry `{tok}`"))?;
                let im: f64 = im.trim().parse().map_err(|_| format!("bad entry `{tok}`"))?;
                Complex64::new(re, im)
            } else {
                Complex64::new(tok.parse().map_err(|_| format!("bad entry `{tok}`"))?, 0.0)
            };
            if value.re.is_finite() && value.im.is_finite() {
                Ok(value)
            } else {
                Err(format!("non-finite entry `{tok}`"))
            }
        })
        .collect()
}
