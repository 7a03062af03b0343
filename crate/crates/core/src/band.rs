//! Square band matrices in row-major band storage.

/// An n x n matrix whose nonzeros satisfy |i - j| <= `bandwidth`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    bandwidth: usize,
    // row i holds columns i - bandwidth ..= i + bandwidth
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        Self { n, bandwidth, data: vec![0.0; n * (2 * bandwidth + 1)] }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self { n: diag.len(), bandwidth: 0, data: diag.to_vec() }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    fn width(&self) -> usize {
        2 * self.bandwidth + 1
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n || j >= self.n || i.abs_diff(j) > self.bandwidth {
            return None;
        }
        Some(i * self.width() + (j + self.bandwidth - i))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Panics if (i, j) lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let s = self.slot(i, j).expect("entry outside the band");
        self.data[s] = value;
    }

    pub fn add_to(&mut self, i: usize, j: usize, value: f64) {
        let s = self.slot(i, j).expect("entry outside the band");
        self.data[s] += value;
    }

    /// Column range of row i inside the band.
    pub fn row_columns(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.bandwidth)..(i + self.bandwidth + 1).min(self.n)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row_columns(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// Matrix product; the bandwidths add.
    pub fn matmul(&self, other: &BandMatrix) -> BandMatrix {
        assert_eq!(self.n, other.n);
        let mut out = BandMatrix::zeros(self.n, self.bandwidth + other.bandwidth);
        for i in 0..self.n {
            for k in self.row_columns(i) {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in other.row_columns(k) {
                    out.add_to(i, j, a * other.get(k, j));
                }
            }
        }
        out
    }

    /// self * diag(d).
    pub fn scale_columns(&self, d: &[f64]) -> BandMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in self.row_columns(i) {
                let s = out.slot(i, j).unwrap();
                out.data[s] *= d[j];
            }
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> BandMatrix {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|a| *a *= factor);
        out
    }

    /// Sum with a matrix of possibly different bandwidth.
    pub fn plus(&self, other: &BandMatrix) -> BandMatrix {
        assert_eq!(self.n, other.n);
        let mut out = BandMatrix::zeros(self.n, self.bandwidth.max(other.bandwidth));
        for m in [self, other] {
            for i in 0..self.n {
                for j in m.row_columns(i) {
                    out.add_to(i, j, m.get(i, j));
                }
            }
        }
        out
    }

    pub fn add_diagonal(&mut self, d: &[f64]) {
        for (i, &v) in d.iter().enumerate() {
            self.add_to(i, i, v);
        }
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row_columns(i).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }
}
