//! Haar sampling on SO(n), SU(n), USp(n) and Monte Carlo realizations of the
//! Horn and Schur problems.

use crate::error::{check_len, HornError, Result};
use crate::exec::{fold_indexed, map_indexed, Execution};
use crate::spectra::{GroupClass, Spectrum};
use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Samples per RNG substream.
pub const CHUNK_SIZE: u64 = 1 << 14;

const KRAMERS_GAP: f64 = 1e-8;

/// The RNG owning chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

#[derive(Clone, Debug, PartialEq)]
pub enum HaarMatrix {
    /// Orthogonal n x n.
    Real(DMatrix<f64>),
    /// Unitary n x n (SU) or 2n x 2n of quaternionic form [[A, B], [-conj B, conj A]] (USp).
    Complex(DMatrix<Complex<f64>>),
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex<f64> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed element of the group, via Gaussian QR with the phase of
/// each diagonal entry of R moved back into Q.
pub fn haar_matrix<R: Rng + ?Sized>(group: GroupClass, n: usize, rng: &mut R) -> HaarMatrix {
    assert!(n >= 1, "group dimension must be positive");
    match group {
        GroupClass::So => {
            let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
            let qr = g.qr();
            let r = qr.r();
            let mut q = qr.q();
            for j in 0..n {
                if r[(j, j)] < 0.0 {
                    q.column_mut(j).neg_mut();
                }
            }
            if q.determinant() < 0.0 {
                q.column_mut(0).neg_mut();
            }
            HaarMatrix::Real(q)
        }
        GroupClass::Su => {
            let g = DMatrix::<Complex<f64>>::from_fn(n, n, |_, _| gaussian_complex(rng));
            let qr = g.qr();
            let r = qr.r();
            let mut q = qr.q();
            for j in 0..n {
                let d = r[(j, j)];
                let norm = d.norm();
                if norm > 0.0 {
                    let phase = d / norm;
                    q.column_mut(j).scale_mut_complex(phase);
                }
            }
            let det = q.determinant();
            let root = Complex::from_polar(1.0, -det.arg() / n as f64);
            q *= root;
            HaarMatrix::Complex(q)
        }
        GroupClass::Usp => HaarMatrix::Complex(haar_usp(n, rng)),
    }
}

trait ScaleComplex {
    fn scale_mut_complex(&mut self, c: Complex<f64>);
}

impl<S> ScaleComplex for nalgebra::Matrix<Complex<f64>, nalgebra::Dyn, nalgebra::U1, S>
where
    S: nalgebra::StorageMut<Complex<f64>, nalgebra::Dyn, nalgebra::U1>,
{
    fn scale_mut_complex(&mut self, c: Complex<f64>) {
        for v in self.iter_mut() {
            *v *= c;
        }
    }
}

/// Gram-Schmidt over quaternionic lines: every new column v = (x; y) comes
/// with its partner (-conj y; conj x), which is automatically orthogonal.
fn haar_usp<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex<f64>> {
    let dim = 2 * n;
    let mut m = DMatrix::<Complex<f64>>::zeros(dim, dim);
    let partner = |v: &DVector<Complex<f64>>| {
        DVector::from_fn(dim, |i, _| {
            if i < n {
                -v[n + i].conj()
            } else {
                v[i - n].conj()
            }
        })
    };
    let mut k = 0;
    while k < n {
        let mut v = DVector::<Complex<f64>>::from_fn(dim, |_, _| gaussian_complex(rng));
        for _ in 0..2 {
            for j in (0..k).chain(n..n + k) {
                let col = m.column(j);
                let proj = col.dotc(&v);
                v.axpy(-proj, &col.clone_owned(), Complex::new(1.0, 0.0));
            }
        }
        let norm = v.norm();
        if norm < 1e-8 {
            continue;
        }
        v /= Complex::new(norm, 0.0);
        let w = partner(&v);
        m.set_column(k, &v);
        m.set_column(n + k, &w);
        k += 1;
    }
    m
}

/// The standard symplectic form [[0, I], [-I, 0]].
pub fn symplectic_form(n: usize) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if j == i + n {
            Complex::new(1.0, 0.0)
        } else if i == j + n {
            Complex::new(-1.0, 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub group: GroupClass,
    pub alpha: Spectrum,
    pub beta: Spectrum,
    pub samples: u64,
    pub seed: u64,
    /// Scale of the rotated orbit: C = t V diag(alpha) V^-1 + diag(beta).
    pub t: f64,
}

impl SamplerConfig {
    pub fn new(
        group: GroupClass,
        alpha: Spectrum,
        beta: Spectrum,
        samples: u64,
        seed: u64,
    ) -> Result<Self> {
        check_len(alpha.n(), beta.n())?;
        if samples == 0 {
            return Err(HornError::InvalidArgument(
                "samples must be positive".into(),
            ));
        }
        Ok(SamplerConfig {
            group,
            alpha,
            beta,
            samples,
            seed,
            t: 1.0,
        })
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn n(&self) -> usize {
        self.alpha.n()
    }

    pub fn chunks(&self) -> u64 {
        self.samples.div_ceil(CHUNK_SIZE)
    }

    fn chunk_len(&self, chunk: u64) -> u64 {
        (self.samples - chunk * CHUNK_SIZE).min(CHUNK_SIZE)
    }
}

fn conjugated_diag_real(m: &DMatrix<f64>, d: &[f64]) -> DMatrix<f64> {
    let mut md = m.clone();
    for (j, &dj) in d.iter().enumerate() {
        md.column_mut(j).scale_mut(dj);
    }
    md * m.transpose()
}

fn conjugated_diag_complex(m: &DMatrix<Complex<f64>>, d: &[f64]) -> DMatrix<Complex<f64>> {
    let mut md = m.clone();
    for (j, &dj) in d.iter().enumerate() {
        md.column_mut(j).scale_mut(dj);
    }
    md * m.adjoint()
}

fn doubled(v: &[f64]) -> Vec<f64> {
    v.iter().chain(v.iter()).copied().collect()
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn eigenvalues_real(m: DMatrix<f64>) -> Result<Vec<f64>> {
    SymmetricEigen::try_new(m, f64::EPSILON, 10_000)
        .map(|e| sorted_desc(e.eigenvalues.iter().copied().collect()))
        .ok_or_else(|| HornError::Eigen("symmetric eigensolver did not converge".into()))
}

fn eigenvalues_hermitian(m: DMatrix<Complex<f64>>) -> Result<Vec<f64>> {
    SymmetricEigen::try_new(m, f64::EPSILON, 10_000)
        .map(|e| sorted_desc(e.eigenvalues.iter().copied().collect()))
        .ok_or_else(|| HornError::Eigen("Hermitian eigensolver did not converge".into()))
}

/// Collapses Kramers pairs of a sorted 2n spectrum.
fn kramers_collapse(ev: &[f64], scale: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(ev.len() / 2);
    for pair in ev.chunks(2) {
        let gap = (pair[0] - pair[1]).abs();
        if gap > KRAMERS_GAP * scale.max(1.0) {
            return Err(HornError::Eigen(format!("Kramers pair split by {gap:e}")));
        }
        out.push(0.5 * (pair[0] + pair[1]));
    }
    Ok(out)
}

/// Eigenvalues (decreasing) of t V diag(alpha) V^-1 + diag(beta) for one Haar V.
pub fn horn_sample_one<R: Rng + ?Sized>(
    group: GroupClass,
    alpha: &[f64],
    beta: &[f64],
    t: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let n = alpha.len();
    let ta: Vec<f64> = alpha.iter().map(|a| t * a).collect();
    match haar_matrix(group, n, rng) {
        HaarMatrix::Real(m) => {
            let mut c = conjugated_diag_real(&m, &ta);
            for (i, b) in beta.iter().enumerate() {
                c[(i, i)] += b;
            }
            eigenvalues_real(c)
        }
        HaarMatrix::Complex(m) if group == GroupClass::Su => {
            let mut c = conjugated_diag_complex(&m, &ta);
            for (i, b) in beta.iter().enumerate() {
                c[(i, i)] += b;
            }
            eigenvalues_hermitian(c)
        }
        HaarMatrix::Complex(m) => {
            let mut c = conjugated_diag_complex(&m, &doubled(&ta));
            for (i, b) in doubled(beta).iter().enumerate() {
                c[(i, i)] += b;
            }
            let scale = ta.iter().chain(beta).fold(0.0f64, |s, v| s.max(v.abs()));
            kramers_collapse(&eigenvalues_hermitian(c)?, scale)
        }
    }
}

/// Diagonal of V diag(alpha) V^-1 for one Haar V (first n entries for USp).
pub fn schur_sample_one<R: Rng + ?Sized>(
    group: GroupClass,
    alpha: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    let n = alpha.len();
    match haar_matrix(group, n, rng) {
        HaarMatrix::Real(m) => (0..n)
            .map(|i| (0..n).map(|j| m[(i, j)] * m[(i, j)] * alpha[j]).sum())
            .collect(),
        HaarMatrix::Complex(m) => {
            let cols = m.ncols();
            let a: Vec<f64> = if cols == n {
                alpha.to_vec()
            } else {
                doubled(alpha)
            };
            (0..n)
                .map(|i| (0..cols).map(|j| m[(i, j)].norm_sqr() * a[j]).sum())
                .collect()
        }
    }
}

/// All samples of one chunk.
pub fn sample_horn_chunk(cfg: &SamplerConfig, chunk: u64) -> Result<Vec<Vec<f64>>> {
    let mut rng = chunk_rng(cfg.seed, chunk);
    (0..cfg.chunk_len(chunk))
        .map(|_| {
            horn_sample_one(
                cfg.group,
                cfg.alpha.values(),
                cfg.beta.values(),
                cfg.t,
                &mut rng,
            )
        })
        .collect()
}

/// Lazy stream of Horn samples, chunk by chunk.
pub fn sample_horn(cfg: &SamplerConfig) -> impl Iterator<Item = Result<Spectrum>> + '_ {
    (0..cfg.chunks()).flat_map(move |chunk| {
        let mut rng = chunk_rng(cfg.seed, chunk);
        (0..cfg.chunk_len(chunk)).map(move |_| {
            let v = horn_sample_one(
                cfg.group,
                cfg.alpha.values(),
                cfg.beta.values(),
                cfg.t,
                &mut rng,
            )?;
            Spectrum::new(v, false)
        })
    })
}

/// Every Horn sample, generated chunk-parallel.  Order matches [`sample_horn`].
pub fn sample_horn_all(cfg: &SamplerConfig, exec: Execution) -> Result<Vec<Vec<f64>>> {
    let chunks = map_indexed(exec, cfg.chunks() as usize, |c| {
        sample_horn_chunk(cfg, c as u64)
    });
    let mut out = Vec::with_capacity(cfg.samples as usize);
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// Schur diagonals, chunk-parallel, with the same chunking as the Horn sampler.
pub fn sample_schur(
    group: GroupClass,
    alpha: &Spectrum,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Vec<Vec<f64>> {
    let chunks = samples.div_ceil(CHUNK_SIZE);
    let parts = map_indexed(exec, chunks as usize, |c| {
        let mut rng = chunk_rng(seed, c as u64);
        let len = (samples - c as u64 * CHUNK_SIZE).min(CHUNK_SIZE);
        (0..len)
            .map(|_| schur_sample_one(group, alpha.values(), &mut rng))
            .collect::<Vec<_>>()
    });
    parts.into_iter().flatten().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistBounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

/// Counts of (gamma_1, gamma_2) on a regular grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram2D {
    pub bounds: HistBounds,
    pub bins: (usize, usize),
    /// Row-major in the first coordinate: index = i * bins.1 + j.
    pub counts: Vec<u64>,
    pub total: u64,
    pub overflow: u64,
}

impl Histogram2D {
    pub fn new(bounds: HistBounds, bins: (usize, usize)) -> Result<Self> {
        if bins.0 == 0 || bins.1 == 0 {
            return Err(HornError::InvalidArgument(
                "histogram needs at least one bin per axis".into(),
            ));
        }
        if !(bounds.x_max > bounds.x_min && bounds.y_max > bounds.y_min) {
            return Err(HornError::InvalidArgument("empty histogram bounds".into()));
        }
        Ok(Histogram2D {
            bounds,
            bins,
            counts: vec![0; bins.0 * bins.1],
            total: 0,
            overflow: 0,
        })
    }

    fn axis_bin(v: f64, lo: f64, hi: f64, bins: usize) -> Option<usize> {
        if !(v >= lo && v <= hi) {
            return None;
        }
        let i = ((v - lo) / (hi - lo) * bins as f64).floor() as usize;
        Some(i.min(bins - 1))
    }

    pub fn cell_of(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let b = &self.bounds;
        let i = Self::axis_bin(x, b.x_min, b.x_max, self.bins.0)?;
        let j = Self::axis_bin(y, b.y_min, b.y_max, self.bins.1)?;
        Some((i, j))
    }

    pub fn add(&mut self, x: f64, y: f64) {
        self.total += 1;
        match self.cell_of(x, y) {
            Some((i, j)) => self.counts[i * self.bins.1 + j] += 1,
            None => self.overflow += 1,
        }
    }

    /// Adds another histogram of identical layout.
    pub fn merge(&mut self, other: &Histogram2D) -> Result<()> {
        if self.bins != other.bins || self.bounds != other.bounds {
            return Err(HornError::InvalidArgument(
                "histogram layouts differ".into(),
            ));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        self.overflow += other.overflow;
        Ok(())
    }

    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.bins.1 + j]
    }

    pub fn cell_width(&self) -> (f64, f64) {
        let b = &self.bounds;
        (
            (b.x_max - b.x_min) / self.bins.0 as f64,
            (b.y_max - b.y_min) / self.bins.1 as f64,
        )
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        let (wx, wy) = self.cell_width();
        (
            self.bounds.x_min + (i as f64 + 0.5) * wx,
            self.bounds.y_min + (j as f64 + 0.5) * wy,
        )
    }

    /// Counts divided by total and cell area.
    pub fn density(&self, i: usize, j: usize) -> f64 {
        let (wx, wy) = self.cell_width();
        self.count(i, j) as f64 / (self.total.max(1) as f64 * wx * wy)
    }

    /// CSV with header `gamma1_center,gamma2_center,count`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("gamma1_center,gamma2_center,count\n");
        for i in 0..self.bins.0 {
            for j in 0..self.bins.1 {
                let (x, y) = self.cell_center(i, j);
                s.push_str(&format!("{x},{y},{}\n", self.count(i, j)));
            }
        }
        s
    }
}

/// Folds a stream of spectra into a histogram of their first two entries.
pub fn accumulate_histogram<I>(
    stream: I,
    bounds: HistBounds,
    bins: (usize, usize),
) -> Result<Histogram2D>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut h = Histogram2D::new(bounds, bins)?;
    for g in stream {
        h.add(g[0], g.get(1).copied().unwrap_or(0.0));
    }
    Ok(h)
}

/// Chunk-parallel Horn histogram; bit-identical in every execution mode.
pub fn horn_histogram(
    cfg: &SamplerConfig,
    bounds: HistBounds,
    bins: (usize, usize),
    exec: Execution,
) -> Result<Histogram2D> {
    let empty = Histogram2D::new(bounds, bins)?;
    let chunks = cfg.chunks() as usize;
    fold_indexed(
        exec,
        chunks,
        || Ok(empty.clone()),
        |acc: Result<Histogram2D>, c| {
            let mut h = acc?;
            let mut rng = chunk_rng(cfg.seed, c as u64);
            for _ in 0..cfg.chunk_len(c as u64) {
                let g = horn_sample_one(
                    cfg.group,
                    cfg.alpha.values(),
                    cfg.beta.values(),
                    cfg.t,
                    &mut rng,
                )?;
                h.add(g[0], g.get(1).copied().unwrap_or(0.0));
            }
            Ok(h)
        },
        |a, b| {
            let mut a = a?;
            a.merge(&b?)?;
            Ok(a)
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs<T: nalgebra::ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
        m.iter().fold(0.0, |s, v| s.max(v.clone().modulus()))
    }

    #[test]
    fn orthogonal_samples() {
        let mut rng = chunk_rng(1, 0);
        for _ in 0..50 {
            let HaarMatrix::Real(m) = haar_matrix(GroupClass::So, 3, &mut rng) else {
                panic!()
            };
            let e = m.transpose() * &m - DMatrix::<f64>::identity(3, 3);
            assert!(max_abs(&e) < 1e-12);
            assert!((m.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unitary_samples() {
        let mut rng = chunk_rng(2, 0);
        for _ in 0..50 {
            let HaarMatrix::Complex(m) = haar_matrix(GroupClass::Su, 4, &mut rng) else {
                panic!()
            };
            let e = m.adjoint() * &m - DMatrix::<Complex<f64>>::identity(4, 4);
            assert!(max_abs(&e) < 1e-12);
            assert!((m.determinant() - Complex::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn symplectic_samples() {
        let mut rng = chunk_rng(3, 0);
        let j = symplectic_form(3);
        for _ in 0..50 {
            let HaarMatrix::Complex(m) = haar_matrix(GroupClass::Usp, 3, &mut rng) else {
                panic!()
            };
            let e = &m * &j * m.transpose() - &j;
            assert!(max_abs(&e) < 1e-12);
            let u = m.adjoint() * &m - DMatrix::<Complex<f64>>::identity(6, 6);
            assert!(max_abs(&u) < 1e-12);
        }
    }

    #[test]
    fn zero_beta_reproduces_alpha() {
        let alpha = [1.5, 0.25, -1.75];
        for group in [GroupClass::So, GroupClass::Su, GroupClass::Usp] {
            let mut rng = chunk_rng(4, 0);
            for _ in 0..20 {
                let g = horn_sample_one(group, &alpha, &[0.0; 3], 1.0, &mut rng).unwrap();
                for (a, b) in g.iter().zip(alpha) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn schur_diagonal_sums() {
        let a = Spectrum::new(vec![7.0, 4.0, -11.0], true).unwrap();
        for group in [GroupClass::So, GroupClass::Su, GroupClass::Usp] {
            for xi in sample_schur(group, &a, 200, 5, Execution::Sequential) {
                assert!(xi.iter().sum::<f64>().abs() < 1e-10);
                assert!(crate::spectra::permutahedron_contains(&a, &xi, 1e-9).unwrap());
            }
        }
    }

    #[test]
    fn histogram_basics() {
        let b = HistBounds {
            x_min: 0.0,
            x_max: 1.0,
            y_min: 0.0,
            y_max: 1.0,
        };
        let h = accumulate_histogram(Vec::<Vec<f64>>::new(), b, (4, 4)).unwrap();
        assert_eq!((h.total, h.overflow), (0, 0));
        let h = accumulate_histogram(vec![vec![0.3, 0.6]], b, (4, 4)).unwrap();
        assert_eq!((h.total, h.count(1, 2)), (1, 1));
        let h = accumulate_histogram(vec![vec![1.3, 0.6]], b, (4, 4)).unwrap();
        assert_eq!((h.total, h.overflow), (1, 1));
    }

    #[test]
    fn stream_matches_parallel_collection() {
        let a = Spectrum::new(vec![1.0, 0.0, -1.0], true).unwrap();
        let cfg = SamplerConfig::new(GroupClass::Su, a.clone(), a, 40_000, 9).unwrap();
        let seq: Vec<Vec<f64>> = sample_horn(&cfg)
            .map(|s| s.unwrap().values().to_vec())
            .collect();
        let par = sample_horn_all(&cfg, Execution::Parallel).unwrap();
        assert_eq!(seq, par);
    }
}
