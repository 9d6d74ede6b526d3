//! Discretized free bosonic field theories: grids, phase-space states, and
//! the spectral operators (`mu` realizations, Laplacians, projectors) from
//! which the Minkowski, Rindler, and electromagnetic complex structures and
//! their number/energy functionals are built.

pub mod maxwell;
pub mod scalar;

pub use maxwell::{
    build_mu_maxwell, closed_form_hamiltonian_maxwell, curl, divergence, divfree_l2_basis,
    helmholtz_project, random_divfree,
};
pub use scalar::{
    alpha_basis, build_mu_minkowski, build_mu_rindler, build_mu_rindler_squared,
    closed_form_hamiltonian_minkowski, closed_form_hamiltonian_rindler,
    closed_form_total_number, complex_structure_from_mu, complex_structure_minkowski,
    fourier_l2_basis, hamiltonian, number_functional, sine_l2_basis, total_number, AlphaSide,
    FrequencyStructure,
};

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use rustfft::FftPlanner;

/// Spatial discretization of the initial-data surface.
///
/// `PeriodicTorus` samples `[0, L)^d` uniformly (`d` in {1, 3}); `HalfLine`
/// samples the interior of `(0, L)` with homogeneous Dirichlet boundary
/// values, standing in for compactly supported data on the right wedge.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldGrid {
    PeriodicTorus { dim: usize, extent: f64, n: usize },
    HalfLine { extent: f64, n: usize },
}

impl FieldGrid {
    pub fn torus(dim: usize, extent: f64, n: usize) -> Result<Self> {
        if dim != 1 && dim != 3 {
            return Err(Error::InvalidConfig(format!(
                "torus dimension must be 1 or 3, got {dim}"
            )));
        }
        if n == 0 || n % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "torus needs an even positive point count per axis, got {n}"
            )));
        }
        if extent <= 0.0 {
            return Err(Error::InvalidConfig(format!("extent must be positive, got {extent}")));
        }
        Ok(FieldGrid::PeriodicTorus { dim, extent, n })
    }

    pub fn half_line(extent: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("half-line needs at least one interior point".into()));
        }
        if extent <= 0.0 {
            return Err(Error::InvalidConfig(format!("extent must be positive, got {extent}")));
        }
        Ok(FieldGrid::HalfLine { extent, n })
    }

    /// Total number of sample points of a scalar grid function.
    pub fn points(&self) -> usize {
        match self {
            FieldGrid::PeriodicTorus { dim, n, .. } => n.pow(*dim as u32),
            FieldGrid::HalfLine { n, .. } => *n,
        }
    }

    /// Quadrature weight of one sample (the cell volume).
    pub fn weight(&self) -> f64 {
        match self {
            FieldGrid::PeriodicTorus { dim, extent, n } => (extent / *n as f64).powi(*dim as i32),
            // interior points x_i = (i+1) h with h = L/(n+1); the trapezoid
            // rule with zero Dirichlet endpoints reduces to h * sum
            FieldGrid::HalfLine { extent, n } => extent / (*n as f64 + 1.0),
        }
    }

    /// Coordinate of sample `i` along one axis.
    pub fn axis_coord(&self, i: usize) -> f64 {
        match self {
            FieldGrid::PeriodicTorus { extent, n, .. } => *extent * i as f64 / *n as f64,
            FieldGrid::HalfLine { extent, n } => *extent * (i as f64 + 1.0) / (*n as f64 + 1.0),
        }
    }

    /// Signed integer mode along one torus axis for FFT bin `i`.
    pub fn axis_mode(&self, i: usize) -> i64 {
        let n = match self {
            FieldGrid::PeriodicTorus { n, .. } => *n,
            FieldGrid::HalfLine { n, .. } => *n,
        };
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Wavenumber along one torus axis for FFT bin `i`.
    pub fn axis_wavenumber(&self, i: usize) -> f64 {
        match self {
            FieldGrid::PeriodicTorus { extent, .. } => {
                2.0 * std::f64::consts::PI * self.axis_mode(i) as f64 / extent
            }
            FieldGrid::HalfLine { .. } => 0.0,
        }
    }

    /// Wavenumber vector for a flat mode index on the torus.
    pub fn wavevector(&self, flat: usize) -> Vec<f64> {
        match self {
            FieldGrid::PeriodicTorus { dim, n, .. } => {
                let mut k = vec![0.0; *dim];
                let mut rest = flat;
                for axis in (0..*dim).rev() {
                    k[axis] = self.axis_wavenumber(rest % n);
                    rest /= n;
                }
                k
            }
            FieldGrid::HalfLine { .. } => vec![],
        }
    }

    fn check_scalar(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.points() {
            return Err(Error::GridMismatch(format!(
                "grid function has {} samples, grid has {} points",
                f.len(),
                self.points()
            )));
        }
        Ok(())
    }
}

/// A phase-space point: scalar pairs `(pi, phi)` for Klein-Gordon/Rindler,
/// divergence-free pairs `(E, A)` for Maxwell.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldState {
    Scalar { pi: Vec<f64>, phi: Vec<f64> },
    Vector { e: [Vec<f64>; 3], a: [Vec<f64>; 3] },
}

impl FieldState {
    pub fn scalar(pi: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if pi.len() != phi.len() {
            return Err(Error::DimensionMismatch(format!(
                "pi has {} samples, phi has {}",
                pi.len(),
                phi.len()
            )));
        }
        Ok(FieldState::Scalar { pi, phi })
    }

    pub fn vector(e: [Vec<f64>; 3], a: [Vec<f64>; 3]) -> Result<Self> {
        let n = e[0].len();
        if e.iter().chain(a.iter()).any(|c| c.len() != n) {
            return Err(Error::DimensionMismatch(
                "all six field components must have equal length".into(),
            ));
        }
        Ok(FieldState::Vector { e, a })
    }

    /// Flatten into stacked `(momentum, configuration)` sample vectors.
    pub fn flatten(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            FieldState::Scalar { pi, phi } => (pi.clone(), phi.clone()),
            FieldState::Vector { e, a } => (e.concat(), a.concat()),
        }
    }

    /// Samples per component (grid points this state lives on).
    pub fn points(&self) -> usize {
        match self {
            FieldState::Scalar { pi, .. } => pi.len(),
            FieldState::Vector { e, .. } => e[0].len(),
        }
    }

    pub fn components(&self) -> usize {
        match self {
            FieldState::Scalar { .. } => 1,
            FieldState::Vector { .. } => 3,
        }
    }
}

/// Concrete realization of a frequency operator or differential operator.
#[derive(Clone, Debug)]
pub enum Realization {
    /// Real symbol value per flat Fourier mode of the torus.
    FourierMultiplier(Vec<f64>),
    /// Dense symmetric matrix on the half-line interior grid.
    DenseSymmetric(DMatrix<f64>),
}

/// A symmetric operator on scalar grid functions, applied componentwise to
/// stacked vector fields.  Fourier multipliers act spectrally on the torus;
/// dense matrices act directly on the half-line grid.
#[derive(Clone, Debug)]
pub struct SpectralOperator {
    grid: FieldGrid,
    realization: Realization,
}

impl SpectralOperator {
    pub fn multiplier(grid: FieldGrid, symbol: Vec<f64>) -> Result<Self> {
        if symbol.len() != grid.points() {
            return Err(Error::GridMismatch(format!(
                "symbol has {} entries, grid has {} modes",
                symbol.len(),
                grid.points()
            )));
        }
        if !matches!(grid, FieldGrid::PeriodicTorus { .. }) {
            return Err(Error::InvalidConfig(
                "Fourier multipliers need a periodic torus grid".into(),
            ));
        }
        Ok(Self { grid, realization: Realization::FourierMultiplier(symbol) })
    }

    pub fn dense(grid: FieldGrid, matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != grid.points() || matrix.ncols() != grid.points() {
            return Err(Error::GridMismatch(format!(
                "matrix is {}x{}, grid has {} points",
                matrix.nrows(),
                matrix.ncols(),
                grid.points()
            )));
        }
        let sym_defect = (&matrix - matrix.transpose()).norm();
        if sym_defect > 1e-10 * (1.0 + matrix.norm()) {
            return Err(Error::IncompatibleStructure(format!(
                "dense realization not symmetric (defect {sym_defect:.3e})"
            )));
        }
        Ok(Self { grid, realization: Realization::DenseSymmetric(matrix) })
    }

    pub fn grid(&self) -> &FieldGrid {
        &self.grid
    }

    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    /// Smallest symbol value / eigenvalue of the realization.
    pub fn min_spectrum(&self) -> f64 {
        match &self.realization {
            Realization::FourierMultiplier(symbol) => {
                symbol.iter().cloned().fold(f64::INFINITY, f64::min)
            }
            Realization::DenseSymmetric(m) => m
                .clone()
                .symmetric_eigenvalues()
                .iter()
                .fold(f64::INFINITY, |acc, e| acc.min(*e)),
        }
    }

    /// Apply the operator to a scalar grid function or, componentwise, to a
    /// stacked vector field (length a multiple of the point count).
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        let n = self.grid.points();
        if f.is_empty() || f.len() % n != 0 {
            return Err(Error::GridMismatch(format!(
                "input has {} samples, expected a multiple of {}",
                f.len(),
                n
            )));
        }
        let mut out = Vec::with_capacity(f.len());
        for chunk in f.chunks(n) {
            out.extend(self.apply_scalar(chunk));
        }
        Ok(out)
    }

    fn apply_scalar(&self, f: &[f64]) -> Vec<f64> {
        match &self.realization {
            Realization::FourierMultiplier(symbol) => {
                let mut hat = fourier_forward(&self.grid, f);
                for (h, s) in hat.iter_mut().zip(symbol) {
                    *h *= s;
                }
                fourier_inverse_real(&self.grid, hat)
            }
            Realization::DenseSymmetric(m) => {
                let v = m * DVector::from_column_slice(f);
                v.as_slice().to_vec()
            }
        }
    }

    /// Spectral power `op^p` (functional calculus).  Exactly-zero symbol
    /// values are passed through as zero — the pseudo-power on the mean-zero
    /// subspace — so that massless multipliers stay usable away from the
    /// excluded constant mode.  Negative spectrum is rejected.
    pub fn power(&self, p: f64) -> Result<Self> {
        match &self.realization {
            Realization::FourierMultiplier(symbol) => {
                let mut out = Vec::with_capacity(symbol.len());
                for &s in symbol {
                    if s == 0.0 {
                        out.push(0.0);
                    } else if s < 0.0 {
                        return Err(Error::NotPositiveDefinite(s));
                    } else {
                        out.push(s.powf(p));
                    }
                }
                Ok(Self {
                    grid: self.grid.clone(),
                    realization: Realization::FourierMultiplier(out),
                })
            }
            Realization::DenseSymmetric(m) => {
                let eig = SymmetricEigen::new(m.clone());
                let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
                if min <= 0.0 {
                    return Err(Error::NotPositiveDefinite(min));
                }
                let powered = DVector::from_iterator(
                    eig.eigenvalues.len(),
                    eig.eigenvalues.iter().map(|l| l.powf(p)),
                );
                let mat = &eig.eigenvectors
                    * DMatrix::from_diagonal(&powered)
                    * eig.eigenvectors.transpose();
                Ok(Self { grid: self.grid.clone(), realization: Realization::DenseSymmetric(mat) })
            }
        }
    }

    /// Inverse operator; errors if the spectrum touches zero.
    pub fn inverse(&self) -> Result<Self> {
        if let Realization::FourierMultiplier(symbol) = &self.realization {
            if symbol.iter().any(|&s| s == 0.0) {
                return Err(Error::NotPositiveDefinite(0.0));
            }
        }
        self.power(-1.0)
    }

    /// Pseudo-inverse: zero symbol values stay zero (mean-zero subspace).
    pub fn pseudo_inverse(&self) -> Result<Self> {
        self.power(-1.0)
    }
}

/// Grid quadrature `integral f` (trapezoid/periodic rule).
pub fn integrate(grid: &FieldGrid, f: &[f64]) -> f64 {
    grid.weight() * f.iter().sum::<f64>()
}

/// Grid quadrature `integral f g`, componentwise over stacked fields.
pub fn inner(grid: &FieldGrid, f: &[f64], g: &[f64]) -> f64 {
    debug_assert_eq!(f.len(), g.len());
    grid.weight() * f.iter().zip(g).map(|(a, b)| a * b).sum::<f64>()
}

/// Forward DFT of a real grid function on the torus (unnormalized),
/// axis-by-axis for d > 1.
pub fn fourier_forward(grid: &FieldGrid, f: &[f64]) -> Vec<Complex<f64>> {
    let data: Vec<Complex<f64>> = f.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fourier_axes(grid, data, false)
}

/// Inverse DFT returning the real part (normalized by the mode count).
pub fn fourier_inverse_real(grid: &FieldGrid, hat: Vec<Complex<f64>>) -> Vec<f64> {
    let n_total = hat.len() as f64;
    let data = fourier_axes(grid, hat, true);
    data.into_iter().map(|c| c.re / n_total).collect()
}

fn fourier_axes(grid: &FieldGrid, mut data: Vec<Complex<f64>>, inverse: bool) -> Vec<Complex<f64>> {
    let (dim, n) = match grid {
        FieldGrid::PeriodicTorus { dim, n, .. } => (*dim, *n),
        FieldGrid::HalfLine { .. } => panic!("Fourier transform needs a torus grid"),
    };
    assert_eq!(data.len(), n.pow(dim as u32));
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let mut line = vec![Complex::new(0.0, 0.0); n];
    // transform along each axis in turn; `stride`/`outer` enumerate the
    // 1-d lines of the cube for the current axis
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        let blocks = data.len() / (n * stride);
        for block in 0..blocks {
            for offset in 0..stride {
                let base = block * n * stride + offset;
                for i in 0..n {
                    line[i] = data[base + i * stride];
                }
                fft.process(&mut line);
                for i in 0..n {
                    data[base + i * stride] = line[i];
                }
            }
        }
    }
    data
}

/// Componentwise spectral gradient of a scalar function on the torus: one
/// output component per axis.  The Nyquist mode has no well-defined signed
/// wavenumber and is dropped (band-limited inputs are unaffected).
pub fn spectral_gradient(grid: &FieldGrid, f: &[f64]) -> Result<Vec<Vec<f64>>> {
    grid.check_scalar(f)?;
    let (dim, n) = match grid {
        FieldGrid::PeriodicTorus { dim, n, .. } => (*dim, *n),
        FieldGrid::HalfLine { .. } => {
            return Err(Error::InvalidConfig("spectral gradient needs a torus grid".into()))
        }
    };
    let hat = fourier_forward(grid, f);
    let mut out = Vec::with_capacity(dim);
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        let mut dhat = hat.clone();
        for (flat, h) in dhat.iter_mut().enumerate() {
            let bin = (flat / stride) % n;
            if bin == n / 2 {
                *h = Complex::new(0.0, 0.0);
            } else {
                *h *= Complex::new(0.0, grid.axis_wavenumber(bin));
            }
        }
        out.push(fourier_inverse_real(grid, dhat));
    }
    Ok(out)
}

/// Spectral Laplacian multiplier `-|k|^2` on the torus.
pub fn laplacian(grid: &FieldGrid) -> Result<SpectralOperator> {
    let dim = match grid {
        FieldGrid::PeriodicTorus { dim, .. } => *dim,
        FieldGrid::HalfLine { .. } => {
            return Err(Error::InvalidConfig("spectral Laplacian needs a torus grid".into()))
        }
    };
    let mut symbol = Vec::with_capacity(grid.points());
    for flat in 0..grid.points() {
        let k = grid.wavevector(flat);
        debug_assert_eq!(k.len(), dim);
        symbol.push(-k.iter().map(|ki| ki * ki).sum::<f64>());
    }
    SpectralOperator::multiplier(grid.clone(), symbol)
}

/// Random real grid function with Fourier support in `|mode| <= band` along
/// every axis (Nyquist excluded).  Band-limited states keep the spectral
/// identities exact on the discrete torus.
pub fn random_band_limited(
    grid: &FieldGrid,
    band: i64,
    rng: &mut impl rand::Rng,
) -> Result<Vec<f64>> {
    let n = match grid {
        FieldGrid::PeriodicTorus { n, .. } => *n,
        FieldGrid::HalfLine { .. } => {
            return Err(Error::InvalidConfig("band-limited sampling needs a torus grid".into()))
        }
    };
    if band <= 0 || band >= n as i64 / 2 {
        return Err(Error::InvalidConfig(format!(
            "band must lie in 1..{} (half the axis resolution), got {band}",
            n / 2 - 1
        )));
    }
    let noise: Vec<f64> = (0..grid.points()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut hat = fourier_forward(grid, &noise);
    let dim = match grid {
        FieldGrid::PeriodicTorus { dim, .. } => *dim,
        FieldGrid::HalfLine { .. } => unreachable!(),
    };
    for (flat, h) in hat.iter_mut().enumerate() {
        let mut rest = flat;
        let mut keep = true;
        for _ in 0..dim {
            let mode = grid.axis_mode(rest % n);
            if mode.abs() > band {
                keep = false;
            }
            rest /= n;
        }
        if !keep {
            *h = Complex::new(0.0, 0.0);
        }
    }
    Ok(fourier_inverse_real(grid, hat))
}

/// Kahan-compensated sum, used for order-insensitive basis-sum reductions.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn torus_quadrature_integrates_cosine_squared() {
        let l = 2.0 * std::f64::consts::PI;
        let grid = FieldGrid::torus(1, l, 64).unwrap();
        let f: Vec<f64> = (0..64).map(|i| grid.axis_coord(i).cos().powi(2)).collect();
        assert_relative_eq!(integrate(&grid, &f), l / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn fourier_roundtrip_is_identity() {
        let grid = FieldGrid::torus(1, 10.0, 32).unwrap();
        let f: Vec<f64> = (0..32).map(|i| (0.7 * grid.axis_coord(i)).sin()).collect();
        let back = fourier_inverse_real(&grid, fourier_forward(&grid, &f));
        for (a, b) in f.iter().zip(&back) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn gradient_of_plane_wave() {
        let l = 2.0 * std::f64::consts::PI;
        let grid = FieldGrid::torus(1, l, 64).unwrap();
        let f: Vec<f64> = (0..64).map(|i| (3.0 * grid.axis_coord(i)).sin()).collect();
        let grad = spectral_gradient(&grid, &f).unwrap();
        for (i, g) in grad[0].iter().enumerate() {
            assert_relative_eq!(*g, 3.0 * (3.0 * grid.axis_coord(i)).cos(), epsilon = 1e-10);
        }
    }

    #[test]
    fn gradient_3d_axis_ordering() {
        let l = 2.0 * std::f64::consts::PI;
        let grid = FieldGrid::torus(3, l, 8).unwrap();
        let n = 8usize;
        // f = sin(y): varies along the middle axis only
        let mut f = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    f[i * n * n + j * n + k] = grid.axis_coord(j).sin();
                }
            }
        }
        let grad = spectral_gradient(&grid, &f).unwrap();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let flat = i * n * n + j * n + k;
                    assert_relative_eq!(grad[0][flat], 0.0, epsilon = 1e-10);
                    assert_relative_eq!(
                        grad[1][flat],
                        grid.axis_coord(j).cos(),
                        epsilon = 1e-10
                    );
                    assert_relative_eq!(grad[2][flat], 0.0, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn multiplier_power_and_inverse_roundtrip() {
        let grid = FieldGrid::torus(1, 10.0, 32).unwrap();
        let symbol: Vec<f64> = (0..32)
            .map(|i| (1.0 + grid.axis_wavenumber(i).powi(2)).sqrt())
            .collect();
        let mu = SpectralOperator::multiplier(grid.clone(), symbol).unwrap();
        let f: Vec<f64> = (0..32).map(|i| (grid.axis_coord(i) - 5.0).tanh()).collect();
        let back = mu.inverse().unwrap().apply(&mu.apply(&f).unwrap()).unwrap();
        for (a, b) in f.iter().zip(&back) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn dense_rejects_asymmetric_matrix() {
        let grid = FieldGrid::half_line(1.0, 2).unwrap();
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(
            SpectralOperator::dense(grid, m),
            Err(Error::IncompatibleStructure(_))
        ));
    }

    #[test]
    fn half_line_sine_quadrature_orthonormal() {
        let grid = FieldGrid::half_line(10.0, 50).unwrap();
        let l: f64 = 10.0;
        let basis: Vec<Vec<f64>> = (1..=3)
            .map(|j| {
                (0..50)
                    .map(|i| {
                        (2.0 / l).sqrt() * (j as f64 * std::f64::consts::PI * grid.axis_coord(i) / l).sin()
                    })
                    .collect()
            })
            .collect();
        for (a, fa) in basis.iter().enumerate() {
            for (b, fb) in basis.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                assert_relative_eq!(inner(&grid, fa, fb), want, epsilon = 1e-12);
            }
        }
    }
}
