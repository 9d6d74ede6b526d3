//! Scalar-field frequency structures and classical functionals: the
//! Minkowski multiplier `sqrt(m^2 - laplacian)`, the Rindler half-line
//! matrix square root, the pair map `J(f,g) = (-mu^{-1} g, mu f)`, and the
//! number/total-number/Hamiltonian functionals with their closed forms.

use super::{
    compensated_sum, inner, integrate, spectral_gradient, FieldGrid, FieldState, SpectralOperator,
};
#[cfg(test)]
use super::laplacian;
use crate::algebra::{ComplexStructure, JMap, SymplecticSpace, TestFunction};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use rayon::prelude::*;
use std::sync::Arc;

/// Minkowski frequency operator `(m^2 - laplacian)^{1/2}` as a Fourier
/// multiplier with symbol `sqrt(m^2 + |k|^2)`.
pub fn build_mu_minkowski(grid: &FieldGrid, m: f64) -> Result<SpectralOperator> {
    if m <= 0.0 {
        return Err(Error::NonPositiveMass(m));
    }
    let symbol: Vec<f64> = (0..grid.points())
        .map(|flat| {
            let k2: f64 = grid.wavevector(flat).iter().map(|ki| ki * ki).sum();
            (m * m + k2).sqrt()
        })
        .collect();
    SpectralOperator::multiplier(grid.clone(), symbol)
}

/// The Rindler operator `mu_R^2 = -d^2/dx^2 + e^{2x}(m^2 + |k_perp|^2)` on
/// the Dirichlet interior grid (second-order central differences).  The
/// transverse directions are reduced to the fixed wavenumbers `k_perp`.
pub fn build_mu_rindler_squared(
    grid: &FieldGrid,
    m: f64,
    k_perp: [f64; 2],
) -> Result<SpectralOperator> {
    let n = match grid {
        FieldGrid::HalfLine { n, .. } => *n,
        FieldGrid::PeriodicTorus { .. } => {
            return Err(Error::InvalidConfig("Rindler operator needs a half-line grid".into()))
        }
    };
    if m < 0.0 {
        return Err(Error::NonPositiveMass(m));
    }
    let h = grid.weight();
    let transverse = m * m + k_perp[0] * k_perp[0] + k_perp[1] * k_perp[1];
    let mut mat = DMatrix::zeros(n, n);
    for i in 0..n {
        mat[(i, i)] = 2.0 / (h * h) + (2.0 * grid.axis_coord(i)).exp() * transverse;
        if i + 1 < n {
            mat[(i, i + 1)] = -1.0 / (h * h);
            mat[(i + 1, i)] = -1.0 / (h * h);
        }
    }
    let op = SpectralOperator::dense(grid.clone(), mat)?;
    let min = op.min_spectrum();
    if min <= 0.0 {
        return Err(Error::NotPositiveDefinite(min));
    }
    Ok(op)
}

/// Rindler frequency operator `mu_R`, the matrix square root of
/// [`build_mu_rindler_squared`] via eigendecomposition.
pub fn build_mu_rindler(grid: &FieldGrid, m: f64, k_perp: [f64; 2]) -> Result<SpectralOperator> {
    build_mu_rindler_squared(grid, m, k_perp)?.power(0.5)
}

struct MuJ {
    mu: SpectralOperator,
    mu_inv: SpectralOperator,
}

impl JMap for MuJ {
    // J(f, g) = (-mu^{-1} g, mu f)
    fn apply(&self, f: &TestFunction) -> TestFunction {
        let mu_f = self.mu.apply(f.first_half()).expect("grid-compatible test function");
        let minus_mu_inv_g: Vec<f64> = self
            .mu_inv
            .apply(f.second_half())
            .expect("grid-compatible test function")
            .into_iter()
            .map(|x| -x)
            .collect();
        TestFunction::pair(&minus_mu_inv_g, &mu_f)
    }
}

/// A frequency operator packaged with its (pseudo-)inverse, the component
/// count of the fields it acts on, and the complex structure it induces.
pub struct FrequencyStructure {
    mu: SpectralOperator,
    mu_inv: SpectralOperator,
    components: usize,
    j: ComplexStructure,
}

impl FrequencyStructure {
    pub fn mu(&self) -> &SpectralOperator {
        &self.mu
    }

    pub fn mu_inv(&self) -> &SpectralOperator {
        &self.mu_inv
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn j(&self) -> &ComplexStructure {
        &self.j
    }

    pub fn grid(&self) -> &FieldGrid {
        self.mu.grid()
    }

    fn coord_half(&self) -> usize {
        self.components * self.mu.grid().points()
    }

    fn check_state(&self, state: &FieldState) -> Result<(Vec<f64>, Vec<f64>)> {
        if state.components() != self.components || state.points() != self.mu.grid().points() {
            return Err(Error::GridMismatch(format!(
                "state has {} components x {} points, structure expects {} x {}",
                state.components(),
                state.points(),
                self.components,
                self.mu.grid().points()
            )));
        }
        Ok(state.flatten())
    }

    fn check_pair(&self, f: &TestFunction) -> Result<()> {
        if f.coords().len() != 2 * self.coord_half() {
            return Err(Error::GridMismatch(format!(
                "test pair has {} coordinates, structure expects {}",
                f.coords().len(),
                2 * self.coord_half()
            )));
        }
        Ok(())
    }
}

/// Build the complex structure `J(f,g) = (-mu^{-1} g, mu f)` induced by a
/// frequency operator acting componentwise on `components`-vector fields.
/// The inverse is the pseudo-inverse, so massless multipliers restrict to
/// the mean-zero subspace.
pub fn complex_structure_from_mu(
    mu: &SpectralOperator,
    components: usize,
) -> Result<FrequencyStructure> {
    if components != 1 && components != 3 {
        return Err(Error::InvalidConfig(format!(
            "field component count must be 1 or 3, got {components}"
        )));
    }
    let mu_inv = mu.pseudo_inverse()?;
    let space = SymplecticSpace::field(components * mu.grid().points(), mu.grid().weight());
    let j = ComplexStructure::from_map(
        space,
        Arc::new(MuJ { mu: mu.clone(), mu_inv: mu_inv.clone() }),
    );
    Ok(FrequencyStructure { mu: mu.clone(), mu_inv, components, j })
}

/// Minkowski complex structure on scalar pairs.
pub fn complex_structure_minkowski(mu: &SpectralOperator) -> Result<FrequencyStructure> {
    complex_structure_from_mu(mu, 1)
}

/// Classical number functional
/// `N_0(f,g) = 1/2 (int p f + q g)^2 + 1/2 (int q (mu f) - p (mu^{-1} g))^2`
/// evaluated on the state's momentum/configuration pair `(p, q)`.
pub fn number_functional(
    fs: &FrequencyStructure,
    f: &TestFunction,
    state: &FieldState,
) -> Result<f64> {
    fs.check_pair(f)?;
    let (p, q) = fs.check_state(state)?;
    let grid = fs.mu.grid();
    let fh = f.first_half();
    let gh = f.second_half();
    let linear = inner(grid, &p, fh) + inner(grid, &q, gh);
    let rotated = inner(grid, &q, &fs.mu.apply(fh)?) - inner(grid, &p, &fs.mu_inv.apply(gh)?);
    Ok(0.5 * linear * linear + 0.5 * rotated * rotated)
}

/// Which half of the pair space an alpha-orthonormal basis occupies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaSide {
    /// `F_j = (mu^{-1/2} e_j, 0)` — test functions paired with momentum.
    Momentum,
    /// `F_j = (0, mu^{1/2} e_j)` — test functions paired with configuration.
    Configuration,
}

/// Turn an L^2-orthonormal scalar family into an alpha_J-orthonormal family
/// of test pairs.  Both sides give complete complex bases, since `J` maps
/// one onto the other.
pub fn alpha_basis(
    fs: &FrequencyStructure,
    l2_basis: &[Vec<f64>],
    side: AlphaSide,
) -> Result<Vec<TestFunction>> {
    let half = match side {
        AlphaSide::Momentum => fs.mu.power(-0.5)?,
        AlphaSide::Configuration => fs.mu.power(0.5)?,
    };
    let zeros = vec![0.0; fs.coord_half()];
    l2_basis
        .iter()
        .map(|e| {
            let w = half.apply(e)?;
            Ok(match side {
                AlphaSide::Momentum => TestFunction::pair(&w, &zeros),
                AlphaSide::Configuration => TestFunction::pair(&zeros, &w),
            })
        })
        .collect()
}

fn check_alpha_orthonormal(fs: &FrequencyStructure, basis: &[TestFunction]) -> Result<()> {
    let space = fs.j.space().clone();
    let j_basis: Vec<TestFunction> = basis.iter().map(|f| fs.j.apply(f)).collect();
    let worst = (0..basis.len())
        .into_par_iter()
        .map(|k| {
            let mut local: f64 = 0.0;
            for l in k..basis.len() {
                let re = space.sigma(&basis[k], &j_basis[l]).expect("checked members");
                let im = space.sigma(&basis[k], &basis[l]).expect("checked members");
                let want = if k == l { 1.0 } else { 0.0 };
                local = local.max((re - want).abs()).max(im.abs());
            }
            local
        })
        .reduce(|| 0.0, f64::max);
    if worst > 1e-8 {
        return Err(Error::NonOrthonormalBasis(worst));
    }
    Ok(())
}

fn check_l2_orthonormal(grid: &FieldGrid, basis: &[Vec<f64>]) -> Result<()> {
    let worst = (0..basis.len())
        .into_par_iter()
        .map(|k| {
            let mut local: f64 = 0.0;
            for l in k..basis.len() {
                let want = if k == l { 1.0 } else { 0.0 };
                local = local.max((inner(grid, &basis[k], &basis[l]) - want).abs());
            }
            local
        })
        .reduce(|| 0.0, f64::max);
    if worst > 1e-10 {
        return Err(Error::NonOrthonormalBasis(worst));
    }
    Ok(())
}

/// Total number functional as the basis sum `sum_k N_0(F_k)` over an
/// alpha_J-orthonormal family (checked to 1e-8).
pub fn total_number(
    fs: &FrequencyStructure,
    basis: &[TestFunction],
    state: &FieldState,
) -> Result<f64> {
    for f in basis {
        fs.check_pair(f)?;
    }
    check_alpha_orthonormal(fs, basis)?;
    let terms = basis
        .par_iter()
        .map(|f| number_functional(fs, f, state))
        .collect::<Result<Vec<f64>>>()?;
    Ok(compensated_sum(terms))
}

/// Closed form of the total number functional:
/// `1/2 int p (mu^{-1} p) + q (mu q)`.
pub fn closed_form_total_number(fs: &FrequencyStructure, state: &FieldState) -> Result<f64> {
    let (p, q) = fs.check_state(state)?;
    let grid = fs.mu.grid();
    Ok(0.5 * (inner(grid, &p, &fs.mu_inv.apply(&p)?) + inner(grid, &q, &fs.mu.apply(&q)?)))
}

/// Hamiltonian as the basis sum `sum_k N_0((e_k, 0))` over an
/// L^2-orthonormal family (checked to 1e-10).
pub fn hamiltonian(
    fs: &FrequencyStructure,
    l2_basis: &[Vec<f64>],
    state: &FieldState,
) -> Result<f64> {
    let half = fs.coord_half();
    for e in l2_basis {
        if e.len() != half {
            return Err(Error::GridMismatch(format!(
                "basis function has {} samples, structure expects {half}",
                e.len()
            )));
        }
    }
    check_l2_orthonormal(fs.mu.grid(), l2_basis)?;
    let zeros = vec![0.0; half];
    let terms = l2_basis
        .par_iter()
        .map(|e| number_functional(fs, &TestFunction::pair(e, &zeros), state))
        .collect::<Result<Vec<f64>>>()?;
    Ok(compensated_sum(terms))
}

/// Closed-form Klein-Gordon energy on the torus:
/// `1/2 int pi^2 + m^2 phi^2 + (grad phi)^2` via spectral differentiation.
pub fn closed_form_hamiltonian_minkowski(
    grid: &FieldGrid,
    m: f64,
    state: &FieldState,
) -> Result<f64> {
    let (pi, phi) = match state {
        FieldState::Scalar { pi, phi } => (pi, phi),
        FieldState::Vector { .. } => {
            return Err(Error::GridMismatch("Klein-Gordon energy needs a scalar state".into()))
        }
    };
    let grad = spectral_gradient(grid, phi)?;
    let mut density: Vec<f64> = pi
        .iter()
        .zip(phi)
        .map(|(p, q)| p * p + m * m * q * q)
        .collect();
    for comp in &grad {
        for (d, g) in density.iter_mut().zip(comp) {
            *d += g * g;
        }
    }
    Ok(0.5 * integrate(grid, &density))
}

/// Closed-form Rindler energy: `1/2 int pi^2 + phi (mu_R^2 phi)` with the
/// squared operator applied as a matrix.
pub fn closed_form_hamiltonian_rindler(
    mu_squared: &SpectralOperator,
    state: &FieldState,
) -> Result<f64> {
    let (pi, phi) = match state {
        FieldState::Scalar { pi, phi } => (pi, phi),
        FieldState::Vector { .. } => {
            return Err(Error::GridMismatch("Rindler energy needs a scalar state".into()))
        }
    };
    let grid = mu_squared.grid();
    Ok(0.5 * (inner(grid, pi, pi) + inner(grid, phi, &mu_squared.apply(phi)?)))
}

/// Real Fourier L^2-orthonormal basis on the 1-d torus: the constant mode
/// plus cosine/sine pairs up to `max_mode` (exclusive of Nyquist).
pub fn fourier_l2_basis(grid: &FieldGrid, max_mode: usize) -> Result<Vec<Vec<f64>>> {
    let (extent, n) = match grid {
        FieldGrid::PeriodicTorus { dim: 1, extent, n } => (*extent, *n),
        _ => return Err(Error::InvalidConfig("Fourier basis needs a 1-d torus grid".into())),
    };
    if max_mode >= n / 2 {
        return Err(Error::InvalidConfig(format!(
            "max_mode {max_mode} reaches the Nyquist mode of an {n}-point grid"
        )));
    }
    let mut basis = vec![vec![1.0 / extent.sqrt(); n]];
    for j in 1..=max_mode {
        let k = 2.0 * std::f64::consts::PI * j as f64 / extent;
        let amp = (2.0 / extent).sqrt();
        basis.push((0..n).map(|i| amp * (k * grid.axis_coord(i)).cos()).collect());
        basis.push((0..n).map(|i| amp * (k * grid.axis_coord(i)).sin()).collect());
    }
    Ok(basis)
}

/// Sine L^2-orthonormal basis on the Dirichlet half-line grid (exactly
/// orthonormal under the interior trapezoid rule).
pub fn sine_l2_basis(grid: &FieldGrid, count: usize) -> Result<Vec<Vec<f64>>> {
    let (extent, n) = match grid {
        FieldGrid::HalfLine { extent, n } => (*extent, *n),
        FieldGrid::PeriodicTorus { .. } => {
            return Err(Error::InvalidConfig("sine basis needs a half-line grid".into()))
        }
    };
    if count > n {
        return Err(Error::InvalidConfig(format!(
            "sine basis of {count} modes exceeds the {n}-point grid resolution"
        )));
    }
    let amp = (2.0 / extent).sqrt();
    Ok((1..=count)
        .map(|j| {
            (0..n)
                .map(|i| {
                    amp * (j as f64 * std::f64::consts::PI * grid.axis_coord(i) / extent).sin()
                })
                .collect()
        })
        .collect())
}
