//! Exact symbolic arithmetic in the span of Weyl generators `W(F)` together
//! with the Weyl and positive quantization maps.
//!
//! Elements are finite complex combinations of generators obeying
//! `W(F) W(G) = exp(-i hbar/2 sigma(F,G)) W(F+G)` and `W(F)* = W(-F)`.
//! Test-function keys are canonicalized to a fixed quantum so that exact key
//! identities (`F + (-F) = 0`) hold in floating point.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Rounding quantum for canonical test-function keys.
pub const KEY_QUANTUM: f64 = 1e-12;

/// A symplectic test-function space.
///
/// `Finite { dim }` is R^{2n} (`dim = 2n`) with the standard form
/// `sigma((a,b),(a',b')) = a.b' - a'.b`.  `Field { len, weight }` holds
/// grid-sampled pairs `(f,g)` of length `len` each, with
/// `sigma((f1,g1),(f2,g2)) = weight * sum(f1 g2 - f2 g1)` (the grid quadrature
/// of the field-theoretic form).
#[derive(Clone, Debug, PartialEq)]
pub enum SymplecticSpace {
    Finite { dim: usize },
    Field { len: usize, weight: f64 },
}

impl SymplecticSpace {
    pub fn finite(n_modes: usize) -> Self {
        SymplecticSpace::Finite { dim: 2 * n_modes }
    }

    pub fn field(len: usize, weight: f64) -> Self {
        SymplecticSpace::Field { len, weight }
    }

    /// Total coordinate length of a test function in this space.
    pub fn coord_len(&self) -> usize {
        match self {
            SymplecticSpace::Finite { dim } => *dim,
            SymplecticSpace::Field { len, .. } => 2 * len,
        }
    }

    fn check_member(&self, f: &TestFunction) -> Result<()> {
        if f.coords.len() != self.coord_len() {
            return Err(Error::DimensionMismatch(format!(
                "test function has {} coordinates, space expects {}",
                f.coords.len(),
                self.coord_len()
            )));
        }
        Ok(())
    }

    /// The symplectic form.  Antisymmetric and bilinear by construction.
    pub fn sigma(&self, f: &TestFunction, g: &TestFunction) -> Result<f64> {
        self.check_member(f)?;
        self.check_member(g)?;
        let half = self.coord_len() / 2;
        let w = match self {
            SymplecticSpace::Finite { .. } => 1.0,
            SymplecticSpace::Field { weight, .. } => *weight,
        };
        let mut acc = 0.0;
        for i in 0..half {
            acc += f.coords[i] * g.coords[half + i] - g.coords[i] * f.coords[half + i];
        }
        Ok(w * acc)
    }
}

/// A test function, stored with canonicalized coordinates.
///
/// Coordinates are rounded to multiples of [`KEY_QUANTUM`] on construction so
/// that equality of test functions is exact and `F + (-F)` collapses to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    coords: Vec<f64>,
}

impl TestFunction {
    pub fn new(coords: Vec<f64>) -> Self {
        let key = Self::quantize_coords(&coords);
        Self::from_key(&key)
    }

    /// Finite-mode constructor from the two half-vectors `(a, b)`.
    pub fn finite(a: &[f64], b: &[f64]) -> Self {
        let mut coords = a.to_vec();
        coords.extend_from_slice(b);
        Self::new(coords)
    }

    /// Field-mode constructor from the grid-sampled pair `(f, g)`.
    pub fn pair(f: &[f64], g: &[f64]) -> Self {
        let mut coords = f.to_vec();
        coords.extend_from_slice(g);
        Self::new(coords)
    }

    pub fn zero(len: usize) -> Self {
        Self { coords: vec![0.0; len] }
    }

    fn quantize_coords(coords: &[f64]) -> Vec<i64> {
        coords.iter().map(|x| (x / KEY_QUANTUM).round() as i64).collect()
    }

    pub(crate) fn canonical_key(&self) -> Vec<i64> {
        Self::quantize_coords(&self.coords)
    }

    pub(crate) fn from_key(key: &[i64]) -> Self {
        Self { coords: key.iter().map(|&k| k as f64 * KEY_QUANTUM).collect() }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// First half of the coordinates (`a` in finite mode, `f` in field mode).
    pub fn first_half(&self) -> &[f64] {
        &self.coords[..self.coords.len() / 2]
    }

    /// Second half of the coordinates (`b` in finite mode, `g` in field mode).
    pub fn second_half(&self) -> &[f64] {
        &self.coords[self.coords.len() / 2..]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&x| x == 0.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coords.iter().map(|x| s * x).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.coords.len(), other.coords.len());
        Self::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(x, y)| x + y)
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }
}

/// Linear map implementing a complex structure on a test-function space.
pub trait JMap: Send + Sync {
    fn apply(&self, f: &TestFunction) -> TestFunction;
}

struct StandardJ {
    n: usize,
}

impl JMap for StandardJ {
    // J(a,b) = (-b, a)
    fn apply(&self, f: &TestFunction) -> TestFunction {
        let a = &f.coords()[..self.n];
        let b = &f.coords()[self.n..];
        let neg_b: Vec<f64> = b.iter().map(|x| -x).collect();
        TestFunction::finite(&neg_b, a)
    }
}

struct MatrixJ {
    m: DMatrix<f64>,
}

impl JMap for MatrixJ {
    fn apply(&self, f: &TestFunction) -> TestFunction {
        let v = nalgebra::DVector::from_column_slice(f.coords());
        TestFunction::new((&self.m * v).iter().copied().collect())
    }
}

/// A complex structure `J` compatible with the symplectic form:
/// `sigma(JF,JG) = sigma(F,G)`, `sigma(F,JF) >= 0`, `J^2 = -I`.
#[derive(Clone)]
pub struct ComplexStructure {
    space: SymplecticSpace,
    map: Arc<dyn JMap>,
}

impl fmt::Debug for ComplexStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComplexStructure")
            .field("space", &self.space)
            .finish()
    }
}

impl ComplexStructure {
    /// The standard structure `J(a,b) = (-b, a)` on R^{2n}.
    pub fn standard(n_modes: usize) -> Self {
        Self {
            space: SymplecticSpace::finite(n_modes),
            map: Arc::new(StandardJ { n: n_modes }),
        }
    }

    pub fn from_matrix(space: SymplecticSpace, m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != space.coord_len() || m.ncols() != space.coord_len() {
            return Err(Error::DimensionMismatch(format!(
                "J matrix is {}x{}, space expects {}",
                m.nrows(),
                m.ncols(),
                space.coord_len()
            )));
        }
        Ok(Self { space, map: Arc::new(MatrixJ { m }) })
    }

    pub fn from_map(space: SymplecticSpace, map: Arc<dyn JMap>) -> Self {
        Self { space, map }
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn apply(&self, f: &TestFunction) -> TestFunction {
        self.map.apply(f)
    }

    /// Spot-check the three compatibility axioms on the given sample vectors.
    pub fn check_compatibility(&self, samples: &[TestFunction], tol: f64) -> Result<()> {
        for (i, f) in samples.iter().enumerate() {
            let jf = self.apply(f);
            let jjf = self.apply(&jf);
            let back = jjf.add(f);
            let worst = back.coords().iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if worst > tol {
                return Err(Error::IncompatibleStructure(format!(
                    "J^2 != -I on sample {i} (deviation {worst:.3e})"
                )));
            }
            let pos = self.space.sigma(f, &jf)?;
            if pos < -tol {
                return Err(Error::IncompatibleStructure(format!(
                    "sigma(F,JF) = {pos:.3e} < 0 on sample {i}"
                )));
            }
            for (j, g) in samples.iter().enumerate() {
                let jg = self.apply(g);
                let lhs = self.space.sigma(&jf, &jg)?;
                let rhs = self.space.sigma(f, g)?;
                if (lhs - rhs).abs() > tol * (1.0 + rhs.abs()) {
                    return Err(Error::IncompatibleStructure(format!(
                        "sigma(JF,JG) != sigma(F,G) on samples ({i},{j})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The inner product `alpha_J(F,G) = sigma(F,JG) + i sigma(F,G)`.
    pub fn alpha(&self, f: &TestFunction, g: &TestFunction) -> Result<C64> {
        let jg = self.apply(g);
        Ok(C64::new(self.space.sigma(f, &jg)?, self.space.sigma(f, g)?))
    }

    /// The quantization factor `c_hbar^J(F) = exp(-hbar/4 alpha_J(F,F))`.
    pub fn quantization_factor(&self, hbar: f64, f: &TestFunction) -> Result<f64> {
        let a = self.alpha(f, f)?;
        Ok((-hbar / 4.0 * a.re).exp())
    }
}

/// Quantization scheme for [`WeylElement::quantize`].
pub enum QuantizationScheme<'a> {
    /// `W_0(F) -> W_hbar(F)`, coefficients unchanged.
    Weyl,
    /// `W_0(F) -> c_hbar^J(F) W_hbar(F)`.
    PositiveJ(&'a ComplexStructure),
}

/// A finite complex linear combination of Weyl generators at a fixed `hbar`.
#[derive(Clone, Debug)]
pub struct WeylElement {
    space: SymplecticSpace,
    hbar: f64,
    terms: BTreeMap<Vec<i64>, C64>,
}

impl WeylElement {
    pub fn zero(space: SymplecticSpace, hbar: f64) -> Self {
        Self { space, hbar, terms: BTreeMap::new() }
    }

    /// The identity `W(0)`.
    pub fn identity(space: SymplecticSpace, hbar: f64) -> Self {
        Self::generator(space, hbar, &TestFunction::zero(0)).scale(C64::new(1.0, 0.0))
    }

    /// A single generator `W(F)` with coefficient 1.
    pub fn generator(space: SymplecticSpace, hbar: f64, f: &TestFunction) -> Self {
        let f = if f.coords().len() == space.coord_len() {
            f.clone()
        } else if f.is_zero() {
            TestFunction::zero(space.coord_len())
        } else {
            f.clone()
        };
        let mut terms = BTreeMap::new();
        terms.insert(f.canonical_key(), C64::new(1.0, 0.0));
        Self { space, hbar, terms }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterate over `(test function, coefficient)` pairs in key order.
    pub fn terms(&self) -> impl Iterator<Item = (TestFunction, C64)> + '_ {
        self.terms.iter().map(|(k, &z)| (TestFunction::from_key(k), z))
    }

    pub fn coefficient(&self, f: &TestFunction) -> C64 {
        self.terms
            .get(&f.canonical_key())
            .copied()
            .unwrap_or_else(|| C64::new(0.0, 0.0))
    }

    fn insert(&mut self, key: Vec<i64>, z: C64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                if z.norm_sqr() != 0.0 {
                    e.insert(z);
                }
            }
            Entry::Occupied(mut e) => {
                let s = *e.get() + z;
                if s.norm_sqr() == 0.0 {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        let mut out = Self::zero(self.space.clone(), self.hbar);
        for (k, &c) in &self.terms {
            out.insert(k.clone(), z * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.hbar != other.hbar {
            return Err(Error::HbarMismatch(self.hbar, other.hbar));
        }
        let mut out = self.clone();
        for (k, &z) in &other.terms {
            out.insert(k.clone(), z);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Product via the generator relation
    /// `W(F) W(G) = exp(-i hbar/2 sigma(F,G)) W(F+G)`, extended bilinearly.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.hbar != other.hbar {
            return Err(Error::HbarMismatch(self.hbar, other.hbar));
        }
        let mut out = Self::zero(self.space.clone(), self.hbar);
        for (kf, &zf) in &self.terms {
            let f = TestFunction::from_key(kf);
            for (kg, &zg) in &other.terms {
                let g = TestFunction::from_key(kg);
                let s = self.space.sigma(&f, &g)?;
                let phase = C64::new(0.0, -self.hbar / 2.0 * s).exp();
                let key: Vec<i64> = kf.iter().zip(kg).map(|(a, b)| a + b).collect();
                out.insert(key, phase * zf * zg);
            }
        }
        Ok(out)
    }

    /// The involution `(z W(F))* = conj(z) W(-F)`.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.space.clone(), self.hbar);
        for (k, &z) in &self.terms {
            let key: Vec<i64> = k.iter().map(|a| -a).collect();
            out.insert(key, z.conj());
        }
        out
    }

    /// Quantize a classical element (at `hbar = 0`) to the target `hbar`.
    pub fn quantize(&self, hbar: f64, scheme: QuantizationScheme<'_>) -> Result<Self> {
        if self.hbar != 0.0 {
            return Err(Error::NotClassical(self.hbar));
        }
        let mut out = Self::zero(self.space.clone(), hbar);
        for (k, &z) in &self.terms {
            let c = match &scheme {
                QuantizationScheme::Weyl => 1.0,
                QuantizationScheme::PositiveJ(j) => {
                    j.quantization_factor(hbar, &TestFunction::from_key(k))?
                }
            };
            out.insert(k.clone(), z * c);
        }
        Ok(out)
    }

    /// Exact C*-norm of a scalar multiple of a single generator: `|z|`.
    ///
    /// Multi-term elements have no computable closed-form norm here; callers
    /// needing a bound should use the representation lower bound from the
    /// grid representation module.
    pub fn norm_single(&self) -> Result<f64> {
        match self.terms.len() {
            0 => Ok(0.0),
            1 => Ok(self.terms.values().next().unwrap().norm()),
            n => Err(Error::MultiTerm(n)),
        }
    }

    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for (k, &z) in &self.terms {
            let w = other.terms.get(k).copied().unwrap_or_else(|| C64::new(0.0, 0.0));
            worst = worst.max((z - w).norm());
        }
        for (k, &w) in &other.terms {
            if !self.terms.contains_key(k) {
                worst = worst.max(w.norm());
            }
        }
        worst
    }
}

/// Result of the entrywise-exponential Gram positivity certificate.
#[derive(Clone, Debug)]
pub struct PositivityReport {
    pub dim: usize,
    pub min_eigenvalue: f64,
    pub tolerance: f64,
    pub passes: bool,
}

/// Positivity certificate for `Q_hbar^J(A* A)` with `A = sum z_k W_0(F_k)`.
///
/// Assembles the Gram matrix `a_{jk} = alpha_J(F_j, F_k)`, exponentiates
/// `hbar/2 * a` entrywise, and reports the minimum eigenvalue of the Hermitian
/// result.  Entrywise exponentiation preserves positivity, so a PSD report
/// certifies positivity of the quantized element.
pub fn positivity_certificate(
    a: &WeylElement,
    hbar: f64,
    j: &ComplexStructure,
) -> Result<PositivityReport> {
    if a.hbar() != 0.0 {
        return Err(Error::NotClassical(a.hbar()));
    }
    let fs: Vec<TestFunction> = a.terms().map(|(f, _)| f).collect();
    let n = fs.len();
    // BTreeMap keys are unique, but the contract guards against callers
    // assembling duplicate keys by hand.
    for i in 0..n {
        for k in (i + 1)..n {
            if fs[i] == fs[k] {
                return Err(Error::DuplicateKeys);
            }
        }
    }
    if n == 0 {
        return Ok(PositivityReport { dim: 0, min_eigenvalue: 0.0, tolerance: 0.0, passes: true });
    }
    let mut m = DMatrix::<C64>::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let alpha = j.alpha(&fs[r], &fs[c])?;
            m[(r, c)] = (alpha * (hbar / 2.0)).exp();
        }
    }
    // Force exact Hermitian symmetry before the eigensolve.
    let herm = (&m + &m.adjoint()) * C64::new(0.5, 0.0);
    let eig = herm.symmetric_eigenvalues();
    let min_eigenvalue = eig.iter().fold(f64::INFINITY, |acc, e| acc.min(*e));
    let tolerance = 1e-10 * n as f64;
    Ok(PositivityReport { dim: n, min_eigenvalue, tolerance, passes: min_eigenvalue >= -tolerance })
}
