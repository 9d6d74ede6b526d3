//! Grid realization of the Schrödinger representation on L²(R): Weyl
//! unitaries, coherent states, Berezin integral operators, and field
//! operators, plus the operator-norm residual of the quantization diagram.
//!
//! The grid is uniform on `[-L, L)` with periodic wrap.  Operators are dense
//! `N x N` complex matrices acting on sample vectors; the quadrature inner
//! product is the uniform weight `dx`, so quadrature operator norms coincide
//! with Euclidean matrix norms.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::algebra::{TestFunction, WeylElement, C64};
use crate::error::{Error, Result};

/// Uniform symmetric 1-d spatial grid, `x_i = -L + i*dx`, `dx = 2L/N`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridRep {
    n_points: usize,
    extent: f64,
}

impl GridRep {
    pub fn new(n_points: usize, extent: f64) -> Result<Self> {
        if n_points == 0 || n_points % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "grid size must be even and positive (got {n_points})"
            )));
        }
        if extent <= 0.0 {
            return Err(Error::InvalidConfig(format!("extent must be positive (got {extent})")));
        }
        Ok(Self { n_points, extent })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.n_points as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        -self.extent + i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    /// Fourier wavenumber of mode index `m`, with the symmetric convention
    /// `k = (pi/L) * mm`, `mm in [-N/2, N/2)`.
    pub fn wavenumber(&self, m: usize) -> f64 {
        let half = self.n_points / 2;
        let mm = if m < half { m as isize } else { m as isize - self.n_points as isize };
        std::f64::consts::PI / self.extent * mm as f64
    }

    /// Signed mode integer `mm` for index `m`.
    pub fn mode_int(&self, m: usize) -> isize {
        let half = self.n_points / 2;
        if m < half {
            m as isize
        } else {
            m as isize - self.n_points as isize
        }
    }

    /// Euclidean-orthonormal plane-wave column for mode index `m`.
    fn mode_column(&self, m: usize) -> DVector<C64> {
        let k = self.wavenumber(m);
        let scale = 1.0 / (self.n_points as f64).sqrt();
        DVector::from_iterator(
            self.n_points,
            (0..self.n_points).map(|i| C64::new(0.0, k * self.point(i)).exp() * scale),
        )
    }

    /// Matrix whose columns are the orthonormal plane waves with
    /// `|mm| <= max_mode`.  Operators compressed to this subspace model the
    /// band-limited states on which continuum identities are certified.
    pub fn band_projector(&self, max_mode: usize) -> DMatrix<C64> {
        let cols: Vec<DVector<C64>> = (0..self.n_points)
            .filter(|&m| self.mode_int(m).unsigned_abs() <= max_mode)
            .map(|m| self.mode_column(m))
            .collect();
        DMatrix::from_columns(&cols)
    }

    /// Orthonormal basis (columns) of "interior band-limited" states: scaled
    /// harmonic-oscillator eigenfunctions whose position support and spectral
    /// content both stay within 60% of the grid's limits.
    ///
    /// These states decay to machine zero at the periodic boundary, so
    /// operators involving the sawtooth position coordinate or non-lattice
    /// multiplicative phases act on them without wrap artifacts; plane-wave
    /// band projectors cannot provide this.
    pub fn interior_frame(&self) -> DMatrix<C64> {
        let k_ny = std::f64::consts::PI / self.spacing();
        let s = (self.extent / k_ny).sqrt();
        let n_states = (((0.36 * self.extent * k_ny - 1.0) / 2.0).floor() as usize).max(1);
        let xs = self.points();
        let n = self.n_points;
        // normalized Hermite-function recurrence in u = x/s; norms stay O(1),
        // exact orthonormality is restored by the final QR
        let mut prev = DVector::<f64>::zeros(n);
        let mut cur = DVector::from_iterator(
            n,
            xs.iter().map(|&x| (-x * x / (2.0 * s * s)).exp()),
        );
        cur /= cur.norm();
        let mut cols: Vec<DVector<C64>> = Vec::with_capacity(n_states);
        for m in 0..n_states {
            cols.push(cur.map(|v| C64::new(v, 0.0)));
            let mf = m as f64;
            let mut next = DVector::<f64>::zeros(n);
            for i in 0..n {
                let u = xs[i] / s;
                next[i] =
                    ((2.0f64).sqrt() * u * cur[i] - mf.sqrt() * prev[i]) / (mf + 1.0).sqrt();
            }
            prev = std::mem::replace(&mut cur, next);
        }
        let frame = DMatrix::from_columns(&cols);
        frame.qr().q()
    }
}

/// Shift handling in [`rep_weyl`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftMode {
    /// Require `hbar*a` to be an integer number of grid cells; the shift is an
    /// exact permutation and the represented CCR holds to machine precision.
    Strict,
    /// Fractional shifts via the Fourier shift theorem; exactly unitary, CCR
    /// holds on band-limited states.
    Spectral,
}

/// A represented operator: dense matrix plus its grid/hbar context.
#[derive(Clone, Debug)]
pub struct RepOperator {
    pub matrix: DMatrix<C64>,
    pub hbar: f64,
    pub grid: GridRep,
}

impl RepOperator {
    pub fn identity(grid: &GridRep, hbar: f64) -> Self {
        Self { matrix: DMatrix::identity(grid.n_points(), grid.n_points()), hbar, grid: grid.clone() }
    }

    pub fn scale(&self, z: C64) -> Self {
        Self { matrix: &self.matrix * z, hbar: self.hbar, grid: self.grid.clone() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
            hbar: self.hbar,
            grid: self.grid.clone(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            matrix: &self.matrix - &other.matrix,
            hbar: self.hbar,
            grid: self.grid.clone(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
            hbar: self.hbar,
            grid: self.grid.clone(),
        })
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("operators live on different grids".into()));
        }
        if self.hbar != other.hbar {
            return Err(Error::HbarMismatch(self.hbar, other.hbar));
        }
        Ok(())
    }

    /// Operator (spectral) norm via SVD.
    pub fn norm(&self) -> f64 {
        op_norm(&self.matrix)
    }

    /// Operator norm compressed (two-sidedly) to the band-limited subspace
    /// `|mm| <= max_mode`.  The symmetric compression `P* M P` keeps the norm
    /// invariant under adjoints, matching the continuum residual symmetries.
    pub fn band_norm(&self, max_mode: usize) -> f64 {
        let p = self.grid.band_projector(max_mode);
        op_norm(&(p.adjoint() * &self.matrix * &p))
    }

    /// Operator norm compressed (two-sidedly) to the interior band-limited
    /// subspace of [`GridRep::interior_frame`].
    pub fn interior_band_norm(&self) -> f64 {
        let p = self.grid.interior_frame();
        op_norm(&(p.adjoint() * &self.matrix * &p))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        op_norm(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn unitarity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        op_norm(&(&self.matrix.adjoint() * &self.matrix - DMatrix::<C64>::identity(n, n)))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().fold(f64::INFINITY, |a, &e| a.min(e))
    }
}

pub fn op_norm(m: &DMatrix<C64>) -> f64 {
    m.clone().singular_values().iter().fold(0.0f64, |a, &s| a.max(s))
}

/// Grid samples of the coherent state
/// `psi_hbar^{(p,q)}(x) = (pi hbar)^{-1/4} exp(-ipq/2h + ipx/h - (x-q)^2/2h)`.
///
/// Rejects centers whose Gaussian tail at the periodic boundary exceeds the
/// truncation budget, since wrapped tails would corrupt overlaps silently.
pub fn coherent_state(grid: &GridRep, hbar: f64, p: f64, q: f64) -> Result<DVector<C64>> {
    if hbar <= 0.0 {
        return Err(Error::InvalidConfig(format!("hbar must be positive (got {hbar})")));
    }
    let margin = grid.extent() - q.abs();
    let tail = (-margin * margin / hbar).exp();
    if margin <= 0.0 || tail > 1e-10 {
        return Err(Error::BoundaryTail(tail));
    }
    let norm = (std::f64::consts::PI * hbar).powf(-0.25);
    Ok(DVector::from_iterator(
        grid.n_points(),
        (0..grid.n_points()).map(|i| {
            let x = grid.point(i);
            let phase = -p * q / (2.0 * hbar) + p * x / hbar;
            let gauss = (-(x - q) * (x - q) / (2.0 * hbar)).exp();
            C64::new(0.0, phase).exp() * norm * gauss
        }),
    ))
}

/// Quadrature inner product `<u,v> = dx * sum conj(u) v`.
pub fn quad_inner(grid: &GridRep, u: &DVector<C64>, v: &DVector<C64>) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..u.len() {
        acc += u[i].conj() * v[i];
    }
    acc * grid.spacing()
}

/// Represent the Weyl generator:
/// `(pi(W(a,b)) psi)(x) = e^{-i hbar a b / 2} e^{i b x} psi(x - hbar a)`.
///
/// The shift direction and phase sign are fixed so that the represented
/// composition law carries the same phase `e^{-i hbar sigma/2}` as the
/// abstract generator relation and so that `-i d/dt pi(W(ta,tb))` at `t = 0`
/// is exactly `i hbar a d/dx + b x` (the field operator below); the opposite
/// shift direction satisfies these with inconsistent relative signs.
pub fn rep_weyl(grid: &GridRep, hbar: f64, a: f64, b: f64, mode: ShiftMode) -> Result<RepOperator> {
    let n = grid.n_points();
    let dx = grid.spacing();
    let shift_cells = hbar * a / dx;
    let global = C64::new(0.0, -hbar * a * b / 2.0).exp();
    let mut m = DMatrix::<C64>::zeros(n, n);
    match mode {
        ShiftMode::Strict => {
            let s = shift_cells.round();
            if (shift_cells - s).abs() > 1e-9 {
                return Err(Error::FractionalShift(shift_cells));
            }
            let s = s as i64;
            for i in 0..n {
                let j = (i as i64 - s).rem_euclid(n as i64) as usize;
                m[(i, j)] = global * C64::new(0.0, b * grid.point(i)).exp();
            }
        }
        ShiftMode::Spectral => {
            // psi(x_i - hbar a) = sum_j s_{j-i} psi(x_j) with the circulant
            // kernel s_d = (1/N) sum_m e^{-i k_m (d dx + hbar a)}.
            let kernel: Vec<C64> = (0..n)
                .map(|d| {
                    let mut acc = C64::new(0.0, 0.0);
                    for mi in 0..n {
                        let k = grid.wavenumber(mi);
                        acc += C64::new(0.0, -k * (d as f64 * dx + hbar * a)).exp();
                    }
                    acc / n as f64
                })
                .collect();
            for i in 0..n {
                let phase = global * C64::new(0.0, b * grid.point(i)).exp();
                for j in 0..n {
                    let d = (j as i64 - i as i64).rem_euclid(n as i64) as usize;
                    m[(i, j)] = phase * kernel[d];
                }
            }
        }
    }
    Ok(RepOperator { matrix: m, hbar, grid: grid.clone() })
}

/// Represent a symbolic algebra element term-by-term.
pub fn rep_element(grid: &GridRep, a: &WeylElement, mode: ShiftMode) -> Result<RepOperator> {
    let mut out = RepOperator::identity(grid, a.hbar()).scale(C64::new(0.0, 0.0));
    for (f, z) in a.terms() {
        let c = f.coords();
        if c.len() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "grid representation needs 1-mode test functions, got {} coordinates",
                c.len()
            )));
        }
        let w = rep_weyl(grid, a.hbar(), c[0], c[1], mode)?;
        out = out.add(&w.scale(z))?;
    }
    Ok(out)
}

/// Quadrature specification for the Berezin phase-space integral.
///
/// Momentum nodes are fixed to the grid's Fourier dual lattice
/// (`p = hbar k_m`, spacing `dp = pi hbar / L`, one Nyquist cell), which makes
/// the resolution of identity exact up to Gaussian boundary terms.  Position
/// nodes tile `[-(L+pad), L+pad]` with spacing `dq_cells * dx`, so grid
/// refinement also refines the q-quadrature.
#[derive(Clone, Copy, Debug)]
pub struct QuadSpec {
    pub dq_cells: usize,
    pub q_pad_sigmas: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self { dq_cells: 8, q_pad_sigmas: 8.0 }
    }
}

impl QuadSpec {
    fn q_nodes(&self, grid: &GridRep, hbar: f64) -> (Vec<f64>, f64) {
        let dq = self.dq_cells as f64 * grid.spacing();
        let half_width = grid.extent() + self.q_pad_sigmas * hbar.sqrt();
        let n_side = (half_width / dq).ceil() as i64;
        let nodes = (-n_side..=n_side).map(|i| i as f64 * dq).collect();
        (nodes, dq)
    }
}

/// Assemble the Berezin operator
/// `Q^B(f) = (2 pi hbar)^{-1} integral f(p,q) |psi^{(p,q)}><psi^{(p,q)}| dp dq`
/// by midpoint quadrature, with the momentum integral factored per q-node as a
/// Toeplitz kernel in `x - y`.
pub fn berezin_operator(
    grid: &GridRep,
    hbar: f64,
    symbol: &(dyn Fn(f64, f64) -> C64 + Sync),
    quad: &QuadSpec,
) -> Result<RepOperator> {
    if hbar <= 0.0 {
        return Err(Error::InvalidConfig(format!("hbar must be positive (got {hbar})")));
    }
    let n = grid.n_points();
    let dx = grid.spacing();
    let (q_nodes, dq) = quad.q_nodes(grid, hbar);
    let dp = std::f64::consts::PI * hbar / grid.extent();
    let p_nodes: Vec<f64> = (0..n).map(|m| hbar * grid.wavenumber(m)).collect();
    let xs = grid.points();
    let prefactor = dx * dq * dp / (2.0 * std::f64::consts::PI * hbar)
        * (std::f64::consts::PI * hbar).powf(-0.5);

    let partials: Vec<DMatrix<C64>> = q_nodes
        .par_iter()
        .map(|&q| {
            // T_q(d) = sum_p f(p,q) e^{i p d dx / hbar} over offsets d in
            // [-(N-1), N-1].
            let mut kernel = vec![C64::new(0.0, 0.0); 2 * n - 1];
            for (slot, d) in (-(n as i64 - 1)..=(n as i64 - 1)).enumerate() {
                let delta = d as f64 * dx;
                let mut acc = C64::new(0.0, 0.0);
                for &p in &p_nodes {
                    acc += symbol(p, q) * C64::new(0.0, p * delta / hbar).exp();
                }
                kernel[slot] = acc;
            }
            let g: Vec<f64> = xs.iter().map(|&x| (-(x - q) * (x - q) / (2.0 * hbar)).exp()).collect();
            let mut part = DMatrix::<C64>::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let slot = (i as i64 - j as i64 + n as i64 - 1) as usize;
                    part[(i, j)] = kernel[slot] * (g[i] * g[j]);
                }
            }
            part
        })
        .collect();

    let mut m = DMatrix::<C64>::zeros(n, n);
    for part in partials {
        m += part;
    }
    Ok(RepOperator { matrix: m * C64::new(prefactor, 0.0), hbar, grid: grid.clone() })
}

/// Residual `|| Q^B(1) - I ||` of the coherent-state resolution of identity
/// under the given quadrature.  Certifies the window before other Berezin
/// results are trusted.
pub fn resolution_residual(grid: &GridRep, hbar: f64, quad: &QuadSpec) -> Result<f64> {
    let one = berezin_operator(grid, hbar, &|_, _| C64::new(1.0, 0.0), quad)?;
    let id = RepOperator::identity(grid, hbar);
    Ok(one.sub(&id)?.norm())
}

/// Certified Berezin operator: checks the resolution of identity first and
/// rejects quadratures whose residual exceeds `tol`.
pub fn berezin_operator_certified(
    grid: &GridRep,
    hbar: f64,
    symbol: &(dyn Fn(f64, f64) -> C64 + Sync),
    quad: &QuadSpec,
    tol: f64,
) -> Result<(RepOperator, f64)> {
    let roi = resolution_residual(grid, hbar, quad)?;
    if roi > tol {
        return Err(Error::QuadratureWindow(roi));
    }
    Ok((berezin_operator(grid, hbar, symbol, quad)?, roi))
}

/// Field-operator assembly mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldMode {
    /// `i hbar a d/dx + b x` via the spectral derivative matrix.
    Direct,
    /// `-i (W(ta, tb) - I)/t` with a two-level Richardson extrapolation in t.
    Limit,
}

/// Spectral derivative matrix (antisymmetric real circulant; the Nyquist mode
/// is zeroed to keep the matrix skew-symmetric on even grids).
fn derivative_matrix(grid: &GridRep) -> DMatrix<f64> {
    let n = grid.n_points();
    let dx = grid.spacing();
    let mut kernel = vec![0.0f64; n];
    for d in 0..n {
        let mut acc = 0.0;
        for m in 0..n {
            if grid.mode_int(m).unsigned_abs() == n / 2 {
                continue;
            }
            let k = grid.wavenumber(m);
            // imaginary parts cancel over +-m pairs; kernel index d = j - i
            acc += k * (k * d as f64 * dx).sin();
        }
        kernel[d] = acc / n as f64;
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let d = (j as i64 - i as i64).rem_euclid(n as i64) as usize;
            m[(i, j)] = kernel[d];
        }
    }
    m
}

/// Represent the field operator `Phi(a,b) = i hbar a d/dx + b x`.
pub fn field_operator(
    grid: &GridRep,
    hbar: f64,
    a: f64,
    b: f64,
    mode: FieldMode,
) -> Result<RepOperator> {
    let n = grid.n_points();
    match mode {
        FieldMode::Direct => {
            let deriv = derivative_matrix(grid);
            let mut m = DMatrix::<C64>::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = C64::new(0.0, hbar * a * deriv[(i, j)]);
                }
                m[(i, i)] += C64::new(b * grid.point(i), 0.0);
            }
            Ok(RepOperator { matrix: m, hbar, grid: grid.clone() })
        }
        FieldMode::Limit => {
            let at = |t: f64| -> Result<DMatrix<C64>> {
                let w = rep_weyl(grid, hbar, t * a, t * b, ShiftMode::Spectral)?;
                let diff = w.matrix - DMatrix::<C64>::identity(n, n);
                Ok(diff * C64::new(0.0, -1.0 / t))
            };
            // Two-level Richardson over t, t/2, t/4 removes the O(t) and
            // O(t^2) expansion bias of the difference quotient.
            let t = 2e-3;
            let a1 = at(t)?;
            let a2 = at(t / 2.0)?;
            let a3 = at(t / 4.0)?;
            let r1 = &a2 * C64::new(2.0, 0.0) - &a1;
            let r2 = &a3 * C64::new(2.0, 0.0) - &a2;
            let m = (r2 * C64::new(4.0, 0.0) - r1) * C64::new(1.0 / 3.0, 0.0);
            Ok(RepOperator { matrix: m, hbar, grid: grid.clone() })
        }
    }
}

/// Represent the field operator attached to a 1-mode symbolic test function.
pub fn field_operator_tf(
    grid: &GridRep,
    hbar: f64,
    f: &TestFunction,
    mode: FieldMode,
) -> Result<RepOperator> {
    let c = f.coords();
    if c.len() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "grid representation needs 1-mode test functions, got {} coordinates",
            c.len()
        )));
    }
    field_operator(grid, hbar, c[0], c[1], mode)
}

/// Report from [`diagram_residual`].
#[derive(Clone, Debug)]
pub struct DiagramReport {
    pub residual: f64,
    pub roi_residual: f64,
    pub frame_states: usize,
}

/// Operator-norm residual of the quantization diagram
/// `|| P* (Q^B(e^{i(bq-ap)}) - c_h(a,b) pi(W(a,b))) P ||` with
/// `c_h(a,b) = e^{-hbar (a^2+b^2)/4}` and `P` the interior band-limited frame
/// of [`GridRep::interior_frame`].
///
/// `e^{i(bq-ap)}` is the classical function whose quantization is `W(a,b)`:
/// it is `e^{i phi0}` for the classical field `phi0(a,b)(p,q) = bq - ap`, the
/// coherent-state expectation of `i hbar a d/dx + b x`.
///
/// The interior compression is essential, not cosmetic: the spectral shift
/// unitary is circulant and wraps mass across the periodic boundary, while
/// the coherent-state quadrature is built from Gaussians in the true (non
/// -periodized) distance and carries no wrap band.  The two agree only on
/// states supported away from the boundary; on plane waves (which live on the
/// boundary) the wrap corner contributes an `O(c_h)` discrepancy that no grid
/// refinement removes.
pub fn diagram_residual(
    grid: &GridRep,
    hbar: f64,
    a: f64,
    b: f64,
    quad: &QuadSpec,
) -> Result<DiagramReport> {
    let symbol = move |p: f64, q: f64| C64::new(0.0, b * q - a * p).exp();
    let (qb, roi) = berezin_operator_certified(grid, hbar, &symbol, quad, 1e-2)?;
    let c = (-hbar * (a * a + b * b) / 4.0).exp();
    let w = rep_weyl(grid, hbar, a, b, ShiftMode::Spectral)?;
    let diff = qb.sub(&w.scale(C64::new(c, 0.0)))?;
    let frame_states = grid.interior_frame().ncols();
    Ok(DiagramReport { residual: diff.interior_band_norm(), roi_residual: roi, frame_states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid() -> GridRep {
        GridRep::new(128, 10.0).unwrap()
    }

    #[test]
    fn coherent_state_norm_and_parity() {
        let g = GridRep::new(512, 10.0).unwrap();
        let psi = coherent_state(&g, 1.0, 0.0, 0.0).unwrap();
        let n2 = quad_inner(&g, &psi, &psi);
        assert_abs_diff_eq!(n2.re, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(n2.im, 0.0, epsilon = 1e-14);
        // parity: psi(-x) = psi(x); x_i = -L + i dx pairs index i with N - i
        for i in 1..g.n_points() {
            let j = g.n_points() - i;
            assert_abs_diff_eq!((psi[i] - psi[j]).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn coherent_state_overlap_gaussian() {
        let g = GridRep::new(512, 10.0).unwrap();
        let hbar = 1.0;
        let a = coherent_state(&g, hbar, 0.0, 0.0).unwrap();
        for q in [0.5, 1.0, 2.0] {
            let b = coherent_state(&g, hbar, 0.0, q).unwrap();
            let ov = quad_inner(&g, &a, &b).norm();
            assert_abs_diff_eq!(ov, (-q * q / (4.0 * hbar)).exp(), epsilon = 1e-8);
        }
    }

    #[test]
    fn coherent_state_boundary_rejected() {
        let g = grid();
        assert!(matches!(coherent_state(&g, 1.0, 0.0, 9.8), Err(Error::BoundaryTail(_))));
    }

    #[test]
    fn rep_weyl_identity_and_diagonal() {
        let g = grid();
        let id = rep_weyl(&g, 1.0, 0.0, 0.0, ShiftMode::Strict).unwrap();
        assert_abs_diff_eq!(
            id.sub(&RepOperator::identity(&g, 1.0)).unwrap().norm(),
            0.0,
            epsilon = 1e-14
        );
        // a=0, b=1: diagonal with entries e^{i x}
        let d = rep_weyl(&g, 1.0, 0.0, 1.0, ShiftMode::Strict).unwrap();
        for i in 0..g.n_points() {
            let expect = C64::new(0.0, g.point(i)).exp();
            assert_abs_diff_eq!((d.matrix[(i, i)] - expect).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn rep_weyl_unitary_both_modes() {
        let g = grid();
        let dx = g.spacing();
        let strict = rep_weyl(&g, 0.5, 6.0 * dx / 0.5, 0.7, ShiftMode::Strict).unwrap();
        assert!(strict.unitarity_defect() < 1e-12);
        let spectral = rep_weyl(&g, 0.5, 1.3, 0.7, ShiftMode::Spectral).unwrap();
        assert!(spectral.unitarity_defect() < 1e-11);
    }

    #[test]
    fn rep_weyl_fractional_strict_rejected() {
        let g = grid();
        assert!(matches!(
            rep_weyl(&g, 1.0, 0.3, 0.0, ShiftMode::Strict),
            Err(Error::FractionalShift(_))
        ));
    }

    #[test]
    fn rep_weyl_ccr_composition_strict() {
        // Lattice-compatible a (integer cells) and b (multiples of pi/L) keep
        // the wrapped representation an exact CCR representation.
        let g = grid();
        let hbar = 0.5;
        let dx = g.spacing();
        let db = std::f64::consts::PI / g.extent();
        let cases = [(3.0, 2.0, -5.0, 4.0), (0.0, 1.0, 2.0, 0.0), (7.0, -3.0, 1.0, 1.0)];
        for (ja, mb, ja2, mb2) in cases {
            let (a, b) = (ja * dx / hbar, mb * db);
            let (a2, b2) = (ja2 * dx / hbar, mb2 * db);
            let u = rep_weyl(&g, hbar, a, b, ShiftMode::Strict).unwrap();
            let v = rep_weyl(&g, hbar, a2, b2, ShiftMode::Strict).unwrap();
            let lhs = u.mul(&v).unwrap();
            let sigma = a * b2 - a2 * b;
            let phase = C64::new(0.0, -hbar / 2.0 * sigma).exp();
            let rhs = rep_weyl(&g, hbar, a + a2, b + b2, ShiftMode::Strict)
                .unwrap()
                .scale(phase);
            assert!(lhs.sub(&rhs).unwrap().norm() < 1e-10);
        }
    }

    #[test]
    fn berezin_resolution_of_identity() {
        let g = GridRep::new(128, 10.0).unwrap();
        let roi = resolution_residual(&g, 1.0, &QuadSpec::default()).unwrap();
        assert!(roi < 1e-2, "roi residual {roi}");
        let g2 = GridRep::new(256, 10.0).unwrap();
        let roi2 = resolution_residual(&g2, 1.0, &QuadSpec::default()).unwrap();
        assert!(roi2 < roi, "refinement must decrease roi: {roi} -> {roi2}");
        assert!(roi2 < 1e-6, "roi residual {roi2}");
    }

    #[test]
    fn berezin_real_symbol_hermitian_and_positive() {
        let g = grid();
        // nonnegative random-ish smooth symbol
        let f = |p: f64, q: f64| C64::new(1.0 + (0.3 * p).sin().powi(2) + (-q * q / 4.0).exp(), 0.0);
        let op = berezin_operator(&g, 1.0, &f, &QuadSpec::default()).unwrap();
        assert!(op.hermiticity_defect() < 1e-12);
        assert!(op.min_eigenvalue() > -1e-10);
    }

    #[test]
    fn field_operator_diagonal_and_hermitian() {
        let g = grid();
        let x = field_operator(&g, 1.0, 0.0, 1.0, FieldMode::Direct).unwrap();
        for i in 0..g.n_points() {
            assert_abs_diff_eq!(x.matrix[(i, i)].re, g.point(i), epsilon = 1e-14);
        }
        let phi = field_operator(&g, 0.5, 1.0, -2.0, FieldMode::Direct).unwrap();
        assert!(phi.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn field_operator_limit_matches_direct_on_band() {
        let g = grid();
        let hbar = 0.5;
        let direct = field_operator(&g, hbar, 1.0, 0.5, FieldMode::Direct).unwrap();
        let limit = field_operator(&g, hbar, 1.0, 0.5, FieldMode::Limit).unwrap();
        let diff = limit.sub(&direct).unwrap().interior_band_norm();
        assert!(diff < 1e-6, "limit-vs-direct band norm {diff}");
    }

    #[test]
    fn field_commutator_on_band() {
        // [Phi(1,0), Phi(0,1)] = i hbar I on band-limited states
        let g = grid();
        let hbar = 0.7;
        let p1 = field_operator(&g, hbar, 1.0, 0.0, FieldMode::Direct).unwrap();
        let p2 = field_operator(&g, hbar, 0.0, 1.0, FieldMode::Direct).unwrap();
        let comm = p1.mul(&p2).unwrap().sub(&p2.mul(&p1).unwrap()).unwrap();
        let expect = RepOperator::identity(&g, hbar).scale(C64::new(0.0, hbar));
        let diff = comm.sub(&expect).unwrap().interior_band_norm();
        assert!(diff < 1e-9, "commutator band norm {diff}");
    }

    #[test]
    fn weak_limit_first_order_rate() {
        // <chi, -i(W(ta,tb)-I)/t psi> converges first-order to the direct
        // field matrix element on band-limited states.
        let g = grid();
        let hbar = 1.0;
        let (a, b) = (0.8, -0.6);
        let psi: DVector<C64> = DVector::from_fn(g.n_points(), |i, _| {
            C64::new((g.point(i) * 0.5).sin() * (-g.point(i).powi(2) / 4.0).exp(), 0.0)
        });
        let chi: DVector<C64> = DVector::from_fn(g.n_points(), |i, _| {
            let x = g.point(i);
            C64::new((-(x - 1.0).powi(2) / 3.0).exp(), 0.1 * (x * 0.3).cos() * (-x * x / 4.0).exp())
        });
        let direct = field_operator(&g, hbar, a, b, FieldMode::Direct).unwrap();
        let target = quad_inner(&g, &chi, &(&direct.matrix * &psi));
        let at = |t: f64| {
            let w = rep_weyl(&g, hbar, t * a, t * b, ShiftMode::Spectral).unwrap();
            let v = (&w.matrix * &psi - &psi) * C64::new(0.0, -1.0 / t);
            quad_inner(&g, &chi, &v)
        };
        let e1 = (at(2e-3) - target).norm();
        let e2 = (at(1e-3) - target).norm();
        let rate = (e1 / e2).log2();
        assert!((rate - 1.0).abs() < 0.15, "observed rate {rate}");
    }

    #[test]
    fn diagram_residual_zero_symbol() {
        let g = GridRep::new(128, 10.0).unwrap();
        let rep = diagram_residual(&g, 1.0, 0.0, 0.0, &QuadSpec::default()).unwrap();
        // both sides are the identity up to quadrature error
        assert!(rep.residual < 2.0 * rep.roi_residual + 1e-12);
    }

    #[test]
    fn diagram_residual_nonzero_symbol_converges() {
        // For a genuine shift (a = 1, a fractional number of cells) the
        // Berezin operator must match c_h W(a,0) on interior states, and the
        // agreement must sharpen under grid refinement.
        let coarse = diagram_residual(
            &GridRep::new(128, 10.0).unwrap(),
            1.0,
            1.0,
            0.0,
            &QuadSpec::default(),
        )
        .unwrap();
        let fine = diagram_residual(
            &GridRep::new(256, 10.0).unwrap(),
            1.0,
            1.0,
            0.0,
            &QuadSpec::default(),
        )
        .unwrap();
        assert!(coarse.residual < 1e-2, "coarse residual {}", coarse.residual);
        assert!(fine.residual < 1e-8, "fine residual {}", fine.residual);
        assert!(fine.residual < coarse.residual);
    }

    #[test]
    fn berezin_shift_symbol_diagonal_on_interior_gaussian() {
        // Q^B(e^{-iap}) applied to an interior Gaussian reproduces
        // c_h psi(x - hbar a) up to quadrature error; checks the phase
        // conventions of the coherent-state kernel directly.
        let g = GridRep::new(256, 10.0).unwrap();
        let hbar = 1.0;
        let a = 1.0;
        let symbol = move |p: f64, _q: f64| C64::new(0.0, -a * p).exp();
        let qb = berezin_operator(&g, hbar, &symbol, &QuadSpec::default()).unwrap();
        let c = (-hbar * a * a / 4.0).exp();
        let psi: DVector<C64> =
            DVector::from_fn(g.n_points(), |i, _| C64::new((-g.point(i).powi(2) / 2.0).exp(), 0.0));
        let shifted: DVector<C64> = DVector::from_fn(g.n_points(), |i, _| {
            C64::new((-(g.point(i) - hbar * a).powi(2) / 2.0).exp(), 0.0)
        });
        let got = &qb.matrix * &psi;
        let want = shifted * C64::new(c, 0.0);
        assert!((got - want).norm() / psi.norm() < 1e-9);
    }

    #[test]
    fn diagram_residual_adjoint_symmetry() {
        let g = GridRep::new(128, 10.0).unwrap();
        let r1 = diagram_residual(&g, 1.0, 1.0, 0.0, &QuadSpec::default()).unwrap();
        let r2 = diagram_residual(&g, 1.0, -1.0, 0.0, &QuadSpec::default()).unwrap();
        assert_abs_diff_eq!(r1.residual, r2.residual, epsilon = 1e-8);
    }
}
