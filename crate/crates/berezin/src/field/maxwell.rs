//! Electromagnetic field on the 3-torus in Coulomb gauge: the massless
//! frequency multiplier `(-laplacian)^{1/2}`, spectral divergence/curl, the
//! Helmholtz projector onto divergence-free fields, and div-free basis
//! families for the number and energy functionals.

use super::{
    fourier_forward, fourier_inverse_real, integrate, random_band_limited, FieldGrid, FieldState,
    SpectralOperator,
};
#[cfg(test)]
use super::inner;
use crate::error::{Error, Result};
use num_complex::Complex;

fn require_torus3(grid: &FieldGrid) -> Result<usize> {
    match grid {
        FieldGrid::PeriodicTorus { dim: 3, n, .. } => Ok(*n),
        _ => Err(Error::InvalidConfig("Maxwell operations need a 3-d torus grid".into())),
    }
}

/// Massless frequency multiplier `|k|` per mode.  The constant mode has
/// symbol zero and is excluded from inverses; Maxwell states are restricted
/// to mean-zero divergence-free fields.
pub fn build_mu_maxwell(grid: &FieldGrid) -> Result<SpectralOperator> {
    require_torus3(grid)?;
    let symbol: Vec<f64> = (0..grid.points())
        .map(|flat| grid.wavevector(flat).iter().map(|ki| ki * ki).sum::<f64>().sqrt())
        .collect();
    SpectralOperator::multiplier(grid.clone(), symbol)
}

/// Spectral divergence of a 3-component field.
pub fn divergence(grid: &FieldGrid, field: &[Vec<f64>; 3]) -> Result<Vec<f64>> {
    let n = require_torus3(grid)?;
    let mut hats = [
        fourier_forward(grid, &field[0]),
        fourier_forward(grid, &field[1]),
        fourier_forward(grid, &field[2]),
    ];
    let mut div_hat = vec![Complex::new(0.0, 0.0); grid.points()];
    for axis in 0..3 {
        let stride = n.pow(2 - axis as u32);
        for (flat, h) in hats[axis].iter_mut().enumerate() {
            let bin = (flat / stride) % n;
            let k = if bin == n / 2 { 0.0 } else { grid.axis_wavenumber(bin) };
            div_hat[flat] += Complex::new(0.0, k) * *h;
        }
    }
    Ok(fourier_inverse_real(grid, div_hat))
}

/// Spectral curl of a 3-component (co)vector field.
pub fn curl(grid: &FieldGrid, a: &[Vec<f64>; 3]) -> Result<[Vec<f64>; 3]> {
    let n = require_torus3(grid)?;
    let hats =
        [fourier_forward(grid, &a[0]), fourier_forward(grid, &a[1]), fourier_forward(grid, &a[2])];
    let mut out_hats = [
        vec![Complex::new(0.0, 0.0); grid.points()],
        vec![Complex::new(0.0, 0.0); grid.points()],
        vec![Complex::new(0.0, 0.0); grid.points()],
    ];
    for flat in 0..grid.points() {
        let mut k = [0.0; 3];
        let mut rest = flat;
        for axis in (0..3).rev() {
            let bin = rest % n;
            k[axis] = if bin == n / 2 { 0.0 } else { grid.axis_wavenumber(bin) };
            rest /= n;
        }
        let ik = |axis: usize, h: Complex<f64>| Complex::new(0.0, k[axis]) * h;
        // (curl a)_1 = d2 a3 - d3 a2, cyclically
        out_hats[0][flat] = ik(1, hats[2][flat]) - ik(2, hats[1][flat]);
        out_hats[1][flat] = ik(2, hats[0][flat]) - ik(0, hats[2][flat]);
        out_hats[2][flat] = ik(0, hats[1][flat]) - ik(1, hats[0][flat]);
    }
    let [h0, h1, h2] = out_hats;
    Ok([
        fourier_inverse_real(grid, h0),
        fourier_inverse_real(grid, h1),
        fourier_inverse_real(grid, h2),
    ])
}

/// Helmholtz projection onto divergence-free fields: per mode subtract
/// `k (k . f) / |k|^2`; the zero mode is passed through unchanged.
pub fn helmholtz_project(grid: &FieldGrid, field: &[Vec<f64>; 3]) -> Result<[Vec<f64>; 3]> {
    let n = require_torus3(grid)?;
    let mut hats = [
        fourier_forward(grid, &field[0]),
        fourier_forward(grid, &field[1]),
        fourier_forward(grid, &field[2]),
    ];
    for flat in 0..grid.points() {
        let mut k = [0.0; 3];
        let mut rest = flat;
        for axis in (0..3).rev() {
            let bin = rest % n;
            k[axis] = if bin == n / 2 { 0.0 } else { grid.axis_wavenumber(bin) };
            rest /= n;
        }
        let k2: f64 = k.iter().map(|ki| ki * ki).sum();
        if k2 == 0.0 {
            continue;
        }
        let dot = Complex::new(k[0], 0.0) * hats[0][flat]
            + Complex::new(k[1], 0.0) * hats[1][flat]
            + Complex::new(k[2], 0.0) * hats[2][flat];
        for axis in 0..3 {
            hats[axis][flat] -= Complex::new(k[axis] / k2, 0.0) * dot;
        }
    }
    let [h0, h1, h2] = hats;
    Ok([
        fourier_inverse_real(grid, h0),
        fourier_inverse_real(grid, h1),
        fourier_inverse_real(grid, h2),
    ])
}

/// L^2-orthonormal basis of the mean-zero divergence-free band-limited
/// subspace: for each mode `0 < max|m_i| <= band` (one representative per
/// `{k, -k}` pair), cosine and sine waves times two transverse polarization
/// unit vectors, stacked into flat 3-component sample vectors.
pub fn divfree_l2_basis(grid: &FieldGrid, band: i64) -> Result<Vec<Vec<f64>>> {
    let n = require_torus3(grid)?;
    let extent = match grid {
        FieldGrid::PeriodicTorus { extent, .. } => *extent,
        FieldGrid::HalfLine { .. } => unreachable!(),
    };
    if band <= 0 || band >= n as i64 / 2 {
        return Err(Error::InvalidConfig(format!(
            "band must lie in 1..{} (half the axis resolution), got {band}",
            n as i64 / 2 - 1
        )));
    }
    let volume = extent.powi(3);
    let amp = (2.0 / volume).sqrt();
    let base = 2.0 * std::f64::consts::PI / extent;
    let mut out = Vec::new();
    for m1 in -band..=band {
        for m2 in -band..=band {
            for m3 in -band..=band {
                // one representative per +-k pair: first nonzero index positive
                let lead = [m1, m2, m3].into_iter().find(|&m| m != 0);
                match lead {
                    None => continue,
                    Some(m) if m < 0 => continue,
                    Some(_) => {}
                }
                let k = [base * m1 as f64, base * m2 as f64, base * m3 as f64];
                for pol in transverse_pair(k) {
                    for trig in [f64::cos, f64::sin] {
                        let mut stacked = vec![0.0; 3 * grid.points()];
                        for flat in 0..grid.points() {
                            let mut rest = flat;
                            let mut phase = 0.0;
                            for axis in (0..3).rev() {
                                phase += k[axis] * grid.axis_coord(rest % n);
                                rest /= n;
                            }
                            let v = amp * trig(phase);
                            for axis in 0..3 {
                                stacked[axis * grid.points() + flat] = v * pol[axis];
                            }
                        }
                        out.push(stacked);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Two orthonormal unit vectors perpendicular to `k`.
fn transverse_pair(k: [f64; 3]) -> [[f64; 3]; 2] {
    let norm = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let khat = [k[0] / norm, k[1] / norm, k[2] / norm];
    let seed = if khat[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let mut e1 = cross(khat, seed);
    let n1 = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    for v in e1.iter_mut() {
        *v /= n1;
    }
    let e2 = cross(khat, e1);
    [e1, e2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Random mean-zero divergence-free band-limited 3-component field.
pub fn random_divfree(
    grid: &FieldGrid,
    band: i64,
    rng: &mut impl rand::Rng,
) -> Result<[Vec<f64>; 3]> {
    require_torus3(grid)?;
    let mut comps = [
        random_band_limited(grid, band, rng)?,
        random_band_limited(grid, band, rng)?,
        random_band_limited(grid, band, rng)?,
    ];
    for c in comps.iter_mut() {
        let mean = c.iter().sum::<f64>() / c.len() as f64;
        for v in c.iter_mut() {
            *v -= mean;
        }
    }
    helmholtz_project(grid, &comps)
}

/// Closed-form electromagnetic energy `1/2 int |E|^2 + |curl A|^2`.
pub fn closed_form_hamiltonian_maxwell(grid: &FieldGrid, state: &FieldState) -> Result<f64> {
    let (e, a) = match state {
        FieldState::Vector { e, a } => (e, a),
        FieldState::Scalar { .. } => {
            return Err(Error::GridMismatch("Maxwell energy needs a vector state".into()))
        }
    };
    let curl_a = curl(grid, a)?;
    let mut density = vec![0.0; grid.points()];
    for axis in 0..3 {
        for (d, (ev, cv)) in density.iter_mut().zip(e[axis].iter().zip(&curl_a[axis])) {
            *d += ev * ev + cv * cv;
        }
    }
    Ok(0.5 * integrate(grid, &density))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{
        alpha_basis, closed_form_total_number, complex_structure_from_mu, hamiltonian,
        laplacian, total_number, AlphaSide,
    };
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    fn torus() -> FieldGrid {
        FieldGrid::torus(3, TAU, 16).unwrap()
    }

    fn sin_x_field(grid: &FieldGrid) -> [Vec<f64>; 3] {
        let n = 16usize;
        let mut a1 = vec![0.0; grid.points()];
        for flat in 0..grid.points() {
            let x = grid.axis_coord(flat / (n * n));
            a1[flat] = x.sin();
        }
        [vec![0.0; grid.points()], a1, vec![0.0; grid.points()]]
    }

    #[test]
    fn curl_of_sin_x_is_cos_x_in_z() {
        let grid = torus();
        let n = 16usize;
        let c = curl(&grid, &sin_x_field(&grid)).unwrap();
        for flat in 0..grid.points() {
            let x = grid.axis_coord(flat / (n * n));
            assert_relative_eq!(c[0][flat], 0.0, epsilon = 1e-10);
            assert_relative_eq!(c[1][flat], 0.0, epsilon = 1e-10);
            assert_relative_eq!(c[2][flat], x.cos(), epsilon = 1e-10);
        }
    }

    #[test]
    fn div_of_curl_vanishes() {
        let grid = torus();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = [
            random_band_limited(&grid, 3, &mut rng).unwrap(),
            random_band_limited(&grid, 3, &mut rng).unwrap(),
            random_band_limited(&grid, 3, &mut rng).unwrap(),
        ];
        let d = divergence(&grid, &curl(&grid, &a).unwrap()).unwrap();
        let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        for v in d {
            assert!(v.abs() <= 1e-10 * scale.max(1.0));
        }
    }

    #[test]
    fn helmholtz_kills_gradients_and_fixes_divfree() {
        let grid = torus();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        // pure gradient input projects to zero
        let psi = random_band_limited(&grid, 3, &mut rng).unwrap();
        let grad = crate::field::spectral_gradient(&grid, &psi).unwrap();
        let grad3 = [grad[0].clone(), grad[1].clone(), grad[2].clone()];
        let projected = helmholtz_project(&grid, &grad3).unwrap();
        for comp in &projected {
            for v in comp {
                assert!(v.abs() < 1e-10);
            }
        }
        // a div-free input is unchanged, and the projector is idempotent
        let a = sin_x_field(&grid);
        let once = helmholtz_project(&grid, &a).unwrap();
        for (c1, c2) in once.iter().zip(&a) {
            for (v1, v2) in c1.iter().zip(c2) {
                assert_relative_eq!(v1, v2, epsilon = 1e-12);
            }
        }
        let again = helmholtz_project(&grid, &once).unwrap();
        for (c1, c2) in again.iter().zip(&once) {
            for (v1, v2) in c1.iter().zip(c2) {
                assert_relative_eq!(v1, v2, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn pairing_invariant_under_projection() {
        let grid = torus();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        // div-free test pair (f, g)
        let f = random_divfree(&grid, 2, &mut rng).unwrap();
        let g = random_divfree(&grid, 2, &mut rng).unwrap();
        // arbitrary smooth (E, A), not divergence free
        let e = [
            random_band_limited(&grid, 3, &mut rng).unwrap(),
            random_band_limited(&grid, 3, &mut rng).unwrap(),
            random_band_limited(&grid, 3, &mut rng).unwrap(),
        ];
        let a = [
            random_band_limited(&grid, 3, &mut rng).unwrap(),
            random_band_limited(&grid, 3, &mut rng).unwrap(),
            random_band_limited(&grid, 3, &mut rng).unwrap(),
        ];
        let pairing = |e: &[Vec<f64>; 3], a: &[Vec<f64>; 3]| -> f64 {
            (0..3)
                .map(|ax| inner(&grid, &f[ax], &e[ax]) + inner(&grid, &g[ax], &a[ax]))
                .sum()
        };
        let before = pairing(&e, &a);
        let after = pairing(&helmholtz_project(&grid, &e).unwrap(), &helmholtz_project(&grid, &a).unwrap());
        assert_relative_eq!(before, after, max_relative = 1e-10);
    }

    #[test]
    fn integration_by_parts_curl_form() {
        let grid = torus();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = random_divfree(&grid, 3, &mut rng).unwrap();
        let lap = laplacian(&grid).unwrap();
        let lhs: f64 = (0..3)
            .map(|ax| -inner(&grid, &a[ax], &lap.apply(&a[ax]).unwrap()))
            .sum();
        let c = curl(&grid, &a).unwrap();
        let rhs: f64 = (0..3).map(|ax| inner(&grid, &c[ax], &c[ax])).sum();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
    }

    #[test]
    fn hamiltonian_and_total_number_identities() {
        let grid = torus();
        let mu = build_mu_maxwell(&grid).unwrap();
        let fs = complex_structure_from_mu(&mu, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let state = FieldState::vector(
            random_divfree(&grid, 2, &mut rng).unwrap(),
            random_divfree(&grid, 2, &mut rng).unwrap(),
        )
        .unwrap();
        let l2 = divfree_l2_basis(&grid, 2).unwrap();
        let h = hamiltonian(&fs, &l2, &state).unwrap();
        let h_closed = closed_form_hamiltonian_maxwell(&grid, &state).unwrap();
        assert_relative_eq!(h, h_closed, max_relative = 1e-8);
        let basis = alpha_basis(&fs, &l2, AlphaSide::Momentum).unwrap();
        let n = total_number(&fs, &basis, &state).unwrap();
        let n_closed = closed_form_total_number(&fs, &state).unwrap();
        assert_relative_eq!(n, n_closed, max_relative = 1e-8);
    }

    #[test]
    fn analytic_sin_x_energy() {
        let grid = torus();
        let a = sin_x_field(&grid);
        let e = [
            vec![0.0; grid.points()],
            vec![0.0; grid.points()],
            vec![0.0; grid.points()],
        ];
        let state = FieldState::vector(e, a.clone()).unwrap();
        let h = closed_form_hamiltonian_maxwell(&grid, &state).unwrap();
        // int |curl A|^2 = int cos^2 x over the (2 pi)^3 torus = (2 pi)^3 / 2
        let volume = TAU.powi(3);
        assert_relative_eq!(h, 0.25 * volume, max_relative = 1e-12);
        // and the Laplacian form agrees
        let lap = laplacian(&grid).unwrap();
        let lap_form: f64 = (0..3)
            .map(|ax| -inner(&grid, &a[ax], &lap.apply(&a[ax]).unwrap()))
            .sum();
        assert_relative_eq!(lap_form, 0.5 * volume, max_relative = 1e-12);
    }
}
