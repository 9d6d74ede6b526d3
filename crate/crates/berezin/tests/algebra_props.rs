//! Property-based tests for the CCR algebra invariants: these hold for all
//! valid inputs, not just the seeded samples the acceptance suite draws.

use berezin::algebra::{SymplecticSpace, WeylElement};
use berezin::{positivity_certificate, ComplexStructure, TestFunction, C64};
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    -2.0f64..2.0
}

fn test_fn() -> impl Strategy<Value = TestFunction> {
    (coord(), coord()).prop_map(|(a, b)| TestFunction::finite(&[a], &[b]))
}

fn coeff() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

fn element(hbar: f64) -> impl Strategy<Value = WeylElement> {
    prop::collection::vec((test_fn(), coeff()), 1..4).prop_map(move |terms| {
        let space = SymplecticSpace::finite(1);
        let mut out = WeylElement::zero(space.clone(), hbar);
        for (f, z) in terms {
            out = out
                .add(&WeylElement::generator(space.clone(), hbar, &f).scale(z))
                .expect("same-space elements");
        }
        out
    })
}

proptest! {
    /// W(F) W(G) = e^{-i hbar sigma(F,G)/2} W(F+G) with the phase computed
    /// from the raw coordinates.
    #[test]
    fn ccr_phase_consistency(f in test_fn(), g in test_fn(), hbar in 0.01f64..1.0) {
        let space = SymplecticSpace::finite(1);
        let sigma = f.coords()[0] * g.coords()[1] - f.coords()[1] * g.coords()[0];
        let lhs = WeylElement::generator(space.clone(), hbar, &f)
            .mul(&WeylElement::generator(space.clone(), hbar, &g))
            .unwrap();
        let rhs = WeylElement::generator(space.clone(), hbar, &f.add(&g))
            .scale(C64::new(0.0, -hbar * sigma / 2.0).exp());
        prop_assert!(lhs.max_coeff_diff(&rhs) <= 1e-14);
    }

    /// (AB)C = A(BC) coefficient-exactly.
    #[test]
    fn product_associativity(a in element(0.3), b in element(0.3), c in element(0.3)) {
        let ab_c = a.mul(&b).unwrap().mul(&c).unwrap();
        let a_bc = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(ab_c.max_coeff_diff(&a_bc) <= 1e-14);
    }

    /// (AB)* = B* A* and A** = A.
    #[test]
    fn star_axioms(a in element(0.3), b in element(0.3)) {
        let star_prod = a.mul(&b).unwrap().adjoint();
        let prod_star = b.adjoint().mul(&a.adjoint()).unwrap();
        prop_assert!(star_prod.max_coeff_diff(&prod_star) <= 1e-14);
        prop_assert!(a.adjoint().adjoint().max_coeff_diff(&a) <= 1e-14);
    }

    /// The entrywise-exponential Gram certificate of Q^J(A*A) is PSD up to
    /// its own reported tolerance.
    #[test]
    fn quantization_positivity(a in element(0.0), hbar in 0.05f64..1.0) {
        let j = ComplexStructure::standard(1);
        let cert = positivity_certificate(&a, hbar, &j).unwrap();
        prop_assert!(
            cert.min_eigenvalue >= -cert.tolerance,
            "min eigenvalue {} below tolerance {}",
            cert.min_eigenvalue,
            cert.tolerance
        );
    }

    /// c_hbar^J(F) = e^{-hbar alpha_J(F,F)/4} lies in (0, 1], decreases in
    /// hbar, and equals 1 exactly at F = 0.
    #[test]
    fn quantization_factor_monotone(f in test_fn(), h1 in 0.01f64..1.0, h2 in 0.01f64..1.0) {
        let j = ComplexStructure::standard(1);
        let (lo, hi) = if h1 <= h2 { (h1, h2) } else { (h2, h1) };
        let c_lo = j.quantization_factor(lo, &f).unwrap();
        let c_hi = j.quantization_factor(hi, &f).unwrap();
        prop_assert!(c_lo > 0.0 && c_lo <= 1.0);
        prop_assert!(c_hi <= c_lo);
        let zero = TestFunction::zero(2);
        prop_assert_eq!(j.quantization_factor(hi, &zero).unwrap(), 1.0);
    }
}
