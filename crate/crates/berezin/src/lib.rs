//! Weyl/CCR algebra with positive (Berezin-type) quantization maps, grid
//! Schrödinger representations, classical-limit residual scans, and free
//! bosonic field-theory test spaces (Klein-Gordon, Rindler, Maxwell).

pub mod algebra;
pub mod error;
pub mod field;
pub mod io;
pub mod limits;
pub mod rep;

pub use algebra::{
    positivity_certificate, ComplexStructure, JMap, PositivityReport, QuantizationScheme,
    SymplecticSpace, TestFunction, WeylElement, C64, KEY_QUANTUM,
};
pub use error::{Error, Result};
pub use field::{FieldGrid, FieldState, SpectralOperator};
pub use io::{parse_hbars, FieldArtifact};
