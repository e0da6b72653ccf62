//! Truncated arithmetic in `Q_p` and `F_q((t))`, the unramified quadratic
//! extension `F(√u)`, and the topological Jordan decomposition.

mod element;
mod expr;
pub mod fq;
mod jordan;
mod matrix;
mod quad;

pub use element::{prime_power, ElementJson, FieldElement, FieldKind, LocalField, DEFAULT_PRECISION};
pub use expr::{eval_expr, parse_matrix};
pub use fq::Fq;
pub use jordan::{jordan_decompose, jordan_decompose_matrix};
pub use matrix::FMatrix;
pub use quad::{hilbert_symbol, is_norm, is_norm_from, is_square, is_square_unit, sqrt, QuadExtElement};
