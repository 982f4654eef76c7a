//! The `.ifl` layout format: a small block language describing the
//! particle, both arms, the splitter and optional sweep/oracle settings.
//!
//! ```text
//! particle { k = 10.0; ell = 100.0; }
//! path upper { cavity(length=0.5, gamma_ratio=2.0); segment(length=0.5); }
//! path lower { segment(length=1.0); phase(phi=0.0); }
//! ```

mod diagnostic;
mod document;
mod lexer;
mod parser;

pub use diagnostic::{Diagnostic, DiagnosticCode, Span};
pub use document::{serialize, LayoutDocument, OracleSettings, ParticleInput, HBAR_SI};
pub use parser::parse;
