pub mod group;
pub mod state;
pub mod symbol;
pub mod transfers;
pub mod polygon;
pub mod mosher;
pub mod combing;
pub mod analyzer;
pub mod braided;

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
