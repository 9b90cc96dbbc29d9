pub mod matrix;
pub mod synthesis;
pub mod spacetime;
pub mod lattice;
pub mod oracle;
