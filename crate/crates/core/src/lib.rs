pub mod bargmann;
pub mod blob;
pub mod cli;
pub mod linalg;
pub mod quadrature;
pub mod sampling;
pub mod selfcheck;
pub mod symplectic;
pub mod walk;
