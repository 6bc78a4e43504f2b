pub mod error;
pub mod quadrature;
pub mod regulated;
pub mod stieltjes;
pub mod heatkernel;
pub mod gaussproc;
pub mod stats;
pub mod itoverify;
pub mod cli;
