pub mod density;
pub mod operator;
pub mod output;
pub mod solvers;
pub mod special;
pub mod spectral;
pub mod transform;
pub mod tridiag;
pub mod ground_state;
pub mod scaling;
pub mod runner;
