pub mod calibrate;
pub mod fsa_sweep;
pub mod keyrate;
pub mod session;
