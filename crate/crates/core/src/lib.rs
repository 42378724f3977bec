//! Onsager–Machlup most probable paths for scalar jump-diffusions
//! `dX = f(X) dt + c dB + dL`, where `L` carries compensated small α-stable jumps.

pub mod expr;
pub mod levy;
pub mod linalg;
pub mod om;
pub mod elode;
pub mod bvp;
pub mod varmin;
pub mod mcsim;
pub mod oracle;
pub mod io;
