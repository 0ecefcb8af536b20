//! Positivity, PPT, structural coefficients and separability certificates.

pub mod eigen;
pub mod ppt;
pub mod structural;
pub mod certify;
pub mod sweep;
