//! Concrete chart manifolds.

pub mod octonion;
pub mod quaternion;
pub mod registry;
pub mod s2s2;
pub mod s3s3;
pub mod s6;
