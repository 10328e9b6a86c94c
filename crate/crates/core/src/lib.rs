//! Light-pollution reduction for nighttime photographs.
//!
//! The crate models ground artificial light scattered by a homogeneous,
//! isotropically scattering atmosphere and removes the resulting additive
//! veil `J` from a photograph `Î = I + J`:
//!
//! - [`scattering`]: attenuation, the altitude irradiance `E(y) = 2πA·E1(βy)`
//!   and its disk-integral form.
//! - [`baseline`]: uniform ground radiance, veil by perspective path integral.
//! - [`adaptive`]: per-column ground light profile `A(x)` estimated from a
//!   pristine calibration sky, veil `J = A(x)·α(x, y)`.
//! - [`city`]: depth-limited restoration below the skyline with
//!   guided-filtered depth.
//! - [`sim`]: forward simulator used as the oracle for every inverse step.
//!
//! All model math runs on linear radiance with display white at `1.0`.

pub mod adaptive;
pub mod baseline;
pub mod city;
pub mod cli;
pub mod error;
pub mod filters;
pub mod guided;
pub mod image;
pub mod io;
pub mod model;
pub mod profile;
pub mod quadrature;
pub mod restore;
pub mod scattering;
pub mod sim;
pub mod skyline;

pub use crate::error::{Error, Result};
pub use crate::image::RadianceImage;
pub use crate::model::{Atmosphere, CameraGeometry, DepthMap};
pub use crate::profile::GroundLightProfile;
pub use crate::skyline::SkyMask;
