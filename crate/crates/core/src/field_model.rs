//! Point-source radiators and direct evaluation of their pressure field.
//!
//! The direct field is the ground truth every holography route is checked
//! against: a coherent sum of monopoles `A·ik·e^{ikr}/r` and dipoles
//! `A·e^{ikr}(ik/r − 1/r²)·cosθ`.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::linear::LineField;
use crate::planar::PlanarField;
use crate::sampling::{LineGrid, PlanarGrid};

const AXIS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceKind {
    Monopole,
    /// Dipole with its `θ = 0` direction along `axis` (unit norm).
    Dipole {
        axis: Point3,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSource {
    pub kind: SourceKind,
    pub position: Point3,
    pub amplitude: Complex64,
}

impl PointSource {
    pub fn monopole(position: Point3, amplitude: Complex64) -> Result<Self> {
        check_common(position, amplitude)?;
        Ok(Self {
            kind: SourceKind::Monopole,
            position,
            amplitude,
        })
    }

    /// Builds a dipole; `axis` is normalized, and must be finite and non-zero.
    pub fn dipole(position: Point3, amplitude: Complex64, axis: Point3) -> Result<Self> {
        check_common(position, amplitude)?;
        let norm = axis.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::domain(
                "dipole axis must be a finite non-zero vector",
            ));
        }
        let axis = axis * (1.0 / norm);
        debug_assert!((axis.norm() - 1.0).abs() < AXIS_TOLERANCE);
        Ok(Self {
            kind: SourceKind::Dipole { axis },
            position,
            amplitude,
        })
    }

    /// Complex pressure of this source alone at `point`.
    pub fn pressure(&self, k: f64, point: Point3) -> Result<Complex64> {
        let offset = point - self.position;
        let r = offset.norm();
        if r == 0.0 {
            return Err(Error::Singularity(format!(
                "point {} coincides with a source",
                point
            )));
        }
        let phase = Complex64::from_polar(1.0, k * r);
        let ik = Complex64::new(0.0, k);
        let value = match self.kind {
            SourceKind::Monopole => self.amplitude * ik * phase / r,
            SourceKind::Dipole { axis } => {
                let cos_theta = axis.dot(offset) / r;
                self.amplitude * phase * (ik / r - 1.0 / (r * r)) * cos_theta
            }
        };
        Ok(value)
    }
}

fn check_common(position: Point3, amplitude: Complex64) -> Result<()> {
    if !position.is_finite() {
        return Err(Error::domain("source position must be finite"));
    }
    if !amplitude.is_finite() {
        return Err(Error::domain("source amplitude must be finite"));
    }
    Ok(())
}

/// Homogeneous propagation medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium {
    sound_speed: f64,
}

impl Medium {
    pub const DEFAULT_SOUND_SPEED: f64 = 300.0;

    pub fn new(sound_speed: f64) -> Result<Self> {
        if !(sound_speed > 0.0) || !sound_speed.is_finite() {
            return Err(Error::domain(format!(
                "sound speed must be positive, got {sound_speed}"
            )));
        }
        Ok(Self { sound_speed })
    }

    pub fn sound_speed(&self) -> f64 {
        self.sound_speed
    }

    pub fn wavenumber(&self, frequency: f64) -> f64 {
        2.0 * PI * frequency / self.sound_speed
    }

    pub fn wavelength(&self, frequency: f64) -> f64 {
        self.sound_speed / frequency
    }
}

impl Default for Medium {
    fn default() -> Self {
        Self {
            sound_speed: Self::DEFAULT_SOUND_SPEED,
        }
    }
}

/// A coherent set of point radiators driven at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceModel {
    sources: Vec<PointSource>,
    medium: Medium,
    frequency: f64,
}

impl SourceModel {
    pub fn new(sources: Vec<PointSource>, medium: Medium, frequency: f64) -> Result<Self> {
        if sources.is_empty() {
            return Err(Error::domain("source model needs at least one source"));
        }
        if !(frequency > 0.0) || !frequency.is_finite() {
            return Err(Error::domain(format!(
                "frequency must be positive, got {frequency}"
            )));
        }
        Ok(Self {
            sources,
            medium,
            frequency,
        })
    }

    pub fn sources(&self) -> &[PointSource] {
        &self.sources
    }

    pub fn medium(&self) -> Medium {
        self.medium
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn wavenumber(&self) -> f64 {
        self.medium.wavenumber(self.frequency)
    }

    pub fn wavelength(&self) -> f64 {
        self.medium.wavelength(self.frequency)
    }
}

/// `λR/D²`; values well above one mark the Fraunhofer zone.
pub fn fresnel_parameter(wavelength: f64, distance: f64, diameter: f64) -> Result<f64> {
    for (name, v) in [
        ("wavelength", wavelength),
        ("distance", distance),
        ("diameter", diameter),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(wavelength * distance / (diameter * diameter))
}

/// Radius of the first Fresnel zone, `√(λz)`.
pub fn fresnel_zone_radius(wavelength: f64, distance: f64) -> Result<f64> {
    if !(wavelength > 0.0) || !(distance > 0.0) {
        return Err(Error::domain("wavelength and distance must be positive"));
    }
    Ok((wavelength * distance).sqrt())
}

/// Superposed complex pressure of every source in `model` at `point`.
pub fn direct_field(model: &SourceModel, point: Point3) -> Result<Complex64> {
    let k = model.wavenumber();
    model
        .sources
        .iter()
        .try_fold(Complex64::new(0.0, 0.0), |acc, s| {
            Ok(acc + s.pressure(k, point)?)
        })
}

pub fn sample_points(model: &SourceModel, points: &[Point3]) -> Result<Vec<Complex64>> {
    points.iter().map(|&p| direct_field(model, p)).collect()
}

pub fn sample_planar(model: &SourceModel, grid: &PlanarGrid) -> Result<PlanarField> {
    let (n, j) = grid.shape();
    let mut values = Array2::<Complex64>::zeros((n, j));
    for (ix, &x) in grid.x_coords().iter().enumerate() {
        for (iy, &y) in grid.y_coords().iter().enumerate() {
            values[[ix, iy]] = direct_field(model, Point3::new(x, y, grid.z_plane()))?;
        }
    }
    PlanarField::new(grid.clone(), values)
}

pub fn sample_line(model: &SourceModel, grid: &LineGrid) -> Result<LineField> {
    let values = grid
        .x_coords()
        .iter()
        .map(|&x| direct_field(model, Point3::new(x, grid.y0(), grid.z_plane())))
        .collect::<Result<Vec<_>>>()?;
    LineField::new(grid.clone(), values)
}
