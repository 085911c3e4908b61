//! Linear-array methods: cylindrical-wave series (FLS), transfer-function
//! magnitude (FLT), the `k_x` cutoff filter and hold-max aggregation over
//! sub-arrays.
//!
//! On the `φ = 0` half-plane and in the large-argument regime of the Hankel
//! functions, every azimuthal order collapses into a single coefficient per
//! `k_x` harmonic. A line of sensors along x is then enough to carry the
//! field from `z_near` to `z_far`, with a common `√(z_near/z_far)` spread.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sampling::{hann1d_normalized, kz_component, LineGrid, SpectralLattice, Window};

#[derive(Debug, Clone, PartialEq)]
pub struct LineField {
    grid: LineGrid,
    values: Vec<Complex64>,
}

impl LineField {
    pub fn new(grid: LineGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LatticeMismatch(format!(
                "{} values for a {}-node line",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &LineGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Line coefficients `b_m` on an M-point `k_x` lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSpectrum {
    lattice: SpectralLattice,
    coeffs: Vec<Complex64>,
    z_ref: f64,
    node_count: usize,
}

impl LineSpectrum {
    pub fn lattice(&self) -> &SpectralLattice {
        &self.lattice
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn dkx(&self) -> f64 {
        self.lattice.dkx()
    }

    pub fn z_ref(&self) -> f64 {
        self.z_ref
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn coefficient(&self, m: i64) -> Option<Complex64> {
        self.lattice.slot(m).map(|i| self.coeffs[i])
    }
}

/// `k_x,max = √(k² + (l_max + 1)/z_near²)`.
pub fn kx_cutoff(k: f64, l_max: u32, z_near: f64) -> Result<f64> {
    if !(z_near > 0.0) {
        return Err(Error::domain("z_near must be positive"));
    }
    Ok((k * k + (l_max as f64 + 1.0) / (z_near * z_near)).sqrt())
}

/// `λ·z_near/D_yz²`, the cross-section counterpart of the Fresnel parameter.
/// Logs a warning below 3.
pub fn cross_section_parameter(wavelength: f64, z_near: f64, d_yz: f64) -> Result<f64> {
    let value = crate::field_model::fresnel_parameter(wavelength, z_near, d_yz)?;
    if value < 3.0 {
        warn!("cross-section parameter λ·z/D² = {value:.2} is not large; azimuthal structure may leak");
    }
    Ok(value)
}

/// Low-pass on `|k_x|`: unity up to `kx_max − taper_width`, raised-cosine roll
/// off to zero at `kx_max`. A zero taper is a hard cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffFilter {
    kx_max: f64,
    taper_width: f64,
}

impl CutoffFilter {
    pub fn new(kx_max: f64, taper_width: f64) -> Result<Self> {
        if !(kx_max > 0.0) {
            return Err(Error::domain(format!(
                "kx_max must be positive, got {kx_max}"
            )));
        }
        if !(taper_width >= 0.0) || !taper_width.is_finite() {
            return Err(Error::domain(format!(
                "taper width must be non-negative, got {taper_width}"
            )));
        }
        Ok(Self {
            kx_max,
            taper_width: taper_width.min(kx_max),
        })
    }

    /// Cutoff for sources whose azimuthal content stops at `l_max`; the
    /// taper spans `taper_bins` lattice steps.
    pub fn for_sources(
        lattice: &SpectralLattice,
        l_max: u32,
        z_near: f64,
        taper_bins: f64,
    ) -> Result<Self> {
        let kx_max = kx_cutoff(lattice.k(), l_max, z_near)?;
        Self::new(kx_max, taper_bins * lattice.dkx())
    }

    pub fn pass_all() -> Self {
        Self {
            kx_max: f64::INFINITY,
            taper_width: 0.0,
        }
    }

    pub fn kx_max(&self) -> f64 {
        self.kx_max
    }

    pub fn taper_width(&self) -> f64 {
        self.taper_width
    }

    pub fn response(&self, kx: f64) -> f64 {
        let a = kx.abs();
        if self.taper_width == 0.0 {
            return if a <= self.kx_max { 1.0 } else { 0.0 };
        }
        let start = self.kx_max - self.taper_width;
        if a <= start {
            1.0
        } else if a >= self.kx_max {
            0.0
        } else {
            0.5 * (1.0 + (PI * (a - start) / self.taper_width).cos())
        }
    }
}

/// `b_m = (1/N)·Σ h₁(x_n)·p(x_n)·exp(−i k_xm x_n)`; with
/// [`Window::Rectangular`] `h₁ ≡ 1`.
pub fn fls_decompose(
    field: &LineField,
    k: f64,
    harmonics: usize,
    window: Window,
) -> Result<LineSpectrum> {
    let grid = field.grid();
    let lattice = SpectralLattice::for_line(grid, harmonics, k)?;
    let n = grid.len();
    let taper = match window {
        Window::Hann => hann1d_normalized(grid),
        Window::Rectangular => vec![1.0; n],
    };
    let weighted: Vec<Complex64> = field
        .values()
        .iter()
        .zip(&taper)
        .map(|(p, h)| p * *h)
        .collect();
    let coeffs = lattice
        .kx_values()
        .into_iter()
        .map(|kx| {
            let sum: Complex64 = weighted
                .iter()
                .zip(grid.x_coords())
                .map(|(p, &x)| p * Complex64::from_polar(1.0, -kx * x))
                .sum();
            sum / n as f64
        })
        .collect();
    Ok(LineSpectrum {
        lattice,
        coeffs,
        z_ref: grid.z_plane(),
        node_count: n,
    })
}

/// Cylindrical-series prediction on the line `(x, y0, z_far)`:
/// `p = (N/M)·√(z_near/z_far)·Σ b_m F(k_xm)·exp(i k_xm x + i κ_m Δz)`,
/// with `κ_m` the branch-corrected `√(k² − k_xm²)`.
pub fn fls_propagate(
    spec: &LineSpectrum,
    filter: &CutoffFilter,
    x_points: &[f64],
    z_far: f64,
) -> Result<Vec<Complex64>> {
    let z_near = spec.z_ref;
    let dz = z_far - z_near;
    if dz < 0.0 {
        return Err(Error::BackPropagation {
            target: z_far,
            reference: z_near,
        });
    }
    if !(z_near > 0.0) {
        return Err(Error::domain("cylindrical spreading needs z_near > 0"));
    }
    let k = spec.lattice.k();
    let m = spec.lattice.harmonics();
    let kx = spec.lattice.kx_values();
    let i = Complex64::new(0.0, 1.0);
    let shifted: Vec<(f64, Complex64)> = kx
        .iter()
        .zip(&spec.coeffs)
        .filter_map(|(&kxm, &b)| {
            let gain = filter.response(kxm);
            (gain > 0.0).then(|| (kxm, b * gain * (i * kz_component(k, kxm, 0.0) * dz).exp()))
        })
        .collect();
    let scale = spec.node_count as f64 / m as f64 * (z_near / z_far).sqrt();
    Ok(x_points
        .iter()
        .map(|&x| {
            let sum: Complex64 = shifted
                .iter()
                .map(|(kxm, c)| c * Complex64::from_polar(1.0, kxm * x))
                .sum();
            sum * scale
        })
        .collect())
}

/// How the lattice index matching `k·sin α` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HarmonicSelection {
    #[default]
    Nearest,
    /// Linear interpolation of `|b|` between the two bracketing indices.
    Interpolated,
}

/// Far-zone magnitude in direction `α` at range `R`:
/// `|p| = |b_{m*}|·NΔx/R·√(k·z_near·cos α/2π)` with `k_{xm*} = k·sin α`.
pub fn flt_magnitude(
    spec: &LineSpectrum,
    filter: &CutoffFilter,
    alpha: f64,
    range: f64,
    selection: HarmonicSelection,
) -> Result<f64> {
    if !(range > 0.0) {
        return Err(Error::domain("range must be positive"));
    }
    let cos_alpha = alpha.cos();
    if cos_alpha < 0.0 {
        return Err(Error::domain("direction points behind the array"));
    }
    let k = spec.lattice.k();
    let kx = k * alpha.sin();
    if kx.abs() > filter.kx_max() {
        return Err(Error::OutOfBand {
            sin_alpha: alpha.sin(),
        });
    }
    let fractional = kx / spec.dkx();
    let magnitude = |m: i64| {
        spec.coefficient(m)
            .map(|b| b.norm())
            .ok_or(Error::OutOfBand {
                sin_alpha: alpha.sin(),
            })
    };
    let b = match selection {
        HarmonicSelection::Nearest => magnitude(fractional.round() as i64)?,
        HarmonicSelection::Interpolated => {
            let lo = fractional.floor();
            let t = fractional - lo;
            let lo = lo as i64;
            if t == 0.0 {
                magnitude(lo)?
            } else {
                (1.0 - t) * magnitude(lo)? + t * magnitude(lo + 1)?
            }
        }
    };
    let aperture = spec.node_count as f64 * spec.lattice.dx();
    Ok(b * aperture / range * (k * spec.z_ref * cos_alpha / (2.0 * PI)).sqrt())
}

/// Field magnitudes along a line of x positions.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeProfile {
    pub x: Vec<f64>,
    pub magnitude: Vec<f64>,
}

impl MagnitudeProfile {
    pub fn new(x: Vec<f64>, magnitude: Vec<f64>) -> Result<Self> {
        if x.len() != magnitude.len() {
            return Err(Error::LatticeMismatch(format!(
                "{} positions but {} magnitudes",
                x.len(),
                magnitude.len()
            )));
        }
        Ok(Self { x, magnitude })
    }

    pub fn from_complex(x: Vec<f64>, values: &[Complex64]) -> Result<Self> {
        Self::new(x, values.iter().map(|v| v.norm()).collect())
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn peak(&self) -> f64 {
        self.magnitude.iter().cloned().fold(0.0, f64::max)
    }

    pub(crate) fn same_lattice(&self, other: &MagnitudeProfile) -> bool {
        self.x.len() == other.x.len()
            && self
                .x
                .iter()
                .zip(&other.x)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0))
    }
}

/// Pointwise maximum of `|p|` over runs sharing one x lattice.
pub fn hold_max(runs: &[MagnitudeProfile]) -> Result<MagnitudeProfile> {
    let (first, rest) = runs
        .split_first()
        .ok_or_else(|| Error::domain("hold-max needs at least one run"))?;
    let mut out = MagnitudeProfile::new(
        first.x.clone(),
        first.magnitude.iter().map(|v| v.abs()).collect(),
    )?;
    for run in rest {
        if !run.same_lattice(first) {
            return Err(Error::LatticeMismatch(
                "hold-max runs use different x lattices".into(),
            ));
        }
        for (acc, v) in out.magnitude.iter_mut().zip(&run.magnitude) {
            *acc = acc.max(v.abs());
        }
    }
    Ok(out)
}

/// Contiguous sub-arrays of `subset_size` sensors starting every `stride`
/// sensors. Each subset is an independent short array, so windows are
/// recomputed over its own extent when it is decomposed.
pub fn subarray_sweep(
    field: &LineField,
    subset_size: usize,
    stride: usize,
) -> Result<Vec<LineField>> {
    let n = field.grid().len();
    if subset_size < 2 || subset_size > n {
        return Err(Error::domain(format!(
            "subset size {subset_size} must lie in 2..={n}"
        )));
    }
    if stride == 0 {
        return Err(Error::domain("stride must be at least one element"));
    }
    (0..=n - subset_size)
        .step_by(stride)
        .map(|start| {
            let grid = field.grid().slice(start, subset_size)?;
            LineField::new(grid, field.values()[start..start + subset_size].to_vec())
        })
        .collect()
}
