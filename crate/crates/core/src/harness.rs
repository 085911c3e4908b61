//! Synthetic reproduction of the two-loudspeaker anechoic-chamber experiment,
//! scan normalization against a fixed reference microphone, cross-method
//! error metrics and the sub-array length study.
//!
//! Geometry: two antiphase radiators 0.49 m apart on the x axis in `z = 0`,
//! a 10 cm pitch line array moved through eleven y positions at
//! `z_near = 0.28 m`, and a far line at `z_far = 2.03 m`. The sound speed is
//! 300 m/s.

use std::fmt;
use std::str::FromStr;

use log::warn;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field_model::{
    direct_field, fresnel_parameter, sample_line, sample_planar, sample_points, Medium,
    PointSource, SourceModel,
};
use crate::geometry::Point3;
use crate::linear::{
    fls_decompose, fls_propagate, flt_magnitude, hold_max, subarray_sweep, CutoffFilter,
    HarmonicSelection, LineField, MagnitudeProfile,
};
use crate::planar::{fpk_predict, fps_decompose, fps_propagate, FarFieldRequest, PlanarField};
use crate::sampling::{LineGrid, PlanarGrid, Window};

pub const SOURCE_SEPARATION: f64 = 0.49;
pub const Z_NEAR: f64 = 0.28;
pub const Z_FAR: f64 = 2.03;
pub const ELEMENT_SPACING: f64 = 0.10;

/// Line-scan y positions: −61.5 cm to 60 cm, 12.15 cm average step, with a
/// scan through the sources at y = 0.
pub const SCAN_Y: [f64; 11] = [
    -0.615, -0.48, -0.36, -0.24, -0.12, 0.0, 0.12, 0.24, 0.36, 0.48, 0.60,
];

/// Position of the immobile reference microphone, beyond the array end.
pub const REFERENCE_MIC: Point3 = Point3::new(1.2, 0.0, Z_NEAR);

/// Sub-array start offset used by the length study (30 cm).
pub const DEFAULT_STRIDE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceLayout {
    MonopolePair,
    /// Open-back loudspeakers: dipoles whose axis is the array normal (z),
    /// giving a dipole pattern in the yz plane.
    DipolePair,
}

impl FromStr for SourceLayout {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monopole-pair" => Ok(Self::MonopolePair),
            "dipole-pair" => Ok(Self::DipolePair),
            other => Err(Error::domain(format!("unknown source layout '{other}'"))),
        }
    }
}

impl fmt::Display for SourceLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::MonopolePair => "monopole-pair",
            Self::DipolePair => "dipole-pair",
        })
    }
}

/// 21 sensors span exactly 2.0 m; 22 sensors is the count used for the
/// sub-array study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArrayLength {
    #[default]
    Elements21,
    Elements22,
}

impl ArrayLength {
    pub fn count(self) -> usize {
        match self {
            Self::Elements21 => 21,
            Self::Elements22 => 22,
        }
    }

    /// Element positions centred on x = 0.
    pub fn x_coords(self) -> Vec<f64> {
        centred_lattice(self.count(), ELEMENT_SPACING)
    }
}

fn centred_lattice(n: usize, step: f64) -> Vec<f64> {
    let half = (n as f64 - 1.0) / 2.0;
    (0..n).map(|i| (i as f64 - half) * step).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Fps,
    Fpk,
    Fls,
    Flt,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Fps, Method::Fpk, Method::Fls, Method::Flt];

    pub fn label(self) -> &'static str {
        match self {
            Method::Fps => "FPS",
            Method::Fpk => "FPK",
            Method::Fls => "FLS",
            Method::Flt => "FLT",
        }
    }

    pub fn uses_line_data(self) -> bool {
        matches!(self, Method::Fls | Method::Flt)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fps" => Ok(Method::Fps),
            "fpk" => Ok(Method::Fpk),
            "fls" => Ok(Method::Fls),
            "flt" => Ok(Method::Flt),
            other => Err(Error::domain(format!("unknown method '{other}'"))),
        }
    }
}

/// Processing parameters shared by every method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub harmonics: usize,
    pub l_max: u32,
    /// Roll-off width of the `k_x` cutoff, in lattice steps.
    pub taper_bins: f64,
    pub window: Window,
    pub selection: HarmonicSelection,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            harmonics: 200,
            l_max: 1,
            taper_bins: 2.0,
            window: Window::Hann,
            selection: HarmonicSelection::Nearest,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub model: SourceModel,
    pub near_grid: PlanarGrid,
    /// The single y = 0 scan used by the line-array methods.
    pub near_line: LineGrid,
    pub far_line: LineGrid,
    pub frequency: f64,
}

pub fn source_model(frequency: f64, layout: SourceLayout, medium: Medium) -> Result<SourceModel> {
    let half = SOURCE_SEPARATION / 2.0;
    let left = Point3::new(-half, 0.0, 0.0);
    let right = Point3::new(half, 0.0, 0.0);
    let (plus, minus) = (Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0));
    let sources = match layout {
        SourceLayout::MonopolePair => vec![
            PointSource::monopole(left, plus)?,
            PointSource::monopole(right, minus)?,
        ],
        SourceLayout::DipolePair => {
            let axis = Point3::new(0.0, 0.0, 1.0);
            vec![
                PointSource::dipole(left, plus, axis)?,
                PointSource::dipole(right, minus, axis)?,
            ]
        }
    };
    SourceModel::new(sources, medium, frequency)
}

/// The chamber scenario with the 21-element (2.0 m) array.
pub fn chamber_scenario(frequency: f64, layout: SourceLayout) -> Result<Scenario> {
    chamber_scenario_with(frequency, layout, ArrayLength::Elements21)
}

pub fn chamber_scenario_with(
    frequency: f64,
    layout: SourceLayout,
    array: ArrayLength,
) -> Result<Scenario> {
    if frequency != 500.0 && frequency != 1500.0 {
        warn!("scenario frequency {frequency} Hz differs from the 500/1500 Hz presets");
    }
    let model = source_model(frequency, layout, Medium::default())?;
    let xs = array.x_coords();
    Ok(Scenario {
        name: format!("{layout}-{}hz-{}el", frequency, array.count()),
        near_grid: PlanarGrid::new(xs.clone(), SCAN_Y.to_vec(), Z_NEAR)?,
        near_line: LineGrid::new(xs, 0.0, Z_NEAR)?,
        far_line: LineGrid::new(centred_lattice(21, ELEMENT_SPACING), 0.0, Z_FAR)?,
        model,
        frequency,
    })
}

impl Scenario {
    pub fn wavenumber(&self) -> f64 {
        self.model.wavenumber()
    }

    pub fn wavelength(&self) -> f64 {
        self.model.wavelength()
    }

    pub fn z_near(&self) -> f64 {
        self.near_grid.z_plane()
    }

    pub fn z_far(&self) -> f64 {
        self.far_line.z_plane()
    }

    pub fn fresnel_near(&self) -> Result<f64> {
        fresnel_parameter(self.wavelength(), self.z_near(), SOURCE_SEPARATION)
    }

    pub fn fresnel_far(&self) -> Result<f64> {
        fresnel_parameter(self.wavelength(), self.z_far(), SOURCE_SEPARATION)
    }

    /// Moves the far line to `z_far`, scaling its x extent so that it spans
    /// the same directions as seen from the sources.
    pub fn with_far_distance(&self, z_far: f64) -> Result<Self> {
        let scale = z_far / self.z_far();
        let xs = self.far_line.x_coords().iter().map(|x| x * scale).collect();
        Ok(Self {
            far_line: LineGrid::new(xs, self.far_line.y0(), z_far)?,
            ..self.clone()
        })
    }

    pub fn near_field(&self) -> Result<PlanarField> {
        sample_planar(&self.model, &self.near_grid)
    }

    pub fn near_line_field(&self) -> Result<LineField> {
        sample_line(&self.model, &self.near_line)
    }

    pub fn oracle_far_line(&self) -> Result<MagnitudeProfile> {
        let line = sample_line(&self.model, &self.far_line)?;
        MagnitudeProfile::from_complex(self.far_line.x_coords().to_vec(), line.values())
    }

    /// Far-line prediction by `method` from this scenario's synthetic data.
    pub fn predict(&self, method: Method, config: &PipelineConfig) -> Result<MagnitudeProfile> {
        let k = self.wavenumber();
        let xs = self.far_line.x_coords();
        let z_far = self.z_far();
        match method {
            Method::Fps | Method::Fpk => {
                let request = FarFieldRequest::line(xs, self.far_line.y0(), z_far)?
                    .with_source_diameter(SOURCE_SEPARATION);
                predict_planar(&self.near_field()?, k, method, &request, config)
            }
            Method::Fls | Method::Flt => {
                predict_line(&self.near_line_field()?, k, method, xs, z_far, config)
            }
        }
    }
}

/// FPS or FPK prediction of `|p|` along a far line.
pub fn predict_planar(
    field: &PlanarField,
    k: f64,
    method: Method,
    request: &FarFieldRequest,
    config: &PipelineConfig,
) -> Result<MagnitudeProfile> {
    let values = match method {
        Method::Fps => {
            let spectrum = fps_decompose(field, k, config.harmonics, config.window)?;
            fps_propagate(&spectrum, request)?
        }
        Method::Fpk => fpk_predict(field, k, request, config.window)?,
        other => {
            return Err(Error::config(format!(
                "{other} needs line data, not planar data"
            )))
        }
    };
    MagnitudeProfile::from_complex(request.points().iter().map(|p| p.x).collect(), &values)
}

/// FLS or FLT prediction of `|p|` at `(x, y0, z_far)` for each `x`.
///
/// FLT evaluates the direction `α = atan(x/z_far)` at range `√(x² + z_far²)`,
/// both measured from the coordinate origin.
pub fn predict_line(
    field: &LineField,
    k: f64,
    method: Method,
    xs: &[f64],
    z_far: f64,
    config: &PipelineConfig,
) -> Result<MagnitudeProfile> {
    let spectrum = fls_decompose(field, k, config.harmonics, config.window)?;
    let filter = CutoffFilter::for_sources(
        spectrum.lattice(),
        config.l_max,
        field.grid().z_plane(),
        config.taper_bins,
    )?;
    match method {
        Method::Fls => {
            let values = fls_propagate(&spectrum, &filter, xs, z_far)?;
            MagnitudeProfile::from_complex(xs.to_vec(), &values)
        }
        Method::Flt => {
            let magnitude = xs
                .iter()
                .map(|&x| {
                    let alpha = x.atan2(z_far);
                    let range = x.hypot(z_far);
                    flt_magnitude(&spectrum, &filter, alpha, range, config.selection)
                })
                .collect::<Result<Vec<_>>>()?;
            MagnitudeProfile::new(xs.to_vec(), magnitude)
        }
        other => Err(Error::config(format!(
            "{other} needs planar data, not line data"
        ))),
    }
}

/// One line position of the moving array, with the simultaneous reading of
/// the immobile reference microphone.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub line: LineField,
    pub reference_value: Complex64,
}

/// Synthesizes one scan per near-grid y position. `gains[q]` models the
/// unknown complex gain of acquisition run `q` and multiplies both the line
/// and the reference reading.
pub fn synthesize_scans(scenario: &Scenario, gains: &[Complex64]) -> Result<Vec<ScanRecord>> {
    let ys = scenario.near_grid.y_coords();
    if gains.len() != ys.len() {
        return Err(Error::domain(format!(
            "{} gains for {} scans",
            gains.len(),
            ys.len()
        )));
    }
    let reference = direct_field(&scenario.model, REFERENCE_MIC)?;
    ys.iter()
        .zip(gains)
        .map(|(&y, &gain)| {
            let grid = LineGrid::new(scenario.near_grid.x_coords().to_vec(), y, scenario.z_near())?;
            let values = sample_line(&scenario.model, &grid)?
                .values()
                .iter()
                .map(|p| p * gain)
                .collect();
            Ok(ScanRecord {
                line: LineField::new(grid, values)?,
                reference_value: reference * gain,
            })
        })
        .collect()
}

/// Rescales every scan so its reference reading becomes `1 + 0i`, then stacks
/// the scans into a planar field ordered by ascending y.
pub fn normalize_scans(scans: &[ScanRecord]) -> Result<PlanarField> {
    let first = scans
        .first()
        .ok_or_else(|| Error::domain("no scans to normalize"))?;
    let xs = first.line.grid().x_coords().to_vec();
    let z = first.line.grid().z_plane();
    for (index, scan) in scans.iter().enumerate() {
        if scan.reference_value == Complex64::new(0.0, 0.0) || !scan.reference_value.is_finite() {
            return Err(Error::ZeroReference { index });
        }
        if scan.line.grid().x_coords() != xs.as_slice() {
            return Err(Error::LatticeMismatch(format!(
                "scan {index} uses a different x lattice"
            )));
        }
    }
    let mut order: Vec<&ScanRecord> = scans.iter().collect();
    order.sort_by(|a, b| a.line.grid().y0().total_cmp(&b.line.grid().y0()));
    let ys: Vec<f64> = order.iter().map(|s| s.line.grid().y0()).collect();
    let grid = PlanarGrid::new(xs, ys, z)?;
    let mut field = PlanarField::zeros(grid.clone());
    let mut values = field.clone().into_values();
    for (j, scan) in order.iter().enumerate() {
        let correction = Complex64::new(1.0, 0.0) / scan.reference_value;
        for (n, p) in scan.line.values().iter().enumerate() {
            values[[n, j]] = p * correction;
        }
    }
    field = PlanarField::new(grid, values)?;
    Ok(field)
}

/// Floor applied before taking logarithms of a vanishing null.
const NULL_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonReport {
    pub method: Option<Method>,
    /// `‖a − b‖₂/‖b‖₂` of the peak-normalized curves.
    pub rms_divergence: f64,
    /// `max(a)/max(b)` before normalization.
    pub peak_ratio: f64,
    /// Smallest of the three central predicted points relative to the
    /// predicted peak, in dB.
    pub null_depth_db: f64,
}

impl ComparisonReport {
    pub fn with_method(mut self, method: Method) -> Self {
        self.method = Some(method);
        self
    }
}

fn central_three(values: &[f64]) -> &[f64] {
    if values.len() <= 3 {
        return values;
    }
    let c = values.len() / 2;
    &values[c - 1..c + 2]
}

/// Central null depth of a curve in dB relative to its own peak.
pub fn null_depth_db(values: &[f64]) -> f64 {
    let peak = values.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return 20.0 * NULL_FLOOR.log10();
    }
    let floor = central_three(values)
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    20.0 * (floor / peak).max(NULL_FLOOR).log10()
}

/// Shape comparison of a predicted curve against the reference on one
/// lattice. Both curves are normalized to unit peak.
pub fn compare_far_field(
    predicted: &MagnitudeProfile,
    oracle: &MagnitudeProfile,
) -> Result<ComparisonReport> {
    if !predicted.same_lattice(oracle) {
        return Err(Error::LatticeMismatch(
            "prediction and oracle use different x lattices".into(),
        ));
    }
    compare_magnitudes(&predicted.magnitude, &oracle.magnitude)
}

/// [`compare_far_field`] on bare magnitude vectors.
pub fn compare_magnitudes(predicted: &[f64], oracle: &[f64]) -> Result<ComparisonReport> {
    if predicted.len() != oracle.len() {
        return Err(Error::LatticeMismatch(format!(
            "{} predicted points vs {} oracle points",
            predicted.len(),
            oracle.len()
        )));
    }
    let peak_of = |v: &[f64]| v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let oracle_peak = peak_of(oracle);
    if oracle_peak == 0.0 {
        return Err(Error::ZeroOracle);
    }
    let predicted_peak = peak_of(predicted);
    let norm_pred = |v: f64| {
        if predicted_peak > 0.0 {
            v.abs() / predicted_peak
        } else {
            0.0
        }
    };
    let (mut diff, mut reference) = (0.0, 0.0);
    for (&a, &b) in predicted.iter().zip(oracle) {
        let b = b.abs() / oracle_peak;
        diff += (norm_pred(a) - b).powi(2);
        reference += b * b;
    }
    let abs_pred: Vec<f64> = predicted.iter().map(|v| v.abs()).collect();
    Ok(ComparisonReport {
        method: None,
        rms_divergence: (diff / reference).sqrt(),
        peak_ratio: predicted_peak / oracle_peak,
        null_depth_db: null_depth_db(&abs_pred),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyConfig {
    pub pipeline: PipelineConfig,
    /// Offset between successive sub-array starts, in elements.
    pub stride: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            pipeline: PipelineConfig::default(),
            stride: DEFAULT_STRIDE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApertureResult {
    pub size: usize,
    pub subsets: usize,
    pub profile: MagnitudeProfile,
    pub report: ComparisonReport,
}

/// FLS hold-max profile over every `size`-element sub-array of `line`.
pub fn hold_max_prediction(
    line: &LineField,
    k: f64,
    size: usize,
    xs: &[f64],
    z_far: f64,
    config: &StudyConfig,
) -> Result<(usize, MagnitudeProfile)> {
    let runs = subarray_sweep(line, size, config.stride)?
        .iter()
        .map(|sub| predict_line(sub, k, Method::Fls, xs, z_far, &config.pipeline))
        .collect::<Result<Vec<_>>>()?;
    Ok((runs.len(), hold_max(&runs)?))
}

/// For each sub-array size: sweep, FLS per subset, hold-max, then compare
/// with the direct field on the far line. Results follow the order of `sizes`.
pub fn aperture_study(
    scenario: &Scenario,
    sizes: &[usize],
    config: &StudyConfig,
) -> Result<Vec<ApertureResult>> {
    if sizes.is_empty() {
        return Ok(Vec::new());
    }
    let line = scenario.near_line_field()?;
    let oracle = scenario.oracle_far_line()?;
    let xs = scenario.far_line.x_coords();
    sizes
        .iter()
        .map(|&size| {
            let (subsets, profile) = hold_max_prediction(
                &line,
                scenario.wavenumber(),
                size,
                xs,
                scenario.z_far(),
                config,
            )?;
            let report = compare_far_field(&profile, &oracle)?.with_method(Method::Fls);
            Ok(ApertureResult {
                size,
                subsets,
                profile,
                report,
            })
        })
        .collect()
}

/// Reference |p| at arbitrary points, on the same footing as a prediction.
pub fn oracle_profile(model: &SourceModel, xs: &[f64], y: f64, z: f64) -> Result<MagnitudeProfile> {
    let points: Vec<Point3> = xs.iter().map(|&x| Point3::new(x, y, z)).collect();
    MagnitudeProfile::from_complex(xs.to_vec(), &sample_points(model, &points)?)
}
