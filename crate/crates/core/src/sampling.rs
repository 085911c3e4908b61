//! Measurement lattices, aperture weights and the wavenumber lattice.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

fn check_ascending(name: &str, coords: &[f64]) -> Result<()> {
    if coords.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain(format!("{name} coordinates must be finite")));
    }
    if let Some(w) = coords.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::domain(format!(
            "{name} coordinates must be strictly ascending ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Mean spacing of an ascending coordinate list; `None` for a single node.
pub fn mean_step(coords: &[f64]) -> Option<f64> {
    match coords {
        [first, .., last] => Some((last - first) / (coords.len() - 1) as f64),
        _ => None,
    }
}

/// Rectangular lattice of nodes at `z = z_plane`. The y positions may be
/// non-uniform (successive line scans of a moving array).
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarGrid {
    x: Vec<f64>,
    y: Vec<f64>,
    z: f64,
}

impl PlanarGrid {
    pub fn new(x_coords: Vec<f64>, y_coords: Vec<f64>, z_plane: f64) -> Result<Self> {
        if x_coords.is_empty() || y_coords.is_empty() {
            return Err(Error::DegenerateGrid(
                "planar grid needs at least one node per axis".into(),
            ));
        }
        check_ascending("x", &x_coords)?;
        check_ascending("y", &y_coords)?;
        if !z_plane.is_finite() {
            return Err(Error::domain("z plane must be finite"));
        }
        Ok(Self {
            x: x_coords,
            y: y_coords,
            z: z_plane,
        })
    }

    /// Uniform `n × j` lattice starting at `(x0, y0)`.
    pub fn uniform(x0: f64, dx: f64, n: usize, y0: f64, dy: f64, j: usize, z: f64) -> Result<Self> {
        let x = (0..n).map(|i| x0 + i as f64 * dx).collect();
        let y = (0..j).map(|i| y0 + i as f64 * dy).collect();
        Self::new(x, y, z)
    }

    pub fn x_coords(&self) -> &[f64] {
        &self.x
    }

    pub fn y_coords(&self) -> &[f64] {
        &self.y
    }

    pub fn z_plane(&self) -> f64 {
        self.z
    }

    /// `(N, J)`: node counts along x and y.
    pub fn shape(&self) -> (usize, usize) {
        (self.x.len(), self.y.len())
    }

    pub fn dx(&self) -> Option<f64> {
        mean_step(&self.x)
    }

    /// Average y step.
    pub fn dy_mean(&self) -> Option<f64> {
        mean_step(&self.y)
    }

    /// Midpoint of the aperture in the array plane.
    pub fn center(&self) -> (f64, f64) {
        (
            0.5 * (self.x[0] + self.x[self.x.len() - 1]),
            0.5 * (self.y[0] + self.y[self.y.len() - 1]),
        )
    }

    pub fn with_z(&self, z_plane: f64) -> Self {
        Self {
            z: z_plane,
            ..self.clone()
        }
    }
}

/// A line of sensors along x at fixed `(y0, z_plane)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineGrid {
    x: Vec<f64>,
    y0: f64,
    z: f64,
}

impl LineGrid {
    pub fn new(x_coords: Vec<f64>, y0: f64, z_plane: f64) -> Result<Self> {
        if x_coords.len() < 2 {
            return Err(Error::DegenerateGrid(
                "line grid needs at least two nodes".into(),
            ));
        }
        check_ascending("x", &x_coords)?;
        if !y0.is_finite() || !z_plane.is_finite() {
            return Err(Error::domain("line position must be finite"));
        }
        Ok(Self {
            x: x_coords,
            y0,
            z: z_plane,
        })
    }

    pub fn uniform(x0: f64, dx: f64, n: usize, y0: f64, z: f64) -> Result<Self> {
        Self::new((0..n).map(|i| x0 + i as f64 * dx).collect(), y0, z)
    }

    pub fn x_coords(&self) -> &[f64] {
        &self.x
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    pub fn z_plane(&self) -> f64 {
        self.z
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn dx(&self) -> f64 {
        mean_step(&self.x).expect("line grid has at least two nodes")
    }

    /// Contiguous sub-line of `len` nodes starting at node `start`.
    pub fn slice(&self, start: usize, len: usize) -> Result<Self> {
        if start + len > self.x.len() {
            return Err(Error::domain("sub-line exceeds the grid"));
        }
        Self::new(self.x[start..start + len].to_vec(), self.y0, self.z)
    }
}

/// Aperture taper applied before a spectral decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    #[default]
    Hann,
    /// No taper and equal node weights; turns each decomposition into a
    /// plain DFT whose inverse is exact on uniform lattices.
    Rectangular,
}

/// Normal wavenumber of the plane wave `(kx, ky)`, on the branch that
/// propagates or decays toward `+z` for sources in `z <= 0`.
pub fn kz_component(k: f64, kx: f64, ky: f64) -> Complex64 {
    let s = k * k - kx * kx - ky * ky;
    if s >= 0.0 {
        Complex64::new(s.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-s).sqrt())
    }
}

/// One raised-cosine factor `1 − cos(2π(u − u₁ + Δ/2)/(u_last − u₁ + Δ))`;
/// equals 2 at the centre of the aperture.
fn hann_factor(coords: &[f64], index: usize, step: Option<f64>) -> f64 {
    let step = match step {
        Some(s) => s,
        None => return 2.0,
    };
    let first = coords[0];
    let span = coords[coords.len() - 1] - first + step;
    1.0 - (2.0 * PI * (coords[index] - first + 0.5 * step) / span).cos()
}

/// Two-dimensional Hann weight at node `(n, j)` (0-based). Uses the mean
/// x spacing and the average y step.
pub fn hann2d(grid: &PlanarGrid, n: usize, j: usize) -> f64 {
    0.25 * hann_factor(grid.x_coords(), n, grid.dx())
        * hann_factor(grid.y_coords(), j, grid.dy_mean())
}

pub fn hann2d_all(grid: &PlanarGrid) -> Array2<f64> {
    let (n, j) = grid.shape();
    Array2::from_shape_fn((n, j), |(a, b)| hann2d(grid, a, b))
}

/// One-dimensional Hann weights scaled so that `Σ h² = N`.
pub fn hann1d_normalized(grid: &LineGrid) -> Vec<f64> {
    let step = Some(grid.dx());
    let raw: Vec<f64> = (0..grid.len())
        .map(|i| hann_factor(grid.x_coords(), i, step))
        .collect();
    let energy: f64 = raw.iter().map(|h| h * h).sum();
    let scale = (grid.len() as f64 / energy).sqrt();
    raw.into_iter().map(|h| h * scale).collect()
}

/// Half-interval widths: `(u_{i+1} − u_{i−1})/2` inside, one-sided at the ends.
fn half_intervals(coords: &[f64]) -> Vec<f64> {
    let n = coords.len();
    (0..n)
        .map(|i| {
            let lo = coords[i.saturating_sub(1)];
            let hi = coords[(i + 1).min(n - 1)];
            0.5 * (hi - lo)
        })
        .collect()
}

/// Quadrature area of every node (m²), shape `(N, J)`.
pub fn element_areas(grid: &PlanarGrid) -> Result<Array2<f64>> {
    let (n, j) = grid.shape();
    if n < 2 || j < 2 {
        return Err(Error::DegenerateGrid(format!(
            "element areas need at least 2×2 nodes, got {n}×{j}"
        )));
    }
    let wx = half_intervals(grid.x_coords());
    let wy = half_intervals(grid.y_coords());
    Ok(Array2::from_shape_fn((n, j), |(a, b)| wx[a] * wy[b]))
}

/// Wavenumber lattice `k_m = m·dk`, `m ∈ {−M/2, …, M/2 − 1}`, with
/// `dk = 2π/(M·Δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLattice {
    m: usize,
    dkx: f64,
    dky: Option<f64>,
    k: f64,
}

impl SpectralLattice {
    fn build(m: usize, dx: f64, dy: Option<f64>, k: f64) -> Result<Self> {
        if m == 0 || !m.is_multiple_of(2) {
            return Err(Error::config(format!(
                "harmonic count M must be even and positive, got {m}"
            )));
        }
        if !(k > 0.0) {
            return Err(Error::domain("wavenumber must be positive"));
        }
        let mf = m as f64;
        Ok(Self {
            m,
            dkx: 2.0 * PI / (mf * dx),
            dky: dy.map(|d| 2.0 * PI / (mf * d)),
            k,
        })
    }

    pub fn for_planar(grid: &PlanarGrid, m: usize, k: f64) -> Result<Self> {
        let (n, j) = grid.shape();
        if m < n || m < j {
            return Err(Error::config(format!(
                "M = {m} must be at least N = {n} and J = {j}"
            )));
        }
        let (dx, dy) = match (grid.dx(), grid.dy_mean()) {
            (Some(dx), Some(dy)) => (dx, dy),
            _ => {
                return Err(Error::DegenerateGrid(
                    "spectral lattice needs at least two nodes per axis".into(),
                ))
            }
        };
        Self::build(m, dx, Some(dy), k)
    }

    pub fn for_line(grid: &LineGrid, m: usize, k: f64) -> Result<Self> {
        if m < grid.len() {
            return Err(Error::config(format!(
                "M = {m} must be at least N = {}",
                grid.len()
            )));
        }
        Self::build(m, grid.dx(), None, k)
    }

    pub fn harmonics(&self) -> usize {
        self.m
    }

    pub fn dkx(&self) -> f64 {
        self.dkx
    }

    pub fn dky(&self) -> Option<f64> {
        self.dky
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Signed harmonic index of storage slot `i`.
    pub fn index(&self, i: usize) -> i64 {
        i as i64 - (self.m / 2) as i64
    }

    /// Storage slot of signed index `m`, if it lies on the lattice.
    pub fn slot(&self, m: i64) -> Option<usize> {
        let half = (self.m / 2) as i64;
        (m >= -half && m < half).then(|| (m + half) as usize)
    }

    pub fn kx_values(&self) -> Vec<f64> {
        (0..self.m)
            .map(|i| self.index(i) as f64 * self.dkx)
            .collect()
    }

    pub fn ky_values(&self) -> Option<Vec<f64>> {
        self.dky
            .map(|d| (0..self.m).map(|i| self.index(i) as f64 * d).collect())
    }

    /// Physical x spacing this lattice was built for.
    pub fn dx(&self) -> f64 {
        2.0 * PI / (self.m as f64 * self.dkx)
    }
}
