use std::io::{self, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::particle::UnstableParticle;

/// Uniform periodic grid with a power-of-two number of points.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    x_min: f64,
    dx: f64,
    len: usize,
}

impl Grid {
    pub fn new(x_min: f64, dx: f64, len: usize) -> Result<Self> {
        if !(dx.is_finite() && dx > 0.0) || !x_min.is_finite() {
            return Err(Error::Config(format!("invalid grid spacing {dx}")));
        }
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid length must be a power of two >= 2, got {len}"
            )));
        }
        Ok(Self { x_min, dx, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn extent(&self) -> f64 {
        self.len as f64 * self.dx
    }

    /// Nyquist wavenumber `pi / dx`.
    pub fn k_max(&self) -> f64 {
        std::f64::consts::PI / self.dx
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.len as isize;
        let dk = 2.0 * std::f64::consts::PI / self.extent();
        (0..n)
            .map(|i| if i < n / 2 { i } else { i - n })
            .map(|i| i as f64 * dk)
            .collect()
    }
}

/// Sampled complex field evolving under the free Hamiltonian with a local
/// decay term, in units `hbar = m = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavepacketState {
    pub(crate) grid: Grid,
    pub(crate) values: Vec<Complex64>,
    pub(crate) time: f64,
    /// Free-space decay rate `Gamma = k / ell`.
    pub(crate) decay_rate: f64,
    /// Local decay rate in units of `decay_rate`, one entry per grid point.
    pub(crate) gamma_ratio: Vec<f64>,
}

impl WavepacketState {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!(
                "{} samples on a grid of {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Config("field must be finite".into()));
        }
        let n = grid.len();
        Ok(Self {
            grid,
            values,
            time: 0.0,
            decay_rate: 0.0,
            gamma_ratio: vec![0.0; n],
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn decay_rate(&self) -> f64 {
        self.decay_rate
    }

    pub fn gamma_ratio(&self) -> &[f64] {
        &self.gamma_ratio
    }

    /// Uses the particle's free-space decay rate `k / ell`.
    pub fn with_particle(mut self, particle: &UnstableParticle) -> Self {
        self.decay_rate = if particle.is_stable() {
            0.0
        } else {
            particle.k() / particle.ell()
        };
        self
    }

    pub fn with_decay_rate(mut self, rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::Config(format!("decay rate must be >= 0, got {rate}")));
        }
        self.decay_rate = rate;
        Ok(self)
    }

    pub fn with_uniform_gamma(mut self, gamma_ratio: f64) -> Self {
        self.gamma_ratio.fill(gamma_ratio);
        self
    }

    /// Adds `gamma_ratio` over `[start, end]`, weighting each grid cell by
    /// the fraction of it inside the interval so the integral is exact.
    pub fn add_region(&mut self, start: f64, end: f64, gamma_ratio: f64) {
        let half = 0.5 * self.grid.dx;
        for (i, g) in self.gamma_ratio.iter_mut().enumerate() {
            let x = self.grid.x(i);
            let overlap = (end.min(x + half) - start.max(x - half)).max(0.0);
            *g += gamma_ratio * overlap / self.grid.dx;
        }
    }

    /// Adds `profile(x)` to the local decay ratio at every grid point.
    pub fn add_profile(&mut self, profile: impl Fn(f64) -> f64) {
        for (i, g) in self.gamma_ratio.iter_mut().enumerate() {
            *g += profile(self.grid.x(i));
        }
    }

    /// Adds a quadratic absorbing ramp rising from zero at `end` to
    /// `peak_ratio` at `start` (`start < end`).
    pub fn add_ramp(&mut self, start: f64, end: f64, peak_ratio: f64) {
        for (i, g) in self.gamma_ratio.iter_mut().enumerate() {
            let x = self.grid.x(i);
            if x < end {
                let u = ((end - x) / (end - start)).min(1.0);
                *g += peak_ratio * u * u;
            }
        }
    }

    /// `sum |psi|^2 dx`.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx
    }

    pub fn centroid(&self) -> f64 {
        let weighted: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, z)| self.grid.x(i) * z.norm_sqr())
            .sum();
        weighted * self.grid.dx / self.norm()
    }

    /// Spectral amplitudes in FFT order (unnormalised DFT).
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut buf = self.values.clone();
        FftPlanner::new()
            .plan_fft_forward(buf.len())
            .process(&mut buf);
        buf
    }

    /// First moment of `|psi(q)|^2`.
    pub fn mean_wavenumber(&self) -> f64 {
        let (num, den) = moments(&self.grid, &self.spectrum(), |q| q);
        num / den
    }

    /// `<q^2 / 2>` per unit norm.
    pub fn kinetic_energy(&self) -> f64 {
        let (num, den) = moments(&self.grid, &self.spectrum(), |q| 0.5 * q * q);
        num / den
    }

    /// Largest modulus among the two edge samples.
    pub fn boundary_amplitude(&self) -> f64 {
        self.values[0].norm().max(self.values[self.values.len() - 1].norm())
    }

    /// CSV rows `x,re,im` for every `stride`-th sample, with a header.
    pub fn write_csv<W: Write>(&self, out: &mut W, stride: usize) -> io::Result<()> {
        writeln!(out, "x,re,im")?;
        for (i, z) in self.values.iter().enumerate().step_by(stride.max(1)) {
            writeln!(out, "{:?},{:?},{:?}", self.grid.x(i), z.re, z.im)?;
        }
        Ok(())
    }
}

fn moments(grid: &Grid, spectrum: &[Complex64], f: impl Fn(f64) -> f64) -> (f64, f64) {
    grid.wavenumbers()
        .into_iter()
        .zip(spectrum)
        .fold((0.0, 0.0), |(num, den), (q, z)| {
            let w = z.norm_sqr();
            (num + f(q) * w, den + w)
        })
}

/// Largest edge amplitude a freshly built packet may have.
pub const PACKET_TAIL_LIMIT: f64 = 1e-12;

/// Normalised Gaussian packet `exp(-(x - c)^2 / (4 w^2) + i k0 (x - c))`;
/// `width` is the standard deviation of `|psi|^2`.
pub fn gaussian_packet(grid: &Grid, center: f64, width: f64, k0: f64) -> Result<WavepacketState> {
    if !(width.is_finite() && width >= 4.0 * grid.dx()) {
        return Err(Error::Config(format!(
            "packet width {width} must be at least 4 grid spacings ({})",
            4.0 * grid.dx()
        )));
    }
    if !(center.is_finite() && k0.is_finite()) {
        return Err(Error::Config("packet centre and wavenumber must be finite".into()));
    }
    let values: Vec<Complex64> = (0..grid.len())
        .map(|i| {
            let u = grid.x(i) - center;
            Complex64::from_polar((-u * u / (4.0 * width * width)).exp(), k0 * u)
        })
        .collect();
    let mut state = WavepacketState::new(grid.clone(), values)?;
    let scale = state.norm().sqrt().recip();
    state.values.iter_mut().for_each(|z| *z *= scale);
    if state.boundary_amplitude() >= PACKET_TAIL_LIMIT {
        return Err(Error::Config(format!(
            "packet tails reach {:e} at the grid edge",
            state.boundary_amplitude()
        )));
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_checks() {
        assert!(Grid::new(0.0, 0.1, 1000).is_err());
        assert!(Grid::new(0.0, 0.0, 1024).is_err());
        let g = Grid::new(-5.0, 0.5, 8).unwrap();
        assert_eq!(g.x(3), -3.5);
        let q = g.wavenumbers();
        assert_eq!(q[0], 0.0);
        assert!(q[4] < 0.0 && q[3] > 0.0);
    }

    #[test]
    fn packet_is_normalised_with_central_wavenumber() {
        let g = Grid::new(0.0, 0.25, 2048).unwrap();
        let s = gaussian_packet(&g, 256.0, 8.0, 3.0).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert!((s.mean_wavenumber() - 3.0).abs() < 1e-8);
        assert!((s.centroid() - 256.0).abs() < 1e-9);
    }

    #[test]
    fn packet_support_checks() {
        let g = Grid::new(0.0, 0.25, 1024).unwrap();
        assert!(gaussian_packet(&g, 10.0, 8.0, 3.0).is_err());
        assert!(gaussian_packet(&g, 128.0, 0.5, 3.0).is_err());
    }

    #[test]
    fn region_weights_integrate_exactly() {
        let g = Grid::new(0.0, 0.5, 64).unwrap();
        let mut s = WavepacketState::new(g, vec![Complex64::new(0.0, 0.0); 64]).unwrap();
        s.add_region(3.2, 10.7, 2.0);
        let integral: f64 = s.gamma_ratio().iter().sum::<f64>() * 0.5;
        assert!((integral - 2.0 * 7.5).abs() < 1e-12);
    }

    #[test]
    fn csv_dump() {
        let g = Grid::new(0.0, 1.0, 4).unwrap();
        let vals = vec![Complex64::new(1.0, -0.5); 4];
        let s = WavepacketState::new(g, vals).unwrap();
        let mut out = Vec::new();
        s.write_csv(&mut out, 2).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "x,re,im\n0.0,1.0,-0.5\n2.0,1.0,-0.5\n");
    }
}
