//! Periodic 1-D grids, sampled functions, the DFT convention, and L^p norms.
//!
//! Convention fixed for the whole crate: sites x_j = j·h for j = 0..N-1,
//! frequency indices run over the centered residues {-⌊N/2⌋, …, ⌈N/2⌉-1},
//! forward transform  f̂(k) = Σ_j f_j e^{-2πi jk/N},
//! inverse transform  f_j  = (1/N) Σ_k f̂(k) e^{+2πi jk/N}.
//! The physical angular frequency of mode k is ω_k = 2πk/L with L = N·h.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Uniform periodic grid: `n` sites at spacing `h`, total length `L = n·h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    h: f64,
}

impl Grid {
    pub fn new(n: usize, h: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {h}")));
        }
        Ok(Grid { n, h })
    }

    /// Index-space grid with h = 1.
    pub fn unit(n: usize) -> Result<Self> {
        Grid::new(n, 1.0)
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn length(&self) -> f64 {
        self.n as f64 * self.h
    }

    pub fn site(&self, j: usize) -> f64 {
        j as f64 * self.h
    }

    /// Smallest centered frequency index, -⌊N/2⌋.
    pub fn freq_min(&self) -> i64 {
        -((self.n / 2) as i64)
    }

    /// Largest centered frequency index, ⌈N/2⌉-1.
    pub fn freq_max(&self) -> i64 {
        ((self.n + 1) / 2) as i64 - 1
    }

    pub fn freq_indices(&self) -> impl Iterator<Item = i64> {
        self.freq_min()..=self.freq_max()
    }

    /// Physical angular frequency ω_k = 2πk/L of a centered mode index.
    pub fn omega(&self, k: i64) -> f64 {
        2.0 * std::f64::consts::PI * k as f64 / self.length()
    }

    /// Frequency cell width 2π/L in ω units.
    pub fn omega_cell(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.length()
    }

    /// Wrap an arbitrary integer into the centered residue system.
    pub fn wrap(&self, k: i64) -> i64 {
        let n = self.n as i64;
        let m = k.rem_euclid(n);
        if m > self.freq_max() {
            m - n
        } else {
            m
        }
    }

    /// Storage position of a centered index (coefficients are stored in
    /// increasing centered order).
    pub fn pos(&self, k: i64) -> usize {
        debug_assert!(k >= self.freq_min() && k <= self.freq_max());
        (k - self.freq_min()) as usize
    }

    /// Centered index stored at position `pos`.
    pub fn index_at(&self, pos: usize) -> i64 {
        self.freq_min() + pos as i64
    }
}

/// Complex samples of a function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFn {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl SampledFn {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::InvalidGrid(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.n_points()
            )));
        }
        Ok(SampledFn { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        SampledFn { grid, values: vec![Complex64::new(0.0, 0.0); grid.n_points()] }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.n_points()).map(|j| f(grid.site(j))).collect();
        SampledFn { grid, values }
    }

    /// Kronecker delta at site `j`.
    pub fn delta(grid: Grid, j: usize) -> Self {
        let mut f = Self::zeros(grid);
        f.values[j % grid.n_points()] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn constant(grid: Grid, c: Complex64) -> Self {
        SampledFn { grid, values: vec![c; grid.n_points()] }
    }

    /// Indicator of the sites within circular distance < `radius` of `center`
    /// (both in physical units).
    pub fn indicator(grid: Grid, center: f64, radius: f64) -> Self {
        let len = grid.length();
        SampledFn::from_fn(grid, |x| {
            let mut d = (x - center).rem_euclid(len);
            if d > len / 2.0 {
                d = len - d;
            }
            if d < radius {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn support_sites(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm_sqr() > 0.0)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        SampledFn { grid: self.grid, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_grid(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(SampledFn { grid: self.grid, values })
    }

    pub fn mul_pointwise(&self, other: &Self) -> Result<Self> {
        check_same_grid(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(SampledFn { grid: self.grid, values })
    }

    pub fn conj(&self) -> Self {
        SampledFn { grid: self.grid, values: self.values.iter().map(|v| v.conj()).collect() }
    }

    /// Multiply by the character e^{2πi·mode·j/N} (spectrum translates by `mode`).
    pub fn modulate(&self, mode: i64) -> Self {
        let n = self.grid.n_points() as i64;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let ph = 2.0 * std::f64::consts::PI * ((mode * j as i64).rem_euclid(n)) as f64
                    / n as f64;
                v * Complex64::from_polar(1.0, ph)
            })
            .collect();
        SampledFn { grid: self.grid, values }
    }

    /// Translate right by `sites` cells: out[j] = f[j - sites mod N].
    pub fn translate(&self, sites: i64) -> Self {
        let n = self.grid.n_points() as i64;
        let values = (0..n)
            .map(|j| self.values[(j - sites).rem_euclid(n) as usize])
            .collect();
        SampledFn { grid: self.grid, values }
    }

    /// Pointwise integer power (used for profile shaping).
    pub fn powi(&self, k: u32) -> Self {
        let values = self.values.iter().map(|v| v.powu(k)).collect();
        SampledFn { grid: self.grid, values }
    }

    pub fn l2_norm(&self) -> f64 {
        lp_norm(self, 2.0).expect("p=2 is valid")
    }
}

pub(crate) fn check_same_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// DFT coefficients over centered frequency indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub grid: Grid,
    /// coeffs[pos] is the coefficient of mode grid.index_at(pos).
    pub coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(grid: Grid) -> Self {
        Spectrum { grid, coeffs: vec![Complex64::new(0.0, 0.0); grid.n_points()] }
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        self.coeffs[self.grid.pos(self.grid.wrap(k))]
    }

    pub fn set_coeff(&mut self, k: i64, v: Complex64) {
        let pos = self.grid.pos(self.grid.wrap(k));
        self.coeffs[pos] = v;
    }

    /// Fraction of spectral mass carried by modes |k| ≤ ⌊N/4⌋ - 1.
    pub fn central_band_mass(&self) -> f64 {
        let total: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        if total == 0.0 {
            return 1.0;
        }
        let quarter = (self.grid.n_points() / 4) as i64;
        let central: f64 = self
            .grid
            .freq_indices()
            .filter(|k| k.abs() < quarter.max(1))
            .map(|k| self.coeff(k).norm_sqr())
            .sum();
        central / total
    }
}

/// Forward transform, O(N log N): f̂(k) = Σ_j f_j e^{-2πi jk/N}.
pub fn dft(f: &SampledFn) -> Spectrum {
    let n = f.grid.n_points();
    let mut buf = f.values.clone();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    // reorder from standard [0..N) to centered storage
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for (k, v) in buf.into_iter().enumerate() {
        let c = f.grid.wrap(k as i64);
        coeffs[f.grid.pos(c)] = v;
    }
    Spectrum { grid: f.grid, coeffs }
}

/// Inverse transform: f_j = (1/N) Σ_k f̂(k) e^{+2πi jk/N}.
pub fn idft(s: &Spectrum) -> SampledFn {
    let n = s.grid.n_points();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for pos in 0..n {
        let k = s.grid.index_at(pos);
        buf[k.rem_euclid(n as i64) as usize] = s.coeffs[pos];
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let values = buf.into_iter().map(|v| v * scale).collect();
    SampledFn { grid: s.grid, values }
}

/// L^p norm with physical spacing: (h Σ_j |f_j|^p)^{1/p}; max |f_j| for p = ∞.
/// A quasinorm for 0 < p < 1. Rejects p ≤ 0.
pub fn lp_norm(f: &SampledFn, p: f64) -> Result<f64> {
    validate_exponent(p)?;
    if p.is_infinite() {
        return Ok(f.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let sum: f64 = f.values.iter().map(|v| v.norm().powf(p)).sum();
    Ok((f.grid.spacing() * sum).powf(1.0 / p))
}

pub(crate) fn validate_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::InvalidExponent(format!("p must lie in (0, ∞], got {p}")));
    }
    Ok(())
}

/// ℓ²-valued family of sampled functions sharing one grid.
#[derive(Debug, Clone)]
pub struct VectorSampledFn {
    pub components: Vec<SampledFn>,
}

impl VectorSampledFn {
    pub fn new(components: Vec<SampledFn>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidGrid("vector function needs at least one component".into()));
        }
        let g = components[0].grid;
        for c in &components[1..] {
            check_same_grid(&g, &c.grid)?;
        }
        Ok(VectorSampledFn { components })
    }

    pub fn grid(&self) -> Grid {
        self.components[0].grid
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Pointwise ℓ² aggregate (Σ_k |f_k(x)|²)^{1/2} as a real-valued sample set.
    pub fn l2_aggregate(&self) -> SampledFn {
        let grid = self.grid();
        let n = grid.n_points();
        let mut agg = vec![0.0f64; n];
        for c in &self.components {
            for (a, v) in agg.iter_mut().zip(&c.values) {
                *a += v.norm_sqr();
            }
        }
        SampledFn {
            grid,
            values: agg.into_iter().map(|a| Complex64::new(a.sqrt(), 0.0)).collect(),
        }
    }
}

/// L^p(ℓ²) norm of a vector-valued function.
pub fn lp_l2_norm(f: &VectorSampledFn, p: f64) -> Result<f64> {
    lp_norm(&f.l2_aggregate(), p)
}

/// Real bilinear pairing h·Σ_x u(x)·v(x), no conjugation.
pub fn pairing(u: &SampledFn, v: &SampledFn) -> Result<Complex64> {
    check_same_grid(&u.grid, &v.grid)?;
    let s: Complex64 = u.values.iter().zip(&v.values).map(|(a, b)| a * b).sum();
    Ok(s * u.grid.spacing())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_fn(grid: Grid, seed: u64) -> SampledFn {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SampledFn {
            grid,
            values: (0..grid.n_points())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        }
    }

    /// O(N²) direct-sum transform, the convention oracle for `dft`.
    fn naive_dft(f: &SampledFn) -> Spectrum {
        let n = f.grid.n_points();
        let mut s = Spectrum::zeros(f.grid);
        for k in f.grid.freq_indices() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in f.values.iter().enumerate() {
                let ph = -2.0 * std::f64::consts::PI * (j as f64) * (k as f64) / n as f64;
                acc += v * Complex64::from_polar(1.0, ph);
            }
            s.set_coeff(k, acc);
        }
        s
    }

    #[test]
    fn centered_indices() {
        let g = Grid::unit(8).unwrap();
        assert_eq!(g.freq_min(), -4);
        assert_eq!(g.freq_max(), 3);
        let g = Grid::unit(5).unwrap();
        assert_eq!(g.freq_min(), -2);
        assert_eq!(g.freq_max(), 2);
        assert_eq!(g.wrap(3), -2);
        assert_eq!(g.wrap(-3), 2);
    }

    #[test]
    fn dc_component_of_constant() {
        let g = Grid::unit(4).unwrap();
        let f = SampledFn::constant(g, Complex64::new(1.0, 0.0));
        let s = dft(&f);
        for k in g.freq_indices() {
            let expect = if k == 0 { 4.0 } else { 0.0 };
            assert!((s.coeff(k) - Complex64::new(expect, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn pure_tone_lands_on_single_mode() {
        let g = Grid::unit(8).unwrap();
        let f = SampledFn::from_fn(g, |x| {
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * x / 8.0)
        });
        let s = dft(&f);
        for k in g.freq_indices() {
            let expect = if k == 1 { 8.0 } else { 0.0 };
            assert!(
                (s.coeff(k) - Complex64::new(expect, 0.0)).norm() < 1e-10,
                "k={k}: {:?}",
                s.coeff(k)
            );
        }
    }

    #[test]
    fn dft_matches_naive_oracle() {
        for n in [5usize, 8, 16, 12] {
            let g = Grid::new(n, 0.5).unwrap();
            let f = random_fn(g, n as u64);
            let fast = dft(&f);
            let slow = naive_dft(&f);
            for k in g.freq_indices() {
                assert!((fast.coeff(k) - slow.coeff(k)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let g = Grid::unit(16).unwrap();
        let f = random_fn(g, 7);
        let back = idft(&dft(&f));
        let err: f64 = f
            .values
            .iter()
            .zip(&back.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let scale: f64 = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(err / scale < 1e-12);
    }

    #[test]
    fn indicator_norms() {
        let g = Grid::new(64, 0.25).unwrap();
        let f = SampledFn::indicator(g, 3.0, 1.0); // sites in (2, 4): 7 cells of width 0.25
        let w = f.support_sites().len() as f64;
        assert_eq!(w, 7.0);
        let n2 = lp_norm(&f, 2.0).unwrap();
        assert!((n2 - (w * 0.25f64).sqrt()).abs() < 1e-12);
        let ninf = lp_norm(&f, f64::INFINITY).unwrap();
        assert!((ninf - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parseval_under_convention() {
        let g = Grid::new(32, 0.1);
        let g = g.unwrap();
        for seed in 0..20 {
            let f = random_fn(g, seed);
            let n2 = lp_norm(&f, 2.0).unwrap();
            let s = dft(&f);
            let spec: f64 = s.coeffs.iter().map(|c| c.norm_sqr()).sum();
            let viaspec = (g.spacing() / g.n_points() as f64 * spec).sqrt();
            assert!((n2 - viaspec).abs() / n2 < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_exponents() {
        let g = Grid::unit(4).unwrap();
        let f = SampledFn::zeros(g);
        assert!(lp_norm(&f, 0.0).is_err());
        assert!(lp_norm(&f, -2.0).is_err());
        assert!(lp_norm(&f, f64::NAN).is_err());
    }

    #[test]
    fn vector_norm_scaling_and_reduction() {
        let g = Grid::new(32, 0.5).unwrap();
        let f = random_fn(g, 3);
        let k = 5usize;
        let v = VectorSampledFn::new(vec![f.clone(); k]).unwrap();
        let single = lp_norm(&f, 2.0).unwrap();
        let agg = lp_l2_norm(&v, 2.0).unwrap();
        assert!((agg - (k as f64).sqrt() * single).abs() < 1e-10);

        let one = VectorSampledFn::new(vec![f.clone()]).unwrap();
        for p in [0.5, 1.0, 2.0, 4.0, f64::INFINITY] {
            assert!((lp_l2_norm(&one, p).unwrap() - lp_norm(&f, p).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn disjoint_indicator_family_norm() {
        // K disjoint indicators of w cells each: ||.||_{L^r(l2)} = (K w h)^{1/r}
        let g = Grid::new(64, 0.5).unwrap();
        let w = 4usize;
        let comps: Vec<SampledFn> = (0..3)
            .map(|k| {
                let mut f = SampledFn::zeros(g);
                for j in 0..w {
                    f.values[k * 16 + j] = Complex64::new(1.0, 0.0);
                }
                f
            })
            .collect();
        let v = VectorSampledFn::new(comps).unwrap();
        for r in [0.75, 1.0, 2.0, 3.0] {
            let expect = (3.0 * w as f64 * 0.5).powf(1.0 / r);
            assert!((lp_l2_norm(&v, r).unwrap() - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn mismatched_grids_rejected() {
        let a = SampledFn::zeros(Grid::unit(8).unwrap());
        let b = SampledFn::zeros(Grid::unit(16).unwrap());
        assert!(matches!(pairing(&a, &b), Err(Error::GridMismatch)));
        assert!(VectorSampledFn::new(vec![a, b]).is_err());
    }
}
