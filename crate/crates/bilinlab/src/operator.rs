//! Application of bilinear multiplier operators: a brute-force O(N³) oracle,
//! O(N²) fast paths for dense and difference symbols, a separable path for
//! product symbols, ℓ²-valued (componentwise) application, and the linear
//! modulation operators Q_t, L_σ, L_σ̄.
//!
//! All paths realize the same discrete operator
//!   T(f,g)[x_j] = (1/N²) Σ_{ξ,η} m(ξ,η) f̂(ξ) ĝ(η) e^{2πi j(ξ+η)/N}
//! with ξ, η over centered residues; the substitutions η = σ-ξ and
//! u = ξ-η wrap mod N, which on the discrete torus is exact.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{check_same_grid, dft, idft, Grid, SampledFn, Spectrum, VectorSampledFn};
use crate::symbol::{Symbol, SymbolTable};

/// Default cap on N for dense/difference operators (N² table memory).
pub const DEFAULT_SIZE_CAP: usize = 4096;

#[derive(Debug, Clone)]
enum OpKind {
    /// ψ sampled over centered difference indices plus its cached inverse
    /// transform ψ̌ (site-indexed), built eagerly.
    Difference { psi: Vec<Complex64>, psi_check: Vec<Complex64> },
    Product { a: Vec<Complex64>, b: Vec<Complex64> },
    General { table: SymbolTable },
}

/// A bilinear multiplier operator bound to a grid.
#[derive(Debug, Clone)]
pub struct BilinearOperator {
    grid: Grid,
    kind: OpKind,
}

impl BilinearOperator {
    pub fn new(symbol: &Symbol, grid: Grid) -> Result<Self> {
        Self::with_size_cap(symbol, grid, DEFAULT_SIZE_CAP)
    }

    /// Escape hatch for grids beyond the default cap.
    pub fn with_size_override(symbol: &Symbol, grid: Grid) -> Result<Self> {
        Self::with_size_cap(symbol, grid, usize::MAX)
    }

    fn with_size_cap(symbol: &Symbol, grid: Grid, cap: usize) -> Result<Self> {
        let n = grid.n_points();
        let kind = match symbol {
            Symbol::Difference(psi) => {
                let samples: Vec<Complex64> =
                    grid.freq_indices().map(|u| psi(grid.omega(u))).collect();
                Self::difference_kind(grid, samples)
            }
            Symbol::Product(pa, pb) => OpKind::Product {
                a: grid.freq_indices().map(|k| pa(grid.omega(k))).collect(),
                b: grid.freq_indices().map(|k| pb(grid.omega(k))).collect(),
            },
            Symbol::General(t) => {
                // the N² table is the memory hog; structured kinds store O(N)
                if n > cap {
                    return Err(Error::TooLarge { n, cap });
                }
                if t.n() != n {
                    return Err(Error::GridMismatch);
                }
                OpKind::General { table: t.clone() }
            }
        };
        Ok(BilinearOperator { grid, kind })
    }

    /// Difference operator directly from ψ samples over centered indices.
    pub fn from_difference_samples(grid: Grid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.n_points() {
            return Err(Error::GridMismatch);
        }
        Ok(BilinearOperator { grid, kind: Self::difference_kind(grid, samples) })
    }

    fn difference_kind(grid: Grid, samples: Vec<Complex64>) -> OpKind {
        // ψ̌(t) = (1/N) Σ_u ψ(u) e^{2πi u t/N}
        let spec = Spectrum { grid, coeffs: samples.clone() };
        let psi_check = idft(&spec).values;
        OpKind::Difference { psi: samples, psi_check }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn is_difference(&self) -> bool {
        matches!(self.kind, OpKind::Difference { .. })
    }

    /// Symbol value at a centered index pair (difference symbols evaluate at
    /// the wrapped difference).
    pub fn symbol_at(&self, xi: i64, eta: i64) -> Complex64 {
        let g = &self.grid;
        match &self.kind {
            OpKind::Difference { psi, .. } => psi[g.pos(g.wrap(xi - eta))],
            OpKind::Product { a, b } => a[g.pos(g.wrap(xi))] * b[g.pos(g.wrap(eta))],
            OpKind::General { table } => table.get(xi, eta),
        }
    }

    /// Reference oracle: direct triple loop, O(N³).
    pub fn apply_naive(&self, f: &SampledFn, g: &SampledFn) -> Result<SampledFn> {
        self.check_grids(f, g)?;
        let n = self.grid.n_points();
        let fh = dft(f);
        let gh = dft(g);
        // roots[m] = e^{2πi m/N}
        let roots: Vec<Complex64> = (0..n)
            .map(|m| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 / n as f64))
            .collect();
        let scale = 1.0 / (n as f64 * n as f64);
        let values: Vec<Complex64> = (0..n)
            .map(|j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for xi in self.grid.freq_indices() {
                    let fv = fh.coeff(xi);
                    for eta in self.grid.freq_indices() {
                        let m = ((xi + eta) * j as i64).rem_euclid(n as i64) as usize;
                        acc += self.symbol_at(xi, eta) * fv * gh.coeff(eta) * roots[m];
                    }
                }
                acc * scale
            })
            .collect();
        SampledFn::new(self.grid, values)
    }

    /// O(N²) path for any symbol: accumulate C(σ) = Σ_ξ m(ξ,σ-ξ) f̂(ξ) ĝ(σ-ξ),
    /// then one inverse transform.
    pub fn apply_fast_general(&self, f: &SampledFn, g: &SampledFn) -> Result<SampledFn> {
        self.check_grids(f, g)?;
        let n = self.grid.n_points();
        let fh = dft(f);
        let gh = dft(g);
        let grid = self.grid;
        let coeffs: Vec<Complex64> = (0..n)
            .into_par_iter()
            .map(|pos| {
                let sigma = grid.index_at(pos);
                let mut acc = Complex64::new(0.0, 0.0);
                for xi in grid.freq_indices() {
                    let eta = grid.wrap(sigma - xi);
                    acc += self.symbol_at(xi, eta) * fh.coeff(xi) * gh.coeff(eta);
                }
                acc
            })
            .collect();
        let spec = Spectrum { grid, coeffs };
        // T = (1/N²) Σ_σ C(σ) e^{2πi jσ/N} = idft(C)/N
        let out = idft(&spec);
        Ok(out.scale(Complex64::new(1.0 / n as f64, 0.0)))
    }

    /// Time-domain path for difference symbols:
    /// T(f,g)[x] = Σ_t ψ̌(t) f(x-t) g(x+t), O(N²) after the cached precompute.
    pub fn apply_fast_difference(&self, f: &SampledFn, g: &SampledFn) -> Result<SampledFn> {
        self.check_grids(f, g)?;
        let psi_check = match &self.kind {
            OpKind::Difference { psi_check, .. } => psi_check,
            _ => {
                return Err(Error::InvalidExponent(
                    "apply_fast_difference needs a difference symbol".into(),
                ))
            }
        };
        let n = self.grid.n_points();
        let fv = &f.values;
        let gv = &g.values;
        let values: Vec<Complex64> = (0..n)
            .into_par_iter()
            .map(|x| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (t, w) in psi_check.iter().enumerate() {
                    let i1 = if x >= t { x - t } else { x + n - t };
                    let mut i2 = x + t;
                    if i2 >= n {
                        i2 -= n;
                    }
                    acc += w * fv[i1] * gv[i2];
                }
                acc
            })
            .collect();
        SampledFn::new(self.grid, values)
    }

    /// Separable path for product symbols: two linear multipliers and a
    /// pointwise product, O(N log N).
    pub fn apply_separable(&self, f: &SampledFn, g: &SampledFn) -> Result<SampledFn> {
        self.check_grids(f, g)?;
        let (a, b) = match &self.kind {
            OpKind::Product { a, b } => (a, b),
            _ => {
                return Err(Error::InvalidExponent(
                    "apply_separable needs a product symbol".into(),
                ))
            }
        };
        let fa = apply_multiplier(f, a);
        let gb = apply_multiplier(g, b);
        fa.mul_pointwise(&gb)
    }

    /// Fastest correct path for this operator's symbol kind.
    pub fn apply(&self, f: &SampledFn, g: &SampledFn) -> Result<SampledFn> {
        match &self.kind {
            OpKind::Difference { .. } => self.apply_fast_difference(f, g),
            OpKind::Product { .. } => self.apply_separable(f, g),
            OpKind::General { .. } => self.apply_fast_general(f, g),
        }
    }

    /// Componentwise application to ℓ²-valued families.
    pub fn apply_vector(&self, f: &VectorSampledFn, g: &VectorSampledFn) -> Result<VectorSampledFn> {
        if f.len() != g.len() {
            return Err(Error::CountMismatch(f.len(), g.len()));
        }
        let comps: Result<Vec<SampledFn>> = f
            .components
            .par_iter()
            .zip(g.components.par_iter())
            .map(|(fk, gk)| self.apply(fk, gk))
            .collect();
        VectorSampledFn::new(comps?)
    }

    fn check_grids(&self, f: &SampledFn, g: &SampledFn) -> Result<()> {
        check_same_grid(&self.grid, &f.grid)?;
        check_same_grid(&self.grid, &g.grid)
    }
}

/// Free-function form: apply the difference symbol ψ to (f, g) through the
/// time-domain path.
pub fn apply_fast_difference(
    psi: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    f: &SampledFn,
    g: &SampledFn,
) -> Result<SampledFn> {
    check_same_grid(&f.grid, &g.grid)?;
    let op = BilinearOperator::with_size_override(&Symbol::difference(psi), f.grid)?;
    op.apply_fast_difference(f, g)
}

fn apply_multiplier(f: &SampledFn, mult: &[Complex64]) -> SampledFn {
    let mut spec = dft(f);
    for (c, m) in spec.coeffs.iter_mut().zip(mult) {
        *c *= m;
    }
    idft(&spec)
}

/// A linear Fourier multiplier operator with named stock instances.
#[derive(Debug, Clone)]
pub struct LinearModulationOp {
    pub name: String,
    grid: Grid,
    mult: Vec<Complex64>,
}

impl LinearModulationOp {
    pub fn custom(name: impl Into<String>, grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let mult = grid.freq_indices().map(|k| f(grid.omega(k))).collect();
        LinearModulationOp { name: name.into(), grid, mult }
    }

    /// Q_t: multiplier e^{it ω²} on the physical frequency ω = 2πk/L.
    pub fn q_t(t: f64, grid: Grid) -> Self {
        Self::custom(format!("Q_{t}"), grid, |w| Complex64::from_polar(1.0, t * w * w))
    }

    /// L_σ: multiplier e^{+iω²}.
    pub fn l_sigma(grid: Grid) -> Self {
        Self::custom("L_sigma", grid, |w| Complex64::from_polar(1.0, w * w))
    }

    /// L_σ̄: multiplier e^{-iω²}.
    pub fn l_sigma_bar(grid: Grid) -> Self {
        Self::custom("L_sigma_bar", grid, |w| Complex64::from_polar(1.0, -(w * w)))
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn multiplier(&self) -> &[Complex64] {
        &self.mult
    }

    pub fn apply(&self, f: &SampledFn) -> Result<SampledFn> {
        check_same_grid(&self.grid, &f.grid)?;
        Ok(apply_multiplier(f, &self.mult))
    }
}

/// Q_t f as a one-shot call.
pub fn schrodinger_q(t: f64, f: &SampledFn) -> SampledFn {
    LinearModulationOp::q_t(t, f.grid).apply(f).expect("grid matches by construction")
}
