//! Bilinear multiplier symbols m(ξ,η): structured forms (difference ψ(ξ-η),
//! product a(ξ)b(η)) and dense tables over centered frequency pairs, plus the
//! symbol-level transforms: the two adjoints and mollification.
//!
//! Structured symbols are functions of the physical angular frequency ω;
//! sampling onto a grid evaluates them at ω_k = 2πk/L with the difference
//! ξ-η wrapped into the centered residue system, matching the fast
//! application paths exactly.

use std::io::{BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::phase::Phase;

pub type FreqFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum Symbol {
    /// m(ξ,η) = ψ(ξ-η), the modulation-invariant class.
    Difference(FreqFn),
    /// m(ξ,η) = a(ξ)·b(η), separable.
    Product(FreqFn, FreqFn),
    /// Dense table over centered frequency pairs.
    General(SymbolTable),
}

impl std::fmt::Debug for Symbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Symbol::Difference(_) => write!(f, "Symbol::Difference(..)"),
            Symbol::Product(..) => write!(f, "Symbol::Product(..)"),
            Symbol::General(t) => write!(f, "Symbol::General(n={})", t.n()),
        }
    }
}

impl Symbol {
    pub fn difference(psi: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Symbol::Difference(Arc::new(psi))
    }

    pub fn product(
        a: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        b: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Symbol::Product(Arc::new(a), Arc::new(b))
    }

    pub fn constant(c: Complex64) -> Self {
        Symbol::difference(move |_| c)
    }

    pub fn one() -> Self {
        Symbol::constant(Complex64::new(1.0, 0.0))
    }

    /// Sample onto a grid. Difference symbols evaluate at the wrapped
    /// centered difference so the table agrees with the structured fast path.
    pub fn sample(&self, grid: Grid) -> SymbolTable {
        match self {
            Symbol::Difference(psi) => SymbolTable::from_pair_fn(grid, |a, b| {
                psi(grid.omega(grid.wrap(a - b)))
            }),
            Symbol::Product(pa, pb) => {
                let n = grid.n_points();
                let a_vals: Vec<Complex64> =
                    grid.freq_indices().map(|k| pa(grid.omega(k))).collect();
                let b_vals: Vec<Complex64> =
                    grid.freq_indices().map(|k| pb(grid.omega(k))).collect();
                let mut data = Vec::with_capacity(n * n);
                for av in &a_vals {
                    for bv in &b_vals {
                        data.push(av * bv);
                    }
                }
                SymbolTable { n, data }
            }
            Symbol::General(t) => t.clone(),
        }
    }
}

/// Dense symbol table, row-major over centered indices: entry (ξ, η) sits at
/// pos(ξ)·N + pos(η).
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTable {
    n: usize,
    data: Vec<Complex64>,
}

impl SymbolTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn from_pair_fn(grid: Grid, f: impl Fn(i64, i64) -> Complex64) -> Self {
        let n = grid.n_points();
        let mut data = Vec::with_capacity(n * n);
        for a in grid.freq_indices() {
            for b in grid.freq_indices() {
                data.push(f(a, b));
            }
        }
        SymbolTable { n, data }
    }

    /// From a function of the pair's physical frequencies (ω_ξ, ω_η); no
    /// wrapping is involved since both arguments are the modes' own values.
    pub fn from_omega_fn(grid: Grid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        Self::from_pair_fn(grid, |a, b| f(grid.omega(a), grid.omega(b)))
    }

    fn offset(&self) -> i64 {
        (self.n / 2) as i64
    }

    fn wrap(&self, k: i64) -> usize {
        let n = self.n as i64;
        ((k + self.offset()).rem_euclid(n)) as usize
    }

    /// Value at centered indices, wrapping arbitrary integers mod N.
    pub fn get(&self, xi: i64, eta: i64) -> Complex64 {
        self.data[self.wrap(xi) * self.n + self.wrap(eta)]
    }

    pub fn set(&mut self, xi: i64, eta: i64, v: Complex64) {
        let idx = self.wrap(xi) * self.n + self.wrap(eta);
        self.data[idx] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn random(grid: Grid, rng: &mut impl rand::Rng) -> Self {
        let n = grid.n_points();
        let data = (0..n * n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        SymbolTable { n, data }
    }

    pub fn random_unimodular(grid: Grid, rng: &mut impl rand::Rng) -> Self {
        let n = grid.n_points();
        let data = (0..n * n)
            .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        SymbolTable { n, data }
    }

    /// Write the row-major table as CSV: header `# n=<N>`, then one
    /// `re,im` record per entry.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "# n={}", self.n)?;
        for v in &self.data {
            writeln!(w, "{},{}", v.re, v.im)?;
        }
        Ok(())
    }

    pub fn read_csv(r: &mut impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty symbol file".into()))??;
        let n: usize = header
            .trim()
            .strip_prefix("# n=")
            .ok_or_else(|| Error::Parse(format!("bad symbol header {header:?}")))?
            .parse()
            .map_err(|_| Error::Parse(format!("bad symbol header {header:?}")))?;
        let mut data = Vec::with_capacity(n * n);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (re, im) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad symbol record {line:?}")))?;
            let re: f64 = re.trim().parse().map_err(|_| Error::Parse(line.clone()))?;
            let im: f64 = im.trim().parse().map_err(|_| Error::Parse(line.clone()))?;
            data.push(Complex64::new(re, im));
        }
        if data.len() != n * n {
            return Err(Error::Parse(format!("expected {} records, got {}", n * n, data.len())));
        }
        Ok(SymbolTable { n, data })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// First-adjoint transform at the table level: m̃(a,b) = m(-a-b, b),
/// with centered-index wraparound. Under the crate's pairing and DFT
/// conventions this is the symbol of the operator satisfying
/// pairing(T_m(f,g), h) = pairing(T_m̃(h,g), f).
pub fn adjoint_symbol_1(m: &SymbolTable) -> SymbolTable {
    transform_table(m, |a, b| (-a - b, b))
}

/// Second adjoint: m̃(a,b) = m(a, -a-b);
/// pairing(T_m(f,g), h) = pairing(T_m̃(f,h), g).
pub fn adjoint_symbol_2(m: &SymbolTable) -> SymbolTable {
    transform_table(m, |a, b| (a, -a - b))
}

fn transform_table(m: &SymbolTable, map: impl Fn(i64, i64) -> (i64, i64)) -> SymbolTable {
    let n = m.n;
    let off = m.offset();
    let mut data = Vec::with_capacity(n * n);
    for pa in 0..n as i64 {
        for pb in 0..n as i64 {
            let (a, b) = (pa - off, pb - off);
            let (x, y) = map(a, b);
            data.push(m.get(x, y));
        }
    }
    SymbolTable { n, data }
}

/// Adjoint of a (possibly structured) symbol; structured variants are
/// sampled first.
pub fn adjoint_1(m: &Symbol, grid: Grid) -> SymbolTable {
    adjoint_symbol_1(&m.sample(grid))
}

pub fn adjoint_2(m: &Symbol, grid: Grid) -> SymbolTable {
    adjoint_symbol_2(&m.sample(grid))
}

/// Discrete moving average of ψ over the window of radius `delta` (in ω),
/// with trapezoid weights at the window edges, sampled on the grid's
/// frequency lattice. The radius must cover at least one frequency cell.
pub fn mollify_symbol(
    psi: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    delta: f64,
    grid: Grid,
) -> Result<FreqFn> {
    let cell = grid.omega_cell();
    if !(delta >= cell) {
        return Err(Error::MollifierTooNarrow { delta, cell });
    }
    let psi = Arc::new(psi);
    Ok(Arc::new(move |omega: f64| {
        windowed_average(|w| psi(w), omega, delta, cell)
    }))
}

/// Trapezoid average of `f` over [center-delta, center+delta] on a lattice
/// of step `cell` aligned to the center.
pub(crate) fn windowed_average(
    f: impl Fn(f64) -> Complex64,
    center: f64,
    delta: f64,
    cell: f64,
) -> Complex64 {
    let m = (delta / cell).floor() as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut weight = 0.0;
    for j in -m..=m {
        let w = if j == -m || j == m { 0.5 } else { 1.0 };
        acc += f(center + j as f64 * cell) * w;
        weight += w;
    }
    acc / weight
}

/// e^{iλφ(ξ-η)}: a unimodular difference symbol from a phase and a scale.
#[derive(Debug, Clone)]
pub struct UnimodularPhaseSymbol {
    pub phase: Phase,
    pub lambda: f64,
}

impl UnimodularPhaseSymbol {
    pub fn new(phase: Phase, lambda: f64) -> Self {
        UnimodularPhaseSymbol { phase, lambda }
    }

    pub fn to_symbol(&self) -> Symbol {
        let phase = self.phase.clone();
        let lambda = self.lambda;
        Symbol::difference(move |w| Complex64::from_polar(1.0, lambda * phase.eval(w)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_symbol_fixed_by_adjoints() {
        let g = Grid::unit(8).unwrap();
        let m = Symbol::one().sample(g);
        assert_eq!(adjoint_symbol_1(&m), m);
        assert_eq!(adjoint_symbol_2(&m), m);
    }

    #[test]
    fn adjoint_1_is_an_involution() {
        let g = Grid::unit(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = SymbolTable::random(g, &mut rng);
        let twice = adjoint_symbol_1(&adjoint_symbol_1(&m));
        assert_eq!(twice.max_abs_diff(&m), 0.0);
    }

    #[test]
    fn difference_adjoint_closed_form() {
        // m = ψ(ξ-η)  =>  m̃(a,b) = ψ(-a-2b)
        let g = Grid::unit(16).unwrap();
        let psi = |w: f64| Complex64::new(w.cos(), w.sin() * 0.5);
        let m = Symbol::difference(psi).sample(g);
        let adj = adjoint_symbol_1(&m);
        let direct = SymbolTable::from_pair_fn(g, |a, b| psi(g.omega(g.wrap(-a - 2 * b))));
        assert!(adj.max_abs_diff(&direct) < 1e-15);
    }

    #[test]
    fn sampling_commutes_with_transform() {
        // sample->transform equals transform-analytically->sample
        let g = Grid::unit(12).unwrap();
        let psi = |w: f64| Complex64::from_polar(1.0, 0.7 * w * w);
        let via_table = adjoint_1(&Symbol::difference(psi), g);
        let analytic = SymbolTable::from_pair_fn(g, |a, b| psi(g.omega(g.wrap(-a - 2 * b))));
        assert!(via_table.max_abs_diff(&analytic) < 1e-12);
    }

    #[test]
    fn symmetric_symbol_adjoints_swap() {
        let g = Grid::unit(10).unwrap();
        // symmetric m(ξ,η) = m(η,ξ)
        let m = SymbolTable::from_pair_fn(g, |a, b| {
            Complex64::new((a * b) as f64, (a + b) as f64)
        });
        let a1 = adjoint_symbol_1(&m);
        let a2 = adjoint_symbol_2(&m);
        // a2(a,b) = m(a,-a-b) = m(-a-b,a) = a1(b,a)
        for x in g.freq_indices() {
            for y in g.freq_indices() {
                assert_eq!(a2.get(x, y), a1.get(y, x));
            }
        }
    }

    #[test]
    fn unimodular_phase_symbol_has_unit_modulus() {
        let g = Grid::unit(16).unwrap();
        let s = UnimodularPhaseSymbol::new(Phase::quadratic(), 37.5).to_symbol().sample(g);
        for v in s.data() {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mollify_constant_unchanged() {
        let g = Grid::new(64, 0.5).unwrap();
        let m = mollify_symbol(|_| Complex64::new(3.25, -1.0), 5.0 * g.omega_cell(), g).unwrap();
        let v = m(1.234);
        assert!((v - Complex64::new(3.25, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn mollify_step_midpoint_and_interior() {
        let g = Grid::new(256, 0.25).unwrap();
        let step = |w: f64| {
            if w >= 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        let cell = g.omega_cell();
        let delta = 8.0 * cell;
        let m = mollify_symbol(step, delta, g).unwrap();
        // interior to a step, window away from the jump: exact value
        assert!((m(delta * 4.0) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        // at the jump with a symmetric window: 1/2 up to one-cell quadrature
        assert!((m(0.0).re - 0.5).abs() <= 1.0 / (2.0 * (delta / cell)));
    }

    #[test]
    fn mollify_rejects_subcell_radius() {
        let g = Grid::new(64, 1.0).unwrap();
        let r = mollify_symbol(|_| Complex64::new(1.0, 0.0), 0.4 * g.omega_cell(), g);
        assert!(matches!(r, Err(Error::MollifierTooNarrow { .. })));
    }

    #[test]
    fn csv_round_trip() {
        let g = Grid::unit(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = SymbolTable::random(g, &mut rng);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let back = SymbolTable::read_csv(&mut std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back, m);
    }
}
