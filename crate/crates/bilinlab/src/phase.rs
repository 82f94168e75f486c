//! Phase functions φ used to build unimodular difference symbols e^{iλφ(ξ-η)}.
//!
//! Gradients are caller-supplied and cross-checked against centered finite
//! differences rather than derived symbolically, so arbitrary C¹ phases can
//! be registered.

use std::sync::Arc;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct Phase {
    name: String,
    is_linear: bool,
    eval: RealFn,
    grad: RealFn,
}

impl std::fmt::Debug for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Phase")
            .field("name", &self.name)
            .field("is_linear", &self.is_linear)
            .finish()
    }
}

impl Phase {
    pub fn new(
        name: impl Into<String>,
        is_linear: bool,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        grad: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Phase { name: name.into(), is_linear, eval: Arc::new(eval), grad: Arc::new(grad) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_linear(&self) -> bool {
        self.is_linear
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn grad(&self, t: f64) -> f64 {
        (self.grad)(t)
    }

    /// t ↦ a·t + b.
    pub fn linear(a: f64, b: f64) -> Self {
        Phase::new(format!("linear({a},{b})"), true, move |t| a * t + b, move |_| a)
    }

    pub fn quadratic() -> Self {
        Phase::new("quadratic", false, |t| t * t, |t| 2.0 * t)
    }

    pub fn cubic() -> Self {
        Phase::new("cubic", false, |t| t * t * t, |t| 3.0 * t * t)
    }

    /// |t|; the gradient reports ±1 away from 0 and is undefined at 0
    /// (excluded from finite-difference cross-checks in a cell around 0).
    pub fn abs() -> Self {
        Phase::new("abs", false, |t: f64| t.abs(), |t: f64| if t >= 0.0 { 1.0 } else { -1.0 })
    }

    /// Continuous piecewise-linear phase with the prescribed slopes on
    /// consecutive pieces of width `piece_width` starting at `start`.
    /// Outside the covered range the first/last piece extends.
    pub fn piecewise_linear(slopes: Vec<f64>, start: f64, piece_width: f64) -> Self {
        assert!(!slopes.is_empty() && piece_width > 0.0);
        let is_linear = slopes.iter().all(|s| (s - slopes[0]).abs() == 0.0);
        // offsets making the phase continuous at the knots
        let mut offsets = Vec::with_capacity(slopes.len());
        let mut acc = 0.0;
        for (i, s) in slopes.iter().enumerate() {
            offsets.push(acc - s * (start + i as f64 * piece_width));
            acc += s * piece_width;
        }
        let n = slopes.len();
        let piece = move |t: f64| -> usize {
            let i = ((t - start) / piece_width).floor();
            i.clamp(0.0, (n - 1) as f64) as usize
        };
        let s1 = slopes.clone();
        let o1 = offsets;
        let p1 = piece;
        let s2 = slopes.clone();
        Phase::new(
            format!("pwl({:?})", slopes),
            is_linear,
            move |t| s1[p1(t)] * t + o1[p1(t)],
            move |t| s2[piece(t)],
        )
    }

    /// Maximum relative mismatch between the registered gradient and a
    /// centered finite difference at `samples` points of [lo, hi].
    /// Points within `exclude_radius` of 0 are skipped (kinked phases).
    pub fn gradient_check(&self, lo: f64, hi: f64, samples: usize, exclude_radius: f64) -> f64 {
        let eps = 1e-6 * (hi - lo).abs().max(1.0);
        let mut worst = 0.0f64;
        for i in 0..samples {
            let t = lo + (hi - lo) * (i as f64 + 0.5) / samples as f64;
            if t.abs() < exclude_radius {
                continue;
            }
            let fd = (self.eval(t + eps) - self.eval(t - eps)) / (2.0 * eps);
            let g = self.grad(t);
            let scale = g.abs().max(1.0);
            worst = worst.max((fd - g).abs() / scale);
        }
        worst
    }
}

/// The stock phases: linear, quadratic, abs, cubic, and a two-slope
/// piecewise-linear example.
pub fn phase_library() -> Vec<Phase> {
    vec![
        Phase::linear(1.0, 0.0),
        Phase::quadratic(),
        Phase::abs(),
        Phase::cubic(),
        Phase::piecewise_linear(vec![0.0, 1.0], -1.0, 1.0),
    ]
}
