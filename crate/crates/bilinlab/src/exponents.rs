//! Exponent-triple arithmetic: the Hölder constraint, duals, the local-L²
//! classification, and the γ exponent driving the lower bounds.

use serde::Serialize;

use crate::error::{Error, Result};

const HOLDER_TOL: f64 = 1e-12;

/// Reciprocal with the 1/∞ = 0 convention.
pub fn recip(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        1.0 / x
    }
}

/// (p, q, r) with 1/p + 1/q = 1/r. Exponents are extended positive reals;
/// `f64::INFINITY` is allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentTriple {
    p: f64,
    q: f64,
    r: f64,
}

impl ExponentTriple {
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("q", q), ("r", r)] {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::InvalidExponent(format!("{name} must lie in (0, ∞], got {v}")));
            }
        }
        let defect = (recip(p) + recip(q) - recip(r)).abs();
        if defect > HOLDER_TOL {
            return Err(Error::HolderViolation { p, q, r, defect });
        }
        Ok(ExponentTriple { p, q, r })
    }

    /// Triple with r induced from p, q by the Hölder condition.
    pub fn from_pq(p: f64, q: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("q", q)] {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::InvalidExponent(format!("{name} must lie in (0, ∞], got {v}")));
            }
        }
        let ir = recip(p) + recip(q);
        let r = if ir == 0.0 { f64::INFINITY } else { 1.0 / ir };
        Ok(ExponentTriple { p, q, r })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// 1/r' = 1 - 1/r. Negative for r < 1; in that regime r' is bookkeeping
    /// for γ only, never a Lebesgue exponent.
    pub fn one_over_r_prime(&self) -> f64 {
        1.0 - recip(self.r)
    }

    /// r' as an extended real; +∞ when 1/r' = 0, negative when r < 1.
    pub fn r_prime(&self) -> f64 {
        let i = self.one_over_r_prime();
        if i == 0.0 {
            f64::INFINITY
        } else {
            1.0 / i
        }
    }

    /// γ = max{1/p, 1/q, 1/r'}.
    pub fn gamma(&self) -> f64 {
        recip(self.p).max(recip(self.q)).max(self.one_over_r_prime())
    }

    /// Local L² range: p, q, r' all ≥ 2, boundary included.
    pub fn is_local_l2(&self) -> bool {
        let half = 0.5 + HOLDER_TOL;
        recip(self.p) <= half && recip(self.q) <= half && self.one_over_r_prime() <= half
    }

    pub fn swap(&self) -> Self {
        ExponentTriple { p: self.q, q: self.p, r: self.r }
    }

    /// Exponents (r', q, p') of the first adjoint; requires the adjoint
    /// reciprocals to be genuine Lebesgue exponents (r ≥ 1 and p ≥ 1).
    pub fn adjoint1(&self) -> Result<Self> {
        let ip = self.one_over_r_prime();
        let ir = 1.0 - recip(self.p);
        if ip < -HOLDER_TOL || ir < -HOLDER_TOL {
            return Err(Error::InvalidExponent(format!(
                "adjoint exponents of ({}, {}, {}) leave (0, ∞]",
                self.p, self.q, self.r
            )));
        }
        let from = |i: f64| if i <= 0.0 { f64::INFINITY } else { 1.0 / i };
        ExponentTriple::new(from(ip), self.q, from(ir))
    }

    /// Exponents (p, r', q') of the second adjoint.
    pub fn adjoint2(&self) -> Result<Self> {
        let iq = self.one_over_r_prime();
        let ir = 1.0 - recip(self.q);
        if iq < -HOLDER_TOL || ir < -HOLDER_TOL {
            return Err(Error::InvalidExponent(format!(
                "adjoint exponents of ({}, {}, {}) leave (0, ∞]",
                self.p, self.q, self.r
            )));
        }
        let from = |i: f64| if i <= 0.0 { f64::INFINITY } else { 1.0 / i };
        ExponentTriple::new(self.p, from(iq), from(ir))
    }
}

/// Free-function form of the classifier.
pub fn classify_local_l2(t: &ExponentTriple) -> bool {
    t.is_local_l2()
}

/// Free-function form of γ.
pub fn gamma(t: &ExponentTriple) -> f64 {
    t.gamma()
}

/// Parse an exponent written as a decimal, a fraction "a/b", or "inf".
pub fn parse_exponent(s: &str) -> Result<f64> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") || s == "∞" {
        return Ok(f64::INFINITY);
    }
    if let Some((a, b)) = s.split_once('/') {
        let num: f64 = a.trim().parse().map_err(|_| Error::Parse(format!("bad fraction {s:?}")))?;
        let den: f64 = b.trim().parse().map_err(|_| Error::Parse(format!("bad fraction {s:?}")))?;
        if den == 0.0 {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(num / den);
    }
    s.parse().map_err(|_| Error::Parse(format!("bad exponent {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holder_enforced() {
        assert!(ExponentTriple::new(2.0, 2.0, 1.0).is_ok());
        assert!(ExponentTriple::new(2.0, 2.0, 2.0).is_err());
        assert!(ExponentTriple::new(1.0, 2.0, 2.0 / 3.0).is_ok());
        assert!(ExponentTriple::new(-1.0, 2.0, 2.0).is_err());
    }

    #[test]
    fn infinity_handled() {
        let t = ExponentTriple::new(f64::INFINITY, 2.0, 2.0).unwrap();
        assert_eq!(t.r_prime(), 2.0);
        assert!(t.is_local_l2());
    }

    #[test]
    fn local_l2_examples() {
        // vertex of the admissible region, r' = ∞
        assert!(ExponentTriple::new(2.0, 2.0, 1.0).unwrap().is_local_l2());
        // boundary point
        assert!(ExponentTriple::new(4.0, 4.0, 2.0).unwrap().is_local_l2());
        // r' = 3/2 < 2
        assert!(!ExponentTriple::new(6.0, 6.0, 3.0).unwrap().is_local_l2());
    }

    #[test]
    fn gamma_examples() {
        let t = ExponentTriple::new(6.0, 6.0, 3.0).unwrap();
        assert!((t.gamma() - 2.0 / 3.0).abs() < 1e-12);
        let t = ExponentTriple::new(2.0, 2.0, 1.0).unwrap();
        assert!((t.gamma() - 0.5).abs() < 1e-12);
        let t = ExponentTriple::new(1.0, 2.0, 2.0 / 3.0).unwrap();
        assert!((t.one_over_r_prime() + 0.5).abs() < 1e-12);
        assert!((t.gamma() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classification_symmetric_in_p_q() {
        for (p, q) in [(2.0, 3.0), (1.5, 4.0), (6.0, 6.0), (2.0, f64::INFINITY)] {
            let t = ExponentTriple::from_pq(p, q).unwrap();
            assert_eq!(t.is_local_l2(), t.swap().is_local_l2());
        }
    }

    #[test]
    fn gamma_exceeds_half_iff_outside() {
        for (p, q) in [
            (2.0, 2.0),
            (4.0, 4.0),
            (1.0, 2.0),
            (6.0, 6.0),
            (3.0, 3.0),
            (2.0, f64::INFINITY),
            (1.5, 12.0),
        ] {
            let t = ExponentTriple::from_pq(p, q).unwrap();
            if t.gamma() > 0.5 + 1e-9 {
                assert!(!t.is_local_l2(), "({p},{q})");
            } else {
                assert!(t.is_local_l2(), "({p},{q})");
            }
        }
    }

    #[test]
    fn adjoint_triples() {
        // (6,6,3) -> (3/2, 6, 6/5)
        let t = ExponentTriple::new(6.0, 6.0, 3.0).unwrap().adjoint1().unwrap();
        assert!((t.p() - 1.5).abs() < 1e-12);
        assert!((t.q() - 6.0).abs() < 1e-12);
        assert!((t.r() - 1.2).abs() < 1e-12);
    }

    #[test]
    fn parses_fractions_and_inf() {
        assert_eq!(parse_exponent("2/3").unwrap(), 2.0 / 3.0);
        assert_eq!(parse_exponent("1.5").unwrap(), 1.5);
        assert!(parse_exponent("inf").unwrap().is_infinite());
        assert!(parse_exponent("x").is_err());
    }
}
