//! Dense complex polynomials, used for the Taylor data of `f^{∘q}` at 0.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cubic::CubicMap;
use crate::error::{Error, Result};

/// Deepest composition supported: `3^7 = 2187`.
pub const MAX_COMPOSITION: u32 = 7;

/// Coefficients indexed by degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyCoeffs {
    pub coefficients: Vec<Complex64>,
}

impl PolyCoeffs {
    pub fn new(coefficients: Vec<Complex64>) -> Self {
        Self { coefficients }
    }

    pub fn of_map(f: &CubicMap) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0), f.lambda, f.b, Complex64::new(1.0, 0.0)])
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn coefficient(&self, k: usize) -> Complex64 {
        self.coefficients.get(k).copied().unwrap_or_default()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn mul(&self, other: &PolyCoeffs) -> PolyCoeffs {
        let (a, b) = (&self.coefficients, &other.coefficients);
        if a.is_empty() || b.is_empty() {
            return PolyCoeffs::new(Vec::new());
        }
        let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        PolyCoeffs::new(out)
    }

    fn add_constant(&self, c: Complex64) -> PolyCoeffs {
        let mut out = self.coefficients.clone();
        if out.is_empty() {
            out.push(c);
        } else {
            out[0] += c;
        }
        PolyCoeffs::new(out)
    }

    /// `f ∘ self` for the cubic `f`, by Horner: `P · (λ + P · (b + P))`.
    pub fn post_compose(&self, f: &CubicMap) -> PolyCoeffs {
        let inner = self.add_constant(f.b);
        let mid = self.mul(&inner).add_constant(f.lambda);
        self.mul(&mid)
    }

    pub fn max_abs(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Coefficients of the `q`-fold composition `f^{∘q}`.
pub fn compose_q(f: &CubicMap, q: u32) -> Result<PolyCoeffs> {
    if q == 0 || q > MAX_COMPOSITION {
        return Err(Error::CompositionTooDeep(q));
    }
    let mut p = PolyCoeffs::of_map(f);
    for _ in 1..q {
        p = p.post_compose(f);
    }
    Ok(p)
}
