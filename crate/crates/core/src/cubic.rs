//! The cubic family `f(z) = λz + bz² + z³` with a fixed point at the origin.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A member of the family: `f(z) = λz + bz² + z³`.
///
/// The map is monic and fixes the origin, so `(lambda, b)` determines it
/// completely. Values are `Copy` and can be shared freely between threads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicMap {
    pub lambda: Complex64,
    pub b: Complex64,
}

/// The two roots `c± = (−b ± s)/3` of `f'(z) = λ + 2bz + 3z²`, where the
/// square root `s` of `b² − 3λ` is the one with `Re(b̄ s) ≥ 0`.
///
/// With this branch `c_minus` is the larger-magnitude root and the labels
/// are equivariant under `b ↦ −b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPair {
    pub c_plus: Complex64,
    pub c_minus: Complex64,
    /// Set when the discriminant `4b² − 12λ` vanishes within tolerance.
    pub degenerate: bool,
}

impl CriticalPair {
    pub fn as_array(&self) -> [Complex64; 2] {
        [self.c_plus, self.c_minus]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub point: Complex64,
    pub multiplier: Complex64,
}

/// Roots of `a z² + b z + c` (a ≠ 0), larger-magnitude root first.
///
/// The second root comes from the product `c / a`, which avoids the
/// cancellation of the textbook formula when `b² ≫ 4ac`.
pub(crate) fn quadratic_roots(a: Complex64, b: Complex64, c: Complex64) -> (Complex64, Complex64) {
    let disc = (b * b - 4.0 * a * c).sqrt();
    // pick the sign that adds magnitudes
    let q = if (b.conj() * disc).re >= 0.0 {
        -0.5 * (b + disc)
    } else {
        -0.5 * (b - disc)
    };
    if q == Complex64::new(0.0, 0.0) {
        return (q, q);
    }
    (q / a, c / q)
}

impl CubicMap {
    pub fn new(lambda: Complex64, b: Complex64) -> Self {
        Self { lambda, b }
    }

    pub fn from_parts(lambda_re: f64, lambda_im: f64, b_re: f64, b_im: f64) -> Self {
        Self::new(Complex64::new(lambda_re, lambda_im), Complex64::new(b_re, b_im))
    }

    /// `z · (λ + z · (b + z))`
    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        z * (self.lambda + z * (self.b + z))
    }

    /// `f'(z) = λ + 2bz + 3z²`
    #[inline]
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        self.lambda + z * (2.0 * self.b + 3.0 * z)
    }

    /// `f''(z) = 2b + 6z`
    #[inline]
    pub fn second_derivative(&self, z: Complex64) -> Complex64 {
        2.0 * self.b + 6.0 * z
    }

    /// Value and derivative in one pass.
    #[inline]
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        (self.eval(z), self.derivative(z))
    }

    /// True when the origin is non-repelling, i.e. `|λ| ≤ 1`.
    pub fn is_non_repelling(&self) -> bool {
        self.lambda.norm() <= 1.0
    }

    pub fn critical_points(&self) -> CriticalPair {
        let three = Complex64::new(3.0, 0.0);
        let (c_minus, c_plus) = quadratic_roots(three, 2.0 * self.b, self.lambda);
        let disc = 4.0 * self.b * self.b - 12.0 * self.lambda;
        let scale = 1.0 + self.b.norm_sqr() + self.lambda.norm();
        CriticalPair {
            c_plus,
            c_minus,
            degenerate: disc.norm() < 1e-12 * scale,
        }
    }

    /// All three fixed points with multiplicity; the origin comes first and
    /// its multiplier is `λ` exactly.
    pub fn fixed_points(&self) -> Vec<FixedPoint> {
        let one = Complex64::new(1.0, 0.0);
        let (r1, r2) = quadratic_roots(one, self.b, self.lambda - one);
        let origin = FixedPoint {
            point: Complex64::new(0.0, 0.0),
            multiplier: self.lambda,
        };
        std::iter::once(origin)
            .chain([r1, r2].into_iter().map(|p| FixedPoint {
                point: p,
                multiplier: self.derivative(p),
            }))
            .collect()
    }

    /// `R = 2(1 + |λ| + |b|)`; any `|z| ≥ R` satisfies `|f(z)| ≥ 2|z|`.
    pub fn escape_radius(&self) -> f64 {
        2.0 * (1.0 + self.lambda.norm() + self.b.norm())
    }

    /// Radius of a disk that contains the filled Julia set.
    ///
    /// Outside `ρ`, where `ρ² − |b|ρ − |λ| = 1`, every orbit grows strictly.
    pub fn filled_julia_bound(&self) -> f64 {
        let bb = self.b.norm();
        0.5 * (bb + (bb * bb + 4.0 * (1.0 + self.lambda.norm())).sqrt())
    }

    /// The member of the family affinely conjugate to `(1 − ε) f`.
    ///
    /// With `s = (1 − ε)^{1/2}` the conjugacy reads `g(s z) = s (1 − ε) f(z)`,
    /// giving `λ' = (1 − ε) λ` and `b' = s b`.
    pub fn perturb(&self, eps: f64) -> Result<CubicMap> {
        if !(0.0..1.0).contains(&eps) || eps.is_nan() {
            return Err(Error::InvalidPerturbation(eps));
        }
        let s = (1.0 - eps).sqrt();
        Ok(CubicMap {
            lambda: self.lambda * (1.0 - eps),
            b: self.b * s,
        })
    }

    /// The conjugate map under `z ↦ −z`, i.e. `b ↦ −b`.
    pub fn reflected(&self) -> CubicMap {
        CubicMap {
            lambda: self.lambda,
            b: -self.b,
        }
    }

    /// `f^{∘n}(z)` together with its derivative.
    pub fn iterate_with_derivative(&self, mut z: Complex64, n: usize) -> (Complex64, Complex64) {
        let mut d = Complex64::new(1.0, 0.0);
        for _ in 0..n {
            d *= self.derivative(z);
            z = self.eval(z);
        }
        (z, d)
    }

    /// Multiplier of the cycle through `z` of period `n`.
    pub fn cycle_multiplier(&self, z: Complex64, n: usize) -> Complex64 {
        self.iterate_with_derivative(z, n).1
    }
}
