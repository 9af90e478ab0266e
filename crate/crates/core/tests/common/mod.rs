//! Independent oracles for integration tests: double-double arithmetic,
//! closed-form roots and a DFT expansion of iterates.

#![allow(dead_code)]

use cubiclab::{Complex64, CubicMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi));
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub fn from(z: Complex64) -> Self {
        Cdd {
            re: Dd::from(z.re),
            im: Dd::from(z.im),
        }
    }

    pub fn add(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    pub fn mul(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// `λz + bz² + z³` in double-double.
pub fn eval_dd(f: &CubicMap, z: Cdd) -> Cdd {
    let (l, b) = (Cdd::from(f.lambda), Cdd::from(f.b));
    let inner = b.add(z);
    let inner = l.add(inner.mul(z));
    inner.mul(z)
}

pub fn iterate_dd(f: &CubicMap, z: Complex64, n: u32) -> Complex64 {
    let mut w = Cdd::from(z);
    for _ in 0..n {
        w = eval_dd(f, w);
    }
    w.to_c64()
}

/// Taylor coefficients of `f^{∘q}` by a discrete Fourier transform of
/// double-double samples on the unit circle. Exact up to rounding when
/// `3^q < n`.
pub fn iterate_coefficients_dft(f: &CubicMap, q: u32, n: usize) -> Vec<Complex64> {
    let degree = 3usize.pow(q);
    assert!(degree < n);
    let samples: Vec<(Complex64, Complex64)> = (0..n)
        .map(|j| {
            let w = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n as f64);
            (w, iterate_dd(f, w, q))
        })
        .collect();
    (0..=degree)
        .map(|k| {
            let mut acc = Cdd::from(Complex64::new(0.0, 0.0));
            for (j, &(_, v)) in samples.iter().enumerate() {
                let tw = Complex64::from_polar(1.0, -std::f64::consts::TAU * ((j * k) % n) as f64 / n as f64);
                acc = acc.add(Cdd::from(v).mul(Cdd::from(tw)));
            }
            acc.to_c64() / n as f64
        })
        .collect()
}

/// Roots of `az² + bz + c` by the textbook formula.
pub fn quadratic_formula(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 2] {
    let d = (b * b - 4.0 * a * c).sqrt();
    [(-b + d) / (2.0 * a), (-b - d) / (2.0 * a)]
}

pub fn critical_oracle(f: &CubicMap) -> [Complex64; 2] {
    quadratic_formula(Complex64::new(3.0, 0.0), 2.0 * f.b, f.lambda)
}

/// `0` and the roots of `z² + bz + (λ − 1)`.
pub fn fixed_oracle(f: &CubicMap) -> [Complex64; 3] {
    let [r1, r2] = quadratic_formula(Complex64::new(1.0, 0.0), f.b, f.lambda - 1.0);
    [Complex64::new(0.0, 0.0), r1, r2]
}

/// Largest distance from a point of `a` to its nearest point in `b`, both
/// ways.
pub fn set_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one = |x: &[Complex64], y: &[Complex64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the disk of radius `r`.
pub fn in_disk(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    let rho = r * rng.gen::<f64>().sqrt();
    Complex64::from_polar(rho, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// `(λ, b)` uniform in the unit bidisk.
pub fn random_bidisk(rng: &mut ChaCha8Rng) -> CubicMap {
    CubicMap::new(in_disk(rng, 1.0), in_disk(rng, 1.0))
}

pub fn golden_lambda() -> Complex64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    Complex64::from_polar(1.0, std::f64::consts::TAU * g)
}
