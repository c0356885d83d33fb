//! Small numerical building blocks: compensated summation, adaptive
//! Gauss-Kronrod quadrature and a bracketed scalar root finder.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Kahan-Babuska (Neumaier) compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator, accumulated in iteration order.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().value()
}

// 15-point Kronrod nodes and weights with the embedded 7-point Gauss rule
// (QUADPACK qk15 tables).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut values = [(0.0, 0.0); 7];
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let (lo, hi) = (f(center - dx), f(center + dx));
        values[j] = (lo, hi);
        kronrod += w * (lo + hi);
        // odd Kronrod indices coincide with the Gauss nodes
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for (j, &(lo, hi)) in values.iter().enumerate() {
        asc += WGK[j] * ((lo - mean).abs() + (hi - mean).abs());
    }
    let asc = asc * half.abs();
    let value = kronrod * half;
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    Segment { a, b, value, error }
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadTolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_segments: usize,
}

impl Default for QuadTolerance {
    fn default() -> Self {
        Self { abs: 1e-14, rel: 1e-13, max_segments: 200 }
    }
}

/// Globally adaptive Gauss-Kronrod (7/15) integration of `f` over `[a, b]`.
///
/// The segment with the largest error estimate is bisected until the summed
/// error falls below `max(abs, rel * |I|)` or the segment budget runs out;
/// in the latter case the best available estimate is returned.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: QuadTolerance) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod15(&f, a, b);
    let mut total = first.value;
    let mut error = first.error;
    heap.push(first);
    while error > tol.abs.max(tol.rel * total.abs()) && heap.len() < tol.max_segments {
        let worst = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot split further in floating point
            heap.push(Segment { error: 0.0, ..worst });
            error = heap.iter().map(|s| s.error).sum();
            continue;
        }
        let left = kronrod15(&f, worst.a, mid);
        let right = kronrod15(&f, mid, worst.b);
        heap.push(left);
        heap.push(right);
        total = kahan_sum(heap.iter().map(|s| s.value));
        error = heap.iter().map(|s| s.error).sum();
    }
    kahan_sum(heap.iter().map(|s| s.value))
}

/// Outcome of [`solve_bracketed`].
#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Finds a root of `f` inside `[a, b]`, where `f(a)` and `f(b)` have
/// opposite signs (or one of them is zero).
///
/// Bisection guarantees convergence; a secant step through the bracket
/// endpoints is taken whenever it lands strictly inside the bracket and the
/// previous step shrank the bracket by at least half. Iteration stops when
/// the bracket is narrower than `xtol * max(1, |x|)` or `f` vanishes.
pub fn solve_bracketed<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> Option<Root> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(Root { x: a, fx: fa, iterations: 0 });
    }
    if fb == 0.0 {
        return Some(Root { x: b, fx: fb, iterations: 0 });
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return None;
    }
    let mut last_width = (b - a).abs();
    let mut use_secant = true;
    for iterations in 1..=400 {
        let width = (b - a).abs();
        let scale = a.abs().max(b.abs()).max(1.0);
        if width <= xtol * scale {
            let (x, fx) = if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) };
            return Some(Root { x, fx, iterations });
        }
        let mid = 0.5 * (a + b);
        let mut x = mid;
        if use_secant {
            let s = b - fb * (b - a) / (fb - fa);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if s > lo && s < hi {
                x = s;
            }
        }
        if x == a || x == b {
            x = mid;
        }
        let fx = f(x);
        if fx == 0.0 {
            return Some(Root { x, fx, iterations });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        let new_width = (b - a).abs();
        use_secant = new_width <= 0.5 * last_width;
        last_width = new_width;
    }
    let (x, fx) = if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) };
    Some(Root { x, fx, iterations: 400 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_terms() {
        let mut terms = vec![1.0];
        terms.extend(std::iter::repeat_n(1e-16, 10_000));
        terms.push(-1.0);
        let naive: f64 = terms.iter().sum();
        assert!((kahan_sum(terms.iter().copied()) - 1e-12).abs() < 1e-24);
        assert!((naive - 1e-12).abs() > 1e-14);
    }

    #[test]
    fn quadrature_polynomial_and_smooth() {
        let tol = QuadTolerance::default();
        let v = integrate(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, tol);
        assert!((v - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
        let v = integrate(f64::sin, 0.0, std::f64::consts::PI, tol);
        assert!((v - 2.0).abs() < 1e-14);
        // steep logistic step
        let v = integrate(|x| 1.0 / (1.0 + (-1e4 * (x - 0.3)).exp()), 0.0, 1.0, tol);
        assert!((v - 0.7).abs() < 1e-12, "{v}");
    }

    #[test]
    fn root_finder_converges() {
        let r = solve_bracketed(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-14);
        let r = solve_bracketed(|x| (x - 1.0).powi(3), -3.0, 10.0, 1e-15).unwrap();
        assert!((r.x - 1.0).abs() < 1e-5);
        assert!(solve_bracketed(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }
}
