use std::f64::consts::PI;

use proptest::prelude::*;
use rayon::prelude::*;
use stable_agg::stable::{
    linear_transform, sample_stable, stable_cdf, stable_quantile, sum_independent, RngSeed, StableParams,
};

fn params(a: f64, b: f64, g: f64, d: f64) -> StableParams {
    StableParams::new(a, b, g, d).unwrap()
}

/// Standard S⁰ CDF values from characteristic-function (Gil-Pelaez)
/// inversion at 25 digits; independent of the integral representation.
#[allow(clippy::excessive_precision)]
const REFERENCE_CDF: [(f64, f64, f64, f64); 20] = [
    (0.5, 0.5, -3.0, 0.089426388586810725),
    (0.5, 0.5, -0.5, 0.20483276469913348),
    (0.5, 0.5, 0.4, 0.52313935223900837),
    (0.5, 0.5, 2.5, 0.69935000495540289),
    (0.8, -0.3, -3.0, 0.17276484358476687),
    (0.8, -0.3, -0.5, 0.40345747014229855),
    (0.8, -0.3, 0.4, 0.6754048548610602),
    (0.8, -0.3, 2.5, 0.89856003783688056),
    (1.3, 0.9, -3.0, 0.0065907582948592093),
    (1.3, 0.9, -0.5, 0.27026345435294988),
    (1.3, 0.9, 0.4, 0.51428215807048957),
    (1.3, 0.9, 2.5, 0.82756480212628304),
    (1.7, -1.0, -3.0, 0.069842701712329067),
    (1.7, -1.0, -0.5, 0.41419957707618939),
    (1.7, -1.0, 0.4, 0.66112116951637552),
    (1.7, -1.0, 2.5, 0.98405522046263647),
    (1.0, 0.5, -3.0, 0.0489874455780868),
    (1.0, 0.5, -0.5, 0.28640852329506236),
    (1.0, 0.5, 0.4, 0.54461364745888649),
    (1.0, 0.5, 2.5, 0.81393336781026289),
];

#[test]
fn cdf_matches_characteristic_function_inversion() {
    for &(a, b, x, want) in &REFERENCE_CDF {
        let got = stable_cdf(&params(a, b, 1.0, 0.0), x);
        assert!((got - want).abs() < 1e-12, "alpha={a} beta={b} x={x}: {got} vs {want}");
    }
}

#[test]
fn gaussian_and_cauchy_reductions() {
    for i in -30..=30 {
        let x = 0.3 * i as f64;
        let g = stable_cdf(&params(2.0, 0.0, 0.7, 0.2), x);
        let want = 0.5 * libm::erfc(-(x - 0.2) / (2.0 * 0.7));
        assert!((g - want).abs() < 1e-9);
        let c = stable_cdf(&params(1.0, 0.0, 1.5, -1.0), x);
        let want = 0.5 + ((x + 1.0) / 1.5).atan() / PI;
        assert!((c - want).abs() < 1e-9);
    }
}

#[test]
fn cdf_monotone_on_grid() {
    for &(a, b) in &[(0.4, 1.0), (0.9, -0.6), (1.0, 0.3), (1.6, 0.8), (2.0, 0.0)] {
        let p = params(a, b, 1.0, 0.0);
        let mut prev = 0.0;
        for i in 0..400 {
            let x = -10.0 + 0.05 * i as f64;
            let v = stable_cdf(&p, x);
            assert!((0.0..=1.0).contains(&v));
            assert!(v >= prev - 1e-13, "alpha={a} beta={b} x={x}");
            prev = v;
        }
    }
}

fn arb_params() -> impl Strategy<Value = StableParams> {
    // alpha = 1 is sampled explicitly; the open band around it is avoided
    let alpha = prop_oneof![0.2f64..0.98, Just(1.0), 1.02f64..=2.0];
    (alpha, -1.0f64..=1.0, 0.1f64..5.0, -5.0f64..5.0).prop_map(|(a, b, g, d)| params(a, b, g, d))
}

fn arb_same_alpha(n: usize) -> impl Strategy<Value = Vec<StableParams>> {
    prop_oneof![0.3f64..0.95, Just(1.0), 1.05f64..=2.0].prop_flat_map(move |alpha| {
        proptest::collection::vec((-1.0f64..=1.0, 0.1f64..4.0, -3.0f64..3.0), n)
            .prop_map(move |v| v.into_iter().map(|(b, g, d)| params(alpha, b, g, d)).collect())
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quantile_cdf_round_trip(p in arb_params()) {
        for k in 1..=14 {
            let prob = 0.01 + 0.98 * k as f64 / 15.0;
            let q = stable_quantile(&p, prob).unwrap();
            let back = stable_cdf(&p, q);
            prop_assert!((back - prob).abs() <= 1e-9, "p={prob} q={q} back={back}");
        }
    }

    #[test]
    fn quantiles_commute_with_positive_scaling(p in arb_params(), a in 0.05f64..20.0, b in -10.0f64..10.0) {
        let y = linear_transform(p, a, b).unwrap();
        for &prob in &[0.05, 0.3, 0.5, 0.8, 0.97] {
            let lhs = stable_quantile(&y, prob).unwrap();
            let rhs = a * stable_quantile(&p, prob).unwrap() + b;
            prop_assert!(close(lhs, rhs, 1e-8), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn sum_is_associative(parts in arb_same_alpha(3)) {
        let flat = sum_independent(&parts).unwrap();
        let nested = sum_independent(&[sum_independent(&parts[..2]).unwrap(), parts[2]]).unwrap();
        prop_assert!(close(flat.gamma(), nested.gamma(), 1e-12));
        prop_assert!(close(flat.beta(), nested.beta(), 1e-12));
        prop_assert!(close(flat.delta(), nested.delta(), 1e-12), "{} vs {}", flat.delta(), nested.delta());
    }
}

/// Two-sided KS statistic of `sample` against `cdf`.
fn ks_statistic(mut sample: Vec<f64>, cdf: impl Fn(f64) -> f64 + Sync) -> f64 {
    sample.sort_unstable_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .reduce(|| 0.0, f64::max)
}

#[test]
fn samples_pass_kolmogorov_smirnov() {
    let n = 100_000;
    // 0.1% asymptotic critical value per law keeps the family-wise
    // false-alarm rate under 1% across the grid
    let critical = 1.9495 / (n as f64).sqrt();
    let grid = [(0.5, 0.0), (0.8, 0.5), (1.0, 0.0), (1.0, 0.7), (1.5, -0.6), (1.9, 0.3), (1.2, 1.0)];
    for (k, &(a, b)) in grid.iter().enumerate() {
        let p = params(a, b, 1.3, 0.5);
        let draws = sample_stable(&p, n, RngSeed::new(20_240, k as u64));
        let d = ks_statistic(draws, |x| stable_cdf(&p, x));
        assert!(d < critical, "alpha={a} beta={b}: D={d} >= {critical}");
    }
}

/// Type-7 sample quantile and a conservative MC band from the binomial
/// order-statistic variance.
fn quantile_with_band(mut xs: Vec<f64>, p: f64, density_hint: impl Fn(f64) -> f64) -> (f64, f64) {
    xs.sort_unstable_by(f64::total_cmp);
    let h = (xs.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let q = xs[lo] + (h - lo as f64) * (xs[lo + 1] - xs[lo]);
    let se = (p * (1.0 - p) / xs.len() as f64).sqrt() / density_hint(q);
    (q, 5.0 * se)
}

fn density_fd(p: &StableParams) -> impl Fn(f64) -> f64 + '_ {
    move |x| (stable_cdf(p, x + 1e-4) - stable_cdf(p, x - 1e-4)) / 2e-4
}

#[test]
fn sample_quantile_matches_quantile_function() {
    let p = params(1.5, 0.0, 1.0, 0.0);
    let draws = sample_stable(&p, 1_000_000, RngSeed::new(99, 0));
    let (q, band) = quantile_with_band(draws, 0.75, density_fd(&p));
    let want = stable_quantile(&p, 0.75).unwrap();
    assert!((q - want).abs() < band, "{q} vs {want} (band {band})");
}

#[test]
fn alpha_one_skewed_sum_location() {
    // two independent S⁰(1, 1, 1, 0) sum to S⁰(1, 1, 2, (4/pi) ln 2)
    let e = params(1.0, 1.0, 1.0, 0.0);
    let s = sum_independent(&[e, e]).unwrap();
    assert!((s.delta() - 4.0 / PI * 2f64.ln()).abs() < 1e-15);
    let a = sample_stable(&e, 1_000_000, RngSeed::new(5, 0));
    let b = sample_stable(&e, 1_000_000, RngSeed::new(5, 1));
    let sums: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    for &prob in &[0.25, 0.5, 0.75] {
        let (q, band) = quantile_with_band(sums.clone(), prob, density_fd(&s));
        let want = stable_quantile(&s, prob).unwrap();
        assert!((q - want).abs() < band, "p={prob}: {q} vs {want} (band {band})");
    }
}
