//! One-dimensional numerical integration: adaptive Gauss–Kronrod (7/15) and
//! fixed-order Gauss–Legendre rules.

/// Kronrod abscissae on [-1, 1], positive half; the last entry is the centre.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

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

/// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], XGK[5], centre).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: u32 = 40;

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub converged: bool,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Integral {
    let (value, err) = gk15(f, a, b);
    if err <= tol || !err.is_finite() {
        return Integral { value, abs_error: err, converged: err.is_finite() };
    }
    if depth >= MAX_DEPTH {
        return Integral { value, abs_error: err, converged: false };
    }
    let mid = 0.5 * (a + b);
    let left = adapt(f, a, mid, 0.5 * tol, depth + 1);
    let right = adapt(f, mid, b, 0.5 * tol, depth + 1);
    Integral {
        value: left.value + right.value,
        abs_error: left.abs_error + right.abs_error,
        converged: left.converged && right.converged,
    }
}

/// Adaptive Gauss–Kronrod 7/15 integration of `f` over `[a, b]` with absolute
/// tolerance `abs_tol`. Intervals are bisected until the Kronrod/Gauss
/// difference falls below the tolerance share of that interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Integral {
    if a == b {
        return Integral { value: 0.0, abs_error: 0.0, converged: true };
    }
    if b < a {
        let r = adapt(&f, b, a, abs_tol, 0);
        return Integral { value: -r.value, ..r };
    }
    adapt(&f, a, b, abs_tol, 0)
}

/// Gauss–Legendre nodes and weights on `[0, 1]` with `n` points.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (x.iter().map(|&t| 0.5 * (t + 1.0)).collect(), w.iter().map(|&v| 0.5 * v).collect())
}

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`, found by Newton
/// iteration on the Legendre polynomial three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let step = p / d;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gk_integrates_smooth_functions() {
        let r = integrate(|x: f64| x.exp(), 0.0, 1.0, 1e-13);
        assert!(r.converged);
        assert_abs_diff_eq!(r.value, std::f64::consts::E - 1.0, epsilon = 1e-13);

        let r = integrate(|x: f64| 1.0 / (1.0 + x * x), -50.0, 50.0, 1e-12);
        assert_abs_diff_eq!(r.value, 2.0 * 50f64.atan(), epsilon = 1e-11);
    }

    #[test]
    fn gk_handles_reversed_and_empty_intervals() {
        let r = integrate(|x: f64| x * x, 1.0, 0.0, 1e-14);
        assert_abs_diff_eq!(r.value, -1.0 / 3.0, epsilon = 1e-14);
        assert_eq!(integrate(|x: f64| x, 2.0, 2.0, 1e-9).value, 0.0);
    }

    #[test]
    fn gk_kink_needs_adaptivity() {
        let r = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-12);
        assert!(r.converged);
        assert_abs_diff_eq!(r.value, 0.045 + 0.245, epsilon = 1e-11);
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        for n in [1usize, 2, 5, 16, 128] {
            let (x, w) = gauss_legendre(n);
            assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            let deg = 2 * n - 1;
            let s: f64 = x.iter().zip(&w).map(|(&t, &wt)| wt * t.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert_abs_diff_eq!(s, exact, epsilon = 1e-12);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn unit_rule_integrates_cosine() {
        let (x, w) = gauss_legendre_unit(20);
        let s: f64 = x.iter().zip(&w).map(|(&t, &wt)| wt * (3.0 * t).cos()).sum();
        assert_abs_diff_eq!(s, 3f64.sin() / 3.0, epsilon = 1e-14);
    }
}
