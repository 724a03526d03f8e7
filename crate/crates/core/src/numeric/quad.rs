//! Adaptive Gauss–Kronrod quadrature (7/15 points).

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: FnMut(f64) -> Option<f64>>(f: &mut F, a: f64, b: f64) -> Option<(f64, f64)> {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c)?;
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = r * XGK[j];
        let s = f(c - dx)? + f(c + dx)?;
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Some((k * r, ((k - g) * r).abs()))
}

/// Integral of `f` over `[a, b]` to absolute tolerance `tol`, or `None` if
/// `f` fails somewhere or the subdivision budget runs out.
pub fn integrate<F: FnMut(f64) -> Option<f64>>(mut f: F, a: f64, b: f64, tol: f64) -> Option<f64> {
    if a == b {
        return Some(0.0);
    }
    let mut stack = vec![(a, b, tol)];
    let mut total = 0.0;
    let mut budget = 4000;
    while let Some((lo, hi, t)) = stack.pop() {
        budget -= 1;
        if budget == 0 {
            return None;
        }
        let (val, err) = gk15(&mut f, lo, hi)?;
        if err <= t.max(1e-15 * val.abs()) || (hi - lo).abs() < 1e-13 {
            total += val;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * t));
            stack.push((mid, hi, 0.5 * t));
        }
    }
    Some(total)
}
