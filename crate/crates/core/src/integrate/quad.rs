//! Globally adaptive Gauss-Kronrod (7/15) quadrature for a pair of
//! integrands (signed and absolute) that carry their own error estimates.

use std::ops::{Add, Mul};

/// Signed and absolute integrals with error estimates.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Pair {
    pub value: f64,
    pub abs: f64,
    pub err: f64,
    pub abs_err: f64,
}

impl Add for Pair {
    type Output = Pair;
    fn add(self, o: Pair) -> Pair {
        Pair {
            value: self.value + o.value,
            abs: self.abs + o.abs,
            err: self.err + o.err,
            abs_err: self.abs_err + o.abs_err,
        }
    }
}

impl Mul<f64> for Pair {
    type Output = Pair;
    fn mul(self, w: f64) -> Pair {
        Pair {
            value: self.value * w,
            abs: self.abs * w.abs(),
            err: self.err * w.abs(),
            abs_err: self.abs_err * w.abs(),
        }
    }
}

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
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Piece {
    a: f64,
    b: f64,
    result: Pair,
}

impl Piece {
    fn worst(&self) -> f64 {
        self.result.err.max(self.result.abs_err)
    }
}

fn gk15<F: FnMut(f64) -> Pair>(f: &mut F, a: f64, b: f64) -> Pair {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = Pair::default();
    let (mut g_v, mut g_a) = (0.0, 0.0);
    let mut inner_err = (0.0, 0.0);
    for i in 0..8 {
        let xs: &[f64] = if i == 7 { &[0.0] } else { &[-XGK[i], XGK[i]] };
        for &x in xs {
            let y = f(c + h * x);
            k.value += WGK[i] * y.value;
            k.abs += WGK[i] * y.abs;
            inner_err.0 += WGK[i] * y.err;
            inner_err.1 += WGK[i] * y.abs_err;
            if i % 2 == 1 {
                g_v += WG[i / 2] * y.value;
                g_a += WG[i / 2] * y.abs;
            }
        }
    }
    let h = h.abs();
    Pair {
        value: k.value * (0.5 * (b - a)),
        abs: k.abs * h,
        err: ((k.value - g_v).abs() + inner_err.0) * h,
        abs_err: ((k.abs - g_a).abs() + inner_err.1) * h,
    }
}

/// Integrate over `[a, b]`, bisecting the worst piece until the combined
/// error meets `max(abs_tol, rel_tol·∫|f|)` or `max_pieces` is reached.
pub fn adaptive<F: FnMut(f64) -> Pair>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_pieces: usize,
) -> Pair {
    if a == b {
        return Pair::default();
    }
    let mut pieces = vec![Piece {
        a,
        b,
        result: gk15(&mut f, a, b),
    }];
    loop {
        let total = pieces.iter().fold(Pair::default(), |acc, p| acc + p.result);
        let target = abs_tol.max(rel_tol * total.abs);
        if total.err.max(total.abs_err) <= target || pieces.len() >= max_pieces {
            return total;
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.worst().total_cmp(&y.1.worst()))
            .expect("nonempty");
        let p = pieces.swap_remove(idx);
        let m = 0.5 * (p.a + p.b);
        if m <= p.a.min(p.b) || m >= p.a.max(p.b) {
            // Interval below float resolution.
            pieces.push(p);
            return pieces.iter().fold(Pair::default(), |acc, p| acc + p.result);
        }
        let left = gk15(&mut f, p.a, m);
        let right = gk15(&mut f, m, p.b);
        pieces.push(Piece {
            a: p.a,
            b: m,
            result: left,
        });
        pieces.push(Piece {
            a: m,
            b: p.b,
            result: right,
        });
    }
}
