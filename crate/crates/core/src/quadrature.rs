//! Adaptive Gauss–Kronrod (7/15) quadrature in one dimension, nested for
//! rectangles, plus geometric panelling for integrands concentrated near an
//! endpoint at zero.

use crate::error::{invalid, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
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

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-13,
            rel: 1e-11,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Estimate {
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for k in 0..7 {
        let x = hl * XGK[k];
        let s = f(c - x) + f(c + x);
        kron += WGK[k] * s;
        if k % 2 == 1 {
            gauss += WG[k / 2] * s;
        }
    }
    Estimate {
        value: kron * hl,
        error: ((kron - gauss) * hl).abs(),
    }
}

/// Globally adaptive bisection on `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Estimate {
    if a == b {
        return Estimate {
            value: 0.0,
            error: 0.0,
        };
    }
    let mut pieces = vec![(a, b, gk15(&mut f, a, b))];
    loop {
        let value: f64 = pieces.iter().map(|p| p.2.value).sum();
        let error: f64 = pieces.iter().map(|p| p.2.error).sum();
        if error <= tol.abs.max(tol.rel * value.abs()) || pieces.len() >= tol.max_intervals {
            return Estimate { value, error };
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.error.total_cmp(&y.1 .2.error))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            let value: f64 = pieces.iter().map(|p| p.2.value).sum();
            return Estimate { value, error };
        }
        pieces.push((lo, mid, gk15(&mut f, lo, mid)));
        pieces.push((mid, hi, gk15(&mut f, mid, hi)));
    }
}

/// `integral_a^b f(y) dy` with `0 < a`, integrated in `s = ln y` over panels
/// one decade wide, for integrands that vary on the scale of `y` itself.
pub fn integrate_geometric<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    if !(a > 0.0) || !(b >= a) {
        return Err(invalid(format!("geometric panels need 0 < a <= b, got [{a}, {b}]")));
    }
    let (la, lb) = (a.ln(), b.ln());
    let decade = std::f64::consts::LN_10;
    let mut total = Estimate {
        value: 0.0,
        error: 0.0,
    };
    let mut lo = la;
    while lo < lb {
        let hi = (lo + decade).min(lb);
        let e = integrate(
            |s| {
                let y = s.exp();
                f(y) * y
            },
            lo,
            hi,
            tol,
        );
        total.value += e.value;
        total.error += e.error;
        lo = hi;
    }
    Ok(total)
}

/// Rectangle `[a1,b1] x [a2,b2]` with positive lower corners, nested geometric
/// panelling in both variables.
pub fn integrate_rect_geometric<F: Fn(f64, f64) -> f64>(
    f: F,
    (a1, b1): (f64, f64),
    (a2, b2): (f64, f64),
    tol: Tolerance,
) -> Result<Estimate> {
    let mut inner_err = 0.0;
    let mut failure = None;
    let outer = integrate_geometric(
        |y1| match integrate_geometric(|y2| f(y1, y2), a2, b2, tol) {
            Ok(e) => {
                inner_err += e.error;
                e.value
            }
            Err(err) => {
                failure = Some(err);
                0.0
            }
        },
        a1,
        b1,
        tol,
    )?;
    if let Some(err) = failure {
        return Err(err);
    }
    Ok(Estimate {
        value: outer.value,
        error: outer.error + inner_err * (b1 - a1) / 30.0,
    })
}
