//! Gauss–Kronrod rules and a globally adaptive driver with an evaluation budget.
//!
//! Rules are stored as full node lists on `[-1, 1]` so that callers can
//! evaluate an integrand on all nodes of many panels at once and hand the
//! values back to [`Rule::estimate`]. Error estimation follows QUADPACK.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// An embedded Gauss–Kronrod pair on `[-1, 1]`.
pub struct Rule {
    /// Ascending nodes.
    pub nodes: &'static [f64],
    /// Kronrod weights, aligned with `nodes`.
    pub kronrod: &'static [f64],
    /// Gauss weights, aligned with `nodes`; zero at Kronrod-only nodes.
    pub gauss: &'static [f64],
}

#[allow(clippy::excessive_precision)]
const GK15_NODES: [f64; 15] = [
    -0.991_455_371_120_812_639_206_854_697_526_329,
    -0.949_107_912_342_758_524_526_189_684_047_851,
    -0.864_864_423_359_769_072_789_712_788_640_926,
    -0.741_531_185_599_394_439_863_864_773_280_788,
    -0.586_087_235_467_691_130_294_144_838_258_730,
    -0.405_845_151_377_397_166_906_606_412_076_961,
    -0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.991_455_371_120_812_639_206_854_697_526_329,
];

#[allow(clippy::excessive_precision)]
const GK15_KRONROD: [f64; 15] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.022_935_322_010_529_224_963_732_008_058_970,
];

#[allow(clippy::excessive_precision)]
const GK15_GAUSS: [f64; 15] = [
    0.0,
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.0,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.0,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.0,
    0.417_959_183_673_469_387_755_102_040_816_327,
    0.0,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.0,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.0,
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.0,
];

#[allow(clippy::excessive_precision)]
const GK21_NODES: [f64; 21] = [
    -0.995_657_163_025_808_080_735_527_280_689_003,
    -0.973_906_528_517_171_720_077_964_012_084_452,
    -0.930_157_491_355_708_226_001_207_180_059_508,
    -0.865_063_366_688_984_510_732_096_688_423_493,
    -0.780_817_726_586_416_897_063_717_578_345_042,
    -0.679_409_568_299_024_406_234_327_365_114_874,
    -0.562_757_134_668_604_683_339_000_099_272_694,
    -0.433_395_394_129_247_190_799_265_943_165_784,
    -0.294_392_862_701_460_198_131_126_603_103_866,
    -0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.995_657_163_025_808_080_735_527_280_689_003,
];

#[allow(clippy::excessive_precision)]
const GK21_KRONROD: [f64; 21] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.011_694_638_867_371_874_278_064_396_062_192,
];

#[allow(clippy::excessive_precision)]
const GK21_GAUSS: [f64; 21] = [
    0.0,
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.0,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.0,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.0,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.0,
    0.295_524_224_714_752_870_173_892_994_651_338,
    0.0,
    0.295_524_224_714_752_870_173_892_994_651_338,
    0.0,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.0,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.0,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.0,
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.0,
];

/// 7-point Gauss embedded in 15-point Kronrod.
pub static GK15: Rule = Rule { nodes: &GK15_NODES, kronrod: &GK15_KRONROD, gauss: &GK15_GAUSS };

/// 10-point Gauss embedded in 21-point Kronrod.
pub static GK21: Rule = Rule { nodes: &GK21_NODES, kronrod: &GK21_KRONROD, gauss: &GK21_GAUSS };

/// Result of one rule application on one interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Combines integrand values at the mapped nodes `c + h·node` into an estimate,
    /// where `h` is the half width.
    pub fn estimate(&self, half_width: f64, values: &[f64]) -> Estimate {
        debug_assert_eq!(values.len(), self.len());
        let mut res_k = 0.0;
        let mut res_g = 0.0;
        let mut res_abs = 0.0;
        for ((&v, &wk), &wg) in values.iter().zip(self.kronrod).zip(self.gauss) {
            res_k += wk * v;
            res_g += wg * v;
            res_abs += wk * v.abs();
        }
        let mean = 0.5 * res_k;
        let res_asc: f64 = values.iter().zip(self.kronrod).map(|(&v, &wk)| wk * (v - mean).abs()).sum();
        let h = half_width.abs();
        Estimate {
            value: res_k * half_width,
            abs_error: rescale_error((res_k - res_g) * half_width, res_abs * h, res_asc * h),
        }
    }

    /// Applies the rule to `f` on `[a, b]`.
    pub fn apply(&self, mut f: impl FnMut(f64) -> f64, a: f64, b: f64) -> Estimate {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut vals = [0.0; 21];
        let vals = &mut vals[..self.len()];
        for (v, &x) in vals.iter_mut().zip(self.nodes) {
            *v = f(c + h * x);
        }
        self.estimate(h, vals)
    }
}

/// One interval of an adaptive partition. `tag` lets a caller integrate
/// different coordinate systems in the same global pass.
#[derive(Debug, Clone, Copy)]
pub struct Segment {
    pub a: f64,
    pub b: f64,
    pub tag: u8,
    pub estimate: Estimate,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
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
        self.estimate.abs_error.total_cmp(&other.estimate.abs_error).then(other.a.total_cmp(&self.a))
    }
}

/// Outcome of a global adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

/// Refines an initial partition by repeatedly bisecting the segment with the
/// largest error until `abs_error ≤ rel_tol·|value|` or the evaluation budget
/// runs out. `eval(a, b, tag)` integrates one segment and reports its cost.
///
/// `spent` is the number of evaluations already used to build `initial`.
pub fn refine(
    initial: Vec<Segment>,
    spent: usize,
    rel_tol: f64,
    budget: usize,
    mut eval: impl FnMut(f64, f64, u8) -> (Estimate, usize),
) -> Result<Integral> {
    let mut evaluations = spent;
    let mut value: f64 = initial.iter().map(|s| s.estimate.value).sum();
    let mut error: f64 = initial.iter().map(|s| s.estimate.abs_error).sum();
    let mut heap = BinaryHeap::from(initial);

    // negated so that a NaN running error keeps refining until the budget trips
    while !(error <= rel_tol * value.abs()) {
        if evaluations >= budget {
            return Err(Error::QuadratureBudget { relative_error: error / value.abs(), evaluations });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval exhausted at machine resolution
            return Err(Error::QuadratureBudget { relative_error: error / value.abs(), evaluations });
        }
        let (left, cl) = eval(worst.a, mid, worst.tag);
        let (right, cr) = eval(mid, worst.b, worst.tag);
        evaluations += cl + cr;
        value += left.value + right.value - worst.estimate.value;
        error += left.abs_error + right.abs_error - worst.estimate.abs_error;
        heap.push(Segment { a: worst.a, b: mid, tag: worst.tag, estimate: left });
        heap.push(Segment { a: mid, b: worst.b, tag: worst.tag, estimate: right });
    }

    // Re-sum from scratch in a fixed order so running-sum drift does not leak out.
    let mut segs = heap.into_vec();
    segs.sort_by(|x, y| x.tag.cmp(&y.tag).then(x.a.total_cmp(&y.a)));
    Ok(Integral {
        value: segs.iter().map(|s| s.estimate.value).sum(),
        abs_error: segs.iter().map(|s| s.estimate.abs_error).sum(),
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_interval_length() {
        for rule in [&GK15, &GK21] {
            assert_relative_eq!(rule.kronrod.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
            assert_relative_eq!(rule.gauss.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn polynomials_are_exact() {
        // Kronrod 21 is exact to degree 31, Kronrod 15 to degree 22
        let e = GK21.apply(|x| x.powi(30), -1.0, 1.0);
        assert_relative_eq!(e.value, 2.0 / 31.0, max_relative = 1e-13);
        let e = GK15.apply(|x| 3.0 * x * x + x.powi(21), 0.0, 2.0);
        assert_relative_eq!(e.value, 8.0 + 2f64.powi(22) / 22.0, max_relative = 1e-13);
    }

    #[test]
    fn oscillation_over_two_periods_is_resolved() {
        let e = GK21.apply(|x| x.cos() + 1.0, 0.0, 4.0 * std::f64::consts::PI);
        assert_relative_eq!(e.value, 4.0 * std::f64::consts::PI, max_relative = 1e-13);
        assert!(e.abs_error < 1e-8);
    }

    #[test]
    fn refine_converges_on_peaked_integrand() {
        let f = |x: f64| 1.0 / (1e-4 + x * x);
        let seg = |a: f64, b: f64| Segment { a, b, tag: 0, estimate: GK15.apply(f, a, b) };
        let res = refine(vec![seg(-1.0, 1.0)], 15, 1e-10, 100_000, |a, b, _| (GK15.apply(f, a, b), 15)).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert_relative_eq!(res.value, exact, max_relative = 1e-9);
        assert!(res.abs_error <= 1e-10 * exact);
    }

    #[test]
    fn refine_reports_exhausted_budget() {
        let f = |x: f64| 1.0 / x.sqrt();
        let err = refine(
            vec![Segment { a: 0.0, b: 1.0, tag: 0, estimate: GK15.apply(f, 0.0, 1.0) }],
            15,
            1e-14,
            600,
            |a, b, _| (GK15.apply(f, a, b), 15),
        )
        .unwrap_err();
        assert!(matches!(err, Error::QuadratureBudget { evaluations, .. } if evaluations >= 600));
    }
}
