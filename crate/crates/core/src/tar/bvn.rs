//! Bivariate normal probabilities.
//!
//! Port of Alan Genz's `bvnu` (Drezner-Wesolowsky quadrature with the
//! high-correlation refinements), accurate to about 1e-15 absolute.

use crate::stats::norm_cdf;

use std::f64::consts::PI;

const W6: [f64; 3] = [0.1713244923791705, 0.3607615730481384, 0.4679139345726904];
const X6: [f64; 3] = [0.9324695142031522, 0.6612093864662647, 0.2386191860831970];

const W12: [f64; 6] = [
    0.04717533638651177,
    0.1069393259953183,
    0.1600783285433464,
    0.2031674267230659,
    0.2334925365383547,
    0.2491470458134029,
];
const X12: [f64; 6] = [
    0.9815606342467191,
    0.9041172563704750,
    0.7699026741943050,
    0.5873179542866171,
    0.3678314989981802,
    0.1252334085114692,
];

const W20: [f64; 10] = [
    0.01761400713915212,
    0.04060142980038694,
    0.06267204833410906,
    0.08327674157670475,
    0.1019301198172404,
    0.1181945319615184,
    0.1316886384491766,
    0.1420961093183821,
    0.1491729864726037,
    0.1527533871307259,
];
const X20: [f64; 10] = [
    0.9931285991850949,
    0.9639719272779138,
    0.9122344282513259,
    0.8391169718222188,
    0.7463319064601508,
    0.6360536807265150,
    0.5108670019508271,
    0.3737060887154196,
    0.2277858511416451,
    0.07652652113349733,
];

fn rule(abs_r: f64) -> (&'static [f64], &'static [f64]) {
    if abs_r < 0.3 {
        (&W6, &X6)
    } else if abs_r < 0.75 {
        (&W12, &X12)
    } else {
        (&W20, &X20)
    }
}

/// P(X > dh, Y > dk) for standard bivariate normal (X, Y) with correlation `r`.
pub fn bvn_upper(dh: f64, dk: f64, r: f64) -> f64 {
    if dh == f64::INFINITY || dk == f64::INFINITY {
        return 0.0;
    }
    if dh == f64::NEG_INFINITY {
        return if dk == f64::NEG_INFINITY { 1.0 } else { norm_cdf(-dk) };
    }
    if dk == f64::NEG_INFINITY {
        return norm_cdf(-dh);
    }
    if r == 0.0 {
        return norm_cdf(-dh) * norm_cdf(-dk);
    }
    let tp = 2.0 * PI;
    let h = dh;
    let mut k = dk;
    let mut hk = h * k;
    let (w, x) = rule(r.abs());
    let mut bvn = 0.0;
    if r.abs() < 0.925 {
        let hs = (h * h + k * k) / 2.0;
        let asr = r.asin() / 2.0;
        for (wi, xi) in w.iter().zip(x) {
            for node in [1.0 - xi, 1.0 + xi] {
                let sn = (asr * node).sin();
                bvn += wi * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
            }
        }
        bvn = bvn * asr / tp + norm_cdf(-h) * norm_cdf(-k);
    } else {
        if r < 0.0 {
            k = -k;
            hk = -hk;
        }
        if r.abs() < 1.0 {
            let as_ = (1.0 - r) * (1.0 + r);
            let mut a = as_.sqrt();
            let bs = (h - k) * (h - k);
            let c = (4.0 - hk) / 8.0;
            let d = (12.0 - hk) / 80.0;
            let asr = -(bs / as_ + hk) / 2.0;
            if asr > -100.0 {
                bvn = a * asr.exp() * (1.0 - c * (bs - as_) * (1.0 - d * bs) / 3.0 + c * d * as_ * as_);
            }
            if hk > -100.0 {
                let b = bs.sqrt();
                let sp = tp.sqrt() * norm_cdf(-b / a);
                bvn -= (-hk / 2.0).exp() * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
            }
            a /= 2.0;
            let mut sum = 0.0;
            for (wi, xi) in w.iter().zip(x) {
                for node in [1.0 - xi, 1.0 + xi] {
                    let xs = (a * node).powi(2);
                    let asr = -(bs / xs + hk) / 2.0;
                    if asr > -100.0 {
                        let sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs);
                        let rs = (1.0 - xs).sqrt();
                        let ep = (-(hk / 2.0) * xs / (1.0 + rs).powi(2)).exp() / rs;
                        sum += wi * asr.exp() * (sp - ep);
                    }
                }
            }
            bvn = (a * sum - bvn) / tp;
        }
        if r > 0.0 {
            bvn += norm_cdf(-h.max(k));
        } else if h >= k {
            bvn = -bvn;
        } else {
            let lo = if h < 0.0 { norm_cdf(k) - norm_cdf(h) } else { norm_cdf(-h) - norm_cdf(-k) };
            bvn = lo - bvn;
        }
    }
    bvn.clamp(0.0, 1.0)
}

/// P(X <= h, Y <= k).
pub fn bvn_cdf(h: f64, k: f64, r: f64) -> f64 {
    bvn_upper(-h, -k, r)
}

/// P(a1 < X <= b1, a2 < Y <= b2); infinite limits are allowed.
pub fn bvn_rect(a1: f64, b1: f64, a2: f64, b2: f64, r: f64) -> f64 {
    let p = bvn_cdf(b1, b2, r) - bvn_cdf(a1, b2, r) - bvn_cdf(b1, a2, r) + bvn_cdf(a1, a2, r);
    p.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::norm_pdf;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// P(X <= h, Y <= k) = int_{-inf}^{h} pdf(x) cdf((k - r x)/sqrt(1 - r^2)) dx,
    /// composite Simpson on [-12, h].
    fn oracle(h: f64, k: f64, r: f64) -> f64 {
        let lo = -12.0;
        if h <= lo {
            return 0.0;
        }
        let n = 20_000;
        let step = (h - lo) / n as f64;
        let s = (1.0 - r * r).sqrt();
        let f = |x: f64| norm_pdf(x) * norm_cdf((k - r * x) / s);
        let mut acc = f(lo) + f(h);
        for i in 1..n {
            let x = lo + i as f64 * step;
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        acc * step / 3.0
    }

    #[test]
    fn independent_and_orthant_values() {
        assert_abs_diff_eq!(bvn_cdf(0.0, 0.0, 0.0), 0.25, epsilon = 1e-15);
        // P(X<=0, Y<=0) = 1/4 + asin(r)/(2 pi)
        for r in [-0.95, -0.5, 0.2, 0.6, 0.9, 0.99] {
            assert_abs_diff_eq!(bvn_cdf(0.0, 0.0, r), 0.25 + f64::asin(r) / (2.0 * PI), epsilon = 1e-14);
        }
    }

    #[test]
    fn agrees_with_quadrature_oracle() {
        for &(h, k) in &[(-1.0, 0.5), (0.3, 0.3), (1.2, -0.7), (-2.0, -1.5), (0.8, 2.1)] {
            for &r in &[-0.97, -0.8, -0.4, -0.1, 0.1, 0.36, 0.6, 0.8, 0.93, 0.99] {
                assert_abs_diff_eq!(bvn_cdf(h, k, r), oracle(h, k, r), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn infinite_limits() {
        assert_eq!(bvn_cdf(f64::INFINITY, f64::INFINITY, 0.3), 1.0);
        assert_abs_diff_eq!(bvn_cdf(0.7, f64::INFINITY, 0.3), norm_cdf(0.7), epsilon = 1e-15);
        assert_eq!(bvn_cdf(f64::NEG_INFINITY, 0.2, 0.3), 0.0);
    }

    proptest! {
        #[test]
        fn symmetric_in_arguments(h in -3.0..3.0f64, k in -3.0..3.0f64, r in -0.999..0.999f64) {
            prop_assert!((bvn_cdf(h, k, r) - bvn_cdf(k, h, r)).abs() < 1e-13);
        }

        #[test]
        fn bounded_by_frechet_limits(h in -3.0..3.0f64, k in -3.0..3.0f64, r in -0.999..0.999f64) {
            let p = bvn_cdf(h, k, r);
            let (a, b) = (norm_cdf(h), norm_cdf(k));
            prop_assert!(p <= a.min(b) + 1e-13);
            prop_assert!(p >= (a + b - 1.0).max(0.0) - 1e-13);
        }
    }
}
