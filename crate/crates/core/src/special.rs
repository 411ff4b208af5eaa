//! Modified Bessel function of the first kind, order zero (Chebyshev
//! expansions on [0, 8] and (8, inf) in the Cephes style), and the Rice density.

const I0_COEFFS_SMALL: [f64; 30] = [
    -4.415_341_646_479_339_5E-18,
    3.330_794_518_822_238_4E-17,
    -2.431_279_846_547_955E-16,
    1.715_391_285_555_133E-15,
    -1.168_533_287_799_345_1E-14,
    7.676_185_498_604_936E-14,
    -4.856_446_783_111_929E-13,
    2.955_052_663_129_64E-12,
    -1.726_826_291_441_556E-11,
    9.675_809_035_373_237E-11,
    -5.189_795_601_635_263E-10,
    2.659_823_724_682_386_6E-9,
    -1.300_025_009_986_248E-8,
    6.046_995_022_541_919E-8,
    -2.670_793_853_940_612E-7,
    1.117_387_539_120_103_7E-6,
    -4.416_738_358_458_750_5E-6,
    1.644_844_807_072_889_6E-5,
    -5.754_195_010_082_104E-5,
    1.885_028_850_958_416_5E-4,
    -5.763_755_745_385_824E-4,
    1.639_475_616_941_335_7E-3,
    -4.324_309_995_050_576E-3,
    1.054_646_039_459_499_8E-2,
    -2.373_741_480_589_947E-2,
    4.930_528_423_967_071E-2,
    -9.490_109_704_804_764E-2,
    1.716_209_015_222_087_7E-1,
    -3.046_826_723_431_984E-1,
    6.767_952_744_094_761E-1,
];

const I0_COEFFS_LARGE: [f64; 25] = [
    -7.233_180_487_874_754E-18,
    -4.830_504_485_944_182E-18,
    4.465_621_420_296_76E-17,
    3.461_222_867_697_461E-17,
    -2.827_623_980_516_583_6E-16,
    -3.425_485_619_677_219E-16,
    1.772_560_133_056_526_3E-15,
    3.811_680_669_352_622_4E-15,
    -9.554_846_698_828_307E-15,
    -4.150_569_347_287_222E-14,
    1.540_086_217_521_41E-14,
    3.852_778_382_742_142_6E-13,
    7.180_124_451_383_666E-13,
    -1.794_178_531_506_806_2E-12,
    -1.321_581_184_044_771_3E-11,
    -3.149_916_527_963_241_6E-11,
    1.188_914_710_784_643_9E-11,
    4.940_602_388_224_97E-10,
    3.396_232_025_708_386_5E-9,
    2.266_668_990_498_178E-8,
    2.048_918_589_469_063_8E-7,
    2.891_370_520_834_756_7E-6,
    6.889_758_346_916_825E-5,
    3.369_116_478_255_694_3E-3,
    8.044_904_110_141_088E-1,
];

fn chbevl(x: f64, coeffs: &[f64]) -> f64 {
    let mut b0 = coeffs[0];
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for c in &coeffs[1..] {
        b2 = b1;
        b1 = b0;
        b0 = x.mul_add(b1, *c) - b2;
    }
    0.5 * (b0 - b2)
}

/// `exp(-|x|) * I0(x)`. Finite for every finite `x`.
pub fn bessel_i0e(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 8.0 {
        chbevl(ax.mul_add(0.5, -2.0), &I0_COEFFS_SMALL)
    } else {
        chbevl(32.0_f64.mul_add(ax.recip(), -2.0), &I0_COEFFS_LARGE) / ax.sqrt()
    }
}

/// Modified Bessel function `I0(x)`; overflows past |x| ~ 713.
pub fn bessel_i0(x: f64) -> f64 {
    x.abs().exp() * bessel_i0e(x)
}

/// Rice density with noncentrality `nu` and scale `sigma`, evaluated at `z`.
pub fn rice_pdf(z: f64, nu: f64, sigma: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    rice_pdf_offset(z - nu, nu, sigma)
}

/// [`rice_pdf`] at `z = nu + d`, exact in `d` even when `nu + d` rounds to `nu`.
pub fn rice_pdf_offset(d: f64, nu: f64, sigma: f64) -> f64 {
    let z = nu + d;
    if z <= 0.0 {
        return 0.0;
    }
    let s2 = sigma * sigma;
    z / s2 * (-d * d / (2.0 * s2)).exp() * bessel_i0e(z * nu / s2)
}

/// Interval outside of which the Rice(nu, sigma) mass is below 1e-20.
pub fn rice_support(nu: f64, sigma: f64) -> (f64, f64) {
    ((nu - 10.0 * sigma).max(0.0), nu + 10.0 * sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series_i0(x: f64) -> f64 {
        // sum (x^2/4)^k / (k!)^2
        let q = x * x / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..200 {
            term *= q / (k as f64 * k as f64);
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        sum
    }

    #[test]
    fn matches_power_series() {
        for &x in &[0.0, 0.1, 0.5, 1.0, 2.5, 7.9, 8.1, 12.0, 20.0, 30.0] {
            let want = series_i0(x);
            let got = bessel_i0(x);
            assert!((got - want).abs() <= 1e-13 * want, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn scaled_large_argument() {
        // I0(x) e^{-x} ~ 1/sqrt(2 pi x) (1 + 1/(8x) + 9/(128 x^2))
        let x = 1.0e4;
        let asym = (1.0 + 1.0 / (8.0 * x) + 9.0 / (128.0 * x * x)) / (2.0 * std::f64::consts::PI * x).sqrt();
        assert!((bessel_i0e(x) - asym).abs() < 1e-12);
        assert!(bessel_i0e(1e300).is_finite());
    }

    #[test]
    fn even_function() {
        assert_eq!(bessel_i0e(-3.3), bessel_i0e(3.3));
    }

    #[test]
    fn rice_density_normalised() {
        for (nu, s) in [(0.0, 1.0), (1.3, 0.63), (20.0, 0.5)] {
            let (a, b) = rice_support(nu, s);
            let m = crate::quadrature::integrate(|z| rice_pdf(z, nu, s), a, b, &Default::default()).unwrap();
            assert!((m.value - 1.0).abs() < 1e-9, "nu={nu}");
        }
        // nu = 0 reduces to Rayleigh
        let z: f64 = 0.8;
        assert!((rice_pdf(z, 0.0, 1.0) - z * (-z * z / 2.0).exp()).abs() < 1e-15);
        assert_eq!(rice_pdf(-1.0, 1.0, 1.0), 0.0);
    }
}
