//! Fully symmetric, positive-weight quadrature on the reference triangle
//! `(0,0), (1,0), (0,1)`.
//!
//! Orbit parameters follow the Dunavant tables, re-polished to full double
//! precision against the moment equations. Degrees 3 and 7 have no
//! positive-weight Dunavant rule and are served by the degree-4 and degree-8
//! rules.

use crate::error::{Error, Result};

/// Highest polynomial degree a tabulated rule integrates exactly.
pub const MAX_DEGREE: usize = 9;

/// Quadrature degree used for every assembled form and discrete norm.
///
/// The largest integrand in the scheme is the momentum convection term
/// `λσ²·(u·∇φ_j)·φ_i` and its divergence companion, of total degree 9 on P2.
pub const ASSEMBLY_DEGREE: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    degree: usize,
    /// Barycentric coordinates `(λ0, λ1, λ2)`.
    points: Vec<[f64; 3]>,
    /// Weights summing to the reference area 1/2.
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Integrates `f(x̂, ŷ)` over the reference triangle.
    pub fn integrate_reference(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(l, w)| w * f(l[1], l[2]))
            .sum()
    }
}

enum Orbit {
    Centroid(f64),
    /// `(a, a, 1-2a)` and its permutations.
    S21(f64, f64),
    /// All six permutations of `(a, b, 1-a-b)`.
    S111(f64, f64, f64),
}

const RULE1: &[Orbit] = &[Orbit::Centroid(1.0)];

const RULE2: &[Orbit] = &[Orbit::S21(1.0 / 6.0, 1.0 / 3.0)];

const RULE4: &[Orbit] = &[
    Orbit::S21(0.445_948_490_915_964_886_32, 0.223_381_589_678_011_465_7),
    Orbit::S21(0.091_576_213_509_770_743_46, 0.109_951_743_655_321_867_64),
];

const RULE5: &[Orbit] = &[
    Orbit::Centroid(0.225),
    Orbit::S21(0.470_142_064_105_115_089_77, 0.132_394_152_788_506_180_74),
    Orbit::S21(0.101_286_507_323_456_338_8, 0.125_939_180_544_827_152_6),
];

const RULE6: &[Orbit] = &[
    Orbit::S21(0.249_286_745_170_910_421_29, 0.116_786_275_726_379_366_03),
    Orbit::S21(0.063_089_014_491_502_228_34, 0.050_844_906_370_206_816_921),
    Orbit::S111(
        0.053_145_049_844_816_947_353,
        0.310_352_451_033_784_405_42,
        0.082_851_075_618_373_575_194,
    ),
];

const RULE8: &[Orbit] = &[
    Orbit::Centroid(0.144_315_607_677_787_168_25),
    Orbit::S21(0.459_292_588_292_723_156_03, 0.095_091_634_267_284_624_794),
    Orbit::S21(0.170_569_307_751_760_206_62, 0.103_217_370_534_718_250_28),
    Orbit::S21(0.050_547_228_317_030_975_458, 0.032_458_497_623_198_080_311),
    Orbit::S111(
        0.008_394_777_409_957_605_337_2,
        0.263_112_829_634_638_113_42,
        0.027_230_314_174_434_994_265,
    ),
];

const RULE9: &[Orbit] = &[
    Orbit::Centroid(0.097_135_796_282_798_833_819),
    Orbit::S21(0.489_682_519_198_737_627_78, 0.031_334_700_227_139_070_537),
    Orbit::S21(0.437_089_591_492_936_637_27, 0.077_827_541_004_774_279_317),
    Orbit::S21(0.188_203_535_619_032_730_24, 0.079_647_738_927_210_253_033),
    Orbit::S21(0.044_729_513_394_452_709_865, 0.025_577_675_658_698_031_262),
    Orbit::S111(
        0.036_838_412_054_736_283_635,
        0.221_962_989_160_765_695_68,
        0.043_283_539_377_289_377_289,
    ),
];

pub fn quadrature_rule(degree: usize) -> Result<QuadratureRule> {
    let table = match degree {
        1 => RULE1,
        2 => RULE2,
        3 | 4 => RULE4,
        5 => RULE5,
        6 => RULE6,
        7 | 8 => RULE8,
        9 => RULE9,
        _ => return Err(Error::UnsupportedDegree(degree)),
    };
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for orbit in table {
        match *orbit {
            Orbit::Centroid(w) => {
                points.push([1.0 / 3.0; 3]);
                weights.push(0.5 * w);
            }
            Orbit::S21(a, w) => {
                let b = 1.0 - 2.0 * a;
                for p in [[a, a, b], [a, b, a], [b, a, a]] {
                    points.push(p);
                    weights.push(0.5 * w);
                }
            }
            Orbit::S111(a, b, w) => {
                let c = 1.0 - a - b;
                for p in [[a, b, c], [b, c, a], [c, a, b], [b, a, c], [a, c, b], [c, b, a]] {
                    points.push(p);
                    weights.push(0.5 * w);
                }
            }
        }
    }
    Ok(QuadratureRule {
        degree,
        points,
        weights,
    })
}
