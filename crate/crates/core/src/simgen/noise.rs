use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, LogNormal, StandardNormal, StudentT};

/// Non-Gaussian noise shapes. Every variant is shifted and scaled
/// analytically to mean 0 and variance 1 before the caller rescales it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseShape {
    Uniform,
    Exponential,
    Laplace,
    StudentT3,
    StudentT5,
    /// Equal-weight mixture of N(±0.9, 0.19): strongly bimodal.
    BimodalWide,
    /// Equal-weight mixture of N(±0.5, 0.75): flattened top.
    BimodalNarrow,
    /// 0.3 N(-2, 0.25) + 0.7 N(1, 0.25)
    SkewedMixture,
    /// 0.85 N(0, 0.3) + 0.15 N(3, 1): heavy right shoulder.
    ShoulderMixture,
    ChiSquared1,
    LogNormal,
    /// Laplace with an extra sign-dependent stretch. Skewed but sharp-peaked.
    AsymmetricLaplace,
}

impl NoiseShape {
    pub const ALL: [NoiseShape; 12] = [
        NoiseShape::Uniform,
        NoiseShape::Exponential,
        NoiseShape::Laplace,
        NoiseShape::StudentT3,
        NoiseShape::StudentT5,
        NoiseShape::BimodalWide,
        NoiseShape::BimodalNarrow,
        NoiseShape::SkewedMixture,
        NoiseShape::ShoulderMixture,
        NoiseShape::ChiSquared1,
        NoiseShape::LogNormal,
        NoiseShape::AsymmetricLaplace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NoiseShape::Uniform => "uniform",
            NoiseShape::Exponential => "exponential",
            NoiseShape::Laplace => "laplace",
            NoiseShape::StudentT3 => "student_t3",
            NoiseShape::StudentT5 => "student_t5",
            NoiseShape::BimodalWide => "bimodal_wide",
            NoiseShape::BimodalNarrow => "bimodal_narrow",
            NoiseShape::SkewedMixture => "skewed_mixture",
            NoiseShape::ShoulderMixture => "shoulder_mixture",
            NoiseShape::ChiSquared1 => "chi_squared1",
            NoiseShape::LogNormal => "lognormal",
            NoiseShape::AsymmetricLaplace => "asymmetric_laplace",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    /// One draw with mean 0 and variance 1.
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            NoiseShape::Uniform => (rng.random::<f64>() * 2.0 - 1.0) * 3f64.sqrt(),
            NoiseShape::Exponential => {
                let e: f64 = Exp1.sample(rng);
                e - 1.0
            }
            NoiseShape::Laplace => laplace(rng) / 2f64.sqrt(),
            NoiseShape::StudentT3 => t_draw(rng, 3.0) / 3f64.sqrt(),
            NoiseShape::StudentT5 => t_draw(rng, 5.0) / (5.0f64 / 3.0).sqrt(),
            NoiseShape::BimodalWide => mixture(rng, &[(0.5, -0.9, 0.19), (0.5, 0.9, 0.19)]),
            NoiseShape::BimodalNarrow => mixture(rng, &[(0.5, -0.5, 0.75), (0.5, 0.5, 0.75)]),
            NoiseShape::SkewedMixture => mixture(rng, &[(0.3, -2.0, 0.25), (0.7, 1.0, 0.25)]),
            NoiseShape::ShoulderMixture => mixture(rng, &[(0.85, 0.0, 0.3), (0.15, 3.0, 1.0)]),
            NoiseShape::ChiSquared1 => {
                let c: f64 = ChiSquared::new(1.0).expect("valid df").sample(rng);
                (c - 1.0) / 2f64.sqrt()
            }
            NoiseShape::LogNormal => {
                let s2: f64 = 0.25;
                let v: f64 = LogNormal::new(0.0, 0.5).expect("valid sigma").sample(rng);
                let mean = (s2 / 2.0).exp();
                let var = (s2.exp() - 1.0) * s2.exp();
                (v - mean) / var.sqrt()
            }
            NoiseShape::AsymmetricLaplace => {
                // positive side stretched by 2: mean 1/2, second moment 5
                let l = laplace(rng);
                let v = if l > 0.0 { 2.0 * l } else { l };
                let var: f64 = 5.0 - 0.25;
                (v - 0.5) / var.sqrt()
            }
        }
    }
}

/// Unit-scale Laplace (variance 2) by inverse CDF.
fn laplace<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u = rng.random::<f64>() - 0.5;
    -u.signum() * (1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE).ln()
}

fn t_draw<R: Rng + ?Sized>(rng: &mut R, df: f64) -> f64 {
    StudentT::new(df).expect("valid df").sample(rng)
}

/// Draw from a Gaussian mixture given `(weight, mean, variance)` components,
/// standardized with the mixture's exact moments.
fn mixture<R: Rng + ?Sized>(rng: &mut R, comps: &[(f64, f64, f64)]) -> f64 {
    let mean: f64 = comps.iter().map(|(w, m, _)| w * m).sum();
    let second: f64 = comps.iter().map(|(w, m, v)| w * (v + m * m)).sum();
    let sd = (second - mean * mean).sqrt();
    let u = rng.random::<f64>();
    let z: f64 = StandardNormal.sample(rng);
    let mut acc = 0.0;
    let mut pick = comps[comps.len() - 1];
    for &c in comps {
        acc += c.0;
        if u < acc {
            pick = c;
            break;
        }
    }
    (pick.1 + pick.2.sqrt() * z - mean) / sd
}
