use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Components, Hypervector};
use crate::error::{HvError, Result};

/// Similarity and distance measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// Euclidean distance.
    Euclidean,
    /// Inner product; the real part of the Hermitian product for phasors.
    Dot,
    /// Cosine similarity.
    Cosine,
    /// Normalized Hamming distance |a xor b| / D.
    Hamming,
    /// |a and b| / |a or b|.
    Jaccard,
    /// Sum over components of min((a - b) mod r, (b - a) mod r).
    McrManhattan,
    /// Mean of cos(angle(a_i) - angle(b_i)); modular integers are read as
    /// angles 2πk/r.
    PhasorCos,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::Euclidean,
        Metric::Dot,
        Metric::Cosine,
        Metric::Hamming,
        Metric::Jaccard,
        Metric::McrManhattan,
        Metric::PhasorCos,
    ];

    /// Distances rank smaller-is-better.
    pub fn is_distance(self) -> bool {
        matches!(self, Metric::Euclidean | Metric::Hamming | Metric::McrManhattan)
    }

    /// True when `candidate` strictly beats `incumbent`.
    pub fn better(self, candidate: f64, incumbent: f64) -> bool {
        if self.is_distance() {
            candidate < incumbent
        } else {
            candidate > incumbent
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::Dot => "dot",
            Metric::Cosine => "cosine",
            Metric::Hamming => "hamming",
            Metric::Jaccard => "jaccard",
            Metric::McrManhattan => "mcr-manhattan",
            Metric::PhasorCos => "phasor-cos",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = HvError;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| HvError::InvalidParameter(format!("unknown metric {s:?}")))
    }
}

fn mismatch(metric: Metric, a: &Hypervector) -> HvError {
    HvError::MetricMismatch {
        metric: metric.name().into(),
        space: a.space().kind.name().into(),
    }
}

/// Evaluates `metric` between two hypervectors of the same space.
pub fn similarity(metric: Metric, a: &Hypervector, b: &Hypervector) -> Result<f64> {
    a.check_same_space(b)?;
    let d = a.dim() as f64;
    match (metric, a.components(), b.components()) {
        (Metric::Hamming, Components::Binary(x), Components::Binary(y)) => Ok(x.hamming(y) as f64 / d),
        (Metric::Jaccard, Components::Binary(x), Components::Binary(y)) => {
            let union = x.or_count(y);
            if union == 0 {
                return Err(HvError::JaccardUndefined);
            }
            Ok(x.and_count(y) as f64 / union as f64)
        }
        (Metric::Dot, _, _) => dot(a, b).ok_or_else(|| mismatch(metric, a)),
        (Metric::Cosine, _, _) => {
            let ab = dot(a, b).ok_or_else(|| mismatch(metric, a))?;
            let denom = (a.norm_sqr() * b.norm_sqr()).sqrt();
            Ok(if denom == 0.0 { 0.0 } else { ab / denom })
        }
        (Metric::Euclidean, Components::Binary(x), Components::Binary(y)) => Ok((x.hamming(y) as f64).sqrt()),
        (Metric::Euclidean, Components::Real(x), Components::Real(y)) => {
            Ok(x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt())
        }
        (Metric::Euclidean, Components::Complex(x), Components::Complex(y)) => {
            Ok(x.iter().zip(y).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt())
        }
        (Metric::McrManhattan, Components::Modular(x), Components::Modular(y)) => {
            let r = a.space().modular_range().expect("modular space");
            Ok(x.iter()
                .zip(y)
                .map(|(&p, &q)| {
                    let fwd = (p + r - q) % r;
                    let bwd = (q + r - p) % r;
                    fwd.min(bwd) as f64
                })
                .sum())
        }
        (Metric::PhasorCos, Components::Complex(x), Components::Complex(y)) => {
            Ok(x.iter().zip(y).map(|(p, q)| (p.arg() - q.arg()).cos()).sum::<f64>() / d)
        }
        (Metric::PhasorCos, Components::Modular(x), Components::Modular(y)) => {
            let r = a.space().modular_range().expect("modular space") as f64;
            Ok(x.iter().zip(y).map(|(&p, &q)| (TAU * (p as f64 - q as f64) / r).cos()).sum::<f64>() / d)
        }
        _ => Err(mismatch(metric, a)),
    }
}

fn dot(a: &Hypervector, b: &Hypervector) -> Option<f64> {
    match (a.components(), b.components()) {
        (Components::Binary(x), Components::Binary(y)) => Some(x.and_count(y) as f64),
        (Components::Real(x), Components::Real(y)) => Some(x.iter().zip(y).map(|(p, q)| p * q).sum()),
        (Components::Complex(x), Components::Complex(y)) => Some(x.iter().zip(y).map(|(p, q)| (p * q.conj()).re).sum()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{RngStream, SpaceSpec};

    fn bin(v: &[u8]) -> Hypervector {
        Hypervector::from_binary(SpaceSpec::dense_binary(v.len()).unwrap(), v).unwrap()
    }

    #[test]
    fn hamming_counts_differences() {
        let a = bin(&[0, 1, 0, 1]);
        let b = bin(&[1, 1, 0, 0]);
        assert_eq!(similarity(Metric::Hamming, &a, &b).unwrap(), 0.5);
        assert_eq!(similarity(Metric::Hamming, &a, &a).unwrap(), 0.0);
    }

    #[test]
    fn jaccard_and_its_degenerate_case() {
        let a = bin(&[1, 1, 0, 0]);
        let b = bin(&[0, 1, 1, 0]);
        assert!((similarity(Metric::Jaccard, &a, &b).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let z = bin(&[0, 0, 0, 0]);
        assert_eq!(similarity(Metric::Jaccard, &z, &z), Err(HvError::JaccardUndefined));
    }

    #[test]
    fn mcr_manhattan_wraps() {
        let space = SpaceSpec::modular(3, 8).unwrap();
        let a = Hypervector::from_modular(space, vec![0, 1, 7]).unwrap();
        let b = Hypervector::from_modular(space, vec![7, 5, 7]).unwrap();
        // distances 1, 4, 0
        assert_eq!(similarity(Metric::McrManhattan, &a, &b).unwrap(), 5.0);
        assert_eq!(similarity(Metric::McrManhattan, &a, &a).unwrap(), 0.0);
    }

    #[test]
    fn phasor_cos_is_mean_cos_of_angle_difference() {
        let space = SpaceSpec::phasor(2).unwrap();
        let a = Hypervector::from_angles(space, &[0.5, 1.0]).unwrap();
        let b = Hypervector::from_angles(space, &[0.5, 1.0 + std::f64::consts::PI]).unwrap();
        assert!(similarity(Metric::PhasorCos, &a, &b).unwrap().abs() < 1e-12);
        assert!((similarity(Metric::PhasorCos, &a, &a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn metric_space_mismatches_error() {
        let real = SpaceSpec::real(4).unwrap().sample(&mut RngStream::new(1, "m").rng());
        assert!(matches!(
            similarity(Metric::Hamming, &real, &real),
            Err(HvError::MetricMismatch { .. })
        ));
        let a = bin(&[0, 1]);
        let b = bin(&[0, 1, 1]);
        assert!(matches!(
            similarity(Metric::Hamming, &a, &b),
            Err(HvError::DimensionMismatch { .. })
        ));
        let md = SpaceSpec::modular(4, 4).unwrap().sample(&mut RngStream::new(1, "m").rng());
        assert!(similarity(Metric::Dot, &md, &md).is_err());
    }

    #[test]
    fn self_similarity() {
        let mut rng = RngStream::new(2, "self").rng();
        let a = SpaceSpec::bipolar(128).unwrap().sample(&mut rng);
        assert!((similarity(Metric::Cosine, &a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(similarity(Metric::Euclidean, &a, &a).unwrap(), 0.0);
    }

    #[test]
    fn metric_names_round_trip() {
        for m in Metric::ALL {
            assert_eq!(m.name().parse::<Metric>().unwrap(), m);
        }
    }
}
