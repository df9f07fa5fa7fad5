use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{HvError, Result};
use crate::space::{Bits, Components, Hypervector, RngStream, SpaceKind, SpaceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelScheme {
    /// Level i takes a prefix of the low endpoint and the rest of the high one.
    Concatenation,
    /// Each level flips a fresh disjoint subset of positions of the previous one.
    Flip,
}

impl std::str::FromStr for LevelScheme {
    type Err = HvError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "concatenation" | "concat" => Ok(LevelScheme::Concatenation),
            "flip" => Ok(LevelScheme::Flip),
            _ => Err(HvError::InvalidParameter(format!("unknown level scheme {s:?}"))),
        }
    }
}

/// Ordered, progressively correlated hypervectors for quantized scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelCodebook {
    space: SpaceSpec,
    scheme: LevelScheme,
    levels: Vec<Hypervector>,
    lo: f64,
    hi: f64,
    clamp: bool,
}

impl LevelCodebook {
    /// Builds `count` levels over the value range `[lo, hi]`.
    pub fn build(space: SpaceSpec, count: usize, scheme: LevelScheme, lo: f64, hi: f64, stream: &RngStream) -> Result<Self> {
        if count < 2 {
            return Err(HvError::InvalidParameter(format!("need at least 2 levels, got {count}")));
        }
        if count > space.dim {
            return Err(HvError::InvalidParameter(format!(
                "{count} levels cannot be told apart in dimension {}",
                space.dim
            )));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(HvError::InvalidParameter(format!("invalid value range [{lo}, {hi}]")));
        }
        let levels = match scheme {
            LevelScheme::Concatenation => concatenation(space, count, stream)?,
            LevelScheme::Flip => flip(space, count, stream)?,
        };
        Ok(Self {
            space,
            scheme,
            levels,
            lo,
            hi,
            clamp: false,
        })
    }

    /// Enables clamping of out-of-range values to the nearest endpoint.
    pub fn with_clamp(mut self, clamp: bool) -> Self {
        self.clamp = clamp;
        self
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn scheme(&self) -> LevelScheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn levels(&self) -> &[Hypervector] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> Result<&Hypervector> {
        self.levels.get(i).ok_or(HvError::OutOfRange {
            value: i as f64,
            lo: 0.0,
            hi: (self.levels.len() - 1) as f64,
        })
    }

    /// Quantization grade of `x`, rounding half up.
    pub fn grade(&self, x: f64) -> Result<usize> {
        if !x.is_finite() {
            return Err(HvError::NonFinite(format!("{x}")));
        }
        let x = if self.clamp {
            x.clamp(self.lo, self.hi)
        } else if x < self.lo || x > self.hi {
            return Err(HvError::OutOfRange {
                value: x,
                lo: self.lo,
                hi: self.hi,
            });
        } else {
            x
        };
        let top = (self.levels.len() - 1) as f64;
        let t = (x - self.lo) / (self.hi - self.lo) * top;
        Ok(((t + 0.5).floor()).min(top) as usize)
    }

    /// Hypervector of the grade that `x` quantizes to.
    pub fn encode(&self, x: f64) -> Result<&Hypervector> {
        Ok(&self.levels[self.grade(x)?])
    }
}

fn concatenation(space: SpaceSpec, count: usize, stream: &RngStream) -> Result<Vec<Hypervector>> {
    let lo = space.sample(&mut stream.derive("lo").rng());
    let hi = space.sample(&mut stream.derive("hi").rng());
    // split on block boundaries so block-sparse levels stay canonical
    let unit = space.block_size().unwrap_or(1);
    let units = space.dim / unit;
    let last = count - 1;
    Ok((0..count)
        .map(|i| {
            let k = ((units * (last - i)) as f64 / last as f64 + 0.5).floor() as usize * unit;
            splice(&lo, &hi, k)
        })
        .collect())
}

/// First `k` components from `a`, the rest from `b`.
fn splice(a: &Hypervector, b: &Hypervector, k: usize) -> Hypervector {
    let data = match (a.components(), b.components()) {
        (Components::Binary(x), Components::Binary(y)) => {
            Components::Binary(Bits::from_bools((0..x.len()).map(|i| if i < k { x.get(i) } else { y.get(i) })))
        }
        (Components::Real(x), Components::Real(y)) => Components::Real([&x[..k], &y[k..]].concat()),
        (Components::Complex(x), Components::Complex(y)) => Components::Complex([&x[..k], &y[k..]].concat()),
        (Components::Modular(x), Components::Modular(y)) => Components::Modular([&x[..k], &y[k..]].concat()),
        _ => unreachable!("endpoints share a space"),
    };
    Hypervector::from_parts(*a.space(), data)
}

fn flip(space: SpaceSpec, count: usize, stream: &RngStream) -> Result<Vec<Hypervector>> {
    if !matches!(space.kind, SpaceKind::DenseBinary | SpaceKind::Bipolar) {
        return Err(HvError::Unsupported {
            model: space.kind.name().into(),
            operation: "flip level scheme".into(),
        });
    }
    let d = space.dim;
    let per_grade = d.div_ceil(2 * (count - 1));
    let mut order: Vec<usize> = (0..d).collect();
    order.shuffle(&mut stream.derive("flips").rng());
    let mut current = space.sample(&mut stream.derive("lo").rng());
    let mut levels = Vec::with_capacity(count);
    levels.push(current.clone());
    for grade in 0..count - 1 {
        let start = (grade * per_grade).min(d);
        let end = (start + per_grade).min(d);
        for &i in &order[start..end] {
            match current.data_mut() {
                Components::Binary(b) => b.toggle(i),
                Components::Real(v) => v[i] = -v[i],
                _ => unreachable!("checked above"),
            }
        }
        levels.push(current.clone());
    }
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{similarity, Metric};

    fn stream(seed: u64) -> RngStream {
        RngStream::new(seed, "levels")
    }

    #[test]
    fn concatenation_endpoints_are_exact() {
        let space = SpaceSpec::bipolar(100).unwrap();
        let cb = LevelCodebook::build(space, 5, LevelScheme::Concatenation, 0.0, 1.0, &stream(1)).unwrap();
        let lo = space.sample(&mut stream(1).derive("lo").rng());
        let hi = space.sample(&mut stream(1).derive("hi").rng());
        assert_eq!(cb.level(0).unwrap(), &lo);
        assert_eq!(cb.level(4).unwrap(), &hi);
    }

    #[test]
    fn concatenation_similarity_decreases_linearly() {
        let space = SpaceSpec::bipolar(1000).unwrap();
        let cb = LevelCodebook::build(space, 11, LevelScheme::Concatenation, 0.0, 1.0, &stream(2)).unwrap();
        let base = similarity(Metric::Cosine, cb.level(0).unwrap(), cb.level(10).unwrap()).unwrap();
        for i in 0..11 {
            let s = similarity(Metric::Cosine, cb.level(0).unwrap(), cb.level(i).unwrap()).unwrap();
            let shared = 1.0 - i as f64 / 10.0;
            // the non-shared suffix contributes the endpoint cross-similarity
            let expect = shared + (1.0 - shared) * base;
            assert!((s - expect).abs() < 0.05, "level {i}: {s} vs {expect}");
            assert!((s - shared).abs() < 0.1);
        }
    }

    #[test]
    fn flip_distance_grows_with_grade_gap() {
        for seed in 0..100 {
            let space = SpaceSpec::dense_binary(512).unwrap();
            let cb = LevelCodebook::build(space, 9, LevelScheme::Flip, 0.0, 1.0, &stream(seed)).unwrap();
            let d: Vec<f64> = (0..9)
                .map(|i| similarity(Metric::Hamming, cb.level(0).unwrap(), cb.level(i).unwrap()).unwrap())
                .collect();
            assert!(d.windows(2).all(|w| w[0] < w[1]), "seed {seed}: {d:?}");
            assert!((d[8] - 0.5).abs() < 0.02);
        }
    }

    #[test]
    fn flip_works_for_bipolar() {
        let space = SpaceSpec::bipolar(400).unwrap();
        let cb = LevelCodebook::build(space, 5, LevelScheme::Flip, 0.0, 1.0, &stream(3)).unwrap();
        let s = similarity(Metric::Cosine, cb.level(0).unwrap(), cb.level(4).unwrap()).unwrap();
        assert!(s.abs() < 1e-12);
        assert!(LevelCodebook::build(SpaceSpec::real(10).unwrap(), 3, LevelScheme::Flip, 0.0, 1.0, &stream(3)).is_err());
    }

    #[test]
    fn quantizer_boundaries() {
        let space = SpaceSpec::dense_binary(64).unwrap();
        let cb = LevelCodebook::build(space, 3, LevelScheme::Flip, 0.0, 1.0, &stream(4)).unwrap();
        assert_eq!(cb.grade(0.0).unwrap(), 0);
        assert_eq!(cb.grade(1.0).unwrap(), 2);
        assert_eq!(cb.grade(0.5).unwrap(), 1);
        // grade boundaries sit at 0.25 and 0.75; half rounds up
        assert_eq!(cb.grade(0.25).unwrap(), 1);
        assert_eq!(cb.grade(0.2499).unwrap(), 0);
        assert_eq!(cb.grade(0.7501).unwrap(), 2);
        assert!(matches!(cb.grade(1.5), Err(HvError::OutOfRange { .. })));
        assert!(matches!(cb.grade(f64::NAN), Err(HvError::NonFinite(_))));
        let clamped = cb.clone().with_clamp(true);
        assert_eq!(clamped.grade(-3.0).unwrap(), 0);
        assert_eq!(clamped.encode(7.0).unwrap(), cb.level(2).unwrap());
    }

    #[test]
    fn invalid_level_counts() {
        let space = SpaceSpec::dense_binary(4).unwrap();
        assert!(LevelCodebook::build(space, 1, LevelScheme::Flip, 0.0, 1.0, &stream(5)).is_err());
        assert!(LevelCodebook::build(space, 5, LevelScheme::Flip, 0.0, 1.0, &stream(5)).is_err());
        assert!(LevelCodebook::build(space, 2, LevelScheme::Flip, 1.0, 1.0, &stream(5)).is_err());
    }

    #[test]
    fn block_sparse_levels_stay_canonical() {
        let space = SpaceSpec::block_sparse(64, 8).unwrap();
        let cb = LevelCodebook::build(space, 5, LevelScheme::Concatenation, 0.0, 1.0, &stream(6)).unwrap();
        assert!(cb.levels().iter().all(|l| l.block_indices().is_ok()));
    }
}
