use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{HvError, Result};
use crate::model::conv::inverse_spectrum;
use crate::space::{Components, Hypervector, RngStream, SpaceKind, SpaceSpec};

/// Base of a fractional power encoding z(x) = z^{βx}.
///
/// Phasor bases exponentiate component angles directly. Real bases live in
/// the frequency domain: a unit-magnitude, conjugate-symmetric spectrum whose
/// phases are scaled and transformed back, so every power stays real and
/// binding by circular convolution adds exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct FpeBase {
    space: SpaceSpec,
    /// Component angles (phasor) or spectrum phases (real).
    angles: Vec<f64>,
    beta: f64,
}

impl FpeBase {
    pub fn new(space: SpaceSpec, beta: f64, stream: &RngStream) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(HvError::InvalidParameter(format!("bandwidth must be positive, got {beta}")));
        }
        let d = space.dim;
        let mut rng = stream.rng();
        let angles = match space.kind {
            SpaceKind::Phasor => (0..d).map(|_| TAU * (1.0 - rng.random::<f64>())).collect(),
            SpaceKind::Real => {
                let mut a = vec![0.0; d];
                // DC and (for even D) Nyquist bins stay at phase 0 to keep the signal real
                for k in 1..d.div_ceil(2) {
                    let phi = rng.random_range(-PI..PI);
                    a[k] = phi;
                    a[d - k] = -phi;
                }
                a
            }
            _ => {
                return Err(HvError::Unsupported {
                    model: space.kind.name().into(),
                    operation: "fractional power encoding".into(),
                })
            }
        };
        Ok(Self { space, angles, beta })
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The base vector itself, z = z(1/β).
    pub fn base(&self) -> Hypervector {
        self.power(1.0)
    }

    /// z^{βx}.
    pub fn encode(&self, x: f64) -> Result<Hypervector> {
        if !x.is_finite() {
            return Err(HvError::NonFinite(format!("{x}")));
        }
        Ok(self.power(self.beta * x))
    }

    fn power(&self, e: f64) -> Hypervector {
        let data = match self.space.kind {
            SpaceKind::Phasor => Components::Complex(self.angles.iter().map(|&a| Complex64::from_polar(1.0, a * e)).collect()),
            _ => {
                let spec = self.angles.iter().map(|&a| Complex64::from_polar(1.0, a * e)).collect();
                Components::Real(inverse_spectrum(spec))
            }
        };
        Hypervector::from_parts(self.space, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Model, ModelKind, ModelParams};
    use crate::space::{similarity, Metric};

    fn model(kind: ModelKind, d: usize) -> Model {
        Model::new(kind, ModelParams::with_dim(d), &RngStream::new(1, "m")).unwrap()
    }

    fn max_diff(a: &Hypervector, b: &Hypervector) -> f64 {
        match (a.components(), b.components()) {
            (Components::Complex(x), Components::Complex(y)) => x.iter().zip(y).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max),
            (Components::Real(x), Components::Real(y)) => x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max),
            _ => panic!("unexpected storage"),
        }
    }

    #[test]
    fn zero_is_identity() {
        for kind in [ModelKind::Fhrr, ModelKind::Hrr] {
            let m = model(kind, 128);
            let z = FpeBase::new(*m.space(), 1.0, &RngStream::new(2, "z")).unwrap();
            assert!(max_diff(&z.encode(0.0).unwrap(), &m.identity().unwrap()) < 1e-12);
        }
    }

    #[test]
    fn exponents_add_under_binding() {
        for kind in [ModelKind::Fhrr, ModelKind::Hrr] {
            for d in [64, 257, 1024] {
                let m = model(kind, d);
                let z = FpeBase::new(*m.space(), 0.7, &RngStream::new(3, "z")).unwrap();
                let (x, y) = (1.3, -2.45);
                let lhs = m.bind(&z.encode(x).unwrap(), &z.encode(y).unwrap()).unwrap();
                assert!(max_diff(&lhs, &z.encode(x + y).unwrap()) < 1e-9, "{kind} D={d}");
            }
        }
    }

    #[test]
    fn real_powers_are_unit_norm() {
        let z = FpeBase::new(SpaceSpec::real(100).unwrap(), 1.0, &RngStream::new(4, "z")).unwrap();
        for x in [0.0, 0.5, 3.7] {
            assert!((z.encode(x).unwrap().norm_sqr() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn kernel_is_translation_invariant() {
        let space = SpaceSpec::phasor(4096).unwrap();
        let z = FpeBase::new(space, 1.0, &RngStream::new(5, "z")).unwrap();
        let mut rng = RngStream::new(5, "offsets").rng();
        for _ in 0..100 {
            let delta: f64 = rng.random_range(0.0..3.0);
            let x: f64 = rng.random_range(-10.0..10.0);
            let y: f64 = rng.random_range(-10.0..10.0);
            let k1 = similarity(Metric::Cosine, &z.encode(x).unwrap(), &z.encode(x + delta).unwrap()).unwrap();
            let k2 = similarity(Metric::Cosine, &z.encode(y).unwrap(), &z.encode(y + delta).unwrap()).unwrap();
            assert!((k1 - k2).abs() < 0.02, "{delta}: {k1} vs {k2}");
        }
    }

    #[test]
    fn rejects_unsupported_inputs() {
        assert!(FpeBase::new(SpaceSpec::bipolar(8).unwrap(), 1.0, &RngStream::new(6, "z")).is_err());
        assert!(FpeBase::new(SpaceSpec::phasor(8).unwrap(), 0.0, &RngStream::new(6, "z")).is_err());
        let z = FpeBase::new(SpaceSpec::phasor(8).unwrap(), 1.0, &RngStream::new(6, "z")).unwrap();
        assert!(matches!(z.encode(f64::INFINITY), Err(HvError::NonFinite(_))));
    }
}
