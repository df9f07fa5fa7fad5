//! Hypervector file formats.
//!
//! JSON: `{"space", "dimension", "parameters", "components"}` with binary
//! components as 0/1, phasors as radian angles (plus `"magnitudes"` when a
//! bundle is not unit-magnitude) and modular components as integers.
//!
//! Packed: little-endian `"HVEC"`, version byte, space tag byte, `u64` D,
//! `u64` space parameter, payload. Binary payloads are the packed bit words.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Bits, Components, Hypervector, SpaceKind, SpaceSpec};
use crate::error::{HvError, Result};

pub const PACKED_MAGIC: &[u8; 4] = b"HVEC";
pub const PACKED_VERSION: u8 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SpaceParameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComponentValues {
    Integers(Vec<i64>),
    Reals(Vec<f64>),
}

impl ComponentValues {
    fn reals(&self) -> Vec<f64> {
        match self {
            ComponentValues::Integers(v) => v.iter().map(|&x| x as f64).collect(),
            ComponentValues::Reals(v) => v.clone(),
        }
    }

    fn len(&self) -> usize {
        match self {
            ComponentValues::Integers(v) => v.len(),
            ComponentValues::Reals(v) => v.len(),
        }
    }
}

/// Serialized form of a [`Hypervector`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypervectorRecord {
    pub space: String,
    pub dimension: usize,
    #[serde(default)]
    pub parameters: SpaceParameters,
    pub components: ComponentValues,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub magnitudes: Option<Vec<f64>>,
}

impl From<Hypervector> for HypervectorRecord {
    fn from(hv: Hypervector) -> Self {
        let space = *hv.space();
        let mut parameters = SpaceParameters::default();
        match space.kind {
            SpaceKind::SparseBinary { density } => parameters.density = Some(density),
            SpaceKind::BlockSparse { block_size } => parameters.block_size = Some(block_size),
            SpaceKind::ModularInteger { range } => parameters.range = Some(range),
            _ => {}
        }
        let mut magnitudes = None;
        let components = match hv.components() {
            Components::Binary(b) => ComponentValues::Integers(b.iter().map(i64::from).collect()),
            Components::Real(v) => ComponentValues::Reals(v.clone()),
            Components::Complex(v) => {
                if v.iter().any(|z| (z.norm() - 1.0).abs() > 1e-12) {
                    magnitudes = Some(v.iter().map(|z| z.norm()).collect());
                }
                ComponentValues::Reals(hv.angles().expect("phasor"))
            }
            Components::Modular(v) => ComponentValues::Integers(v.iter().map(|&x| x as i64).collect()),
        };
        Self {
            space: space.kind.name().to_string(),
            dimension: space.dim,
            parameters,
            components,
            magnitudes,
        }
    }
}

fn missing(param: &str, space: &str) -> HvError {
    HvError::Format(format!("{space} space requires parameter {param:?}"))
}

impl TryFrom<HypervectorRecord> for Hypervector {
    type Error = HvError;

    fn try_from(rec: HypervectorRecord) -> Result<Self> {
        let p = &rec.parameters;
        let kind = match rec.space.as_str() {
            "dense-binary" => SpaceKind::DenseBinary,
            "bipolar" => SpaceKind::Bipolar,
            "real" => SpaceKind::Real,
            "phasor" => SpaceKind::Phasor,
            "sparse-binary" => SpaceKind::SparseBinary {
                density: p.density.ok_or_else(|| missing("density", &rec.space))?,
            },
            "block-sparse" => SpaceKind::BlockSparse {
                block_size: p.block_size.ok_or_else(|| missing("block_size", &rec.space))?,
            },
            "modular-integer" => SpaceKind::ModularInteger {
                range: p.range.ok_or_else(|| missing("range", &rec.space))?,
            },
            other => return Err(HvError::Format(format!("unknown space {other:?}"))),
        };
        let space = SpaceSpec::new(kind, rec.dimension)?;
        if rec.components.len() != space.dim {
            return Err(HvError::DimensionMismatch {
                left: space.dim,
                right: rec.components.len(),
            });
        }
        let data = match kind {
            SpaceKind::DenseBinary | SpaceKind::SparseBinary { .. } => {
                let ComponentValues::Integers(v) = &rec.components else {
                    return Err(HvError::Format("binary components must be 0/1 integers".into()));
                };
                if v.iter().any(|&x| x != 0 && x != 1) {
                    return Err(HvError::Format("binary components must be 0/1 integers".into()));
                }
                Components::Binary(Bits::from_bools(v.iter().map(|&x| x == 1)))
            }
            SpaceKind::Bipolar | SpaceKind::Real | SpaceKind::BlockSparse { .. } => Components::Real(rec.components.reals()),
            SpaceKind::Phasor => {
                let angles = rec.components.reals();
                let mags = match rec.magnitudes {
                    Some(m) if m.len() != angles.len() => {
                        return Err(HvError::LengthMismatch {
                            expected: angles.len(),
                            found: m.len(),
                        })
                    }
                    Some(m) => m,
                    None => vec![1.0; angles.len()],
                };
                Components::Complex(angles.iter().zip(&mags).map(|(&a, &r)| Complex64::from_polar(r, a)).collect())
            }
            SpaceKind::ModularInteger { .. } => {
                let ComponentValues::Integers(v) = &rec.components else {
                    return Err(HvError::Format("modular components must be integers".into()));
                };
                let values = v
                    .iter()
                    .map(|&x| u32::try_from(x).map_err(|_| HvError::Format(format!("component {x}"))))
                    .collect::<Result<Vec<_>>>()?;
                Components::Modular(values)
            }
        };
        Hypervector::new(space, data)
    }
}

fn space_tag(kind: &SpaceKind) -> (u8, u64) {
    match *kind {
        SpaceKind::DenseBinary => (0, 0),
        SpaceKind::Bipolar => (1, 0),
        SpaceKind::Real => (2, 0),
        SpaceKind::Phasor => (3, 0),
        SpaceKind::SparseBinary { density } => (4, density.to_bits()),
        SpaceKind::BlockSparse { block_size } => (5, block_size as u64),
        SpaceKind::ModularInteger { range } => (6, range as u64),
    }
}

/// Encodes a hypervector in the packed little-endian format.
pub fn to_packed(hv: &Hypervector) -> Vec<u8> {
    let (tag, param) = space_tag(&hv.space().kind);
    let mut out = Vec::with_capacity(22 + hv.dim() * 8);
    out.extend_from_slice(PACKED_MAGIC);
    out.push(PACKED_VERSION);
    out.push(tag);
    out.extend_from_slice(&(hv.dim() as u64).to_le_bytes());
    out.extend_from_slice(&param.to_le_bytes());
    match hv.components() {
        Components::Binary(b) => b.words().iter().for_each(|w| out.extend_from_slice(&w.to_le_bytes())),
        Components::Real(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        Components::Complex(v) => v.iter().for_each(|z| {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }),
        Components::Modular(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
    }
    out
}

/// Decodes the packed format written by [`to_packed`].
pub fn from_packed(bytes: &[u8]) -> Result<Hypervector> {
    let fail = |msg: &str| HvError::Format(format!("packed hypervector: {msg}"));
    if bytes.len() < 22 || &bytes[..4] != PACKED_MAGIC {
        return Err(fail("bad magic or truncated header"));
    }
    if bytes[4] != PACKED_VERSION {
        return Err(fail(&format!("unsupported version {}", bytes[4])));
    }
    let tag = bytes[5];
    let dim = u64::from_le_bytes(bytes[6..14].try_into().unwrap()) as usize;
    let param = u64::from_le_bytes(bytes[14..22].try_into().unwrap());
    let kind = match tag {
        0 => SpaceKind::DenseBinary,
        1 => SpaceKind::Bipolar,
        2 => SpaceKind::Real,
        3 => SpaceKind::Phasor,
        4 => SpaceKind::SparseBinary {
            density: f64::from_bits(param),
        },
        5 => SpaceKind::BlockSparse {
            block_size: param as usize,
        },
        6 => SpaceKind::ModularInteger { range: param as u32 },
        t => return Err(fail(&format!("unknown space tag {t}"))),
    };
    let space = SpaceSpec::new(kind, dim)?;
    let payload = &bytes[22..];
    let width = match space.storage() {
        super::Storage::Binary => 8 * dim.div_ceil(64),
        super::Storage::Real => 8 * dim,
        super::Storage::Complex => 16 * dim,
        super::Storage::Modular => 4 * dim,
    };
    if payload.len() != width {
        return Err(fail(&format!("payload is {} bytes, expected {width}", payload.len())));
    }
    let f64s = || payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    let data = match space.storage() {
        super::Storage::Binary => Components::Binary(Bits::from_words(
            payload.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect(),
            dim,
        )),
        super::Storage::Real => Components::Real(f64s().collect()),
        super::Storage::Complex => {
            let flat: Vec<f64> = f64s().collect();
            Components::Complex(flat.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect())
        }
        super::Storage::Modular => {
            Components::Modular(payload.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect())
        }
    };
    Hypervector::new(space, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::RngStream;
    use proptest::prelude::*;

    fn spaces() -> Vec<SpaceSpec> {
        vec![
            SpaceSpec::dense_binary(70).unwrap(),
            SpaceSpec::bipolar(33).unwrap(),
            SpaceSpec::real(17).unwrap(),
            SpaceSpec::phasor(9).unwrap(),
            SpaceSpec::sparse_binary(200, 0.05).unwrap(),
            SpaceSpec::block_sparse(24, 6).unwrap(),
            SpaceSpec::modular(12, 7).unwrap(),
        ]
    }

    #[test]
    fn json_shape() {
        let hv = Hypervector::from_binary(SpaceSpec::dense_binary(4).unwrap(), &[0, 1, 1, 0]).unwrap();
        let json = serde_json::to_value(&hv).unwrap();
        assert_eq!(json["space"], "dense-binary");
        assert_eq!(json["dimension"], 4);
        assert_eq!(json["components"], serde_json::json!([0, 1, 1, 0]));
    }

    #[test]
    fn rejects_bad_records() {
        let bad = r#"{"space":"dense-binary","dimension":2,"components":[0,2]}"#;
        assert!(serde_json::from_str::<Hypervector>(bad).is_err());
        let short = r#"{"space":"real","dimension":3,"components":[0.5,1.5]}"#;
        assert!(serde_json::from_str::<Hypervector>(short).is_err());
        let noparam = r#"{"space":"modular-integer","dimension":1,"components":[0]}"#;
        assert!(serde_json::from_str::<Hypervector>(noparam).is_err());
        assert!(from_packed(b"HVEX\x01\x00").is_err());
    }

    #[test]
    fn phasor_bundle_keeps_magnitudes() {
        let space = SpaceSpec::phasor(2).unwrap();
        let hv = Hypervector::from_complex(space, vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.5)]).unwrap();
        let back: Hypervector = serde_json::from_str(&serde_json::to_string(&hv).unwrap()).unwrap();
        for (a, b) in hv.as_complex().unwrap().iter().zip(back.as_complex().unwrap()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn formats_round_trip(seed in any::<u64>(), which in 0usize..7) {
            let space = spaces()[which];
            let hv = space.sample(&mut RngStream::new(seed, "serial").rng());
            let packed = from_packed(&to_packed(&hv)).unwrap();
            prop_assert_eq!(&packed, &hv);
            let json: Hypervector = serde_json::from_str(&serde_json::to_string(&hv).unwrap()).unwrap();
            prop_assert_eq!(json.space(), hv.space());
            match (json.components(), hv.components()) {
                (Components::Complex(a), Components::Complex(b)) => {
                    for (x, y) in a.iter().zip(b) {
                        prop_assert!((x - y).norm() < 1e-9);
                    }
                }
                (a, b) => prop_assert_eq!(a, b),
            }
        }
    }
}
