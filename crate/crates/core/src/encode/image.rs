use crate::error::{HvError, Result};
use crate::model::{Model, Permutation, PermutationSpec};
use crate::space::{Hypervector, RngStream};

use super::fpe::FpeBase;
use super::levels::{LevelCodebook, LevelScheme};

/// Row-major grid of pixel values.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(HvError::EmptyInput);
        }
        if pixels.len() != width * height {
            return Err(HvError::LengthMismatch {
                expected: width * height,
                found: pixels.len(),
            });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }
}

/// Position vectors for role-filler image encoding.
#[derive(Debug, Clone, PartialEq)]
pub enum PositionCoding {
    /// An independent vector per pixel position.
    Unique(Vec<Hypervector>),
    /// bind(x level, y level) with level codebooks over the two axes, so
    /// neighbouring positions are similar.
    Correlated { x: LevelCodebook, y: LevelCodebook },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ImageMode {
    /// ρx^x(ρy^y(value)).
    Permutation { x: PermutationSpec, y: PermutationSpec },
    /// bind(position, value).
    RoleFiller(PositionCoding),
    /// bind(X^x ∘ Y^y, value).
    Fpe { x: FpeBase, y: FpeBase },
}

/// Encodes images up to a fixed size as the superposition of their pixels.
#[derive(Debug, Clone)]
pub struct ImageEncoder<'a> {
    model: &'a Model,
    values: LevelCodebook,
    mode: ImageMode,
    max_width: usize,
    max_height: usize,
}

impl<'a> ImageEncoder<'a> {
    pub fn new(model: &'a Model, values: LevelCodebook, mode: ImageMode, max_width: usize, max_height: usize) -> Result<Self> {
        if values.space() != model.space() {
            return Err(HvError::SpaceMismatch {
                expected: model.space().to_string(),
                found: values.space().to_string(),
            });
        }
        if max_width == 0 || max_height == 0 {
            return Err(HvError::InvalidParameter("image bounds must be positive".into()));
        }
        Ok(Self {
            model,
            values,
            mode,
            max_width,
            max_height,
        })
    }

    /// Two independent random permutations for the axes.
    pub fn permutation(model: &'a Model, values: LevelCodebook, max_width: usize, max_height: usize, stream: &RngStream) -> Result<Self> {
        let d = model.dim();
        let x = PermutationSpec::new(Permutation::random(d, &mut stream.derive("x").rng()), 1);
        let y = PermutationSpec::new(Permutation::random(d, &mut stream.derive("y").rng()), 1);
        Self::new(model, values, ImageMode::Permutation { x, y }, max_width, max_height)
    }

    pub fn role_filler_unique(
        model: &'a Model,
        values: LevelCodebook,
        max_width: usize,
        max_height: usize,
        stream: &RngStream,
    ) -> Result<Self> {
        let positions = (0..max_width * max_height).map(|i| model.random(&stream.at(i as u64))).collect();
        Self::new(
            model,
            values,
            ImageMode::RoleFiller(PositionCoding::Unique(positions)),
            max_width,
            max_height,
        )
    }

    pub fn role_filler_correlated(
        model: &'a Model,
        values: LevelCodebook,
        max_width: usize,
        max_height: usize,
        stream: &RngStream,
    ) -> Result<Self> {
        let axis = |n: usize, label: &str| {
            let levels = n.max(2);
            LevelCodebook::build(
                *model.space(),
                levels,
                LevelScheme::Concatenation,
                0.0,
                (levels - 1) as f64,
                &stream.derive(label),
            )
        };
        let coding = PositionCoding::Correlated {
            x: axis(max_width, "x")?,
            y: axis(max_height, "y")?,
        };
        Self::new(model, values, ImageMode::RoleFiller(coding), max_width, max_height)
    }

    pub fn fpe(
        model: &'a Model,
        values: LevelCodebook,
        max_width: usize,
        max_height: usize,
        beta: f64,
        stream: &RngStream,
    ) -> Result<Self> {
        let x = FpeBase::new(*model.space(), beta, &stream.derive("x"))?;
        let y = FpeBase::new(*model.space(), beta, &stream.derive("y"))?;
        Self::new(model, values, ImageMode::Fpe { x, y }, max_width, max_height)
    }

    pub fn mode(&self) -> &ImageMode {
        &self.mode
    }

    fn pixel(&self, x: usize, y: usize, value: &Hypervector) -> Result<Hypervector> {
        let m = self.model;
        match &self.mode {
            ImageMode::Permutation { x: px, y: py } => {
                let shifted = m.permute(value, &py.pow(y as i64))?;
                m.permute(&shifted, &px.pow(x as i64))
            }
            ImageMode::RoleFiller(PositionCoding::Unique(pos)) => m.bind(&pos[y * self.max_width + x], value),
            ImageMode::RoleFiller(PositionCoding::Correlated { x: cx, y: cy }) => {
                let pos = m.bind(cx.level(x)?, cy.level(y)?)?;
                m.bind(&pos, value)
            }
            ImageMode::Fpe { x: fx, y: fy } => {
                let pos = m.bind(&fx.encode(x as f64)?, &fy.encode(y as f64)?)?;
                m.bind(&pos, value)
            }
        }
    }

    pub fn encode(&self, image: &Image) -> Result<Hypervector> {
        if image.width > self.max_width || image.height > self.max_height {
            return Err(HvError::OutOfRange {
                value: image.width.max(image.height) as f64,
                lo: 1.0,
                hi: self.max_width.min(self.max_height) as f64,
            });
        }
        let mut acc = self.model.accumulator();
        for y in 0..image.height {
            for x in 0..image.width {
                let value = self.values.encode(image.get(x, y))?;
                acc.add(&self.pixel(x, y, value)?)?;
            }
        }
        acc.finish(self.model.default_norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelKind;
    use crate::space::{similarity, Metric};
    use rand::Rng;

    fn codebook(model: &Model, seed: u64) -> LevelCodebook {
        LevelCodebook::build(
            *model.space(),
            16,
            LevelScheme::Concatenation,
            0.0,
            1.0,
            &RngStream::new(seed, "values"),
        )
        .unwrap()
    }

    fn random_image(w: usize, h: usize, rng: &mut impl Rng) -> Image {
        Image::new(w, h, (0..w * h).map(|_| rng.random_range(0.0..1.0)).collect()).unwrap()
    }

    #[test]
    fn single_pixel_is_position_bound_value() {
        let m = Model::fhrr(256, &RngStream::new(1, "m")).unwrap();
        let enc = ImageEncoder::fpe(&m, codebook(&m, 1), 4, 4, 1.0, &RngStream::new(1, "pos")).unwrap();
        let img = Image::new(1, 1, vec![0.5]).unwrap();
        let z = enc.encode(&img).unwrap();
        // position (0, 0) is the identity
        let v = codebook(&m, 1).encode(0.5).unwrap().clone();
        for (a, b) in z.as_complex().unwrap().iter().zip(v.as_complex().unwrap()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn bounds_are_enforced() {
        let m = Model::map(128, &RngStream::new(2, "m")).unwrap();
        let enc = ImageEncoder::permutation(&m, codebook(&m, 2), 2, 2, &RngStream::new(2, "p")).unwrap();
        let img = Image::new(3, 1, vec![0.0; 3]).unwrap();
        assert!(matches!(enc.encode(&img), Err(HvError::OutOfRange { .. })));
        assert!(Image::new(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn one_pixel_change_in_permutation_mode() {
        let m = Model::map(8192, &RngStream::new(3, "m")).unwrap();
        let enc = ImageEncoder::permutation(&m, codebook(&m, 3), 8, 8, &RngStream::new(3, "p")).unwrap();
        let mut rng = RngStream::new(3, "img").rng();
        let a = random_image(8, 8, &mut rng);
        let mut pixels = a.pixels().to_vec();
        pixels[27] = if pixels[27] < 0.5 { 1.0 } else { 0.0 };
        let b = Image::new(8, 8, pixels).unwrap();
        let ea = enc.encode(&a).unwrap();
        let eb = enc.encode(&b).unwrap();
        let ratio = similarity(Metric::Dot, &ea, &eb).unwrap() / similarity(Metric::Dot, &ea, &ea).unwrap();
        assert!((ratio - 63.0 / 64.0).abs() < 0.05, "{ratio}");
    }

    #[test]
    fn fpe_shift_beats_random_image() {
        let (w, h) = (16, 16);
        for seed in 0..100 {
            let m = Model::fhrr(1024, &RngStream::new(seed, "m")).unwrap();
            // two independent value levels keep value overlap from masking the position kernel
            let values = LevelCodebook::build(*m.space(), 2, LevelScheme::Concatenation, 0.0, 1.0, &RngStream::new(seed, "v")).unwrap();
            let enc = ImageEncoder::fpe(&m, values, w, h, 0.1, &RngStream::new(seed, "pos")).unwrap();
            let mut rng = RngStream::new(seed, "img").rng();
            let binary = |rng: &mut rand_chacha::ChaCha20Rng| {
                Image::new(w, h, (0..w * h).map(|_| if rng.random::<bool>() { 1.0 } else { 0.0 }).collect()).unwrap()
            };
            let base = binary(&mut rng);
            let shifted = Image::new(w, h, (0..w * h).map(|i| base.get((i % w + w - 1) % w, i / w)).collect()).unwrap();
            let other = binary(&mut rng);
            let e = enc.encode(&base).unwrap();
            let s_shift = similarity(Metric::Cosine, &e, &enc.encode(&shifted).unwrap()).unwrap();
            let s_rand = similarity(Metric::Cosine, &e, &enc.encode(&other).unwrap()).unwrap();
            assert!(s_shift > s_rand, "seed {seed}: {s_shift} <= {s_rand}");
        }
    }

    #[test]
    fn role_filler_modes_encode() {
        let m = Model::new(ModelKind::Bsc, crate::model::ModelParams::with_dim(2048), &RngStream::new(4, "m")).unwrap();
        let mut rng = RngStream::new(4, "img").rng();
        let img = random_image(4, 4, &mut rng);
        for enc in [
            ImageEncoder::role_filler_unique(&m, codebook(&m, 4), 4, 4, &RngStream::new(4, "u")).unwrap(),
            ImageEncoder::role_filler_correlated(&m, codebook(&m, 4), 4, 4, &RngStream::new(4, "c")).unwrap(),
        ] {
            let a = enc.encode(&img).unwrap();
            assert_eq!(a, enc.encode(&img).unwrap());
            let other = enc.encode(&random_image(4, 4, &mut rng)).unwrap();
            assert!(similarity(Metric::Hamming, &a, &other).unwrap() > 0.0);
        }
    }
}
