//! Scalars over the three associative real division algebras.
//!
//! Every scalar is stored as four real parts `(w, x, y, z)`. A real scalar uses
//! only `w`, a complex scalar uses `w + x·i`, and a quaternion uses all four.
//! Because ℝ ⊂ ℂ ⊂ ℍ embed this way, a single Hamilton product serves all three
//! fields: restricted to the embedded subalgebras it is the ordinary real or
//! complex product.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::RegionSpec;

/// The scalar field a Hilbert space is defined over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarField {
    Real,
    Complex,
    Quaternion,
}

impl ScalarField {
    pub const ALL: [ScalarField; 3] = [
        ScalarField::Real,
        ScalarField::Complex,
        ScalarField::Quaternion,
    ];

    /// Real dimension of a ray (a line minus the origin) over this field.
    pub const fn ray_dim(self) -> usize {
        match self {
            ScalarField::Real => 1,
            ScalarField::Complex => 2,
            ScalarField::Quaternion => 4,
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "real" | "r" => Some(ScalarField::Real),
            "complex" | "c" => Some(ScalarField::Complex),
            "quaternion" | "h" => Some(ScalarField::Quaternion),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ScalarField::Real => "real",
            ScalarField::Complex => "complex",
            ScalarField::Quaternion => "quaternion",
        }
    }

    /// Raises a non-negative length to the power `ray_dim`, given its square.
    ///
    /// Working from the square avoids a square root in the complex case.
    pub(crate) fn pow_dim_from_sq(self, len_sq: f64) -> f64 {
        match self {
            ScalarField::Real => len_sq.sqrt(),
            ScalarField::Complex => len_sq,
            ScalarField::Quaternion => len_sq * len_sq,
        }
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A scalar in one of the three fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scalar {
    field: ScalarField,
    parts: [f64; 4],
}

impl Scalar {
    pub const fn real(value: f64) -> Self {
        Scalar {
            field: ScalarField::Real,
            parts: [value, 0.0, 0.0, 0.0],
        }
    }

    pub const fn complex(re: f64, im: f64) -> Self {
        Scalar {
            field: ScalarField::Complex,
            parts: [re, im, 0.0, 0.0],
        }
    }

    pub const fn quaternion(w: f64, x: f64, y: f64, z: f64) -> Self {
        Scalar {
            field: ScalarField::Quaternion,
            parts: [w, x, y, z],
        }
    }

    pub const fn zero(field: ScalarField) -> Self {
        Scalar {
            field,
            parts: [0.0; 4],
        }
    }

    pub const fn one(field: ScalarField) -> Self {
        Scalar {
            field,
            parts: [1.0, 0.0, 0.0, 0.0],
        }
    }

    /// Builds a scalar from exactly `field.ray_dim()` real components.
    pub fn from_components(field: ScalarField, components: &[f64]) -> Result<Self> {
        if components.len() != field.ray_dim() {
            return Err(Error::InvalidState(format!(
                "a {field} scalar needs {} components, got {}",
                field.ray_dim(),
                components.len()
            )));
        }
        if let Some(bad) = components.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidState(format!("non-finite component {bad}")));
        }
        let mut parts = [0.0; 4];
        parts[..components.len()].copy_from_slice(components);
        Ok(Scalar { field, parts })
    }

    /// Embeds this scalar into a larger field (ℝ ⊂ ℂ ⊂ ℍ).
    pub fn embed(self, field: ScalarField) -> Result<Self> {
        if field.ray_dim() < self.field.ray_dim() {
            return Err(Error::FieldMismatch {
                left: self.field,
                right: field,
            });
        }
        Ok(Scalar { field, ..self })
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    /// The `ray_dim` real components.
    pub fn components(&self) -> &[f64] {
        &self.parts[..self.field.ray_dim()]
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|&p| p == 0.0)
    }

    pub fn conj(&self) -> Self {
        let [w, x, y, z] = self.parts;
        Scalar {
            field: self.field,
            parts: [w, -x, -y, -z],
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.parts.iter().map(|p| p * p).sum()
    }

    /// Euclidean norm of the components; multiplicative in every field.
    pub fn norm(&self) -> f64 {
        let [w, x, y, z] = self.parts;
        w.hypot(x).hypot(y.hypot(z))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Scalar {
            field: self.field,
            parts: self.parts.map(|p| p * factor),
        }
    }

    /// Field product `self · rhs`. Non-commutative for quaternions.
    pub fn mul(&self, rhs: &Scalar) -> Result<Self> {
        if self.field != rhs.field {
            return Err(Error::FieldMismatch {
                left: self.field,
                right: rhs.field,
            });
        }
        Ok(self.mul_same(rhs))
    }

    /// Product of two scalars already known to share a field.
    pub(crate) fn mul_same(&self, rhs: &Scalar) -> Self {
        debug_assert_eq!(self.field, rhs.field);
        Scalar {
            field: self.field,
            parts: hamilton(self.parts, rhs.parts),
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.norm_sq();
        (n > 0.0).then(|| self.conj().scale(1.0 / n))
    }
}

fn hamilton(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    let [aw, ax, ay, az] = a;
    let [bw, bx, by, bz] = b;
    [
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ]
}

/// Checked product, the free-function form of [`Scalar::mul`].
pub fn scalar_mul(a: &Scalar, b: &Scalar) -> Result<Scalar> {
    a.mul(b)
}

pub fn scalar_norm(a: &Scalar) -> f64 {
    a.norm()
}

impl Add for Scalar {
    type Output = Scalar;

    fn add(self, rhs: Scalar) -> Scalar {
        debug_assert_eq!(self.field, rhs.field);
        let mut parts = self.parts;
        for (p, q) in parts.iter_mut().zip(rhs.parts) {
            *p += q;
        }
        Scalar {
            field: self.field,
            parts,
        }
    }
}

impl Sub for Scalar {
    type Output = Scalar;

    fn sub(self, rhs: Scalar) -> Scalar {
        self + (-rhs)
    }
}

impl Neg for Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        self.scale(-1.0)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [w, x, y, z] = self.parts;
        match self.field {
            ScalarField::Real => write!(f, "{w}"),
            ScalarField::Complex => write!(f, "{w}{x:+}i"),
            ScalarField::Quaternion => write!(f, "{w}{x:+}i{y:+}j{z:+}k"),
        }
    }
}

/// Deterministic RNG for stream `stream` of a run seeded with `seed`.
///
/// Streams of the same seed are independent ChaCha streams, so parallel
/// workers can each own one without coordination.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Infinite stream of i.i.d. scalars, uniform over a region of component space.
///
/// Sampling is by rejection from the region's bounding box.
#[derive(Debug, Clone)]
pub struct RegionSampler {
    field: ScalarField,
    region: RegionSpec,
    bounds: Vec<(f64, f64)>,
    rng: ChaCha8Rng,
}

impl RegionSampler {
    pub fn new(field: ScalarField, region: RegionSpec, seed: u64, stream: u64) -> Result<Self> {
        region.validate(field.ray_dim())?;
        let bounds = region.bounding_box(field.ray_dim());
        Ok(RegionSampler {
            field,
            region,
            bounds,
            rng: stream_rng(seed, stream),
        })
    }

    pub fn region(&self) -> &RegionSpec {
        &self.region
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    /// Draws the next sample into `out`, which must have `ray_dim` slots.
    pub(crate) fn sample_into(&mut self, out: &mut [f64]) {
        loop {
            for (slot, &(lo, hi)) in out.iter_mut().zip(&self.bounds) {
                *slot = self.rng.gen_range(lo..hi);
            }
            if self.region.contains(out) {
                return;
            }
        }
    }
}

impl Iterator for RegionSampler {
    type Item = Scalar;

    fn next(&mut self) -> Option<Scalar> {
        let mut buf = [0.0; 4];
        let d = self.field.ray_dim();
        self.sample_into(&mut buf[..d]);
        Some(Scalar {
            field: self.field,
            parts: buf,
        })
    }
}

/// Uniform samples over `region`, reproducible for a given seed.
pub fn sample_uniform_scalar_region(
    field: ScalarField,
    region: &RegionSpec,
    seed: u64,
) -> Result<RegionSampler> {
    RegionSampler::new(field, region.clone(), seed, 0)
}
