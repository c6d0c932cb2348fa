//! Synthetic detection scenes with known ground truth.
//!
//! Depth proxies are drawn first and mask areas are obtained by inverting the
//! area-to-depth mapping of [`crate::coords`], so a scene fed back through the
//! pipeline reproduces its `z` values. Sizes follow
//! `s = exp(α + β ln z + N(0, σ))`. All randomness comes from a `ChaCha8Rng`
//! seeded with the spec's seed, which keeps scenes stable across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::coords::DEFAULT_EPSILON;
use crate::error::{Error, Result};
use crate::ingest::{DetectionSet, Instance};

/// Largest normalized mask area the generator emits.
pub const MAX_AREA_NORM: f64 = 0.25;

/// Cluster centers for [`Process::Clustered`], in `[-1, 1]²` coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Centers {
    /// This many centers drawn uniformly from `[-0.8, 0.8]²`.
    Random(usize),
    Fixed(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Process {
    /// Uniform over the frame.
    Poisson,
    /// Gaussian blobs of standard deviation `spread` around each center.
    Clustered { centers: Centers, spread: f64 },
    /// One Gaussian at the origin with major-axis deviation `sigma`, shaped by
    /// the spec's `aniso_ratio` and `aniso_angle`.
    AnisotropicGaussian {
        #[serde(default = "default_sigma")]
        sigma: f64,
    },
}

fn default_sigma() -> f64 {
    0.25
}
fn default_ratio() -> f64 {
    1.0
}
fn default_z_min() -> f64 {
    0.2
}
fn default_s_max() -> f64 {
    0.2
}
fn default_a_min() -> f64 {
    0.001
}
fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub n: usize,
    pub beta_true: f64,
    #[serde(default)]
    pub noise_sigma: f64,
    /// Degrees, counter-clockwise from +x with y pointing up.
    #[serde(default)]
    pub aniso_angle: f64,
    /// Ratio of major to minor axis variance.
    #[serde(default = "default_ratio")]
    pub aniso_ratio: f64,
    pub process: Process,
    pub width: u32,
    pub height: u32,
    #[serde(default)]
    pub seed: u64,
    /// Smallest depth proxy; `z` is drawn from `U(z_min, 1)`.
    #[serde(default = "default_z_min")]
    pub z_min: f64,
    /// Noise-free size at `z = z_min`, which fixes `α`.
    #[serde(default = "default_s_max")]
    pub s_max: f64,
    /// Normalized area of the fragment with `z = 1`.
    #[serde(default = "default_a_min")]
    pub a_min: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_m_per_px: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_id: Option<String>,
}

impl SceneSpec {
    pub fn new(
        n: usize,
        beta_true: f64,
        process: Process,
        width: u32,
        height: u32,
        seed: u64,
    ) -> Self {
        Self {
            n,
            beta_true,
            noise_sigma: 0.0,
            aniso_angle: 0.0,
            aniso_ratio: 1.0,
            process,
            width,
            height,
            seed,
            z_min: default_z_min(),
            s_max: default_s_max(),
            a_min: default_a_min(),
            epsilon: DEFAULT_EPSILON,
            scale_m_per_px: None,
            image_id: None,
        }
    }

    /// `α = ln s_max − β ln z_min`.
    pub fn alpha(&self) -> f64 {
        self.s_max.ln() - self.beta_true * self.z_min.ln()
    }

    pub fn image_id(&self) -> String {
        self.image_id
            .clone()
            .unwrap_or_else(|| format!("synth-{}", self.seed))
    }

    /// Normalized mask area whose depth proxy is `z` when the scene's
    /// largest `z` is 1.
    pub fn area_for(&self, z: f64) -> f64 {
        (self.a_min + self.epsilon) / (z * z) - self.epsilon
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Domain(m));
        if self.n == 0 {
            return fail("n must be at least 1".into());
        }
        if self.width == 0 || self.height == 0 {
            return fail("image dimensions must be positive".into());
        }
        if !self.beta_true.is_finite() {
            return fail("beta_true must be finite".into());
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return fail(format!(
                "noise_sigma must be >= 0, got {}",
                self.noise_sigma
            ));
        }
        if !(self.aniso_ratio.is_finite() && self.aniso_ratio >= 1.0) {
            return fail(format!(
                "aniso_ratio must be >= 1, got {}",
                self.aniso_ratio
            ));
        }
        if !self.aniso_angle.is_finite() {
            return fail("aniso_angle must be finite".into());
        }
        if !(self.z_min > 0.0 && self.z_min < 1.0) {
            return fail(format!("z_min must lie in (0, 1), got {}", self.z_min));
        }
        if !(self.s_max.is_finite() && self.s_max > 0.0) {
            return fail(format!("s_max must be positive, got {}", self.s_max));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return fail(format!("epsilon must be positive, got {}", self.epsilon));
        }
        let pixel = 1.0 / (f64::from(self.width) * f64::from(self.height));
        if !(self.a_min >= pixel) {
            return fail(format!(
                "a_min must cover at least one pixel ({pixel}), got {}",
                self.a_min
            ));
        }
        if self.area_for(self.z_min) > MAX_AREA_NORM {
            return fail(format!(
                "a_min = {} with z_min = {} exceeds the {MAX_AREA_NORM} area cap",
                self.a_min, self.z_min
            ));
        }
        if let Some(s) = self.scale_m_per_px {
            if !(s.is_finite() && s > 0.0) {
                return fail(format!("scale must be positive, got {s}"));
            }
        }
        match &self.process {
            Process::Poisson => {}
            Process::Clustered { centers, spread } => {
                if !(spread.is_finite() && *spread > 0.0) {
                    return fail(format!("spread must be positive, got {spread}"));
                }
                match centers {
                    Centers::Random(0) => {
                        return fail("at least one cluster center is required".into())
                    }
                    Centers::Fixed(c) if c.is_empty() => {
                        return fail("at least one cluster center is required".into())
                    }
                    Centers::Fixed(c) => {
                        if c.iter().flatten().any(|v| !(-1.0..=1.0).contains(v)) {
                            return fail("cluster centers must lie in [-1, 1]²".into());
                        }
                    }
                    Centers::Random(_) => {}
                }
            }
            Process::AnisotropicGaussian { sigma } => {
                if !(sigma.is_finite() && *sigma > 0.0) {
                    return fail(format!("sigma must be positive, got {sigma}"));
                }
            }
        }
        Ok(())
    }
}

/// What the generator intended for each emitted instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneTruth {
    pub alpha: f64,
    pub beta: f64,
    /// Fragment centers in `[-1, 1]²`, y up.
    pub xy: Vec<[f64; 2]>,
    pub z: Vec<f64>,
    /// Target box diagonals in normalized units.
    pub s: Vec<f64>,
    pub cluster_centers: Vec<[f64; 2]>,
    /// Fragments moved to another sampled location so their box fits.
    pub swapped: usize,
    /// Fragments whose box had to shrink below the target diagonal.
    pub clipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub detections: DetectionSet,
    pub truth: SceneTruth,
}

pub fn generate(spec: &SceneSpec) -> Result<DetectionSet> {
    Ok(generate_scene(spec)?.detections)
}

pub fn generate_scene(spec: &SceneSpec) -> Result<Scene> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (mut xy, cluster_centers) = sample_locations(spec, &mut rng);

    let mut z: Vec<f64> = (0..spec.n)
        .map(|_| rng.random_range(spec.z_min..1.0))
        .collect();
    let top = (0..spec.n)
        .max_by(|&a, &b| z[a].total_cmp(&z[b]))
        .expect("n >= 1");
    z[top] = 1.0;

    let alpha = spec.alpha();
    let noise = Normal::new(0.0, spec.noise_sigma).expect("validated sigma");
    let mut s: Vec<f64> = z
        .iter()
        .map(|zi| {
            let e = if spec.noise_sigma > 0.0 {
                noise.sample(&mut rng)
            } else {
                0.0
            };
            (alpha + spec.beta_true * zi.ln() + e).exp()
        })
        .collect();
    let (ln_lo, ln_hi) = (0.5f64.ln(), 2.0f64.ln());
    let aspect: Vec<f64> = (0..spec.n)
        .map(|_| rng.random_range(ln_lo..ln_hi).exp())
        .collect();

    let (w, h) = (f64::from(spec.width), f64::from(spec.height));
    let fits = |p: [f64; 2], diag: f64| {
        let (pm, qm) = max_extents(p);
        diag * diag <= pm * pm + qm * qm
    };

    let mut swapped = 0;
    let mut clipped = 0;
    for i in 0..spec.n {
        if fits(xy[i], s[i]) {
            continue;
        }
        let partner = (0..spec.n).find(|&j| j != i && fits(xy[j], s[i]) && fits(xy[i], s[j]));
        match partner {
            Some(j) => {
                xy.swap(i, j);
                swapped += 1;
            }
            None => {
                let (pm, qm) = max_extents(xy[i]);
                s[i] = (pm * pm + qm * qm).sqrt();
                clipped += 1;
            }
        }
    }

    let instances = (0..spec.n)
        .map(|i| {
            let (p, q) = box_extents(xy[i], s[i], aspect[i], w, h);
            let (cx, cy) = ((xy[i][0] + 1.0) * 0.5 * w, (1.0 - xy[i][1]) * 0.5 * h);
            let (hw, hh) = (0.5 * p * w, 0.5 * q * h);
            let area = spec.area_for(z[i]).clamp(1.0 / (w * h), MAX_AREA_NORM);
            Instance::new([cx - hw, cy - hh, cx + hw, cy + hh], area * w * h, 1.0)
        })
        .collect();

    let mut detections =
        DetectionSet::new(spec.image_id(), spec.width, spec.height).with_instances(instances);
    detections.scale = spec.scale_m_per_px;
    detections.validate()?;

    Ok(Scene {
        detections,
        truth: SceneTruth {
            alpha,
            beta: spec.beta_true,
            xy,
            z,
            s,
            cluster_centers,
            swapped,
            clipped,
        },
    })
}

/// Largest normalized box width and height that keep a box centered at `p`
/// inside the frame, with a small margin against rounding.
fn max_extents(p: [f64; 2]) -> (f64, f64) {
    let u = (p[0] + 1.0) * 0.5;
    let v = (1.0 - p[1]) * 0.5;
    let shrink = 1.0 - 1e-9;
    (
        2.0 * u.min(1.0 - u).max(0.0) * shrink,
        2.0 * v.min(1.0 - v).max(0.0) * shrink,
    )
}

/// Normalized box width `p` and height `q` with `p² + q² = diag²`, as close to
/// the preferred pixel aspect as the frame allows.
fn box_extents(center: [f64; 2], diag: f64, aspect: f64, w: f64, h: f64) -> (f64, f64) {
    let (pm, qm) = max_extents(center);
    let theta = (w / (aspect * h)).atan();
    let (mut p, mut q) = (diag * theta.cos(), diag * theta.sin());
    if p > pm {
        p = pm;
        q = (diag * diag - p * p).max(0.0).sqrt();
    }
    if q > qm {
        q = qm;
        p = (diag * diag - q * q).max(0.0).sqrt().min(pm);
    }
    (p, q)
}

fn sample_locations(spec: &SceneSpec, rng: &mut ChaCha8Rng) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
    let inside = |x: f64, y: f64| x > -1.0 && x < 1.0 && y > -1.0 && y < 1.0;
    match &spec.process {
        Process::Poisson => {
            let pts = (0..spec.n)
                .map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
                .collect();
            (pts, Vec::new())
        }
        Process::Clustered { centers, spread } => {
            let centers: Vec<[f64; 2]> = match centers {
                Centers::Random(c) => (0..*c)
                    .map(|_| [rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8)])
                    .collect(),
                Centers::Fixed(c) => c.clone(),
            };
            let normal = Normal::new(0.0, *spread).expect("validated spread");
            let pts = (0..spec.n)
                .map(|_| {
                    let c = centers[rng.random_range(0..centers.len())];
                    loop {
                        let x = c[0] + normal.sample(rng);
                        let y = c[1] + normal.sample(rng);
                        if inside(x, y) {
                            break [x, y];
                        }
                    }
                })
                .collect();
            (pts, centers)
        }
        Process::AnisotropicGaussian { sigma } => {
            let major = Normal::new(0.0, *sigma).expect("validated sigma");
            let minor = Normal::new(0.0, sigma / spec.aniso_ratio.sqrt()).expect("validated sigma");
            let (sin, cos) = spec.aniso_angle.to_radians().sin_cos();
            let pts = (0..spec.n)
                .map(|_| loop {
                    let (a, b) = (major.sample(rng), minor.sample(rng));
                    let (x, y) = (a * cos - b * sin, a * sin + b * cos);
                    if inside(x, y) {
                        break [x, y];
                    }
                })
                .collect();
            (pts, vec![[0.0, 0.0]])
        }
    }
}
