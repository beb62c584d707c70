//! Sampled Lipschitz moduli.
//!
//! Sampling can only ever find a lower bound on the true modulus. The estimate is inflated
//! by a safety factor and every consumer records that the modulus was sampled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dde::NormPolicy;
use crate::functions::{Tabulated, VectorField};
use crate::{Error, Result};

/// Closed per-component intervals bounding the part of state space that is sampled.
///
/// The same box applies to every delayed argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl DomainBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::Contract(format!(
                "domain box bounds have lengths {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] <= upper[i])) {
            return Err(Error::Contract(format!(
                "domain box component {} has lower {} > upper {}",
                i + 1,
                lower[i],
                upper[i]
            )));
        }
        Ok(DomainBox { lower, upper })
    }

    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        DomainBox::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    fn min_width(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| u - l)
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzConfig {
    /// Number of random base points in the box.
    pub samples: usize,
    pub safety_factor: f64,
    pub seed: u64,
    /// Length of directional probes relative to the narrowest box side.
    pub probe_fraction: f64,
}

impl Default for LipschitzConfig {
    fn default() -> Self {
        LipschitzConfig {
            samples: 64,
            safety_factor: 1.25,
            seed: 0x5eed,
            probe_fraction: 1e-3,
        }
    }
}

/// Estimates `sup ‖f(t,z) − f(t,z′)‖ / ‖z − z′‖` over `z, z′` in the box.
///
/// Ratios come from all pairs of random base points and from short probes along sign
/// directions `±1` from each base point; for a linear map the sign probes hit the
/// max-norm operator bound exactly. The maximum ratio is multiplied by the safety factor.
pub fn estimate_lipschitz(
    field: &dyn VectorField,
    domain: &DomainBox,
    t: f64,
    cfg: &LipschitzConfig,
) -> Result<f64> {
    if cfg.samples < 2 {
        return Err(Error::Contract(
            "Lipschitz sampling needs at least 2 samples".into(),
        ));
    }
    let n = field.block_dim();
    if domain.dim() != n {
        return Err(Error::Contract(format!(
            "domain box has {} components, field blocks have {}",
            domain.dim(),
            n
        )));
    }
    let width = domain.min_width();
    if !(width > 0.0) {
        return Err(Error::Contract("domain box is degenerate".into()));
    }
    let total = n * field.blocks();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let out_dim = field.out_dim();

    let eval = |z: &[f64], out: &mut [f64]| -> Result<()> {
        field
            .eval_into(t, z, out)
            .map_err(|source| Error::SampleEval {
                point: z.to_vec(),
                source,
            })
    };

    let mut points = Vec::with_capacity(cfg.samples * total);
    for _ in 0..cfg.samples {
        for k in 0..total {
            let i = k % n;
            points.push(rng.gen_range(domain.lower[i]..=domain.upper[i]));
        }
    }
    let mut values = vec![0.0; cfg.samples * out_dim];
    for (z, out) in points.chunks(total).zip(values.chunks_mut(out_dim)) {
        eval(z, out)?;
    }

    let mut best = 0.0_f64;
    let mut ratio = |dz: f64, df: f64| {
        if dz > 0.0 {
            best = best.max(df / dz);
        }
    };
    for i in 0..cfg.samples {
        for j in i + 1..cfg.samples {
            let zi = &points[i * total..(i + 1) * total];
            let zj = &points[j * total..(j + 1) * total];
            let fi = &values[i * out_dim..(i + 1) * out_dim];
            let fj = &values[j * out_dim..(j + 1) * out_dim];
            ratio(NormPolicy::distance(zi, zj), NormPolicy::distance(fi, fj));
        }
    }

    let directions = sign_directions(total, &mut rng);
    let step = cfg.probe_fraction * width;
    let mut probe = vec![0.0; total];
    let mut probe_val = vec![0.0; out_dim];
    for i in 0..cfg.samples {
        let z = &points[i * total..(i + 1) * total];
        let fz = &values[i * out_dim..(i + 1) * out_dim];
        for dir in &directions {
            for (k, p) in probe.iter_mut().enumerate() {
                let comp = k % n;
                *p = (z[k] + step * dir[k]).clamp(domain.lower[comp], domain.upper[comp]);
            }
            eval(&probe, &mut probe_val)?;
            ratio(
                NormPolicy::distance(z, &probe),
                NormPolicy::distance(fz, &probe_val),
            );
        }
    }
    Ok(best * cfg.safety_factor)
}

/// All sign vectors up to overall sign when there are few components, random ones otherwise.
fn sign_directions(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    const MAX_ENUMERATED: usize = 6;
    const RANDOM_COUNT: usize = 32;
    if dim <= MAX_ENUMERATED {
        let count = 1usize << (dim - 1);
        (0..count)
            .map(|mask| {
                (0..dim)
                    .map(|k| {
                        if k > 0 && mask & (1 << (k - 1)) != 0 {
                            -1.0
                        } else {
                            1.0
                        }
                    })
                    .collect()
            })
            .collect()
    } else {
        (0..RANDOM_COUNT)
            .map(|_| {
                (0..dim)
                    .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
                    .collect()
            })
            .collect()
    }
}

/// Samples the modulus at each of `times` and returns it as a tabulated function of `t`.
pub fn sampled_modulus(
    field: &dyn VectorField,
    domain: &DomainBox,
    times: &[f64],
    cfg: &LipschitzConfig,
) -> Result<Tabulated> {
    let values = times
        .iter()
        .map(|&t| estimate_lipschitz(field, domain, t, cfg))
        .collect::<Result<Vec<_>>>()?;
    Tabulated::new(times.to_vec(), values)
}
