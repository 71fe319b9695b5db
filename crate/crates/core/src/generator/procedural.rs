//! Procedural sinusoidal-channel generator.
//!
//! Each channel consumes five latent coordinates, squashed through `tanh`
//! into parameter ranges tied to the grid size. With `band = (rows - 1) / C`:
//!
//! | coordinate | parameter        | range                                          |
//! |------------|------------------|------------------------------------------------|
//! | 0          | amplitude        | `[0, band / 4]`                                |
//! | 1          | wavelength       | `[max(cols / 2, pi * band / (4 * t_min)), max(2 * cols, ..)]` |
//! | 2          | phase            | `[-pi, pi]`                                    |
//! | 3          | vertical offset  | `(c + 1/2) * band ± band / 4`                  |
//! | 4          | half thickness   | `[t_min, t_max]`, `t_min = max(1/2, rows/40)`, `t_max = max(t_min + 1/2, 0.065 * rows)` |
//!
//! Cell membership of a channel is `logistic(4 * (half_thickness - |row - centerline(col)|))`
//! with `centerline(col) = offset + amplitude * sin(2 pi col / wavelength + phase)`;
//! the output is the maximum over channels.
//!
//! The ranges keep every centerline inside the grid and its slope below
//! `2 * t_min`, so each thresholded channel is one 8-connected body and a
//! realization holds between 1 and C geobodies.

use serde::{Deserialize, Serialize};

use super::{Generator, GeneratorError, GeneratorInfo, LatentVector};
use crate::grid::{GridError, RealGrid, Shape};
use crate::scalar::{logistic, Scalar};

pub const DEFAULT_CHANNELS: usize = 3;
pub const PARAMS_PER_CHANNEL: usize = 5;
const EDGE_SLOPE: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams<T> {
    pub amplitude: T,
    pub wavelength: T,
    pub phase: T,
    pub vertical_offset: T,
    pub half_thickness: T,
}

impl<T: Scalar> ChannelParams<T> {
    #[inline]
    pub fn centerline(&self, col: T) -> T {
        self.vertical_offset + self.amplitude * (T::TAU() * col / self.wavelength + self.phase).sin()
    }

    #[inline]
    pub fn membership(&self, row: T, col: T) -> T {
        logistic(T::lit(EDGE_SLOPE) * (self.half_thickness - (row - self.centerline(col)).abs()))
    }
}

#[derive(Debug, Clone)]
pub struct ProceduralGenerator<T> {
    info: GeneratorInfo,
    channels: usize,
    band: T,
    thickness: (T, T),
    wavelength: (T, T),
}

impl<T: Scalar> ProceduralGenerator<T> {
    pub fn new(shape: Shape, channels: usize) -> Result<Self, GridError> {
        let shape = Shape::new(shape.n_rows, shape.n_cols)?;
        let channels = channels.max(1);
        let rows = T::from_count(shape.n_rows);
        let cols = T::from_count(shape.n_cols);
        let band = T::from_count(shape.n_rows - 1) / T::from_count(channels);
        let half = T::lit(0.5);
        let t_min = half.max(rows / T::lit(40.0));
        let t_max = (t_min + half).max(T::lit(0.065) * rows);
        let amp_max = band / T::lit(4.0);
        let w_min = (cols * half).max(T::PI() * amp_max / t_min);
        let w_max = (cols * T::lit(2.0)).max(w_min);
        Ok(Self {
            info: GeneratorInfo {
                latent_dim: PARAMS_PER_CHANNEL * channels,
                n_rows: shape.n_rows,
                n_cols: shape.n_cols,
                supports_discriminator: false,
                name: format!("procedural-channels-{channels}"),
            },
            channels,
            band,
            thickness: (t_min, t_max),
            wavelength: (w_min, w_max),
        })
    }

    /// 64 x 64 grid with three channels.
    pub fn default_64() -> Self {
        Self::new(Shape { n_rows: 64, n_cols: 64 }, DEFAULT_CHANNELS).expect("valid default shape")
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Decodes the latent vector into per-channel parameters.
    pub fn decode(&self, z: &LatentVector<T>) -> Result<Vec<ChannelParams<T>>, GeneratorError> {
        self.info.check_latent(z)?;
        let half = T::lit(0.5);
        let unit = |v: T| (v.tanh() + T::one()) * half; // (0, 1)
        let lerp = |(lo, hi): (T, T), v: T| lo + (hi - lo) * unit(v);
        Ok(z.values()
            .chunks_exact(PARAMS_PER_CHANNEL)
            .enumerate()
            .map(|(c, p)| {
                let quarter = self.band / T::lit(4.0);
                ChannelParams {
                    amplitude: quarter * unit(p[0]),
                    wavelength: lerp(self.wavelength, p[1]),
                    phase: T::PI() * p[2].tanh(),
                    vertical_offset: (T::from_count(c) + half) * self.band + quarter * p[3].tanh(),
                    half_thickness: lerp(self.thickness, p[4]),
                }
            })
            .collect())
    }

    /// Per-channel membership rasters, for diagnostics.
    pub fn channel_layers(&self, z: &LatentVector<T>) -> Result<Vec<RealGrid<T>>, GeneratorError> {
        let shape = self.info.shape();
        self.decode(z)?
            .iter()
            .map(|ch| {
                let mut cells = Vec::with_capacity(shape.len());
                for r in 0..shape.n_rows {
                    for c in 0..shape.n_cols {
                        cells.push(ch.membership(T::from_count(r), T::from_count(c)));
                    }
                }
                Ok(RealGrid::new(shape, cells)?)
            })
            .collect()
    }
}

impl<T: Scalar> Generator<T> for ProceduralGenerator<T> {
    fn info(&self) -> &GeneratorInfo {
        &self.info
    }

    fn generate(&self, z: &LatentVector<T>) -> Result<RealGrid<T>, GeneratorError> {
        let params = self.decode(z)?;
        let shape = self.info.shape();
        let slope = T::lit(EDGE_SLOPE);
        // The logistic is monotone, so the maximum membership over channels is
        // the logistic of the largest margin `half_thickness - distance`.
        let mut margin = vec![T::neg_infinity(); shape.len()];
        for ch in &params {
            for c in 0..shape.n_cols {
                let center = ch.centerline(T::from_count(c));
                for r in 0..shape.n_rows {
                    let m = ch.half_thickness - (T::from_count(r) - center).abs();
                    let cell = &mut margin[r * shape.n_cols + c];
                    if m > *cell {
                        *cell = m;
                    }
                }
            }
        }
        Ok(RealGrid::new(shape, margin.into_iter().map(|m| logistic(slope * m)).collect())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::sample_latent;
    use crate::grid::threshold_grid;
    use crate::metrics::{count_geobodies, Connectivity};

    #[test]
    fn origin_is_three_centered_channels() {
        let g = ProceduralGenerator::<f64>::default_64();
        let z = LatentVector::zeros(15);
        let a = g.generate(&z).unwrap();
        assert_eq!(a, g.generate(&z).unwrap());
        let params = g.decode(&z).unwrap();
        assert_eq!(params.len(), 3);
        let band = 63.0 / 3.0;
        for (c, p) in params.iter().enumerate() {
            assert!((p.vertical_offset - (c as f64 + 0.5) * band).abs() < 1e-12);
            assert_eq!(p.phase, 0.0);
            assert!(p.amplitude > 0.0);
        }
        assert!(a.cells().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn rejects_wrong_latent_dimension() {
        let g = ProceduralGenerator::<f64>::default_64();
        assert_eq!(
            g.generate(&LatentVector::zeros(4)),
            Err(GeneratorError::LatentDimension { expected: 15, found: 4 })
        );
    }

    #[test]
    fn phase_perturbation_is_local_to_channel_one() {
        let g = ProceduralGenerator::<f64>::default_64();
        for seed in 0..20 {
            let z = sample_latent::<f64>(seed, 15);
            let mut moved = z.clone().into_values();
            moved[2] += 0.3;
            let moved = LatentVector::new(moved).unwrap();
            let before = g.generate(&z).unwrap();
            let after = g.generate(&moved).unwrap();
            let layers_before = g.channel_layers(&z).unwrap();
            let layers_after = g.channel_layers(&moved).unwrap();
            let dominant = |layers: &[RealGrid<f64>], i: usize| {
                (0..layers.len())
                    .max_by(|&a, &b| layers[a].cells()[i].partial_cmp(&layers[b].cells()[i]).unwrap())
                    .unwrap()
            };
            for i in 0..before.cells().len() {
                if before.cells()[i] != after.cells()[i] {
                    assert!(
                        dominant(&layers_before, i) == 0 || dominant(&layers_after, i) == 0,
                        "seed {seed}: cell {i} changed without channel 1 dominating"
                    );
                }
            }
            assert_ne!(before, after);
        }
    }

    #[test]
    fn thresholded_output_has_one_to_c_geobodies() {
        for shape in [Shape { n_rows: 64, n_cols: 64 }, Shape { n_rows: 16, n_cols: 16 }, Shape { n_rows: 32, n_cols: 48 }] {
            let g = ProceduralGenerator::<f64>::new(shape, 3).unwrap();
            for seed in 0..100 {
                let z = sample_latent::<f64>(seed, 15);
                let facies = threshold_grid(&g.generate(&z).unwrap(), 0.5).unwrap();
                let n = count_geobodies(&facies, 1, Connectivity::Eight).count;
                assert!((1..=3).contains(&n), "{shape} seed {seed}: {n} geobodies");
            }
        }
    }

    #[test]
    fn continuous_in_latent() {
        use rand::{Rng, SeedableRng};
        let g = ProceduralGenerator::<f64>::default_64();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for seed in 0..100 {
            let z = sample_latent::<f64>(seed, 15);
            let delta: Vec<f64> = (0..15).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = delta.iter().map(|d| d * d).sum::<f64>().sqrt();
            let shifted: Vec<f64> = z.values().iter().zip(&delta).map(|(a, d)| a + d / norm * 1e-6).collect();
            let a = g.generate(&z).unwrap();
            let b = g.generate(&LatentVector::new(shifted).unwrap()).unwrap();
            let max_change = a.cells().iter().zip(b.cells()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(max_change <= 1e-3, "seed {seed}: {max_change}");
        }
    }

    #[test]
    fn f32_matches_f64_after_threshold_mostly() {
        let g64 = ProceduralGenerator::<f64>::default_64();
        let g32 = ProceduralGenerator::<f32>::default_64();
        let z64 = sample_latent::<f64>(3, 15);
        let z32 = sample_latent::<f32>(3, 15);
        let a = threshold_grid(&g64.generate(&z64).unwrap(), 0.5).unwrap();
        let b = threshold_grid(&g32.generate(&z32).unwrap(), 0.5).unwrap();
        let diff = a.cells().iter().zip(b.cells()).filter(|(x, y)| x != y).count();
        assert!(diff <= 8, "{diff} cells differ");
    }
}
