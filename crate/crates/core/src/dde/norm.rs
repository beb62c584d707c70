/// Norms used throughout: max-norm on `R^n`, max over blocks on `(R^n)^m`.
///
/// On a flattened block vector the block norm coincides with the plain max-norm, so both
/// are computed the same way.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NormPolicy;

impl NormPolicy {
    pub fn vector(z: &[f64]) -> f64 {
        z.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// `max_j ‖z_j‖` over consecutive blocks of length `block_dim`.
    pub fn blocks(z: &[f64], block_dim: usize) -> f64 {
        z.chunks(block_dim.max(1))
            .map(NormPolicy::vector)
            .fold(0.0, f64::max)
    }

    pub fn distance(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_values() {
        assert_eq!(NormPolicy::vector(&[1.0, -3.0, 2.0]), 3.0);
        assert_eq!(NormPolicy::vector(&[]), 0.0);
        assert_eq!(NormPolicy::blocks(&[1.0, -3.0, 2.0, 0.5], 2), 3.0);
        assert_eq!(NormPolicy::distance(&[1.0, 2.0], &[1.5, -1.0]), 3.0);
    }

    proptest! {
        #[test]
        fn norm_axioms(a in prop::collection::vec(-1e3f64..1e3, 4), b in prop::collection::vec(-1e3f64..1e3, 4)) {
            let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            prop_assert!(NormPolicy::vector(&a) >= 0.0);
            prop_assert!(NormPolicy::vector(&sum) <= NormPolicy::vector(&a) + NormPolicy::vector(&b) + 1e-12);
            prop_assert_eq!(NormPolicy::vector(&a) == 0.0, a.iter().all(|v| *v == 0.0));
            prop_assert_eq!(NormPolicy::blocks(&a, 2), NormPolicy::vector(&a));
        }
    }
}
