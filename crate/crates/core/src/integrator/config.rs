use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    /// Largest step; every interval between breaking points is split into equal steps no
    /// longer than this.
    pub step: f64,
    /// Insert propagated breaking points `t0 + sum of constant lags` into the mesh.
    pub breaking_points: bool,
    pub max_overlap_iterations: usize,
    pub overlap_tolerance: f64,
    pub max_halvings: u32,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            step: 1e-3,
            breaking_points: true,
            max_overlap_iterations: 10,
            overlap_tolerance: 1e-12,
            max_halvings: 20,
        }
    }
}

impl GridConfig {
    pub fn with_step(step: f64) -> Self {
        GridConfig {
            step,
            ..Default::default()
        }
    }

    pub(crate) fn validate(&self, span: f64) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Contract(format!(
                "step must be positive, got {}",
                self.step
            )));
        }
        if self.step > span * (1.0 + 1e-12) {
            return Err(Error::Contract(format!(
                "step {} exceeds the solve interval length {span}",
                self.step
            )));
        }
        if !(self.overlap_tolerance > 0.0) {
            return Err(Error::Contract("overlap tolerance must be positive".into()));
        }
        if self.max_overlap_iterations == 0 {
            return Err(Error::Contract(
                "need at least one overlap iteration".into(),
            ));
        }
        Ok(())
    }
}
