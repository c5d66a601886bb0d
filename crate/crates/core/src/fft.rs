use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// A planned transform of fixed length, reused across the columns or rows of
/// one matrix. Zero-pads shorter inputs.
pub(crate) struct Transform {
    plan: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    inverse: bool,
}

impl Transform {
    /// Forward DFT, `X(d) = sum_n x(n) exp(-j 2 pi n d / L)`.
    pub(crate) fn forward(len: usize) -> Self {
        Self::planned(len, false)
    }

    /// Inverse DFT scaled by `1/L`, `x(l) = 1/L sum_m X(m) exp(+j 2 pi m l / L)`.
    pub(crate) fn inverse(len: usize) -> Self {
        Self::planned(len, true)
    }

    fn planned(len: usize, inverse: bool) -> Self {
        let mut planner = FftPlanner::new();
        let plan = if inverse {
            planner.plan_fft_inverse(len)
        } else {
            planner.plan_fft_forward(len)
        };
        let scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        Self { plan, scratch, inverse }
    }

    pub(crate) fn len(&self) -> usize {
        self.plan.len()
    }

    /// Transforms `input` (zero-padded to the plan length) into `buf`.
    pub(crate) fn run(&mut self, input: impl IntoIterator<Item = Complex64>, buf: &mut Vec<Complex64>) {
        let len = self.len();
        buf.clear();
        buf.extend(input.into_iter().take(len));
        buf.resize(len, Complex64::default());
        self.plan.process_with_scratch(buf, &mut self.scratch);
        if self.inverse {
            let scale = 1.0 / len as f64;
            buf.iter_mut().for_each(|x| *x *= scale);
        }
    }
}
