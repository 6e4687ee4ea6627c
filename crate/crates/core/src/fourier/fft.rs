use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

/// Multi-dimensional FFT over a row-major array (last axis contiguous).
///
/// Both directions are unnormalized: `Forward` uses `e^{-i}`, `Inverse`
/// uses `e^{+i}`.
pub struct NdFft {
    shape: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl NdFft {
    pub fn new(shape: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            shape: shape.to_vec(),
            forward: shape.iter().map(|&n| planner.plan_fft_forward(n)).collect(),
            inverse: shape.iter().map(|&n| planner.plan_fft_inverse(n)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn process(&self, data: &mut [Complex64], direction: FftDirection) {
        assert_eq!(data.len(), self.len());
        let plans = match direction {
            FftDirection::Forward => &self.forward,
            FftDirection::Inverse => &self.inverse,
        };
        let total = data.len();
        let mut scratch = Vec::new();
        for (axis, plan) in plans.iter().enumerate() {
            let len = self.shape[axis];
            if len == 1 {
                continue;
            }
            let stride: usize = self.shape[axis + 1..].iter().product();
            if stride == 1 {
                run_lines(plan.as_ref(), data, len);
                continue;
            }
            // Gather strided lines into a contiguous buffer, transform, scatter back.
            scratch.resize(total, Complex64::default());
            let outer = total / (len * stride);
            for o in 0..outer {
                let base = o * len * stride;
                for i in 0..len {
                    let src = &data[base + i * stride..base + (i + 1) * stride];
                    for (inner, &v) in src.iter().enumerate() {
                        scratch[(o * stride + inner) * len + i] = v;
                    }
                }
            }
            run_lines(plan.as_ref(), &mut scratch, len);
            for o in 0..outer {
                let base = o * len * stride;
                for i in 0..len {
                    let dst = &mut data[base + i * stride..base + (i + 1) * stride];
                    for (inner, v) in dst.iter_mut().enumerate() {
                        *v = scratch[(o * stride + inner) * len + i];
                    }
                }
            }
        }
    }
}

fn run_lines(plan: &dyn Fft<f64>, data: &mut [Complex64], len: usize) {
    let lines = data.len() / len;
    let per_task = (lines / (4 * rayon::current_num_threads()).max(1)).max(1);
    data.par_chunks_mut(len * per_task).for_each(|chunk| {
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(chunk, &mut scratch);
    });
}
