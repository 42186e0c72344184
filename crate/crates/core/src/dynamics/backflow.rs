use crate::error::{Error, Result};
use crate::scalar::Real;

/// A maximal run of grid segments on which `D` increases.
#[derive(Clone, Debug, PartialEq)]
pub struct BackflowInterval<T> {
    pub start_index: usize,
    pub end_index: usize,
    pub start: T,
    pub end: T,
    /// `D(end) − D(start)`.
    pub gain: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Backflow<T> {
    pub intervals: Vec<BackflowInterval<T>>,
    /// Sum of the interval gains.
    pub measure: T,
}

/// Finds the intervals where the forward-difference slope of `D` exceeds
/// `slope_tol` and accumulates the trace-distance gain over them.
pub fn backflow_intervals<T: Real>(d_values: &[T], times: &[T], slope_tol: T) -> Result<Backflow<T>> {
    if d_values.len() != times.len() || times.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "backflow needs >= 2 aligned samples, got {} values and {} times",
            d_values.len(),
            times.len()
        )));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("backflow times must be strictly increasing".into()));
    }

    let mut intervals: Vec<BackflowInterval<T>> = Vec::new();
    for k in 0..times.len() - 1 {
        let slope = (d_values[k + 1] - d_values[k]) / (times[k + 1] - times[k]);
        if slope <= slope_tol {
            continue;
        }
        match intervals.last_mut() {
            Some(last) if last.end_index == k => {
                last.end_index = k + 1;
                last.end = times[k + 1];
                last.gain = d_values[k + 1] - d_values[last.start_index];
            }
            _ => intervals.push(BackflowInterval {
                start_index: k,
                end_index: k + 1,
                start: times[k],
                end: times[k + 1],
                gain: d_values[k + 1] - d_values[k],
            }),
        }
    }
    let measure = intervals.iter().map(|i| i.gain).sum();
    Ok(Backflow { intervals, measure })
}
