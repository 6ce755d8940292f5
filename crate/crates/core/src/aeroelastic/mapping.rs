//! Field transfer between non-matching spanwise discretizations.

use super::AeroError;

/// Map `src_v` sampled at `src_y` onto the stations `dst_y` by piecewise
/// linear interpolation. Destination points outside the source range clamp
/// to the nearest end value.
pub fn map_fields(src_y: &[f64], src_v: &[f64], dst_y: &[f64]) -> Result<Vec<f64>, AeroError> {
    if src_y.len() != src_v.len() {
        return Err(AeroError::LengthMismatch {
            expected: src_y.len(),
            got: src_v.len(),
        });
    }
    if src_y.len() < 2 || src_y.windows(2).any(|p| p[1] <= p[0]) {
        return Err(AeroError::NonMonotonicGrid);
    }
    let n = src_y.len();
    let mut out = Vec::with_capacity(dst_y.len());
    for &y in dst_y {
        if y <= src_y[0] {
            out.push(src_v[0]);
        } else if y >= src_y[n - 1] {
            out.push(src_v[n - 1]);
        } else {
            // partition_point returns the first index with src_y[i] > y
            let hi = src_y.partition_point(|&s| s <= y);
            let lo = hi - 1;
            let t = (y - src_y[lo]) / (src_y[hi] - src_y[lo]);
            out.push(src_v[lo] + t * (src_v[hi] - src_v[lo]));
        }
    }
    Ok(out)
}
