//! Grid arguments: `a:b:step` (inclusive of `b` when `step` divides the
//! range), `a:b` (step 1), a single value, or a comma-separated list.

use crate::error::AppError;

pub fn parse_real_grid(text: &str) -> Result<Vec<f64>, AppError> {
    let bad = |msg: &str| AppError::Usage(format!("grid {text:?}: {msg}"));
    let num = |s: &str| {
        s.trim().parse::<f64>().map_err(|_| bad("not a number")).and_then(|v| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad("values must be finite"))
            }
        })
    };
    if text.contains(',') {
        return text.split(',').map(num).collect();
    }
    let parts: Vec<&str> = text.split(':').collect();
    let (start, end, step) = match parts.as_slice() {
        [v] => return Ok(vec![num(v)?]),
        [a, b] => (num(a)?, num(b)?, 1.0),
        [a, b, s] => (num(a)?, num(b)?, num(s)?),
        _ => return Err(bad("expected a:b:step")),
    };
    if step <= 0.0 {
        return Err(bad("step must be positive"));
    }
    if end < start {
        return Err(bad("end is below start"));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

pub fn parse_size_grid(text: &str) -> Result<Vec<usize>, AppError> {
    parse_real_grid(text)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(AppError::Usage(format!("grid {text:?}: {v} is not a non-negative integer")))
            }
        })
        .collect()
}
