//! Log-domain arithmetic helpers.

/// Streaming log-sum-exp accumulator.
///
/// Keeps a running maximum and a rescaled sum so that terms of any magnitude
/// can be pushed one at a time without overflow. Two accumulators can be
/// merged, which lets disjoint blocks of a sum be reduced independently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSumExp {
    max: f64,
    sum: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSumExp {
    pub const fn new() -> Self {
        Self { max: f64::NEG_INFINITY, sum: 0.0 }
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            self.sum = self.sum * libm::exp(self.max - x) + 1.0;
            self.max = x;
        } else {
            self.sum += libm::exp(x - self.max);
        }
    }

    pub fn merge(&mut self, other: &LogSumExp) {
        if other.max == f64::NEG_INFINITY {
            return;
        }
        if other.max > self.max {
            self.sum = self.sum * libm::exp(self.max - other.max) + other.sum;
            self.max = other.max;
        } else {
            self.sum += other.sum * libm::exp(other.max - self.max);
        }
    }

    /// Natural log of the accumulated sum; `-inf` when nothing was pushed.
    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + libm::log(self.sum)
        }
    }
}

impl FromIterator<f64> for LogSumExp {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = LogSumExp::new();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

/// `log(sum(exp(xs)))`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<LogSumExp>().value()
}

/// `ln C(n, r)` via log-gamma.
pub fn ln_binomial(n: usize, r: usize) -> f64 {
    debug_assert!(r <= n);
    if r == 0 || r == n {
        return 0.0;
    }
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(r as f64 + 1.0) - libm::lgamma((n - r) as f64 + 1.0)
}

/// Numerically stable logistic function.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}
