//! Small statistics helpers for Monte-Carlo reporting.

/// Two-sided Wilson score interval for a binomial proportion.
#[derive(Clone, Copy, Debug)]
pub struct WilsonInterval {
    pub lo: f64,
    pub hi: f64,
}

/// Wilson interval at `z` standard normal quantiles (z = 1.96 for 95%).
pub fn wilson(successes: u64, trials: u64, z: f64) -> WilsonInterval {
    if trials == 0 {
        return WilsonInterval { lo: 0.0, hi: 1.0 };
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    WilsonInterval {
        lo: (center - half).max(0.0),
        hi: (center + half).min(1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_basics() {
        let w = wilson(50, 100, 1.96);
        assert!(w.lo < 0.5 && 0.5 < w.hi);
        assert!(w.hi - w.lo < 0.25);
        let w0 = wilson(0, 100, 1.96);
        assert!(w0.lo == 0.0 && w0.hi > 0.0);
        let all = wilson(100, 100, 1.96);
        assert!(all.hi > 0.999 && all.lo < 1.0);
    }
}
