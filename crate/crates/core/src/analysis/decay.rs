use alloc::vec::Vec;

/// Measured 1/e decay time, in samples, of a non-negative learning curve
/// (e.g. ensemble-averaged squared error).
///
/// The curve is replaced by its running suffix maximum so that oscillating
/// (under-damped) decays are measured by their envelope. A straight line is
/// then fitted to the log-envelope from the start until it has fallen by
/// `e⁻³`, and `τ = -1/slope`. Returns `None` if the curve never decays that
/// far or starts at zero.
pub fn decay_time(curve: &[f64]) -> Option<f64> {
    let first = *curve.first()?;
    if !(first > 0.0) {
        return None;
    }
    let mut envelope: Vec<f64> = curve.to_vec();
    for i in (0..envelope.len().saturating_sub(1)).rev() {
        envelope[i] = envelope[i].max(envelope[i + 1]);
    }
    let start = envelope[0];
    let stop = start * libm::exp(-3.0);
    let end = envelope.iter().position(|&v| v <= stop)?;
    if end < 2 {
        return None;
    }
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (n, v) in envelope[..=end].iter().enumerate() {
        let x = n as f64;
        let y = libm::log(*v / start);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let m = (end + 1) as f64;
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    (slope < 0.0).then(|| -1.0 / slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_exponential() {
        let curve: Vec<f64> = (0..2000).map(|n| libm::exp(-(n as f64) / 150.0)).collect();
        let tau = decay_time(&curve).unwrap();
        assert!((tau - 150.0).abs() < 1e-6, "{tau}");
    }

    #[test]
    fn oscillating_envelope() {
        let curve: Vec<f64> = (0..4000)
            .map(|n| {
                let t = n as f64;
                let c = libm::cos(0.05 * t);
                libm::exp(-t / 100.0) * c * c
            })
            .collect();
        let tau = decay_time(&curve).unwrap();
        assert!((tau - 100.0).abs() < 15.0, "{tau}");
    }

    #[test]
    fn no_decay() {
        assert_eq!(decay_time(&[1.0; 100]), None);
        assert_eq!(decay_time(&[]), None);
        assert_eq!(decay_time(&[0.0, 0.0]), None);
    }
}
