use ancsat::spectrum::{welch_psd, DEFAULT_SEGMENT};
use ancsat_core::acoustics::{generate, NoiseSource};

#[test]
fn band_limited_noise_stays_in_band() {
    let fs = 16_000.0;
    let (low, high) = (200.0, 800.0);
    let x = generate(&NoiseSource::band_limited(2.0, low, high, fs, 9), 1 << 19).unwrap();
    let variance = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
    assert!((variance / 2.0 - 1.0).abs() < 0.05, "{variance}");

    let psd = welch_psd(&x, fs, DEFAULT_SEGMENT, DEFAULT_SEGMENT / 2).unwrap();
    let total = psd.total_power();
    // the transition band of the shaping filter straddles each edge
    let guard = 100.0;
    let near_band = psd.band_power(low - guard, high + guard);
    assert!(near_band / total >= 0.95, "{}", near_band / total);

    let mean_density = |lo: f64, hi: f64| psd.band_power(lo, hi) / (hi - lo);
    let inside = mean_density(low, high);
    let below = mean_density(0.0, low / 2.0);
    let above = mean_density(1.5 * high, fs / 2.0);
    assert!(10.0 * (inside / below).log10() >= 20.0, "below {:.1} dB", 10.0 * (inside / below).log10());
    assert!(10.0 * (inside / above).log10() >= 20.0, "above {:.1} dB", 10.0 * (inside / above).log10());
}

#[test]
fn white_noise_is_flat() {
    let fs = 16_000.0;
    let x = generate(&NoiseSource::white(1.0, fs, 2), 1 << 18).unwrap();
    let psd = welch_psd(&x, fs, DEFAULT_SEGMENT, DEFAULT_SEGMENT / 2).unwrap();
    let quarter = psd.band_power(0.0, fs / 8.0);
    let top = psd.band_power(3.0 * fs / 8.0, fs / 2.0);
    assert!((quarter / top - 1.0).abs() < 0.1, "{quarter} vs {top}");
}
