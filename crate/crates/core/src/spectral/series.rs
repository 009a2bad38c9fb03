//! Spectral differentiation and resampling of periodic series sampled on
//! a uniform grid over `[0, 2π)`.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

fn spectrum(samples: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

fn inverse(mut spec: Vec<Complex64>) -> Vec<f64> {
    let n = spec.len();
    FftPlanner::new().plan_fft_inverse(n).process(&mut spec);
    spec.into_iter().map(|c| c.re / n as f64).collect()
}

/// Signed wavenumber of FFT bin `i`; the Nyquist bin of an even length
/// is reported as `None`.
fn wavenumber(i: usize, n: usize) -> Option<f64> {
    if 2 * i == n {
        None
    } else if 2 * i < n {
        Some(i as f64)
    } else {
        Some(i as f64 - n as f64)
    }
}

/// `order`-th derivative of the trigonometric interpolant. The Nyquist
/// mode is dropped.
pub fn spectral_derivative(samples: &[f64], order: u32) -> Vec<f64> {
    let n = samples.len();
    if n == 0 {
        return Vec::new();
    }
    let mut spec = spectrum(samples);
    let i_pow = Complex64::new(0.0, 1.0).powu(order);
    for (i, c) in spec.iter_mut().enumerate() {
        *c = match wavenumber(i, n) {
            Some(k) => *c * i_pow * k.powi(order as i32),
            None => Complex64::new(0.0, 0.0),
        };
    }
    inverse(spec)
}

/// Values of the trigonometric interpolant on a grid of `n_new >= n`
/// points. The Nyquist mode is dropped.
pub fn spectral_resample(samples: &[f64], n_new: usize) -> Vec<f64> {
    let n = samples.len();
    assert!(n_new >= n, "resampling only refines the grid");
    let spec = spectrum(samples);
    let mut out = vec![Complex64::new(0.0, 0.0); n_new];
    for (i, c) in spec.iter().enumerate() {
        if let Some(k) = wavenumber(i, n) {
            let dst = if k >= 0.0 { k as usize } else { (n_new as f64 + k) as usize };
            out[dst] = *c;
        }
    }
    let scale = n_new as f64 / n as f64;
    inverse(out).into_iter().map(|x| x * scale).collect()
}

/// Turning points `(t, p(t))` of the trigonometric interpolant of one
/// period of samples, in increasing `t`, located by bisection on the
/// derivative inside each sample interval where it changes sign. An
/// extremum falling on a sample is not reported.
pub fn turning_points(samples: &[f64]) -> Vec<(f64, f64)> {
    let n = samples.len();
    if n < 3 {
        return Vec::new();
    }
    let spec = spectrum(samples);
    let bins: Vec<(f64, Complex64)> = spec
        .iter()
        .enumerate()
        .filter_map(|(i, c)| wavenumber(i, n).map(|k| (k, *c / n as f64)))
        .collect();
    let eval = |t: f64, order: u32| -> f64 {
        let i_pow = Complex64::new(0.0, 1.0).powu(order);
        bins.iter()
            .map(|&(k, c)| (c * i_pow * k.powi(order as i32) * Complex64::from_polar(1.0, k * t)).re)
            .sum()
    };
    let d = spectral_derivative(samples, 1);
    let dt = std::f64::consts::TAU / n as f64;
    let mut out = Vec::new();
    for i in 0..n {
        let (d0, d1) = (d[i], d[(i + 1) % n]);
        if d0 == 0.0 || d1 == 0.0 || (d0 > 0.0) == (d1 > 0.0) {
            continue;
        }
        let (mut lo, mut hi) = (i as f64 * dt, (i + 1) as f64 * dt);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if (eval(mid, 1) > 0.0) == (d0 > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        out.push((t, eval(t, 0)));
    }
    out
}
