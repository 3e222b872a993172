//! Preprocessing filters: zero-phase Butterworth lowpass and a short-time
//! Wiener denoiser driven by a noise spectrum from a footstep-free interval.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Second-order sections (b0, b1, b2, a1, a2) of an order-4 Butterworth
/// lowpass designed by the bilinear transform with prewarped cutoff.
fn butterworth4_sections(cutoff: f64, sample_rate: f64) -> [[f64; 5]; 2] {
    let omega = (std::f64::consts::PI * cutoff / sample_rate).tan();
    // Pole quality factors of the analog order-4 Butterworth prototype.
    let qs = [
        1.0 / (2.0 * (std::f64::consts::PI / 8.0).cos()),
        1.0 / (2.0 * (3.0 * std::f64::consts::PI / 8.0).cos()),
    ];
    let mut sections = [[0.0; 5]; 2];
    for (section, q) in sections.iter_mut().zip(qs) {
        let d = omega * omega + omega / q + 1.0;
        let b0 = omega * omega / d;
        section[0] = b0;
        section[1] = 2.0 * b0;
        section[2] = b0;
        section[3] = 2.0 * (omega * omega - 1.0) / d;
        section[4] = (omega * omega - omega / q + 1.0) / d;
    }
    sections
}

/// Run one biquad with state initialized to steady state for a constant
/// input equal to the first sample, so level offsets cause no startup
/// transient (the sections have unit DC gain).
fn biquad(x: &[f64], s: &[f64; 5]) -> Vec<f64> {
    let mut y = vec![0.0; x.len()];
    let x0 = x.first().copied().unwrap_or(0.0);
    let (mut x1, mut x2, mut y1, mut y2) = (x0, x0, x0, x0);
    for (k, &xk) in x.iter().enumerate() {
        let yk = s[0] * xk + s[1] * x1 + s[2] * x2 - s[3] * y1 - s[4] * y2;
        x2 = x1;
        x1 = xk;
        y2 = y1;
        y1 = yk;
        y[k] = yk;
    }
    y
}

/// Prediction coefficients `c` with `x̂[t] = Σ c_j x[t−j]`, fit by Burg's
/// method. Burg keeps every reflection coefficient in [−1, 1], so the
/// recursion never explodes when used to extrapolate.
fn burg_predictor(x: &[f64], order: usize) -> Vec<f64> {
    let n = x.len();
    let mut c: Vec<f64> = Vec::new();
    if n < 2 {
        return c;
    }
    let mut f = x.to_vec();
    let mut b = x.to_vec();
    for m in 0..order.min(n - 1) {
        let mut num = 0.0;
        let mut den = 0.0;
        for t in (m + 1)..n {
            num += f[t] * b[t - 1];
            den += f[t] * f[t] + b[t - 1] * b[t - 1];
        }
        if !(den > f64::MIN_POSITIVE) {
            break;
        }
        let k = 2.0 * num / den;
        let prev = c.clone();
        for j in 0..m {
            c[j] = prev[j] - k * prev[m - 1 - j];
        }
        c.push(k);
        for t in ((m + 1)..n).rev() {
            let ft = f[t];
            f[t] = ft - k * b[t - 1];
            b[t] = b[t - 1] - k * ft;
        }
    }
    c
}

const AR_ORDER: usize = 16;
const AR_FIT_LEN: usize = 128;

/// Continue `x` past its end for `pad` samples by linear prediction.
fn ar_extend(x: &[f64], pad: usize) -> Vec<f64> {
    let fit = x.len().min(AR_FIT_LEN);
    let tail = &x[x.len() - fit..];
    let c = burg_predictor(tail, AR_ORDER);
    let mut hist = tail.to_vec();
    let mut out = Vec::with_capacity(pad);
    for _ in 0..pad {
        let mut v = 0.0;
        for (j, cj) in c.iter().enumerate() {
            v += cj * hist[hist.len() - 1 - j];
        }
        out.push(v);
        hist.push(v);
    }
    out
}

/// Forward-backward filtering over a padded copy, so the response is
/// zero-phase and edge transients decay inside the padding. The padding
/// continues the signal by linear prediction: tones, drifts, and decaying
/// rings extend seamlessly, which keeps the reverse pass from dragging
/// edge discontinuities back into the kept samples.
fn filtfilt(x: &[f64], sections: &[[f64; 5]; 2], pad: usize) -> Vec<f64> {
    let n = x.len();
    let pad = pad.min(n - 1);
    let reversed: Vec<f64> = x.iter().rev().cloned().collect();
    let mut pre = ar_extend(&reversed, pad);
    pre.reverse();
    let post = ar_extend(x, pad);
    let mut ext = Vec::with_capacity(n + 2 * pad);
    ext.extend_from_slice(&pre);
    ext.extend_from_slice(x);
    ext.extend_from_slice(&post);
    let mut y = ext;
    for s in sections {
        y = biquad(&y, s);
    }
    y.reverse();
    for s in sections {
        y = biquad(&y, s);
    }
    y.reverse();
    y[pad..pad + n].to_vec()
}

/// Zero-phase order-4 Butterworth lowpass applied to every channel.
/// The effective (forward-backward) stopband attenuation one octave above
/// the cutoff exceeds 40 dB.
pub fn lowpass(signal: &Signal, cutoff: f64) -> Result<Signal> {
    let nyquist = signal.sample_rate / 2.0;
    if !(cutoff > 0.0 && cutoff < nyquist) {
        return Err(Error::config(format!(
            "lowpass cutoff {cutoff} Hz must lie in (0, {nyquist}) Hz"
        )));
    }
    if signal.len() < 2 {
        return Err(Error::validation("lowpass needs at least two samples"));
    }
    let sections = butterworth4_sections(cutoff, signal.sample_rate);
    let pad = ((9.0 * signal.sample_rate / cutoff) as usize).max(150);
    let channels = signal
        .channels
        .iter()
        .map(|ch| filtfilt(ch, &sections, pad))
        .collect();
    Signal::new(signal.sample_rate, channels, signal.units, signal.start_time)
}

/// Per-channel noise power spectrum on the short-time frame grid used by
/// [`wiener_denoise`].
#[derive(Debug, Clone)]
pub struct NoisePsd {
    pub frame_len: usize,
    pub psd: Vec<Vec<f64>>,
}

/// Short-time frame length for the Wiener filter, in samples.
pub const WIENER_FRAME_LEN: usize = 256;

/// Minimum usable noise-interval length in seconds.
pub const MIN_NOISE_INTERVAL: f64 = 0.5;

fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos()))
        .collect()
}

/// Average windowed periodogram of the declared footstep-free interval.
pub fn estimate_noise_psd(signal: &Signal, interval: (f64, f64)) -> Result<NoisePsd> {
    let (t0, t1) = interval;
    if !(t1 > t0) {
        return Err(Error::config("noise interval must have positive length"));
    }
    if t1 - t0 < MIN_NOISE_INTERVAL {
        return Err(Error::config(format!(
            "noise interval {:.3} s shorter than the {MIN_NOISE_INTERVAL} s minimum",
            t1 - t0
        )));
    }
    let end = signal.time_at(signal.len().saturating_sub(1));
    if t0 < signal.start_time - 1e-9 || t1 > end + 1e-9 {
        return Err(Error::config(format!(
            "noise interval [{t0}, {t1}] lies outside the recording [{}, {end}]",
            signal.start_time
        )));
    }
    let k0 = signal.index_at(t0);
    let k1 = signal.index_at(t1);
    let frame = WIENER_FRAME_LEN;
    if k1 - k0 < frame {
        return Err(Error::config(
            "noise interval too short for the analysis frame",
        ));
    }
    let window = hann(frame);
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(frame);
    let hop = frame / 2;
    let mut psd = Vec::with_capacity(signal.channel_count());
    for ch in &signal.channels {
        let mut acc = vec![0.0; frame];
        let mut frames = 0usize;
        let mut start = k0;
        while start + frame <= k1 {
            let mut buf: Vec<Complex<f64>> = ch[start..start + frame]
                .iter()
                .zip(&window)
                .map(|(x, w)| Complex::new(x * w, 0.0))
                .collect();
            fft.process(&mut buf);
            for (a, b) in acc.iter_mut().zip(&buf) {
                *a += b.norm_sqr();
            }
            frames += 1;
            start += hop;
        }
        for a in acc.iter_mut() {
            *a /= frames as f64;
        }
        psd.push(acc);
    }
    Ok(NoisePsd {
        frame_len: frame,
        psd,
    })
}

/// Frequency-domain Wiener denoising: per short-time frame, the gain
/// `H(f) = max(0, 1 - N(f)/X(f))` scales each bin, and frames overlap-add
/// back to the original length.
pub fn wiener_denoise(signal: &Signal, noise: &NoisePsd) -> Result<Signal> {
    if noise.psd.len() != signal.channel_count() {
        return Err(Error::config(
            "noise PSD channel count does not match the signal",
        ));
    }
    let frame = noise.frame_len;
    let hop = frame / 2;
    let n = signal.len();
    if n < frame {
        return Err(Error::validation(
            "signal shorter than one Wiener analysis frame",
        ));
    }
    let window = hann(frame);
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(frame);
    let ifft = planner.plan_fft_inverse(frame);

    let mut channels = Vec::with_capacity(signal.channel_count());
    for (ch, npsd) in signal.channels.iter().zip(&noise.psd) {
        let mut out = vec![0.0; n];
        let mut weight = vec![0.0; n];
        // Frames start half a frame early so every sample is covered by two
        // overlapping windows; the summed squared window then stays bounded
        // away from zero and the normalization cannot amplify edges.
        let mut start = -(hop as isize);
        while start < n as isize {
            let mut buf: Vec<Complex<f64>> = (0..frame)
                .map(|k| {
                    let idx = start + k as isize;
                    let x = if idx >= 0 && (idx as usize) < n {
                        ch[idx as usize]
                    } else {
                        0.0
                    };
                    Complex::new(x * window[k], 0.0)
                })
                .collect();
            fft.process(&mut buf);
            for (bin, v) in buf.iter_mut().enumerate() {
                let x_pow = v.norm_sqr();
                let gain = if x_pow > 0.0 {
                    (1.0 - npsd[bin] / x_pow).max(0.0)
                } else {
                    0.0
                };
                *v *= gain;
            }
            ifft.process(&mut buf);
            for k in 0..frame {
                let idx = start + k as isize;
                if idx >= 0 && (idx as usize) < n {
                    out[idx as usize] += buf[k].re / frame as f64 * window[k];
                    weight[idx as usize] += window[k] * window[k];
                }
            }
            start += hop as isize;
        }
        for (o, w) in out.iter_mut().zip(&weight) {
            if *w > 0.0 {
                *o /= w;
            }
        }
        channels.push(out);
    }
    Signal::new(signal.sample_rate, channels, signal.units, signal.start_time)
}
