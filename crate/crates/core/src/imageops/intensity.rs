use super::Image2D;

/// Clamp applied before the logit so that 0 and 1 stay finite.
pub const LOGIT_EPS: f64 = 1e-6;

fn logit(p: f64) -> f64 {
    let p = p.clamp(LOGIT_EPS, 1.0 - LOGIT_EPS);
    (p / (1.0 - p)).ln()
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Min-max rescale to `[0, 1]`; constant images become all zeros.
pub fn normalize01(img: &Image2D) -> Image2D {
    let (lo, hi) = img.range();
    if hi > lo {
        let span = hi - lo;
        img.map(|v| (v - lo) / span)
    } else {
        img.map(|_| 0.0)
    }
}

/// Shifts every pixel in logit space by `logit(c)`; `c = 0.5` is the identity.
pub fn adjust_brightness(img: &Image2D, c: f64) -> Image2D {
    let shift = logit(c);
    img.map(|p| sigmoid(logit(p) + shift))
}

/// Scales every pixel in logit space by `c`; `c = 1` is the identity.
pub fn adjust_contrast(img: &Image2D, c: f64) -> Image2D {
    img.map(|p| sigmoid(logit(p) * c))
}
