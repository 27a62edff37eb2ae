use super::Image2D;

/// Align-corners bilinear resampling: corner pixel centres map onto corner
/// pixel centres.
pub fn bilinear_resize(img: &Image2D, out_h: usize, out_w: usize) -> Image2D {
    assert!(out_h > 0 && out_w > 0, "output dims must be positive");
    let scale = |n_in: usize, n_out: usize| {
        if n_out > 1 {
            (n_in - 1) as f64 / (n_out - 1) as f64
        } else {
            0.0
        }
    };
    let (sy, sx) = (scale(img.height(), out_h), scale(img.width(), out_w));
    Image2D::from_fn(out_h, out_w, |x, y| {
        img.sample(x as f64 * sx, y as f64 * sy)
            .expect("align-corners grid stays inside the source")
    })
    .expect("positive dims")
}
