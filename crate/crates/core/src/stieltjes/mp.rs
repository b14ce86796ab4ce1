use num_complex::Complex64;

use crate::error::{Error, Result};

/// Companion transform of the Marchenko–Pastur law in closed form.
///
/// Returns the root of `z m̲² + (z + 1 - y) m̲ + 1 = 0` that is a Stieltjes
/// transform: `Im m̲` has the sign of `Im z` off the axis, and on the real axis
/// outside the support the root on the increasing branch
/// (`1/m̲² - y/(1+m̲)² > 0`).
pub fn mp_quadratic(z: Complex64, y: f64) -> Result<Complex64> {
    if !(y.is_finite() && y >= 0.0) {
        return Err(Error::InvalidRatio(format!("y = {y} must be finite and >= 0")));
    }
    if z.norm() == 0.0 {
        return Err(Error::BranchAmbiguity(z));
    }
    let b = z + 1.0 - y;
    let disc = b * b - 4.0 * z;
    let sq = disc.sqrt();
    // Larger-magnitude root first, the other from the product of roots 1/z.
    let big = if (-b + sq).norm() >= (-b - sq).norm() { (-b + sq) / (2.0 * z) } else { (-b - sq) / (2.0 * z) };
    let small = 1.0 / (z * big);
    let roots = [big, small];

    if z.im != 0.0 {
        let pick = if z.im > 0.0 {
            if roots[0].im >= roots[1].im {
                roots[0]
            } else {
                roots[1]
            }
        } else if roots[0].im <= roots[1].im {
            roots[0]
        } else {
            roots[1]
        };
        return Ok(pick);
    }

    // Real axis: both roots must be real, and exactly one sits on the increasing branch.
    let scale = b.norm().max(1.0);
    if disc.re <= 1e-14 * scale * scale {
        return Err(Error::BranchAmbiguity(z));
    }
    let increasing: Vec<f64> = roots
        .iter()
        .map(|r| r.re)
        .filter(|&r| {
            let d = 1.0 / (r * r) - y / ((1.0 + r) * (1.0 + r));
            d > 0.0
        })
        .collect();
    match increasing.as_slice() {
        [r] => Ok(Complex64::new(*r, 0.0)),
        _ => Err(Error::BranchAmbiguity(z)),
    }
}

/// Stieltjes transform `m(w) = ∫ dF_y(λ)/(λ - w)` of the Marchenko–Pastur law.
pub fn mp_stieltjes(w: Complex64, y: f64) -> Result<Complex64> {
    if y <= 0.0 {
        return Ok(1.0 / (1.0 - w));
    }
    let mu = mp_quadratic(w, y)?;
    let rough = (mu + (1.0 - y) / w) / y;
    // The conversion above divides by y, so for small y it only identifies the
    // branch. The value itself comes from the stable root pair of
    // y w m² + (w - 1 + y) m + 1 = 0.
    let a = y * w;
    let b = w - 1.0 + y;
    let sq = (b * b - 4.0 * a).sqrt();
    let q = if (b + sq).norm() >= (b - sq).norm() { -0.5 * (b + sq) } else { -0.5 * (b - sq) };
    let near = 1.0 / q;
    if a.norm() == 0.0 || q.norm() == 0.0 {
        return Ok(rough);
    }
    let far = q / a;
    Ok(if (near - rough).norm() <= (far - rough).norm() { near } else { far })
}

/// `m'(w)` by implicit differentiation of `y w m² + (w - 1 + y) m + 1 = 0`.
pub fn mp_stieltjes_derivative(w: Complex64, m: Complex64, y: f64) -> Complex64 {
    if y <= 0.0 {
        let d = 1.0 - w;
        return 1.0 / (d * d);
    }
    -(y * m * m + m) / (2.0 * y * w * m + w - 1.0 + y)
}
