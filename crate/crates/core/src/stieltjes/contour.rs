use num_complex::Complex64;

use crate::error::{Error, Result};

/// Positively oriented rectangle `[left, right] × [-half_height, half_height]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Contour {
    pub left: f64,
    pub right: f64,
    pub half_height: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourOptions {
    /// Total node count on the first pass, split evenly over the four sides.
    pub initial_points: usize,
    /// Stop once successive extrapolated estimates differ by less than
    /// `tol · max(1, |estimate|)`.
    pub tol: f64,
    pub max_points: usize,
    /// The integrand has a branch cut on `(-∞, 0]`, so the contour must stay
    /// strictly to the right of the origin.
    pub branch_at_origin: bool,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self { initial_points: 1024, tol: 1e-9, max_points: 1 << 17, branch_at_origin: false }
    }
}

impl Contour {
    /// Rectangle enclosing `[lo, hi]` with a horizontal margin of 10% of the width.
    pub fn around(support: (f64, f64), half_height: f64) -> Self {
        let (lo, hi) = support;
        let margin = 0.1 * (hi - lo).max(1e-3 * hi.abs().max(1.0));
        Self { left: lo - margin, right: hi + margin, half_height }
    }

    /// Like [`Contour::around`] but with the left side pulled in to at most
    /// `lo / 2`, so the origin stays outside.
    pub fn excluding_origin(support: (f64, f64), half_height: f64) -> Result<Self> {
        let (lo, _) = support;
        if lo <= 0.0 {
            return Err(Error::OriginInside);
        }
        let mut c = Self::around(support, half_height);
        c.left = c.left.max(0.5 * lo);
        Ok(c)
    }

    fn corners(&self) -> [Complex64; 4] {
        let v = self.half_height;
        [
            Complex64::new(self.left, -v),
            Complex64::new(self.right, -v),
            Complex64::new(self.right, v),
            Complex64::new(self.left, v),
        ]
    }

    /// `∮ g(z) dz` by the trapezoid rule on each side, refined by doubling and
    /// accelerated with Richardson extrapolation in `h²`.
    ///
    /// Each side is a smooth parametrised segment, so the per-side trapezoid
    /// error has an even-power expansion and the extrapolation is valid even
    /// though the rectangle has corners.
    pub fn integrate<G>(&self, mut g: G, opts: &ContourOptions) -> Result<Complex64>
    where
        G: FnMut(Complex64) -> Result<Complex64>,
    {
        if opts.branch_at_origin && self.left <= 0.0 {
            return Err(Error::OriginInside);
        }
        if !(self.right > self.left) || !(self.half_height > 0.0) {
            return Err(Error::InvalidConfig("degenerate contour".into()));
        }
        let corners = self.corners();
        let mut per_side = (opts.initial_points / 4).max(4);
        let mut sides: Vec<Vec<Complex64>> = Vec::with_capacity(4);
        for s in 0..4 {
            let (a, b) = (corners[s], corners[(s + 1) % 4]);
            let mut vals = Vec::with_capacity(per_side + 1);
            for k in 0..=per_side {
                vals.push(g(a + (b - a) * (k as f64 / per_side as f64))?);
            }
            sides.push(vals);
        }
        let trap = |sides: &[Vec<Complex64>], m: usize| -> Complex64 {
            let mut total = Complex64::new(0.0, 0.0);
            for (s, vals) in sides.iter().enumerate() {
                let span = corners[(s + 1) % 4] - corners[s];
                let inner: Complex64 = vals[1..m].iter().sum();
                total += span * (inner + 0.5 * (vals[0] + vals[m])) / m as f64;
            }
            total
        };
        let mut table: Vec<Complex64> = vec![trap(&sides, per_side)];
        let mut best = table[0];
        loop {
            if 8 * per_side > opts.max_points {
                let diff =
                    (table[table.len() - 1] - table.get(table.len().wrapping_sub(2)).copied().unwrap_or(best)).norm();
                return Err(Error::NoConvergence(diff));
            }
            let next = per_side * 2;
            for s in 0..4 {
                let (a, b) = (corners[s], corners[(s + 1) % 4]);
                let old = std::mem::take(&mut sides[s]);
                let mut vals = Vec::with_capacity(next + 1);
                for (k, &v) in old[..per_side].iter().enumerate() {
                    vals.push(v);
                    vals.push(g(a + (b - a) * ((2 * k + 1) as f64 / next as f64))?);
                }
                vals.push(old[per_side]);
                sides[s] = vals;
            }
            per_side = next;
            let mut row = vec![trap(&sides, per_side)];
            let mut factor = 4.0;
            for j in 0..table.len() {
                let r = row[j] + (row[j] - table[j]) / (factor - 1.0);
                row.push(r);
                factor *= 4.0;
            }
            let estimate = *row.last().unwrap();
            let diff = (estimate - best).norm();
            best = estimate;
            table = row;
            if diff < opts.tol * estimate.norm().max(1.0) {
                return Ok(estimate);
            }
        }
    }
}

/// `∮ g dz` around the rectangle enclosing `support` with the default options
/// and `points` initial nodes.
pub fn contour_integrate<G>(g: G, support: (f64, f64), half_height: f64, points: usize) -> Result<Complex64>
where
    G: FnMut(Complex64) -> Result<Complex64>,
{
    let opts = ContourOptions { initial_points: points, ..ContourOptions::default() };
    Contour::around(support, half_height).integrate(g, &opts)
}
