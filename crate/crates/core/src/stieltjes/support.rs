use super::SpectralWeights;

const SAMPLES_PER_INTERVAL: usize = 400;

/// Hull `[lo, hi]` of the continuous part of the LSD for ratio `y` and
/// discrete population `h`.
///
/// Uses the characterisation of the complement of the support through the
/// inverse map `z(m̲) = -1/m̲ + y ∫ t/(1+t m̲) dH`: support edges are the
/// critical values of `z` on the real `m̲` axis. The axis is split at the poles
/// `0` and `-1/t_i`; every interval is scanned for sign changes of `z'` and the
/// roots are refined by bisection.
pub fn discrete_support_hull(y: f64, h: &SpectralWeights) -> (f64, f64) {
    if y == 0.0 {
        return (h.min_atom(), h.max_atom());
    }
    let positive: Vec<(f64, f64)> = h.iter().filter(|(t, _)| *t > 0.0).collect();
    if positive.is_empty() {
        return (0.0, 0.0);
    }

    let zmap = |m: f64| -> f64 { -1.0 / m + y * positive.iter().map(|&(t, w)| w * t / (1.0 + t * m)).sum::<f64>() };
    let dz = |m: f64| -> f64 {
        1.0 / (m * m)
            - y * positive
                .iter()
                .map(|&(t, w)| {
                    let q = t / (1.0 + t * m);
                    w * q * q
                })
                .sum::<f64>()
    };

    let mut poles: Vec<f64> = positive.iter().map(|&(t, _)| -1.0 / t).collect();
    poles.sort_by(|a, b| a.total_cmp(b));
    poles.dedup();
    let scale = poles.iter().fold(0.0f64, |acc, p| acc.max(p.abs()));

    // Interval endpoints; None stands for ±∞.
    let mut intervals: Vec<(Option<f64>, Option<f64>)> = Vec::with_capacity(poles.len() + 2);
    intervals.push((None, Some(poles[0])));
    for pair in poles.windows(2) {
        intervals.push((Some(pair[0]), Some(pair[1])));
    }
    intervals.push((Some(*poles.last().unwrap()), Some(0.0)));
    intervals.push((Some(0.0), None));

    let mut critical: Vec<f64> = Vec::new();
    for (a, b) in intervals {
        let nodes = interval_nodes(a, b, scale);
        for pair in nodes.windows(2) {
            let (l, r) = (pair[0], pair[1]);
            let (dl, dr) = (dz(l), dz(r));
            if !(dl.is_finite() && dr.is_finite()) || dl.signum() == dr.signum() {
                continue;
            }
            let root = bisect(&dz, l, r, dl);
            critical.push(zmap(root));
        }
    }

    let hi = critical.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut lo = critical.iter().copied().fold(f64::INFINITY, f64::min);
    if (y - 1.0).abs() < 1e-12 || !lo.is_finite() || lo < 0.0 {
        lo = 0.0;
    }
    (lo, hi)
}

fn interval_nodes(a: Option<f64>, b: Option<f64>, scale: f64) -> Vec<f64> {
    let k = SAMPLES_PER_INTERVAL;
    match (a, b) {
        (Some(a), Some(b)) => (1..k)
            .map(|j| {
                let s = 0.5 * (1.0 - (std::f64::consts::PI * j as f64 / k as f64).cos());
                a + (b - a) * s
            })
            .collect(),
        (None, Some(b)) => {
            (0..k).rev().map(|j| b - scale * 10f64.powf(-10.0 + 20.0 * j as f64 / (k - 1) as f64)).collect()
        }
        (Some(a), None) => (0..k).map(|j| a + scale * 10f64.powf(-10.0 + 20.0 * j as f64 / (k - 1) as f64)).collect(),
        (None, None) => unreachable!("the real axis is always split at 0"),
    }
}

fn bisect(f: &impl Fn(f64) -> f64, mut l: f64, mut r: f64, fl: f64) -> f64 {
    let left_sign = fl.signum();
    for _ in 0..200 {
        let mid = 0.5 * (l + r);
        if mid <= l || mid >= r {
            break;
        }
        if f(mid).signum() == left_sign {
            l = mid;
        } else {
            r = mid;
        }
    }
    0.5 * (l + r)
}
