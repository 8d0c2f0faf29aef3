//! One-dimensional maximizers used by the angle searches.

/// 1/φ for the golden ratio φ.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Returns the best of the final bracket's interior points and the two
/// end points, so a maximum sitting on the boundary is still found.
pub fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, iters: usize) -> Maximum {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    [(c, fc), (d, fd), (lo, f(lo)), (hi, f(hi))].into_iter().fold(
        Maximum { x: f64::NAN, value: f64::NEG_INFINITY },
        |best, (x, v)| {
            if v > best.value {
                Maximum { x, value: v }
            } else {
                best
            }
        },
    )
}

/// Locates a stationary point of a smooth `f` inside `[lo, hi]` by bisecting
/// on the sign of a central-difference derivative with step `h`.
///
/// The bracket must contain a sign change of `f'`. This resolves the
/// location of a smooth extremum far below the `√ε` limit that comparisons
/// of function values run into.
pub fn stationary_point(f: impl Fn(f64) -> f64, lo: f64, hi: f64, h: f64) -> f64 {
    let deriv = |x: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let (mut a, mut b) = (lo, hi);
    let da = deriv(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let dm = deriv(m);
        if dm == 0.0 {
            return m;
        }
        if (dm > 0.0) == (da > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Evaluates `f` on `n` points `lo + (k + offset)·step`, `step = (hi - lo)/n`,
/// and returns the best point.
pub fn grid_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize, offset: f64) -> Maximum {
    let step = (hi - lo) / n as f64;
    (0..n)
        .map(|k| {
            let x = lo + (k as f64 + offset) * step;
            Maximum { x, value: f(x) }
        })
        .fold(Maximum { x: f64::NAN, value: f64::NEG_INFINITY }, |best, m| if m.value > best.value { m } else { best })
}
