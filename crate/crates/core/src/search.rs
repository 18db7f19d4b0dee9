//! One-dimensional extremum location: uniform grid scan followed by
//! successive parabolic interpolation inside the bracketing cell.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    /// Abscissa of the refined extremum.
    pub t: f64,
    pub value: f64,
    /// Width of the final bracket.
    pub residual: f64,
}

/// `samples` equally spaced points on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, samples: usize) -> Vec<f64> {
    assert!(samples >= 2, "grid needs at least two samples");
    let step = t_max / (samples - 1) as f64;
    (0..samples).map(|i| i as f64 * step).collect()
}

/// Points `0, step, 2 step, ...` up to and including `t_max`.
pub fn stepped_grid(t_max: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0 && t_max > 0.0);
    let count = (t_max / step).ceil() as usize;
    (0..=count).map(|i| (i as f64 * step).min(t_max)).collect()
}

/// Indices of interior local maxima (`v[i-1] < v[i] >= v[i+1]`).
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .collect()
}

/// Indices of interior local minima (`v[i-1] > v[i] <= v[i+1]`).
pub fn local_minima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] < values[i - 1] && values[i] <= values[i + 1])
        .collect()
}

pub fn argmax(values: &[f64]) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_nan())
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
}

pub fn argmin(values: &[f64]) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_nan())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
}

const GOLDEN: f64 = 0.381_966_011_250_105_1;

/// Maximizes `f` inside `[lo, hi]`, given an interior point `mid` whose value
/// is not below the endpoints. Parabolic steps are taken when they land
/// safely inside the bracket, golden-section steps otherwise.
pub fn refine_max<F: Fn(f64) -> f64>(f: F, lo: f64, mid: f64, hi: f64, tol: f64) -> Extremum {
    let (mut a, mut c) = (lo.min(hi), lo.max(hi));
    let mut b = mid.clamp(a, c);
    let mut fb = f(b);
    let mut fa = f(a);
    let mut fc = f(c);
    // an endpoint can win when the grid peak sits on the bracket edge
    if fa > fb || fc > fb {
        let (t, v) = if fa >= fc { (a, fa) } else { (c, fc) };
        if v > fb {
            b = if t == a {
                a + GOLDEN * (c - a)
            } else {
                c - GOLDEN * (c - a)
            };
            fb = f(b);
            if fb < v {
                return Extremum {
                    t,
                    value: v,
                    residual: c - a,
                };
            }
        }
    }
    for _ in 0..200 {
        if c - a <= tol {
            break;
        }
        let denom = (b - a) * (fb - fc) - (b - c) * (fb - fa);
        let numer = (b - a).powi(2) * (fb - fc) - (b - c).powi(2) * (fb - fa);
        let mut x = if denom != 0.0 {
            b - 0.5 * numer / denom
        } else {
            f64::NAN
        };
        let min_gap = 0.25 * tol;
        if !x.is_finite() || x <= a + min_gap || x >= c - min_gap || (x - b).abs() < min_gap {
            x = if b - a > c - b {
                b - GOLDEN * (b - a)
            } else {
                b + GOLDEN * (c - b)
            };
        }
        let fx = f(x);
        if fx >= fb {
            if x < b {
                c = b;
                fc = fb;
            } else {
                a = b;
                fa = fb;
            }
            b = x;
            fb = fx;
        } else if x < b {
            a = x;
            fa = fx;
        } else {
            c = x;
            fc = fx;
        }
    }
    Extremum {
        t: b,
        value: fb,
        residual: c - a,
    }
}

pub fn refine_min<F: Fn(f64) -> f64>(f: F, lo: f64, mid: f64, hi: f64, tol: f64) -> Extremum {
    let e = refine_max(|t| -f(t), lo, mid, hi, tol);
    Extremum {
        value: -e.value,
        ..e
    }
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Extremum {
    let (mut a, mut b) = (lo, hi);
    let mut x1 = a + GOLDEN * (b - a);
    let mut x2 = b - GOLDEN * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - GOLDEN * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + GOLDEN * (b - a);
            f1 = f(x1);
        }
    }
    let (t, value) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    let (fa, fb) = (f(lo), f(hi));
    if fa > value && fa >= fb {
        return Extremum {
            t: lo,
            value: fa,
            residual: b - a,
        };
    }
    if fb > value {
        return Extremum {
            t: hi,
            value: fb,
            residual: b - a,
        };
    }
    Extremum {
        t,
        value,
        residual: b - a,
    }
}

/// Refines the grid sample `idx` of `values` (sampled at `grid`) into a
/// maximum of the underlying continuous `f`.
pub fn refine_grid_max<F: Fn(f64) -> f64>(
    f: F,
    grid: &[f64],
    values: &[f64],
    idx: usize,
    tol: f64,
) -> Extremum {
    let lo = grid[idx.saturating_sub(1)];
    let hi = grid[(idx + 1).min(grid.len() - 1)];
    let e = refine_max(&f, lo, grid[idx], hi, tol);
    if e.value >= values[idx] {
        e
    } else {
        Extremum {
            t: grid[idx],
            value: values[idx],
            residual: hi - lo,
        }
    }
}

pub fn refine_grid_min<F: Fn(f64) -> f64>(
    f: F,
    grid: &[f64],
    values: &[f64],
    idx: usize,
    tol: f64,
) -> Extremum {
    let neg: Vec<f64> = values.iter().map(|v| -v).collect();
    let e = refine_grid_max(|t| -f(t), grid, &neg, idx, tol);
    Extremum {
        value: -e.value,
        ..e
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_found_in_one_step() {
        let e = refine_max(|x| -(x - 0.3).powi(2) + 2.0, 0.0, 0.2, 1.0, 1e-10);
        assert!((e.t - 0.3).abs() < 1e-8);
        assert!((e.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn non_quadratic_peak() {
        let e = refine_max(|x: f64| (x * 3.0).sin(), 0.0, 0.5, 1.0, 1e-10);
        assert!((e.t - std::f64::consts::FRAC_PI_6).abs() < 1e-6);
        let m = refine_min(|x: f64| (x - 0.7).powi(4), 0.0, 0.5, 1.0, 1e-10);
        assert!((m.t - 0.7).abs() < 1e-2);
        assert!(m.value < 1e-8);
    }

    #[test]
    fn golden_section() {
        let e = golden_max(|x| -(x - 1.234).abs(), 0.0, 2.0, 1e-9);
        assert!((e.t - 1.234).abs() < 1e-8);
        let edge = golden_max(|x| x, 0.0, 1.0, 1e-9);
        assert_eq!(edge.t, 1.0);
    }

    #[test]
    fn extrema_indices() {
        let v = [0.0, 1.0, 0.5, 0.2, 0.9, 0.1];
        assert_eq!(local_maxima(&v), vec![1, 4]);
        assert_eq!(local_minima(&v), vec![3]);
        assert_eq!(argmax(&v), Some(1));
        assert_eq!(argmin(&v), Some(0));
    }

    #[test]
    fn grids() {
        assert_eq!(uniform_grid(1.0, 3), vec![0.0, 0.5, 1.0]);
        let g = stepped_grid(1.0, 0.3);
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
    }
}
