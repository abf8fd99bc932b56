//! Derivative-free scalar searches used by the sweeps and certifiers.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
    /// Width of the final bracket.
    pub width: f64,
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
///
/// Stops once the bracket is narrower than `tol` or after `max_iter` steps.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> Extremum {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;
    while (b - a).abs() > tol && iterations < max_iter {
        iterations += 1;
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let (x, value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Extremum { x, value, iterations, width: (b - a).abs() }
}

pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64, max_iter: usize) -> Extremum {
    let e = golden_min(|x| -f(x), a, b, tol, max_iter);
    Extremum { value: -e.value, ..e }
}

/// Indices of the local maxima of a periodic sample sequence, best first.
///
/// Plateaus contribute their first index only.
pub fn periodic_peaks(values: &[f64]) -> Vec<usize> {
    let k = values.len();
    if k == 0 {
        return Vec::new();
    }
    let mut peaks: Vec<usize> = (0..k)
        .filter(|&i| {
            let prev = values[(i + k - 1) % k];
            let next = values[(i + 1) % k];
            values[i] > prev && values[i] >= next
        })
        .collect();
    if peaks.is_empty() {
        // constant sequence
        peaks.push(0);
    }
    peaks.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    peaks
}

/// Result of [`ConvexPlaneMinimizer::minimize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneMinimum {
    pub re: f64,
    pub im: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Minimizes a convex function of a complex variable over the disk `|z| <= radius`.
///
/// A polar grid supplies an incumbent. Given a Lipschitz constant `lipschitz`,
/// every true minimizer lies within one cell of a grid node whose value is at
/// most `best + lipschitz * cell`; the bounding box of those nodes is then
/// searched by nested golden sections (partial minimization of a convex
/// function is convex, so both levels are unimodal).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexPlaneMinimizer {
    pub angles: usize,
    pub radii: usize,
    /// Final bracket width relative to the search box.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for ConvexPlaneMinimizer {
    fn default() -> Self {
        ConvexPlaneMinimizer { angles: 24, radii: 16, rel_tol: 1e-10, max_iter: 80 }
    }
}

impl ConvexPlaneMinimizer {
    pub fn minimize<F: FnMut(f64, f64) -> f64>(&self, mut f: F, radius: f64, lipschitz: f64) -> PlaneMinimum {
        let mut evaluations = 0usize;
        let mut eval = |x: f64, y: f64| {
            evaluations += 1;
            f(x, y)
        };
        let mut nodes = vec![(0.0, 0.0, eval(0.0, 0.0))];
        for k in 1..=self.radii {
            let rho = radius * k as f64 / self.radii as f64;
            for j in 0..self.angles {
                let t = std::f64::consts::TAU * j as f64 / self.angles as f64;
                let (x, y) = (rho * t.cos(), rho * t.sin());
                nodes.push((x, y, eval(x, y)));
            }
        }
        let best = nodes.iter().copied().fold((0.0, 0.0, f64::INFINITY), |acc, n| if n.2 < acc.2 { n } else { acc });
        let cell = radius * (0.5 / self.radii as f64 + std::f64::consts::PI / self.angles as f64);
        let cut = best.2 + lipschitz * cell;
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y, v) in &nodes {
            if v <= cut {
                x0 = x0.min(x);
                x1 = x1.max(x);
                y0 = y0.min(y);
                y1 = y1.max(y);
            }
        }
        let x0 = (x0 - cell).max(-radius);
        let x1 = (x1 + cell).min(radius);
        let y0 = (y0 - cell).max(-radius);
        let y1 = (y1 + cell).min(radius);
        let tol_x = self.rel_tol * (x1 - x0).max(f64::MIN_POSITIVE);
        let tol_y = self.rel_tol * (y1 - y0).max(f64::MIN_POSITIVE);
        let max_iter = self.max_iter;

        let outer = golden_min(|x| golden_min(|y| eval(x, y), y0, y1, tol_y, max_iter).value, x0, x1, tol_x, max_iter);
        let y_at = golden_min(|y| eval(outer.x, y), y0, y1, tol_y, max_iter);
        let mut result = (outer.x, y_at.x, y_at.value);
        if best.2 < result.2 {
            result = best;
        }
        PlaneMinimum { re: result.0, im: result.1, value: result.2, evaluations }
    }
}
