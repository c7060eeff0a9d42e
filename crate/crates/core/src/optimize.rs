//! Derivative-free scalar maximization: coarse grid bracketing followed by
//! golden-section refinement.

/// `(√5 − 1)/2`
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    /// The coarse maximum sat on the first or last grid point.
    pub at_boundary: bool,
    pub evaluations: usize,
}

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`,
/// stopping once the bracket is narrower than `tol`.
pub fn golden_section_max<F, E>(mut a: f64, mut b: f64, tol: f64, f: F) -> Result<Maximum, E>
where
    F: Fn(f64) -> Result<f64, E>,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut evaluations = 2;
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
        evaluations += 1;
    }
    let (x, value) = if fc >= fd { (c, fc) } else { (d, fd) };
    Ok(Maximum {
        x,
        value,
        at_boundary: false,
        evaluations,
    })
}

/// Evaluates `f` on `grid_points` uniform nodes of `[lo, hi]` (values
/// supplied by `evaluate_grid` so callers can parallelize), then refines
/// the best bracket with golden-section search to `tol`.
pub fn bracket_and_refine<G, F, E>(
    lo: f64,
    hi: f64,
    grid_points: usize,
    tol: f64,
    evaluate_grid: G,
    f: F,
) -> Result<Maximum, E>
where
    G: FnOnce(&[f64]) -> Result<Vec<f64>, E>,
    F: Fn(f64) -> Result<f64, E>,
{
    assert!(grid_points >= 3 && hi > lo);
    let step = (hi - lo) / (grid_points - 1) as f64;
    let grid: Vec<f64> = (0..grid_points).map(|i| lo + step * i as f64).collect();
    let values = evaluate_grid(&grid)?;
    let best = values
        .iter()
        .enumerate()
        .fold(0, |b, (i, &v)| if v > values[b] { i } else { b });
    let left = grid[best.saturating_sub(1)];
    let right = grid[(best + 1).min(grid_points - 1)];
    let mut m = golden_section_max(left, right, tol, &f)?;
    if values[best] > m.value {
        m.x = grid[best];
        m.value = values[best];
    }
    m.at_boundary = best == 0 || best == grid_points - 1;
    m.evaluations += grid_points;
    Ok(m)
}
