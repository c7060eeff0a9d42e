//! Isolated field zeros of a superposition.
//!
//! At a simple zero of ψ where ∂_ζψ ≠ 0 the integrand `(∂p)²/p` stays
//! bounded but has no limit, which spoils the spectral convergence of the
//! tensor rule. Each zero is cut out with a smooth bump and integrated on
//! its own polar patch, where the integrand is smooth in the patch radius.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::beam::StateProfile;

use crate::quadrature::GaussLegendre;

const SEARCH_RADIAL: usize = 96;
const SEARCH_AZIMUTHAL: usize = 128;
const NEWTON_STEPS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Vortex {
    pub x: f64,
    pub y: f64,
    /// Bump scale; the bump is negligible beyond 2σ.
    pub sigma: f64,
    /// ∂ψ/∂x and ∂ψ/∂y at the zero.
    pub jacobian: (Complex64, Complex64),
}

impl Vortex {
    /// `exp(−(d/σ)^8)`.
    pub fn bump(&self, x: f64, y: f64) -> f64 {
        let reach = 2.0 * self.sigma;
        if (x - self.x).abs() > reach || (y - self.y).abs() > reach {
            return 0.0;
        }
        let d2 = ((x - self.x).powi(2) + (y - self.y).powi(2)) / (self.sigma * self.sigma);
        (-d2.powi(4)).exp()
    }
}

fn field_xy(profile: &StateProfile, x: f64, y: f64) -> Complex64 {
    profile.field(x.hypot(y), y.atan2(x))
}

/// Damped Newton on ψ(x, y) = 0 with a finite-difference Jacobian; the
/// Gaussian envelope makes full steps overshoot far from the zero.
fn newton(
    profile: &StateProfile,
    mut x: f64,
    mut y: f64,
    scale: f64,
) -> Option<(f64, f64, Complex64, Complex64)> {
    let h = 1e-6 * scale;
    let max_step = 0.1 * scale;
    let mut f = field_xy(profile, x, y);
    for _ in 0..NEWTON_STEPS {
        let fx = (field_xy(profile, x + h, y) - field_xy(profile, x - h, y)) / (2.0 * h);
        let fy = (field_xy(profile, x, y + h) - field_xy(profile, x, y - h)) / (2.0 * h);
        let det = fx.re * fy.im - fy.re * fx.im;
        let jnorm = fx.norm_sqr() + fy.norm_sqr();
        // |det|/|J|² is about the ratio of the singular values
        if !(det.abs() > 1e-4 * jnorm) {
            return None;
        }
        let mut dx = -(fy.im * f.re - fy.re * f.im) / det;
        let mut dy = -(-fx.im * f.re + fx.re * f.im) / det;
        let len = dx.hypot(dy);
        if len < 1e-13 * scale {
            return Some((x + dx, y + dy, fx, fy));
        }
        if len > max_step {
            dx *= max_step / len;
            dy *= max_step / len;
        }
        let mut accepted = false;
        for _ in 0..20 {
            let g = field_xy(profile, x + dx, y + dy);
            if g.norm() < f.norm() {
                x += dx;
                y += dy;
                f = g;
                accepted = true;
                break;
            }
            dx *= 0.5;
            dy *= 0.5;
        }
        if !accepted {
            // stalled at roundoff level: accept if already at a zero
            return (f.norm() <= 1e-12 * jnorm.sqrt() * scale).then_some((x, y, fx, fy));
        }
        if x.hypot(y) > 20.0 * scale {
            return None;
        }
    }
    None
}

/// Locates the simple zeros of ψ off the axis within `rho_limit`.
pub(crate) fn locate(profile: &StateProfile, rho_limit: f64) -> Vec<Vortex> {
    let terms = profile.terms();
    if terms.len() < 2 {
        return Vec::new();
    }
    let s = profile.width();
    let dr = rho_limit / SEARCH_RADIAL as f64;
    let dphi = std::f64::consts::TAU / SEARCH_AZIMUTHAL as f64;
    let grid: Vec<Vec<Complex64>> = (1..=SEARCH_RADIAL)
        .map(|i| {
            (0..SEARCH_AZIMUTHAL)
                .map(|k| profile.field(dr * i as f64, dphi * k as f64))
                .collect()
        })
        .collect();

    let mut found: Vec<(f64, f64, Complex64, Complex64)> = Vec::new();
    for i in 0..SEARCH_RADIAL - 1 {
        for k in 0..SEARCH_AZIMUTHAL {
            let k1 = (k + 1) % SEARCH_AZIMUTHAL;
            let corners = [grid[i][k], grid[i + 1][k], grid[i + 1][k1], grid[i][k1]];
            if corners.iter().any(|c| c.norm_sqr() == 0.0) {
                continue;
            }
            let jumps: Vec<f64> = (0..4)
                .map(|j| (corners[(j + 1) % 4] * corners[j].conj()).arg())
                .collect();
            // a zero sitting on an edge shows up as a phase jump of ±π there
            let straddled = jumps.iter().any(|d| d.abs() > 0.9 * std::f64::consts::PI);
            if jumps.iter().sum::<f64>().abs() < 1.0 && !straddled {
                continue;
            }
            let rho = dr * (i as f64 + 1.5);
            let phi = dphi * (k as f64 + 0.5);
            if let Some((x, y, fx, fy)) = newton(profile, rho * phi.cos(), rho * phi.sin(), s) {
                let r = x.hypot(y);
                let fresh = found
                    .iter()
                    .all(|&(u, v, ..)| (u - x).hypot(v - y) > 1e-6 * s);
                if r > 1e-3 * s && r < rho_limit && fresh {
                    found.push((x, y, fx, fy));
                }
            }
        }
    }

    let origin_is_zero = terms.iter().all(|(_, l, _)| *l != 0);
    // zeros inside the innermost search ring
    let inner: f64 = (0..SEARCH_AZIMUTHAL)
        .map(|k| (grid[0][(k + 1) % SEARCH_AZIMUTHAL] * grid[0][k].conj()).arg())
        .sum();
    let expected = if origin_is_zero {
        // charge of the axial zero: the term with the smallest |l|
        let lmin = terms.iter().map(|(_, l, _)| l.abs()).min().unwrap_or(0);
        let signs: Vec<i32> = terms
            .iter()
            .filter(|(_, l, _)| l.abs() == lmin)
            .map(|(_, l, _)| -l.signum())
            .collect();
        if signs.len() == 1 {
            f64::from(signs[0] * lmin) * std::f64::consts::TAU
        } else {
            inner
        }
    } else {
        0.0
    };
    if (inner - expected).abs() > 1.0 {
        for k in 0..8 {
            let phi = std::f64::consts::TAU * k as f64 / 8.0;
            let start = 0.5 * dr;
            if let Some((x, y, fx, fy)) = newton(profile, start * phi.cos(), start * phi.sin(), s) {
                let r = x.hypot(y);
                let fresh = found
                    .iter()
                    .all(|&(u, v, ..)| (u - x).hypot(v - y) > 1e-6 * s);
                if r > 1e-3 * s && r < rho_limit && fresh {
                    found.push((x, y, fx, fy));
                }
            }
        }
    }

    found
        .iter()
        .map(|&(x, y, fx, fy)| {
            let mut sigma = 0.25 * s;
            for &(u, v, ..) in &found {
                let d = (u - x).hypot(v - y);
                if d > 0.0 {
                    sigma = sigma.min(0.3 * d);
                }
            }
            if origin_is_zero {
                sigma = sigma.min(0.3 * x.hypot(y));
            }
            Vortex {
                x,
                y,
                sigma,
                jacobian: (fx, fy),
            }
        })
        .collect()
}

/// `(∂p − p·∂ln M)²/p` at a point, with `M(ρ) = ∫p dφ` evaluated
/// analytically: cross terms between different l vanish on the ring.
pub(crate) fn conditional_integrand(profile: &StateProfile, rho: f64, phi: f64, floor: f64) -> f64 {
    let terms = profile.terms();
    let mut psi = Complex64::new(0.0, 0.0);
    let mut dpsi = Complex64::new(0.0, 0.0);
    // (l, A_l, ∂A_l) accumulated per azimuthal index
    let mut rings: Vec<(i32, Complex64, Complex64)> = Vec::with_capacity(terms.len());
    for (c, l, mode) in terms {
        let (v, d) = mode.radial(rho);
        let (a, da) = (c * v, c * d);
        let ang = Complex64::from_polar(1.0, -f64::from(*l) * phi);
        psi += ang * a;
        dpsi += ang * da;
        match rings.iter_mut().find(|r| r.0 == *l) {
            Some(r) => {
                r.1 += a;
                r.2 += da;
            }
            None => rings.push((*l, a, da)),
        }
    }
    let p = psi.norm_sqr();
    if p <= floor {
        return 0.0;
    }
    let mass: f64 = rings.iter().map(|r| r.1.norm_sqr()).sum();
    let mass_rate: f64 = rings.iter().map(|r| 2.0 * (r.1.conj() * r.2).re).sum();
    let rate = if mass > 0.0 { mass_rate / mass } else { 0.0 };
    let excess = 2.0 * (psi.conj() * dpsi).re - p * rate;
    excess * excess / p
}

/// Trapezoid nodes per patch ring are doubled up to this count.
const MAX_RING_NODES: usize = 1 << 15;

/// `∫∫ g·bump` over the polar patch around `v`, with `g` the conditional
/// integrand.
///
/// The patch angle θ is driven through `t = arg(∂ψ·(cos θ, sin θ))`, the
/// phase of the linearised field, so strongly anisotropic zeros (whose
/// phase turns within a narrow window of θ) still see a smooth periodic
/// integrand in t. Further out the near-nodal valley through such a zero
/// bends away from the linear picture, so each ring doubles its trapezoid
/// nodes until two successive sums agree to `rel_tol`.
pub(crate) fn patch_integral(
    profile: &StateProfile,
    v: &Vortex,
    n_radial: usize,
    n_azimuthal: usize,
    floor: f64,
    rel_tol: f64,
) -> f64 {
    let rule = GaussLegendre::cached(n_radial);
    let (a, b) = v.jacobian;
    let det = a.re * b.im - b.re * a.im;
    // direction L⁻¹(cos t, sin t) and dθ/dt = 1/(|det L|·|L⁻¹e_t|²)
    let sample = |s: f64, t: f64| {
        let (c, sn) = (t.cos(), t.sin());
        let (u, w) = ((b.im * c - b.re * sn) / det, (-a.im * c + a.re * sn) / det);
        let len2 = u * u + w * w;
        let len = len2.sqrt();
        let (x, y) = (v.x + s * u / len, v.y + s * w / len);
        conditional_integrand(profile, x.hypot(y), y.atan2(x), floor) / (det.abs() * len2)
    };
    let mut acc = 0.0;
    for (s, w) in rule.on_interval(0.0, 2.0 * v.sigma) {
        let bump = (-(s / v.sigma).powi(8)).exp();
        let mut n = n_azimuthal;
        let mut sum: f64 = (0..n).map(|k| sample(s, TAU * k as f64 / n as f64)).sum();
        let mut ring = sum * TAU / n as f64;
        while n < MAX_RING_NODES {
            let odd: f64 = (0..n)
                .map(|k| sample(s, TAU * (k as f64 + 0.5) / n as f64))
                .sum();
            sum += odd;
            n *= 2;
            let next = sum * TAU / n as f64;
            let settled = (next - ring).abs() <= rel_tol * next.abs();
            ring = next;
            if settled {
                break;
            }
        }
        acc += w * s * bump * ring;
    }
    acc
}
