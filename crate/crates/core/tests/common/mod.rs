//! Reference implementations used as oracles. Nothing here calls the
//! library's own quadrature, root finders or self-energy code.
#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `(w / w_ref)^k / (1 + (w / lam)^2)^((k + beta) / 2)`, written out again.
pub fn chi2(k: u32, lam: f64, beta: f64, w_ref: f64, w: f64) -> f64 {
    let x = w / lam;
    (w / w_ref).powi(k as i32) * (1.0 + x * x).powf(-0.5 * (k as f64 + beta))
}

/// Tanh-sinh quadrature on `[a, b]`, halving the step until two levels agree.
pub fn tanh_sinh<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64) -> Complex64 {
    let hw = 0.5 * (b - a);
    let node = |t: f64| -> Option<(f64, f64)> {
        let u = FRAC_PI_2 * t.sinh();
        let ch = u.cosh();
        // distance from the nearer endpoint, without cancellation
        let d = hw / (u.abs().exp() * ch);
        let w = hw * FRAC_PI_2 * t.cosh() / (ch * ch);
        if d <= 0.0 || !w.is_finite() {
            return None;
        }
        let x = if t >= 0.0 { b - d } else { a + d };
        Some((x, w))
    };
    let tmax = 4.0;
    let mut h = 0.5;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut k = -(tmax / h) as i64;
    while (k as f64) * h <= tmax {
        if let Some((x, w)) = node(k as f64 * h) {
            sum += f(x) * w;
        }
        k += 1;
    }
    let mut prev = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        let n = (tmax / h) as i64;
        let mut k = -n + 1;
        while k <= n {
            if let Some((x, w)) = node(k as f64 * h) {
                sum += f(x) * w;
            }
            k += 2;
        }
        let cur = sum * h;
        if (cur - prev).norm() <= 1e-15 * cur.norm().max(1e-300) {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// `int_a^inf` via `w = a / u` on `(0, 1]`. Needs `a > 0`.
pub fn tanh_sinh_tail<F: Fn(f64) -> Complex64>(f: F, a: f64) -> Complex64 {
    tanh_sinh(|u| if u > 0.0 { f(a / u) * (a / (u * u)) } else { Complex64::new(0.0, 0.0) }, 0.0, 1.0)
}

/// `int_0^inf` with panels split at the given interior points and a tail from `tail_start`.
pub fn integrate_half_line<F: Fn(f64) -> Complex64>(f: F, points: &[f64], tail_start: f64) -> Complex64 {
    let mut cuts: Vec<f64> = std::iter::once(0.0)
        .chain(points.iter().copied().filter(|&p| p > 0.0 && p < tail_start))
        .chain(std::iter::once(tail_start))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total: Complex64 = cuts.windows(2).map(|w| tanh_sinh(&f, w[0], w[1])).sum();
    total += tanh_sinh_tail(&f, tail_start);
    total
}

/// `int_0^inf` of a density with sharp lines of width `gamma` at `centres`:
/// panels grow geometrically away from every line.
pub fn integrate_lines<F: Fn(f64) -> f64>(f: F, centres: &[f64], gamma: f64, lam: f64) -> f64 {
    let mut pts = vec![lam];
    for &c in centres {
        pts.push(c);
        let mut d = 0.25 * gamma;
        while d < 10.0 * lam {
            pts.push(c - d);
            pts.push(c + d);
            d *= 8.0;
        }
    }
    integrate_half_line(real(f), &pts, 20.0 * lam).re
}

pub fn real<F: Fn(f64) -> f64>(f: F) -> impl Fn(f64) -> Complex64 {
    move |x| Complex64::new(f(x), 0.0)
}

/// `g2 w0 int chi^2(w) (s + i w) / ((s + i w)^2 + B^2) dw` by brute force.
pub fn q_of_b_oracle(k: u32, lam: f64, beta: f64, w_ref: f64, g2: f64, w0: f64, b: f64, s: Complex64) -> Complex64 {
    let kern = |w: f64| {
        let u = s + I * w;
        chi2(k, lam, beta, w_ref, w) * u / (u * u + b * b)
    };
    let pts = [-s.im - b, -s.im + b, -s.im, lam];
    g2 * w0 * integrate_half_line(kern, &pts, 4.0 * lam)
}

/// Ladder kernel `g2 w0 chi^2 / (u + B^2 sum f_j / (u + i delta_j))`, `u = s + i w`, resonant level included.
pub fn q_many_oracle(
    k: u32,
    lam: f64,
    beta: f64,
    w_ref: f64,
    g2: f64,
    w0: f64,
    b: f64,
    ladder: &[(f64, f64)],
    s: Complex64,
) -> Complex64 {
    let kern = |w: f64| {
        let u = s + I * w;
        let tail: Complex64 = std::iter::once((1.0, 0.0))
            .chain(ladder.iter().copied())
            .map(|(f, d)| f / (u + I * d))
            .sum();
        chi2(k, lam, beta, w_ref, w) / (u + b * b * tail)
    };
    let mut pts = vec![-s.im, lam];
    for &(_, d) in ladder {
        pts.push(-s.im - d);
    }
    // near-zeros of the denominator sit at -Im s - sigma_i
    for (sigma, _) in ladder_roots_bisect(b, ladder) {
        pts.push(-s.im - sigma);
    }
    g2 * w0 * integrate_half_line(kern, &pts, 4.0 * lam)
}

/// `[(1 + x)^k + (1 - x)^k theta(1 - x)] / 2` via the binomial sum, for exact-rational checks.
pub fn ratio_binomial(k: u32, x: f64) -> f64 {
    let mut plus = 0.0;
    let mut minus = 0.0;
    let mut binom = 1.0;
    for n in 0..=k {
        plus += binom * x.powi(n as i32);
        minus += binom * (-x).powi(n as i32);
        binom = binom * (k - n) as f64 / (n + 1) as f64;
    }
    0.5 * (plus + if x <= 1.0 { minus } else { 0.0 })
}

/// Roots of `R(w) = w + B^2 sum_j f_j / (delta_j - w)` (resonant level `f = 1, delta = 0` included)
/// by bisection between consecutive poles, and residues `1 / R'(w)`.
pub fn ladder_roots_bisect(b: f64, ladder: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut poles: Vec<(f64, f64)> = std::iter::once((1.0, 0.0)).chain(ladder.iter().copied()).collect();
    poles.retain(|p| p.0 > 0.0);
    poles.sort_by(|a, b| a.1.total_cmp(&b.1));
    let b2 = b * b;
    let r = |w: f64| w + poles.iter().map(|&(f, d)| b2 * f / (d - w)).sum::<f64>();
    let dr = |w: f64| 1.0 + poles.iter().map(|&(f, d)| b2 * f / (d - w).powi(2)).sum::<f64>();
    // R increases between poles from -inf to +inf; one root per gap plus one on each side
    let big = 1e3 + b2 * poles.iter().map(|p| p.0).sum::<f64>() + poles.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    let mut edges = vec![-big];
    edges.extend(poles.iter().map(|p| p.1));
    edges.push(big);
    let mut roots = Vec::new();
    for w in edges.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let span = hi - lo;
        lo += 1e-15 * span.max(1.0);
        hi -= 1e-15 * span.max(1.0);
        if r(lo) > 0.0 || r(hi) < 0.0 {
            continue;
        }
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if r(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-16 * mid.abs().max(1e-300) {
                break;
            }
        }
        let x = 0.5 * (lo + hi);
        roots.push((x, 1.0 / dr(x)));
    }
    roots
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let lx: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

pub fn two_pi() -> f64 {
    2.0 * PI
}
