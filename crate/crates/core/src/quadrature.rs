//! Gauss–Hermite and Gauss–Laguerre rules, plus a 2D Gaussian-matched
//! tensor-product integrator.

use std::f64::consts::PI;

/// Nodes and weights of an `n`-point rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Largest Gauss–Hermite order supported without overflow in the
/// normalized Hermite recurrence.
pub const MAX_HERMITE_ORDER: usize = 400;

const NEWTON_EPS: f64 = 3e-15;
const NEWTON_MAX_IT: usize = 100;

/// `∫ e^{−x²} f(x) dx ≈ Σ w_i f(x_i)`, nodes in ascending order.
pub fn gauss_hermite(n: usize) -> Rule {
    assert!(
        (1..=MAX_HERMITE_ORDER).contains(&n),
        "Gauss-Hermite order {n} outside 1..={MAX_HERMITE_ORDER}"
    );
    let pim4 = PI.powf(-0.25);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..half {
        // Seed Newton with the (n−1−i)-th eigenvalue of the Jacobi matrix so
        // no root is skipped at high order.
        let mut z = jacobi_eigenvalue(n, n - 1 - i);
        let mut pp = 0.0;
        for _ in 0..NEWTON_MAX_IT {
            let (p1, p2) = hermite_normalized(n, z, pim4);
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= NEWTON_EPS * z.abs().max(1.0) {
                break;
            }
        }
        let (_, p2) = hermite_normalized(n, z, pim4);
        pp = if p2 != 0.0 { (2.0 * nf).sqrt() * p2 } else { pp };
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    // The loop above filled the largest roots first.
    x.reverse();
    w.reverse();
    Rule {
        nodes: x,
        weights: w,
    }
}

/// `k`-th smallest eigenvalue of the Hermite Jacobi matrix (zero diagonal,
/// off-diagonal `√(j/2)`), by Sturm-count bisection.
fn jacobi_eigenvalue(n: usize, k: usize) -> f64 {
    let below = |x: f64| -> usize {
        let mut count = 0;
        let mut d = -x;
        for j in 0..n {
            if j > 0 {
                let b2 = j as f64 / 2.0;
                d = -x - b2 / d;
            }
            if d == 0.0 {
                d = -1e-300;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    let bound = (2.0 * n as f64 + 2.0).sqrt();
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if below(mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Orthonormal Hermite values `(h_n(z), h_{n−1}(z))` without the Gaussian factor.
fn hermite_normalized(n: usize, z: f64, pim4: f64) -> (f64, f64) {
    let mut p1 = pim4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, p2)
}

/// Largest Gauss–Laguerre order supported.
pub const MAX_LAGUERRE_ORDER: usize = 180;

/// `∫_0^∞ e^{−t} f(t) dt ≈ Σ w_i f(t_i)`.
pub fn gauss_laguerre(n: usize) -> Rule {
    assert!(
        (1..=MAX_LAGUERRE_ORDER).contains(&n),
        "Gauss-Laguerre order {n} outside 1..={MAX_LAGUERRE_ORDER}"
    );
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut z = 0.0_f64;
    for i in 0..n {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - x[i - 2])
            }
        };
        let (mut pp, mut p2) = (0.0, 0.0);
        for _ in 0..NEWTON_MAX_IT {
            let (p1, q2) = laguerre_pair(n, z);
            p2 = q2;
            pp = (nf * p1 - nf * p2) / z;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= NEWTON_EPS * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        w[i] = -1.0 / (pp * nf * p2);
    }
    Rule {
        nodes: x,
        weights: w,
    }
}

fn laguerre_pair(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
    }
    (p1, p2)
}

/// `∫∫ f(x, y) dx dy` with an `order × order` Gauss–Hermite product rule
/// centred on `center` and matched to the envelope `e^{−λ|r − center|²}`.
///
/// Converges quickly when `f` is a Gaussian (times a low-degree polynomial)
/// whose decay is at least as fast as the envelope in every direction.
pub fn gauss_hermite_2d<F>(f: F, center: (f64, f64), lambda: f64, order: usize) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let rule = gauss_hermite(order);
    let scale = 1.0 / lambda.sqrt();
    // w_i e^{ξ_i²}, zero where the weight itself underflowed.
    let lifted: Vec<f64> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(xi, w)| if *w > 0.0 { (w.ln() + xi * xi).exp() } else { 0.0 })
        .collect();
    let mut acc = crate::special::KahanSum::new();
    for (xi, wi) in rule.nodes.iter().zip(&lifted) {
        if *wi == 0.0 {
            continue;
        }
        for (eta, wj) in rule.nodes.iter().zip(&lifted) {
            if *wj == 0.0 {
                continue;
            }
            acc.add(wi * wj * f(center.0 + xi * scale, center.1 + eta * scale));
        }
    }
    acc.value() / lambda
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hermite_integrates_moments_exactly() {
        // ∫ x^{2k} e^{−x²} dx = Γ(k + 1/2) = (2k−1)!! √π / 2^k, exact for 2k ≤ 2n − 1.
        for n in [1, 2, 5, 10, 40, 120] {
            let rule = gauss_hermite(n);
            assert_eq!(rule.len(), n);
            for k in 0..n.min(30) {
                let odd_fact: f64 = (0..k).map(|j| (2 * j + 1) as f64).product();
                let exact = odd_fact * PI.sqrt() / 2f64.powi(k as i32);
                let got: f64 = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(x, w)| w * x.powi(2 * k as i32))
                    .sum();
                assert_relative_eq!(got, exact, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn hermite_nodes_are_sorted_and_symmetric() {
        let rule = gauss_hermite(33);
        for pair in rule.nodes.windows(2) {
            assert!(pair[0] < pair[1]);
        }
        for i in 0..33 {
            assert_eq!(rule.nodes[i], -rule.nodes[32 - i]);
        }
        let total: f64 = rule.weights.iter().sum();
        assert_relative_eq!(total, PI.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn large_hermite_order_keeps_weight_sum() {
        let rule = gauss_hermite(400);
        let total: f64 = rule.weights.iter().sum();
        assert_relative_eq!(total, PI.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn laguerre_integrates_moments_exactly() {
        // ∫ t^k e^{−t} dt = k!
        for n in [1, 4, 12, 60, 150] {
            let rule = gauss_laguerre(n);
            let mut fact = 1.0;
            for k in 0..(2 * n).min(30) {
                if k > 0 {
                    fact *= k as f64;
                }
                let got: f64 = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(t, w)| w * t.powi(k as i32))
                    .sum();
                assert_relative_eq!(got, fact, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn tensor_rule_integrates_offset_gaussian() {
        let f = |x: f64, y: f64| (-((x - 0.3).powi(2) * 3.0 + (y + 1.1).powi(2) * 0.7)).exp();
        let exact = PI / (3.0f64 * 0.7).sqrt();
        let got = gauss_hermite_2d(f, (0.3, -1.1), 0.7, 120);
        assert_relative_eq!(got, exact, max_relative = 1e-12);
    }
}
