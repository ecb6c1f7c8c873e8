//! Single-letter rate-region tooling.
//!
//! A certificate is a joint distribution over `(U, X, Y)` whose `X,Y`
//! marginal matches the per-symbol target and in which `X - U - Y` forms a
//! Markov chain. Each certificate witnesses one corner of the achievable
//! region through three entropy bounds; the minimum of `I(X,Y;U)` over all
//! certificates is the common-information endpoint, which is found here by
//! multi-start penalized minimization rather than a closed form, so the
//! optimizer's output can be validated against the same bound checks.

use rand::Rng;
use thiserror::Error;

use super::divergence::entropy_bits;
use super::PMF_TOL;
use crate::seeds;

#[derive(Debug, Error)]
pub enum RegionError {
    #[error("certificate invalid: {0}")]
    BadCertificate(String),
    #[error("rate triple has a negative component")]
    NegativeRate,
    #[error(
        "common-information search did not converge: best value {best} bits \
         at marginal deviation {deviation}"
    )]
    NonConvergence { best: f64, deviation: f64 },
}

/// A rate triple in bits/symbol: communication rate `r`, common-randomness
/// rate `r0`, local-randomness rate `rl`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTriple {
    pub r: f64,
    pub r0: f64,
    pub rl: f64,
}

impl RateTriple {
    pub fn new(r: f64, r0: f64, rl: f64) -> Self {
        Self { r, r0, rl }
    }
}

/// Outcome of a rate-triple check: the three computed bounds
/// `[I(X;U), I(X,Y;U), H(Y|U)]` in bits/symbol and the verdict.
#[derive(Debug, Clone, Copy)]
pub struct TripleDecision {
    pub accept: bool,
    pub bounds: [f64; 3],
}

/// Joint distribution over `U x X x Y` witnessing an achievable corner.
///
/// Stored dense as `probs[(u * x_card + x) * y_card + y]`.
#[derive(Debug, Clone)]
pub struct RateRegionCertificate {
    u_card: usize,
    x_card: usize,
    y_card: usize,
    probs: Vec<f64>,
}

impl RateRegionCertificate {
    /// Validates all certificate invariants against the supplied per-symbol
    /// target (`x_card * y_card`, row-major): nonnegativity, unit total mass,
    /// the cardinality bound `|U| <= |X||Y| + 2`, the Markov chain
    /// `X - U - Y`, and the marginal constraint, the last two within
    /// [`PMF_TOL`].
    pub fn new(
        u_card: usize,
        x_card: usize,
        y_card: usize,
        probs: Vec<f64>,
        target: &[f64],
    ) -> Result<Self, RegionError> {
        if u_card == 0 || x_card == 0 || y_card == 0 {
            return Err(RegionError::BadCertificate("empty alphabet".into()));
        }
        if u_card > x_card * y_card + 2 {
            return Err(RegionError::BadCertificate(format!(
                "|U| = {u_card} exceeds |X||Y| + 2 = {}",
                x_card * y_card + 2
            )));
        }
        if probs.len() != u_card * x_card * y_card {
            return Err(RegionError::BadCertificate("table size mismatch".into()));
        }
        if target.len() != x_card * y_card {
            return Err(RegionError::BadCertificate("target size mismatch".into()));
        }
        let cert = Self {
            u_card,
            x_card,
            y_card,
            probs,
        };
        let mut sum = 0.0;
        for &v in &cert.probs {
            if !(v >= 0.0) {
                return Err(RegionError::BadCertificate(format!("negative entry {v}")));
            }
            sum += v;
        }
        if (sum - 1.0).abs() > PMF_TOL {
            return Err(RegionError::BadCertificate(format!("total mass {sum}")));
        }
        // Markov: p(y | u, x) == p(y | u) wherever p(u, x) > 0.
        for u in 0..u_card {
            let pu: f64 = (0..x_card)
                .flat_map(|x| (0..y_card).map(move |y| (x, y)))
                .map(|(x, y)| cert.get(u, x, y))
                .sum();
            if pu == 0.0 {
                continue;
            }
            for x in 0..x_card {
                let pux: f64 = (0..y_card).map(|y| cert.get(u, x, y)).sum();
                if pux == 0.0 {
                    continue;
                }
                for y in 0..y_card {
                    let puy: f64 = (0..x_card).map(|xx| cert.get(u, xx, y)).sum();
                    let lhs = cert.get(u, x, y) / pux;
                    let rhs = puy / pu;
                    if (lhs - rhs).abs() > PMF_TOL {
                        return Err(RegionError::BadCertificate(format!(
                            "Markov violation at u={u} x={x} y={y}: p(y|u,x)={lhs} vs p(y|u)={rhs}"
                        )));
                    }
                }
            }
        }
        // Marginal matches the target.
        for x in 0..x_card {
            for y in 0..y_card {
                let m: f64 = (0..u_card).map(|u| cert.get(u, x, y)).sum();
                if (m - target[x * y_card + y]).abs() > PMF_TOL {
                    return Err(RegionError::BadCertificate(format!(
                        "marginal mismatch at ({x},{y}): {m} vs {}",
                        target[x * y_card + y]
                    )));
                }
            }
        }
        Ok(cert)
    }

    /// Product-form certificate `p(u) p(x|u) p(y|u)`; the target is taken to
    /// be the induced marginal, so the construction is always valid.
    pub fn from_components(
        weights: &[f64],
        x_given_u: &[Vec<f64>],
        y_given_u: &[Vec<f64>],
    ) -> Result<Self, RegionError> {
        let u_card = weights.len();
        if x_given_u.len() != u_card || y_given_u.len() != u_card {
            return Err(RegionError::BadCertificate("component count mismatch".into()));
        }
        let x_card = x_given_u.first().map_or(0, Vec::len);
        let y_card = y_given_u.first().map_or(0, Vec::len);
        let mut probs = vec![0.0; u_card * x_card * y_card];
        for u in 0..u_card {
            for x in 0..x_card {
                for y in 0..y_card {
                    probs[(u * x_card + x) * y_card + y] =
                        weights[u] * x_given_u[u][x] * y_given_u[u][y];
                }
            }
        }
        let mut target = vec![0.0; x_card * y_card];
        for x in 0..x_card {
            for y in 0..y_card {
                target[x * y_card + y] = (0..u_card)
                    .map(|u| probs[(u * x_card + x) * y_card + y])
                    .sum();
            }
        }
        Self::new(u_card, x_card, y_card, probs, &target)
    }

    /// Certificate with `U = Y` for the given per-symbol joint target.
    pub fn u_equals_y(target: &[f64], x_card: usize, y_card: usize) -> Result<Self, RegionError> {
        let mut probs = vec![0.0; y_card * x_card * y_card];
        for x in 0..x_card {
            for y in 0..y_card {
                probs[(y * x_card + x) * y_card + y] = target[x * y_card + y];
            }
        }
        Self::new(y_card, x_card, y_card, probs, target)
    }

    /// Constant-`U` certificate; valid only when the target is a product
    /// distribution (otherwise the Markov chain fails).
    pub fn u_constant(target: &[f64], x_card: usize, y_card: usize) -> Result<Self, RegionError> {
        Self::new(1, x_card, y_card, target.to_vec(), target)
    }

    #[inline]
    fn get(&self, u: usize, x: usize, y: usize) -> f64 {
        self.probs[(u * self.x_card + x) * self.y_card + y]
    }

    /// The three achievability bounds `[I(X;U), I(X,Y;U), H(Y|U)]` in bits.
    pub fn bounds(&self) -> [f64; 3] {
        let (uc, xc, yc) = (self.u_card, self.x_card, self.y_card);
        let mut pu = vec![0.0; uc];
        let mut px = vec![0.0; xc];
        let mut pux = vec![0.0; uc * xc];
        let mut puy = vec![0.0; uc * yc];
        let mut pxy = vec![0.0; xc * yc];
        for u in 0..uc {
            for x in 0..xc {
                for y in 0..yc {
                    let v = self.get(u, x, y);
                    pu[u] += v;
                    px[x] += v;
                    pux[u * xc + x] += v;
                    puy[u * yc + y] += v;
                    pxy[x * yc + y] += v;
                }
            }
        }
        let hu = entropy_bits(&pu);
        let hx = entropy_bits(&px);
        let hux = entropy_bits(&pux);
        let huy = entropy_bits(&puy);
        let hxy = entropy_bits(&pxy);
        let huxy = entropy_bits(&self.probs);
        let i_xu = (hx + hu - hux).max(0.0);
        let i_xyu = (hxy + hu - huxy).max(0.0);
        let h_y_given_u = (huy - hu).max(0.0);
        [i_xu, i_xyu, h_y_given_u]
    }
}

/// Accepts `triple` iff `R >= I(X;U)`, `R0 + R >= I(X,Y;U)` and
/// `RL >= H(Y|U)` hold for the certificate, all in bits/symbol.
pub fn check_rate_triple(
    cert: &RateRegionCertificate,
    triple: RateTriple,
) -> Result<TripleDecision, RegionError> {
    if triple.r < 0.0 || triple.r0 < 0.0 || triple.rl < 0.0 {
        return Err(RegionError::NegativeRate);
    }
    let bounds = cert.bounds();
    let accept =
        triple.r >= bounds[0] && triple.r0 + triple.r >= bounds[1] && triple.rl >= bounds[2];
    Ok(TripleDecision { accept, bounds })
}

// ---------------------------------------------------------------------------
// Wyner common information of the doubly symmetric binary source
// ---------------------------------------------------------------------------

/// Number of optimizer parameters: `|U|` weights plus per-state binary
/// conditionals for X and Y, all as raw logits.
const WCI_U: usize = 6; // |X||Y| + 2 for binary alphabets
const WCI_DIM: usize = WCI_U + 2 * WCI_U + 2 * WCI_U;
const FEAS_TOL: f64 = 1e-5;

/// Per-symbol joint of a BSC(p) with uniform input, as a flat 2x2 table.
fn dsbs_target(p: f64) -> [f64; 4] {
    [(1.0 - p) / 2.0, p / 2.0, p / 2.0, (1.0 - p) / 2.0]
}

struct WciEval {
    i_bits: f64,
    max_dev: f64,
    penalized: f64,
}

fn softmax2(a: f64, b: f64) -> [f64; 2] {
    let m = a.max(b);
    let ea = (a - m).exp();
    let eb = (b - m).exp();
    let s = ea + eb;
    [ea / s, eb / s]
}

fn wci_eval(theta: &[f64], q: &[f64; 4], lambda: f64) -> WciEval {
    // Softmax over the U weights.
    let m = theta[..WCI_U].iter().cloned().fold(f64::MIN, f64::max);
    let mut w = [0.0; WCI_U];
    let mut ws = 0.0;
    for u in 0..WCI_U {
        w[u] = (theta[u] - m).exp();
        ws += w[u];
    }
    for wu in &mut w {
        *wu /= ws;
    }
    let mut a = [[0.0; 2]; WCI_U];
    let mut b = [[0.0; 2]; WCI_U];
    for u in 0..WCI_U {
        a[u] = softmax2(theta[WCI_U + 2 * u], theta[WCI_U + 2 * u + 1]);
        b[u] = softmax2(theta[3 * WCI_U + 2 * u], theta[3 * WCI_U + 2 * u + 1]);
    }
    let mut marg = [0.0; 4];
    for u in 0..WCI_U {
        for x in 0..2 {
            for y in 0..2 {
                marg[x * 2 + y] += w[u] * a[u][x] * b[u][y];
            }
        }
    }
    let mut i_bits = 0.0;
    for u in 0..WCI_U {
        for x in 0..2 {
            for y in 0..2 {
                let t = w[u] * a[u][x] * b[u][y];
                if t > 0.0 && marg[x * 2 + y] > 0.0 {
                    i_bits += t * (a[u][x] * b[u][y] / marg[x * 2 + y]).log2();
                }
            }
        }
    }
    i_bits = i_bits.max(0.0);
    let mut pen = 0.0;
    let mut max_dev: f64 = 0.0;
    for c in 0..4 {
        let d = marg[c] - q[c];
        pen += d * d;
        max_dev = max_dev.max(d.abs());
    }
    WciEval {
        i_bits,
        max_dev,
        penalized: i_bits + lambda * pen,
    }
}

/// Adam on the penalized objective with central-difference gradients. The
/// parameter space is tiny (30 logits), so finite differences are cheap and
/// avoid hand-deriving the softmax chain rule.
fn wci_descend(theta: &mut [f64], q: &[f64; 4], lambda: f64, steps: usize, lr: f64) {
    const H: f64 = 1e-6;
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;
    let mut m = vec![0.0; WCI_DIM];
    let mut v = vec![0.0; WCI_DIM];
    let mut grad = vec![0.0; WCI_DIM];
    for step in 1..=steps {
        for i in 0..WCI_DIM {
            let orig = theta[i];
            theta[i] = orig + H;
            let fp = wci_eval(theta, q, lambda).penalized;
            theta[i] = orig - H;
            let fm = wci_eval(theta, q, lambda).penalized;
            theta[i] = orig;
            grad[i] = (fp - fm) / (2.0 * H);
        }
        let c1 = 1.0 - B1.powi(step as i32);
        let c2 = 1.0 - B2.powi(step as i32);
        for i in 0..WCI_DIM {
            m[i] = B1 * m[i] + (1.0 - B1) * grad[i];
            v[i] = B2 * v[i] + (1.0 - B2) * grad[i] * grad[i];
            theta[i] -= lr * (m[i] / c1) / ((v[i] / c2).sqrt() + EPS);
        }
    }
}

/// Logit for a probability clamped away from 0/1 so starts with hard zeros
/// stay finite.
fn logit_pair(p: f64) -> [f64; 2] {
    let p = p.clamp(1e-9, 1.0 - 1e-9);
    [p.ln(), (1.0 - p).ln()]
}

fn structured_starts(p: f64) -> Vec<Vec<f64>> {
    let mut starts = Vec::new();
    let push_pair_family = |starts: &mut Vec<Vec<f64>>, alpha: f64, gamma: f64| {
        if !(0.0..=1.0).contains(&gamma) {
            return;
        }
        let mut t = vec![-40.0; WCI_DIM];
        t[0] = 0.0;
        t[1] = 0.0;
        for (u, flip) in [(0usize, false), (1usize, true)] {
            let (pa, pg) = if flip {
                (1.0 - alpha, 1.0 - gamma)
            } else {
                (alpha, gamma)
            };
            let la = logit_pair(1.0 - pa);
            let lg = logit_pair(1.0 - pg);
            t[WCI_U + 2 * u] = la[0];
            t[WCI_U + 2 * u + 1] = la[1];
            t[3 * WCI_U + 2 * u] = lg[0];
            t[3 * WCI_U + 2 * u + 1] = lg[1];
        }
        // Unused states: negligible weight, uniform conditionals.
        for u in 2..WCI_U {
            t[WCI_U + 2 * u] = 0.0;
            t[WCI_U + 2 * u + 1] = 0.0;
            t[3 * WCI_U + 2 * u] = 0.0;
            t[3 * WCI_U + 2 * u + 1] = 0.0;
        }
        starts.push(t);
    };

    // Binary-U family U -> X, U -> Y through BSC(alpha)/BSC(gamma) noise with
    // alpha(1-gamma) + gamma(1-alpha) = p: exactly feasible for every grid
    // point, including the two endpoints U = X (alpha = 0) and U = Y
    // (gamma = 0).
    let grid = 7;
    for g in 0..=grid {
        let alpha = p * g as f64 / grid as f64;
        if (1.0 - 2.0 * alpha).abs() < 1e-12 {
            continue;
        }
        let gamma = (p - alpha) / (1.0 - 2.0 * alpha);
        push_pair_family(&mut starts, alpha, gamma);
    }
    // Symmetric point 2a(1-a) = p.
    if p <= 0.5 {
        let alpha = 0.5 * (1.0 - (1.0 - 2.0 * p).max(0.0).sqrt());
        if (1.0 - 2.0 * alpha).abs() >= 1e-12 {
            let gamma = (p - alpha) / (1.0 - 2.0 * alpha);
            push_pair_family(&mut starts, alpha, gamma);
        } else {
            push_pair_family(&mut starts, alpha, alpha);
        }
    }
    // Near-constant U: feasible only for the independent target, but a useful
    // basin for high-noise targets.
    let mut t = vec![0.0; WCI_DIM];
    t[0] = 10.0;
    for u in 1..WCI_U {
        t[u] = -10.0;
    }
    starts.push(t);
    starts
}

/// Wyner common information of the doubly symmetric binary source with
/// crossover `p`, in bits/symbol, found by multi-start penalized minimization
/// of `I(X,Y;U)` over product certificates with `|U| = 6`.
///
/// The result is clamped to the provable window `[I(X;Y), 1]`; a best value
/// within `1e-4` of the lower endpoint snaps onto it, which makes the two
/// degenerate targets (`p = 0`, `p = 0.5`) exact.
pub fn wci_dsbs(p: f64) -> Result<f64, RegionError> {
    wci_dsbs_seeded(p, 0)
}

/// Same as [`wci_dsbs`] with an explicit seed for the random starts.
pub fn wci_dsbs_seeded(p: f64, seed: u64) -> Result<f64, RegionError> {
    assert!((0.0..=0.5).contains(&p), "crossover must be in [0, 0.5]");
    let q = dsbs_target(p);
    let i_xy = {
        let hx = 1.0;
        let hy = 1.0;
        let hxy = entropy_bits(&q);
        (hx + hy - hxy).max(0.0)
    };

    let mut starts = structured_starts(p);
    for i in 0..4u64 {
        let mut rng = seeds::stream(seed, seeds::label::WCI_START, i);
        starts.push((0..WCI_DIM).map(|_| rng.random_range(-1.0..1.0)).collect());
    }

    let mut best: Option<f64> = None;
    let mut best_any = f64::INFINITY;
    let mut best_dev = f64::INFINITY;
    let results = crate::exec::map_indexed(starts.len(), |s| {
        let mut theta = starts[s].clone();
        for (lambda, steps, lr) in [(1e4, 250, 0.05), (1e6, 250, 0.02), (1e8, 300, 0.005)] {
            wci_descend(&mut theta, &q, lambda, steps, lr);
        }
        let eval = wci_eval(&theta, &q, 0.0);
        (eval.i_bits, eval.max_dev)
    });
    for (i_bits, dev) in results {
        if dev <= FEAS_TOL && best.is_none_or(|b| i_bits < b) {
            best = Some(i_bits);
        }
        if i_bits < best_any {
            best_any = i_bits;
            best_dev = dev;
        }
    }
    match best {
        Some(v) => {
            let mut v = v;
            if v <= i_xy + 1e-4 {
                v = i_xy;
            }
            Ok(v.min(1.0))
        }
        None => Err(RegionError::NonConvergence {
            best: best_any,
            deviation: best_dev,
        }),
    }
}

// ---------------------------------------------------------------------------
// Sample-size coverage
// ---------------------------------------------------------------------------

/// Ratio of `ns` samples to the number of distinct `(x, y, k, l)`
/// combinations `T = 2^(2n + nr0 + nrl)`, as a percentage. Computed in the
/// log2 domain so huge alphabets cannot overflow.
pub fn coverage_ratio(n: usize, nr0_bits: u32, nrl_bits: u32, ns: u64) -> f64 {
    assert!(ns >= 1);
    let total_bits = 2.0 * n as f64 + f64::from(nr0_bits) + f64::from(nrl_bits);
    ((ns as f64).log2() - total_bits).exp2() * 100.0
}

/// Formats a coverage percentage: five significant digits in plain decimal
/// down to 1e-3, four significant digits in scientific notation below.
pub fn format_percent(pct: f64) -> String {
    if pct >= 1e-3 {
        let prec = (4 - pct.log10().floor() as i32).max(0) as usize;
        format!("{pct:.prec$}")
    } else {
        format!("{pct:.3e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::{binary_entropy, bsc_joint};

    #[test]
    fn u_equals_y_certificate_accepts_generous_triple() {
        let q = dsbs_target(0.25);
        let cert = RateRegionCertificate::u_equals_y(&q, 2, 2).unwrap();
        let d = check_rate_triple(&cert, RateTriple::new(0.2, 0.9, 0.1)).unwrap();
        assert!(d.accept);
        assert!((d.bounds[0] - 0.18872).abs() < 1e-4, "{:?}", d.bounds);
        assert!((d.bounds[1] - 1.0).abs() < 1e-12);
        assert!(d.bounds[2].abs() < 1e-12);
    }

    #[test]
    fn u_equals_y_certificate_rejects_zero_triple() {
        let q = dsbs_target(0.25);
        let cert = RateRegionCertificate::u_equals_y(&q, 2, 2).unwrap();
        let d = check_rate_triple(&cert, RateTriple::new(0.0, 0.0, 0.0)).unwrap();
        assert!(!d.accept);
        assert!(d.bounds[0] > 0.0);
    }

    #[test]
    fn constant_u_certificate_for_independent_target() {
        let q = dsbs_target(0.5);
        let cert = RateRegionCertificate::u_constant(&q, 2, 2).unwrap();
        let d = check_rate_triple(&cert, RateTriple::new(0.0, 0.0, 1.0)).unwrap();
        assert!(d.accept);
        assert_eq!(d.bounds[0], 0.0);
        assert_eq!(d.bounds[1], 0.0);
        assert!((d.bounds[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_u_rejects_correlated_target() {
        // X-U-Y cannot hold with constant U unless X and Y are independent.
        let q = dsbs_target(0.1);
        assert!(RateRegionCertificate::u_constant(&q, 2, 2).is_err());
    }

    #[test]
    fn cardinality_bound_enforced() {
        let q = dsbs_target(0.5);
        let probs = vec![1.0 / 28.0; 7 * 4];
        assert!(RateRegionCertificate::new(7, 2, 2, probs, &q).is_err());
    }

    #[test]
    fn marginal_mismatch_rejected() {
        let q = dsbs_target(0.25);
        let wrong = dsbs_target(0.3);
        let mut probs = vec![0.0; 2 * 2 * 2];
        for x in 0..2 {
            for y in 0..2 {
                probs[(y * 2 + x) * 2 + y] = wrong[x * 2 + y];
            }
        }
        assert!(RateRegionCertificate::new(2, 2, 2, probs, &q).is_err());
    }

    #[test]
    fn wci_degenerate_endpoints_exact() {
        assert_eq!(wci_dsbs(0.5).unwrap(), 0.0);
        assert_eq!(wci_dsbs(0.0).unwrap(), 1.0);
    }

    #[test]
    fn wci_quarter_matches_independent_formula() {
        // Oracle: 1 + h(p) - 2 h(a) with 2a(1-a) = p, derived from the
        // symmetric binary decomposition X = U ^ A, Y = U ^ B.
        let p = 0.25;
        let alpha = 0.5 * (1.0 - (1.0f64 - 2.0 * p).sqrt());
        let expect = 1.0 + binary_entropy(p) - 2.0 * binary_entropy(alpha);
        let got = wci_dsbs(p).unwrap();
        assert!((got - expect).abs() < 2e-3, "got {got}, expect {expect}");
        let i_xy = bsc_joint(1, p).unwrap().mutual_information_per_symbol();
        assert!(got >= i_xy && got <= 1.0);
    }

    #[test]
    fn wci_stable_across_seeds() {
        let a = wci_dsbs_seeded(0.25, 1).unwrap();
        let b = wci_dsbs_seeded(0.25, 2).unwrap();
        let c = wci_dsbs_seeded(0.25, 3).unwrap();
        assert!((a - b).abs() < 1e-3 && (a - c).abs() < 1e-3, "{a} {b} {c}");
    }

    #[test]
    fn coverage_ratio_known_rows() {
        let ns = 1u64 << 26;
        assert_eq!(coverage_ratio(8, 0, 12, ns), 25.0);
        assert!((coverage_ratio(10, 0, 15, ns) - 0.1953125).abs() < 1e-12);
        assert!((coverage_ratio(8, 16, 16, ns) - 2.384185791015625e-5).abs() < 1e-18);
        assert!((coverage_ratio(10, 20, 20, ns) - 5.820766091346741e-9).abs() < 1e-21);
    }

    #[test]
    fn percent_formatting() {
        assert_eq!(format_percent(25.0), "25.000");
        assert_eq!(format_percent(0.1953125), "0.19531");
        assert_eq!(format_percent(2.384185791015625e-5), "2.384e-5");
        assert_eq!(format_percent(5.820766091346741e-9), "5.821e-9");
    }

    #[test]
    fn monotone_acceptance() {
        let q = dsbs_target(0.2);
        let cert = RateRegionCertificate::u_equals_y(&q, 2, 2).unwrap();
        let base = RateTriple::new(0.8, 0.3, 0.1);
        let d = check_rate_triple(&cert, base).unwrap();
        assert!(d.accept);
        for grown in [
            RateTriple::new(1.8, 0.3, 0.1),
            RateTriple::new(0.8, 1.3, 0.1),
            RateTriple::new(0.8, 0.3, 1.1),
        ] {
            assert!(check_rate_triple(&cert, grown).unwrap().accept);
        }
    }
}
