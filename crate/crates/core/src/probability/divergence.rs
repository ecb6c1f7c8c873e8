//! Divergences and entropies, all in bits.

use super::pmf::{JointPmf, PmfError};

/// Total variation distance between two tables of identical shape:
/// `(1/2) * sum |p - q|`.
pub fn tvd_slices(p: &[f64], q: &[f64]) -> Result<f64, PmfError> {
    if p.len() != q.len() {
        return Err(PmfError::ShapeMismatch(p.len(), 1, q.len(), 1));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Total variation distance between two joint PMFs.
pub fn total_variation(p: &JointPmf, q: &JointPmf) -> Result<f64, PmfError> {
    if p.n() != q.n() {
        return Err(PmfError::ShapeMismatch(p.side(), p.side(), q.side(), q.side()));
    }
    tvd_slices(p.probs(), q.probs())
}

/// KL divergence `sum p log2(p/q)` in bits with the `0 log 0 = 0` convention.
/// A cell with `p > 0, q = 0` is a support violation and is reported as an
/// error naming the cell rather than returning infinity.
pub fn kl_divergence_bits(p: &JointPmf, q: &JointPmf) -> Result<f64, PmfError> {
    if p.n() != q.n() {
        return Err(PmfError::ShapeMismatch(p.side(), p.side(), q.side(), q.side()));
    }
    let side = p.side();
    let mut kl = 0.0;
    for x in 0..side {
        for y in 0..side {
            let pv = p.get(x, y);
            if pv == 0.0 {
                continue;
            }
            let qv = q.get(x, y);
            if qv == 0.0 {
                return Err(PmfError::SupportViolation { x, y, p: pv });
            }
            kl += pv * (pv / qv).log2();
        }
    }
    Ok(kl.max(0.0))
}

/// Shannon entropy of a probability table in bits, `-sum p log2 p`.
pub fn entropy_bits<'a>(probs: impl IntoIterator<Item = &'a f64>) -> f64 {
    let h: f64 = probs
        .into_iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.log2())
        .sum();
    h.max(0.0)
}

/// Binary entropy function in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_bits(&[p, 1.0 - p])
}

impl JointPmf {
    /// Mutual information `I(X;Y) = H(X) + H(Y) - H(X,Y)` in bits, totalled
    /// over the whole block.
    pub fn mutual_information_bits(&self) -> f64 {
        let hx = entropy_bits(&self.x_marginal());
        let hy = entropy_bits(&self.y_marginal());
        let hxy = entropy_bits(self.probs());
        (hx + hy - hxy).max(0.0)
    }

    /// Mutual information per symbol, in bits/symbol.
    pub fn mutual_information_per_symbol(&self) -> f64 {
        self.mutual_information_bits() / self.n() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::pmf::bsc_joint;

    fn two_point(a: f64) -> JointPmf {
        // Distribution on a 2-point space embedded in the smallest joint table.
        JointPmf::new(1, vec![a, 1.0 - a, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn tvd_identity_is_zero() {
        let p = bsc_joint(2, 0.3).unwrap();
        assert_eq!(total_variation(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn tvd_disjoint_point_masses() {
        let p = JointPmf::new(1, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let q = JointPmf::new(1, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(total_variation(&p, &q).unwrap(), 1.0);
    }

    #[test]
    fn tvd_two_point_quarter() {
        // (0.5, 0.5) vs (0.25, 0.75) on a 2-point space.
        let d = tvd_slices(&[0.5, 0.5], &[0.25, 0.75]).unwrap();
        assert_eq!(d, 0.25);
    }

    #[test]
    fn tvd_shape_mismatch() {
        assert!(tvd_slices(&[1.0], &[0.5, 0.5]).is_err());
        let p = bsc_joint(1, 0.1).unwrap();
        let q = bsc_joint(2, 0.1).unwrap();
        assert!(total_variation(&p, &q).is_err());
    }

    #[test]
    fn kl_identity_is_zero() {
        let p = bsc_joint(2, 0.3).unwrap();
        assert_eq!(kl_divergence_bits(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn kl_point_mass_vs_uniform_is_one_bit() {
        // P = (1, 0), Q = (0.5, 0.5) on a 2-point space.
        let p = two_point(1.0);
        let q = two_point(0.5);
        let kl = kl_divergence_bits(&p, &q).unwrap();
        assert!((kl - 1.0).abs() < 1e-12, "kl={kl}");
    }

    #[test]
    fn kl_reports_offending_cell() {
        let p = two_point(0.5);
        let q = two_point(1.0);
        match kl_divergence_bits(&p, &q) {
            Err(PmfError::SupportViolation { x: 0, y: 1, .. }) => {}
            other => panic!("expected support violation, got {other:?}"),
        }
    }

    #[test]
    fn pinsker_on_the_two_point_example() {
        // TVD((.5,.5),(.25,.75)) = 0.25 must satisfy
        // TVD <= sqrt(ln2 * KL_bits / 2).
        let p = two_point(0.5);
        let q = two_point(0.25);
        let tvd = total_variation(&p, &q).unwrap();
        let kl = kl_divergence_bits(&p, &q).unwrap();
        assert!(tvd <= (std::f64::consts::LN_2 * kl / 2.0).sqrt());
        assert_eq!(tvd, 0.25);
    }

    #[test]
    fn mutual_information_endpoints() {
        let mi011 = bsc_joint(1, 0.11).unwrap().mutual_information_per_symbol();
        let mi025 = bsc_joint(1, 0.25).unwrap().mutual_information_per_symbol();
        assert!((mi011 - 0.5004).abs() < 1e-3, "I at p=0.11: {mi011}");
        assert!((mi025 - 0.1887).abs() < 1e-3, "I at p=0.25: {mi025}");
    }

    #[test]
    fn mutual_information_independent_channel_is_zero() {
        let mi = bsc_joint(3, 0.5).unwrap().mutual_information_bits();
        assert_eq!(mi, 0.0);
    }

    #[test]
    fn mutual_information_matches_capacity_formula() {
        // I(X;Y) of a blockwise BSC with uniform input is n(1 - h_b(p)).
        for n in 1..=4 {
            for &p in &[0.05, 0.11, 0.25, 0.4] {
                let mi = bsc_joint(n, p).unwrap().mutual_information_bits();
                let expect = n as f64 * (1.0 - binary_entropy(p));
                assert!((mi - expect).abs() < 1e-9, "n={n} p={p}: {mi} vs {expect}");
            }
        }
    }
}
