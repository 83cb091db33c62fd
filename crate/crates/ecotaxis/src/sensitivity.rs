/// Density-dependent taxis sensitivity. The pair (xi, eta) weights how
/// strongly predators at density P drift up the susceptible and infected
/// gradients respectively.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SensitivityKind {
    /// max(0, 1 - P/threshold): linear volume-filling response that shuts
    /// off completely at the crowding threshold.
    CutoffLinear { threshold: f64 },
    /// The identity, value P.
    Identity,
    /// P/(1-P), singular at P = 1. Evaluation is clamped: beyond
    /// P = 1 - clamp_eps both the value and the reported one-sided
    /// derivative are held at their clamp-point evaluations, keeping the
    /// function total. Integrators count activations of this clamp.
    RationalVolumeFill,
    /// Identically zero (taxis disabled).
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaxisSensitivity {
    pub kind: SensitivityKind,
    /// Guard width for the RationalVolumeFill singularity.
    pub clamp_eps: f64,
}

pub const DEFAULT_CLAMP_EPS: f64 = 1e-6;

impl TaxisSensitivity {
    pub fn identity() -> Self {
        TaxisSensitivity { kind: SensitivityKind::Identity, clamp_eps: DEFAULT_CLAMP_EPS }
    }

    pub fn rational_volume_fill(clamp_eps: f64) -> Self {
        TaxisSensitivity { kind: SensitivityKind::RationalVolumeFill, clamp_eps }
    }

    pub fn cutoff_linear(threshold: f64) -> Self {
        TaxisSensitivity {
            kind: SensitivityKind::CutoffLinear { threshold },
            clamp_eps: DEFAULT_CLAMP_EPS,
        }
    }

    pub fn zero() -> Self {
        TaxisSensitivity { kind: SensitivityKind::Zero, clamp_eps: DEFAULT_CLAMP_EPS }
    }

    /// Value and one-sided derivative at predator density `p_dens` >= 0.
    /// Total and finite for every nonnegative input.
    pub fn eval(&self, p_dens: f64) -> (f64, f64) {
        match self.kind {
            SensitivityKind::CutoffLinear { threshold } => {
                if p_dens >= threshold {
                    (0.0, 0.0)
                } else {
                    (1.0 - p_dens / threshold, -1.0 / threshold)
                }
            }
            SensitivityKind::Identity => (p_dens, 1.0),
            SensitivityKind::RationalVolumeFill => {
                let cap = 1.0 - self.clamp_eps;
                let q = p_dens.min(cap);
                let denom = 1.0 - q;
                (q / denom, 1.0 / (denom * denom))
            }
            SensitivityKind::Zero => (0.0, 0.0),
        }
    }

    pub fn value(&self, p_dens: f64) -> f64 {
        self.eval(p_dens).0
    }

    /// True when evaluation at `p_dens` runs into the volume-fill clamp.
    pub fn clamp_active(&self, p_dens: f64) -> bool {
        matches!(self.kind, SensitivityKind::RationalVolumeFill) && p_dens > 1.0 - self.clamp_eps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cutoff_vanishes_beyond_threshold() {
        let s = TaxisSensitivity::cutoff_linear(2.0);
        assert_eq!(s.eval(3.0), (0.0, 0.0));
        assert_eq!(s.eval(2.0), (0.0, 0.0));
        let (v, dv) = s.eval(0.5);
        assert_relative_eq!(v, 0.75);
        assert_relative_eq!(dv, -0.5);
    }

    #[test]
    fn identity_pair() {
        assert_eq!(TaxisSensitivity::identity().eval(0.5), (0.5, 1.0));
    }

    #[test]
    fn rational_volume_fill_plain_evaluation() {
        let s = TaxisSensitivity::rational_volume_fill(1e-6);
        let (v, dv) = s.eval(0.6147);
        assert_relative_eq!(v, 0.6147 / 0.3853, max_relative = 1e-12);
        assert_relative_eq!(dv, 1.0 / (0.3853 * 0.3853), max_relative = 1e-12);
        // frozen decimals for the same point
        assert_relative_eq!(v, 1.5953802232026995, max_relative = 1e-12);
        assert_relative_eq!(dv, 6.735998502991693, max_relative = 1e-12);
    }

    #[test]
    fn rational_volume_fill_clamp_holds_evaluation() {
        let s = TaxisSensitivity::rational_volume_fill(0.05);
        let at_cap = s.eval(0.95);
        assert_eq!(s.eval(0.999), at_cap);
        assert_eq!(s.eval(50.0), at_cap);
        assert_relative_eq!(at_cap.0, 19.0, max_relative = 1e-12);
        assert!(s.clamp_active(0.96));
        assert!(!s.clamp_active(0.94));
    }

    #[test]
    fn cutoff_is_lipschitz_with_constant_one_over_threshold() {
        let threshold = 2.5;
        let s = TaxisSensitivity::cutoff_linear(threshold);
        let grid: Vec<f64> = (0..400).map(|i| i as f64 * 0.02).collect();
        for w in grid.windows(2) {
            let dv = (s.value(w[1]) - s.value(w[0])).abs();
            assert!(dv <= (w[1] - w[0]) / threshold + 1e-15);
        }
    }
}
