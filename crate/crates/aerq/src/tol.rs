//! Central tolerance configuration shared by every solver.

/// Numerical tolerances, passed down to the solvers so that tests can
/// tighten or loosen them uniformly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute slack for feasibility and equality checks.
    pub abs: f64,
    /// Relative slack, scaled by the magnitude of the quantities compared.
    pub rel: f64,
    /// A pivot below this ratio times the largest pivot declares rank
    /// deficiency.
    pub rank_pivot_ratio: f64,
    /// Residual threshold, relative to `1 + |y_i|`, for membership in the
    /// active set of a fitted quantile.
    pub active_set: f64,
    /// Maximum allowed gap when two routes to the same scalar are compared.
    pub route_equality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            abs: 1e-9,
            rel: 1e-9,
            rank_pivot_ratio: 1e-10,
            active_set: 1e-8,
            route_equality: 1e-8,
        }
    }
}

impl Tolerances {
    /// Slack allowed for a quantity of the given magnitude.
    pub fn feas(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale.abs()
    }

    /// True when `a` and `b` agree within the absolute/relative slack.
    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.feas(a.abs().max(b.abs()))
    }

    /// True when the two route values agree at the route-equality tolerance.
    pub fn routes_agree(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.route_equality * (1.0 + a.abs().max(b.abs()))
    }
}
