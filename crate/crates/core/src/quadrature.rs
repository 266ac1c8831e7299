//! Tensor Gauss–Hermite rules for integrals against the normalized Gaussian
//! measure `π^{-1} e^{-|w|²} d²w` on the complex plane.

use std::num::NonZeroUsize;

use gauss_quad::hermite::GaussHermite;
use num_complex::Complex64;

/// Product rule on `C` for the normalized Gaussian measure.
#[derive(Debug, Clone)]
pub struct PlaneRule {
    nodes: Vec<(Complex64, f64)>,
}

impl PlaneRule {
    /// Rule of the given order in each real direction.
    ///
    /// With `scale = s`, the substitution `w = s v` is applied so that the
    /// rule targets integrands growing like `e^{(1 − s^{-2})|w|²}`.
    pub fn new(order: usize, scale: f64) -> Self {
        let order = NonZeroUsize::new(order).expect("quadrature order must be positive");
        let rule = GaussHermite::new(order);
        let pairs = rule.as_node_weight_pairs();
        let s2 = scale * scale;
        let mut nodes = Vec::with_capacity(pairs.len() * pairs.len());
        for &(x, wx) in pairs {
            for &(y, wy) in pairs {
                let v2 = x * x + y * y;
                let weight = wx * wy / std::f64::consts::PI * s2 * ((1.0 - s2) * v2).exp();
                nodes.push((Complex64::new(scale * x, scale * y), weight));
            }
        }
        Self { nodes }
    }

    pub fn integrate(&self, mut f: impl FnMut(Complex64) -> Complex64) -> Complex64 {
        self.nodes.iter().map(|&(w, weight)| f(w) * weight).sum()
    }

    pub fn nodes(&self) -> &[(Complex64, f64)] {
        &self.nodes
    }
}

/// Product rule on `C²` built from two plane rules.
pub fn integrate_c2(
    rule: &PlaneRule,
    mut f: impl FnMut(Complex64, Complex64) -> Complex64,
) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for &(u, wu) in rule.nodes() {
        let mut inner = Complex64::new(0.0, 0.0);
        for &(v, wv) in rule.nodes() {
            inner += f(u, v) * wv;
        }
        total += inner * wu;
    }
    total
}
