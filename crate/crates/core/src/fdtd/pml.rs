//! Convolutional (stretched-coordinate) PML profiles.
//!
//! Cubic polynomial conductivity grading, sigma_max set from a target
//! normal-incidence reflection coefficient. The recursive-convolution
//! coefficients are `b = exp(-sigma dt)` and `c = b - 1` (kappa = 1,
//! alpha = 0), applied to the spatial derivative terms of components whose
//! derivative crosses the layer.

/// Polynomial grading order.
const GRADE_ORDER: f64 = 3.0;
/// Target amplitude reflection at normal incidence.
const TARGET_REFLECTION: f64 = 1e-10;

/// Per-axis CPML data. `b`/`c` are sampled at node (integer) and half
/// (staggered) positions along the axis; entries are `b = 1, c = 0` outside
/// the absorbing layers so kernels can apply them unconditionally.
#[derive(Debug, Clone)]
pub struct AxisPml {
    pub lo_cells: usize,
    pub hi_cells: usize,
    pub b_node: Vec<f64>,
    pub c_node: Vec<f64>,
    pub b_half: Vec<f64>,
    pub c_half: Vec<f64>,
}

impl AxisPml {
    /// Builds profiles for an axis of `n` cells with the given layer
    /// thicknesses in cells. `dx` in nm, `dt` in nm.
    pub fn new(n: usize, lo_cells: usize, hi_cells: usize, dx: f64, dt: f64) -> Self {
        let g = n + 1;
        let mut b_node = vec![1.0; g];
        let mut c_node = vec![0.0; g];
        let mut b_half = vec![1.0; g];
        let mut c_half = vec![0.0; g];
        let sigma_at = |depth_cells: f64, layer_cells: usize| -> f64 {
            if layer_cells == 0 || depth_cells <= 0.0 {
                return 0.0;
            }
            let l = layer_cells as f64 * dx;
            let sigma_max =
                (GRADE_ORDER + 1.0) * (1.0 / TARGET_REFLECTION).ln() / (2.0 * l);
            let rho = (depth_cells / layer_cells as f64).min(1.0);
            sigma_max * rho.powf(GRADE_ORDER)
        };
        for i in 0..g {
            for (pos, b, c) in [
                (i as f64, &mut b_node[i], &mut c_node[i]),
                (i as f64 + 0.5, &mut b_half[i], &mut c_half[i]),
            ] {
                let depth_lo = lo_cells as f64 - pos;
                let depth_hi = pos - (n - hi_cells) as f64;
                let sigma = sigma_at(depth_lo, lo_cells).max(sigma_at(depth_hi, hi_cells));
                if sigma > 0.0 {
                    *b = (-sigma * dt).exp();
                    *c = *b - 1.0;
                }
            }
        }
        Self { lo_cells, hi_cells, b_node, c_node, b_half, c_half }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_is_identity() {
        let p = AxisPml::new(100, 10, 10, 16.0, 8.0);
        for i in 12..88 {
            assert_eq!(p.b_node[i], 1.0);
            assert_eq!(p.c_node[i], 0.0);
        }
        // Absorbing entries decay (b < 1) and deepen toward the boundary.
        assert!(p.b_node[0] < p.b_node[5]);
        assert!(p.b_node[5] < 1.0);
        assert!(p.b_node[100] < p.b_node[95]);
    }

    #[test]
    fn interface_sample_is_weak() {
        let p = AxisPml::new(100, 10, 0, 16.0, 8.0);
        // Node exactly on the PML interface carries zero conductivity.
        assert_eq!(p.c_node[10], 0.0);
        assert!(p.c_half[9] != 0.0);
    }
}
