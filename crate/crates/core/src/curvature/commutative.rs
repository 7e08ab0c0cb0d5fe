//! The curvature density at `theta = 0`, where contraction forms become
//! pointwise products at `t_j = h(x)` and `delta_j` becomes `-i d_j`.

use crate::curvature::DensityB2;
use crate::error::Result;
use crate::metrics::{classical_scalar_curvature, GridFunction};

/// `R(x) = -B21(h, h) : d d h - B22(h, h, h) : d h (x) d h`.
pub fn commutative_scalar_curvature(density: &DensityB2, h: &GridFunction) -> Result<GridFunction> {
    let der = h.derivatives()?;
    let values = (0..h.values.len())
        .map(|i| {
            let t = h.values[i];
            let grad = nalgebra::DVector::from_vec(der.gradient_at(i));
            let b21 = density.b21(t, t)?;
            let b22 = density.b22(t, t, t)?;
            Ok(-b21.component_mul(&der.hessian_at(i)).sum() - (grad.transpose() * b22 * &grad)[0])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridFunction { spec: h.spec.clone(), values })
}

/// The classical curvature multiplied by the density factor `sqrt|g(h)| / 6`.
pub fn scaled_classical_curvature(density: &DensityB2, h: &GridFunction) -> Result<GridFunction> {
    let mut r = classical_scalar_curvature(density.metric(), h)?;
    for (v, &t) in r.values.iter_mut().zip(&h.values) {
        *v *= density.metric().det().eval(t).sqrt() / 6.0;
    }
    Ok(r)
}
