//! Intrinsic curvature from a metric given as jets.
//!
//! Everything here consumes a `d×d` matrix of scalar jets (`d ≤ 3`) and
//! produces Christoffel symbols and the Riemann tensor by exact jet
//! algebra, with no reference to an ambient space. The submanifold
//! pipeline feeds it induced metrics; the warped-product oracle feeds it
//! assembled block metrics.
//!
//! Conventions: `R(X,Y)Z = ∇_X ∇_Y Z − ∇_Y ∇_X Z − ∇_{[X,Y]} Z`,
//! `R_{ijkl} = ⟨R(∂_i,∂_j)∂_k, ∂_l⟩`, and the sectional curvature of an
//! orthonormal plane `(v,w)` is `R(v,w,w,v)`; the round unit sphere then
//! has `K = +1`.

use crate::jets::Jet;
use crate::{Error, Result};

pub const MAX_DIM: usize = 3;

/// `d×d` matrix of jets, symmetric positive definite at the base point.
pub type MetricJets = Vec<Vec<Jet>>;

/// Lowered curvature components `R_{ijkl}`.
pub type RiemannLowered = [[[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM]; MAX_DIM];

/// Component arrays `R(∂_i,∂_j)∂_k = Σ_m up[i][j][k][m] ∂_m`.
pub type RiemannUp = [[[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM]; MAX_DIM];

/// Inverts a metric of jets via the adjugate; fails when the determinant
/// at the base point vanishes or the matrix is badly conditioned.
pub fn invert_metric(g: &MetricJets) -> Result<MetricJets> {
    let d = g.len();
    let det = metric_det(g);
    let det0 = det.value();
    if det0.abs() < 1e-300 {
        return Err(Error::DegenerateMetric("zero determinant".into()));
    }
    let inv_det = det.recip().map_err(|_| {
        Error::DegenerateMetric("determinant has zero constant term".into())
    })?;
    let mut out = vec![vec![Jet::constant(g[0][0].vars(), g[0][0].order(), 0.0); d]; d];
    match d {
        1 => {
            out[0][0] = inv_det;
        }
        2 => {
            out[0][0] = g[1][1].mul(&inv_det);
            out[1][1] = g[0][0].mul(&inv_det);
            let off = g[0][1].neg().mul(&inv_det);
            out[0][1] = off.clone();
            out[1][0] = off;
        }
        3 => {
            for i in 0..3 {
                for j in 0..3 {
                    // cofactor C_ji for the inverse (metric is symmetric)
                    let (a, b) = ((i + 1) % 3, (i + 2) % 3);
                    let (c, e) = ((j + 1) % 3, (j + 2) % 3);
                    let cof = g[a][c].mul(&g[b][e]).sub(&g[a][e].mul(&g[b][c]));
                    out[j][i] = cof.mul(&inv_det);
                }
            }
        }
        _ => return Err(Error::DegenerateMetric(format!("unsupported dim {d}"))),
    }
    Ok(out)
}

pub fn metric_det(g: &MetricJets) -> Jet {
    match g.len() {
        1 => g[0][0].clone(),
        2 => g[0][0].mul(&g[1][1]).sub(&g[0][1].mul(&g[1][0])),
        3 => {
            let m = |i: usize, j: usize| &g[i][j];
            let c0 = m(1, 1).mul(m(2, 2)).sub(&m(1, 2).mul(m(2, 1)));
            let c1 = m(1, 0).mul(m(2, 2)).sub(&m(1, 2).mul(m(2, 0)));
            let c2 = m(1, 0).mul(m(2, 1)).sub(&m(1, 1).mul(m(2, 0)));
            m(0, 0)
                .mul(&c0)
                .sub(&m(0, 1).mul(&c1))
                .add(&m(0, 2).mul(&c2))
        }
        d => panic!("unsupported dim {d}"),
    }
}

/// Christoffel symbols `Γ^k_{ij}` as jets one order below the metric.
///
/// `Γ^k_{ij} = ½ g^{kl} (∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})`.
pub fn christoffels(g: &MetricJets, g_inv: &MetricJets) -> Vec<Vec<Vec<Jet>>> {
    let d = g.len();
    let dg: Vec<Vec<Vec<Jet>>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).map(|k| g[j][k].partial(i)).collect())
                .collect()
        })
        .collect();
    let lower = g[0][0].order() - 1;
    (0..d)
        .map(|k| {
            (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| {
                            let mut acc =
                                Jet::constant(g[0][0].vars(), lower, 0.0);
                            for l in 0..d {
                                let sym = dg[i][j][l].add(&dg[j][i][l]).sub(&dg[l][i][j]);
                                acc = acc.add(&g_inv[k][l].truncated(lower).mul(&sym));
                            }
                            acc.scale(0.5)
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Riemann curvature at the base point from Christoffel jets of order ≥ 1.
///
/// Returns `(up, lowered)` components; unused slots beyond `d` stay zero.
pub fn riemann(
    gamma: &[Vec<Vec<Jet>>],
    g_values: &[[f64; MAX_DIM]; MAX_DIM],
) -> (RiemannUp, RiemannLowered) {
    let d = gamma.len();
    let gamma_val = |k: usize, i: usize, j: usize| gamma[k][i][j].value();
    let dgamma = |l: usize, k: usize, i: usize, j: usize| gamma[k][i][j].partial(l).value();

    let mut up = [[[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM]; MAX_DIM];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for m in 0..d {
                    let mut r = dgamma(i, m, j, k) - dgamma(j, m, i, k);
                    for l in 0..d {
                        r += gamma_val(l, j, k) * gamma_val(m, i, l)
                            - gamma_val(l, i, k) * gamma_val(m, j, l);
                    }
                    up[i][j][k][m] = r;
                }
            }
        }
    }
    let mut low = [[[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM]; MAX_DIM];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut r = 0.0;
                    for m in 0..d {
                        r += up[i][j][k][m] * g_values[m][l];
                    }
                    low[i][j][k][l] = r;
                }
            }
        }
    }
    (up, low)
}

/// Max violation of the classical symmetries of `R_{ijkl}`: antisymmetry
/// in each index pair, pair exchange, and the first Bianchi identity.
pub fn riemann_symmetry_residual(low: &RiemannLowered, d: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let r = low[i][j][k][l];
                    worst = worst.max((r + low[j][i][k][l]).abs());
                    worst = worst.max((r + low[i][j][l][k]).abs());
                    worst = worst.max((r - low[k][l][i][j]).abs());
                    let bianchi = r + low[j][k][i][l] + low[k][i][j][l];
                    worst = worst.max(bianchi.abs());
                }
            }
        }
    }
    worst
}

/// Sectional curvature of the plane spanned by chart-coordinate vectors
/// `v`, `w` (not necessarily orthonormal):
/// `K = R(v,w,w,v) / (|v|²|w|² − ⟨v,w⟩²)`.
pub fn sectional_curvature_raw(
    low: &RiemannLowered,
    g: &[[f64; MAX_DIM]; MAX_DIM],
    d: usize,
    v: &[f64],
    w: &[f64],
) -> Result<f64> {
    let mut num = 0.0;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    num += low[i][j][k][l] * v[i] * w[j] * w[k] * v[l];
                }
            }
        }
    }
    let ip = |a: &[f64], b: &[f64]| {
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += g[i][j] * a[i] * b[j];
            }
        }
        s
    };
    let denom = ip(v, v) * ip(w, w) - ip(v, w).powi(2);
    if denom <= 1e-14 {
        return Err(Error::DegeneratePlane);
    }
    Ok(num / denom)
}

/// Gaussian curvature of a 2-dimensional metric: `K = R_{1221}/det g`
/// evaluated from jets (the metric-coefficient form of the classical
/// formula).
pub fn gaussian_curvature(g: &MetricJets) -> Result<f64> {
    assert_eq!(g.len(), 2);
    let g_inv = invert_metric(g)?;
    let gamma = christoffels(g, &g_inv);
    let mut g_val = [[0.0; MAX_DIM]; MAX_DIM];
    for i in 0..2 {
        for j in 0..2 {
            g_val[i][j] = g[i][j].value();
        }
    }
    let (_, low) = riemann(&gamma, &g_val);
    let det = g_val[0][0] * g_val[1][1] - g_val[0][1] * g_val[1][0];
    if det.abs() < 1e-300 {
        return Err(Error::DegenerateMetric("zero determinant".into()));
    }
    // R(v,w,w,v) with v = d1, w = d2
    Ok(low[0][1][1][0] / det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::Jet;

    fn round_sphere_gnomonic(dim: usize, order: usize, u: &[f64]) -> MetricJets {
        // metric of the unit sphere in gnomonic coordinates:
        // g_ij = (δ_ij (1+|u|²) − u_i u_j) / (1+|u|²)²
        let vars: Vec<Jet> = (0..dim)
            .map(|i| Jet::variable(dim, order, i, u[i]))
            .collect();
        let mut s = Jet::constant(dim, order, 1.0);
        for v in &vars {
            s = s.add(&v.mul(v));
        }
        let s_inv2 = s.mul(&s).recip().unwrap();
        (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        let mut t = vars[i].mul(&vars[j]).neg();
                        if i == j {
                            t = t.add(&s);
                        }
                        t.mul(&s_inv2)
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn gnomonic_sphere_has_curvature_one() {
        for u in [[0.0, 0.0], [0.3, -0.2], [0.7, 0.5]] {
            let g = round_sphere_gnomonic(2, 3, &u);
            let k = gaussian_curvature(&g).unwrap();
            assert!((k - 1.0).abs() < 1e-11, "K = {k} at {u:?}");
        }
    }

    #[test]
    fn three_sphere_sectional_curvature_one() {
        let u = [0.2, -0.1, 0.4];
        let g = round_sphere_gnomonic(3, 3, &u);
        let g_inv = invert_metric(&g).unwrap();
        let gamma = christoffels(&g, &g_inv);
        let mut g_val = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..3 {
            for j in 0..3 {
                g_val[i][j] = g[i][j].value();
            }
        }
        let (_, low) = riemann(&gamma, &g_val);
        assert!(riemann_symmetry_residual(&low, 3) < 1e-12);
        for (v, w) in [
            ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
            ([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]),
            ([0.3, 0.8, -0.1], [0.5, -0.2, 0.9]),
        ] {
            let k = sectional_curvature_raw(&low, &g_val, 3, &v, &w).unwrap();
            assert!((k - 1.0).abs() < 1e-10, "K = {k}");
        }
    }

    #[test]
    fn flat_metric_curvature_zero() {
        let order = 3;
        let g: MetricJets = (0..2)
            .map(|i| {
                (0..2)
                    .map(|j| Jet::constant(2, order, if i == j { 1.0 } else { 0.3 }))
                    .collect()
            })
            .collect();
        let k = gaussian_curvature(&g).unwrap();
        assert_eq!(k, 0.0);
    }

    #[test]
    fn inverse_metric_is_inverse() {
        let u = [0.2, -0.3, 0.1];
        let g = round_sphere_gnomonic(3, 2, &u);
        let g_inv = invert_metric(&g).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = Jet::constant(3, 2, 0.0);
                for k in 0..3 {
                    s = s.add(&g[i][k].mul(&g_inv[k][j]));
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                for (pos, c) in s.coeffs().iter().enumerate() {
                    let want = if pos == 0 { expect } else { 0.0 };
                    assert!((c - want).abs() < 1e-13, "entry ({i},{j}) coeff {pos}");
                }
            }
        }
    }

    #[test]
    fn degenerate_metric_rejected() {
        let g: MetricJets = (0..2)
            .map(|i| {
                (0..2)
                    .map(|_| Jet::constant(2, 2, if i == 0 { 1.0 } else { 0.0 }))
                    .collect()
            })
            .collect();
        // rank-1 metric
        assert!(invert_metric(&g).is_err());
    }

    #[test]
    fn hyperbolic_plane_curvature_minus_one() {
        // upper half plane metric (du² + dv²)/v² around v0 > 0
        let (u0, v0) = (0.3, 1.7);
        let _u = Jet::variable(2, 3, 0, u0);
        let v = Jet::variable(2, 3, 1, v0);
        let w = v.mul(&v).recip().unwrap();
        let zero = Jet::constant(2, 3, 0.0);
        let g: MetricJets = vec![
            vec![w.clone(), zero.clone()],
            vec![zero, w],
        ];
        let k = gaussian_curvature(&g).unwrap();
        assert!((k + 1.0).abs() < 1e-12, "K = {k}");
    }
}
