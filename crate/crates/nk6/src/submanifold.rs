//! Extrinsic geometry of immersed submanifolds of the six-sphere.
//!
//! An [`Immersion`] is a chart together with a map into the unit sphere
//! of imaginary Cayley numbers, evaluable on jets of any order up to
//! four. [`CurvaturePackage::compute`] turns one chart point into the
//! full local geometry: induced metric, Christoffel symbols, second
//! fundamental form, curvature tensor by two independent routes
//! (metric jets and the Gauss equation), normal curvature, and the first
//! and second covariant derivatives of `h`.
//!
//! All normal-space computations use the frame `{J E_a}` obtained by
//! applying the almost complex structure to a Gram–Schmidt tangent
//! frame; for Lagrangian immersions this is an orthonormal basis of the
//! normal bundle, and the first Gram–Schmidt vector follows the first
//! chart direction (the base direction of warped charts).

use crate::cayley::{cross, Vector7};
use crate::intrinsic::{christoffels, invert_metric, riemann, MetricJets, RiemannLowered, RiemannUp};
use crate::jets::{Jet, JetMap7};
use crate::{tol, Error, Result};
use std::sync::Arc;

/// Open coordinate box of a chart.
#[derive(Debug, Clone, Copy)]
pub struct ChartBox {
    pub dim: usize,
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl ChartBox {
    pub fn new(dim: usize, lo: [f64; 3], hi: [f64; 3]) -> ChartBox {
        assert!((1..=3).contains(&dim));
        ChartBox { dim, lo, hi }
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        (0..self.dim).all(|i| self.lo[i] < u[i] && u[i] < self.hi[i])
    }

    pub fn center(&self) -> [f64; 3] {
        let mut c = [0.0; 3];
        for i in 0..self.dim {
            c[i] = 0.5 * (self.lo[i] + self.hi[i]);
        }
        c
    }

    /// Uniform sample grid over the sub-box that keeps `margin_frac` of
    /// each side's width away from the boundary.
    pub fn grid(&self, res: &[usize], margin_frac: f64) -> Vec<[f64; 3]> {
        let mut points = vec![[0.0; 3]];
        for axis in 0..self.dim {
            let n = res.get(axis).copied().unwrap_or(res[res.len() - 1]).max(2);
            let width = self.hi[axis] - self.lo[axis];
            let a = self.lo[axis] + margin_frac * width;
            let b = self.hi[axis] - margin_frac * width;
            let mut next = Vec::with_capacity(points.len() * n);
            for p in &points {
                for k in 0..n {
                    let mut q = *p;
                    q[axis] = a + (b - a) * (k as f64) / ((n - 1) as f64);
                    next.push(q);
                }
            }
            points = next;
        }
        points
    }
}

type MapFn = dyn Fn(&[f64], usize) -> JetMap7 + Send + Sync;

/// A chart domain plus a smooth map into the sphere, evaluable on jets.
#[derive(Clone)]
pub struct Immersion {
    pub dim: usize,
    pub domain: ChartBox,
    pub label: String,
    map: Arc<MapFn>,
}

impl std::fmt::Debug for Immersion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Immersion")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .finish()
    }
}

impl Immersion {
    pub fn new(
        dim: usize,
        domain: ChartBox,
        label: impl Into<String>,
        map: impl Fn(&[f64], usize) -> JetMap7 + Send + Sync + 'static,
    ) -> Immersion {
        assert!(dim == 2 || dim == 3, "immersions are 2- or 3-dimensional");
        assert_eq!(domain.dim, dim);
        Immersion {
            dim,
            domain,
            label: label.into(),
            map: Arc::new(map),
        }
    }

    pub fn evaluate(&self, u: &[f64], order: usize) -> JetMap7 {
        (self.map)(u, order)
    }
}

const D: usize = 3;
type Mat = [[f64; D]; D];
type Vec3 = [f64; D];

fn mat_zero() -> Mat {
    [[0.0; D]; D]
}

fn mat_mul(a: &Mat, b: &Mat, d: usize) -> Mat {
    let mut out = mat_zero();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn mat_sub(a: &Mat, b: &Mat, d: usize) -> Mat {
    let mut out = mat_zero();
    for i in 0..d {
        for j in 0..d {
            out[i][j] = a[i][j] - b[i][j];
        }
    }
    out
}

/// Lower-triangular Cholesky factor of a small SPD matrix.
fn cholesky(g: &Mat, d: usize) -> Result<Mat> {
    let mut l = mat_zero();
    for i in 0..d {
        for j in 0..=i {
            let mut s = g[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::DegenerateMetric(format!(
                        "not positive definite (pivot {s:.3e})"
                    )));
                }
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix.
fn invert_lower(l: &Mat, d: usize) -> Mat {
    let mut inv = mat_zero();
    for i in 0..d {
        inv[i][i] = 1.0 / l[i][i];
        for j in 0..i {
            let mut s = 0.0;
            for k in j..i {
                s += l[i][k] * inv[k][j];
            }
            inv[i][j] = -s / l[i][i];
        }
    }
    inv
}

/// Second-fundamental-form data and curvature tensors at one chart point.
///
/// Tensors are stored in chart coordinates unless the field name says
/// `frame`; the frame is `g`-orthonormal with `E_1` along the first
/// chart direction, and `j_frame[a] = x × E_a`.
#[derive(Debug, Clone)]
pub struct CurvaturePackage {
    pub dim: usize,
    pub order: usize,
    pub point: Vec3,
    pub position: Vector7,
    pub tangents: [Vector7; D],
    pub metric: Mat,
    pub metric_inv: Mat,
    pub christoffels: [[[f64; D]; D]; D],
    /// `h_{ij}`, normal-valued.
    pub h: [[Vector7; D]; D],
    /// Frame coefficients: `E_a = Σ_i frame[a][i] ∂_i`.
    pub frame: Mat,
    pub frame_vectors: [Vector7; D],
    pub j_frame: [Vector7; D],
    /// `max |⟨J E_a, E_b⟩|` over frame pairs; zero for totally real.
    pub totally_real_residual: f64,
    pub is_lagrangian: bool,
    /// `max |⟨h_{ij}, v⟩|` over tangents and position; exactness check.
    pub h_normality_residual: f64,
    /// Intrinsic curvature (chart components), order ≥ 3.
    pub riemann: Option<(RiemannUp, RiemannLowered)>,
    /// Intrinsic curvature in the orthonormal frame.
    pub riemann_frame: Option<RiemannLowered>,
    /// Gauss-equation curvature in the orthonormal frame (Lagrangian only).
    pub riemann_gauss_frame: Option<RiemannLowered>,
    /// Max componentwise gap between the two curvature routes.
    pub gauss_residual: Option<f64>,
    /// Shape operators `A_{JE_a}` in frame components (Lagrangian only).
    pub shape_operators_frame: Option<[Mat; D]>,
    /// `h(E_a, E_b)` in the frame, ambient-valued.
    pub h_frame: [[Vector7; D]; D],
    /// `(∇h)_{ijk}`, order ≥ 3.
    pub nabla_h: Option<[[[Vector7; D]; D]; D]>,
    /// `R^⊥(∂_i, ∂_j) ν_a`, order ≥ 3 and Lagrangian.
    pub rperp: Option<[[[Vector7; D]; D]; D]>,
    /// `(∇²h)_{ijkl}`, order 4.
    pub nabla2_h: Option<[[[[Vector7; D]; D]; D]; D]>,
    nabla_h_jets: Option<Vec<JetMap7>>,
}

impl CurvaturePackage {
    /// Runs the full pipeline at chart point `u` with jets of `order`
    /// (2..=4). Higher order fills more fields; see the field docs.
    pub fn compute(imm: &Immersion, u: &[f64], order: usize) -> Result<CurvaturePackage> {
        assert!((2..=4).contains(&order), "jet order must be 2..=4");
        let d = imm.dim;
        let x = imm.evaluate(u, order);

        let norm = x.value().norm();
        if (norm - 1.0).abs() > tol::ON_SPHERE {
            return Err(Error::NotOnSphere(norm));
        }

        let om1 = order - 1;
        let om2 = order - 2;
        let tangent_jets: Vec<JetMap7> = (0..d).map(|i| x.partial(i)).collect();
        let tangents: Vec<Vector7> = tangent_jets.iter().map(|t| t.value()).collect();

        // full-rank check on the differential
        {
            let m = nalgebra::DMatrix::from_fn(7, d, |r, c| tangents[c][r]);
            let sv = m.svd(false, false).singular_values;
            let smin = sv[sv.len() - 1];
            if smin <= tol::RANK {
                return Err(Error::DegenerateDifferential(smin));
            }
        }

        let g_jets: MetricJets = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| tangent_jets[i].dot(&tangent_jets[j]))
                    .collect()
            })
            .collect();
        let mut metric = mat_zero();
        for i in 0..d {
            for j in 0..d {
                metric[i][j] = g_jets[i][j].value();
            }
        }
        {
            let m = nalgebra::DMatrix::from_fn(d, d, |r, c| metric[r][c]);
            let eig = m.symmetric_eigenvalues();
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for &e in eig.iter() {
                lo = lo.min(e);
                hi = hi.max(e);
            }
            if lo <= 0.0 || hi / lo > tol::METRIC_CONDITION {
                return Err(Error::DegenerateMetric(format!(
                    "condition number {:.3e}",
                    hi / lo.max(1e-300)
                )));
            }
        }

        let g_inv_jets = invert_metric(&g_jets)?;
        let mut metric_inv = mat_zero();
        for i in 0..d {
            for j in 0..d {
                metric_inv[i][j] = g_inv_jets[i][j].value();
            }
        }

        let gamma_jets = christoffels(&g_jets, &g_inv_jets);
        let mut christoffel_values = [[[0.0; D]; D]; D];
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    christoffel_values[k][i][j] = gamma_jets[k][i][j].value();
                }
            }
        }

        // h_ij = d_ij x - Γ^k_ij d_k x + g_ij x, as jets of order om2
        let x_m2 = x.truncated(om2);
        let t_m2: Vec<JetMap7> = tangent_jets.iter().map(|t| t.truncated(om2)).collect();
        let h_jets: Vec<Vec<JetMap7>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let mut hij = tangent_jets[i].partial(j);
                        for k in 0..d {
                            hij = hij.sub(&t_m2[k].scale_jet(&gamma_jets[k][i][j].truncated(om2)));
                        }
                        hij.add(&x_m2.scale_jet(&g_jets[i][j].truncated(om2)))
                    })
                    .collect()
            })
            .collect();
        let mut h = [[Vector7::ZERO; D]; D];
        let mut h_normality_residual: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                h[i][j] = h_jets[i][j].value();
                for t in &tangents {
                    h_normality_residual =
                        h_normality_residual.max(h[i][j].dot(t).abs() / t.norm().max(1e-30));
                }
                h_normality_residual = h_normality_residual.max(h[i][j].dot(&x.value()).abs());
            }
        }

        // orthonormal frame: chart-ordered Gram-Schmidt, values via the
        // inverse Cholesky factor, jets via the same algebra on jets
        let chol = cholesky(&metric, d)?;
        let frame = invert_lower(&chol, d);
        let mut frame_vectors = [Vector7::ZERO; D];
        for a in 0..d {
            for i in 0..d {
                frame_vectors[a] = frame_vectors[a].add(&tangents[i].scale(frame[a][i]));
            }
        }
        let frame_jets = gram_schmidt_jets(&tangent_jets, d)?;
        let x_m1 = x.truncated(om1);
        let nu_jets: Vec<JetMap7> = (0..d).map(|a| x_m1.cross(&frame_jets[a])).collect();
        let mut j_frame = [Vector7::ZERO; D];
        for a in 0..d {
            j_frame[a] = cross(&x.value(), &frame_vectors[a]);
        }

        let mut totally_real_residual: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                totally_real_residual =
                    totally_real_residual.max(j_frame[a].dot(&frame_vectors[b]).abs());
            }
        }
        let is_lagrangian = d == 3 && totally_real_residual <= tol::LAGRANGIAN;

        let mut h_frame = [[Vector7::ZERO; D]; D];
        for a in 0..d {
            for b in 0..d {
                let mut acc = Vector7::ZERO;
                for i in 0..d {
                    for j in 0..d {
                        acc = acc.add(&h[i][j].scale(frame[a][i] * frame[b][j]));
                    }
                }
                h_frame[a][b] = acc;
            }
        }

        let mut pkg = CurvaturePackage {
            dim: d,
            order,
            point: {
                let mut p = [0.0; 3];
                p[..d].copy_from_slice(&u[..d]);
                p
            },
            position: x.value(),
            tangents: {
                let mut t = [Vector7::ZERO; D];
                t[..d].copy_from_slice(&tangents);
                t
            },
            metric,
            metric_inv,
            christoffels: christoffel_values,
            h,
            frame,
            frame_vectors,
            j_frame,
            totally_real_residual,
            is_lagrangian,
            h_normality_residual,
            riemann: None,
            riemann_frame: None,
            riemann_gauss_frame: None,
            gauss_residual: None,
            shape_operators_frame: None,
            h_frame,
            nabla_h: None,
            rperp: None,
            nabla2_h: None,
            nabla_h_jets: None,
        };

        if is_lagrangian {
            let mut ops = [mat_zero(); D];
            for a in 0..d {
                for b in 0..d {
                    for c in 0..d {
                        ops[a][b][c] = h_frame[b][c].dot(&j_frame[a]);
                    }
                }
            }
            pkg.shape_operators_frame = Some(ops);
        }

        if order >= 3 {
            let (up, low) = riemann(&gamma_jets, &metric);
            let rf = to_frame(&low, &frame, d);
            pkg.riemann = Some((up, low));
            pkg.riemann_frame = Some(rf);

            if let Some(ops) = &pkg.shape_operators_frame {
                let mut rg = [[[[0.0; D]; D]; D]; D];
                for a in 0..d {
                    for b in 0..d {
                        let bracket = mat_sub(
                            &mat_mul(&ops[a], &ops[b], d),
                            &mat_mul(&ops[b], &ops[a], d),
                            d,
                        );
                        for c in 0..d {
                            for e in 0..d {
                                let id_part = ((b == c && a == e) as i32
                                    - (a == c && b == e) as i32)
                                    as f64;
                                rg[a][b][c][e] = id_part + bracket[e][c];
                            }
                        }
                    }
                }
                let mut residual: f64 = 0.0;
                for a in 0..d {
                    for b in 0..d {
                        for c in 0..d {
                            for e in 0..d {
                                residual = residual.max((rg[a][b][c][e] - rf[a][b][c][e]).abs());
                            }
                        }
                    }
                }
                pkg.riemann_gauss_frame = Some(rg);
                pkg.gauss_residual = Some(residual);
            }

            // (∇h)_ijk = P⊥(∂_i h_jk) - Γ^l_ij h_lk - Γ^l_ik h_jl
            let om3 = order - 3;
            let h_m3: Vec<Vec<JetMap7>> = h_jets
                .iter()
                .map(|row| row.iter().map(|v| v.truncated(om3)).collect())
                .collect();
            let proj = NormalProjector::new(&x, &tangent_jets, &g_inv_jets, om3);
            let mut nh_jets = Vec::with_capacity(d * d * d);
            let mut nh = [[[Vector7::ZERO; D]; D]; D];
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        let mut v = proj.apply(&h_jets[j][k].partial(i));
                        for l in 0..d {
                            let gl = gamma_jets[l][i][j].truncated(om3);
                            v = v.sub(&h_m3[l][k].scale_jet(&gl));
                            let gl2 = gamma_jets[l][i][k].truncated(om3);
                            v = v.sub(&h_m3[j][l].scale_jet(&gl2));
                        }
                        nh[i][j][k] = v.value();
                        nh_jets.push(v);
                    }
                }
            }
            pkg.nabla_h = Some(nh);
            pkg.nabla_h_jets = Some(nh_jets);

            if is_lagrangian {
                // R⊥(∂_i,∂_j)ν_a from the connection, via jets of ν
                let om2p = order - 2;
                let projm2 = NormalProjector::new(&x, &tangent_jets, &g_inv_jets, om2p);
                let project_val = |v: &Vector7| -> Vector7 {
                    let mut out = *v;
                    for jj in 0..d {
                        for kk in 0..d {
                            out = out
                                .sub(&tangents[kk].scale(metric_inv[jj][kk] * v.dot(&tangents[jj])));
                        }
                    }
                    out.sub(&x.value().scale(out.dot(&x.value())))
                };
                let mut rp = [[[Vector7::ZERO; D]; D]; D];
                for a in 0..d {
                    let cov: Vec<JetMap7> =
                        (0..d).map(|j| projm2.apply(&nu_jets[a].partial(j))).collect();
                    for i in 0..d {
                        for j in 0..d {
                            if i == j {
                                continue;
                            }
                            let second = project_val(&cov[j].partial(i).value());
                            let second_swapped = project_val(&cov[i].partial(j).value());
                            rp[i][j][a] = second.sub(&second_swapped);
                        }
                    }
                }
                pkg.rperp = Some(rp);
            }
        }

        if order == 4 {
            let nh_jets = pkg.nabla_h_jets.as_ref().unwrap();
            let nh = pkg.nabla_h.as_ref().unwrap();
            let project_val = |v: &Vector7| -> Vector7 {
                let mut out = *v;
                for jj in 0..d {
                    for kk in 0..d {
                        out = out
                            .sub(&tangents[kk].scale(metric_inv[jj][kk] * v.dot(&tangents[jj])));
                    }
                }
                out.sub(&x.value().scale(out.dot(&x.value())))
            };
            let at = |i: usize, j: usize, k: usize| &nh_jets[(i * d + j) * d + k];
            let mut n2 = [[[[Vector7::ZERO; D]; D]; D]; D];
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        for l in 0..d {
                            let mut v = project_val(&at(j, k, l).partial(i).value());
                            for m in 0..d {
                                v = v.sub(&nh[m][k][l].scale(christoffel_values[m][i][j]));
                                v = v.sub(&nh[j][m][l].scale(christoffel_values[m][i][k]));
                                v = v.sub(&nh[j][k][m].scale(christoffel_values[m][i][l]));
                            }
                            n2[i][j][k][l] = v;
                        }
                    }
                }
            }
            pkg.nabla2_h = Some(n2);
        }

        Ok(pkg)
    }

    /// Mean curvature vector `H = (1/d) g^{ij} h_{ij}`.
    pub fn mean_curvature(&self) -> Vector7 {
        let d = self.dim;
        let mut acc = Vector7::ZERO;
        for i in 0..d {
            for j in 0..d {
                acc = acc.add(&self.h[i][j].scale(self.metric_inv[i][j]));
            }
        }
        acc.scale(1.0 / d as f64)
    }

    /// Max `|h_{ij}|` over the chart basis; zero for totally geodesic.
    pub fn h_norm(&self) -> f64 {
        let mut m: f64 = 0.0;
        for a in 0..self.dim {
            for b in 0..self.dim {
                m = m.max(self.h_frame[a][b].norm());
            }
        }
        m
    }

    /// `h(v, w)` for chart-coordinate vectors.
    pub fn h_apply(&self, v: &[f64], w: &[f64]) -> Vector7 {
        let mut acc = Vector7::ZERO;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc = acc.add(&self.h[i][j].scale(v[i] * w[j]));
            }
        }
        acc
    }

    /// `R(v, w) z` in chart coordinates from the intrinsic tensor.
    pub fn riemann_apply(&self, v: &[f64], w: &[f64], z: &[f64]) -> Result<Vec3> {
        let (up, _) = self
            .riemann
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("curvature needs jet order >= 3".into()))?;
        let d = self.dim;
        let mut out = [0.0; D];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for m in 0..d {
                        out[m] += up[i][j][k][m] * v[i] * w[j] * z[k];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Ambient vector of chart components.
    pub fn embed(&self, v: &[f64]) -> Vector7 {
        let mut acc = Vector7::ZERO;
        for i in 0..self.dim {
            acc = acc.add(&self.tangents[i].scale(v[i]));
        }
        acc
    }

    /// Chart components of a tangent ambient vector.
    pub fn chart_components(&self, v: &Vector7) -> Vec3 {
        let d = self.dim;
        let mut out = [0.0; D];
        for i in 0..d {
            for j in 0..d {
                out[i] += self.metric_inv[i][j] * v.dot(&self.tangents[j]);
            }
        }
        out
    }

    /// `J v = x × v` at this point.
    pub fn apply_j(&self, v: &Vector7) -> Vector7 {
        cross(&self.position, v)
    }

    /// `R^⊥(X, Y) ξ` for chart-coordinate `X`, `Y` and a normal vector
    /// `ξ`, expanded in the `J`-frame.
    pub fn rperp_apply(&self, x: &[f64], y: &[f64], xi: &Vector7) -> Result<Vector7> {
        let rp = self
            .rperp
            .as_ref()
            .ok_or_else(|| Error::NotLagrangian(self.totally_real_residual))?;
        let d = self.dim;
        let mut out = Vector7::ZERO;
        for b in 0..d {
            let c = xi.dot(&self.j_frame[b]);
            if c == 0.0 {
                continue;
            }
            for i in 0..d {
                for j in 0..d {
                    out = out.add(&rp[i][j][b].scale(c * x[i] * y[j]));
                }
            }
        }
        Ok(out)
    }
}

/// Gram–Schmidt on tangent jets; needs the metric nondegenerate at the
/// base point.
fn gram_schmidt_jets(tangent_jets: &[JetMap7], d: usize) -> Result<Vec<JetMap7>> {
    let order = tangent_jets[0].order();
    let mut frame: Vec<JetMap7> = Vec::with_capacity(d);
    for i in 0..d {
        let mut v = tangent_jets[i].clone();
        for e in frame.iter().take(i) {
            let c = v.dot(e);
            v = v.sub(&e.scale_jet(&c));
        }
        let n2 = v.norm_squared();
        if n2.value() <= 1e-16 {
            return Err(Error::DegenerateMetric(format!(
                "Gram-Schmidt pivot {i} collapsed"
            )));
        }
        let inv = n2.sqrt()?.recip()?;
        frame.push(v.scale_jet(&inv));
    }
    debug_assert_eq!(frame[0].order(), order);
    Ok(frame)
}

/// Projects jet-valued ambient vectors onto the normal space, continuing
/// the projection coefficients as jets.
struct NormalProjector {
    x: JetMap7,
    tangents: Vec<JetMap7>,
    g_inv: Vec<Vec<Jet>>,
    d: usize,
}

impl NormalProjector {
    fn new(x: &JetMap7, tangent_jets: &[JetMap7], g_inv_jets: &MetricJets, order: usize) -> Self {
        let d = tangent_jets.len();
        NormalProjector {
            x: x.truncated(order),
            tangents: tangent_jets.iter().map(|t| t.truncated(order)).collect(),
            g_inv: g_inv_jets
                .iter()
                .map(|row| row.iter().map(|j| j.truncated(order)).collect())
                .collect(),
            d,
        }
    }

    fn apply(&self, v: &JetMap7) -> JetMap7 {
        let mut out = v.clone();
        for j in 0..self.d {
            let c = v.dot(&self.tangents[j]);
            for k in 0..self.d {
                out = out.sub(&self.tangents[k].scale_jet(&c.mul(&self.g_inv[j][k])));
            }
        }
        let r = out.dot(&self.x);
        out.sub(&self.x.scale_jet(&r))
    }
}

fn to_frame(low: &RiemannLowered, frame: &Mat, d: usize) -> RiemannLowered {
    let mut out = [[[[0.0; D]; D]; D]; D];
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    let mut s = 0.0;
                    for i in 0..d {
                        for j in 0..d {
                            for k in 0..d {
                                for l in 0..d {
                                    s += low[i][j][k][l]
                                        * frame[a][i]
                                        * frame[b][j]
                                        * frame[c][k]
                                        * frame[e][l];
                                }
                            }
                        }
                    }
                    out[a][b][c][e] = s;
                }
            }
        }
    }
    out
}

/// Induced metric and Christoffel symbols at `u` (order-2 jets).
pub fn fundamental_data(imm: &Immersion, u: &[f64]) -> Result<CurvaturePackage> {
    if !imm.domain.contains(u) {
        return Err(Error::InvalidConfig(format!(
            "point {u:?} outside chart domain of `{}`",
            imm.label
        )));
    }
    CurvaturePackage::compute(imm, u, 2)
}

/// Second fundamental form at `u`; same depth as [`fundamental_data`].
pub fn second_fundamental_form(imm: &Immersion, u: &[f64]) -> Result<CurvaturePackage> {
    fundamental_data(imm, u)
}

/// Shape operator `A_ξ = g⁻¹ [⟨h_{ij}, ξ⟩]` in chart coordinates.
///
/// `ξ` must be normal: orthogonal to the tangent space and the position.
pub fn shape_operator(pkg: &CurvaturePackage, xi: &Vector7) -> Result<Mat> {
    let scale = xi.norm().max(1e-30);
    let mut residual = xi.dot(&pkg.position).abs() / scale;
    for i in 0..pkg.dim {
        residual =
            residual.max(xi.dot(&pkg.tangents[i]).abs() / (scale * pkg.tangents[i].norm()));
    }
    if residual > 1e-8 {
        return Err(Error::NotNormal(residual));
    }
    let d = pkg.dim;
    let mut a = mat_zero();
    for k in 0..d {
        for j in 0..d {
            for l in 0..d {
                a[k][j] += pkg.metric_inv[k][l] * pkg.h[l][j].dot(xi);
            }
        }
    }
    Ok(a)
}

/// Both curvature routes with their disagreement.
#[derive(Debug, Clone)]
pub struct CurvatureComparison {
    pub intrinsic_frame: RiemannLowered,
    pub gauss_frame: RiemannLowered,
    pub residual: f64,
}

/// Compares the intrinsic curvature (metric jets) with the Gauss
/// equation assembly; disagreement beyond 1e-7 is an error flagging the
/// immersion as non-Lagrangian or numerically bad.
pub fn curvature_tensor(pkg: &CurvaturePackage) -> Result<CurvatureComparison> {
    let intrinsic_frame = pkg
        .riemann_frame
        .ok_or_else(|| Error::InvalidConfig("curvature needs jet order >= 3".into()))?;
    let gauss_frame = pkg
        .riemann_gauss_frame
        .ok_or(Error::NotLagrangian(pkg.totally_real_residual))?;
    let residual = pkg.gauss_residual.unwrap();
    if residual > tol::THIRD_DERIV {
        return Err(Error::CurvatureMismatch(residual));
    }
    Ok(CurvatureComparison {
        intrinsic_frame,
        gauss_frame,
        residual,
    })
}

/// Residuals of the normal-curvature identities on the `J`-frame.
#[derive(Debug, Clone)]
pub struct NormalCurvatureCheck {
    /// Connection route vs `R^⊥(X,Y)JZ = J [A_{JX}, A_{JY}] Z`.
    pub vs_shape_commutator: f64,
    /// Connection route vs `J R(X,Y)Z + ⟨X,Z⟩JY − ⟨Y,Z⟩JX`.
    pub vs_gauss_combined: f64,
}

/// Verifies the normal curvature computed from the connection against
/// both closed forms, on all frame triples.
pub fn normal_curvature(pkg: &CurvaturePackage) -> Result<NormalCurvatureCheck> {
    if !pkg.is_lagrangian {
        return Err(Error::NotLagrangian(pkg.totally_real_residual));
    }
    let ops = pkg.shape_operators_frame.as_ref().unwrap();
    let rf = pkg
        .riemann_frame
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("normal curvature needs jet order >= 3".into()))?;
    if pkg.rperp.is_none() {
        return Err(Error::InvalidConfig(
            "normal curvature needs jet order >= 3".into(),
        ));
    }
    let d = pkg.dim;
    let mut vs_a: f64 = 0.0;
    let mut vs_g: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                // connection route for X = E_a, Y = E_b, ξ = ν_c
                let xf = frame_row(pkg, a);
                let yf = frame_row(pkg, b);
                let conn = pkg.rperp_apply(&xf, &yf, &pkg.j_frame[c])?;

                // J [A_a, A_b] E_c
                let bracket = mat_sub(
                    &mat_mul(&ops[a], &ops[b], d),
                    &mat_mul(&ops[b], &ops[a], d),
                    d,
                );
                let mut w = Vector7::ZERO;
                for e in 0..d {
                    w = w.add(&pkg.frame_vectors[e].scale(bracket[e][c]));
                }
                let shape_route = pkg.apply_j(&w);
                vs_a = vs_a.max(conn.sub(&shape_route).norm());

                // J R(E_a,E_b)E_c + δ_ac J E_b − δ_bc J E_a
                let mut rz = Vector7::ZERO;
                for e in 0..d {
                    rz = rz.add(&pkg.frame_vectors[e].scale(rf[a][b][c][e]));
                }
                let mut comb = pkg.apply_j(&rz);
                if a == c {
                    comb = comb.add(&pkg.j_frame[b]);
                }
                if b == c {
                    comb = comb.sub(&pkg.j_frame[a]);
                }
                vs_g = vs_g.max(conn.sub(&comb).norm());
            }
        }
    }
    Ok(NormalCurvatureCheck {
        vs_shape_commutator: vs_a,
        vs_gauss_combined: vs_g,
    })
}

fn frame_row(pkg: &CurvaturePackage, a: usize) -> Vec3 {
    pkg.frame[a]
}

/// `(∇h)_{ijk}`; requires jet order ≥ 3.
pub fn nabla_h(pkg: &CurvaturePackage) -> Result<&[[[Vector7; D]; D]; D]> {
    pkg.nabla_h
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("nabla_h needs jet order >= 3".into()))
}

/// `(∇²h)_{ijkl}`; requires jet order 4.
pub fn nabla2_h(pkg: &CurvaturePackage) -> Result<&[[[[Vector7; D]; D]; D]; D]> {
    pkg.nabla2_h
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("nabla2_h needs jet order 4".into()))
}

/// Max defect of total symmetry of `∇h` over all slot permutations,
/// in the orthonormal frame scale.
pub fn codazzi_residual(pkg: &CurvaturePackage) -> Result<f64> {
    let nh = nabla_h(pkg)?;
    let d = pkg.dim;
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let base = nh[i][j][k];
                for perm in [(j, i, k), (i, k, j), (k, j, i)] {
                    let other = nh[perm.0][perm.1][perm.2];
                    worst = worst.max(base.sub(&other).norm());
                }
            }
        }
    }
    Ok(worst)
}

/// Residual of the Ricci identity: antisymmetrized `∇²h` against
/// `R^⊥ h − h(R·, ·) − h(·, R·)` on all chart index tuples.
pub fn ricci_identity_residual(pkg: &CurvaturePackage) -> Result<f64> {
    let n2 = nabla2_h(pkg)?;
    let (up, _) = pkg.riemann.as_ref().unwrap();
    if pkg.rperp.is_none() {
        return Err(Error::NotLagrangian(pkg.totally_real_residual));
    }
    let d = pkg.dim;
    let mut worst: f64 = 0.0;
    let ei = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
    ];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let lhs = n2[i][j][k][l].sub(&n2[j][i][k][l]);
                    let mut rhs = pkg.rperp_apply(&ei[i], &ei[j], &pkg.h[k][l])?;
                    for m in 0..d {
                        rhs = rhs.sub(&pkg.h[m][l].scale(up[i][j][k][m]));
                        rhs = rhs.sub(&pkg.h[k][m].scale(up[i][j][l][m]));
                    }
                    worst = worst.max(lhs.sub(&rhs).norm());
                }
            }
        }
    }
    Ok(worst)
}

/// Residual of the symmetric-slot identity
/// `(∇²h)(W,X,Y,Z) = (∇²h)(W,Y,X,Z)`.
pub fn second_derivative_symmetry_residual(pkg: &CurvaturePackage) -> Result<f64> {
    let n2 = nabla2_h(pkg)?;
    let d = pkg.dim;
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    worst = worst.max(n2[i][j][k][l].sub(&n2[i][k][j][l]).norm());
                }
            }
        }
    }
    Ok(worst)
}

/// Residuals of the two cyclic-sum forms of the derived curvature
/// constraint on `h`, and of their mutual consistency.
#[derive(Debug, Clone)]
pub struct TsinghuaResidual {
    /// `Σ_cyc J R(W,X) J h(Y,Z) + h(Y, R(W,X)Z)`.
    pub cyclic_j_form: f64,
    /// `Σ_cyc R^⊥(W,X) h(Y,Z) − h(Y, R(W,X)Z)`.
    pub cyclic_perp_form: f64,
    /// Norm of the sum of the two cyclic sums; cancels via the totally
    /// symmetric cubic form.
    pub consistency: f64,
}

/// Evaluates both cyclic identities on the tangent vectors `w,x,y,z`
/// given in chart coordinates.
pub fn verify_tsinghua_identity(
    pkg: &CurvaturePackage,
    w: &[f64],
    x: &[f64],
    y: &[f64],
    z: &[f64],
) -> Result<TsinghuaResidual> {
    if !pkg.is_lagrangian {
        return Err(Error::NotLagrangian(pkg.totally_real_residual));
    }
    if pkg.riemann.is_none() || pkg.rperp.is_none() {
        return Err(Error::InvalidConfig(
            "cyclic identities need jet order >= 3".into(),
        ));
    }

    let term_j = |a: &[f64], b: &[f64], c: &[f64]| -> Result<Vector7> {
        // J R(a,b) J h(c,z) + h(c, R(a,b)z)
        let hcz = pkg.h_apply(c, z);
        let jh = pkg.apply_j(&hcz);
        let jh_chart = pkg.chart_components(&jh);
        let r1 = pkg.riemann_apply(a, b, &jh_chart)?;
        let first = pkg.apply_j(&pkg.embed(&r1));
        let rz = pkg.riemann_apply(a, b, z)?;
        let second = pkg.h_apply(c, &rz);
        Ok(first.add(&second))
    };
    let term_perp = |a: &[f64], b: &[f64], c: &[f64]| -> Result<Vector7> {
        // R⊥(a,b) h(c,z) − h(c, R(a,b)z)
        let hcz = pkg.h_apply(c, z);
        let first = pkg.rperp_apply(a, b, &hcz)?;
        let rz = pkg.riemann_apply(a, b, z)?;
        let second = pkg.h_apply(c, &rz);
        Ok(first.sub(&second))
    };

    let cyc = [(w, x, y), (x, y, w), (y, w, x)];
    let mut sum_j = Vector7::ZERO;
    let mut sum_p = Vector7::ZERO;
    for (a, b, c) in cyc {
        sum_j = sum_j.add(&term_j(a, b, c)?);
        sum_p = sum_p.add(&term_perp(a, b, c)?);
    }
    Ok(TsinghuaResidual {
        cyclic_j_form: sum_j.norm(),
        cyclic_perp_form: sum_p.norm(),
        consistency: sum_j.add(&sum_p).norm(),
    })
}

/// Max defect of total symmetry of the cubic form `⟨h(X,Y), JZ⟩` on
/// frame triples.
pub fn cubic_form_symmetry_residual(pkg: &CurvaturePackage) -> f64 {
    let d = pkg.dim;
    let mut worst: f64 = 0.0;
    let c = |a: usize, b: usize, e: usize| pkg.h_frame[a][b].dot(&pkg.j_frame[e]);
    for a in 0..d {
        for b in 0..d {
            for e in 0..d {
                let v = c(a, b, e);
                worst = worst.max((v - c(b, a, e)).abs());
                worst = worst.max((v - c(a, e, b)).abs());
                worst = worst.max((v - c(e, b, a)).abs());
            }
        }
    }
    worst
}

/// Max defect of the Weingarten relation `A_{JY}X = −J h(X,Y)` on frame
/// pairs.
pub fn weingarten_relation_residual(pkg: &CurvaturePackage) -> Result<f64> {
    let ops = pkg
        .shape_operators_frame
        .as_ref()
        .ok_or(Error::NotLagrangian(pkg.totally_real_residual))?;
    let d = pkg.dim;
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            let mut lhs = Vector7::ZERO;
            for c in 0..d {
                lhs = lhs.add(&pkg.frame_vectors[c].scale(ops[b][c][a]));
            }
            let rhs = pkg.apply_j(&pkg.h_frame[a][b]).neg();
            worst = worst.max(lhs.sub(&rhs).norm());
        }
    }
    Ok(worst)
}

/// Max defect of `∇^⊥_X JY = G(X,Y) + J ∇_X Y` on chart pairs.
pub fn normal_connection_g_residual(pkg_imm: (&Immersion, &[f64])) -> Result<f64> {
    let (imm, u) = pkg_imm;
    let pkg = CurvaturePackage::compute(imm, u, 3)?;
    let d = pkg.dim;
    let x = imm.evaluate(u, 3);
    let tangent_jets: Vec<JetMap7> = (0..d).map(|i| x.partial(i)).collect();
    let g_jets: MetricJets = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| tangent_jets[i].dot(&tangent_jets[j]))
                .collect()
        })
        .collect();
    let g_inv_jets = invert_metric(&g_jets)?;
    let x_m1 = x.truncated(2);
    let proj = NormalProjector::new(&x, &tangent_jets, &g_inv_jets, 1);

    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            // ∇^⊥_i (J ∂_j)
            let jy = x_m1.cross(&tangent_jets[j].truncated(2));
            let lhs = proj.apply(&jy.partial(i)).value();

            // G(∂_i, ∂_j) + J Γ^k_ij ∂_k
            let g_val = {
                use crate::nearly_kahler as nk;
                let p = nk::PointS6::new(pkg.position)?;
                let xi = nk::TangentVectorS6::new(p, pkg.tangents[i])?;
                let yj = nk::TangentVectorS6::new(p, pkg.tangents[j])?;
                nk::g_tensor(&p, &xi, &yj)?
            };
            let mut nab = Vector7::ZERO;
            for k in 0..d {
                nab = nab.add(&pkg.tangents[k].scale(pkg.christoffels[k][i][j]));
            }
            let rhs = g_val.add(&pkg.apply_j(&nab));
            worst = worst.max(lhs.sub(&rhs).norm());
        }
    }
    Ok(worst)
}

/// Max symmetry/normality violation recorded in the package: `h`
/// symmetric, normal-valued, and the metric symmetric.
pub fn h_consistency_residual(pkg: &CurvaturePackage) -> f64 {
    let d = pkg.dim;
    let mut worst = pkg.h_normality_residual;
    for i in 0..d {
        for j in 0..d {
            worst = worst.max(pkg.h[i][j].sub(&pkg.h[j][i]).norm());
            worst = worst.max((pkg.metric[i][j] - pkg.metric[j][i]).abs());
        }
    }
    worst
}
