//! Warped product metrics with a one-dimensional base.
//!
//! A [`WarpedProduct`] is `I ×_f N` for an interval `I`, a positive
//! warping function `f`, and a surface fiber `(N, g_N)`: the metric is
//! the block form `dt² + f(t)² g_N`. Curvature comes two ways — from
//! the product curvature formulas on lifted fields, and intrinsically
//! from the assembled metric jets — and the two are compared as an
//! oracle.
//!
//! The formula assembly keeps the base Hessian `H^f` general (computed
//! through base Christoffel symbols) rather than hard-coding `f''`, even
//! though a one-dimensional base always reduces to it.

use crate::intrinsic::{
    christoffels, gaussian_curvature, invert_metric, riemann, MetricJets, RiemannLowered,
};
use crate::jets::Jet;
use crate::{Error, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

type ScalarFn = dyn Fn(f64, usize) -> Jet + Send + Sync;
type FiberMetricFn = dyn Fn(&[f64], usize) -> [[Jet; 2]; 2] + Send + Sync;
type CurvatureFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// `I ×_f N` with a one-dimensional base.
#[derive(Clone)]
pub struct WarpedProduct {
    /// Base interval.
    pub interval: (f64, f64),
    /// Fiber chart box (two coordinates).
    pub fiber_box: ([f64; 2], [f64; 2]),
    pub label: String,
    warping: Arc<ScalarFn>,
    fiber_metric: Arc<FiberMetricFn>,
    /// Analytic fiber curvature override; default derives it from jets.
    fiber_curvature: Option<Arc<CurvatureFn>>,
}

impl std::fmt::Debug for WarpedProduct {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WarpedProduct")
            .field("interval", &self.interval)
            .field("label", &self.label)
            .finish()
    }
}

impl WarpedProduct {
    pub fn new(
        interval: (f64, f64),
        fiber_box: ([f64; 2], [f64; 2]),
        label: impl Into<String>,
        warping: impl Fn(f64, usize) -> Jet + Send + Sync + 'static,
        fiber_metric: impl Fn(&[f64], usize) -> [[Jet; 2]; 2] + Send + Sync + 'static,
    ) -> WarpedProduct {
        WarpedProduct {
            interval,
            fiber_box,
            label: label.into(),
            warping: Arc::new(warping),
            fiber_metric: Arc::new(fiber_metric),
            fiber_curvature: None,
        }
    }

    pub fn with_fiber_curvature(
        mut self,
        k: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> WarpedProduct {
        self.fiber_curvature = Some(Arc::new(k));
        self
    }

    /// Warping function as a one-variable jet at `t`.
    pub fn warping_jet(&self, t: f64, order: usize) -> Jet {
        (self.warping)(t, order)
    }

    /// Fiber metric as two-variable jets at `q`.
    pub fn fiber_metric_jets(&self, q: &[f64], order: usize) -> [[Jet; 2]; 2] {
        (self.fiber_metric)(q, order)
    }

    /// Gaussian curvature of the fiber at `q`: analytic override if one
    /// was supplied, otherwise derived from the metric jets.
    pub fn fiber_gaussian_curvature(&self, q: &[f64]) -> Result<f64> {
        if let Some(k) = &self.fiber_curvature {
            return Ok(k(q));
        }
        let gm = self.fiber_metric_jets(q, 3);
        let g: MetricJets = vec![
            vec![gm[0][0].clone(), gm[0][1].clone()],
            vec![gm[1][0].clone(), gm[1][1].clone()],
        ];
        gaussian_curvature(&g)
    }

    /// The assembled three-variable metric jets `diag(1, f² g_N)` at
    /// `(t, u, v)`; variable 0 is the base coordinate.
    pub fn metric_jets(&self, point: &[f64], order: usize) -> Result<MetricJets> {
        let f = self.warping_jet(point[0], order).embedded(3, 0);
        if f.value() <= 0.0 {
            return Err(Error::DegenerateMetric(format!(
                "warping function must stay positive, got {}",
                f.value()
            )));
        }
        let f2 = f.mul(&f);
        let gn = self.fiber_metric_jets(&point[1..], order);
        let zero = Jet::constant(3, order, 0.0);
        let mut g: MetricJets = vec![vec![zero.clone(); 3]; 3];
        g[0][0] = Jet::constant(3, order, 1.0);
        for i in 0..2 {
            for j in 0..2 {
                g[i + 1][j + 1] = gn[i][j].embedded(3, 1).mul(&f2);
            }
        }
        Ok(g)
    }

    /// Evaluated metric values at a point.
    pub fn metric(&self, point: &[f64]) -> Result<[[f64; 3]; 3]> {
        let g = self.metric_jets(point, 1)?;
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = g[i][j].value();
            }
        }
        Ok(out)
    }

    /// `K_N(q) − f'(t)² + f(t) f''(t)`; its vanishing marks the
    /// constant-sectional-curvature branch of the dichotomy.
    pub fn dichotomy_scalar(&self, point: &[f64]) -> Result<f64> {
        let f = self.warping_jet(point[0], 2);
        let fv = f.value();
        let f1 = f.extract_partial(&[1])?;
        let f2 = f.extract_partial(&[2])?;
        let kn = self.fiber_gaussian_curvature(&point[1..])?;
        Ok(kn - f1 * f1 + fv * f2)
    }

    /// Curvature of the warped metric assembled from the product
    /// formulas, in coordinate components `R_{ijkl}` (index 0 = base).
    ///
    /// Uses, on lifted fields: base curvature (zero here), the mixed
    /// blocks `R(X,V)Y = (H^f(X,Y)/f) V` and
    /// `R(X,V)W = −(⟨V,W⟩/f) ∇_X ∇f`, the vanishing blocks
    /// `R(X,Y)V = R(V,W)X = 0`, and the fiber block
    /// `ᶠR + (|∇f|²/f²){⟨V,U⟩W − ⟨W,U⟩V}`.
    pub fn curvature_formulas(&self, point: &[f64]) -> Result<RiemannLowered> {
        let t = point[0];
        let q = &point[1..];
        let f = self.warping_jet(t, 2);
        let fv = f.value();
        if fv <= 0.0 {
            return Err(Error::DegenerateMetric("warping must be positive".into()));
        }

        // base Hessian through base Christoffels (flat dt² => Γ_B = 0,
        // but derived rather than assumed)
        let base_metric: MetricJets = vec![vec![Jet::constant(1, 2, 1.0)]];
        let base_inv = invert_metric(&base_metric)?;
        let base_gamma = christoffels(&base_metric, &base_inv);
        let df = f.extract_partial(&[1])?;
        let hess_f = f.extract_partial(&[2])? - base_gamma[0][0][0].value() * df;
        let grad_f_sq = df * df * base_inv[0][0].value();

        // warped inner products on the fiber block
        let gn = self.fiber_metric_jets(q, 2);
        let mut gw = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                gw[i][j] = fv * fv * gn[i][j].value();
            }
        }

        // fiber curvature lifted: ᶠR(V,W)U = K_N (g_N(W,U)V − g_N(V,U)W),
        // lowered with the warped metric
        let kn = self.fiber_gaussian_curvature(q)?;

        let mut low = [[[[0.0; 3]; 3]; 3]; 3];

        // mixed block (2): R(∂_t, V)∂_t = (H^f/f) V lowered:
        // R_{0,i,0,j} = (f''/f) ⟨V_i, V_j⟩_warped
        let c2 = hess_f / fv;
        for i in 0..2 {
            for j in 0..2 {
                let val = c2 * gw[i][j];
                low[0][i + 1][0][j + 1] = val;
                low[i + 1][0][0][j + 1] = -val;
                low[0][i + 1][j + 1][0] = -val;
                low[i + 1][0][j + 1][0] = val;
            }
        }

        // fiber block (5): R(V,W)U = ᶠR(V,W)U + (|∇f|²/f²){⟨V,U⟩W − ⟨W,U⟩V}
        // lowered against a fiber direction Z:
        // ᶠR part: K_N/f² {⟨W,U⟩⟨V,Z⟩ − ⟨V,U⟩⟨W,Z⟩} with warped ⟨,⟩
        let cf = kn / (fv * fv);
        let cg = grad_f_sq / (fv * fv);
        for v in 0..2 {
            for w in 0..2 {
                for u in 0..2 {
                    for z in 0..2 {
                        let fiber = cf * (gw[w][u] * gw[v][z] - gw[v][u] * gw[w][z]);
                        let stretch = cg * (gw[v][u] * gw[w][z] - gw[w][u] * gw[v][z]);
                        low[v + 1][w + 1][u + 1][z + 1] = fiber + stretch;
                    }
                }
            }
        }

        // blocks (1), (3) and item (4) against base directions are zero
        // for a flat one-dimensional base except the components already
        // fixed by symmetry above; item (4) lowered against ∂_t:
        // ⟨R(X,V)W, ∂_t⟩ = −⟨V,W⟩ H^f/f, which is the pair-exchange image
        // of block (2) and was set there.
        Ok(low)
    }

    /// Intrinsic curvature of the assembled metric jets at a point.
    pub fn curvature_intrinsic(&self, point: &[f64]) -> Result<RiemannLowered> {
        let g = self.metric_jets(point, 3)?;
        let g_inv = invert_metric(&g)?;
        let gamma = christoffels(&g, &g_inv);
        let mut g_val = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                g_val[i][j] = g[i][j].value();
            }
        }
        let (_, low) = riemann(&gamma, &g_val);
        Ok(low)
    }

    /// Sectional curvature of the plane spanned by coordinate vectors
    /// `v`, `w` under the warped metric.
    pub fn sectional_curvature(&self, point: &[f64], v: &[f64; 3], w: &[f64; 3]) -> Result<f64> {
        let low = self.curvature_intrinsic(point)?;
        let g = self.metric(point)?;
        crate::intrinsic::sectional_curvature_raw(&low, &g, 3, v, w)
    }
}

/// Worst componentwise disagreement between the formula assembly and the
/// intrinsic route, with the offending point.
#[derive(Debug, Clone)]
pub struct OracleComparison {
    pub max_residual: f64,
    pub worst_point: [f64; 3],
    /// Max residual of the vanishing components `R(X,Y)V`, `R(V,W)X`.
    pub max_zero_block: f64,
    pub points_checked: usize,
}

/// Compares [`WarpedProduct::curvature_formulas`] against
/// [`WarpedProduct::curvature_intrinsic`] over a sample grid.
pub fn curvature_oracle_compare(wp: &WarpedProduct, res: &[usize; 3]) -> Result<OracleComparison> {
    let mut cmp = OracleComparison {
        max_residual: 0.0,
        worst_point: [0.0; 3],
        max_zero_block: 0.0,
        points_checked: 0,
    };
    let (t0, t1) = wp.interval;
    let (qlo, qhi) = wp.fiber_box;
    let margin = 0.1;
    let coords = |lo: f64, hi: f64, n: usize, k: usize| {
        let a = lo + margin * (hi - lo);
        let b = hi - margin * (hi - lo);
        a + (b - a) * k as f64 / (n - 1) as f64
    };
    for it in 0..res[0] {
        for iu in 0..res[1] {
            for iv in 0..res[2] {
                let p = [
                    coords(t0, t1, res[0], it),
                    coords(qlo[0], qhi[0], res[1], iu),
                    coords(qlo[1], qhi[1], res[2], iv),
                ];
                let formulas = wp.curvature_formulas(&p)?;
                let intrinsic = wp.curvature_intrinsic(&p)?;
                for i in 0..3 {
                    for j in 0..3 {
                        for k in 0..3 {
                            for l in 0..3 {
                                let r = (formulas[i][j][k][l] - intrinsic[i][j][k][l]).abs();
                                if r > cmp.max_residual {
                                    cmp.max_residual = r;
                                    cmp.worst_point = p;
                                }
                            }
                        }
                    }
                }
                // item (3): R(X,Y)V = 0 (base is 1-d, X=Y=∂_t) and
                // R(V,W)X = 0: intrinsic curvature with three fiber
                // indices and one base index, first pair fiber
                for v in 0..2 {
                    for w in 0..2 {
                        for u in 0..2 {
                            cmp.max_zero_block = cmp
                                .max_zero_block
                                .max(intrinsic[v + 1][w + 1][u + 1][0].abs())
                                .max(intrinsic[v + 1][w + 1][0][u + 1].abs());
                        }
                    }
                }
                cmp.points_checked += 1;
            }
        }
    }
    Ok(cmp)
}

/// The cosine warping of the polar chart `(−π/2, π/2) ×_cos N`.
pub fn cosine_warping(t: f64, order: usize) -> Jet {
    Jet::variable(1, order, 0, t).cos()
}

/// Unit round fiber metric in gnomonic coordinates.
pub fn round_fiber_metric(q: &[f64], order: usize) -> [[Jet; 2]; 2] {
    let u = Jet::variable(2, order, 0, q[0]);
    let v = Jet::variable(2, order, 1, q[1]);
    let mut s = Jet::constant(2, order, 1.0);
    s = s.add(&u.mul(&u)).add(&v.mul(&v));
    let inv2 = s.mul(&s).recip().expect("1+|q|^2 > 0");
    let gij = |a: &Jet, b: &Jet, diag: bool| {
        let mut t = a.mul(b).neg();
        if diag {
            t = t.add(&s);
        }
        t.mul(&inv2)
    };
    [
        [gij(&u, &u, true), gij(&u, &v, false)],
        [gij(&v, &u, false), gij(&v, &v, true)],
    ]
}

/// Seeded family of random warped products: positive cubic-polynomial
/// warpings (rejection-sampled) over trigonometric fiber metrics kept
/// uniformly positive definite.
pub fn random_warped_products(count: usize, seed: u64) -> Vec<WarpedProduct> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let interval = (-0.9, 0.9);
    while out.len() < count {
        let c: [f64; 4] = std::array::from_fn(|_| rng.random_range(-0.5..0.5));
        let c0 = rng.random_range(0.8..1.6);
        // reject warpings that dip too low on the interval
        let f_min = (0..64)
            .map(|k| {
                let t = interval.0 + (interval.1 - interval.0) * k as f64 / 63.0;
                c0 + c[1] * t + c[2] * t * t + c[3] * t * t * t
            })
            .fold(f64::INFINITY, f64::min);
        if f_min < 0.3 {
            continue;
        }
        let amp_e = rng.random_range(-0.25..0.25);
        let amp_g = rng.random_range(-0.25..0.25);
        let amp_f = rng.random_range(-0.15..0.15);
        let (pu, pv) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let idx = out.len();
        out.push(WarpedProduct::new(
            interval,
            ([-0.8, -0.8], [0.8, 0.8]),
            format!("random-warped-{idx}"),
            move |t, order| {
                let tj = Jet::variable(1, order, 0, t);
                let t2 = tj.mul(&tj);
                let t3 = t2.mul(&tj);
                Jet::constant(1, order, c0)
                    .add(&tj.scale(c[1]))
                    .add(&t2.scale(c[2]))
                    .add(&t3.scale(c[3]))
            },
            move |q, order| {
                let u = Jet::variable(2, order, 0, q[0]);
                let v = Jet::variable(2, order, 1, q[1]);
                let su = u.add(&Jet::constant(2, order, pu)).sin();
                let cv = v.add(&Jet::constant(2, order, pv)).cos();
                let mix = su.mul(&cv);
                let e = Jet::constant(2, order, 1.0).add(&mix.scale(amp_e));
                let g = Jet::constant(2, order, 1.2).add(&mix.scale(amp_g));
                let f = mix.scale(amp_f);
                [[e, f.clone()], [f, g]]
            },
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trivial_product() -> WarpedProduct {
        WarpedProduct::new(
            (-1.0, 1.0),
            ([-0.8, -0.8], [0.8, 0.8]),
            "trivial",
            |t, order| Jet::constant(1, order, 1.0).add(&Jet::variable(1, order, 0, t).scale(0.0)),
            round_fiber_metric,
        )
    }

    fn polar_sphere() -> WarpedProduct {
        WarpedProduct::new(
            (-std::f64::consts::FRAC_PI_2 + 0.1, std::f64::consts::FRAC_PI_2 - 0.1),
            ([-0.8, -0.8], [0.8, 0.8]),
            "polar-s3",
            cosine_warping,
            round_fiber_metric,
        )
    }

    #[test]
    fn trivial_warping_gives_product_metric() {
        let wp = trivial_product();
        let g = wp.metric(&[0.3, 0.2, -0.1]).unwrap();
        let gn = wp.fiber_metric_jets(&[0.2, -0.1], 1);
        assert_eq!(g[0][0], 1.0);
        assert_eq!(g[0][1], 0.0);
        assert_eq!(g[0][2], 0.0);
        for i in 0..2 {
            for j in 0..2 {
                assert!((g[i + 1][j + 1] - gn[i][j].value()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn trivial_product_mixed_curvature_vanishes() {
        let wp = trivial_product();
        let cmp = curvature_oracle_compare(&wp, &[3, 3, 3]).unwrap();
        assert!(cmp.max_residual <= 1e-12, "{cmp:?}");
        assert!(cmp.max_zero_block <= 1e-12);
        let low = wp.curvature_intrinsic(&[0.0, 0.1, 0.2]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                // R(∂_t, V, ∂_t, W) = 0 for constant warping
                assert!(low[0][i + 1][0][j + 1].abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn cosine_round_fiber_is_unit_three_sphere() {
        let wp = polar_sphere();
        for p in [[0.0, 0.0, 0.0], [0.8, 0.3, -0.2], [-1.2, 0.5, 0.5]] {
            let low = wp.curvature_intrinsic(&p).unwrap();
            let g = wp.metric(&p).unwrap();
            // constant curvature 1: R_{ijkl} = g_ik g_jl ... check via
            // sectional curvatures of coordinate planes
            for (v, w) in [
                ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
                ([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]),
                ([0.0, 1.0, 0.0], [0.0, 0.0, 1.0]),
                ([1.0, 0.4, -0.3], [0.2, 0.9, 1.1]),
            ] {
                let k =
                    crate::intrinsic::sectional_curvature_raw(&low, &g, 3, &v, &w).unwrap();
                assert!((k - 1.0).abs() < 1e-10, "K = {k} at {p:?}");
            }
        }
    }

    #[test]
    fn exponential_warping_flat_fiber_matches_formulas() {
        // f = e^t over a flat fiber: R(∂t,V)∂t = (f''/f) V = V
        let wp = WarpedProduct::new(
            (-0.5, 0.5),
            ([-0.8, -0.8], [0.8, 0.8]),
            "exp-flat",
            |t, order| Jet::variable(1, order, 0, t).exp(),
            |q, order| {
                let zero = Jet::constant(2, order, 0.0)
                    .add(&Jet::variable(2, order, 0, q[0]).scale(0.0))
                    .add(&Jet::variable(2, order, 1, q[1]).scale(0.0));
                [
                    [Jet::constant(2, order, 1.0), zero.clone()],
                    [zero, Jet::constant(2, order, 1.0)],
                ]
            },
        );
        let p = [0.2, 0.1, -0.3];
        let low = wp.curvature_formulas(&p).unwrap();
        let g = wp.metric(&p).unwrap();
        // lowered R(∂t, V, ∂t, W) = (f''/f)⟨V,W⟩ = f² δ for the flat fiber
        let f2 = (0.2f64).exp().powi(2);
        assert!((low[0][1][0][1] - f2).abs() < 1e-12);
        assert!((low[0][2][0][2] - f2).abs() < 1e-12);
        assert!(low[0][1][0][2].abs() < 1e-14);
        let cmp = curvature_oracle_compare(&wp, &[4, 3, 3]).unwrap();
        assert!(cmp.max_residual <= 1e-10, "{cmp:?}");
        // hyperbolic space: every sectional curvature is −1
        let k = wp
            .sectional_curvature(&p, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0])
            .unwrap();
        assert!((k + 1.0).abs() < 1e-11);
        let _ = g;
    }

    #[test]
    fn dichotomy_scalar_cases() {
        // f = cos t, K_N = 1: scalar = 1 - sin² - cos² = 0
        let wp = polar_sphere();
        for p in [[0.0, 0.0, 0.0], [0.9, 0.4, 0.1], [-1.1, -0.5, 0.7]] {
            assert!(wp.dichotomy_scalar(&p).unwrap().abs() <= 1e-12);
        }

        // f = cos t, K_N = 2: scalar = 1
        let wp2 = WarpedProduct::new(
            (-1.2, 1.2),
            ([-0.8, -0.8], [0.8, 0.8]),
            "cos-kn2",
            cosine_warping,
            |q, order| {
                let gm = round_fiber_metric(q, order);
                // scaling the metric by 1/2 doubles the curvature
                [
                    [gm[0][0].scale(0.5), gm[0][1].scale(0.5)],
                    [gm[1][0].scale(0.5), gm[1][1].scale(0.5)],
                ]
            },
        );
        for p in [[0.0, 0.1, 0.2], [0.7, -0.3, 0.4]] {
            let s = wp2.dichotomy_scalar(&p).unwrap();
            assert!((s - 1.0).abs() <= 1e-10, "scalar {s}");
        }

        // trivial product over a flat fiber
        let wp3 = WarpedProduct::new(
            (-1.0, 1.0),
            ([-0.8, -0.8], [0.8, 0.8]),
            "flat-trivial",
            |t, order| Jet::constant(1, order, 1.0).add(&Jet::variable(1, order, 0, t).scale(0.0)),
            |q, order| {
                let zero = Jet::constant(2, order, 0.0)
                    .add(&Jet::variable(2, order, 0, q[0]).scale(0.0))
                    .add(&Jet::variable(2, order, 1, q[1]).scale(0.0));
                [
                    [Jet::constant(2, order, 1.0), zero.clone()],
                    [zero, Jet::constant(2, order, 1.0)],
                ]
            },
        );
        assert_eq!(wp3.dichotomy_scalar(&[0.2, 0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn constant_curvature_when_dichotomy_vanishes() {
        // cos-warped round fiber: scalar ≡ 0 and K ≡ −f''/f = 1
        let wp = polar_sphere();
        let p = [0.6, 0.2, -0.4];
        assert!(wp.dichotomy_scalar(&p).unwrap().abs() <= 1e-12);
        let f = wp.warping_jet(p[0], 2);
        let expect = -f.extract_partial(&[2]).unwrap() / f.value();
        for (v, w) in [
            ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
            ([0.0, 1.0, 0.0], [0.0, 0.0, 1.0]),
            ([1.0, -0.2, 0.3], [0.4, 1.0, 0.0]),
        ] {
            let k = wp.sectional_curvature(&p, &v, &w).unwrap();
            assert!((k - expect).abs() <= 1e-7, "K = {k}, expect {expect}");
        }
    }

    #[test]
    fn random_family_oracle_agreement() {
        for wp in random_warped_products(20, 20240601) {
            let cmp = curvature_oracle_compare(&wp, &[3, 3, 3]).unwrap();
            assert!(
                cmp.max_residual <= 1e-7,
                "{}: {:?}",
                wp.label,
                cmp
            );
            assert!(cmp.max_zero_block <= 1e-9, "{}: {:?}", wp.label, cmp);
        }
    }

    #[test]
    fn near_degenerate_cosine_still_conditioned() {
        let wp = WarpedProduct::new(
            (-std::f64::consts::FRAC_PI_2 + 0.1, std::f64::consts::FRAC_PI_2 - 0.1),
            ([-0.8, -0.8], [0.8, 0.8]),
            "cos-near-edge",
            cosine_warping,
            round_fiber_metric,
        );
        let t = std::f64::consts::FRAC_PI_2 - 0.1;
        let p = [t - 1e-9, 0.3, 0.3];
        let formulas = wp.curvature_formulas(&p).unwrap();
        let intrinsic = wp.curvature_intrinsic(&p).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        worst = worst.max((formulas[i][j][k][l] - intrinsic[i][j][k][l]).abs());
                    }
                }
            }
        }
        assert!(worst <= 1e-6, "residual {worst}");
    }

    #[test]
    fn negative_warping_rejected() {
        let wp = WarpedProduct::new(
            (-2.0, 2.0),
            ([-0.8, -0.8], [0.8, 0.8]),
            "bad",
            |t, order| Jet::variable(1, order, 0, t),
            round_fiber_metric,
        );
        assert!(wp.metric_jets(&[-1.0, 0.0, 0.0], 2).is_err());
    }
}
