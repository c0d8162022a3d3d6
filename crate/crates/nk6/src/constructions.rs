//! Concrete immersions: the rotation construction, coordinate-subspace
//! searches, linear-fullness analysis, and the example catalog.
//!
//! The rotation construction takes a surface contained in the great
//! hypersphere orthogonal to a unit vector `n` and sweeps
//! `x(t,p) = sin(t) n + cos(t) f(p)`. Its induced metric is always the
//! warped product `dt² + cos²(t) g`; the totally real and ideal
//! (`δ_M = 2`) properties require more of the input surface and are
//! measured, never assumed.

use crate::cayley::{cross, Vector7};
use crate::jets::{Jet, JetMap7};
use crate::submanifold::{ChartBox, CurvaturePackage, Immersion};
use crate::{Error, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Margin by which the rotation chart stays away from `t = ±π/2`, where
/// `cos t` degenerates the metric.
pub const ROTATION_T_MARGIN: f64 = 0.1;

/// A surface immersion contained in the totally geodesic `S^5`
/// orthogonal to `ambient_normal`.
#[derive(Debug, Clone)]
pub struct SurfaceInS5 {
    pub immersion: Immersion,
    pub ambient_normal: Vector7,
}

impl SurfaceInS5 {
    /// Validates `|n| = 1` and `⟨x(u), n⟩ = 0` on a sample grid.
    pub fn new(immersion: Immersion, ambient_normal: Vector7) -> Result<SurfaceInS5> {
        assert_eq!(immersion.dim, 2, "rotation inputs are surfaces");
        let n_norm = ambient_normal.norm();
        if (n_norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotInS5((n_norm - 1.0).abs()));
        }
        let mut worst: f64 = 0.0;
        for u in immersion.domain.grid(&[5, 5], 0.05) {
            let x = immersion.evaluate(&u, 1).value();
            worst = worst.max(x.dot(&ambient_normal).abs());
        }
        if worst > 1e-10 {
            return Err(Error::NotInS5(worst));
        }
        Ok(SurfaceInS5 {
            immersion,
            ambient_normal,
        })
    }
}

/// The rotation immersion `(t, p) ↦ sin(t) n + cos(t) f(p)` over the
/// shrunk interval `(−π/2 + margin, π/2 − margin)`.
pub fn rotation_immersion(surface: &SurfaceInS5) -> Immersion {
    let f = surface.immersion.clone();
    let n = surface.ambient_normal;
    let half = std::f64::consts::FRAC_PI_2 - ROTATION_T_MARGIN;
    let lo = [-half, f.domain.lo[0], f.domain.lo[1]];
    let hi = [half, f.domain.hi[0], f.domain.hi[1]];
    Immersion::new(
        3,
        ChartBox::new(3, lo, hi),
        format!("rot-{}", f.label),
        move |u, order| {
            let t = Jet::variable(3, order, 0, u[0]);
            let fp = f.evaluate(&u[1..], order).embedded(3, 1);
            JetMap7::constant(&n, 3, order)
                .scale_jet(&t.sin())
                .add(&fp.scale_jet(&t.cos()))
        },
    )
}

/// Residual of the warped-product form of the rotation metric at one
/// chart point: `⟨x_t,x_t⟩ = 1`, `⟨x_t,x_u⟩ = ⟨x_t,x_v⟩ = 0`,
/// `⟨x_u,x_v⟩ = cos²(t) g(f_u, f_v)`.
pub fn rotation_metric_residual(surface: &SurfaceInS5, rot: &Immersion, u: &[f64]) -> f64 {
    let x = rot.evaluate(u, 1);
    let xt = x.partial(0).value();
    let xu = x.partial(1).value();
    let xv = x.partial(2).value();
    let fj = surface.immersion.evaluate(&u[1..], 1);
    let fu = fj.partial(0).value();
    let fv = fj.partial(1).value();
    let c2 = u[0].cos().powi(2);
    let mut worst = (xt.dot(&xt) - 1.0).abs();
    worst = worst.max(xt.dot(&xu).abs());
    worst = worst.max(xt.dot(&xv).abs());
    worst = worst.max((xu.dot(&xu) - c2 * fu.dot(&fu)).abs());
    worst = worst.max((xu.dot(&xv) - c2 * fu.dot(&fv)).abs());
    worst = worst.max((xv.dot(&xv) - c2 * fv.dot(&fv)).abs());
    worst
}

/// How a coordinate subspace interacts with the almost complex structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceTag {
    /// 4-subspace whose great 3-sphere has `J(T) ⊥ V`: Lagrangian.
    Lagrangian,
    /// 3-subspace whose great 2-sphere has `J`-invariant tangent planes.
    AlmostComplex,
    Mixed,
}

/// Classification of one coordinate subspace by sampled residuals.
#[derive(Debug, Clone)]
pub struct SubspaceCertificate {
    /// 1-based basis indices spanning the subspace.
    pub indices: Vec<usize>,
    /// For 4-subspaces: max in-subspace component of `J` of a tangent
    /// vector. For 3-subspaces: max out-of-subspace component.
    pub lagrangian_residual: f64,
    pub tag: SubspaceTag,
}

/// Results of the exhaustive coordinate-subspace search.
#[derive(Debug, Clone)]
pub struct SubspaceSearch {
    /// All 35 coordinate 4-subspaces, tested for the Lagrangian property
    /// of their great 3-spheres.
    pub four_dim: Vec<SubspaceCertificate>,
    /// All 35 coordinate 3-subspaces, tested for almost complex great
    /// 2-spheres.
    pub three_dim: Vec<SubspaceCertificate>,
}

impl SubspaceSearch {
    pub fn lagrangian_subspaces(&self) -> Vec<&SubspaceCertificate> {
        self.four_dim
            .iter()
            .filter(|c| c.tag == SubspaceTag::Lagrangian)
            .collect()
    }

    pub fn almost_complex_subspaces(&self) -> Vec<&SubspaceCertificate> {
        self.three_dim
            .iter()
            .filter(|c| c.tag == SubspaceTag::AlmostComplex)
            .collect()
    }
}

fn subsets(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=7 {
            cur.push(i);
            rec(i + 1, k, cur, out);
            cur.pop();
        }
    }
    rec(1, k, &mut cur, &mut out);
    out
}

/// Exhaustive classification of all `C(7,4) = 35` coordinate 4-subspaces
/// (Lagrangian great 3-spheres) and `C(7,3) = 35` coordinate 3-subspaces
/// (almost complex great 2-spheres), with default sampling density.
pub fn search_lagrangian_subspaces() -> SubspaceSearch {
    search_lagrangian_subspaces_with(64, 0x5eed)
}

/// Same search with caller-controlled sample count and seed, used to
/// confirm stability under denser re-sampling.
pub fn search_lagrangian_subspaces_with(samples: usize, seed: u64) -> SubspaceSearch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let random_in = |rng: &mut ChaCha8Rng, axes: &[usize]| {
        let mut v = Vector7::ZERO;
        for &a in axes {
            v[a - 1] = rng.random_range(-1.0..1.0);
        }
        v
    };

    let mut four_dim = Vec::with_capacity(35);
    for indices in subsets(4) {
        let mut residual: f64 = 0.0;
        for _ in 0..samples {
            let p = loop {
                if let Some(p) = random_in(&mut rng, &indices).normalized(1e-3) {
                    break p;
                }
            };
            let u = match random_in(&mut rng, &indices)
                .reject_from(&p)
                .normalized(1e-6)
            {
                Some(u) => u,
                None => continue,
            };
            let ju = cross(&p, &u);
            // in-subspace component of J(tangent)
            let mut inside = 0.0f64;
            for &a in &indices {
                inside += ju[a - 1] * ju[a - 1];
            }
            residual = residual.max(inside.sqrt());
        }
        let tag = if residual <= 1e-12 {
            SubspaceTag::Lagrangian
        } else {
            SubspaceTag::Mixed
        };
        four_dim.push(SubspaceCertificate {
            indices,
            lagrangian_residual: residual,
            tag,
        });
    }

    let mut three_dim = Vec::with_capacity(35);
    for indices in subsets(3) {
        let mut residual: f64 = 0.0;
        for _ in 0..samples {
            let p = loop {
                if let Some(p) = random_in(&mut rng, &indices).normalized(1e-3) {
                    break p;
                }
            };
            let u = match random_in(&mut rng, &indices)
                .reject_from(&p)
                .normalized(1e-6)
            {
                Some(u) => u,
                None => continue,
            };
            let ju = cross(&p, &u);
            // out-of-subspace component of J(tangent)
            let mut outside = 0.0f64;
            for a in 1..=7 {
                if !indices.contains(&a) {
                    outside += ju[a - 1] * ju[a - 1];
                }
            }
            residual = residual.max(outside.sqrt());
        }
        let tag = if residual <= 1e-12 {
            SubspaceTag::AlmostComplex
        } else {
            SubspaceTag::Mixed
        };
        three_dim.push(SubspaceCertificate {
            indices,
            lagrangian_residual: residual,
            tag,
        });
    }

    SubspaceSearch {
        four_dim,
        three_dim,
    }
}

/// Rank analysis of sampled position vectors.
#[derive(Debug, Clone)]
pub struct LinearFullness {
    /// Number of singular values above the rank cutoff.
    pub dimension: usize,
    /// Orthonormal basis of the numerical kernel (normal candidates).
    pub kernel: Vec<Vector7>,
}

impl LinearFullness {
    /// The unit normal when the span has dimension exactly six.
    pub fn unique_normal(&self) -> Option<&Vector7> {
        if self.dimension == 6 && self.kernel.len() == 1 {
            Some(&self.kernel[0])
        } else {
            None
        }
    }
}

/// Singular-value analysis of sampled positions of an immersion.
///
/// Needs at least 8 samples; fails with `RankAmbiguous` when the gap
/// between the last kept and first dropped singular value is under 10×.
pub fn linear_fullness(imm: &Immersion, samples: usize) -> Result<LinearFullness> {
    if samples < 8 {
        return Err(Error::InvalidConfig(
            "linear fullness needs at least 8 samples".into(),
        ));
    }
    let per_axis = (samples as f64).powf(1.0 / imm.dim as f64).ceil() as usize;
    let res: Vec<usize> = vec![per_axis.max(3); imm.dim];
    let points = imm.domain.grid(&res, 0.05);
    let m = nalgebra::DMatrix::from_fn(points.len(), 7, |r, c| {
        imm.evaluate(&points[r], 1).value()[c]
    });
    let svd = m.svd(false, true);
    let sv = &svd.singular_values;
    let cutoff = 1e-8;
    let dimension = sv.iter().filter(|&&s| s > cutoff).count();
    if dimension < 7 {
        let kept = sv[dimension - 1];
        let dropped = sv[dimension];
        if kept / dropped.max(1e-300) < 10.0 {
            return Err(Error::RankAmbiguous(format!(
                "boundary singular values {kept:.3e} / {dropped:.3e}"
            )));
        }
    }
    let vt = svd.v_t.unwrap();
    let kernel = (dimension..7)
        .map(|r| {
            let mut v = Vector7::ZERO;
            for c in 0..7 {
                v[c] = vt[(r, c)];
            }
            v
        })
        .collect();
    Ok(LinearFullness { dimension, kernel })
}

/// Gnomonic chart of the great sphere in the coordinate subspace spanned
/// by `axes` (1-based), centered at the first axis direction.
pub fn coordinate_sphere_chart(axes: &[usize], label: &str) -> Immersion {
    let dim = axes.len() - 1;
    assert!((2..=3).contains(&dim));
    let axes = axes.to_vec();
    Immersion::new(
        dim,
        ChartBox::new(dim, [-0.8; 3], [0.8; 3]),
        label,
        move |u, order| {
            let dim = axes.len() - 1;
            let mut s = Jet::constant(dim, order, 1.0);
            let vars: Vec<Jet> = (0..dim)
                .map(|i| Jet::variable(dim, order, i, u[i]))
                .collect();
            for v in &vars {
                s = s.add(&v.mul(v));
            }
            let inv = s.sqrt().expect("1+|u|^2 > 0").recip().expect("nonzero");
            JetMap7::from_fn(|c| {
                if c + 1 == axes[0] {
                    inv.clone()
                } else if let Some(k) = axes[1..].iter().position(|&a| a == c + 1) {
                    vars[k].mul(&inv)
                } else {
                    Jet::constant(dim, order, 0.0)
                }
            })
        },
    )
}

/// The flat equilateral torus
/// `(u,v) ↦ (cos α₁, sin α₁, cos α₂, sin α₂, cos α₃, sin α₃, 0)/√3`
/// with `α₁ = u`, `α₂ = v`, `α₃ = −u−v`, in coordinates `e1..e6`.
pub fn flat_torus_surface() -> Immersion {
    Immersion::new(
        2,
        ChartBox::new(2, [-2.0; 3], [2.0; 3]),
        "flat-torus",
        |u, order| {
            let s = 1.0 / 3.0f64.sqrt();
            let a1 = Jet::variable(2, order, 0, u[0]);
            let a2 = Jet::variable(2, order, 1, u[1]);
            let a3 = a1.add(&a2).neg();
            JetMap7::from_fn(|c| match c {
                0 => a1.cos().scale(s),
                1 => a1.sin().scale(s),
                2 => a2.cos().scale(s),
                3 => a2.sin().scale(s),
                4 => a3.cos().scale(s),
                5 => a3.sin().scale(s),
                _ => Jet::constant(2, order, 0.0),
            })
        },
    )
}

/// A deliberately non-minimal surface: the distance sphere of radius
/// 0.9 inside the great 3-sphere of `e1..e4`, centered at `e1`.
pub fn perturbed_surface() -> Immersion {
    let r = 0.9f64;
    Immersion::new(
        2,
        ChartBox::new(2, [-0.8; 3], [0.8; 3]),
        "perturbed",
        move |u, order| {
            let mut s = Jet::constant(2, order, 1.0);
            let vars: Vec<Jet> = (0..2)
                .map(|i| Jet::variable(2, order, i, u[i]))
                .collect();
            for v in &vars {
                s = s.add(&v.mul(v));
            }
            let inv = s.sqrt().expect("positive").recip().expect("nonzero");
            let c = (1.0 - r * r).sqrt();
            JetMap7::from_fn(|comp| match comp {
                0 => Jet::constant(2, order, c),
                1 => inv.scale(r),
                2 => vars[0].mul(&inv).scale(r),
                3 => vars[1].mul(&inv).scale(r),
                _ => Jet::constant(2, order, 0.0),
            })
        },
    )
}

/// One catalog example, addressable by a stable id.
#[derive(Debug, Clone)]
pub struct CatalogItem {
    pub id: String,
    pub immersion: Immersion,
    /// Present for surfaces contained in a great hypersphere; the unit
    /// normal of that hypersphere.
    pub ambient_normal: Option<Vector7>,
}

impl CatalogItem {
    pub fn as_surface(&self) -> Option<SurfaceInS5> {
        let n = self.ambient_normal?;
        SurfaceInS5::new(self.immersion.clone(), n).ok()
    }
}

/// The example catalog, keyed by stable string ids:
///
/// - `tg-s3`: totally geodesic Lagrangian great 3-sphere found by the
///   coordinate-subspace search;
/// - `great-s2`: totally geodesic great 2-sphere inside it, exposed as a
///   surface in the hypersphere orthogonal to the remaining axis;
/// - `flat-torus`: the minimal flat torus in `e1..e6`;
/// - `perturbed`: a non-minimal distance sphere for negative tests;
/// - `rot-*`: rotation immersions built from each surface entry.
pub fn catalog() -> Vec<CatalogItem> {
    let search = search_lagrangian_subspaces();
    let lagrangian = search.lagrangian_subspaces();
    let axes = lagrangian
        .first()
        .expect("table admits Lagrangian coordinate subspaces")
        .indices
        .clone();

    let tg_s3 = CatalogItem {
        id: "tg-s3".into(),
        immersion: coordinate_sphere_chart(&axes, "tg-s3"),
        ambient_normal: None,
    };

    // great 2-sphere in the first three axes, normal along the fourth
    let great_axes = [axes[0], axes[1], axes[2]];
    let great_s2 = CatalogItem {
        id: "great-s2".into(),
        immersion: coordinate_sphere_chart(&great_axes, "great-s2"),
        ambient_normal: Some(Vector7::basis(axes[3])),
    };

    let torus = CatalogItem {
        id: "flat-torus".into(),
        immersion: flat_torus_surface(),
        ambient_normal: Some(Vector7::basis(7)),
    };

    let perturbed = CatalogItem {
        id: "perturbed".into(),
        immersion: perturbed_surface(),
        ambient_normal: Some(Vector7::basis(5)),
    };

    let mut items = vec![tg_s3, great_s2, torus, perturbed];
    for idx in 1..4 {
        let item: &CatalogItem = &items[idx];
        let surface = item.as_surface().expect("catalog surfaces sit in an S^5");
        let rot = rotation_immersion(&surface);
        items.push(CatalogItem {
            id: format!("rot-{}", item.id),
            immersion: rot,
            ambient_normal: None,
        });
    }
    items
}

/// Looks up one catalog entry by id.
pub fn catalog_entry(id: &str) -> Result<CatalogItem> {
    catalog()
        .into_iter()
        .find(|item| item.id == id)
        .ok_or_else(|| Error::UnknownCatalog(id.into()))
}

pub fn catalog_ids() -> Vec<String> {
    catalog().into_iter().map(|i| i.id).collect()
}

/// Max totally-real residual of an immersion over a grid (orthonormal
/// frame components of `⟨J E_a, E_b⟩`).
pub fn totally_real_residual_over_grid(
    imm: &Immersion,
    res: &[usize],
    margin: f64,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for u in imm.domain.grid(res, margin) {
        let pkg = CurvaturePackage::compute(imm, &u, 2)?;
        worst = worst.max(pkg.totally_real_residual);
    }
    Ok(worst)
}
