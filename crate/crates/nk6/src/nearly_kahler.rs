//! The almost complex structure on the six-sphere and its nearly Kähler
//! tensor.
//!
//! For `p` on the unit sphere of imaginary Cayley numbers, `J_p U = p × U`
//! rotates each tangent space isometrically with `J² = -Id`. The tensor
//! `G(X,Y) = (∇̃_X J)Y` measures the failure of `J` to be parallel; its
//! vanishing on the diagonal, `G(X,X) = 0`, is the nearly Kähler
//! condition.
//!
//! `G` is evaluated exactly by differentiating `t ↦ J_{γ(t)} Ỹ(t)` with
//! one-variable jets along the great circle `γ` through `p` in direction
//! `X`, where `Ỹ` is the projected constant extension of `Y`. A central
//! finite-difference version of the same construction is kept as an
//! independent test oracle.

use crate::cayley::{cross, Vector7};
use crate::jets::{Jet, JetMap7};
use crate::{Error, Result};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A point of the unit sphere in the imaginary Cayley numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointS6 {
    position: Vector7,
}

impl PointS6 {
    pub fn new(position: Vector7) -> Result<PointS6> {
        let n = position.norm();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::NotOnSphere(n));
        }
        Ok(PointS6 { position })
    }

    /// Normalizes an arbitrary nonzero vector onto the sphere.
    pub fn project(v: &Vector7) -> Result<PointS6> {
        let u = v.normalized(1e-14).ok_or(Error::NotOnSphere(v.norm()))?;
        Ok(PointS6 { position: u })
    }

    pub fn position(&self) -> Vector7 {
        self.position
    }
}

/// A tangent vector of the sphere, kept with its base point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVectorS6 {
    pub base: PointS6,
    pub direction: Vector7,
}

impl TangentVectorS6 {
    /// Wraps `direction` after checking orthogonality to the base point.
    pub fn new(base: PointS6, direction: Vector7) -> Result<TangentVectorS6> {
        let residual = base.position().dot(&direction).abs();
        if residual > 1e-10 * direction.norm().max(1.0) {
            return Err(Error::NotTangent(residual));
        }
        Ok(TangentVectorS6 { base, direction })
    }
}

/// Orthogonal projection of an ambient vector onto the tangent space at `p`.
///
/// Idempotent; the radial component `⟨v,p⟩p` is removed.
pub fn project_tangent(p: &PointS6, v: &Vector7) -> TangentVectorS6 {
    let pos = p.position();
    TangentVectorS6 {
        base: *p,
        direction: v.sub(&pos.scale(v.dot(&pos))),
    }
}

/// The almost complex structure `J_p U = p × U`.
///
/// Rejects vectors that are not tangent at `p`; the result is again
/// tangent and of the same length.
pub fn almost_complex(p: &PointS6, u: &TangentVectorS6) -> Result<TangentVectorS6> {
    let residual = p.position().dot(&u.direction).abs();
    if residual > 1e-8 * u.direction.norm().max(1.0) {
        return Err(Error::NotTangent(residual));
    }
    Ok(TangentVectorS6 {
        base: *p,
        direction: cross(&p.position(), &u.direction),
    })
}

/// `J` on a bare direction vector, for callers that manage tangency
/// themselves.
pub fn apply_j(p: &Vector7, v: &Vector7) -> Vector7 {
    cross(p, v)
}

/// The nearly Kähler tensor `G(X,Y) = (∇̃_X J)Y`, by jet differentiation
/// along the great circle generated by `X`.
pub fn g_tensor(p: &PointS6, x: &TangentVectorS6, y: &TangentVectorS6) -> Result<Vector7> {
    let pos = p.position();
    for v in [x, y] {
        let r = pos.dot(&v.direction).abs();
        if r > 1e-8 * v.direction.norm().max(1.0) {
            return Err(Error::NotTangent(r));
        }
    }
    let speed = x.direction.norm();
    if speed == 0.0 {
        return Ok(Vector7::ZERO);
    }
    // great circle with gamma(0) = p, gamma'(0) = X
    let dir = x.direction.scale(1.0 / speed);
    let st = Jet::variable(1, 2, 0, 0.0).scale(speed);
    let gamma = JetMap7::constant(&pos, 1, 2)
        .scale_jet(&st.cos())
        .add(&JetMap7::constant(&dir, 1, 2).scale_jet(&st.sin()));
    // tangential extension of Y along the curve
    let y_ext = {
        let y_const = JetMap7::constant(&y.direction, 1, 2);
        y_const.sub(&gamma.scale_jet(&y_const.dot(&gamma)))
    };
    let w = gamma.cross(&y_ext);

    let project = |v: &Vector7| v.sub(&pos.scale(v.dot(&pos)));
    let nabla_jy = project(&w.partial(0).value());
    let nabla_y = project(&y_ext.partial(0).value());
    Ok(nabla_jy.sub(&cross(&pos, &nabla_y)))
}

/// Finite-difference oracle for [`g_tensor`]: the same construction with
/// central differences at step `h` instead of jets.
pub fn g_tensor_finite_difference(
    p: &PointS6,
    x: &TangentVectorS6,
    y: &TangentVectorS6,
    h: f64,
) -> Vector7 {
    let pos = p.position();
    let speed = x.direction.norm();
    if speed == 0.0 {
        return Vector7::ZERO;
    }
    let dir = x.direction.scale(1.0 / speed);
    let gamma = |t: f64| {
        pos.scale((speed * t).cos())
            .add(&dir.scale((speed * t).sin()))
    };
    let y_ext = |t: f64| {
        let g = gamma(t);
        y.direction.sub(&g.scale(y.direction.dot(&g)))
    };
    let w = |t: f64| cross(&gamma(t), &y_ext(t));
    let project = |v: &Vector7| v.sub(&pos.scale(v.dot(&pos)));
    let d_w = w(h).sub(&w(-h)).scale(1.0 / (2.0 * h));
    let d_y = y_ext(h).sub(&y_ext(-h)).scale(1.0 / (2.0 * h));
    project(&d_w).sub(&cross(&pos, &project(&d_y)))
}

/// Outcome of the nearly Kähler identity sweep.
#[derive(Debug, Clone)]
pub struct NKReport {
    pub samples: usize,
    /// Max `|J²U + U| / |U|`.
    pub max_j_squared: f64,
    /// Max defect of `⟨JX, JY⟩ = ⟨X, Y⟩`.
    pub max_isometry: f64,
    /// Max `|G(X,X)| / |X|²`.
    pub max_g_diagonal: f64,
    /// Max antisymmetry defect of `⟨G(X,Y), Z⟩` over slot swaps.
    pub max_g_antisymmetry: f64,
    /// Max component of `G(X,Y)` along `p`, `X`, `Y`, `JX`, `JY`.
    pub max_g_orthogonality: f64,
    pub failures: Vec<String>,
    pub pass: bool,
}

/// Samples random points and tangent pairs and checks `J² = -Id`,
/// isometry of `J`, `G(X,X) = 0`, and antisymmetry of `⟨G(X,Y), Z⟩`
/// in all slots.
pub fn verify_nearly_kahler(samples: usize, seed: u64) -> Result<NKReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = NKReport {
        samples,
        max_j_squared: 0.0,
        max_isometry: 0.0,
        max_g_diagonal: 0.0,
        max_g_antisymmetry: 0.0,
        max_g_orthogonality: 0.0,
        failures: Vec::new(),
        pass: true,
    };

    for i in 0..samples {
        let p = PointS6::project(&Vector7::random_unit(&mut rng))?;
        let x = project_tangent(&p, &Vector7::random_unit(&mut rng));
        let y = project_tangent(&p, &Vector7::random_unit(&mut rng));
        let z = project_tangent(&p, &Vector7::random_unit(&mut rng));

        let jx = almost_complex(&p, &x)?;
        let jy = almost_complex(&p, &y)?;
        let jjx = almost_complex(&p, &jx)?;
        let xn = x.direction.norm().max(1e-30);
        report.max_j_squared = report
            .max_j_squared
            .max(jjx.direction.add(&x.direction).norm() / xn);
        report.max_isometry = report.max_isometry.max(
            (jx.direction.dot(&jy.direction) - x.direction.dot(&y.direction)).abs()
                / (x.direction.norm() * y.direction.norm()).max(1e-30),
        );

        let gxx = g_tensor(&p, &x, &x)?;
        report.max_g_diagonal = report.max_g_diagonal.max(gxx.norm() / (xn * xn));

        let gxy = g_tensor(&p, &x, &y)?;
        let gyx = g_tensor(&p, &y, &x)?;
        let scale = (x.direction.norm() * y.direction.norm()).max(1e-30);
        let swap12 = gxy.add(&gyx).norm() / scale;
        // slot 2 <-> 3 antisymmetry: <G(X,Y),Z> = -<G(X,Z),Y>
        let gxz = g_tensor(&p, &x, &z)?;
        let swap23 = (gxy.dot(&z.direction) + gxz.dot(&y.direction)).abs()
            / (scale * z.direction.norm()).max(1e-30);
        report.max_g_antisymmetry = report.max_g_antisymmetry.max(swap12.max(swap23));

        let ortho = [
            p.position(),
            x.direction,
            y.direction,
            jx.direction,
            jy.direction,
        ]
        .iter()
        .map(|v| gxy.dot(v).abs() / v.norm().max(1e-30))
        .fold(0.0f64, f64::max)
            / scale;
        report.max_g_orthogonality = report.max_g_orthogonality.max(ortho);

        if report.max_j_squared > 1e-12
            || report.max_g_diagonal > 1e-9
            || report.max_g_antisymmetry > 1e-9
        {
            if report.failures.len() < 8 {
                report
                    .failures
                    .push(format!("sample {i}: residual above tolerance at p={p:?}"));
            }
            report.pass = false;
        }
    }
    Ok(report)
}
