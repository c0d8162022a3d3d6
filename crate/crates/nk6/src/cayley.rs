//! Arithmetic of purely imaginary Cayley numbers.
//!
//! A Cayley number is `A·e0 + x` with `x` in the span of `e1..e7`; the
//! purely imaginary part carries the seven-dimensional cross product
//! `×`, defined on the basis by a signed multiplication table and
//! extended bilinearly. The full product of imaginary Cayley numbers is
//! `x·y = ⟨x,y⟩ e0 + x×y`.
//!
//! Table entries are exact signed unit vectors, so every basis-level
//! identity holds bit-exactly in `f64`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Signed-index form of the basis multiplication table.
///
/// `CROSS_TABLE[j][k] = t` encodes `e_{j+1} × e_{k+1} = sign(t) · e_{|t|}`,
/// with `t = 0` for a zero product (the diagonal).
pub const CROSS_TABLE: [[i8; 7]; 7] = [
    [0, 3, -2, 5, -4, 7, -6],
    [-3, 0, 1, 6, -7, -4, 5],
    [2, -1, 0, -7, -6, 5, 4],
    [-5, -6, 7, 0, 1, 2, -3],
    [4, 7, 6, -1, 0, -3, -2],
    [-7, 4, -5, -2, 3, 0, 1],
    [6, -5, -4, 3, 2, -1, 0],
];

/// A vector in the span of `e1..e7`, i.e. a purely imaginary Cayley number.
///
/// The inner product is the standard Euclidean one on the components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vector7(pub [f64; 7]);

impl Vector7 {
    pub const ZERO: Vector7 = Vector7([0.0; 7]);

    /// The basis vector `e_i`, `i` in `1..=7`.
    pub fn basis(i: usize) -> Vector7 {
        assert!((1..=7).contains(&i), "basis index must be 1..=7");
        let mut v = [0.0; 7];
        v[i - 1] = 1.0;
        Vector7(v)
    }

    pub fn dot(&self, other: &Vector7) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn scale(&self, s: f64) -> Vector7 {
        let mut v = self.0;
        for c in v.iter_mut() {
            *c *= s;
        }
        Vector7(v)
    }

    pub fn add(&self, other: &Vector7) -> Vector7 {
        let mut v = self.0;
        for (c, o) in v.iter_mut().zip(other.0.iter()) {
            *c += o;
        }
        Vector7(v)
    }

    pub fn sub(&self, other: &Vector7) -> Vector7 {
        let mut v = self.0;
        for (c, o) in v.iter_mut().zip(other.0.iter()) {
            *c -= o;
        }
        Vector7(v)
    }

    pub fn neg(&self) -> Vector7 {
        self.scale(-1.0)
    }

    /// Returns `self / |self|`, or `None` for vectors below `eps` in norm.
    pub fn normalized(&self, eps: f64) -> Option<Vector7> {
        let n = self.norm();
        if n <= eps {
            None
        } else {
            Some(self.scale(1.0 / n))
        }
    }

    /// Component of `self` orthogonal to the (not necessarily unit) `dir`.
    pub fn reject_from(&self, dir: &Vector7) -> Vector7 {
        let d2 = dir.norm_squared();
        if d2 == 0.0 {
            return *self;
        }
        self.sub(&dir.scale(self.dot(dir) / d2))
    }

    /// A uniformly random direction on the unit sphere of `R^7`.
    pub fn random_unit(rng: &mut impl Rng) -> Vector7 {
        loop {
            let mut v = [0.0; 7];
            for c in v.iter_mut() {
                *c = rng.random_range(-1.0..1.0);
            }
            let v = Vector7(v);
            let n = v.norm();
            if n > 1e-3 && n <= 1.0 {
                return v.scale(1.0 / n);
            }
        }
    }

    /// A random vector with components uniform in `[-1, 1]`.
    pub fn random_box(rng: &mut impl Rng) -> Vector7 {
        let mut v = [0.0; 7];
        for c in v.iter_mut() {
            *c = rng.random_range(-1.0..1.0);
        }
        Vector7(v)
    }
}

impl std::ops::Index<usize> for Vector7 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for Vector7 {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// A full Cayley number `A·e0 + x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CayleyNumber {
    pub real_part: f64,
    pub imaginary_part: Vector7,
}

/// Sign convention for the `e0` coefficient of a product of imaginary
/// Cayley numbers.
///
/// The source convention is `x·y = ⟨x,y⟩ e0 + x×y`; the common octonion
/// convention instead carries `-⟨x,y⟩ e0` (so that `e_i² = -e0`). All
/// downstream geometry depends only on the cross part, which the two
/// conventions share.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MulConvention {
    /// `x·y = ⟨x,y⟩ e0 + x×y`.
    #[default]
    PositiveInner,
    /// `x·y = -⟨x,y⟩ e0 + x×y`.
    NegativeInner,
}

/// The seven-dimensional cross product, bilinear extension of the table.
pub fn cross(x: &Vector7, y: &Vector7) -> Vector7 {
    let mut out = [0.0; 7];
    for j in 0..7 {
        let xj = x.0[j];
        if xj == 0.0 {
            continue;
        }
        for k in 0..7 {
            let t = CROSS_TABLE[j][k];
            if t == 0 {
                continue;
            }
            let m = (t.unsigned_abs() as usize) - 1;
            out[m] += (t.signum() as f64) * xj * y.0[k];
        }
    }
    Vector7(out)
}

/// Product of purely imaginary Cayley numbers under the default
/// (`PositiveInner`) convention.
pub fn cayley_mul(x: &Vector7, y: &Vector7) -> CayleyNumber {
    cayley_mul_with(MulConvention::PositiveInner, x, y)
}

/// Product of purely imaginary Cayley numbers under an explicit convention.
pub fn cayley_mul_with(convention: MulConvention, x: &Vector7, y: &Vector7) -> CayleyNumber {
    let inner = x.dot(y);
    CayleyNumber {
        real_part: match convention {
            MulConvention::PositiveInner => inner,
            MulConvention::NegativeInner => -inner,
        },
        imaginary_part: cross(x, y),
    }
}

/// The scalar triple product `⟨x×y, z⟩`, totally antisymmetric.
pub fn scalar_triple(x: &Vector7, y: &Vector7, z: &Vector7) -> f64 {
    cross(x, y).dot(z)
}

/// Outcome of the algebra self-check.
#[derive(Debug, Clone)]
pub struct AlgebraReport {
    pub basis_pairs_checked: usize,
    pub random_pairs_checked: usize,
    /// Max of `|x×y + y×x|` over all checked pairs.
    pub max_antisymmetry: f64,
    /// Max of `|⟨x×y, x⟩|` and `|⟨x×y, y⟩|`, relative.
    pub max_orthogonality: f64,
    /// Max relative defect of `|x×y|² + ⟨x,y⟩² = |x|²|y|²`.
    pub max_norm_identity: f64,
    /// First identity that exceeded its tolerance, with the inputs.
    pub first_failure: Option<String>,
    pub pass: bool,
}

/// Checks antisymmetry, orthogonality and the norm identity of the cross
/// product on all 49 basis pairs plus `trials` random pairs.
///
/// Basis-level identities must hold exactly; random-pair identities are
/// held to 1e-13 (orthogonality) and 1e-12 (norm), relative.
pub fn verify_algebra(trials: usize, seed: u64) -> AlgebraReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AlgebraReport {
        basis_pairs_checked: 0,
        random_pairs_checked: 0,
        max_antisymmetry: 0.0,
        max_orthogonality: 0.0,
        max_norm_identity: 0.0,
        first_failure: None,
        pass: true,
    };

    let check_pair = |report: &mut AlgebraReport, x: &Vector7, y: &Vector7, label: &str| {
        let c = cross(x, y);
        let anti = c.add(&cross(y, x));
        let scale = (x.norm() * y.norm()).max(1.0);
        let r_anti = anti.norm() / (scale * scale).max(1.0);
        let r_orth = (c.dot(x).abs().max(c.dot(y).abs())) / (scale * scale * scale).max(1.0);
        let norm_lhs = c.norm_squared() + x.dot(y).powi(2);
        let norm_rhs = x.norm_squared() * y.norm_squared();
        let r_norm = (norm_lhs - norm_rhs).abs() / norm_rhs.max(1.0);
        report.max_antisymmetry = report.max_antisymmetry.max(r_anti);
        report.max_orthogonality = report.max_orthogonality.max(r_orth);
        report.max_norm_identity = report.max_norm_identity.max(r_norm);
        let mut fail = |what: &str, r: f64| {
            if report.first_failure.is_none() {
                report.first_failure =
                    Some(format!("{what} residual {r:.3e} on {label}: x={x:?}, y={y:?}"));
            }
            report.pass = false;
        };
        if r_anti > 1e-13 {
            fail("antisymmetry", r_anti);
        }
        if r_orth > 1e-13 {
            fail("orthogonality", r_orth);
        }
        if r_norm > 1e-12 {
            fail("norm identity", r_norm);
        }
    };

    for j in 1..=7 {
        for k in 1..=7 {
            check_pair(
                &mut report,
                &Vector7::basis(j),
                &Vector7::basis(k),
                &format!("basis pair (e{j}, e{k})"),
            );
            report.basis_pairs_checked += 1;
        }
    }
    for i in 0..trials {
        let x = Vector7::random_box(&mut rng);
        let y = Vector7::random_box(&mut rng);
        check_pair(&mut report, &x, &y, &format!("random pair #{i}"));
        report.random_pairs_checked += 1;
    }
    report
}

/// A basis triple witnessing non-associativity of the Cayley product,
/// or `None` if every triple associates (which would indicate a broken
/// table).
pub fn non_associativity_witness() -> Option<(usize, usize, usize)> {
    for i in 1..=7 {
        for j in 1..=7 {
            for k in 1..=7 {
                let ei = Vector7::basis(i);
                let ej = Vector7::basis(j);
                let ek = Vector7::basis(k);
                // Imaginary parts of (ei·ej)·ek and ei·(ej·ek); the real
                // parts of the inner products feed back as scalar
                // multiples of the imaginary factors.
                let left = {
                    let p = cayley_mul(&ei, &ej);
                    cross(&p.imaginary_part, &ek).add(&ek.scale(p.real_part))
                };
                let right = {
                    let p = cayley_mul(&ej, &ek);
                    cross(&ei, &p.imaginary_part).add(&ei.scale(p.real_part))
                };
                if left.sub(&right).norm() > 1e-9 {
                    return Some((i, j, k));
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oriented Fano lines of the table: `e_a × e_b = e_c` cyclically.
    /// Kept independent of `CROSS_TABLE` so the two transcriptions check
    /// each other.
    const FANO_LINES: [(usize, usize, usize); 7] = [
        (1, 2, 3),
        (1, 4, 5),
        (1, 6, 7),
        (2, 4, 6),
        (2, 7, 5),
        (3, 7, 4),
        (3, 6, 5),
    ];

    fn expected_entry(j: usize, k: usize) -> i8 {
        if j == k {
            return 0;
        }
        for &(a, b, c) in &FANO_LINES {
            for (p, q, r) in [(a, b, c), (b, c, a), (c, a, b)] {
                if (j, k) == (p, q) {
                    return r as i8;
                }
                if (j, k) == (q, p) {
                    return -(r as i8);
                }
            }
        }
        panic!("pair ({j},{k}) missing from Fano lines");
    }

    #[test]
    fn table_matches_fano_generator_entry_by_entry() {
        for j in 1..=7 {
            for k in 1..=7 {
                assert_eq!(
                    CROSS_TABLE[j - 1][k - 1],
                    expected_entry(j, k),
                    "entry e{j} x e{k}"
                );
            }
        }
    }

    #[test]
    fn spot_table_entries() {
        let e = Vector7::basis;
        assert_eq!(cross(&e(1), &e(2)), e(3));
        assert_eq!(cross(&e(1), &e(1)), Vector7::ZERO);
        assert_eq!(cross(&e(4), &e(5)), e(1));
        assert_eq!(cross(&e(2), &e(3)), e(1));
        assert_eq!(cross(&e(1), &e(3)), e(2).neg());
    }

    #[test]
    fn cayley_mul_examples() {
        let e = Vector7::basis;
        let p = cayley_mul(&e(1), &e(2));
        assert_eq!(p.real_part, 0.0);
        assert_eq!(p.imaginary_part, e(3));

        let q = cayley_mul(&e(1), &e(1));
        assert_eq!(q.real_part, 1.0);
        assert_eq!(q.imaginary_part, Vector7::ZERO);

        let r = cayley_mul_with(MulConvention::NegativeInner, &e(1), &e(1));
        assert_eq!(r.real_part, -1.0);
    }

    #[test]
    fn random_orthogonal_unit_pairs_have_unit_cross() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let x = Vector7::random_unit(&mut rng);
            let y = Vector7::random_unit(&mut rng)
                .reject_from(&x)
                .normalized(1e-12)
                .unwrap();
            let p = cayley_mul(&x, &y);
            assert!(p.real_part.abs() < 1e-14);
            assert!((p.imaginary_part.norm() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn basis_identities_exact() {
        let report = verify_algebra(0, 0);
        assert_eq!(report.basis_pairs_checked, 49);
        assert_eq!(report.max_antisymmetry, 0.0);
        assert_eq!(report.max_orthogonality, 0.0);
        assert_eq!(report.max_norm_identity, 0.0);
        assert!(report.pass, "{:?}", report.first_failure);
    }

    #[test]
    fn norm_identity_on_specific_pair() {
        // e2 x e3 = e1; 1 = 1*1 - 0.
        let e = Vector7::basis;
        let c = cross(&e(2), &e(3));
        assert_eq!(c, e(1));
        assert_eq!(c.norm_squared() + e(2).dot(&e(3)).powi(2), 1.0);
    }

    #[test]
    fn self_cross_vanishes_on_random_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x = Vector7::random_box(&mut rng);
            assert!(cross(&x, &x).norm() < 1e-13 * x.norm_squared().max(1.0));
        }
    }

    #[test]
    fn random_identities_within_tolerance() {
        let report = verify_algebra(10_000, 42);
        assert!(report.pass, "{:?}", report.first_failure);
        assert!(report.max_norm_identity <= 1e-12);
        assert!(report.max_orthogonality <= 1e-13);
    }

    #[test]
    fn non_associative_witness_exists() {
        let w = non_associativity_witness();
        assert!(w.is_some());
        // (e1 x e2) x e4 = e3 x e4 = -e7, but e1 x (e2 x e4) = e1 x e6 = e7.
        let e = Vector7::basis;
        assert_eq!(cross(&cross(&e(1), &e(2)), &e(4)), e(7).neg());
        assert_eq!(cross(&e(1), &cross(&e(2), &e(4))), e(7));
    }

    #[test]
    fn triple_product_antisymmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let x = Vector7::random_box(&mut rng);
            let y = Vector7::random_box(&mut rng);
            let z = Vector7::random_box(&mut rng);
            let t = scalar_triple(&x, &y, &z);
            assert!((scalar_triple(&y, &x, &z) + t).abs() < 1e-12 * t.abs().max(1.0));
            assert!((scalar_triple(&x, &z, &y) + t).abs() < 1e-12 * t.abs().max(1.0));
            assert!((scalar_triple(&z, &x, &y) - t).abs() < 1e-12 * t.abs().max(1.0));
        }
    }
}
