//! Truncated multivariate Taylor (jet) arithmetic.
//!
//! A [`Jet`] stores the Taylor coefficients of a real quantity in up to
//! three chart variables through total degree at most four — exactly the
//! depth consumed by the second covariant derivative of the second
//! fundamental form, which needs fourth derivatives of an immersion.
//! Arithmetic on jets is exact truncated-polynomial algebra: extracted
//! partial derivatives carry no truncation error below the stated order,
//! only rounding. Finite differences are used in tests as an independent
//! oracle, never as a primary path.
//!
//! Coefficients are stored densely in graded lexicographic order, so
//! truncation to a lower order is a prefix copy and the largest shape
//! holds 35 coefficients.

use crate::cayley::{Vector7, CROSS_TABLE};
use crate::{Error, Result};
use std::sync::OnceLock;

pub const MAX_VARS: usize = 3;
pub const MAX_ORDER: usize = 4;

const NO_POS: u16 = u16::MAX;
const FACTORIAL: [f64; 5] = [1.0, 1.0, 2.0, 6.0, 24.0];

struct ShapeData {
    len: usize,
    /// Multi-indices in graded lex order (unused variables stay zero).
    indices: Vec<[u8; 3]>,
    /// Exponent triple -> coefficient position, keyed by `(a0*5+a1)*5+a2`.
    pos: [u16; 125],
    /// Pair-product position table: `i * len + j` -> position of the sum
    /// index, or `NO_POS` when the product truncates away.
    prod: Vec<u16>,
    /// Position of `index + e_var`, or `NO_POS`; used by differentiation.
    shift: [Vec<u16>; 3],
}

fn key(a: [u8; 3]) -> usize {
    (a[0] as usize * 5 + a[1] as usize) * 5 + a[2] as usize
}

fn build_shape(vars: usize, order: usize) -> ShapeData {
    // lexicographic within a degree: leading exponent descending
    fn emit(indices: &mut Vec<[u8; 3]>, prefix: [u8; 3], var: usize, rem: u8, vars: usize) {
        if var == vars - 1 {
            let mut idx = prefix;
            idx[var] = rem;
            indices.push(idx);
            return;
        }
        for a in (0..=rem).rev() {
            let mut idx = prefix;
            idx[var] = a;
            emit(indices, idx, var + 1, rem - a, vars);
        }
    }
    let mut indices = Vec::new();
    for degree in 0..=order as u8 {
        emit(&mut indices, [0; 3], 0, degree, vars);
    }

    let mut pos = [NO_POS; 125];
    for (p, idx) in indices.iter().enumerate() {
        pos[key(*idx)] = p as u16;
    }

    let len = indices.len();
    let mut prod = vec![NO_POS; len * len];
    for i in 0..len {
        for j in 0..len {
            let a = indices[i];
            let b = indices[j];
            let total: u8 = (0..3).map(|v| a[v] + b[v]).sum();
            if (total as usize) <= order {
                let sum = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
                prod[i * len + j] = pos[key(sum)];
            }
        }
    }

    let shift = std::array::from_fn(|v| {
        indices
            .iter()
            .map(|idx| {
                let mut up = *idx;
                up[v] += 1;
                if (up.iter().map(|&x| x as usize).sum::<usize>()) <= order && v < vars {
                    pos[key(up)]
                } else {
                    NO_POS
                }
            })
            .collect()
    });

    ShapeData {
        len,
        indices,
        pos,
        prod,
        shift,
    }
}

fn shape(vars: usize, order: usize) -> &'static ShapeData {
    static SHAPES: OnceLock<Vec<ShapeData>> = OnceLock::new();
    let all = SHAPES.get_or_init(|| {
        let mut v = Vec::new();
        for vars in 1..=MAX_VARS {
            for order in 0..=MAX_ORDER {
                v.push(build_shape(vars, order));
            }
        }
        v
    });
    &all[(vars - 1) * (MAX_ORDER + 1) + order]
}

/// Truncated Taylor expansion of a scalar quantity.
///
/// Coefficient at multi-index `α` is the partial derivative divided by
/// `α!`, i.e. the Taylor coefficient at the expansion point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    vars: usize,
    order: usize,
    coeffs: Vec<f64>,
}

impl Jet {
    fn validate(vars: usize, order: usize) {
        assert!(
            (1..=MAX_VARS).contains(&vars),
            "jet variables must be 1..={MAX_VARS}"
        );
        assert!(order <= MAX_ORDER, "jet order must be <= {MAX_ORDER}");
    }

    /// A jet with no variable dependence.
    pub fn constant(vars: usize, order: usize, value: f64) -> Jet {
        Self::validate(vars, order);
        let mut coeffs = vec![0.0; shape(vars, order).len];
        coeffs[0] = value;
        Jet {
            vars,
            order,
            coeffs,
        }
    }

    /// The coordinate function of variable `var` expanded around `value`.
    pub fn variable(vars: usize, order: usize, var: usize, value: f64) -> Jet {
        Self::validate(vars, order);
        assert!(var < vars, "variable index out of range");
        assert!(order >= 1, "a variable jet needs order >= 1");
        let sh = shape(vars, order);
        let mut coeffs = vec![0.0; sh.len];
        coeffs[0] = value;
        let mut e = [0u8; 3];
        e[var] = 1;
        coeffs[sh.pos[key(e)] as usize] = 1.0;
        Jet {
            vars,
            order,
            coeffs,
        }
    }

    pub fn from_coeffs(vars: usize, order: usize, coeffs: Vec<f64>) -> Result<Jet> {
        Self::validate(vars, order);
        let expect = shape(vars, order).len;
        if coeffs.len() != expect {
            return Err(Error::JetShape(format!(
                "expected {expect} coefficients for {vars} vars order {order}, got {}",
                coeffs.len()
            )));
        }
        Ok(Jet {
            vars,
            order,
            coeffs,
        })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Value at the expansion point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    fn same_shape(&self, other: &Jet) -> Result<()> {
        if self.vars != other.vars || self.order != other.order {
            return Err(Error::JetShape(format!(
                "({} vars, order {}) vs ({} vars, order {})",
                self.vars, other.vars, self.order, other.order
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Jet) -> Jet {
        self.try_add(other).expect("jet shape mismatch")
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet> {
        self.same_shape(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Jet {
            vars: self.vars,
            order: self.order,
            coeffs,
        })
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        self.same_shape(other).expect("jet shape mismatch");
        Jet {
            vars: self.vars,
            order: self.order,
            coeffs,
        }
    }

    pub fn neg(&self) -> Jet {
        self.scale(-1.0)
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            vars: self.vars,
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Truncated product. Symmetrized accumulation makes `a*b` and `b*a`
    /// bit-identical.
    pub fn mul(&self, other: &Jet) -> Jet {
        self.try_mul(other).expect("jet shape mismatch")
    }

    pub fn try_mul(&self, other: &Jet) -> Result<Jet> {
        self.same_shape(other)?;
        let sh = shape(self.vars, self.order);
        let m = sh.len;
        let a = &self.coeffs;
        let b = &other.coeffs;
        let mut out = vec![0.0; m];
        for i in 0..m {
            let t = sh.prod[i * m + i];
            if t != NO_POS {
                out[t as usize] += a[i] * b[i];
            }
            for j in (i + 1)..m {
                let t = sh.prod[i * m + j];
                if t == NO_POS {
                    continue;
                }
                out[t as usize] += a[i] * b[j] + a[j] * b[i];
            }
        }
        Ok(Jet {
            vars: self.vars,
            order: self.order,
            coeffs: out,
        })
    }

    /// Composition `f ∘ self` given `derivs[k] = f^(k)(self.value())`.
    pub fn compose_with_derivatives(&self, derivs: &[f64]) -> Jet {
        assert!(derivs.len() >= self.order + 1, "need order+1 derivatives");
        let mut nil = self.clone();
        nil.coeffs[0] = 0.0;
        let mut acc = Jet::constant(self.vars, self.order, derivs[self.order] / FACTORIAL[self.order]);
        for k in (0..self.order).rev() {
            acc = acc.mul(&nil);
            acc.coeffs[0] += derivs[k] / FACTORIAL[k];
        }
        acc
    }

    pub fn sin(&self) -> Jet {
        let c = self.value();
        let (s, co) = c.sin_cos();
        let cycle = [s, co, -s, -co, s];
        self.compose_with_derivatives(&cycle[..=self.order])
    }

    pub fn cos(&self) -> Jet {
        let c = self.value();
        let (s, co) = c.sin_cos();
        let cycle = [co, -s, -co, s, co];
        self.compose_with_derivatives(&cycle[..=self.order])
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose_with_derivatives(&[e; 5][..=self.order])
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let c = self.value();
        if c <= 0.0 {
            return Err(Error::JetDomain(format!(
                "sqrt needs a positive constant term, got {c}"
            )));
        }
        let r = c.sqrt();
        // f = c^(1/2), f^(k) = (1/2)(1/2-1)...(1/2-k+1) c^(1/2-k)
        let mut derivs = [0.0; 5];
        derivs[0] = r;
        let mut factor = 0.5;
        let mut power = r / c;
        for k in 1..=self.order {
            derivs[k] = factor * power;
            factor *= 0.5 - k as f64;
            power /= c;
        }
        Ok(self.compose_with_derivatives(&derivs[..=self.order]))
    }

    pub fn recip(&self) -> Result<Jet> {
        let c = self.value();
        if c == 0.0 {
            return Err(Error::JetDomain(
                "reciprocal needs a nonzero constant term".into(),
            ));
        }
        // f^(k) = (-1)^k k! / c^(k+1)
        let mut derivs = [0.0; 5];
        let mut p = 1.0 / c;
        for k in 0..=self.order {
            derivs[k] = FACTORIAL[k] * p * if k % 2 == 0 { 1.0 } else { -1.0 };
            p /= c;
        }
        Ok(self.compose_with_derivatives(&derivs[..=self.order]))
    }

    pub fn div(&self, other: &Jet) -> Result<Jet> {
        Ok(self.mul(&other.recip()?))
    }

    /// Partial derivative with respect to variable `var`; drops one order.
    pub fn partial(&self, var: usize) -> Jet {
        assert!(var < self.vars, "variable index out of range");
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let sh = shape(self.vars, self.order);
        let lower = shape(self.vars, self.order - 1);
        let mut out = vec![0.0; lower.len];
        for (p, idx) in lower.indices.iter().enumerate() {
            let up = sh.shift[var][sh.pos[key(*idx)] as usize];
            debug_assert_ne!(up, NO_POS);
            out[p] = (idx[var] as f64 + 1.0) * self.coeffs[up as usize];
        }
        // positions of degree<=order-1 indices coincide in both shapes
        // (graded order), so sh.pos lookup above is safe.
        Jet {
            vars: self.vars,
            order: self.order - 1,
            coeffs: out,
        }
    }

    /// The partial derivative `∂^α` at the expansion point, i.e. the
    /// stored coefficient times `α!`.
    pub fn extract_partial(&self, multi_index: &[usize]) -> Result<f64> {
        if multi_index.len() > self.vars {
            return Err(Error::JetShape(format!(
                "multi-index has {} entries for a {}-variable jet",
                multi_index.len(),
                self.vars
            )));
        }
        let degree: usize = multi_index.iter().sum();
        if degree > self.order {
            return Err(Error::JetIndex {
                degree,
                order: self.order,
            });
        }
        let mut idx = [0u8; 3];
        for (s, &m) in idx.iter_mut().zip(multi_index) {
            *s = m as u8;
        }
        let sh = shape(self.vars, self.order);
        let fact: f64 = multi_index.iter().map(|&m| FACTORIAL[m]).product();
        Ok(self.coeffs[sh.pos[key(idx)] as usize] * fact)
    }

    /// Drops terms above `new_order` (a prefix copy in graded order).
    pub fn truncated(&self, new_order: usize) -> Jet {
        assert!(new_order <= self.order);
        let len = shape(self.vars, new_order).len;
        Jet {
            vars: self.vars,
            order: new_order,
            coeffs: self.coeffs[..len].to_vec(),
        }
    }

    /// Re-expresses the jet in a larger variable set, sending variable
    /// `i` to `i + offset`.
    pub fn embedded(&self, new_vars: usize, offset: usize) -> Jet {
        assert!(self.vars + offset <= new_vars && new_vars <= MAX_VARS);
        let old = shape(self.vars, self.order);
        let new = shape(new_vars, self.order);
        let mut out = vec![0.0; new.len];
        for (p, idx) in old.indices.iter().enumerate() {
            let mut shifted = [0u8; 3];
            for v in 0..self.vars {
                shifted[v + offset] = idx[v];
            }
            out[new.pos[key(shifted)] as usize] = self.coeffs[p];
        }
        Jet {
            vars: new_vars,
            order: self.order,
            coeffs: out,
        }
    }
}

impl std::ops::Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Jet::add(self, rhs)
    }
}

impl std::ops::Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Jet::sub(self, rhs)
    }
}

impl std::ops::Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        Jet::mul(self, rhs)
    }
}

impl std::ops::Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::neg(self)
    }
}

/// Seven jets sharing one shape: a map into `R^7` with its expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct JetMap7 {
    pub components: [Jet; 7],
}

impl JetMap7 {
    pub fn new(components: [Jet; 7]) -> JetMap7 {
        let (v, o) = (components[0].vars(), components[0].order());
        assert!(
            components.iter().all(|c| c.vars() == v && c.order() == o),
            "all component jets must share one shape"
        );
        JetMap7 { components }
    }

    pub fn from_fn(f: impl FnMut(usize) -> Jet) -> JetMap7 {
        JetMap7::new(std::array::from_fn(f))
    }

    pub fn constant(v: &Vector7, vars: usize, order: usize) -> JetMap7 {
        JetMap7::from_fn(|i| Jet::constant(vars, order, v[i]))
    }

    pub fn vars(&self) -> usize {
        self.components[0].vars()
    }

    pub fn order(&self) -> usize {
        self.components[0].order()
    }

    pub fn value(&self) -> Vector7 {
        let mut v = [0.0; 7];
        for (c, jet) in v.iter_mut().zip(&self.components) {
            *c = jet.value();
        }
        Vector7(v)
    }

    pub fn add(&self, other: &JetMap7) -> JetMap7 {
        JetMap7::from_fn(|i| self.components[i].add(&other.components[i]))
    }

    pub fn sub(&self, other: &JetMap7) -> JetMap7 {
        JetMap7::from_fn(|i| self.components[i].sub(&other.components[i]))
    }

    pub fn scale(&self, s: f64) -> JetMap7 {
        JetMap7::from_fn(|i| self.components[i].scale(s))
    }

    /// Componentwise product with a scalar jet.
    pub fn scale_jet(&self, s: &Jet) -> JetMap7 {
        JetMap7::from_fn(|i| self.components[i].mul(s))
    }

    pub fn dot(&self, other: &JetMap7) -> Jet {
        let mut acc = self.components[0].mul(&other.components[0]);
        for i in 1..7 {
            acc = acc.add(&self.components[i].mul(&other.components[i]));
        }
        acc
    }

    pub fn norm_squared(&self) -> Jet {
        self.dot(self)
    }

    /// The seven-dimensional cross product, componentwise on jets.
    pub fn cross(&self, other: &JetMap7) -> JetMap7 {
        let (vars, order) = (self.vars(), self.order());
        let mut out: [Jet; 7] = std::array::from_fn(|_| Jet::constant(vars, order, 0.0));
        for j in 0..7 {
            for k in 0..7 {
                let t = CROSS_TABLE[j][k];
                if t == 0 {
                    continue;
                }
                let m = (t.unsigned_abs() as usize) - 1;
                let term = self.components[j].mul(&other.components[k]);
                out[m] = if t > 0 {
                    out[m].add(&term)
                } else {
                    out[m].sub(&term)
                };
            }
        }
        JetMap7::new(out)
    }

    pub fn partial(&self, var: usize) -> JetMap7 {
        JetMap7::from_fn(|i| self.components[i].partial(var))
    }

    pub fn truncated(&self, new_order: usize) -> JetMap7 {
        JetMap7::from_fn(|i| self.components[i].truncated(new_order))
    }

    pub fn embedded(&self, new_vars: usize, offset: usize) -> JetMap7 {
        JetMap7::from_fn(|i| self.components[i].embedded(new_vars, offset))
    }

    /// `self / |self|`; fails when the norm's constant term is not positive.
    pub fn normalized(&self) -> Result<JetMap7> {
        let inv = self.norm_squared().sqrt()?.recip()?;
        Ok(self.scale_jet(&inv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shape_sizes() {
        assert_eq!(shape(1, 4).len, 5);
        assert_eq!(shape(2, 4).len, 15);
        assert_eq!(shape(3, 4).len, 35);
        assert_eq!(shape(3, 3).len, 20);
        assert_eq!(shape(2, 2).len, 6);
    }

    #[test]
    fn t_times_t_is_t_squared() {
        let t = Jet::variable(1, 4, 0, 0.0);
        let sq = t.mul(&t);
        assert_eq!(sq.extract_partial(&[2]).unwrap(), 2.0);
        assert_eq!(sq.value(), 0.0);
        assert_eq!(sq.extract_partial(&[1]).unwrap(), 0.0);
    }

    #[test]
    fn sin_cos_product_taylor_coefficients() {
        // sin(t)cos(t) = sin(2t)/2 = t - (2/3) t^3 + ...
        let t = Jet::variable(1, 3, 0, 0.0);
        let p = t.sin().mul(&t.cos());
        assert!((p.coeffs()[0] - 0.0).abs() < 1e-15);
        assert!((p.coeffs()[1] - 1.0).abs() < 1e-15);
        assert!((p.coeffs()[2] - 0.0).abs() < 1e-15);
        assert!((p.coeffs()[3] - (-2.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn sin_maclaurin() {
        let t = Jet::variable(1, 4, 0, 0.0);
        let s = t.sin();
        let expect = [0.0, 1.0, 0.0, -1.0 / 6.0, 0.0];
        for (c, e) in s.coeffs().iter().zip(expect) {
            assert!((c - e).abs() < 1e-15);
        }
    }

    #[test]
    fn cos_of_constant_zero() {
        let z = Jet::constant(2, 3, 0.0);
        let c = z.cos();
        assert_eq!(c.value(), 1.0);
        assert!(c.coeffs()[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn sqrt_binomial_series() {
        // sqrt(1+t) = 1 + t/2 - t^2/8 + ...
        let t = Jet::variable(1, 2, 0, 0.0);
        let one_plus = t.add(&Jet::constant(1, 2, 1.0));
        let r = one_plus.sqrt().unwrap();
        assert!((r.coeffs()[0] - 1.0).abs() < 1e-15);
        assert!((r.coeffs()[1] - 0.5).abs() < 1e-15);
        assert!((r.coeffs()[2] + 0.125).abs() < 1e-15);
    }

    #[test]
    fn sqrt_rejects_nonpositive() {
        let t = Jet::variable(1, 2, 0, -1.0);
        assert!(t.sqrt().is_err());
        assert!(Jet::constant(1, 2, 0.0).sqrt().is_err());
        assert!(Jet::constant(1, 2, 0.0).recip().is_err());
    }

    #[test]
    fn extract_partials() {
        let u = Jet::variable(2, 2, 0, 0.0);
        let v = Jet::variable(2, 2, 1, 0.0);
        let uv = u.mul(&v);
        assert_eq!(uv.extract_partial(&[1, 1]).unwrap(), 1.0);

        let t = Jet::variable(1, 4, 0, 0.0);
        assert_eq!(t.cos().extract_partial(&[4]).unwrap(), 1.0);
        assert!(matches!(
            t.cos().extract_partial(&[5]),
            Err(Error::JetIndex { .. })
        ));
    }

    #[test]
    fn chain_rule_matches_analytic() {
        // d/dt sin(exp(t)) = cos(exp(t)) exp(t)
        let t0 = 0.3;
        let t = Jet::variable(1, 2, 0, t0);
        let f = t.exp().sin();
        let e = t0.exp();
        let d1 = f.extract_partial(&[1]).unwrap();
        let expect1 = e.cos() * e;
        // second derivative: -sin(e^t) e^{2t} + cos(e^t) e^t
        let expect2 = -e.sin() * e * e + e.cos() * e;
        assert!((d1 - expect1).abs() <= 1e-12 * expect1.abs());
        let d2 = f.extract_partial(&[2]).unwrap();
        assert!((d2 - expect2).abs() <= 1e-12 * expect2.abs().max(1.0));
    }

    #[test]
    fn partial_reduces_order() {
        let u = Jet::variable(3, 4, 0, 0.1);
        let v = Jet::variable(3, 4, 1, 0.2);
        let f = u.mul(&v).sin();
        let fu = f.partial(0);
        assert_eq!(fu.order(), 3);
        let direct = f.extract_partial(&[1, 1, 0]).unwrap();
        let via = fu.extract_partial(&[0, 1, 0]).unwrap();
        assert!((direct - via).abs() < 1e-14);
    }

    #[test]
    fn embedding_preserves_partials() {
        let u = Jet::variable(2, 3, 0, 0.4);
        let v = Jet::variable(2, 3, 1, -0.2);
        let f = u.sin().mul(&v.cos());
        let g = f.embedded(3, 1);
        assert_eq!(
            f.extract_partial(&[1, 2]).unwrap(),
            g.extract_partial(&[0, 1, 2]).unwrap()
        );
        assert_eq!(g.partial(0).coeffs().iter().map(|c| c.abs()).sum::<f64>(), 0.0);
    }

    /// Small random expression trees, evaluable both on plain floats and
    /// on jets; the float path feeds the finite-difference oracle.
    #[derive(Debug, Clone)]
    enum Expr {
        Var(usize),
        Const(f64),
        Add(Box<Expr>, Box<Expr>),
        Mul(Box<Expr>, Box<Expr>),
        Sin(Box<Expr>),
        Cos(Box<Expr>),
        Exp(Box<Expr>),
        SqrtShift(Box<Expr>),
    }

    impl Expr {
        fn random(rng: &mut impl Rng, depth: usize, vars: usize) -> Expr {
            if depth == 0 {
                return if rng.random_bool(0.7) {
                    Expr::Var(rng.random_range(0..vars))
                } else {
                    Expr::Const(rng.random_range(-1.0..1.0))
                };
            }
            match rng.random_range(0..6) {
                0 => Expr::Add(
                    Box::new(Expr::random(rng, depth - 1, vars)),
                    Box::new(Expr::random(rng, depth - 1, vars)),
                ),
                1 => Expr::Mul(
                    Box::new(Expr::random(rng, depth - 1, vars)),
                    Box::new(Expr::random(rng, depth - 1, vars)),
                ),
                2 => Expr::Sin(Box::new(Expr::random(rng, depth - 1, vars))),
                3 => Expr::Cos(Box::new(Expr::random(rng, depth - 1, vars))),
                4 => Expr::Exp(Box::new(Expr::Sin(Box::new(Expr::random(
                    rng,
                    depth - 1,
                    vars,
                ))))),
                _ => Expr::SqrtShift(Box::new(Expr::Sin(Box::new(Expr::random(
                    rng,
                    depth - 1,
                    vars,
                ))))),
            }
        }

        fn eval_f64(&self, x: &[f64]) -> f64 {
            match self {
                Expr::Var(i) => x[*i],
                Expr::Const(c) => *c,
                Expr::Add(a, b) => a.eval_f64(x) + b.eval_f64(x),
                Expr::Mul(a, b) => a.eval_f64(x) * b.eval_f64(x),
                Expr::Sin(a) => a.eval_f64(x).sin(),
                Expr::Cos(a) => a.eval_f64(x).cos(),
                Expr::Exp(a) => a.eval_f64(x).exp(),
                Expr::SqrtShift(a) => (a.eval_f64(x) + 2.0).sqrt(),
            }
        }

        fn eval_jet(&self, x: &[f64], order: usize) -> Jet {
            let vars = x.len();
            match self {
                Expr::Var(i) => Jet::variable(vars, order, *i, x[*i]),
                Expr::Const(c) => Jet::constant(vars, order, *c),
                Expr::Add(a, b) => a.eval_jet(x, order).add(&b.eval_jet(x, order)),
                Expr::Mul(a, b) => a.eval_jet(x, order).mul(&b.eval_jet(x, order)),
                Expr::Sin(a) => a.eval_jet(x, order).sin(),
                Expr::Cos(a) => a.eval_jet(x, order).cos(),
                Expr::Exp(a) => a.eval_jet(x, order).exp(),
                Expr::SqrtShift(a) => a
                    .eval_jet(x, order)
                    .add(&Jet::constant(vars, order, 2.0))
                    .sqrt()
                    .unwrap(),
            }
        }
    }

    #[test]
    fn finite_difference_oracle_on_random_expressions() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let h = 1e-5;
        for trial in 0..100 {
            let vars = rng.random_range(1..=3usize);
            let expr = Expr::random(&mut rng, 3, vars);
            let x: Vec<f64> = (0..vars).map(|_| rng.random_range(-0.5..0.5)).collect();
            let jet = expr.eval_jet(&x, 2);

            for v in 0..vars {
                let mut idx = vec![0usize; vars];
                idx[v] = 1;
                let d_jet = jet.extract_partial(&idx).unwrap();
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[v] += h;
                xm[v] -= h;
                let d_fd = (expr.eval_f64(&xp) - expr.eval_f64(&xm)) / (2.0 * h);
                assert!(
                    (d_jet - d_fd).abs() <= 1e-7,
                    "trial {trial}: first partial var {v}: jet {d_jet} vs fd {d_fd}"
                );

                idx[v] = 2;
                let d2_jet = jet.extract_partial(&idx).unwrap();
                // A raw second difference at step 1e-5 bottoms out near
                // 1e-5 in f64; differencing the first-derivative field
                // keeps the oracle at central-difference accuracy.
                let mut idx1 = vec![0usize; vars];
                idx1[v] = 1;
                let dp = expr.eval_jet(&xp, 1).extract_partial(&idx1).unwrap();
                let dm = expr.eval_jet(&xm, 1).extract_partial(&idx1).unwrap();
                let d2_fd = (dp - dm) / (2.0 * h);
                assert!(
                    (d2_jet - d2_fd).abs() <= 1e-7,
                    "trial {trial}: second partial var {v}: jet {d2_jet} vs fd {d2_fd}"
                );
                let d2_raw = (expr.eval_f64(&xp) - 2.0 * expr.eval_f64(&x) + expr.eval_f64(&xm))
                    / (h * h);
                assert!(
                    (d2_jet - d2_raw).abs() <= 1e-4,
                    "trial {trial}: raw second difference sanity, var {v}: jet {d2_jet} vs fd {d2_raw}"
                );
            }
        }
    }

    fn dyadic_jet_strategy() -> impl Strategy<Value = Jet> {
        proptest::collection::vec(-64i32..=64, 15)
            .prop_map(|v| {
                Jet::from_coeffs(2, 4, v.into_iter().map(|c| c as f64 / 8.0).collect()).unwrap()
            })
    }

    proptest! {
        #[test]
        fn mul_commutative_bit_exact(a in dyadic_jet_strategy(), b in dyadic_jet_strategy()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
        }

        #[test]
        fn mul_associative_on_dyadic_jets(
            a in dyadic_jet_strategy(),
            b in dyadic_jet_strategy(),
            c in dyadic_jet_strategy()
        ) {
            // dyadic coefficients keep every partial product exact, so
            // associativity holds bit-for-bit
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn add_mul_distribute_on_dyadic_jets(
            a in dyadic_jet_strategy(),
            b in dyadic_jet_strategy(),
            c in dyadic_jet_strategy()
        ) {
            prop_assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
        }
    }

    #[test]
    fn mul_commutative_on_float_jets() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a = Jet::from_coeffs(
                3,
                3,
                (0..20).map(|_| rng.random_range(-2.0..2.0)).collect(),
            )
            .unwrap();
            let b = Jet::from_coeffs(
                3,
                3,
                (0..20).map(|_| rng.random_range(-2.0..2.0)).collect(),
            )
            .unwrap();
            assert_eq!(a.mul(&b), b.mul(&a));
        }
    }

    #[test]
    fn jet_map_cross_matches_pointwise_cross() {
        use crate::cayley::cross;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u0 = [0.3, -0.2];
        let mk = |rng: &mut ChaCha8Rng| {
            JetMap7::from_fn(|_| {
                let a = Jet::variable(2, 2, 0, u0[0]);
                let b = Jet::variable(2, 2, 1, u0[1]);
                a.sin()
                    .mul(&b.cos())
                    .scale(rng.random_range(-1.0..1.0))
                    .add(&Jet::constant(2, 2, rng.random_range(-1.0..1.0)))
            })
        };
        let x = mk(&mut rng);
        let y = mk(&mut rng);
        let c = x.cross(&y);
        let expect = cross(&x.value(), &y.value());
        assert!(c.value().sub(&expect).norm() < 1e-14);

        // Leibniz: d(x×y) = dx×y + x×dy
        let lhs = c.partial(0).value();
        let rhs = cross(&x.partial(0).value(), &y.value())
            .add(&cross(&x.value(), &y.partial(0).value()));
        assert!(lhs.sub(&rhs).norm() < 1e-13, "leibniz holds for cross");
    }
}
