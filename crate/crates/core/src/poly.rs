//! Integer Laurent polynomials in `a` and flat-eight-graded polynomial
//! vectors, with exact arbitrary-precision arithmetic.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::classify::ComponentCensus;

/// Finitely supported map exponent -> coefficient; zero coefficients are
/// never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(1, 0)
    }

    pub fn monomial(coeff: impl Into<BigInt>, exp: i64) -> Self {
        let mut p = LaurentPoly::default();
        p.add_term(coeff.into(), exp);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn add_term(&mut self, coeff: BigInt, exp: i64) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn pow(&self, n: u32) -> LaurentPoly {
        let mut acc = LaurentPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(c.clone(), e);
        }
        out
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in rhs.terms() {
                out.add_term(c1 * c2, e1 + e2);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e, c) in self.terms() {
            out.add_term(-c.clone(), e);
        }
        out
    }
}

impl From<i64> for LaurentPoly {
    fn from(n: i64) -> Self {
        LaurentPoly::monomial(n, 0)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (exp, coeff)) in self.terms().enumerate() {
            let mag = coeff.abs();
            if i == 0 {
                if coeff.is_negative() {
                    write!(f, "-")?;
                }
            } else if coeff.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if exp == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "a^{exp}")?;
            } else {
                write!(f, "{mag}*a^{exp}")?;
            }
        }
        Ok(())
    }
}

/// The value of an extra trivial circle: delta = -a^2 - a^-2.
pub fn loop_factor() -> LaurentPoly {
    let mut p = LaurentPoly::zero();
    p.add_term(BigInt::from(-1), 2);
    p.add_term(BigInt::from(-1), -2);
    p
}

/// (-a)^(-3w) = (-1)^w a^(-3w).
pub fn writhe_prefactor(w: i64) -> LaurentPoly {
    let sign = if w.rem_euclid(2) == 0 { 1 } else { -1 };
    LaurentPoly::monomial(sign, -3 * w)
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("empty census: no components to normalize")]
pub struct EmptyCensus;

/// Evaluate the semi-trivial class O^t ⊔ eight^e: trivial circles collapse
/// through the loop factor (with the unknot normalized to 1) and the eight
/// cluster stays as the formal grading key.
pub fn normalize_census(c: ComponentCensus) -> Result<FlatValue, EmptyCensus> {
    if c.t == 0 && c.e == 0 {
        return Err(EmptyCensus);
    }
    let delta = loop_factor();
    let (key, power) = if c.e == 0 { (0, c.t - 1) } else { (c.e, c.t) };
    Ok(FlatValue::single(u64::from(key), delta.pow(power)))
}

/// Finitely supported map from flat-eight multiplicity e >= 0 to a Laurent
/// polynomial; zero polynomials are never stored. The empty map is 0.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FlatValue {
    entries: BTreeMap<u64, LaurentPoly>,
}

impl FlatValue {
    pub fn zero() -> Self {
        FlatValue::default()
    }

    pub fn single(e: u64, poly: LaurentPoly) -> Self {
        let mut v = FlatValue::default();
        v.add_at(e, &poly);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn at(&self, e: u64) -> LaurentPoly {
        self.entries.get(&e).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (u64, &LaurentPoly)> {
        self.entries.iter().map(|(&e, p)| (e, p))
    }

    pub fn add_at(&mut self, e: u64, poly: &LaurentPoly) {
        if poly.is_zero() {
            return;
        }
        match self.entries.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(poly.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = &*o.get() + poly;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, rhs: &FlatValue) -> FlatValue {
        let mut out = self.clone();
        for (e, p) in rhs.entries() {
            out.add_at(e, p);
        }
        out
    }

    pub fn scale(&self, by: &LaurentPoly) -> FlatValue {
        let mut out = FlatValue::zero();
        for (e, p) in self.entries() {
            out.add_at(e, &(p * by));
        }
        out
    }

    /// Text rendering: one `E^<e>: <poly>` line per grade, e ascending.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.entries()
            .map(|(e, p)| format!("E^{e}: {p}"))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// JSON rendering: `{"e": {"k": c}}` with string keys.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{");
        for (i, (e, p)) in self.entries().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("\"{e}\":{{"));
            for (j, (exp, coeff)) in p.terms().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&format!("\"{exp}\":{coeff}"));
            }
            out.push('}');
        }
        out.push('}');
        out
    }

    pub fn from_json(text: &str) -> Result<FlatValue, FlatValueJsonError> {
        use serde_json::Value;
        let value: Value =
            serde_json::from_str(text).map_err(|e| FlatValueJsonError(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| FlatValueJsonError("expected an object".into()))?;
        let mut out = FlatValue::zero();
        for (ek, pv) in obj {
            let e: u64 = ek
                .parse()
                .map_err(|_| FlatValueJsonError(format!("bad grade key `{ek}`")))?;
            let terms = pv
                .as_object()
                .ok_or_else(|| FlatValueJsonError("expected a polynomial object".into()))?;
            let mut poly = LaurentPoly::zero();
            for (kk, cv) in terms {
                let exp: i64 = kk
                    .parse()
                    .map_err(|_| FlatValueJsonError(format!("bad exponent key `{kk}`")))?;
                let num = match cv {
                    Value::Number(n) => n.to_string(),
                    _ => return Err(FlatValueJsonError("coefficient must be a number".into())),
                };
                let coeff: BigInt = num
                    .parse()
                    .map_err(|_| FlatValueJsonError(format!("bad coefficient `{num}`")))?;
                poly.add_term(coeff, exp);
            }
            out.add_at(e, &poly);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("flat value json: {0}")]
pub struct FlatValueJsonError(pub String);

impl fmt::Display for FlatValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn census(t: u32, e: u32) -> ComponentCensus {
        ComponentCensus { t, e }
    }

    #[test]
    fn loop_factor_values() {
        let d = loop_factor();
        assert_eq!(d.coeff(2), BigInt::from(-1));
        assert_eq!(d.coeff(-2), BigInt::from(-1));
        assert_eq!(d.coeff(0), BigInt::from(0));
    }

    #[test]
    fn delta_squared() {
        let d = loop_factor();
        let expected = {
            let mut p = LaurentPoly::monomial(1, 4);
            p.add_term(BigInt::from(2), 0);
            p.add_term(BigInt::from(1), -4);
            p
        };
        assert_eq!(&d * &d, expected);
    }

    #[test]
    fn normalize_examples() {
        let d = loop_factor();
        assert_eq!(
            normalize_census(census(2, 1)).unwrap(),
            FlatValue::single(1, &d * &d)
        );
        assert_eq!(
            normalize_census(census(3, 0)).unwrap(),
            FlatValue::single(0, &d * &d)
        );
        assert_eq!(
            normalize_census(census(1, 0)).unwrap(),
            FlatValue::single(0, LaurentPoly::one())
        );
        assert_eq!(normalize_census(census(0, 0)), Err(EmptyCensus));
    }

    #[test]
    fn normalize_delta_recursion() {
        let d = loop_factor();
        for e in 0..4u32 {
            let t_min = if e == 0 { 1 } else { 0 };
            for t in t_min..t_min + 5 {
                let lo = normalize_census(census(t, e)).unwrap();
                let hi = normalize_census(census(t + 1, e)).unwrap();
                assert_eq!(hi, lo.scale(&d));
            }
        }
        assert_eq!(
            normalize_census(census(1, 0)).unwrap(),
            FlatValue::single(0, LaurentPoly::one())
        );
    }

    #[test]
    fn prefactor_values() {
        assert_eq!(writhe_prefactor(0), LaurentPoly::one());
        assert_eq!(writhe_prefactor(1), LaurentPoly::monomial(-1, -3));
        assert_eq!(writhe_prefactor(-4), LaurentPoly::monomial(1, 12));
    }

    #[test]
    fn flat_value_add_scale() {
        let one = FlatValue::single(0, LaurentPoly::one());
        let minus = FlatValue::single(0, LaurentPoly::monomial(-1, 0));
        assert!(one.add(&minus).is_zero());

        let d2 = loop_factor().pow(2);
        let scaled = FlatValue::single(1, d2.clone()).scale(&LaurentPoly::monomial(1, 3));
        assert_eq!(scaled, FlatValue::single(1, &d2 * &LaurentPoly::monomial(1, 3)));

        let both = FlatValue::single(1, loop_factor()).add(&FlatValue::single(2, LaurentPoly::one()));
        assert_eq!(both.entries().count(), 2);
    }

    #[test]
    fn render_examples() {
        assert_eq!(FlatValue::single(0, LaurentPoly::one()).to_text(), "E^0: 1");
        assert_eq!(
            FlatValue::single(1, loop_factor().pow(2)).to_text(),
            "E^1: a^-4 + 2 + a^4"
        );
        assert_eq!(FlatValue::zero().to_text(), "0");
        assert_eq!(
            FlatValue::single(0, loop_factor()).to_text(),
            "E^0: -a^-2 - a^2"
        );
        assert_eq!(format!("{}", writhe_prefactor(1)), "-a^-3");
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec((-6i64..=6, -9i64..=9), 0..6).prop_map(|terms| {
            let mut p = LaurentPoly::zero();
            for (e, c) in terms {
                p.add_term(BigInt::from(c), e);
            }
            p
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn json_round_trip(a in arb_poly(), b in arb_poly(), e1 in 0u64..4, e2 in 0u64..4) {
            let mut v = FlatValue::zero();
            v.add_at(e1, &a);
            v.add_at(e2, &b);
            let back = FlatValue::from_json(&v.to_json()).unwrap();
            prop_assert_eq!(back, v);
        }
    }
}
