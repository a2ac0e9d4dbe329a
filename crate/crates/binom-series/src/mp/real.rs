//! `BigReal`: a precision-tagged arbitrary-precision real number.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Exponent, Radix, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::MpError;

pub const MIN_PRECISION: usize = 64;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Working precision in bits for a `digits`-digit decimal target:
/// `ceil(digits * log2(10)) + 64` guard bits.
pub fn prec_for_digits(digits: u32) -> usize {
    (digits as usize * 3322).div_ceil(1000) + 64
}

/// Arbitrary-precision real value tagged with its working precision in bits.
#[derive(Clone)]
pub struct BigReal {
    x: BigFloat,
    prec: usize,
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({} @{}b)", self.x, self.prec)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(self.prec * 301 / 1000))
    }
}

impl BigReal {
    fn wrap(x: BigFloat, prec: usize) -> Self {
        debug_assert!(!x.is_nan(), "unexpected NaN in BigReal");
        BigReal { x, prec }
    }

    pub fn zero(prec: usize) -> Self {
        Self::wrap(BigFloat::new(prec), prec)
    }

    pub fn from_u64(v: u64, prec: usize) -> Self {
        Self::wrap(BigFloat::from_u64(v, prec), prec)
    }

    pub fn from_i64(v: i64, prec: usize) -> Self {
        Self::wrap(BigFloat::from_i64(v, prec), prec)
    }

    pub fn from_bigint(n: &BigInt, prec: usize) -> Self {
        if n.is_zero() {
            return Self::zero(prec);
        }
        let mag = n.magnitude();
        let bits = mag.bits();
        let words = bits.div_ceil(64) as usize;
        let shifted = mag << (words as u64 * 64 - bits);
        let digits = shifted.to_u64_digits();
        let sign = if n.is_negative() { Sign::Neg } else { Sign::Pos };
        let mut f = BigFloat::from_words(&digits, sign, bits as Exponent);
        f.set_precision(prec.max(words * 64), RM)
            .expect("set_precision");
        if prec < words * 64 {
            f.set_precision(prec, RM).expect("set_precision");
        }
        Self::wrap(f, prec)
    }

    pub fn from_rational(r: &BigRational, prec: usize) -> Self {
        let num = Self::from_bigint(r.numer(), prec + 64);
        let den = Self::from_bigint(r.denom(), prec + 64);
        let q = num.x.div(&den.x, prec, RM);
        Self::wrap(q, prec)
    }

    /// Parses a signed decimal literal (plain or scientific notation).
    pub fn from_decimal(text: &str, prec: usize) -> Result<Self, MpError> {
        if prec < MIN_PRECISION {
            return Err(MpError::Precision(prec));
        }
        if !valid_decimal(text) {
            return Err(MpError::Parse(text.to_string()));
        }
        let f = with_consts(|cc| BigFloat::parse(text, Radix::Dec, prec, RM, cc));
        if f.is_nan() || f.is_inf() {
            return Err(MpError::Parse(text.to_string()));
        }
        Ok(Self::wrap(f, prec))
    }

    pub fn pi(prec: usize) -> Self {
        Self::wrap(with_consts(|cc| cc.pi(prec, RM)), prec)
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn with_prec(&self, prec: usize) -> Self {
        let mut x = self.x.clone();
        x.set_precision(prec, RM).expect("set_precision");
        Self::wrap(x, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.x.is_negative() && !self.x.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.x.is_positive() && !self.x.is_zero()
    }

    /// Binary exponent: value magnitude is in `[2^(e-1), 2^e)`. Zero gives `None`.
    pub fn exponent(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            self.x.exponent().map(|e| e as i64)
        }
    }

    /// Crude `f64` approximation (top mantissa word; enough for routing heuristics).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let Some((w, _, s, e, _)) = self.x.as_raw_parts() else {
            return f64::NAN;
        };
        let top = *w.last().unwrap() as f64 / (u64::MAX as f64 + 1.0);
        let v = top * 2f64.powi(e);
        if s == Sign::Neg {
            -v
        } else {
            v
        }
    }

    fn binop(&self, rhs: &Self, f: impl Fn(&BigFloat, &BigFloat, usize) -> BigFloat) -> Self {
        let p = self.prec.min(rhs.prec);
        Self::wrap(f(&self.x, &rhs.x, p), p)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.binop(rhs, |a, b, p| a.add(b, p, RM))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.binop(rhs, |a, b, p| a.sub(b, p, RM))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.binop(rhs, |a, b, p| a.mul(b, p, RM))
    }

    /// Division. Panics on a zero divisor; callers guard poles explicitly.
    pub fn div(&self, rhs: &Self) -> Self {
        assert!(!rhs.is_zero(), "BigReal::div by zero");
        self.binop(rhs, |a, b, p| a.div(b, p, RM))
    }

    pub fn mul_u64(&self, v: u64) -> Self {
        Self::wrap(self.x.mul(&BigFloat::from_u64(v, self.prec), self.prec, RM), self.prec)
    }

    pub fn div_u64(&self, v: u64) -> Self {
        assert!(v != 0, "BigReal::div_u64 by zero");
        Self::wrap(self.x.div(&BigFloat::from_u64(v, self.prec), self.prec, RM), self.prec)
    }

    pub fn neg(&self) -> Self {
        let mut x = self.x.clone();
        x.inv_sign();
        Self::wrap(x, self.prec)
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.x.abs(), self.prec)
    }

    pub fn sqr(&self) -> Self {
        self.mul(self)
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "BigReal::recip of zero");
        Self::wrap(self.x.reciprocal(self.prec, RM), self.prec)
    }

    pub fn powi(&self, n: i64) -> Self {
        if n == 0 {
            return Self::from_u64(1, self.prec);
        }
        let p = self.prec;
        let base = self.x.powi(n.unsigned_abs() as usize, p, RM);
        let v = Self::wrap(base, p);
        if n < 0 {
            v.recip()
        } else {
            v
        }
    }

    /// 10^k as an exact power, any sign of `k`.
    pub fn pow10(k: i64, prec: usize) -> Self {
        Self::from_u64(10, prec).powi(k)
    }

    pub fn sqrt(&self) -> Result<Self, MpError> {
        if self.is_negative() {
            return Err(MpError::Domain { func: "sqrt", detail: "negative argument".into() });
        }
        Ok(Self::wrap(self.x.sqrt(self.prec, RM), self.prec))
    }

    pub fn ln(&self) -> Result<Self, MpError> {
        if self.is_zero() || self.is_negative() {
            let d = if self.is_zero() { "zero argument" } else { "negative argument" };
            return Err(MpError::Domain { func: "ln", detail: d.into() });
        }
        Ok(Self::wrap(with_consts(|cc| self.x.ln(self.prec, RM, cc)), self.prec))
    }

    pub fn exp(&self) -> Result<Self, MpError> {
        let r = with_consts(|cc| self.x.exp(self.prec, RM, cc));
        if r.is_inf() {
            return Err(MpError::NonFinite("exp"));
        }
        Ok(Self::wrap(r, self.prec))
    }

    pub fn atan(&self) -> Result<Self, MpError> {
        Ok(Self::wrap(with_consts(|cc| self.x.atan(self.prec, RM, cc)), self.prec))
    }

    pub fn atanh(&self) -> Result<Self, MpError> {
        let one = BigFloat::from_u64(1, self.prec);
        if self.x.abs().cmp(&one) != Some(-1) {
            let sign = if self.is_negative() { "negative" } else { "positive" };
            return Err(MpError::Domain {
                func: "atanh",
                detail: format!("|argument| >= 1 ({sign} argument)"),
            });
        }
        Ok(Self::wrap(with_consts(|cc| self.x.atanh(self.prec, RM, cc)), self.prec))
    }

    /// `acot(a) = pi/2 - atan(a)`, an independent route from `atan(1/a)`.
    pub fn acot(&self) -> Result<Self, MpError> {
        let half_pi = Self::pi(self.prec + 8).div_u64(2);
        Ok(half_pi.sub(&self.atan()?).with_prec(self.prec))
    }

    pub fn tan(&self) -> Result<Self, MpError> {
        let r = with_consts(|cc| self.x.tan(self.prec, RM, cc));
        if r.is_inf() || r.is_nan() {
            return Err(MpError::NonFinite("tan"));
        }
        Ok(Self::wrap(r, self.prec))
    }

    pub fn cmp(&self, rhs: &Self) -> Ordering {
        match self.x.cmp(&rhs.x) {
            Some(v) if v < 0 => Ordering::Less,
            Some(v) if v > 0 => Ordering::Greater,
            _ => Ordering::Equal,
        }
    }

    pub fn abs_diff(&self, rhs: &Self) -> Self {
        self.sub(rhs).abs()
    }

    /// Units in the last place of `self` at its precision; zero has no ulp.
    pub fn ulp(&self) -> Option<Self> {
        let e = self.exponent()?;
        let p = self.prec;
        let one = BigFloat::from_u64(1, p);
        let mut u = one;
        u.set_exponent((e - p as i64 + 1) as Exponent);
        Some(Self::wrap(u, p))
    }

    /// Decimal string with `digits` significant digits, scientific notation.
    pub fn to_decimal(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return "0".into();
        }
        let (sign, mut ds, mut e10) = with_consts(|cc| self.x.convert_to_radix(Radix::Dec, RM, cc))
            .expect("decimal conversion");
        // value = 0.d0 d1 d2 ... * 10^e10
        if ds.is_empty() {
            return "0".into();
        }
        if ds.len() > digits {
            // round half-up at the cut
            let carry = ds[digits] >= 5;
            ds.truncate(digits);
            if carry {
                let mut i = digits;
                loop {
                    if i == 0 {
                        ds.insert(0, 1);
                        e10 += 1;
                        break;
                    }
                    i -= 1;
                    if ds[i] == 9 {
                        ds[i] = 0;
                    } else {
                        ds[i] += 1;
                        break;
                    }
                }
            }
        }
        while ds.len() > 1 && *ds.last().unwrap() == 0 {
            ds.pop();
        }
        let mut out = String::new();
        if sign == Sign::Neg {
            out.push('-');
        }
        out.push((b'0' + ds[0]) as char);
        if ds.len() > 1 {
            out.push('.');
            for d in &ds[1..] {
                out.push((b'0' + d) as char);
            }
        }
        let ex = e10 - 1;
        if ex != 0 {
            out.push('e');
            out.push_str(&ex.to_string());
        }
        out
    }
}

fn valid_decimal(text: &str) -> bool {
    let t = text.trim();
    let t = t.strip_prefix(['+', '-']).unwrap_or(t);
    let (mant, exp) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, Some(e)),
        None => (t, None),
    };
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (mant, None),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let mant_ok = match frac_part {
        Some(f) => (digits(int_part) && (f.is_empty() || digits(f))) || (int_part.is_empty() && digits(f)),
        None => digits(int_part),
    };
    let exp_ok = match exp {
        Some(e) => {
            let e = e.strip_prefix(['+', '-']).unwrap_or(e);
            digits(e)
        }
        None => true,
    };
    mant_ok && exp_ok
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Function tags for the dispatch-style entry point used by the evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealFn {
    Sqrt,
    Ln,
    Atan,
    Atanh,
    Acot,
    Exp,
    Sqr,
}

pub fn real_fn(tag: RealFn, a: &BigReal) -> Result<BigReal, MpError> {
    match tag {
        RealFn::Sqrt => a.sqrt(),
        RealFn::Ln => a.ln(),
        RealFn::Atan => a.atan(),
        RealFn::Atanh => a.atanh(),
        RealFn::Acot => a.acot(),
        RealFn::Exp => a.exp(),
        RealFn::Sqr => Ok(a.sqr()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dec(s: &str, p: usize) -> BigReal {
        BigReal::from_decimal(s, p).unwrap()
    }

    #[test]
    fn dyadic_literal_is_exact() {
        let h = dec("0.5", 128);
        assert_eq!(h, BigReal::from_u64(1, 128).div_u64(2));
    }

    #[test]
    fn integer_literal_is_exact() {
        assert_eq!(dec("-3", 64), BigReal::from_i64(-3, 64));
    }

    #[test]
    fn decimal_literal_within_ulp() {
        let x = dec("0.84660943", 128);
        let lo = dec("0.846609429999999999999999", 192);
        let hi = dec("0.846609430000000000000001", 192);
        assert!(x.cmp(&lo) == Ordering::Greater && x.cmp(&hi) == Ordering::Less);
    }

    #[test]
    fn malformed_literals_rejected() {
        for bad in ["", "abc", "1.2.3", "--4", "1e", "4*i"] {
            assert!(BigReal::from_decimal(bad, 128).is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn atan_one_is_quarter_pi() {
        let p = 256;
        let v = BigReal::from_u64(1, p).atan().unwrap().mul_u64(4);
        assert_eq!(v, BigReal::pi(p));
    }

    #[test]
    fn atan_of_two_minus_sqrt3_is_pi_over_12() {
        let p = 256;
        let arg = BigReal::from_u64(2, p).sub(&BigReal::from_u64(3, p).sqrt().unwrap());
        let v = arg.atan().unwrap();
        let expect = BigReal::pi(p).div_u64(12);
        let diff = v.abs_diff(&expect);
        assert!(diff <= expect.ulp().unwrap().mul_u64(4), "diff {diff:?}");
    }

    #[test]
    fn atanh_half_is_half_ln3() {
        let p = 256;
        let v = dec("0.5", p).atanh().unwrap();
        let expect = BigReal::from_u64(3, p).ln().unwrap().div_u64(2);
        assert!(v.abs_diff(&expect) <= expect.ulp().unwrap().mul_u64(4));
    }

    #[test]
    fn domain_errors_name_function_and_sign() {
        let p = 128;
        let e = BigReal::from_i64(-2, p).sqrt().unwrap_err();
        assert!(matches!(e, MpError::Domain { func: "sqrt", .. }));
        assert!(e.to_string().contains("negative"));
        let e = BigReal::from_i64(2, p).atanh().unwrap_err();
        assert!(e.to_string().contains("atanh"));
        assert!(BigReal::zero(p).ln().is_err());
    }

    #[test]
    fn acot_matches_atan_reciprocal_within_4_ulp() {
        for (num, den, p) in [(7u64, 3u64, 128usize), (1, 2, 256), (lucky(), 1, 320)] {
            let a = BigReal::from_u64(num, p).div_u64(den);
            let lhs = a.acot().unwrap();
            let rhs = a.recip().atan().unwrap();
            let tol = lhs.ulp().unwrap().mul_u64(4);
            assert!(lhs.abs_diff(&rhs) <= tol, "acot mismatch at {num}/{den}");
        }
    }

    fn lucky() -> u64 {
        41
    }

    #[test]
    fn bigint_conversion_exact() {
        use num_bigint::BigInt;
        use std::str::FromStr;
        let n = BigInt::from_str("123456789012345678901234567890123456789").unwrap();
        let f = BigReal::from_bigint(&n, 256);
        let g = dec("123456789012345678901234567890123456789", 256);
        assert_eq!(f, g);
        assert_eq!(BigReal::from_bigint(&BigInt::from(-42), 64), BigReal::from_i64(-42, 64));
    }

    #[test]
    fn decimal_output_roundtrip() {
        let p = 256;
        let pi = BigReal::pi(p);
        let s = pi.to_decimal(50);
        assert!(s.starts_with("3.14159265358979323846264338327950288419716939937510"[..20].trim_end()));
        let back = BigReal::from_decimal(&s, p).unwrap();
        assert!(pi.abs_diff(&back) < BigReal::pow10(-48, p));
        assert_eq!(BigReal::zero(p).to_decimal(10), "0");
        let tiny = BigReal::pow10(-55, p);
        assert_eq!(tiny.to_decimal(3), "1e-55");
    }

    #[test]
    fn min_precision_propagates() {
        let a = BigReal::from_u64(7, 128);
        let b = BigReal::from_u64(11, 512);
        assert_eq!(a.div(&b).prec(), 128);
        assert_eq!(b.mul(&a).prec(), 128);
    }
}
