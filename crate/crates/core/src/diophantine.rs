//! Membership in 𝒟 = {β ∉ ℚ : ∀b > 1, |β − p/q| < b^{−q} for infinitely many p/q}.
//!
//! Reals are described by finite certificates. Distances ⟨βn⟩ to the nearest
//! integer are computed from exact rational approximations with a rigorous
//! error bound; floats are only used for the final logarithms.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;

/// Quotients with more decimal digits than this are only known by a lower bound.
const MAX_QUOTIENT_DIGITS: u64 = 4000;
/// Relative accuracy required of each ⟨βn⟩.
const DIST_REL_TOL: f64 = 1e-9;

/// (a + b√d)/c with d > 1 not a perfect square and b, c ≠ 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticSurd {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl QuadraticSurd {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        if b.is_zero() || c.is_zero() {
            return Err(Error::InvalidArgument("quadratic surd needs b ≠ 0 and c ≠ 0".into()));
        }
        if d <= BigInt::one() || d.sqrt().pow(2) == d {
            return Err(Error::InvalidArgument(format!("{d} must be a positive non-square")));
        }
        let g = a.gcd(&b).gcd(&c);
        let sign = if c.is_negative() { -BigInt::one() } else { BigInt::one() };
        let g = g * sign;
        Ok(QuadraticSurd { a: &a / &g, b: &b / &g, c: &c / &g, d })
    }

    /// (P + √D)/Q with Q | D − P².
    fn pqd(&self) -> (BigInt, BigInt, BigInt) {
        let dd = &self.b * &self.b * &self.d;
        let (mut p, mut q) = if self.b.is_positive() { (self.a.clone(), self.c.clone()) } else { (-&self.a, -&self.c) };
        let mut dd = dd;
        if !((&dd - &p * &p) % &q).is_zero() {
            let aq = q.abs();
            p *= &aq;
            dd *= &q * &q;
            q *= &aq;
        }
        (p, q, dd)
    }
}

/// Partial quotients a_1, a_2, … after the head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CfTail {
    /// The expansion stops after the head.
    Finite,
    /// The block repeats forever.
    Periodic(Vec<u64>),
    /// a_j = (j−1)^m · base^{(j−1)^e · q_{j−1}} for every index j past the head.
    SuperLiouville { base: u32, e: u32, m: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfCertificate {
    /// a_0, a_1, … given explicitly (a_j ≥ 1 for j ≥ 1).
    pub head: Vec<BigInt>,
    pub tail: CfTail,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RealCertificate {
    Rational(BigRational),
    Quadratic(QuadraticSurd),
    ContinuedFraction(CfCertificate),
    /// (m₀β + m₁)/(m₂β + m₃) with integer entries and m₀m₃ − m₁m₂ ≠ 0.
    Mobius { base: Box<RealCertificate>, m: [BigInt; 4] },
    /// A float known to relative precision `precision`.
    Float { value: f64, precision: f64 },
}

impl RealCertificate {
    pub fn rational(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(RealCertificate::Rational(BigRational::new(p.into(), q.into())))
    }

    pub fn golden_ratio() -> Self {
        RealCertificate::Quadratic(QuadraticSurd::new(1.into(), 1.into(), 2.into(), 5.into()).expect("valid surd"))
    }

    pub fn periodic(head: &[i64], period: &[u64]) -> Result<Self> {
        if period.is_empty() || period.contains(&0) || head.is_empty() || head[1..].iter().any(|&a| a < 1) {
            return Err(Error::InvalidArgument("partial quotients after a₀ must be positive".into()));
        }
        Ok(RealCertificate::ContinuedFraction(CfCertificate {
            head: head.iter().map(|&a| a.into()).collect(),
            tail: CfTail::Periodic(period.to_vec()),
        }))
    }

    /// [0; 1, a_2, a_3, …] with a_{k+1} = 10^{k·q_k}.
    pub fn super_liouville() -> Self {
        RealCertificate::ContinuedFraction(CfCertificate {
            head: vec![0.into(), 1.into()],
            tail: CfTail::SuperLiouville { base: 10, e: 1, m: 0 },
        })
    }

    pub fn is_rational(&self) -> bool {
        match self {
            RealCertificate::Rational(_) => true,
            RealCertificate::ContinuedFraction(c) => c.tail == CfTail::Finite,
            RealCertificate::Mobius { base, .. } => base.is_rational(),
            _ => false,
        }
    }
}

/// One partial quotient, or a lower bound when it is too large to write out.
#[derive(Debug, Clone)]
enum Quotient {
    Exact(BigInt),
    AtLeast(BigInt),
}

fn ten_pow(n: u64) -> BigInt {
    num_traits::pow(BigInt::from(10), n as usize)
}

fn pow_big(base: u32, exp: &BigInt) -> Option<BigInt> {
    let digits = exp.to_f64()? * (base as f64).log10();
    if digits > MAX_QUOTIENT_DIGITS as f64 {
        return None;
    }
    Some(num_traits::pow(BigInt::from(base), exp.to_usize()?))
}

enum Source {
    Rat { num: BigInt, den: BigInt },
    Quad { p: BigInt, q: BigInt, d: BigInt, s: BigInt },
    Cf { cert: CfCertificate, pos: usize },
}

/// Partial quotients together with the convergents p_j/q_j they generate.
struct Expansion {
    source: Source,
    j: usize,
    p: (BigInt, BigInt),
    q: (BigInt, BigInt),
    done: bool,
}

impl Expansion {
    fn new(source: Source) -> Self {
        Expansion { source, j: 0, p: (BigInt::one(), BigInt::zero()), q: (BigInt::zero(), BigInt::one()), done: false }
    }

    fn of(cert: &RealCertificate) -> Option<Self> {
        let src = match cert {
            RealCertificate::Rational(r) => Source::Rat { num: r.numer().clone(), den: r.denom().clone() },
            RealCertificate::Quadratic(s) => {
                let (p, q, d) = s.pqd();
                let sq = d.sqrt();
                Source::Quad { p, q, d, s: sq }
            }
            RealCertificate::ContinuedFraction(c) => Source::Cf { cert: c.clone(), pos: 0 },
            _ => return None,
        };
        Some(Expansion::new(src))
    }

    /// Current convergent (p_j, q_j) after at least one quotient.
    fn convergent(&self) -> (BigInt, BigInt) {
        (self.p.0.clone(), self.q.0.clone())
    }

    fn push(&mut self, a: &BigInt) {
        let p = a * &self.p.0 + &self.p.1;
        let q = a * &self.q.0 + &self.q.1;
        self.p.1 = std::mem::replace(&mut self.p.0, p);
        self.q.1 = std::mem::replace(&mut self.q.0, q);
        self.j += 1;
    }

    /// Next quotient; exact quotients are consumed into the convergents.
    fn next(&mut self) -> Option<Quotient> {
        if self.done {
            return None;
        }
        let out = match &mut self.source {
            Source::Rat { num, den } => {
                if den.is_zero() {
                    None
                } else {
                    let a = num.div_floor(den);
                    let r = &*num - &a * &*den;
                    *num = std::mem::replace(den, r);
                    Some(Quotient::Exact(a))
                }
            }
            Source::Quad { p, q, d, s } => {
                let top = if q.is_positive() { &*p + &*s } else { &*p + &*s + 1 };
                let a = top.div_floor(q);
                let np = &a * &*q - &*p;
                let nq = (&*d - &np * &np) / &*q;
                *p = np;
                *q = nq;
                Some(Quotient::Exact(a))
            }
            Source::Cf { cert, pos } => {
                let j = self.j;
                if j < cert.head.len() {
                    Some(Quotient::Exact(cert.head[j].clone()))
                } else {
                    match &cert.tail {
                        CfTail::Finite => None,
                        CfTail::Periodic(block) => {
                            let a = block[*pos % block.len()];
                            *pos += 1;
                            Some(Quotient::Exact(a.into()))
                        }
                        CfTail::SuperLiouville { base, e, m } => {
                            let k = BigInt::from(j - 1);
                            let exp = num_traits::pow(k.clone(), *e as usize) * &self.q.0;
                            let mult = num_traits::pow(k, *m as usize);
                            match pow_big(*base, &exp) {
                                Some(v) => Some(Quotient::Exact(mult * v)),
                                None => Some(Quotient::AtLeast(ten_pow(MAX_QUOTIENT_DIGITS))),
                            }
                        }
                    }
                }
            }
        };
        match &out {
            Some(Quotient::Exact(a)) => {
                let a = a.clone();
                self.push(&a);
            }
            _ => self.done = true,
        }
        out
    }
}

/// |β − r| ≤ err.
#[derive(Debug, Clone)]
pub struct Approx {
    pub r: BigRational,
    pub err: BigRational,
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn rat_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidArgument(format!("{x} is not finite")))
}

/// Rational approximation with error at most `tol` (floats stop at their precision).
pub fn approx(cert: &RealCertificate, tol: &BigRational) -> Result<Approx> {
    match cert {
        RealCertificate::Rational(r) => Ok(Approx { r: r.clone(), err: BigRational::zero() }),
        RealCertificate::Float { value, precision } => {
            let r = rat_from_f64(*value)?;
            let err = rat_from_f64(value.abs() * precision)? + rat_from_f64(f64::MIN_POSITIVE)?;
            Ok(Approx { r, err })
        }
        RealCertificate::Mobius { base, m } => {
            let mut base_tol = tol.clone();
            let mut prev_err: Option<BigRational> = None;
            for _ in 0..200 {
                let a = approx(base, &base_tol)?;
                let stalled = prev_err.as_ref().is_some_and(|p| a.err >= *p);
                prev_err = Some(a.err.clone());
                let num = BigRational::from_integer(m[0].clone()) * &a.r + BigRational::from_integer(m[1].clone());
                let den = BigRational::from_integer(m[2].clone()) * &a.r + BigRational::from_integer(m[3].clone());
                let slack = den.abs() - BigRational::from_integer(m[2].abs()) * &a.err;
                if slack.is_positive() {
                    let det = (&m[0] * &m[3] - &m[1] * &m[2]).abs();
                    let err = BigRational::from_integer(det) * &a.err / (den.abs() * &slack);
                    if err <= *tol || a.err.is_zero() || stalled || matches!(**base, RealCertificate::Float { .. }) {
                        return Ok(Approx { r: num / den, err });
                    }
                    let shrink = (&err / tol).ceil() * BigRational::from_integer(big(4));
                    base_tol = &a.err / shrink;
                } else if stalled || matches!(**base, RealCertificate::Float { .. }) {
                    return Err(Error::InconclusivePrecision("Möbius pole within available precision".into()));
                } else {
                    base_tol = &a.err / BigRational::from_integer(big(1 << 20));
                }
            }
            Err(Error::InconclusivePrecision("Möbius image too close to a pole".into()))
        }
        _ => {
            let mut ex = Expansion::of(cert).expect("exact certificate");
            let Some(Quotient::Exact(_)) = ex.next() else {
                return Err(Error::InvalidArgument("empty continued fraction".into()));
            };
            loop {
                let (p, q) = ex.convergent();
                let here = BigRational::new(p, q.clone());
                match ex.next() {
                    None => return Ok(Approx { r: here, err: BigRational::zero() }),
                    Some(Quotient::AtLeast(l)) => {
                        let err = BigRational::new(BigInt::one(), l * &q * &q);
                        return Ok(Approx { r: here, err });
                    }
                    Some(Quotient::Exact(_)) => {
                        let err = BigRational::new(BigInt::one(), q * &ex.q.0);
                        if err <= *tol {
                            return Ok(Approx { r: here, err });
                        }
                    }
                }
            }
        }
    }
}

/// Partial quotients shared by every real in [lo, hi].
fn interval_quotients(mut lo: BigRational, mut hi: BigRational, count: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    while out.len() < count {
        let (a, b) = (lo.floor(), hi.floor());
        if a != b {
            break;
        }
        out.push(a.to_integer());
        let (fl, fh) = (&lo - &a, &hi - &b);
        if fl.is_zero() || fh.is_zero() {
            break;
        }
        let nlo = fh.recip();
        hi = fl.recip();
        lo = nlo;
    }
    out
}

/// Quotients up to `count`; the flag reports a natural end (β rational) or,
/// with `huge`, an unmaterialized quotient beyond [`MAX_QUOTIENT_DIGITS`].
fn quotients_partial(cert: &RealCertificate, count: usize) -> Result<(Vec<BigInt>, bool, bool)> {
    if let Some(mut ex) = Expansion::of(cert) {
        let mut out = Vec::new();
        while out.len() < count {
            match ex.next() {
                Some(Quotient::Exact(a)) => out.push(a),
                Some(Quotient::AtLeast(_)) => return Ok((out, false, true)),
                None => return Ok((out, true, false)),
            }
        }
        return Ok((out, false, false));
    }
    if cert.is_rational() {
        let a = approx(cert, &BigRational::zero())?;
        return quotients_partial(&RealCertificate::Rational(a.r), count);
    }
    let mut tol = BigRational::new(BigInt::one(), ten_pow(20));
    let mut prev_err: Option<BigRational> = None;
    for _ in 0..40 {
        let a = approx(cert, &tol)?;
        let qs = interval_quotients(&a.r - &a.err, &a.r + &a.err, count);
        if qs.len() >= count {
            return Ok((qs, false, false));
        }
        if matches!(cert, RealCertificate::Float { .. }) {
            return Err(Error::InconclusivePrecision(format!(
                "precision supports only {} partial quotients",
                qs.len()
            )));
        }
        if prev_err.as_ref().is_some_and(|p| a.err >= *p) {
            return Ok((qs, false, true));
        }
        tol = &a.err * &a.err;
        prev_err = Some(a.err);
    }
    Err(Error::InconclusivePrecision("could not resolve partial quotients".into()))
}

fn quotients(cert: &RealCertificate, count: usize) -> Result<(Vec<BigInt>, bool)> {
    let (out, terminated, huge) = quotients_partial(cert, count)?;
    if huge && out.len() < count {
        return Err(Error::InconclusivePrecision(format!(
            "partial quotient {} is beyond the materializable range",
            out.len()
        )));
    }
    Ok((out, terminated))
}

/// First `n` convergents p_k/q_k (fewer when β is rational).
pub fn convergents(cert: &RealCertificate, n: usize) -> Result<Vec<(BigInt, BigInt)>> {
    let (qs, _) = quotients(cert, n)?;
    let mut ex = Expansion::new(Source::Rat { num: BigInt::zero(), den: BigInt::zero() });
    Ok(qs
        .iter()
        .map(|a| {
            ex.push(a);
            ex.convergent()
        })
        .collect())
}

/// Convergents with q ≤ q_max.
fn convergents_up_to(cert: &RealCertificate, q_max: &BigInt) -> Result<Vec<(BigInt, BigInt)>> {
    let mut n = 16;
    loop {
        let (qs, terminated, huge) = quotients_partial(cert, n)?;
        let mut ex = Expansion::new(Source::Rat { num: BigInt::zero(), den: BigInt::zero() });
        let mut out = Vec::new();
        for a in &qs {
            ex.push(a);
            let (p, q) = ex.convergent();
            if &q > q_max {
                return Ok(out);
            }
            out.push((p, q));
        }
        if terminated || huge || qs.len() < n {
            return Ok(out);
        }
        n *= 2;
    }
}

/// Distances ⟨βn⟩ for n = 1..=count, each with relative accuracy [`DIST_REL_TOL`].
/// Exact zeros (β rational) are returned as 0.
pub fn distances(cert: &RealCertificate, count: u64) -> Result<Vec<f64>> {
    let mut tol = BigRational::new(BigInt::one(), ten_pow(40));
    for _ in 0..12 {
        let a = approx(cert, &tol)?;
        let (p, q) = (a.r.numer().clone(), a.r.denom().clone());
        let err = a.err.to_f64().unwrap_or(f64::INFINITY);
        let mut out = Vec::with_capacity(count as usize);
        let mut ok = true;
        for n in 1..=count {
            let t = (&p * n).mod_floor(&q);
            let other = &q - &t;
            let num = if t < other { t } else { other };
            let d = BigRational::new(num, q.clone()).to_f64().unwrap_or(0.0);
            let slack = n as f64 * err;
            if slack > DIST_REL_TOL * d || (d == 0.0 && err > 0.0) {
                ok = false;
                break;
            }
            out.push(d);
        }
        if ok {
            return Ok(out);
        }
        if matches!(cert, RealCertificate::Float { .. }) || a.err.is_zero() {
            break;
        }
        tol = &a.err * &a.err;
    }
    Err(Error::InconclusivePrecision("⟨βn⟩ not resolved at the available precision".into()))
}

/// log(1/|sin(πd)|) for the distance d = ⟨βn⟩; None at exact zeros.
fn log_inv_sin(d: f64) -> Option<f64> {
    if d == 0.0 {
        None
    } else {
        Some(-(std::f64::consts::PI * d).sin().ln())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ProfileEntry {
    pub n: u64,
    pub distance: f64,
    /// log(1/|sin(πβn)|)/n, the scale of the bound 1/|sin| ≤ Aⁿ.
    pub per_n: Option<f64>,
    /// log(1/|sin(πβn)|)/log n (n ≥ 2).
    pub per_log_n: Option<f64>,
    pub running_max_per_n: f64,
    pub running_max_per_log_n: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SinGrowthProfile {
    pub entries: Vec<ProfileEntry>,
    /// First n with sin(πβn) = 0.
    pub first_zero: Option<u64>,
}

impl SinGrowthProfile {
    pub fn max_per_n(&self) -> f64 {
        self.entries.last().map(|e| e.running_max_per_n).unwrap_or(0.0)
    }

    pub fn max_per_log_n(&self) -> f64 {
        self.entries.last().map(|e| e.running_max_per_log_n).unwrap_or(0.0)
    }
}

/// The profile stops at the first exact zero of sin(πβn).
pub fn sin_growth_profile(cert: &RealCertificate, big_n: u64) -> Result<SinGrowthProfile> {
    let d = distances(cert, big_n)?;
    let mut entries = Vec::with_capacity(d.len());
    let (mut m1, mut m2) = (0.0f64, 0.0f64);
    let mut first_zero = None;
    for (i, &dist) in d.iter().enumerate() {
        let n = i as u64 + 1;
        let l = log_inv_sin(dist);
        let per_n = l.map(|v| v / n as f64);
        let per_log_n = if n >= 2 { l.map(|v| v / (n as f64).ln()) } else { None };
        if l.is_none() {
            first_zero = Some(n);
            m1 = f64::INFINITY;
            m2 = f64::INFINITY;
        }
        m1 = m1.max(per_n.unwrap_or(0.0));
        m2 = m2.max(per_log_n.unwrap_or(0.0));
        entries.push(ProfileEntry { n, distance: dist, per_n, per_log_n, running_max_per_n: m1, running_max_per_log_n: m2 });
        if first_zero.is_some() {
            break;
        }
    }
    Ok(SinGrowthProfile { entries, first_zero })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    NotInDEvidence,
    DCandidate,
    Rational,
    CertifiedInD,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::NotInDEvidence => "NOT_IN_D_EVIDENCE",
            Verdict::DCandidate => "D_CANDIDATE",
            Verdict::Rational => "RATIONAL",
            Verdict::CertifiedInD => "CERTIFIED_IN_D",
        })
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Witness {
    pub q: String,
    pub distance: f64,
    /// ⟨βq⟩^{−1/q}: the largest b for which |β − p/q| < b^{−q}·(1/q) at this q.
    pub implied_b: Option<f64>,
    /// (1/|sin(πβq)|)^{1/q}.
    pub implied_a: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DiophantineEvidence {
    pub tested_range: u64,
    pub witnesses: Vec<Witness>,
    pub verdict: Verdict,
    pub profile_max_per_n: f64,
    pub profile_max_per_log_n: f64,
    pub analysis: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyParams {
    /// Largest convergent denominator examined.
    pub tested_range: u64,
    /// Length of the sin-growth profile.
    pub profile_n: u64,
    /// Profile bound (log scale) above which β is reported as a 𝒟 candidate.
    pub candidate_threshold: f64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams { tested_range: 100_000, profile_n: 10_000, candidate_threshold: 3.0 }
    }
}

/// Symbolic verdicts for certificates whose approximation quality is known in closed form.
fn symbolic(cert: &RealCertificate) -> Option<(Verdict, String)> {
    match cert {
        RealCertificate::ContinuedFraction(CfCertificate { tail: CfTail::SuperLiouville { base, e, m }, .. }) => {
            if *e >= 1 && *base >= 2 {
                Some((
                    Verdict::CertifiedInD,
                    format!(
                        "a_(k+1) = k^{m}·({base}^(k^{e}))^(q_k): |β − p_k/q_k| < ({base}^(k^{e}))^(−q_k) and the base grows without bound"
                    ),
                ))
            } else {
                Some((
                    Verdict::NotInDEvidence,
                    format!(
                        "a_(k+1) ≤ k^{m}·{base}^(q_k): for b > {base} no convergent satisfies |β − p/q| < b^(−q) eventually; in the Liouville-type class only for b < {base}"
                    ),
                ))
            }
        }
        RealCertificate::Mobius { base, .. } => symbolic(base).map(|(v, why)| {
            (v, format!("rational Möbius image; 𝒟 is closed under x ↦ zx, z + x, 1/x. Base: {why}"))
        }),
        _ => None,
    }
}

pub fn classify(cert: &RealCertificate, params: &ClassifyParams) -> Result<DiophantineEvidence> {
    let q_max = BigInt::from(params.tested_range);
    let convs = convergents_up_to(cert, &q_max)?;
    let witness_of = |q: &BigInt| -> Result<Witness> {
        let d = match q.to_u64() {
            Some(n) => distances_at(cert, n)?,
            None => 0.0,
        };
        let qf = q.to_f64().unwrap_or(f64::INFINITY);
        Ok(Witness {
            q: q.to_string(),
            distance: d,
            implied_b: (d > 0.0).then(|| d.powf(-1.0 / qf)),
            implied_a: log_inv_sin(d).map(|l| (l / qf).exp()),
        })
    };
    let rational = cert.is_rational();
    let witnesses = convs.iter().map(|(_, q)| witness_of(q)).collect::<Result<Vec<_>>>()?;
    if rational {
        return Ok(DiophantineEvidence {
            tested_range: params.tested_range,
            witnesses,
            verdict: Verdict::Rational,
            profile_max_per_n: f64::INFINITY,
            profile_max_per_log_n: f64::INFINITY,
            analysis: Some("rational certificate".into()),
        });
    }
    let profile = sin_growth_profile(cert, params.profile_n.min(params.tested_range))?;
    let (verdict, analysis) = match symbolic(cert) {
        Some((v, why)) => (v, Some(why)),
        None => {
            if profile.first_zero.is_some() {
                (Verdict::Rational, None)
            } else if profile.max_per_log_n() > params.candidate_threshold {
                if matches!(cert, RealCertificate::Float { .. }) {
                    return Err(Error::InconclusivePrecision(
                        "a float certificate cannot support a 𝒟-candidate verdict".into(),
                    ));
                }
                (Verdict::DCandidate, None)
            } else {
                (Verdict::NotInDEvidence, None)
            }
        }
    };
    Ok(DiophantineEvidence {
        tested_range: params.tested_range,
        witnesses,
        verdict,
        profile_max_per_n: profile.max_per_n(),
        profile_max_per_log_n: profile.max_per_log_n(),
        analysis,
    })
}

/// ⟨βn⟩ for a single n.
fn distances_at(cert: &RealCertificate, n: u64) -> Result<f64> {
    let mut tol = BigRational::new(BigInt::one(), ten_pow(40));
    for _ in 0..12 {
        let a = approx(cert, &tol)?;
        let (p, q) = (a.r.numer(), a.r.denom());
        let t = (p * n).mod_floor(q);
        let other = q - &t;
        let num = if t < other { t } else { other };
        let d = BigRational::new(num, q.clone()).to_f64().unwrap_or(0.0);
        let slack = n as f64 * a.err.to_f64().unwrap_or(f64::INFINITY);
        if a.err.is_zero() || slack <= DIST_REL_TOL * d {
            return Ok(d);
        }
        if matches!(cert, RealCertificate::Float { .. }) {
            break;
        }
        tol = &a.err * &a.err;
    }
    Err(Error::InconclusivePrecision(format!("⟨βq⟩ at q = {n} not resolved")))
}

#[derive(Debug, Clone, PartialEq)]
pub enum TransformOp {
    Scale(BigRational),
    Shift(BigRational),
    Invert,
}

fn mat_mul(a: &[BigInt; 4], b: &[BigInt; 4]) -> [BigInt; 4] {
    [
        &a[0] * &b[0] + &a[1] * &b[2],
        &a[0] * &b[1] + &a[1] * &b[3],
        &a[2] * &b[0] + &a[3] * &b[2],
        &a[2] * &b[1] + &a[3] * &b[3],
    ]
}

fn op_matrix(op: &TransformOp) -> [BigInt; 4] {
    match op {
        TransformOp::Scale(r) => [r.numer().clone(), big(0), big(0), r.denom().clone()],
        TransformOp::Shift(r) => [r.denom().clone(), r.numer().clone(), big(0), r.denom().clone()],
        TransformOp::Invert => [big(0), big(1), big(1), big(0)],
    }
}

/// Certificate of zβ, z + β or 1/β.
pub fn transform_certificate(cert: &RealCertificate, op: &TransformOp) -> Result<RealCertificate> {
    if let TransformOp::Scale(r) = op {
        if r.is_zero() {
            return Err(Error::InvalidArgument("SCALE needs a nonzero rational".into()));
        }
    }
    match (cert, op) {
        (RealCertificate::Rational(r), _) => match op {
            TransformOp::Scale(z) => Ok(RealCertificate::Rational(r * z)),
            TransformOp::Shift(z) => Ok(RealCertificate::Rational(r + z)),
            TransformOp::Invert if r.is_zero() => Err(Error::InvalidArgument("cannot invert 0".into())),
            TransformOp::Invert => Ok(RealCertificate::Rational(r.recip())),
        },
        (RealCertificate::Quadratic(s), _) => {
            let (a, b, c, d) = (&s.a, &s.b, &s.c, &s.d);
            let out = match op {
                TransformOp::Scale(z) => {
                    QuadraticSurd::new(z.numer() * a, z.numer() * b, z.denom() * c, d.clone())
                }
                TransformOp::Shift(z) => QuadraticSurd::new(
                    z.denom() * a + z.numer() * c,
                    z.denom() * b,
                    z.denom() * c,
                    d.clone(),
                ),
                TransformOp::Invert => QuadraticSurd::new(c * a, -(c * b), a * a - b * b * d, d.clone()),
            };
            out.map(RealCertificate::Quadratic)
        }
        (RealCertificate::ContinuedFraction(cf), TransformOp::Shift(z)) if z.is_integer() => {
            let mut head = cf.head.clone();
            head[0] += z.to_integer();
            Ok(RealCertificate::ContinuedFraction(CfCertificate { head, tail: cf.tail.clone() }))
        }
        (RealCertificate::ContinuedFraction(cf), TransformOp::Invert)
            if cf.head[0].is_positive() || (cf.head[0].is_zero() && cf.head.len() >= 2) =>
        {
            let mut head = cf.head.clone();
            if head[0].is_zero() {
                head.remove(0);
            } else {
                head.insert(0, BigInt::zero());
            }
            Ok(RealCertificate::ContinuedFraction(CfCertificate { head, tail: cf.tail.clone() }))
        }
        (RealCertificate::Float { value, precision }, _) => {
            let v = match op {
                TransformOp::Scale(z) => value * z.to_f64().unwrap_or(f64::NAN),
                TransformOp::Shift(z) => value + z.to_f64().unwrap_or(f64::NAN),
                TransformOp::Invert => 1.0 / value,
            };
            if !v.is_finite() || v == 0.0 {
                return Err(Error::InvalidArgument("transformed float is not finite and nonzero".into()));
            }
            let abs_err = value.abs() * precision;
            let new_prec = match op {
                TransformOp::Invert => 2.0 * precision,
                _ => abs_err * (1.0 + f64::EPSILON) / v.abs() * z_scale(op),
            } + f64::EPSILON;
            Ok(RealCertificate::Float { value: v, precision: new_prec })
        }
        (RealCertificate::Mobius { base, m }, _) => {
            let m2 = mat_mul(&op_matrix(op), m);
            Ok(RealCertificate::Mobius { base: base.clone(), m: m2 })
        }
        _ => Ok(RealCertificate::Mobius { base: Box::new(cert.clone()), m: op_matrix(op) }),
    }
}

fn z_scale(op: &TransformOp) -> f64 {
    match op {
        TransformOp::Scale(z) => z.abs().to_f64().unwrap_or(1.0),
        _ => 1.0,
    }
}

fn parse_int(s: &str) -> Result<BigInt> {
    BigInt::from_str(s.trim()).map_err(|_| Error::InvalidArgument(format!("bad integer '{s}'")))
}

fn parse_rational(s: &str) -> Result<BigRational> {
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(Error::InvalidArgument("zero denominator".into()));
            }
            Ok(BigRational::new(parse_int(p)?, q))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

impl FromStr for TransformOp {
    type Err = Error;

    /// `scale:P/Q`, `shift:P/Q` or `invert`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("invert") {
            return Ok(TransformOp::Invert);
        }
        match s.split_once(':') {
            Some((k, v)) if k.eq_ignore_ascii_case("scale") => Ok(TransformOp::Scale(parse_rational(v)?)),
            Some((k, v)) if k.eq_ignore_ascii_case("shift") => Ok(TransformOp::Shift(parse_rational(v)?)),
            _ => Err(Error::InvalidArgument(format!("unknown transform '{s}'"))),
        }
    }
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for RealCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealCertificate::Rational(r) => write!(f, "rational:{}/{}", r.numer(), r.denom()),
            RealCertificate::Quadratic(s) => write!(f, "quadratic:{},{},{},{}", s.a, s.b, s.c, s.d),
            RealCertificate::ContinuedFraction(c) => match &c.tail {
                CfTail::Finite => write!(f, "cf:{}", join(&c.head)),
                CfTail::Periodic(p) => write!(f, "cf:{};{}", join(&c.head), join(p)),
                CfTail::SuperLiouville { base, e, m } => {
                    write!(f, "liouville:{base},{e},{m};{}", join(&c.head))
                }
            },
            RealCertificate::Mobius { base, m } => write!(f, "mobius:{}:{base}", join(m)),
            RealCertificate::Float { value, precision } => write!(f, "float:{value:e},{precision:e}"),
        }
    }
}

impl FromStr for RealCertificate {
    type Err = Error;

    /// Textual certificates:
    /// `rational:P/Q`, `quadratic:A,B,C,D` for (A + B√D)/C, `cf:A0,A1,…[;P1,P2,…]`,
    /// `liouville:BASE,E,M[;A0,A1,…]`, `mobius:M0,M1,M2,M3:<certificate>`,
    /// `float:VALUE[,PRECISION]`, and the names `golden`, `sqrt2`, `super-liouville`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "golden" => return Ok(RealCertificate::golden_ratio()),
            "sqrt2" => return RealCertificate::periodic(&[1], &[2]),
            "super-liouville" => return Ok(RealCertificate::super_liouville()),
            _ => {}
        }
        let (kind, body) =
            s.split_once(':').ok_or_else(|| Error::InvalidArgument(format!("certificate '{s}' has no kind")))?;
        let ints = |t: &str| t.split(',').filter(|x| !x.trim().is_empty()).map(parse_int).collect::<Result<Vec<_>>>();
        match kind {
            "rational" => {
                let r = parse_rational(body)?;
                Ok(RealCertificate::Rational(r))
            }
            "quadratic" => {
                let v = ints(body)?;
                if v.len() != 4 {
                    return Err(Error::InvalidArgument("quadratic needs A,B,C,D".into()));
                }
                Ok(RealCertificate::Quadratic(QuadraticSurd::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone())?))
            }
            "cf" => {
                let (h, p) = body.split_once(';').map(|(a, b)| (a, Some(b))).unwrap_or((body, None));
                let head = ints(h)?;
                if head.is_empty() || head[1..].iter().any(|a| !a.is_positive()) {
                    return Err(Error::InvalidArgument("partial quotients after a₀ must be positive".into()));
                }
                let tail = match p {
                    None => CfTail::Finite,
                    Some(p) => {
                        let block = ints(p)?
                            .iter()
                            .map(|a| a.to_u64().filter(|&v| v > 0))
                            .collect::<Option<Vec<u64>>>()
                            .ok_or_else(|| Error::InvalidArgument("period entries must be positive".into()))?;
                        if block.is_empty() {
                            return Err(Error::InvalidArgument("empty period".into()));
                        }
                        CfTail::Periodic(block)
                    }
                };
                Ok(RealCertificate::ContinuedFraction(CfCertificate { head, tail }))
            }
            "liouville" => {
                let (params, h) = body.split_once(';').unwrap_or((body, "0,1"));
                let v = ints(params)?;
                let head = ints(h)?;
                let small = |x: &BigInt| x.to_u32().ok_or_else(|| Error::InvalidArgument("parameter too large".into()));
                if v.len() != 3 || head.len() < 2 || head[1..].iter().any(|a| !a.is_positive()) {
                    return Err(Error::InvalidArgument("liouville needs BASE,E,M and a head with a₁ ≥ 1".into()));
                }
                let tail = CfTail::SuperLiouville { base: small(&v[0])?, e: small(&v[1])?, m: small(&v[2])? };
                Ok(RealCertificate::ContinuedFraction(CfCertificate { head, tail }))
            }
            "mobius" => {
                let (m, base) = body
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidArgument("mobius needs M0,M1,M2,M3:<certificate>".into()))?;
                let v = ints(m)?;
                if v.len() != 4 || (&v[0] * &v[3] - &v[1] * &v[2]).is_zero() {
                    return Err(Error::InvalidArgument("mobius needs a nonsingular integer matrix".into()));
                }
                Ok(RealCertificate::Mobius {
                    base: Box::new(base.parse()?),
                    m: [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()],
                })
            }
            "float" => {
                let (v, p) = body.split_once(',').unwrap_or((body, "2.220446049250313e-16"));
                let value: f64 = v.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad float '{v}'")))?;
                let precision: f64 =
                    p.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad precision '{p}'")))?;
                if !value.is_finite() || !(precision > 0.0) {
                    return Err(Error::InvalidArgument("float needs a finite value and positive precision".into()));
                }
                Ok(RealCertificate::Float { value, precision })
            }
            _ => Err(Error::InvalidArgument(format!("unknown certificate kind '{kind}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(v: &[(i64, i64)]) -> Vec<(BigInt, BigInt)> {
        v.iter().map(|&(p, q)| (big(p), big(q))).collect()
    }

    #[test]
    fn convergent_examples() {
        let golden = RealCertificate::periodic(&[1], &[1]).unwrap();
        assert_eq!(convergents(&golden, 5).unwrap(), pairs(&[(1, 1), (2, 1), (3, 2), (5, 3), (8, 5)]));
        assert_eq!(convergents(&RealCertificate::golden_ratio(), 5).unwrap(), pairs(&[(1, 1), (2, 1), (3, 2), (5, 3), (8, 5)]));
        let r = RealCertificate::rational(3, 7).unwrap();
        assert_eq!(convergents(&r, 10).unwrap().last().unwrap(), &(big(3), big(7)));
        let sqrt2: RealCertificate = "sqrt2".parse().unwrap();
        assert_eq!(convergents(&sqrt2, 4).unwrap(), pairs(&[(1, 1), (3, 2), (7, 5), (17, 12)]));
        let q2 = RealCertificate::Quadratic(QuadraticSurd::new(big(0), big(1), big(1), big(2)).unwrap());
        assert_eq!(convergents(&q2, 4).unwrap(), pairs(&[(1, 1), (3, 2), (7, 5), (17, 12)]));
        let f = RealCertificate::Float { value: 1.618033988749895, precision: 1e-16 };
        assert_eq!(convergents(&f, 5).unwrap(), pairs(&[(1, 1), (2, 1), (3, 2), (5, 3), (8, 5)]));
        assert!(matches!(convergents(&f, 60), Err(Error::InconclusivePrecision(_))));
    }

    #[test]
    fn convergents_bracket_the_value() {
        let g = RealCertificate::golden_ratio();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let c = convergents(&g, 20).unwrap();
        for w in c.windows(2) {
            let (p, q) = (w[0].0.to_f64().unwrap(), w[0].1.to_f64().unwrap());
            let q1 = w[1].1.to_f64().unwrap();
            assert!((phi - p / q).abs() < 1.0 / (q * q1));
        }
    }

    #[test]
    fn golden_ratio_profile_is_bounded() {
        let p = sin_growth_profile(&RealCertificate::golden_ratio(), 10_000).unwrap();
        assert_eq!(p.entries.len(), 10_000);
        assert!(p.max_per_log_n() < 1.2, "{}", p.max_per_log_n());
        let e = classify(&RealCertificate::golden_ratio(), &ClassifyParams::default()).unwrap();
        assert_eq!(e.verdict, Verdict::NotInDEvidence);
        assert!(e.witnesses.windows(2).all(|w| w[0].q.parse::<u64>().unwrap() <= w[1].q.parse::<u64>().unwrap()));
    }

    #[test]
    fn exact_distance_matches_convergent_error() {
        let g = RealCertificate::golden_ratio();
        for (p, q) in convergents(&g, 15).unwrap().into_iter().skip(1) {
            let n = q.to_u64().unwrap();
            let d = distances_at(&g, n).unwrap();
            let phi = BigRational::new(big(1), big(2)) + BigRational::new(big(1), big(2)) * sqrt5();
            let exact = (BigRational::from_integer(q) * phi - BigRational::from_integer(p)).abs().to_f64().unwrap();
            assert!((d - exact).abs() <= 1e-12 * exact);
        }
    }

    fn sqrt5() -> BigRational {
        approx(&RealCertificate::Quadratic(QuadraticSurd::new(big(0), big(1), big(1), big(5)).unwrap()), &BigRational::new(big(1), ten_pow(60)))
            .unwrap()
            .r
    }

    #[test]
    fn rational_paths() {
        let half = RealCertificate::rational(1, 2).unwrap();
        assert_eq!(sin_growth_profile(&half, 100).unwrap().first_zero, Some(2));
        assert_eq!(classify(&half, &ClassifyParams::default()).unwrap().verdict, Verdict::Rational);
        let r = RealCertificate::rational(22, 7).unwrap();
        assert_eq!(classify(&r, &ClassifyParams::default()).unwrap().verdict, Verdict::Rational);
        let inv = transform_certificate(&RealCertificate::rational(3, 7).unwrap(), &TransformOp::Invert).unwrap();
        assert_eq!(inv, RealCertificate::rational(7, 3).unwrap());
    }

    #[test]
    fn super_liouville_is_certified_and_stays_so() {
        let s = RealCertificate::super_liouville();
        let params = ClassifyParams::default();
        assert_eq!(classify(&s, &params).unwrap().verdict, Verdict::CertifiedInD);
        for op in [TransformOp::Invert, TransformOp::Scale(BigRational::from_integer(big(2))), TransformOp::Shift(BigRational::new(big(1), big(3)))] {
            let t = transform_certificate(&s, &op).unwrap();
            assert_eq!(classify(&t, &params).unwrap().verdict, Verdict::CertifiedInD, "{op:?}");
        }
        let p = sin_growth_profile(&s, 1000).unwrap();
        assert!(p.max_per_log_n() > 3.0);
        // fixed base: only in the weaker class
        let fixed: RealCertificate = "liouville:10,0,1".parse().unwrap();
        let e = classify(&fixed, &params).unwrap();
        assert_eq!(e.verdict, Verdict::NotInDEvidence);
        assert!(sin_growth_profile(&fixed, 1000).unwrap().max_per_log_n() > 3.0);
    }

    #[test]
    fn transforms_of_quadratics() {
        let golden = RealCertificate::periodic(&[1], &[1]).unwrap();
        let shifted = transform_certificate(&golden, &TransformOp::Shift(BigRational::from_integer(big(1)))).unwrap();
        assert_eq!(shifted, RealCertificate::periodic(&[2], &[1]).unwrap());
        let g = RealCertificate::golden_ratio();
        let inv = transform_certificate(&g, &TransformOp::Invert).unwrap();
        // 1/φ = φ − 1
        let expect = transform_certificate(&g, &TransformOp::Shift(BigRational::from_integer(big(-1)))).unwrap();
        assert_eq!(inv, expect);
        let scaled = transform_certificate(&g, &TransformOp::Scale(BigRational::new(big(2), big(3)))).unwrap();
        let a = approx(&scaled, &BigRational::new(big(1), ten_pow(30))).unwrap().r.to_f64().unwrap();
        assert!((a - 2.0 / 3.0 * 1.618033988749895).abs() < 1e-15);
        assert_eq!(classify(&scaled, &ClassifyParams::default()).unwrap().verdict, Verdict::NotInDEvidence);
    }

    #[test]
    fn float_certificates_never_certify() {
        let f: RealCertificate = "float:0.5".parse().unwrap();
        assert!(matches!(classify(&f, &ClassifyParams::default()), Err(Error::InconclusivePrecision(_))));
        let g: RealCertificate = "float:1.618033988749895,1e-16".parse().unwrap();
        let r = classify(&g, &ClassifyParams { tested_range: 1000, profile_n: 1000, candidate_threshold: 3.0 });
        assert!(matches!(r, Ok(DiophantineEvidence { verdict: Verdict::NotInDEvidence, .. }) | Err(Error::InconclusivePrecision(_))));
    }

    #[test]
    fn text_round_trip() {
        for s in ["rational:22/7", "quadratic:1,1,2,5", "cf:1;2", "cf:0,3,4", "liouville:10,1,0;0,1", "mobius:2,0,0,1:golden", "float:1.5e0,1e-12"] {
            let c: RealCertificate = s.parse().unwrap();
            let back: RealCertificate = c.to_string().parse().unwrap();
            assert_eq!(c, back, "{s}");
        }
        assert!("cf:1,0".parse::<RealCertificate>().is_err());
        assert!("quadratic:1,1,1,4".parse::<RealCertificate>().is_err());
    }
}
