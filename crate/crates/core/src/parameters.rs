//! Scalar exponents of the multilinear setting and the hypothesis sets that
//! gate each boundedness result.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Every scalar parameter of an `m`-linear problem.
///
/// Per-factor lists all have length `m`. `r` holds the commutator Hölder
/// exponents (`f64::INFINITY` switches a factor's `1/r_i` term off) and
/// `beta` the Lipschitz orders of the symbols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentSet {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub alpha: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub lambda: Vec<f64>,
    pub gamma: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "extended_reals")]
    pub r: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
}

/// Aggregated exponents of the target space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub alpha: f64,
    pub p: f64,
    /// `1/q = Σ 1/q_i (+ Σ 1/r_i when commutator exponents are present)`.
    pub q: f64,
    pub lambda: f64,
    /// `γ/q = Σ γ_i / q_i`.
    pub gamma: f64,
    pub alpha_prime: Option<f64>,
    pub beta: Option<f64>,
}

/// The hypothesis set to check in [`ExponentSet::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremMode {
    MorreyHerzUpper,
    MorreyHerzSharp,
    HerzUpper,
    HerzLower,
    Commutator,
}

/// One failed hypothesis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: &'static str,
    pub message: String,
}

impl Violation {
    fn new(code: &'static str, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl ExponentSet {
    /// Single-factor set with `n = 1` and no commutator data.
    pub fn single(d: usize, alpha: f64, p: f64, q: f64, lambda: f64, gamma: f64) -> Self {
        Self {
            m: 1,
            n: 1,
            d,
            alpha: vec![alpha],
            p: vec![p],
            q: vec![q],
            lambda: vec![lambda],
            gamma: vec![gamma],
            r: None,
            beta: None,
        }
    }

    /// `m` identical factors on an `n = 1` cube.
    pub fn symmetric(m: usize, d: usize, alpha: f64, p: f64, q: f64, lambda: f64, gamma: f64) -> Self {
        Self {
            m,
            n: 1,
            d,
            alpha: vec![alpha; m],
            p: vec![p; m],
            q: vec![q; m],
            lambda: vec![lambda; m],
            gamma: vec![gamma; m],
            r: None,
            beta: None,
        }
    }

    pub fn with_commutator(mut self, r: Vec<f64>, beta: Vec<f64>) -> Self {
        self.r = Some(r);
        self.beta = Some(beta);
        self
    }

    /// Structural invariants that every set must satisfy, independent of the
    /// theorem being exercised.
    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidExponents(msg));
        if self.m == 0 || self.n == 0 || self.d == 0 {
            return bad(format!("m, n, d must be positive (m={}, n={}, d={})", self.m, self.n, self.d));
        }
        let lists: [(&str, &Vec<f64>); 5] = [
            ("alpha", &self.alpha),
            ("p", &self.p),
            ("q", &self.q),
            ("lambda", &self.lambda),
            ("gamma", &self.gamma),
        ];
        for (name, list) in lists {
            if list.len() != self.m {
                return bad(format!("{name} has {} entries, expected m={}", list.len(), self.m));
            }
            if list.iter().any(|x| x.is_nan()) {
                return bad(format!("{name} contains NaN"));
            }
        }
        for (name, list) in [("r", &self.r), ("beta", &self.beta)] {
            if let Some(list) = list {
                if list.len() != self.m {
                    return bad(format!("{name} has {} entries, expected m={}", list.len(), self.m));
                }
            }
        }
        let d = self.d as f64;
        for i in 0..self.m {
            if !(self.p[i] >= 1.0 && self.p[i].is_finite()) {
                return bad(format!("p[{i}] = {} must lie in [1, ∞)", self.p[i]));
            }
            if !(self.q[i] >= 1.0 && self.q[i].is_finite()) {
                return bad(format!("q[{i}] = {} must lie in [1, ∞)", self.q[i]));
            }
            if !(self.lambda[i] >= 0.0) {
                return bad(format!("lambda[{i}] = {} must be nonnegative", self.lambda[i]));
            }
            if !(self.gamma[i] > -d) {
                return bad(format!("gamma[{i}] = {} must exceed -d = {}", self.gamma[i], -d));
            }
            if !self.alpha[i].is_finite() || !self.lambda[i].is_finite() || !self.gamma[i].is_finite() {
                return bad(format!("factor {i} has a non-finite exponent"));
            }
        }
        if let Some(r) = &self.r {
            for (i, &ri) in r.iter().enumerate() {
                if !(ri > 0.0) {
                    return bad(format!("r[{i}] = {ri} must lie in (0, ∞]"));
                }
            }
        }
        if let Some(beta) = &self.beta {
            for (i, &b) in beta.iter().enumerate() {
                if !(b > 0.0 && b < 1.0) {
                    return bad(format!("beta[{i}] = {b} must lie in (0, 1)"));
                }
            }
        }
        Ok(())
    }

    /// Target-space exponents.
    ///
    /// Sums are accumulated with compensation and rounded once.
    pub fn aggregates(&self) -> Result<Aggregates> {
        self.check()?;
        let d = self.d as f64;
        let sum = |it: &mut dyn Iterator<Item = f64>| it.collect::<CompensatedSum>().value();

        let alpha = sum(&mut self.alpha.iter().copied());
        let lambda = sum(&mut self.lambda.iter().copied());
        let inv_p = sum(&mut self.p.iter().map(|p| 1.0 / p));
        let mut inv_q_acc: CompensatedSum = self.q.iter().map(|q| 1.0 / q).collect();
        if let Some(r) = &self.r {
            for &ri in r {
                inv_q_acc.add(1.0 / ri);
            }
        }
        let inv_q = inv_q_acc.value();
        if !(inv_p > 0.0) || !inv_p.is_finite() {
            return Err(Error::InvalidExponents(format!("aggregate 1/p = {inv_p} is not positive and finite")));
        }
        if !(inv_q > 0.0) || !inv_q.is_finite() {
            return Err(Error::InvalidExponents(format!("aggregate 1/q = {inv_q} is not positive and finite")));
        }
        let p = 1.0 / inv_p;
        let q = 1.0 / inv_q;
        let gamma_over_q = sum(&mut self.gamma.iter().zip(&self.q).map(|(g, qi)| g / qi));
        let gamma = q * gamma_over_q;
        if !(gamma > -d) {
            return Err(Error::InvalidExponents(format!("aggregate gamma = {gamma} must exceed -d = {}", -d)));
        }

        let beta = self.beta.as_ref().map(|b| sum(&mut b.iter().copied()));
        let alpha_prime = if self.r.is_some() || self.beta.is_some() {
            let mut acc = CompensatedSum::new();
            acc.add(alpha);
            if let Some(b) = &self.beta {
                for &bi in b {
                    acc.add(-bi);
                }
            }
            if let Some(r) = &self.r {
                for (ri, gi) in r.iter().zip(&self.gamma) {
                    if ri.is_finite() {
                        acc.add(-(d + gi) / ri);
                    }
                }
            }
            Some(acc.value())
        } else {
            None
        };

        Ok(Aggregates { alpha, p, q, lambda, gamma, alpha_prime, beta })
    }

    /// Checks the hypothesis set of the selected theorem. An empty list means
    /// every hypothesis holds; violations are data, not failures.
    pub fn validate(&self, mode: TheoremMode) -> Vec<Violation> {
        let mut out = Vec::new();
        if let Err(e) = self.check() {
            out.push(Violation::new("structure", e.to_string()));
            return out;
        }
        let agg = match self.aggregates() {
            Ok(a) => a,
            Err(e) => {
                out.push(Violation::new("aggregates", e.to_string()));
                return out;
            }
        };
        let d = self.d as f64;
        match mode {
            TheoremMode::MorreyHerzUpper => {
                if agg.q < 1.0 {
                    out.push(Violation::new("q_lt_1", format!("aggregate q = {} must be at least 1", agg.q)));
                }
                if agg.p < 1.0 && !(agg.lambda > 0.0) {
                    out.push(Violation::new("p_lt_1_lambda_zero", "0<p<1 requires λ>0"));
                }
            }
            TheoremMode::MorreyHerzSharp => {
                if agg.q < 1.0 {
                    out.push(Violation::new("q_lt_1", format!("aggregate q = {} must be at least 1", agg.q)));
                }
                for i in 0..self.m {
                    if !(self.lambda[i] > 0.0) {
                        out.push(Violation::new("lambda_i_zero", format!("λ_{i} = {} must be positive", self.lambda[i])));
                    }
                    if !(self.lambda[i] > self.alpha[i]) {
                        out.push(Violation::new(
                            "lambda_i_le_alpha_i",
                            format!("λ_i>α_i required (factor {i}: λ={}, α={})", self.lambda[i], self.alpha[i]),
                        ));
                    }
                }
            }
            TheoremMode::HerzUpper => {
                if agg.q < 1.0 {
                    out.push(Violation::new("q_lt_1", format!("aggregate q = {} must be at least 1", agg.q)));
                }
                if agg.p < 1.0 {
                    out.push(Violation::new("p_lt_1", format!("aggregate p = {} must be at least 1", agg.p)));
                }
            }
            TheoremMode::HerzLower => {
                if agg.q < 1.0 {
                    out.push(Violation::new("q_lt_1", format!("aggregate q = {} must be at least 1", agg.q)));
                }
            }
            TheoremMode::Commutator => {
                if self.r.is_none() {
                    out.push(Violation::new("r_missing", "commutator mode needs r_i"));
                }
                match &self.beta {
                    None => out.push(Violation::new("beta_missing", "commutator mode needs β_i")),
                    Some(b) => {
                        let total: f64 = b.iter().sum();
                        if !(total > 0.0 && total < 1.0) {
                            out.push(Violation::new("beta_sum", format!("β = Σβ_i = {total} must lie in (0, 1)")));
                        }
                    }
                }
                if agg.q < 1.0 {
                    out.push(Violation::new("q_lt_1", format!("aggregate q = {} must be at least 1", agg.q)));
                }
                for i in 0..self.m {
                    if !(self.alpha[i] > -d) {
                        out.push(Violation::new("alpha_i_gt_minus_d", format!("α_{i} = {} must exceed -d", self.alpha[i])));
                    }
                    if self.lambda[i] > 1.0 {
                        out.push(Violation::new("lambda_i_gt_1", format!("λ_{i} = {} must lie in [0, 1]", self.lambda[i])));
                    }
                }
                if agg.lambda > 1.0 {
                    out.push(Violation::new("lambda_gt_1", format!("λ = {} must lie in [0, 1]", agg.lambda)));
                }
                if !(agg.alpha > -d) {
                    out.push(Violation::new("alpha_gt_minus_d", format!("α = {} must exceed -d", agg.alpha)));
                }
                if agg.p < 1.0 && !(agg.lambda > 0.0) {
                    out.push(Violation::new("p_lt_1_lambda_zero", "0<p<1 requires λ>0"));
                }
            }
        }
        out
    }
}

/// Free-function form of [`ExponentSet::aggregates`].
pub fn derive_aggregates(exponents: &ExponentSet) -> Result<Aggregates> {
    exponents.aggregates()
}

/// Free-function form of [`ExponentSet::validate`].
pub fn validate(exponents: &ExponentSet, mode: TheoremMode) -> Vec<Violation> {
    exponents.validate(mode)
}

/// Serializes `f64::INFINITY` entries as the string `"inf"` so the config
/// stays plain JSON.
mod extended_reals {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &Option<Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            None => s.serialize_none(),
            Some(list) => list
                .iter()
                .map(|&x| if x.is_infinite() { Entry::Text("inf".into()) } else { Entry::Num(x) })
                .collect::<Vec<_>>()
                .serialize(s),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<Vec<f64>>, D::Error> {
        let raw: Option<Vec<Entry>> = Option::deserialize(de)?;
        raw.map(|list| {
            list.into_iter()
                .map(|e| match e {
                    Entry::Num(x) => Ok(x),
                    Entry::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => Ok(f64::INFINITY),
                    Entry::Text(t) => Err(D::Error::custom(format!("expected a number or \"inf\", got {t:?}"))),
                })
                .collect()
        })
        .transpose()
    }
}
