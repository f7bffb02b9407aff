//! Closed-form calculators.
//!
//! Logarithms are base 2 throughout, except inside the Chernoff expressions,
//! which are stated with `e`. Every hidden constant is the explicit `c` input.

use crate::rng::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("parameter error: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

fn domain<T>(msg: impl Into<String>) -> Result<T, BoundError> {
    Err(BoundError::Domain(msg.into()))
}

/// Parameter bundle shared by the calculators.
///
/// `vc` is the VC-dimension used by the sample-size formulas; for
/// `nu_alpha`, `p` plays the role of `nu` and `eps` the role of `alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub d: u32,
    pub n: f64,
    pub k: f64,
    pub w: f64,
    pub p: f64,
    pub eps: f64,
    pub q: f64,
    pub beta: f64,
    pub delta: f64,
    pub mu: f64,
    pub t: f64,
    pub c: f64,
    pub vc: f64,
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams {
            d: 2,
            n: 1024.0,
            k: 2.0,
            w: 1.0,
            p: 0.5,
            eps: 0.5,
            q: 0.5,
            beta: 2.0,
            delta: 1.0,
            mu: 1.0,
            t: 2.0,
            c: 1.0,
            vc: 3.0,
        }
    }
}

/// `eps(mu, beta) = (e^(beta-1) / beta^beta)^mu`, evaluated in log space.
pub fn eps_chernoff(mu: f64, beta: f64) -> f64 {
    (mu * ((beta - 1.0) - beta * beta.ln())).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailKind {
    UpperMult,
    UpperT,
    Lower,
}

pub fn chernoff_tail(params: &BoundParams, kind: TailKind) -> Result<f64, BoundError> {
    let mu = params.mu;
    if !(mu > 0.0) {
        return domain("mu must be positive");
    }
    match kind {
        TailKind::UpperMult => {
            if !(params.delta > 0.0) {
                return domain("delta must be positive");
            }
            Ok(eps_chernoff(mu, 1.0 + params.delta))
        }
        TailKind::UpperT => {
            if !(params.t > mu) {
                return domain("t must exceed mu");
            }
            Ok(eps_chernoff(mu, params.t / mu))
        }
        TailKind::Lower => {
            if !(params.delta > 0.0) {
                return domain("delta must be positive");
            }
            Ok((-mu * params.delta * params.delta / 2.0).exp())
        }
    }
}

/// Upper bound on `S_{> beta n / k}` for `X ~ B(n, 1/k)`.
pub fn tail_sum_bound(n: f64, k: f64, beta: f64) -> Result<f64, BoundError> {
    if !(beta > 1.0) {
        return domain("beta must exceed 1");
    }
    if !(k >= beta && n >= k) {
        return domain("need beta <= k <= n");
    }
    let mu = n / k;
    let denom = beta - (1.0 - 1.0 / beta).exp();
    Ok(eps_chernoff(mu, beta) * (beta * mu + 1.0 + beta / denom))
}

/// Monte-Carlo estimates over `B(n, prob)`: tail frequencies and tail sums.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinomialEstimate {
    pub n: u64,
    pub prob: f64,
    pub trials: u64,
    pub draws: Vec<u64>,
}

impl BinomialEstimate {
    pub fn draw(n: u64, prob: f64, trials: u64, rng: &mut Rng) -> Self {
        let dist = Binomial::new(n, prob).expect("valid binomial");
        let r = rng.inner_mut();
        let draws = (0..trials).map(|_| dist.sample(r)).collect();
        BinomialEstimate { n, prob, trials, draws }
    }

    /// Empirical `Pr{X > t}`.
    pub fn upper_tail(&self, t: f64) -> f64 {
        self.draws.iter().filter(|&&x| x as f64 > t).count() as f64 / self.trials as f64
    }

    /// Empirical `Pr{X < t}`.
    pub fn lower_tail(&self, t: f64) -> f64 {
        self.draws.iter().filter(|&&x| (x as f64) < t).count() as f64 / self.trials as f64
    }

    /// Empirical `S_{> y} = E[X ; X > y]`.
    pub fn tail_sum(&self, y: f64) -> f64 {
        self.draws
            .iter()
            .filter(|&&x| x as f64 > y)
            .map(|&x| x as f64)
            .sum::<f64>()
            / self.trials as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    NuAlpha,
    RelativePeps,
    ShallowNet,
}

fn open_unit(x: f64, name: &str) -> Result<(), BoundError> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        domain(format!("{name} must lie in (0, 1)"))
    }
}

pub fn sample_size(kind: SampleKind, params: &BoundParams) -> Result<u64, BoundError> {
    let BoundParams { p, eps, q, c, vc, .. } = *params;
    open_unit(q, "q")?;
    open_unit(eps, "eps")?;
    let v = match kind {
        SampleKind::NuAlpha | SampleKind::RelativePeps => {
            open_unit(p, "p")?;
            c / (eps * eps * p) * (vc * (1.0 / p).log2() + (1.0 / q).log2())
        }
        SampleKind::ShallowNet => c / eps * (vc * (1.0 / eps).log2() + (1.0 / q).log2()),
    };
    Ok(v.ceil() as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingKind {
    Partition,
    ShallowTree,
    RelativeTree,
    StandardPartition,
    StandardTree,
}

fn alpha(x: f64) -> f64 {
    inverse_ackermann(x.max(1.0).ceil() as u64) as f64
}

pub fn predicted_crossing(kind: CrossingKind, params: &BoundParams) -> f64 {
    let BoundParams { d, n, k, w, c, .. } = *params;
    let d = d as f64;
    let r = n / k;
    let lg = |x: f64| x.max(1.0).log2();
    let v = match kind {
        CrossingKind::Partition => {
            if d == 2.0 {
                alpha(r) * lg(r).powi(2)
            } else {
                r.powf(1.0 - 1.0 / (d - 1.0)) * lg(r).powf(2.0 / (d - 1.0))
            }
        }
        CrossingKind::ShallowTree => {
            if d == 2.0 {
                alpha(r) * lg(r).powi(2) * (k.sqrt() + lg(r))
            } else {
                n.powf(1.0 - 1.0 / (d - 1.0)) * k.powf(1.0 / (d * (d - 1.0))) * lg(r).powf(2.0 / (d - 1.0))
            }
        }
        CrossingKind::RelativeTree => {
            let w = w.max(1.0);
            let s = n / w;
            if d == 2.0 {
                w.sqrt() * alpha(s) * lg(s).powi(2) + alpha(n) * lg(n).powi(4)
            } else {
                n.powf(1.0 - 1.0 / (d - 1.0)) * w.powf(1.0 / (d * (d - 1.0))) * lg(s).powf(2.0 / (d - 1.0))
            }
        }
        CrossingKind::StandardPartition => r.powf(1.0 - 1.0 / d),
        CrossingKind::StandardTree => n.powf(1.0 - 1.0 / d),
    };
    c * v
}

/// An exact positive fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Frac {
    pub num: i64,
    pub den: i64,
}

impl Frac {
    pub fn new(num: i64, den: i64) -> Frac {
        use num_integer::Integer;
        let g = num.gcd(&den).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Frac {
            num: s * num / g,
            den: s * den / g,
        }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::fmt::Display for Frac {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// `(gamma, mu, eta)` for `d >= 3`.
pub fn rel_approx_exponents(d: u32) -> Result<(Frac, Frac, Frac), BoundError> {
    if d < 3 {
        return Err(BoundError::Unsupported(
            "exponent triple needs d >= 3; use the planar size formula".into(),
        ));
    }
    let d = d as i64;
    Ok((
        Frac::new(2 * d * (d - 1) - 1, (d - 1) * (d + 1)),
        Frac::new(2 * d, d + 1),
        Frac::new(d, d - 1),
    ))
}

/// Exponent `x` such that the size bound improves on the general one for `eps < p^x`.
pub fn improvement_exponent(d: u32) -> Result<Frac, BoundError> {
    let (g, m, _) = rel_approx_exponents(d)?;
    // (gamma - 1) / (2 - mu)
    let num = (g.num - g.den) * m.den;
    let den = g.den * (2 * m.den - m.num);
    Ok(Frac::new(num, den))
}

pub fn improvement_holds(d: u32, p: f64, eps: f64) -> Result<bool, BoundError> {
    Ok(eps < p.powf(improvement_exponent(d)?.value()))
}

/// Target size of a relative `(p, eps)`-approximation.
///
/// `d = 2` uses `c / (eps^(4/3) p) * log^(4/3)(1/(eps p))`; `d >= 3` uses the
/// exponent triple.
pub fn rel_approx_size(d: u32, p: f64, eps: f64, c: f64) -> Result<f64, BoundError> {
    open_unit(p, "p")?;
    open_unit(eps, "eps")?;
    let lg = (1.0 / (eps * p)).log2();
    if d == 2 {
        return Ok(c / (eps.powf(4.0 / 3.0) * p) * lg.powf(4.0 / 3.0));
    }
    let (g, m, e) = rel_approx_exponents(d)?;
    Ok(c / (eps.powf(m.value()) * p.powf(g.value())) * lg.powf(e.value()))
}

/// Exponent of `n` in the layer threshold: `1 - (d-1)/(d(d-1)-1)`.
pub fn k1_exponent(d: u32) -> Result<Frac, BoundError> {
    if d < 2 {
        return domain("d must be at least 2");
    }
    let d = d as i64;
    let den = d * (d - 1) - 1;
    Ok(Frac::new(den - (d - 1), den))
}

pub fn k1_threshold(d: u32, n: f64, c: f64) -> Result<f64, BoundError> {
    Ok(c * n.powf(k1_exponent(d)?.value()))
}

/// Query-cost envelope for a counting query of output size `w`, polylog
/// factors dropped.
pub fn query_cost(d: u32, n: f64, w: f64, c: f64) -> Result<f64, BoundError> {
    if d < 2 {
        return domain("d must be at least 2");
    }
    let k1 = k1_threshold(d, n, c)?;
    let df = d as f64;
    let w = w.min(n - w).max(0.0);
    if w <= k1 {
        let base = if d <= 3 {
            n.max(2.0).log2()
        } else {
            n.powf(1.0 - 1.0 / (d / 2) as f64)
        };
        Ok(c * (base + w))
    } else {
        Ok(c * n.powf(1.0 - 1.0 / (df - 1.0)) * w.powf(1.0 / (df * (df - 1.0))))
    }
}

/// `A(i, j)` saturated at `cap + 1`.
fn ackermann_capped(i: u32, j: u128, cap: u128) -> u128 {
    if i == 1 {
        return if j >= 128 { cap + 1 } else { (1u128 << j).min(cap + 1) };
    }
    if j == 1 {
        return ackermann_capped(i - 1, 2, cap);
    }
    let inner = ackermann_capped(i, j - 1, cap);
    if inner > cap {
        // A(i-1, x) >= x, so the result also exceeds cap.
        return cap + 1;
    }
    ackermann_capped(i - 1, inner, cap)
}

/// `min { i >= 1 : A(i, i) >= n }`.
pub fn inverse_ackermann(n: u64) -> u32 {
    let cap = n as u128;
    let mut i = 1;
    loop {
        if ackermann_capped(i, i as u128, cap) >= cap {
            return i;
        }
        i += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn upper_mult_value() {
        let p = BoundParams {
            mu: 4.0,
            delta: 1.0,
            ..Default::default()
        };
        let oracle = (std::f64::consts::E / 4.0).powi(4);
        assert_relative_eq!(
            chernoff_tail(&p, TailKind::UpperMult).unwrap(),
            oracle,
            max_relative = 1e-12
        );
        assert_relative_eq!(oracle, 0.213_27, epsilon = 1e-5);
    }

    #[test]
    fn upper_t_matches_mult() {
        let p = BoundParams {
            mu: 4.0,
            t: 8.0,
            delta: 1.0,
            ..Default::default()
        };
        assert_relative_eq!(
            chernoff_tail(&p, TailKind::UpperT).unwrap(),
            chernoff_tail(&p, TailKind::UpperMult).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn lower_tends_to_one() {
        let p = BoundParams {
            mu: 4.0,
            delta: 1e-9,
            ..Default::default()
        };
        assert!((chernoff_tail(&p, TailKind::Lower).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        let p = BoundParams {
            mu: 4.0,
            t: 3.0,
            ..Default::default()
        };
        assert!(chernoff_tail(&p, TailKind::UpperT).is_err());
        assert!(tail_sum_bound(100.0, 4.0, 1.0).is_err());
    }

    #[test]
    fn tail_sum_example() {
        let k = 4.0;
        let n = 256.0 * k;
        let beta = 1.2f64;
        let oracle = (256.0 * (0.2 - 1.2 * 1.2f64.ln())).exp() * (307.2 + 1.0 + 1.2 / (1.2 - (1.0f64 / 6.0).exp()));
        assert_relative_eq!(tail_sum_bound(n, k, beta).unwrap(), oracle, max_relative = 1e-12);
        assert!(tail_sum_bound(64.0, 4.0, 4.0).unwrap().is_finite());
    }

    #[test]
    fn sample_size_examples() {
        let p = BoundParams {
            eps: 0.5,
            p: 1.0 / 16.0,
            q: 0.5,
            vc: 3.0,
            c: 1.0,
            ..Default::default()
        };
        // 64 * (3 * 4 + 1)
        assert_eq!(sample_size(SampleKind::RelativePeps, &p).unwrap(), 832);
        let s = BoundParams { eps: 0.125, ..p };
        // 8 * (3 * 3 + 1)
        assert_eq!(sample_size(SampleKind::ShallowNet, &s).unwrap(), 80);
    }

    #[test]
    fn crossing_examples() {
        let p = BoundParams {
            d: 3,
            n: 256.0 * 4.0,
            k: 4.0,
            ..Default::default()
        };
        assert_relative_eq!(
            predicted_crossing(CrossingKind::Partition, &p),
            128.0,
            max_relative = 1e-12
        );
        let t = BoundParams {
            d: 2,
            n: 1024.0,
            ..Default::default()
        };
        assert_relative_eq!(
            predicted_crossing(CrossingKind::StandardTree, &t),
            32.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn exponents() {
        let (g, m, e) = rel_approx_exponents(3).unwrap();
        assert_eq!((g, m, e), (Frac::new(11, 8), Frac::new(3, 2), Frac::new(3, 2)));
        let (g, m, e) = rel_approx_exponents(4).unwrap();
        assert_eq!((g, m, e), (Frac::new(23, 15), Frac::new(8, 5), Frac::new(4, 3)));
        assert_eq!(improvement_exponent(3).unwrap(), Frac::new(3, 4));
        assert!(rel_approx_exponents(2).is_err());
    }

    #[test]
    fn k1_exponents() {
        assert_eq!(k1_exponent(2).unwrap(), Frac::new(0, 1));
        assert_eq!(k1_exponent(3).unwrap(), Frac::new(3, 5));
        assert_eq!(k1_exponent(4).unwrap(), Frac::new(8, 11));
        assert_relative_eq!(k1_threshold(2, 5000.0, 3.0).unwrap(), 3.0);
    }

    #[test]
    fn ackermann_values() {
        assert_eq!(inverse_ackermann(1), 1);
        assert_eq!(inverse_ackermann(2), 1);
        assert_eq!(inverse_ackermann(3), 2);
        assert_eq!(inverse_ackermann(16), 2);
        assert_eq!(inverse_ackermann(17), 3);
        assert!(inverse_ackermann(u64::MAX) <= 4);
    }
}
