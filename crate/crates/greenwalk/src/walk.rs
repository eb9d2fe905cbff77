//! Admissible measures, convolution powers with escape accounting, Green
//! function estimates with certified bounds, and spectral-radius lower
//! bounds.
//!
//! A convolution table pushes mass through a ball's adjacency; mass that
//! steps past the ball boundary is moved to an escape ledger instead of
//! silently vanishing, so at every step `sum(mass) + escaped + killed = 1`
//! up to compensated-summation error. Green values read off the table are
//! exact lower bounds; upper bounds add three certified terms:
//!
//! * a geometric tail for walk lengths beyond the horizon, from
//!   `mu^(n)(x,z) <= rho^n`;
//! * a return bound for escaped mass, the cheaper of the per-distance
//!   geometric bound and the Carne-Varopoulos bound
//!   `mu^(m)(v,z) <= 2 rho^m exp(-d^2/2m)`;
//! * alternatively a round-trip bound: any escaping x-to-z path is at least
//!   `2(R+1) - |x| - |z|` steps long.
//!
//! All of these use a configured upper guess `rho_plus` for the spectral
//! radius; a rigorous machine bound for `rho` is out of scope, so every
//! report carries the guess and its provenance rather than hiding the
//! assumption.

use crate::cayley::{Ball, VertexId, OUTSIDE};
use crate::groups::{classify_transience, GeneratorSet, Transience};
use crate::util::KahanSum;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

const CHUNK: usize = 1 << 16;

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("asymmetric measure: weight({a}) = {wa} but weight({b}) = {wb}")]
    Asymmetric {
        a: String,
        b: String,
        wa: f64,
        wb: f64,
    },
    #[error("measure weights sum to {sum}, beyond tolerance 1e-12 from 1")]
    NonUnitSum { sum: f64 },
    #[error("generator {label} has non-positive weight {w}")]
    NonPositiveWeight { label: String, w: f64 },
    #[error("no weight given for generator {label}")]
    MissingWeight { label: String },
    #[error("weight refers to unknown generator label {label}")]
    UnknownLabel { label: String },
    #[error("Green series diverges: the group is recurrent")]
    RecurrentGroup,
    #[error("vertex {0} not reached within the horizon; raise n_max or the ball radius")]
    Unreached(VertexId),
    #[error("start vertex is forbidden")]
    ForbiddenStart,
}

/// Admissible probability measure on a generator set: symmetric, positive,
/// unit sum. Weights are kept as exact rationals (normalized so the sum is
/// exactly 1) alongside their f64 projections.
#[derive(Debug, Clone)]
pub struct Measure {
    weights: Vec<f64>,
    rationals: Vec<BigRational>,
    lambda: f64,
}

impl Measure {
    /// Checks the admissibility conditions and normalizes.
    ///
    /// Symmetry is compared exactly on the rational lifts of the supplied
    /// f64 weights, so `0.3` vs `0.2` on an inverse pair is an error while
    /// equal literals always pass.
    pub fn validate(
        gens: &GeneratorSet,
        weights: &BTreeMap<String, f64>,
    ) -> Result<Measure, WalkError> {
        for label in weights.keys() {
            if gens.index_of(label).is_none() {
                return Err(WalkError::UnknownLabel {
                    label: label.clone(),
                });
            }
        }
        let mut w = Vec::with_capacity(gens.len());
        for i in 0..gens.len() {
            let label = gens.label(i);
            let &wi = weights.get(label).ok_or_else(|| WalkError::MissingWeight {
                label: label.to_string(),
            })?;
            if wi <= 0.0 || wi.is_nan() || !wi.is_finite() {
                return Err(WalkError::NonPositiveWeight {
                    label: label.to_string(),
                    w: wi,
                });
            }
            w.push(wi);
        }
        Self::from_f64(gens, w)
    }

    /// Uniform measure `1/|S|` on the full generator set.
    pub fn uniform(gens: &GeneratorSet) -> Measure {
        let n = gens.len();
        let r = BigRational::new(BigInt::one(), BigInt::from(n));
        let rationals = vec![r; n];
        let weights = vec![1.0 / n as f64; n];
        Measure {
            lambda: weights[0],
            weights,
            rationals,
        }
    }

    fn from_f64(gens: &GeneratorSet, w: Vec<f64>) -> Result<Measure, WalkError> {
        let rats: Vec<BigRational> = w
            .iter()
            .map(|&x| BigRational::from_f64(x).expect("finite weight"))
            .collect();
        for i in 0..gens.len() {
            let j = gens.inverse_index(i);
            if rats[i] != rats[j] {
                return Err(WalkError::Asymmetric {
                    a: gens.label(i).to_string(),
                    b: gens.label(j).to_string(),
                    wa: w[i],
                    wb: w[j],
                });
            }
        }
        let sum: BigRational = rats.iter().sum();
        let sum_f = rational_to_f64(&sum);
        if (sum_f - 1.0).abs() > 1e-12 {
            return Err(WalkError::NonUnitSum { sum: sum_f });
        }
        let rationals: Vec<BigRational> = rats.into_iter().map(|r| r / &sum).collect();
        let weights: Vec<f64> = rationals.iter().map(rational_to_f64).collect();
        let lambda = weights.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Measure {
            weights,
            rationals,
            lambda,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    #[inline]
    pub fn weight(&self, gen: usize) -> f64 {
        self.weights[gen]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rational(&self, gen: usize) -> &BigRational {
        &self.rationals[gen]
    }

    /// Minimal generator weight (the paper's lambda, and the epsilon cap of
    /// the bypass-decay criterion).
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    let n = r.numer();
    let d = r.denom();
    // exact when representable; falls back to a quotient of f64 projections
    let nf = bigint_to_f64(n);
    let df = bigint_to_f64(d);
    nf / df
}

fn bigint_to_f64(x: &BigInt) -> f64 {
    let (sign, digits) = x.to_u64_digits();
    let mut acc = 0.0f64;
    for &d in digits.iter().rev() {
        acc = acc * 1.8446744073709552e19 + d as f64;
    }
    if sign == num_bigint::Sign::Minus {
        -acc
    } else {
        acc
    }
}

/// Options for a convolution run.
#[derive(Default)]
pub struct ConvolveOptions {
    /// Vertices whose arriving mass is killed (paths must avoid them).
    pub forbidden: Option<Vec<bool>>,
    /// Vertices whose per-length mass series is recorded.
    pub tracked: Vec<VertexId>,
}

/// Result of pushing `n_max` steps of mass through a ball.
///
/// `green_acc[v]` is the exact weight of length-`<= n_max` paths from `x`
/// to `v` that stay inside the ball (and avoid the forbidden set, if any).
pub struct ConvolutionTable {
    pub x: VertexId,
    pub n_max: usize,
    pub green_acc: Vec<f64>,
    /// Escape-ledger increments by step (index = step).
    pub escape_inc: Vec<f64>,
    /// Killed-at-forbidden increments by step.
    pub killed_inc: Vec<f64>,
    /// Total in-ball mass per step.
    pub total_mass: Vec<f64>,
    /// Per-length series for tracked vertices.
    pub tracked: Vec<(VertexId, Vec<f64>)>,
    /// Worst deviation of mass(n) + escaped(n) + killed(n) from 1.
    pub conservation_error: f64,
    pub ball_radius: u32,
    pub dist_x: u32,
    killed_run: bool,
}

impl ConvolutionTable {
    pub fn escape_total(&self) -> f64 {
        let mut k = KahanSum::new();
        for &e in &self.escape_inc {
            k.add(e);
        }
        k.value()
    }

    pub fn killed_total(&self) -> f64 {
        let mut k = KahanSum::new();
        for &e in &self.killed_inc {
            k.add(e);
        }
        k.value()
    }

    pub fn tracked_series(&self, v: VertexId) -> Option<&[f64]> {
        self.tracked
            .iter()
            .find(|(u, _)| *u == v)
            .map(|(_, s)| s.as_slice())
    }
}

/// Exact in-ball convolution of `measure` started at `x`.
///
/// The per-step update is race-free and deterministic: for a symmetric
/// measure the in-flow of a vertex reads the same adjacency row as its
/// out-flow (`mu(s) = mu(s^-1)`), so targets are computed independently and
/// reductions are folded in fixed chunk order regardless of thread count.
pub fn convolve(
    ball: &Ball,
    measure: &Measure,
    x: VertexId,
    n_max: usize,
    options: &ConvolveOptions,
) -> Result<ConvolutionTable, WalkError> {
    assert_eq!(measure.len(), ball.generators().len());
    let n = ball.len();
    let forbidden = options.forbidden.as_deref();
    if let Some(f) = forbidden {
        assert_eq!(f.len(), n);
        if f[x as usize] {
            return Err(WalkError::ForbiddenStart);
        }
    }

    let mut cur = vec![0.0f64; n];
    let mut next = vec![0.0f64; n];
    let mut green_acc = vec![0.0f64; n];
    cur[x as usize] = 1.0;
    green_acc[x as usize] = 1.0;

    let mut escape_inc = vec![0.0];
    let mut killed_inc = vec![0.0];
    let mut total_mass = vec![1.0];
    let mut tracked: Vec<(VertexId, Vec<f64>)> = options
        .tracked
        .iter()
        .map(|&v| (v, vec![if v == x { 1.0 } else { 0.0 }]))
        .collect();
    let mut conservation_error = 0.0f64;
    let mut escaped_cum = KahanSum::new();
    let mut killed_cum = KahanSum::new();

    let weights = measure.weights();
    let adjacency_of = |t: usize| ball.adjacency_row(t as u32);

    for _step in 1..=n_max {
        let prev_total = *total_mass.last().unwrap();
        // per-chunk: fill next, accumulate (total, killed) compensated
        let results: Vec<(f64, f64)> = next
            .par_chunks_mut(CHUNK)
            .zip(green_acc.par_chunks_mut(CHUNK))
            .enumerate()
            .map(|(ci, (nc, gc))| {
                let base = ci * CHUNK;
                let mut tot = KahanSum::new();
                let mut kil = KahanSum::new();
                for i in 0..nc.len() {
                    let t = base + i;
                    let row = adjacency_of(t);
                    let mut acc = 0.0f64;
                    for (g, &u) in row.iter().enumerate() {
                        if u != OUTSIDE {
                            acc += weights[g] * cur[u as usize];
                        }
                    }
                    if let Some(f) = forbidden {
                        if f[t] {
                            kil.add(acc);
                            nc[i] = 0.0;
                            continue;
                        }
                    }
                    nc[i] = acc;
                    gc[i] += acc;
                    tot.add(acc);
                }
                (tot.value(), kil.value())
            })
            .collect();
        let mut tot = KahanSum::new();
        let mut kil = KahanSum::new();
        for (t, k) in results {
            tot.add(t);
            kil.add(k);
        }
        let total = tot.value();
        let killed = kil.value();
        // whatever left the ball this step is the escape increment
        let esc = (prev_total - total - killed).max(0.0);
        escaped_cum.add(esc);
        killed_cum.add(killed);
        escape_inc.push(esc);
        killed_inc.push(killed);
        total_mass.push(total);
        let balance = total + escaped_cum.value() + killed_cum.value();
        conservation_error = conservation_error.max((balance - 1.0).abs());
        for (v, series) in tracked.iter_mut() {
            series.push(next[*v as usize]);
        }
        std::mem::swap(&mut cur, &mut next);
    }

    Ok(ConvolutionTable {
        x,
        n_max,
        green_acc,
        escape_inc,
        killed_inc,
        total_mass,
        tracked,
        conservation_error,
        ball_radius: ball.radius(),
        dist_x: ball.dist(x),
        killed_run: forbidden.is_some(),
    })
}

/// Green-function estimate with certified bounds.
#[derive(Debug, Clone, Serialize)]
pub struct GreenEstimate {
    pub lower: f64,
    pub upper: f64,
    pub n_max: usize,
    pub rho_plus: f64,
    pub rho_plus_provenance: String,
    pub escape_total: f64,
    /// Which escape-return bound was the binding one.
    pub tail_method: String,
    /// Set when `rho_plus >= 1` made the upper bound meaningless.
    pub unbounded: bool,
}

impl GreenEstimate {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// Upper-bound guess for the spectral radius, with provenance.
#[derive(Debug, Clone)]
pub struct RhoPlus {
    pub value: f64,
    pub provenance: String,
}

impl RhoPlus {
    pub fn user(value: f64) -> Self {
        RhoPlus {
            value,
            provenance: "user".into(),
        }
    }

    /// Default policy: nudge the best certified lower bound upward and cap
    /// below 1. The paper works with the exact rho; here the guess is
    /// surfaced in every report instead.
    pub fn from_spectral(est: &SpectralEstimate) -> Self {
        let v = (est.lower_bound / 0.98).min(1.0 - 1e-6);
        RhoPlus {
            value: v,
            provenance: format!("auto: lower {:.6} / 0.98", est.lower_bound),
        }
    }
}

/// `sum_{m >= m0} rho^m`.
fn geometric_tail(rho: f64, m0: usize) -> f64 {
    if rho >= 1.0 {
        return f64::INFINITY;
    }
    rho.powi(m0 as i32) / (1.0 - rho)
}

/// `sum_{m >= max(d,1)} min(rho^m, 2 rho^m e^{-d^2/2m})` — the certified
/// weight with which unit escaped mass at graph distance `d` from a target
/// can ever reach it.
fn return_bound(rho: f64, d: u32) -> f64 {
    if rho >= 1.0 {
        return f64::INFINITY;
    }
    let m0 = (d as usize).max(1);
    // beyond m1 the Carne factor exceeds 1 and the plain geometric tail is tighter
    let m1 = ((d as f64) * (d as f64) / (2.0 * std::f64::consts::LN_2)).ceil() as usize;
    let mut acc = KahanSum::new();
    let d2 = (d as f64) * (d as f64);
    let mut m = m0;
    while m < m1.max(m0) {
        let t = 2.0 * rho.powi(m as i32) * (-d2 / (2.0 * m as f64)).exp();
        acc.add(t.min(rho.powi(m as i32)));
        m += 1;
    }
    acc.add(geometric_tail(rho, m));
    acc.value()
}

/// Green estimate for the table's start vertex to `z`.
///
/// `lower` is the exact in-ball partial sum. `upper` adds the geometric
/// horizon tail plus the cheaper of the escape-return bounds; see the
/// module docs. For killed runs the same bounds apply (killed mass never
/// returns, escaped mass is bounded as if it could).
pub fn green_from_table(
    ball: &Ball,
    table: &ConvolutionTable,
    z: VertexId,
    rho_plus: &RhoPlus,
) -> Result<GreenEstimate, WalkError> {
    match classify_transience(ball.oracle().spec()) {
        Transience::Transient => {}
        Transience::Recurrent => return Err(WalkError::RecurrentGroup),
    }
    let lower = table.green_acc[z as usize];
    if lower <= 0.0 && !table.killed_run {
        return Err(WalkError::Unreached(z));
    }
    let rho = rho_plus.value;
    let escape_total = table.escape_total();
    let mut unbounded = false;

    let horizon_tail = geometric_tail(rho, table.n_max + 1);

    let dz = ball.radius() + 1 - ball.dist(z);
    // escaped mass can only re-enter the length-<=n_max sums if it escaped
    // early enough to travel back
    let mut reachable_escape = KahanSum::new();
    for (j, &e) in table.escape_inc.iter().enumerate() {
        if j + dz as usize <= table.n_max {
            reachable_escape.add(e);
        }
    }
    let per_escape = reachable_escape.value() * return_bound(rho, dz);
    let round_trip_len = (2 * (ball.radius() + 1)).saturating_sub(table.dist_x + ball.dist(z));
    let round_trip = if escape_total > 0.0 {
        geometric_tail(rho, round_trip_len as usize)
    } else {
        0.0
    };
    let (escape_term, tail_method) = if escape_total == 0.0 {
        (0.0, "exact".to_string())
    } else if per_escape <= round_trip {
        (per_escape, "carne-return".to_string())
    } else {
        (round_trip, "round-trip".to_string())
    };

    let upper = lower + escape_term + horizon_tail;
    if !upper.is_finite() {
        unbounded = true;
    }
    Ok(GreenEstimate {
        lower,
        upper,
        n_max: table.n_max,
        rho_plus: rho,
        rho_plus_provenance: rho_plus.provenance.clone(),
        escape_total,
        tail_method,
        unbounded,
    })
}

/// Convenience wrapper: one convolution from `x`, then the estimate at `z`.
pub fn green(
    ball: &Ball,
    measure: &Measure,
    x: VertexId,
    z: VertexId,
    n_max: usize,
    rho_plus: Option<RhoPlus>,
) -> Result<GreenEstimate, WalkError> {
    match classify_transience(ball.oracle().spec()) {
        Transience::Transient => {}
        Transience::Recurrent => return Err(WalkError::RecurrentGroup),
    }
    let table = convolve(ball, measure, x, n_max, &ConvolveOptions::default())?;
    let rho_plus = rho_plus.unwrap_or_else(|| {
        RhoPlus::from_spectral(&spectral_from_table(&table, ball, RhoPlusPolicy::Auto))
    });
    green_from_table(ball, &table, z, &rho_plus)
}

/// Spectral-radius estimate from return probabilities.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralEstimate {
    /// `(n, (mu^(2n))^(1/2n))` — certified lower bounds of rho.
    pub rho_hat: Vec<(usize, f64)>,
    /// `(n, sqrt(mu^(2n+2)/mu^(2n)))` — certified lower bounds via the
    /// Rayleigh ratio of the ball-restricted operator, far faster to
    /// converge at feasible radii.
    pub ratio_hat: Vec<(usize, f64)>,
    /// Best certified lower bound over both families.
    pub lower_bound: f64,
    /// Best lower bound over the plain root sequence only.
    pub plain_lower: f64,
    pub rho_plus: f64,
    pub rho_plus_provenance: String,
    pub escape_total: f64,
    pub n_max: usize,
}

pub enum RhoPlusPolicy {
    Auto,
    User(f64),
}

/// Spectral lower bounds from the even-step return masses of `table`.
///
/// Both estimator families are genuine lower bounds for the full group's
/// rho: in-ball return masses are exact lower bounds of `mu^(2n)(x,x)`, and
/// for the killed (ball-restricted) operator the even return masses are
/// moments of a spectral measure supported in `[-rho_R, rho_R]` with
/// `rho_R <= rho`, so both the 2n-th roots and the successive ratios stay
/// below rho.
pub fn spectral_from_table(
    table: &ConvolutionTable,
    _ball: &Ball,
    policy: RhoPlusPolicy,
) -> SpectralEstimate {
    let series = table
        .tracked_series(table.x)
        .expect("convolve for spectral must track the start vertex");
    let mut rho_hat = Vec::new();
    let mut ratio_hat = Vec::new();
    for n in 1..=(table.n_max / 2) {
        let m2n = series[2 * n];
        if m2n > 0.0 {
            rho_hat.push((n, m2n.powf(1.0 / (2.0 * n as f64))));
        }
        if 2 * n + 2 <= table.n_max {
            let m2n2 = series[2 * n + 2];
            if m2n > 0.0 && m2n2 > 0.0 {
                ratio_hat.push((n, (m2n2 / m2n).sqrt()));
            }
        }
    }
    let plain_lower = rho_hat.iter().map(|&(_, v)| v).fold(0.0, f64::max);
    let lower_bound = ratio_hat
        .iter()
        .map(|&(_, v)| v)
        .fold(plain_lower, f64::max);
    let (rho_plus, provenance) = match policy {
        RhoPlusPolicy::User(v) => (v, "user".to_string()),
        RhoPlusPolicy::Auto => (
            (lower_bound / 0.98).min(1.0 - 1e-6),
            format!("auto: lower {lower_bound:.6} / 0.98"),
        ),
    };
    SpectralEstimate {
        rho_hat,
        ratio_hat,
        lower_bound,
        plain_lower,
        rho_plus,
        rho_plus_provenance: provenance,
        escape_total: table.escape_total(),
        n_max: table.n_max,
    }
}

/// Runs a convolution at the ball center and extracts spectral bounds.
pub fn spectral_lower(
    ball: &Ball,
    measure: &Measure,
    n_max: usize,
    policy: RhoPlusPolicy,
) -> Result<SpectralEstimate, WalkError> {
    let opts = ConvolveOptions {
        forbidden: None,
        tracked: vec![ball.center_id()],
    };
    let table = convolve(ball, measure, ball.center_id(), n_max, &opts)?;
    Ok(spectral_from_table(&table, ball, policy))
}

/// Exact rational measure weight of a generator-index word.
pub fn word_weight(measure: &Measure, word: &[usize]) -> BigRational {
    let mut acc = BigRational::one();
    for &g in word {
        acc *= measure.rational(g);
    }
    debug_assert!(acc.is_positive() || word.is_empty());
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::Ball;
    use crate::groups::{make_group, GroupSpec};

    const CAP: usize = 1 << 31;

    fn f2_ball(radius: u32) -> Ball {
        let (o, g) = make_group(&GroupSpec::Free {
            rank: 2,
            extra: vec![],
        })
        .unwrap();
        Ball::build(&o, &g, &o.identity(), radius, CAP).unwrap()
    }

    fn weights_of(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn uniform_measure_on_free_group() {
        let (_, g) = make_group(&GroupSpec::Free {
            rank: 2,
            extra: vec![],
        })
        .unwrap();
        let m = Measure::validate(
            &g,
            &weights_of(&[("a", 0.25), ("A", 0.25), ("b", 0.25), ("B", 0.25)]),
        )
        .unwrap();
        assert_eq!(m.lambda(), 0.25);
    }

    #[test]
    fn asymmetric_measure_rejected() {
        let (_, g) = make_group(&GroupSpec::Free {
            rank: 2,
            extra: vec![],
        })
        .unwrap();
        let err = Measure::validate(
            &g,
            &weights_of(&[("a", 0.3), ("A", 0.2), ("b", 0.25), ("B", 0.25)]),
        )
        .unwrap_err();
        match err {
            WalkError::Asymmetric { a, b, .. } => {
                assert_eq!((a.as_str(), b.as_str()), ("a", "A"));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn six_generator_uniform() {
        let (_, g) = make_group(&GroupSpec::Free {
            rank: 2,
            extra: vec!["ab".into()],
        })
        .unwrap();
        let m = Measure::uniform(&g);
        assert_eq!(m.len(), 6);
        assert!((m.lambda() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn non_unit_sum_rejected() {
        let (_, g) = make_group(&GroupSpec::Free {
            rank: 2,
            extra: vec![],
        })
        .unwrap();
        let err = Measure::validate(
            &g,
            &weights_of(&[("a", 0.3), ("A", 0.3), ("b", 0.3), ("B", 0.3)]),
        )
        .unwrap_err();
        assert!(matches!(err, WalkError::NonUnitSum { .. }));
    }

    #[test]
    fn convolution_starts_as_dirac_and_keeps_mass() {
        let ball = f2_ball(8);
        let m = Measure::uniform(ball.generators());
        let t = convolve(&ball, &m, 0, 50, &ConvolveOptions::default()).unwrap();
        assert_eq!(t.total_mass[0], 1.0);
        assert!(
            t.conservation_error <= 1e-12,
            "err = {}",
            t.conservation_error
        );
    }

    #[test]
    fn two_step_return_mass_is_exact_quarter() {
        let ball = f2_ball(4);
        let m = Measure::uniform(ball.generators());
        let opts = ConvolveOptions {
            forbidden: None,
            tracked: vec![0],
        };
        let t = convolve(&ball, &m, 0, 6, &opts).unwrap();
        let series = t.tracked_series(0).unwrap();
        assert_eq!(series[0], 1.0);
        assert_eq!(series[1], 0.0); // odd-step parity
        assert_eq!(series[2], 0.25); // 4 of 16 two-letter words return
        assert_eq!(series[3], 0.0);
        assert_eq!(series[5], 0.0);
        // closed walks of length 6 on the 4-regular tree: 232
        assert!((series[6] - 232.0 / 4096.0).abs() < 1e-15);
    }

    #[test]
    fn green_interval_contains_tree_value() {
        let ball = f2_ball(10);
        let m = Measure::uniform(ball.generators());
        let est = green(&ball, &m, 0, 0, 200, Some(RhoPlus::user(0.87))).unwrap();
        assert!(est.contains(1.5), "[{}, {}]", est.lower, est.upper);
        assert!(est.lower > 1.49);
        assert!(est.width() < 0.15, "width {}", est.width());
    }

    #[test]
    fn green_decay_matches_hitting_probability() {
        let ball = f2_ball(12);
        let m = Measure::uniform(ball.generators());
        let t = convolve(&ball, &m, 0, 150, &ConvolveOptions::default()).unwrap();
        let g_id = t.green_acc[0];
        // Gr(iota,g)/Gr(iota,iota) = 3^{-|g|} on the 4-regular tree
        let o = ball.oracle().clone();
        let gens = ball.generators().clone();
        for word in [vec![0], vec![0, 2], vec![0, 2, 0]] {
            let z = ball.id_of(&o.evaluate(&gens, &word)).unwrap();
            let ratio = t.green_acc[z as usize] / g_id;
            let expect = 3.0f64.powi(-(word.len() as i32));
            assert!(
                (ratio / expect - 1.0).abs() < 0.01,
                "|g|={} ratio {} expect {}",
                word.len(),
                ratio,
                expect
            );
        }
    }

    #[test]
    fn green_symmetric_within_bounds() {
        let ball = f2_ball(9);
        let m = Measure::uniform(ball.generators());
        let z = ball.neighbor(ball.neighbor(0, 0), 2); // ab
        let a = green(&ball, &m, 0, z, 120, Some(RhoPlus::user(0.87))).unwrap();
        let b = green(&ball, &m, z, 0, 120, Some(RhoPlus::user(0.87))).unwrap();
        assert!(a.lower <= b.upper && b.lower <= a.upper);
        assert!((a.lower - b.lower).abs() < 1e-9);
    }

    #[test]
    fn green_on_recurrent_group_errors() {
        let (o, g) = make_group(&GroupSpec::FreeAbelian {
            rank: 2,
            extra: vec![],
        })
        .unwrap();
        let ball = Ball::build(&o, &g, &o.identity(), 6, CAP).unwrap();
        let m = Measure::uniform(&g);
        let err = green(&ball, &m, 0, 0, 50, None).unwrap_err();
        assert!(matches!(err, WalkError::RecurrentGroup));
    }

    #[test]
    fn unbounded_flag_when_rho_plus_is_one() {
        let ball = f2_ball(6);
        let m = Measure::uniform(ball.generators());
        let est = green(&ball, &m, 0, 0, 40, Some(RhoPlus::user(1.0))).unwrap();
        assert!(est.unbounded);
        assert!(est.upper.is_infinite());
        assert!(est.lower > 1.0);
    }

    #[test]
    fn spectral_empty_horizon() {
        let ball = f2_ball(4);
        let m = Measure::uniform(ball.generators());
        let est = spectral_lower(&ball, &m, 0, RhoPlusPolicy::Auto).unwrap();
        assert!(est.rho_hat.is_empty());
        assert_eq!(est.lower_bound, 0.0);
    }

    #[test]
    fn spectral_bounds_on_free_group() {
        let ball = f2_ball(8);
        let m = Measure::uniform(ball.generators());
        let est = spectral_lower(&ball, &m, 200, RhoPlusPolicy::Auto).unwrap();
        let kesten = 3f64.sqrt() / 2.0;
        assert!(
            est.lower_bound <= kesten + 1e-12,
            "lower {} vs {}",
            est.lower_bound,
            kesten
        );
        assert!(est.lower_bound > 0.82, "lower {}", est.lower_bound);
        assert!(est.plain_lower <= est.lower_bound);
        for &(_, v) in est.rho_hat.iter().chain(&est.ratio_hat) {
            assert!(v > 0.0 && v <= 1.0);
        }
    }

    #[test]
    fn plain_sequence_monotone_without_escape() {
        // Z with a radius-40 ball: no escape within 30 steps, exact masses
        let (o, g) = make_group(&GroupSpec::Free {
            rank: 1,
            extra: vec![],
        })
        .unwrap();
        let ball = Ball::build(&o, &g, &o.identity(), 40, CAP).unwrap();
        let m = Measure::uniform(&g);
        let opts = ConvolveOptions {
            forbidden: None,
            tracked: vec![0],
        };
        let t = convolve(&ball, &m, 0, 30, &opts).unwrap();
        assert_eq!(t.escape_total(), 0.0);
        let est = spectral_from_table(&t, &ball, RhoPlusPolicy::Auto);
        for w in est.rho_hat.windows(2) {
            assert!(w[1].1 >= w[0].1 - 1e-13);
        }
    }

    #[test]
    fn killed_convolution_conserves_and_kills() {
        let ball = f2_ball(6);
        let m = Measure::uniform(ball.generators());
        let a = ball.neighbor(0, 0);
        let mut forbidden = vec![false; ball.len()];
        forbidden[a as usize] = true;
        let opts = ConvolveOptions {
            forbidden: Some(forbidden),
            tracked: vec![],
        };
        let t = convolve(&ball, &m, 0, 30, &opts).unwrap();
        assert!(t.killed_total() > 0.2);
        assert!(t.conservation_error <= 1e-12);
        assert_eq!(t.green_acc[a as usize], 0.0);
        // start inside the forbidden set is refused
        let mut f2 = vec![false; ball.len()];
        f2[0] = true;
        let opts2 = ConvolveOptions {
            forbidden: Some(f2),
            tracked: vec![],
        };
        assert!(matches!(
            convolve(&ball, &m, 0, 10, &opts2),
            Err(WalkError::ForbiddenStart)
        ));
    }

    #[test]
    fn word_weight_is_exact() {
        let (_, g) = make_group(&GroupSpec::Free {
            rank: 2,
            extra: vec![],
        })
        .unwrap();
        let m = Measure::uniform(&g);
        let w = word_weight(&m, &[0, 1, 2]);
        assert_eq!(w, BigRational::new(BigInt::one(), BigInt::from(64)));
        assert_eq!(word_weight(&m, &[]), BigRational::one());
    }
}
