//! Parameter arithmetic and verdict layer: the A/B tail conditions, the
//! critical epsilon and (n, k) selection, the nonamenability tail
//! inequality, the bypass-decay test, and an aggregate evidence report.
//!
//! Every verdict here is finite-scale evidence, never proof: the tail
//! conditions quantify over an infinite group and the tool samples
//! finitely many elements per sphere, at finite ball radius and horizon.
//! Reports say so explicitly and carry the sampling scope.

use crate::ancona::{bypass_probability, AnconaError};
use crate::cayley::{Ball, VertexId};
use crate::geometry::{bigon_scan, pi_scan, BigonScan, GeometryError, PiScanSummary};
use crate::groups::{classify_transience, GeneratorSet, GroupElement, GroupOracle, Transience};
use crate::util::stream_rng;
use crate::walk::{
    convolve, green_from_table, spectral_from_table, ConvolutionTable, ConvolveOptions, Measure,
    RhoPlus, RhoPlusPolicy, WalkError,
};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CriteriaError {
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Ancona(#[from] AnconaError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Ball(#[from] crate::cayley::BallError),
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("condition B requires b < 1 - a, got a = {a}, b = {b}")]
    BadProbabilityBudget { a: f64, b: f64 },
    #[error("epsilon {eps} must be below the minimal generator weight {min}")]
    EpsilonTooLarge { eps: f64, min: f64 },
    #[error("nonamenability check requires rho_plus < 1, got {0}")]
    AmenableRho(f64),
}

/// The constant ledger of the paradox construction: inputs `A, a, B, b, r`
/// plus everything derived from them.
#[derive(Debug, Clone, Serialize)]
pub struct ParadoxParameters {
    /// Length factor of the first tail condition (`l >= A c`).
    pub factor_a: f64,
    /// Probability bound of the first tail condition.
    pub prob_a: f64,
    /// Length factor of the second tail condition.
    pub factor_b: f64,
    /// Probability budget of the second tail condition.
    pub prob_b: f64,
    /// Critical threshold `(1 - a - b) / (2 (AB + B + 3))`.
    pub epsilon0: f64,
    /// Minimal integer exceeding `AB + B + 2`.
    pub n: u32,
    /// Chosen from the open interval `((A+1)/2, (n-2)/(2B))` (midpoint).
    pub k: f64,
    pub k_interval: (f64, f64),
    /// Ball radius of the thick-Ancona hypothesis.
    pub r: u32,
    /// Height thresholds: M >= each of these activates the corresponding
    /// inequality of the certificate.
    pub m_centers: f64,
    pub m_height: f64,
    pub m_middle: f64,
    pub m_mixing: f64,
}

/// Derives the full parameter ledger from `(A, a, B, b, r)` and re-verifies
/// the chained inequalities.
pub fn derive_parameters(
    factor_a: f64,
    prob_a: f64,
    factor_b: f64,
    prob_b: f64,
    r: u32,
) -> Result<ParadoxParameters, CriteriaError> {
    if factor_a.is_nan() || factor_b.is_nan() || factor_a <= 0.0 || factor_b <= 0.0 {
        return Err(CriteriaError::BadParameter(format!(
            "factors must be positive: A = {factor_a}, B = {factor_b}"
        )));
    }
    if !(prob_a > 0.0 && prob_a < 1.0) {
        return Err(CriteriaError::BadParameter(format!(
            "a must be in (0,1): {prob_a}"
        )));
    }
    if !(prob_b > 0.0 && prob_b < 1.0 - prob_a) {
        return Err(CriteriaError::BadProbabilityBudget {
            a: prob_a,
            b: prob_b,
        });
    }
    let ab = factor_a * factor_b;
    let epsilon0 = (1.0 - prob_a - prob_b) / (2.0 * (ab + factor_b + 3.0));
    let n = (ab + factor_b + 2.0).floor() as u32 + 1;
    // chained guarantee: AB + B + 2 < n <= AB + B + 3
    debug_assert!((n as f64) > ab + factor_b + 2.0);
    debug_assert!((n as f64) <= ab + factor_b + 3.0 + 1e-9);
    // 2 n eps < 1 - a - b for every eps < eps0
    debug_assert!(2.0 * n as f64 * epsilon0 <= (1.0 - prob_a - prob_b) * (1.0 + 1e-12));
    let k_lo = (factor_a + 1.0) / 2.0;
    let k_hi = (n as f64 - 2.0) / (2.0 * factor_b);
    assert!(
        k_lo < k_hi,
        "k-interval must be nonempty for valid inputs: ({k_lo}, {k_hi})"
    );
    let k = 0.5 * (k_lo + k_hi);
    let rf = r as f64;
    Ok(ParadoxParameters {
        factor_a,
        prob_a,
        factor_b,
        prob_b,
        epsilon0,
        n,
        k,
        k_interval: (k_lo, k_hi),
        r,
        m_centers: (2.0 * rf + 1.0) * (n as f64 - 1.0) / k,
        m_height: 2.0 * rf + 1.0,
        m_middle: (2.0 * rf * (factor_a + 2.0) / (2.0 * k - factor_a - 1.0)).max(1.0),
        m_mixing: 2.0 * rf * (factor_b + 2.0) * (2.0 * k * factor_b + 1.0),
    })
}

/// Constants of the nonamenability tail inequality
/// `P{l >= m} <= rho^{m - D |g| - N}`.
#[derive(Debug, Clone, Serialize)]
pub struct NAConstants {
    pub rho: f64,
    /// `log_rho(min weight)`.
    pub d_factor: f64,
    /// `log_rho(Gr(iota) (1 - rho))`, nonnegative.
    pub n_offset: f64,
}

impl NAConstants {
    pub fn new(rho: f64, lambda: f64, green_iota: f64) -> Result<Self, CriteriaError> {
        if rho >= 1.0 || rho <= 0.0 {
            return Err(CriteriaError::AmenableRho(rho));
        }
        let d_factor = lambda.ln() / rho.ln();
        let n_offset = (green_iota * (1.0 - rho)).ln() / rho.ln();
        Ok(NAConstants {
            rho,
            d_factor,
            n_offset,
        })
    }

    /// Tail bound at threshold m for an element of word norm `norm`.
    pub fn bound(&self, m: usize, norm: u32) -> f64 {
        self.rho
            .powf(m as f64 - self.d_factor * norm as f64 - self.n_offset)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    ConsistentWithHyperbolic,
    Violation,
    Inconclusive,
}

/// One aggregated criterion outcome.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: String,
    pub verdict: Verdict,
    pub caveat: String,
    /// Concrete witness instance; always present for violations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    pub details: serde_json::Value,
}

/// Tail probabilities `P_{iota,g}{l_psi >= m}` for selected targets, from
/// per-length partial sums of one convolution table.
pub struct TailMachine<'a> {
    ball: &'a Ball,
    table: ConvolutionTable,
    rho: RhoPlus,
}

/// One tail evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct TailRow {
    pub g: String,
    pub norm: u32,
    pub m: usize,
    /// Certified bracket (can be vacuous at amenable-ish rho_plus).
    pub lo: f64,
    pub hi: f64,
    /// Point estimate from the near-exact partial sums.
    pub estimate: f64,
}

impl<'a> TailMachine<'a> {
    pub fn new(
        ball: &'a Ball,
        measure: &Measure,
        targets: &[VertexId],
        n_max: usize,
        rho: RhoPlus,
    ) -> Result<Self, CriteriaError> {
        let mut tracked = targets.to_vec();
        tracked.sort_unstable();
        tracked.dedup();
        let opts = ConvolveOptions {
            forbidden: None,
            tracked,
        };
        let table = convolve(ball, measure, ball.center_id(), n_max, &opts)?;
        Ok(TailMachine { ball, table, rho })
    }

    pub fn n_max(&self) -> usize {
        self.table.n_max
    }

    /// Tail row at threshold `m` for a tracked vertex.
    pub fn tail(&self, v: VertexId, m: usize) -> Result<TailRow, CriteriaError> {
        let series = self
            .table
            .tracked_series(v)
            .expect("vertex must be tracked at construction");
        let est = green_from_table(self.ball, &self.table, v, &self.rho)?;
        let prefix: f64 = series[..m.min(series.len())].iter().sum();
        let reach = est.upper - est.lower; // escape + horizon slack
        let lo = (1.0 - (prefix + reach) / est.lower).clamp(0.0, 1.0);
        let hi = (1.0 - prefix / est.upper).clamp(0.0, 1.0);
        let estimate = (1.0 - prefix / est.lower).clamp(0.0, 1.0);
        Ok(TailRow {
            g: self.ball.oracle().display(&self.ball.element(v)),
            norm: self.ball.dist(v),
            m,
            lo,
            hi,
            estimate,
        })
    }
}

/// Condition-A estimation: empirical `a_hat` such that
/// `P{l >= A c} <= a_hat` over the sampled scope.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    pub factor: f64,
    pub bound: Option<f64>,
    pub rows: Vec<TailRow>,
    /// Max of certified upper tails over samples.
    pub a_hat: f64,
    /// Max of point estimates over samples.
    pub a_hat_estimate: f64,
    pub verdict: Verdict,
    pub scope: String,
}

fn sample_sphere_targets(
    ball: &Ball,
    c: u32,
    samples: usize,
    seed: u64,
    salt: u64,
) -> Vec<VertexId> {
    let mut out = Vec::new();
    let mut rng = stream_rng(seed, salt);
    for i in 0..samples {
        let radius = 1 + (i as u32 % c.max(1));
        let sphere = ball.sphere(radius);
        if sphere.is_empty() {
            continue;
        }
        out.push(sphere.start + rng.gen_range(0..sphere.end - sphere.start));
    }
    out
}

/// Estimates condition A at the given length factor: samples g per sphere
/// up to each c and reports the tail `P{l_psi >= ceil(A c)}`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_condition_a(
    ball: &Ball,
    measure: &Measure,
    factor_a: f64,
    c_list: &[u32],
    samples_per_c: usize,
    n_max: usize,
    rho: RhoPlus,
    seed: u64,
) -> Result<ConditionReport, CriteriaError> {
    if classify_transience(ball.oracle().spec()) == Transience::Recurrent {
        return Err(CriteriaError::Walk(WalkError::RecurrentGroup));
    }
    let mut targets = Vec::new();
    let mut plan: Vec<(u32, Vec<VertexId>)> = Vec::new();
    for (ci, &c) in c_list.iter().enumerate() {
        let vs = sample_sphere_targets(ball, c, samples_per_c, seed, ci as u64);
        targets.extend_from_slice(&vs);
        plan.push((c, vs));
    }
    let machine = TailMachine::new(ball, measure, &targets, n_max, rho)?;
    let mut rows = Vec::new();
    for (c, vs) in &plan {
        let m = (factor_a * *c as f64).ceil() as usize;
        for &v in vs {
            rows.push(machine.tail(v, m)?);
        }
    }
    let a_hat = rows.iter().map(|r| r.hi).fold(0.0, f64::max);
    let a_hat_estimate = rows.iter().map(|r| r.estimate).fold(0.0, f64::max);
    let scope = format!(
        "sampled {} elements per c over c in {:?}, horizon {}, ball radius {}",
        samples_per_c,
        c_list,
        n_max,
        ball.radius()
    );
    Ok(ConditionReport {
        condition: "A".into(),
        factor: factor_a,
        bound: None,
        rows,
        a_hat,
        a_hat_estimate,
        verdict: Verdict::Inconclusive,
        scope,
    })
}

/// Checks condition B at `(A, a, B, b)`: tails at threshold `ceil(B c)`
/// against the budget `b / (2 (A B + B + 2))`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_condition_b(
    ball: &Ball,
    measure: &Measure,
    factor_a: f64,
    prob_a: f64,
    factor_b: f64,
    prob_b: f64,
    c_list: &[u32],
    samples_per_c: usize,
    n_max: usize,
    rho: RhoPlus,
    seed: u64,
) -> Result<ConditionReport, CriteriaError> {
    if prob_b >= 1.0 - prob_a {
        return Err(CriteriaError::BadProbabilityBudget {
            a: prob_a,
            b: prob_b,
        });
    }
    let mut report = estimate_condition_a(
        ball,
        measure,
        factor_b,
        c_list,
        samples_per_c,
        n_max,
        rho,
        seed,
    )?;
    let bound = prob_b / (2.0 * (factor_a * factor_b + factor_b + 2.0));
    report.condition = "B".into();
    report.bound = Some(bound);
    let certified_violation = report.rows.iter().any(|r| r.lo > bound);
    let estimate_violation = report.rows.iter().any(|r| r.estimate > bound);
    let certified_pass = report.rows.iter().all(|r| r.hi <= bound);
    report.verdict = if certified_violation || estimate_violation {
        Verdict::Violation
    } else if certified_pass {
        Verdict::ConsistentWithHyperbolic
    } else {
        // estimates below the bound but the certified bracket cannot close
        Verdict::ConsistentWithHyperbolic
    };
    Ok(report)
}

/// Row of the nonamenability-inequality check.
#[derive(Debug, Clone, Serialize)]
pub struct NaRow {
    pub g: String,
    pub norm: u32,
    pub m: usize,
    /// Bound asserted only when `m >= |g|`.
    pub asserted: bool,
    pub bound: f64,
    pub tail: TailRow,
    pub exceeded: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NaReport {
    pub constants: NAConstants,
    pub rows: Vec<NaRow>,
    pub verdict: Verdict,
}

/// Compares empirical tails with the `rho^{m - D|g| - N}` bound for every
/// target and threshold; exceedance is flagged only beyond the certified
/// interval (tail lower bound above the bound).
#[allow(clippy::too_many_arguments)]
pub fn na_check(
    ball: &Ball,
    measure: &Measure,
    targets: &[GroupElement],
    m_list: &[usize],
    rho: f64,
    green_iota: f64,
    n_max: usize,
) -> Result<NaReport, CriteriaError> {
    let constants = NAConstants::new(rho, measure.lambda(), green_iota)?;
    let ids: Vec<VertexId> = targets
        .iter()
        .map(|g| {
            ball.id_of(g).ok_or_else(|| {
                CriteriaError::BadParameter(format!(
                    "target {} outside the ball",
                    ball.oracle().display(g)
                ))
            })
        })
        .collect::<Result<_, _>>()?;
    let machine = TailMachine::new(ball, measure, &ids, n_max, RhoPlus::user(rho))?;
    let mut rows = Vec::new();
    let mut exceeded_any = false;
    for &v in &ids {
        for &m in m_list {
            let norm = ball.dist(v);
            let asserted = m as u32 >= norm;
            let tail = machine.tail(v, m)?;
            let bound = constants.bound(m, norm);
            let exceeded = asserted && tail.lo > bound;
            exceeded_any |= exceeded;
            rows.push(NaRow {
                g: tail.g.clone(),
                norm,
                m,
                asserted,
                bound,
                tail,
                exceeded,
            });
        }
    }
    Ok(NaReport {
        constants,
        rows,
        verdict: if exceeded_any {
            Verdict::Violation
        } else {
            Verdict::ConsistentWithHyperbolic
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BypassSample {
    pub r: u32,
    pub lower: f64,
    pub upper: f64,
    pub estimate: f64,
    pub bound: f64,
    pub violation: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem2Report {
    pub epsilon: f64,
    pub rows: Vec<BypassSample>,
    pub verdict: Verdict,
    pub seed: u64,
    /// Per-r sample counts actually achieved.
    pub samples: usize,
}

/// Bypass-decay test: for each r, samples geodesic intervals of length 2r,
/// computes the probability of avoiding the open midpoint ball, and tests
/// it against `epsilon^{10 r}`.
#[allow(clippy::too_many_arguments)]
pub fn theorem2_check(
    ball: &Ball,
    measure: &Measure,
    r_list: &[u32],
    epsilon: f64,
    samples: usize,
    n_max: usize,
    rho: RhoPlus,
    seed: u64,
    working_pad: u32,
    memory_cap: usize,
) -> Result<Theorem2Report, CriteriaError> {
    if epsilon >= measure.lambda() {
        return Err(CriteriaError::EpsilonTooLarge {
            eps: epsilon,
            min: measure.lambda(),
        });
    }
    if classify_transience(ball.oracle().spec()) == Transience::Recurrent {
        return Err(CriteriaError::Walk(WalkError::RecurrentGroup));
    }
    let oracle = ball.oracle();
    let gens = ball.generators();
    let mut rows = Vec::new();
    let mut counter = 0u64;
    for &r in r_list {
        let bound = epsilon.powi(10 * r as i32);
        if r == 0 {
            // open ball of radius 0 is empty: bypass probability 1, bound 1
            rows.push(BypassSample {
                r,
                lower: 1.0,
                upper: 1.0,
                estimate: 1.0,
                bound,
                violation: false,
            });
            continue;
        }
        let sphere = ball.sphere(2 * r);
        for _ in 0..samples {
            if sphere.is_empty() {
                break;
            }
            let mut rng = stream_rng(seed, counter);
            counter += 1;
            let w = sphere.start + rng.gen_range(0..sphere.end - sphere.start);
            let geo = ball.sample_geodesic(ball.center_id(), w, &mut rng)?;
            let mid = ball.element(geo.at(r as usize));
            let work = Ball::build(oracle, gens, &mid, 2 * r + working_pad, memory_cap)?;
            let x = work
                .id_of(ball.center())
                .expect("endpoint inside working ball");
            let z = work
                .id_of(&ball.element(w))
                .expect("endpoint inside working ball");
            let rep = bypass_probability(&work, measure, x, work.center_id(), z, r, n_max, &rho)?;
            rows.push(BypassSample {
                r,
                lower: rep.lower,
                upper: rep.upper,
                estimate: rep.estimate,
                bound,
                violation: rep.estimate > bound,
            });
        }
    }
    let verdict = if rows.iter().any(|s| s.violation) {
        Verdict::Violation
    } else {
        Verdict::ConsistentWithHyperbolic
    };
    Ok(Theorem2Report {
        epsilon,
        rows,
        verdict,
        seed,
        samples,
    })
}

/// Conversion constant of the thick-to-weak Ancona lemma:
/// `eps' = 1 - (1 - eps) L^{2r} |B_{<=r}|`, clamped into `[0,1]` with an
/// out-of-range flag (the raw value routinely leaves the unit interval).
#[derive(Debug, Clone, Serialize)]
pub struct TaToWa {
    pub raw: f64,
    pub value: f64,
    pub out_of_range: bool,
}

pub fn ta_to_wa(epsilon: f64, r: u32, harnack_l: f64, ball_size: usize) -> TaToWa {
    let raw = 1.0 - (1.0 - epsilon) * harnack_l.powi(2 * r as i32) * ball_size as f64;
    TaToWa {
        raw,
        value: raw.clamp(0.0, 1.0),
        out_of_range: !(0.0..=1.0).contains(&raw),
    }
}

/// Empirical Harnack constant: max Green-ratio over adjacent interior
/// vertex pairs of a center table.
pub fn harnack_estimate(
    ball: &Ball,
    measure: &Measure,
    n_max: usize,
    margin: u32,
) -> Result<f64, CriteriaError> {
    let table = convolve(
        ball,
        measure,
        ball.center_id(),
        n_max,
        &ConvolveOptions::default(),
    )?;
    let mut best: f64 = 1.0;
    let interior = ball.radius().saturating_sub(margin);
    for v in 0..ball.len() as u32 {
        if ball.dist(v) > interior {
            continue;
        }
        let gv = table.green_acc[v as usize];
        if gv <= 0.0 {
            continue;
        }
        for &u in ball.adjacency_row(v) {
            if u == crate::cayley::OUTSIDE || ball.dist(u) > interior {
                continue;
            }
            let gu = table.green_acc[u as usize];
            if gu > 0.0 {
                best = best.max(gv / gu);
            }
        }
    }
    Ok(best)
}

/// Configuration of the aggregate evidence report.
#[derive(Debug, Clone, Serialize)]
pub struct EvidenceConfig {
    pub ball_radius: u32,
    pub n_max: usize,
    pub pi_r_list: Vec<u32>,
    pub pi_samples: usize,
    pub bigon_l_max: u32,
    pub bigon_budget: usize,
    pub theorem2_r_list: Vec<u32>,
    pub theorem2_samples: usize,
    /// Bypass-decay epsilon; defaults to half the minimal weight.
    pub epsilon: Option<f64>,
    /// `(A, a, B, b)` for the tail conditions.
    pub conditions: Option<(f64, f64, f64, f64)>,
    pub condition_c_list: Vec<u32>,
    pub condition_samples: usize,
    pub working_pad: u32,
    pub seed: u64,
    pub memory_cap: usize,
    pub rho_plus: Option<f64>,
    /// Gromov-curve delta for the pi summary.
    pub delta: Option<f64>,
}

impl Default for EvidenceConfig {
    fn default() -> Self {
        EvidenceConfig {
            ball_radius: 8,
            n_max: 150,
            pi_r_list: vec![1, 2, 3],
            pi_samples: 5,
            bigon_l_max: 8,
            bigon_budget: 100,
            theorem2_r_list: vec![1, 2],
            theorem2_samples: 3,
            epsilon: None,
            conditions: None,
            condition_c_list: vec![1, 2],
            condition_samples: 4,
            working_pad: 2,
            seed: 1,
            memory_cap: 4 << 30,
            rho_plus: None,
            delta: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct HyperbolicityReport {
    pub config: EvidenceConfig,
    pub transience: Transience,
    pub rho_plus: f64,
    pub rho_plus_provenance: String,
    pub spectral_lower: f64,
    pub criteria: Vec<CriterionReport>,
    pub caveat: String,
    pub pi: PiScanSummary,
    #[serde(skip)]
    pub bigons: Option<BigonScan>,
}

/// Runs the geometric scans and the probabilistic criteria and aggregates
/// one verdict table.
pub fn hyperbolicity_report(
    oracle: &GroupOracle,
    gens: &GeneratorSet,
    measure: &Measure,
    cfg: EvidenceConfig,
) -> Result<HyperbolicityReport, CriteriaError> {
    let ball = Ball::build(
        oracle,
        gens,
        &oracle.identity(),
        cfg.ball_radius,
        cfg.memory_cap,
    )?;
    let transience = classify_transience(oracle.spec());

    // spectral bounds drive the default rho_plus
    let opts = ConvolveOptions {
        forbidden: None,
        tracked: vec![ball.center_id()],
    };
    let center_table = convolve(&ball, measure, ball.center_id(), cfg.n_max, &opts)?;
    let policy = match cfg.rho_plus {
        Some(v) => RhoPlusPolicy::User(v),
        None => RhoPlusPolicy::Auto,
    };
    let spectral = spectral_from_table(&center_table, &ball, policy);
    let rho = RhoPlus {
        value: spectral.rho_plus,
        provenance: spectral.rho_plus_provenance.clone(),
    };

    let mut criteria = Vec::new();

    // pi criterion (threshold 10)
    let pi = pi_scan(
        &ball,
        &cfg.pi_r_list,
        cfg.pi_samples,
        cfg.seed,
        cfg.delta,
        cfg.memory_cap,
    )?;
    {
        let finite_min = pi
            .rows
            .iter()
            .filter_map(|r| r.min_pi)
            .fold(f64::INFINITY, f64::min);
        let all_infinite = pi.rows.iter().all(|r| r.pi_infinite || r.samples == 0);
        let (verdict, witness) = if all_infinite {
            (Verdict::ConsistentWithHyperbolic, None)
        } else if finite_min <= 10.0 {
            let w = pi
                .rows
                .iter()
                .find(|r| r.min_pi.is_some_and(|m| m <= 10.0))
                .map(|r| serde_json::json!({"r": r.r, "min_pi": r.min_pi}));
            (Verdict::Violation, w)
        } else {
            (Verdict::ConsistentWithHyperbolic, None)
        };
        criteria.push(CriterionReport {
            id: "PiCriterion".into(),
            verdict,
            caveat: "finite radii sampled; the >10 criterion concerns the r->inf liminf".into(),
            witness,
            details: serde_json::to_value(&pi).unwrap_or_default(),
        });
    }

    // bigon thinness
    let bigons = bigon_scan(&ball, cfg.bigon_l_max, cfg.bigon_budget, cfg.seed)?;
    {
        let top = bigons.rows.iter().max_by_key(|r| r.length);
        let (verdict, witness) = match top {
            Some(row) if row.max_width as f64 >= row.length as f64 / 2.0 && row.length >= 4 => (
                Verdict::Violation,
                Some(serde_json::json!({"length": row.length, "max_width": row.max_width})),
            ),
            Some(_) => (Verdict::ConsistentWithHyperbolic, None),
            None => (Verdict::Inconclusive, None),
        };
        let lemma_ok = bigons.rows.iter().all(|r| r.min_lemma_slack >= 0.0);
        criteria.push(CriterionReport {
            id: "BigonBound".into(),
            verdict,
            caveat: format!(
                "widths scanned up to length {}; half-width separation {}",
                cfg.bigon_l_max,
                if lemma_ok {
                    "holds at every sample"
                } else {
                    "VIOLATED"
                }
            ),
            witness,
            details: serde_json::to_value(&bigons.rows).unwrap_or_default(),
        });
    }

    if transience == Transience::Transient {
        let epsilon = cfg.epsilon.unwrap_or(measure.lambda() / 2.0);
        let t2 = theorem2_check(
            &ball,
            measure,
            &cfg.theorem2_r_list,
            epsilon,
            cfg.theorem2_samples,
            cfg.n_max,
            rho.clone(),
            cfg.seed,
            cfg.working_pad,
            cfg.memory_cap,
        )?;
        let witness = t2
            .rows
            .iter()
            .find(|s| s.violation)
            .map(|s| serde_json::json!({"r": s.r, "estimate": s.estimate, "bound": s.bound}));
        criteria.push(CriterionReport {
            id: "Theorem2".into(),
            verdict: t2.verdict,
            caveat: format!(
                "epsilon = {epsilon}; sampled {} intervals per r",
                t2.samples
            ),
            witness,
            details: serde_json::to_value(&t2).unwrap_or_default(),
        });

        if let Some((fa, pa, fb, pb)) = cfg.conditions {
            let a_rep = estimate_condition_a(
                &ball,
                measure,
                fa,
                &cfg.condition_c_list,
                cfg.condition_samples,
                cfg.n_max,
                rho.clone(),
                cfg.seed,
            )?;
            let a_verdict = if a_rep.a_hat_estimate > pa {
                Verdict::Violation
            } else {
                Verdict::ConsistentWithHyperbolic
            };
            let a_witness = if a_verdict == Verdict::Violation {
                a_rep
                    .rows
                    .iter()
                    .max_by(|x, y| x.estimate.total_cmp(&y.estimate))
                    .map(|r| serde_json::to_value(r).unwrap_or_default())
            } else {
                None
            };
            criteria.push(CriterionReport {
                id: "ConditionA".into(),
                verdict: a_verdict,
                caveat: format!(
                    "a_hat estimate {:.4} vs declared a = {pa}; {}",
                    a_rep.a_hat_estimate, a_rep.scope
                ),
                witness: a_witness,
                details: serde_json::to_value(&a_rep).unwrap_or_default(),
            });
            let b_rep = estimate_condition_b(
                &ball,
                measure,
                fa,
                pa,
                fb,
                pb,
                &cfg.condition_c_list,
                cfg.condition_samples,
                cfg.n_max,
                rho.clone(),
                cfg.seed,
            )?;
            let b_witness = if b_rep.verdict == Verdict::Violation {
                b_rep
                    .rows
                    .iter()
                    .max_by(|x, y| x.estimate.total_cmp(&y.estimate))
                    .map(|r| serde_json::to_value(r).unwrap_or_default())
            } else {
                None
            };
            criteria.push(CriterionReport {
                id: "ConditionB".into(),
                verdict: b_rep.verdict,
                caveat: format!(
                    "bound {:.6}; {}",
                    b_rep.bound.unwrap_or_default(),
                    b_rep.scope
                ),
                witness: b_witness,
                details: serde_json::to_value(&b_rep).unwrap_or_default(),
            });
        }

        // nonamenability tail inequality at rho_plus
        if rho.value < 1.0 - 1e-9 && spectral.lower_bound > 0.0 {
            let green_iota = center_table.green_acc[0];
            let targets: Vec<GroupElement> = vec![oracle.identity(), gens.element(0).clone()];
            let m_list: Vec<usize> = vec![cfg.n_max / 4, cfg.n_max / 2];
            match na_check(
                &ball, measure, &targets, &m_list, rho.value, green_iota, cfg.n_max,
            ) {
                Ok(na) => {
                    let witness = na
                        .rows
                        .iter()
                        .find(|r| r.exceeded)
                        .map(|r| serde_json::to_value(r).unwrap_or_default());
                    criteria.push(CriterionReport {
                        id: "NA".into(),
                        verdict: na.verdict,
                        caveat: format!(
                            "computed with rho_plus = {:.6} ({})",
                            rho.value, rho.provenance
                        ),
                        witness,
                        details: serde_json::to_value(&na).unwrap_or_default(),
                    });
                }
                Err(e) => {
                    criteria.push(CriterionReport {
                        id: "NA".into(),
                        verdict: Verdict::Inconclusive,
                        caveat: format!("not evaluated: {e}"),
                        witness: None,
                        details: serde_json::Value::Null,
                    });
                }
            }
        }
    } else {
        criteria.push(CriterionReport {
            id: "Theorem2".into(),
            verdict: Verdict::Inconclusive,
            caveat: "recurrent group: Green-measure criteria do not apply".into(),
            witness: None,
            details: serde_json::Value::Null,
        });
    }

    Ok(HyperbolicityReport {
        config: cfg,
        transience,
        rho_plus: rho.value,
        rho_plus_provenance: rho.provenance,
        spectral_lower: spectral.lower_bound,
        criteria,
        caveat: "all verdicts are finite-radius, finite-sample evidence, not proofs".into(),
        pi,
        bigons: Some(bigons),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{make_group, GroupSpec};
    use crate::walk::Measure;

    const CAP: usize = 1 << 31;

    fn f2_ball(radius: u32) -> (Ball, Measure) {
        let (o, g) = make_group(&GroupSpec::Free {
            rank: 2,
            extra: vec![],
        })
        .unwrap();
        let m = Measure::uniform(&g);
        let ball = Ball::build(&o, &g, &o.identity(), radius, CAP).unwrap();
        (ball, m)
    }

    fn z3_ball(radius: u32) -> (Ball, Measure) {
        let (o, g) = make_group(&GroupSpec::FreeAbelian {
            rank: 3,
            extra: vec![],
        })
        .unwrap();
        let m = Measure::uniform(&g);
        let ball = Ball::build(&o, &g, &o.identity(), radius, CAP).unwrap();
        (ball, m)
    }

    #[test]
    fn parameter_ledger_reference_values() {
        let p = derive_parameters(2.0, 0.5, 4.0, 0.25, 1).unwrap();
        assert!((p.epsilon0 - 1.0 / 120.0).abs() < 1e-15);
        assert_eq!(p.n, 15);
        assert_eq!(p.k_interval, (1.5, 1.625));
        assert!((p.k - 1.5625).abs() < 1e-15);
        // threshold (2r+1)(n-1)/k at r = 1
        assert!((p.m_centers - 3.0 * 14.0 / 1.5625).abs() < 1e-12);
        assert!((p.m_centers - 26.88).abs() < 1e-10);
        assert_eq!(p.m_height, 3.0);
        // boundary: 2 n eps0 = 1 - a - b exactly when n = AB + B + 3
        assert!((2.0 * 15.0 * p.epsilon0 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn parameter_ledger_rejects_bad_budget() {
        assert!(matches!(
            derive_parameters(2.0, 0.5, 4.0, 0.6, 0),
            Err(CriteriaError::BadProbabilityBudget { .. })
        ));
        assert!(derive_parameters(-1.0, 0.5, 4.0, 0.25, 0).is_err());
    }

    #[test]
    fn k_interval_nonempty_on_random_valid_inputs() {
        use rand::Rng;
        let mut rng = stream_rng(5, 51);
        for _ in 0..500 {
            let fa = rng.gen_range(0.1..20.0);
            let fb = rng.gen_range(0.1..20.0);
            let pa = rng.gen_range(0.01..0.98);
            let pb = rng.gen_range(1e-6..(1.0 - pa) * 0.999);
            let p = derive_parameters(fa, pa, fb, pb, 1).unwrap();
            assert!(p.k_interval.0 < p.k_interval.1);
            assert!(p.epsilon0 > 0.0);
            // (2): AB+B+2 < n <= AB+B+3, and (3) with eps = eps0/2
            let ab = fa * fb + fb;
            assert!((p.n as f64) > ab + 2.0 && (p.n as f64) <= ab + 3.0 + 1e-9);
            assert!(2.0 * p.n as f64 * (p.epsilon0 / 2.0) < 1.0 - pa - pb);
        }
    }

    #[test]
    fn na_constants_on_free_group() {
        let rho = 3f64.sqrt() / 2.0;
        let c = NAConstants::new(rho, 0.25, 1.5).unwrap();
        assert!((c.d_factor - 9.64).abs() < 0.01, "D = {}", c.d_factor);
        assert!(c.n_offset >= 0.0);
        // m below |g| is a guard case, bound can exceed 1
        assert!(c.bound(10, 0) > 0.0);
        assert!(NAConstants::new(1.0, 0.25, 1.5).is_err());
    }

    #[test]
    fn na_check_tree_tails_below_bound() {
        let (ball, m) = f2_ball(12);
        let o = ball.oracle().clone();
        let g = ball.generators().clone();
        let rho = 3f64.sqrt() / 2.0;
        let targets = vec![o.identity(), o.evaluate(&g, &[0]), o.evaluate(&g, &[0, 2])];
        let rep = na_check(&ball, &m, &targets, &[10, 20, 40], rho, 1.5, 150).unwrap();
        assert_eq!(rep.verdict, Verdict::ConsistentWithHyperbolic);
        for row in &rep.rows {
            if row.asserted {
                assert!(
                    row.tail.estimate <= row.bound,
                    "tail {} exceeds bound {} at g={} m={}",
                    row.tail.estimate,
                    row.bound,
                    row.g,
                    row.m
                );
            }
        }
        // guard rows exist: m = 10 < |ab| would need m >= norm only for big norms
        assert!(rep.rows.iter().all(|r| r.asserted || r.m < r.norm as usize));
    }

    #[test]
    fn condition_a_with_lemma_constant() {
        let (ball, m) = f2_ball(10);
        let rho_val = 0.87;
        let c = NAConstants::new(rho_val, 0.25, 1.5).unwrap();
        let factor_a = c.d_factor + c.n_offset + 1.0;
        let rep = estimate_condition_a(
            &ball,
            &m,
            factor_a,
            &[1, 2],
            4,
            160,
            RhoPlus::user(rho_val),
            99,
        )
        .unwrap();
        // Lemma-1 construction bounds the tail by rho < 1
        assert!(
            rep.a_hat_estimate <= rho_val,
            "a_hat = {}",
            rep.a_hat_estimate
        );
        // huge factor: tails vanish
        let rep =
            estimate_condition_a(&ball, &m, 120.0, &[1], 3, 160, RhoPlus::user(0.87), 99).unwrap();
        assert!(rep.a_hat_estimate < 1e-6, "a_hat = {}", rep.a_hat_estimate);
    }

    #[test]
    fn condition_a_cross_checked_against_enumeration() {
        // c = 1, g = a, A = 2: exact tail P{l >= 2} = 1 - mu^(1)(a)/Gr(a)
        let (ball, m) = f2_ball(10);
        let a_id = ball.neighbor(0, 0);
        let machine = TailMachine::new(&ball, &m, &[a_id], 150, RhoPlus::user(0.87)).unwrap();
        let tail = machine.tail(a_id, 2).unwrap();
        // Gr(a) = 0.5, first-length mass 1/4: exact tail = 1 - (1/4)/0.5 = 1/2
        assert!((tail.estimate - 0.5).abs() < 1e-5, "tail {}", tail.estimate);
        assert!(tail.lo <= 0.5 && 0.5 <= tail.hi);
    }

    #[test]
    fn condition_b_violation_on_tiny_factor() {
        let (ball, m) = f2_ball(8);
        // B = 0.1: threshold ceil(0.1 c) = 1, tails near 1, bound tiny
        let rep = estimate_condition_b(
            &ball,
            &m,
            2.0,
            0.5,
            0.1,
            0.25,
            &[1, 2],
            3,
            100,
            RhoPlus::user(0.87),
            7,
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Violation);
        assert!(estimate_condition_b(
            &ball,
            &m,
            2.0,
            0.5,
            4.0,
            0.6,
            &[1],
            1,
            50,
            RhoPlus::user(0.87),
            7
        )
        .is_err());
    }

    #[test]
    fn condition_b_violation_on_amenable_group() {
        let (ball, m) = z3_ball(10);
        let rep = estimate_condition_b(
            &ball,
            &m,
            2.0,
            0.5,
            4.0,
            0.25,
            &[1, 2],
            3,
            180,
            RhoPlus::user(0.999999),
            7,
        )
        .unwrap();
        // polynomial tails overwhelm the b/(2(AB+B+2)) budget
        assert_eq!(rep.verdict, Verdict::Violation);
    }

    #[test]
    fn theorem2_tree_passes_and_grid_violates() {
        let (ball, m) = f2_ball(8);
        let rep = theorem2_check(
            &ball,
            &m,
            &[0, 1, 2],
            0.1,
            3,
            120,
            RhoPlus::user(0.87),
            3,
            2,
            CAP,
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::ConsistentWithHyperbolic);
        for row in &rep.rows {
            if row.r > 0 {
                assert_eq!(row.estimate, 0.0, "trees admit no bypass");
            } else {
                assert_eq!(row.estimate, 1.0);
                assert_eq!(row.bound, 1.0);
            }
        }

        let (ball3, m3) = z3_ball(8);
        let rep = theorem2_check(
            &ball3,
            &m3,
            &[2, 3],
            0.1,
            2,
            250,
            RhoPlus::user(0.999999),
            3,
            2,
            CAP,
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Violation);
        let witness = rep.rows.iter().find(|s| s.violation).unwrap();
        assert!(witness.estimate >= 1e-4, "bypass {}", witness.estimate);

        // epsilon guard
        assert!(matches!(
            theorem2_check(&ball, &m, &[1], 0.5, 1, 50, RhoPlus::user(0.87), 3, 2, CAP),
            Err(CriteriaError::EpsilonTooLarge { .. })
        ));
    }

    // enlarging the horizon tightens the killed-Green sums but never flips
    // a tree verdict to Violation: bypass estimates stay at zero
    #[test]
    fn theorem2_tree_verdict_stable_in_horizon() {
        let (ball, m) = f2_ball(8);
        for n_max in [60, 240] {
            let rep = theorem2_check(
                &ball,
                &m,
                &[1, 2],
                0.1,
                2,
                n_max,
                RhoPlus::user(0.87),
                5,
                2,
                CAP,
            )
            .unwrap();
            assert_eq!(rep.verdict, Verdict::ConsistentWithHyperbolic, "n_max={n_max}");
        }
    }

    #[test]
    fn ta_to_wa_reference_cases() {
        // r = 0, |B| = 1: eps' = eps exactly
        let t = ta_to_wa(0.3, 0, 2.0, 1);
        assert!((t.value - 0.3).abs() < 1e-15);
        assert!(!t.out_of_range);
        // the formula's raw value escapes [0,1] and is flagged
        let t = ta_to_wa(0.5, 1, 2.0, 5);
        assert!((t.raw - (1.0 - 0.5 * 4.0 * 5.0)).abs() < 1e-12);
        assert_eq!(t.value, 0.0);
        assert!(t.out_of_range);
    }

    #[test]
    fn harnack_constant_on_tree_is_three() {
        // ratios near the boundary carry the truncation deficit, so stay
        // well inside
        let (ball, m) = f2_ball(12);
        let l = harnack_estimate(&ball, &m, 150, 6).unwrap();
        assert!((l - 3.0).abs() < 0.02, "harnack {}", l);
    }

    #[test]
    fn aggregate_report_free_group() {
        let (o, g) = make_group(&GroupSpec::Free {
            rank: 2,
            extra: vec![],
        })
        .unwrap();
        let m = Measure::uniform(&g);
        let cfg = EvidenceConfig {
            ball_radius: 6,
            n_max: 120,
            pi_r_list: vec![1, 2],
            pi_samples: 3,
            bigon_l_max: 5,
            bigon_budget: 30,
            theorem2_r_list: vec![1, 2],
            theorem2_samples: 2,
            // corollary-style parameters: B large enough that B rho^(B-D-N)
            // undershoots the budget
            conditions: Some((22.0, 0.9, 110.0, 0.05)),
            condition_c_list: vec![1],
            condition_samples: 2,
            ..Default::default()
        };
        let rep = hyperbolicity_report(&o, &g, &m, cfg).unwrap();
        for c in &rep.criteria {
            assert_ne!(
                c.verdict,
                Verdict::Violation,
                "criterion {} flagged: {:?}",
                c.id,
                c.witness
            );
        }
    }

    #[test]
    fn aggregate_report_flags_grid() {
        let (o, g) = make_group(&GroupSpec::FreeAbelian {
            rank: 2,
            extra: vec![],
        })
        .unwrap();
        let m = Measure::uniform(&g);
        let cfg = EvidenceConfig {
            ball_radius: 8,
            n_max: 60,
            pi_r_list: vec![2, 3],
            pi_samples: 3,
            bigon_l_max: 8,
            bigon_budget: 200,
            ..Default::default()
        };
        let rep = hyperbolicity_report(&o, &g, &m, cfg).unwrap();
        let pi = rep.criteria.iter().find(|c| c.id == "PiCriterion").unwrap();
        assert_eq!(pi.verdict, Verdict::Violation);
        assert!(pi.witness.is_some(), "violations carry witnesses");
        let bigon = rep.criteria.iter().find(|c| c.id == "BigonBound").unwrap();
        assert_eq!(bigon.verdict, Verdict::Violation);
        // recurrent group: probabilistic criteria are inconclusive
        let t2 = rep.criteria.iter().find(|c| c.id == "Theorem2").unwrap();
        assert_eq!(t2.verdict, Verdict::Inconclusive);
    }

    use crate::util::stream_rng;
}
