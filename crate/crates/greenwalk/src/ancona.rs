//! The Green path measure on `Pth(x,z)`: exact enumeration oracles, killed
//! Green functions, hit/bypass probability estimators, and a conditioned
//! path sampler.
//!
//! Point-hit probabilities use the first-visit decomposition
//! `P{y in Im psi} = Gr(x,y) Gr(y,z) / (Gr(y,y) Gr(x,z))`: paths through y
//! split as (first visit to y) * (any path y to z), and the first-visit
//! weight is `Gr(x,y)/Gr(y,y)`. The `Gr(y,y)` factor is what keeps the
//! tree case at probability exactly 1. Ball-hit and bypass probabilities
//! go through killed Green functions (convolutions with a forbidden set)
//! instead, and the two routes cross-validate each other.

use crate::cayley::{Ball, VertexId};
use crate::groups::{classify_transience, GeneratorSet, GroupElement, GroupOracle, Transience};
use crate::util::stream_rng;
use crate::walk::{
    convolve, green_from_table, word_weight, ConvolutionTable, ConvolveOptions, GreenEstimate,
    Measure, RhoPlus, WalkError,
};
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnconaError {
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error("element {0} is not in the working ball; enlarge the radius")]
    OutsideBall(String),
    #[error("enumeration budget exceeded: |S|^{l_max} = {cost:.3e} > {budget:.3e}")]
    BudgetExceeded {
        l_max: usize,
        cost: f64,
        budget: f64,
    },
    #[error("target vertex is inside the forbidden set")]
    ForbiddenTarget,
    #[error("working ball radius {radius} cannot certify a radius-{r} ball at distance {dist} from the center")]
    BallNotCertified { radius: u32, r: u32, dist: u32 },
    #[error("endpoints must be at even distance for a bypass event, got {0}")]
    OddDistance(u32),
    #[error("sampler rejection rate {rate:.3} exceeded {max:.3} over {attempts} attempts; enlarge the working ball")]
    RejectionRate { rate: f64, max: f64, attempts: u64 },
}

/// A walk path: start element plus generator-index word.
#[derive(Debug, Clone)]
pub struct PathWord {
    pub start: GroupElement,
    pub letters: Vec<u16>,
}

impl PathWord {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Multiplicative weight under `measure`.
    pub fn weight(&self, measure: &Measure) -> f64 {
        self.letters
            .iter()
            .map(|&g| measure.weight(g as usize))
            .product()
    }

    pub fn weight_rational(&self, measure: &Measure) -> BigRational {
        let word: Vec<usize> = self.letters.iter().map(|&g| g as usize).collect();
        word_weight(measure, &word)
    }

    /// Visited elements, start included (length = letters + 1).
    pub fn trace(&self, oracle: &GroupOracle, gens: &GeneratorSet) -> Vec<GroupElement> {
        let mut out = Vec::with_capacity(self.letters.len() + 1);
        let mut cur = self.start.clone();
        out.push(cur.clone());
        for &g in &self.letters {
            cur = oracle
                .multiply(&cur, gens.element(g as usize))
                .expect("same oracle");
            out.push(cur.clone());
        }
        out
    }

    pub fn end(&self, oracle: &GroupOracle, gens: &GeneratorSet) -> GroupElement {
        self.trace(oracle, gens).pop().expect("nonempty trace")
    }
}

/// Exact partial Green table from path enumeration.
#[derive(Debug, Clone)]
pub struct EnumerationTable {
    pub l_max: usize,
    /// Exact weight of paths of each length `0..=l_max` from x to z.
    pub by_length: Vec<BigRational>,
    /// Sum of `by_length`.
    pub partial: BigRational,
}

impl EnumerationTable {
    pub fn partial_f64(&self) -> f64 {
        crate::walk::rational_to_f64(&self.partial)
    }
}

fn budget_guard(ngen: usize, l_max: usize, budget: f64) -> Result<(), AnconaError> {
    let cost = (ngen as f64).powi(l_max as i32);
    if cost > budget {
        return Err(AnconaError::BudgetExceeded {
            l_max,
            cost,
            budget,
        });
    }
    Ok(())
}

/// Exact rational weight of all paths from `x` to `z` of length `<= l_max`,
/// with the per-length histogram. This is the brute-force oracle every
/// estimator in this module is checked against.
pub fn enumerate_paths(
    oracle: &GroupOracle,
    gens: &GeneratorSet,
    measure: &Measure,
    x: &GroupElement,
    z: &GroupElement,
    l_max: usize,
    budget: f64,
) -> Result<EnumerationTable, AnconaError> {
    budget_guard(gens.len(), l_max, budget)?;
    // rational dynamic program over the radius-l_max ball around x
    let ball =
        Ball::build(oracle, gens, x, l_max as u32, usize::MAX).expect("unbounded cap cannot fail");
    let zid = ball.id_of(z);
    let mut cur: Vec<BigRational> = vec![BigRational::zero(); ball.len()];
    cur[0] = BigRational::from_integer(1.into());
    let mut by_length = Vec::with_capacity(l_max + 1);
    by_length.push(match zid {
        Some(id) => cur[id as usize].clone(),
        None => BigRational::zero(),
    });
    for _ in 1..=l_max {
        let mut next: Vec<BigRational> = vec![BigRational::zero(); ball.len()];
        for (v, mass) in cur.iter().enumerate() {
            if mass.is_zero() {
                continue;
            }
            for (g, &u) in ball.adjacency_row(v as u32).iter().enumerate() {
                if u != crate::cayley::OUTSIDE {
                    next[u as usize] += mass * measure.rational(g);
                }
            }
        }
        cur = next;
        by_length.push(match zid {
            Some(id) => cur[id as usize].clone(),
            None => BigRational::zero(),
        });
    }
    let partial: BigRational = by_length.iter().sum();
    Ok(EnumerationTable {
        l_max,
        by_length,
        partial,
    })
}

/// Green series restricted to paths avoiding `forbidden` vertices, with the
/// same certified-bound discipline as the unrestricted estimate.
pub fn green_killed(
    ball: &Ball,
    measure: &Measure,
    x: VertexId,
    z: VertexId,
    forbidden: &[bool],
    n_max: usize,
    rho_plus: &RhoPlus,
) -> Result<GreenEstimate, AnconaError> {
    if forbidden[z as usize] {
        return Err(AnconaError::ForbiddenTarget);
    }
    let opts = ConvolveOptions {
        forbidden: Some(forbidden.to_vec()),
        tracked: vec![],
    };
    let table = convolve(ball, measure, x, n_max, &opts)?;
    Ok(killed_estimate(ball, &table, z, rho_plus))
}

/// Bounds for a killed run: the lower sum is exact; the upper bound reuses
/// the unrestricted escape/tail machinery (killed mass never returns, and
/// pretending escaped mass could only overestimates).
fn killed_estimate(
    ball: &Ball,
    table: &ConvolutionTable,
    z: VertexId,
    rho_plus: &RhoPlus,
) -> GreenEstimate {
    match green_from_table(ball, table, z, rho_plus) {
        Ok(est) => est,
        Err(_) => GreenEstimate {
            // target unreached: killed series is plain zero so far
            lower: 0.0,
            upper: crate::walk::GreenEstimate {
                lower: 0.0,
                upper: 0.0,
                n_max: table.n_max,
                rho_plus: rho_plus.value,
                rho_plus_provenance: rho_plus.provenance.clone(),
                escape_total: table.escape_total(),
                tail_method: "unreached".into(),
                unbounded: false,
            }
            .upper,
            n_max: table.n_max,
            rho_plus: rho_plus.value,
            rho_plus_provenance: rho_plus.provenance.clone(),
            escape_total: table.escape_total(),
            tail_method: "unreached".into(),
            unbounded: false,
        },
    }
}

/// Hit/bypass probability report with certified bounds and a point
/// estimate from the lower (near-exact) partial sums.
#[derive(Debug, Clone, Serialize)]
pub struct HitReport {
    pub lower: f64,
    pub upper: f64,
    pub estimate: f64,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl HitReport {
    fn from_bounds(lower: f64, upper: f64, estimate: f64, method: &str) -> Self {
        HitReport {
            lower: lower.clamp(0.0, 1.0),
            upper: upper.clamp(0.0, 1.0),
            estimate,
            method: method.to_string(),
            samples: None,
            seed: None,
        }
    }

    pub fn overlaps(&self, other: &HitReport) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }
}

/// Reusable Green data: one convolution from the ball center (translation
/// reduces every `Gr(u,v)` to `Gr(center, u^{-1} v)`).
pub struct GreenContext<'a> {
    pub ball: &'a Ball,
    pub measure: &'a Measure,
    table: TableStorage<'a>,
    pub rho_plus: RhoPlus,
}

enum TableStorage<'a> {
    Owned(Box<ConvolutionTable>),
    Borrowed(&'a ConvolutionTable),
}

impl<'a> GreenContext<'a> {
    pub fn new(
        ball: &'a Ball,
        measure: &'a Measure,
        n_max: usize,
        rho_plus: RhoPlus,
    ) -> Result<Self, AnconaError> {
        if classify_transience(ball.oracle().spec()) == Transience::Recurrent {
            return Err(WalkError::RecurrentGroup.into());
        }
        let table = convolve(
            ball,
            measure,
            ball.center_id(),
            n_max,
            &ConvolveOptions::default(),
        )?;
        Ok(GreenContext {
            ball,
            measure,
            table: TableStorage::Owned(Box::new(table)),
            rho_plus,
        })
    }

    /// Wraps an existing center table instead of recomputing one.
    pub fn from_table(
        ball: &'a Ball,
        measure: &'a Measure,
        table: &'a ConvolutionTable,
        rho_plus: RhoPlus,
    ) -> Result<Self, AnconaError> {
        if classify_transience(ball.oracle().spec()) == Transience::Recurrent {
            return Err(WalkError::RecurrentGroup.into());
        }
        assert_eq!(
            table.x,
            ball.center_id(),
            "context tables start at the center"
        );
        Ok(GreenContext {
            ball,
            measure,
            table: TableStorage::Borrowed(table),
            rho_plus,
        })
    }

    pub fn table(&self) -> &ConvolutionTable {
        match &self.table {
            TableStorage::Owned(t) => t,
            TableStorage::Borrowed(t) => t,
        }
    }

    /// `Gr(center, g)` with certified bounds.
    pub fn green_of(&self, g: &GroupElement) -> Result<GreenEstimate, AnconaError> {
        let id = self
            .ball
            .id_of(g)
            .ok_or_else(|| AnconaError::OutsideBall(self.ball.oracle().display(g)))?;
        Ok(green_from_table(
            self.ball,
            self.table(),
            id,
            &self.rho_plus,
        )?)
    }

    /// `Gr(u, v) = Gr(center, u^{-1} v)` by left invariance. The ball must
    /// be centered at the identity for this to be meaningful.
    pub fn green_between(
        &self,
        u: &GroupElement,
        v: &GroupElement,
    ) -> Result<GreenEstimate, AnconaError> {
        let o = self.ball.oracle();
        let g = o.multiply(&o.invert(u), v).expect("same oracle");
        self.green_of(&g)
    }

    /// WA estimator: probability that a Green path from x to z visits y,
    /// via the first-visit identity with interval arithmetic.
    pub fn hit_probability_point(
        &self,
        x: &GroupElement,
        y: &GroupElement,
        z: &GroupElement,
    ) -> Result<HitReport, AnconaError> {
        let gxy = self.green_between(x, y)?;
        let gyz = self.green_between(y, z)?;
        let gyy = self.green_between(y, y)?;
        let gxz = self.green_between(x, z)?;
        let lower = (gxy.lower * gyz.lower) / (gyy.upper * gxz.upper);
        let upper = (gxy.upper * gyz.upper) / (gyy.lower * gxz.lower);
        let estimate = (gxy.lower * gyz.lower) / (gyy.lower * gxz.lower);
        Ok(HitReport::from_bounds(
            lower,
            upper,
            estimate,
            "wa-identity",
        ))
    }
}

/// Vertices of the working ball at BFS distance `< r` (open) or `<= r`
/// (closed) from `y`, as a forbidden mask. The guard `dist(y) + r <= R`
/// makes in-ball distances from y exact out to radius r.
pub fn ball_mask(ball: &Ball, y: VertexId, r: u32, closed: bool) -> Result<Vec<bool>, AnconaError> {
    if ball.dist(y) + r > ball.radius() {
        return Err(AnconaError::BallNotCertified {
            radius: ball.radius(),
            r,
            dist: ball.dist(y),
        });
    }
    let d = ball.bfs_from(y, |_| false);
    Ok(d.iter()
        .map(|&dv| if closed { dv <= r } else { dv < r })
        .collect())
}

/// TA estimator: probability that a Green path from x to z meets the
/// closed ball `B_{<=r}(y)`, via `1 - Gr_killed / Gr`.
#[allow(clippy::too_many_arguments)]
pub fn hit_probability_ball(
    ball: &Ball,
    measure: &Measure,
    x: VertexId,
    y: VertexId,
    z: VertexId,
    r: u32,
    n_max: usize,
    rho_plus: &RhoPlus,
) -> Result<HitReport, AnconaError> {
    if classify_transience(ball.oracle().spec()) == Transience::Recurrent {
        return Err(WalkError::RecurrentGroup.into());
    }
    let mask = ball_mask(ball, y, r, true)?;
    if mask[x as usize] || mask[z as usize] {
        // an endpoint lies inside the target ball: every path hits it
        return Ok(HitReport::from_bounds(1.0, 1.0, 1.0, "ta-degenerate"));
    }
    let full = crate::walk::green(ball, measure, x, z, n_max, Some(rho_plus.clone()))?;
    let killed = green_killed(ball, measure, x, z, &mask, n_max, rho_plus)?;
    let lower = 1.0 - killed.upper / full.lower;
    let upper = 1.0 - killed.lower / full.upper;
    let estimate = 1.0 - killed.lower / full.lower;
    Ok(HitReport::from_bounds(lower, upper, estimate, "ta-killed"))
}

/// Point-hit probability via the killed-Green route, the cross-check for
/// the WA identity estimator.
#[allow(clippy::too_many_arguments)]
pub fn hit_probability_point_killed(
    ball: &Ball,
    measure: &Measure,
    x: VertexId,
    y: VertexId,
    z: VertexId,
    n_max: usize,
    rho_plus: &RhoPlus,
) -> Result<HitReport, AnconaError> {
    if x == y || z == y {
        return Ok(HitReport::from_bounds(1.0, 1.0, 1.0, "wa-degenerate"));
    }
    let mut mask = vec![false; ball.len()];
    mask[y as usize] = true;
    let full = crate::walk::green(ball, measure, x, z, n_max, Some(rho_plus.clone()))?;
    let killed = green_killed(ball, measure, x, z, &mask, n_max, rho_plus)?;
    let lower = 1.0 - killed.upper / full.lower;
    let upper = 1.0 - killed.lower / full.upper;
    let estimate = 1.0 - killed.lower / full.lower;
    Ok(HitReport::from_bounds(lower, upper, estimate, "wa-killed"))
}

/// Probability that a Green path between antipodes of the radius-r ball at
/// `y` avoids the open ball `B_{<r}(y)`: `Gr_killed(x,z) / Gr(x,z)` with
/// `|x-y| = |y-z| = r`.
#[allow(clippy::too_many_arguments)]
pub fn bypass_probability(
    ball: &Ball,
    measure: &Measure,
    x: VertexId,
    y: VertexId,
    z: VertexId,
    r: u32,
    n_max: usize,
    rho_plus: &RhoPlus,
) -> Result<HitReport, AnconaError> {
    if classify_transience(ball.oracle().spec()) == Transience::Recurrent {
        return Err(WalkError::RecurrentGroup.into());
    }
    if r == 0 {
        // the open ball of radius 0 is empty
        return Ok(HitReport::from_bounds(1.0, 1.0, 1.0, "bypass-degenerate"));
    }
    let mask = ball_mask(ball, y, r.saturating_sub(1), true).and_then(|_| {
        // open ball of radius r = closed ball of radius r-1 in a graph
        ball_mask(ball, y, r, false)
    })?;
    debug_assert!(
        !mask[x as usize] && !mask[z as usize],
        "antipodes lie on the sphere"
    );
    let full = crate::walk::green(ball, measure, x, z, n_max, Some(rho_plus.clone()))?;
    let killed = green_killed(ball, measure, x, z, &mask, n_max, rho_plus)?;
    let lower = killed.lower / full.upper;
    let upper = killed.upper / full.lower;
    let estimate = killed.lower / full.lower;
    Ok(HitReport::from_bounds(
        lower,
        upper,
        estimate,
        "bypass-killed",
    ))
}

/// Draws one path from the Green measure `P_{x,z}` by the stopped chain:
/// stop at z with probability `1/Gr(z,z)`, otherwise step to `ws` with
/// probability `mu(s) Gr(ws,z)/Gr(w,z)`. Walks stepping onto the outermost
/// shell are rejected and counted.
pub struct GreenPathSampler<'a> {
    ball: &'a Ball,
    measure: &'a Measure,
    /// `Gr(w, z)` partial sums for every w (one convolution from z).
    green_to_z: Vec<f64>,
    z: VertexId,
    pub rejections: u64,
    pub samples: u64,
    max_rejection_rate: f64,
}

impl<'a> GreenPathSampler<'a> {
    pub fn new(
        ball: &'a Ball,
        measure: &'a Measure,
        z: VertexId,
        n_max: usize,
        max_rejection_rate: f64,
    ) -> Result<Self, AnconaError> {
        if classify_transience(ball.oracle().spec()) == Transience::Recurrent {
            return Err(WalkError::RecurrentGroup.into());
        }
        // mu symmetric: Gr(w,z) = Gr(z,w), one table from z covers all w
        let table = convolve(ball, measure, z, n_max, &ConvolveOptions::default())?;
        Ok(GreenPathSampler {
            ball,
            measure,
            green_to_z: table.green_acc,
            z,
            rejections: 0,
            samples: 0,
            max_rejection_rate,
        })
    }

    /// One sample; rejected walks are retried (and counted) up to a rate cap.
    pub fn sample(&mut self, x: VertexId, seed: u64) -> Result<PathWord, AnconaError> {
        for attempt in 0..10_000u64 {
            let mut rng = stream_rng(seed, self.samples.wrapping_add(attempt << 32));
            match self.try_sample(x, &mut rng) {
                Some(letters) => {
                    self.samples += 1;
                    let rate = self.rejections as f64 / (self.samples + self.rejections) as f64;
                    if rate > self.max_rejection_rate && self.rejections > 100 {
                        return Err(AnconaError::RejectionRate {
                            rate,
                            max: self.max_rejection_rate,
                            attempts: self.samples + self.rejections,
                        });
                    }
                    return Ok(PathWord {
                        start: self.ball.element(x),
                        letters,
                    });
                }
                None => {
                    self.rejections += 1;
                }
            }
        }
        Err(AnconaError::RejectionRate {
            rate: 1.0,
            max: self.max_rejection_rate,
            attempts: self.rejections,
        })
    }

    fn try_sample<R: Rng>(&self, x: VertexId, rng: &mut R) -> Option<Vec<u16>> {
        let mut w = x;
        let mut letters = Vec::new();
        loop {
            if self.ball.dist(w) >= self.ball.radius() {
                return None; // touched the boundary shell
            }
            let gw = self.green_to_z[w as usize];
            if gw <= 0.0 {
                return None;
            }
            let stop_p = if w == self.z {
                1.0 / self.green_to_z[self.z as usize]
            } else {
                0.0
            };
            // move weights mu(s) Gr(ws,z)/Gr(w,z)
            let row = self.ball.adjacency_row(w);
            let mut weights = Vec::with_capacity(row.len());
            let mut total = stop_p;
            for (g, &u) in row.iter().enumerate() {
                let p = if u == crate::cayley::OUTSIDE {
                    0.0
                } else {
                    self.measure.weight(g) * self.green_to_z[u as usize] / gw
                };
                weights.push(p);
                total += p;
            }
            let mut t = rng.gen::<f64>() * total;
            if t < stop_p {
                return Some(letters);
            }
            t -= stop_p;
            let mut chosen = None;
            for (g, &p) in weights.iter().enumerate() {
                if t < p {
                    chosen = Some(g);
                    break;
                }
                t -= p;
            }
            let g = chosen?;
            letters.push(g as u16);
            w = row[g];
            if letters.len() > 100 * (self.ball.radius() as usize + 1) * (self.ball.len() + 1) {
                return None; // pathological walk length
            }
        }
    }
}

/// Both sides of the conditional-probability identity for the cylinder
/// `H_{g,sigma,theta} = sigma <S> theta  ∩  pi^{-1} g`, by exact
/// enumeration at matched length cutoffs:
/// `P(A | H)` over words of length <= l_max equals
/// `P_{iota,h}{phi : sigma phi theta in A}` over words of length
/// <= l_max - |sigma| - |theta|, where `h = pi(sigma^-1) g pi(theta^-1)`.
#[allow(clippy::too_many_arguments)]
pub fn conditional_law_check(
    oracle: &GroupOracle,
    gens: &GeneratorSet,
    measure: &Measure,
    g: &GroupElement,
    sigma: &[u16],
    theta: &[u16],
    event: &dyn Fn(&[u16]) -> bool,
    l_max: usize,
    budget: f64,
) -> Result<(BigRational, BigRational), AnconaError> {
    budget_guard(gens.len(), l_max, budget)?;
    // left side: enumerate psi in pi^-1(g) with |psi| <= l_max,
    // restricted to the cylinder (prefix sigma, suffix theta)
    let mut num_l = BigRational::zero();
    let mut den_l = BigRational::zero();
    {
        let mut word: Vec<u16> = Vec::new();
        enumerate_words(
            oracle,
            gens,
            &oracle.identity(),
            l_max,
            &mut word,
            &mut |word, end| {
                if end == g
                    && word.len() >= sigma.len() + theta.len()
                    && has_prefix(word, sigma)
                    && has_suffix(word, theta)
                {
                    let weight = weight_of(measure, word);
                    if event(word) {
                        num_l += &weight;
                    }
                    den_l += weight;
                }
            },
        );
    }
    // right side: h = pi(sigma^-1) g pi(theta^-1)
    let pi_sigma = eval_word(oracle, gens, sigma);
    let pi_theta = eval_word(oracle, gens, theta);
    let h = oracle
        .multiply(
            &oracle
                .multiply(&oracle.invert(&pi_sigma), g)
                .expect("same oracle"),
            &oracle.invert(&pi_theta),
        )
        .expect("same oracle");
    let inner_max = l_max.saturating_sub(sigma.len() + theta.len());
    let mut num_r = BigRational::zero();
    let mut den_r = BigRational::zero();
    {
        let mut word: Vec<u16> = Vec::new();
        enumerate_words(
            oracle,
            gens,
            &oracle.identity(),
            inner_max,
            &mut word,
            &mut |phi, end| {
                if *end == h {
                    let weight = weight_of(measure, phi);
                    let mut full: Vec<u16> =
                        Vec::with_capacity(sigma.len() + phi.len() + theta.len());
                    full.extend_from_slice(sigma);
                    full.extend_from_slice(phi);
                    full.extend_from_slice(theta);
                    if event(&full) {
                        num_r += &weight;
                    }
                    den_r += weight;
                }
            },
        );
    }
    let left = if den_l.is_zero() {
        BigRational::zero()
    } else {
        num_l / den_l
    };
    let right = if den_r.is_zero() {
        BigRational::zero()
    } else {
        num_r / den_r
    };
    Ok((left, right))
}

fn eval_word(oracle: &GroupOracle, gens: &GeneratorSet, word: &[u16]) -> GroupElement {
    let idx: Vec<usize> = word.iter().map(|&g| g as usize).collect();
    oracle.evaluate(gens, &idx)
}

fn has_prefix(word: &[u16], prefix: &[u16]) -> bool {
    word.len() >= prefix.len() && &word[..prefix.len()] == prefix
}

fn has_suffix(word: &[u16], suffix: &[u16]) -> bool {
    word.len() >= suffix.len() && &word[word.len() - suffix.len()..] == suffix
}

fn weight_of(measure: &Measure, word: &[u16]) -> BigRational {
    let idx: Vec<usize> = word.iter().map(|&g| g as usize).collect();
    word_weight(measure, &idx)
}

/// DFS over all words of length <= l_max, calling `visit` at every node
/// with the word and its endpoint. Weights are left to the visitor so the
/// hot path stays free of rational arithmetic.
fn enumerate_words(
    oracle: &GroupOracle,
    gens: &GeneratorSet,
    start: &GroupElement,
    l_max: usize,
    word: &mut Vec<u16>,
    visit: &mut impl FnMut(&[u16], &GroupElement),
) {
    fn go(
        oracle: &GroupOracle,
        gens: &GeneratorSet,
        at: &GroupElement,
        l_max: usize,
        word: &mut Vec<u16>,
        visit: &mut impl FnMut(&[u16], &GroupElement),
    ) {
        visit(word, at);
        if word.len() == l_max {
            return;
        }
        for g in 0..gens.len() {
            let next = oracle.multiply(at, gens.element(g)).expect("same oracle");
            word.push(g as u16);
            go(oracle, gens, &next, l_max, word, visit);
            word.pop();
        }
    }
    go(oracle, gens, start, l_max, word, visit);
}
