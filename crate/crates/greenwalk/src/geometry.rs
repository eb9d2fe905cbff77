//! Pure-metric hyperbolicity diagnostics: the ball-bypass ratio pi(I),
//! geodesic bigons and their width functions, suitable-interval heights
//! h_k, and paradox-interval certificates.
//!
//! Bypass curves are modeled as vertex paths through vertices at distance
//! >= r from the interval midpoint. For unit-length edges and integer r
//! > this is exact: an edge incident to a vertex of the open ball has its
//! > interior inside the open ball too, so no rectifiable curve can do
//! > better than a vertex path. Width functions are sampled at integer
//! > times; all catalog measurements happen at vertices.

use crate::cayley::{Ball, BallError, GeodesicWord, VertexId, OUTSIDE};
use crate::criteria::ParadoxParameters;
use crate::groups::GroupElement;
use crate::util::stream_rng;
use serde::Serialize;
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error("working radius {working} is smaller than the interval requires ({needed})")]
    WorkingRadiusTooSmall { working: u32, needed: u32 },
    #[error(
        "x and z must be antipodes of the midpoint: dist(y,x)={dx}, dist(y,z)={dz}, |x-z|={dxz}"
    )]
    NotAntipodal { dx: u32, dz: u32, dxz: u32 },
    #[error("r list must not be empty")]
    EmptyRList,
    #[error("bad proper function: {0}")]
    BadProperFunction(String),
    #[error("grid step must be 1/m for a positive integer m, got {0}")]
    BadGridStep(f64),
    #[error("positive k required, got {0}")]
    BadK(f64),
    #[error(
        "no suitable interval found for a nonzero function; this contradicts the height bound"
    )]
    NoSuitableInterval,
    #[error("bigon sides must share endpoints and length")]
    MismatchedSides,
    #[error("ball must be centered at the identity for word-metric queries")]
    OffCenterBall,
}

/// Exact word distance between two ball vertices, via `|u^{-1} v|`.
///
/// Requires an identity-centered ball; returns `None` when the product
/// falls outside the interned radius.
pub fn word_distance(ball: &Ball, u: VertexId, v: VertexId) -> Option<u32> {
    let o = ball.oracle();
    let gu = ball.element(u);
    let gv = ball.element(v);
    let g = o.multiply(&o.invert(&gu), &gv).expect("same oracle");
    ball.id_of(&g).map(|id| ball.dist(id))
}

/// Outcome of the bypass search for one interval.
#[derive(Debug, Clone, Serialize)]
pub enum PiValue {
    /// A shortest in-region bypass was found.
    Exact { pi: f64, bypass_len: u32 },
    /// No bypass inside the working region; any bypass must leave it, so
    /// `pi >= 2(W - r)/r`.
    NoBypassWithin { region_radius: u32, pi_lower: f64 },
}

impl PiValue {
    pub fn pi_or_lower(&self) -> f64 {
        match self {
            PiValue::Exact { pi, .. } => *pi,
            PiValue::NoBypassWithin { pi_lower, .. } => *pi_lower,
        }
    }

    pub fn is_no_bypass(&self) -> bool {
        matches!(self, PiValue::NoBypassWithin { .. })
    }
}

/// One interval's bypass diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct IntervalRecord {
    pub r: u32,
    pub x: VertexId,
    pub z: VertexId,
    pub value: PiValue,
    /// Witness bypass path (vertex ids in the working ball), when found.
    #[serde(skip)]
    pub path: Option<Vec<VertexId>>,
}

/// Bypass ratio for the interval with midpoint at the ball center.
///
/// `ball` must be centered at the midpoint y with radius >= 2r, where
/// `r = dist(y,x) = dist(y,z)` and `|x-z| = 2r`; then the open ball
/// `B_{<r}(y)` is exactly the vertices with center-distance < r, and the
/// shortest bypass inside the region is found by BFS over the remaining
/// vertices.
pub fn pi_of_interval(
    ball: &Ball,
    x: VertexId,
    z: VertexId,
) -> Result<IntervalRecord, GeometryError> {
    let r = ball.dist(x);
    if ball.radius() < 2 * r {
        return Err(GeometryError::WorkingRadiusTooSmall {
            working: ball.radius(),
            needed: 2 * r,
        });
    }
    // in-ball BFS distance from x is exact out to 2r (geodesics through the
    // interval stay within distance 2r of the center)
    let dx = ball.bfs_from(x, |_| false);
    let dxz = dx[z as usize];
    if ball.dist(z) != r || dxz != 2 * r {
        return Err(GeometryError::NotAntipodal {
            dx: r,
            dz: ball.dist(z),
            dxz,
        });
    }
    if r == 0 {
        return Ok(IntervalRecord {
            r,
            x,
            z,
            value: PiValue::Exact {
                pi: 0.0,
                bypass_len: 0,
            },
            path: Some(vec![x]),
        });
    }
    // BFS from x over vertices outside the open ball B_{<r}(center)
    let mut dist = vec![u32::MAX; ball.len()];
    let mut parent = vec![OUTSIDE; ball.len()];
    let mut q = VecDeque::new();
    dist[x as usize] = 0;
    q.push_back(x);
    while let Some(v) = q.pop_front() {
        if v == z {
            break;
        }
        for &u in ball.adjacency_row(v) {
            if u == OUTSIDE || dist[u as usize] != u32::MAX || ball.dist(u) < r {
                continue;
            }
            dist[u as usize] = dist[v as usize] + 1;
            parent[u as usize] = v;
            q.push_back(u);
        }
    }
    if dist[z as usize] == u32::MAX {
        let w = ball.radius();
        return Ok(IntervalRecord {
            r,
            x,
            z,
            value: PiValue::NoBypassWithin {
                region_radius: w,
                pi_lower: 2.0 * (w - r) as f64 / r as f64,
            },
            path: None,
        });
    }
    let bypass_len = dist[z as usize];
    let mut path = vec![z];
    let mut v = z;
    while v != x {
        v = parent[v as usize];
        path.push(v);
    }
    path.reverse();
    Ok(IntervalRecord {
        r,
        x,
        z,
        value: PiValue::Exact {
            pi: bypass_len as f64 / r as f64,
            bypass_len,
        },
        path: Some(path),
    })
}

/// Per-radius summary row of a pi scan.
#[derive(Debug, Clone, Serialize)]
pub struct PiScanRow {
    pub r: u32,
    pub samples: usize,
    pub no_bypass_count: usize,
    /// Minimum finite pi over samples, if any bypass was found.
    pub min_pi: Option<f64>,
    pub median_pi: Option<f64>,
    /// All samples bypass-free: the scan reports pi = infinity at this r.
    pub pi_infinite: bool,
    /// Gromov curve delta (2^{r/delta} - 2) for the configured delta.
    pub gromov_lower: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PiScanSummary {
    pub rows: Vec<PiScanRow>,
    /// One record per sampled interval, for the per-interval CSV export.
    pub records: Vec<IntervalRecord>,
    pub delta: Option<f64>,
    pub seed: u64,
}

impl PiScanSummary {
    /// RFC-4180 rows `r,pi,bypass_len,status`.
    pub fn write_interval_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "r,pi,bypass_len,status")?;
        for rec in &self.records {
            match &rec.value {
                PiValue::Exact { pi, bypass_len } => {
                    writeln!(w, "{},{},{},exact", rec.r, pi, bypass_len)?;
                }
                PiValue::NoBypassWithin {
                    region_radius,
                    pi_lower,
                } => {
                    writeln!(
                        w,
                        "{},{},,no-bypass-within-{}",
                        rec.r, pi_lower, region_radius
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// Samples random geodesic intervals per radius and reports bypass ratios.
///
/// For each sample a random sphere-2r element is drawn, a uniform random
/// geodesic to it is sampled, and the working ball is rebuilt around the
/// geodesic's midpoint.
pub fn pi_scan(
    ball: &Ball,
    r_list: &[u32],
    samples: usize,
    seed: u64,
    delta: Option<f64>,
    memory_cap: usize,
) -> Result<PiScanSummary, GeometryError> {
    if r_list.is_empty() {
        return Err(GeometryError::EmptyRList);
    }
    let oracle = ball.oracle();
    let gens = ball.generators();
    if !oracle.is_identity(ball.center()) {
        return Err(GeometryError::OffCenterBall);
    }
    let mut rows = Vec::new();
    let mut records = Vec::new();
    if samples == 0 {
        return Ok(PiScanSummary {
            rows,
            records,
            delta,
            seed,
        });
    }
    let mut counter = 0u64;
    for &r in r_list {
        let sphere = ball.sphere(2 * r);
        if sphere.is_empty() {
            rows.push(PiScanRow {
                r,
                samples: 0,
                no_bypass_count: 0,
                min_pi: None,
                median_pi: None,
                pi_infinite: false,
                gromov_lower: delta.map(|d| gromov_pi_lower(r, d)),
            });
            continue;
        }
        let mut finite: Vec<f64> = Vec::new();
        let mut no_bypass = 0usize;
        for _ in 0..samples {
            let mut rng = stream_rng(seed, counter);
            counter += 1;
            let w = sphere.start + (rng.gen_range(0..sphere.end - sphere.start));
            let geo = ball.sample_geodesic(ball.center_id(), w, &mut rng)?;
            let mid = ball.element(geo.at(r as usize));
            // working ball around the midpoint
            let work = Ball::build(oracle, gens, &mid, 2 * r, memory_cap)?;
            let x = work
                .id_of(ball.center())
                .expect("endpoint within 2r of midpoint");
            let z = work
                .id_of(&ball.element(w))
                .expect("endpoint within 2r of midpoint");
            let rec = pi_of_interval(&work, x, z)?;
            match rec.value {
                PiValue::Exact { pi, .. } => finite.push(pi),
                PiValue::NoBypassWithin { .. } => no_bypass += 1,
            }
            records.push(rec);
        }
        finite.sort_by(|a, b| a.partial_cmp(b).unwrap());
        rows.push(PiScanRow {
            r,
            samples,
            no_bypass_count: no_bypass,
            min_pi: finite.first().copied(),
            median_pi: if finite.is_empty() {
                None
            } else {
                Some(finite[finite.len() / 2])
            },
            pi_infinite: no_bypass == samples,
            gromov_lower: delta.map(|d| gromov_pi_lower(r, d)),
        });
    }
    Ok(PiScanSummary {
        rows,
        records,
        delta,
        seed,
    })
}

/// `delta (2^{r/delta} - 2)`: the pi lower bound guaranteed by
/// delta-thin triangles.
pub fn gromov_pi_lower(r: u32, delta: f64) -> f64 {
    delta * (2f64.powf(r as f64 / delta) - 2.0)
}

use rand::Rng;

/// A geodesic bigon with its sampled width function and diagnostics.
#[derive(Debug, Clone)]
pub struct BigonRecord {
    pub length: u32,
    pub side0: GeodesicWord,
    pub side1: GeodesicWord,
    /// `w(s) = |side0(s) - side1(s)|` at integer times.
    pub widths: Vec<u32>,
    pub max_width: u32,
    /// Hausdorff width: max over points of one side of the distance to the
    /// other side's image.
    pub hausdorff_width: u32,
    /// Sides meet only at the endpoints.
    pub regular: bool,
    /// Initial point is a vertex (always true in the vertex model).
    pub normalized: bool,
    /// Minimum over sample points of d(side_i(s), Im side_{1-i}) - w(s)/2;
    /// nonnegative iff the half-width separation bound holds everywhere.
    pub lemma_slack: f64,
}

/// Builds the record for a pair of geodesics with shared endpoints.
pub fn bigon_from_words(
    ball: &Ball,
    side0: GeodesicWord,
    side1: GeodesicWord,
) -> Result<BigonRecord, GeometryError> {
    if side0.len() != side1.len()
        || side0.vertices.first() != side1.vertices.first()
        || side0.vertices.last() != side1.vertices.last()
    {
        return Err(GeometryError::MismatchedSides);
    }
    let len = side0.len();
    let mut widths = Vec::with_capacity(len + 1);
    for t in 0..=len {
        let d =
            word_distance(ball, side0.at(t), side1.at(t)).ok_or(GeometryError::OffCenterBall)?;
        widths.push(d);
    }
    let max_width = widths.iter().copied().max().unwrap_or(0);
    // one-sided deviations and the half-width slack
    let mut hausdorff = 0u32;
    let mut lemma_slack = f64::INFINITY;
    for (a, b) in [(&side0, &side1), (&side1, &side0)] {
        for (s, &w_s) in widths.iter().enumerate() {
            let mut best = u32::MAX;
            for t in 0..=len {
                let d = word_distance(ball, a.at(s), b.at(t)).unwrap_or(u32::MAX);
                best = best.min(d);
                if best == 0 {
                    break;
                }
            }
            hausdorff = hausdorff.max(best);
            lemma_slack = lemma_slack.min(best as f64 - w_s as f64 / 2.0);
        }
    }
    let regular = (1..len).all(|t| side0.at(t) != side1.at(t)) && len > 0;
    Ok(BigonRecord {
        length: len as u32,
        side0,
        side1,
        widths,
        max_width,
        hausdorff_width: hausdorff,
        regular,
        normalized: true,
        lemma_slack,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BigonScanRow {
    pub length: u32,
    pub pairs_scanned: usize,
    pub max_width: u32,
    pub max_hausdorff: u32,
    pub regular_count: usize,
    pub min_lemma_slack: f64,
}

#[derive(Debug)]
pub struct BigonScan {
    pub rows: Vec<BigonScanRow>,
    pub records: Vec<BigonRecord>,
    pub budget_exhausted: bool,
}

impl BigonScan {
    /// RFC-4180 rows `length,max_width,hausdorff_width,regular,normalized`.
    pub fn write_bigon_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "length,max_width,hausdorff_width,regular,normalized")?;
        for rec in &self.records {
            writeln!(
                w,
                "{},{},{},{},{}",
                rec.length, rec.max_width, rec.hausdorff_width, rec.regular, rec.normalized
            )?;
        }
        Ok(())
    }
}

/// Scans bigons with one endpoint at the center: enumerates geodesics to
/// sampled sphere-L endpoints (switching to uniform sampling when the
/// geodesic count overflows) and records every distinct pair, up to
/// `budget` pairs per length.
#[allow(clippy::explicit_counter_loop)]
pub fn bigon_scan(
    ball: &Ball,
    l_max: u32,
    budget: usize,
    seed: u64,
) -> Result<BigonScan, GeometryError> {
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut budget_exhausted = false;
    // counter indexes RNG streams, independent of loop structure
    let mut counter = 0u64;
    for len in 1..=l_max.min(ball.radius()) {
        let sphere = ball.sphere(len);
        let mut pairs = 0usize;
        let mut max_width = 0u32;
        let mut max_hausdorff = 0u32;
        let mut regular_count = 0usize;
        let mut min_slack = f64::INFINITY;
        let mut rng = stream_rng(seed, counter);
        counter += 1;
        // sample endpoints without replacement when the sphere is small
        let sphere_ids: Vec<VertexId> = sphere.collect();
        let endpoints: Vec<VertexId> = if sphere_ids.len() <= 64 {
            sphere_ids
        } else {
            (0..64)
                .map(|_| sphere_ids[rng.gen_range(0..sphere_ids.len())])
                .collect()
        };
        'endpoints: for &w in &endpoints {
            let en = ball.enumerate_geodesics(ball.center_id(), w, 6)?;
            let mut words = en.words;
            if en.overflow {
                for _ in 0..4 {
                    words.push(ball.sample_geodesic(ball.center_id(), w, &mut rng)?);
                }
            }
            for i in 0..words.len() {
                for j in i + 1..words.len() {
                    if words[i].letters == words[j].letters {
                        continue;
                    }
                    if pairs >= budget {
                        budget_exhausted = true;
                        break 'endpoints;
                    }
                    let rec = bigon_from_words(ball, words[i].clone(), words[j].clone())?;
                    pairs += 1;
                    max_width = max_width.max(rec.max_width);
                    max_hausdorff = max_hausdorff.max(rec.hausdorff_width);
                    if rec.regular {
                        regular_count += 1;
                    }
                    min_slack = min_slack.min(rec.lemma_slack);
                    records.push(rec);
                }
            }
        }
        rows.push(BigonScanRow {
            length: len,
            pairs_scanned: pairs,
            max_width,
            max_hausdorff,
            regular_count,
            min_lemma_slack: if pairs == 0 { 0.0 } else { min_slack },
        });
    }
    Ok(BigonScan {
        rows,
        records,
        budget_exhausted,
    })
}

/// Nonnegative 2-Lipschitz function on `[0, L]` vanishing at the ends,
/// sampled at integer times with linear interpolation in between.
#[derive(Debug, Clone)]
pub struct ProperFunction {
    samples: Vec<f64>,
}

impl ProperFunction {
    pub fn new(samples: Vec<f64>) -> Result<Self, GeometryError> {
        if samples.len() < 2 {
            return Err(GeometryError::BadProperFunction(
                "need at least two samples".into(),
            ));
        }
        if samples[0] != 0.0 || *samples.last().unwrap() != 0.0 {
            return Err(GeometryError::BadProperFunction(
                "must vanish at the ends".into(),
            ));
        }
        if samples.iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(GeometryError::BadProperFunction(
                "must be nonnegative".into(),
            ));
        }
        for w in samples.windows(2) {
            if (w[1] - w[0]).abs() > 2.0 + 1e-12 {
                return Err(GeometryError::BadProperFunction(format!(
                    "not 2-Lipschitz: jump {} -> {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(ProperFunction { samples })
    }

    pub fn from_widths(widths: &[u32]) -> Result<Self, GeometryError> {
        Self::new(widths.iter().map(|&w| w as f64).collect())
    }

    /// Domain length L.
    pub fn domain_len(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn eval(&self, t: f64) -> f64 {
        let l = self.domain_len() as f64;
        let t = t.clamp(0.0, l);
        let i = (t.floor() as usize).min(self.domain_len() - 1);
        let frac = t - i as f64;
        self.samples[i] * (1.0 - frac) + self.samples[i + 1] * frac
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(0.0, f64::max)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

/// Result of the k-height brute force.
#[derive(Debug, Clone, Serialize)]
pub struct HeightResult {
    pub k: f64,
    pub h_k: f64,
    /// Witness interval `[p, q]` on the grid.
    pub witness: (f64, f64),
    pub grid_step: f64,
}

/// Brute-force `h_k(f)`: maximizes `min(f|_J)` over all grid intervals
/// satisfying the suitability condition
/// `len(J)/(2k) <= min(f|_J) = f(p) = f(q) <= len(J)/k`
/// within tolerance `2 * grid_step` (the 2-Lipschitz slack).
pub fn height_hk(
    f: &ProperFunction,
    k: f64,
    grid_step: f64,
) -> Result<HeightResult, GeometryError> {
    if k <= 0.0 {
        return Err(GeometryError::BadK(k));
    }
    let m = 1.0 / grid_step;
    if grid_step <= 0.0 || (m - m.round()).abs() > 1e-9 {
        return Err(GeometryError::BadGridStep(grid_step));
    }
    let per_unit = m.round() as usize;
    let n_pts = f.domain_len() * per_unit + 1;
    let vals: Vec<f64> = (0..n_pts).map(|i| f.eval(i as f64 * grid_step)).collect();
    let tol = 2.0 * grid_step;
    let mut best: Option<(f64, usize, usize)> = None;
    for p in 0..n_pts {
        let mut min_v = vals[p];
        for q in p..n_pts {
            min_v = min_v.min(vals[q]);
            let len = (q - p) as f64 * grid_step;
            let suitable = len / (2.0 * k) <= min_v + tol
                && min_v <= len / k + tol
                && vals[p] <= min_v + tol
                && vals[q] <= min_v + tol;
            if suitable && best.as_ref().is_none_or(|(b, _, _)| min_v > *b) {
                best = Some((min_v, p, q));
            }
        }
    }
    match best {
        Some((h, p, q)) => Ok(HeightResult {
            k,
            h_k: h,
            witness: (p as f64 * grid_step, q as f64 * grid_step),
            grid_step,
        }),
        // a degenerate interval at any zero of f qualifies, so this is
        // unreachable for a genuine proper function
        None => Err(GeometryError::NoSuitableInterval),
    }
}

/// Paradox-interval certificate: evaluates the height-based inequalities
/// and the disjointness of the 2n candidate balls on a concrete bigon.
#[derive(Debug, Clone, Serialize)]
pub struct ParadoxCertificate {
    /// `M = h_k(w_beta)`.
    pub m_value: f64,
    pub witness: (f64, f64),
    pub interval_len: f64,
    /// Spacing `d = L/(n-1)` between candidate ball centers.
    pub spacing: f64,
    /// `L/(2k) <= M <= L/k` re-verified from the witness.
    pub suitable_ok: bool,
    /// `M >= (2r+1)(n-1)/k`.
    pub ineq_centers: bool,
    /// `M >= 2r+1`.
    pub ineq_height: bool,
    /// `d >= 2r+1` (follows from the two above).
    pub ineq_spacing: bool,
    /// `M >= max(1, 2r(A+2)/(2k-A-1))`.
    pub ineq_middle: bool,
    /// `M >= 2r(B+2)(2kB+1)`.
    pub ineq_mixing: bool,
    pub balls_disjoint: bool,
    pub min_center_distance: Option<u32>,
    /// `(side, integer time)` of each candidate ball center.
    pub centers: Vec<(u8, u32)>,
    /// All inequality checks and disjointness hold.
    pub paradox_candidate: bool,
}

/// Runs the certificate for one bigon under the given parameter ledger.
///
/// A failing inequality is a report entry, not an error: trees produce
/// `M = 0` certificates that fail the height inequalities, which is the
/// expected "no paradoxical interval" outcome.
pub fn paradox_certificate(
    ball: &Ball,
    bigon: &BigonRecord,
    params: &ParadoxParameters,
    grid_step: f64,
) -> Result<ParadoxCertificate, GeometryError> {
    let f = ProperFunction::from_widths(&bigon.widths)?;
    let height = height_hk(&f, params.k, grid_step)?;
    let m = height.h_k;
    let (p, q) = height.witness;
    let len = q - p;
    let n = params.n as f64;
    let r = params.r as f64;
    let tol = 2.0 * grid_step;

    let suitable_ok = len / (2.0 * params.k) <= m + tol && m <= len / params.k + tol;
    let ineq_centers = m >= (2.0 * r + 1.0) * (n - 1.0) / params.k;
    let ineq_height = m >= 2.0 * r + 1.0;
    let spacing = if params.n >= 2 { len / (n - 1.0) } else { len };
    let ineq_spacing = spacing >= 2.0 * r + 1.0;
    let denom = 2.0 * params.k - params.factor_a - 1.0;
    let ineq_middle = m >= (2.0 * r * (params.factor_a + 2.0) / denom).max(1.0);
    let ineq_mixing =
        m >= 2.0 * r * (params.factor_b + 2.0) * (2.0 * params.k * params.factor_b + 1.0);

    // candidate centers at the n equally spaced times on both sides,
    // rounded to the integer sampling grid
    let mut centers = Vec::new();
    for side in 0..2u8 {
        for i in 0..params.n {
            let t = p + spacing * i as f64;
            let ti = t.round().clamp(0.0, bigon.length as f64) as u32;
            centers.push((side, ti));
        }
    }
    let vertex_of = |&(side, t): &(u8, u32)| -> VertexId {
        let side_word = if side == 0 {
            &bigon.side0
        } else {
            &bigon.side1
        };
        side_word.at(t as usize)
    };
    let mut min_dist: Option<u32> = None;
    let mut disjoint = true;
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            let (u, v) = (vertex_of(&centers[i]), vertex_of(&centers[j]));
            if u == v {
                disjoint = false;
                min_dist = Some(0);
                continue;
            }
            let d = word_distance(ball, u, v).unwrap_or(u32::MAX);
            min_dist = Some(min_dist.map_or(d, |m| m.min(d)));
            if d <= 2 * params.r {
                disjoint = false;
            }
        }
    }

    let paradox_candidate = suitable_ok
        && ineq_centers
        && ineq_height
        && ineq_spacing
        && ineq_middle
        && ineq_mixing
        && disjoint;
    Ok(ParadoxCertificate {
        m_value: m,
        witness: height.witness,
        interval_len: len,
        spacing,
        suitable_ok,
        ineq_centers,
        ineq_height,
        ineq_spacing,
        ineq_middle,
        ineq_mixing,
        balls_disjoint: disjoint,
        min_center_distance: min_dist,
        centers,
        paradox_candidate,
    })
}

/// Builds the two corner geodesics of the grid bigon `(0,0) -> (n,n)`:
/// all-right-then-up against all-up-then-right. Test and demo helper for
/// lattice groups.
pub fn staircase_words(
    ball: &Ball,
    first_gen: usize,
    second_gen: usize,
    n: usize,
) -> Result<(GeodesicWord, GeodesicWord), GeometryError> {
    let mk = |order: [usize; 2]| -> Result<GeodesicWord, GeometryError> {
        let mut letters = Vec::new();
        let mut vertices = vec![ball.center_id()];
        for &g in &order {
            for _ in 0..n {
                let v = *vertices.last().unwrap();
                let u = ball.neighbor(v, g);
                if u == OUTSIDE {
                    return Err(GeometryError::WorkingRadiusTooSmall {
                        working: ball.radius(),
                        needed: 2 * n as u32,
                    });
                }
                letters.push(g as u16);
                vertices.push(u);
            }
        }
        Ok(GeodesicWord {
            start: ball.center_id(),
            end: *vertices.last().unwrap(),
            letters,
            vertices,
        })
    };
    Ok((mk([first_gen, second_gen])?, mk([second_gen, first_gen])?))
}

/// Element-level helper for scans: the midpoint element of a sampled
/// geodesic between two elements, if lengths allow.
pub fn geodesic_midpoint(ball: &Ball, w: &GeodesicWord) -> Option<(GroupElement, u32)> {
    let l = w.len();
    if !l.is_multiple_of(2) {
        return None;
    }
    Some((ball.element(w.at(l / 2)), (l / 2) as u32))
}
