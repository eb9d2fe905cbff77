//! Finite balls of Cayley graphs: interned vertices, per-generator
//! adjacency, BFS distance fields, and geodesic interval/enumeration
//! queries.
//!
//! Vertex ids are ball-local and dense (0 is the center, ids are in BFS
//! discovery order, so each distance layer is contiguous). Normal-form
//! payloads live in one byte arena; a fixed-seed open-addressing table maps
//! encodings to ids. This keeps a 4-regular tree ball of radius 15 (about
//! 2.9e7 vertices) under two gigabytes, with a hard caller-supplied memory
//! cap enforced during construction.

use crate::groups::{GeneratorSet, GroupElement, GroupOracle};
use crate::util::hash_bytes;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use std::collections::VecDeque;
use thiserror::Error;

pub type VertexId = u32;

/// Adjacency sentinel: the neighbor exists in the group but lies outside
/// the ball.
pub const OUTSIDE: VertexId = u32::MAX;

#[derive(Debug, Error)]
pub enum BallError {
    #[error(
        "memory cap of {cap} bytes exceeded at radius {radius_reached} (of requested {requested})"
    )]
    MemoryCap {
        cap: usize,
        radius_reached: u32,
        requested: u32,
    },
    #[error("vertex not in ball")]
    NotInBall,
    #[error(
        "geodesic interval [{x},{z}] may be truncated by the ball boundary \
         (dist(x)={dx} + dist(z)={dz} + |x-z|={d} > 2R={two_r}); enlarge the ball"
    )]
    IntervalTruncated {
        x: VertexId,
        z: VertexId,
        dx: u32,
        dz: u32,
        d: u32,
        two_r: u32,
    },
    #[error("geodesic enumeration limit must be positive")]
    ZeroLimit,
    #[error("ball radius {radius} too small for working radius {needed}")]
    RadiusTooSmall { radius: u32, needed: u32 },
}

struct InternTable {
    hashes: Vec<u64>,
    ids: Vec<u32>,
    mask: usize,
    len: usize,
}

impl InternTable {
    fn with_capacity(cap: usize) -> Self {
        let cap = cap.next_power_of_two().max(64);
        InternTable {
            hashes: vec![0; cap],
            ids: vec![0; cap],
            mask: cap - 1,
            len: 0,
        }
    }

    fn bytes(&self) -> usize {
        self.hashes.len() * 12
    }

    #[inline]
    fn find_or_slot(&self, h: u64, key: &[u8], arena: &Arena) -> Result<u32, usize> {
        let h = h | 1; // 0 marks empty slots
        let mut i = (h as usize) & self.mask;
        loop {
            let slot = self.hashes[i];
            if slot == 0 {
                return Err(i);
            }
            if slot == h {
                let id = self.ids[i];
                if arena.get(id) == key {
                    return Ok(id);
                }
            }
            i = (i + 1) & self.mask;
        }
    }

    fn insert_at(&mut self, slot: usize, h: u64, id: u32) {
        self.hashes[slot] = h | 1;
        self.ids[slot] = id;
        self.len += 1;
        if self.len * 10 > self.hashes.len() * 7 {
            self.grow();
        }
    }

    fn grow(&mut self) {
        let new_cap = self.hashes.len() * 2;
        let mut hashes = vec![0u64; new_cap];
        let mut ids = vec![0u32; new_cap];
        let mask = new_cap - 1;
        for (&h, &id) in self.hashes.iter().zip(&self.ids) {
            if h == 0 {
                continue;
            }
            let mut i = (h as usize) & mask;
            while hashes[i] != 0 {
                i = (i + 1) & mask;
            }
            hashes[i] = h;
            ids[i] = id;
        }
        self.hashes = hashes;
        self.ids = ids;
        self.mask = mask;
    }
}

struct Arena {
    bytes: Vec<u8>,
    offsets: Vec<u64>,
}

impl Arena {
    fn new() -> Self {
        Arena {
            bytes: Vec::new(),
            offsets: vec![0],
        }
    }

    #[inline]
    fn get(&self, id: u32) -> &[u8] {
        &self.bytes[self.offsets[id as usize] as usize..self.offsets[id as usize + 1] as usize]
    }

    fn push(&mut self, key: &[u8]) -> u32 {
        let id = self.offsets.len() - 1;
        self.bytes.extend_from_slice(key);
        self.offsets.push(self.bytes.len() as u64);
        id as u32
    }

    fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    fn memory(&self) -> usize {
        self.bytes.len() + self.offsets.len() * 8
    }
}

/// Interned radius-R ball of a Cayley graph around a center element.
pub struct Ball {
    oracle: GroupOracle,
    gens: GeneratorSet,
    center: GroupElement,
    radius: u32,
    arena: Arena,
    table: InternTable,
    /// Row-major `[vertex][generator]`, `OUTSIDE` marks neighbors beyond R.
    adjacency: Vec<VertexId>,
    dist: Vec<u8>,
    /// `layer_starts[d]..layer_starts[d+1]` are the ids at distance d.
    layer_starts: Vec<u32>,
}

impl std::fmt::Debug for Ball {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Ball")
            .field("radius", &self.radius)
            .field("vertices", &self.len())
            .field("generators", &self.gens.len())
            .finish()
    }
}

impl Ball {
    /// BFS construction containing exactly the elements at word distance
    /// <= `radius` from `center`. Errors out (naming the radius reached)
    /// once estimated memory exceeds `memory_cap` bytes.
    pub fn build(
        oracle: &GroupOracle,
        gens: &GeneratorSet,
        center: &GroupElement,
        radius: u32,
        memory_cap: usize,
    ) -> Result<Ball, BallError> {
        assert!(radius <= 255, "distance field is u8");
        let ngen = gens.len();
        let mut arena = Arena::new();
        let mut table = InternTable::with_capacity(1024);
        let mut adjacency: Vec<VertexId> = Vec::new();
        let mut dist: Vec<u8> = Vec::new();
        let mut layer_starts: Vec<u32> = vec![0];

        let mut buf = Vec::new();
        oracle.encode(center, &mut buf);
        let h = hash_bytes(&buf);
        match table.find_or_slot(h, &buf, &arena) {
            Ok(_) => unreachable!("empty table"),
            Err(slot) => {
                let id = arena.push(&buf);
                table.insert_at(slot, h, id);
                dist.push(0);
            }
        }

        let mut processed: usize = 0;
        for d in 0..=radius {
            let layer_end = arena.len();
            if processed == layer_end {
                break; // finite group exhausted before reaching the radius
            }
            while processed < layer_end {
                let v = processed as u32;
                let el = oracle.decode(arena.get(v));
                adjacency.resize(adjacency.len() + ngen, OUTSIDE);
                for g in 0..ngen {
                    let prod = oracle.multiply(&el, gens.element(g)).expect("same oracle");
                    buf.clear();
                    oracle.encode(&prod, &mut buf);
                    let h = hash_bytes(&buf);
                    let id = match table.find_or_slot(h, &buf, &arena) {
                        Ok(id) => id,
                        Err(slot) => {
                            if d == radius {
                                continue; // beyond the ball, leave OUTSIDE
                            }
                            let id = arena.push(&buf);
                            table.insert_at(slot, h, id);
                            dist.push(d as u8 + 1);
                            id
                        }
                    };
                    adjacency[v as usize * ngen + g] = id;
                }
                processed += 1;
            }
            layer_starts.push(layer_end as u32);
            let mem = arena.memory()
                + table.bytes()
                + adjacency.capacity() * 4
                + dist.capacity()
                + (arena.len() - processed) * ngen * 4;
            if mem > memory_cap {
                return Err(BallError::MemoryCap {
                    cap: memory_cap,
                    radius_reached: d,
                    requested: radius,
                });
            }
        }
        layer_starts.push(arena.len() as u32);
        while layer_starts.len() < radius as usize + 2 {
            let top = *layer_starts.last().unwrap();
            layer_starts.push(top);
        }

        Ok(Ball {
            oracle: oracle.clone(),
            gens: gens.clone(),
            center: center.clone(),
            radius,
            arena,
            table,
            adjacency,
            dist,
            layer_starts,
        })
    }

    pub fn len(&self) -> usize {
        self.arena.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn oracle(&self) -> &GroupOracle {
        &self.oracle
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn center(&self) -> &GroupElement {
        &self.center
    }

    pub fn center_id(&self) -> VertexId {
        0
    }

    /// Distance from the center.
    #[inline]
    pub fn dist(&self, v: VertexId) -> u32 {
        self.dist[v as usize] as u32
    }

    #[inline]
    pub fn neighbor(&self, v: VertexId, gen: usize) -> VertexId {
        self.adjacency[v as usize * self.gens.len() + gen]
    }

    pub fn adjacency_row(&self, v: VertexId) -> &[VertexId] {
        let n = self.gens.len();
        &self.adjacency[v as usize * n..(v as usize + 1) * n]
    }

    pub fn element(&self, v: VertexId) -> GroupElement {
        self.oracle.decode(self.arena.get(v))
    }

    pub fn id_of(&self, g: &GroupElement) -> Option<VertexId> {
        let mut buf = Vec::new();
        self.oracle.encode(g, &mut buf);
        let h = hash_bytes(&buf);
        self.table.find_or_slot(h, &buf, &self.arena).ok()
    }

    /// Ids at exact distance `d` from the center (contiguous by construction).
    pub fn sphere(&self, d: u32) -> std::ops::Range<u32> {
        if d as usize + 1 >= self.layer_starts.len() {
            return 0..0;
        }
        self.layer_starts[d as usize]..self.layer_starts[d as usize + 1]
    }

    pub fn sphere_size(&self, d: u32) -> usize {
        let r = self.sphere(d);
        (r.end - r.start) as usize
    }

    /// BFS distances from `src` restricted to the ball; `u32::MAX` marks
    /// unreachable-within-ball. A `forbidden` predicate removes vertices.
    pub fn bfs_from(&self, src: VertexId, forbidden: impl Fn(VertexId) -> bool) -> Vec<u32> {
        let mut d = vec![u32::MAX; self.len()];
        if forbidden(src) {
            return d;
        }
        let mut q = VecDeque::new();
        d[src as usize] = 0;
        q.push_back(src);
        while let Some(v) = q.pop_front() {
            let dv = d[v as usize];
            for &u in self.adjacency_row(v) {
                if u == OUTSIDE || d[u as usize] != u32::MAX || forbidden(u) {
                    continue;
                }
                d[u as usize] = dv + 1;
                q.push_back(u);
            }
        }
        d
    }

    /// Exact geodesic interval `[x,z]` with a truncation-refusing guard:
    /// `dist(x) + dist(z) + |x-z| <= 2R` forces every point of every x-z
    /// geodesic inside the ball, so in-ball BFS distances are the true word
    /// distances and the member set is exact.
    pub fn geodesic_interval(
        &self,
        x: VertexId,
        z: VertexId,
    ) -> Result<GeodesicInterval, BallError> {
        let dist_x = self.bfs_from(x, |_| false);
        let d = dist_x[z as usize];
        if d == u32::MAX || self.dist(x) + self.dist(z) + d > 2 * self.radius {
            return Err(BallError::IntervalTruncated {
                x,
                z,
                dx: self.dist(x),
                dz: self.dist(z),
                d,
                two_r: 2 * self.radius,
            });
        }
        let dist_z = self.bfs_from(z, |_| false);
        let members: Vec<VertexId> = (0..self.len() as u32)
            .filter(|&v| {
                dist_x[v as usize] != u32::MAX
                    && dist_z[v as usize] != u32::MAX
                    && dist_x[v as usize] + dist_z[v as usize] == d
            })
            .collect();
        Ok(GeodesicInterval {
            x,
            z,
            length: d,
            members,
            dist_x,
            dist_z,
        })
    }

    /// All geodesic words from x to z via the DAG of distance-decreasing
    /// edges; stops collecting at `limit` words (overflow flagged) but the
    /// exact count is always returned.
    pub fn enumerate_geodesics(
        &self,
        x: VertexId,
        z: VertexId,
        limit: usize,
    ) -> Result<GeodesicEnum, BallError> {
        if limit == 0 {
            return Err(BallError::ZeroLimit);
        }
        let interval = self.geodesic_interval(x, z)?;
        let counts = self.geodesic_counts(&interval);
        let mut words = Vec::new();
        let mut overflow = false;
        self.dfs_geodesics(
            &interval,
            x,
            &mut Vec::new(),
            &mut vec![x],
            limit,
            &mut words,
            &mut overflow,
        );
        Ok(GeodesicEnum {
            count: counts[x as usize].clone(),
            words,
            overflow,
            interval,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs_geodesics(
        &self,
        interval: &GeodesicInterval,
        v: VertexId,
        word: &mut Vec<u16>,
        path: &mut Vec<VertexId>,
        limit: usize,
        out: &mut Vec<GeodesicWord>,
        overflow: &mut bool,
    ) {
        if *overflow {
            return;
        }
        if word.len() == interval.length as usize {
            debug_assert_eq!(v, interval.z);
            if out.len() == limit {
                *overflow = true;
            } else {
                out.push(GeodesicWord {
                    start: interval.x,
                    end: interval.z,
                    letters: word.clone(),
                    vertices: path.clone(),
                });
            }
            return;
        }
        for g in 0..self.gens.len() {
            let u = self.neighbor(v, g);
            if u != OUTSIDE && interval.on_dag_edge(v, u) {
                word.push(g as u16);
                path.push(u);
                self.dfs_geodesics(interval, u, word, path, limit, out, overflow);
                word.pop();
                path.pop();
                if *overflow {
                    return;
                }
            }
        }
    }

    /// Number of geodesics from each interval vertex down to z.
    fn geodesic_counts(&self, interval: &GeodesicInterval) -> Vec<BigUint> {
        let mut counts = vec![BigUint::zero(); self.len()];
        counts[interval.z as usize] = BigUint::one();
        let mut members = interval.members.clone();
        members.sort_by_key(|&v| std::cmp::Reverse(interval.dist_x[v as usize]));
        for &v in &members {
            if v == interval.z {
                continue;
            }
            let mut acc = BigUint::zero();
            for g in 0..self.gens.len() {
                let u = self.neighbor(v, g);
                if u != OUTSIDE && interval.on_dag_edge(v, u) {
                    acc += &counts[u as usize];
                }
            }
            counts[v as usize] = acc;
        }
        counts
    }

    /// Uniform-random geodesic from x to z by exact DAG path counting.
    pub fn sample_geodesic<R: Rng>(
        &self,
        x: VertexId,
        z: VertexId,
        rng: &mut R,
    ) -> Result<GeodesicWord, BallError> {
        let interval = self.geodesic_interval(x, z)?;
        let counts = self.geodesic_counts(&interval);
        let mut v = x;
        let mut letters = Vec::new();
        let mut vertices = vec![x];
        for _ in 0..interval.length {
            let mut pick = rand_biguint_below(rng, &counts[v as usize]);
            let mut chosen = None;
            for g in 0..self.gens.len() {
                let u = self.neighbor(v, g);
                if u != OUTSIDE && interval.on_dag_edge(v, u) {
                    let c = &counts[u as usize];
                    if &pick < c {
                        chosen = Some((g, u));
                        break;
                    }
                    pick -= c;
                }
            }
            let (g, u) = chosen.expect("path counts cover all geodesics");
            letters.push(g as u16);
            vertices.push(u);
            v = u;
        }
        debug_assert_eq!(v, z);
        Ok(GeodesicWord {
            start: x,
            end: z,
            letters,
            vertices,
        })
    }

    /// CSV rows `id,normal_form,dist` for every vertex.
    pub fn write_vertices_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "id,normal_form,dist")?;
        for v in 0..self.len() as u32 {
            writeln!(
                w,
                "{},{},{}",
                v,
                self.oracle.display(&self.element(v)),
                self.dist(v)
            )?;
        }
        Ok(())
    }

    /// CSV edge list `src,gen,dst`; `dst` is empty for outside neighbors.
    pub fn write_edges_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "src,gen,dst")?;
        for v in 0..self.len() as u32 {
            for g in 0..self.gens.len() {
                let u = self.neighbor(v, g);
                if u == OUTSIDE {
                    writeln!(w, "{},{},", v, self.gens.label(g))?;
                } else {
                    writeln!(w, "{},{},{}", v, self.gens.label(g), u)?;
                }
            }
        }
        Ok(())
    }
}

fn rand_biguint_below<R: Rng>(rng: &mut R, bound: &BigUint) -> BigUint {
    let bits = bound.bits();
    if bound.is_one() {
        return BigUint::zero();
    }
    // uniform on [0, 2^bits), rejected until below the bound
    let top_mask: u32 = if bits.is_multiple_of(32) {
        u32::MAX
    } else {
        (1u32 << (bits % 32)) - 1
    };
    loop {
        let mut limbs = vec![0u32; bits.div_ceil(32) as usize];
        for l in limbs.iter_mut() {
            *l = rng.gen();
        }
        *limbs.last_mut().unwrap() &= top_mask;
        let x = BigUint::new(limbs);
        if &x < bound {
            return x;
        }
    }
}

/// Exact member set of `[x,z]` with the two BFS distance fields it was
/// computed from.
#[derive(Debug)]
pub struct GeodesicInterval {
    pub x: VertexId,
    pub z: VertexId,
    pub length: u32,
    pub members: Vec<VertexId>,
    dist_x: Vec<u32>,
    dist_z: Vec<u32>,
}

impl GeodesicInterval {
    #[inline]
    fn on_interval(&self, v: VertexId) -> bool {
        self.dist_x[v as usize] != u32::MAX
            && self.dist_z[v as usize] != u32::MAX
            && self.dist_x[v as usize] + self.dist_z[v as usize] == self.length
    }

    #[inline]
    fn on_dag_edge(&self, v: VertexId, u: VertexId) -> bool {
        self.on_interval(u) && self.dist_x[u as usize] == self.dist_x[v as usize] + 1
    }

    pub fn dist_from_x(&self, v: VertexId) -> u32 {
        self.dist_x[v as usize]
    }

    pub fn dist_from_z(&self, v: VertexId) -> u32 {
        self.dist_z[v as usize]
    }

    /// Interval vertices at distance length/2 from x.
    pub fn midpoints(&self) -> Vec<VertexId> {
        let half = self.length / 2;
        self.members
            .iter()
            .copied()
            .filter(|&v| self.dist_x[v as usize] == half)
            .collect()
    }
}

/// A concrete geodesic word: generator indices plus the visited vertices.
#[derive(Debug, Clone)]
pub struct GeodesicWord {
    pub start: VertexId,
    pub end: VertexId,
    pub letters: Vec<u16>,
    pub vertices: Vec<VertexId>,
}

impl GeodesicWord {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Vertex at integer time t.
    pub fn at(&self, t: usize) -> VertexId {
        self.vertices[t]
    }
}

/// Result of geodesic enumeration: the exact count plus up to `limit` words.
pub struct GeodesicEnum {
    pub count: BigUint,
    pub words: Vec<GeodesicWord>,
    pub overflow: bool,
    pub interval: GeodesicInterval,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{make_group, GroupSpec};
    use crate::util::stream_rng;

    const CAP: usize = 1 << 30;

    fn free2() -> Ball {
        let (o, g) = make_group(&GroupSpec::Free {
            rank: 2,
            extra: vec![],
        })
        .unwrap();
        Ball::build(&o, &g, &o.identity(), 6, CAP).unwrap()
    }

    fn z2(radius: u32) -> Ball {
        let (o, g) = make_group(&GroupSpec::FreeAbelian {
            rank: 2,
            extra: vec![],
        })
        .unwrap();
        Ball::build(&o, &g, &o.identity(), radius, CAP).unwrap()
    }

    #[test]
    fn free_group_ball_sizes() {
        let (o, g) = make_group(&GroupSpec::Free {
            rank: 2,
            extra: vec![],
        })
        .unwrap();
        let ball = Ball::build(&o, &g, &o.identity(), 3, CAP).unwrap();
        // |B_r| = 1, 5, 17, 53: spheres 4*3^(k-1)
        let mut cum = Vec::new();
        let mut tot = 0;
        for d in 0..=3 {
            tot += ball.sphere_size(d);
            cum.push(tot);
        }
        assert_eq!(cum, vec![1, 5, 17, 53]);
        assert_eq!(ball.len(), 53);
    }

    #[test]
    fn free_abelian_ball_sizes() {
        for r in 1..=5u32 {
            let ball = z2(r);
            let expect = (2 * r * r + 2 * r + 1) as usize;
            assert_eq!(ball.len(), expect, "radius {r}");
        }
    }

    #[test]
    fn radius_zero_is_single_vertex() {
        let (o, g) = make_group(&GroupSpec::Free {
            rank: 2,
            extra: vec![],
        })
        .unwrap();
        let ball = Ball::build(&o, &g, &o.identity(), 0, CAP).unwrap();
        assert_eq!(ball.len(), 1);
        assert_eq!(ball.dist(0), 0);
        assert!(ball.adjacency_row(0).iter().all(|&u| u == OUTSIDE));
    }

    #[test]
    fn extra_generator_breaks_tree() {
        let (o, g) = make_group(&GroupSpec::Free {
            rank: 2,
            extra: vec!["ab".into()],
        })
        .unwrap();
        let ball = Ball::build(&o, &g, &o.identity(), 3, CAP).unwrap();
        // with the relation a*b = (ab) the sphere sizes drop below the
        // 6-regular tree values 6, 30, 150
        assert_eq!(ball.sphere_size(1), 6);
        assert_eq!(ball.sphere_size(2), 24);
        assert_eq!(ball.sphere_size(3), 96);
        // triangle: a * b reachable in one step
        let a = ball.neighbor(0, 0);
        let ab_direct = ball.neighbor(0, g.index_of("ab").unwrap());
        let ab_via_a = ball.neighbor(a, g.index_of("b").unwrap());
        assert_eq!(ab_direct, ab_via_a);
    }

    #[test]
    fn finite_group_exhausts_before_radius() {
        let (o, g) = make_group(&GroupSpec::FreeProduct {
            orders: vec![5],
            extra: vec![],
        })
        .unwrap();
        let ball = Ball::build(&o, &g, &o.identity(), 10, CAP).unwrap();
        assert_eq!(ball.len(), 5);
    }

    #[test]
    fn memory_cap_names_radius_reached() {
        let (o, g) = make_group(&GroupSpec::Free {
            rank: 2,
            extra: vec![],
        })
        .unwrap();
        let err = Ball::build(&o, &g, &o.identity(), 12, 10_000).unwrap_err();
        match err {
            BallError::MemoryCap {
                radius_reached,
                requested,
                ..
            } => {
                assert!(radius_reached < 12);
                assert_eq!(requested, 12);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn adjacency_symmetric_under_inversion() {
        let ball = free2();
        let gens = ball.generators().clone();
        for v in 0..ball.len() as u32 {
            for g in 0..gens.len() {
                let u = ball.neighbor(v, g);
                if u != OUTSIDE {
                    assert_eq!(ball.neighbor(u, gens.inverse_index(g)), v);
                }
            }
        }
    }

    #[test]
    fn bfs_layers_respect_adjacency() {
        let ball = free2();
        for v in 0..ball.len() as u32 {
            for &u in ball.adjacency_row(v) {
                if u != OUTSIDE {
                    assert!(ball.dist(u).abs_diff(ball.dist(v)) <= 1);
                }
            }
        }
    }

    #[test]
    fn interval_on_tree_is_unique_geodesic() {
        let ball = free2();
        let g = ball.generators().clone();
        let o = ball.oracle().clone();
        let target = o.evaluate(&g, &[0, 2, 0]); // a b a
        let z = ball.id_of(&target).unwrap();
        let interval = ball.geodesic_interval(0, z).unwrap();
        assert_eq!(interval.length, 3);
        assert_eq!(interval.members.len(), 4);
        let en = ball.enumerate_geodesics(0, z, 10).unwrap();
        assert_eq!(en.count, BigUint::from(1u32));
        assert_eq!(en.words.len(), 1);
        assert!(!en.overflow);
    }

    #[test]
    fn interval_on_grid_is_rectangle() {
        let ball = z2(8);
        let o = ball.oracle().clone();
        let g = ball.generators().clone();
        let z = ball.id_of(&o.evaluate(&g, &[0, 0, 2, 2])).unwrap(); // (2,2)
        let interval = ball.geodesic_interval(0, z).unwrap();
        assert_eq!(interval.length, 4);
        assert_eq!(interval.members.len(), 9);
        let en = ball.enumerate_geodesics(0, z, 100).unwrap();
        assert_eq!(en.count, BigUint::from(6u32)); // binomial(4,2)
        assert_eq!(en.words.len(), 6);
    }

    #[test]
    fn degenerate_interval_is_single_point() {
        let ball = z2(4);
        let interval = ball.geodesic_interval(0, 0).unwrap();
        assert_eq!(interval.length, 0);
        assert_eq!(interval.members, vec![0]);
    }

    #[test]
    fn geodesic_count_overflow_flag() {
        let ball = z2(12);
        let o = ball.oracle().clone();
        let g = ball.generators().clone();
        // (5,5): binomial(10,5) = 252 geodesics
        let word: Vec<usize> = std::iter::repeat_n([0, 2], 5).flatten().collect();
        let z = ball.id_of(&o.evaluate(&g, &word)).unwrap();
        let en = ball.enumerate_geodesics(0, z, 10).unwrap();
        assert_eq!(en.count, BigUint::from(252u32));
        assert!(en.overflow);
        assert_eq!(en.words.len(), 10);
        assert!(ball.enumerate_geodesics(0, z, 0).is_err());
    }

    #[test]
    fn truncated_interval_refused() {
        let ball = z2(3);
        let o = ball.oracle().clone();
        let g = ball.generators().clone();
        let x = ball.id_of(&o.evaluate(&g, &[0, 0, 0])).unwrap(); // (3,0)
        let z = ball.id_of(&o.evaluate(&g, &[1, 1, 1])).unwrap(); // (-3,0)
        let err = ball.geodesic_interval(x, z).unwrap_err();
        assert!(matches!(err, BallError::IntervalTruncated { .. }));
    }

    #[test]
    fn geodesic_words_replay_through_oracle() {
        let ball = z2(8);
        let o = ball.oracle().clone();
        let g = ball.generators().clone();
        let z = ball.id_of(&o.evaluate(&g, &[0, 2, 0, 2])).unwrap();
        let en = ball.enumerate_geodesics(0, z, 100).unwrap();
        for w in &en.words {
            let mut acc = ball.element(0);
            for (t, &gi) in w.letters.iter().enumerate() {
                acc = o.multiply(&acc, g.element(gi as usize)).unwrap();
                let v = ball.id_of(&acc).unwrap();
                assert_eq!(v, w.vertices[t + 1]);
                // per-prefix distance t+1 from start
                assert_eq!(en.interval.dist_from_x(v), t as u32 + 1);
            }
            assert_eq!(*w.vertices.last().unwrap(), z);
        }
    }

    #[test]
    fn distance_symmetry_and_triangle_inequality() {
        let ball = free2();
        let mut rng = stream_rng(3, 9);
        use rand::Rng;
        for _ in 0..1000 {
            let x = rng.gen_range(0..ball.len() as u32);
            let z = rng.gen_range(0..ball.len() as u32);
            let y = rng.gen_range(0..ball.len() as u32);
            let dx = ball.bfs_from(x, |_| false);
            let dz = ball.bfs_from(z, |_| false);
            if dx[z as usize] != u32::MAX {
                assert_eq!(dx[z as usize], dz[x as usize]);
            }
            if dx[y as usize] != u32::MAX
                && dz[y as usize] != u32::MAX
                && dx[z as usize] != u32::MAX
            {
                assert!(dx[z as usize] <= dx[y as usize] + dz[y as usize]);
            }
        }
    }

    #[test]
    fn uniform_geodesic_sampling_is_complete() {
        let ball = z2(8);
        let o = ball.oracle().clone();
        let g = ball.generators().clone();
        let z = ball.id_of(&o.evaluate(&g, &[0, 0, 2, 2])).unwrap();
        let mut rng = stream_rng(5, 0);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..200 {
            let w = ball.sample_geodesic(0, z, &mut rng).unwrap();
            assert_eq!(w.len(), 4);
            seen.insert(w.letters.clone());
        }
        assert_eq!(seen.len(), 6); // all binomial(4,2) geodesics appear
    }

    #[test]
    fn csv_export_schema() {
        let ball = z2(1);
        let mut v = Vec::new();
        ball.write_vertices_csv(&mut v).unwrap();
        let text = String::from_utf8(v).unwrap();
        assert!(text.starts_with("id,normal_form,dist\n"));
        assert!(text.contains("0,(0,0),0"));
        let mut e = Vec::new();
        ball.write_edges_csv(&mut e).unwrap();
        assert!(String::from_utf8(e).unwrap().starts_with("src,gen,dst\n"));
    }
}
